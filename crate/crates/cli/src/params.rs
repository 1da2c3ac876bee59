//! Command parameters. Every field is optional so that presets, a JSON
//! config file and command-line flags can be layered, in that order, with
//! later layers winning. Keys in config files are the long flag names.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{usage, CliError, CliResult};

/// `x_dB → 10^{x/10}`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// A list of numbers written `a,b,c` or as an inclusive range
/// `start:stop[:step]` (step defaults to 1).
#[derive(Debug, Clone, PartialEq)]
pub struct NumList(pub Vec<f64>);

impl NumList {
    pub fn usizes(&self, name: &str) -> CliResult<Vec<usize>> {
        self.0
            .iter()
            .map(|&v| {
                if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                    Ok(v as usize)
                } else {
                    usage(format!("{name} must contain non-negative integers, got {v}"))
                }
            })
            .collect()
    }
}

fn parse_range(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad number {p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let (start, stop, step) = match parts[..] {
        [a, b] => (a, b, 1.0),
        [a, b, c] => (a, b, c),
        _ => return Err(format!("range {s:?} must be start:stop or start:stop:step")),
    };
    if !(step > 0.0 && step.is_finite() && start.is_finite() && stop.is_finite()) {
        return Err(format!("range {s:?} needs finite bounds and a positive step"));
    }
    let count = ((stop - start) / step + 1e-9).floor();
    if count < 0.0 {
        return Err(format!("range {s:?} is empty"));
    }
    if count > 1e6 {
        return Err(format!("range {s:?} has too many points"));
    }
    Ok((0..=count as usize).map(|i| start + i as f64 * step).collect())
}

impl FromStr for NumList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err("empty list".into());
        }
        if s.contains(':') {
            return parse_range(s).map(NumList);
        }
        s.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad number {p:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(NumList)
    }
}

impl fmt::Display for NumList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl Serialize for NumList {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for NumList {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            One(f64),
            Many(Vec<f64>),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::One(v) => Ok(NumList(vec![v])),
            Raw::Many(v) => Ok(NumList(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

macro_rules! layered {
    ($(#[$meta:meta])* pub struct $name:ident {
        $( $(#[$fmeta:meta])* pub $field:ident : $ty:ty, )*
    }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Default, PartialEq, clap::Args, Serialize, Deserialize)]
        #[serde(rename_all = "kebab-case", deny_unknown_fields)]
        pub struct $name {
            $( $(#[$fmeta])* #[arg(long)] #[serde(default, skip_serializing_if = "Option::is_none")] pub $field: Option<$ty>, )*
        }

        impl $name {
            /// Config-file keys, the long flag names.
            pub fn keys() -> Vec<String> {
                vec![$( stringify!($field).replace('_', "-"), )*]
            }

            /// Fields set in `top` replace those of `self`.
            pub fn overlay(self, top: Self) -> Self {
                Self { $( $field: top.$field.or(self.$field), )* }
            }
        }
    };
}

layered! {
    /// Channel ensemble shared by the single-user commands.
    pub struct ChannelParams {
        /// rayleigh, nakagami or deterministic.
        pub fading: String,
        /// Nakagami shape.
        pub m: f64,
        /// Transmit antennas M.
        pub tx: usize,
        /// Receive antennas N.
        pub rx: usize,
        /// Real parts of a fixed channel, row-major N x M (default: identity).
        pub h: NumList,
        /// Imaginary parts of a fixed channel.
        pub h_imag: NumList,
    }
}

layered! {
    pub struct BoundsParams {
        /// Px/Pw in dB.
        pub snr_db: NumList,
        /// Ps/Pw in dB.
        pub ps_db: f64,
        /// Ps/Pw, linear.
        pub ps: f64,
        /// Noise power per receive antenna (linear).
        pub pw: f64,
    }
}

layered! {
    pub struct GapTableParams {
        /// Transmit antenna counts.
        pub m_list: NumList,
        /// Receive antenna counts.
        pub n_list: NumList,
    }
}

layered! {
    pub struct DpcSimParams {
        /// Px/Pw in dB.
        pub px_db: f64,
        /// Px/Pw, linear.
        pub px: f64,
        pub ps_db: f64,
        pub ps: f64,
        /// Noise power (linear); a tiny value gives a noiseless channel.
        pub pw: f64,
        /// Channel uses per frame.
        pub n_sym: NumList,
        /// Code rates in bits per real dimension (cubic codes).
        pub bits: NumList,
        /// cubic or binary.
        pub code: String,
        /// Generator rows of the binary code.
        pub k: usize,
        pub frames: usize,
        pub epsilon: f64,
        /// identity or costa.
        pub precoder: String,
    }
}

layered! {
    pub struct BcParams {
        /// quasi_static, ergodic, dpc_csit, time_share or all.
        pub mode: String,
        /// Transmit antennas M.
        pub tx: usize,
        pub n1: usize,
        pub n2: usize,
        /// Transmit power (linear).
        pub px: f64,
        /// Px/Pw1 in dB.
        pub px_pw1_db: f64,
        /// Px/Pw2 in dB.
        pub px_pw2_db: f64,
        /// deterministic, rayleigh or nakagami.
        pub user1: String,
        pub user2: String,
        pub m1: f64,
        pub m2: f64,
        /// Real parts of receiver 1's fixed channel, row-major N1 x M.
        pub g: NumList,
        pub alpha_steps: usize,
        /// unscaled or noise_scaled.
        pub r1_form: String,
    }
}

layered! {
    pub struct LatticeParams {
        pub n: usize,
        /// Scale of the cubic lattice.
        pub q: f64,
        /// Prime for a Construction-A lattice instead of the cubic one.
        pub p: u32,
        /// Construction-A generator rows, rows separated by ';'.
        pub generator: String,
        /// Scale of the Construction-A lattice.
        pub scale: f64,
        /// Code rate of the cubic codebook check.
        pub bits: u32,
        /// Number of random pairs for the distributive-law check.
        pub pairs: usize,
    }
}

layered! {
    /// Settings common to every command.
    pub struct CommonParams {
        pub seed: u64,
        /// Monte Carlo samples per estimate.
        pub samples: usize,
        /// csv or json.
        pub format: String,
    }
}

/// A parsed JSON config object from which parameter groups are taken.
#[derive(Debug)]
pub struct ConfigFile {
    map: serde_json::Map<String, serde_json::Value>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::Io)?;
        Self::parse(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        match serde_json::from_str(text).map_err(|e| e.to_string())? {
            serde_json::Value::Object(map) => Ok(ConfigFile { map }),
            _ => Err("expected a JSON object".into()),
        }
    }

    /// Removes and decodes the keys belonging to one parameter group.
    pub fn take<P: for<'de> Deserialize<'de>>(&mut self, keys: &[String]) -> CliResult<P> {
        let mut sub = serde_json::Map::new();
        for key in keys {
            if let Some(v) = self.map.remove(key) {
                sub.insert(key.clone(), v);
            }
        }
        serde_json::from_value(sub.into()).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    /// Fails on keys no group claimed.
    pub fn finish(self) -> CliResult<()> {
        match self.map.keys().next() {
            Some(k) => usage(format!("config: unknown key {k:?}")),
            None => Ok(()),
        }
    }
}

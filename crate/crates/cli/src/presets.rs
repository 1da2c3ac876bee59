//! Flag presets reproducing the parameter sets of the figures.
//!
//! | preset | command | setting |
//! |---|---|---|
//! | fig1 | gap-table | M = 1..4, N = 1..30 |
//! | fig2 | bounds | Rayleigh 2x2, Ps/Pw = 80 dB |
//! | fig3 | bounds | Nakagami m = 2, 1x1, Ps/Pw = 80 dB |
//! | fig4 | bounds | Rayleigh 1x1, Ps/Pw = 80 dB |
//! | fig5 | bc-region | M = N1 = 2, N2 = 4, G = I, Rayleigh receiver 2 |
//! | fig6 | bc-region | single antenna, g = 1, Nakagami m = 2 receiver 2 |
//! | fig7 | bc-region | M = 1, N1 = N2 = 2, Nakagami m = 2 at both receivers |
//!
//! The broadcast presets use `Px/Pw1 = 0 dB` and `Px/Pw2 = 20 dB`.

use crate::error::{usage, CliResult};
use crate::params::{BcParams, BoundsParams, ChannelParams, GapTableParams, NumList};

#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    Bounds(ChannelParams, BoundsParams),
    GapTable(GapTableParams),
    BcRegion(BcParams),
}

impl Preset {
    pub fn command(&self) -> &'static str {
        match self {
            Preset::Bounds(..) => "bounds",
            Preset::GapTable(_) => "gap-table",
            Preset::BcRegion(_) => "bc-region",
        }
    }
}

pub const NAMES: [&str; 7] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7"];

fn list(s: &str) -> Option<NumList> {
    Some(s.parse().expect("preset lists are well formed"))
}

fn bounds(fading: &str, tx: usize, rx: usize) -> Preset {
    Preset::Bounds(
        ChannelParams {
            fading: Some(fading.into()),
            m: (fading == "nakagami").then_some(2.0),
            tx: Some(tx),
            rx: Some(rx),
            ..Default::default()
        },
        BoundsParams {
            snr_db: list("0:30:2"),
            ps_db: Some(80.0),
            pw: Some(1.0),
            ..Default::default()
        },
    )
}

fn broadcast(tx: usize, n1: usize, n2: usize, user1: &str, user2: &str) -> Preset {
    Preset::BcRegion(BcParams {
        mode: Some("all".into()),
        tx: Some(tx),
        n1: Some(n1),
        n2: Some(n2),
        px: Some(1.0),
        px_pw1_db: Some(0.0),
        px_pw2_db: Some(20.0),
        user1: Some(user1.into()),
        user2: Some(user2.into()),
        m1: (user1 == "nakagami").then_some(2.0),
        m2: (user2 == "nakagami").then_some(2.0),
        alpha_steps: Some(20),
        ..Default::default()
    })
}

pub fn preset(name: &str) -> CliResult<Preset> {
    Ok(match name {
        "fig1" => Preset::GapTable(GapTableParams {
            m_list: list("1,2,3,4"),
            n_list: list("1:30"),
        }),
        "fig2" => bounds("rayleigh", 2, 2),
        "fig3" => bounds("nakagami", 1, 1),
        "fig4" => bounds("rayleigh", 1, 1),
        "fig5" => broadcast(2, 2, 4, "deterministic", "rayleigh"),
        "fig6" => broadcast(1, 1, 1, "deterministic", "nakagami"),
        "fig7" => broadcast(1, 2, 2, "nakagami", "nakagami"),
        other => return usage(format!("unknown preset {other:?}; expected one of {}", NAMES.join(", "))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves() {
        for name in NAMES {
            preset(name).unwrap();
        }
        assert!(preset("fig8").is_err());
    }

    #[test]
    fn commands_match_figures() {
        assert_eq!(preset("fig1").unwrap().command(), "gap-table");
        assert_eq!(preset("fig3").unwrap().command(), "bounds");
        assert_eq!(preset("fig7").unwrap().command(), "bc-region");
    }
}

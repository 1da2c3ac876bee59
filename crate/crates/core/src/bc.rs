//! Two-user broadcast rate regions with superposition `x = x1 + x2`,
//! `E‖x1‖² = αPx`, `E‖x2‖² = (1−α)Px`. Receiver 1 treats `x2` as noise;
//! `x1` is dirt for receiver 2, known at the transmitter.
//!
//! Receiver 1's rate depends on its channel `G` only through the
//! eigenvalues `σ²` of `GᴴG`: with `ρ1 = Px/(M·Pw1)` each eigenvalue
//! contributes `log2(1 + αρ1σ²/((1−α)ρ1σ² + 1))`, which is
//! `log2 det(I + (αPx/M) GᴴΦ⁻¹G)` with `Φ = (1−α)(Px/M) GGᴴ + Pw1 I`.
//!
//! Receiver 2's lattice rate is `(L2 + M·log2(1−α))⁺`, where `L2` is its
//! dirt-free lattice rate. Every α reuses the same seed, so all curves are
//! evaluated on one shared set of channel draws.

use crate::bounds::{lattice_inner, log2_det_shifted, outer_bound, PowerConfig};
use crate::error::{Error, Result};
use crate::fading::{gram_eigenvalues, ChannelMatrix, FadingSpec};
use crate::linalg::{check_condition, hermitian_spectrum, log2_det_hpd, spectral_map, CMatrix};
use crate::mc::{mc_matrix, mc_scalar, Estimate, McSettings};
use crate::Complex64;

/// Which receiver-1 expression to use when receiver 1 fades. The
/// quasi-static expression is unaffected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum R1Form {
    /// `I + (αPx/M) H1ᴴΦ⁻¹H1`, consistent with the quasi-static expression.
    #[default]
    Unscaled,
    /// `I + (αPx/(M·Pw1)) H1ᴴΦ⁻¹H1`, with an extra `1/Pw1`.
    NoiseScaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionMode {
    /// Quasi-static receiver 1, ergodic receiver 2.
    QuasiStatic,
    /// Ergodic receiver 1 and receiver 2.
    Ergodic,
    /// Dirty-paper coding with channel knowledge at the transmitter.
    DpcCsit,
    /// Time sharing between the single-user lattice rates.
    TimeShare,
}

impl RegionMode {
    pub const ALL: [RegionMode; 4] = [RegionMode::QuasiStatic, RegionMode::Ergodic, RegionMode::DpcCsit, RegionMode::TimeShare];

    pub fn name(self) -> &'static str {
        match self {
            RegionMode::QuasiStatic => "quasi_static",
            RegionMode::Ergodic => "ergodic",
            RegionMode::DpcCsit => "dpc_csit",
            RegionMode::TimeShare => "time_share",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        RegionMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown region mode {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BcConfig {
    /// Transmit antennas `M`.
    pub tx: usize,
    pub n1: usize,
    pub n2: usize,
    pub px: f64,
    pub pw1: f64,
    pub pw2: f64,
    pub user1: FadingSpec,
    pub user2: FadingSpec,
    /// Sorted values in `[0, 1]`.
    pub alpha_grid: Vec<f64>,
    pub r1_form: R1Form,
}

/// `n_steps + 1` evenly spaced values from 0 to 1, both ends exact.
pub fn alpha_grid(n_steps: usize) -> Vec<f64> {
    let n = n_steps.max(1);
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

impl BcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tx == 0 || self.n1 == 0 || self.n2 == 0 {
            return Err(Error::Config("antenna counts must be positive".into()));
        }
        if !(self.px >= 0.0 && self.px.is_finite()) {
            return Err(Error::Config(format!("Px must be finite and >= 0, got {}", self.px)));
        }
        for (name, pw) in [("Pw1", self.pw1), ("Pw2", self.pw2)] {
            if !(pw > 0.0 && pw.is_finite()) {
                return Err(Error::Config(format!("{name} must be finite and > 0, got {pw}")));
            }
        }
        for (name, spec, rx) in [("user 1", &self.user1, self.n1), ("user 2", &self.user2, self.n2)] {
            spec.validate()?;
            if spec.tx != self.tx || spec.rx != rx {
                return Err(Error::Config(format!(
                    "{name} channel is {}x{} but should be {rx}x{}",
                    spec.rx, spec.tx, self.tx
                )));
            }
        }
        if self.alpha_grid.is_empty() {
            return Err(Error::Config("alpha grid is empty".into()));
        }
        if self.alpha_grid.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::Config("alpha values must lie in [0, 1]".into()));
        }
        if self.alpha_grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Config("alpha grid must be sorted".into()));
        }
        Ok(())
    }

    fn rho1(&self) -> f64 {
        self.px / (self.tx as f64 * self.pw1)
    }

    fn rho2(&self) -> f64 {
        self.px / (self.tx as f64 * self.pw2)
    }

    /// Single-user, dirt-free power configuration of receiver 2.
    pub fn user2_power(&self) -> PowerConfig {
        PowerConfig {
            px: self.px,
            ps: 0.0,
            pw: self.pw2,
            tx: self.tx,
            rx: self.n2,
        }
    }

    /// Single-user power configuration of receiver 1.
    pub fn user1_power(&self) -> PowerConfig {
        PowerConfig {
            px: self.px,
            ps: 0.0,
            pw: self.pw1,
            tx: self.tx,
            rx: self.n1,
        }
    }
}

/// Φ = (1−α)(Px/M)·G Gᴴ + Pw1·I.
pub fn phi(g: &ChannelMatrix, alpha: f64, bc: &BcConfig) -> Result<CMatrix> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Precondition(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    let n1 = g.rx();
    let scale = Complex64::new((1.0 - alpha) * bc.px / bc.tx as f64, 0.0);
    Ok(&g.0 * g.0.adjoint() * scale + CMatrix::identity(n1, n1) * Complex64::new(bc.pw1, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionPoint {
    pub alpha: f64,
    pub r1: Estimate,
    pub r2: Estimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionCurve {
    pub mode: RegionMode,
    pub points: Vec<RegionPoint>,
}

/// Effective receiver-1 SNR on one Gram eigenvalue.
fn r1_gain(s: f64, alpha: f64, bc: &BcConfig, form: R1Form) -> f64 {
    let rho1 = bc.rho1();
    let g = alpha * rho1 * s / ((1.0 - alpha) * rho1 * s + 1.0);
    match form {
        R1Form::Unscaled => g,
        R1Form::NoiseScaled => g / bc.pw1,
    }
}

fn r1_log_det(eigs: &[f64], alpha: f64, bc: &BcConfig, form: R1Form) -> f64 {
    let mut acc = 0.0;
    for &s in eigs {
        acc += (1.0 + r1_gain(s, alpha, bc, form)).log2();
    }
    acc
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Precondition(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    Ok(())
}

fn fixed_eigenvalues(spec: &FadingSpec) -> Result<Vec<f64>> {
    match &spec.kind {
        crate::fading::FadingKind::Deterministic { fixed } => gram_eigenvalues(&ChannelMatrix(fixed.clone())),
        _ => Err(Error::Config(
            "the quasi-static region needs a deterministic receiver-1 channel; use the ergodic mode for fading".into(),
        )),
    }
}

/// Lattice rate of receiver 2 with `Ps = αPx` dirt.
fn r2_lattice(alpha: f64, bc: &BcConfig, mc: &McSettings) -> Result<Estimate> {
    if alpha >= 1.0 {
        return Ok(Estimate::exact(0.0, mc.n_samples));
    }
    let base = lattice_inner(&bc.user2_power(), &bc.user2, mc)?;
    if alpha == 0.0 {
        return Ok(base);
    }
    let value = base.mean + bc.tx as f64 * (1.0 - alpha).log2();
    Ok(Estimate {
        mean: value.max(0.0),
        std_error: if value > 0.0 { base.std_error } else { 0.0 },
        n_samples: base.n_samples,
    })
}

pub fn quasi_static_point(alpha: f64, bc: &BcConfig, mc: &McSettings) -> Result<RegionPoint> {
    bc.validate()?;
    check_alpha(alpha)?;
    let eigs = fixed_eigenvalues(&bc.user1)?;
    Ok(RegionPoint {
        alpha,
        r1: Estimate::exact(r1_log_det(&eigs, alpha, bc, R1Form::Unscaled), mc.n_samples),
        r2: r2_lattice(alpha, bc, mc)?,
    })
}

/// Ergodic receiver-1 lattice rate `(−log2 det E[(I + D(α))⁻¹])⁺`.
fn r1_ergodic_lattice(alpha: f64, bc: &BcConfig, mc: &McSettings) -> Result<Estimate> {
    if bc.user1.is_deterministic() {
        let eigs = fixed_eigenvalues(&bc.user1)?;
        return Ok(Estimate::exact(r1_log_det(&eigs, alpha, bc, bc.r1_form), mc.n_samples));
    }
    if alpha == 0.0 || bc.px == 0.0 {
        return Ok(Estimate::exact(0.0, mc.n_samples));
    }
    let inv = |h: &ChannelMatrix| -> Result<CMatrix> {
        let spectrum = hermitian_spectrum(&h.gram())?;
        let shifted: Vec<f64> = spectrum.values.iter().map(|&s| 1.0 + r1_gain(s.max(0.0), alpha, bc, bc.r1_form)).collect();
        check_condition(&shifted)?;
        Ok(spectral_map(&spectrum, |s| 1.0 / (1.0 + r1_gain(s.max(0.0), alpha, bc, bc.r1_form))))
    };
    let mean = mc_matrix(inv, &bc.user1, mc.n_samples, &mc.seed)?;
    let value = -log2_det_hpd(&mean.mean)?;
    let weight = crate::linalg::hermitian_inverse(&mean.mean)?;
    let linear = mc_scalar(
        |h| Ok((&weight * inv(h)?).trace().re / std::f64::consts::LN_2),
        &bc.user1,
        mc.n_samples,
        &mc.seed,
    )?;
    Ok(Estimate {
        mean: value.max(0.0),
        std_error: linear.std_error,
        n_samples: mc.n_samples,
    })
}

pub fn ergodic_point(alpha: f64, bc: &BcConfig, mc: &McSettings) -> Result<RegionPoint> {
    bc.validate()?;
    check_alpha(alpha)?;
    Ok(RegionPoint {
        alpha,
        r1: r1_ergodic_lattice(alpha, bc, mc)?,
        r2: r2_lattice(alpha, bc, mc)?,
    })
}

/// Region with transmitter channel knowledge: receiver 2 sees no
/// interference, receiver 1 gets the (ergodic) binning rate.
pub fn dpc_csit_point(alpha: f64, bc: &BcConfig, mc: &McSettings) -> Result<RegionPoint> {
    bc.validate()?;
    check_alpha(alpha)?;
    let r1 = if bc.user1.is_deterministic() {
        Estimate::exact(r1_log_det(&fixed_eigenvalues(&bc.user1)?, alpha, bc, R1Form::Unscaled), mc.n_samples)
    } else {
        mc_scalar(
            |h| Ok(r1_log_det(&gram_eigenvalues(h)?, alpha, bc, bc.r1_form)),
            &bc.user1,
            mc.n_samples,
            &mc.seed,
        )?
    };
    let r2 = if alpha == 0.0 {
        outer_bound(&bc.user2_power(), &bc.user2, mc)?
    } else if alpha >= 1.0 {
        Estimate::exact(0.0, mc.n_samples)
    } else {
        let rho = (1.0 - alpha) * bc.rho2();
        mc_scalar(
            |h| Ok(log2_det_shifted(&gram_eigenvalues(h)?, 1.0, rho)),
            &bc.user2,
            mc.n_samples,
            &mc.seed,
        )?
    };
    Ok(RegionPoint { alpha, r1, r2 })
}

fn lattice_point(alpha: f64, bc: &BcConfig, mc: &McSettings) -> Result<RegionPoint> {
    if bc.user1.is_deterministic() {
        quasi_static_point(alpha, bc, mc)
    } else {
        ergodic_point(alpha, bc, mc)
    }
}

/// Straight line from `(R1(α=1), 0)` to `(0, R2(α=0))`, sampled at the grid:
/// `(α·R1max, (1−α)·R2max)`.
pub fn time_share_curve(bc: &BcConfig, mc: &McSettings) -> Result<RegionCurve> {
    bc.validate()?;
    let r1_max = lattice_point(1.0, bc, mc)?.r1;
    let r2_max = lattice_point(0.0, bc, mc)?.r2;
    let points = bc
        .alpha_grid
        .iter()
        .map(|&a| RegionPoint {
            alpha: a,
            r1: Estimate {
                mean: a * r1_max.mean,
                std_error: a * r1_max.std_error,
                n_samples: mc.n_samples,
            },
            r2: Estimate {
                mean: (1.0 - a) * r2_max.mean,
                std_error: (1.0 - a) * r2_max.std_error,
                n_samples: mc.n_samples,
            },
        })
        .collect();
    Ok(RegionCurve {
        mode: RegionMode::TimeShare,
        points,
    })
}

/// One point per α of the grid, all on the same seed.
pub fn sweep_region(mode: RegionMode, bc: &BcConfig, mc: &McSettings) -> Result<RegionCurve> {
    bc.validate()?;
    if mode == RegionMode::TimeShare {
        return time_share_curve(bc, mc);
    }
    let point = |a: f64| match mode {
        RegionMode::QuasiStatic => quasi_static_point(a, bc, mc),
        RegionMode::Ergodic => ergodic_point(a, bc, mc),
        RegionMode::DpcCsit => dpc_csit_point(a, bc, mc),
        RegionMode::TimeShare => unreachable!("handled above"),
    };
    let points = bc.alpha_grid.iter().map(|&a| point(a)).collect::<Result<Vec<_>>>()?;
    Ok(RegionCurve { mode, points })
}

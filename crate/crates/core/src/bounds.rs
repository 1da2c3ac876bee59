//! Outer bound, inner bounds and gap bounds for the fading MIMO dirty-paper
//! channel `y = Hx + s' + w` with `M` transmit and `N` receive antennas.
//!
//! With `ρ = Px/(M·Pw)` and `c = Px/(Px + M·Ps)` (`c = 1` when `Ps = 0`):
//!
//! * outer bound: `E[log2 det(I + ρ HᴴH)]`
//! * Gaussian-binning inner bound: `(E[log2 det(c I + ρ HᴴH)])⁺`
//! * lattice inner bound: `(−log2 det E[(c I + ρ HᴴH)⁻¹])⁺`
//!
//! All three are evaluated from the eigenvalues of `HᴴH` with shared code,
//! so on a common seed they satisfy `lattice ≤ dpc ≤ outer` exactly and
//! `dpc == outer` bit-for-bit when `Ps = 0`.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::fading::{gram_eigenvalues, ChannelMatrix, FadingSpec};
use crate::linalg::{
    check_condition, hermitian_inverse, hermitian_spectrum, log2_det_hpd, spectral_map, CMatrix,
    RMatrix,
};
use crate::mc::{mc_collect, mc_matrix, mc_scalar, Estimate, McSettings};
use crate::quad::integrate_half_line;
/// Transmit, dirt and noise powers with antenna counts. `ps` is the
/// variance of each dirt element and `pw` the noise variance per receive
/// antenna.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerConfig {
    pub px: f64,
    pub ps: f64,
    pub pw: f64,
    pub tx: usize,
    pub rx: usize,
}

impl PowerConfig {
    pub fn new(px: f64, ps: f64, pw: f64, tx: usize, rx: usize) -> Result<Self> {
        let cfg = PowerConfig { px, ps, pw, tx, rx };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.px >= 0.0 && self.px.is_finite()) {
            return Err(Error::Config(format!("Px must be finite and >= 0, got {}", self.px)));
        }
        if !(self.ps >= 0.0 && self.ps.is_finite()) {
            return Err(Error::Config(format!("Ps must be finite and >= 0, got {}", self.ps)));
        }
        if !(self.pw > 0.0 && self.pw.is_finite()) {
            return Err(Error::Config(format!("Pw must be finite and > 0, got {}", self.pw)));
        }
        if self.tx == 0 || self.rx == 0 {
            return Err(Error::Config("antenna counts must be positive".into()));
        }
        Ok(())
    }

    /// SNR per transmit antenna, `Px/(M·Pw)`.
    pub fn rho(&self) -> f64 {
        self.px / (self.tx as f64 * self.pw)
    }

    /// `Px/(Px + M·Ps)`, taken as 1 when there is no dirt.
    pub fn dirt_factor(&self) -> f64 {
        if self.ps == 0.0 {
            1.0
        } else {
            self.px / (self.px + self.tx as f64 * self.ps)
        }
    }

    pub fn check_spec(&self, spec: &FadingSpec) -> Result<()> {
        self.validate()?;
        spec.validate()?;
        if spec.tx != self.tx || spec.rx != self.rx {
            return Err(Error::Config(format!(
                "channel is {}x{} (rx x tx) but powers are configured for {}x{}",
                spec.rx, spec.tx, self.rx, self.tx
            )));
        }
        Ok(())
    }
}

/// A rate in bits per complex channel use, clamped at zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RateBits(f64);

impl RateBits {
    pub fn new(value: f64) -> Self {
        RateBits(value.max(0.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<RateBits> for f64 {
    fn from(r: RateBits) -> f64 {
        r.0
    }
}

fn clamp_estimate(est: Estimate) -> Estimate {
    Estimate {
        mean: est.mean.max(0.0),
        ..est
    }
}

/// `Σ_j log2(c + ρ σ_j²)` over the Gram eigenvalues.
pub fn log2_det_shifted(eigenvalues: &[f64], c: f64, rho: f64) -> f64 {
    let mut acc = 0.0;
    for &s in eigenvalues {
        acc += (c + rho * s).log2();
    }
    acc
}

/// `(c I + ρ HᴴH)⁻¹` through the eigen-decomposition of `HᴴH`.
pub fn shifted_gram_inverse(h: &ChannelMatrix, c: f64, rho: f64) -> Result<CMatrix> {
    let spectrum = hermitian_spectrum(&h.gram())?;
    let shifted: Vec<f64> = spectrum.values.iter().map(|&s| c + rho * s.max(0.0)).collect();
    check_condition(&shifted)?;
    Ok(spectral_map(&spectrum, |s| 1.0 / (c + rho * s.max(0.0))))
}

/// `E[log2 det(I + ρ HᴴH)]`.
pub fn outer_bound(cfg: &PowerConfig, spec: &FadingSpec, mc: &McSettings) -> Result<Estimate> {
    cfg.check_spec(spec)?;
    let rho = cfg.rho();
    mc_scalar(
        |h| Ok(log2_det_shifted(&gram_eigenvalues(h)?, 1.0, rho)),
        spec,
        mc.n_samples,
        &mc.seed,
    )
}

/// `(E[log2 det(c I + ρ HᴴH)])⁺`; zero when `Px = 0`.
pub fn dpc_inner(cfg: &PowerConfig, spec: &FadingSpec, mc: &McSettings) -> Result<Estimate> {
    cfg.check_spec(spec)?;
    if cfg.px == 0.0 {
        return Ok(Estimate::exact(0.0, mc.n_samples));
    }
    let (c, rho) = (cfg.dirt_factor(), cfg.rho());
    let est = mc_scalar(
        |h| Ok(log2_det_shifted(&gram_eigenvalues(h)?, c, rho)),
        spec,
        mc.n_samples,
        &mc.seed,
    )?;
    Ok(clamp_estimate(est))
}

/// `(−log2 det E[(c I + ρ HᴴH)⁻¹])⁺`; zero when `Px = 0`.
///
/// The standard error comes from the delta method,
/// `−log2 det(Ê) ≈ const − tr(Ê⁻¹ X)/ln 2`, evaluated on the same samples.
pub fn lattice_inner(cfg: &PowerConfig, spec: &FadingSpec, mc: &McSettings) -> Result<Estimate> {
    cfg.check_spec(spec)?;
    if cfg.px == 0.0 {
        return Ok(Estimate::exact(0.0, mc.n_samples));
    }
    let (c, rho) = (cfg.dirt_factor(), cfg.rho());
    if spec.is_deterministic() {
        // No expectation, so no Jensen gap: this is the binning rate itself.
        return dpc_inner(cfg, spec, mc);
    }
    let mean_inv = mc_matrix(|h| shifted_gram_inverse(h, c, rho), spec, mc.n_samples, &mc.seed)?;
    let value = -log2_det_hpd(&mean_inv.mean)?;
    let weight = hermitian_inverse(&mean_inv.mean)?;
    let linear = mc_scalar(
        |h| {
            let x = shifted_gram_inverse(h, c, rho)?;
            Ok((&weight * x).trace().re / LN_2)
        },
        spec,
        mc.n_samples,
        &mc.seed,
    )?;
    Ok(Estimate {
        mean: value.max(0.0),
        std_error: linear.std_error,
        n_samples: mc.n_samples,
    })
}

/// The three bounds on one shared sample schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTriple {
    pub outer: Estimate,
    pub dpc: Estimate,
    pub lattice: Estimate,
}

pub fn all_bounds(cfg: &PowerConfig, spec: &FadingSpec, mc: &McSettings) -> Result<BoundTriple> {
    Ok(BoundTriple {
        outer: outer_bound(cfg, spec, mc)?,
        dpc: dpc_inner(cfg, spec, mc)?,
        lattice: lattice_inner(cfg, spec, mc)?,
    })
}

/// Gap between outer bound and Gaussian-binning rate: never more than `M`
/// bits.
pub fn binning_gap_bound(cfg: &PowerConfig) -> RateBits {
    RateBits::new(cfg.tx as f64)
}

/// Result of [`gap_general`] with its convergence diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralGap {
    pub gap: Estimate,
    /// Largest share of `Σ tr((HᴴH)⁻¹)` contributed by a single sample.
    pub max_sample_share: f64,
    /// Relative standard error of the `tr((HᴴH)⁻¹)` estimate.
    pub inverse_trace_rel_se: f64,
    /// Set when evaluated below `ρ = 1`, outside the range where the value
    /// bounds the lattice gap.
    pub below_unit_snr: bool,
}

const MAX_SAMPLE_SHARE: f64 = 0.01;
const MAX_INVERSE_REL_SE: f64 = 0.02;

/// `log2 det((I + E[HᴴH])·E[(HᴴH)⁻¹])`, both moments on shared samples.
///
/// The inverse moment is infinite for some ensembles (e.g. square Rayleigh
/// channels). The sample mean then never settles, which shows up as single
/// draws dominating the sum; such runs are rejected as numerical errors.
pub fn gap_general(
    cfg: &PowerConfig,
    spec: &FadingSpec,
    mc: &McSettings,
    allow_low_snr: bool,
) -> Result<GeneralGap> {
    cfg.check_spec(spec)?;
    if cfg.rx < cfg.tx {
        return Err(Error::Precondition(format!(
            "needs N >= M, got N = {}, M = {}",
            cfg.rx, cfg.tx
        )));
    }
    let below_unit_snr = cfg.rho() < 1.0;
    if below_unit_snr && !allow_low_snr {
        return Err(Error::Precondition(format!(
            "needs rho >= 1, got {}",
            cfg.rho()
        )));
    }
    let n = mc.n_samples;
    let first = mc_matrix(|h| Ok(h.gram()), spec, n, &mc.seed)?;
    let inverse = mc_matrix(|h| hermitian_inverse(&h.gram()), spec, n, &mc.seed)?;

    let (max_sample_share, inverse_trace_rel_se) = if spec.is_deterministic() {
        (0.0, 0.0)
    } else {
        let traces = mc_collect(|h| Ok(hermitian_inverse(&h.gram())?.trace().re), spec, n, &mc.seed)?;
        let total: f64 = crate::linalg::pairwise_sum(&traces);
        let max = traces.iter().copied().fold(0.0_f64, f64::max);
        let mean = total / n as f64;
        let var = traces.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / (n.max(2) - 1) as f64;
        (max / total, (var / n as f64).sqrt() / mean)
    };
    if max_sample_share > MAX_SAMPLE_SHARE || inverse_trace_rel_se > MAX_INVERSE_REL_SE {
        return Err(Error::Numerical(format!(
            "inverse moment E[(H^H H)^-1] does not converge: one sample carries {:.1}% of the sum, relative SE {:.1}%",
            100.0 * max_sample_share,
            100.0 * inverse_trace_rel_se
        )));
    }

    let m = cfg.tx;
    let a = CMatrix::identity(m, m) + &first.mean;
    let b = &inverse.mean;
    let value = log2_det_hpd(&a)? + log2_det_hpd(b)?;
    let (a_inv, b_inv) = (hermitian_inverse(&a)?, hermitian_inverse(b)?);
    let linear = mc_scalar(
        |h| {
            let g = h.gram();
            let gi = hermitian_inverse(&g)?;
            Ok(((&a_inv * g).trace().re + (&b_inv * gi).trace().re) / LN_2)
        },
        spec,
        n,
        &mc.seed,
    )?;
    Ok(GeneralGap {
        gap: Estimate {
            mean: value,
            std_error: linear.std_error,
            n_samples: n,
        },
        max_sample_share,
        inverse_trace_rel_se,
        below_unit_snr,
    })
}

/// Lattice gap bound for i.i.d. Rayleigh MIMO, `M·log2(1 + (M+1)/(N−M))`.
pub fn gap_rayleigh_mimo(m: usize, n: usize) -> Result<RateBits> {
    if m == 0 || n <= m {
        return Err(Error::Precondition(format!("needs N > M >= 1, got M = {m}, N = {n}")));
    }
    let (mf, nf) = (m as f64, n as f64);
    Ok(RateBits::new(mf * (1.0 + (mf + 1.0) / (nf - mf)).log2()))
}

/// Lattice gap bound for scalar Nakagami-`m` fading, `1 + log2(1 + 1/(m−1))`.
pub fn gap_nakagami(m: f64) -> Result<RateBits> {
    let inv = nakagami_inverse_moment(m)?;
    Ok(RateBits::new(1.0 + inv.log2()))
}

/// Lattice gap bound for scalar Rayleigh fading,
/// `1.48 + log2(log2(1 + κ))` with `κ = max(Px/Pw, Ps/Pw, 1)`.
pub fn gap_rayleigh_scalar(cfg: &PowerConfig) -> Result<RateBits> {
    cfg.validate()?;
    if cfg.tx != 1 || cfg.rx != 1 {
        return Err(Error::Precondition(format!(
            "scalar bound needs M = N = 1, got M = {}, N = {}",
            cfg.tx, cfg.rx
        )));
    }
    let kappa = (cfg.px / cfg.pw).max(cfg.ps / cfg.pw).max(1.0);
    Ok(RateBits::new(1.48 + (1.0 + kappa).log2().log2()))
}

/// `E[log2(1 + Pw/(|h|² Px))]`, the scalar high-SNR loss of the lattice
/// scheme relative to the outer bound.
pub fn high_snr_scalar_gap(cfg: &PowerConfig, spec: &FadingSpec, mc: &McSettings) -> Result<Estimate> {
    cfg.check_spec(spec)?;
    if cfg.tx != 1 || cfg.rx != 1 {
        return Err(Error::Precondition("high-SNR scalar gap needs M = N = 1".into()));
    }
    if cfg.px == 0.0 {
        return Err(Error::Precondition("high-SNR scalar gap needs Px > 0".into()));
    }
    let snr = cfg.px / cfg.pw;
    mc_scalar(
        |h| Ok((1.0 + 1.0 / (h.0[(0, 0)].norm_sqr() * snr)).log2()),
        spec,
        mc.n_samples,
        &mc.seed,
    )
}

/// `E[(HᴴH)⁻¹] = I_M/(N−M)` for i.i.d. `CN(0,1)` entries.
pub fn wishart_inverse_mean(m: usize, n: usize) -> Result<RMatrix> {
    if m == 0 || n <= m {
        return Err(Error::Precondition(format!("needs N > M >= 1, got M = {m}, N = {n}")));
    }
    Ok(RMatrix::identity(m, m) / (n - m) as f64)
}

/// `E[1/|h|²] = 1 + 1/(m−1)` for Nakagami-`m` with unit power; infinite for
/// `m <= 1`.
pub fn nakagami_inverse_moment(m: f64) -> Result<f64> {
    if !(m > 1.0 && m.is_finite()) {
        return Err(Error::Precondition(format!(
            "inverse moment diverges unless m > 1, got m = {m}"
        )));
    }
    Ok(1.0 + 1.0 / (m - 1.0))
}

const E1_REL_TOL: f64 = 1e-10;

fn check_z(z: f64) -> Result<()> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::Precondition(format!("needs finite z > 0, got {z}")));
    }
    Ok(())
}

/// `e^z·E1(z) = ∫_0^∞ e^{−u}/(z + u) du`, which stays representable where
/// `E1(z)` itself underflows.
pub fn e1_scaled(z: f64) -> Result<f64> {
    check_z(z)?;
    let mut breaks: Vec<f64> = (-3..=3).map(|k| z * 10f64.powi(k)).collect();
    breaks.extend([1.0, 10.0, 40.0]);
    let q = integrate_half_line(|u| (-u).exp() / (z + u), &breaks, E1_REL_TOL, 0.0)?;
    Ok(q.value)
}

/// Exponential integral `E1(z) = ∫_z^∞ e^{−t}/t dt`.
pub fn e1_bar(z: f64) -> Result<f64> {
    Ok((-z).exp() * e1_scaled(z)?)
}

/// Upper bound `e^{−z}·ln(1 + 1/z)` on `E1(z)`.
pub fn e1_bound(z: f64) -> Result<f64> {
    Ok((-z).exp() * e1_bound_scaled(z)?)
}

/// `e^z` times [`e1_bound`], i.e. `ln(1 + 1/z)`.
pub fn e1_bound_scaled(z: f64) -> Result<f64> {
    check_z(z)?;
    Ok((1.0 / z).ln_1p())
}

/// Rate of a real-valued channel `h` (`rows x cols`), `½ log2 det(c I + ρ hᵀh)`
/// in bits per real channel use.
pub fn real_channel_rate(h: &RMatrix, c: f64, rho: f64) -> Result<f64> {
    let g = h.transpose() * h;
    let shifted = RMatrix::identity(g.nrows(), g.ncols()) * c + g * rho;
    Ok(0.5 * crate::linalg::log2_det_spd(&shifted)?)
}

//! Fading-channel ensembles.
//!
//! A [`FadingSpec`] describes the distribution of the `N x M` channel matrix
//! `H` (receive x transmit). Stochastic kinds are normalised to unit average
//! power per entry, `E[|h_ij|^2] = 1`, and draws are i.i.d. across channel
//! uses.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{gram, psd_eigenvalues, CMatrix, RMatrix};

#[derive(Debug, Clone, PartialEq)]
pub enum FadingKind {
    /// i.i.d. circularly-symmetric complex Gaussian entries, `CN(0, 1)`.
    RayleighIid,
    /// i.i.d. entries with Nakagami-`m` amplitude (`Ω = 1`) and uniform phase.
    Nakagami { m: f64 },
    /// Every draw equals `fixed`.
    Deterministic { fixed: CMatrix },
}

/// Channel distribution together with its antenna counts.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingSpec {
    pub kind: FadingKind,
    /// Transmit antennas `M` (matrix columns).
    pub tx: usize,
    /// Receive antennas `N` (matrix rows).
    pub rx: usize,
}

impl FadingSpec {
    pub fn rayleigh(tx: usize, rx: usize) -> Result<Self> {
        let spec = FadingSpec {
            kind: FadingKind::RayleighIid,
            tx,
            rx,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Nakagami-`m` fading. Only single-transmit-antenna channels are
    /// supported (`tx == 1`); with `rx > 1` the receive branches fade
    /// independently.
    pub fn nakagami(m: f64, tx: usize, rx: usize) -> Result<Self> {
        let spec = FadingSpec {
            kind: FadingKind::Nakagami { m },
            tx,
            rx,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn deterministic(fixed: CMatrix) -> Result<Self> {
        let spec = FadingSpec {
            tx: fixed.ncols(),
            rx: fixed.nrows(),
            kind: FadingKind::Deterministic { fixed },
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Deterministic channel from a real-valued matrix given row by row.
    pub fn deterministic_real(rx: usize, tx: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != rx * tx {
            return Err(Error::Config(format!(
                "expected {} entries for a {rx}x{tx} matrix, got {}",
                rx * tx,
                rows.len()
            )));
        }
        let m = DMatrix::from_row_iterator(rx, tx, rows.iter().map(|&v| Complex64::new(v, 0.0)));
        Self::deterministic(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tx == 0 || self.rx == 0 {
            return Err(Error::Config("antenna counts must be positive".into()));
        }
        match &self.kind {
            FadingKind::RayleighIid => Ok(()),
            FadingKind::Nakagami { m } => {
                if !(m.is_finite() && *m > 0.0) {
                    return Err(Error::Config(format!("Nakagami shape must be > 0, got {m}")));
                }
                if self.tx != 1 {
                    return Err(Error::Config(format!(
                        "Nakagami fading requires a single transmit antenna, got M = {}",
                        self.tx
                    )));
                }
                Ok(())
            }
            FadingKind::Deterministic { fixed } => {
                if fixed.nrows() != self.rx || fixed.ncols() != self.tx {
                    return Err(Error::Config(format!(
                        "fixed matrix is {}x{}, spec says {}x{}",
                        fixed.nrows(),
                        fixed.ncols(),
                        self.rx,
                        self.tx
                    )));
                }
                if fixed.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::Config("fixed matrix has non-finite entries".into()));
                }
                Ok(())
            }
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self.kind, FadingKind::Deterministic { .. })
    }

    pub fn label(&self) -> String {
        match &self.kind {
            FadingKind::RayleighIid => "rayleigh".to_string(),
            FadingKind::Nakagami { m } => format!("nakagami(m={m})"),
            FadingKind::Deterministic { .. } => "deterministic".to_string(),
        }
    }
}

/// One channel realisation (`N x M`, complex).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix(pub CMatrix);

impl ChannelMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Input("channel matrix has non-finite entries".into()));
        }
        Ok(ChannelMatrix(entries))
    }

    pub fn rx(&self) -> usize {
        self.0.nrows()
    }

    pub fn tx(&self) -> usize {
        self.0.ncols()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.0
    }

    /// `Hᴴ H`.
    pub fn gram(&self) -> CMatrix {
        gram(&self.0)
    }
}

/// Draw one channel matrix from `spec`.
pub fn sample_channel<R: Rng + ?Sized>(spec: &FadingSpec, rng: &mut R) -> Result<ChannelMatrix> {
    spec.validate()?;
    let (rx, tx) = (spec.rx, spec.tx);
    let entries = match &spec.kind {
        FadingKind::RayleighIid => {
            let half = std::f64::consts::FRAC_1_SQRT_2;
            DMatrix::from_fn(rx, tx, |_, _| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re * half, im * half)
            })
        }
        FadingKind::Nakagami { m } => {
            // |h|^2 ~ Gamma(m, 1/m) has mean 1.
            let power = Gamma::new(*m, 1.0 / *m)
                .map_err(|e| Error::Config(format!("Nakagami shape {m}: {e}")))?;
            DMatrix::from_fn(rx, tx, |_, _| {
                let amp = power.sample(rng).sqrt();
                let phase = rng.random::<f64>() * std::f64::consts::TAU;
                Complex64::from_polar(amp, phase)
            })
        }
        FadingKind::Deterministic { fixed } => fixed.clone(),
    };
    Ok(ChannelMatrix(entries))
}

/// Real `2N x 2M` equivalent `[[Re H, -Im H], [Im H, Re H]]` acting on
/// stacked `[Re x; Im x]`.
pub fn real_equivalent(h: &ChannelMatrix) -> RMatrix {
    let (n, m) = (h.rx(), h.tx());
    let mut out = RMatrix::zeros(2 * n, 2 * m);
    for i in 0..n {
        for j in 0..m {
            let z = h.0[(i, j)];
            out[(i, j)] = z.re;
            out[(i, j + m)] = -z.im;
            out[(i + n, j)] = z.im;
            out[(i + n, j + m)] = z.re;
        }
    }
    out
}

/// Eigenvalues of `Hᴴ H` (`M` of them, non-negative, unordered).
pub fn gram_eigenvalues(h: &ChannelMatrix) -> Result<Vec<f64>> {
    psd_eigenvalues(&h.gram())
}

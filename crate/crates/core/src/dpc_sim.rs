//! Dithered nested-lattice transceiver for the fading dirty-paper channel
//! `y_i = H_i (x_i + s_i) + w_i`.
//!
//! A complex frame of `n_sym` channel uses is carried by the real-equivalent
//! channel `H̃_i` (`2N x 2M`) acting on `[Re x_i; Im x_i]`. The real parts of
//! all uses form one codeword of length `n_sym·M`, the imaginary parts a
//! second, independent one with its own dither. Per real dimension the
//! input has power `Px/(2M)`, the dirt `Ps/2` and the noise `Pw/2`.
//!
//! Encoder: `x = (t − B s − d) mod Λ`, with `B = I` by default.
//! Receiver: `y′_i = U_iᵀ y_i + d` with
//! `U_i = μ (μ H̃_i H̃_iᵀ + Pw I)⁻¹ H̃_i`, `μ = Px/M + Ps`, then Euclidean
//! lattice decoding of `y′` followed by reduction mod `Λ`. The decoder never
//! looks at the channel.
//!
//! With `B = I`, `y′ = t + λ + z` where `λ ∈ Λ` and
//! `z_i = −(I + (μ/Pw) H̃_iᵀH̃_i)⁻¹ (x_i + s_i) + μ H̃_iᵀ(μ H̃_iH̃_iᵀ + Pw I)⁻¹ w_i`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::bounds::{shifted_gram_inverse, PowerConfig};
use crate::error::{Error, Result};
use crate::fading::{real_equivalent, sample_channel, FadingSpec};
use crate::lattice::{Lattice, LatticeKind, NestedLatticeCode};
use crate::linalg::{spd_solve, RMatrix};
use crate::mc::{mc_matrix, McSettings, SeedSpec};

/// How the dirt enters the encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precoder {
    /// `B = I`: dirt and self-interference are aligned; works for any
    /// fading law.
    #[default]
    Identity,
    /// `B = U_iᵀ H̃_i` with the input-only MMSE equaliser (`μ = Px/M`).
    /// Needs the channel at the transmitter, so only deterministic channels
    /// are accepted.
    CostaScaled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpcConfig {
    pub power: PowerConfig,
    pub spec: FadingSpec,
    /// Code for one real half-frame, dimension `n_sym·M`.
    pub code: NestedLatticeCode,
    pub n_sym: usize,
    pub epsilon: f64,
    pub precoder: Precoder,
}

/// Relative tolerance on the coarse second moment versus `Px/(2M)`.
const POWER_TOL: f64 = 0.01;

fn coarse_second_moment(coarse: &Lattice) -> Result<f64> {
    let mc = McSettings::new(0x5EC0_4D, 50_000);
    Ok(coarse.second_moment(Some(&mc))?.mean)
}

/// Rescales `code` so that its coarse cell has second moment `Px/(2M)` per
/// real dimension.
pub fn fit_code_to_power(code: &NestedLatticeCode, power: &PowerConfig) -> Result<NestedLatticeCode> {
    power.validate()?;
    if power.px <= 0.0 {
        return Err(Error::Config("the transceiver needs Px > 0".into()));
    }
    let target = power.px / (2.0 * power.tx as f64);
    let current = coarse_second_moment(&code.coarse)?;
    code.scaled((target / current).sqrt())
}

impl DpcConfig {
    pub fn new(
        power: PowerConfig,
        spec: FadingSpec,
        code: NestedLatticeCode,
        n_sym: usize,
        epsilon: f64,
        precoder: Precoder,
    ) -> Result<Self> {
        power.check_spec(&spec)?;
        if power.px <= 0.0 {
            return Err(Error::Config("the transceiver needs Px > 0".into()));
        }
        if n_sym == 0 {
            return Err(Error::Config("n_sym must be at least 1".into()));
        }
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be finite and >= 0, got {epsilon}")));
        }
        if code.dim() != n_sym * power.tx {
            return Err(Error::Config(format!(
                "code dimension {} does not match n_sym * M = {}",
                code.dim(),
                n_sym * power.tx
            )));
        }
        let target = power.px / (2.0 * power.tx as f64);
        let sm = coarse_second_moment(&code.coarse)?;
        if (sm / target - 1.0).abs() > POWER_TOL {
            return Err(Error::Config(format!(
                "coarse second moment {sm} is not within 1% of Px/(2M) = {target}"
            )));
        }
        if precoder == Precoder::CostaScaled && !spec.is_deterministic() {
            return Err(Error::Config("the Costa precoder needs a deterministic channel".into()));
        }
        Ok(DpcConfig {
            power,
            spec,
            code,
            n_sym,
            epsilon,
            precoder,
        })
    }

    /// Total rate in bits per complex channel use: two real codewords over
    /// `n_sym` uses.
    pub fn rate_bits(&self) -> f64 {
        2.0 * self.code.dim() as f64 * self.code.code_rate() / self.n_sym as f64
    }

    /// `μ = Px/M + Ps`.
    pub fn mu(&self) -> f64 {
        self.power.px / self.power.tx as f64 + self.power.ps
    }

    fn equalizer_weight(&self) -> f64 {
        match self.precoder {
            Precoder::Identity => self.mu(),
            Precoder::CostaScaled => self.power.px / self.power.tx as f64,
        }
    }
}

/// `x = (t − b_s − d) mod Λ`, where `b_s` is the precoded dirt.
pub fn encode(code: &NestedLatticeCode, t: &[f64], b_s: &[f64], d: &[f64]) -> Result<Vec<f64>> {
    let n = code.dim();
    if t.len() != n || b_s.len() != n || d.len() != n {
        return Err(Error::Input(format!("encoder inputs must have length {n}")));
    }
    if !code.is_codeword(t) {
        return Err(Error::Input("message is not a codeword".into()));
    }
    let v: Vec<f64> = (0..n).map(|i| t[i] - b_s[i] - d[i]).collect();
    Ok(code.coarse.mod_lattice(&v))
}

/// `U = μ (μ H Hᵀ + Pw I)⁻¹ H`, applied as `Uᵀ y`.
pub fn equalizer(h: &RMatrix, mu: f64, pw: f64) -> Result<RMatrix> {
    let rows = h.nrows();
    let a = h * h.transpose() * mu + RMatrix::identity(rows, rows) * pw;
    Ok(spd_solve(&a, h)? * mu)
}

/// `y′ = Uᵀ y + d`, one equaliser per channel use.
pub fn equalize_strip(y: &[Vec<f64>], u: &[RMatrix], d: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(d.len());
    for (yi, ui) in y.iter().zip(u) {
        let yv = nalgebra::DVector::from_column_slice(yi);
        out.extend((ui.transpose() * yv).iter().copied());
    }
    out.iter_mut().zip(d).for_each(|(o, di)| *o += di);
    out
}

/// Effective noise of one channel use,
/// `−(I + (μ/Pw) HᵀH)⁻¹ v + μ Hᵀ(μ H Hᵀ + Pw I)⁻¹ w`, where `v = x + s` for
/// the identity precoder and `v = x` for the Costa precoder.
pub fn effective_noise(v: &[f64], w: &[f64], h: &RMatrix, mu: f64, pw: f64) -> Result<Vec<f64>> {
    let (rows, cols) = h.shape();
    let vv = RMatrix::from_column_slice(cols, 1, v);
    let wv = RMatrix::from_column_slice(rows, 1, w);
    let a = RMatrix::identity(cols, cols) + h.transpose() * h * (mu / pw);
    let self_part = spd_solve(&a, &vv)?;
    let b = h * h.transpose() * mu + RMatrix::identity(rows, rows) * pw;
    let noise_part = h.transpose() * spd_solve(&b, &wv)? * mu;
    Ok((noise_part - self_part).iter().copied().collect())
}

/// `(1+ε)·n·tr E[(I/μ + HᴴH/Pw)⁻¹]`, the squared radius of the decision
/// sphere around the transmitted point for a frame of `n` complex uses.
pub fn decision_radius_sq(
    power: &PowerConfig,
    spec: &FadingSpec,
    epsilon: f64,
    n_sym: usize,
    mc: &McSettings,
) -> Result<f64> {
    power.check_spec(spec)?;
    if !(epsilon >= 0.0) {
        return Err(Error::Precondition(format!("epsilon must be >= 0, got {epsilon}")));
    }
    let mu = power.px / power.tx as f64 + power.ps;
    if mu <= 0.0 {
        return Err(Error::Precondition("needs Px/M + Ps > 0".into()));
    }
    let est = mc_matrix(
        |h| shifted_gram_inverse(h, 1.0 / mu, 1.0 / power.pw),
        spec,
        mc.n_samples,
        &mc.seed,
    )?;
    let tr: f64 = (0..est.mean.nrows()).map(|i| est.mean[(i, i)].re).sum();
    Ok((1.0 + epsilon) * n_sym as f64 * tr)
}

/// Everything that happens in one frame. Index 0 of each pair is the
/// real-part codeword, index 1 the imaginary-part codeword.
#[derive(Debug, Clone)]
pub struct Frame {
    pub t: [Vec<f64>; 2],
    pub s: [Vec<f64>; 2],
    pub d: [Vec<f64>; 2],
    pub x: [Vec<f64>; 2],
    /// Coarse point absorbed by the encoder's reduction, `x − (t − B s − d)`.
    pub lambda: [Vec<f64>; 2],
    /// Real-equivalent channel of every use.
    pub channels: Vec<RMatrix>,
    pub w: Vec<Vec<f64>>,
    pub y: Vec<Vec<f64>>,
    pub y_prime: [Vec<f64>; 2],
    /// Effective noise from the closed form.
    pub z: [Vec<f64>; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub decoded: [Vec<f64>; 2],
    pub correct: [bool; 2],
    pub z_norm_sq: f64,
}

impl TrialResult {
    pub fn frame_correct(&self) -> bool {
        self.correct[0] && self.correct[1]
    }
}

/// Interleave the two halves of use `i` into `[re (M); im (M)]`.
fn use_vector(halves: &[Vec<f64>; 2], i: usize, m: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(2 * m);
    v.extend_from_slice(&halves[0][i * m..(i + 1) * m]);
    v.extend_from_slice(&halves[1][i * m..(i + 1) * m]);
    v
}

fn scatter(halves: &mut [Vec<f64>; 2], i: usize, m: usize, v: &[f64]) {
    halves[0][i * m..(i + 1) * m].copy_from_slice(&v[..m]);
    halves[1][i * m..(i + 1) * m].copy_from_slice(&v[m..]);
}

fn gaussian(var: f64) -> Normal<f64> {
    Normal::new(0.0, var.sqrt()).expect("finite non-negative variance")
}

/// Runs one frame end to end.
pub fn simulate_frame(dpc: &DpcConfig, rng: &mut ChaCha8Rng) -> Result<Frame> {
    let m = dpc.power.tx;
    let len = dpc.code.dim();
    let code = &dpc.code;
    let t = [code.random_codeword(rng), code.random_codeword(rng)];
    let d = [code.coarse.sample_dither(rng), code.coarse.sample_dither(rng)];
    let dirt = gaussian(dpc.power.ps / 2.0);
    let s: [Vec<f64>; 2] = [
        (0..len).map(|_| dirt.sample(rng)).collect(),
        (0..len).map(|_| dirt.sample(rng)).collect(),
    ];
    let channels = (0..dpc.n_sym)
        .map(|_| sample_channel(&dpc.spec, rng).map(|h| real_equivalent(&h)))
        .collect::<Result<Vec<_>>>()?;

    let (mu_eq, pw) = (dpc.equalizer_weight(), dpc.power.pw);
    let equalizers = channels
        .iter()
        .map(|h| equalizer(h, mu_eq, pw))
        .collect::<Result<Vec<_>>>()?;

    let b_s: [Vec<f64>; 2] = match dpc.precoder {
        Precoder::Identity => s.clone(),
        Precoder::CostaScaled => {
            let mut out = [vec![0.0; len], vec![0.0; len]];
            for (i, (h, u)) in channels.iter().zip(&equalizers).enumerate() {
                let si = nalgebra::DVector::from_vec(use_vector(&s, i, m));
                let bs = u.transpose() * h * si;
                scatter(&mut out, i, m, bs.as_slice());
            }
            out
        }
    };
    let x = [
        encode(code, &t[0], &b_s[0], &d[0])?,
        encode(code, &t[1], &b_s[1], &d[1])?,
    ];
    let lambda: [Vec<f64>; 2] =
        std::array::from_fn(|k| (0..len).map(|j| x[k][j] - (t[k][j] - b_s[k][j] - d[k][j])).collect());

    let noise = gaussian(pw / 2.0);
    let mut w = Vec::with_capacity(dpc.n_sym);
    let mut y = Vec::with_capacity(dpc.n_sym);
    let mut z = [vec![0.0; len], vec![0.0; len]];
    for (i, h) in channels.iter().enumerate() {
        let wi: Vec<f64> = (0..h.nrows()).map(|_| noise.sample(rng)).collect();
        let xi = use_vector(&x, i, m);
        let si = use_vector(&s, i, m);
        let sum = nalgebra::DVector::from_iterator(2 * m, xi.iter().zip(&si).map(|(a, b)| a + b));
        let yi: Vec<f64> = (h * sum).iter().zip(&wi).map(|(a, b)| a + b).collect();
        let v = match dpc.precoder {
            Precoder::Identity => xi.iter().zip(&si).map(|(a, b)| a + b).collect::<Vec<_>>(),
            Precoder::CostaScaled => xi,
        };
        let zi = effective_noise(&v, &wi, h, mu_eq, pw)?;
        scatter(&mut z, i, m, &zi);
        w.push(wi);
        y.push(yi);
    }

    let stripped_d: Vec<f64> = (0..dpc.n_sym).flat_map(|i| use_vector(&d, i, m)).collect();
    let joint = equalize_strip(&y, &equalizers, &stripped_d);
    let mut y_prime = [vec![0.0; len], vec![0.0; len]];
    for i in 0..dpc.n_sym {
        scatter(&mut y_prime, i, m, &joint[i * 2 * m..(i + 1) * 2 * m]);
    }
    Ok(Frame {
        t,
        s,
        d,
        x,
        lambda,
        channels,
        w,
        y,
        y_prime,
        z,
    })
}

/// Decodes a frame. Uses only `y′` and the code.
pub fn decode_frame(code: &NestedLatticeCode, frame: &Frame) -> TrialResult {
    let decoded = [code.decode(&frame.y_prime[0]), code.decode(&frame.y_prime[1])];
    let correct = [
        code.key(&decoded[0]) == code.key(&frame.t[0]),
        code.key(&decoded[1]) == code.key(&frame.t[1]),
    ];
    let z_norm_sq = frame.z.iter().flatten().map(|v| v * v).sum();
    TrialResult {
        decoded,
        correct,
        z_norm_sq,
    }
}

/// Aggregate over independent frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialStats {
    pub n_trials: usize,
    /// Frames with at least one half decoded wrongly.
    pub frame_errors: usize,
    pub half_errors: [usize; 2],
    /// Frame error rate.
    pub ser: f64,
    pub mean_z_norm: f64,
    /// Fraction of frames with `‖z‖²` above the radius, when one was given.
    pub exceed_prob: Option<f64>,
}

impl TrialStats {
    pub fn half_error_rate(&self, half: usize) -> f64 {
        self.half_errors[half] as f64 / self.n_trials as f64
    }
}

const FRAME_SALT: u64 = 0xF4A3_E000;

/// Frame stream for trial `index` under `seed`.
pub fn frame_rng(seed: &SeedSpec, index: u64) -> ChaCha8Rng {
    seed.derive(FRAME_SALT).stream(index)
}

/// Simulates `n_trials` frames in parallel; frame `k` always uses
/// [`frame_rng`]`(seed, k)`.
pub fn run_trials_with_radius(
    dpc: &DpcConfig,
    n_trials: usize,
    seed: &SeedSpec,
    radius_sq: Option<f64>,
) -> Result<TrialStats> {
    if n_trials == 0 {
        return Err(Error::Precondition("n_trials must be at least 1".into()));
    }
    let results = (0..n_trials as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = frame_rng(seed, k);
            let frame = simulate_frame(dpc, &mut rng)?;
            Ok(decode_frame(&dpc.code, &frame))
        })
        .collect::<Vec<Result<TrialResult>>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let n = n_trials as f64;
    let half_errors = [
        results.iter().filter(|r| !r.correct[0]).count(),
        results.iter().filter(|r| !r.correct[1]).count(),
    ];
    let frame_errors = results.iter().filter(|r| !r.frame_correct()).count();
    let norms: Vec<f64> = results.iter().map(|r| r.z_norm_sq).collect();
    let exceed_prob = radius_sq.map(|r2| norms.iter().filter(|&&v| v > r2).count() as f64 / n);
    Ok(TrialStats {
        n_trials,
        frame_errors,
        half_errors,
        ser: frame_errors as f64 / n,
        mean_z_norm: crate::linalg::pairwise_sum(&norms) / n,
        exceed_prob,
    })
}

pub fn run_trials(dpc: &DpcConfig, n_trials: usize, seed: &SeedSpec) -> Result<TrialStats> {
    run_trials_with_radius(dpc, n_trials, seed, None)
}

/// Fraction of frames whose effective noise leaves the decision sphere.
pub fn noise_concentration(dpc: &DpcConfig, n_trials: usize, seed: &SeedSpec, mc: &McSettings) -> Result<f64> {
    let r2 = decision_radius_sq(&dpc.power, &dpc.spec, dpc.epsilon, dpc.n_sym, mc)?;
    let stats = run_trials_with_radius(dpc, n_trials, seed, Some(r2))?;
    Ok(stats.exceed_prob.expect("radius supplied"))
}

/// Self-similar code `2^b q Zⁿ ⊆ q Zⁿ` fitted to the power of `power`.
pub fn self_similar_code(power: &PowerConfig, n_sym: usize, bits: u32) -> Result<NestedLatticeCode> {
    let base = NestedLatticeCode::self_similar(n_sym * power.tx, 1.0, bits)?;
    fit_code_to_power(&base, power)
}

/// Binary Construction-A fine lattice `(q/2)(C + 2Zⁿ)` over the cubic
/// coarse lattice `q Zⁿ`; rate `k/n` bits per real dimension.
pub fn binary_code<R: Rng + ?Sized>(
    power: &PowerConfig,
    n_sym: usize,
    k: usize,
    search_trials: usize,
    rng: &mut R,
) -> Result<NestedLatticeCode> {
    let n = n_sym * power.tx;
    let fine = Lattice::construction_a_search(n, 2, k, 0.5, search_trials, rng)?;
    let coarse = Lattice::scaled_integer(n, 1.0)?;
    fit_code_to_power(&NestedLatticeCode::new(coarse, fine)?, power)
}

/// Whether the code's coarse lattice is cubic, for which decoding factors
/// per coordinate and any `n_sym` is cheap.
pub fn is_cubic_code(code: &NestedLatticeCode) -> bool {
    matches!(code.coarse.kind(), LatticeKind::ScaledInteger { .. })
        && matches!(code.fine.kind(), LatticeKind::ScaledInteger { .. })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn scalar_cfg(px: f64, ps: f64, pw: f64) -> PowerConfig {
        PowerConfig::new(px, ps, pw, 1, 1).unwrap()
    }

    #[test]
    fn encode_examples() {
        let code = NestedLatticeCode::new(Lattice::scaled_integer(1, 4.0).unwrap(), Lattice::scaled_integer(1, 1.0).unwrap()).unwrap();
        assert_eq!(encode(&code, &[1.0], &[0.0], &[0.0]).unwrap(), vec![1.0]);
        assert_eq!(encode(&code, &[1.0], &[3.0], &[0.0]).unwrap(), vec![-2.0]);
        assert!(matches!(encode(&code, &[0.5], &[0.0], &[0.0]), Err(Error::Input(_))));
        assert!(matches!(encode(&code, &[2.0], &[0.0], &[0.0]), Err(Error::Input(_))));
    }

    #[test]
    fn equalizer_examples() {
        let one = RMatrix::from_element(1, 1, 1.0);
        let u = equalizer(&one, 2.0, 1.0).unwrap();
        assert!((u[(0, 0)] - 2.0 / 3.0).abs() < 1e-15);
        let u = equalizer(&one, 1.0, 1.0).unwrap();
        assert!((u[(0, 0)] - 0.5).abs() < 1e-15);
        let zero = RMatrix::zeros(2, 2);
        assert_eq!(equalizer(&zero, 2.0, 1.0).unwrap(), RMatrix::zeros(2, 2));
    }

    #[test]
    fn effective_noise_examples() {
        let one = RMatrix::from_element(1, 1, 1.0);
        let z = effective_noise(&[3.0], &[1.5], &one, 2.0, 1.0).unwrap();
        assert!((z[0] - (-3.0 / 3.0 + 2.0 * 1.5 / 3.0)).abs() < 1e-15);
        let zero = RMatrix::zeros(1, 1);
        let z = effective_noise(&[3.0], &[1.5], &zero, 2.0, 1.0).unwrap();
        assert_eq!(z, vec![-3.0]);
    }

    #[test]
    fn decision_radius_examples() {
        let one = FadingSpec::deterministic_real(1, 1, &[1.0]).unwrap();
        let mc = McSettings::new(42, 10);
        let r = decision_radius_sq(&scalar_cfg(1.0, 1.0, 1.0), &one, 0.0, 30, &mc).unwrap();
        assert!((r - 20.0).abs() < 1e-12);
        let r = decision_radius_sq(&scalar_cfg(1.0, 0.0, 1.0), &one, 0.0, 30, &mc).unwrap();
        assert!((r - 15.0).abs() < 1e-12);
    }

    #[test]
    fn frame_algebra_holds() {
        let power = PowerConfig::new(4.0, 2.0, 0.5, 2, 3).unwrap();
        let spec = FadingSpec::rayleigh(2, 3).unwrap();
        let code = self_similar_code(&power, 3, 2).unwrap();
        let dpc = DpcConfig::new(power, spec, code, 3, 0.1, Precoder::Identity).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let f = simulate_frame(&dpc, &mut rng).unwrap();
            for k in 0..2 {
                assert!(dpc.code.coarse.contains(&f.lambda[k], 1e-9));
                for j in 0..f.t[k].len() {
                    let residual = f.y_prime[k][j] - f.t[k][j] - f.lambda[k][j];
                    assert!((residual - f.z[k][j]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn noiseless_identity_channel_cancels_dirt() {
        let power = PowerConfig::new(1.0, 50.0, 1e-12, 2, 2).unwrap();
        let spec = FadingSpec::deterministic(crate::linalg::CMatrix::identity(2, 2)).unwrap();
        let code = self_similar_code(&power, 4, 3).unwrap();
        let dpc = DpcConfig::new(power, spec, code, 4, 0.1, Precoder::Identity).unwrap();
        let stats = run_trials(&dpc, 200, &SeedSpec::new(7)).unwrap();
        assert_eq!(stats.frame_errors, 0);
    }

    #[test]
    fn costa_precoder_rejects_fading() {
        let power = scalar_cfg(1.0, 1.0, 1.0);
        let code = self_similar_code(&power, 2, 1).unwrap();
        let spec = FadingSpec::rayleigh(1, 1).unwrap();
        assert!(DpcConfig::new(power, spec, code, 2, 0.1, Precoder::CostaScaled).is_err());
    }

    #[test]
    fn costa_precoder_removes_dirt_on_fixed_channel() {
        // the effective noise of the Costa encoder does not depend on Ps
        let spec = FadingSpec::deterministic_real(1, 1, &[0.8]).unwrap();
        let mut norms = Vec::new();
        for ps in [0.0, 1e4] {
            let power = scalar_cfg(10.0, ps, 1.0);
            let code = self_similar_code(&power, 16, 1).unwrap();
            let dpc = DpcConfig::new(power, spec.clone(), code, 16, 0.1, Precoder::CostaScaled).unwrap();
            norms.push(run_trials(&dpc, 400, &SeedSpec::new(3)).unwrap().mean_z_norm);
        }
        assert!((norms[0] / norms[1] - 1.0).abs() < 0.1, "{norms:?}");
    }

    #[test]
    fn rate_bits_counts_both_halves() {
        let power = scalar_cfg(1.0, 0.0, 1.0);
        let code = self_similar_code(&power, 5, 2).unwrap();
        let dpc = DpcConfig::new(power, FadingSpec::rayleigh(1, 1).unwrap(), code, 5, 0.1, Precoder::Identity).unwrap();
        assert!((dpc.rate_bits() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn power_mismatch_rejected() {
        let power = scalar_cfg(1.0, 0.0, 1.0);
        let code = NestedLatticeCode::self_similar(4, 1.0, 1).unwrap();
        assert!(DpcConfig::new(power, FadingSpec::rayleigh(1, 1).unwrap(), code, 4, 0.1, Precoder::Identity).is_err());
    }
}

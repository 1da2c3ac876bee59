//! Seeded, block-parallel Monte Carlo expectations over a [`FadingSpec`].
//!
//! The sample schedule `0..n` is cut into blocks of `block_size` draws (the
//! last block takes the remainder). Block `b` draws from its own ChaCha8
//! stream, keyed by `(master_seed, b)`, so the samples a block sees do not
//! depend on which thread runs it. Per-block results are reduced in block
//! order with a fixed pairwise tree, which makes every estimate
//! bit-reproducible whether the blocks run serially or on the rayon pool.
//!
//! Two calls with the same [`SeedSpec`], spec and `n` see exactly the same
//! channel draws; the bound evaluators rely on this to compare different
//! functionals on shared samples.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fading::{sample_channel, ChannelMatrix, FadingKind, FadingSpec};
use crate::linalg::{pairwise_reduce, pairwise_sum, CMatrix, RMatrix};

/// Master seed and block size of the sample schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub block_size: usize,
}

impl Default for SeedSpec {
    fn default() -> Self {
        SeedSpec {
            master_seed: 42,
            block_size: 4096,
        }
    }
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        SeedSpec {
            master_seed,
            ..SeedSpec::default()
        }
    }

    /// Independent random stream for block (or frame) `index`.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(index);
        rng
    }

    /// A sibling seed for an unrelated purpose (e.g. dither versus channel
    /// draws) so that the two never share a stream.
    pub fn derive(&self, salt: u64) -> SeedSpec {
        let mixed = self
            .master_seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .rotate_left(17)
            ^ salt.wrapping_mul(0xD1B5_4A32_D192_ED03);
        SeedSpec {
            master_seed: mixed,
            block_size: self.block_size,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.block_size == 0 {
            return Err(Error::Config("block size must be positive".into()));
        }
        Ok(())
    }
}

/// Seed plus sample count: everything an expectation needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSettings {
    pub seed: SeedSpec,
    pub n_samples: usize,
}

impl Default for McSettings {
    fn default() -> Self {
        McSettings {
            seed: SeedSpec::default(),
            n_samples: 100_000,
        }
    }
}

impl McSettings {
    pub fn new(master_seed: u64, n_samples: usize) -> Self {
        McSettings {
            seed: SeedSpec::new(master_seed),
            n_samples,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Serial,
}

/// Scalar Monte Carlo result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

impl Estimate {
    pub fn exact(value: f64, n_samples: usize) -> Self {
        Estimate {
            mean: value,
            std_error: 0.0,
            n_samples,
        }
    }
}

/// Matrix-valued Monte Carlo result; `std_error[(i, j)]` is the standard
/// error of the complex entry `mean[(i, j)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixEstimate {
    pub mean: CMatrix,
    pub std_error: RMatrix,
    pub n_samples: usize,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Precondition("sample count must be at least 1".into()));
    }
    Ok(())
}

/// Runs `block_fn(block_index, first_sample_index, count, rng)` for every
/// block and returns the results in block order. The first failing block
/// (in schedule order) determines the error.
fn run_blocks<A, G>(n: usize, seed: &SeedSpec, exec: Execution, block_fn: G) -> Result<Vec<A>>
where
    A: Send,
    G: Fn(u64, u64, usize, &mut ChaCha8Rng) -> Result<A> + Sync,
{
    seed.validate()?;
    let bs = seed.block_size;
    let n_blocks = n.div_ceil(bs);
    let job = |b: usize| {
        let start = b * bs;
        let count = bs.min(n - start);
        let mut rng = seed.stream(b as u64);
        block_fn(b as u64, start as u64, count, &mut rng)
    };
    let results: Vec<Result<A>> = match exec {
        Execution::Serial => (0..n_blocks).map(job).collect(),
        Execution::Parallel => (0..n_blocks).into_par_iter().map(job).collect(),
    };
    results.into_iter().collect()
}

fn fixed_channel(spec: &FadingSpec) -> Option<ChannelMatrix> {
    match &spec.kind {
        FadingKind::Deterministic { fixed } => Some(ChannelMatrix(fixed.clone())),
        _ => None,
    }
}

/// Evaluate `f` on every draw and return the values in schedule order.
pub fn mc_collect<T, F>(f: F, spec: &FadingSpec, n: usize, seed: &SeedSpec) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&ChannelMatrix) -> Result<T> + Sync,
{
    check_n(n)?;
    spec.validate()?;
    let blocks = run_blocks(n, seed, Execution::Parallel, |_, _, count, rng| {
        (0..count)
            .map(|_| {
                let h = sample_channel(spec, rng)?;
                f(&h)
            })
            .collect::<Result<Vec<T>>>()
    })?;
    Ok(blocks.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy)]
struct ScalarBlock {
    count: f64,
    sum: f64,
    m2: f64,
}

/// `E[f(H)]` with its standard error.
pub fn mc_scalar<F>(f: F, spec: &FadingSpec, n: usize, seed: &SeedSpec) -> Result<Estimate>
where
    F: Fn(&ChannelMatrix) -> Result<f64> + Sync,
{
    mc_scalar_with(Execution::Parallel, f, spec, n, seed)
}

pub fn mc_scalar_with<F>(
    exec: Execution,
    f: F,
    spec: &FadingSpec,
    n: usize,
    seed: &SeedSpec,
) -> Result<Estimate>
where
    F: Fn(&ChannelMatrix) -> Result<f64> + Sync,
{
    check_n(n)?;
    spec.validate()?;
    if let Some(h) = fixed_channel(spec) {
        let v = f(&h)?;
        if !v.is_finite() {
            return Err(Error::NonFinite { index: 0 });
        }
        return Ok(Estimate::exact(v, n));
    }
    let blocks = run_blocks(n, seed, exec, |_, start, count, rng| {
        let mut values = Vec::with_capacity(count);
        for j in 0..count {
            let h = sample_channel(spec, rng)?;
            let v = f(&h)?;
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    index: start + j as u64,
                });
            }
            values.push(v);
        }
        let sum = pairwise_sum(&values);
        let mean = sum / count as f64;
        let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        Ok(ScalarBlock {
            count: count as f64,
            sum,
            m2: pairwise_sum(&dev),
        })
    })?;

    let sums: Vec<f64> = blocks.iter().map(|b| b.sum).collect();
    let mean = pairwise_sum(&sums) / n as f64;

    // Chan et al. merge of per-block second moments, in block order.
    let mut acc = blocks[0];
    for b in &blocks[1..] {
        let (na, nb) = (acc.count, b.count);
        let delta = b.sum / nb - acc.sum / na;
        acc = ScalarBlock {
            count: na + nb,
            sum: acc.sum + b.sum,
            m2: acc.m2 + b.m2 + delta * delta * na * nb / (na + nb),
        };
    }
    let std_error = if n > 1 {
        (acc.m2 / (n as f64 - 1.0) / n as f64).sqrt()
    } else {
        0.0
    };
    Ok(Estimate {
        mean,
        std_error,
        n_samples: n,
    })
}

#[derive(Debug, Clone)]
struct MatrixBlock {
    count: f64,
    sum: CMatrix,
    m2: RMatrix,
}

/// Elementwise `E[F(H)]` for a matrix-valued functional.
pub fn mc_matrix<F>(f: F, spec: &FadingSpec, n: usize, seed: &SeedSpec) -> Result<MatrixEstimate>
where
    F: Fn(&ChannelMatrix) -> Result<CMatrix> + Sync,
{
    mc_matrix_with(Execution::Parallel, f, spec, n, seed)
}

pub fn mc_matrix_with<F>(
    exec: Execution,
    f: F,
    spec: &FadingSpec,
    n: usize,
    seed: &SeedSpec,
) -> Result<MatrixEstimate>
where
    F: Fn(&ChannelMatrix) -> Result<CMatrix> + Sync,
{
    check_n(n)?;
    spec.validate()?;
    let finite = |m: &CMatrix| m.iter().all(|z| z.re.is_finite() && z.im.is_finite());
    if let Some(h) = fixed_channel(spec) {
        let v = f(&h)?;
        if !finite(&v) {
            return Err(Error::NonFinite { index: 0 });
        }
        let (r, c) = v.shape();
        return Ok(MatrixEstimate {
            mean: v,
            std_error: RMatrix::zeros(r, c),
            n_samples: n,
        });
    }
    let blocks = run_blocks(n, seed, exec, |_, start, count, rng| {
        let mut values = Vec::with_capacity(count);
        for j in 0..count {
            let h = sample_channel(spec, rng)?;
            let v = f(&h)?;
            if !finite(&v) {
                return Err(Error::NonFinite {
                    index: start + j as u64,
                });
            }
            if let Some(first) = values.first() {
                let first: &CMatrix = first;
                if first.shape() != v.shape() {
                    return Err(Error::Input("functional changed its output shape".into()));
                }
            }
            values.push(v);
        }
        let sum = pairwise_reduce(&values, &|a: &CMatrix, b: &CMatrix| a + b).expect("non-empty block");
        let mean = &sum / num_complex::Complex64::new(count as f64, 0.0);
        let (r, c) = mean.shape();
        let m2 = RMatrix::from_fn(r, c, |i, k| {
            let dev: Vec<f64> = values.iter().map(|v| (v[(i, k)] - mean[(i, k)]).norm_sqr()).collect();
            pairwise_sum(&dev)
        });
        Ok(MatrixBlock {
            count: count as f64,
            sum,
            m2,
        })
    })?;

    let sums: Vec<CMatrix> = blocks.iter().map(|b| b.sum.clone()).collect();
    let total = pairwise_reduce(&sums, &|a: &CMatrix, b: &CMatrix| a + b).expect("at least one block");
    let mean = total / num_complex::Complex64::new(n as f64, 0.0);

    let mut acc = blocks[0].clone();
    for b in &blocks[1..] {
        let (na, nb) = (acc.count, b.count);
        let delta = &b.sum / num_complex::Complex64::new(nb, 0.0) - &acc.sum / num_complex::Complex64::new(na, 0.0);
        let weight = na * nb / (na + nb);
        let m2 = &acc.m2 + &b.m2 + delta.map(|z| z.norm_sqr() * weight);
        acc = MatrixBlock {
            count: na + nb,
            sum: &acc.sum + &b.sum,
            m2,
        };
    }
    let std_error = if n > 1 {
        acc.m2.map(|m| (m / (n as f64 - 1.0) / n as f64).sqrt())
    } else {
        RMatrix::zeros(mean.nrows(), mean.ncols())
    };
    Ok(MatrixEstimate {
        mean,
        std_error,
        n_samples: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_inverse;
    use num_complex::Complex64;

    fn seed(s: u64) -> SeedSpec {
        SeedSpec {
            master_seed: s,
            block_size: 1000,
        }
    }

    #[test]
    fn constant_functional_is_exact() {
        let spec = FadingSpec::rayleigh(2, 2).unwrap();
        let est = mc_scalar(|_| Ok(7.0), &spec, 100, &seed(1)).unwrap();
        assert_eq!(est.mean, 7.0);
        assert_eq!(est.std_error, 0.0);
        assert_eq!(est.n_samples, 100);
    }

    #[test]
    fn rayleigh_power_within_three_se() {
        let spec = FadingSpec::rayleigh(1, 1).unwrap();
        let est = mc_scalar(|h| Ok(h.0[(0, 0)].norm_sqr()), &spec, 100_000, &seed(3)).unwrap();
        assert!((est.mean - 1.0).abs() < 3.0 * est.std_error, "{est:?}");
    }

    #[test]
    fn std_error_scales_as_inverse_sqrt_n() {
        let spec = FadingSpec::rayleigh(1, 1).unwrap();
        let f = |h: &ChannelMatrix| Ok(h.0[(0, 0)].norm_sqr());
        let small = mc_scalar(f, &spec, 10_000, &seed(4)).unwrap();
        let large = mc_scalar(f, &spec, 40_000, &seed(4)).unwrap();
        let ratio = large.std_error / small.std_error;
        assert!((ratio - 0.5).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn parallel_equals_serial() {
        let spec = FadingSpec::rayleigh(2, 3).unwrap();
        let f = |h: &ChannelMatrix| Ok((1.0 + h.gram()[(0, 0)].re).log2());
        let s = seed(8);
        let par = mc_scalar_with(Execution::Parallel, f, &spec, 12_345, &s).unwrap();
        let ser = mc_scalar_with(Execution::Serial, f, &spec, 12_345, &s).unwrap();
        assert_eq!(par, ser);
        let g = |h: &ChannelMatrix| Ok(h.gram());
        let mp = mc_matrix_with(Execution::Parallel, g, &spec, 5_001, &s).unwrap();
        let ms = mc_matrix_with(Execution::Serial, g, &spec, 5_001, &s).unwrap();
        assert_eq!(mp, ms);
    }

    #[test]
    fn affine_functional_estimates_are_affine() {
        let spec = FadingSpec::nakagami(2.0, 1, 1).unwrap();
        let s = seed(10);
        let base = mc_scalar(|h| Ok(h.0[(0, 0)].norm()), &spec, 20_000, &s).unwrap();
        let (a, b) = (3.5, -1.25);
        let shifted = mc_scalar(|h| Ok(a * h.0[(0, 0)].norm() + b), &spec, 20_000, &s).unwrap();
        assert!((shifted.mean - (a * base.mean + b)).abs() < 1e-12 * shifted.mean.abs().max(1.0));
        assert!((shifted.std_error - a * base.std_error).abs() < 1e-10 * shifted.std_error);
    }

    #[test]
    fn non_finite_reports_first_index() {
        let spec = FadingSpec::rayleigh(1, 1).unwrap();
        let s = seed(12);
        let values = mc_collect(|h| Ok(h.0[(0, 0)].norm_sqr()), &spec, 5000, &s).unwrap();
        // poison every sample above the 90% quantile; the earliest one must be reported
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        let cut = sorted[4500];
        let first = values.iter().position(|&v| v >= cut).unwrap() as u64;
        let err = mc_scalar(
            |h| {
                let v = h.0[(0, 0)].norm_sqr();
                Ok(if v >= cut { f64::NAN } else { v })
            },
            &spec,
            5000,
            &s,
        )
        .unwrap_err();
        assert_eq!(err, Error::NonFinite { index: first });
    }

    #[test]
    fn zero_samples_rejected() {
        let spec = FadingSpec::rayleigh(1, 1).unwrap();
        assert!(mc_scalar(|_| Ok(1.0), &spec, 0, &seed(1)).is_err());
    }

    #[test]
    fn deterministic_gram_is_exact() {
        let spec = FadingSpec::deterministic(CMatrix::identity(2, 2)).unwrap();
        let est = mc_matrix(|h| Ok(h.gram()), &spec, 1000, &seed(1)).unwrap();
        assert_eq!(est.mean, CMatrix::identity(2, 2));
        assert_eq!(est.std_error, RMatrix::zeros(2, 2));
    }

    #[test]
    fn inverse_wishart_mean_m2_n4() {
        let spec = FadingSpec::rayleigh(2, 4).unwrap();
        let est = mc_matrix(|h| hermitian_inverse(&h.gram()), &spec, 100_000, &SeedSpec::default()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let target = if i == j { 0.5 } else { 0.0 };
                assert!((est.mean[(i, j)] - Complex64::new(target, 0.0)).norm() < 0.005, "{:?}", est.mean);
            }
        }
    }

    #[test]
    fn mmse_inverse_moment_rayleigh_scalar() {
        // E[1/(1 + 10 x)], x ~ Exp(1) = 0.1 e^{0.1} E1(0.1), evaluated with mpmath
        let oracle = 0.201_464_254_470_845_17;
        let spec = FadingSpec::rayleigh(1, 1).unwrap();
        let est = mc_matrix(
            |h| hermitian_inverse(&(CMatrix::identity(1, 1) + h.gram() * Complex64::new(10.0, 0.0))),
            &spec,
            100_000,
            &SeedSpec::default(),
        )
        .unwrap();
        let err = (est.mean[(0, 0)].re - oracle).abs();
        assert!(err < 3.0 * est.std_error[(0, 0)], "err {err} se {}", est.std_error[(0, 0)]);
    }

    #[test]
    fn identical_seed_identical_estimates() {
        let spec = FadingSpec::rayleigh(2, 2).unwrap();
        let f = |h: &ChannelMatrix| Ok(h.gram()[(0, 1)].norm());
        let a = mc_scalar(f, &spec, 30_000, &SeedSpec::default()).unwrap();
        let b = mc_scalar(f, &spec, 30_000, &SeedSpec::default()).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }
}

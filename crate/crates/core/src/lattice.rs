//! Lattices, modulo-lattice arithmetic and nested lattice codes.
//!
//! Two families are supported:
//!
//! * `q·Zⁿ`, quantised by per-coordinate rounding;
//! * Construction A, `scale·(C + p·Zⁿ)` with `C` the row span of a `k x n`
//!   generator over `Z_p`. The nearest point is found exactly by rounding
//!   within each of the `p^k` cosets `c + p·Zⁿ` and keeping the closest.
//!
//! Quantisation breaks ties towards the candidate with the lexicographically
//! smallest residual `s − λ`. For `q·Zⁿ` this is the half-open cell
//! `[−q/2, q/2)ⁿ`; for Construction A it is the same rule applied across
//! cosets, so the Voronoi cell is a half-open, translation-consistent
//! fundamental region.

use std::cmp::Ordering;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::pairwise_sum;
use crate::mc::{Estimate, McSettings};

/// Largest number of cosets `p^k` a Construction-A lattice may have.
pub const MAX_COSETS: usize = 1 << 16;
/// Default cap on the number of points visited when enumerating a codebook.
pub const DEFAULT_CODEBOOK_CAP: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub enum LatticeKind {
    /// `q·Zⁿ`.
    ScaledInteger { q: f64 },
    /// `scale·(C + p·Zⁿ)`, `C` spanned by the rows of `generator` mod `p`.
    ConstructionA {
        p: u32,
        generator: Vec<Vec<u32>>,
        scale: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    n: usize,
    kind: LatticeKind,
    /// All codewords of `C` (Construction A only), each with entries in `0..p`.
    codewords: Vec<Vec<i64>>,
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Rank of a matrix over `Z_p` by Gaussian elimination.
fn rank_mod_p(rows: &[Vec<u32>], p: u32) -> usize {
    let p = p as u64;
    let mut a: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| x as u64 % p).collect()).collect();
    let ncols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..a.len()).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, pivot);
        let inv = pow_mod(a[rank][col], p - 2, p);
        for x in a[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..a.len() {
            if r != rank && a[r][col] != 0 {
                let f = a[r][col];
                for c in 0..ncols {
                    a[r][c] = (a[r][c] + p - f * a[rank][c] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn span_mod_p(generator: &[Vec<u32>], p: u32, n: usize) -> Vec<Vec<i64>> {
    let k = generator.len();
    let count = (p as usize).pow(k as u32);
    let mut out = Vec::with_capacity(count);
    let mut msg = vec![0u32; k];
    for _ in 0..count {
        let word: Vec<i64> = (0..n)
            .map(|j| {
                let s: u64 = (0..k).map(|i| msg[i] as u64 * generator[i][j] as u64).sum();
                (s % p as u64) as i64
            })
            .collect();
        out.push(word);
        for digit in msg.iter_mut() {
            *digit += 1;
            if *digit < p {
                break;
            }
            *digit = 0;
        }
    }
    out.sort();
    out
}

fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}

fn cmp_candidates(d_a: f64, r_a: &[f64], d_b: f64, r_b: &[f64]) -> Ordering {
    d_a.total_cmp(&d_b).then_with(|| {
        r_a.iter()
            .zip(r_b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

impl Lattice {
    pub fn scaled_integer(n: usize, q: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("lattice dimension must be positive".into()));
        }
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::Config(format!("lattice scale must be finite and > 0, got {q}")));
        }
        Ok(Lattice {
            n,
            kind: LatticeKind::ScaledInteger { q },
            codewords: Vec::new(),
        })
    }

    /// `scale·(C + p·Zⁿ)` with `C` the row span of `generator` (`k` rows of
    /// length `n`) over `Z_p`.
    pub fn construction_a(n: usize, p: u32, generator: Vec<Vec<u32>>, scale: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("lattice dimension must be positive".into()));
        }
        if !is_prime(p) {
            return Err(Error::Config(format!("Construction A needs a prime modulus, got {p}")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Config(format!("lattice scale must be finite and > 0, got {scale}")));
        }
        let k = generator.len();
        if k == 0 || k > n {
            return Err(Error::Config(format!("generator needs 1..={n} rows, got {k}")));
        }
        if generator.iter().any(|row| row.len() != n) {
            return Err(Error::Config(format!("generator rows must have length {n}")));
        }
        if generator.iter().flatten().any(|&x| x >= p) {
            return Err(Error::Config(format!("generator entries must lie in 0..{p}")));
        }
        let cosets = (p as f64).powi(k as i32);
        if cosets > MAX_COSETS as f64 {
            return Err(Error::Resource(format!(
                "Construction A with p^k = {cosets} cosets exceeds the cap of {MAX_COSETS}"
            )));
        }
        if rank_mod_p(&generator, p) != k {
            return Err(Error::Config(format!("generator is not full rank mod {p}")));
        }
        let codewords = span_mod_p(&generator, p, n);
        Ok(Lattice {
            n,
            kind: LatticeKind::ConstructionA { p, generator, scale },
            codewords,
        })
    }

    /// Best of `trials` random full-rank generators, ranked by the smallest
    /// squared norm of a nonzero coset leader, `min_c Σ_j min(c_j, p − c_j)²`.
    pub fn construction_a_search<R: Rng + ?Sized>(
        n: usize,
        p: u32,
        k: usize,
        scale: f64,
        trials: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if trials == 0 {
            return Err(Error::Config("generator search needs at least one trial".into()));
        }
        let mut best: Option<(i64, Lattice)> = None;
        let mut attempts = 0;
        let mut accepted = 0;
        while accepted < trials {
            attempts += 1;
            if attempts > 100 * trials + 100 {
                break;
            }
            let generator: Vec<Vec<u32>> =
                (0..k).map(|_| (0..n).map(|_| rng.random_range(0..p)).collect()).collect();
            let lat = match Lattice::construction_a(n, p, generator, scale) {
                Ok(l) => l,
                Err(Error::Config(_)) => continue,
                Err(e) => return Err(e),
            };
            accepted += 1;
            let score = lat.min_coset_norm();
            if best.as_ref().is_none_or(|(s, _)| score > *s) {
                best = Some((score, lat));
            }
        }
        best.map(|(_, l)| l)
            .ok_or_else(|| Error::Config(format!("no full-rank {k}x{n} generator found mod {p}")))
    }

    /// Smallest `Σ_j min(c_j, p − c_j)²` over nonzero codewords (integer
    /// units); for `q·Zⁿ` this is 1.
    pub fn min_coset_norm(&self) -> i64 {
        match &self.kind {
            LatticeKind::ScaledInteger { .. } => 1,
            LatticeKind::ConstructionA { p, .. } => {
                let p = *p as i64;
                self.codewords
                    .iter()
                    .filter(|c| c.iter().any(|&x| x != 0))
                    .map(|c| c.iter().map(|&x| x.min(p - x).pow(2)).sum::<i64>())
                    .min()
                    .unwrap_or(p * p)
                    .min(p * p)
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &LatticeKind {
        &self.kind
    }

    /// Length of the integer grid the lattice lives on (`q` or `scale`).
    pub fn unit(&self) -> f64 {
        match &self.kind {
            LatticeKind::ScaledInteger { q } => *q,
            LatticeKind::ConstructionA { scale, .. } => *scale,
        }
    }

    /// Spacing `L` of the cubic sublattice `L·Zⁿ` contained in the lattice.
    pub fn cubic_period(&self) -> f64 {
        match &self.kind {
            LatticeKind::ScaledInteger { q } => *q,
            LatticeKind::ConstructionA { p, scale, .. } => *scale * *p as f64,
        }
    }

    /// Number of cosets of `C` (1 for `q·Zⁿ`).
    pub fn coset_count(&self) -> usize {
        self.codewords.len().max(1)
    }

    pub fn log2_volume(&self) -> f64 {
        let n = self.n as f64;
        match &self.kind {
            LatticeKind::ScaledInteger { q } => n * q.log2(),
            LatticeKind::ConstructionA { p, scale, generator } => {
                n * scale.log2() + (self.n - generator.len()) as f64 * (*p as f64).log2()
            }
        }
    }

    /// Volume of a fundamental cell.
    pub fn volume(&self) -> f64 {
        self.log2_volume().exp2()
    }

    /// Same lattice with every point multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::Config(format!("scale factor must be finite and > 0, got {factor}")));
        }
        let mut out = self.clone();
        match &mut out.kind {
            LatticeKind::ScaledInteger { q } => *q *= factor,
            LatticeKind::ConstructionA { scale, .. } => *scale *= factor,
        }
        Ok(out)
    }

    /// A generating set: `q·e_i`, or the scaled generator rows and `scale·p·e_i`.
    pub fn generators(&self) -> Vec<Vec<f64>> {
        let unit = |i: usize, len: f64| {
            let mut v = vec![0.0; self.n];
            v[i] = len;
            v
        };
        match &self.kind {
            LatticeKind::ScaledInteger { q } => (0..self.n).map(|i| unit(i, *q)).collect(),
            LatticeKind::ConstructionA { p, generator, scale } => generator
                .iter()
                .map(|row| row.iter().map(|&x| x as f64 * scale).collect())
                .chain((0..self.n).map(|i| unit(i, scale * *p as f64)))
                .collect(),
        }
    }

    fn check_dim(&self, s: &[f64]) {
        assert_eq!(s.len(), self.n, "vector of length {} for a lattice of dimension {}", s.len(), self.n);
    }

    /// Integer coordinates (in multiples of [`Lattice::unit`]) of the nearest
    /// lattice point to `s`.
    pub fn quantize_coords(&self, s: &[f64]) -> Vec<i64> {
        self.check_dim(s);
        match &self.kind {
            LatticeKind::ScaledInteger { q } => s.iter().map(|&x| round_half_up(x / q) as i64).collect(),
            LatticeKind::ConstructionA { p, scale, .. } => {
                let pf = *p as f64;
                let u: Vec<f64> = s.iter().map(|&x| x / scale).collect();
                let mut best_point = vec![0i64; self.n];
                let mut best_res = vec![f64::INFINITY; self.n];
                let mut best_dist = f64::INFINITY;
                let mut point = vec![0i64; self.n];
                let mut res = vec![0.0; self.n];
                for c in &self.codewords {
                    let mut dist = 0.0;
                    for j in 0..self.n {
                        let cj = c[j] as f64;
                        let z = round_half_up((u[j] - cj) / pf);
                        let lp = cj + pf * z;
                        point[j] = lp as i64;
                        res[j] = u[j] - lp;
                        dist += res[j] * res[j];
                    }
                    if dist <= best_dist && cmp_candidates(dist, &res, best_dist, &best_res) == Ordering::Less {
                        best_dist = dist;
                        best_point.copy_from_slice(&point);
                        best_res.copy_from_slice(&res);
                    }
                }
                best_point
            }
        }
    }

    /// Exact nearest point to the integer point `z·u`, where the lattice
    /// unit is `ratio·u`. Returns the lattice point in multiples of `u`,
    /// with the same tie rule as [`Lattice::quantize_coords`].
    pub fn quantize_int(&self, z: &[i64], ratio: i64) -> Vec<i64> {
        assert_eq!(z.len(), self.n);
        // floor((2v + period) / (2 period)) is round-half-up of v / period
        let nearest = |v: i64, period: i64| (2 * v + period).div_euclid(2 * period) * period;
        match &self.kind {
            LatticeKind::ScaledInteger { .. } => z.iter().map(|&v| nearest(v, ratio)).collect(),
            LatticeKind::ConstructionA { p, .. } => {
                let period = ratio * *p as i64;
                let mut best: Option<(i128, Vec<i64>, Vec<i64>)> = None;
                for c in &self.codewords {
                    let point: Vec<i64> = z
                        .iter()
                        .zip(c)
                        .map(|(&v, &cj)| ratio * cj + nearest(v - ratio * cj, period))
                        .collect();
                    let res: Vec<i64> = z.iter().zip(&point).map(|(a, b)| a - b).collect();
                    let dist: i128 = res.iter().map(|&r| (r as i128) * (r as i128)).sum();
                    let better = match &best {
                        None => true,
                        Some((d, _, r)) => (dist, &res) < (*d, r),
                    };
                    if better {
                        best = Some((dist, res, point));
                    }
                }
                best.expect("at least one coset").2
            }
        }
    }

    /// Nearest lattice point `Q_Λ(s)`.
    pub fn quantize(&self, s: &[f64]) -> Vec<f64> {
        let unit = self.unit();
        self.quantize_coords(s).into_iter().map(|z| z as f64 * unit).collect()
    }

    /// `s mod Λ = s − Q_Λ(s)`.
    pub fn mod_lattice(&self, s: &[f64]) -> Vec<f64> {
        let unit = self.unit();
        let z = self.quantize_coords(s);
        s.iter().zip(z).map(|(&x, zi)| x - zi as f64 * unit).collect()
    }

    /// Whether `s` is a lattice point up to `tol` per coordinate.
    pub fn contains(&self, s: &[f64], tol: f64) -> bool {
        self.mod_lattice(s).iter().all(|r| r.abs() <= tol)
    }

    /// A dither uniform over the fundamental cell.
    pub fn sample_dither<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match &self.kind {
            LatticeKind::ScaledInteger { q } => {
                (0..self.n).map(|_| q * (rng.random::<f64>() - 0.5)).collect()
            }
            LatticeKind::ConstructionA { .. } => {
                let period = self.cubic_period();
                let u: Vec<f64> = (0..self.n).map(|_| period * rng.random::<f64>()).collect();
                self.mod_lattice(&u)
            }
        }
    }

    /// Second moment per dimension of the fundamental cell, `q²/12` for
    /// `q·Zⁿ` and a Monte Carlo estimate for Construction A.
    pub fn second_moment(&self, mc: Option<&McSettings>) -> Result<Estimate> {
        match &self.kind {
            LatticeKind::ScaledInteger { q } => Ok(Estimate::exact(q * q / 12.0, 1)),
            LatticeKind::ConstructionA { .. } => {
                let mc = mc.ok_or_else(|| {
                    Error::Config("Construction A second moment needs Monte Carlo settings".into())
                })?;
                if mc.n_samples == 0 {
                    return Err(Error::Precondition("sample count must be at least 1".into()));
                }
                let bs = mc.seed.block_size.max(1);
                let mut values = Vec::with_capacity(mc.n_samples);
                for (b, start) in (0..mc.n_samples).step_by(bs).enumerate() {
                    let mut rng = mc.seed.stream(b as u64);
                    for _ in start..(start + bs).min(mc.n_samples) {
                        let d = self.sample_dither(&mut rng);
                        values.push(d.iter().map(|x| x * x).sum::<f64>() / self.n as f64);
                    }
                }
                let n = values.len() as f64;
                let mean = pairwise_sum(&values) / n;
                let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
                let std_error = if values.len() > 1 {
                    (pairwise_sum(&dev) / (n - 1.0) / n).sqrt()
                } else {
                    0.0
                };
                Ok(Estimate {
                    mean,
                    std_error,
                    n_samples: values.len(),
                })
            }
        }
    }

    /// `G(Λ) = σ²/Vol^{2/n}`; exactly 1/12 for `q·Zⁿ`.
    pub fn normalized_second_moment(&self, mc: Option<&McSettings>) -> Result<Estimate> {
        let sm = self.second_moment(mc)?;
        if let LatticeKind::ScaledInteger { .. } = self.kind {
            return Ok(Estimate::exact(1.0 / 12.0, sm.n_samples));
        }
        let norm = (2.0 * self.log2_volume() / self.n as f64).exp2();
        Ok(Estimate {
            mean: sm.mean / norm,
            std_error: sm.std_error / norm,
            n_samples: sm.n_samples,
        })
    }
}

/// Coarse lattice `Λ` nested in a fine lattice `Λ₁`. The codebook is
/// `Λ₁ ∩ V(Λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedLatticeCode {
    pub coarse: Lattice,
    pub fine: Lattice,
    /// `coarse.unit() / fine.unit()`, an integer for supported pairs.
    unit_ratio: i64,
}

const NESTING_TOL: f64 = 1e-9;

impl NestedLatticeCode {
    /// Pairs `coarse ⊆ fine`, checking that every coarse generator is a fine
    /// lattice point.
    pub fn new(coarse: Lattice, fine: Lattice) -> Result<Self> {
        if coarse.dim() != fine.dim() {
            return Err(Error::Config(format!(
                "coarse dimension {} differs from fine dimension {}",
                coarse.dim(),
                fine.dim()
            )));
        }
        let tol = NESTING_TOL * fine.unit();
        for g in coarse.generators() {
            if !fine.contains(&g, tol) {
                return Err(Error::Config(format!(
                    "lattices are not nested: coarse generator {g:?} is not a fine lattice point"
                )));
            }
        }
        let unit_ratio = coarse.unit() / fine.unit();
        if (unit_ratio - unit_ratio.round()).abs() > NESTING_TOL * unit_ratio.max(1.0) || unit_ratio.round() < 1.0 {
            return Err(Error::Config(format!(
                "coarse grid unit is not a multiple of the fine one (ratio {unit_ratio})"
            )));
        }
        let unit_ratio = unit_ratio.round() as i64;
        // Each box period must be a whole number of fine periods for the
        // codebook enumeration to tile exactly.
        let ratio = coarse.cubic_period() / fine.cubic_period();
        if (ratio - ratio.round()).abs() > NESTING_TOL * ratio.max(1.0) || ratio.round() < 1.0 {
            return Err(Error::Config(format!(
                "coarse cubic period is not a multiple of the fine one (ratio {ratio})"
            )));
        }
        Ok(NestedLatticeCode {
            coarse,
            fine,
            unit_ratio,
        })
    }

    /// Self-similar pair `2^b·q·Zⁿ ⊆ q·Zⁿ`, rate `b` bits per dimension.
    pub fn self_similar(n: usize, q_fine: f64, bits: u32) -> Result<Self> {
        let fine = Lattice::scaled_integer(n, q_fine)?;
        let coarse = Lattice::scaled_integer(n, q_fine * (1u64 << bits) as f64)?;
        NestedLatticeCode::new(coarse, fine)
    }

    pub fn dim(&self) -> usize {
        self.coarse.dim()
    }

    /// `(1/n)·log2(Vol(V)/Vol(V₁))` bits per dimension.
    pub fn code_rate(&self) -> f64 {
        (self.coarse.log2_volume() - self.fine.log2_volume()) / self.dim() as f64
    }

    /// `|Λ₁ ∩ V| = Vol(V)/Vol(V₁)`.
    pub fn codebook_size(&self) -> f64 {
        (self.dim() as f64 * self.code_rate()).exp2().round()
    }

    /// Same code with both lattices multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Ok(NestedLatticeCode {
            coarse: self.coarse.scaled(factor)?,
            fine: self.fine.scaled(factor)?,
            unit_ratio: self.unit_ratio,
        })
    }

    /// Integer key of a fine lattice point, used for exact comparisons.
    pub fn key(&self, t: &[f64]) -> Vec<i64> {
        let unit = self.fine.unit();
        t.iter().map(|&x| (x / unit).round() as i64).collect()
    }

    fn from_key(&self, z: &[i64]) -> Vec<f64> {
        let unit = self.fine.unit();
        z.iter().map(|&v| v as f64 * unit).collect()
    }

    /// Reduction modulo `Λ` of a fine point given by its integer key,
    /// computed exactly so that boundary points always land on the same
    /// representative.
    pub fn reduce_key(&self, z: &[i64]) -> Vec<i64> {
        let q = self.coarse.quantize_int(z, self.unit_ratio);
        z.iter().zip(q).map(|(a, b)| a - b).collect()
    }

    /// Whether `t` is a codeword: a fine lattice point left unchanged by
    /// reduction modulo the coarse lattice.
    pub fn is_codeword(&self, t: &[f64]) -> bool {
        let tol = NESTING_TOL * self.fine.unit().max(1.0);
        if t.len() != self.dim() || !self.fine.contains(t, tol) {
            return false;
        }
        let key = self.key(t);
        self.reduce_key(&key) == key
    }

    /// Euclidean lattice decoding: nearest fine point, reduced mod `Λ`.
    pub fn decode(&self, y: &[f64]) -> Vec<f64> {
        let z = self.fine.quantize_coords(y);
        self.from_key(&self.reduce_key(&z))
    }

    /// Points of `Λ₁` in the box `[0, L)ⁿ`, with `L` the coarse cubic period,
    /// as `(fine coset index, per-coordinate period count)` digits.
    fn box_shape(&self) -> (usize, usize) {
        let per_axis = (self.coarse.cubic_period() / self.fine.cubic_period()).round() as usize;
        (self.fine.coset_count(), per_axis)
    }

    fn box_key(&self, coset: usize, digits: &[usize]) -> Vec<i64> {
        let (base, period): (Vec<i64>, i64) = match self.fine.kind() {
            LatticeKind::ScaledInteger { .. } => (vec![0; self.dim()], 1),
            LatticeKind::ConstructionA { p, .. } => (self.fine.codewords[coset].clone(), *p as i64),
        };
        base.iter()
            .zip(digits)
            .map(|(&c, &z)| c + period * z as i64)
            .collect()
    }

    /// All codewords, sorted by integer key. Fails when more than `cap`
    /// candidate points would have to be visited.
    pub fn enumerate_codebook(&self, cap: usize) -> Result<Vec<Vec<f64>>> {
        let (cosets, per_axis) = self.box_shape();
        let visits = cosets as f64 * (per_axis as f64).powi(self.dim() as i32);
        if visits > cap as f64 {
            return Err(Error::Resource(format!(
                "codebook enumeration visits {visits} points, above the cap of {cap}"
            )));
        }
        let mut keyed: Vec<(Vec<i64>, Vec<f64>)> = Vec::new();
        let mut digits = vec![0usize; self.dim()];
        for coset in 0..cosets {
            digits.iter_mut().for_each(|d| *d = 0);
            loop {
                let key = self.reduce_key(&self.box_key(coset, &digits));
                let t = self.from_key(&key);
                keyed.push((key, t));
                let mut j = 0;
                while j < digits.len() {
                    digits[j] += 1;
                    if digits[j] < per_axis {
                        break;
                    }
                    digits[j] = 0;
                    j += 1;
                }
                if j == digits.len() {
                    break;
                }
            }
        }
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.dedup_by(|a, b| a.0 == b.0);
        Ok(keyed.into_iter().map(|(_, t)| t).collect())
    }

    /// A codeword drawn uniformly from the codebook.
    pub fn random_codeword<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let (cosets, per_axis) = self.box_shape();
        let coset = if cosets > 1 { rng.random_range(0..cosets) } else { 0 };
        let digits: Vec<usize> = (0..self.dim()).map(|_| rng.random_range(0..per_axis)).collect();
        self.from_key(&self.reduce_key(&self.box_key(coset, &digits)))
    }
}

//! The five table-producing commands. Each takes fully layered parameters
//! and returns one table (or one per region mode).

use fadingdpc::bc::{alpha_grid, sweep_region};
use fadingdpc::bounds::{all_bounds, gap_rayleigh_mimo, PowerConfig};
use fadingdpc::dpc_sim::{binary_code, decision_radius_sq, run_trials_with_radius, self_similar_code};
use fadingdpc::lattice::DEFAULT_CODEBOOK_CAP;
use fadingdpc::nalgebra::DMatrix;
use fadingdpc::{
    BcConfig, Complex64, DpcConfig, FadingSpec, Lattice, McSettings, NestedLatticeCode, Precoder, R1Form, RegionMode,
    SeedSpec,
};
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{usage, CliResult};
use crate::params::{
    db_to_linear, BcParams, BoundsParams, ChannelParams, DpcSimParams, GapTableParams, LatticeParams, NumList,
};
use crate::table::{Cell, Metadata, ResultTable};

/// Seed and sample count of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub seed: u64,
    pub samples: usize,
}

impl RunSettings {
    pub fn mc(&self) -> McSettings {
        McSettings::new(self.seed, self.samples)
    }
}

fn either_or(db: Option<f64>, linear: Option<f64>, name: &str, default: f64) -> CliResult<f64> {
    match (db, linear) {
        (Some(_), Some(_)) => usage(format!("give either --{name}-db or --{name}, not both")),
        (Some(db), None) => Ok(db_to_linear(db)),
        (None, Some(x)) => Ok(x),
        (None, None) => Ok(default),
    }
}

fn fixed_matrix(rows: usize, cols: usize, re: Option<&NumList>, im: Option<&NumList>, name: &str) -> CliResult<DMatrix<Complex64>> {
    let len = rows * cols;
    let take = |l: Option<&NumList>, label: &str| -> CliResult<Vec<f64>> {
        match l {
            Some(v) if v.0.len() == len => Ok(v.0.clone()),
            Some(v) => usage(format!("--{label} needs {len} entries ({rows}x{cols}), got {}", v.0.len())),
            None => Ok(Vec::new()),
        }
    };
    let re = take(re, name)?;
    let im = take(im, &format!("{name}-imag"))?;
    Ok(DMatrix::from_fn(rows, cols, |i, j| {
        let k = i * cols + j;
        let r = if re.is_empty() { (i == j) as u8 as f64 } else { re[k] };
        Complex64::new(r, im.get(k).copied().unwrap_or(0.0))
    }))
}

fn fading_spec(kind: &str, tx: usize, rx: usize, m: Option<f64>, fixed: impl FnOnce() -> CliResult<DMatrix<Complex64>>) -> CliResult<FadingSpec> {
    Ok(match kind {
        "rayleigh" => FadingSpec::rayleigh(tx, rx)?,
        "nakagami" => FadingSpec::nakagami(m.unwrap_or(2.0), tx, rx)?,
        "deterministic" => FadingSpec::deterministic(fixed()?)?,
        other => return usage(format!("unknown fading {other:?}; expected rayleigh, nakagami or deterministic")),
    })
}

pub fn channel_spec(ch: &ChannelParams) -> CliResult<FadingSpec> {
    let (tx, rx) = (ch.tx.unwrap_or(1), ch.rx.unwrap_or(1));
    fading_spec(ch.fading.as_deref().unwrap_or("rayleigh"), tx, rx, ch.m, || {
        fixed_matrix(rx, tx, ch.h.as_ref(), ch.h_imag.as_ref(), "h")
    })
}

pub fn cmd_bounds(run: RunSettings, ch: &ChannelParams, p: &BoundsParams, meta: Metadata) -> CliResult<ResultTable> {
    let spec = channel_spec(ch)?;
    let pw = p.pw.unwrap_or(1.0);
    let ps = either_or(p.ps_db, p.ps, "ps", 0.0)? * pw;
    let snrs = p.snr_db.clone().unwrap_or_else(|| NumList((0..=15).map(|i| 2.0 * i as f64).collect()));
    let mut table = ResultTable::new(&["snr_db", "outer", "outer_se", "dpc", "dpc_se", "lattice", "lattice_se"], meta);
    let mc = run.mc();
    for &snr in &snrs.0 {
        let cfg = PowerConfig::new(db_to_linear(snr) * pw, ps, pw, spec.tx, spec.rx)?;
        let b = all_bounds(&cfg, &spec, &mc)?;
        table.push(vec![
            snr.into(),
            b.outer.mean.into(),
            b.outer.std_error.into(),
            b.dpc.mean.into(),
            b.dpc.std_error.into(),
            b.lattice.mean.into(),
            b.lattice.std_error.into(),
        ]);
    }
    Ok(table)
}

/// Rows with `N ≤ M` keep an empty gap and a warning.
pub fn cmd_gap_table(p: &GapTableParams, meta: Metadata, warn: &mut dyn FnMut(String)) -> CliResult<ResultTable> {
    let ms = p.m_list.clone().unwrap_or(NumList(vec![1.0, 2.0, 3.0, 4.0])).usizes("--m-list")?;
    let ns = p.n_list.clone().unwrap_or(NumList((1..=30).map(f64::from).collect())).usizes("--n-list")?;
    let mut table = ResultTable::new(&["M", "N", "gap_bits", "warning"], meta);
    for &m in &ms {
        if m == 0 {
            return usage("--m-list entries must be positive");
        }
        for &n in &ns {
            if n <= m {
                warn(format!("skipping M = {m}, N = {n}: the gap needs N > M"));
                table.push(vec![m.into(), n.into(), Cell::Empty, "N<=M".into()]);
            } else {
                table.push(vec![m.into(), n.into(), gap_rayleigh_mimo(m, n)?.value().into(), Cell::Empty]);
            }
        }
    }
    Ok(table)
}

const CODE_SEARCH_SALT: u64 = 0xC0DE_5EA2;
const CODE_SEARCH_TRIALS: usize = 200;

pub fn cmd_dpc_sim(run: RunSettings, ch: &ChannelParams, p: &DpcSimParams, meta: Metadata) -> CliResult<ResultTable> {
    let spec = channel_spec(ch)?;
    let pw = p.pw.unwrap_or(1.0);
    let px = either_or(p.px_db, p.px, "px", 10.0)? * pw;
    let ps = either_or(p.ps_db, p.ps, "ps", 0.0)? * pw;
    let power = PowerConfig::new(px, ps, pw, spec.tx, spec.rx)?;
    let n_syms = p.n_sym.clone().unwrap_or(NumList(vec![8.0])).usizes("--n-sym")?;
    let bits = p.bits.clone().unwrap_or(NumList(vec![1.0])).usizes("--bits")?;
    let frames = p.frames.unwrap_or(1000);
    let epsilon = p.epsilon.unwrap_or(0.1);
    let precoder = match p.precoder.as_deref().unwrap_or("identity") {
        "identity" => Precoder::Identity,
        "costa" => Precoder::CostaScaled,
        other => return usage(format!("unknown precoder {other:?}; expected identity or costa")),
    };
    let code_kind = p.code.as_deref().unwrap_or("cubic");
    let mc = run.mc();
    let seed = SeedSpec::new(run.seed);
    let mut table = ResultTable::new(
        &["n_sym", "rate_bits", "ser", "mean_z_norm", "radius_sq", "concentration_prob"],
        meta,
    );
    for &n_sym in &n_syms {
        if n_sym == 0 {
            return usage("--n-sym entries must be positive");
        }
        let codes: Vec<NestedLatticeCode> = match code_kind {
            "cubic" => bits
                .iter()
                .map(|&b| {
                    if !(1..=30).contains(&b) {
                        return usage(format!("--bits entries must lie in 1..=30, got {b}"));
                    }
                    Ok(self_similar_code(&power, n_sym, b as u32)?)
                })
                .collect::<CliResult<_>>()?,
            "binary" => {
                let Some(k) = p.k else {
                    return usage("--code binary needs --k");
                };
                let mut rng = seed.derive(CODE_SEARCH_SALT).stream(n_sym as u64);
                vec![binary_code(&power, n_sym, k, CODE_SEARCH_TRIALS, &mut rng)?]
            }
            other => return usage(format!("unknown code {other:?}; expected cubic or binary")),
        };
        let radius = decision_radius_sq(&power, &spec, epsilon, n_sym, &mc)?;
        for code in codes {
            let dpc = DpcConfig::new(power, spec.clone(), code, n_sym, epsilon, precoder)?;
            let stats = run_trials_with_radius(&dpc, frames, &seed, Some(radius))?;
            table.push(vec![
                n_sym.into(),
                dpc.rate_bits().into(),
                stats.ser.into(),
                stats.mean_z_norm.into(),
                radius.into(),
                stats.exceed_prob.unwrap_or(f64::NAN).into(),
            ]);
        }
    }
    Ok(table)
}

pub fn bc_config(p: &BcParams) -> CliResult<BcConfig> {
    let tx = p.tx.unwrap_or(1);
    let (n1, n2) = (p.n1.unwrap_or(1), p.n2.unwrap_or(1));
    let px = p.px.unwrap_or(1.0);
    let pw1 = px / db_to_linear(p.px_pw1_db.unwrap_or(0.0));
    let pw2 = px / db_to_linear(p.px_pw2_db.unwrap_or(20.0));
    let user1 = fading_spec(p.user1.as_deref().unwrap_or("deterministic"), tx, n1, p.m1, || {
        fixed_matrix(n1, tx, p.g.as_ref(), None, "g")
    })?;
    let user2 = fading_spec(p.user2.as_deref().unwrap_or("rayleigh"), tx, n2, p.m2, || {
        fixed_matrix(n2, tx, None, None, "h2")
    })?;
    let r1_form = match p.r1_form.as_deref().unwrap_or("unscaled") {
        "unscaled" => R1Form::Unscaled,
        "noise_scaled" => R1Form::NoiseScaled,
        other => return usage(format!("unknown r1 form {other:?}; expected unscaled or noise_scaled")),
    };
    let bc = BcConfig {
        tx,
        n1,
        n2,
        px,
        pw1,
        pw2,
        user1,
        user2,
        alpha_grid: alpha_grid(p.alpha_steps.unwrap_or(20)),
        r1_form,
    };
    bc.validate()?;
    Ok(bc)
}

/// Modes selected by `--mode`; `all` picks the lattice region that matches
/// receiver 1's channel, plus the binning region and time sharing.
pub fn region_modes(p: &BcParams, bc: &BcConfig) -> CliResult<Vec<RegionMode>> {
    match p.mode.as_deref().unwrap_or("all") {
        "all" => {
            let lattice = if bc.user1.is_deterministic() { RegionMode::QuasiStatic } else { RegionMode::Ergodic };
            Ok(vec![lattice, RegionMode::DpcCsit, RegionMode::TimeShare])
        }
        name => Ok(vec![RegionMode::parse(name).or_else(|e| usage(e.to_string()))?]),
    }
}

pub fn cmd_bc_region(run: RunSettings, p: &BcParams, meta: Metadata) -> CliResult<Vec<(RegionMode, ResultTable)>> {
    let bc = bc_config(p)?;
    let mc = run.mc();
    region_modes(p, &bc)?
        .into_iter()
        .map(|mode| {
            let curve = sweep_region(mode, &bc, &mc)?;
            let mut table = ResultTable::new(&["alpha", "R1", "R1_se", "R2", "R2_se"], meta.clone());
            table.metadata.command = format!("{} {}", meta.command, mode.name());
            for pt in curve.points {
                table.push(vec![
                    pt.alpha.into(),
                    pt.r1.mean.into(),
                    pt.r1.std_error.into(),
                    pt.r2.mean.into(),
                    pt.r2.std_error.into(),
                ]);
            }
            Ok((mode, table))
        })
        .collect()
}

fn parse_generator(text: &str) -> CliResult<Vec<Vec<u32>>> {
    text.split(';')
        .map(|row| {
            row.split(',')
                .map(|v| v.trim().parse::<u32>().or_else(|e| usage(format!("bad generator entry {v:?}: {e}"))))
                .collect()
        })
        .collect()
}

const DITHER_SALT: u64 = 0xD17E_0001;
const PAIR_SALT: u64 = 0xD17E_0002;
const HIST_BINS: usize = 16;

fn check_row(table: &mut ResultTable, name: &str, measured: f64, expected: Option<f64>, tol: f64, pass: bool) {
    table.push(vec![
        name.into(),
        measured.into(),
        expected.map_or(Cell::Empty, Cell::Real),
        tol.into(),
        (if pass { "pass" } else { "fail" }).into(),
    ]);
}

/// Histogram of `values` over `[lo, hi]` in [`HIST_BINS`] bins.
fn histogram(values: impl Iterator<Item = f64>, lo: f64, hi: f64) -> [f64; HIST_BINS] {
    let mut h = [0.0; HIST_BINS];
    for v in values {
        let b = ((v - lo) / (hi - lo) * HIST_BINS as f64).floor().clamp(0.0, (HIST_BINS - 1) as f64) as usize;
        h[b] += 1.0;
    }
    h
}

/// Two-sample chi-square p-value for equal-size samples.
fn two_sample_p(a: &[f64; HIST_BINS], b: &[f64; HIST_BINS]) -> f64 {
    let mut stat = 0.0;
    let mut dof = -1.0;
    for (x, y) in a.iter().zip(b) {
        if x + y > 0.0 {
            stat += (x - y).powi(2) / (x + y);
            dof += 1.0;
        }
    }
    if dof < 1.0 {
        return 1.0;
    }
    ChiSquared::new(dof).expect("positive dof").sf(stat)
}

pub fn cmd_lattice_check(run: RunSettings, p: &LatticeParams, meta: Metadata) -> CliResult<ResultTable> {
    let n = p.n.unwrap_or(2);
    let (lattice, cubic_q) = match p.p {
        Some(prime) => {
            let Some(gen) = p.generator.as_deref() else {
                return usage("--p needs --generator");
            };
            (Lattice::construction_a(n, prime, parse_generator(gen)?, p.scale.unwrap_or(1.0))?, None)
        }
        None => {
            let q = p.q.unwrap_or(4.0);
            (Lattice::scaled_integer(n, q)?, Some(q))
        }
    };
    let mc = run.mc();
    let mut table = ResultTable::new(&["check", "measured", "expected", "tolerance", "pass"], meta);

    let sm = lattice.second_moment(Some(&mc))?;
    match cubic_q {
        Some(q) => {
            let expected = q * q / 12.0;
            check_row(&mut table, "second_moment", sm.mean, Some(expected), 0.02, (sm.mean / expected - 1.0).abs() < 0.02);
        }
        None => check_row(&mut table, "second_moment", sm.mean, None, 3.0 * sm.std_error, sm.mean > 0.0),
    }
    let nsm = lattice.normalized_second_moment(Some(&mc))?.mean;
    let sphere = 1.0 / (2.0 * std::f64::consts::PI * std::f64::consts::E);
    check_row(&mut table, "nsm_above_sphere_bound", nsm, Some(sphere), 0.0, nsm > sphere);

    // Distributive law mod(s + mod(t)) = mod(s + t) on random pairs.
    let pairs = p.pairs.unwrap_or(1000);
    let mut rng = SeedSpec::new(run.seed).derive(PAIR_SALT).stream(0);
    let spread = 10.0 * lattice.cubic_period();
    let tol = 1e-9 * spread;
    let mut failures = 0usize;
    for _ in 0..pairs {
        let s: Vec<f64> = (0..n).map(|_| rng.random_range(-spread..spread)).collect();
        let t: Vec<f64> = (0..n).map(|_| rng.random_range(-spread..spread)).collect();
        let inner: Vec<f64> = s.iter().zip(lattice.mod_lattice(&t)).map(|(a, b)| a + b).collect();
        let lhs = lattice.mod_lattice(&inner);
        let sum: Vec<f64> = s.iter().zip(&t).map(|(a, b)| a + b).collect();
        let rhs = lattice.mod_lattice(&sum);
        let diff: Vec<f64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        if !(lattice.contains(&diff, tol) && (norm(&lhs) - norm(&rhs)).abs() <= tol * spread) {
            failures += 1;
        }
    }
    check_row(&mut table, "mod_distributive_failures", failures as f64, Some(0.0), 0.0, failures == 0);

    // Dither moments.
    let count = run.samples.max(2);
    let mut rng = SeedSpec::new(run.seed).derive(DITHER_SALT).stream(0);
    let dithers: Vec<Vec<f64>> = (0..count).map(|_| lattice.sample_dither(&mut rng)).collect();
    let moments = |a: usize, b: usize| -> (f64, f64) {
        let prods: Vec<f64> = dithers.iter().map(|d| d[a] * d[b]).collect();
        let mean = prods.iter().sum::<f64>() / count as f64;
        let var = prods.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
        (mean, (var / count as f64).sqrt())
    };
    let z_limit = |tests: usize| Normal::new(0.0, 1.0).expect("unit normal").inverse_cdf(1.0 - 0.0027 / (2.0 * tests as f64));

    let mut worst_mean = 0.0f64;
    for j in 0..n {
        let vals: Vec<f64> = dithers.iter().map(|d| d[j]).collect();
        let mean = vals.iter().sum::<f64>() / count as f64;
        let var = vals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
        worst_mean = worst_mean.max(mean.abs() / (var / count as f64).sqrt());
    }
    let lim = z_limit(n);
    check_row(&mut table, "dither_mean_max_z", worst_mean, Some(0.0), lim, worst_mean <= lim);

    let power = (0..n).map(|j| moments(j, j).0).sum::<f64>() / n as f64;
    check_row(&mut table, "dither_power", power, Some(sm.mean), 0.02, (power / sm.mean - 1.0).abs() < 0.02);

    if n > 1 {
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in a + 1..n {
                let (m, se) = moments(a, b);
                worst = worst.max(m.abs() / se);
            }
        }
        let lim = z_limit(n * (n - 1) / 2);
        check_row(&mut table, "dither_cross_correlation_max_z", worst, Some(0.0), lim, worst <= lim);
    }

    // Uniformity of mod(g − d): compared against fresh dithers, which are
    // uniform over the cell by construction.
    let g = lattice.mod_lattice(&(0..n).map(|j| 0.37 * (j + 1) as f64 * lattice.unit()).collect::<Vec<_>>());
    let half = dithers.len() / 2;
    let mut worst_p = 1.0f64;
    for j in 0..n {
        let folded: Vec<f64> = dithers[..half]
            .iter()
            .map(|d| lattice.mod_lattice(&g.iter().zip(d).map(|(a, b)| a - b).collect::<Vec<_>>())[j])
            .collect();
        let fresh: Vec<f64> = dithers[half..2 * half].iter().map(|d| d[j]).collect();
        let lo = folded.iter().chain(&fresh).copied().fold(f64::INFINITY, f64::min);
        let hi = folded.iter().chain(&fresh).copied().fold(f64::NEG_INFINITY, f64::max);
        let p = two_sample_p(&histogram(folded.into_iter(), lo, hi), &histogram(fresh.into_iter(), lo, hi));
        worst_p = worst_p.min(p);
    }
    check_row(&mut table, "dithered_uniformity_min_p", worst_p, None, 0.01, worst_p > 0.01);

    // Codebook cardinality against 2^{n·rate}.
    let code = match (&lattice, cubic_q) {
        (_, Some(q)) => NestedLatticeCode::self_similar(n, q, p.bits.unwrap_or(2))?,
        (fine, None) => {
            let coarse = Lattice::scaled_integer(n, 2.0 * fine.cubic_period())?;
            NestedLatticeCode::new(coarse, fine.clone())?
        }
    };
    let book = code.enumerate_codebook(DEFAULT_CODEBOOK_CAP)?;
    let expected = (n as f64 * code.code_rate()).exp2().round();
    check_row(&mut table, "codebook_cardinality", book.len() as f64, Some(expected), 0.0, book.len() as f64 == expected);
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> Metadata {
        Metadata {
            command: "test".into(),
            seed: 42,
            n_samples: 2000,
            version: "0".into(),
            echo: String::new(),
            params: serde_json::Value::Null,
        }
    }

    const RUN: RunSettings = RunSettings { seed: 42, samples: 2000 };

    #[test]
    fn gap_table_values_and_warnings() {
        let p = GapTableParams {
            m_list: Some("1,2,4".parse().unwrap()),
            n_list: Some("2,4,40".parse().unwrap()),
        };
        let mut warnings = Vec::new();
        let t = cmd_gap_table(&p, meta(), &mut |w| warnings.push(w)).unwrap();
        let gap = |m: i64, n: i64| {
            t.rows
                .iter()
                .find(|r| r[0] == Cell::Int(m) && r[1] == Cell::Int(n))
                .map(|r| r[2].clone())
                .unwrap()
        };
        assert!((gap(1, 2).as_f64().unwrap() - 3f64.log2()).abs() < 1e-12);
        assert!((gap(2, 4).as_f64().unwrap() - 2.643856189774724).abs() < 1e-12);
        assert!((gap(4, 40).as_f64().unwrap() - 4.0 * (1.0f64 + 5.0 / 36.0).log2()).abs() < 1e-12);
        assert!((gap(4, 40).as_f64().unwrap() - 0.750508).abs() < 1e-6);
        assert_eq!(gap(2, 2), Cell::Empty);
        assert_eq!(warnings.len(), 3);
    }

    #[test]
    fn deterministic_identity_without_dirt_collapses() {
        let ch = ChannelParams {
            fading: Some("deterministic".into()),
            tx: Some(2),
            rx: Some(2),
            ..Default::default()
        };
        let p = BoundsParams {
            snr_db: Some("0:20:10".parse().unwrap()),
            ..Default::default()
        };
        let t = cmd_bounds(RUN, &ch, &p, meta()).unwrap();
        assert_eq!(t.rows.len(), 3);
        for r in &t.rows {
            assert_eq!(r[1], r[3]);
            assert_eq!(r[3], r[5]);
        }
    }

    #[test]
    fn conflicting_power_flags_are_usage_errors() {
        let p = BoundsParams {
            ps: Some(1.0),
            ps_db: Some(0.0),
            ..Default::default()
        };
        let err = cmd_bounds(RUN, &ChannelParams::default(), &p, meta()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn noiseless_simulation_row() {
        let ch = ChannelParams {
            fading: Some("deterministic".into()),
            ..Default::default()
        };
        let p = DpcSimParams {
            pw: Some(1e-12),
            px: Some(1e12),
            ps: Some(1e13),
            n_sym: Some("4".parse().unwrap()),
            bits: Some("2".parse().unwrap()),
            frames: Some(200),
            ..Default::default()
        };
        let t = cmd_dpc_sim(RUN, &ch, &p, meta()).unwrap();
        assert_eq!(t.rows[0][2], Cell::Real(0.0));
    }

    #[test]
    fn oversized_binary_code_is_a_resource_error() {
        let p = DpcSimParams {
            code: Some("binary".into()),
            k: Some(20),
            n_sym: Some("32".parse().unwrap()),
            frames: Some(1),
            ..Default::default()
        };
        let err = cmd_dpc_sim(RUN, &ChannelParams::default(), &p, meta()).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn lattice_checks_pass_for_the_cubic_lattice() {
        let t = cmd_lattice_check(RunSettings { seed: 42, samples: 100_000 }, &LatticeParams::default(), meta()).unwrap();
        let sm = &t.rows[0];
        assert!((sm[1].as_f64().unwrap() - 16.0 / 12.0).abs() < 0.02);
        for row in &t.rows {
            assert_eq!(row[4], Cell::from("pass"), "{row:?}");
        }
    }

    #[test]
    fn lattice_checks_for_construction_a() {
        let p = LatticeParams {
            n: Some(2),
            p: Some(5),
            generator: Some("1,2".into()),
            ..Default::default()
        };
        let t = cmd_lattice_check(RunSettings { seed: 42, samples: 50_000 }, &p, meta()).unwrap();
        let row = |name: &str| t.rows.iter().find(|r| r[0] == Cell::from(name)).unwrap().clone();
        assert_eq!(row("codebook_cardinality")[1], Cell::Real(20.0));
        assert_eq!(row("mod_distributive_failures")[4], Cell::from("pass"));
        assert_eq!(row("dithered_uniformity_min_p")[4], Cell::from("pass"));
    }

    #[test]
    fn all_modes_follow_receiver_one() {
        let p = BcParams {
            user1: Some("nakagami".into()),
            user2: Some("nakagami".into()),
            n1: Some(2),
            n2: Some(2),
            ..Default::default()
        };
        let bc = bc_config(&p).unwrap();
        assert_eq!(region_modes(&p, &bc).unwrap(), vec![RegionMode::Ergodic, RegionMode::DpcCsit, RegionMode::TimeShare]);
        let bad = BcParams {
            mode: Some("hybrid".into()),
            ..Default::default()
        };
        assert!(region_modes(&bad, &bc_config(&bad).unwrap()).is_err());
    }
}

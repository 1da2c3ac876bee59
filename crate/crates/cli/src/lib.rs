//! Command-line front end: parameter layering, figure presets and
//! deterministic CSV/JSON tables.

pub mod commands;
pub mod error;
pub mod params;
pub mod presets;
pub mod table;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use commands::RunSettings;
use error::{usage, CliResult};
use params::{BcParams, BoundsParams, ChannelParams, CommonParams, ConfigFile, DpcSimParams, GapTableParams, LatticeParams};
use presets::Preset;
use table::{Format, Metadata, ResultTable};

pub use error::CliError;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: usize = 100_000;

#[derive(Debug, Parser)]
#[command(name = "fadingdpc", version, about = "Capacity bounds, lattice transceiver simulation and broadcast regions for fading dirty-paper channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Shared {
    #[command(flatten)]
    pub common: CommonParams,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// JSON file with parameters keyed by flag name.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Figure preset (fig1 .. fig7).
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Outer bound, binning rate and lattice rate over an SNR sweep.
    Bounds {
        #[command(flatten)]
        shared: Shared,
        #[command(flatten)]
        channel: ChannelParams,
        #[command(flatten)]
        params: BoundsParams,
    },
    /// Closed-form Rayleigh MIMO gap over antenna counts.
    GapTable {
        #[command(flatten)]
        shared: Shared,
        #[command(flatten)]
        params: GapTableParams,
    },
    /// End-to-end nested-lattice transceiver simulation.
    DpcSim {
        #[command(flatten)]
        shared: Shared,
        #[command(flatten)]
        channel: ChannelParams,
        #[command(flatten)]
        params: DpcSimParams,
    },
    /// Two-user broadcast rate regions.
    BcRegion {
        #[command(flatten)]
        shared: Shared,
        #[command(flatten)]
        params: BcParams,
    },
    /// Lattice property checks.
    LatticeCheck {
        #[command(flatten)]
        shared: Shared,
        #[command(flatten)]
        params: LatticeParams,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bounds { .. } => "bounds",
            Command::GapTable { .. } => "gap-table",
            Command::DpcSim { .. } => "dpc-sim",
            Command::BcRegion { .. } => "bc-region",
            Command::LatticeCheck { .. } => "lattice-check",
        }
    }

    fn shared(&self) -> &Shared {
        match self {
            Command::Bounds { shared, .. }
            | Command::GapTable { shared, .. }
            | Command::DpcSim { shared, .. }
            | Command::BcRegion { shared, .. }
            | Command::LatticeCheck { shared, .. } => shared,
        }
    }
}

/// Command line as one string, program name normalised.
pub fn echo_args<S: AsRef<str>>(args: &[S]) -> String {
    let mut parts = vec!["fadingdpc".to_string()];
    for a in args.iter().skip(1) {
        let a = a.as_ref();
        if a.is_empty() || a.contains(char::is_whitespace) {
            parts.push(format!("'{a}'"));
        } else {
            parts.push(a.to_string());
        }
    }
    parts.join(" ")
}

fn load_preset(shared: &Shared, command: &str) -> CliResult<Option<Preset>> {
    let Some(name) = &shared.preset else {
        return Ok(None);
    };
    let preset = presets::preset(name)?;
    if preset.command() != command {
        return usage(format!("preset {name} belongs to the {} command", preset.command()));
    }
    Ok(Some(preset))
}

fn resolve_common(file_common: CommonParams, cli: &CommonParams) -> CliResult<(RunSettings, Format)> {
    let merged = file_common.overlay(cli.clone());
    let format = match merged.format.as_deref().unwrap_or("csv") {
        "csv" => Format::Csv,
        "json" => Format::Json,
        other => return usage(format!("unknown format {other:?}; expected csv or json")),
    };
    let samples = merged.samples.unwrap_or(DEFAULT_SAMPLES);
    if samples == 0 {
        return usage("--samples must be positive");
    }
    Ok((
        RunSettings {
            seed: merged.seed.unwrap_or(DEFAULT_SEED),
            samples,
        },
        format,
    ))
}

fn metadata(command: &str, run: RunSettings, echo: &str, params: serde_json::Value) -> Metadata {
    Metadata {
        command: command.into(),
        seed: run.seed,
        n_samples: run.samples,
        version: env!("CARGO_PKG_VERSION").into(),
        echo: echo.into(),
        params,
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("parameters serialise")
}

/// Path of the table for one region mode: `{stem}_{mode}.{ext}`.
pub fn mode_path(path: &Path, mode: &str, format: Format) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_else(|| match format {
            Format::Csv => "csv".into(),
            Format::Json => "json".into(),
        });
    path.with_file_name(format!("{stem}_{mode}.{ext}"))
}

fn emit(table: &ResultTable, format: Format, path: Option<&Path>, stdout: &mut dyn Write) -> CliResult<Option<PathBuf>> {
    match path {
        Some(p) => {
            let mut buf = Vec::new();
            table.write(format, &mut buf)?;
            std::fs::write(p, buf)?;
            Ok(Some(p.to_path_buf()))
        }
        None => {
            table.write(format, stdout)?;
            Ok(None)
        }
    }
}

/// Runs a parsed command line. Tables go to `--output` or `stdout`,
/// warnings to `stderr`. Returns the files written.
pub fn execute(
    cli: Cli,
    echo: &str,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CliResult<Vec<PathBuf>> {
    let name = cli.command.name();
    let shared = cli.command.shared().clone();
    let mut file = match &shared.config {
        Some(p) => Some(ConfigFile::load(p)?),
        None => None,
    };
    let file_common: CommonParams = match file.as_mut() {
        Some(f) => f.take(&CommonParams::keys())?,
        None => CommonParams::default(),
    };
    let (run, format) = resolve_common(file_common, &shared.common)?;
    let preset = load_preset(&shared, name)?;
    let out = shared.output.as_deref();
    let mut written = Vec::new();

    macro_rules! layer {
        ($base:expr, $ty:ty, $cli:expr) => {{
            let from_file: $ty = match file.as_mut() {
                Some(f) => f.take(&<$ty>::keys())?,
                None => <$ty>::default(),
            };
            $base.overlay(from_file).overlay($cli)
        }};
    }

    match cli.command {
        Command::Bounds { channel, params, .. } => {
            let (pc, pb) = match preset {
                Some(Preset::Bounds(c, b)) => (c, b),
                _ => Default::default(),
            };
            let channel = layer!(pc, ChannelParams, channel);
            let params = layer!(pb, BoundsParams, params);
            finish(file.take())?;
            let meta = metadata(name, run, echo, serde_json::json!({"channel": to_json(&channel), "bounds": to_json(&params)}));
            let table = commands::cmd_bounds(run, &channel, &params, meta)?;
            written.extend(emit(&table, format, out, stdout)?);
        }
        Command::GapTable { params, .. } => {
            let base = match preset {
                Some(Preset::GapTable(g)) => g,
                _ => Default::default(),
            };
            let params = layer!(base, GapTableParams, params);
            finish(file.take())?;
            let meta = metadata(name, run, echo, to_json(&params));
            let mut warn = |w: String| {
                let _ = writeln!(stderr, "warning: {w}");
            };
            let table = commands::cmd_gap_table(&params, meta, &mut warn)?;
            written.extend(emit(&table, format, out, stdout)?);
        }
        Command::DpcSim { channel, params, .. } => {
            let channel = layer!(ChannelParams::default(), ChannelParams, channel);
            let params = layer!(DpcSimParams::default(), DpcSimParams, params);
            finish(file.take())?;
            let meta = metadata(name, run, echo, serde_json::json!({"channel": to_json(&channel), "sim": to_json(&params)}));
            let table = commands::cmd_dpc_sim(run, &channel, &params, meta)?;
            written.extend(emit(&table, format, out, stdout)?);
        }
        Command::BcRegion { params, .. } => {
            let base = match preset {
                Some(Preset::BcRegion(b)) => b,
                _ => Default::default(),
            };
            let params = layer!(base, BcParams, params);
            finish(file.take())?;
            let meta = metadata(name, run, echo, to_json(&params));
            let tables = commands::cmd_bc_region(run, &params, meta)?;
            let single = tables.len() == 1;
            for (mode, table) in &tables {
                let path = out.map(|p| if single { p.to_path_buf() } else { mode_path(p, mode.name(), format) });
                written.extend(emit(table, format, path.as_deref(), stdout)?);
            }
        }
        Command::LatticeCheck { params, .. } => {
            let params = layer!(LatticeParams::default(), LatticeParams, params);
            finish(file.take())?;
            let meta = metadata(name, run, echo, to_json(&params));
            let table = commands::cmd_lattice_check(run, &params, meta)?;
            written.extend(emit(&table, format, out, stdout)?);
        }
    }
    Ok(written)
}

fn finish(file: Option<ConfigFile>) -> CliResult<()> {
    file.map_or(Ok(()), ConfigFile::finish)
}

/// Parses and runs `args` (program name first). Returns the exit code.
pub fn run<S: AsRef<str>>(args: &[S], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args.iter().map(|a| a.as_ref())) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { write!(stderr, "{rendered}") } else { write!(stdout, "{rendered}") };
            return code;
        }
    };
    match execute(cli, &echo_args(args), stdout, stderr) {
        Ok(_) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "fadingdpc: {e}");
            e.exit_code()
        }
    }
}

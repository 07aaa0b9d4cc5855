//! Command-line driver.

use std::collections::HashMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use spr_core::metrics::{self, estimate_resonance_angle, MetricsConfig, SweepWindow};
use spr_core::optimizer::{refine_sweep, ComparisonRow, ParameterSpec, RefineOptions, Target};
use spr_core::table1::{self, BenchError, PUBLISHED};
use spr_core::tmm::{field_profile, FIELD_DEPTH_INTO_MEDIUM_NM, FIELD_DEPTH_INTO_PRISM_NM};
use spr_core::{Objective, Stack};

use crate::catalog::{Catalog, MATERIALS_ENV};
use crate::document::parse_stack_config;
use crate::formats::{self, MetricsRecord, BENCH_LABEL};
use crate::parallel::{par_compare, par_sweep_grid, par_sweep_parameter, with_workers};

#[derive(Debug, Parser)]
#[command(name = "spr", version, about = "Kretschmann SPR multilayer simulator and design optimizer")]
pub struct Cli {
    /// Directory of `<id>.csv` optical-constant tables (overrides the bundled ones)
    #[arg(long, global = true, env = MATERIALS_ENV, value_name = "DIR")]
    pub materials: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Angular p-polarized reflectance curve as CSV
    Simulate(SimulateArgs),
    /// Resonance angle, dip depth, FWHM, sensitivity and FoM as JSON
    Metrics(MetricsArgs),
    /// Metrics over a grid of one stack parameter
    Sweep(SweepArgs),
    /// Grid sweep followed by golden-section refinement of the best cell
    Optimize(OptimizeArgs),
    /// |H_y| depth profile through the stack as CSV
    Field(FieldArgs),
    /// Built-in benchmark configurations
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// The six published metal/2D-material configurations
    Table1(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct StackArg {
    /// Stack document (JSON)
    #[arg(long, value_name = "FILE")]
    pub stack: PathBuf,
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    /// Lower edge of the angular window, deg [default: critical angle - 2]
    #[arg(long, allow_negative_numbers = true)]
    pub theta_min: Option<f64>,
    /// Upper edge of the angular window, deg [default: 89]
    #[arg(long, allow_negative_numbers = true)]
    pub theta_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    #[command(flatten)]
    pub window: WindowArgs,
    /// Angular sampling step for dip finding, deg
    #[arg(long, default_value_t = metrics::DEFAULT_STEP_DEG, allow_negative_numbers = true)]
    pub angle_step: f64,
    /// Analyte index step for the central-difference sensitivity, RIU
    #[arg(long, default_value_t = metrics::DEFAULT_DELTA_N, allow_negative_numbers = true)]
    pub delta_n: f64,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output file [default: standard output]
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub stack: StackArg,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Angular step, deg
    #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
    pub step: f64,
    /// Worker threads [default: all cores]
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[command(flatten)]
    pub stack: StackArg,
    #[command(flatten)]
    pub metrics: MetricArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Swept quantity: `layer:<i>:thickness` (nm) or `sensing_index`
    #[arg(long, value_parser = parse_target)]
    pub param: Target,
    #[arg(long, allow_negative_numbers = true)]
    pub lo: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub hi: f64,
    /// Grid spacing of the swept quantity
    #[arg(long, allow_negative_numbers = true)]
    pub step: f64,
    /// Selection criterion
    #[arg(long, default_value = "fom", value_parser = parse_objective)]
    pub objective: Objective,
    /// Worker threads [default: all cores]
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub stack: StackArg,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub metrics: MetricArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub stack: StackArg,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub metrics: MetricArgs,
    /// Stop refining once the bracket is narrower than this
    #[arg(long, default_value_t = RefineOptions::default().tolerance, allow_negative_numbers = true)]
    pub tolerance: f64,
    #[arg(long, default_value_t = RefineOptions::default().max_iterations)]
    pub max_iterations: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    #[command(flatten)]
    pub stack: StackArg,
    /// Incidence angle, deg [default: the resonance angle]
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Depth sampling step, nm
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub resolution: f64,
    #[command(flatten)]
    pub metrics: MetricArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub metrics: MetricArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads [default: all cores]
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub out: OutArgs,
}

fn parse_target(s: &str) -> Result<Target, String> {
    if s == "sensing_index" {
        return Ok(Target::SensingIndex);
    }
    s.strip_prefix("layer:")
        .and_then(|rest| rest.strip_suffix(":thickness"))
        .and_then(|i| i.parse().ok())
        .map(Target::LayerThickness)
        .ok_or_else(|| format!("`{s}` is not `layer:<i>:thickness` or `sensing_index`"))
}

fn parse_objective(s: &str) -> Result<Objective, String> {
    Objective::from_name(s).ok_or_else(|| {
        let names: Vec<_> = Objective::ALL.iter().map(|o| o.name()).collect();
        format!("unknown objective `{s}` (expected one of {})", names.join(", "))
    })
}

impl WindowArgs {
    /// Explicit window, filling an omitted edge from the default window.
    fn resolve(&self, stack: &Stack) -> Result<Option<SweepWindow>> {
        if self.theta_min.is_none() && self.theta_max.is_none() {
            return Ok(None);
        }
        let theta_min = match self.theta_min {
            Some(t) => t,
            None => (estimate_resonance_angle(stack.prism_index(), stack.sensing_index())?
                - metrics::WINDOW_MARGIN_DEG)
                .max(0.0),
        };
        let theta_max = self.theta_max.unwrap_or(metrics::WINDOW_MAX_DEG);
        Ok(Some(SweepWindow { theta_min, theta_max }))
    }
}

impl MetricArgs {
    fn config(&self, stack: &Stack) -> Result<MetricsConfig> {
        Ok(MetricsConfig {
            window: self.window.resolve(stack)?,
            step_deg: self.angle_step,
            delta_n: self.delta_n,
        })
    }
}

fn load_stack(arg: &StackArg, catalog: &Catalog) -> Result<Stack> {
    let text = std::fs::read_to_string(&arg.stack).with_context(|| format!("reading {}", arg.stack.display()))?;
    parse_stack_config(&text, catalog).with_context(|| arg.stack.display().to_string())
}

fn emit(out: &OutArgs, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match &out.out {
        Some(path) => write_file(path, text),
        None => stdout.write_all(text.as_bytes()).context("writing standard output"),
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn workers<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == Some(0) {
        bail!("--threads must be at least 1");
    }
    with_workers(threads, f).context("starting worker pool")
}

fn grid_spec(grid: &GridArgs) -> Result<ParameterSpec> {
    Ok(ParameterSpec::new(grid.param, grid.lo, grid.hi, grid.step)?)
}

/// Runs a parsed command line, writing results to `stdout` or `--out` files
/// and notes to `stderr`.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let catalog = cli.materials.map(Catalog::with_dir).unwrap_or_default();
    match cli.command {
        Command::Simulate(args) => {
            let stack = load_stack(&args.stack, &catalog)?;
            let config = MetricsConfig {
                window: args.window.resolve(&stack)?,
                step_deg: args.step,
                ..MetricsConfig::default()
            };
            let grid = config.grid(stack.prism_index(), stack.sensing_index())?;
            let ml = stack.multilayer()?;
            let curve = workers(args.threads, || par_sweep_grid(&ml, &grid))?;
            emit(&args.out, &formats::curve_csv(&curve), stdout)
        }
        Command::Metrics(args) => {
            let stack = load_stack(&args.stack, &catalog)?;
            let m = metrics::full_metrics(&stack, &args.metrics.config(&stack)?)?;
            emit(&args.out, &formats::metrics_json(&m), stdout)
        }
        Command::Sweep(args) => {
            let stack = load_stack(&args.stack, &catalog)?;
            let spec = grid_spec(&args.grid)?;
            let config = args.metrics.config(&stack)?;
            let sweep = workers(args.grid.threads, || {
                par_sweep_parameter(&stack, &spec, args.grid.objective, &config)
            })??;
            let text = match args.format {
                Format::Csv => formats::sweep_csv(&sweep),
                Format::Json => formats::sweep_json(&sweep),
            };
            emit(&args.out, &text, stdout)
        }
        Command::Optimize(args) => {
            let stack = load_stack(&args.stack, &catalog)?;
            let spec = grid_spec(&args.grid)?;
            let config = args.metrics.config(&stack)?;
            if !(args.tolerance.is_finite() && args.tolerance > 0.0) {
                bail!("--tolerance must be positive, got {}", args.tolerance);
            }
            let options = RefineOptions {
                tolerance: args.tolerance,
                max_iterations: args.max_iterations,
            };
            let sweep = workers(args.grid.threads, || {
                par_sweep_parameter(&stack, &spec, args.grid.objective, &config)
            })??;
            let refined = refine_sweep(&stack, &sweep, &config, &options)?;
            let (grid_value, grid_metrics) = refined.grid.best_point();
            let doc = serde_json::json!({
                "target": spec.target.to_string(),
                "objective": sweep.objective.name(),
                "value": refined.value,
                "metrics": MetricsRecord::from(&refined.metrics),
                "grid_value": grid_value,
                "grid_metrics": MetricsRecord::from(grid_metrics),
            });
            emit(&args.out, &format!("{doc:#}\n"), stdout)
        }
        Command::Field(args) => {
            let stack = load_stack(&args.stack, &catalog)?;
            let ml = stack.multilayer()?;
            let theta = match args.theta {
                Some(t) => t,
                None => {
                    let config = args.metrics.config(&stack)?;
                    let grid = config.grid(stack.prism_index(), stack.sensing_index())?;
                    metrics::resonance_dip(&ml, &grid)?.1.theta_deg
                }
            };
            if !(0.0..90.0).contains(&theta) {
                bail!("incidence angle {theta} deg is outside [0, 90)");
            }
            let profile = field_profile(&ml, theta, args.resolution)?;
            writeln!(
                stderr,
                "spr: field at {theta} deg, z from -{FIELD_DEPTH_INTO_PRISM_NM} to {} nm",
                ml.total_thickness_nm() + FIELD_DEPTH_INTO_MEDIUM_NM
            )?;
            emit(&args.out, &formats::field_csv(&profile), stdout)
        }
        Command::Bench(BenchCommand::Table1(args)) => bench_table1(&args, &catalog, stdout, stderr),
    }
}

/// Builds the six benchmark stacks from `catalog`.
pub fn table1_stacks(catalog: &Catalog) -> Result<Vec<(String, Stack)>> {
    let mut ids = vec!["bk7"];
    for row in &PUBLISHED {
        ids.extend(table1::recipe(row.name).unwrap_or_default().into_iter().map(|(id, _)| id));
    }
    let mut resolved = HashMap::new();
    for id in ids {
        if !resolved.contains_key(id) {
            resolved.insert(id, catalog.resolve(id)?);
        }
    }
    Ok(table1::stacks_with(|id| {
        resolved.get(id).cloned().ok_or_else(|| BenchError::MissingMaterial(id.into()))
    })?)
}

/// Conditions every benchmark row must meet: a bracketed dip beyond the
/// critical-angle bound and `fom == sensitivity / fwhm`. Returns one message
/// per violation.
pub fn bench_violations(stacks: &[(String, Stack)], rows: &[ComparisonRow]) -> Vec<String> {
    let mut bad = Vec::new();
    for ((_, stack), row) in stacks.iter().zip(rows) {
        match &row.outcome {
            Err(e) => bad.push(format!("{}: {e}", row.name)),
            Ok(m) => {
                match estimate_resonance_angle(stack.prism_index(), stack.sensing_index()) {
                    Ok(bound) if m.theta_spr > bound => {}
                    Ok(bound) => bad.push(format!("{}: theta_spr {} not above {bound}", row.name, m.theta_spr)),
                    Err(e) => bad.push(format!("{}: {e}", row.name)),
                }
                if m.fom != m.sensitivity / m.fwhm {
                    bad.push(format!("{}: fom {} != sensitivity / fwhm", row.name, m.fom));
                }
            }
        }
    }
    bad
}

fn bench_table1(args: &BenchArgs, catalog: &Catalog, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let stacks = table1_stacks(catalog)?;
    // all six share prism and analyte, so the first stack fixes the window
    let config = args.metrics.config(&stacks[0].1)?;
    let rows = workers(args.threads, || par_compare(&stacks, &config))?;
    let text = match args.format {
        Format::Csv => formats::bench_csv(&rows, &PUBLISHED),
        Format::Json => formats::bench_json(&rows, &PUBLISHED),
    };
    writeln!(stderr, "spr: {BENCH_LABEL}")?;
    emit(&args.out, &text, stdout)?;
    let bad = bench_violations(&stacks, &rows);
    if !bad.is_empty() {
        bail!("benchmark check failed: {}", bad.join("; "));
    }
    Ok(())
}

/// Folds a clap error into one line, dropping the usage and help hints.
fn usage_error_line(e: &clap::Error) -> String {
    if e.kind() == clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
        return "error: a subcommand is required (see --help)".into();
    }
    let text = e.to_string();
    let parts: Vec<&str> = text
        .lines()
        .map(str::trim)
        .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
        .filter(|l| !l.is_empty() && !l.starts_with("tip:"))
        .collect();
    if parts.is_empty() {
        "error: invalid arguments".into()
    } else {
        parts.join(" ")
    }
}

/// Parses `args`, runs the command and returns the process exit status.
/// Failures print exactly one line to `stderr`.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = write!(stdout, "{e}");
            return 0;
        }
        Err(e) => {
            let _ = writeln!(stderr, "spr: {}", usage_error_line(&e));
            return 2;
        }
    };
    match run(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let msg = format!("{e:#}").replace(['\n', '\r'], " ");
            let _ = writeln!(stderr, "spr: error: {msg}");
            1
        }
    }
}

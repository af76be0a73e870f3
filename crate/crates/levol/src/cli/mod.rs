//! Command-line interface: `gen | edge | ftle | ridges | compare | bench |
//! info`.
//!
//! Exit codes: 0 on success, 1 on usage errors (reported to stderr with
//! the offending flag named), 2 on data errors.

mod config;

pub use config::RunConfig;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::edge::{edge_strength_field, EdgeField, ScalarField};
use crate::error::Error;
use crate::flows::{attach_scalar, rasterize_flow, AnalyticFlow, ScalarGenSpec};
use crate::ftle::ftle_field;
use crate::grid::{GridSpec, MultifieldDataset, TimeAxis};
use crate::integrate::{BoundaryPolicy, IntegrationConfig};
use crate::io::volume::{field_path, read_volume, write_volume, FieldKind, VolumeHeader};
use crate::io::{load_dataset, read_ridges_csv, save_dataset, write_heatmap_pgm, write_ridges_csv};
use crate::lift::{feature_field, FeatureField, MomentSpec};
use crate::ridge::{extract_ridges, ridge_dissimilarity, ridge_set_distance, RidgeParams};

use self::config::{moments_string, parse_moments};

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            // configuration problems are usage errors at the CLI surface
            Error::InvalidConfig(_) => CliError::Usage(e.to_string()),
            other => CliError::Data(other),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Parser)]
#[command(
    name = "levol",
    version,
    about = "Hybrid Lagrangian-Eulerian edge-strength fields for multifield flow datasets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an analytic dataset, or wrap a raw float32 file in a volume header
    Gen(GenArgs),
    /// Compute the edge-strength field of the lifted-trajectory moments
    Edge(EdgeArgs),
    /// Compute the FTLE baseline field
    Ftle(FtleArgs),
    /// Extract ridge lines from a single-frame 2D scalar volume
    Ridges(RidgesArgs),
    /// Compare two ridge CSV files
    Compare(CompareArgs),
    /// Time the edge and FTLE pipelines, or sweep moment orders
    Bench(BenchArgs),
    /// Print volume header metadata
    Info(InfoArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Analytic flow: uniform | rotation | saddle | double_gyre
    #[arg(long)]
    flow: Option<String>,
    /// Grid nodes per axis, e.g. 256x128
    #[arg(long)]
    dims: Option<String>,
    /// Node spacing per axis, e.g. 0.0078125,0.0078125 (double_gyre
    /// defaults to spanning [0,2]x[0,1])
    #[arg(long)]
    spacing: Option<String>,
    /// Physical position of node (0,0), e.g. 0,0
    #[arg(long, allow_hyphen_values = true)]
    origin: Option<String>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t_start: f64,
    #[arg(long, default_value_t = 0.1)]
    t_step: f64,
    /// Number of stored time frames
    #[arg(long)]
    frames: Option<usize>,
    /// Uniform flow x-velocity
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    u: f64,
    /// Uniform flow y-velocity
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    w: f64,
    /// Angular rate (rotation, double_gyre)
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    /// Stretch rate (saddle)
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    lambda: f64,
    /// Double gyre amplitude A
    #[arg(long, default_value_t = 0.1)]
    amplitude: f64,
    /// Double gyre perturbation epsilon
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    /// Scalar generator spec, repeatable; e.g.
    /// "name=tracer,kind=advected,init=gaussian,cx=1,cy=0.5,sigma=0.35,amp=1,tref=5,max_step=0.1"
    #[arg(long = "scalar")]
    scalars: Vec<String>,
    /// Wrap an existing raw little-endian float32 file instead
    #[arg(long)]
    from_raw: Option<PathBuf>,
    /// Field kind for --from-raw: scalar | vector2 | vector3
    #[arg(long)]
    kind: Option<String>,
    /// Field name for --from-raw
    #[arg(long)]
    name: Option<String>,
    /// Output dataset prefix (or output file for --from-raw)
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Default)]
struct PipelineFlags {
    /// Dataset prefix written by gen
    #[arg(long)]
    dataset: Option<String>,
    /// Trajectory start time
    #[arg(long, allow_negative_numbers = true)]
    t0: Option<f64>,
    /// Signed integration duration (negative = backward)
    #[arg(long = "T", allow_negative_numbers = true)]
    duration: Option<f64>,
    /// Number of trajectory sample intervals
    #[arg(long = "M")]
    intervals: Option<usize>,
    /// Runge-Kutta substeps per sample interval
    #[arg(long)]
    substeps: Option<usize>,
    /// Boundary policy: freeze | truncate
    #[arg(long)]
    boundary: Option<String>,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    threads: Option<usize>,
    /// Read defaults from a key=value config file (flags override it)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the merged effective configuration to this file
    #[arg(long)]
    dump_config: Option<PathBuf>,
}

#[derive(Args)]
struct EdgeArgs {
    #[command(flatten)]
    pipeline: PipelineFlags,
    /// Moment orders, e.g. 1,2
    #[arg(long)]
    moments: Option<String>,
    /// Lift spatial coordinates alongside the scalar attributes
    #[arg(long)]
    include_space: bool,
    /// Standardize feature channels before the gradient fit
    #[arg(long)]
    normalize: bool,
    /// Output volume path
    #[arg(long)]
    out: Option<String>,
    /// Also write a 16-bit PGM heatmap
    #[arg(long)]
    pgm: Option<String>,
}

#[derive(Args)]
struct FtleArgs {
    #[command(flatten)]
    pipeline: PipelineFlags,
    /// Output volume path
    #[arg(long)]
    out: Option<String>,
    /// Also write a 16-bit PGM heatmap
    #[arg(long)]
    pgm: Option<String>,
}

#[derive(Args)]
struct RidgesArgs {
    /// Input single-frame 2D scalar volume
    #[arg(long)]
    field: Option<String>,
    /// Gaussian pre-smoothing scale in physical units (default: one grid
    /// spacing)
    #[arg(long)]
    sigma: Option<f64>,
    /// Minimum field value at a ridge point
    #[arg(long, allow_negative_numbers = true)]
    strength_min: Option<f64>,
    /// Maximum minor Hessian eigenvalue at a ridge point (<= 0)
    #[arg(long, allow_negative_numbers = true)]
    eig_max: Option<f64>,
    /// Drop polylines with fewer vertices
    #[arg(long)]
    min_vertices: Option<usize>,
    /// Output CSV path
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dump_config: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// First ridge CSV
    a: PathBuf,
    /// Second ridge CSV
    b: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    pipeline: PipelineFlags,
    /// Moment orders for the edge pipeline
    #[arg(long)]
    moments: Option<String>,
    /// Timing repetitions per pipeline
    #[arg(long)]
    reps: Option<usize>,
    /// Run the moment-order ablation sweep instead of timing
    #[arg(long)]
    ablation: bool,
    /// Output prefix for ablation volumes and report
    #[arg(long)]
    out: Option<String>,
    /// Ridge smoothing for the ablation report
    #[arg(long)]
    sigma: Option<f64>,
    /// Minimum ridge vertex count for the ablation report
    #[arg(long)]
    min_vertices: Option<usize>,
}

#[derive(Args)]
struct InfoArgs {
    /// Volume file
    file: PathBuf,
    /// Also scan the body for min/max/mean
    #[arg(long)]
    stats: bool,
}

/// Entry point used by the `levol` binary.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let outcome = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Edge(args) => cmd_edge(args),
        Command::Ftle(args) => cmd_ftle(args),
        Command::Ridges(args) => cmd_ridges(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Info(args) => cmd_info(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn thread_pool(threads: Option<usize>) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| usage(format!("--threads: {e}")))
}

fn require<T>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| usage(format!("missing required flag {flag}")))
}

// ---------------------------------------------------------------- gen

fn parse_dims(s: &str) -> CliResult<Vec<usize>> {
    let parts: Vec<&str> = s.split('x').collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(usage(format!("--dims '{s}': expected AxB or AxBxC")));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<usize>()
                .map_err(|e| usage(format!("--dims '{s}': {e}")))
        })
        .collect()
}

fn parse_floats(flag: &str, s: &str, want: usize) -> CliResult<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| usage(format!("{flag} '{s}': {e}")))
        })
        .collect::<CliResult<_>>()?;
    if v.len() != want {
        return Err(usage(format!(
            "{flag} '{s}': expected {want} comma-separated values"
        )));
    }
    Ok(v)
}

fn parse_flow(args: &GenArgs) -> CliResult<AnalyticFlow> {
    let name = args.flow.as_deref().unwrap_or_default();
    Ok(match name {
        "uniform" => AnalyticFlow::Uniform {
            u: args.u,
            w: args.w,
        },
        "rotation" => AnalyticFlow::Rotation {
            omega: args.omega.unwrap_or(1.0),
        },
        "saddle" => AnalyticFlow::Saddle {
            lambda: args.lambda,
        },
        "double_gyre" => AnalyticFlow::DoubleGyre {
            amplitude: args.amplitude,
            epsilon: args.epsilon,
            omega: args.omega.unwrap_or(2.0 * std::f64::consts::PI / 10.0),
        },
        other => {
            return Err(usage(format!(
                "--flow '{other}': expected uniform | rotation | saddle | double_gyre"
            )))
        }
    })
}

fn parse_scalar_spec(flow: &AnalyticFlow, s: &str) -> CliResult<(String, ScalarGenSpec)> {
    let mut map = std::collections::BTreeMap::new();
    for part in s.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| usage(format!("--scalar '{s}': '{part}' is not key=value")))?;
        if map
            .insert(k.trim().to_string(), v.trim().to_string())
            .is_some()
        {
            return Err(usage(format!("--scalar '{s}': duplicate key '{k}'")));
        }
    }
    let num = |k: &str, default: Option<f64>| -> CliResult<f64> {
        match map.get(k) {
            Some(v) => v
                .parse::<f64>()
                .map_err(|e| usage(format!("--scalar key {k}='{v}': {e}"))),
            None => default.ok_or_else(|| usage(format!("--scalar '{s}': missing key '{k}'"))),
        }
    };
    let pointwise = |kind: &str| -> CliResult<ScalarGenSpec> {
        Ok(match kind {
            "constant" => ScalarGenSpec::Constant {
                value: num("value", None)?,
            },
            "linear" => ScalarGenSpec::Linear {
                gradient: [num("gx", None)?, num("gy", None)?],
                offset: num("offset", Some(0.0))?,
            },
            "gaussian" | "gaussian_blob" => ScalarGenSpec::GaussianBlob {
                center: [num("cx", None)?, num("cy", None)?],
                sigma: num("sigma", None)?,
                amplitude: num("amp", Some(1.0))?,
            },
            "stream" | "stream_function" => ScalarGenSpec::StreamFunction { flow: flow.clone() },
            other => {
                return Err(usage(format!(
                    "--scalar kind '{other}': expected constant | linear | gaussian | stream | advected"
                )))
            }
        })
    };
    let kind = map
        .get("kind")
        .cloned()
        .ok_or_else(|| usage(format!("--scalar '{s}': missing key 'kind'")))?;
    let spec = if kind == "advected" {
        let init_kind = map
            .get("init")
            .cloned()
            .ok_or_else(|| usage(format!("--scalar '{s}': advected needs 'init'")))?;
        let initial = pointwise(&init_kind)?;
        ScalarGenSpec::Advected {
            initial: Box::new(initial),
            t_ref: num("tref", None)?,
            max_step: num("max_step", Some(0.05))?,
        }
    } else {
        pointwise(&kind)?
    };
    let name = map
        .get("name")
        .cloned()
        .ok_or_else(|| usage(format!("--scalar '{s}': missing key 'name'")))?;
    Ok((name, spec))
}

fn cmd_gen(args: GenArgs) -> CliResult<()> {
    if let Some(raw) = &args.from_raw {
        return gen_from_raw(&args, raw.clone());
    }
    let flow = parse_flow(&args)?;
    let dims = parse_dims(require(args.dims.as_deref(), "--dims")?)?;
    if dims.len() != 2 {
        return Err(usage("--dims: analytic flows are two-dimensional (AxB)"));
    }
    let spacing = match &args.spacing {
        Some(s) => parse_floats("--spacing", s, 2)?,
        None => match flow {
            AnalyticFlow::DoubleGyre { .. } => {
                vec![2.0 / (dims[0] - 1) as f64, 1.0 / (dims[1] - 1) as f64]
            }
            _ => vec![1.0, 1.0],
        },
    };
    let origin = match &args.origin {
        Some(s) => parse_floats("--origin", s, 2)?,
        None => vec![0.0, 0.0],
    };
    let frames = require(args.frames, "--frames")?;
    let grid = GridSpec::new_2d(
        [dims[0], dims[1]],
        [spacing[0], spacing[1]],
        [origin[0], origin[1]],
    )?;
    let time = TimeAxis::new(args.t_start, args.t_step, frames)?;
    let out = PathBuf::from(require(args.out.clone(), "--out")?);

    let pool = thread_pool(args.threads)?;
    let ds = pool.install(|| -> CliResult<MultifieldDataset> {
        let mut ds = rasterize_flow(&flow, &grid, &time);
        for spec_str in &args.scalars {
            let (name, spec) = parse_scalar_spec(&flow, spec_str)?;
            ds = attach_scalar(ds, &spec, &name)?;
        }
        Ok(ds)
    })?;
    let paths = save_dataset(&out, &ds)?;
    for p in paths {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn gen_from_raw(args: &GenArgs, raw: PathBuf) -> CliResult<()> {
    let dims = parse_dims(require(args.dims.as_deref(), "--dims")?)?;
    let spacing = match &args.spacing {
        Some(s) => parse_floats("--spacing", s, dims.len())?,
        None => vec![1.0; dims.len()],
    };
    let origin = match &args.origin {
        Some(s) => parse_floats("--origin", s, dims.len())?,
        None => vec![0.0; dims.len()],
    };
    let grid = match dims.len() {
        2 => GridSpec::new_2d(
            [dims[0], dims[1]],
            [spacing[0], spacing[1]],
            [origin[0], origin[1]],
        )?,
        _ => GridSpec::new_3d(
            [dims[0], dims[1], dims[2]],
            [spacing[0], spacing[1], spacing[2]],
            [origin[0], origin[1], origin[2]],
        )?,
    };
    let frames = require(args.frames, "--frames")?;
    let time = TimeAxis::new(args.t_start, args.t_step, frames)?;
    let kind = match require(args.kind.as_deref(), "--kind")? {
        "scalar" => FieldKind::Scalar,
        "vector2" => FieldKind::Vector(2),
        "vector3" => FieldKind::Vector(3),
        other => {
            return Err(usage(format!(
                "--kind '{other}': expected scalar | vector2 | vector3"
            )))
        }
    };
    let name = require(args.name.clone(), "--name")?;
    let out = PathBuf::from(require(args.out.clone(), "--out")?);
    let header = VolumeHeader {
        grid,
        time,
        kind,
        name,
    };
    let bytes = std::fs::read(&raw).map_err(|e| Error::io(&raw, e))?;
    let expected = header.value_count() * 4;
    if bytes.len() != expected {
        return Err(CliError::Data(Error::SizeMismatch {
            path: raw,
            expected,
            actual: bytes.len(),
        }));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64)
        .collect();
    write_volume(&out, &header, &values)?;
    println!("wrote {}", out.display());
    Ok(())
}

// ------------------------------------------------------- edge / ftle

fn merged_config(flags: &PipelineFlags, extra: RunConfig) -> CliResult<RunConfig> {
    let base = match &flags.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    let boundary = match flags.boundary.as_deref() {
        Some(s) => Some(
            BoundaryPolicy::parse(s)
                .ok_or_else(|| usage(format!("--boundary '{s}': expected freeze | truncate")))?,
        ),
        None => None,
    };
    let from_flags = RunConfig {
        dataset: flags.dataset.clone(),
        t0: flags.t0,
        duration: flags.duration,
        intervals: flags.intervals,
        substeps: flags.substeps,
        boundary,
        threads: flags.threads,
        ..extra
    };
    Ok(base.merged_with(from_flags))
}

fn integration_config(cfg: &RunConfig) -> CliResult<IntegrationConfig> {
    Ok(IntegrationConfig {
        t0: require(cfg.t0, "--t0")?,
        duration: require(cfg.duration, "--T")?,
        intervals: require(cfg.intervals, "--M")?,
        substeps: cfg.substeps.unwrap_or(1),
        boundary: cfg.boundary.unwrap_or_default(),
    })
}

fn resolved_moments(cfg: &RunConfig) -> CliResult<MomentSpec> {
    match &cfg.moments {
        Some(orders) => Ok(MomentSpec::new(orders, false)?),
        None => Ok(MomentSpec::mean_and_variance()),
    }
}

fn write_scalar_outputs(
    field: &ScalarField,
    name: &str,
    t0: f64,
    out: &str,
    pgm: Option<&str>,
) -> CliResult<()> {
    let header = VolumeHeader {
        grid: field.grid.clone(),
        time: TimeAxis::new(t0, 1.0, 1)?,
        kind: FieldKind::Scalar,
        name: name.into(),
    };
    write_volume(Path::new(out), &header, &field.values)?;
    println!("wrote {out}");
    if let Some(pgm_path) = pgm {
        let (min, max) = field.min_max();
        write_heatmap_pgm(Path::new(pgm_path), field, min, max)?;
        println!("wrote {pgm_path}");
    }
    Ok(())
}

fn edge_pipeline(
    ds: &MultifieldDataset,
    cfg: &IntegrationConfig,
    spec: &MomentSpec,
    include_space: bool,
    normalize: bool,
) -> crate::error::Result<(FeatureField, EdgeField)> {
    let mut ff = feature_field(ds, cfg, spec, include_space)?;
    if normalize {
        ff.standardize();
    }
    let edge = edge_strength_field(&ff)?;
    Ok((ff, edge))
}

fn cmd_edge(args: EdgeArgs) -> CliResult<()> {
    let moments = match args.moments.as_deref() {
        Some(s) => Some(parse_moments(s)?),
        None => None,
    };
    let extra = RunConfig {
        moments,
        include_space: args.include_space.then_some(true),
        normalize: args.normalize.then_some(true),
        out: args.out.clone(),
        pgm: args.pgm.clone(),
        ..Default::default()
    };
    let cfg = merged_config(&args.pipeline, extra)?;
    let icfg = integration_config(&cfg)?;
    let spec = resolved_moments(&cfg)?;
    let dataset = require(cfg.dataset.clone(), "--dataset")?;
    let out = require(cfg.out.clone(), "--out")?;
    if let Some(dump) = &args.pipeline.dump_config {
        let mut effective = cfg.clone();
        effective.moments = Some(spec.orders().to_vec());
        effective.substeps = Some(icfg.substeps);
        effective.boundary = Some(icfg.boundary);
        effective.include_space = Some(cfg.include_space.unwrap_or(false));
        effective.normalize = Some(cfg.normalize.unwrap_or(false));
        effective.dump(dump)?;
    }
    let ds = load_dataset(Path::new(&dataset))?;
    let pool = thread_pool(cfg.threads)?;
    let (_, edge) = pool.install(|| {
        edge_pipeline(
            &ds,
            &icfg,
            &spec,
            cfg.include_space.unwrap_or(false),
            cfg.normalize.unwrap_or(false),
        )
    })?;
    write_scalar_outputs(
        &edge.field,
        "edge_strength",
        icfg.t0,
        &out,
        cfg.pgm.as_deref(),
    )
}

fn cmd_ftle(args: FtleArgs) -> CliResult<()> {
    let extra = RunConfig {
        out: args.out.clone(),
        pgm: args.pgm.clone(),
        ..Default::default()
    };
    let cfg = merged_config(&args.pipeline, extra)?;
    let icfg = integration_config(&cfg)?;
    let dataset = require(cfg.dataset.clone(), "--dataset")?;
    let out = require(cfg.out.clone(), "--out")?;
    if let Some(dump) = &args.pipeline.dump_config {
        let mut effective = cfg.clone();
        effective.substeps = Some(icfg.substeps);
        effective.boundary = Some(icfg.boundary);
        effective.dump(dump)?;
    }
    let ds = load_dataset(Path::new(&dataset))?;
    let pool = thread_pool(cfg.threads)?;
    let ftle = pool.install(|| ftle_field(&ds, &icfg))?;
    write_scalar_outputs(&ftle.field, "ftle", icfg.t0, &out, cfg.pgm.as_deref())
}

// ------------------------------------------------------------ ridges

fn load_scalar_frame(path: &Path) -> CliResult<ScalarField> {
    let (header, values) = read_volume(path)?;
    if header.kind != FieldKind::Scalar {
        return Err(CliError::Data(Error::invalid_data(
            "ridge input",
            format!("{} stores a vector field", path.display()),
        )));
    }
    if header.time.frame_count() != 1 {
        return Err(CliError::Data(Error::invalid_data(
            "ridge input",
            format!(
                "{} has {} frames, expected a single-frame field",
                path.display(),
                header.time.frame_count()
            ),
        )));
    }
    Ok(ScalarField::new(header.grid, values))
}

fn cmd_ridges(args: RidgesArgs) -> CliResult<()> {
    let base = match &args.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    let cfg = base.merged_with(RunConfig {
        field: args.field.clone(),
        sigma: args.sigma,
        strength_min: args.strength_min,
        eig_max: args.eig_max,
        min_vertices: args.min_vertices,
        out: args.out.clone(),
        ..Default::default()
    });
    let field_file = require(cfg.field.clone(), "--field")?;
    let out = require(cfg.out.clone(), "--out")?;
    let field = load_scalar_frame(Path::new(&field_file))?;
    let params = RidgeParams {
        smoothing_sigma: cfg.sigma.unwrap_or(field.grid.spacing()[0]),
        strength_threshold: cfg.strength_min.unwrap_or(0.0),
        eigenvalue_threshold: cfg.eig_max.unwrap_or(0.0),
        min_vertices: cfg.min_vertices.unwrap_or(2),
    };
    if let Some(dump) = &args.dump_config {
        let mut effective = cfg.clone();
        effective.sigma = Some(params.smoothing_sigma);
        effective.strength_min = Some(params.strength_threshold);
        effective.eig_max = Some(params.eigenvalue_threshold);
        effective.min_vertices = Some(params.min_vertices);
        effective.dump(dump)?;
    }
    let lines = extract_ridges(&field, &params)?;
    write_ridges_csv(Path::new(&out), &lines)?;
    let vertices: usize = lines.iter().map(|l| l.vertices.len()).sum();
    println!("wrote {out} ({} lines, {} vertices)", lines.len(), vertices);
    Ok(())
}

// ----------------------------------------------------------- compare

fn cmd_compare(args: CompareArgs) -> CliResult<()> {
    let a = read_ridges_csv(&args.a)?;
    let b = read_ridges_csv(&args.b)?;
    println!(
        "comparing {} ({} lines) to {} ({} lines)",
        args.a.display(),
        a.len(),
        args.b.display(),
        b.len()
    );
    println!("pair  d_ij");
    for (k, (la, lb)) in a.iter().zip(&b).enumerate() {
        println!("{k:<5} {}", ridge_dissimilarity(la, lb));
    }
    if a.len() != b.len() {
        println!("({} unpaired lines)", a.len().abs_diff(b.len()));
    }
    let d = ridge_set_distance(&a, &b)?;
    println!(
        "set distance a->b: mean={} max={}",
        d.forward.mean, d.forward.max
    );
    println!(
        "set distance b->a: mean={} max={}",
        d.reverse.mean, d.reverse.max
    );
    Ok(())
}

// ------------------------------------------------------------- bench

fn cmd_bench(args: BenchArgs) -> CliResult<()> {
    let moments = match args.moments.as_deref() {
        Some(s) => Some(parse_moments(s)?),
        None => None,
    };
    let extra = RunConfig {
        moments,
        reps: args.reps,
        out: args.out.clone(),
        sigma: args.sigma,
        min_vertices: args.min_vertices,
        ..Default::default()
    };
    let cfg = merged_config(&args.pipeline, extra)?;
    let icfg = integration_config(&cfg)?;
    let dataset = require(cfg.dataset.clone(), "--dataset")?;
    let ds = load_dataset(Path::new(&dataset))?;
    let pool = thread_pool(cfg.threads)?;
    let threads = pool.current_num_threads();
    if args.ablation {
        return ablation_sweep(&ds, &icfg, &cfg, &pool, &dataset);
    }
    let spec = resolved_moments(&cfg)?;
    let reps = cfg.reps.unwrap_or(3);
    if reps == 0 {
        return Err(usage("--reps must be at least 1"));
    }
    println!(
        "bench: dataset={dataset} threads={threads} reps={reps} t0={} T={} M={} substeps={} moments={}",
        icfg.t0,
        icfg.duration,
        icfg.intervals,
        icfg.substeps,
        moments_string(spec.orders()),
    );
    let mut ftle_times = Vec::with_capacity(reps);
    let mut edge_times = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        let f = pool.install(|| ftle_field(&ds, &icfg))?;
        ftle_times.push(start.elapsed().as_secs_f64());
        std::hint::black_box(&f.field.values);

        let start = Instant::now();
        let e = pool.install(|| edge_pipeline(&ds, &icfg, &spec, false, false))?;
        edge_times.push(start.elapsed().as_secs_f64());
        std::hint::black_box(&e.1.field.values);
    }
    let stats = |v: &[f64]| {
        (
            v.iter().sum::<f64>() / v.len() as f64,
            v.iter().copied().fold(f64::INFINITY, f64::min),
        )
    };
    let (ftle_mean, ftle_min) = stats(&ftle_times);
    let (edge_mean, edge_min) = stats(&edge_times);
    println!("ftle_s mean={ftle_mean:.6} min={ftle_min:.6}");
    println!("edge_s mean={edge_mean:.6} min={edge_min:.6}");
    println!("ratio_min={:.6}", edge_min / ftle_min);
    Ok(())
}

/// Moment-order sweep: run the edge pipeline with orders up to 1, 2, 3,
/// and 5, write each field, extract ridges, and write a report.
fn ablation_sweep(
    ds: &MultifieldDataset,
    icfg: &IntegrationConfig,
    cfg: &RunConfig,
    pool: &rayon::ThreadPool,
    dataset: &str,
) -> CliResult<()> {
    let out_prefix = require(cfg.out.clone(), "--out")?;
    let sweeps: [&[u8]; 4] = [&[1], &[1, 2], &[1, 2, 3], &[1, 2, 3, 4, 5]];
    let mut report = String::new();
    report.push_str(&format!(
        "moment-order ablation: dataset={dataset} t0={} T={} M={} substeps={}\n",
        icfg.t0, icfg.duration, icfg.intervals, icfg.substeps
    ));
    for orders in sweeps {
        let spec = MomentSpec::new(orders, false)?;
        let (_, edge) = pool.install(|| edge_pipeline(ds, icfg, &spec, false, false))?;
        let tag = format!(
            "m{}",
            orders.iter().map(|o| o.to_string()).collect::<String>()
        );
        let vol_path = field_path(Path::new(&out_prefix), &tag);
        let header = VolumeHeader {
            grid: edge.field.grid.clone(),
            time: TimeAxis::new(icfg.t0, 1.0, 1)?,
            kind: FieldKind::Scalar,
            name: format!("edge_strength_{tag}"),
        };
        write_volume(&vol_path, &header, &edge.field.values)?;
        let (_, max) = edge.field.min_max();
        // relative strength floor keeps ridge counts meaningful across the
        // differently scaled moment sets
        let params = RidgeParams {
            smoothing_sigma: cfg.sigma.unwrap_or(edge.field.grid.spacing()[0]),
            strength_threshold: 0.3 * max,
            eigenvalue_threshold: 0.0,
            min_vertices: cfg.min_vertices.unwrap_or(8),
        };
        let lines = extract_ridges(&edge.field, &params)?;
        let vertices: usize = lines.iter().map(|l| l.vertices.len()).sum();
        let entry = format!(
            "moments={} volume={} field_max={} strength_min={} ridge_lines={} ridge_vertices={}\n",
            moments_string(orders),
            vol_path.display(),
            max,
            params.strength_threshold,
            lines.len(),
            vertices
        );
        print!("{entry}");
        report.push_str(&entry);
    }
    let report_path = format!("{out_prefix}.report.txt");
    std::fs::write(&report_path, &report).map_err(|e| Error::io(&report_path, e))?;
    println!("wrote {report_path}");
    Ok(())
}

// -------------------------------------------------------------- info

fn cmd_info(args: InfoArgs) -> CliResult<()> {
    let (header, values) = read_volume(&args.file)?;
    let dims = header
        .grid
        .dims()
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(" x ");
    let kind = match header.kind {
        FieldKind::Scalar => "scalar".to_string(),
        FieldKind::Vector(d) => format!("vector {d}"),
    };
    println!("file {}", args.file.display());
    println!("name {}", header.name);
    println!("kind {kind}");
    println!("dims {dims}");
    println!(
        "spacing {}",
        header
            .grid
            .spacing()
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    );
    println!(
        "origin {}",
        header
            .grid
            .origin()
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    );
    println!("frames {}", header.time.frame_count());
    println!(
        "time [{}, {}] step {}",
        header.time.t_start(),
        header.time.t_end(),
        header.time.t_step()
    );
    if args.stats {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for &v in &values {
            min = min.min(v);
            max = max.max(v);
            sum += v;
        }
        println!("min {min}");
        println!("max {max}");
        println!("mean {}", sum / values.len() as f64);
    }
    Ok(())
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cbnorm_core::dilation::{compress_12, dilate};
use cbnorm_core::embedding::{
    coefficient_function, embed, pairing, preadjoint, EmbeddingSample, TraceClassTuple,
};
use cbnorm_core::experiments::{
    cb_gap_experiment, embedding_convergence_experiment, DEFAULT_SCHEDULE,
};
use cbnorm_core::formats::{matrix_from_json, matrix_to_json, measure_from_json};
use cbnorm_core::linalg::{ginibre, ComplexMatrix, C64};
use cbnorm_core::norms::{ball_level_norm, maxl1_level_norm, min_level_norm, sd_norm};
use cbnorm_core::{Error, MatrixMeasure, NormEstimate, OptimizerConfig, Seed};

#[derive(Parser, Debug)]
#[command(
    name = "cbnorm",
    version,
    about = "Completely bounded level norms at finite scale"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// TOML file with optimizer settings (restarts, max_iters, step_size, convergence_tol).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Overrides the configured number of random restarts.
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Matrix level n of the unitary tuples.
    #[arg(long, global = true)]
    level: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Level norms of a matrix measure read from JSON.
    Norm {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = NormKind::All)]
        kind: NormKind,
    },
    /// Block unitary dilation of a contraction read from JSON.
    Dilate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Embed a measure along a sample of unitary tuples and check duality.
    Embed {
        #[arg(long)]
        measure: PathBuf,
        /// Existing sample (versioned JSON); defaults to the standard sampler.
        #[arg(long)]
        sample: Option<PathBuf>,
        /// Append this many Haar tuples to the sample.
        #[arg(long, default_value_t = 0)]
        extend: usize,
        /// Level of the appended tuples (defaults to --level or 2).
        #[arg(long)]
        extend_level: Option<usize>,
        #[arg(long)]
        save_sample: Option<PathBuf>,
    },
    /// Run a seeded experiment and write its report.
    #[command(subcommand)]
    Experiment(Experiment),
}

#[derive(Subcommand, Debug)]
enum Experiment {
    /// Max vs min l1 level norms for Haar-unitary atoms.
    CbGap {
        #[arg(short = 'n', long = "atoms")]
        n: usize,
        #[arg(short = 'p', long)]
        p: usize,
        #[arg(long, default_value_t = 5)]
        trials: usize,
    },
    /// Truncated standard-dual norm along a growing sample.
    EmbeddingConvergence {
        #[arg(short = 'm', long, default_value_t = 3)]
        m: usize,
        #[arg(short = 'p', long, default_value_t = 1)]
        p: usize,
        /// Comma-separated increasing sample sizes.
        #[arg(long, value_delimiter = ',')]
        schedule: Option<Vec<usize>>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum NormKind {
    All,
    Sd,
    Min,
    Ball,
    Max,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(s) => f.write_str(s),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_config(global: &GlobalArgs) -> CliResult<OptimizerConfig> {
    let mut cfg = match &global.config {
        Some(path) => toml::from_str::<OptimizerConfig>(&read(path)?)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
        None => OptimizerConfig::default(),
    };
    if let Some(r) = global.restarts {
        cfg.restarts = r;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(global: &GlobalArgs, text: &str) -> CliResult<()> {
    match &global.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(Error::from)?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct NormOutput {
    level: usize,
    p: usize,
    m: usize,
    triangle_bound: f64,
    estimates: Vec<(String, NormEstimate)>,
}

fn run_norm(global: &GlobalArgs, input: &Path, kind: NormKind) -> CliResult<String> {
    let mu = measure_from_json(&read(input)?)?;
    let cfg = load_config(global)?;
    let level = global.level.unwrap_or(2);
    let seed = Seed(global.seed);
    let want = |k: NormKind| kind == NormKind::All || kind == k;

    let mut estimates = Vec::new();
    if want(NormKind::Min) {
        estimates.push(("min".to_string(), min_level_norm(&mu, &cfg, seed)?));
    }
    if want(NormKind::Max) {
        estimates.push(("max".to_string(), maxl1_level_norm(&mu, level, &cfg, seed)?));
    }
    if want(NormKind::Ball) {
        estimates.push(("ball".to_string(), ball_level_norm(&mu, level, &cfg, seed)?));
    }
    if want(NormKind::Sd) {
        estimates.push(("sd".to_string(), sd_norm(&mu, level, &cfg, seed)?));
    }
    for (_, est) in &estimates {
        est.recertify(&mu)?;
    }
    match global.format {
        Format::Json => to_json(&NormOutput {
            level,
            p: mu.p(),
            m: mu.m(),
            triangle_bound: mu.triangle_bound(),
            estimates,
        }),
        Format::Csv => {
            let mut out = String::from("kind,level,value,restarts_used,converged\n");
            for (k, e) in &estimates {
                out.push_str(&format!(
                    "{k},{},{},{},{}\n",
                    e.level, e.value, e.restarts_used, e.converged
                ));
            }
            Ok(out)
        }
    }
}

#[derive(Serialize)]
struct DilateOutput {
    n: usize,
    source_norm: f64,
    unitarity_residual: f64,
    compression_exact: bool,
    dilation: serde_json::Value,
}

fn run_dilate(global: &GlobalArgs, input: &Path) -> CliResult<String> {
    let a = matrix_from_json(&read(input)?)?;
    let d = dilate(&a)?;
    let out = DilateOutput {
        n: a.rows(),
        source_norm: cbnorm_core::linalg::operator_norm(&d.source),
        unitarity_residual: d.unitarity_residual(),
        compression_exact: compress_12(&d.result)? == d.source,
        dilation: serde_json::from_str(&matrix_to_json(&d.result)?).map_err(Error::from)?,
    };
    match global.format {
        Format::Json => to_json(&out),
        Format::Csv => Ok(format!(
            "n,source_norm,unitarity_residual,compression_exact\n{},{},{},{}\n",
            out.n, out.source_norm, out.unitarity_residual, out.compression_exact
        )),
    }
}

#[derive(Serialize)]
struct EmbedOutput {
    sample_size: usize,
    levels: Vec<usize>,
    truncated_sd_norm: f64,
    block_norms: Vec<f64>,
    point_mass_max_residual: f64,
    duality_max_error: Option<f64>,
    restriction_max_error: f64,
}

fn run_embed(
    global: &GlobalArgs,
    measure: &Path,
    sample_path: Option<&Path>,
    extend: usize,
    extend_level: Option<usize>,
    save: Option<&Path>,
) -> CliResult<String> {
    let mu = measure_from_json(&read(measure)?)?;
    let seed = Seed(global.seed);
    let mut sample = match sample_path {
        Some(p) => EmbeddingSample::from_json(&read(p)?)?,
        None => EmbeddingSample::default_for(mu.m(), seed)?,
    };
    if extend > 0 {
        let n = extend_level.or(global.level).unwrap_or(2);
        sample.extend_haar(n, extend, seed.split(0xE7))?;
    }
    if let Some(path) = save {
        std::fs::write(path, sample.to_json()?)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }

    let x = embed(&sample, &mu)?;
    let block_norms: Vec<f64> = x
        .blocks
        .iter()
        .map(cbnorm_core::linalg::operator_norm)
        .collect();

    let mut point_mass_max_residual = 0.0f64;
    for k in 0..sample.m() {
        let delta = MatrixMeasure::point_mass(sample.m(), k)?;
        for b in embed(&sample, &delta)?.blocks {
            point_mass_max_residual = point_mass_max_residual.max(b.unitarity_residual());
        }
    }

    // random trace-class tuple for the duality and restriction checks
    let mut rng = seed.split(0xD0A1).rng();
    let s = TraceClassTuple {
        entries: sample
            .items()
            .iter()
            .map(|u| ginibre(u.n(), u.n(), &mut rng))
            .collect(),
    };
    let duality_max_error = if mu.p() == 1 {
        let h = preadjoint(&sample, &s)?;
        let lhs = pairing(&x, &s)?;
        let rhs: C64 = mu
            .coeffs()
            .iter()
            .zip(&h)
            .map(|(c, hk)| c[(0, 0)] * hk)
            .sum();
        Some((lhs - rhs).norm())
    } else {
        None
    };

    let dim: usize = sample.levels().iter().sum();
    let xi = ginibre(dim, 1, &mut rng).into_vec();
    let eta = ginibre(dim, 1, &mut rng).into_vec();
    let mut offset = 0;
    let rank_one = TraceClassTuple {
        entries: sample
            .items()
            .iter()
            .map(|u| {
                let n = u.n();
                let xs = &xi[offset..offset + n];
                let es = &eta[offset..offset + n];
                offset += n;
                ComplexMatrix::from_fn(n, n, |i, j| xs[i] * es[j].conj())
            })
            .collect(),
    };
    let h = preadjoint(&sample, &rank_one)?;
    let points: Vec<usize> = (0..sample.m()).collect();
    let coeff = coefficient_function(&sample, &xi, &eta, &points)?;
    let restriction_max_error = h
        .iter()
        .zip(&coeff)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);

    let out = EmbedOutput {
        sample_size: sample.len(),
        levels: sample.levels(),
        truncated_sd_norm: x.norm(),
        block_norms,
        point_mass_max_residual,
        duality_max_error,
        restriction_max_error,
    };
    match global.format {
        Format::Json => to_json(&out),
        Format::Csv => {
            let mut s = String::from("item,level,block_norm\n");
            for (i, (n, v)) in out.levels.iter().zip(&out.block_norms).enumerate() {
                s.push_str(&format!("{i},{n},{v}\n"));
            }
            Ok(s)
        }
    }
}

fn run_experiment(global: &GlobalArgs, exp: &Experiment) -> CliResult<String> {
    let cfg = load_config(global)?;
    let seed = Seed(global.seed);
    match exp {
        Experiment::CbGap { n, p, trials } => {
            let level = global.level.unwrap_or(*p);
            let report = cb_gap_experiment(*n, *p, *trials, level, &cfg, seed)?;
            report.recertify()?;
            match global.format {
                Format::Json => to_json(&report),
                Format::Csv => Ok(report.to_csv()),
            }
        }
        Experiment::EmbeddingConvergence { m, p, schedule } => {
            let schedule = schedule
                .clone()
                .unwrap_or_else(|| DEFAULT_SCHEDULE.to_vec());
            let report = embedding_convergence_experiment(*m, *p, &schedule, &cfg, seed)?;
            report.recertify()?;
            match global.format {
                Format::Json => to_json(&report),
                Format::Csv => Ok(report.to_csv()),
            }
        }
    }
}

fn run(cli: &Cli) -> CliResult<String> {
    let g = &cli.global;
    match &cli.command {
        Command::Norm { input, kind } => run_norm(g, input, *kind),
        Command::Dilate { input } => run_dilate(g, input),
        Command::Embed {
            measure,
            sample,
            extend,
            extend_level,
            save_sample,
        } => run_embed(
            g,
            measure,
            sample.as_deref(),
            *extend,
            *extend_level,
            save_sample.as_deref(),
        ),
        Command::Experiment(exp) => run_experiment(g, exp),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|text| emit(&cli.global, &text)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

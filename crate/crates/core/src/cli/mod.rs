//! Command-line front end.
//!
//! Exit codes: 0 success, 1 an inequality was violated, 2 bad input, 3 no convergence.

pub mod config;
pub mod generators;
pub mod output;
pub mod verify;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::files::{write_json, SignalFile};
use crate::lattice::{ball_tileset, grid_measure, measure};
use crate::operators::{benedicks_constant, dense_op_norm, hs_norm_sq, op_norm, ConcentrationOperator, DenseRule};
use crate::stft::{invert, stft, StftPlan};
use crate::uncertainty::functionals::BALL_QUAD_POINTS;
use crate::uncertainty::{
    ball_measure, heisenberg_constant, lattice_count, local_uncertainty_constant,
    local_uncertainty_corollary_constant, InequalityReport,
};
use config::ExperimentConfig;
use generators::RandomSet;
use verify::{draw_pair, draw_sigma, run_all, TrialSetup};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ztstft", version, about = "Short-time Fourier transform on ℤⁿ × 𝕋ⁿ and uncertainty checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Experiment settings; flags override the config file, which overrides defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON experiment config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Signal box half-width N_f.
    #[arg(long)]
    pub half_width: Option<usize>,
    /// Window box half-width N_g.
    #[arg(long)]
    pub window_half_width: Option<usize>,
    /// Torus points per axis; 0 picks the default.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Root seed; falls back to the config, then ZTSTFT_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// delta, gaussian_sampled(σ), random_complex or a signal file.
    #[arg(long)]
    pub signal: Option<String>,
    /// Window spec, same forms as --signal.
    #[arg(long)]
    pub window: Option<String>,
    /// empty, fiber, box, box(h, width), ball(r, resolution), random or a tile file.
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub resolution: Option<usize>,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($field:ident => $target:ident),*) => {
                $(if let Some(v) = &self.$field { c.$target = v.clone(); })*
            };
        }
        set!(dim => dimension, half_width => half_width, grid => grid, signal => signal,
             window => window, sigma => sigma, s => s, p => p, eps => eps, radius => radius,
             resolution => resolution);
        if self.window_half_width.is_some() {
            c.window_half_width = self.window_half_width;
        }
        if self.seed.is_some() {
            c.seed = self.seed;
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute V_g f and write it as CSV.
    Stft {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value = "stft.csv")]
        out: PathBuf,
        /// Heat map of |V_g f| (one dimension only).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Recover a signal from a transform CSV.
    Invert {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        input: PathBuf,
        /// Dual window; defaults to the analysis window.
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long, default_value = "signal.json")]
        out: PathBuf,
    },
    /// Run randomized inequality checks.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        trials: Option<usize>,
        /// Comma-separated check names.
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        /// Worker threads; 0 uses all cores.
        #[arg(long)]
        jobs: Option<usize>,
        /// Multiply every transform by this factor to exercise failure handling.
        #[arg(long)]
        fault_scale: Option<f64>,
        #[arg(long, default_value = "verify-out")]
        out: PathBuf,
    },
    /// Norms of the concentration operator P_Σ P_g.
    Operator {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Also solve the dense eigenproblem.
        #[arg(long)]
        dense: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Explicit uncertainty constants.
    Constants {
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
        s: Vec<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Lattice-ball counts and phase-space ball measures.
    Count {
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = 16)]
        resolution: usize,
    },
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Stft { common, out, svg } => cmd_stft(&common, &out, svg.as_deref()),
        Command::Invert { common, input, gamma, out } => cmd_invert(&common, &input, gamma.as_deref(), &out),
        Command::Verify { common, trials, checks, jobs, fault_scale, out } => {
            cmd_verify(&common, trials, checks, jobs, fault_scale, &out)
        }
        Command::Operator { common, tol, max_iter, dense, out } => {
            cmd_operator(&common, tol, max_iter, dense, out.as_deref())
        }
        Command::Constants { dim, s, json } => cmd_constants(dim, &s, json),
        Command::Count { dim, radius, resolution } => cmd_count(dim, radius, resolution),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotConverged { .. } => EXIT_NOT_CONVERGED,
        _ => EXIT_INPUT,
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn cmd_stft(common: &CommonArgs, out: &Path, svg: Option<&Path>) -> Result<i32> {
    let cfg = common.resolve()?;
    let setup = TrialSetup::new(&cfg)?;
    let (f, g) = draw_pair(&setup, setup.root_seed)?;
    let field = stft(&f, &g, &setup.plan)?;
    output::write_field_csv(&field, out)?;
    if let Some(path) = svg {
        output::write_field_svg(&field, path)?;
    }
    eprintln!(
        "wrote {} ({} lattice points × {} nodes, M = {})",
        out.display(),
        field.lattice().len(),
        field.grid().len(),
        field.grid().points_per_axis()
    );
    Ok(EXIT_OK)
}

fn cmd_invert(common: &CommonArgs, input: &Path, gamma: Option<&str>, out: &Path) -> Result<i32> {
    let cfg = common.resolve()?;
    let field = output::read_field_csv(input)?;
    if field.dim() != cfg.dimension {
        return Err(Error::InvalidParameter(format!(
            "{}: dimension {} does not match the config dimension {}",
            input.display(),
            field.dim(),
            cfg.dimension
        )));
    }
    let reach = field.lattice().half_width();
    let nf = cfg.half_width;
    if reach < nf {
        return Err(Error::InvalidParameter(format!(
            "{}: lattice half-width {reach} is smaller than the signal half-width {nf}",
            input.display()
        )));
    }
    let ng = reach - nf;
    let plan = StftPlan::with_grid(cfg.dimension, nf, ng, field.grid().points_per_axis())?;
    let mut rng = ChaCha8Rng::seed_from_u64(verify::stream_seed(cfg.resolved_seed()?, "window"));
    let window = generators::parse_signal_spec(&cfg.window)?;
    let g = generators::make_signal(&window, cfg.dimension, ng, &mut rng)?;
    let gamma = match gamma {
        Some(spec) => {
            let mut r = ChaCha8Rng::seed_from_u64(verify::stream_seed(cfg.resolved_seed()?, "gamma"));
            generators::make_signal(&generators::parse_signal_spec(spec)?, cfg.dimension, ng, &mut r)?
        }
        None => g.clone(),
    };
    let f = invert(&field, &g, &gamma, &plan)?;
    write_json(out, &SignalFile::from_signal(&f))?;
    eprintln!("wrote {}", out.display());
    Ok(EXIT_OK)
}

fn cmd_verify(
    common: &CommonArgs,
    trials: Option<usize>,
    checks: Option<Vec<String>>,
    jobs: Option<usize>,
    fault_scale: Option<f64>,
    out: &Path,
) -> Result<i32> {
    let mut cfg = common.resolve()?;
    if let Some(t) = trials {
        cfg.trials = t;
    }
    if let Some(c) = checks {
        cfg.checks = c;
    }
    if let Some(j) = jobs {
        cfg.jobs = j;
    }
    if let Some(s) = fault_scale {
        cfg.fault_scale = s;
    }
    let setup = TrialSetup::new(&cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let outcomes = pool.install(|| run_all(&setup));

    std::fs::create_dir_all(out).map_err(|e| Error::InvalidParameter(format!("{}: {e}", out.display())))?;
    let all: Vec<&InequalityReport> = outcomes.iter().flat_map(|o| &o.reports).collect();
    write_json(&out.join("report.json"), &all)?;
    write_report_csv(&out.join("report.csv"), &all)?;
    let mut resolved = cfg.clone();
    resolved.seed = Some(setup.root_seed);
    write_json(&out.join("config.json"), &resolved)?;

    let mut violated = 0;
    for o in &outcomes {
        println!("{}", o.summary_line());
        for r in o.reports.iter().filter(|r| r.failed()) {
            violated += 1;
            let trial = r.details.get("trial").copied().unwrap_or(0.0) as usize;
            let dir = dump_witness(out, &resolved, r, trial)?;
            eprintln!(
                "violation: {} trial {trial} slack {:.3e}; replay with `ztstft verify --config {}`",
                r.name,
                r.slack,
                dir.join("replay.json").display()
            );
        }
    }
    Ok(if violated > 0 { EXIT_VIOLATED } else { EXIT_OK })
}

fn write_report_csv(path: &Path, reports: &[&InequalityReport]) -> Result<()> {
    let err = |e: csv::Error| Error::InvalidParameter(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    w.write_record(InequalityReport::CSV_HEADER).map_err(err)?;
    for r in reports {
        w.write_record(r.csv_record()).map_err(err)?;
    }
    w.flush().map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))
}

/// Writes the witness inputs of a violated trial and a config that replays it.
fn dump_witness(out: &Path, cfg: &ExperimentConfig, report: &InequalityReport, trial: usize) -> Result<PathBuf> {
    let dir = out.join("witness").join(format!("{}-{trial}", report.name));
    std::fs::create_dir_all(&dir).map_err(|e| Error::InvalidParameter(format!("{}: {e}", dir.display())))?;
    for (name, s) in &report.witness.signals {
        write_json(&dir.join(format!("{name}.json")), s)?;
    }
    for (name, s) in &report.witness.sets {
        write_json(&dir.join(format!("{name}.json")), s)?;
    }
    write_json(&dir.join("params.json"), &report.witness.params)?;
    write_json(&dir.join("report.json"), report)?;
    let replay = ExperimentConfig {
        checks: vec![report.name.clone()],
        trials: 1,
        first_trial: trial,
        jobs: 1,
        ..cfg.clone()
    };
    write_json(&dir.join("replay.json"), &replay)?;
    Ok(dir)
}

#[derive(Debug, Serialize)]
pub struct OperatorSummary {
    pub dimension: usize,
    pub half_width: usize,
    pub window_half_width: usize,
    pub grid: usize,
    pub measure_sigma: f64,
    pub grid_measure_sigma: f64,
    pub hs_norm: f64,
    pub op_norm: f64,
    pub eigenvalue: f64,
    pub iterations: usize,
    pub residual: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub benedicks_constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dense_op_norm: Option<f64>,
}

fn cmd_operator(
    common: &CommonArgs,
    tol: Option<f64>,
    max_iter: Option<usize>,
    dense: bool,
    out: Option<&Path>,
) -> Result<i32> {
    let mut cfg = common.resolve()?;
    if let Some(t) = tol {
        cfg.tol = t;
    }
    if let Some(m) = max_iter {
        cfg.max_iter = m;
    }
    let setup = TrialSetup::new(&cfg)?;
    let (_, g) = draw_pair(&setup, setup.root_seed)?;
    let sigma = draw_sigma(&setup, setup.root_seed, RandomSet::Small)?;
    let op = ConcentrationOperator::new(&g, &sigma, &setup.plan)?;
    let power = op_norm(&op, cfg.tol, cfg.max_iter, setup.root_seed)?;
    let summary = OperatorSummary {
        dimension: cfg.dimension,
        half_width: cfg.half_width,
        window_half_width: cfg.window_half_width(),
        grid: setup.plan.grid().points_per_axis(),
        measure_sigma: measure(&sigma),
        grid_measure_sigma: grid_measure(&sigma, setup.plan.output_box(), setup.plan.grid())?,
        hs_norm: hs_norm_sq(&op).sqrt(),
        op_norm: power.op_norm,
        eigenvalue: power.eigenvalue,
        iterations: power.iterations,
        residual: power.residual,
        seed: power.seed,
        benedicks_constant: benedicks_constant(power.op_norm).ok(),
        dense_op_norm: dense.then(|| dense_op_norm(&op, DenseRule::Grid)),
    };
    print_json(&summary);
    if let Some(path) = out {
        write_json(path, &summary)?;
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct ConstantsRow {
    s: f64,
    dimension: usize,
    heisenberg_c: f64,
    heisenberg_eps0: f64,
    local_c: f64,
    local_eps0: f64,
    corollary_c: f64,
    corollary_r_star: f64,
}

fn cmd_constants(dim: usize, s_values: &[f64], json: bool) -> Result<i32> {
    let rows = s_values
        .iter()
        .map(|&s| {
            let h = heisenberg_constant(s, dim)?;
            let l = local_uncertainty_constant(s, dim)?;
            let k = local_uncertainty_corollary_constant(s, dim)?;
            Ok(ConstantsRow {
                s,
                dimension: dim,
                heisenberg_c: h.c,
                heisenberg_eps0: h.eps0,
                local_c: l.c,
                local_eps0: l.eps0,
                corollary_c: k.c_s,
                corollary_r_star: k.r_star,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if json {
        print_json(&rows);
    } else {
        println!(
            "{:>8} {:>4} {:>22} {:>22} {:>22} {:>22}",
            "s", "n", "heisenberg c(s)", "local c(s)", "corollary c_s", "r*"
        );
        for r in &rows {
            println!(
                "{:>8} {:>4} {:>22.15e} {:>22.15e} {:>22.15e} {:>22.15e}",
                r.s, r.dimension, r.heisenberg_c, r.local_c, r.corollary_c, r.corollary_r_star
            );
        }
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct CountSummary {
    dimension: usize,
    radius: f64,
    lattice_count: u64,
    ball_measure: f64,
    inner_tile_measure: f64,
    resolution: usize,
}

fn cmd_count(dim: usize, radius: f64, resolution: usize) -> Result<i32> {
    if dim == 0 || !(radius >= 0.0) || resolution == 0 {
        return Err(Error::InvalidParameter("need dim ≥ 1, radius ≥ 0 and resolution ≥ 1".into()));
    }
    let inner = if radius > 0.0 {
        measure(&ball_tileset(radius, dim, resolution)?)
    } else {
        0.0
    };
    print_json(&CountSummary {
        dimension: dim,
        radius,
        lattice_count: lattice_count(radius, dim),
        ball_measure: ball_measure(radius, dim, BALL_QUAD_POINTS),
        inner_tile_measure: inner,
        resolution,
    });
    Ok(EXIT_OK)
}

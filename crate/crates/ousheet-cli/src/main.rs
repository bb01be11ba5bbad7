//! Command-line front end: evaluate design criteria over parameter grids,
//! reproduce the benchmark comparison table, tabulate criterion surfaces
//! and run the design optimizers.
//!
//! Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 solver
//! found no solution. All outputs are byte-stable for a fixed invocation
//! and seed.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use ousheet::covariance::{covariance_derivatives, dense_covariance};
use ousheet::design::{make_equidistant_grid, DesignDescriptor, GridDescriptor};
use ousheet::fisher::{
    det_frak_m, det_m_all, kappa, lambda, m_b_arrhenius, m_mub_arrhenius, m_r, m_theta,
    m_theta_monotonic,
};
use ousheet::optimize::{
    joint_two_point_delta, maximin_two_point, optimal_grid, optimize_monotonic_chain,
    solve_all_params_free, surface_scan, ChainCriterion, Criterion, FreeBoundarySolution,
    OptimizationReport, ScanGrid, ScanObjective, SolveError,
};
use ousheet::oracle::{
    entropy_dense, fisher_trace, fisher_trend_general, imspe_quadrature, one_c_inv_one,
};
use ousheet::prediction::{entropy, entropy_monotonic, imspe};
use ousheet::{CovParams, DesignSpace, GridDesign, MonotonicChain};

#[derive(Parser)]
#[command(name = "ousheet", version, about = "Design criteria for OU sheets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate criteria for one design over a parameter grid.
    Eval(EvalArgs),
    /// Reproduce the benchmark grid-versus-chain comparison table.
    Table1(Table1Args),
    /// Tabulate a criterion surface over a two-variable lattice.
    Surface(SurfaceArgs),
    /// Optimize a design family and report the result as JSON.
    Optimize(OptimizeArgs),
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numerical(String),
    NoSolution(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::NoSolution(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) | CliError::NoSolution(m) => m,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(args) => cmd_eval(args),
        Command::Table1(args) => cmd_table1(args),
        Command::Surface(args) => cmd_surface(args),
        Command::Optimize(args) => cmd_optimize(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn write_output(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write as _;
            let mut stdout = std::io::stdout().lock();
            match stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
            {
                Ok(()) => Ok(()),
                // Downstream hung up (head, broken pager); not our error.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                Err(e) => Err(usage(format!("cannot write stdout: {e}"))),
            }
        }
    }
}

/// Benchmark design space shared by the presets and the table command.
fn bench_space() -> DesignSpace {
    DesignSpace::new(223.0, 420.0, 0.84, 43.51).expect("static bounds")
}

const BENCH_RATES: [(f64, f64); 4] = [(0.001, 0.01), (0.1, 1.0), (1.0, 1.0), (1.0, 10.0)];

enum Design {
    Grid(GridDesign),
    Chain(MonotonicChain),
}

impl Design {
    fn points(&self) -> Vec<(f64, f64)> {
        match self {
            Design::Grid(g) => g.points_lexicographic(),
            Design::Chain(c) => c.points().to_vec(),
        }
    }
}

/// Corner-to-corner chain with equal coordinate increments, the analytic
/// optimum of both chain criteria on the space.
fn equal_increment_chain(space: &DesignSpace, k: usize) -> MonotonicChain {
    let len = (k - 1) as f64;
    let points = (0..k)
        .map(|i| {
            if i == k - 1 {
                (space.b1(), space.b2())
            } else {
                let f = i as f64 / len;
                (
                    space.a1() + f * space.width_s(),
                    space.a2() + f * space.width_t(),
                )
            }
        })
        .collect();
    MonotonicChain::new(points, space).expect("equal increments are monotone")
}

fn load_design(spec: &str) -> Result<Design, CliError> {
    match spec {
        "table1-grid" => Ok(Design::Grid(
            make_equidistant_grid(&bench_space(), 8, 8).expect("8 x 8"),
        )),
        "table1-chain" => Ok(Design::Chain(equal_increment_chain(&bench_space(), 64))),
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read design {path}: {e}")))?;
            let descriptor: DesignDescriptor = serde_json::from_str(&text)
                .map_err(|e| usage(format!("malformed design {path}: {e}")))?;
            match descriptor {
                DesignDescriptor::Grid(g) => GridDesign::try_from(g)
                    .map(Design::Grid)
                    .map_err(|e| usage(format!("invalid grid in {path}: {e}"))),
                DesignDescriptor::Chain(c) => MonotonicChain::try_from(c)
                    .map(Design::Chain)
                    .map_err(|e| usage(format!("invalid chain in {path}: {e}"))),
            }
        }
    }
}

fn cov_params(alpha: f64, beta: f64, sigma: f64) -> Result<CovParams, CliError> {
    CovParams::new(alpha, beta, sigma).map_err(|e| usage(e.to_string()))
}

// ---------------------------------------------------------------------------
// eval

#[derive(Args)]
struct EvalArgs {
    /// Design: JSON descriptor path or preset (table1-grid, table1-chain).
    #[arg(long)]
    design: String,
    /// First-axis decay rate (repeatable).
    #[arg(long, required = true)]
    alpha: Vec<f64>,
    /// Second-axis decay rate (repeatable).
    #[arg(long, required = true)]
    beta: Vec<f64>,
    /// Process standard deviation (repeatable).
    #[arg(long, default_values_t = vec![1.0])]
    sigma: Vec<f64>,
    /// Arrhenius temperature exponent (repeatable; arrhenius-* only).
    #[arg(long, allow_negative_numbers = true)]
    mu: Vec<f64>,
    /// Arrhenius rate constant (repeatable; arrhenius-* only).
    #[arg(long = "B")]
    b: Vec<f64>,
    /// Criterion to evaluate (repeatable).
    #[arg(long, required = true)]
    criterion: Vec<CriterionName>,
    /// Add an independent dense linear-algebra cross-check column.
    #[arg(long)]
    oracle: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write output to this path instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CriterionName {
    TrendD,
    RateD,
    JointD,
    Imspe,
    Entropy,
    ArrheniusB,
    ArrheniusMub,
    ArrheniusJointB,
    ArrheniusJointMub,
}

impl CriterionName {
    fn name(self) -> &'static str {
        match self {
            CriterionName::TrendD => "trend-d",
            CriterionName::RateD => "rate-d",
            CriterionName::JointD => "joint-d",
            CriterionName::Imspe => "imspe",
            CriterionName::Entropy => "entropy",
            CriterionName::ArrheniusB => "arrhenius-b",
            CriterionName::ArrheniusMub => "arrhenius-mub",
            CriterionName::ArrheniusJointB => "arrhenius-joint-b",
            CriterionName::ArrheniusJointMub => "arrhenius-joint-mub",
        }
    }

    fn needs_arrhenius(self) -> bool {
        matches!(
            self,
            CriterionName::ArrheniusB
                | CriterionName::ArrheniusMub
                | CriterionName::ArrheniusJointB
                | CriterionName::ArrheniusJointMub
        )
    }

    fn supports_chain(self) -> bool {
        matches!(self, CriterionName::TrendD | CriterionName::Entropy)
    }
}

#[derive(Serialize)]
struct EvalRow {
    criterion: &'static str,
    alpha: f64,
    beta: f64,
    sigma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<f64>,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<f64>,
}

fn eval_value(
    design: &Design,
    c: CriterionName,
    params: &CovParams,
    mu: f64,
    b: f64,
) -> Result<f64, CliError> {
    let numerical = |e: ousheet::fisher::FisherError| CliError::Numerical(e.to_string());
    match (design, c) {
        (Design::Grid(g), CriterionName::TrendD) => Ok(m_theta(g, params)),
        (Design::Grid(g), CriterionName::RateD) => Ok(m_r(g, params).det()),
        (Design::Grid(g), CriterionName::JointD) => Ok(det_m_all(g, params)),
        (Design::Grid(g), CriterionName::Imspe) => Ok(imspe(g, params)),
        (Design::Grid(g), CriterionName::Entropy) => Ok(entropy(g, params)),
        (Design::Grid(g), CriterionName::ArrheniusB) => {
            m_b_arrhenius(g, params, mu, b).map_err(numerical)
        }
        (Design::Grid(g), CriterionName::ArrheniusMub) => m_mub_arrhenius(g, params, mu, b)
            .map(|f| f.det())
            .map_err(numerical),
        (Design::Grid(g), CriterionName::ArrheniusJointB) => {
            det_frak_m(g, params, mu, b, false).map_err(numerical)
        }
        (Design::Grid(g), CriterionName::ArrheniusJointMub) => {
            det_frak_m(g, params, mu, b, true).map_err(numerical)
        }
        (Design::Chain(ch), CriterionName::TrendD) => Ok(m_theta_monotonic(ch, params)),
        (Design::Chain(ch), CriterionName::Entropy) => Ok(entropy_monotonic(ch, params)),
        (Design::Chain(_), other) => Err(usage(format!(
            "criterion {} is not defined for chain designs",
            other.name()
        ))),
    }
}

/// Dense cross-check of a criterion from the raw point set: quadratic
/// forms and traces against the factorised closed forms.
fn oracle_value(
    design: &Design,
    c: CriterionName,
    params: &CovParams,
    mu: f64,
    b: f64,
) -> Result<f64, CliError> {
    let numerical = |e: &dyn std::fmt::Display| CliError::Numerical(e.to_string());
    let pts = design.points();
    let cov = dense_covariance(&pts, params).map_err(|e| numerical(&e))?;
    let trend = || -> Result<f64, CliError> {
        Ok(one_c_inv_one(cov.matrix()).map_err(|e| numerical(&e))? * params.sigma2())
    };
    let rate_det = || -> Result<f64, CliError> {
        let (da, db) = covariance_derivatives(&pts, params);
        Ok(fisher_trace(cov.matrix(), &da, &db)
            .map_err(|e| numerical(&e))?
            .det())
    };
    let arrhenius = |estimate_mu: bool| -> Result<f64, CliError> {
        let f = if estimate_mu {
            DMatrix::from_fn(pts.len(), 2, |r, col| {
                let t = pts[r].1;
                if col == 0 {
                    lambda(t, mu, b)
                } else {
                    kappa(t, mu, b)
                }
            })
        } else {
            DMatrix::from_fn(pts.len(), 1, |r, _| kappa(pts[r].1, mu, b))
        };
        let info = fisher_trend_general(&f, cov.matrix()).map_err(|e| numerical(&e))?;
        Ok(if estimate_mu {
            (info[(0, 0)] * info[(1, 1)] - info[(0, 1)] * info[(1, 0)])
                * params.sigma2()
                * params.sigma2()
        } else {
            info[(0, 0)] * params.sigma2()
        })
    };
    match c {
        CriterionName::TrendD => trend(),
        CriterionName::RateD => rate_det(),
        CriterionName::JointD => Ok(trend()? * rate_det()?),
        CriterionName::Imspe => imspe_quadrature(&pts, params, 1e-8).map_err(|e| numerical(&e)),
        CriterionName::Entropy => entropy_dense(&pts, params).map_err(|e| numerical(&e)),
        CriterionName::ArrheniusB => arrhenius(false),
        CriterionName::ArrheniusMub => arrhenius(true),
        CriterionName::ArrheniusJointB => Ok(arrhenius(false)? * rate_det()?),
        CriterionName::ArrheniusJointMub => Ok(arrhenius(true)? * rate_det()?),
    }
}

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    let design = load_design(&args.design)?;
    if args.alpha.is_empty() || args.beta.is_empty() || args.sigma.is_empty() {
        return Err(usage("parameter grid is empty: --alpha, --beta, --sigma"));
    }
    for c in &args.criterion {
        if matches!(design, Design::Chain(_)) && !c.supports_chain() {
            return Err(usage(format!(
                "criterion {} is not defined for chain designs",
                c.name()
            )));
        }
        if c.needs_arrhenius() && (args.mu.is_empty() || args.b.is_empty()) {
            return Err(usage(format!("criterion {} needs --mu and --B", c.name())));
        }
    }

    let mut tuples = Vec::new();
    for &c in &args.criterion {
        let trend_pairs: Vec<(Option<f64>, Option<f64>)> = if c.needs_arrhenius() {
            args.mu
                .iter()
                .flat_map(|&mu| args.b.iter().map(move |&b| (Some(mu), Some(b))))
                .collect()
        } else {
            vec![(None, None)]
        };
        for &alpha in &args.alpha {
            for &beta in &args.beta {
                for &sigma in &args.sigma {
                    for &(mu, b) in &trend_pairs {
                        tuples.push((c, alpha, beta, sigma, mu, b));
                    }
                }
            }
        }
    }

    let oracle = args.oracle;
    let rows: Vec<EvalRow> = tuples
        .par_iter()
        .map(|&(c, alpha, beta, sigma, mu, b)| {
            let params = cov_params(alpha, beta, sigma)?;
            let (m, bb) = (mu.unwrap_or(0.0), b.unwrap_or(0.0));
            let value = eval_value(&design, c, &params, m, bb).map_err(|e| {
                CliError::Numerical(format!(
                    "{} at alpha={alpha} beta={beta} sigma={sigma}: {}",
                    c.name(),
                    e.message()
                ))
            })?;
            let oracle = if oracle {
                Some(oracle_value(&design, c, &params, m, bb)?)
            } else {
                None
            };
            Ok(EvalRow {
                criterion: c.name(),
                alpha,
                beta,
                sigma,
                mu,
                b,
                value,
                oracle,
            })
        })
        .collect::<Result<_, CliError>>()?;

    let text = match args.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rows).expect("serializable rows");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from("criterion,alpha,beta,sigma,mu,B,value");
            if oracle {
                s.push_str(",oracle");
            }
            s.push('\n');
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            for r in &rows {
                write!(
                    s,
                    "{},{},{},{},{},{},{:.9e}",
                    r.criterion,
                    r.alpha,
                    r.beta,
                    r.sigma,
                    opt(r.mu),
                    opt(r.b),
                    r.value
                )
                .expect("string write");
                if let Some(o) = r.oracle {
                    write!(s, ",{o:.9e}").expect("string write");
                }
                s.push('\n');
            }
            s
        }
    };
    write_output(&text, args.out.as_ref())
}

// ---------------------------------------------------------------------------
// table1

#[derive(Args)]
struct Table1Args {
    /// Seed of the chain optimizer runs (recorded in the output).
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Table1Column {
    alpha: f64,
    beta: f64,
    trend_monotonic: f64,
    trend_rectangular: f64,
    trend_rel_eff_pct: f64,
    entropy_monotonic: f64,
    entropy_rectangular: f64,
    entropy_rel_eff_pct_mono_over_rect: f64,
    entropy_rel_eff_pct_rect_over_mono: f64,
}

#[derive(Serialize)]
struct Table1Report {
    space: [f64; 4],
    grid: [usize; 2],
    chain_points: usize,
    seed: u64,
    columns: Vec<Table1Column>,
}

fn cmd_table1(args: Table1Args) -> Result<(), CliError> {
    let space = bench_space();
    let grid = make_equidistant_grid(&space, 8, 8).expect("8 x 8");
    let columns: Vec<Table1Column> = BENCH_RATES
        .iter()
        .map(|&(alpha, beta)| {
            let params = cov_params(alpha, beta, 1.0)?;
            let trend_mono =
                optimize_monotonic_chain(&space, 64, &params, ChainCriterion::TrendD, args.seed)
                    .map_err(|e| CliError::Numerical(e.to_string()))?
                    .best_value;
            let entropy_mono =
                optimize_monotonic_chain(&space, 64, &params, ChainCriterion::Entropy, args.seed)
                    .map_err(|e| CliError::Numerical(e.to_string()))?
                    .best_value;
            let trend_rect = m_theta(&grid, &params);
            let entropy_rect = entropy(&grid, &params);
            Ok(Table1Column {
                alpha,
                beta,
                trend_monotonic: trend_mono,
                trend_rectangular: trend_rect,
                trend_rel_eff_pct: 100.0 * trend_mono / trend_rect,
                entropy_monotonic: entropy_mono,
                entropy_rectangular: entropy_rect,
                entropy_rel_eff_pct_mono_over_rect: 100.0 * entropy_mono / entropy_rect,
                entropy_rel_eff_pct_rect_over_mono: 100.0 * entropy_rect / entropy_mono,
            })
        })
        .collect::<Result<_, CliError>>()?;

    let text = match args.format {
        Format::Json => {
            let report = Table1Report {
                space: [space.a1(), space.b1(), space.a2(), space.b2()],
                grid: [8, 8],
                chain_points: 64,
                seed: args.seed,
                columns,
            };
            let mut s = serde_json::to_string_pretty(&report).expect("serializable report");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from("quantity");
            for c in &columns {
                write!(s, ",alpha={} beta={}", c.alpha, c.beta).expect("string write");
            }
            s.push('\n');
            let mut row = |label: &str, pick: &dyn Fn(&Table1Column) -> f64, digits: usize| {
                write!(s, "{label}").expect("string write");
                for c in &columns {
                    write!(s, ",{:.*}", digits, pick(c)).expect("string write");
                }
                s.push('\n');
            };
            row("trend-d monotonic", &|c| c.trend_monotonic, 4);
            row("trend-d rectangular", &|c| c.trend_rectangular, 4);
            row("trend-d rel-eff-pct", &|c| c.trend_rel_eff_pct, 2);
            row("entropy monotonic", &|c| c.entropy_monotonic, 4);
            row("entropy rectangular", &|c| c.entropy_rectangular, 4);
            row(
                "entropy rel-eff-pct mono/rect",
                &|c| c.entropy_rel_eff_pct_mono_over_rect,
                2,
            );
            row(
                "entropy rel-eff-pct rect/mono",
                &|c| c.entropy_rel_eff_pct_rect_over_mono,
                2,
            );
            s
        }
    };
    write_output(&text, args.out.as_ref())
}

// ---------------------------------------------------------------------------
// surface

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SurfacePreset {
    /// Restricted rate determinant, 3x3, alpha=0.6, beta=1, unit square.
    Fig1,
    /// Free-spacing rate determinant, 5x5, alpha=beta=1.
    Fig2,
    /// Free-spacing joint determinant, 6x6, alpha=beta=1.
    Fig3,
    /// Trend information of the benchmark 8x8 grid over the rates.
    Fig4,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ObjectiveName {
    RestrictedRate,
    RestrictedJoint,
    FreeRate,
    FreeJoint,
    TrendOverRates,
}

#[derive(Args)]
struct SurfaceArgs {
    /// Named preset; overrides the manual objective and ranges.
    #[arg(long, value_enum)]
    preset: Option<SurfacePreset>,
    #[arg(long, value_enum)]
    objective: Option<ObjectiveName>,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    x_min: f64,
    #[arg(long, default_value_t = 1.0)]
    x_max: f64,
    #[arg(long, default_value_t = 101)]
    nx: usize,
    #[arg(long, default_value_t = 0.0)]
    y_min: f64,
    #[arg(long, default_value_t = 1.0)]
    y_max: f64,
    #[arg(long, default_value_t = 101)]
    ny: usize,
    /// First-axis width for trend-over-rates scans.
    #[arg(long, default_value_t = 197.0)]
    width_s: f64,
    /// Second-axis width for trend-over-rates scans.
    #[arg(long, default_value_t = 42.67)]
    width_t: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_surface(args: SurfaceArgs) -> Result<(), CliError> {
    let scan_err = |e: SolveError| usage(e.to_string());
    let (objective, params, grid) = if let Some(preset) = args.preset {
        match preset {
            SurfacePreset::Fig1 => (
                ScanObjective::RestrictedRateDet,
                cov_params(0.6, 1.0, 1.0)?,
                ScanGrid::new(0.0, 1.0, 101, 0.0, 1.0, 101).map_err(scan_err)?,
            ),
            SurfacePreset::Fig2 => (
                ScanObjective::FreeRateDet { n: 5, m: 5 },
                cov_params(1.0, 1.0, 1.0)?,
                ScanGrid::new(0.0, 3.0, 101, 0.0, 3.0, 101).map_err(scan_err)?,
            ),
            SurfacePreset::Fig3 => (
                ScanObjective::FreeJointDet { n: 6 },
                cov_params(1.0, 1.0, 1.0)?,
                ScanGrid::new(0.0, 3.0, 101, 0.0, 3.0, 101).map_err(scan_err)?,
            ),
            SurfacePreset::Fig4 => (
                ScanObjective::TrendInfoOverRates {
                    n: 8,
                    m: 8,
                    width_s: 197.0,
                    width_t: 42.67,
                },
                cov_params(1.0, 1.0, 1.0)?,
                ScanGrid::new(0.02, 1.0, 50, 0.2, 10.0, 50).map_err(scan_err)?,
            ),
        }
    } else {
        let name = args
            .objective
            .ok_or_else(|| usage("surface needs --preset or --objective"))?;
        let objective = match name {
            ObjectiveName::RestrictedRate => ScanObjective::RestrictedRateDet,
            ObjectiveName::RestrictedJoint => ScanObjective::RestrictedJointDet,
            ObjectiveName::FreeRate => ScanObjective::FreeRateDet {
                n: args.n,
                m: args.m,
            },
            ObjectiveName::FreeJoint => ScanObjective::FreeJointDet { n: args.n },
            ObjectiveName::TrendOverRates => ScanObjective::TrendInfoOverRates {
                n: args.n,
                m: args.m,
                width_s: args.width_s,
                width_t: args.width_t,
            },
        };
        if args.n < 2 || args.m < 2 {
            return Err(usage("scan designs need n, m >= 2"));
        }
        let restricted = matches!(
            name,
            ObjectiveName::RestrictedRate | ObjectiveName::RestrictedJoint
        );
        if restricted && !(0.0..=1.0).contains(&args.x_min)
            || restricted && !(0.0..=1.0).contains(&args.x_max)
            || restricted && !(0.0..=1.0).contains(&args.y_min)
            || restricted && !(0.0..=1.0).contains(&args.y_max)
        {
            return Err(usage("restricted spacings live on the unit square"));
        }
        if matches!(name, ObjectiveName::TrendOverRates) && args.x_min <= 0.0 {
            return Err(usage("rate scans need positive ranges"));
        }
        (
            objective,
            cov_params(args.alpha, args.beta, args.sigma)?,
            ScanGrid::new(
                args.x_min, args.x_max, args.nx, args.y_min, args.y_max, args.ny,
            )
            .map_err(scan_err)?,
        )
    };

    let rows = surface_scan(objective, &params, &grid);
    let header = match objective {
        ScanObjective::TrendInfoOverRates { .. } => "alpha,beta,value",
        _ => "d,delta,value",
    };
    let mut s = String::from(header);
    s.push('\n');
    for (x, y, v) in rows {
        writeln!(s, "{x},{y},{v:.9e}").expect("string write");
    }
    write_output(&s, args.out.as_ref())
}

// ---------------------------------------------------------------------------
// optimize

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// Equidistant grid (analytic optimum, no iteration).
    Grid,
    /// Monotonic chain by seeded multi-start ascent.
    Chain,
    /// Free-spacing equidistant design, all parameters, n = m.
    FreeBoundary,
    /// Two-point maximin design for the Arrhenius rate constant.
    Maximin,
    /// Two-point joint design at fixed environment correlation.
    JointTwoPoint,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Criterion (grid: trend-d, imspe, entropy; chain: trend-d, entropy).
    #[arg(long, value_enum, default_value_t = CriterionName::TrendD)]
    criterion: CriterionName,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 8)]
    m: usize,
    /// Number of chain points.
    #[arg(long, default_value_t = 64)]
    k: usize,
    /// Design space corners: a1 b1 a2 b2.
    #[arg(long, num_args = 4, value_names = ["A1", "B1", "A2", "B2"],
          allow_negative_numbers = true,
          default_values_t = vec![223.0, 420.0, 0.84, 43.51])]
    space: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Arrhenius temperature exponent (maximin, joint-two-point).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mu: f64,
    /// Arrhenius rate constant (maximin, joint-two-point).
    #[arg(long = "B", default_value_t = 1.0)]
    b: f64,
    /// Environment correlation (joint-two-point).
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct GridReport {
    family: &'static str,
    criterion: &'static str,
    space: [f64; 4],
    n: usize,
    m: usize,
    alpha: f64,
    beta: f64,
    sigma: f64,
    value: f64,
    design: GridDescriptor,
}

#[derive(Serialize)]
struct ChainReport {
    family: &'static str,
    space: [f64; 4],
    alpha: f64,
    beta: f64,
    sigma: f64,
    report: OptimizationReport,
}

#[derive(Serialize)]
struct FreeBoundaryReport {
    family: &'static str,
    n: usize,
    alpha: f64,
    beta: f64,
    sigma: f64,
    solution: FreeBoundarySolution,
}

#[derive(Serialize)]
struct TwoPointReport {
    family: &'static str,
    mu: f64,
    b: f64,
    beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    delta_star: f64,
}

fn solve_err(e: SolveError) -> CliError {
    match e {
        SolveError::Domain(_) => usage(e.to_string()),
        SolveError::NoBracket | SolveError::MaximinBoundaryMu => {
            CliError::NoSolution(e.to_string())
        }
    }
}

fn cmd_optimize(args: OptimizeArgs) -> Result<(), CliError> {
    let [a1, b1, a2, b2] = args.space[..] else {
        return Err(usage("--space takes exactly four numbers"));
    };
    let params = cov_params(args.alpha, args.beta, args.sigma)?;
    let text = match args.family {
        Family::Grid => {
            let space = DesignSpace::new(a1, b1, a2, b2).map_err(|e| usage(e.to_string()))?;
            let criterion = match args.criterion {
                CriterionName::TrendD => Criterion::TrendD,
                CriterionName::Imspe => Criterion::Imspe,
                CriterionName::Entropy => Criterion::Entropy,
                other => {
                    return Err(usage(format!(
                        "grid optimizer does not support criterion {}",
                        other.name()
                    )))
                }
            };
            let grid = optimal_grid(&space, args.n, args.m, criterion)
                .map_err(|e| usage(e.to_string()))?;
            let value = match criterion {
                Criterion::TrendD => m_theta(&grid, &params),
                Criterion::Imspe => imspe(&grid, &params),
                Criterion::Entropy => entropy(&grid, &params),
            };
            report_json(&GridReport {
                family: "grid",
                criterion: args.criterion.name(),
                space: [a1, b1, a2, b2],
                n: args.n,
                m: args.m,
                alpha: args.alpha,
                beta: args.beta,
                sigma: args.sigma,
                value,
                design: grid.into(),
            })
        }
        Family::Chain => {
            let space = DesignSpace::new(a1, b1, a2, b2).map_err(|e| usage(e.to_string()))?;
            let criterion = match args.criterion {
                CriterionName::TrendD => ChainCriterion::TrendD,
                CriterionName::Entropy => ChainCriterion::Entropy,
                other => {
                    return Err(usage(format!(
                        "chain optimizer does not support criterion {}",
                        other.name()
                    )))
                }
            };
            let report = optimize_monotonic_chain(&space, args.k, &params, criterion, args.seed)
                .map_err(solve_err)?;
            report_json(&ChainReport {
                family: "chain",
                space: [a1, b1, a2, b2],
                alpha: args.alpha,
                beta: args.beta,
                sigma: args.sigma,
                report,
            })
        }
        Family::FreeBoundary => {
            let solution = solve_all_params_free(args.n, &params).map_err(solve_err)?;
            report_json(&FreeBoundaryReport {
                family: "free-boundary",
                n: args.n,
                alpha: args.alpha,
                beta: args.beta,
                sigma: args.sigma,
                solution,
            })
        }
        Family::Maximin => {
            let delta_star = maximin_two_point(args.mu, args.b, args.beta).map_err(solve_err)?;
            report_json(&TwoPointReport {
                family: "maximin",
                mu: args.mu,
                b: args.b,
                beta: args.beta,
                p: None,
                delta_star,
            })
        }
        Family::JointTwoPoint => {
            let delta_star =
                joint_two_point_delta(args.mu, args.b, args.beta, args.p).map_err(solve_err)?;
            report_json(&TwoPointReport {
                family: "joint-two-point",
                mu: args.mu,
                b: args.b,
                beta: args.beta,
                p: Some(args.p),
                delta_star,
            })
        }
    };
    write_output(&text, args.out.as_ref())
}

fn report_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("serializable report");
    s.push('\n');
    s
}

//! Feasibility/optimality sweeps over generated instance sets.
//!
//! Each run draws a fresh instance set, solves every instance with every
//! `(solver, lambda)` pair and compares against the cached exact balanced
//! optimum. Rates are averaged over runs with their standard errors.

use std::cmp::Ordering;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cut::{CutFunction, CutKind};
use crate::error::{Error, Result};
use crate::hypergraph::{generate_random_uniform, Hypergraph, NodePartition};
use crate::pbo::EncodingSpec;
use crate::solvers::{
    best_read, exact_balanced, solve_qaoa, solve_sa, QaoaParams, SaParams, SolverKind,
    MAX_EXACT_BITS,
};

const RUN_SEED_MUL: u64 = 10_007;
const INSTANCE_SEED_MUL: u64 = 10_009;
const OPT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_values: Vec<usize>,
    pub instances: usize,
    pub runs: usize,
    pub lambda_values: Vec<f64>,
    pub solvers: Vec<SolverKind>,
    pub cut: CutKind,
    pub k: usize,
    pub r: usize,
    pub avg_degree: f64,
    pub base_seed: u64,
    pub output: Option<PathBuf>,
    pub sa_reads: usize,
    pub sa_sweeps: usize,
    pub qaoa_depth: usize,
    pub qaoa_restarts: usize,
    pub qaoa_max_iters: usize,
    pub top_k: usize,
    /// Fill `mean_seconds`; off by default so that reports are reproducible.
    pub record_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_values: (8..=15).collect(),
            instances: 100,
            runs: 5,
            lambda_values: vec![0.3, 1.0, 3.0],
            solvers: vec![SolverKind::Exact, SolverKind::Sa, SolverKind::Qaoa],
            cut: CutKind::Aon,
            k: 2,
            r: 3,
            avg_degree: 5.0,
            base_seed: 0,
            output: None,
            sa_reads: 100,
            sa_sweeps: 1000,
            qaoa_depth: 1,
            qaoa_restarts: 10,
            qaoa_max_iters: 200,
            top_k: 10,
            record_timing: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("instances", self.instances),
            ("runs", self.runs),
            ("k", self.k),
            ("sa_reads", self.sa_reads),
            ("sa_sweeps", self.sa_sweeps),
            ("qaoa_depth", self.qaoa_depth),
            ("qaoa_restarts", self.qaoa_restarts),
            ("top_k", self.top_k),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidParam(format!("{name} must be positive")));
        }
        if self.n_values.is_empty() || self.lambda_values.is_empty() || self.solvers.is_empty() {
            return Err(Error::InvalidParam("n_values, lambda_values and solvers must be non-empty".into()));
        }
        if self.cut == CutKind::Hrwc {
            return Err(Error::Unsupported("hrwc needs per-instance transition matrices".into()));
        }
        let cut = CutFunction::from_kind(self.cut)?;
        let qaoa = self.qaoa_params(0);
        for &n in &self.n_values {
            if n < self.k {
                return Err(Error::Infeasible(format!("n={n} is smaller than k={}", self.k)));
            }
            if n as f64 * (self.k as f64).log2() > MAX_EXACT_BITS {
                return Err(Error::TooLarge(format!("n={n} exceeds the exact solver cap")));
            }
            let spec = EncodingSpec::new(self.k, 1.0, cut.clone());
            if self.solvers.contains(&SolverKind::Qaoa) {
                qaoa.validate(spec.num_vars(n))?;
            }
        }
        for &l in &self.lambda_values {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(Error::InvalidParam(format!("lambda must be >= 0, got {l}")));
            }
        }
        Ok(())
    }

    pub fn sa_params(&self, seed: u64) -> SaParams {
        SaParams {
            reads: self.sa_reads,
            sweeps: self.sa_sweeps,
            seed,
            ..Default::default()
        }
    }

    pub fn qaoa_params(&self, seed: u64) -> QaoaParams {
        QaoaParams {
            depth: self.qaoa_depth,
            restarts: self.qaoa_restarts,
            max_iters: self.qaoa_max_iters,
            top_k: self.top_k,
            seed,
            ..Default::default()
        }
    }

    pub fn run_seed(&self, run: usize) -> u64 {
        self.base_seed.wrapping_mul(RUN_SEED_MUL).wrapping_add(run as u64)
    }

    /// `index` counts instances across all `n_values` of one run.
    pub fn instance_seed(&self, run: usize, index: usize) -> u64 {
        self.run_seed(run).wrapping_mul(INSTANCE_SEED_MUL).wrapping_add(index as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub solver: String,
    pub lambda: f64,
    pub n: usize,
    pub feasibility_mean: f64,
    pub feasibility_se: f64,
    pub optimality_mean: f64,
    pub optimality_se: f64,
    pub mean_seconds: f64,
}

/// Raw tallies of one `(solver, lambda, n, run)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunCounts {
    pub solver: String,
    pub lambda: f64,
    pub n: usize,
    pub run: usize,
    pub instances: usize,
    pub feasible: usize,
    pub optimal: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub runs: Vec<RunCounts>,
}

impl ExperimentReport {
    pub fn row(&self, solver: &str, lambda: f64, n: usize) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.solver == solver && r.lambda == lambda && r.n == n)
    }

    pub fn run_counts<'a>(&'a self, solver: &'a str, lambda: f64) -> impl Iterator<Item = &'a RunCounts> + 'a {
        self.runs
            .iter()
            .filter(move |c| c.solver == solver && c.lambda == lambda)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Outcome {
    feasible: bool,
    optimal: bool,
    seconds: f64,
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn cmp_key(a: (&str, f64, usize), b: (&str, f64, usize)) -> Ordering {
    a.0.cmp(b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2))
}

/// Depends only on the instance and lambda, so a cell's result does not
/// change when other lambdas or solvers are added to the config.
fn solver_seed(instance_seed: u64, lambda: f64) -> u64 {
    instance_seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ lambda.to_bits()
}

fn solve_instance(
    config: &ExperimentConfig,
    cut: &CutFunction,
    h: &Hypergraph,
    seed: u64,
) -> Result<Vec<Outcome>> {
    let start = Instant::now();
    let (opt, _) = exact_balanced(h, cut, config.k)?;
    let exact_secs = start.elapsed().as_secs_f64();
    let is_optimal = |p: &Option<NodePartition>, cut_value: Option<f64>| {
        p.as_ref().is_some_and(NodePartition::is_balanced)
            && cut_value.is_some_and(|v| (v - opt).abs() <= OPT_TOL * opt.abs().max(1.0))
    };

    let mut out = Vec::with_capacity(config.lambda_values.len() * config.solvers.len());
    for &lambda in &config.lambda_values {
        let problem = EncodingSpec::new(config.k, lambda, cut.clone()).encode(h)?;
        let s = solver_seed(seed, lambda);
        for solver in &config.solvers {
            let o = match solver {
                SolverKind::Exact => Outcome {
                    feasible: true,
                    optimal: true,
                    seconds: exact_secs,
                },
                SolverKind::Sa => {
                    let t = Instant::now();
                    let r = best_read(solve_sa(&problem, &config.sa_params(s))?)
                        .expect("at least one read");
                    Outcome {
                        feasible: r.feasible,
                        optimal: is_optimal(&r.decoded, r.cut_value),
                        seconds: t.elapsed().as_secs_f64(),
                    }
                }
                SolverKind::Qaoa => {
                    let r = solve_qaoa(&problem, &config.qaoa_params(s))?;
                    Outcome {
                        feasible: r.feasible,
                        optimal: is_optimal(&r.decoded, r.cut_value),
                        seconds: r.wall_seconds,
                    }
                }
            };
            out.push(o);
        }
    }
    Ok(out)
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let cut = CutFunction::from_kind(config.cut)?;
    let cells = config.lambda_values.len() * config.solvers.len();
    let mut runs = Vec::new();

    for run in 0..config.runs {
        for (ni, &n) in config.n_values.iter().enumerate() {
            let outcomes: Vec<Vec<Outcome>> = (0..config.instances)
                .into_par_iter()
                .map(|i| {
                    let seed = config.instance_seed(run, ni * config.instances + i);
                    let h = generate_random_uniform(n, config.r, config.avg_degree, seed)?;
                    solve_instance(config, &cut, &h, seed)
                })
                .collect::<Result<_>>()?;
            for c in 0..cells {
                let (li, si) = (c / config.solvers.len(), c % config.solvers.len());
                let cell = outcomes.iter().map(|o| o[c]);
                runs.push(RunCounts {
                    solver: config.solvers[si].name().to_string(),
                    lambda: config.lambda_values[li],
                    n,
                    run,
                    instances: config.instances,
                    feasible: cell.clone().filter(|o| o.feasible).count(),
                    optimal: cell.clone().filter(|o| o.optimal).count(),
                    seconds: cell.map(|o| o.seconds).sum(),
                });
            }
        }
    }
    runs.sort_by(|a, b| {
        cmp_key((&a.solver, a.lambda, a.n), (&b.solver, b.lambda, b.n)).then(a.run.cmp(&b.run))
    });

    let rows = runs
        .chunk_by(|a, b| a.solver == b.solver && a.lambda == b.lambda && a.n == b.n)
        .map(|group| {
            let rate = |f: fn(&RunCounts) -> usize| -> Vec<f64> {
                group.iter().map(|c| f(c) as f64 / c.instances as f64).collect()
            };
            let (feasibility_mean, feasibility_se) = mean_se(&rate(|c| c.feasible));
            let (optimality_mean, optimality_se) = mean_se(&rate(|c| c.optimal));
            let total: usize = group.iter().map(|c| c.instances).sum();
            let mean_seconds = if config.record_timing {
                group.iter().map(|c| c.seconds).sum::<f64>() / total as f64
            } else {
                0.0
            };
            ReportRow {
                solver: group[0].solver.clone(),
                lambda: group[0].lambda,
                n: group[0].n,
                feasibility_mean,
                feasibility_se,
                optimality_mean,
                optimality_se,
                mean_seconds,
            }
        })
        .collect();
    Ok(ExperimentReport { rows, runs })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(Error::InvalidParam(format!("unknown report format `{s}`"))),
        }
    }
}

pub const CSV_HEADER: [&str; 8] = [
    "solver",
    "lambda",
    "n",
    "feasibility_mean",
    "feasibility_se",
    "optimality_mean",
    "optimality_se",
    "mean_seconds",
];

/// Serialises the summary rows, sorted by `(solver, lambda, n)`. Floats are
/// printed with six decimals.
pub fn emit_report(report: &ExperimentReport, format: ReportFormat) -> Result<Vec<u8>> {
    let mut rows: Vec<&ReportRow> = report.rows.iter().collect();
    rows.sort_by(|a, b| cmp_key((&a.solver, a.lambda, a.n), (&b.solver, b.lambda, b.n)));
    let io = |e: csv::Error| Error::Io(e.to_string());
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER).map_err(io)?;
            for r in rows {
                w.write_record([
                    r.solver.clone(),
                    format!("{:.6}", r.lambda),
                    r.n.to_string(),
                    format!("{:.6}", r.feasibility_mean),
                    format!("{:.6}", r.feasibility_se),
                    format!("{:.6}", r.optimality_mean),
                    format!("{:.6}", r.optimality_se),
                    format!("{:.6}", r.mean_seconds),
                ])
                .map_err(io)?;
            }
            w.into_inner().map_err(|e| Error::Io(e.to_string()))
        }
        ReportFormat::Json => {
            let mut buf = serde_json::to_vec_pretty(&rows).map_err(|e| Error::Io(e.to_string()))?;
            buf.write_all(b"\n")?;
            Ok(buf)
        }
    }
}

/// Reads rows back from [`emit_report`]'s CSV output.
pub fn parse_report_csv(bytes: &[u8]) -> Result<Vec<ReportRow>> {
    let mut rdr = csv::Reader::from_reader(bytes);
    let headers = rdr.headers().map_err(|e| Error::Io(e.to_string()))?.clone();
    if headers.iter().ne(CSV_HEADER) {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unexpected header {headers:?}"),
        });
    }
    rdr.deserialize()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|e| Error::Parse {
                line: i + 2,
                msg: e.to_string(),
            })
        })
        .collect()
}

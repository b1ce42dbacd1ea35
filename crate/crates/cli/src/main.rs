use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use hyperqubo::pbo::{
    parse_model_text, quadratize_rosenberg, to_ising, write_ising_text, write_poly_text, ModelText,
};
use hyperqubo::solvers::{best_read, solve_exact, solve_qaoa, solve_sa, QaoaParams, SaParams};
use hyperqubo::{
    emit_report, generate_random_uniform, parse_hmetis, run_experiment, serialize_hmetis,
    CutFunction, CutKind, EncodedProblem, EncodingSpec, ExperimentConfig, ReportFormat,
    SolverKind, TransitionMatrix,
};

#[derive(Parser)]
#[command(name = "hyperqubo", version, about = "QUBO/HUBO encodings for balanced hypergraph partitioning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct EncodeArgs {
    /// hMETIS hypergraph file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "aon")]
    cut: CutKind,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// One-hot validity weight (default: lambda*n + total edge weight + 1).
    #[arg(long)]
    alpha: Option<f64>,
    /// Transition matrix for the hrwc cut: n rows of n numbers.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolyFormat {
    /// `vars N maxdeg D` text.
    Text,
    /// Ising text (degree <= 2 only).
    Ising,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Write random connected r-uniform hypergraphs in hMETIS format.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        r: usize,
        #[arg(long, default_value_t = 5.0)]
        avg_degree: f64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Print the composed energy polynomial of an instance.
    Build {
        #[command(flatten)]
        enc: EncodeArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: PolyFormat,
    },
    /// Run one solver on one instance and print the result as JSON.
    Solve {
        #[command(flatten)]
        enc: EncodeArgs,
        #[arg(long, default_value = "exact")]
        solver: SolverKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Annealing reads.
        #[arg(long, default_value_t = 100)]
        reads: usize,
        #[arg(long, default_value_t = 1000)]
        sweeps: usize,
        /// QAOA layers.
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        /// QAOA states inspected for a balanced partition.
        #[arg(long, default_value_t = 10)]
        topk: usize,
    },
    /// Run a feasibility/optimality sweep from a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Report path; `.json` selects JSON, anything else CSV. Defaults to
        /// the config's `output`, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Translate between binary polynomial text and Ising text.
    Convert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Rosenberg-reduce higher-order input before Ising export.
        #[arg(long)]
        quadratize: bool,
    },
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(anyhow::Error),
    Solver(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let e = e.into();
        let solver = matches!(
            e.downcast_ref::<hyperqubo::Error>(),
            Some(
                hyperqubo::Error::Infeasible(_)
                    | hyperqubo::Error::TooLarge(_)
                    | hyperqubo::Error::Generation(_)
                    | hyperqubo::Error::Unsupported(_)
            )
        );
        if solver {
            Failure::Solver(e)
        } else {
            Failure::Usage(e)
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => Ok(std::io::stdout().write_all(bytes)?),
    }
}

fn encode(args: &EncodeArgs) -> Result<EncodedProblem, Failure> {
    let text = read(&args.input)?;
    let h = parse_hmetis(&text).with_context(|| format!("parsing {}", args.input.display()))?;
    let cut = match (args.cut, &args.matrix) {
        (CutKind::Hrwc, Some(m)) => CutFunction::Hrwc(TransitionMatrix::parse(&read(m)?)?),
        (CutKind::Hrwc, None) => return Err(Failure::Usage(anyhow::anyhow!("--cut hrwc needs --matrix"))),
        (kind, _) => CutFunction::from_kind(kind)?,
    };
    let mut spec = EncodingSpec::new(args.k, args.lambda, cut);
    if let Some(a) = args.alpha {
        spec = spec.with_alpha(a);
    }
    Ok(spec.encode(&h)?)
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Gen { n, r, avg_degree, count, seed, out_dir } => {
            fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
            for i in 0..count {
                let s = seed.wrapping_mul(10_009).wrapping_add(i as u64);
                let h = generate_random_uniform(n, r, avg_degree, s)?;
                let path = out_dir.join(format!("n{n}_r{r}_{i:04}.hgr"));
                fs::write(&path, serialize_hmetis(&h)).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Build { enc, format } => {
            let problem = encode(&enc)?;
            let text = match format {
                PolyFormat::Text => write_poly_text(&problem.energy),
                PolyFormat::Ising => write_ising_text(&to_ising(&problem.energy)?),
                PolyFormat::Json => serde_json::to_string_pretty(&problem.energy)? + "\n",
            };
            emit(None, text.as_bytes())?;
        }
        Command::Solve { enc, solver, seed, reads, sweeps, depth, restarts, topk } => {
            let problem = encode(&enc)?;
            let result = match solver {
                SolverKind::Exact => solve_exact(&problem)?,
                SolverKind::Sa => {
                    let params = SaParams { reads, sweeps, seed, ..Default::default() };
                    best_read(solve_sa(&problem, &params)?).context("no reads")?
                }
                SolverKind::Qaoa => {
                    let params = QaoaParams { depth, restarts, top_k: topk, seed, ..Default::default() };
                    solve_qaoa(&problem, &params)?
                }
            };
            emit(None, (serde_json::to_string_pretty(&result)? + "\n").as_bytes())?;
        }
        Command::Experiment { config, out } => {
            let cfg: ExperimentConfig = serde_json::from_str(&read(&config)?)
                .with_context(|| format!("parsing {}", config.display()))?;
            let out = out.or_else(|| cfg.output.clone());
            let format = match out.as_deref().and_then(Path::extension) {
                Some(ext) if ext == "json" => ReportFormat::Json,
                _ => ReportFormat::Csv,
            };
            let report = run_experiment(&cfg)?;
            emit(out.as_deref(), &emit_report(&report, format)?)?;
        }
        Command::Convert { input, out, quadratize } => {
            let text = match parse_model_text(&read(&input)?)? {
                ModelText::Binary(p) => {
                    let p = if quadratize && p.degree() > 2 { quadratize_rosenberg(&p).0 } else { p };
                    write_ising_text(&to_ising(&p)?)
                }
                ModelText::Ising(m) => write_poly_text(&m.to_binary()),
            };
            emit(out.as_deref(), text.as_bytes())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

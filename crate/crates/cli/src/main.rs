//! Command-line front end: reproducible pipelines over the graph
//! constructions, verifiers, zero-set statistics, solvers and
//! compositions.
//!
//! Every run derives its randomness from `--seed` through per-role
//! substreams, so identical invocations produce bit-identical artifacts
//! regardless of `--threads`. Reports are line-oriented `key=value`
//! text with a `#`-prefixed header carrying the command, seed and
//! version.
//!
//! Exit codes: 0 success, 1 runtime failure or a failed `--gate`,
//! 2 usage errors, 3 budget/feasibility errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use randalg::bigraph::{ColouredBipartiteGraph, GraphKind, Ratio};
use randalg::construct::{batch_sample_and_select, sample_panchromatic, sample_threshold, BatchKind};
use randalg::field::FieldElement;
use randalg::reduce::{
    clique_tgc_compose, maxcover_to_panchromatic, pgc_compose, tgc_compose, BijectionMode,
    SimpleGraph,
};
use randalg::rng::{role, role_stream};
use randalg::setsys::{
    monochromatic_number, solve_max_intersection, solve_maxcover, solve_min_coverage,
    solve_panchromatic, MaxCoverInstance, SetSystemInstance,
};
use randalg::verify::{
    bezout_exact, bezout_trials, vanish_probability_exact, verify_graph, VerifyMode,
};
use randalg::{Budget, Error};

#[derive(Parser)]
#[command(name = "randalg", version, about = "Random algebraic graphs over finite fields: generation, verification, composition", max_term_width = 100)]
struct Cli {
    /// Master seed for all randomized operations.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Cap on elementary operations for exhaustive modes.
    #[arg(long, global = true, default_value_t = Budget::DEFAULT.0)]
    budget: u64,

    /// Worker threads (parallel builds only; results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Threshold,
    Panchromatic,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Mc,
}

#[derive(Clone, Copy, ValueEnum)]
enum BijectionArg {
    Random,
    Canonical,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Maxint,
    Panchromatic,
    Mincov,
    Maxcover,
}

#[derive(Args)]
struct ReportArg {
    /// Also write the report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a threshold graph (n = q^(k+1) random polynomials).
    GenThreshold {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        report: ReportArg,
    },
    /// Sample a panchromatic graph (k classes of q^k shifted polynomials).
    GenPanchromatic {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        lambda: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        report: ReportArg,
    },
    /// Sample several graphs on independent substreams and keep the best.
    Batch {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        lambda: Option<u64>,
        #[arg(long)]
        trials: usize,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: ModeArg,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        report: ReportArg,
    },
    /// Check the defining completeness/soundness clauses of a graph.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: ModeArg,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// Exit 1 if verification fails.
        #[arg(long)]
        gate: bool,
        #[command(flatten)]
        report: ReportArg,
    },
    /// Histogram of Z = |common zero set| of k random polynomials.
    Bezout {
        #[arg(long)]
        k: usize,
        /// Comma-separated degrees, one per polynomial.
        #[arg(long, value_delimiter = ',')]
        degrees: Vec<u64>,
        #[arg(long)]
        q: u64,
        /// Enumerate the whole product space instead of sampling.
        #[arg(long, conflicts_with = "trials")]
        exact: bool,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[command(flatten)]
        report: ReportArg,
    },
    /// Exact probability that a random polynomial vanishes on given points.
    Vanish {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        q: u64,
        /// Points: coordinates comma-separated, points semicolon-separated
        /// (for k = 1 a plain comma list is one point per value).
        #[arg(long)]
        points: String,
        #[command(flatten)]
        report: ReportArg,
    },
    /// Exhaustive ground-truth solvers for set-system instances.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        problem: ProblemArg,
        /// Tuple size for maxint/mincov (and monochromatic number).
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        report: ReportArg,
    },
    /// Compose a coloured instance with a panchromatic graph.
    ComposePgc {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "random")]
        mode: BijectionArg,
        /// Monochromatic number; computed exhaustively when omitted.
        #[arg(long)]
        z: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        report: ReportArg,
    },
    /// Compose a MinCoverage instance with a threshold graph.
    ComposeTgc {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        report: ReportArg,
    },
    /// Compose a k-clique instance with a threshold graph.
    ComposeClique {
        #[arg(long)]
        graph0: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        report: ReportArg,
    },
    /// Read a Unique MaxCover instance as a coloured set system.
    ConvertMaxcover {
        #[arg(long)]
        instance: PathBuf,
        /// Completeness fraction, e.g. 1 or 3/4.
        #[arg(long)]
        c: String,
        /// Soundness fraction, e.g. 1/2.
        #[arg(long)]
        s: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        report: ReportArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads(cli.threads);
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::BudgetExceeded { .. } | Error::Overflow { .. } => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        // Ignore failure: the pool can only be configured once.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_threads: Option<usize>) {}

/// Header lines identifying a run; prefixed to every report.
fn run_header(seed: u64, budget: u64) -> String {
    let argv: Vec<String> = std::env::args().collect();
    format!(
        "# randalg {}\n# command: {}\n# seed={seed} budget={budget}\n",
        env!("CARGO_PKG_VERSION"),
        argv.join(" ")
    )
}

/// Prints the report to stdout and optionally writes it to a file.
fn emit(report: &ReportArg, header: &str, body: &str) -> randalg::Result<()> {
    print!("{header}{body}");
    if let Some(path) = &report.report {
        std::fs::write(path, format!("{header}{body}"))?;
    }
    Ok(())
}

fn write_graph(path: &Path, g: &ColouredBipartiteGraph) -> randalg::Result<()> {
    std::fs::write(path, g.serialize())?;
    Ok(())
}

fn read_graph(path: &Path) -> randalg::Result<ColouredBipartiteGraph> {
    let bytes = std::fs::read(path)?;
    ColouredBipartiteGraph::deserialize(&bytes)
}

fn read_setsystem(path: &Path) -> randalg::Result<SetSystemInstance> {
    SetSystemInstance::from_text(&std::fs::read_to_string(path)?)
}

fn parse_ratio(text: &str) -> randalg::Result<Ratio> {
    let parse_part = |p: &str| -> randalg::Result<u64> {
        p.trim().parse().map_err(|_| Error::ParseError {
            line: 0,
            what: format!("bad ratio component `{p}`"),
        })
    };
    match text.split_once('/') {
        Some((num, den)) => {
            let den = parse_part(den)?;
            if den == 0 {
                return Err(Error::ParseError {
                    line: 0,
                    what: "zero denominator".into(),
                });
            }
            Ok(Ratio::new(parse_part(num)?, den))
        }
        None => Ok(Ratio::integer(parse_part(text)?)),
    }
}

fn parse_points(text: &str, k: usize, q: u64) -> randalg::Result<Vec<Vec<FieldElement>>> {
    let spec = randalg::field::FieldSpec::new(q)?;
    let bad = |what: String| Error::ParseError { line: 0, what };
    let groups: Vec<&str> = text
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    let mut points = Vec::new();
    let mut push_point = |coords: Vec<u64>| -> randalg::Result<()> {
        if coords.len() != k {
            return Err(bad(format!(
                "point has {} coordinates, expected {k}",
                coords.len()
            )));
        }
        for &v in &coords {
            if v >= q {
                return Err(bad(format!("coordinate {v} outside F_{q}")));
            }
        }
        points.push(coords.into_iter().map(|v| spec.element(v)).collect());
        Ok(())
    };
    for group in &groups {
        let coords: Vec<u64> = group
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|_| bad(format!("bad coordinate `{s}`"))))
            .collect::<randalg::Result<_>>()?;
        if k == 1 && groups.len() == 1 && coords.len() > 1 {
            // `--points 1,2` with k = 1 is a list of univariate points.
            for v in coords {
                push_point(vec![v])?;
            }
        } else {
            push_point(coords)?;
        }
    }
    Ok(points)
}

fn graph_summary(g: &ColouredBipartiteGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "classes={}", g.classes());
    let sizes: Vec<String> = g.class_sizes().iter().map(|s| s.to_string()).collect();
    let _ = writeln!(out, "class_sizes={}", sizes.join(","));
    let _ = writeln!(out, "b_size={}", g.b_size());
    if let Some(p) = &g.params {
        let kind = match p.kind {
            GraphKind::Threshold => "threshold",
            GraphKind::Panchromatic => "panchromatic",
        };
        let _ = writeln!(out, "params_kind={kind}");
        let _ = writeln!(out, "q={}", p.q);
        let _ = writeln!(out, "k={}", p.k);
        let _ = writeln!(out, "d={}", p.d);
        if let Some(bd) = p.big_d {
            let _ = writeln!(out, "D={bd}");
        }
        if let Some(l) = p.lambda {
            let _ = writeln!(out, "lambda={l}");
        }
        let _ = writeln!(out, "t={}", p.t);
        let _ = writeln!(out, "s={}", p.s);
        let _ = writeln!(out, "soundness_vacuous={}", p.soundness_vacuous);
    }
    out
}

fn run(cli: &Cli) -> randalg::Result<ExitCode> {
    let budget = Budget(cli.budget);
    let header = run_header(cli.seed, cli.budget);
    match &cli.command {
        Command::GenThreshold { k, q, out, report } => {
            let mut rng = role_stream(cli.seed, role::GEN_THRESHOLD);
            let (g, _) = sample_threshold(*k, *q, budget, &mut rng)?;
            write_graph(out, &g)?;
            emit(report, &header, &graph_summary(&g))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::GenPanchromatic {
            k,
            lambda,
            q,
            out,
            report,
        } => {
            let mut rng = role_stream(cli.seed, role::GEN_PANCHROMATIC);
            let (g, _) = sample_panchromatic(*k, *lambda, *q, budget, &mut rng)?;
            write_graph(out, &g)?;
            emit(report, &header, &graph_summary(&g))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Batch {
            kind,
            k,
            q,
            lambda,
            trials,
            mode,
            samples,
            out,
            report,
        } => {
            let batch_kind = match kind {
                KindArg::Threshold => BatchKind::Threshold { k: *k, q: *q },
                KindArg::Panchromatic => BatchKind::Panchromatic {
                    k: *k,
                    lambda: lambda.ok_or(Error::InvalidInstance(
                        "--lambda is required for panchromatic batches".into(),
                    ))?,
                    q: *q,
                },
            };
            let vmode = match mode {
                ModeArg::Exhaustive => VerifyMode::Exhaustive,
                ModeArg::Mc => VerifyMode::MonteCarlo { samples: *samples },
            };
            let mut rng = role_stream(cli.seed, role::BATCH);
            let outcome = batch_sample_and_select(batch_kind, *trials, vmode, budget, &mut rng)?;
            write_graph(out, &outcome.graph)?;
            let mut body = graph_summary(&outcome.graph);
            let _ = writeln!(body, "trial={}", outcome.trial);
            let _ = writeln!(body, "trial_passed={}", outcome.passed);
            body.push_str(&outcome.report.to_text());
            emit(report, &header, &body)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            graph,
            kind,
            mode,
            samples,
            gate,
            report,
        } => {
            let g = read_graph(graph)?;
            let params = g.params.clone().ok_or(Error::InvalidInstance(
                "graph carries no construction parameters".into(),
            ))?;
            let expected = match kind {
                KindArg::Threshold => GraphKind::Threshold,
                KindArg::Panchromatic => GraphKind::Panchromatic,
            };
            if params.kind != expected {
                return Err(Error::InvalidInstance(format!(
                    "graph is {:?}, --kind says {:?}",
                    params.kind, expected
                )));
            }
            let vmode = match mode {
                ModeArg::Exhaustive => VerifyMode::Exhaustive,
                ModeArg::Mc => VerifyMode::MonteCarlo { samples: *samples },
            };
            let mut rng = role_stream(cli.seed, role::VERIFY);
            let rep = verify_graph(&g, &params, vmode, budget, &mut rng)?;
            emit(report, &header, &rep.to_text())?;
            if *gate && !rep.passed() {
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bezout {
            k,
            degrees,
            q,
            exact,
            trials,
            report,
        } => {
            let hist = if *exact {
                bezout_exact(*k, degrees, *q, budget)?
            } else {
                let mut rng = role_stream(cli.seed, role::BEZOUT);
                bezout_trials(*k, degrees, *q, *trials, budget, &mut rng)?
            };
            emit(report, &header, &hist.to_text())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Vanish {
            k,
            d,
            q,
            points,
            report,
        } => {
            let pts = parse_points(points, *k, *q)?;
            let rep = vanish_probability_exact(*k, *d, *q, &pts, budget)?;
            let body = format!("op=vanish\nk={k}\nd={d}\nq={q}\n{}", rep.to_text());
            emit(report, &header, &body)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve {
            instance,
            problem,
            k,
            report,
        } => {
            let mut body = String::new();
            match problem {
                ProblemArg::Maxcover => {
                    let mc = MaxCoverInstance::from_text(&std::fs::read_to_string(instance)?)?;
                    let (labeling, covered, fraction) = solve_maxcover(&mc, budget)?;
                    let lab: Vec<String> = labeling.iter().map(|v| v.to_string()).collect();
                    let _ = writeln!(body, "op=solve problem=maxcover");
                    let _ = writeln!(body, "labeling={}", lab.join(","));
                    let _ = writeln!(body, "covered={covered}");
                    let _ = writeln!(body, "fraction={fraction}");
                }
                ProblemArg::Panchromatic => {
                    let inst = read_setsystem(instance)?;
                    let (witness, value) = solve_panchromatic(&inst, budget)?;
                    let wit: Vec<String> = witness.iter().map(|v| v.to_string()).collect();
                    let _ = writeln!(body, "op=solve problem=panchromatic");
                    let _ = writeln!(body, "witness={}", wit.join(","));
                    let _ = writeln!(body, "value={value}");
                }
                ProblemArg::Maxint | ProblemArg::Mincov => {
                    let inst = read_setsystem(instance)?;
                    let k = k.ok_or(Error::InvalidInstance(
                        "--k is required for this problem".into(),
                    ))?;
                    let (witness, value) = match problem {
                        ProblemArg::Maxint => solve_max_intersection(&inst, k, budget)?,
                        _ => solve_min_coverage(&inst, k, budget)?,
                    };
                    let wit: Vec<String> = witness.iter().map(|v| v.to_string()).collect();
                    let name = match problem {
                        ProblemArg::Maxint => "maxint",
                        _ => "mincov",
                    };
                    let _ = writeln!(body, "op=solve problem={name}");
                    let _ = writeln!(body, "witness={}", wit.join(","));
                    let _ = writeln!(body, "value={value}");
                }
            }
            emit(report, &header, &body)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ComposePgc {
            instance,
            graph,
            mode,
            z,
            out,
            report,
        } => {
            let inst = read_setsystem(instance)?;
            let g = read_graph(graph)?;
            let bmode = match mode {
                BijectionArg::Random => BijectionMode::Random,
                BijectionArg::Canonical => BijectionMode::Canonical,
            };
            let mut rng = role_stream(cli.seed, role::COMPOSE);
            let outp = pgc_compose(&inst, &g, bmode, *z, budget, &mut rng)?;
            std::fs::write(out, outp.instance.to_text())?;
            let mut body = String::new();
            let _ = writeln!(body, "op=compose-pgc");
            let _ = writeln!(body, "sets={}", outp.instance.total_sets());
            let _ = writeln!(body, "universe={}", outp.instance.universe_size);
            let _ = writeln!(body, "c={}", outp.instance.c);
            let _ = writeln!(body, "s={}", outp.instance.s);
            let _ = writeln!(body, "z={}", outp.z);
            let _ = writeln!(body, "t={}", outp.t);
            let _ = writeln!(body, "w={}", outp.w);
            for (ci, pi) in outp.bijections.iter().enumerate() {
                let m: Vec<String> = pi.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(body, "bijection_{ci}={}", m.join(","));
            }
            emit(report, &header, &body)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ComposeTgc {
            instance,
            graph,
            out,
            report,
        } => {
            let inst = read_setsystem(instance)?;
            let g = read_graph(graph)?;
            let composed = tgc_compose(&inst, &g)?;
            std::fs::write(out, composed.to_text())?;
            let body = format!(
                "op=compose-tgc\nsets={}\nuniverse={}\nc={}\ns={}\n",
                composed.total_sets(),
                composed.universe_size,
                composed.c,
                composed.s
            );
            emit(report, &header, &body)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ComposeClique {
            graph0,
            graph,
            k,
            out,
            report,
        } => {
            let g0 = SimpleGraph::from_text(&std::fs::read_to_string(graph0)?)?;
            let g = read_graph(graph)?;
            let (composed, query) = clique_tgc_compose(&g0, &g, *k)?;
            std::fs::write(out, composed.to_text())?;
            let body = format!(
                "op=compose-clique\nsets={}\nuniverse={}\nc={}\ns={}\nquery_size={query}\n",
                composed.total_sets(),
                composed.universe_size,
                composed.c,
                composed.s
            );
            emit(report, &header, &body)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ConvertMaxcover {
            instance,
            c,
            s,
            out,
            report,
        } => {
            let mc = MaxCoverInstance::from_text(&std::fs::read_to_string(instance)?)?;
            let inst = maxcover_to_panchromatic(&mc, parse_ratio(c)?, parse_ratio(s)?)?;
            std::fs::write(out, inst.to_text())?;
            let z = monochromatic_number(&inst, mc.k(), budget)?;
            let body = format!(
                "op=convert-maxcover\ncollections={}\nuniverse={}\nc={}\ns={}\nz={z}\n",
                inst.k(),
                inst.universe_size,
                inst.c,
                inst.s
            );
            emit(report, &header, &body)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

//! `jsieve` — command-line surface of the blowup-tree engine.
//!
//! Exit codes: 0 success/clean, 1 constraint violations or infeasibility
//! found, 2 input error, 3 resource-limit abort.

mod audit;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use jsieve_core::dot::tree_to_dot;
use jsieve_core::lattice::determinant_labels;
use jsieve_core::linear::{solve_delta, solve_l, DeltaOptions, LOptions, LSolveError};
use jsieve_core::search::{search_streaming, RunConfig};
use jsieve_core::typing::TypingOptions;
use jsieve_core::{BlowupScript, CurveTree, DivisorClass, TypeAssignment};

const EXIT_VIOLATIONS: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(name = "jsieve", version, about = "Blowup-tree engine: replay, audit, solve, search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a blowup script and print the resulting tree as JSON.
    Replay { script: PathBuf },
    /// Check the label invariants and realizability of a tree.
    Check { tree: PathBuf },
    /// Print the set of final curves of a tree.
    Finals { tree: PathBuf },
    /// Print the determinant label of every vertex.
    DetLabels { tree: PathBuf },
    /// Validate a typing (and optionally L and Delta) layer by layer,
    /// one pass/fail line per rule.
    Audit {
        tree: PathBuf,
        types: PathBuf,
        l: Option<PathBuf>,
        delta: Option<PathBuf>,
        /// Skip the at-least-one-type-1 rule (C11).
        #[arg(long)]
        allow_no_type1: bool,
    },
    /// Solve for L and then search for Delta on a typed tree.
    Solve {
        tree: PathBuf,
        types: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Enumerate all trees up to a depth and run the full candidate
    /// pipeline, streaming reports as JSON lines.
    Search {
        /// Number of blowups to enumerate up to.
        #[arg(long)]
        depth: Option<usize>,
        #[command(flatten)]
        solver: SolverArgs,
        /// Report candidates whose section bound reaches this value.
        #[arg(long)]
        score_threshold: Option<i64>,
        /// Log per-candidate rejection traces to stderr and keep filter
        /// traces in reports.
        #[arg(long)]
        verbose_trace: bool,
        /// Worker threads (0 = automatic). `JSIEVE_WORKERS` overrides.
        #[arg(long)]
        workers: Option<usize>,
        /// Abort with a partial summary after visiting this many trees.
        #[arg(long)]
        max_trees: Option<u64>,
        /// Write reports to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write one DOT file per report into this directory.
        #[arg(long)]
        emit_dot: Option<PathBuf>,
        /// Write the run summary as JSON to this file.
        #[arg(long)]
        summary_json: Option<PathBuf>,
        /// Read defaults from a JSON config file (flags win over it).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Print a tree in Graphviz DOT form.
    ExportDot { tree: PathBuf },
}

#[derive(Args, Clone, Copy, Default)]
struct SolverArgs {
    /// Upper bound for each Delta coefficient.
    #[arg(long)]
    delta_cap: Option<i64>,
    /// Stop the Delta search after this many solutions.
    #[arg(long)]
    result_cap: Option<usize>,
    /// Permit negative L coefficients.
    #[arg(long)]
    allow_negative_l: bool,
    /// Skip the at-least-one-type-1 rule (C11).
    #[arg(long)]
    allow_no_type1: bool,
}

/// Optional config-file form of the search knobs.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    depth: Option<usize>,
    delta_cap: Option<i64>,
    result_cap: Option<usize>,
    score_threshold: Option<i64>,
    allow_negative_l: Option<bool>,
    allow_no_type1: Option<bool>,
    verbose_trace: Option<bool>,
    workers: Option<usize>,
    max_trees: Option<u64>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }

    fn violations(message: impl Into<String>) -> Self {
        Failure { code: EXIT_VIOLATIONS, message: message.into() }
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_tree(path: &Path) -> Result<CurveTree, Failure> {
    let text = read_file(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("{}: bad tree JSON: {e}", path.display())))
}

fn load_types(path: &Path) -> Result<TypeAssignment, Failure> {
    let text = read_file(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("{}: bad type assignment JSON: {e}", path.display())))
}

fn load_divisor(path: &Path) -> Result<DivisorClass, Failure> {
    let text = read_file(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("{}: bad divisor JSON: {e}", path.display())))
}

fn dispatch(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Replay { script } => cmd_replay(&script),
        Command::Check { tree } => cmd_check(&tree),
        Command::Finals { tree } => cmd_finals(&tree),
        Command::DetLabels { tree } => cmd_det_labels(&tree),
        Command::Audit { tree, types, l, delta, allow_no_type1 } => {
            audit::run(&tree, &types, l.as_deref(), delta.as_deref(), allow_no_type1)
        }
        Command::Solve { tree, types, solver } => cmd_solve(&tree, &types, &solver),
        Command::Search {
            depth,
            solver,
            score_threshold,
            verbose_trace,
            workers,
            max_trees,
            out,
            emit_dot,
            summary_json,
            config,
        } => cmd_search(SearchInvocation {
            depth,
            solver,
            score_threshold,
            verbose_trace,
            workers,
            max_trees,
            out,
            emit_dot,
            summary_json,
            config,
        }),
        Command::ExportDot { tree } => {
            let t = load_tree(&tree)?;
            print!("{}", tree_to_dot(&t, None, None, None));
            Ok(0)
        }
    }
}

fn cmd_replay(path: &Path) -> CmdResult {
    let text = read_file(path)?;
    let script = BlowupScript::parse(&text)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let tree = script
        .replay()
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    println!("{}", serde_json::to_string_pretty(&tree).expect("tree serializes"));
    Ok(0)
}

fn cmd_check(path: &Path) -> CmdResult {
    let tree = load_tree(path)?;
    let mut dirty = false;
    for v in tree.check_invariants() {
        println!("violation: {v}");
        dirty = true;
    }
    if !tree.realizable() {
        println!("violation: not reachable from the initial tree by reverse blowdown");
        dirty = true;
    }
    if dirty {
        Ok(EXIT_VIOLATIONS)
    } else {
        println!("clean");
        Ok(0)
    }
}

fn cmd_finals(path: &Path) -> CmdResult {
    let tree = load_tree(path)?;
    let finals = tree
        .final_curves()
        .map_err(|e| Failure::violations(e.to_string()))?;
    let ids: Vec<u32> = finals.iter().map(|v| v.0).collect();
    println!("{}", serde_json::to_string(&ids).expect("ids serialize"));
    Ok(0)
}

fn cmd_det_labels(path: &Path) -> CmdResult {
    let tree = load_tree(path)?;
    let labels = determinant_labels(&tree);
    let map: std::collections::BTreeMap<String, String> = tree
        .ids()
        .zip(labels)
        .map(|(v, d)| (v.to_string(), d.to_string()))
        .collect();
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::json!({ "labels": map }))
            .expect("labels serialize")
    );
    Ok(0)
}

fn cmd_solve(tree_path: &Path, types_path: &Path, args: &SolverArgs) -> CmdResult {
    let tree = load_tree(tree_path)?;
    let types = load_types(types_path)?;
    let topts = TypingOptions { require_type1: !args.allow_no_type1 };
    let lopts = LOptions { allow_negative: args.allow_negative_l };
    let dopts = DeltaOptions {
        coeff_cap: args.delta_cap.unwrap_or(64),
        result_cap: args.result_cap.unwrap_or(128),
    };
    if dopts.coeff_cap < 1 || dopts.result_cap < 1 {
        return Err(Failure::input("caps must be at least 1"));
    }

    let lsol = match solve_l(&tree, &types, &topts, &lopts) {
        Ok(sol) => sol,
        Err(LSolveError::InvalidAssignment(violations)) => {
            for v in violations {
                println!("violation: {v}");
            }
            return Ok(EXIT_VIOLATIONS);
        }
        Err(LSolveError::Typing(e)) => return Err(Failure::input(e.to_string())),
        Err(err) => {
            let code = err.code().map(|c| c.to_string()).unwrap_or_default();
            println!(
                "{}",
                serde_json::json!({ "failure": code, "detail": err.to_string() })
            );
            return Ok(EXIT_VIOLATIONS);
        }
    };

    let delta = solve_delta(&tree, &types, &lsol.class, &dopts);
    let rr = jsieve_core::lattice::rr_lower_bound(&tree, &lsol.class)
        .expect("solved L is integral");
    let deltas: Vec<serde_json::Value> = delta
        .solutions
        .iter()
        .map(|d| {
            serde_json::json!({
                "coeffs": d.class,
                "slope": d
                    .slope
                    .iter()
                    .map(|(v, s)| {
                        (
                            v.to_string(),
                            s.as_ref().map(jsieve_core::lattice::rational_to_string),
                        )
                    })
                    .collect::<std::collections::BTreeMap<_, _>>(),
            })
        })
        .collect();
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::json!({
            "L": lsol.class,
            "deltas": deltas,
            "delta_cap_exhausted": delta.cap_exhausted,
            "rr_bound": jsieve_core::lattice::rational_to_string(&rr),
        }))
        .expect("solution serializes")
    );
    if delta.solutions.is_empty() {
        Ok(EXIT_VIOLATIONS)
    } else {
        Ok(0)
    }
}

struct SearchInvocation {
    depth: Option<usize>,
    solver: SolverArgs,
    score_threshold: Option<i64>,
    verbose_trace: bool,
    workers: Option<usize>,
    max_trees: Option<u64>,
    out: Option<PathBuf>,
    emit_dot: Option<PathBuf>,
    summary_json: Option<PathBuf>,
    config: Option<PathBuf>,
}

fn cmd_search(inv: SearchInvocation) -> CmdResult {
    let file_cfg: FileConfig = match &inv.config {
        Some(path) => {
            let text = read_file(path)?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::input(format!("{}: bad config: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };

    let defaults = RunConfig::default();
    // precedence: flags over config file over defaults; JSIEVE_WORKERS
    // overrides the worker count from any source
    let mut config = RunConfig {
        max_blowups: inv
            .depth
            .or(file_cfg.depth)
            .ok_or_else(|| Failure::input("--depth is required (or `depth` in --config)"))?,
        delta_coeff_cap: inv
            .solver
            .delta_cap
            .or(file_cfg.delta_cap)
            .unwrap_or(defaults.delta_coeff_cap),
        delta_result_cap: inv
            .solver
            .result_cap
            .or(file_cfg.result_cap)
            .unwrap_or(defaults.delta_result_cap),
        score_threshold: inv
            .score_threshold
            .or(file_cfg.score_threshold)
            .unwrap_or(defaults.score_threshold),
        allow_negative_l: inv.solver.allow_negative_l
            || file_cfg.allow_negative_l.unwrap_or(false),
        allow_no_type1: inv.solver.allow_no_type1 || file_cfg.allow_no_type1.unwrap_or(false),
        verbose_trace: inv.verbose_trace || file_cfg.verbose_trace.unwrap_or(false),
        workers: inv.workers.or(file_cfg.workers).unwrap_or(defaults.workers),
        max_trees: inv.max_trees.or(file_cfg.max_trees),
    };
    if let Ok(env_workers) = std::env::var("JSIEVE_WORKERS") {
        config.workers = env_workers
            .parse()
            .map_err(|_| Failure::input(format!("JSIEVE_WORKERS={env_workers:?} is not a number")))?;
    }
    config.validate().map_err(|e| Failure::input(e.to_string()))?;

    if let Some(dir) = &inv.emit_dot {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
    }

    let mut sink: BufWriter<Box<dyn Write>> = BufWriter::new(match &inv.out {
        Some(path) => Box::new(
            File::create(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?,
        ),
        None => Box::new(std::io::stdout()),
    });

    let mut report_index = 0u64;
    let emit_dot_dir = inv.emit_dot.clone();
    let summary = search_streaming(&config, |report| {
        serde_json::to_writer(&mut sink, report)?;
        sink.write_all(b"\n")?;
        if let Some(dir) = &emit_dot_dir {
            let first_delta = report.deltas.first().map(|d| &d.coeffs);
            let dot = tree_to_dot(&report.tree, Some(&report.types), Some(&report.l), first_delta);
            fs::write(dir.join(format!("report-{report_index:06}.dot")), dot)?;
        }
        report_index += 1;
        Ok(())
    })
    .map_err(|e| Failure::input(e.to_string()))?;
    sink.flush().map_err(|e| Failure::input(e.to_string()))?;

    let depth_counts: Vec<String> = summary.depth_counts.iter().map(u64::to_string).collect();
    eprintln!(
        "search: depth {} ({}), visited {} trees [{}], {} reports, wall {} ms{}",
        summary.completed_depth,
        if summary.incomplete { "incomplete" } else { "complete" },
        summary.visited,
        depth_counts.join(","),
        summary.report_count,
        summary.wall_ms,
        if summary.rejections.is_empty() {
            String::new()
        } else {
            format!(
                ", rejections: {}",
                summary
                    .rejections
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            )
        }
    );
    if let Some(path) = &inv.summary_json {
        fs::write(
            path,
            serde_json::to_string_pretty(&summary).expect("summary serializes"),
        )
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    }

    if summary.incomplete {
        Ok(EXIT_RESOURCE)
    } else {
        Ok(0)
    }
}

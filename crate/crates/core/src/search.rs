//! Isomorph-free enumeration of blowup trees and the candidate pipeline.
//!
//! Enumeration is by extension of canonical representatives: the frontier
//! at each depth holds one witness per isomorphism class, every one-step
//! blowup of every representative is generated, and children are
//! deduplicated by canonical key. Each visited tree then runs through the
//! filter chain: typing, the determinant-label sign filter on type-1
//! curves, the `L` solve, the `Delta` search, and the section-count score.
//!
//! With the `parallel` feature (on by default) and more than one worker,
//! frontier expansion and per-tree pipelines fan out over a rayon pool;
//! children are collected in frontier order and sorted by key before
//! deduplication, so the output stream is byte-identical for any worker
//! count.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;

use crate::canon;
use crate::graph::{CurveTree, VertexId};
use crate::lattice::{self, DivisorClass};
use crate::linear::{
    solve_delta, solve_l_unchecked, DeltaOptions, DeltaSolution, LOptions, LSolveError,
};
use crate::script::{BlowupScript, Step};
use crate::typing::{self, TypeAssignment, TypingOptions};

/// Isomorphism-invariant key of a tree (label- and root-preserving). Equal
/// keys mean isomorphic trees; the key is plain ASCII.
pub fn canonical_key(t: &CurveTree) -> String {
    String::from_utf8(canon::canonical_code(t)).expect("code is ASCII")
}

/// One visited isomorphism class with its witness script.
#[derive(Debug, Clone)]
pub struct EnumeratedTree {
    pub depth: usize,
    pub key: String,
    pub tree: CurveTree,
    pub script: BlowupScript,
}

/// The moves applicable to a tree, in deterministic generation order.
fn moves_of(t: &CurveTree) -> impl Iterator<Item = Step> + '_ {
    t.ids()
        .map(Step::Point)
        .chain(t.edges().iter().map(|&(a, b)| Step::Edge(VertexId(a), VertexId(b))))
}

fn apply(t: &CurveTree, step: Step) -> CurveTree {
    match step {
        Step::Point(v) => t.blowup_point(v).expect("id in range"),
        Step::Edge(a, b) => t.blowup_edge(a, b).expect("edge exists"),
    }
}

/// A generated child before materialization: the canonical key plus the
/// move that produces it from its parent. Keeping the frontier expansion
/// down to these keeps the cross-thread traffic of a parallel run to the
/// key bytes; losers of the deduplication never materialize at all.
struct RawChild {
    key: String,
    parent: u32,
    step: Step,
}

/// Keys every one-step blowup of a tree. The child trees are transient.
fn expand_keys(parent_index: usize, parent: &EnumeratedTree) -> Vec<RawChild> {
    moves_of(&parent.tree)
        .map(|step| RawChild {
            key: canonical_key(&apply(&parent.tree, step)),
            parent: parent_index as u32,
            step,
        })
        .collect()
}

/// Sorts raw children by key, keeps the first witness of each class, and
/// materializes the survivors. Stable order makes the kept witness (and so
/// the whole stream) independent of worker count.
fn materialize_frontier(
    frontier: &[EnumeratedTree],
    mut raw: Vec<RawChild>,
) -> Vec<EnumeratedTree> {
    raw.sort_by(|a, b| a.key.cmp(&b.key));
    raw.dedup_by(|a, b| a.key == b.key);
    raw.into_iter()
        .map(|c| {
            let parent = &frontier[c.parent as usize];
            let mut script = parent.script.clone();
            script.steps.push(c.step);
            EnumeratedTree {
                depth: parent.depth + 1,
                key: c.key,
                tree: apply(&parent.tree, c.step),
                script,
            }
        })
        .collect()
}

/// Visits every isomorphism class of tree reachable with at most
/// `max_blowups` moves, exactly once, in deterministic order (by depth,
/// then sorted canonical key). Sequential; the parallel variant lives in
/// [`search_streaming`].
pub fn enumerate<F: FnMut(&EnumeratedTree)>(max_blowups: usize, mut visit: F) {
    let tree = CurveTree::initial();
    let mut frontier = vec![EnumeratedTree {
        depth: 0,
        key: canonical_key(&tree),
        tree,
        script: BlowupScript::default(),
    }];
    visit(&frontier[0]);
    for _ in 0..max_blowups {
        let raw: Vec<RawChild> = frontier
            .iter()
            .enumerate()
            .flat_map(|(i, p)| expand_keys(i, p))
            .collect();
        frontier = materialize_frontier(&frontier, raw);
        for t in &frontier {
            visit(t);
        }
    }
}

/// Number of isomorphism classes at each depth `0..=max_blowups`.
pub fn class_counts(max_blowups: usize) -> Vec<u64> {
    let mut counts = vec![0u64; max_blowups + 1];
    enumerate(max_blowups, |t| counts[t.depth] += 1);
    counts
}

/// Knobs of a full search run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub max_blowups: usize,
    /// Per-coefficient bound of the `Delta` search.
    pub delta_coeff_cap: i64,
    /// Solution-count bound of the `Delta` search.
    pub delta_result_cap: usize,
    /// Report a candidate only when its section-count bound reaches this.
    pub score_threshold: i64,
    pub allow_negative_l: bool,
    pub allow_no_type1: bool,
    /// Keep per-candidate filter traces in reports and collect rejection
    /// details.
    pub verbose_trace: bool,
    /// Worker threads: 0 picks the rayon default, 1 forces the sequential
    /// path.
    pub workers: usize,
    /// Abort (with a partial summary) once this many trees were visited.
    pub max_trees: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            max_blowups: 8,
            delta_coeff_cap: 64,
            delta_result_cap: 128,
            score_threshold: 2,
            allow_negative_l: false,
            allow_no_type1: false,
            verbose_trace: false,
            workers: 0,
            max_trees: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("delta coefficient cap must be at least 1")]
    BadCoeffCap,
    #[error("delta result cap must be at least 1")]
    BadResultCap,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.delta_coeff_cap < 1 {
            return Err(ConfigError::BadCoeffCap);
        }
        if self.delta_result_cap < 1 {
            return Err(ConfigError::BadResultCap);
        }
        Ok(())
    }

    fn typing_options(&self) -> TypingOptions {
        TypingOptions { require_type1: !self.allow_no_type1 }
    }

    fn l_options(&self) -> LOptions {
        LOptions { allow_negative: self.allow_negative_l }
    }

    fn delta_options(&self) -> DeltaOptions {
        DeltaOptions { coeff_cap: self.delta_coeff_cap, result_cap: self.delta_result_cap }
    }
}

/// One filter-trace entry of a report.
#[derive(Debug, Clone, Serialize)]
pub struct TraceEntry {
    pub filter: String,
    pub pass: bool,
    pub detail: String,
}

/// A `Delta` solution as reported: the class plus the slope at each type-2
/// vertex (`null` where the slope is undefined).
#[derive(Debug, Clone, Serialize)]
pub struct DeltaReport {
    pub coeffs: DivisorClass,
    pub slope: BTreeMap<String, Option<String>>,
}

impl DeltaReport {
    fn new(d: &DeltaSolution) -> Self {
        DeltaReport {
            coeffs: d.class.clone(),
            slope: d
                .slope
                .iter()
                .map(|(v, s)| {
                    (v.to_string(), s.as_ref().map(lattice::rational_to_string))
                })
                .collect(),
        }
    }
}

/// A configuration that passed every filter: the tree with its witness
/// script, the assignment, `L`, all feasible `Delta`s found, and the
/// section-count lower bound.
#[derive(Debug, Clone, Serialize)]
pub struct CandidateReport {
    pub key: String,
    pub depth: usize,
    pub script: BlowupScript,
    pub tree: CurveTree,
    pub types: TypeAssignment,
    #[serde(rename = "L")]
    pub l: DivisorClass,
    pub deltas: Vec<DeltaReport>,
    pub delta_cap_exhausted: bool,
    pub rr_bound: i64,
    pub filter_trace: Vec<TraceEntry>,
}

/// A rejected (tree, assignment) pair: which stage failed and why.
#[derive(Debug, Clone)]
pub struct Rejection {
    pub key: String,
    pub stage: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct PipelineOutcome {
    pub reports: Vec<CandidateReport>,
    /// Histogram keys of failed stages, one entry per rejected candidate.
    pub rejected_stages: Vec<String>,
    /// Populated only in verbose mode.
    pub rejections: Vec<Rejection>,
}

fn stage_of(err: &LSolveError) -> String {
    match err.code() {
        Some(code) => format!("solve-l:{code}"),
        None => "solve-l:Precondition".to_string(),
    }
}

/// Runs the filter chain on one enumerated tree. Failures are data, not
/// errors; each candidate assignment contributes either a report or a
/// rejection stage.
pub fn pipeline(entry: &EnumeratedTree, config: &RunConfig) -> PipelineOutcome {
    let mut out = PipelineOutcome::default();
    let t = &entry.tree;

    let reject = |out: &mut PipelineOutcome, stage: &str, detail: String| {
        out.rejected_stages.push(stage.to_string());
        if config.verbose_trace {
            out.rejections.push(Rejection {
                key: entry.key.clone(),
                stage: stage.to_string(),
                detail,
            });
        }
    };

    // engine-produced trees always pass; guarded for externally built ones
    let violations = t.check_invariants();
    if !violations.is_empty() {
        reject(&mut out, "invariants", format!("{} label violations", violations.len()));
        return out;
    }

    let finals = match t.final_curves() {
        Ok(f) => f,
        Err(_) => {
            reject(&mut out, "invariants", "tree is not realizable".into());
            return out;
        }
    };

    let assignments = typing::admissible_with_finals(t, &finals, &config.typing_options());
    if assignments.is_empty() {
        reject(&mut out, "typing", "no admissible type assignment".into());
        return out;
    }

    let det_labels = lattice::determinant_labels(t);
    for ta in assignments {
        let mut trace: Vec<TraceEntry> = Vec::new();
        let push_trace = |trace: &mut Vec<TraceEntry>, filter: &str, pass: bool, detail: String| {
            if config.verbose_trace {
                trace.push(TraceEntry { filter: filter.into(), pass, detail });
            }
        };
        push_trace(&mut trace, "typing", true, String::new());

        // determinant filter: every type-1 curve needs a negative label
        let bad_det: Vec<VertexId> = ta
            .vertices_of(crate::typing::CurveType::Type1)
            .into_iter()
            .filter(|v| !det_labels[v.index()].is_negative())
            .collect();
        if !bad_det.is_empty() {
            reject(
                &mut out,
                "determinant",
                format!("nonnegative determinant label at {bad_det:?}"),
            );
            continue;
        }
        push_trace(&mut trace, "determinant", true, String::new());

        // the L solve; an underdetermined system fans out over kernel
        // coset representatives in a small box
        let l_solutions = match solve_l_unchecked(t, &ta, &config.l_options()) {
            Ok(sol) => vec![sol],
            Err(LSolveError::Underdetermined { particular, kernel }) => {
                let candidates =
                    kernel_box_candidates(t, &ta, &particular, &kernel, &config.l_options());
                if candidates.is_empty() {
                    reject(
                        &mut out,
                        "solve-l:Underdetermined",
                        format!("no integral candidate in the kernel box (dim {})", kernel.len()),
                    );
                    continue;
                }
                candidates
            }
            Err(err) => {
                reject(&mut out, &stage_of(&err), err.to_string());
                continue;
            }
        };

        for lsol in l_solutions {
            let mut trace = trace.clone();
            push_trace(&mut trace, "solve-l", true, format!("L = {}", lsol.class));

            let delta = solve_delta(t, &ta, &lsol.class, &config.delta_options());
            if delta.solutions.is_empty() {
                let detail = if delta.cap_exhausted {
                    "no Delta found before the cap".to_string()
                } else {
                    "no feasible Delta".to_string()
                };
                reject(&mut out, "delta", detail);
                continue;
            }
            push_trace(
                &mut trace,
                "delta",
                true,
                format!("{} solutions", delta.solutions.len()),
            );

            let rr = lattice::rr_lower_bound(t, &lsol.class).expect("L is integral");
            debug_assert!(rr.is_integer(), "section-count bound must be an integer");
            let rr_bound = rational_to_i64(&rr);
            if rr_bound < config.score_threshold {
                reject(&mut out, "score", format!("bound {rr_bound} below threshold"));
                continue;
            }
            push_trace(&mut trace, "score", true, format!("bound {rr_bound}"));

            out.reports.push(CandidateReport {
                key: entry.key.clone(),
                depth: entry.depth,
                script: entry.script.clone(),
                tree: t.clone(),
                types: ta.clone(),
                l: lsol.class.clone(),
                deltas: delta.solutions.iter().map(DeltaReport::new).collect(),
                delta_cap_exhausted: delta.cap_exhausted,
                rr_bound,
                filter_trace: trace,
            });
        }
    }
    out
}

fn rational_to_i64(r: &BigRational) -> i64 {
    i64::try_from(r.to_integer()).expect("section bound fits machine width")
}

/// Integral candidates `particular + sum c_i * kernel_i` with every
/// `|c_i|` at most [`KERNEL_BOX`], validated like a unique solution.
fn kernel_box_candidates(
    t: &CurveTree,
    ta: &TypeAssignment,
    particular: &DivisorClass,
    kernel: &[DivisorClass],
    opts: &LOptions,
) -> Vec<crate::linear::LSolution> {
    const KERNEL_BOX: i64 = 2;
    let dim = kernel.len();
    if dim > 8 {
        // box would explode; report nothing rather than pretend coverage
        return Vec::new();
    }
    let mut found = Vec::new();
    let width = 2 * KERNEL_BOX + 1;
    let total = (width as u64).pow(dim as u32);
    for idx in 0..total {
        let mut candidate = particular.clone();
        let mut rem = idx;
        for k in kernel {
            let c = (rem % width as u64) as i64 - KERNEL_BOX;
            rem /= width as u64;
            if c != 0 {
                candidate.scaled_add(&BigRational::from(BigInt::from(c)), k);
            }
        }
        if let Ok(sol) = crate::linear::finish_l(t, ta, candidate, opts) {
            found.push(sol);
        }
    }
    found.sort_by(|a, b| a.class.cmp(&b.class));
    found.dedup_by(|a, b| a.class == b.class);
    found
}

/// Totals of a search run. Wall time lives only here, never in report
/// payloads, so report files stay byte-identical across runs.
#[derive(Debug, Clone, Serialize)]
pub struct SearchSummary {
    pub max_blowups: usize,
    /// Trees visited per depth, `0..=completed_depth`.
    pub depth_counts: Vec<u64>,
    pub completed_depth: usize,
    pub visited: u64,
    pub report_count: u64,
    pub rejections: BTreeMap<String, u64>,
    pub incomplete: bool,
    pub wall_ms: u128,
}

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("report sink failed: {0}")]
    Sink(#[from] std::io::Error),
}

/// Full search: enumerate, pipeline every class, stream reports in
/// deterministic order. The sink sees each report exactly once, ordered by
/// depth then canonical key.
pub fn search_streaming<F>(config: &RunConfig, mut sink: F) -> Result<SearchSummary, SearchError>
where
    F: FnMut(&CandidateReport) -> std::io::Result<()>,
{
    config.validate()?;
    let started = Instant::now();
    let exec = Exec::new(config.workers);

    let tree = CurveTree::initial();
    let mut frontier = vec![EnumeratedTree {
        depth: 0,
        key: canonical_key(&tree),
        tree,
        script: BlowupScript::default(),
    }];

    let mut summary = SearchSummary {
        max_blowups: config.max_blowups,
        depth_counts: Vec::new(),
        completed_depth: 0,
        visited: 0,
        report_count: 0,
        rejections: BTreeMap::new(),
        incomplete: false,
        wall_ms: 0,
    };
    let mut verbose_rejections: Vec<Rejection> = Vec::new();

    let mut depth = 0usize;
    loop {
        summary.depth_counts.push(frontier.len() as u64);
        summary.visited += frontier.len() as u64;
        summary.completed_depth = depth;

        let outcomes = run_pipelines(&frontier, config, &exec);
        for outcome in outcomes {
            for stage in outcome.rejected_stages {
                *summary.rejections.entry(stage).or_insert(0) += 1;
            }
            if config.verbose_trace {
                verbose_rejections.extend(outcome.rejections);
            }
            for report in outcome.reports {
                summary.report_count += 1;
                sink(&report)?;
            }
        }

        if let Some(cap) = config.max_trees {
            if summary.visited >= cap && depth < config.max_blowups {
                summary.incomplete = true;
                break;
            }
        }
        if depth == config.max_blowups {
            break;
        }
        frontier = next_frontier(&frontier, &exec);
        depth += 1;
    }

    if config.verbose_trace {
        for r in &verbose_rejections {
            eprintln!("reject [{}] {}: {}", r.stage, r.key, r.detail);
        }
    }
    summary.wall_ms = started.elapsed().as_millis();
    Ok(summary)
}

/// How a run executes: sequential, on the ambient rayon pool, or on a
/// dedicated pool built once for the run.
#[cfg(feature = "parallel")]
enum Exec {
    Sequential,
    Ambient,
    Pool(rayon::ThreadPool),
}

#[cfg(not(feature = "parallel"))]
struct Exec;

impl Exec {
    #[cfg(feature = "parallel")]
    fn new(workers: usize) -> Self {
        match workers {
            1 => Exec::Sequential,
            0 => Exec::Ambient,
            n => Exec::Pool(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .expect("thread pool"),
            ),
        }
    }

    #[cfg(not(feature = "parallel"))]
    fn new(_workers: usize) -> Self {
        Exec
    }
}

#[cfg(feature = "parallel")]
fn next_frontier(frontier: &[EnumeratedTree], exec: &Exec) -> Vec<EnumeratedTree> {
    use rayon::prelude::*;
    let raw: Vec<RawChild> = match exec {
        Exec::Sequential => frontier
            .iter()
            .enumerate()
            .flat_map(|(i, p)| expand_keys(i, p))
            .collect(),
        Exec::Ambient => frontier
            .par_iter()
            .enumerate()
            .flat_map_iter(|(i, p)| expand_keys(i, p))
            .collect(),
        Exec::Pool(pool) => pool.install(|| {
            frontier
                .par_iter()
                .enumerate()
                .flat_map_iter(|(i, p)| expand_keys(i, p))
                .collect()
        }),
    };
    materialize_frontier(frontier, raw)
}

#[cfg(not(feature = "parallel"))]
fn next_frontier(frontier: &[EnumeratedTree], _exec: &Exec) -> Vec<EnumeratedTree> {
    let raw: Vec<RawChild> = frontier
        .iter()
        .enumerate()
        .flat_map(|(i, p)| expand_keys(i, p))
        .collect();
    materialize_frontier(frontier, raw)
}

#[cfg(feature = "parallel")]
fn run_pipelines(
    frontier: &[EnumeratedTree],
    config: &RunConfig,
    exec: &Exec,
) -> Vec<PipelineOutcome> {
    use rayon::prelude::*;
    match exec {
        Exec::Sequential => frontier.iter().map(|e| pipeline(e, config)).collect(),
        Exec::Ambient => frontier.par_iter().map(|e| pipeline(e, config)).collect(),
        Exec::Pool(p) => {
            p.install(|| frontier.par_iter().map(|e| pipeline(e, config)).collect::<Vec<_>>())
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn run_pipelines(
    frontier: &[EnumeratedTree],
    config: &RunConfig,
    _exec: &Exec,
) -> Vec<PipelineOutcome> {
    frontier.iter().map(|e| pipeline(e, config)).collect()
}

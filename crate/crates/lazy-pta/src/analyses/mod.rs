//! Top-level analysis drivers: the lazy analysis (intra- and
//! interprocedural), the liveness-free variant, the conventional may
//! analysis, Andersen's analysis, must-extraction, the sanity check, the
//! execution oracle, and the test-program corpus.

mod andersen;
mod conventional;
mod corpus;
mod inline;
mod oracle;

pub use andersen::run_andersen;
pub use conventional::run_conventional_may;
pub use corpus::{generate_program, CorpusParams};
pub use inline::inline_program;
pub use oracle::{oracle_enumerate, OracleConfig, OracleResult};

use std::collections::BTreeMap;

use crate::callstrings::{
    interproc_solve, lookup_longest_prefix, CallString, Direction, InterResult,
};
use crate::dataflow::{
    intraproc_solve, must, rel_restrict, transfer_liveness, transfer_points_to, IntraConfig,
    NodeFacts, PtRel, SolveStats, Universe, VarSet,
};
use crate::lang::{
    build_cfg, build_supergraph, NodeKind, Program, Stmt, Supergraph, Tag, UNDEF,
};
use crate::{Error, Result};

/// Node identity and display data, shared by every analysis mode.
#[derive(Clone, Debug)]
pub struct NodeMeta {
    /// 1-based display id.
    pub id: usize,
    pub proc: String,
    pub stmt: Stmt,
    pub kind: NodeKind,
    pub tag: Option<Tag>,
}

/// Per-context tables kept from an interprocedural run.
#[derive(Clone, Debug, Default)]
pub struct Contexts {
    pub lin: Vec<BTreeMap<CallString, VarSet>>,
    pub lout: Vec<BTreeMap<CallString, VarSet>>,
    pub ain: Vec<BTreeMap<CallString, PtRel>>,
    pub aout: Vec<BTreeMap<CallString, PtRel>>,
}

#[derive(Clone, Debug)]
pub struct AnalysisResult {
    pub metas: Vec<NodeMeta>,
    /// Merged (over contexts) per-node facts.
    pub facts: Vec<NodeFacts>,
    pub uin: Vec<PtRel>,
    pub uout: Vec<PtRel>,
    pub contexts: Option<Contexts>,
    pub stats: SolveStats,
    /// Flow-insensitive summary (Andersen only).
    pub summary: Option<PtRel>,
}

impl AnalysisResult {
    pub fn node_by_display_id(&self, id: usize) -> usize {
        id - 1
    }

    /// Σ_n (|Ain_n| + |Aout_n|).
    pub fn total_pairs(&self) -> usize {
        self.facts.iter().map(|f| f.ain.len() + f.aout.len()).sum()
    }

    /// |∪_n (Ain_n ∪ Aout_n)|.
    pub fn distinct_pairs(&self) -> usize {
        let mut all = PtRel::new();
        for f in &self.facts {
            all.extend(f.ain.iter().cloned());
            all.extend(f.aout.iter().cloned());
        }
        all.len()
    }
}

#[derive(Clone, Debug)]
pub struct LptaOptions {
    pub interprocedural: bool,
    pub eager: bool,
    pub round_limit: usize,
    /// Stop after this many liveness/points-to rounds even if not yet
    /// stable (diagnostic probes of intermediate rounds).
    pub round_cap: Option<usize>,
    pub iteration_limit: usize,
}

impl Default for LptaOptions {
    fn default() -> Self {
        LptaOptions {
            interprocedural: false,
            eager: false,
            round_limit: 64,
            round_cap: None,
            iteration_limit: 1_000_000,
        }
    }
}

fn cfg_metas(cfg: &crate::lang::Cfg) -> Vec<NodeMeta> {
    cfg.nodes
        .iter()
        .enumerate()
        .map(|(i, n)| NodeMeta {
            id: i + 1,
            proc: cfg.proc_name.clone(),
            stmt: n.stmt.clone(),
            kind: n.kind,
            tag: n.tag.clone(),
        })
        .collect()
}

fn sg_metas(sg: &Supergraph) -> Vec<NodeMeta> {
    sg.nodes
        .iter()
        .enumerate()
        .map(|(i, n)| NodeMeta {
            id: i + 1,
            proc: n.proc.clone(),
            stmt: n.stmt.clone(),
            kind: n.kind,
            tag: n.tag.clone(),
        })
        .collect()
}

fn has_calls(program: &Program) -> bool {
    program.call_sites > 0
}

/// The lazy flow- and context-sensitive points-to analysis.
pub fn run_lpta(program: &Program, opts: &LptaOptions) -> Result<AnalysisResult> {
    let u = Universe::of(program);
    if !opts.interprocedural {
        if program.procs.len() > 1 || has_calls(program) {
            return Err(Error::Analysis(
                "program has multiple procedures or calls; use interprocedural mode".into(),
            ));
        }
        let cfg = build_cfg(program.main(), false)?;
        let config = IntraConfig {
            eager: opts.eager,
            round_limit: opts.round_limit,
            ..Default::default()
        };
        let res = intraproc_solve(&cfg, &u, &config)?;
        return Ok(finish(cfg_metas(&cfg), res.facts, res.stats, None, &u));
    }
    let sg = build_supergraph(program)?;
    let (facts, contexts, stats) = interproc_rounds(&sg, &u, opts)?;
    Ok(finish(sg_metas(&sg), facts, stats, Some(contexts), &u))
}

/// One round = a liveness fixpoint (backward, against the previous round's
/// points-to tables) followed by a points-to fixpoint (forward, restricted
/// by the fresh liveness). Rounds repeat until both are stable. The
/// ?-seed at the program entry is fixed at its first-round value.
fn interproc_rounds(
    sg: &Supergraph,
    u: &Universe,
    opts: &LptaOptions,
) -> Result<(Vec<NodeFacts>, Contexts, SolveStats)> {
    let n = sg.len();
    let mut stats = SolveStats::default();
    let mut live: Option<InterResult<VarSet>> = None;
    let mut pt: Option<InterResult<PtRel>> = None;
    let mut seed: Option<PtRel> = None;

    for round in 1..=opts.round_limit {
        stats.rounds = round;

        // Liveness pass. Ref sets at loads/stores consult the previous
        // round's Ain tables via the longest-prefix rule.
        let ain_src: Vec<BTreeMap<CallString, PtRel>> = match &pt {
            Some(r) => r.input.clone(),
            None => vec![BTreeMap::new(); n],
        };
        let empty_rel = PtRel::new();
        let live_r = {
            let mut transfer = |node: usize, sigma: &CallString, lout: &VarSet| {
                let ain =
                    lookup_longest_prefix(&ain_src[node], sigma).unwrap_or(&empty_rel);
                transfer_liveness(&sg.nodes[node].stmt, lout, ain, u)
            };
            let mut refine = |_: usize, _: &CallString, v: VarSet| v;
            interproc_solve(
                sg,
                Direction::Backward,
                VarSet::new(),
                &mut transfer,
                &mut refine,
                opts.iteration_limit,
                false,
            )?
        };
        stats.liveness_iterations += live_r.iterations;
        stats.max_call_strings = stats.max_call_strings.max(live_r.max_table);

        if seed.is_none() {
            let lin_entry = live_r.output[sg.entry]
                .get(&CallString::lambda())
                .cloned()
                .unwrap_or_default();
            seed = Some(
                lin_entry.iter().map(|x| (x.clone(), UNDEF.to_string())).collect(),
            );
        }

        // Points-to pass, restricted per context to the liveness just
        // computed (longest-prefix lookup for call strings liveness never
        // built; a total miss is counted as a diagnostic).
        let empty_vars = VarSet::new();
        let mut misses = 0usize;
        let pt_r = {
            let lin_of = |node: usize, sigma: &CallString, misses: &mut usize| {
                match lookup_longest_prefix(&live_r.output[node], sigma) {
                    Some(v) => v.clone(),
                    None => {
                        *misses += 1;
                        empty_vars.clone()
                    }
                }
            };
            let lout_of = |node: usize, sigma: &CallString, misses: &mut usize| {
                match lookup_longest_prefix(&live_r.input[node], sigma) {
                    Some(v) => v.clone(),
                    None => {
                        *misses += 1;
                        empty_vars.clone()
                    }
                }
            };
            let mut transfer = |node: usize, sigma: &CallString, ain: &PtRel| {
                let lout = lout_of(node, sigma, &mut misses);
                transfer_points_to(&sg.nodes[node].stmt, ain, &lout, u)
            };
            let mut misses2 = 0usize;
            let mut refine = |node: usize, sigma: &CallString, v: PtRel| {
                let lin = lin_of(node, sigma, &mut misses2);
                rel_restrict(&v, &lin)
            };
            let r = interproc_solve(
                sg,
                Direction::Forward,
                seed.clone().unwrap(),
                &mut transfer,
                &mut refine,
                opts.iteration_limit,
                false,
            )?;
            stats.prefix_misses += misses2;
            r
        };
        stats.prefix_misses += misses;
        stats.points_to_iterations += pt_r.iterations;
        stats.max_call_strings = stats.max_call_strings.max(pt_r.max_table);

        let stable = live.as_ref().map_or(false, |p| {
            p.input == live_r.input && p.output == live_r.output
        }) && pt.as_ref().map_or(false, |p| {
            p.input == pt_r.input && p.output == pt_r.output
        });
        live = Some(live_r);
        pt = Some(pt_r);
        if stable {
            break;
        }
        if let Some(cap) = opts.round_cap {
            if round >= cap {
                break;
            }
        }
        if round == opts.round_limit {
            return Err(Error::Analysis(format!(
                "round limit {} exceeded",
                opts.round_limit
            )));
        }
    }

    let live = live.unwrap();
    let pt = pt.unwrap();
    let mut facts = Vec::with_capacity(n);
    for node in 0..n {
        let lin = live.merged_output(node);
        let lout = live.merged_input(node);
        let reached = !lin.is_empty() || !lout.is_empty();
        facts.push(NodeFacts {
            lin,
            lout,
            ain: pt.merged_input(node),
            aout: pt.merged_output(node),
            reached,
        });
    }
    let contexts = Contexts {
        lin: live.output.clone(),
        lout: live.input.clone(),
        ain: pt.input.clone(),
        aout: pt.output.clone(),
    };
    Ok((facts, contexts, stats))
}

/// The liveness-free variant: the same machinery with Lin = Lout = P at
/// every node. `undef_seed` controls the P×{?} entry boundary value.
pub fn run_spta(
    program: &Program,
    interprocedural: bool,
    undef_seed: bool,
) -> Result<AnalysisResult> {
    let u = Universe::of(program);
    let all: VarSet = u.pointers.clone();
    let seed: PtRel = if undef_seed {
        all.iter().map(|x| (x.clone(), UNDEF.to_string())).collect()
    } else {
        PtRel::new()
    };
    if !interprocedural {
        if program.procs.len() > 1 || has_calls(program) {
            return Err(Error::Analysis(
                "program has multiple procedures or calls; use interprocedural mode".into(),
            ));
        }
        let cfg = build_cfg(program.main(), false)?;
        let config = IntraConfig {
            fixed_liveness: Some(all.clone()),
            seed_override: Some(seed),
            ..Default::default()
        };
        let res = intraproc_solve(&cfg, &u, &config)?;
        return Ok(finish(cfg_metas(&cfg), res.facts, res.stats, None, &u));
    }
    let sg = build_supergraph(program)?;
    let mut stats = SolveStats { rounds: 1, max_call_strings: 1, ..Default::default() };
    let pt_r = {
        let mut transfer = |node: usize, _: &CallString, ain: &PtRel| {
            transfer_points_to(&sg.nodes[node].stmt, ain, &all, &u)
        };
        let mut refine = |_: usize, _: &CallString, v: PtRel| v;
        interproc_solve(
            &sg,
            Direction::Forward,
            seed,
            &mut transfer,
            &mut refine,
            1_000_000,
            false,
        )?
    };
    stats.points_to_iterations = pt_r.iterations;
    stats.max_call_strings = pt_r.max_table.max(1);
    let n = sg.len();
    let mut facts = Vec::with_capacity(n);
    for node in 0..n {
        facts.push(NodeFacts {
            lin: all.clone(),
            lout: all.clone(),
            ain: pt_r.merged_input(node),
            aout: pt_r.merged_output(node),
            reached: true,
        });
    }
    let contexts = Contexts {
        lin: vec![BTreeMap::new(); n],
        lout: vec![BTreeMap::new(); n],
        ain: pt_r.input.clone(),
        aout: pt_r.output.clone(),
    };
    Ok(finish(sg_metas(&sg), facts, stats, Some(contexts), &u))
}

fn finish(
    metas: Vec<NodeMeta>,
    facts: Vec<NodeFacts>,
    stats: SolveStats,
    contexts: Option<Contexts>,
    u: &Universe,
) -> AnalysisResult {
    let (uin, uout) = extract_must_from(&facts, u);
    AnalysisResult { metas, facts, uin, uout, contexts, stats, summary: None }
}

/// Uin = Must(Ain), Uout = Must(Aout) for reached nodes; P×V for nodes the
/// analysis never reached.
pub fn extract_must_from(facts: &[NodeFacts], u: &Universe) -> (Vec<PtRel>, Vec<PtRel>) {
    let full: PtRel = u
        .pointers
        .iter()
        .flat_map(|x| u.locations.iter().map(move |v| (x.clone(), v.clone())))
        .collect();
    let mut uin = Vec::with_capacity(facts.len());
    let mut uout = Vec::with_capacity(facts.len());
    for f in facts {
        if f.reached {
            uin.push(must(&f.ain, &u.pointers, &u.locations));
            uout.push(must(&f.aout, &u.pointers, &u.locations));
        } else {
            uin.push(full.clone());
            uout.push(full.clone());
        }
    }
    (uin, uout)
}

/// A store whose Def set is empty while its pointer is live is a guaranteed
/// write through an undefined pointer.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SanityReport {
    pub flagged: Vec<(usize, String)>,
}

impl SanityReport {
    pub fn ok(&self) -> bool {
        self.flagged.is_empty()
    }
}

pub fn sanity_check(program: &Program, result: &AnalysisResult) -> SanityReport {
    let u = Universe::of(program);
    let mut flagged = Vec::new();
    for (i, meta) in result.metas.iter().enumerate() {
        if let Stmt::Store { lhs, .. } = &meta.stmt {
            let f = &result.facts[i];
            if !f.lin.contains(lhs) {
                continue; // unreached store: pointer never live here
            }
            let ex = crate::dataflow::extractors(&meta.stmt, &f.ain, &f.lout, &u);
            if ex.def.is_empty() {
                flagged.push((meta.id, meta.stmt.to_string()));
            }
        }
    }
    SanityReport { flagged }
}

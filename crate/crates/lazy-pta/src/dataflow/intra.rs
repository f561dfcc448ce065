use super::extract::{transfer_liveness, transfer_points_to};
use super::rel::{rel_restrict, PtRel, VarSet};
use super::Universe;
use crate::lang::{Cfg, UNDEF};
use crate::{Error, Result};

/// Fixpoint values at one node. `reached` is false when liveness never
/// touched the node, i.e. no pointer is live there.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NodeFacts {
    pub lin: VarSet,
    pub lout: VarSet,
    pub ain: PtRel,
    pub aout: PtRel,
    pub reached: bool,
}

#[derive(Clone, Debug, Default)]
pub struct SolveStats {
    pub rounds: usize,
    pub liveness_iterations: usize,
    pub points_to_iterations: usize,
    /// Max context-table size over all node boundaries (1 for intra runs).
    pub max_call_strings: usize,
    pub prefix_misses: usize,
}

#[derive(Clone, Debug)]
pub struct IntraConfig {
    /// Restart liveness as soon as a points-to sweep grows a Ref set.
    pub eager: bool,
    /// Guard against non-termination bugs; the lattices are finite, so
    /// hitting this is an error.
    pub round_limit: usize,
    /// Pin Lin = Lout to this set everywhere and skip liveness (the
    /// liveness-free baseline).
    pub fixed_liveness: Option<VarSet>,
    /// Entry-boundary points-to value; defaults to Lin(start)×{?} frozen at
    /// its first-round value.
    pub seed_override: Option<PtRel>,
}

impl Default for IntraConfig {
    fn default() -> Self {
        IntraConfig {
            eager: false,
            round_limit: 64,
            fixed_liveness: None,
            seed_override: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct IntraResult {
    pub facts: Vec<NodeFacts>,
    pub stats: SolveStats,
}

/// Alternating global fixpoint of the liveness and points-to equations:
/// backward strong-liveness to its fixpoint against current Ain, then
/// forward points-to to its fixpoint against current liveness, repeated
/// until neither changes. All values start at ⊤ = ∅.
pub fn intraproc_solve(cfg: &Cfg, u: &Universe, config: &IntraConfig) -> Result<IntraResult> {
    let n = cfg.nodes.len();
    let mut facts = vec![NodeFacts::default(); n];
    let mut stats = SolveStats { max_call_strings: 1, ..Default::default() };
    let mut seed: Option<PtRel> = config.seed_override.clone();

    if let Some(all) = &config.fixed_liveness {
        for f in facts.iter_mut() {
            f.lin = all.clone();
            f.lout = all.clone();
        }
    }

    for round in 1..=config.round_limit {
        stats.rounds = round;
        let before: Vec<NodeFacts> = facts.clone();

        if config.fixed_liveness.is_none() {
            liveness_fixpoint(cfg, u, &mut facts, &mut stats);
        }
        if seed.is_none() {
            let lin_start = &facts[cfg.start].lin;
            seed = Some(
                lin_start
                    .iter()
                    .map(|x| (x.clone(), UNDEF.to_string()))
                    .collect(),
            );
        }
        let restarted =
            points_to_fixpoint(cfg, u, seed.as_ref().unwrap(), &mut facts, &mut stats, config.eager);

        if !restarted && facts == before && round > 1 {
            break;
        }
        if round == config.round_limit {
            return Err(Error::Analysis(format!(
                "round limit {} exceeded in `{}`",
                config.round_limit, cfg.proc_name
            )));
        }
    }

    for f in facts.iter_mut() {
        f.reached = !f.lin.is_empty() || !f.lout.is_empty();
    }
    Ok(IntraResult { facts, stats })
}

fn liveness_fixpoint(cfg: &Cfg, u: &Universe, facts: &mut [NodeFacts], stats: &mut SolveStats) {
    loop {
        let mut changed = false;
        // Post-order for the backward direction: construction order is a
        // reverse post-order, so iterate indices downward.
        for node in (0..cfg.nodes.len()).rev() {
            let mut lout = VarSet::new();
            if node != cfg.end {
                for &s in &cfg.succ[node] {
                    lout.extend(facts[s].lin.iter().cloned());
                }
            }
            let lin = transfer_liveness(&cfg.nodes[node].stmt, &lout, &facts[node].ain, u);
            stats.liveness_iterations += 1;
            if lout != facts[node].lout || lin != facts[node].lin {
                facts[node].lout = lout;
                facts[node].lin = lin;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}

/// Returns true when an eager restart was requested (a Ref set grew while
/// points-to was still in flight).
fn points_to_fixpoint(
    cfg: &Cfg,
    u: &Universe,
    seed: &PtRel,
    facts: &mut [NodeFacts],
    stats: &mut SolveStats,
    eager: bool,
) -> bool {
    loop {
        let mut changed = false;
        for node in 0..cfg.nodes.len() {
            let mut ain = if node == cfg.start {
                seed.clone()
            } else {
                let mut a = PtRel::new();
                for &p in &cfg.pred[node] {
                    a.extend(facts[p].aout.iter().cloned());
                }
                a
            };
            ain = rel_restrict(&ain, &facts[node].lin);
            let aout = transfer_points_to(&cfg.nodes[node].stmt, &ain, &facts[node].lout, u);
            stats.points_to_iterations += 1;
            let grew = ain != facts[node].ain || aout != facts[node].aout;
            if grew {
                facts[node].ain = ain;
                facts[node].aout = aout;
                changed = true;
                if eager {
                    let lin =
                        transfer_liveness(&cfg.nodes[node].stmt, &facts[node].lout, &facts[node].ain, u);
                    if lin != facts[node].lin {
                        return true;
                    }
                }
            }
        }
        if !changed {
            return false;
        }
    }
}

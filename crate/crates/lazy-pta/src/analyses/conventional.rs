use super::{cfg_metas, AnalysisResult, NodeMeta};
use crate::dataflow::{NodeFacts, PtRel, SolveStats, Universe};
use crate::lang::{build_cfg, Program, Stmt};
use crate::{Error, Result};

/// Classic flow-sensitive intraprocedural may-points-to analysis: forward
/// union over all predecessors, no liveness, no `?`. A store performs a
/// strong update exactly when its target pointer has a single pointee.
pub fn run_conventional_may(program: &Program) -> Result<AnalysisResult> {
    if program.procs.len() > 1 || program.call_sites > 0 {
        return Err(Error::Analysis(
            "conventional may analysis is intraprocedural; program has multiple procedures".into(),
        ));
    }
    let u = Universe::of(program);
    let cfg = build_cfg(program.main(), false)?;
    let n = cfg.nodes.len();
    let mut ain = vec![PtRel::new(); n];
    let mut aout = vec![PtRel::new(); n];
    let mut stats = SolveStats { rounds: 1, max_call_strings: 1, ..Default::default() };
    loop {
        let mut changed = false;
        for node in 0..n {
            let mut inn = PtRel::new();
            for &p in &cfg.pred[node] {
                inn.extend(aout[p].iter().cloned());
            }
            let out = conv_transfer(&cfg.nodes[node].stmt, &inn, &u);
            stats.points_to_iterations += 1;
            if inn != ain[node] || out != aout[node] {
                ain[node] = inn;
                aout[node] = out;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let metas: Vec<NodeMeta> = cfg_metas(&cfg);
    let facts: Vec<NodeFacts> = (0..n)
        .map(|i| NodeFacts {
            ain: ain[i].clone(),
            aout: aout[i].clone(),
            reached: true,
            ..Default::default()
        })
        .collect();
    let (uin, uout) = super::extract_must_from(&facts, &u);
    Ok(AnalysisResult { metas, facts, uin, uout, contexts: None, stats, summary: None })
}

fn conv_transfer(stmt: &Stmt, ain: &PtRel, u: &Universe) -> PtRel {
    let apply = |r: &PtRel, x: &str| -> Vec<String> {
        r.iter().filter(|(a, _)| a == x).map(|(_, b)| b.clone()).collect()
    };
    let assign = |x: &str, pointees: Vec<String>| -> PtRel {
        let mut out: PtRel = ain.iter().filter(|(a, _)| a != x).cloned().collect();
        for v in pointees {
            out.insert((x.to_string(), v));
        }
        out
    };
    match stmt {
        Stmt::AddrOf { lhs, loc } => assign(lhs, vec![loc.clone()]),
        Stmt::Copy { lhs, rhs } => assign(lhs, apply(ain, rhs)),
        Stmt::Load { lhs, rhs } => {
            let mut pointees = Vec::new();
            for v in apply(ain, rhs) {
                if u.pointers.contains(&v) {
                    pointees.extend(apply(ain, &v));
                }
            }
            assign(lhs, pointees)
        }
        Stmt::Store { lhs, rhs } => {
            let targets: Vec<String> = apply(ain, lhs)
                .into_iter()
                .filter(|v| u.pointers.contains(v))
                .collect();
            let strong = targets.len() == 1 && apply(ain, lhs).len() == 1;
            let src = apply(ain, rhs);
            let mut out: PtRel = if strong {
                ain.iter().filter(|(a, _)| *a != targets[0]).cloned().collect()
            } else {
                ain.clone()
            };
            for t in &targets {
                for v in &src {
                    out.insert((t.clone(), v.clone()));
                }
            }
            out
        }
        Stmt::Use { .. } | Stmt::Call { .. } | Stmt::Nop => ain.clone(),
    }
}

use super::rel::{apply_one, must, rel_restrict, LocSet, PtRel, VarSet};
use super::Universe;
use crate::lang::Stmt;

/// Extractor outputs for one statement against its inflow values.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Extract {
    pub def: VarSet,
    pub kill: VarSet,
    pub ref_set: VarSet,
    pub pointee: LocSet,
}

/// The per-statement extractor table. `ain` and `lout` are the node's
/// current inflow values; the Def∩Lout guard is what makes the liveness
/// component *strong* liveness. For a store, x is referenced in both
/// branches of the guard.
pub fn extractors(stmt: &Stmt, ain: &PtRel, lout: &VarSet, u: &Universe) -> Extract {
    let one = |name: &str| {
        let mut s = VarSet::new();
        s.insert(name.to_string());
        s
    };
    match stmt {
        Stmt::Use { var } => Extract { ref_set: one(var), ..Default::default() },
        Stmt::AddrOf { lhs, loc } => Extract {
            def: one(lhs),
            kill: one(lhs),
            ref_set: VarSet::new(),
            pointee: one(loc),
        },
        Stmt::Copy { lhs, rhs } => {
            let live = lout.contains(lhs);
            Extract {
                def: one(lhs),
                kill: one(lhs),
                ref_set: if live { one(rhs) } else { VarSet::new() },
                pointee: apply_one(ain, rhs),
            }
        }
        Stmt::Load { lhs, rhs } => {
            let live = lout.contains(lhs);
            let mut ref_set = VarSet::new();
            if live {
                ref_set.insert(rhs.clone());
                for v in apply_one(ain, rhs) {
                    if u.pointers.contains(&v) {
                        ref_set.insert(v);
                    }
                }
            }
            // Pointee = Ain² {y}: chase one indirection through pointers.
            let mut pointee = LocSet::new();
            for v in apply_one(ain, rhs) {
                if u.pointers.contains(&v) {
                    pointee.extend(apply_one(ain, &v));
                }
            }
            Extract { def: one(lhs), kill: one(lhs), ref_set, pointee }
        }
        Stmt::Store { lhs, rhs } => {
            let def: VarSet = apply_one(ain, lhs)
                .into_iter()
                .filter(|v| u.pointers.contains(v))
                .collect();
            let kill: VarSet = {
                let m = must(ain, &u.pointers, &u.locations);
                apply_one(&m, lhs)
                    .into_iter()
                    .filter(|v| u.pointers.contains(v))
                    .collect()
            };
            let mut ref_set = one(lhs);
            if def.intersection(lout).next().is_some() {
                ref_set.insert(rhs.clone());
            }
            Extract { def, kill, ref_set, pointee: apply_one(ain, rhs) }
        }
        Stmt::Call { .. } | Stmt::Nop => Extract::default(),
    }
}

/// f_L: Lin = (Lout − Kill) ∪ Ref.
pub fn transfer_liveness(stmt: &Stmt, lout: &VarSet, ain: &PtRel, u: &Universe) -> VarSet {
    let ex = extractors(stmt, ain, lout, u);
    let mut lin: VarSet = lout.difference(&ex.kill).cloned().collect();
    lin.extend(ex.ref_set);
    lin
}

/// f_A: Aout = ((Ain − Kill×V) ∪ Def×Pointee)|Lout.
pub fn transfer_points_to(stmt: &Stmt, ain: &PtRel, lout: &VarSet, u: &Universe) -> PtRel {
    let ex = extractors(stmt, ain, lout, u);
    let mut out: PtRel = ain
        .iter()
        .filter(|(x, _)| !ex.kill.contains(x))
        .cloned()
        .collect();
    for x in &ex.def {
        for v in &ex.pointee {
            out.insert((x.clone(), v.clone()));
        }
    }
    rel_restrict(&out, lout)
}

use std::collections::BTreeSet;

use crate::lang::UNDEF;

/// Element of the liveness lattice L = ⟨P(P), ⊇⟩.
pub type VarSet = BTreeSet<String>;
/// A set of locations ⊆ V.
pub type LocSet = BTreeSet<String>;
/// Element of the may-points-to lattice A = ⟨P(P×V), ⊇⟩.
pub type PtRel = BTreeSet<(String, String)>;

/// Relation application: R X = {v | u ∈ X, (u,v) ∈ R}.
pub fn rel_apply(r: &PtRel, x: &LocSet) -> LocSet {
    r.iter()
        .filter(|(u, _)| x.contains(u))
        .map(|(_, v)| v.clone())
        .collect()
}

/// Relation restriction: R|X = {(u,v) ∈ R | u ∈ X}.
pub fn rel_restrict(r: &PtRel, x: &VarSet) -> PtRel {
    r.iter().filter(|(u, _)| x.contains(u)).cloned().collect()
}

/// Inclusion-coerced self composition R ∘̂ R: chains are followed only
/// through pointer-typed intermediate locations, so the result stays in P×V.
pub fn rel_self_compose(r: &PtRel, pointers: &BTreeSet<String>) -> PtRel {
    let mut out = PtRel::new();
    for (u, v) in r {
        if !pointers.contains(v) {
            continue;
        }
        for (v2, w) in r {
            if v2 == v {
                out.insert((u.clone(), w.clone()));
            }
        }
    }
    out
}

/// The Must operator. For each pointer x:
/// - R|{x} = ∅ or {(x,?)}      ⇒ contribute {x}×V (no information);
/// - R|{x} = {(x,y)}, y ≠ ?    ⇒ contribute {(x,y)};
/// - otherwise                 ⇒ contribute nothing.
pub fn must(r: &PtRel, pointers: &BTreeSet<String>, locations: &BTreeSet<String>) -> PtRel {
    let mut out = PtRel::new();
    for x in pointers {
        let pointees: Vec<&String> =
            r.iter().filter(|(u, _)| u == x).map(|(_, v)| v).collect();
        match pointees.as_slice() {
            [] => {
                for v in locations {
                    out.insert((x.clone(), v.clone()));
                }
            }
            [y] if *y == UNDEF => {
                for v in locations {
                    out.insert((x.clone(), v.clone()));
                }
            }
            [y] => {
                out.insert((x.clone(), (*y).clone()));
            }
            _ => {}
        }
    }
    out
}

/// Pointees of a single variable: R {x}.
pub fn apply_one(r: &PtRel, x: &str) -> LocSet {
    r.iter()
        .filter(|(u, _)| u == x)
        .map(|(_, v)| v.clone())
        .collect()
}

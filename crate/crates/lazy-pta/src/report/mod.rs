//! Text, JSON and DOT renderings of analysis results.

use serde_json::{json, Value};

use crate::analyses::{AnalysisResult, NodeMeta};
use crate::dataflow::{PtRel, Universe, VarSet};
use crate::lang::{EdgeKind, NodeKind, Program, Supergraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Intra,
    Inter,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Intra => "intra",
            Mode::Inter => "inter",
        }
    }
}

/// Which tables to include in the output.
#[derive(Clone, Copy, Debug)]
pub struct Dumps {
    pub liveness: bool,
    pub points_to: bool,
    pub must: bool,
    pub contexts: bool,
    pub stats: bool,
}

impl Default for Dumps {
    fn default() -> Self {
        Dumps { liveness: false, points_to: true, must: false, contexts: false, stats: true }
    }
}

pub fn node_label(meta: &NodeMeta) -> String {
    match meta.kind {
        NodeKind::Start => format!("Start_{}", meta.proc),
        NodeKind::End => format!("End_{}", meta.proc),
        NodeKind::CallSite(s) => format!("c{s}: {}", meta.stmt),
        NodeKind::ReturnSite(s) => format!("r{s}"),
        NodeKind::Stmt => meta.stmt.to_string(),
    }
}

fn fmt_vars(s: &VarSet) -> String {
    let items: Vec<&str> = s.iter().map(|x| x.as_str()).collect();
    format!("{{{}}}", items.join(", "))
}

fn fmt_rel(r: &PtRel) -> String {
    let items: Vec<String> = r.iter().map(|(a, b)| format!("({a},{b})")).collect();
    format!("{{{}}}", items.join(", "))
}

/// Must relations print per-pointer, with `*` standing for "all of V".
fn fmt_must(r: &PtRel, u: &Universe) -> String {
    let mut parts = Vec::new();
    for x in &u.pointers {
        let tgts: Vec<&String> = r.iter().filter(|(a, _)| a == x).map(|(_, b)| b).collect();
        if tgts.is_empty() {
            continue;
        }
        if tgts.len() == u.locations.len() {
            parts.push(format!("{x}->*"));
        } else {
            for t in tgts {
                parts.push(format!("{x}->{t}"));
            }
        }
    }
    format!("{{{}}}", parts.join(", "))
}

pub fn emit_text(
    name: &str,
    analysis: &str,
    mode: Mode,
    result: &AnalysisResult,
    u: &Universe,
    dumps: &Dumps,
) -> String {
    let mut out = String::new();
    out.push_str(&format!("program {name}  analysis {analysis}  mode {}\n", mode.name()));
    if let Some(summary) = &result.summary {
        out.push_str(&format!("summary {}\n", fmt_rel(summary)));
    }
    for (i, meta) in result.metas.iter().enumerate() {
        let f = &result.facts[i];
        out.push_str(&format!("n{} [{}] {}\n", meta.id, meta.proc, node_label(meta)));
        if dumps.liveness {
            out.push_str(&format!("  lin  {}\n", fmt_vars(&f.lin)));
            out.push_str(&format!("  lout {}\n", fmt_vars(&f.lout)));
        }
        if dumps.points_to {
            out.push_str(&format!("  ain  {}\n", fmt_rel(&f.ain)));
            out.push_str(&format!("  aout {}\n", fmt_rel(&f.aout)));
        }
        if dumps.must {
            out.push_str(&format!("  uin  {}\n", fmt_must(&result.uin[i], u)));
            out.push_str(&format!("  uout {}\n", fmt_must(&result.uout[i], u)));
        }
        if dumps.contexts {
            if let Some(ctx) = &result.contexts {
                for (sigma, v) in &ctx.lin[i] {
                    out.push_str(&format!("  <{sigma}> lin  {}\n", fmt_vars(v)));
                }
                for (sigma, v) in &ctx.ain[i] {
                    out.push_str(&format!("  <{sigma}> ain  {}\n", fmt_rel(v)));
                }
                for (sigma, v) in &ctx.aout[i] {
                    out.push_str(&format!("  <{sigma}> aout {}\n", fmt_rel(v)));
                }
            }
        }
    }
    if dumps.stats {
        let s = &result.stats;
        out.push_str(&format!(
            "stats rounds={} liveness_iters={} points_to_iters={} max_call_strings={} \
             prefix_misses={} total_pairs={} distinct_pairs={}\n",
            s.rounds,
            s.liveness_iterations,
            s.points_to_iterations,
            s.max_call_strings,
            s.prefix_misses,
            result.total_pairs(),
            result.distinct_pairs(),
        ));
    }
    out
}

fn json_vars(s: &VarSet) -> Value {
    Value::Array(s.iter().map(|x| Value::String(x.clone())).collect())
}

fn json_rel(r: &PtRel) -> Value {
    Value::Array(
        r.iter()
            .map(|(a, b)| Value::Array(vec![Value::String(a.clone()), Value::String(b.clone())]))
            .collect(),
    )
}

/// Must relation as a pointer -> targets map; the full set V collapses to
/// the string "*".
fn json_must(r: &PtRel, u: &Universe) -> Value {
    let mut map = serde_json::Map::new();
    for x in &u.pointers {
        let tgts: Vec<&String> = r.iter().filter(|(a, _)| a == x).map(|(_, b)| b).collect();
        if tgts.is_empty() {
            continue;
        }
        if tgts.len() == u.locations.len() {
            map.insert(x.clone(), Value::String("*".to_string()));
        } else {
            map.insert(
                x.clone(),
                Value::Array(tgts.into_iter().map(|t| Value::String(t.clone())).collect()),
            );
        }
    }
    Value::Object(map)
}

pub fn emit_json(
    name: &str,
    analysis: &str,
    mode: Mode,
    result: &AnalysisResult,
    u: &Universe,
    dumps: &Dumps,
) -> String {
    let nodes: Vec<Value> = result
        .metas
        .iter()
        .enumerate()
        .map(|(i, meta)| {
            let f = &result.facts[i];
            let mut node = json!({
                "id": meta.id,
                "proc": meta.proc,
                "stmt": node_label(meta),
                "lin": json_vars(&f.lin),
                "lout": json_vars(&f.lout),
                "ain": json_rel(&f.ain),
                "aout": json_rel(&f.aout),
                "uin": json_must(&result.uin[i], u),
                "uout": json_must(&result.uout[i], u),
            });
            if dumps.contexts {
                if let Some(ctx) = &result.contexts {
                    let per: Vec<Value> = ctx.ain[i]
                        .keys()
                        .map(|sigma| {
                            json!({
                                "sigma": sigma.to_string(),
                                "lin": ctx.lin[i].get(sigma).map(json_vars).unwrap_or(json!(null)),
                                "lout": ctx.lout[i].get(sigma).map(json_vars).unwrap_or(json!(null)),
                                "ain": json_rel(&ctx.ain[i][sigma]),
                                "aout": ctx.aout[i].get(sigma).map(json_rel).unwrap_or(json!(null)),
                            })
                        })
                        .collect();
                    node["contexts"] = Value::Array(per);
                }
            }
            node
        })
        .collect();
    let mut doc = json!({
        "program": name,
        "analysis": analysis,
        "mode": mode.name(),
        "nodes": nodes,
        "metrics": {
            "rounds": result.stats.rounds,
            "liveness_iterations": result.stats.liveness_iterations,
            "points_to_iterations": result.stats.points_to_iterations,
            "max_call_strings": result.stats.max_call_strings,
            "prefix_misses": result.stats.prefix_misses,
            "total_pairs": result.total_pairs(),
            "distinct_pairs": result.distinct_pairs(),
        },
    });
    if let Some(summary) = &result.summary {
        doc["summary"] = json_rel(summary);
    }
    serde_json::to_string_pretty(&doc).expect("json value serializes")
}

/// The supergraph in DOT: solid intraprocedural edges, dashed
/// call/return edges, one cluster per procedure.
pub fn emit_dot(
    name: &str,
    program: &Program,
    result: &AnalysisResult,
    dumps: &Dumps,
) -> crate::Result<String> {
    let sg: Supergraph = crate::lang::build_supergraph(program)?;
    let mut out = String::new();
    out.push_str(&format!("digraph \"{name}\" {{\n"));
    out.push_str("  node [shape=box, fontname=\"monospace\"];\n");
    let have_facts = result.metas.len() == sg.len();
    for (c, (proc, &(start, end))) in sg.proc_bounds.iter().enumerate() {
        out.push_str(&format!("  subgraph cluster_{c} {{\n    label=\"{proc}\";\n"));
        for i in start..=end {
            let mut label = format!("n{} {}", i + 1, escape(&label_of(&sg, i)));
            if have_facts {
                let f = &result.facts[i];
                if dumps.liveness {
                    label.push_str(&format!("\\nL {}", escape(&fmt_vars(&f.lin))));
                }
                if dumps.points_to {
                    label.push_str(&format!("\\nA {}", escape(&fmt_rel(&f.ain))));
                }
            }
            out.push_str(&format!("    n{} [label=\"{label}\"];\n", i + 1));
        }
        out.push_str("  }\n");
    }
    for (from, succs) in sg.succ.iter().enumerate() {
        for &(to, kind) in succs {
            let style = match kind {
                EdgeKind::Intra => "",
                EdgeKind::Call(_) | EdgeKind::Ret(_) => " [style=dashed]",
            };
            out.push_str(&format!("  n{} -> n{}{};\n", from + 1, to + 1, style));
        }
    }
    out.push_str("}\n");
    Ok(out)
}

fn label_of(sg: &Supergraph, i: usize) -> String {
    let n = &sg.nodes[i];
    match n.kind {
        NodeKind::Start => format!("Start_{}", n.proc),
        NodeKind::End => format!("End_{}", n.proc),
        NodeKind::CallSite(s) => format!("c{s}: {}", n.stmt),
        NodeKind::ReturnSite(s) => format!("r{s}"),
        NodeKind::Stmt => n.stmt.to_string(),
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

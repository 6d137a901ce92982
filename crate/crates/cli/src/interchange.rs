//! JSON documents exchanged by the command-line tool.
//!
//! Every document carries `kind` and `version`. Keys are written sorted and
//! atoms keep their structure order, so equal values give equal bytes.

use neatgames_core::atoms::pairs;
use neatgames_core::games::{Demand, ForcingNode, GameSpec, Rounds, StrategyCert, Target, Variant, Winner};
use neatgames_core::graph::SimpleGraph;
use neatgames_core::ra::{BlurParams, RaAtomStructure, TripleRule};
use neatgames_core::{AtomId, CaAtomStructure, ExplicitCa, Network, RainbowFrame, RainbowSignature, StructureError};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use thiserror::Error;

pub const VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum ImportError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("document kind is {found:?}, expected {expected:?}")]
    Kind { expected: String, found: String },
    #[error("document version {found} is not supported (expected {VERSION})")]
    Version { found: u64 },
    #[error("in {place}: {message}")]
    Schema { place: String, message: String },
    #[error("invalid structure: {0}")]
    Structure(#[from] StructureError),
    #[error("structure hash {found} does not match the loaded structure ({expected})")]
    HashMismatch { expected: String, found: String },
}

fn schema(place: &str, message: impl Into<String>) -> ImportError {
    ImportError::Schema {
        place: place.to_string(),
        message: message.into(),
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_bytes(v: &Value) -> Vec<u8> {
    // serde_json's map is ordered, so keys come out sorted
    let mut s = serde_json::to_string_pretty(v).expect("serializing a JSON value cannot fail");
    s.push('\n');
    s.into_bytes()
}

pub fn parse(bytes: &[u8]) -> Result<Value, ImportError> {
    serde_json::from_slice(bytes).map_err(|e| ImportError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn kind_of(v: &Value) -> Result<&str, ImportError> {
    v.get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| schema("kind", "missing or not a string"))
}

fn check_header(v: &Value, expected: &str) -> Result<(), ImportError> {
    let found = kind_of(v)?;
    if found != expected {
        return Err(ImportError::Kind {
            expected: expected.into(),
            found: found.into(),
        });
    }
    let version = v
        .get("version")
        .and_then(Value::as_u64)
        .ok_or_else(|| schema("version", "missing or not an integer"))?;
    if version != VERSION {
        return Err(ImportError::Version { found: version });
    }
    Ok(())
}

fn field<T: for<'de> Deserialize<'de>>(v: &Value, key: &str) -> Result<T, ImportError> {
    let x = v.get(key).ok_or_else(|| schema(key, "missing"))?;
    T::deserialize(x).map_err(|e| schema(key, e.to_string()))
}

fn opt_field<T: for<'de> Deserialize<'de>>(v: &Value, key: &str) -> Result<Option<T>, ImportError> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(x) => T::deserialize(x).map(Some).map_err(|e| schema(key, e.to_string())),
    }
}

fn pair_key(i: usize, j: usize) -> String {
    format!("{i},{j}")
}

fn parse_pair_key(place: &str, k: &str) -> Result<(usize, usize), ImportError> {
    let bad = || schema(place, format!("key {k:?} is not of the form \"i,j\""));
    let (a, b) = k.split_once(',').ok_or_else(bad)?;
    let i = a.trim().parse().map_err(|_| bad())?;
    let j = b.trim().parse().map_err(|_| bad())?;
    Ok((i, j))
}

// ---- ca-structure -----------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct GeneratorDoc {
    rule: String,
    greens: Vec<i64>,
    reds: Vec<i64>,
    copies: usize,
    order_rule: bool,
}

/// Rainbow frames are written as their generating signature; explicit frames
/// list every relation.
pub fn export_structure(s: &CaAtomStructure) -> Value {
    match s {
        CaAtomStructure::Explicit(e) => export_explicit(e),
        CaAtomStructure::Rainbow(r) => {
            let sig = r.signature();
            json!({
                "kind": "ca-structure",
                "version": VERSION,
                "dim": sig.dim,
                "generator": GeneratorDoc {
                    rule: "rainbow".into(),
                    greens: sig.greens.clone(),
                    reds: sig.reds.clone(),
                    copies: sig.copies,
                    order_rule: sig.order_rule,
                },
                "atom_count": r.atom_count(),
            })
        }
    }
}

pub fn export_explicit(e: &ExplicitCa) -> Value {
    let n = e.dim();
    let cyl: Vec<Vec<[usize; 2]>> = (0..n)
        .map(|i| e.cyl_pairs(i).into_iter().map(|(a, b)| [a, b]).collect())
        .collect();
    let diag: BTreeMap<String, Vec<usize>> = pairs(n).map(|(i, j)| (pair_key(i, j), e.diag_members(i, j))).collect();
    let mut doc = json!({
        "kind": "ca-structure",
        "version": VERSION,
        "dim": n,
        "atoms": e.names(),
        "cyl": cyl,
        "diag": diag,
    });
    if e.has_transpositions() {
        let transp: BTreeMap<String, Vec<usize>> = pairs(n)
            .map(|(i, j)| (pair_key(i, j), e.transp_perm(i, j).unwrap()))
            .collect();
        doc["transp"] = json!(transp);
    }
    doc
}

pub fn import_structure(v: &Value) -> Result<CaAtomStructure, ImportError> {
    check_header(v, "ca-structure")?;
    let dim: usize = field(v, "dim")?;
    if let Some(g) = opt_field::<GeneratorDoc>(v, "generator")? {
        if g.rule != "rainbow" {
            return Err(schema("generator.rule", format!("unknown generator {:?}", g.rule)));
        }
        let sig = RainbowSignature {
            dim,
            greens: g.greens,
            reds: g.reds,
            copies: g.copies,
            order_rule: g.order_rule,
        };
        return Ok(CaAtomStructure::from(RainbowFrame::new(sig)?));
    }
    let names: Vec<String> = field(v, "atoms")?;
    let cyl: Vec<Vec<(usize, usize)>> = field::<Vec<Vec<[usize; 2]>>>(v, "cyl")?
        .into_iter()
        .map(|row| row.into_iter().map(|[a, b]| (a, b)).collect())
        .collect();
    let mut diag = BTreeMap::new();
    for (k, ids) in field::<BTreeMap<String, Vec<usize>>>(v, "diag")? {
        diag.insert(parse_pair_key("diag", &k)?, ids);
    }
    let transp = match opt_field::<BTreeMap<String, Vec<usize>>>(v, "transp")? {
        None => None,
        Some(m) => {
            let mut out = BTreeMap::new();
            for (k, p) in m {
                out.insert(parse_pair_key("transp", &k)?, p);
            }
            Some(out)
        }
    };
    Ok(CaAtomStructure::from(ExplicitCa::from_parts(dim, names, cyl, diag, transp)?))
}

// ---- ra-structure -----------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    vertices: usize,
    edges: Vec<[usize; 2]>,
}

pub fn export_graph(g: &SimpleGraph) -> Value {
    json!(GraphDoc {
        vertices: g.len(),
        edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect(),
    })
}

pub fn import_graph(v: &Value) -> Result<SimpleGraph, ImportError> {
    let g: GraphDoc = GraphDoc::deserialize(v).map_err(|e| schema("graph", e.to_string()))?;
    let edges: Vec<(usize, usize)> = g.edges.iter().map(|&[u, w]| (u, w)).collect();
    SimpleGraph::from_edges(g.vertices, &edges).map_err(|e| schema("graph.edges", e))
}

pub fn export_ra(ra: &RaAtomStructure) -> Value {
    let triples = match ra.rule() {
        TripleRule::Table(t) => json!(t.iter().map(|&(a, b, c)| [a, b, c]).collect::<Vec<_>>()),
        TripleRule::Monk { graph, colours } => json!({
            "rule": "monk",
            "params": { "graph": export_graph(graph), "colours": colours },
        }),
        TripleRule::Blur {
            params,
            include_p_outside,
        } => json!({
            "rule": "blur",
            "params": {
                "l": params.l,
                "i_size": params.i_size,
                "rows": params.rows,
                "include_p_outside": include_p_outside,
            },
        }),
    };
    json!({
        "kind": "ra-structure",
        "version": VERSION,
        "atoms": ra.names(),
        "identity": ra.identity().to_vec(),
        "converse": ra.converse_table(),
        "triples": triples,
    })
}

pub fn import_ra(v: &Value) -> Result<RaAtomStructure, ImportError> {
    check_header(v, "ra-structure")?;
    let names: Vec<String> = field(v, "atoms")?;
    let identity: Vec<usize> = field(v, "identity")?;
    let converse: Vec<usize> = field(v, "converse")?;
    let triples = v.get("triples").ok_or_else(|| schema("triples", "missing"))?;
    let ra = if triples.is_array() {
        let t: Vec<[usize; 3]> = field(v, "triples")?;
        RaAtomStructure::from_table(names.clone(), &identity, converse.clone(), t.into_iter().map(|[a, b, c]| (a, b, c)))?
    } else {
        let rule: String = field(triples, "rule")?;
        let params = triples.get("params").ok_or_else(|| schema("triples.params", "missing"))?;
        match rule.as_str() {
            "monk" => {
                let g = import_graph(params.get("graph").ok_or_else(|| schema("triples.params.graph", "missing"))?)?;
                let colours: usize = field(params, "colours")?;
                RaAtomStructure::monk(&g, colours)
            }
            "blur" => {
                let p = BlurParams {
                    l: field(params, "l")?,
                    i_size: field(params, "i_size")?,
                    rows: field(params, "rows")?,
                };
                let outside: bool = opt_field(params, "include_p_outside")?.unwrap_or(false);
                RaAtomStructure::blur(&p, outside)?
            }
            other => return Err(schema("triples.rule", format!("unknown rule {other:?}"))),
        }
    };
    // the listed atoms must be the ones the rule generates
    if ra.names() != names.as_slice() {
        return Err(schema("atoms", "atom list does not match the triple rule"));
    }
    if ra.identity().to_vec() != identity {
        return Err(schema("identity", "identity atoms do not match the triple rule"));
    }
    if ra.converse_table() != converse.as_slice() {
        return Err(schema("converse", "converse does not match the triple rule"));
    }
    Ok(ra)
}

// ---- networks and strategies ------------------------------------------------------------

pub fn export_network(s: &CaAtomStructure, n: &Network) -> Value {
    let labels: BTreeMap<String, AtomId> = (0..n.tuple_count())
        .map(|r| {
            let t: Vec<String> = n.tuple(r).iter().map(|x| x.to_string()).collect();
            (t.join(","), n.labels()[r])
        })
        .collect();
    json!({
        "kind": "network",
        "version": VERSION,
        "structure_hash": s.fingerprint(),
        "nodes": n.size(),
        "labels": labels,
    })
}

pub fn import_network(s: &CaAtomStructure, v: &Value) -> Result<Network, ImportError> {
    check_header(v, "network")?;
    check_hash(s, v)?;
    let nodes: usize = field(v, "nodes")?;
    let map: BTreeMap<String, AtomId> = field(v, "labels")?;
    let dim = s.dim();
    let total = nodes.pow(dim as u32);
    let mut labels = vec![None; total];
    for (k, a) in map {
        let t: Result<Vec<usize>, _> = k.split(',').map(|x| x.trim().parse::<usize>()).collect();
        let t = t.map_err(|_| schema("labels", format!("bad tuple {k:?}")))?;
        if t.len() != dim || t.iter().any(|&x| x >= nodes) {
            return Err(schema("labels", format!("tuple {k:?} outside {nodes} nodes")));
        }
        if !s.contains(a) {
            return Err(schema("labels", format!("atom id {a} at {k:?} is not an atom")));
        }
        let r = t.iter().fold(0, |acc, &x| acc * nodes + x);
        labels[r] = Some(a);
    }
    let labels: Option<Vec<AtomId>> = labels.into_iter().collect();
    let labels = labels.ok_or_else(|| schema("labels", "some tuples have no label"))?;
    Ok(Network::from_labels(dim, nodes, labels))
}

fn check_hash(s: &CaAtomStructure, v: &Value) -> Result<(), ImportError> {
    let found: String = field(v, "structure_hash")?;
    let expected = s.fingerprint();
    if found != expected {
        return Err(ImportError::HashMismatch { expected, found });
    }
    Ok(())
}

fn rounds_value(r: Rounds) -> Value {
    match r {
        Rounds::Omega => json!("omega"),
        Rounds::Finite(k) => json!(k),
    }
}

pub fn parse_rounds(s: &str) -> Result<Rounds, String> {
    match s {
        "omega" | "ω" => Ok(Rounds::Omega),
        _ => s
            .parse::<u32>()
            .map(Rounds::Finite)
            .map_err(|_| format!("rounds must be a number or omega, got {s:?}")),
    }
}

fn compact(n: &Network) -> Value {
    json!({ "nodes": n.size(), "labels": n.labels() })
}

fn from_compact(dim: usize, place: &str, v: &Value) -> Result<Network, ImportError> {
    let nodes: usize = field(v, "nodes").map_err(|e| schema(place, e.to_string()))?;
    let labels: Vec<AtomId> = field(v, "labels").map_err(|e| schema(place, e.to_string()))?;
    if labels.len() != nodes.pow(dim as u32) {
        return Err(schema(place, format!("{} labels for {nodes} nodes", labels.len())));
    }
    Ok(Network::from_labels(dim, nodes, labels))
}

pub fn winner_name(w: Winner) -> &'static str {
    match w {
        Winner::Exists => "exists",
        Winner::Forall => "forall",
    }
}

pub fn export_strategy(spec: &GameSpec, cert: &StrategyCert) -> Value {
    let variant = match spec.variant {
        Variant::G => "G",
        Variant::F => "F",
    };
    let mut doc = json!({
        "kind": "strategy",
        "version": VERSION,
        "structure_hash": spec.structure.fingerprint(),
        "spec": { "variant": variant, "pebbles": spec.pebbles, "rounds": rounds_value(spec.rounds) },
        "winner": winner_name(cert.winner()),
    });
    match cert {
        StrategyCert::Exists { positions } => {
            let safe: Vec<Value> = positions
                .iter()
                .map(|(n, r)| {
                    let mut c = compact(n);
                    c["rounds"] = json!(r);
                    c
                })
                .collect();
            doc["safe_set"] = json!(safe);
        }
        StrategyCert::Forall { root_atom, nodes } => {
            let dag: Vec<Value> = nodes
                .iter()
                .map(|f| {
                    let target = match f.demand.target {
                        Target::Fresh => json!("fresh"),
                        Target::Node(k) => json!(k),
                    };
                    let mut c = compact(&f.position);
                    c["demand"] = json!({
                        "tuple": f.demand.tuple,
                        "index": f.demand.index,
                        "atom": f.demand.atom,
                        "target": target,
                    });
                    c["rank"] = json!(f.rank);
                    c
                })
                .collect();
            doc["forcing_dag"] = json!({ "root_atom": root_atom, "nodes": dag });
        }
    }
    doc
}

/// Reads a strategy for `s`; the structure hash must match.
pub fn import_strategy(s: &CaAtomStructure, v: &Value) -> Result<(GameSpec, StrategyCert), ImportError> {
    check_header(v, "strategy")?;
    check_hash(s, v)?;
    let sp = v.get("spec").ok_or_else(|| schema("spec", "missing"))?;
    let variant = match field::<String>(sp, "variant")?.as_str() {
        "G" => Variant::G,
        "F" => Variant::F,
        other => return Err(schema("spec.variant", format!("unknown variant {other:?}"))),
    };
    let pebbles: usize = field(sp, "pebbles")?;
    let rounds = match sp.get("rounds") {
        Some(Value::String(x)) => parse_rounds(x).map_err(|e| schema("spec.rounds", e))?,
        Some(Value::Number(k)) => Rounds::Finite(
            k.as_u64()
                .and_then(|k| u32::try_from(k).ok())
                .ok_or_else(|| schema("spec.rounds", "not a round count"))?,
        ),
        _ => return Err(schema("spec.rounds", "missing")),
    };
    let spec = GameSpec::new(variant, pebbles, rounds, s.clone()).map_err(|e| schema("spec", e.to_string()))?;
    let dim = s.dim();
    let winner: String = field(v, "winner")?;
    let cert = match winner.as_str() {
        "exists" => {
            let safe: Vec<Value> = field(v, "safe_set")?;
            let mut positions = Vec::with_capacity(safe.len());
            for (k, p) in safe.iter().enumerate() {
                let place = format!("safe_set[{k}]");
                let r: Option<u32> = opt_field(p, "rounds").map_err(|e| schema(&place, e.to_string()))?;
                positions.push((from_compact(dim, &place, p)?, r));
            }
            StrategyCert::Exists { positions }
        }
        "forall" => {
            let dag = v.get("forcing_dag").ok_or_else(|| schema("forcing_dag", "missing"))?;
            let root_atom: AtomId = field(dag, "root_atom")?;
            let raw: Vec<Value> = field(dag, "nodes")?;
            let mut nodes = Vec::with_capacity(raw.len());
            for (k, x) in raw.iter().enumerate() {
                let place = format!("forcing_dag.nodes[{k}]");
                let d = x.get("demand").ok_or_else(|| schema(&place, "missing demand"))?;
                let target = match d.get("target") {
                    Some(Value::String(t)) if t == "fresh" => Target::Fresh,
                    Some(Value::Number(k)) => Target::Node(
                        k.as_u64().ok_or_else(|| schema(&place, "bad target"))? as usize,
                    ),
                    _ => return Err(schema(&place, "bad target")),
                };
                let demand = Demand {
                    tuple: field(d, "tuple").map_err(|e| schema(&place, e.to_string()))?,
                    index: field(d, "index").map_err(|e| schema(&place, e.to_string()))?,
                    atom: field(d, "atom").map_err(|e| schema(&place, e.to_string()))?,
                    target,
                };
                nodes.push(ForcingNode {
                    position: from_compact(dim, &place, x)?,
                    demand,
                    rank: field(x, "rank").map_err(|e| schema(&place, e.to_string()))?,
                });
            }
            StrategyCert::Forall { root_atom, nodes }
        }
        other => return Err(schema("winner", format!("unknown winner {other:?}"))),
    };
    Ok((spec, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use neatgames_core::fullset::build_full_set_structure;

    #[test]
    fn explicit_round_trip() {
        let s = CaAtomStructure::from(build_full_set_structure(3, 2).unwrap());
        let doc = export_structure(&s);
        let back = import_structure(&parse(&to_bytes(&doc)).unwrap()).unwrap();
        assert_eq!(to_bytes(&export_structure(&back)), to_bytes(&doc));
        assert_eq!(back.fingerprint(), s.fingerprint());
    }

    #[test]
    fn wrong_version_is_refused() {
        let s = CaAtomStructure::from(build_full_set_structure(2, 2).unwrap());
        let mut doc = export_structure(&s);
        doc["version"] = json!(7);
        assert!(matches!(import_structure(&doc), Err(ImportError::Version { found: 7 })));
    }
}

//! JSON encodings used by the command line tool and integration tests.
//!
//! Field values travel as strings: reduced fractions like `3/4`, `inf` for
//! the point at infinity, and rational functions like `(t^2 - 1)/(t + 3)`.
//! A string of n-gons is `{"n": 5, "gons": {"1,2,3": [..], ...}}` (with an
//! explicit `"labels"` array when the labels are not 1..n), a tree is
//! `{"n": 5, "splits": [[4,5], [3,4,5]]}` listing the side of each split
//! not containing the smallest label.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::charts::ChartImage;
use crate::error::{Error, Result};
use crate::field::{Field, Rat, RatFunc};
use crate::fibers::{FiberCurve, SectionPoint, StableCurve};
use crate::p1::{p1_rat_to_text, parse_p1_rat, parse_p1_ratfunc, P1};
use crate::phylo::{LabelSet, PhyloTree};
use crate::strings::{GonString, NGon, Triple};

fn bad(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn ngon_to_json(x: &NGon<Rat>) -> Value {
    Value::Array(
        x.entries()
            .iter()
            .map(|p| Value::String(p1_rat_to_text(p)))
            .collect(),
    )
}

pub fn ngon_from_json(v: &Value) -> Result<NGon<Rat>> {
    let arr = v.as_array().ok_or_else(|| bad("expected an array of values"))?;
    let entries = arr
        .iter()
        .map(|e| {
            e.as_str()
                .ok_or_else(|| bad("entries must be strings"))
                .and_then(parse_p1_rat)
        })
        .collect::<Result<Vec<_>>>()?;
    NGon::new(entries)
}

fn string_to_json_with<K: Field>(xx: &GonString<K>, show: impl Fn(&P1<K>) -> String) -> Value {
    let mut gons = Map::new();
    for (t, g) in xx.components() {
        gons.insert(
            t.to_string(),
            Value::Array(g.entries().iter().map(|p| Value::String(show(p))).collect()),
        );
    }
    let mut obj = Map::new();
    obj.insert("n".into(), json!(xx.n()));
    let default: Vec<usize> = (1..=xx.n()).collect();
    if xx.labels() != default {
        obj.insert("labels".into(), json!(xx.labels()));
    }
    obj.insert("gons".into(), Value::Object(gons));
    Value::Object(obj)
}

pub fn string_to_json(xx: &GonString<Rat>) -> Value {
    string_to_json_with(xx, p1_rat_to_text)
}

fn string_from_json_with<K: Field>(
    v: &Value,
    parse: impl Fn(&str) -> Result<P1<K>>,
) -> Result<GonString<K>> {
    let obj = v.as_object().ok_or_else(|| bad("expected an object"))?;
    let n = obj
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| bad("missing integer field \"n\""))? as usize;
    let labels: Vec<usize> = match obj.get("labels") {
        Some(l) => l
            .as_array()
            .ok_or_else(|| bad("\"labels\" must be an array"))?
            .iter()
            .map(|x| x.as_u64().map(|u| u as usize).ok_or_else(|| bad("bad label")))
            .collect::<Result<_>>()?,
        None => (1..=n).collect(),
    };
    let gons_obj = obj
        .get("gons")
        .and_then(Value::as_object)
        .ok_or_else(|| bad("missing object field \"gons\""))?;
    let mut gons = BTreeMap::new();
    for (key, val) in gons_obj {
        let parts: Vec<usize> = key
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| bad(format!("bad triple key {key:?}"))))
            .collect::<Result<_>>()?;
        if parts.len() != 3 {
            return Err(bad(format!("triple key {key:?} needs three labels")));
        }
        let t = Triple::new(parts[0], parts[1], parts[2])?;
        let arr = val.as_array().ok_or_else(|| bad("components must be arrays"))?;
        let entries = arr
            .iter()
            .map(|e| e.as_str().ok_or_else(|| bad("entries must be strings")).and_then(&parse))
            .collect::<Result<Vec<_>>>()?;
        gons.insert(t, NGon::new(entries)?);
    }
    GonString::new(labels, gons)
}

pub fn string_from_json(v: &Value) -> Result<GonString<Rat>> {
    string_from_json_with(v, parse_p1_rat)
}

/// A string whose entries are rational functions in `t`.
pub fn string_from_json_ratfunc(v: &Value) -> Result<GonString<RatFunc<Rat>>> {
    string_from_json_with(v, parse_p1_ratfunc)
}

pub fn tree_to_json(t: &PhyloTree) -> Value {
    let mut obj = Map::new();
    obj.insert("n".into(), json!(t.n()));
    let default = LabelSet::full(t.n());
    if t.labels() != default {
        obj.insert("labels".into(), json!(t.labels().to_vec()));
    }
    obj.insert(
        "splits".into(),
        Value::Array(
            t.splits()
                .iter()
                .map(|s| json!(s.to_vec()))
                .collect(),
        ),
    );
    Value::Object(obj)
}

pub fn tree_from_json(v: &Value) -> Result<PhyloTree> {
    let obj = v.as_object().ok_or_else(|| bad("expected an object"))?;
    let n = obj
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| bad("missing integer field \"n\""))? as usize;
    let labels = match obj.get("labels") {
        Some(l) => {
            let v: Vec<usize> = l
                .as_array()
                .ok_or_else(|| bad("\"labels\" must be an array"))?
                .iter()
                .map(|x| x.as_u64().map(|u| u as usize).ok_or_else(|| bad("bad label")))
                .collect::<Result<_>>()?;
            LabelSet::from_labels(&v)
        }
        None => LabelSet::full(n),
    };
    let mut splits = Vec::new();
    if let Some(arr) = obj.get("splits") {
        for s in arr.as_array().ok_or_else(|| bad("\"splits\" must be an array"))? {
            let side: Vec<usize> = s
                .as_array()
                .ok_or_else(|| bad("each split must be an array"))?
                .iter()
                .map(|x| x.as_u64().map(|u| u as usize).ok_or_else(|| bad("bad label")))
                .collect::<Result<_>>()?;
            splits.push(LabelSet::from_labels(&side));
        }
    }
    PhyloTree::new(labels, splits)
}

pub fn chart_image_to_json(img: &ChartImage<Rat>) -> Value {
    Value::Array(
        img.values
            .iter()
            .map(|v| Value::String(v.to_string()))
            .collect(),
    )
}

pub fn chart_image_from_json(v: &Value) -> Result<ChartImage<Rat>> {
    let arr = v.as_array().ok_or_else(|| bad("expected an array of values"))?;
    let values = arr
        .iter()
        .map(|e| {
            e.as_str()
                .ok_or_else(|| bad("chart values must be strings"))
                .and_then(crate::field::parse_rat)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChartImage { values })
}

fn point_to_json(p: &[P1<Rat>]) -> Value {
    Value::Array(p.iter().map(|c| Value::String(p1_rat_to_text(c))).collect())
}

pub fn fiber_to_json(fib: &FiberCurve<Rat>) -> Value {
    let components: Vec<Value> = fib
        .components
        .iter()
        .enumerate()
        .map(|(v, c)| {
            json!({
                "vertex": v,
                "triple": fib.triples[v],
                "pins": c.pins.iter().map(|(w, p)| (w.to_string(), p1_rat_to_text(p))).collect::<BTreeMap<_,_>>(),
            })
        })
        .collect();
    let equations: Vec<Value> = fib
        .equations
        .iter()
        .map(|e| {
            json!({
                "edge": [e.edge.0, e.edge.1],
                "delta": p1_rat_to_text(&e.delta),
                "epsilon": p1_rat_to_text(&e.epsilon),
            })
        })
        .collect();
    let nodes: Vec<Value> = fib
        .nodes
        .iter()
        .map(|((v, w), pt)| json!({"edge": [v, w], "point": point_to_json(pt)}))
        .collect();
    json!({
        "new_label": fib.new_label,
        "dimension": fib.dimension(),
        "tree": tree_to_json(&fib.tree),
        "components": components,
        "equations": equations,
        "nodes": nodes,
    })
}

pub fn section_to_json(s: &SectionPoint<Rat>) -> Value {
    json!({
        "label": s.label,
        "vertex": s.vertex,
        "coords": point_to_json(&s.coords),
    })
}

pub fn curve_to_json(c: &StableCurve<Rat>) -> Value {
    json!({
        "components": c.component_count,
        "nodes": c.nodes.iter().map(|(a, b, pa, pb)| {
            json!({"between": [a, b], "coords": [p1_rat_to_text(pa), p1_rat_to_text(pb)]})
        }).collect::<Vec<_>>(),
        "marks": c.marks.iter().map(|(l, (comp, p))| {
            (l.to_string(), json!({"component": comp, "coord": p1_rat_to_text(p)}))
        }).collect::<BTreeMap<_,_>>(),
    })
}

pub fn curve_from_json(v: &Value) -> Result<StableCurve<Rat>> {
    let obj = v.as_object().ok_or_else(|| bad("expected an object"))?;
    let component_count = obj
        .get("components")
        .and_then(Value::as_u64)
        .ok_or_else(|| bad("missing integer field \"components\""))? as usize;
    let mut nodes = Vec::new();
    for n in obj
        .get("nodes")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing array field \"nodes\""))?
    {
        let between = n
            .get("between")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("node needs \"between\""))?;
        let coords = n
            .get("coords")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("node needs \"coords\""))?;
        if between.len() != 2 || coords.len() != 2 {
            return Err(bad("node needs two components and two coordinates"));
        }
        nodes.push((
            between[0].as_u64().ok_or_else(|| bad("bad component"))? as usize,
            between[1].as_u64().ok_or_else(|| bad("bad component"))? as usize,
            parse_p1_rat(coords[0].as_str().ok_or_else(|| bad("bad coordinate"))?)?,
            parse_p1_rat(coords[1].as_str().ok_or_else(|| bad("bad coordinate"))?)?,
        ));
    }
    let mut marks = BTreeMap::new();
    for (l, m) in obj
        .get("marks")
        .and_then(Value::as_object)
        .ok_or_else(|| bad("missing object field \"marks\""))?
    {
        let label: usize = l.parse().map_err(|_| bad(format!("bad mark label {l:?}")))?;
        let comp = m
            .get("component")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("mark needs \"component\""))? as usize;
        let coord = parse_p1_rat(
            m.get("coord")
                .and_then(Value::as_str)
                .ok_or_else(|| bad("mark needs \"coord\""))?,
        )?;
        marks.insert(label, (comp, coord));
    }
    Ok(StableCurve {
        component_count,
        nodes,
        marks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::string_of_tree;
    use crate::fibers::curve_of_string;

    #[test]
    fn string_json_round_trip() {
        let x = ngon_from_json(&json!(["0", "1", "inf", "5", "-2/3"])).unwrap();
        let s = GonString::symmetrize(&x).unwrap();
        let j = string_to_json(&s);
        assert_eq!(string_from_json(&j).unwrap(), s);
        // byte-identical re-serialization
        assert_eq!(
            serde_json::to_string(&j).unwrap(),
            serde_json::to_string(&string_to_json(&string_from_json(&j).unwrap())).unwrap()
        );
    }

    #[test]
    fn tree_json_round_trip() {
        let t = PhyloTree::new(
            LabelSet::full(5),
            [LabelSet::from_labels(&[4, 5]), LabelSet::from_labels(&[3, 4, 5])],
        )
        .unwrap();
        let j = tree_to_json(&t);
        assert_eq!(tree_from_json(&j).unwrap(), t);
        assert_eq!(j["splits"], json!([[4, 5], [3, 4, 5]]));
    }

    #[test]
    fn curve_json_round_trip() {
        let t = PhyloTree::new(LabelSet::full(5), [LabelSet::from_labels(&[4, 5])]).unwrap();
        let c = curve_of_string(&string_of_tree(&t)).unwrap();
        let j = curve_to_json(&c);
        assert_eq!(curve_from_json(&j).unwrap(), c);
    }

    #[test]
    fn labeled_string_json() {
        let x = ngon_from_json(&json!(["0", "1", "inf", "4"])).unwrap();
        let s = GonString::symmetrize_on_labels(&[1, 2, 4, 6], &x).unwrap();
        let j = string_to_json(&s);
        assert_eq!(j["labels"], json!([1, 2, 4, 6]));
        assert_eq!(string_from_json(&j).unwrap(), s);
    }
}

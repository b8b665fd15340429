//! Browser bindings: Kummer fiber tables, cover counts with Frobenius traces,
//! and cross-ratios of four base points. Every export returns JSON text.

use octic::arrangement::{catalog_ids, cross_ratio, find_kummer_splits, harmonic_pairing, lookup, PlaneArrangement};
use octic::counting::{count_projective_cover, OcticForm};
use octic::fibration::{align_tables, reference_tables, BaseParam};
use octic::verify::{predicted_trace, resolution_correction, trace_h3, H2TraceRule};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest prime accepted by the page; the count is O(p³).
pub const MAX_PRIME: u64 = 61;

fn arrangement(id: &str) -> Result<PlaneArrangement, String> {
    lookup(id.trim()).ok_or_else(|| format!("unknown arrangement `{id}`"))
}

pub fn catalog_json() -> String {
    json!(catalog_ids()).to_string()
}

/// Every Kummer split with its fiber table, aligned to a printed table of
/// the family when one matches.
pub fn fiber_tables_json(id: &str) -> Result<String, String> {
    let arr = arrangement(id)?;
    let printed: Vec<_> = reference_tables().iter().filter(|r| r.family == arr.family()).collect();
    let mut splits = Vec::new();
    for s in find_kummer_splits(&arr) {
        let table = s.table().map_err(|e| e.to_string())?;
        let aligned = printed.iter().enumerate().find_map(|(i, r)| align_tables(&table, &r.table).map(|a| (i, a)));
        let (shown, matched) = match aligned {
            Some((i, a)) => (
                a.table.to_string(),
                json!({
                    "printed_table": i + 1,
                    "mobius": a.mobius.map(|m| m.to_string()),
                    "swapped": a.swapped,
                }),
            ),
            None => (table.to_string(), Value::Null),
        };
        splits.push(json!({
            "first": s.first,
            "second": s.second,
            "first_point": s.first_point,
            "second_point": s.second_point,
            "table": shown,
            "match": matched,
        }));
    }
    Ok(json!({ "arrangement": arr.id, "equation": arr.equation(), "splits": splits }).to_string())
}

/// Point count of the double cover over F_p, the H³ trace and the trace
/// predicted from newform coefficients.
pub fn cover_trace_json(id: &str, p: u64) -> Result<String, String> {
    if p > MAX_PRIME {
        return Err(format!("p must be at most {MAX_PRIME}"));
    }
    let arr = arrangement(id)?;
    let form = OcticForm::from_arrangement(&arr, p).map_err(|e| e.to_string())?;
    let count = count_projective_cover(&form).map_err(|e| e.to_string())?;
    let corr = resolution_correction(&arr).map_err(|e| e.to_string())?;
    let rule = H2TraceRule::for_arrangement(&arr).map_err(|e| e.to_string())?;
    let trace = trace_h3(&arr, p, &corr, &rule).map_err(|e| e.to_string())?;
    let predicted = match predicted_trace(&arr, p, true) {
        Ok((v, prov)) => json!({ "value": v.to_string(), "provenance": prov }),
        Err(_) => Value::Null,
    };
    Ok(json!({
        "arrangement": arr.id,
        "p": p,
        "branch_points": count.n_branch,
        "cover_points": count.n_total,
        "trace": trace.to_string(),
        "predicted": predicted,
    })
    .to_string())
}

/// Cross-ratio of four base points given as integers, fractions or `inf`.
pub fn cross_ratio_json(points: &str) -> Result<String, String> {
    let parsed: Vec<BaseParam> = points
        .split([',', ' '])
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|e| format!("{e}")))
        .collect::<Result<_, _>>()?;
    let qs: [BaseParam; 4] = parsed.try_into().map_err(|_| "expected four points".to_string())?;
    let value = cross_ratio(&qs).map_err(|e| e.to_string())?;
    let pairing = harmonic_pairing(&qs)
        .map_err(|e| e.to_string())?
        .map(|pairs| pairs.iter().map(|pair| format!("{{{}, {}}}", pair[0], pair[1])).collect::<Vec<_>>());
    Ok(json!({ "cross_ratio": value.to_string(), "harmonic_pairing": pairing }).to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn catalog() -> String {
    catalog_json()
}

#[wasm_bindgen]
pub fn fiber_tables(id: &str) -> Result<String, JsValue> {
    js(fiber_tables_json(id))
}

#[wasm_bindgen]
pub fn cover_trace(id: &str, p: u32) -> Result<String, JsValue> {
    js(cover_trace_json(id, p as u64))
}

#[wasm_bindgen]
pub fn cross_ratio_of(points: &str) -> Result<String, JsValue> {
    js(cross_ratio_json(points))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn tables_for_arrangement_8_align() {
        let v = parse(&fiber_tables_json("8").unwrap());
        let splits = v["splits"].as_array().unwrap();
        assert!(!splits.is_empty());
        assert!(splits.iter().any(|s| !s["match"].is_null()));
        assert!(parse(&fiber_tables_json("154").unwrap())["splits"].as_array().unwrap().is_empty());
    }

    #[test]
    fn trace_agrees_with_prediction() {
        let v = parse(&cover_trace_json("53", 7).unwrap());
        assert_eq!(v["trace"], v["predicted"]["value"]);
        assert!(cover_trace_json("53", 97).is_err());
        assert!(cover_trace_json("nope", 7).is_err());
    }

    #[test]
    fn cross_ratio_parses_points() {
        let v = parse(&cross_ratio_json("0, 1, -1, inf").unwrap());
        assert!(v["cross_ratio"].is_string());
        assert!(cross_ratio_json("0 1 2").is_err());
        assert!(cross_ratio_json("0 1 2 x").is_err());
    }
}

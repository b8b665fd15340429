//! The shipped catalog of arrangements.

use std::sync::OnceLock;

use super::linalg::Q;
use super::parse::{parse_product, parse_rational};
use super::{ArrangementError, InvolutionMatrix, PlaneArrangement};
use crate::modforms::NewformRef;

const CATALOG_TEXT: &str = include_str!("../../data/catalog.txt");

/// All shipped arrangements in file order.
pub fn catalog() -> &'static [PlaneArrangement] {
    static CATALOG: OnceLock<Vec<PlaneArrangement>> = OnceLock::new();
    CATALOG.get_or_init(|| parse_catalog(CATALOG_TEXT).expect("shipped catalog parses"))
}

pub fn catalog_ids() -> Vec<&'static str> {
    catalog().iter().map(|a| a.id.as_str()).collect()
}

/// Finds a catalog arrangement by id. Accepts `X_53`, `X53`, `53`, and a bare
/// family number such as `X_4`, which selects the family's first row.
pub fn lookup(id: &str) -> Option<PlaneArrangement> {
    let key = id.trim();
    let key = key
        .strip_prefix("X_")
        .or_else(|| key.strip_prefix('X'))
        .or_else(|| key.strip_prefix("arr"))
        .unwrap_or(key)
        .trim();
    let cat = catalog();
    cat.iter().find(|a| a.id == key).or_else(|| cat.iter().find(|a| a.family() == key)).cloned()
}

/// Parses catalog text: `id | factors | h11 | h12 | wt4 | wt2 | involution | extra`.
pub fn parse_catalog(text: &str) -> Result<Vec<PlaneArrangement>, ArrangementError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| ArrangementError::Catalog { line: n + 1, msg };
        let cols: Vec<&str> = line.split('|').map(str::trim).collect();
        if cols.len() < 6 {
            return Err(err(format!("expected at least 6 columns, found {}", cols.len())));
        }
        let mut constant = Q::from_integer(1.into());
        let mut factors = Vec::new();
        for f in cols[1].split(';') {
            let (k, fs) = parse_product(&format!("({})", f.trim())).map_err(|e| err(e.to_string()))?;
            constant *= k;
            factors.extend(fs);
        }
        let mut arr = PlaneArrangement::new(cols[0], &factors, constant).map_err(|e| err(e.to_string()))?;
        arr.h11 = Some(cols[2].parse().map_err(|_| err(format!("bad h11 `{}`", cols[2])))?);
        arr.h12 = Some(cols[3].parse().map_err(|_| err(format!("bad h12 `{}`", cols[3])))?);
        arr.wt4_form = parse_ref(cols[4]).map_err(err)?;
        let (mult, wt2) = match cols[5].split_once('*') {
            Some((m, r)) => (m.trim().parse().map_err(|_| err(format!("bad multiplier `{m}`")))?, r.trim()),
            None => (1, cols[5]),
        };
        arr.wt2_form = parse_ref(wt2).map_err(err)?;
        arr.wt2_multiplicity = mult;
        if let Some(inv) = cols.get(6).filter(|s| !s.is_empty()) {
            let vals: Vec<Q> =
                inv.split_whitespace().map(parse_rational).collect::<Result<_, _>>().map_err(|e| err(e.to_string()))?;
            if vals.len() != 16 {
                return Err(err(format!("involution needs 16 entries, found {}", vals.len())));
            }
            let m: [[Q; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| vals[4 * i + j].clone()));
            arr.involutions.push(InvolutionMatrix(m));
        }
        if let Some(extra) = cols.get(7).filter(|s| !s.is_empty()) {
            let d = extra
                .strip_prefix("h2=chi(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|d| d.parse::<i64>().ok())
                .ok_or_else(|| err(format!("unknown extra `{extra}`")))?;
            arr.skew_picard_character = Some(d);
        }
        out.push(arr);
    }
    Ok(out)
}

fn parse_ref(s: &str) -> Result<Option<NewformRef>, String> {
    if s == "-" || s.is_empty() {
        return Ok(None);
    }
    NewformRef::parse(s).map(Some).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_loads_all_rows() {
        let ids = catalog_ids();
        assert_eq!(ids.len(), 23);
        assert_eq!(ids.iter().filter(|id| !["3", "19", "239", "269", "287"].contains(id)).count(), 18);
    }

    #[test]
    fn lookups() {
        let a = lookup("X_53").unwrap();
        assert_eq!(a.h11, Some(53));
        assert_eq!(a.involutions.len(), 1);
        let f = lookup("X_4").unwrap();
        assert_eq!(f.id, "4a");
        assert_eq!(f.wt4_form.unwrap().to_string(), "32k4A1");
        assert_eq!(f.wt2_form.unwrap().to_string(), "32A1");
        assert!(lookup("X_999").is_none());
        assert_eq!(lookup("269").unwrap().wt2_multiplicity, 2);
        assert_eq!(lookup("244").unwrap().skew_picard_character, Some(-4));
    }

    #[test]
    fn catalog_errors_carry_line_numbers() {
        let e = parse_catalog("# header\nbad | x;y | 1 | 1 | - | -\n").unwrap_err();
        assert!(matches!(e, ArrangementError::Catalog { line: 2, .. }));
    }
}

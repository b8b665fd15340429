//! Source assignment for every catalog newform, a shared coefficient cache
//! and cross-validation between independent sources.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use super::curve::{ec_ap, EllipticCurve};
use super::eta::{eta_expansion, EtaProduct};
use super::symmetric::{symmetric_cube, symmetric_square, LegendreRule};
use super::{CoefficientSource, ModformError, NewformCoefficients, NewformRef};
use crate::arrangement::linalg::{q, Q};
use crate::finite_fields::primes_between;

const FORM_FILES: &[(&str, &str)] = &[
    ("24A1.txt", include_str!("../../data/forms/24A1.txt")),
    ("32A1.txt", include_str!("../../data/forms/32A1.txt")),
    ("48A1.txt", include_str!("../../data/forms/48A1.txt")),
    ("72A1.txt", include_str!("../../data/forms/72A1.txt")),
    ("96A1.txt", include_str!("../../data/forms/96A1.txt")),
    ("96B1.txt", include_str!("../../data/forms/96B1.txt")),
    ("256k2D.txt", include_str!("../../data/forms/256k2D.txt")),
    ("144k2B.txt", include_str!("../../data/forms/144k2B.txt")),
    ("49k2A.txt", include_str!("../../data/forms/49k2A.txt")),
    ("12k4A1.txt", include_str!("../../data/forms/12k4A1.txt")),
    ("32k4B1.txt", include_str!("../../data/forms/32k4B1.txt")),
    ("24k4A1.txt", include_str!("../../data/forms/24k4A1.txt")),
    ("96k4B1.txt", include_str!("../../data/forms/96k4B1.txt")),
    ("96k4E1.txt", include_str!("../../data/forms/96k4E1.txt")),
    ("256k4H.txt", include_str!("../../data/forms/256k4H.txt")),
    ("144k4A.txt", include_str!("../../data/forms/144k4A.txt")),
    ("49k4D.txt", include_str!("../../data/forms/49k4D.txt")),
];

/// A parsed coefficient file.
#[derive(Clone, Debug, PartialEq)]
pub struct FormFile {
    pub form: NewformRef,
    pub source: CoefficientSource,
}

/// Parses `# level=L weight=k label=X source=curve a1=.. a6=..` or
/// `source=table` followed by `p a_p` lines.
pub fn parse_form_file(name: &str, text: &str) -> Result<FormFile, ModformError> {
    let err = |m: String| ModformError::File(format!("{name}: {m}"));
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().and_then(|h| h.strip_prefix('#')).ok_or_else(|| err("missing header".into()))?;
    let fields: HashMap<&str, &str> = header.split_whitespace().filter_map(|kv| kv.split_once('=')).collect();
    let get = |k: &str| fields.get(k).copied().ok_or_else(|| err(format!("missing `{k}`")));
    let int = |k: &str| -> Result<i64, ModformError> { get(k)?.parse().map_err(|_| err(format!("bad `{k}`"))) };
    let form = NewformRef::parse(&format!("{}k{}{}", get("level")?, get("weight")?, get("label")?))?;
    let source = match get("source")? {
        "curve" => {
            if lines.next().is_some() {
                return Err(err("curve files carry no value lines".into()));
            }
            let a = [int("a1")?, int("a2")?, int("a3")?, int("a4")?, int("a6")?];
            CoefficientSource::EllipticCurve(EllipticCurve::new(a))
        }
        "table" => {
            let mut values = BTreeMap::new();
            for l in lines {
                let mut it = l.split_whitespace();
                let (Some(p), Some(v), None) = (it.next(), it.next(), it.next()) else {
                    return Err(err(format!("bad line `{l}`")));
                };
                let p: u64 = p.parse().map_err(|_| err(format!("bad prime `{p}`")))?;
                let v: i64 = v.parse().map_err(|_| err(format!("bad value `{v}`")))?;
                if values.insert(p, v).is_some() {
                    return Err(err(format!("duplicate prime {p}")));
                }
            }
            CoefficientSource::ShippedTable { file: name.to_string(), values }
        }
        other => return Err(err(format!("unknown source `{other}`"))),
    };
    Ok(FormFile { form, source })
}

/// A form with its sources; the first is authoritative, the rest are
/// cross-checks.
#[derive(Clone, Debug, PartialEq)]
pub struct RegistryEntry {
    pub form: NewformRef,
    pub sources: Vec<CoefficientSource>,
}

fn label(s: &str) -> NewformRef {
    NewformRef::parse(s).expect("static label")
}

fn eta(f: &[(u32, i32)]) -> CoefficientSource {
    CoefficientSource::EtaProduct(EtaProduct::new(f))
}

fn sym2(base: &str, lambda: Q) -> CoefficientSource {
    CoefficientSource::SymmetricSquare { base: label(base), lambda, rule: LegendreRule::CmSplit }
}

fn build_registry() -> Vec<RegistryEntry> {
    let mut entries: Vec<RegistryEntry> = FORM_FILES
        .iter()
        .map(|(name, text)| {
            let ff = parse_form_file(name, text).expect("shipped form file parses");
            RegistryEntry { form: ff.form, sources: vec![ff.source] }
        })
        .collect();
    let mut add = |form: &str, sources: Vec<CoefficientSource>| {
        let form = label(form);
        match entries.iter_mut().find(|e| e.form == form) {
            Some(e) => e.sources.extend(sources),
            None => entries.push(RegistryEntry { form, sources }),
        }
    };
    let rigid = |id: &str| CoefficientSource::RigidOctic(id.to_string());
    let cube = |base: &str| CoefficientSource::SymmetricCube(label(base));
    add("32A1", vec![eta(&[(4, 2), (8, 2)])]);
    // Rigid octics are listed last, as cross-checks only.
    add("32k4A1", vec![cube("32A1"), rigid("19")]);
    add("12k4A1", vec![rigid("239")]);
    add("8k4A1", vec![eta(&[(2, 4), (4, 4)]), rigid("3")]);
    add("6k4A1", vec![eta(&[(1, 2), (2, 2), (3, 2), (6, 2)])]);
    add("256k4H", vec![cube("256k2D")]);
    add("144k4A", vec![cube("144k2B")]);
    add("49k4D", vec![cube("49k2A")]);
    add("8k3A", vec![eta(&[(1, 2), (2, 1), (4, 1), (8, 2)]), sym2("256k2D", q(1))]);
    add("16k3A", vec![eta(&[(4, 6)]), sym2("32A1", q(8))]);
    add("12k3A", vec![eta(&[(2, 3), (6, 3)]), sym2("144k2B", q(-4))]);
    add("7k3A", vec![eta(&[(1, 3), (7, 3)]), sym2("49k2A", q(-64))]);
    entries
}

/// All known forms and their sources.
pub fn registry() -> &'static [RegistryEntry] {
    static REG: OnceLock<Vec<RegistryEntry>> = OnceLock::new();
    REG.get_or_init(build_registry)
}

fn entry(form: &NewformRef) -> Result<&'static RegistryEntry, ModformError> {
    registry().iter().find(|e| e.form == *form).ok_or_else(|| ModformError::UnknownForm(form.to_string()))
}

/// Where a cached value came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub kind: String,
    pub source: String,
}

impl Provenance {
    fn of(src: &CoefficientSource) -> Self {
        Provenance { kind: src.kind().to_string(), source: src.to_string() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CacheEntry {
    value: i64,
    provenance: Provenance,
}

type Cache = HashMap<String, BTreeMap<u64, CacheEntry>>;

fn cache() -> &'static RwLock<Cache> {
    static CACHE: OnceLock<RwLock<Cache>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Adds values to the cache. Existing entries are never replaced; a differing
/// value aborts with both provenances.
fn cache_insert(form: &NewformRef, values: &BTreeMap<u64, i64>, prov: &Provenance) -> Result<(), ModformError> {
    let mut guard = cache().write().expect("cache lock");
    let slot = guard.entry(form.key()).or_default();
    for (&p, &v) in values {
        match slot.get(&p) {
            Some(old) if old.value != v => {
                return Err(ModformError::Disagreement {
                    form: form.to_string(),
                    p,
                    first: old.value,
                    first_source: old.provenance.source.clone(),
                    second: v,
                    second_source: prov.source.clone(),
                })
            }
            Some(_) => {}
            None => {
                slot.insert(p, CacheEntry { value: v, provenance: prov.clone() });
            }
        }
    }
    Ok(())
}

fn cached(form: &NewformRef, p: u64) -> Option<(i64, Provenance)> {
    let guard = cache().read().expect("cache lock");
    guard.get(&form.key())?.get(&p).map(|e| (e.value, e.provenance.clone()))
}

const CACHE_FILE: &str = "coefficients.json";

/// Loads previously saved values into the cache. Values disagreeing with
/// those already present are rejected.
pub fn load_cache(dir: &Path) -> Result<usize, ModformError> {
    let path = dir.join(CACHE_FILE);
    if !path.exists() {
        return Ok(0);
    }
    let text = std::fs::read_to_string(&path).map_err(|e| ModformError::File(e.to_string()))?;
    let data: Cache = serde_json::from_str(&text).map_err(|e| ModformError::File(e.to_string()))?;
    let mut n = 0;
    for (key, rows) in data {
        let form = NewformRef::parse(&key)?;
        for (p, e) in rows {
            let prov = Provenance { kind: e.provenance.kind, source: format!("{} (cached)", e.provenance.source) };
            cache_insert(&form, &BTreeMap::from([(p, e.value)]), &prov)?;
            n += 1;
        }
    }
    Ok(n)
}

pub fn save_cache(dir: &Path) -> Result<(), ModformError> {
    std::fs::create_dir_all(dir).map_err(|e| ModformError::File(e.to_string()))?;
    let guard = cache().read().expect("cache lock");
    let text = serde_json::to_string_pretty(&*guard).map_err(|e| ModformError::File(e.to_string()))?;
    std::fs::write(dir.join(CACHE_FILE), text).map_err(|e| ModformError::File(e.to_string()))
}

fn check_bound(form: &NewformRef, values: &BTreeMap<u64, i64>) -> Result<(), ModformError> {
    for (&p, &a) in values {
        if form.level as u64 % p != 0 && !form.within_bound(p, a) {
            return Err(ModformError::HasseBound { t: a, p });
        }
    }
    Ok(())
}

/// Values of one source at the primes ≤ `pmax` where it is defined.
pub fn source_coefficients(
    form: &NewformRef,
    src: &CoefficientSource,
    pmax: u64,
) -> Result<NewformCoefficients, ModformError> {
    let primes = primes_between(2, pmax);
    let values: BTreeMap<u64, i64> = match src {
        CoefficientSource::EllipticCurve(e) => {
            primes.iter().filter_map(|&p| ec_ap(e, p).ok().map(|a| (p, a))).collect()
        }
        CoefficientSource::EtaProduct(f) => {
            let c = eta_expansion(f, pmax as usize)?;
            primes.iter().map(|&p| (p, c[p as usize])).collect()
        }
        CoefficientSource::ShippedTable { values, .. } => values.range(..=pmax).map(|(&p, &v)| (p, v)).collect(),
        CoefficientSource::RigidOctic(id) => crate::verify::rigid_traces(id, pmax)
            .map_err(|e| ModformError::Rigid(e.to_string()))?
            .into_iter()
            .map(|(p, t)| (p, t as i64))
            .collect(),
        CoefficientSource::SymmetricCube(base) => coefficients(base, pmax)?
            .values
            .iter()
            .filter(|(&p, _)| p >= 5)
            .map(|(&p, &a)| (p, symmetric_cube(a, p)))
            .collect(),
        CoefficientSource::SymmetricSquare { base, lambda, rule } => coefficients(base, pmax)?
            .values
            .iter()
            .filter(|(&p, _)| p >= 5)
            .map(|(&p, &a)| (p, symmetric_square(a, p, *rule, lambda)))
            .collect(),
    };
    check_bound(form, &values)?;
    Ok(NewformCoefficients { form: form.clone(), values, provenance: src.to_string() })
}

/// Coefficients at all primes ≤ `pmax` from the authoritative source, with
/// gaps filled from the cross-check sources in order. Results are cached.
pub fn coefficients(form: &NewformRef, pmax: u64) -> Result<NewformCoefficients, ModformError> {
    let e = entry(form)?;
    let primes = primes_between(2, pmax);
    let mut out = BTreeMap::new();
    let mut provs: Vec<String> = Vec::new();
    let mut missing: Vec<u64> = Vec::new();
    for &p in &primes {
        match cached(form, p) {
            Some((v, prov)) => {
                out.insert(p, v);
                if !provs.contains(&prov.source) {
                    provs.push(prov.source);
                }
            }
            None => missing.push(p),
        }
    }
    for src in &e.sources {
        if missing.is_empty() {
            break;
        }
        let top = *missing.last().unwrap();
        let got = source_coefficients(form, src, top)?;
        let fresh: BTreeMap<u64, i64> = missing.iter().filter_map(|p| got.values.get(p).map(|&v| (*p, v))).collect();
        if fresh.is_empty() {
            continue;
        }
        let prov = Provenance::of(src);
        cache_insert(form, &fresh, &prov)?;
        missing.retain(|p| !fresh.contains_key(p));
        out.extend(fresh);
        if !provs.contains(&prov.source) {
            provs.push(prov.source);
        }
    }
    Ok(NewformCoefficients { form: form.clone(), values: out, provenance: provs.join("; ") })
}

/// a_p of a registered form together with the source that produced it.
pub fn coefficient_lookup(form: &NewformRef, p: u64) -> Result<(i64, Provenance), ModformError> {
    if let Some(hit) = cached(form, p) {
        return Ok(hit);
    }
    coefficients(form, p)?;
    cached(form, p).ok_or_else(|| ModformError::Unavailable { form: form.to_string(), p })
}

/// Outcome of comparing all sources of a form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub form: NewformRef,
    pub sources: Vec<String>,
    /// Primes where at least two sources were compared.
    pub compared: Vec<u64>,
}

/// Evaluates every source of `form` up to `pmax` and requires agreement at
/// each prime where two or more of them are defined.
pub fn cross_validate(form: &NewformRef, pmax: u64) -> Result<CrossCheck, ModformError> {
    let e = entry(form)?;
    let all: Vec<NewformCoefficients> =
        e.sources.iter().map(|s| source_coefficients(form, s, pmax)).collect::<Result<_, _>>()?;
    let mut compared = Vec::new();
    for p in primes_between(2, pmax) {
        let have: Vec<(i64, &str)> = all.iter().filter_map(|c| c.get(p).map(|v| (v, c.provenance.as_str()))).collect();
        if have.len() < 2 {
            continue;
        }
        let (first, first_source) = have[0];
        if let Some(&(second, second_source)) = have.iter().find(|(v, _)| *v != first) {
            return Err(ModformError::Disagreement {
                form: form.to_string(),
                p,
                first,
                first_source: first_source.to_string(),
                second,
                second_source: second_source.to_string(),
            });
        }
        compared.push(p);
    }
    Ok(CrossCheck { form: form.clone(), sources: all.into_iter().map(|c| c.provenance).collect(), compared })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_files_parse() {
        assert_eq!(registry().len(), 17 + 7);
        let f = parse_form_file("t", "# level=96 weight=4 label=B1 source=table\n5 2\n7 -12\n").unwrap();
        assert_eq!(f.form.key(), "96k4B");
        assert!(parse_form_file("t", "# level=96 weight=4 label=B1 source=table\n5 2 3\n").is_err());
        assert!(parse_form_file("t", "level=96").is_err());
        assert!(parse_form_file("t", "# level=9 weight=2 label=A source=magic\n").is_err());
    }

    #[test]
    fn lookups() {
        let (a, prov) = coefficient_lookup(&label("32A1"), 5).unwrap();
        assert_eq!(a, -2);
        assert_eq!(prov.kind, "curve");
        assert_eq!(coefficient_lookup(&label("96k4B1"), 5).unwrap().0, 2);
        assert!(matches!(coefficient_lookup(&label("11A1"), 5), Err(ModformError::UnknownForm(_))));
    }

    #[test]
    fn eta_sources_agree_with_curves() {
        cross_validate(&label("32A1"), 97).unwrap();
        cross_validate(&label("16k3A"), 97).unwrap();
    }

    #[test]
    fn cache_rejects_overwrites() {
        let f = label("99k2Z");
        let prov = Provenance { kind: "test".into(), source: "a".into() };
        cache_insert(&f, &BTreeMap::from([(5, 1)]), &prov).unwrap();
        cache_insert(&f, &BTreeMap::from([(5, 1)]), &prov).unwrap();
        let err = cache_insert(&f, &BTreeMap::from([(5, 2)]), &prov).unwrap_err();
        assert!(matches!(err, ModformError::Disagreement { p: 5, .. }));
    }
}

//! Fourier coefficients of the newforms attached to the catalog, from
//! independent sources: elliptic-curve point counts, eta products, rigid
//! double octics, symmetric powers and shipped tables.

mod curve;
mod eta;
mod registry;
mod symmetric;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arrangement::linalg::Q;
pub use curve::{ec_ap, legendre_family_ap, EllipticCurve};
pub use eta::{eta_expansion, EtaProduct, ETA_BOUND};
pub use registry::{
    coefficient_lookup, coefficients, cross_validate, load_cache, parse_form_file, registry, save_cache,
    source_coefficients, CrossCheck, FormFile, Provenance, RegistryEntry,
};
pub use symmetric::{
    kummer_charpoly, kummer_charpoly_newton, symmetric_cube, symmetric_power_coeffs, symmetric_square, KummerCharpoly,
    LegendreRule, SymmetricKind,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModformError {
    #[error("bad newform label `{0}`")]
    BadLabel(String),
    #[error("p = {p} is a bad prime for {what}")]
    BadPrime { p: u64, what: String },
    #[error("eta product has q-exponent {0}/24, which is not an integer")]
    NonIntegralExponent(i64),
    #[error("eta product is not holomorphic at infinity (leading exponent {0})")]
    NegativeExponent(i64),
    #[error("expansion bound {0} exceeds the supported maximum")]
    BoundTooLarge(usize),
    #[error("unknown newform {0}")]
    UnknownForm(String),
    #[error("no value for {form} at p = {p}")]
    Unavailable { form: String, p: u64 },
    #[error("trace {t} violates the Hasse bound at p = {p}")]
    HasseBound { t: i64, p: u64 },
    #[error("{form} at p = {p}: {first} ({first_source}) disagrees with {second} ({second_source})")]
    Disagreement { form: String, p: u64, first: i64, first_source: String, second: i64, second_source: String },
    #[error("coefficient file: {0}")]
    File(String),
    #[error("rigid octic source failed: {0}")]
    Rigid(String),
}

/// A newform identified by level, weight and letter, e.g. `32k4A1` or `32A1`.
///
/// `32k2A`, `32A1` and `32k2A1` denote the same form: the index after the
/// letter and any bracketed character data are kept for display only.
#[derive(Clone, Debug, Eq)]
pub struct NewformRef {
    pub level: u32,
    pub weight: u32,
    pub letter: String,
    pub index: Option<u32>,
    /// Character descriptor such as `[1,0]` in weight-3 labels.
    pub character: Option<String>,
}

impl NewformRef {
    pub fn new(level: u32, weight: u32, letter: &str) -> Self {
        NewformRef { level, weight, letter: letter.to_string(), index: None, character: None }
    }

    pub fn parse(s: &str) -> Result<Self, ModformError> {
        let bad = || ModformError::BadLabel(s.to_string());
        let s = s.trim();
        let (body, character) = match s.find('[') {
            Some(i) => (&s[..i], Some(s[i..].to_string())),
            None => (s, None),
        };
        let digits = body.chars().take_while(|c| c.is_ascii_digit()).count();
        let level: u32 = body[..digits].parse().map_err(|_| bad())?;
        let mut rest = &body[digits..];
        let mut weight = 2;
        if let Some(r) = rest.strip_prefix('k') {
            let wd = r.chars().take_while(|c| c.is_ascii_digit()).count();
            weight = r[..wd].parse().map_err(|_| bad())?;
            rest = &r[wd..];
        }
        let ld = rest.chars().take_while(|c| c.is_ascii_uppercase()).count();
        if ld == 0 || level == 0 || !(2..=4).contains(&weight) {
            return Err(bad());
        }
        let letter = rest[..ld].to_string();
        let idx = &rest[ld..];
        let index = if idx.is_empty() { None } else { Some(idx.parse().map_err(|_| bad())?) };
        Ok(NewformRef { level, weight, letter, index, character })
    }

    /// Canonical key `level k weight letter`, e.g. `32k2A`.
    pub fn key(&self) -> String {
        format!("{}k{}{}", self.level, self.weight, self.letter)
    }

    /// Deligne bound check: a_p² ≤ 4·p^(k−1).
    pub fn within_bound(&self, p: u64, a: i64) -> bool {
        let bound = 4 * (p as i128).pow(self.weight - 1);
        (a as i128) * (a as i128) <= bound
    }
}

impl PartialEq for NewformRef {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level && self.weight == other.weight && self.letter == other.letter
    }
}

impl Hash for NewformRef {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.level, self.weight, &self.letter).hash(state);
    }
}

impl fmt::Display for NewformRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx = self.index.map(|i| i.to_string()).unwrap_or_default();
        if self.weight == 2 && self.index.is_some() {
            write!(f, "{}{}{}", self.level, self.letter, idx)
        } else {
            write!(f, "{}k{}{}{}", self.level, self.weight, self.letter, idx)
        }
    }
}

impl FromStr for NewformRef {
    type Err = ModformError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NewformRef::parse(s)
    }
}

impl Serialize for NewformRef {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Where a coefficient sequence comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum CoefficientSource {
    EllipticCurve(EllipticCurve),
    EtaProduct(EtaProduct),
    /// Trace of Frobenius on H³ of a rigid catalog arrangement.
    RigidOctic(String),
    SymmetricCube(NewformRef),
    SymmetricSquare {
        base: NewformRef,
        lambda: Q,
        rule: LegendreRule,
    },
    ShippedTable {
        file: String,
        values: std::collections::BTreeMap<u64, i64>,
    },
}

impl CoefficientSource {
    pub fn kind(&self) -> &'static str {
        match self {
            CoefficientSource::EllipticCurve(_) => "curve",
            CoefficientSource::EtaProduct(_) => "eta",
            CoefficientSource::RigidOctic(_) => "rigid",
            CoefficientSource::SymmetricCube(_) => "sym3",
            CoefficientSource::SymmetricSquare { .. } => "sym2",
            CoefficientSource::ShippedTable { .. } => "table",
        }
    }
}

impl fmt::Display for CoefficientSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientSource::EllipticCurve(e) => write!(f, "curve {e}"),
            CoefficientSource::EtaProduct(e) => write!(f, "eta {e}"),
            CoefficientSource::RigidOctic(id) => write!(f, "rigid octic {id}"),
            CoefficientSource::SymmetricCube(b) => write!(f, "sym^3 {b}"),
            CoefficientSource::SymmetricSquare { base, lambda, rule } => {
                write!(f, "sym^2 {base} (lambda={lambda}, {rule:?})")
            }
            CoefficientSource::ShippedTable { file, .. } => write!(f, "table {file}"),
        }
    }
}

/// Prime-indexed coefficients of a newform with their provenance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NewformCoefficients {
    pub form: NewformRef,
    pub values: std::collections::BTreeMap<u64, i64>,
    pub provenance: String,
}

impl NewformCoefficients {
    pub fn get(&self, p: u64) -> Option<i64> {
        self.values.get(&p).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_spellings() {
        let a = NewformRef::parse("32k2A").unwrap();
        let b = NewformRef::parse("32A1").unwrap();
        assert_eq!(a, b);
        assert_eq!(b.to_string(), "32A1");
        assert_eq!(NewformRef::parse("32k4A1").unwrap().to_string(), "32k4A1");
        let c = NewformRef::parse("16k3A[1,0]").unwrap();
        assert_eq!((c.level, c.weight, c.letter.as_str()), (16, 3, "A"));
        assert_eq!(c.character.as_deref(), Some("[1,0]"));
        assert_ne!(NewformRef::parse("32k4A").unwrap(), NewformRef::parse("32k4B").unwrap());
        assert!(NewformRef::parse("k4A").is_err());
        assert!(NewformRef::parse("32k7A").is_err());
        assert!(NewformRef::parse("32").is_err());
    }

    #[test]
    fn deligne_bound() {
        let f = NewformRef::parse("32k4A").unwrap();
        assert!(f.within_bound(5, 22));
        assert!(!f.within_bound(5, 23));
    }
}

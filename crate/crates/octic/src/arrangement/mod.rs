//! Arrangements of eight planes in P³, their singularities and structure.

mod catalog;
mod inventory;
pub mod linalg;
mod parse;
mod structure;

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::modforms::NewformRef;
pub use catalog::{catalog, catalog_ids, lookup, parse_catalog};
pub use inventory::{
    branch_euler_number, cy_admissible, good_primes, singularity_inventory, InventoryCounts, MultiplePoint,
    SingularityInventory,
};
pub use linalg::Q;
use linalg::{normalize_q, q, squarefree_part};
pub use parse::{parse_arrangement, parse_equation, parse_linear_form};
pub use structure::{
    check_involution, cross_ratio, cross_ratio_identity, cross_ratio_orderings, find_kummer_splits, find_ruled_planes,
    harmonic_pairing, AffineForm, InvolutionCheck, KummerSplit,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArrangementError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("expected 8 linear forms, found {0}")]
    FormCount(usize),
    #[error("forms {0} and {1} are proportional")]
    Proportional(usize, usize),
    #[error("nonlinear factor `{0}`")]
    Nonlinear(String),
    #[error("zero linear form")]
    ZeroForm,
    #[error("unknown catalog id `{0}`")]
    UnknownId(String),
    #[error("catalog line {line}: {msg}")]
    Catalog { line: usize, msg: String },
    #[error("cross-ratio needs four distinct values")]
    RepeatedValue,
    #[error("matrix is singular")]
    Singular,
    #[error("matrix square is not a scalar multiple of the identity")]
    NotInvolution,
    #[error("matrix does not preserve the arrangement (form {0} has no image)")]
    NotPreserving(usize),
    #[error("invalid Kummer parameters: {0}")]
    KummerParameters(String),
}

/// A linear form c_x·x + c_y·y + c_z·z + c_t·t with coprime integer
/// coefficients whose first nonzero entry is positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LinearForm(pub [i64; 4]);

impl LinearForm {
    /// Normalizes rational coefficients. Returns the form and the factor `k`
    /// with `original = k · form`.
    pub fn from_rational(c: &[Q; 4]) -> Result<(Self, Q), ArrangementError> {
        if c.iter().all(|x| x.is_zero()) {
            return Err(ArrangementError::ZeroForm);
        }
        let (w, k) = normalize_q(c);
        Ok((LinearForm(w), k))
    }

    pub fn from_ints(c: [i64; 4]) -> Result<(Self, Q), ArrangementError> {
        Self::from_rational(&c.map(q))
    }

    pub fn coeffs(&self) -> &[i64; 4] {
        &self.0
    }

    pub fn eval(&self, x: &[i64; 4]) -> i128 {
        linalg::dot(&self.0, x)
    }

    pub fn reduce(&self, p: u64) -> [u64; 4] {
        self.0.map(|c| c.rem_euclid(p as i64) as u64)
    }

    /// Coefficients of `x ↦ self(M x)`, i.e. the row vector `self · M`.
    pub fn compose(&self, m: &[[Q; 4]; 4]) -> [Q; 4] {
        std::array::from_fn(|j| (0..4).map(|i| q(self.0[i]) * &m[i][j]).sum())
    }
}

const VARS: [&str; 4] = ["x", "y", "z", "t"];

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, v) in self.0.iter().zip(VARS) {
            if *c == 0 {
                continue;
            }
            let sign = if *c < 0 {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let mag = c.abs();
            if mag == 1 {
                write!(f, "{sign}{v}")?;
            } else {
                write!(f, "{sign}{mag}{v}")?;
            }
            first = false;
        }
        Ok(())
    }
}

/// An involution of P³ given by a rational matrix acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvolutionMatrix(pub [[Q; 4]; 4]);

impl InvolutionMatrix {
    pub fn from_ints(m: [[i64; 4]; 4]) -> Self {
        InvolutionMatrix(m.map(|r| r.map(q)))
    }

    pub fn identity() -> Self {
        Self::from_ints([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    }

    pub fn entries(&self) -> &[[Q; 4]; 4] {
        &self.0
    }

    pub fn mul(&self, other: &Self) -> Self {
        let a = &self.0;
        let b = &other.0;
        InvolutionMatrix(std::array::from_fn(|i| std::array::from_fn(|j| (0..4).map(|k| &a[i][k] * &b[k][j]).sum())))
    }

    /// The scalar `c` with `M² = c·Id`, if any.
    pub fn square_scalar(&self) -> Option<Q> {
        let sq = self.mul(self);
        let c = sq.0[0][0].clone();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { c.clone() } else { Q::zero() };
                if sq.0[i][j] != want {
                    return None;
                }
            }
        }
        (!c.is_zero()).then_some(c)
    }

    /// Reduces entries mod p; `None` if a denominator vanishes.
    pub fn reduce(&self, p: u64) -> Option<[[u64; 4]; 4]> {
        let mut out = [[0u64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = linalg::q_mod(&self.0[i][j], p)?;
            }
        }
        Some(out)
    }
}

impl fmt::Display for InvolutionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .0
            .iter()
            .map(|r| {
                let mut s = String::new();
                for (c, v) in r.iter().zip(VARS) {
                    if c.is_zero() {
                        continue;
                    }
                    let neg = c.is_negative();
                    let mag = c.abs();
                    if !s.is_empty() || neg {
                        s.push(if neg { '-' } else { '+' });
                    }
                    if !mag.is_one() {
                        s.push_str(&mag.to_string());
                    }
                    s.push_str(v);
                }
                if s.is_empty() {
                    s.push('0');
                }
                s
            })
            .collect();
        write!(f, "({})", rows.join(","))
    }
}

/// Eight planes with the leading constant of the octic and optional catalog
/// metadata. The octic is `scalar · ∏ forms`.
#[derive(Clone, Debug)]
pub struct PlaneArrangement {
    pub id: String,
    pub forms: Vec<LinearForm>,
    pub scalar: Q,
    pub h11: Option<u32>,
    pub h12: Option<u32>,
    pub wt4_form: Option<NewformRef>,
    pub wt2_form: Option<NewformRef>,
    /// Multiplier m in the predicted trace a_p + m·p·b_p.
    pub wt2_multiplicity: u32,
    pub involutions: Vec<InvolutionMatrix>,
    /// Discriminant of the quadratic character on skew Picard classes.
    pub skew_picard_character: Option<i64>,
}

impl PlaneArrangement {
    /// Builds an arrangement from rational factors and a constant. Each factor
    /// is normalized and its content moved into the scalar.
    pub fn new(id: &str, factors: &[[Q; 4]], constant: Q) -> Result<Self, ArrangementError> {
        if factors.len() != 8 {
            return Err(ArrangementError::FormCount(factors.len()));
        }
        let mut scalar = constant;
        let mut forms = Vec::with_capacity(8);
        for c in factors {
            let (form, k) = LinearForm::from_rational(c)?;
            scalar *= k;
            forms.push(form);
        }
        if scalar.is_zero() {
            return Err(ArrangementError::ZeroForm);
        }
        for i in 0..8 {
            for j in 0..i {
                if forms[i] == forms[j] {
                    return Err(ArrangementError::Proportional(j, i));
                }
            }
        }
        Ok(PlaneArrangement {
            id: id.to_string(),
            forms,
            scalar,
            h11: None,
            h12: None,
            wt4_form: None,
            wt2_form: None,
            wt2_multiplicity: 1,
            involutions: Vec::new(),
            skew_picard_character: None,
        })
    }

    pub fn from_int_forms(id: &str, forms: &[[i64; 4]], constant: i64) -> Result<Self, ArrangementError> {
        let f: Vec<[Q; 4]> = forms.iter().map(|r| r.map(q)).collect();
        Self::new(id, &f, q(constant))
    }

    /// The Kummer-construction octic
    /// (x−t)(x−νt)(x+νt)·y·z·(y+t)(z+t)(y+λz) with μ = ν².
    pub fn kummer(lambda: &Q, mu: &Q) -> Result<Self, ArrangementError> {
        let nu = rational_sqrt(mu)
            .ok_or_else(|| ArrangementError::KummerParameters(format!("mu = {mu} is not the square of a rational")))?;
        if lambda.is_zero() {
            return Err(ArrangementError::KummerParameters("lambda = 0".into()));
        }
        if mu.is_zero() || mu.is_one() {
            return Err(ArrangementError::KummerParameters(format!("mu = {mu}")));
        }
        let z = Q::zero;
        let one = Q::one;
        let factors = [
            [one(), z(), z(), -one()],
            [one(), z(), z(), -nu.clone()],
            [one(), z(), z(), nu.clone()],
            [z(), one(), z(), z()],
            [z(), z(), one(), z()],
            [z(), one(), z(), one()],
            [z(), z(), one(), one()],
            [z(), one(), lambda.clone(), z()],
        ];
        let mut arr = Self::new(&format!("D({lambda},{mu})"), &factors, one())?;
        arr.h12 = Some(if *lambda == -one() { 1 } else { 2 });
        Ok(arr)
    }

    /// Squarefree integer in the square class of the leading scalar.
    pub fn scalar_class(&self) -> i64 {
        squarefree_part(&self.scalar)
    }

    /// The family number, i.e. the id without a trailing row letter.
    pub fn family(&self) -> &str {
        self.id.trim_end_matches(|c: char| c.is_ascii_alphabetic())
    }

    pub fn form_matrix(&self) -> Vec<[i64; 4]> {
        self.forms.iter().map(|f| f.0).collect()
    }

    /// Equation in the printed style, e.g. `u^2 = xyzt(x+y)...`.
    pub fn equation(&self) -> String {
        let mut s = String::from("u^2 = ");
        if !self.scalar.is_one() {
            s.push_str(&format!("{}·", self.scalar));
        }
        for f in &self.forms {
            let txt = f.to_string();
            if txt.len() == 1 {
                s.push_str(&txt);
            } else {
                s.push('(');
                s.push_str(&txt);
                s.push(')');
            }
        }
        s
    }
}

/// Rational square root, if it exists.
pub fn rational_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| Q::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::linalg::qr;
    use super::*;

    #[test]
    fn form_display_and_normalization() {
        let (f, k) = LinearForm::from_rational(&[q(-2), q(0), q(4), qr(2, 3)]).unwrap();
        assert_eq!(f.0, [3, 0, -6, -1]);
        assert_eq!(k, qr(-2, 3));
        assert_eq!(f.to_string(), "3x-6z-t");
        assert_eq!(LinearForm::from_ints([0, 0, 0, 0]), Err(ArrangementError::ZeroForm));
    }

    #[test]
    fn kummer_scalar_tracks_lambda_denominator() {
        let arr = PlaneArrangement::kummer(&qr(1, 8), &qr(1, 9)).unwrap();
        assert_eq!(arr.scalar_class(), 2);
        assert_eq!(arr.forms[7].0, [0, 8, 1, 0]);
        assert!(PlaneArrangement::kummer(&qr(1, 8), &qr(2, 1)).is_err());
        assert!(PlaneArrangement::kummer(&q(0), &qr(1, 9)).is_err());
    }

    #[test]
    fn involution_square() {
        let m = InvolutionMatrix::from_ints([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, -1, 0]]);
        assert_eq!(m.square_scalar(), Some(q(1)));
        assert_eq!(m.to_string(), "(y,x,-t,-z)");
        let r = InvolutionMatrix::from_ints([[0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 0, 0], [0, 0, 0, 1]]);
        assert_eq!(r.square_scalar(), None);
    }
}

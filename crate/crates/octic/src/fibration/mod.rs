//! Double quartic elliptic fibrations: Kodaira configurations of the double
//! cover of P² branched along four lines, fibered by the pencil through a point.
//!
//! A pencil member through the pencil point P is classified from the branch
//! points it carries:
//!
//! | member datum                                             | fiber |
//! |----------------------------------------------------------|-------|
//! | four distinct branch points                              | I0    |
//! | one double point                                         | I2    |
//! | two double points                                        | I4    |
//! | one triple point                                         | D4*   |
//! | member is an arrangement line, three distinct residuals  | D4*   |
//! | member is an arrangement line, two residuals collide     | D6*   |
//!
//! When P lies on one of the lines, that line meets every other member at P
//! in a simple branch point. P on two lines, or all four lines concurrent, is
//! rejected.

mod tables;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arrangement::linalg::{cross, q, Q};
use crate::arrangement::rational_sqrt;
pub use tables::{
    align_tables, parse_reference_tables, reference_tables, FiberTable, Mobius, ReferenceTable, TableAlignment,
    TableColumn,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FibrationError {
    #[error("the four lines are concurrent; the double cover is not rational")]
    Concurrent,
    #[error("two of the lines coincide")]
    RepeatedLine,
    #[error("the pencil point lies on {0} lines")]
    PointOnSeveralLines(usize),
    #[error("pencil forms do not span the lines through the pencil point")]
    BadPencil,
    #[error("Euler numbers sum to {0}, expected 12")]
    EulerSum(u32),
    #[error("configuration gives negative Picard number {0}")]
    NegativePicard(i64),
    #[error("base change map has degree {0}; only degree 1 or 2 is supported")]
    MapDegree(usize),
    #[error("preimage of {0} is not rational")]
    IrrationalPreimage(BaseParam),
    #[error("configuration is not of shape I2, I2, I4, I4")]
    NotS3Shape,
    #[error("parse error: {0}")]
    Parse(String),
}

/// A point of P¹(Q): a rational value or ∞. Finite values sort before ∞.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BaseParam {
    Finite(Q),
    Infinity,
}

impl BaseParam {
    pub fn int(n: i64) -> Self {
        BaseParam::Finite(q(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        BaseParam::Finite(Q::new(n.into(), d.into()))
    }

    /// From homogeneous coordinates (a : b) meaning a/b.
    pub fn from_hom(a: Q, b: Q) -> Self {
        if b.is_zero() {
            BaseParam::Infinity
        } else {
            BaseParam::Finite(a / b)
        }
    }

    /// Homogeneous coordinates (a : b).
    pub fn hom(&self) -> (Q, Q) {
        match self {
            BaseParam::Finite(v) => (v.clone(), Q::one()),
            BaseParam::Infinity => (Q::one(), Q::zero()),
        }
    }
}

impl Ord for BaseParam {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (BaseParam::Finite(a), BaseParam::Finite(b)) => a.cmp(b),
            (BaseParam::Finite(_), BaseParam::Infinity) => Ordering::Less,
            (BaseParam::Infinity, BaseParam::Finite(_)) => Ordering::Greater,
            (BaseParam::Infinity, BaseParam::Infinity) => Ordering::Equal,
        }
    }
}

impl PartialOrd for BaseParam {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BaseParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseParam::Finite(v) => write!(f, "{v}"),
            BaseParam::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for BaseParam {
    type Err = FibrationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if matches!(s, "inf" | "oo" | "∞") {
            return Ok(BaseParam::Infinity);
        }
        s.parse::<Q>().map(BaseParam::Finite).map_err(|_| FibrationError::Parse(format!("bad base parameter `{s}`")))
    }
}

impl Serialize for BaseParam {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Kodaira fiber types: `I(n)` for I_n (I(0) is smooth) and `DStar(m)` for D_m*.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KodairaType {
    I(u32),
    DStar(u32),
}

impl KodairaType {
    pub const I0: KodairaType = KodairaType::I(0);
    pub const I2: KodairaType = KodairaType::I(2);
    pub const I4: KodairaType = KodairaType::I(4);
    pub const D4: KodairaType = KodairaType::DStar(4);
    pub const D6: KodairaType = KodairaType::DStar(6);

    pub fn euler(&self) -> u32 {
        match *self {
            KodairaType::I(n) => n,
            KodairaType::DStar(m) => m + 2,
        }
    }

    pub fn components(&self) -> u32 {
        match *self {
            KodairaType::I(0) => 1,
            KodairaType::I(n) => n,
            KodairaType::DStar(m) => m + 1,
        }
    }

    pub fn is_smooth(&self) -> bool {
        *self == KodairaType::I0
    }
}

impl fmt::Display for KodairaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KodairaType::I(n) => write!(f, "I{n}"),
            KodairaType::DStar(m) => write!(f, "D{m}*"),
        }
    }
}

impl FromStr for KodairaType {
    type Err = FibrationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FibrationError::Parse(format!("bad Kodaira type `{s}`"));
        let s = s.trim();
        if let Some(n) = s.strip_prefix('I') {
            return n.parse().map(KodairaType::I).map_err(|_| bad());
        }
        if let Some(m) = s.strip_prefix('D').and_then(|r| r.strip_suffix('*')) {
            return m.parse().map(KodairaType::DStar).map_err(|_| bad());
        }
        Err(bad())
    }
}

impl Serialize for KodairaType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Fibers over base points, sorted by parameter. I0 entries are markers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FiberConfiguration {
    pub fibers: Vec<Fiber>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Fiber {
    pub t: BaseParam,
    #[serde(rename = "type")]
    pub kind: KodairaType,
}

impl FiberConfiguration {
    pub fn new(mut fibers: Vec<(BaseParam, KodairaType)>) -> Self {
        fibers.sort();
        FiberConfiguration { fibers: fibers.into_iter().map(|(t, kind)| Fiber { t, kind }).collect() }
    }

    pub fn euler_sum(&self) -> u32 {
        self.fibers.iter().map(|f| f.kind.euler()).sum()
    }

    /// Singular fiber types in sorted order, I0 markers dropped.
    pub fn singular_types(&self) -> Vec<KodairaType> {
        let mut v: Vec<KodairaType> = self.fibers.iter().map(|f| f.kind).filter(|k| !k.is_smooth()).collect();
        v.sort();
        v
    }

    pub fn get(&self, t: &BaseParam) -> Option<KodairaType> {
        self.fibers.iter().find(|f| &f.t == t).map(|f| f.kind)
    }

    pub fn params(&self) -> Vec<BaseParam> {
        self.fibers.iter().map(|f| f.t.clone()).collect()
    }
}

impl fmt::Display for FiberConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.fibers.iter().map(|x| format!("{}:{}", x.t, x.kind)).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Four lines in P² with a pencil point P. The pencil member with parameter t
/// is the line `m0 − t·m1`, where `m0`, `m1` span the lines through P.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuarticFibration {
    pub lines: [[i64; 3]; 4],
    pub point: [i64; 3],
    pub pencil: [[i64; 3]; 2],
}

impl QuarticFibration {
    /// Uses the reduced basis of the forms vanishing at P: for P with last
    /// nonzero coordinate k, the two standard-coordinate combinations that
    /// eliminate coordinate k.
    pub fn new(lines: [[i64; 3]; 4], point: [i64; 3]) -> Result<Self, FibrationError> {
        let k = (0..3).rev().find(|&k| point[k] != 0).ok_or(FibrationError::BadPencil)?;
        let others: Vec<usize> = (0..3).filter(|&j| j != k).collect();
        let make = |j: usize| {
            let mut m = [0i64; 3];
            m[j] = point[k];
            m[k] = -point[j];
            m
        };
        Self::with_pencil(lines, point, [make(others[0]), make(others[1])])
    }

    pub fn with_pencil(lines: [[i64; 3]; 4], point: [i64; 3], pencil: [[i64; 3]; 2]) -> Result<Self, FibrationError> {
        let dot = |a: &[i64; 3], b: &[i64; 3]| -> i128 { (0..3).map(|i| a[i] as i128 * b[i] as i128).sum() };
        if pencil.iter().any(|m| dot(m, &point) != 0) || cross(&pencil[0], &pencil[1]) == [0; 3] {
            return Err(FibrationError::BadPencil);
        }
        Ok(QuarticFibration { lines, point, pencil })
    }

    fn dot(a: &[i64; 3], b: &[i64; 3]) -> i128 {
        (0..3).map(|i| a[i] as i128 * b[i] as i128).sum()
    }

    /// Parameter of the member through a point other than P.
    fn param_of_point(&self, pt: &[i128; 3]) -> BaseParam {
        let ev = |m: &[i64; 3]| -> i128 { (0..3).map(|i| m[i] as i128 * pt[i]).sum() };
        let a = ev(&self.pencil[0]);
        let b = ev(&self.pencil[1]);
        BaseParam::from_hom(Q::from_integer(a.into()), Q::from_integer(b.into()))
    }

    /// Parameter of a line through P, written as α·m0 + β·m1 ∝ m0 − t·m1.
    fn param_of_line(&self, l: &[i64; 3]) -> Result<BaseParam, FibrationError> {
        let [m0, m1] = &self.pencil;
        for r in 0..3 {
            for s in r + 1..3 {
                let det = m0[r] as i128 * m1[s] as i128 - m0[s] as i128 * m1[r] as i128;
                if det == 0 {
                    continue;
                }
                let alpha = l[r] as i128 * m1[s] as i128 - l[s] as i128 * m1[r] as i128;
                let beta = m0[r] as i128 * l[s] as i128 - m0[s] as i128 * l[r] as i128;
                return Ok(BaseParam::from_hom(Q::from_integer((-beta).into()), Q::from_integer(alpha.into())));
            }
        }
        Err(FibrationError::BadPencil)
    }
}

fn same_point(a: &[i128; 3], b: &[i128; 3]) -> bool {
    a[1] * b[2] == a[2] * b[1] && a[2] * b[0] == a[0] * b[2] && a[0] * b[1] == a[1] * b[0]
}

/// Classifies the singular fibers of the pencil through P.
pub fn classify_quartic_fibration(fib: &QuarticFibration) -> Result<FiberConfiguration, FibrationError> {
    let l = &fib.lines;
    for i in 0..4 {
        for j in 0..i {
            if cross(&l[i], &l[j]) == [0; 3] {
                return Err(FibrationError::RepeatedLine);
            }
        }
    }
    let x01 = cross(&l[0], &l[1]);
    let on = |pt: &[i128; 3], line: &[i64; 3]| (0..3).map(|i| pt[i] * line[i] as i128).sum::<i128>() == 0;
    if on(&x01, &l[2]) && on(&x01, &l[3]) {
        return Err(FibrationError::Concurrent);
    }
    let vertical: Vec<usize> = (0..4).filter(|&i| QuarticFibration::dot(&l[i], &fib.point) == 0).collect();
    if vertical.len() > 1 {
        return Err(FibrationError::PointOnSeveralLines(vertical.len()));
    }
    let mut out: Vec<(BaseParam, KodairaType)> = Vec::new();
    for &v in &vertical {
        let t = fib.param_of_line(&l[v])?;
        let mut residual: Vec<[i128; 3]> = Vec::new();
        for j in (0..4).filter(|&j| j != v) {
            let pt = cross(&l[v], &l[j]);
            if !residual.iter().any(|r| same_point(r, &pt)) {
                residual.push(pt);
            }
        }
        let kind = if residual.len() == 3 { KodairaType::D4 } else { KodairaType::D6 };
        out.push((t, kind));
    }
    let vertical_params: Vec<BaseParam> = out.iter().map(|(t, _)| t.clone()).collect();
    let mut groups: Vec<(BaseParam, Vec<([i128; 3], Vec<usize>)>)> = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            if vertical.contains(&i) || vertical.contains(&j) {
                continue;
            }
            let pt = cross(&l[i], &l[j]);
            let t = fib.param_of_point(&pt);
            if vertical_params.contains(&t) {
                continue;
            }
            let g = match groups.iter_mut().find(|(s, _)| *s == t) {
                Some(g) => g,
                None => {
                    groups.push((t, Vec::new()));
                    groups.last_mut().unwrap()
                }
            };
            match g.1.iter_mut().find(|(p, _)| same_point(p, &pt)) {
                Some((_, planes)) => {
                    for k in [i, j] {
                        if !planes.contains(&k) {
                            planes.push(k);
                        }
                    }
                }
                None => g.1.push((pt, vec![i, j])),
            }
        }
    }
    for (t, pts) in groups {
        let mut pattern: Vec<usize> = pts.iter().map(|(_, s)| s.len()).collect();
        pattern.sort_unstable();
        let kind = match pattern.as_slice() {
            [2] => KodairaType::I2,
            [2, 2] => KodairaType::I4,
            [3] => KodairaType::D4,
            _ => return Err(FibrationError::Concurrent),
        };
        out.push((t, kind));
    }
    Ok(FiberConfiguration::new(out))
}

/// Picard number of the generic fiber: 1 + 8 − Σ (m_v − 1).
pub fn generic_fiber_picard(cfg: &FiberConfiguration) -> Result<i64, FibrationError> {
    let e = cfg.euler_sum();
    if e != 12 {
        return Err(FibrationError::EulerSum(e));
    }
    let defect: i64 = cfg.fibers.iter().map(|f| f.kind.components() as i64 - 1).sum();
    let rho = 1 + 8 - defect;
    if rho < 0 {
        return Err(FibrationError::NegativePicard(rho));
    }
    Ok(rho)
}

/// The six configurations of rational double quartic fibrations with their
/// generic-fiber Picard numbers.
pub fn standard_configurations() -> Vec<(&'static str, Vec<KodairaType>, i64)> {
    use KodairaType as K;
    vec![
        ("S1", vec![K::D4, K::D4], 1),
        ("S2", vec![K::I2, K::I2, K::D6], 1),
        ("S3", vec![K::I2, K::I2, K::I4, K::I4], 1),
        ("S4", vec![K::I2, K::I2, K::I2, K::D4], 2),
        ("S5", vec![K::I2, K::I2, K::I2, K::I2, K::I4], 2),
        ("S6", vec![K::I2; 6], 3),
    ]
}

/// A line configuration realizing each standard configuration.
pub fn example_fibration(name: &str) -> Option<QuarticFibration> {
    let quad = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]];
    let pencil3 = [[1, 0, 0], [0, 1, 0], [1, 1, 0], [0, 0, 1]];
    let (lines, point) = match name {
        "S1" => (pencil3, [1, 2, 0]),
        "S2" => (pencil3, [0, 1, 1]),
        "S3" => (quad, [1, -1, -1]),
        "S4" => (pencil3, [1, 2, 5]),
        "S4v" => (quad, [1, 2, -3]),
        "S5" => (quad, [1, -1, 5]),
        "S6" => (quad, [1, 3, 9]),
        _ => return None,
    };
    QuarticFibration::new(lines, point).ok()
}

/// A map t ↦ num(t)/den(t) with polynomials of degree ≤ 2, coefficients
/// listed from the constant term up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMap {
    pub num: Vec<Q>,
    pub den: Vec<Q>,
}

impl RationalMap {
    pub fn new(num: Vec<Q>, den: Vec<Q>) -> Self {
        RationalMap { num, den }
    }

    pub fn identity() -> Self {
        RationalMap { num: vec![q(0), q(1)], den: vec![q(1)] }
    }

    /// The degree, assuming numerator and denominator are coprime.
    pub fn degree(&self) -> usize {
        poly_degree(&self.num).max(poly_degree(&self.den)).unwrap_or(0)
    }

    pub fn apply(&self, t: &BaseParam) -> BaseParam {
        let d = self.degree();
        let (a, b) = t.hom();
        let hom_eval = |c: &[Q]| -> Q {
            (0..=d)
                .map(|k| {
                    let ck = c.get(k).cloned().unwrap_or_else(Q::zero);
                    ck * pow(&a, k) * pow(&b, d - k)
                })
                .sum()
        };
        BaseParam::from_hom(hom_eval(&self.num), hom_eval(&self.den))
    }

    /// Preimages of s with ramification indices.
    pub fn preimages(&self, s: &BaseParam) -> Result<Vec<(BaseParam, u32)>, FibrationError> {
        let d = self.degree();
        let (sa, sb) = s.hom();
        let c: Vec<Q> = (0..=d)
            .map(|k| {
                let nk = self.num.get(k).cloned().unwrap_or_else(Q::zero);
                let dk = self.den.get(k).cloned().unwrap_or_else(Q::zero);
                &sb * nk - &sa * dk
            })
            .collect();
        homogeneous_roots(&c, d).ok_or_else(|| FibrationError::IrrationalPreimage(s.clone()))
    }
}

fn pow(x: &Q, k: usize) -> Q {
    (0..k).fold(Q::one(), |acc, _| acc * x)
}

fn poly_degree(c: &[Q]) -> Option<usize> {
    c.iter().rposition(|x| !x.is_zero())
}

/// Roots in P¹ of a binary form of degree d given by coefficients of t^k·1^(d−k).
fn homogeneous_roots(c: &[Q], d: usize) -> Option<Vec<(BaseParam, u32)>> {
    let deg = poly_degree(c)?;
    let mut roots = Vec::new();
    if deg < d {
        roots.push((BaseParam::Infinity, (d - deg) as u32));
    }
    match deg {
        0 => {}
        1 => roots.push((BaseParam::Finite(-&c[0] / &c[1]), 1)),
        2 => {
            let (a, b, cc) = (&c[2], &c[1], &c[0]);
            let disc = b * b - q(4) * a * cc;
            let two_a = q(2) * a;
            if disc.is_zero() {
                roots.push((BaseParam::Finite(-b / &two_a), 2));
            } else {
                let r = rational_sqrt(&disc)?;
                roots.push((BaseParam::Finite((-b + &r) / &two_a), 1));
                roots.push((BaseParam::Finite((-b - &r) / &two_a), 1));
            }
        }
        _ => return None,
    }
    Some(roots)
}

/// Pulls a configuration back along a map of degree ≤ 2. At a point of
/// ramification index 2, I_n becomes I_2n and D_(4+k)* becomes I_2k; fibers
/// are copied at unramified preimages.
pub fn base_change_configuration(
    cfg: &FiberConfiguration,
    map: &RationalMap,
) -> Result<FiberConfiguration, FibrationError> {
    let d = map.degree();
    if d == 0 || d > 2 {
        return Err(FibrationError::MapDegree(d));
    }
    let mut out = Vec::new();
    for f in &cfg.fibers {
        for (t, e) in map.preimages(&f.t)? {
            let kind = if e == 2 {
                match f.kind {
                    KodairaType::I(n) => KodairaType::I(2 * n),
                    KodairaType::DStar(m) => KodairaType::I(2 * (m - 4)),
                }
            } else {
                f.kind
            };
            out.push((t, kind));
        }
    }
    Ok(FiberConfiguration::new(out))
}

/// Exchanges I2 and I4 fibers of an S3 configuration, keeping I0 markers.
pub fn isogeny_swap(cfg: &FiberConfiguration) -> Result<FiberConfiguration, FibrationError> {
    use KodairaType as K;
    if cfg.singular_types() != vec![K::I2, K::I2, K::I4, K::I4] {
        return Err(FibrationError::NotS3Shape);
    }
    let swapped = cfg
        .fibers
        .iter()
        .map(|f| {
            let kind = match f.kind {
                K::I2 => K::I4,
                K::I4 => K::I2,
                k => k,
            };
            (f.t.clone(), kind)
        })
        .collect();
    Ok(FiberConfiguration::new(swapped))
}

/// Parses `t:type` entries separated by whitespace, e.g. `-1:I2 0:I4 inf:D6*`.
pub fn parse_configuration(s: &str) -> Result<FiberConfiguration, FibrationError> {
    let mut v = Vec::new();
    for tok in s.split_whitespace() {
        let (t, k) = tok.rsplit_once(':').ok_or_else(|| FibrationError::Parse(format!("bad entry `{tok}`")))?;
        v.push((t.parse()?, k.parse()?));
    }
    Ok(FiberConfiguration::new(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(s: &str) -> FiberConfiguration {
        parse_configuration(s).unwrap()
    }

    #[test]
    fn standard_examples_reproduce_table() {
        for (name, types, rho) in standard_configurations() {
            let c = classify_quartic_fibration(&example_fibration(name).unwrap()).unwrap();
            let mut want = types.clone();
            want.sort();
            assert_eq!(c.singular_types(), want, "{name}: {c}");
            assert_eq!(c.euler_sum(), 12);
            assert_eq!(generic_fiber_picard(&c).unwrap(), rho);
        }
        let v = classify_quartic_fibration(&example_fibration("S4v").unwrap()).unwrap();
        assert_eq!(v.singular_types(), vec![KodairaType::I2, KodairaType::I2, KodairaType::I2, KodairaType::D4]);
    }

    #[test]
    fn picard_numbers() {
        assert_eq!(generic_fiber_picard(&cfg("0:I2 1:I2 2:I2 3:I2 4:I2 inf:I2")).unwrap(), 3);
        assert_eq!(generic_fiber_picard(&cfg("0:I2 1:I2 inf:D6*")).unwrap(), 1);
        assert_eq!(generic_fiber_picard(&cfg("0:I2 1:I2 2:I2 inf:D4*")).unwrap(), 2);
        assert_eq!(generic_fiber_picard(&cfg("0:I2 1:I2")), Err(FibrationError::EulerSum(4)));
    }

    #[test]
    fn rejects_degenerate_configurations() {
        let conc = QuarticFibration::new([[1, 0, 0], [0, 1, 0], [1, 1, 0], [1, 2, 0]], [1, 1, 1]).unwrap();
        assert_eq!(classify_quartic_fibration(&conc), Err(FibrationError::Concurrent));
        let two = QuarticFibration::new([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]], [0, 0, 1]).unwrap();
        assert_eq!(classify_quartic_fibration(&two), Err(FibrationError::PointOnSeveralLines(2)));
    }

    #[test]
    fn s3_pullback_by_involution() {
        let s3 = cfg("-1:I2 0:I4 1:I2 inf:I4");
        let map = RationalMap::new(vec![q(-1), q(1)], vec![q(1), q(1)]);
        let pulled = base_change_configuration(&s3, &map).unwrap();
        assert_eq!(pulled, cfg("-1:I4 0:I2 1:I4 inf:I2"));
        assert_eq!(isogeny_swap(&s3).unwrap(), pulled);
    }

    #[test]
    fn squared_mobius_pullback_of_arrangement_8() {
        // t ↦ ((t+1)/(t−1))²
        let map = RationalMap::new(vec![q(1), q(2), q(1)], vec![q(1), q(-2), q(1)]);
        let row1 = cfg("0:D4* 1:I2 4:I2 inf:I2");
        let row2 = cfg("0:I2 1:I2 4:I0 inf:D6*");
        assert_eq!(base_change_configuration(&row1, &map).unwrap(), cfg("-1:I0 0:I2 1/3:I2 1:I4 3:I2 inf:I2"));
        assert_eq!(base_change_configuration(&row2, &map).unwrap(), cfg("-1:I4 0:I2 1/3:I0 1:I4 3:I0 inf:I2"));
    }

    #[test]
    fn base_change_edge_cases() {
        let c = cfg("-1:I2 0:I4 1:I2 inf:I4");
        assert_eq!(base_change_configuration(&c, &RationalMap::identity()).unwrap(), c);
        let cubic = RationalMap::new(vec![q(0), q(0), q(0), q(1)], vec![q(1)]);
        assert_eq!(base_change_configuration(&c, &cubic), Err(FibrationError::MapDegree(3)));
        let sq = RationalMap::new(vec![q(0), q(0), q(1)], vec![q(1)]);
        assert!(matches!(base_change_configuration(&cfg("2:I2"), &sq), Err(FibrationError::IrrationalPreimage(_))));
    }

    #[test]
    fn isogeny_swap_shape() {
        let c = cfg("-1:I2 0:I4 1:I2 inf:I4");
        assert_eq!(isogeny_swap(&isogeny_swap(&c).unwrap()).unwrap(), c);
        assert_eq!(isogeny_swap(&cfg("0:I2 1:I2 inf:D6*")), Err(FibrationError::NotS3Shape));
    }

    #[test]
    fn parse_round_trip() {
        let c = cfg("1/3:I2 inf:D6* -1:I0");
        assert_eq!(c.to_string(), "{-1:I0, 1/3:I2, inf:D6*}");
        assert!(parse_configuration("1:X3").is_err());
    }
}

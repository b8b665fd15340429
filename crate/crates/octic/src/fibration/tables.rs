//! Two-row fiber tables of Kummer splits and their alignment with reference
//! tables via Möbius maps of the base.

use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Zero};
use serde::Serialize;

use super::{BaseParam, FiberConfiguration, FibrationError, KodairaType};
use crate::arrangement::linalg::Q;

const REFERENCE_TEXT: &str = include_str!("../../data/kummer_tables.txt");

/// One base point with the fiber types of both fibrations. `t` is `None` in
/// tables printed without coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TableColumn {
    pub t: Option<BaseParam>,
    pub first: KodairaType,
    pub second: KodairaType,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FiberTable {
    pub columns: Vec<TableColumn>,
}

impl FiberTable {
    /// Merges two configurations over a common base. Points singular in only
    /// one fibration get an I0 marker in the other row.
    pub fn from_pair(first: &FiberConfiguration, second: &FiberConfiguration) -> Self {
        let mut pts: Vec<BaseParam> = first.params();
        for t in second.params() {
            if !pts.contains(&t) {
                pts.push(t);
            }
        }
        pts.sort();
        let columns = pts
            .into_iter()
            .map(|t| TableColumn {
                first: first.get(&t).unwrap_or(KodairaType::I0),
                second: second.get(&t).unwrap_or(KodairaType::I0),
                t: Some(t),
            })
            .filter(|c| !(c.first.is_smooth() && c.second.is_smooth()))
            .collect();
        FiberTable { columns }
    }

    pub fn has_coordinates(&self) -> bool {
        self.columns.iter().all(|c| c.t.is_some())
    }

    /// The given row as a configuration, I0 markers included.
    pub fn row(&self, second: bool) -> FiberConfiguration {
        FiberConfiguration::new(
            self.columns.iter().filter_map(|c| Some((c.t.clone()?, if second { c.second } else { c.first }))).collect(),
        )
    }

    pub fn swapped(&self) -> Self {
        let columns =
            self.columns.iter().map(|c| TableColumn { t: c.t.clone(), first: c.second, second: c.first }).collect();
        FiberTable { columns }
    }

    fn pair_multiset(&self) -> Vec<(KodairaType, KodairaType)> {
        let mut v: Vec<_> = self.columns.iter().map(|c| (c.first, c.second)).collect();
        v.sort();
        v
    }
}

impl fmt::Display for FiberTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: Vec<String> =
            self.columns.iter().map(|c| c.t.as_ref().map_or("?".to_string(), |t| t.to_string())).collect();
        let r1: Vec<String> = self.columns.iter().map(|c| c.first.to_string()).collect();
        let r2: Vec<String> = self.columns.iter().map(|c| c.second.to_string()).collect();
        let w: Vec<usize> = (0..head.len()).map(|i| head[i].len().max(r1[i].len()).max(r2[i].len())).collect();
        let line = |cells: &[String]| -> String {
            cells.iter().zip(&w).map(|(s, w)| format!("{s:>w$}")).collect::<Vec<_>>().join("  ")
        };
        writeln!(f, "t   {}", line(&head))?;
        writeln!(f, "F1  {}", line(&r1))?;
        write!(f, "F2  {}", line(&r2))
    }
}

/// t ↦ (a·t + b)/(c·t + d).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mobius {
    pub a: Q,
    pub b: Q,
    pub c: Q,
    pub d: Q,
}

impl Mobius {
    pub fn identity() -> Self {
        Mobius { a: Q::one(), b: Q::zero(), c: Q::zero(), d: Q::one() }
    }

    pub fn apply(&self, t: &BaseParam) -> BaseParam {
        let (x, y) = t.hom();
        BaseParam::from_hom(&self.a * &x + &self.b * &y, &self.c * &x + &self.d * &y)
    }

    /// The unique map sending three distinct points to three distinct points.
    pub fn from_three(src: [&BaseParam; 3], dst: [&BaseParam; 3]) -> Option<Self> {
        let s = std_frame(src)?;
        let d = std_frame(dst)?;
        let det = &s[0][0] * &s[1][1] - &s[0][1] * &s[1][0];
        let inv = [[&s[1][1] / &det, -&s[0][1] / &det], [-&s[1][0] / &det, &s[0][0] / &det]];
        let m = |i: usize, j: usize| &d[i][0] * &inv[0][j] + &d[i][1] * &inv[1][j];
        Some(Mobius { a: m(0, 0), b: m(0, 1), c: m(1, 0), d: m(1, 1) })
    }
}

impl Serialize for Mobius {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl fmt::Display for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t -> ({}*t + {})/({}*t + {})", self.a, self.b, self.c, self.d)
    }
}

/// Matrix sending (1:0), (0:1), (1:1) to the three given points.
fn std_frame(pts: [&BaseParam; 3]) -> Option<[[Q; 2]; 2]> {
    let (a0, a1) = pts[0].hom();
    let (b0, b1) = pts[1].hom();
    let (c0, c1) = pts[2].hom();
    let det = &a0 * &b1 - &b0 * &a1;
    if det.is_zero() {
        return None;
    }
    let l0 = (&c0 * &b1 - &b0 * &c1) / &det;
    let l1 = (&a0 * &c1 - &c0 * &a1) / &det;
    if l0.is_zero() || l1.is_zero() {
        return None;
    }
    Some([[&a0 * &l0, &b0 * &l1], [&a1 * &l0, &b1 * &l1]])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableAlignment {
    /// Map from computed to reference coordinates (absent for tables without coordinates).
    pub mobius: Option<Mobius>,
    /// Whether the two fibrations were exchanged.
    pub swapped: bool,
    /// The computed table in reference coordinates.
    pub table: FiberTable,
}

/// Finds a row swap and a Möbius map carrying the computed table onto the
/// reference verbatim. Coordinate-free references are compared as multisets
/// of column pairs.
pub fn align_tables(computed: &FiberTable, reference: &FiberTable) -> Option<TableAlignment> {
    if computed.columns.len() != reference.columns.len() {
        return None;
    }
    for swapped in [false, true] {
        let c = if swapped { computed.swapped() } else { computed.clone() };
        if !reference.has_coordinates() {
            if c.pair_multiset() == reference.pair_multiset() {
                let mut table = c.clone();
                for col in &mut table.columns {
                    col.t = None;
                }
                return Some(TableAlignment { mobius: None, swapped, table });
            }
            continue;
        }
        if c.columns.len() < 3 {
            if c.pair_multiset() == reference.pair_multiset() {
                return Some(TableAlignment { mobius: None, swapped, table: c });
            }
            continue;
        }
        let src: Vec<&BaseParam> = c.columns.iter().take(3).filter_map(|x| x.t.as_ref()).collect();
        let dst_all: Vec<&BaseParam> = reference.columns.iter().filter_map(|x| x.t.as_ref()).collect();
        for i in 0..dst_all.len() {
            for j in 0..dst_all.len() {
                for k in 0..dst_all.len() {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    let Some(m) = Mobius::from_three([src[0], src[1], src[2]], [dst_all[i], dst_all[j], dst_all[k]])
                    else {
                        continue;
                    };
                    let mut moved: Vec<TableColumn> = c
                        .columns
                        .iter()
                        .map(|col| TableColumn {
                            t: col.t.as_ref().map(|t| m.apply(t)),
                            first: col.first,
                            second: col.second,
                        })
                        .collect();
                    moved.sort();
                    if moved == reference.columns {
                        return Some(TableAlignment { mobius: Some(m), swapped, table: FiberTable { columns: moved } });
                    }
                }
            }
        }
    }
    None
}

/// A printed fiber table for a family of arrangements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReferenceTable {
    pub family: String,
    pub table: FiberTable,
}

/// Shipped reference tables.
pub fn reference_tables() -> &'static [ReferenceTable] {
    static TABLES: OnceLock<Vec<ReferenceTable>> = OnceLock::new();
    TABLES.get_or_init(|| parse_reference_tables(REFERENCE_TEXT).expect("shipped tables parse"))
}

/// Parses `family | t:type ... | t:type ...`, with `?` for a missing coordinate.
pub fn parse_reference_tables(text: &str) -> Result<Vec<ReferenceTable>, FibrationError> {
    let mut out = Vec::new();
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('|').map(str::trim).collect();
        let [family, r1, r2] = cols[..] else {
            return Err(FibrationError::Parse(format!("expected 3 columns in `{line}`")));
        };
        let row = |s: &str| -> Result<Vec<(Option<BaseParam>, KodairaType)>, FibrationError> {
            s.split_whitespace()
                .map(|tok| {
                    let (t, k) =
                        tok.rsplit_once(':').ok_or_else(|| FibrationError::Parse(format!("bad entry `{tok}`")))?;
                    let t = if t == "?" { None } else { Some(t.parse()?) };
                    Ok((t, k.parse()?))
                })
                .collect()
        };
        let (a, b) = (row(r1)?, row(r2)?);
        if a.len() != b.len() || a.iter().zip(&b).any(|(x, y)| x.0 != y.0) {
            return Err(FibrationError::Parse(format!("rows of `{family}` do not share base points")));
        }
        let mut columns: Vec<TableColumn> =
            a.into_iter().zip(b).map(|((t, first), (_, second))| TableColumn { t, first, second }).collect();
        columns.sort();
        out.push(ReferenceTable { family: family.to_string(), table: FiberTable { columns } });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::linalg::{q, qr};
    use crate::fibration::parse_configuration;

    #[test]
    fn mobius_from_three_points() {
        let src = [BaseParam::int(0), BaseParam::int(1), BaseParam::Infinity];
        let dst = [BaseParam::int(-1), BaseParam::int(0), BaseParam::int(1)];
        let m = Mobius::from_three([&src[0], &src[1], &src[2]], [&dst[0], &dst[1], &dst[2]]).unwrap();
        for (s, d) in src.iter().zip(&dst) {
            assert_eq!(m.apply(s), *d);
        }
        assert_eq!(m.apply(&BaseParam::int(-1)), BaseParam::Infinity);
        assert_eq!(m.apply(&BaseParam::Finite(qr(1, 2))), BaseParam::Finite(qr(-1, 3)));
        assert_eq!(Mobius::identity().apply(&BaseParam::Finite(q(7))), BaseParam::Finite(q(7)));
    }

    #[test]
    fn shipped_tables_parse() {
        let t = reference_tables();
        assert_eq!(t.len(), 20);
        assert!(t.iter().all(|r| r.table.row(false).euler_sum() == 12 || !r.table.has_coordinates()));
        assert!(t.iter().filter(|r| r.table.has_coordinates()).all(|r| r.table.row(true).euler_sum() == 12));
    }

    #[test]
    fn alignment_recovers_coordinates() {
        let a = parse_configuration("0:I2 1:I4 2:I2 inf:I4").unwrap();
        let b = parse_configuration("0:I2 1:I2 inf:D6*").unwrap();
        let computed = FiberTable::from_pair(&a, &b);
        let m = Mobius { a: q(1), b: q(-1), c: q(0), d: q(1) };
        let moved: Vec<TableColumn> = computed
            .columns
            .iter()
            .map(|c| TableColumn { t: c.t.as_ref().map(|t| m.apply(t)), first: c.second, second: c.first })
            .collect();
        let mut reference = FiberTable { columns: moved };
        reference.columns.sort();
        let al = align_tables(&computed, &reference).unwrap();
        assert!(al.swapped);
        assert_eq!(al.table, reference);
    }

    #[test]
    fn coordinate_free_alignment() {
        let a = parse_configuration("0:I2 1:I2 2:I4 inf:I4").unwrap();
        let b = parse_configuration("0:I2 1:D6* 3:I2").unwrap();
        let computed = FiberTable::from_pair(&a, &b);
        let reference = reference_tables().iter().find(|r| r.family == "19").unwrap();
        assert!(align_tables(&computed, &reference.table).is_none());
        let b2 = parse_configuration("0:I0 1:D6* 2:I2 inf:I2").unwrap();
        let al = align_tables(&FiberTable::from_pair(&a, &b2), &reference.table);
        assert!(al.is_some());
    }
}

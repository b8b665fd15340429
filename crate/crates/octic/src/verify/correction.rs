//! Point-count effect of the crepant resolution of the double octic.
//!
//! Blow-ups run in the order fivefold points, fourfold points off triple
//! lines, triple lines, double lines. Let C = #double lines + 3·#triple lines
//! + #fourfold points on triple lines + Σ_{fivefold} (5 + k), with k the
//! number of triple lines through the point. Then
//!
//! #X(F_p) − #Y(F_p) = (C + #triple lines + #fivefold)(p² + p)
//!                    + #fourfold off triple lines·(p² + 2p)
//!                    + Σ_x (χ_p(c_x) − 1)·p,
//!
//! where c_x is the constant of the branch curve on the exceptional plane
//! over a fourfold point x off the triple lines. At p = 1 with trivial
//! characters this gives e(X) = 2·e(P³) − e(D) + correction(1) = 2(h¹¹ − h¹²).

use serde::Serialize;

use super::VerifyError;
use crate::arrangement::linalg::{q, solve_q, squarefree_part, Q};
use crate::arrangement::{branch_euler_number, cy_admissible, singularity_inventory, PlaneArrangement};
use crate::finite_fields::Tower;
use num_traits::{One, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrectionMode {
    Derived,
    Calibrated,
}

impl std::fmt::Display for CorrectionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CorrectionMode::Derived => "derived",
            CorrectionMode::Calibrated => "calibrated",
        })
    }
}

impl std::str::FromStr for CorrectionMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "derived" => Ok(CorrectionMode::Derived),
            "calibrated" => Ok(CorrectionMode::Calibrated),
            _ => Err(format!("unknown correction mode `{s}`")),
        }
    }
}

/// correction(p) = α·p² + β·p + γ + Σ_x (χ_p(d_x) − 1)·p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorrectionPolynomial {
    pub alpha: i64,
    pub beta: i64,
    pub gamma: i64,
    /// Squarefree classes d_x of the fourfold-point constants.
    pub twists: Vec<i64>,
    pub mode: CorrectionMode,
    /// Primes consumed by the fit in calibrated mode.
    pub fit_primes: Vec<u64>,
}

impl CorrectionPolynomial {
    pub fn eval(&self, t: &Tower) -> i128 {
        let p = t.p() as i128;
        let poly = self.alpha as i128 * p * p + self.beta as i128 * p + self.gamma as i128;
        poly + self.twist_terms(t)
    }

    pub fn twist_terms(&self, t: &Tower) -> i128 {
        let p = t.p() as i128;
        self.twists.iter().map(|&d| (t.legendre(d) as i128 - 1) * p).sum()
    }

    /// Value at p = 1 with trivial characters.
    pub fn at_one(&self) -> i64 {
        self.alpha + self.beta + self.gamma
    }
}

/// Constants c_x = −g·αβγ for fourfold points off triple lines, where the
/// fourth plane is ℓ₄ = αℓ₁ + βℓ₂ + γℓ₃ and g is the product of the other
/// planes (with the leading scalar) at the point.
pub fn fourfold_constants(arr: &PlaneArrangement) -> Vec<Q> {
    let inv = singularity_inventory(arr);
    let forms = arr.form_matrix();
    let mut out = Vec::new();
    for mp in inv.fourfold_points.iter().filter(|m| m.off_triple_line()) {
        let s = &mp.planes;
        let mut g = arr.scalar.clone();
        for (i, f) in forms.iter().enumerate() {
            if !s.contains(&i) {
                g *= q(f.iter().zip(mp.point.iter()).map(|(a, b)| a * b).sum());
            }
        }
        // Pick three coordinates where ℓ₁, ℓ₂, ℓ₃ are independent.
        let mut sol = None;
        for skip in 0..4 {
            let cols: Vec<usize> = (0..4).filter(|&c| c != skip).collect();
            let a: [[Q; 3]; 3] = std::array::from_fn(|r| std::array::from_fn(|k| q(forms[s[k]][cols[r]])));
            let b: [Q; 3] = std::array::from_fn(|r| q(forms[s[3]][cols[r]]));
            if let Some(x) = solve_q(a, b) {
                sol = Some(x);
                break;
            }
        }
        let [a, b, c] = sol.expect("three planes through a fourfold point are independent");
        out.push(-(g * a * b * c));
    }
    out
}

fn check_admissible(arr: &PlaneArrangement) -> Result<crate::arrangement::SingularityInventory, VerifyError> {
    let inv = singularity_inventory(arr);
    if !cy_admissible(&inv) {
        return Err(VerifyError::NotAdmissible(arr.id.clone()));
    }
    Ok(inv)
}

/// The correction assembled from the singularity inventory.
pub fn resolution_correction(arr: &PlaneArrangement) -> Result<CorrectionPolynomial, VerifyError> {
    let inv = check_admissible(arr)?;
    let c = inv.counts();
    let (n5, n40, n41, nt, dl) = (
        c.fivefold_points as i64,
        c.fourfold_off_triple_line as i64,
        c.fourfold_on_triple_line as i64,
        c.triple_lines as i64,
        c.double_lines as i64,
    );
    let through_fivefold: i64 = inv.fivefold_points.iter().map(|m| 5 + m.triple_lines as i64).sum();
    let curves = dl + 3 * nt + n41 + through_fivefold;
    let alpha = n5 + n40 + nt + curves;
    let beta = n5 + 2 * n40 + nt + curves;
    let twists = fourfold_constants(arr).iter().map(squarefree_part).collect();
    Ok(CorrectionPolynomial { alpha, beta, gamma: 0, twists, mode: CorrectionMode::Derived, fit_primes: Vec::new() })
}

/// e(X) from the derived correction.
pub fn euler_number(arr: &PlaneArrangement) -> Result<i64, VerifyError> {
    let corr = resolution_correction(arr)?;
    Ok(8 - branch_euler_number(arr) + corr.at_one())
}

/// Fits α, β, γ so that correction(p) equals `target(p)` at three primes.
/// The twist terms are kept from the derived correction and subtracted first.
pub fn calibrate_from(
    arr: &PlaneArrangement,
    fit_primes: &[u64],
    target: impl Fn(u64) -> Result<i128, VerifyError>,
) -> Result<CorrectionPolynomial, VerifyError> {
    let mut ps = fit_primes.to_vec();
    ps.sort_unstable();
    ps.dedup();
    if fit_primes.len() != 3 || ps.len() != 3 {
        return Err(VerifyError::FitPrimes(format!("need three distinct primes, got {fit_primes:?}")));
    }
    let derived = resolution_correction(arr)?;
    let mut rows: [[Q; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| Q::zero()));
    let mut rhs: [Q; 3] = std::array::from_fn(|_| Q::zero());
    for (k, &p) in fit_primes.iter().enumerate() {
        let t = Tower::new(p).map_err(|_| VerifyError::BadPrime(p))?;
        let v = target(p)? - derived.twist_terms(&t);
        let pq = q(p as i64);
        rows[k] = [&pq * &pq, pq.clone(), Q::one()];
        rhs[k] = Q::from_integer(v.into());
    }
    let sol = solve_q(rows, rhs).ok_or_else(|| VerifyError::FitPrimes("singular fit system".into()))?;
    let int = |x: &Q| -> Result<i64, VerifyError> {
        if !x.is_integer() {
            return Err(VerifyError::NonIntegralFit(x.to_string()));
        }
        x.to_integer().try_into().map_err(|_| VerifyError::NonIntegralFit(x.to_string()))
    };
    Ok(CorrectionPolynomial {
        alpha: int(&sol[0])?,
        beta: int(&sol[1])?,
        gamma: int(&sol[2])?,
        twists: derived.twists,
        mode: CorrectionMode::Calibrated,
        fit_primes: fit_primes.to_vec(),
    })
}

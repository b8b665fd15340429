//! Parsing of octic equations written as products of linear factors.

use num_traits::{One, Zero};

use super::linalg::{q, Q};
use super::{catalog, ArrangementError, PlaneArrangement};

/// Resolves a catalog id (`53`, `X_53`, `X_4` for the first row of a
/// family), a Kummer octic `D(λ,μ)`, or an equation text.
pub fn parse_arrangement(source: &str) -> Result<PlaneArrangement, ArrangementError> {
    let s = source.trim();
    if let Some(entry) = catalog::lookup(s) {
        return Ok(entry);
    }
    if let Some(inner) = s.strip_prefix("D(").and_then(|r| r.strip_suffix(')')) {
        let mut it = inner.split(',');
        let (Some(l), Some(m), None) = (it.next(), it.next(), it.next()) else {
            return Err(ArrangementError::Parse(format!("expected D(lambda,mu), got `{s}`")));
        };
        return PlaneArrangement::kummer(&parse_rational(l.trim())?, &parse_rational(m.trim())?);
    }
    let looks_like_equation = s.contains('(') || s.chars().all(|c| "xyzt".contains(c));
    if looks_like_equation {
        return parse_equation(s);
    }
    Err(ArrangementError::UnknownId(s.to_string()))
}

/// Parses `u^2 = c·xyzt(x+y)...`, with or without the `u^2 =` and `= 0` parts.
pub fn parse_equation(text: &str) -> Result<PlaneArrangement, ArrangementError> {
    let mut s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    for pre in ["u^2=", "u²=", "w^2=", "w²="] {
        if let Some(rest) = s.strip_prefix(pre) {
            s = rest.to_string();
        }
    }
    if let Some(rest) = s.strip_suffix("=0") {
        s = rest.to_string();
    }
    let (constant, factors) = parse_product(&s)?;
    PlaneArrangement::new("custom", &factors, constant)
}

/// Parses a product into a constant and a list of linear factors.
pub(crate) fn parse_product(s: &str) -> Result<(Q, Vec<[Q; 4]>), ArrangementError> {
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut constant = Q::one();
    let mut factors = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        match c {
            '*' | '·' => i += 1,
            'x' | 'y' | 'z' | 't' => {
                factors.push(unit(var_index(c)));
                i += 1;
            }
            '(' => {
                let close = matching_paren(&chars, i)?;
                let inner: String = chars[i + 1..close].iter().collect();
                i = close + 1;
                if chars.get(i) == Some(&'^') {
                    return Err(ArrangementError::Nonlinear(format!("({inner})^...")));
                }
                match parse_linear_or_constant(&inner)? {
                    Term::Linear(f) => factors.push(f),
                    Term::Constant(k) => constant *= k,
                }
            }
            '^' => return Err(ArrangementError::Nonlinear(s.to_string())),
            _ if c.is_ascii_digit() || c == '-' || c == '+' => {
                let start = i;
                i += 1;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '/') {
                    i += 1;
                }
                let tok: String = chars[start..i].iter().collect();
                let k = match tok.as_str() {
                    "-" => -Q::one(),
                    "+" => Q::one(),
                    t => parse_rational(t)?,
                };
                constant *= k;
            }
            _ => return Err(ArrangementError::Parse(format!("unexpected `{c}` in `{s}`"))),
        }
    }
    Ok((constant, factors))
}

/// Parses a single homogeneous linear form such as `2x-y+1/2t`.
pub fn parse_linear_form(s: &str) -> Result<[Q; 4], ArrangementError> {
    match parse_linear_or_constant(s)? {
        Term::Linear(f) => Ok(f),
        Term::Constant(_) => Err(ArrangementError::Parse(format!("`{s}` is a constant"))),
    }
}

enum Term {
    Linear([Q; 4]),
    Constant(Q),
}

fn parse_linear_or_constant(s: &str) -> Result<Term, ArrangementError> {
    let s: String = s.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
    if s.is_empty() {
        return Err(ArrangementError::Parse("empty factor".into()));
    }
    let chars: Vec<char> = s.chars().collect();
    let mut coeffs: [Q; 4] = std::array::from_fn(|_| Q::zero());
    let mut constant = Q::zero();
    let mut saw_var = false;
    let mut i = 0;
    while i < chars.len() {
        let mut sign = Q::one();
        while i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
            if chars[i] == '-' {
                sign = -sign;
            }
            i += 1;
        }
        let start = i;
        while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '/') {
            i += 1;
        }
        let num: String = chars[start..i].iter().collect();
        let k = if num.is_empty() { Q::one() } else { parse_rational(&num)? };
        match chars.get(i) {
            Some(&v @ ('x' | 'y' | 'z' | 't')) => {
                if chars.get(i + 1) == Some(&'^') {
                    return Err(ArrangementError::Nonlinear(s.clone()));
                }
                coeffs[var_index(v)] += sign * k;
                saw_var = true;
                i += 1;
            }
            None | Some('+') | Some('-') => {
                if num.is_empty() {
                    return Err(ArrangementError::Parse(format!("dangling sign in `{s}`")));
                }
                constant += sign * k;
            }
            Some(&c) => return Err(ArrangementError::Parse(format!("unexpected `{c}` in `{s}`"))),
        }
    }
    if !saw_var {
        return Ok(Term::Constant(constant));
    }
    if !constant.is_zero() {
        return Err(ArrangementError::Parse(format!("inhomogeneous factor `{s}`")));
    }
    if coeffs.iter().all(|c| c.is_zero()) {
        return Err(ArrangementError::ZeroForm);
    }
    Ok(Term::Linear(coeffs))
}

pub(crate) fn parse_rational(s: &str) -> Result<Q, ArrangementError> {
    let bad = || ArrangementError::Parse(format!("bad rational `{s}`"));
    let (neg, body) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let v = match body.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.parse().map_err(|_| bad())?;
            let d: i64 = d.parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Q::new(n.into(), d.into())
        }
        None => q(body.parse().map_err(|_| bad())?),
    };
    Ok(if neg { -v } else { v })
}

fn matching_paren(chars: &[char], open: usize) -> Result<usize, ArrangementError> {
    let mut depth = 0;
    for (k, &c) in chars.iter().enumerate().skip(open) {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Ok(k);
                }
            }
            _ => {}
        }
    }
    Err(ArrangementError::Parse("unbalanced parentheses".into()))
}

fn var_index(c: char) -> usize {
    match c {
        'x' => 0,
        'y' => 1,
        'z' => 2,
        _ => 3,
    }
}

fn unit(i: usize) -> [Q; 4] {
    std::array::from_fn(|j| if i == j { Q::one() } else { Q::zero() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::linalg::qr;

    #[test]
    fn parses_printed_equation() {
        let arr = parse_equation("xyzt(x+y)(y+z)(z+t)(t+x)=0").unwrap();
        assert_eq!(arr.forms.len(), 8);
        assert_eq!(arr.forms[7].0, [1, 0, 0, 1]);
        assert_eq!(arr.scalar, q(1));
    }

    #[test]
    fn constants_fold_into_scalar() {
        let arr = parse_equation("u^2 = 2xyzt(x+y)(y+z)(2x+y+z-2t)(-2x-2y-z+2t)").unwrap();
        assert_eq!(arr.scalar, q(-2));
        let arr = parse_equation("-xyzt(1/2x+y)(y+z)(x-z)(z-t)").unwrap();
        assert_eq!(arr.scalar, qr(-1, 2));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(parse_equation("xyzt(x+y)(y+z)(z+t)").unwrap_err(), ArrangementError::FormCount(7));
        assert!(matches!(parse_equation("xyzt(x+y)(y+z)(z+t)(x^2+t)"), Err(ArrangementError::Nonlinear(_))));
        assert!(matches!(parse_equation("xyzt(x+y)(y+z)(z+t)(2x+2y)"), Err(ArrangementError::Proportional(4, 7))));
        assert!(matches!(parse_equation("xyzt(x+1)(y+z)(z+t)(x+t)"), Err(ArrangementError::Parse(_))));
    }

    #[test]
    fn linear_forms() {
        assert_eq!(parse_linear_form("x-3y+1/2t").unwrap(), [q(1), q(-3), q(0), qr(1, 2)]);
        assert!(parse_linear_form("3").is_err());
    }
}

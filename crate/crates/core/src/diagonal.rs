//! Rational functions G/H whose main diagonal is the walk-count generating
//! function, and exact extraction of their diagonal coefficients.
//!
//! Variables are z_1..z_d followed by t (index d).

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::enumerate::{count_walks, ArithmeticMode};
use crate::error::{Error, Result};
use crate::exact::rat;
use crate::laurent::{default_names, LaurentPoly};
use crate::model::{classify, decompose_along, AxisDecomposition, ModelClass, WalkModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum RepKind {
    /// G = prod(1+z_j), H = 1 - t z_1..z_d S(z).
    HighlySymmetric,
    /// G = prod_{j<d}(1+z_j) (1 - t z_1..z_d (Q + 2 z_d A)) and factors
    /// 1 - z_d, 1 - t z_1..z_d S̄(z), 1 - t z_1..z_d (Q + z_d A).
    MostlySymmetric,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalRep {
    pub kind: RepKind,
    /// d; the polynomials below have d + 1 variables.
    pub dimension: usize,
    pub numerator: LaurentPoly,
    pub denominator_factors: Vec<LaurentPoly>,
}

/// Caps the number of stored monomials per intermediate polynomial.
pub const DEFAULT_MAX_TERMS: u64 = 4_000_000;

pub const DEFAULT_VERIFY_DEPTH: usize = 15;

pub fn build_rep(model: &WalkModel) -> Result<DiagonalRep> {
    let c = classify(model);
    match c.class {
        ModelClass::HighlySymmetric => Ok(highly_symmetric_rep(&c.canonical)),
        ModelClass::MostlySymmetric { .. } => {
            let d = model.dimension();
            Ok(mostly_symmetric_rep(&decompose_along(&c.canonical, d - 1)?))
        }
        ModelClass::Unsupported(reason) => Err(Error::UnsupportedClass(reason)),
    }
}

/// The mostly symmetric form with `axis` as the distinguished coordinate.
/// Also valid for highly symmetric models with any axis.
pub fn build_mostly_symmetric_rep(model: &WalkModel, axis: usize) -> Result<DiagonalRep> {
    Ok(mostly_symmetric_rep(&decompose_along(model, axis)?))
}

fn ones(d: usize) -> Vec<i32> {
    vec![1; d]
}

/// z_1..z_d * p(z), with t attached to the power `t_power`.
fn lift(p: &LaurentPoly, t_power: i32) -> LaurentPoly {
    let d = p.vars();
    p.shift(&ones(d)).insert_var(d, t_power)
}

fn one_minus(p: &LaurentPoly) -> LaurentPoly {
    &LaurentPoly::one(p.vars()) - p
}

/// prod_{j in axes} (1 + z_j) in `vars` variables.
fn product_of_one_plus(vars: usize, axes: std::ops::Range<usize>) -> LaurentPoly {
    axes.fold(LaurentPoly::one(vars), |acc, j| {
        &acc * &(&LaurentPoly::one(vars) + &LaurentPoly::variable(vars, j))
    })
}

fn highly_symmetric_rep(model: &WalkModel) -> DiagonalRep {
    let d = model.dimension();
    DiagonalRep {
        kind: RepKind::HighlySymmetric,
        dimension: d,
        numerator: product_of_one_plus(d + 1, 0..d),
        denominator_factors: vec![one_minus(&lift(&model.char_poly(), 1))],
    }
}

fn mostly_symmetric_rep(dec: &AxisDecomposition) -> DiagonalRep {
    let d = dec.model.dimension();
    let last = d - 1;
    let q = dec.q.insert_var(last, 0);
    let a_up = dec.a.insert_var(last, 1);
    let q_plus_2a = &q + &a_up.scale(&rat(2));
    let q_plus_a = &q + &a_up;
    let numerator = &product_of_one_plus(d + 1, 0..last) * &one_minus(&lift(&q_plus_2a, 1));
    let h1 = one_minus(&LaurentPoly::variable(d + 1, last));
    let h2 = one_minus(&lift(&dec.s_bar(), 1));
    let h3 = one_minus(&lift(&q_plus_a, 1));
    DiagonalRep {
        kind: RepKind::MostlySymmetric,
        dimension: d,
        numerator,
        denominator_factors: vec![h1, h2, h3],
    }
}

impl DiagonalRep {
    pub fn variable_names(&self) -> Vec<String> {
        let mut names = default_names(self.dimension);
        names.push("t".into());
        names
    }

    fn polys_text(&self) -> (String, Vec<String>) {
        let names = self.variable_names();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        (
            self.numerator.to_canonical_string(&refs),
            self.denominator_factors.iter().map(|h| h.to_canonical_string(&refs)).collect(),
        )
    }

    /// One `name = polynomial` line for G and for each factor.
    pub fn to_text(&self) -> String {
        let (g, hs) = self.polys_text();
        let mut out = format!("G = {g}\n");
        if hs.len() == 1 {
            out.push_str(&format!("H = {}\n", hs[0]));
        } else {
            for (i, h) in hs.iter().enumerate() {
                out.push_str(&format!("H{} = {h}\n", i + 1));
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (g, hs) = self.polys_text();
        serde_json::json!({
            "kind": self.kind,
            "variables": self.variable_names(),
            "numerator": g,
            "denominatorFactors": hs,
        })
    }

    fn validate(&self) -> Result<()> {
        let vars = self.dimension + 1;
        let bad = |msg: String| Err(Error::InvalidRepresentation(msg));
        if !self.numerator.is_polynomial() || self.numerator.vars() != vars {
            return bad("numerator must be a polynomial in z_1..z_d, t".into());
        }
        for (i, h) in self.denominator_factors.iter().enumerate() {
            if h.vars() != vars || !h.is_polynomial() {
                return bad(format!("factor {} must be a polynomial in z_1..z_d, t", i + 1));
            }
            if !h.constant_term().is_one() {
                return bad(format!("factor {} does not have constant term 1", i + 1));
            }
            let p = one_minus(h);
            let (lo, hi) = (p.min_degree(self.dimension), p.max_degree(self.dimension));
            if !p.is_zero() && (lo != hi || hi > 1) {
                return bad(format!("factor {} must be 1 - P or 1 - t*P with P free of t", i + 1));
            }
        }
        Ok(())
    }
}

/// [z_1^n..z_d^n t^n] G/H for n = 0..=max_n.
pub fn diagonal_coeffs(rep: &DiagonalRep, max_n: usize) -> Result<Vec<BigRational>> {
    diagonal_coeffs_with(rep, max_n, 0, DEFAULT_MAX_TERMS)
}

/// As [`diagonal_coeffs`], with the truncation degree raised by `slack` and
/// an explicit cap on intermediate polynomial size.
///
/// Every exponent is non-negative, so a monomial whose degree in some z_k
/// exceeds n can never reach the diagonal term n; truncating at `max_n` is
/// exact.
pub fn diagonal_coeffs_with(
    rep: &DiagonalRep,
    max_n: usize,
    slack: usize,
    max_terms: u64,
) -> Result<Vec<BigRational>> {
    rep.validate()?;
    let d = rep.dimension;
    let cap = (max_n + slack) as i32;
    let side = cap as u64 + 1;
    if side.checked_pow(d as u32).map_or(true, |c| c > max_terms) {
        return Err(Error::ResourceLimit(format!(
            "diagonal extraction needs up to {side}^{d} monomials, cap is {max_terms}"
        )));
    }

    let mut t_linear = Vec::new();
    let mut series = LaurentPoly::one(d);
    for h in &rep.denominator_factors {
        let p = one_minus(h);
        if p.is_zero() {
            continue;
        }
        if p.max_degree(d) == 1 {
            t_linear.push(p.section(d, 1));
        } else {
            series = series.mul_truncated(&geometric_series(&p.section(d, 0), cap), cap);
        }
    }

    let e = t_powers(&t_linear, max_n, cap);
    let g_parts: Vec<LaurentPoly> =
        (0..=rep.numerator.max_degree(d)).map(|j| rep.numerator.section(d, j)).collect();

    let mut out = Vec::with_capacity(max_n + 1);
    for n in 0..=max_n {
        let mut x = LaurentPoly::zero(d);
        for (j, gj) in g_parts.iter().enumerate().take(n + 1) {
            if !gj.is_zero() {
                x = &x + &gj.mul_truncated(&e[n - j], n as i32);
            }
        }
        // [z^(n..n)] x * series without forming the whole product.
        let mut coeff = BigRational::zero();
        for (ex, cx) in x.terms() {
            let rest: Vec<i32> = ex.iter().map(|&k| n as i32 - k).collect();
            let cs = series.coeff(&rest);
            if !cs.is_zero() {
                coeff += cx * cs;
            }
        }
        out.push(coeff);
    }
    Ok(out)
}

/// sum_k p^k truncated at per-variable degree `cap`; p has no constant term.
fn geometric_series(p: &LaurentPoly, cap: i32) -> LaurentPoly {
    let mut total = LaurentPoly::one(p.vars());
    let mut power = LaurentPoly::one(p.vars());
    loop {
        power = power.mul_truncated(p, cap);
        if power.is_zero() {
            return total;
        }
        total = &total + &power;
    }
}

/// E_m = [t^m] prod_i 1/(1 - t P_i) for m = 0..=max_n, via
/// E^(i)_m = E^(i-1)_m + P_i E^(i)_{m-1}.
fn t_powers(factors: &[LaurentPoly], max_n: usize, cap: i32) -> Vec<LaurentPoly> {
    let vars = factors.first().map_or(0, LaurentPoly::vars);
    let mut out = Vec::with_capacity(max_n + 1);
    if factors.is_empty() {
        return (0..=max_n)
            .map(|m| if m == 0 { LaurentPoly::one(vars.max(1)) } else { LaurentPoly::zero(vars.max(1)) })
            .collect();
    }
    let mut last: Vec<LaurentPoly> = vec![LaurentPoly::one(vars); factors.len()];
    out.push(LaurentPoly::one(vars));
    for _ in 1..=max_n {
        let mut acc = LaurentPoly::zero(vars);
        for (i, p) in factors.iter().enumerate() {
            acc = &acc + &p.mul_truncated(&last[i], cap);
            last[i] = acc.clone();
        }
        out.push(acc);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RepVerification {
    pub agree: bool,
    pub first_mismatch: Option<usize>,
    pub depth: usize,
}

/// Compares the diagonal of `build_rep(model)` with exact enumeration.
pub fn verify_rep(model: &WalkModel, max_n: usize) -> Result<RepVerification> {
    let rep = build_rep(model)?;
    verify_rep_against(&rep, model, max_n)
}

/// Compares an arbitrary representation with exact enumeration of `model`.
pub fn verify_rep_against(rep: &DiagonalRep, model: &WalkModel, max_n: usize) -> Result<RepVerification> {
    let diag = diagonal_coeffs(rep, max_n)?;
    let counts = count_walks(model, max_n, ArithmeticMode::Exact)?;
    let exact = counts.exact_values().expect("exact mode");
    let first_mismatch = (0..=max_n).find(|&n| diag[n] != exact[n]);
    Ok(RepVerification { agree: first_mismatch.is_none(), first_mismatch, depth: max_n })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(vars: usize, terms: &[(i64, &[i32])]) -> LaurentPoly {
        LaurentPoly::from_terms(vars, terms.iter().map(|(c, e)| (e.to_vec(), rat(*c))))
    }

    fn cardinal() -> WalkModel {
        WalkModel::unweighted(2, &[&[0, 1], &[0, -1], &[1, 0], &[-1, 0]]).unwrap()
    }

    fn negdrift() -> WalkModel {
        WalkModel::unweighted(2, &[&[-1, -1], &[1, -1], &[0, 1]]).unwrap()
    }

    fn posdrift() -> WalkModel {
        WalkModel::unweighted(2, &[&[-1, 1], &[1, 1], &[0, -1]]).unwrap()
    }

    fn weighted_zero_drift() -> WalkModel {
        WalkModel::unweighted(2, &[&[0, 1], &[0, 1], &[-1, -1], &[1, -1]]).unwrap()
    }

    #[test]
    fn cardinal_rep_shape() {
        let rep = build_rep(&cardinal()).unwrap();
        assert_eq!(rep.kind, RepKind::HighlySymmetric);
        assert_eq!(rep.numerator, poly(3, &[(1, &[0, 0, 0]), (1, &[1, 0, 0]), (1, &[0, 1, 0]), (1, &[1, 1, 0])]));
        let h = poly(3, &[(1, &[0, 0, 0]), (-1, &[2, 1, 1]), (-1, &[0, 1, 1]), (-1, &[1, 2, 1]), (-1, &[1, 0, 1])]);
        assert_eq!(rep.denominator_factors, vec![h]);
    }

    #[test]
    fn positive_drift_rep_shape() {
        let rep = build_rep(&posdrift()).unwrap();
        let g = &poly(3, &[(1, &[0, 0, 0]), (1, &[1, 0, 0])]) * &poly(3, &[(1, &[0, 0, 0]), (-2, &[1, 2, 1])]);
        assert_eq!(rep.numerator, g);
        assert_eq!(
            rep.denominator_factors,
            vec![
                poly(3, &[(1, &[0, 0, 0]), (-1, &[0, 1, 0])]),
                poly(3, &[(1, &[0, 0, 0]), (-1, &[1, 2, 1]), (-1, &[2, 0, 1]), (-1, &[0, 0, 1])]),
                poly(3, &[(1, &[0, 0, 0]), (-1, &[1, 2, 1])]),
            ]
        );
    }

    #[test]
    fn weighted_zero_drift_rep_shape() {
        let rep = build_rep(&weighted_zero_drift()).unwrap();
        assert_eq!(
            rep.denominator_factors[1],
            poly(3, &[(1, &[0, 0, 0]), (-2, &[1, 0, 1]), (-1, &[2, 2, 1]), (-1, &[0, 2, 1])])
        );
        assert_eq!(rep.denominator_factors[2], poly(3, &[(1, &[0, 0, 0]), (-1, &[2, 2, 1]), (-1, &[0, 2, 1])]));
    }

    #[test]
    fn negative_drift_numerator_uses_y_squared() {
        let rep = build_rep(&negdrift()).unwrap();
        let g = &poly(3, &[(1, &[0, 0, 0]), (1, &[1, 0, 0])])
            * &poly(3, &[(1, &[0, 0, 0]), (-2, &[2, 2, 1]), (-2, &[0, 2, 1])]);
        assert_eq!(rep.numerator, g);
        assert_eq!(rep.to_text().lines().count(), 4);
    }

    #[test]
    fn coefficients_match_enumeration() {
        let c = diagonal_coeffs(&build_rep(&cardinal()).unwrap(), 4).unwrap();
        assert_eq!(c, [1, 2, 6, 18, 60].map(rat).to_vec());
        let w = diagonal_coeffs(&build_rep(&weighted_zero_drift()).unwrap(), 3).unwrap();
        assert_eq!(w, [1, 2, 6, 16].map(rat).to_vec());
        for m in [cardinal(), negdrift(), posdrift(), weighted_zero_drift()] {
            assert!(verify_rep(&m, 12).unwrap().agree);
        }
    }

    #[test]
    fn dropping_a_factor_is_detected() {
        let m = negdrift();
        let mut rep = build_rep(&m).unwrap();
        rep.denominator_factors.remove(0);
        let v = verify_rep_against(&rep, &m, 12).unwrap();
        assert!(!v.agree);
        assert!(v.first_mismatch.unwrap() <= 3);
    }

    #[test]
    fn truncation_slack_changes_nothing() {
        let rep = build_rep(&weighted_zero_drift()).unwrap();
        let a = diagonal_coeffs(&rep, 10).unwrap();
        let b = diagonal_coeffs_with(&rep, 10, 2, DEFAULT_MAX_TERMS).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn both_forms_agree_for_highly_symmetric() {
        let m = cardinal();
        let a = diagonal_coeffs(&build_rep(&m).unwrap(), 10).unwrap();
        for axis in 0..2 {
            let b = diagonal_coeffs(&build_mostly_symmetric_rep(&m, axis).unwrap(), 10).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn invalid_reps_rejected() {
        let mut rep = build_rep(&cardinal()).unwrap();
        rep.denominator_factors[0] = poly(3, &[(2, &[0, 0, 0]), (-1, &[1, 0, 1])]);
        assert!(matches!(diagonal_coeffs(&rep, 3), Err(Error::InvalidRepresentation(_))));
        let rep = build_rep(&cardinal()).unwrap();
        assert!(matches!(diagonal_coeffs_with(&rep, 100, 0, 1000), Err(Error::ResourceLimit(_))));
    }
}

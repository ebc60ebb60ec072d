//! Growth-rate estimation, half-power expansion fits and verification of
//! predictions against counting sequences.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::asymptotics::{AsymptoticPrediction, Theorem};
use crate::enumerate::CountSequence;
use crate::error::{Error, Result};
use crate::exact;

/// Condition numbers of the column-equilibrated design matrix above this
/// flag the fit.
pub const CONDITION_THRESHOLD: f64 = 1e10;

pub const DEFAULT_TERMS: usize = 4;

pub const MIN_WINDOW_START: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FitResult {
    pub base: f64,
    pub order_exponent: f64,
    /// c_0..c_m for r_n = s_n n^α / base^n ≈ Σ c_k n^(-k/2).
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub window: (usize, usize),
    pub points: usize,
    pub residual_rms: f64,
    pub residue_class: usize,
    pub period: usize,
    /// Modulus of the sub-classes fitted separately and averaged.
    pub split_period: usize,
    pub condition_number: f64,
    pub ill_conditioned: bool,
}

/// Smallest window-start default: max(N/4, 8), aligned to the class.
pub fn default_window(max_n: usize) -> (usize, usize) {
    ((max_n / 4).max(MIN_WINDOW_START), max_n)
}

fn check_positive(seq: &CountSequence, n: usize) -> Result<()> {
    if seq.is_positive(n) {
        Ok(())
    } else {
        Err(Error::NonPositiveTerms(n))
    }
}

/// (s_N / s_(N-p))^(1/p) from the exact values, None in float mode.
fn exact_ratio_root(seq: &CountSequence, n: usize, p: usize) -> Option<f64> {
    let q = seq.exact(n)? / seq.exact(n - p)?;
    let v = exact::to_f64(&q);
    Some(if p == 1 { v } else { v.powf(1.0 / p as f64) })
}

/// Base estimate for residue class `residue` mod `period`.
///
/// Two ratios over a stride L ≈ N/4 (a multiple of 4p, so that phases of
/// order dividing 4 cancel) are combined by Richardson elimination of the
/// n^(-α) factor. Exact sequences with constant p-step ratios return that
/// ratio directly.
pub fn estimate_base_for_class(seq: &CountSequence, period: usize, residue: usize) -> Result<f64> {
    let p = period.max(1);
    if seq.len() < 4 * p + 1 {
        return Err(Error::InsufficientData(format!(
            "need at least {} terms for period {p}, have {}",
            4 * p + 1,
            seq.len()
        )));
    }
    let top = seq.max_length();
    let n = top - (top + p - residue % p) % p;
    if n < 4 * p {
        return Err(Error::InsufficientData("too few terms in the residue class".into()));
    }
    let stride = if n >= 16 * p { 4 * p * (n / (16 * p)) } else { p * (n / (2 * p)) };
    for k in [n, n - stride, n - 2 * stride] {
        check_positive(seq, k)?;
    }
    if let (Some(x), Some(y), Some(z)) = (seq.exact(n), seq.exact(n - p), seq.exact(n - 2 * p)) {
        if x * z == y * y {
            return Ok(exact_ratio_root(seq, n, p).expect("exact sequence"));
        }
    }
    let (nf, l) = (n as f64, stride as f64);
    let ln_r1 = (seq.ln_value(n) - seq.ln_value(n - stride)) / l;
    let ln_r2 = (seq.ln_value(n - stride) - seq.ln_value(n - 2 * stride)) / l;
    if n == 2 * stride {
        // s_0 cannot anchor the n^(-α) factor; fall back to the plain ratio.
        return Ok(ln_r1.exp());
    }
    let u1 = (nf / (nf - l)).ln() / l;
    let u2 = ((nf - l) / (nf - 2.0 * l)).ln() / l;
    let alpha = (ln_r1 - ln_r2) / (u2 - u1);
    Ok((ln_r1 + alpha * u1).exp())
}

/// Base estimate at the largest available N.
pub fn estimate_base(seq: &CountSequence, period: usize) -> Result<f64> {
    estimate_base_for_class(seq, period, seq.max_length() % period.max(1))
}

/// Indices n in [lo, hi] with n ≡ residue (mod period).
fn window_points(lo: usize, hi: usize, period: usize, residue: usize) -> Vec<usize> {
    (lo..=hi).filter(|n| n % period == residue % period).collect()
}

fn validate_window(seq: &CountSequence, window: (usize, usize), needed: usize, pts: &[usize]) -> Result<()> {
    let (lo, hi) = window;
    if lo < MIN_WINDOW_START {
        return Err(Error::InvalidWindow(format!("window start {lo} is below {MIN_WINDOW_START}")));
    }
    if lo > hi || hi > seq.max_length() {
        return Err(Error::InvalidWindow(format!(
            "window [{lo}, {hi}] outside sequence range [0, {}]",
            seq.max_length()
        )));
    }
    if pts.len() < needed {
        return Err(Error::InvalidWindow(format!("{} points for {needed} unknowns", pts.len())));
    }
    Ok(())
}

struct LeastSquares {
    coefficients: Vec<f64>,
    standard_errors: Vec<f64>,
    residual_rms: f64,
    condition_number: f64,
}

/// Weighted least squares by SVD of the column-equilibrated system.
/// `sigma` holds the per-point error scale.
fn solve(x: &DMatrix<f64>, y: &DVector<f64>, sigma: &[f64]) -> Result<LeastSquares> {
    let (rows, cols) = x.shape();
    let mut a = x.clone();
    let mut b = y.clone();
    for i in 0..rows {
        let s = sigma[i];
        for j in 0..cols {
            a[(i, j)] /= s;
        }
        b[i] /= s;
    }
    let scales: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    if scales.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::Numerical("degenerate design column".into()));
    }
    for (j, s) in scales.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / s);
    }
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    let condition_number = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let cutoff = smax * f64::EPSILON * rows.max(cols) as f64;
    let mut z = DVector::zeros(cols);
    for k in 0..cols {
        if sv[k] > cutoff {
            z[k] = u.column(k).dot(&b) / sv[k];
        }
    }
    let scaled = vt.transpose() * z;
    let coefficients: Vec<f64> = (0..cols).map(|j| scaled[j] / scales[j]).collect();

    let coef = DVector::from_vec(coefficients.clone());
    let resid_w = &a * &scaled - &b;
    let resid = x * &coef - y;
    let dof = rows.saturating_sub(cols).max(1) as f64;
    let s2 = resid_w.norm_squared() / dof;
    let standard_errors = (0..cols)
        .map(|j| {
            let var: f64 = (0..cols)
                .filter(|&k| sv[k] > cutoff)
                .map(|k| (vt[(k, j)] / sv[k]).powi(2))
                .sum();
            (s2 * var).sqrt() / scales[j]
        })
        .collect();
    Ok(LeastSquares {
        coefficients,
        standard_errors,
        residual_rms: (resid.norm_squared() / rows as f64).sqrt(),
        condition_number,
    })
}

/// Relative error scale of a term: conversion to f64 plus the float-DP
/// rounding bound.
fn relative_sigma(seq: &CountSequence, n: usize) -> f64 {
    f64::EPSILON + seq.rounding_bound(n)
}

/// Least-squares fit of r_n = s_n n^α / base^n on {1, n^(-1/2), .., n^(-m/2)}
/// over the window points in residue class `residue` mod `period`.
pub fn fit_expansion(
    seq: &CountSequence,
    base: f64,
    order: f64,
    terms: usize,
    window: (usize, usize),
    period: usize,
    residue: usize,
) -> Result<FitResult> {
    fit_expansion_split(seq, base, order, terms, window, period, residue, period)
}

/// As [`fit_expansion`], but fits each sub-class mod `split` (a multiple of
/// `period`) separately and averages the coefficients. Lower-order
/// contributions whose phase has order dividing `split` but not `period`
/// are constant on each sub-class and cancel in the average.
#[allow(clippy::too_many_arguments)]
pub fn fit_expansion_split(
    seq: &CountSequence,
    base: f64,
    order: f64,
    terms: usize,
    window: (usize, usize),
    period: usize,
    residue: usize,
    split: usize,
) -> Result<FitResult> {
    let period = period.max(1);
    if split % period != 0 {
        return Err(Error::InvalidWindow(format!("split {split} is not a multiple of period {period}")));
    }
    let residue = residue % period;
    let subs: Vec<usize> = (0..split).filter(|r| r % period == residue).collect();
    let mut coefficients = vec![0.0; terms];
    let mut variances = vec![0.0; terms];
    let (mut points, mut sq_sum, mut condition_number) = (0usize, 0.0, 0.0f64);
    let k = subs.len() as f64;
    for &sub in &subs {
        let ls = fit_points(seq, base, order, terms, window, split, sub)?;
        for j in 0..terms {
            coefficients[j] += ls.0.coefficients[j] / k;
            variances[j] += (ls.0.standard_errors[j] / k).powi(2);
        }
        sq_sum += ls.0.residual_rms.powi(2) * ls.1 as f64;
        points += ls.1;
        condition_number = condition_number.max(ls.0.condition_number);
    }
    Ok(FitResult {
        base,
        order_exponent: order,
        coefficients,
        standard_errors: variances.into_iter().map(f64::sqrt).collect(),
        window,
        points,
        residual_rms: (sq_sum / points as f64).sqrt(),
        residue_class: residue,
        period,
        split_period: split,
        condition_number,
        ill_conditioned: condition_number > CONDITION_THRESHOLD,
    })
}

fn fit_points(
    seq: &CountSequence,
    base: f64,
    order: f64,
    terms: usize,
    window: (usize, usize),
    modulus: usize,
    residue: usize,
) -> Result<(LeastSquares, usize)> {
    let pts = window_points(window.0, window.1, modulus, residue);
    validate_window(seq, window, terms.max(1), &pts)?;
    let ln_base = base.ln();
    let mut r = Vec::with_capacity(pts.len());
    for &n in &pts {
        check_positive(seq, n)?;
        let nf = n as f64;
        r.push((seq.ln_value(n) + order * nf.ln() - nf * ln_base).exp());
    }
    let x = DMatrix::from_fn(pts.len(), terms, |i, k| (pts[i] as f64).powf(-(k as f64) / 2.0));
    let y = DVector::from_vec(r.clone());
    let sigma: Vec<f64> = pts.iter().zip(&r).map(|(&n, v)| relative_sigma(seq, n) * v.abs()).collect();
    Ok((solve(&x, &y, &sigma)?, pts.len()))
}

/// Fits ln(s_n / base^n) = ln C - α ln n + Σ_{k=1..3} a_k n^(-k/2) and
/// returns α.
pub fn estimate_order(seq: &CountSequence, base: f64, window: (usize, usize), period: usize, residue: usize) -> Result<f64> {
    estimate_order_split(seq, base, window, period, residue, period)
}

/// [`estimate_order`] averaged over the sub-classes mod `split`.
pub fn estimate_order_split(
    seq: &CountSequence,
    base: f64,
    window: (usize, usize),
    period: usize,
    residue: usize,
    split: usize,
) -> Result<f64> {
    let period = period.max(1);
    if split % period != 0 {
        return Err(Error::InvalidWindow(format!("split {split} is not a multiple of period {period}")));
    }
    let subs: Vec<usize> = (0..split).filter(|r| r % period == residue % period).collect();
    let mut total = 0.0;
    for &sub in &subs {
        let pts = window_points(window.0, window.1, split, sub);
        validate_window(seq, window, 5, &pts)?;
        let mut y = Vec::with_capacity(pts.len());
        for &n in &pts {
            check_positive(seq, n)?;
            y.push(seq.ln_value(n) - n as f64 * base.ln());
        }
        let x = DMatrix::from_fn(pts.len(), 5, |i, k| {
            let nf = pts[i] as f64;
            match k {
                0 => 1.0,
                1 => -nf.ln(),
                k => nf.powf(-((k - 1) as f64) / 2.0),
            }
        });
        let sigma = vec![1.0; pts.len()];
        total += solve(&x, &DVector::from_vec(y), &sigma)?.coefficients[1];
    }
    Ok(total / subs.len() as f64)
}

/// Successive differences of the p-step log ratios at n = lo..=hi; None
/// where a term vanishes.
fn roughness(seq: &CountSequence, p: usize, lo: usize, hi: usize) -> Vec<Option<f64>> {
    let ratio = |n: usize| {
        (n >= p && seq.is_positive(n) && seq.is_positive(n - p))
            .then(|| (seq.ln_value(n) - seq.ln_value(n - p)) / p as f64)
    };
    (lo.max(p + 1)..=hi).map(|n| Some((ratio(n)? - ratio(n - 1)?).abs())).collect()
}

fn mean(values: &[Option<f64>]) -> Option<f64> {
    let v: Vec<f64> = values.iter().flatten().copied().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Smallest p in 1..=4 for which the p-step log ratios settle: either
/// their successive differences over [N/2, N] stay below 1e-2, or the
/// mean difference over [3N/4, N] is below 0.8 times that over [N/4, N/2]
/// (an oscillation that dies out is lower order, not a period). Zero terms
/// must repeat with period p. Falls back to the smoothest p.
pub fn detect_period(seq: &CountSequence) -> Result<usize> {
    let top = seq.max_length();
    if top < 16 {
        return Err(Error::InsufficientData("need at least 17 terms to detect a period".into()));
    }
    let mut best = (f64::INFINITY, 1);
    for p in 1..=4usize {
        let zero_pattern_ok = (top / 4..=top).all(|n| n < p || seq.is_positive(n) == seq.is_positive(n - p));
        if !zero_pattern_ok {
            continue;
        }
        let tail = roughness(seq, p, top / 2, top);
        if tail.iter().all(Option::is_none) {
            continue;
        }
        let rough = tail.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
        if rough < 1e-2 {
            return Ok(p);
        }
        if let (Some(early), Some(late)) =
            (mean(&roughness(seq, p, top / 4, top / 2)), mean(&roughness(seq, p, 3 * top / 4, top)))
        {
            if late < 0.8 * early {
                return Ok(p);
            }
        }
        if rough < best.0 {
            best = (rough, p);
        }
    }
    Ok(best.1)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Tolerances {
    #[serde(alias = "base_rel")]
    pub base_rel: f64,
    #[serde(alias = "order_abs")]
    pub order_abs: f64,
    #[serde(alias = "c0_rel")]
    pub c0_rel: f64,
    /// Checked only when a second-order prediction is present. For κ = 0 the
    /// fitted |c_1| / |c_0| is compared instead.
    #[serde(alias = "c1_rel", default)]
    pub c1_rel: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { base_rel: 0.005, order_abs: 0.05, c0_rel: 0.01, c1_rel: Some(0.05) }
    }
}

impl Tolerances {
    /// Named profiles: "default", "strict" and "loose".
    pub fn profile(name: &str) -> Option<Self> {
        match name {
            "default" => Some(Self::default()),
            "strict" => Some(Tolerances { base_rel: 1e-3, order_abs: 0.02, c0_rel: 2e-3, c1_rel: Some(0.02) }),
            "loose" => Some(Tolerances { base_rel: 0.01, order_abs: 0.1, c0_rel: 0.03, c1_rel: Some(0.1) }),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassReport {
    pub residue: usize,
    pub predicted_base: f64,
    pub fitted_base: f64,
    pub base_rel_error: f64,
    pub predicted_order: f64,
    pub fitted_order: f64,
    pub order_abs_error: f64,
    pub predicted_c0: f64,
    pub fitted_c0: f64,
    pub c0_rel_error: f64,
    pub predicted_c1: Option<f64>,
    pub fitted_c1: f64,
    pub c1_error: Option<f64>,
    pub fit: FitResult,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub theorem: Theorem,
    pub max_n: usize,
    pub predicted_period: usize,
    pub detected_period: usize,
    pub classes: Vec<ClassReport>,
    pub tolerances: Tolerances,
    pub pass: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:?}  N = {}  period predicted {} / detected {}  verdict {}",
            self.theorem,
            self.max_n,
            self.predicted_period,
            self.detected_period,
            if self.pass { "PASS" } else { "FAIL" }
        );
        let _ = writeln!(
            out,
            "{:>5} {:>10} {:>14} {:>14} {:>10} {:>8}",
            "class", "quantity", "predicted", "fitted", "error", "tol"
        );
        for c in &self.classes {
            let rows = [
                ("base", c.predicted_base, c.fitted_base, c.base_rel_error, self.tolerances.base_rel),
                ("order", c.predicted_order, c.fitted_order, c.order_abs_error, self.tolerances.order_abs),
                ("c0", c.predicted_c0, c.fitted_c0, c.c0_rel_error, self.tolerances.c0_rel),
            ];
            for (name, p, f, e, t) in rows {
                let _ = writeln!(out, "{:>5} {:>10} {:>14.8} {:>14.8} {:>10.2e} {:>8.1e}", c.residue, name, p, f, e, t);
            }
            if let (Some(p), Some(e), Some(t)) = (c.predicted_c1, c.c1_error, self.tolerances.c1_rel) {
                let _ = writeln!(out, "{:>5} {:>10} {:>14.8} {:>14.8} {:>10.2e} {:>8.1e}", c.residue, "c1", p, c.fitted_c1, e, t);
            }
            let _ = writeln!(
                out,
                "{:>5} {:>10} window [{}, {}], {} points, rms {:.2e}, cond {:.2e}{}",
                c.residue,
                "fit",
                c.fit.window.0,
                c.fit.window.1,
                c.fit.points,
                c.fit.residual_rms,
                c.fit.condition_number,
                if c.fit.ill_conditioned { " (ill-conditioned)" } else { "" }
            );
        }
        out
    }
}

/// Fits every residue class of `seq` with the predicted base and order and
/// compares base, order, c_0 and (when predicted) c_1.
pub fn compare(pred: &AsymptoticPrediction, seq: &CountSequence, tol: &Tolerances) -> Result<VerificationReport> {
    compare_with_window(pred, seq, tol, default_window(seq.max_length()))
}

pub fn compare_with_window(
    pred: &AsymptoticPrediction,
    seq: &CountSequence,
    tol: &Tolerances,
    window: (usize, usize),
) -> Result<VerificationReport> {
    let period = pred.period;
    let detected_period = detect_period(seq)?;
    let mut classes = Vec::with_capacity(period);
    for cp in &pred.classes {
        let r = cp.residue;
        let order = exact::to_f64(&cp.order);
        let fitted_base = estimate_base_for_class(seq, period, r)?;
        let fitted_order = estimate_order_split(seq, cp.base, window, period, r, pred.oscillation_period)?;
        let fit = fit_expansion_split(seq, cp.base, order, DEFAULT_TERMS, window, period, r, pred.oscillation_period)?;
        let c0 = fit.coefficients[0];
        let c1 = fit.coefficients.get(1).copied().unwrap_or(0.0);
        let base_rel_error = (fitted_base - cp.base).abs() / cp.base;
        let order_abs_error = (fitted_order - order).abs();
        let c0_rel_error = (c0 - cp.constant).abs() / cp.constant.abs();
        let predicted_c1 = pred.second_order.as_ref().map(|s| s.kappa);
        let c1_error = predicted_c1.map(|k| if k == 0.0 { c1.abs() / c0.abs() } else { (c1 - k).abs() / k.abs() });
        let mut pass = base_rel_error <= tol.base_rel && order_abs_error <= tol.order_abs && c0_rel_error <= tol.c0_rel;
        if let (Some(e), Some(t)) = (c1_error, tol.c1_rel) {
            pass &= e <= t;
        }
        classes.push(ClassReport {
            residue: r,
            predicted_base: cp.base,
            fitted_base,
            base_rel_error,
            predicted_order: order,
            fitted_order,
            order_abs_error,
            predicted_c0: cp.constant,
            fitted_c0: c0,
            c0_rel_error,
            predicted_c1,
            fitted_c1: c1,
            c1_error,
            fit,
            pass,
        });
    }
    let pass = detected_period == period && classes.iter().all(|c| c.pass);
    Ok(VerificationReport {
        theorem: pred.theorem,
        max_n: seq.max_length(),
        predicted_period: period,
        detected_period,
        classes,
        tolerances: *tol,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn synthetic(max_n: usize, f: impl Fn(f64) -> f64, base: f64) -> CountSequence {
        let normalized = (0..=max_n).map(|n| f(n as f64)).collect();
        CountSequence::from_normalized(normalized, base, 0)
    }

    #[test]
    fn geometric_base_is_exact() {
        let vals = (0..=40).map(|n| BigRational::from_integer(num_traits::pow(BigInt::from(3), n))).collect();
        let seq = CountSequence::from_exact(vals);
        assert_eq!(estimate_base(&seq, 1).unwrap(), 3.0);
        assert_eq!(estimate_base(&seq, 2).unwrap(), 3.0);
    }

    #[test]
    fn half_power_data_is_recovered() {
        let seq = synthetic(400, |n| if n == 0.0 { 1.0 } else { 2.0 + 3.0 / n.sqrt() }, 1.0);
        let fit = fit_expansion(&seq, 1.0, 0.0, 4, (100, 400), 1, 0).unwrap();
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-9);
        assert!((fit.coefficients[1] - 3.0).abs() < 1e-8);
        assert!(fit.residual_rms.is_finite());
        assert!(!fit.ill_conditioned);
    }

    #[test]
    fn window_errors() {
        let seq = synthetic(50, |_| 1.0, 2.0);
        assert!(matches!(fit_expansion(&seq, 2.0, 0.0, 4, (4, 50), 1, 0), Err(Error::InvalidWindow(_))));
        assert!(matches!(fit_expansion(&seq, 2.0, 0.0, 4, (10, 60), 1, 0), Err(Error::InvalidWindow(_))));
        let short = synthetic(3, |_| 1.0, 2.0);
        assert!(matches!(estimate_base(&short, 1), Err(Error::InsufficientData(_))));
        let zeros = CountSequence::from_exact(vec![rat(1); 7].into_iter().chain([rat(0)]).collect());
        assert!(matches!(estimate_base(&zeros, 1), Err(Error::NonPositiveTerms(7))));
    }

    #[test]
    fn periods() {
        let smooth = synthetic(100, |n| 1.0 / (n + 1.0), 3.0);
        assert_eq!(detect_period(&smooth).unwrap(), 1);
        let alternating = synthetic(100, |n| (1.0 + 0.2 * if n as usize % 2 == 0 { 1.0 } else { -1.0 }) / (n + 1.0), 3.0);
        assert_eq!(detect_period(&alternating).unwrap(), 2);
        let base = estimate_base(&alternating, 2).unwrap();
        assert!((base - 3.0).abs() < 1e-3);
    }
}

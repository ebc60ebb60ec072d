use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;
use serde_json::json;

use super::gamma::gamma_set;
use crate::enumerate::CountSequence;
use crate::error::{Error, Result};
use crate::exact::{self, ratio};
use crate::model::{classify, decompose, ModelClass, WalkModel};

/// Contour parameters ε = n^(-epsilon_exponent) and δ = n^(-delta_exponent),
/// with a tensor trapezoid rule of `nodes_per_axis` points on each arc.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSpec {
    /// None selects max(201, ⌈20√n⌉).
    pub nodes_per_axis: Option<usize>,
    pub epsilon_exponent: BigRational,
    pub delta_exponent: BigRational,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { nodes_per_axis: None, epsilon_exponent: ratio(7, 10), delta_exponent: ratio(2, 5) }
    }
}

impl QuadratureSpec {
    pub fn with_nodes(nodes: usize) -> Self {
        QuadratureSpec { nodes_per_axis: Some(nodes), ..Default::default() }
    }

    /// 1/2 < a < 2b, a + b > 1 and 1/3 < b < 1/2 for a = epsilon_exponent,
    /// b = delta_exponent.
    pub fn validate(&self) -> Result<()> {
        let (a, b) = (&self.epsilon_exponent, &self.delta_exponent);
        let ok = *a > ratio(1, 2)
            && *a < b * ratio(2, 1)
            && a + b > ratio(1, 1)
            && *b > ratio(1, 3)
            && *b < ratio(1, 2);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidQuadrature(format!(
                "exponents ({}, {}) violate 1/2 < a < 2b, a + b > 1, 1/3 < b < 1/2",
                exact::rational_string(a),
                exact::rational_string(b)
            )))
        }
    }

    pub fn nodes(&self, n: usize) -> usize {
        self.nodes_per_axis.unwrap_or_else(|| 201.max((20.0 * (n as f64).sqrt()).ceil() as usize))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointContribution {
    pub w: Vec<String>,
    /// Real part of the contribution divided by S(1)^n.
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidueEstimate {
    pub n: usize,
    /// Σ_w contributions divided by S(1)^n.
    pub normalized: f64,
    pub estimate: f64,
    pub contributions: Vec<PointContribution>,
    pub relative_error_vs_oracle: Option<f64>,
    pub nodes_per_axis: usize,
    pub epsilon: f64,
    pub delta: f64,
}

impl ResidueEstimate {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "n": self.n,
            "estimate": self.estimate,
            "normalized": self.normalized,
            "relativeErrorVsOracle": self.relative_error_vs_oracle,
            "nodesPerAxis": self.nodes_per_axis,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "contributions": self.contributions.iter().map(|c| json!({"w": c.w, "normalized": c.normalized})).collect::<Vec<_>>(),
        })
    }
}

/// Integrates
/// (1+z_1)..(1+z_{d-1}) / (B(ẑ) z_1..z_d) · (B(ẑ) - z_d² A(ẑ)) / (1 - z_d) · S̄(z)^n
/// over the arcs |arg z_j - arg w_j| < δ (|z_d| = 1 - ε) around each
/// critical point w, and sums the real parts.
pub fn residue_integral_estimate(
    model: &WalkModel,
    n: usize,
    spec: &QuadratureSpec,
    oracle: Option<&CountSequence>,
) -> Result<ResidueEstimate> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::InvalidQuadrature("n must be positive".into()));
    }
    let nf = n as f64;
    let epsilon = nf.powf(-exact::to_f64(&spec.epsilon_exponent));
    let delta = nf.powf(-exact::to_f64(&spec.delta_exponent));
    residue_integral_with(model, n, epsilon, delta, spec.nodes(n), oracle)
}

/// The same integral with explicit ε, δ and node count, bypassing the
/// exponent constraints. Used to separate truncation from discretisation
/// effects.
pub fn residue_integral_with(
    model: &WalkModel,
    n: usize,
    epsilon: f64,
    delta: f64,
    nodes: usize,
    oracle: Option<&CountSequence>,
) -> Result<ResidueEstimate> {
    match classify(model).class {
        ModelClass::Unsupported(reason) => return Err(Error::UnsupportedClass(reason)),
        ModelClass::MostlySymmetric { drift, .. } if drift != ratio(0, 1) => {
            return Err(Error::UnsupportedClass("the residue integral needs a zero-drift model".into()))
        }
        _ => {}
    }
    let nf = n as f64;
    if !(delta > 0.0 && delta < PI / 4.0) {
        return Err(Error::InvalidQuadrature(format!("δ = {delta} must lie in (0, π/4) for disjoint arcs")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidQuadrature(format!("ε = {epsilon} must lie in (0, 1)")));
    }
    if nodes < 2 {
        return Err(Error::InvalidQuadrature("need at least two nodes per axis".into()));
    }
    let spacing = 2.0 * delta / (nodes - 1) as f64;
    if spacing > 1.0 / nf {
        return Err(Error::QuadratureUnderResolved { spacing, scale: 1.0 / nf });
    }

    let dec = decompose(model)?;
    let d = model.dimension();
    let s_bar = dec.s_bar();
    let s1 = exact::to_f64(&model.total_weight());
    let gamma = gamma_set(model)?;

    let grid: Vec<(f64, f64)> = (0..nodes)
        .map(|k| {
            let w = if k == 0 || k + 1 == nodes { 0.5 } else { 1.0 };
            (-delta + k as f64 * spacing, w * spacing)
        })
        .collect();

    let mut contributions = Vec::new();
    let mut total = 0.0;
    for point in &gamma.points {
        let w: Vec<Complex64> = point.w.iter().map(exact::gauss_to_c64).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut idx = vec![0usize; d];
        let mut z = vec![Complex64::new(0.0, 0.0); d];
        loop {
            let mut weight = 1.0;
            for j in 0..d {
                let (theta, wt) = grid[idx[j]];
                let radius = if j + 1 == d { 1.0 - epsilon } else { 1.0 };
                z[j] = w[j] * Complex64::from_polar(radius, theta);
                weight *= wt;
            }
            let zh = &z[..d - 1];
            let a = dec.a.eval_complex(zh);
            let b = dec.b.eval_complex(zh);
            let zd = z[d - 1];
            let numer: Complex64 = zh.iter().map(|x| 1.0 + x).product();
            let ratio = s_bar.eval_complex(&z) / s1;
            let f = numer / b * (b - zd * zd * a) / (1.0 - zd) * (ratio.ln() * nf).exp();
            acc += f * weight;
            if !advance(&mut idx, nodes) {
                break;
            }
        }
        // dz_j = i z_j dθ_j cancels the 1/(z_1..z_d) and the (2πi)^d.
        let value = acc.re / (2.0 * PI).powi(d as i32);
        total += value;
        contributions.push(PointContribution { w: point.w.iter().map(exact::gauss_string).collect(), normalized: value });
    }

    let relative_error_vs_oracle = oracle.filter(|o| o.len() > n).map(|o| {
        let exact_norm = (o.ln_value(n) - nf * s1.ln()).exp();
        (total - exact_norm).abs() / exact_norm
    });
    Ok(ResidueEstimate {
        n,
        normalized: total,
        estimate: total * s1.powi(n as i32),
        contributions,
        relative_error_vs_oracle,
        nodes_per_axis: nodes,
        epsilon,
        delta,
    })
}

fn advance(idx: &mut [usize], nodes: usize) -> bool {
    for i in idx.iter_mut() {
        *i += 1;
        if *i < nodes {
            return true;
        }
        *i = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::LaurentPoly;

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::default().validate().is_ok());
        let bad = QuadratureSpec { delta_exponent: ratio(1, 2), ..Default::default() };
        assert!(matches!(bad.validate(), Err(Error::InvalidQuadrature(_))));
        assert_eq!(QuadratureSpec::default().nodes(10_000), 2000);
    }

    #[test]
    fn under_resolved_grid_is_rejected() {
        let m = WalkModel::unweighted(2, &[&[0, 1], &[0, 1], &[-1, -1], &[1, -1]]).unwrap();
        let r = residue_integral_estimate(&m, 200, &QuadratureSpec::with_nodes(11), None);
        assert!(matches!(r, Err(Error::QuadratureUnderResolved { .. })));
    }

    #[test]
    fn highly_symmetric_amplitude_is_regular() {
        // With A = B the factor (B - z²A)/(1 - z) is A(1 + z).
        let a = LaurentPoly::from_terms(1, [(vec![1], exact::rat(1)), (vec![-1], exact::rat(1))]);
        for theta in [0.3, -0.01, 1e-6] {
            let z = Complex64::from_polar(1.0, theta);
            let av = a.eval_complex(&[Complex64::from_polar(1.0, 0.4)]);
            let lhs = (av - z * z * av) / (1.0 - z);
            let rhs = av * (1.0 + z);
            assert!((lhs - rhs).norm() < 1e-6 * rhs.norm());
        }
    }
}

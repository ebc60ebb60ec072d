use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use serde_json::json;

use super::gamma::gamma_set;
use super::saddle::second_order_main;
use super::symbolic::{ExactConstant, Quad};
use crate::error::{Error, Result};
use crate::exact::{self, rat};
use crate::model::{classify, decompose, AxisDecomposition, DriftSign, ModelClass, WalkModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Theorem {
    /// Highly symmetric.
    Thm1,
    /// Mostly symmetric, positive drift.
    Thm2,
    /// Mostly symmetric, negative drift.
    Thm3,
    /// Mostly symmetric, zero drift.
    Thm4,
}

/// s_n ~ constant * base^n * n^(-order) for n ≡ residue (mod period).
#[derive(Clone, Debug, PartialEq)]
pub struct ClassPrediction {
    pub residue: usize,
    pub base: f64,
    pub base_exact: Quad,
    pub order: BigRational,
    pub constant: f64,
    pub constant_exact: ExactConstant,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SecondOrder {
    /// Coefficient of S(1)^n n^(-(d+1)/2) from the all-ones point.
    pub kappa: f64,
    pub kappa_exact: ExactConstant,
    /// Contributions of the other critical points are not included.
    pub main_term_only: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticPrediction {
    pub theorem: Theorem,
    pub dimension: usize,
    pub period: usize,
    pub classes: Vec<ClassPrediction>,
    pub second_order: Option<SecondOrder>,
    /// Multiple of `period` after which every same-modulus contribution,
    /// leading or lower order, repeats its phase.
    pub oscillation_period: usize,
}

impl AsymptoticPrediction {
    pub fn class_for(&self, n: usize) -> &ClassPrediction {
        &self.classes[n % self.period]
    }

    pub fn order_f64(&self, n: usize) -> f64 {
        exact::to_f64(&self.class_for(n).order)
    }

    /// ln of the leading-order prediction at n.
    pub fn ln_leading(&self, n: usize) -> f64 {
        let c = self.class_for(n);
        c.constant.ln() + n as f64 * c.base.ln() - self.order_f64(n) * (n as f64).ln()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let classes: Vec<_> = self
            .classes
            .iter()
            .map(|c| {
                json!({
                    "residue": c.residue,
                    "base": c.base,
                    "baseExact": c.base_exact.to_string(),
                    "order": exact::to_f64(&c.order),
                    "orderExact": exact::rational_string(&c.order),
                    "constant": c.constant,
                    "constantExact": c.constant_exact.to_string(),
                })
            })
            .collect();
        let second = self.second_order.as_ref().map(|s| {
            json!({
                "kappa": s.kappa,
                "kappaExact": s.kappa_exact.to_string(),
                "mainTermOnly": s.main_term_only,
            })
        });
        json!({
            "theorem": self.theorem,
            "dimension": self.dimension,
            "period": self.period,
            "oscillationPeriod": self.oscillation_period,
            "classes": classes,
            "secondOrder": second,
        })
    }
}

fn half(k: usize) -> BigRational {
    exact::ratio(k as i64, 2)
}

fn product(values: &[BigRational]) -> BigRational {
    values.iter().fold(rat(1), |acc, v| acc * v)
}

fn class(residue: usize, base: Quad, order: BigRational, constant: ExactConstant) -> ClassPrediction {
    ClassPrediction { residue, base: base.to_f64(), base_exact: base, order, constant: constant.to_f64(), constant_exact: constant }
}

/// (S(1)/π)^(d/2) / sqrt(b_1..b_d), assembled from sqrt(S(1))^d and
/// 1/sqrt(prod b).
pub fn highly_symmetric_constant(model: &WalkModel) -> ExactConstant {
    let d = model.dimension();
    let s = model.total_weight();
    let root_s = Quad::sqrt_of(&s).expect("positive");
    let root_b = Quad::sqrt_of(&product(&model.forward_weights())).expect("positive");
    let mut acc = Quad::rational(rat(1));
    for _ in 0..d {
        acc = acc.mul(&root_s).expect("pure surds multiply");
    }
    let value = acc.mul(&root_b.inv().expect("non-zero")).expect("pure surds multiply");
    ExactConstant::new(value, None, d as u32)
}

/// S(1)^(d/2) / (π^(d/2) sqrt(b_1..b_d)) as a single square root.
pub fn zero_drift_constant(model: &WalkModel) -> ExactConstant {
    let d = model.dimension();
    let s = model.total_weight();
    let radicand = num_traits::pow(s, d) / product(&model.forward_weights());
    ExactConstant::new(Quad::sqrt_of(&radicand).expect("positive"), None, d as u32)
}

fn positive_drift_constant(dec: &AxisDecomposition) -> ExactConstant {
    let d = dec.model.dimension();
    let s = dec.model.total_weight();
    let b = dec.b.eval_ones();
    let radicand = num_traits::pow(s, d - 1) / product(&dec.forward_weights[..d - 1]);
    let factor = Quad::sqrt_of(&radicand).expect("positive").scale(&(dec.drift() / b));
    ExactConstant::new(factor, None, (d - 1) as u32)
}

/// Sectional B_k at (1, .., 1, z_d = r).
fn sectional_at(p: &crate::laurent::LaurentPoly, r: &Quad) -> Quad {
    let last = p.vars() - 1;
    let mut acc = Quad::rational(BigRational::zero());
    for (e, c) in p.terms() {
        let term = match e[last] {
            0 => Quad::rational(c.clone()),
            k if k > 0 => r.powi(k as u32).scale(c),
            k => r.inv().expect("non-zero").powi((-k) as u32).scale(c),
        };
        acc = acc.add(&term).expect("same field");
    }
    acc
}

/// S(1, r) = A(1)/r + Q(1) + B(1) r.
fn s_at(dec: &AxisDecomposition, r: &Quad) -> Quad {
    let a = dec.a.eval_ones();
    let q = dec.q.eval_ones();
    let b = dec.b.eval_ones();
    let inv = r.inv().expect("non-zero");
    inv.scale(&a).add(&Quad::rational(q)).and_then(|x| x.add(&r.scale(&b))).expect("same field")
}

/// The negative-drift constant with ρ replaced by `r` (ρ or -ρ).
pub fn negative_drift_constant(dec: &AxisDecomposition, r: &Quad) -> Result<ExactConstant> {
    let d = dec.model.dimension();
    let a = dec.a.eval_ones();
    let b = dec.b.eval_ones();
    let s_r = s_at(dec, r);
    let fail = || Error::Numerical("negative-drift constant left the quadratic field".into());
    let one_minus = Quad::rational(rat(1)).sub(&r.inv().ok_or_else(fail)?).ok_or_else(fail)?;
    let prefactor = s_r
        .mul(r)
        .and_then(|x| x.div(&one_minus.mul(&one_minus)?.scale(&(rat(2) * &a))))
        .ok_or_else(fail)?;
    let mut den = r.scale(&b);
    for p in &dec.sectionals {
        den = den.mul(&sectional_at(p, r)).ok_or_else(fail)?;
    }
    let radicand = s_r.powi(d as u32).div(&den).ok_or_else(fail)?;
    if !radicand.is_positive() {
        return Err(Error::Numerical(format!("square-root argument {radicand} is not positive")));
    }
    Ok(ExactConstant::new(prefactor, Some(radicand), d as u32))
}

pub fn predict(model: &WalkModel) -> Result<AsymptoticPrediction> {
    let mut p = predict_leading(model)?;
    p.oscillation_period = match p.theorem {
        Theorem::Thm1 | Theorem::Thm4 => lcm(p.period, gamma_phase_period(model)?),
        // The drift-model critical points lie off the unit torus; their
        // phases are powers of i, so 4 always suffices.
        Theorem::Thm2 | Theorem::Thm3 => lcm(p.period, 4),
    };
    Ok(p)
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Least k in {1, 2, 4} with S̄(w)^k > 0 for every critical point w.
fn gamma_phase_period(model: &WalkModel) -> Result<usize> {
    let g = gamma_set(model)?;
    Ok([1usize, 2, 4]
        .into_iter()
        .find(|&k| {
            g.points.iter().all(|p| {
                let v = exact::gauss_pow(&p.base_value, k as i32);
                v.im.is_zero() && v.re > BigRational::zero()
            })
        })
        .unwrap_or(4))
}

fn predict_leading(model: &WalkModel) -> Result<AsymptoticPrediction> {
    let c = classify(model);
    let d = model.dimension();
    let s1 = Quad::rational(model.total_weight());
    match c.class {
        ModelClass::Unsupported(reason) => Err(Error::UnsupportedClass(reason)),
        ModelClass::HighlySymmetric => Ok(AsymptoticPrediction {
            theorem: Theorem::Thm1,
            dimension: d,
            period: 1,
            classes: vec![class(0, s1, half(d), highly_symmetric_constant(model))],
            second_order: None,
            oscillation_period: 1,
        }),
        ModelClass::MostlySymmetric { drift_sign, .. } => {
            let dec = decompose(model)?;
            match drift_sign {
                DriftSign::Zero => Ok(AsymptoticPrediction {
                    theorem: Theorem::Thm4,
                    dimension: d,
                    period: 1,
                    classes: vec![class(0, s1, half(d), zero_drift_constant(model))],
                    second_order: None,
                    oscillation_period: 1,
                }),
                DriftSign::Positive => Ok(AsymptoticPrediction {
                    theorem: Theorem::Thm2,
                    dimension: d,
                    period: 1,
                    classes: vec![class(0, s1, half(d - 1), positive_drift_constant(&dec))],
                    second_order: None,
                    oscillation_period: 1,
                }),
                DriftSign::Negative => negative_drift(&dec),
            }
        }
    }
}

fn negative_drift(dec: &AxisDecomposition) -> Result<AsymptoticPrediction> {
    let d = dec.model.dimension();
    let rho = Quad::sqrt_of(&(dec.a.eval_ones() / dec.b.eval_ones())).expect("positive");
    let base = s_at(dec, &rho);
    let order = half(d + 2);
    let c_rho = negative_drift_constant(dec, &rho)?;
    let classes = if dec.q.is_zero() {
        // S(1,-ρ) = -S(1,ρ), so the two terms combine per parity.
        let c_minus = negative_drift_constant(dec, &rho.neg())?;
        let combine = |even: bool| {
            let exact = if even { c_rho.add(&c_minus) } else { c_rho.sub(&c_minus) };
            exact.ok_or_else(|| Error::Numerical("constants do not share a square root".into()))
        };
        vec![
            class(0, base.clone(), order.clone(), combine(true)?),
            class(1, base, order, combine(false)?),
        ]
    } else {
        vec![class(0, base, order, c_rho)]
    };
    Ok(AsymptoticPrediction {
        theorem: Theorem::Thm3,
        dimension: d,
        period: classes.len(),
        classes,
        second_order: None,
        oscillation_period: 1,
    })
}

/// [`predict`] plus the second-order coefficient for zero-drift and highly
/// symmetric models (zero for the latter).
pub fn predict_with_second_order(model: &WalkModel) -> Result<AsymptoticPrediction> {
    let mut p = predict(model)?;
    if matches!(p.theorem, Theorem::Thm1 | Theorem::Thm4) {
        let kappa_exact = second_order_main(model)?;
        p.second_order = Some(SecondOrder { kappa: kappa_exact.to_f64(), kappa_exact, main_term_only: true });
    }
    Ok(p)
}

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::json;

use super::gamma::GammaPoint;
use super::symbolic::{ExactConstant, Quad};
use crate::error::{Error, Result};
use crate::exact::{self, rat};
use crate::laurent::LaurentPoly;
use crate::model::{classify, decompose, AxisDecomposition, ModelClass, WalkModel};

pub const FD_STEP: f64 = 1e-4;
pub const FD_TOLERANCE: f64 = 1e-6;

/// Quadratic and amplitude data of the all-ones saddle, canonical axis order.
#[derive(Clone, Debug, PartialEq)]
pub struct SaddleData {
    /// c_j = b_j / S(1), j = 1..d.
    pub hessian_coefficients: Vec<BigRational>,
    /// Half the weight of steps with i_d = -1 and i_j ≠ 0, j < d.
    pub alphas: Vec<BigRational>,
    /// Half the weight of steps with i_d = +1 and i_j ≠ 0, j < d.
    pub betas: Vec<BigRational>,
    pub amplitude_at_center: BigRational,
    /// γ_j in 2^d + i Σ γ_j θ_j² / θ_d: γ_j = 2^(d-1) (α_j - β_j) / B(1).
    pub amplitude_coefficients: Vec<BigRational>,
    /// Finite-difference second derivatives of log S̄(e^{iθ}) at 0.
    pub fd_second_derivatives: Vec<f64>,
}

impl SaddleData {
    pub fn to_json(&self) -> serde_json::Value {
        let s = |v: &[BigRational]| v.iter().map(exact::rational_string).collect::<Vec<_>>();
        json!({
            "hessianCoefficients": s(&self.hessian_coefficients),
            "alphas": s(&self.alphas),
            "betas": s(&self.betas),
            "amplitudeAtCenter": exact::rational_string(&self.amplitude_at_center),
            "amplitudeCoefficients": s(&self.amplitude_coefficients),
            "fdSecondDerivatives": self.fd_second_derivatives,
        })
    }
}

fn supported(model: &WalkModel) -> Result<AxisDecomposition> {
    if let ModelClass::Unsupported(reason) = classify(model).class {
        return Err(Error::UnsupportedClass(reason));
    }
    decompose(model)
}

/// f(e^{iθ}) with θ non-zero only in `axis`.
fn on_axis(p: &LaurentPoly, axis: usize, theta: f64) -> Complex64 {
    let mut z = vec![Complex64::new(1.0, 0.0); p.vars()];
    z[axis] = Complex64::from_polar(1.0, theta);
    p.eval_complex(&z)
}

/// Central second difference of θ ↦ g(e^{iθ}) along `axis`, at 0.
fn second_difference(g: impl Fn(f64) -> Complex64, h: f64) -> Complex64 {
    (g(h) - g(0.0) * 2.0 + g(-h)) / (h * h)
}

/// d²/dθ_axis² log S̄(e^{iθ}) at θ = 0 by central differences, in the
/// canonical axis order.
pub fn log_s_bar_second_derivative(model: &WalkModel, axis: usize, h: f64) -> Result<f64> {
    let dec = supported(model)?;
    let s_bar = dec.s_bar();
    Ok(second_difference(|t| on_axis(&s_bar, axis, t).ln(), h).re)
}

/// Exact value of the same derivative: -2 b_j / S(1) for j < d and
/// -(A+B)/S + (A-B)²/S² along the asymmetric axis.
pub fn log_s_bar_second_derivative_exact(dec: &AxisDecomposition, axis: usize) -> BigRational {
    let s = dec.model.total_weight();
    let d = dec.model.dimension();
    if axis + 1 < d {
        return rat(-2) * &dec.forward_weights[axis] / &s;
    }
    let a = dec.a.eval_ones();
    let b = dec.b.eval_ones();
    let diff = &a - &b;
    -(&a + &b) / &s + &diff * &diff / (&s * &s)
}

/// Saddle data at the all-ones point, checked against finite differences
/// of log S̄, A and B.
pub fn saddle_data(model: &WalkModel, w: &GammaPoint) -> Result<SaddleData> {
    if !w.is_all_ones() {
        return Err(Error::InvalidModel("saddle data is defined at the all-ones point".into()));
    }
    let dec = supported(model)?;
    let d = model.dimension();
    let s = model.total_weight();
    let hessian_coefficients: Vec<BigRational> = dec.forward_weights.iter().map(|b| b / &s).collect();
    let half_weight = |sign: i8, j: usize| {
        dec.model
            .steps()
            .filter(|(v, _)| v[d - 1] == sign && v[j] != 0)
            .fold(BigRational::zero(), |acc, (_, w)| acc + w)
            / rat(2)
    };
    let alphas: Vec<_> = (0..d - 1).map(|j| half_weight(-1, j)).collect();
    let betas: Vec<_> = (0..d - 1).map(|j| half_weight(1, j)).collect();
    let b1 = dec.b.eval_ones();
    let two_pow = num_traits::pow(rat(2), d - 1);
    let amplitude_coefficients =
        alphas.iter().zip(&betas).map(|(a, b)| &two_pow * (a - b) / &b1).collect();

    let s_bar = dec.s_bar();
    let mut fd = Vec::with_capacity(d);
    for axis in 0..d {
        let got = second_difference(|t| on_axis(&s_bar, axis, t).ln(), FD_STEP).re;
        let want = exact::to_f64(&log_s_bar_second_derivative_exact(&dec, axis));
        if (got - want).abs() > FD_TOLERANCE {
            return Err(Error::Numerical(format!(
                "axis {}: finite difference {got} disagrees with {want}",
                axis + 1
            )));
        }
        fd.push(got);
    }
    // 2α_j = -∂²A(e^{iθ}) and 2β_j = -∂²B(e^{iθ}) at 0.
    for j in 0..d - 1 {
        for (poly, value) in [(&dec.a, &alphas[j]), (&dec.b, &betas[j])] {
            if poly.is_zero() {
                continue;
            }
            let got = -second_difference(|t| on_axis(poly, j, t), FD_STEP).re / 2.0;
            if (got - exact::to_f64(value)).abs() > FD_TOLERANCE * exact::to_f64(&s).max(1.0) {
                return Err(Error::Numerical(format!("axis {}: amplitude data check failed", j + 1)));
            }
        }
    }
    Ok(SaddleData {
        hessian_coefficients,
        alphas,
        betas,
        amplitude_at_center: num_traits::pow(rat(2), d),
        amplitude_coefficients,
        fd_second_derivatives: fd,
    })
}

/// κ with s_n = S(1)^n n^(-d/2) (C + κ n^(-1/2) + ...) from the all-ones
/// point only:
/// κ = Σ_{j<d} (α_j - β_j)/(2 c_j) · 1/(2 B(1)) · 1/sqrt(c_1..c_{d-1}) · π^(-(d-1)/2).
/// Zero when the model is highly symmetric.
pub fn second_order_main(model: &WalkModel) -> Result<ExactConstant> {
    let c = classify(model);
    let d = model.dimension();
    match c.class {
        ModelClass::Unsupported(reason) => return Err(Error::UnsupportedClass(reason)),
        ModelClass::HighlySymmetric => return Ok(ExactConstant::new(Quad::rational(rat(0)), None, (d - 1) as u32)),
        ModelClass::MostlySymmetric { drift, .. } if !drift.is_zero() => {
            return Err(Error::NonZeroDrift(exact::rational_string(&drift)))
        }
        ModelClass::MostlySymmetric { .. } => {}
    }
    let dec = decompose(model)?;
    let one = GammaPoint {
        w: vec![exact::gauss_int(1, 0); d],
        t_coordinate: exact::gauss(rat(1) / model.total_weight(), rat(0)),
        base_value: exact::gauss(model.total_weight(), rat(0)),
        order: super::gamma::GammaOrder::Leading,
    };
    let sd = saddle_data(model, &one)?;
    let cs = &sd.hessian_coefficients[..d - 1];
    let sum = (0..d - 1).fold(BigRational::zero(), |acc, j| {
        acc + (&sd.alphas[j] - &sd.betas[j]) / (rat(2) * &cs[j])
    });
    let prod_c = cs.iter().fold(rat(1), |acc, c| acc * c);
    let scalar = sum / (rat(2) * dec.b.eval_ones());
    let root = Quad::sqrt_of(&(rat(1) / prod_c)).expect("positive");
    Ok(ExactConstant::new(root.scale(&scalar), None, (d - 1) as u32))
}

use serde_json::json;

use crate::error::{Error, Result};
use crate::exact::{self, gauss_int, GaussianRational};
use crate::model::{classify, decompose, ModelClass, WalkModel};

/// Whether a torus point contributes to dominant asymptotics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GammaOrder {
    Leading,
    /// Lower order, with the factor responsible for the extra decay.
    Lower(&'static str),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaPoint {
    /// Coordinates in the canonical axis order (asymmetric axis last).
    pub w: Vec<GaussianRational>,
    pub t_coordinate: GaussianRational,
    /// S̄(w).
    pub base_value: GaussianRational,
    pub order: GammaOrder,
}

impl GammaPoint {
    pub fn is_all_ones(&self) -> bool {
        self.w.iter().all(|z| *z == gauss_int(1, 0))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (order, reason) = match &self.order {
            GammaOrder::Leading => ("leading", None),
            GammaOrder::Lower(r) => ("lower", Some(*r)),
        };
        json!({
            "w": self.w.iter().map(exact::gauss_string).collect::<Vec<_>>(),
            "t": exact::gauss_string(&self.t_coordinate),
            "baseValue": exact::gauss_string(&self.base_value),
            "order": order,
            "reason": reason,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaSet {
    pub points: Vec<GammaPoint>,
    /// Least p with S̄(w)^p > 0 for every leading point.
    pub period: usize,
    /// Axis permutation applied to reach canonical order (new i = old perm[i]).
    pub permutation: Vec<usize>,
}

impl GammaSet {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "period": self.period,
            "permutation": self.permutation.iter().map(|p| p + 1).collect::<Vec<_>>(),
            "points": self.points.iter().map(GammaPoint::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Candidates ŵ ∈ {±1}^(d-1), w_d ∈ {±1, ±i}, kept when
/// |w_1..w_d S(ŵ, w_d)|² = S(1)² holds exactly.
pub fn gamma_set(model: &WalkModel) -> Result<GammaSet> {
    let c = classify(model);
    if let ModelClass::Unsupported(reason) = c.class {
        return Err(Error::UnsupportedClass(reason));
    }
    let dec = decompose(model)?;
    let d = model.dimension();
    let s = dec.model.char_poly();
    let s_bar = dec.s_bar();
    let s1_sq = {
        let s1 = model.total_weight();
        &s1 * &s1
    };
    let last_choices = [gauss_int(1, 0), gauss_int(-1, 0), gauss_int(0, 1), gauss_int(0, -1)];
    let mut points = Vec::new();
    for mask in 0..(1usize << (d - 1)) {
        for wd in &last_choices {
            let mut w: Vec<GaussianRational> =
                (0..d - 1).map(|j| if mask >> j & 1 == 1 { gauss_int(-1, 0) } else { gauss_int(1, 0) }).collect();
            w.push(wd.clone());
            let prod = w.iter().fold(gauss_int(1, 0), |acc, z| acc * z.clone());
            let sv = s.eval_exact(&w);
            if exact::gauss_norm_sqr(&(prod.clone() * sv)) != s1_sq {
                continue;
            }
            let base_value = s_bar.eval_exact(&w);
            let t_coordinate = exact::gauss_inv(&(prod * base_value.clone()));
            let order = order_of(&w);
            points.push(GammaPoint { w, t_coordinate, base_value, order });
        }
    }
    let period = period_of(&points);
    Ok(GammaSet { points, period, permutation: c.permutation })
}

fn order_of(w: &[GaussianRational]) -> GammaOrder {
    let d = w.len();
    let one = gauss_int(1, 0);
    if w.iter().all(|z| *z == one) {
        return GammaOrder::Leading;
    }
    let hat_has_minus = w[..d - 1].iter().any(|z| *z != one);
    if w[d - 1] == one {
        // A factor (1 + z_j) of the numerator vanishes at w.
        return GammaOrder::Lower("numerator factor 1 + z_j vanishes");
    }
    if w[d - 1] == gauss_int(-1, 0) {
        return GammaOrder::Lower("amplitude B - z_d^2 A is small relative to 1 - z_d");
    }
    // w_d = ±i forces A(ŵ) = -B(ŵ); on the unit torus this needs some ŵ_j = -1.
    if hat_has_minus {
        GammaOrder::Lower("numerator factor 1 + z_j vanishes")
    } else {
        GammaOrder::Lower("w_d = ±i")
    }
}

fn period_of(points: &[GammaPoint]) -> usize {
    let leading: Vec<_> = points.iter().filter(|p| p.order == GammaOrder::Leading).collect();
    (1..=4)
        .find(|&p| {
            leading.iter().all(|g| {
                let v = exact::gauss_pow(&g.base_value, p as i32);
                v.im == num_traits::Zero::zero() && v.re > num_traits::Zero::zero()
            })
        })
        .unwrap_or(4)
}

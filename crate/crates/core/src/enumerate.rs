//! Total weight of n-step walks from the origin that stay in the orthant,
//! computed by dynamic programming over the box [0, n]^d.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;
use crate::model::WalkModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithmeticMode {
    Exact,
    Float64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CountValues {
    Exact(Vec<BigRational>),
    /// s_n = normalized[n] * scale^n. Keeps values in range for large n.
    Float { normalized: Vec<f64>, scale: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountSequence {
    pub values: CountValues,
    pub model_fingerprint: String,
    /// |S| for the float rounding bound; 0 when unknown or exact.
    pub step_count: usize,
}

/// Caps the DP table size (number of lattice cells (N+1)^d).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationLimits {
    pub max_cells: u64,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits { max_cells: 50_000_000 }
    }
}

impl CountSequence {
    pub fn from_exact(values: Vec<BigRational>) -> Self {
        CountSequence { values: CountValues::Exact(values), model_fingerprint: String::new(), step_count: 0 }
    }

    pub fn from_normalized(normalized: Vec<f64>, scale: f64, step_count: usize) -> Self {
        CountSequence {
            values: CountValues::Float { normalized, scale },
            model_fingerprint: String::new(),
            step_count,
        }
    }

    pub fn mode(&self) -> ArithmeticMode {
        match self.values {
            CountValues::Exact(_) => ArithmeticMode::Exact,
            CountValues::Float { .. } => ArithmeticMode::Float64,
        }
    }

    pub fn len(&self) -> usize {
        match &self.values {
            CountValues::Exact(v) => v.len(),
            CountValues::Float { normalized, .. } => normalized.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The largest n present.
    pub fn max_length(&self) -> usize {
        self.len().saturating_sub(1)
    }

    pub fn exact(&self, n: usize) -> Option<&BigRational> {
        match &self.values {
            CountValues::Exact(v) => v.get(n),
            CountValues::Float { .. } => None,
        }
    }

    pub fn exact_values(&self) -> Option<&[BigRational]> {
        match &self.values {
            CountValues::Exact(v) => Some(v),
            CountValues::Float { .. } => None,
        }
    }

    /// ln s_n, `-inf` for zero terms.
    pub fn ln_value(&self, n: usize) -> f64 {
        match &self.values {
            CountValues::Exact(v) => exact::ln_rational(&v[n]),
            CountValues::Float { normalized, scale } => normalized[n].ln() + n as f64 * scale.ln(),
        }
    }

    /// s_n as a double; may overflow to infinity.
    pub fn value_f64(&self, n: usize) -> f64 {
        match &self.values {
            CountValues::Exact(v) => exact::to_f64(&v[n]),
            CountValues::Float { normalized, scale } => normalized[n] * scale.powi(n as i32),
        }
    }

    pub fn is_positive(&self, n: usize) -> bool {
        match &self.values {
            CountValues::Exact(v) => v[n] > BigRational::zero(),
            CountValues::Float { normalized, .. } => normalized[n] > 0.0,
        }
    }

    /// Worst-case relative rounding error of a float-mode term,
    /// n * |S| * 2^-52. Zero in exact mode.
    pub fn rounding_bound(&self, n: usize) -> f64 {
        match self.values {
            CountValues::Exact(_) => 0.0,
            CountValues::Float { .. } => n as f64 * self.step_count as f64 * f64::EPSILON,
        }
    }

    /// Newline-delimited `n<TAB>p/q` (exact) or `n<TAB>decimal` (float).
    pub fn export(&self) -> String {
        let mut out = String::new();
        for n in 0..self.len() {
            match &self.values {
                CountValues::Exact(v) => {
                    let _ = writeln!(out, "{n}\t{}", exact::fraction_string(&v[n]));
                }
                CountValues::Float { .. } => {
                    let _ = writeln!(out, "{n}\t{}", self.decimal_string(n));
                }
            }
        }
        out
    }

    fn decimal_string(&self, n: usize) -> String {
        let direct = self.value_f64(n);
        if direct == 0.0 || (direct.is_finite() && direct.abs() >= f64::MIN_POSITIVE) {
            return format!("{direct:e}");
        }
        let log10 = self.ln_value(n) / std::f64::consts::LN_10;
        let e = log10.floor();
        let m = 10f64.powf(log10 - e);
        format!("{m}e{}", e as i64)
    }

    /// Reads the format written by [`export`](Self::export). Lines must be
    /// numbered 0, 1, 2, ... in order; all lines must use the same form.
    pub fn parse_export(text: &str) -> Result<Self> {
        let mut exact_vals = Vec::new();
        let mut logs = Vec::new();
        let mut is_exact = None;
        for (i, line) in text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
            let bad = || Error::InvalidModel(format!("bad sequence line {}: {line:?}", i + 1));
            let (idx, val) = line.split_once('\t').ok_or_else(bad)?;
            if idx.trim().parse::<usize>().map_err(|_| bad())? != i {
                return Err(bad());
            }
            let val = val.trim();
            let this_exact = val.contains('/');
            if *is_exact.get_or_insert(this_exact) != this_exact {
                return Err(bad());
            }
            if this_exact {
                exact_vals.push(exact::parse_rational(val).map_err(|_| bad())?);
            } else {
                let (m, e) = match val.split_once(['e', 'E']) {
                    Some((m, e)) => (m, e.parse::<i64>().map_err(|_| bad())?),
                    None => (val, 0),
                };
                let m: f64 = m.parse().map_err(|_| bad())?;
                if m < 0.0 {
                    return Err(bad());
                }
                logs.push(m.ln() + e as f64 * std::f64::consts::LN_10);
            }
        }
        if is_exact == Some(true) {
            return Ok(Self::from_exact(exact_vals));
        }
        let last = logs.len().saturating_sub(1);
        let scale = if last > 0 && logs[last].is_finite() { (logs[last] / last as f64).exp() } else { 1.0 };
        let normalized = logs.iter().enumerate().map(|(n, l)| (l - n as f64 * scale.ln()).exp()).collect();
        Ok(Self::from_normalized(normalized, scale, 0))
    }
}

pub fn count_walks(model: &WalkModel, max_n: usize, mode: ArithmeticMode) -> Result<CountSequence> {
    count_walks_with_limits(model, max_n, mode, EnumerationLimits::default())
}

pub fn count_walks_with_limits(
    model: &WalkModel,
    max_n: usize,
    mode: ArithmeticMode,
    limits: EnumerationLimits,
) -> Result<CountSequence> {
    let d = model.dimension();
    let side = max_n as u64 + 1;
    let cells = side.checked_pow(d as u32).filter(|&c| c <= limits.max_cells).ok_or_else(|| {
        Error::ResourceLimit(format!(
            "table of {side}^{d} cells exceeds the cap of {} cells",
            limits.max_cells
        ))
    })?;
    let grid = Grid::new(d, max_n, cells as usize);
    let steps: Vec<Vec<i8>> = model.steps().map(|(s, _)| s.clone()).collect();
    let values = match mode {
        ArithmeticMode::Exact => {
            let denom = model.weight_denominator();
            let weights: Vec<BigUint> = model
                .steps()
                .map(|(_, w)| {
                    let scaled = w * BigRational::from_integer(denom.clone());
                    scaled.to_integer().to_biguint().expect("positive weight")
                })
                .collect();
            let totals = grid.run(&steps, &weights, BigUint::from(1u32));
            let mut power = BigInt::from(1);
            totals
                .into_iter()
                .map(|t| {
                    let v = BigRational::new(BigInt::from(t), power.clone());
                    power *= &denom;
                    v
                })
                .collect::<Vec<_>>()
                .pipe(CountValues::Exact)
        }
        ArithmeticMode::Float64 => {
            let total = exact::to_f64(&model.total_weight());
            let weights: Vec<F64Cell> = model
                .steps()
                .map(|(_, w)| F64Cell(exact::to_f64(w) / total))
                .collect();
            let normalized = grid.run(&steps, &weights, F64Cell(1.0)).into_iter().map(|c| c.0).collect();
            CountValues::Float { normalized, scale: total }
        }
    };
    Ok(CountSequence { values, model_fingerprint: model.fingerprint(), step_count: model.step_count() })
}

trait Pipe: Sized {
    fn pipe<T>(self, f: impl FnOnce(Self) -> T) -> T {
        f(self)
    }
}
impl<T> Pipe for T {}

/// Cell arithmetic used by the DP: accumulate `weight * value`.
trait Cell: Clone {
    fn zero() -> Self;
    fn vanishes(&self) -> bool;
    fn add_product(&mut self, weight: &Self, value: &Self);
    fn add_assign(&mut self, other: &Self);
}

impl Cell for BigUint {
    fn zero() -> Self {
        <BigUint as Zero>::zero()
    }
    fn vanishes(&self) -> bool {
        self.bits() == 0
    }
    fn add_product(&mut self, weight: &Self, value: &Self) {
        *self += weight * value;
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
}

#[derive(Clone, Copy, Debug)]
struct F64Cell(f64);

impl Cell for F64Cell {
    fn zero() -> Self {
        F64Cell(0.0)
    }
    fn vanishes(&self) -> bool {
        self.0 == 0.0
    }
    fn add_product(&mut self, weight: &Self, value: &Self) {
        self.0 += weight.0 * value.0;
    }
    fn add_assign(&mut self, other: &Self) {
        self.0 += other.0;
    }
}

/// Flat (N+1)^d table with fixed strides.
struct Grid {
    d: usize,
    max_n: usize,
    cells: usize,
    strides: Vec<isize>,
}

impl Grid {
    fn new(d: usize, max_n: usize, cells: usize) -> Self {
        let strides = (0..d).map(|k| (max_n as isize + 1).pow(k as u32)).collect();
        Grid { d, max_n, cells, strides }
    }

    /// Runs the recurrence and returns the layer sums s_0..s_N.
    fn run<C: Cell>(&self, steps: &[Vec<i8>], weights: &[C], one: C) -> Vec<C> {
        let offsets: Vec<isize> = steps
            .iter()
            .map(|s| s.iter().zip(&self.strides).map(|(&v, &st)| v as isize * st).sum())
            .collect();
        let mut cur = vec![C::zero(); self.cells];
        let mut next = vec![C::zero(); self.cells];
        cur[0] = one.clone();
        let mut totals = vec![one];
        let mut coords = vec![0usize; self.d];
        for n in 0..self.max_n {
            // Layer n occupies [0, n]^d; layer n+1 occupies [0, n+1]^d.
            let mut total = C::zero();
            coords.iter_mut().for_each(|c| *c = 0);
            loop {
                let idx: usize = coords.iter().zip(&self.strides).map(|(&c, &s)| c * s as usize).sum();
                let mut acc = C::zero();
                for ((step, off), w) in steps.iter().zip(&offsets).zip(weights) {
                    let inside = step.iter().zip(&coords).all(|(&s, &c)| match s {
                        1 => c >= 1,
                        -1 => c < n,
                        _ => c <= n,
                    });
                    if inside {
                        let src = &cur[(idx as isize - off) as usize];
                        if !src.vanishes() {
                            acc.add_product(w, src);
                        }
                    }
                }
                total.add_assign(&acc);
                next[idx] = acc;
                if !advance(&mut coords, n + 1) {
                    break;
                }
            }
            std::mem::swap(&mut cur, &mut next);
            totals.push(total);
        }
        totals
    }
}

/// Odometer over [0, bound]^d; false once exhausted.
fn advance(coords: &mut [usize], bound: usize) -> bool {
    for c in coords.iter_mut() {
        if *c < bound {
            *c += 1;
            return true;
        }
        *c = 0;
    }
    false
}

/// The exact terms as f64 values capped at 2^1023; used in tests comparing modes.
pub fn exact_to_f64(values: &[BigRational]) -> Vec<f64> {
    values.iter().map(|v| v.to_f64().unwrap_or(f64::INFINITY)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    /// Independent oracle: walk every step string, pruning once a prefix
    /// leaves the orthant (all its extensions are excluded too).
    fn brute_force(model: &WalkModel, n: usize) -> BigRational {
        fn go(steps: &[(Vec<i8>, BigRational)], pos: &mut Vec<i64>, left: usize, acc: BigRational) -> BigRational {
            if left == 0 {
                return acc;
            }
            let mut total = BigRational::zero();
            for (s, w) in steps {
                for (p, &v) in pos.iter_mut().zip(s) {
                    *p += v as i64;
                }
                if pos.iter().all(|&p| p >= 0) {
                    total += go(steps, pos, left - 1, &acc * w);
                }
                for (p, &v) in pos.iter_mut().zip(s) {
                    *p -= v as i64;
                }
            }
            total
        }
        let steps: Vec<_> = model.steps().map(|(s, w)| (s.clone(), w.clone())).collect();
        go(&steps, &mut vec![0; model.dimension()], n, rat(1))
    }

    fn cardinal() -> WalkModel {
        WalkModel::unweighted(2, &[&[0, 1], &[0, -1], &[1, 0], &[-1, 0]]).unwrap()
    }

    fn weighted_zero_drift() -> WalkModel {
        WalkModel::unweighted(2, &[&[0, 1], &[0, 1], &[-1, -1], &[1, -1]]).unwrap()
    }

    #[test]
    fn cardinal_counts_match_brute_force() {
        let m = cardinal();
        let oracle: Vec<BigRational> = (0..=5).map(|n| brute_force(&m, n)).collect();
        assert_eq!(oracle, [1, 2, 6, 18, 60, 200].map(rat).to_vec());
        let seq = count_walks(&m, 5, ArithmeticMode::Exact).unwrap();
        assert_eq!(seq.exact_values().unwrap(), oracle.as_slice());
    }

    #[test]
    fn weighted_counts_match_brute_force() {
        let m = weighted_zero_drift();
        let oracle: Vec<BigRational> = (0..=3).map(|n| brute_force(&m, n)).collect();
        assert_eq!(oracle, [1, 2, 6, 16].map(rat).to_vec());
        let seq = count_walks(&m, 3, ArithmeticMode::Exact).unwrap();
        assert_eq!(seq.exact_values().unwrap(), oracle.as_slice());
    }

    #[test]
    fn small_cases() {
        let pos = WalkModel::unweighted(2, &[&[-1, 1], &[1, 1], &[0, -1]]).unwrap();
        let seq = count_walks(&pos, 1, ArithmeticMode::Exact).unwrap();
        assert_eq!(seq.exact(1), Some(&rat(1)));
        let zero = count_walks(&cardinal(), 0, ArithmeticMode::Exact).unwrap();
        assert_eq!(zero.exact_values().unwrap(), &[rat(1)]);
    }

    #[test]
    fn fractional_weights_divide_out() {
        let m = WalkModel::new(
            1,
            [(vec![1], crate::exact::ratio(1, 3)), (vec![-1], crate::exact::ratio(1, 2))],
        )
        .unwrap();
        let seq = count_walks(&m, 6, ArithmeticMode::Exact).unwrap();
        for n in 0..=6 {
            assert_eq!(seq.exact(n).unwrap(), &brute_force(&m, n));
        }
    }

    #[test]
    fn float_mode_matches_exact_within_bound() {
        let m = weighted_zero_drift();
        let e = count_walks(&m, 200, ArithmeticMode::Exact).unwrap();
        let f = count_walks(&m, 200, ArithmeticMode::Float64).unwrap();
        for n in 0..=200 {
            let rel = (f.ln_value(n) - e.ln_value(n)).abs();
            assert!(rel <= f.rounding_bound(n).max(1e-15) * 2.0, "n={n} rel={rel}");
        }
    }

    #[test]
    fn resource_limit() {
        let limits = EnumerationLimits { max_cells: 1000 };
        let r = count_walks_with_limits(&cardinal(), 100, ArithmeticMode::Float64, limits);
        assert!(matches!(r, Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn export_round_trip() {
        let e = count_walks(&cardinal(), 6, ArithmeticMode::Exact).unwrap();
        let text = e.export();
        assert!(text.starts_with("0\t1/1\n1\t2/1\n"));
        assert_eq!(CountSequence::parse_export(&text).unwrap().values, e.values);

        let f = count_walks(&cardinal(), 600, ArithmeticMode::Float64).unwrap();
        let back = CountSequence::parse_export(&f.export()).unwrap();
        for n in [0, 10, 300, 600] {
            assert!((back.ln_value(n) - f.ln_value(n)).abs() < 1e-10);
        }
    }
}

//! Weighted short-step models, their characteristic polynomials, symmetry
//! classification and the decomposition along the asymmetric axis.
//!
//! Axis indices are 0-based throughout the library. The JSON forms and error
//! messages print them 1-based.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exact;
use crate::laurent::LaurentPoly;

/// A step vector with entries in {-1, 0, 1}.
pub type Step = Vec<i8>;

/// A weighted step set in dimension `d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WalkModel {
    dimension: usize,
    steps: BTreeMap<Step, BigRational>,
}

/// The on-disk model description.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelSpec {
    pub dimension: usize,
    pub steps: Vec<StepSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepSpec {
    pub vector: Vec<i64>,
    pub weight: WeightSpec,
}

/// Weights are normally strings ("2", "1/3", "0.25"); bare JSON integers are
/// accepted too.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightSpec {
    Text(String),
    Integer(i64),
}

impl WeightSpec {
    fn to_rational(&self) -> Result<BigRational> {
        match self {
            WeightSpec::Text(s) => exact::parse_rational(s),
            WeightSpec::Integer(n) => Ok(exact::rat(*n)),
        }
    }
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidModel(e.to_string()))
    }
}

impl WalkModel {
    /// Builds a model, merging duplicate steps by adding their weights.
    pub fn new<I>(dimension: usize, steps: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, BigRational)>,
    {
        if dimension == 0 {
            return Err(Error::InvalidModel("dimension must be positive".into()));
        }
        let mut merged: BTreeMap<Step, BigRational> = BTreeMap::new();
        for (vector, weight) in steps {
            if vector.len() != dimension {
                return Err(Error::DimensionMismatch {
                    found: vector.len(),
                    expected: dimension,
                    vector,
                });
            }
            if vector.iter().any(|&v| !(-1..=1).contains(&v)) {
                return Err(Error::EntryOutOfRange(vector));
            }
            if vector.iter().all(|&v| v == 0) {
                return Err(Error::ZeroStep(vector));
            }
            if !weight.is_positive() {
                return Err(Error::NonPositiveWeight {
                    weight: exact::rational_string(&weight),
                    vector,
                });
            }
            let step: Step = vector.iter().map(|&v| v as i8).collect();
            *merged.entry(step).or_insert_with(BigRational::zero) += weight;
        }
        for k in 0..dimension {
            let forward = merged.keys().any(|s| s[k] == 1);
            let backward = merged.keys().any(|s| s[k] == -1);
            if !(forward && backward) {
                return Err(Error::MissingForwardOrBackwardStep(k + 1));
            }
        }
        Ok(WalkModel { dimension, steps: merged })
    }

    /// Unweighted model from a list of step vectors (repeats add weight).
    pub fn unweighted(dimension: usize, steps: &[&[i64]]) -> Result<Self> {
        Self::new(dimension, steps.iter().map(|s| (s.to_vec(), BigRational::one())))
    }

    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        let steps = spec
            .steps
            .iter()
            .map(|s| Ok((s.vector.clone(), s.weight.to_rational()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(spec.dimension, steps)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_spec(&ModelSpec::from_json(text)?)
    }

    pub fn to_spec(&self) -> ModelSpec {
        ModelSpec {
            dimension: self.dimension,
            steps: self
                .steps
                .iter()
                .map(|(s, w)| StepSpec {
                    vector: s.iter().map(|&v| v as i64).collect(),
                    weight: WeightSpec::Text(exact::rational_string(w)),
                })
                .collect(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn steps(&self) -> impl Iterator<Item = (&Step, &BigRational)> {
        self.steps.iter()
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    pub fn weight(&self, step: &[i8]) -> Option<&BigRational> {
        self.steps.get(step)
    }

    /// S(1), the total step weight.
    pub fn total_weight(&self) -> BigRational {
        self.steps.values().fold(BigRational::zero(), |a, w| a + w)
    }

    /// Total weight of the steps whose `axis` entry equals `value`.
    pub fn weight_with(&self, axis: usize, value: i8) -> BigRational {
        self.steps
            .iter()
            .filter(|(s, _)| s[axis] == value)
            .fold(BigRational::zero(), |a, (_, w)| a + w)
    }

    /// b_k for every axis: the weight moving forward in coordinate k.
    pub fn forward_weights(&self) -> Vec<BigRational> {
        (0..self.dimension).map(|k| self.weight_with(k, 1)).collect()
    }

    /// S(z) = sum of w_i z^i.
    pub fn char_poly(&self) -> LaurentPoly {
        LaurentPoly::from_terms(
            self.dimension,
            self.steps
                .iter()
                .map(|(s, w)| (s.iter().map(|&v| v as i32).collect(), w.clone())),
        )
    }

    /// New axis `i` is old axis `perm[i]`.
    pub fn permute_axes(&self, perm: &[usize]) -> WalkModel {
        assert!(is_permutation(perm, self.dimension), "not a permutation: {perm:?}");
        WalkModel {
            dimension: self.dimension,
            steps: self
                .steps
                .iter()
                .map(|(s, w)| (perm.iter().map(|&p| s[p]).collect(), w.clone()))
                .collect(),
        }
    }

    pub fn reflect_axis(&self, axis: usize) -> WalkModel {
        WalkModel {
            dimension: self.dimension,
            steps: self
                .steps
                .iter()
                .map(|(s, w)| {
                    let mut r = s.clone();
                    r[axis] = -r[axis];
                    (r, w.clone())
                })
                .collect(),
        }
    }

    /// Multiplies every weight by `lambda > 0`.
    pub fn scale_weights(&self, lambda: &BigRational) -> WalkModel {
        assert!(lambda.is_positive());
        WalkModel {
            dimension: self.dimension,
            steps: self.steps.iter().map(|(s, w)| (s.clone(), w * lambda)).collect(),
        }
    }

    /// Symmetric over `axis`: reflecting that coordinate maps the weighted
    /// step set onto itself.
    pub fn is_symmetric_over(&self, axis: usize) -> bool {
        self.steps.iter().all(|(s, w)| {
            let mut r = s.clone();
            r[axis] = -r[axis];
            self.steps.get(&r) == Some(w)
        })
    }

    pub fn symmetric_axes(&self) -> Vec<usize> {
        (0..self.dimension).filter(|&k| self.is_symmetric_over(k)).collect()
    }

    /// Stable text form: dimension then sorted `(vector, weight)` pairs.
    pub fn canonical_string(&self) -> String {
        let steps: Vec<String> = self
            .steps
            .iter()
            .map(|(s, w)| {
                let v: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                format!("({}):{}", v.join(","), exact::rational_string(w))
            })
            .collect();
        format!("d={};{}", self.dimension, steps.join(";"))
    }

    /// SHA-256 of the canonical string, hex encoded.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.canonical_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Least common denominator of the weights.
    pub fn weight_denominator(&self) -> BigInt {
        exact::lcm_of_denominators(self.steps.values())
    }
}

impl fmt::Display for WalkModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_string())
    }
}

pub(crate) fn is_permutation(perm: &[usize], d: usize) -> bool {
    let mut seen = vec![false; d];
    perm.len() == d
        && perm.iter().all(|&p| p < d && !std::mem::replace(&mut seen[p], true))
}

/// Composition: `(outer ∘ inner)[i] = inner[outer[i]]`, i.e. applying
/// `permute_axes(inner)` then `permute_axes(outer)`.
pub fn compose(inner: &[usize], outer: &[usize]) -> Vec<usize> {
    outer.iter().map(|&o| inner[o]).collect()
}

pub fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriftSign {
    Negative,
    Zero,
    Positive,
}

impl DriftSign {
    pub fn of(q: &BigRational) -> Self {
        if q.is_negative() {
            DriftSign::Negative
        } else if q.is_zero() {
            DriftSign::Zero
        } else {
            DriftSign::Positive
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelClass {
    HighlySymmetric,
    /// Symmetric over every axis except `asymmetric_axis` (original numbering).
    MostlySymmetric {
        asymmetric_axis: usize,
        drift_sign: DriftSign,
        drift: BigRational,
    },
    Unsupported(String),
}

impl ModelClass {
    pub fn tag(&self) -> &'static str {
        match self {
            ModelClass::HighlySymmetric => "HighlySymmetric",
            ModelClass::MostlySymmetric { .. } => "MostlySymmetric",
            ModelClass::Unsupported(_) => "Unsupported",
        }
    }

    pub fn drift_sign(&self) -> Option<DriftSign> {
        match self {
            ModelClass::HighlySymmetric => Some(DriftSign::Zero),
            ModelClass::MostlySymmetric { drift_sign, .. } => Some(*drift_sign),
            ModelClass::Unsupported(_) => None,
        }
    }
}

/// Outcome of [`classify`]: the class, the axis permutation taking the model
/// to canonical order, and the canonical model itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub class: ModelClass,
    pub permutation: Vec<usize>,
    pub canonical: WalkModel,
}

impl Classification {
    pub fn is_supported(&self) -> bool {
        !matches!(self.class, ModelClass::Unsupported(_))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "class": self.class.tag(),
            "permutation": self.permutation.iter().map(|p| p + 1).collect::<Vec<_>>(),
            "canonicalModel": self.canonical.to_spec(),
        });
        match &self.class {
            ModelClass::HighlySymmetric => {
                v["driftSign"] = "zero".into();
                v["drift"] = "0".into();
            }
            ModelClass::MostlySymmetric { asymmetric_axis, drift_sign, drift } => {
                v["asymmetricAxis"] = (asymmetric_axis + 1).into();
                v["driftSign"] = serde_json::to_value(drift_sign).unwrap_or_default();
                v["drift"] = exact::rational_string(drift).into();
            }
            ModelClass::Unsupported(reason) => {
                v["reason"] = reason.clone().into();
            }
        }
        v
    }
}

/// Permutation sending `axis` to the last position, others keeping order.
pub fn axis_to_last(d: usize, axis: usize) -> Vec<usize> {
    (0..d).filter(|&k| k != axis).chain(std::iter::once(axis)).collect()
}

pub fn classify(model: &WalkModel) -> Classification {
    let d = model.dimension();
    let symmetric = model.symmetric_axes();
    if symmetric.len() == d {
        return Classification {
            class: ModelClass::HighlySymmetric,
            permutation: (0..d).collect(),
            canonical: model.clone(),
        };
    }
    if symmetric.len() + 1 == d {
        let axis = (0..d).find(|k| !symmetric.contains(k)).expect("one asymmetric axis");
        let permutation = axis_to_last(d, axis);
        let canonical = model.permute_axes(&permutation);
        let drift = canonical.weight_with(d - 1, 1) - canonical.weight_with(d - 1, -1);
        return Classification {
            class: ModelClass::MostlySymmetric {
                asymmetric_axis: axis,
                drift_sign: DriftSign::of(&drift),
                drift,
            },
            permutation,
            canonical,
        };
    }
    let asym: Vec<String> = (0..d)
        .filter(|k| !symmetric.contains(k))
        .map(|k| (k + 1).to_string())
        .collect();
    Classification {
        class: ModelClass::Unsupported(format!(
            "asymmetric over {} axes ({})",
            asym.len(),
            asym.join(", ")
        )),
        permutation: (0..d).collect(),
        canonical: model.clone(),
    }
}

/// S(z) = A(ẑ)/z_d + Q(ẑ) + z_d B(ẑ) for the canonical model, together with
/// the sectional polynomials B_k and forward weights b_k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxisDecomposition {
    /// Model in the axis order the decomposition refers to.
    pub model: WalkModel,
    pub a: LaurentPoly,
    pub q: LaurentPoly,
    pub b: LaurentPoly,
    /// B_k(z_{k̂}) = [z_k] S(z) for k < d-1, in the d-1 variables other than z_k.
    pub sectionals: Vec<LaurentPoly>,
    pub forward_weights: Vec<BigRational>,
}

impl AxisDecomposition {
    pub fn drift(&self) -> BigRational {
        self.b.eval_ones() - self.a.eval_ones()
    }

    /// z̄_d A + Q + z_d B.
    pub fn reassemble(&self) -> LaurentPoly {
        let d = self.model.dimension() - 1;
        let a = self.a.insert_var(d, -1);
        let q = self.q.insert_var(d, 0);
        let b = self.b.insert_var(d, 1);
        &(&a + &q) + &b
    }

    /// S̄(z) = S(z_1, .., z_{d-1}, 1/z_d).
    pub fn s_bar(&self) -> LaurentPoly {
        self.model.char_poly().reflect(self.model.dimension() - 1)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let d = self.model.dimension();
        let names = crate::laurent::default_names(d);
        let hat: Vec<&str> = names[..d - 1].iter().map(String::as_str).collect();
        let sectionals: Vec<String> = self
            .sectionals
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let vars: Vec<&str> = names
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != k)
                    .map(|(_, s)| s.as_str())
                    .collect();
                p.to_canonical_string(&vars)
            })
            .collect();
        serde_json::json!({
            "A": self.a.to_canonical_string(&hat),
            "Q": self.q.to_canonical_string(&hat),
            "B": self.b.to_canonical_string(&hat),
            "sectionals": sectionals,
            "forwardWeights": self.forward_weights.iter().map(exact::rational_string).collect::<Vec<_>>(),
            "drift": exact::rational_string(&self.drift()),
        })
    }
}

/// Decomposes along the canonical asymmetric axis (the last axis for highly
/// symmetric models).
pub fn decompose(model: &WalkModel) -> Result<AxisDecomposition> {
    let c = classify(model);
    match c.class {
        ModelClass::Unsupported(reason) => Err(Error::UnsupportedClass(reason)),
        _ => Ok(decompose_ordered(&c.canonical)),
    }
}

/// Decomposes with `axis` moved to last position. Every other axis must be
/// a symmetry axis, so any axis of a highly symmetric model works.
pub fn decompose_along(model: &WalkModel, axis: usize) -> Result<AxisDecomposition> {
    let d = model.dimension();
    if axis >= d {
        return Err(Error::InvalidModel(format!("axis {} out of range", axis + 1)));
    }
    if let Some(k) = (0..d).find(|&k| k != axis && !model.is_symmetric_over(k)) {
        return Err(Error::UnsupportedClass(format!(
            "axis {} is not a symmetry axis",
            k + 1
        )));
    }
    Ok(decompose_ordered(&model.permute_axes(&axis_to_last(d, axis))))
}

fn decompose_ordered(model: &WalkModel) -> AxisDecomposition {
    let d = model.dimension();
    let s = model.char_poly();
    AxisDecomposition {
        model: model.clone(),
        a: s.section(d - 1, -1),
        q: s.section(d - 1, 0),
        b: s.section(d - 1, 1),
        sectionals: (0..d - 1).map(|k| s.section(k, 1)).collect(),
        forward_weights: model.forward_weights(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn cardinal() -> WalkModel {
        WalkModel::unweighted(2, &[&[0, 1], &[0, -1], &[1, 0], &[-1, 0]]).unwrap()
    }

    fn weighted_zero_drift() -> WalkModel {
        WalkModel::unweighted(2, &[&[0, 1], &[0, 1], &[-1, -1], &[1, -1]]).unwrap()
    }

    fn x_plus_xbar() -> LaurentPoly {
        LaurentPoly::from_terms(1, [(vec![1], rat(1)), (vec![-1], rat(1))])
    }

    #[test]
    fn validation_errors() {
        let missing = WalkModel::unweighted(2, &[&[0, 1], &[0, -1], &[1, 0]]);
        assert_eq!(missing, Err(Error::MissingForwardOrBackwardStep(1)));
        assert!(matches!(
            WalkModel::unweighted(2, &[&[0, 0], &[1, 1], &[-1, -1]]),
            Err(Error::ZeroStep(_))
        ));
        assert!(matches!(
            WalkModel::unweighted(2, &[&[2, 0], &[-1, 0]]),
            Err(Error::EntryOutOfRange(_))
        ));
        assert!(matches!(
            WalkModel::new(1, [(vec![1], rat(1)), (vec![-1], rat(0))]),
            Err(Error::NonPositiveWeight { .. })
        ));
        assert!(matches!(
            WalkModel::unweighted(2, &[&[1], &[-1]]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn duplicates_merge() {
        let m = weighted_zero_drift();
        assert_eq!(m.step_count(), 3);
        assert_eq!(m.weight(&[0, 1]), Some(&rat(2)));
    }

    #[test]
    fn parses_json() {
        let m = WalkModel::from_json(
            r#"{"dimension": 2, "steps": [
                {"vector": [0, 1], "weight": "2"},
                {"vector": [-1, -1], "weight": "1/1"},
                {"vector": [1, -1], "weight": 1}]}"#,
        )
        .unwrap();
        assert_eq!(m, weighted_zero_drift());
        assert!(matches!(WalkModel::from_json("{"), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn char_polys() {
        let s = cardinal().char_poly();
        assert_eq!(s.len(), 4);
        assert_eq!(s.eval_ones(), rat(4));
        let w = weighted_zero_drift().char_poly();
        assert_eq!(w.coeff(&[0, 1]), rat(2));
        assert_eq!(w.coeff(&[-1, -1]), rat(1));
        assert_eq!(w.coeff(&[1, -1]), rat(1));
        assert_eq!(w.eval_ones(), rat(4));
        let m =
            WalkModel::new(2, [(vec![1, 0], rat(3)), (vec![-1, 0], rat(3)), (vec![0, 1], rat(1)), (vec![0, -1], rat(1))])
                .unwrap();
        assert_eq!(m.char_poly().coeff(&[1, 0]), rat(3));
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(&cardinal()).class, ModelClass::HighlySymmetric);
        let pos = WalkModel::unweighted(2, &[&[-1, 1], &[1, 1], &[0, -1]]).unwrap();
        let c = classify(&pos);
        assert_eq!(
            c.class,
            ModelClass::MostlySymmetric {
                asymmetric_axis: 1,
                drift_sign: DriftSign::Positive,
                drift: rat(1)
            }
        );
        let bad = WalkModel::unweighted(2, &[&[1, 0], &[-1, 0], &[0, 1], &[0, -1], &[1, 1]]).unwrap();
        assert!(matches!(classify(&bad).class, ModelClass::Unsupported(_)));
    }

    #[test]
    fn asymmetric_first_axis_is_moved_last() {
        // posdrift model with axes swapped
        let m = WalkModel::unweighted(2, &[&[1, -1], &[1, 1], &[-1, 0]]).unwrap();
        let c = classify(&m);
        assert_eq!(c.permutation, vec![1, 0]);
        assert!(matches!(c.class, ModelClass::MostlySymmetric { asymmetric_axis: 0, .. }));
        assert_eq!(
            c.canonical,
            WalkModel::unweighted(2, &[&[-1, 1], &[1, 1], &[0, -1]]).unwrap()
        );
    }

    #[test]
    fn decomposition_examples() {
        let z = decompose(&weighted_zero_drift()).unwrap();
        assert_eq!(z.a, x_plus_xbar());
        assert!(z.q.is_zero());
        assert_eq!(z.b, LaurentPoly::constant(1, rat(2)));
        assert_eq!(z.forward_weights, vec![rat(1), rat(2)]);
        assert_eq!(z.drift(), rat(0));

        let neg = WalkModel::unweighted(2, &[&[-1, -1], &[1, -1], &[0, 1]]).unwrap();
        let n = decompose(&neg).unwrap();
        assert_eq!(n.a, x_plus_xbar());
        assert_eq!(n.b, LaurentPoly::one(1));
        assert!(n.q.is_zero());
        assert_eq!(n.drift(), rat(-1));

        let c = decompose(&cardinal()).unwrap();
        assert_eq!(c.a, LaurentPoly::one(1));
        assert_eq!(c.b, LaurentPoly::one(1));
        assert_eq!(c.q, x_plus_xbar());
        assert_eq!(c.forward_weights, vec![rat(1), rat(1)]);
        // B_1(y) = [x]S = 1 for the cardinal model
        assert_eq!(c.sectionals, vec![LaurentPoly::one(1)]);
    }

    #[test]
    fn decompose_rejects_unsupported() {
        let bad = WalkModel::unweighted(2, &[&[1, 0], &[-1, 0], &[0, 1], &[0, -1], &[1, 1]]).unwrap();
        assert!(matches!(decompose(&bad), Err(Error::UnsupportedClass(_))));
    }

    #[test]
    fn highly_symmetric_any_axis_gives_a_equal_b() {
        let m = cardinal();
        for axis in 0..2 {
            let dec = decompose_along(&m, axis).unwrap();
            assert_eq!(dec.a, dec.b);
            assert_eq!(dec.reassemble(), dec.model.char_poly());
        }
    }

    #[test]
    fn fingerprint_is_stable() {
        let a = weighted_zero_drift();
        let b = WalkModel::new(2, [(vec![1, -1], rat(1)), (vec![0, 1], rat(2)), (vec![-1, -1], rat(1))]).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint().len(), 64);
    }
}

//! Built-in example models with their known asymptotic constants.

use serde_json::json;

use crate::model::WalkModel;

/// A reference value for one quantity of a corpus model.
#[derive(Clone, Debug, PartialEq)]
pub struct Expected {
    /// "base", "order", "c0", "c0[even]", "kappa", ...
    pub quantity: &'static str,
    pub exact: &'static str,
    pub value: f64,
    /// Where the value comes from.
    pub citation: &'static str,
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub dimension: usize,
    steps: &'static [&'static [i64]],
    pub expected: Vec<Expected>,
    /// Tolerance profile used by `verify` for this entry.
    pub profile: &'static str,
}

impl CorpusEntry {
    pub fn model(&self) -> WalkModel {
        WalkModel::unweighted(self.dimension, self.steps).expect("corpus models are valid")
    }

    /// Default verification depth: 400 in two dimensions, 80 in three.
    pub fn default_max_n(&self) -> usize {
        if self.dimension <= 2 {
            400
        } else {
            80
        }
    }

    pub fn expected(&self, quantity: &str) -> Option<&Expected> {
        self.expected.iter().find(|e| e.quantity == quantity)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "name": self.name,
            "summary": self.summary,
            "dimension": self.dimension,
            "model": self.model().to_spec(),
            "profile": self.profile,
            "defaultMaxN": self.default_max_n(),
            "expected": self.expected.iter().map(|e| json!({
                "quantity": e.quantity,
                "exact": e.exact,
                "value": e.value,
                "citation": e.citation,
            })).collect::<Vec<_>>(),
        })
    }
}

fn e(quantity: &'static str, exact: &'static str, value: f64, citation: &'static str) -> Expected {
    Expected { quantity, exact, value, citation }
}

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const PI: f64 = std::f64::consts::PI;

/// The six reference models, in a fixed order.
pub fn corpus() -> Vec<CorpusEntry> {
    let cardinal = "cardinal-direction walks: (S/pi)^(d/2) / sqrt(prod b)";
    let negdrift = "negative drift with Q = 0: rho-point and (-rho)-point constants combined by parity";
    let posdrift = "positive drift: simple pole contribution";
    let weighted = "weighted zero-drift walks: leading and second-order constants";
    let three_d = "three-dimensional zero-drift models: leading constant and second-order coefficient";
    vec![
        CorpusEntry {
            name: "cardinal-2d",
            summary: "steps N, S, E, W",
            dimension: 2,
            steps: &[&[0, 1], &[0, -1], &[1, 0], &[-1, 0]],
            expected: vec![
                e("base", "4", 4.0, cardinal),
                e("order", "1", 1.0, cardinal),
                e("c0", "4/pi", 4.0 / PI, cardinal),
                e("kappa", "0", 0.0, "highly symmetric models expand in integer powers of 1/n"),
            ],
            profile: "default",
        },
        CorpusEntry {
            name: "negdrift-2d",
            summary: "steps SW, SE, N",
            dimension: 2,
            steps: &[&[-1, -1], &[1, -1], &[0, 1]],
            expected: vec![
                e("period", "2", 2.0, negdrift),
                e("base", "2*sqrt(2)", 2.0 * SQRT_2, negdrift),
                e("order", "2", 2.0, negdrift),
                e("c0[even]", "24*sqrt(2)/pi", 24.0 * SQRT_2 / PI, negdrift),
                e("c0[odd]", "32/pi", 32.0 / PI, negdrift),
            ],
            profile: "default",
        },
        CorpusEntry {
            name: "posdrift-2d",
            summary: "steps NW, NE, S",
            dimension: 2,
            steps: &[&[-1, 1], &[1, 1], &[0, -1]],
            expected: vec![
                e("base", "3", 3.0, posdrift),
                e("order", "1/2", 0.5, posdrift),
                e("c0", "sqrt(3)/(2*sqrt(pi))", 3f64.sqrt() / (2.0 * PI.sqrt()), posdrift),
            ],
            profile: "default",
        },
        CorpusEntry {
            name: "zerodrift-2d-weighted",
            summary: "steps N (weight 2), SW, SE",
            dimension: 2,
            steps: &[&[0, 1], &[0, 1], &[-1, -1], &[1, -1]],
            expected: vec![
                e("base", "4", 4.0, weighted),
                e("order", "1", 1.0, weighted),
                e("c0", "2*sqrt(2)/pi", 2.0 * SQRT_2 / PI, weighted),
                e("kappa", "1/sqrt(pi)", 1.0 / PI.sqrt(), weighted),
            ],
            profile: "default",
        },
        CorpusEntry {
            name: "zerodrift-3d-a",
            summary: "steps (±1,0,-1), (0,±1,-1), (±1,±1,1)",
            dimension: 3,
            steps: &[
                &[1, 0, -1],
                &[-1, 0, -1],
                &[0, 1, -1],
                &[0, -1, -1],
                &[1, 1, 1],
                &[-1, 1, 1],
                &[1, -1, 1],
                &[-1, -1, 1],
            ],
            expected: vec![
                e("base", "8", 8.0, three_d),
                e("order", "3/2", 1.5, three_d),
                e("c0", "8*sqrt(2)/(3*pi^(3/2))", 8.0 * SQRT_2 / (3.0 * PI.powf(1.5)), three_d),
                e("kappa", "-8/(9*pi)", -8.0 / (9.0 * PI), three_d),
            ],
            profile: "loose",
        },
        CorpusEntry {
            name: "zerodrift-3d-b",
            summary: "steps (±1,0,1), (0,±1,-1)",
            dimension: 3,
            steps: &[&[1, 0, 1], &[-1, 0, 1], &[0, 1, -1], &[0, -1, -1]],
            expected: vec![
                e("base", "4", 4.0, three_d),
                e("order", "3/2", 1.5, three_d),
                e("c0", "4*sqrt(2)/pi^(3/2)", 4.0 * SQRT_2 / PI.powf(1.5), three_d),
                e("kappa", "0", 0.0, three_d),
            ],
            profile: "loose",
        },
    ]
}

pub fn entry(name: &str) -> Option<CorpusEntry> {
    corpus().into_iter().find(|e| e.name == name)
}

//! Shared helpers for the integration tests: a path-string oracle and a
//! seeded generator of random valid models.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use orthwalk::model::WalkModel;
use rand::seq::SliceRandom;
use rand::Rng;

/// Weighted number of step strings of length n that stay in the orthant,
/// for n = 0..=max_n, by depth-first search over the strings. Weights are
/// scaled to integers by their common denominator D and the totals divided
/// by D^n at the end.
pub fn brute_force_counts(model: &WalkModel, max_n: usize) -> Vec<BigRational> {
    let denom = model.steps().fold(BigInt::one(), |acc, (_, w)| acc.lcm(w.denom()));
    let steps: Vec<(Vec<i64>, u128)> = model
        .steps()
        .map(|(s, w)| {
            let scaled = (w * BigRational::from_integer(denom.clone())).to_integer();
            (s.iter().map(|&v| v as i64).collect(), scaled.to_u128().expect("small weight"))
        })
        .collect();
    let mut totals = vec![0u128; max_n + 1];
    let mut pos = vec![0i64; model.dimension()];
    dfs(&steps, &mut pos, 1, 0, max_n, &mut totals);
    let mut scale = BigInt::one();
    totals
        .into_iter()
        .map(|t| {
            let v = BigRational::new(BigInt::from(t), scale.clone());
            scale *= &denom;
            v
        })
        .collect()
}

fn dfs(steps: &[(Vec<i64>, u128)], pos: &mut [i64], weight: u128, depth: usize, max_n: usize, totals: &mut [u128]) {
    totals[depth] += weight;
    if depth == max_n {
        return;
    }
    for (s, w) in steps {
        if pos.iter().zip(s).any(|(p, v)| p + v < 0) {
            continue;
        }
        for (p, v) in pos.iter_mut().zip(s) {
            *p += v;
        }
        dfs(steps, pos, weight * w, depth + 1, max_n, totals);
        for (p, v) in pos.iter_mut().zip(s) {
            *p -= v;
        }
    }
}

/// Kind of random model to draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    HighlySymmetric,
    /// Symmetric over every axis but the last.
    MostlySymmetric,
    /// No symmetry imposed.
    Arbitrary,
}

fn random_weight(rng: &mut impl Rng) -> BigRational {
    let choices = [(1, 1), (2, 1), (1, 2), (3, 1), (2, 3)];
    let (n, d) = choices[rng.gen_range(0..choices.len())];
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A valid model with at most `max_steps` steps; symmetric axes get their
/// reflection orbits with a shared weight.
pub fn random_model(rng: &mut impl Rng, d: usize, shape: Shape, max_steps: usize) -> WalkModel {
    let symmetric: Vec<usize> = match shape {
        Shape::HighlySymmetric => (0..d).collect(),
        Shape::MostlySymmetric => (0..d - 1).collect(),
        Shape::Arbitrary => Vec::new(),
    };
    let mut all: Vec<Vec<i64>> = Vec::new();
    for code in 0..3usize.pow(d as u32) {
        let v: Vec<i64> = (0..d).map(|k| (code / 3usize.pow(k as u32) % 3) as i64 - 1).collect();
        if v.iter().any(|&x| x != 0) {
            all.push(v);
        }
    }
    loop {
        all.shuffle(rng);
        let mut steps: Vec<(Vec<i64>, BigRational)> = Vec::new();
        for seed in &all {
            if steps.iter().any(|(s, _)| s == seed) {
                continue;
            }
            let mut orbit = vec![seed.clone()];
            for &k in &symmetric {
                let reflected: Vec<Vec<i64>> = orbit
                    .iter()
                    .map(|v| {
                        let mut r = v.clone();
                        r[k] = -r[k];
                        r
                    })
                    .collect();
                for r in reflected {
                    if !orbit.contains(&r) {
                        orbit.push(r);
                    }
                }
            }
            if steps.len() + orbit.len() > max_steps {
                continue;
            }
            let w = random_weight(rng);
            steps.extend(orbit.into_iter().map(|v| (v, w.clone())));
            if rng.gen_bool(0.35) {
                break;
            }
        }
        if let Ok(m) = WalkModel::new(d, steps) {
            return m;
        }
    }
}

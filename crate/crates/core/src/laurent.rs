//! Sparse multivariate Laurent polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::exact::{self, GaussianRational};

/// Exponent vector of a monomial.
pub type Exponent = Vec<i32>;

/// Map from exponent vector to non-zero rational coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    vars: usize,
    terms: BTreeMap<Exponent, BigRational>,
}

impl LaurentPoly {
    pub fn zero(vars: usize) -> Self {
        LaurentPoly { vars, terms: BTreeMap::new() }
    }

    pub fn one(vars: usize) -> Self {
        Self::constant(vars, BigRational::one())
    }

    pub fn constant(vars: usize, c: BigRational) -> Self {
        Self::monomial(vec![0; vars], c)
    }

    pub fn monomial(exponent: Exponent, coeff: BigRational) -> Self {
        let mut p = Self::zero(exponent.len());
        p.add_term(exponent, coeff);
        p
    }

    /// The single variable `z_index`.
    pub fn variable(vars: usize, index: usize) -> Self {
        let mut e = vec![0; vars];
        e[index] = 1;
        Self::monomial(e, BigRational::one())
    }

    pub fn from_terms(vars: usize, terms: impl IntoIterator<Item = (Exponent, BigRational)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exponent: &[i32]) -> BigRational {
        self.terms.get(exponent).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff(&vec![0; self.vars])
    }

    /// Adds `coeff * z^exponent`, dropping the term if it cancels.
    pub fn add_term(&mut self, exponent: Exponent, coeff: BigRational) {
        assert_eq!(exponent.len(), self.vars, "exponent length mismatch");
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exponent) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars);
        }
        LaurentPoly {
            vars: self.vars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Multiplies by the monomial z^shift.
    pub fn shift(&self, shift: &[i32]) -> Self {
        assert_eq!(shift.len(), self.vars);
        LaurentPoly {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), v.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.vars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Value at the all-ones point: the sum of all coefficients.
    pub fn eval_ones(&self) -> BigRational {
        self.terms.values().fold(BigRational::zero(), |acc, c| acc + c)
    }

    /// Exact value at a point with Gaussian-rational coordinates (non-zero
    /// wherever a negative exponent occurs).
    pub fn eval_exact(&self, point: &[GaussianRational]) -> GaussianRational {
        assert_eq!(point.len(), self.vars);
        let mut acc = exact::gauss_int(0, 0);
        for (e, c) in &self.terms {
            let mut m = exact::gauss(c.clone(), BigRational::zero());
            for (z, &k) in point.iter().zip(e) {
                if k != 0 {
                    m = m * exact::gauss_pow(z, k);
                }
            }
            acc = acc + m;
        }
        acc
    }

    /// Exact value at a real rational point.
    pub fn eval_rational(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.vars);
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (z, &k) in point.iter().zip(e) {
                if k > 0 {
                    m *= num_traits::pow(z.clone(), k as usize);
                } else if k < 0 {
                    m /= num_traits::pow(z.clone(), (-k) as usize);
                }
            }
            acc += m;
        }
        acc
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.vars);
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = Complex64::new(exact::to_f64(c), 0.0);
            for (z, &k) in point.iter().zip(e) {
                if k != 0 {
                    m *= z.powi(k);
                }
            }
            acc += m;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.vars);
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut m = exact::to_f64(c);
                for (z, &k) in point.iter().zip(e) {
                    if k != 0 {
                        m *= z.powi(k);
                    }
                }
                m
            })
            .sum()
    }

    /// Substitutes z_var -> 1/z_var.
    pub fn reflect(&self, var: usize) -> Self {
        self.map_exponents(self.vars, |e| {
            let mut e = e.to_vec();
            e[var] = -e[var];
            e
        })
    }

    /// Reorders variables: new variable `i` is old variable `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.vars);
        self.map_exponents(self.vars, |e| perm.iter().map(|&p| e[p]).collect())
    }

    /// Coefficient of z_var^power, as a polynomial in the remaining variables.
    pub fn section(&self, var: usize, power: i32) -> Self {
        let mut out = Self::zero(self.vars - 1);
        for (e, c) in &self.terms {
            if e[var] == power {
                let mut rest = e.clone();
                rest.remove(var);
                out.add_term(rest, c.clone());
            }
        }
        out
    }

    /// Inserts a new variable at position `var` carrying exponent `power` in
    /// every term (inverse of [`section`](Self::section) for one slice).
    pub fn insert_var(&self, var: usize, power: i32) -> Self {
        self.map_exponents(self.vars + 1, |e| {
            let mut e = e.to_vec();
            e.insert(var, power);
            e
        })
    }

    fn map_exponents(&self, vars: usize, f: impl Fn(&[i32]) -> Exponent) -> Self {
        let mut out = Self::zero(vars);
        for (e, c) in &self.terms {
            out.add_term(f(e), c.clone());
        }
        out
    }

    /// Keeps only the terms with every exponent at most `cap`.
    pub fn truncate(&self, cap: i32) -> Self {
        LaurentPoly {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().all(|&k| k <= cap))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Product truncated to per-variable degree `cap`, without forming the
    /// discarded terms' coefficients twice.
    pub fn mul_truncated(&self, other: &Self, cap: i32) -> Self {
        assert_eq!(self.vars, other.vars);
        let mut out = Self::zero(self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                if e.iter().all(|&k| k <= cap) {
                    out.add_term(e, ca * cb);
                }
            }
        }
        out
    }

    /// All exponents non-negative.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k >= 0))
    }

    pub fn max_degree(&self, var: usize) -> i32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn min_degree(&self, var: usize) -> i32 {
        self.terms.keys().map(|e| e[var]).min().unwrap_or(0)
    }

    /// Canonical text: graded order (ascending total degree, then descending
    /// lexicographic), exact coefficients, `*`-joined monomials.
    pub fn to_canonical_string(&self, names: &[&str]) -> String {
        assert_eq!(names.len(), self.vars);
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|(a, _), (b, _)| {
            let da: i32 = a.iter().sum();
            let db: i32 = b.iter().sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        let mut out = String::new();
        for (i, (e, c)) in ordered.into_iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mono = monomial_string(e, names);
            match (mono.is_empty(), mag.is_one()) {
                (true, _) => out.push_str(&exact::rational_string(&mag)),
                (false, true) => out.push_str(&mono),
                (false, false) => {
                    let _ = write!(out, "{}*{}", exact::rational_string(&mag), mono);
                }
            }
        }
        out
    }
}

fn monomial_string(e: &[i32], names: &[&str]) -> String {
    let parts: Vec<String> = e
        .iter()
        .zip(names)
        .filter(|(k, _)| **k != 0)
        .map(|(&k, n)| if k == 1 { n.to_string() } else { format!("{n}^{k}") })
        .collect();
    parts.join("*")
}

/// Default variable names: x, y, z for up to three variables, z1..zd beyond.
pub fn default_names(vars: usize) -> Vec<String> {
    if vars <= 3 {
        ["x", "y", "z"][..vars].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=vars).map(|i| format!("z{i}")).collect()
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.vars, rhs.vars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.vars, rhs.vars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.vars, rhs.vars);
        let mut out = LaurentPoly::zero(self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea.iter().zip(eb).map(|(a, b)| a + b).collect(), ca * cb);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(&-BigRational::one())
    }
}

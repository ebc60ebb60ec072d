//! Exact constants of the form (a + b√m) · sqrt(root) · π^(-k/2), where
//! a, b are rationals, m is square-free and `root` lies in Q(√m).

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::exact::{self, rat};

/// a + b√m with m square-free; m = 1 means the value is the rational a.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quad {
    pub a: BigRational,
    pub b: BigRational,
    pub m: BigUint,
}

impl Quad {
    pub fn rational(a: BigRational) -> Self {
        Quad { a, b: BigRational::zero(), m: BigUint::one() }
    }

    /// sqrt(q) for rational q >= 0.
    pub fn sqrt_of(q: &BigRational) -> Option<Self> {
        let (c, r) = exact::sqrt_rational(q)?;
        Some(Quad { a: BigRational::zero(), b: c, m: r }.normalized())
    }

    fn normalized(mut self) -> Self {
        if self.m.is_one() {
            self.a += &self.b;
            self.b = BigRational::zero();
        }
        if self.b.is_zero() {
            self.m = BigUint::one();
        }
        self
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Common radicand of two operands, if they live in the same field.
    fn field(&self, other: &Self) -> Option<BigUint> {
        match (self.is_rational(), other.is_rational()) {
            (true, _) => Some(other.m.clone()),
            (_, true) => Some(self.m.clone()),
            _ if self.m == other.m => Some(self.m.clone()),
            _ => None,
        }
    }

    pub fn add(&self, other: &Self) -> Option<Self> {
        let m = self.field(other)?;
        Some(Quad { a: &self.a + &other.a, b: &self.b + &other.b, m }.normalized())
    }

    pub fn neg(&self) -> Self {
        Quad { a: -&self.a, b: -&self.b, m: self.m.clone() }
    }

    pub fn sub(&self, other: &Self) -> Option<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Option<Self> {
        if self.is_rational() || other.is_rational() || self.m == other.m {
            let m = self.field(other)?;
            let mr = BigRational::from_integer(BigInt::from(m.clone()));
            let a = &self.a * &other.a + &self.b * &other.b * &mr;
            let b = &self.a * &other.b + &self.b * &other.a;
            return Some(Quad { a, b, m }.normalized());
        }
        // Two pure surds with different radicands still multiply exactly.
        if self.a.is_zero() && other.a.is_zero() {
            let (root, rest) = exact::square_part(&(&self.m * &other.m));
            let coeff = &self.b * &other.b * BigRational::from_integer(BigInt::from(root));
            return Some(Quad { a: BigRational::zero(), b: coeff, m: rest }.normalized());
        }
        None
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Quad { a: &self.a * q, b: &self.b * q, m: self.m.clone() }.normalized()
    }

    /// (a + b√m)(a - b√m) = a² - m b².
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(BigInt::from(self.m.clone()))
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        Some(Quad { a: &self.a / &n, b: -&self.b / &n, m: self.m.clone() }.normalized())
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        self.mul(&other.inv()?)
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut acc = Quad::rational(rat(1));
        for _ in 0..k {
            acc = acc.mul(self).expect("same field");
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        exact::to_f64(&self.a) + exact::to_f64(&self.b) * exact::to_f64(&BigRational::from_integer(self.m.clone().into())).sqrt()
    }

    pub fn is_positive(&self) -> bool {
        // Sign of a + b√m decided exactly by comparing squares.
        let sa = self.a.signum();
        let sb = self.b.signum();
        if sb.is_zero() {
            return sa.is_positive();
        }
        if sa.is_zero() || sa == sb {
            return sb.is_positive();
        }
        let a2 = &self.a * &self.a;
        let mb2 = &self.b * &self.b * BigRational::from_integer(BigInt::from(self.m.clone()));
        if sa.is_positive() {
            a2 > mb2
        } else {
            mb2 > a2
        }
    }

    /// Exact square root inside Q(√m), when one exists.
    pub fn sqrt(&self) -> Option<Self> {
        if !self.is_positive() {
            return if self.is_zero() { Some(self.clone()) } else { None };
        }
        if self.is_rational() {
            return Quad::sqrt_of(&self.a);
        }
        // (p + q√m)² = p² + m q² + 2pq√m.
        let disc = exact::exact_sqrt(&self.norm())?;
        let two = rat(2);
        for p2 in [(&self.a + &disc) / &two, (&self.a - &disc) / &two] {
            if p2.is_positive() {
                if let Some(p) = exact::exact_sqrt(&p2) {
                    let q = &self.b / (&p * &two);
                    let cand = Quad { a: p, b: q, m: self.m.clone() };
                    if cand.mul(&cand).as_ref() == Some(self) && cand.is_positive() {
                        return Some(cand);
                    }
                }
            }
        }
        None
    }
}

/// Numerator text and positive integer denominator of a Quad, e.g.
/// ("16 + 12*sqrt(2)", 1) or ("sqrt(3)", 2).
fn quad_parts(q: &Quad) -> (String, BigInt, bool) {
    let den = q.a.denom().clone() * q.b.denom() / num_integer::Integer::gcd(q.a.denom(), q.b.denom());
    let a = (&q.a * BigRational::from_integer(den.clone())).to_integer();
    let b = (&q.b * BigRational::from_integer(den.clone())).to_integer();
    let surd = |c: &BigInt| -> String {
        if c.is_one() {
            format!("sqrt({})", q.m)
        } else if *c == -BigInt::one() {
            format!("-sqrt({})", q.m)
        } else {
            format!("{c}*sqrt({})", q.m)
        }
    };
    if b.is_zero() {
        return (a.to_string(), den, false);
    }
    if a.is_zero() {
        return (surd(&b), den, false);
    }
    let sign = if b.is_negative() { "-" } else { "+" };
    (format!("{a} {sign} {}", surd(&b.abs())), den, true)
}

fn quad_string(q: &Quad) -> String {
    let (num, den, compound) = quad_parts(q);
    if den.is_one() {
        num
    } else if compound {
        format!("({num})/{den}")
    } else {
        format!("{num}/{den}")
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&quad_string(self))
    }
}

/// factor · sqrt(root) · π^(-pi_half_power / 2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactConstant {
    pub factor: Quad,
    /// None means 1. Kept only when it has no square root in its field.
    pub root: Option<Quad>,
    pub pi_half_power: u32,
}

impl ExactConstant {
    pub fn new(factor: Quad, root: Option<Quad>, pi_half_power: u32) -> Self {
        let mut c = ExactConstant { factor, root, pi_half_power };
        if let Some(r) = c.root.take() {
            match r.sqrt() {
                Some(s) => match c.factor.mul(&s) {
                    Some(f) => c.factor = f,
                    None => c.root = Some(r),
                },
                None => c.root = Some(r),
            }
        }
        c
    }

    pub fn rational(q: BigRational) -> Self {
        ExactConstant { factor: Quad::rational(q), root: None, pi_half_power: 0 }
    }

    pub fn to_f64(&self) -> f64 {
        let root = self.root.as_ref().map_or(1.0, |r| r.to_f64().sqrt());
        self.factor.to_f64() * root / std::f64::consts::PI.powf(self.pi_half_power as f64 / 2.0)
    }

    /// Sum of two constants sharing the same sqrt and π parts.
    pub fn add(&self, other: &Self) -> Option<Self> {
        if self.root != other.root || self.pi_half_power != other.pi_half_power {
            return None;
        }
        Some(ExactConstant { factor: self.factor.add(&other.factor)?, ..self.clone() })
    }

    pub fn sub(&self, other: &Self) -> Option<Self> {
        self.add(&ExactConstant { factor: other.factor.neg(), ..other.clone() })
    }

    pub fn is_zero(&self) -> bool {
        self.factor.is_zero()
    }
}

impl fmt::Display for ExactConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factor.is_zero() {
            return f.write_str("0");
        }
        let (fnum, den, compound) = quad_parts(&self.factor);
        let mut num = match (&self.root, fnum.as_str()) {
            (None, _) => fnum.clone(),
            (Some(r), "1") => format!("sqrt({})", quad_string(r)),
            (Some(r), "-1") => format!("-sqrt({})", quad_string(r)),
            (Some(r), _) if compound => format!("({fnum})*sqrt({})", quad_string(r)),
            (Some(r), _) => format!("{fnum}*sqrt({})", quad_string(r)),
        };
        let mut den_parts = Vec::new();
        if !den.is_one() {
            den_parts.push(den.to_string());
        }
        match self.pi_half_power {
            0 => {}
            1 => den_parts.push("sqrt(pi)".into()),
            2 => den_parts.push("pi".into()),
            k if k % 2 == 0 => den_parts.push(format!("pi^{}", k / 2)),
            k => den_parts.push(format!("pi^({k}/2)")),
        }
        if den_parts.is_empty() {
            return f.write_str(&num);
        }
        if compound && self.root.is_none() {
            num = format!("({num})");
        }
        if den_parts.len() == 1 {
            write!(f, "{num}/{}", den_parts[0])
        } else {
            write!(f, "{num}/({})", den_parts.join("*"))
        }
    }
}

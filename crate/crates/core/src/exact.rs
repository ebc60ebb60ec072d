//! Exact arithmetic helpers shared across modules: rational parsing and
//! printing, Gaussian rationals, logarithms of big integers, and square-root
//! extraction for rationals.

use num_bigint::{BigInt, BigUint, Sign};
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Complex number with exact rational parts.
pub type GaussianRational = Complex<BigRational>;

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses "3", "-2/5", "0.125" or "1e-3" into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || Error::InvalidWeight(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let joined = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(joined.parse::<BigInt>().map_err(|_| bad())?);
    let shift = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    if shift >= 0 {
        value *= scale;
    } else {
        value /= scale;
    }
    Ok(if negative { -value } else { value })
}

/// "p/q" with a denominator always printed, as used by the sequence export.
pub fn fraction_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// "p" for integers, "p/q" otherwise.
pub fn rational_string(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        fraction_string(q)
    }
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| (ln_rational(q)).exp())
}

/// Natural logarithm of a positive big integer without overflowing f64.
pub fn ln_bigint(n: &BigInt) -> f64 {
    match n.sign() {
        Sign::Minus => f64::NAN,
        Sign::NoSign => f64::NEG_INFINITY,
        Sign::Plus => ln_biguint(n.magnitude()),
    }
}

fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().map(f64::ln).unwrap_or(f64::NAN);
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_rational(q: &BigRational) -> f64 {
    if q.is_zero() {
        return f64::NEG_INFINITY;
    }
    if q.is_negative() {
        return f64::NAN;
    }
    ln_bigint(q.numer()) - ln_bigint(q.denom())
}

pub fn gauss(re: BigRational, im: BigRational) -> GaussianRational {
    Complex::new(re, im)
}

pub fn gauss_int(re: i64, im: i64) -> GaussianRational {
    Complex::new(rat(re), rat(im))
}

pub fn gauss_norm_sqr(z: &GaussianRational) -> BigRational {
    &z.re * &z.re + &z.im * &z.im
}

pub fn gauss_is_zero(z: &GaussianRational) -> bool {
    z.re.is_zero() && z.im.is_zero()
}

pub fn gauss_inv(z: &GaussianRational) -> GaussianRational {
    let n = gauss_norm_sqr(z);
    Complex::new(&z.re / &n, -&z.im / &n)
}

/// Integer power; negative exponents go through the exact inverse.
pub fn gauss_pow(z: &GaussianRational, e: i32) -> GaussianRational {
    let base = if e < 0 { gauss_inv(z) } else { z.clone() };
    let mut acc = gauss_int(1, 0);
    for _ in 0..e.unsigned_abs() {
        acc = acc * base.clone();
    }
    acc
}

pub fn gauss_to_c64(z: &GaussianRational) -> Complex<f64> {
    Complex::new(to_f64(&z.re), to_f64(&z.im))
}

pub fn gauss_string(z: &GaussianRational) -> String {
    match (z.re.is_zero(), z.im.is_zero()) {
        (_, true) => rational_string(&z.re),
        (true, false) => imaginary_string(&z.im),
        (false, false) => {
            let sign = if z.im.is_negative() { "-" } else { "+" };
            format!("{} {} {}", rational_string(&z.re), sign, imaginary_string(&z.im.abs()))
        }
    }
}

fn imaginary_string(im: &BigRational) -> String {
    if im.is_one() {
        "i".into()
    } else if *im == -BigRational::one() {
        "-i".into()
    } else {
        format!("{}*i", rational_string(im))
    }
}

/// Splits a positive integer as `square_root^2 * rest`, pulling out every
/// square factor of a prime below `TRIAL_LIMIT` and a final perfect square.
pub fn square_part(n: &BigUint) -> (BigUint, BigUint) {
    const TRIAL_LIMIT: u64 = 100_000;
    let mut rest = n.clone();
    let mut root = BigUint::one();
    if rest.is_zero() {
        return (BigUint::zero(), BigUint::zero());
    }
    let mut p = 2u64;
    while p < TRIAL_LIMIT {
        let pb = BigUint::from(p);
        let p2 = &pb * &pb;
        if p2 > rest {
            break;
        }
        while (&rest % &p2).is_zero() {
            rest /= &p2;
            root *= &pb;
        }
        p +=if p == 2 { 1 } else { 2 };
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        root *= r;
        rest = BigUint::one();
    }
    (root, rest)
}

/// Writes sqrt(q) for rational q >= 0 as `coefficient * sqrt(radicand)` with
/// rational coefficient and integer radicand (square-free up to the trial
/// division bound). `None` for negative q.
pub fn sqrt_rational(q: &BigRational) -> Option<(BigRational, BigUint)> {
    if q.is_negative() {
        return None;
    }
    if q.is_zero() {
        return Some((BigRational::zero(), BigUint::one()));
    }
    // sqrt(p/d) = sqrt(p*d)/d
    let p = q.numer().magnitude() * q.denom().magnitude();
    let (root, rest) = square_part(&p);
    let coeff = BigRational::new(BigInt::from(root), q.denom().clone());
    Some((coeff, rest))
}

/// Exact square root of a rational if it is a perfect square.
pub fn exact_sqrt(q: &BigRational) -> Option<BigRational> {
    match sqrt_rational(q) {
        Some((c, r)) if r.is_one() => Some(c),
        _ => None,
    }
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

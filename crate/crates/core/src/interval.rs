//! Fixed-point complex enclosures of cyclotomic integers.
//!
//! Values are carried as integers scaled by `2^bits`; every rounding step
//! is charged to an explicit error bound counted in units of `2^-bits`.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{Signed, ToPrimitive, Zero};

/// Enclosure `{(x, y) : |x - re|, |y - im| <= rad}` with all three scaled by `2^bits`.
#[derive(Clone, Debug)]
pub struct ComplexInterval {
    bits: u32,
    re: BigInt,
    im: BigInt,
    rad: BigUint,
}

fn to_f64_scaled(x: &BigInt, bits: u32) -> f64 {
    let shift = bits.saturating_sub(60);
    let top = (x >> shift).to_f64().unwrap_or(f64::NAN);
    top * 2f64.powi(shift as i32 - bits as i32)
}

fn to_decimal(x: &BigInt, bits: u32, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let num: BigInt = x.abs() * &scale;
    let half = BigInt::from(1) << (bits.max(1) - 1);
    let v: BigInt = (num + half) >> bits;
    let (int, frac) = num_integer::Integer::div_rem(&v, &scale);
    let sign = if x.sign() == Sign::Minus && !v.is_zero() { "-" } else { "" };
    format!("{sign}{int}.{:0>width$}", frac.to_string(), width = digits as usize)
}

impl ComplexInterval {
    pub fn re_f64(&self) -> f64 {
        to_f64_scaled(&self.re, self.bits)
    }

    pub fn im_f64(&self) -> f64 {
        to_f64_scaled(&self.im, self.bits)
    }

    pub fn radius_f64(&self) -> f64 {
        to_f64_scaled(&BigInt::from(self.rad.clone()), self.bits)
    }

    /// Whether the rectangle contains the given point.
    pub fn contains(&self, re: f64, im: f64) -> bool {
        let slack = self.radius_f64() + f64::EPSILON * (re.abs() + im.abs() + 1.0);
        (self.re_f64() - re).abs() <= slack && (self.im_f64() - im).abs() <= slack
    }

    /// Whether the enclosure certainly excludes the origin.
    pub fn excludes_zero(&self) -> bool {
        let rad = BigInt::from(self.rad.clone());
        self.re.abs() > rad || self.im.abs() > rad
    }

    /// Decimal rendering `(re, im, radius)` with `digits` fractional digits.
    pub fn to_decimal(&self, digits: u32) -> (String, String, String) {
        (
            to_decimal(&self.re, self.bits, digits),
            to_decimal(&self.im, self.bits, digits),
            to_decimal(&BigInt::from(self.rad.clone()), self.bits, digits),
        )
    }
}

/// `atan(1/x)` scaled by `2^bits`, and the number of series terms used.
fn atan_inv(x: u64, bits: u32) -> (BigInt, u64) {
    let one = BigInt::from(1) << bits;
    let x2 = BigInt::from(x * x);
    let mut power = &one / x;
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !power.is_zero() {
        let term = &power / (2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power = &power / &x2;
        k += 1;
    }
    (sum, k)
}

/// π scaled by `2^bits` with its error bound in ulps (Machin's formula).
fn pi_fixed(bits: u32) -> (BigInt, u64) {
    let (a, ka) = atan_inv(5, bits);
    let (b, kb) = atan_inv(239, bits);
    (a * 16 - b * 4, 16 * 2 * (ka + 1) + 4 * 2 * (kb + 1))
}

/// `(cos θ, sin θ)` scaled by `2^bits` for `θ = theta / 2^bits`, `|θ| <= 7`.
fn cos_sin(theta: &BigInt, bits: u32) -> (BigInt, BigInt, u64) {
    let one = BigInt::from(1) << bits;
    let mut term = one.clone();
    let mut c = BigInt::zero();
    let mut s = BigInt::zero();
    let mut n = 0u64;
    loop {
        match n % 4 {
            0 => c += &term,
            1 => s += &term,
            2 => c -= &term,
            _ => s -= &term,
        }
        n += 1;
        term = (&term * theta >> bits) / n;
        if term.is_zero() && n > 8 {
            break;
        }
    }
    (c, s, 4 * n + 4)
}

/// Enclosure of `Σ coeffs[k] ζ_m^k` at `precision` decimal digits.
pub(crate) fn embed(m: u64, coeffs: &[BigInt], precision: u32) -> ComplexInterval {
    let bits = (precision as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 64;
    if coeffs.iter().all(Zero::is_zero) {
        return ComplexInterval {
            bits,
            re: BigInt::zero(),
            im: BigInt::zero(),
            rad: BigUint::zero(),
        };
    }
    let (pi, pi_err) = pi_fixed(bits);
    let theta = (pi * 2) / m;
    // The angle error is amplified by at most 2 through cos/sin.
    let (c1, s1, trig_err) = cos_sin(&theta, bits);
    let step_err = 2 * (2 * pi_err / m + 1) + trig_err + 4;
    let mut re = BigInt::zero();
    let mut im = BigInt::zero();
    let mut rad = BigUint::zero();
    let mut zr = BigInt::from(1) << bits;
    let mut zi = BigInt::zero();
    for (k, c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            re += c * &zr;
            im += c * &zi;
            let err_k = BigUint::from((k as u64 + 1) * (step_err + 8));
            rad += c.magnitude() * err_k;
        }
        let nr = (&zr * &c1 - &zi * &s1) >> bits;
        let ni = (&zr * &s1 + &zi * &c1) >> bits;
        zr = nr;
        zi = ni;
    }
    ComplexInterval { bits, re, im, rad: rad + 1u32 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eighth_root() {
        let ci = embed(8, &[BigInt::from(0), BigInt::from(1), BigInt::from(0), BigInt::from(0)], 30);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(ci.contains(h, h));
        let (re, _, _) = ci.to_decimal(12);
        assert_eq!(re, "0.707106781187");
        assert!(ci.radius_f64() < 1e-25);
    }

    #[test]
    fn zero_is_exact() {
        let ci = embed(5, &vec![BigInt::from(0); 4], 10);
        assert!(ci.contains(0.0, 0.0));
        assert_eq!(ci.radius_f64(), 0.0);
    }
}

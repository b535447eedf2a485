//! Imaginary quadratic fields: half-integer surds, class numbers by reduced
//! binary quadratic forms, and the three norm-equation families.

use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{is_squarefree, pow_mod};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadError {
    #[error("{0} is not squarefree")]
    NotSquarefree(u64),
    #[error("surd (a + b sqrt(-d))/2 needs a = b mod 2 and d = 3 mod 4")]
    HalfIntegerViolation,
    #[error("surds live in different fields")]
    FieldMismatch,
    #[error("no primitive solution of {0}")]
    NoSolution(String),
    #[error("class number {0} is odd; the congruence exponent h/2 is undefined")]
    OddClassNumber(u64),
    #[error("invalid norm-equation parameters: {0}")]
    BadParameters(String),
}

/// The quadratic integer `(a + b sqrt(-d)) / den` with `den ∈ {1, 2}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    d: u64,
    a: BigInt,
    b: BigInt,
    den: u8,
}

impl QuadSurd {
    pub fn new(d: u64, a: impl Into<BigInt>, b: impl Into<BigInt>, den: u8) -> Result<Self, QuadError> {
        if !is_squarefree(d) {
            return Err(QuadError::NotSquarefree(d));
        }
        let (a, b) = (a.into(), b.into());
        match den {
            1 => Ok(Self { d, a, b, den }),
            2 => {
                if (&a - &b).is_odd() || (d % 4 != 3 && !(a.is_even() && b.is_even())) {
                    return Err(QuadError::HalfIntegerViolation);
                }
                Ok(Self::normalized(d, a, b, 2).expect("parity checked"))
            }
            _ => Err(QuadError::HalfIntegerViolation),
        }
    }

    pub fn integer(d: u64, a: impl Into<BigInt>) -> Self {
        Self { d, a: a.into(), b: BigInt::zero(), den: 1 }
    }

    fn normalized(d: u64, mut a: BigInt, mut b: BigInt, mut den: u32) -> Option<Self> {
        while den > 1 && a.is_even() && b.is_even() {
            a /= 2;
            b /= 2;
            den /= 2;
        }
        match den {
            1 => Some(Self { d, a, b, den: 1 }),
            2 if d % 4 == 3 && (&a - &b).is_even() => Some(Self { d, a, b, den: 2 }),
            _ => None,
        }
    }

    pub fn d(&self) -> u64 {
        self.d
    }
    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn den(&self) -> u8 {
        self.den
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { b: -&self.b, ..self.clone() }
    }

    pub fn neg(&self) -> Self {
        Self { a: -&self.a, b: -&self.b, ..self.clone() }
    }

    /// `w * conj(w)` as a rational integer.
    pub fn norm(&self) -> BigInt {
        let n = &self.a * &self.a + BigInt::from(self.d) * &self.b * &self.b;
        n / (u32::from(self.den) * u32::from(self.den))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, QuadError> {
        if self.d != other.d && !(self.is_rational() || other.is_rational()) {
            return Err(QuadError::FieldMismatch);
        }
        let d = if self.is_rational() { other.d } else { self.d };
        let a = &self.a * &other.a - BigInt::from(d) * &self.b * &other.b;
        let b = &self.a * &other.b + &other.a * &self.b;
        let den = u32::from(self.den) * u32::from(other.den);
        Ok(Self::normalized(d, a, b, den).expect("algebraic integers are closed under products"))
    }

    pub fn square(&self) -> Self {
        self.mul(self).expect("same field")
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::integer(self.d, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same field");
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "d": self.d.to_string(),
            "a": self.a.to_string(),
            "b": self.b.to_string(),
            "den": self.den.to_string(),
        })
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = if self.b.is_zero() {
            format!("{}", self.a)
        } else {
            let sign = if self.b.is_negative() { "-" } else { "+" };
            let mag = self.b.abs();
            let coef = if mag.is_one() { String::new() } else { format!("{mag}*") };
            let root = if self.d == 1 { "i".to_string() } else { format!("sqrt(-{})", self.d) };
            format!("{}{}{}{}", self.a, sign, coef, root)
        };
        if self.den == 2 {
            write!(f, "({body})/2")
        } else if self.b.is_zero() {
            write!(f, "{body}")
        } else {
            write!(f, "({body})")
        }
    }
}

/// Discriminant of the maximal order of `Q(sqrt(-d))`.
pub fn field_discriminant(d: u64) -> i64 {
    if d % 4 == 3 {
        -(d as i64)
    } else {
        -4 * d as i64
    }
}

/// Reduced primitive forms `(a, b, c)` of the discriminant of `Q(sqrt(-d))`:
/// `|b| <= a <= c`, `b >= 0` when `|b| = a` or `a = c`.
pub fn reduced_forms(d: u64) -> Result<Vec<(i64, i64, i64)>, QuadError> {
    if !is_squarefree(d) {
        return Err(QuadError::NotSquarefree(d));
    }
    let disc = field_discriminant(d);
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -disc {
        for b in (-a + 1)..=a {
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (a == c && b < 0) {
                continue;
            }
            if a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            out.push((a, b, c));
        }
        a += 1;
    }
    Ok(out)
}

/// `h(Q(sqrt(-d)))` by counting reduced forms.
pub fn class_number(d: u64) -> Result<u64, QuadError> {
    Ok(reduced_forms(d)?.len() as u64)
}

/// A primitive solution of one of the norm equations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormEquationSolution {
    pub a: BigInt,
    pub b_abs: BigInt,
    pub h: u64,
    /// Field `Q(sqrt(-d))` of the associated surd.
    pub d: u64,
    /// 2 for the `4 p^h` families, 1 for the `p^{f/2}` family.
    pub den: u8,
}

impl NormEquationSolution {
    /// `(a + sign * |b| sqrt(-d)) / den`.
    pub fn surd(&self, sign: i32) -> QuadSurd {
        let b = if sign < 0 { -&self.b_abs } else { self.b_abs.clone() };
        QuadSurd::new(self.d, self.a.clone(), b, self.den).expect("solutions are integral")
    }
}

/// All `(a, |b|)` with `target = a^2 + d b^2`, `b > 0`, `p ∤ b`, and
/// `a ≡ want (mod modulus)`.
fn search(target: &BigInt, d: u64, p: u64, modulus: u64, want: u64) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::new();
    let dd = BigInt::from(d);
    let mut b = BigInt::one();
    let pb = BigInt::from(p);
    let mb = BigInt::from(modulus);
    let wb = BigInt::from(want);
    loop {
        let rest = target - &dd * &b * &b;
        if rest.is_negative() {
            break;
        }
        if !(&b % &pb).is_zero() {
            let a = rest.sqrt();
            if &a * &a == rest {
                for cand in [a.clone(), -a.clone()] {
                    if (&cand - &wb).mod_floor(&mb).is_zero() {
                        out.push((cand, b.clone()));
                    }
                }
            }
        }
        b += 1;
    }
    out.sort_by(|x, y| x.0.abs().cmp(&y.0.abs()).then(x.1.cmp(&y.1)));
    out.dedup();
    out
}

fn pick(sols: Vec<(BigInt, BigInt)>, what: String, h: u64, d: u64, den: u8) -> Result<NormEquationSolution, QuadError> {
    let (a, b_abs) = sols.into_iter().next().ok_or(QuadError::NoSolution(what))?;
    Ok(NormEquationSolution { a, b_abs, h, d, den })
}

/// `4 p^h = a^2 + l b^2` with `a ≡ -2 p^{(l-1+2h)/4} (mod l)`.
pub fn solve_norm_a(p: u64, l: u64, h: u64) -> Result<NormEquationSolution, QuadError> {
    if l % 4 != 3 || (l - 1 + 2 * h) % 4 != 0 {
        return Err(QuadError::BadParameters(format!("l = {l}, h = {h}")));
    }
    let target = BigInt::from(4) * BigInt::from(p).pow(h as u32);
    let want = (l - 2 * pow_mod(p, (l - 1 + 2 * h) / 4, l) % l) % l;
    let sols = search(&target, l, p, l, want);
    pick(sols, format!("4*{p}^{h} = a^2 + {l} b^2"), h, l, 2)
}

/// `4 p^h = a'^2 + l1 l2 b'^2` with `a' ≡ 2 p^{h/2}` modulo the factor that is 3 mod 4.
pub fn solve_norm_b1(p: u64, l1: u64, l2: u64, h: u64) -> Result<NormEquationSolution, QuadError> {
    if h % 2 == 1 {
        return Err(QuadError::OddClassNumber(h));
    }
    let lm = if l1 % 4 != 3 && l2 % 4 == 3 { l2 } else { l1 };
    let d = l1 * l2;
    let target = BigInt::from(4) * BigInt::from(p).pow(h as u32);
    let want = 2 * pow_mod(p, h / 2, lm) % lm;
    let sols = search(&target, d, p, lm, want);
    pick(sols, format!("4*{p}^{h} = a^2 + {d} b^2"), h, d, 2)
}

/// `p^h = a'^2 + l b'^2`, `h = h(Q(sqrt(-l)))`, with
/// `a' ≡ (-1)^e p^{h/2} (mod l)`, `e = f/2 - 1 + (p+1)f/8` (`p ≡ 3 mod 4`).
pub fn solve_norm_f1(p: u64, l: u64, f: u64) -> Result<NormEquationSolution, QuadError> {
    if f % 2 != 0 || p % 4 != 3 {
        return Err(QuadError::BadParameters(format!("p = {p}, f = {f}")));
    }
    let h = class_number(l)?;
    if h % 2 == 1 {
        return Err(QuadError::OddClassNumber(h));
    }
    let target = BigInt::from(p).pow(h as u32);
    let e = (f / 2 - 1) % 2 + ((p + 1) / 4 % 2) * (f / 2 % 2);
    let base = pow_mod(p, h / 2, l);
    let want = if e % 2 == 1 { (l - base) % l } else { base };
    let sols = search(&target, l, p, l, want);
    pick(sols, format!("{p}^{h} = a^2 + {l} b^2"), h, l, 1)
}

/// `p = a^2 + d b^2` with `a, b > 0` (`d ∈ {1, 2}`); for `d = 1`, `a` is odd.
pub fn two_square(p: u64, d: u64) -> Result<(u64, u64), QuadError> {
    let mut b = 1u64;
    while d * b * b < p {
        let r = p - d * b * b;
        let a = r.sqrt();
        if a * a == r && (d != 1 || a % 2 == 1) {
            return Ok((a, b));
        }
        b += 1;
    }
    Err(QuadError::NoSolution(format!("{p} = a^2 + {d} b^2")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_numbers() {
        for (d, h) in [(15, 2), (35, 2), (7, 1), (39, 4), (11, 1), (1, 1), (2, 1), (3, 1), (5, 2), (23, 3)] {
            assert_eq!(class_number(d).unwrap(), h, "d = {d}");
        }
        assert_eq!(class_number(12), Err(QuadError::NotSquarefree(12)));
        assert_eq!(reduced_forms(15).unwrap(), vec![(1, 1, 4), (2, 1, 2)]);
    }

    #[test]
    fn norm_a() {
        let s = solve_norm_a(3, 11, 1).unwrap();
        assert_eq!((s.a, s.b_abs), (BigInt::from(1), BigInt::from(1)));
        let s = solve_norm_a(2, 7, 1).unwrap();
        assert_eq!((s.a, s.b_abs), (BigInt::from(-1), BigInt::from(1)));
        let s = solve_norm_a(11, 7, 1).unwrap();
        assert_eq!((s.a, s.b_abs), (BigInt::from(-4), BigInt::from(2)));
    }

    #[test]
    fn norm_b1() {
        let s = solve_norm_b1(103, 5, 7, 2).unwrap();
        assert_eq!((s.a, s.b_abs), (BigInt::from(199), BigInt::from(9)));
        let s = solve_norm_b1(2, 3, 13, 4).unwrap();
        assert_eq!((s.a, s.b_abs), (BigInt::from(5), BigInt::from(1)));
        let s = solve_norm_b1(17, 5, 3, 2).unwrap();
        assert_eq!((s.a, s.b_abs), (BigInt::from(-14), BigInt::from(8)));
        assert_eq!(solve_norm_b1(2, 3, 5, 1), Err(QuadError::OddClassNumber(1)));
    }

    #[test]
    fn norm_f1() {
        let s = solve_norm_f1(3, 5, 4).unwrap();
        assert_eq!((s.a, s.b_abs), (BigInt::from(2), BigInt::from(1)));
        let s = solve_norm_f1(7, 5, 4).unwrap();
        assert_eq!((s.a, s.b_abs), (BigInt::from(-2), BigInt::from(3)));
        let s = solve_norm_f1(3, 17, 16).unwrap();
        assert_eq!((s.a, s.b_abs, s.h), (BigInt::from(8), BigInt::from(1), 4));
        let s = solve_norm_f1(3, 29, 28).unwrap();
        assert_eq!((s.a.abs(), s.b_abs, s.h), (BigInt::from(2), BigInt::from(5), 6));
        assert!(matches!(solve_norm_f1(5, 13, 4), Err(QuadError::BadParameters(_))));
    }

    #[test]
    fn surds() {
        let w = QuadSurd::new(11, 1, 1, 2).unwrap();
        assert_eq!(w.square(), QuadSurd::new(11, -5, 1, 2).unwrap());
        let e = QuadSurd::new(35, 199, 9, 2).unwrap();
        assert_eq!(e.norm(), BigInt::from(10609));
        assert_eq!(e.conj().conj(), e);
        assert_eq!(QuadSurd::new(7, 2, 0, 2).unwrap(), QuadSurd::integer(7, 1));
        assert_eq!(QuadSurd::new(7, 1, 0, 2), Err(QuadError::HalfIntegerViolation));
        assert_eq!(two_square(13, 1).unwrap(), (3, 2));
        assert_eq!(two_square(11, 2).unwrap(), (3, 1));
    }
}

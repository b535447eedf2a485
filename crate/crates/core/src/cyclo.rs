//! Exact arithmetic in cyclotomic integer rings `Z[ζ_m]`.
//!
//! Elements are stored as the canonical remainder modulo the cyclotomic
//! polynomial `Φ_m` on the power basis `1, ζ_m, …, ζ_m^{φ(m)-1}`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{crt_pair, factorize, is_squarefree, jacobi, totient};
use crate::interval::{self, ComplexInterval};
use crate::quad::QuadSurd;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("galois index {a} is not a unit modulo {m}")]
    NonUnitIndex { a: i64, m: u64 },
    #[error("conductor {from} does not divide {to}")]
    NotDivisible { from: u64, to: u64 },
    #[error("no square-root embedding for conductor {0}")]
    BadConductor(u64),
    #[error("sqrt(-{d}) does not lie in Q(zeta_{m})")]
    RootNotInField { d: u64, m: u64 },
    #[error("half-integer surd with mismatched parity")]
    HalfIntegerViolation,
    #[error("division by {0} is not exact")]
    InexactDivision(BigInt),
}

/// `Φ_m` in sparse form plus its degree.
#[derive(Debug)]
pub(crate) struct CycloPoly {
    pub(crate) phi: usize,
    /// Nonzero coefficients below the leading term, as `(degree, coeff)`.
    pub(crate) tail: Vec<(usize, i64)>,
}

fn poly_cache() -> &'static RwLock<HashMap<u64, Arc<CycloPoly>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<CycloPoly>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Coefficients of `Φ_m`, ascending, via `Φ_m = Π_{d|m} (x^d - 1)^{μ(m/d)}`.
pub fn cyclotomic_poly(m: u64) -> Vec<i64> {
    assert!(m >= 1);
    let primes: Vec<u64> = factorize(m).into_iter().map(|(p, _)| p).collect();
    let mut ups = Vec::new();
    let mut downs = Vec::new();
    for mask in 0u32..(1 << primes.len()) {
        let mut sq = 1u64;
        for (i, &p) in primes.iter().enumerate() {
            if mask >> i & 1 == 1 {
                sq *= p;
            }
        }
        let d = (m / sq) as usize;
        if mask.count_ones() % 2 == 0 {
            ups.push(d);
        } else {
            downs.push(d);
        }
    }
    let mut poly = vec![1i64];
    for d in ups {
        let mut next = vec![0i64; poly.len() + d];
        for (i, &c) in poly.iter().enumerate() {
            next[i + d] += c;
            next[i] -= c;
        }
        poly = next;
    }
    for d in downs {
        // Exact division by x^d - 1: q_i = q_{i-d} - r_i read from the low end.
        let n = poly.len() - d;
        let mut q = vec![0i64; n];
        for i in 0..n {
            let prev = if i >= d { q[i - d] } else { 0 };
            q[i] = prev - poly[i];
        }
        poly = q;
    }
    poly
}

pub(crate) fn cyclo_data(m: u64) -> Arc<CycloPoly> {
    if let Some(hit) = poly_cache().read().expect("cache poisoned").get(&m) {
        return hit.clone();
    }
    let coeffs = cyclotomic_poly(m);
    let phi = coeffs.len() - 1;
    debug_assert_eq!(phi as u64, totient(m));
    let tail = coeffs[..phi]
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0)
        .map(|(i, &c)| (i, c))
        .collect();
    let data = Arc::new(CycloPoly { phi, tail });
    poly_cache()
        .write()
        .expect("cache poisoned")
        .entry(m)
        .or_insert(data)
        .clone()
}

/// Reduces a coefficient array (indices are exponents of ζ_m) modulo Φ_m
/// in machine integers; `None` on overflow.
fn reduce_small(m: u64, mut a: Vec<i128>) -> Option<Vec<i128>> {
    let m_us = m as usize;
    if a.len() > m_us {
        for i in m_us..a.len() {
            let v = a[i];
            a[i % m_us] = a[i % m_us].checked_add(v)?;
        }
        a.truncate(m_us);
    }
    let data = cyclo_data(m);
    let phi = data.phi;
    for deg in (phi..a.len()).rev() {
        let c = a[deg];
        if c == 0 {
            continue;
        }
        let shift = deg - phi;
        for &(j, pc) in &data.tail {
            let t = c.checked_mul(pc as i128)?;
            a[shift + j] = a[shift + j].checked_sub(t)?;
        }
    }
    a.resize(phi, 0);
    Some(a)
}

fn reduce_big(m: u64, mut a: Vec<BigInt>) -> Vec<BigInt> {
    let m_us = m as usize;
    if a.len() > m_us {
        let tail: Vec<BigInt> = a.drain(m_us..).collect();
        for (i, v) in tail.into_iter().enumerate() {
            a[(m_us + i) % m_us] += v;
        }
    }
    let data = cyclo_data(m);
    let phi = data.phi;
    for deg in (phi..a.len()).rev() {
        if a[deg].is_zero() {
            continue;
        }
        let c = a[deg].clone();
        let shift = deg - phi;
        for &(j, pc) in &data.tail {
            a[shift + j] -= &c * pc;
        }
    }
    a.truncate(phi);
    a.resize(phi, BigInt::zero());
    a
}

fn to_small(v: &[BigInt]) -> Option<Vec<i128>> {
    v.iter().map(|x| x.to_i64().map(i128::from)).collect()
}

fn from_small(v: Vec<i128>) -> Vec<BigInt> {
    v.into_iter().map(BigInt::from).collect()
}

/// Reduces an exponent-indexed array to canonical coefficients.
fn reduce_any(m: u64, a: Vec<BigInt>) -> Vec<BigInt> {
    if let Some(small) = to_small(&a) {
        if let Some(r) = reduce_small(m, small) {
            return from_small(r);
        }
    }
    reduce_big(m, a)
}

/// Exact element of `Z[ζ_m]` in canonical form.
#[derive(Clone, Debug)]
pub struct CycloElement {
    m: u64,
    coeffs: Vec<BigInt>,
}

/// A Galois element `σ_a: ζ_m ↦ ζ_m^a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GaloisIndex {
    a: u64,
    m: u64,
}

impl GaloisIndex {
    pub fn new(a: i64, m: u64) -> Result<Self, CycloError> {
        let r = a.rem_euclid(m as i64) as u64;
        if r.gcd(&m) != 1 {
            return Err(CycloError::NonUnitIndex { a, m });
        }
        Ok(Self { a: r, m })
    }

    /// Complex conjugation `σ_{-1}`.
    pub fn conjugation(m: u64) -> Self {
        Self { a: (m - 1) % m.max(1), m }.normalized()
    }

    /// The element acting as `σ_{a}` on prime-to-`p` roots of unity and
    /// trivially on `p`-power roots of unity in conductor `m`.
    pub fn away_from(a: i64, p: u64, m: u64) -> Result<Self, CycloError> {
        let mut pp = 1;
        let mut rest = m;
        while rest % p == 0 {
            rest /= p;
            pp *= p;
        }
        let ra = a.rem_euclid(rest as i64) as u64;
        if ra.gcd(&rest) != 1 {
            return Err(CycloError::NonUnitIndex { a, m: rest });
        }
        Self::new(crt_pair(ra, rest, 1 % pp, pp) as i64, m)
    }

    /// Acts as `σ_a` on `ζ_n` (prime-to-p part) and `σ_t` on the `p`-power part.
    pub fn split(a: i64, t: i64, p: u64, m: u64) -> Result<Self, CycloError> {
        let mut pp = 1;
        let mut rest = m;
        while rest % p == 0 {
            rest /= p;
            pp *= p;
        }
        let ra = a.rem_euclid(rest as i64) as u64;
        let rt = t.rem_euclid(pp as i64) as u64;
        Self::new(crt_pair(ra % rest.max(1), rest, rt, pp) as i64, m)
    }

    fn normalized(self) -> Self {
        if self.m == 1 {
            Self { a: 0, m: 1 }
        } else {
            self
        }
    }

    pub fn value(&self) -> u64 {
        self.a
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }
}

impl CycloElement {
    fn from_reduced(m: u64, coeffs: Vec<BigInt>) -> Self {
        debug_assert_eq!(coeffs.len() as u64, totient(m));
        Self { m, coeffs }
    }

    /// Builds an element from coefficients indexed by exponents of ζ_m
    /// (any length), reducing to canonical form.
    pub fn from_exponents(m: u64, coeffs: Vec<BigInt>) -> Self {
        assert!(m >= 1, "conductor must be positive");
        Self::from_reduced(m, reduce_any(m, coeffs))
    }

    /// Same as [`from_exponents`](Self::from_exponents) for machine-sized counts.
    pub fn from_exponent_counts(m: u64, counts: &[i64]) -> Self {
        let small: Vec<i128> = counts.iter().map(|&c| c as i128).collect();
        match reduce_small(m, small) {
            Some(r) => Self::from_reduced(m, from_small(r)),
            None => Self::from_exponents(m, counts.iter().map(|&c| BigInt::from(c)).collect()),
        }
    }

    pub fn zero(m: u64) -> Self {
        Self::from_reduced(m, vec![BigInt::zero(); totient(m) as usize])
    }

    pub fn from_int<T: Into<BigInt>>(n: T, m: u64) -> Self {
        let mut c = vec![BigInt::zero(); totient(m) as usize];
        c[0] = n.into();
        Self::from_reduced(m, c)
    }

    pub fn one(m: u64) -> Self {
        Self::from_int(1, m)
    }

    /// `ζ_m^k` in canonical form.
    pub fn root(m: u64, k: i64) -> Self {
        assert!(m >= 1, "conductor must be positive");
        let e = k.rem_euclid(m as i64) as usize;
        let mut counts = vec![0i64; m as usize];
        counts[e] = 1;
        Self::from_exponent_counts(m, &counts)
    }

    pub fn conductor(&self) -> u64 {
        self.m
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The rational integer this element equals, if any.
    pub fn to_integer(&self) -> Option<BigInt> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Re-expresses the element in `Z[ζ_{m2}]` for `m | m2`.
    pub fn promote(&self, m2: u64) -> Result<Self, CycloError> {
        if m2 % self.m != 0 {
            return Err(CycloError::NotDivisible { from: self.m, to: m2 });
        }
        if m2 == self.m {
            return Ok(self.clone());
        }
        let step = (m2 / self.m) as usize;
        let mut arr = vec![BigInt::zero(); m2 as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            arr[i * step] = c.clone();
        }
        Ok(Self::from_exponents(m2, arr))
    }

    fn lift_pair(a: &Self, b: &Self) -> (Self, Self) {
        let m = a.m.lcm(&b.m);
        (
            a.promote(m).expect("lcm is a multiple"),
            b.promote(m).expect("lcm is a multiple"),
        )
    }

    pub fn galois(&self, g: GaloisIndex) -> Result<Self, CycloError> {
        let target = if g.m == self.m {
            self.clone()
        } else if g.m % self.m == 0 {
            self.promote(g.m)?
        } else {
            return Err(CycloError::NotDivisible { from: self.m, to: g.m });
        };
        let m = target.m as usize;
        let mut arr = vec![BigInt::zero(); m];
        for (i, c) in target.coeffs.iter().enumerate() {
            if !c.is_zero() {
                arr[(i as u128 * g.a as u128 % m as u128) as usize] = c.clone();
            }
        }
        Ok(Self::from_exponents(target.m, arr))
    }

    /// `σ_a` for an integer `a`, checking `gcd(a, m) = 1`.
    pub fn galois_apply(&self, a: i64) -> Result<Self, CycloError> {
        self.galois(GaloisIndex::new(a, self.m)?)
    }

    /// Complex conjugation `σ_{-1}`.
    pub fn conj(&self) -> Self {
        self.galois(GaloisIndex::conjugation(self.m))
            .expect("-1 is always a unit")
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::from_reduced(self.m, self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Divides every coefficient by `k`, failing unless all divisions are exact.
    pub fn div_exact(&self, k: &BigInt) -> Result<Self, CycloError> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let (q, r) = c.div_rem(k);
            if !r.is_zero() {
                return Err(CycloError::InexactDivision(k.clone()));
            }
            out.push(q);
        }
        Ok(Self::from_reduced(self.m, out))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.m);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    fn mul_same(&self, other: &Self) -> Self {
        let m = self.m;
        if let (Some(a), Some(b)) = (to_small(&self.coeffs), to_small(&other.coeffs)) {
            if let Some(r) = mul_small(m, &a, &b) {
                return Self::from_reduced(m, from_small(r));
            }
        }
        let n = self.coeffs.len();
        let mut arr = vec![BigInt::zero(); (2 * n).max(1)];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    arr[i + j] += x * y;
                }
            }
        }
        Self::from_reduced(m, reduce_big(m, arr))
    }

    /// Certified complex enclosure of the image under `ζ_m ↦ exp(2πi/m)`.
    pub fn complex_embed(&self, precision: u32) -> ComplexInterval {
        interval::embed(self.m, &self.coeffs, precision.max(1))
    }

    /// Quick `f64` approximation, for diagnostics and tests.
    pub fn approx(&self) -> (f64, f64) {
        let ci = self.complex_embed(20);
        (ci.re_f64(), ci.im_f64())
    }

    /// Serialization used by the CLI: all integers as decimal strings.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "m": self.m.to_string(),
            "coeffs": self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }
}

fn mul_small(m: u64, a: &[i128], b: &[i128]) -> Option<Vec<i128>> {
    let n = a.len();
    let mut arr = vec![0i128; (2 * n).max(1)];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                arr[i + j] = arr[i + j].checked_add(x.checked_mul(y)?)?;
            }
        }
    }
    reduce_small(m, arr)
}

impl PartialEq for CycloElement {
    fn eq(&self, other: &Self) -> bool {
        if self.m == other.m {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = Self::lift_pair(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycloElement {}

impl<'a> Add<&'a CycloElement> for &'a CycloElement {
    type Output = CycloElement;
    fn add(self, rhs: &CycloElement) -> CycloElement {
        if self.m != rhs.m {
            let (a, b) = CycloElement::lift_pair(self, rhs);
            return &a + &b;
        }
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(x, y)| x + y).collect();
        CycloElement::from_reduced(self.m, coeffs)
    }
}

impl<'a> Sub<&'a CycloElement> for &'a CycloElement {
    type Output = CycloElement;
    fn sub(self, rhs: &CycloElement) -> CycloElement {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a CycloElement> for &'a CycloElement {
    type Output = CycloElement;
    fn mul(self, rhs: &CycloElement) -> CycloElement {
        if self.m != rhs.m {
            let (a, b) = CycloElement::lift_pair(self, rhs);
            return a.mul_same(&b);
        }
        self.mul_same(rhs)
    }
}

impl Neg for &CycloElement {
    type Output = CycloElement;
    fn neg(self) -> CycloElement {
        CycloElement::from_reduced(self.m, self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<CycloElement> for CycloElement {
            type Output = CycloElement;
            fn $f(self, rhs: CycloElement) -> CycloElement {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a CycloElement> for CycloElement {
            type Output = CycloElement;
            fn $f(self, rhs: &CycloElement) -> CycloElement {
                (&self).$f(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CycloElement {
    type Output = CycloElement;
    fn neg(self) -> CycloElement {
        -&self
    }
}

impl fmt::Display for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = match i {
                0 => c.to_string(),
                _ if c.is_one() => format!("z{}^{}", self.m, i),
                _ => format!("{}*z{}^{}", c, self.m, i),
            };
            terms.push(t);
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Conductor of `sqrt(-d)` for squarefree `d ≥ 1`.
pub fn surd_conductor(d: u64) -> u64 {
    if d % 4 == 3 {
        d
    } else {
        4 * d
    }
}

/// `sqrt(m*)` as a quadratic Gauss sum: `Σ (t/m) ζ_m^t` for odd squarefree `m`,
/// `ζ_4` for `m = 4` and `ζ_8 + ζ_8^3 = sqrt(-2)` for `m = 8`.
pub fn embed_sqrt_star(m: u64) -> Result<CycloElement, CycloError> {
    match m {
        4 => Ok(CycloElement::root(4, 1)),
        8 => Ok(&CycloElement::root(8, 1) + &CycloElement::root(8, 3)),
        _ if m >= 3 && m % 2 == 1 && is_squarefree(m) => {
            let counts: Vec<i64> = (0..m).map(|t| jacobi(t as i64, m) as i64).collect();
            Ok(CycloElement::from_exponent_counts(m, &counts))
        }
        _ => Err(CycloError::BadConductor(m)),
    }
}

/// `sqrt(-d)` for squarefree `d`, with positive imaginary part.
pub fn embed_sqrt_neg(d: u64) -> Result<CycloElement, CycloError> {
    if d == 0 || !is_squarefree(d) {
        return Err(CycloError::BadConductor(d));
    }
    match (d, d % 4) {
        (1, _) => embed_sqrt_star(4),
        (2, _) => embed_sqrt_star(8),
        (_, 3) => embed_sqrt_star(d),
        (_, 1) => Ok(&embed_sqrt_star(4)? * &embed_sqrt_star(d)?),
        _ => {
            // d = 2e with e odd: sqrt(-d) = sqrt(-2) * sqrt(e) or sqrt(2) * sqrt(-e).
            let e = d / 2;
            if e % 4 == 1 {
                Ok(&embed_sqrt_star(8)? * &embed_sqrt_star(e)?)
            } else {
                let sqrt2 = &CycloElement::root(8, 1) - &CycloElement::root(8, 3);
                Ok(&sqrt2 * &embed_sqrt_star(e)?)
            }
        }
    }
}

/// Maps `(a + b sqrt(-d)) / den` into `Z[ζ_m]`.
pub fn embed_quad_surd(w: &QuadSurd, m: u64) -> Result<CycloElement, CycloError> {
    let d = w.d();
    if w.den() == 2 && ((w.a() - w.b()).is_odd() || d % 4 != 3) {
        return Err(CycloError::HalfIntegerViolation);
    }
    let need = if w.b().is_zero() { 1 } else { surd_conductor(d) };
    if m % need != 0 {
        return Err(CycloError::RootNotInField { d, m });
    }
    let mut val = CycloElement::from_int(w.a().clone(), m);
    if !w.b().is_zero() {
        let root = embed_sqrt_neg(d)?.promote(m)?;
        val = &val + &root.scale(w.b());
    }
    if w.den() == 2 {
        val = val.div_exact(&BigInt::from(2))?;
    }
    Ok(val)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        let p105 = cyclotomic_poly(105);
        assert_eq!(p105.len(), 49);
        assert!(p105.contains(&-2));
    }

    #[test]
    fn roots() {
        assert_eq!(CycloElement::root(1, 0), CycloElement::one(1));
        assert_eq!(CycloElement::root(4, 2), CycloElement::from_int(-1, 4));
        let s = &(&CycloElement::one(3) + &CycloElement::root(3, 1)) + &CycloElement::root(3, 2);
        assert!(s.is_zero());
        assert_eq!(
            &CycloElement::root(8, 1) * &CycloElement::root(8, 3),
            CycloElement::from_int(-1, 1)
        );
        // ζ_7 ζ_3 = ζ_21^{3+7}
        assert_eq!(
            &CycloElement::root(7, 1) * &CycloElement::root(3, 1),
            CycloElement::root(21, 10)
        );
    }

    #[test]
    fn galois_and_promote() {
        let z5 = CycloElement::root(5, 1);
        assert_eq!(z5.conj(), CycloElement::root(5, 4));
        assert_eq!(
            CycloElement::root(7, 1).promote(14).unwrap(),
            CycloElement::root(14, 2)
        );
        assert_eq!(
            CycloElement::from_int(-1, 1).promote(14).unwrap(),
            CycloElement::from_int(-1, 14)
        );
        assert!(matches!(
            z5.promote(12),
            Err(CycloError::NotDivisible { .. })
        ));
        assert!(matches!(
            z5.galois_apply(10),
            Err(CycloError::NonUnitIndex { .. })
        ));
    }

    #[test]
    fn sqrt_star() {
        for (m, sq) in [(7, -7), (5, 5), (15, -15), (3, -3), (13, 13)] {
            let e = embed_sqrt_star(m).unwrap();
            assert_eq!(&e * &e, CycloElement::from_int(sq, 1), "m = {m}");
        }
        let e4 = embed_sqrt_star(4).unwrap();
        assert_eq!(&e4 * &e4, CycloElement::from_int(-1, 1));
        let e8 = embed_sqrt_star(8).unwrap();
        assert_eq!(&e8 * &e8, CycloElement::from_int(-2, 1));
        assert!(embed_sqrt_star(9).is_err());
        for d in [1u64, 2, 3, 5, 6, 10, 14, 15, 35, 39] {
            let r = embed_sqrt_neg(d).unwrap();
            assert_eq!(&r * &r, CycloElement::from_int(-(d as i64), 1), "d = {d}");
            let (re, im) = r.approx();
            assert!(re.abs() < 1e-9 && (im - (d as f64).sqrt()).abs() < 1e-9);
        }
    }
}

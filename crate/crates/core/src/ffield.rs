//! Finite fields `F_{p^f}` with discrete-log tables, the trace map and
//! multiplicative characters valued in `Z[ζ_N]`.

use num_integer::Integer;
use thiserror::Error;

use crate::arith::{checked_pow, factorize, is_prime};
use crate::cyclo::CycloElement;

/// Default cap on `q` for table-backed contexts.
pub const DEFAULT_BUDGET: u64 = 1 << 24;

/// Hard cap: tables are indexed by `u32`.
pub const TABLE_CAP: u64 = u32::MAX as u64;

/// Budget from `GSLAB_BUDGET`, falling back to [`DEFAULT_BUDGET`].
pub fn default_budget() -> u64 {
    std::env::var("GSLAB_BUDGET")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{p}^{f} exceeds the budget {budget}")]
    BudgetExceeded { p: u64, f: u32, budget: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("character order {n} does not divide q - 1 = {q_minus_1}")]
    OrderNotDividing { n: u64, q_minus_1: u64 },
}

/// Polynomial arithmetic over `F_p`, coefficients ascending.
mod poly {
    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.len() > 1 && *a.last().unwrap() == 0 {
            a.pop();
        }
        a
    }

    pub fn is_zero(a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    fn inv(a: u64, p: u64) -> u64 {
        crate::arith::pow_mod(a, p - 2, p)
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let m = trim(m.to_vec());
        let dm = m.len() - 1;
        if dm == 0 {
            return vec![0];
        }
        let lead_inv = inv(m[dm], p);
        let mut r: Vec<u64> = a.iter().map(|&c| c % p).collect();
        for deg in (dm..r.len()).rev() {
            if r[deg] == 0 {
                continue;
            }
            let c = r[deg] * lead_inv % p;
            for (i, &mc) in m.iter().enumerate() {
                let idx = deg - dm + i;
                r[idx] = (r[idx] + p - c * mc % p) % p;
            }
        }
        r.truncate(dm);
        if r.is_empty() {
            r.push(0);
        }
        trim(r)
    }

    pub fn add(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
            .collect();
        trim(out)
    }

    pub fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut out = vec![0u64; a.len() + b.len()];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        rem(&out, m, p)
    }

    pub fn pow_mod(a: &[u64], mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
        let mut base = rem(a, m, p);
        let mut acc = vec![1u64];
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &base, m, p);
            }
            e >>= 1;
            if e > 0 {
                base = mul_mod(&base, &base, m, p);
            }
        }
        acc
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(out)
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !is_zero(&b) {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Rabin's irreducibility test for a monic polynomial of degree `f`.
    pub fn is_irreducible(m: &[u64], p: u64, f: u32) -> bool {
        let x = vec![0u64, 1];
        let frob = |k: u32| -> Vec<u64> {
            let mut y = x.clone();
            for _ in 0..k {
                y = pow_mod(&y, p as u128, m, p);
            }
            y
        };
        if !is_zero(&sub(&frob(f), &x, p)) {
            return false;
        }
        for (r, _) in crate::arith::factorize(f as u64) {
            let y = frob(f / r as u32);
            let g = gcd(&sub(&y, &x, p), m, p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }
}

/// Element of `F_{p^f}` in the polynomial basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub coeffs: Vec<u64>,
}

/// `F_{p^f}` with its modulus, generator and lookup tables.
#[derive(Debug)]
pub struct FieldContext {
    p: u64,
    f: u32,
    q: u64,
    modulus: Vec<u64>,
    generator: Vec<u64>,
    exp: Vec<u32>,
    log: Vec<u32>,
    trace_by_log: Vec<u32>,
}

impl FieldContext {
    /// Builds the context with the smallest monic irreducible modulus and the
    /// smallest generator, both ordered by the integer encoding `Σ c_i p^i`.
    pub fn build(p: u64, f: u32, budget: u64) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if f == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = checked_pow(p, f as u64)
            .filter(|&q| q <= budget && q <= TABLE_CAP)
            .ok_or(FieldError::BudgetExceeded { p, f, budget })?;
        let modulus = smallest_irreducible(p, f);
        let generator = smallest_generator(p, f, q, &modulus);
        let mut ctx = Self {
            p,
            f,
            q,
            modulus,
            generator,
            exp: Vec::new(),
            log: Vec::new(),
            trace_by_log: Vec::new(),
        };
        ctx.fill_tables();
        Ok(ctx)
    }

    fn fill_tables(&mut self) {
        let (p, f, q) = (self.p, self.f as usize, self.q);
        let n = (q - 1) as usize;
        // Split digits into a low and a high half so that multiplication by the
        // generator and the trace are two table lookups plus a digit-wise sum.
        let lo = f / 2;
        let hi = f - lo;
        let plo = p.pow(lo as u32);
        let phi_ = p.pow(hi as u32);
        let basis_traces: Vec<u64> = (0..f)
            .map(|i| {
                let mut xi = vec![0u64; i + 1];
                xi[i] = 1;
                self.trace(&FieldElement { coeffs: poly::rem(&xi, &self.modulus, p) })
            })
            .collect();
        let g = self.generator.clone();
        let times_g = |enc: u64, shift: usize, len: usize| -> Vec<u64> {
            let mut v = vec![0u64; shift];
            v.extend(self.decode_len(enc, len));
            let prod = poly::mul_mod(&v, &g, &self.modulus, p);
            pad(prod, f)
        };
        let tr_of = |enc: u64, shift: usize, len: usize| -> u64 {
            let digits = self.decode_len(enc, len);
            digits
                .iter()
                .enumerate()
                .map(|(i, &d)| d * basis_traces[i + shift] % p)
                .sum::<u64>()
                % p
        };
        let lo_mul: Vec<Vec<u64>> = (0..plo).map(|e| times_g(e, 0, lo)).collect();
        let hi_mul: Vec<Vec<u64>> = (0..phi_).map(|e| times_g(e, lo, hi)).collect();
        let lo_tr: Vec<u64> = (0..plo).map(|e| tr_of(e, 0, lo)).collect();
        let hi_tr: Vec<u64> = (0..phi_).map(|e| tr_of(e, lo, hi)).collect();

        let mut exp = vec![0u32; n];
        let mut log = vec![u32::MAX; q as usize];
        let mut trace_by_log = vec![0u32; n];
        let mut cur = 1u64;
        for k in 0..n {
            exp[k] = cur as u32;
            debug_assert_eq!(log[cur as usize], u32::MAX, "generator order too small");
            log[cur as usize] = k as u32;
            let (l, h) = (cur % plo, cur / plo);
            trace_by_log[k] = ((lo_tr[l as usize] + hi_tr[h as usize]) % p) as u32;
            let a = &lo_mul[l as usize];
            let b = &hi_mul[h as usize];
            let mut next = 0u64;
            for i in (0..f).rev() {
                next = next * p + (a[i] + b[i]) % p;
            }
            cur = next;
        }
        debug_assert_eq!(cur, 1);
        self.exp = exp;
        self.log = log;
        self.trace_by_log = trace_by_log;
    }

    fn decode_len(&self, mut enc: u64, len: usize) -> Vec<u64> {
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(enc % self.p);
            enc /= self.p;
        }
        out
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn f(&self) -> u32 {
        self.f
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }
    pub fn generator(&self) -> FieldElement {
        FieldElement { coeffs: pad(self.generator.clone(), self.f as usize) }
    }

    pub fn encode(&self, x: &FieldElement) -> u64 {
        x.coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c % self.p)
    }

    pub fn decode(&self, enc: u64) -> FieldElement {
        FieldElement { coeffs: self.decode_len(enc, self.f as usize) }
    }

    pub fn element(&self, coeffs: &[u64]) -> FieldElement {
        let reduced = poly::rem(coeffs, &self.modulus, self.p);
        FieldElement { coeffs: pad(reduced, self.f as usize) }
    }

    /// The prime-field element `c mod p`.
    pub fn from_int(&self, c: i64) -> FieldElement {
        self.element(&[c.rem_euclid(self.p as i64) as u64])
    }

    pub fn zero(&self) -> FieldElement {
        self.from_int(0)
    }

    pub fn add(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        let coeffs = x.coeffs.iter().zip(&y.coeffs).map(|(a, b)| (a + b) % self.p).collect();
        FieldElement { coeffs }
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        let prod = poly::mul_mod(&x.coeffs, &y.coeffs, &self.modulus, self.p);
        FieldElement { coeffs: pad(prod, self.f as usize) }
    }

    pub fn pow(&self, x: &FieldElement, e: u64) -> FieldElement {
        let r = poly::pow_mod(&x.coeffs, e as u128, &self.modulus, self.p);
        FieldElement { coeffs: pad(r, self.f as usize) }
    }

    /// `T(x) = x + x^p + … + x^{p^{f-1}}`, computed by repeated Frobenius.
    pub fn trace(&self, x: &FieldElement) -> u64 {
        let mut acc = vec![0u64];
        let mut y = poly::rem(&x.coeffs, &self.modulus, self.p);
        for _ in 0..self.f {
            acc = poly::add(&acc, &y, self.p);
            y = poly::pow_mod(&y, self.p as u128, &self.modulus, self.p);
        }
        let acc = poly::trim(acc);
        debug_assert!(acc.len() == 1, "trace must lie in the prime field");
        acc[0]
    }

    /// Discrete log base the generator; `None` for zero.
    pub fn log(&self, x: &FieldElement) -> Option<u64> {
        match self.log[self.encode(x) as usize] {
            u32::MAX => None,
            k => Some(k as u64),
        }
    }

    pub fn log_of_encoding(&self, enc: u64) -> Option<u64> {
        match self.log[enc as usize] {
            u32::MAX => None,
            k => Some(k as u64),
        }
    }

    /// `generator^k`.
    pub fn exp(&self, k: u64) -> FieldElement {
        self.decode(self.exp[(k % (self.q - 1)) as usize] as u64)
    }

    /// Trace of `generator^k` from the table.
    pub fn trace_of_log(&self, k: u64) -> u64 {
        self.trace_by_log[(k % (self.q - 1)) as usize] as u64
    }

    /// Trace table indexed by discrete log.
    pub fn trace_table(&self) -> &[u32] {
        &self.trace_by_log
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.p.to_string(),
            "f": self.f.to_string(),
            "modulus": self.modulus.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "generator": self.generator().coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }
}

fn pad(mut v: Vec<u64>, len: usize) -> Vec<u64> {
    v.resize(len.max(v.len()), 0);
    v.truncate(len);
    v
}

fn smallest_irreducible(p: u64, f: u32) -> Vec<u64> {
    let count = p.pow(f);
    for enc in 0..count {
        let mut m = Vec::with_capacity(f as usize + 1);
        let mut e = enc;
        for _ in 0..f {
            m.push(e % p);
            e /= p;
        }
        m.push(1);
        if f > 1 && m[0] == 0 {
            continue;
        }
        if f == 1 || poly::is_irreducible(&m, p, f) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn smallest_generator(p: u64, f: u32, q: u64, modulus: &[u64]) -> Vec<u64> {
    let primes: Vec<u64> = factorize(q - 1).into_iter().map(|(r, _)| r).collect();
    for enc in 1..q {
        let mut g = Vec::with_capacity(f as usize);
        let mut e = enc;
        for _ in 0..f {
            g.push(e % p);
            e /= p;
        }
        let g = poly::rem(&g, modulus, p);
        let full = primes
            .iter()
            .all(|&r| poly::trim(poly::pow_mod(&g, ((q - 1) / r) as u128, modulus, p)) != vec![1]);
        if full {
            return g;
        }
    }
    unreachable!("multiplicative groups of finite fields are cyclic")
}

/// Multiplicative character `χ^λ` of order dividing `n`, with `χ(g) = ζ_n`.
#[derive(Clone, Copy, Debug)]
pub struct Character<'a> {
    ctx: &'a FieldContext,
    n: u64,
    lambda: u64,
}

/// The character with `χ(generator) = ζ_N`.
pub fn canonical_character(ctx: &FieldContext, n: u64) -> Result<Character<'_>, FieldError> {
    if n == 0 || (ctx.q - 1) % n != 0 {
        return Err(FieldError::OrderNotDividing { n, q_minus_1: ctx.q - 1 });
    }
    Ok(Character { ctx, n, lambda: 1 % n.max(1) })
}

impl<'a> Character<'a> {
    pub fn context(&self) -> &'a FieldContext {
        self.ctx
    }

    /// The modulus `N` of the value group `μ_N`.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    /// Exact multiplicative order of this character.
    pub fn order(&self) -> u64 {
        self.n / self.lambda.gcd(&self.n)
    }

    pub fn pow(&self, e: i64) -> Character<'a> {
        let lam = (self.lambda as i128 * e as i128).rem_euclid(self.n as i128) as u64;
        Character { lambda: lam, ..*self }
    }

    pub fn inverse(&self) -> Character<'a> {
        self.pow(-1)
    }

    /// `k` with `χ(x) = ζ_N^k`, or `None` at zero.
    pub fn eval_exponent(&self, x: &FieldElement) -> Option<u64> {
        self.ctx.log(x).map(|l| self.exponent_of_log(l))
    }

    pub(crate) fn exponent_of_log(&self, l: u64) -> u64 {
        ((self.lambda as u128 * l as u128) % self.n as u128) as u64
    }

    /// `χ(x)` in `Z[ζ_N]`; `None` is the zero symbol `χ(0)`.
    pub fn eval(&self, x: &FieldElement) -> Option<CycloElement> {
        self.eval_exponent(x).map(|k| CycloElement::root(self.n, k as i64))
    }

    /// `χ(c)` for a prime-field element `c ≠ 0`.
    pub fn eval_int(&self, c: i64) -> Option<CycloElement> {
        self.eval(&self.ctx.from_int(c))
    }

    /// Order of the restriction to `F_p^*`.
    pub fn restriction_order(&self) -> u64 {
        let q = self.ctx.q;
        let index = (q - 1) / (self.ctx.p - 1);
        let e = (self.lambda as u128 * index as u128 % self.n as u128) as u64;
        self.n / e.gcd(&self.n)
    }

    pub fn is_trivial(&self) -> bool {
        self.lambda % self.n == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_contexts() {
        let c = FieldContext::build(2, 3, 1 << 20).unwrap();
        assert_eq!(c.q(), 8);
        assert_eq!(c.modulus(), &[1, 1, 0, 1]);
        let g = c.generator();
        let mut x = g.clone();
        for _ in 1..7 {
            assert_ne!(c.encode(&x), 1);
            x = c.mul(&x, &g);
        }
        assert_eq!(c.encode(&x), 1);
        let zeros = (0..8).filter(|&e| c.trace(&c.decode(e)) == 0).count();
        assert_eq!(zeros, 4);
        assert_eq!(c.trace(&c.from_int(1)), 1);

        let c = FieldContext::build(11, 3, 1 << 20).unwrap();
        assert_eq!(c.q(), 1331);
        assert_eq!(c.trace(&c.from_int(1)), 3);
        assert_eq!(
            FieldContext::build(17, 4, 1_000_000).unwrap().q(),
            83521
        );
    }

    #[test]
    fn errors() {
        assert_eq!(FieldContext::build(4, 2, 100).unwrap_err(), FieldError::NotPrime(4));
        assert!(matches!(
            FieldContext::build(2, 30, 1 << 24),
            Err(FieldError::BudgetExceeded { .. })
        ));
        let c = FieldContext::build(3, 2, 100).unwrap();
        assert!(canonical_character(&c, 8).is_ok());
        assert!(canonical_character(&c, 5).is_err());
    }

    #[test]
    fn tables_agree_with_arithmetic() {
        let c = FieldContext::build(3, 4, 1 << 20).unwrap();
        for k in 0..80u64 {
            let x = c.exp(k);
            assert_eq!(c.log(&x), Some(k));
            assert_eq!(c.trace(&x), c.trace_of_log(k));
        }
    }

    #[test]
    fn restriction_orders() {
        let c = FieldContext::build(11, 3, 1 << 20).unwrap();
        let chi = canonical_character(&c, 14).unwrap();
        assert_eq!(chi.restriction_order(), 2);
        let c = FieldContext::build(3, 4, 1 << 20).unwrap();
        let chi = canonical_character(&c, 20).unwrap();
        assert_eq!(chi.restriction_order(), 1);
        assert_eq!(chi.pow(20).restriction_order(), 1);
    }
}

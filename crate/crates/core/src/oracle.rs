//! Brute-force Gauss sums over `F_q` and the identities they satisfy.

use num_bigint::BigInt;
use num_integer::Integer;
use thiserror::Error;

use crate::closed::{ClosedForm, Unit};
use crate::cyclo::{CycloElement, CycloError};
use crate::ffield::{canonical_character, Character, FieldContext, FieldError};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
    #[error("-1 is not a power of {p} modulo {n}")]
    NotPure { p: u64, n: u64 },
    #[error("{0}")]
    Unsupported(String),
}

/// `G(χ, μ) = Σ_x χ(x) ζ_p^{Tr(μx)}` in `Z[ζ_M]`, `M = lcm(N, p)`.
///
/// `mu` is the discrete logarithm of `μ` to the field generator.
pub fn gauss_sum_log(chi: &Character<'_>, mu_log: u64) -> CycloElement {
    let ctx = chi.context();
    let (n, p) = (chi.n(), ctx.p());
    let m = n.lcm(&p);
    let (sn, sp) = (m / n, m / p);
    let order = ctx.q() - 1;
    let tr = ctx.trace_table();
    let mut counts = vec![0i64; m as usize];
    let mut e_chi = 0u64;
    let step = chi.exponent_of_log(1);
    let mut k_mu = mu_log % order;
    for _ in 0..order {
        let e = (e_chi * sn + tr[k_mu as usize] as u64 * sp) % m;
        counts[e as usize] += 1;
        e_chi += step;
        if e_chi >= n {
            e_chi -= n;
        }
        k_mu += 1;
        if k_mu == order {
            k_mu = 0;
        }
    }
    CycloElement::from_exponent_counts(m, &counts)
}

/// `G(χ^k)` for every `k` in `0..N`, from one pass over the field.
pub fn gauss_sum_table(chi: &Character<'_>) -> Vec<CycloElement> {
    let ctx = chi.context();
    let (n, p) = (chi.n(), ctx.p());
    let m = n.lcm(&p);
    let (sn, sp) = (m / n, m / p);
    let tr = ctx.trace_table();
    let mut counts = vec![vec![0i64; m as usize]; n as usize];
    for (j, &t) in tr.iter().enumerate() {
        let e1 = chi.exponent_of_log(j as u64);
        let base = t as u64 * sp;
        let mut ek = 0u64;
        for row in counts.iter_mut() {
            row[((ek * sn + base) % m) as usize] += 1;
            ek += e1;
            if ek >= n {
                ek -= n;
            }
        }
    }
    counts.iter().map(|c| CycloElement::from_exponent_counts(m, c)).collect()
}

/// `G(χ) = G(χ, 1)`.
pub fn gauss_sum(chi: &Character<'_>) -> CycloElement {
    gauss_sum_log(chi, 0)
}

/// `G(χ, μ)` for a residue `μ` of the prime field; `μ ≡ 0` gives `Σ χ(x)`.
pub fn gauss_sum_direct(chi: &Character<'_>, mu: u64) -> CycloElement {
    let ctx = chi.context();
    match ctx.log(&ctx.from_int((mu % ctx.p()) as i64)) {
        Some(l) => gauss_sum_log(chi, l),
        None => {
            let n = chi.n();
            let mut counts = vec![0i64; n as usize];
            for k in 0..ctx.q() - 1 {
                counts[chi.exponent_of_log(k) as usize] += 1;
            }
            CycloElement::from_exponent_counts(n, &counts)
        }
    }
}

/// `χ̄(μ) G(χ)`, which must equal `G(χ, μ)`.
pub fn gauss_sum_scaled(chi: &Character<'_>, mu: u64) -> Result<CycloElement, OracleError> {
    let ctx = chi.context();
    let mu_log = ctx
        .log(&ctx.from_int((mu % ctx.p()) as i64))
        .ok_or_else(|| OracleError::Unsupported("mu must be nonzero".into()))?;
    let k = chi.inverse().exponent_of_log(mu_log);
    Ok(&gauss_sum(chi) * &CycloElement::root(chi.n(), k as i64))
}

/// Builds the context for `(p, f)` and returns `G(χ^λ)` for the order-`N` character.
pub fn gauss_sum_for(n: u64, p: u64, f: u32, lambda: u64, budget: u64) -> Result<CycloElement, OracleError> {
    let ctx = FieldContext::build(p, f, budget)?;
    let chi = canonical_character(&ctx, n)?;
    Ok(gauss_sum(&chi.pow(lambda as i64)))
}

/// Quadratic Gauss sum over `F_p`: `sqrt(p*)`.
pub fn quadratic_gauss_fp(p: u64) -> Result<ClosedForm, OracleError> {
    if p == 2 {
        return Err(OracleError::Unsupported("no quadratic character over F_2".into()));
    }
    Ok(ClosedForm::p_power(p, 1, Unit::ONE, 0).with_pstar(1))
}

/// Quadratic Gauss sum over `F_{p^d}`: `(-1)^{d-1} sqrt(p*)^d`.
pub fn quadratic_gauss_lifted(p: u64, d: u64) -> Result<ClosedForm, OracleError> {
    Ok(quadratic_gauss_fp(p)?.dh_lift(d))
}

/// Lift `(-1)^{s-1} g^s` of a Gauss sum from `F_{q0}` to `F_{q0^s}`.
pub fn dh_lift(g: &CycloElement, s: u64) -> CycloElement {
    let v = g.pow(s);
    if s % 2 == 0 {
        -v
    } else {
        v
    }
}

/// `S(χ) = Σ_{Tr(x) = 1} χ(x)` in `Z[ζ_N]`.
pub fn trace_one_sum(chi: &Character<'_>) -> CycloElement {
    let ctx = chi.context();
    let n = chi.n();
    let tr = ctx.trace_table();
    let mut counts = vec![0i64; n as usize];
    for (k, &t) in tr.iter().enumerate() {
        if t == 1 {
            counts[chi.exponent_of_log(k as u64) as usize] += 1;
        }
    }
    CycloElement::from_exponent_counts(n, &counts)
}

/// Right-hand side of the factorization through the trace-one sum:
/// `S · sqrt(p*)` when the restriction to `F_p^*` is quadratic and `-p · S`
/// when it is trivial; `None` for other restriction orders.
pub fn factorization_rhs(chi: &Character<'_>) -> Result<Option<CycloElement>, OracleError> {
    let p = chi.context().p();
    let s = trace_one_sum(chi);
    Ok(match chi.restriction_order() {
        1 => Some(s.scale(&BigInt::from(p)).scale(&BigInt::from(-1))),
        2 if p % 2 == 1 => Some(&s * &quadratic_gauss_fp(p)?.to_cyclo(1).map_err(cyclo_of)?),
        _ => None,
    })
}

/// Whether `G(χ)` equals [`factorization_rhs`].
pub fn factorization_check(chi: &Character<'_>) -> Result<Option<bool>, OracleError> {
    Ok(factorization_rhs(chi)?.map(|rhs| gauss_sum(chi) == rhs))
}

fn cyclo_of(e: crate::closed::FormError) -> OracleError {
    match e {
        crate::closed::FormError::Cyclo(c) => OracleError::Cyclo(c),
        other => OracleError::Unsupported(other.to_string()),
    }
}

/// `G(χ) G(χη) = χ̄^2(2) G(χ^2) G(η)` with `η` quadratic (odd `p`).
///
/// All four sums are taken inside the order-`lcm(N, 2)` character group.
pub fn dh_product_check(chi: &Character<'_>) -> Result<bool, OracleError> {
    let ctx = chi.context();
    if ctx.p() == 2 {
        return Err(OracleError::Unsupported("product formula needs odd p".into()));
    }
    let n = chi.n();
    let m = n.lcm(&2);
    let base = canonical_character(ctx, m)?;
    let lam = chi.lambda() * (m / n);
    let chi = base.pow(lam as i64);
    let eta = base.pow((m / 2) as i64);
    let chi_eta = base.pow((lam + m / 2) as i64);
    let chi2 = base.pow((2 * lam) as i64);
    let lhs = &gauss_sum(&chi) * &gauss_sum(&chi_eta);
    let k = chi2.inverse().eval_exponent(&ctx.from_int(2)).expect("2 is a unit for odd p");
    let rhs = &(&CycloElement::root(m, k as i64) * &gauss_sum(&chi2)) * &gauss_sum(&eta);
    Ok(lhs == rhs)
}

/// The pure Gauss sum when `-1 ∈ <p> mod N` (`N > 2`):
/// `(-1)^{s-1} p^{f/2}` for `p = 2` and `(-1)^{s-1 + (p^t+1)s/N} p^{f/2}`
/// otherwise, with `t` minimal such that `p^t ≡ -1`, `s = f/(2t)`.
pub fn pure_gauss(p: u64, n: u64, f: u64) -> Result<ClosedForm, OracleError> {
    let t = (1..=n)
        .find(|&t| crate::arith::pow_mod(p, t, n) == n - 1)
        .ok_or(OracleError::NotPure { p, n })?;
    let s = f / (2 * t);
    let mut e = BigInt::from(s - 1);
    if p != 2 {
        let pt = BigInt::from(p).pow(t as u32) + 1u32;
        e += pt / BigInt::from(n) * BigInt::from(s);
    }
    Ok(ClosedForm::p_power(p, f, Unit::neg_one_pow(&e), f))
}

/// `G(χ)^s / G(χ^s)` computed as `G(χ)^s · σ_{-1}G(χ^s) / q`, exactly.
pub fn power_ratio(chi: &Character<'_>, s: u64) -> Result<CycloElement, OracleError> {
    let q = BigInt::from(chi.context().q());
    let g = gauss_sum(chi);
    let gs = gauss_sum(&chi.pow(s as i64));
    let num = &g.pow(s) * &gs.conj();
    if chi.pow(s as i64).is_trivial() {
        // G(χ^s) = -1 for the trivial character.
        return Ok(-g.pow(s));
    }
    Ok(num.div_exact(&q)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, f: u32) -> FieldContext {
        FieldContext::build(p, f, 1 << 24).unwrap()
    }

    #[test]
    fn quadratic_over_prime_field() {
        for p in [3u64, 5, 7, 11, 13] {
            let c = ctx(p, 1);
            let chi = canonical_character(&c, 2).unwrap();
            let want = quadratic_gauss_fp(p).unwrap().to_cyclo(1).unwrap();
            assert_eq!(gauss_sum(&chi), want, "p = {p}");
        }
    }

    #[test]
    fn trivial_character() {
        let c = ctx(3, 2);
        let chi = canonical_character(&c, 4).unwrap().pow(0);
        assert_eq!(gauss_sum(&chi), CycloElement::from_int(-1, 1));
    }

    #[test]
    fn modulus_and_scaling() {
        let c = ctx(2, 4);
        let chi = canonical_character(&c, 5).unwrap();
        let g = gauss_sum(&chi);
        assert_eq!(&g * &g.conj(), CycloElement::from_int(16, 1));
        assert_eq!(g, CycloElement::from_int(4, 1));
        assert_eq!(gauss_sum_direct(&chi, 1), g);
        let c = ctx(11, 3);
        let chi = canonical_character(&c, 14).unwrap();
        for mu in 1..11 {
            assert_eq!(gauss_sum_direct(&chi, mu), gauss_sum_scaled(&chi, mu).unwrap());
        }
        assert!(gauss_sum_direct(&chi, 0).is_zero());
    }

    #[test]
    fn pure_values() {
        assert_eq!(pure_gauss(2, 5, 4).unwrap().to_cyclo(1).unwrap(), CycloElement::from_int(4, 1));
        assert_eq!(pure_gauss(3, 4, 2).unwrap().to_cyclo(1).unwrap(), CycloElement::from_int(-3, 1));
        assert_eq!(pure_gauss(2, 3, 2).unwrap().to_cyclo(1).unwrap(), CycloElement::from_int(2, 1));
        let c = ctx(2, 2);
        let chi = canonical_character(&c, 3).unwrap();
        assert_eq!(gauss_sum(&chi), CycloElement::from_int(2, 1));
    }

    #[test]
    fn identities_small() {
        let c = ctx(3, 4);
        for n in [5u64, 10, 16, 20, 40, 80] {
            let chi = canonical_character(&c, n).unwrap();
            for lam in 1..n {
                let x = chi.pow(lam as i64);
                if let Some(ok) = factorization_check(&x).unwrap() {
                    assert!(ok, "n = {n}, lambda = {lam}");
                }
                assert!(dh_product_check(&x).unwrap());
            }
        }
    }

    #[test]
    fn table_matches_single_sums() {
        let c = ctx(3, 4);
        let chi = canonical_character(&c, 16).unwrap();
        let t = gauss_sum_table(&chi);
        for (k, g) in t.iter().enumerate() {
            assert_eq!(*g, gauss_sum(&chi.pow(k as i64)), "k = {k}");
        }
    }

    #[test]
    fn lifted_quadratic() {
        let c = ctx(3, 2);
        let chi = canonical_character(&c, 2).unwrap();
        let want = quadratic_gauss_lifted(3, 2).unwrap().to_cyclo(1).unwrap();
        assert_eq!(gauss_sum(&chi), want);
        assert_eq!(dh_lift(&quadratic_gauss_fp(3).unwrap().to_cyclo(1).unwrap(), 2), want);
    }
}

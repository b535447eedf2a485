use gslab::arith::{cyclic_subgroup, is_prime, pow_mod, totient};
use gslab::classify::{classify_case, reduce_power, CaseTag};
use gslab::cyclo::{embed_sqrt_star, CycloElement, GaloisIndex};
use gslab::ffield::{canonical_character, FieldContext};
use gslab::oracle::{dh_lift, gauss_sum, gauss_sum_table};
use gslab::quad::QuadSurd;
use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;

const CONDUCTORS: &[u64] = &[1, 3, 4, 5, 7, 8, 9, 12, 15, 20, 21, 24, 28, 33];

fn element() -> impl Strategy<Value = CycloElement> {
    prop::sample::select(CONDUCTORS).prop_flat_map(|m| {
        prop::collection::vec(-50i64..50, m as usize).prop_map(move |c| CycloElement::from_exponent_counts(m, &c))
    })
}

fn triple() -> impl Strategy<Value = (CycloElement, CycloElement, CycloElement)> {
    (element(), element(), element())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms((a, b, c) in triple()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &CycloElement::one(1), a.clone());
    }

    #[test]
    fn galois_is_a_homomorphism((a, b) in (element(), element()), k in 1i64..200) {
        let m = a.conductor().lcm(&b.conductor());
        let g = (1..).map(|j| k + j - 1).find(|x| (*x as u64).gcd(&m) == 1).unwrap();
        let s = GaloisIndex::new(g, m).unwrap();
        prop_assert_eq!(
            (&a * &b).promote(m).unwrap().galois(s).unwrap(),
            &a.promote(m).unwrap().galois(s).unwrap() * &b.promote(m).unwrap().galois(s).unwrap()
        );
    }

    #[test]
    fn galois_composition(a in element(), x in 1i64..500, y in 1i64..500) {
        let m = a.conductor().max(2);
        let a = a.promote(m).unwrap();
        prop_assume!((x as u64).gcd(&m) == 1 && (y as u64).gcd(&m) == 1);
        let lhs = a.galois_apply(x).unwrap().galois_apply(y).unwrap();
        prop_assert_eq!(lhs, a.galois_apply(x * y).unwrap());
        prop_assert_eq!(a.galois_apply(-1).unwrap(), a.conj());
    }

    #[test]
    fn promotion_is_transparent((a, b) in (element(), element()), k in 1u64..4) {
        let m = a.conductor() * k;
        prop_assert_eq!(a.promote(m).unwrap(), a.clone());
        prop_assert_eq!(&a.promote(m).unwrap() * &b, &a * &b);
    }

    #[test]
    fn embedding_is_multiplicative((a, b) in (element(), element())) {
        let (ar, ai) = a.approx();
        let (br, bi) = b.approx();
        let prod = (&a * &b).complex_embed(25);
        let want = (ar * br - ai * bi, ar * bi + ai * br);
        let scale = 1.0 + want.0.abs() + want.1.abs();
        prop_assert!((prod.re_f64() - want.0).abs() < 1e-9 * scale);
        prop_assert!((prod.im_f64() - want.1).abs() < 1e-9 * scale);
    }

    #[test]
    fn quadratic_norm_is_multiplicative(d in prop::sample::select(vec![1u64, 2, 5, 7, 11, 15, 35, 39]),
                                        a in -40i64..40, b in -40i64..40, c in -40i64..40, e in -40i64..40) {
        let x = QuadSurd::new(d, a, b, 1).unwrap();
        let y = QuadSurd::new(d, c, e, 1).unwrap();
        prop_assert_eq!(x.mul(&y).unwrap().norm(), x.norm() * y.norm());
        prop_assert_eq!(x.pow(3).norm(), x.norm().pow(3));
    }

    #[test]
    fn log_round_trip(k in 0u64..80) {
        let ctx = FieldContext::build(3, 4, 1 << 20).unwrap();
        let x = ctx.exp(k);
        prop_assert_eq!(ctx.log(&x), Some(k));
        prop_assert_eq!(ctx.encode(&ctx.decode(ctx.encode(&x))), ctx.encode(&x));
    }

    #[test]
    fn frobenius_compatibility(k in 0u64..124, lam in 1i64..8) {
        let ctx = FieldContext::build(5, 3, 1 << 20).unwrap();
        let chi = canonical_character(&ctx, 124).unwrap().pow(lam);
        let x = ctx.exp(k);
        let lhs = chi.eval(&ctx.pow(&x, 5)).unwrap();
        prop_assert_eq!(lhs, chi.eval(&x).unwrap().galois_apply(5).unwrap());
    }
}

#[test]
fn sqrt_star_squares() {
    for p in [3u64, 5, 7, 11, 13, 17, 19, 23] {
        let s = embed_sqrt_star(p).unwrap();
        let pstar = if p % 4 == 1 { p as i64 } else { -(p as i64) };
        assert_eq!(&s * &s, CycloElement::from_int(pstar, 1), "p = {p}");
    }
}

#[test]
fn restriction_order_matches_values() {
    let ctx = FieldContext::build(7, 2, 1 << 20).unwrap();
    let base = canonical_character(&ctx, 48).unwrap();
    for lam in 0..48 {
        let chi = base.pow(lam);
        let mut ord = 1u64;
        for c in 1..7 {
            let k = chi.eval_int(c).map(|_| chi.eval_exponent(&ctx.from_int(c)).unwrap()).unwrap();
            ord = ord.lcm(&(48 / k.gcd(&48)));
        }
        assert_eq!(chi.restriction_order(), ord, "lambda = {lam}");
    }
}

#[test]
fn contexts_are_deterministic() {
    for (p, f) in [(2u64, 6u32), (3, 5), (5, 3), (11, 2)] {
        let a = FieldContext::build(p, f, 1 << 20).unwrap();
        let b = FieldContext::build(p, f, 1 << 20).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.trace_table(), b.trace_table());
        let q = a.q();
        let chi = canonical_character(&a, q - 1).unwrap();
        assert_eq!(gauss_sum(&chi), gauss_sum(&canonical_character(&b, q - 1).unwrap()));
    }
}

/// Every coprime `(N, p)` lands in exactly one family, consistent with the group data.
#[test]
fn classification_partition() {
    let mut seen = std::collections::BTreeMap::new();
    for n in 1..=200u64 {
        for p in (2..=50).filter(|&p| is_prime(p) && n % p != 0) {
            let c = classify_case(n, p).unwrap();
            *seen.entry(c.tag).or_insert(0) += 1;
            let pure = n > 2 && c.f % 2 == 0 && pow_mod(p, c.f / 2, n) == n - 1;
            assert_eq!(c.index * c.f, totient(n), "({n}, {p})");
            match c.tag {
                CaseTag::TrivialOrder => assert_eq!(n, 1),
                CaseTag::Quadratic => assert_eq!(n, 2),
                CaseTag::Pure => assert!(pure, "({n}, {p})"),
                CaseTag::NotIndex2 => assert!(!pure && n > 2 && (c.index != 2 || !has_case_shape(n)), "({n}, {p})"),
                t => {
                    assert!(!pure && c.index == 2, "({n}, {p}) tagged {t}");
                    assert!(c.field_disc.is_some(), "({n}, {p})");
                    if t.is_lettered() {
                        assert!(!cyclic_subgroup(p, n).contains(&(n - 1)));
                    }
                }
            }
        }
    }
    for t in [CaseTag::A, CaseTag::B1, CaseTag::B2, CaseTag::C, CaseTag::D, CaseTag::E1, CaseTag::E2, CaseTag::F1, CaseTag::F2, CaseTag::F3, CaseTag::Pure, CaseTag::NotIndex2] {
        assert!(seen.get(&t).copied().unwrap_or(0) > 0, "no instance of {t}");
    }
}

/// `N` of the shapes the lettered cases cover: `l^r`, `2^r`, `4 l^r`, `l1^r1 l2^r2`, `2 l1^r1 l2^r2`.
fn has_case_shape(n: u64) -> bool {
    let fac = gslab::arith::factorize(n);
    let r0 = fac.iter().find(|f| f.0 == 2).map_or(0, |f| f.1);
    let odd = fac.iter().filter(|f| f.0 != 2).count();
    matches!((r0, odd), (0, 1) | (1, 1) | (2, 1) | (0, 2) | (1, 2)) || (r0 >= 2 && odd == 0)
}

/// `G(χ^λ) = (-1)^{s-1} G_sub^s` with the sub-sum over `F_{p^{f_sub}}`, up to
/// the choice between the sub-character and its conjugate.
#[test]
fn reduce_power_matches_oracle() {
    let mut checked = 0;
    for n in 3..=40u64 {
        for p in (2..=19).filter(|&p| is_prime(p) && n % p != 0) {
            let info = classify_case(n, p).unwrap();
            if !info.tag.is_supported() || !info.q_fits(100_000) {
                continue;
            }
            let ctx = FieldContext::build(p, info.f as u32, 100_000).unwrap();
            let table = gauss_sum_table(&canonical_character(&ctx, n).unwrap());
            for lam in 1..n {
                let plan = reduce_power(&info, lam).unwrap();
                assert_eq!(plan.n_sub, n / lam.gcd(&n));
                assert_eq!(plan.f_sub * plan.lift_s, info.f);
                let sub_ctx = FieldContext::build(p, plan.f_sub as u32, 100_000).unwrap();
                let psi = canonical_character(&sub_ctx, plan.n_sub).unwrap();
                let g_sub = gauss_sum(&psi);
                let alt = gauss_sum(&psi.inverse());
                let (want, other) = if plan.conj_flag { (alt, g_sub) } else { (g_sub, alt) };
                let got = &table[lam as usize];
                let lifted = dh_lift(&want, plan.lift_s);
                let lifted_other = dh_lift(&other, plan.lift_s);
                assert!(
                    *got == lifted || *got == lifted_other,
                    "({n}, {p}, {lam}): no lift of the sub-sum matches"
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 500, "{checked}");
}

#[test]
fn lifted_pure_values_are_integers() {
    for (n, p) in [(5u64, 2u64), (9, 2), (4, 3), (13, 5), (10, 3)] {
        let info = classify_case(n, p).unwrap();
        assert_eq!(info.tag, CaseTag::Pure);
        let ctx = FieldContext::build(p, info.f as u32, 1 << 20).unwrap();
        let g = gauss_sum(&canonical_character(&ctx, n).unwrap());
        let v = g.to_integer().expect("pure sums are rational");
        assert_eq!(&v * &v, BigInt::from(p).pow(info.f as u32));
    }
}

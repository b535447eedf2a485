//! Class numbers against the analytic formula `h(D) = (w / 2|D|) |Σ_a χ_D(a) a|`.

use gslab::quad::{class_number, reduced_forms};

/// Kronecker symbol `(D / n)` for `n > 0`, computed from scratch.
fn kronecker(d: i64, mut n: i64) -> i64 {
    let mut r = 1;
    while n % 2 == 0 {
        n /= 2;
        r *= match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    let (mut a, mut m) = (d.rem_euclid(n), n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if m % 8 == 3 || m % 8 == 5 {
                r = -r;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            r = -r;
        }
        a %= m;
    }
    if m == 1 {
        r
    } else {
        0
    }
}

fn dirichlet_class_number(d: u64) -> i64 {
    let disc = if d % 4 == 3 { -(d as i64) } else { -4 * d as i64 };
    let w = match disc {
        -3 => 6,
        -4 => 4,
        _ => 2,
    };
    let m = disc.abs();
    let s: i64 = (1..m).map(|a| kronecker(disc, a) * a).sum();
    w * s.abs() / (2 * m)
}

#[test]
fn named_class_numbers() {
    for (d, h) in [(7, 1), (11, 1), (15, 2), (35, 2), (39, 4)] {
        assert_eq!(class_number(d).unwrap(), h, "d = {d}");
        assert_eq!(dirichlet_class_number(d), h as i64, "d = {d}");
    }
}

#[test]
fn forms_agree_with_analytic_formula() {
    for d in (1..400u64).filter(|&d| gslab::arith::is_squarefree(d)) {
        assert_eq!(class_number(d).unwrap() as i64, dirichlet_class_number(d), "d = {d}");
    }
}

#[test]
fn reduced_forms_are_reduced() {
    for d in [5u64, 15, 23, 39, 47, 71, 105] {
        let disc = if d % 4 == 3 { -(d as i64) } else { -4 * d as i64 };
        for (a, b, c) in reduced_forms(d).unwrap() {
            assert_eq!(b * b - 4 * a * c, disc);
            assert!(b.abs() <= a && a <= c);
            if b.abs() == a || a == c {
                assert!(b >= 0);
            }
        }
    }
}

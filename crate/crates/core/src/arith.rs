//! Small-integer number theory shared by every module.

use num_integer::Integer;

/// Modular exponentiation with 128-bit intermediates.
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m128 = m as u128;
    let mut b = (base % m) as u128;
    let mut acc: u128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Deterministic Miller–Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &sp in &SMALL {
        if n % sp == 0 {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn totient(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn is_squarefree(n: u64) -> bool {
    n > 0 && factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Multiplicative order of `a` modulo `n`, via the factorization of φ(n).
/// Returns `None` when `gcd(a, n) != 1`.
pub fn mult_order(a: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(1);
    }
    if a.gcd(&n) != 1 {
        return None;
    }
    let phi = totient(n);
    let mut ord = phi;
    for (r, _) in factorize(phi) {
        while ord % r == 0 && pow_mod(a, ord / r, n) == 1 {
            ord /= r;
        }
    }
    Some(ord)
}

/// The cyclic subgroup generated by `a` in (Z/n)^*, sorted.
pub fn cyclic_subgroup(a: u64, n: u64) -> Vec<u64> {
    let mut out = vec![1 % n];
    let mut x = a % n;
    while x != 1 % n {
        out.push(x);
        x = ((x as u128 * a as u128) % n as u128) as u64;
    }
    out.sort_unstable();
    out
}

/// Jacobi symbol (a/n) for odd positive n.
pub fn jacobi(a: i64, n: u64) -> i32 {
    assert!(n % 2 == 1, "jacobi symbol needs odd modulus");
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut sign = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Kronecker symbol (D/n) for n > 0.
pub fn kronecker(d: i64, n: u64) -> i32 {
    let mut n = n;
    let mut out = 1;
    while n % 2 == 0 {
        n /= 2;
        if d % 2 == 0 {
            return 0;
        }
        if d.rem_euclid(8) == 3 || d.rem_euclid(8) == 5 {
            out = -out;
        }
    }
    if n == 1 {
        return out;
    }
    out * jacobi(d, n)
}

/// p-adic valuation of n.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n != 0 && n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Solves x = r1 (mod m1), x = r2 (mod m2) for coprime moduli.
pub fn crt_pair(r1: u64, m1: u64, r2: u64, m2: u64) -> u64 {
    let m = m1 as i128 * m2 as i128;
    let e = num_integer::Integer::extended_gcd(&(m1 as i128), &(m2 as i128));
    debug_assert_eq!(e.gcd, 1);
    let x = r1 as i128 + (r2 as i128 - r1 as i128) * e.x % m2 as i128 * m1 as i128;
    x.rem_euclid(m) as u64
}

/// Integer square root of a perfect square, or `None`.
pub fn exact_isqrt(n: u64) -> Option<u64> {
    let r = num_integer::Roots::sqrt(&n);
    (r * r == n).then_some(r)
}

/// `base^exp` if it fits in `u64`.
pub fn checked_pow(base: u64, exp: u64) -> Option<u64> {
    let e = u32::try_from(exp).ok()?;
    base.checked_pow(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_orders() {
        assert!(is_prime(2) && is_prime(103) && !is_prime(1) && !is_prime(561));
        assert!(is_prime(18446744073709551557));
        assert_eq!(mult_order(11, 14), Some(3));
        assert_eq!(mult_order(17, 30), Some(4));
        assert_eq!(mult_order(1, 9), Some(1));
        assert_eq!(mult_order(3, 9), None);
    }

    #[test]
    fn symbols() {
        assert_eq!(jacobi(2, 7), 1);
        assert_eq!(jacobi(3, 7), -1);
        assert_eq!(jacobi(5, 15), 0);
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(-8, 3), 1);
    }

    #[test]
    fn crt_and_factor() {
        let x = crt_pair(3, 7, 1, 11);
        assert_eq!((x % 7, x % 11), (3, 1));
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(totient(154), 60);
        assert_eq!(cyclic_subgroup(11, 14), vec![1, 9, 11]);
    }
}

//! Per-case closed forms for `G(χ^λ)`, indexed by the valuations of `gcd(λ, N)`.

use num_bigint::BigInt;
use num_integer::Integer;

use crate::arith::{jacobi, totient, valuation};
use crate::classify::{CaseInfo, CaseTag};
use crate::closed::{ClosedForm, Unit};
use crate::evaluator::{omega_aa, omega_b1, EvalError};
use crate::quad::{solve_norm_f1, two_square, QuadSurd};

/// A table entry: candidate forms plus normalization notes.
#[derive(Clone, Debug)]
pub struct ExplicitValue {
    pub forms: Vec<ClosedForm>,
    pub notes: Vec<String>,
    /// Disagreement with the generic engine is reported as a warning only.
    pub demoted: bool,
}

struct Builder {
    p: u64,
    f: u64,
    notes: Vec<String>,
    demoted: bool,
}

impl Builder {
    fn form(&self, unit: Unit, k: i64) -> Result<ClosedForm, EvalError> {
        if k < 0 {
            return Err(EvalError::Internal(format!("negative p-exponent {k}/2")));
        }
        Ok(ClosedForm::p_power(self.p, self.f, unit, k as u64))
    }

    fn pair(&self, unit: Unit, k: i64, w: &[QuadSurd; 2], m: u64) -> Result<Vec<ClosedForm>, EvalError> {
        let base = self.form(unit, k)?;
        Ok(w.iter().map(|w| base.clone().with_surd(w.clone(), m)).collect())
    }

    fn note(&mut self, s: &str) {
        self.notes.push(s.to_string());
    }

    fn done(self, forms: Vec<ClosedForm>) -> Option<Result<ExplicitValue, EvalError>> {
        Some(Ok(ExplicitValue { forms, notes: self.notes, demoted: self.demoted }))
    }
}

fn sign(neg: bool) -> Unit {
    Unit::sign(neg)
}

/// `(-1)^{(p^{φ(m)/2} + 1) / (2m)}`.
fn quotient_sign(p: u64, m: u64) -> Unit {
    let e = (BigInt::from(p).pow((totient(m) / 2) as u32) + 1u32) / BigInt::from(2 * m);
    Unit::neg_one_pow(&e)
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return Some(Err(e.into())),
        }
    };
}

/// The tabulated value of `G(χ^λ)` for `1 <= λ < N`, or `None` where no entry exists.
pub fn explicit_value(info: &CaseInfo, lambda: u64) -> Option<Result<ExplicitValue, EvalError>> {
    let (p, f) = (info.p, info.f);
    let fi = f as i64;
    let d = lambda.gcd(&info.n);
    let mut b = Builder { p, f, notes: Vec::new(), demoted: false };
    match info.tag {
        CaseTag::A => {
            let l = info.l1();
            let big_l = l.pow(valuation(d, l));
            let (h, w) = tri!(omega_aa(p, l));
            let forms = tri!(b.pair(Unit::ONE, fi - (h * big_l) as i64, &w, big_l));
            b.done(forms)
        }
        CaseTag::B1 | CaseTag::B2 => {
            let (l1, r1, l2, r2) = (info.l1(), info.r1, info.l2(), info.r2);
            let (x, y) = (valuation(d, l1), valuation(d, l2));
            let forms = if x < r1 && y < r2 {
                let big_l = l1.pow(x) * l2.pow(y);
                if info.tag == CaseTag::B1 {
                    let (h, w) = tri!(omega_b1(p, l1, l2));
                    tri!(b.pair(Unit::ONE, fi - (h * big_l) as i64, &w, big_l))
                } else if jacobi(l2 as i64, l1) == 1 {
                    vec![tri!(b.form(Unit::ONE, fi))]
                } else {
                    let (h, w) = tri!(omega_aa(p, l1));
                    tri!(b.pair(Unit::ONE, fi - (2 * h * big_l) as i64, &w, 2 * big_l))
                }
            } else if x == r1 && y < r2 {
                vec![tri!(b.form(Unit::ONE, fi))]
            } else if info.tag == CaseTag::B1 {
                vec![tri!(b.form(Unit::MINUS_ONE, fi))]
            } else {
                let big_l = l1.pow(x) * totient(l2.pow(r2));
                let (h, w) = tri!(omega_aa(p, l1));
                tri!(b.pair(Unit::MINUS_ONE, fi - (h * big_l) as i64, &w, big_l))
            };
            b.done(forms)
        }
        CaseTag::C => {
            let t = info.r0;
            let s = t - valuation(d, 2);
            let top = 1i64 << (t - 2);
            if p % 8 == 3 {
                let (a, bb) = tri!(two_square(p, 2));
                let w = [tri!(QuadSurd::new(2, a, bb as i64, 1)), tri!(QuadSurd::new(2, a, -(bb as i64), 1))];
                let forms = if s == t {
                    let mut v = tri!(b.pair(Unit::ONE, top - 2, &w, 1));
                    v = v.into_iter().map(|g| g.with_pstar(1).with_units(Unit::pm())).collect();
                    v
                } else if s >= 3 {
                    let e = 1u64 << (t - s);
                    let unit = if t - s == 1 { Unit::ONE } else { Unit::MINUS_ONE };
                    tri!(b.pair(unit, top - e as i64, &w, e))
                } else if s == 1 && t == 3 {
                    vec![tri!(b.form(Unit::ONE, 2))]
                } else {
                    vec![tri!(b.form(Unit::MINUS_ONE, top))]
                };
                b.done(forms)
            } else {
                let (a, bb) = tri!(two_square(p, 1));
                let w = [tri!(QuadSurd::new(1, a, bb as i64, 1)), tri!(QuadSurd::new(1, a, -(bb as i64), 1))];
                let forms = if s == t {
                    return None;
                } else if s >= 2 {
                    b.note("unit-set: entry compared up to units {1, i, -1, -i}");
                    let e = 1u64 << (t - s - 1);
                    tri!(b.pair(Unit::MINUS_ONE, top - e as i64, &w, e))
                        .into_iter()
                        .map(|g| g.with_units(Unit::all4()))
                        .collect()
                } else {
                    vec![tri!(b.form(Unit::MINUS_ONE, top))]
                };
                b.done(forms)
            }
        }
        CaseTag::D => {
            let (l, r) = (info.l1(), info.r1);
            let (i, t) = (valuation(d, 2), valuation(d, l));
            let big_l = l.pow(t);
            let half = (p - 1) / 2;
            let forms = if i == 0 && t < r {
                if l % 8 == 3 {
                    b.note("sign: (-1)^{(p-1)/2 (r-1)} without a t-dependent term");
                    let (h, w) = tri!(omega_aa(p, l));
                    let u = sign((half * (r as u64 - 1)) % 2 == 1);
                    tri!(b.pair(u, fi - 1 - (2 * h * big_l) as i64, &w, 2 * big_l))
                        .into_iter()
                        .map(|g| g.with_pstar(1))
                        .collect()
                } else {
                    b.note("sign: (-1)^{(p-1)/2 r} without a t-dependent term");
                    let u = sign((half * r as u64) % 2 == 1);
                    vec![tri!(b.form(u, fi - 1)).with_pstar(1)]
                }
            } else if i == 1 && t < r {
                b.note("half-integer-surd: (a + b sqrt(-l)) read as omega = (a + b sqrt(-l))/2");
                let (h, w) = tri!(omega_aa(p, l));
                tri!(b.pair(Unit::ONE, fi - (h * big_l) as i64, &w, big_l))
            } else {
                vec![tri!(crate::oracle::quadratic_gauss_lifted(p, f))]
            };
            b.done(forms)
        }
        CaseTag::E1 => {
            let (l1, r1, l2, r2) = (info.l1(), info.r1, info.l2(), info.r2);
            let (i, x, y) = (valuation(d, 2), valuation(d, l1), valuation(d, l2));
            let big_l = l1.pow(x) * l2.pow(y);
            let forms = if i == 0 && x < r1 && y < r2 {
                b.note("branch: l1 l2 = 7 (mod 8) gives -p^{f/2}");
                if (l1 * l2) % 8 == 7 {
                    vec![tri!(b.form(Unit::MINUS_ONE, fi))]
                } else {
                    let (h, w) = tri!(omega_b1(p, l1, l2));
                    tri!(b.pair(Unit::MINUS_ONE, fi - (2 * h * big_l) as i64, &w, 2 * big_l))
                }
            } else if i == 0 && x == r1 && y < r2 {
                b.note("sign: quotient exponent taken over the 1 (mod 4) prime");
                vec![tri!(b.form(quotient_sign(p, l2.pow(r2 - y)), fi))]
            } else if y == r2 {
                vec![tri!(b.form(Unit::MINUS_ONE, fi))]
            } else if x < r1 {
                let (h, w) = tri!(omega_b1(p, l1, l2));
                tri!(b.pair(Unit::ONE, fi - (h * big_l) as i64, &w, big_l))
            } else {
                vec![tri!(b.form(Unit::ONE, fi))]
            };
            b.done(forms)
        }
        CaseTag::E2 => {
            let (l1, r1, l2, r2) = (info.l1(), info.r1, info.l2(), info.r2);
            let (i, x, y) = (valuation(d, 2), valuation(d, l1), valuation(d, l2));
            let big_l = l1.pow(x) * l2.pow(y);
            let big_lp = l1.pow(x) * totient(l2.pow(r2));
            let sg = sign(((p - 1) / 2 * ((l2 - 1) / 2) + 1) % 2 == 1);
            let forms = if i == 0 && x < r1 && y < r2 {
                b.note("sign: (-1)^{(p-1)/2 (l2-1)/2 + 1}");
                if jacobi(l2 as i64, l1) == -1 && l1 % 8 == 3 {
                    let (h, w) = tri!(omega_aa(p, l1));
                    tri!(b.pair(sg, fi - (4 * big_l * h) as i64, &w, 4 * big_l))
                } else {
                    vec![tri!(b.form(sg, fi))]
                }
            } else if i == 0 && x == r1 && y < r2 {
                vec![tri!(b.form(quotient_sign(p, l2.pow(r2 - y)), fi))]
            } else if i == 0 && x < r1 && y == r2 {
                if l1 % 8 == 3 {
                    b.demoted = true;
                    let u = sign(((p - 1) / 2 * l2 / 2) % 2 == 1);
                    let (h, w) = tri!(omega_aa(p, l1));
                    tri!(b.pair(u, fi - (2 * big_lp * h) as i64, &w, 2 * big_lp))
                } else {
                    vec![tri!(b.form(sg, fi))]
                }
            } else if i == 0 {
                b.demoted = true;
                vec![tri!(b.form(Unit::MINUS_ONE, fi))]
            } else if x < r1 && y < r2 {
                if jacobi(l2 as i64, l1) == 1 {
                    vec![tri!(b.form(Unit::ONE, fi))]
                } else {
                    let (h, w) = tri!(omega_aa(p, l1));
                    tri!(b.pair(Unit::ONE, fi - (2 * big_l * h) as i64, &w, 2 * big_l))
                }
            } else if x == r1 {
                vec![tri!(b.form(Unit::ONE, fi))]
            } else {
                let (h, w) = tri!(omega_aa(p, l1));
                tri!(b.pair(Unit::MINUS_ONE, fi - (big_lp * h) as i64, &w, big_lp))
            };
            b.done(forms)
        }
        CaseTag::F1 | CaseTag::F2 | CaseTag::F3 => {
            let (l, r) = (info.l1(), info.r1);
            let (i, t) = (valuation(d, 2), valuation(d, l));
            let big_l = l.pow(t);
            let forms = match info.tag {
                CaseTag::F1 => {
                    if i == 0 && t < r {
                        b.note("sub-degree: norm equation solved at f_sub = f / l^t");
                        let sol = tri!(solve_norm_f1(p, l, f / big_l));
                        let w = [sol.surd(1), sol.surd(-1)];
                        tri!(b.pair(Unit::ONE, fi - (sol.h * big_l) as i64, &w, big_l))
                    } else if i == 2 {
                        vec![tri!(b.form(Unit::ONE, fi))]
                    } else {
                        vec![tri!(b.form(Unit::MINUS_ONE, fi))]
                    }
                }
                CaseTag::F2 => {
                    if i == 0 && t < r {
                        b.note("unit-set: entry compared up to units {1, i, -1, -i}");
                        if l % 4 == 1 {
                            vec![tri!(b.form(Unit::ONE, fi)).with_units(Unit::all4())]
                        } else {
                            let (a, bb) = tri!(two_square(p, 1));
                            let w = [tri!(QuadSurd::new(1, a, bb as i64, 1)), tri!(QuadSurd::new(1, a, -(bb as i64), 1))];
                            tri!(b.pair(Unit::ONE, fi - big_l as i64, &w, big_l))
                                .into_iter()
                                .map(|g| g.with_units(Unit::all4()))
                                .collect()
                        }
                    } else if i == 0 {
                        return None;
                    } else if i == 1 {
                        vec![tri!(b.form(Unit::MINUS_ONE, fi))]
                    } else {
                        vec![tri!(b.form(Unit::ONE, fi))]
                    }
                }
                _ => {
                    let sg = sign(((p + 1) / 4) % 2 == 1);
                    let h = tri!(crate::quad::class_number(l));
                    let w = || omega_aa(p, l).map(|x| x.1);
                    if i == 0 && (t == r || l % 8 == 7) {
                        vec![tri!(b.form(sg, fi))]
                    } else if i == 0 {
                        tri!(b.pair(sg, fi - (2 * big_l * h) as i64, &tri!(w()), 2 * big_l))
                    } else if i == 1 && (t == r || l % 8 == 7) {
                        if t < r {
                            b.note("branch: l = 7 (mod 8) gives p^{f/2}");
                        }
                        vec![tri!(b.form(Unit::ONE, fi))]
                    } else if i == 1 {
                        tri!(b.pair(Unit::ONE, fi - (4 * big_l * h) as i64, &tri!(w()), 4 * big_l))
                    } else {
                        tri!(b.pair(Unit::MINUS_ONE, fi - (2 * big_l * h) as i64, &tri!(w()), 2 * big_l))
                    }
                }
            };
            b.done(forms)
        }
        _ => None,
    }
}

//! Index-2 case classification and reduction of powers `χ^λ` to primitive sub-characters.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use thiserror::Error;

pub use crate::arith::mult_order as order_mod;
use crate::arith::{factorize, is_prime, totient};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("{p} and {n} are not coprime")]
    NotCoprime { p: u64, n: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("order must be positive")]
    ZeroOrder,
    #[error("lambda = {lambda} is outside 0..{n}")]
    LambdaOutOfRange { lambda: u64, n: u64 },
}

/// Multiplicative order of `p` modulo `n`.
pub fn mult_order(p: u64, n: u64) -> Result<u64, ClassifyError> {
    if n == 0 {
        return Err(ClassifyError::ZeroOrder);
    }
    order_mod(p, n).ok_or(ClassifyError::NotCoprime { p, n })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseTag {
    A,
    B1,
    B2,
    C,
    D,
    E1,
    E2,
    F1,
    F2,
    F3,
    Pure,
    Quadratic,
    Quartic,
    TrivialOrder,
    NotIndex2,
    NotSupportedL3,
}

impl CaseTag {
    pub const ALL: [CaseTag; 16] = [
        CaseTag::A,
        CaseTag::B1,
        CaseTag::B2,
        CaseTag::C,
        CaseTag::D,
        CaseTag::E1,
        CaseTag::E2,
        CaseTag::F1,
        CaseTag::F2,
        CaseTag::F3,
        CaseTag::Pure,
        CaseTag::Quadratic,
        CaseTag::Quartic,
        CaseTag::TrivialOrder,
        CaseTag::NotIndex2,
        CaseTag::NotSupportedL3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseTag::A => "A",
            CaseTag::B1 => "B1",
            CaseTag::B2 => "B2",
            CaseTag::C => "C",
            CaseTag::D => "D",
            CaseTag::E1 => "E1",
            CaseTag::E2 => "E2",
            CaseTag::F1 => "F1",
            CaseTag::F2 => "F2",
            CaseTag::F3 => "F3",
            CaseTag::Pure => "PURE",
            CaseTag::Quadratic => "QUADRATIC",
            CaseTag::Quartic => "QUARTIC",
            CaseTag::TrivialOrder => "TRIVIAL_ORDER",
            CaseTag::NotIndex2 => "NOT_INDEX2",
            CaseTag::NotSupportedL3 => "NOT_SUPPORTED_L3",
        }
    }

    /// One of the ten lettered index-2 cases.
    pub fn is_lettered(self) -> bool {
        matches!(
            self,
            CaseTag::A
                | CaseTag::B1
                | CaseTag::B2
                | CaseTag::C
                | CaseTag::D
                | CaseTag::E1
                | CaseTag::E2
                | CaseTag::F1
                | CaseTag::F2
                | CaseTag::F3
        )
    }

    /// Whether the evaluator produces a value.
    pub fn is_supported(self) -> bool {
        !matches!(self, CaseTag::NotIndex2 | CaseTag::NotSupportedL3)
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        CaseTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown case tag {s}"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseInfo {
    pub tag: CaseTag,
    pub n: u64,
    pub p: u64,
    pub f: u64,
    /// `[(Z/N)^* : <p>]`.
    pub index: u64,
    pub r0: u32,
    pub l1: Option<u64>,
    pub r1: u32,
    pub l2: Option<u64>,
    pub r2: u32,
    /// Index of `<p>` in each component group `(Z/2^{r0})^*`, `(Z/l1^{r1})^*`, `(Z/l2^{r2})^*`.
    pub a0: u64,
    pub a1: u64,
    pub a2: u64,
    /// `d` with `K = Q(sqrt(-d))`.
    pub field_disc: Option<u64>,
}

impl CaseInfo {
    pub fn l1(&self) -> u64 {
        self.l1.expect("case has an odd prime l1")
    }

    pub fn l2(&self) -> u64 {
        self.l2.expect("case has a second odd prime l2")
    }

    pub fn q_fits(&self, budget: u64) -> bool {
        crate::arith::checked_pow(self.p, self.f).is_some_and(|q| q <= budget)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let opt = |x: Option<u64>| x.map(|v| v.to_string());
        serde_json::json!({
            "tag": self.tag.name(),
            "N": self.n.to_string(),
            "p": self.p.to_string(),
            "f": self.f.to_string(),
            "index": self.index.to_string(),
            "factorization": {
                "r0": self.r0.to_string(),
                "l1": opt(self.l1),
                "r1": self.r1.to_string(),
                "l2": opt(self.l2),
                "r2": self.r2.to_string(),
            },
            "component_orders": [self.a0.to_string(), self.a1.to_string(), self.a2.to_string()],
            "field_disc": opt(self.field_disc),
        })
    }
}

fn component_index(p: u64, m: u64) -> u64 {
    if m <= 2 {
        return 1;
    }
    totient(m) / order_mod(p, m).expect("coprime")
}

/// Assigns the case tag and parameters to `(N, p)`.
pub fn classify_case(n: u64, p: u64) -> Result<CaseInfo, ClassifyError> {
    if n == 0 {
        return Err(ClassifyError::ZeroOrder);
    }
    if !is_prime(p) {
        return Err(ClassifyError::NotPrime(p));
    }
    let f = mult_order(p, n)?;
    let phi = totient(n);
    let mut info = CaseInfo {
        tag: CaseTag::NotIndex2,
        n,
        p,
        f,
        index: phi / f,
        r0: 0,
        l1: None,
        r1: 0,
        l2: None,
        r2: 0,
        a0: 1,
        a1: 1,
        a2: 1,
        field_disc: None,
    };
    let fac = factorize(n);
    info.r0 = fac.iter().find(|&&(l, _)| l == 2).map_or(0, |&(_, r)| r);
    let odd: Vec<(u64, u32)> = fac.into_iter().filter(|&(l, _)| l != 2).collect();
    info.a0 = component_index(p, 1 << info.r0);
    if n == 1 {
        info.tag = CaseTag::TrivialOrder;
        return Ok(info);
    }
    if n == 2 {
        info.tag = CaseTag::Quadratic;
        return Ok(info);
    }
    if crate::arith::pow_mod(p, f / 2, n) == n - 1 && f % 2 == 0 {
        info.tag = CaseTag::Pure;
        set_odd(&mut info, &odd, p);
        return Ok(info);
    }
    if info.index != 2 {
        set_odd(&mut info, &odd, p);
        return Ok(info);
    }
    let r0 = info.r0;
    info.tag = match (r0, odd.as_slice()) {
        (0, &[(l, r)]) => {
            set_one(&mut info, l, r, p);
            info.field_disc = Some(l);
            if l == 3 {
                CaseTag::NotSupportedL3
            } else {
                CaseTag::A
            }
        }
        (0 | 1, &[(la, ra), (lb, rb)]) => {
            let aa = component_index(p, la.pow(ra));
            let ab = component_index(p, lb.pow(rb));
            if aa * ab == 1 {
                let (first, second) = if la % 4 == 3 { ((la, ra), (lb, rb)) } else { ((lb, rb), (la, ra)) };
                set_two(&mut info, first, second, p);
                info.field_disc = Some(la * lb);
                if r0 == 0 {
                    CaseTag::B1
                } else {
                    CaseTag::E1
                }
            } else {
                let (first, second) = if aa == 2 { ((la, ra), (lb, rb)) } else { ((lb, rb), (la, ra)) };
                set_two(&mut info, first, second, p);
                info.field_disc = Some(first.0);
                if first.0 == 3 {
                    CaseTag::NotSupportedL3
                } else if r0 == 0 {
                    CaseTag::B2
                } else {
                    CaseTag::E2
                }
            }
        }
        (r, &[]) if r >= 3 => {
            info.field_disc = Some(if p % 8 == 3 { 2 } else { 1 });
            CaseTag::C
        }
        (2, &[]) => {
            info.field_disc = Some(1);
            CaseTag::Quartic
        }
        (1, &[(l, r)]) => {
            set_one(&mut info, l, r, p);
            info.field_disc = Some(l);
            if l == 3 {
                CaseTag::NotSupportedL3
            } else {
                CaseTag::D
            }
        }
        (2, &[(l, r)]) => {
            set_one(&mut info, l, r, p);
            match (info.a0, info.a1) {
                (1, 1) => {
                    info.field_disc = Some(l);
                    CaseTag::F1
                }
                (2, 1) => {
                    info.field_disc = Some(1);
                    CaseTag::F2
                }
                _ => {
                    info.field_disc = Some(l);
                    if l == 3 {
                        CaseTag::NotSupportedL3
                    } else {
                        CaseTag::F3
                    }
                }
            }
        }
        _ => CaseTag::NotIndex2,
    };
    Ok(info)
}

fn set_one(info: &mut CaseInfo, l: u64, r: u32, p: u64) {
    info.l1 = Some(l);
    info.r1 = r;
    info.a1 = component_index(p, l.pow(r));
}

fn set_two(info: &mut CaseInfo, first: (u64, u32), second: (u64, u32), p: u64) {
    set_one(info, first.0, first.1, p);
    info.l2 = Some(second.0);
    info.r2 = second.1;
    info.a2 = component_index(p, second.0.pow(second.1));
}

fn set_odd(info: &mut CaseInfo, odd: &[(u64, u32)], p: u64) {
    if let Some(&(l, r)) = odd.first() {
        set_one(info, l, r, p);
    }
    if let Some(&(l, r)) = odd.get(1) {
        info.l2 = Some(l);
        info.r2 = r;
        info.a2 = component_index(p, l.pow(r));
    }
}

/// How `G(χ^λ)` reduces to a primitive sub-character over a subfield.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerPlan {
    pub lambda: u64,
    pub n: u64,
    pub d: u64,
    pub n_sub: u64,
    pub f: u64,
    pub f_sub: u64,
    pub lift_s: u64,
    /// The unit part of `λ` lies in `-<p>` rather than `<p>` modulo `N_sub`.
    pub conj_flag: bool,
    pub sub_case: CaseInfo,
}

impl PowerPlan {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lambda": self.lambda.to_string(),
            "N_sub": self.n_sub.to_string(),
            "f_sub": self.f_sub.to_string(),
            "lift_s": self.lift_s.to_string(),
            "conj_flag": self.conj_flag,
            "sub_case": self.sub_case.to_json(),
        })
    }
}

/// `G(χ^λ) = (-1)^{s-1} G_sub^s`, `G_sub` the order-`N_sub` sum over `F_{p^{f_sub}}`.
pub fn reduce_power(info: &CaseInfo, lambda: u64) -> Result<PowerPlan, ClassifyError> {
    let n = info.n;
    if lambda >= n && n > 1 {
        return Err(ClassifyError::LambdaOutOfRange { lambda, n });
    }
    let d = lambda.gcd(&n);
    let n_sub = if d == 0 { 1 } else { n / d };
    let sub_case = classify_case(n_sub, info.p)?;
    let f_sub = sub_case.f;
    let unit = if n_sub == 1 { 0 } else { (lambda / d) % n_sub };
    let conj_flag = n_sub > 2 && !crate::arith::cyclic_subgroup(info.p, n_sub).contains(&unit);
    Ok(PowerPlan {
        lambda,
        n,
        d,
        n_sub,
        f: info.f,
        f_sub,
        lift_s: info.f / f_sub,
        conj_flag,
        sub_case,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        assert_eq!(mult_order(11, 14).unwrap(), 3);
        assert_eq!(mult_order(17, 30).unwrap(), 4);
        assert_eq!(mult_order(1, 9).unwrap(), 1);
        assert!(mult_order(3, 9).is_err());
    }

    #[test]
    fn examples() {
        let c = classify_case(14, 11).unwrap();
        assert_eq!((c.tag, c.l1, c.r1, c.f, c.field_disc), (CaseTag::D, Some(7), 1, 3, Some(7)));
        let c = classify_case(39, 2).unwrap();
        assert_eq!((c.tag, c.l1, c.l2, c.f, c.field_disc), (CaseTag::B1, Some(3), Some(13), 12, Some(39)));
        let c = classify_case(8, 3).unwrap();
        assert_eq!((c.tag, c.f, c.field_disc), (CaseTag::C, 2, Some(2)));
        let c = classify_case(20, 3).unwrap();
        assert_eq!((c.tag, c.l1, c.f), (CaseTag::F1, Some(5), 4));
        assert_eq!(classify_case(5, 2).unwrap().tag, CaseTag::Pure);
        let c = classify_case(70, 103).unwrap();
        assert_eq!((c.tag, c.f, c.field_disc), (CaseTag::E1, 12, Some(35)));
        assert_eq!(classify_case(30, 17).unwrap().tag, CaseTag::E1);
        assert_eq!(classify_case(22, 3).unwrap().tag, CaseTag::D);
        assert_eq!(classify_case(44, 3).unwrap().tag, CaseTag::F3);
        assert_eq!(classify_case(28, 5).unwrap().tag, CaseTag::F2);
        assert_eq!(classify_case(7, 2).unwrap().tag, CaseTag::A);
        assert_eq!(classify_case(9, 2).unwrap().tag, CaseTag::Pure);
        assert_eq!(classify_case(15, 2).unwrap().tag, CaseTag::B1);
    }

    #[test]
    fn power_plans() {
        let info = classify_case(14, 11).unwrap();
        let plan = reduce_power(&info, 7).unwrap();
        assert_eq!((plan.n_sub, plan.f_sub, plan.lift_s), (2, 1, 3));
        let plan = reduce_power(&info, 3).unwrap();
        assert_eq!(plan.n_sub, 14);
        assert!(plan.conj_flag);
        let plan = reduce_power(&info, 0).unwrap();
        assert_eq!(plan.sub_case.tag, CaseTag::TrivialOrder);
        assert!(reduce_power(&info, 14).is_err());
    }
}

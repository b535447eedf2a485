//! Symbolic Gauss sum values
//! `u · p^{k/2} · (√p*)^e · ω^m · ρ^r`, with `u` an eighth root of unity,
//! `ω` a quadratic surd and `ρ = sqrt(√p* · ω)` an optional square-root atom.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::cyclo::{embed_quad_surd, embed_sqrt_star, surd_conductor, CycloElement};
use crate::quad::QuadSurd;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("unit is unresolved; candidates {0:?}")]
    UnresolvedUnit(Vec<Unit>),
    #[error("the square-root atom is not realizable in a cyclotomic ring")]
    RootNotInField,
    #[error("sqrt(p*) is undefined for p = 2")]
    NoPStar,
    #[error("norm of the surd is not a power of p")]
    NormNotPPower,
    #[error(transparent)]
    Cyclo(#[from] crate::cyclo::CycloError),
}

/// The root of unity `ζ_8^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Unit(u8);

impl Unit {
    pub const ONE: Unit = Unit(0);
    pub const I: Unit = Unit(2);
    pub const MINUS_ONE: Unit = Unit(4);
    pub const MINUS_I: Unit = Unit(6);

    pub fn zeta8(k: i64) -> Unit {
        Unit(k.rem_euclid(8) as u8)
    }

    pub fn sign(negative: bool) -> Unit {
        if negative {
            Self::MINUS_ONE
        } else {
            Self::ONE
        }
    }

    /// `(-1)^e`.
    pub fn neg_one_pow(e: &BigInt) -> Unit {
        Self::sign(e.is_odd())
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn mul(self, o: Unit) -> Unit {
        Unit((self.0 + o.0) % 8)
    }

    pub fn pow(self, e: u64) -> Unit {
        Unit(((self.0 as u64 * (e % 8)) % 8) as u8)
    }

    pub fn conj(self) -> Unit {
        Unit((8 - self.0) % 8)
    }

    pub fn is_real(self) -> bool {
        self.0 % 4 == 0
    }

    pub fn conductor(self) -> u64 {
        match self.0 {
            0 => 1,
            4 => 2,
            2 | 6 => 4,
            _ => 8,
        }
    }

    /// The unit in `Z[ζ_c]` for its own conductor `c`.
    pub fn to_cyclo(self) -> CycloElement {
        match self.0 {
            0 => CycloElement::one(1),
            4 => CycloElement::from_int(-1, 1),
            2 | 6 => CycloElement::root(4, self.0 as i64 / 2),
            k => CycloElement::root(8, k as i64),
        }
    }

    pub fn approx(self) -> (f64, f64) {
        let t = std::f64::consts::FRAC_PI_4 * self.0 as f64;
        (t.cos(), t.sin())
    }

    pub fn label(self) -> &'static str {
        ["1", "zeta8", "i", "zeta8^3", "-1", "-zeta8", "-i", "-zeta8^3"][self.0 as usize]
    }

    pub fn all8() -> Vec<Unit> {
        (0..8).map(Unit).collect()
    }

    pub fn all4() -> Vec<Unit> {
        vec![Self::ONE, Self::I, Self::MINUS_ONE, Self::MINUS_I]
    }

    pub fn pm() -> Vec<Unit> {
        vec![Self::ONE, Self::MINUS_ONE]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnitSpec {
    Known(Unit),
    Unresolved(Vec<Unit>),
}

impl UnitSpec {
    fn map(&self, f: impl Fn(Unit) -> Unit) -> UnitSpec {
        match self {
            UnitSpec::Known(u) => UnitSpec::Known(f(*u)),
            UnitSpec::Unresolved(us) => {
                let mut v: Vec<Unit> = us.iter().map(|&u| f(u)).collect();
                v.sort();
                v.dedup();
                if v.len() == 1 {
                    UnitSpec::Known(v[0])
                } else {
                    UnitSpec::Unresolved(v)
                }
            }
        }
    }

    pub fn candidates(&self) -> Vec<Unit> {
        match self {
            UnitSpec::Known(u) => vec![*u],
            UnitSpec::Unresolved(v) => v.clone(),
        }
    }

    pub fn is_resolved(&self) -> bool {
        matches!(self, UnitSpec::Known(_))
    }

    pub fn label(&self) -> String {
        match self {
            UnitSpec::Known(u) => u.label().to_string(),
            UnitSpec::Unresolved(v) => {
                let l: Vec<&str> = v.iter().map(|u| u.label()).collect();
                format!("UNRESOLVED{{{}}}", l.join(","))
            }
        }
    }
}

/// `ω^m` with `ω` a quadratic integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    pub base: QuadSurd,
    pub exp: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedForm {
    pub p: u64,
    pub f: u64,
    pub unit: UnitSpec,
    pub p_pow_half: u64,
    pub pstar_pow: u8,
    pub surd: Option<Surd>,
    /// Factor `ρ` with `ρ^2 = √p* · surd.base`, principal branch.
    pub root: bool,
}

fn pstar_sign_negative(p: u64) -> bool {
    p % 4 == 3
}

impl ClosedForm {
    /// `u · p^{k/2}`.
    pub fn p_power(p: u64, f: u64, unit: Unit, k: u64) -> Self {
        Self {
            p,
            f,
            unit: UnitSpec::Known(unit),
            p_pow_half: k,
            pstar_pow: 0,
            surd: None,
            root: false,
        }
        .normalized()
    }

    /// The constant `-1` (trivial character).
    pub fn minus_one(p: u64) -> Self {
        Self::p_power(p, 0, Unit::MINUS_ONE, 0)
    }

    pub fn with_pstar(mut self, e: u8) -> Self {
        self.pstar_pow += e;
        self.normalized()
    }

    pub fn with_surd(mut self, base: QuadSurd, exp: u64) -> Self {
        self.surd = Some(Surd { base, exp });
        self.normalized()
    }

    pub fn with_root(mut self, base: QuadSurd) -> Self {
        self.surd = Some(Surd { base, exp: 0 });
        self.root = true;
        self.normalized()
    }

    pub fn with_units(mut self, units: Vec<Unit>) -> Self {
        let known = match &self.unit {
            UnitSpec::Known(u) => *u,
            UnitSpec::Unresolved(_) => Unit::ONE,
        };
        self.unit = UnitSpec::Unresolved(units).map(|u| u.mul(known));
        self
    }

    pub fn times_unit(&self, u: Unit) -> Self {
        Self { unit: self.unit.map(|x| x.mul(u)), ..self.clone() }
    }

    pub fn with_known_unit(&self, u: Unit) -> Self {
        Self { unit: UnitSpec::Known(u), ..self.clone() }
    }

    /// Moves odd powers of `√p` into `√p*` and reduces `e` to `{0, 1}`.
    fn normalized(mut self) -> Self {
        if self.p % 2 == 1 {
            if self.p_pow_half % 2 == 1 {
                // √p = √p* for p ≡ 1 (mod 4) and -i √p* for p ≡ 3 (mod 4).
                self.p_pow_half -= 1;
                self.pstar_pow += 1;
                if pstar_sign_negative(self.p) {
                    self.unit = self.unit.map(|u| u.mul(Unit::MINUS_I));
                }
            }
            while self.pstar_pow >= 2 {
                self.pstar_pow -= 2;
                self.p_pow_half += 2;
                if pstar_sign_negative(self.p) {
                    self.unit = self.unit.map(|u| u.mul(Unit::MINUS_ONE));
                }
            }
        }
        if let Some(s) = &self.surd {
            if s.exp == 0 && !self.root {
                self.surd = None;
            }
        }
        self
    }

    /// `self^s`.
    pub fn pow(&self, s: u64) -> Self {
        let mut out = Self {
            p: self.p,
            f: self.f * s,
            unit: self.unit.map(|u| u.pow(s)),
            p_pow_half: self.p_pow_half * s,
            pstar_pow: 0,
            surd: self.surd.clone().map(|sd| Surd { exp: sd.exp * s, ..sd }),
            root: false,
        };
        let mut e_total = self.pstar_pow as u64 * s;
        if self.root {
            // ρ^s = (√p* ω)^{⌊s/2⌋} ρ^{s mod 2}.
            let half = s / 2;
            e_total += half;
            if let Some(sd) = out.surd.as_mut() {
                sd.exp += half;
            }
            out.root = s % 2 == 1;
        }
        if self.p % 2 == 1 {
            let pairs = e_total / 2;
            out.p_pow_half += 2 * pairs;
            if pstar_sign_negative(self.p) && pairs % 2 == 1 {
                out.unit = out.unit.map(|u| u.mul(Unit::MINUS_ONE));
            }
            out.pstar_pow = (e_total % 2) as u8;
        } else {
            out.pstar_pow = e_total as u8;
        }
        out.normalized()
    }

    /// Davenport–Hasse lift `(-1)^{s-1} self^s`.
    pub fn dh_lift(&self, s: u64) -> Self {
        self.pow(s).times_unit(Unit::sign(s % 2 == 0))
    }

    /// Image under the automorphism that inverts prime-to-`p` roots of unity
    /// and fixes `ζ_p`; it maps `G(χ)` to `G(χ̄)`.
    pub fn conj_away_from_p(&self) -> Self {
        let mut out = self.clone();
        out.unit = self.unit.map(Unit::conj);
        if let Some(s) = out.surd.as_mut() {
            s.base = s.base.conj();
        }
        if self.root {
            out.unit = match &out.unit {
                UnitSpec::Known(u) => UnitSpec::Unresolved(vec![*u, u.mul(Unit::MINUS_ONE)]),
                other => other.clone(),
            };
        }
        out
    }

    /// Complex conjugation.
    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.unit = self.unit.map(Unit::conj);
        if self.pstar_pow == 1 && pstar_sign_negative(self.p) {
            out.unit = out.unit.map(|u| u.mul(Unit::MINUS_ONE));
        }
        if let Some(s) = out.surd.as_mut() {
            s.base = s.base.conj();
        }
        out
    }

    /// `log_p N(ω)`.
    pub fn surd_valuation(&self) -> Result<u64, FormError> {
        let Some(s) = &self.surd else { return Ok(0) };
        let mut n = s.base.norm();
        let p = BigInt::from(self.p);
        let mut v = 0;
        while n > BigInt::one() {
            let (q, r) = n.div_rem(&p);
            if !r.is_zero() {
                return Err(FormError::NormNotPPower);
            }
            n = q;
            v += 1;
        }
        if n.is_one() {
            Ok(v)
        } else {
            Err(FormError::NormNotPPower)
        }
    }

    /// `k + e + m·v + r`, which equals `f` exactly when `|G|^2 = q`.
    pub fn modulus_exponent(&self) -> Result<u64, FormError> {
        let v = self.surd_valuation()?;
        let m = self.surd.as_ref().map_or(0, |s| s.exp);
        Ok(self.p_pow_half + self.pstar_pow as u64 + m * v + self.root as u64)
    }

    pub fn check_modulus(&self) -> bool {
        self.modulus_exponent().map_or(false, |e| e == self.f)
    }

    /// Smallest conductor containing every atom, ignoring the root atom.
    pub fn conductor(&self) -> u64 {
        let mut m = 1u64;
        for u in self.unit.candidates() {
            m = m.lcm(&u.conductor());
        }
        if self.pstar_pow == 1 && self.p % 2 == 1 {
            m = m.lcm(&self.p);
        }
        if self.p == 2 && (self.p_pow_half % 2 == 1 || self.pstar_pow == 1) {
            m = m.lcm(&8);
        }
        if let Some(s) = &self.surd {
            if !s.base.is_rational() {
                m = m.lcm(&surd_conductor(s.base.d()));
            }
        }
        m
    }

    /// Exact element of `Z[ζ_m]` with `m = lcm(conductor, at_least)`.
    pub fn to_cyclo(&self, at_least: u64) -> Result<CycloElement, FormError> {
        if self.root {
            return Err(FormError::RootNotInField);
        }
        let UnitSpec::Known(u) = &self.unit else {
            return Err(FormError::UnresolvedUnit(self.unit.candidates()));
        };
        let m = self.conductor().lcm(&at_least.max(1));
        let mut coef = BigInt::from(self.p).pow((self.p_pow_half / 2) as u32);
        let mut val = u.to_cyclo().promote(m)?;
        if self.p_pow_half % 2 == 1 {
            // Only reachable for p = 2: √2 = ζ_8 - ζ_8^3.
            let sqrt2 = &CycloElement::root(8, 1) - &CycloElement::root(8, 3);
            val = &val * &sqrt2.promote(m)?;
        }
        if self.pstar_pow == 1 {
            if self.p == 2 {
                return Err(FormError::NoPStar);
            }
            val = &val * &embed_sqrt_star(self.p)?.promote(m)?;
        }
        if let Some(s) = &self.surd {
            let w = s.base.pow(s.exp);
            if w.is_rational() {
                coef *= w.a();
            } else {
                val = &val * &embed_quad_surd(&w, m)?;
            }
        }
        Ok(val.scale(&coef))
    }

    /// `self^2`, always realizable when the unit is known.
    pub fn square_to_cyclo(&self, at_least: u64) -> Result<CycloElement, FormError> {
        self.pow(2).to_cyclo(at_least)
    }

    /// Floating-point value with the principal branch for the root atom.
    pub fn approx(&self) -> Result<(f64, f64), FormError> {
        let UnitSpec::Known(u) = &self.unit else {
            return Err(FormError::UnresolvedUnit(self.unit.candidates()));
        };
        let p = self.p as f64;
        let mut z = u.approx();
        let scale = p.powf(self.p_pow_half as f64 / 2.0);
        z = (z.0 * scale, z.1 * scale);
        let ps = if pstar_sign_negative(self.p) { (0.0, p.sqrt()) } else { (p.sqrt(), 0.0) };
        if self.pstar_pow == 1 {
            z = cmul(z, ps);
        }
        if let Some(s) = &self.surd {
            let b = &s.base;
            let den = b.den() as f64;
            let w = (
                b.a().to_f64().unwrap_or(f64::NAN) / den,
                b.b().to_f64().unwrap_or(f64::NAN) * (b.d() as f64).sqrt() / den,
            );
            for _ in 0..s.exp {
                z = cmul(z, w);
            }
            if self.root {
                z = cmul(z, csqrt(cmul(ps, w)));
            }
        }
        Ok(z)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "text": self.to_string(),
            "expanded": self.expanded(),
            "unit": self.unit.label(),
            "p": self.p.to_string(),
            "p_pow_half": self.p_pow_half.to_string(),
            "pstar_pow": self.pstar_pow.to_string(),
            "surd": self.surd.as_ref().map(|s| {
                let mut v = s.base.to_json();
                v["exp"] = serde_json::Value::String(s.exp.to_string());
                v
            }),
            "root": self.root,
        })
    }
}

fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn csqrt(z: (f64, f64)) -> (f64, f64) {
    let r = (z.0 * z.0 + z.1 * z.1).sqrt();
    let re = ((r + z.0) / 2.0).sqrt();
    let im = ((r - z.0) / 2.0).sqrt().copysign(z.1);
    (re, im)
}

impl ClosedForm {
    /// Text with `ω^m` multiplied out; equal to `to_string()` when `m ≤ 1`.
    pub fn expanded(&self) -> String {
        self.render(true)
    }

    fn render(&self, expand: bool) -> String {
        let mut factors: Vec<String> = Vec::new();
        let coef = BigInt::from(self.p).pow((self.p_pow_half / 2) as u32);
        if !coef.is_one() || self.p_pow_half % 2 == 1 {
            factors.push(coef.to_string());
        }
        if self.p_pow_half % 2 == 1 {
            factors.push(format!("sqrt({})", self.p));
        }
        if self.pstar_pow == 1 {
            let ps = if pstar_sign_negative(self.p) { format!("-{}", self.p) } else { self.p.to_string() };
            factors.push(format!("sqrt({ps})"));
        }
        if let Some(s) = &self.surd {
            if s.exp == 1 || (expand && s.exp > 1) {
                factors.push(s.base.pow(s.exp).to_string());
            } else if s.exp > 1 {
                if s.base.den() == 2 {
                    factors.push(format!("({})^{}", s.base, s.exp));
                } else {
                    factors.push(format!("{}^{}", s.base, s.exp));
                }
            }
            if self.root {
                let ps = if pstar_sign_negative(self.p) { format!("-{}", self.p) } else { self.p.to_string() };
                factors.push(format!("sqrt(sqrt({ps})*{})", s.base));
            }
        }
        let body = if factors.is_empty() { "1".to_string() } else { factors.join("*") };
        match &self.unit {
            UnitSpec::Known(u) if *u == Unit::ONE => body,
            UnitSpec::Known(u) if *u == Unit::MINUS_ONE => format!("-{body}"),
            UnitSpec::Known(u) => format!("{}*{body}", u.label()),
            UnitSpec::Unresolved(_) => format!("eps*{body}"),
        }
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

impl ClosedForm {
    /// Whether the surd base is negated under `b ↦ -b` only (a real surd).
    pub fn surd_is_real(&self) -> bool {
        self.surd.as_ref().map_or(true, |s| s.base.is_rational())
    }

    pub fn surd_b_negative(&self) -> bool {
        self.surd.as_ref().is_some_and(|s| s.base.b().is_negative())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_moves_root_p_into_pstar() {
        // 11^{3/2} = 11 * √11 = 11 * (-i) * √-11.
        let g = ClosedForm::p_power(11, 3, Unit::ONE, 3);
        assert_eq!(g.p_pow_half, 2);
        assert_eq!(g.pstar_pow, 1);
        assert_eq!(g.unit, UnitSpec::Known(Unit::MINUS_I));
        let sq = g.square_to_cyclo(1).unwrap();
        assert_eq!(sq, CycloElement::from_int(1331, 1));
    }

    #[test]
    fn case_d_example_modulus() {
        let g = ClosedForm::p_power(11, 3, Unit::MINUS_ONE, 2).with_pstar(1);
        assert!(g.check_modulus());
        let c = g.to_cyclo(154).unwrap();
        assert_eq!(&c * &c.conj(), CycloElement::from_int(1331, 1));
        assert_eq!(g.to_string(), "-11*sqrt(-11)");
    }

    #[test]
    fn lifting_quadratic() {
        // Over F_3 the quadratic sum is √-3; lifted to F_9 it is 3.
        let g = ClosedForm::p_power(3, 1, Unit::ONE, 0).with_pstar(1);
        let l = g.dh_lift(2);
        assert_eq!(l.to_cyclo(1).unwrap(), CycloElement::from_int(3, 1));
    }

    #[test]
    fn root_atom_powers() {
        let pi = QuadSurd::new(1, 1, 2, 1).unwrap();
        let g = ClosedForm::p_power(5, 1, Unit::ONE, 0).with_root(pi.clone());
        assert!(g.check_modulus());
        let sq = g.pow(2);
        assert!(!sq.root);
        assert_eq!(sq.pstar_pow, 1);
        assert_eq!(sq.surd.as_ref().unwrap().exp, 1);
        let (re, im) = g.approx().unwrap();
        assert!((re * re + im * im - 5.0).abs() < 1e-9);
    }
}

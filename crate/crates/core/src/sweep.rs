//! Exhaustive property sweep over small `(N, p)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{checked_pow, is_prime, pow_mod};
use crate::classify::{classify_case, CaseInfo, CaseTag};
use crate::closed::ClosedForm;
use crate::cyclo::{CycloElement, GaloisIndex};
use crate::evaluator::{eval_power, resolve_against, sets_agree, GaussValue};
use crate::explicit::explicit_value;
use crate::ffield::{canonical_character, Character, FieldContext, TABLE_CAP};
use crate::oracle::{factorization_rhs, gauss_sum_table, pure_gauss, quadratic_gauss_lifted};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SweepError {
    #[error("budget {0} exceeds the table cap {TABLE_CAP}")]
    BudgetAboveCap(u64),
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Modulus,
    Conjugation,
    Frobenius,
    Galois,
    DhProduct,
    Factorization,
    Pure,
    PowerRatio,
    Evaluator,
    Explicit,
    Orbit,
    ClosedForm,
}

impl Check {
    pub const ALL: [Check; 12] = [
        Check::Modulus,
        Check::Conjugation,
        Check::Frobenius,
        Check::Galois,
        Check::DhProduct,
        Check::Factorization,
        Check::Pure,
        Check::PowerRatio,
        Check::Evaluator,
        Check::Explicit,
        Check::Orbit,
        Check::ClosedForm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Modulus => "modulus",
            Check::Conjugation => "conjugation",
            Check::Frobenius => "frobenius",
            Check::Galois => "galois",
            Check::DhProduct => "dh_product",
            Check::Factorization => "factorization",
            Check::Pure => "pure",
            Check::PowerRatio => "power_ratio",
            Check::Evaluator => "evaluator",
            Check::Explicit => "explicit",
            Check::Orbit => "orbit",
            Check::ClosedForm => "closed_form",
        }
    }

    /// Needs the brute-force sums.
    pub fn needs_oracle(self) -> bool {
        !matches!(self, Check::Explicit | Check::Orbit | Check::ClosedForm)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Check::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| format!("unknown check {s}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaMode {
    All,
    Primitive,
    DivisorPowers,
}

impl LambdaMode {
    pub fn name(self) -> &'static str {
        match self {
            LambdaMode::All => "all",
            LambdaMode::Primitive => "primitive",
            LambdaMode::DivisorPowers => "divisor-powers",
        }
    }

    fn lambdas(self, n: u64) -> Vec<u64> {
        (1..n)
            .filter(|&l| match self {
                LambdaMode::All => true,
                LambdaMode::Primitive => l.gcd(&n) == 1,
                LambdaMode::DivisorPowers => n % l == 0,
            })
            .collect()
    }
}

impl FromStr for LambdaMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        [LambdaMode::All, LambdaMode::Primitive, LambdaMode::DivisorPowers]
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown lambda mode {s}"))
    }
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub n_range: RangeInclusive<u64>,
    pub p_range: RangeInclusive<u64>,
    pub q_budget: u64,
    /// The Galois law runs over all `(l, t)` only up to this `q`.
    pub galois_q_max: u64,
    /// Largest `s` in the power-ratio check.
    pub power_ratio_max: u64,
    pub lambda_mode: LambdaMode,
    pub checks: Vec<Check>,
    pub threads: Option<usize>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            n_range: 2..=30,
            p_range: 2..=19,
            q_budget: 1_000_000,
            galois_q_max: 10_000,
            power_ratio_max: 6,
            lambda_mode: LambdaMode::All,
            checks: Check::ALL.to_vec(),
            threads: None,
        }
    }
}

impl SweepSpec {
    fn wants(&self, c: Check) -> bool {
        self.checks.contains(&c)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "N_range": [self.n_range.start().to_string(), self.n_range.end().to_string()],
            "p_range": [self.p_range.start().to_string(), self.p_range.end().to_string()],
            "q_budget": self.q_budget.to_string(),
            "galois_q_max": self.galois_q_max.to_string(),
            "power_ratio_max": self.power_ratio_max.to_string(),
            "lambda_mode": self.lambda_mode.name(),
            "checks": self.checks.iter().map(|c| c.name()).collect::<Vec<_>>(),
        })
    }
}

/// Outcome for one `(N, p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceReport {
    pub n: u64,
    pub p: u64,
    pub f: u64,
    pub q: BigInt,
    pub tag: CaseTag,
    /// Oracle checks were skipped because `q` exceeds the budget.
    pub skipped: bool,
    pub passed: BTreeMap<Check, u64>,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
}

impl InstanceReport {
    fn pass(&mut self, c: Check) {
        *self.passed.entry(c).or_default() += 1;
    }

    fn fail(&mut self, c: Check, lambda: u64, msg: impl fmt::Display) {
        self.failures.push(format!("{c} N={} p={} lambda={lambda}: {msg}", self.n, self.p));
    }

    fn record(&mut self, c: Check, lambda: u64, ok: bool, msg: impl FnOnce() -> String) {
        if ok {
            self.pass(c);
        } else {
            self.fail(c, lambda, msg());
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "N": self.n.to_string(),
            "p": self.p.to_string(),
            "f": self.f.to_string(),
            "q": self.q.to_string(),
            "case": self.tag.name(),
            "skipped": self.skipped,
            "passed": self.passed.iter().map(|(c, k)| (c.name().to_string(), k.to_string())).collect::<BTreeMap<_, _>>(),
            "failures": self.failures,
            "warnings": self.warnings,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub spec: SweepSpec,
    pub instances: Vec<InstanceReport>,
    pub elapsed_ms: u128,
}

impl SweepReport {
    pub fn failures(&self) -> usize {
        self.instances.iter().map(|i| i.failures.len()).sum()
    }

    pub fn skipped(&self) -> usize {
        self.instances.iter().filter(|i| i.skipped).count()
    }

    pub fn totals(&self) -> BTreeMap<Check, u64> {
        let mut t = BTreeMap::new();
        for i in &self.instances {
            for (&c, &k) in &i.passed {
                *t.entry(c).or_default() += k;
            }
        }
        t
    }

    /// Everything except `timing` is deterministic.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "spec": self.spec.to_json(),
            "instances": self.instances.len().to_string(),
            "skipped": self.skipped().to_string(),
            "failures": self.failures().to_string(),
            "passed": self.totals().iter().map(|(c, k)| (c.name().to_string(), k.to_string())).collect::<BTreeMap<_, _>>(),
            "results": self.instances.iter().map(InstanceReport::to_json).collect::<Vec<_>>(),
            "timing": { "elapsed_ms": self.elapsed_ms.to_string() },
        })
    }
}

/// All `(N, p)` in range with `p` prime and `p ∤ N`, sorted.
pub fn instances(spec: &SweepSpec) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for n in spec.n_range.clone().filter(|&n| n >= 2) {
        for p in spec.p_range.clone().filter(|&p| is_prime(p) && n % p != 0) {
            out.push((n, p));
        }
    }
    out
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepReport, SweepError> {
    if spec.q_budget > TABLE_CAP {
        return Err(SweepError::BudgetAboveCap(spec.q_budget));
    }
    let start = Instant::now();
    let work = instances(spec);
    let run = || work.par_iter().map(|&(n, p)| run_instance(spec, n, p)).collect::<Vec<_>>();
    let instances = match spec.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| SweepError::Pool(e.to_string()))?
            .install(run),
        None => run(),
    };
    Ok(SweepReport { spec: spec.clone(), instances, elapsed_ms: start.elapsed().as_millis() })
}

fn mult_order(p: u64, n: u64) -> u64 {
    (1..=n).find(|&f| pow_mod(p, f, n) == 1 % n).expect("p is a unit mod n")
}

fn run_instance(spec: &SweepSpec, n: u64, p: u64) -> InstanceReport {
    let f = mult_order(p, n);
    let q = BigInt::from(p).pow(f as u32);
    let info = classify_case(n, p).ok();
    let mut rep = InstanceReport {
        n,
        p,
        f,
        q,
        tag: info.as_ref().map_or(CaseTag::NotIndex2, |i| i.tag),
        skipped: false,
        passed: BTreeMap::new(),
        failures: Vec::new(),
        warnings: Vec::new(),
    };
    let lambdas = spec.lambda_mode.lambdas(n);
    let values = match &info {
        Some(info) if info.tag.is_supported() => closed_checks(spec, info, &lambdas, &mut rep),
        _ => BTreeMap::new(),
    };
    let fits = checked_pow(p, f).is_some_and(|q| q <= spec.q_budget);
    if !fits {
        rep.skipped = true;
        return rep;
    }
    if spec.checks.iter().any(|c| c.needs_oracle()) {
        match FieldContext::build(p, f as u32, spec.q_budget) {
            Ok(ctx) => oracle_checks(spec, &ctx, n, &lambdas, &values, &mut rep),
            Err(e) => rep.fail(Check::Modulus, 0, e),
        }
    }
    rep
}

/// Symbolic checks; returns the closed-form values by `λ`.
fn closed_checks(spec: &SweepSpec, info: &CaseInfo, lambdas: &[u64], rep: &mut InstanceReport) -> BTreeMap<u64, GaussValue> {
    let mut values = BTreeMap::new();
    for &lam in lambdas {
        match eval_power(info, lam) {
            Ok(v) => {
                for w in v.notes.iter().filter(|s| s.starts_with("warning")) {
                    rep.warnings.push(format!("lambda={lam}: {w}"));
                }
                values.insert(lam, v);
            }
            Err(e) if e.is_unsupported() => {}
            Err(e) => rep.fail(Check::ClosedForm, lam, e),
        }
    }
    for (&lam, v) in &values {
        if spec.wants(Check::ClosedForm) {
            let ok = v.forms.iter().all(ClosedForm::check_modulus);
            rep.record(Check::ClosedForm, lam, ok, || format!("modulus identity fails for {}", v.primary()));
            if v.is_pair() {
                let img = v.forms[0].conj_away_from_p();
                match sets_agree(&[img], &v.forms[1..]) {
                    Ok(ok) => rep.record(Check::ClosedForm, lam, ok, || "pair members are not conjugate".into()),
                    Err(e) => rep.fail(Check::ClosedForm, lam, e),
                }
            }
        }
        if spec.wants(Check::Explicit) {
            if let Some(ex) = explicit_value(info, lam) {
                match ex {
                    Ok(ex) if ex.demoted => {}
                    Ok(ex) => match sets_agree(&ex.forms, &v.forms) {
                        Ok(ok) => rep.record(Check::Explicit, lam, ok, || "tabulated entry disagrees".into()),
                        Err(e) => rep.fail(Check::Explicit, lam, e),
                    },
                    Err(e) => rep.fail(Check::Explicit, lam, e),
                }
            }
        }
        if spec.wants(Check::Orbit) && lam.gcd(&info.n) == 1 {
            if let Some(base) = values.get(&1) {
                let in_orbit = (0..info.f).any(|k| pow_mod(info.p, k, info.n) == lam % info.n);
                let want: Vec<ClosedForm> = if in_orbit {
                    base.forms.clone()
                } else {
                    base.forms.iter().map(ClosedForm::conj_away_from_p).collect()
                };
                match sets_agree(&v.forms, &want) {
                    Ok(ok) => rep.record(Check::Orbit, lam, ok, || format!("orbit law fails (in <p>: {in_orbit})")),
                    Err(e) => rep.fail(Check::Orbit, lam, e),
                }
            }
        }
    }
    values
}

fn int(n: impl Into<BigInt>) -> CycloElement {
    CycloElement::from_int(n, 1)
}

fn oracle_checks(
    spec: &SweepSpec,
    ctx: &FieldContext,
    n: u64,
    lambdas: &[u64],
    values: &BTreeMap<u64, GaussValue>,
    rep: &mut InstanceReport,
) {
    let p = ctx.p();
    let m = if p == 2 { n } else { n.lcm(&2) };
    let base = match canonical_character(ctx, m) {
        Ok(c) => c,
        Err(e) => return rep.fail(Check::Modulus, 0, e),
    };
    let table = gauss_sum_table(&base);
    let scale = m / n;
    let chi = base.pow(scale as i64);
    let parts: Vec<InstanceReport> = lambdas
        .par_iter()
        .map(|&lam| {
            let mut r = InstanceReport { passed: BTreeMap::new(), failures: Vec::new(), warnings: Vec::new(), ..rep.clone() };
            lambda_checks(spec, ctx, &chi, &base, &table, lam, values.get(&lam), &mut r);
            r
        })
        .collect();
    for r in parts {
        for (c, k) in r.passed {
            *rep.passed.entry(c).or_default() += k;
        }
        rep.failures.extend(r.failures);
    }
}

#[allow(clippy::too_many_arguments)]
fn lambda_checks(
    spec: &SweepSpec,
    ctx: &FieldContext,
    chi: &Character<'_>,
    base: &Character<'_>,
    table: &[CycloElement],
    lam: u64,
    value: Option<&GaussValue>,
    rep: &mut InstanceReport,
) {
    let (p, q, f) = (ctx.p(), ctx.q(), ctx.f() as u64);
    let (n, m) = (chi.order(), base.n());
    let scale = m / n;
    let at = |k: u64| &table[((k % n) * scale % m) as usize];
    let x = chi.pow(lam as i64);
    let g = at(lam);
    let g_bar = at(n - lam);
    let mm = g.conductor();

    if spec.wants(Check::Modulus) {
        rep.record(Check::Modulus, lam, &(g * &g.conj()) == &int(q), || format!("G conj(G) != {q}"));
    }
    if spec.wants(Check::Conjugation) {
        let sign = x.eval_int(-1).expect("-1 is a unit");
        let ok = g.conj() == &sign * g_bar;
        rep.record(Check::Conjugation, lam, ok, || "conj(G(chi)) != chi(-1) G(conj chi)".into());
    }
    if spec.wants(Check::Frobenius) {
        let ok = GaloisIndex::split(p as i64, 1, p, mm)
            .and_then(|s| g.galois(s))
            .is_ok_and(|img| img == *g && at(lam * p) == g);
        rep.record(Check::Frobenius, lam, ok, || "sigma_p G(chi) != G(chi)".into());
    }
    if spec.wants(Check::Galois) && q <= spec.galois_q_max {
        let mut ok = true;
        'outer: for l in (1..n).filter(|l| l.gcd(&n) == 1) {
            for t in 1..p {
                let k = x.pow(-(l as i64)).eval_int(t as i64).expect("t is a unit");
                let want = &k * at(lam * l);
                let lr = (0..).map(|k| l + k * n).find(|v| v.gcd(&mm) == 1).expect("l is a unit mod N");
                let got = GaloisIndex::split(lr as i64, t as i64, p, mm).and_then(|s| g.galois(s));
                if got.map_or(true, |v| v != want) {
                    rep.fail(Check::Galois, lam, format!("sigma_{l} tau_{t} law fails"));
                    ok = false;
                    break 'outer;
                }
            }
        }
        if ok {
            rep.pass(Check::Galois);
        }
    }
    if spec.wants(Check::DhProduct) && p != 2 {
        let a = lam * scale;
        let k = base.pow(-2 * a as i64).eval_int(2).expect("2 is a unit");
        let lhs = &table[(a % m) as usize] * &table[((a + m / 2) % m) as usize];
        let rhs = &(&k * &table[(2 * a % m) as usize]) * &table[(m / 2) as usize];
        rep.record(Check::DhProduct, lam, lhs == rhs, || "G(chi)G(chi eta) != conj(chi)^2(2) G(chi^2) G(eta)".into());
    }
    if spec.wants(Check::Factorization) {
        match factorization_rhs(&x) {
            Ok(Some(rhs)) => rep.record(Check::Factorization, lam, rhs == *g, || "trace-one factorization fails".into()),
            Ok(None) => {}
            Err(e) => rep.fail(Check::Factorization, lam, e),
        }
    }
    if spec.wants(Check::Pure) {
        let ord = x.order();
        let want = if ord == 2 {
            Some(quadratic_gauss_lifted(p, f))
        } else if (1..=ord).any(|t| pow_mod(p, t, ord) == ord - 1) {
            Some(pure_gauss(p, ord, f))
        } else {
            None
        };
        if let Some(w) = want {
            let ok = w.ok().and_then(|w| w.to_cyclo(1).ok()).is_some_and(|w| w == *g);
            rep.record(Check::Pure, lam, ok, || "pure formula disagrees".into());
        }
    }
    if spec.wants(Check::PowerRatio) {
        for s in 2..=spec.power_ratio_max {
            let gs = at(lam * s);
            let num = &g.pow(s) * &gs.conj();
            let ok = (lam * s) % n == 0 || num.div_exact(&BigInt::from(q)).is_ok();
            rep.record(Check::PowerRatio, lam, ok, || format!("G^{s}/G(chi^{s}) is not integral"));
        }
    }
    if spec.wants(Check::Evaluator) {
        if let Some(v) = value {
            match resolve_against(v.clone(), g, g_bar) {
                Ok(r) if r.is_resolved() => rep.pass(Check::Evaluator),
                Ok(_) => rep.fail(Check::Evaluator, lam, "left unresolved"),
                Err(e) => rep.fail(Check::Evaluator, lam, e),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(n: RangeInclusive<u64>, p: RangeInclusive<u64>) -> SweepSpec {
        SweepSpec { n_range: n, p_range: p, q_budget: 100_000, ..SweepSpec::default() }
    }

    #[test]
    fn small_sweep_is_clean() {
        let r = run_sweep(&small(2..=12, 2..=7)).unwrap();
        let fails: Vec<_> = r.instances.iter().flat_map(|i| i.failures.clone()).collect();
        assert!(fails.is_empty(), "{fails:#?}");
        assert!(r.totals()[&Check::Galois] > 0);
        assert!(r.totals()[&Check::Evaluator] > 0);
    }

    #[test]
    fn empty_range() {
        let r = run_sweep(&small(5..=4, 2..=7)).unwrap();
        assert!(r.instances.is_empty());
        assert_eq!(r.failures(), 0);
    }

    #[test]
    fn over_budget_is_skipped() {
        let spec = SweepSpec { q_budget: 5, ..small(7..=7, 2..=2) };
        let r = run_sweep(&spec).unwrap();
        assert!(r.instances[0].skipped);
        assert!(r.instances[0].failures.is_empty());
        assert!(r.instances[0].passed[&Check::ClosedForm] > 0);
    }

    #[test]
    fn cap_is_enforced() {
        let spec = SweepSpec { q_budget: TABLE_CAP + 1, ..SweepSpec::default() };
        assert_eq!(run_sweep(&spec).unwrap_err(), SweepError::BudgetAboveCap(TABLE_CAP + 1));
    }
}

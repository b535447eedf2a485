//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::classify::{classify_case, reduce_power, ClassifyError};
use crate::cyclo::CycloElement;
use crate::evaluator::{evaluate, resolve_with_budget, verify, EvalError, GaussValue, VerifyReport};
use crate::ffield::{canonical_character, FieldContext, DEFAULT_BUDGET};
use crate::oracle::gauss_sum_direct;
use crate::quad::{class_number, reduced_forms};
use crate::sweep::{run_sweep, Check, LambdaMode, SweepReport, SweepSpec};

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exit(pub i32);

impl Exit {
    pub const OK: Exit = Exit(0);
    pub const FAILURE: Exit = Exit(1);
    pub const UNSUPPORTED: Exit = Exit(2);
    pub const BUDGET: Exit = Exit(3);
    pub const MISMATCH: Exit = Exit(4);
    pub const USAGE: Exit = Exit(64);

    fn of(e: &EvalError) -> Exit {
        match e {
            e if e.is_unsupported() => Exit::UNSUPPORTED,
            e if e.is_budget() => Exit::BUDGET,
            EvalError::Mismatch(_) => Exit::MISMATCH,
            EvalError::Classify(_) => Exit::USAGE,
            _ => Exit::FAILURE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gslab", version, about = "Exact index-2 Gauss sums and brute-force checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit JSON (sorted keys, integers as decimal strings).
    #[arg(long, global = true)]
    pub json: bool,
    /// Largest q for which F_q tables are built.
    #[arg(long, global = true, env = "GSLAB_BUDGET", default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Fail instead of leaving a value unresolved when q exceeds the budget.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Decimal digits for numerical approximations.
    #[arg(long, global = true, default_value_t = 20)]
    pub precision: u32,
}

#[derive(Debug, Args)]
pub struct Instance {
    #[arg(short = 'N', value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(short = 'p')]
    pub p: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed form of G(chi^lambda).
    Eval {
        #[command(flatten)]
        inst: Instance,
        #[arg(long, default_value_t = 1)]
        lambda: u64,
        #[arg(long, default_value_t = 1)]
        mu: u64,
        /// Compare with the brute-force sum G(chi^lambda, mu).
        #[arg(long)]
        verify: bool,
    },
    /// Case tag, component orders and field discriminant.
    Classify {
        #[command(flatten)]
        inst: Instance,
        /// Also show the reduction plan for chi^lambda.
        #[arg(long)]
        lambda: Option<u64>,
    },
    /// Brute-force G(chi^lambda, mu) in Z[zeta_M].
    Oracle {
        #[command(flatten)]
        inst: Instance,
        #[arg(long, default_value_t = 1)]
        lambda: u64,
        #[arg(long, default_value_t = 1)]
        mu: u64,
    },
    /// Closed form against the brute-force sum, with a report.
    Verify {
        #[command(flatten)]
        inst: Instance,
        #[arg(long, default_value_t = 1)]
        lambda: u64,
        #[arg(long, default_value_t = 1)]
        mu: u64,
    },
    /// h(Q(sqrt(-d))) and its reduced forms.
    Classnumber {
        #[arg(short = 'd')]
        d: u64,
    },
    /// Property sweep over a box of (N, p).
    Sweep {
        #[arg(long, default_value_t = 2)]
        n_min: u64,
        #[arg(long, default_value_t = 30)]
        n_max: u64,
        #[arg(long, default_value_t = 2)]
        p_min: u64,
        #[arg(long, default_value_t = 19)]
        p_max: u64,
        /// Oracle checks are skipped above this q.
        #[arg(long, default_value_t = 1_000_000)]
        q_max: u64,
        #[arg(long, default_value_t = 10_000)]
        galois_q_max: u64,
        /// all | primitive | divisor-powers
        #[arg(long, default_value = "all")]
        lambda_mode: LambdaMode,
        /// Comma-separated subset of the checks; all by default.
        #[arg(long, value_delimiter = ',')]
        checks: Vec<Check>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

/// Canonical JSON text: sorted keys, two-space indent.
pub fn render_json(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> Exit
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Exit::USAGE } else { Exit::OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let res = dispatch(&cli, out);
    match res {
        Ok(code) => code,
        Err((code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

type CmdResult = Result<Exit, (Exit, String)>;

fn io(e: std::io::Error) -> (Exit, String) {
    (Exit::FAILURE, e.to_string())
}

fn emit(out: &mut dyn Write, cli: &Cli, v: &Value, text: impl FnOnce() -> String) -> Result<(), (Exit, String)> {
    if cli.json {
        writeln!(out, "{}", render_json(v)).map_err(io)
    } else {
        write!(out, "{}", text()).map_err(io)
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CmdResult {
    match &cli.command {
        Command::Eval { inst, lambda, mu, verify } => cmd_eval(cli, out, inst, *lambda, *mu, *verify),
        Command::Classify { inst, lambda } => cmd_classify(cli, out, inst, *lambda),
        Command::Oracle { inst, lambda, mu } => cmd_oracle(cli, out, inst, *lambda, *mu),
        Command::Verify { inst, lambda, mu } => cmd_verify(cli, out, inst, *lambda, *mu),
        Command::Classnumber { d } => cmd_classnumber(cli, out, *d),
        Command::Sweep { n_min, n_max, p_min, p_max, q_max, galois_q_max, lambda_mode, checks, threads } => {
            let spec = SweepSpec {
                n_range: *n_min..=*n_max,
                p_range: *p_min..=*p_max,
                q_budget: *q_max,
                galois_q_max: *galois_q_max,
                lambda_mode: *lambda_mode,
                checks: if checks.is_empty() { Check::ALL.to_vec() } else { checks.clone() },
                threads: *threads,
                ..SweepSpec::default()
            };
            cmd_sweep(cli, out, &spec)
        }
    }
}

/// Reports a domain error, as JSON when requested.
fn domain_error(cli: &Cli, out: &mut dyn Write, n: u64, p: u64, e: &EvalError) -> CmdResult {
    let code = Exit::of(e);
    if cli.json {
        let class = classify_case(n, p).ok().map(|c| c.to_json());
        let v = json!({
            "case": class.as_ref().and_then(|c| c.get("tag").cloned()),
            "classification": class,
            "error": e.to_string(),
            "exit_code": code.0.to_string(),
        });
        writeln!(out, "{}", render_json(&v)).map_err(io)?;
        Ok(code)
    } else {
        Err((code, e.to_string()))
    }
}

fn approx_text(x: &CycloElement, digits: u32) -> String {
    let (re, im, rad) = x.complex_embed(digits).to_decimal(digits);
    match im.strip_prefix('-') {
        Some(m) => format!("{re} - {m}*i (+/- {rad})"),
        None => format!("{re} + {im}*i (+/- {rad})"),
    }
}

fn value_text(v: &GaussValue, digits: u32) -> String {
    let mut s = format!(
        "case {}: N = {}, p = {}, f = {}, q = {}, lambda = {}\n",
        v.info.tag,
        v.info.n,
        v.info.p,
        v.info.f,
        v.q(),
        v.lambda
    );
    if v.is_pair() {
        s += &format!("G in {{ {} , {} }}\n", v.forms[0], v.forms[1]);
    }
    let member = v.selected.or(if v.is_pair() { None } else { Some(0) });
    if let Some(i) = member {
        let (g, e) = (v.forms[i].to_string(), v.forms[i].expanded());
        if g == e {
            s += &format!("G(chi^{}) = {g}\n", v.lambda);
        } else {
            s += &format!("G(chi^{}) = {g} = {e}\n", v.lambda);
        }
    }
    if let Some(c) = &v.cyclo {
        s += &format!("~ {}\n", approx_text(c, digits));
    }
    if let Some(ok) = v.verified {
        s += &format!("verified: {ok}\n");
    }
    for n in &v.notes {
        s += &format!("note: {n}\n");
    }
    s
}

fn cmd_eval(cli: &Cli, out: &mut dyn Write, inst: &Instance, lambda: u64, mu: u64, check: bool) -> CmdResult {
    let (n, p) = (inst.n, inst.p);
    if check {
        return match verify(n, p, lambda, mu, cli.budget) {
            Ok(r) => {
                let mut v = r.value.clone();
                v.notes = r.notes.clone();
                emit(out, cli, &v.to_json(), || value_text(&v, cli.precision))?;
                Ok(if r.matched { Exit::OK } else { Exit::MISMATCH })
            }
            Err(e) => domain_error(cli, out, n, p, &e),
        };
    }
    let v = match evaluate(n, p, lambda).and_then(|v| resolve_with_budget(v, cli.budget, cli.strict)) {
        Ok(v) => v,
        Err(e) => return domain_error(cli, out, n, p, &e),
    };
    emit(out, cli, &v.to_json(), || value_text(&v, cli.precision))?;
    Ok(Exit::OK)
}

fn cmd_classify(cli: &Cli, out: &mut dyn Write, inst: &Instance, lambda: Option<u64>) -> CmdResult {
    let info = classify_case(inst.n, inst.p).map_err(usage)?;
    let plan = lambda.map(|l| reduce_power(&info, l)).transpose().map_err(usage)?;
    let mut v = info.to_json();
    if let Some(pl) = &plan {
        v["plan"] = pl.to_json();
    }
    emit(out, cli, &v, || {
        let mut s = format!("N = {}, p = {}: case {}, f = {}, index {}\n", info.n, info.p, info.tag, info.f, info.index);
        if let Some(d) = info.field_disc {
            s += &format!("field discriminant: {d}\n");
        }
        if let Some(pl) = &plan {
            s += &format!(
                "chi^{}: order {}, sub-case {} over F_{}^{}, lift s = {}, conjugate = {}\n",
                pl.lambda, pl.n_sub, pl.sub_case.tag, info.p, pl.f_sub, pl.lift_s, pl.conj_flag
            );
        }
        s
    })?;
    Ok(if info.tag.is_supported() { Exit::OK } else { Exit::UNSUPPORTED })
}

fn usage(e: ClassifyError) -> (Exit, String) {
    (Exit::USAGE, e.to_string())
}

fn cmd_oracle(cli: &Cli, out: &mut dyn Write, inst: &Instance, lambda: u64, mu: u64) -> CmdResult {
    let (n, p) = (inst.n, inst.p);
    let f = crate::classify::mult_order(p, n).map_err(usage)?;
    if !crate::arith::is_prime(p) {
        return Err(usage(ClassifyError::NotPrime(p)));
    }
    let ctx = match FieldContext::build(p, f as u32, cli.budget) {
        Ok(c) => c,
        Err(e) => return domain_error(cli, out, n, p, &e.into()),
    };
    let chi = canonical_character(&ctx, n).map_err(|e| (Exit::FAILURE, e.to_string()))?.pow(lambda as i64);
    let g = gauss_sum_direct(&chi, mu);
    let (re, im, rad) = g.complex_embed(cli.precision).to_decimal(cli.precision);
    let v = json!({
        "N": n.to_string(),
        "p": p.to_string(),
        "f": f.to_string(),
        "q": ctx.q().to_string(),
        "lambda": lambda.to_string(),
        "mu": mu.to_string(),
        "field": ctx.to_json(),
        "value": g.to_json(),
        "approx": { "re": re, "im": im, "radius": rad },
    });
    emit(out, cli, &v, || format!("G(chi^{lambda}, {mu}) over F_{p}^{f} = {g}\n~ {}\n", approx_text(&g, cli.precision)))?;
    Ok(Exit::OK)
}

fn verify_text(r: &VerifyReport, digits: u32) -> String {
    let mut s = value_text(&r.value, digits);
    s += &format!("oracle G(chi^{}, {}) = {}\n", r.value.lambda, r.mu, r.oracle);
    s += &format!("match: {}\n", r.matched);
    if let Some(m) = r.member {
        s += &format!("member: {}\n", r.value.forms[m]);
    }
    s
}

fn cmd_verify(cli: &Cli, out: &mut dyn Write, inst: &Instance, lambda: u64, mu: u64) -> CmdResult {
    match verify(inst.n, inst.p, lambda, mu, cli.budget) {
        Ok(r) => {
            emit(out, cli, &r.to_json(), || verify_text(&r, cli.precision))?;
            Ok(if r.matched { Exit::OK } else { Exit::MISMATCH })
        }
        Err(e) => domain_error(cli, out, inst.n, inst.p, &e),
    }
}

fn cmd_classnumber(cli: &Cli, out: &mut dyn Write, d: u64) -> CmdResult {
    let bad = |e: crate::quad::QuadError| (Exit::USAGE, e.to_string());
    let h = class_number(d).map_err(bad)?;
    let forms = reduced_forms(d).map_err(bad)?;
    let v = json!({
        "d": d.to_string(),
        "h": h.to_string(),
        "forms": forms.iter().map(|(a, b, c)| vec![a.to_string(), b.to_string(), c.to_string()]).collect::<Vec<_>>(),
    });
    emit(out, cli, &v, || {
        let fs: Vec<String> = forms.iter().map(|(a, b, c)| format!("({a}, {b}, {c})")).collect();
        format!("h(-{d}) = {h}\nreduced forms: {}\n", fs.join(" "))
    })?;
    Ok(Exit::OK)
}

fn sweep_text(r: &SweepReport) -> String {
    let mut s = format!(
        "{} instances, {} without oracle (q above budget), {} failures, {} ms\n",
        r.instances.len(),
        r.skipped(),
        r.failures(),
        r.elapsed_ms
    );
    for (c, k) in r.totals() {
        s += &format!("  {:<14} {k}\n", c.name());
    }
    for i in &r.instances {
        for f in &i.failures {
            s += &format!("FAIL {f}\n");
        }
        for w in &i.warnings {
            s += &format!("warn N={} p={}: {w}\n", i.n, i.p);
        }
    }
    s
}

fn cmd_sweep(cli: &Cli, out: &mut dyn Write, spec: &SweepSpec) -> CmdResult {
    let r = run_sweep(spec).map_err(|e| (Exit::USAGE, e.to_string()))?;
    emit(out, cli, &r.to_json(), || sweep_text(&r))?;
    Ok(if r.failures() == 0 { Exit::OK } else { Exit::MISMATCH })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (Exit, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("gslab").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn golden_exit_codes() {
        let cases: &[(&[&str], Exit)] = &[
            (&["eval", "-N", "14", "-p", "11", "--verify"], Exit::OK),
            (&["eval", "-N", "13", "-p", "3"], Exit::UNSUPPORTED),
            (&["eval", "-N", "78", "-p", "7"], Exit::UNSUPPORTED),
            (&["eval", "-N", "7", "-p", "2", "--budget", "4", "--strict"], Exit::BUDGET),
            (&["verify", "-N", "14", "-p", "11", "--budget", "100"], Exit::BUDGET),
            (&["oracle", "-N", "7", "-p", "2", "--budget", "4"], Exit::BUDGET),
            (&["eval", "-N", "14", "-p", "4"], Exit::USAGE),
            (&["eval", "-N", "14"], Exit::USAGE),
            (&["frobnicate"], Exit::USAGE),
            (&["classnumber", "-d", "12"], Exit::USAGE),
            (&["classnumber", "-d", "15"], Exit::OK),
            (&["classify", "-N", "70", "-p", "103"], Exit::OK),
            (&["sweep", "--n-min", "5", "--n-max", "4"], Exit::OK),
        ];
        for (args, want) in cases {
            let (code, _, err) = call(args);
            assert_eq!(code, *want, "{args:?}: {err}");
        }
    }

    #[test]
    fn eval_over_budget_is_unresolved() {
        let (code, out, _) = call(&["eval", "-N", "70", "-p", "103", "--json"]);
        assert_eq!(code, Exit::OK);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["case"], "E1");
        assert_eq!(v["pair"], true);
        assert!(v["notes"].as_array().unwrap().iter().any(|n| n.as_str().unwrap().starts_with("UNRESOLVED")));
    }

    #[test]
    fn json_round_trips() {
        for args in [
            &["eval", "-N", "22", "-p", "3", "--json"][..],
            &["classify", "-N", "70", "-p", "103", "--lambda", "2", "--json"],
            &["oracle", "-N", "7", "-p", "2", "--json"],
            &["classnumber", "-d", "39", "--json"],
            &["verify", "-N", "8", "-p", "3", "--json"],
        ] {
            let (code, out, err) = call(args);
            assert_eq!(code, Exit::OK, "{args:?}: {err}");
            let v: Value = serde_json::from_str(&out).unwrap();
            assert_eq!(format!("{}\n", render_json(&v)), out);
        }
    }

    #[test]
    fn classnumber_output() {
        let (_, out, _) = call(&["classnumber", "-d", "15"]);
        assert_eq!(out, "h(-15) = 2\nreduced forms: (1, 1, 4) (2, 1, 2)\n");
    }

    #[test]
    fn unsupported_json_reports_tag() {
        let (code, out, _) = call(&["eval", "-N", "13", "-p", "3", "--json"]);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(code, Exit::UNSUPPORTED);
        assert_eq!(v["exit_code"], "2");
        assert!(v["case"].is_string());
    }
}

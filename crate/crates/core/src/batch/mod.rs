//! Batch runner: executes every problem of a spec file through its module
//! and assembles a deterministic report.

mod spec;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

pub use spec::{
    parse_spec, AnalyticPayload, DiagonalPayload, Expect, IsometryPayload, Payload, PowerPayload, Problem,
    SpecError, SpecFile, TAlphaBetaPayload, MAX_INDEX, MAX_POWER, SPEC_VERSION,
};

use crate::analytic::{self, VmVnClass};
use crate::diagonal::{self, DiagonalVerdict};
use crate::hardy;
use crate::operators::OperatorExpr;
use crate::oracle::{self, CrossCheckReport, Expectation};
use crate::perturbation::{self, PerturbationDiagnostics, Verdict, DEFAULT_C_TOL};
use crate::probe::{self, ProbeShape};
use crate::seq::{Complex, GeomTailSeq};

/// The bundled regression corpus of worked examples.
pub const REFERENCE_EXAMPLES: &str = include_str!("../../corpus/reference_examples.json");

/// Left-inverse residual and coefficient checks are asserted only above this
/// value of `c`; below it `1/c` amplifies round-off past the tolerances.
pub const LEFT_INVERSE_C_FLOOR: f64 = 0.1;
pub const LEFT_INVERSE_RESIDUAL_TOL: f64 = 1e-11;
pub const COEFFICIENT_TOL: f64 = 1e-12;
pub const IDENTITY_TOL: f64 = 1e-12;
pub const SOLVE_RESIDUAL_TOL: f64 = 1e-12;
pub const DEFAULT_PREIMAGE_J: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Stages {
    pub verdict: bool,
    pub left_inverse: bool,
    pub solve: bool,
    pub probe: bool,
    pub oracle: bool,
}

impl Stages {
    pub const ALL: Stages = Stages {
        verdict: true,
        left_inverse: true,
        solve: true,
        probe: true,
        oracle: true,
    };
    pub const NONE: Stages = Stages {
        verdict: false,
        left_inverse: false,
        solve: false,
        probe: false,
        oracle: false,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Zero threshold for `c`.
    pub tolerance: f64,
    pub seed: u64,
    pub oracle_dims: Vec<usize>,
    pub probes: usize,
    pub stages: Stages,
    /// Run only the problem with this id.
    pub problem: Option<String>,
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_C_TOL,
            seed: 0,
            oracle_dims: vec![64, 128, 256],
            probes: 20,
            stages: Stages::ALL,
            problem: None,
            timing: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    pub c_zero: f64,
    pub c_formula_agreement: f64,
    pub left_inverse_residual: f64,
    pub left_inverse_c_floor: f64,
    pub coefficients: f64,
    pub identity: f64,
    pub solve_residual: f64,
    pub oracle_drift: f64,
    pub oracle_ceiling: f64,
    pub oracle_exact_kernel: f64,
}

impl Tolerances {
    fn new(c_zero: f64) -> Self {
        Self {
            c_zero,
            c_formula_agreement: perturbation::FORMULA_AGREEMENT_TOL,
            left_inverse_residual: LEFT_INVERSE_RESIDUAL_TOL,
            left_inverse_c_floor: LEFT_INVERSE_C_FLOOR,
            coefficients: COEFFICIENT_TOL,
            identity: IDENTITY_TOL,
            solve_residual: SOLVE_RESIDUAL_TOL,
            oracle_drift: oracle::MAX_DRIFT,
            oracle_ceiling: oracle::DEGENERATE_CEILING,
            oracle_exact_kernel: oracle::EXACT_KERNEL_CEILING,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemReport {
    pub id: String,
    pub kind: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<Complex>,
    pub residuals: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<perturbation::Coefficients>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<analytic::ProbeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<CrossCheckReport>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub seed: u64,
    pub probes: usize,
    pub oracle_dims: Vec<usize>,
    pub stages: Stages,
    pub tolerances: Tolerances,
    pub summary: Summary,
    pub problems: Vec<ProblemReport>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.summary.passed == self.summary.total
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs every selected problem. Problems run concurrently; the report keeps
/// the order of the spec file. Numeric failures are recorded per problem.
pub fn run(spec: &SpecFile, opts: &RunOptions) -> Result<Report, SpecError> {
    let selected: Vec<&Problem> = match &opts.problem {
        Some(id) => {
            let p: Vec<_> = spec.problems.iter().filter(|p| &p.id == id).collect();
            if p.is_empty() {
                return Err(SpecError::Validation {
                    field: "problem".into(),
                    message: format!("no problem with id {id:?}"),
                });
            }
            p
        }
        None => spec.problems.iter().collect(),
    };
    if opts.stages.oracle && opts.oracle_dims.is_empty() {
        return Err(SpecError::Validation {
            field: "oracle_dims".into(),
            message: "needs at least one dimension".into(),
        });
    }
    let problems: Vec<ProblemReport> = selected.par_iter().map(|p| run_problem(p, opts)).collect();
    let count = |s: Status| problems.iter().filter(|p| p.status == s).count();
    let summary = Summary {
        total: problems.len(),
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        errors: count(Status::Error),
    };
    Ok(Report {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: opts.seed,
        probes: opts.probes,
        oracle_dims: opts.oracle_dims.clone(),
        stages: opts.stages,
        tolerances: Tolerances::new(opts.tolerance),
        summary,
        problems,
    })
}

/// Parses and runs the bundled worked-example corpus.
pub fn run_corpus(opts: &RunOptions) -> Result<Report, SpecError> {
    run(&parse_spec(REFERENCE_EXAMPLES)?, opts)
}

struct Ctx<'a> {
    rep: ProblemReport,
    opts: &'a RunOptions,
    expect: &'a Expect,
}

impl Ctx<'_> {
    fn stages(&self) -> Stages {
        self.opts.stages
    }

    fn push(&mut self, name: &str, passed: bool, value: Option<f64>, limit: Option<f64>, detail: Option<String>) {
        self.rep.checks.push(Check {
            name: name.into(),
            passed,
            value,
            limit,
            detail,
        });
    }

    /// `value ≤ limit`.
    fn bound(&mut self, name: &str, value: f64, limit: f64) {
        self.push(name, value <= limit, Some(value), Some(limit), None);
    }

    fn flag(&mut self, name: &str, passed: bool, detail: String) {
        self.push(name, passed, None, None, Some(detail));
    }

    fn residual(&mut self, name: &str, value: f64) {
        self.rep.residuals.insert(name.into(), value);
    }

    fn expect_verdict(&mut self, got: &str) {
        if let Some(want) = self.expect.verdict.clone() {
            self.flag("expected_verdict", want == got, format!("expected {want}, got {got}"));
        }
    }

    fn expect_c(&mut self, got: f64) {
        if let Some(want) = self.expect.c {
            let gap = (got - want).abs();
            self.bound("expected_c", gap, IDENTITY_TOL * want.abs().max(1.0));
        }
    }

    fn expect_kernel_condition(&mut self, got: bool) {
        if let Some(want) = self.expect.kernel_condition {
            self.flag("expected_kernel_condition", want == got, format!("expected {want}, got {got}"));
        }
    }

    fn oracle(&mut self, op: &OperatorExpr, expectation: Expectation) -> Result<(), String> {
        let rep = oracle::verdict_cross_check(op, expectation, &self.opts.oracle_dims).map_err(|e| e.to_string())?;
        let detail = if rep.passed {
            format!("{expectation:?}")
        } else {
            rep.failures.join("; ")
        };
        self.flag("oracle_cross_check", rep.passed, detail);
        self.rep.oracle = Some(rep);
        Ok(())
    }
}

fn run_problem(p: &Problem, opts: &RunOptions) -> ProblemReport {
    let start = Instant::now();
    let mut ctx = Ctx {
        rep: ProblemReport {
            id: p.id.clone(),
            kind: p.payload.kind().into(),
            status: Status::Pass,
            verdict: None,
            c: None,
            r: None,
            residuals: BTreeMap::new(),
            coefficients: None,
            diagnostics: None,
            probe: None,
            oracle: None,
            checks: Vec::new(),
            note: p.expect.note.clone(),
            error: None,
            timing_ms: None,
        },
        opts,
        expect: &p.expect,
    };
    let outcome = match &p.payload {
        Payload::Isometry(x) => run_isometry(&mut ctx, x),
        Payload::Diagonal(x) => run_diagonal(&mut ctx, x),
        Payload::TAlphaBeta(x) => run_t_alpha_beta(&mut ctx, x),
        Payload::Analytic(x) => run_analytic(&mut ctx, x),
        Payload::Power(x) => run_power(&mut ctx, x),
    };
    let mut rep = ctx.rep;
    rep.status = match outcome {
        Err(e) => {
            rep.error = Some(e);
            Status::Error
        }
        Ok(()) if rep.checks.iter().all(|c| c.passed) => Status::Pass,
        Ok(()) => Status::Fail,
    };
    if opts.timing {
        rep.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    rep
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::LeftInvertible => "LeftInvertible",
        Verdict::NotLeftInvertible => "NotLeftInvertible",
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Largest `‖S(S h) − V(S h)‖` over random probes.
fn s_squared_gap(v: &OperatorExpr, s: &OperatorExpr, probes: usize, seed: u64) -> Result<f64, String> {
    let mut rng = probe::rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let h = probe::random_unit_seq(&mut rng, ProbeShape::default());
        let sh = s.apply(&h).map_err(err)?;
        let gap = s.apply(&sh).map_err(err)?.distance(&v.apply(&sh).map_err(err)?).map_err(err)?;
        worst = worst.max(gap);
    }
    Ok(worst)
}

/// Verdict, left inverse, kernel condition and oracle stages for `V + f ⊗ g`
/// with `V = S^order`.
fn run_shift_case(
    ctx: &mut Ctx,
    v: &OperatorExpr,
    f: &GeomTailSeq,
    g: &GeomTailSeq,
) -> Result<PerturbationDiagnostics, String> {
    let st = ctx.stages();
    let tol = ctx.opts.tolerance;
    let diag = perturbation::verdict(v, f, g, tol).map_err(err)?;
    let kc_residual = analytic::kernel_condition_residual(v, f, g).map_err(err)?;
    let kernel_condition = kc_residual <= analytic::ZERO_TOL;
    let name = verdict_name(diag.verdict);
    ctx.rep.verdict = Some(name.into());
    ctx.rep.c = Some(diag.c);
    ctx.rep.coefficients = diag.coefficients;
    ctx.residual("kernel_condition", kc_residual);
    let mut d = serde_json::to_value(&diag).map_err(err)?;
    d["kernel_condition"] = json!(kernel_condition);
    ctx.rep.diagnostics = Some(d);
    let t = perturbation::perturbed(v, f, g);

    if st.verdict {
        let scale = 1.0f64.max(diag.c).max(diag.norm_f2 * diag.norm_g2);
        ctx.bound(
            "c_forms_agree",
            (diag.c - diag.c_expanded).abs(),
            perturbation::FORMULA_AGREEMENT_TOL * scale,
        );
        let both = diag.witnesses.f_in_range && diag.witnesses.beta_is_minus_one;
        ctx.flag(
            "witnesses_agree",
            (diag.verdict == Verdict::NotLeftInvertible) == both,
            format!("{:?}", diag.witnesses),
        );
        if let Some(coef) = diag.coefficients {
            if diag.c > LEFT_INVERSE_C_FLOOR {
                ctx.bound("coefficients_vanish", coef.max_modulus(), COEFFICIENT_TOL);
            }
        }
        ctx.expect_verdict(name);
        ctx.expect_c(diag.c);
        ctx.expect_kernel_condition(kernel_condition);
    }
    if st.left_inverse && diag.verdict == Verdict::LeftInvertible {
        let l = perturbation::left_inverse(v, f, g, tol).map_err(err)?;
        let res = oracle::residual_sweep(&l, &t, ctx.opts.probes, ctx.opts.seed).map_err(err)?;
        ctx.residual("left_inverse", res);
        if diag.c > LEFT_INVERSE_C_FLOOR {
            ctx.bound("left_inverse_residual", res, LEFT_INVERSE_RESIDUAL_TOL);
        }
    }
    if st.probe && kernel_condition {
        let gap = s_squared_gap(v, &t, ctx.opts.probes, ctx.opts.seed)?;
        ctx.residual("s_squared_minus_vs", gap);
        ctx.bound("s_squared_equals_vs", gap, IDENTITY_TOL);
    }
    if st.oracle {
        let expectation = match diag.verdict {
            Verdict::LeftInvertible => Expectation::LeftInvertible { c: Some(diag.c) },
            Verdict::NotLeftInvertible => {
                // When c = 0 the kernel is spanned by V*f.
                let u = v.apply_adjoint(f).map_err(err)?;
                Expectation::NotLeftInvertible {
                    exact_kernel: u.is_finitely_supported(),
                }
            }
        };
        ctx.oracle(&t, expectation)?;
    }
    Ok(diag)
}

fn run_isometry(ctx: &mut Ctx, x: &IsometryPayload) -> Result<(), String> {
    let v = OperatorExpr::shift(x.order);
    run_shift_case(ctx, &v, &x.f, &x.g).map(|_| ())
}

fn run_t_alpha_beta(ctx: &mut Ctx, x: &TAlphaBetaPayload) -> Result<(), String> {
    let t = hardy::make_t_alpha_beta(x.alpha, x.beta);
    let v = OperatorExpr::shift(2);
    let sum = t.modulus_sum();
    let diag = run_shift_case(ctx, &v, &t.f, &t.g)?;
    if ctx.stages().verdict {
        ctx.bound("c_identity", (diag.c - sum).abs(), IDENTITY_TOL * sum.max(1.0));
    }
    if ctx.stages().probe {
        let isometric = hardy::isometry_condition(x.alpha, x.beta);
        let probed = hardy::probe_isometry(x.alpha, x.beta, ctx.opts.probes, ctx.opts.seed).map_err(err)?;
        ctx.flag(
            "isometry_matches_parameters",
            probed == isometric,
            format!("|α|² + |β|² = {sum}, probe isometry {probed}"),
        );
        if isometric {
            let (_, rep) = hardy::intertwiner_u(x.alpha, x.beta, ctx.opts.probes, ctx.opts.seed).map_err(err)?;
            ctx.residual("intertwining", rep.intertwining_residual);
            ctx.residual("intertwiner_isometry_defect", rep.isometry_defect);
            ctx.bound("intertwining", rep.intertwining_residual, IDENTITY_TOL);
            ctx.bound("intertwiner_isometric", rep.isometry_defect, IDENTITY_TOL);
        }
    }
    Ok(())
}

fn run_analytic(ctx: &mut Ctx, x: &AnalyticPayload) -> Result<(), String> {
    let v = OperatorExpr::shift(x.order);
    run_shift_case(ctx, &v, &x.f, &x.g)?;
    if ctx.stages().probe {
        let s = perturbation::perturbed(&v, &x.f, &x.g);
        let order = x.probe_order.unwrap_or(x.order);
        let rep = analytic::analyticity_probe(&s, order, x.n, x.depth, ctx.opts.probes, ctx.opts.seed).map_err(err)?;
        let leak = rep.max_leakage();
        ctx.residual("max_leakage", leak);
        if let Some(want) = ctx.expect.probe_clean {
            let clean = leak <= analytic::ZERO_TOL;
            ctx.flag(
                "expected_probe_clean",
                clean == want,
                format!("expected clean = {want}, max leakage {leak:e}"),
            );
        }
        ctx.rep.probe = Some(rep);
    }
    Ok(())
}

fn class_name(c: &VmVnClass) -> &'static str {
    match c {
        VmVnClass::Shift { .. } => "Shift",
        VmVnClass::Analytic => "Analytic",
        VmVnClass::Unknown => "Unknown",
    }
}

fn run_power(ctx: &mut Ctx, x: &PowerPayload) -> Result<(), String> {
    let class = analytic::classify_vm_vn(x.m, x.n, &x.f0).map_err(err)?;
    let v = OperatorExpr::shift(1);
    let f = x.f0.shift_right(x.m);
    let g = x.f0.shift_right(x.n);
    let diag = run_shift_case(ctx, &v, &f, &g)?;
    if let Some(d) = ctx.rep.diagnostics.as_mut() {
        d["class"] = serde_json::to_value(&class).map_err(err)?;
    }
    if ctx.stages().verdict {
        if let Some(want) = ctx.expect.class.clone() {
            let got = class_name(&class);
            ctx.flag("expected_class", want == got, format!("expected {want}, got {got}"));
        }
        if matches!(class, VmVnClass::Shift { .. }) {
            ctx.bound("shift_constant_is_one", (diag.c - 1.0).abs(), IDENTITY_TOL);
        }
    }
    if ctx.stages().probe && x.m > x.n {
        let res = analytic::power_formula_residual(x.m, x.n, &x.f0, x.k, ctx.opts.probes, ctx.opts.seed).map_err(err)?;
        ctx.residual("power_formula", res);
        ctx.bound("power_formula", res, IDENTITY_TOL);
    }
    Ok(())
}

fn diagonal_verdict_name(v: DiagonalVerdict) -> &'static str {
    match v {
        DiagonalVerdict::Invertible => "Invertible",
        DiagonalVerdict::NotInjective => "NotInjective",
        DiagonalVerdict::NotLeftInvertible => "NotLeftInvertible",
    }
}

fn run_diagonal(ctx: &mut Ctx, x: &DiagonalPayload) -> Result<(), String> {
    let st = ctx.stages();
    let diag = diagonal::invertibility_verdict(&x.d, &x.f, &x.g).map_err(err)?;
    let name = diagonal_verdict_name(diag.verdict);
    ctx.rep.verdict = Some(name.into());
    ctx.rep.r = diag.r;
    ctx.rep.diagnostics = Some(serde_json::to_value(&diag).map_err(err)?);
    let t = diagonal::perturbation_op(&x.d, &x.f, &x.g);

    if st.verdict {
        if let (Some(r), Some(ri)) = (diag.r, diag.r_inner) {
            ctx.bound("r_forms_agree", (r - ri).norm(), diagonal::R_AGREEMENT_TOL * r.norm().max(1.0));
            let inner_criterion = ri.norm() > diagonal::R_ZERO_TOL;
            ctx.flag(
                "inverse_inner_criterion",
                (diag.verdict == DiagonalVerdict::Invertible) == inner_criterion,
                format!("1 + <D^-1 f, g> = {ri}"),
            );
        }
        if let (Some(res), Some(w)) = (diag.kernel_residual, &diag.kernel_witness) {
            ctx.residual("kernel_witness", res);
            ctx.bound("kernel_witness", res, diagonal::RESIDUAL_TOL * w.norm().map_err(err)?.max(1.0));
        }
        match diagonal::bounded_below_checks(&x.d, &x.f, &x.g) {
            Ok(b) => ctx.flag("bounded_below_chain", true, format!("{b:?}")),
            Err(e) => ctx.flag("bounded_below_chain", false, e.to_string()),
        }
        ctx.expect_verdict(name);
        if let Some(want) = ctx.expect.r {
            match diag.r {
                Some(r) => ctx.bound("expected_r", (r - want).norm(), IDENTITY_TOL * want.norm().max(1.0)),
                None => ctx.flag("expected_r", false, "r diverges".into()),
            }
        }
    }
    if st.solve && diag.verdict == DiagonalVerdict::Invertible {
        if let Some(y) = &x.y {
            let sol = diagonal::solve(&x.d, &x.f, &x.g, y).map_err(err)?;
            let res = t.apply(&sol).map_err(err)?.distance(y).map_err(err)?;
            ctx.residual("solve", res);
            ctx.bound("solve_residual", res, SOLVE_RESIDUAL_TOL * y.norm().map_err(err)?.max(1.0));
        }
        let mut worst: f64 = 0.0;
        for j in 0..=x.j.unwrap_or(DEFAULT_PREIMAGE_J) {
            let (ok, pre) = diagonal::basis_range_criterion(&x.d, &x.f, &x.g, j).map_err(err)?;
            let pre = match (ok, pre) {
                (true, Some(p)) => p,
                _ => return Err(format!("e_{j} has no preimage although T is invertible")),
            };
            let e = GeomTailSeq::basis(j);
            let res = t.apply(&pre).map_err(err)?.distance(&e).map_err(err)? / pre.norm().map_err(err)?.max(1.0);
            worst = worst.max(res);
        }
        ctx.residual("basis_preimage", worst);
        ctx.bound("basis_preimage", worst, SOLVE_RESIDUAL_TOL);
    }
    if st.oracle {
        let expectation = match diag.verdict {
            DiagonalVerdict::Invertible => Expectation::LeftInvertible { c: None },
            DiagonalVerdict::NotInjective => Expectation::NotLeftInvertible {
                exact_kernel: diag.kernel_witness.as_ref().is_some_and(|w| w.is_finitely_supported()),
            },
            DiagonalVerdict::NotLeftInvertible => Expectation::NotLeftInvertible { exact_kernel: false },
        };
        ctx.oracle(&t, expectation)?;
    }
    Ok(())
}

fn fmt_complex(z: Complex) -> String {
    format!("{}{:+}i", z.re, z.im)
}

/// Human-readable summary: one line per problem, failing checks indented.
pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    let s = report.summary;
    let _ = writeln!(
        out,
        "rankone {}  seed={}  problems={}  passed={}  failed={}  errors={}",
        report.tool_version, report.seed, s.total, s.passed, s.failed, s.errors
    );
    for p in &report.problems {
        let status = match p.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        };
        let _ = write!(out, "{status} {} [{}]", p.id, p.kind);
        if let Some(v) = &p.verdict {
            let _ = write!(out, " verdict={v}");
        }
        if let Some(c) = p.c {
            let _ = write!(out, " c={c}");
        }
        if let Some(r) = p.r {
            let _ = write!(out, " r={}", fmt_complex(r));
        }
        if let Some(o) = &p.oracle {
            let sig: Vec<String> = o.rows.iter().map(|r| format!("{}:{:.3e}", r.n, r.sigma_min)).collect();
            let _ = write!(out, " sigma_min=[{}]", sig.join(" "));
        }
        out.push('\n');
        for c in p.checks.iter().filter(|c| !c.passed) {
            let _ = write!(out, "  failed {}", c.name);
            if let (Some(v), Some(l)) = (c.value, c.limit) {
                let _ = write!(out, " value={v:e} limit={l:e}");
            }
            if let Some(d) = &c.detail {
                let _ = write!(out, " ({d})");
            }
            out.push('\n');
        }
        if let Some(e) = &p.error {
            let _ = writeln!(out, "  error: {e}");
        }
        if let Some(n) = &p.note {
            let _ = writeln!(out, "  note: {n}");
        }
    }
    out
}

/// A spec-file problem entry for `V = S^order` with the given vectors.
pub fn isometry_problem_json(id: &str, order: usize, f: &GeomTailSeq, g: &GeomTailSeq) -> Value {
    json!({
        "id": id,
        "kind": "isometry_perturbation",
        "payload": {"order": order, "f": f, "g": g},
    })
}

//! Powers and analyticity probes for `S = V + Vᵐf₀ ⊗ Vⁿf₀` and related
//! rank-one perturbations of the unilateral shift.
//!
//! Analyticity (`⋂ Tⁿℋ = {0}`) cannot be decided from finite data. This
//! module certifies the two known sufficient conditions and runs
//! coordinate-vanishing probes, which can refute range containment but never
//! prove it.

use serde::Serialize;
use thiserror::Error;

use crate::operators::{OperatorError, OperatorExpr};
use crate::perturbation::{self, PerturbationError, ShiftIsometry};
use crate::probe::{self, ProbeShape};
use crate::seq::{Complex, GeomTailSeq};

/// Threshold for "this vector is zero" in the checks below.
pub const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Perturbation(#[from] PerturbationError),
}

impl From<crate::seq::SeqError> for AnalyticError {
    fn from(e: crate::seq::SeqError) -> Self {
        AnalyticError::Operator(e.into())
    }
}

/// `f_t = Vᵗf₀` for `t ≥ 0` and `V*^{−t}f₀` for `t < 0`, with `V = S`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedFamily {
    pub base: GeomTailSeq,
}

impl ShiftedFamily {
    pub fn new(base: GeomTailSeq) -> Self {
        Self { base }
    }

    pub fn at(&self, t: i64) -> GeomTailSeq {
        if t >= 0 {
            self.base.shift_right(t as usize)
        } else {
            self.base.shift_left(t.unsigned_abs() as usize)
        }
    }
}

fn require_kernel_member(f0: &GeomTailSeq) -> Result<(), AnalyticError> {
    let leak = f0.shift_left(1).norm()?;
    if leak > ZERO_TOL * f0.norm()?.max(1.0) {
        return Err(AnalyticError::PreconditionViolated(format!(
            "f0 is not in ker S* (‖S*f0‖ = {leak:e})"
        )));
    }
    Ok(())
}

/// `S = V + f_m ⊗ f_n` with `V` the unilateral shift.
pub fn vm_vn_operator(m: usize, n: usize, f0: &GeomTailSeq) -> OperatorExpr {
    let fam = ShiftedFamily::new(f0.clone());
    perturbation::perturbed(&OperatorExpr::shift(1), &fam.at(m as i64), &fam.at(n as i64))
}

/// Closed form of `S^{k+1}`: `V^{k+1} + Σ_{j=0}^{k} f_{m+j} ⊗ f_{n−k+j}`.
///
/// Terms whose right factor has negative index vanish and are omitted.
pub fn perturbed_power(m: usize, n: usize, f0: &GeomTailSeq, k: usize) -> Result<OperatorExpr, AnalyticError> {
    require_kernel_member(f0)?;
    if m <= n {
        return Err(AnalyticError::PreconditionViolated(format!("need m > n, got m = {m}, n = {n}")));
    }
    let fam = ShiftedFamily::new(f0.clone());
    let mut terms = vec![OperatorExpr::shift(k + 1)];
    for j in 0..=k {
        let right = n as i64 - k as i64 + j as i64;
        let g = fam.at(right);
        if g.is_zero() {
            continue;
        }
        terms.push(OperatorExpr::rank_one(fam.at((m + j) as i64), g));
    }
    Ok(OperatorExpr::sum(terms))
}

/// `op ∘ op ∘ … ∘ op` (`times` factors).
pub fn iterated(op: &OperatorExpr, times: usize) -> OperatorExpr {
    match times {
        0 => OperatorExpr::Identity,
        _ => (1..times).fold(op.clone(), |acc, _| OperatorExpr::compose(op.clone(), acc)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class")]
pub enum VmVnClass {
    /// `m > n + 1`; carries the verified `c(V; f_m, f_n) = 1`.
    Shift { c: f64 },
    /// `m = n + 1`.
    Analytic,
    /// `m ≤ n`: no sufficient condition applies.
    Unknown,
}

/// Which sufficient condition covers `S = V + Vᵐf₀ ⊗ Vⁿf₀`.
pub fn classify_vm_vn(m: usize, n: usize, f0: &GeomTailSeq) -> Result<VmVnClass, AnalyticError> {
    require_kernel_member(f0)?;
    if f0.is_zero() {
        return Err(AnalyticError::PreconditionViolated("f0 must be nonzero".into()));
    }
    if m > n + 1 {
        let fam = ShiftedFamily::new(f0.clone());
        let c = perturbation::c_value(&OperatorExpr::shift(1), &fam.at(m as i64), &fam.at(n as i64))?;
        if (c - 1.0).abs() > ZERO_TOL {
            return Err(AnalyticError::PreconditionViolated(format!(
                "shift case requires c = 1, computed {c}"
            )));
        }
        Ok(VmVnClass::Shift { c })
    } else if m > n {
        Ok(VmVnClass::Analytic)
    } else {
        Ok(VmVnClass::Unknown)
    }
}

/// `V*g + ⟨g, f⟩ g = 0`, i.e. `g ∈ ker (V + f ⊗ g)*`. When it holds,
/// `(V + f ⊗ g)^{n+1} = Vⁿ (V + f ⊗ g)` and the perturbation is analytic.
pub fn kernel_condition_residual(
    v: &OperatorExpr,
    f: &GeomTailSeq,
    g: &GeomTailSeq,
) -> Result<f64, AnalyticError> {
    let iso = ShiftIsometry::from_expr(v)?;
    let w = iso.apply_adjoint(g).add(&g.scale(g.inner_product(f)?))?;
    Ok(w.norm()?)
}

pub fn kernel_condition_check(v: &OperatorExpr, f: &GeomTailSeq, g: &GeomTailSeq) -> Result<bool, AnalyticError> {
    Ok(kernel_condition_residual(v, f, g)? <= ZERO_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeRow {
    pub power: usize,
    #[serde(rename = "maxLeakage")]
    pub max_leakage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub rows: Vec<ProbeRow>,
}

impl ProbeReport {
    pub fn max_leakage(&self) -> f64 {
        self.rows.iter().map(|r| r.max_leakage).fold(0.0, f64::max)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.max_leakage() <= tol
    }
}

/// For `j = 1..=depth` and random unit probes `h`, measures the largest
/// coordinate of `S^{n+j+1} h` below index `p (n+j+1)`. Zero leakage is
/// consistent with `S^{n+j+1}ℋ ⊆ V^{n+j+1}ℋ`; it is not a proof.
pub fn analyticity_probe(
    s: &OperatorExpr,
    shift_order: usize,
    nval: usize,
    depth: usize,
    probes: usize,
    seed: u64,
) -> Result<ProbeReport, AnalyticError> {
    let mut rng = probe::rng(seed);
    let mut rows: Vec<ProbeRow> = (1..=depth)
        .map(|j| ProbeRow {
            power: nval + j + 1,
            max_leakage: 0.0,
        })
        .collect();
    for _ in 0..probes {
        let mut x = probe::random_unit_seq(&mut rng, ProbeShape::default());
        let mut power = 0;
        for row in rows.iter_mut() {
            while power < row.power {
                x = s.apply(&x)?;
                power += 1;
            }
            let leak = (0..shift_order * row.power)
                .map(|i| x.coordinate(i).norm())
                .fold(0.0, f64::max);
            row.max_leakage = row.max_leakage.max(leak);
        }
    }
    Ok(ProbeReport { rows })
}

/// Largest pointwise gap between `S^{k+1}` from the closed form and from
/// `k + 1` successive applications of `S`, over `probes` random vectors.
pub fn power_formula_residual(
    m: usize,
    n: usize,
    f0: &GeomTailSeq,
    k: usize,
    probes: usize,
    seed: u64,
) -> Result<f64, AnalyticError> {
    let formula = perturbed_power(m, n, f0, k)?;
    let s = vm_vn_operator(m, n, f0);
    let mut rng = probe::rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let h = probe::random_unit_seq(&mut rng, ProbeShape::default());
        let mut x = h.clone();
        for _ in 0..=k {
            x = s.apply(&x)?;
        }
        worst = worst.max(formula.apply(&h)?.distance(&x)?);
    }
    Ok(worst)
}

/// A unimodular multiple of `e₀`, the general unit vector in `ker S*`.
pub fn unit_kernel_vector(phase: f64) -> GeomTailSeq {
    GeomTailSeq::basis(0).scale(Complex::from_polar(1.0, phase))
}

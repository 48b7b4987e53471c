//! Rank-one perturbations `T = D + f ⊗ g` of a diagonal operator.
//!
//! With `D = diag(αₙ)`, `f = Σ aₙ eₙ`, `g = Σ bₙ eₙ` and all of `αₙ, aₙ, bₙ`
//! nonzero, everything is governed by
//!
//! ```text
//! r = 1 + Σₙ aₙ b̄ₙ / αₙ
//! ```
//!
//! together with square-summability of `aₙ/αₙ`: `T` has a kernel iff
//! `r = 0` and `D⁻¹f ∈ ℓ²`, every `eⱼ` lies in its range iff `r ≠ 0` and
//! `D⁻¹f ∈ ℓ²`, and `T` is left-invertible iff it is invertible.

use serde::Serialize;
use thiserror::Error;

use crate::operators::{OperatorError, OperatorExpr};
use crate::perturbation::Verdict;
use crate::seq::{Complex, DiagonalSymbol, GeomTailSeq, SeqError};

/// `|r|` at or below this is treated as `r = 0`.
pub const R_ZERO_TOL: f64 = 1e-12;
/// Agreement required between the series and the inner-product forms of `r`.
pub const R_AGREEMENT_TOL: f64 = 1e-13;
/// Residual bound for kernel witnesses and range preimages.
pub const RESIDUAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagonalError {
    #[error("standing assumption violated: {0}")]
    StandingAssumptionViolated(String),
    #[error("series for r diverges (ratio modulus {0} >= 1)")]
    Divergent(f64),
    #[error("D is not invertible on the representation (inf |αₙ| = {0})")]
    SingularD(f64),
    #[error("r = {0} vanishes")]
    ZeroR(Complex),
    #[error("internal cross-check failed: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Seq(SeqError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

impl From<SeqError> for DiagonalError {
    fn from(e: SeqError) -> Self {
        match e {
            SeqError::Divergent(q) => DiagonalError::Divergent(q),
            other => DiagonalError::Seq(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DiagonalVerdict {
    Invertible,
    NotInjective,
    NotLeftInvertible,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalDiagnostics {
    /// `None` when the series for `r` diverges.
    pub r: Option<Complex>,
    /// `1 + ⟨D⁻¹f, g⟩`, present when `D` is invertible.
    pub r_inner: Option<Complex>,
    pub square_summable: bool,
    pub d_invertible: bool,
    pub d_inf_modulus: f64,
    pub standing_assumption: bool,
    pub verdict: DiagonalVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_witness: Option<GeomTailSeq>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_residual: Option<f64>,
}

/// `T = D + f ⊗ g`.
pub fn perturbation_op(d: &DiagonalSymbol, f: &GeomTailSeq, g: &GeomTailSeq) -> OperatorExpr {
    OperatorExpr::sum(vec![
        OperatorExpr::diagonal(d.clone()),
        OperatorExpr::rank_one(f.clone(), g.clone()),
    ])
}

fn all_coordinates_nonzero(v: &GeomTailSeq) -> bool {
    let zero = Complex::new(0.0, 0.0);
    v.prefix().iter().all(|z| *z != zero)
        && matches!(v.tails(), [t] if t.scale != zero && t.ratio != zero)
}

/// Structural check of `αₙ, aₙ, bₙ ≠ 0` for every `n`: nonzero prefixes and
/// a single nonzero geometric tail on each vector.
pub fn check_standing_assumption(d: &DiagonalSymbol, f: &GeomTailSeq, g: &GeomTailSeq) -> Result<(), DiagonalError> {
    if !d.all_nonzero() {
        return Err(DiagonalError::StandingAssumptionViolated("D has a zero diagonal entry".into()));
    }
    for (name, v) in [("f", f), ("g", g)] {
        if !all_coordinates_nonzero(v) {
            return Err(DiagonalError::StandingAssumptionViolated(format!(
                "{name} must have nonzero prefix entries and exactly one nonzero geometric tail"
            )));
        }
    }
    Ok(())
}

fn require_inputs(d: &DiagonalSymbol, f: &GeomTailSeq, g: &GeomTailSeq) -> Result<(), DiagonalError> {
    d.check_bounded()?;
    if !f.is_l2() || !g.is_l2() {
        return Err(SeqError::NotSquareSummable.into());
    }
    Ok(())
}

/// `1 + Σ aₙ b̄ₙ / αₙ`, summed in closed form directly from the three
/// representations.
pub fn r_value(d: &DiagonalSymbol, f: &GeomTailSeq, g: &GeomTailSeq) -> Result<Complex, DiagonalError> {
    if !d.all_nonzero() {
        return Err(SeqError::ZeroEntry.into());
    }
    let len = f.start().max(g.start()).max(d.prefix().len());
    let (fa, gb, da) = (f.rebased(len), g.rebased(len), d.rebased(len));
    let one = Complex::new(1.0, 0.0);
    let mut r = one;
    for ((a, b), alpha) in fa.prefix().iter().zip(gb.prefix()).zip(da.prefix()) {
        r += a * b.conj() / alpha;
    }
    let dt = da.tail().as_geom();
    for s in fa.tails() {
        for t in gb.tails() {
            let q = s.ratio * t.ratio.conj() / dt.ratio;
            if q.norm() >= 1.0 {
                return Err(DiagonalError::Divergent(q.norm()));
            }
            r += s.scale * t.scale.conj() / dt.scale / (one - q);
        }
    }
    Ok(r)
}

/// Whether `(aₙ/αₙ)ₙ` is square-summable.
pub fn square_summable(d: &DiagonalSymbol, f: &GeomTailSeq) -> Result<bool, DiagonalError> {
    Ok(f.divide_by(d)?.is_l2())
}

/// `T` has a nonzero kernel iff `r = 0` and `D⁻¹f ∈ ℓ²`; then `D⁻¹f` spans it.
pub fn kernel_criterion(
    d: &DiagonalSymbol,
    f: &GeomTailSeq,
    g: &GeomTailSeq,
) -> Result<(bool, Option<GeomTailSeq>), DiagonalError> {
    check_standing_assumption(d, f, g)?;
    require_inputs(d, f, g)?;
    let dinv_f = f.divide_by(d)?;
    if !dinv_f.is_l2() {
        return Ok((false, None));
    }
    let r = r_value(d, f, g)?;
    if r.norm() <= R_ZERO_TOL {
        Ok((true, Some(dinv_f)))
    } else {
        Ok((false, None))
    }
}

/// `eⱼ ∈ ran T` iff `r ≠ 0` and `D⁻¹f ∈ ℓ²`; the preimage is
/// `y = −(b̄ⱼ / (r αⱼ)) D⁻¹f + (1/αⱼ) eⱼ`.
pub fn basis_range_criterion(
    d: &DiagonalSymbol,
    f: &GeomTailSeq,
    g: &GeomTailSeq,
    j: usize,
) -> Result<(bool, Option<GeomTailSeq>), DiagonalError> {
    check_standing_assumption(d, f, g)?;
    require_inputs(d, f, g)?;
    let dinv_f = f.divide_by(d)?;
    if !dinv_f.is_l2() {
        return Ok((false, None));
    }
    let r = r_value(d, f, g)?;
    if r.norm() <= R_ZERO_TOL {
        return Ok((false, None));
    }
    let alpha_j = d.entry(j);
    let b_j = g.coordinate(j);
    let y = dinv_f
        .scale(-b_j.conj() / (r * alpha_j))
        .add(&GeomTailSeq::basis(j).scale(Complex::new(1.0, 0.0) / alpha_j))?;
    Ok((true, Some(y)))
}

/// Full verdict: `D` not invertible means `T` is not even left-invertible;
/// otherwise `T` is invertible iff `r ≠ 0`, and `r` must match
/// `1 + ⟨D⁻¹f, g⟩`.
pub fn invertibility_verdict(
    d: &DiagonalSymbol,
    f: &GeomTailSeq,
    g: &GeomTailSeq,
) -> Result<DiagonalDiagnostics, DiagonalError> {
    check_standing_assumption(d, f, g)?;
    require_inputs(d, f, g)?;
    let inf = d.inf_modulus();
    let d_invertible = inf > 0.0;
    let dinv_f = f.divide_by(d)?;
    let square_summable = dinv_f.is_l2();
    let r = match r_value(d, f, g) {
        Ok(r) => Some(r),
        Err(DiagonalError::Divergent(_)) => None,
        Err(e) => return Err(e),
    };
    let mut diag = DiagonalDiagnostics {
        r,
        r_inner: None,
        square_summable,
        d_invertible,
        d_inf_modulus: inf,
        standing_assumption: true,
        verdict: DiagonalVerdict::NotLeftInvertible,
        kernel_witness: None,
        kernel_residual: None,
    };
    if !d_invertible {
        return Ok(diag);
    }
    let r = r.ok_or_else(|| DiagonalError::Inconsistent("r diverges although D is invertible".into()))?;
    let r_inner = Complex::new(1.0, 0.0) + dinv_f.inner_product(g)?;
    diag.r_inner = Some(r_inner);
    if (r - r_inner).norm() > R_AGREEMENT_TOL * r.norm().max(1.0) {
        return Err(DiagonalError::Inconsistent(format!(
            "series r = {r} but 1 + <D^-1 f, g> = {r_inner}"
        )));
    }
    if r.norm() <= R_ZERO_TOL {
        let residual = perturbation_op(d, f, g).apply(&dinv_f)?.norm()?;
        if residual > RESIDUAL_TOL * dinv_f.norm()?.max(1.0) {
            return Err(DiagonalError::Inconsistent(format!(
                "kernel witness leaves residual {residual:e}"
            )));
        }
        diag.verdict = DiagonalVerdict::NotInjective;
        diag.kernel_witness = Some(dinv_f);
        diag.kernel_residual = Some(residual);
    } else {
        diag.verdict = DiagonalVerdict::Invertible;
    }
    if (diag.verdict == DiagonalVerdict::Invertible) != (r_inner.norm() > R_ZERO_TOL) {
        return Err(DiagonalError::Inconsistent("verdict disagrees with 1 + <D^-1 f, g> != 0".into()));
    }
    Ok(diag)
}

/// `x = D⁻¹y − (1/r) ⟨D⁻¹y, g⟩ D⁻¹f`, the unique solution of `T x = y`.
///
/// Needs only `D` invertible and `r ≠ 0`; zero coordinates in `f` or `g`
/// are allowed.
pub fn solve(
    d: &DiagonalSymbol,
    f: &GeomTailSeq,
    g: &GeomTailSeq,
    y: &GeomTailSeq,
) -> Result<GeomTailSeq, DiagonalError> {
    require_inputs(d, f, g)?;
    let inf = d.inf_modulus();
    if inf <= 0.0 {
        return Err(DiagonalError::SingularD(inf));
    }
    let dinv_f = f.divide_by(d)?;
    let dinv_y = y.divide_by(d)?;
    let r = Complex::new(1.0, 0.0) + dinv_f.inner_product(g)?;
    if r.norm() <= R_ZERO_TOL {
        return Err(DiagonalError::ZeroR(r));
    }
    let coeff = dinv_y.inner_product(g)? / r;
    Ok(dinv_y.sub(&dinv_f.scale(coeff))?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundedBelowReport {
    pub d_bounded_below: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_injective: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub implied: Option<Verdict>,
}

/// The implication chain on the representable class:
/// `D` not bounded below ⇒ `T` not left-invertible; `D` bounded below and
/// `T` injective ⇒ `T` left-invertible (and then invertible). The chain is
/// checked against [`invertibility_verdict`].
pub fn bounded_below_checks(
    d: &DiagonalSymbol,
    f: &GeomTailSeq,
    g: &GeomTailSeq,
) -> Result<BoundedBelowReport, DiagonalError> {
    check_standing_assumption(d, f, g)?;
    require_inputs(d, f, g)?;
    let full = invertibility_verdict(d, f, g)?;
    if !full.d_invertible {
        return Ok(BoundedBelowReport {
            d_bounded_below: false,
            t_injective: None,
            implied: Some(Verdict::NotLeftInvertible),
        });
    }
    let (has_kernel, _) = kernel_criterion(d, f, g)?;
    let report = BoundedBelowReport {
        d_bounded_below: true,
        t_injective: Some(!has_kernel),
        implied: (!has_kernel).then_some(Verdict::LeftInvertible),
    };
    let chain_ok = match report.implied {
        Some(Verdict::LeftInvertible) => full.verdict == DiagonalVerdict::Invertible,
        _ => full.verdict == DiagonalVerdict::NotInjective,
    };
    if !chain_ok {
        return Err(DiagonalError::Inconsistent(format!(
            "bounded-below chain {report:?} contradicts verdict {:?}",
            full.verdict
        )));
    }
    Ok(report)
}

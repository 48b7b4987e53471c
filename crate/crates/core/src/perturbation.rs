//! Left-invertibility of `V + f ⊗ g` for a shift isometry `V = Sᵖ`.
//!
//! The operator is left-invertible exactly when
//!
//! ```text
//! c(V; f, g) = (‖f‖² − ‖V*f‖²) ‖g‖² + |1 + ⟨V*f, g⟩|²
//! ```
//!
//! is nonzero, and then `X (V + f ⊗ g)*` is an explicit left inverse with
//!
//! ```text
//! X = I + (1/c) { ‖g‖² V*f ⊗ V*f + (‖V*f‖² − ‖f‖²) g ⊗ g − (R + R*) },
//! R = (1 + ⟨g, V*f⟩) V*f ⊗ g.
//! ```

use serde::Serialize;
use thiserror::Error;

use crate::operators::{OperatorError, OperatorExpr, ISOMETRY_TOL};
use crate::seq::{Complex, GeomTailSeq, SeqError};

/// Default zero threshold for `c`.
pub const DEFAULT_C_TOL: f64 = 1e-10;
/// Agreement required between the direct and the expanded formula for `c`.
pub const FORMULA_AGREEMENT_TOL: f64 = 1e-12;
/// Allowed negative round-off in `c` before clamping.
pub const NEGATIVE_C_SLACK: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PerturbationError {
    #[error("V must be a structural shift power, got {0}")]
    NotAnIsometry(String),
    #[error("V + f ⊗ g is not left-invertible (c = {0:e})")]
    NotLeftInvertible(f64),
    #[error("vector is not a unit vector (‖h‖² = {0})")]
    NotUnitVector(f64),
    #[error("scalar is not unimodular (|α| = {0})")]
    NotUnimodular(f64),
    #[error("c formulas disagree: direct {direct}, expanded {expanded}")]
    FormulaMismatch { direct: f64, expanded: f64 },
    #[error("c = {0:e} is negative beyond round-off")]
    NegativeC(f64),
    #[error("verdict and kernel witnesses disagree: {0}")]
    InconsistentWitness(String),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

impl From<SeqError> for PerturbationError {
    fn from(e: SeqError) -> Self {
        PerturbationError::Operator(e.into())
    }
}

/// The isometry `Sᵖ`, the only isometries accepted here.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftIsometry {
    pub order: usize,
}

impl ShiftIsometry {
    pub fn new(order: usize) -> Self {
        Self { order }
    }

    /// Accepts `ShiftPow` and `Identity` (`S⁰`); anything else is rejected
    /// rather than tested by probes.
    pub fn from_expr(v: &OperatorExpr) -> Result<Self, PerturbationError> {
        match v {
            OperatorExpr::ShiftPow { p } => Ok(Self::new(*p)),
            OperatorExpr::Identity => Ok(Self::new(0)),
            other => Err(PerturbationError::NotAnIsometry(format!("{other:?}"))),
        }
    }

    pub fn expr(&self) -> OperatorExpr {
        OperatorExpr::shift(self.order)
    }

    pub fn apply(&self, h: &GeomTailSeq) -> GeomTailSeq {
        h.shift_right(self.order)
    }

    pub fn apply_adjoint(&self, h: &GeomTailSeq) -> GeomTailSeq {
        h.shift_left(self.order)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    LeftInvertible,
    NotLeftInvertible,
}

/// The two conditions whose conjunction is equivalent to `c = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witnesses {
    /// `‖V*f‖ = ‖f‖`, i.e. `f ∈ ran V`.
    pub f_in_range: bool,
    /// `⟨V*f, g⟩ = −1`.
    pub beta_is_minus_one: bool,
}

/// Vanishing coefficients of `X T* T − I` in the basis
/// `g⊗g, V*f⊗g, g⊗V*f, V*f⊗V*f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coefficients {
    pub a1: Complex,
    pub a2: Complex,
    pub a3: Complex,
    pub a4: Complex,
}

impl Coefficients {
    pub fn max_modulus(&self) -> f64 {
        [self.a1, self.a2, self.a3, self.a4]
            .iter()
            .map(|a| a.norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationDiagnostics {
    pub c: f64,
    pub c_expanded: f64,
    pub beta: Complex,
    pub norm_f2: f64,
    pub norm_vstar_f2: f64,
    pub norm_g2: f64,
    pub verdict: Verdict,
    pub witnesses: Witnesses,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Coefficients>,
}

/// Norms and `β` shared by every formula in this module.
#[derive(Debug, Clone)]
struct Parts {
    vstar_f: GeomTailSeq,
    norm_f2: f64,
    norm_vstar_f2: f64,
    norm_g2: f64,
    beta: Complex,
}

impl Parts {
    fn new(v: ShiftIsometry, f: &GeomTailSeq, g: &GeomTailSeq) -> Result<Self, PerturbationError> {
        let vstar_f = v.apply_adjoint(f);
        Ok(Self {
            norm_f2: f.norm_sq()?,
            norm_vstar_f2: vstar_f.norm_sq()?,
            norm_g2: g.norm_sq()?,
            beta: vstar_f.inner_product(g)?,
            vstar_f,
        })
    }

    fn c_direct(&self) -> f64 {
        (self.norm_f2 - self.norm_vstar_f2) * self.norm_g2 + (1.0 + self.beta).norm_sqr()
    }

    fn c_expanded(&self) -> f64 {
        1.0 + self.norm_f2 * self.norm_g2 + 2.0 * self.beta.re + self.beta.norm_sqr()
            - self.norm_vstar_f2 * self.norm_g2
    }

    fn checked_c(&self) -> Result<(f64, f64), PerturbationError> {
        let direct = self.c_direct();
        let expanded = self.c_expanded();
        let scale = 1.0f64.max(direct.abs()).max(self.norm_f2 * self.norm_g2);
        if (direct - expanded).abs() > FORMULA_AGREEMENT_TOL * scale {
            return Err(PerturbationError::FormulaMismatch { direct, expanded });
        }
        if direct < -NEGATIVE_C_SLACK * scale {
            return Err(PerturbationError::NegativeC(direct));
        }
        Ok((direct.max(0.0), expanded))
    }
}

/// `c(V; f, g)`, checked against the expanded form
/// `1 + ‖f‖²‖g‖² + 2 Re β + |β|² − ‖V*f‖²‖g‖²` and clamped at zero.
pub fn c_value(v: &OperatorExpr, f: &GeomTailSeq, g: &GeomTailSeq) -> Result<f64, PerturbationError> {
    let v = ShiftIsometry::from_expr(v)?;
    Ok(Parts::new(v, f, g)?.checked_c()?.0)
}

/// Full diagnostics with zero threshold `tol`.
pub fn verdict(
    v: &OperatorExpr,
    f: &GeomTailSeq,
    g: &GeomTailSeq,
    tol: f64,
) -> Result<PerturbationDiagnostics, PerturbationError> {
    let iso = ShiftIsometry::from_expr(v)?;
    let parts = Parts::new(iso, f, g)?;
    let (c, c_expanded) = parts.checked_c()?;
    let witnesses = Witnesses {
        f_in_range: parts.norm_f2 - parts.norm_vstar_f2 <= tol * parts.norm_f2.max(1.0),
        beta_is_minus_one: (1.0 + parts.beta).norm_sqr() <= tol,
    };
    let verdict = if c > tol {
        Verdict::LeftInvertible
    } else {
        Verdict::NotLeftInvertible
    };
    if verdict == Verdict::NotLeftInvertible && !(witnesses.f_in_range && witnesses.beta_is_minus_one) {
        return Err(PerturbationError::InconsistentWitness(format!(
            "c = {c:e} but witnesses are {witnesses:?}"
        )));
    }
    let coefficients = (verdict == Verdict::LeftInvertible).then(|| coefficients_from(&parts, c));
    Ok(PerturbationDiagnostics {
        c,
        c_expanded,
        beta: parts.beta,
        norm_f2: parts.norm_f2,
        norm_vstar_f2: parts.norm_vstar_f2,
        norm_g2: parts.norm_g2,
        verdict,
        witnesses,
        coefficients,
    })
}

/// `V + f ⊗ g` as an expression.
pub fn perturbed(v: &OperatorExpr, f: &GeomTailSeq, g: &GeomTailSeq) -> OperatorExpr {
    OperatorExpr::sum(vec![v.clone(), OperatorExpr::rank_one(f.clone(), g.clone())])
}

/// The operator `X` of the left inverse `X (V + f ⊗ g)*`.
fn x_operator(parts: &Parts, g: &GeomTailSeq, c: f64) -> OperatorExpr {
    let u = &parts.vstar_f;
    let gamma = Complex::new(1.0, 0.0) + g.inner_product(u).expect("ℓ² inputs");
    let r = OperatorExpr::scaled(gamma, OperatorExpr::rank_one(u.clone(), g.clone()));
    let minus_one = Complex::new(-1.0, 0.0);
    let correction = OperatorExpr::sum(vec![
        OperatorExpr::scaled(Complex::new(parts.norm_g2, 0.0), OperatorExpr::rank_one(u.clone(), u.clone())),
        OperatorExpr::scaled(
            Complex::new(parts.norm_vstar_f2 - parts.norm_f2, 0.0),
            OperatorExpr::rank_one(g.clone(), g.clone()),
        ),
        OperatorExpr::scaled(minus_one, r.adjoint()),
        OperatorExpr::scaled(minus_one, r),
    ]);
    OperatorExpr::sum(vec![
        OperatorExpr::Identity,
        OperatorExpr::scaled(Complex::new(1.0 / c, 0.0), correction),
    ])
}

/// The explicit left inverse `L = X (V + f ⊗ g)*`.
pub fn left_inverse(
    v: &OperatorExpr,
    f: &GeomTailSeq,
    g: &GeomTailSeq,
    tol: f64,
) -> Result<OperatorExpr, PerturbationError> {
    let iso = ShiftIsometry::from_expr(v)?;
    let parts = Parts::new(iso, f, g)?;
    let (c, _) = parts.checked_c()?;
    if c <= tol {
        return Err(PerturbationError::NotLeftInvertible(c));
    }
    Ok(OperatorExpr::compose(
        x_operator(&parts, g, c),
        OperatorExpr::adjoint_of(perturbed(v, f, g)),
    ))
}

/// Expands `X T*T = X (I + g⊗u + u⊗g + ‖f‖² g⊗g)` with `u = V*f` and
/// collects the coefficient of each rank-one term other than `I`.
fn coefficients_from(parts: &Parts, c: f64) -> Coefficients {
    let (nf, nu, ng, beta) = (parts.norm_f2, parts.norm_vstar_f2, parts.norm_g2, parts.beta);
    let one = Complex::new(1.0, 0.0);
    let inv_c = 1.0 / c;
    // K = ng u⊗u + (nu − nf) g⊗g − (1 + β̄) u⊗g − (1 + β) g⊗u, X = I + K/c.
    // K u = ku_u u + ku_g g and K g = kg_u u + kg_g g.
    let ku_u = ng * nu - (one + beta.conj()) * beta;
    let ku_g = (nu - nf) * beta - (one + beta) * nu;
    let kg_u = ng * beta.conj() - (one + beta.conj()) * ng;
    let kg_g = (nu - nf) * ng - (one + beta) * beta.conj();
    // K(a ⊗ b) = (Ka) ⊗ b.
    let a1 = nf + inv_c * ((nu - nf) + ku_g + nf * kg_g);
    let a2 = one + inv_c * (-(one + beta.conj()) + ku_u + nf * kg_u);
    let a3 = one + inv_c * (-(one + beta) + kg_g);
    let a4 = inv_c * (ng + kg_u);
    Coefficients { a1, a2, a3, a4 }
}

/// The four coefficients that must vanish for `X T*` to be a left inverse.
pub fn verification_coefficients(
    v: &OperatorExpr,
    f: &GeomTailSeq,
    g: &GeomTailSeq,
    tol: f64,
) -> Result<Coefficients, PerturbationError> {
    let iso = ShiftIsometry::from_expr(v)?;
    let parts = Parts::new(iso, f, g)?;
    let (c, _) = parts.checked_c()?;
    if c <= tol {
        return Err(PerturbationError::NotLeftInvertible(c));
    }
    Ok(coefficients_from(&parts, c))
}

/// An isometric rank-one perturbation `V + (α − 1) h ⊗ V*h`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsometricPerturbation {
    pub f: GeomTailSeq,
    pub g: GeomTailSeq,
    pub op: OperatorExpr,
}

/// Builds `V + f ⊗ g` with `f = (α − 1) h` and `g = V*h` for a unit `h` and
/// unimodular `α`.
pub fn nakamura_perturbation(
    v: &OperatorExpr,
    h: &GeomTailSeq,
    alpha: Complex,
) -> Result<IsometricPerturbation, PerturbationError> {
    let iso = ShiftIsometry::from_expr(v)?;
    let nh = h.norm_sq()?;
    if (nh - 1.0).abs() > ISOMETRY_TOL {
        return Err(PerturbationError::NotUnitVector(nh));
    }
    if (alpha.norm() - 1.0).abs() > ISOMETRY_TOL {
        return Err(PerturbationError::NotUnimodular(alpha.norm()));
    }
    let f = h.scale(alpha - 1.0);
    let g = iso.apply_adjoint(h);
    let op = perturbed(v, &f, &g);
    Ok(IsometricPerturbation { f, g, op })
}

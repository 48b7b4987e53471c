//! The family `T_{α,β} = S² + (αz + (β − 1)z²) ⊗ 1` on H²(𝔻).
//!
//! Its matrix has column 0 equal to `α e₁ + β e₂` and column `j ≥ 1` equal to
//! `e_{j+2}`. It is an isometry iff `|α|² + |β|² = 1`, in which case
//! `U = S + (α e₀ + (β − 1) e₁) ⊗ e₀` (sending `e₀ ↦ α + βz`, `eₙ ↦ z^{n+1}`)
//! intertwines it with `S²`.

use serde::Serialize;
use thiserror::Error;

use crate::operators::{self, OperatorError, OperatorExpr};
use crate::perturbation::{self, PerturbationError};
use crate::probe::{self, ProbeShape};
use crate::seq::{Complex, GeomTailSeq};

pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HardyError {
    #[error("|α|² + |β|² = {0}, not 1")]
    NotIsometricParameters(f64),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Perturbation(#[from] PerturbationError),
}

impl From<crate::seq::SeqError> for HardyError {
    fn from(e: crate::seq::SeqError) -> Self {
        HardyError::Operator(e.into())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TAlphaBeta {
    pub alpha: Complex,
    pub beta: Complex,
    /// `αz + (β − 1)z²`.
    pub f: GeomTailSeq,
    /// The constant function `1`.
    pub g: GeomTailSeq,
    pub op: OperatorExpr,
}

impl TAlphaBeta {
    pub fn new(alpha: Complex, beta: Complex) -> Self {
        let f = GeomTailSeq::from_prefix(vec![Complex::new(0.0, 0.0), alpha, beta - 1.0])
            .expect("finite parameters");
        let g = GeomTailSeq::basis(0);
        let op = perturbation::perturbed(&OperatorExpr::shift(2), &f, &g);
        Self { alpha, beta, f, g, op }
    }

    pub fn modulus_sum(&self) -> f64 {
        self.alpha.norm_sqr() + self.beta.norm_sqr()
    }

    /// The intertwiner `U = S + (α e₀ + (β − 1) e₁) ⊗ e₀`.
    pub fn intertwiner(&self) -> OperatorExpr {
        let w = GeomTailSeq::from_prefix(vec![self.alpha, self.beta - 1.0]).expect("finite parameters");
        perturbation::perturbed(&OperatorExpr::shift(1), &w, &GeomTailSeq::basis(0))
    }
}

/// `T_{α,β}`; panics only on non-finite parameters.
pub fn make_t_alpha_beta(alpha: Complex, beta: Complex) -> TAlphaBeta {
    TAlphaBeta::new(alpha, beta)
}

/// `(c(S²; αz + (β − 1)z², 1), |α|² + |β|²)`.
pub fn c_identity_check(alpha: Complex, beta: Complex) -> Result<(f64, f64), HardyError> {
    let t = TAlphaBeta::new(alpha, beta);
    let c = perturbation::c_value(&OperatorExpr::shift(2), &t.f, &t.g)?;
    Ok((c, t.modulus_sum()))
}

pub fn isometry_condition(alpha: Complex, beta: Complex) -> bool {
    (alpha.norm_sqr() + beta.norm_sqr() - 1.0).abs() <= IDENTITY_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntertwinerReport {
    /// `max ‖U(T h) − S²(U h)‖` over `e₀..e₇` and the random probes.
    pub intertwining_residual: f64,
    /// `max |‖U h‖ − ‖h‖|` over the same probes.
    pub isometry_defect: f64,
    pub probes: usize,
}

impl IntertwinerReport {
    pub fn passed(&self) -> bool {
        self.intertwining_residual <= IDENTITY_TOL && self.isometry_defect <= IDENTITY_TOL
    }
}

/// Builds `U` and checks `U T_{α,β} = S² U` and that `U` is isometric.
pub fn intertwiner_u(
    alpha: Complex,
    beta: Complex,
    probes: usize,
    seed: u64,
) -> Result<(OperatorExpr, IntertwinerReport), HardyError> {
    if !isometry_condition(alpha, beta) {
        return Err(HardyError::NotIsometricParameters(alpha.norm_sqr() + beta.norm_sqr()));
    }
    let t = TAlphaBeta::new(alpha, beta);
    let u = t.intertwiner();
    let mut rng = probe::rng(seed);
    let mut vectors: Vec<GeomTailSeq> = (0..8).map(GeomTailSeq::basis).collect();
    vectors.extend((0..probes).map(|_| probe::random_unit_seq(&mut rng, ProbeShape::default())));
    let mut residual: f64 = 0.0;
    let mut defect: f64 = 0.0;
    for h in &vectors {
        let lhs = u.apply(&t.op.apply(h)?)?;
        let uh = u.apply(h)?;
        let rhs = uh.shift_right(2);
        residual = residual.max(lhs.distance(&rhs)?);
        defect = defect.max((uh.norm()? - h.norm()?).abs());
    }
    let report = IntertwinerReport {
        intertwining_residual: residual,
        isometry_defect: defect,
        probes: vectors.len(),
    };
    Ok((u, report))
}

/// Probe-based isometry test of `T_{α,β}`.
pub fn probe_isometry(alpha: Complex, beta: Complex, probes: usize, seed: u64) -> Result<bool, HardyError> {
    Ok(operators::isometry_check(&TAlphaBeta::new(alpha, beta).op, probes, seed)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    fn e(n: usize) -> GeomTailSeq {
        GeomTailSeq::basis(n)
    }

    #[test]
    fn columns_match_the_matrix() {
        let t = make_t_alpha_beta(c(1.0), c(0.0));
        assert!(t.op.apply(&e(0)).unwrap().distance(&e(1)).unwrap() < 1e-16);
        assert!(t.op.apply(&e(1)).unwrap().distance(&e(3)).unwrap() < 1e-16);

        let t = make_t_alpha_beta(c(0.0), c(1.0));
        assert!(t.f.is_zero());
        assert!(t.op.apply(&e(0)).unwrap().distance(&e(2)).unwrap() < 1e-16);

        let (a, b) = (Complex::new(0.3, -2.0), Complex::new(1.5, 0.5));
        let t = make_t_alpha_beta(a, b);
        let col0 = e(1).scale(a).add(&e(2).scale(b)).unwrap();
        assert!(t.op.apply(&e(0)).unwrap().distance(&col0).unwrap() < 1e-15);
        for j in 1..10 {
            assert!(t.op.apply(&e(j)).unwrap().distance(&e(j + 2)).unwrap() < 1e-16);
        }
    }

    #[test]
    fn c_identity() {
        let (cv, sum) = c_identity_check(c(3.0), c(4.0)).unwrap();
        assert!((cv - 25.0).abs() < 1e-12);
        assert_eq!(sum, 25.0);
        assert_eq!(c_identity_check(c(0.0), c(0.0)).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn isometry_conditions() {
        assert!(isometry_condition(c(1.0), c(0.0)));
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(isometry_condition(c(r), Complex::new(0.0, r)));
        assert!(!isometry_condition(c(1.0), c(1.0)));
        assert!(probe_isometry(c(r), Complex::new(0.0, r), 10, 2).unwrap());
        assert!(!probe_isometry(c(1.0), c(1.0), 10, 2).unwrap());
    }

    #[test]
    fn intertwiners() {
        let (_, rep) = intertwiner_u(c(1.0), c(0.0), 10, 0).unwrap();
        assert!(rep.passed(), "{rep:?}");
        let (u, rep) = intertwiner_u(c(0.0), c(1.0), 10, 0).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(u.apply(&e(0)).unwrap().distance(&e(1)).unwrap() < 1e-16);
        assert!(matches!(
            intertwiner_u(c(1.0), c(1.0), 1, 0),
            Err(HardyError::NotIsometricParameters(_))
        ));
    }
}

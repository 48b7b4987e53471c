//! Lazy operator expressions applied exactly to [`GeomTailSeq`] vectors.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::probe::{self, ProbeShape};
use crate::seq::{Complex, DiagonalSymbol, GeomTailSeq, SeqError};

/// Largest shift power accepted from external input.
pub const MAX_SHIFT_ORDER: usize = 4096;

/// Tolerance of [`isometry_check`].
pub const ISOMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error("rank-one factor is not square-summable")]
    NotSquareSummable,
    #[error("shift order {0} exceeds the limit {MAX_SHIFT_ORDER}")]
    ShiftTooLarge(usize),
}

/// A symbolic bounded operator on ℓ².
///
/// `ShiftPow(p)` is the unilateral shift `Sᵖ`, `RankOne { f, g }` is
/// `h ↦ ⟨h, g⟩ f`. Nothing is ever materialized; [`OperatorExpr::apply`]
/// walks the tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorExpr {
    Identity,
    ShiftPow {
        p: usize,
    },
    Diagonal {
        d: DiagonalSymbol,
    },
    RankOne {
        f: GeomTailSeq,
        g: GeomTailSeq,
    },
    Scale {
        lambda: Complex,
        inner: Box<OperatorExpr>,
    },
    Sum {
        terms: Vec<OperatorExpr>,
    },
    Compose {
        left: Box<OperatorExpr>,
        right: Box<OperatorExpr>,
    },
    Adjoint {
        inner: Box<OperatorExpr>,
    },
}

impl OperatorExpr {
    pub fn shift(p: usize) -> Self {
        OperatorExpr::ShiftPow { p }
    }

    pub fn diagonal(d: DiagonalSymbol) -> Self {
        OperatorExpr::Diagonal { d }
    }

    pub fn rank_one(f: GeomTailSeq, g: GeomTailSeq) -> Self {
        OperatorExpr::RankOne { f, g }
    }

    pub fn scaled(lambda: Complex, inner: OperatorExpr) -> Self {
        OperatorExpr::Scale {
            lambda,
            inner: Box::new(inner),
        }
    }

    pub fn sum(terms: Vec<OperatorExpr>) -> Self {
        OperatorExpr::Sum { terms }
    }

    /// `left ∘ right`.
    pub fn compose(left: OperatorExpr, right: OperatorExpr) -> Self {
        OperatorExpr::Compose {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn adjoint_of(inner: OperatorExpr) -> Self {
        OperatorExpr::Adjoint {
            inner: Box::new(inner),
        }
    }

    /// Checks the expression invariants: ℓ² rank-one factors, bounded
    /// diagonals and shift orders within [`MAX_SHIFT_ORDER`].
    pub fn validate(&self) -> Result<(), OperatorError> {
        match self {
            OperatorExpr::Identity => Ok(()),
            OperatorExpr::ShiftPow { p } if *p > MAX_SHIFT_ORDER => {
                Err(OperatorError::ShiftTooLarge(*p))
            }
            OperatorExpr::ShiftPow { .. } => Ok(()),
            OperatorExpr::Diagonal { d } => Ok(d.check_bounded()?),
            OperatorExpr::RankOne { f, g } => {
                if f.is_l2() && g.is_l2() {
                    Ok(())
                } else {
                    Err(OperatorError::NotSquareSummable)
                }
            }
            OperatorExpr::Scale { inner, .. } | OperatorExpr::Adjoint { inner } => inner.validate(),
            OperatorExpr::Sum { terms } => terms.iter().try_for_each(|t| t.validate()),
            OperatorExpr::Compose { left, right } => {
                left.validate()?;
                right.validate()
            }
        }
    }

    /// Largest total shift the expression can apply to a vector, used to size
    /// dense truncations.
    pub fn max_shift(&self) -> usize {
        match self {
            OperatorExpr::ShiftPow { p } => *p,
            OperatorExpr::Identity | OperatorExpr::Diagonal { .. } | OperatorExpr::RankOne { .. } => 0,
            OperatorExpr::Scale { inner, .. } | OperatorExpr::Adjoint { inner } => inner.max_shift(),
            OperatorExpr::Sum { terms } => terms.iter().map(|t| t.max_shift()).max().unwrap_or(0),
            OperatorExpr::Compose { left, right } => left.max_shift() + right.max_shift(),
        }
    }

    pub fn apply(&self, h: &GeomTailSeq) -> Result<GeomTailSeq, OperatorError> {
        Ok(match self {
            OperatorExpr::Identity => h.clone(),
            OperatorExpr::ShiftPow { p } => h.shift_right(*p),
            OperatorExpr::Diagonal { d } => h.pointwise_diagonal(d)?,
            OperatorExpr::RankOne { f, g } => f.scale(h.inner_product(g)?),
            OperatorExpr::Scale { lambda, inner } => inner.apply(h)?.scale(*lambda),
            OperatorExpr::Sum { terms } => {
                let mut acc = GeomTailSeq::zero();
                for t in terms {
                    acc = acc.add(&t.apply(h)?)?;
                }
                acc
            }
            OperatorExpr::Compose { left, right } => left.apply(&right.apply(h)?)?,
            OperatorExpr::Adjoint { inner } => inner.apply_adjoint(h)?,
        })
    }

    /// `op* h`, without building the adjoint expression.
    pub fn apply_adjoint(&self, h: &GeomTailSeq) -> Result<GeomTailSeq, OperatorError> {
        Ok(match self {
            OperatorExpr::Identity => h.clone(),
            OperatorExpr::ShiftPow { p } => h.shift_left(*p),
            OperatorExpr::Diagonal { d } => h.pointwise_diagonal(&d.conj())?,
            OperatorExpr::RankOne { f, g } => g.scale(h.inner_product(f)?),
            OperatorExpr::Scale { lambda, inner } => inner.apply_adjoint(h)?.scale(lambda.conj()),
            OperatorExpr::Sum { terms } => {
                let mut acc = GeomTailSeq::zero();
                for t in terms {
                    acc = acc.add(&t.apply_adjoint(h)?)?;
                }
                acc
            }
            OperatorExpr::Compose { left, right } => right.apply_adjoint(&left.apply_adjoint(h)?)?,
            OperatorExpr::Adjoint { inner } => inner.apply(h)?,
        })
    }

    /// Structural adjoint. `(f ⊗ g)* = g ⊗ f`, composition order reverses,
    /// and `adjoint(adjoint(op)) == op` for every expression.
    pub fn adjoint(&self) -> OperatorExpr {
        match self {
            OperatorExpr::Identity => OperatorExpr::Identity,
            OperatorExpr::ShiftPow { .. } => OperatorExpr::adjoint_of(self.clone()),
            OperatorExpr::Diagonal { d } => OperatorExpr::diagonal(d.conj()),
            OperatorExpr::RankOne { f, g } => OperatorExpr::rank_one(g.clone(), f.clone()),
            OperatorExpr::Scale { lambda, inner } => OperatorExpr::scaled(lambda.conj(), inner.adjoint()),
            OperatorExpr::Sum { terms } => OperatorExpr::sum(terms.iter().map(|t| t.adjoint()).collect()),
            OperatorExpr::Compose { left, right } => OperatorExpr::compose(right.adjoint(), left.adjoint()),
            OperatorExpr::Adjoint { inner } => (**inner).clone(),
        }
    }
}

/// `(f ⊗ g)(f₁ ⊗ g₁) = ⟨f₁, g⟩ f ⊗ g₁`: returns the scalar and the rank-one.
pub fn rank_one_compose(
    f: &GeomTailSeq,
    g: &GeomTailSeq,
    f1: &GeomTailSeq,
    g1: &GeomTailSeq,
) -> Result<(Complex, OperatorExpr), OperatorError> {
    Ok((f1.inner_product(g)?, OperatorExpr::rank_one(f.clone(), g1.clone())))
}

/// The two absorbed forms of `λ (f ⊗ g)`: `(λf) ⊗ g` and `f ⊗ (λ̄g)`.
pub fn rank_one_scale(lambda: Complex, f: &GeomTailSeq, g: &GeomTailSeq) -> (OperatorExpr, OperatorExpr) {
    (
        OperatorExpr::rank_one(f.scale(lambda), g.clone()),
        OperatorExpr::rank_one(f.clone(), g.scale(lambda.conj())),
    )
}

/// `T (f ⊗ g) = (Tf) ⊗ g`.
pub fn rank_one_absorb_left(
    t: &OperatorExpr,
    f: &GeomTailSeq,
    g: &GeomTailSeq,
) -> Result<OperatorExpr, OperatorError> {
    Ok(OperatorExpr::rank_one(t.apply(f)?, g.clone()))
}

/// `(f ⊗ g) T = f ⊗ (T* g)`.
pub fn rank_one_absorb_right(
    f: &GeomTailSeq,
    g: &GeomTailSeq,
    t: &OperatorExpr,
) -> Result<OperatorExpr, OperatorError> {
    Ok(OperatorExpr::rank_one(f.clone(), t.apply_adjoint(g)?))
}

/// `‖f ⊗ g‖ = ‖f‖ ‖g‖`.
pub fn rank_one_norm(f: &GeomTailSeq, g: &GeomTailSeq) -> Result<f64, OperatorError> {
    Ok((f.norm_sq()? * g.norm_sq()?).sqrt())
}

/// Probabilistic necessary condition for isometry: `‖op h‖ = ‖h‖` to
/// [`ISOMETRY_TOL`] on `probes` random unit vectors. A `true` result is not
/// a proof.
pub fn isometry_check(op: &OperatorExpr, probes: usize, seed: u64) -> Result<bool, OperatorError> {
    let mut rng = probe::rng(seed);
    for _ in 0..probes {
        let h = probe::random_unit_seq(&mut rng, ProbeShape::default());
        let image = op.apply(&h)?.norm_sq()?;
        if (image - 1.0).abs() > ISOMETRY_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

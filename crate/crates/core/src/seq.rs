//! Eventually-geometric complex sequences.
//!
//! A [`GeomTailSeq`] is a finite prefix followed by a finite sum of geometric
//! tails. This class is dense in ℓ² and closed under addition, scaling, both
//! shifts and multiplication by an eventually-geometric diagonal, so every
//! inner product, norm and series used by the diagnostics can be summed in
//! closed form instead of truncated.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Complex = Complex64;

/// Maximum number of distinct tail ratios a sequence may carry.
pub const DEFAULT_TAIL_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeqError {
    #[error("series diverges: tail ratio product has modulus {0} >= 1")]
    Divergent(f64),
    #[error("sequence is not square-summable")]
    NotSquareSummable,
    #[error("sequence carries {count} tails, cap is {cap}")]
    TailCapExceeded { count: usize, cap: usize },
    #[error("non-finite value in sequence")]
    NonFinite,
    #[error("point {0} is not inside the open unit disc")]
    OutOfDisc(Complex),
    #[error("diagonal symbol is unbounded (tail ratio modulus {0} > 1)")]
    Unbounded(f64),
    #[error("diagonal symbol has a zero entry")]
    ZeroEntry,
    #[error("{0}")]
    Invalid(String),
}

pub(crate) fn cpow(q: Complex, t: usize) -> Complex {
    match u32::try_from(t) {
        Ok(t) => q.powu(t),
        // only reachable for astronomically long offsets
        Err(_) if q.norm() < 1.0 => Complex::new(0.0, 0.0),
        Err(_) => q.powf(t as f64),
    }
}

fn is_finite(z: Complex) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// One geometric tail term: value `scale * ratio^t` at offset `t >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeomTail {
    pub scale: Complex,
    pub ratio: Complex,
}

impl GeomTail {
    pub fn new(scale: Complex, ratio: Complex) -> Self {
        Self { scale, ratio }
    }

    #[inline]
    pub fn at(&self, t: usize) -> Complex {
        self.scale * cpow(self.ratio, t)
    }

    /// The same tail viewed from `k` positions later.
    fn advanced(&self, k: usize) -> Self {
        Self {
            scale: self.at(k),
            ratio: self.ratio,
        }
    }
}

#[derive(Deserialize, Serialize)]
struct RawSeq {
    #[serde(default)]
    prefix: Vec<Complex>,
    #[serde(default)]
    tails: Vec<GeomTail>,
}

/// Complex sequence `prefix[0..L]` followed by `Σᵢ ρᵢ qᵢ^(n−L)` for `n ≥ L`.
///
/// Always held in canonical form: tails with equal ratios are merged and
/// zero-scale tails are dropped.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawSeq", into = "RawSeq")]
pub struct GeomTailSeq {
    prefix: Vec<Complex>,
    tails: Vec<GeomTail>,
}

impl TryFrom<RawSeq> for GeomTailSeq {
    type Error = SeqError;

    fn try_from(raw: RawSeq) -> Result<Self, SeqError> {
        GeomTailSeq::new(raw.prefix, raw.tails)
    }
}

impl From<GeomTailSeq> for RawSeq {
    fn from(v: GeomTailSeq) -> Self {
        RawSeq {
            prefix: v.prefix,
            tails: v.tails,
        }
    }
}

impl GeomTailSeq {
    pub fn new(prefix: Vec<Complex>, tails: Vec<GeomTail>) -> Result<Self, SeqError> {
        Self::with_cap(prefix, tails, DEFAULT_TAIL_CAP)
    }

    /// Build with an explicit tail cap instead of [`DEFAULT_TAIL_CAP`].
    pub fn with_cap(
        prefix: Vec<Complex>,
        tails: Vec<GeomTail>,
        cap: usize,
    ) -> Result<Self, SeqError> {
        let mut v = Self { prefix, tails };
        v.canonicalize(cap)?;
        Ok(v)
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// The standard basis vector `e_n`.
    pub fn basis(n: usize) -> Self {
        let mut prefix = vec![Complex::new(0.0, 0.0); n + 1];
        prefix[n] = Complex::new(1.0, 0.0);
        Self {
            prefix,
            tails: Vec::new(),
        }
    }

    pub fn from_prefix(prefix: Vec<Complex>) -> Result<Self, SeqError> {
        Self::new(prefix, Vec::new())
    }

    /// `scale * ratio^n` for every `n >= 0`.
    pub fn geometric(scale: Complex, ratio: Complex) -> Result<Self, SeqError> {
        Self::new(Vec::new(), vec![GeomTail::new(scale, ratio)])
    }

    /// Taylor coefficients of the Szegő kernel `(1 - z w̄)^{-1}`: `w̄ⁿ`.
    pub fn szego_kernel(w: Complex) -> Result<Self, SeqError> {
        if !is_finite(w) || w.norm() >= 1.0 {
            return Err(SeqError::OutOfDisc(w));
        }
        Self::geometric(Complex::new(1.0, 0.0), w.conj())
    }

    fn canonicalize(&mut self, cap: usize) -> Result<(), SeqError> {
        if !self.prefix.iter().copied().all(is_finite)
            || !self
                .tails
                .iter()
                .all(|t| is_finite(t.scale) && is_finite(t.ratio))
        {
            return Err(SeqError::NonFinite);
        }
        let mut merged: Vec<GeomTail> = Vec::with_capacity(self.tails.len());
        for t in self.tails.drain(..) {
            match merged.iter_mut().find(|m| m.ratio == t.ratio) {
                Some(m) => m.scale += t.scale,
                None => merged.push(t),
            }
        }
        merged.retain(|t| t.scale != Complex::new(0.0, 0.0));
        if merged.len() > cap {
            return Err(SeqError::TailCapExceeded {
                count: merged.len(),
                cap,
            });
        }
        self.tails = merged;
        Ok(())
    }

    pub fn prefix(&self) -> &[Complex] {
        &self.prefix
    }

    pub fn tails(&self) -> &[GeomTail] {
        &self.tails
    }

    /// Index at which the tails begin.
    pub fn start(&self) -> usize {
        self.prefix.len()
    }

    /// True iff every tail ratio lies strictly inside the unit disc.
    ///
    /// Sufficient for square-summability; cancellation between distinct
    /// ratios is not exploited.
    pub fn is_l2(&self) -> bool {
        self.tails.iter().all(|t| t.ratio.norm() < 1.0)
    }

    pub fn is_finitely_supported(&self) -> bool {
        self.tails.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.tails.is_empty() && self.prefix.iter().all(|z| *z == Complex::new(0.0, 0.0))
    }

    pub fn coordinate(&self, n: usize) -> Complex {
        match self.prefix.get(n) {
            Some(z) => *z,
            None => {
                let t = n - self.prefix.len();
                self.tails.iter().map(|tail| tail.at(t)).sum()
            }
        }
    }

    /// First `n` coordinates.
    pub fn head(&self, n: usize) -> Vec<Complex> {
        (0..n).map(|i| self.coordinate(i)).collect()
    }

    /// Same sequence with the prefix extended to `len` entries.
    pub(crate) fn rebased(&self, len: usize) -> Self {
        if len <= self.prefix.len() {
            return self.clone();
        }
        let k = len - self.prefix.len();
        let mut prefix = self.prefix.clone();
        prefix.extend((0..k).map(|t| self.tails.iter().map(|tail| tail.at(t)).sum::<Complex>()));
        Self {
            prefix,
            tails: self.tails.iter().map(|t| t.advanced(k)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeqError> {
        let len = self.start().max(other.start());
        let (a, b) = (self.rebased(len), other.rebased(len));
        let prefix = a.prefix.iter().zip(&b.prefix).map(|(x, y)| x + y).collect();
        let tails = a.tails.into_iter().chain(b.tails).collect();
        Self::new(prefix, tails)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeqError> {
        self.add(&other.scale(Complex::new(-1.0, 0.0)))
    }

    pub fn scale(&self, lambda: Complex) -> Self {
        let mut out = Self {
            prefix: self.prefix.iter().map(|z| z * lambda).collect(),
            tails: self
                .tails
                .iter()
                .map(|t| GeomTail::new(t.scale * lambda, t.ratio))
                .collect(),
        };
        // scaling never adds tails; only zero-scale removal can apply
        out.canonicalize(usize::MAX).expect("scaling preserves the cap");
        out
    }

    /// Coordinatewise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            prefix: self.prefix.iter().map(|z| z.conj()).collect(),
            tails: self
                .tails
                .iter()
                .map(|t| GeomTail::new(t.scale.conj(), t.ratio.conj()))
                .collect(),
        }
    }

    /// `Σₙ uₙ v̄ₙ` in closed form, for any pair whose tail ratio products
    /// stay inside the unit disc. Neither side needs to be in ℓ².
    pub fn pairing(&self, other: &Self) -> Result<Complex, SeqError> {
        let len = self.start().max(other.start());
        let (a, b) = (self.rebased(len), other.rebased(len));
        let mut acc: Complex = a
            .prefix
            .iter()
            .zip(&b.prefix)
            .map(|(x, y)| x * y.conj())
            .sum();
        for s in &a.tails {
            for t in &b.tails {
                let q = s.ratio * t.ratio.conj();
                if q.norm() >= 1.0 {
                    return Err(SeqError::Divergent(q.norm()));
                }
                acc += s.scale * t.scale.conj() / (Complex::new(1.0, 0.0) - q);
            }
        }
        Ok(acc)
    }

    /// ℓ² inner product, linear in the first argument.
    pub fn inner_product(&self, other: &Self) -> Result<Complex, SeqError> {
        if !self.is_l2() || !other.is_l2() {
            return Err(SeqError::NotSquareSummable);
        }
        self.pairing(other)
    }

    pub fn norm_sq(&self) -> Result<f64, SeqError> {
        Ok(self.inner_product(self)?.re.max(0.0))
    }

    pub fn norm(&self) -> Result<f64, SeqError> {
        Ok(self.norm_sq()?.sqrt())
    }

    /// ℓ² distance `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> Result<f64, SeqError> {
        self.sub(other)?.norm()
    }

    /// `(Sᵖ v)ₙ = v_{n−p}`, zero below `p`.
    pub fn shift_right(&self, p: usize) -> Self {
        let mut prefix = vec![Complex::new(0.0, 0.0); p];
        prefix.extend_from_slice(&self.prefix);
        Self {
            prefix,
            tails: self.tails.clone(),
        }
    }

    /// `(S*ᵖ v)ₙ = v_{n+p}`.
    pub fn shift_left(&self, p: usize) -> Self {
        if p <= self.prefix.len() {
            Self {
                prefix: self.prefix[p..].to_vec(),
                tails: self.tails.clone(),
            }
        } else {
            let k = p - self.prefix.len();
            let mut out = Self {
                prefix: Vec::new(),
                tails: self.tails.iter().map(|t| t.advanced(k)).collect(),
            };
            // a ratio-zero tail advanced past its only entry has scale zero
            out.canonicalize(usize::MAX).expect("shifting preserves the cap");
            out
        }
    }

    /// ℓ² mass at indices `>= n`, in closed form.
    pub fn tail_norm_sq(&self, n: usize) -> Result<f64, SeqError> {
        self.shift_left(n).norm_sq()
    }

    /// Coordinatewise product with a diagonal symbol, without a boundedness
    /// check; the result may leave ℓ².
    pub(crate) fn multiply_unchecked(&self, d: &DiagonalSymbol) -> Result<Self, SeqError> {
        let len = self.start().max(d.prefix.len());
        let v = self.rebased(len);
        let dr = d.rebased(len);
        let dt = dr.tail.as_geom();
        let prefix = v.prefix.iter().zip(&dr.prefix).map(|(x, a)| x * a).collect();
        let tails = v
            .tails
            .iter()
            .map(|t| GeomTail::new(t.scale * dt.scale, t.ratio * dt.ratio))
            .collect();
        Self::new(prefix, tails)
    }

    /// `(αₙ vₙ)ₙ` for a bounded diagonal symbol.
    pub fn pointwise_diagonal(&self, d: &DiagonalSymbol) -> Result<Self, SeqError> {
        d.check_bounded()?;
        self.multiply_unchecked(d)
    }

    /// `(vₙ / αₙ)ₙ`. Fails on zero diagonal entries; the result carries its
    /// own ℓ² flag.
    pub fn divide_by(&self, d: &DiagonalSymbol) -> Result<Self, SeqError> {
        self.multiply_unchecked(&d.reciprocal()?)
    }
}

/// Tail of a diagonal symbol: a single geometric term or a constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiagonalTail {
    Geometric(GeomTail),
    Constant(Complex),
}

impl DiagonalTail {
    pub fn as_geom(&self) -> GeomTail {
        match *self {
            DiagonalTail::Geometric(t) => t,
            DiagonalTail::Constant(c) => GeomTail::new(c, Complex::new(1.0, 0.0)),
        }
    }
}

#[derive(Deserialize, Serialize)]
struct RawDiagonal {
    #[serde(default)]
    prefix: Vec<Complex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<GeomTail>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    constant: Option<Complex>,
}

/// Diagonal entries `αₙ`: a finite prefix and one geometric or constant tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDiagonal", into = "RawDiagonal")]
pub struct DiagonalSymbol {
    prefix: Vec<Complex>,
    tail: DiagonalTail,
}

impl TryFrom<RawDiagonal> for DiagonalSymbol {
    type Error = SeqError;

    fn try_from(raw: RawDiagonal) -> Result<Self, SeqError> {
        let tail = match (raw.tail, raw.constant) {
            (Some(t), None) => DiagonalTail::Geometric(t),
            (None, Some(c)) => DiagonalTail::Constant(c),
            _ => {
                return Err(SeqError::Invalid(
                    "diagonal needs exactly one of `tail` or `constant`".into(),
                ))
            }
        };
        DiagonalSymbol::new(raw.prefix, tail)
    }
}

impl From<DiagonalSymbol> for RawDiagonal {
    fn from(d: DiagonalSymbol) -> Self {
        let (tail, constant) = match d.tail {
            DiagonalTail::Geometric(t) => (Some(t), None),
            DiagonalTail::Constant(c) => (None, Some(c)),
        };
        RawDiagonal {
            prefix: d.prefix,
            tail,
            constant,
        }
    }
}

impl DiagonalSymbol {
    pub fn new(prefix: Vec<Complex>, tail: DiagonalTail) -> Result<Self, SeqError> {
        let g = tail.as_geom();
        if !prefix.iter().copied().all(is_finite) || !is_finite(g.scale) || !is_finite(g.ratio) {
            return Err(SeqError::NonFinite);
        }
        Ok(Self { prefix, tail })
    }

    pub fn identity() -> Self {
        Self::constant(Complex::new(1.0, 0.0))
    }

    pub fn constant(c: Complex) -> Self {
        Self {
            prefix: Vec::new(),
            tail: DiagonalTail::Constant(c),
        }
    }

    /// `αₙ = scale * ratio^n`.
    pub fn geometric(scale: Complex, ratio: Complex) -> Result<Self, SeqError> {
        Self::new(Vec::new(), DiagonalTail::Geometric(GeomTail::new(scale, ratio)))
    }

    pub fn prefix(&self) -> &[Complex] {
        &self.prefix
    }

    pub fn tail(&self) -> DiagonalTail {
        self.tail
    }

    pub fn entry(&self, n: usize) -> Complex {
        match self.prefix.get(n) {
            Some(z) => *z,
            None => self.tail.as_geom().at(n - self.prefix.len()),
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.tail.as_geom().ratio.norm() <= 1.0
    }

    pub(crate) fn check_bounded(&self) -> Result<(), SeqError> {
        let r = self.tail.as_geom().ratio.norm();
        if r > 1.0 {
            Err(SeqError::Unbounded(r))
        } else {
            Ok(())
        }
    }

    /// True iff no entry is zero.
    pub fn all_nonzero(&self) -> bool {
        let g = self.tail.as_geom();
        let zero = Complex::new(0.0, 0.0);
        self.prefix.iter().all(|z| *z != zero) && g.scale != zero && g.ratio != zero
    }

    /// `infₙ |αₙ|`, exact on the representation.
    pub fn inf_modulus(&self) -> f64 {
        let g = self.tail.as_geom();
        // |ρ||q|^t decays to 0 inside the disc, otherwise it is smallest at t = 0
        let tail_inf = if g.ratio.norm() < 1.0 { 0.0 } else { g.scale.norm() };
        self.prefix
            .iter()
            .map(|z| z.norm())
            .fold(tail_inf, f64::min)
    }

    pub fn conj(&self) -> Self {
        let tail = match self.tail {
            DiagonalTail::Geometric(t) => {
                DiagonalTail::Geometric(GeomTail::new(t.scale.conj(), t.ratio.conj()))
            }
            DiagonalTail::Constant(c) => DiagonalTail::Constant(c.conj()),
        };
        Self {
            prefix: self.prefix.iter().map(|z| z.conj()).collect(),
            tail,
        }
    }

    /// Entrywise reciprocal `1/αₙ`; may be unbounded.
    pub fn reciprocal(&self) -> Result<Self, SeqError> {
        if !self.all_nonzero() {
            return Err(SeqError::ZeroEntry);
        }
        let one = Complex::new(1.0, 0.0);
        let tail = match self.tail {
            DiagonalTail::Geometric(t) => {
                DiagonalTail::Geometric(GeomTail::new(one / t.scale, one / t.ratio))
            }
            DiagonalTail::Constant(c) => DiagonalTail::Constant(one / c),
        };
        Self::new(self.prefix.iter().map(|z| one / z).collect(), tail)
    }

    pub(crate) fn rebased(&self, len: usize) -> Self {
        if len <= self.prefix.len() {
            return self.clone();
        }
        let k = len - self.prefix.len();
        let mut prefix = self.prefix.clone();
        prefix.extend((0..k).map(|t| self.tail.as_geom().at(t)));
        let tail = match self.tail {
            DiagonalTail::Geometric(t) => DiagonalTail::Geometric(t.advanced(k)),
            c @ DiagonalTail::Constant(_) => c,
        };
        Self { prefix, tail }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    fn tail(scale: f64, ratio: f64) -> GeomTailSeq {
        GeomTailSeq::geometric(c(scale), c(ratio)).unwrap()
    }

    #[test]
    fn basis_addition() {
        let v = GeomTailSeq::basis(0).add(&GeomTailSeq::basis(1)).unwrap();
        assert_eq!(v.prefix(), &[c(1.0), c(1.0)]);
        assert!(v.tails().is_empty());
    }

    #[test]
    fn additive_inverse_is_zero() {
        let v = GeomTailSeq::new(vec![c(1.0), Complex::new(0.5, -2.0)], vec![GeomTail::new(c(3.0), c(0.25))])
            .unwrap();
        let z = v.add(&v.scale(c(-1.0))).unwrap();
        assert!(z.tails().is_empty());
        assert_eq!(z.norm_sq().unwrap(), 0.0);
    }

    #[test]
    fn two_tail_sum_matches_direct_evaluation() {
        let v = tail(1.0, 0.5).add(&tail(1.0, 1.0 / 3.0)).unwrap();
        assert_eq!(v.tails().len(), 2);
        for n in 0..20 {
            let want = 0.5f64.powi(n as i32) + (1.0f64 / 3.0).powi(n as i32);
            assert!((v.coordinate(n) - c(want)).norm() < 1e-15);
        }
    }

    #[test]
    fn equal_ratios_merge() {
        let v = tail(1.0, 0.5).add(&tail(2.0, 0.5)).unwrap();
        assert_eq!(v.tails(), &[GeomTail::new(c(3.0), c(0.5))]);
    }

    #[test]
    fn tail_cap_is_enforced() {
        let tails: Vec<_> = (0..5).map(|i| GeomTail::new(c(1.0), c(0.1 * i as f64 + 0.05))).collect();
        assert!(matches!(
            GeomTailSeq::with_cap(vec![], tails, 4),
            Err(SeqError::TailCapExceeded { count: 5, cap: 4 })
        ));
    }

    #[test]
    fn inner_products() {
        let e0 = GeomTailSeq::basis(0);
        assert_eq!(e0.inner_product(&e0).unwrap(), c(1.0));
        let h = tail(1.0, 0.5);
        // Σ (1/4)^n, frozen from the partial sums below
        let partial: f64 = (0..200).map(|n| 0.25f64.powi(n)).sum();
        assert!((h.inner_product(&h).unwrap().re - 4.0 / 3.0).abs() < 1e-15);
        assert!((partial - 4.0 / 3.0).abs() < 1e-15);
        assert!((h.norm_sq().unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(GeomTailSeq::zero().norm_sq().unwrap(), 0.0);
    }

    #[test]
    fn szego_kernel_norm_and_reproducing_property() {
        let w = Complex::new(0.3, -0.4);
        let k = GeomTailSeq::szego_kernel(w).unwrap();
        let want = 1.0 / (1.0 - w.norm_sqr());
        assert!((k.norm_sq().unwrap() - want).abs() < 1e-14);
        let partial: f64 = (0..400).map(|n| w.norm_sqr().powi(n)).sum();
        assert!((partial - want).abs() < 1e-14);

        // ⟨z², k_w⟩ = w²
        let half = GeomTailSeq::szego_kernel(c(0.5)).unwrap();
        for n in 0..10 {
            assert!((half.coordinate(n) - c(0.5f64.powi(n as i32))).norm() < 1e-16);
        }
        let z2 = GeomTailSeq::basis(2);
        assert!((z2.inner_product(&k).unwrap() - w * w).norm() < 1e-15);

        assert_eq!(GeomTailSeq::szego_kernel(c(0.0)).unwrap().coordinate(0), c(1.0));
        assert_eq!(GeomTailSeq::szego_kernel(c(0.0)).unwrap().coordinate(1), c(0.0));
        assert!(GeomTailSeq::szego_kernel(Complex::new(0.0, 0.999)).is_ok());
        assert!(matches!(
            GeomTailSeq::szego_kernel(Complex::new(0.0, 1.0)),
            Err(SeqError::OutOfDisc(_))
        ));
    }

    #[test]
    fn shifts() {
        assert_eq!(GeomTailSeq::basis(0).shift_right(1), GeomTailSeq::basis(1));
        let h = tail(1.0, 0.7);
        let s = h.shift_right(1);
        assert_eq!(s.prefix(), &[c(0.0)]);
        assert_eq!(s.tails(), h.tails());
        assert!(GeomTailSeq::basis(0).shift_left(1).is_zero());

        let w = Complex::new(0.5, 0.25);
        let k = GeomTailSeq::szego_kernel(w).unwrap();
        let lhs = k.shift_left(1);
        let rhs = k.scale(w.conj());
        assert!(lhs.distance(&rhs).unwrap() < 1e-15);
    }

    #[test]
    fn shift_left_past_ratio_zero_tail() {
        let v = GeomTailSeq::new(vec![c(1.0)], vec![GeomTail::new(c(2.0), c(0.0))]).unwrap();
        assert_eq!(v.coordinate(1), c(2.0));
        assert_eq!(v.coordinate(2), c(0.0));
        assert!(v.shift_left(3).is_zero());
    }

    #[test]
    fn coordinates() {
        let e2 = GeomTailSeq::basis(2);
        assert_eq!(e2.coordinate(2), c(1.0));
        assert_eq!(e2.coordinate(0), c(0.0));
        assert_eq!(e2.coordinate(50), c(0.0));
        assert!((tail(1.0, 0.5).coordinate(3) - c(0.125)).norm() < 1e-16);
    }

    #[test]
    fn pointwise_diagonal_action() {
        let v = GeomTailSeq::new(vec![c(2.0), c(-1.0)], vec![GeomTail::new(c(1.0), c(0.3))]).unwrap();
        assert_eq!(v.pointwise_diagonal(&DiagonalSymbol::identity()).unwrap(), v);

        let two_e3 = GeomTailSeq::basis(3).pointwise_diagonal(&DiagonalSymbol::constant(c(2.0))).unwrap();
        assert!(two_e3.distance(&GeomTailSeq::basis(3).scale(c(2.0))).unwrap() < 1e-16);

        let d = DiagonalSymbol::geometric(c(1.0), c(0.5)).unwrap();
        let w = tail(1.0, 1.0 / 3.0).pointwise_diagonal(&d).unwrap();
        assert_eq!(w.tails().len(), 1);
        assert!((w.tails()[0].ratio - c(1.0 / 6.0)).norm() < 1e-16);
        for n in 0..=20 {
            let want = (0.5f64).powi(n) * (1.0f64 / 3.0).powi(n);
            assert!((w.coordinate(n as usize) - c(want)).norm() < 1e-16);
        }

        let big = DiagonalSymbol::geometric(c(1.0), c(2.0)).unwrap();
        assert!(matches!(v.pointwise_diagonal(&big), Err(SeqError::Unbounded(_))));
    }

    #[test]
    fn divide_by_leaves_l2_when_diagonal_decays() {
        let d = DiagonalSymbol::geometric(c(1.0), c(0.5)).unwrap();
        let q = tail(1.0, 0.5).divide_by(&d).unwrap();
        assert!(!q.is_l2());
        assert_eq!(q.coordinate(7), c(1.0));
        let zero_d = DiagonalSymbol::new(vec![c(0.0)], DiagonalTail::Constant(c(1.0))).unwrap();
        assert_eq!(tail(1.0, 0.5).divide_by(&zero_d), Err(SeqError::ZeroEntry));
    }

    #[test]
    fn inf_modulus_on_representation() {
        assert_eq!(DiagonalSymbol::identity().inf_modulus(), 1.0);
        assert_eq!(DiagonalSymbol::geometric(c(1.0), c(0.5)).unwrap().inf_modulus(), 0.0);
        let d = DiagonalSymbol::new(
            vec![c(3.0), c(-0.25)],
            DiagonalTail::Geometric(GeomTail::new(c(2.0), Complex::new(0.0, 1.0))),
        )
        .unwrap();
        assert_eq!(d.inf_modulus(), 0.25);
    }

    #[test]
    fn divergent_pairing_is_reported() {
        let a = tail(1.0, 1.0);
        assert!(matches!(a.pairing(&a), Err(SeqError::Divergent(_))));
        assert_eq!(a.inner_product(&a), Err(SeqError::NotSquareSummable));
    }

    #[test]
    fn json_round_trip_and_schema() {
        let v = GeomTailSeq::new(vec![c(1.0), Complex::new(0.0, -1.0)], vec![GeomTail::new(c(0.5), c(0.25))])
            .unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(
            s,
            r#"{"prefix":[[1.0,0.0],[0.0,-1.0]],"tails":[{"scale":[0.5,0.0],"ratio":[0.25,0.0]}]}"#
        );
        let back: GeomTailSeq = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);

        let d: DiagonalSymbol = serde_json::from_str(r#"{"prefix":[[2,0]],"constant":[1,0]}"#).unwrap();
        assert_eq!(d.entry(0), c(2.0));
        assert_eq!(d.entry(9), c(1.0));
        assert!(serde_json::from_str::<DiagonalSymbol>(r#"{"prefix":[]}"#).is_err());
    }
}

//! Points of `Z = X × X*`, the coupling `c(x, x*) = ⟨x, x*⟩`, the natural
//! pairing of `Z` with itself, and the extended reals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};

/// A pair `(x, x*)` of primal and dual vectors of equal dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalDualPoint<S> {
    x: Vec<S>,
    xstar: Vec<S>,
}

impl<S: Scalar> PrimalDualPoint<S> {
    pub fn new(x: Vec<S>, xstar: Vec<S>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if x.len() != xstar.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: xstar.len(),
            });
        }
        Ok(Self { x, xstar })
    }

    /// One-dimensional point `(x, x*)`.
    pub fn scalar(x: S, xstar: S) -> Self {
        Self {
            x: vec![x],
            xstar: vec![xstar],
        }
    }

    /// Builds a point from the concatenation `[x..., xstar...]`.
    pub fn from_flat(coords: &[S]) -> Result<Self> {
        if coords.len() % 2 != 0 || coords.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: coords.len() + coords.len() % 2,
                found: coords.len(),
            });
        }
        let n = coords.len() / 2;
        Self::new(coords[..n].to_vec(), coords[n..].to_vec())
    }

    pub fn zero(n: usize) -> Self {
        Self {
            x: vec![S::zero(); n],
            xstar: vec![S::zero(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[S] {
        &self.x
    }

    pub fn xstar(&self) -> &[S] {
        &self.xstar
    }

    /// `[x..., xstar...]`.
    pub fn flat(&self) -> Vec<S> {
        self.x.iter().chain(&self.xstar).copied().collect()
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.xstar).all(|v| v.is_finite())
    }

    pub(crate) fn lex_cmp(&self, other: &Self) -> Ordering {
        crate::scalar::lex_cmp(&self.flat(), &other.flat())
    }

    pub fn to_f64(&self) -> PrimalDualPoint<f64> {
        PrimalDualPoint {
            x: self.x.iter().map(|v| v.as_f64()).collect(),
            xstar: self.xstar.iter().map(|v| v.as_f64()).collect(),
        }
    }
}

impl<S: Scalar> fmt::Display for PrimalDualPoint<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[S]| {
            v.iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        if self.dim() == 1 {
            write!(f, "({}, {})", self.x[0], self.xstar[0])
        } else {
            write!(f, "(({}), ({}))", join(&self.x), join(&self.xstar))
        }
    }
}

fn check_dims<S: Scalar>(z: &PrimalDualPoint<S>, w: &PrimalDualPoint<S>) -> Result<()> {
    if z.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: z.dim(),
            found: w.dim(),
        });
    }
    Ok(())
}

/// `c(z) = ⟨x, x*⟩`.
pub fn coupling<S: Scalar>(z: &PrimalDualPoint<S>) -> S {
    dot(&z.x, &z.xstar)
}

/// `z·w = ⟨x, w*⟩ + ⟨w, x*⟩`.
pub fn natural_pairing<S: Scalar>(z: &PrimalDualPoint<S>, w: &PrimalDualPoint<S>) -> Result<S> {
    check_dims(z, w)?;
    Ok(dot(&z.x, &w.xstar) + dot(&w.x, &z.xstar))
}

/// `⟨x − u, x* − u*⟩` for `z = (x, x*)`, `w = (u, u*)`.
pub fn monotone_gap<S: Scalar>(z: &PrimalDualPoint<S>, w: &PrimalDualPoint<S>) -> Result<S> {
    check_dims(z, w)?;
    Ok(z.x
        .iter()
        .zip(&w.x)
        .zip(z.xstar.iter().zip(&w.xstar))
        .map(|((&a, &b), (&p, &q))| (a - b) * (p - q))
        .sum())
}

/// A value in `ℝ ∪ {−∞, +∞}`.
///
/// Addition saturates toward the infinite operand; `+∞ + (−∞)` is an error
/// through [`ExtReal::try_add`] and a panic through `+`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal<S> {
    NegInf,
    Finite(S),
    PosInf,
}

impl<S: Scalar> ExtReal<S> {
    pub fn from_scalar(v: S) -> Self {
        if v.is_nan() {
            panic!("NaN cannot be an extended real");
        } else if v == S::infinity() {
            ExtReal::PosInf
        } else if v == S::neg_infinity() {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(v)
        }
    }

    pub fn zero() -> Self {
        ExtReal::Finite(S::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(&self) -> Option<S> {
        match *self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Maps to the scalar type with IEEE infinities.
    pub fn to_scalar(&self) -> S {
        match *self {
            ExtReal::NegInf => S::neg_infinity(),
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => S::infinity(),
        }
    }

    pub fn try_add(self, rhs: Self) -> Result<Self> {
        use ExtReal::*;
        match (self, rhs) {
            (PosInf, NegInf) | (NegInf, PosInf) => Err(Error::InfiniteCancellation),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
            (Finite(a), Finite(b)) => Ok(Finite(a + b)),
        }
    }

    pub fn add_scalar(self, v: S) -> Self {
        match self {
            ExtReal::Finite(a) => ExtReal::Finite(a + v),
            other => other,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Supremum of a collection; `−∞` when empty.
    pub fn sup<I: IntoIterator<Item = Self>>(it: I) -> Self {
        it.into_iter().fold(ExtReal::NegInf, ExtReal::max)
    }

    /// Infimum of a collection; `+∞` when empty.
    pub fn inf<I: IntoIterator<Item = Self>>(it: I) -> Self {
        it.into_iter().fold(ExtReal::PosInf, ExtReal::min)
    }

    /// `self ≤ v + eps`.
    pub fn le_within(self, v: S, eps: S) -> bool {
        match self {
            ExtReal::NegInf => true,
            ExtReal::Finite(a) => a <= v + eps,
            ExtReal::PosInf => false,
        }
    }

    /// `self ≥ v − eps`.
    pub fn ge_within(self, v: S, eps: S) -> bool {
        match self {
            ExtReal::NegInf => false,
            ExtReal::Finite(a) => a >= v - eps,
            ExtReal::PosInf => true,
        }
    }

    /// `|self − v| ≤ eps` (never true for infinities).
    pub fn eq_within(self, v: S, eps: S) -> bool {
        match self {
            ExtReal::Finite(a) => (a - v).abs() <= eps,
            _ => false,
        }
    }
}

impl<S: Scalar> PartialOrd for ExtReal<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use ExtReal::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Some(Ordering::Equal),
            (NegInf, _) | (_, PosInf) => Some(Ordering::Less),
            (_, NegInf) | (PosInf, _) => Some(Ordering::Greater),
            (Finite(a), Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl<S: Scalar> Add for ExtReal<S> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        self.try_add(rhs)
            .expect("+inf + -inf is undefined in extended-real arithmetic")
    }
}

impl<S: Scalar> Neg for ExtReal<S> {
    type Output = Self;

    fn neg(self) -> Self {
        match self {
            ExtReal::NegInf => ExtReal::PosInf,
            ExtReal::Finite(v) => ExtReal::Finite(-v),
            ExtReal::PosInf => ExtReal::NegInf,
        }
    }
}

impl<S: Scalar> Sub for ExtReal<S> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<S: Scalar> From<S> for ExtReal<S> {
    fn from(v: S) -> Self {
        ExtReal::from_scalar(v)
    }
}

impl<S: Scalar> fmt::Display for ExtReal<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => write!(f, "inf"),
        }
    }
}

/// Discretization tolerances for the level sets `[f = c]`, `[f < c]` and for
/// domain membership of sampled operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<S> {
    /// Half-width of the equality band `|f − c| ≤ eps_eq`.
    pub eps_eq: S,
    /// Margin for strict inequalities: `f < c` means `f < c − eps_strict`.
    pub eps_strict: S,
    /// Matching radius for primal points of finite graphs.
    pub delta_dom: S,
}

impl<S: Scalar> Tolerance<S> {
    pub fn new(eps_eq: S, eps_strict: S, delta_dom: S) -> Result<Self> {
        let pos = |v: S| v > S::zero() && v.is_finite();
        if !(pos(eps_eq) && pos(eps_strict) && pos(delta_dom)) {
            return Err(Error::InvalidTolerance(
                "all tolerances must be positive and finite".into(),
            ));
        }
        if eps_eq > eps_strict {
            return Err(Error::InvalidTolerance(format!(
                "eps_eq ({eps_eq}) must not exceed eps_strict ({eps_strict})"
            )));
        }
        Ok(Self {
            eps_eq,
            eps_strict,
            delta_dom,
        })
    }

    /// eps_eq = 1e-9, eps_strict = 1e-6, delta_dom = 1e-6.
    pub fn pinned() -> Self {
        Self {
            eps_eq: S::lit(1e-9),
            eps_strict: S::lit(1e-6),
            delta_dom: S::lit(1e-6),
        }
    }

    /// Same tolerances with the equality band widened by `factor`.
    pub fn widened(&self, factor: S) -> Self {
        Self {
            eps_eq: self.eps_eq * factor,
            ..*self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: &[f64], xs: &[f64]) -> PrimalDualPoint<f64> {
        PrimalDualPoint::new(x.to_vec(), xs.to_vec()).unwrap()
    }

    #[test]
    fn coupling_examples() {
        assert_eq!(coupling(&p(&[1.0, 2.0], &[3.0, 4.0])), 11.0);
        assert_eq!(coupling(&p(&[0.0, 0.0], &[5.0, -7.0])), 0.0);
        assert_eq!(coupling(&PrimalDualPoint::scalar(2.0, 1.0)), 2.0);
    }

    #[test]
    fn pairing_examples() {
        let z = p(&[1.0, 0.0], &[0.0, 1.0]);
        let w = p(&[0.0, 1.0], &[1.0, 0.0]);
        assert_eq!(natural_pairing(&z, &w).unwrap(), 2.0);
        let z = p(&[1.0, 2.0], &[3.0, 4.0]);
        assert_eq!(natural_pairing(&z, &z).unwrap(), 22.0);
        assert_eq!(
            natural_pairing(&z, &PrimalDualPoint::zero(2)).unwrap(),
            0.0
        );
        assert!(matches!(
            natural_pairing(&z, &PrimalDualPoint::zero(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn gap_examples() {
        let g = |a: (f64, f64), b: (f64, f64)| {
            monotone_gap(
                &PrimalDualPoint::scalar(a.0, a.1),
                &PrimalDualPoint::scalar(b.0, b.1),
            )
            .unwrap()
        };
        assert_eq!(g((2.0, 1.0), (1.0, 1.0)), 0.0);
        assert_eq!(g((0.0, 0.0), (1.0, -1.0)), -1.0);
        // skew map J(x1, x2) = (x2, -x1): the quadratic form vanishes
        let z = p(&[1.0, 0.0], &[0.0, 1.0]);
        let w = p(&[0.0, 1.0], &[-1.0, 0.0]);
        let direct = (1.0 - 0.0) * (0.0 - (-1.0)) + (0.0 - 1.0) * (1.0 - 0.0);
        assert_eq!(monotone_gap(&z, &w).unwrap(), direct);
        assert_eq!(direct, 0.0);
    }

    #[test]
    fn point_rejects_mismatch() {
        assert!(PrimalDualPoint::new(vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(PrimalDualPoint::<f64>::new(vec![], vec![]).is_err());
    }

    #[test]
    fn ext_real_conventions() {
        let e: Vec<ExtReal<f64>> = vec![];
        assert_eq!(ExtReal::sup(e.clone()), ExtReal::NegInf);
        assert_eq!(ExtReal::inf(e), ExtReal::PosInf);
        assert_eq!(
            ExtReal::Finite(1.0) + ExtReal::PosInf,
            ExtReal::<f64>::PosInf
        );
        assert_eq!(
            ExtReal::<f64>::PosInf.try_add(ExtReal::NegInf),
            Err(Error::InfiniteCancellation)
        );
        assert!(ExtReal::<f64>::NegInf < ExtReal::Finite(-1e300));
        assert!(ExtReal::Finite(1e300) < ExtReal::<f64>::PosInf);
    }

    #[test]
    #[should_panic]
    fn ext_real_add_traps_cancellation() {
        let _ = ExtReal::<f64>::PosInf + ExtReal::NegInf;
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(1e-9, 1e-6, 1e-6).is_ok());
        assert!(Tolerance::new(1e-5, 1e-6, 1e-6).is_err());
        assert!(Tolerance::new(0.0, 1e-6, 1e-6).is_err());
    }

    #[test]
    fn f32_coupling() {
        let z = PrimalDualPoint::<f32>::new(vec![1.0, 2.0], vec![3.0, 4.0]).unwrap();
        assert_eq!(coupling(&z), 11.0f32);
        assert_eq!(natural_pairing(&z, &z).unwrap(), 22.0f32);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn pt(n: usize) -> impl Strategy<Value = PrimalDualPoint<f64>> {
            (
                proptest::collection::vec(-1.0..1.0f64, n),
                proptest::collection::vec(-1.0..1.0f64, n),
            )
                .prop_map(|(x, xs)| PrimalDualPoint::new(x, xs).unwrap())
        }

        proptest! {
            #[test]
            fn gap_identity((z, w) in (1usize..4).prop_flat_map(|n| (pt(n), pt(n)))) {
                let lhs = monotone_gap(&z, &w).unwrap();
                let rhs = coupling(&z) + coupling(&w) - natural_pairing(&z, &w).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-12);
                prop_assert!((natural_pairing(&z, &z).unwrap() - 2.0 * coupling(&z)).abs() <= 1e-12);
                prop_assert_eq!(lhs, monotone_gap(&w, &z).unwrap());
            }

        }
    }
}

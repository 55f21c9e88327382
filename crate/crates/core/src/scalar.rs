//! Scalar abstraction shared by every numeric routine in the crate.

use num_traits::{Float, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Real scalar type: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance used by pivoting and rank decisions in dense kernels.
    #[inline]
    fn pivot_eps() -> Self {
        Self::epsilon() * Self::lit(1024.0)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

pub(crate) fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).map(|(&p, &q)| p * q).sum()
}

pub(crate) fn norm_inf<S: Scalar>(a: &[S]) -> S {
    a.iter().fold(S::zero(), |m, v| m.max(v.abs()))
}

pub(crate) fn dist_inf<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |m, (&p, &q)| m.max((p - q).abs()))
}

/// Lexicographic total order on vectors (via `f64::total_cmp`).
pub(crate) fn lex_cmp<S: Scalar>(a: &[S], b: &[S]) -> std::cmp::Ordering {
    for (p, q) in a.iter().zip(b) {
        let o = p.as_f64().total_cmp(&q.as_f64());
        if o.is_ne() {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

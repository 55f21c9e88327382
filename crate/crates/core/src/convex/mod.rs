//! Extended-real convex functions on `Z = X × X*` and their conjugates under
//! the natural pairing.

pub mod lp;

use crate::duality::{coupling, natural_pairing, ExtReal, PrimalDualPoint, Tolerance};
use crate::error::{Error, Result};
use crate::regions::{GridSpec, Region};
use crate::scalar::{dot, Scalar};

use lp::{LpOutcome, LpProblem};

/// `z ↦ z·slope + intercept`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePiece<S> {
    pub slope: PrimalDualPoint<S>,
    pub intercept: S,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexFn<S> {
    /// Pointwise max of affine pieces; `-inf` when there are none.
    MaxAffine(Vec<AffinePiece<S>>),
    /// Lower convex envelope of `(point, value)` pairs; `+inf` off the hull.
    Envelope(Vec<(PrimalDualPoint<S>, S)>),
    /// Explicit table; `+inf` at points not listed.
    GridTable(Vec<(PrimalDualPoint<S>, ExtReal<S>)>),
    /// `base + ι_{primal × dual}`.
    PlusIndicator {
        base: Box<ConvexFn<S>>,
        primal: Region<S>,
        dual: Region<S>,
    },
}

/// A conjugate value, flagged when it is only a lower bound of the true sup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugateValue<S> {
    pub value: ExtReal<S>,
    pub approximate: bool,
}

impl<S: Scalar> ConvexFn<S> {
    /// The Fitzpatrick pieces `z ↦ z·w − c(w)` of a graph.
    pub fn fitzpatrick_pieces(graph: &[PrimalDualPoint<S>]) -> Self {
        ConvexFn::MaxAffine(
            graph
                .iter()
                .map(|w| AffinePiece {
                    slope: w.clone(),
                    intercept: -coupling(w),
                })
                .collect(),
        )
    }

    /// Envelope of the coupling restricted to a graph.
    pub fn penot_envelope(graph: &[PrimalDualPoint<S>]) -> Self {
        ConvexFn::Envelope(graph.iter().map(|w| (w.clone(), coupling(w))).collect())
    }

    /// The constant `-inf`.
    pub fn minus_infinity() -> Self {
        ConvexFn::MaxAffine(Vec::new())
    }

    pub fn eval(&self, z: &PrimalDualPoint<S>) -> Result<ExtReal<S>> {
        match self {
            ConvexFn::MaxAffine(pieces) => max_affine_eval(pieces, z),
            ConvexFn::Envelope(points) => envelope_eval(points, z),
            ConvexFn::GridTable(entries) => {
                for (p, v) in entries {
                    if p.dim() != z.dim() {
                        return Err(Error::DimensionMismatch {
                            expected: p.dim(),
                            found: z.dim(),
                        });
                    }
                    if same_point(p, z) {
                        return Ok(*v);
                    }
                }
                Ok(ExtReal::PosInf)
            }
            ConvexFn::PlusIndicator { base, primal, dual } => {
                if primal.contains(z.x())? && dual.contains(z.xstar())? {
                    base.eval(z)
                } else {
                    Ok(ExtReal::PosInf)
                }
            }
        }
    }

    /// Whether values come from an exact representation (not a table or a
    /// brute-force search).
    pub fn is_exact(&self) -> bool {
        matches!(self, ConvexFn::MaxAffine(_) | ConvexFn::Envelope(_))
    }

    /// Exact conjugate for the polyhedral representations.
    pub fn conjugate(&self) -> Option<Self> {
        match self {
            ConvexFn::MaxAffine(pieces) => Some(ConvexFn::Envelope(
                pieces
                    .iter()
                    .map(|p| (p.slope.clone(), -p.intercept))
                    .collect(),
            )),
            ConvexFn::Envelope(points) => Some(ConvexFn::MaxAffine(
                points
                    .iter()
                    .map(|(p, v)| AffinePiece {
                        slope: p.clone(),
                        intercept: -*v,
                    })
                    .collect(),
            )),
            _ => None,
        }
    }
}

fn same_point<S: Scalar>(p: &PrimalDualPoint<S>, z: &PrimalDualPoint<S>) -> bool {
    p.x().iter().chain(p.xstar()).zip(z.x().iter().chain(z.xstar())).all(|(&a, &b)| {
        (a - b).abs() <= S::pivot_eps() * (S::one() + a.abs().max(b.abs()))
    })
}

pub fn max_affine_eval<S: Scalar>(
    pieces: &[AffinePiece<S>],
    z: &PrimalDualPoint<S>,
) -> Result<ExtReal<S>> {
    let mut best = ExtReal::NegInf;
    for p in pieces {
        let v = natural_pairing(z, &p.slope)? + p.intercept;
        best = best.max(ExtReal::from_scalar(v));
    }
    Ok(best)
}

/// `min Σλᵢvᵢ  s.t.  Σλᵢpᵢ = z, Σλᵢ = 1, λ ≥ 0`; `+inf` when infeasible.
pub fn envelope_eval<S: Scalar>(
    points: &[(PrimalDualPoint<S>, S)],
    z: &PrimalDualPoint<S>,
) -> Result<ExtReal<S>> {
    if points.is_empty() {
        return Ok(ExtReal::PosInf);
    }
    let coords = z.flat();
    let dim = coords.len();
    if let Some((p, _)) = points.iter().find(|(p, _)| 2 * p.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: z.dim(),
        });
    }
    let flats: Vec<Vec<S>> = points.iter().map(|(p, _)| p.flat()).collect();

    // cheap rejection against the coordinate bounding box of the points
    let slack = S::epsilon().sqrt();
    for (j, &c) in coords.iter().enumerate() {
        let (lo, hi) = flats
            .iter()
            .fold((S::infinity(), S::neg_infinity()), |(a, b), f| {
                (a.min(f[j]), b.max(f[j]))
            });
        let pad = slack * (S::one() + lo.abs().max(hi.abs()));
        if c < lo - pad || c > hi + pad {
            return Ok(ExtReal::PosInf);
        }
    }
    let k = points.len();
    let mut a: Vec<Vec<S>> = (0..dim)
        .map(|j| flats.iter().map(|f| f[j]).collect())
        .collect();
    a.push(vec![S::one(); k]);
    let mut b = coords;
    b.push(S::one());
    let objective = points.iter().map(|(_, v)| *v).collect();
    match LpProblem::new(objective, a, b)?.solve()? {
        LpOutcome::Optimal { value, .. } => Ok(ExtReal::Finite(value)),
        LpOutcome::Infeasible => Ok(ExtReal::PosInf),
        LpOutcome::Unbounded => Err(Error::LpNumerical("bounded envelope LP reported unbounded".into())),
    }
}

/// `f□(z) = sup{z·z' − f(z') : z' ∈ Z}`.
///
/// Exact for `MaxAffine` and `Envelope`; tables and indicator sums fall back to
/// a sup over finitely many points and are flagged approximate.
pub fn square_conjugate_eval<S: Scalar>(
    f: &ConvexFn<S>,
    z: &PrimalDualPoint<S>,
    search: &GridSpec<S>,
) -> Result<ConjugateValue<S>> {
    match f {
        ConvexFn::MaxAffine(_) | ConvexFn::Envelope(_) => Ok(ConjugateValue {
            value: f.conjugate().expect("polyhedral").eval(z)?,
            approximate: false,
        }),
        ConvexFn::GridTable(entries) => {
            let mut best = ExtReal::NegInf;
            for (p, v) in entries {
                let term = ExtReal::Finite(natural_pairing(z, p)?) - *v;
                best = best.max(term);
            }
            Ok(ConjugateValue {
                value: best,
                approximate: true,
            })
        }
        ConvexFn::PlusIndicator { base, primal, dual } => {
            let xs = primal.grid_sample(search);
            let clip = search.dual_box(dual.dim());
            let duals: Vec<Vec<S>> = match dual.intersect(&clip) {
                Some(r) => {
                    let g = GridSpec {
                        resolution: search.dual_resolution,
                        ..*search
                    };
                    r.grid_sample(&g)
                }
                None => search
                    .dual_points(dual.dim())
                    .into_iter()
                    .filter(|d| dual.contains(d).unwrap_or(false))
                    .collect(),
            };
            let mut best = ExtReal::NegInf;
            for x in &xs {
                for d in &duals {
                    let w = PrimalDualPoint::new(x.clone(), d.clone())?;
                    let fv = base.eval(&w)?;
                    best = best.max(ExtReal::Finite(natural_pairing(z, &w)?) - fv);
                }
            }
            Ok(ConjugateValue {
                value: best,
                approximate: true,
            })
        }
    }
}

/// `σ_C(x*)`.
pub fn support_eval<S: Scalar>(c: &Region<S>, xstar: &[S]) -> Result<ExtReal<S>> {
    c.support(xstar)
}

/// `x* ∈ ∂f(x)` via the Fenchel equality `f(x) + f*(x*) = ⟨x, x*⟩`.
pub fn fenchel_subdiff_test<S: Scalar>(
    fx: ExtReal<S>,
    fstar: ExtReal<S>,
    x: &[S],
    xstar: &[S],
    tol: &Tolerance<S>,
) -> Result<bool> {
    if x.len() != xstar.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: xstar.len(),
        });
    }
    match (fx.finite(), fstar.finite()) {
        (Some(a), Some(b)) => Ok((a + b - dot(x, xstar)).abs() <= tol.eps_eq),
        _ => Ok(false),
    }
}

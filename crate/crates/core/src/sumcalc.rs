//! Sums `A + N_C` and `A + B`, the conjugate `ρ□` of their infimal
//! convolution, and the check that `ρ□` represents the sum.

use crate::classify::{Property, Verdict};
use crate::duality::{coupling, ExtReal, PrimalDualPoint, Tolerance};
use crate::error::{Error, Result};
use crate::fitzpatrick::{psi_envelope, PsiEnvelope};
use crate::operators::{is_monotone, OperatorHandle};
use crate::regions::{primal_dual_grid, GridSpec, Region};
use crate::scalar::{lex_cmp, Scalar};

/// The second summand.
#[derive(Debug, Clone, PartialEq)]
pub enum SumPartner<S> {
    /// `N_C` of a closed box, with exact second term `ι_C(x) + σ_C(·)`.
    NormalCone(Region<S>),
    /// A general operator, second term `ψ_{B|V}` from its sampled graph.
    Operator(OperatorHandle<S>),
}

impl<S: Scalar> SumPartner<S> {
    pub fn describe(&self) -> String {
        match self {
            SumPartner::NormalCone(c) => format!("N {c}"),
            SumPartner::Operator(b) => b.to_string(),
        }
    }
}

/// `A + N_C`, gated on some sampled point of `D(A)` lying in `int C`.
pub fn add_normal_cone<S: Scalar>(
    a: &OperatorHandle<S>,
    c: &Region<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
) -> Result<OperatorHandle<S>> {
    if c.as_box().is_none() || !c.is_closed() || c.is_empty() {
        return Err(Error::MalformedOperator("normal cone summand needs a closed box".into()));
    }
    if a.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: c.dim(),
        });
    }
    let mut hints = a.primal_hints(g);
    hints.extend(c.grid_sample(g));
    let mut meets = false;
    for x in &hints {
        if c.interior_contains(x)? && a.domain_contains(x, tol)? {
            meets = true;
            break;
        }
    }
    if !meets {
        return Err(Error::UnsatisfiedHypothesis(format!(
            "D(A) does not meet the interior of {c}"
        )));
    }
    Ok(OperatorHandle::sum_normal_cone(a.clone(), c.clone(), false))
}

/// `A + B`; flagged empty when no sampled primal lies in both domains.
pub fn operator_sum<S: Scalar>(
    a: &OperatorHandle<S>,
    b: &OperatorHandle<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
) -> Result<OperatorHandle<S>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let mut hints = a.primal_hints(g);
    hints.extend(b.primal_hints(g));
    let mut matched = false;
    for x in &hints {
        if a.domain_contains(x, tol)? && b.domain_contains(x, tol)? {
            matched = true;
            break;
        }
    }
    Ok(OperatorHandle::pair_sum(a.clone(), b.clone(), !matched))
}

/// `ρ□(z)` with the split `u*` attaining the minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoValue<S> {
    pub value: ExtReal<S>,
    pub split: Option<Vec<S>>,
    pub approximate: bool,
}

/// `ρ□(x, x*) = min over u* of ψ_{A|V}(x, u*) + second(x, x* − u*)`, with
/// the envelopes built once.
pub struct RhoEvaluator<S> {
    psi_a: PsiEnvelope<S>,
    partner: Partner<S>,
    a_duals: Vec<Vec<S>>,
    dual_grid: Vec<Vec<S>>,
}

enum Partner<S> {
    Cone(Region<S>),
    Sampled {
        psi_b: PsiEnvelope<S>,
        b_duals: Vec<Vec<S>>,
    },
}

impl<S: Scalar> RhoEvaluator<S> {
    pub fn new(
        a: &OperatorHandle<S>,
        partner: &SumPartner<S>,
        v: &Region<S>,
        g: &GridSpec<S>,
        tol: &Tolerance<S>,
    ) -> Result<Self> {
        let psi_a = psi_envelope(a, v, g, tol)?;
        let a_duals = distinct_duals(&a.enumerate_graph(g, v, tol)?.points);
        let partner = match partner {
            SumPartner::NormalCone(c) => Partner::Cone(c.clone()),
            SumPartner::Operator(b) => Partner::Sampled {
                psi_b: psi_envelope(b, v, g, tol)?,
                b_duals: distinct_duals(&b.enumerate_graph(g, v, tol)?.points),
            },
        };
        Ok(Self {
            psi_a,
            partner,
            a_duals,
            dual_grid: g.dual_points(a.dim()),
        })
    }

    /// Candidate splits: the dual grid, the duals of `A|_V`, `x*` itself,
    /// and `x* − b*` for duals `b*` of the partner's graph.
    fn candidates(&self, xs: &[S]) -> Vec<Vec<S>> {
        let mut c = self.dual_grid.clone();
        c.extend(self.a_duals.iter().cloned());
        c.push(xs.to_vec());
        if let Partner::Sampled { b_duals, .. } = &self.partner {
            c.extend(
                b_duals
                    .iter()
                    .map(|b| xs.iter().zip(b).map(|(&s, &t)| s - t).collect()),
            );
        }
        c.sort_by(|p, q| lex_cmp(p, q));
        c.dedup();
        c
    }

    pub fn eval(&self, z: &PrimalDualPoint<S>) -> Result<RhoValue<S>> {
        let candidates = self.candidates(z.xstar());
        self.eval_over(z, &candidates)
    }

    /// The same minimum over an explicit list of splits.
    pub fn eval_over(&self, z: &PrimalDualPoint<S>, splits: &[Vec<S>]) -> Result<RhoValue<S>> {
        let x = z.x();
        let mut approximate = !self.psi_a.exact;
        if let Partner::Cone(c) = &self.partner {
            if !c.contains(x)? {
                return Ok(RhoValue {
                    value: ExtReal::PosInf,
                    split: None,
                    approximate,
                });
            }
        }
        let mut best = ExtReal::PosInf;
        let mut split = None;
        for u in splits {
            let first = self.psi_a.eval(&PrimalDualPoint::new(x.to_vec(), u.clone())?)?.value;
            if first == ExtReal::PosInf {
                continue;
            }
            let rest: Vec<S> = z.xstar().iter().zip(u).map(|(&s, &t)| s - t).collect();
            let second = match &self.partner {
                Partner::Cone(c) => c.support(&rest)?,
                Partner::Sampled { psi_b, .. } => {
                    approximate |= !psi_b.exact;
                    psi_b.eval(&PrimalDualPoint::new(x.to_vec(), rest)?)?.value
                }
            };
            let total = first.try_add(second)?;
            if total < best {
                best = total;
                split = Some(u.clone());
            }
        }
        Ok(RhoValue {
            value: best,
            split,
            approximate,
        })
    }
}

fn distinct_duals<S: Scalar>(pts: &[PrimalDualPoint<S>]) -> Vec<Vec<S>> {
    let mut d: Vec<Vec<S>> = pts.iter().map(|p| p.xstar().to_vec()).collect();
    d.sort_by(|p, q| lex_cmp(p, q));
    d.dedup();
    d
}

pub fn rho_square_eval<S: Scalar>(
    a: &OperatorHandle<S>,
    partner: &SumPartner<S>,
    v: &Region<S>,
    z: &PrimalDualPoint<S>,
    g: &GridSpec<S>,
    _tol: &Tolerance<S>,
) -> Result<RhoValue<S>> {
    RhoEvaluator::new(a, partner, v, g, _tol)?.eval(z)
}

/// Checks on `V × [-B, B]ⁿ` that `ρ□` represents the sum: (a) `ρ□ ≥ c −
/// eps_eq`; (b) the band `|ρ□ − c| ≤ eps_eq` lies in the sum's graph; (c)
/// sampled graph points of the sum satisfy `|ρ□ − c| ≤ 10·eps_eq`.
pub fn verify_sum_representative<S: Scalar>(
    a: &OperatorHandle<S>,
    partner: &SumPartner<S>,
    v: &Region<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
) -> Result<Verdict<S>> {
    if !is_monotone(a, g, tol)?.value {
        return Err(Error::UnsatisfiedHypothesis("first summand is not monotone".into()));
    }
    let sum = match partner {
        SumPartner::NormalCone(c) => add_normal_cone(a, c, g, tol)?,
        SumPartner::Operator(b) => {
            if !is_monotone(b, g, tol)?.value {
                return Err(Error::UnsatisfiedHypothesis("second summand is not monotone".into()));
            }
            let s = operator_sum(a, b, g, tol)?;
            if s.is_empty() {
                return Err(Error::UnsatisfiedHypothesis("summands have disjoint domains".into()));
            }
            s
        }
    };
    let rho = RhoEvaluator::new(a, partner, v, g, tol)?;
    let mut verdict = Verdict::new(
        Property::VRepresentable,
        g,
        tol,
        vec![v.to_string(), partner.describe()],
    );
    let mut notes = Vec::new();
    for z in primal_dual_grid(v, g) {
        let r = rho.eval(&z)?;
        verdict.approximate |= r.approximate;
        let c = coupling(&z);
        if r.value < ExtReal::Finite(c - tol.eps_eq) {
            notes.push((z, format!("(a) rho={} c={c}", r.value)));
        } else if r.value.eq_within(c, tol.eps_eq) && !sum.graph_contains(&z, tol)? {
            notes.push((z, format!("(b) rho={} c={c}", r.value)));
        }
    }
    let clip = g.dual_box(a.dim());
    let band = tol.eps_eq * S::lit(10.0);
    for w in sum.enumerate_graph(g, v, tol)?.points {
        if !clip.contains(w.xstar())? {
            continue;
        }
        let r = rho.eval(&w)?;
        if !r.value.eq_within(coupling(&w), band) {
            let c = coupling(&w);
            notes.push((w, format!("(c) rho={} c={c}", r.value)));
        }
    }
    verdict.approximate = true;
    notes.sort_by(|a, b| a.0.lex_cmp(&b.0));
    verdict.detail = notes.first().map(|(z, d)| format!("at {z}: {d}"));
    verdict.witnesses = notes.into_iter().map(|(z, _)| z).collect();
    Ok(verdict.settle())
}

//! The Fitzpatrick function `φ_{T|V}`, the Penot envelope `ψ_{T|V}`, and
//! the representative test.

use crate::convex::ConvexFn;
use crate::duality::{coupling, ExtReal, PrimalDualPoint, Tolerance};
use crate::error::{Error, Result};
use crate::operators::{phi_over, GraphSample, OperatorHandle, PhiValue};
use crate::regions::{primal_dual_grid, GridSpec, Region};
use crate::scalar::Scalar;

/// `φ_{T|V}` prepared for repeated evaluation: closed form when the kind
/// has one on `V`, otherwise a sup over a graph sample taken once.
pub struct PhiEvaluator<'a, S> {
    op: &'a OperatorHandle<S>,
    region: Region<S>,
    grid: GridSpec<S>,
    tol: Tolerance<S>,
    sample: Option<GraphSample<S>>,
}

impl<'a, S: Scalar> PhiEvaluator<'a, S> {
    pub fn new(
        op: &'a OperatorHandle<S>,
        region: &Region<S>,
        grid: &GridSpec<S>,
        tol: &Tolerance<S>,
    ) -> Result<Self> {
        let sample = if op.phi_is_exact(region) {
            None
        } else {
            Some(op.enumerate_graph(grid, region, tol)?)
        };
        Ok(Self {
            op,
            region: region.clone(),
            grid: *grid,
            tol: *tol,
            sample,
        })
    }

    pub fn eval(&self, z: &PrimalDualPoint<S>) -> Result<PhiValue<S>> {
        match &self.sample {
            Some(s) => phi_over(s, z),
            None => self.op.phi(z, &self.region, &self.grid, &self.tol),
        }
    }
}

pub fn phi_eval<S: Scalar>(
    t: &OperatorHandle<S>,
    v: &Region<S>,
    z: &PrimalDualPoint<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
) -> Result<PhiValue<S>> {
    t.phi(z, v, g, tol)
}

/// `ψ_{T|V}` as an envelope over the enumerated graph of `T|_V`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiEnvelope<S> {
    pub function: ConvexFn<S>,
    /// True when built from the whole graph.
    pub exact: bool,
}

impl<S: Scalar> PsiEnvelope<S> {
    pub fn eval(&self, z: &PrimalDualPoint<S>) -> Result<PhiValue<S>> {
        Ok(PhiValue {
            value: self.function.eval(z)?,
            approximate: !self.exact,
        })
    }
}

pub fn psi_envelope<S: Scalar>(
    t: &OperatorHandle<S>,
    v: &Region<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
) -> Result<PsiEnvelope<S>> {
    let sample = t.enumerate_graph(g, v, tol)?;
    Ok(PsiEnvelope {
        function: ConvexFn::penot_envelope(&sample.points),
        exact: sample.exact,
    })
}

pub fn psi_eval<S: Scalar>(
    t: &OperatorHandle<S>,
    v: &Region<S>,
    z: &PrimalDualPoint<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
) -> Result<PhiValue<S>> {
    psi_envelope(t, v, g, tol)?.eval(z)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepresentativeReport<S> {
    pub is_representative: bool,
    pub mismatch_witnesses: Vec<PrimalDualPoint<S>>,
    pub tolerances: Tolerance<S>,
    pub grid: GridSpec<S>,
    pub approximate: bool,
}

/// Checks on the grid of `V × [-B, B]ⁿ` that the band `|h − c| ≤ eps_eq`
/// is exactly the graph of `T|_V`. Fails with `NotRepresentativeClass` if
/// `h < c − eps_strict` anywhere on the grid.
pub fn is_representative<S: Scalar>(
    h: &ConvexFn<S>,
    t: &OperatorHandle<S>,
    v: &Region<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
) -> Result<RepresentativeReport<S>> {
    let mut witnesses = Vec::new();
    for z in primal_dual_grid(v, g) {
        let hz = h.eval(&z)?;
        let c = coupling(&z);
        if hz < ExtReal::Finite(c - tol.eps_strict) {
            return Err(Error::NotRepresentativeClass {
                witness: z.to_string(),
            });
        }
        if hz.eq_within(c, tol.eps_eq) && !t.graph_contains(&z, tol)? {
            witnesses.push(z);
        }
    }
    let sample = t.enumerate_graph(g, v, tol)?;
    for w in &sample.points {
        if !h.eval(w)?.eq_within(coupling(w), tol.eps_eq) {
            witnesses.push(w.clone());
        }
    }
    witnesses.sort_by(|a, b| a.lex_cmp(b));
    witnesses.dedup();
    Ok(RepresentativeReport {
        is_representative: witnesses.is_empty(),
        mismatch_witnesses: witnesses,
        tolerances: *tol,
        grid: *g,
        approximate: !h.is_exact() || !sample.exact,
    })
}

//! Monotone operator representations `T: X ⇉ X*`.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::classify::{worst_pair, Property, Verdict};
use crate::duality::{coupling, monotone_gap, natural_pairing, ExtReal, PrimalDualPoint, Tolerance};
use crate::error::{Error, Result};
use crate::regions::{product, Bound, GridSpec, Interval, Region};
use crate::scalar::{dist_inf, dot, lex_cmp, Scalar};

/// One convex piece of a value set `Tx`.
#[derive(Debug, Clone, PartialEq)]
pub enum DualPiece<S> {
    /// Product of closed intervals; endpoints may be infinite.
    Box(Vec<(S, S)>),
    /// All of `X*` except one point.
    Punctured(Vec<S>),
}

impl<S: Scalar> DualPiece<S> {
    pub fn point(p: &[S]) -> Self {
        DualPiece::Box(p.iter().map(|&v| (v, v)).collect())
    }

    fn as_point(&self) -> Option<Vec<S>> {
        match self {
            DualPiece::Box(axes) if axes.iter().all(|(a, b)| a == b) => {
                Some(axes.iter().map(|(a, _)| *a).collect())
            }
            _ => None,
        }
    }

    pub fn contains(&self, s: &[S], radius: S) -> bool {
        match self {
            DualPiece::Box(axes) => axes
                .iter()
                .zip(s)
                .all(|(&(a, b), &v)| v >= a - radius && v <= b + radius),
            DualPiece::Punctured(p) => p.iter().zip(s).any(|(a, b)| a != b),
        }
    }

    fn minkowski(&self, other: &Self) -> Self {
        match (self, other) {
            (DualPiece::Box(a), DualPiece::Box(b)) => DualPiece::Box(
                a.iter()
                    .zip(b)
                    .map(|(&(p, q), &(r, s))| (p + r, q + s))
                    .collect(),
            ),
            (DualPiece::Punctured(p), other) | (other, DualPiece::Punctured(p)) => {
                match other.as_point() {
                    Some(q) => DualPiece::Punctured(p.iter().zip(&q).map(|(&a, &b)| a + b).collect()),
                    None => {
                        let inf = S::infinity();
                        DualPiece::Box(vec![(-inf, inf); p.len()])
                    }
                }
            }
        }
    }

    /// Lattice points of the piece inside the dual clip box. Interval
    /// endpoints are always included, capped at the clip bound.
    fn sample(&self, g: &GridSpec<S>) -> Vec<Vec<S>> {
        let axis = g.dual_axis();
        let bound = g.dual_bound;
        match self {
            DualPiece::Box(axes) => {
                let per_axis: Vec<Vec<S>> = axes
                    .iter()
                    .map(|&(a, b)| {
                        if a == b {
                            return vec![a];
                        }
                        let lo = if a.is_finite() { a.max(-bound) } else { -bound };
                        let hi = if b.is_finite() { b.min(bound) } else { bound };
                        if lo > hi {
                            // entirely outside the clip box: keep the nearest endpoint
                            return vec![if a > bound { a } else { b }];
                        }
                        let mut v: Vec<S> = axis
                            .iter()
                            .copied()
                            .filter(|&t| t >= lo && t <= hi)
                            .collect();
                        v.push(lo);
                        v.push(hi);
                        v.sort_by(|p, q| p.partial_cmp(q).expect("finite"));
                        v.dedup();
                        v
                    })
                    .collect();
                product(&per_axis)
            }
            DualPiece::Punctured(p) => g
                .dual_points(p.len())
                .into_iter()
                .filter(|s| s != p)
                .collect(),
        }
    }
}

/// `Tx` as a union of convex pieces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DualSet<S>(pub Vec<DualPiece<S>>);

impl<S: Scalar> DualSet<S> {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, s: &[S], radius: S) -> bool {
        self.0.iter().any(|p| p.contains(s, radius))
    }

    pub fn minkowski(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        for a in &self.0 {
            for b in &other.0 {
                let c = a.minkowski(b);
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
        DualSet(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorKind<S> {
    FiniteGraph(Vec<PrimalDualPoint<S>>),
    /// `region × {wstar}`.
    Flat { region: Region<S>, wstar: Vec<S> },
    /// Normal cone of a closed box.
    NormalConeBox { cbox: Region<S> },
    /// Subdifferential of `scale·|·|` on the real line.
    AbsSubdiff { scale: S },
    /// `{x0} × (X* ∖ {0})`.
    PointComplement { x0: Vec<S> },
    /// `x ↦ Mx`.
    Linear { matrix: Vec<Vec<S>> },
    Restriction {
        base: Box<OperatorHandle<S>>,
        region: Region<S>,
    },
    /// `base + N_C`.
    SumNormalCone {
        base: Box<OperatorHandle<S>>,
        cbox: Region<S>,
    },
    PairSum {
        a: Box<OperatorHandle<S>>,
        b: Box<OperatorHandle<S>>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorHandle<S> {
    kind: OperatorKind<S>,
    dim: usize,
    empty: bool,
}

/// A finite sample of a graph; `exact` when it is the whole graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSample<S> {
    pub points: Vec<PrimalDualPoint<S>>,
    pub exact: bool,
}

/// `φ_{T|W}(z)`; approximate when computed from a sampled graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiValue<S> {
    pub value: ExtReal<S>,
    pub approximate: bool,
}

impl<S: Scalar> PhiValue<S> {
    fn exact(value: ExtReal<S>) -> Self {
        Self {
            value,
            approximate: false,
        }
    }
}

fn dim_check(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn sort_dedup<S: Scalar>(mut pts: Vec<Vec<S>>) -> Vec<Vec<S>> {
    pts.sort_by(|a, b| lex_cmp(a, b));
    pts.dedup();
    pts
}

impl<S: Scalar> OperatorHandle<S> {
    fn wrap(kind: OperatorKind<S>, dim: usize) -> Self {
        Self {
            kind,
            dim,
            empty: false,
        }
    }

    pub fn finite_graph(points: Vec<PrimalDualPoint<S>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::MalformedOperator("finite graph needs at least one point".into()));
        };
        let n = first.dim();
        if let Some(p) = points.iter().find(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.dim(),
            });
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::MalformedOperator("graph points must be finite".into()));
        }
        let mut pts = points;
        pts.sort_by(|a, b| a.lex_cmp(b));
        pts.dedup();
        Ok(Self::wrap(OperatorKind::FiniteGraph(pts), n))
    }

    /// The operator with empty graph in dimension `n`.
    pub fn empty_graph(n: usize) -> Self {
        Self {
            kind: OperatorKind::FiniteGraph(Vec::new()),
            dim: n,
            empty: true,
        }
    }

    pub fn flat(region: Region<S>, wstar: Vec<S>) -> Result<Self> {
        dim_check(region.dim(), wstar.len())?;
        let n = region.dim();
        let empty = region.is_empty();
        Ok(Self {
            kind: OperatorKind::Flat { region, wstar },
            dim: n,
            empty,
        })
    }

    pub fn normal_cone_box(cbox: Region<S>) -> Result<Self> {
        if cbox.as_box().is_none() || !cbox.is_closed() {
            return Err(Error::MalformedOperator(
                "normal_cone_box needs a closed box".into(),
            ));
        }
        if cbox.is_empty() {
            return Err(Error::MalformedOperator("normal_cone_box needs a nonempty box".into()));
        }
        let n = cbox.dim();
        Ok(Self::wrap(OperatorKind::NormalConeBox { cbox }, n))
    }

    pub fn abs_subdiff(scale: S) -> Result<Self> {
        if !(scale > S::zero() && scale.is_finite()) {
            return Err(Error::MalformedOperator("abs_subdiff scale must be positive".into()));
        }
        Ok(Self::wrap(OperatorKind::AbsSubdiff { scale }, 1))
    }

    pub fn point_complement(x0: Vec<S>) -> Result<Self> {
        if x0.is_empty() || x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::MalformedOperator("point_complement needs a finite point".into()));
        }
        let n = x0.len();
        Ok(Self::wrap(OperatorKind::PointComplement { x0 }, n))
    }

    /// Rejects matrices whose symmetric part has an eigenvalue below `-1e-9`.
    pub fn linear(matrix: Vec<Vec<S>>) -> Result<Self> {
        let n = matrix.len();
        if n == 0 || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::MalformedOperator("linear matrix must be square".into()));
        }
        if matrix.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::MalformedOperator("linear matrix must be finite".into()));
        }
        let m = to_dmatrix(&matrix);
        let sym = (&m + m.transpose()) * 0.5;
        let min_eigenvalue = sym.symmetric_eigenvalues().min();
        if min_eigenvalue < -1e-9 {
            return Err(Error::NonMonotoneLinear { min_eigenvalue });
        }
        Ok(Self::wrap(OperatorKind::Linear { matrix }, n))
    }

    pub(crate) fn sum_normal_cone(base: OperatorHandle<S>, cbox: Region<S>, empty: bool) -> Self {
        let dim = base.dim;
        Self {
            kind: OperatorKind::SumNormalCone {
                base: Box::new(base),
                cbox,
            },
            dim,
            empty,
        }
    }

    pub(crate) fn pair_sum(a: OperatorHandle<S>, b: OperatorHandle<S>, empty: bool) -> Self {
        let dim = a.dim;
        Self {
            kind: OperatorKind::PairSum {
                a: Box::new(a),
                b: Box::new(b),
            },
            dim,
            empty,
        }
    }

    pub fn kind(&self) -> &OperatorKind<S> {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Set when the graph is known to be empty (e.g. a restriction to a
    /// region missing the domain).
    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            OperatorKind::FiniteGraph(_) => "finite_graph",
            OperatorKind::Flat { .. } => "flat",
            OperatorKind::NormalConeBox { .. } => "normal_cone_box",
            OperatorKind::AbsSubdiff { .. } => "abs_subdiff",
            OperatorKind::PointComplement { .. } => "point_complement",
            OperatorKind::Linear { .. } => "linear",
            OperatorKind::Restriction { .. } => "restriction",
            OperatorKind::SumNormalCone { .. } => "sum_normal_cone",
            OperatorKind::PairSum { .. } => "pair_sum",
        }
    }

    /// Graph size for finite graphs.
    pub fn graph_len(&self) -> Option<usize> {
        match &self.kind {
            OperatorKind::FiniteGraph(p) => Some(p.len()),
            _ => None,
        }
    }

    /// Whether `enumerate_graph` returns the whole graph.
    pub fn enumeration_exact(&self) -> bool {
        match &self.kind {
            OperatorKind::FiniteGraph(_) => true,
            OperatorKind::Restriction { base, .. } => base.enumeration_exact(),
            OperatorKind::PairSum { a, b } => a.enumeration_exact() && b.enumeration_exact(),
            _ => false,
        }
    }

    /// Membership radius for dual values: finite-graph data is matched
    /// within `delta_dom`, analytic values within `eps_eq`.
    fn dual_radius(&self, tol: &Tolerance<S>) -> S {
        if self.has_finite_leaf() {
            tol.delta_dom.max(tol.eps_eq)
        } else {
            tol.eps_eq
        }
    }

    fn has_finite_leaf(&self) -> bool {
        match &self.kind {
            OperatorKind::FiniteGraph(_) => true,
            OperatorKind::Restriction { base, .. } | OperatorKind::SumNormalCone { base, .. } => {
                base.has_finite_leaf()
            }
            OperatorKind::PairSum { a, b } => a.has_finite_leaf() || b.has_finite_leaf(),
            _ => false,
        }
    }

    /// `Tx`.
    pub fn values_at(&self, x: &[S], tol: &Tolerance<S>) -> Result<DualSet<S>> {
        dim_check(self.dim, x.len())?;
        let pieces = match &self.kind {
            OperatorKind::FiniteGraph(pts) => pts
                .iter()
                .filter(|w| dist_inf(w.x(), x) <= tol.delta_dom)
                .map(|w| DualPiece::point(w.xstar()))
                .collect(),
            OperatorKind::Flat { region, wstar } => {
                if region.contains(x)? {
                    vec![DualPiece::point(wstar)]
                } else {
                    Vec::new()
                }
            }
            OperatorKind::NormalConeBox { cbox } => {
                cbox.box_normal_cone(x).map(DualPiece::Box).into_iter().collect()
            }
            OperatorKind::AbsSubdiff { scale } => {
                let a = *scale;
                let v = x[0];
                if v > S::zero() {
                    vec![DualPiece::point(&[a])]
                } else if v < S::zero() {
                    vec![DualPiece::point(&[-a])]
                } else {
                    vec![DualPiece::Box(vec![(-a, a)])]
                }
            }
            OperatorKind::PointComplement { x0 } => {
                if x == x0.as_slice() {
                    vec![DualPiece::Punctured(vec![S::zero(); self.dim])]
                } else {
                    Vec::new()
                }
            }
            OperatorKind::Linear { matrix } => {
                let mx: Vec<S> = matrix.iter().map(|row| dot(row, x)).collect();
                vec![DualPiece::point(&mx)]
            }
            OperatorKind::Restriction { base, region } => {
                if region.contains(x)? {
                    return base.values_at(x, tol);
                }
                Vec::new()
            }
            OperatorKind::SumNormalCone { base, cbox } => {
                let cone = DualSet(cbox.box_normal_cone(x).map(DualPiece::Box).into_iter().collect());
                return Ok(base.values_at(x, tol)?.minkowski(&cone));
            }
            OperatorKind::PairSum { a, b } => {
                return Ok(a.values_at(x, tol)?.minkowski(&b.values_at(x, tol)?));
            }
        };
        Ok(DualSet(pieces))
    }

    pub fn graph_contains(&self, z: &PrimalDualPoint<S>, tol: &Tolerance<S>) -> Result<bool> {
        dim_check(self.dim, z.dim())?;
        if let OperatorKind::FiniteGraph(pts) = &self.kind {
            let flat = z.flat();
            return Ok(pts
                .iter()
                .any(|w| dist_inf(&w.flat(), &flat) <= tol.delta_dom));
        }
        Ok(self
            .values_at(z.x(), tol)?
            .contains(z.xstar(), self.dual_radius(tol)))
    }

    /// `x ∈ D(T)`: exact for analytic kinds, within `delta_dom` for graphs.
    pub fn domain_contains(&self, x: &[S], tol: &Tolerance<S>) -> Result<bool> {
        Ok(!self.values_at(x, tol)?.is_empty())
    }

    /// `x` within `delta_dom` of the closure of `D(T)`.
    pub fn domain_closure_contains(&self, x: &[S], tol: &Tolerance<S>) -> Result<bool> {
        dim_check(self.dim, x.len())?;
        let near = |r: &Region<S>| -> Result<bool> { region_near(r, x, tol.delta_dom) };
        match &self.kind {
            OperatorKind::FiniteGraph(_) => self.domain_contains(x, tol),
            OperatorKind::Flat { region, .. } => near(region),
            OperatorKind::NormalConeBox { cbox } => near(cbox),
            OperatorKind::AbsSubdiff { .. } | OperatorKind::Linear { .. } => Ok(true),
            OperatorKind::PointComplement { x0 } => Ok(dist_inf(x0, x) <= tol.delta_dom),
            OperatorKind::Restriction { base, region } => {
                Ok(near(region)? && base.domain_closure_contains(x, tol)?)
            }
            OperatorKind::SumNormalCone { base, cbox } => {
                Ok(near(cbox)? && base.domain_closure_contains(x, tol)?)
            }
            OperatorKind::PairSum { a, b } => {
                Ok(a.domain_closure_contains(x, tol)? && b.domain_closure_contains(x, tol)?)
            }
        }
    }

    /// `V ∩ D(T) ≠ ∅`.
    pub fn domain_meets(&self, v: &Region<S>) -> bool {
        if self.empty || v.is_empty() {
            return false;
        }
        match &self.kind {
            OperatorKind::FiniteGraph(pts) => pts.iter().any(|w| v.contains(w.x()).unwrap_or(false)),
            OperatorKind::Flat { region, .. } => match region.intersect(v) {
                Some(r) => !r.is_empty(),
                None => self.sampled_domain_meets(v),
            },
            OperatorKind::NormalConeBox { cbox } => cbox.intersect(v).is_some_and(|r| !r.is_empty()),
            OperatorKind::AbsSubdiff { .. } | OperatorKind::Linear { .. } => true,
            OperatorKind::PointComplement { x0 } => v.contains(x0).unwrap_or(false),
            OperatorKind::Restriction { base, region } => match region.intersect(v) {
                Some(w) => base.domain_meets(&w),
                None => self.sampled_domain_meets(v),
            },
            OperatorKind::SumNormalCone { base, cbox } => match cbox.intersect(v) {
                Some(w) => base.domain_meets(&w),
                None => self.sampled_domain_meets(v),
            },
            OperatorKind::PairSum { .. } => self.sampled_domain_meets(v),
        }
    }

    fn sampled_domain_meets(&self, v: &Region<S>) -> bool {
        let g = GridSpec::pinned();
        let tol = Tolerance::pinned();
        self.enumerate_graph(&g, v, &tol)
            .map(|s| !s.points.is_empty())
            .unwrap_or(false)
    }

    /// Primal sample points on which the graph is enumerated.
    pub fn primal_hints(&self, g: &GridSpec<S>) -> Vec<Vec<S>> {
        let pts = match &self.kind {
            OperatorKind::FiniteGraph(pts) => pts.iter().map(|w| w.x().to_vec()).collect(),
            OperatorKind::Flat { region, .. } => region.grid_sample(g),
            OperatorKind::NormalConeBox { cbox } => cbox.grid_sample(g),
            OperatorKind::AbsSubdiff { .. } | OperatorKind::Linear { .. } => {
                Region::ambient(self.dim).grid_sample(g)
            }
            OperatorKind::PointComplement { x0 } => vec![x0.clone()],
            OperatorKind::Restriction { base, region } => {
                let mut v: Vec<Vec<S>> = base
                    .primal_hints(g)
                    .into_iter()
                    .filter(|x| region.contains(x).unwrap_or(false))
                    .collect();
                if !base.enumeration_exact() {
                    v.extend(region.grid_sample(g));
                }
                v
            }
            OperatorKind::SumNormalCone { base, cbox } => {
                let mut v: Vec<Vec<S>> = base
                    .primal_hints(g)
                    .into_iter()
                    .filter(|x| cbox.contains(x).unwrap_or(false))
                    .collect();
                v.extend(cbox.grid_sample(g));
                v
            }
            OperatorKind::PairSum { a, b } => {
                let mut v = a.primal_hints(g);
                v.extend(b.primal_hints(g));
                v
            }
        };
        sort_dedup(pts)
    }

    /// Graph points with primal in `within`: the whole graph for finite
    /// graphs, otherwise `Tx` sampled on the dual clip lattice at the primal
    /// hints (and at lattice points of `within`).
    pub fn enumerate_graph(
        &self,
        g: &GridSpec<S>,
        within: &Region<S>,
        tol: &Tolerance<S>,
    ) -> Result<GraphSample<S>> {
        dim_check(self.dim, within.dim())?;
        match &self.kind {
            OperatorKind::FiniteGraph(pts) => {
                let mut points = Vec::new();
                for w in pts {
                    if within.contains(w.x())? {
                        points.push(w.clone());
                    }
                }
                return Ok(GraphSample {
                    points,
                    exact: true,
                });
            }
            OperatorKind::Restriction { base, region } => {
                if let Some(w) = region.intersect(within) {
                    return base.enumerate_graph(g, &w, tol);
                }
                let mut s = base.enumerate_graph(g, within, tol)?;
                s.points.retain(|p| region.contains(p.x()).unwrap_or(false));
                return Ok(s);
            }
            _ => {}
        }
        let exact = self.enumeration_exact();
        let mut hints = self.primal_hints(g);
        if !exact && !within.is_ambient() {
            hints.extend(within.grid_sample(g));
            hints = sort_dedup(hints);
        }
        let mut points = Vec::new();
        for x in hints {
            if !within.contains(&x)? {
                continue;
            }
            for piece in &self.values_at(&x, tol)?.0 {
                for s in piece.sample(g) {
                    points.push(PrimalDualPoint::new(x.clone(), s)?);
                }
            }
        }
        points.sort_by(|a, b| a.lex_cmp(b));
        points.dedup();
        Ok(GraphSample { points, exact })
    }

    /// Sampled `R(T)`.
    pub fn range_sample(&self, g: &GridSpec<S>, tol: &Tolerance<S>) -> Result<Vec<Vec<S>>> {
        let s = self.enumerate_graph(g, &Region::ambient(self.dim), tol)?;
        Ok(sort_dedup(s.points.iter().map(|p| p.xstar().to_vec()).collect()))
    }

    /// Whether `phi` has a closed form (or exact finite sup) on `within`.
    pub fn phi_is_exact(&self, within: &Region<S>) -> bool {
        match &self.kind {
            OperatorKind::FiniteGraph(_) | OperatorKind::PointComplement { .. } => true,
            OperatorKind::Flat { region, .. } => region.intersect(within).is_some(),
            OperatorKind::NormalConeBox { cbox } => cbox.intersect(within).is_some(),
            OperatorKind::AbsSubdiff { .. } => within.as_box().is_some(),
            OperatorKind::Linear { .. } => within.is_ambient(),
            OperatorKind::Restriction { base, region } => match region.intersect(within) {
                Some(w) => base.phi_is_exact(&w),
                None => base.enumeration_exact(),
            },
            OperatorKind::SumNormalCone { .. } => false,
            OperatorKind::PairSum { .. } => self.enumeration_exact(),
        }
    }

    /// `φ_{T|W}(z) = sup{z·w − c(w) : w ∈ Graph T, w.x ∈ W}`.
    pub fn phi(
        &self,
        z: &PrimalDualPoint<S>,
        within: &Region<S>,
        g: &GridSpec<S>,
        tol: &Tolerance<S>,
    ) -> Result<PhiValue<S>> {
        dim_check(self.dim, z.dim())?;
        dim_check(self.dim, within.dim())?;
        if self.empty || within.is_empty() {
            return Ok(PhiValue::exact(ExtReal::NegInf));
        }
        let (x, xs) = (z.x(), z.xstar());
        match &self.kind {
            OperatorKind::FiniteGraph(pts) => {
                let mut best = ExtReal::NegInf;
                for w in pts {
                    if within.contains(w.x())? {
                        best = best.max(ExtReal::Finite(natural_pairing(z, w)? - coupling(w)));
                    }
                }
                Ok(PhiValue::exact(best))
            }
            OperatorKind::Flat { region, wstar } => match region.intersect(within) {
                Some(r) => {
                    let shifted: Vec<S> = xs.iter().zip(wstar).map(|(&a, &b)| a - b).collect();
                    let v = ExtReal::Finite(dot(x, wstar)) + r.support(&shifted)?;
                    Ok(PhiValue::exact(v))
                }
                None => self.sampled_phi(z, within, g, tol),
            },
            OperatorKind::NormalConeBox { cbox } => match cbox.intersect(within) {
                Some(Region::Box(axes)) => {
                    let c_axes = cbox.as_box().expect("normal cone of a box");
                    Ok(PhiValue::exact(normal_cone_phi(c_axes, &axes, x, xs)))
                }
                Some(_) => Ok(PhiValue::exact(ExtReal::NegInf)),
                None => self.sampled_phi(z, within, g, tol),
            },
            OperatorKind::AbsSubdiff { scale } => match within.as_box() {
                Some(axes) => Ok(PhiValue::exact(abs_phi(*scale, &axes[0], x[0], xs[0]))),
                None => self.sampled_phi(z, within, g, tol),
            },
            OperatorKind::PointComplement { x0 } => {
                let v = if !within.contains(x0)? {
                    ExtReal::NegInf
                } else if x == x0.as_slice() {
                    ExtReal::Finite(dot(x0, xs))
                } else {
                    ExtReal::PosInf
                };
                Ok(PhiValue::exact(v))
            }
            OperatorKind::Linear { matrix } => {
                if within.is_ambient() {
                    let v = match linear_gap_min(matrix, x, xs) {
                        Some(q) => ExtReal::Finite(coupling(z) - q),
                        None => ExtReal::PosInf,
                    };
                    Ok(PhiValue::exact(v))
                } else {
                    self.sampled_phi(z, within, g, tol)
                }
            }
            OperatorKind::Restriction { base, region } => match region.intersect(within) {
                Some(w) => base.phi(z, &w, g, tol),
                None => self.sampled_phi(z, within, g, tol),
            },
            OperatorKind::SumNormalCone { .. } | OperatorKind::PairSum { .. } => {
                self.sampled_phi(z, within, g, tol)
            }
        }
    }

    fn sampled_phi(
        &self,
        z: &PrimalDualPoint<S>,
        within: &Region<S>,
        g: &GridSpec<S>,
        tol: &Tolerance<S>,
    ) -> Result<PhiValue<S>> {
        let sample = self.enumerate_graph(g, within, tol)?;
        phi_over(&sample, z)
    }
}

/// `max{z·w − c(w)}` over a graph sample.
pub(crate) fn phi_over<S: Scalar>(
    sample: &GraphSample<S>,
    z: &PrimalDualPoint<S>,
) -> Result<PhiValue<S>> {
    let mut best = ExtReal::NegInf;
    for w in &sample.points {
        best = best.max(ExtReal::Finite(natural_pairing(z, w)? - coupling(w)));
    }
    Ok(PhiValue {
        value: best,
        approximate: !sample.exact,
    })
}

fn region_near<S: Scalar>(r: &Region<S>, x: &[S], delta: S) -> Result<bool> {
    if let Some(axes) = r.as_box() {
        let d = axes.iter().zip(x).fold(S::zero(), |m, (iv, &v)| {
            if iv.is_empty() {
                return S::infinity();
            }
            let below = iv.lo.value().map_or(S::zero(), |a| a - v);
            let above = iv.hi.value().map_or(S::zero(), |b| v - b);
            m.max(below).max(above)
        });
        return Ok(d <= delta);
    }
    r.closure().contains(x)
}

/// Per axis, `u ↦ u·x*ᵢ + sup{(xᵢ − u)·n : n ∈ N_{Cᵢ}(u)}` maximized over
/// `Iᵢ = Cᵢ ∩ Wᵢ`.
fn normal_cone_phi<S: Scalar>(
    c_axes: &[Interval<S>],
    i_axes: &[Interval<S>],
    x: &[S],
    xs: &[S],
) -> ExtReal<S> {
    if i_axes.iter().any(Interval::is_empty) {
        return ExtReal::NegInf;
    }
    let mut total = ExtReal::zero();
    for ((civ, iv), (&xi, &si)) in c_axes.iter().zip(i_axes).zip(x.iter().zip(xs)) {
        let blocked_lo = matches!(civ.lo, Bound::Closed(a) if iv.contains(a) && xi < a);
        let blocked_hi = matches!(civ.hi, Bound::Closed(b) if iv.contains(b) && xi > b);
        if blocked_lo || blocked_hi {
            return ExtReal::PosInf;
        }
        total = total + iv.support(si);
    }
    total
}

/// `φ` of `∂(a|·|)` restricted to the interval `w`.
fn abs_phi<S: Scalar>(a: S, w: &Interval<S>, x: S, xs: S) -> ExtReal<S> {
    let pos = w.intersect(&Interval {
        lo: Bound::Open(S::zero()),
        hi: Bound::Unbounded,
    });
    let neg = w.intersect(&Interval {
        lo: Bound::Unbounded,
        hi: Bound::Open(S::zero()),
    });
    let right = ExtReal::Finite(x * a) + pos.support(xs - a);
    let left = ExtReal::Finite(-x * a) + neg.support(xs + a);
    let origin = if w.contains(S::zero()) {
        ExtReal::Finite(a * x.abs())
    } else {
        ExtReal::NegInf
    };
    right.max(left).max(origin)
}

fn to_dmatrix<S: Scalar>(m: &[Vec<S>]) -> DMatrix<f64> {
    let n = m.len();
    DMatrix::from_fn(n, n, |i, j| m[i][j].as_f64())
}

/// `inf_u ⟨x − u, x* − Mu⟩`, or `None` when unbounded below. The quadratic is
/// convex; its stationary points solve `(M + Mᵀ)u = Mᵀx + x*`.
fn linear_gap_min<S: Scalar>(matrix: &[Vec<S>], x: &[S], xs: &[S]) -> Option<S> {
    let m = to_dmatrix(matrix);
    let xv = DVector::from_iterator(x.len(), x.iter().map(|v| v.as_f64()));
    let sv = DVector::from_iterator(xs.len(), xs.iter().map(|v| v.as_f64()));
    let h = &m + m.transpose();
    let rhs = m.transpose() * &xv + &sv;
    let scale = h.amax().max(1.0);
    let u = h.clone().svd(true, true).solve(&rhs, 1e-12 * scale).ok()?;
    if (&h * &u - &rhs).amax() > 1e-9 * (1.0 + rhs.amax()) {
        return None;
    }
    let gap = (&xv - &u).dot(&(&sv - &m * &u));
    Some(S::lit(gap))
}

/// `T|_V`. Finite graphs are filtered eagerly; a normal cone restricted to a
/// box inside the interior of `C` becomes the flat operator with value zero.
pub fn restrict<S: Scalar>(t: &OperatorHandle<S>, v: &Region<S>) -> Result<OperatorHandle<S>> {
    dim_check(t.dim, v.dim())?;
    let mut out = match &t.kind {
        OperatorKind::FiniteGraph(pts) => {
            let mut kept = Vec::new();
            for w in pts {
                if v.contains(w.x())? {
                    kept.push(w.clone());
                }
            }
            OperatorHandle::wrap(OperatorKind::FiniteGraph(kept), t.dim)
        }
        OperatorKind::Flat { region, wstar } if region.intersect(v).is_some() => OperatorHandle::wrap(
            OperatorKind::Flat {
                region: region.intersect(v).expect("checked"),
                wstar: wstar.clone(),
            },
            t.dim,
        ),
        OperatorKind::NormalConeBox { cbox } => match cbox.intersect(v) {
            Some(Region::Box(axes)) if avoids_endpoints(cbox, &axes) => OperatorHandle::wrap(
                OperatorKind::Flat {
                    region: Region::Box(axes),
                    wstar: vec![S::zero(); t.dim],
                },
                t.dim,
            ),
            _ => OperatorHandle::wrap(
                OperatorKind::Restriction {
                    base: Box::new(t.clone()),
                    region: v.clone(),
                },
                t.dim,
            ),
        },
        OperatorKind::Restriction { base, region } if region.intersect(v).is_some() => {
            return restrict(base, &region.intersect(v).expect("checked"));
        }
        _ => OperatorHandle::wrap(
            OperatorKind::Restriction {
                base: Box::new(t.clone()),
                region: v.clone(),
            },
            t.dim,
        ),
    };
    out.empty = !t.domain_meets(v);
    Ok(out)
}

/// Whether the sub-box `axes` of the closed box `c` misses every finite
/// endpoint of `c`, i.e. lies in its interior.
fn avoids_endpoints<S: Scalar>(c: &Region<S>, axes: &[Interval<S>]) -> bool {
    let c_axes = c.as_box().expect("box");
    c_axes.iter().zip(axes).all(|(civ, iv)| {
        let lo_ok = civ.lo.value().map_or(true, |a| !iv.contains(a));
        let hi_ok = civ.hi.value().map_or(true, |b| !iv.contains(b));
        lo_ok && hi_ok
    })
}

/// Pairwise monotonicity over the enumerated graph. On failure the witnesses
/// are the pair with the most negative gap.
pub fn is_monotone<S: Scalar>(
    t: &OperatorHandle<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
) -> Result<Verdict<S>> {
    let ambient = Region::ambient(t.dim);
    let sample = t.enumerate_graph(g, &ambient, tol)?;
    let mut verdict = Verdict::new(Property::Monotone, g, tol, vec![ambient.to_string()]);
    verdict.approximate = !sample.exact;
    verdict.vacuous = sample.points.len() < 2;
    let pts = &sample.points;
    let worst = worst_pair(pts, tol.eps_eq)?;
    if let Some((gap, i, j)) = worst {
        verdict.witnesses = vec![pts[i].clone(), pts[j].clone()];
        verdict.detail = Some(format!("gap={}", gap.as_f64()));
    }
    Ok(verdict.settle())
}

/// `φ_{T|V}(z) ≤ c(z) + eps_eq`.
pub fn mr_test<S: Scalar>(
    t: &OperatorHandle<S>,
    v: &Region<S>,
    z: &PrimalDualPoint<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
) -> Result<bool> {
    Ok(t.phi(z, v, g, tol)?.value.le_within(coupling(z), tol.eps_eq))
}

/// `⟨x − u, x* − u*⟩ ≥ −eps_eq` for every enumerated `(u, u*)` of `T|_V`.
pub fn mr_test_pairwise<S: Scalar>(
    t: &OperatorHandle<S>,
    v: &Region<S>,
    z: &PrimalDualPoint<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
) -> Result<bool> {
    for w in &t.enumerate_graph(g, v, tol)?.points {
        if monotone_gap(z, w)? < -tol.eps_eq {
            return Ok(false);
        }
    }
    Ok(true)
}

fn fmt_vec<S: Scalar>(v: &[S]) -> String {
    let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

impl<S: Scalar> fmt::Display for OperatorHandle<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            OperatorKind::FiniteGraph(pts) => {
                let parts: Vec<String> = pts.iter().map(|p| p.to_string()).collect();
                write!(f, "finite_graph{{{}}}", parts.join(", "))
            }
            OperatorKind::Flat { region, wstar } => write!(f, "flat({region}, {})", fmt_vec(wstar)),
            OperatorKind::NormalConeBox { cbox } => write!(f, "normal_cone_box({cbox})"),
            OperatorKind::AbsSubdiff { scale } => write!(f, "abs_subdiff({scale})"),
            OperatorKind::PointComplement { x0 } => write!(f, "point_complement({})", fmt_vec(x0)),
            OperatorKind::Linear { matrix } => {
                let rows: Vec<String> = matrix.iter().map(|r| fmt_vec(r)).collect();
                write!(f, "linear([{}])", rows.join(", "))
            }
            OperatorKind::Restriction { base, region } => write!(f, "restrict({base}, {region})"),
            OperatorKind::SumNormalCone { base, cbox } => write!(f, "({base} + N {cbox})"),
            OperatorKind::PairSum { a, b } => write!(f, "({a} + {b})"),
        }
    }
}

//! Convex subsets of `X = ℝⁿ`: boxes with per-bound open/closed flags,
//! half-spaces and vertex-listed polytopes.

use std::fmt;

use crate::convex::lp::{LpOutcome, LpProblem};
use crate::duality::{ExtReal, PrimalDualPoint, Tolerance};
use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound<S> {
    Open(S),
    Closed(S),
    Unbounded,
}

impl<S: Scalar> Bound<S> {
    pub fn value(&self) -> Option<S> {
        match *self {
            Bound::Open(v) | Bound::Closed(v) => Some(v),
            Bound::Unbounded => None,
        }
    }

    fn is_open(&self) -> bool {
        matches!(self, Bound::Open(_))
    }

    fn closed(&self) -> Self {
        match *self {
            Bound::Open(v) => Bound::Closed(v),
            b => b,
        }
    }

    fn opened(&self) -> Self {
        match *self {
            Bound::Closed(v) => Bound::Open(v),
            b => b,
        }
    }
}

/// One axis of a box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<S> {
    pub lo: Bound<S>,
    pub hi: Bound<S>,
}

impl<S: Scalar> Interval<S> {
    pub fn new(lo: Bound<S>, hi: Bound<S>) -> Result<Self> {
        if let (Some(a), Some(b)) = (lo.value(), hi.value()) {
            if !(a <= b) {
                return Err(Error::InvalidRegion(format!(
                    "lower bound {a} exceeds upper bound {b}"
                )));
            }
        }
        for v in [lo.value(), hi.value()].into_iter().flatten() {
            if !v.is_finite() {
                return Err(Error::InvalidRegion(
                    "infinite bounds must be written as unbounded".into(),
                ));
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn closed(a: S, b: S) -> Result<Self> {
        Self::new(Bound::Closed(a), Bound::Closed(b))
    }

    pub fn open(a: S, b: S) -> Result<Self> {
        Self::new(Bound::Open(a), Bound::Open(b))
    }

    pub fn real_line() -> Self {
        Self {
            lo: Bound::Unbounded,
            hi: Bound::Unbounded,
        }
    }

    pub fn contains(&self, v: S) -> bool {
        let lo_ok = match self.lo {
            Bound::Open(a) => v > a,
            Bound::Closed(a) => v >= a,
            Bound::Unbounded => true,
        };
        let hi_ok = match self.hi {
            Bound::Open(b) => v < b,
            Bound::Closed(b) => v <= b,
            Bound::Unbounded => true,
        };
        lo_ok && hi_ok
    }

    pub fn interior_contains(&self, v: S) -> bool {
        Self {
            lo: self.lo.opened(),
            hi: self.hi.opened(),
        }
        .contains(v)
    }

    pub fn is_empty(&self) -> bool {
        match (self.lo.value(), self.hi.value()) {
            (Some(a), Some(b)) => a > b || (a == b && (self.lo.is_open() || self.hi.is_open())),
            _ => false,
        }
    }

    /// `sup{t·s : t ∈ I}`.
    pub fn support(&self, s: S) -> ExtReal<S> {
        if self.is_empty() {
            return ExtReal::NegInf;
        }
        if s > S::zero() {
            self.hi
                .value()
                .map_or(ExtReal::PosInf, |b| ExtReal::Finite(b * s))
        } else if s < S::zero() {
            self.lo
                .value()
                .map_or(ExtReal::PosInf, |a| ExtReal::Finite(a * s))
        } else {
            ExtReal::zero()
        }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let lo = tighter(self.lo, other.lo, |a, b| a > b);
        let hi = tighter(self.hi, other.hi, |a, b| a < b);
        Self { lo, hi }
    }

    /// Finite endpoints after clipping unbounded sides to `[-clip, clip]`.
    fn clipped(&self, clip: S) -> (S, S) {
        let two = S::lit(2.0);
        match (self.lo.value(), self.hi.value()) {
            (Some(a), Some(b)) => (a, b),
            (Some(a), None) => (a, if clip >= a { clip } else { a + two * clip }),
            (None, Some(b)) => (if -clip <= b { -clip } else { b - two * clip }, b),
            (None, None) => (-clip, clip),
        }
    }

    /// Deterministic lattice: closed ends are included, open ends are offset
    /// by one step of `span / gaps`, `gaps = (k − 1) + #open ends`.
    fn lattice(&self, k: usize, clip: S) -> Vec<S> {
        if self.is_empty() {
            return Vec::new();
        }
        let (lo, hi) = self.clipped(clip);
        if lo == hi {
            return vec![lo];
        }
        let open_lo = usize::from(self.lo.is_open());
        let open_hi = usize::from(self.hi.is_open());
        let gaps = (k - 1) + open_lo + open_hi;
        let span = hi - lo;
        let g = S::from_usize(gaps).unwrap();
        (open_lo..=gaps - open_hi)
            .map(|i| {
                if i == gaps {
                    hi
                } else {
                    lo + span * S::from_usize(i).unwrap() / g
                }
            })
            .collect()
    }
}

fn tighter<S: Scalar>(a: Bound<S>, b: Bound<S>, stricter: impl Fn(S, S) -> bool) -> Bound<S> {
    match (a, b) {
        (Bound::Unbounded, x) | (x, Bound::Unbounded) => x,
        (x, y) => {
            let (vx, vy) = (x.value().unwrap(), y.value().unwrap());
            if stricter(vx, vy) {
                x
            } else if stricter(vy, vx) {
                y
            } else if x.is_open() {
                x
            } else {
                y
            }
        }
    }
}

/// Lattice parameters for sampling `V × X*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<S> {
    /// Points per primal axis.
    pub resolution: usize,
    /// Half-width of the dual clip box `[-dual_bound, dual_bound]ⁿ`.
    pub dual_bound: S,
    /// Points per dual axis.
    pub dual_resolution: usize,
    /// Unbounded primal axes are clipped to `[-primal_bound, primal_bound]`.
    pub primal_bound: S,
}

impl<S: Scalar> GridSpec<S> {
    pub fn new(
        resolution: usize,
        dual_bound: S,
        dual_resolution: usize,
        primal_bound: S,
    ) -> Result<Self> {
        if resolution < 2 || dual_resolution < 2 {
            return Err(Error::InvalidGrid("resolutions must be at least 2".into()));
        }
        if !(dual_bound > S::zero() && dual_bound.is_finite())
            || !(primal_bound > S::zero() && primal_bound.is_finite())
        {
            return Err(Error::InvalidGrid("bounds must be positive and finite".into()));
        }
        Ok(Self {
            resolution,
            dual_bound,
            dual_resolution,
            primal_bound,
        })
    }

    /// 41 points per axis, dual box `[-10, 10]`, primal clip `[-2, 2]`.
    pub fn pinned() -> Self {
        Self {
            resolution: 41,
            dual_bound: S::lit(10.0),
            dual_resolution: 41,
            primal_bound: S::lit(2.0),
        }
    }

    /// Same grid with `factor×` as many gaps on the dual axes.
    pub fn refined_dual(&self, factor: usize) -> Self {
        Self {
            dual_resolution: (self.dual_resolution - 1) * factor + 1,
            ..*self
        }
    }

    /// Values of one dual axis.
    pub fn dual_axis(&self) -> Vec<S> {
        Interval::closed(-self.dual_bound, self.dual_bound)
            .expect("valid dual box")
            .lattice(self.dual_resolution, self.dual_bound)
    }

    /// The dual clip box lattice in `n` dimensions.
    pub fn dual_points(&self, n: usize) -> Vec<Vec<S>> {
        product(&vec![self.dual_axis(); n])
    }

    pub fn dual_box(&self, n: usize) -> Region<S> {
        let iv = Interval::closed(-self.dual_bound, self.dual_bound).expect("valid dual box");
        Region::Box(vec![iv; n])
    }
}

/// The scan grid `V × [-B, B]ⁿ`, primal-major.
pub fn primal_dual_grid<S: Scalar>(v: &Region<S>, g: &GridSpec<S>) -> Vec<PrimalDualPoint<S>> {
    let duals = g.dual_points(v.dim());
    let mut out = Vec::new();
    for x in v.grid_sample(g) {
        for s in &duals {
            out.push(PrimalDualPoint::new(x.clone(), s.clone()).expect("matching dimensions"));
        }
    }
    out
}

/// Cartesian product, first axis outermost.
pub(crate) fn product<S: Scalar>(axes: &[Vec<S>]) -> Vec<Vec<S>> {
    let mut out: Vec<Vec<S>> = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for prefix in &out {
            for &v in axis {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// A convex subset of `ℝⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub enum Region<S> {
    /// Product of intervals.
    Box(Vec<Interval<S>>),
    /// `{x : ⟨normal, x⟩ ≤ offset}` (closed) or `<` (open).
    HalfSpace {
        normal: Vec<S>,
        offset: S,
        closed: bool,
    },
    /// Convex hull of the listed vertices (closed).
    Polytope { vertices: Vec<Vec<S>> },
    Empty { dim: usize },
}

impl<S: Scalar> Region<S> {
    pub fn ambient(n: usize) -> Self {
        Region::Box(vec![Interval::real_line(); n])
    }

    pub fn interval(lo: Bound<S>, hi: Bound<S>) -> Result<Self> {
        Ok(Region::Box(vec![Interval::new(lo, hi)?]))
    }

    pub fn closed_interval(a: S, b: S) -> Result<Self> {
        Ok(Region::Box(vec![Interval::closed(a, b)?]))
    }

    pub fn open_interval(a: S, b: S) -> Result<Self> {
        Ok(Region::Box(vec![Interval::open(a, b)?]))
    }

    pub fn closed_box(lo: &[S], hi: &[S]) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::InvalidRegion("box bounds must have equal, positive length".into()));
        }
        Ok(Region::Box(
            lo.iter()
                .zip(hi)
                .map(|(&a, &b)| Interval::closed(a, b))
                .collect::<Result<_>>()?,
        ))
    }

    pub fn open_box(lo: &[S], hi: &[S]) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::InvalidRegion("box bounds must have equal, positive length".into()));
        }
        Ok(Region::Box(
            lo.iter()
                .zip(hi)
                .map(|(&a, &b)| Interval::open(a, b))
                .collect::<Result<_>>()?,
        ))
    }

    pub fn half_space(normal: Vec<S>, offset: S, closed: bool) -> Result<Self> {
        if normal.is_empty() {
            return Err(Error::InvalidRegion("half-space normal is empty".into()));
        }
        Ok(Region::HalfSpace {
            normal,
            offset,
            closed,
        })
    }

    pub fn polytope(vertices: Vec<Vec<S>>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(Error::InvalidRegion("polytope needs at least one vertex".into()));
        };
        let n = first.len();
        if n == 0 || vertices.iter().any(|v| v.len() != n) {
            return Err(Error::InvalidRegion("polytope vertices differ in dimension".into()));
        }
        Ok(Region::Polytope { vertices })
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Box(axes) => axes.len(),
            Region::HalfSpace { normal, .. } => normal.len(),
            Region::Polytope { vertices } => vertices[0].len(),
            Region::Empty { dim } => *dim,
        }
    }

    fn check_dim(&self, x: &[S]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    pub fn as_box(&self) -> Option<&[Interval<S>]> {
        match self {
            Region::Box(axes) => Some(axes),
            _ => None,
        }
    }

    /// Every axis unbounded on both sides.
    pub fn is_ambient(&self) -> bool {
        self.as_box().is_some_and(|axes| {
            axes.iter()
                .all(|iv| iv.lo == Bound::Unbounded && iv.hi == Bound::Unbounded)
        })
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Region::Box(axes) => axes.iter().any(Interval::is_empty),
            Region::HalfSpace {
                normal,
                offset,
                closed,
            } => {
                normal.iter().all(|v| *v == S::zero())
                    && (*offset < S::zero() || (*offset == S::zero() && !closed))
            }
            Region::Polytope { .. } => false,
            Region::Empty { .. } => true,
        }
    }

    /// Open in the topology of `ℝⁿ`; for these shapes this coincides with
    /// being algebraically open.
    pub fn is_open(&self) -> bool {
        match self {
            Region::Box(axes) => axes
                .iter()
                .all(|iv| !matches!(iv.lo, Bound::Closed(_)) && !matches!(iv.hi, Bound::Closed(_))),
            Region::HalfSpace { closed, .. } => !closed,
            Region::Polytope { .. } => false,
            Region::Empty { .. } => true,
        }
    }

    pub fn is_algebraically_open(&self) -> bool {
        self.is_open()
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Region::Box(axes) => axes
                .iter()
                .all(|iv| !iv.lo.is_open() && !iv.hi.is_open()),
            Region::HalfSpace { closed, .. } => *closed,
            Region::Polytope { .. } | Region::Empty { .. } => true,
        }
    }

    pub fn contains(&self, x: &[S]) -> Result<bool> {
        self.check_dim(x)?;
        Ok(match self {
            Region::Box(axes) => axes.iter().zip(x).all(|(iv, &v)| iv.contains(v)),
            Region::HalfSpace {
                normal,
                offset,
                closed,
            } => {
                let d = dot(normal, x);
                if *closed {
                    d <= *offset
                } else {
                    d < *offset
                }
            }
            Region::Polytope { vertices } => polytope_contains(vertices, x)?,
            Region::Empty { .. } => false,
        })
    }

    pub fn interior_contains(&self, x: &[S]) -> Result<bool> {
        self.check_dim(x)?;
        Ok(match self {
            Region::Box(axes) => axes.iter().zip(x).all(|(iv, &v)| iv.interior_contains(v)),
            Region::HalfSpace { normal, offset, .. } => {
                normal.iter().any(|v| *v != S::zero()) && dot(normal, x) < *offset
                    || normal.iter().all(|v| *v == S::zero()) && *offset > S::zero()
            }
            Region::Polytope { vertices } => {
                // x is interior iff a small cross-polytope around it stays inside
                let scale = vertices
                    .iter()
                    .flatten()
                    .fold(S::one(), |m, v| m.max(v.abs()));
                let t = scale * S::epsilon().sqrt();
                let mut inside = polytope_contains(vertices, x)?;
                for j in 0..x.len() {
                    for sign in [S::one(), -S::one()] {
                        if !inside {
                            break;
                        }
                        let mut y = x.to_vec();
                        y[j] = y[j] + sign * t;
                        inside = polytope_contains(vertices, &y)?;
                    }
                }
                inside
            }
            Region::Empty { .. } => false,
        })
    }

    pub fn closure(&self) -> Self {
        match self {
            Region::Box(axes) => Region::Box(
                axes.iter()
                    .map(|iv| Interval {
                        lo: iv.lo.closed(),
                        hi: iv.hi.closed(),
                    })
                    .collect(),
            ),
            Region::HalfSpace { normal, offset, .. } => Region::HalfSpace {
                normal: normal.clone(),
                offset: *offset,
                closed: true,
            },
            other => other.clone(),
        }
    }

    /// Topological interior; `None` for polytopes, whose interior is not a
    /// vertex-listed shape.
    pub fn interior(&self) -> Option<Self> {
        match self {
            Region::Box(axes) => Some(Region::Box(
                axes.iter()
                    .map(|iv| Interval {
                        lo: iv.lo.opened(),
                        hi: iv.hi.opened(),
                    })
                    .collect(),
            )),
            Region::HalfSpace { normal, offset, .. } => Some(Region::HalfSpace {
                normal: normal.clone(),
                offset: *offset,
                closed: false,
            }),
            Region::Empty { dim } => Some(Region::Empty { dim: *dim }),
            Region::Polytope { .. } => None,
        }
    }

    /// Intersection, available when both operands are boxes (or one is empty).
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        if self.dim() != other.dim() {
            return None;
        }
        match (self, other) {
            (Region::Empty { dim }, _) | (_, Region::Empty { dim }) => {
                Some(Region::Empty { dim: *dim })
            }
            (Region::Box(a), Region::Box(b)) => Some(Region::Box(
                a.iter().zip(b).map(|(p, q)| p.intersect(q)).collect(),
            )),
            (r, b) | (b, r) if b.is_ambient() => Some(r.clone()),
            _ => None,
        }
    }

    /// Intersection of a nonempty list of regions, when representable.
    pub fn intersect_all<'a, I>(mut regions: I) -> Option<Self>
    where
        I: Iterator<Item = &'a Region<S>>,
    {
        let first = regions.next()?.clone();
        regions.try_fold(first, |acc, r| acc.intersect(r))
    }

    /// Axis-aligned bounding box, unbounded axes clipped to `[-clip, clip]`.
    pub fn bounding_box(&self, clip: S) -> Vec<(S, S)> {
        match self {
            Region::Box(axes) => axes.iter().map(|iv| iv.clipped(clip)).collect(),
            Region::Polytope { vertices } => (0..self.dim())
                .map(|j| {
                    vertices.iter().fold((S::infinity(), S::neg_infinity()), |(a, b), v| {
                        (a.min(v[j]), b.max(v[j]))
                    })
                })
                .collect(),
            Region::HalfSpace { normal, .. } => vec![(-clip, clip); normal.len()],
            Region::Empty { dim } => vec![(S::zero(), S::zero()); *dim],
        }
    }

    /// Deterministic lattice of points of the region (see [`GridSpec`]).
    pub fn grid_sample(&self, g: &GridSpec<S>) -> Vec<Vec<S>> {
        let k = g.resolution;
        match self {
            Region::Box(axes) => {
                let lattices: Vec<Vec<S>> =
                    axes.iter().map(|iv| iv.lattice(k, g.primal_bound)).collect();
                product(&lattices)
            }
            Region::Empty { .. } => Vec::new(),
            other => {
                let axes: Vec<Vec<S>> = other
                    .bounding_box(g.primal_bound)
                    .into_iter()
                    .map(|(a, b)| {
                        Interval::closed(a, b)
                            .map(|iv| iv.lattice(k, g.primal_bound))
                            .unwrap_or_default()
                    })
                    .collect();
                product(&axes)
                    .into_iter()
                    .filter(|x| other.contains(x).unwrap_or(false))
                    .collect()
            }
        }
    }

    /// `σ_R(x*) = sup{⟨x, x*⟩ : x ∈ R}`.
    pub fn support(&self, xstar: &[S]) -> Result<ExtReal<S>> {
        self.check_dim(xstar)?;
        if self.is_empty() {
            return Ok(ExtReal::NegInf);
        }
        Ok(match self {
            Region::Box(axes) => axes
                .iter()
                .zip(xstar)
                .fold(ExtReal::zero(), |acc, (iv, &s)| acc + iv.support(s)),
            Region::Polytope { vertices } => {
                ExtReal::sup(vertices.iter().map(|v| ExtReal::Finite(dot(v, xstar))))
            }
            Region::HalfSpace { normal, offset, .. } => {
                let nn = dot(normal, normal);
                if xstar.iter().all(|v| *v == S::zero()) {
                    ExtReal::zero()
                } else if nn == S::zero() {
                    ExtReal::PosInf
                } else {
                    let t = dot(normal, xstar) / nn;
                    let resid = normal
                        .iter()
                        .zip(xstar)
                        .fold(S::zero(), |m, (&a, &s)| m.max((s - t * a).abs()));
                    let scale = xstar.iter().fold(S::one(), |m, v| m.max(v.abs()));
                    if t >= S::zero() && resid <= S::pivot_eps() * scale {
                        ExtReal::Finite(t * *offset)
                    } else {
                        ExtReal::PosInf
                    }
                }
            }
            Region::Empty { .. } => ExtReal::NegInf,
        })
    }

    /// `x* ∈ N_R(x)`: `⟨x' − x, x*⟩ ≤ eps_eq` for every `x' ∈ R`, i.e.
    /// `σ_R(x*) − ⟨x, x*⟩ ≤ eps_eq`. False when `x ∉ R`.
    pub fn normal_cone_contains(&self, x: &[S], xstar: &[S], tol: &Tolerance<S>) -> Result<bool> {
        if !self.is_closed() {
            return Err(Error::OpenRegionNormalCone);
        }
        self.check_dim(xstar)?;
        if !self.contains(x)? {
            return Ok(false);
        }
        Ok(self.support(xstar)?.le_within(dot(x, xstar), tol.eps_eq))
    }

    /// Per-axis intervals of `N_B(x)` for a closed box `B` and `x ∈ B`
    /// (`None` outside `B` or for non-box regions).
    pub fn box_normal_cone(&self, x: &[S]) -> Option<Vec<(S, S)>> {
        let axes = self.as_box()?;
        if x.len() != axes.len() || !axes.iter().zip(x).all(|(iv, &v)| iv.contains(v)) {
            return None;
        }
        let inf = S::infinity();
        Some(
            axes.iter()
                .zip(x)
                .map(|(iv, &v)| {
                    let at_lo = iv.lo.value() == Some(v);
                    let at_hi = iv.hi.value() == Some(v);
                    match (at_lo, at_hi) {
                        (true, true) => (-inf, inf),
                        (true, false) => (-inf, S::zero()),
                        (false, true) => (S::zero(), inf),
                        (false, false) => (S::zero(), S::zero()),
                    }
                })
                .collect(),
        )
    }
}

fn polytope_contains<S: Scalar>(vertices: &[Vec<S>], x: &[S]) -> Result<bool> {
    // feasibility of λ ≥ 0, Σλ v = x, Σλ = 1
    let n = x.len();
    let k = vertices.len();
    let mut a = vec![vec![S::zero(); k]; n + 1];
    for (j, v) in vertices.iter().enumerate() {
        for i in 0..n {
            a[i][j] = v[i];
        }
        a[n][j] = S::one();
    }
    let mut b = x.to_vec();
    b.push(S::one());
    let lp = LpProblem::new(vec![S::zero(); k], a, b)?;
    Ok(matches!(lp.solve()?, LpOutcome::Optimal { .. }))
}

impl<S: Scalar> fmt::Display for Interval<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lo {
            Bound::Open(a) => write!(f, "({a}, ")?,
            Bound::Closed(a) => write!(f, "[{a}, ")?,
            Bound::Unbounded => write!(f, "(-inf, ")?,
        }
        match self.hi {
            Bound::Open(b) => write!(f, "{b})"),
            Bound::Closed(b) => write!(f, "{b}]"),
            Bound::Unbounded => write!(f, "inf)"),
        }
    }
}

fn fmt_vec<S: Scalar>(v: &[S]) -> String {
    let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

/// Region literal syntax, accepted back by the spec-file parser.
impl<S: Scalar> fmt::Display for Region<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Box(axes) => {
                let parts: Vec<String> = axes.iter().map(|iv| iv.to_string()).collect();
                write!(f, "{}", parts.join(" x "))
            }
            Region::HalfSpace {
                normal,
                offset,
                closed,
            } => write!(
                f,
                "halfspace({} {} {})",
                fmt_vec(normal),
                if *closed { "<=" } else { "<" },
                offset
            ),
            Region::Polytope { vertices } => {
                let parts: Vec<String> = vertices.iter().map(|v| fmt_vec(v)).collect();
                write!(f, "polytope([{}])", parts.join(", "))
            }
            Region::Empty { dim } => write!(f, "empty({dim})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(k: usize) -> GridSpec<f64> {
        GridSpec::new(k, 10.0, 5, 2.0).unwrap()
    }

    #[test]
    fn contains_examples() {
        let open = Region::open_interval(0.0, 1.0).unwrap();
        assert!(open.contains(&[0.5]).unwrap());
        assert!(!open.contains(&[0.0]).unwrap());
        let b = Region::closed_box(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        assert!(b.contains(&[1.0, 1.0]).unwrap());
        assert!(b.contains(&[1.0]).is_err());
    }

    #[test]
    fn polytope_membership_matches_barycentric_oracle() {
        let tri = Region::polytope(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        // barycentric coordinates of (x, y) are (1 - x - y, x, y)
        let oracle = |x: f64, y: f64| x >= 0.0 && y >= 0.0 && 1.0 - x - y >= 0.0;
        for &(x, y) in &[(0.2, 0.2), (0.5, 0.5), (0.6, 0.6), (-0.1, 0.3), (0.0, 0.0), (1.0, 0.0)] {
            assert_eq!(tri.contains(&[x, y]).unwrap(), oracle(x, y), "({x}, {y})");
        }
        assert!(tri.interior_contains(&[0.2, 0.2]).unwrap());
        assert!(!tri.interior_contains(&[0.0, 0.3]).unwrap());
    }

    #[test]
    fn interior_examples() {
        let c = Region::closed_interval(-1.0, 1.0).unwrap();
        assert!(!c.interior_contains(&[1.0]).unwrap());
        assert!(c.interior_contains(&[0.99]).unwrap());
        let h = Region::half_space(vec![1.0, 0.0], 1.0, true).unwrap();
        assert!(!h.interior_contains(&[1.0, 0.0]).unwrap());
        assert!(h.contains(&[1.0, 0.0]).unwrap());
    }

    #[test]
    fn grid_examples() {
        let c = Region::closed_interval(0.0, 1.0).unwrap();
        let pts: Vec<f64> = c.grid_sample(&g(5)).into_iter().map(|p| p[0]).collect();
        assert_eq!(pts, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let o = Region::open_interval(0.0, 1.0).unwrap();
        let pts: Vec<f64> = o.grid_sample(&g(4)).into_iter().map(|p| p[0]).collect();
        let expect = [0.2, 0.4, 0.6, 0.8];
        assert_eq!(pts.len(), 4);
        for (a, b) in pts.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        let b = Region::closed_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let pts = b.grid_sample(&g(3));
        assert_eq!(pts.len(), 9);
        assert!(pts.contains(&vec![0.0, 0.0]) && pts.contains(&vec![1.0, 1.0]));
    }

    #[test]
    fn symmetric_lattices_hit_zero() {
        let gs = GridSpec::<f64>::pinned();
        assert!(gs.dual_axis().contains(&0.0));
        assert!(gs.dual_axis().contains(&1.0) && gs.dual_axis().contains(&3.0));
        let v = Region::open_interval(-1.0, 1.0).unwrap();
        assert!(v.grid_sample(&gs).contains(&vec![0.0]));
        let amb = Region::<f64>::ambient(1);
        let pts = amb.grid_sample(&gs);
        assert!(pts.contains(&vec![0.0]) && pts.contains(&vec![2.0]));
    }

    #[test]
    fn normal_cone_examples() {
        let c = Region::closed_interval(-1.0, 1.0).unwrap();
        let tol = Tolerance::pinned();
        assert!(c.normal_cone_contains(&[1.0], &[5.0], &tol).unwrap());
        assert!(!c.normal_cone_contains(&[0.5], &[1.0], &tol).unwrap());
        assert!(c.normal_cone_contains(&[-1.0], &[-3.0], &tol).unwrap());
        assert!(!c.normal_cone_contains(&[2.0], &[1.0], &tol).unwrap());
        let open = Region::open_interval(-1.0, 1.0).unwrap();
        assert_eq!(
            open.normal_cone_contains(&[0.0], &[0.0], &tol),
            Err(Error::OpenRegionNormalCone)
        );
    }

    #[test]
    fn support_examples() {
        let c = Region::closed_interval(-1.0, 1.0).unwrap();
        assert_eq!(c.support(&[3.0]).unwrap(), ExtReal::Finite(3.0));
        let b = Region::closed_box(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(b.support(&[1.0, 2.0]).unwrap(), ExtReal::Finite(3.0));
        assert_eq!(
            Region::<f64>::Empty { dim: 1 }.support(&[1.0]).unwrap(),
            ExtReal::NegInf
        );
        let ray = Region::interval(Bound::Closed(0.0), Bound::Unbounded).unwrap();
        assert_eq!(ray.support(&[1.0]).unwrap(), ExtReal::PosInf);
        let h = Region::half_space(vec![1.0, 0.0], 2.0, true).unwrap();
        assert_eq!(h.support(&[3.0, 0.0]).unwrap(), ExtReal::Finite(6.0));
        assert_eq!(h.support(&[3.0, 1.0]).unwrap(), ExtReal::PosInf);
    }

    #[test]
    fn box_intersection_keeps_open_flags() {
        let a = Region::closed_interval(-1.0, 1.0).unwrap();
        let b = Region::open_interval(0.0, 2.0).unwrap();
        let c = a.intersect(&b).unwrap();
        assert_eq!(c.to_string(), "(0, 1]");
        let amb = Region::<f64>::ambient(1);
        assert_eq!(amb.intersect(&a).unwrap(), a);
        let d = Region::open_interval(1.0, 2.0).unwrap();
        assert!(a.intersect(&d).unwrap().is_empty());
    }

    #[test]
    fn open_flag_and_closure() {
        let v = Region::open_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!(v.is_open() && v.is_algebraically_open());
        assert!(v.closure().is_closed());
        assert_eq!(v.closure().interior().unwrap(), v);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn bound() -> impl Strategy<Value = u8> {
            0u8..3
        }

        fn make(a: f64, b: f64, kl: u8, kh: u8) -> Region<f64> {
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            let lo = match kl {
                0 => Bound::Open(a),
                1 => Bound::Closed(a),
                _ => Bound::Unbounded,
            };
            let hi = match kh {
                0 => Bound::Open(b),
                1 => Bound::Closed(b),
                _ => Bound::Unbounded,
            };
            Region::interval(lo, hi).unwrap()
        }

        proptest! {
            #[test]
            fn interior_closure_sandwich(a in -3.0..3.0f64, b in -3.0..3.0f64,
                                         kl in bound(), kh in bound(), x in -4.0..4.0f64) {
                let r = make(a, b, kl, kh);
                if r.interior_contains(&[x]).unwrap() {
                    prop_assert!(r.contains(&[x]).unwrap());
                }
                if r.contains(&[x]).unwrap() {
                    prop_assert!(r.closure().contains(&[x]).unwrap());
                }
            }

            #[test]
            fn grid_points_are_members(a in -3.0..3.0f64, b in -3.0..3.0f64,
                                       kl in bound(), kh in bound(), k in 2usize..12) {
                let r = make(a, b, kl, kh);
                let gs = GridSpec::new(k, 1.0, 3, 2.0).unwrap();
                for p in r.grid_sample(&gs) {
                    prop_assert!(r.contains(&p).unwrap(), "{:?} not in {}", p, r);
                }
            }

            #[test]
            fn normal_cone_contains_zero(a in -3.0..3.0f64, b in -3.0..3.0f64, t in 0.0..1.0f64) {
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                let r = Region::closed_interval(a, b).unwrap();
                let x = a + t * (b - a);
                let tol = Tolerance::pinned();
                if r.contains(&[x]).unwrap() {
                    prop_assert!(r.normal_cone_contains(&[x], &[0.0], &tol).unwrap());
                }
            }

            #[test]
            fn box_support_is_positively_homogeneous(s in -5.0..5.0f64, t in 0.0..4.0f64,
                                                     a in -3.0..0.0f64, b in 0.0..3.0f64) {
                let r = Region::closed_box(&[a, a], &[b, b + 1.0]).unwrap();
                let lhs = r.support(&[t * s, -t * s]).unwrap().finite().unwrap();
                let rhs = t * r.support(&[s, -s]).unwrap().finite().unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
            }
        }
    }
}

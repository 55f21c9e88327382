//! Grid-scale deciders for the operator property lattice.

use std::collections::BTreeMap;
use std::fmt;

use crate::duality::{coupling, monotone_gap, ExtReal, PrimalDualPoint, Tolerance};
use crate::error::{Error, Result};
use crate::fitzpatrick::{is_representative, psi_envelope, PhiEvaluator};
use crate::operators::{is_monotone, restrict, OperatorHandle};
use crate::regions::{primal_dual_grid, GridSpec, Interval, Region};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    Monotone,
    VNI,
    Locates,
    Identifies,
    VRepresentable,
    NI,
    LocallyNI,
    MaximalOnGrid,
    ConditionC,
    LowRepresentable,
}

impl Property {
    pub fn name(&self) -> &'static str {
        match self {
            Property::Monotone => "monotone",
            Property::VNI => "v_ni",
            Property::Locates => "locates",
            Property::Identifies => "identifies",
            Property::VRepresentable => "v_representable",
            Property::NI => "ni",
            Property::LocallyNI => "locally_ni",
            Property::MaximalOnGrid => "maximal_on_grid",
            Property::ConditionC => "condition_c",
            Property::LowRepresentable => "low_representable",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        const ALL: [Property; 10] = [
            Property::Monotone,
            Property::VNI,
            Property::Locates,
            Property::Identifies,
            Property::VRepresentable,
            Property::NI,
            Property::LocallyNI,
            Property::MaximalOnGrid,
            Property::ConditionC,
            Property::LowRepresentable,
        ];
        ALL.into_iter().find(|p| p.name() == s)
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of a grid check. A `false` value always carries witnesses.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict<S> {
    pub property: Property,
    pub value: bool,
    /// Violating grid points in lexicographic order.
    pub witnesses: Vec<PrimalDualPoint<S>>,
    pub approximate: bool,
    /// True because the quantified set was empty.
    pub vacuous: bool,
    pub grid: GridSpec<S>,
    pub tol: Tolerance<S>,
    pub region_ids: Vec<String>,
    /// Free-form numeric context, e.g. the values at the first witness.
    pub detail: Option<String>,
}

impl<S: Scalar> Verdict<S> {
    pub(crate) fn new(
        property: Property,
        grid: &GridSpec<S>,
        tol: &Tolerance<S>,
        region_ids: Vec<String>,
    ) -> Self {
        Self {
            property,
            value: true,
            witnesses: Vec::new(),
            approximate: false,
            vacuous: false,
            grid: *grid,
            tol: *tol,
            region_ids,
            detail: None,
        }
    }

    /// Sets `value` from the witness list, sorting and deduplicating it.
    pub(crate) fn settle(mut self) -> Self {
        self.witnesses.sort_by(|a, b| a.lex_cmp(b));
        self.witnesses.dedup();
        self.value = self.witnesses.is_empty();
        self
    }

    pub fn first_witness(&self) -> Option<&PrimalDualPoint<S>> {
        self.witnesses.first()
    }
}

fn describe<S: Scalar>(z: &PrimalDualPoint<S>, phi: ExtReal<S>) -> String {
    format!("at {z}: phi={phi} c={}", coupling(z))
}

/// `φ_{T|V} ≥ c − eps_strict` on `V × [-B, B]ⁿ`. Vacuously true (and
/// flagged) when `V` misses `D(T)`.
pub fn check_vni<S: Scalar>(
    t: &OperatorHandle<S>,
    v: &Region<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
) -> Result<Verdict<S>> {
    vni_as(Property::VNI, t, v, g, tol)
}

/// V-NI with `V` the whole space.
pub fn check_ni<S: Scalar>(
    t: &OperatorHandle<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
) -> Result<Verdict<S>> {
    vni_as(Property::NI, t, &Region::ambient(t.dim()), g, tol)
}

fn vni_as<S: Scalar>(
    property: Property,
    t: &OperatorHandle<S>,
    v: &Region<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
) -> Result<Verdict<S>> {
    let mut verdict = Verdict::new(property, g, tol, vec![v.to_string()]);
    if !t.domain_meets(v) {
        verdict.vacuous = true;
        return Ok(verdict);
    }
    let phi = PhiEvaluator::new(t, v, g, tol)?;
    for z in primal_dual_grid(v, g) {
        let f = phi.eval(&z)?;
        verdict.approximate |= f.approximate;
        if f.value < ExtReal::Finite(coupling(&z) - tol.eps_strict) {
            if verdict.detail.is_none() {
                verdict.detail = Some(describe(&z, f.value));
            }
            verdict.witnesses.push(z);
        }
    }
    Ok(verdict.settle())
}

/// Grid points of `V × [-B, B]ⁿ` monotonically related to `T|_V`.
fn related_points<S: Scalar>(
    t: &OperatorHandle<S>,
    v: &Region<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
    approximate: &mut bool,
) -> Result<Vec<PrimalDualPoint<S>>> {
    related_trace(t, v, v, g, tol, approximate)
}

/// Grid points of `sampled × [-B, B]ⁿ` monotonically related to `T|_W`.
pub fn related_trace<S: Scalar>(
    t: &OperatorHandle<S>,
    within: &Region<S>,
    sampled: &Region<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
    approximate: &mut bool,
) -> Result<Vec<PrimalDualPoint<S>>> {
    let phi = PhiEvaluator::new(t, within, g, tol)?;
    let mut out = Vec::new();
    for z in primal_dual_grid(sampled, g) {
        let f = phi.eval(&z)?;
        *approximate |= f.approximate;
        if f.value.le_within(coupling(&z), tol.eps_eq) {
            out.push(z);
        }
    }
    Ok(out)
}

/// Every m.r. grid point of `T|_V` has primal in `S` (default `D(T)`).
pub fn check_locates<S: Scalar>(
    t: &OperatorHandle<S>,
    v: &Region<S>,
    target: Option<&Region<S>>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
) -> Result<Verdict<S>> {
    let mut ids = vec![v.to_string()];
    ids.extend(target.map(|s| s.to_string()));
    let mut verdict = Verdict::new(Property::Locates, g, tol, ids);
    for z in related_points(t, v, g, tol, &mut verdict.approximate)? {
        let inside = match target {
            Some(s) => s.contains(z.x())?,
            None => t.domain_contains(z.x(), tol)?,
        };
        if !inside {
            verdict.witnesses.push(z);
        }
    }
    Ok(verdict.settle())
}

/// Every m.r. grid point of `T|_V` is in the graph of `T`.
pub fn check_identifies<S: Scalar>(
    t: &OperatorHandle<S>,
    v: &Region<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
) -> Result<Verdict<S>> {
    identifies_as(Property::Identifies, t, v, g, tol)
}

fn identifies_as<S: Scalar>(
    property: Property,
    t: &OperatorHandle<S>,
    v: &Region<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
) -> Result<Verdict<S>> {
    let mut verdict = Verdict::new(property, g, tol, vec![v.to_string()]);
    for z in related_points(t, v, g, tol, &mut verdict.approximate)? {
        if !t.graph_contains(&z, tol)? {
            verdict.witnesses.push(z);
        }
    }
    Ok(verdict.settle())
}

/// Identification by the whole (clipped) space.
pub fn check_maximal_on_grid<S: Scalar>(
    t: &OperatorHandle<S>,
    ambient: &Region<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
) -> Result<Verdict<S>> {
    identifies_as(Property::MaximalOnGrid, t, ambient, g, tol)
}

/// `T|_V` is monotone and `ψ_{T|V}` represents it on the grid.
pub fn check_v_representable<S: Scalar>(
    t: &OperatorHandle<S>,
    v: &Region<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
) -> Result<Verdict<S>> {
    let mut verdict = Verdict::new(Property::VRepresentable, g, tol, vec![v.to_string()]);
    let restricted = restrict(t, v)?;
    let mono = is_monotone(&restricted, g, tol)?;
    verdict.approximate = mono.approximate;
    if !mono.value {
        verdict.witnesses = mono.witnesses;
        verdict.detail = Some(format!("restriction not monotone: {}", mono.detail.unwrap_or_default()));
        return Ok(verdict.settle());
    }
    let psi = psi_envelope(t, v, g, tol)?;
    match is_representative(&psi.function, t, v, g, tol) {
        Ok(rep) => {
            verdict.approximate |= rep.approximate || !psi.exact;
            verdict.witnesses = rep.mismatch_witnesses;
        }
        Err(Error::NotRepresentativeClass { witness }) => {
            verdict.approximate |= !psi.exact;
            verdict.detail = Some(format!("psi below coupling at {witness}"));
            verdict.witnesses = below_coupling(v, g, tol, &psi.function)?;
        }
        Err(e) => return Err(e),
    }
    Ok(verdict.settle())
}

fn below_coupling<S: Scalar>(
    v: &Region<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
    h: &crate::convex::ConvexFn<S>,
) -> Result<Vec<PrimalDualPoint<S>>> {
    let mut out = Vec::new();
    for z in primal_dual_grid(v, g) {
        if h.eval(&z)? < ExtReal::Finite(coupling(&z) - tol.eps_strict) {
            out.push(z);
        }
    }
    Ok(out)
}

/// `Pr_X[φ_{T|V} < c] ∩ V ⊂ cl D(T)` on the grid, with the strict set taken
/// as `φ < c − eps_strict`.
pub fn check_condition_c<S: Scalar>(
    t: &OperatorHandle<S>,
    v: &Region<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
) -> Result<Verdict<S>> {
    let mut verdict = Verdict::new(Property::ConditionC, g, tol, vec![v.to_string()]);
    let phi = PhiEvaluator::new(t, v, g, tol)?;
    let mut strict_seen = false;
    for z in primal_dual_grid(v, g) {
        let f = phi.eval(&z)?;
        verdict.approximate |= f.approximate;
        if f.value < ExtReal::Finite(coupling(&z) - tol.eps_strict) {
            strict_seen = true;
            if !t.domain_closure_contains(z.x(), tol)? {
                if verdict.detail.is_none() {
                    verdict.detail = Some(describe(&z, f.value));
                }
                verdict.witnesses.push(z);
            }
        }
    }
    verdict.vacuous = !strict_seen;
    Ok(verdict.settle())
}

/// Grid traces of `[φ_{T|V} = c]` and `[φ_{T|V} ≤ c]` on `V × [-B, B]ⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionTrace<S> {
    pub equal: Vec<PrimalDualPoint<S>>,
    pub below: Vec<PrimalDualPoint<S>>,
    pub approximate: bool,
}

pub fn extension_trace<S: Scalar>(
    t: &OperatorHandle<S>,
    v: &Region<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
) -> Result<ExtensionTrace<S>> {
    let phi = PhiEvaluator::new(t, v, g, tol)?;
    let mut trace = ExtensionTrace {
        equal: Vec::new(),
        below: Vec::new(),
        approximate: false,
    };
    for z in primal_dual_grid(v, g) {
        let f = phi.eval(&z)?;
        trace.approximate |= f.approximate;
        let c = coupling(&z);
        if f.value.eq_within(c, tol.eps_eq) {
            trace.equal.push(z.clone());
        }
        if f.value.le_within(c, tol.eps_eq) {
            trace.below.push(z);
        }
    }
    Ok(trace)
}

/// The grid trace of the unique maximal monotone extension of `T|_V` inside
/// `V × X*`, i.e. `[φ_{T|V} = c]`. Requires `T` to be V-NI with monotone
/// restriction; the `[φ ≤ c]` trace must coincide.
pub fn unique_extension<S: Scalar>(
    t: &OperatorHandle<S>,
    v: &Region<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
) -> Result<Vec<PrimalDualPoint<S>>> {
    let vni = check_vni(t, v, g, tol)?;
    if !vni.value {
        return Err(Error::UnsatisfiedHypothesis(format!(
            "operator is not V-NI on {v} ({})",
            vni.detail.unwrap_or_default()
        )));
    }
    if !is_monotone(&restrict(t, v)?, g, tol)?.value {
        return Err(Error::UnsatisfiedHypothesis(format!(
            "restriction to {v} is not monotone"
        )));
    }
    let trace = extension_trace(t, v, g, tol)?;
    if trace.equal != trace.below {
        return Err(Error::UnsatisfiedHypothesis(
            "[phi = c] and [phi <= c] traces differ".into(),
        ));
    }
    Ok(trace.equal)
}

/// A finite family of open regions standing in for "every open convex set".
#[derive(Debug, Clone, PartialEq)]
pub struct RegionFamily<S> {
    pub regions: Vec<Region<S>>,
    pub rule: String,
}

impl<S: Scalar> RegionFamily<S> {
    /// Open sub-boxes of `[lo, hi]ⁿ` of side `(hi − lo)/2^s` for `s = 1..=scales`,
    /// offset by half a side, keeping those that meet `D(T)`.
    pub fn dyadic(t: &OperatorHandle<S>, lo: S, hi: S, scales: u32) -> Result<Self> {
        if !(lo < hi) || scales == 0 {
            return Err(Error::InvalidRegion("dyadic family needs lo < hi and scales ≥ 1".into()));
        }
        let n = t.dim();
        let mut regions = Vec::new();
        for s in 1..=scales {
            let parts = 1usize << s;
            let width = (hi - lo) / S::from_usize(parts).unwrap();
            let starts: Vec<S> = (0..2 * parts - 1)
                .map(|k| lo + width * S::from_usize(k).unwrap() / S::lit(2.0))
                .collect();
            let axes: Vec<Vec<Interval<S>>> = (0..n)
                .map(|_| {
                    starts
                        .iter()
                        .map(|&a| Interval::open(a, a + width))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?;
            let mut boxes: Vec<Vec<Interval<S>>> = vec![Vec::new()];
            for axis in &axes {
                boxes = boxes
                    .into_iter()
                    .flat_map(|prefix| {
                        axis.iter().map(move |iv| {
                            let mut b = prefix.clone();
                            b.push(*iv);
                            b
                        })
                    })
                    .collect();
            }
            regions.extend(
                boxes
                    .into_iter()
                    .map(Region::Box)
                    .filter(|r| t.domain_meets(r)),
            );
        }
        Ok(Self {
            regions,
            rule: format!("dyadic open boxes of [{lo}, {hi}]^{n}, {scales} scales, meeting D(T)"),
        })
    }

    pub fn from_regions(regions: Vec<Region<S>>, rule: &str) -> Self {
        Self {
            regions,
            rule: rule.to_string(),
        }
    }

    /// Closures of the members whose interior meets `D(T)`.
    pub fn closures(&self, t: &OperatorHandle<S>) -> Self {
        let regions = self
            .regions
            .iter()
            .filter(|r| r.interior().is_some_and(|i| t.domain_meets(&i)))
            .map(Region::closure)
            .collect();
        Self {
            regions,
            rule: format!("closures of {}", self.rule),
        }
    }
}

/// Conjunction of a per-region property over a family. The first failing
/// region and its witnesses are recorded.
pub fn family_scan<S: Scalar>(
    t: &OperatorHandle<S>,
    family: &RegionFamily<S>,
    property: Property,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
) -> Result<Verdict<S>> {
    if property == Property::LowRepresentable {
        return low_representable(t, family, g, tol);
    }
    let reported = match property {
        Property::VNI | Property::NI | Property::LocallyNI => Property::LocallyNI,
        p => p,
    };
    let ids = family.regions.iter().map(|r| r.to_string()).collect();
    let mut verdict = Verdict::new(reported, g, tol, ids);
    verdict.vacuous = family.regions.is_empty();
    for v in &family.regions {
        let part = match property {
            Property::VNI | Property::NI | Property::LocallyNI => check_vni(t, v, g, tol)?,
            Property::Locates => check_locates(t, v, None, g, tol)?,
            Property::Identifies => check_identifies(t, v, g, tol)?,
            Property::VRepresentable => check_v_representable(t, v, g, tol)?,
            Property::ConditionC => check_condition_c(t, v, g, tol)?,
            Property::Monotone => is_monotone(&restrict(t, v)?, g, tol)?,
            Property::MaximalOnGrid => check_maximal_on_grid(t, v, g, tol)?,
            Property::LowRepresentable => unreachable!(),
        };
        verdict.approximate |= part.approximate;
        if !part.value && verdict.witnesses.is_empty() {
            verdict.witnesses = part.witnesses;
            verdict.detail = Some(format!(
                "first failing region {v}{}",
                part.detail.map(|d| format!("; {d}")).unwrap_or_default()
            ));
        }
    }
    Ok(verdict.settle())
}

/// Every grid point of the `[ψ_T = c]` band has a family member around its
/// primal on which `T` is V-representable.
fn low_representable<S: Scalar>(
    t: &OperatorHandle<S>,
    family: &RegionFamily<S>,
    g: &GridSpec<S>,
    tol: &Tolerance<S>,
) -> Result<Verdict<S>> {
    let ambient = Region::ambient(t.dim());
    let ids = family.regions.iter().map(|r| r.to_string()).collect();
    let mut verdict = Verdict::new(Property::LowRepresentable, g, tol, ids);
    let psi = psi_envelope(t, &ambient, g, tol)?;
    verdict.approximate = !psi.exact;
    let mut cache: BTreeMap<usize, bool> = BTreeMap::new();
    for z in primal_dual_grid(&ambient, g) {
        if !psi.function.eval(&z)?.eq_within(coupling(&z), tol.eps_eq) {
            continue;
        }
        let mut found = false;
        for (i, v) in family.regions.iter().enumerate() {
            if !v.contains(z.x())? {
                continue;
            }
            let ok = match cache.get(&i) {
                Some(&ok) => ok,
                None => {
                    let part = check_v_representable(t, v, g, tol)?;
                    verdict.approximate |= part.approximate;
                    cache.insert(i, part.value);
                    part.value
                }
            };
            if ok {
                found = true;
                break;
            }
        }
        if !found {
            verdict.witnesses.push(z);
        }
    }
    Ok(verdict.settle())
}

/// Largest violation of pairwise monotonicity in a point set, as
/// `(gap, i, j)`, or `None` when every gap is at least `-eps`.
pub fn worst_pair<S: Scalar>(
    pts: &[PrimalDualPoint<S>],
    eps: S,
) -> Result<Option<(S, usize, usize)>> {
    let mut worst: Option<(S, usize, usize)> = None;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let gap = monotone_gap(&pts[i], &pts[j])?;
            if gap < -eps && worst.map_or(true, |(w, _, _)| gap < w) {
                worst = Some((gap, i, j));
            }
        }
    }
    Ok(worst)
}

//! The run-spec format: `key: value` lines, nested by indentation, `#`
//! comments. Every key is checked against a fixed schema.
//!
//! ```text
//! operator:
//!   kind: flat
//!   region: (0, 1)
//!   wstar: [0]
//! regions:
//!   v: (0, 1)
//!   vbar: [0, 1]
//! grid:
//!   resolution: 41
//! check:
//!   property: locates
//!   region: vbar
//! ```

use std::collections::BTreeMap;

use crate::classify::Property;
use crate::duality::{PrimalDualPoint, Tolerance};
use crate::error::{Error, Result};
use crate::operators::OperatorHandle;
use crate::regions::{Bound, GridSpec, Interval, Region};

/// Where a check's regions come from.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    /// Dyadic open boxes of `[lo, hi]ⁿ` at `scales` scales.
    Dyadic { lo: f64, hi: f64, scales: u32 },
    /// Named regions from the `regions` block.
    Named(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckSpec {
    pub property: Property,
    /// Named region; `None` means the whole space.
    pub region: Option<String>,
    /// Target set for `locates`.
    pub target: Option<String>,
    pub family: Option<FamilySpec>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub regions: BTreeMap<String, Region<f64>>,
    pub grid: GridSpec<f64>,
    pub tol: Tolerance<f64>,
    pub checks: Vec<CheckSpec>,
}

impl RunConfig {
    /// A named region, or the whole space for `None`.
    pub fn region(&self, name: Option<&str>, dim: usize) -> Result<Region<f64>> {
        match name {
            None => Ok(Region::ambient(dim)),
            Some(n) => self
                .regions
                .get(n)
                .cloned()
                .ok_or_else(|| Error::InvalidRegion(format!("unknown region `{n}`"))),
        }
    }
}

#[derive(Debug)]
struct Node {
    key: String,
    value: String,
    line: usize,
    key_col: usize,
    value_col: usize,
    children: Vec<Node>,
}

impl Node {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.key_col,
            message: message.into(),
        }
    }

    fn value_err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.value_col,
            message: message.into(),
        }
    }

    fn scalar(&self) -> Result<&str> {
        if !self.children.is_empty() {
            return Err(self.err(format!("`{}` takes a value, not a block", self.key)));
        }
        if self.value.is_empty() {
            return Err(self.value_err(format!("`{}` needs a value", self.key)));
        }
        Ok(&self.value)
    }

    fn block(&self) -> Result<&[Node]> {
        if !self.value.is_empty() {
            return Err(self.value_err(format!("`{}` opens a block; put entries on indented lines", self.key)));
        }
        Ok(&self.children)
    }

    fn number(&self) -> Result<f64> {
        parse_number(self.scalar()?).ok_or_else(|| self.value_err(format!("expected a number, got `{}`", self.value)))
    }

    fn count(&self) -> Result<usize> {
        self.scalar()?
            .parse()
            .map_err(|_| self.value_err(format!("expected a non-negative integer, got `{}`", self.value)))
    }

    fn json<T: serde::de::DeserializeOwned>(&self, what: &str) -> Result<T> {
        serde_json::from_str(self.scalar()?).map_err(|e| self.value_err(format!("expected {what}: {e}")))
    }

    /// Wraps an error raised while interpreting this node's value.
    fn wrap(&self, e: Error) -> Error {
        match e {
            Error::Parse { .. } => e,
            other => self.value_err(other.to_string()),
        }
    }
}

fn tree(text: &str) -> Result<Vec<Node>> {
    let mut flat: Vec<(usize, Node)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.trim_end();
        let content = body.trim_start();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let indent = body.len() - content.len();
        if body[..indent].contains('\t') {
            return Err(Error::Parse {
                line,
                column: 1,
                message: "tabs are not allowed in indentation".into(),
            });
        }
        let Some(colon) = content.find(':') else {
            return Err(Error::Parse {
                line,
                column: indent + 1,
                message: "expected `key: value`".into(),
            });
        };
        let key = content[..colon].trim_end();
        if key.is_empty() {
            return Err(Error::Parse {
                line,
                column: indent + 1,
                message: "empty key".into(),
            });
        }
        let rest = &content[colon + 1..];
        let value = rest.trim();
        let value_col = indent + colon + 2 + (rest.len() - rest.trim_start().len());
        flat.push((
            indent,
            Node {
                key: key.to_string(),
                value: value.to_string(),
                line,
                key_col: indent + 1,
                value_col,
                children: Vec::new(),
            },
        ));
    }
    let mut items: Vec<_> = flat.into_iter().map(Some).collect();
    nest(&mut items, &mut 0, 0)
}

fn nest(items: &mut [Option<(usize, Node)>], pos: &mut usize, indent: usize) -> Result<Vec<Node>> {
    let mut out: Vec<Node> = Vec::new();
    while *pos < items.len() {
        let level = items[*pos].as_ref().expect("unconsumed").0;
        if level < indent {
            break;
        }
        if level > indent {
            let node = &items[*pos].as_ref().expect("unconsumed").1;
            let Some(parent) = out.last_mut() else {
                return Err(node.err("unexpected indentation"));
            };
            if !parent.children.is_empty() {
                return Err(node.err("inconsistent indentation"));
            }
            parent.children = nest(items, pos, level)?;
            continue;
        }
        let (_, node) = items[*pos].take().expect("unconsumed");
        *pos += 1;
        out.push(node);
    }
    Ok(out)
}

pub(crate) fn parse_number(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "+inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        t => t.parse().ok().filter(|v: &f64| v.is_finite()),
    }
}

/// Region literal: `ambient`, `empty`, a product of intervals such as
/// `(0, 1] x [-1, inf)`, `halfspace [1, 0] <= 1`, or `polytope [[0, 0], ..]`.
pub fn parse_region(text: &str, dim: usize) -> Result<Region<f64>> {
    let t = text.trim();
    let bad = |m: String| Error::InvalidRegion(m);
    if t == "ambient" {
        return Ok(Region::ambient(dim));
    }
    if t == "empty" {
        return Ok(Region::Empty { dim });
    }
    let region = if let Some(rest) = t.strip_prefix("polytope") {
        let vertices: Vec<Vec<f64>> =
            serde_json::from_str(rest.trim()).map_err(|e| bad(format!("polytope vertices: {e}")))?;
        Region::polytope(vertices)?
    } else if let Some(rest) = t.strip_prefix("halfspace") {
        let (normal, offset, closed) = if let Some((n, b)) = rest.split_once("<=") {
            (n, b, true)
        } else if let Some((n, b)) = rest.split_once('<') {
            (n, b, false)
        } else {
            return Err(bad("halfspace needs `<=` or `<`".into()));
        };
        let normal: Vec<f64> =
            serde_json::from_str(normal.trim()).map_err(|e| bad(format!("halfspace normal: {e}")))?;
        let offset = parse_number(offset).ok_or_else(|| bad(format!("halfspace offset `{}`", offset.trim())))?;
        Region::half_space(normal, offset, closed)?
    } else {
        let axes = t
            .split(" x ")
            .map(parse_interval)
            .collect::<Result<Vec<_>>>()?;
        Region::Box(axes)
    };
    if region.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: region.dim(),
        });
    }
    Ok(region)
}

fn parse_interval(text: &str) -> Result<Interval<f64>> {
    let t = text.trim();
    let bad = || Error::InvalidRegion(format!("malformed interval `{t}`"));
    if t.len() < 2 {
        return Err(bad());
    }
    let (open_lo, open_hi) = match (&t[..1], &t[t.len() - 1..]) {
        ("(", ")") => (true, true),
        ("(", "]") => (true, false),
        ("[", ")") => (false, true),
        ("[", "]") => (false, false),
        _ => return Err(bad()),
    };
    let (a, b) = t[1..t.len() - 1].split_once(',').ok_or_else(bad)?;
    let a = parse_number(a).ok_or_else(bad)?;
    let b = parse_number(b).ok_or_else(bad)?;
    let bound = |v: f64, open: bool, lower: bool| -> Result<Bound<f64>> {
        if v.is_infinite() {
            if (v < 0.0) != lower || !open {
                return Err(bad());
            }
            Ok(Bound::Unbounded)
        } else if open {
            Ok(Bound::Open(v))
        } else {
            Ok(Bound::Closed(v))
        }
    };
    Interval::new(bound(a, open_lo, true)?, bound(b, open_hi, false)?)
}

fn reject_unknown(nodes: &[Node], allowed: &[&str], context: &str) -> Result<()> {
    for n in nodes {
        if !allowed.contains(&n.key.as_str()) {
            return Err(n.err(format!("unknown key `{}` in {context}", n.key)));
        }
    }
    let mut seen: Vec<&str> = Vec::new();
    for n in nodes {
        if seen.contains(&n.key.as_str()) {
            return Err(n.err(format!("duplicate key `{}` in {context}", n.key)));
        }
        seen.push(&n.key);
    }
    Ok(())
}

fn find<'a>(nodes: &'a [Node], key: &str) -> Option<&'a Node> {
    nodes.iter().find(|n| n.key == key)
}

fn require<'a>(parent: &Node, nodes: &'a [Node], key: &str) -> Result<&'a Node> {
    find(nodes, key).ok_or_else(|| parent.err(format!("`{}` is missing `{key}`", parent.key)))
}

fn parse_operator(node: &Node) -> Result<OperatorHandle<f64>> {
    let body = node.block()?;
    let kind = require(node, body, "kind")?;
    let allowed: &[&str] = match kind.scalar()? {
        "finite_graph" => &["kind", "points"],
        "flat" => &["kind", "region", "wstar"],
        "normal_cone_box" => &["kind", "box"],
        "abs_subdiff" => &["kind", "scale"],
        "point_complement" => &["kind", "x0"],
        "linear" => &["kind", "matrix"],
        other => return Err(kind.value_err(format!("unknown operator kind `{other}`"))),
    };
    reject_unknown(body, allowed, "operator")?;
    match kind.value.as_str() {
        "finite_graph" => {
            let pts = require(node, body, "points")?;
            let rows: Vec<Vec<f64>> = pts.json("a JSON list of [x.., xstar..] rows")?;
            let points = rows
                .into_iter()
                .map(|r| {
                    if r.is_empty() || r.len() % 2 != 0 {
                        return Err(pts.value_err("each point row needs 2n coordinates"));
                    }
                    PrimalDualPoint::from_flat(&r).map_err(|e| pts.wrap(e))
                })
                .collect::<Result<Vec<_>>>()?;
            if points.is_empty() {
                return Err(pts.value_err("a finite graph needs at least one point"));
            }
            OperatorHandle::finite_graph(points).map_err(|e| pts.wrap(e))
        }
        "flat" => {
            let wstar_node = require(node, body, "wstar")?;
            let wstar: Vec<f64> = wstar_node.json("a JSON list of numbers")?;
            let region_node = require(node, body, "region")?;
            let region = parse_region(region_node.scalar()?, wstar.len()).map_err(|e| region_node.wrap(e))?;
            OperatorHandle::flat(region, wstar).map_err(|e| node.wrap(e))
        }
        "normal_cone_box" => {
            let b = require(node, body, "box")?;
            let text = b.scalar()?;
            let dim = text.split(" x ").count();
            let region = parse_region(text, dim).map_err(|e| b.wrap(e))?;
            OperatorHandle::normal_cone_box(region).map_err(|e| b.wrap(e))
        }
        "abs_subdiff" => {
            let s = require(node, body, "scale")?;
            OperatorHandle::abs_subdiff(s.number()?).map_err(|e| s.wrap(e))
        }
        "point_complement" => {
            let x = require(node, body, "x0")?;
            OperatorHandle::point_complement(x.json("a JSON list of numbers")?).map_err(|e| x.wrap(e))
        }
        _ => {
            let m = require(node, body, "matrix")?;
            OperatorHandle::linear(m.json("a JSON matrix")?).map_err(|e| m.wrap(e))
        }
    }
}

fn parse_grid(node: &Node) -> Result<GridSpec<f64>> {
    let body = node.block()?;
    reject_unknown(body, &["resolution", "dual_bound", "dual_resolution", "primal_bound"], "grid")?;
    let p = GridSpec::<f64>::pinned();
    let resolution = find(body, "resolution").map(Node::count).transpose()?.unwrap_or(p.resolution);
    let dual_resolution = find(body, "dual_resolution")
        .map(Node::count)
        .transpose()?
        .unwrap_or(p.dual_resolution);
    let dual_bound = find(body, "dual_bound").map(Node::number).transpose()?.unwrap_or(p.dual_bound);
    let primal_bound = find(body, "primal_bound").map(Node::number).transpose()?.unwrap_or(p.primal_bound);
    GridSpec::new(resolution, dual_bound, dual_resolution, primal_bound).map_err(|e| node.wrap(e))
}

fn parse_tolerance(node: &Node) -> Result<Tolerance<f64>> {
    let body = node.block()?;
    reject_unknown(body, &["eps_eq", "eps_strict", "delta_dom"], "tolerance")?;
    let p = Tolerance::<f64>::pinned();
    let get = |k: &str, d: f64| find(body, k).map(Node::number).transpose().map(|v| v.unwrap_or(d));
    Tolerance::new(get("eps_eq", p.eps_eq)?, get("eps_strict", p.eps_strict)?, get("delta_dom", p.delta_dom)?)
        .map_err(|e| node.wrap(e))
}

fn parse_check(node: &Node, regions: &BTreeMap<String, Region<f64>>) -> Result<CheckSpec> {
    let body = node.block()?;
    reject_unknown(body, &["property", "region", "target", "family"], "check")?;
    let prop = require(node, body, "property")?;
    let property = Property::from_name(prop.scalar()?)
        .ok_or_else(|| prop.value_err(format!("unknown property `{}`", prop.value)))?;
    let named = |key: &str| -> Result<Option<String>> {
        match find(body, key) {
            None => Ok(None),
            Some(n) => {
                let name = n.scalar()?;
                if name != "ambient" && !regions.contains_key(name) {
                    return Err(n.value_err(format!("unknown region `{name}`")));
                }
                Ok((name != "ambient").then(|| name.to_string()))
            }
        }
    };
    let region = named("region")?;
    let target = named("target")?;
    if target.is_some() && property != Property::Locates {
        return Err(require(node, body, "target")?.err("`target` only applies to `locates`"));
    }
    let family = match find(body, "family") {
        None => None,
        Some(f) => Some(parse_family(f, regions)?),
    };
    let needs_family = matches!(property, Property::LocallyNI | Property::LowRepresentable);
    if needs_family && family.is_none() {
        return Err(prop.value_err(format!("`{}` needs a `family`", prop.value)));
    }
    if family.is_some() && region.is_some() {
        return Err(node.err("give either `region` or `family`, not both"));
    }
    Ok(CheckSpec {
        property,
        region,
        target,
        family,
        line: node.line,
    })
}

/// `dyadic <lo> <hi> <scales>` or a comma-separated list of region names.
fn parse_family(node: &Node, regions: &BTreeMap<String, Region<f64>>) -> Result<FamilySpec> {
    let text = node.scalar()?;
    if let Some(rest) = text.strip_prefix("dyadic") {
        let parts: Vec<&str> = rest.split_whitespace().collect();
        let bad = || node.value_err("expected `dyadic <lo> <hi> <scales>`");
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo = parse_number(parts[0]).ok_or_else(bad)?;
        let hi = parse_number(parts[1]).ok_or_else(bad)?;
        let scales = parts[2].parse().map_err(|_| bad())?;
        return Ok(FamilySpec::Dyadic { lo, hi, scales });
    }
    let names: Vec<String> = text.split(',').map(|s| s.trim().to_string()).collect();
    for n in &names {
        if !regions.contains_key(n) {
            return Err(node.value_err(format!("unknown region `{n}`")));
        }
    }
    Ok(FamilySpec::Named(names))
}

/// Parses a run spec into its config and operator.
pub fn parse_spec(text: &str) -> Result<(RunConfig, OperatorHandle<f64>)> {
    let roots = tree(text)?;
    for n in &roots {
        if !["operator", "regions", "grid", "tolerance", "check"].contains(&n.key.as_str()) {
            return Err(n.err(format!("unknown top-level key `{}`", n.key)));
        }
        if n.key != "check" && roots.iter().filter(|m| m.key == n.key).count() > 1 {
            let dup = roots.iter().filter(|m| m.key == n.key).nth(1).expect("two");
            return Err(dup.err(format!("duplicate key `{}`", n.key)));
        }
    }
    let op_node = find(&roots, "operator").ok_or(Error::Parse {
        line: 1,
        column: 1,
        message: "missing `operator` block".into(),
    })?;
    let op = parse_operator(op_node)?;
    let mut regions = BTreeMap::new();
    if let Some(block) = find(&roots, "regions") {
        let body = block.block()?;
        for r in body {
            if r.key == "ambient" {
                return Err(r.err("`ambient` is reserved"));
            }
            if regions.contains_key(&r.key) {
                return Err(r.err(format!("duplicate region `{}`", r.key)));
            }
            let region = parse_region(r.scalar()?, op.dim()).map_err(|e| r.wrap(e))?;
            regions.insert(r.key.clone(), region);
        }
    }
    let grid = match find(&roots, "grid") {
        Some(n) => parse_grid(n)?,
        None => GridSpec::pinned(),
    };
    let tol = match find(&roots, "tolerance") {
        Some(n) => parse_tolerance(n)?,
        None => Tolerance::pinned(),
    };
    let checks = roots
        .iter()
        .filter(|n| n.key == "check")
        .map(|n| parse_check(n, &regions))
        .collect::<Result<Vec<_>>>()?;
    Ok((
        RunConfig {
            regions,
            grid,
            tol,
            checks,
        },
        op,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_finite_graph() {
        let (cfg, op) = parse_spec(
            "operator:\n  kind: finite_graph\n  points: [[-1, -1], [0, 0], [1, 1]]\ncheck:\n  property: monotone\n",
        )
        .unwrap();
        assert_eq!(op.graph_len(), Some(3));
        assert_eq!(cfg.checks.len(), 1);
        assert_eq!(cfg.grid, GridSpec::pinned());
    }

    #[test]
    fn reversed_box_is_rejected() {
        let err = parse_spec("operator:\n  kind: normal_cone_box\n  box: [1, -1]\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, column: 8, .. }), "{err}");
    }

    #[test]
    fn flat_operator() {
        let (_, op) = parse_spec("operator:\n  kind: flat\n  region: (0, 1)\n  wstar: [0]\n").unwrap();
        assert_eq!(op, OperatorHandle::flat(Region::open_interval(0.0, 1.0).unwrap(), vec![0.0]).unwrap());
    }

    #[test]
    fn unknown_keys_are_located() {
        let err = parse_spec("operator:\n  kind: abs_subdiff\n  scale: 1\n  colour: red\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, column: 3, .. }), "{err}");
        let err = parse_spec("operator:\n  kind: abs_subdiff\n  scale: 1\nplot: yes\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, column: 1, .. }), "{err}");
    }

    #[test]
    fn structural_errors() {
        for bad in [
            "",
            "operator:\n  kind: abs_subdiff\n    scale: 1\n",
            "operator\n",
            "operator:\n\tkind: abs_subdiff\n",
            "operator:\n  kind: finite_graph\n  points: [[0, 0, 1]]\n",
            "operator:\n  kind: abs_subdiff\n  scale: 1\ncheck:\n  property: locates\n  region: nowhere\n",
            "operator:\n  kind: abs_subdiff\n  scale: 1\ncheck:\n  property: sparkly\n",
            "operator:\n  kind: abs_subdiff\n  scale: 1\ngrid:\n  resolution: 1\n",
        ] {
            assert!(matches!(parse_spec(bad), Err(Error::Parse { .. })), "{bad:?}");
        }
    }

    #[test]
    fn region_literals() {
        let r = parse_region("(0, 1] x [-1, inf)", 2).unwrap();
        assert_eq!(r.to_string(), "(0, 1] x [-1, inf)");
        assert!(parse_region("ambient", 3).unwrap().is_ambient());
        assert!(parse_region("polytope [[0, 0], [1, 0], [0, 1]]", 2).unwrap().contains(&[0.2, 0.2]).unwrap());
        assert!(parse_region("halfspace [1, 0] <= 1", 2).unwrap().contains(&[1.0, 5.0]).unwrap());
        assert!(parse_region("[0, 1]", 2).is_err());
        assert!(parse_region("[-inf, 0]", 1).is_err());
        assert!(parse_region("(0 1)", 1).is_err());
    }

    #[test]
    fn checks_and_families() {
        let text = "operator:\n  kind: flat\n  region: (0, 1)\n  wstar: [0]\nregions:\n  v: (0, 1)\n  vbar: [0, 1]\n\
                    check:\n  property: locates\n  region: vbar\n  target: v\n\
                    check:\n  property: locally_ni\n  family: dyadic -2 2 3\n\
                    check:\n  property: identifies\n  family: v, vbar\n";
        let (cfg, _) = parse_spec(text).unwrap();
        assert_eq!(cfg.checks.len(), 3);
        assert_eq!(cfg.checks[0].target.as_deref(), Some("v"));
        assert_eq!(cfg.checks[1].family, Some(FamilySpec::Dyadic { lo: -2.0, hi: 2.0, scales: 3 }));
        assert_eq!(cfg.checks[2].family, Some(FamilySpec::Named(vec!["v".into(), "vbar".into()])));
    }
}

//! Plain-text reports: `[section]` headers followed by `key = value` lines
//! in sorted key order. Numbers carry 12 significant digits.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::classify::Verdict;
use crate::duality::{ExtReal, PrimalDualPoint};
use crate::scalar::Scalar;

/// Witnesses listed per verdict; the full count is reported separately.
pub const WITNESS_LIMIT: usize = 50;

/// Formats like C's `%.12g`, with `inf`, `-inf` and `nan` literals.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..12).contains(&exp) {
        trim_zeros(&format!("{v:.*}", (11 - exp) as usize))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn fmt_ext<S: Scalar>(v: ExtReal<S>) -> String {
    fmt_num(v.to_scalar().as_f64())
}

fn fmt_coords<S: Scalar>(v: &[S]) -> String {
    v.iter().map(|c| fmt_num(c.as_f64())).collect::<Vec<_>>().join(", ")
}

/// `(x, x*)` in one dimension, `((x1, x2), (x1*, x2*))` otherwise.
pub fn fmt_point<S: Scalar>(z: &PrimalDualPoint<S>) -> String {
    if z.dim() == 1 {
        format!("({}, {})", fmt_num(z.x()[0].as_f64()), fmt_num(z.xstar()[0].as_f64()))
    } else {
        format!("(({}), ({}))", fmt_coords(z.x()), fmt_coords(z.xstar()))
    }
}

pub fn fmt_points<S: Scalar>(pts: &[PrimalDualPoint<S>], limit: usize) -> String {
    let shown: Vec<String> = pts.iter().take(limit).map(fmt_point).collect();
    let more = if pts.len() > limit { ", ..." } else { "" };
    format!("[{}{more}]", shown.join(", "))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Section {
    pub name: String,
    pub entries: BTreeMap<String, String>,
}

impl Section {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            entries: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.entries.insert(key.to_string(), value.to_string());
        self
    }

    /// Adds the fields of a verdict under `prefix`.
    pub fn verdict<S: Scalar>(&mut self, prefix: &str, v: &Verdict<S>) -> &mut Self {
        let k = |s: &str| if prefix.is_empty() { s.to_string() } else { format!("{prefix}.{s}") };
        self.set(&k("property"), v.property.name());
        self.set(&k("value"), v.value);
        self.set(&k("approximate"), v.approximate);
        self.set(&k("vacuous"), v.vacuous);
        self.set(&k("region_ids"), format!("[{}]", v.region_ids.join("; ")));
        self.set(&k("witness_count"), v.witnesses.len());
        self.set(&k("witnesses"), fmt_points(&v.witnesses, WITNESS_LIMIT));
        if let Some(d) = &v.detail {
            self.set(&k("detail"), d);
        }
        self.set(&k("grid.resolution"), v.grid.resolution);
        self.set(&k("grid.dual_resolution"), v.grid.dual_resolution);
        self.set(&k("grid.dual_bound"), fmt_num(v.grid.dual_bound.as_f64()));
        self.set(&k("grid.primal_bound"), fmt_num(v.grid.primal_bound.as_f64()));
        self.set(&k("tol.eps_eq"), fmt_num(v.tol.eps_eq.as_f64()));
        self.set(&k("tol.eps_strict"), fmt_num(v.tol.eps_strict.as_f64()));
        self.set(&k("tol.delta_dom"), fmt_num(v.tol.delta_dom.as_f64()));
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub title: String,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            sections: Vec::new(),
        }
    }

    pub fn push(&mut self, s: Section) {
        self.sections.push(s);
    }

    pub fn render(&self) -> String {
        let mut out = format!("# {}\n", self.title);
        for s in &self.sections {
            let _ = write!(out, "\n[{}]\n", s.name);
            for (k, v) in &s.entries {
                let _ = writeln!(out, "{k} = {v}");
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-2.5), "-2.5");
        assert_eq!(fmt_num(0.1 + 0.2), "0.3");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(123456789012.0), "123456789012");
        assert_eq!(fmt_num(1234567890123.0), "1.23456789012e+12");
        assert_eq!(fmt_num(1e-9), "1e-09");
        assert_eq!(fmt_num(0.0001), "0.0001");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn render_sorts_keys() {
        let mut r = Report::new("t");
        let mut s = Section::new("a");
        s.set("zeta", 1).set("alpha", 2);
        r.push(s);
        assert_eq!(r.render(), "# t\n\n[a]\nalpha = 2\nzeta = 1\n");
    }

    #[test]
    fn points() {
        let z = PrimalDualPoint::new(vec![0.5, -1.0], vec![2.0, 0.0]).unwrap();
        assert_eq!(fmt_point(&z), "((0.5, -1), (2, 0))");
        assert_eq!(fmt_point(&PrimalDualPoint::scalar(0.0, 3.0)), "(0, 3)");
    }
}

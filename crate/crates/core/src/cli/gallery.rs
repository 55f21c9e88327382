//! Pinned scenarios with stated verdicts. Each claim records what was
//! expected, what the deciders returned, and whether they agree.

use crate::classify::{
    check_identifies, check_locates, check_maximal_on_grid, check_ni, check_v_representable, check_vni,
    family_scan, related_trace, Property, RegionFamily, Verdict,
};
use crate::duality::{coupling, ExtReal, PrimalDualPoint, Tolerance};
use crate::error::{Error, Result};
use crate::operators::OperatorHandle;
use crate::regions::{GridSpec, Region};
use crate::sumcalc::{add_normal_cone, verify_sum_representative, SumPartner};

use super::report::{fmt_ext, fmt_num, fmt_point, Report, Section};

pub const SCENARIOS: [&str; 5] = ["vbar", "point-complement", "normal-cone", "reprez", "sum"];

#[derive(Debug, Clone, PartialEq)]
pub struct Claim {
    pub scenario: &'static str,
    pub statement: String,
    pub expected: bool,
    pub expected_witness: Option<PrimalDualPoint<f64>>,
    pub outcome: std::result::Result<Verdict<f64>, String>,
}

impl Claim {
    pub fn passed(&self) -> bool {
        match &self.outcome {
            Ok(v) => {
                v.value == self.expected
                    && self.expected_witness.as_ref().map_or(true, |w| v.witnesses.contains(w))
            }
            Err(_) => false,
        }
    }
}

/// A scan reported for the record, with no expected value.
#[derive(Debug, Clone, PartialEq)]
pub struct Evidence {
    pub scenario: &'static str,
    pub statement: String,
    pub outcome: std::result::Result<Verdict<f64>, String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GalleryRun {
    pub claims: Vec<Claim>,
    pub evidence: Vec<Evidence>,
}

impl GalleryRun {
    pub fn failures(&self) -> usize {
        self.claims.iter().filter(|c| !c.passed()).count()
    }

    pub fn exit_code(&self) -> i32 {
        if self.failures() == 0 {
            0
        } else {
            1
        }
    }

    pub fn report(&self, name: &str) -> Report {
        let mut r = Report::new(format!("fitzcalc gallery {name}"));
        for (i, c) in self.claims.iter().enumerate() {
            let mut s = Section::new(format!("claim.{:02}.{}", i + 1, c.scenario));
            s.set("statement", &c.statement)
                .set("expected", c.expected)
                .set("pass", c.passed());
            if let Some(w) = &c.expected_witness {
                s.set("expected_witness", fmt_point(w));
            }
            match &c.outcome {
                Ok(v) => {
                    s.verdict("observed", v);
                }
                Err(e) => {
                    s.set("error", e);
                }
            }
            r.push(s);
        }
        for (i, e) in self.evidence.iter().enumerate() {
            let mut s = Section::new(format!("evidence.{:02}.{}", i + 1, e.scenario));
            s.set("statement", &e.statement);
            match &e.outcome {
                Ok(v) => {
                    s.verdict("observed", v);
                }
                Err(err) => {
                    s.set("error", err);
                }
            }
            r.push(s);
        }
        let mut summary = Section::new("summary");
        summary
            .set("claims", self.claims.len())
            .set("passed", self.claims.len() - self.failures())
            .set("failed", self.failures())
            .set("exit_code", self.exit_code());
        r.push(summary);
        r
    }
}

fn p(x: f64, xs: f64) -> PrimalDualPoint<f64> {
    PrimalDualPoint::scalar(x, xs)
}

fn open(a: f64, b: f64) -> Result<Region<f64>> {
    Region::open_interval(a, b)
}

fn closed(a: f64, b: f64) -> Result<Region<f64>> {
    Region::closed_interval(a, b)
}

struct Builder {
    run: GalleryRun,
    scenario: &'static str,
    grid: GridSpec<f64>,
    tol: Tolerance<f64>,
}

impl Builder {
    fn claim(&mut self, statement: &str, expected: bool, witness: Option<PrimalDualPoint<f64>>, v: Result<Verdict<f64>>) {
        self.run.claims.push(Claim {
            scenario: self.scenario,
            statement: statement.to_string(),
            expected,
            expected_witness: witness,
            outcome: v.map_err(|e| e.to_string()),
        });
    }

    fn evidence(&mut self, statement: &str, v: Result<Verdict<f64>>) {
        self.run.evidence.push(Evidence {
            scenario: self.scenario,
            statement: statement.to_string(),
            outcome: v.map_err(|e| e.to_string()),
        });
    }
}

fn vbar(b: &mut Builder) -> Result<()> {
    let t = OperatorHandle::flat(open(0.0, 1.0)?, vec![0.0])?;
    let (g, tol) = (b.grid, b.tol);
    b.claim(
        "(0, 1) identifies (0, 1) x {0}",
        true,
        None,
        check_identifies(&t, &open(0.0, 1.0)?, &g, &tol),
    );
    b.claim(
        "[0, 1] does not locate (0, 1) x {0}",
        false,
        Some(p(0.0, 0.0)),
        check_locates(&t, &closed(0.0, 1.0)?, None, &g, &tol),
    );
    Ok(())
}

fn point_complement(b: &mut Builder) -> Result<()> {
    let t = OperatorHandle::point_complement(vec![0.0])?;
    let (g, tol) = (b.grid, b.tol);
    let x = Region::ambient(1);
    b.claim("{0} x (X* \\ {0}) is located by X", true, None, check_locates(&t, &x, None, &g, &tol));
    b.claim(
        "{0} x (X* \\ {0}) is not identified by X",
        false,
        Some(p(0.0, 0.0)),
        check_identifies(&t, &x, &g, &tol),
    );
    let fam = RegionFamily::from_regions(vec![open(-1.0, 1.0)?, open(-0.5, 0.5)?], "open intervals around 0");
    b.claim(
        "open intervals around 0 locate {0} x (X* \\ {0})",
        true,
        None,
        family_scan(&t, &fam, Property::Locates, &g, &tol),
    );
    b.claim(
        "open intervals around 0 do not identify {0} x (X* \\ {0})",
        false,
        Some(p(0.0, 0.0)),
        family_scan(&t, &fam, Property::Identifies, &g, &tol),
    );
    Ok(())
}

fn normal_cone(b: &mut Builder) -> Result<()> {
    let c = closed(-1.0, 1.0)?;
    let interior = open(-1.0, 1.0)?;
    let nc = OperatorHandle::normal_cone_box(c)?;
    let standalone = OperatorHandle::flat(interior.clone(), vec![0.0])?;
    let (g, tol) = (b.grid, b.tol);
    b.claim("N_C is int C-NI for C = [-1, 1]", true, None, check_vni(&nc, &interior, &g, &tol));
    b.claim(
        "int C x {0} is not NI",
        false,
        Some(p(2.0, 3.0)),
        check_ni(&standalone, &g, &tol),
    );
    // φ of int C × {0} at (2, 3) against c = 6
    let z = p(2.0, 3.0);
    let phi = standalone.phi(&z, &Region::ambient(1), &g, &tol);
    let verdict = phi.map(|f| {
        let mut v = Verdict::new(Property::NI, &g, &tol, vec![interior.to_string()]);
        let c = coupling(&z);
        v.approximate = f.approximate;
        v.detail = Some(format!("phi={} c={}", fmt_ext(f.value), fmt_num(c)));
        if !(f.value == ExtReal::Finite(3.0) && c == 6.0) {
            v.witnesses.push(z.clone());
        }
        v.settle()
    });
    b.claim("phi(2, 3) = 3 < 6 = c for int C x {0}", true, None, verdict);
    Ok(())
}

fn reprez(b: &mut Builder) -> Result<()> {
    let (g, tol) = (b.grid, b.tol);
    // (X ∖ {0}) × {0} on the lattices of X and of V = (1, 2)
    let v = open(1.0, 2.0)?;
    let mut pts: Vec<_> = Region::ambient(1)
        .grid_sample(&g)
        .into_iter()
        .chain(v.grid_sample(&g))
        .filter(|x| x[0] != 0.0)
        .map(|x| p(x[0], 0.0))
        .collect();
    pts.sort_by(|a, b| a.lex_cmp(b));
    pts.dedup();
    let t = OperatorHandle::finite_graph(pts)?;
    b.claim(
        "(X \\ {0}) x {0} is V-representable on V = (1, 2)",
        true,
        None,
        check_v_representable(&t, &v, &g, &tol),
    );
    b.claim(
        "(X \\ {0}) x {0} is not representable",
        false,
        Some(p(0.0, 0.0)),
        check_v_representable(&t, &Region::ambient(1), &g, &tol),
    );
    Ok(())
}

fn sum(b: &mut Builder) -> Result<()> {
    let (g, tol) = (b.grid, b.tol);
    let a = OperatorHandle::abs_subdiff(1.0)?;
    let c = closed(0.0, 2.0)?;
    let partner_box = OperatorHandle::normal_cone_box(c.clone())?;
    b.claim(
        "rho represents |.|' + N_C on [-1, 3], C = [0, 2]",
        true,
        None,
        verify_sum_representative(&a, &SumPartner::NormalCone(c.clone()), &closed(-1.0, 3.0)?, &g, &tol),
    );
    b.claim(
        "rho represents |.|' + N_C as a pair sum on (0, 2)",
        true,
        None,
        verify_sum_representative(&a, &SumPartner::Operator(partner_box), &open(0.0, 2.0)?, &g, &tol),
    );
    let sum = add_normal_cone(&a, &c, &g, &tol)?;
    let trace = (|| -> Result<Verdict<f64>> {
        let mut approximate = false;
        let of_sum = related_trace(&sum, &Region::ambient(1), &c, &g, &tol, &mut approximate)?;
        let of_restriction = related_trace(&a, &c, &c, &g, &tol, &mut approximate)?;
        let mut v = Verdict::new(Property::Monotone, &g, &tol, vec![c.to_string()]);
        v.approximate = approximate;
        v.detail = Some(format!("{} related points", of_sum.len()));
        v.witnesses = symmetric_difference(&of_sum, &of_restriction);
        Ok(v.settle())
    })();
    b.claim(
        "m.r. points of |.|' + N_C and of |.|' restricted to C agree on C x X*",
        true,
        None,
        trace,
    );
    b.evidence(
        "|.|' + N_C with C = [0, 2] is maximal on the grid",
        check_maximal_on_grid(&sum, &Region::ambient(1), &g, &tol),
    );
    Ok(())
}

pub(crate) fn symmetric_difference(a: &[PrimalDualPoint<f64>], b: &[PrimalDualPoint<f64>]) -> Vec<PrimalDualPoint<f64>> {
    let mut out: Vec<_> = a.iter().filter(|z| !b.contains(z)).cloned().collect();
    out.extend(b.iter().filter(|z| !a.contains(z)).cloned());
    out
}

/// Runs one scenario, or every scenario for `all`, at the pinned grid and
/// tolerances.
pub fn run_gallery(name: &str) -> Result<GalleryRun> {
    let names: Vec<&'static str> = if name == "all" {
        SCENARIOS.to_vec()
    } else {
        vec![*SCENARIOS
            .iter()
            .find(|s| **s == name)
            .ok_or_else(|| Error::UnknownScenario(name.to_string()))?]
    };
    let mut b = Builder {
        run: GalleryRun::default(),
        scenario: "",
        grid: GridSpec::pinned(),
        tol: Tolerance::pinned(),
    };
    for n in names {
        b.scenario = n;
        match n {
            "vbar" => vbar(&mut b)?,
            "point-complement" => point_complement(&mut b)?,
            "normal-cone" => normal_cone(&mut b)?,
            "reprez" => reprez(&mut b)?,
            _ => sum(&mut b)?,
        }
    }
    Ok(b.run)
}

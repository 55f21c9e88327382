//! CSV evaluations of `φ`, `ψ` or an explicit convex function over a
//! primal-dual grid.

use std::io::Write;

use crate::convex::ConvexFn;
use crate::duality::{ExtReal, Tolerance};
use crate::error::Result;
use crate::fitzpatrick::{psi_envelope, PhiEvaluator};
use crate::operators::OperatorHandle;
use crate::regions::{primal_dual_grid, GridSpec, Region};

use super::report::fmt_num;

/// What gets evaluated.
pub enum ExportSource<'a> {
    Phi(&'a OperatorHandle<f64>),
    Psi(&'a OperatorHandle<f64>),
    Function(&'a ConvexFn<f64>),
}

pub fn csv_header(dim: usize) -> String {
    if dim == 1 {
        "x,xstar,value".into()
    } else {
        let xs: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
        let ys: Vec<String> = (1..=dim).map(|i| format!("xstar{i}")).collect();
        format!("{},{},value", xs.join(","), ys.join(","))
    }
}

/// Writes the header and one row per point of `V × dual grid`, primal-major.
/// Returns the number of rows.
pub fn export_evaluations<W: Write>(
    out: &mut W,
    source: ExportSource<'_>,
    v: &Region<f64>,
    g: &GridSpec<f64>,
    tol: &Tolerance<f64>,
) -> Result<usize> {
    writeln!(out, "{}", csv_header(v.dim()))?;
    let points = primal_dual_grid(v, g);
    let phi;
    let psi;
    let eval: Box<dyn Fn(&crate::duality::PrimalDualPoint<f64>) -> Result<ExtReal<f64>>> = match source {
        ExportSource::Phi(t) => {
            phi = PhiEvaluator::new(t, &Region::ambient(t.dim()), g, tol)?;
            Box::new(|z| Ok(phi.eval(z)?.value))
        }
        ExportSource::Psi(t) => {
            psi = psi_envelope(t, &Region::ambient(t.dim()), g, tol)?;
            Box::new(|z| Ok(psi.eval(z)?.value))
        }
        ExportSource::Function(f) => Box::new(move |z| f.eval(z)),
    };
    for z in &points {
        let coords: Vec<String> = z.flat().iter().map(|&c| fmt_num(c)).collect();
        writeln!(out, "{},{}", coords.join(","), fmt_num(eval(z)?.to_scalar()))?;
    }
    Ok(points.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::PrimalDualPoint;

    #[test]
    fn phi_of_flat_is_abs_xstar() {
        let t = OperatorHandle::flat(Region::open_interval(-1.0, 1.0).unwrap(), vec![0.0]).unwrap();
        let g = GridSpec::new(5, 10.0, 5, 2.0).unwrap();
        let mut buf = Vec::new();
        let rows = export_evaluations(&mut buf, ExportSource::Phi(&t), &Region::ambient(1), &g, &Tolerance::pinned())
            .unwrap();
        assert_eq!(rows, 25);
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,xstar,value"));
        for line in lines {
            let f: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
            assert_eq!(f[2], f[1].abs());
        }
    }

    #[test]
    fn empty_grid_gives_header_only() {
        let t = OperatorHandle::abs_subdiff(1.0).unwrap();
        let mut buf = Vec::new();
        let rows = export_evaluations(
            &mut buf,
            ExportSource::Psi(&t),
            &Region::Empty { dim: 1 },
            &GridSpec::pinned(),
            &Tolerance::pinned(),
        )
        .unwrap();
        assert_eq!(rows, 0);
        assert_eq!(String::from_utf8(buf).unwrap(), "x,xstar,value\n");
    }

    #[test]
    fn infinities_and_header_in_two_dimensions() {
        assert_eq!(csv_header(2), "x1,x2,xstar1,xstar2,value");
        let f = ConvexFn::penot_envelope(&[PrimalDualPoint::scalar(0.0, 0.0)]);
        let mut buf = Vec::new();
        let g = GridSpec::new(3, 1.0, 3, 1.0).unwrap();
        export_evaluations(&mut buf, ExportSource::Function(&f), &Region::ambient(1), &g, &Tolerance::pinned()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("0,0,0\n"));
        assert!(text.contains("1,1,inf\n"));
    }
}

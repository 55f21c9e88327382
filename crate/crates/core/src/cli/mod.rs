//! Command-line front end: `classify`, `gallery` and `export`.

pub mod export;
pub mod gallery;
pub mod report;
pub mod spec;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::classify::{
    check_condition_c, check_identifies, check_locates, check_maximal_on_grid, check_ni, check_v_representable,
    check_vni, family_scan, Property, RegionFamily, Verdict,
};
use crate::error::{Error, Result};
use crate::operators::{is_monotone, restrict, OperatorHandle};
use crate::regions::GridSpec;

use export::{export_evaluations, ExportSource};
use report::{fmt_num, Report, Section};
use spec::{CheckSpec, FamilySpec, RunConfig};

pub use gallery::run_gallery;
pub use spec::parse_spec;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "fitzcalc", version, about = "Fitzpatrick functions and grid-scale property checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the checks listed in a spec file.
    Classify {
        #[arg(long)]
        spec: PathBuf,
        /// Report path, `-` for stdout.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a pinned scenario, or `all`.
    Gallery {
        #[arg(long)]
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write φ or ψ of the spec's operator on a grid as CSV.
    Export {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "fn", value_enum)]
        function: Selector,
        /// Points per axis, primal and dual.
        #[arg(long)]
        grid: usize,
        /// Named region from the spec; the whole space by default.
        #[arg(long)]
        region: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Selector {
    Phi,
    Psi,
}

/// A classify run: the report and its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyRun {
    pub report: Report,
    pub exit_code: i32,
}

fn run_check(op: &OperatorHandle<f64>, cfg: &RunConfig, check: &CheckSpec) -> Result<Verdict<f64>> {
    let (g, tol) = (&cfg.grid, &cfg.tol);
    if let Some(f) = &check.family {
        let family = match f {
            FamilySpec::Dyadic { lo, hi, scales } => RegionFamily::dyadic(op, *lo, *hi, *scales)?,
            FamilySpec::Named(names) => RegionFamily::from_regions(
                names
                    .iter()
                    .map(|n| cfg.region(Some(n), op.dim()))
                    .collect::<Result<_>>()?,
                &names.join(", "),
            ),
        };
        return family_scan(op, &family, check.property, g, tol);
    }
    let v = cfg.region(check.region.as_deref(), op.dim())?;
    match check.property {
        Property::Monotone => {
            if check.region.is_some() {
                is_monotone(&restrict(op, &v)?, g, tol)
            } else {
                is_monotone(op, g, tol)
            }
        }
        Property::VNI => check_vni(op, &v, g, tol),
        Property::NI => check_ni(op, g, tol),
        Property::Locates => {
            let target = check.target.as_deref().map(|t| cfg.region(Some(t), op.dim())).transpose()?;
            check_locates(op, &v, target.as_ref(), g, tol)
        }
        Property::Identifies => check_identifies(op, &v, g, tol),
        Property::VRepresentable => check_v_representable(op, &v, g, tol),
        Property::MaximalOnGrid => check_maximal_on_grid(op, &v, g, tol),
        Property::ConditionC => check_condition_c(op, &v, g, tol),
        Property::LocallyNI | Property::LowRepresentable => Err(Error::Unsupported(format!(
            "`{}` needs a region family",
            check.property.name()
        ))),
    }
}

fn config_section(op: &OperatorHandle<f64>, cfg: &RunConfig) -> Section {
    let mut s = Section::new("config");
    s.set("operator", op)
        .set("grid.resolution", cfg.grid.resolution)
        .set("grid.dual_resolution", cfg.grid.dual_resolution)
        .set("grid.dual_bound", fmt_num(cfg.grid.dual_bound))
        .set("grid.primal_bound", fmt_num(cfg.grid.primal_bound))
        .set("tol.eps_eq", fmt_num(cfg.tol.eps_eq))
        .set("tol.eps_strict", fmt_num(cfg.tol.eps_strict))
        .set("tol.delta_dom", fmt_num(cfg.tol.delta_dom));
    for (name, r) in &cfg.regions {
        s.set(&format!("region.{name}"), r);
    }
    s
}

/// Runs every check of a parsed spec. Gate errors become report entries.
pub fn run_classify(cfg: &RunConfig, op: &OperatorHandle<f64>) -> ClassifyRun {
    let mut report = Report::new("fitzcalc classify");
    report.push(config_section(op, cfg));
    let (mut failed, mut errors) = (0, 0);
    for (i, check) in cfg.checks.iter().enumerate() {
        let mut s = Section::new(format!("check.{:02}", i + 1));
        s.set("spec_line", check.line).set("requested", check.property.name());
        match run_check(op, cfg, check) {
            Ok(v) => {
                failed += usize::from(!v.value);
                s.set("status", if v.value { "pass" } else { "fail" });
                s.verdict("", &v);
            }
            Err(e) => {
                errors += 1;
                s.set("status", "error").set("error", e);
            }
        }
        report.push(s);
    }
    let exit_code = if errors > 0 {
        EXIT_ERROR
    } else if failed > 0 {
        EXIT_FAIL
    } else {
        EXIT_PASS
    };
    let mut summary = Section::new("summary");
    summary
        .set("checks", cfg.checks.len())
        .set("failed", failed)
        .set("errors", errors)
        .set("exit_code", exit_code);
    report.push(summary);
    ClassifyRun { report, exit_code }
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    if path.as_os_str() == "-" {
        std::io::stdout().write_all(text.as_bytes())?;
    } else {
        fs::write(path, text)?;
    }
    Ok(())
}

fn error_report(title: &str, e: &Error) -> String {
    let mut r = Report::new(title);
    let mut s = Section::new("error");
    s.set("message", e).set("exit_code", EXIT_ERROR);
    r.push(s);
    r.render()
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Classify { spec, out } => {
            let parsed = fs::read_to_string(&spec).map_err(Error::from).and_then(|t| parse_spec(&t));
            match parsed {
                Ok((cfg, op)) => {
                    let run = run_classify(&cfg, &op);
                    write_out(&out, &run.report.render())?;
                    Ok(run.exit_code)
                }
                Err(e) => {
                    write_out(&out, &error_report("fitzcalc classify", &e))?;
                    eprintln!("fitzcalc: {}: {e}", spec.display());
                    Ok(EXIT_ERROR)
                }
            }
        }
        Command::Gallery { name, out } => {
            let run = run_gallery(&name)?;
            write_out(&out, &run.report(&name).render())?;
            Ok(run.exit_code())
        }
        Command::Export {
            spec,
            function,
            grid,
            region,
            out,
        } => {
            let (cfg, op) = parse_spec(&fs::read_to_string(&spec)?)?;
            let g = GridSpec::new(grid, cfg.grid.dual_bound, grid, cfg.grid.primal_bound)?;
            let v = cfg.region(region.as_deref(), op.dim())?;
            let source = match function {
                Selector::Phi => ExportSource::Phi(&op),
                Selector::Psi => ExportSource::Psi(&op),
            };
            let mut buf = Vec::new();
            export_evaluations(&mut buf, source, &v, &g, &cfg.tol)?;
            write_out(&out, std::str::from_utf8(&buf).expect("ascii csv"))?;
            Ok(EXIT_PASS)
        }
    }
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fitzcalc: {e}");
            EXIT_ERROR
        }
    }
}

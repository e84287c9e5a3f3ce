//! Argument definitions and subcommand bodies.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use lgbeam::analytic::eval_lg_mode;
use lgbeam::decomposition::{decompose, oam_spectrum, ModalSpectrum};
use lgbeam::operators::{oam_expectation, synthesize_mode};
use lgbeam::propagation::{propagate, PropagationPlan};
use lgbeam::spectral::interpolate;
use lgbeam::{fidelity, BeamParams, Grid, ModeIndex};

use crate::error::{CliError, CliResult};
use crate::fieldfile::{read_field, write_field};
use crate::render::{write_pgm, Quantity};
use crate::verify::{run_suite, Rig, SUITES};

#[derive(Debug, Parser)]
#[command(name = "lgbeam", version, about = "Laguerre-Gauss beam modes, ladder operators and paraxial propagation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate an analytic LG mode and write it as a field file.
    Eval(ModeArgs),
    /// Build an LG mode by raising the fundamental mode and write it.
    Synthesize(ModeArgs),
    /// Propagate a field file through free space.
    Propagate(PropagateArgs),
    /// Project a field file onto the LG basis.
    Decompose(DecomposeArgs),
    /// Write intensity or phase of a field file as a 16-bit PGM image.
    Render(RenderArgs),
    /// Run an invariant suite and report measured values against tolerances.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct BeamArgs {
    /// Wavenumber.
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub k: f64,
    /// Rayleigh range.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub b: f64,
}

impl BeamArgs {
    fn params(&self) -> CliResult<BeamParams> {
        Ok(BeamParams::new(self.k, self.b)?)
    }
}

#[derive(Debug, Args)]
pub struct ModeArgs {
    /// Azimuthal index.
    #[arg(long, allow_negative_numbers = true)]
    pub l: i32,
    /// Radial index.
    #[arg(long, allow_negative_numbers = true)]
    pub p: i32,
    #[command(flatten)]
    pub beam: BeamArgs,
    /// Plane of evaluation.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub z: f64,
    /// Samples per axis.
    #[arg(long, default_value_t = lgbeam::grid::DEFAULT_SAMPLES)]
    pub n: usize,
    /// Grid half-width.
    #[arg(long, default_value_t = 8.0, allow_negative_numbers = true)]
    pub extent: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PropagateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Distance per step.
    #[arg(long, allow_negative_numbers = true)]
    pub dz: f64,
    #[arg(long, default_value_t = 1)]
    pub steps: u32,
    /// Zero-padding factor; chosen from the step length when omitted.
    #[arg(long)]
    pub padding: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub lmax: i64,
    #[arg(long, allow_negative_numbers = true)]
    pub pmax: i64,
    /// Also write the coefficients as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub what: Quantity,
    /// Output image, must end in `.pgm`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(value_parser = suite_names())]
    pub suite: String,
    #[arg(long, default_value_t = 3)]
    pub lmax: u32,
    #[arg(long, default_value_t = 3)]
    pub pmax: u32,
    #[arg(long, default_value_t = lgbeam::grid::DEFAULT_SAMPLES)]
    pub n: usize,
    /// Grid half-width at the waist.
    #[arg(long, default_value_t = 8.0, allow_negative_numbers = true)]
    pub extent: f64,
    #[command(flatten)]
    pub beam: BeamArgs,
}

fn suite_names() -> clap::builder::PossibleValuesParser {
    let mut names: Vec<&'static str> = SUITES.to_vec();
    names.push("all");
    clap::builder::PossibleValuesParser::new(names)
}

/// Parses `args` (program name first) and runs the subcommand. Clap's own
/// parse errors are returned as the `Err` of the outer result.
pub fn parse(args: impl IntoIterator<Item = OsString>) -> Result<Cli, clap::Error> {
    Cli::try_parse_from(args)
}

pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Eval(a) => cmd_eval(&a, out),
        Command::Synthesize(a) => cmd_synthesize(&a, out),
        Command::Propagate(a) => cmd_propagate(&a, out),
        Command::Decompose(a) => cmd_decompose(&a, out),
        Command::Render(a) => cmd_render(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e))
}

/// Zero below the printed precision, so `-0.000000000` never appears.
fn tidy(v: f64) -> f64 {
    if v.abs() < 5e-10 {
        0.0
    } else {
        v
    }
}

fn mode_grid(a: &ModeArgs) -> CliResult<(ModeIndex, BeamParams, Grid)> {
    Ok((ModeIndex::new(a.l, a.p)?, a.beam.params()?, Grid::new(a.n, a.extent)?))
}

fn cmd_eval(a: &ModeArgs, out: &mut dyn Write) -> CliResult<()> {
    let (idx, params, grid) = mode_grid(a)?;
    let field = eval_lg_mode(idx, &params, &grid, a.z)?;
    write_field(&a.out, &field)?;
    emit(out, &format!("norm={:.9} oam={:.9}\n", field.norm(), tidy(oam_expectation(&field)?)))
}

fn cmd_synthesize(a: &ModeArgs, out: &mut dyn Write) -> CliResult<()> {
    let (idx, params, grid) = mode_grid(a)?;
    let mut field = synthesize_mode(idx, &params, &grid)?;
    if a.z != 0.0 {
        field = propagate(&field, a.z, &PropagationPlan::for_step(&params, a.z))?;
    }
    let reference = eval_lg_mode(idx, &params, &grid, a.z)?;
    write_field(&a.out, &field)?;
    emit(
        out,
        &format!(
            "norm={:.9} oam={:.9} fidelity={:.9}\n",
            field.norm(),
            tidy(oam_expectation(&field)?),
            fidelity(&field, &reference)?
        ),
    )
}

fn cmd_propagate(a: &PropagateArgs, out: &mut dyn Write) -> CliResult<()> {
    if !a.dz.is_finite() {
        return Err(CliError::Usage(format!("--dz must be finite, got {}", a.dz)));
    }
    let start = read_field(&a.input)?;
    let plan = match a.padding {
        Some(p) => PropagationPlan::new(p)?,
        None => PropagationPlan::for_step(start.params(), a.dz),
    };
    let mut field = start.clone();
    for _ in 0..a.steps {
        field = propagate(&field, a.dz, &plan)?;
    }
    write_field(&a.out, &field)?;
    let axis_before = interpolate(&start, 0.0, 0.0).norm();
    let axis_after = interpolate(&field, 0.0, 0.0).norm();
    let ratio = if axis_before > 0.0 {
        format!("{:.9}", axis_after / axis_before)
    } else {
        "nan".into()
    };
    emit(
        out,
        &format!(
            "z={} -> {}\nnorm_before={:.12} norm_after={:.12}\non_axis_ratio={ratio}\n",
            start.z(),
            field.z(),
            start.norm(),
            field.norm()
        ),
    )
}

pub fn spectrum_csv(s: &ModalSpectrum) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| CliError::io("<csv>", std::io::Error::other(e));
    w.write_record(["l", "p", "re", "im", "power"]).map_err(to_err)?;
    for (idx, c) in s.entries() {
        w.write_record([
            idx.l().to_string(),
            idx.p().to_string(),
            c.re.to_string(),
            c.im.to_string(),
            c.norm_sqr().to_string(),
        ])
        .map_err(to_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::io("<csv>", std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

fn window_bound(name: &str, v: i64) -> CliResult<u32> {
    u32::try_from(v).map_err(|_| CliError::Usage(format!("--{name} must be a non-negative integer, got {v}")))
}

fn cmd_decompose(a: &DecomposeArgs, out: &mut dyn Write) -> CliResult<()> {
    let lmax = window_bound("lmax", a.lmax)?;
    let pmax = window_bound("pmax", a.pmax)?;
    let field = read_field(&a.input)?;
    let d = decompose(&field, lmax, pmax)?;
    let mut text = format!("{:>4} {:>3} {:>16} {:>16} {:>14}\n", "l", "p", "re", "im", "power");
    for (idx, c) in d.spectrum.entries() {
        text += &format!(
            "{:>4} {:>3} {:>16.9e} {:>16.9e} {:>14.9}\n",
            idx.l(),
            idx.p(),
            c.re,
            c.im,
            c.norm_sqr()
        );
    }
    text += &format!(
        "field_power={:.9} captured={:.9} residual={:.3e}\n",
        d.field_power,
        d.captured_power(),
        d.residual_power()
    );
    if d.basis_mismatch {
        text += "note: field parameters differ from the basis; coefficients are basis-relative\n";
    }
    let oam = oam_spectrum(&d.spectrum);
    text += "oam spectrum\n";
    for (l, p) in &oam.power {
        text += &format!("{l:>4} {p:>14.9}\n");
    }
    if let Some(mean) = oam.mean {
        text += &format!("mean_l={mean:.9}\n");
    }
    if let Some(path) = &a.csv {
        fs::write(path, spectrum_csv(&d.spectrum)?).map_err(|e| CliError::io(path, e))?;
    }
    emit(out, &text)
}

fn cmd_render(a: &RenderArgs, _out: &mut dyn Write) -> CliResult<()> {
    if a.out.extension().and_then(|e| e.to_str()) != Some("pgm") {
        return Err(CliError::Usage(format!("--out must end in .pgm, got {}", a.out.display())));
    }
    let field = read_field(&a.input)?;
    write_pgm(&a.out, &field, a.what)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CliResult<()> {
    let params = a.beam.params()?;
    let rig = Rig {
        params,
        n: a.n,
        extent: a.extent * params.waist(),
        lmax: a.lmax,
        pmax: a.pmax,
    };
    rig.grid()?;
    let names: Vec<&str> = if a.suite == "all" { SUITES.to_vec() } else { vec![a.suite.as_str()] };
    let mut failed = 0;
    for name in names {
        let report = run_suite(name, &rig).expect("suite names are validated by the parser")?;
        failed += report.failures();
        emit(out, &report.render())?;
    }
    if failed > 0 {
        return Err(CliError::VerificationFailed { failed });
    }
    Ok(())
}


//! Invariant suites behind `lgbeam verify`. Each suite returns a [`Report`]
//! of measured values against fixed tolerances, plus informational tables.
//! All output is deterministic for a given [`Rig`].

use std::fmt::Write as _;

use lgbeam::analytic::eval_lg_mode;
use lgbeam::decomposition::decompose;
use lgbeam::operators::{
    apply_ladder, apply_ladder_at_z, apply_ladder_zero, commutator_residual, index_scan,
    literal_index_relation, map_indices, oam_expectation, synthesize_mode, LadderKind, Sign, MAX_SYNTHESIS_ORDER,
};
use lgbeam::propagation::{gouy_phase_extract_on, paraxial_residual, propagate, PropagationPlan};
use lgbeam::spectral::interpolate;
use lgbeam::{fidelity, inner_product, BeamParams, Complex64, ComplexField, Grid, LgError, ModeIndex};

type Result<T> = std::result::Result<T, LgError>;

const SIGNS: [Sign; 2] = [Sign::Plus, Sign::Minus];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
}

impl Bound {
    fn holds(&self, v: f64) -> bool {
        match *self {
            Bound::AtMost(t) => v <= t,
            Bound::AtLeast(t) => v >= t,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub measured: f64,
    pub bound: Bound,
}

impl Check {
    pub fn new(label: impl Into<String>, measured: f64, bound: Bound) -> Self {
        Self {
            label: label.into(),
            measured,
            bound,
        }
    }

    pub fn pass(&self) -> bool {
        self.bound.holds(self.measured)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(title: &str, header: &[&str]) -> Self {
        Self {
            title: title.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
}

impl Report {
    fn new(suite: &str) -> Self {
        Self {
            suite: suite.into(),
            ..Default::default()
        }
    }

    fn check(&mut self, label: impl Into<String>, measured: f64, bound: Bound) {
        self.checks.push(Check::new(label, measured, bound));
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass()).count()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "== {} ==", self.suite).unwrap();
        for t in &self.tables {
            writeln!(out, "-- {}", t.title).unwrap();
            let widths: Vec<usize> = (0..t.header.len())
                .map(|i| {
                    t.rows
                        .iter()
                        .map(|r| r[i].len())
                        .chain([t.header[i].len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |cells: &[String]| {
                cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            writeln!(out, "{}", line(&t.header)).unwrap();
            for r in &t.rows {
                writeln!(out, "{}", line(r)).unwrap();
            }
        }
        if !self.checks.is_empty() {
            let width = self.checks.iter().map(|c| c.label.len()).max().unwrap_or(0);
            for c in &self.checks {
                let (op, tol) = match c.bound {
                    Bound::AtMost(t) => ("<=", t),
                    Bound::AtLeast(t) => (">=", t),
                };
                writeln!(
                    out,
                    "{:<width$}  {:>12.4e}  {op} {:<8}  {}",
                    c.label,
                    c.measured,
                    format!("{tol:e}"),
                    if c.pass() { "PASS" } else { "FAIL" }
                )
                .unwrap();
            }
        }
        out
    }
}

/// Beam parameters, sampling and mode window shared by the suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rig {
    pub params: BeamParams,
    pub n: usize,
    /// Half-width at the waist; suites that propagate scale it by `w(z)/w0`.
    pub extent: f64,
    pub lmax: u32,
    pub pmax: u32,
}

impl Default for Rig {
    fn default() -> Self {
        let params = BeamParams::default();
        Self {
            params,
            n: lgbeam::grid::DEFAULT_SAMPLES,
            extent: lgbeam::grid::DEFAULT_EXTENT_RADII * params.waist(),
            lmax: 3,
            pmax: 3,
        }
    }
}

impl Rig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.extent)
    }

    /// Grid widened for beams propagated out to `z_max`.
    pub fn grid_for(&self, z_max: f64) -> Result<Grid> {
        Grid::new(self.n, self.extent * self.params.radius_at(z_max) / self.params.waist())
    }

    fn b(&self) -> f64 {
        self.params.b()
    }

    fn window(&self) -> Vec<ModeIndex> {
        ModeIndex::window(self.lmax, self.pmax)
    }

    fn mode(&self, idx: ModeIndex, grid: &Grid, z: f64) -> Result<ComplexField> {
        eval_lg_mode(idx, &self.params, grid, z)
    }
}

pub const SUITES: [&str; 11] = [
    "orthonormality",
    "annihilation",
    "commutators",
    "synthesis",
    "residual",
    "gouy",
    "propagation",
    "oam",
    "decomposition",
    "polar-form",
    "index-map",
];

pub fn run_suite(name: &str, rig: &Rig) -> Option<Result<Report>> {
    Some(match name {
        "orthonormality" => orthonormality(rig),
        "annihilation" => annihilation(rig),
        "commutators" => commutators(rig),
        "synthesis" => synthesis(rig),
        "residual" => residual(rig),
        "gouy" => gouy(rig),
        "propagation" => propagation(rig),
        "oam" => oam(rig),
        "decomposition" => decomposition(rig),
        "polar-form" => polar_form(rig),
        "index-map" => index_map(rig),
        _ => return None,
    })
}

fn idx(l: i32, p: u32) -> ModeIndex {
    ModeIndex::from_parts(l, p)
}

fn sci(v: f64) -> String {
    format!("{v:.3e}")
}

pub fn orthonormality(rig: &Rig) -> Result<Report> {
    let grid = rig.grid()?;
    let modes: Vec<ComplexField> = rig.window().into_iter().map(|m| rig.mode(m, &grid, 0.0)).collect::<Result<_>>()?;
    let (mut diag, mut off) = (0.0_f64, 0.0_f64);
    for (i, a) in modes.iter().enumerate() {
        for b in &modes[i..] {
            let g = inner_product(a, b)?;
            if std::ptr::eq(a, b) {
                diag = diag.max((g - 1.0).norm());
            } else {
                off = off.max(g.norm());
            }
        }
    }
    let mut r = Report::new("orthonormality");
    r.check(format!("max |<u|u> - 1|, {} modes", modes.len()), diag, Bound::AtMost(1e-6));
    r.check("max |<u_l'p'|u_lp>|, distinct modes", off, Bound::AtMost(1e-6));
    Ok(r)
}

pub fn annihilation(rig: &Rig) -> Result<Report> {
    let mut r = Report::new("annihilation");
    let plan = PropagationPlan::default();
    for z in [0.0, rig.b()] {
        let grid = rig.grid_for(z)?;
        let u = rig.mode(idx(0, 0), &grid, z)?;
        for sign in SIGNS {
            let out = apply_ladder_at_z(LadderKind::lower(sign), &u, &plan)?;
            r.check(
                format!("||A{}(z={z}) u00|| / ||u00||", sign.symbol()),
                out.norm() / u.norm(),
                Bound::AtMost(1e-6),
            );
        }
    }
    Ok(r)
}

/// Normalized states used for commutator expectations.
pub fn commutator_states(rig: &Rig, grid: &Grid, z: f64) -> Result<Vec<(String, ComplexField)>> {
    let mut states = Vec::new();
    for (l, p) in [(0, 0), (1, 1), (-2, 0), (0, 2), (3, 1)] {
        states.push((format!("u({l},{p})"), rig.mode(idx(l, p), grid, z)?));
    }
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mixed = rig
        .mode(idx(0, 0), grid, z)?
        .scale(h)
        .axpy(h * Complex64::i(), &rig.mode(idx(1, 1), grid, z)?)?;
    states.push(("(u(0,0)+i u(1,1))/sqrt2".into(), mixed));
    Ok(states)
}

pub fn commutators(rig: &Rig) -> Result<Report> {
    let mut r = Report::new("commutators");
    let plan = PropagationPlan::default();
    let mut table = Table::new(
        "commutator expectations",
        &["z", "state", "[A+,A+†]", "[A-,A-†]", "[A+,A-†]", "[A-,A+†]"],
    );
    for z in [0.0, rig.b()] {
        let grid = rig.grid_for(z)?;
        let (mut same_dev, mut cross_dev) = (0.0_f64, 0.0_f64);
        let states = commutator_states(rig, &grid, z)?;
        for (name, f) in &states {
            let mut cells = vec![format!("{z}"), name.clone()];
            for (a, b) in [
                (Sign::Plus, Sign::Plus),
                (Sign::Minus, Sign::Minus),
                (Sign::Plus, Sign::Minus),
                (Sign::Minus, Sign::Plus),
            ] {
                let v = commutator_residual(a, b, f, &plan)?;
                if a == b {
                    same_dev = same_dev.max((v - 1.0).norm());
                } else {
                    cross_dev = cross_dev.max(v.norm());
                }
                cells.push(format!("{:.6}", v.re));
            }
            table.rows.push(cells);
        }
        r.check(
            format!("max |<[A±,A±†]> - 1| at z={z}, {} states", states.len()),
            same_dev,
            Bound::AtMost(1e-3),
        );
        r.check(
            format!("max |<[A±,A∓†]>| at z={z}, {} states", states.len()),
            cross_dev,
            Bound::AtMost(1e-3),
        );
    }
    r.tables.push(table);
    Ok(r)
}

pub fn synthesis(rig: &Rig) -> Result<Report> {
    let grid = rig.grid()?;
    let mut r = Report::new("synthesis");
    let header: Vec<String> = std::iter::once("l \\ p".to_string())
        .chain((0..=rig.pmax).map(|p| format!("p={p}")))
        .collect();
    let mut fid_table = Table {
        title: "fidelity(synthesized, analytic)".into(),
        header: header.clone(),
        rows: Vec::new(),
    };
    let mut norm_table = Table {
        title: "norm of synthesized mode".into(),
        header,
        rows: Vec::new(),
    };
    let (mut worst_fid, mut worst_norm) = (1.0_f64, 0.0_f64);
    for l in -(rig.lmax as i32)..=rig.lmax as i32 {
        let mut frow = vec![format!("{l}")];
        let mut nrow = vec![format!("{l}")];
        for p in 0..=rig.pmax {
            let m = idx(l, p);
            if m.order() > MAX_SYNTHESIS_ORDER {
                frow.push("-".into());
                nrow.push("-".into());
                continue;
            }
            let s = synthesize_mode(m, &rig.params, &grid)?;
            let fid = fidelity(&s, &rig.mode(m, &grid, 0.0)?)?;
            worst_fid = worst_fid.min(fid);
            worst_norm = worst_norm.max((s.norm() - 1.0).abs());
            frow.push(format!("{fid:.6}"));
            nrow.push(format!("{:.6}", s.norm()));
        }
        fid_table.rows.push(frow);
        norm_table.rows.push(nrow);
    }
    r.tables.push(fid_table);
    r.tables.push(norm_table);
    r.check("min fidelity", worst_fid, Bound::AtLeast(0.999));
    r.check("max |norm - 1|", worst_norm, Bound::AtMost(1e-3));
    Ok(r)
}

pub fn residual(rig: &Rig) -> Result<Report> {
    let mut r = Report::new("residual");
    let modes = ModeIndex::up_to_order(MAX_SYNTHESIS_ORDER);
    let h = 1e-3 * rig.b();
    let mut table = Table::new("paraxial residual", &["z", "max residual (h)", "max residual (h/2)", "min ratio"]);
    for z in [0.0, rig.b()] {
        let grid = rig.grid_for(z)?;
        let (mut worst, mut worst_half, mut min_ratio) = (0.0_f64, 0.0_f64, f64::INFINITY);
        for &m in &modes {
            let coarse = paraxial_residual(m, &rig.params, &grid, z, h)?;
            let fine = paraxial_residual(m, &rig.params, &grid, z, h / 2.0)?;
            worst = worst.max(coarse);
            worst_half = worst_half.max(fine);
            min_ratio = min_ratio.min(coarse / fine);
        }
        table.rows.push(vec![format!("{z}"), sci(worst), sci(worst_half), format!("{min_ratio:.3}")]);
        r.check(format!("max residual at z={z}, {} modes", modes.len()), worst, Bound::AtMost(1e-4));
        r.check(format!("min residual(h)/residual(h/2) at z={z}"), min_ratio, Bound::AtLeast(3.5));
    }
    r.tables.push(table);
    Ok(r)
}

pub fn gouy(rig: &Rig) -> Result<Report> {
    let mut r = Report::new("gouy");
    let b = rig.b();
    let mut table = Table::new("Gouy phase", &["l", "p", "z", "expected", "measured", "error", "shape phase"]);
    let zs = [0.5 * b, b, 2.0 * b];
    let grid = rig.grid_for(2.0 * b)?;
    let mut worst = 0.0_f64;
    let mut worst_shape = 0.0_f64;
    for (l, p) in [(0, 0), (1, 0), (2, 1)] {
        for z in zs {
            let rep = gouy_phase_extract_on(idx(l, p), &rig.params, &grid, z, &PropagationPlan::for_step(&rig.params, z))?;
            worst = worst.max(rep.error().abs()).max(rep.relative_error(b).abs());
            worst_shape = worst_shape.max(rep.shape_phase.abs());
            table.rows.push(vec![
                l.to_string(),
                p.to_string(),
                format!("{z}"),
                format!("{:.6}", rep.expected),
                format!("{:.6}", rep.measured),
                sci(rep.error()),
                sci(rep.shape_phase),
            ]);
        }
    }
    r.tables.push(table);
    r.check("max |Gouy error| (rad, mod 2π)", worst, Bound::AtMost(1e-3));
    r.check("max |shape phase| (rad)", worst_shape, Bound::AtMost(1e-3));
    Ok(r)
}

pub fn propagation(rig: &Rig) -> Result<Report> {
    let mut r = Report::new("propagation");
    let b = rig.b();
    let grid = rig.grid_for(2.0 * b)?;
    let (mut worst_fid, mut worst_unit) = (1.0_f64, 0.0_f64);
    for m in rig.window() {
        let start = rig.mode(m, &grid, 0.0)?;
        for z in [0.5 * b, b, 2.0 * b] {
            let moved = propagate(&start, z, &PropagationPlan::for_step(&rig.params, z))?;
            worst_fid = worst_fid.min(fidelity(&moved, &rig.mode(m, &grid, z)?)?);
            worst_unit = worst_unit.max((moved.norm() - start.norm()).abs() / start.norm());
        }
    }
    let g1 = rig.grid_for(b)?;
    let u0 = rig.mode(idx(0, 0), &g1, 0.0)?;
    let u1 = propagate(&u0, b, &PropagationPlan::default())?;
    let ratio = interpolate(&u1, 0.0, 0.0).norm() / interpolate(&u0, 0.0, 0.0).norm();
    r.check("min fidelity vs analytic, z in {b/2, b, 2b}", worst_fid, Bound::AtLeast(0.999));
    r.check("max relative norm change", worst_unit, Bound::AtMost(1e-12));
    r.check(
        "|on-axis ratio u00(b)/u00(0) - 1/sqrt2|",
        (ratio - std::f64::consts::FRAC_1_SQRT_2).abs(),
        Bound::AtMost(1e-4),
    );
    Ok(r)
}

pub fn oam(rig: &Rig) -> Result<Report> {
    let mut r = Report::new("oam");
    let b = rig.b();
    let grid = rig.grid_for(b)?;
    let (mut worst, mut worst_prop) = (0.0_f64, 0.0_f64);
    for m in rig.window() {
        let u = rig.mode(m, &grid, 0.0)?;
        let before = oam_expectation(&u)?;
        let after = oam_expectation(&propagate(&u, b, &PropagationPlan::default())?)?;
        worst = worst.max((before - m.l() as f64).abs());
        worst_prop = worst_prop.max((after - before).abs());
    }
    r.check("max |<-i d/dphi> - l|", worst, Bound::AtMost(1e-6));
    r.check("max OAM change under propagation to z=b", worst_prop, Bound::AtMost(1e-6));
    Ok(r)
}

pub fn decomposition(rig: &Rig) -> Result<Report> {
    let mut r = Report::new("decomposition");
    let grid = rig.grid()?;
    let coeffs = [
        (idx(0, 0), Complex64::new(0.5, 0.0)),
        (idx(1, 1), Complex64::new(0.0, 0.5)),
        (idx(-2, 0), Complex64::new(-0.5, 0.3)),
        (idx(3, 2), Complex64::new(0.2, -0.1)),
    ];
    let mut f = ComplexField::zeros(grid, 0.0, rig.params);
    for (m, c) in coeffs {
        if m.abs_l() <= rig.lmax && m.p() <= rig.pmax {
            f = f.axpy(c, &rig.mode(m, &grid, 0.0)?)?;
        }
    }
    let d = decompose(&f, rig.lmax, rig.pmax)?;
    r.check("|sum |c|^2 - ||f||^2| (in-window superposition)", (d.captured_power() - d.field_power).abs(), Bound::AtMost(1e-6));
    let mut worst = 1.0_f64;
    for m in rig.window() {
        let s = synthesize_mode(m, &rig.params, &grid)?;
        let d = decompose(&s, rig.lmax, rig.pmax)?;
        let target = d.spectrum.coefficient(m).unwrap_or_default().norm_sqr();
        worst = worst.min(target / d.field_power);
    }
    r.check("min power fraction on target after synthesis", worst, Bound::AtLeast(0.998));
    Ok(r)
}

/// Compares the polar closed form of the lowering and raising operators with
/// the canonical conjugated operators.
pub fn polar_form(rig: &Rig) -> Result<Report> {
    let mut r = Report::new("polar-form");
    let b = rig.b();
    let plan = PropagationPlan::default();
    let mut table = Table::new(
        "max |polar - canonical| / max|f|",
        &["z", "field", "A+", "A-", "A+†", "A-†"],
    );
    for z in [0.0, b] {
        let grid = rig.grid_for(z)?;
        for (l, p) in [(0, 0), (1, 0), (-1, 0), (0, 1), (2, 1)] {
            let f = rig.mode(idx(l, p), &grid, z)?;
            let scale = f.max_abs();
            let mut cells = vec![format!("{z}"), format!("u({l},{p})")];
            for kind in [
                LadderKind::lower(Sign::Plus),
                LadderKind::lower(Sign::Minus),
                LadderKind::raise(Sign::Plus),
                LadderKind::raise(Sign::Minus),
            ] {
                let canonical = apply_ladder(kind, &f, &plan)?;
                let polar = apply_ladder(kind.polar(), &f, &plan)?;
                cells.push(sci(polar.sub(&canonical)?.max_abs() / scale));
            }
            table.rows.push(cells);
        }
    }
    r.tables.push(table);
    let grid = rig.grid()?;
    let u = rig.mode(idx(0, 0), &grid, 0.0)?;
    for sign in SIGNS {
        let polar = apply_ladder(LadderKind::lower(sign).polar(), &u, &plan)?;
        r.check(
            format!("||A{}(0) u00|| / ||u00||, polar form", sign.symbol()),
            polar.norm() / u.norm(),
            Bound::AtMost(1e-6),
        );
    }
    let canon = apply_ladder_zero(LadderKind::lower(Sign::Minus), &u)?;
    r.check("||A-(0) u00|| / ||u00||, canonical", canon.norm() / u.norm(), Bound::AtMost(1e-6));
    Ok(r)
}

/// Scans raising counts against every target in the window and compares the
/// best match with [`map_indices`] and with the literal `(l±p)/2` relation.
pub fn index_map(rig: &Rig) -> Result<Report> {
    let mut r = Report::new("index-map");
    let grid = rig.grid()?;
    let targets: Vec<ModeIndex> = rig.window().into_iter().filter(|m| m.order() <= MAX_SYNTHESIS_ORDER).collect();
    let max_total = targets.iter().map(|m| m.order()).max().unwrap_or(0);
    let rows = index_scan(&targets, max_total, &rig.params, &grid)?;
    let mut table = Table::new(
        "raising counts (m, n) reproducing u(l,p)",
        &["l", "p", "(l+p)/2", "(l-p)/2", "scan m", "scan n", "formula m", "formula n", "fidelity", "runner-up"],
    );
    let mut mismatches = 0;
    let mut worst_gap = 1.0_f64;
    for row in &rows {
        let (lm, ln) = literal_index_relation(row.target);
        let (fm, fn_) = map_indices(row.target);
        if row.best != (fm, fn_) {
            mismatches += 1;
        }
        worst_gap = worst_gap.min(row.best_fidelity - row.runner_up_fidelity);
        table.rows.push(vec![
            row.target.l().to_string(),
            row.target.p().to_string(),
            format!("{lm}"),
            format!("{ln}"),
            row.best.0.to_string(),
            row.best.1.to_string(),
            fm.to_string(),
            fn_.to_string(),
            format!("{:.6}", row.best_fidelity),
            sci(row.runner_up_fidelity),
        ]);
    }
    r.tables.push(table);
    r.check(
        format!("scan/formula mismatches over {} targets, m+n <= {max_total}", rows.len()),
        mismatches as f64,
        Bound::AtMost(0.0),
    );
    r.check("min best-minus-runner-up fidelity", worst_gap, Bound::AtLeast(0.9));
    Ok(r)
}

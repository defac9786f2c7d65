//! Command-line front end: read a definition file, run one kind of check
//! over its blocks, print the reports.
//!
//! Exit status is 0 when every check passes, 1 when any check fails (or
//! its precondition does), and 2 for usage and parse errors.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use nalgebra::DMatrix;

use crate::document::{generator_forms, BlockKind, Document};
use crate::groupcase::{expm, flow_homotopy, integrate_path, verify_ad};
use crate::homotopy::NaturalHomotopy;
use crate::report::{Check, Report, Status};
use crate::tangentcase::{check_retraction, check_transversality};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// d² = 0 on generators and the bracket axioms, per algebroid
    Validate,
    /// Pullback commutes with d, per map
    CheckMorphism,
    /// Morphism property and homotopy condition, per homotopy
    CheckHomotopy,
    /// Φ₁* − Φ₀* = dΘ + Θd on generator forms, per homotopy
    ChainHomotopy,
    /// Integrate each path to a group element
    IntegrateGroup,
    /// Flow Φ₀ along each path and check the sampled homotopy
    Flow,
    /// Check composite homotopies and interchange laws
    Compose,
    /// Deformation-retraction conditions, per retraction
    CheckRetraction,
    /// Rank condition at sample points, per retraction
    CheckTransversality,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::CheckMorphism => "check-morphism",
            Command::CheckHomotopy => "check-homotopy",
            Command::ChainHomotopy => "chain-homotopy",
            Command::IntegrateGroup => "integrate-group",
            Command::Flow => "flow",
            Command::Compose => "compose",
            Command::CheckRetraction => "check-retraction",
            Command::CheckTransversality => "check-transversality",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "algebroid-kit", version, about = "Exact checks for Lie algebroids, morphisms and homotopies")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Definition file
    pub file: PathBuf,
    /// Only run on the block with this name
    #[arg(long)]
    pub name: Option<String>,
    /// RK4 steps on [0, 1]
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    /// Tolerance for numeric checks
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Grid intervals for `flow`; generated points for
    /// `check-transversality` when a block lists none
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    /// Print reports as JSON
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone)]
pub struct Flags {
    pub name: Option<String>,
    pub steps: usize,
    pub tol: f64,
    pub samples: usize,
}

impl Default for Flags {
    fn default() -> Self {
        Flags {
            name: None,
            steps: 1000,
            tol: 1e-6,
            samples: 10,
        }
    }
}

/// A usage problem: missing blocks, bad flag values.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn select<'a>(doc: &'a Document, kind: BlockKind, flags: &Flags) -> Result<Vec<&'a str>, UsageError> {
    let names = doc.names(kind);
    let names: Vec<&str> = match &flags.name {
        Some(n) => names.into_iter().filter(|x| x == n).collect(),
        None => names,
    };
    if names.is_empty() {
        return Err(UsageError(match &flags.name {
            Some(n) => format!("no {} block named `{n}`", kind.name()),
            None => format!("the file has no {} blocks", kind.name()),
        }));
    }
    Ok(names)
}

fn matrix_note(label: &str, m: &DMatrix<f64>) -> String {
    let rows: Vec<String> = m
        .row_iter()
        .map(|r| r.iter().map(|x| format!("{x:.9}")).collect::<Vec<_>>().join(" "))
        .collect();
    format!("{label} = {}", rows.join("; "))
}

fn error_check(name: &str, e: impl std::fmt::Display) -> Check {
    let mut c = Check::identity(name);
    c.fail(e.to_string());
    c
}

/// Runs `cmd` over the matching blocks of `doc`.
pub fn run_command(cmd: Command, doc: &Document, flags: &Flags) -> Result<Vec<Report>, UsageError> {
    if flags.steps == 0 || flags.samples == 0 {
        return Err(UsageError("--steps and --samples must be positive".into()));
    }
    let mut reports = Vec::new();
    match cmd {
        Command::Validate => {
            let algebroids = doc.names(BlockKind::Algebroid);
            let liealgs = doc.names(BlockKind::LieAlg);
            let keep = |n: &&str| flags.name.as_deref().is_none_or(|x| x == *n);
            let (algebroids, liealgs): (Vec<&str>, Vec<&str>) =
                (algebroids.into_iter().filter(keep).collect(), liealgs.into_iter().filter(keep).collect());
            if algebroids.is_empty() && liealgs.is_empty() {
                return Err(UsageError("no algebroid or liealg blocks to validate".into()));
            }
            for name in algebroids {
                let a = &doc.algebroids[name];
                let mut r = Report::new(format!("algebroid {name}"));
                r.absorb("", a.validate_dga());
                r.absorb("", a.bracket_axioms_oracle());
                reports.push(r);
            }
            for name in liealgs {
                let mut r = Report::new(format!("liealg {name}"));
                r.absorb("", doc.liealgs[name].to_algebroid().validate_dga());
                reports.push(r);
            }
        }
        Command::CheckMorphism => {
            for name in select(doc, BlockKind::Map, flags)? {
                let mut r = doc.maps[name].is_morphism();
                r.title = format!("map {name}");
                reports.push(r);
            }
        }
        Command::CheckHomotopy => {
            for name in select(doc, BlockKind::Homotopy, flags)? {
                let mut r = doc.homotopies[name].check_homotopy();
                r.title = format!("homotopy {name}");
                reports.push(r);
            }
        }
        Command::ChainHomotopy => {
            for name in select(doc, BlockKind::Homotopy, flags)? {
                reports.push(chain_homotopy_report(name, &doc.homotopies[name]));
            }
        }
        Command::IntegrateGroup => {
            for name in select(doc, BlockKind::Path, flags)? {
                reports.push(integrate_report(doc, name, flags));
            }
        }
        Command::Flow => {
            for name in select(doc, BlockKind::Path, flags)? {
                reports.push(flow_report(doc, name, flags));
            }
        }
        Command::Compose => {
            let names: Vec<&str> = select(doc, BlockKind::Homotopy, flags)?
                .into_iter()
                .filter(|n| doc.composites.contains(*n))
                .collect();
            if names.is_empty() {
                return Err(UsageError("no composite homotopy blocks (vertical, horizontal, interchange)".into()));
            }
            for name in names {
                let mut r = doc.homotopies[name].check_homotopy();
                r.title = format!("composite {name}");
                if let Some(ix) = doc.interchanges.get(name) {
                    let h = |n: &str| &doc.homotopies[n];
                    match NaturalHomotopy::interchange_check(h(&ix.h0), h(&ix.h1), h(&ix.k0), h(&ix.k1)) {
                        Ok(rep) => r.absorb("interchange: ", rep),
                        Err(e) => r.push(error_check("interchange law", e)),
                    }
                }
                reports.push(r);
            }
        }
        Command::CheckRetraction => {
            for name in select(doc, BlockKind::Retraction, flags)? {
                let spec = &doc.retractions[name];
                let mut r = check_retraction(&doc.homotopies[&spec.homotopy], &spec.presentation);
                r.title = format!("retraction {name}");
                reports.push(r);
            }
        }
        Command::CheckTransversality => {
            for name in select(doc, BlockKind::Retraction, flags)? {
                reports.push(transversality_report(doc, name, flags));
            }
        }
    }
    Ok(reports)
}

fn chain_homotopy_report(name: &str, h: &NaturalHomotopy) -> Report {
    let mut r = Report::new(format!("chain homotopy {name}"));
    if !h.check_homotopy().passed() {
        r.push(Check::with_status("Phi1* - Phi0* = d Theta + Theta d", Status::Precondition).note("the homotopy condition fails"));
        return r;
    }
    for w in generator_forms(h.target()) {
        for mut c in h.verify_chain_homotopy(&w).checks {
            c.name = format!("w = {w}");
            r.push(c);
        }
    }
    r
}

fn integrate_report(doc: &Document, name: &str, flags: &Flags) -> Report {
    let spec = &doc.paths[name];
    let g = &doc.liealgs[&spec.liealg];
    let mut r = Report::new(format!("path {name}"));
    let h = match integrate_path(g, &spec.theta, flags.steps) {
        Ok(h) => h,
        Err(e) => {
            r.push(error_check("integrate path", e));
            return r;
        }
    };
    r.push(h.determinant_check(g, &spec.theta, flags.tol));
    let constant: Option<Vec<f64>> = spec
        .theta
        .iter()
        .map(|p| p.as_constant().map(|c| num_traits::ToPrimitive::to_f64(&c).unwrap_or(f64::NAN)))
        .collect();
    if let Some(x) = constant {
        let err = (&h.matrix - expm(&g.element(&x))).amax();
        r.push(Check::numeric("h = exp(theta) for a constant path", "max |h - exp(theta)|", err, flags.tol));
    }
    if let Some(phi1) = &spec.phi1 {
        let phi0 = spec.phi0.clone().unwrap_or_else(|| DMatrix::identity(g.dim(), g.dim()));
        match verify_ad(g, &phi0, phi1, &h, flags.tol) {
            Ok(rep) => r.absorb("", rep),
            Err(e) => r.push(error_check("Phi1 = Ad_h o Phi0", e)),
        }
    }
    if let Some(c) = r.checks.last_mut() {
        c.notes.push(matrix_note("h", &h.matrix));
        c.notes.push(format!("steps = {}, method = {}", h.steps, h.method));
    }
    r
}

fn flow_report(doc: &Document, name: &str, flags: &Flags) -> Report {
    let spec = &doc.paths[name];
    let g = &doc.liealgs[&spec.liealg];
    let mut r = Report::new(format!("flow {name}"));
    let phi0 = spec.phi0.clone().unwrap_or_else(|| DMatrix::identity(g.dim(), g.dim()));
    let flow = match flow_homotopy(g, &phi0, &spec.theta, flags.steps, flags.samples) {
        Ok(f) => f,
        Err(e) => {
            r.push(error_check("flow", e));
            return r;
        }
    };
    match flow.check(g, 1e-4, flags.tol) {
        Ok(rep) => r.absorb("", rep),
        Err(e) => r.push(error_check("flowed homotopy", e)),
    }
    let (phi_end, h) = flow.end();
    match verify_ad(g, &phi0, phi_end, &h, flags.tol) {
        Ok(rep) => r.absorb("endpoint: ", rep),
        Err(e) => r.push(error_check("endpoint: Phi1 = Ad_h o Phi0", e)),
    }
    if let Some(phi1) = &spec.phi1 {
        let err = (phi_end - phi1).amax();
        r.push(Check::numeric("flow ends at the given phi1", "max error", err, flags.tol));
    }
    if let Some(c) = r.checks.last_mut() {
        c.notes.push(matrix_note("Phi_1", phi_end));
    }
    r
}

fn transversality_report(doc: &Document, name: &str, flags: &Flags) -> Report {
    let spec = &doc.retractions[name];
    let h = &doc.homotopies[&spec.homotopy];
    let mut report = Report::new(format!("transversality {name}"));
    let factored = match spec.presentation.factor(&h.end_map()) {
        Ok(f) => f,
        Err(e) => {
            report.push(error_check("factor Phi_1 through A_R", e));
            return report;
        }
    };
    let samples = if spec.samples.is_empty() {
        let m = h.source().base_dim();
        (0..flags.samples)
            .map(|k| (0..m).map(|i| ((k * 7 + i * 3) % 11) as f64 / 4.0 - 1.25).collect())
            .collect()
    } else {
        spec.samples.clone()
    };
    report.absorb("", check_transversality(factored.base_map(), spec.presentation.subalgebroid(), &samples));
    report
}

/// Text or JSON rendering of a batch of reports.
pub fn render(cmd: Command, reports: &[Report], json: bool) -> String {
    if json {
        let value = serde_json::json!({
            "command": cmd.name(),
            "passed": reports.iter().all(Report::passed),
            "reports": reports,
        });
        let mut s = serde_json::to_string_pretty(&value).expect("reports serialize");
        s.push('\n');
        s
    } else {
        reports.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
    }
}

/// Parses arguments, runs, and returns `(exit status, stdout, stderr)`.
pub fn run_captured<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { (0, text, String::new()) } else { (2, String::new(), text) };
        }
    };
    let doc = match Document::parse_file(&cli.file) {
        Ok(d) => d,
        Err(e) => return (2, String::new(), format!("error: {}: {e}\n", cli.file.display())),
    };
    let flags = Flags {
        name: cli.name.clone(),
        steps: cli.steps,
        tol: cli.tol,
        samples: cli.samples,
    };
    match run_command(cli.command, &doc, &flags) {
        Ok(reports) => {
            let code = if reports.iter().all(Report::passed) { 0 } else { 1 };
            (code, render(cli.command, &reports, cli.json), String::new())
        }
        Err(e) => (2, String::new(), format!("error: {e}\n")),
    }
}

/// Entry point for the binary.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (code, out, err) = run_captured(args);
    print!("{out}");
    eprint!("{err}");
    code
}

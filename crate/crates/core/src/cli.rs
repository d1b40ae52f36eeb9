//! Command-line experiment runner.
//!
//! Exit codes: 0 success, 1 numeric or verification failure, 2 usage error.
//! `HOLONET_THREADS` caps the worker pool.

use std::ffi::OsString;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::activation::catalog;
use crate::approx::{assemble, ApproximationReport, AssemblyBudget, Measurement};
use crate::complexity::{classification_sieve, covering_bound, rational, regression_sieve, Noise, RateSpec};
use crate::corpus::{corpus, polynomial_from_csv, HolderFunction};
use crate::error::{Error, Result};
use crate::gadgets::GadgetKit;
use crate::interval::{unit_box, Interval};
use crate::lift::{lift, plan_lift, verify_lift};
use crate::network::{Network, NetworkClassSpec};
use crate::sweep::{default_knobs, sweep, GadgetKind};
use crate::verify;

#[derive(Debug, Parser)]
#[command(name = "holonet", version, about = "Explicit network constructions for Hölder-smooth targets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a network approximating a corpus target.
    Approx(ApproxArgs),
    /// Build one gadget network and measure it.
    Gadget(GadgetArgs),
    /// Rewrite a ReLU network over a piecewise-linear activation.
    Lift(LiftArgs),
    /// Covering-number bound or sieve rates.
    #[command(subcommand)]
    Bound(BoundCommand),
    /// Scaling tables over knob or accuracy sweeps.
    #[command(subcommand)]
    Sweep(SweepCommand),
    /// Run the invariant suites (`all` or one of the suite names).
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct TargetArgs {
    /// Corpus name, e.g. `sin2pi_d1`, `const(3)` or `polynomial`.
    #[arg(long)]
    pub target: String,
    /// Coefficient CSV (`exponent_1,...,exponent_d,coefficient` rows) for `polynomial`.
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
    /// Override the declared smoothness.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Override the declared radius.
    #[arg(long = "R")]
    pub radius: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    #[arg(long)]
    pub activation: String,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Grid resolution override.
    #[arg(long = "M")]
    pub resolution: Option<usize>,
    /// Gadget knob override.
    #[arg(long = "K")]
    pub knob: Option<f64>,
    /// Sawtooth layers override for piecewise-linear activations.
    #[arg(long = "m")]
    pub layers: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GadgetArgs {
    /// square | times | mono | sqrt | abs | relu | identity
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub activation: String,
    #[arg(long = "K")]
    pub knob: f64,
    /// Multi-index for `mono`, e.g. `1,2`.
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<u32>>,
    #[arg(long)]
    pub alpha: Option<u32>,
    /// Input range for `times` and `identity`.
    #[arg(long = "A")]
    pub range: Option<f64>,
    /// `csv` prints a CSV row instead of text.
    #[arg(long)]
    pub report: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LiftArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub activation: String,
    /// `unit` or `lo,hi` for a cube.
    #[arg(long, default_value = "unit")]
    pub domain: String,
    #[arg(long)]
    pub out: PathBuf,
    /// Number of random check points, as `n=10000` or `10000`.
    #[arg(long)]
    pub verify: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum BoundCommand {
    Covering(CoveringArgs),
    Rates(RatesArgs),
}

#[derive(Debug, Args)]
pub struct CoveringArgs {
    #[arg(long)]
    pub delta: f64,
    #[arg(long = "L")]
    pub depth: f64,
    #[arg(long = "N")]
    pub width: f64,
    #[arg(long = "S")]
    pub sparsity: f64,
    #[arg(long = "B")]
    pub magnitude: f64,
    #[arg(long)]
    pub activation: String,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    /// regression | classification
    #[arg(long)]
    pub task: String,
    #[arg(long)]
    pub n: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub d: f64,
    /// Noise exponent; `inf` for the limit.
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub kappa: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum SweepCommand {
    /// Knob sweep of one gadget kind.
    Gadget(SweepGadgetArgs),
    /// Accuracy sweep of the full assembly.
    Approx(SweepApproxArgs),
}

#[derive(Debug, Args)]
pub struct SweepGadgetArgs {
    pub kind: String,
    #[arg(long)]
    pub activation: String,
    #[arg(long = "K", value_delimiter = ',')]
    pub knobs: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<u32>>,
    #[arg(long)]
    pub alpha: Option<u32>,
    #[arg(long = "A")]
    pub range: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepApproxArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    #[arg(long)]
    pub activation: String,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.2, 0.1, 0.05])]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    let stdout = std::io::stdout();
    match run(&cli, &mut stdout.lock()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("HOLONET_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Fails only if a pool already exists, which is harmless here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// 2 for configuration problems, 1 for everything else.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Name(_) | Error::Parse(_) | Error::Domain(_) | Error::Budget { .. } | Error::Capability(_) => 2,
        _ => 1,
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Approx(a) => approx(a, out),
        Command::Gadget(a) => gadget(a, out),
        Command::Lift(a) => lift_cmd(a, out),
        Command::Bound(BoundCommand::Covering(a)) => covering(a, out),
        Command::Bound(BoundCommand::Rates(a)) => rates(a, out),
        Command::Sweep(SweepCommand::Gadget(a)) => sweep_gadget(a, out),
        Command::Sweep(SweepCommand::Approx(a)) => sweep_approx(a, out),
        Command::Verify(a) => verify_cmd(a, out),
    }
}

fn load_target(t: &TargetArgs) -> Result<HolderFunction> {
    let mut f = if t.target == "polynomial" {
        let path = t.coeffs.as_ref().ok_or_else(|| Error::Parse("polynomial targets need --coeffs".into()))?;
        polynomial_from_csv(path, t.alpha)?
    } else {
        corpus(&t.target)?
    };
    if t.alpha.is_some() || t.radius.is_some() {
        let alpha = t.alpha.unwrap_or(f.alpha);
        let radius = t.radius.unwrap_or(f.radius);
        f = f.with_declaration(alpha, radius);
    }
    Ok(f)
}

fn budget_for(a: &ApproxArgs, f: &HolderFunction, pwl: bool) -> Result<AssemblyBudget> {
    let mut b = match a.eps {
        Some(eps) if pwl => AssemblyBudget::relu_for_epsilon(eps, f.alpha)?,
        Some(eps) => AssemblyBudget::for_epsilon(eps, f.alpha, f.dim)?,
        None if a.resolution.is_some() => AssemblyBudget::explicit(0, f64::NAN, 0),
        None => return Err(Error::Parse("give --eps or --M with --K/--m".into())),
    };
    if let Some(m) = a.resolution {
        b.resolution = m.max(1);
    }
    if let Some(k) = a.knob {
        b.knob = k;
        b.requested_knob = k;
    }
    if let Some(m) = a.layers {
        b.product_layers = m;
    }
    if !pwl && b.knob.is_nan() {
        return Err(Error::Parse("--K is required without --eps".into()));
    }
    if pwl && b.product_layers == 0 {
        return Err(Error::Parse("--m is required without --eps".into()));
    }
    Ok(b)
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn print_report(out: &mut dyn Write, r: &ApproximationReport) -> Result<()> {
    writeln!(
        out,
        "{} with {}: M={} K={} {} sup_err_grid={:.6e} sup_err_rand={:.6e} surrogate_err={:.6e} (bound {:.6e})",
        r.target,
        r.activation,
        r.budget.resolution,
        r.budget.knob,
        r.metrics,
        r.sup_err_grid,
        r.sup_err_rand,
        r.surrogate_err,
        r.surrogate_bound
    )?;
    if r.budget.knob_capped() {
        writeln!(out, "note: knob capped at {} (schedule asked for {:.3e})", r.budget.knob, r.budget.requested_knob)?;
    }
    Ok(())
}

fn approx(a: &ApproxArgs, out: &mut dyn Write) -> Result<i32> {
    let f = load_target(&a.target)?;
    let act = catalog(&a.activation)?;
    let budget = budget_for(a, &f, act.as_piecewise_linear().is_some())?;
    let (net, rep) = assemble(&f, &act, budget, Measurement::default_for(f.dim, a.seed))?;
    print_report(out, &rep)?;
    if let Some(p) = &a.out {
        net.save(p)?;
    }
    if let Some(p) = &a.report {
        write_csv(p, &ApproximationReport::CSV_HEADER, &[rep.csv_row()])?;
    }
    Ok(0)
}

fn gadget(a: &GadgetArgs, out: &mut dyn Write) -> Result<i32> {
    let kit = GadgetKit::new(&catalog(&a.activation)?)?;
    let kind = GadgetKind::parse(&a.kind, a.m.clone(), a.alpha, a.range)?;
    let model = sweep(&kit, &kind, &[a.knob], kind.default_scheme())?;
    if a.report.as_deref() == Some("csv") {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(crate::sweep::GadgetErrorModel::CSV_HEADER)?;
        for r in model.csv_rows() {
            w.write_record(&r)?;
        }
        out.write_all(&w.into_inner().map_err(|e| Error::Io(e.into_error()))?)?;
    } else {
        let p = &model.points[0];
        writeln!(
            out,
            "{} {} K={}: {} sup_error={:.6e} floor={:.1e} rate {}",
            model.gadget,
            model.activation,
            p.knob,
            p.metrics,
            p.sup_error,
            p.floor,
            model.rate.label()
        )?;
    }
    if let Some(path) = &a.out {
        kind.build(&kit, a.knob)?.save(path)?;
    }
    Ok(0)
}

fn parse_domain(s: &str, dim: usize) -> Result<Vec<Interval>> {
    if s == "unit" {
        return Ok(unit_box(dim));
    }
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad domain `{s}`"))))
        .collect::<Result<_>>()?;
    match parts[..] {
        [lo, hi] if lo <= hi => Ok(vec![Interval::new(lo, hi); dim]),
        _ => Err(Error::Parse(format!("domain must be `unit` or `lo,hi`, got `{s}`"))),
    }
}

fn lift_cmd(a: &LiftArgs, out: &mut dyn Write) -> Result<i32> {
    let src = Network::load(&a.input)?;
    if !src.activation().is_relu() {
        return Err(Error::Domain(format!("lift expects a ReLU network, found {}", src.activation())));
    }
    let act = catalog(&a.activation)?;
    let domain = parse_domain(&a.domain, src.input_dim())?;
    let plan = plan_lift(&src, &act, &domain)?;
    let lifted = lift(&src, &act, &plan)?;
    writeln!(out, "plan: breakpoint={} r0={} r={:.6e}", plan.breakpoint, plan.r0, plan.r)?;
    writeln!(out, "source {}", src.metrics())?;
    writeln!(out, "lifted {}", lifted.metrics())?;
    if let Some(v) = &a.verify {
        let n: usize = v
            .trim_start_matches("n=")
            .parse()
            .map_err(|_| Error::Parse(format!("bad --verify value `{v}`")))?;
        let diff = verify_lift(&src, &lifted, &domain, n, a.seed, 1e-9)?;
        writeln!(out, "verified on {n} points: max diff {diff:.3e}")?;
    }
    lifted.save(&a.out)?;
    Ok(0)
}

fn covering(a: &CoveringArgs, out: &mut dyn Write) -> Result<i32> {
    let act = catalog(&a.activation)?;
    let spec = NetworkClassSpec {
        depth: a.depth,
        width: a.width,
        sparsity: a.sparsity,
        magnitude: a.magnitude,
        input_dim: 0,
        output_dim: 0,
    };
    let b = covering_bound(a.delta, &spec, act.lipschitz_constant())?;
    writeln!(out, "{}", serde_json::to_string(&b)?)?;
    Ok(0)
}

fn rates(a: &RatesArgs, out: &mut dyn Write) -> Result<i32> {
    let alpha = rational(a.alpha)?;
    let d = rational(a.d)?;
    let kappa = a.kappa.map(rational).transpose()?;
    let spec: RateSpec = match a.task.as_str() {
        "regression" => regression_sieve(a.n, alpha, d, kappa)?,
        "classification" => {
            let q = match a.q.as_deref() {
                None => return Err(Error::Parse("classification needs --q".into())),
                Some("inf") => Noise::Infinite,
                Some(v) => Noise::Finite(rational(v.parse().map_err(|_| Error::Parse(format!("bad --q `{v}`")))?)?),
            };
            classification_sieve(a.n, alpha, d, q, kappa)?
        }
        other => return Err(Error::Name(other.to_string())),
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&spec)?)?;
    Ok(0)
}

fn sweep_gadget(a: &SweepGadgetArgs, out: &mut dyn Write) -> Result<i32> {
    let kit = GadgetKit::new(&catalog(&a.activation)?)?;
    let kind = GadgetKind::parse(&a.kind, a.m.clone(), a.alpha, a.range)?;
    let knobs = a.knobs.clone().unwrap_or_else(default_knobs);
    let model = sweep(&kit, &kind, &knobs, kind.default_scheme())?;
    let rows = model.csv_rows();
    match &a.out {
        Some(p) => write_csv(p, &crate::sweep::GadgetErrorModel::CSV_HEADER, &rows)?,
        None => {
            writeln!(out, "{}", crate::sweep::GadgetErrorModel::CSV_HEADER.join(","))?;
            for r in &rows {
                writeln!(out, "{}", r.join(","))?;
            }
        }
    }
    let slope = model.slope.map_or("n/a".to_string(), |s| format!("{s:.4}"));
    writeln!(out, "# fitted slope {slope} (theory {}), C_hat {:.4e}", model.rate.exponent(), model.c_hat)?;
    Ok(0)
}

fn sweep_approx(a: &SweepApproxArgs, out: &mut dyn Write) -> Result<i32> {
    let f = load_target(&a.target)?;
    let act = catalog(&a.activation)?;
    let pwl = act.as_piecewise_linear().is_some();
    let mut rows = Vec::new();
    for &eps in &a.eps {
        let budget =
            if pwl { AssemblyBudget::relu_for_epsilon(eps, f.alpha)? } else { AssemblyBudget::for_epsilon(eps, f.alpha, f.dim)? };
        let (_, rep) = assemble(&f, &act, budget, Measurement::default_for(f.dim, a.seed))?;
        rows.push(rep.csv_row());
    }
    match &a.out {
        Some(p) => write_csv(p, &ApproximationReport::CSV_HEADER, &rows)?,
        None => {
            writeln!(out, "{}", ApproximationReport::CSV_HEADER.join(","))?;
            for r in &rows {
                writeln!(out, "{}", r.join(","))?;
            }
        }
    }
    Ok(0)
}

fn verify_cmd(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let rep = verify::run(&a.suite, a.seed)?;
    let text = rep.to_text();
    match &a.out {
        Some(p) => std::fs::write(p, &text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(if rep.passed() { 0 } else { 1 })
}

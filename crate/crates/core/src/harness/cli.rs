//! Command-line front end.
//!
//! Exit codes: 0 when every requested check passes, 1 when a check fails,
//! 2 for invalid configurations or usage.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, KernelTag, TheoremId};
use crate::harness::corollary::check_corollaries;
use crate::harness::corpus::{random_positive_weights, sweep_instances, tail_corpora};
use crate::harness::lemma::{
    calibrate_tail, check_product_lemma, product_lemma_refinement, tail_cases, ProductExponents, TailOperator,
};
use crate::harness::report::{read_csv, render_ratio_svg, write_csv, write_json};
use crate::harness::theorem::{sweep, Experiment, RatioReport};
use crate::lattice::{make_ball_family, FamilySpec, GridFunction, Lattice};
use crate::operators::{verify_kernel_class, SamplingPlan, TruncationPolicy};
use crate::spaces::{lebesgue_norm, morrey_norm, weak_lebesgue_norm, weak_morrey_norm, MorreyParams};
use crate::weights::{
    ainfty_diagnostics, apq_constant, doubling_constant, muckenhoupt_constant, multi_ap_constant,
    multi_apq_constant, ExponentVector, Weight,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

/// Shipped default configurations, keyed by theorem.
pub fn default_config(theorem: TheoremId) -> ExperimentConfig {
    let text = match theorem {
        TheoremId::Czo => include_str!("../../configs/theorem11.toml"),
        TheoremId::CzoWeak => include_str!("../../configs/theorem12.toml"),
        TheoremId::Fractional => include_str!("../../configs/theorem13.toml"),
        TheoremId::FractionalWeak => include_str!("../../configs/theorem14.toml"),
    };
    ExperimentConfig::from_toml_str(text).expect("shipped configuration parses")
}

#[derive(Debug, Parser)]
#[command(
    name = "morrey-lab",
    version,
    about = "Numerical checks for multilinear singular and fractional integrals on weighted Morrey spaces",
    arg_required_else_help = true
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV/JSON/SVG output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized corpora (overrides the configuration).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output format for written reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Weight-class constants and A_∞ diagnostics of power weights.
    Weights(WeightsArgs),
    /// A norm of a bump or indicator function.
    Norm(NormArgs),
    /// Evaluate the configured operator on one corpus instance and dump the grid.
    Apply(ApplyArgs),
    /// Run a lemma, kernel or theorem check.
    Verify {
        #[command(subcommand)]
        check: Check,
    },
    /// Render a sweep CSV as an SVG plot of ratio against dilation.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 4.0)]
    half_width: f64,
    #[arg(long, default_value_t = 129)]
    points: usize,
    /// Family centre stride in nodes.
    #[arg(long, default_value_t = 4)]
    stride: usize,
    /// Smallest family radius (defaults to the spacing).
    #[arg(long)]
    base_radius: Option<f64>,
    /// Number of dyadic radii.
    #[arg(long, default_value_t = 7)]
    count: usize,
}

impl GridArgs {
    fn build(&self) -> Result<(Lattice, FamilySpec)> {
        let lattice = Lattice::new(self.dim, self.half_width, self.points)?;
        let r0 = self.base_radius.unwrap_or(lattice.spacing());
        Ok((lattice, FamilySpec::new(self.stride, r0, self.count)))
    }
}

#[derive(Debug, Args)]
struct WeightsArgs {
    /// Power exponent `a` of `|x|^a`; repeat for several weights.
    #[arg(long = "power", allow_negative_numbers = true, required = true)]
    powers: Vec<f64>,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Second exponent for the A_(p,q) constants.
    #[arg(long)]
    q: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Space {
    Lebesgue,
    WeakLebesgue,
    Morrey,
    WeakMorrey,
}

#[derive(Debug, Args)]
struct NormArgs {
    #[arg(long, value_enum)]
    space: Space,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0.5)]
    kappa: f64,
    /// Power weight exponent (unweighted when absent).
    #[arg(long, allow_negative_numbers = true)]
    power: Option<f64>,
    /// Bump `CENTER,SCALE`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "indicator")]
    bump: Option<Vec<f64>>,
    /// Indicator of the interval `LO,HI` (first axis).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    indicator: Option<Vec<f64>>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Debug, Args)]
struct ApplyArgs {
    /// Statement whose operator is applied (defaults to the configuration's).
    #[arg(long)]
    theorem: Option<String>,
    /// Corpus instance index.
    #[arg(long, default_value_t = 0)]
    instance: usize,
}

#[derive(Debug, Subcommand)]
enum Check {
    /// Product inequality for the singular-integral composite weight.
    Lemma31,
    /// Product inequality for the fractional composite weight.
    Lemma41,
    /// Calibrated pointwise tail bounds on a held-out corpus.
    Tail,
    /// Size and regularity constants of a kernel.
    KernelClass {
        #[arg(long, value_enum)]
        kernel: Option<KernelArg>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Weight-class implication chain.
    Corollaries {
        #[arg(long, default_value = "1.3")]
        theorem: String,
        /// Skip the ratio sweep at the end of the chain.
        #[arg(long)]
        no_sweep: bool,
    },
    /// Ratio sweep for one of the boundedness statements 1.1 to 1.4.
    Theorem { id: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KernelArg {
    HomogeneousOdd,
    FractionalSize,
    AngularStep,
    Zero,
}

impl From<KernelArg> for KernelTag {
    fn from(k: KernelArg) -> Self {
        match k {
            KernelArg::HomogeneousOdd => Self::HomogeneousOdd,
            KernelArg::FractionalSize => Self::FractionalSize,
            KernelArg::AngularStep => Self::AngularStep,
            KernelArg::Zero => Self::Zero,
        }
    }
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Sweep CSV written by `verify theorem`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    title: Option<String>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_INVALID,
            };
        }
    };
    if let Some(jobs) = cli.common.jobs {
        // a pool may already exist when called repeatedly in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match execute(&cli, &mut out) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

fn load_config(common: &Common, fallback: impl FnOnce() -> ExperimentConfig) -> Result<ExperimentConfig> {
    let mut config = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => fallback(),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn write_report<T: Serialize>(common: &Common, name: &str, value: &T) -> Result<()> {
    if let Some(dir) = &common.out {
        fs::create_dir_all(dir)?;
        let path = dir.join(format!("{name}.json"));
        serde_json::to_writer_pretty(fs::File::create(path)?, value)?;
    }
    Ok(())
}

fn verdict(out: &mut impl Write, pass: bool) -> Result<bool> {
    writeln!(out, "result: {}", if pass { "PASS" } else { "FAIL" })?;
    Ok(pass)
}

fn execute(cli: &Cli, out: &mut impl Write) -> Result<bool> {
    let common = &cli.common;
    match &cli.command {
        Command::Weights(args) => weights_command(args, out),
        Command::Norm(args) => norm_command(args, out),
        Command::Apply(args) => apply_command(common, args, out),
        Command::Report(args) => report_command(common, args, out),
        Command::Verify { check } => match check {
            Check::Lemma31 => lemma_command(common, false, out),
            Check::Lemma41 => lemma_command(common, true, out),
            Check::Tail => tail_command(common, out),
            Check::KernelClass { kernel, samples } => kernel_command(common, *kernel, *samples, out),
            Check::Corollaries { theorem, no_sweep } => {
                let theorem: TheoremId = theorem.parse()?;
                let config = load_config(common, || default_config(theorem))?;
                let r = check_corollaries(&config, theorem, !no_sweep)?;
                for c in r.components.iter().chain([&r.multiple, &r.composite]) {
                    writeln!(
                        out,
                        "{:28} coarse {:>12.6} fine {:>12.6} {:?}",
                        c.name, c.refinement.coarse, c.refinement.fine, c.refinement.trend
                    )?;
                }
                for (a, b, agree) in &r.equivalences {
                    writeln!(out, "{} finite = {}, {} finite = {}: agree = {agree}", a.name, a.finite, b.name, b.finite)?;
                }
                if let (Some(spread), Some(passed)) = (r.sweep_spread, r.sweep_passed) {
                    writeln!(out, "sweep spread {spread:.4} passed = {passed}")?;
                }
                write_report(common, "corollaries", &r)?;
                verdict(out, r.pass)
            }
            Check::Theorem { id } => {
                let theorem: TheoremId = id.parse()?;
                let config = load_config(common, || default_config(theorem))?;
                let r = sweep(&config, theorem)?;
                print_sweep(&r, out)?;
                if let Some(dir) = &common.out {
                    fs::create_dir_all(dir)?;
                    let stem = format!("theorem-{}", theorem.label());
                    match common.format {
                        Format::Csv => write_csv(&r, fs::File::create(dir.join(format!("{stem}.csv")))?)?,
                        Format::Json => write_json(&r, fs::File::create(dir.join(format!("{stem}.json")))?)?,
                    }
                }
                match r.verdict {
                    Some(pass) => verdict(out, pass),
                    None => {
                        writeln!(out, "result: NO VERDICT (hypotheses violated)")?;
                        Ok(false)
                    }
                }
            }
        },
    }
}

fn print_sweep(r: &RatioReport, out: &mut impl Write) -> Result<()> {
    writeln!(out, "theorem {}: {} instances", r.theorem, r.rows.len())?;
    for row in &r.rows {
        match row.ratio(r.theorem) {
            Some(v) => writeln!(
                out,
                "  #{:<3} x0 = {:>7.4} s = {:>8.5} c = {:>6.3} R = {:.6}",
                row.instance.id, row.instance.translation, row.instance.dilation, row.instance.amplitude, v
            )?,
            None => writeln!(out, "  #{:<3} rejected", row.instance.id)?,
        }
    }
    writeln!(out, "max {:.6} min {:.6} spread {:.4} (threshold {})", r.max, r.min, r.spread, r.threshold)?;
    if let Some(t) = &r.truncation {
        writeln!(
            out,
            "truncation: max change {:.4} at #{} (threshold {})",
            t.max_change, t.worst_instance, t.threshold
        )?;
    }
    for w in &r.warnings {
        writeln!(out, "warning: {w}")?;
    }
    Ok(())
}

fn weights_command(args: &WeightsArgs, out: &mut impl Write) -> Result<bool> {
    let (lattice, spec) = args.grid.build()?;
    let family = make_ball_family(&lattice, &spec)?;
    let ws = args
        .powers
        .iter()
        .map(|&a| Weight::power(lattice.dim(), a))
        .collect::<Result<Vec<_>>>()?;
    for (w, a) in ws.iter().zip(&args.powers) {
        writeln!(out, "w = |x|^{a}")?;
        let r = muckenhoupt_constant(w, args.p, &family)?;
        writeln!(out, "  A_{} constant: {:.6}", args.p, r.value)?;
        if let Some(q) = args.q {
            writeln!(out, "  A_({},{q}) constant: {:.6}", args.p, apq_constant(w, args.p, q, &family)?.value)?;
        }
        writeln!(out, "  doubling: {:.6}", doubling_constant(w, &family)?.value)?;
        let d = ainfty_diagnostics(w, &family)?;
        writeln!(out, "  reverse Jensen: {:.6}", d.reverse_jensen.value)?;
        if let Some(delta) = &d.delta {
            writeln!(out, "  fitted delta: {:.6}", delta.value)?;
        }
    }
    if ws.len() >= 2 {
        let exps = ExponentVector::new(vec![args.p; ws.len()])?;
        writeln!(out, "multiple A_P constant: {:.6}", multi_ap_constant(&ws, &exps, &family)?.value)?;
        if let Some(q) = args.q {
            writeln!(out, "multiple A_(P,{q}) constant: {:.6}", multi_apq_constant(&ws, &exps, q, &family)?.value)?;
        }
    }
    Ok(true)
}

fn norm_command(args: &NormArgs, out: &mut impl Write) -> Result<bool> {
    let (lattice, spec) = args.grid.build()?;
    for v in [&args.bump, &args.indicator].into_iter().flatten() {
        if v.len() != 2 {
            return Err(Error::Config("--bump and --indicator take two comma-separated values".into()));
        }
    }
    let f = match (&args.bump, &args.indicator) {
        (Some(b), _) => {
            let mut c = vec![0.0; lattice.dim()];
            c[0] = b[0];
            crate::harness::corpus::poly_bump(&lattice, &c, b[1])?
        }
        (None, Some(i)) => {
            let mut lo = vec![-lattice.half_width(); lattice.dim()];
            let mut hi = vec![lattice.half_width(); lattice.dim()];
            lo[0] = i[0];
            hi[0] = i[1];
            GridFunction::indicator_box(&lattice, &lo, &hi)?
        }
        (None, None) => return Err(Error::Config("pass --bump CENTER,SCALE or --indicator LO,HI".into())),
    };
    let w = match args.power {
        Some(a) => Weight::power(lattice.dim(), a)?,
        None => Weight::unit(lattice.dim()),
    };
    let value = match args.space {
        Space::Lebesgue => lebesgue_norm(&f, &w, args.p)?,
        Space::WeakLebesgue => weak_lebesgue_norm(&f, &w, args.p)?.value,
        Space::Morrey | Space::WeakMorrey => {
            let family = make_ball_family(&lattice, &spec)?;
            let mp = MorreyParams::new(args.p, args.kappa)?;
            let r = if args.space == Space::Morrey {
                morrey_norm(&f, &w, mp, &family)?
            } else {
                weak_morrey_norm(&f, &w, mp, &family)?
            };
            if let Some(b) = &r.ball {
                writeln!(out, "extremal ball: centre {:?}, radius {}", b.center(), b.radius())?;
            }
            r.value
        }
    };
    writeln!(out, "norm: {value:.8}")?;
    Ok(true)
}

fn apply_command(common: &Common, args: &ApplyArgs, out: &mut impl Write) -> Result<bool> {
    let config = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => default_config(TheoremId::Fractional),
    };
    let theorem = match &args.theorem {
        Some(t) => t.parse()?,
        None => config.theorem.unwrap_or(TheoremId::Fractional),
    };
    let exp = Experiment::new(&config, theorem)?;
    let instances = sweep_instances(&config);
    let inst = instances
        .get(args.instance)
        .ok_or_else(|| Error::Config(format!("instance {} out of range (corpus has {})", args.instance, instances.len())))?;
    let fs = exp.inputs_for(inst)?;
    let result = exp.apply(&fs)?;
    let lattice = &exp.lattice;
    let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    let path = dir.join(format!("apply-{}-{}.{}", theorem.label(), inst.id, match common.format {
        Format::Csv => "csv",
        Format::Json => "json",
    }));
    match common.format {
        Format::Csv => {
            let mut w = csv::Writer::from_path(&path)?;
            let mut header: Vec<String> = (0..lattice.dim()).map(|k| format!("x{k}")).collect();
            header.extend((0..fs.len()).map(|i| format!("f{}", i + 1)));
            header.push("output".into());
            w.write_record(&header)?;
            for i in 0..lattice.len() {
                let mut rec: Vec<String> = lattice.point(i).iter().map(|v| v.to_string()).collect();
                rec.extend(fs.iter().map(|f| f.value(i).to_string()));
                rec.push(result.value(i).to_string());
                w.write_record(&rec)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let grid = serde_json::json!({
                "instance": inst,
                "points": (0..lattice.len()).map(|i| lattice.point(i)).collect::<Vec<_>>(),
                "inputs": fs.iter().map(|f| f.values().to_vec()).collect::<Vec<_>>(),
                "output": result.values(),
            });
            serde_json::to_writer(fs::File::create(&path)?, &grid)?;
        }
    }
    writeln!(out, "wrote {}", path.display())?;
    Ok(true)
}

fn report_command(common: &Common, args: &ReportArgs, out: &mut impl Write) -> Result<bool> {
    let rows = read_csv(&args.input)?;
    let title = args.title.clone().unwrap_or_else(|| {
        args.input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "ratio sweep".into())
    });
    let svg = render_ratio_svg(&rows, &title)?;
    let dir = common
        .out
        .clone()
        .or_else(|| args.input.parent().map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    let stem = args.input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
    let path = dir.join(format!("{stem}.svg"));
    fs::write(&path, svg)?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(true)
}

/// Default product-lemma setting with `P = (2, 2)`: `|x|^{1/2}`, `|x|^{-1/2}`
/// for the singular-integral form, and `|x|^{0.2}`, `|x|^{-0.1}` for the
/// fractional form, where `w_2^{q_2} = |x|^{-2}` would not be integrable.
fn default_lemma_config(fractional: bool) -> ExperimentConfig {
    let mut c = default_config(TheoremId::Fractional);
    c.weights.power = if fractional { vec![0.2, -0.1] } else { vec![0.5, -0.5] };
    c
}

fn lemma_command(common: &Common, fractional: bool, out: &mut impl Write) -> Result<bool> {
    let config = load_config(common, || default_lemma_config(fractional))?;
    let lattice = config.build_lattice()?;
    let family = config.build_family(&lattice)?;
    let exps = config.exponent_vector()?;
    let exponents = if fractional {
        ProductExponents::Fractional(config.fractional_params()?)
    } else {
        ProductExponents::Czo(exps.clone())
    };
    let ws = config.build_weights()?;
    let report = check_product_lemma(&ws, &exponents, &family)?;
    let refinement = product_lemma_refinement(&ws, &exponents, &lattice, &config.family)?;
    writeln!(
        out,
        "configured weights: constant {:.6}, Hölder direction {}, refined constant {:.6} (change {:.4})",
        report.constant,
        if report.holder_holds { "holds" } else { "VIOLATED" },
        refinement.fine,
        refinement.relative_change
    )?;
    let random = random_positive_weights(&lattice, 2 * exps.m() * 10, config.seed)?;
    let mut random_ok = true;
    for group in random.chunks(exps.m()) {
        let r = check_product_lemma(group, &exponents, &family)?;
        random_ok &= r.holder_holds;
    }
    writeln!(
        out,
        "random positive weights: Hölder direction {} on {} tuples",
        if random_ok { "holds" } else { "VIOLATED" },
        random.len() / exps.m()
    )?;
    write_report(common, if fractional { "lemma41" } else { "lemma31" }, &report)?;
    let pass = report.holder_holds
        && random_ok
        && report.constant.is_finite()
        && refinement.relative_change <= config.tolerance.refinement;
    verdict(out, pass)
}

/// Default tail setting: `L = 4`, `N = 257`, odd kernel with `δ = 2h` and
/// the order-1/2 fractional integral.
fn default_tail_config() -> ExperimentConfig {
    let mut c = default_config(TheoremId::Czo);
    c.operator.alpha = Some(0.5);
    c
}

fn tail_command(common: &Common, out: &mut impl Write) -> Result<bool> {
    let config = load_config(common, default_tail_config)?;
    let lattice = config.build_lattice()?;
    let (calibration, held_out) = tail_corpora(&lattice)?;
    let m = config.m();
    let mut ops = vec![TailOperator::Czo {
        kernel: config.build_kernel()?,
        truncation: TruncationPolicy::in_cells(config.operator.truncation_cells, &lattice)?,
    }];
    if config.operator.alpha.is_some() {
        ops.push(TailOperator::Fractional(config.fractional_params()?));
    }
    let mut all = true;
    let mut reports = Vec::new();
    for op in &ops {
        for case in tail_cases(m) {
            let r = calibrate_tail(op, case, &calibration, &held_out)?;
            writeln!(
                out,
                "{:10} {:?}: C_tail {:.4}, held-out max {:.4}, violations {}/{}",
                r.operator, r.case, r.constant, r.held_out_max, r.violations, r.held_out_samples
            )?;
            all &= r.pass;
            reports.push(r);
        }
    }
    write_report(common, "tail", &reports)?;
    verdict(out, all)
}

fn kernel_command(common: &Common, kernel: Option<KernelArg>, samples: usize, out: &mut impl Write) -> Result<bool> {
    let mut config = load_config(common, || default_config(TheoremId::Czo))?;
    if let Some(k) = kernel {
        config.operator.kernel = k.into();
    }
    let spec = config.build_kernel()?;
    let r = verify_kernel_class(&spec, &SamplingPlan::new(samples, config.seed));
    writeln!(
        out,
        "declared A = {}, ε = {}: size {:.6}, regularity x {:.4}, y {:?} over {} samples",
        r.declared_constant, r.epsilon, r.size, r.regularity_x, r.regularity_y, r.samples
    )?;
    write_report(common, "kernel-class", &r)?;
    verdict(out, r.pass)
}

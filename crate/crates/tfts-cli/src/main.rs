mod config;
mod output;
mod svg;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{FileConfig, Overrides};
use output::{Manifest, RunConfig, RunDir};
use rayon::prelude::*;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;
use tfts::acceptance::{determinism_check, run_criterion, SuiteConfig, CRITERIA};
use tfts::artfima::{self as af, AcvfMethod, ArtfimaModel};
use tfts::grid::GridFunction;
use tfts::limits::{self, CoeffKind, WeightedMode};
use tfts::report::ExperimentReport;
use tfts::stats::ols_slope;
use tfts::tfcalc::{self as tc, DerivativeBackend, IntegralBackend, Sign};
use tfts::thp::{self, CovMethod, ThnFlavor, ThpParams};
use tfts::wiener::{self, Step, TestFunction};

#[derive(Parser, Debug)]
#[command(name = "tfts", version, about = "Tempered fractional time series: models, calculus and limit checks")]
struct Cli {
    /// Master seed for every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// TOML file with seed, jobs, out_dir, mc_paths and a [tolerances] table.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output root (else config out_dir, else $TFTS_OUT_DIR, else ./tfts-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Monte Carlo paths.
    #[arg(long, global = true)]
    paths: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// ARTFIMA(p, α, λ, q) models.
    Artfima {
        #[command(subcommand)]
        cmd: ArtfimaCmd,
    },
    /// Tempered fractional integrals and derivatives of sampled functions.
    Tfcalc(TfcalcArgs),
    /// Tempered Hermite processes.
    Thp {
        #[command(subcommand)]
        cmd: ThpCmd,
    },
    /// Norms and inner products in the Wiener-integrand spaces.
    Wiener {
        #[command(subcommand)]
        cmd: WienerCmd,
    },
    /// Invariance-principle checks for moving-average partial sums.
    Limits {
        #[command(subcommand)]
        cmd: LimitsCmd,
    },
    /// Special functions against stored high-precision values.
    SpecfunSelftest {
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// The acceptance criteria.
    Acceptance(AcceptanceArgs),
    /// Re-runs the command recorded in a manifest and compares its CSV output.
    Replay { manifest: PathBuf },
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    lambda: f64,
    /// AR coefficients, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    ar: Vec<f64>,
    /// MA coefficients, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    ma: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
}

impl ModelArgs {
    fn build(&self) -> Result<ArtfimaModel> {
        Ok(ArtfimaModel::new(self.ar.clone(), self.alpha, self.lambda, self.ma.clone(), self.sigma)?)
    }
}

#[derive(Subcommand, Debug)]
enum ArtfimaCmd {
    /// Draws X_1 … X_n.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
        /// Truncation of the fractional filter.
        #[arg(long)]
        trunc: Option<usize>,
    },
    /// Autocovariances γ_0 … γ_K.
    Acvf {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 100)]
        lags: usize,
        #[arg(long, value_enum, default_value_t = AcvfChoice::Quadrature)]
        method: AcvfChoice,
        #[arg(long)]
        svg: bool,
    },
    /// Spectral density on (0, π].
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 512)]
        points: usize,
        #[arg(long)]
        svg: bool,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum AcvfChoice {
    Quadrature,
    Hyp2f1,
    Ar1,
    WeightSum,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum Op {
    Integral,
    Derivative,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum SignArg {
    Plus,
    Minus,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum Backend {
    Spectral,
    Quadrature,
    Marchaud,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Bump {
    Gauss,
    Odd,
    Mixture,
}

#[derive(Args, Debug)]
struct TfcalcArgs {
    #[arg(long, value_enum)]
    op: Op,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    lambda: f64,
    #[arg(long, value_enum, default_value_t = SignArg::Plus)]
    sign: SignArg,
    #[arg(long, value_enum, default_value_t = Backend::Spectral)]
    backend: Backend,
    /// CSV with columns x,f on a uniform grid.
    #[arg(long, conflicts_with = "bump")]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    bump: Option<Bump>,
    #[arg(long, default_value_t = -50.0, allow_hyphen_values = true)]
    x_min: f64,
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    #[arg(long, default_value_t = 2001)]
    count: usize,
}

#[derive(Args, Debug, Clone)]
struct ThpArgs {
    #[arg(long = "H")]
    h: f64,
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
}

impl ThpArgs {
    fn build(&self) -> Result<ThpParams> {
        Ok(ThpParams::new(self.h, self.lambda, self.sigma)?)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Flavor {
    Continuous,
    Discrete,
}

#[derive(Subcommand, Debug)]
enum ThpCmd {
    /// R(t, s) on all pairs of the given times, by every route.
    Cov {
        #[command(flatten)]
        p: ThpArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
    },
    /// One Gaussian path on a uniform grid.
    Path {
        #[command(flatten)]
        p: ThpArgs,
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        t_max: f64,
    },
    /// Spectral density of the increments and its inertial-range slope.
    Spectrum {
        #[command(flatten)]
        p: ThpArgs,
        #[arg(long, value_enum, default_value_t = Flavor::Continuous)]
        flavor: Flavor,
        #[arg(long, default_value_t = 1000)]
        ell: usize,
        #[arg(long, default_value_t = 400)]
        points: usize,
        #[arg(long)]
        svg: bool,
    },
}

#[derive(Subcommand, Debug)]
enum WienerCmd {
    /// ‖f‖ by the time-domain and spectral forms, optionally ⟨f, g⟩.
    Norm {
        #[arg(long = "H")]
        h: f64,
        #[arg(long)]
        lambda: f64,
        /// CSV with header lo,hi,a (step function) or x,f (uniform grid).
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct SchemeArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    lambda: f64,
    /// power or artfima.
    #[arg(long, default_value = "power")]
    kind: CoeffKind,
}

#[derive(Subcommand, Debug)]
enum LimitsCmd {
    /// Var n^{−H}S(nt) against the limit along a list of n.
    Variance {
        #[command(flatten)]
        s: SchemeArgs,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [1024, 2048, 4096])]
        n: Vec<usize>,
        #[arg(long)]
        svg: bool,
    },
    /// Covariance matrix of n^{−H}S(nt) on a list of times.
    Fdd {
        #[command(flatten)]
        s: SchemeArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
        #[arg(long, default_value_t = 4096)]
        n: usize,
    },
    /// Monte Carlo of the normalized partial sums.
    Mc {
        #[command(flatten)]
        s: SchemeArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0])]
        t: Vec<f64>,
        #[arg(long, default_value_t = 1024)]
        n: usize,
    },
    /// Increment moment ratios on dyadic cells of [0, 1].
    Tightness {
        #[command(flatten)]
        s: SchemeArgs,
        #[arg(long, default_value_t = 16)]
        cells: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [256, 1024, 4096])]
        n: Vec<usize>,
    },
    /// Weighted sums Σ f(k/n) X_k against the Wiener-integral variance.
    Weighted {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        lambda: f64,
        /// CSV with header lo,hi,a (step function) or x,f (uniform grid).
        #[arg(long)]
        f: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [512, 1024, 2048])]
        n: Vec<usize>,
        /// Monte Carlo at the last n instead of the exact variance only.
        #[arg(long)]
        mc: bool,
    },
}

#[derive(Args, Debug)]
struct AcceptanceArgs {
    /// Every criterion, including the determinism rerun.
    #[arg(long, conflicts_with = "criterion")]
    all: bool,
    /// Comma-separated criterion numbers.
    #[arg(long, value_delimiter = ',')]
    criterion: Vec<u8>,
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli, args) {
        Ok(fails) if fails.is_empty() => ExitCode::SUCCESS,
        Ok(fails) => {
            eprintln!("{} check(s) failed:", fails.len());
            for f in &fails {
                eprintln!("  {f}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli, args: Vec<String>) -> Result<Vec<String>> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let ov = Overrides { seed: cli.seed, jobs: cli.jobs, out: cli.out.clone(), mc_paths: cli.paths };
    let cfg = config::resolve(file, &ov)?;
    if let Cmd::Replay { manifest } = &cli.cmd {
        return replay(manifest, &cfg.out_dir);
    }
    let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build_global();
    execute(&cli.cmd, &cfg, args[1..].to_vec()).map(|(_, f)| f)
}

fn replay(manifest: &Path, out_root: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(manifest).with_context(|| format!("reading {}", manifest.display()))?;
    let m: Manifest = serde_json::from_str(&text).with_context(|| format!("parsing {}", manifest.display()))?;
    let mut argv = vec!["tfts".to_string()];
    argv.extend(m.args.iter().cloned());
    let cli = Cli::try_parse_from(&argv).context("the recorded arguments no longer parse")?;
    if matches!(cli.cmd, Cmd::Replay { .. }) {
        bail!("a replay manifest cannot be replayed");
    }
    let cfg = RunConfig { out_dir: out_root.join("replay"), ..m.config.clone() };
    let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build_global();
    let (dir, mut fails) = execute(&cli.cmd, &cfg, m.args.clone())?;
    let old_dir = manifest.parent().unwrap_or(Path::new("."));
    let mut same = 0;
    for f in m.files.iter().filter(|f| f.ends_with(".csv")) {
        let a = std::fs::read(old_dir.join(f)).with_context(|| format!("reading recorded {f}"))?;
        let b = std::fs::read(dir.join(f)).with_context(|| format!("reading replayed {f}"))?;
        if a == b {
            same += 1;
        } else {
            fails.push(format!("replay: {f} differs from the recorded run"));
        }
    }
    println!("replay: {same} CSV file(s) byte-identical to {}", old_dir.display());
    Ok(fails)
}

fn run_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Artfima { cmd: ArtfimaCmd::Simulate { .. } } => "artfima-simulate",
        Cmd::Artfima { cmd: ArtfimaCmd::Acvf { .. } } => "artfima-acvf",
        Cmd::Artfima { cmd: ArtfimaCmd::Spectrum { .. } } => "artfima-spectrum",
        Cmd::Tfcalc(_) => "tfcalc",
        Cmd::Thp { cmd: ThpCmd::Cov { .. } } => "thp-cov",
        Cmd::Thp { cmd: ThpCmd::Path { .. } } => "thp-path",
        Cmd::Thp { cmd: ThpCmd::Spectrum { .. } } => "thp-spectrum",
        Cmd::Wiener { .. } => "wiener-norm",
        Cmd::Limits { cmd: LimitsCmd::Variance { .. } } => "limits-variance",
        Cmd::Limits { cmd: LimitsCmd::Fdd { .. } } => "limits-fdd",
        Cmd::Limits { cmd: LimitsCmd::Mc { .. } } => "limits-mc",
        Cmd::Limits { cmd: LimitsCmd::Tightness { .. } } => "limits-tightness",
        Cmd::Limits { cmd: LimitsCmd::Weighted { .. } } => "limits-weighted",
        Cmd::SpecfunSelftest { .. } => "specfun-selftest",
        Cmd::Acceptance(_) => "acceptance",
        Cmd::Replay { .. } => "replay",
    }
}

fn execute(cmd: &Cmd, cfg: &RunConfig, args: Vec<String>) -> Result<(PathBuf, Vec<String>)> {
    let start = Instant::now();
    let mut rd = RunDir::create(&cfg.out_dir, run_name(cmd))?;
    match cmd {
        Cmd::Artfima { cmd } => artfima(cmd, cfg, &mut rd)?,
        Cmd::Tfcalc(a) => tfcalc(a, cfg, &mut rd)?,
        Cmd::Thp { cmd } => thp_cmd(cmd, cfg, &mut rd)?,
        Cmd::Wiener { cmd: WienerCmd::Norm { h, lambda, f, g } } => wiener_norm(*h, *lambda, f, g.as_deref(), cfg, &mut rd)?,
        Cmd::Limits { cmd } => limits_cmd(cmd, cfg, &mut rd)?,
        Cmd::SpecfunSelftest { tol: t } => rd.report("report", &tfts::specfun::selftest(*t))?,
        Cmd::Acceptance(a) => acceptance(a, cfg, &mut rd)?,
        Cmd::Replay { .. } => bail!("replay cannot be nested"),
    }
    let dir = rd.dir.clone();
    let secs = start.elapsed().as_secs_f64();
    rd.line(format!("runtime {secs:.2} s, output in {}", dir.display()));
    let fails = rd.finish(args, cfg, secs)?;
    Ok((dir, fails))
}

fn artfima(cmd: &ArtfimaCmd, cfg: &RunConfig, rd: &mut RunDir) -> Result<()> {
    match cmd {
        ArtfimaCmd::Simulate { model, n, trunc } => {
            let m = model.build()?;
            let x = af::simulate(&m, *n, cfg.seed, *trunc)?;
            let rows: Vec<Vec<f64>> = x.samples.iter().enumerate().map(|(k, v)| vec![(k + 1) as f64, *v]).collect();
            rd.table("data.csv", &["k", "x"], &rows)?;
            let (mean, var) = tfts::stats::mean_var(&x.samples);
            let mut rep = ExperimentReport::new("artfima sample moments").param("alpha", m.alpha).param("lambda", m.lambda);
            rep.seed = Some(cfg.seed);
            rep.push("sample mean", mean, 0.0, mean.abs(), f64::INFINITY);
            if m.is_pure() {
                let g0 = af::acvf_quadrature(&m, 0)?.values[0];
                rep.relative("sample variance / γ_0", var, g0, f64::INFINITY);
            } else {
                rep.push("sample variance", var, var, 0.0, f64::INFINITY);
            }
            rep.note("sample moments are informational; their spread depends on n and the memory");
            rd.report("report", &rep)?;
        }
        ArtfimaCmd::Acvf { model, lags, method, svg } => {
            let m = model.build()?;
            let a = match method {
                AcvfChoice::Quadrature => af::acvf_quadrature(&m, *lags)?,
                AcvfChoice::Hyp2f1 => af::acvf_hyp2f1(&m, *lags)?,
                AcvfChoice::Ar1 => af::acvf_ar1(&m, *lags)?,
                AcvfChoice::WeightSum => af::acvf_weight_sum(&m, *lags)?,
            };
            let asym = |k: usize| if k > 0 && m.is_pure() { af::acvf_asymptotic(&m, k).unwrap_or(f64::NAN) } else { f64::NAN };
            let rows: Vec<Vec<f64>> = a.values.iter().enumerate().map(|(k, v)| vec![k as f64, *v, asym(k)]).collect();
            rd.table("data.csv", &["k", "gamma", "asymptote"], &rows)?;
            let mut rep = ExperimentReport::new(format!("artfima acvf ({:?})", a.method)).param("alpha", m.alpha).param("lambda", m.lambda);
            rep.check("autocovariance matrix positive semidefinite", a.is_positive_semidefinite((*lags + 1).min(256)));
            if a.method != AcvfMethod::Quadrature {
                let k_cmp = (*lags).min(50);
                let q = af::acvf_quadrature(&m, k_cmp)?;
                for k in 0..=k_cmp {
                    rep.relative(format!("γ_{k} vs quadrature"), a.values[k], q.values[k], cfg.tolerances.acvf_calibration);
                }
            }
            if let Some(n) = &a.note {
                rep.note(n.clone());
            }
            rd.report("report", &rep)?;
            if *svg {
                let g = svg::Series { name: "|γ_k|", points: rows.iter().skip(1).map(|r| (r[0], r[1].abs())).collect() };
                let s = svg::Series { name: "asymptote", points: rows.iter().skip(1).map(|r| (r[0], r[2])).collect() };
                rd.write("acvf.svg", &svg::loglog("ARTFIMA autocovariance", "lag k", "|γ_k|", &[g, s]))?;
            }
        }
        ArtfimaCmd::Spectrum { model, points, svg } => {
            let m = model.build()?;
            if *points == 0 {
                bail!("points must be positive");
            }
            let rows: Vec<Vec<f64>> = (1..=*points)
                .map(|i| {
                    let w = std::f64::consts::PI * i as f64 / *points as f64;
                    vec![w, m.spectral_density(w)]
                })
                .collect();
            rd.table("data.csv", &["omega", "density"], &rows)?;
            rd.line(format!("f(π/{points}) = {:.9e}, f(π) = {:.9e}", rows[0][1], rows[rows.len() - 1][1]));
            if *svg {
                let s = svg::Series { name: "f(ω)", points: rows.iter().map(|r| (r[0], r[1])).collect() };
                rd.write("spectrum.svg", &svg::loglog("ARTFIMA spectral density", "ω", "f(ω)", &[s]))?;
            }
        }
    }
    Ok(())
}

fn bump_fn(b: Bump) -> fn(f64) -> f64 {
    match b {
        Bump::Gauss => |x| (-x * x).exp(),
        Bump::Odd => |x| x * (-x * x / 2.0).exp(),
        Bump::Mixture => |x| (-(x - 1.0) * (x - 1.0) * 2.0).exp() + 0.5 * (-(x + 1.5) * (x + 1.5)).exp(),
    }
}

fn tfcalc(a: &TfcalcArgs, cfg: &RunConfig, rd: &mut RunDir) -> Result<()> {
    let f = match (&a.input, a.bump) {
        (Some(p), _) => read_grid(p)?,
        (None, Some(b)) => GridFunction::from_fn(a.x_min, a.step, a.count, bump_fn(b))?,
        (None, None) => bail!("give --input or --bump"),
    };
    let sign = match a.sign {
        SignArg::Plus => Sign::Plus,
        SignArg::Minus => Sign::Minus,
    };
    let (out, back) = match (a.op, a.backend) {
        (Op::Integral, Backend::Spectral) => {
            let o = tc::tempered_frac_integral(&f, a.alpha, a.lambda, sign, IntegralBackend::Spectral)?;
            let b = tc::tempered_frac_derivative(&o.values, a.alpha, a.lambda, sign, DerivativeBackend::Spectral)?;
            (o, b)
        }
        (Op::Integral, Backend::Quadrature) => {
            let o = tc::tempered_frac_integral(&f, a.alpha, a.lambda, sign, IntegralBackend::Quadrature)?;
            let b = tc::tempered_frac_derivative(&o.values, a.alpha, a.lambda, sign, DerivativeBackend::Marchaud)?;
            (o, b)
        }
        (Op::Derivative, Backend::Spectral) => {
            let o = tc::tempered_frac_derivative(&f, a.alpha, a.lambda, sign, DerivativeBackend::Spectral)?;
            let b = tc::tempered_frac_integral(&o.values, a.alpha, a.lambda, sign, IntegralBackend::Spectral)?;
            (o, b)
        }
        (Op::Derivative, Backend::Marchaud) => {
            let o = tc::tempered_frac_derivative(&f, a.alpha, a.lambda, sign, DerivativeBackend::Marchaud)?;
            let b = tc::tempered_frac_integral(&o.values, a.alpha, a.lambda, sign, IntegralBackend::Quadrature)?;
            (o, b)
        }
        (Op::Integral, Backend::Marchaud) => bail!("the Marchaud backend computes derivatives"),
        (Op::Derivative, Backend::Quadrature) => bail!("the quadrature backend computes integrals; use marchaud"),
    };
    let rows: Vec<Vec<f64>> = (0..f.len()).map(|i| vec![f.x(i), f.samples[i], out.values.samples[i]]).collect();
    rd.table("data.csv", &["x", "f", "result"], &rows)?;
    if let Some(w) = out.warning() {
        rd.line(format!("warning: {w}"));
    }
    let err = back.values.axpby(1.0, &f, -1.0)?.l2_norm() / f.l2_norm();
    let mut rep = ExperimentReport::new(format!("tfcalc {:?} round trip", a.op)).param("alpha", a.alpha).param("lambda", a.lambda);
    rep.push("‖inverse(op f) − f‖ / ‖f‖", err, 0.0, err, cfg.tolerances.inverse_pair);
    rep.push("input boundary leak", out.boundary_leak, 0.0, out.boundary_leak, f64::INFINITY);
    rd.report("report", &rep)?;
    Ok(())
}

fn thp_cmd(cmd: &ThpCmd, cfg: &RunConfig, rd: &mut RunDir) -> Result<()> {
    let tol = &cfg.tolerances;
    match cmd {
        ThpCmd::Cov { p, t } => {
            let p = p.build()?;
            let mut rows = Vec::new();
            let mut rep = ExperimentReport::new("thp covariance routes").param("H", p.h).param("lambda", p.lambda);
            for (i, &ti) in t.iter().enumerate() {
                for &si in &t[i..] {
                    let sp = thp::thp_covariance(&p, ti, si, CovMethod::Spectral)?;
                    let be = thp::thp_covariance(&p, ti, si, CovMethod::Bessel)?;
                    let ke = thp::thp_covariance(&p, ti, si, CovMethod::KernelL2)?;
                    rep.relative(format!("Bessel R({ti}, {si})"), be, sp, tol.thp_agreement);
                    rep.relative(format!("kernel R({ti}, {si})"), ke, sp, tol.thp_agreement);
                    rows.push(vec![ti, si, sp, be, ke]);
                }
            }
            rd.table("data.csv", &["t", "s", "spectral", "bessel", "kernel"], &rows)?;
            rd.report("report", &rep)?;
        }
        ThpCmd::Path { p, n, t_max } => {
            let p = p.build()?;
            let z = thp::synthesize_path(&p, *n, *t_max, cfg.seed, 0)?;
            let rows: Vec<Vec<f64>> = (0..z.len()).map(|i| vec![z.x(i), z.samples[i]]).collect();
            rd.table("data.csv", &["t", "z"], &rows)?;
            rd.line(format!("{} grid points, Z({t_max}) = {:.9e}", z.len(), z.samples[z.len() - 1]));
        }
        ThpCmd::Spectrum { p, flavor, ell, points, svg } => {
            let p = p.build()?;
            let fl = match flavor {
                Flavor::Continuous => ThnFlavor::Continuous,
                Flavor::Discrete => ThnFlavor::Discrete,
            };
            let lo = (p.lambda / 100.0).max(1e-6);
            let hi = match fl {
                ThnFlavor::Continuous => 100.0,
                ThnFlavor::Discrete => std::f64::consts::PI,
            };
            let np = (*points).max(2);
            let mut rows = Vec::with_capacity(np);
            for i in 0..np {
                let w = (lo.ln() + (hi / lo).ln() * i as f64 / (np - 1) as f64).exp().min(hi);
                let d = thp::thn_spectral_density(&p, w, fl, *ell)?;
                rows.push(vec![w, d.value, d.tail_bound]);
            }
            rd.table("data.csv", &["omega", "density", "tail_bound"], &rows)?;
            let mut rep = ExperimentReport::new("thp spectral slope").param("H", p.h).param("lambda", p.lambda);
            let (a, b) = (10.0 * p.lambda, 0.5);
            let expect = 1.0 - 2.0 * p.h;
            if a < b {
                let (mut xs, mut ys) = (Vec::new(), Vec::new());
                for i in 0..200 {
                    let lw = a.ln() + (b / a).ln() * i as f64 / 199.0;
                    xs.push(lw);
                    ys.push(thp::thn_spectral_density(&p, lw.exp(), ThnFlavor::Continuous, 0)?.value.ln());
                }
                let slope = ols_slope(&xs, &ys);
                rep.push(
                    format!("log-log slope on [{a}, {b}] vs 1 − 2H"),
                    slope,
                    expect,
                    ((slope - expect) / expect).abs(),
                    tol.kolmogorov_slope,
                );
            } else {
                rep.note(format!("inertial range [10λ, 0.5] is empty for λ = {}", p.lambda));
            }
            rd.report("report", &rep)?;
            if *svg {
                let s = svg::Series { name: "density", points: rows.iter().map(|r| (r[0], r[1])).collect() };
                let c = thp::thn_spectral_density(&p, 0.5, ThnFlavor::Continuous, 0)?.value / 0.5f64.powf(expect);
                let r = svg::Series { name: "ω^(1−2H)", points: rows.iter().map(|r| (r[0], c * r[0].powf(expect))).collect() };
                rd.write("spectrum.svg", &svg::loglog("Tempered Hermite noise spectrum", "ω", "density", &[s, r]))?;
            }
        }
    }
    Ok(())
}

fn wiener_norm(h: f64, lambda: f64, f: &Path, g: Option<&Path>, cfg: &RunConfig, rd: &mut RunDir) -> Result<()> {
    let tol = cfg.tolerances.plancherel;
    let f = read_function(f)?;
    let g = g.map(read_function).transpose()?;
    let mut rep = ExperimentReport::new("wiener norms").param("H", h).param("lambda", lambda);
    let norm2 = |name: &str, x: &TestFunction, rep: &mut ExperimentReport| -> Result<f64> {
        let a2 = wiener::a2_inner(x, x, h, lambda)?;
        rep.push(format!("‖{name}‖²_A2"), a2.value, a2.value, a2.est_error, f64::INFINITY);
        let bound = tfts::specfun::gamma(h - 0.5).powi(2) * lambda.powf(1.0 - 2.0 * h) * x.l2_norm().powi(2);
        rep.check(format!("‖{name}‖²_A2 ≤ Γ(H−½)² λ^(1−2H) ‖{name}‖²_L2 = {bound:.6e}"), a2.value <= bound * (1.0 + 1e-12));
        if h < 1.0 {
            for b in [IntegralBackend::Spectral, IntegralBackend::Quadrature] {
                let a1 = wiener::a1_inner(x, x, h, lambda, b)?;
                rep.push(format!("‖{name}‖²_A1 ({b:?}) vs A2"), a1.value, a2.value, (a1.value - a2.value).abs() / a2.value, tol);
            }
        }
        Ok(a2.value)
    };
    let nf = norm2("f", &f, &mut rep)?;
    if let Some(g) = &g {
        let ng = norm2("g", g, &mut rep)?;
        let ip = wiener::a2_inner(&f, g, h, lambda)?;
        rep.push("<f, g>_A2", ip.value, ip.value, ip.est_error, f64::INFINITY);
        rep.check("Cauchy–Schwarz", ip.value * ip.value <= nf * ng * (1.0 + 1e-12));
        if h < 1.0 {
            let a1 = wiener::a1_inner(&f, g, h, lambda, IntegralBackend::Spectral)?;
            rep.push("<f, g>_A1 vs A2", a1.value, ip.value, (a1.value - ip.value).abs() / (nf * ng).sqrt(), tol);
        }
    }
    if h >= 1.0 {
        rep.note("the time-domain form needs H < 1; only the spectral form is reported");
    }
    rd.report("report", &rep)?;
    Ok(())
}

fn limits_cmd(cmd: &LimitsCmd, cfg: &RunConfig, rd: &mut RunDir) -> Result<()> {
    let tol = &cfg.tolerances;
    match cmd {
        LimitsCmd::Variance { s, t, n, svg } => {
            let rep = limits::limit_variance_check(s.alpha, s.lambda, s.kind, *t, n, tol.partial_sum_variance)?;
            let rows: Vec<Vec<f64>> =
                n.iter().zip(&rep.rows).map(|(n, r)| vec![*n as f64, r.computed, r.reference, r.computed / r.reference - 1.0]).collect();
            rd.table("data.csv", &["n", "prelimit", "limit", "relative_error"], &rows)?;
            rd.report("report", &rep)?;
            if *svg {
                let e = svg::Series { name: "|relative error|", points: rows.iter().map(|r| (r[0], r[3].abs())).collect() };
                rd.write("convergence.svg", &svg::loglog("Partial-sum variance", "n", "|relative error|", &[e]))?;
            }
        }
        LimitsCmd::Fdd { s, t, n } => {
            let rep = limits::fdd_covariance_check(s.alpha, s.lambda, s.kind, t, *n, tol.fdd_covariance, tol.polarization)?;
            rd.report("report", &rep)?;
        }
        LimitsCmd::Mc { s, t, n } => {
            let o = limits::invariance_mc(s.alpha, s.lambda, s.kind, t, *n, cfg.mc_paths, cfg.seed, tol.mc_standard_errors, tol.ks_level)?;
            let mut rows = Vec::new();
            for i in 0..t.len() {
                for j in i..t.len() {
                    rows.push(vec![t[i], t[j], o.empirical[i][j], o.std_error[i][j], o.limit[i][j], o.prelimit[i][j]]);
                }
            }
            rd.table("data.csv", &["t", "s", "empirical", "std_error", "limit", "prelimit"], &rows)?;
            let mut rep = o.report;
            rep.seed = Some(cfg.seed);
            rd.report("report", &rep)?;
        }
        LimitsCmd::Tightness { s, cells, n } => {
            if *cells == 0 {
                bail!("cells must be positive");
            }
            let c = *cells as f64;
            let pairs: Vec<(f64, f64)> = (0..*cells).map(|k| (k as f64 / c, (k + 1) as f64 / c)).collect();
            let rep = limits::tightness_probe(s.alpha, s.lambda, s.kind, &pairs, n, tol.tightness_spread, tol.tightness_stability)?;
            rd.report("report", &rep)?;
        }
        LimitsCmd::Weighted { alpha, lambda, f, n, mc } => {
            let f = read_function(f)?;
            let mode = if *mc { WeightedMode::MonteCarlo { paths: cfg.mc_paths, seed: cfg.seed } } else { WeightedMode::Deterministic };
            let mut rep = limits::weighted_sum_check(&f, *alpha, *lambda, n, mode, tol.weighted_variance, tol.mc_standard_errors)?;
            if *mc {
                rep.seed = Some(cfg.seed);
            }
            rd.report("report", &rep)?;
        }
    }
    Ok(())
}

fn acceptance(a: &AcceptanceArgs, cfg: &RunConfig, rd: &mut RunDir) -> Result<()> {
    let mut ids: Vec<u8> = if a.all { (1..=15).collect() } else { a.criterion.clone() };
    if ids.is_empty() {
        bail!("give --all or --criterion");
    }
    ids.sort_unstable();
    ids.dedup();
    if let Some(bad) = ids.iter().find(|&&i| !(1..=15).contains(&i)) {
        bail!("no criterion {bad}; valid numbers are 1 to 15");
    }
    let suite = SuiteConfig { seed: cfg.seed, mc_paths: cfg.mc_paths, tolerances: cfg.tolerances.clone() };
    let single: Vec<u8> = ids.iter().copied().filter(|&i| i != 15).collect();
    let run_all = || -> Result<Vec<(u8, ExperimentReport)>> {
        single
            .par_iter()
            .map(|&id| {
                let t = Instant::now();
                let r = run_criterion(id, &suite).with_context(|| format!("criterion {id}"))?;
                eprintln!("criterion {id} finished in {:.1} s", t.elapsed().as_secs_f64());
                Ok((id, r))
            })
            .collect()
    };
    let first = run_all()?;
    for (id, rep) in &first {
        rd.report(&format!("criterion_{id:02}"), rep)?;
    }
    if ids.contains(&15) {
        if single.is_empty() {
            bail!("criterion 15 compares reruns of other criteria; add them or use --all");
        }
        let second = run_all()?;
        let csv = |v: &[(u8, ExperimentReport)]| v.iter().map(|(i, r)| (*i, r.to_csv())).collect::<Vec<_>>();
        let det = determinism_check(&csv(&first), &csv(&second));
        rd.report("criterion_15", &det)?;
    }
    let passed = first.iter().filter(|(_, r)| r.pass).count();
    rd.line(format!("{passed} of {} single-run criteria passed", first.len()));
    for (id, title) in CRITERIA.iter().filter(|c| ids.contains(&c.0)) {
        rd.line(format!("  {id:>2} {title}"));
    }
    Ok(())
}

fn read_grid(path: &Path) -> Result<GridFunction> {
    match read_function(path)? {
        TestFunction::Grid(g) => Ok(g),
        TestFunction::Elementary(_) => bail!("{}: expected columns x,f", path.display()),
    }
}

/// Header lo,hi,a gives a step function; x,f gives uniform samples.
fn read_function(path: &Path) -> Result<TestFunction> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.to_ascii_lowercase()).collect();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.with_context(|| format!("{}: row {}", path.display(), i + 2))?;
        let vals = rec
            .iter()
            .map(|s| s.parse::<f64>().with_context(|| format!("{}: row {}: '{s}' is not a number", path.display(), i + 2)))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(vals);
    }
    match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["lo", "hi", "a"] => Ok(TestFunction::elementary(rows.iter().map(|r| Step { lo: r[0], hi: r[1], a: r[2] }).collect())?),
        ["x", "f"] => {
            if rows.len() < 2 {
                bail!("{}: need at least two samples", path.display());
            }
            let step = rows[1][0] - rows[0][0];
            for (i, w) in rows.windows(2).enumerate() {
                if ((w[1][0] - w[0][0]) - step).abs() > 1e-9 * step.abs().max(1.0) {
                    bail!("{}: grid is not uniform at row {}", path.display(), i + 3);
                }
            }
            let g = GridFunction::new(rows[0][0], step, rows.iter().map(|r| r[1]).collect())?;
            Ok(TestFunction::grid(g)?)
        }
        other => bail!("{}: header must be lo,hi,a or x,f, got {}", path.display(), other.join(",")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    fn run_args(a: &[&str]) -> Result<Vec<String>> {
        let args: Vec<String> = std::iter::once("tfts").chain(a.iter().copied()).map(String::from).collect();
        run(Cli::try_parse_from(&args)?, args)
    }

    fn manifest(dir: &Path) -> Manifest {
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
    }

    #[test]
    fn config_file_feeds_the_manifest_and_replay_matches() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.toml");
        std::fs::write(&cfg, "seed = 5\nmc_paths = 400\n[tolerances]\nmc_standard_errors = 5.0\n").unwrap();
        let out = dir.path().join("out");
        let o = out.to_str().unwrap();
        let fails = run_args(&[
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            o,
            "limits",
            "mc",
            "--alpha",
            "0.6",
            "--lambda",
            "1",
            "--kind",
            "artfima",
            "--n",
            "32",
        ])
        .unwrap();
        assert!(fails.is_empty(), "{fails:?}");
        let run_dir = out.join("limits-mc");
        let m = manifest(&run_dir);
        assert_eq!((m.config.seed, m.config.mc_paths, m.config.tolerances.mc_standard_errors), (5, 400, 5.0));
        for f in ["data.csv", "report.csv", "report.json", "summary.txt"] {
            assert!(m.files.iter().any(|x| x == f) && run_dir.join(f).exists(), "{f}");
        }
        let replay = run_args(&["--out", o, "replay", run_dir.join("manifest.json").to_str().unwrap()]).unwrap();
        assert!(replay.is_empty(), "{replay:?}");
        assert_eq!(std::fs::read(run_dir.join("data.csv")).unwrap(), std::fs::read(out.join("replay/limits-mc/data.csv")).unwrap());
    }

    #[test]
    fn bad_config_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("bad.toml");
        std::fs::write(&cfg, "[tolerances]\nno_such_check = 1.0\n").unwrap();
        let e = run_args(&["--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "specfun-selftest"]).unwrap_err();
        assert!(format!("{e:#}").contains("no_such_check"), "{e:#}");
    }

    #[test]
    fn failed_checks_are_returned_and_recorded() {
        let dir = tempfile::tempdir().unwrap();
        let o = dir.path().to_str().unwrap();
        let fails = run_args(&["--out", o, "limits", "variance", "--alpha", "0.3", "--lambda", "1", "--n", "256,512"]).unwrap();
        assert_eq!(fails.len(), 1, "{fails:?}");
        let m = manifest(&dir.path().join("limits-variance"));
        assert!(!m.pass && m.failures == fails);
    }

    #[test]
    fn acceptance_needs_a_selection() {
        let dir = tempfile::tempdir().unwrap();
        let o = dir.path().to_str().unwrap();
        assert!(run_args(&["--out", o, "acceptance"]).is_err());
        assert!(run_args(&["--out", o, "acceptance", "--criterion", "16"]).is_err());
        assert!(run_args(&["--out", o, "acceptance", "--criterion", "15"]).is_err());
        let fails = run_args(&["--out", o, "acceptance", "--criterion", "1,15"]).unwrap();
        assert!(fails.is_empty(), "{fails:?}");
        assert!(dir.path().join("acceptance/criterion_15.csv").exists());
    }

    #[test]
    fn function_files_parse() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        std::fs::write(&p, "lo,hi,a\n0,1,1\n1,2,-0.5\n").unwrap();
        assert!(matches!(read_function(&p).unwrap(), TestFunction::Elementary(s) if s.len() == 2));
        std::fs::write(&p, "x,f\n0,0\n0.5,1\n1,0\n").unwrap();
        assert!(matches!(read_function(&p).unwrap(), TestFunction::Grid(g) if g.len() == 3));
        std::fs::write(&p, "x,f\n0,0\n0.5,1\n1.2,0\n").unwrap();
        assert!(read_function(&p).is_err());
        std::fs::write(&p, "u,v\n0,0\n").unwrap();
        assert!(read_function(&p).is_err());
    }
}

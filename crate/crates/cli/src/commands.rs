use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heightlab::canonical::call_silverman::call_silverman_with;
use heightlab::canonical::lattice_limit::lattice_canonical_with;
use heightlab::canonical::series::height_series_with;
use heightlab::canonical::wehler_nef::nef_canonical_wehler_with;
use heightlab::canonical::{zf_membership, Budget, CanonicalEstimate, TruncationReason};
use heightlab::dynsys::{system_spectral, DynSystem, SystemPoint};
use heightlab::numlin::{RatVec, DEFAULT_PRECISION};
use heightlab::orbits::{detect_preperiodic_with, gap_bound_check, northcott_scan, orbit_intersection_with};
use serde_json::Value;

use crate::error::CliError;
use crate::report::{enclosure, mid, radius, Report};
use crate::schema::{parse_point, SystemDescription};

pub const PRECISION_ENV: &str = "HEIGHTLAB_PRECISION_BITS";

#[derive(Parser, Debug)]
#[command(name = "heightlab", version, about = "Dynamical degrees and canonical heights")]
pub struct Cli {
    #[command(flatten)]
    pub opts: Options,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Absolute tolerance for certified heights.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tolerance: f64,
    /// Ball precision in bits; defaults to $HEIGHTLAB_PRECISION_BITS or 128.
    #[arg(long, global = true)]
    pub precision_bits: Option<u32>,
    /// Height budget in decimal digits per coordinate.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub budget: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub output: Format,
    /// Also write the table as CSV to this path.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Worker threads across independent points.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Significant digits in decimal renderings.
    #[arg(long, global = true, default_value_t = 20)]
    pub sig: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dynamical degree, growth exponent and dominant factors.
    Spectral {
        #[arg(long)]
        system: PathBuf,
    },
    /// The normalized height series along one orbit.
    Series {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Canonical height estimates.
    Canonical {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, required = true, allow_hyphen_values = true)]
        point: Vec<String>,
        /// Orbit length for Wehler estimates.
        #[arg(long, default_value_t = 6)]
        steps: usize,
    },
    /// Membership in the zero locus of the lower canonical height.
    Zf {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, required = true, allow_hyphen_values = true)]
        point: Vec<String>,
    },
    /// Preperiodic points of bounded height on P^1.
    Scan {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        bound: u64,
    },
    /// Pairs (n, m) with f^n(x) = g^m(y).
    Intersect {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Defaults to the first system.
        #[arg(long)]
        other_system: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        other_point: String,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Tail and period by cycle detection.
    Preperiodic {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, required = true, allow_hyphen_values = true)]
        point: Vec<String>,
        #[arg(long, default_value_t = 1000)]
        max_steps: usize,
    },
}

pub struct Context {
    pub tolerance: f64,
    pub prec: u32,
    pub budget: Budget,
    pub jobs: usize,
    pub sig: usize,
}

impl Context {
    pub fn from_options(o: &Options, env_precision: Option<&str>) -> Result<Self, CliError> {
        let prec = match (o.precision_bits, env_precision) {
            (Some(p), _) => p,
            (None, Some(s)) => s
                .trim()
                .parse()
                .map_err(|_| CliError::input(PRECISION_ENV, format!("not a bit count: {s:?}")))?,
            (None, None) => DEFAULT_PRECISION,
        };
        if !(16..=heightlab::numlin::MAX_PRECISION).contains(&prec) {
            return Err(CliError::input("--precision-bits", format!("{prec} is outside 16..=4096")));
        }
        if !(o.tolerance.is_finite() && o.tolerance > 0.0) {
            return Err(CliError::input("--tolerance", "must be positive"));
        }
        if o.sig == 0 {
            return Err(CliError::input("--sig", "must be positive"));
        }
        Ok(Context {
            tolerance: o.tolerance,
            prec,
            budget: Budget::digits(o.budget),
            jobs: o.jobs.max(1),
            sig: o.sig,
        })
    }
}

fn load(path: &PathBuf) -> Result<(SystemDescription, DynSystem), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path.display().to_string(), e.to_string()))?;
    let desc = SystemDescription::from_json_str(&text).map_err(|e| match e {
        CliError::Input { path: p, message } => CliError::input(format!("{}:{p}", path.display()), message),
        other => other,
    })?;
    let sys = desc.build().map_err(|e| match e {
        CliError::Input { path: p, message } => CliError::input(format!("{}:{p}", path.display()), message),
        other => other,
    })?;
    Ok((desc, sys))
}

fn core(e: heightlab::Error) -> CliError {
    CliError::core_at("$", e)
}

/// Applies `f` to every item on up to `jobs` threads, keeping input order.
fn par_map<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(jobs);
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

fn fmt_vec(v: &RatVec) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub fn run(cmd: &Command, ctx: &Context) -> Result<Report, CliError> {
    match cmd {
        Command::Spectral { system } => spectral(system, ctx),
        Command::Series { system, point, steps } => series(system, point, *steps, ctx),
        Command::Canonical { system, point, steps } => canonical(system, point, *steps, ctx),
        Command::Zf { system, point } => zf(system, point, ctx),
        Command::Scan { system, bound } => scan(system, *bound, ctx),
        Command::Intersect {
            system,
            point,
            other_system,
            other_point,
            steps,
        } => intersect(system, point, other_system.as_ref(), other_point, *steps, ctx),
        Command::Preperiodic {
            system,
            point,
            max_steps,
        } => preperiodic(system, point, *max_steps, ctx),
    }
}

fn spectral(path: &PathBuf, ctx: &Context) -> Result<Report, CliError> {
    let (desc, sys) = load(path)?;
    let r = system_spectral(&sys, ctx.prec).map_err(core)?;
    let mut rep = Report::new(
        "spectral",
        &desc.label,
        &["factor", "multiplicity", "dominance", "certification"],
    );
    rep.meta("kind", sys.kind());
    let delta = match &r.delta_exact {
        Some(d) => heightlab::numlin::BallReal::exact(d.clone(), ctx.prec),
        None => r.delta.clone(),
    };
    rep.meta("delta", enclosure(&delta, ctx.sig));
    rep.meta("delta_exact", r.delta_exact.as_ref().map(|d| Value::from(d.to_string())).unwrap_or(Value::Null));
    rep.meta("l", r.l);
    rep.meta("l_kind", r.l_kind.as_str());
    rep.meta("family", r.tag);
    rep.meta("certification", r.certification.as_str());
    let mut factors = vec![];
    if let Some(sd) = &r.spectral {
        for f in &sd.dominant_factors {
            let name = f.factor.display_with("t");
            factors.push(Value::from(name.clone()));
            rep.push(vec![
                name,
                f.multiplicity.to_string(),
                format!("{:?}", f.dominance).to_lowercase(),
                f.certification.as_str().into(),
            ]);
        }
    }
    rep.meta("dominant_factors", factors);
    Ok(rep)
}

fn series(path: &PathBuf, point: &str, steps: usize, ctx: &Context) -> Result<Report, CliError> {
    let (desc, sys) = load(path)?;
    let x = parse_point(&sys, point)?;
    let s = height_series_with(&sys, &x, steps, ctx.budget, ctx.prec).map_err(core)?;
    let r = system_spectral(&sys, ctx.prec).map_err(core)?;
    let mut rep = Report::new("series", &desc.label, &["n", "h_n", "a_n", "a_n_radius", "a_n_exact", "flags"]);
    rep.meta("point", x.to_string());
    rep.meta("delta", enclosure(&s.delta, ctx.sig));
    rep.meta("l", s.l);
    rep.meta("l_kind", r.l_kind.as_str());
    rep.meta("mode", "series");
    rep.meta("steps_requested", steps);
    rep.meta("truncation_reason", s.truncation_reason.as_str());
    let last = s.last_n();
    for row in &s.rows {
        let mut flags = vec![];
        if row.n == last && s.truncation_reason != TruncationReason::Converged {
            flags.push(format!("truncated:{}", s.truncation_reason));
        }
        let (a, rad, exact) = match &row.a {
            Some(a) => (
                mid(a, ctx.sig),
                radius(a),
                if a.is_exact() { a.mid().to_string() } else { String::new() },
            ),
            None => (String::new(), String::new(), String::new()),
        };
        rep.push(vec![row.n.to_string(), mid(&row.h.value, ctx.sig), a, rad, exact, flags.join(";")]);
    }
    Ok(rep)
}

fn estimate(sys: &DynSystem, x: &SystemPoint, steps: usize, ctx: &Context) -> Result<CanonicalEstimate, CliError> {
    match (sys, x) {
        (DynSystem::P1(f), SystemPoint::P1(p)) => call_silverman_with(f, p, ctx.tolerance, &[]).map_err(core),
        (DynSystem::Lattice(s), SystemPoint::Lattice(v)) => lattice_canonical_with(s, v, ctx.prec).map_err(core),
        (DynSystem::Wehler(s), SystemPoint::Wehler(p)) => {
            nef_canonical_wehler_with(s, p, steps, ctx.budget, ctx.prec).map_err(core)
        }
        _ => Err(CliError::input(
            "$.kind",
            format!("canonical heights are available for p1_morphism, lattice and wehler, not {}", sys.kind()),
        )),
    }
}

fn canonical(path: &PathBuf, points: &[String], steps: usize, ctx: &Context) -> Result<Report, CliError> {
    let (desc, sys) = load(path)?;
    let xs = points
        .iter()
        .map(|p| parse_point(&sys, p))
        .collect::<Result<Vec<_>, _>>()?;
    let results = par_map(&xs, ctx.jobs, |x| estimate(&sys, x, steps, ctx));
    let mut rep = Report::new(
        "canonical",
        &desc.label,
        &["point", "limsup", "liminf", "error_bound", "exact", "mode", "flags"],
    );
    rep.meta("kind", sys.kind());
    rep.meta("tolerance", ctx.tolerance);
    for (x, r) in xs.iter().zip(results) {
        let e = r?;
        let exact = match &e.exact {
            Some((a, b)) if a == b => a.to_string(),
            Some((a, b)) => format!("{a}..{b}"),
            None => String::new(),
        };
        rep.push(vec![
            x.to_string(),
            mid(&e.limsup_est, ctx.sig),
            mid(&e.liminf_est, ctx.sig),
            e.error_bound.as_ref().map(radius_or_mid).unwrap_or_default(),
            exact,
            e.mode.as_str().into(),
            e.flag.clone().unwrap_or_default(),
        ]);
    }
    Ok(rep)
}

fn radius_or_mid(b: &heightlab::numlin::BallReal) -> String {
    crate::report::decimal_bound(&b.upper(), 3, true)
}

fn zf(path: &PathBuf, points: &[String], ctx: &Context) -> Result<Report, CliError> {
    let (desc, sys) = load(path)?;
    let DynSystem::Lattice(s) = &sys else {
        return Err(CliError::input("$.kind", "zf needs a lattice system"));
    };
    let xs = points
        .iter()
        .map(|p| parse_point(&sys, p))
        .collect::<Result<Vec<_>, _>>()?;
    let results = par_map(&xs, ctx.jobs, |x| match x {
        SystemPoint::Lattice(v) => zf_membership(s, v).map_err(core),
        _ => unreachable!("lattice points"),
    });
    let mut rep = Report::new(
        "zf",
        &desc.label,
        &["point", "member", "certification", "fixed_point", "kernel_basis", "flags"],
    );
    for (x, r) in xs.iter().zip(results) {
        let r = r?;
        let basis = r
            .kernel_basis
            .as_ref()
            .map(|b| b.iter().map(|v| format!("[{}]", fmt_vec(v))).collect::<Vec<_>>().join(" "))
            .unwrap_or_default();
        rep.push(vec![
            x.to_string(),
            r.member.as_str().into(),
            r.certification.as_str().into(),
            r.fixed_point.as_ref().map(fmt_vec).unwrap_or_default(),
            basis,
            r.flag.unwrap_or_default(),
        ]);
    }
    Ok(rep)
}

fn scan(path: &PathBuf, bound: u64, ctx: &Context) -> Result<Report, CliError> {
    let (desc, sys) = load(path)?;
    let DynSystem::P1(f) = &sys else {
        return Err(CliError::input("$.kind", "scan needs a p1_morphism system"));
    };
    let r = northcott_scan(f, bound, ctx.tolerance).map_err(|e| CliError::core_at("--bound", e))?;
    let mut rep = Report::new("scan", &desc.label, &["point", "tail", "period"]);
    rep.meta("bound", r.bound);
    rep.meta("scanned", r.scanned);
    rep.meta("candidates", r.candidates);
    rep.meta("count", r.confirmed.len());
    rep.meta("anomalies", r.anomalies.iter().map(|p| p.to_string()).collect::<Vec<_>>());
    for (p, t, q) in &r.confirmed {
        rep.push(vec![format!("({p})"), t.to_string(), q.to_string()]);
    }
    Ok(rep)
}

fn intersect(
    path: &PathBuf,
    point: &str,
    other: Option<&PathBuf>,
    other_point: &str,
    steps: usize,
    ctx: &Context,
) -> Result<Report, CliError> {
    let (desc, f) = load(path)?;
    let g = match other {
        Some(p) => load(p)?.1,
        None => f.clone(),
    };
    let x = parse_point(&f, point)?;
    let y = parse_point(&g, other_point).map_err(|e| match e {
        CliError::Input { message, .. } => CliError::input("--other-point", message),
        other => other,
    })?;
    let r = orbit_intersection_with(&f, &x, &g, &y, steps, ctx.budget).map_err(core)?;
    let mut rep = Report::new("intersect", &desc.label, &["n", "m"]);
    rep.meta("x", x.to_string());
    rep.meta("y", y.to_string());
    rep.meta("steps", steps);
    rep.meta("computed", vec![r.computed.0, r.computed.1]);
    rep.meta("truncation", vec![r.truncation.0.as_str(), r.truncation.1.as_str()]);
    rep.meta("pair_count", r.pairs.len());
    rep.meta("max_gap", r.max_gap.map(Value::from).unwrap_or(Value::Null));
    rep.meta(
        "ap_decomposition",
        r.ap_decomposition
            .iter()
            .map(|&(k, i, j)| Value::from(vec![k, i, j]))
            .collect::<Vec<_>>(),
    );
    rep.meta(
        "residual_pairs",
        r.residual_pairs.iter().map(|&(a, b)| Value::from(vec![a, b])).collect::<Vec<_>>(),
    );
    match gap_bound_check(&f, &x, &g, &y, steps) {
        Ok(gb) => {
            rep.meta("gap_bound_holds", gb.holds);
            rep.meta("gap_bound", gb.bound.map(Value::from).unwrap_or(Value::Null));
        }
        Err(e) => rep.meta("gap_bound_holds", Value::from(format!("not applicable: {e}"))),
    }
    for (n, m) in &r.pairs {
        rep.push(vec![n.to_string(), m.to_string()]);
    }
    Ok(rep)
}

fn preperiodic(path: &PathBuf, points: &[String], max_steps: usize, ctx: &Context) -> Result<Report, CliError> {
    let (desc, sys) = load(path)?;
    let xs = points
        .iter()
        .map(|p| parse_point(&sys, p))
        .collect::<Result<Vec<_>, _>>()?;
    let results = par_map(&xs, ctx.jobs, |x| detect_preperiodic_with(&sys, x, max_steps, ctx.budget).map_err(core));
    let mut rep = Report::new(
        "preperiodic",
        &desc.label,
        &["point", "preperiodic", "tail", "period", "steps", "flags"],
    );
    rep.meta("max_steps", max_steps);
    for (x, r) in xs.iter().zip(results) {
        let r = r?;
        let opt = |v: Option<usize>| v.map(|t| t.to_string()).unwrap_or_default();
        rep.push(vec![
            x.to_string(),
            r.is_preperiodic().to_string(),
            opt(r.tail_length),
            opt(r.period),
            (r.points.len() - 1).to_string(),
            r.truncation_reason.map(|t| format!("truncated:{t}")).unwrap_or_default(),
        ]);
    }
    Ok(rep)
}

/// Runs a full argument vector; returns the exit code, stdout and stderr.
pub fn run_args<I, S>(args: I, env_precision: Option<&str>) -> (i32, String, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return if code == 0 {
                (0, e.to_string(), String::new())
            } else {
                (2, String::new(), e.to_string())
            };
        }
    };
    match execute(&cli, env_precision) {
        Ok(out) => (0, out, String::new()),
        Err(e) => (e.exit_code(), String::new(), format!("error: {e}\n")),
    }
}

fn execute(cli: &Cli, env_precision: Option<&str>) -> Result<String, CliError> {
    let ctx = Context::from_options(&cli.opts, env_precision)?;
    let rep = run(&cli.command, &ctx)?;
    if let Some(p) = &cli.opts.csv {
        std::fs::write(p, rep.to_csv_string()?).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
    }
    match cli.opts.output {
        Format::Json => Ok(rep.to_json_string()),
        Format::Csv => rep.to_csv_string(),
    }
}

//! Command-line front end: flag and config-file handling, dispatch, exit codes.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};

use crate::error::{Error, Result};
use crate::measures::canonical_measure;
use crate::model::{Config, Counts, Lattice};
use crate::qcalc::{parse_rational, QContext, Rational, Scalar};
use crate::shocks::{shock_predictions, write_predictions_csv, ShockConfig, ShockParams};
use crate::sim::asep::{stationary_histogram, write_histogram_csv};
use crate::sim::shock::{
    estimate_gap_law, estimate_velocity_diffusion, simulate_shock, write_gaps_csv, write_summary_csv,
    write_trajectory_csv, SummaryRow,
};
use crate::sim::stats::total_variation;
use crate::sim::theorem::shock_theorem_check;
use crate::sim::{run_replicas, Estimate, SimParams};
use crate::verify::{write_verify_csv, Check, Verifier, VerifySetup};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_CAP: u8 = 2;
pub const EXIT_STATISTICS: u8 = 3;
pub const EXIT_CONFIG: u8 = 64;

/// Largest tolerated fraction of replicas dropped for leaving the window.
pub const MAX_DISCARD_FRACTION: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Exact identity suites on a finite lattice.
    Verify,
    /// Stationary sampling of the priority ASEP on a finite lattice.
    SimulateAsep,
    /// Shock exclusion process: drift, diffusion and gap law.
    SimulateShock,
    /// ASEP from a shock measure against the shock-process mixture.
    ShockTheorem,
    /// Predicted shock densities, drift, diffusion and gap parameters.
    Report,
}

#[derive(Debug, Parser)]
#[command(name = "priority-asep", version, about = "Priority ASEP verification engine and simulator")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Number of particle species.
    #[arg(long)]
    pub n: Option<String>,
    /// Lattice length; the lattice is {1,…,L}.
    #[arg(long = "L")]
    pub l: Option<String>,
    /// Simulation window `a,b` (sites a..=b) or a length centred on 0.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Asymmetry: integer or `p/q` for exact mode, decimal for float mode.
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub w: Option<String>,
    /// Shock parameter λ; `verify` accepts a comma list.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Duality coefficients `c_1,…,c_n`.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long = "t-max")]
    pub t_max: Option<String>,
    #[arg(long)]
    pub replicas: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Time between recorded samples.
    #[arg(long)]
    pub thinning: Option<String>,
    /// Comma list of checks, or `all`.
    #[arg(long)]
    pub checks: Option<String>,
    #[arg(long)]
    pub threads: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
    /// File of `key=value` lines; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of shock markers (comma list for `verify`).
    #[arg(long = "K")]
    pub k: Option<String>,
    /// Marker types, comma list in `1..=n`.
    #[arg(long)]
    pub types: Option<String>,
    /// Initial marker positions, comma list.
    #[arg(long, allow_hyphen_values = true)]
    pub positions: Option<String>,
    /// Particle numbers `N^1,…,N^n` for `simulate-asep`.
    #[arg(long)]
    pub particles: Option<String>,
    /// Events per replica for `simulate-asep`.
    #[arg(long)]
    pub events: Option<String>,
    /// Fraction of `t-max` discarded before stationary sampling.
    #[arg(long = "burn-in")]
    pub burn_in: Option<String>,
    /// Distance markers must keep from the window ends.
    #[arg(long)]
    pub margin: Option<String>,
    /// Profile offsets `a:b` or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    pub offsets: Option<String>,
}

const KEYS: [&str; 22] = [
    "n", "L", "window", "q", "w", "lambda", "c", "t-max", "replicas", "seed", "thinning", "checks", "threads", "out",
    "K", "types", "positions", "particles", "events", "burn-in", "margin", "offsets",
];

/// Merged settings: config file first, flags on top.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Parse `key=value` lines; `#` starts a comment. Keys are the long flag names.
    pub fn parse_file(text: &str) -> Result<Self> {
        let mut s = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected key=value, got {raw:?}", i + 1)))?;
            s.set(k.trim(), v.trim())?;
        }
        Ok(s)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let k = key.replace('_', "-");
        let k = KEYS
            .iter()
            .find(|c| **c == k || c.eq_ignore_ascii_case(&k) && c.len() == 1)
            .ok_or_else(|| Error::Parse(format!("unknown config key {key:?}")))?;
        self.values.insert((*k).to_string(), value.to_string());
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|_| Error::Parse(format!("bad value for {key}: {v:?}"))))
            .transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse::<T>().map_err(|_| Error::Parse(format!("bad entry for {key}: {t:?}"))))
                    .collect()
            })
            .transpose()
    }

    fn from_cli(cli: &Cli) -> Result<Self> {
        let mut s = match &cli.config {
            Some(p) => Self::parse_file(
                &fs::read_to_string(p).map_err(|e| Error::Parse(format!("cannot read config {}: {e}", p.display())))?,
            )?,
            None => Self::default(),
        };
        let flags = [
            ("n", &cli.n),
            ("L", &cli.l),
            ("window", &cli.window),
            ("q", &cli.q),
            ("w", &cli.w),
            ("lambda", &cli.lambda),
            ("c", &cli.c),
            ("t-max", &cli.t_max),
            ("replicas", &cli.replicas),
            ("seed", &cli.seed),
            ("thinning", &cli.thinning),
            ("checks", &cli.checks),
            ("threads", &cli.threads),
            ("out", &cli.out),
            ("K", &cli.k),
            ("types", &cli.types),
            ("positions", &cli.positions),
            ("particles", &cli.particles),
            ("events", &cli.events),
            ("burn-in", &cli.burn_in),
            ("margin", &cli.margin),
            ("offsets", &cli.offsets),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                s.set(k, v)?;
            }
        }
        Ok(s)
    }
}

/// A numeric literal as typed: the syntax decides exact or float mode.
#[derive(Clone, Debug, PartialEq)]
pub enum Literal {
    Integer(i64),
    Ratio(Rational),
    Decimal(f64),
}

impl Literal {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains('/') {
            return Ok(Literal::Ratio(parse_rational(s)?));
        }
        if let Ok(i) = s.parse::<i64>() {
            return Ok(Literal::Integer(i));
        }
        s.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map(Literal::Decimal)
            .ok_or_else(|| Error::Parse(format!("not a number: {s:?}")))
    }

    /// Exact value; decimals are refused rather than rounded.
    pub fn exact(&self, what: &str) -> Result<Rational> {
        match self {
            Literal::Integer(i) => Ok(Rational::from_integer((*i).into())),
            Literal::Ratio(r) => Ok(r.clone()),
            Literal::Decimal(x) => Err(Error::InvalidArgument(format!(
                "{what} = {x} is a decimal; exact mode needs an integer or p/q"
            ))),
        }
    }

    /// Float value; `p/q` is reserved for exact mode.
    pub fn float(&self, what: &str) -> Result<f64> {
        match self {
            Literal::Integer(i) => Ok(*i as f64),
            Literal::Decimal(x) => Ok(*x),
            Literal::Ratio(r) => Err(Error::InvalidArgument(format!(
                "{what} = {r} uses p/q syntax, which is reserved for exact mode; give a decimal"
            ))),
        }
    }
}

fn literal(s: &Settings, key: &str, default: &str) -> Result<Literal> {
    Literal::parse(s.raw(key).unwrap_or(default))
}

/// Map an error to its exit code.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DimensionCap { .. } => EXIT_CAP,
        Error::Statistical(_) => EXIT_STATISTICS,
        _ => EXIT_CONFIG,
    }
}

/// Parse arguments, run the command and return the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<u8> {
    let s = Settings::from_cli(cli)?;
    if let Some(t) = s.get::<usize>("threads")? {
        if t == 0 {
            return Err(Error::InvalidArgument("threads must be >= 1".into()));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let out = PathBuf::from(s.raw("out").unwrap_or("."));
    fs::create_dir_all(&out).map_err(|e| Error::InvalidArgument(format!("cannot create {}: {e}", out.display())))?;
    match cli.command {
        Command::Verify => cmd_verify(&s, &out),
        Command::SimulateAsep => cmd_simulate_asep(&s, &out),
        Command::SimulateShock => cmd_simulate_shock(&s, &out),
        Command::ShockTheorem => cmd_shock_theorem(&s, &out),
        Command::Report => cmd_report(&s, &out),
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let p = dir.join(name);
    File::create(&p)
        .map(BufWriter::new)
        .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", p.display())))
}

fn kv(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn cmd_verify(s: &Settings, out: &Path) -> Result<u8> {
    let n: u8 = s.get("n")?.ok_or_else(|| Error::InvalidArgument("verify needs --n".into()))?;
    let len: usize = s.get("L")?.ok_or_else(|| Error::InvalidArgument("verify needs --L".into()))?;
    let q_lit = literal(s, "q", "2")?;
    let q = q_lit.exact("q")?;
    let w = literal(s, "w", "1")?.exact("w")?;
    let checks = Check::parse_list(s.raw("checks").unwrap_or("all"))?;
    let mut setup = VerifySetup::new(n, len, QContext::new(q.clone())?)?;
    setup.w = w.clone();
    if let Some(l) = s.list::<f64>("lambda")? {
        setup.lambdas = l;
    }
    if let Some(k) = s.list::<usize>("K")? {
        setup.ks = k;
    }
    if let Some(c) = s.list::<f64>("c")? {
        setup.coeffs = c;
    }
    let header = vec![
        kv("command", "verify"),
        kv("n", n),
        kv("L", len),
        kv("q", &q),
        kv("w", &w),
        kv("lambda", join(&setup.lambdas)),
        kv("K", join(&setup.ks)),
        kv("c", join(&setup.coeffs)),
        kv("checks", join(&checks)),
    ];
    let verifier = Verifier::new(setup)?;
    let reports = verifier.run_all(&checks)?;
    for r in &reports {
        println!("{r}");
    }
    write_verify_csv(create(out, "verify.csv")?, &reports, n, len, &q.to_string(), &header)?;
    Ok(if reports.iter().all(|r| r.passed) { EXIT_PASS } else { EXIT_CHECK_FAILED })
}

/// Window from `a,b` or a length centred on 0.
fn parse_window(v: &str) -> Result<Lattice> {
    let parts: Vec<&str> = v.split([',', ':']).map(str::trim).collect();
    let bad = || Error::Parse(format!("bad window {v:?}"));
    match parts.as_slice() {
        [a, b] => Lattice::new(a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?),
        [len] => {
            let len: i64 = len.parse().map_err(|_| bad())?;
            Lattice::new(-(len - 1) / 2, len / 2)
        }
        _ => Err(bad()),
    }
}

fn parse_offsets(v: &str) -> Result<Vec<i64>> {
    let bad = || Error::Parse(format!("bad offsets {v:?}"));
    if let Some((a, b)) = v.split_once(':') {
        let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    v.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

fn sim_params(s: &Settings, window: Lattice, t_max: f64, replicas: usize, margin: i64) -> Result<SimParams> {
    let p = SimParams {
        n: s.get_or("n", 1)?,
        window,
        w: literal(s, "w", "1")?.float("w")?,
        q: literal(s, "q", "2")?.float("q")?,
        t_max: s.get_or("t-max", t_max)?,
        replicas: s.get_or("replicas", replicas)?,
        seed: s.get_or("seed", 0)?,
        thinning: 0.0,
        burn_in: s.get_or("burn-in", 0.5)?,
        margin: s.get_or("margin", margin)?,
    };
    Ok(SimParams { thinning: s.get_or("thinning", p.t_max / 100.0)?, ..p })
}

fn sim_header(command: &str, p: &SimParams) -> Vec<(String, String)> {
    vec![
        kv("command", command),
        kv("n", p.n),
        kv("window", format!("{},{}", p.window.l_minus(), p.window.l_plus())),
        kv("q", p.q),
        kv("w", p.w),
        kv("t-max", p.t_max),
        kv("replicas", p.replicas),
        kv("seed", p.seed),
        kv("thinning", p.thinning),
        kv("burn-in", p.burn_in),
        kv("margin", p.margin),
    ]
}

fn cmd_simulate_asep(s: &Settings, out: &Path) -> Result<u8> {
    let n: u8 = s.get_or("n", 1)?;
    let len: usize = s.get_or("L", 4)?;
    let lattice = Lattice::with_len(len)?;
    let particles: Vec<usize> = match s.list("particles")? {
        Some(p) => p,
        None => vec![len / (n as usize + 1); n as usize],
    };
    if particles.len() != n as usize {
        return Err(Error::InvalidArgument(format!("need {n} particle numbers, got {}", particles.len())));
    }
    let counts = Counts::from_particles(len, &particles)?;
    // lowest species on the left
    let mut eta = Vec::with_capacity(len);
    for a in 0..=n {
        eta.extend(std::iter::repeat_n(a, counts.get(a as usize)));
    }
    let initial = Config::new(lattice, n, eta)?;
    let w = literal(s, "w", "1")?.float("w")?;
    let q = literal(s, "q", "2")?.float("q")?;
    let events: u64 = s.get_or("events", 1_000_000)?;
    let replicas: usize = s.get_or("replicas", 1)?;
    let seed: u64 = s.get_or("seed", 0)?;
    if replicas == 0 {
        return Err(Error::InvalidArgument("replicas must be >= 1".into()));
    }
    let exact = canonical_measure(lattice, &counts, &QContext::float(q)?)?.weights().to_vec();
    let hists: Vec<Vec<f64>> = run_replicas(seed, replicas, |_, rng| stationary_histogram(&initial, w, q, events, rng))
        .into_iter()
        .collect::<Result<_>>()?;
    let tvs: Vec<f64> = hists.iter().map(|h| total_variation(h, &exact)).collect();
    let pooled: Vec<f64> = (0..exact.len())
        .map(|i| hists.iter().map(|h| h[i]).sum::<f64>() / replicas as f64)
        .collect();
    let header = vec![
        kv("command", "simulate-asep"),
        kv("n", n),
        kv("L", len),
        kv("particles", join(&particles)),
        kv("q", q),
        kv("w", w),
        kv("events", events),
        kv("replicas", replicas),
        kv("seed", seed),
    ];
    write_histogram_csv(create(out, "histogram.csv")?, lattice, n, &pooled, Some(&exact), &header)?;
    let rows = vec![
        SummaryRow::new("tv_distance", Estimate::mean_of(&tvs), 0.0),
        SummaryRow::new("tv_distance_pooled", Estimate { value: total_variation(&pooled, &exact), se: f64::NAN, count: replicas }, 0.0),
    ];
    write_summary_csv(create(out, "summary.csv")?, &rows, &header)?;
    println!("TV distance to the canonical measure: {:.5} (pooled {:.5})", rows[0].estimate.value, rows[1].estimate.value);
    Ok(EXIT_PASS)
}

/// Markers from `K`, `types` and `positions`; defaults are type `n` at `0,1,…,K−1`.
fn markers(s: &Settings, n: u8) -> Result<ShockConfig> {
    let k: usize = match s.list::<usize>("K")? {
        Some(v) if v.len() == 1 => v[0],
        Some(_) => return Err(Error::InvalidArgument("K must be a single number here".into())),
        None => s.list::<i64>("positions")?.map_or(1, |p| p.len()),
    };
    let positions = s.list::<i64>("positions")?.unwrap_or_else(|| (0..k as i64).collect());
    let types = s.list::<u8>("types")?.unwrap_or_else(|| vec![n; k]);
    if positions.len() != k || types.len() != k {
        return Err(Error::InvalidArgument(format!(
            "K = {k} but {} positions and {} types given",
            positions.len(),
            types.len()
        )));
    }
    ShockConfig::new(positions, types, n)
}

fn lambda(s: &Settings) -> Result<f64> {
    match s.list::<f64>("lambda")? {
        None => Ok(0.0),
        Some(v) if v.len() == 1 => Ok(v[0]),
        Some(_) => Err(Error::InvalidArgument("lambda must be a single number here".into())),
    }
}

/// Window wide enough for drift plus six diffusive spreads, twenty times over.
fn default_shock_window(s: &Settings, markers: &ShockConfig, lambda: f64) -> Result<Lattice> {
    let n: u8 = s.get_or("n", 1)?;
    let q = literal(s, "q", "2")?.float("q")?;
    let w = literal(s, "w", "1")?.float("w")?;
    let t: f64 = s.get_or("t-max", 1000.0)?;
    let pred = shock_predictions(&ShockParams::new(n, markers.len(), lambda, w, QContext::float(q)?)?)?;
    let v = pred.velocity.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let d = pred.diffusion.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let half = (20.0 * (v * t + 6.0 * (2.0 * d * t).sqrt())).ceil() as i64 / 2 + 1;
    let (lo, hi) = (markers.positions()[0], *markers.positions().last().expect("nonempty"));
    Lattice::new(lo - half, hi + half)
}

fn cmd_simulate_shock(s: &Settings, out: &Path) -> Result<u8> {
    let n: u8 = s.get_or("n", 1)?;
    let m = markers(s, n)?;
    let lam = lambda(s)?;
    let window = match s.raw("window") {
        Some(v) => parse_window(v)?,
        None => default_shock_window(s, &m, lam)?,
    };
    let p = sim_params(s, window, 1000.0, 100, 0)?;
    let mut header = sim_header("simulate-shock", &p);
    header.extend([
        kv("K", m.len()),
        kv("lambda", lam),
        kv("types", join(m.types())),
        kv("positions", join(m.positions())),
    ]);
    let run = simulate_shock(&p, &m, lam)?;
    let pred = shock_predictions(&run.shock)?;
    if let Some(t) = run.kept().next() {
        write_trajectory_csv(create(out, "trajectory.csv")?, t, &header)?;
    }
    let frac = run.discard_fraction();
    println!("discarded {} of {} replicas ({:.2}%)", run.discarded(), p.replicas, 100.0 * frac);
    if frac >= MAX_DISCARD_FRACTION {
        eprintln!("error: discard fraction {frac:.4} is not below {MAX_DISCARD_FRACTION}");
        return Ok(EXIT_STATISTICS);
    }
    let mut rows = Vec::new();
    if m.len() == 1 {
        let tr = estimate_velocity_diffusion(&run, 0)?;
        rows.push(SummaryRow::new("v", tr.velocity, pred.velocity[0]));
        rows.push(SummaryRow::new("D", tr.diffusion, pred.diffusion[0]));
    } else {
        // free-marker speeds only hold until collision; the bound state moves
        // at the speed of the outer shock ρ_0 → ρ_K
        let k = m.len();
        let wa = run.shock.w * run.shock.ctx.asym();
        let v_bound = wa * (1.0 - pred.rho[k] - pred.rho[0]);
        let tr = estimate_velocity_diffusion(&run, 0)?;
        rows.push(SummaryRow::new("v_bound", tr.velocity, v_bound));
    }
    for i in 1..m.len() {
        let fit = estimate_gap_law(&run, i)?;
        println!(
            "gap {i}: p fitted {:.4} (predicted {:.4}), KS {:.4} vs 1% critical {:.4}, chi-square {:.2} on {} dof (p-value {:.3})",
            fit.fit.value, fit.predicted, fit.ks, fit.ks_critical, fit.chi_square, fit.dof, fit.p_value
        );
        if i == 1 {
            write_gaps_csv(create(out, "gaps.csv")?, &fit, &header)?;
        }
        rows.push(SummaryRow::new(format!("p_{i}"), fit.fit, fit.predicted));
    }
    for r in &rows {
        println!("{:<6} {:>10.5} ± {:.5}  predicted {:>9.5}  z {:>6.2}", r.quantity, r.estimate.value, r.estimate.se, r.predicted, r.z());
    }
    write_summary_csv(create(out, "summary.csv")?, &rows, &header)?;
    Ok(EXIT_PASS)
}

fn cmd_shock_theorem(s: &Settings, out: &Path) -> Result<u8> {
    let n: u8 = s.get_or("n", 2)?;
    let m = markers(s, n)?;
    let lam = lambda(s)?;
    let window = parse_window(s.raw("window").unwrap_or("-199,200"))?;
    let mut p = sim_params(s, window, 20.0, 200, 10)?;
    p.n = n;
    let offsets = parse_offsets(s.raw("offsets").unwrap_or("-50:50"))?;
    let mut header = sim_header("shock-theorem", &p);
    header.extend([
        kv("K", m.len()),
        kv("lambda", lam),
        kv("types", join(m.types())),
        kv("positions", join(m.positions())),
        kv("offsets", format!("{}:{}", offsets[0], offsets[offsets.len() - 1])),
    ]);
    let cmp = shock_theorem_check(&p, &m, lam, &offsets)?;
    cmp.write_csv(create(out, "profile.csv")?, &header)?;
    let rows: Vec<SummaryRow> = cmp
        .offsets
        .iter()
        .zip(cmp.asep.iter().zip(&cmp.mixture))
        .map(|(o, (a, b))| {
            let e = Estimate { value: a.value, se: a.se.hypot(b.se), count: a.count };
            SummaryRow::new(format!("density@{o}"), e, b.value)
        })
        .collect();
    write_summary_csv(create(out, "summary.csv")?, &rows, &header)?;
    let frac = cmp.discarded as f64 / p.replicas as f64;
    let worst = cmp.z_scores().into_iter().fold(0.0, f64::max);
    println!(
        "max |z| = {worst:.3} over {} offsets, max |difference| = {:.4}, {} shock replicas discarded",
        offsets.len(),
        cmp.max_abs_diff(),
        cmp.discarded
    );
    if frac >= MAX_DISCARD_FRACTION {
        eprintln!("error: discard fraction {frac:.4} is not below {MAX_DISCARD_FRACTION}");
        return Ok(EXIT_STATISTICS);
    }
    Ok(if cmp.agrees_within(3.0) { EXIT_PASS } else { EXIT_CHECK_FAILED })
}

fn report_with<S: Scalar>(p: &ShockParams<S>, out: &Path) -> Result<u8> {
    let pred = shock_predictions(p)?;
    println!("rho_0 = {}", pred.rho[0]);
    for i in 1..=p.k {
        println!("rho_{i} = {}  v_{i} = {}  D_{i} = {}", pred.rho[i], pred.velocity[i - 1], pred.diffusion[i - 1]);
    }
    write_predictions_csv(p, create(out, "predictions.csv")?)?;
    Ok(EXIT_PASS)
}

fn cmd_report(s: &Settings, out: &Path) -> Result<u8> {
    let n: u8 = s.get_or("n", 1)?;
    let k: usize = s.get_or("K", 1)?;
    let lam = lambda(s)?;
    let q = literal(s, "q", "2")?;
    let w = literal(s, "w", "1")?;
    // exact when every input is exact and the fugacities stay rational
    if let (Ok(qe), Ok(we)) = (q.exact("q"), w.exact("w")) {
        let p = ShockParams::new(n, k, lam, we, QContext::new(qe)?)?;
        match p.marginals() {
            Ok(_) => return report_with(&p, out),
            Err(Error::NotExact(_) | Error::MissingSqrt(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let qf = match q {
        Literal::Ratio(r) => r.as_f64(),
        other => other.float("q")?,
    };
    let wf = match w {
        Literal::Ratio(r) => r.as_f64(),
        other => other.float("w")?,
    };
    report_with(&ShockParams::new(n, k, lam, wf, QContext::float(qf)?)?, out)
}

//! Kinetic Monte Carlo for the shock exclusion process and the estimators
//! built on its trajectories.
//!
//! Markers are labelled by the species they carry (`type − 1`). With `K`
//! small, all event rates are recomputed after every event.

use std::io::Write;

use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::qcalc::QContext;
use crate::shocks::{gap_parameter, shock_rates, ShockConfig, ShockParams, ShockRates};
use crate::sim::stats::{
    chi_square_geometric, histogram, ks_critical_1pct, ks_geometric, sample_variance, Estimate, Geometric,
};
use crate::sim::{run_replicas, SimParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Move {
    Hop(usize, i64),
    Swap(usize),
}

/// State of one shock-process trajectory.
#[derive(Clone, Debug)]
pub struct ShockKmc {
    pos: Vec<i64>,
    colours: Vec<u8>,
    rates: ShockRates<f64>,
    bounds: Option<(i64, i64)>,
    time: f64,
    events: u64,
}

impl ShockKmc {
    /// `bounds` are the extreme sites a marker may occupy; leaving them stops the run.
    pub fn new(s: &ShockConfig, p: &ShockParams<f64>, bounds: Option<(i64, i64)>) -> Result<Self> {
        if s.len() != p.k {
            return Err(Error::InvalidArgument(format!("{} markers but K = {}", s.len(), p.k)));
        }
        if let Some((lo, hi)) = bounds {
            if s.positions().iter().any(|&x| x < lo || x > hi) {
                return Err(Error::InvalidArgument(format!("initial markers outside [{lo},{hi}]")));
            }
        }
        Ok(Self {
            pos: s.positions().to_vec(),
            colours: s.types().iter().map(|t| t - 1).collect(),
            rates: shock_rates(p)?,
            bounds,
            time: 0.0,
            events: 0,
        })
    }

    pub fn positions(&self) -> &[i64] {
        &self.pos
    }

    /// Species carried by each marker, left to right.
    pub fn colours(&self) -> &[u8] {
        &self.colours
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    fn moves(&self) -> Vec<(Move, f64)> {
        let k = self.pos.len();
        let mut out = Vec::with_capacity(3 * k);
        for i in 0..k {
            if i + 1 == k || self.pos[i + 1] > self.pos[i] + 1 {
                out.push((Move::Hop(i, 1), self.rates.w_plus[i]));
            } else {
                let r = self.rates.colour_rate(self.colours[i], self.colours[i + 1]);
                if r > 0.0 {
                    out.push((Move::Swap(i), r));
                }
            }
            if i == 0 || self.pos[i - 1] < self.pos[i] - 1 {
                out.push((Move::Hop(i, -1), self.rates.w_minus[i]));
            }
        }
        out
    }

    /// Total event rate of the current configuration.
    pub fn total_rate(&self) -> f64 {
        self.moves().iter().map(|m| m.1).sum()
    }

    fn inside(&self) -> bool {
        self.bounds.is_none_or(|(lo, hi)| self.pos[0] >= lo && *self.pos.last().expect("K >= 1") <= hi)
    }

    /// Run to `t_end`; returns `false` (and stops) if a marker leaves the bounds.
    pub fn run_until<R: Rng>(&mut self, t_end: f64, rng: &mut R) -> bool {
        while self.time < t_end {
            let moves = self.moves();
            let total: f64 = moves.iter().map(|m| m.1).sum();
            let dt = rng.sample::<f64, _>(Exp1) / total;
            if self.time + dt >= t_end {
                self.time = t_end;
                return true;
            }
            self.time += dt;
            let mut u = rng.random::<f64>() * total;
            let mut chosen = moves[moves.len() - 1].0;
            for (m, r) in &moves {
                if u < *r {
                    chosen = *m;
                    break;
                }
                u -= r;
            }
            match chosen {
                Move::Hop(i, d) => self.pos[i] += d,
                Move::Swap(i) => self.colours.swap(i, i + 1),
            }
            self.events += 1;
            if !self.inside() {
                return false;
            }
        }
        true
    }
}

/// Marker positions at the recording times.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub positions: Vec<Vec<i64>>,
    pub colours: Vec<Vec<u8>>,
    /// Set when a marker came within the window margin.
    pub escaped: bool,
}

/// Replicas of the shock process from `s`.
#[derive(Clone, Debug)]
pub struct ShockRun {
    pub params: SimParams,
    pub shock: ShockParams<f64>,
    pub trajectories: Vec<Trajectory>,
}

impl ShockRun {
    /// Trajectories that stayed inside the window.
    pub fn kept(&self) -> impl Iterator<Item = &Trajectory> {
        self.trajectories.iter().filter(|t| !t.escaped)
    }

    pub fn discarded(&self) -> usize {
        self.trajectories.iter().filter(|t| t.escaped).count()
    }

    pub fn discard_fraction(&self) -> f64 {
        self.discarded() as f64 / self.trajectories.len() as f64
    }
}

/// Float shock parameters from simulation parameters.
pub fn shock_params(params: &SimParams, k: usize, lambda: f64) -> Result<ShockParams<f64>> {
    ShockParams::new(params.n, k, lambda, params.w, QContext::float(params.q)?)
}

/// Simulate `params.replicas` trajectories from `s`, recording at `0` and every `thinning`.
pub fn simulate_shock(params: &SimParams, s: &ShockConfig, lambda: f64) -> Result<ShockRun> {
    params.validate()?;
    let sp = shock_params(params, s.len(), lambda)?;
    let bounds = (params.window.l_minus() + params.margin, params.window.l_plus() - params.margin);
    ShockKmc::new(s, &sp, Some(bounds))?;
    let times: Vec<f64> = std::iter::once(0.0).chain(params.sample_times()).collect();
    let trajectories = run_replicas(params.seed, params.replicas, |_, rng| {
        let mut sim = ShockKmc::new(s, &sp, Some(bounds)).expect("checked above");
        let mut t = Trajectory { times: Vec::new(), positions: Vec::new(), colours: Vec::new(), escaped: false };
        for &ti in &times {
            if !sim.run_until(ti, rng) {
                t.escaped = true;
                break;
            }
            t.times.push(ti);
            t.positions.push(sim.positions().to_vec());
            t.colours.push(sim.colours().to_vec());
        }
        t
    });
    Ok(ShockRun { params: params.clone(), shock: sp, trajectories })
}

/// Velocity and diffusion estimates for one marker.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transport {
    pub velocity: Estimate,
    pub diffusion: Estimate,
}

/// `v̂` from the total displacement over `[0, t_max]` and `D̂ = Var/(2τ)` from
/// displacements over consecutive blocks of length `τ = thinning`; both with
/// standard errors over replicas.
pub fn estimate_velocity_diffusion(run: &ShockRun, marker: usize) -> Result<Transport> {
    let kept: Vec<&Trajectory> = run.kept().collect();
    if kept.len() < 30 {
        return Err(Error::Statistical(format!("{} usable replicas, need at least 30", kept.len())));
    }
    if marker >= run.shock.k {
        return Err(Error::InvalidArgument(format!("marker {marker} outside 0..{}", run.shock.k)));
    }
    let tau = run.params.thinning;
    let mut vs = Vec::new();
    let mut ds = Vec::new();
    for t in kept {
        let x: Vec<f64> = t.positions.iter().map(|p| p[marker] as f64).collect();
        let total_t = *t.times.last().expect("nonempty");
        vs.push((x[x.len() - 1] - x[0]) / total_t);
        let inc: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        if inc.len() < 2 {
            return Err(Error::Statistical("need at least two blocks per replica".into()));
        }
        ds.push(sample_variance(&inc) / (2.0 * tau));
    }
    Ok(Transport { velocity: Estimate::mean_of(&vs), diffusion: Estimate::mean_of(&ds) })
}

/// Stationary gap samples and their comparison with the geometric law.
#[derive(Clone, Debug)]
pub struct GapFit {
    pub samples: Vec<u64>,
    pub histogram: Vec<u64>,
    pub predicted: f64,
    pub fit: Estimate,
    pub ks: f64,
    pub ks_critical: f64,
    pub chi_square: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl GapFit {
    pub fn ks_passes(&self) -> bool {
        self.ks < self.ks_critical
    }
}

/// Gaps `g = x_{i+1} − x_i − 1` (`i` is 1-based) at recording times after burn-in.
pub fn gap_samples(run: &ShockRun, i: usize) -> Result<Vec<u64>> {
    if i == 0 || i >= run.shock.k {
        return Err(Error::InvalidArgument(format!("gap index {i} outside 1..{}", run.shock.k)));
    }
    let t0 = run.params.burn_in * run.params.t_max;
    Ok(run
        .kept()
        .flat_map(|t| {
            t.times
                .iter()
                .zip(&t.positions)
                .filter(move |(s, _)| **s > t0)
                .map(move |(_, p)| (p[i] - p[i - 1] - 1) as u64)
        })
        .collect())
}

pub fn estimate_gap_law(run: &ShockRun, i: usize) -> Result<GapFit> {
    let samples = gap_samples(run, i)?;
    if samples.len() < 100 {
        return Err(Error::Statistical(format!("{} post-burn-in samples, need at least 100", samples.len())));
    }
    let predicted = gap_parameter(&run.shock, i)?;
    let law = Geometric::new(predicted)?;
    let (chi_square, dof, p_value) = chi_square_geometric(&samples, &law)?;
    Ok(GapFit {
        histogram: histogram(&samples),
        fit: Geometric::fit(&samples)?,
        ks: ks_geometric(&samples, &law),
        ks_critical: ks_critical_1pct(samples.len()),
        predicted,
        chi_square,
        dof,
        p_value,
        samples,
    })
}

fn write_header<W: Write>(out: &mut W, header: &[(String, String)]) -> Result<()> {
    for (k, v) in header {
        writeln!(out, "# {k}={v}")?;
    }
    Ok(())
}

/// `time,x1,…,xK` for one trajectory.
pub fn write_trajectory_csv<W: Write>(mut out: W, t: &Trajectory, header: &[(String, String)]) -> Result<()> {
    write_header(&mut out, header)?;
    let k = t.positions.first().map_or(0, |p| p.len());
    let mut w = csv::Writer::from_writer(out);
    let mut head = vec!["time".to_string()];
    head.extend((1..=k).map(|i| format!("x{i}")));
    w.write_record(&head)?;
    for (time, p) in t.times.iter().zip(&t.positions) {
        let mut rec = vec![format!("{time}")];
        rec.extend(p.iter().map(|x| x.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// `gap,count,expected` up to the largest observed gap.
pub fn write_gaps_csv<W: Write>(mut out: W, fit: &GapFit, header: &[(String, String)]) -> Result<()> {
    write_header(&mut out, header)?;
    let law = Geometric::new(fit.predicted)?;
    let n = fit.samples.len() as f64;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["gap", "count", "expected"])?;
    for (g, c) in fit.histogram.iter().enumerate() {
        w.write_record([g.to_string(), c.to_string(), format!("{:.4}", n * law.pmf(g as u64))])?;
    }
    w.flush()?;
    Ok(())
}

/// One row of `summary.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub quantity: String,
    pub estimate: Estimate,
    pub predicted: f64,
}

impl SummaryRow {
    pub fn new(quantity: impl Into<String>, estimate: Estimate, predicted: f64) -> Self {
        Self { quantity: quantity.into(), estimate, predicted }
    }

    pub fn z(&self) -> f64 {
        self.estimate.z_score(self.predicted)
    }
}

/// `quantity,estimate,se,predicted,z`.
pub fn write_summary_csv<W: Write>(mut out: W, rows: &[SummaryRow], header: &[(String, String)]) -> Result<()> {
    write_header(&mut out, header)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["quantity", "estimate", "se", "predicted", "z"])?;
    for r in rows {
        w.write_record([
            r.quantity.clone(),
            format!("{:.6}", r.estimate.value),
            format!("{:.6}", r.estimate.se),
            format!("{:.6}", r.predicted),
            format!("{:.3}", r.z()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

//! Kinetic Monte Carlo for the priority ASEP on a finite window with
//! reflecting ends.
//!
//! A discordant bond `(a, b)` fires at `wq` if `a > b` and at `wq⁻¹` if
//! `a < b`. The two kinds are kept in separate index sets, so the total rate
//! is an exact integer combination and never drifts.

use std::io::Write;

use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::generator::{config_at, state_dim, zero_index};
use crate::model::{Config, Lattice};
use crate::sim::stats::Estimate;
use crate::sim::{run_replicas, SimParams};

/// Set of bond offsets with O(1) insert, remove and indexed access.
#[derive(Clone, Debug)]
struct BondSet {
    items: Vec<usize>,
    pos: Vec<usize>,
}

impl BondSet {
    fn new(bonds: usize) -> Self {
        Self { items: Vec::new(), pos: vec![usize::MAX; bonds] }
    }

    fn insert(&mut self, b: usize) {
        if self.pos[b] == usize::MAX {
            self.pos[b] = self.items.len();
            self.items.push(b);
        }
    }

    fn remove(&mut self, b: usize) {
        let i = self.pos[b];
        if i != usize::MAX {
            let last = *self.items.last().expect("nonempty");
            self.items.swap_remove(i);
            if last != b {
                self.pos[last] = i;
            }
            self.pos[b] = usize::MAX;
        }
    }

    fn len(&self) -> usize {
        self.items.len()
    }
}

/// State of one ASEP trajectory.
#[derive(Clone, Debug)]
pub struct AsepKmc {
    lattice: Lattice,
    n: u8,
    eta: Vec<u8>,
    fast_rate: f64,
    slow_rate: f64,
    fast: BondSet,
    slow: BondSet,
    time: f64,
    events: u64,
    /// Net number of species-`≥α` particles moved right across each bond, indexed `[α−1][bond]`.
    transfers: Vec<Vec<i64>>,
}

impl AsepKmc {
    pub fn new(initial: &Config, w: f64, q: f64) -> Result<Self> {
        if !(w > 0.0 && q >= 1.0 && w.is_finite() && q.is_finite()) {
            return Err(Error::InvalidArgument(format!("need w > 0 and q >= 1, got w={w} q={q}")));
        }
        let bonds = initial.lattice().len() - 1;
        let mut s = Self {
            lattice: initial.lattice(),
            n: initial.n(),
            eta: initial.as_slice().to_vec(),
            fast_rate: w * q,
            slow_rate: w / q,
            fast: BondSet::new(bonds),
            slow: BondSet::new(bonds),
            time: 0.0,
            events: 0,
            transfers: vec![vec![0; bonds]; initial.n() as usize],
        };
        for b in 0..bonds {
            s.classify(b);
        }
        Ok(s)
    }

    fn classify(&mut self, b: usize) {
        let (x, y) = (self.eta[b], self.eta[b + 1]);
        self.fast.remove(b);
        self.slow.remove(b);
        if x > y {
            self.fast.insert(b);
        } else if x < y {
            self.slow.insert(b);
        }
    }

    pub fn config(&self) -> Config {
        Config::new(self.lattice, self.n, self.eta.clone()).expect("valid by construction")
    }

    pub fn eta(&self) -> &[u8] {
        &self.eta
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    pub fn total_rate(&self) -> f64 {
        self.fast.len() as f64 * self.fast_rate + self.slow.len() as f64 * self.slow_rate
    }

    /// Net transfer of species `≥ alpha` across the bond starting at site `k`.
    pub fn net_transfer(&self, alpha: u8, k: i64) -> i64 {
        self.transfers[alpha as usize - 1][self.lattice.offset(k)]
    }

    /// Waiting time to the next event from the current configuration, without moving.
    pub fn sample_waiting_time<R: Rng>(&self, rng: &mut R) -> f64 {
        let x: f64 = rng.sample(Exp1);
        x / self.total_rate()
    }

    fn pick<R: Rng>(&self, rng: &mut R) -> usize {
        let f = self.fast.len() as f64 * self.fast_rate;
        let u = rng.random::<f64>() * self.total_rate();
        if u < f {
            let i = ((u / self.fast_rate) as usize).min(self.fast.len() - 1);
            self.fast.items[i]
        } else {
            let i = (((u - f) / self.slow_rate) as usize).min(self.slow.len() - 1);
            self.slow.items[i]
        }
    }

    fn fire(&mut self, b: usize) {
        let (x, y) = (self.eta[b], self.eta[b + 1]);
        for a in 1..=self.n {
            if x >= a && y < a {
                self.transfers[a as usize - 1][b] += 1;
            } else if y >= a && x < a {
                self.transfers[a as usize - 1][b] -= 1;
            }
        }
        self.eta.swap(b, b + 1);
        self.events += 1;
        if b > 0 {
            self.classify(b - 1);
        }
        self.classify(b);
        if b + 2 < self.eta.len() {
            self.classify(b + 1);
        }
    }

    /// Run up to time `t_end`. `on_hold(η, dt)` receives every holding
    /// interval, including the final partial one. The pending event at
    /// `t_end` is discarded, which is exact by memorylessness.
    pub fn run_until<R: Rng>(&mut self, t_end: f64, rng: &mut R, mut on_hold: impl FnMut(&[u8], f64)) {
        while self.time < t_end {
            let r = self.total_rate();
            let dt = if r > 0.0 { rng.sample::<f64, _>(Exp1) / r } else { f64::INFINITY };
            if self.time + dt >= t_end {
                on_hold(&self.eta, t_end - self.time);
                self.time = t_end;
                return;
            }
            on_hold(&self.eta, dt);
            self.time += dt;
            let b = self.pick(rng);
            self.fire(b);
        }
    }

    /// Run exactly `count` events (fewer if the configuration is frozen).
    pub fn run_events<R: Rng>(&mut self, count: u64, rng: &mut R, mut on_hold: impl FnMut(&[u8], f64)) {
        for _ in 0..count {
            let r = self.total_rate();
            if r == 0.0 {
                return;
            }
            let dt = rng.sample::<f64, _>(Exp1) / r;
            on_hold(&self.eta, dt);
            self.time += dt;
            let b = self.pick(rng);
            self.fire(b);
        }
    }
}

/// Time-weighted occupation of every configuration over `events` events,
/// normalized; indexed by the basis index.
pub fn stationary_histogram<R: Rng>(initial: &Config, w: f64, q: f64, events: u64, rng: &mut R) -> Result<Vec<f64>> {
    let dim = state_dim(initial.n(), initial.lattice())?;
    let base = initial.n() as usize + 1;
    let mut hist = vec![0.0; dim];
    let mut sim = AsepKmc::new(initial, w, q)?;
    sim.run_events(events, rng, |eta, dt| {
        let i = eta.iter().rev().fold(0usize, |acc, &e| acc * base + e as usize);
        hist[i] += dt;
    });
    let total: f64 = hist.iter().sum();
    if total > 0.0 {
        hist.iter_mut().for_each(|h| *h /= total);
    } else {
        hist[zero_index(initial)] = 1.0;
    }
    Ok(hist)
}

/// Write `index,eta,empirical[,exact]` for configurations with positive weight in either column.
pub fn write_histogram_csv<W: Write>(
    out: W,
    lattice: Lattice,
    n: u8,
    empirical: &[f64],
    exact: Option<&[f64]>,
    header: &[(String, String)],
) -> Result<()> {
    let mut out = out;
    for (k, v) in header {
        writeln!(out, "# {k}={v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    if exact.is_some() {
        w.write_record(["index", "eta", "empirical", "exact"])?;
    } else {
        w.write_record(["index", "eta", "empirical"])?;
    }
    for (i, e) in empirical.iter().enumerate() {
        let x = exact.map(|x| x[i]);
        if *e == 0.0 && x.is_none_or(|v| v == 0.0) {
            continue;
        }
        let c = config_at(i, lattice, n);
        let mut rec = vec![(i + 1).to_string(), c.digits(), format!("{e:.8}")];
        if let Some(v) = x {
            rec.push(format!("{v:.8}"));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Time-averaged net current of species `≥ alpha` across every bond after
/// burn-in, with standard errors over replicas.
pub fn measure_currents(params: &SimParams, initial: &Config, alpha: u8) -> Result<Vec<Estimate>> {
    params.validate()?;
    if alpha == 0 || alpha > initial.n() {
        return Err(Error::InvalidArgument(format!("species {alpha} outside 1..={}", initial.n())));
    }
    let t0 = params.burn_in * params.t_max;
    let span = params.t_max - t0;
    let runs: Vec<Vec<f64>> = run_replicas(params.seed, params.replicas, |_, rng| {
        let mut sim = AsepKmc::new(initial, params.w, params.q).expect("validated");
        sim.run_until(t0, rng, |_, _| {});
        let before = sim.transfers[alpha as usize - 1].clone();
        sim.run_until(params.t_max, rng, |_, _| {});
        sim.transfers[alpha as usize - 1]
            .iter()
            .zip(&before)
            .map(|(a, b)| (a - b) as f64 / span)
            .collect()
    });
    let bonds = initial.lattice().len() - 1;
    Ok((0..bonds)
        .map(|b| Estimate::mean_of(&runs.iter().map(|r| r[b]).collect::<Vec<_>>()))
        .collect())
}

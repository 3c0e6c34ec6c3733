//! Continuous-time kinetic Monte Carlo for the priority ASEP and the shock
//! exclusion process.
//!
//! Every replica owns a ChaCha8 stream keyed by `(seed, replica)`, so results
//! do not depend on thread scheduling and a run is reproducible bit for bit.

pub mod asep;
pub mod shock;
pub mod stats;
pub mod theorem;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Config, Lattice};
use crate::shocks::{ShockConfig, ShockParams};

pub use stats::Estimate;

/// Simulation parameters shared by all run modes.
#[derive(Clone, Debug, PartialEq)]
pub struct SimParams {
    pub n: u8,
    pub window: Lattice,
    pub w: f64,
    pub q: f64,
    pub t_max: f64,
    pub replicas: usize,
    pub seed: u64,
    /// Time between recorded samples.
    pub thinning: f64,
    /// Fraction of `t_max` discarded before stationary sampling.
    pub burn_in: f64,
    /// Minimum distance of tracked markers from the window ends.
    pub margin: i64,
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.n == 0 {
            return bad("n must be >= 1".into());
        }
        if !(self.w > 0.0 && self.w.is_finite()) {
            return bad(format!("w must be positive, got {}", self.w));
        }
        if !(self.q >= 1.0 && self.q.is_finite()) {
            return bad(format!("q must be >= 1, got {}", self.q));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return bad(format!("t_max must be positive, got {}", self.t_max));
        }
        if self.replicas == 0 {
            return bad("replicas must be >= 1".into());
        }
        if !(self.thinning > 0.0) {
            return bad(format!("thinning must be positive, got {}", self.thinning));
        }
        if !(0.0..1.0).contains(&self.burn_in) {
            return bad(format!("burn-in fraction must lie in [0,1), got {}", self.burn_in));
        }
        if self.margin < 0 || 2 * self.margin >= self.window.len() as i64 {
            return bad(format!("margin {} does not fit window {}", self.margin, self.window));
        }
        Ok(())
    }

    /// Recording times `thinning, 2·thinning, …` up to `t_max`.
    pub fn sample_times(&self) -> Vec<f64> {
        let m = (self.t_max / self.thinning + 1e-9).floor() as usize;
        (1..=m).map(|i| i as f64 * self.thinning).collect()
    }
}

/// RNG for one replica.
pub fn replica_rng(seed: u64, replica: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica as u64);
    rng
}

/// Run `f(replica, rng)` for every replica in parallel; results are returned in replica order.
pub fn run_replicas<T: Send>(seed: u64, replicas: usize, f: impl Fn(usize, &mut ChaCha8Rng) -> T + Sync) -> Vec<T> {
    run_replica_range(seed, 0..replicas, f)
}

/// As [`run_replicas`] for the replica indices in `range`.
pub fn run_replica_range<T: Send>(
    seed: u64,
    range: std::ops::Range<usize>,
    f: impl Fn(usize, &mut ChaCha8Rng) -> T + Sync,
) -> Vec<T> {
    range
        .into_par_iter()
        .map(|r| f(r, &mut replica_rng(seed, r)))
        .collect()
}

/// Exact draw from the shock measure on a finite window.
pub fn sample_shock_measure<R: Rng>(s: &ShockConfig, lattice: Lattice, p: &ShockParams<f64>, rng: &mut R) -> Result<Config> {
    if s.len() != p.k {
        return Err(Error::InvalidArgument(format!("{} markers but K = {}", s.len(), p.k)));
    }
    let rho = p.marginals()?;
    let mut c = Config::empty(lattice, p.n)?;
    let mut seg = 0;
    for k in lattice.sites() {
        if seg < s.len() && s.positions()[seg] == k {
            c.set(k, s.types()[seg] - 1)?;
            seg += 1;
        } else if rng.random::<f64>() < rho[seg] {
            c.set(k, p.n)?;
        }
    }
    if seg != s.len() {
        return Err(Error::InvalidArgument(format!("markers outside window {lattice}")));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcalc::QContext;

    pub(crate) fn params() -> SimParams {
        SimParams {
            n: 1,
            window: Lattice::new(-50, 50).unwrap(),
            w: 1.0,
            q: 2.0,
            t_max: 10.0,
            replicas: 4,
            seed: 7,
            thinning: 2.5,
            burn_in: 0.5,
            margin: 5,
        }
    }

    #[test]
    fn validation() {
        assert!(params().validate().is_ok());
        for f in [
            |p: &mut SimParams| p.q = 0.5,
            |p: &mut SimParams| p.t_max = 0.0,
            |p: &mut SimParams| p.replicas = 0,
            |p: &mut SimParams| p.burn_in = 1.0,
            |p: &mut SimParams| p.margin = 60,
            |p: &mut SimParams| p.w = f64::NAN,
        ] {
            let mut p = params();
            f(&mut p);
            assert!(p.validate().is_err());
        }
        assert_eq!(params().sample_times(), vec![2.5, 5.0, 7.5, 10.0]);
    }

    #[test]
    fn replica_streams_are_independent_and_stable() {
        let a: Vec<u64> = run_replicas(3, 4, |_, r| r.random());
        let b: Vec<u64> = run_replicas(3, 4, |_, r| r.random());
        assert_eq!(a, b);
        assert_eq!(a[2], replica_rng(3, 2).random::<u64>());
        assert!(a.windows(2).all(|w| w[0] != w[1]));
    }

    #[test]
    fn shock_measure_sampling() {
        let p = ShockParams::new(2, 1, 0.0, 1.0, QContext::float(2.0).unwrap()).unwrap();
        let s = ShockConfig::new(vec![0], vec![2], 2).unwrap();
        let l = Lattice::new(-2000, 2000).unwrap();
        let c = sample_shock_measure(&s, l, &p, &mut replica_rng(1, 0)).unwrap();
        assert_eq!(c.get(0), 1);
        let dens = |r: std::ops::RangeInclusive<i64>| {
            let len = r.clone().count() as f64;
            r.filter(|&k| c.get(k) == 2).count() as f64 / len
        };
        assert!((dens(-2000..=-1) - 1.0 / 3.0).abs() < 0.04);
        assert!((dens(1..=2000) - 2.0 / 3.0).abs() < 0.04);
        assert!(l.sites().all(|k| k == 0 || c.get(k) != 1));
    }
}

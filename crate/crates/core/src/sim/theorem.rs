//! Two-simulation check that a shock measure evolves into a mixture of shock
//! measures over the shock process.
//!
//! Side A runs the priority ASEP from a sample of `ν_x`; side B runs the shock
//! process from `x` and averages the density profiles of `ν_y` over the
//! final marker configurations `y`. The species-`n` densities are compared
//! site by site at fixed offsets from the first initial marker.

use std::io::Write;

use crate::error::{Error, Result};
use crate::shocks::ShockConfig;
use crate::sim::asep::AsepKmc;
use crate::sim::shock::{shock_params, ShockKmc};
use crate::sim::stats::Estimate;
use crate::sim::{run_replica_range, sample_shock_measure, SimParams};

#[derive(Clone, Debug)]
pub struct ProfileComparison {
    pub offsets: Vec<i64>,
    pub asep: Vec<Estimate>,
    pub mixture: Vec<Estimate>,
    /// Side-B replicas that hit the window margin and were dropped.
    pub discarded: usize,
}

impl ProfileComparison {
    /// `|A − B| / √(se_A² + se_B²)` per offset.
    pub fn z_scores(&self) -> Vec<f64> {
        self.asep
            .iter()
            .zip(&self.mixture)
            .map(|(a, b)| {
                let d = (a.value - b.value).abs();
                let se = a.se.hypot(b.se);
                if se > 0.0 {
                    d / se
                } else if d == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .collect()
    }

    pub fn max_abs_diff(&self) -> f64 {
        self.asep.iter().zip(&self.mixture).map(|(a, b)| (a.value - b.value).abs()).fold(0.0, f64::max)
    }

    /// Every offset agrees within `k` combined standard errors.
    pub fn agrees_within(&self, k: f64) -> bool {
        self.z_scores().iter().all(|&z| z <= k)
    }

    /// `offset,asep,asep_se,mixture,mixture_se`.
    pub fn write_csv<W: Write>(&self, mut out: W, header: &[(String, String)]) -> Result<()> {
        for (k, v) in header {
            writeln!(out, "# {k}={v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["offset", "asep", "asep_se", "mixture", "mixture_se"])?;
        for ((o, a), b) in self.offsets.iter().zip(&self.asep).zip(&self.mixture) {
            w.write_record([
                o.to_string(),
                format!("{:.6}", a.value),
                format!("{:.6}", a.se),
                format!("{:.6}", b.value),
                format!("{:.6}", b.se),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Compare both sides at time `params.t_max` with `params.replicas` replicas each.
pub fn shock_theorem_check(params: &SimParams, s: &ShockConfig, lambda: f64, offsets: &[i64]) -> Result<ProfileComparison> {
    params.validate()?;
    let sp = shock_params(params, s.len(), lambda)?;
    let window = params.window;
    let origin = s.positions()[0];
    if let Some(o) = offsets.iter().find(|&&o| !window.contains(origin + o)) {
        return Err(Error::InvalidArgument(format!("offset {o} falls outside window {window}")));
    }
    let bounds = (window.l_minus() + params.margin, window.l_plus() - params.margin);
    let (t, n, r) = (params.t_max, params.n, params.replicas);

    let side_a: Vec<Vec<f64>> = run_replica_range(params.seed, 0..r, |_, rng| {
        let init = sample_shock_measure(s, window, &sp, rng).expect("markers inside window");
        let mut sim = AsepKmc::new(&init, params.w, params.q).expect("validated");
        sim.run_until(t, rng, |_, _| {});
        let eta = sim.eta();
        offsets
            .iter()
            .map(|o| f64::from(u8::from(eta[window.offset(origin + o)] == n)))
            .collect()
    });

    let rho = sp.marginals()?;
    let side_b: Vec<Option<Vec<f64>>> = run_replica_range(params.seed, r..2 * r, |_, rng| {
        let mut sim = ShockKmc::new(s, &sp, Some(bounds)).expect("markers inside bounds");
        if !sim.run_until(t, rng) {
            return None;
        }
        let y = sim.positions();
        Some(
            offsets
                .iter()
                .map(|o| {
                    let k = origin + o;
                    if y.contains(&k) {
                        0.0
                    } else {
                        rho[y.iter().filter(|&&x| x < k).count()]
                    }
                })
                .collect(),
        )
    });
    let discarded = side_b.iter().filter(|v| v.is_none()).count();
    let kept: Vec<Vec<f64>> = side_b.into_iter().flatten().collect();
    if kept.len() < 2 {
        return Err(Error::Statistical("all shock-process replicas left the window".into()));
    }
    let column = |rows: &[Vec<f64>], j: usize| Estimate::mean_of(&rows.iter().map(|v| v[j]).collect::<Vec<_>>());
    Ok(ProfileComparison {
        offsets: offsets.to_vec(),
        asep: (0..offsets.len()).map(|j| column(&side_a, j)).collect(),
        mixture: (0..offsets.len()).map(|j| column(&kept, j)).collect(),
        discarded,
    })
}

//! Named identity suites run by `verify`, and the `verify.csv` writer.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::algebra::{duality_closed_form_with, duality_matrix, q_current, q_observable, verify_duality, verify_sqrt_checks, verify_symmetry};
use crate::error::{Error, Result};
use crate::generator::{build_h, config_at, current_n, generator_on, state_dim, RateParams};
use crate::measures::{canonical_partition, check_detailed_balance, grand_partition, grand_partition_single, reversible_measure, stationarity_residual};
use crate::model::{Config, Counts, Lattice};
use crate::qcalc::{QContext, Scalar};
use crate::report::{operator_equality, vector_equality, CheckReport};
use crate::shocks::{verify_intertwining, verify_shock_evolution, ShockParams};
use crate::sparse::SparseOperator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Check {
    DetailedBalance,
    Partition,
    Symmetry,
    Duality,
    Intertwining,
    ShockEvolution,
    Currents,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::DetailedBalance,
        Check::Partition,
        Check::Symmetry,
        Check::Duality,
        Check::Intertwining,
        Check::ShockEvolution,
        Check::Currents,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::DetailedBalance => "detailed-balance",
            Check::Partition => "partition",
            Check::Symmetry => "symmetry",
            Check::Duality => "duality",
            Check::Intertwining => "intertwining",
            Check::ShockEvolution => "shock-evolution",
            Check::Currents => "currents",
        }
    }

    /// Parse a comma-separated list; `all` expands to every check. Order is kept, duplicates dropped.
    pub fn parse_list(s: &str) -> Result<Vec<Check>> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let add: Vec<Check> = if item == "all" { Check::ALL.to_vec() } else { vec![item.parse()?] };
            for c in add {
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
        if out.is_empty() {
            return Err(Error::Parse("empty check list".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown check {s:?}")))
    }
}

/// Model point at which the suites are evaluated.
#[derive(Clone, Debug)]
pub struct VerifySetup<S> {
    pub n: u8,
    pub lattice: Lattice,
    pub w: S,
    pub ctx: QContext<S>,
    /// Shock parameters `λ` for `shock-evolution`.
    pub lambdas: Vec<f64>,
    /// Marker counts `K` for `shock-evolution`; empty means every `K` with an interior configuration, up to 2.
    pub ks: Vec<usize>,
    /// Extra duality coefficient vector `c⃗`; empty means `c⃗ = 0` only.
    pub coeffs: Vec<f64>,
}

impl<S: Scalar> VerifySetup<S> {
    pub fn new(n: u8, len: usize, ctx: QContext<S>) -> Result<Self> {
        Ok(Self {
            n,
            lattice: Lattice::with_len(len)?,
            w: S::one(),
            ctx,
            lambdas: vec![0.0, 1.0],
            ks: Vec::new(),
            coeffs: Vec::new(),
        })
    }

    fn rate_params(&self) -> Result<RateParams<S>> {
        RateParams::new(self.n, self.w.clone(), self.ctx.clone())
    }

    fn marker_counts(&self) -> Vec<usize> {
        if !self.ks.is_empty() {
            return self.ks.clone();
        }
        (1..=2).filter(|&k| k + 2 <= self.lattice.len()).collect()
    }
}

/// The generator together with the setup it was built for.
pub struct Verifier<S> {
    pub setup: VerifySetup<S>,
    pub h: SparseOperator<S>,
}

impl<S: Scalar> Verifier<S> {
    /// Builds `H`; fails with [`Error::DimensionCap`] when the state space is too large.
    pub fn new(setup: VerifySetup<S>) -> Result<Self> {
        state_dim(setup.n, setup.lattice)?;
        let h = build_h(setup.lattice, &setup.rate_params()?)?;
        Ok(Self { setup, h })
    }

    pub fn run(&self, check: Check) -> Result<CheckReport> {
        let rep = match check {
            Check::DetailedBalance => self.detailed_balance(),
            Check::Partition => self.partition(),
            Check::Symmetry => self.symmetry(),
            Check::Duality => self.duality(),
            Check::Intertwining => {
                let s = &self.setup;
                verify_intertwining(&self.h, s.lattice, s.n, &s.w, &s.ctx)
            }
            Check::ShockEvolution => self.shock_evolution(),
            Check::Currents => self.currents(),
        }?;
        Ok(CheckReport { check: check.name().into(), ..rep })
    }

    pub fn run_all(&self, checks: &[Check]) -> Result<Vec<CheckReport>> {
        checks.iter().map(|&c| self.run(c)).collect()
    }

    fn detailed_balance(&self) -> Result<CheckReport> {
        let s = &self.setup;
        let m = reversible_measure(s.lattice, s.n, &s.ctx)?;
        let parts = [check_detailed_balance(&self.h, &m)?, stationarity_residual(&self.h, &m)];
        Ok(CheckReport::combine("detailed-balance", &parts))
    }

    fn partition(&self) -> Result<CheckReport> {
        let s = &self.setup;
        let (l, n, ctx) = (s.lattice, s.n, &s.ctx);
        let mut parts = Vec::new();
        let mut brute_grand = S::zero();
        // fugacities z_α = (α+1)/2
        let z: Vec<S> = (1..=n as i64).map(|a| S::from_i64(a + 1) / S::from_i64(2)).collect();
        for counts in Counts::all_sectors(n as usize, l.len()) {
            let sector = Config::sector(l, &counts);
            let brute = sector.iter().fold(S::zero(), |acc, e| acc + ctx.pow(-e.energy()));
            let formula = canonical_partition(l, &counts, ctx)?;
            parts.push(vector_equality(format!("C_L{:?}", counts.as_slice()), &[formula], &[brute.clone()]));
            let weight = (1..=n as usize).fold(S::one(), |acc, a| acc * z[a - 1].powi(counts.get(a) as i64));
            brute_grand = brute_grand + weight * brute;
        }
        let grand = grand_partition(l, &z, ctx)?;
        parts.push(vector_equality("Z sum form", &[grand.clone()], &[brute_grand]));
        if n == 1 {
            parts.push(vector_equality("Z product form", &[grand], &[grand_partition_single(l, &z[0], ctx)]));
        }
        Ok(CheckReport::combine("partition", &parts))
    }

    fn symmetry(&self) -> Result<CheckReport> {
        let s = &self.setup;
        let parts = [
            verify_symmetry(&self.h, s.lattice, s.n, &s.ctx)?,
            verify_sqrt_checks(&self.h, s.lattice, s.n, &s.ctx)?,
        ];
        let rep = CheckReport::combine("symmetry", &parts);
        Ok(if parts[1].is_skipped() { rep.with_note("half-integer powers of q unavailable, sqrt-q checks not run") } else { rep })
    }

    fn duality(&self) -> Result<CheckReport> {
        let s = &self.setup;
        let d = duality_matrix(s.lattice, s.n, &s.ctx, None)?;
        let mut parts = vec![
            verify_duality(&d, &self.h),
            operator_equality("closed form", &d, &duality_closed_form_with(s.lattice, s.n, &[], &s.ctx)?),
        ];
        if s.coeffs.iter().any(|&c| c != 0.0) {
            let dc = duality_closed_form_with(s.lattice, s.n, &s.coeffs, &s.ctx)?;
            parts.push(verify_duality(&dc, &self.h));
        }
        Ok(CheckReport::combine("duality", &parts))
    }

    fn shock_evolution(&self) -> Result<CheckReport> {
        let s = &self.setup;
        if s.ctx.is_symmetric() {
            return Ok(CheckReport::skipped("shock-evolution", "shock measures need q > 1"));
        }
        let ks = s.marker_counts();
        if ks.is_empty() {
            return Ok(CheckReport::skipped("shock-evolution", "lattice too short for an interior marker"));
        }
        let mut parts = Vec::new();
        for &k in &ks {
            for &lambda in &s.lambdas {
                let p = ShockParams::new(s.n, k, lambda, s.w.clone(), s.ctx.clone())?;
                let rep = verify_shock_evolution(&self.h, s.lattice, &p)?;
                parts.push(CheckReport { check: format!("K={k} lambda={lambda}"), ..rep });
            }
        }
        Ok(CheckReport::combine("shock-evolution", &parts))
    }

    /// `𝓛 n^α_k = j^α_{k−1} − j^α_k` and `𝓛 Q^α_k = J^α_{k−1} − J^α_k` at every site.
    fn currents(&self) -> Result<CheckReport> {
        let s = &self.setup;
        let (l, n) = (s.lattice, s.n);
        let p = s.rate_params()?;
        let configs: Vec<Config> = (0..state_dim(n, l)?).map(|i| config_at(i, l, n)).collect();
        let cfg = |i: usize| &configs[i];
        let dim = configs.len();
        let mut parts = Vec::new();
        for a in 1..=n {
            for k in l.sites() {
                let f: Vec<S> = (0..dim).map(|i| S::from_i64(cfg(i).indicator_n(k, a) as i64)).collect();
                let rhs: Vec<S> = (0..dim)
                    .map(|i| current_n(cfg(i), k - 1, a, &p) - current_n(cfg(i), k, a, &p))
                    .collect();
                parts.push(vector_equality(format!("n a={a} k={k}"), &generator_on(&f, &self.h), &rhs));

                let f: Vec<S> = (0..dim).map(|i| q_observable(cfg(i), k, a, &s.ctx)).collect();
                let rhs: Vec<S> = (0..dim)
                    .map(|i| q_current(cfg(i), k - 1, a, &s.w, &s.ctx) - q_current(cfg(i), k, a, &s.w, &s.ctx))
                    .collect();
                parts.push(vector_equality(format!("Q a={a} k={k}"), &generator_on(&f, &self.h), &rhs));
            }
        }
        Ok(CheckReport::combine("currents", &parts))
    }
}

/// `check,n,L,q,status,max_violation`, one row per report, preceded by `# key=value` lines.
pub fn write_verify_csv<W: Write>(mut out: W, reports: &[CheckReport], n: u8, len: usize, q: &str, header: &[(String, String)]) -> Result<()> {
    for (k, v) in header {
        writeln!(out, "# {k}={v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["check", "n", "L", "q", "status", "max_violation"])?;
    for r in reports {
        let status = if r.is_skipped() {
            "skip"
        } else if r.passed {
            "pass"
        } else {
            "fail"
        };
        w.write_record([r.check.clone(), n.to_string(), len.to_string(), q.to_string(), status.into(), format!("{:e}", r.max_violation)])?;
    }
    w.flush()?;
    Ok(())
}

//! Reversible, canonical, grand-canonical and blocking measures.
//!
//! The reversible weight of a configuration is `π(η) = q^{−E(η)}`. Restricted
//! to a particle-number sector and normalized it is the unique invariant
//! measure there; its normalization is a ratio of q-factorials.

use std::io::Write;

use crate::error::{Error, Result};
use crate::generator::{config_at, state_dim, zero_index};
use crate::model::{Config, Counts, Lattice};
use crate::qcalc::{qfactorial, QContext, Scalar};
use crate::report::CheckReport;
use crate::sparse::SparseOperator;

/// Weights over all `(n+1)^L` configurations, indexed by the 0-based basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure<S> {
    lattice: Lattice,
    n: u8,
    weights: Vec<S>,
    normalized: bool,
}

impl<S: Scalar> Measure<S> {
    pub fn new(lattice: Lattice, n: u8, weights: Vec<S>) -> Result<Self> {
        let dim = state_dim(n, lattice)?;
        if weights.len() != dim {
            return Err(Error::InvalidArgument(format!(
                "measure has {} weights, state space has {dim}",
                weights.len()
            )));
        }
        if weights.iter().any(|w| *w < S::zero()) {
            return Err(Error::InvalidArgument("negative weight".into()));
        }
        Ok(Self { lattice, n, weights, normalized: false })
    }

    /// Measure with weight `f(η)` on every configuration.
    pub fn from_fn(lattice: Lattice, n: u8, f: impl Fn(&Config) -> S) -> Result<Self> {
        let dim = state_dim(n, lattice)?;
        let weights = (0..dim).map(|i| f(&config_at(i, lattice, n))).collect();
        Self::new(lattice, n, weights)
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn weight(&self, c: &Config) -> S {
        self.weights[zero_index(c)].clone()
    }

    pub fn total(&self) -> S {
        self.weights.iter().fold(S::zero(), |a, w| a + w.clone())
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Divide by the total mass.
    pub fn normalize(mut self) -> Result<Self> {
        let z = self.total();
        if z.is_zero() {
            return Err(Error::InvalidArgument("cannot normalize a zero measure".into()));
        }
        for w in &mut self.weights {
            *w = w.clone() / z.clone();
        }
        self.normalized = true;
        Ok(self)
    }

    /// Write `index,eta,weight` rows (1-based index) for nonzero weights.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["index", "eta", "weight"])?;
        for (i, wt) in self.weights.iter().enumerate() {
            if wt.is_zero() {
                continue;
            }
            let c = config_at(i, self.lattice, self.n);
            out.write_record([(i + 1).to_string(), c.digits(), wt.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `π(η) = q^{−E(η)}`.
pub fn reversible_weight<S: Scalar>(c: &Config, ctx: &QContext<S>) -> S {
    ctx.pow(-c.energy())
}

/// Unnormalized reversible measure on the full state space.
pub fn reversible_measure<S: Scalar>(lattice: Lattice, n: u8, ctx: &QContext<S>) -> Result<Measure<S>> {
    Measure::from_fn(lattice, n, |c| reversible_weight(c, ctx))
}

fn check_counts(lattice: Lattice, counts: &Counts) -> Result<()> {
    if counts.len() != lattice.len() {
        return Err(Error::InvalidArgument(format!(
            "particle numbers sum to {}, lattice has {} sites",
            counts.len(),
            lattice.len()
        )));
    }
    Ok(())
}

/// `C_L(N⃗) = [L]_q! / ∏_α [N^α]_q!`.
pub fn canonical_partition<S: Scalar>(lattice: Lattice, counts: &Counts, ctx: &QContext<S>) -> Result<S> {
    check_counts(lattice, counts)?;
    let mut z = qfactorial(lattice.len() as i64, ctx)?;
    for &na in counts.as_slice() {
        z = z / qfactorial(na as i64, ctx)?;
    }
    Ok(z)
}

/// Normalized reversible measure on one particle-number sector.
pub fn canonical_measure<S: Scalar>(lattice: Lattice, counts: &Counts, ctx: &QContext<S>) -> Result<Measure<S>> {
    let z = canonical_partition(lattice, counts, ctx)?;
    let n = counts.n() as u8;
    let mut m = Measure::from_fn(lattice, n, |c| {
        if c.counts() == *counts {
            reversible_weight(c, ctx) / z.clone()
        } else {
            S::zero()
        }
    })?;
    m.normalized = true;
    Ok(m)
}

/// Grand-canonical partition function `Σ_{N⃗} ∏_α z_α^{N^α} C_L(N⃗)` with
/// fugacities `z_α = e^{μ_α}`, `α = 1..n`.
pub fn grand_partition<S: Scalar>(lattice: Lattice, fugacities: &[S], ctx: &QContext<S>) -> Result<S> {
    if fugacities.is_empty() {
        return Err(Error::InvalidArgument("need one fugacity per species".into()));
    }
    let n = fugacities.len();
    let mut z = S::zero();
    for counts in Counts::all_sectors(n, lattice.len()) {
        let mut term = canonical_partition(lattice, &counts, ctx)?;
        for (a, f) in fugacities.iter().enumerate() {
            term = term * f.powi(counts.get(a + 1) as i64);
        }
        z = z + term;
    }
    Ok(z)
}

/// Product form `∏_k (1 + z q^{2k−L⁺−L⁻})`, valid for a single species.
pub fn grand_partition_single<S: Scalar>(lattice: Lattice, z: &S, ctx: &QContext<S>) -> S {
    lattice.sites().fold(S::one(), |acc, k| {
        acc * (S::one() + z.clone() * ctx.pow(2 * k - lattice.span_sum()))
    })
}

/// Normalized grand-canonical measure `∏ z_α^{N^α(η)} q^{−E(η)} / Z`.
pub fn grand_measure<S: Scalar>(lattice: Lattice, fugacities: &[S], ctx: &QContext<S>) -> Result<Measure<S>> {
    let n = fugacities.len() as u8;
    let m = Measure::from_fn(lattice, n, |c| {
        let counts = c.counts();
        fugacities
            .iter()
            .enumerate()
            .fold(reversible_weight(c, ctx), |acc, (a, f)| acc * f.powi(counts.get(a + 1) as i64))
    })?;
    m.normalize()
}

/// Product measure with species `β` at site `k` with probability
/// `λq^{2k}/(1+λq^{2k})` and species `α` otherwise.
pub fn blocking_measure<S: Scalar>(
    lattice: Lattice,
    n: u8,
    alpha: u8,
    beta: u8,
    lambda: &S,
    ctx: &QContext<S>,
) -> Result<Measure<S>> {
    if alpha >= beta || beta > n {
        return Err(Error::InvalidArgument(format!(
            "blocking measure needs alpha < beta <= n, got ({alpha},{beta})"
        )));
    }
    if *lambda <= S::zero() {
        return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
    }
    let mut m = Measure::from_fn(lattice, n, |c| {
        lattice.sites().fold(S::one(), |acc, k| {
            let r = blocking_marginal(k, lambda, ctx);
            match c.get(k) {
                e if e == beta => acc * r,
                e if e == alpha => acc * (S::one() - r),
                _ => S::zero(),
            }
        })
    })?;
    m.normalized = true;
    Ok(m)
}

/// Probability of the higher species at absolute site `k` under a blocking measure.
pub fn blocking_marginal<S: Scalar>(k: i64, lambda: &S, ctx: &QContext<S>) -> S {
    let x = lambda.clone() * ctx.pow(2 * k);
    x.clone() / (S::one() + x)
}

/// Verify detailed balance `μ(η) w(η→η') = μ(η') w(η'→η)` on every transition,
/// i.e. `μ̂⁻¹ H μ̂ = Hᵀ` on the support of `μ`.
pub fn check_detailed_balance<S: Scalar>(h: &SparseOperator<S>, m: &Measure<S>) -> Result<CheckReport> {
    let w = m.weights();
    if w.len() != h.dim() {
        return Err(Error::InvalidArgument("measure and generator dimensions differ".into()));
    }
    let mut max: f64 = 0.0;
    let mut exact_zero = true;
    let mut checked = 0;
    let mut scale: f64 = 1.0;
    for (i, j, v) in h.triplets() {
        if i == j {
            continue;
        }
        if w[i].is_zero() != w[j].is_zero() {
            return Err(Error::InvalidArgument(format!(
                "zero weight on reachable configuration (basis {} <-> {})",
                i + 1,
                j + 1
            )));
        }
        if w[j].is_zero() {
            continue;
        }
        let lhs = w[j].clone() * v.clone();
        let rhs = w[i].clone() * h.get(j, i);
        let d = lhs.clone() - rhs;
        if !d.is_zero() {
            exact_zero = false;
        }
        max = max.max(d.abs().as_f64());
        scale = scale.max(lhs.abs().as_f64());
        checked += 1;
    }
    Ok(if S::EXACT {
        CheckReport::exact("detailed-balance", exact_zero, max, checked)
    } else {
        CheckReport::within("detailed-balance", max, 1e-9 * scale, checked)
    })
}

/// `max |H μ|`: zero for a stationary measure.
pub fn stationarity_residual<S: Scalar>(h: &SparseOperator<S>, m: &Measure<S>) -> CheckReport {
    let r = h.apply(m.weights());
    let zeros = vec![S::zero(); r.len()];
    crate::report::vector_equality("stationarity", &r, &zeros)
}

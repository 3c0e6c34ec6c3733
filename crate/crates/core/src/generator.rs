//! Transition rates and the generator in quantum Hamiltonian form.
//!
//! `H` stores minus the rates off the diagonal and the exit rates on it, so
//! every column sums to zero and a probability vector `P` evolves by
//! `dP/dt = −H P`. Basis vectors are ordered by `ι(η) = 1 + Σ_k η_k (n+1)^{k−L⁻}`,
//! i.e. site `L⁻` is the least significant digit.

use crate::error::{Error, Result};
use crate::model::{Config, Lattice};
use crate::qcalc::{QContext, Scalar};
use crate::sparse::SparseOperator;

/// Default cap on `(n+1)^L`.
pub const DEFAULT_DIM_CAP: usize = 200_000;

/// Environment variable overriding [`DEFAULT_DIM_CAP`].
pub const DIM_CAP_ENV: &str = "PRIORITY_ASEP_DIM_CAP";

pub fn dim_cap() -> usize {
    std::env::var(DIM_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_DIM_CAP)
}

/// `(n+1)^L`, refusing sizes above the cap.
pub fn state_dim(n: u8, lattice: Lattice) -> Result<usize> {
    let cap = dim_cap();
    let dim = (n as u128 + 1).checked_pow(lattice.len() as u32).unwrap_or(u128::MAX);
    if dim > cap as u128 {
        return Err(Error::DimensionCap { dim, cap });
    }
    Ok(dim as usize)
}

/// Hopping parameters: overall rate `w > 0`, asymmetry `q`, species count `n`.
#[derive(Clone, Debug)]
pub struct RateParams<S> {
    pub w: S,
    pub ctx: QContext<S>,
    pub n: u8,
}

impl<S: Scalar> RateParams<S> {
    pub fn new(n: u8, w: S, ctx: QContext<S>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("species count n must be >= 1".into()));
        }
        if w <= S::zero() {
            return Err(Error::InvalidArgument(format!("w must be positive, got {w}")));
        }
        Ok(Self { w, ctx, n })
    }

    /// Unit rate `w = 1`.
    pub fn unit(n: u8, ctx: QContext<S>) -> Result<Self> {
        Self::new(n, S::one(), ctx)
    }

    /// `w q^{sgn(a − b)}` for a discordant pair `(a, b)`, zero otherwise.
    pub fn pair_rate(&self, a: u8, b: u8) -> S {
        match a.cmp(&b) {
            std::cmp::Ordering::Equal => S::zero(),
            std::cmp::Ordering::Greater => self.w.clone() * self.ctx.q().clone(),
            std::cmp::Ordering::Less => self.w.clone() * self.ctx.q_inv().clone(),
        }
    }
}

/// Rate at which the bond `(k, k+1)` swaps its occupants.
pub fn hop_rate<S: Scalar>(c: &Config, k: i64, p: &RateParams<S>) -> Result<S> {
    let l = c.lattice();
    if !l.contains(k) || k == l.l_plus() {
        return Err(Error::InvalidArgument(format!("no bond ({k},{}) in {l}", k + 1)));
    }
    Ok(p.pair_rate(c.get(k), c.get(k + 1)))
}

/// 1-based basis index `ι(η)`.
pub fn basis_index(c: &Config) -> usize {
    zero_index(c) + 1
}

/// 0-based basis index, the row/column of `η` in every operator.
pub fn zero_index(c: &Config) -> usize {
    let base = c.n() as usize + 1;
    c.as_slice().iter().rev().fold(0, |acc, &e| acc * base + e as usize)
}

/// Inverse of [`basis_index`].
pub fn basis_config(i: usize, lattice: Lattice, n: u8) -> Result<Config> {
    let dim = (n as u128 + 1).checked_pow(lattice.len() as u32).unwrap_or(u128::MAX);
    if i == 0 || i as u128 > dim {
        return Err(Error::InvalidArgument(format!("basis index {i} outside 1..={dim}")));
    }
    Ok(config_at(i - 1, lattice, n))
}

/// Configuration at 0-based index `i` (unchecked).
pub fn config_at(mut i: usize, lattice: Lattice, n: u8) -> Config {
    let base = n as usize + 1;
    let eta = (0..lattice.len())
        .map(|_| {
            let d = (i % base) as u8;
            i /= base;
            d
        })
        .collect();
    Config::new(lattice, n, eta).expect("digits bounded by n")
}

/// Exact generator `H = Σ_k h_{k,k+1}` on the full state space.
pub fn build_h<S: Scalar>(lattice: Lattice, p: &RateParams<S>) -> Result<SparseOperator<S>> {
    let dim = state_dim(p.n, lattice)?;
    let base = p.n as usize + 1;
    let len = lattice.len();
    Ok(SparseOperator::from_columns(dim, |j| {
        let c = config_at(j, lattice, p.n);
        let eta = c.as_slice();
        let mut col = Vec::new();
        let mut exit = S::zero();
        let mut place = 1usize;
        for o in 0..len - 1 {
            let (a, b) = (eta[o], eta[o + 1]);
            if a != b {
                let rate = p.pair_rate(a, b);
                // swapping digits at places o and o+1
                let target = j + b as usize * place + a as usize * place * base
                    - a as usize * place
                    - b as usize * place * base;
                col.push((target, -rate.clone()));
                exit = exit + rate;
            }
            place *= base;
        }
        if !exit.is_zero() {
            col.push((j, exit));
        }
        col
    }))
}

/// `𝓛f(η) = −Σ_{η'} f(η') H_{η'η}`, the generator acting on an observable.
pub fn apply_generator<S: Scalar>(f: &[S], c: &Config, h: &SparseOperator<S>) -> S {
    let j = zero_index(c);
    -h.column(j)
        .iter()
        .fold(S::zero(), |acc, (i, v)| acc + f[*i].clone() * v.clone())
}

/// `𝓛f` for all configurations at once.
pub fn generator_on<S: Scalar>(f: &[S], h: &SparseOperator<S>) -> Vec<S> {
    h.apply_left(f).into_iter().map(|v| -v).collect()
}

fn bond_inside(c: &Config, k: i64) -> bool {
    let l = c.lattice();
    k >= l.l_minus() && k < l.l_plus()
}

/// Instantaneous current of species `α` across the bond `(k, k+1)`:
/// `Σ_{β<α}(q n^α_k n^β_{k+1} − q⁻¹ n^β_k n^α_{k+1}) − Σ_{β>α}(q n^β_k n^α_{k+1} − q⁻¹ n^α_k n^β_{k+1})`, times `w`.
///
/// Bonds leaving the lattice carry no current, so `𝓛 n^α_k = j_{k−1} − j_k`
/// holds at every site including the two ends.
pub fn current_n<S: Scalar>(c: &Config, k: i64, alpha: u8, p: &RateParams<S>) -> S {
    if !bond_inside(c, k) {
        return S::zero();
    }
    let (a, b) = (c.get(k), c.get(k + 1));
    // species α leaves k to the right, or enters k from k+1
    if a == alpha && b != alpha {
        p.pair_rate(a, b)
    } else if b == alpha && a != alpha {
        -p.pair_rate(a, b)
    } else {
        S::zero()
    }
}

/// Current of `m^α` (species `≥ α`) across `(k, k+1)`:
/// `w(q m^α_k(1−m^α_{k+1}) − q⁻¹(1−m^α_k) m^α_{k+1})`, zero off the lattice.
pub fn current_m<S: Scalar>(c: &Config, k: i64, alpha: u8, p: &RateParams<S>) -> S {
    if !bond_inside(c, k) {
        return S::zero();
    }
    let (a, b) = (c.indicator_m(k, alpha), c.indicator_m(k + 1, alpha));
    match (a, b) {
        (1, 0) => p.w.clone() * p.ctx.q().clone(),
        (0, 1) => -(p.w.clone() * p.ctx.q_inv().clone()),
        _ => S::zero(),
    }
}

//! Representation matrices of the quantum algebra, symmetries of `H`, and
//! self-duality.
//!
//! Single-site matrices act on `C^{n+1}` with basis `|0), …, |n)`; they are
//! lifted to the full space with [`embed`], which is consistent with the
//! basis order of [`crate::generator`]. The symmetry generators `Y±_α`
//! commute with `H`, and `D = π̂⁻¹ Υ⁺₁ ⋯ Υ⁺ₙ` is a self-duality matrix.

use crate::error::{Error, Result};
use crate::generator::{config_at, state_dim, zero_index};
use crate::model::{Config, CoordConfig, Lattice};
use crate::qcalc::{qnum, QContext, Scalar};
use crate::report::{operator_equality, CheckReport};
use crate::sparse::SparseOperator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Matrices on a single site.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SiteOperator {
    Identity,
    /// `σ^{α,+} = |α−1)(α|`
    SigmaPlus(u8),
    /// `σ^{α,−} = |α)(α−1|`
    SigmaMinus(u8),
    /// `n̂^α = |α)(α|`
    Projector(u8),
    /// `ĥ^α = n̂^{α−1} − n̂^α`
    Cartan(u8),
    /// `σ^{αβ} = |α)(β|`
    Flip(u8, u8),
    /// `γ = |n)(0| + Σ_α σ^{α,+}`
    Cyclic,
}

impl SiteOperator {
    /// The `(n+1)×(n+1)` matrix.
    pub fn matrix<S: Scalar>(self, n: u8) -> Result<SparseOperator<S>> {
        let d = n as usize + 1;
        let bad = |a: u8| Error::InvalidArgument(format!("species {a} invalid for n = {n}"));
        let one = S::one;
        let trips: Vec<(usize, usize, S)> = match self {
            SiteOperator::Identity => (0..d).map(|s| (s, s, one())).collect(),
            SiteOperator::SigmaPlus(a) | SiteOperator::SigmaMinus(a) if a == 0 || a > n => {
                return Err(bad(a))
            }
            SiteOperator::SigmaPlus(a) => vec![(a as usize - 1, a as usize, one())],
            SiteOperator::SigmaMinus(a) => vec![(a as usize, a as usize - 1, one())],
            SiteOperator::Projector(a) if a > n => return Err(bad(a)),
            SiteOperator::Projector(a) => vec![(a as usize, a as usize, one())],
            SiteOperator::Cartan(a) if a == 0 || a > n => return Err(bad(a)),
            SiteOperator::Cartan(a) => vec![
                (a as usize - 1, a as usize - 1, one()),
                (a as usize, a as usize, -one()),
            ],
            SiteOperator::Flip(a, b) if a > n || b > n => return Err(bad(a.max(b))),
            SiteOperator::Flip(a, b) => vec![(a as usize, b as usize, one())],
            SiteOperator::Cyclic => (0..d).map(|s| ((s + d - 1) % d, s, one())).collect(),
        };
        Ok(SparseOperator::from_triplets(d, trips))
    }
}

/// Operator whose column `η` has entries `f(η)` given as target configurations.
pub fn from_config_columns<S: Scalar>(
    lattice: Lattice,
    n: u8,
    f: impl Fn(&Config) -> Vec<(Config, S)>,
) -> Result<SparseOperator<S>> {
    let dim = state_dim(n, lattice)?;
    Ok(SparseOperator::from_columns(dim, |j| {
        f(&config_at(j, lattice, n))
            .into_iter()
            .map(|(c, v)| (zero_index(&c), v))
            .collect()
    }))
}

/// Diagonal operator with entries `f(η)`.
pub fn diagonal_of<S: Scalar>(lattice: Lattice, n: u8, f: impl Fn(&Config) -> S) -> Result<SparseOperator<S>> {
    let dim = state_dim(n, lattice)?;
    Ok(SparseOperator::diagonal((0..dim).map(|j| f(&config_at(j, lattice, n))).collect()))
}

/// Local operator `a_k`: the single-site matrix `a` acting on site `k`.
pub fn embed<S: Scalar>(a: &SparseOperator<S>, k: i64, lattice: Lattice, n: u8) -> Result<SparseOperator<S>> {
    if a.dim() != n as usize + 1 {
        return Err(Error::InvalidArgument(format!("site matrix has dimension {}, need {}", a.dim(), n + 1)));
    }
    if !lattice.contains(k) {
        return Err(Error::InvalidArgument(format!("site {k} outside {lattice}")));
    }
    from_config_columns(lattice, n, |c| {
        a.column(c.get(k) as usize)
            .iter()
            .map(|(r, v)| {
                let mut z = c.clone();
                z.set(k, *r as u8).expect("row within species range");
                (z, v.clone())
            })
            .collect()
    })
}

/// `N̂^α = Σ_k n̂^α_k`.
pub fn rep_n<S: Scalar>(alpha: u8, lattice: Lattice, n: u8) -> Result<SparseOperator<S>> {
    if alpha > n {
        return Err(Error::InvalidArgument(format!("species {alpha} exceeds n = {n}")));
    }
    diagonal_of(lattice, n, |c| S::from_i64(c.counts().get(alpha as usize) as i64))
}

fn check_alpha(alpha: u8, n: u8) -> Result<()> {
    if alpha == 0 || alpha > n {
        return Err(Error::InvalidArgument(format!("generator index {alpha} outside 1..={n}")));
    }
    Ok(())
}

/// Move `η_k` from `from` to `to` at every site where possible, with weight
/// `weight(η, k)`.
fn site_moves<S: Scalar>(
    lattice: Lattice,
    n: u8,
    from: u8,
    to: u8,
    weight: impl Fn(&Config, i64) -> Result<S>,
) -> Result<SparseOperator<S>> {
    let dim = state_dim(n, lattice)?;
    let mut cols = Vec::with_capacity(dim);
    for j in 0..dim {
        let c = config_at(j, lattice, n);
        let mut col = Vec::new();
        for k in lattice.sites() {
            if c.get(k) == from {
                let mut z = c.clone();
                z.set(k, to)?;
                col.push((zero_index(&z), weight(&c, k)?));
            }
        }
        cols.push(col);
    }
    Ok(SparseOperator::from_columns(dim, |j| cols[j].clone()))
}

/// `Y^±_α = Σ_k Y^{α,±}(k)` with
/// `Y^{α,+}(k) = q^{−N^α_k} σ^{α,+}_k` and `Y^{α,−}(k) = q^{N^{α−1}_k} σ^{α,−}_k`
/// (balances exclude site `k`, so placement of the diagonal factor is immaterial).
pub fn rep_y<S: Scalar>(alpha: u8, sign: Sign, lattice: Lattice, n: u8, ctx: &QContext<S>) -> Result<SparseOperator<S>> {
    check_alpha(alpha, n)?;
    match sign {
        Sign::Plus => site_moves(lattice, n, alpha, alpha - 1, |c, k| Ok(ctx.pow(-c.balance(k, alpha)))),
        Sign::Minus => site_moves(lattice, n, alpha - 1, alpha, |c, k| Ok(ctx.pow(c.balance(k, alpha - 1)))),
    }
}

/// Coproduct representation `X^±_α = Σ_k q^{½Σ_{l<k}ĥ^α_l} σ^{α,±}_k q^{−½Σ_{l>k}ĥ^α_l}`.
///
/// Needs `q^{1/2}` unless `q = 1`; fails with [`Error::MissingSqrt`] otherwise.
pub fn rep_x<S: Scalar>(alpha: u8, sign: Sign, lattice: Lattice, n: u8, ctx: &QContext<S>) -> Result<SparseOperator<S>> {
    check_alpha(alpha, n)?;
    let w = |c: &Config, k: i64| ctx.pow_half(c.balance(k, alpha - 1) - c.balance(k, alpha));
    match sign {
        Sign::Plus => site_moves(lattice, n, alpha, alpha - 1, w),
        Sign::Minus => site_moves(lattice, n, alpha - 1, alpha, w),
    }
}

/// `Υ^±_α = Σ_{l=0}^{L} (Y^±_α)^l / [l]_q!`.
pub fn upsilon<S: Scalar>(alpha: u8, sign: Sign, lattice: Lattice, n: u8, ctx: &QContext<S>) -> Result<SparseOperator<S>> {
    let y = rep_y(alpha, sign, lattice, n, ctx)?;
    let mut term = SparseOperator::identity(y.dim());
    let mut sum = term.clone();
    for l in 1..=lattice.len() as i64 {
        term = term.matmul(&y).scale(&(S::one() / qnum(l, ctx)));
        if term.is_zero() {
            break;
        }
        sum = sum.add(&term);
    }
    Ok(sum)
}

/// Diagonal `π̂^p` for integer `p`.
pub fn pi_hat<S: Scalar>(lattice: Lattice, n: u8, ctx: &QContext<S>, power: i64) -> Result<SparseOperator<S>> {
    diagonal_of(lattice, n, |c| ctx.pow(-c.energy() * power))
}

/// Factor `(α, sign)` in a product of `Υ` matrices.
pub type UpsilonFactor = (u8, Sign);

/// `π̂⁻¹ Υ⁺₁ Υ⁺₂ ⋯ Υ⁺ₙ`, or `π̂⁻¹` times the given ordered product.
pub fn duality_matrix<S: Scalar>(
    lattice: Lattice,
    n: u8,
    ctx: &QContext<S>,
    order: Option<&[UpsilonFactor]>,
) -> Result<SparseOperator<S>> {
    let default: Vec<UpsilonFactor> = (1..=n).map(|a| (a, Sign::Plus)).collect();
    let order = order.unwrap_or(&default);
    let mut d = pi_hat(lattice, n, ctx, -1)?;
    for &(a, s) in order {
        d = d.matmul(&upsilon(a, s, lattice, n, ctx)?);
    }
    Ok(d)
}

/// `Q̃^α_k(η; c) = q^{−(1+c)Σ_{l<k}(1−m^α_l) + (1−c)Σ_{l>k}(1−m^α_l)} m^α_k`.
pub fn q_tilde<S: Scalar>(c: &Config, k: i64, alpha: u8, coeff: f64, ctx: &QContext<S>) -> Result<S> {
    if c.indicator_m(k, alpha) == 0 {
        return Ok(S::zero());
    }
    let l = c.lattice();
    let holes = |r: std::ops::RangeInclusive<i64>| r.filter(|&j| c.indicator_m(j, alpha) == 0).count() as f64;
    let left = holes(l.l_minus()..=k - 1);
    let right = holes(k + 1..=l.l_plus());
    ctx.pow_real(-(1.0 + coeff) * left + (1.0 - coeff) * right)
}

/// Closed-form duality function `D(x, η; c⃗) = ∏_i Q̃^{α_i}_{x_i}(η; c_{α_i})`.
///
/// `coeffs[α−1]` is `c_α`; an empty slice means `c⃗ = 0`.
pub fn duality_value<S: Scalar>(x: &CoordConfig, eta: &Config, coeffs: &[f64], ctx: &QContext<S>) -> Result<S> {
    let mut v = S::one();
    for (k, a) in x.iter() {
        if !eta.lattice().contains(k) || a == 0 || a > eta.n() {
            return Err(Error::InvalidArgument(format!("dual particle ({k},{a}) invalid")));
        }
        let coeff = if coeffs.is_empty() { 0.0 } else { coeffs[a as usize - 1] };
        v = v * q_tilde(eta, k, a, coeff, ctx)?;
        if v.is_zero() {
            break;
        }
    }
    Ok(v)
}

/// `Q^α_k(η) = m^α_k q^{M^α_k}`.
pub fn q_observable<S: Scalar>(c: &Config, k: i64, alpha: u8, ctx: &QContext<S>) -> S {
    if c.indicator_m(k, alpha) == 0 {
        S::zero()
    } else {
        ctx.pow(c.balance_m(k, alpha))
    }
}

/// `J^α_k = w(q Q^α_k − q⁻¹ Q^α_{k+1})` on bonds inside the lattice; zero at
/// `k = L⁻−1` and `k = L⁺`, so `𝓛Q^α_k = J^α_{k−1} − J^α_k` for every site.
pub fn q_current<S: Scalar>(c: &Config, k: i64, alpha: u8, w: &S, ctx: &QContext<S>) -> S {
    let l = c.lattice();
    if k < l.l_minus() || k >= l.l_plus() {
        return S::zero();
    }
    w.clone()
        * (ctx.q().clone() * q_observable(c, k, alpha, ctx)
            - ctx.q_inv().clone() * q_observable(c, k + 1, alpha, ctx))
}

/// Check `[H, N̂^α] = 0` for all `α` and `[H, Y^±_α] = 0` for `α ≥ 1`.
pub fn verify_symmetry<S: Scalar>(h: &SparseOperator<S>, lattice: Lattice, n: u8, ctx: &QContext<S>) -> Result<CheckReport> {
    let zero = SparseOperator::zeros(h.dim());
    let mut parts = Vec::new();
    for a in 0..=n {
        let c = h.commutator(&rep_n(a, lattice, n)?);
        parts.push(operator_equality(format!("[H,N{a}]"), &c, &zero));
    }
    for a in 1..=n {
        for s in [Sign::Plus, Sign::Minus] {
            let c = h.commutator(&rep_y(a, s, lattice, n, ctx)?);
            parts.push(operator_equality(format!("[H,Y{a}{s:?}]"), &c, &zero));
        }
    }
    Ok(CheckReport::combine("symmetry", &parts))
}

/// Check `D H = Hᵀ D`.
pub fn verify_duality<S: Scalar>(d: &SparseOperator<S>, h: &SparseOperator<S>) -> CheckReport {
    operator_equality("duality", &d.matmul(h), &h.transpose().matmul(d))
}

/// Matrix of the closed-form duality function at `c⃗ = 0`, rows indexed by `ζ`.
pub fn duality_closed_form<S: Scalar>(lattice: Lattice, n: u8, ctx: &QContext<S>) -> Result<SparseOperator<S>> {
    duality_closed_form_with(lattice, n, &[], ctx)
}

/// As [`duality_closed_form`] for a general coefficient vector `c⃗`.
pub fn duality_closed_form_with<S: Scalar>(lattice: Lattice, n: u8, coeffs: &[f64], ctx: &QContext<S>) -> Result<SparseOperator<S>> {
    if !coeffs.is_empty() && coeffs.len() != n as usize {
        return Err(Error::InvalidArgument(format!("need {n} coefficients, got {}", coeffs.len())));
    }
    let dim = state_dim(n, lattice)?;
    let rows: Vec<CoordConfig> = (0..dim).map(|i| config_at(i, lattice, n).to_coords()).collect();
    let mut trips = Vec::new();
    for j in 0..dim {
        let eta = config_at(j, lattice, n);
        for (i, x) in rows.iter().enumerate() {
            let v = duality_value(x, &eta, coeffs, ctx)?;
            if !v.is_zero() {
                trips.push((i, j, v));
            }
        }
    }
    Ok(SparseOperator::from_triplets(dim, trips))
}

/// `π̂^{−c} σ^{α,±}_k π̂^{c} = q^{±c(N^α_k + N^{α−1}_k)} σ^{α,±}_k` for integer `c`,
/// checked for every `α` and site.
pub fn verify_transformation_lemma<S: Scalar>(lattice: Lattice, n: u8, ctx: &QContext<S>, c: i64) -> Result<CheckReport> {
    let pc = pi_hat(lattice, n, ctx, c)?;
    let pmc = pi_hat(lattice, n, ctx, -c)?;
    let mut parts = Vec::new();
    for a in 1..=n {
        for k in lattice.sites() {
            for s in [Sign::Plus, Sign::Minus] {
                let site = match s {
                    Sign::Plus => SiteOperator::SigmaPlus(a),
                    Sign::Minus => SiteOperator::SigmaMinus(a),
                };
                let sig = embed(&site.matrix(n)?, k, lattice, n)?;
                let lhs = pmc.matmul(&sig).matmul(&pc);
                let sgn = if s == Sign::Plus { 1 } else { -1 };
                let diag = diagonal_of(lattice, n, |e| ctx.pow(sgn * c * (e.balance(k, a) + e.balance(k, a - 1))))?;
                parts.push(operator_equality(format!("lemma a={a} k={k}"), &lhs, &diag.matmul(&sig)));
            }
        }
    }
    Ok(CheckReport::combine("transformation-lemma", &parts))
}

/// `H^{PS} = π̂^{−1/2} H π̂^{1/2}`; needs `q^{1/2}`.
pub fn perk_schultz<S: Scalar>(h: &SparseOperator<S>, lattice: Lattice, n: u8, ctx: &QContext<S>) -> Result<SparseOperator<S>> {
    let dim = state_dim(n, lattice)?;
    let e: Vec<i64> = (0..dim).map(|i| config_at(i, lattice, n).energy()).collect();
    let mut trips = Vec::new();
    for (i, j, v) in h.triplets() {
        // π(j)^{1/2} / π(i)^{1/2} = q^{(E_i − E_j)/2}
        trips.push((i, j, v.clone() * ctx.pow_half(e[i] - e[j])?));
    }
    Ok(SparseOperator::from_triplets(dim, trips))
}

/// Checks that need `q^{1/2}`: `H^{PS}` symmetric, `Y = π̂^{1/2} X π̂^{−1/2}`,
/// and `[X⁺_α, X⁻_α] = [N̂^{α−1} − N̂^α]_q`. Skipped when no root is available.
pub fn verify_sqrt_checks<S: Scalar>(h: &SparseOperator<S>, lattice: Lattice, n: u8, ctx: &QContext<S>) -> Result<CheckReport> {
    if ctx.sqrt_q().is_none() && !ctx.is_symmetric() {
        return Ok(CheckReport::skipped("sqrt-q checks", format!("q = {} is not a declared square", ctx.q())));
    }
    let dim = state_dim(n, lattice)?;
    let mut parts = Vec::new();
    let ps = perk_schultz(h, lattice, n, ctx)?;
    parts.push(operator_equality("H^PS symmetric", &ps, &ps.transpose()));
    let half = |sign: i64| -> Result<SparseOperator<S>> {
        let d: Result<Vec<S>> = (0..dim)
            .map(|i| ctx.pow_half(-sign * config_at(i, lattice, n).energy()))
            .collect();
        Ok(SparseOperator::diagonal(d?))
    };
    let (ph, pmh) = (half(1)?, half(-1)?);
    for a in 1..=n {
        let xp = rep_x(a, Sign::Plus, lattice, n, ctx)?;
        let xm = rep_x(a, Sign::Minus, lattice, n, ctx)?;
        for (x, s) in [(&xp, Sign::Plus), (&xm, Sign::Minus)] {
            let y = rep_y(a, s, lattice, n, ctx)?;
            parts.push(operator_equality(format!("Y{a}{s:?}=pi^1/2 X pi^-1/2"), &ph.matmul(x).matmul(&pmh), &y));
        }
        let cartan = diagonal_of(lattice, n, |c| {
            let cnt = c.counts();
            qnum(cnt.get(a as usize - 1) as i64 - cnt.get(a as usize) as i64, ctx)
        })?;
        parts.push(operator_equality(format!("[X{a}+,X{a}-]"), &xp.commutator(&xm), &cartan));
    }
    Ok(CheckReport::combine("sqrt-q checks", &parts))
}

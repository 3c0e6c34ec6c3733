//! Shock measures, the `Uⁿ` transformation, and the shock exclusion process.
//!
//! A marker of type `α ∈ {1,…,n}` sits on its site as a species `α−1`
//! particle; between markers `i` and `i+1` sites carry species `n` with
//! probability `ρ_i` and are empty otherwise. The dual configuration `x`
//! uses the marker types as colours, while the shock exclusion process
//! labels a marker by the species it carries (`type − 1`).

use std::collections::HashMap;
use std::io::Write;

use crate::algebra::{diagonal_of, duality_value, from_config_columns, pi_hat};
use crate::error::{Error, Result};
use crate::generator::{hop_rate, state_dim, RateParams};
use crate::measures::Measure;
use crate::model::{Config, CoordConfig, Lattice};
use crate::qcalc::{QContext, Scalar};
use crate::report::{operator_equality, vector_equality, CheckReport};
use crate::sparse::SparseOperator;

/// Parameters shared by all shock measures with `K` markers.
#[derive(Clone, Debug)]
pub struct ShockParams<S> {
    pub n: u8,
    pub k: usize,
    pub lambda: f64,
    pub w: S,
    pub ctx: QContext<S>,
}

impl<S: Scalar> ShockParams<S> {
    pub fn new(n: u8, k: usize, lambda: f64, w: S, ctx: QContext<S>) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::InvalidArgument(format!("need n >= 1 and K >= 1, got n={n} K={k}")));
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("lambda must be finite, got {lambda}")));
        }
        if w <= S::zero() {
            return Err(Error::InvalidArgument(format!("w must be positive, got {w}")));
        }
        Ok(Self { n, k, lambda, w, ctx })
    }

    pub fn rate_params(&self) -> RateParams<S> {
        RateParams { w: self.w.clone(), ctx: self.ctx.clone(), n: self.n }
    }

    /// Fugacity `q^{2j−K+λ}` of segment `j`.
    pub fn fugacity(&self, j: usize) -> Result<S> {
        self.ctx.pow_real((2 * j as i64 - self.k as i64) as f64 + self.lambda)
    }

    /// `ρ_j = q^{2j−K+λ} / (1 + q^{2j−K+λ})`.
    pub fn marginal(&self, j: usize) -> Result<S> {
        if j > self.k {
            return Err(Error::InvalidArgument(format!("segment {j} outside 0..={}", self.k)));
        }
        let f = self.fugacity(j)?;
        Ok(f.clone() / (S::one() + f))
    }

    pub fn marginals(&self) -> Result<Vec<S>> {
        (0..=self.k).map(|j| self.marginal(j)).collect()
    }
}

/// Marker positions and types.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ShockConfig {
    markers: CoordConfig,
}

impl ShockConfig {
    pub fn new(positions: Vec<i64>, types: Vec<u8>, n: u8) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidArgument("need at least one shock marker".into()));
        }
        if let Some(t) = types.iter().find(|&&t| t == 0 || t > n) {
            return Err(Error::InvalidArgument(format!("marker type {t} outside 1..={n}")));
        }
        Ok(Self { markers: CoordConfig::new(positions, types)? })
    }

    /// Markers read off a dual configuration (colours are types).
    pub fn from_dual(x: &Config) -> Result<Self> {
        let c = x.to_coords();
        Self::new(c.positions().to_vec(), c.colours().to_vec(), x.n())
    }

    pub fn positions(&self) -> &[i64] {
        self.markers.positions()
    }

    pub fn types(&self) -> &[u8] {
        self.markers.colours()
    }

    pub fn len(&self) -> usize {
        self.markers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.markers.is_empty()
    }

    pub fn coords(&self) -> &CoordConfig {
        &self.markers
    }

    /// The dual configuration with the markers as particles.
    pub fn to_dual(&self, lattice: Lattice, n: u8) -> Result<Config> {
        Config::from_coords(&self.markers, lattice, n)
    }

    pub fn is_interior(&self, lattice: Lattice) -> bool {
        self.markers.is_interior(lattice)
    }
}

/// Product shock measure restricted to the lattice.
pub fn shock_measure<S: Scalar>(s: &ShockConfig, lattice: Lattice, p: &ShockParams<S>) -> Result<Measure<S>> {
    if s.len() != p.k {
        return Err(Error::InvalidArgument(format!("{} markers but K = {}", s.len(), p.k)));
    }
    if let Some(x) = s.positions().iter().find(|&&x| !lattice.contains(x)) {
        return Err(Error::InvalidArgument(format!("marker at {x} outside {lattice}")));
    }
    let rho = p.marginals()?;
    let pos = s.positions();
    Measure::from_fn(lattice, p.n, |c| {
        let mut v = S::one();
        let mut seg = 0;
        for k in lattice.sites() {
            let e = c.get(k);
            if seg < pos.len() && pos[seg] == k {
                if e + 1 != s.types()[seg] {
                    return S::zero();
                }
                seg += 1;
                continue;
            }
            if e == p.n {
                v = v * rho[seg].clone();
            } else if e == 0 {
                v = v * (S::one() - rho[seg].clone());
            } else {
                return S::zero();
            }
        }
        v
    })
}

/// Boundary matrix `B̂^γ = w(q − q⁻¹)(n̂^γ_{L⁺} − n̂^γ_{L⁻})`.
pub fn boundary_b<S: Scalar>(lattice: Lattice, n: u8, gamma: u8, w: &S, ctx: &QContext<S>) -> Result<SparseOperator<S>> {
    let f = w.clone() * ctx.asym();
    diagonal_of(lattice, n, |c| {
        let d = c.indicator_n(lattice.l_plus(), gamma) as i64 - c.indicator_n(lattice.l_minus(), gamma) as i64;
        f.clone() * S::from_i64(d)
    })
}

/// Global flip `Γ = ∏_k γ_k`, mapping `|η⟩` to the configuration with every species lowered by one mod `n+1`.
pub fn gamma_matrix<S: Scalar>(lattice: Lattice, n: u8) -> Result<SparseOperator<S>> {
    from_config_columns(lattice, n, |c| vec![(c.global_flip_inv(), S::one())])
}

/// `Uⁿ = π̂ V̂ⁿ Γ` with `V̂ⁿ = q^{Σ_k N̂ⁿ_k}`.
pub fn transform_un<S: Scalar>(lattice: Lattice, n: u8, ctx: &QContext<S>) -> Result<SparseOperator<S>> {
    let v = diagonal_of(lattice, n, |c| ctx.pow(lattice.sites().map(|k| c.balance(k, n)).sum()))?;
    Ok(pi_hat(lattice, n, ctx, 1)?.matmul(&v).matmul(&gamma_matrix(lattice, n)?))
}

/// Alternative form `Uⁿ = Γ π̄̂` with the reduced weight `π̄(η) = q^{−Ē(η)}`.
pub fn transform_un_alt<S: Scalar>(lattice: Lattice, n: u8, ctx: &QContext<S>) -> Result<SparseOperator<S>> {
    let pbar = diagonal_of(lattice, n, |c| ctx.pow(-c.energy_above(1)))?;
    Ok(gamma_matrix(lattice, n)?.matmul(&pbar))
}

/// Check `Uⁿ Hᵀ = (H + B̂ⁿ) Uⁿ` and the alternative form of `Uⁿ`.
pub fn verify_intertwining<S: Scalar>(h: &SparseOperator<S>, lattice: Lattice, n: u8, w: &S, ctx: &QContext<S>) -> Result<CheckReport> {
    let u = transform_un(lattice, n, ctx)?;
    let b = boundary_b(lattice, n, n, w, ctx)?;
    let parts = [
        operator_equality("U H^T = (H+B) U", &u.matmul(&h.transpose()), &h.add(&b).matmul(&u)),
        operator_equality("U = Gamma pibar", &u, &transform_un_alt(lattice, n, ctx)?),
    ];
    Ok(CheckReport::combine("intertwining", &parts))
}

/// Rates of the shock exclusion process.
#[derive(Clone, Debug, PartialEq)]
pub struct ShockRates<S> {
    pub rho: Vec<S>,
    /// `v_i` for markers `i = 1..K` (index `i−1`).
    pub v: Vec<S>,
    pub w_plus: Vec<S>,
    pub w_minus: Vec<S>,
    w: S,
    q: S,
    q_inv: S,
}

impl<S: Scalar> ShockRates<S> {
    /// Exchange rate of adjacent markers carrying species `left`, `right`.
    pub fn colour_rate(&self, left: u8, right: u8) -> S {
        match (left, right) {
            (0, 0) => S::zero(),
            (_, 0) => self.w.clone() * self.q.clone(),
            (0, _) => self.w.clone() * self.q_inv.clone(),
            (a, b) if a == b => S::zero(),
            (a, b) if b > a => self.w.clone() * self.q.clone(),
            _ => self.w.clone() * self.q_inv.clone(),
        }
    }
}

fn check_asymmetric<S: Scalar>(ctx: &QContext<S>) -> Result<()> {
    if ctx.is_symmetric() {
        return Err(Error::InvalidArgument("shock rates need q > 1".into()));
    }
    Ok(())
}

/// `v_i = (q−q⁻¹)ρ_i(1−ρ_i)/(ρ_i−ρ_{i−1})`, jump rates `w v_i^{±1}`.
pub fn shock_rates<S: Scalar>(p: &ShockParams<S>) -> Result<ShockRates<S>> {
    check_asymmetric(&p.ctx)?;
    let rho = p.marginals()?;
    let a = p.ctx.asym();
    let mut v = Vec::with_capacity(p.k);
    let mut w_plus = Vec::with_capacity(p.k);
    let mut w_minus = Vec::with_capacity(p.k);
    for i in 1..=p.k {
        let (r, rl) = (rho[i].clone(), rho[i - 1].clone());
        let d = r.clone() - rl.clone();
        let vi = a.clone() * r.clone() * (S::one() - r) / d.clone();
        let vi_inv = a.clone() * rl.clone() * (S::one() - rl) / d;
        w_plus.push(p.w.clone() * vi.clone());
        w_minus.push(p.w.clone() * vi_inv);
        v.push(vi);
    }
    Ok(ShockRates {
        rho,
        v,
        w_plus,
        w_minus,
        w: p.w.clone(),
        q: p.ctx.q().clone(),
        q_inv: p.ctx.q_inv().clone(),
    })
}

/// Predicted drift and diffusion of each marker on the infinite line.
#[derive(Clone, Debug, PartialEq)]
pub struct ShockPrediction<S> {
    pub rho: Vec<S>,
    pub velocity: Vec<S>,
    pub diffusion: Vec<S>,
}

/// `v_i = w(q−q⁻¹)(1−ρ_i−ρ_{i−1})`,
/// `D_i = (w/2)(q−q⁻¹)(ρ_i(1−ρ_i)+ρ_{i−1}(1−ρ_{i−1}))/(ρ_i−ρ_{i−1})`.
pub fn shock_predictions<S: Scalar>(p: &ShockParams<S>) -> Result<ShockPrediction<S>> {
    check_asymmetric(&p.ctx)?;
    let rho = p.marginals()?;
    let wa = p.w.clone() * p.ctx.asym();
    let two = S::from_i64(2);
    let var = |r: &S| r.clone() * (S::one() - r.clone());
    let mut velocity = Vec::new();
    let mut diffusion = Vec::new();
    for i in 1..=p.k {
        velocity.push(wa.clone() * (S::one() - rho[i].clone() - rho[i - 1].clone()));
        diffusion.push(wa.clone() / two.clone() * (var(&rho[i]) + var(&rho[i - 1])) / (rho[i].clone() - rho[i - 1].clone()));
    }
    Ok(ShockPrediction { rho, velocity, diffusion })
}

/// Success parameter `p_i = (ρ_K−ρ_i)(ρ_i−ρ_0)/(ρ_i(1−ρ_i))` of the
/// stationary gap `g = x_{i+1} − x_i − 1`, with `P(g = k) = p_i(1−p_i)^k`.
pub fn gap_parameter<S: Scalar>(p: &ShockParams<S>, i: usize) -> Result<S> {
    if i == 0 || i >= p.k {
        return Err(Error::InvalidArgument(format!("gap index {i} outside 1..{}", p.k)));
    }
    let rho = p.marginals()?;
    let (r0, ri, rk) = (rho[0].clone(), rho[i].clone(), rho[p.k].clone());
    Ok((rk - ri.clone()) * (ri.clone() - r0) / (ri.clone() * (S::one() - ri)))
}

/// Geometric pmf `p(1−p)^g`.
pub fn gap_pmf(p: f64, g: u64) -> f64 {
    p * (1.0 - p).powi(g as i32)
}

/// Write `i,rho_i,v_i,D_i,p_i` rows (`p_i` empty for the last marker).
pub fn write_predictions_csv<S: Scalar, W: Write>(p: &ShockParams<S>, out: W) -> Result<()> {
    let pred = shock_predictions(p)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["i", "rho_i", "v_i", "D_i", "p_i"])?;
    for i in 1..=p.k {
        let gap = if i < p.k { gap_parameter(p, i)?.to_string() } else { String::new() };
        w.write_record([
            i.to_string(),
            pred.rho[i].to_string(),
            pred.velocity[i - 1].to_string(),
            pred.diffusion[i - 1].to_string(),
            gap,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `Ψ(x) = ∏_{i=0}^{K} (1 + q^{2i−K+λ})^{x_{i+1}−x_i−1}` with `x_0 = L⁻−1`, `x_{K+1} = L⁺+1`.
pub fn psi<S: Scalar>(x: &Config, p: &ShockParams<S>) -> Result<S> {
    let l = x.lattice();
    let mut edges = vec![l.l_minus() - 1];
    edges.extend(x.to_coords().positions());
    edges.push(l.l_plus() + 1);
    if edges.len() != p.k + 2 {
        return Err(Error::InvalidArgument(format!("{} markers but K = {}", edges.len() - 2, p.k)));
    }
    let mut v = S::one();
    for i in 0..=p.k {
        let f = S::one() + p.fugacity(i)?;
        v = v * f.powi(edges[i + 1] - edges[i] - 1);
    }
    Ok(v)
}

/// `Φ(x) = π̄̄(x) Ψ(x)` with `π̄̄(x) = q^{−Ē̄(x)}`.
pub fn phi<S: Scalar>(x: &Config, p: &ShockParams<S>) -> Result<S> {
    Ok(p.ctx.pow(-x.energy_above(2)) * psi(x, p)?)
}

/// `D*(x, η) = q^{λN⁰(η)} ∏_{α≥2} δ_{N^α(η),N^α(x)} D(x, η; 0)`.
pub fn d_star<S: Scalar>(x: &Config, eta: &Config, p: &ShockParams<S>) -> Result<S> {
    let (cx, ce) = (x.counts(), eta.counts());
    if (2..=p.n as usize).any(|a| cx.get(a) != ce.get(a)) {
        return Ok(S::zero());
    }
    let d = duality_value(&x.to_coords(), eta, &[], &p.ctx)?;
    if d.is_zero() {
        return Ok(d);
    }
    Ok(p.ctx.pow_real(p.lambda * ce.get(0) as f64)? * d)
}

/// The generator of the shock process in matrix form on the dual sector with
/// `K` particles: `G = Φ̂ H Φ̂⁻¹ − b`.
#[derive(Clone, Debug)]
pub struct ShockGenerator<S> {
    pub lattice: Lattice,
    pub states: Vec<Config>,
    index: HashMap<Config, usize>,
    pub g: SparseOperator<S>,
    pub b: S,
    pub phi: Vec<S>,
}

impl<S: Scalar> ShockGenerator<S> {
    pub fn index_of(&self, x: &Config) -> Option<usize> {
        self.index.get(x).copied()
    }
}

/// All dual configurations with exactly `K` particles.
pub fn dual_sector(lattice: Lattice, n: u8, k: usize) -> Result<Vec<Config>> {
    state_dim(n, lattice)?;
    Ok(Config::all(lattice, n).filter(|c| c.counts().get(0) + k == lattice.len()).collect())
}

/// Build `G` and `b = w(q−q⁻¹)(ρ_K − ρ_0)`.
pub fn build_g<S: Scalar>(lattice: Lattice, p: &ShockParams<S>) -> Result<ShockGenerator<S>> {
    if p.k > lattice.len() {
        return Err(Error::InvalidArgument(format!("{} markers do not fit in {lattice}", p.k)));
    }
    let states = dual_sector(lattice, p.n, p.k)?;
    let index: HashMap<Config, usize> = states.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    let phis: Vec<S> = states.iter().map(|x| phi(x, p)).collect::<Result<_>>()?;
    let b = p.w.clone() * p.ctx.asym() * (p.marginal(p.k)? - p.marginal(0)?);
    let rp = p.rate_params();
    let mut trips = Vec::new();
    for (j, x) in states.iter().enumerate() {
        let mut exit = S::zero();
        for k in lattice.l_minus()..lattice.l_plus() {
            let r = hop_rate(x, k, &rp)?;
            if r.is_zero() {
                continue;
            }
            let i = index[&x.local_permute(k)?];
            trips.push((i, j, -(r.clone() * phis[i].clone() / phis[j].clone())));
            exit = exit + r;
        }
        trips.push((j, j, exit - b.clone()));
    }
    Ok(ShockGenerator {
        lattice,
        g: SparseOperator::from_triplets(states.len(), trips),
        states,
        index,
        b,
        phi: phis,
    })
}

/// Check that `−G` has nonnegative off-diagonals equal to the shock process
/// rates and zero column sums on interior configurations.
pub fn verify_g_rates<S: Scalar>(gen: &ShockGenerator<S>, p: &ShockParams<S>) -> Result<CheckReport> {
    let rates = shock_rates(p)?;
    let l = gen.lattice;
    let sums = gen.g.column_sums();
    let mut parts = Vec::new();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    let mut checked = 0;
    for (j, x) in gen.states.iter().enumerate() {
        if !x.to_coords().is_interior(l) {
            continue;
        }
        let s = ShockConfig::from_dual(x)?;
        let (pos, types) = (s.positions(), s.types());
        // expected −G_{yx} for every y ≠ x
        let mut expect: HashMap<usize, S> = HashMap::new();
        for i in 0..p.k {
            let right_free = pos[i] < l.l_plus() && (i + 1 == p.k || pos[i + 1] > pos[i] + 1);
            let left_free = pos[i] > l.l_minus() && (i == 0 || pos[i - 1] < pos[i] - 1);
            let moved = |d: i64| -> Result<usize> {
                let mut y = x.clone();
                y.set(pos[i], 0)?;
                y.set(pos[i] + d, types[i])?;
                Ok(gen.index[&y])
            };
            if right_free {
                expect.insert(moved(1)?, rates.w_plus[i].clone());
            }
            if left_free {
                expect.insert(moved(-1)?, rates.w_minus[i].clone());
            }
            if i + 1 < p.k && pos[i + 1] == pos[i] + 1 {
                let r = rates.colour_rate(types[i] - 1, types[i + 1] - 1);
                if !r.is_zero() {
                    expect.insert(gen.index[&x.local_permute(pos[i])?], r);
                }
            }
        }
        let actual: HashMap<usize, S> = gen
            .g
            .column(j)
            .iter()
            .filter(|(i, _)| *i != j)
            .map(|(i, v)| (*i, -v.clone()))
            .collect();
        for (i, v) in &actual {
            if *v < S::zero() {
                ok = false;
            }
            let e = expect.get(i).cloned().unwrap_or_else(S::zero);
            let d = v.abs_diff_f64(&e);
            worst = worst.max(d);
            if !(v.clone() - e.clone()).is_negligible(e.as_f64().abs().max(1.0)) {
                ok = false;
            }
            checked += 1;
        }
        if expect.keys().any(|i| !actual.contains_key(i)) {
            ok = false;
        }
        parts.push(vector_equality(format!("column sum {x}"), &[sums[j].clone()], &[S::zero()]));
    }
    parts.push(CheckReport::exact("G rates", ok, worst, checked));
    Ok(CheckReport::combine("shock-rates", &parts))
}

/// Check, for every interior dual configuration `x`:
/// `⟨s|Uⁿ D*ᵀ|x⟩ = Φ(x)`, `μ_x = Uⁿ D*ᵀ|x⟩ / Φ(x)` and
/// `(H + B̂ⁿ − b) μ_x = Σ_y G_{yx} μ_y`.
pub fn verify_shock_evolution<S: Scalar>(h: &SparseOperator<S>, lattice: Lattice, p: &ShockParams<S>) -> Result<CheckReport> {
    let gen = build_g(lattice, p)?;
    let u = transform_un(lattice, p.n, &p.ctx)?;
    let hb = h.add(&boundary_b(lattice, p.n, p.n, &p.w, &p.ctx)?).shift(&-gen.b.clone());
    let mus: Vec<Vec<S>> = gen
        .states
        .iter()
        .map(|x| Ok(shock_measure(&ShockConfig::from_dual(x)?, lattice, p)?.weights().to_vec()))
        .collect::<Result<_>>()?;
    let etas: Vec<Config> = Config::all(lattice, p.n).collect();
    let mut parts = Vec::new();
    let mut skipped = 0;
    for (j, x) in gen.states.iter().enumerate() {
        if !x.to_coords().is_interior(lattice) {
            skipped += 1;
            continue;
        }
        let dt: Vec<S> = etas.iter().map(|e| d_star(x, e, p)).collect::<Result<_>>()?;
        let udt = u.apply(&dt);
        let norm = udt.iter().fold(S::zero(), |a, v| a + v.clone());
        parts.push(vector_equality(format!("Phi {x}"), &[norm], &[gen.phi[j].clone()]));
        let from_duality: Vec<S> = udt.iter().map(|v| v.clone() / gen.phi[j].clone()).collect();
        parts.push(vector_equality(format!("mu from duality {x}"), &from_duality, &mus[j]));
        let lhs = hb.apply(&mus[j]);
        let mut rhs = vec![S::zero(); lhs.len()];
        for (i, g) in gen.g.column(j) {
            for (r, m) in rhs.iter_mut().zip(&mus[*i]) {
                *r = r.clone() + g.clone() * m.clone();
            }
        }
        parts.push(vector_equality(format!("evolution {x}"), &lhs, &rhs));
    }
    parts.push(verify_g_rates(&gen, p)?);
    let rep = CheckReport::combine("shock-evolution", &parts);
    Ok(if skipped > 0 { rep.with_note(format!("{skipped} boundary configurations excluded")) } else { rep })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::build_h;
    use crate::qcalc::{parse_rational, Rational};

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn params(n: u8, k: usize, lambda: f64, q: &str) -> ShockParams<Rational> {
        ShockParams::new(n, k, lambda, r("1"), QContext::exact(q).unwrap()).unwrap()
    }

    fn fparams(k: usize, lambda: f64, q: f64) -> ShockParams<f64> {
        ShockParams::new(1, k, lambda, 1.0, QContext::float(q).unwrap()).unwrap()
    }

    fn lat(len: i64) -> Lattice {
        Lattice::new(1, len).unwrap()
    }

    #[test]
    fn marginals() {
        let p = params(1, 1, 0.0, "2");
        assert_eq!(p.marginals().unwrap(), vec![r("1/3"), r("2/3")]);
        let p = params(1, 2, 0.0, "2");
        assert_eq!(p.marginal(1).unwrap(), r("1/2"));
        let p = params(1, 1, 1.0, "2");
        assert_eq!(p.marginals().unwrap(), vec![r("1/2"), r("4/5")]);
        assert!(p.marginal(2).is_err());
        // ρ_j(1−ρ_{j−1}) / (ρ_{j−1}(1−ρ_j)) = q²
        let p = ShockParams::new(1, 3, 0.4, 1.0, QContext::float(1.5).unwrap()).unwrap();
        let rho = p.marginals().unwrap();
        for j in 1..=3 {
            let ratio = rho[j] * (1.0 - rho[j - 1]) / (rho[j - 1] * (1.0 - rho[j]));
            assert!((ratio - 2.25).abs() < 1e-12);
            assert!(rho[j] > rho[j - 1]);
        }
        // half-integer exponents need a declared root in exact mode
        assert!(params(1, 1, 0.5, "2").marginal(0).is_err());
        assert_eq!(params(1, 1, 0.5, "4").marginal(0).unwrap(), r("1/3"));
    }

    #[test]
    fn shock_measure_product() {
        let p = params(1, 1, 0.0, "2");
        let s = ShockConfig::new(vec![2], vec![1], 1).unwrap();
        let m = shock_measure(&s, lat(3), &p).unwrap();
        assert_eq!(m.total(), r("1"));
        for c in Config::all(lat(3), 1) {
            let expect = if c.get(2) != 0 {
                r("0")
            } else {
                let left = if c.get(1) == 1 { r("1/3") } else { r("2/3") };
                let right = if c.get(3) == 1 { r("2/3") } else { r("1/3") };
                left * right
            };
            assert_eq!(m.weight(&c), expect);
        }
        // n=2, K=2, L=5: markers of type 2 and 1
        let p = params(2, 2, 1.0, "3/2");
        let s = ShockConfig::new(vec![2, 4], vec![2, 1], 2).unwrap();
        let m = shock_measure(&s, lat(5), &p).unwrap();
        let rho = p.marginals().unwrap();
        assert_eq!(m.total(), r("1"));
        for c in Config::all(lat(5), 2) {
            let mut v = r("1");
            for k in 1..=5i64 {
                let seg = match k {
                    1 => 0,
                    3 => 1,
                    5 => 2,
                    _ => usize::MAX,
                };
                let e = c.get(k);
                v *= match (k, e) {
                    (2, 1) | (4, 0) => r("1"),
                    (2, _) | (4, _) => r("0"),
                    (_, 2) => rho[seg].clone(),
                    (_, 0) => r("1") - rho[seg].clone(),
                    _ => r("0"),
                };
            }
            assert_eq!(m.weight(&c), v);
        }
        assert!(ShockConfig::new(vec![2, 2], vec![1, 1], 1).is_err());
        assert!(ShockConfig::new(vec![2], vec![3], 2).is_err());
    }

    #[test]
    fn transformations() {
        let (l, n) = (lat(3), 2);
        let ctx = QContext::<Rational>::exact("2").unwrap();
        let g: SparseOperator<Rational> = gamma_matrix(l, n).unwrap();
        assert!(g.column_sums().iter().all(|s| *s == r("1")));
        assert!(g.transpose().column_sums().iter().all(|s| *s == r("1")));
        assert_eq!(transform_un(l, n, &ctx).unwrap(), transform_un_alt(l, n, &ctx).unwrap());
        let one = QContext::<Rational>::exact("1").unwrap();
        assert!(boundary_b(l, n, n, &r("1"), &one).unwrap().is_zero());
    }

    #[test]
    fn intertwining_examples() {
        for (n, len, q) in [(1u8, 3i64, "2"), (2, 3, "3/2"), (2, 3, "1"), (3, 3, "2")] {
            let ctx = QContext::<Rational>::exact(q).unwrap();
            let p = RateParams::new(n, r("3/2"), ctx.clone()).unwrap();
            let h = build_h(lat(len), &p).unwrap();
            let rep = verify_intertwining(&h, lat(len), n, &p.w, &ctx).unwrap();
            assert!(rep.passed && rep.max_violation == 0.0, "{rep}");
        }
    }

    #[test]
    fn rates_and_predictions() {
        let p = fparams(1, 1.0, 2.0);
        let rates = shock_rates(&p).unwrap();
        assert!((rates.w_plus[0] - 0.8).abs() < 1e-12);
        assert!((rates.w_minus[0] - 1.25).abs() < 1e-12);
        let pred = shock_predictions(&p).unwrap();
        assert!((pred.velocity[0] + 0.45).abs() < 1e-12);
        assert!((pred.diffusion[0] - 1.025).abs() < 1e-12);
        // drift equals w⁺ − w⁻
        assert!((pred.velocity[0] - (rates.w_plus[0] - rates.w_minus[0])).abs() < 1e-12);

        let p = params(1, 1, 0.0, "2");
        let rates = shock_rates(&p).unwrap();
        assert_eq!(rates.v[0], r("1"));
        assert_eq!(rates.w_minus[0], r("1"));
        let pred = shock_predictions(&p).unwrap();
        assert_eq!((pred.velocity[0].clone(), pred.diffusion[0].clone()), (r("0"), r("1")));

        let p = params(1, 3, 0.0, "3/2");
        let rates = shock_rates(&p).unwrap();
        let pred = shock_predictions(&p).unwrap();
        for i in 0..3 {
            assert_eq!(rates.w_plus[i].clone() * rates.w_minus[i].clone(), r("1"));
            assert_eq!(pred.velocity[i], rates.w_plus[i].clone() - rates.w_minus[i].clone());
            if i > 0 {
                assert!(pred.velocity[i] < pred.velocity[i - 1]);
            }
        }
        assert_eq!(rates.colour_rate(2, 1), r("2/3"));
        assert_eq!(rates.colour_rate(1, 2), r("3/2"));
        assert_eq!(rates.colour_rate(3, 0), r("3/2"));
        assert_eq!(rates.colour_rate(0, 3), r("2/3"));
        assert_eq!(rates.colour_rate(2, 2), r("0"));
        assert!(shock_rates(&params(1, 1, 0.0, "1")).is_err());
    }

    #[test]
    fn gap_law() {
        let p = params(1, 2, 0.0, "2");
        assert_eq!(p.marginals().unwrap(), vec![r("1/5"), r("1/2"), r("4/5")]);
        let g = gap_parameter(&p, 1).unwrap();
        assert_eq!(g, r("9/25"));
        // z-form: z(q^{2K}−q^{2i})(q^{2i}−1)/(q^{2i}(1+z)(1+q^{2K}z)), z = ρ_0/(1−ρ_0)
        for (k, lam, q) in [(2usize, 0.0, "2"), (3, 1.0, "3/2"), (4, -2.0, "5/4")] {
            let p = params(1, k, lam, q);
            let rho0 = p.marginal(0).unwrap();
            let z = rho0.clone() / (r("1") - rho0);
            for i in 1..k {
                let q2k = p.ctx.pow(2 * k as i64);
                let q2i = p.ctx.pow(2 * i as i64);
                let zf = z.clone() * (q2k.clone() - q2i.clone()) * (q2i.clone() - r("1"))
                    / (q2i * (r("1") + z.clone()) * (r("1") + q2k * z.clone()));
                assert_eq!(gap_parameter(&p, i).unwrap(), zf);
            }
        }
        let total: f64 = (0..2000).map(|g| gap_pmf(0.36, g)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(gap_parameter(&fparams(2, 0.0, 1.0001), 1).unwrap() < 1e-6);
        assert!(gap_parameter(&p, 0).is_err());
        assert!(gap_parameter(&params(1, 2, 0.0, "2"), 2).is_err());
    }

    #[test]
    fn phi_example() {
        let p = params(1, 1, 0.0, "2");
        let x: Config = "L=[1,3] eta=0,1,0".parse().unwrap();
        assert_eq!(phi(&x, &p).unwrap(), r("9/2"));
        // the doubly reduced weight only sees colours ≥ 2
        let p = params(3, 3, 0.0, "2");
        let x: Config = "L=[1,3] eta=2,3,1".parse().unwrap();
        let y: Config = "L=[1,3] eta=3,2,1".parse().unwrap();
        assert_eq!(phi(&x, &p).unwrap() / phi(&y, &p).unwrap(), r("4"));
    }

    #[test]
    fn g_rates_n1_l5() {
        for k in [1, 2] {
            let p = params(1, k, 1.0, "2");
            let gen = build_g(lat(5), &p).unwrap();
            let rep = verify_g_rates(&gen, &p).unwrap();
            assert!(rep.passed, "{rep}");
            // right hop of an interior marker: w⁺
            let x: Config = if k == 1 { "L=[1,5] eta=0,0,1,0,0" } else { "L=[1,5] eta=0,1,0,1,0" }.parse().unwrap();
            let y = x.local_permute(if k == 1 { 3 } else { 4 }).unwrap();
            let (i, j) = (gen.index_of(&y).unwrap(), gen.index_of(&x).unwrap());
            assert_eq!(-gen.g.get(i, j), shock_rates(&p).unwrap().w_plus[k - 1]);
        }
    }

    #[test]
    fn evolution_examples() {
        for (n, k, len, q, lam) in [(1u8, 1usize, 4i64, "2", 0.0), (2, 1, 4, "3/2", 0.0), (2, 2, 4, "2", 1.0), (1, 2, 5, "3/2", 1.0)] {
            let p = params(n, k, lam, q);
            let h = build_h(lat(len), &p.rate_params()).unwrap();
            let rep = verify_shock_evolution(&h, lat(len), &p).unwrap();
            assert!(rep.passed && rep.max_violation == 0.0, "n={n} K={k} L={len}: {rep}");
        }
    }

    #[test]
    fn evolution_float_mode() {
        let p = ShockParams::new(2, 1, 0.3, 0.7, QContext::float(1.7).unwrap()).unwrap();
        let h = build_h(lat(4), &p.rate_params()).unwrap();
        assert!(verify_shock_evolution(&h, lat(4), &p).unwrap().passed);
    }

    #[test]
    fn predictions_csv() {
        let p = params(1, 2, 0.0, "2");
        let mut buf = Vec::new();
        write_predictions_csv(&p, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().next().unwrap(), "i,rho_i,v_i,D_i,p_i");
        assert!(s.lines().nth(1).unwrap().ends_with(",9/25"));
        assert_eq!(s.lines().count(), 3);
    }
}

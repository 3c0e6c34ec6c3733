//! Lattices and configurations of the n-species priority ASEP.
//!
//! Sites are addressed by their absolute index `k` in `[L⁻, L⁺]`; storage is
//! rebased internally. A [`Config`] holds one species label in `0..=n` per
//! site, a [`CoordConfig`] lists particle positions together with colours.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Finite segment `{L⁻, …, L⁺}` of the integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    l_minus: i64,
    l_plus: i64,
}

impl Lattice {
    pub fn new(l_minus: i64, l_plus: i64) -> Result<Self> {
        if l_plus < l_minus {
            return Err(Error::InvalidArgument(format!(
                "empty lattice [{l_minus},{l_plus}]"
            )));
        }
        Ok(Self { l_minus, l_plus })
    }

    /// Lattice `{1, …, len}`.
    pub fn with_len(len: usize) -> Result<Self> {
        Self::new(1, len as i64)
    }

    pub fn l_minus(&self) -> i64 {
        self.l_minus
    }

    pub fn l_plus(&self) -> i64 {
        self.l_plus
    }

    pub fn len(&self) -> usize {
        (self.l_plus - self.l_minus + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, k: i64) -> bool {
        (self.l_minus..=self.l_plus).contains(&k)
    }

    pub fn sites(&self) -> std::ops::RangeInclusive<i64> {
        self.l_minus..=self.l_plus
    }

    /// Zero-based storage offset of site `k`.
    pub fn offset(&self, k: i64) -> usize {
        debug_assert!(self.contains(k));
        (k - self.l_minus) as usize
    }

    /// `L⁺ + L⁻`, which recurs in balance formulas.
    pub fn span_sum(&self) -> i64 {
        self.l_plus + self.l_minus
    }

    fn check_site(&self, k: i64) -> Result<()> {
        if self.contains(k) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "site {k} outside lattice [{},{}]",
                self.l_minus, self.l_plus
            )))
        }
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.l_minus, self.l_plus)
    }
}

/// Particle numbers `N^α` and tail sums `M^α = Σ_{β≥α} N^β`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Counts {
    n_alpha: Vec<usize>,
    m_alpha: Vec<usize>,
}

impl Counts {
    /// Counts from `N^0, …, N^n`.
    pub fn new(n_alpha: Vec<usize>) -> Result<Self> {
        if n_alpha.len() < 2 {
            return Err(Error::InvalidArgument("need at least species 0 and 1".into()));
        }
        let mut m_alpha = vec![0; n_alpha.len()];
        let mut acc = 0;
        for a in (0..n_alpha.len()).rev() {
            acc += n_alpha[a];
            m_alpha[a] = acc;
        }
        Ok(Self { n_alpha, m_alpha })
    }

    /// Counts on a lattice of `len` sites from the particle numbers `N^1, …, N^n`.
    pub fn from_particles(len: usize, particles: &[usize]) -> Result<Self> {
        let total: usize = particles.iter().sum();
        if total > len {
            return Err(Error::InvalidArgument(format!(
                "{total} particles do not fit on {len} sites"
            )));
        }
        let mut n_alpha = vec![len - total];
        n_alpha.extend_from_slice(particles);
        Self::new(n_alpha)
    }

    pub fn n(&self) -> usize {
        self.n_alpha.len() - 1
    }

    pub fn len(&self) -> usize {
        self.m_alpha[0]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, alpha: usize) -> usize {
        self.n_alpha[alpha]
    }

    pub fn tail(&self, alpha: usize) -> usize {
        self.m_alpha[alpha]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.n_alpha
    }

    /// Every particle-number sector of `len` sites with `n` species.
    pub fn all_sectors(n: usize, len: usize) -> Vec<Counts> {
        fn rec(rest: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if slots == 1 {
                cur.push(rest);
                out.push(cur.clone());
                cur.pop();
                return;
            }
            for v in 0..=rest {
                cur.push(v);
                rec(rest - v, slots - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(len, n + 1, &mut Vec::new(), &mut out);
        out.into_iter()
            .map(|v| Counts::new(v).expect("n >= 1"))
            .collect()
    }
}

/// Occupation-variable configuration `η ∈ {0,…,n}^Λ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Config {
    lattice: Lattice,
    n: u8,
    eta: Vec<u8>,
}

fn sgn(d: i32) -> i64 {
    d.signum() as i64
}

impl Config {
    pub fn new(lattice: Lattice, n: u8, eta: Vec<u8>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("species count n must be >= 1".into()));
        }
        if eta.len() != lattice.len() {
            return Err(Error::InvalidArgument(format!(
                "configuration has {} sites, lattice {lattice} has {}",
                eta.len(),
                lattice.len()
            )));
        }
        if let Some(&bad) = eta.iter().find(|&&e| e > n) {
            return Err(Error::InvalidArgument(format!("species {bad} exceeds n = {n}")));
        }
        Ok(Self { lattice, n, eta })
    }

    /// All-vacant configuration.
    pub fn empty(lattice: Lattice, n: u8) -> Result<Self> {
        Self::new(lattice, n, vec![0; lattice.len()])
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.eta
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.eta
    }

    /// Species at absolute site `k`.
    pub fn get(&self, k: i64) -> u8 {
        self.eta[self.lattice.offset(k)]
    }

    pub fn set(&mut self, k: i64, species: u8) -> Result<()> {
        self.lattice.check_site(k)?;
        if species > self.n {
            return Err(Error::InvalidArgument(format!("species {species} exceeds n = {}", self.n)));
        }
        let off = self.lattice.offset(k);
        self.eta[off] = species;
        Ok(())
    }

    /// Digit string such as `201`.
    pub fn digits(&self) -> String {
        self.eta.iter().map(|&e| char::from(b'0' + e)).collect()
    }

    pub fn counts(&self) -> Counts {
        let mut n_alpha = vec![0; self.n as usize + 1];
        for &e in &self.eta {
            n_alpha[e as usize] += 1;
        }
        Counts::new(n_alpha).expect("n >= 1")
    }

    /// `n^α_k = [η_k = α]`.
    pub fn indicator_n(&self, k: i64, alpha: u8) -> u8 {
        u8::from(self.get(k) == alpha)
    }

    /// `m^α_k = [η_k ≥ α]`.
    pub fn indicator_m(&self, k: i64, alpha: u8) -> u8 {
        u8::from(self.get(k) >= alpha)
    }

    /// `m^α_k` with the convention that sites outside the lattice are empty.
    pub fn indicator_m_ext(&self, k: i64, alpha: u8) -> u8 {
        if self.lattice.contains(k) {
            self.indicator_m(k, alpha)
        } else {
            u8::from(alpha == 0)
        }
    }

    fn balance_by(&self, k: i64, pred: impl Fn(u8) -> bool) -> i64 {
        let off = self.lattice.offset(k);
        let left = self.eta[..off].iter().filter(|&&e| pred(e)).count() as i64;
        let right = self.eta[off + 1..].iter().filter(|&&e| pred(e)).count() as i64;
        left - right
    }

    /// Particle balance `N^α_k = Σ_{l<k} n^α_l − Σ_{l>k} n^α_l`.
    pub fn balance(&self, k: i64, alpha: u8) -> i64 {
        self.balance_by(k, |e| e == alpha)
    }

    /// `M^α_k = Σ_{β≥α} N^β_k`.
    pub fn balance_m(&self, k: i64, alpha: u8) -> i64 {
        self.balance_by(k, |e| e >= alpha)
    }

    /// Energy `E(η) = −Σ_k Σ_{l<k} sgn(η_k − η_l)`.
    pub fn energy(&self) -> i64 {
        self.energy_above(0)
    }

    /// Energy restricted to pairs of sites that both carry species `≥ min`.
    ///
    /// `min = 1` gives the reduced energy `Ē` (pairs of particles only) and
    /// `min = 2` the doubly reduced energy.
    pub fn energy_above(&self, min: u8) -> i64 {
        // count of each species seen so far, so the sum is O(L n)
        let mut seen = vec![0i64; self.n as usize + 1];
        let mut e = 0;
        for &ek in &self.eta {
            if ek >= min {
                for (b, &c) in seen.iter().enumerate().skip(min as usize) {
                    e -= sgn(ek as i32 - b as i32) * c;
                }
                seen[ek as usize] += 1;
            }
        }
        e
    }

    /// Partial energy `E^{αβ} = −Σ_k n^α_k N^β_k`.
    pub fn partial_energy(&self, alpha: u8, beta: u8) -> i64 {
        -self
            .lattice
            .sites()
            .filter(|&k| self.get(k) == alpha)
            .map(|k| self.balance(k, beta))
            .sum::<i64>()
    }

    /// Vacancy part `E^0 = −Σ_k N^0_k`.
    pub fn energy_vacancy(&self) -> i64 {
        -self.lattice.sites().map(|k| self.balance(k, 0)).sum::<i64>()
    }

    /// Swap `η_k` and `η_{k+1}`.
    pub fn local_permute(&self, k: i64) -> Result<Config> {
        if !self.lattice.contains(k) || k == self.lattice.l_plus {
            return Err(Error::InvalidArgument(format!(
                "bond ({k},{}) not inside lattice {}",
                k + 1,
                self.lattice
            )));
        }
        let mut out = self.clone();
        let off = self.lattice.offset(k);
        out.eta.swap(off, off + 1);
        Ok(out)
    }

    /// `η_k ↦ η_k + 1 mod (n+1)`.
    pub fn cyclic_flip(&self, k: i64) -> Result<Config> {
        self.lattice.check_site(k)?;
        let mut out = self.clone();
        let off = self.lattice.offset(k);
        out.eta[off] = (out.eta[off] + 1) % (self.n + 1);
        Ok(out)
    }

    /// Cyclic flip applied at every site.
    pub fn global_flip(&self) -> Config {
        let mut out = self.clone();
        for e in &mut out.eta {
            *e = (*e + 1) % (self.n + 1);
        }
        out
    }

    /// Inverse of [`Config::global_flip`].
    pub fn global_flip_inv(&self) -> Config {
        let mut out = self.clone();
        for e in &mut out.eta {
            *e = (*e + self.n) % (self.n + 1);
        }
        out
    }

    /// Positions and colours of all particles, left to right.
    pub fn to_coords(&self) -> CoordConfig {
        let (positions, colours) = self
            .lattice
            .sites()
            .zip(&self.eta)
            .filter(|(_, &e)| e != 0)
            .map(|(k, &e)| (k, e))
            .unzip();
        CoordConfig { positions, colours }
    }

    /// Inverse of [`Config::to_coords`].
    pub fn from_coords(x: &CoordConfig, lattice: Lattice, n: u8) -> Result<Config> {
        let mut c = Config::empty(lattice, n)?;
        for (&k, &a) in x.positions.iter().zip(&x.colours) {
            lattice.check_site(k)?;
            if a == 0 || a > n {
                return Err(Error::InvalidArgument(format!(
                    "colour {a} at site {k} outside 1..={n}"
                )));
            }
            let off = lattice.offset(k);
            c.eta[off] = a;
        }
        Ok(c)
    }

    /// Enumerate all `(n+1)^L` configurations in basis order.
    pub fn all(lattice: Lattice, n: u8) -> impl Iterator<Item = Config> {
        let len = lattice.len();
        let total = (n as u64 + 1).pow(len as u32);
        (0..total).map(move |mut i| {
            let mut eta = vec![0u8; len];
            for e in eta.iter_mut() {
                *e = (i % (n as u64 + 1)) as u8;
                i /= n as u64 + 1;
            }
            Config { lattice, n, eta }
        })
    }

    /// All configurations in a particle-number sector, in basis order.
    pub fn sector(lattice: Lattice, counts: &Counts) -> Vec<Config> {
        let n = counts.n() as u8;
        Config::all(lattice, n)
            .filter(|c| c.counts() == *counts)
            .collect()
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let eta: Vec<String> = self.eta.iter().map(|e| e.to_string()).collect();
        write!(f, "L={} eta={}", self.lattice, eta.join(","))
    }
}

impl FromStr for Config {
    type Err = Error;

    /// Parse `L=[1,3] eta=2,0,1`, optionally followed by `n=<species>`.
    /// Without `n=` the largest species present (at least 1) is used.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("{m} in configuration literal {s:?}"));
        let mut lattice = None;
        let mut eta = None;
        let mut n = None;
        for tok in s.split_whitespace() {
            let (key, val) = tok.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            match key {
                "L" => {
                    let inner = val
                        .strip_prefix('[')
                        .and_then(|v| v.strip_suffix(']'))
                        .ok_or_else(|| bad("lattice must be [L-,L+]"))?;
                    let (a, b) = inner.split_once(',').ok_or_else(|| bad("lattice must be [L-,L+]"))?;
                    let a = a.trim().parse().map_err(|_| bad("bad L-"))?;
                    let b = b.trim().parse().map_err(|_| bad("bad L+"))?;
                    lattice = Some(Lattice::new(a, b)?);
                }
                "eta" => {
                    let v: std::result::Result<Vec<u8>, _> =
                        val.split(',').map(|d| d.trim().parse::<u8>()).collect();
                    eta = Some(v.map_err(|_| bad("bad species digit"))?);
                }
                "n" => n = Some(val.parse::<u8>().map_err(|_| bad("bad n"))?),
                _ => return Err(bad("unknown key")),
            }
        }
        let lattice = lattice.ok_or_else(|| bad("missing L="))?;
        let eta = eta.ok_or_else(|| bad("missing eta="))?;
        let n = n.unwrap_or_else(|| eta.iter().copied().max().unwrap_or(1).max(1));
        Config::new(lattice, n, eta)
    }
}

/// Coordinate representation: positions `x_1 < … < x_N` with colours.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoordConfig {
    positions: Vec<i64>,
    colours: Vec<u8>,
}

impl CoordConfig {
    pub fn new(positions: Vec<i64>, colours: Vec<u8>) -> Result<Self> {
        if positions.len() != colours.len() {
            return Err(Error::InvalidArgument(format!(
                "{} positions but {} colours",
                positions.len(),
                colours.len()
            )));
        }
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "positions must be strictly increasing: {positions:?}"
            )));
        }
        Ok(Self { positions, colours })
    }

    pub fn positions(&self) -> &[i64] {
        &self.positions
    }

    pub fn colours(&self) -> &[u8] {
        &self.colours
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, u8)> + '_ {
        self.positions.iter().copied().zip(self.colours.iter().copied())
    }

    /// Whether every position lies strictly inside the lattice.
    pub fn is_interior(&self, lattice: Lattice) -> bool {
        self.positions
            .iter()
            .all(|&x| x > lattice.l_minus() && x < lattice.l_plus())
    }
}

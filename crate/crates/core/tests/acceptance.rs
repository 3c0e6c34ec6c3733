//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//!
//! Reference values are recomputed here from first principles (energies,
//! rates, closed forms) rather than taken from the library.

use std::collections::HashMap;
use std::io::Write;
use std::time::Instant;

use priority_asep::algebra::duality_matrix;
use priority_asep::generator::{build_h, RateParams};
use priority_asep::measures::{canonical_partition, grand_partition, grand_partition_single};
use priority_asep::model::{Config, Counts, Lattice};
use priority_asep::qcalc::{parse_rational, QContext, Rational};
use priority_asep::shocks::{build_g, verify_intertwining, verify_shock_evolution, ShockConfig, ShockParams};
use priority_asep::sim::asep::stationary_histogram;
use priority_asep::sim::replica_rng;
use priority_asep::sim::shock::{estimate_gap_law, estimate_velocity_diffusion, simulate_shock};
use priority_asep::sim::stats::{ks_critical_1pct, total_variation};
use priority_asep::sim::theorem::shock_theorem_check;
use priority_asep::sim::SimParams;
use priority_asep::sparse::SparseOperator;

const SEED: u64 = 20241;

fn r(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn qpow(q: &Rational, e: i64) -> Rational {
    let mut v = r("1");
    for _ in 0..e.abs() {
        v *= q.clone();
    }
    if e < 0 {
        r("1") / v
    } else {
        v
    }
}

/// Configurations in basis order: the leftmost site is the least significant digit.
fn configs(n: u8, len: usize) -> Vec<Vec<u8>> {
    let base = n as usize + 1;
    (0..base.pow(len as u32))
        .map(|mut i| {
            (0..len)
                .map(|_| {
                    let d = (i % base) as u8;
                    i /= base;
                    d
                })
                .collect()
        })
        .collect()
}

fn index(eta: &[u8], n: u8) -> usize {
    eta.iter().rev().fold(0, |a, &e| a * (n as usize + 1) + e as usize)
}

/// `E(η) = −Σ_{l<k} sgn(η_k − η_l)`.
fn energy(eta: &[u8]) -> i64 {
    let mut e = 0;
    for k in 0..eta.len() {
        for l in 0..k {
            e -= (eta[k] as i64 - eta[l] as i64).signum();
        }
    }
    e
}

/// Balance of species satisfying `pred` around position `k` (0-based).
fn balance(eta: &[u8], k: usize, pred: impl Fn(u8) -> bool) -> i64 {
    let left = eta[..k].iter().filter(|&&e| pred(e)).count() as i64;
    let right = eta[k + 1..].iter().filter(|&&e| pred(e)).count() as i64;
    left - right
}

/// Generator with unit `w` built straight from the swap rates `q^{±1}`.
fn reference_h(n: u8, len: usize, q: &Rational) -> SparseOperator<Rational> {
    let mut trips = Vec::new();
    for eta in configs(n, len) {
        let j = index(&eta, n);
        for k in 0..len - 1 {
            let (a, b) = (eta[k], eta[k + 1]);
            if a == b {
                continue;
            }
            let rate = if a > b { q.clone() } else { r("1") / q.clone() };
            let mut t = eta.clone();
            t.swap(k, k + 1);
            trips.push((index(&t, n), j, -rate.clone()));
            trips.push((j, j, rate));
        }
    }
    SparseOperator::from_triplets((n as usize + 1).pow(len as u32), trips)
}

fn library_h(n: u8, len: usize, q: &str) -> SparseOperator<Rational> {
    build_h(Lattice::with_len(len).unwrap(), &RateParams::unit(n, QContext::exact(q).unwrap()).unwrap()).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn line(id: usize, title: &str, o: &Outcome, secs: f64) {
    let verdict = if o.pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    writeln!(out, "criterion {id} {verdict} {title}: {} [{secs:.1} s]", o.detail).unwrap();
}

const QS: [&str; 3] = ["1", "3/2", "2"];

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (mut worst, mut points, mut ok) = (0.0f64, 0, true);
    for n in 1..=3u8 {
        for len in 2..=5usize {
            for qs in QS {
                let q = r(qs);
                let h = library_h(n, len, qs);
                let h_ref = reference_h(n, len, &q);
                let mu: Vec<Rational> = configs(n, len).iter().map(|e| qpow(&q, -energy(e))).collect();
                let mu_inv: Vec<Rational> = mu.iter().map(|m| r("1") / m.clone()).collect();
                let lhs = SparseOperator::diagonal(mu_inv).matmul(&h).matmul(&SparseOperator::diagonal(mu));
                let resid = lhs.sub(&h.transpose());
                ok &= resid.is_zero() && h.sub(&h_ref).is_zero();
                worst = worst.max(resid.max_abs());
                points += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: ok && worst == 0.0 && secs < 60.0,
        detail: format!("{points} (n,L,q) points, generator matches swap rates, max violation {worst:e}, {secs:.1} s < 60 s"),
    }
}

fn criterion_2() -> Outcome {
    let (mut ok, mut sectors, mut points) = (true, 0, 0);
    for n in 1..=3u8 {
        for len in 2..=5usize {
            for qs in QS {
                let q = r(qs);
                let ctx = QContext::exact(qs).unwrap();
                let lattice = Lattice::with_len(len).unwrap();
                let z: Vec<Rational> = ["2/3", "5/4", "3"][..n as usize].iter().map(|s| r(s)).collect();
                let mut by_sector: HashMap<Vec<usize>, Rational> = HashMap::new();
                let mut grand_brute = r("0");
                for eta in configs(n, len) {
                    let mut counts = vec![0usize; n as usize + 1];
                    eta.iter().for_each(|&e| counts[e as usize] += 1);
                    let w = qpow(&q, -energy(&eta));
                    let fug = (1..=n as usize).fold(r("1"), |a, al| a * qpow(&z[al - 1], counts[al] as i64));
                    grand_brute += w.clone() * fug;
                    *by_sector.entry(counts).or_insert_with(|| r("0")) += w;
                }
                let mut sum_form = r("0");
                for (counts, brute) in &by_sector {
                    let c = canonical_partition(lattice, &Counts::new(counts.clone()).unwrap(), &ctx).unwrap();
                    ok &= c == *brute;
                    let fug = (1..=n as usize).fold(r("1"), |a, al| a * qpow(&z[al - 1], counts[al] as i64));
                    sum_form += fug * brute.clone();
                    sectors += 1;
                }
                let grand = grand_partition(lattice, &z, &ctx).unwrap();
                ok &= grand == grand_brute && grand == sum_form;
                if n == 1 {
                    // ∏_{k=1}^{L} (1 + z q^{2k−L−1})
                    let product = (1..=len as i64).fold(r("1"), |a, k| a * (r("1") + z[0].clone() * qpow(&q, 2 * k - len as i64 - 1)));
                    ok &= grand == product && grand_partition_single(lattice, &z[0], &ctx) == product;
                }
                points += 1;
            }
        }
    }
    Outcome { pass: ok, detail: format!("{points} (n,L,q) points, {sectors} sectors, canonical/grand/product forms exact") }
}

/// `Y^{α,+}` (`α → α−1` with `q^{−N^α_k}`) or `Y^{α,−}` (`α−1 → α` with `q^{N^{α−1}_k}`).
fn reference_y(alpha: u8, plus: bool, n: u8, len: usize, q: &Rational) -> SparseOperator<Rational> {
    let mut trips = Vec::new();
    for eta in configs(n, len) {
        for k in 0..len {
            let mut t = eta.clone();
            let coeff = if plus && eta[k] == alpha {
                t[k] = alpha - 1;
                qpow(q, -balance(&eta, k, |e| e == alpha))
            } else if !plus && eta[k] == alpha - 1 {
                t[k] = alpha;
                qpow(q, balance(&eta, k, |e| e == alpha - 1))
            } else {
                continue;
            };
            trips.push((index(&t, n), index(&eta, n), coeff));
        }
    }
    SparseOperator::from_triplets((n as usize + 1).pow(len as u32), trips)
}

fn criterion_3() -> Outcome {
    let (mut ok, mut worst, mut count) = (true, 0.0f64, 0);
    for n in 1..=3u8 {
        for len in 2..=4usize {
            for qs in QS {
                let q = r(qs);
                let h = library_h(n, len, qs);
                for alpha in 0..=n {
                    let num = SparseOperator::diagonal(
                        configs(n, len)
                            .iter()
                            .map(|e| Rational::from_integer((e.iter().filter(|&&x| x == alpha).count() as i64).into()))
                            .collect(),
                    );
                    let c = h.commutator(&num);
                    ok &= c.is_zero();
                    worst = worst.max(c.max_abs());
                    count += 1;
                    if alpha == 0 {
                        continue;
                    }
                    for plus in [true, false] {
                        let c = h.commutator(&reference_y(alpha, plus, n, len, &q));
                        ok &= c.is_zero();
                        worst = worst.max(c.max_abs());
                        count += 1;
                    }
                }
            }
        }
    }
    Outcome { pass: ok && worst == 0.0, detail: format!("{count} commutators, max violation {worst:e}") }
}

/// `∏_{k: ζ_k ≥ 1} m^{ζ_k}_k(η) q^{−#holes left of k + #holes right of k}`, holes being sites with `η < ζ_k`.
fn closed_form(zeta: &[u8], eta: &[u8], q: &Rational) -> Rational {
    let mut v = r("1");
    for (k, &a) in zeta.iter().enumerate() {
        if a == 0 {
            continue;
        }
        if eta[k] < a {
            return r("0");
        }
        v *= qpow(q, -balance(eta, k, |e| e < a));
    }
    v
}

fn criterion_4() -> Outcome {
    let (mut ok, mut worst, mut pairs) = (true, 0.0f64, 0usize);
    for n in 1..=2u8 {
        for len in 2..=4usize {
            for qs in QS {
                let q = r(qs);
                let h = library_h(n, len, qs);
                let d = duality_matrix(Lattice::with_len(len).unwrap(), n, &QContext::exact(qs).unwrap(), None).unwrap();
                let resid = d.matmul(&h).sub(&h.transpose().matmul(&d));
                ok &= resid.is_zero();
                worst = worst.max(resid.max_abs());
                let cs = configs(n, len);
                for (i, zeta) in cs.iter().enumerate() {
                    for (j, eta) in cs.iter().enumerate() {
                        ok &= d.get(i, j) == closed_form(zeta, eta, &q);
                        pairs += 1;
                    }
                }
            }
        }
    }
    Outcome { pass: ok && worst == 0.0, detail: format!("DH = H^T D exact, closed form matches on {pairs} pairs, max violation {worst:e}") }
}

/// `ρ_j = q^{2j−K+λ} / (1 + q^{2j−K+λ})` in floating point.
fn rho(j: usize, k: usize, lambda: f64, q: f64) -> f64 {
    let f = q.powf(2.0 * j as f64 - k as f64 + lambda);
    f / (1.0 + f)
}

/// Exact `ρ_j` for integer `λ`.
fn rho_exact(j: usize, k: usize, lambda: i64, q: &Rational) -> Rational {
    let f = qpow(q, 2 * j as i64 - k as i64 + lambda);
    f.clone() / (r("1") + f)
}

/// Reference shock-process rates out of the interior dual configuration `x`.
fn reference_g_rates(x: &[u8], lattice_len: usize, n: u8, k: usize, lambda: i64, q: &Rational) -> HashMap<usize, Rational> {
    let rh: Vec<Rational> = (0..=k).map(|j| rho_exact(j, k, lambda, q)).collect();
    let asym = q.clone() - r("1") / q.clone();
    let pos: Vec<usize> = (0..lattice_len).filter(|&s| x[s] != 0).collect();
    let mut out = HashMap::new();
    for i in 1..=k {
        let d = rh[i].clone() - rh[i - 1].clone();
        let v = asym.clone() * rh[i].clone() * (r("1") - rh[i].clone()) / d.clone();
        let v_inv = asym.clone() * rh[i - 1].clone() * (r("1") - rh[i - 1].clone()) / d;
        let p = pos[i - 1];
        if p + 1 < lattice_len && x[p + 1] == 0 {
            let mut y = x.to_vec();
            y.swap(p, p + 1);
            out.insert(index(&y, n), v.clone());
        }
        if p > 0 && x[p - 1] == 0 {
            let mut y = x.to_vec();
            y.swap(p, p - 1);
            out.insert(index(&y, n), v_inv);
        }
        if i < k && pos[i] == p + 1 {
            // colours are the carried species, type − 1
            let (a, b) = (x[p] - 1, x[p + 1] - 1);
            let rate = match (a, b) {
                (0, 0) => r("0"),
                (_, 0) => q.clone(),
                (0, _) => r("1") / q.clone(),
                _ if a == b => r("0"),
                _ if b > a => q.clone(),
                _ => r("1") / q.clone(),
            };
            if rate != r("0") {
                let mut y = x.to_vec();
                y.swap(p, p + 1);
                out.insert(index(&y, n), rate);
            }
        }
    }
    out
}

/// `U = π̂ V̂ Γ` and `B̂` built from their definitions; checks `U Hᵀ = (H + B̂) U`.
fn reference_intertwining(h: &SparseOperator<Rational>, n: u8, len: usize, q: &Rational) -> bool {
    let mut u = Vec::new();
    let mut b = Vec::new();
    let asym = q.clone() - r("1") / q.clone();
    for eta in configs(n, len) {
        let target: Vec<u8> = eta.iter().map(|&e| if e == 0 { n } else { e - 1 }).collect();
        let v_exp: i64 = (0..len).map(|k| balance(&target, k, |e| e == n)).sum();
        u.push((index(&target, n), index(&eta, n), qpow(q, -energy(&target)) * qpow(q, v_exp)));
        let d = i64::from(eta[len - 1] == n) - i64::from(eta[0] == n);
        b.push((index(&eta, n), index(&eta, n), asym.clone() * Rational::from_integer(d.into())));
    }
    let dim = h.dim();
    let u = SparseOperator::from_triplets(dim, u);
    let b = SparseOperator::from_triplets(dim, b);
    u.matmul(&h.transpose()).sub(&h.add(&b).matmul(&u)).is_zero()
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let (mut ok, mut worst, mut cases, mut rate_checks) = (true, 0.0f64, 0, 0);
    for n in 1..=2u8 {
        for len in 4..=5usize {
            for qs in ["3/2", "2"] {
                let q = r(qs);
                let ctx = QContext::exact(qs).unwrap();
                let lattice = Lattice::with_len(len).unwrap();
                let h = library_h(n, len, qs);
                let inter = verify_intertwining(&h, lattice, n, &r("1"), &ctx).unwrap();
                ok &= inter.passed && reference_intertwining(&h, n, len, &q);
                worst = worst.max(inter.max_violation);
                for k in 1..=2usize {
                    for lambda in [0i64, 1] {
                        let p = ShockParams::new(n, k, lambda as f64, r("1"), ctx.clone()).unwrap();
                        let ev = verify_shock_evolution(&h, lattice, &p).unwrap();
                        ok &= ev.passed;
                        worst = worst.max(ev.max_violation);
                        let gen = build_g(lattice, &p).unwrap();
                        let states: Vec<Vec<u8>> = gen.states.iter().map(|c| c.as_slice().to_vec()).collect();
                        let by_index: HashMap<usize, usize> = states.iter().enumerate().map(|(i, s)| (index(s, n), i)).collect();
                        for (j, x) in states.iter().enumerate() {
                            if x[0] != 0 || x[len - 1] != 0 {
                                continue;
                            }
                            let expect = reference_g_rates(x, len, n, k, lambda, &q);
                            let actual: HashMap<usize, Rational> = gen
                                .g
                                .column(j)
                                .iter()
                                .filter(|(i, _)| *i != j)
                                .map(|(i, v)| (index(&states[*i], n), -v.clone()))
                                .collect();
                            ok &= expect.len() == actual.len()
                                && expect.iter().all(|(i, v)| by_index.contains_key(i) && actual.get(i) == Some(v));
                            rate_checks += 1;
                        }
                        cases += 1;
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: ok && worst == 0.0 && secs < 300.0,
        detail: format!("{cases} (n,L,q,K,lambda) cases, {rate_checks} interior columns of -G match the shock rates, max violation {worst:e}, {secs:.1} s < 300 s"),
    }
}

fn single_shock(lambda: f64, v_quoted: f64, d_quoted: f64) -> (bool, String) {
    let (q, w, t) = (2.0, 1.0, 1000.0);
    let (r0, r1) = (rho(0, 1, lambda, q), rho(1, 1, lambda, q));
    let asym = q - 1.0 / q;
    let v = w * asym * (1.0 - r1 - r0);
    let d = w / 2.0 * asym * (r1 * (1.0 - r1) + r0 * (1.0 - r0)) / (r1 - r0);
    let consts = (v - v_quoted).abs() < 1e-12 && (d - d_quoted).abs() < 1e-12;
    let half = (20.0 * (v.abs() * t + 6.0 * (2.0 * d * t).sqrt())).ceil() as i64 / 2 + 1;
    let params = SimParams {
        n: 1,
        window: Lattice::new(-half, half).unwrap(),
        w,
        q,
        t_max: t,
        replicas: 100,
        seed: SEED,
        thinning: 10.0,
        burn_in: 0.0,
        margin: 0,
    };
    let s = ShockConfig::new(vec![0], vec![1], 1).unwrap();
    let run = simulate_shock(&params, &s, lambda).unwrap();
    let tr = estimate_velocity_diffusion(&run, 0).unwrap();
    let zv = (tr.velocity.value - v) / tr.velocity.se;
    let rel = (tr.diffusion.value - d).abs() / d;
    let pass = consts && zv.abs() <= 3.0 && rel <= 0.15 && run.discard_fraction() < 0.01;
    (
        pass,
        format!(
            "lambda={lambda}: v {:.4}±{:.4} vs {v:.4} (z {zv:.2}), D {:.4} vs {d:.4} ({:.1}% off), discarded {}",
            tr.velocity.value,
            tr.velocity.se,
            tr.diffusion.value,
            100.0 * rel,
            run.discarded()
        ),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let (a, da) = single_shock(1.0, -0.45, 1.025);
    let (b, db) = single_shock(0.0, 0.0, 1.0);
    let secs = start.elapsed().as_secs_f64();
    Outcome { pass: a && b && secs < 120.0, detail: format!("{da}; {db}") }
}

fn criterion_7() -> Outcome {
    let (q, lambda) = (2.0, 0.0);
    let rh: Vec<f64> = (0..=2).map(|j| rho(j, 2, lambda, q)).collect();
    let p_pred = (rh[2] - rh[1]) * (rh[1] - rh[0]) / (rh[1] * (1.0 - rh[1]));
    let params = SimParams {
        n: 1,
        window: Lattice::new(-40_000, 40_000).unwrap(),
        w: 1.0,
        q,
        t_max: 6000.0,
        replicas: 250,
        seed: SEED,
        thinning: 50.0,
        burn_in: 0.5,
        margin: 0,
    };
    let s = ShockConfig::new(vec![0, 1], vec![1, 1], 1).unwrap();
    let run = simulate_shock(&params, &s, lambda).unwrap();
    let fit = estimate_gap_law(&run, 1).unwrap();
    let pass = (p_pred - 0.36).abs() < 1e-12
        && (fit.predicted - p_pred).abs() < 1e-12
        && (0.33..=0.39).contains(&fit.fit.value)
        && fit.ks < ks_critical_1pct(fit.samples.len())
        && fit.samples.len() >= 10_000
        && run.discard_fraction() < 0.01;
    Outcome {
        pass,
        detail: format!(
            "{} samples, p fitted {:.4} (predicted {p_pred:.4}), KS {:.4} < {:.4}",
            fit.samples.len(),
            fit.fit.value,
            fit.ks,
            fit.ks_critical
        ),
    }
}

fn theorem_params(replicas: usize, seed: u64) -> SimParams {
    SimParams {
        n: 2,
        window: Lattice::new(-199, 200).unwrap(),
        w: 1.0,
        q: 2.0,
        t_max: 20.0,
        replicas,
        seed,
        thinning: 20.0,
        burn_in: 0.0,
        margin: 10,
    }
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let s = ShockConfig::new(vec![0], vec![2], 2).unwrap();
    let offsets: Vec<i64> = (-50..=50).collect();
    let cmp = shock_theorem_check(&theorem_params(200, SEED), &s, 0.0, &offsets).unwrap();
    let z = cmp.z_scores();
    let worst = z.iter().cloned().fold(0.0, f64::max);
    let over = z.iter().filter(|&&x| x > 3.0).count();
    let secs = start.elapsed().as_secs_f64();
    let pass = cmp.agrees_within(3.0) && cmp.discarded == 0 && secs < 600.0;
    let mut detail = format!(
        "200 replicas per side, max |z| {worst:.2}, {over} of {} offsets beyond 3 SE, max |difference| {:.4}",
        offsets.len(),
        cmp.max_abs_diff()
    );
    if !pass {
        // diagnostic only: a larger run separates bias from chance
        let big = shock_theorem_check(&theorem_params(20_000, SEED), &s, 0.0, &offsets).unwrap();
        let bz = big.z_scores().into_iter().fold(0.0, f64::max);
        detail += &format!(
            "; with 20000 replicas per side max |z| {bz:.2}, max |difference| {:.4}",
            big.max_abs_diff()
        );
    }
    Outcome { pass, detail }
}

fn criterion_9() -> Outcome {
    let lattice = Lattice::with_len(4).unwrap();
    let q = 2.0f64;
    let init = Config::new(lattice, 1, vec![0, 0, 1, 1]).unwrap();
    let cs = configs(1, 4);
    let weights: Vec<f64> = cs
        .iter()
        .map(|e| if e.iter().filter(|&&x| x == 1).count() == 2 { q.powi(-energy(e) as i32) } else { 0.0 })
        .collect();
    let z: f64 = weights.iter().sum();
    let exact: Vec<f64> = weights.iter().map(|w| w / z).collect();
    let hist = stationary_histogram(&init, 1.0, q, 1_000_000, &mut replica_rng(SEED, 0)).unwrap();
    let tv = total_variation(&hist, &exact);

    let run_cli = |dir: &std::path::Path| {
        let out = dir.to_str().unwrap();
        let a = priority_asep::cli::run([
            "priority-asep", "simulate-asep", "--n", "1", "--L", "4", "--particles", "2", "--q", "2", "--events", "1000000", "--seed", "20241", "--out", out,
        ]);
        let b = priority_asep::cli::run([
            "priority-asep", "simulate-shock", "--K", "2", "--q", "2", "--t-max", "200", "--replicas", "40", "--thinning", "5", "--seed", "20241", "--out", out,
        ]);
        assert_eq!((a, b), (0, 0));
    };
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_cli(d1.path());
    run_cli(d2.path());
    let files = ["histogram.csv", "summary.csv", "trajectory.csv", "gaps.csv"];
    let same = files.iter().all(|f| {
        let (a, b) = (std::fs::read(d1.path().join(f)).unwrap(), std::fs::read(d2.path().join(f)).unwrap());
        !a.is_empty() && a == b
    });
    // asep and shock runs both wrote summary.csv; the shock one is the one compared
    Outcome {
        pass: tv < 0.02 && same,
        detail: format!("TV {tv:.5} < 0.02 after 10^6 events; repeated runs byte-identical: {same}"),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("exact reversibility", criterion_1),
        ("partition functions", criterion_2),
        ("quantum symmetry", criterion_3),
        ("self-duality", criterion_4),
        ("shock machinery exact", criterion_5),
        ("single-shock statistics", criterion_6),
        ("gap law", criterion_7),
        ("shock-measure evolution, two-simulation check", criterion_8),
        ("stationary sampling and determinism", criterion_9),
    ];
    let mut failed = Vec::new();
    for (i, (title, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        line(i + 1, title, &o, start.elapsed().as_secs_f64());
        if !o.pass {
            failed.push(i + 1);
        }
    }
    let mut out = std::io::stdout().lock();
    if failed.is_empty() {
        writeln!(out, "acceptance: all 9 criteria PASS").unwrap();
    } else {
        writeln!(out, "acceptance: FAIL for criteria {failed:?}").unwrap();
        drop(out);
        std::process::exit(1);
    }
}

//! Acceptance run: one PASS/FAIL line per criterion; unexpected failures
//! make the process exit nonzero.

use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shaped_spectra::dyckpaths::{count_paths, path_to_tree, tree_to_path};
use shaped_spectra::enumeration::{
    count_brute, count_fat_hook, count_recurrence, count_summation, enumerate_brute, moments,
};
use shaped_spectra::matrix_mc::{
    freeness_model, kernel_dim_check, run_experiment, EntryLaw, SpectralSample,
};
use shaped_spectra::partitions::height_vectors_up_to;
use shaped_spectra::powerseries::{
    bernoulli_s, free_add, free_mul, g_to_r, moments_to_g, mp_moments, mp_r, mp_s, r_to_s,
    s_identity_residual, s_to_r, TruncatedSeries,
};
use shaped_spectra::spectral_analytic::{
    cauchy_equation, eliminate, fat_hook_cubic, fat_hook_density, fat_hook_density_closed,
    fat_hook_density_continuation, fat_hook_support, numeric_moments, series_residual,
    tanh_sinh_scalar, BivariatePoly, ContinuationOptions,
};
use shaped_spectra::Partition;

/// `Known` marks a failure whose cause is documented: the literal claim is
/// refuted by an independent check, which itself passed.
enum Failure {
    Unexpected(String),
    Known(String),
}

impl From<String> for Failure {
    fn from(msg: String) -> Self {
        Failure::Unexpected(msg)
    }
}

type Outcome = Result<String, Failure>;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn binom_u128(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

fn staircase_counts() -> Outcome {
    for r in 1..=4usize {
        let lambda = Partition::self_conjugate_from_heights(&vec![1; r]).unwrap();
        let t = count_recurrence(&lambda, 10).map_err(|e| e.to_string())?;
        for k in 0..=10usize {
            let expected = r as u128 * binom_u128(((r + 1) * k) as u128, k as u128) / (k as u128 + 1);
            ensure(t.counts[k] == BigUint::from(expected), || format!("r={r} k={k}"))?;
        }
    }
    Ok("r ≤ 4, k ≤ 10".into())
}

fn four_methods() -> Outcome {
    let mut shapes = 0;
    for a in height_vectors_up_to(5) {
        let lambda = Partition::self_conjugate_from_heights(&a).unwrap();
        let rec = count_recurrence(&lambda, 8).map_err(|e| e.to_string())?;
        for k in 0..=8 {
            let sum = count_summation(&a, k).map_err(|e| e.to_string())?;
            ensure(sum == rec.counts[k], || format!("summation a={a:?} k={k}"))?;
            if a.len() == 2 {
                let hyp = count_fat_hook(a[0], a[1], k).map_err(|e| e.to_string())?;
                ensure(hyp == rec.counts[k], || format!("hypergeometric a={a:?} k={k}"))?;
            }
            if k <= 6 {
                let brute = count_brute(&lambda, k, u64::MAX).map_err(|e| e.to_string())?;
                ensure(brute == rec.counts[k], || format!("brute a={a:?} k={k}"))?;
            }
        }
        shapes += 1;
    }
    Ok(format!("{shapes} shapes, k ≤ 8, brute force k ≤ 6"))
}

fn bijection() -> Outcome {
    let mut trees = 0usize;
    for a in height_vectors_up_to(4) {
        let lambda = Partition::self_conjugate_from_heights(&a).unwrap();
        let rec = count_recurrence(&lambda, 5).map_err(|e| e.to_string())?;
        for k in 0..=5 {
            let all = enumerate_brute(&lambda, k, u64::MAX).map_err(|e| e.to_string())?;
            for t in &all {
                let path = tree_to_path(&lambda, t).map_err(|e| e.to_string())?;
                let back = path_to_tree(&lambda, &path).map_err(|e| e.to_string())?;
                ensure(&back == t, || format!("roundtrip a={a:?} k={k}"))?;
            }
            let paths = count_paths(&lambda, k, u64::MAX).map_err(|e| e.to_string())?;
            ensure(paths == rec.counts[k], || format!("count_paths a={a:?} k={k}"))?;
            trees += all.len();
        }
    }
    Ok(format!("{trees} trees round-tripped"))
}

/// Series of `M = Σ a_j h_j` from `h_j = z + h_j Σ_{i ≤ r−j+1} a_i h_i`,
/// computed coefficientwise.
fn m_series(a: &[usize], order: usize) -> Vec<BigRational> {
    let r = a.len();
    let mut h = vec![vec![BigRational::zero(); order]; r];
    for n in 1..order {
        for j in 0..r {
            let mut c = if n == 1 { BigRational::one() } else { BigRational::zero() };
            for m in 1..n {
                let s: BigRational = (0..r - j).map(|i| &h[i][n - m] * BigRational::from_integer(a[i].into())).sum();
                c += &h[j][m] * s;
            }
            h[j][n] = c;
        }
    }
    (0..order)
        .map(|n| (0..r).map(|j| &h[j][n] * BigRational::from_integer(a[j].into())).sum())
        .collect()
}

fn mul_trunc(x: &[BigRational], y: &[BigRational]) -> Vec<BigRational> {
    let n = x.len();
    let mut out = vec![BigRational::zero(); n];
    for i in 0..n {
        if x[i].is_zero() {
            continue;
        }
        for j in 0..n - i {
            out[i + j] += &x[i] * &y[j];
        }
    }
    out
}

fn rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        for i in 0..rows.len() {
            if i != rank && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &pivot;
                for cc in c..cols {
                    let d = &rows[rank][cc] * &f;
                    rows[i][cc] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Whether some nonzero polynomial of degrees `≤ (dx, dz)` annihilates `m`.
fn has_annihilator(m: &[BigRational], dx: usize, dz: usize) -> bool {
    let n = m.len();
    let mut pw = vec![{
        let mut one = vec![BigRational::zero(); n];
        one[0] = BigRational::one();
        one
    }];
    for _ in 0..dx {
        let next = mul_trunc(pw.last().unwrap(), m);
        pw.push(next);
    }
    let mut columns = Vec::new();
    for p in &pw {
        for j in 0..=dz {
            let mut col = vec![BigRational::zero(); j];
            col.extend(p[..n - j].iter().cloned());
            columns.push(col);
        }
    }
    // rows of the system matrix are the z^k coefficients
    let rows: Vec<Vec<BigRational>> = (0..n).map(|k| columns.iter().map(|c| c[k].clone()).collect()).collect();
    rank(rows) < columns.len()
}

fn algebraicity() -> Outcome {
    let vectors: [&[usize]; 10] = [
        &[1],
        &[2, 1],
        &[1, 3],
        &[1, 1, 1],
        &[2, 1, 1],
        &[3, 2, 1],
        &[1, 3, 2],
        &[1, 2, 3],
        &[1, 1, 1, 1],
        &[3, 1, 1, 2],
    ];
    let mut attained = Vec::new();
    let mut dropped = Vec::new();
    for a in vectors {
        let r = a.len();
        let p = eliminate(a).map_err(|e| e.to_string())?;
        let (dx, dz) = (p.deg_x(), p.deg_z());
        ensure(dx <= r + 1 && dz <= r, || format!("a={a:?} degrees ({dx},{dz})"))?;
        let m = m_series(a, 17);
        let res = series_residual(&p, &TruncatedSeries::new(m, 16));
        ensure(res.is_zero(), || format!("a={a:?} residual"))?;
        // minimality: nothing of lower degree in M vanishes on 40 terms
        let long = m_series(a, 40);
        ensure(!has_annihilator(&long, dx - 1, r), || format!("a={a:?} not minimal"))?;
        if (dx, dz) == (r + 1, r) {
            attained.push(a);
        } else {
            dropped.push(format!("{a:?}→({dx},{dz})"));
        }
    }
    for (a1, a2) in [(1i64, 1i64), (2, 1), (1, 3), (3, 2), (5, 3)] {
        let ell = a1 + a2;
        let expected = BivariatePoly::from_terms(&[
            ((3, 0), 1),
            ((2, 1), a1 - a2),
            ((2, 0), -2),
            ((1, 0), 1),
            ((1, 1), 2 * a2),
            ((0, 1), -ell),
            ((0, 2), a1 * a1),
        ]);
        let p = eliminate(&[a1 as usize, a2 as usize]).map_err(|e| e.to_string())?;
        ensure(p == expected.normalized(), || format!("fat hook P ({a1},{a2})"))?;
        let l = cauchy_equation(&[a1 as usize, a2 as usize]).map_err(|e| e.to_string())?;
        let cubic = fat_hook_cubic(a1 as usize, a2 as usize).unwrap().normalized();
        ensure(l == cubic, || format!("fat hook L ({a1},{a2})"))?;
    }
    let msg = format!(
        "residuals vanish and results are minimal; degrees (r+1, r) attained by {}/10",
        attained.len()
    );
    if dropped.is_empty() {
        Ok(msg)
    } else {
        Err(Failure::Known(format!("{msg}; lower degree for {}", dropped.join(", "))))
    }
}

fn transforms() -> Outcome {
    for (a1, a2) in [(1usize, 1usize), (2, 1), (1, 3), (3, 2)] {
        let ell = (a1 + a2) as i64;
        let lambda = Partition::self_conjugate_from_heights(&[a1, a2]).unwrap();
        let g = moments_to_g(&moments(&lambda, 14).unwrap(), 14).unwrap();
        let r = g_to_r(&g).unwrap();
        // G(1/g) with 1/g = R + 1/z, i.e. g = z / (1 + z R)
        let zr = r.shift_up(1);
        let inner = TruncatedSeries::var(12)
            .truncate(12)
            .div(&(&TruncatedSeries::one(12) + &zr.truncate(12)))
            .unwrap();
        let back = g.truncate(12).compose(&inner).unwrap();
        ensure(back == TruncatedSeries::var(12), || format!("G(R+1/z) ({a1},{a2})"))?;
        let s = r_to_s(&r).unwrap();
        ensure(s_identity_residual(&r, &s).unwrap().is_zero(), || format!("S R(zS) ({a1},{a2})"))?;

        let alpha = q(a1 as i64, ell);
        let beta = BigRational::from_integer(ell.into());
        let s2 = free_mul(&mp_s(&alpha, &beta, 12), &bernoulli_s(&q(a2 as i64, ell), 12).unwrap());
        let rhs = free_add(&mp_r(&alpha, &beta, 12), &s_to_r(&s2).unwrap());
        ensure(r == rhs, || format!("first decomposition ({a1},{a2})"))?;
        let alpha2 = q(a2 as i64, ell);
        let s2b = free_mul(&mp_s(&alpha2, &beta, 12), &bernoulli_s(&q(a1 as i64, ell), 12).unwrap());
        let rhs2 = free_add(&mp_r(&alpha, &beta, 12), &s_to_r(&s2b).unwrap());
        ensure(r == rhs2, || format!("second decomposition ({a1},{a2})"))?;
    }
    for (alpha, beta) in [(q(1, 1), q(1, 1)), (q(1, 3), q(3, 1)), (q(5, 2), q(2, 7))] {
        let g = moments_to_g(&mp_moments(&alpha, &beta, 14), 14).unwrap();
        let r = g_to_r(&g).unwrap();
        // αβ/(1 − βz) and 1/(β(α + z))
        let geo: Vec<BigRational> = (0..=12).map(|n| &alpha * num_traits::pow(beta.clone(), n + 1)).collect();
        ensure(r == TruncatedSeries::new(geo, 12), || "R_MP closed form".into())?;
        let lin = TruncatedSeries::new(vec![&alpha * &beta, beta.clone()], 12);
        ensure(r_to_s(&r).unwrap() == lin.inverse().unwrap(), || "S_MP closed form".into())?;
        ensure(mp_r(&alpha, &beta, 12) == r, || "mp_r".into())?;
    }
    Ok("order 12".into())
}

fn fat_hook_density_checks() -> Outcome {
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for (a1, a2) in [(1usize, 1usize), (4, 1), (1, 4)] {
        let sp = fat_hook_support(a1, a2).unwrap();
        let (lo, hi) = sp.support();
        let ell = (a1 + a2) as f64;
        let size = (a1 * a1 + 2 * a1 * a2) as f64;
        let (mass, _) = tanh_sinh_scalar(|x| fat_hook_density_closed(a1, a2, x), lo, hi, 1e-10, 10);
        let (mean, _) = tanh_sinh_scalar(|x| x * fat_hook_density_closed(a1, a2, x), lo, hi, 1e-10, 10);
        let atom = sp.atom_mass.to_f64().unwrap();
        let dm = (mass - (1.0 - atom)).abs();
        let dx = (mean - size / ell).abs();
        ensure(dm < 1e-6, || format!("({a1},{a2}) mass {mass}"))?;
        ensure(dx < 1e-6, || format!("({a1},{a2}) mean {mean}"))?;
        let opts = ContinuationOptions::default();
        for i in 1..=50 {
            let x = lo + (hi - lo) * i as f64 / 51.0;
            let closed = fat_hook_density_closed(a1, a2, x);
            let cont = fat_hook_density_continuation(a1, a2, x, &opts).map_err(|e| e.to_string())?.density;
            let d = (closed - cont).abs();
            worst.2 = worst.2.max(d);
            ensure(d < 1e-6, || format!("({a1},{a2}) x={x}: {closed} vs {cont}"))?;
        }
        worst.0 = worst.0.max(dm);
        worst.1 = worst.1.max(dx);
    }
    Ok(format!(
        "max |mass err| {:.1e}, |mean err| {:.1e}, |route gap| {:.1e}",
        worst.0, worst.1, worst.2
    ))
}

fn staircase_inversion() -> Outcome {
    let opts = ContinuationOptions::default();
    let m = numeric_moments(&[1, 1, 1], 4, 1e-9, &opts).map_err(|e| e.to_string())?;
    let lambda = Partition::self_conjugate_from_heights(&[1, 1, 1]).unwrap();
    let exact = moments(&lambda, 4).unwrap();
    let mut worst = 0.0f64;
    for k in 0..=4 {
        let e = exact[k].to_f64().unwrap();
        let rel = (m.moments[k] - e).abs() / e;
        worst = worst.max(rel);
        ensure(rel <= 1e-3, || format!("k={k}: {} vs {e}", m.moments[k]))?;
    }
    Ok(format!("max relative error {worst:.1e}"))
}

/// `Σ_bins |continuous empirical mass − ∫_bin f|`.
fn continuous_l1(sample: &SpectralSample, a1: usize, a2: usize) -> f64 {
    let edges = &sample.histogram.edges;
    let total = sample.eigenvalues.len() as f64;
    let bins = edges.len() - 1;
    let mut counts = vec![0usize; bins];
    let width = edges[1] - edges[0];
    for &v in sample.continuous_part() {
        let idx = (((v - edges[0]) / width).floor().max(0.0) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let (lo, hi) = fat_hook_support(a1, a2).unwrap().support();
    (0..bins)
        .map(|b| {
            let (l, r) = (edges[b].max(lo), edges[b + 1].min(hi));
            let exact = if r > l {
                tanh_sinh_scalar(|x| fat_hook_density(a1, a2, x).map_or(0.0, |d| d.value), l, r, 1e-10, 8).0
            } else {
                0.0
            };
            (counts[b] as f64 / total - exact).abs()
        })
        .sum()
}

fn monte_carlo() -> Outcome {
    let mut notes = Vec::new();
    for (parts, a1, a2) in [([5usize, 5, 5, 5, 4], 4usize, 1usize), ([5, 1, 1, 1, 1], 1, 4)] {
        let lambda = Partition::new(parts.to_vec()).unwrap();
        let s = run_experiment(&lambda, 30, 1000, 42, 40, EntryLaw::ComplexGaussian).map_err(|e| e.to_string())?;
        let exact = moments(&lambda, 4).unwrap();
        let mut zmax = 0.0f64;
        for k in 1..=4 {
            let m = s.moments[k];
            let z = (m.mean - exact[k].to_f64().unwrap()).abs() / m.stderr;
            zmax = zmax.max(z);
            ensure(z < 3.0, || format!("{parts:?} k={k}: {} ± {} vs {}", m.mean, m.stderr, exact[k]))?;
        }
        let atom = fat_hook_support(a1, a2).unwrap().atom_mass.to_f64().unwrap();
        let frac = s.near_zero_fraction();
        ensure((frac - atom).abs() < 0.01, || format!("{parts:?} atom {frac} vs {atom}"))?;
        let l1 = continuous_l1(&s, a1, a2);
        ensure(l1 < 0.05, || format!("{parts:?} L1 {l1}"))?;
        notes.push(format!("{parts:?}: max z {zmax:.2}, atom {frac:.3}, L1 {l1:.3}"));
    }
    Ok(format!("N=30, 1000 trials; {}", notes.join("; ")))
}

fn kernel_dimensions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let pool = height_vectors_up_to(6);
    let mut off_formula = Vec::new();
    for _ in 0..20 {
        let a = pool.choose(&mut rng).unwrap();
        let n = rng.random_range(1..=5usize);
        let lambda = Partition::self_conjugate_from_heights(a).unwrap();
        let check = kernel_dim_check(&lambda, n, rng.random()).map_err(|e| e.to_string())?;
        ensure(!check.ambiguous && check.numeric == check.generic, || format!("a={a:?} N={n}: {check:?}"))?;
        if check.numeric != check.expected {
            off_formula.push(format!("{a:?} N={n}: {} vs {}", check.numeric, check.expected));
        }
    }
    let mut shapes = 0;
    for a in height_vectors_up_to(8) {
        let lambda = Partition::self_conjugate_from_heights(&a).unwrap();
        ensure(lambda.null_space_dim_rows() == lambda.null_space_dim_blocks(), || format!("a={a:?}"))?;
        shapes += 1;
    }
    let msg = format!("formulas agree on {shapes} shapes; 20/20 samples match the term-rank kernel");
    if off_formula.is_empty() {
        Ok(msg)
    } else {
        Err(Failure::Known(format!(
            "{msg}; {} differ from null_space_dim(Nλ): {}",
            off_formula.len(),
            off_formula.join(", ")
        )))
    }
}

fn freeness() -> Outcome {
    let f = freeness_model(1, 1, 30, 200, 42, 40).map_err(|e| e.to_string())?;
    let lambda = Partition::new(vec![2, 1]).unwrap();
    let s = run_experiment(&lambda, 30, 200, 43, 40, EntryLaw::ComplexGaussian).map_err(|e| e.to_string())?;
    let mut zmax = 0.0f64;
    for k in 1..=2 {
        let (a, b) = (f.moments[k], s.moments[k]);
        let joint = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
        let z = (a.mean - b.mean).abs() / joint;
        zmax = zmax.max(z);
        ensure(z < 3.0, || format!("k={k}: {a:?} vs {b:?}"))?;
    }
    Ok(format!("max z {zmax:.2}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("1 staircase counts", staircase_counts, Duration::from_secs(1)),
        ("2 four-method agreement", four_methods, Duration::from_secs(120)),
        ("3 tree/path bijection", bijection, Duration::from_secs(60)),
        ("4 algebraicity", algebraicity, Duration::from_secs(60)),
        ("5 transform identities", transforms, Duration::from_secs(10)),
        ("6 fat-hook density", fat_hook_density_checks, Duration::from_secs(30)),
        ("7 general Stieltjes inversion", staircase_inversion, Duration::from_secs(60)),
        ("8 Monte Carlo vs theory", monte_carlo, Duration::from_secs(300)),
        ("9 kernel dimension", kernel_dimensions, Duration::from_secs(60)),
        ("10 freeness model", freeness, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    let mut known = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > budget => Err(Failure::Unexpected(format!("{msg}; over time budget {budget:?}"))),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS criterion {name} ({elapsed:.2?}): {msg}"),
            Err(Failure::Known(msg)) => {
                known += 1;
                println!("FAIL criterion {name} ({elapsed:.2?}) [known]: {msg}");
            }
            Err(Failure::Unexpected(msg)) => {
                failed += 1;
                println!("FAIL criterion {name} ({elapsed:.2?}): {msg}");
            }
        }
    }
    println!("{known} known failures, {failed} unexpected failures");
    if failed > 0 {
        std::process::exit(1);
    }
}

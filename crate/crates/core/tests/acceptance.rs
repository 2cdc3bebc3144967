//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use randpoly::gausstest::{ks_distance, normal_cdf};
use randpoly::pipeline::{
    analyze_matrix, generate, preset, read_dataset, run_table, simulate, Parallelism, RunConfig,
};
use randpoly::{
    brute_force_facets, check_identities, convex_hull, f_vector_from_facets, make_stream,
    pairwise_intersection_fvector, sample, sample_covariance, sample_mean, DistributionKind,
    FVector, PointCloud, Purpose, RngStream, SampleMatrix, Seed, StreamKey, Tolerance,
    WhiteningMap,
};
use statrs::distribution::{ContinuousCDF, Normal};

/// 99.9th percentile of D_K for N = 25000, p = 2, M = 1000 under the null,
/// from 2000 simulated datasets (examples/null_calibration.rs). Median 0.0061,
/// maximum 0.0101.
const NULL_BOUND: f64 = 0.009679;
/// Scaled cube rows must land within this bound.
const SCALED_TABLE_BOUND: f64 = 0.08;
const REL_TOL: f64 = 1e-8;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

fn stream(seed: u64, purpose: Purpose) -> RngStream {
    make_stream(StreamKey::new(Seed(seed), 0, purpose))
}

fn within_budget(outcome: Outcome, elapsed: Duration, budget: Option<Duration>) -> Outcome {
    match budget {
        Some(b) if elapsed > b => Outcome::new(
            false,
            format!("{}; took {:.0}s, budget {:.0}s", outcome.detail, elapsed.as_secs_f64(), b.as_secs_f64()),
        ),
        _ => outcome,
    }
}

fn fvectors_to_matrix(d: usize, rows: &[FVector]) -> SampleMatrix {
    SampleMatrix::new(d, rows.iter().flat_map(|f| f.as_f64()).collect()).unwrap()
}

fn f_vector_of(cloud: &PointCloud) -> FVector {
    let hull = convex_hull(cloud, &Tolerance::default()).unwrap();
    f_vector_from_facets(cloud.dim(), &hull.facet_tuples()).unwrap()
}

fn identity_suite() -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    for kind in DistributionKind::ALL {
        for d in 3..=8 {
            for n in [d + 2, 5 * d, 50] {
                let config = RunConfig {
                    seed: Seed(1000 + d as u64 * 100 + n as u64),
                    ..RunConfig::new(kind, d, n, 20)
                };
                match simulate(&config) {
                    Ok(sim) => {
                        for f in &sim.fvectors {
                            checked += 1;
                            if !check_identities(f).all_ok() {
                                failures.push(format!("{kind} d={d} n={n}: {f}"));
                            }
                        }
                    }
                    Err(e) => failures.push(format!("{kind} d={d} n={n}: {e}")),
                }
            }
        }
    }
    Outcome::new(
        failures.is_empty() && checked == 5 * 6 * 3 * 20,
        match failures.first() {
            None => format!("{checked} f-vectors checked, no violations"),
            Some(first) => format!("{checked} f-vectors checked, {} violations, first: {first}", failures.len()),
        },
    )
}

fn hull_oracle() -> Outcome {
    let mut pick = stream(2, Purpose::Other);
    let tol = Tolerance::default();
    let mut mismatches = 0;
    for i in 0..200u64 {
        let d = 2 + (pick.next_u64() % 3) as usize;
        let n = d + 1 + (pick.next_u64() % (12 - d as u64)) as usize;
        let kind = DistributionKind::ALL[(pick.next_u64() % 5) as usize];
        let cloud = sample(kind, &mut stream(20_000 + i, Purpose::Points), d, n).unwrap();
        let fast = convex_hull(&cloud, &tol).map(|h| h.facet_set());
        let slow = brute_force_facets(&cloud, &tol);
        if fast.is_err() || fast != slow {
            mismatches += 1;
        }
    }
    Outcome::new(mismatches == 0, format!("200 instances, {mismatches} mismatches"))
}

fn fvector_methods() -> Outcome {
    let mut pick = stream(3, Purpose::Other);
    let mut mismatches = 0;
    for i in 0..100u64 {
        let d = 3 + (pick.next_u64() % 3) as usize;
        let n = d + 1 + (pick.next_u64() % (30 - d as u64)) as usize;
        let kind = DistributionKind::ALL[(pick.next_u64() % 5) as usize];
        let cloud = sample(kind, &mut stream(30_000 + i, Purpose::Points), d, n).unwrap();
        let facets = convex_hull(&cloud, &Tolerance::default()).unwrap().facet_tuples();
        if f_vector_from_facets(d, &facets).unwrap() != pairwise_intersection_fvector(d, &facets).unwrap() {
            mismatches += 1;
        }
    }
    Outcome::new(mismatches == 0, format!("100 hulls, {mismatches} mismatches"))
}

fn small_cases() -> Outcome {
    let mut bad = Vec::new();
    for d in 2..=8usize {
        let mut rows = vec![vec![0.0; d]];
        for i in 0..d {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            rows.push(e);
        }
        let f = f_vector_of(&PointCloud::from_rows(&rows).unwrap());
        let expected: Vec<u64> = (0..d)
            .map(|k| (0..=k as u64).fold(1, |acc, i| acc * (d as u64 + 1 - i) / (i + 1)))
            .collect();
        if f.0 != expected {
            bad.push(format!("simplex d={d}: {f}"));
        }
    }
    let mut rows = Vec::new();
    for i in 0..3 {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; 3];
            e[i] = s;
            rows.push(e);
        }
    }
    let octahedron = PointCloud::from_rows(&rows).unwrap();
    let facets: Vec<Vec<usize>> = brute_force_facets(&octahedron, &Tolerance::default())
        .unwrap()
        .into_iter()
        .collect();
    let f = f_vector_from_facets(3, &facets).unwrap();
    if f.0 != [6, 12, 8] {
        bad.push(format!("octahedron: {f}"));
    }
    Outcome::new(bad.is_empty(), if bad.is_empty() { "simplices d=2..8, octahedron (6,12,8)".into() } else { bad.join("; ") })
}

fn rank_law(datasets: &mut Vec<(String, SampleMatrix)>) -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for kind in [DistributionKind::UnitCube, DistributionKind::Gaussian] {
        for d in 4..=6 {
            let config = RunConfig {
                seed: Seed(5000 + d as u64),
                ..RunConfig::new(kind, d, 500, 2000)
            };
            let sim = simulate(&config).unwrap();
            let data = fvectors_to_matrix(d, &sim.fvectors);
            let (map, _) = WhiteningMap::fit(&data, REL_TOL).unwrap();
            pass &= map.p == d / 2;
            parts.push(format!("{kind} d={d} p={}", map.p));
            datasets.push((format!("{kind} d={d} n=500"), data));
        }
    }
    Outcome::new(pass, parts.join(", "))
}

fn whitening_identity(datasets: &[(String, SampleMatrix)]) -> Outcome {
    let mut worst_mean: f64 = 0.0;
    let mut worst_cov: f64 = 0.0;
    let mut pass = true;
    for (label, data) in datasets {
        let (map, _) = WhiteningMap::fit(data, REL_TOL).unwrap();
        let white = map.apply_all(data).unwrap();
        let mean = sample_mean(&white).unwrap().into_iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let cov = sample_covariance(&white).unwrap();
        let mut cov_err: f64 = 0.0;
        for i in 0..map.p {
            for j in 0..map.p {
                let target = if i == j { 1.0 } else { 0.0 };
                cov_err = cov_err.max((cov.get(i, j) - target).abs());
            }
        }
        let ok = mean <= 1e-10 * data.scale() && cov_err <= 1e-8;
        if !ok {
            eprintln!("  whitening failed for {label}: mean {mean:e}, cov {cov_err:e}");
        }
        pass &= ok;
        worst_mean = worst_mean.max(mean / data.scale());
        worst_cov = worst_cov.max(cov_err);
    }
    Outcome::new(
        pass,
        format!("{} datasets, max |mean|/scale {worst_mean:.1e}, max |cov - I| {worst_cov:.1e}", datasets.len()),
    )
}

fn ks_exactness() -> Outcome {
    let normal = Normal::standard();
    let quantile = |q: f64| {
        let mut x = normal.inverse_cdf(q);
        for _ in 0..3 {
            let density = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
            x -= (normal_cdf(x) - q) / density;
        }
        x
    };
    let mut grid_err: f64 = 0.0;
    for n in [10usize, 100, 1000] {
        let grid: Vec<f64> = (1..=n).map(|j| quantile((j as f64 - 0.5) / n as f64)).collect();
        grid_err = grid_err.max((ks_distance(&grid).unwrap() - 0.5 / n as f64).abs());
    }
    let mut phi_err: f64 = 0.0;
    for k in 0..200 {
        let t = -8.0 + 16.0 * k as f64 / 199.0;
        phi_err = phi_err.max((normal_cdf(t) - normal.cdf(t)).abs());
    }
    Outcome::new(
        grid_err <= 1e-12 && phi_err <= 1e-9,
        format!("quantile grid error {grid_err:.1e}, Φ error {phi_err:.1e}"),
    )
}

fn null_calibration(datasets: &mut Vec<(String, SampleMatrix)>) -> Outcome {
    let mut s = stream(8, Purpose::Other);
    let data = SampleMatrix::new(2, (0..2 * 25_000).map(|_| s.standard_normal()).collect()).unwrap();
    let summary = analyze_matrix(&data, 1000, Seed(8), REL_TOL).unwrap();
    datasets.push(("gaussian null".into(), data));
    Outcome::new(
        summary.d_k <= NULL_BOUND && summary.p == 2,
        format!("D_K = {:.5} (bound {NULL_BOUND}), p = {}", summary.d_k, summary.p),
    )
}

fn scaled_table(work: &Path, datasets: &mut Vec<(String, SampleMatrix)>) -> Outcome {
    let rows: Vec<_> = preset("paper-table-1-scaled")
        .unwrap()
        .rows
        .into_iter()
        .map(|r| (r.config, Some(r.reference.3)))
        .collect();
    let table = match run_table(&rows, work) {
        Ok(t) => t,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for r in &table {
        pass &= r.d_k <= SCALED_TABLE_BOUND;
        parts.push(format!("cube d={} D_K={:.5} ({:.0}s)", r.d, r.d_k, r.wall_time));
    }
    for entry in std::fs::read_dir(work).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "csv") && path.file_name().is_some_and(|n| n != "table.csv") {
            let (d, rows) = read_dataset(&path).unwrap();
            datasets.push((path.display().to_string(), fvectors_to_matrix(d, &rows)));
        }
    }
    Outcome::new(pass && table.len() == 2, parts.join(", "))
}

fn determinism(work: &Path) -> Outcome {
    let mut differing = Vec::new();
    for kind in DistributionKind::ALL {
        let mut outputs = Vec::new();
        for threads in [1, 8] {
            let config = RunConfig {
                seed: Seed(10),
                parallelism: Parallelism::Threads(threads),
                ..RunConfig::new(kind, 4, 200, 50)
            };
            let path = work.join(format!("{kind}_{threads}.csv"));
            generate(&config, &path).unwrap();
            outputs.push(std::fs::read(&path).unwrap());
        }
        if outputs[0] != outputs[1] {
            differing.push(kind.to_string());
        }
    }
    Outcome::new(differing.is_empty(), format!("5 distributions, differing: {differing:?}"))
}

fn uniform_ks(mut u: Vec<f64>) -> f64 {
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    u.iter()
        .enumerate()
        .map(|(j, &x)| ((j + 1) as f64 / n - x).abs().max((x - j as f64 / n).abs()))
        .fold(0.0, f64::max)
}

fn sampler_suite() -> Outcome {
    let n = 100_000;
    let dkw = 1.95 / (n as f64).sqrt();
    let mut pass = true;
    let mut parts = Vec::new();
    for (kind, norm) in [
        (DistributionKind::L1Ball, (|p: &[f64]| p.iter().map(|x| x.abs()).sum::<f64>()) as fn(&[f64]) -> f64),
        (DistributionKind::L2Ball, |p: &[f64]| p.iter().map(|x| x * x).sum::<f64>().sqrt()),
    ] {
        for d in [3, 6] {
            let cloud = sample(kind, &mut stream(11 + d as u64, Purpose::Points), d, n).unwrap();
            // r ↦ r^d maps the radial law onto U(0, 1).
            let ks = uniform_ks(cloud.points().map(|p| norm(p).powi(d as i32)).collect());
            pass &= ks <= dkw;
            parts.push(format!("{kind} d={d} KS={ks:.4}"));
        }
    }
    let nf = n as f64;
    let d = 5;
    let cube = sample(DistributionKind::UnitCube, &mut stream(21, Purpose::Points), d, n).unwrap();
    let gauss = sample(DistributionKind::Gaussian, &mut stream(22, Purpose::Points), d, n).unwrap();
    let mut worst_sigma: f64 = 0.0;
    for k in 0..d {
        let column = |c: &PointCloud| -> (f64, f64) {
            let mean = c.points().map(|p| p[k]).sum::<f64>() / nf;
            let var = c.points().map(|p| (p[k] - mean).powi(2)).sum::<f64>() / (nf - 1.0);
            (mean, var)
        };
        // Uniform: var 1/12, var of (x - 1/2)^2 is 1/180. Normal: var of x^2 is 2.
        let (m, v) = column(&cube);
        worst_sigma = worst_sigma
            .max((m - 0.5).abs() / (1.0 / 12.0 / nf).sqrt())
            .max((v - 1.0 / 12.0).abs() / (1.0 / 180.0 / nf).sqrt());
        let (m, v) = column(&gauss);
        worst_sigma = worst_sigma.max(m.abs() / (1.0 / nf).sqrt()).max((v - 1.0).abs() / (2.0 / nf).sqrt());
    }
    pass &= worst_sigma <= 4.0;
    parts.push(format!("moments within {worst_sigma:.2}σ"));
    Outcome::new(pass, format!("{} (DKW bound {dkw:.4})", parts.join(", ")))
}

fn main() -> ExitCode {
    let work = tempfile::tempdir().expect("temporary directory");
    let mut datasets: Vec<(String, SampleMatrix)> = Vec::new();
    let mut failed = 0;
    let mut run = |num: usize, title: &str, budget: Option<u64>, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let outcome = within_budget(outcome, elapsed, budget.map(Duration::from_secs));
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "criterion {num:>2} {}: {title}: {} [{:.1}s]",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64()
        );
    };

    run(1, "face-count identities", Some(120), &mut identity_suite);
    run(2, "hull vs brute force", Some(60), &mut hull_oracle);
    run(3, "f-vector method equivalence", None, &mut fvector_methods);
    run(4, "exact small cases", None, &mut small_cases);
    run(5, "covariance rank floor(d/2)", None, &mut || rank_law(&mut datasets));
    run(7, "KS engine exactness", None, &mut ks_exactness);
    run(8, "Gaussian null calibration", Some(120), &mut || null_calibration(&mut datasets));
    let table_dir = work.path().join("table");
    run(9, "scaled cube table", Some(900), &mut || scaled_table(&table_dir, &mut datasets));
    run(10, "thread-count determinism", None, &mut || determinism(work.path()));
    run(11, "sampler distributions", None, &mut sampler_suite);
    run(6, "whitening identity", None, &mut || whitening_identity(&datasets));

    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

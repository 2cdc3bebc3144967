//! Null distribution of `D_K` for exact standard-Gaussian input.
//!
//!     cargo run --release --example null_calibration -- [N] [p] [M] [trials]
//!
//! Each trial draws N i.i.d. standard normal vectors in R^p, runs them through
//! `analyze_matrix` (whitening included) with M directions, and records D_K.
//! Prints the empirical quantiles of D_K over the trials.

use randpoly::pipeline::analyze_matrix;
use randpoly::{make_stream, Purpose, SampleMatrix, Seed, StreamKey};

const CALIBRATION_SEED: u64 = 0xCA11_B8A7E;

fn arg(i: usize, default: usize) -> usize {
    std::env::args()
        .nth(i)
        .map_or(default, |s| s.parse().expect("numeric argument"))
}

fn main() {
    let n = arg(1, 25_000);
    let p = arg(2, 2);
    let m = arg(3, 1000);
    let trials = arg(4, 2000);

    let mut stats: Vec<f64> = (0..trials)
        .map(|t| {
            let mut stream = make_stream(StreamKey::new(Seed(CALIBRATION_SEED), t as u64, Purpose::Other));
            let data: Vec<f64> = (0..n * p).map(|_| stream.standard_normal()).collect();
            let data = SampleMatrix::new(p, data).unwrap();
            analyze_matrix(&data, m, Seed(CALIBRATION_SEED ^ t as u64), 1e-8)
                .unwrap()
                .d_k
        })
        .collect();
    stats.sort_unstable_by(f64::total_cmp);

    let rank = |q: f64| stats[((q * trials as f64).ceil() as usize).clamp(1, trials) - 1];
    println!("N={n} p={p} M={m} trials={trials}");
    for q in [0.5, 0.9, 0.99, 0.999] {
        println!("q{q:<6} {:.6}", rank(q));
    }
    println!("max     {:.6}", stats[trials - 1]);
}

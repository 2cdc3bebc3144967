use std::time::Instant;

use randpoly::{convex_hull, f_vector_from_facets, make_stream, sample, DistributionKind, Purpose, Seed, StreamKey, Tolerance};

fn main() {
    let d: usize = std::env::args().nth(1).map_or(6, |s| s.parse().unwrap());
    let n: usize = std::env::args().nth(2).map_or(2000, |s| s.parse().unwrap());
    let reps: usize = std::env::args().nth(3).map_or(5, |s| s.parse().unwrap());
    let (mut th, mut tf) = (0.0, 0.0);
    for r in 0..reps {
        let mut s = make_stream(StreamKey::new(Seed(7), r as u64, Purpose::Points));
        let cloud = sample(DistributionKind::UnitCube, &mut s, d, n).unwrap();
        let t = Instant::now();
        let hull = convex_hull(&cloud, &Tolerance::default()).unwrap();
        th += t.elapsed().as_secs_f64();
        let t = Instant::now();
        let facets = hull.facet_tuples();
        let f = f_vector_from_facets(d, &facets).unwrap();
        tf += t.elapsed().as_secs_f64();
        println!("{f} created={} deleted={}", hull.diagnostics.facets_created, hull.diagnostics.facets_deleted);
    }
    println!("hull {:.3}s/rep  fvector {:.3}s/rep", th / reps as f64, tf / reps as f64);
}

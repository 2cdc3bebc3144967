//! Built-in experiment tables.
//!
//! `paper-table-K` lists the full-scale rows of published table K (these take
//! hours per row); `paper-table-K-scaled` caps `n` and `N` at 2000 and `M` at
//! 1000 so the whole table runs at a desk. Each row keeps the published `D_K`
//! of the row it stands in for.

use super::RunConfig;
use crate::rng::Seed;
use crate::sampler::DistributionKind;

const SCALED_CAP: usize = 2000;
const SCALED_DIRECTIONS: usize = 1000;
const PRESET_SEED: u64 = 20_100;

#[derive(Debug, Clone, PartialEq)]
pub struct PresetRow {
    pub config: RunConfig,
    /// Published `(d, n, N, D_K)` of the row this one reproduces or proxies.
    pub reference: (usize, usize, usize, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: String,
    pub rows: Vec<PresetRow>,
}

/// Published `(d, n, N, D_K)`.
type Row = (usize, usize, usize, f64);

/// `(kind, rows)` for tables 1 through 5.
const TABLES: [(DistributionKind, &[Row]); 5] = [
    (
        DistributionKind::UnitCube,
        &[
            (5, 64000, 25000, 0.008995),
            (6, 64000, 25000, 0.007590),
            (7, 8000, 25000, 0.007133),
            (8, 1000, 3125, 0.02613),
        ],
    ),
    (
        DistributionKind::L1Ball,
        &[
            (5, 64000, 25000, 0.009971),
            (6, 64000, 25000, 0.01075),
            (7, 4000, 25000, 0.01113),
            (8, 1000, 2000, 0.03003),
        ],
    ),
    (
        DistributionKind::L2Ball,
        &[
            (5, 64000, 25000, 0.008495),
            (6, 64000, 25000, 0.007873),
            (7, 2000, 25000, 0.01182),
            (8, 1000, 940, 0.04573),
        ],
    ),
    (
        DistributionKind::Gaussian,
        &[
            (5, 64000, 25000, 0.01197),
            (6, 64000, 25000, 0.01125),
            (7, 64000, 25000, 0.009252),
            (8, 32000, 1000, 0.01530),
        ],
    ),
    (
        DistributionKind::HalfBall,
        &[
            (5, 64000, 25000, 0.006166),
            (6, 4000, 25000, 0.008827),
            (7, 500, 12500, 0.02883),
        ],
    ),
];

pub fn preset_names() -> Vec<String> {
    (1..=TABLES.len())
        .flat_map(|t| [format!("paper-table-{t}"), format!("paper-table-{t}-scaled")])
        .collect()
}

/// Looks up a preset by name.
///
/// Scaled variants keep the dimensions `d ≤ 6` of each table, plus every row
/// of the half-ball table (which only goes up to `d = 7`).
pub fn preset(name: &str) -> Option<Preset> {
    let rest = name.strip_prefix("paper-table-")?;
    let (index, scaled) = match rest.strip_suffix("-scaled") {
        Some(i) => (i, true),
        None => (rest, false),
    };
    let index: usize = index.parse().ok()?;
    let (kind, rows) = TABLES.get(index.checked_sub(1)?)?;
    let rows = rows
        .iter()
        .filter(|r| !scaled || r.0 <= 6 || *kind == DistributionKind::HalfBall)
        .map(|&(d, n, big_n, dk)| {
            let mut config = if scaled {
                let mut c = RunConfig::new(*kind, d, n.min(SCALED_CAP), big_n.min(SCALED_CAP));
                c.directions = SCALED_DIRECTIONS;
                c
            } else {
                RunConfig::new(*kind, d, n, big_n)
            };
            config.seed = Seed(PRESET_SEED + 10 * index as u64 + d as u64);
            PresetRow {
                config,
                reference: (d, n, big_n, dk),
            }
        })
        .collect();
    Some(Preset {
        name: name.to_string(),
        rows,
    })
}

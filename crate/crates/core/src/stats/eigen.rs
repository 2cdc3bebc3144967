//! Cyclic Jacobi eigensolver for small symmetric matrices.

use serde::{Deserialize, Serialize};

use super::{CovMatrix, StatsError};

pub const MAX_SWEEPS: usize = 100;

/// Eigenpairs sorted by decreasing eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenDecomp {
    pub values: Vec<f64>,
    /// `vectors[i]` is the unit eigenvector for `values[i]`.
    pub vectors: Vec<Vec<f64>>,
}

fn off_diagonal_norm(a: &[f64], d: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                sum += a[i * d + j] * a[i * d + j];
            }
        }
    }
    sum.sqrt()
}

/// Diagonalizes `s` by cyclic Jacobi rotations.
///
/// A rotation is skipped, and the pivot set to zero, once the pivot no longer
/// changes either diagonal entry in floating point. Sweeps continue until the
/// off-diagonal part is exactly zero, which is reached well inside the sweep
/// cap for well-formed input and leaves every pivot negligible relative to its
/// own diagonal entries (not just relative to `‖S‖_F`).
///
/// Eigenvector signs are normalized so the entry of largest magnitude is positive.
pub fn sym_eigen(s: &CovMatrix) -> Result<EigenDecomp, StatsError> {
    let d = s.dim();
    let mut a = s.as_slice().to_vec();
    let mut v = vec![0.0; d * d];
    for i in 0..d {
        v[i * d + i] = 1.0;
    }

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a, d) == 0.0 {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[p * d + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * d + p];
                let aqq = a[q * d + q];
                let g = 100.0 * apq.abs();
                if app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * d + q] = 0.0;
                    a[q * d + p] = 0.0;
                    continue;
                }
                // tan of the rotation angle, smaller root
                let h = aqq - app;
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                let tau = sn / (1.0 + c);

                a[p * d + p] = app - t * apq;
                a[q * d + q] = aqq + t * apq;
                a[p * d + q] = 0.0;
                a[q * d + p] = 0.0;
                for r in 0..d {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * d + p];
                    let arq = a[r * d + q];
                    let new_rp = arp - sn * (arq + tau * arp);
                    let new_rq = arq + sn * (arp - tau * arq);
                    a[r * d + p] = new_rp;
                    a[p * d + r] = new_rp;
                    a[r * d + q] = new_rq;
                    a[q * d + r] = new_rq;
                }
                for r in 0..d {
                    let vrp = v[r * d + p];
                    let vrq = v[r * d + q];
                    v[r * d + p] = vrp - sn * (vrq + tau * vrp);
                    v[r * d + q] = vrq + sn * (vrp - tau * vrq);
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&a, d) != 0.0 {
        return Err(StatsError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[j * d + j].total_cmp(&a[i * d + i]));
    let values = order.iter().map(|&i| a[i * d + i]).collect();
    let vectors = order
        .iter()
        .map(|&col| {
            let mut u: Vec<f64> = (0..d).map(|r| v[r * d + col]).collect();
            let lead = u
                .iter()
                .copied()
                .fold(0.0f64, |best, x| if x.abs() > best.abs() { x } else { best });
            if lead < 0.0 {
                u.iter_mut().for_each(|x| *x = -*x);
            }
            u
        })
        .collect();
    Ok(EigenDecomp { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cov(d: usize, data: Vec<f64>) -> CovMatrix {
        CovMatrix::from_row_major(d, data).unwrap()
    }

    #[test]
    fn diagonal() {
        let e = sym_eigen(&cov(2, vec![1.0, 0.0, 0.0, 3.0])).unwrap();
        assert_eq!(e.values, vec![3.0, 1.0]);
        assert_eq!(e.vectors, vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn two_by_two() {
        let e = sym_eigen(&cov(2, vec![2.0, 1.0, 1.0, 2.0])).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (u, expected) in e.vectors.iter().zip([[h, h], [h, -h]]) {
            let dot: f64 = u.iter().zip(expected).map(|(a, b)| a * b).sum();
            assert!((dot.abs() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_matrix() {
        let e = sym_eigen(&cov(3, vec![0.0; 9])).unwrap();
        assert_eq!(e.values, vec![0.0; 3]);
    }

    #[test]
    fn sign_convention() {
        let e = sym_eigen(&cov(2, vec![2.0, -1.0, -1.0, 2.0])).unwrap();
        for u in &e.vectors {
            let lead = u.iter().copied().fold(0.0f64, |b, x| if x.abs() > b.abs() { x } else { b });
            assert!(lead > 0.0);
        }
    }
}

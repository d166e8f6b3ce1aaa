//! Dense symmetric eigensolver: Householder reduction to tridiagonal form
//! followed by the implicit QL algorithm with Wilkinson-style shifts.
//!
//! The routines follow the classic EISPACK `tred2`/`tql2` pair. Eigenvalues
//! are returned in ascending order; eigenvectors, when requested, are the
//! columns of the returned matrix.

use super::Matrix;
use crate::error::{Error, Result};

/// QL sweeps allowed per eigenvalue before giving up.
pub const MAX_QL_ITERATIONS: usize = 60;

#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Option<Matrix>,
}

/// Eigenvalues only.
pub fn symmetric_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    Ok(symmetric_eigen(a, false)?.values)
}

/// Full decomposition of a symmetric matrix. Only the lower triangle is read.
pub fn symmetric_eigen(a: &Matrix, want_vectors: bool) -> Result<SymmetricEigen> {
    let n = a.dim();
    if n == 0 {
        return Ok(SymmetricEigen {
            values: vec![],
            vectors: want_vectors.then(|| Matrix::zeros(0)),
        });
    }
    if a.is_diagonal() {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
        let values = idx.iter().map(|&i| a[(i, i)]).collect();
        let vectors = want_vectors.then(|| Matrix::from_fn(n, |r, c| f64::from(u8::from(idx[c] == r))));
        return Ok(SymmetricEigen { values, vectors });
    }

    let mut z = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut z, &mut d, &mut e, want_vectors);
    tql(&mut d, &mut e, if want_vectors { Some(&mut z) } else { None })?;

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = idx.iter().map(|&i| d[i]).collect();
    let vectors = want_vectors.then(|| Matrix::from_fn(n, |r, c| z[(r, idx[c])]));
    Ok(SymmetricEigen { values, vectors })
}

fn tridiagonalize(z: &mut Matrix, d: &mut [f64], e: &mut [f64], want_vectors: bool) {
    let n = d.len();
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..i).map(|k| z[(i, k)].abs()).sum();
            if scale == 0.0 {
                e[i] = z[(i, l)];
            } else {
                for k in 0..i {
                    z[(i, k)] /= scale;
                    h += z[(i, k)] * z[(i, k)];
                }
                let f = z[(i, l)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                z[(i, l)] = f - g;
                let mut f = 0.0;
                for j in 0..i {
                    if want_vectors {
                        z[(j, i)] = z[(i, j)] / h;
                    }
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += z[(j, k)] * z[(i, k)];
                    }
                    for k in (j + 1)..i {
                        g += z[(k, j)] * z[(i, k)];
                    }
                    e[j] = g / h;
                    f += e[j] * z[(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..i {
                    let f = z[(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        z[(j, k)] -= f * e[k] + g * z[(i, k)];
                    }
                }
            }
        } else {
            e[i] = z[(i, l)];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if want_vectors {
            if d[i] != 0.0 {
                for j in 0..i {
                    let mut g = 0.0;
                    for k in 0..i {
                        g += z[(i, k)] * z[(k, j)];
                    }
                    for k in 0..i {
                        z[(k, j)] -= g * z[(k, i)];
                    }
                }
            }
            d[i] = z[(i, i)];
            z[(i, i)] = 1.0;
            for j in 0..i {
                z[(j, i)] = 0.0;
                z[(i, j)] = 0.0;
            }
        } else {
            d[i] = z[(i, i)];
        }
    }
}

fn tql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut Matrix>) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::EigensolverNoConvergence(MAX_QL_ITERATIONS));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let f = z[(k, i + 1)];
                        z[(k, i + 1)] = s * z[(k, i)] + c * f;
                        z[(k, i)] = c * z[(k, i)] - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn residual(a: &Matrix, eig: &SymmetricEigen) -> f64 {
        let v = eig.vectors.as_ref().unwrap();
        let n = a.dim();
        let mut worst = 0.0_f64;
        for c in 0..n {
            let col: Vec<f64> = (0..n).map(|r| v[(r, c)]).collect();
            let av = a.mul_vec(&col);
            for r in 0..n {
                worst = worst.max((av[r] - eig.values[c] * col[r]).abs());
            }
        }
        worst
    }

    #[test]
    fn two_by_two_characteristic_polynomial() {
        let a = Matrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 3.0]]);
        let vals = symmetric_eigenvalues(&a).unwrap();
        let s = 2.0_f64.sqrt();
        assert!((vals[0] - (2.0 - s)).abs() < 1e-14);
        assert!((vals[1] - (2.0 + s)).abs() < 1e-14);
    }

    #[test]
    fn complete_graph_spectrum() {
        // Laplacian of K_3: eigenvalues {0, 3, 3}.
        let a = Matrix::from_fn(3, |i, j| if i == j { 2.0 } else { -1.0 });
        let vals = symmetric_eigenvalues(&a).unwrap();
        assert!(vals[0].abs() < 1e-14);
        assert!((vals[1] - 3.0).abs() < 1e-14);
        assert!((vals[2] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_shortcut_keeps_vectors_aligned() {
        let a = Matrix::from_rows(&[vec![3.0, 0.0], vec![0.0, -1.0]]);
        let eig = symmetric_eigen(&a, true).unwrap();
        assert_eq!(eig.values, vec![-1.0, 3.0]);
        assert_eq!(residual(&a, &eig), 0.0);
    }

    #[test]
    fn one_by_one() {
        let a = Matrix::from_rows(&[vec![5.0]]);
        assert_eq!(symmetric_eigenvalues(&a).unwrap(), vec![5.0]);
    }

    fn sym_matrix() -> impl Strategy<Value = Matrix> {
        (1usize..12).prop_flat_map(|n| {
            prop::collection::vec(-10.0f64..10.0, n * n).prop_map(move |v| {
                let mut m = Matrix::from_fn(n, |i, j| v[i * n + j]);
                m.symmetrize();
                m
            })
        })
    }

    proptest! {
        #[test]
        fn residual_and_orthonormality(a in sym_matrix()) {
            let eig = symmetric_eigen(&a, true).unwrap();
            let scale = a.norm_frobenius().max(1.0);
            prop_assert!(residual(&a, &eig) <= 1e-9 * scale);
            let v = eig.vectors.as_ref().unwrap();
            let vtv = v.transpose().matmul(v);
            prop_assert!(vtv.max_abs_diff(&Matrix::identity(a.dim())) < 1e-12);
            prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn eigenvalues_sum_to_trace(a in sym_matrix()) {
            let vals = symmetric_eigenvalues(&a).unwrap();
            let s: f64 = vals.iter().sum();
            prop_assert!((s - a.trace()).abs() <= 1e-10 * a.norm_frobenius().max(1.0));
        }
    }
}

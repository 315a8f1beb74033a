//! One-sided (Hestenes) Jacobi singular value decomposition.

use super::{basis_vector, inner, norm, ComplexMatrix, C64};

const MAX_SWEEPS: usize = 80;

/// Full SVD `M = U diag(s) V^dagger`.
#[derive(Clone, Debug)]
pub struct SvdResult {
    /// `rows x rows`, unitary.
    pub u: ComplexMatrix,
    /// Length `min(rows, cols)`, descending.
    pub singular_values: Vec<f64>,
    /// `cols x cols`, unitary.
    pub v: ComplexMatrix,
}

impl SvdResult {
    pub fn largest(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Count of singular values above `tol * s_max`.
    pub fn rank(&self, tol: f64) -> usize {
        let smax = self.largest();
        if smax == 0.0 {
            return 0;
        }
        self.singular_values
            .iter()
            .filter(|&&s| s > tol * smax)
            .count()
    }

    /// Orthonormal basis of the null space: trailing right singular vectors.
    pub fn null_space(&self, tol: f64) -> Vec<Vec<C64>> {
        let r = self.rank(tol);
        (r..self.v.cols()).map(|j| self.v.column(j)).collect()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let (m, n) = (self.u.rows(), self.v.rows());
        ComplexMatrix::from_fn(m, n, |r, c| {
            self.singular_values
                .iter()
                .enumerate()
                .map(|(k, &s)| self.u[(r, k)] * s * self.v[(c, k)].conj())
                .sum()
        })
    }
}

pub fn svd(m: &ComplexMatrix) -> SvdResult {
    if m.rows() >= m.cols() {
        tall_svd(m)
    } else {
        // M^dagger = U' S V'^dagger  =>  M = V' S U'^dagger
        let t = tall_svd(&m.adjoint());
        SvdResult {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        }
    }
}

fn tall_svd(m: &ComplexMatrix) -> SvdResult {
    let (rows, cols) = (m.rows(), m.cols());
    let mut work = m.columns();
    let mut right: Vec<Vec<C64>> = (0..cols).map(|j| basis_vector(cols, j)).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: f64 = work[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = work[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = inner(&work[p], &work[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let pc = phase.conj();
                let theta = (beta - alpha) / (2.0 * g);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let (lo, hi) = work.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = xp * c - pc * yq * s;
                    *y = xp * s + pc * yq * c;
                }
                let (lo, hi) = right.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = xp * c - pc * yq * s;
                    *y = xp * s + pc * yq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let sigmas: Vec<f64> = work.iter().map(|c| norm(c)).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| sigmas[j].total_cmp(&sigmas[i]));
    let smax = order.first().map_or(0.0, |&i| sigmas[i]);
    let floor = smax * f64::EPSILON * (rows.max(cols) as f64);

    let mut u_cols: Vec<Vec<C64>> = Vec::with_capacity(rows);
    for &j in &order {
        if sigmas[j] > floor && sigmas[j] > 0.0 {
            u_cols.push(work[j].iter().map(|z| z / sigmas[j]).collect());
        }
    }
    complete_basis(&mut u_cols, rows);

    let singular_values = order.iter().map(|&j| sigmas[j]).collect();
    let v_cols: Vec<Vec<C64>> = order.iter().map(|&j| right[j].clone()).collect();
    SvdResult {
        u: ComplexMatrix::from_columns(&u_cols).expect("uniform column length"),
        singular_values,
        v: ComplexMatrix::from_columns(&v_cols).expect("uniform column length"),
    }
}

/// Extends orthonormal `cols` to a full basis of `C^dim` using standard
/// basis vectors, in index order.
fn complete_basis(cols: &mut Vec<Vec<C64>>, dim: usize) {
    for i in 0..dim {
        if cols.len() >= dim {
            break;
        }
        let mut cand = basis_vector(dim, i);
        for _ in 0..2 {
            for e in cols.iter() {
                let c = inner(e, &cand);
                for (x, y) in cand.iter_mut().zip(e) {
                    *x -= c * y;
                }
            }
        }
        let n = norm(&cand);
        if n > 0.5 / (dim as f64).sqrt() {
            cols.push(cand.iter().map(|z| z / n).collect());
        }
    }
    debug_assert_eq!(cols.len(), dim);
}

//! Alternating maximization of the overlap between a product state and a
//! subspace.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, C64};
use crate::random::{haar_vector, stream_rng};
use crate::states::{reshape_across, Bipartition, ProductState, Subspace};

/// Objective gain below which a restart counts as converged.
pub const CONVERGENCE_TOL: f64 = 1e-12;
/// Allowed decrease between iterations before monotonicity is flagged.
pub const MONOTONICITY_SLACK: f64 = 1e-12;
const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeesawOptions {
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        Self {
            restarts: 200,
            max_iters: 500,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SeesawResult {
    /// Largest `<a,b|Pi|a,b>` found, clamped to `[0, 1]`.
    pub best_overlap: f64,
    /// Maximizer as a bipartite product across the cut.
    pub best_product_state: ProductState,
    pub restarts: usize,
    /// Iterations used by the winning restart.
    pub iterations_used: usize,
    /// Whether the winning restart met the convergence test.
    pub converged: bool,
    pub best_restart: usize,
    /// Objective after each iteration of the winning restart.
    pub trace: Vec<f64>,
    /// No restart decreased its objective by more than the slack.
    pub monotone: bool,
}

struct Restart {
    value: f64,
    a: Vec<C64>,
    b: Vec<C64>,
    iterations: usize,
    converged: bool,
    trace: Vec<f64>,
    monotone: bool,
}

/// Maximizes the weight of a product state `a ⊗ b` (across `cut`) inside
/// `sub`.
///
/// With `b` fixed the objective is a quadratic form in `a`, maximized by
/// the top eigenvector; the two factors are updated in turn until the gain
/// drops below [`CONVERGENCE_TOL`]. Restart `k` draws its starting factors
/// from stream `k` of the seeded generator, so the result does not depend
/// on how restarts are scheduled.
pub fn seesaw_max_product_overlap(
    sub: &Subspace,
    cut: &Bipartition,
    opts: &SeesawOptions,
) -> Result<SeesawResult> {
    if opts.restarts == 0 || opts.max_iters == 0 {
        return Err(Error::Precondition(
            "seesaw needs at least one restart and one iteration".into(),
        ));
    }
    let (da, db) = cut.reduced_dims(sub.dims())?;
    let blocks: Vec<ComplexMatrix> = sub
        .vectors()
        .iter()
        .map(|v| reshape_across(v, sub.dims(), cut))
        .collect::<Result<_>>()?;

    let runs: Vec<Restart> = (0..opts.restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(opts.seed, k as u64);
            let a = haar_vector(&mut rng, da);
            let b = haar_vector(&mut rng, db);
            run_restart(&blocks, a, b, opts.max_iters)
        })
        .collect();

    let mut best = 0;
    for (k, r) in runs.iter().enumerate() {
        if r.value > runs[best].value {
            best = k;
        }
    }
    let monotone = runs.iter().all(|r| r.monotone);
    let winner = &runs[best];
    Ok(SeesawResult {
        best_overlap: winner.value.clamp(0.0, 1.0),
        best_product_state: ProductState::new(vec![winner.a.clone(), winner.b.clone()])?,
        restarts: opts.restarts,
        iterations_used: winner.iterations,
        converged: winner.converged,
        best_restart: best,
        trace: winner.trace.clone(),
        monotone,
    })
}

fn run_restart(blocks: &[ComplexMatrix], mut a: Vec<C64>, mut b: Vec<C64>, max_iters: usize) -> Restart {
    let mut trace = Vec::new();
    let mut previous = objective(blocks, &a, &b);
    let mut monotone = true;
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..max_iters {
        iterations += 1;
        a = top_eigenvector(&reduced_left(blocks, &b)).1;
        let (value, nb) = top_eigenvector(&reduced_right(blocks, &a));
        b = nb;
        if value < previous - MONOTONICITY_SLACK {
            monotone = false;
        }
        trace.push(value);
        let gain = value - previous;
        previous = previous.max(value);
        if gain.abs() < CONVERGENCE_TOL {
            converged = true;
            break;
        }
    }
    Restart {
        value: objective(blocks, &a, &b),
        a,
        b,
        iterations,
        converged,
        trace,
        monotone,
    }
}

/// `sum_k |<a,b|v_k>|^2`.
pub(crate) fn objective(blocks: &[ComplexMatrix], a: &[C64], b: &[C64]) -> f64 {
    blocks
        .iter()
        .map(|m| {
            let mut acc = C64::new(0.0, 0.0);
            for (i, ai) in a.iter().enumerate() {
                for (j, bj) in b.iter().enumerate() {
                    acc += ai.conj() * bj.conj() * m[(i, j)];
                }
            }
            acc.norm_sqr()
        })
        .sum()
}

/// `sum_k c_k c_k^dagger` with `c_k[i] = sum_j conj(b_j) V_k[i][j]`.
fn reduced_left(blocks: &[ComplexMatrix], b: &[C64]) -> ComplexMatrix {
    let da = blocks[0].rows();
    let mut m = ComplexMatrix::zeros(da, da);
    for v in blocks {
        let c: Vec<C64> = (0..da)
            .map(|i| b.iter().enumerate().map(|(j, bj)| bj.conj() * v[(i, j)]).sum())
            .collect();
        m = &m + &ComplexMatrix::projector(&c);
    }
    m
}

/// `sum_k d_k d_k^dagger` with `d_k[j] = sum_i conj(a_i) V_k[i][j]`.
fn reduced_right(blocks: &[ComplexMatrix], a: &[C64]) -> ComplexMatrix {
    let db = blocks[0].cols();
    let mut m = ComplexMatrix::zeros(db, db);
    for v in blocks {
        let d: Vec<C64> = (0..db)
            .map(|j| a.iter().enumerate().map(|(i, ai)| ai.conj() * v[(i, j)]).sum())
            .collect();
        m = &m + &ComplexMatrix::projector(&d);
    }
    m
}

/// Largest eigenvalue and an eigenvector for it. Inside a degenerate top
/// eigenspace the vector whose entrywise moduli are lexicographically
/// largest wins.
fn top_eigenvector(m: &ComplexMatrix) -> (f64, Vec<C64>) {
    let eig = hermitian_eig(m).expect("reduced operators are Hermitian");
    let top = eig.max();
    let n = eig.eigenvalues.len();
    let mut best = n - 1;
    for i in (0..n - 1).rev() {
        if top - eig.eigenvalues[i] > DEGENERACY_TOL {
            break;
        }
        if lex_greater(&eig.vector(i), &eig.vector(best)) {
            best = i;
        }
    }
    (top, eig.vector(best))
}

fn lex_greater(u: &[C64], v: &[C64]) -> bool {
    for (x, y) in u.iter().zip(v) {
        match x.norm().total_cmp(&y.norm()) {
            std::cmp::Ordering::Greater => return true,
            std::cmp::Ordering::Less => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, DimVec};
    use crate::states::PureState;

    fn opts(restarts: usize) -> SeesawOptions {
        SeesawOptions {
            restarts,
            max_iters: 500,
            seed: 1,
        }
    }

    #[test]
    fn bell_line_gives_one_half() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = PureState::new(
            DimVec::bipartite(2, 2).unwrap(),
            vec![C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(h, 0.0)],
        )
        .unwrap();
        let r = seesaw_max_product_overlap(
            &Subspace::span_of(&psi),
            &Bipartition::first_vs_rest(2).unwrap(),
            &opts(20),
        )
        .unwrap();
        assert!((r.best_overlap - 0.5).abs() < 1e-9);
        assert!(r.monotone);
    }

    #[test]
    fn product_line_gives_one() {
        let psi = PureState::new(DimVec::bipartite(2, 2).unwrap(), basis_vector(4, 0)).unwrap();
        let r = seesaw_max_product_overlap(
            &Subspace::span_of(&psi),
            &Bipartition::first_vs_rest(2).unwrap(),
            &opts(5),
        )
        .unwrap();
        assert!((r.best_overlap - 1.0).abs() < 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn parallel_result_is_reproducible() {
        let psi = PureState::normalized(
            DimVec::bipartite(2, 3).unwrap(),
            (0..6).map(|i| C64::new(1.0 + i as f64, -(i as f64) * 0.5)).collect(),
        )
        .unwrap();
        let sub = crate::states::orthogonal_complement(&psi).unwrap();
        let cut = Bipartition::first_vs_rest(2).unwrap();
        let a = seesaw_max_product_overlap(&sub, &cut, &opts(16)).unwrap();
        let b = seesaw_max_product_overlap(&sub, &cut, &opts(16)).unwrap();
        assert_eq!(a.best_overlap, b.best_overlap);
        assert_eq!(a.best_restart, b.best_restart);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn degenerate_top_eigenspace_tie_break() {
        let m = ComplexMatrix::identity(3);
        let (val, v) = top_eigenvector(&m);
        assert_eq!(val, 1.0);
        assert_eq!(v, basis_vector(3, 0));
    }
}

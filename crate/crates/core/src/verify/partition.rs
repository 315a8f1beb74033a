//! Exact extendibility test for sets of product states.
//!
//! A product state `|a_1>...|a_k>` is orthogonal to `|s_1>...|s_k>` iff
//! `<a_p|s_p> = 0` for some party `p`. So a product state orthogonal to a
//! whole set exists iff the set can be split among the parties such that,
//! for each party, the local vectors assigned to it do not span that
//! party's space.

use crate::constructions::ProductBasis;
use crate::error::Result;
use crate::linalg::{basis_vector, orthonormalize, svd, ComplexMatrix, C64, RANK_TOL};
use crate::states::ProductState;

/// Outcome of the search.
#[derive(Clone, Debug)]
pub struct PartitionSearch {
    /// Party chosen for each state, when an orthogonal product exists.
    pub assignment: Option<Vec<usize>>,
    /// The orthogonal product state built from the assignment.
    pub extension: Option<ProductState>,
    /// Number of partial assignments visited.
    pub visited: usize,
}

impl PartitionSearch {
    pub fn unextendible(&self) -> bool {
        self.assignment.is_none()
    }
}

/// Depth-first search over assignments of states to parties, abandoning a
/// branch as soon as some party's assigned vectors span its space.
pub fn orthogonal_product_search(basis: &ProductBasis) -> Result<PartitionSearch> {
    let dims = basis.dims().as_slice().to_vec();
    let k = dims.len();
    let states = basis.states();
    let mut assigned: Vec<Vec<Vec<C64>>> = vec![Vec::new(); k];
    let mut choice = Vec::with_capacity(states.len());
    let mut visited = 0;
    let found = search(states, &dims, 0, &mut assigned, &mut choice, &mut visited);
    if !found {
        return Ok(PartitionSearch {
            assignment: None,
            extension: None,
            visited,
        });
    }
    let factors = (0..k)
        .map(|p| orthogonal_vector(&assigned[p], dims[p]))
        .collect();
    Ok(PartitionSearch {
        assignment: Some(choice),
        extension: Some(ProductState::new(factors)?),
        visited,
    })
}

fn search(
    states: &[ProductState],
    dims: &[usize],
    next: usize,
    assigned: &mut Vec<Vec<Vec<C64>>>,
    choice: &mut Vec<usize>,
    visited: &mut usize,
) -> bool {
    *visited += 1;
    if next == states.len() {
        return true;
    }
    for p in 0..dims.len() {
        assigned[p].push(states[next].factors()[p].clone());
        if local_rank(&assigned[p]) < dims[p] {
            choice.push(p);
            if search(states, dims, next + 1, assigned, choice, visited) {
                return true;
            }
            choice.pop();
        }
        assigned[p].pop();
    }
    false
}

fn local_rank(vectors: &[Vec<C64>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let m = ComplexMatrix::from_columns(vectors).expect("equal lengths");
    svd(&m).rank(RANK_TOL)
}

/// Unit vector orthogonal to all of `vectors` (which do not span).
fn orthogonal_vector(vectors: &[Vec<C64>], dim: usize) -> Vec<C64> {
    if vectors.is_empty() {
        return basis_vector(dim, 0);
    }
    let m = ComplexMatrix::from_columns(vectors).expect("equal lengths");
    // null space of M^dagger is the orthogonal complement of the span
    let s = svd(&m.adjoint());
    let null = s.null_space(RANK_TOL);
    let v = null.into_iter().next().unwrap_or_else(|| basis_vector(dim, 0));
    orthonormalize(&[v], RANK_TOL)
        .ok()
        .and_then(|mut o| o.pop())
        .unwrap_or_else(|| basis_vector(dim, 0))
}

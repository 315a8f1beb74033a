use super::{ComplexMatrix, DimVec, C64, ONE, ZERO};
use crate::error::Error;

/// Kronecker product, first factor most significant.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Kronecker product of a list of vectors, in order.
pub fn kron_all<V: AsRef<[C64]>>(factors: &[V]) -> Vec<C64> {
    factors
        .iter()
        .fold(vec![ONE], |acc, f| kron_vec(&acc, f.as_ref()))
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn check_square(m: &ComplexMatrix, dims: &DimVec) -> Result<(), Error> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    dims.check_total(m.rows())
}

fn check_subsystems(set: &[usize], dims: &DimVec) -> Result<(), Error> {
    if let Some(&k) = set.iter().find(|&&k| k >= dims.parties()) {
        return Err(Error::DimensionMismatch(format!(
            "subsystem {k} out of range for {} parties",
            dims.parties()
        )));
    }
    Ok(())
}

/// Transposes the subsystems listed in `part`, leaving the rest untouched.
pub fn partial_transpose(
    m: &ComplexMatrix,
    dims: &DimVec,
    part: &[usize],
) -> Result<ComplexMatrix, Error> {
    check_square(m, dims)?;
    check_subsystems(part, dims)?;
    let d = dims.as_slice();
    let st = strides(d);
    let n = m.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let (mut r2, mut c2) = (r, c);
            for &k in part {
                let dr = (r / st[k]) % d[k];
                let dc = (c / st[k]) % d[k];
                r2 = r2 - dr * st[k] + dc * st[k];
                c2 = c2 - dc * st[k] + dr * st[k];
            }
            out[(r2, c2)] = m[(r, c)];
        }
    }
    Ok(out)
}

/// Traces out every subsystem not listed in `keep`; kept subsystems retain
/// their original relative order.
pub fn partial_trace(
    m: &ComplexMatrix,
    dims: &DimVec,
    keep: &[usize],
) -> Result<ComplexMatrix, Error> {
    check_square(m, dims)?;
    check_subsystems(keep, dims)?;
    let d = dims.as_slice();
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let traced: Vec<usize> = (0..d.len()).filter(|k| !kept.contains(k)).collect();
    let st = strides(d);
    let kd: Vec<usize> = kept.iter().map(|&k| d[k]).collect();
    let out_n: usize = kd.iter().product();
    let traced_n: usize = traced.iter().map(|&k| d[k]).product();

    // offset in the full index for each kept / traced multi-index
    let offsets = |subs: &[usize], count: usize| -> Vec<usize> {
        (0..count)
            .map(|mut idx| {
                let mut off = 0;
                for &k in subs.iter().rev() {
                    off += (idx % d[k]) * st[k];
                    idx /= d[k];
                }
                off
            })
            .collect()
    };
    let kept_off = offsets(&kept, out_n);
    let traced_off = offsets(&traced, traced_n);

    let mut out = ComplexMatrix::zeros(out_n, out_n);
    for (r, &ro) in kept_off.iter().enumerate() {
        for (c, &co) in kept_off.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &traced_off {
                acc += m[(ro + t, co + t)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

fn permutation_map(dims: &DimVec, order: &[usize]) -> Result<(Vec<usize>, DimVec), Error> {
    let d = dims.as_slice();
    let mut seen = vec![false; d.len()];
    if order.len() != d.len() {
        return Err(Error::DimensionMismatch(format!(
            "permutation of length {} for {} subsystems",
            order.len(),
            d.len()
        )));
    }
    for &k in order {
        if k >= d.len() || seen[k] {
            return Err(Error::DimensionMismatch(format!(
                "{order:?} is not a permutation of the subsystems"
            )));
        }
        seen[k] = true;
    }
    let new_dims: Vec<usize> = order.iter().map(|&k| d[k]).collect();
    let old_st = strides(d);
    let new_st = strides(&new_dims);
    let n = dims.total();
    let map = (0..n)
        .map(|old| {
            order
                .iter()
                .enumerate()
                .map(|(pos, &k)| ((old / old_st[k]) % d[k]) * new_st[pos])
                .sum()
        })
        .collect();
    Ok((map, DimVec::new(new_dims)?))
}

/// Reorders subsystems of a state vector: new subsystem `i` is old
/// subsystem `order[i]`.
pub fn permute_subsystems_vec(
    v: &[C64],
    dims: &DimVec,
    order: &[usize],
) -> Result<(Vec<C64>, DimVec), Error> {
    dims.check_total(v.len())?;
    let (map, new_dims) = permutation_map(dims, order)?;
    let mut out = vec![ZERO; v.len()];
    for (old, &new) in map.iter().enumerate() {
        out[new] = v[old];
    }
    Ok((out, new_dims))
}

/// Matrix counterpart of [`permute_subsystems_vec`].
pub fn permute_subsystems(
    m: &ComplexMatrix,
    dims: &DimVec,
    order: &[usize],
) -> Result<(ComplexMatrix, DimVec), Error> {
    check_square(m, dims)?;
    let (map, new_dims) = permutation_map(dims, order)?;
    let n = m.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            out[(map[r], map[c])] = m[(r, c)];
        }
    }
    Ok((out, new_dims))
}

//! Quantum states, subspaces and the elementary tests built on them.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{
    self, hermitian_eig, inner, kron, kron_all, kron_vec, norm, orthonormalize,
    partial_transpose, permute_subsystems, permute_subsystems_vec, svd, ComplexMatrix, DimVec,
    C64, RANK_TOL,
};

/// Slack for positive semidefiniteness.
pub const PSD_TOL: f64 = 1e-9;
/// Slack on the smallest partial-transpose eigenvalue.
pub const PPT_TOL: f64 = 1e-9;
/// Schmidt coefficients above this count towards the Schmidt rank.
pub const SCHMIDT_TOL: f64 = 1e-8;
/// `Tr(rho_i rho_j)` below this counts as orthogonal.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

const NORM_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;

/// A cut of the subsystems into two nonempty sides.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bipartition {
    side_a: Vec<usize>,
    parties: usize,
}

impl Bipartition {
    pub fn new(side_a: impl Into<Vec<usize>>, parties: usize) -> Result<Self> {
        let mut side_a: Vec<usize> = side_a.into();
        side_a.sort_unstable();
        side_a.dedup();
        if side_a.is_empty() || side_a.len() >= parties {
            return Err(Error::InvalidBipartition(format!(
                "side {side_a:?} is not a proper nonempty subset of {parties} subsystems"
            )));
        }
        if let Some(k) = side_a.iter().find(|&&k| k >= parties) {
            return Err(Error::InvalidBipartition(format!(
                "subsystem {k} out of range for {parties} subsystems"
            )));
        }
        Ok(Self { side_a, parties })
    }

    /// `{0} | {1, ..., n-1}`; the usual cut of a bipartite system.
    pub fn first_vs_rest(parties: usize) -> Result<Self> {
        Self::new(vec![0], parties)
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> Vec<usize> {
        (0..self.parties)
            .filter(|k| !self.side_a.contains(k))
            .collect()
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    /// Subsystem order placing side A first.
    pub fn order(&self) -> Vec<usize> {
        let mut o = self.side_a.clone();
        o.extend(self.side_b());
        o
    }

    /// `(prod of side A dims, prod of side B dims)`.
    pub fn reduced_dims(&self, dims: &DimVec) -> Result<(usize, usize)> {
        if dims.parties() != self.parties {
            return Err(Error::InvalidBipartition(format!(
                "cut over {} subsystems applied to dims {dims}",
                self.parties
            )));
        }
        let a = self.side_a.iter().map(|&k| dims.get(k)).product();
        let b = self.side_b().iter().map(|&k| dims.get(k)).product();
        Ok((a, b))
    }

    /// Every bipartition once, ordered by the size of side A and then
    /// lexicographically; a cut whose complement was already listed is
    /// skipped.
    pub fn all(parties: usize) -> Vec<Bipartition> {
        let mut out: Vec<Bipartition> = Vec::new();
        for size in 1..parties {
            let mut subsets = Vec::new();
            combinations(parties, size, &mut Vec::new(), 0, &mut subsets);
            for s in subsets {
                let cut = Bipartition {
                    side_a: s,
                    parties,
                };
                let dual = cut.side_b();
                if !out.iter().any(|c| c.side_a == dual) {
                    out.push(cut);
                }
            }
        }
        out
    }
}

fn combinations(n: usize, k: usize, cur: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        cur.push(i);
        combinations(n, k, cur, i + 1, out);
        cur.pop();
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| {
            v.iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{}|{}", join(&self.side_a), join(&self.side_b()))
    }
}

/// Parses `"0|1,2"`. The side after `|` is optional but must be the
/// complement when present; the party count comes from the caller.
pub fn parse_cut(s: &str, parties: usize) -> Result<Bipartition> {
    let parse_side = |side: &str| -> Result<Vec<usize>> {
        side.split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidBipartition(format!("bad subsystem index {t:?}")))
            })
            .collect()
    };
    let (a, b) = match s.split_once('|') {
        Some((a, b)) => (parse_side(a)?, Some(parse_side(b)?)),
        None => (parse_side(s)?, None),
    };
    let cut = Bipartition::new(a, parties)?;
    if let Some(mut b) = b {
        b.sort_unstable();
        if b != cut.side_b() {
            return Err(Error::InvalidBipartition(format!(
                "{s:?}: right side is not the complement of the left side"
            )));
        }
    }
    Ok(cut)
}

impl FromStr for Bipartition {
    type Err = Error;

    /// Requires both sides (`"0|1,2"`) so the party count is known.
    fn from_str(s: &str) -> Result<Self> {
        let parties = s
            .split(['|', ','])
            .filter_map(|t| t.trim().parse::<usize>().ok())
            .count();
        if !s.contains('|') {
            return Err(Error::InvalidBipartition(format!(
                "{s:?}: expected the form A|B"
            )));
        }
        parse_cut(s, parties)
    }
}

/// Normalized pure state on a composite system.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: DimVec,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Rejects vectors whose norm differs from one by more than `1e-12`.
    pub fn new(dims: DimVec, amplitudes: Vec<C64>) -> Result<Self> {
        dims.check_total(amplitudes.len())?;
        let n = norm(&amplitudes);
        if !n.is_finite() || (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "state vector has norm {n}, expected 1"
            )));
        }
        Ok(Self { dims, amplitudes })
    }

    pub fn normalized(dims: DimVec, amplitudes: Vec<C64>) -> Result<Self> {
        dims.check_total(amplitudes.len())?;
        let v = linalg::normalize(&amplitudes)
            .ok_or_else(|| Error::InvalidState("zero state vector".to_string()))?;
        Ok(Self {
            dims,
            amplitudes: v,
        })
    }

    /// Computational basis state `|i_1>|i_2>...`.
    pub fn basis(dims: DimVec, digits: &[usize]) -> Result<Self> {
        if digits.len() != dims.parties() || digits.iter().zip(dims.as_slice()).any(|(i, d)| i >= d)
        {
            return Err(Error::DimensionMismatch(format!(
                "basis label {digits:?} for dims {dims}"
            )));
        }
        let index = digits
            .iter()
            .zip(dims.as_slice())
            .fold(0, |acc, (i, d)| acc * d + i);
        let amps = linalg::basis_vector(dims.total(), index);
        Ok(Self {
            dims,
            amplitudes: amps,
        })
    }

    pub fn dims(&self) -> &DimVec {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::projector(&self.amplitudes)
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator {
            dims: self.dims.clone(),
            matrix: self.projector(),
        }
    }

    /// Applies a local unitary on every subsystem.
    pub fn apply_local(&self, unitaries: &[ComplexMatrix]) -> Result<Self> {
        let op = local_operator(&self.dims, unitaries)?;
        Ok(Self {
            dims: self.dims.clone(),
            amplitudes: op.mul_vec(&self.amplitudes),
        })
    }
}

/// `U_1 ⊗ U_2 ⊗ ...` checked against `dims`.
pub fn local_operator(dims: &DimVec, locals: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    if locals.len() != dims.parties()
        || locals
            .iter()
            .zip(dims.as_slice())
            .any(|(u, &d)| u.rows() != d || u.cols() != d)
    {
        return Err(Error::DimensionMismatch(format!(
            "local operators do not match dims {dims}"
        )));
    }
    Ok(locals[1..]
        .iter()
        .fold(locals[0].clone(), |acc, u| kron(&acc, u)))
}

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    dims: DimVec,
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(dims: DimVec, matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch("density matrix must be square".into()));
        }
        dims.check_total(matrix.rows())?;
        let defect = matrix.hermiticity_defect();
        if defect > 1e-10 {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}, expected 1")));
        }
        let min = hermitian_eig(&matrix)?.min();
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (min eigenvalue {min:.3e})"
            )));
        }
        Ok(Self { dims, matrix })
    }

    /// Uniform mixture of the projectors onto the (normalized) `vectors`.
    pub fn uniform_mixture(dims: DimVec, vectors: &[Vec<C64>]) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::InvalidState("empty mixture".into()));
        }
        let n = dims.total();
        let mut acc = ComplexMatrix::zeros(n, n);
        for v in vectors {
            dims.check_total(v.len())?;
            let v = linalg::normalize(v)
                .ok_or_else(|| Error::InvalidState("zero vector in mixture".into()))?;
            acc = &acc + &ComplexMatrix::projector(&v);
        }
        Ok(Self {
            dims,
            matrix: acc.scale_real(1.0 / vectors.len() as f64),
        })
    }

    /// Normalized projector `Pi_S / dim S`.
    pub fn maximally_mixed_on(sub: &Subspace) -> Self {
        Self {
            dims: sub.dims.clone(),
            matrix: sub.projector().scale_real(1.0 / sub.dim() as f64),
        }
    }

    pub fn dims(&self) -> &DimVec {
        &self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    /// `Tr(self other)`, real part.
    pub fn overlap(&self, other: &DensityOperator) -> f64 {
        self.matrix.trace_product(&other.matrix).re
    }
}

/// Product state stored by its local factors. Each factor is normalized
/// and its first nonzero entry is made real and positive.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductState {
    factors: Vec<Vec<C64>>,
}

impl ProductState {
    pub fn new(factors: Vec<Vec<C64>>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidState("product state without factors".into()));
        }
        let factors = factors
            .into_iter()
            .map(|f| {
                let f = linalg::normalize(&f)
                    .ok_or_else(|| Error::InvalidState("zero local factor".into()))?;
                Ok(canonical_phase(f))
            })
            .collect::<Result<Vec<_>>>()?;
        DimVec::new(factors.iter().map(Vec::len).collect())?;
        Ok(Self { factors })
    }

    pub fn from_real(factors: &[&[f64]]) -> Result<Self> {
        Self::new(
            factors
                .iter()
                .map(|f| f.iter().map(|&x| C64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn factors(&self) -> &[Vec<C64>] {
        &self.factors
    }

    pub fn dims(&self) -> DimVec {
        DimVec::new(self.factors.iter().map(Vec::len).collect()).expect("validated on construction")
    }

    pub fn amplitudes(&self) -> Vec<C64> {
        kron_all(&self.factors)
    }
}

fn canonical_phase(mut v: Vec<C64>) -> Vec<C64> {
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-12).copied() {
        let phase = first.conj() / first.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
        // exact zero imaginary part on the pivot
        if let Some(p) = v.iter_mut().find(|z| z.norm() > 1e-12) {
            p.im = 0.0;
        }
    }
    v
}

/// Subspace of a composite space, held as orthonormal columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    dims: DimVec,
    basis: ComplexMatrix,
}

impl Subspace {
    /// Span of `vectors`, numerical rank decided at relative tolerance `tol`.
    pub fn from_vectors(dims: DimVec, vectors: &[Vec<C64>], tol: f64) -> Result<Self> {
        for v in vectors {
            dims.check_total(v.len())?;
        }
        let cols = orthonormalize(vectors, tol)?;
        Ok(Self {
            dims,
            basis: ComplexMatrix::from_columns(&cols)?,
        })
    }

    /// Takes columns that are already orthonormal (checked to `1e-10`).
    pub fn from_orthonormal(dims: DimVec, basis: ComplexMatrix) -> Result<Self> {
        dims.check_total(basis.rows())?;
        if basis.cols() == 0 {
            return Err(Error::Precondition("empty subspace".into()));
        }
        let gram = basis.adjoint().matmul(&basis);
        let defect = gram.distance(&ComplexMatrix::identity(basis.cols()));
        if defect > 1e-10 {
            return Err(Error::Precondition(format!(
                "basis columns are not orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(Self { dims, basis })
    }

    pub fn span_of(psi: &PureState) -> Self {
        Self {
            dims: psi.dims.clone(),
            basis: ComplexMatrix::from_columns(std::slice::from_ref(&psi.amplitudes)).expect("one column"),
        }
    }

    pub fn dims(&self) -> &DimVec {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    /// `D x k` matrix of orthonormal columns.
    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<Vec<C64>> {
        self.basis.columns()
    }

    pub fn projector(&self) -> ComplexMatrix {
        self.basis.matmul(&self.basis.adjoint())
    }

    /// Frobenius distance between the two orthogonal projectors.
    pub fn projector_distance(&self, other: &Subspace) -> f64 {
        self.projector().distance(&other.projector())
    }

    /// Squared norm of the component of `v` inside the subspace.
    pub fn weight(&self, v: &[C64]) -> f64 {
        self.basis
            .adjoint()
            .mul_vec(v)
            .iter()
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// Orthogonal complement in the ambient space.
    pub fn complement(&self) -> Result<Subspace> {
        let total = self.ambient_dim();
        if self.dim() >= total {
            return Err(Error::Precondition(
                "subspace spans the whole space; complement is empty".into(),
            ));
        }
        // eigenvalues of the projector are 0 or 1; the 0-eigenspace is the
        // complement
        let eig = hermitian_eig(&self.projector())?;
        let cols: Vec<Vec<C64>> = (0..total)
            .filter(|&i| eig.eigenvalues[i] < 0.5)
            .map(|i| eig.vector(i))
            .collect();
        let cols = orthonormalize(&cols, RANK_TOL)?;
        Ok(Subspace {
            dims: self.dims.clone(),
            basis: ComplexMatrix::from_columns(&cols)?,
        })
    }
}

/// Complement of a single state.
pub fn orthogonal_complement(psi: &PureState) -> Result<Subspace> {
    Subspace::span_of(psi).complement()
}

/// Schmidt form `psi = sum_i a_i |l_i>|r_i>` across a cut.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    /// Nonzero coefficients (above [`SCHMIDT_TOL`]), descending.
    pub coefficients: Vec<f64>,
    /// All `min(dA, dB)` singular values, descending.
    pub all_coefficients: Vec<f64>,
    /// Unitary; the first `rank` columns are the left Schmidt vectors.
    pub left_basis: ComplexMatrix,
    /// Unitary; the first `rank` columns are the right Schmidt vectors.
    pub right_basis: ComplexMatrix,
    pub rank: usize,
    /// Dimensions of the two sides after regrouping.
    pub side_dims: (usize, usize),
}

impl SchmidtDecomposition {
    /// Second largest coefficient (zero for product states).
    pub fn second_coefficient(&self) -> f64 {
        self.all_coefficients.get(1).copied().unwrap_or(0.0)
    }

    /// Vector rebuilt from the truncated form, in the cut's regrouped order.
    pub fn reconstruct(&self) -> Vec<C64> {
        let (da, db) = self.side_dims;
        let mut out = vec![C64::new(0.0, 0.0); da * db];
        for (k, &a) in self.coefficients.iter().enumerate() {
            let l = self.left_basis.column(k);
            let r = self.right_basis.column(k);
            for (o, z) in out.iter_mut().zip(kron_vec(&l, &r)) {
                *o += z * a;
            }
        }
        out
    }
}

/// Amplitude vector with side A moved in front, as a `dA x dB` matrix.
pub fn reshape_across(v: &[C64], dims: &DimVec, cut: &Bipartition) -> Result<ComplexMatrix> {
    let (da, db) = cut.reduced_dims(dims)?;
    let (w, _) = permute_subsystems_vec(v, dims, &cut.order())?;
    ComplexMatrix::from_row_major(da, db, w)
}

pub fn schmidt_decompose(psi: &PureState, cut: &Bipartition) -> Result<SchmidtDecomposition> {
    schmidt_of_vector(psi.amplitudes(), psi.dims(), cut)
}

/// Schmidt decomposition of an arbitrary (not necessarily normalized)
/// vector.
pub fn schmidt_of_vector(
    v: &[C64],
    dims: &DimVec,
    cut: &Bipartition,
) -> Result<SchmidtDecomposition> {
    let m = reshape_across(v, dims, cut)?;
    let side_dims = (m.rows(), m.cols());
    let s = svd(&m);
    let rank = s.singular_values.iter().filter(|&&a| a > SCHMIDT_TOL).count();
    Ok(SchmidtDecomposition {
        coefficients: s.singular_values[..rank].to_vec(),
        all_coefficients: s.singular_values.clone(),
        left_basis: s.u,
        // M = U S V^dagger, so the right vectors are the conjugated columns of V
        right_basis: s.v.conj(),
        rank,
        side_dims,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PurityVerdict {
    SeparableGuaranteed,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct PurityCheck {
    pub purity: f64,
    /// `1 / (d1 d2 - 1)`.
    pub bound: f64,
    pub verdict: PurityVerdict,
}

/// Bipartite states with purity at most `1/(d1 d2 - 1)` are separable.
pub fn purity_check(rho: &DensityOperator) -> Result<PurityCheck> {
    if rho.dims().parties() != 2 {
        return Err(Error::Precondition(format!(
            "purity criterion needs a bipartite state, got dims {}",
            rho.dims()
        )));
    }
    let purity = rho.purity();
    let bound = 1.0 / (rho.dims().total() as f64 - 1.0);
    let verdict = if purity <= bound + 1e-12 {
        PurityVerdict::SeparableGuaranteed
    } else {
        PurityVerdict::Inconclusive
    };
    Ok(PurityCheck {
        purity,
        bound,
        verdict,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PptCheck {
    pub ppt: bool,
    pub min_eigenvalue: f64,
}

/// Smallest eigenvalue of the partial transpose over side B of `cut`.
pub fn min_pt_eigenvalue(op: &ComplexMatrix, dims: &DimVec, cut: &Bipartition) -> Result<f64> {
    cut.reduced_dims(dims)?;
    let pt = partial_transpose(op, dims, &cut.side_b())?;
    Ok(hermitian_eig(&pt)?.min())
}

pub fn is_ppt(op: &ComplexMatrix, dims: &DimVec, cut: &Bipartition, tol: f64) -> Result<PptCheck> {
    let min_eigenvalue = min_pt_eigenvalue(op, dims, cut)?;
    Ok(PptCheck {
        ppt: min_eigenvalue >= -tol,
        min_eigenvalue,
    })
}

/// Span of the eigenvectors of `rho` with eigenvalue above `tol`.
pub fn support(rho: &DensityOperator, tol: f64) -> Result<Subspace> {
    support_of(rho.matrix(), rho.dims(), tol)
}

/// [`support`] for any Hermitian operator.
pub fn support_of(op: &ComplexMatrix, dims: &DimVec, tol: f64) -> Result<Subspace> {
    dims.check_total(op.rows())?;
    let eig = hermitian_eig(op)?;
    let cols: Vec<Vec<C64>> = (0..op.rows())
        .filter(|&i| eig.eigenvalues[i] > tol)
        .map(|i| eig.vector(i))
        .collect();
    if cols.is_empty() {
        return Err(Error::Precondition("operator has empty support".into()));
    }
    Ok(Subspace {
        dims: dims.clone(),
        basis: ComplexMatrix::from_columns(&cols)?,
    })
}

/// Objects that can be tensored and regrouped into a bipartite object.
pub trait Regroup: Sized {
    /// `self ⊗ other` with the side-A subsystems of both factors moved in
    /// front, returned as a bipartite object of dims
    /// `(prod dA, prod dB)`.
    fn tensor_regroup(&self, other: &Self, cut: &Bipartition) -> Result<Self>;
}

fn regroup_plan(a: &DimVec, b: &DimVec, cut: &Bipartition) -> Result<(DimVec, Vec<usize>, DimVec)> {
    if a.parties() != b.parties() {
        return Err(Error::DimensionMismatch(format!(
            "cannot regroup dims {a} with {b}"
        )));
    }
    let (aa, ab) = cut.reduced_dims(a)?;
    let (ba, bb) = cut.reduced_dims(b)?;
    let k = a.parties();
    let joint = DimVec::new(a.as_slice().iter().chain(b.as_slice()).copied().collect())?;
    let mut order: Vec<usize> = cut.side_a().to_vec();
    order.extend(cut.side_a().iter().map(|i| i + k));
    let side_b = cut.side_b();
    order.extend(side_b.iter().copied());
    order.extend(side_b.iter().map(|i| i + k));
    Ok((joint, order, DimVec::bipartite(aa * ba, ab * bb)?))
}

impl Regroup for PureState {
    fn tensor_regroup(&self, other: &Self, cut: &Bipartition) -> Result<Self> {
        let (joint, order, out_dims) = regroup_plan(&self.dims, &other.dims, cut)?;
        let v = kron_vec(&self.amplitudes, &other.amplitudes);
        let (w, _) = permute_subsystems_vec(&v, &joint, &order)?;
        Ok(Self {
            dims: out_dims,
            amplitudes: w,
        })
    }
}

impl Regroup for DensityOperator {
    fn tensor_regroup(&self, other: &Self, cut: &Bipartition) -> Result<Self> {
        let (joint, order, out_dims) = regroup_plan(&self.dims, &other.dims, cut)?;
        let m = kron(&self.matrix, &other.matrix);
        let (w, _) = permute_subsystems(&m, &joint, &order)?;
        Ok(Self {
            dims: out_dims,
            matrix: w,
        })
    }
}

/// Free-function form of [`Regroup::tensor_regroup`].
pub fn tensor_regroup<T: Regroup>(a: &T, b: &T, cut: &Bipartition) -> Result<T> {
    a.tensor_regroup(b, cut)
}

/// Equiprobable set of states with pairwise orthogonal supports.
#[derive(Clone, Debug)]
pub struct Ensemble {
    states: Vec<DensityOperator>,
}

impl Ensemble {
    pub fn new(states: Vec<DensityOperator>) -> Result<Self> {
        let Some(first) = states.first() else {
            return Err(Error::Precondition("empty ensemble".into()));
        };
        let dims = first.dims().clone();
        if states.iter().any(|s| s.dims() != &dims) {
            return Err(Error::DimensionMismatch("ensemble members differ in dims".into()));
        }
        for i in 0..states.len() {
            for j in i + 1..states.len() {
                let ov = states[i].overlap(&states[j]);
                if ov > ORTHOGONALITY_TOL {
                    return Err(Error::NotOrthogonal(format!(
                        "Tr(rho_{i} rho_{j}) = {ov:.3e}"
                    )));
                }
            }
        }
        Ok(Self { states })
    }

    pub fn from_pure_and_mixed(psi: &PureState, rho: &DensityOperator) -> Result<Self> {
        Self::new(vec![psi.density(), rho.clone()])
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn dims(&self) -> &DimVec {
        self.states[0].dims()
    }

    /// True when the support dimensions add up to the full dimension.
    pub fn supports_fill_space(&self, tol: f64) -> Result<bool> {
        let mut total = 0;
        for s in &self.states {
            total += support(s, tol)?.dim();
        }
        Ok(total == self.dims().total())
    }
}

/// `|<u|v>|` for two states of the same dims.
pub fn fidelity_amplitude(u: &PureState, v: &PureState) -> f64 {
    inner(u.amplitudes(), v.amplitudes()).norm()
}

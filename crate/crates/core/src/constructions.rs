//! Builders for the explicit product bases and states.
//!
//! Labels are zero-based: `|0>, |1>, ...`.

use crate::error::{Error, Result};
use crate::linalg::{basis_vector, inner, kron_vec, norm, ComplexMatrix, DimVec, C64, RANK_TOL};
use crate::states::{
    schmidt_decompose, Bipartition, DensityOperator, ProductState, PureState, Subspace,
};

const ORTHOGONAL_FLAG_TOL: f64 = 1e-12;

/// Ordered list of product states together with what is claimed about
/// them.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductBasis {
    dims: DimVec,
    states: Vec<ProductState>,
    orthogonal: bool,
    claimed_complement_dim: usize,
    scale_factors: Vec<f64>,
    label: String,
}

impl ProductBasis {
    /// States must already be normalized. The orthogonality flag is
    /// computed; linear independence is left to the verifiers.
    pub fn new(dims: DimVec, states: Vec<ProductState>, label: impl Into<String>) -> Result<Self> {
        let n = states.len();
        Self::with_scale_factors(dims, states, vec![1.0; n], label)
    }

    pub fn with_scale_factors(
        dims: DimVec,
        states: Vec<ProductState>,
        scale_factors: Vec<f64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Precondition("product basis without states".into()));
        }
        if scale_factors.len() != states.len() {
            return Err(Error::DimensionMismatch(
                "one scale factor per state expected".into(),
            ));
        }
        if let Some(s) = states.iter().find(|s| s.dims() != dims) {
            return Err(Error::DimensionMismatch(format!(
                "state of dims {} in a basis of dims {dims}",
                s.dims()
            )));
        }
        if states.len() > dims.total() {
            return Err(Error::Precondition(format!(
                "{} states cannot be independent in dimension {}",
                states.len(),
                dims.total()
            )));
        }
        let orthogonal = pairwise_orthogonal(&states, ORTHOGONAL_FLAG_TOL);
        Ok(Self {
            claimed_complement_dim: dims.total() - states.len(),
            dims,
            states,
            orthogonal,
            scale_factors,
            label: label.into(),
        })
    }

    /// Normalizes each product of unnormalized factors and records the
    /// norm that was divided out.
    pub fn from_unnormalized(
        dims: DimVec,
        factors: Vec<Vec<Vec<C64>>>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let mut states = Vec::with_capacity(factors.len());
        let mut scales = Vec::with_capacity(factors.len());
        for f in factors {
            scales.push(f.iter().map(|v| norm(v)).product());
            states.push(ProductState::new(f)?);
        }
        Self::with_scale_factors(dims, states, scales, label)
    }

    /// Overrides the recorded orthogonality claim, e.g. when read from a
    /// file. Verifiers compare the claim against the states.
    pub fn with_orthogonal_claim(mut self, orthogonal: bool) -> Self {
        self.orthogonal = orthogonal;
        self
    }

    pub fn dims(&self) -> &DimVec {
        &self.dims
    }

    pub fn states(&self) -> &[ProductState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn orthogonal(&self) -> bool {
        self.orthogonal
    }

    pub fn claimed_complement_dim(&self) -> usize {
        self.claimed_complement_dim
    }

    /// Norms divided out of each state when it was built.
    pub fn scale_factors(&self) -> &[f64] {
        &self.scale_factors
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Composite amplitude vectors, in order.
    pub fn vectors(&self) -> Vec<Vec<C64>> {
        self.states.iter().map(ProductState::amplitudes).collect()
    }

    pub fn span(&self) -> Result<Subspace> {
        Subspace::from_vectors(self.dims.clone(), &self.vectors(), RANK_TOL)
    }

    /// Pairwise products `a ⊗ b` of two bases over the same cut, with the
    /// side-A factors grouped first. Used for the many-copy spot check.
    pub fn tensor_regroup(&self, other: &ProductBasis) -> Result<ProductBasis> {
        if self.dims.parties() != 2 || other.dims.parties() != 2 {
            return Err(Error::Precondition("regrouping needs bipartite bases".into()));
        }
        let dims = DimVec::bipartite(
            self.dims.get(0) * other.dims.get(0),
            self.dims.get(1) * other.dims.get(1),
        )?;
        let mut states = Vec::with_capacity(self.len() * other.len());
        let mut scales = Vec::with_capacity(self.len() * other.len());
        for (a, sa) in self.states.iter().zip(&self.scale_factors) {
            for (b, sb) in other.states.iter().zip(&other.scale_factors) {
                states.push(ProductState::new(vec![
                    kron_vec(&a.factors()[0], &b.factors()[0]),
                    kron_vec(&a.factors()[1], &b.factors()[1]),
                ])?);
                scales.push(sa * sb);
            }
        }
        Self::with_scale_factors(
            dims,
            states,
            scales,
            format!("{} x {}", self.label, other.label),
        )
    }
}

fn pairwise_orthogonal(states: &[ProductState], tol: f64) -> bool {
    let v: Vec<Vec<C64>> = states.iter().map(ProductState::amplitudes).collect();
    (0..v.len()).all(|i| (i + 1..v.len()).all(|j| inner(&v[i], &v[j]).norm() < tol))
}

fn real(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| C64::new(x, 0.0)).collect()
}

fn lin(a: C64, u: &[C64], b: C64, v: &[C64]) -> Vec<C64> {
    u.iter().zip(v).map(|(x, y)| a * x + b * y).collect()
}

/// Maximum-cardinality nonorthogonal UPB spanning the complement of an
/// entangled bipartite `psi`.
///
/// In the Schmidt bases `{|i>}`, `{|i'>}` with `psi = sum_i a_i |i>|i'>`
/// and rank `r`, the states are, for `i = 1..r-1`,
/// `(a_i|0> - a_0|i>)(|0'> + |i'>)`, `|0>|i'>`, `|i>|0'>`; then
/// `|i>|j'>` for distinct `i, j` in `1..r-1`; then every `|j>|k'>` with
/// `j >= r` or `k >= r`. That is `d1 d2 - 1` states.
#[allow(clippy::needless_range_loop)]
pub fn build_complement_nupb(psi: &PureState) -> Result<ProductBasis> {
    let dims = psi.dims().clone();
    if dims.parties() != 2 {
        return Err(Error::Precondition(format!(
            "bipartite state expected, got dims {dims}"
        )));
    }
    let schmidt = schmidt_decompose(psi, &Bipartition::first_vs_rest(2)?)?;
    let r = schmidt.rank;
    if r < 2 {
        return Err(Error::ProductInput);
    }
    let (d1, d2) = (dims.get(0), dims.get(1));
    let e = schmidt.left_basis.columns();
    let f = schmidt.right_basis.columns();
    let a = &schmidt.coefficients;
    let one = C64::new(1.0, 0.0);

    let mut factors: Vec<Vec<Vec<C64>>> = Vec::with_capacity(d1 * d2 - 1);
    for i in 1..r {
        factors.push(vec![
            lin(C64::new(a[i], 0.0), &e[0], C64::new(-a[0], 0.0), &e[i]),
            lin(one, &f[0], one, &f[i]),
        ]);
        factors.push(vec![e[0].clone(), f[i].clone()]);
        factors.push(vec![e[i].clone(), f[0].clone()]);
    }
    for i in 1..r {
        for j in 1..r {
            if i != j {
                factors.push(vec![e[i].clone(), f[j].clone()]);
            }
        }
    }
    for j in 0..d1 {
        for k in 0..d2 {
            if j >= r || k >= r {
                factors.push(vec![e[j].clone(), f[k].clone()]);
            }
        }
    }
    ProductBasis::from_unnormalized(dims, factors, "complement-nupb")
}

/// The four-state nUPB in 2x3 orthogonal to the NPT subspace
/// `span{|01> - |10>, |02> - |11>}`.
pub fn build_npt_nupb_2x3() -> Result<(ProductBasis, Subspace)> {
    let dims = DimVec::bipartite(2, 3)?;
    let factors = vec![
        vec![real(&[1.0, 1.0]), real(&[1.0, 1.0, 1.0])],
        vec![real(&[1.0, -1.0]), real(&[1.0, -1.0, 1.0])],
        vec![real(&[1.0, 0.0]), real(&[1.0, 0.0, 0.0])],
        vec![real(&[0.0, 1.0]), real(&[0.0, 0.0, 1.0])],
    ];
    let nupb = ProductBasis::from_unnormalized(dims.clone(), factors, "npt-2x3")?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut u = vec![C64::new(0.0, 0.0); 6];
    u[1] = C64::new(h, 0.0);
    u[3] = C64::new(-h, 0.0);
    let mut v = vec![C64::new(0.0, 0.0); 6];
    v[2] = C64::new(h, 0.0);
    v[4] = C64::new(-h, 0.0);
    let sub = Subspace::from_orthonormal(dims, ComplexMatrix::from_columns(&[u, v])?)?;
    Ok((nupb, sub))
}

fn tiles_factors() -> Vec<Vec<Vec<C64>>> {
    vec![
        vec![real(&[1.0, 0.0, 0.0]), real(&[1.0, -1.0, 0.0])],
        vec![real(&[1.0, -1.0, 0.0]), real(&[0.0, 0.0, 1.0])],
        vec![real(&[0.0, 0.0, 1.0]), real(&[0.0, 1.0, -1.0])],
        vec![real(&[0.0, 1.0, -1.0]), real(&[1.0, 0.0, 0.0])],
        vec![real(&[1.0, 1.0, 1.0]), real(&[1.0, 1.0, 1.0])],
    ]
}

/// The five-state Tiles UPB in 3x3.
pub fn build_tiles_upb() -> Result<ProductBasis> {
    ProductBasis::from_unnormalized(DimVec::bipartite(3, 3)?, tiles_factors(), "tiles")
}

/// `Pi / (D - n)` where `Pi` projects onto the complement of the span of
/// an orthogonal product basis of `n` states.
pub fn bound_entangled_from_oupb(oupb: &ProductBasis) -> Result<DensityOperator> {
    if !oupb.orthogonal() {
        return Err(Error::NotOrthogonal(
            "bound entangled construction needs an orthogonal product basis".into(),
        ));
    }
    let dims = oupb.dims().clone();
    let total = dims.total();
    let mut pi = ComplexMatrix::identity(total);
    for v in oupb.vectors() {
        pi = &pi - &ComplexMatrix::projector(&v);
    }
    let rank = total - oupb.len();
    DensityOperator::new(dims, pi.scale_real(1.0 / rank as f64))
}

/// Everything built around the 20-state UPB in 5x5.
#[derive(Clone, Debug)]
pub struct CupbBundle {
    pub cupb: ProductBasis,
    /// Uniform mixture of the 20 product projectors.
    pub rho1: DensityOperator,
    /// The Tiles bound entangled state inside `S1`.
    pub rho2: DensityOperator,
    /// `|chi><chi|`.
    pub rho3: DensityOperator,
    /// Projector onto the support of `rho2`.
    pub p_prime: ComplexMatrix,
    /// `(|33> - |44>)/sqrt 2`.
    pub chi: PureState,
    /// `S1 = {0,1,2}x{0,1,2}`, `S2 = {3,4}x{0,1,2}`, `S3 = {0,1,2}x{3,4}`,
    /// `S4 = {3,4}x{3,4}`.
    pub blocks: [Subspace; 4],
}

impl CupbBundle {
    /// Projector onto the orthogonal complement of the cUPB span,
    /// `P' + |chi><chi|`.
    pub fn complement_projector(&self) -> ComplexMatrix {
        &self.p_prime + &self.chi.projector()
    }
}

fn block(dims: &DimVec, rows: &[usize], cols: &[usize]) -> Result<Subspace> {
    let d2 = dims.get(1);
    let vecs: Vec<Vec<C64>> = rows
        .iter()
        .flat_map(|&i| cols.iter().map(move |&j| basis_vector(25, i * d2 + j)))
        .collect();
    Subspace::from_orthonormal(dims.clone(), ComplexMatrix::from_columns(&vecs)?)
}

fn pad5(v: &[C64]) -> Vec<C64> {
    let mut out = v.to_vec();
    out.resize(5, C64::new(0.0, 0.0));
    out
}

pub fn build_cupb_bundle() -> Result<CupbBundle> {
    let dims = DimVec::bipartite(5, 5)?;
    let e = |i: usize| basis_vector(5, i);
    let low = [0, 1, 2];
    let high = [3, 4];

    let mut factors: Vec<Vec<Vec<C64>>> = tiles_factors()
        .into_iter()
        .map(|f| f.iter().map(|v| pad5(v)).collect())
        .collect();
    for &i in &high {
        for &j in &low {
            factors.push(vec![e(i), e(j)]);
        }
    }
    for &i in &low {
        for &j in &high {
            factors.push(vec![e(i), e(j)]);
        }
    }
    let plus = real(&[0.0, 0.0, 0.0, 1.0, 1.0]);
    factors.push(vec![plus.clone(), plus]);
    factors.push(vec![e(3), e(4)]);
    factors.push(vec![e(4), e(3)]);
    let cupb = ProductBasis::from_unnormalized(dims.clone(), factors, "cupb")?;

    let rho1 = DensityOperator::uniform_mixture(dims.clone(), &cupb.vectors())?;

    let blocks = [
        block(&dims, &low, &low)?,
        block(&dims, &high, &low)?,
        block(&dims, &low, &high)?,
        block(&dims, &high, &high)?,
    ];
    let mut p_prime = blocks[0].projector();
    for v in cupb.vectors().iter().take(5) {
        p_prime = &p_prime - &ComplexMatrix::projector(v);
    }
    let rho2 = DensityOperator::new(dims.clone(), p_prime.scale_real(0.25))?;

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut chi = vec![C64::new(0.0, 0.0); 25];
    chi[3 * 5 + 3] = C64::new(h, 0.0);
    chi[4 * 5 + 4] = C64::new(-h, 0.0);
    let chi = PureState::new(dims, chi)?;

    Ok(CupbBundle {
        rho3: chi.density(),
        cupb,
        rho1,
        rho2,
        p_prime,
        chi,
        blocks,
    })
}

/// Three-qubit orthogonal UPB and the two states built on it.
#[derive(Clone, Debug)]
pub struct ThreeQubitBundle {
    pub oupb: ProductBasis,
    /// Uniform mixture of the four product projectors.
    pub sigma1: DensityOperator,
    /// Normalized projector onto the complement of the UPB span.
    pub sigma2: DensityOperator,
}

/// The Shifts UPB `{|000>, |1,+,->, |+,-,1>, |-,1,+>}`.
pub fn build_shifts_upb() -> Result<ProductBasis> {
    let zero = real(&[1.0, 0.0]);
    let one = real(&[0.0, 1.0]);
    let plus = real(&[1.0, 1.0]);
    let minus = real(&[1.0, -1.0]);
    let factors = vec![
        vec![zero.clone(), zero.clone(), zero],
        vec![one.clone(), plus.clone(), minus.clone()],
        vec![plus.clone(), minus.clone(), one.clone()],
        vec![minus, one, plus],
    ];
    ProductBasis::from_unnormalized(DimVec::new(vec![2, 2, 2])?, factors, "shifts")
}

pub fn build_three_qubit_bundle() -> Result<ThreeQubitBundle> {
    let oupb = build_shifts_upb()?;
    let sigma1 = DensityOperator::uniform_mixture(oupb.dims().clone(), &oupb.vectors())?;
    let sigma2 = bound_entangled_from_oupb(&oupb)?;
    Ok(ThreeQubitBundle {
        oupb,
        sigma1,
        sigma2,
    })
}

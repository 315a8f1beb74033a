//! Verifiers producing machine-readable certificates.

mod partition;
mod seesaw;

pub use partition::{orthogonal_product_search, PartitionSearch};
pub use seesaw::{
    seesaw_max_product_overlap, SeesawOptions, SeesawResult, CONVERGENCE_TOL, MONOTONICITY_SLACK,
};

use serde::{Deserialize, Serialize};

use crate::constructions::{CupbBundle, ProductBasis};
use crate::error::{Error, Result};
use crate::linalg::{
    self, hermitian_eig, inner, kron, ComplexMatrix, DimVec, C64, RANK_TOL,
};
use crate::random::{haar_vector, stream_rng};
use crate::states::{
    min_pt_eigenvalue, schmidt_of_vector, support_of, Bipartition, DensityOperator, PureState,
    Subspace, PPT_TOL, SCHMIDT_TOL,
};

/// Seesaw overlaps at or below this certify an entangled subspace.
pub const ENTANGLED_THRESHOLD: f64 = 1.0 - 1e-4;
/// Eigenvalues above this count towards a support in the necessary-condition
/// check.
pub const SUPPORT_TOL: f64 = 1e-10;
const SPAN_TOL: f64 = 1e-9;
const STRUCTURAL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Proven,
    NumericalEvidence,
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CertificateKind {
    ProductBasis,
    Upb,
    EntangledSubspace,
    PptUncompletable,
    PptNecessary,
    PptPovm,
    PptPovmInfeasible,
    ManyCopy,
    NptSubspace,
    PptCheck,
}

/// One numeric test. `tolerance` is the threshold `value` was compared
/// with; the comparison itself is implied by the constructor used.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Set for checks backed by a heuristic search rather than an exact
    /// argument.
    pub heuristic: bool,
}

impl Check {
    /// Passes when `value < tol`.
    pub fn less_than(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self::raw(name, value, tol, value < tol)
    }

    /// Passes when `value <= tol`.
    pub fn at_most(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self::raw(name, value, tol, value <= tol)
    }

    /// Passes when `value >= bound`.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::raw(name, value, bound, value >= bound)
    }

    /// Passes when `value > bound`.
    pub fn greater_than(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::raw(name, value, bound, value > bound)
    }

    /// Passes when `|value - target| <= tol`.
    pub fn close_to(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Self::raw(name, value, tol, (value - target).abs() <= tol)
    }

    pub fn raw(name: impl Into<String>, value: f64, tolerance: f64, pass: bool) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: pass && value.is_finite(),
            heuristic: false,
        }
    }

    pub fn heuristic(mut self) -> Self {
        self.heuristic = true;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub status: Status,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn new(kind: CertificateKind) -> Self {
        Self {
            kind,
            status: Status::Undetermined,
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// A non-heuristic check failed.
    pub fn hard_failure(&self) -> bool {
        self.checks.iter().any(|c| !c.pass && !c.heuristic)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Sets the status to `on_success` when every check passed and to
    /// `UNDETERMINED` otherwise.
    pub fn conclude(mut self, on_success: Status) -> Self {
        self.status = if self.all_pass() {
            on_success
        } else {
            Status::Undetermined
        };
        self
    }

    /// 0 proven, 2 numerical evidence, 3 undetermined, 4 failed check.
    pub fn exit_code(&self) -> i32 {
        if self.hard_failure() {
            return 4;
        }
        match self.status {
            Status::Proven => 0,
            Status::NumericalEvidence => 2,
            Status::Undetermined => 3,
        }
    }
}

/// Largest second Schmidt coefficient of `v` over every bipartition.
fn max_second_schmidt(v: &[C64], dims: &DimVec) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for cut in Bipartition::all(dims.parties()) {
        worst = worst.max(schmidt_of_vector(v, dims, &cut)?.second_coefficient());
    }
    Ok(worst)
}

fn max_pairwise_overlap(vectors: &[Vec<C64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            worst = worst.max(inner(&vectors[i], &vectors[j]).norm());
        }
    }
    worst
}

/// Checks that `basis` consists of independent product states spanning
/// `expected_span`, and that its orthogonality claim is accurate.
pub fn verify_product_basis(basis: &ProductBasis, expected_span: &Subspace) -> Result<Certificate> {
    if basis.dims() != expected_span.dims() {
        return Err(Error::DimensionMismatch(format!(
            "basis of dims {} against a subspace of dims {}",
            basis.dims(),
            expected_span.dims()
        )));
    }
    let mut cert = Certificate::new(CertificateKind::ProductBasis);
    let vectors = basis.vectors();
    let n = vectors.len();

    let mut second: f64 = 0.0;
    for v in &vectors {
        second = second.max(max_second_schmidt(v, basis.dims())?);
    }
    cert.push(Check::less_than("max_second_schmidt_coefficient", second, SCHMIDT_TOL));

    let rank = linalg::rank(&ComplexMatrix::from_columns(&vectors)?, RANK_TOL);
    cert.push(Check::at_most("stacked_rank_deficit", (n - rank) as f64, 0.0));

    let gap = basis.span()?.projector_distance(expected_span);
    cert.push(Check::less_than("span_projector_gap", gap, SPAN_TOL));

    let overlap = max_pairwise_overlap(&vectors);
    let measured_orthogonal = overlap < 1e-12;
    cert.push(Check::raw(
        "orthogonality_claim_max_overlap",
        overlap,
        1e-12,
        measured_orthogonal == basis.orthogonal(),
    ));

    cert.note(format!(
        "{n} states in {}, stacked rank {rank}, claimed complement dimension {}, {}",
        basis.dims(),
        basis.claimed_complement_dim(),
        if basis.orthogonal() { "orthogonal" } else { "nonorthogonal" }
    ));
    Ok(cert.conclude(Status::Proven))
}

fn span_precondition(basis: &ProductBasis) -> Result<Subspace> {
    if basis.claimed_complement_dim() == 0 {
        return Err(Error::Precondition(format!(
            "{} states span all of {}; not a UPB",
            basis.len(),
            basis.dims()
        )));
    }
    let span = basis.span()?;
    let pre = verify_product_basis(basis, &span)?;
    if !pre.all_pass() {
        let failing: Vec<&str> = pre
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        return Err(Error::Precondition(format!(
            "not a valid product basis (failing: {})",
            failing.join(", ")
        )));
    }
    Ok(span)
}

/// Unextendibility: the complement of the span contains no product state.
///
/// Bipartite bases use an exact argument for one-dimensional complements
/// and the seesaw search otherwise. With three or more parties the exact
/// assignment search of [`orthogonal_product_search`] decides.
pub fn verify_upb(basis: &ProductBasis, opts: &SeesawOptions) -> Result<Certificate> {
    let span = span_precondition(basis)?;
    let complement = span.complement()?;
    let mut cert = Certificate::new(CertificateKind::Upb);
    cert.push(Check::at_most(
        "complement_dimension_gap",
        (complement.dim() as f64 - basis.claimed_complement_dim() as f64).abs(),
        0.0,
    ));
    cert.note(format!("complement dimension {}", complement.dim()));

    if basis.dims().parties() >= 3 {
        let search = orthogonal_product_search(basis)?;
        cert.push(Check::at_most(
            "orthogonal_product_assignments",
            if search.unextendible() { 0.0 } else { 1.0 },
            0.0,
        ));
        cert.note(format!(
            "exhaustive party assignment search visited {} partial assignments",
            search.visited
        ));
        return Ok(cert.conclude(Status::Proven));
    }

    let cut = Bipartition::first_vs_rest(2)?;
    if complement.dim() == 1 {
        let v = complement.basis().column(0);
        let s = schmidt_of_vector(&v, basis.dims(), &cut)?;
        cert.push(Check::greater_than(
            "complement_second_schmidt_coefficient",
            s.second_coefficient(),
            SCHMIDT_TOL,
        ));
        cert.note(format!("complement is spanned by a state of Schmidt rank {}", s.rank));
        return Ok(cert.conclude(Status::Proven));
    }

    let r = seesaw_max_product_overlap(&complement, &cut, opts)?;
    push_seesaw_checks(&mut cert, &r);
    cert.note(format!(
        "seesaw: {} restarts, seed {}, best restart {} after {} iterations",
        r.restarts, opts.seed, r.best_restart, r.iterations_used
    ));
    Ok(cert.conclude(Status::NumericalEvidence))
}

fn push_seesaw_checks(cert: &mut Certificate, r: &SeesawResult) {
    cert.push(Check::at_most("seesaw_best_product_overlap", r.best_overlap, ENTANGLED_THRESHOLD).heuristic());
    cert.push(
        Check::at_most(
            "seesaw_nonmonotone_restarts",
            if r.monotone { 0.0 } else { 1.0 },
            0.0,
        )
        .heuristic(),
    );
}

/// Seesaw certificate that `sub` holds no product state across `cut`.
pub fn verify_entangled_subspace(
    sub: &Subspace,
    cut: &Bipartition,
    opts: &SeesawOptions,
) -> Result<Certificate> {
    let mut cert = Certificate::new(CertificateKind::EntangledSubspace);
    if sub.dim() == 1 {
        let s = schmidt_of_vector(&sub.basis().column(0), sub.dims(), cut)?;
        cert.push(Check::greater_than(
            "second_schmidt_coefficient",
            s.second_coefficient(),
            SCHMIDT_TOL,
        ));
        return Ok(cert.conclude(Status::Proven));
    }
    let r = seesaw_max_product_overlap(sub, cut, opts)?;
    push_seesaw_checks(&mut cert, &r);
    cert.note(format!(
        "{}-dimensional subspace of {}, cut {cut}, {} restarts, seed {}",
        sub.dim(),
        sub.dims(),
        r.restarts,
        opts.seed
    ));
    Ok(cert.conclude(Status::NumericalEvidence))
}

/// Pieces of the local-projection argument for the 5x5 UPB.
#[derive(Clone, Debug)]
pub struct StructuralCheck {
    /// `||(P2 ⊗ I) Pi (P2 ⊗ I) - |chi><chi|||`.
    pub left_gap: f64,
    /// Same with the projection on the second party.
    pub right_gap: f64,
    /// Smallest partial-transpose eigenvalue of `|chi><chi|`.
    pub chi_min_pt: f64,
    pub chi: PureState,
}

/// `P2 = |3><3| + |4><4|` on one party applied to both sides of the
/// complement projector `pi` of the 5x5 UPB.
pub fn structural_projection(pi: &ComplexMatrix) -> Result<StructuralCheck> {
    let dims = DimVec::bipartite(5, 5)?;
    dims.check_total(pi.rows())?;
    let p2 = ComplexMatrix::from_diag(&[0.0, 0.0, 0.0, 1.0, 1.0]);
    let id = ComplexMatrix::identity(5);
    let left = kron(&p2, &id);
    let right = kron(&id, &p2);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut chi = vec![C64::new(0.0, 0.0); 25];
    chi[18] = C64::new(h, 0.0);
    chi[24] = C64::new(-h, 0.0);
    let chi = PureState::new(dims.clone(), chi)?;
    let target = chi.projector();
    let left_gap = left.matmul(pi).matmul(&left).distance(&target);
    let right_gap = right.matmul(pi).matmul(&right).distance(&target);
    let chi_min_pt = min_pt_eigenvalue(&target, &dims, &Bipartition::first_vs_rest(2)?)?;
    Ok(StructuralCheck {
        left_gap,
        right_gap,
        chi_min_pt,
        chi,
    })
}

fn push_structural(cert: &mut Certificate, s: &StructuralCheck, both_sides: bool) {
    cert.push(Check::less_than("projected_complement_gap", s.left_gap, STRUCTURAL_TOL));
    if both_sides {
        cert.push(Check::less_than(
            "projected_complement_gap_second_party",
            s.right_gap,
            STRUCTURAL_TOL,
        ));
    }
    cert.push(Check::close_to("chi_min_pt_eigenvalue", s.chi_min_pt, -0.5, 1e-9));
}

/// Unextendibility of the 20-state UPB, proven rather than sampled.
///
/// A product `|a>|b>` in the complement is mapped by `P2 ⊗ I` into the
/// span of the entangled `chi`, so `P2 a = 0`; likewise `P2 b = 0`. Then
/// `|a>|b>` lies in the `{0,1,2}` block and is orthogonal to the five
/// Tiles states, which the exact assignment search rules out.
pub fn verify_cupb_upb(bundle: &CupbBundle) -> Result<Certificate> {
    let span = span_precondition(&bundle.cupb)?;
    let complement = span.complement()?;
    let mut cert = Certificate::new(CertificateKind::Upb);
    cert.push(Check::at_most(
        "complement_dimension_gap",
        (complement.dim() as f64 - bundle.cupb.claimed_complement_dim() as f64).abs(),
        0.0,
    ));
    let s = structural_projection(&complement.projector())?;
    push_structural(&mut cert, &s, true);

    let low = &bundle.blocks[0];
    let vectors = bundle.cupb.vectors();
    let outside: f64 = vectors[5..].iter().map(|v| low.weight(v)).fold(0.0, f64::max);
    cert.push(Check::less_than("non_tile_weight_in_low_block", outside, 1e-20));

    let tiles = tiles_block(&bundle.cupb)?;
    let search = orthogonal_product_search(&tiles)?;
    cert.push(Check::at_most(
        "tiles_orthogonal_product_assignments",
        if search.unextendible() { 0.0 } else { 1.0 },
        0.0,
    ));
    cert.note(format!(
        "complement dimension {}; local projections confine product states to the Tiles block",
        complement.dim()
    ));
    Ok(cert.conclude(Status::Proven))
}

/// The first five states restricted to the `{0,1,2} x {0,1,2}` block.
fn tiles_block(cupb: &ProductBasis) -> Result<ProductBasis> {
    let mut states = Vec::with_capacity(5);
    for s in cupb.states().iter().take(5) {
        let f = s.factors();
        if f.iter().any(|v| v[3..].iter().any(|z| z.norm() > 0.0)) {
            return Err(Error::Precondition(
                "first five states are not supported on the low block".into(),
            ));
        }
        states.push(crate::states::ProductState::new(
            f.iter().map(|v| v[..3].to_vec()).collect(),
        )?);
    }
    ProductBasis::new(DimVec::bipartite(3, 3)?, states, "tiles block")
}

/// Checks a subspace is PPT uncompletable: a PPT operator with full
/// support on it exists, the complement carries PPT operators, and none of
/// those has full support on the complement.
///
/// The last part is argued structurally for the 5x5 instance: with
/// `P2 = |3><3| + |4><4|`, `(P2 ⊗ I) E (P2 ⊗ I)` is PPT for PPT `E` and is
/// a multiple of the NPT `|chi><chi|` for `E` in the complement, so
/// `<chi|E|chi> = 0`. Other shapes stop at `UNDETERMINED`.
pub fn verify_ppt_uncompletable(
    sub: &Subspace,
    full_support_ppt_witness: &DensityOperator,
    complement_ppt_witness: &DensityOperator,
) -> Result<Certificate> {
    let dims = sub.dims().clone();
    if full_support_ppt_witness.dims() != &dims || complement_ppt_witness.dims() != &dims {
        return Err(Error::DimensionMismatch("witness dims differ from the subspace".into()));
    }
    if dims.parties() != 2 {
        return Err(Error::Precondition("bipartite subspace expected".into()));
    }
    let cut = Bipartition::first_vs_rest(2)?;
    let complement = sub.complement()?;
    let mut cert = Certificate::new(CertificateKind::PptUncompletable);

    let full = full_support_ppt_witness.matrix();
    cert.push(Check::at_least(
        "full_witness_min_pt_eigenvalue",
        min_pt_eigenvalue(full, &dims, &cut)?,
        -PPT_TOL,
    ));
    let full_support = support_of(full, &dims, PPT_TOL)?;
    cert.push(Check::less_than(
        "full_witness_support_gap",
        full_support.projector_distance(sub),
        SPAN_TOL,
    ));

    let part = complement_ppt_witness.matrix();
    cert.push(Check::at_least(
        "complement_witness_min_pt_eigenvalue",
        min_pt_eigenvalue(part, &dims, &cut)?,
        -PPT_TOL,
    ));
    let part_support = support_of(part, &dims, PPT_TOL)?;
    let leak = sub.projector().matmul(&part_support.projector()).frobenius_norm();
    cert.push(Check::less_than("complement_witness_weight_on_subspace", leak, SPAN_TOL));
    cert.push(Check::at_least(
        "complement_witness_missing_dimensions",
        complement.dim() as f64 - part_support.dim() as f64,
        1.0,
    ));

    if dims.as_slice() == [5, 5] {
        let s = structural_projection(&complement.projector())?;
        push_structural(&mut cert, &s, false);
        cert.note(
            "local projection onto {|3>,|4>} maps every PPT operator in the complement to a PPT \
             multiple of the NPT |chi><chi|, so none has weight on chi",
        );
        return Ok(cert.conclude(Status::Proven));
    }
    cert.note(format!(
        "no structural argument for dims {dims}; full-support exclusion not established"
    ));
    Ok(cert.conclude(Status::Undetermined))
}

/// Necessary condition for distinguishing `{sigma1, sigma2}` across every
/// bipartition with PPT measurements: the support projectors `pi_1`,
/// `pi_2` form a measurement with `Tr(sigma_i pi_j) = delta_ij`, and both
/// must be PPT across every cut.
pub fn check_ppt_necessary(sigma1: &DensityOperator, sigma2: &DensityOperator) -> Result<Certificate> {
    let dims = sigma1.dims().clone();
    if sigma2.dims() != &dims {
        return Err(Error::DimensionMismatch("states of different dims".into()));
    }
    let s1 = support_of(sigma1.matrix(), &dims, SUPPORT_TOL)?;
    let s2 = support_of(sigma2.matrix(), &dims, SUPPORT_TOL)?;
    if s1.dim() + s2.dim() != dims.total() {
        return Err(Error::Precondition(format!(
            "support dimensions {} + {} do not add up to {}",
            s1.dim(),
            s2.dim(),
            dims.total()
        )));
    }
    let pis = [s1.projector(), s2.projector()];
    let sigmas = [sigma1.matrix(), sigma2.matrix()];
    let mut cert = Certificate::new(CertificateKind::PptNecessary);
    let sum = &pis[0] + &pis[1];
    cert.push(Check::less_than(
        "completeness_gap",
        sum.distance(&ComplexMatrix::identity(dims.total())),
        1e-10,
    ));
    let mut worst: f64 = 0.0;
    for (i, s) in sigmas.iter().enumerate() {
        for (j, p) in pis.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((s.trace_product(p).re - target).abs());
        }
    }
    cert.push(Check::less_than("trace_sigma_pi_delta_gap", worst, 1e-10));
    for cut in Bipartition::all(dims.parties()) {
        for (j, p) in pis.iter().enumerate() {
            cert.push(Check::at_least(
                format!("min_pt_eigenvalue pi_{} [{cut}]", j + 1),
                min_pt_eigenvalue(p, &dims, &cut)?,
                -1e-10,
            ));
        }
    }
    Ok(cert.conclude(Status::Proven))
}

/// Samples Haar-random states of `sub` and records the least negative
/// smallest partial-transpose eigenvalue.
pub fn sample_npt_subspace(
    sub: &Subspace,
    cut: &Bipartition,
    samples: usize,
    seed: u64,
) -> Result<Certificate> {
    if samples == 0 {
        return Err(Error::Precondition("at least one sample needed".into()));
    }
    let mut rng = stream_rng(seed, 0);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let c = haar_vector(&mut rng, sub.dim());
        let v = sub.basis().mul_vec(&c);
        let m = min_pt_eigenvalue(&ComplexMatrix::projector(&v), sub.dims(), cut)?;
        worst = worst.max(m);
    }
    let mut cert = Certificate::new(CertificateKind::NptSubspace);
    cert.push(Check::less_than("max_sampled_min_pt_eigenvalue", worst, -1e-3).heuristic());
    cert.note(format!("{samples} Haar-random states, seed {seed}, cut {cut}"));
    Ok(cert.conclude(Status::NumericalEvidence))
}

/// PPT test of a single operator, as a certificate.
pub fn ppt_certificate(op: &ComplexMatrix, dims: &DimVec, cut: &Bipartition, tol: f64) -> Result<Certificate> {
    let eig = hermitian_eig(op)?;
    let mut cert = Certificate::new(CertificateKind::PptCheck);
    cert.push(Check::at_least("min_eigenvalue", eig.min(), -tol));
    cert.push(Check::at_least("min_pt_eigenvalue", min_pt_eigenvalue(op, dims, cut)?, -tol));
    cert.note(format!("cut {cut}"));
    Ok(cert.conclude(Status::Proven))
}

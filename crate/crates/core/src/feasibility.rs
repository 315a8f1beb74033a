//! Perfect discrimination of two orthogonal states by PPT measurements.
//!
//! The search runs Dykstra's alternating projections over three closed
//! convex sets for the effect `E` that should fire on the target:
//!
//! * `H = {Tr(rho_target E) = 1}`
//! * `A = {E = Pi E Pi, 0 <= E <= Pi}` with `Pi` the projector onto the
//!   complement of the other state's support
//! * `B = {PT(E) >= 0}`
//!
//! `A` encodes `E >= 0`, `I - E >= 0` and `Tr(rho_other E) = 0` at once.

use serde::Serialize;

use crate::constructions::CupbBundle;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, partial_transpose, ComplexMatrix, DimVec};
use crate::states::{
    min_pt_eigenvalue, support, Bipartition, DensityOperator, ORTHOGONALITY_TOL, PSD_TOL,
};
use crate::verify::{structural_projection, Certificate, CertificateKind, Check, Status};

/// Best objectives at or below this count as evidence of infeasibility.
pub const INFEASIBLE_THRESHOLD: f64 = 1.0 - 1e-3;
/// Iterates further than this from `A` are not used for the objective.
const OBJECTIVE_ADMISSIBLE: f64 = 1e-6;
/// Witness acceptance tolerance.
pub const WITNESS_TOL: f64 = 1e-8;
const SNAP_TOL: f64 = 1e-6;

/// Two-outcome measurement `{E, I - E}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PovmPair {
    pub element_e: ComplexMatrix,
    pub element_complement: ComplexMatrix,
}

impl PovmPair {
    pub fn from_effect(e: ComplexMatrix) -> Result<Self> {
        if !e.is_square() {
            return Err(Error::DimensionMismatch("effect must be square".into()));
        }
        let complement = &ComplexMatrix::identity(e.rows()) - &e;
        Ok(Self {
            element_e: e,
            element_complement: complement,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PovmValidation {
    /// Both elements Hermitian and positive semidefinite, summing to `I`.
    pub valid: bool,
    /// Both elements PPT across the cut.
    pub ppt: bool,
    pub hermiticity_defect: f64,
    pub min_eigenvalue_e: f64,
    pub min_eigenvalue_complement: f64,
    pub min_pt_eigenvalue_e: f64,
    pub min_pt_eigenvalue_complement: f64,
    pub completeness_gap: f64,
    pub tolerance: f64,
}

/// [`validate_povm_with_tol`] at `1e-9`.
pub fn validate_povm(pair: &PovmPair, dims: &DimVec, cut: &Bipartition) -> Result<PovmValidation> {
    validate_povm_with_tol(pair, dims, cut, PSD_TOL)
}

pub fn validate_povm_with_tol(
    pair: &PovmPair,
    dims: &DimVec,
    cut: &Bipartition,
    tol: f64,
) -> Result<PovmValidation> {
    let (e, f) = (&pair.element_e, &pair.element_complement);
    if !e.is_square() || e.rows() != f.rows() || f.cols() != e.cols() {
        return Err(Error::DimensionMismatch("POVM elements of different shapes".into()));
    }
    dims.check_total(e.rows())?;
    cut.reduced_dims(dims)?;
    let defect = e.hermiticity_defect().max(f.hermiticity_defect());
    let completeness_gap = (e + f).distance(&ComplexMatrix::identity(e.rows()));
    if defect > 1e-10 {
        return Ok(PovmValidation {
            valid: false,
            ppt: false,
            hermiticity_defect: defect,
            min_eigenvalue_e: f64::NAN,
            min_eigenvalue_complement: f64::NAN,
            min_pt_eigenvalue_e: f64::NAN,
            min_pt_eigenvalue_complement: f64::NAN,
            completeness_gap,
            tolerance: tol,
        });
    }
    let min_e = hermitian_eig(e)?.min();
    let min_f = hermitian_eig(f)?.min();
    let pt_e = min_pt_eigenvalue(e, dims, cut)?;
    let pt_f = min_pt_eigenvalue(f, dims, cut)?;
    Ok(PovmValidation {
        valid: min_e >= -tol && min_f >= -tol && completeness_gap <= 1e-12_f64.max(tol * 1e-3),
        ppt: pt_e >= -tol && pt_f >= -tol,
        hermiticity_defect: defect,
        min_eigenvalue_e: min_e,
        min_eigenvalue_complement: min_f,
        min_pt_eigenvalue_e: pt_e,
        min_pt_eigenvalue_complement: pt_f,
        completeness_gap,
        tolerance: tol,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FeasibilityStatus {
    Feasible,
    InfeasibleEvidence,
    Undetermined,
}

#[derive(Clone, Debug)]
pub struct FeasibilityResult {
    pub status: FeasibilityStatus,
    pub witness: Option<PovmPair>,
    /// Largest `Tr(rho_target E)` over admissible iterates.
    pub best_objective: f64,
    /// `Tr(rho_target P_A(x))` for the last iterate, admissible or not.
    pub final_objective: f64,
    /// Largest constraint violation after each cycle.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    /// Validation of the witness, when one was found.
    pub validation: Option<PovmValidation>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeasibilityOptions {
    /// Maximum number of Dykstra cycles.
    pub budget: usize,
    /// Residual below which an iterate is rounded and validated.
    pub tol: f64,
}

impl Default for FeasibilityOptions {
    fn default() -> Self {
        Self {
            budget: 10_000,
            tol: 1e-9,
        }
    }
}

struct Sets<'a> {
    target: &'a ComplexMatrix,
    target_norm_sq: f64,
    /// Orthonormal basis of the allowed subspace, `D x k`.
    allowed: ComplexMatrix,
    dims: &'a DimVec,
    side_b: Vec<usize>,
}

impl Sets<'_> {
    fn project_h(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let shift = (1.0 - self.target.trace_product(x).re) / self.target_norm_sq;
        x + &self.target.scale_real(shift)
    }

    fn dist_h(&self, x: &ComplexMatrix) -> f64 {
        (1.0 - self.target.trace_product(x).re).abs() / self.target_norm_sq.sqrt()
    }

    fn project_a(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let b = &self.allowed;
        let small = x.compress(b).hermitian_part();
        let clipped = hermitian_eig(&small)
            .expect("Hermitian by construction")
            .reconstruct_with(|l| l.clamp(0.0, 1.0));
        b.matmul(&clipped).matmul(&b.adjoint())
    }

    fn project_b(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let pt = partial_transpose(&x.hermitian_part(), self.dims, &self.side_b)
            .expect("dims checked on entry");
        let clipped = hermitian_eig(&pt)
            .expect("Hermitian by construction")
            .reconstruct_with(|l| l.max(0.0));
        partial_transpose(&clipped, self.dims, &self.side_b).expect("dims checked on entry")
    }
}

/// Searches for a PPT effect `E` with `Tr(rho_other E) = 0` and
/// `Tr(rho_target E) = 1`.
///
/// Each cycle projects onto `H`, `A`, `B` in turn with Dykstra
/// corrections. The residual of a cycle is the larger of the distances of
/// the end-of-cycle iterate `x` (which lies in `B`) to `A` and to `H`.
/// Once it falls below `tol`, `P_A(x)` is rounded and checked from scratch;
/// a passing witness gives `FEASIBLE`. When the budget runs out, the best
/// `Tr(rho_target P_A(x))` over iterates within `1e-6` of `A` decides
/// between `INFEASIBLE_EVIDENCE` and `UNDETERMINED`.
pub fn ppt_povm_two_state(
    rho_target: &DensityOperator,
    rho_other: &DensityOperator,
    cut: &Bipartition,
    opts: &FeasibilityOptions,
) -> Result<FeasibilityResult> {
    let dims = rho_target.dims();
    if rho_other.dims() != dims {
        return Err(Error::DimensionMismatch("states of different dims".into()));
    }
    cut.reduced_dims(dims)?;
    let overlap = rho_target.overlap(rho_other);
    if overlap > ORTHOGONALITY_TOL {
        return Err(Error::NotOrthogonal(format!(
            "Tr(rho_target rho_other) = {overlap:.3e}"
        )));
    }
    let allowed = support(rho_other, PSD_TOL)?.complement()?;
    let target = rho_target.matrix();
    let sets = Sets {
        target,
        target_norm_sq: target.trace_product(target).re,
        allowed: allowed.basis().clone(),
        dims,
        side_b: cut.side_b(),
    };

    let n = dims.total();
    let mut x = ComplexMatrix::zeros(n, n);
    let mut p_h = ComplexMatrix::zeros(n, n);
    let mut p_a = ComplexMatrix::zeros(n, n);
    let mut p_b = ComplexMatrix::zeros(n, n);
    let mut residuals = Vec::new();
    let mut best_objective: f64 = 0.0;
    let mut final_objective: f64 = 0.0;

    for cycle in 1..=opts.budget {
        let y = sets.project_h(&(&x + &p_h));
        p_h = &(&x + &p_h) - &y;
        x = y;
        let y = sets.project_a(&(&x + &p_a));
        p_a = &(&x + &p_a) - &y;
        x = y;
        let y = sets.project_b(&(&x + &p_b));
        p_b = &(&x + &p_b) - &y;
        x = y;

        let in_a = sets.project_a(&x);
        let dist_a = x.distance(&in_a);
        let residual = dist_a.max(sets.dist_h(&x));
        residuals.push(residual);
        final_objective = target.trace_product(&in_a).re;
        if dist_a <= OBJECTIVE_ADMISSIBLE {
            best_objective = best_objective.max(target.trace_product(&in_a).re);
        }

        if residual < opts.tol {
            let e = round_effect(&in_a);
            let pair = PovmPair::from_effect(e)?;
            let validation = validate_povm_with_tol(&pair, dims, cut, WITNESS_TOL)?;
            let hit = target.trace_product(&pair.element_e).re;
            let miss = rho_other.matrix().trace_product(&pair.element_e).re;
            if validation.valid
                && validation.ppt
                && hit >= 1.0 - WITNESS_TOL
                && miss.abs() <= WITNESS_TOL
            {
                return Ok(FeasibilityResult {
                    status: FeasibilityStatus::Feasible,
                    witness: Some(pair),
                    best_objective: best_objective.max(hit),
                    final_objective,
                    residuals,
                    iterations: cycle,
                    validation: Some(validation),
                });
            }
        }
    }

    let status = if best_objective <= INFEASIBLE_THRESHOLD {
        FeasibilityStatus::InfeasibleEvidence
    } else {
        FeasibilityStatus::Undetermined
    };
    Ok(FeasibilityResult {
        status,
        witness: None,
        best_objective,
        final_objective,
        iterations: residuals.len(),
        residuals,
        validation: None,
    })
}

/// Snaps eigenvalues within `1e-6` of 0 or 1.
fn round_effect(e: &ComplexMatrix) -> ComplexMatrix {
    hermitian_eig(&e.hermitian_part())
        .expect("Hermitian by construction")
        .reconstruct_with(|l| {
            if l.abs() < SNAP_TOL {
                0.0
            } else if (l - 1.0).abs() < SNAP_TOL {
                1.0
            } else {
                l
            }
        })
}

/// Certificate for a solver run. A validated witness proves feasibility;
/// infeasibility from the solver is only evidence.
pub fn feasibility_certificate(
    result: &FeasibilityResult,
    rho_target: &DensityOperator,
    rho_other: &DensityOperator,
) -> Certificate {
    match (&result.witness, &result.validation) {
        (Some(pair), Some(v)) => {
            let mut cert = Certificate::new(CertificateKind::PptPovm);
            cert.push(Check::at_least("witness_min_eigenvalue", v.min_eigenvalue_e, -WITNESS_TOL));
            cert.push(Check::at_least(
                "witness_complement_min_eigenvalue",
                v.min_eigenvalue_complement,
                -WITNESS_TOL,
            ));
            cert.push(Check::at_least("witness_min_pt_eigenvalue", v.min_pt_eigenvalue_e, -WITNESS_TOL));
            cert.push(Check::at_least(
                "witness_complement_min_pt_eigenvalue",
                v.min_pt_eigenvalue_complement,
                -WITNESS_TOL,
            ));
            cert.push(Check::at_most("completeness_gap", v.completeness_gap, 1e-12));
            cert.push(Check::at_least(
                "target_detection",
                rho_target.matrix().trace_product(&pair.element_e).re,
                1.0 - WITNESS_TOL,
            ));
            cert.push(Check::at_most(
                "other_false_alarm",
                rho_other.matrix().trace_product(&pair.element_e).re.abs(),
                WITNESS_TOL,
            ));
            cert.note(format!("witness found after {} cycles", result.iterations));
            cert.conclude(Status::Proven)
        }
        _ => {
            let mut cert = Certificate::new(CertificateKind::PptPovmInfeasible);
            cert.push(
                Check::at_most("best_objective", result.best_objective, INFEASIBLE_THRESHOLD)
                    .heuristic(),
            );
            cert.note(format!(
                "no witness within {} cycles; final residual {:.3e}",
                result.iterations,
                result.residuals.last().copied().unwrap_or(f64::NAN)
            ));
            cert.conclude(Status::NumericalEvidence)
        }
    }
}

/// Exact infeasibility of detecting `rho3` perfectly against `rho1`.
///
/// An effect with `Tr(rho1 E) = 0` lives in the five-dimensional
/// complement of the UPB span; detecting `rho3 = |chi><chi|` perfectly
/// needs `<chi|E|chi> = 1`. The local projection `P2 ⊗ I` maps the
/// complement projector to `|chi><chi|`, so it maps any PPT `E` in the
/// complement to `<chi|E|chi> |chi><chi|`, which must be PPT while
/// `|chi><chi|` is not. Hence `<chi|E|chi> = 0`.
pub fn structural_infeasibility_cupb(bundle: &CupbBundle) -> Result<Certificate> {
    let overlap = bundle.rho1.overlap(&bundle.rho3);
    if overlap > ORTHOGONALITY_TOL {
        return Err(Error::Precondition(format!(
            "rho1 and rho3 overlap: {overlap:.3e}"
        )));
    }
    let mut cert = Certificate::new(CertificateKind::PptPovmInfeasible);
    let allowed = support(&bundle.rho1, PSD_TOL)?.complement()?;
    cert.push(Check::at_most(
        "allowed_subspace_dimension_gap",
        (allowed.dim() as f64 - 5.0).abs(),
        0.0,
    ));
    let pi = allowed.projector();
    cert.push(Check::less_than(
        "allowed_projector_vs_p_prime_plus_chi",
        pi.distance(&bundle.complement_projector()),
        1e-10,
    ));
    cert.push(Check::less_than(
        "rho3_vs_chi_projector",
        bundle.rho3.matrix().distance(&bundle.chi.projector()),
        1e-12,
    ));
    let s = structural_projection(&pi)?;
    cert.push(Check::less_than("projected_complement_gap", s.left_gap, 1e-10));
    cert.push(Check::close_to("chi_min_pt_eigenvalue", s.chi_min_pt, -0.5, 1e-9));
    cert.note("every PPT effect orthogonal to rho1 has <chi|E|chi> = 0; such an operator does not exist");
    Ok(cert.conclude(Status::Proven))
}

/// Adds the solver's verdict on the same pair as a heuristic agreement
/// check.
pub fn add_solver_agreement(cert: &mut Certificate, result: &FeasibilityResult) {
    let agrees = result.status != FeasibilityStatus::Feasible;
    cert.push(Check::raw("solver_best_objective", result.best_objective, INFEASIBLE_THRESHOLD, agrees).heuristic());
    if !agrees {
        cert.status = Status::Undetermined;
        cert.note("solver found a witness that the structural argument rules out");
    } else if result.status == FeasibilityStatus::InfeasibleEvidence {
        cert.note(format!(
            "solver agrees: INFEASIBLE_EVIDENCE after {} cycles",
            result.iterations
        ));
    }
}

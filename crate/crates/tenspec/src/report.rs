//! Audit reports: named checks with pass/fail/inconclusive status, margins,
//! and tolerances, bundled into a serializable report.
//!
//! Reports are deterministic: the same input tensor and seed produce
//! byte-identical serialized output.

use crate::ensemble;
use crate::entropy;
use crate::error::{Result, TenspecError};
use crate::norm;
use crate::perron::{self, SolverOptions};
use crate::structure;
use crate::tensor::{DenseTensor, SparseSupportTensor};
use crate::tropical;
use rand::Rng;
use serde::Serialize;

/// Outcome of a single check. `Inconclusive` is used when a one-sided
/// numerical bound cannot settle the comparison or a precondition is absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

/// One audited inequality or identity.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub description: String,
    /// Classical name of the result being exercised.
    pub reference: String,
    pub status: CheckStatus,
    /// Signed slack: nonnegative means the check held with room to spare.
    pub margin: f64,
    pub tolerance: f64,
}

/// A full audit run over one input tensor.
#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub suite: String,
    pub seed: u64,
    pub version: String,
    pub input_digest: String,
    pub records: Vec<CheckRecord>,
    pub passed: bool,
}

/// FNV-1a over the shape and raw entry bits; stable across runs.
pub fn input_digest(t: &DenseTensor) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |b: u8| {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    };
    for &dim in t.shape().dims() {
        for b in (dim as u64).to_le_bytes() {
            eat(b);
        }
    }
    for v in t.values() {
        for b in v.to_bits().to_le_bytes() {
            eat(b);
        }
    }
    format!("{h:016x}")
}

fn rec(
    id: &str,
    description: &str,
    reference: &str,
    status: CheckStatus,
    margin: f64,
    tolerance: f64,
) -> CheckRecord {
    CheckRecord {
        id: id.into(),
        description: description.into(),
        reference: reference.into(),
        status,
        margin,
        tolerance,
    }
}

fn pass_if(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

fn skip(id: &str, description: &str, reference: &str, why_tol: f64) -> CheckRecord {
    rec(id, description, reference, CheckStatus::Inconclusive, 0.0, why_tol)
}

fn structure_records(t: &DenseTensor, seed: u64) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let (n, d) = t.equi()?;
    let mut rng = ensemble::rng_from_seed(seed);
    let mut members = vec![t.clone()];
    for _ in 0..10 {
        members.push(ensemble::random_tensor(n, d, 0.3 + 0.5 * rng.gen::<f64>(), &mut rng));
    }
    let mut implication_ok = true;
    for m in &members {
        let r = structure::analyze(m)?;
        if r.irreducible && !r.weakly_irreducible {
            implication_ok = false;
        }
        if r.indecomposable == Some(true) && !r.weakly_indecomposable {
            implication_ok = false;
        }
    }
    out.push(rec(
        "structure-implications",
        "irreducible implies weakly irreducible; indecomposable implies weakly indecomposable",
        "containment of the structural classes",
        pass_if(implication_ok),
        if implication_ok { 1.0 } else { -1.0 },
        0.0,
    ));
    let scales = ensemble::random_positive_vector(n, 0.5, 2.0, &mut rng);
    let scaled = t.diag_scale(&scales)?;
    let before = structure::analyze(t)?;
    let after = structure::analyze(&scaled)?;
    let invariant = before.weakly_irreducible == after.weakly_irreducible
        && before.irreducible == after.irreducible
        && before.weakly_indecomposable == after.weakly_indecomposable;
    out.push(rec(
        "structure-diagonal-invariance",
        "structural classes are invariant under positive diagonal scaling",
        "support-pattern invariance",
        pass_if(invariant),
        if invariant { 1.0 } else { -1.0 },
        0.0,
    ));
    Ok(out)
}

fn perron_records(t: &DenseTensor, seed: u64) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let (n, d) = t.equi()?;
    let opts = SolverOptions::default();
    let mut rng = ensemble::rng_from_seed(seed ^ 0x9e37_79b9);
    let cert = perron::spectral_radius(t, &opts)?;
    let scale = cert.rho.max(1.0);
    out.push(rec(
        "perron-residual",
        "eigenvector residual of the computed spectral radius",
        "existence of a nonnegative eigenpair",
        pass_if(cert.residual <= 1e-8 * scale),
        1e-8 * scale - cert.residual,
        1e-8,
    ));
    if cert.regularized {
        out.push(skip(
            "perron-cw-gap",
            "two-sided eigenvalue bracket width",
            "max-min characterization of the spectral radius",
            1e-8,
        ));
    } else {
        let gap = cert.cw_upper - cert.cw_lower;
        out.push(rec(
            "perron-cw-gap",
            "two-sided eigenvalue bracket width",
            "max-min characterization of the spectral radius",
            pass_if(gap <= 1e-8 * scale),
            1e-8 * scale - gap,
            1e-8,
        ));
    }
    let rho_scaled = perron::spectral_radius(&t.scale(1.5), &opts)?.rho;
    let hom_gap = (rho_scaled - 1.5 * cert.rho).abs();
    out.push(rec(
        "perron-homogeneity",
        "spectral radius scales linearly with the tensor",
        "homogeneity of the eigenproblem",
        pass_if(hom_gap <= 1e-7 * scale),
        1e-7 * scale - hom_gap,
        1e-7,
    ));
    let partner = ensemble::random_positive_tensor(n, d, &mut rng);
    let (lhs, rhs) = perron::kingman_check(t, &partner, 0.4, &opts)?;
    out.push(rec(
        "perron-log-convexity",
        "spectral radius of a Hadamard interpolation obeys the product bound",
        "log-convexity of the spectral radius in the entries",
        pass_if(lhs <= rhs * (1.0 + 1e-9) + 1e-12),
        rhs - lhs,
        1e-9,
    ));
    if cert.regularized || cert.u.is_none() {
        out.push(skip(
            "perron-perturbation",
            "first-order response of the spectral radius",
            "eigenvalue perturbation formula",
            1e-3,
        ));
        out.push(skip(
            "perron-weighted-ratio",
            "weighted geometric mean of the eigen-ratio",
            "weighted arithmetic-geometric bound at the eigenvector",
            1e-9,
        ));
    } else {
        let dir = ensemble::random_positive_tensor(n, d, &mut rng).scale(0.5);
        let coeff = perron::perturbation_coefficient(t, &dir, &cert)?;
        let eps = 1e-5;
        let bumped = DenseTensor::new(
            t.shape().clone(),
            t.values()
                .iter()
                .zip(dir.values())
                .map(|(&a, &b)| a + eps * b)
                .collect(),
            t.partially_symmetric,
        )?;
        let rho_bumped = perron::spectral_radius(&bumped, &opts)?.rho;
        let fd = (rho_bumped - cert.rho) / eps;
        let gap = (fd - coeff).abs();
        out.push(rec(
            "perron-perturbation",
            "first-order response matches a finite difference",
            "eigenvalue perturbation formula",
            pass_if(gap <= 1e-3 * scale),
            1e-3 * scale - gap,
            1e-3,
        ));
        let y = ensemble::random_positive_vector(n, 0.2, 2.0, &mut rng);
        let fk = perron::friedland_karlin_check(t, &y, &cert, &opts)?;
        out.push(rec(
            "perron-weighted-ratio",
            "weighted geometric mean of the eigen-ratio bounds the shifted radius",
            "weighted geometric-mean lower bound",
            pass_if(fk.margin >= -1e-9 * scale),
            fk.margin,
            1e-9,
        ));
    }
    Ok(out)
}

fn entropy_records(t: &DenseTensor, seed: u64) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let (n, _) = t.equi()?;
    let opts = SolverOptions::default();
    if !structure::weak_irreducibility(t)?.0 {
        for (id, desc, reference) in [
            ("entropy-optimal-balance", "marginal balance of the optimal measure", "stationarity of the occupation measure"),
            ("entropy-optimal-value", "entropy objective at the optimal measure", "variational principle for the log spectral radius"),
            ("entropy-feasible-sweep", "entropy objective over random feasible measures", "variational principle for the log spectral radius"),
            ("entropy-dv-at-optimum", "dual value at the stationary distribution", "dual variational principle"),
            ("entropy-dv-sweep", "dual value over random distributions", "dual variational principle"),
        ] {
            out.push(skip(id, desc, reference, 1e-9));
        }
        return Ok(out);
    }
    let mut rng = ensemble::rng_from_seed(seed ^ 0x51ed_270c);
    let cert = perron::spectral_radius(t, &opts)?;
    let log_rho = cert.rho.ln();
    let optimal = entropy::optimal_tensor_measure(t, &cert)?;
    let bal = optimal.balance_residual();
    out.push(rec(
        "entropy-optimal-balance",
        "marginal balance of the optimal measure",
        "stationarity of the occupation measure",
        pass_if(bal <= 1e-10),
        1e-10 - bal,
        1e-10,
    ));
    let obj = entropy::tensor_entropy_objective(t, &optimal)?;
    let gap = obj.finite().map(|v| (v - log_rho).abs()).unwrap_or(f64::INFINITY);
    out.push(rec(
        "entropy-optimal-value",
        "entropy objective at the optimal measure equals the log spectral radius",
        "variational principle for the log spectral radius",
        pass_if(gap <= 1e-9),
        1e-9 - gap,
        1e-9,
    ));
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..10 {
        let m = entropy::random_feasible_measure(t, &mut rng)?;
        let v = entropy::tensor_entropy_objective(t, &m)?;
        if let Some(v) = v.finite() {
            worst = worst.max(v - log_rho);
        }
    }
    out.push(rec(
        "entropy-feasible-sweep",
        "entropy objective over random feasible measures stays below the optimum",
        "variational principle for the log spectral radius",
        pass_if(worst <= 1e-9),
        1e-9 - worst,
        1e-9,
    ));
    let u = cert.u_ref()?;
    let w = cert.w_ref()?;
    let p_star: Vec<f64> = u.iter().zip(w).map(|(&a, &b)| a * b).collect();
    let dv = entropy::donsker_varadhan(t, &p_star, 1e-10)?;
    let dv_gap = dv
        .value
        .finite()
        .map(|v| (v - log_rho).abs())
        .unwrap_or(f64::INFINITY);
    out.push(rec(
        "entropy-dv-at-optimum",
        "dual value at the stationary distribution equals the log spectral radius",
        "dual variational principle",
        pass_if(dv_gap <= 1e-5),
        1e-5 - dv_gap,
        1e-5,
    ));
    let mut sweep_worst = f64::NEG_INFINITY;
    for _ in 0..5 {
        let p = ensemble::random_simplex_point(n, &mut rng);
        let dv = entropy::donsker_varadhan(t, &p, 1e-9)?;
        if let Some(v) = dv.value.finite() {
            sweep_worst = sweep_worst.max(v - log_rho);
        }
    }
    out.push(rec(
        "entropy-dv-sweep",
        "dual value over random distributions stays below the log spectral radius",
        "dual variational principle",
        pass_if(sweep_worst <= 1e-6),
        1e-6 - sweep_worst,
        1e-6,
    ));
    Ok(out)
}

fn tropical_records(t: &DenseTensor, seed: u64) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let (n, d) = t.equi()?;
    let opts = SolverOptions::default();
    let mut rng = ensemble::rng_from_seed(seed ^ 0x7209_a1f3);
    let sparse = SparseSupportTensor::from_dense(t)?;
    let usable = (0..n).all(|i| sparse.entries_for_state(i).next().is_some())
        && tropical::sparse_weakly_irreducible(&sparse);
    if !usable {
        for (id, desc, reference) in [
            ("tropical-methods-agree", "agreement of the tropical eigenvalue solvers", "max-plus eigenvalue characterizations"),
            ("tropical-policy-residual", "residual of the policy-iteration eigenpair", "max-plus eigenequation"),
            ("tropical-lp-roundtrip", "primal and dual certificates from the optimal policy", "linear-programming duality for the max-plus eigenvalue"),
            ("tropical-limit", "Hadamard-power limit of the spectral radius", "zero-temperature limit of the spectral radius"),
        ] {
            out.push(skip(id, desc, reference, 1e-8));
        }
    } else {
        let km = tropical::tropical_eigenpair_km(&sparse, 1e-12, 200_000)?;
        let pol = tropical::tropical_eigenpair_policy(&sparse)?;
        let mut spread = (km.log_rho - pol.log_rho).abs();
        if sparse.entries().len() <= 12 {
            let cyc = tropical::tropical_radius_by_cycles(&sparse)?;
            spread = spread.max((cyc.log_rho - pol.log_rho).abs());
        }
        out.push(rec(
            "tropical-methods-agree",
            "agreement of the tropical eigenvalue solvers",
            "max-plus eigenvalue characterizations",
            pass_if(spread <= 1e-8 * pol.log_rho.abs().max(1.0)),
            1e-8 * pol.log_rho.abs().max(1.0) - spread,
            1e-8,
        ));
        let res = pol.log_residual(&sparse);
        out.push(rec(
            "tropical-policy-residual",
            "residual of the policy-iteration eigenpair",
            "max-plus eigenequation",
            pass_if(res <= 1e-9),
            1e-9 - res,
            1e-9,
        ));
        let u_log: Vec<f64> = pol.v.iter().map(|&v| if v > 0.0 { v.ln() } else { -50.0 }).collect();
        let primal_violation = tropical::verify_primal(&sparse, pol.log_rho, &u_log)?;
        let mu = tropical::dual_from_policy(&sparse, &pol)?;
        let (dual_obj, dual_violation) = tropical::verify_dual(&sparse, &mu)?;
        let lp_ok = primal_violation <= 1e-8
            && dual_violation <= 1e-8
            && (dual_obj - pol.log_rho).abs() <= 1e-8 * pol.log_rho.abs().max(1.0);
        out.push(rec(
            "tropical-lp-roundtrip",
            "primal and dual certificates from the optimal policy agree",
            "linear-programming duality for the max-plus eigenvalue",
            pass_if(lp_ok),
            1e-8 - primal_violation.max(dual_violation),
            1e-8,
        ));
        let schedule = tropical::default_power_schedule();
        let limit = tropical::rho_infinity(t, &schedule, &opts)?;
        let mut monotone = true;
        for w in limit.trace.windows(2) {
            if w[1].1 > w[0].1 * (1.0 + 1e-9) {
                monotone = false;
            }
        }
        let terminal = (limit.value - pol.rho_trop).abs() / pol.rho_trop.max(1e-300);
        out.push(rec(
            "tropical-limit",
            "Hadamard-power spectral radii decrease to the tropical eigenvalue",
            "zero-temperature limit of the spectral radius",
            pass_if(monotone && terminal <= 1e-3),
            1e-3 - terminal,
            1e-3,
        ));
    }
    let partner = ensemble::random_positive_tensor(n, d, &mut rng);
    let b = tropical::tropical_bounds_check(t, &partner, &opts)?;
    let ok = b.rho_te <= b.rho_t_times_trop_e * (1.0 + 1e-9) + 1e-12
        && b.rho_e <= b.rho_pat_times_trop_e * (1.0 + 1e-9) + 1e-12;
    out.push(rec(
        "tropical-hadamard-bounds",
        "tropical eigenvalue bounds for Hadamard products",
        "mixed classical-tropical radius bounds",
        pass_if(ok),
        (b.rho_t_times_trop_e - b.rho_te).min(b.rho_pat_times_trop_e - b.rho_e),
        1e-9,
    ));
    Ok(out)
}

fn norm_records(t: &DenseTensor, seed: u64) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let (n, d) = t.equi()?;
    let opts = SolverOptions::default();
    let mut rng = ensemble::rng_from_seed(seed ^ 0x0b5e_55ed);
    let r = norm::norm_radius_bound_check(t, &opts)?;
    let status = if r.genuine_violation {
        CheckStatus::Fail
    } else if r.satisfied {
        CheckStatus::Pass
    } else {
        CheckStatus::Inconclusive
    };
    out.push(rec(
        "norm-radius-bound",
        "spectral radius against the dimension-scaled spectral norm",
        "radius-norm comparison",
        status,
        r.norm_lower * r.factor - r.rho,
        1e-9,
    ));
    let sandwich = norm::envelope_sandwich_holds(t)?;
    out.push(rec(
        "norm-envelope-sandwich",
        "largest entry below the norm below the Hilbert-Schmidt envelope",
        "elementary norm envelopes",
        pass_if(sandwich),
        if sandwich { 1.0 } else { -1.0 },
        1e-10,
    ));
    let partner = ensemble::random_positive_tensor(n, d, &mut rng);
    out.extend(norm::norm_inequality_suite(t, &partner, &mut rng)?);
    Ok(out)
}

/// Run one audit suite (or `all`) against a tensor with a fixed seed.
pub fn audit(suite: &str, t: &DenseTensor, seed: u64) -> Result<AuditReport> {
    let records = match suite {
        "structure" => structure_records(t, seed)?,
        "perron" => perron_records(t, seed)?,
        "entropy" => entropy_records(t, seed)?,
        "tropical" => tropical_records(t, seed)?,
        "norms" => norm_records(t, seed)?,
        "all" => {
            let mut r = structure_records(t, seed)?;
            r.extend(perron_records(t, seed)?);
            r.extend(entropy_records(t, seed)?);
            r.extend(tropical_records(t, seed)?);
            r.extend(norm_records(t, seed)?);
            r
        }
        other => {
            return Err(TenspecError::Domain(format!(
                "unknown audit suite '{other}' (expected structure, perron, entropy, tropical, norms, or all)"
            )))
        }
    };
    let passed = records.iter().all(|r| r.status != CheckStatus::Fail);
    Ok(AuditReport {
        suite: suite.to_string(),
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        input_digest: input_digest(t),
        records,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_stable_and_input_sensitive() {
        let a = DenseTensor::ones(2, 3);
        let b = DenseTensor::ones(2, 3);
        assert_eq!(input_digest(&a), input_digest(&b));
        let c = a.scale(2.0);
        assert_ne!(input_digest(&a), input_digest(&c));
    }

    #[test]
    fn full_audit_passes_on_positive_tensor() {
        let mut rng = ensemble::rng_from_seed(3);
        let t = ensemble::random_positive_tensor(3, 3, &mut rng);
        let report = audit("all", &t, 42).unwrap();
        assert!(report.passed, "{:#?}", report.records.iter().filter(|r| r.status == CheckStatus::Fail).collect::<Vec<_>>());
        assert!(!report.records.is_empty());
    }

    #[test]
    fn reports_are_byte_identical_for_identical_inputs() {
        let mut rng = ensemble::rng_from_seed(9);
        let t = ensemble::random_positive_tensor(2, 3, &mut rng);
        let a = serde_json::to_string(&audit("perron", &t, 7).unwrap()).unwrap();
        let b = serde_json::to_string(&audit("perron", &t, 7).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_suite_is_rejected() {
        let t = DenseTensor::ones(2, 2);
        assert!(audit("bogus", &t, 0).is_err());
    }

    #[test]
    fn reducible_input_degrades_to_inconclusive_not_error() {
        // Diagonal tensor: not weakly irreducible.
        let t = DenseTensor::identity(3, 3);
        let report = audit("entropy", &t, 5).unwrap();
        assert!(report
            .records
            .iter()
            .all(|r| r.status == CheckStatus::Inconclusive));
        assert!(report.passed);
    }
}

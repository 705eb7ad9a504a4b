//! Perron data of nonnegative partially symmetric tensors: spectral radius
//! with certified Collatz-Wielandt bounds, left eigendata, perturbation
//! coefficients, Kronecker/Hadamard radius checks, Friedland-Karlin and
//! related inequalities, and diagonal-equivalence scalings.

use crate::error::{Result, TenspecError};
use crate::linalg::Mat;
use crate::structure;
use crate::tensor::{norm_inf, DenseTensor};

/// Iteration budget and certified-gap tolerance shared by the solvers.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-10, max_iter: 100_000 }
    }
}

/// Certified eigendata of the homogeneous eigenproblem T(x) = rho x^{o(d-1)}.
///
/// `u` is max-normalized; `u_last_one` is the same vector rescaled so its
/// last coordinate is 1. `a` is diag(u)^{-(d-2)} DT(u) and `w` its left
/// Perron vector normalized to w.u = 1. The optional fields are absent for
/// the zero tensor. `regularized` flags values obtained through the
/// epsilon-perturbation path used for non-weakly-irreducible input.
#[derive(Debug, Clone)]
pub struct EigenCertificate {
    pub rho: f64,
    pub u: Option<Vec<f64>>,
    pub u_last_one: Option<Vec<f64>>,
    pub w: Option<Vec<f64>>,
    pub a: Option<Mat>,
    pub cw_lower: f64,
    pub cw_upper: f64,
    pub iterations: usize,
    pub residual: f64,
    pub regularized: bool,
}

impl EigenCertificate {
    pub fn u_ref(&self) -> Result<&[f64]> {
        self.u
            .as_deref()
            .ok_or_else(|| TenspecError::Domain("certificate has no eigenvector".into()))
    }

    pub fn w_ref(&self) -> Result<&[f64]> {
        self.w
            .as_deref()
            .ok_or_else(|| TenspecError::Domain("certificate has no left vector".into()))
    }
}

fn check_nonnegative(t: &DenseTensor) -> Result<()> {
    if t.values().iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(TenspecError::Domain(
            "solver requires a nonnegative tensor with finite entries".into(),
        ));
    }
    Ok(())
}

fn symmetrized(t: &DenseTensor) -> DenseTensor {
    if t.partially_symmetric {
        t.clone()
    } else {
        t.symmetrize_tail()
    }
}

/// Collatz-Wielandt bounds min/max of T(x)_i / x_i^{d-1} at a positive x.
pub fn collatz_wielandt(t: &DenseTensor, x: &[f64]) -> Result<(f64, f64)> {
    let (_, d) = t.equi()?;
    if x.iter().any(|&v| !(v > 0.0)) {
        return Err(TenspecError::Domain(
            "Collatz-Wielandt bounds need a strictly positive vector".into(),
        ));
    }
    let tx = t.apply(x)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (ti, xi) in tx.iter().zip(x) {
        let r = ti / xi.powi(d as i32 - 1);
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}

/// Shifted normalized power iteration for weakly irreducible input.
///
/// The iterate map is x <- normalize((T(x) + sigma x^{o(d-1)})^{o 1/(d-1)}).
/// Any sigma > 0 leaves the eigenvector fixed, and the Collatz-Wielandt
/// bounds are evaluated on T itself, so the shift only affects damping; it is
/// proportional to the largest entry to keep period-2 supports contracting.
fn solve_weakly_irreducible(
    ts: &DenseTensor,
    opts: &SolverOptions,
    want_left: bool,
) -> Result<EigenCertificate> {
    let (n, d) = ts.equi()?;
    let max_diag = ts.max_diagonal()?;
    let max_entry = ts.max_entry();
    let dm1 = (d - 1) as f64;
    let mut x = vec![1.0_f64; n];
    let mut best_lo = f64::NEG_INFINITY;
    let mut best_hi = f64::INFINITY;
    let mut iterations = 0usize;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let tx = ts.apply(&x)?;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = tx[i] / x[i].powi(d as i32 - 1);
            lo = lo.min(r);
            hi = hi.max(r);
        }
        best_lo = best_lo.max(lo);
        best_hi = best_hi.min(hi);
        // Stopping rule: the gap bounds the eigen-residual at the
        // max-normalized iterate, so demand it both relatively and
        // absolutely.
        if best_hi - best_lo <= opts.tol * best_hi.min(1.0) {
            converged = true;
            break;
        }
        // Adaptive shift: any sigma > 0 leaves the eigenvector fixed, so the
        // certified bounds (computed on the unshifted map) are unaffected.
        // Keeping sigma proportional to the current eigenvalue estimate
        // rather than to the largest entry preserves mixing speed on tensors
        // whose spectral radius is far below their largest entry, such as
        // high Hadamard powers.
        let sigma = max_diag + 0.5 * max_entry.min(best_hi);
        let mut y: Vec<f64> = (0..n)
            .map(|i| (tx[i] + sigma * x[i].powi(d as i32 - 1)).powf(1.0 / dm1))
            .collect();
        let m = y.iter().fold(0.0_f64, |a, &b| a.max(b));
        for v in &mut y {
            *v /= m;
        }
        x = y;
    }
    if !converged {
        return Err(TenspecError::Convergence(format!(
            "power iteration exhausted {} iterations; best bounds [{best_lo}, {best_hi}]",
            opts.max_iter
        )));
    }
    let rho = 0.5 * (best_lo + best_hi);
    let tx = ts.apply(&x)?;
    let residual = (0..n)
        .map(|i| (tx[i] - rho * x[i].powi(d as i32 - 1)).abs())
        .fold(0.0_f64, f64::max);
    let u = x.clone();
    let u_last_one: Vec<f64> = x.iter().map(|v| v / x[n - 1]).collect();
    let (a, w) = if want_left {
        let (a, w) = left_data_from(ts, &u, rho, opts)?;
        (Some(a), Some(w))
    } else {
        (None, None)
    };
    Ok(EigenCertificate {
        rho,
        u: Some(u),
        u_last_one: Some(u_last_one),
        w,
        a,
        cw_lower: best_lo,
        cw_upper: best_hi,
        iterations,
        residual,
        regularized: false,
    })
}

/// A = diag(u)^{-(d-2)} DT(u) and its left Perron vector w with w.u = 1.
fn left_data_from(
    ts: &DenseTensor,
    u: &[f64],
    rho: f64,
    opts: &SolverOptions,
) -> Result<(Mat, Vec<f64>)> {
    let (n, d) = ts.equi()?;
    let dt = ts.differential(u)?;
    let mut a = Mat::zeros(n, n);
    for i in 0..n {
        let s = u[i].powi(-(d as i32 - 2));
        for j in 0..n {
            a.set(i, j, s * dt.get(i, j));
        }
    }
    // Left vector by shifted power iteration on A^T; bounds certify the
    // matrix eigenvalue (d-1) rho.
    let mut diag_max = 0.0_f64;
    let mut entry_max = 0.0_f64;
    for i in 0..n {
        diag_max = diag_max.max(a.get(i, i));
        for j in 0..n {
            entry_max = entry_max.max(a.get(i, j));
        }
    }
    let mut z = vec![1.0_f64; n];
    let mut best_lo = f64::NEG_INFINITY;
    let mut best_hi = f64::INFINITY;
    let target = (d - 1) as f64 * rho;
    let mut ok = false;
    for _ in 0..opts.max_iter.max(10_000) {
        let az = a.matvec_transpose(&z);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = az[i] / z[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        best_lo = best_lo.max(lo);
        best_hi = best_hi.min(hi);
        if best_hi - best_lo <= opts.tol * best_hi.max(target).min(1.0).max(1e-14) {
            ok = true;
            break;
        }
        // Same adaptive shift rationale as the right-eigenvector iteration.
        let sigma = diag_max + 0.5 * entry_max.min(best_hi);
        let mut y: Vec<f64> = (0..n).map(|i| az[i] + sigma * z[i]).collect();
        let m = y.iter().fold(0.0_f64, |x, &b| x.max(b));
        for v in &mut y {
            *v /= m;
        }
        z = y;
    }
    if !ok {
        return Err(TenspecError::Convergence(format!(
            "left-vector iteration did not certify; bounds [{best_lo}, {best_hi}]"
        )));
    }
    let dot: f64 = z.iter().zip(u).map(|(a, b)| a * b).sum();
    let w: Vec<f64> = z.iter().map(|v| v / dot).collect();
    Ok((a, w))
}

/// Public form of the left-data computation from a converged certificate.
pub fn left_data(t: &DenseTensor, cert: &EigenCertificate) -> Result<(Mat, Vec<f64>)> {
    let ts = symmetrized(t);
    left_data_from(&ts, cert.u_ref()?, cert.rho, &SolverOptions::default())
}

/// Spectral radius with certificate.
///
/// Weakly irreducible tensors get the certified power iteration directly.
/// Other tensors are regularized with a small positive multiple of the
/// all-ones tensor at three epsilon levels and the radius is extrapolated;
/// such certificates carry `regularized: true` and their residual is reported
/// honestly against the original tensor.
pub fn spectral_radius(t: &DenseTensor, opts: &SolverOptions) -> Result<EigenCertificate> {
    let (n, d) = t.equi()?;
    check_nonnegative(t)?;
    if t.max_entry() == 0.0 {
        return Ok(EigenCertificate {
            rho: 0.0,
            u: None,
            u_last_one: None,
            w: None,
            a: None,
            cw_lower: 0.0,
            cw_upper: 0.0,
            iterations: 0,
            residual: 0.0,
            regularized: false,
        });
    }
    let ts = symmetrized(t);
    if structure::weak_irreducibility(&ts)?.0 {
        return solve_weakly_irreducible(&ts, opts, true);
    }
    // Regularized path with Aitken extrapolation over three epsilon levels.
    let scale = ts.max_entry();
    let ones = DenseTensor::ones(n, d);
    let mut rhos = Vec::new();
    let mut last: Option<EigenCertificate> = None;
    for eps in [1e-4, 1e-6, 1e-8] {
        let reg = {
            let mut v = ts.clone();
            let bump = eps * scale;
            let bumped: Vec<f64> = v.values().iter().zip(ones.values()).map(|(a, b)| a + bump * b).collect();
            v = DenseTensor::new(v.shape().clone(), bumped, true)?;
            v
        };
        let cert = solve_weakly_irreducible(&reg, opts, true)?;
        rhos.push(cert.rho);
        last = Some(cert);
    }
    let rho = aitken(rhos[0], rhos[1], rhos[2]);
    let last = last.expect("three regularized solves");
    let u = last.u.clone();
    let residual = match &u {
        Some(u) => {
            let tu = ts.apply(u)?;
            (0..n)
                .map(|i| (tu[i] - rho * u[i].powi(d as i32 - 1)).abs())
                .fold(0.0_f64, f64::max)
        }
        None => 0.0,
    };
    Ok(EigenCertificate {
        rho,
        u,
        u_last_one: last.u_last_one,
        w: last.w,
        a: last.a,
        cw_lower: last.cw_lower,
        cw_upper: last.cw_upper,
        iterations: last.iterations,
        residual,
        regularized: true,
    })
}

fn aitken(r1: f64, r2: f64, r3: f64) -> f64 {
    let denom = (r3 - r2) - (r2 - r1);
    if denom.abs() < 1e-14 * r3.abs().max(1.0) {
        r3
    } else {
        r3 - (r3 - r2) * (r3 - r2) / denom
    }
}

/// First-order sensitivity of rho in the direction s:
/// w . diag(u)^{-(d-2)} S(u).
///
/// The direction must be nonnegative wherever t vanishes, so that t + eps s
/// stays in the cone for small eps.
pub fn perturbation_coefficient(
    t: &DenseTensor,
    s: &DenseTensor,
    cert: &EigenCertificate,
) -> Result<f64> {
    let (n, d) = t.equi()?;
    if s.shape() != t.shape() {
        return Err(TenspecError::Shape("perturbation direction shape mismatch".into()));
    }
    let mut idx = vec![0usize; d];
    for (flat, (&tv, &sv)) in t.values().iter().zip(s.values()).enumerate() {
        if tv == 0.0 && sv < 0.0 {
            t.shape().decompose(flat, &mut idx);
            let one_based: Vec<usize> = idx.iter().map(|i| i + 1).collect();
            return Err(TenspecError::Domain(format!(
                "direction is negative at {one_based:?} where the tensor vanishes"
            )));
        }
    }
    let u = cert.u_ref()?;
    let w = cert.w_ref()?;
    let su = symmetrized(s).apply(u)?;
    let mut acc = 0.0;
    for i in 0..n {
        acc += w[i] * u[i].powi(-(d as i32 - 2)) * su[i];
    }
    Ok(acc)
}

/// Multiplicativity of rho over the Kronecker product, plus Hadamard
/// submultiplicativity when the shapes coincide.
#[derive(Debug, Clone)]
pub struct KroneckerReport {
    pub rho_e: f64,
    pub rho_f: f64,
    pub rho_kron: f64,
    /// rho(e kron f) - rho(e) rho(f); should vanish.
    pub kron_gap: f64,
    /// rho(e o f) and the slack rho(e) rho(f) - rho(e o f) >= 0, when the
    /// shapes match.
    pub hadamard: Option<(f64, f64)>,
}

pub fn kronecker_radius_check(
    e: &DenseTensor,
    f: &DenseTensor,
    opts: &SolverOptions,
) -> Result<KroneckerReport> {
    let rho_e = spectral_radius(e, opts)?.rho;
    let rho_f = spectral_radius(f, opts)?.rho;
    let k = e.kronecker(f)?;
    let rho_kron = spectral_radius(&k, opts)?.rho;
    let hadamard = if e.shape() == f.shape() {
        let h = e.hadamard(f)?;
        let rho_h = spectral_radius(&h, opts)?.rho;
        Some((rho_h, rho_e * rho_f - rho_h))
    } else {
        None
    };
    Ok(KroneckerReport {
        rho_e,
        rho_f,
        rho_kron,
        kron_gap: rho_kron - rho_e * rho_f,
        hadamard,
    })
}

/// Diagonal-equivalence scaling: entries of `scaled` equal the (symmetrized)
/// input entries times exp(b_{i1} + sum over tail of c_{i_j}).
#[derive(Debug, Clone)]
pub struct ScalingCertificate {
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub scaled: DenseTensor,
    pub objective_gradient_norm: f64,
    pub iterations: usize,
}

/// Scales an irreducible tensor with positive diagonal so that the given
/// positive vector u becomes its eigenvector at rho = 1 and the given w its
/// left vector: apply(scaled, u) = u^{o(d-1)} and A^T w = (d-1) w for
/// A = diag(u)^{-(d-2)} D(scaled)(u).
///
/// The scaling minimizes sum_i u_i w_i (log T(e^x)_i - (d-1) x_i) over the
/// zero-sum hyperplane (projected gradient with Barzilai-Borwein steps and
/// Armijo backtracking), then applies a tail rescaling by c = y - log u and a
/// first-index rescaling that normalizes the eigen-relation exactly.
pub fn diagonal_equivalence(
    tp: &DenseTensor,
    u: &[f64],
    w: &[f64],
    opts: &SolverOptions,
) -> Result<ScalingCertificate> {
    let (n, d) = tp.equi()?;
    check_nonnegative(tp)?;
    if u.len() != n || w.len() != n {
        return Err(TenspecError::Shape("u and w must have length n".into()));
    }
    if u.iter().chain(w.iter()).any(|&v| !(v > 0.0)) {
        return Err(TenspecError::Domain("u and w must be strictly positive".into()));
    }
    for i in 0..n {
        if !(tp.get(&vec![i; d]) > 0.0) {
            return Err(TenspecError::Domain(format!(
                "diagonal entry at state {} must be positive",
                i + 1
            )));
        }
    }
    if !structure::irreducibility(tp)?.0 {
        return Err(TenspecError::Domain("scaling requires an irreducible tensor".into()));
    }
    let dot: f64 = u.iter().zip(w).map(|(a, b)| a * b).sum();
    if (dot - 1.0).abs() > 1e-8 {
        return Err(TenspecError::Domain(format!(
            "u.w must equal 1, got {dot}"
        )));
    }
    let p: Vec<f64> = u.iter().zip(w).map(|(a, b)| a * b / dot).collect();
    let ts = symmetrized(tp);
    let dm1 = (d - 1) as f64;

    let objective = |x: &[f64]| -> Result<f64> {
        let z: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        let tz = ts.apply(&z)?;
        let mut f = 0.0;
        for i in 0..n {
            f += p[i] * (tz[i].ln() - dm1 * x[i]);
        }
        Ok(f)
    };
    let gradient = |x: &[f64]| -> Result<Vec<f64>> {
        let z: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        let tz = ts.apply(&z)?;
        let dt = ts.differential(&z)?;
        let mut g = vec![0.0; n];
        for j in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                s += p[i] * dt.get(i, j) * z[j] / tz[i];
            }
            g[j] = s - dm1 * p[j];
        }
        let mean = g.iter().sum::<f64>() / n as f64;
        for v in &mut g {
            *v -= mean;
        }
        Ok(g)
    };

    let grad_tol = 1e-10_f64;
    let max_iter = opts.max_iter.max(50_000);
    let mut x = vec![0.0_f64; n];
    let mut fx = objective(&x)?;
    let mut g = gradient(&x)?;
    let mut step = 1.0_f64;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut iterations = 0usize;
    while norm_inf(&g) > grad_tol && iterations < max_iter {
        iterations += 1;
        if let Some((px, pg)) = &prev {
            let mut ss = 0.0;
            let mut sy = 0.0;
            for j in 0..n {
                let sj = x[j] - px[j];
                let yj = g[j] - pg[j];
                ss += sj * sj;
                sy += sj * yj;
            }
            if sy > 1e-16 {
                step = (ss / sy).clamp(1e-10, 1e8);
            }
        }
        let g2: f64 = g.iter().map(|v| v * v).sum();
        let mut alpha = step;
        let mut accepted = false;
        for _ in 0..60 {
            let xn: Vec<f64> = (0..n).map(|j| x[j] - alpha * g[j]).collect();
            let fn_ = objective(&xn)?;
            if fn_ <= fx - 1e-4 * alpha * g2 {
                prev = Some((x.clone(), g.clone()));
                x = xn;
                fx = fn_;
                g = gradient(&x)?;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let gnorm = norm_inf(&g);
    if gnorm > 1e-6 {
        return Err(TenspecError::Convergence(format!(
            "scaling objective did not flatten; projected gradient norm {gnorm}"
        )));
    }

    // Tail rescaling by c = y - log u, then first-index rescaling fixing the
    // eigen-relation at rho = 1 exactly.
    let c: Vec<f64> = (0..n).map(|j| x[j] - u[j].ln()).collect();
    let mut idx = vec![0usize; d];
    let mut hat_values = ts.values().to_vec();
    for (flat, v) in hat_values.iter_mut().enumerate() {
        ts.shape().decompose(flat, &mut idx);
        let mut e = 0.0;
        for &j in &idx[1..] {
            e += c[j];
        }
        *v *= e.exp();
    }
    let hat = DenseTensor::new(ts.shape().clone(), hat_values, true)?;
    let hu = hat.apply(u)?;
    let b: Vec<f64> = (0..n).map(|i| dm1 * u[i].ln() - hu[i].ln()).collect();
    let eb: Vec<f64> = b.iter().map(|v| v.exp()).collect();
    let scaled = hat.diag_scale(&eb)?;
    Ok(ScalingCertificate { b, c, scaled, objective_gradient_norm: gnorm, iterations })
}

/// Friedland-Karlin lower bound rho(diag(y) o T) >= rho(T) prod y_i^{u_i w_i}.
#[derive(Debug, Clone)]
pub struct FkReport {
    pub lhs: f64,
    pub rhs: f64,
    /// lhs - rhs; nonnegative when the inequality holds.
    pub margin: f64,
    /// For fully symmetric tensors, the variant with exponents u_i^d under
    /// the normalization sum u_i^d = 1.
    pub symmetric_variant: Option<(f64, f64)>,
}

/// Exact full-symmetry test (bitwise, like the partial-symmetry validator).
pub fn is_fully_symmetric(t: &DenseTensor) -> bool {
    let Ok((_, d)) = t.equi() else { return false };
    let mut idx = vec![0usize; d];
    for flat in 0..t.values().len() {
        t.shape().decompose(flat, &mut idx);
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        if t.values()[flat].to_bits() != t.get(&sorted).to_bits() {
            return false;
        }
    }
    true
}

pub fn friedland_karlin_check(
    t: &DenseTensor,
    y: &[f64],
    cert: &EigenCertificate,
    opts: &SolverOptions,
) -> Result<FkReport> {
    let (n, _) = t.equi()?;
    if y.len() != n || y.iter().any(|&v| !(v > 0.0)) {
        return Err(TenspecError::Domain("y must be a strictly positive n-vector".into()));
    }
    let u = cert.u_ref()?;
    let w = cert.w_ref()?;
    let lhs = spectral_radius(&t.diag_scale(y)?, opts)?.rho;
    let mut log_rhs = cert.rho.ln();
    for i in 0..n {
        log_rhs += u[i] * w[i] * y[i].ln();
    }
    let rhs = log_rhs.exp();
    let symmetric_variant = if is_fully_symmetric(t) {
        let norm = u.iter().map(|v| v.powi(t.shape().order() as i32)).sum::<f64>();
        let d = t.shape().order() as i32;
        let mut log_rhs_s = cert.rho.ln();
        for i in 0..n {
            log_rhs_s += u[i].powi(d) / norm * y[i].ln();
        }
        Some((lhs, log_rhs_s.exp()))
    } else {
        None
    };
    Ok(FkReport { lhs, rhs, margin: lhs - rhs, symmetric_variant })
}

/// Value of the weighted log-ratio functional
/// sum_i u_i w_i log(T(x)_i / x_i^{d-1}), which is minimized at x = u where
/// it equals log rho.
pub fn weighted_log_ratio(t: &DenseTensor, cert: &EigenCertificate, x: &[f64]) -> Result<f64> {
    let (n, d) = t.equi()?;
    if x.iter().any(|&v| !(v > 0.0)) {
        return Err(TenspecError::Domain("x must be strictly positive".into()));
    }
    let u = cert.u_ref()?;
    let w = cert.w_ref()?;
    let tx = t.apply(x)?;
    let mut acc = 0.0;
    for i in 0..n {
        acc += u[i] * w[i] * (tx[i].ln() - (d as f64 - 1.0) * x[i].ln());
    }
    Ok(acc)
}

/// Report of the min-characterization sweep: the functional stays above
/// log rho on random positive vectors and touches it at x = u.
#[derive(Debug, Clone)]
pub struct MinCharReport {
    pub log_rho: f64,
    /// Smallest sweep value minus log rho; nonnegative up to tolerance.
    pub worst_margin: f64,
    /// |value at u - log rho|.
    pub equality_gap_at_u: f64,
    pub trials: usize,
}

pub fn fk_min_characterization(
    t: &DenseTensor,
    cert: &EigenCertificate,
    trials: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<MinCharReport> {
    use rand::Rng;
    let (n, _) = t.equi()?;
    let log_rho = cert.rho.ln();
    let mut worst = f64::INFINITY;
    for _ in 0..trials {
        let x: Vec<f64> = (0..n).map(|_| 0.05 + rng.gen::<f64>() * 4.0).collect();
        let v = weighted_log_ratio(t, cert, &x)?;
        worst = worst.min(v - log_rho);
    }
    let at_u = weighted_log_ratio(t, cert, cert.u_ref()?)?;
    Ok(MinCharReport {
        log_rho,
        worst_margin: worst,
        equality_gap_at_u: (at_u - log_rho).abs(),
        trials,
    })
}

/// Ratio sum_i y_i^{1/(d-1)} F_i(x)^{d/(d-1)} / F(x) with F(x) = x.T(x) and
/// F_i = d T(x)_i, for even d and fully symmetric t. Its supremum over x != 0
/// equals d^{d/(d-1)} rho(diag(y) o T)^{1/(d-1)} when F is positive definite
/// and convex; convexity of F is an unchecked hypothesis here.
pub fn convex_form_ratio(t: &DenseTensor, y: &[f64], x: &[f64]) -> Result<f64> {
    let (n, d) = t.equi()?;
    if d % 2 != 0 {
        return Err(TenspecError::Domain("the ratio form needs even order d".into()));
    }
    if !is_fully_symmetric(t) {
        return Err(TenspecError::Domain("the ratio form needs a fully symmetric tensor".into()));
    }
    if y.len() != n || y.iter().any(|&v| !(v > 0.0)) {
        return Err(TenspecError::Domain("y must be strictly positive".into()));
    }
    if x.iter().all(|&v| v == 0.0) {
        return Err(TenspecError::Domain("x must be nonzero".into()));
    }
    let tx = t.apply(x)?;
    let fx: f64 = x.iter().zip(&tx).map(|(a, b)| a * b).sum();
    if fx <= 0.0 {
        return Err(TenspecError::Domain(format!(
            "form value F(x) = {fx} is not positive; positivity hypothesis fails at this x"
        )));
    }
    let dm1 = (d - 1) as f64;
    let expo = d as f64 / dm1;
    let mut num = 0.0;
    for i in 0..n {
        let fi = d as f64 * tx[i];
        // d - 1 is odd, so the real odd root makes fi^{d/(d-1)} = |fi|^{d/(d-1)}.
        num += y[i].powf(1.0 / dm1) * fi.abs().powf(expo);
    }
    Ok(num / fx)
}

/// Checks positivity of F on random sphere points and the sup characterization
/// of `convex_form_ratio` by sampling.
#[derive(Debug, Clone)]
pub struct ConvexFormReport {
    /// d^{d/(d-1)} rho(diag(y) o T)^{1/(d-1)}.
    pub bound: f64,
    /// Largest sampled ratio; never above bound + tol.
    pub best_ratio: f64,
    /// |ratio at the eigenvector of diag(y) o T - bound|.
    pub equality_gap: f64,
}

pub fn convex_form_sup_check(
    t: &DenseTensor,
    y: &[f64],
    samples: usize,
    opts: &SolverOptions,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<ConvexFormReport> {
    use rand::Rng;
    let (n, d) = t.equi()?;
    let cert = spectral_radius(&t.diag_scale(y)?, opts)?;
    let dm1 = (d - 1) as f64;
    let bound = (d as f64).powf(d as f64 / dm1) * cert.rho.powf(1.0 / dm1);
    // Positivity of F probed on random sphere points (signed).
    let mut best_ratio = f64::NEG_INFINITY;
    for _ in 0..samples {
        let mut x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let nrm = crate::tensor::norm2(&x);
        if nrm < 1e-9 {
            continue;
        }
        for v in &mut x {
            *v /= nrm;
        }
        let tx = t.apply(&x)?;
        let fx: f64 = x.iter().zip(&tx).map(|(a, b)| a * b).sum();
        if fx <= 0.0 {
            return Err(TenspecError::Domain(format!(
                "form value F(x) = {fx} is not positive on the sphere"
            )));
        }
        best_ratio = best_ratio.max(convex_form_ratio(t, y, &x)?);
    }
    let v = cert.u_ref()?;
    let at_eig = convex_form_ratio(t, y, v)?;
    best_ratio = best_ratio.max(at_eig);
    Ok(ConvexFormReport { bound, best_ratio, equality_gap: (at_eig - bound).abs() })
}

/// Builds a tensor G that is diagonally similar to F through the positive
/// vector s: g_{i, tail} = f_{i, tail} * (prod over tail of s_j) / s_i^{d-1}.
/// Then rho(G) = rho(F) and Hoelder's bound
/// rho(F^{o a} o G^{o(1-a)}) <= rho(F)^a rho(G)^{1-a} holds with equality.
pub fn diagonal_similarity(f: &DenseTensor, s: &[f64]) -> Result<DenseTensor> {
    let (n, d) = f.equi()?;
    if s.len() != n || s.iter().any(|&v| !(v > 0.0)) {
        return Err(TenspecError::Domain("similarity vector must be positive".into()));
    }
    let mut idx = vec![0usize; d];
    let mut values = f.values().to_vec();
    for (flat, v) in values.iter_mut().enumerate() {
        f.shape().decompose(flat, &mut idx);
        let mut scale = s[idx[0]].powi(-(d as i32 - 1));
        for &j in &idx[1..] {
            scale *= s[j];
        }
        *v *= scale;
    }
    DenseTensor::new(f.shape().clone(), values, f.partially_symmetric)
}

/// Hoelder (Kingman) inequality data:
/// rho(F^{o a} o G^{o(1-a)}) and rho(F)^a rho(G)^{1-a}.
pub fn kingman_check(
    f: &DenseTensor,
    g: &DenseTensor,
    alpha: f64,
    opts: &SolverOptions,
) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(TenspecError::Domain("alpha must lie in [0, 1]".into()));
    }
    let mix = f.hadamard_power(alpha)?.hadamard(&g.hadamard_power(1.0 - alpha)?)?;
    let lhs = spectral_radius(&mix, opts)?.rho;
    let rho_f = spectral_radius(f, opts)?.rho;
    let rho_g = spectral_radius(g, opts)?.rho;
    Ok((lhs, rho_f.powf(alpha) * rho_g.powf(1.0 - alpha)))
}

//! Entropic characterizations of log rho: occupation measures for matrices
//! and tensors, the maps between measures and stochastic matrices, entropy
//! objectives, and Donsker-Varadhan functionals.

use crate::error::{Result, TenspecError};
use crate::linalg::{self, Mat};
use crate::perron::{spectral_radius, EigenCertificate, SolverOptions};
use crate::tensor::{norm_inf, DenseTensor, SparseSupportTensor};
use serde::Serialize;

/// Extended-real value of an entropy objective. Minus infinity is an explicit
/// variant, never a floating sentinel: positive mass on a zero entry makes
/// the objective minus infinity by convention, while 0 log 0 = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EntropyValue {
    Finite(f64),
    MinusInfinity,
}

impl EntropyValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            EntropyValue::Finite(v) => Some(v),
            EntropyValue::MinusInfinity => None,
        }
    }

    /// True when the value is at most `bound + slack`.
    pub fn at_most(self, bound: f64, slack: f64) -> bool {
        match self {
            EntropyValue::Finite(v) => v <= bound + slack,
            EntropyValue::MinusInfinity => true,
        }
    }
}

const MEASURE_TOL: f64 = 1e-8;

/// Probability measure on [n] x [n] whose row sums equal its column sums.
#[derive(Debug, Clone)]
pub struct MatrixOccupationMeasure {
    mu: Mat,
}

impl MatrixOccupationMeasure {
    pub fn new(mu: Mat) -> Result<Self> {
        let n = mu.n_rows;
        if mu.n_cols != n {
            return Err(TenspecError::Shape("occupation measure must be square".into()));
        }
        if mu.data().iter().any(|&v| v < -1e-12) {
            return Err(TenspecError::Domain("occupation measure must be nonnegative".into()));
        }
        let mass: f64 = mu.data().iter().sum();
        if (mass - 1.0).abs() > MEASURE_TOL {
            return Err(TenspecError::Domain(format!(
                "occupation measure mass {mass} is not 1"
            )));
        }
        let rows = mu.row_sums();
        let cols = mu.col_sums();
        for i in 0..n {
            if (rows[i] - cols[i]).abs() > MEASURE_TOL {
                return Err(TenspecError::Domain(format!(
                    "row/column sums differ at state {}: {} vs {}",
                    i + 1,
                    rows[i],
                    cols[i]
                )));
            }
        }
        Ok(MatrixOccupationMeasure { mu })
    }

    pub fn mu(&self) -> &Mat {
        &self.mu
    }

    pub fn n(&self) -> usize {
        self.mu.n_rows
    }

    /// Worst deviation among the mass and balance constraints.
    pub fn balance_residual(&self) -> f64 {
        let mass: f64 = self.mu.data().iter().sum();
        let rows = self.mu.row_sums();
        let cols = self.mu.col_sums();
        let mut r = (mass - 1.0).abs();
        for i in 0..self.n() {
            r = r.max((rows[i] - cols[i]).abs());
        }
        r
    }
}

/// Probability measure on index tuples whose first-position marginal equals
/// its second-position marginal.
///
/// For a partially symmetric measure the second-position marginal can be
/// written as (1/(d-1)) sum over entries of the tail multiplicity of j times
/// the entry, which is the form used here.
#[derive(Debug, Clone)]
pub struct TensorOccupationMeasure {
    mu: DenseTensor,
}

/// First-position marginal: row_j = sum over tails of mu_{j, tail}.
pub fn first_marginal(mu: &DenseTensor) -> Result<Vec<f64>> {
    let (n, _) = mu.equi()?;
    let stride = mu.values().len() / n;
    let mut r = vec![0.0; n];
    for (flat, &v) in mu.values().iter().enumerate() {
        r[flat / stride] += v;
    }
    Ok(r)
}

/// Second-position marginal: col_j = sum over i1, i3..id of mu_{i1, j, i3..}.
pub fn second_marginal(mu: &DenseTensor) -> Result<Vec<f64>> {
    let (n, d) = mu.equi()?;
    let stride = mu.values().len() / (n * n);
    let mut c = vec![0.0; n];
    if d == 2 {
        for (flat, &v) in mu.values().iter().enumerate() {
            c[flat % n] += v;
        }
    } else {
        for (flat, &v) in mu.values().iter().enumerate() {
            c[(flat / stride) % n] += v;
        }
    }
    Ok(c)
}

impl TensorOccupationMeasure {
    pub fn new(mu: DenseTensor) -> Result<Self> {
        mu.equi()?;
        if !mu.partially_symmetric {
            return Err(TenspecError::Domain(
                "occupation measure must be partially symmetric".into(),
            ));
        }
        if mu.values().iter().any(|&v| v < -1e-12) {
            return Err(TenspecError::Domain("occupation measure must be nonnegative".into()));
        }
        let mass: f64 = mu.values().iter().sum();
        if (mass - 1.0).abs() > MEASURE_TOL {
            return Err(TenspecError::Domain(format!(
                "occupation measure mass {mass} is not 1"
            )));
        }
        let rows = first_marginal(&mu)?;
        let cols = second_marginal(&mu)?;
        for j in 0..rows.len() {
            if (rows[j] - cols[j]).abs() > MEASURE_TOL {
                return Err(TenspecError::Domain(format!(
                    "marginals differ at state {}: {} vs {}",
                    j + 1,
                    rows[j],
                    cols[j]
                )));
            }
        }
        Ok(TensorOccupationMeasure { mu })
    }

    pub fn mu(&self) -> &DenseTensor {
        &self.mu
    }

    pub fn balance_residual(&self) -> f64 {
        let mass: f64 = self.mu.values().iter().sum();
        let rows = first_marginal(&self.mu).expect("validated shape");
        let cols = second_marginal(&self.mu).expect("validated shape");
        let mut r = (mass - 1.0).abs();
        for j in 0..rows.len() {
            r = r.max((rows[j] - cols[j]).abs());
        }
        r
    }
}

/// Uniform measure 1/k on the edges of the dicycle gamma.
pub fn cycle_measure(gamma: &[usize], n: usize) -> Result<MatrixOccupationMeasure> {
    let k = gamma.len();
    if k == 0 {
        return Err(TenspecError::Domain("cycle must be nonempty".into()));
    }
    let mut seen = vec![false; n];
    for &v in gamma {
        if v >= n {
            return Err(TenspecError::Domain(format!("vertex {} out of range", v + 1)));
        }
        if seen[v] {
            return Err(TenspecError::Domain("cycle vertices must be distinct".into()));
        }
        seen[v] = true;
    }
    let mut mu = Mat::zeros(n, n);
    for i in 0..k {
        mu.add_to(gamma[i], gamma[(i + 1) % k], 1.0 / k as f64);
    }
    MatrixOccupationMeasure::new(mu)
}

/// Greedy peeling of a measure into cycle measures with convex weights.
///
/// A cycle is found inside the positive support, the largest multiple of its
/// uniform measure is subtracted, and the residual recursed on; balance makes
/// every positive-out-degree walk close into a cycle.
pub fn extreme_point_decompose(
    m: &MatrixOccupationMeasure,
) -> Result<Vec<(Vec<usize>, f64)>> {
    let n = m.n();
    let mut res = m.mu().clone();
    let mut parts: Vec<(Vec<usize>, f64)> = Vec::new();
    let floor = 1e-12;
    for _ in 0..(n * n + 1) {
        let mass: f64 = res.data().iter().sum();
        if mass <= 1e-10 {
            let total: f64 = parts.iter().map(|(_, w)| w).sum();
            if parts.is_empty() {
                return Err(TenspecError::Domain("empty measure".into()));
            }
            // Renormalize away the peeled-off dust.
            for (_, w) in &mut parts {
                *w /= total;
            }
            return Ok(parts);
        }
        // Walk from a vertex with positive out-mass until a repeat closes a
        // cycle.
        let start = (0..n)
            .find(|&i| (0..n).any(|j| res.get(i, j) > floor))
            .ok_or_else(|| {
                TenspecError::Convergence(format!(
                    "residual mass {mass} left but no edge above the support floor"
                ))
            })?;
        let mut path = vec![start];
        let mut pos = vec![usize::MAX; n];
        pos[start] = 0;
        let cycle = loop {
            let cur = *path.last().unwrap();
            let next = (0..n)
                .max_by(|&a, &b| res.get(cur, a).partial_cmp(&res.get(cur, b)).unwrap())
                .unwrap();
            if res.get(cur, next) <= floor {
                return Err(TenspecError::Convergence(
                    "walk stalled; balance residual too large to peel".into(),
                ));
            }
            if pos[next] != usize::MAX {
                break path[pos[next]..].to_vec();
            }
            pos[next] = path.len();
            path.push(next);
        };
        let k = cycle.len();
        let mut step = f64::INFINITY;
        for i in 0..k {
            step = step.min(res.get(cycle[i], cycle[(i + 1) % k]));
        }
        for i in 0..k {
            let (a, b) = (cycle[i], cycle[(i + 1) % k]);
            let v = (res.get(a, b) - step).max(0.0);
            res.set(a, b, v);
        }
        parts.push((cycle, step * k as f64));
    }
    Err(TenspecError::Convergence(
        "peeling exceeded the cycle budget without exhausting the measure".into(),
    ))
}

/// Row-normalization of a measure into a stochastic matrix; the zero-row
/// block becomes a uniform block on its own states.
pub fn psi_map(m: &MatrixOccupationMeasure) -> Mat {
    let n = m.n();
    let rows = m.mu().row_sums();
    let zero: Vec<usize> = (0..n).filter(|&i| rows[i] <= 1e-13).collect();
    let mut a = Mat::zeros(n, n);
    for i in 0..n {
        if rows[i] > 1e-13 {
            for j in 0..n {
                a.set(i, j, m.mu().get(i, j) / rows[i]);
            }
        }
    }
    let k = zero.len();
    for &i in &zero {
        for &j in &zero {
            a.set(i, j, 1.0 / k as f64);
        }
    }
    a
}

/// The occupation measures diag(z) a, one per recurrent class of the
/// stochastic matrix a, with z the stationary distribution supported on that
/// class.
#[derive(Debug, Clone)]
pub struct PhiResult {
    pub measures: Vec<MatrixOccupationMeasure>,
    /// True iff a has a single recurrent class.
    pub unique: bool,
}

pub fn phi_map(a: &Mat) -> Result<PhiResult> {
    let n = a.n_rows;
    if a.n_cols != n {
        return Err(TenspecError::Shape("stochastic matrix must be square".into()));
    }
    for i in 0..n {
        let s: f64 = (0..n).map(|j| a.get(i, j)).sum();
        if (s - 1.0).abs() > 1e-9 || (0..n).any(|j| a.get(i, j) < -1e-12) {
            return Err(TenspecError::Domain(format!(
                "matrix is not row-stochastic at row {}",
                i + 1
            )));
        }
    }
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| a.get(i, j) > 1e-13).collect())
        .collect();
    let comps = linalg::strongly_connected_components(adj.len(), &adj);
    let mut measures = Vec::new();
    for comp in &comps {
        // Recurrent iff no edge leaves the component.
        let inside: std::collections::HashSet<usize> = comp.iter().copied().collect();
        let closed = comp.iter().all(|&i| adj[i].iter().all(|j| inside.contains(j)));
        if !closed {
            continue;
        }
        let k = comp.len();
        let mut sub = Mat::zeros(k, k);
        for (ci, &i) in comp.iter().enumerate() {
            for (cj, &j) in comp.iter().enumerate() {
                sub.set(ci, cj, a.get(i, j));
            }
        }
        let z = linalg::stationary_distribution(&sub).ok_or_else(|| TenspecError::Convergence("stationary distribution solve failed".into()))?;
        let mut mu = Mat::zeros(n, n);
        for (ci, &i) in comp.iter().enumerate() {
            for j in 0..n {
                mu.set(i, j, z[ci] * a.get(i, j));
            }
        }
        measures.push(MatrixOccupationMeasure::new(mu)?);
    }
    let unique = measures.len() == 1;
    Ok(PhiResult { measures, unique })
}

/// sum mu_ij log(a_ij r_i / mu_ij) with r the row sums of mu; 0 log 0 = 0
/// and positive mass on a zero entry gives minus infinity.
pub fn matrix_entropy_objective(a: &Mat, m: &MatrixOccupationMeasure) -> EntropyValue {
    let n = m.n();
    let rows = m.mu().row_sums();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mu = m.mu().get(i, j);
            if mu <= 0.0 {
                continue;
            }
            let av = a.get(i, j);
            if av <= 0.0 {
                return EntropyValue::MinusInfinity;
            }
            acc += mu * (rows[i] * av / mu).ln();
        }
    }
    EntropyValue::Finite(acc)
}

/// sum mu_idx log(r_{i1} t_idx / mu_idx), same conventions; at d = 2 this is
/// exactly the matrix objective.
pub fn tensor_entropy_objective(t: &DenseTensor, m: &TensorOccupationMeasure) -> Result<EntropyValue> {
    let (n, _) = t.equi()?;
    if t.shape() != m.mu().shape() {
        return Err(TenspecError::Shape("tensor and measure shapes differ".into()));
    }
    let rows = first_marginal(m.mu())?;
    let stride = m.mu().values().len() / n;
    let mut acc = 0.0;
    for (flat, &mu) in m.mu().values().iter().enumerate() {
        if mu <= 0.0 {
            continue;
        }
        let tv = t.values()[flat];
        if tv <= 0.0 {
            return Ok(EntropyValue::MinusInfinity);
        }
        acc += mu * (rows[flat / stride] * tv / mu).ln();
    }
    Ok(EntropyValue::Finite(acc))
}

/// The measure mu = rho^{-1} w_{i1} u_{i1}^{-(d-2)} t u_{i2}...u_{id}, which
/// attains the entropy characterization of log rho.
pub fn optimal_tensor_measure(
    t: &DenseTensor,
    cert: &EigenCertificate,
) -> Result<TensorOccupationMeasure> {
    let (_, d) = t.equi()?;
    if cert.rho <= 0.0 {
        return Err(TenspecError::Domain("optimal measure needs rho > 0".into()));
    }
    let u = cert.u_ref()?;
    let w = cert.w_ref()?;
    let ts = if t.partially_symmetric { t.clone() } else { t.symmetrize_tail() };
    let mut idx = vec![0usize; d];
    let mut values = ts.values().to_vec();
    for (flat, v) in values.iter_mut().enumerate() {
        if *v == 0.0 {
            continue;
        }
        ts.shape().decompose(flat, &mut idx);
        let i1 = idx[0];
        let mut m = w[i1] * u[i1].powi(-(d as i32 - 2)) / cert.rho;
        for &j in &idx[1..] {
            m *= u[j];
        }
        *v *= m;
    }
    TensorOccupationMeasure::new(DenseTensor::new(ts.shape().clone(), values, true)?)
}

/// Random measure in the balance polytope supported on supp(t), produced by
/// Dykstra alternating projections between the affine constraints and the
/// nonnegative orthant, one variable per tail-symmetry class.
pub fn random_feasible_measure(
    t: &DenseTensor,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<TensorOccupationMeasure> {
    use rand::Rng;
    let (n, d) = t.equi()?;
    let ts = if t.partially_symmetric { t.clone() } else { t.symmetrize_tail() };
    let sparse = SparseSupportTensor::from_dense(&ts)?;
    let classes = sparse.entries();
    let nc = classes.len();
    if nc == 0 {
        return Err(TenspecError::Domain("empty support has no feasible measure".into()));
    }
    let orbit: Vec<f64> = classes.iter().map(|e| e.orbit_size() as f64).collect();
    // Constraint rows: total mass = 1, then balance rows for states
    // 0..n-1 (the last balance row is a linear combination of the others).
    let n_rows = n.max(1);
    let mut c = Mat::zeros(n_rows, nc);
    let mut b = vec![0.0; n_rows];
    b[0] = 1.0;
    for (k, e) in classes.iter().enumerate() {
        c.set(0, k, orbit[k]);
        for j in 0..n.saturating_sub(1) {
            let row = if e.state() == j { orbit[k] } else { 0.0 };
            let col = e.tail_count(j) as f64 / (d as f64 - 1.0) * orbit[k];
            c.set(j + 1, k, row - col);
        }
    }
    let cct = {
        let mut m = Mat::zeros(n_rows, n_rows);
        for i in 0..n_rows {
            for j in 0..n_rows {
                let mut s = 0.0;
                for k in 0..nc {
                    s += c.get(i, k) * c.get(j, k);
                }
                m.set(i, j, s);
            }
        }
        m
    };
    let project_affine = |x: &[f64]| -> Vec<f64> {
        let mut rhs = vec![0.0; n_rows];
        for i in 0..n_rows {
            let mut s = -b[i];
            for k in 0..nc {
                s += c.get(i, k) * x[k];
            }
            rhs[i] = s;
        }
        let lam = linalg::solve(&cct, &rhs)
            .or_else(|| linalg::solve_least_squares(&cct, &rhs))
            .expect("constraint Gram system is solvable after dropping the redundant row");
        let mut y = x.to_vec();
        for k in 0..nc {
            let mut s = 0.0;
            for i in 0..n_rows {
                s += c.get(i, k) * lam[i];
            }
            y[k] -= s;
        }
        y
    };
    let residual = |x: &[f64]| -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..n_rows {
            let mut s = -b[i];
            for k in 0..nc {
                s += c.get(i, k) * x[k];
            }
            r = r.max(s.abs());
        }
        for &v in x {
            r = r.max(-v);
        }
        r
    };
    let mut x: Vec<f64> = (0..nc).map(|_| rng.gen::<f64>()).collect();
    let s: f64 = x.iter().zip(&orbit).map(|(v, o)| v * o).sum();
    for v in &mut x {
        *v /= s;
    }
    let mut p = vec![0.0; nc];
    let mut q = vec![0.0; nc];
    let mut ok = false;
    for _ in 0..100_000 {
        let xp: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + b).collect();
        let y = project_affine(&xp);
        for k in 0..nc {
            p[k] = xp[k] - y[k];
        }
        let yq: Vec<f64> = y.iter().zip(&q).map(|(a, b)| a + b).collect();
        for k in 0..nc {
            x[k] = yq[k].max(0.0);
            q[k] = yq[k] - x[k];
        }
        if residual(&x) <= 1e-13 {
            ok = true;
            break;
        }
    }
    if !ok && residual(&x) > 1e-12 {
        return Err(TenspecError::Convergence(format!(
            "alternating projection stalled at residual {}",
            residual(&x)
        )));
    }
    let mut values = vec![0.0; ts.values().len()];
    let mut idx = vec![0usize; d];
    for (k, e) in classes.iter().enumerate() {
        let v = x[k].max(0.0);
        // Spread the class value over its orbit by symmetrizing a canonical
        // placement.
        idx[0] = e.state();
        idx[1..].copy_from_slice(e.tail());
        values[ts.shape().flat_index(&idx)] = v * orbit[k];
    }
    let raw = DenseTensor::new(ts.shape().clone(), values, false)?;
    TensorOccupationMeasure::new(raw.symmetrize_tail())
}

/// Outcome of a Donsker-Varadhan minimization.
#[derive(Debug, Clone, Copy)]
pub struct DvOutcome {
    pub value: EntropyValue,
    pub gradient_norm: f64,
    pub iterations: usize,
}

fn dv_minimize(
    objective: &dyn Fn(&[f64]) -> Result<f64>,
    gradient: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    y0: Vec<f64>,
    grad_tol: f64,
    unbounded_below: f64,
) -> Result<DvOutcome> {
    let n = y0.len();
    let mut y = y0;
    let mut fy = objective(&y)?;
    let mut g = gradient(&y)?;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut step = 1.0_f64;
    let mut iterations = 0usize;
    loop {
        if fy < unbounded_below {
            return Ok(DvOutcome {
                value: EntropyValue::MinusInfinity,
                gradient_norm: norm_inf(&g),
                iterations,
            });
        }
        if norm_inf(&g) <= grad_tol || iterations >= 50_000 {
            break;
        }
        iterations += 1;
        if let Some((py, pg)) = &prev {
            let mut ss = 0.0;
            let mut sy = 0.0;
            for j in 0..n {
                let sj = y[j] - py[j];
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
        let mut moved = false;
        for _ in 0..60 {
            let yn: Vec<f64> = (0..n).map(|j| y[j] - alpha * g[j]).collect();
            let fnv = objective(&yn)?;
            if fnv <= fy - 1e-4 * alpha * g2 {
                prev = Some((y.clone(), g.clone()));
                y = yn;
                fy = fnv;
                g = gradient(&y)?;
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if !moved {
            break;
        }
    }
    let gnorm = norm_inf(&g);
    if gnorm > 1e-5 {
        return Err(TenspecError::Convergence(format!(
            "descent stalled with gradient norm {gnorm} and bounded objective {fy}"
        )));
    }
    Ok(DvOutcome { value: EntropyValue::Finite(fy), gradient_norm: gnorm, iterations })
}

/// inf over x > 0 of sum p_i log(T(x)_i / x_i^{d-1}), by convex descent in
/// y = log x starting from the eigenvector; always at most log rho, with
/// equality at p_i = u_i w_i. Minus infinity is declared on unbounded
/// descent.
pub fn donsker_varadhan(t: &DenseTensor, p: &[f64], grad_tol: f64) -> Result<DvOutcome> {
    let (n, d) = t.equi()?;
    check_simplex(p, n)?;
    let ts = if t.partially_symmetric { t.clone() } else { t.symmetrize_tail() };
    let cert = spectral_radius(&ts, &SolverOptions::default())?;
    let y0 = match &cert.u {
        Some(u) => u.iter().map(|v| v.ln()).collect(),
        None => vec![0.0; n],
    };
    let dm1 = d as f64 - 1.0;
    let p_obj = p.to_vec();
    let p_grad = p.to_vec();
    let ts_obj = ts.clone();
    let ts_grad = ts;
    let obj = move |y: &[f64]| -> Result<f64> {
        let z: Vec<f64> = y.iter().map(|v| v.exp()).collect();
        let tz = ts_obj.apply(&z)?;
        let mut f = 0.0;
        for i in 0..z.len() {
            if p_obj[i] == 0.0 {
                continue;
            }
            if tz[i] <= 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            f += p_obj[i] * (tz[i].ln() - dm1 * y[i]);
        }
        Ok(f)
    };
    let grad = move |y: &[f64]| -> Result<Vec<f64>> {
        let z: Vec<f64> = y.iter().map(|v| v.exp()).collect();
        let tz = ts_grad.apply(&z)?;
        let dt = ts_grad.differential(&z)?;
        let mut g = vec![0.0; n];
        for j in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                if p_grad[i] == 0.0 || tz[i] <= 0.0 {
                    continue;
                }
                s += p_grad[i] * dt.get(i, j) * z[j] / tz[i];
            }
            g[j] = s - dm1 * p_grad[j];
        }
        Ok(g)
    };
    let floor = cert.rho.max(1e-300).ln() - 50.0;
    dv_minimize(&obj, &grad, y0, grad_tol, floor)
}

fn check_simplex(p: &[f64], n: usize) -> Result<()> {
    if p.len() != n {
        return Err(TenspecError::Shape("p must have length n".into()));
    }
    if p.iter().any(|&v| v < 0.0) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-8 {
        return Err(TenspecError::Domain("p must lie in the probability simplex".into()));
    }
    Ok(())
}

/// inf over x > 0 of sum p_i T(x)_i / x_i^{d-1}; at most rho, with equality
/// at p_i = u_i w_i.
pub fn donsker_varadhan_exp(t: &DenseTensor, p: &[f64], grad_tol: f64) -> Result<DvOutcome> {
    let (n, d) = t.equi()?;
    check_simplex(p, n)?;
    let ts = if t.partially_symmetric { t.clone() } else { t.symmetrize_tail() };
    let cert = spectral_radius(&ts, &SolverOptions::default())?;
    let y0: Vec<f64> = match &cert.u {
        Some(u) => u.iter().map(|v| v.ln()).collect(),
        None => vec![0.0; n],
    };
    let dm1 = d as f64 - 1.0;
    let p_obj = p.to_vec();
    let p_grad = p.to_vec();
    let ts_obj = ts.clone();
    let ts_grad = ts;
    let obj = move |y: &[f64]| -> Result<f64> {
        let z: Vec<f64> = y.iter().map(|v| v.exp()).collect();
        let tz = ts_obj.apply(&z)?;
        let mut f = 0.0;
        for i in 0..z.len() {
            f += p_obj[i] * tz[i] * (-dm1 * y[i]).exp();
        }
        Ok(f)
    };
    let grad = move |y: &[f64]| -> Result<Vec<f64>> {
        let n = y.len();
        let z: Vec<f64> = y.iter().map(|v| v.exp()).collect();
        let tz = ts_grad.apply(&z)?;
        let dt = ts_grad.differential(&z)?;
        let mut g = vec![0.0; n];
        for i in 0..n {
            let scale = p_grad[i] * (-dm1 * y[i]).exp();
            if scale == 0.0 {
                continue;
            }
            for j in 0..n {
                g[j] += scale * dt.get(i, j) * z[j];
            }
            g[i] -= dm1 * scale * tz[i];
        }
        Ok(g)
    };
    let floor = cert.rho * 1e-20;
    dv_minimize(&obj, &grad, y0, grad_tol, floor)
}

//! Tropical (max-times) spectral radius and eigenvectors by three
//! independent algorithms: damped fixed-point iteration, Howard policy
//! iteration on the equivalent mean-payoff decision process, and exhaustive
//! enumeration of uniform-out-degree cycles. Also the LP emitter/verifier
//! and the Hadamard-power limit toward the tropical radius.
//!
//! All computation is carried out in log (max-plus) coordinates; values are
//! exponentiated only at the boundary.

use crate::error::{Result, TenspecError};
use crate::linalg::{self, Mat};
use crate::perron::{spectral_radius, SolverOptions};
use crate::tensor::{DenseTensor, SparseSupportTensor};
use serde::Serialize;
use std::fmt::Write as _;

/// Which algorithm produced a tropical eigenpair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TropicalMethod {
    KmIteration,
    PolicyIteration,
    CycleEnumeration,
}

/// Choice of one concise entry (its tail) per state; states without a usable
/// entry carry no choice and the policy is partial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy {
    pub choice: Vec<Option<Vec<usize>>>,
}

impl Policy {
    pub fn is_complete(&self) -> bool {
        self.choice.iter().all(|c| c.is_some())
    }
}

/// Tropical eigenpair: max over concise entries of t v_{i2}...v_{id} equals
/// rho_trop v_i^{d-1} for every state with v_i > 0.
#[derive(Debug, Clone)]
pub struct TropicalEigenPair {
    pub rho_trop: f64,
    pub log_rho: f64,
    pub v: Vec<f64>,
    pub method: TropicalMethod,
    pub optimal_policy: Option<Policy>,
}

impl TropicalEigenPair {
    /// Largest log-domain violation of the eigen-equation over states with
    /// a positive eigenvector coordinate.
    pub fn log_residual(&self, t: &SparseSupportTensor) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..t.n {
            if self.v[i] <= 0.0 {
                continue;
            }
            let mut best = f64::NEG_INFINITY;
            for e in t.entries_for_state(i) {
                let mut s = e.value.ln();
                let mut dead = false;
                for &j in e.tail() {
                    if self.v[j] <= 0.0 {
                        dead = true;
                        break;
                    }
                    s += self.v[j].ln();
                }
                if !dead {
                    best = best.max(s);
                }
            }
            let rhs = self.log_rho + (t.d as f64 - 1.0) * self.v[i].ln();
            worst = worst.max((best - rhs).abs());
        }
        worst
    }
}

/// A strongly connected multi-digraph with uniform out-degree d-1, given by
/// one concise entry per vertex. `adjacency` and `invariant` are indexed by
/// the sorted `vertices` list; the invariant measure u satisfies
/// A^T u = (d-1) u with unit mass.
#[derive(Debug, Clone)]
pub struct KCycle {
    pub vertices: Vec<usize>,
    /// (state, tail) pairs, one per vertex in `vertices` order.
    pub choices: Vec<(usize, Vec<usize>)>,
    pub adjacency: Mat,
    pub invariant: Vec<f64>,
}

/// result_i = max over concise entries with first index i of
/// t x_{i2}...x_{id}; 0 when the state has no entries.
pub fn tropical_apply(t: &SparseSupportTensor, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != t.n || x.iter().any(|&v| !(v >= 0.0)) {
        return Err(TenspecError::Domain("x must be a nonnegative n-vector".into()));
    }
    let mut out = vec![0.0; t.n];
    for e in t.entries() {
        let mut p = e.value;
        for &j in e.tail() {
            p *= x[j];
        }
        let i = e.state();
        if p > out[i] {
            out[i] = p;
        }
    }
    Ok(out)
}

/// Log-domain apply: g(y)_i = max over entries of ln t + sum of y over the
/// tail; minus infinity when the state has no entries.
fn log_apply(t: &SparseSupportTensor, y: &[f64]) -> Vec<f64> {
    let mut out = vec![f64::NEG_INFINITY; t.n];
    for e in t.entries() {
        let mut s = e.value.ln();
        for &j in e.tail() {
            s += y[j];
        }
        let i = e.state();
        if s > out[i] {
            out[i] = s;
        }
    }
    out
}

fn support_adjacency(t: &SparseSupportTensor) -> Vec<Vec<usize>> {
    let mut adj = vec![std::collections::BTreeSet::new(); t.n];
    for e in t.entries() {
        for &j in e.tail() {
            adj[e.state()].insert(j);
        }
    }
    adj.into_iter().map(|s| s.into_iter().collect()).collect()
}

/// Weak irreducibility of the expanded support: the state digraph is
/// strongly connected.
pub fn sparse_weakly_irreducible(t: &SparseSupportTensor) -> bool {
    if t.n == 1 {
        return !t.entries().is_empty();
    }
    let adj = support_adjacency(t);
    let comps = linalg::strongly_connected_components(adj.len(), &adj);
    comps.len() == 1 && comps[0].len() == t.n
}

/// Damped fixed-point iteration y <- (y + g(y))/2 in log coordinates, with
/// mean normalization; the per-iterate bounds
/// (d-1) min_i (g(y)_i/(d-1) - y_i) <= log rho_trop <= (d-1) max_i (...)
/// are tracked monotonically and certify the returned value.
pub fn tropical_eigenpair_km(
    t: &SparseSupportTensor,
    tol: f64,
    max_iter: usize,
) -> Result<TropicalEigenPair> {
    if !sparse_weakly_irreducible(t) {
        return Err(TenspecError::Domain(
            "damped iteration needs a weakly irreducible support".into(),
        ));
    }
    let n = t.n;
    let dm1 = t.d as f64 - 1.0;
    let mut y = vec![0.0_f64; n];
    let mut best_lo = f64::NEG_INFINITY;
    let mut best_hi = f64::INFINITY;
    let mut done = false;
    for _ in 0..max_iter {
        let g: Vec<f64> = log_apply(t, &y).iter().map(|v| v / dm1).collect();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = g[i] - y[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        best_lo = best_lo.max(dm1 * lo);
        best_hi = best_hi.min(dm1 * hi);
        if best_hi - best_lo <= tol {
            done = true;
            break;
        }
        let mut next: Vec<f64> = (0..n).map(|i| 0.5 * (y[i] + g[i])).collect();
        let mean = next.iter().sum::<f64>() / n as f64;
        for v in &mut next {
            *v -= mean;
        }
        y = next;
    }
    if !done {
        return Err(TenspecError::Convergence(format!(
            "damped iteration exhausted {max_iter} iterations; oscillation bound [{best_lo}, {best_hi}]"
        )));
    }
    let log_rho = 0.5 * (best_lo + best_hi);
    let mean = y.iter().sum::<f64>() / n as f64;
    let v: Vec<f64> = y.iter().map(|yi| (yi - mean).exp()).collect();
    Ok(TropicalEigenPair {
        rho_trop: log_rho.exp(),
        log_rho,
        v,
        method: TropicalMethod::KmIteration,
        optimal_policy: None,
    })
}

/// Closed active set: repeatedly drop states with no entry whose tail stays
/// active. Remaining states support infinite play.
fn active_states(t: &SparseSupportTensor) -> Vec<bool> {
    let mut active = vec![false; t.n];
    for e in t.entries() {
        active[e.state()] = true;
    }
    loop {
        let mut changed = false;
        for i in 0..t.n {
            if !active[i] {
                continue;
            }
            let usable = t
                .entries_for_state(i)
                .any(|e| e.tail().iter().all(|&j| active[j]));
            if !usable {
                active[i] = false;
                changed = true;
            }
        }
        if !changed {
            return active;
        }
    }
}

struct Mdp {
    /// Global indices of active states.
    states: Vec<usize>,
    /// Per active state: usable entries as (reward, transition row, tail).
    actions: Vec<Vec<(f64, Vec<f64>, Vec<usize>)>>,
}

fn build_mdp(t: &SparseSupportTensor) -> Result<Mdp> {
    let active = active_states(t);
    let states: Vec<usize> = (0..t.n).filter(|&i| active[i]).collect();
    if states.is_empty() {
        return Err(TenspecError::Domain(
            "no closed sub-support: the tropical radius is zero and has no eigenpair".into(),
        ));
    }
    let local = {
        let mut m = vec![usize::MAX; t.n];
        for (k, &s) in states.iter().enumerate() {
            m[s] = k;
        }
        m
    };
    let dm1 = t.d as f64 - 1.0;
    let mut actions = vec![Vec::new(); states.len()];
    for e in t.entries() {
        if !active[e.state()] || e.tail().iter().any(|&j| !active[j]) {
            continue;
        }
        let mut row = vec![0.0; states.len()];
        for &j in e.tail() {
            row[local[j]] += 1.0 / dm1;
        }
        actions[local[e.state()]].push((e.value.ln(), row, e.tail().to_vec()));
    }
    Ok(Mdp { states, actions })
}

/// Gain and bias of the Markov chain of a fixed policy, handling several
/// recurrent classes and transient states.
fn evaluate_policy(mdp: &Mdp, pol: &[usize]) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = mdp.states.len();
    let p: Vec<&Vec<f64>> = (0..m).map(|i| &mdp.actions[i][pol[i]].1).collect();
    let r: Vec<f64> = (0..m).map(|i| mdp.actions[i][pol[i]].0).collect();
    let adj: Vec<Vec<usize>> = (0..m)
        .map(|i| (0..m).filter(|&j| p[i][j] > 0.0).collect())
        .collect();
    let comps = linalg::strongly_connected_components(adj.len(), &adj);
    let mut g = vec![f64::NAN; m];
    let mut h = vec![f64::NAN; m];
    let mut recurrent = vec![false; m];
    for comp in &comps {
        let inside: std::collections::HashSet<usize> = comp.iter().copied().collect();
        if !comp.iter().all(|&i| adj[i].iter().all(|j| inside.contains(j))) {
            continue;
        }
        let k = comp.len();
        let mut sub = Mat::zeros(k, k);
        for (a, &i) in comp.iter().enumerate() {
            for (b, &j) in comp.iter().enumerate() {
                sub.set(a, b, p[i][j]);
            }
        }
        let pi = linalg::stationary_distribution(&sub).ok_or_else(|| TenspecError::Convergence("stationary distribution solve failed".into()))?;
        let gain: f64 = comp.iter().enumerate().map(|(a, &i)| pi[a] * r[i]).sum();
        // Bias: (I - P) h = r - gain on the class, normalized by pi.h = 0.
        let mut rows = Vec::with_capacity(k + 1);
        let mut rhs = Vec::with_capacity(k + 1);
        for (a, &i) in comp.iter().enumerate() {
            let mut row = vec![0.0; k];
            for (b, _) in comp.iter().enumerate() {
                row[b] = -sub.get(a, b);
            }
            row[a] += 1.0;
            rows.push(row);
            rhs.push(r[i] - gain);
        }
        rows.push(pi.clone());
        rhs.push(0.0);
        let sys = Mat::from_rows(&rows);
        let hb = linalg::solve_least_squares(&sys, &rhs).ok_or_else(|| {
            TenspecError::Convergence("bias least-squares solve failed".into())
        })?;
        for (a, &i) in comp.iter().enumerate() {
            recurrent[i] = true;
            g[i] = gain;
            h[i] = hb[a];
        }
    }
    let transient: Vec<usize> = (0..m).filter(|&i| !recurrent[i]).collect();
    if !transient.is_empty() {
        let k = transient.len();
        let mut sys = Mat::zeros(k, k);
        let mut rhs_g = vec![0.0; k];
        for (a, &i) in transient.iter().enumerate() {
            for (b, &j) in transient.iter().enumerate() {
                sys.set(a, b, if a == b { 1.0 } else { 0.0 } - p[i][j]);
            }
            let mut acc = 0.0;
            for j in 0..m {
                if recurrent[j] {
                    acc += p[i][j] * g[j];
                }
            }
            rhs_g[a] = acc;
        }
        let gt = linalg::solve(&sys, &rhs_g)
            .ok_or_else(|| TenspecError::Convergence("transient gain system is singular".into()))?;
        for (a, &i) in transient.iter().enumerate() {
            g[i] = gt[a];
        }
        let mut rhs_h = vec![0.0; k];
        for (a, &i) in transient.iter().enumerate() {
            let mut acc = r[i] - g[i];
            for j in 0..m {
                if recurrent[j] {
                    acc += p[i][j] * h[j];
                }
            }
            rhs_h[a] = acc;
        }
        let ht = linalg::solve(&sys, &rhs_h)
            .ok_or_else(|| TenspecError::Convergence("transient bias system is singular".into()))?;
        for (a, &i) in transient.iter().enumerate() {
            h[i] = ht[a];
        }
    }
    Ok((g, h))
}

/// Howard policy iteration on the mean-payoff decision process: states are
/// tensor states, an action is a concise entry, the reward is its log value,
/// and the transition law picks each tail index with probability 1/(d-1).
/// Improvement is two-phase (gain, then bias) with a strict 1e-12 margin and
/// first-in-order tie-break, which prevents cycling.
pub fn tropical_eigenpair_policy(t: &SparseSupportTensor) -> Result<TropicalEigenPair> {
    let mdp = build_mdp(t)?;
    let m = mdp.states.len();
    let dm1 = t.d as f64 - 1.0;
    let margin = 1e-12;
    // Initial policy: first action per state.
    let mut pol = vec![0usize; m];
    let mut g;
    let mut h;
    let mut iters = 0usize;
    loop {
        iters += 1;
        if iters > 10_000 {
            return Err(TenspecError::Convergence(
                "policy iteration exceeded its improvement budget".into(),
            ));
        }
        let (gv, hv) = evaluate_policy(&mdp, &pol)?;
        g = gv;
        h = hv;
        let mut improved = false;
        // Gain phase.
        for i in 0..m {
            let cur: f64 = mdp.actions[i][pol[i]].1.iter().zip(&g).map(|(a, b)| a * b).sum();
            let mut best = cur;
            let mut best_a = pol[i];
            for (a, (_, row, _)) in mdp.actions[i].iter().enumerate() {
                let val: f64 = row.iter().zip(&g).map(|(x, y)| x * y).sum();
                if val > best + margin {
                    best = val;
                    best_a = a;
                }
            }
            if best_a != pol[i] {
                pol[i] = best_a;
                improved = true;
            }
        }
        if improved {
            continue;
        }
        // Bias phase among gain-optimal actions.
        for i in 0..m {
            let gain_i: f64 = mdp.actions[i][pol[i]].1.iter().zip(&g).map(|(a, b)| a * b).sum();
            let cur = mdp.actions[i][pol[i]].0
                + mdp.actions[i][pol[i]].1.iter().zip(&h).map(|(a, b)| a * b).sum::<f64>();
            let mut best = cur;
            let mut best_a = pol[i];
            for (a, (rw, row, _)) in mdp.actions[i].iter().enumerate() {
                let gv: f64 = row.iter().zip(&g).map(|(x, y)| x * y).sum();
                if gv < gain_i - margin {
                    continue;
                }
                let val: f64 = rw + row.iter().zip(&h).map(|(x, y)| x * y).sum::<f64>();
                if val > best + margin {
                    best = val;
                    best_a = a;
                }
            }
            if best_a != pol[i] {
                pol[i] = best_a;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    let log_rho = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    // Eigenvector: exp(h/(d-1)) on top-gain states, 0 elsewhere.
    let top: Vec<usize> = (0..m).filter(|&i| g[i] >= log_rho - 1e-9).collect();
    let mean_h = top.iter().map(|&i| h[i]).sum::<f64>() / top.len() as f64;
    let mut v = vec![0.0; t.n];
    for &i in &top {
        v[mdp.states[i]] = ((h[i] - mean_h) / dm1).exp();
    }
    let mut choice = vec![None; t.n];
    for i in 0..m {
        choice[mdp.states[i]] = Some(mdp.actions[i][pol[i]].2.clone());
    }
    Ok(TropicalEigenPair {
        rho_trop: log_rho.exp(),
        log_rho,
        v,
        method: TropicalMethod::PolicyIteration,
        optimal_policy: Some(Policy { choice }),
    })
}

pub const CYCLE_ENUMERATION_CAP: usize = 1_000_000;

/// All uniform-out-degree-(d-1) strongly connected sub-supports: for every
/// vertex subset, every assignment of one usable concise entry per vertex
/// whose multigraph is strongly connected on the whole subset.
pub fn enumerate_k_cycles(t: &SparseSupportTensor) -> Result<Vec<KCycle>> {
    let n = t.n;
    if n > 20 {
        return Err(TenspecError::Capability(
            "cycle enumeration is limited to n <= 20".into(),
        ));
    }
    let dm1 = t.d as f64 - 1.0;
    // Work estimate across subsets.
    let mut work: usize = 0;
    for mask in 1u32..(1u32 << n) {
        let mut prod: usize = 1;
        let mut ok = true;
        for i in 0..n {
            if mask & (1 << i) == 0 {
                continue;
            }
            let cnt = t
                .entries_for_state(i)
                .filter(|e| e.tail().iter().all(|&j| mask & (1 << j) != 0))
                .count();
            if cnt == 0 {
                ok = false;
                break;
            }
            prod = prod.saturating_mul(cnt);
        }
        if ok {
            work = work.saturating_add(prod);
        }
        if work > CYCLE_ENUMERATION_CAP {
            return Err(TenspecError::Capability(format!(
                "cycle enumeration would visit more than {CYCLE_ENUMERATION_CAP} assignments"
            )));
        }
    }
    let mut cycles = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let verts: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let mut options: Vec<Vec<&crate::tensor::SupportEntry>> = Vec::with_capacity(verts.len());
        let mut ok = true;
        for &i in &verts {
            let opts: Vec<_> = t
                .entries_for_state(i)
                .filter(|e| e.tail().iter().all(|&j| mask & (1 << j) != 0))
                .collect();
            if opts.is_empty() {
                ok = false;
                break;
            }
            options.push(opts);
        }
        if !ok {
            continue;
        }
        let k = verts.len();
        let local = {
            let mut m = vec![usize::MAX; n];
            for (a, &v) in verts.iter().enumerate() {
                m[v] = a;
            }
            m
        };
        let mut pick = vec![0usize; k];
        loop {
            // Build the multigraph of this assignment.
            let mut a = Mat::zeros(k, k);
            for (vi, &p) in pick.iter().enumerate() {
                for &j in options[vi][p].tail() {
                    a.add_to(vi, local[j], 1.0);
                }
            }
            let adj: Vec<Vec<usize>> = (0..k)
                .map(|i| (0..k).filter(|&j| a.get(i, j) > 0.0).collect())
                .collect();
            let comps = linalg::strongly_connected_components(adj.len(), &adj);
            if comps.len() == 1 && comps[0].len() == k {
                let mut chain = Mat::zeros(k, k);
                for i in 0..k {
                    for j in 0..k {
                        chain.set(i, j, a.get(i, j) / dm1);
                    }
                }
                let u = linalg::stationary_distribution(&chain).ok_or_else(|| TenspecError::Convergence("stationary distribution solve failed".into()))?;
                let choices: Vec<(usize, Vec<usize>)> = verts
                    .iter()
                    .zip(&pick)
                    .enumerate()
                    .map(|(vi, (&v, &p))| (v, options[vi][p].tail().to_vec()))
                    .collect();
                cycles.push(KCycle {
                    vertices: verts.clone(),
                    choices,
                    adjacency: a,
                    invariant: u,
                });
            }
            // Next assignment.
            let mut carry = true;
            for vi in 0..k {
                if !carry {
                    break;
                }
                pick[vi] += 1;
                if pick[vi] < options[vi].len() {
                    carry = false;
                } else {
                    pick[vi] = 0;
                }
            }
            if carry {
                break;
            }
        }
    }
    Ok(cycles)
}

/// Log of the cycle weight: sum over vertices of u(gamma)_v ln t at the
/// chosen entry.
pub fn log_cycle_weight(gamma: &KCycle, t: &SparseSupportTensor) -> Result<f64> {
    let mut acc = 0.0;
    for (a, (state, tail)) in gamma.choices.iter().enumerate() {
        let value = t
            .entries_for_state(*state)
            .find(|e| e.tail() == &tail[..])
            .map(|e| e.value)
            .ok_or_else(|| {
                TenspecError::Domain(format!(
                    "cycle choice at state {} is not in the support",
                    state + 1
                ))
            })?;
        acc += gamma.invariant[a] * value.ln();
    }
    Ok(acc)
}

/// Geometric-mean cycle weight.
pub fn cycle_weight(gamma: &KCycle, t: &SparseSupportTensor) -> Result<f64> {
    Ok(log_cycle_weight(gamma, t)?.exp())
}

/// Brute-force tropical radius: the best cycle weight over all enumerated
/// cycles. The eigenvalue comes from the enumeration; the eigenvector
/// witness is filled in by the damped iteration when the support allows it.
pub fn tropical_radius_by_cycles(t: &SparseSupportTensor) -> Result<TropicalEigenPair> {
    let cycles = enumerate_k_cycles(t)?;
    if cycles.is_empty() {
        return Err(TenspecError::Domain(
            "support contains no uniform-out-degree cycle".into(),
        ));
    }
    let mut log_rho = f64::NEG_INFINITY;
    for c in &cycles {
        log_rho = log_rho.max(log_cycle_weight(c, t)?);
    }
    let v = if sparse_weakly_irreducible(t) {
        tropical_eigenpair_km(t, 1e-11, 200_000)?.v
    } else {
        vec![1.0; t.n]
    };
    Ok(TropicalEigenPair {
        rho_trop: log_rho.exp(),
        log_rho,
        v,
        method: TropicalMethod::CycleEnumeration,
        optimal_policy: None,
    })
}

/// Primal and dual linear programs in the documented plain-text format.
#[derive(Debug, Clone)]
pub struct LpTexts {
    pub primal: String,
    pub dual: String,
}

fn entry_name(prefix: &str, index: &[usize]) -> String {
    let mut s = prefix.to_string();
    for &i in index {
        let _ = write!(s, "_{}", i + 1);
    }
    s
}

/// Emits the primal program
/// min lambda s.t. ln t + sum over the tail of u_j <= lambda + (d-1) u_{i1}
/// (one constraint per concise entry, folded so each variable appears once)
/// and its dual over entry weights mu with mass and per-state balance
/// constraints. Equalities are written as constraint pairs since the format
/// allows `<=` only.
pub fn emit_lp(t: &SparseSupportTensor) -> Result<LpTexts> {
    if t.entries().is_empty() {
        return Err(TenspecError::Domain("cannot emit an LP for an empty support".into()));
    }
    let dm1 = t.d as f64 - 1.0;
    let mut primal = String::new();
    primal.push_str("min: lambda\n");
    for e in t.entries() {
        let mut coeff = vec![0.0_f64; t.n];
        for &j in e.tail() {
            coeff[j] += 1.0;
        }
        coeff[e.state()] -= dm1;
        let mut line = format!("{}: {:.17e}", entry_name("c", &e.index), e.value.ln());
        for (j, &c) in coeff.iter().enumerate() {
            if c != 0.0 {
                let _ = write!(line, " {} {} u{}", if c >= 0.0 { "+" } else { "-" }, c.abs(), j + 1);
            }
        }
        line.push_str(" <= lambda\n");
        primal.push_str(&line);
    }

    let mut dual = String::new();
    dual.push_str("max:");
    for e in t.entries() {
        let _ = write!(dual, " + {:.17e} {}", e.value.ln(), entry_name("mu", &e.index));
    }
    dual.push('\n');
    // Mass: sum mu = 1 as a <= pair.
    let mass: String = t
        .entries()
        .iter()
        .map(|e| format!(" + 1 {}", entry_name("mu", &e.index)))
        .collect();
    let _ = writeln!(dual, "mass_upper:{mass} <= 1");
    let neg_mass: String = t
        .entries()
        .iter()
        .map(|e| format!(" - 1 {}", entry_name("mu", &e.index)))
        .collect();
    let _ = writeln!(dual, "mass_lower:{neg_mass} <= -1");
    for j in 0..t.n {
        let mut up = format!("balance_{}_upper:", j + 1);
        let mut lo = format!("balance_{}_lower:", j + 1);
        for e in t.entries() {
            let mut c = 0.0;
            if e.state() == j {
                c += 1.0;
            }
            c -= e.tail_count(j) as f64 / dm1;
            if c != 0.0 {
                let name = entry_name("mu", &e.index);
                let _ = write!(up, " {} {} {}", if c >= 0.0 { "+" } else { "-" }, c.abs(), name);
                let _ = write!(lo, " {} {} {}", if c <= 0.0 { "+" } else { "-" }, c.abs(), name);
            }
        }
        up.push_str(" <= 0\n");
        lo.push_str(" <= 0\n");
        dual.push_str(&up);
        dual.push_str(&lo);
    }
    for e in t.entries() {
        let _ = writeln!(dual, "sign_{0}: - 1 {0} <= 0", entry_name("mu", &e.index));
    }
    Ok(LpTexts { primal, dual })
}

/// Largest violation of the primal constraints by (lambda, u) in log domain.
pub fn verify_primal(t: &SparseSupportTensor, lambda_log: f64, u_log: &[f64]) -> Result<f64> {
    if u_log.len() != t.n {
        return Err(TenspecError::Shape("u must have length n".into()));
    }
    let dm1 = t.d as f64 - 1.0;
    let mut worst = f64::NEG_INFINITY;
    for e in t.entries() {
        let mut lhs = e.value.ln();
        for &j in e.tail() {
            lhs += u_log[j];
        }
        worst = worst.max(lhs - lambda_log - dm1 * u_log[e.state()]);
    }
    Ok(worst)
}

/// Dual weights (one per concise entry, in `entries()` order) built from the
/// stationary frequencies of the optimal policy's best recurrent class.
pub fn dual_from_policy(t: &SparseSupportTensor, pair: &TropicalEigenPair) -> Result<Vec<f64>> {
    let policy = pair
        .optimal_policy
        .as_ref()
        .ok_or_else(|| TenspecError::Domain("eigenpair carries no policy".into()))?;
    let dm1 = t.d as f64 - 1.0;
    let chosen: Vec<Option<&Vec<usize>>> = policy.choice.iter().map(|c| c.as_ref()).collect();
    let states: Vec<usize> = (0..t.n).filter(|&i| chosen[i].is_some()).collect();
    let local = {
        let mut m = vec![usize::MAX; t.n];
        for (k, &s) in states.iter().enumerate() {
            m[s] = k;
        }
        m
    };
    let m = states.len();
    let mut p = Mat::zeros(m, m);
    for (k, &i) in states.iter().enumerate() {
        for &j in chosen[i].unwrap() {
            if local[j] == usize::MAX {
                return Err(TenspecError::Domain(
                    "policy transitions into a state without a choice".into(),
                ));
            }
            p.add_to(k, local[j], 1.0 / dm1);
        }
    }
    let adj: Vec<Vec<usize>> = (0..m)
        .map(|i| (0..m).filter(|&j| p.get(i, j) > 0.0).collect())
        .collect();
    let comps = linalg::strongly_connected_components(adj.len(), &adj);
    let mut best: Option<(f64, Vec<usize>, Vec<f64>)> = None;
    for comp in &comps {
        let inside: std::collections::HashSet<usize> = comp.iter().copied().collect();
        if !comp.iter().all(|&i| adj[i].iter().all(|j| inside.contains(j))) {
            continue;
        }
        let k = comp.len();
        let mut sub = Mat::zeros(k, k);
        for (a, &i) in comp.iter().enumerate() {
            for (b, &j) in comp.iter().enumerate() {
                sub.set(a, b, p.get(i, j));
            }
        }
        let pi = linalg::stationary_distribution(&sub).ok_or_else(|| TenspecError::Convergence("stationary distribution solve failed".into()))?;
        let mut gain = 0.0;
        for (a, &i) in comp.iter().enumerate() {
            let gi = states[i];
            let value = t
                .entries_for_state(gi)
                .find(|e| Some(&e.tail().to_vec()) == chosen[gi])
                .map(|e| e.value)
                .ok_or_else(|| TenspecError::Domain("policy choice left the support".into()))?;
            gain += pi[a] * value.ln();
        }
        if best.as_ref().map_or(true, |(g, _, _)| gain > *g) {
            best = Some((gain, comp.clone(), pi));
        }
    }
    let (_, comp, pi) = best.ok_or_else(|| {
        TenspecError::Domain("policy chain has no recurrent class".into())
    })?;
    let mut mu = vec![0.0; t.entries().len()];
    for (a, &i) in comp.iter().enumerate() {
        let gi = states[i];
        for (idx, e) in t.entries().iter().enumerate() {
            if e.state() == gi && Some(&e.tail().to_vec()) == chosen[gi] {
                mu[idx] = pi[a];
            }
        }
    }
    Ok(mu)
}

/// Dual objective and worst constraint violation of entry weights mu.
pub fn verify_dual(t: &SparseSupportTensor, mu: &[f64]) -> Result<(f64, f64)> {
    if mu.len() != t.entries().len() {
        return Err(TenspecError::Shape(
            "mu must assign one weight per concise entry".into(),
        ));
    }
    let dm1 = t.d as f64 - 1.0;
    let mut objective = 0.0;
    let mut violation: f64 = 0.0;
    let mut mass = 0.0;
    for (e, &m) in t.entries().iter().zip(mu) {
        violation = violation.max(-m);
        objective += m * e.value.ln();
        mass += m;
    }
    violation = violation.max((mass - 1.0).abs());
    for j in 0..t.n {
        let mut bal = 0.0;
        for (e, &m) in t.entries().iter().zip(mu) {
            if e.state() == j {
                bal += m;
            }
            bal -= m * e.tail_count(j) as f64 / dm1;
        }
        violation = violation.max(bal.abs());
    }
    Ok((objective, violation))
}

/// Trace of s -> rho(T^{os})^{1/s}; nonincreasing and converging to the
/// tropical radius. Computed on the max-normalized tensor so Hadamard powers
/// stay in range, then rescaled.
#[derive(Debug, Clone)]
pub struct RhoInfinityReport {
    pub trace: Vec<(u32, f64)>,
    pub value: f64,
}

pub fn rho_infinity(
    t: &DenseTensor,
    schedule: &[u32],
    opts: &SolverOptions,
) -> Result<RhoInfinityReport> {
    let scale = t.max_entry();
    if scale <= 0.0 {
        return Err(TenspecError::Domain("zero tensor has trivial limit".into()));
    }
    let base = t.scale(1.0 / scale);
    let mut trace = Vec::with_capacity(schedule.len());
    for &s in schedule {
        if s == 0 {
            return Err(TenspecError::Domain("schedule exponents must be positive".into()));
        }
        let pow = base.hadamard_power(s as f64)?;
        // The s-th root divides the relative error by s, so the per-power
        // tolerance may grow linearly in s without losing trace accuracy.
        let opts_s = if s == 1 {
            *opts
        } else {
            SolverOptions {
                tol: opts.tol.max(s as f64 * 2e-10),
                max_iter: opts.max_iter.max(400_000),
            }
        };
        let rho = spectral_radius(&pow, &opts_s)?.rho;
        trace.push((s, scale * rho.powf(1.0 / s as f64)));
    }
    let value = trace.last().map(|&(_, v)| v).unwrap();
    Ok(RhoInfinityReport { trace, value })
}

pub fn default_power_schedule() -> Vec<u32> {
    vec![1, 2, 4, 8, 16, 32, 64, 128, 256]
}

/// Hadamard bounds linking the classical and tropical radii:
/// rho(T o E) <= rho(T) rho_trop(E) and rho(E) <= rho(pat E) rho_trop(E).
#[derive(Debug, Clone)]
pub struct TropicalBoundsReport {
    pub rho_te: f64,
    pub rho_t_times_trop_e: f64,
    pub rho_e: f64,
    pub rho_pat_times_trop_e: f64,
}

pub fn tropical_bounds_check(
    t: &DenseTensor,
    e: &DenseTensor,
    opts: &SolverOptions,
) -> Result<TropicalBoundsReport> {
    if t.shape() != e.shape() {
        return Err(TenspecError::Shape("shapes must match".into()));
    }
    let es = if e.partially_symmetric { e.clone() } else { e.symmetrize_tail() };
    let sparse = SparseSupportTensor::from_dense(&es)?;
    let trop = tropical_eigenpair_policy(&sparse)?.rho_trop;
    let rho_te = spectral_radius(&t.hadamard(e)?, opts)?.rho;
    let rho_t = spectral_radius(t, opts)?.rho;
    let rho_e = spectral_radius(e, opts)?.rho;
    let rho_pat = spectral_radius(&e.pattern(), opts)?.rho;
    Ok(TropicalBoundsReport {
        rho_te,
        rho_t_times_trop_e: rho_t * trop,
        rho_e,
        rho_pat_times_trop_e: rho_pat * trop,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble;
    use crate::tensor::SupportEntry;

    /// Two-state order-4 support with a known closed-form tropical radius
    /// 2^{13/4}.
    fn two_state_order_four() -> SparseSupportTensor {
        SparseSupportTensor::new(
            2,
            4,
            vec![
                SupportEntry { index: vec![0, 0, 0, 1], value: 8.0 },
                SupportEntry { index: vec![0, 0, 1, 1], value: 1.0 },
                SupportEntry { index: vec![1, 0, 0, 0], value: 16.0 },
                SupportEntry { index: vec![1, 1, 1, 1], value: 2.0 },
            ],
        )
        .unwrap()
    }

    fn diagonal_sparse(diag: &[f64], d: usize) -> SparseSupportTensor {
        let entries = diag
            .iter()
            .enumerate()
            .map(|(i, &v)| SupportEntry { index: vec![i; d], value: v })
            .collect();
        SparseSupportTensor::new(diag.len(), d, entries).unwrap()
    }

    /// Maximum cycle mean of a log-weight digraph by Karp's algorithm.
    fn karp_max_mean(n: usize, edges: &[(usize, usize, f64)]) -> f64 {
        let neg = f64::NEG_INFINITY;
        let mut dp = vec![vec![neg; n]; n + 1];
        for v in 0..n {
            dp[0][v] = 0.0;
        }
        for k in 1..=n {
            for &(u, v, w) in edges {
                if dp[k - 1][u] > neg {
                    let cand = dp[k - 1][u] + w;
                    if cand > dp[k][v] {
                        dp[k][v] = cand;
                    }
                }
            }
        }
        let mut best = neg;
        for v in 0..n {
            if dp[n][v] <= neg {
                continue;
            }
            let mut worst = f64::INFINITY;
            for k in 0..n {
                if dp[k][v] > neg {
                    worst = worst.min((dp[n][v] - dp[k][v]) / (n - k) as f64);
                }
            }
            best = best.max(worst);
        }
        best
    }

    #[test]
    fn tropical_apply_examples() {
        let t = diagonal_sparse(&[2.0, 3.0], 3);
        let out = tropical_apply(&t, &[2.0, 1.0]).unwrap();
        assert_eq!(out, vec![8.0, 3.0]);

        let t = two_state_order_four();
        let out = tropical_apply(&t, &[1.0, 1.0]).unwrap();
        assert_eq!(out, vec![8.0, 16.0]);

        // Monotone in x.
        let lo = tropical_apply(&t, &[0.5, 1.0]).unwrap();
        let hi = tropical_apply(&t, &[1.0, 1.5]).unwrap();
        for i in 0..2 {
            assert!(lo[i] <= hi[i]);
        }
    }

    #[test]
    fn km_on_diagonal_support() {
        let t = diagonal_sparse(&[2.0], 3);
        let pair = tropical_eigenpair_km(&t, 1e-12, 10_000).unwrap();
        assert!((pair.rho_trop - 2.0).abs() < 1e-10);
    }

    #[test]
    fn worked_example_closed_form() {
        let t = two_state_order_four();
        let expected = 13.0 / 4.0 * 2.0_f64.ln();

        let policy = tropical_eigenpair_policy(&t).unwrap();
        assert!((policy.log_rho - expected).abs() <= 1e-12, "policy {}", policy.log_rho);
        let choice = policy.optimal_policy.as_ref().unwrap();
        assert_eq!(choice.choice[0].as_deref(), Some(&[0, 0, 1][..]));
        assert_eq!(choice.choice[1].as_deref(), Some(&[0, 0, 0][..]));

        let cycles = tropical_radius_by_cycles(&t).unwrap();
        assert!((cycles.log_rho - expected).abs() <= 1e-12, "cycles {}", cycles.log_rho);

        let km = tropical_eigenpair_km(&t, 1e-11, 500_000).unwrap();
        assert!((km.log_rho - expected).abs() <= 1e-10, "km {}", km.log_rho);
        assert!(km.log_residual(&t) <= 1e-9);
    }

    #[test]
    fn worked_example_cycle_enumeration() {
        let t = two_state_order_four();
        let cycles = enumerate_k_cycles(&t).unwrap();
        assert_eq!(cycles.len(), 3);
        // The two-vertex cycle choosing (0,0,1) and (0,0,0) has adjacency
        // [[2,1],[3,0]] and invariant measure (3/4, 1/4).
        let c = cycles
            .iter()
            .find(|c| {
                c.vertices == vec![0, 1]
                    && c.choices[0].1 == vec![0, 0, 1]
                    && c.choices[1].1 == vec![0, 0, 0]
            })
            .expect("principal cycle present");
        assert_eq!(c.adjacency.get(0, 0), 2.0);
        assert_eq!(c.adjacency.get(0, 1), 1.0);
        assert_eq!(c.adjacency.get(1, 0), 3.0);
        assert_eq!(c.adjacency.get(1, 1), 0.0);
        assert!((c.invariant[0] - 0.75).abs() < 1e-12);
        assert!((c.invariant[1] - 0.25).abs() < 1e-12);
        let w = log_cycle_weight(c, &t).unwrap();
        assert!((w - (0.75 * 8.0_f64.ln() + 0.25 * 16.0_f64.ln())).abs() < 1e-13);

        // Self-loop at state 2 has weight 2.
        let c = cycles.iter().find(|c| c.vertices == vec![1]).unwrap();
        assert!((cycle_weight(c, &t).unwrap() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn kcycle_invariants_hold() {
        let mut rng = ensemble::rng_from_seed(3);
        let t = ensemble::random_sparse_support(3, 3, 0.4, &mut rng).unwrap();
        let dm1 = t.d as f64 - 1.0;
        for c in enumerate_k_cycles(&t).unwrap() {
            let k = c.vertices.len();
            // Uniform out-degree d-1.
            for i in 0..k {
                let deg: f64 = (0..k).map(|j| c.adjacency.get(i, j)).sum();
                assert_eq!(deg, dm1);
            }
            // A^T u = (d-1) u with unit mass.
            let atu = c.adjacency.matvec_transpose(&c.invariant);
            for i in 0..k {
                assert!((atu[i] - dm1 * c.invariant[i]).abs() < 1e-12);
            }
            assert!((c.invariant.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_cycles_are_singletons() {
        let t = diagonal_sparse(&[2.0, 5.0, 1.0], 3);
        let cycles = enumerate_k_cycles(&t).unwrap();
        assert_eq!(cycles.len(), 3);
        let pair = tropical_radius_by_cycles(&t).unwrap();
        assert!((pair.rho_trop - 5.0).abs() < 1e-12);
    }

    #[test]
    fn cross_method_agreement_on_random_supports() {
        let mut rng = ensemble::rng_from_seed(11);
        for case in 0..12 {
            let (n, d) = match case % 4 {
                0 => (3, 3),
                1 => (4, 3),
                2 => (3, 4),
                _ => (2, 4),
            };
            let t = ensemble::random_sparse_support(n, d, 0.4, &mut rng).unwrap();
            let km = tropical_eigenpair_km(&t, 1e-11, 500_000).unwrap();
            let policy = tropical_eigenpair_policy(&t).unwrap();
            let cycles = tropical_radius_by_cycles(&t).unwrap();
            assert!(
                (km.log_rho - policy.log_rho).abs() <= 1e-9,
                "km {} vs policy {}",
                km.log_rho,
                policy.log_rho
            );
            assert!(
                (cycles.log_rho - policy.log_rho).abs() <= 1e-10,
                "cycles {} vs policy {}",
                cycles.log_rho,
                policy.log_rho
            );
            assert!(km.log_residual(&t) <= 1e-8);
            assert!(policy.log_residual(&t) <= 1e-8);
        }
    }

    #[test]
    fn d2_matches_karp_max_cycle_mean() {
        let mut rng = ensemble::rng_from_seed(13);
        for _ in 0..10 {
            let t = ensemble::random_sparse_support(4, 2, 0.5, &mut rng).unwrap();
            let edges: Vec<(usize, usize, f64)> = t
                .entries()
                .iter()
                .map(|e| (e.state(), e.tail()[0], e.value.ln()))
                .collect();
            let oracle = karp_max_mean(4, &edges);
            let pair = tropical_eigenpair_policy(&t).unwrap();
            assert!(
                (pair.log_rho - oracle).abs() <= 1e-10,
                "policy {} vs karp {}",
                pair.log_rho,
                oracle
            );
        }
    }

    #[test]
    fn tropical_cw_sandwich() {
        let mut rng = ensemble::rng_from_seed(17);
        let t = ensemble::random_sparse_support(3, 3, 0.5, &mut rng).unwrap();
        let pair = tropical_eigenpair_policy(&t).unwrap();
        for _ in 0..20 {
            let x = ensemble::random_positive_vector(3, 0.2, 2.0, &mut rng);
            let tx = tropical_apply(&t, &x).unwrap();
            let ratios: Vec<f64> = (0..3).map(|i| tx[i] / (x[i] * x[i])).collect();
            let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!(lo <= pair.rho_trop * (1.0 + 1e-12));
            assert!(hi >= pair.rho_trop * (1.0 - 1e-12));
        }
    }

    #[test]
    fn scale_equivariance_in_log_domain() {
        let mut rng = ensemble::rng_from_seed(19);
        let t = ensemble::random_sparse_support(3, 3, 0.5, &mut rng).unwrap();
        let scaled = SparseSupportTensor::new(
            t.n,
            t.d,
            t.entries()
                .iter()
                .map(|e| SupportEntry { index: e.index.clone(), value: 3.0 * e.value })
                .collect(),
        )
        .unwrap();
        let a = tropical_eigenpair_policy(&t).unwrap();
        let b = tropical_eigenpair_policy(&scaled).unwrap();
        assert!((b.log_rho - a.log_rho - 3.0_f64.ln()).abs() <= 1e-12);
    }

    #[test]
    fn lp_emission_and_verification() {
        let t = two_state_order_four();
        let lp = emit_lp(&t).unwrap();
        assert_eq!(lp.primal.lines().filter(|l| l.contains("<= lambda")).count(), 4);
        assert!(lp.dual.contains("mu_1_1_1_2"));

        let pair = tropical_eigenpair_policy(&t).unwrap();
        let u_log: Vec<f64> = pair.v.iter().map(|v| v.ln()).collect();
        let worst = verify_primal(&t, pair.log_rho, &u_log).unwrap();
        assert!(worst <= 1e-9, "primal infeasible by {worst}");
        assert!(worst >= -1e-9, "no tight primal constraint ({worst})");

        let mu = dual_from_policy(&t, &pair).unwrap();
        let (objective, violation) = verify_dual(&t, &mu).unwrap();
        assert!(violation <= 1e-9, "dual violation {violation}");
        assert!((objective - pair.log_rho).abs() <= 1e-9);
    }

    #[test]
    fn lp_round_trip_on_random_supports() {
        let mut rng = ensemble::rng_from_seed(23);
        for _ in 0..10 {
            let t = ensemble::random_sparse_support(3, 3, 0.5, &mut rng).unwrap();
            let pair = tropical_eigenpair_policy(&t).unwrap();
            let u_log: Vec<f64> = pair.v.iter().map(|v| v.ln()).collect();
            let worst = verify_primal(&t, pair.log_rho, &u_log).unwrap();
            assert!(worst.abs() <= 1e-8);
            let mu = dual_from_policy(&t, &pair).unwrap();
            let (objective, violation) = verify_dual(&t, &mu).unwrap();
            assert!(violation <= 1e-8);
            assert!((objective - pair.log_rho).abs() <= 1e-8);
        }
    }

    #[test]
    fn rho_infinity_trace_descends_to_tropical() {
        let mut rng = ensemble::rng_from_seed(29);
        let dense = ensemble::random_positive_tensor(3, 3, &mut rng);
        let report = rho_infinity(&dense, &default_power_schedule(), &SolverOptions::default()).unwrap();
        for w in report.trace.windows(2) {
            assert!(w[1].1 <= w[0].1 * (1.0 + 1e-9), "trace increased: {:?}", w);
        }
        let sparse = SparseSupportTensor::from_dense(&dense).unwrap();
        let trop = tropical_eigenpair_policy(&sparse).unwrap().rho_trop;
        assert!(
            (report.value - trop).abs() <= 1e-3 * trop.max(1.0),
            "limit {} vs tropical {}",
            report.value,
            trop
        );
    }

    #[test]
    fn rho_infinity_constant_on_diagonal() {
        let mut t = DenseTensor::zeros(crate::tensor::Shape::equidimensional(2, 3).unwrap());
        t.set(&[0, 0, 0], 0.5);
        t.set(&[1, 1, 1], 2.0);
        t.partially_symmetric = true;
        let report = rho_infinity(&t, &[1, 2, 4], &SolverOptions::default()).unwrap();
        for &(_, v) in &report.trace {
            assert!((v - 2.0).abs() < 1e-6);
        }
    }

    #[test]
    fn hadamard_tropical_bounds_hold() {
        let mut rng = ensemble::rng_from_seed(31);
        for _ in 0..5 {
            let t = ensemble::random_positive_tensor(3, 3, &mut rng);
            let e = ensemble::random_positive_tensor(3, 3, &mut rng);
            let report = tropical_bounds_check(&t, &e, &SolverOptions::default()).unwrap();
            assert!(report.rho_te <= report.rho_t_times_trop_e * (1.0 + 1e-9));
            assert!(report.rho_e <= report.rho_pat_times_trop_e * (1.0 + 1e-9));
        }
    }

    #[test]
    fn stateless_supports_are_reduced_or_rejected() {
        // State 2 has no entries and state 1 depends on it: nothing closed.
        let t = SparseSupportTensor::new(
            2,
            3,
            vec![SupportEntry { index: vec![0, 1, 1], value: 1.0 }],
        )
        .unwrap();
        assert!(tropical_eigenpair_policy(&t).is_err());

        // State 2 has no entries but state 1 self-loops: reduction keeps 1.
        let t = SparseSupportTensor::new(
            2,
            3,
            vec![
                SupportEntry { index: vec![0, 0, 0], value: 3.0 },
                SupportEntry { index: vec![0, 1, 1], value: 100.0 },
            ],
        )
        .unwrap();
        let pair = tropical_eigenpair_policy(&t).unwrap();
        assert!((pair.rho_trop - 3.0).abs() < 1e-12);
        assert_eq!(pair.v[1], 0.0);
    }
}

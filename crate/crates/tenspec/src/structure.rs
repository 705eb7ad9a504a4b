//! Structural classification of nonnegative tensors: weak irreducibility,
//! irreducibility, weak indecomposability, indecomposability.

use crate::error::{Result, TenspecError};
use crate::linalg::strongly_connected_components;
use crate::tensor::DenseTensor;
use serde::Serialize;

/// Hard cap on the total vertex count for the exact indecomposability check;
/// above this the subset enumeration is refused.
pub const INDECOMPOSABILITY_VERTEX_CAP: usize = 20;

/// Outcome of the four classifiers. `indecomposable` is `None` when the
/// exact check was skipped because the vertex count exceeds the cap.
/// Witnesses are separating index sets (0-based) for the failed properties.
#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub weakly_irreducible: bool,
    pub irreducible: bool,
    pub weakly_indecomposable: bool,
    pub indecomposable: Option<bool>,
    pub weak_irreducibility_witness: Option<Vec<usize>>,
    pub irreducibility_witness: Option<Vec<usize>>,
}

/// Positive entries as (first index, tail) pairs.
fn support_entries(t: &DenseTensor) -> Result<Vec<(usize, Vec<usize>)>> {
    let (_, d) = t.equi()?;
    let mut out = Vec::new();
    let mut idx = vec![0usize; d];
    for (flat, &v) in t.values().iter().enumerate() {
        if v > 0.0 {
            t.shape().decompose(flat, &mut idx);
            out.push((idx[0], idx[1..].to_vec()));
        }
    }
    Ok(out)
}

/// Digraph on [n] with an edge i -> j iff some positive entry has first
/// index i and j among its tail indices.
pub fn support_digraph(t: &DenseTensor) -> Result<Vec<Vec<usize>>> {
    let (n, _) = t.equi()?;
    let mut seen = vec![vec![false; n]; n];
    for (i, tail) in support_entries(t)? {
        for &j in &tail {
            seen[i][j] = true;
        }
    }
    Ok(seen
        .into_iter()
        .map(|row| row.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| j).collect())
        .collect())
}

/// Strong connectivity of the support digraph. The witness, when present,
/// is the vertex set of a sink strongly connected component.
pub fn weak_irreducibility(t: &DenseTensor) -> Result<(bool, Option<Vec<usize>>)> {
    let (n, _) = t.equi()?;
    let adj = support_digraph(t)?;
    let comps = strongly_connected_components(n, &adj);
    if comps.len() == 1 {
        Ok((true, None))
    } else {
        // Tarjan's reverse topological order puts a sink component first.
        Ok((false, Some(comps[0].clone())))
    }
}

/// Exact irreducibility by monotone closure.
///
/// A violating set I satisfies I subset of N(I), where N(I) collects the
/// states whose every positive entry has a tail index inside I. For each
/// excluded vertex j the iteration I <- I intersect N(I) from I = [n] - {j}
/// reaches the greatest violating set avoiding j; the tensor is irreducible
/// iff all n closures are empty.
pub fn irreducibility(t: &DenseTensor) -> Result<(bool, Option<Vec<usize>>)> {
    let (n, _) = t.equi()?;
    if n == 1 {
        // No proper nonempty subset exists.
        return Ok((true, None));
    }
    let entries = support_entries(t)?;
    let mut by_state: Vec<Vec<&[usize]>> = vec![Vec::new(); n];
    for (i, tail) in &entries {
        by_state[*i].push(tail);
    }
    for excluded in 0..n {
        let mut in_set = vec![true; n];
        in_set[excluded] = false;
        loop {
            let mut changed = false;
            for i in 0..n {
                if !in_set[i] {
                    continue;
                }
                // i escapes when one of its entries has every tail index
                // outside the current set.
                let escapes = by_state[i]
                    .iter()
                    .any(|tail| tail.iter().all(|&j| !in_set[j]));
                if escapes {
                    in_set[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let witness: Vec<usize> = (0..n).filter(|&i| in_set[i]).collect();
        if !witness.is_empty() {
            return Ok((false, Some(witness)));
        }
    }
    Ok((true, None))
}

/// Connectivity of the undirected d-partite graph whose edges join any two
/// positions of a positive entry. Works for general (non-equidimensional)
/// shapes.
pub fn weak_indecomposability(t: &DenseTensor) -> bool {
    let dims = t.shape().dims().to_vec();
    let d = dims.len();
    let offsets: Vec<usize> = dims
        .iter()
        .scan(0usize, |acc, &m| {
            let o = *acc;
            *acc += m;
            Some(o)
        })
        .collect();
    let total: usize = dims.iter().sum();
    if total <= 1 {
        return true;
    }
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut idx = vec![0usize; d];
    let mut any_edge = false;
    for (flat, &v) in t.values().iter().enumerate() {
        if v <= 0.0 {
            continue;
        }
        t.shape().decompose(flat, &mut idx);
        any_edge = true;
        let v0 = offsets[0] + idx[0];
        for k in 1..d {
            let vk = offsets[k] + idx[k];
            let (a, b) = (find(&mut parent, v0), find(&mut parent, vk));
            if a != b {
                parent[a] = b;
            }
        }
    }
    if !any_edge {
        return false;
    }
    let root = find(&mut parent, 0);
    (1..total).all(|x| find(&mut parent, x) == root)
}

/// Exact indecomposability by subset enumeration over the d-partite vertex
/// set V. A subset I is admissible when it does not contain V_p union V_q
/// for any pair of parts; the tensor is indecomposable when every admissible
/// proper nonempty I has a positive entry with one coordinate in I at some
/// position k and all other coordinates outside I.
pub fn indecomposability(t: &DenseTensor) -> Result<bool> {
    let dims = t.shape().dims().to_vec();
    let d = dims.len();
    let total: usize = dims.iter().sum();
    if total > INDECOMPOSABILITY_VERTEX_CAP {
        return Err(TenspecError::Capability(format!(
            "indecomposability check enumerates subsets of {total} vertices; cap is {INDECOMPOSABILITY_VERTEX_CAP}"
        )));
    }
    let offsets: Vec<usize> = dims
        .iter()
        .scan(0usize, |acc, &m| {
            let o = *acc;
            *acc += m;
            Some(o)
        })
        .collect();
    // Positive entries as vertex-id tuples.
    let mut entries: Vec<Vec<usize>> = Vec::new();
    let mut idx = vec![0usize; d];
    for (flat, &v) in t.values().iter().enumerate() {
        if v > 0.0 {
            t.shape().decompose(flat, &mut idx);
            entries.push((0..d).map(|k| offsets[k] + idx[k]).collect());
        }
    }
    let part_masks: Vec<u64> = (0..d)
        .map(|k| ((1u64 << dims[k]) - 1) << offsets[k])
        .collect();
    let full: u64 = if total == 64 { u64::MAX } else { (1u64 << total) - 1 };
    'subsets: for mask in 1..full {
        // Skip subsets containing two whole parts.
        let mut whole_parts = 0;
        for pm in &part_masks {
            if mask & pm == *pm {
                whole_parts += 1;
                if whole_parts >= 2 {
                    continue 'subsets;
                }
            }
        }
        for e in &entries {
            for k in 0..d {
                let ok = (mask >> e[k]) & 1 == 1
                    && (0..d).all(|j| j == k || (mask >> e[j]) & 1 == 0);
                if ok {
                    continue 'subsets;
                }
            }
        }
        return Ok(false);
    }
    Ok(true)
}

/// Runs every classifier; the exponential check is skipped (None) above its
/// size cap.
pub fn analyze(t: &DenseTensor) -> Result<StructureReport> {
    let (weakly_irreducible, wi_witness) = weak_irreducibility(t)?;
    let (irreducible, ir_witness) = irreducibility(t)?;
    let weakly_indecomposable = weak_indecomposability(t);
    let indecomposable = match indecomposability(t) {
        Ok(b) => Some(b),
        Err(TenspecError::Capability(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(StructureReport {
        weakly_irreducible,
        irreducible,
        weakly_indecomposable,
        indecomposable,
        weak_irreducibility_witness: wi_witness,
        irreducibility_witness: ir_witness,
    })
}

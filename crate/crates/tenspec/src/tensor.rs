//! Tensor storage and algebra: dense and concise-support representations,
//! contraction, differentials, Hadamard and Kronecker products.
//!
//! Indices are 0-based everywhere in this crate; file formats and reports
//! convert to 1-based at the boundary.

use crate::error::{Result, TenspecError};
use crate::linalg::Mat;

/// Dimension list (m_1, ..., m_d) of an order-d tensor, d >= 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(TenspecError::Shape(format!(
                "order must be at least 2, got {}",
                dims.len()
            )));
        }
        if dims.iter().any(|&m| m == 0) {
            return Err(TenspecError::Shape("all dimensions must be positive".into()));
        }
        Ok(Shape { dims })
    }

    /// n x n x ... x n with d factors.
    pub fn equidimensional(n: usize, d: usize) -> Result<Self> {
        Shape::new(vec![n; d])
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_equidimensional(&self) -> bool {
        self.dims.iter().all(|&m| m == self.dims[0])
    }

    /// Row-major flat offset of a multi-index.
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims.len());
        let mut flat = 0;
        for (&i, &m) in idx.iter().zip(&self.dims) {
            debug_assert!(i < m);
            flat = flat * m + i;
        }
        flat
    }

    /// Inverse of `flat_index`, written into `out`.
    pub fn decompose(&self, mut flat: usize, out: &mut [usize]) {
        debug_assert_eq!(out.len(), self.dims.len());
        for k in (0..self.dims.len()).rev() {
            out[k] = flat % self.dims[k];
            flat /= self.dims[k];
        }
    }
}

/// Order-d nonnegative tensor in flat row-major storage.
///
/// `partially_symmetric` asserts exact invariance of the values under
/// permutations of the tail positions 2..d; `validate` checks it bitwise.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Shape,
    values: Vec<f64>,
    pub partially_symmetric: bool,
}

/// A single broken invariant found by `DenseTensor::validate`.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Entry at the index is negative or non-finite.
    Nonnegativity { index: Vec<usize>, value: f64 },
    /// The tensor is flagged partially symmetric but two tail-permuted
    /// positions hold different values.
    Symmetry { index: Vec<usize>, permuted: Vec<usize> },
}

impl DenseTensor {
    pub fn new(shape: Shape, values: Vec<f64>, partially_symmetric: bool) -> Result<Self> {
        if values.len() != shape.len() {
            return Err(TenspecError::Shape(format!(
                "value buffer length {} does not match shape volume {}",
                values.len(),
                shape.len()
            )));
        }
        Ok(DenseTensor { shape, values, partially_symmetric })
    }

    pub fn zeros(shape: Shape) -> Self {
        let len = shape.len();
        DenseTensor { shape, values: vec![0.0; len], partially_symmetric: true }
    }

    /// Diagonal tensor: 1 at (i, i, ..., i), 0 elsewhere.
    pub fn identity(n: usize, d: usize) -> Self {
        let shape = Shape::equidimensional(n, d).expect("valid shape");
        let mut t = DenseTensor::zeros(shape);
        for i in 0..n {
            let idx = vec![i; d];
            let f = t.shape.flat_index(&idx);
            t.values[f] = 1.0;
        }
        t
    }

    /// All-ones tensor J.
    pub fn ones(n: usize, d: usize) -> Self {
        let shape = Shape::equidimensional(n, d).expect("valid shape");
        let len = shape.len();
        DenseTensor { shape, values: vec![1.0; len], partially_symmetric: true }
    }

    pub fn from_fn(shape: Shape, f: impl Fn(&[usize]) -> f64) -> Self {
        let len = shape.len();
        let d = shape.order();
        let mut values = vec![0.0; len];
        let mut idx = vec![0usize; d];
        for (flat, v) in values.iter_mut().enumerate() {
            shape.decompose(flat, &mut idx);
            *v = f(&idx);
        }
        DenseTensor { shape, values, partially_symmetric: false }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values[self.shape.flat_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let f = self.shape.flat_index(idx);
        self.values[f] = v;
    }

    /// (n, d) when equidimensional, else a shape error.
    pub fn equi(&self) -> Result<(usize, usize)> {
        if self.shape.is_equidimensional() {
            Ok((self.shape.dims()[0], self.shape.order()))
        } else {
            Err(TenspecError::Shape(format!(
                "operation needs an equidimensional tensor, got dims {:?}",
                self.shape.dims()
            )))
        }
    }

    pub fn max_entry(&self) -> f64 {
        self.values.iter().cloned().fold(0.0_f64, f64::max)
    }

    pub fn max_diagonal(&self) -> Result<f64> {
        let (n, d) = self.equi()?;
        let mut m = 0.0_f64;
        for i in 0..n {
            m = m.max(self.get(&vec![i; d]));
        }
        Ok(m)
    }

    pub fn scale(&self, c: f64) -> DenseTensor {
        DenseTensor {
            shape: self.shape.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
            partially_symmetric: self.partially_symmetric,
        }
    }

    /// Reports every broken invariant; never fails.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let d = self.shape.order();
        let mut idx = vec![0usize; d];
        for (flat, &v) in self.values.iter().enumerate() {
            if !(v >= 0.0) || !v.is_finite() {
                self.shape.decompose(flat, &mut idx);
                out.push(Violation::Nonnegativity { index: idx.clone(), value: v });
            }
        }
        if self.partially_symmetric {
            let mut perm = vec![0usize; d];
            for flat in 0..self.values.len() {
                self.shape.decompose(flat, &mut idx);
                // Compare against the canonical (sorted-tail) representative
                // only; equality with the representative for every member of
                // the orbit implies pairwise equality.
                perm.copy_from_slice(&idx);
                perm[1..].sort_unstable();
                if perm != idx {
                    let canon = self.shape.flat_index(&perm);
                    if self.values[canon].to_bits() != self.values[flat].to_bits() {
                        out.push(Violation::Symmetry {
                            index: idx.clone(),
                            permuted: perm.clone(),
                        });
                    }
                }
            }
        }
        out
    }

    /// Averages each tail-permutation orbit; the result is exactly (bitwise)
    /// partially symmetric and induces the same map `apply`.
    pub fn symmetrize_tail(&self) -> DenseTensor {
        let d = self.shape.order();
        let len = self.values.len();
        let mut sum: Vec<f64> = vec![0.0; len];
        let mut count: Vec<u32> = vec![0; len];
        let mut idx = vec![0usize; d];
        for flat in 0..len {
            self.shape.decompose(flat, &mut idx);
            idx[1..].sort_unstable();
            let canon = self.shape.flat_index(&idx);
            sum[canon] += self.values[flat];
            count[canon] += 1;
        }
        let mut values = vec![0.0; len];
        for flat in 0..len {
            self.shape.decompose(flat, &mut idx);
            idx[1..].sort_unstable();
            let canon = self.shape.flat_index(&idx);
            values[flat] = sum[canon] / count[canon] as f64;
        }
        DenseTensor { shape: self.shape.clone(), values, partially_symmetric: true }
    }

    /// T(x)_i = sum over tails of t_{i, i2..id} x_{i2} ... x_{id};
    /// the homogeneous map of degree d - 1.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let (n, d) = self.equi()?;
        if x.len() != n {
            return Err(TenspecError::Shape(format!(
                "vector length {} does not match dimension {}",
                x.len(),
                n
            )));
        }
        let mut out = vec![0.0; n];
        let mut idx = vec![0usize; d];
        for (flat, &v) in self.values.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            self.shape.decompose(flat, &mut idx);
            let mut p = v;
            for &j in &idx[1..] {
                p *= x[j];
            }
            out[idx[0]] += p;
        }
        Ok(out)
    }

    /// Differential DT(x) = (d-1) * (t contracted with x on positions 3..d).
    /// Satisfies the Euler identity DT(x) x = (d-1) T(x).
    pub fn differential(&self, x: &[f64]) -> Result<Mat> {
        let (n, d) = self.equi()?;
        if x.len() != n {
            return Err(TenspecError::Shape("vector length mismatch".into()));
        }
        if !self.partially_symmetric {
            return Err(TenspecError::Domain(
                "differential requires a partially symmetric tensor; call symmetrize_tail first"
                    .into(),
            ));
        }
        let mut m = Mat::zeros(n, n);
        let mut idx = vec![0usize; d];
        for (flat, &v) in self.values.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            self.shape.decompose(flat, &mut idx);
            let mut p = v;
            for &j in &idx[2..] {
                p *= x[j];
            }
            m.add_to(idx[0], idx[1], p);
        }
        let scale = (d - 1) as f64;
        let mut out = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, scale * m.get(i, j));
            }
        }
        Ok(out)
    }

    pub fn hadamard(&self, other: &DenseTensor) -> Result<DenseTensor> {
        if self.shape != other.shape {
            return Err(TenspecError::Shape("hadamard product needs identical shapes".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(DenseTensor {
            shape: self.shape.clone(),
            values,
            partially_symmetric: self.partially_symmetric && other.partially_symmetric,
        })
    }

    /// Entrywise power t^s with the convention 0^0 = 0.
    pub fn hadamard_power(&self, s: f64) -> Result<DenseTensor> {
        if !(s >= 0.0) {
            return Err(TenspecError::Domain(format!("exponent must be nonnegative, got {s}")));
        }
        let values = self
            .values
            .iter()
            .map(|&v| if v == 0.0 { 0.0 } else { v.powf(s) })
            .collect();
        Ok(DenseTensor {
            shape: self.shape.clone(),
            values,
            partially_symmetric: self.partially_symmetric,
        })
    }

    /// Kronecker product: entry at paired indices (i_k, j_k) -> i_k * n_k + j_k
    /// equals a(i) * b(j).
    pub fn kronecker(&self, other: &DenseTensor) -> Result<DenseTensor> {
        if self.shape.order() != other.shape.order() {
            return Err(TenspecError::Shape("kronecker product needs equal orders".into()));
        }
        let d = self.shape.order();
        let dims: Vec<usize> = self
            .shape
            .dims()
            .iter()
            .zip(other.shape.dims())
            .map(|(&m, &n)| m * n)
            .collect();
        let shape = Shape::new(dims)?;
        let mut values = vec![0.0; shape.len()];
        let mut ia = vec![0usize; d];
        let mut ib = vec![0usize; d];
        let mut ic = vec![0usize; d];
        for (fa, &va) in self.values.iter().enumerate() {
            if va == 0.0 {
                continue;
            }
            self.shape.decompose(fa, &mut ia);
            for (fb, &vb) in other.values.iter().enumerate() {
                if vb == 0.0 {
                    continue;
                }
                other.shape.decompose(fb, &mut ib);
                for k in 0..d {
                    ic[k] = ia[k] * other.shape.dims()[k] + ib[k];
                }
                values[shape.flat_index(&ic)] = va * vb;
            }
        }
        Ok(DenseTensor {
            shape,
            values,
            partially_symmetric: self.partially_symmetric && other.partially_symmetric,
        })
    }

    /// 0-1 tensor marking the support.
    pub fn pattern(&self) -> DenseTensor {
        let values = self
            .values
            .iter()
            .map(|&v| if v > 0.0 { 1.0 } else { 0.0 })
            .collect();
        DenseTensor {
            shape: self.shape.clone(),
            values,
            partially_symmetric: self.partially_symmetric,
        }
    }

    /// diag(y) applied on the first index: entry (i1, ...) times y_{i1}.
    pub fn diag_scale(&self, y: &[f64]) -> Result<DenseTensor> {
        let (n, d) = self.equi()?;
        if y.len() != n {
            return Err(TenspecError::Shape("diag_scale vector length mismatch".into()));
        }
        let mut values = self.values.clone();
        let mut idx = vec![0usize; d];
        for (flat, v) in values.iter_mut().enumerate() {
            self.shape.decompose(flat, &mut idx);
            *v *= y[idx[0]];
        }
        Ok(DenseTensor {
            shape: self.shape.clone(),
            values,
            partially_symmetric: self.partially_symmetric,
        })
    }

    /// Full contraction of the multilinear form against one vector per mode.
    pub fn contract_all(&self, xs: &[&[f64]]) -> f64 {
        let d = self.shape.order();
        debug_assert_eq!(xs.len(), d);
        let mut idx = vec![0usize; d];
        let mut acc = 0.0;
        for (flat, &v) in self.values.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            self.shape.decompose(flat, &mut idx);
            let mut p = v;
            for k in 0..d {
                p *= xs[k][idx[k]];
            }
            acc += p;
        }
        acc
    }

    /// Contraction against every mode except `mode`; the gradient of the
    /// multilinear form with respect to that mode's vector.
    pub fn contract_except(&self, xs: &[&[f64]], mode: usize) -> Vec<f64> {
        let d = self.shape.order();
        debug_assert_eq!(xs.len(), d);
        let mut idx = vec![0usize; d];
        let mut out = vec![0.0; self.shape.dims()[mode]];
        for (flat, &v) in self.values.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            self.shape.decompose(flat, &mut idx);
            let mut p = v;
            for k in 0..d {
                if k != mode {
                    p *= xs[k][idx[k]];
                }
            }
            out[idx[mode]] += p;
        }
        out
    }

    /// Entrywise comparison a <= b.
    pub fn le(&self, other: &DenseTensor) -> bool {
        self.shape == other.shape
            && self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }
}

/// One entry of the concise support: first index free, tail sorted
/// nondecreasing, strictly positive value.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportEntry {
    pub index: Vec<usize>,
    pub value: f64,
}

impl SupportEntry {
    pub fn state(&self) -> usize {
        self.index[0]
    }

    pub fn tail(&self) -> &[usize] {
        &self.index[1..]
    }

    /// Number of tail positions equal to j.
    pub fn tail_count(&self, j: usize) -> usize {
        self.tail().iter().filter(|&&i| i == j).count()
    }

    /// Number of distinct tail permutations (the symmetry-orbit size).
    pub fn orbit_size(&self) -> usize {
        let k = self.tail().len();
        let mut size = factorial(k);
        let mut run = 1usize;
        for w in 1..k {
            if self.tail()[w] == self.tail()[w - 1] {
                run += 1;
                size /= run;
            } else {
                run = 1;
            }
        }
        size
    }
}

fn factorial(k: usize) -> usize {
    (1..=k).product::<usize>().max(1)
}

/// Concise support encoding of a partially symmetric tensor: one entry per
/// tail-symmetry class, tails sorted, values positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSupportTensor {
    pub n: usize,
    pub d: usize,
    entries: Vec<SupportEntry>,
}

impl SparseSupportTensor {
    pub fn new(n: usize, d: usize, mut entries: Vec<SupportEntry>) -> Result<Self> {
        if d < 2 {
            return Err(TenspecError::Shape("order must be at least 2".into()));
        }
        if n == 0 {
            return Err(TenspecError::Shape("dimension must be positive".into()));
        }
        for e in &entries {
            if e.index.len() != d {
                return Err(TenspecError::Shape(format!(
                    "entry index {:?} does not have order {d}",
                    e.index
                )));
            }
            if e.index.iter().any(|&i| i >= n) {
                return Err(TenspecError::Domain(format!(
                    "entry index {:?} out of range for dimension {n}",
                    e.index
                )));
            }
            if e.tail().windows(2).any(|w| w[0] > w[1]) {
                return Err(TenspecError::Domain(format!(
                    "entry tail must be sorted nondecreasing, got {:?}",
                    e.index
                )));
            }
            if !(e.value > 0.0) || !e.value.is_finite() {
                return Err(TenspecError::Domain(format!(
                    "entry value must be strictly positive and finite, got {}",
                    e.value
                )));
            }
        }
        entries.sort_by(|a, b| a.index.cmp(&b.index));
        if entries.windows(2).any(|w| w[0].index == w[1].index) {
            return Err(TenspecError::Domain(
                "duplicate symmetry class in concise support".into(),
            ));
        }
        Ok(SparseSupportTensor { n, d, entries })
    }

    pub fn entries(&self) -> &[SupportEntry] {
        &self.entries
    }

    pub fn entries_for_state(&self, i: usize) -> impl Iterator<Item = &SupportEntry> {
        self.entries.iter().filter(move |e| e.state() == i)
    }

    /// Concise encoding of an exactly partially symmetric dense tensor.
    pub fn from_dense(t: &DenseTensor) -> Result<Self> {
        let (n, d) = t.equi()?;
        let check = t.clone();
        let check = DenseTensor { partially_symmetric: true, ..check };
        let sym_violations = check
            .validate()
            .into_iter()
            .filter(|v| matches!(v, Violation::Symmetry { .. }))
            .count();
        if sym_violations > 0 {
            return Err(TenspecError::Domain(
                "concise support needs an exactly partially symmetric tensor".into(),
            ));
        }
        let mut entries = Vec::new();
        let mut idx = vec![0usize; d];
        for (flat, &v) in t.values().iter().enumerate() {
            if v <= 0.0 {
                continue;
            }
            t.shape().decompose(flat, &mut idx);
            if idx[1..].windows(2).all(|w| w[0] <= w[1]) {
                entries.push(SupportEntry { index: idx.clone(), value: v });
            }
        }
        SparseSupportTensor::new(n, d, entries)
    }

    /// Expands every concise entry to its full tail-permutation orbit.
    pub fn to_dense(&self) -> DenseTensor {
        let shape = Shape::equidimensional(self.n, self.d).expect("valid shape");
        let mut t = DenseTensor::zeros(shape);
        let mut idx = vec![0usize; self.d];
        for flat in 0..t.values.len() {
            t.shape.decompose(flat, &mut idx);
            idx[1..].sort_unstable();
            if let Ok(pos) = self.entries.binary_search_by(|e| e.index.cmp(&idx)) {
                t.values[flat] = self.entries[pos].value;
            }
        }
        t.partially_symmetric = true;
        t
    }
}

/// Infinity norm of a vector.
pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |a, &b| a.max(b.abs()))
}

/// Euclidean norm of a vector.
pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Componentwise power x^{o e}.
pub fn pow_vec(x: &[f64], e: f64) -> Vec<f64> {
    x.iter().map(|&v| v.powf(e)).collect()
}

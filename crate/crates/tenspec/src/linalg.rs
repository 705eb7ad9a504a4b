//! Small dense linear algebra and graph utilities used by the solvers.
//!
//! Everything here operates on systems of at most a few dozen unknowns, so
//! plain Gaussian elimination with partial pivoting is both adequate and easy
//! to audit.

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub n_rows: usize,
    pub n_cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Mat { n_rows, n_cols, data: vec![0.0; n_rows * n_cols] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = if n_rows == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            assert_eq!(r.len(), n_cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Mat { n_rows, n_cols, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n_cols + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n_cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_cols);
        (0..self.n_rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_rows);
        let mut y = vec![0.0; self.n_cols];
        for i in 0..self.n_rows {
            let xi = x[i];
            if xi != 0.0 {
                for j in 0..self.n_cols {
                    y[j] += self.get(i, j) * xi;
                }
            }
        }
        y
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.n_cols];
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                s[j] += self.get(i, j);
            }
        }
        s
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
/// Returns None when the pivot falls below a hard floor (singular system).
pub fn solve(a: &Mat, b: &[f64]) -> Option<Vec<f64>> {
    assert_eq!(a.n_rows, a.n_cols);
    assert_eq!(b.len(), a.n_rows);
    let n = a.n_rows;
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let (piv, piv_abs) = (col..n)
            .map(|r| (r, m.get(r, col).abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))?;
        if piv_abs < 1e-300 {
            return None;
        }
        if piv != col {
            for j in 0..n {
                let tmp = m.get(col, j);
                m.set(col, j, m.get(piv, j));
                m.set(piv, j, tmp);
            }
            rhs.swap(col, piv);
        }
        let d = m.get(col, col);
        for r in col + 1..n {
            let f = m.get(r, col) / d;
            if f != 0.0 {
                for j in col..n {
                    m.add_to(r, j, -f * m.get(col, j));
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = rhs[row];
        for j in row + 1..n {
            s -= m.get(row, j) * x[j];
        }
        x[row] = s / m.get(row, row);
    }
    Some(x)
}

/// Least-squares solve of an overdetermined system M x = b via the normal
/// equations. Intended for small, well-conditioned augmented systems such as
/// bias equations with an added normalization row.
pub fn solve_least_squares(m: &Mat, b: &[f64]) -> Option<Vec<f64>> {
    assert_eq!(b.len(), m.n_rows);
    let n = m.n_cols;
    let mut mtm = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for r in 0..m.n_rows {
                s += m.get(r, i) * m.get(r, j);
            }
            mtm.set(i, j, s);
        }
    }
    let mut mtb = vec![0.0; n];
    for r in 0..m.n_rows {
        for j in 0..n {
            mtb[j] += m.get(r, j) * b[r];
        }
    }
    solve(&mtm, &mtb)
}

/// Stationary distribution of an irreducible row-stochastic matrix restricted
/// to its own index set: solves z P = z, sum z = 1.
pub fn stationary_distribution(p: &Mat) -> Option<Vec<f64>> {
    assert_eq!(p.n_rows, p.n_cols);
    let n = p.n_rows;
    if n == 1 {
        return Some(vec![1.0]);
    }
    // Rows of (P^T - I) with the last equation replaced by the normalization.
    let mut a = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a.set(i, j, p.get(j, i) - if i == j { 1.0 } else { 0.0 });
        }
    }
    for j in 0..n {
        a.set(n - 1, j, 1.0);
    }
    let mut b = vec![0.0; n];
    b[n - 1] = 1.0;
    match solve(&a, &b) {
        Some(z) => Some(z),
        None => {
            // Rare pivot degeneracies: fall back to the full system in
            // least-squares form with the normalization appended.
            let mut rows = Vec::with_capacity(n + 1);
            for i in 0..n {
                let mut row = vec![0.0; n];
                for j in 0..n {
                    row[j] = p.get(j, i) - if i == j { 1.0 } else { 0.0 };
                }
                rows.push(row);
            }
            rows.push(vec![1.0; n]);
            let m = Mat::from_rows(&rows);
            let mut rhs = vec![0.0; n + 1];
            rhs[n] = 1.0;
            solve_least_squares(&m, &rhs)
        }
    }
}

/// Tarjan's algorithm. Returns strongly connected components in reverse
/// topological order (every edge leaving a component points to an
/// earlier-returned component).
pub fn strongly_connected_components(n: usize, adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    assert_eq!(adj.len(), n);
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut comps: Vec<Vec<usize>> = Vec::new();

    // Iterative DFS: (vertex, next child position).
    for start in 0..n {
        if index[start] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(start, 0)];
        while let Some(&mut (v, ref mut ci)) = call.last_mut() {
            if *ci == 0 {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if *ci < adj[v].len() {
                let w = adj[v][*ci];
                *ci += 1;
                if index[w] == UNSEEN {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
                call.pop();
                if let Some(&mut (p, _)) = call.last_mut() {
                    low[p] = low[p].min(low[v]);
                }
            }
        }
    }
    comps
}

/// Component ids aligned with `strongly_connected_components` output.
pub fn component_ids(n: usize, comps: &[Vec<usize>]) -> Vec<usize> {
    let mut id = vec![0usize; n];
    for (k, comp) in comps.iter().enumerate() {
        for &v in comp {
            id[v] = k;
        }
    }
    id
}

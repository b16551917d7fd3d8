//! Small sparse-matrix and RK4 helpers shared by the integrators.

use num_complex::Complex64;

/// Compressed-row complex matrix. Rows are built in order through [`SparseBuilder`].
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

/// Accumulates (row, col, value) triplets; duplicates are summed.
#[derive(Debug, Clone)]
pub struct SparseBuilder {
    dim: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseBuilder {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            rows: vec![Vec::new(); dim],
        }
    }

    pub fn add(&mut self, row: usize, col: usize, value: Complex64) {
        debug_assert!(row < self.dim && col < self.dim);
        if value == Complex64::new(0.0, 0.0) {
            return;
        }
        let entries = &mut self.rows[row];
        match entries.iter_mut().find(|(c, _)| *c == col) {
            Some((_, v)) => *v += value,
            None => entries.push((col, value)),
        }
    }

    pub fn build(mut self) -> SparseMatrix {
        let mut row_ptr = Vec::with_capacity(self.dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in &mut self.rows {
            row.sort_by_key(|(c, _)| *c);
            for &(c, v) in row.iter() {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        SparseMatrix {
            dim: self.dim,
            row_ptr,
            cols,
            vals,
        }
    }
}

impl SparseMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        self.cols[range.clone()]
            .iter()
            .position(|&c| c == col)
            .map(|i| self.vals[range.start + i])
            .unwrap_or_default()
    }

    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        self.cols[range.clone()]
            .iter()
            .copied()
            .zip(self.vals[range].iter().copied())
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// `out = self * x`.
    pub fn mul_vec(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *o = acc;
        }
    }

    /// `out = self * m` for a dense row-major square matrix `m` of the same size.
    pub fn mul_dense(&self, m: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim;
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            out_row.fill(Complex64::new(0.0, 0.0));
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let v = self.vals[k];
                let src = &m[self.cols[k] * n..(self.cols[k] + 1) * n];
                if v.im == 0.0 {
                    let a = v.re;
                    for (o, s) in out_row.iter_mut().zip(src) {
                        o.re += a * s.re;
                        o.im += a * s.im;
                    }
                } else {
                    for (o, s) in out_row.iter_mut().zip(src) {
                        *o += v * s;
                    }
                }
            }
        }
    }

    /// Copy with `shift` subtracted from every diagonal entry.
    pub fn shifted(&self, shift: f64) -> SparseMatrix {
        let mut m = self.clone();
        for i in 0..m.dim {
            for k in m.row_ptr[i]..m.row_ptr[i + 1] {
                if m.cols[k] == i {
                    m.vals[k] -= shift;
                }
            }
        }
        // rows without a stored diagonal
        let missing: Vec<usize> = (0..m.dim)
            .filter(|&i| !m.cols[m.row_ptr[i]..m.row_ptr[i + 1]].contains(&i))
            .collect();
        if missing.is_empty() || shift == 0.0 {
            return m;
        }
        let mut b = SparseBuilder::new(m.dim);
        for i in 0..m.dim {
            for (c, v) in m.row(i) {
                b.add(i, c, v);
            }
        }
        for i in missing {
            b.add(i, i, Complex64::new(-shift, 0.0));
        }
        b.build()
    }

    /// Largest Gershgorin row radius `max_i sum_j |a_ij|`, a bound on the spectral radius.
    pub fn gershgorin_bound(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| self.row(i).all(|(j, v)| (v - self.get(j, i).conj()).norm() <= tol))
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        let mut m = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Fixed-step RK4 for `dpsi/dt = -i H psi` with preallocated stage buffers.
pub(crate) struct SchrodingerRk4 {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl SchrodingerRk4 {
    pub fn new(dim: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); dim];
        Self {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }

    fn rhs(h: &SparseMatrix, psi: &[Complex64], out: &mut [Complex64]) {
        h.mul_vec(psi, out);
        let minus_i = Complex64::new(0.0, -1.0);
        for o in out.iter_mut() {
            *o *= minus_i;
        }
    }

    pub fn step(&mut self, h: &SparseMatrix, psi: &mut [Complex64], dt: f64) {
        Self::rhs(h, psi, &mut self.k1);
        for ((t, p), k) in self.tmp.iter_mut().zip(psi.iter()).zip(&self.k1) {
            *t = p + k * (0.5 * dt);
        }
        Self::rhs(h, &self.tmp, &mut self.k2);
        for ((t, p), k) in self.tmp.iter_mut().zip(psi.iter()).zip(&self.k2) {
            *t = p + k * (0.5 * dt);
        }
        Self::rhs(h, &self.tmp, &mut self.k3);
        for ((t, p), k) in self.tmp.iter_mut().zip(psi.iter()).zip(&self.k3) {
            *t = p + k * dt;
        }
        Self::rhs(h, &self.tmp, &mut self.k4);
        let w = dt / 6.0;
        for (i, p) in psi.iter_mut().enumerate() {
            *p += (self.k1[i] + (self.k2[i] + self.k3[i]) * 2.0 + self.k4[i]) * w;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn builder_sums_duplicates_and_matches_dense() {
        let mut b = SparseBuilder::new(3);
        b.add(0, 0, c(1.0, 0.0));
        b.add(0, 2, c(0.0, 2.0));
        b.add(0, 2, c(1.0, 0.0));
        b.add(2, 1, c(-3.0, 0.0));
        let m = b.build();
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.get(0, 2), c(1.0, 2.0));
        let x = [c(1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0)];
        let mut y = [c(0.0, 0.0); 3];
        m.mul_vec(&x, &mut y);
        let dense = m.to_dense() * nalgebra::DVector::from_row_slice(&x);
        for i in 0..3 {
            assert!((y[i] - dense[i]).norm() < 1e-14);
        }
    }

    #[test]
    fn shift_touches_only_the_diagonal() {
        let mut b = SparseBuilder::new(2);
        b.add(0, 1, c(1.0, 0.0));
        b.add(1, 0, c(1.0, 0.0));
        b.add(1, 1, c(5.0, 0.0));
        let s = b.build().shifted(2.0);
        assert_eq!(s.get(0, 0), c(-2.0, 0.0));
        assert_eq!(s.get(1, 1), c(3.0, 0.0));
        assert_eq!(s.get(0, 1), c(1.0, 0.0));
    }

    #[test]
    fn rk4_two_level_rabi() {
        // H = sigma_x: |<0|psi(t)>|^2 = cos^2 t
        let mut b = SparseBuilder::new(2);
        b.add(0, 1, c(1.0, 0.0));
        b.add(1, 0, c(1.0, 0.0));
        let h = b.build();
        let mut psi = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let mut rk = SchrodingerRk4::new(2);
        let dt = 1e-3;
        for _ in 0..1000 {
            rk.step(&h, &mut psi, dt);
        }
        assert!((psi[0].norm_sqr() - 1.0f64.cos().powi(2)).abs() < 1e-12);
    }
}

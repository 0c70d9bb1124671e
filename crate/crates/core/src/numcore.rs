//! Vector and sparse-matrix kernels, an unpreconditioned conjugate-gradient
//! solver, zero-mean projection and a splitmix64 random stream.
//!
//! All reductions accumulate in index order, so every routine here is
//! bit-reproducible for identical inputs.

use crate::error::{Error, Result};

pub fn dot(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "dot: length mismatch ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    Ok(dot_unchecked(x, y))
}

#[inline]
pub(crate) fn dot_unchecked(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut s = 0.0;
    for (a, b) in x.iter().zip(y) {
        s += a * b;
    }
    s
}

/// Euclidean norm.
pub fn norm2(x: &[f64]) -> f64 {
    dot_unchecked(x, x).sqrt()
}

/// Mesh-weighted discrete L² norm on a 2D grid, `sqrt(h² Σ xᵢ²)`.
pub fn norm_h(x: &[f64], h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::invalid(format!("norm_h: mesh size must be positive, got {h}")));
    }
    Ok(h * norm2(x))
}

/// `y += a * x`
pub(crate) fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub(crate) fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

/// Arithmetic mean with Neumaier-compensated summation.
pub fn mean(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &v in x {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    (sum + comp) / x.len() as f64
}

/// Removes the mean of `p`.
///
/// A vector whose mean is already zero up to rounding is returned unchanged,
/// which makes the projection exactly idempotent.
pub fn project_zero_mean(p: &[f64]) -> Vec<f64> {
    let mut out = p.to_vec();
    project_zero_mean_in_place(&mut out);
    out
}

pub fn project_zero_mean_in_place(p: &mut [f64]) {
    if p.is_empty() {
        return;
    }
    let m = mean(p);
    let abs_mean = p.iter().map(|v| v.abs()).sum::<f64>() / p.len() as f64;
    if m.abs() <= 8.0 * f64::EPSILON * abs_mean {
        return;
    }
    for v in p.iter_mut() {
        *v -= m;
    }
}

/// Compressed sparse row matrix with sorted, unique column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Assembles from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut sorted = triplets.to_vec();
        for &(r, c, v) in &sorted {
            if r >= rows || c >= cols {
                return Err(Error::invalid(format!(
                    "triplet ({r}, {c}) outside {rows}x{cols} matrix"
                )));
            }
            if !v.is_finite() {
                return Err(Error::invalid(format!("non-finite entry at ({r}, {c})")));
            }
        }
        sorted.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx: Vec<usize> = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            col_idx.push(c);
            values.push(v);
            row_ptr[r + 1] += 1;
            last = Some((r, c));
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self { rows, cols, row_ptr, col_idx, values })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, row_ptr: vec![0; rows + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates the stored entries of row `r` as `(col, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.cols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for c in 0..self.cols {
            counts[c + 1] += counts[c];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        // Rows are visited in increasing order, so each transposed row comes out sorted.
        for r in 0..self.rows {
            for (c, v) in self.row(r) {
                let slot = next[c];
                col_idx[slot] = r;
                values[slot] = v;
                next[c] += 1;
            }
        }
        Self { rows: self.cols, cols: self.rows, row_ptr, col_idx, values }
    }

    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::invalid(format!(
                "spmv: matrix has {} columns, vector has length {}",
                self.cols,
                x.len()
            )));
        }
        let mut y = vec![0.0; self.rows];
        self.spmv_into(x, &mut y);
        Ok(y)
    }

    /// `y = A x` without allocation. Dimensions are the caller's responsibility.
    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for (r, yr) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            *yr = s;
        }
    }

    pub fn to_dense_rows(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.cols]; self.rows];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in self.row(r) {
                row[c] = v;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// `‖b − A x‖ / ‖b‖` from the recurrence residual.
    pub rel_residual: f64,
    pub converged: bool,
}

/// Textbook conjugate gradients for a symmetric positive definite operator.
///
/// `apply(x, y)` must write `A x` into `y`. Hitting `max_iter` is not an error;
/// the outcome reports `converged = false` along with the residual reached.
pub fn cg_solve<F>(
    mut apply: F,
    b: &[f64],
    x0: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<CgOutcome>
where
    F: FnMut(&[f64], &mut [f64]),
{
    if b.len() != x0.len() {
        return Err(Error::invalid("cg_solve: b and x0 differ in length"));
    }
    if !(rel_tol > 0.0) {
        return Err(Error::invalid(format!("cg_solve: rel_tol must be positive, got {rel_tol}")));
    }
    let n = b.len();
    let b_norm = norm2(b);
    let mut x = x0.to_vec();
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgOutcome { x, iterations: 0, rel_residual: 0.0, converged: true });
    }

    let mut ap = vec![0.0; n];
    apply(&x, &mut ap);
    let mut r: Vec<f64> = b.iter().zip(&ap).map(|(bi, ai)| bi - ai).collect();
    let mut p = r.clone();
    let mut rr = dot_unchecked(&r, &r);
    let target = rel_tol * b_norm;

    let mut iterations = 0;
    while rr.sqrt() > target && iterations < max_iter {
        apply(&p, &mut ap);
        let curvature = dot_unchecked(&p, &ap);
        if !(curvature > 0.0) {
            return Err(Error::NotSpd { iteration: iterations, curvature });
        }
        let step = rr / curvature;
        axpy(step, &p, &mut x);
        axpy(-step, &ap, &mut r);
        let rr_next = dot_unchecked(&r, &r);
        let ratio = rr_next / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + ratio * *pi;
        }
        rr = rr_next;
        iterations += 1;
    }

    let rel_residual = rr.sqrt() / b_norm;
    Ok(CgOutcome { x, iterations, rel_residual, converged: rr.sqrt() <= target })
}

/// splitmix64 generator state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[-1, 1)`.
    pub fn next_signed(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }

    pub fn fill_signed(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next_signed()).collect()
    }
}

/// Functional form of one generator step.
pub fn prng_next(state: SplitMix64) -> (f64, SplitMix64) {
    let mut s = state;
    let v = s.next_f64();
    (v, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_examples() {
        assert_eq!(dot(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 11.0);
        assert_eq!(dot(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(dot(&[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]).unwrap(), 0.0);
        assert!(matches!(dot(&[1.0], &[1.0, 2.0]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn norm_h_examples() {
        assert_eq!(norm_h(&[1.0], 1.0).unwrap(), 1.0);
        assert_eq!(norm_h(&[3.0, 4.0], 1.0).unwrap(), 5.0);
        for n in [1usize, 3, 10, 40] {
            let ones = vec![1.0; n * n];
            let v = norm_h(&ones, 1.0 / n as f64).unwrap();
            assert!((v - 1.0).abs() < 1e-14, "n={n}: {v}");
        }
        assert!(norm_h(&[1.0], 0.0).is_err());
        assert!(norm_h(&[1.0], -0.5).is_err());
    }

    #[test]
    fn spmv_examples() {
        let x = vec![1.5, -2.0, 3.25];
        assert_eq!(SparseMatrix::identity(3).spmv(&x).unwrap(), x);
        assert_eq!(SparseMatrix::zeros(3, 3).spmv(&x).unwrap(), vec![0.0; 3]);
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 1, 3.0)]).unwrap();
        assert_eq!(a.spmv(&[1.0, 1.0]).unwrap(), vec![3.0, 3.0]);
        assert!(a.spmv(&[1.0]).is_err());
    }

    #[test]
    fn triplets_sum_duplicates_and_sort() {
        let a = SparseMatrix::from_triplets(2, 3, &[(1, 2, 1.0), (0, 1, 2.0), (1, 0, 4.0), (1, 2, 0.5)])
            .unwrap();
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.get(1, 2), 1.5);
        assert_eq!(a.row(1).map(|(c, _)| c).collect::<Vec<_>>(), vec![0, 2]);
        assert!(SparseMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]).is_err());
        let t = a.transpose();
        assert_eq!((t.rows(), t.cols()), (3, 2));
        assert_eq!(t.get(2, 1), 1.5);
        assert_eq!(t.get(1, 0), 2.0);
    }

    #[test]
    fn cg_identity_one_iteration() {
        let b = vec![1.0, -2.0, 0.5];
        let out = cg_solve(
            |x, y| y.copy_from_slice(x),
            &b,
            &[0.0; 3],
            1e-12,
            10,
        )
        .unwrap();
        assert_eq!(out.iterations, 1);
        assert!(out.converged);
        assert_eq!(out.x, b);
    }

    #[test]
    fn cg_diagonal() {
        let d = [1.0, 2.0, 3.0];
        let out = cg_solve(
            |x, y| {
                for i in 0..3 {
                    y[i] = d[i] * x[i];
                }
            },
            &[1.0, 2.0, 3.0],
            &[0.0; 3],
            1e-12,
            10,
        )
        .unwrap();
        for v in out.x {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cg_reports_breakdown_on_indefinite() {
        let err = cg_solve(
            |x, y| {
                y[0] = x[0];
                y[1] = -x[1];
            },
            &[0.0, 1.0],
            &[0.0; 2],
            1e-12,
            10,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotSpd { .. }));
    }

    #[test]
    fn cg_max_iter_flagged() {
        let out = cg_solve(
            |x, y| {
                for i in 0..x.len() {
                    y[i] = (i + 1) as f64 * x[i];
                }
            },
            &[1.0; 6],
            &[0.0; 6],
            1e-14,
            2,
        )
        .unwrap();
        assert!(!out.converged);
        assert_eq!(out.iterations, 2);
        assert!(out.rel_residual > 1e-14);
    }

    #[test]
    fn project_examples() {
        assert_eq!(project_zero_mean(&[1.0, 1.0, 1.0]), vec![0.0; 3]);
        assert_eq!(project_zero_mean(&[1.0, -1.0]), vec![1.0, -1.0]);
        assert_eq!(project_zero_mean(&[2.0, 4.0, 6.0]), vec![-2.0, 0.0, 2.0]);
    }

    #[test]
    fn splitmix_reference_stream() {
        // Reference values of the published splitmix64 sequence for seed 0.
        let mut g = SplitMix64::new(0);
        assert_eq!(g.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(g.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(g.next_u64(), 0x06C4_5D18_8009_454F);

        let (v0, s) = prng_next(SplitMix64::new(0));
        assert_eq!(v0, (0xE220_A839_7B1D_CDAFu64 >> 11) as f64 / 9_007_199_254_740_992.0);
        assert_eq!(v0, 0.883_310_808_213_642_6);
        let (v1, _) = prng_next(s);
        assert_ne!(v0, v1);
        assert!((0.0..1.0).contains(&v1));

        let a: Vec<f64> = SplitMix64::new(42).fill_signed(16);
        let b: Vec<f64> = SplitMix64::new(42).fill_signed(16);
        assert_eq!(a, b);
    }
}

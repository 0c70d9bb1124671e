//! Dense brute-force references for desk-sized problems: explicit Schur
//! complement, Jacobi eigenvalues, a direct saddle-point solve, and the
//! eigenvalue-wise spectral radius of the pressure error recursion.

use crate::error::{Error, Result};
use crate::numcore::{project_zero_mean, project_zero_mean_in_place, SparseMatrix};
use crate::saddle::{InnerSolve, SaddleProblem};

/// Largest pressure space for which the Schur complement is assembled densely.
pub const MAX_DENSE_SCHUR: usize = 400;
/// Largest total size of the dense saddle-point system.
pub const MAX_DENSE_SYSTEM: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::invalid("ragged rows"));
        }
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite matrix entry"));
        }
        Ok(Self { rows: r, cols: c, data })
    }

    pub fn from_sparse(s: &SparseMatrix) -> Self {
        let mut m = Self::zeros(s.rows(), s.cols());
        for r in 0..s.rows() {
            for (c, v) in s.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::invalid("matvec: dimension mismatch"));
        }
        Ok((0..self.rows)
            .map(|r| self.data[r * self.cols..(r + 1) * self.cols].iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `max |Sᵢⱼ − Sⱼᵢ|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.rows.min(self.cols) {
            for c in r + 1..self.cols.min(self.rows) {
                worst = worst.max((self[(r, c)] - self[(c, r)]).abs());
            }
        }
        worst
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

#[derive(Debug, Clone)]
pub struct DenseSchur {
    /// `(S + Sᵀ)/2`
    pub matrix: DenseMatrix,
    /// `max |S − Sᵀ|` before symmetrization.
    pub asymmetry: f64,
}

/// Column `j` is `S P₀eⱼ`, computed with inner tolerance `1e-13`.
pub fn assemble_dense_schur(prob: &SaddleProblem) -> Result<DenseSchur> {
    let n = prob.n_p();
    if n > MAX_DENSE_SCHUR {
        return Err(Error::TooLarge { size: n, limit: MAX_DENSE_SCHUR });
    }
    let tight = prob.clone().with_inner(InnerSolve { tol: 1e-13, max_iter: 100 * prob.n_u().max(100) });
    let mut s = DenseMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = tight.schur_apply(&project_zero_mean(&e))?;
        e[j] = 0.0;
        for (i, v) in col.into_iter().enumerate() {
            s[(i, j)] = v;
        }
    }
    let asymmetry = s.max_asymmetry();
    let mut sym = s.clone();
    for i in 0..n {
        for j in 0..n {
            sym[(i, j)] = 0.5 * (s[(i, j)] + s[(j, i)]);
        }
    }
    Ok(DenseSchur { matrix: sym, asymmetry })
}

#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector of `values[k]`.
    pub vectors: DenseMatrix,
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// `1e-12‖S‖_F`.
pub fn dense_sym_eigen(s: &DenseMatrix) -> Result<SymEigen> {
    let n = s.rows();
    if s.cols() != n {
        return Err(Error::invalid("eigen: matrix is not square"));
    }
    let scale = s.frobenius();
    if s.max_asymmetry() > 1e-8 * scale {
        return Err(Error::invalid(format!(
            "eigen: matrix is not symmetric (asymmetry {:e})",
            s.max_asymmetry()
        )));
    }
    let mut a = s.clone();
    let mut v = DenseMatrix::identity(n);
    let target = 1e-12 * scale;

    let off = |a: &DenseMatrix| {
        let mut sum = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    sum += a[(p, q)] * a[(p, q)];
                }
            }
        }
        sum.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > target {
        sweeps += 1;
        if sweeps > 100 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, dst)] = v[(k, src)];
        }
    }
    Ok(SymEigen { values, vectors })
}

pub fn dense_sym_eigs(s: &DenseMatrix) -> Result<Vec<f64>> {
    Ok(dense_sym_eigen(s)?.values)
}

/// Eigenvalues of the Schur complement on the zero-mean pressure space.
///
/// The assembled matrix also carries the constant pressure mode with
/// eigenvalue zero; that mode is identified by its eigenvector and dropped.
pub fn schur_spectrum(prob: &SaddleProblem) -> Result<Vec<f64>> {
    let schur = assemble_dense_schur(prob)?;
    let eig = dense_sym_eigen(&schur.matrix)?;
    let n = prob.n_p();
    let inv_sqrt_n = 1.0 / (n as f64).sqrt();
    let constant_mode = (0..n)
        .map(|k| {
            let col = eig.vectors.column(k);
            let align: f64 = col.iter().map(|v| v * inv_sqrt_n).sum();
            (k, align.abs())
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(k, _)| k);
    Ok(eig
        .values
        .iter()
        .enumerate()
        .filter(|(k, _)| Some(*k) != constant_mode)
        .map(|(_, v)| *v)
        .collect())
}

/// `max_λ ρ([[1 − (β+α²)λ, βλ], [1, 0]])` over the given Schur eigenvalues.
pub fn companion_spectral_radius(eigs: &[f64], alpha2: f64, beta: f64) -> Result<f64> {
    if eigs.is_empty() {
        return Err(Error::invalid("companion: empty eigenvalue list"));
    }
    let mut rho: f64 = 0.0;
    for &lambda in eigs {
        if !(lambda > 0.0) {
            return Err(Error::invalid(format!("companion: eigenvalue {lambda:e} is not positive")));
        }
        // Characteristic polynomial z² − a z − c with c = βλ.
        let a = 1.0 - (beta + alpha2) * lambda;
        let c = beta * lambda;
        let disc = a * a + 4.0 * c;
        let r = if disc >= 0.0 {
            let sq = disc.sqrt();
            ((a + sq) / 2.0).abs().max(((a - sq) / 2.0).abs())
        } else {
            // Complex pair: |z|² = −c.
            (-c).sqrt()
        };
        rho = rho.max(r);
    }
    Ok(rho)
}

/// Solves `A u + Bᵀp = f`, `B u = 0`, `Σp = 0` densely.
pub fn direct_solve(prob: &SaddleProblem) -> Result<(Vec<f64>, Vec<f64>)> {
    let n_u = prob.n_u();
    let n_p = prob.n_p();
    let n = n_u + n_p + 1;
    if n > MAX_DENSE_SYSTEM {
        return Err(Error::TooLarge { size: n, limit: MAX_DENSE_SYSTEM });
    }
    let mut k = DenseMatrix::zeros(n, n);
    for r in 0..n_u {
        for (c, v) in prob.a().row(r) {
            k[(r, c)] = v;
        }
        for (c, v) in prob.bt().row(r) {
            k[(r, n_u + c)] = v;
        }
    }
    for r in 0..n_p {
        for (c, v) in prob.b().row(r) {
            k[(n_u + r, c)] = v;
        }
        // Multiplier of the mean constraint; zero at the solution.
        k[(n_u + r, n - 1)] = 1.0;
        k[(n - 1, n_u + r)] = 1.0;
    }
    let mut rhs = vec![0.0; n];
    rhs[..n_u].copy_from_slice(prob.f());

    let x = gauss_solve(k, rhs)?;
    let u = x[..n_u].to_vec();
    let mut p = x[n_u..n_u + n_p].to_vec();
    project_zero_mean_in_place(&mut p);
    Ok((u, p))
}

/// Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: DenseMatrix, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return Err(Error::invalid("gauss_solve: dimension mismatch"));
    }
    let tiny = a.max_abs() * n as f64 * f64::EPSILON;
    for col in 0..n {
        let (piv, pmax) = (col..n)
            .map(|r| (r, a[(r, col)].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if pmax <= tiny {
            return Err(Error::Singular { column: col, pivot: pmax });
        }
        if piv != col {
            for c in 0..n {
                let tmp = a[(col, c)];
                a[(col, c)] = a[(piv, c)];
                a[(piv, c)] = tmp;
            }
            b.swap(col, piv);
        }
        let d = a[(col, col)];
        for r in col + 1..n {
            let factor = a[(r, col)] / d;
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                a[(r, c)] -= factor * a[(col, c)];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= a[(r, c)] * x[c];
        }
        x[r] = s / a[(r, r)];
    }
    Ok(x)
}

use num_complex::Complex64;

use super::matrix::{dot_conj, CMatrix, CVector};
use crate::error::{Error, Result};

/// Lower-triangular Cholesky factor `L` with `A = L L^H`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    factor: CMatrix,
}

impl Cholesky {
    /// Factors a Hermitian positive definite matrix. Only the lower
    /// triangle of `a` is read.
    pub fn new(a: &CMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "cholesky of a {}x{} matrix",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let mut l = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let s = a[(i, j)] - dot_conj(&l.row(i)[..j], &l.row(j)[..j]);
                if i == j {
                    if !(s.re.is_finite() && s.re > 0.0) {
                        return Err(Error::NotPositiveDefinite {
                            pivot: i,
                            value: s.re,
                        });
                    }
                    l[(i, i)] = Complex64::new(s.re.sqrt(), 0.0);
                } else {
                    l[(i, j)] = s / l[(j, j)].re;
                }
            }
        }
        Ok(Cholesky { factor: l })
    }

    pub fn factor(&self) -> &CMatrix {
        &self.factor
    }

    pub fn dim(&self) -> usize {
        self.factor.rows()
    }

    /// Solves `A x = y` for a single right-hand side.
    pub fn solve_vec(&self, y: &[Complex64]) -> Result<CVector> {
        let n = self.dim();
        if y.len() != n {
            return Err(Error::Dimension(format!(
                "rhs of length {} for a system of size {n}",
                y.len()
            )));
        }
        let l = &self.factor;
        let mut z: CVector = Vec::with_capacity(n);
        for i in 0..n {
            let acc = super::matrix::dot(&l.row(i)[..i], &z);
            z.push((y[i] - acc) / l[(i, i)].re);
        }
        // back substitution with L^H, column-oriented so L is walked by rows
        let mut x = z;
        for i in (0..n).rev() {
            x[i] /= l[(i, i)].re;
            let xi = x[i];
            for (k, lik) in l.row(i)[..i].iter().enumerate() {
                x[k] -= lik.conj() * xi;
            }
        }
        Ok(x)
    }

    /// Solves `A X = Y` column by column.
    pub fn solve(&self, y: &CMatrix) -> Result<CMatrix> {
        if y.rows() != self.dim() {
            return Err(Error::Dimension(format!(
                "rhs with {} rows for a system of size {}",
                y.rows(),
                self.dim()
            )));
        }
        let mut out = CMatrix::zeros(y.rows(), y.cols());
        for j in 0..y.cols() {
            let x = self.solve_vec(&y.column(j))?;
            out.set_column(j, &x)?;
        }
        Ok(out)
    }
}

/// Solves `A X = Y` for Hermitian positive definite `A` through its
/// Cholesky factor. Only the lower triangle of `A` is read.
pub fn hermitian_solve(a: &CMatrix, y: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() || a.rows() != y.rows() {
        return Err(Error::Dimension(format!(
            "solve {}x{} against {}x{}",
            a.rows(),
            a.cols(),
            y.rows(),
            y.cols()
        )));
    }
    Cholesky::new(a)?.solve(y)
}

/// Circulant matrix whose column `j` is `first_column` (zero-padded to
/// `size`) rotated down by `j`.
pub fn circulant(first_column: &[Complex64], size: usize) -> Result<CMatrix> {
    if first_column.len() > size {
        return Err(Error::Dimension(format!(
            "first column of length {} exceeds size {size}",
            first_column.len()
        )));
    }
    let mut c = vec![Complex64::new(0.0, 0.0); size];
    c[..first_column.len()].copy_from_slice(first_column);
    Ok(CMatrix::from_fn(size, size, |i, j| c[(i + size - j) % size]))
}

/// `circulant(taps, x.len()) * x` without forming the matrix.
pub fn circular_convolve(taps: &[Complex64], x: &[Complex64]) -> CVector {
    let q = x.len();
    let mut y = vec![Complex64::new(0.0, 0.0); q];
    for (v, h) in taps.iter().enumerate() {
        let v = v % q.max(1);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += h * x[(i + q - v) % q];
        }
    }
    y
}

/// `circulant(taps, x.len())^H * x`, i.e. circular correlation.
pub fn circular_correlate(taps: &[Complex64], x: &[Complex64]) -> CVector {
    let q = x.len();
    let mut y = vec![Complex64::new(0.0, 0.0); q];
    for (v, h) in taps.iter().enumerate() {
        let hc = h.conj();
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += hc * x[(i + v) % q];
        }
    }
    y
}

/// Left-multiplies every column of `m` by `circulant(taps, m.rows())`.
pub fn circulant_mul(taps: &[Complex64], m: &CMatrix) -> CMatrix {
    let q = m.rows();
    let mut out = CMatrix::zeros(q, m.cols());
    for i in 0..q {
        let out_row = out.row_mut(i);
        for (v, h) in taps.iter().enumerate() {
            let src = m.row((i + q - v % q) % q);
            super::matrix::axpy(*h, src, out_row);
        }
    }
    out
}

/// Right-multiplies `m` by `circulant(taps, m.cols())^H`.
pub fn mul_circulant_adjoint(m: &CMatrix, taps: &[Complex64]) -> CMatrix {
    // (m C^H)[i, j] = sum_v conj(h_v) m[i, (j - v) mod q]
    let q = m.cols();
    let mut out = CMatrix::zeros(m.rows(), q);
    for i in 0..m.rows() {
        let src = m.row(i);
        let dst = out.row_mut(i);
        for (v, h) in taps.iter().enumerate() {
            let hc = h.conj();
            let shift = q - v % q;
            for (j, d) in dst.iter_mut().enumerate() {
                let k = j + shift;
                let k = if k >= q { k - q } else { k };
                *d += hc * src[k];
            }
        }
    }
    out
}

/// Smallest singular value of `a`, from inverse iteration on `a^H a`.
/// Returns 0 when the normal matrix is numerically singular.
pub fn min_singular_value(a: &CMatrix) -> f64 {
    let gram = a.gram_cols();
    let chol = match Cholesky::new(&gram) {
        Ok(c) => c,
        Err(_) => return 0.0,
    };
    let n = gram.rows();
    // deterministic start with components in every direction
    let mut v: CVector = (0..n)
        .map(|i| Complex64::new(1.0 + (i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
        .collect();
    let mut lambda_inv = 0.0;
    for _ in 0..500 {
        let norm = super::matrix::vector_norm(&v);
        v.iter_mut().for_each(|x| *x /= norm);
        let w = match chol.solve_vec(&v) {
            Ok(w) => w,
            Err(_) => return 0.0,
        };
        let next = super::matrix::vector_norm(&w);
        let converged = (next - lambda_inv).abs() <= 1e-12 * next;
        lambda_inv = next;
        v = w;
        if converged {
            break;
        }
    }
    if lambda_inv > 0.0 && lambda_inv.is_finite() {
        (1.0 / lambda_inv).sqrt()
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let y = CMatrix::from_fn(3, 2, |i, j| c(i as f64 - 1.0, j as f64 + 0.5));
        let x = hermitian_solve(&CMatrix::identity(3), &y).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn scaled_identity_solve() {
        let a = CMatrix::identity(2).scale(c(2.0, 0.0));
        let x = hermitian_solve(&a, &CMatrix::identity(2)).unwrap();
        let expected = CMatrix::identity(2).scale(c(0.5, 0.0));
        assert!(x.sub(&expected).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let mut a = CMatrix::identity(3);
        a[(1, 1)] = c(-1.0, 0.0);
        let err = hermitian_solve(&a, &CMatrix::identity(3)).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { pivot: 1, .. }));
    }

    #[test]
    fn singular_gram_is_rejected() {
        // rank-1 gram with zero regularisation
        let b = CMatrix::from_fn(3, 2, |i, _| c(i as f64 + 1.0, 0.0));
        assert!(Cholesky::new(&b.gram_cols()).is_err());
    }

    #[test]
    fn solve_dimension_mismatch() {
        let err = hermitian_solve(&CMatrix::identity(3), &CMatrix::identity(2)).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
        assert!(hermitian_solve(&CMatrix::zeros(2, 3), &CMatrix::zeros(2, 1)).is_err());
    }

    #[test]
    fn circulant_unit_tap_is_identity() {
        assert_eq!(circulant(&[c(1.0, 0.0)], 3).unwrap(), CMatrix::identity(3));
    }

    #[test]
    fn circulant_two_taps() {
        let (a, b) = (c(1.5, -0.5), c(0.25, 2.0));
        let z = c(0.0, 0.0);
        let m = circulant(&[a, b], 3).unwrap();
        let expected = [[a, z, b], [b, a, z], [z, b, a]];
        for (i, row) in expected.iter().enumerate() {
            assert_eq!(m.row(i), row);
        }
    }

    #[test]
    fn circulant_swap() {
        let m = circulant(&[c(0.0, 0.0), c(1.0, 0.0)], 2).unwrap();
        assert_eq!(m.row(0), &[c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(m.row(1), &[c(1.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn circulant_rejects_long_column() {
        assert!(circulant(&[c(1.0, 0.0); 4], 3).is_err());
    }

    #[test]
    fn structured_products_match_dense() {
        let taps = [c(0.3, 0.1), c(-0.2, 0.7), c(0.05, -0.4)];
        let m = CMatrix::from_fn(7, 5, |i, j| c((i * 3 + j) as f64 * 0.1, (i as f64 - j as f64) * 0.2));
        let h = circulant(&taps, 7).unwrap();
        let dense = h.matmul(&m).unwrap();
        assert!(circulant_mul(&taps, &m).sub(&dense).unwrap().frobenius_norm() < 1e-12);

        let mt = m.adjoint();
        let dense = mt.matmul(&h.adjoint()).unwrap();
        assert!(mul_circulant_adjoint(&mt, &taps).sub(&dense).unwrap().frobenius_norm() < 1e-12);

        let x = m.column(2);
        let corr = circular_correlate(&taps, &x);
        let dense = h.adjoint_mul_vec(&x).unwrap();
        for (a, b) in corr.iter().zip(&dense) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn min_singular_value_of_diagonal() {
        let mut a = CMatrix::identity(4);
        a[(2, 2)] = c(0.0, 0.25);
        a[(0, 0)] = c(3.0, 0.0);
        assert!((min_singular_value(&a) - 0.25).abs() < 1e-9);
        assert_eq!(min_singular_value(&CMatrix::zeros(3, 3)), 0.0);
    }
}

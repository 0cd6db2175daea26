//! Small dense complex matrices and a cyclic-Jacobi Hermitian eigensolver.
//!
//! Every operator in this crate lives in dimension d <= 8, so a plain
//! row-major `Vec<Complex64>` with O(d^3) Jacobi sweeps is both simpler and
//! more robust than pulling in a full linear-algebra stack.

use num_complex::Complex64;

use crate::error::Error;

pub const HERMITICITY_TOL: f64 = 1e-12;

/// Off-diagonal Frobenius norm below which a Jacobi sweep is considered
/// converged, relative to the matrix scale.
const JACOBI_OFF_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense complex square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "rows must be square");
        CMatrix {
            dim,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    /// Projector |v><v| onto a (not necessarily normalized) vector.
    pub fn projector(v: &[Complex64]) -> Self {
        let dim = v.len();
        let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj() / norm_sq;
            }
        }
        m
    }

    /// Projector onto the i-th computational basis vector.
    pub fn basis_projector(dim: usize, i: usize) -> Self {
        let mut m = CMatrix::zeros(dim);
        m[(i, i)] = Complex64::new(1.0, 0.0);
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = CMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn matmul(&self, other: &CMatrix) -> Self {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut m = CMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..d {
                    m[(i, j)] += a * other[(k, j)];
                }
            }
        }
        m
    }

    pub fn add_scaled(&mut self, coeff: f64, other: &CMatrix) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += coeff * b;
        }
    }

    /// tr(A B), the Hilbert-Schmidt pairing used for Born-rule expectations.
    pub fn trace_product(&self, other: &CMatrix) -> Complex64 {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for k in 0..d {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues in descending order with matching eigenvectors
    /// (columns of the returned matrix). Rejects non-Hermitian input.
    pub fn eigh(&self) -> Result<EighResult, Error> {
        if !self.is_hermitian(1e-9) {
            return Err(Error::Eigen(format!(
                "matrix is not Hermitian (defect {:.3e})",
                self.hermiticity_defect()
            )));
        }
        let d = self.dim;
        let mut a = self.clone();
        // symmetrize exactly so rounding in the input cannot bias the sweeps
        for i in 0..d {
            a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
            for j in i + 1..d {
                let avg = 0.5 * (a[(i, j)] + a[(j, i)].conj());
                a[(i, j)] = avg;
                a[(j, i)] = avg.conj();
            }
        }
        let mut v = CMatrix::identity(d);
        let scale = a.frobenius_norm().max(1.0);
        for _ in 0..JACOBI_MAX_SWEEPS {
            if a.offdiag_norm() <= JACOBI_OFF_TOL * scale {
                break;
            }
            for p in 0..d {
                for q in p + 1..d {
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
        }
        let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..d)
            .map(|j| (a[(j, j)].re, (0..d).map(|i| v[(i, j)]).collect()))
            .collect();
        pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
        Ok(EighResult {
            eigenvalues: pairs.iter().map(|p| p.0).collect(),
            eigenvectors: pairs.into_iter().map(|p| p.1).collect(),
        })
    }

    fn offdiag_norm(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    acc += self[(i, j)].norm_sqr();
                }
            }
        }
        acc.sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Hermitian eigendecomposition, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct EighResult {
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` is the unit eigenvector for `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<Complex64>>,
}

/// One complex Jacobi rotation zeroing the (p, q) entry of a Hermitian `a`,
/// accumulating the similarity transform into `v`.
fn jacobi_rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // real Jacobi angle for the phase-stripped 2x2 block [[app, r], [r, aqq]]
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let d = a.dim();
    // columns: A <- A J with J_pp = c, J_pq = s*phase, J_qp = -s*conj(phase), J_qq = c
    for k in 0..d {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * phase.conj() * akq;
        a[(k, q)] = s * phase * akp + c * akq;
    }
    // rows: A <- J^H A
    for k in 0..d {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * phase * aqk;
        a[(q, k)] = s * phase.conj() * apk + c * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    for k in 0..d {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * phase.conj() * vkq;
        v[(k, q)] = s * phase * vkp + c * vkq;
    }
}

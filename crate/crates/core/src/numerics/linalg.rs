use super::{Matrix, NumericsError};

/// Relative pivot floor. The factorization runs on the symmetrically
/// equilibrated matrix, whose diagonal is all ones, so this is also the
/// floor relative to the largest diagonal entry.
const PIVOT_FLOOR: f64 = 1e-12;

const SYMMETRY_TOL: f64 = 1e-10;

/// Cholesky factor of `D S D`, where `D = diag(sqrt(a_ii))` and `S` has a
/// unit diagonal. Factoring `S` instead of `A` keeps the pivot test
/// independent of column scale.
#[derive(Debug, Clone)]
pub struct Cholesky {
    /// Lower-triangular factor of the equilibrated matrix `S`.
    lower: Matrix,
    scale: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &Matrix) -> Result<Self, NumericsError> {
        if !a.is_square() {
            return Err(NumericsError::NotSquare {
                rows: a.nrows(),
                cols: a.ncols(),
            });
        }
        let n = a.nrows();
        let tol = SYMMETRY_TOL * a.max_abs().max(1.0);
        for i in 0..n {
            for j in (i + 1)..n {
                if (a[(i, j)] - a[(j, i)]).abs() > tol {
                    return Err(NumericsError::NotSymmetric { row: i, col: j });
                }
            }
        }

        let mut scale = Vec::with_capacity(n);
        for i in 0..n {
            let d = a[(i, i)];
            if !(d > 0.0) || !d.is_finite() {
                return Err(NumericsError::Collinear { column: i });
            }
            scale.push(d.sqrt());
        }

        let mut lower = Matrix::zeros(n, n);
        for j in 0..n {
            let mut pivot = 1.0;
            for k in 0..j {
                pivot -= lower[(j, k)] * lower[(j, k)];
            }
            if pivot < PIVOT_FLOOR {
                return Err(NumericsError::Collinear { column: j });
            }
            let ljj = pivot.sqrt();
            lower[(j, j)] = ljj;
            for i in (j + 1)..n {
                let mut s = 0.5 * (a[(i, j)] + a[(j, i)]) / (scale[i] * scale[j]);
                for k in 0..j {
                    s -= lower[(i, k)] * lower[(j, k)];
                }
                lower[(i, j)] = s / ljj;
            }
        }
        Ok(Self { lower, scale })
    }

    pub fn dim(&self) -> usize {
        self.scale.len()
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, NumericsError> {
        let n = self.dim();
        if b.len() != n {
            return Err(NumericsError::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        // S z = D^-1 b, then x = D^-1 z.
        let mut z: Vec<f64> = b.iter().zip(&self.scale).map(|(v, d)| v / d).collect();
        for i in 0..n {
            let mut s = z[i];
            for k in 0..i {
                s -= self.lower[(i, k)] * z[k];
            }
            z[i] = s / self.lower[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in (i + 1)..n {
                s -= self.lower[(k, i)] * z[k];
            }
            z[i] = s / self.lower[(i, i)];
        }
        Ok(z.iter().zip(&self.scale).map(|(v, d)| v / d).collect())
    }

    /// Diagonal of `A^-1`, without forming the full inverse of `A`.
    pub fn inverse_diagonal(&self) -> Vec<f64> {
        let n = self.dim();
        // Columns of L^-1, by forward substitution on unit vectors.
        let mut linv = Matrix::zeros(n, n);
        for c in 0..n {
            for i in c..n {
                let mut s = if i == c { 1.0 } else { 0.0 };
                for k in c..i {
                    s -= self.lower[(i, k)] * linv[(k, c)];
                }
                linv[(i, c)] = s / self.lower[(i, i)];
            }
        }
        (0..n)
            .map(|i| {
                let sii: f64 = (i..n).map(|k| linv[(k, i)] * linv[(k, i)]).sum();
                sii / (self.scale[i] * self.scale[i])
            })
            .collect()
    }
}

/// Solves `A x = b` for symmetric positive definite `A`.
pub fn solve_spd(a: &Matrix, b: &[f64]) -> Result<Vec<f64>, NumericsError> {
    Cholesky::factor(a)?.solve(b)
}

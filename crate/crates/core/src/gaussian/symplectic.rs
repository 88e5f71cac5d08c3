use nalgebra::{DMatrix, DVector};

use super::{symplectic_form, SYMPLECTIC_TOL};
use crate::error::{check_closed, Error, Result};

/// Affine phase-space map `q -> S q + d` of a lossless optical element.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    matrix: DMatrix<f64>,
    displacement: DVector<f64>,
}

impl SymplecticTransform {
    /// Builds a transform, rejecting matrices that are not symplectic to `SYMPLECTIC_TOL`.
    pub fn new(matrix: DMatrix<f64>, displacement: DVector<f64>) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim || !dim.is_multiple_of(2) {
            return Err(Error::Dimension {
                expected: dim,
                got: matrix.ncols(),
            });
        }
        if displacement.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: displacement.len(),
            });
        }
        let t = Self { matrix, displacement };
        let err = t.symplectic_error();
        if err > SYMPLECTIC_TOL {
            return Err(Error::Contract(format!(
                "matrix is not symplectic: ‖SΩSᵀ − Ω‖ = {err:e}"
            )));
        }
        Ok(t)
    }

    fn from_matrix(matrix: DMatrix<f64>) -> Self {
        let dim = matrix.nrows();
        Self {
            matrix,
            displacement: DVector::zeros(dim),
        }
    }

    pub fn identity(n_modes: usize) -> Self {
        Self::from_matrix(DMatrix::identity(2 * n_modes, 2 * n_modes))
    }

    /// Two-mode beam splitter with transmittance `t`.
    ///
    /// Port 1 leaves as `√T·q1 + √(1−T)·q2`, port 2 as `−√(1−T)·q1 + √T·q2`,
    /// identically for both quadratures.
    pub fn beam_splitter(transmittance: f64) -> Result<Self> {
        let t = check_closed("T", transmittance, 0.0, 1.0, "[0, 1]")?;
        let (a, b) = (t.sqrt(), (1.0 - t).sqrt());
        let mut m = DMatrix::zeros(4, 4);
        for q in 0..2 {
            m[(q, q)] = a;
            m[(q, 2 + q)] = b;
            m[(2 + q, q)] = -b;
            m[(2 + q, 2 + q)] = a;
        }
        Ok(Self::from_matrix(m))
    }

    /// Two-mode squeezer: `x1 -> x1 cosh r + x2 sinh r`, `p1 -> p1 cosh r − p2 sinh r`,
    /// and symmetrically for mode 2.
    pub fn two_mode_squeezer(r: f64) -> Result<Self> {
        let r = check_closed("r", r, 0.0, f64::INFINITY, "[0, ∞)")?;
        let (c, s) = (r.cosh(), r.sinh());
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 0)] = c;
        m[(1, 1)] = c;
        m[(2, 2)] = c;
        m[(3, 3)] = c;
        m[(0, 2)] = s;
        m[(2, 0)] = s;
        m[(1, 3)] = -s;
        m[(3, 1)] = -s;
        Ok(Self::from_matrix(m))
    }

    /// Single-mode squeezer, `x -> e^{−r} x`, `p -> e^{r} p`. Negative `r` squeezes `p`.
    pub fn squeezer(r: f64) -> Self {
        Self::from_matrix(DMatrix::from_diagonal(&DVector::from_vec(vec![(-r).exp(), r.exp()])))
    }

    /// Phase-space rotation by `theta`.
    pub fn phase_rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::from_matrix(DMatrix::from_row_slice(2, 2, &[c, s, -s, c]))
    }

    /// Pure displacement by `d`.
    pub fn displacement(d: DVector<f64>) -> Self {
        let dim = d.len();
        Self {
            matrix: DMatrix::identity(dim, dim),
            displacement: d,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn displacement_vector(&self) -> &DVector<f64> {
        &self.displacement
    }

    /// Frobenius norm of `SΩSᵀ − Ω`.
    pub fn symplectic_error(&self) -> f64 {
        let omega = symplectic_form(self.n_modes());
        (&self.matrix * &omega * self.matrix.transpose() - omega).norm()
    }

    /// `other` applied after `self`.
    pub fn then(&self, other: &SymplecticTransform) -> Result<Self> {
        if other.matrix.nrows() != self.matrix.nrows() {
            return Err(Error::Dimension {
                expected: self.matrix.nrows(),
                got: other.matrix.nrows(),
            });
        }
        Ok(Self {
            matrix: &other.matrix * &self.matrix,
            displacement: &other.matrix * &self.displacement + &other.displacement,
        })
    }

    /// Lifts this transform into an `n_modes` system, acting on `modes` in order.
    pub fn embed(&self, n_modes: usize, modes: &[usize]) -> Result<Self> {
        if modes.len() != self.n_modes() {
            return Err(Error::Dimension {
                expected: self.n_modes(),
                got: modes.len(),
            });
        }
        for (i, &m) in modes.iter().enumerate() {
            if m >= n_modes {
                return Err(Error::Mode { mode: m, n_modes });
            }
            if modes[..i].contains(&m) {
                return Err(Error::Contract(format!("mode {m} listed twice")));
            }
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let mut matrix = DMatrix::identity(2 * n_modes, 2 * n_modes);
        let mut displacement = DVector::zeros(2 * n_modes);
        for (i, &gi) in idx.iter().enumerate() {
            displacement[gi] = self.displacement[i];
            for (j, &gj) in idx.iter().enumerate() {
                matrix[(gi, gj)] = self.matrix[(i, j)];
            }
        }
        Ok(Self { matrix, displacement })
    }
}

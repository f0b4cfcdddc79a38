//! Dense complex matrices: just enough for Fredholm-type determinants.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let data = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Determinant by LU factorisation with partial pivoting.
    ///
    /// A pivot below `n·ε·max|a_ij|` is treated as an exact zero and reported
    /// as [`Error::Singular`].
    pub fn determinant(&self) -> Result<Complex64> {
        let n = self.n;
        let mut a = self.data.clone();
        let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if n == 0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let threshold = scale * n as f64 * f64::EPSILON;
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))
                .expect("non-empty pivot range");
            let pivot = a[pivot_row * n + col];
            if pivot.norm() <= threshold {
                return Err(Error::Singular);
            }
            if pivot_row != col {
                for k in 0..n {
                    a.swap(pivot_row * n + k, col * n + k);
                }
                det = -det;
            }
            det *= pivot;
            for row in col + 1..n {
                let factor = a[row * n + col] / pivot;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in col + 1..n {
                    let upper = a[col * n + k];
                    a[row * n + k] -= factor * upper;
                }
            }
        }
        Ok(det)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

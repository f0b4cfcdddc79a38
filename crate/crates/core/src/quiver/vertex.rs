//! The 4×4 single-vertex representation of hop maps and densities, on the
//! basis (↑↓, ↑, ↓, ◯). Reproduced as data.

use serde::Serialize;

pub type VertexMatrix = [[u8; 4]; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VertexMatrices {
    pub v_up: VertexMatrix,
    pub v_down: VertexMatrix,
    pub rho_up: VertexMatrix,
    pub rho_down: VertexMatrix,
}

pub fn vertex_matrices() -> VertexMatrices {
    VertexMatrices {
        v_up: [[0, 0, 1, 1], [0, 0, 1, 1], [0, 0, 0, 0], [0, 0, 0, 0]],
        v_down: [[0, 1, 0, 1], [0, 0, 0, 0], [0, 1, 0, 1], [0, 0, 0, 0]],
        rho_up: [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]],
        rho_down: [[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 0]],
    }
}

pub fn matmul(a: &VertexMatrix, b: &VertexMatrix) -> VertexMatrix {
    let mut out = [[0u8; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Row and column indices holding a nonzero entry.
pub fn support(m: &VertexMatrix) -> (Vec<usize>, Vec<usize>) {
    let rows = (0..4).filter(|&i| m[i].iter().any(|&x| x != 0)).collect();
    let cols = (0..4).filter(|&j| m.iter().any(|r| r[j] != 0)).collect();
    (rows, cols)
}

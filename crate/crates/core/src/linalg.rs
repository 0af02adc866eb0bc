//! Determinant and inverse of small dense complex matrices.
//!
//! Cofactor expansion up to 3×3, partial-pivot elimination above.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn det(m: &CMatrix) -> Complex64 {
    assert!(m.is_square(), "determinant of a non-square matrix");
    match m.nrows() {
        0 => ONE,
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        3 => {
            m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
                - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
                + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
        }
        _ => lu_det(m.clone()),
    }
}

fn pivot_row(a: &CMatrix, col: usize) -> usize {
    (col..a.nrows())
        .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
        .unwrap_or(col)
}

fn lu_det(mut a: CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut d = ONE;
    for col in 0..n {
        let p = pivot_row(&a, col);
        if a[(p, col)] == ZERO {
            return ZERO;
        }
        if p != col {
            a.swap_rows(p, col);
            d = -d;
        }
        let piv = a[(col, col)];
        d *= piv;
        for r in col + 1..n {
            let factor = a[(r, col)] / piv;
            for c in col..n {
                let v = a[(col, c)];
                a[(r, c)] -= factor * v;
            }
        }
    }
    d
}

/// `None` when the matrix is singular.
pub fn inverse(m: &CMatrix) -> Option<CMatrix> {
    assert!(m.is_square(), "inverse of a non-square matrix");
    let n = m.nrows();
    if n <= 3 {
        let d = det(m);
        if d == ZERO {
            return None;
        }
        return Some(adjugate(m) / d);
    }
    gauss_jordan(m.clone())
}

fn adjugate(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    if n == 1 {
        return CMatrix::from_element(1, 1, ONE);
    }
    CMatrix::from_fn(n, n, |i, j| {
        // adj[i][j] = (-1)^{i+j} minor(j, i)
        let minor = m.clone().remove_row(j).remove_column(i);
        let sign = if (i + j) % 2 == 0 { ONE } else { -ONE };
        sign * det(&minor)
    })
}

fn gauss_jordan(mut a: CMatrix) -> Option<CMatrix> {
    let n = a.nrows();
    let mut inv = CMatrix::identity(n, n);
    for col in 0..n {
        let p = pivot_row(&a, col);
        if a[(p, col)] == ZERO {
            return None;
        }
        a.swap_rows(p, col);
        inv.swap_rows(p, col);
        let piv = a[(col, col)];
        for c in 0..n {
            a[(col, c)] /= piv;
            inv[(col, c)] /= piv;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = a[(r, col)];
            if factor == ZERO {
                continue;
            }
            for c in 0..n {
                let (av, iv) = (a[(col, c)], inv[(col, c)]);
                a[(r, c)] -= factor * av;
                inv[(r, c)] -= factor * iv;
            }
        }
    }
    Some(inv)
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.norm()))
}

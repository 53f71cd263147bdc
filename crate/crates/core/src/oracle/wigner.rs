//! Wigner small-d matrices and spin rotations in the `J_z` eigenbasis.
//!
//! Basis index `k` corresponds to `m = k − J`, i.e. ascending `m`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest tolerated `‖d·dᵀ − I‖∞`.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

/// `m = k − J` for a basis index `k` of a spin with `2J = two_j`.
pub fn m_value(two_j: usize, k: usize) -> f64 {
    k as f64 - two_j as f64 / 2.0
}

/// `d^J(β) = exp(−iβJ_y)` as a real matrix with entries `d[(m′+J, m+J)]`.
///
/// The `m = J` column has the closed form
/// `√C(2J, J+m′) cos^{J+m′}(β/2) sin^{J−m′}(β/2)`; the remaining columns
/// follow from lowering with the rotated operator
/// `R J₋ R† = ½(cos β − 1)J₊ + ½(cos β + 1)J₋ − sin β·J_z`.
pub fn wigner_d(two_j: usize, beta: f64) -> Result<DMatrix<f64>> {
    let dim = two_j + 1;
    let j = two_j as f64 / 2.0;
    let jj = j * (j + 1.0);
    let (s_half, c_half) = (beta / 2.0).sin_cos();
    let mut d = DMatrix::zeros(dim, dim);

    for k in 0..dim {
        let up = k; // J + m'
        let down = two_j - k; // J − m'
        let mut mag = 0.5 * ln_binomial(two_j, k);
        let mut sign = 1.0;
        for (base, power) in [(c_half, up), (s_half, down)] {
            if power == 0 {
                continue;
            }
            if base == 0.0 {
                mag = f64::NEG_INFINITY;
                break;
            }
            mag += power as f64 * base.abs().ln();
            if base < 0.0 && power % 2 == 1 {
                sign = -sign;
            }
        }
        d[(k, dim - 1)] = sign * mag.exp();
    }

    let (sb, cb) = beta.sin_cos();
    let (a_plus, a_minus) = ((cb - 1.0) / 2.0, (cb + 1.0) / 2.0);
    for col in (1..dim).rev() {
        let m = m_value(two_j, col);
        let norm = (jj - m * (m - 1.0)).sqrt();
        for row in 0..dim {
            let mp = m_value(two_j, row);
            let mut acc = -sb * mp * d[(row, col)];
            if row > 0 {
                // (J₊v)_{m′} = √(J(J+1) − (m′−1)m′)·v_{m′−1}
                acc += a_plus * (jj - (mp - 1.0) * mp).sqrt() * d[(row - 1, col)];
            }
            if row + 1 < dim {
                // (J₋v)_{m′} = √(J(J+1) − (m′+1)m′)·v_{m′+1}
                acc += a_minus * (jj - (mp + 1.0) * mp).sqrt() * d[(row + 1, col)];
            }
            d[(row, col - 1)] = acc / norm;
        }
    }

    let defect = (&d * d.transpose() - DMatrix::<f64>::identity(dim, dim)).amax();
    if !(defect < ORTHOGONALITY_TOL) {
        return Err(Error::Invariant(format!(
            "Wigner d^{}(β={beta}) orthogonality defect {defect:e}",
            j
        )));
    }
    Ok(d)
}

/// `exp(−iφJ_x)` with entries `i^{m′−m}·d_{m′m}(φ)`.
pub fn rotation_x(two_j: usize, phi: f64) -> Result<DMatrix<Complex64>> {
    let d = wigner_d(two_j, phi)?;
    let dim = two_j + 1;
    Ok(DMatrix::from_fn(dim, dim, |r, c| {
        let phase = match (r as i64 - c as i64).rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        phase * d[(r, c)]
    }))
}

/// Spin operators `(J_x, J_y, J_z)` in the ascending-`m` basis.
pub fn spin_matrices(two_j: usize) -> [DMatrix<Complex64>; 3] {
    let dim = two_j + 1;
    let j = two_j as f64 / 2.0;
    let mut plus = DMatrix::<Complex64>::zeros(dim, dim);
    for k in 0..dim - 1 {
        let m = m_value(two_j, k);
        plus[(k + 1, k)] = Complex64::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let minus = plus.adjoint();
    let jx = (&plus + &minus) * Complex64::new(0.5, 0.0);
    let jy = (&plus - &minus) * Complex64::new(0.0, -0.5);
    let jz = DMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            Complex64::new(m_value(two_j, r), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    [jx, jy, jz]
}

//! The 2×2 matrix governing `(Δφ″, Δdφ′)` for closed homogeneous harmonic forms and its
//! diagonalization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type Mat2 = [[f64; 2]; 2];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagonalization {
    pub m: Mat2,
    pub p: Mat2,
    pub d: Mat2,
    /// `‖P⁻¹MP − D‖_∞` (maximum absolute row sum).
    pub residual: f64,
}

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Builds
/// `M = ((β(β+l−2−2p), 2β(β+l−2−2p)), (2, (β−2)(β+l−2p)+4))`,
/// `P = ((β+l−2−2p, β), (1, −1))`, `D = diag(β(β+l−2p), (β−2)(β+l−2−2p))`
/// and measures `P⁻¹MP − D`. `det P = −(2β+l−2−2p)` vanishes exactly at `β = 1+p−l/2`.
pub fn check_diagonalization(beta: f64, l: f64, p: f64) -> Result<Diagonalization> {
    let s = beta + l - 2.0 - 2.0 * p;
    let m = [[beta * s, 2.0 * beta * s], [2.0, (beta - 2.0) * (beta + l - 2.0 * p) + 4.0]];
    let pm = [[s, beta], [1.0, -1.0]];
    let d = [[beta * (beta + l - 2.0 * p), 0.0], [0.0, (beta - 2.0) * s]];
    let det = -s - beta;
    if det == 0.0 {
        return Err(Error::SingularP { beta });
    }
    let inv = [[-1.0 / det, -beta / det], [-1.0 / det, s / det]];
    let r = mul(&inv, &mul(&m, &pm));
    let residual = (0..2)
        .map(|i| (0..2).map(|j| (r[i][j] - d[i][j]).abs()).sum::<f64>())
        .fold(0.0, f64::max);
    Ok(Diagonalization { m, p: pm, d, residual })
}

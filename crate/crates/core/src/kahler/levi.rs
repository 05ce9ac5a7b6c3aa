use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// Hermitian `m × m` matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Hermitian {
    pub m: usize,
    pub entries: Vec<Complex64>,
}

impl Hermitian {
    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            entries: vec![Complex64::new(0.0, 0.0); m * m],
        }
    }

    pub fn identity(m: usize) -> Self {
        let mut h = Self::zeros(m);
        for a in 0..m {
            h.entries[a * m + a] = Complex64::new(1.0, 0.0);
        }
        h
    }

    pub fn get(&self, a: usize, b: usize) -> Complex64 {
        self.entries[a * self.m + b]
    }

    pub fn set(&mut self, a: usize, b: usize, v: Complex64) {
        self.entries[a * self.m + b] = v;
    }

    /// Real symmetric `2m × 2m` form `[[Re, −Im], [Im, Re]]`, whose spectrum is that of the
    /// Hermitian matrix with every eigenvalue doubled.
    fn realified(&self) -> DMatrix<f64> {
        let m = self.m;
        DMatrix::from_fn(2 * m, 2 * m, |i, j| {
            let v = self.get(i % m, j % m);
            match (i < m, j < m) {
                (true, true) | (false, false) => v.re,
                (true, false) => -v.im,
                (false, true) => v.im,
            }
        })
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = SymmetricEigen::new(self.realified()).eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e.into_iter().step_by(2).collect()
    }

    /// Operator norm.
    pub fn norm(&self) -> f64 {
        self.eigenvalues().iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn hermitian_defect(&self) -> f64 {
        let mut d = 0.0f64;
        for a in 0..self.m {
            for b in 0..self.m {
                d = d.max((self.get(a, b) - self.get(b, a).conj()).norm());
            }
        }
        d
    }
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &Hermitian) -> f64 {
    h.eigenvalues()[0]
}

/// Second directional derivative `D²_v f(x)` by the fourth-order central stencil.
fn second_directional(f: &dyn Fn(&[f64]) -> f64, x: &[f64], v: &[f64], h: f64) -> f64 {
    let at = |t: f64| -> f64 {
        let y: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + t * b).collect();
        f(&y)
    };
    (-at(2.0 * h) + 16.0 * at(h) - 30.0 * at(0.0) + 16.0 * at(-h) - at(-2.0 * h)) / (12.0 * h * h)
}

/// Levi form `L_{ab} = ∂²f/∂z_a∂z̄_b` of a real function on `ℝ^{2m}` (coordinates
/// `(x₁, y₁, …, x_m, y_m)`) by fourth-order central differences with step `h`.
///
/// With `z = x + iy`: `L_{ab} = ¼(f_{x_a x_b} + f_{y_a y_b}) + ¼ i (f_{x_a y_b} − f_{y_a x_b})`.
/// Mixed partials come from polarization `f_{uv} = ¼(D²_{u+v} f − D²_{u−v} f)`.
pub fn levi_fd(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Hermitian {
    let n = x.len();
    let m = n / 2;
    let unit = |i: usize| -> Vec<f64> {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        e
    };
    let mut hess = vec![vec![0.0; n]; n];
    for i in 0..n {
        hess[i][i] = second_directional(f, x, &unit(i), h);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut plus = unit(i);
            plus[j] = 1.0;
            let mut minus = unit(i);
            minus[j] = -1.0;
            let v = 0.25 * (second_directional(f, x, &plus, h) - second_directional(f, x, &minus, h));
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    let mut l = Hermitian::zeros(m);
    for a in 0..m {
        for b in 0..m {
            let (xa, ya, xb, yb) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
            let re = 0.25 * (hess[xa][xb] + hess[ya][yb]);
            let im = 0.25 * (hess[xa][yb] - hess[ya][xb]);
            l.set(a, b, Complex64::new(re, im));
        }
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_square_has_identity_levi_form() {
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let l = levi_fd(&f, &[0.3, -0.2, 0.7, 0.1], 1e-3);
        for a in 0..2 {
            for b in 0..2 {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((l.get(a, b) - Complex64::new(want, 0.0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn pluriharmonic_function_has_zero_levi_form() {
        // Re(z₁²) + Re(z₁ z₂).
        let f = |x: &[f64]| x[0] * x[0] - x[1] * x[1] + x[0] * x[2] - x[1] * x[3];
        let l = levi_fd(&f, &[0.4, 0.2, -0.3, 0.5], 1e-3);
        assert!(l.entries.iter().all(|v| v.norm() < 1e-9));
    }

    #[test]
    fn off_diagonal_phase_is_recovered() {
        // f = |z₁ + i z₂|² has L = c c^H with c = (1, i), i.e. [[1, −i], [i, 1]].
        let f = |x: &[f64]| {
            let (re, im) = (x[0] - x[3], x[1] + x[2]);
            re * re + im * im
        };
        let l = levi_fd(&f, &[0.1, 0.2, 0.3, 0.4], 1e-3);
        assert!(l.hermitian_defect() < 1e-9);
        let e = l.eigenvalues();
        assert!(e[0].abs() < 1e-9 && (e[1] - 2.0).abs() < 1e-9);
        assert!((l.get(1, 0) - Complex64::new(0.0, 1.0)).norm() < 1e-9);
    }
}

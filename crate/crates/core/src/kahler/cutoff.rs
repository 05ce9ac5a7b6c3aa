use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// C² cutoff profile on `[0, ∞)`: `1` on `[0, a]`, `0` on `[1, ∞)`, and the quintic smoothstep
/// `1 − (10u³ − 15u⁴ + 6u⁵)` with `u = (x − a)/(1 − a)` in between.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuinticBump {
    plateau: f64,
}

impl QuinticBump {
    pub fn new(plateau: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&plateau) {
            return Err(Error::InvalidArgument(format!("cutoff plateau {plateau} is not in [0, 1)")));
        }
        Ok(Self { plateau })
    }

    /// End of the region where the profile equals one.
    pub fn plateau(&self) -> f64 {
        self.plateau
    }

    fn width(&self) -> f64 {
        1.0 - self.plateau
    }

    fn u(&self, x: f64) -> Option<f64> {
        if x <= self.plateau {
            None
        } else if x >= 1.0 {
            Some(1.0)
        } else {
            Some((x - self.plateau) / self.width())
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self.u(x) {
            None => 1.0,
            Some(u) => 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u),
        }
    }

    pub fn d1(&self, x: f64) -> f64 {
        match self.u(x) {
            None => 0.0,
            Some(u) => -30.0 * u * u * (1.0 - u) * (1.0 - u) / self.width(),
        }
    }

    pub fn d2(&self, x: f64) -> f64 {
        match self.u(x) {
            None => 0.0,
            Some(u) => -60.0 * u * (1.0 - u) * (1.0 - 2.0 * u) / (self.width() * self.width()),
        }
    }

    /// `sup |ψ′| = 15 / (8(1 − a))`, attained at `u = 1/2`.
    pub fn sup_d1(&self) -> f64 {
        15.0 / (8.0 * self.width())
    }

    /// `sup |ψ″| = 10√3 / (3(1 − a)²)`, attained at `u = (3 ∓ √3)/6`.
    pub fn sup_d2(&self) -> f64 {
        10.0 * 3f64.sqrt() / (3.0 * self.width() * self.width())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_shape_and_smoothness() {
        let b = QuinticBump::new(0.25).unwrap();
        assert_eq!(b.value(0.0), 1.0);
        assert_eq!(b.value(0.25), 1.0);
        assert_eq!(b.value(1.0), 0.0);
        assert_eq!(b.value(3.0), 0.0);
        for x in [0.25, 1.0] {
            assert!(b.d1(x).abs() < 1e-15 && b.d2(x).abs() < 1e-15);
        }
        let h = 1e-5;
        for i in 1..50 {
            let x = 0.25 + 0.75 * i as f64 / 50.0;
            let fd1 = (b.value(x + h) - b.value(x - h)) / (2.0 * h);
            let fd2 = (b.d1(x + h) - b.d1(x - h)) / (2.0 * h);
            assert!((fd1 - b.d1(x)).abs() < 1e-8);
            assert!((fd2 - b.d2(x)).abs() < 1e-6);
            assert!((0.0..=1.0).contains(&b.value(x)));
        }
    }

    #[test]
    fn closed_form_suprema_match_a_fine_scan() {
        let b = QuinticBump::new(0.5).unwrap();
        let (mut s1, mut s2) = (0.0f64, 0.0f64);
        for i in 0..=200_000 {
            let x = 0.5 + 0.5 * i as f64 / 200_000.0;
            s1 = s1.max(b.d1(x).abs());
            s2 = s2.max(b.d2(x).abs());
        }
        assert!((s1 - b.sup_d1()).abs() < 1e-9);
        assert!((s2 - b.sup_d2()).abs() < 1e-6);
        assert!(s1 <= b.sup_d1() && s2 <= b.sup_d2() + 1e-12);
    }
}

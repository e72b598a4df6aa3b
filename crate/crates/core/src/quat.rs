//! Quaternion arithmetic and slice decomposition.
//!
//! The scalar part is `w`; `x`, `y`, `z` are the coefficients of the three
//! anticommuting imaginary units. Every nonreal quaternion q splits uniquely
//! as q = a + b*u with a real, b > 0, and u a unit imaginary quaternion;
//! real points take the canonical unit below.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 0.0, z: 0.0 };
    pub const ONE: Quaternion = Quaternion { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };
    pub const I: Quaternion = Quaternion { w: 0.0, x: 1.0, y: 0.0, z: 0.0 };
    pub const J: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 1.0, z: 0.0 };
    pub const K: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 0.0, z: 1.0 };

    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn real(w: f64) -> Self {
        Quaternion { w, x: 0.0, y: 0.0, z: 0.0 }
    }

    pub fn conj(self) -> Self {
        Quaternion { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Quaternion { w: s * self.w, x: s * self.x, y: s * self.y, z: s * self.z }
    }

    /// Norm of the imaginary part.
    pub fn imag_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn approx_eq(self, other: Quaternion, tol: f64) -> bool {
        (self - other).norm() <= tol
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

/// Point on the sphere of unit imaginary quaternions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImaginaryUnit {
    x: f64,
    y: f64,
    z: f64,
}

/// Canonical unit assigned to real points when decomposing.
pub const DEFAULT_UNIT: ImaginaryUnit = ImaginaryUnit { x: 1.0, y: 0.0, z: 0.0 };

impl ImaginaryUnit {
    /// Normalizes the given imaginary components; `None` for the zero vector.
    pub fn new(x: f64, y: f64, z: f64) -> Option<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if n == 0.0 || !n.is_finite() {
            return None;
        }
        Some(ImaginaryUnit { x: x / n, y: y / n, z: z / n })
    }

    pub fn components(self) -> (f64, f64, f64) {
        (self.x, self.y, self.z)
    }

    pub fn as_quaternion(self) -> Quaternion {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    pub fn flip(self) -> Self {
        ImaginaryUnit { x: -self.x, y: -self.y, z: -self.z }
    }
}

/// q = a + b*u with b >= 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlicePoint {
    pub a: f64,
    pub b: f64,
    pub unit: ImaginaryUnit,
}

pub fn slice_decompose(q: Quaternion) -> SlicePoint {
    let b = q.imag_norm();
    if b == 0.0 {
        return SlicePoint { a: q.w, b: 0.0, unit: DEFAULT_UNIT };
    }
    SlicePoint {
        a: q.w,
        b,
        unit: ImaginaryUnit { x: q.x / b, y: q.y / b, z: q.z / b },
    }
}

pub fn apply_unit(a: f64, b: f64, unit: ImaginaryUnit) -> Quaternion {
    Quaternion::new(a, b * unit.x, b * unit.y, b * unit.z)
}

impl SlicePoint {
    pub fn to_quaternion(self) -> Quaternion {
        apply_unit(self.a, self.b, self.unit)
    }
}

/// Deterministic low-discrepancy sample of the unit-imaginary sphere
/// (golden-angle spiral).
pub fn fibonacci_sphere(n: usize) -> Vec<ImaginaryUnit> {
    let golden_angle = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden_angle * k as f64;
            ImaginaryUnit { x: r * t.cos(), y: r * t.sin(), z }
        })
        .collect()
}

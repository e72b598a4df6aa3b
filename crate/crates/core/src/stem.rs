//! Rational scalar functions, conjugation symmetry, and stem evaluation.
//!
//! A scalar here is a complex rational function written as a polynomial part
//! plus finitely many pole terms c/(z - p)^m. A scalar is *symmetric* when
//! r(conj z) = conj(r(z)); concretely: real polynomial coefficients and a
//! pole multiset closed under (p, m, c) -> (conj p, m, conj c). A stem pairs
//! symmetric scalars with quaternion coefficients (coefficients act on the
//! right of the scalar value) and evaluates to a pair (F1, F2); the induced
//! slice function is F1 + u*F2.

use crate::quat::{ImaginaryUnit, Quaternion};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Evaluation distance below which a point counts as sitting on a pole.
pub const POLE_EPS: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum StemError {
    #[error("evaluation point within {POLE_EPS} of pole at {location}")]
    PoleHit { location: Complex64 },
    #[error("scalar marked symmetric fails conjugation pairing")]
    AsymmetricScalar,
    #[error("malformed stem data: {0}")]
    Malformed(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoleTerm {
    pub location: Complex64,
    pub order: u32,
    pub coeff: Complex64,
}

/// Polynomial part plus pole terms; kept in a canonical sorted, merged form.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ComplexRational {
    poly: Vec<Complex64>, // ascending powers
    poles: Vec<PoleTerm>,
}

fn key(p: &PoleTerm) -> (u64, u64, u32) {
    // +0.0 collapses -0.0 so conjugates of real poles compare equal
    ((p.location.re + 0.0).to_bits(), (p.location.im + 0.0).to_bits(), p.order)
}

impl ComplexRational {
    pub fn new(poly: Vec<Complex64>, poles: Vec<PoleTerm>) -> Self {
        let mut r = ComplexRational { poly, poles };
        r.canonicalize();
        r
    }

    pub fn zero() -> Self {
        ComplexRational::default()
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        ComplexRational::new(coeffs, Vec::new())
    }

    /// Single term c/(z - p)^m.
    pub fn pole(location: Complex64, order: u32, coeff: Complex64) -> Self {
        assert!(order >= 1, "pole order must be positive");
        ComplexRational::new(Vec::new(), vec![PoleTerm { location, order, coeff }])
    }

    pub fn poly_coeffs(&self) -> &[Complex64] {
        &self.poly
    }

    pub fn pole_terms(&self) -> &[PoleTerm] {
        &self.poles
    }

    fn canonicalize(&mut self) {
        while self.poly.last().is_some_and(|c| c.norm() == 0.0) {
            self.poly.pop();
        }
        self.poles.sort_by_key(key);
        let mut merged: Vec<PoleTerm> = Vec::with_capacity(self.poles.len());
        for t in self.poles.drain(..) {
            match merged.last_mut() {
                Some(last) if key(last) == key(&t) => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff.norm() != 0.0);
        self.poles = merged;
    }

    /// Degree as a rational function: polynomial degree plus the maximum
    /// pole order at each distinct location (the denominator degree).
    pub fn total_degree(&self) -> usize {
        let pd = self.poly.len().saturating_sub(1);
        // canonical order groups a location's terms together, orders ascending
        let mut sum = 0usize;
        let mut i = 0;
        while i < self.poles.len() {
            let lk = key(&self.poles[i]);
            let mut max_order = self.poles[i].order;
            while i + 1 < self.poles.len() {
                let nk = key(&self.poles[i + 1]);
                if (nk.0, nk.1) != (lk.0, lk.1) {
                    break;
                }
                i += 1;
                max_order = max_order.max(self.poles[i].order);
            }
            sum += max_order as usize;
            i += 1;
        }
        pd + sum
    }

    pub fn is_symmetric(&self) -> bool {
        if self.poly.iter().any(|c| c.im != 0.0) {
            return false;
        }
        self.poles.iter().all(|t| {
            let mirror = PoleTerm { location: t.location.conj(), order: t.order, coeff: t.coeff.conj() };
            self.poles.iter().any(|s| key(s) == key(&mirror) && s.coeff == mirror.coeff)
        })
    }

    /// The function z -> conj(self(conj z)); stays in this class.
    pub fn conj_reflect(&self) -> Self {
        ComplexRational::new(
            self.poly.iter().map(|c| c.conj()).collect(),
            self.poles
                .iter()
                .map(|t| PoleTerm { location: t.location.conj(), order: t.order, coeff: t.coeff.conj() })
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.poly.len().max(other.poly.len());
        let mut poly = vec![Complex64::new(0.0, 0.0); n];
        for (i, c) in self.poly.iter().enumerate() {
            poly[i] += c;
        }
        for (i, c) in other.poly.iter().enumerate() {
            poly[i] += c;
        }
        let mut poles = self.poles.clone();
        poles.extend_from_slice(&other.poles);
        ComplexRational::new(poly, poles)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexRational::new(
            self.poly.iter().map(|c| c * s).collect(),
            self.poles
                .iter()
                .map(|t| PoleTerm { coeff: t.coeff * s, ..*t })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64, StemError> {
        for t in &self.poles {
            if (z - t.location).norm() < POLE_EPS {
                return Err(StemError::PoleHit { location: t.location });
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.poly.iter().rev() {
            acc = acc * z + c;
        }
        for t in &self.poles {
            acc += t.coeff / (z - t.location).powu(t.order);
        }
        Ok(acc)
    }

    pub fn distance_to_poles(&self, z: Complex64) -> f64 {
        self.poles
            .iter()
            .map(|t| (z - t.location).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Splits f into symmetric g, h with f = g + i*h pointwise.
pub fn symmetrize(f: &ComplexRational) -> (ComplexRational, ComplexRational) {
    let refl = f.conj_reflect();
    let g = f.add(&refl).scale(Complex64::new(0.5, 0.0));
    let h = f.sub(&refl).scale(Complex64::new(0.0, -0.5));
    debug_assert!(g.is_symmetric() && h.is_symmetric());
    (g, h)
}

/// Symmetric scalars paired with quaternion coefficients (acting on the
/// right of the scalar value).
#[derive(Clone, Debug, PartialEq)]
pub struct RationalStem {
    terms: Vec<(ComplexRational, Quaternion)>,
}

/// Value of a stem at a planar point: F = F1 + F2 ⊗ i in the tensor model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StemValue {
    pub f1: Quaternion,
    pub f2: Quaternion,
}

impl StemValue {
    /// Euclidean norm of (F1, F2) as a vector in R^8.
    pub fn norm(self) -> f64 {
        (self.f1.norm_sqr() + self.f2.norm_sqr()).sqrt()
    }
}

impl RationalStem {
    pub fn new(terms: Vec<(ComplexRational, Quaternion)>) -> Result<Self, StemError> {
        if terms.iter().any(|(r, _)| !r.is_symmetric()) {
            return Err(StemError::AsymmetricScalar);
        }
        Ok(RationalStem { terms })
    }

    pub fn terms(&self) -> &[(ComplexRational, Quaternion)] {
        &self.terms
    }

    pub fn total_degree(&self) -> usize {
        self.terms.iter().map(|(r, _)| r.total_degree()).sum()
    }

    pub fn distance_to_poles(&self, z: Complex64) -> f64 {
        self.terms
            .iter()
            .map(|(r, _)| r.distance_to_poles(z))
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn stem_eval(stem: &RationalStem, z: Complex64) -> Result<StemValue, StemError> {
    let mut f1 = Quaternion::ZERO;
    let mut f2 = Quaternion::ZERO;
    for (r, a) in &stem.terms {
        let w = r.eval(z)?;
        f1 = f1 + a.scale(w.re);
        f2 = f2 + a.scale(w.im);
    }
    Ok(StemValue { f1, f2 })
}

/// Value of the induced function at x + y*u. Symmetry of the scalars makes
/// the result independent of writing the point as x + y*u or x + (-y)(-u).
pub fn slice_eval_at(
    stem: &RationalStem,
    x: f64,
    y: f64,
    u: ImaginaryUnit,
) -> Result<Quaternion, StemError> {
    let v = stem_eval(stem, Complex64::new(x, y))?;
    Ok(v.f1 + u.as_quaternion() * v.f2)
}

/// Value of the induced function at a quaternion point.
pub fn slice_eval(stem: &RationalStem, q: Quaternion) -> Result<Quaternion, StemError> {
    let p = crate::quat::slice_decompose(q);
    slice_eval_at(stem, p.a, p.b, p.unit)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct NormBoundsReport {
    pub samples: usize,
    /// Largest observed max(|f(x+yu)|, |f(x-yu)|) / ||F(x+yi)||.
    pub max_ratio: f64,
    /// Smallest observed ratio.
    pub min_ratio: f64,
    /// Worst violation of the two-sided sqrt(2) bound (0 when both hold).
    pub worst_violation: f64,
    pub ok: bool,
}

/// Checks (1/sqrt2)*||F|| <= max(|f(x+yu)|, |f(x-yu)|) <= sqrt2*||F|| on the
/// given samples, allowing `slack` of floating error on each side.
pub fn norm_bounds_check(
    stem: &RationalStem,
    samples: &[(f64, f64, ImaginaryUnit)],
    slack: f64,
) -> Result<NormBoundsReport, StemError> {
    let sqrt2 = 2f64.sqrt();
    let mut max_ratio = f64::NEG_INFINITY;
    let mut min_ratio = f64::INFINITY;
    let mut worst = 0f64;
    for &(x, y, u) in samples {
        let big = stem_eval(stem, Complex64::new(x, y))?.norm();
        let plus = slice_eval_at(stem, x, y, u)?.norm();
        let minus = slice_eval_at(stem, x, -y, u)?.norm();
        let m = plus.max(minus);
        worst = worst.max(big / sqrt2 - m).max(m - sqrt2 * big);
        if big > 0.0 {
            max_ratio = max_ratio.max(m / big);
            min_ratio = min_ratio.min(m / big);
        }
    }
    Ok(NormBoundsReport {
        samples: samples.len(),
        max_ratio,
        min_ratio,
        worst_violation: worst,
        ok: worst <= slack,
    })
}

// --- JSON wire format -------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct PoleWire {
    location: [f64; 2],
    order: u32,
    coeff: [f64; 2],
}

#[derive(Serialize, Deserialize)]
struct RationalWire {
    #[serde(default)]
    poly: Vec<[f64; 2]>,
    #[serde(default)]
    poles: Vec<PoleWire>,
    symmetric: bool,
}

#[derive(Serialize, Deserialize)]
struct StemWire {
    terms: Vec<TermWire>,
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    scalar: RationalWire,
    coeff: [f64; 4],
}

fn rational_to_wire(r: &ComplexRational) -> RationalWire {
    RationalWire {
        poly: r.poly.iter().map(|c| [c.re, c.im]).collect(),
        poles: r
            .poles
            .iter()
            .map(|t| PoleWire {
                location: [t.location.re, t.location.im],
                order: t.order,
                coeff: [t.coeff.re, t.coeff.im],
            })
            .collect(),
        symmetric: r.is_symmetric(),
    }
}

fn rational_from_wire(w: &RationalWire) -> Result<ComplexRational, StemError> {
    if w.poles.iter().any(|p| p.order == 0) {
        return Err(StemError::Malformed("pole order must be >= 1".into()));
    }
    let r = ComplexRational::new(
        w.poly.iter().map(|c| Complex64::new(c[0], c[1])).collect(),
        w.poles
            .iter()
            .map(|p| PoleTerm {
                location: Complex64::new(p.location[0], p.location[1]),
                order: p.order,
                coeff: Complex64::new(p.coeff[0], p.coeff[1]),
            })
            .collect(),
    );
    if w.symmetric && !r.is_symmetric() {
        return Err(StemError::AsymmetricScalar);
    }
    Ok(r)
}

impl ComplexRational {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&rational_to_wire(self)).expect("serialize rational")
    }

    pub fn from_json(s: &str) -> Result<Self, StemError> {
        let w: RationalWire =
            serde_json::from_str(s).map_err(|e| StemError::Malformed(e.to_string()))?;
        rational_from_wire(&w)
    }
}

impl RationalStem {
    pub fn to_json(&self) -> String {
        let wire = StemWire {
            terms: self
                .terms
                .iter()
                .map(|(r, a)| TermWire {
                    scalar: rational_to_wire(r),
                    coeff: [a.w, a.x, a.y, a.z],
                })
                .collect(),
        };
        serde_json::to_string_pretty(&wire).expect("serialize stem")
    }

    pub fn from_json(s: &str) -> Result<Self, StemError> {
        let wire: StemWire =
            serde_json::from_str(s).map_err(|e| StemError::Malformed(e.to_string()))?;
        let mut terms = Vec::with_capacity(wire.terms.len());
        for t in &wire.terms {
            let r = rational_from_wire(&t.scalar)?;
            if !r.is_symmetric() {
                return Err(StemError::AsymmetricScalar);
            }
            terms.push((r, Quaternion::new(t.coeff[0], t.coeff[1], t.coeff[2], t.coeff[3])));
        }
        RationalStem::new(terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{fibonacci_sphere, DEFAULT_UNIT};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Symmetric two-pole scalar 1/(z-2) + 1/(z+2).
    fn two_real_poles() -> ComplexRational {
        ComplexRational::new(
            vec![],
            vec![
                PoleTerm { location: c(2.0, 0.0), order: 1, coeff: c(1.0, 0.0) },
                PoleTerm { location: c(-2.0, 0.0), order: 1, coeff: c(1.0, 0.0) },
            ],
        )
    }

    #[test]
    fn eval_against_direct_arithmetic() {
        let r = two_real_poles();
        assert!(r.is_symmetric());
        let z = c(0.0, 1.0);
        // oracle: direct complex arithmetic, no shared code path
        let oracle = c(1.0, 0.0) / (z - c(2.0, 0.0)) + c(1.0, 0.0) / (z + c(2.0, 0.0));
        let got = r.eval(z).unwrap();
        assert!((got - oracle).norm() < 1e-15);
        assert!((got - c(0.0, -0.4)).norm() < 1e-15);
    }

    #[test]
    fn stem_value_splits_real_imag() {
        let stem = RationalStem::new(vec![(two_real_poles(), Quaternion::J)]).unwrap();
        let v = stem_eval(&stem, c(0.0, 1.0)).unwrap();
        assert!(v.f1.approx_eq(Quaternion::ZERO, 1e-15));
        assert!(v.f2.approx_eq(Quaternion::J.scale(-0.4), 1e-15));
    }

    #[test]
    fn pole_hit_detected() {
        let r = ComplexRational::pole(c(1.0, 0.0), 1, c(1.0, 0.0));
        assert_eq!(
            r.eval(c(1.0, 0.5e-12)),
            Err(StemError::PoleHit { location: c(1.0, 0.0) })
        );
    }

    #[test]
    fn symmetrize_splits_a_complex_pole() {
        // f = 1/(z-i): g = z/(z^2+1), h = 1/(z^2+1) pointwise.
        let f = ComplexRational::pole(c(0.0, 1.0), 1, c(1.0, 0.0));
        assert!(!f.is_symmetric());
        let (g, h) = symmetrize(&f);
        assert!(g.is_symmetric() && h.is_symmetric());
        for k in 0..40 {
            let t = 0.37 * k as f64;
            let z = c(t.cos() * 1.7, t.sin() * 1.3 + 0.1);
            if f.distance_to_poles(z) < 1e-3 {
                continue;
            }
            let fv = f.eval(z).unwrap();
            let gv = g.eval(z).unwrap();
            let hv = h.eval(z).unwrap();
            assert!((fv - (gv + c(0.0, 1.0) * hv)).norm() < 1e-12);
            // frozen closed forms
            let zz = z * z + c(1.0, 0.0);
            assert!((gv - z / zz).norm() < 1e-12);
            assert!((hv - c(1.0, 0.0) / zz).norm() < 1e-12);
        }
    }

    #[test]
    fn slice_eval_matches_quaternion_horner() {
        // F(z) = z^3 * 1 + z * I -> f(q) = q^3 + q*I with right coefficients.
        let cubic = ComplexRational::polynomial(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let linear = ComplexRational::polynomial(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let stem = RationalStem::new(vec![
            (cubic, Quaternion::ONE),
            (linear, Quaternion::I),
        ])
        .unwrap();
        for (k, u) in fibonacci_sphere(100).into_iter().enumerate() {
            let x = (k as f64 * 0.17).sin() * 2.0;
            let y = (k as f64 * 0.29).cos().abs() * 1.5;
            let q = crate::quat::apply_unit(x, y, u);
            let oracle = q * q * q + q * Quaternion::I;
            let got = slice_eval_at(&stem, x, y, u).unwrap();
            assert!(got.approx_eq(oracle, 1e-10), "k={k}");
            assert!(slice_eval(&stem, q).unwrap().approx_eq(oracle, 1e-10), "k={k}");
        }
    }

    #[test]
    fn conjugate_point_flips_f2() {
        let stem = RationalStem::new(vec![
            (two_real_poles(), Quaternion::new(0.2, -1.0, 0.4, 0.0)),
            (
                ComplexRational::polynomial(vec![c(1.0, 0.0), c(-0.5, 0.0), c(2.0, 0.0)]),
                Quaternion::K,
            ),
        ])
        .unwrap();
        for k in 0..60 {
            let z = c((k as f64 * 0.23).sin() * 1.6, (k as f64 * 0.41).cos() * 1.2);
            if stem.distance_to_poles(z) < 1e-3 {
                continue;
            }
            let v = stem_eval(&stem, z).unwrap();
            let w = stem_eval(&stem, z.conj()).unwrap();
            assert!(w.f1.approx_eq(v.f1, 1e-10));
            assert!(w.f2.approx_eq(-v.f2, 1e-10));
        }
    }

    #[test]
    fn reconstruction_is_unit_independent() {
        // (F1, F2) recovered from values at x + y*u and x - y*u must predict
        // the value on any other unit.
        let stem = RationalStem::new(vec![
            (two_real_poles(), Quaternion::new(1.0, 0.3, -0.7, 0.2)),
            (
                ComplexRational::polynomial(vec![c(0.5, 0.0), c(1.0, 0.0)]),
                Quaternion::J,
            ),
        ])
        .unwrap();
        let units = fibonacci_sphere(7);
        for k in 0..40 {
            let x = (k as f64 * 0.31).sin() * 1.4;
            let y = (k as f64 * 0.13).cos().abs() * 1.1 + 0.05;
            if stem.distance_to_poles(c(x, y)) < 1e-3 {
                continue;
            }
            let u = units[k % units.len()];
            let plus = slice_eval_at(&stem, x, y, u).unwrap();
            let minus = slice_eval_at(&stem, x, -y, u).unwrap();
            let f1 = (plus + minus).scale(0.5);
            let f2 = (u.as_quaternion().conj() * (plus - minus)).scale(0.5);
            let w = units[(k + 3) % units.len()];
            let predicted = f1 + w.as_quaternion() * f2;
            let got = slice_eval_at(&stem, x, y, w).unwrap();
            assert!(got.approx_eq(predicted, 1e-10), "k={k}");
        }
    }

    #[test]
    fn stem_rejects_asymmetric_scalar() {
        let f = ComplexRational::pole(c(0.0, 1.0), 1, c(1.0, 0.0));
        assert_eq!(
            RationalStem::new(vec![(f, Quaternion::ONE)]).unwrap_err(),
            StemError::AsymmetricScalar
        );
    }

    #[test]
    fn json_roundtrip() {
        let stem = RationalStem::new(vec![
            (two_real_poles(), Quaternion::new(1.0, 0.5, -0.25, 2.0)),
            (
                ComplexRational::new(
                    vec![c(1.0, 0.0)],
                    vec![
                        PoleTerm { location: c(0.5, 1.0), order: 2, coeff: c(0.0, 3.0) },
                        PoleTerm { location: c(0.5, -1.0), order: 2, coeff: c(0.0, -3.0) },
                    ],
                ),
                Quaternion::K,
            ),
        ])
        .unwrap();
        let s = stem.to_json();
        let back = RationalStem::from_json(&s).unwrap();
        assert_eq!(stem, back);
    }

    #[test]
    fn norm_bounds_on_fixture() {
        let stem = RationalStem::new(vec![
            (two_real_poles(), Quaternion::new(0.3, 1.0, 0.0, -0.5)),
            (
                ComplexRational::polynomial(vec![c(0.1, 0.0), c(0.0, 0.0), c(0.7, 0.0)]),
                Quaternion::J,
            ),
        ])
        .unwrap();
        let units = fibonacci_sphere(32);
        let mut samples = Vec::new();
        for k in 0..400 {
            let x = ((k * 37 % 100) as f64 / 100.0 - 0.5) * 3.0;
            let y = ((k * 61 % 100) as f64 / 100.0) * 1.4 + 0.01;
            samples.push((x, y, units[k % units.len()]));
        }
        let rep = norm_bounds_check(&stem, &samples, 1e-9).unwrap();
        assert!(rep.ok, "worst violation {}", rep.worst_violation);
        assert!(rep.min_ratio >= 1.0 / 2f64.sqrt() - 1e-9);
        assert!(rep.max_ratio <= 2f64.sqrt() + 1e-9);
    }

    proptest! {
        #[test]
        fn symmetrize_is_pointwise_exact(re in -2.0..2.0f64, im in 0.1..2.0f64, x in -3.0..3.0f64, y in -3.0..3.0f64) {
            let f = ComplexRational::new(
                vec![c(re, im), c(im, -re)],
                vec![PoleTerm { location: c(re, im), order: 1, coeff: c(1.0, re) }],
            );
            let z = c(x, y);
            prop_assume!(f.distance_to_poles(z) > 1e-3 && f.conj_reflect().distance_to_poles(z) > 1e-3);
            let (g, h) = symmetrize(&f);
            prop_assert!(g.is_symmetric());
            prop_assert!(h.is_symmetric());
            let lhs = f.eval(z).unwrap();
            let rhs = g.eval(z).unwrap() + c(0.0, 1.0) * h.eval(z).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + lhs.norm()));
        }

        #[test]
        fn slice_value_at_default_unit_matches_complex(x in -1.5..1.5f64, y in 0.0..1.5f64) {
            let r = two_real_poles();
            let z = c(x, y);
            prop_assume!(r.distance_to_poles(z) > 1e-3);
            let stem = RationalStem::new(vec![(r.clone(), Quaternion::ONE)]).unwrap();
            let q = slice_eval_at(&stem, x, y, DEFAULT_UNIT).unwrap();
            let w = r.eval(z).unwrap();
            prop_assert!((q.w - w.re).abs() < 1e-12);
            prop_assert!((q.x - w.im).abs() < 1e-12);
            prop_assert!(q.y.abs() < 1e-12 && q.z.abs() < 1e-12);
        }
    }
}

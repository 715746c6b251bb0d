//! The Weyl group D₈ on 𝕋², the character maps Ψ and their Jacobians.
//!
//! D₈ is generated by `T₂ = [[0,1],[1,0]]` and `T₄ = [[0,1],[-1,0]]`, acting on
//! angles by `θ ↦ Tθ mod 1`. Ψ_{x,y} sends a torus point to `(x, y)`, Ψ_{y,z}
//! to `(y, z)`; their images are the curvilinear triangles
//!
//! ```text
//! D_xy: y ≥ -2x-3, y ≥ 2x-3, 4y ≤ x²+4
//! D_yz: z ≥ 3y-5, z ≥ -y-1, 4z ≤ y²+2y+5
//! ```

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::{char_fund_angles, Generator, LaurentPoly2, TorusPoint};

/// Boundary tolerance for domain membership.
pub const DOMAIN_TOL: f64 = 1e-9;

/// Element of D₈ as an integer matrix acting on angle columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct D8Element(pub [[i64; 2]; 2]);

impl D8Element {
    pub const IDENTITY: D8Element = D8Element([[1, 0], [0, 1]]);
    pub const T2: D8Element = D8Element([[0, 1], [1, 0]]);
    pub const T4: D8Element = D8Element([[0, 1], [-1, 0]]);

    pub fn compose(self, rhs: D8Element) -> D8Element {
        let (a, b) = (self.0, rhs.0);
        let mut c = [[0i64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        D8Element(c)
    }

    /// Inverse; elements are signed permutation matrices, so this is the transpose.
    pub fn inverse(self) -> D8Element {
        let a = self.0;
        D8Element([[a[0][0], a[1][0]], [a[0][1], a[1][1]]])
    }

    pub fn act(self, p: &TorusPoint) -> TorusPoint {
        let a = self.0;
        let (t1, t2) = (p.theta1(), p.theta2());
        TorusPoint::new(t1 * a[0][0] + t2 * a[0][1], t1 * a[1][0] + t2 * a[1][1])
    }

    pub fn act_f64(self, t1: f64, t2: f64) -> (f64, f64) {
        let a = self.0;
        (
            a[0][0] as f64 * t1 + a[0][1] as f64 * t2,
            a[1][0] as f64 * t1 + a[1][1] as f64 * t2,
        )
    }

    /// Determinant, the sign picked up by the Jacobian.
    pub fn det(self) -> i64 {
        let a = self.0;
        a[0][0] * a[1][1] - a[0][1] * a[1][0]
    }
}

/// All eight elements, generated by closure from T₂ and T₄.
pub fn d8_elements() -> Vec<D8Element> {
    let mut set = BTreeSet::from([D8Element::IDENTITY]);
    loop {
        let mut grown = set.clone();
        for g in &set {
            grown.insert(g.compose(D8Element::T2));
            grown.insert(g.compose(D8Element::T4));
        }
        if grown.len() == set.len() {
            return set.into_iter().collect();
        }
        set = grown;
    }
}

pub fn d8_act(g: D8Element, p: &TorusPoint) -> TorusPoint {
    g.act(p)
}

/// Orbit of `p`, sorted.
pub fn d8_orbit(p: &TorusPoint) -> Vec<TorusPoint> {
    let set: BTreeSet<TorusPoint> = d8_elements().into_iter().map(|g| g.act(p)).collect();
    set.into_iter().collect()
}

/// Lexicographically least point of the orbit.
pub fn canonical(p: &TorusPoint) -> TorusPoint {
    d8_orbit(p)[0]
}

/// Membership in the fundamental domain, decided by orbit canonicalisation.
pub fn in_fundamental_domain(p: &TorusPoint) -> bool {
    canonical(p) == *p
}

/// Choice of character pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pair {
    XY,
    YZ,
}

impl Pair {
    pub fn generators(self) -> (Generator, Generator) {
        match self {
            Pair::XY => (Generator::X, Generator::Y),
            Pair::YZ => (Generator::Y, Generator::Z),
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pair::XY => "xy",
            Pair::YZ => "yz",
        })
    }
}

impl FromStr for Pair {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "xy" => Ok(Pair::XY),
            "yz" => Ok(Pair::YZ),
            other => Err(Error::InvalidParameter(format!("pair `{other}`"))),
        }
    }
}

/// Point of D_xy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainPointXY {
    pub x: f64,
    pub y: f64,
}

impl DomainPointXY {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        let (a, b, c) = xy_factors(x, y);
        if a < -DOMAIN_TOL || b < -DOMAIN_TOL || c < -DOMAIN_TOL {
            return Err(Error::DomainViolation(x, y, "xy"));
        }
        Ok(Self { x, y })
    }
}

/// Point of D_yz.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainPointYZ {
    pub y: f64,
    pub z: f64,
}

impl DomainPointYZ {
    pub fn new(y: f64, z: f64) -> Result<Self> {
        let (a, b, c) = yz_factors(y, z);
        if a < -DOMAIN_TOL || b < -DOMAIN_TOL || c < -DOMAIN_TOL {
            return Err(Error::DomainViolation(y, z, "yz"));
        }
        Ok(Self { y, z })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DomainPoint {
    XY(DomainPointXY),
    YZ(DomainPointYZ),
}

/// `(y+2x+3, y-2x+3, x²+4-4y)`; all nonnegative exactly on D_xy.
pub fn xy_factors(x: f64, y: f64) -> (f64, f64, f64) {
    (y + 2.0 * x + 3.0, y - 2.0 * x + 3.0, x * x + 4.0 - 4.0 * y)
}

/// `(z-3y+5, z+y+1, y²+2y+5-4z)`; all nonnegative exactly on D_yz.
pub fn yz_factors(y: f64, z: f64) -> (f64, f64, f64) {
    (z - 3.0 * y + 5.0, z + y + 1.0, y * y + 2.0 * y + 5.0 - 4.0 * z)
}

/// Image of a torus point under the pair of fundamental characters.
pub fn psi_map(pair: Pair, p: &TorusPoint) -> DomainPoint {
    let (t1, t2) = p.to_f64();
    let (u, v) = pair.generators();
    let (a, b) = (char_fund_angles(u, t1, t2), char_fund_angles(v, t1, t2));
    match pair {
        Pair::XY => DomainPoint::XY(DomainPointXY { x: a, y: b }),
        Pair::YZ => DomainPoint::YZ(DomainPointYZ { y: a, z: b }),
    }
}

/// θ-form of J_{x,y}.
pub fn jacobian_xy_angles(t1: f64, t2: f64) -> f64 {
    let c = |a: f64| (2.0 * PI * a).cos();
    8.0 * PI * PI * (c(t1 + 2.0 * t2) + c(2.0 * t1 - t2) - c(2.0 * t1 + t2) - c(t1 - 2.0 * t2))
}

pub fn jacobian_xy(p: &TorusPoint) -> f64 {
    let (t1, t2) = p.to_f64();
    jacobian_xy_angles(t1, t2)
}

/// Sine-product form, `-64π² sin2πθ₁ sin2πθ₂ sinπ(θ₁+θ₂) sinπ(θ₁-θ₂)`.
pub fn jacobian_xy_sine_angles(t1: f64, t2: f64) -> f64 {
    let s = |a: f64| (PI * a).sin();
    -64.0 * PI * PI * s(2.0 * t1) * s(2.0 * t2) * s(t1 + t2) * s(t1 - t2)
}

pub fn jacobian_xy_sine(p: &TorusPoint) -> f64 {
    let (t1, t2) = p.to_f64();
    jacobian_xy_sine_angles(t1, t2)
}

/// `|J_{x,y}| = 4π²√((y+2x+3)(y-2x+3)(x²+4-4y))`.
pub fn jacobian_xy_from_xy(q: &DomainPointXY) -> f64 {
    let (a, b, c) = xy_factors(q.x, q.y);
    4.0 * PI * PI * (a.max(0.0) * b.max(0.0) * c.max(0.0)).sqrt()
}

/// Checked variant of [`jacobian_xy_from_xy`] on raw coordinates.
pub fn jacobian_xy_at_xy(x: f64, y: f64) -> Result<f64> {
    Ok(jacobian_xy_from_xy(&DomainPointXY::new(x, y)?))
}

/// θ-form of J_{y,z}.
pub fn jacobian_yz_angles(t1: f64, t2: f64) -> f64 {
    let c = |a: f64| (2.0 * PI * a).cos();
    16.0 * PI * PI * (c(t1 - 3.0 * t2) + c(3.0 * t1 + t2) - c(t1 + 3.0 * t2) - c(3.0 * t1 - t2))
}

pub fn jacobian_yz(p: &TorusPoint) -> f64 {
    let (t1, t2) = p.to_f64();
    jacobian_yz_angles(t1, t2)
}

/// `128π² sin2πθ₁ sin2πθ₂ sin2π(θ₁+θ₂) sin2π(θ₁-θ₂)`.
pub fn jacobian_yz_sine_angles(t1: f64, t2: f64) -> f64 {
    let s = |a: f64| (2.0 * PI * a).sin();
    128.0 * PI * PI * s(t1) * s(t2) * s(t1 + t2) * s(t1 - t2)
}

/// `|J_{y,z}| = 8π²√((z-3y+5)(z+y+1)(y²+2y+5-4z))`.
pub fn jacobian_yz_from_yz(q: &DomainPointYZ) -> f64 {
    let (a, b, c) = yz_factors(q.y, q.z);
    8.0 * PI * PI * (a.max(0.0) * b.max(0.0) * c.max(0.0)).sqrt()
}

pub fn jacobian_yz_at_yz(y: f64, z: f64) -> Result<f64> {
    Ok(jacobian_yz_from_yz(&DomainPointYZ::new(y, z)?))
}

/// `|J_{x,y}|` written in `(y, z)` coordinates, using `x² = z+y+1`.
pub fn jacobian_xy_from_yz(q: &DomainPointYZ) -> f64 {
    let (a, _, c) = yz_factors(q.y, q.z);
    4.0 * PI * PI * (a.max(0.0) * c.max(0.0)).sqrt()
}

/// `J_{x,y}/(4π²)` as a Laurent polynomial with eight ±1 terms.
pub fn jacobian_xy_poly() -> LaurentPoly2 {
    LaurentPoly2::from_terms([
        ((1, 2), 1),
        ((-1, -2), 1),
        ((2, -1), 1),
        ((-2, 1), 1),
        ((2, 1), -1),
        ((-2, -1), -1),
        ((1, -2), -1),
        ((-1, 2), -1),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PI2: f64 = PI * PI;

    #[test]
    fn group_has_eight_elements() {
        let g = d8_elements();
        assert_eq!(g.len(), 8);
        for a in &g {
            assert!(g.contains(&a.inverse()));
            assert_eq!(a.compose(a.inverse()), D8Element::IDENTITY);
            for b in &g {
                assert!(g.contains(&a.compose(*b)));
            }
        }
    }

    #[test]
    fn actions() {
        let p = TorusPoint::from_fracs(1, 8, 1, 4);
        assert_eq!(D8Element::T2.act(&p), TorusPoint::from_fracs(1, 4, 1, 8));
        assert_eq!(D8Element::T4.act(&p), TorusPoint::from_fracs(1, 4, 7, 8));
        assert_eq!(D8Element::IDENTITY.act(&p), p);
    }

    #[test]
    fn orbit_sizes() {
        assert_eq!(d8_orbit(&TorusPoint::from_fracs(0, 1, 0, 1)).len(), 1);
        assert_eq!(d8_orbit(&TorusPoint::from_fracs(1, 12, 2, 12)).len(), 8);
        assert_eq!(d8_orbit(&TorusPoint::from_fracs(1, 8, 1, 8)).len(), 4);
    }

    #[test]
    fn jacobian_values() {
        let p = TorusPoint::from_fracs(1, 8, 1, 4);
        assert!((jacobian_xy(&p) - 16.0 * PI2).abs() < 1e-10);
        assert!((jacobian_xy_sine(&p) - 16.0 * PI2).abs() < 1e-10);
        assert!(jacobian_xy_angles(0.3, 0.3).abs() < 1e-10);
        assert!(jacobian_xy_sine_angles(0.0, 0.3).abs() < 1e-12);
        assert!(jacobian_xy_sine_angles(0.25, 0.25).abs() < 1e-12);
        let e3 = TorusPoint::from_fracs(1, 12, 2, 12);
        let v = jacobian_xy(&e3).abs() / (8.0 * PI2);
        assert!((v - (3.0 - 3f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((jacobian_yz(&p).abs() - 32.0 * 2f64.sqrt() * PI2).abs() < 1e-9);
        assert!((jacobian_yz(&p).powi(2) - 2048.0 * PI2 * PI2).abs() < 1e-6);
        assert!(jacobian_yz_angles(0.1, 0.4).abs() < 1e-10);
    }

    #[test]
    fn factorised_values() {
        let q = DomainPointXY::new(2f64.sqrt(), 1.0).unwrap();
        assert!((jacobian_xy_from_xy(&q) - 16.0 * PI2).abs() < 1e-9);
        assert_eq!(jacobian_xy_at_xy(0.0, -3.0).unwrap(), 0.0);
        assert!(jacobian_xy_at_xy(0.0, 3.0).is_err());
        let r = DomainPointYZ::new(1.0, 0.0).unwrap();
        assert!((jacobian_yz_from_yz(&r) - 32.0 * 2f64.sqrt() * PI2).abs() < 1e-9);
    }

    #[test]
    fn psi_values() {
        let o = TorusPoint::from_fracs(0, 1, 0, 1);
        assert_eq!(psi_map(Pair::XY, &o), DomainPoint::XY(DomainPointXY { x: 4.0, y: 5.0 }));
        match psi_map(Pair::XY, &TorusPoint::from_fracs(1, 2, 0, 1)) {
            DomainPoint::XY(q) => assert!(q.x.abs() < 1e-12 && (q.y + 3.0).abs() < 1e-12),
            _ => unreachable!(),
        }
        match psi_map(Pair::YZ, &TorusPoint::from_fracs(1, 2, 1, 2)) {
            DomainPoint::YZ(q) => assert!((q.y - 5.0).abs() < 1e-12 && (q.z - 10.0).abs() < 1e-12),
            _ => unreachable!(),
        }
    }

    #[test]
    fn laurent_jacobian_matches() {
        let d = jacobian_xy_poly();
        for &(t1, t2) in &[(0.1, 0.2), (0.33, 0.71)] {
            let (re, im) = d.eval(t1, t2);
            assert!((4.0 * PI2 * re - jacobian_xy_angles(t1, t2)).abs() < 1e-9);
            assert!(im.abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn sine_form_matches(t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
            let a = jacobian_xy_angles(t1, t2);
            let b = jacobian_xy_sine_angles(t1, t2);
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()) * 100.0);
            let c = jacobian_yz_angles(t1, t2);
            let d = jacobian_yz_sine_angles(t1, t2);
            prop_assert!((c - d).abs() <= 1e-8 * (1.0 + c.abs()));
        }

        #[test]
        fn squared_jacobian_invariant(t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
            let j2 = jacobian_xy_angles(t1, t2).powi(2);
            for g in d8_elements() {
                let (s1, s2) = g.act_f64(t1, t2);
                let k = jacobian_xy_angles(s1, s2);
                prop_assert!((k * k - j2).abs() <= 1e-9 * (1.0 + j2));
                // antisymmetry: J transforms by det g
                prop_assert!((k - g.det() as f64 * jacobian_xy_angles(t1, t2)).abs() < 1e-8);
            }
        }

        #[test]
        fn factorisations(t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
            let x = char_fund_angles(Generator::X, t1, t2);
            let y = char_fund_angles(Generator::Y, t1, t2);
            let z = char_fund_angles(Generator::Z, t1, t2);
            let j = jacobian_xy_angles(t1, t2);
            let f = jacobian_xy_from_xy(&DomainPointXY::new(x, y).unwrap());
            prop_assert!((j.abs() - f).abs() <= 1e-8 * (1.0 + f) * 10.0);
            let jyz = jacobian_yz_angles(t1, t2);
            let g = jacobian_yz_from_yz(&DomainPointYZ::new(y, z).unwrap());
            prop_assert!((jyz.abs() - g).abs() <= 1e-8 * (1.0 + g) * 10.0);
            let rel = 2.0 * (z + y + 1.0).max(0.0).sqrt() * j.abs();
            prop_assert!((jyz.abs() - rel).abs() <= 1e-8 * (1.0 + rel) * 10.0);
        }
    }
}

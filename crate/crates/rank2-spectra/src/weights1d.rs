//! One-dimensional spectral weights on `I_x`, `I_y`, `I_z`.
//!
//! Complete elliptic integrals use the parameter convention
//! `K(m) = ∫₀^{π/2} (1 − m sin²θ)^{-1/2} dθ`. Integrals use tanh-sinh
//! quadrature on panels split at the breakpoints of each weight.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::torus::Generator;

/// Complete elliptic integral of the first kind via the AGM.
pub fn ellip_k(m: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m) {
        return Err(Error::InvalidParameter(format!("K(m) needs 0 ≤ m < 1, got {m}")));
    }
    let (mut a, mut b) = (1.0f64, (1.0 - m).sqrt());
    for _ in 0..64 {
        if (a - b).abs() <= 1e-15 * a {
            break;
        }
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    Ok(PI / (2.0 * a))
}

/// Complete elliptic integral of the second kind via the AGM.
pub fn ellip_e(m: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::InvalidParameter(format!("E(m) needs 0 ≤ m ≤ 1, got {m}")));
    }
    if m == 1.0 {
        return Ok(1.0);
    }
    let (mut a, mut b) = (1.0f64, (1.0 - m).sqrt());
    let mut sum = m / 2.0;
    let mut pow = 0.5;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        pow *= 2.0;
        sum += pow * c * c;
        if c.abs() <= 1e-15 * a {
            break;
        }
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    Ok(PI / (2.0 * a) * (1.0 - sum))
}

fn k_or_inf(m: f64) -> f64 {
    ellip_k(m.clamp(0.0, 1.0)).unwrap_or(f64::INFINITY)
}

fn e_clamped(m: f64) -> f64 {
    ellip_e(m.clamp(0.0, 1.0)).expect("clamped parameter")
}

/// Abscissa handed to a tanh-sinh integrand, with its distances to both ends
/// computed without cancellation.
#[derive(Clone, Copy, Debug)]
pub struct Node {
    pub x: f64,
    pub da: f64,
    pub db: f64,
}

/// Tanh-sinh quadrature of a vector-valued integrand on `[a, b]`.
///
/// `f(node, out)` writes `dim` values; non-finite values are skipped. Levels
/// are refined until successive estimates agree to `tol` relative to
/// `max(1, |I|)`.
pub fn tanh_sinh_many(mut f: impl FnMut(Node, &mut [f64]), dim: usize, a: f64, b: f64, tol: f64) -> Vec<f64> {
    let mut sum = vec![0.0; dim];
    if b <= a {
        return sum;
    }
    let d = 0.5 * (b - a);
    let tmax = 4.0;
    let mut buf = vec![0.0; dim];
    let mut node = |t: f64, sum: &mut [f64], buf: &mut [f64]| {
        let u = 0.5 * PI * t.sinh();
        let w = d * 0.5 * PI * t.cosh() / u.cosh().powi(2);
        let gap = d * 2.0 / ((2.0 * u.abs()).exp() + 1.0);
        if gap == 0.0 || w == 0.0 {
            return;
        }
        let n = if t >= 0.0 {
            Node { x: b - gap, da: 2.0 * d - gap, db: gap }
        } else {
            Node { x: a + gap, da: gap, db: 2.0 * d - gap }
        };
        f(n, buf);
        for (s, v) in sum.iter_mut().zip(buf.iter()) {
            if v.is_finite() {
                *s += w * v;
            }
        }
    };
    let mut h = 0.5;
    let mut k = 0i64;
    while k as f64 * h <= tmax {
        node(k as f64 * h, &mut sum, &mut buf);
        if k > 0 {
            node(-(k as f64) * h, &mut sum, &mut buf);
        }
        k += 1;
    }
    let mut est: Vec<f64> = sum.iter().map(|s| s * h).collect();
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut k = 1i64;
        while k as f64 * h <= tmax {
            node(k as f64 * h, &mut sum, &mut buf);
            node(-(k as f64) * h, &mut sum, &mut buf);
            k += 2;
        }
        let next: Vec<f64> = sum.iter().map(|s| s * h).collect();
        let done = next.iter().zip(&est).all(|(n, o)| (n - o).abs() <= tol * n.abs().max(1.0));
        est = next;
        if done && level >= 3 {
            break;
        }
    }
    est
}

/// Refinement cap: step `2⁻⁹`, about 4100 nodes.
const MAX_LEVEL: u32 = 8;

pub fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    tanh_sinh_many(|n, out| out[0] = f(n.x), 1, a, b, tol)[0]
}

/// Scalar tanh-sinh with endpoint distances available to the integrand.
pub fn tanh_sinh_nodes(f: impl Fn(Node) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    tanh_sinh_many(|n, out| out[0] = f(n), 1, a, b, tol)[0]
}

/// Which pushforward: of the uniform measure on 𝕋², or of Haar measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    T2,
    Haar,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::T2 => "T2",
            Family::Haar => "Haar",
        })
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "t2" | "torus" => Ok(Family::T2),
            "haar" => Ok(Family::Haar),
            other => Err(Error::InvalidParameter(format!("weight family `{other}`"))),
        }
    }
}

/// Density on an interval, with the interior points where it is not smooth.
#[derive(Clone)]
pub struct Weight1D {
    pub family: Family,
    pub generator: Generator,
    pub lo: f64,
    pub hi: f64,
    pub breakpoints: Vec<f64>,
    density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for Weight1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Weight1D")
            .field("family", &self.family)
            .field("generator", &self.generator)
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("breakpoints", &self.breakpoints)
            .finish_non_exhaustive()
    }
}

/// Default relative tolerance of weight quadratures.
pub const QUAD_TOL: f64 = 1e-10;

impl Weight1D {
    pub fn new(family: Family, u: Generator, breakpoints: Vec<f64>, density: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        let (lo, hi) = u.interval();
        Weight1D {
            family,
            generator: u,
            lo,
            hi,
            breakpoints,
            density: Arc::new(density),
        }
    }

    /// Density at `t`; zero outside the interval.
    pub fn eval(&self, t: f64) -> f64 {
        if t < self.lo || t > self.hi {
            0.0
        } else {
            (self.density)(t)
        }
    }

    fn panels(&self) -> Vec<(f64, f64)> {
        let mut cuts = vec![self.lo];
        cuts.extend(self.breakpoints.iter().copied());
        cuts.push(self.hi);
        cuts.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// `∫ t^m w(t) dt` for `m = 0..=max_m`.
    pub fn moments(&self, max_m: u32) -> Vec<f64> {
        let dim = max_m as usize + 1;
        let mut total = vec![0.0; dim];
        for (a, b) in self.panels() {
            let part = tanh_sinh_many(
                |n, out| {
                    let t = n.x;
                    let mut v = self.eval(t);
                    for o in out.iter_mut() {
                        *o = v;
                        v *= t;
                    }
                },
                dim,
                a,
                b,
                QUAD_TOL,
            );
            for (s, p) in total.iter_mut().zip(part) {
                *s += p;
            }
        }
        total
    }

    pub fn mass(&self) -> f64 {
        self.moments(0)[0]
    }

    /// `n ≥ 2` equally spaced samples over the closed interval.
    pub fn samples(&self, n: usize) -> Result<Vec<(f64, f64)>> {
        if n < 2 {
            return Err(Error::InvalidParameter("need at least 2 samples".into()));
        }
        let step = (self.hi - self.lo) / (n - 1) as f64;
        Ok((0..n)
            .map(|i| {
                let t = if i == n - 1 { self.hi } else { self.lo + i as f64 * step };
                (t, self.eval(t))
            })
            .collect())
    }

    pub fn write_csv(&self, n: usize, out: impl std::io::Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([self.generator.to_string().as_str(), "density"])?;
        for (t, v) in self.samples(n)? {
            w.write_record([format!("{t:.12}"), format!("{v:.15e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `v(x) = (x+4)²/(x−4)²`.
pub fn v_of(x: f64) -> f64 {
    (x + 4.0).powi(2) / (x - 4.0).powi(2)
}

/// Uniform-measure weight for `x`.
pub fn t2_x(x: f64) -> f64 {
    if x <= 0.0 {
        4.0 * k_or_inf(v_of(x)) / (PI * PI * (4.0 - x))
    } else {
        4.0 * k_or_inf(1.0 / v_of(x)) / (PI * PI * (x + 4.0))
    }
}

/// Uniform-measure weight for `y`, from its own slice integral over `x`.
pub fn t2_y(y: f64) -> f64 {
    if y <= 1.0 {
        4.0 * k_or_inf((y + 3.0).powi(2) / (y - 5.0).powi(2)) / (PI * PI * (5.0 - y))
    } else {
        4.0 * k_or_inf((y - 5.0).powi(2) / (y + 3.0).powi(2)) / (PI * PI * (y + 3.0))
    }
}

/// Slice integral behind [`t2_y`], evaluated by quadrature in an angle variable.
pub fn t2_y_by_angle(y: f64) -> f64 {
    let b = 0.5 * (y + 3.0);
    if y < 1.0 {
        let c = 4.0 - 4.0 * y;
        let f = |p: f64| 1.0 / (b * b * p.sin().powi(2) + c).sqrt();
        2.0 * tanh_sinh(f, 0.0, 0.5 * PI, 1e-13) / (PI * PI)
    } else {
        let a2 = 4.0 * (y - 1.0);
        let f = |p: f64| 1.0 / (a2 * p.cos().powi(2) + b * b * p.sin().powi(2)).sqrt();
        2.0 * tanh_sinh(f, 0.0, 0.5 * PI, 1e-13) / (PI * PI)
    }
}

/// Boundary factor of 𝔇_{y,z} vanishing at a slice end.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum End {
    /// `z − 3y + 5`
    C1,
    /// `z + y + 1`
    C2,
    /// `y² + 2y + 5 − 4z`
    C3,
    Open,
}

#[derive(Clone, Copy, Debug)]
struct Slice {
    a: f64,
    b: f64,
    left: End,
    right: End,
}

/// `y`-slices of 𝔇_{y,z} at fixed `z`, split at `y = −1` where the third
/// factor nearly vanishes inside the slice.
fn slices(z: f64) -> Vec<Slice> {
    let top = (z + 5.0) / 3.0;
    if z <= 0.0 {
        vec![Slice { a: -z - 1.0, b: top, left: End::C2, right: End::C1 }]
    } else if z <= 1.0 {
        vec![
            Slice { a: -z - 1.0, b: -1.0, left: End::C2, right: End::Open },
            Slice { a: -1.0, b: top, left: End::Open, right: End::C1 },
        ]
    } else {
        let s = 2.0 * (z - 1.0).sqrt();
        let mut out = Vec::new();
        if z < 2.0 {
            out.push(Slice { a: -z - 1.0, b: -1.0 - s, left: End::C2, right: End::C3 });
        }
        if -1.0 + s < top {
            out.push(Slice { a: -1.0 + s, b: top, left: End::C3, right: End::C1 });
        }
        out
    }
}

/// `y`-intervals of 𝔇_{y,z} at fixed `z`.
pub fn yz_slices(z: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for sl in slices(z) {
        match out.last_mut() {
            Some(last) if last.1 == sl.a => last.1 = sl.b,
            _ => out.push((sl.a, sl.b)),
        }
    }
    out
}

/// The three boundary factors at a node, vanishing ones taken from the node's
/// endpoint distances.
fn yz_factors_at(z: f64, sl: &Slice, n: Node) -> (f64, f64, f64) {
    let y = n.x;
    let s = if z > 1.0 { 2.0 * (z - 1.0).sqrt() } else { 0.0 };
    let f1 = if sl.right == End::C1 { 3.0 * n.db } else { z - 3.0 * y + 5.0 };
    let f2 = if sl.left == End::C2 { n.da } else { z + y + 1.0 };
    let f3 = if sl.left == End::C3 {
        n.da * (2.0 * s + n.da)
    } else if sl.right == End::C3 {
        n.db * (2.0 * s + n.db)
    } else {
        (y + 1.0).powi(2) + 4.0 * (1.0 - z)
    };
    (f1.max(0.0), f2.max(0.0), f3.max(0.0))
}

const INNER_TOL: f64 = 1e-12;

/// Uniform-measure weight for `z`: `16 ∫ |J_{y,z}|⁻¹ dy` over the slice.
pub fn t2_z(z: f64) -> f64 {
    slices(z)
        .iter()
        .map(|sl| {
            tanh_sinh_nodes(
                |n| {
                    let (f1, f2, f3) = yz_factors_at(z, sl, n);
                    16.0 / (8.0 * PI * PI * (f1 * f2 * f3).sqrt())
                },
                sl.a,
                sl.b,
                INNER_TOL,
            )
        })
        .sum()
}

fn abs_j_xy(x: f64, y: f64) -> f64 {
    4.0 * PI * PI * ((y + 2.0 * x + 3.0) * (y - 2.0 * x + 3.0) * (x * x + 4.0 - 4.0 * y)).max(0.0).sqrt()
}

/// Haar weight for `x`: `(1/16π⁴) ∫ |J_{x,y}| dy`.
pub fn haar_x(x: f64) -> f64 {
    let lo = (2.0 * x - 3.0).max(-2.0 * x - 3.0);
    let hi = (x * x + 4.0) / 4.0;
    let j = |n: Node| 4.0 * PI * PI * (n.da * (4.0 * x.abs() + n.da) * 4.0 * n.db).sqrt();
    tanh_sinh_nodes(j, lo, hi, INNER_TOL) / (16.0 * PI.powi(4))
}

/// Haar weight for `y`, closed form in `K` and `E`.
pub fn haar_y(y: f64) -> f64 {
    let pre = 2.0 * PI * PI / 3.0 / (16.0 * PI.powi(4));
    let v = v_of(y - 1.0);
    let p = y * y + 22.0 * y - 7.0;
    if y <= 1.0 {
        let k = if y == 1.0 { 0.0 } else { 16.0 * (1.0 - y) * k_or_inf(v) };
        pre * (5.0 - y) * (k + p * e_clamped(v))
    } else {
        let iv = 1.0 / v;
        pre * (y + 3.0) * (32.0 * (1.0 - y) * k_or_inf(iv) + p * e_clamped(iv))
    }
}

/// Haar weight for `y` by direct integration over `x`.
pub fn haar_y_by_slices(y: f64) -> f64 {
    let hi = 0.5 * (y + 3.0);
    let lo = if y > 1.0 { 2.0 * (y - 1.0).sqrt() } else { 0.0 };
    2.0 * tanh_sinh(|x| abs_j_xy(x, y), lo, hi, INNER_TOL) / (16.0 * PI.powi(4))
}

/// Haar weight for `z`: `(1/16π⁴) ∫ |J_{x,y}(y,z)| (z+y+1)^{-1/2} dy`.
pub fn haar_z(z: f64) -> f64 {
    haar_z_unscaled(z) / (16.0 * PI.powi(4))
}

fn haar_z_unscaled(z: f64) -> f64 {
    slices(z)
        .iter()
        .map(|sl| {
            tanh_sinh_nodes(
                |n| {
                    let (f1, f2, f3) = yz_factors_at(z, sl, n);
                    4.0 * PI * PI * (f1 * f3).sqrt() / f2.sqrt()
                },
                sl.a,
                sl.b,
                INNER_TOL,
            )
        })
        .sum()
}

pub fn weight_t2(u: Generator) -> Weight1D {
    match u {
        Generator::X => Weight1D::new(Family::T2, u, vec![0.0], t2_x),
        Generator::Y => Weight1D::new(Family::T2, u, vec![1.0], t2_y),
        Generator::Z => Weight1D::new(Family::T2, u, vec![1.0, 2.0], t2_z),
    }
}

pub fn weight_haar(u: Generator) -> Weight1D {
    match u {
        Generator::X => Weight1D::new(Family::Haar, u, vec![0.0], haar_x),
        Generator::Y => Weight1D::new(Family::Haar, u, vec![1.0], haar_y),
        Generator::Z => Weight1D::new(Family::Haar, u, vec![1.0, 2.0], haar_z),
    }
}

pub fn weight(family: Family, u: Generator) -> Weight1D {
    match family {
        Family::T2 => weight_t2(u),
        Family::Haar => weight_haar(u),
    }
}

/// Second printed expression for the uniform `x`-weight on `[−4, 0]`.
pub fn t2_x_second_printed(x: f64) -> f64 {
    -4.0 * v_of(x).sqrt() * k_or_inf(v_of(x)) / (PI * PI * (x + 4.0))
}

/// Printed `K`/`E` closed form of the unnormalized Haar `x`-weight.
pub fn haar_x_printed_unscaled(x: f64) -> f64 {
    let p = x.powi(4) + 224.0 * x * x + 256.0;
    if x <= 0.0 {
        let v = v_of(x);
        PI * PI / 15.0 * (4.0 - x) * (p * e_clamped(v) + 8.0 * x * (x * x - 24.0 * x + 12.0) * k_or_inf(v))
    } else {
        let iv = 1.0 / v_of(x);
        PI * PI / 15.0 * (x + 4.0) * (p * e_clamped(iv) - 8.0 * x * (x * x + 24.0 * x + 12.0) * k_or_inf(iv))
    }
}

/// Haar `z`-weight with the printed `1/8π⁴` normalization.
pub fn haar_z_printed(z: f64) -> f64 {
    haar_z_unscaled(z) / (8.0 * PI.powi(4))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::moment_multinomial;

    fn k_series(m: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 1..2000 {
            let r = (2 * n - 1) as f64 / (2 * n) as f64;
            term *= r * r * m;
            sum += term;
            if term < 1e-18 {
                break;
            }
        }
        PI / 2.0 * sum
    }

    #[test]
    fn elliptic_values() {
        assert!((ellip_k(0.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((ellip_e(0.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(ellip_e(1.0).unwrap(), 1.0);
        assert!(ellip_k(1.0).is_err());
        for m in [0.1, 0.5, 0.75] {
            let (a, b) = (ellip_k(m).unwrap(), k_series(m));
            assert!((a - b).abs() < 1e-12 * b, "K({m})");
        }
        // Legendre relation at m = 1/2
        let (k, e) = (ellip_k(0.5).unwrap(), ellip_e(0.5).unwrap());
        assert!((2.0 * e * k - k * k - PI / 2.0).abs() < 1e-13);
        // E against direct quadrature
        for m in [0.3, 0.9, 0.999] {
            let q = tanh_sinh(|t: f64| (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, PI / 2.0, 1e-14);
            assert!((ellip_e(m).unwrap() - q).abs() < 1e-13);
        }
    }

    #[test]
    fn quadrature_handles_endpoint_singularities() {
        let v = tanh_sinh_nodes(|n| 1.0 / (n.da * n.db).sqrt(), 0.0, 1.0, 1e-12);
        assert!((v - PI).abs() < 1e-12, "{}", v - PI);
        // without endpoint distances the last ~1e-16 of each end is lost
        let w = tanh_sinh(|x| 1.0 / (x * (1.0 - x)).sqrt(), 0.0, 1.0, 1e-12);
        assert!((w - PI).abs() < 1e-7, "{}", w - PI);
        let l = tanh_sinh(|x: f64| -x.ln(), 0.0, 1.0, 1e-12);
        assert!((l - 1.0).abs() < 1e-10);
    }

    #[test]
    fn y_weight_branches() {
        for i in 0..50 {
            let y = -2.95 + 7.9 * i as f64 / 49.0;
            let a = t2_y(y);
            let b = t2_x(y - 1.0);
            assert!((a - b).abs() < 1e-8 * b.max(1.0), "y={y}");
            if (y - 1.0).abs() > 1e-3 {
                let c = t2_y_by_angle(y);
                assert!((a - c).abs() < 1e-9 * c.max(1.0), "y={y}: {a} vs {c}");
            }
        }
    }

    #[test]
    fn second_printed_form_is_negated() {
        for x in [-3.5, -2.0, -0.5] {
            assert!((t2_x_second_printed(x) + t2_x(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_y_closed_form_matches_slices() {
        for y in [-2.5, -1.0, 0.0, 0.9, 1.1, 2.0, 4.0, 4.9] {
            let a = haar_y(y);
            let b = haar_y_by_slices(y);
            assert!((a - b).abs() < 1e-9, "y={y}: {a} vs {b}");
        }
    }

    #[test]
    fn printed_haar_x_disagrees() {
        let a = haar_x_printed_unscaled(-2.0) / (16.0 * PI.powi(4));
        assert!((a - haar_x(-2.0)).abs() > 1e-3);
    }

    #[test]
    fn continuity_at_junctions() {
        let e = 1e-9;
        assert!((haar_y(1.0 - e) - haar_y(1.0 + e)).abs() < 1e-6);
        assert!((haar_y(1.0) - haar_y(1.0 + e)).abs() < 1e-6);
        // the uniform x-weight diverges at 0 from both sides alike
        let d = 1e-6;
        assert!((t2_x(-d) / t2_x(d) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn boundary_values() {
        assert!(haar_x(4.0).abs() < 1e-12);
        assert!(haar_x(-4.0).abs() < 1e-12);
        assert!(t2_x(0.0).is_infinite());
        assert_eq!(weight_t2(Generator::X).eval(5.0), 0.0);
    }

    #[test]
    fn t2_masses_and_low_moments() {
        for u in Generator::ALL {
            let w = weight_t2(u);
            let mom = w.moments(4);
            for (m, v) in mom.iter().enumerate() {
                let exact: f64 = moment_multinomial(u, m as u64).to_string().parse().unwrap();
                assert!((v - exact).abs() < 1e-6 * exact.max(1.0), "{u} m={m}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn haar_masses() {
        for u in Generator::ALL {
            assert!((weight_haar(u).mass() - 1.0).abs() < 1e-7, "{u}");
        }
        let printed = Weight1D::new(Family::Haar, Generator::Z, vec![1.0, 2.0], haar_z_printed);
        assert!((printed.mass() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn nonnegative_and_csv() {
        for fam in [Family::T2, Family::Haar] {
            for u in Generator::ALL {
                let w = weight(fam, u);
                for (_, v) in w.samples(101).unwrap() {
                    assert!(v >= 0.0);
                }
            }
        }
        let mut buf = Vec::new();
        weight_haar(Generator::X).write_csv(5, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().count(), 6);
        assert!(weight_haar(Generator::X).samples(1).is_err());
    }
}

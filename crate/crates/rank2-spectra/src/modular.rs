//! Level-k modular data: S-matrix, Verlinde fusion, Perron–Frobenius vector
//! and the exponent data of the A, D and exceptional nimreps.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fusion::sp2_alcove;
use crate::torus::{char_fund, Generator, TorusPoint, Weight};
use crate::weyl::{jacobian_xy, jacobian_yz, Pair};

/// Guard band for rounding Verlinde entries to integers.
pub const INTEGRALITY_GUARD: f64 = 1e-6;

pub fn kappa(k: u32) -> u32 {
    k + 3
}

/// Entry of the level-k S-matrix for shifted weights `a = λ+ρ`, `b = μ+ρ`.
pub fn s_entry(k: u32, l: Weight, m: Weight) -> f64 {
    let kap = kappa(k) as f64;
    let xi = PI / (2.0 * kap);
    let (a1, a2) = (l.l1 as f64 + 1.0, l.l2 as f64 + 1.0);
    let (b1, b2) = (m.l1 as f64 + 1.0, m.l2 as f64 + 1.0);
    let (a, b) = (a1 + 2.0 * a2, b1 + 2.0 * b2);
    ((xi * (a * b + a1 * b1)).cos() - (xi * (a * b - a1 * b1)).cos() + (xi * (a * b1 - a1 * b)).cos()
        - (xi * (a * b1 + a1 * b)).cos())
        / kap
}

/// Real symmetric S-matrix on the Sp(2) alcove.
#[derive(Clone, Debug)]
pub struct SMatrix {
    pub level: u32,
    pub weights: Vec<Weight>,
    data: Vec<f64>,
}

impl SMatrix {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.len() + j]
    }

    pub fn index_of(&self, w: Weight) -> Option<usize> {
        self.weights.iter().position(|v| *v == w)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.data[i * n..(i + 1) * n]
    }

    /// `max |S Sᵀ − I|` (S is real, so this is the unitarity defect).
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let dot: f64 = self.row(i).iter().zip(self.row(j)).map(|(a, b)| a * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    pub fn symmetry_residual(&self) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Out<'a> {
            level: u32,
            weights: Vec<[u32; 2]>,
            matrix: Vec<&'a [f64]>,
        }
        let out = Out {
            level: self.level,
            weights: self.weights.iter().map(|w| [w.l1, w.l2]).collect(),
            matrix: (0..self.len()).map(|i| self.row(i)).collect(),
        };
        Ok(serde_json::to_string_pretty(&out)?)
    }
}

pub fn smatrix(k: u32) -> SMatrix {
    let weights = sp2_alcove(k);
    let data = weights
        .iter()
        .flat_map(|l| weights.iter().map(move |m| s_entry(k, *l, *m)))
        .collect();
    SMatrix { level: k, weights, data }
}

/// Fusion matrix `(N_w)_{μν} = Σ_σ S_{wσ} S_{μσ} S_{νσ} / S_{0σ}`, rounded.
pub fn verlinde_n(k: u32, w: Weight) -> Result<Vec<Vec<u64>>> {
    verlinde_n_with(&smatrix(k), w)
}

pub fn verlinde_n_with(s: &SMatrix, w: Weight) -> Result<Vec<Vec<u64>>> {
    let wi = s.index_of(w).ok_or(Error::OutsideAlcove(w.l1, w.l2, s.level))?;
    let n = s.len();
    let ratio: Vec<f64> = (0..n).map(|sg| s.get(wi, sg) / s.get(0, sg)).collect();
    let mut out = vec![vec![0u64; n]; n];
    for mu in 0..n {
        for nu in mu..n {
            let v: f64 = (0..n).map(|sg| ratio[sg] * s.get(mu, sg) * s.get(nu, sg)).sum();
            let r = v.round();
            if (v - r).abs() > INTEGRALITY_GUARD || r < 0.0 {
                return Err(Error::Integrality {
                    row: mu,
                    col: nu,
                    value: v,
                    guard: INTEGRALITY_GUARD,
                });
            }
            out[mu][nu] = r as u64;
            out[nu][mu] = r as u64;
        }
    }
    Ok(out)
}

/// Exponent point `θ_λ = (λ̂₂/2κ, (λ̂₁+λ̂₂)/2κ)`.
pub fn theta_of(k: u32, w: Weight) -> TorusPoint {
    let d = 2 * kappa(k) as i64;
    let (a1, a2) = (w.l1 as i64 + 1, w.l2 as i64 + 1);
    TorusPoint::new(Ratio::new(a2, d), Ratio::new(a1 + a2, d))
}

/// Evaluation route for the Perron–Frobenius entry `ψ*_λ = S_{0λ}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsiMode {
    /// Four-cosine closed form.
    Cosine,
    /// `J_{x,y}(θ_λ) / 8κπ²`.
    Jacobian,
    /// Kac–Weyl sine product scaled by `8 sin ξ sin 2ξ sin 3ξ sin 4ξ / κ`.
    KacWeyl,
}

pub fn psi_star(k: u32, w: Weight, mode: PsiMode) -> f64 {
    let kap = kappa(k) as f64;
    let xi = PI / (2.0 * kap);
    let (a1, a2) = (w.l1 as f64 + 1.0, w.l2 as f64 + 1.0);
    match mode {
        PsiMode::Cosine => {
            ((2.0 * xi * (2.0 * a1 + 3.0 * a2)).cos() + (2.0 * xi * (a1 - a2)).cos()
                - (2.0 * xi * (a1 + 3.0 * a2)).cos()
                - (2.0 * xi * (2.0 * a1 + a2)).cos())
                / kap
        }
        PsiMode::Jacobian => jacobian_xy(&theta_of(k, w)) / (8.0 * kap * PI * PI),
        PsiMode::KacWeyl => {
            let prod = |b1: f64, b2: f64| {
                (b1 * xi).sin() * (2.0 * b2 * xi).sin() * ((b1 + 2.0 * b2) * xi).sin() * ((2.0 * b1 + 2.0 * b2) * xi).sin()
            };
            8.0 * prod(1.0, 1.0) / kap * prod(a1, a2) / prod(1.0, 1.0)
        }
    }
}

/// Nimrep families with known spectral data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    ASp2(u32),
    ASO5(u32),
    D(u32),
    E3,
    E3M,
    E7,
    E7M,
    E8,
    E12,
    AInfty,
}

impl Model {
    /// Level of the underlying Verlinde algebra (none for A_∞).
    pub fn level(&self) -> Option<u32> {
        match self {
            Model::ASp2(k) | Model::ASO5(k) | Model::D(k) => Some(*k),
            Model::E3 | Model::E3M => Some(3),
            Model::E7 | Model::E7M => Some(7),
            Model::E8 => Some(8),
            Model::E12 => Some(12),
            Model::AInfty => None,
        }
    }

    /// Natural generator pair for moments.
    pub fn pair(&self) -> Pair {
        match self {
            Model::ASO5(_) | Model::E8 => Pair::YZ,
            _ => Pair::XY,
        }
    }

    pub fn exceptional() -> [Model; 6] {
        [Model::E3, Model::E3M, Model::E7, Model::E7M, Model::E8, Model::E12]
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::ASp2(k) => write!(f, "A_Sp2({k})"),
            Model::ASO5(k) => write!(f, "A_SO5({k})"),
            Model::D(k) => write!(f, "D({k})"),
            Model::E3 => f.write_str("E3"),
            Model::E3M => f.write_str("E3M"),
            Model::E7 => f.write_str("E7"),
            Model::E7M => f.write_str("E7M"),
            Model::E8 => f.write_str("E8"),
            Model::E12 => f.write_str("E12"),
            Model::AInfty => f.write_str("A_infty"),
        }
    }
}

impl FromStr for Model {
    type Err = Error;
    /// Accepts e.g. `A_Sp2(3)`, `a-so5:4`, `D(5)`, `d5`, `E3M`, `A_infty`.
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        let level = |rest: &str| -> Result<u32> {
            let k: u32 = rest.parse().map_err(|_| Error::UnknownModel(s.to_string()))?;
            if k == 0 {
                return Err(Error::InvalidParameter("level must be at least 1".into()));
            }
            Ok(k)
        };
        match key.as_str() {
            "e3" => Ok(Model::E3),
            "e3m" => Ok(Model::E3M),
            "e7" => Ok(Model::E7),
            "e7m" => Ok(Model::E7M),
            "e8" => Ok(Model::E8),
            "e12" => Ok(Model::E12),
            "ainfty" | "ainf" | "asp2infty" => Ok(Model::AInfty),
            _ => {
                if let Some(rest) = key.strip_prefix("asp2") {
                    Ok(Model::ASp2(level(rest)?))
                } else if let Some(rest) = key.strip_prefix("aso5") {
                    Ok(Model::ASO5(level(rest)?))
                } else if let Some(rest) = key.strip_prefix('d') {
                    let k = level(rest)?;
                    if k < 2 {
                        return Err(Error::InvalidParameter("D(k) needs k ≥ 2".into()));
                    }
                    Ok(Model::D(k))
                } else {
                    Err(Error::UnknownModel(s.to_string()))
                }
            }
        }
    }
}

/// One exponent: its torus point, multiplicity and per-copy `|ψ*|²`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentEntry {
    pub label: Weight,
    pub theta: TorusPoint,
    pub multiplicity: u32,
    pub weight: f64,
    pub beta: [f64; 3],
}

impl ExponentEntry {
    fn new(k: u32, label: Weight, multiplicity: u32, weight: f64) -> Self {
        let theta = theta_of(k, label);
        let beta = Generator::ALL.map(|u| char_fund(u, &theta));
        ExponentEntry {
            label,
            theta,
            multiplicity,
            weight,
            beta,
        }
    }

    pub fn eigenvalue(&self, u: Generator) -> f64 {
        self.beta[u as usize]
    }
}

#[derive(Clone, Debug)]
pub struct ExponentData {
    pub model: Model,
    pub entries: Vec<ExponentEntry>,
}

impl ExponentData {
    /// `Σ mult · weight`.
    pub fn mass(&self) -> f64 {
        self.entries.iter().map(|e| e.multiplicity as f64 * e.weight).sum()
    }

    pub fn find(&self, label: Weight) -> Option<&ExponentEntry> {
        self.entries.iter().find(|e| e.label == label)
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Row {
            label: [u32; 2],
            theta: [[i64; 2]; 2],
            mult: u32,
            weight: f64,
            beta: [f64; 3],
        }
        let rows: Vec<Row> = self
            .entries
            .iter()
            .map(|e| Row {
                label: [e.label.l1, e.label.l2],
                theta: e.theta.as_pairs(),
                mult: e.multiplicity,
                weight: e.weight,
                beta: e.beta,
            })
            .collect();
        Ok(serde_json::to_string_pretty(&rows)?)
    }
}

/// `Σ mult · weight · β_{u1}^m β_{u2}^n` over the exponents.
pub fn exponent_sum_moment(data: &ExponentData, pair: Pair, m: u32, n: u32) -> f64 {
    let (u1, u2) = pair.generators();
    data.entries
        .iter()
        .map(|e| e.multiplicity as f64 * e.weight * e.eigenvalue(u1).powi(m as i32) * e.eigenvalue(u2).powi(n as i32))
        .sum()
}

/// Real roots of a quintic with five simple real roots, descending.
#[derive(Clone, Debug)]
pub struct QuinticRoots {
    /// Monic coefficients, highest degree first.
    pub coeffs: [f64; 6],
    pub roots: [f64; 5],
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().fold(0.0, |acc, &a| acc * x + a)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    let d = c.len() - 1;
    c[..d].iter().enumerate().map(|(i, a)| a * (d - i) as f64).collect()
}

fn bisect(c: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = horner(c, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = horner(c, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Real roots in `[lo, hi]`, bracketed between consecutive critical points.
fn real_roots(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    if c.len() == 2 {
        let r = -c[1] / c[0];
        return if (lo..=hi).contains(&r) { vec![r] } else { vec![] };
    }
    let mut cuts = vec![lo];
    cuts.extend(real_roots(&derivative(c), lo, hi));
    cuts.push(hi);
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (horner(c, a), horner(c, b));
        if fa == 0.0 {
            if out.last() != Some(&a) {
                out.push(a);
            }
        } else if (fa < 0.0) != (fb < 0.0) && fb != 0.0 {
            out.push(bisect(c, a, b));
        } else if fb == 0.0 {
            out.push(b);
        }
    }
    out.dedup();
    out
}

impl QuinticRoots {
    /// Coefficients highest degree first; returns `None` unless all five roots are real and distinct.
    pub fn solve(coeffs: [f64; 6]) -> Option<Self> {
        let lead = coeffs[0];
        let c = coeffs.map(|a| a / lead);
        let bound = 1.0 + c[1..].iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let mut r = real_roots(&c, -bound, bound);
        r.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if r.len() != 5 {
            return None;
        }
        Some(QuinticRoots {
            coeffs: c,
            roots: [r[0], r[1], r[2], r[3], r[4]],
        })
    }

    pub fn max_residual(&self) -> f64 {
        self.roots.iter().map(|&x| horner(&self.coeffs, x).abs()).fold(0.0, f64::max)
    }
}

/// Quintic whose roots carry the J-governed E₈ weights.
pub const E8_A_QUINTIC: [f64; 6] = [56689952.0, -15460896.0, 1522664.0, -63888.0, 968.0, -1.0];
/// Quintic whose roots `b` give the remaining E₈ weights `1/(11 b)`.
pub const E8_B_QUINTIC: [f64; 6] = [1.0, -11.0, 44.0, -77.0, 55.0, -11.0];

/// Per-copy weights of the E₈ table read literally: the remaining five entries carry `11 b`.
pub fn e8_printed_b_weights() -> [f64; 5] {
    QuinticRoots::solve(E8_B_QUINTIC).expect("five real roots").roots.map(|b| 11.0 * b)
}

/// Exponents of A_k(SO(5)): representatives `λ₁+2λ₂ ≤ k` of the simple-current orbits.
pub fn so5_exponents(k: u32) -> Vec<Weight> {
    sp2_alcove(k).into_iter().filter(|w| w.l1 + 2 * w.l2 <= k).collect()
}

pub fn eigendata(model: Model) -> Result<ExponentData> {
    let w = Weight::new;
    let entries = match model {
        Model::AInfty => {
            return Err(Error::InvalidParameter("A_infty has continuous spectrum".into()));
        }
        Model::ASp2(k) => sp2_alcove(k)
            .into_iter()
            .map(|l| ExponentEntry::new(k, l, 1, s_entry(k, Weight::ZERO, l).powi(2)))
            .collect(),
        Model::ASO5(k) => so5_exponents(k)
            .into_iter()
            .map(|l| {
                let s2 = s_entry(k, Weight::ZERO, l).powi(2);
                let fixed = l.l1 + 2 * l.l2 == k;
                ExponentEntry::new(k, l, 1, if fixed { s2 } else { 2.0 * s2 })
            })
            .collect(),
        Model::D(k) => sp2_alcove(k)
            .into_iter()
            .filter_map(|l| {
                let s2 = s_entry(k, Weight::ZERO, l).powi(2);
                let fixed = l.l1 + 2 * l.l2 == k;
                match (l.l1 % 2 == 0, fixed) {
                    (true, true) => Some(ExponentEntry::new(k, l, 2, s2)),
                    (true, false) => Some(ExponentEntry::new(k, l, 1, 2.0 * s2)),
                    (false, true) => Some(ExponentEntry::new(k, l, 1, 0.0)),
                    (false, false) => None,
                }
            })
            .collect(),
        Model::E3 | Model::E3M => {
            let scale = if model == Model::E3 { 24.0 } else { 12.0 };
            let r3 = 3f64.sqrt();
            let lo = (3.0 - r3) / scale;
            let hi = (3.0 + r3) / scale;
            vec![
                ExponentEntry::new(3, w(0, 0), 1, lo),
                ExponentEntry::new(3, w(2, 1), 1, hi),
                ExponentEntry::new(3, w(2, 0), 1, hi),
                ExponentEntry::new(3, w(0, 3), 1, lo),
                ExponentEntry::new(3, w(1, 1), 2, 0.25),
            ]
        }
        Model::E7 | Model::E7M => {
            let scale = if model == Model::E7 { 80.0 } else { 40.0 };
            let r5 = 5f64.sqrt();
            let p = (10.0 - 2.0 * r5).sqrt();
            let q = (10.0 + 2.0 * r5).sqrt();
            let a = (5.0 - r5 - p) / scale;
            let b = (5.0 - r5 + p) / scale;
            let c = (5.0 + r5 + q) / scale;
            let d = (5.0 + r5 - q) / scale;
            let mid = if model == Model::E7 { 0.25 } else { 0.0 };
            vec![
                ExponentEntry::new(7, w(0, 0), 1, a),
                ExponentEntry::new(7, w(0, 7), 1, a),
                ExponentEntry::new(7, w(6, 1), 1, b),
                ExponentEntry::new(7, w(6, 0), 1, b),
                ExponentEntry::new(7, w(2, 2), 1, c),
                ExponentEntry::new(7, w(2, 3), 1, c),
                ExponentEntry::new(7, w(0, 5), 1, d),
                ExponentEntry::new(7, w(0, 2), 1, d),
                ExponentEntry::new(7, w(3, 1), 1, mid),
                ExponentEntry::new(7, w(3, 3), 1, mid),
            ]
        }
        Model::E8 => {
            let a = QuinticRoots::solve(E8_A_QUINTIC).expect("five real roots").roots;
            let b = QuinticRoots::solve(E8_B_QUINTIC).expect("five real roots").roots;
            let bw = |i: usize| 1.0 / (11.0 * b[i]);
            vec![
                ExponentEntry::new(8, w(0, 0), 1, a[4]),
                ExponentEntry::new(8, w(0, 8), 1, a[4]),
                ExponentEntry::new(8, w(0, 2), 1, a[3]),
                ExponentEntry::new(8, w(0, 6), 1, a[3]),
                ExponentEntry::new(8, w(4, 0), 1, a[2]),
                ExponentEntry::new(8, w(4, 4), 1, a[2]),
                ExponentEntry::new(8, w(4, 1), 1, a[1]),
                ExponentEntry::new(8, w(4, 3), 1, a[1]),
                ExponentEntry::new(8, w(2, 2), 1, a[0]),
                ExponentEntry::new(8, w(2, 4), 1, a[0]),
                ExponentEntry::new(8, w(8, 0), 1, bw(0)),
                ExponentEntry::new(8, w(6, 1), 1, bw(4)),
                ExponentEntry::new(8, w(4, 2), 1, bw(1)),
                ExponentEntry::new(8, w(2, 3), 1, bw(3)),
                ExponentEntry::new(8, w(0, 4), 1, bw(2)),
            ]
        }
        Model::E12 => {
            let r5 = 5f64.sqrt();
            let p = (30.0 + 6.0 * r5).sqrt();
            let q = (30.0 - 6.0 * r5).sqrt();
            let a = (9.0 - r5 - p) / 120.0;
            let b = (9.0 + r5 - q) / 120.0;
            let c = (9.0 + r5 + q) / 120.0;
            let d = (9.0 - r5 + p) / 120.0;
            vec![
                ExponentEntry::new(12, w(0, 0), 1, a),
                ExponentEntry::new(12, w(0, 12), 1, a),
                ExponentEntry::new(12, w(6, 0), 1, b),
                ExponentEntry::new(12, w(6, 6), 1, b),
                ExponentEntry::new(12, w(8, 1), 1, c),
                ExponentEntry::new(12, w(8, 3), 1, c),
                ExponentEntry::new(12, w(2, 3), 1, d),
                ExponentEntry::new(12, w(2, 7), 1, d),
                ExponentEntry::new(12, w(4, 4), 4, 1.0 / 6.0),
            ]
        }
    };
    Ok(ExponentData { model, entries })
}

/// `J_{y,z}(θ)² / 256π⁴ · 2/121`, the closed form of the E₈ a-weights.
pub fn e8_a_weight_from_jacobian(theta: &TorusPoint) -> f64 {
    jacobian_yz(theta).powi(2) / (256.0 * PI.powi(4)) * 2.0 / 121.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::{a_graph, Group};
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn level_one() {
        let s = smatrix(1);
        assert_eq!(s.len(), 3);
        assert!(s.unitarity_residual() < 1e-12);
        assert!(s.symmetry_residual() < 1e-12);
    }

    #[test]
    fn unitary_symmetric_up_to_20() {
        for k in 1..=20 {
            let s = smatrix(k);
            assert!(s.unitarity_residual() < 1e-10, "k={k}");
            assert!(s.symmetry_residual() < 1e-10, "k={k}");
            assert!(s.row(0).iter().all(|&v| v > 0.0), "k={k}");
        }
    }

    #[test]
    fn psi_modes_agree() {
        for k in 1..=12 {
            for l in sp2_alcove(k) {
                let s = s_entry(k, Weight::ZERO, l);
                for mode in [PsiMode::Cosine, PsiMode::Jacobian, PsiMode::KacWeyl] {
                    assert!((psi_star(k, l, mode) - s).abs() < 1e-10, "k={k} {l} {mode:?}");
                }
            }
        }
    }

    #[test]
    fn verlinde_identity_and_graphs() {
        let n = verlinde_n(3, Weight::ZERO).unwrap();
        for (i, row) in n.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(*v, u64::from(i == j));
            }
        }
        let nx = verlinde_n(3, Weight::new(1, 0)).unwrap();
        assert_eq!(nx, a_graph(Group::Sp2, 3, Generator::X).unwrap().dense());
    }

    #[test]
    fn so5_graphs_are_even_blocks() {
        for k in 1..=6 {
            let s = smatrix(k);
            let even: Vec<usize> = (0..s.len()).filter(|&i| s.weights[i].l1 % 2 == 0).collect();
            for (u, w) in [(Generator::Y, Weight::new(0, 1)), (Generator::Z, Weight::new(2, 0))] {
                if w.level() > k {
                    continue;
                }
                let n = verlinde_n_with(&s, w).unwrap();
                let block: Vec<Vec<u64>> = even.iter().map(|&i| even.iter().map(|&j| n[i][j]).collect()).collect();
                assert_eq!(block, a_graph(Group::SO5, k, u).unwrap().dense(), "k={k} {u}");
            }
        }
    }

    #[test]
    fn fusion_associativity_k4() {
        let s = smatrix(4);
        let n: Vec<Vec<Vec<u64>>> = s.weights.iter().map(|w| verlinde_n_with(&s, *w).unwrap()).collect();
        let dim = s.len();
        for a in [1usize, 2, 5] {
            for b in [1usize, 3, 7] {
                for r in 0..dim {
                    for c in 0..dim {
                        let lhs: u64 = (0..dim).map(|t| n[a][r][t] * n[b][t][c]).sum();
                        let rhs: u64 = (0..dim).map(|v| n[a][b][v] * n[v][r][c]).sum();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn simple_current_sign() {
        for k in 1..=8 {
            let j = Weight::new(0, k);
            for l in sp2_alcove(k) {
                let sign = if l.l1 % 2 == 0 { 1.0 } else { -1.0 };
                assert!((s_entry(k, j, l) - sign * s_entry(k, Weight::ZERO, l)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn model_parsing() {
        assert_eq!("A_Sp2(3)".parse::<Model>().unwrap(), Model::ASp2(3));
        assert_eq!("a-so5:4".parse::<Model>().unwrap(), Model::ASO5(4));
        assert_eq!("D(5)".parse::<Model>().unwrap(), Model::D(5));
        assert_eq!("e3m".parse::<Model>().unwrap(), Model::E3M);
        assert_eq!("A_infty".parse::<Model>().unwrap(), Model::AInfty);
        assert!("F4".parse::<Model>().is_err());
        assert!("D1".parse::<Model>().is_err());
        for m in Model::exceptional() {
            assert_eq!(m.to_string().parse::<Model>().unwrap(), m);
        }
    }

    #[test]
    fn a_series_masses() {
        for k in 1..=10 {
            assert!(close(eigendata(Model::ASp2(k)).unwrap().mass(), 1.0, 1e-10));
            assert!(close(eigendata(Model::ASO5(k)).unwrap().mass(), 1.0, 1e-10));
        }
    }

    #[test]
    fn d_series_masses() {
        for k in 2..=8 {
            assert!(close(eigendata(Model::D(k)).unwrap().mass(), 1.0, 1e-10), "k={k}");
        }
    }

    #[test]
    fn exceptional_masses() {
        let mass = |m| eigendata(m).unwrap().mass();
        assert!(close(mass(Model::E3), 1.0, 1e-12));
        assert!(close(mass(Model::E3M), 1.5, 1e-12));
        assert!(close(mass(Model::E7), 1.0, 1e-12));
        assert!(close(mass(Model::E7M), 1.0, 1e-12));
        assert!(close(mass(Model::E8), 1.0, 1e-10));
        assert!(close(mass(Model::E12), 19.0 / 15.0, 1e-12));
        let e7m = eigendata(Model::E7M).unwrap();
        assert_eq!(e7m.find(Weight::new(3, 1)).unwrap().weight, 0.0);
        assert_eq!(e7m.find(Weight::new(3, 3)).unwrap().weight, 0.0);
    }

    #[test]
    fn exceptional_theta_table() {
        let e3 = eigendata(Model::E3).unwrap();
        assert_eq!(e3.find(Weight::new(2, 1)).unwrap().theta, TorusPoint::from_fracs(2, 12, 5, 12));
        assert_eq!(e3.find(Weight::new(1, 1)).unwrap().theta, TorusPoint::from_fracs(2, 12, 4, 12));
        let e7 = eigendata(Model::E7).unwrap();
        assert_eq!(e7.find(Weight::new(0, 7)).unwrap().theta, TorusPoint::from_fracs(8, 20, 9, 20));
        let e8 = eigendata(Model::E8).unwrap();
        assert_eq!(e8.find(Weight::new(4, 1)).unwrap().theta, TorusPoint::from_fracs(2, 22, 7, 22));
        assert_eq!(e8.find(Weight::new(0, 4)).unwrap().theta, TorusPoint::from_fracs(5, 22, 6, 22));
        let e12 = eigendata(Model::E12).unwrap();
        assert_eq!(e12.find(Weight::new(4, 4)).unwrap().theta, TorusPoint::from_fracs(5, 30, 10, 30));
    }

    #[test]
    fn exceptional_weights_follow_jacobian() {
        let e3 = eigendata(Model::E3).unwrap();
        for l in [Weight::new(0, 0), Weight::new(2, 0)] {
            let e = e3.find(l).unwrap();
            let j = jacobian_xy(&e.theta).abs() / (8.0 * PI * PI);
            let want = if l == Weight::ZERO { (3.0 - 3f64.sqrt()) / 2.0 } else { (3.0 + 3f64.sqrt()) / 2.0 };
            assert!(close(j, want, 1e-12));
        }
        let e8 = eigendata(Model::E8).unwrap();
        for e in &e8.entries[..10] {
            assert!(close(e8_a_weight_from_jacobian(&e.theta), e.weight, 1e-9), "{}", e.label);
        }
    }

    #[test]
    fn quintic_vieta() {
        let a = QuinticRoots::solve(E8_A_QUINTIC).unwrap();
        assert!(a.max_residual() < 1e-10);
        assert!(close(a.roots.iter().sum::<f64>(), 3.0 / 11.0, 1e-12));
        let b = QuinticRoots::solve(E8_B_QUINTIC).unwrap();
        assert!(b.max_residual() < 1e-10);
        assert!(close(b.roots.iter().map(|x| 1.0 / (11.0 * x)).sum::<f64>(), 5.0 / 11.0, 1e-12));
        assert!(close(e8_printed_b_weights().iter().sum::<f64>(), 121.0, 1e-10));
        let w = b.roots;
        assert!(w.windows(2).all(|p| p[0] > p[1]));
    }

    #[test]
    fn a_moments_match_graphs() {
        let k = 3;
        let data = eigendata(Model::ASp2(k)).unwrap();
        let gx = a_graph(Group::Sp2, k, Generator::X).unwrap();
        let gy = a_graph(Group::Sp2, k, Generator::Y).unwrap();
        for m in 0..=6u32 {
            for n in 0..=(6 - m) {
                let exact = crate::fusion::graph_cross_moment(&gx, &gy, m as u64, n as u64).unwrap();
                let exact: f64 = exact.to_string().parse().unwrap();
                assert!((exponent_sum_moment(&data, Pair::XY, m, n) - exact).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn d_moments_match_orbifold_walks() {
        // D_k apex walks equal A_k walks from the apex to 0 or to the simple current.
        for k in 2..=6u32 {
            let s = smatrix(k);
            let jx = s.index_of(Weight::new(0, k)).unwrap();
            let data = eigendata(Model::D(k)).unwrap();
            let gx = a_graph(Group::Sp2, k, Generator::X).unwrap();
            let gy = a_graph(Group::Sp2, k, Generator::Y).unwrap();
            for m in 0..=4u64 {
                for n in 0..=(4 - m) {
                    let v = crate::fusion::graph_word_vector(&gx, &gy, m, n).unwrap();
                    let exact: f64 = (&v[0] + &v[jx]).to_string().parse().unwrap();
                    let got = exponent_sum_moment(&data, Pair::XY, m as u32, n as u32);
                    assert!((got - exact).abs() < 1e-8, "k={k} m={m} n={n}: {got} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn json_shape() {
        let v: serde_json::Value = serde_json::from_str(&eigendata(Model::E3).unwrap().to_json().unwrap()).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 5);
        assert_eq!(v[4]["mult"], 2);
    }

    proptest! {
        #[test]
        fn beta_matches_characters(k in 1u32..12, i in 0usize..1000) {
            let data = eigendata(Model::ASp2(k)).unwrap();
            let e = &data.entries[i % data.entries.len()];
            for u in Generator::ALL {
                prop_assert!((e.eigenvalue(u) - char_fund(u, &e.theta)).abs() < 1e-10);
            }
        }

        #[test]
        fn eigenvalues_are_s_ratios(k in 1u32..10, i in 0usize..1000) {
            let s = smatrix(k);
            let l = s.weights[i % s.len()];
            let beta = char_fund(Generator::X, &theta_of(k, l));
            let ratio = s_entry(k, Weight::new(1, 0), l) / s_entry(k, Weight::ZERO, l);
            prop_assert!((beta - ratio).abs() < 1e-9);
        }
    }
}

//! Measures on 𝕋²: atomic measures with exact rational support, a density
//! measure for the A_∞ limit, and the constructors for every nimrep family.
//!
//! Sums run sequentially in a fixed order so reports are reproducible bit for bit.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modular::{e8_printed_b_weights, kappa, Model, QuinticRoots, E8_B_QUINTIC};
use crate::torus::{char_fund, char_fund_angles, Generator, TorusPoint, Q};
use crate::weyl::{d8_orbit, jacobian_xy, jacobian_xy_angles, jacobian_yz, Pair};

/// Where an atom came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Grid,
    Orbit,
    Table,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub point: TorusPoint,
    pub weight: f64,
    pub source: Source,
}

/// Finite atomic measure; atoms at equal points are merged.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AtomicMeasure2 {
    atoms: BTreeMap<TorusPoint, (f64, Source)>,
}

impl AtomicMeasure2 {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, point: TorusPoint, weight: f64, source: Source) {
        self.atoms.entry(point).and_modify(|e| e.0 += weight).or_insert((weight, source));
    }

    /// Sum of two measures, merging coincident atoms.
    pub fn plus(mut self, other: &AtomicMeasure2) -> Self {
        for a in other.atoms() {
            self.push(a.point, a.weight, a.source);
        }
        self
    }

    pub fn scaled(mut self, c: f64) -> Self {
        for e in self.atoms.values_mut() {
            e.0 *= c;
        }
        self
    }

    /// Multiply every weight by a density evaluated at the atom.
    pub fn reweighted(mut self, f: impl Fn(&TorusPoint) -> f64) -> Self {
        for (p, e) in self.atoms.iter_mut() {
            e.0 *= f(p);
        }
        self
    }

    /// Atoms ordered by point.
    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.atoms.iter().map(|(p, &(weight, source))| Atom {
            point: *p,
            weight,
            source,
        })
    }

    /// Number of stored atoms, including zero-weight ones.
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn weight_at(&self, p: &TorusPoint) -> f64 {
        self.atoms.get(p).map_or(0.0, |e| e.0)
    }

    pub fn contains(&self, p: &TorusPoint) -> bool {
        self.atoms.contains_key(p)
    }

    /// Points of strictly positive weight.
    pub fn positive_support(&self) -> Vec<TorusPoint> {
        self.atoms.iter().filter(|(_, e)| e.0 > 0.0).map(|(p, _)| *p).collect()
    }

    pub fn mass(&self) -> f64 {
        self.atoms.values().map(|e| e.0).sum()
    }

    pub fn min_weight(&self) -> f64 {
        self.atoms.values().map(|e| e.0).fold(f64::INFINITY, f64::min)
    }

    pub fn cross_moment(&self, pair: Pair, m: u32, n: u32) -> f64 {
        let (u1, u2) = pair.generators();
        self.atoms
            .iter()
            .map(|(p, e)| e.0 * char_fund(u1, p).powi(m as i32) * char_fund(u2, p).powi(n as i32))
            .sum()
    }
}

/// Uniform Dirac measure on the `m`-th roots of unity in each coordinate.
pub fn dirac_grid(m: u32) -> AtomicMeasure2 {
    assert!(m >= 1, "grid size must be positive");
    let m = m as i64;
    let w = 1.0 / (m * m) as f64;
    let mut mu = AtomicMeasure2::new();
    for p in 0..m {
        for q in 0..m {
            mu.push(TorusPoint::new(Ratio::new(p, m), Ratio::new(q, m)), w, Source::Grid);
        }
    }
    mu
}

/// Partner seed `(1/2 − θ₂, 1/2 − θ₁)` of an orbit measure.
pub fn second_seed(p: &TorusPoint) -> TorusPoint {
    let half = Ratio::new(1, 2);
    TorusPoint::new(half - p.theta2(), half - p.theta1())
}

/// Uniform probability measure on the union of the D₈-orbits of `(θ₁,θ₂)` and
/// of its partner seed.
pub fn d8_orbit_measure(theta1: Q, theta2: Q) -> AtomicMeasure2 {
    let p = TorusPoint::new(theta1, theta2);
    let mut pts = d8_orbit(&p);
    pts.extend(d8_orbit(&second_seed(&p)));
    pts.sort();
    pts.dedup();
    let w = 1.0 / pts.len() as f64;
    let mut mu = AtomicMeasure2::new();
    for q in pts {
        mu.push(q, w, Source::Orbit);
    }
    mu
}

fn orbit(p1: i64, q1: i64, p2: i64, q2: i64) -> AtomicMeasure2 {
    d8_orbit_measure(Ratio::new(p1, q1), Ratio::new(p2, q2))
}

/// Density measure `f(θ) dθ₁dθ₂`, integrated on a uniform `N×N` grid.
#[derive(Clone)]
pub struct DensityMeasure2 {
    density: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub grid: usize,
}

impl fmt::Debug for DensityMeasure2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityMeasure2").field("grid", &self.grid).finish_non_exhaustive()
    }
}

pub const DEFAULT_GRID: usize = 400;

impl DensityMeasure2 {
    pub fn new(density: impl Fn(f64, f64) -> f64 + Send + Sync + 'static, grid: usize) -> Self {
        DensityMeasure2 {
            density: Arc::new(density),
            grid,
        }
    }

    /// `J_{x,y}² / 128π⁴`, the A_∞ measure.
    pub fn a_infinity(grid: usize) -> Self {
        Self::new(|t1, t2| jacobian_xy_angles(t1, t2).powi(2) / (128.0 * PI.powi(4)), grid)
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid;
        self
    }

    pub fn density_at(&self, t1: f64, t2: f64) -> f64 {
        (self.density)(t1, t2)
    }

    fn samples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let n = self.grid;
        let h = 1.0 / n as f64;
        (0..n).flat_map(move |i| {
            (0..n).map(move |j| {
                let (t1, t2) = (i as f64 * h, j as f64 * h);
                (t1, t2, (self.density)(t1, t2) * h * h)
            })
        })
    }

    pub fn mass(&self) -> f64 {
        self.samples().map(|s| s.2).sum()
    }

    pub fn cross_moment(&self, pair: Pair, m: u32, n: u32) -> f64 {
        let (u1, u2) = pair.generators();
        self.samples()
            .map(|(t1, t2, w)| w * char_fund_angles(u1, t1, t2).powi(m as i32) * char_fund_angles(u2, t1, t2).powi(n as i32))
            .sum()
    }

    /// All moments with `m + n ≤ max_order` from one pass over the grid.
    pub fn moment_table(&self, pair: Pair, max_order: u32) -> BTreeMap<(u32, u32), f64> {
        let (u1, u2) = pair.generators();
        let mut acc: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        for (t1, t2, w) in self.samples() {
            let (a, b) = (char_fund_angles(u1, t1, t2), char_fund_angles(u2, t1, t2));
            let mut pa = w;
            for m in 0..=max_order {
                let mut v = pa;
                for n in 0..=(max_order - m) {
                    *acc.entry((m, n)).or_insert(0.0) += v;
                    v *= b;
                }
                pa *= a;
            }
        }
        acc
    }
}

#[derive(Clone, Debug)]
pub enum Measure {
    Atomic(AtomicMeasure2),
    Density(DensityMeasure2),
}

impl Measure {
    pub fn mass(&self) -> f64 {
        match self {
            Measure::Atomic(a) => a.mass(),
            Measure::Density(d) => d.mass(),
        }
    }

    pub fn as_atomic(&self) -> Option<&AtomicMeasure2> {
        match self {
            Measure::Atomic(a) => Some(a),
            Measure::Density(_) => None,
        }
    }
}

pub fn measure_cross_moment(mu: &Measure, pair: Pair, m: u32, n: u32) -> f64 {
    match mu {
        Measure::Atomic(a) => a.cross_moment(pair, m, n),
        Measure::Density(d) => d.cross_moment(pair, m, n),
    }
}

fn j2_over_128pi4(p: &TorusPoint) -> f64 {
    jacobian_xy(p).powi(2) / (128.0 * PI.powi(4))
}

fn abs_j(p: &TorusPoint) -> f64 {
    jacobian_xy(p).abs()
}

/// `J²/128π⁴ · d_{2κ} × d_{2κ}`.
fn sp2_grid_measure(k: u32) -> AtomicMeasure2 {
    dirac_grid(2 * kappa(k)).reweighted(j2_over_128pi4)
}

/// Generator pair a model's measure is valid for (`None`: any pair).
pub fn model_pairs(model: Model) -> Option<Pair> {
    match model {
        Model::ASp2(_) | Model::AInfty => None,
        Model::ASO5(_) | Model::E8 => Some(Pair::YZ),
        _ => Some(Pair::XY),
    }
}

fn check_pair(model: Model, pair: Pair) -> Result<()> {
    match model_pairs(model) {
        Some(p) if p != pair => Err(Error::InvalidParameter(format!("{model} has no {pair} measure"))),
        _ => Ok(()),
    }
}

/// Joint spectral measure of a model over 𝕋².
pub fn measure_for(model: Model, pair: Pair) -> Result<Measure> {
    check_pair(model, pair)?;
    let mu = match model {
        Model::AInfty => return Ok(Measure::Density(DensityMeasure2::a_infinity(DEFAULT_GRID))),
        // The SO(5) exponents fixed by the simple current lie on θ₁+θ₂ = 1/2 and
        // already receive S² from the plain grid; no extra line term.
        Model::ASp2(k) | Model::ASO5(k) => sp2_grid_measure(k),
        Model::D(k) => {
            let kap = kappa(k) as i64;
            let d = 2 * kap;
            let w = 1.0 / (2 * kap * kap) as f64;
            let mut mu = AtomicMeasure2::new();
            for q1 in 0..d {
                for q2 in 0..d {
                    if (q1 + q2) % 2 == 1 {
                        mu.push(TorusPoint::new(Ratio::new(q1, d), Ratio::new(q2, d)), w, Source::Grid);
                    }
                }
            }
            mu.reweighted(j2_over_128pi4)
        }
        Model::E3 | Model::E3M => {
            let c = if model == Model::E3 { 1.0 / (48.0 * PI * PI) } else { 1.0 / (24.0 * PI * PI) };
            exceptional_e3(c, 3.0 / (32.0 * PI * PI))
        }
        Model::E7 => e7_orbits(true).reweighted(abs_j).scaled(1.0 / (80.0 * PI * PI)),
        Model::E7M => e7_orbits(false).reweighted(abs_j).scaled(1.0 / (40.0 * PI * PI)),
        Model::E8 => {
            let b = QuinticRoots::solve(E8_B_QUINTIC).expect("five real roots").roots;
            exceptional_e8(1.0 / (7744.0 * PI.powi(4)), 1.0, b.map(|x| 1.0 / (11.0 * x)))
        }
        Model::E12 => {
            let line = orbit(1, 30, 2, 30)
                .plus(&orbit(1, 30, 8, 30))
                .plus(&orbit(2, 30, 11, 30))
                .plus(&orbit(4, 30, 7, 30))
                .reweighted(abs_j)
                .scaled(1.0 / (60.0 * PI * PI));
            let grid = dirac_grid(6).reweighted(abs_j).scaled(1.0 / (8.0 * PI * PI));
            line.plus(&grid)
        }
    };
    Ok(Measure::Atomic(tag_table(mu, model)))
}

/// Exceptional atoms come from the exponent tables.
fn tag_table(mu: AtomicMeasure2, model: Model) -> AtomicMeasure2 {
    match model {
        Model::E3 | Model::E3M | Model::E7 | Model::E7M | Model::E8 | Model::E12 => {
            let mut out = AtomicMeasure2::new();
            for a in mu.atoms() {
                out.push(a.point, a.weight, if a.source == Source::Grid { Source::Grid } else { Source::Table });
            }
            out
        }
        _ => mu,
    }
}

fn exceptional_e3(c_orbit: f64, c_grid: f64) -> AtomicMeasure2 {
    let orbits = orbit(1, 12, 2, 12).plus(&orbit(1, 12, 4, 12)).reweighted(abs_j).scaled(c_orbit);
    let grid = dirac_grid(6).reweighted(abs_j).scaled(c_grid);
    orbits.plus(&grid)
}

fn e7_orbits(with_middle: bool) -> AtomicMeasure2 {
    let mut mu = orbit(1, 20, 2, 20)
        .plus(&orbit(1, 20, 8, 20))
        .plus(&orbit(3, 20, 6, 20))
        .plus(&orbit(3, 20, 4, 20));
    if with_middle {
        mu = mu.plus(&orbit(2, 20, 6, 20).scaled(2.0));
    }
    mu
}

fn exceptional_e8(c_a: f64, last_a_mult: f64, b_weights: [f64; 5]) -> AtomicMeasure2 {
    let a = orbit(1, 22, 2, 22)
        .plus(&orbit(3, 22, 4, 22))
        .plus(&orbit(1, 22, 6, 22))
        .plus(&orbit(3, 22, 6, 22))
        .plus(&orbit(2, 22, 7, 22).scaled(last_a_mult))
        .reweighted(|p| jacobian_yz(p).powi(2))
        .scaled(c_a);
    // b-seeds paired with b₁..b₅ in descending order of the roots
    let seeds = [(1, 10), (3, 8), (5, 6), (4, 7), (2, 9)];
    let mut mu = a;
    for (w, (p, q)) in b_weights.iter().zip(seeds) {
        mu = mu.plus(&orbit(p, 22, q, 22).scaled(*w));
    }
    mu
}

/// The measure exactly as the printed theorem states it, for the families whose
/// printed form disagrees with the exponent data. `None` where they coincide.
pub fn measure_as_printed(model: Model) -> Option<AtomicMeasure2> {
    match model {
        Model::ASO5(k) => {
            let kap = kappa(k) as i64;
            let mut line = AtomicMeasure2::new();
            for j in 1..k as i64 {
                line = line.plus(&orbit(j, 2 * kap, kap - j, 2 * kap));
            }
            let c = 1.0 / (64.0 * (kap * kap) as f64 * PI.powi(4));
            Some(sp2_grid_measure(k).plus(&line.reweighted(|p| jacobian_xy(p).powi(2)).scaled(c)))
        }
        Model::D(k) => {
            // signed combination d_κ × (d_{2κ} − d_κ) + (d_{2κ} − d_κ) × d_κ
            let kap = kappa(k) as i64;
            let d = 2 * kap;
            let (fine, coarse) = (1.0 / d as f64, 1.0 / kap as f64);
            let w1 = |q: i64| if q % 2 == 0 { coarse } else { 0.0 };
            let w2 = |q: i64| fine - w1(q);
            let mut grid = AtomicMeasure2::new();
            for q1 in 0..d {
                for q2 in 0..d {
                    let w = w1(q1) * w2(q2) + w2(q1) * w1(q2);
                    grid.push(TorusPoint::new(Ratio::new(q1, d), Ratio::new(q2, d)), w, Source::Grid);
                }
            }
            let zeta = if k % 2 == 1 { 1.0 } else { 1.5 };
            let mut line = AtomicMeasure2::new();
            for j in 1..k as i64 {
                line = line.plus(&orbit(j, d, kap - j, d));
            }
            let c = zeta / (64.0 * (kap * kap) as f64 * PI.powi(4));
            Some(
                grid.reweighted(j2_over_128pi4)
                    .plus(&line.reweighted(|p| jacobian_xy(p).powi(2)).scaled(c)),
            )
        }
        Model::E3 => Some(exceptional_e3(1.0 / (48.0 * PI * PI), 1.0 / (384.0 * PI * PI))),
        Model::E3M => Some(exceptional_e3(1.0 / (24.0 * PI * PI), 1.0 / (384.0 * PI * PI))),
        Model::E7M => Some(e7_orbits(false).reweighted(abs_j).scaled(1.0 / (80.0 * PI * PI))),
        Model::E8 => Some(exceptional_e8(1.0 / (1936.0 * PI.powi(4)), 2.0, e8_printed_b_weights())),
        _ => None,
    }
}

#[derive(Serialize)]
struct AtomJson {
    theta: [[i64; 2]; 2],
    weight: f64,
    source: Source,
}

#[derive(Serialize)]
struct MeasureJson {
    model: String,
    pair: String,
    mass: f64,
    atoms: Vec<AtomJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    density_grid: Option<usize>,
}

/// JSON export; each angle as a `[numerator, denominator]` pair.
pub fn measure_to_json(model: Model, pair: Pair, mu: &Measure) -> Result<String> {
    let (atoms, density_grid) = match mu {
        Measure::Atomic(a) => (
            a.atoms()
                .map(|a| AtomJson {
                    theta: a.point.as_pairs(),
                    weight: a.weight,
                    source: a.source,
                })
                .collect(),
            None,
        ),
        Measure::Density(d) => (Vec::new(), Some(d.grid)),
    };
    let out = MeasureJson {
        model: model.to_string(),
        pair: pair.to_string(),
        mass: mu.mass(),
        atoms,
        density_grid,
    };
    Ok(serde_json::to_string_pretty(&out)?)
}

/// Pushforward of a measure under `χ_u`: `(value, weight)` rows sorted by value.
/// Atoms with equal values (to 1e-12) are merged; densities are binned.
pub fn pushforward(mu: &Measure, u: Generator, bins: usize) -> Vec<(f64, f64)> {
    match mu {
        Measure::Atomic(a) => {
            let mut rows: Vec<(f64, f64)> = a.atoms().map(|at| (char_fund(u, &at.point), at.weight)).collect();
            rows.sort_by(|x, y| x.0.total_cmp(&y.0));
            let mut out: Vec<(f64, f64)> = Vec::new();
            for (v, w) in rows {
                match out.last_mut() {
                    Some(last) if (last.0 - v).abs() < 1e-12 => last.1 += w,
                    _ => out.push((v, w)),
                }
            }
            out
        }
        Measure::Density(d) => {
            let (lo, hi) = u.interval();
            let bins = bins.max(1);
            let width = (hi - lo) / bins as f64;
            let mut acc = vec![0.0; bins];
            for (t1, t2, w) in d.samples() {
                let v = char_fund_angles(u, t1, t2);
                let b = (((v - lo) / width) as usize).min(bins - 1);
                acc[b] += w;
            }
            acc.into_iter()
                .enumerate()
                .map(|(i, w)| (lo + (i as f64 + 0.5) * width, w))
                .collect()
        }
    }
}

pub fn pushforward_csv(rows: &[(f64, f64)], u: Generator, out: impl std::io::Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([u.to_string().as_str(), "weight"])?;
    for (v, wt) in rows {
        w.write_record([format!("{v:.15e}"), format!("{wt:.15e}")])?;
    }
    w.flush()?;
    Ok(())
}

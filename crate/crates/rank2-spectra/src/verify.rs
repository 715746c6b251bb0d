//! Acceptance suites and the verification report.
//!
//! Every check yields one row keyed by a zero-padded id (`cNN-...`), so a sorted
//! report reads in criterion order. Checks run on the rayon pool; the sort makes
//! the output independent of scheduling.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fusion::{
    a_graph, chamber_cross_moment_walk_dp, chamber_moment_laurent, cross_moment_laurent, cross_moment_walk_dp,
    graph_cross_moment, graph_word_vector, moment_multinomial, moment_walk_dp, Group, LabeledGraph,
};
use crate::measures::{
    d8_orbit_measure, dirac_grid, measure_as_printed, measure_cross_moment, measure_for, second_seed,
    AtomicMeasure2, DensityMeasure2, Measure, DEFAULT_GRID,
};
use crate::modular::{
    e8_a_weight_from_jacobian, eigendata, exponent_sum_moment, psi_star, smatrix, verlinde_n_with, Model, PsiMode,
    QuinticRoots, E8_A_QUINTIC, E8_B_QUINTIC,
};
use crate::torus::{char_fund_angles, Generator, TorusPoint, Weight};
use crate::weights1d::{
    haar_x, haar_x_printed_unscaled, haar_z_printed, t2_x, t2_x_second_printed, t2_y, weight, Family, Weight1D,
};
use crate::weyl::{jacobian_xy_angles, jacobian_xy_sine_angles, jacobian_yz_angles, xy_factors, Pair};

/// Environment variable consulted when no tolerance flag is given.
pub const TOL_ENV: &str = "RANK2_SPECTRA_TOL";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    DiscrepancyDocumented,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::DiscrepancyDocumented => "discrepancy-documented",
        })
    }
}

/// One report row. Exact checks carry tolerance 0.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct CheckRow {
    pub check_id: String,
    pub model: String,
    pub parameters: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_error: f64,
    pub tolerance: f64,
    pub status: Status,
}

impl CheckRow {
    fn new(id: String, model: &str, parameters: String, lhs: f64, rhs: f64, tolerance: f64, status: Status) -> Self {
        CheckRow {
            check_id: id,
            model: model.to_string(),
            parameters,
            lhs,
            rhs,
            abs_error: (lhs - rhs).abs(),
            tolerance,
            status,
        }
    }

    /// Criterion number parsed from the id prefix.
    pub fn criterion(&self) -> Option<u32> {
        self.check_id.strip_prefix('c')?.get(..2)?.parse().ok()
    }
}

/// `|a − b| ≤ tol · max(1, |b|)`; false for NaN.
pub fn within(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn approx(id: String, model: &str, params: String, lhs: f64, rhs: f64, tol: f64) -> CheckRow {
    let status = if within(lhs, rhs, tol) { Status::Pass } else { Status::Fail };
    CheckRow::new(id, model, params, lhs, rhs, tol, status)
}

fn exact<T: PartialEq + ToPrimitive>(id: String, model: &str, params: String, lhs: &T, rhs: &T) -> CheckRow {
    let status = if lhs == rhs { Status::Pass } else { Status::Fail };
    CheckRow::new(id, model, params, to_f64(lhs), to_f64(rhs), 0.0, status)
}

/// A printed form expected to differ from the verified value.
/// If the two agree the documented discrepancy did not reproduce, which is a failure.
fn discrepancy(id: String, model: &str, params: String, printed: f64, verified: f64, tol: f64) -> CheckRow {
    let status = if within(printed, verified, tol) { Status::Fail } else { Status::DiscrepancyDocumented };
    CheckRow::new(id, model, params, printed, verified, tol, status)
}

/// A value that departs from the expected normalisation but matches its documented figure.
fn documented(id: String, model: &str, params: String, value: f64, documented: f64, tol: f64) -> CheckRow {
    let status = if within(value, documented, tol) { Status::DiscrepancyDocumented } else { Status::Fail };
    CheckRow::new(id, model, params, value, documented, tol, status)
}

fn failed(id: String, model: &str, err: &Error) -> CheckRow {
    CheckRow::new(id, model, format!("error: {err}"), f64::NAN, 0.0, 0.0, Status::Fail)
}

fn to_f64<T: ToPrimitive>(x: &T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Tolerance override; `None` keeps each check's stated default.
#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub tol: Option<f64>,
    /// Grid size for the A_∞ density.
    pub grid: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            tol: None,
            grid: DEFAULT_GRID,
        }
    }
}

impl VerifyConfig {
    fn tol(&self, stated: f64) -> f64 {
        self.tol.unwrap_or(stated)
    }
}

/// Flag first, then [`TOL_ENV`], then `None`.
pub fn resolve_tolerance(flag: Option<f64>) -> Result<Option<f64>> {
    let tol = match flag {
        Some(t) => Some(t),
        None => match std::env::var(TOL_ENV) {
            Ok(s) => Some(
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("{TOL_ENV}={s} is not a number")))?,
            ),
            Err(_) => None,
        },
    };
    match tol {
        Some(t) if !(t.is_finite() && t > 0.0) => Err(Error::InvalidParameter(format!("tolerance {t} must be positive"))),
        _ => Ok(tol),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    SMatrix,
    ASeries,
    DSeries,
    Exceptional,
    Weights,
}

impl Suite {
    pub fn criteria(self) -> &'static [u32] {
        match self {
            Suite::All => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11],
            Suite::SMatrix => &[2, 3, 4, 5],
            Suite::ASeries => &[1, 6, 11],
            Suite::DSeries => &[7],
            Suite::Exceptional => &[8, 9],
            Suite::Weights => &[10],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::All => "all",
            Suite::SMatrix => "smatrix",
            Suite::ASeries => "a-series",
            Suite::DSeries => "d-series",
            Suite::Exceptional => "exceptional",
            Suite::Weights => "weights",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "all" => Ok(Suite::All),
            "smatrix" | "s-matrix" => Ok(Suite::SMatrix),
            "a-series" | "a" => Ok(Suite::ASeries),
            "d-series" | "d" => Ok(Suite::DSeries),
            "exceptional" | "e" => Ok(Suite::Exceptional),
            "weights" => Ok(Suite::Weights),
            _ => Err(Error::InvalidParameter(format!("unknown suite `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub rows: Vec<CheckRow>,
}

impl VerificationReport {
    pub fn count(&self, status: Status) -> usize {
        self.rows.iter().filter(|r| r.status == status).count()
    }

    pub fn any_fail(&self) -> bool {
        self.count(Status::Fail) > 0
    }

    /// `Some(true)` if the criterion has rows and none failed.
    pub fn criterion_passed(&self, n: u32) -> Option<bool> {
        let mut rows = self.rows.iter().filter(|r| r.criterion() == Some(n)).peekable();
        rows.peek()?;
        Some(rows.all(|r| r.status != Status::Fail))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.rows)?)
    }

    pub fn write_csv(&self, out: impl std::io::Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

type Task = Box<dyn Fn() -> Vec<CheckRow> + Send + Sync>;

fn task(f: impl Fn() -> Vec<CheckRow> + Send + Sync + 'static) -> Task {
    Box::new(f)
}

pub fn verify(suite: Suite, cfg: &VerifyConfig) -> VerificationReport {
    run_criteria(suite.criteria(), cfg)
}

/// Runs the listed criteria (1 through 11) and sorts the rows by id.
pub fn run_criteria(criteria: &[u32], cfg: &VerifyConfig) -> VerificationReport {
    let tasks: Vec<Task> = criteria.iter().flat_map(|&c| tasks_for(c, cfg)).collect();
    let mut rows: Vec<CheckRow> = tasks.par_iter().flat_map_iter(|t| t()).collect();
    rows.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    VerificationReport { rows }
}

fn tasks_for(criterion: u32, cfg: &VerifyConfig) -> Vec<Task> {
    match criterion {
        1 => moment_triangle(),
        2 => smatrix_residuals(cfg),
        3 => verlinde_graphs(),
        4 => psi_modes(cfg),
        5 => jacobian_forms(cfg),
        6 => a_series(cfg),
        7 => d_series(cfg),
        8 => exceptional(cfg),
        9 => orbit_geometry(),
        10 => weights_1d(cfg),
        11 => a_infinity(cfg),
        _ => Vec::new(),
    }
}

fn big(x: &BigUint) -> f64 {
    to_f64(x)
}

fn graph(group: Group, k: u32, u: Generator) -> Result<LabeledGraph> {
    a_graph(group, k, u)
}

fn moment_triangle() -> Vec<Task> {
    let mut out = Vec::new();
    for u in Generator::ALL {
        for m in 0..=12u64 {
            out.push(task(move || {
                let model = "Z2-walks";
                let mult = BigInt::from(moment_multinomial(u, m));
                let dp = BigInt::from(moment_walk_dp(u, m));
                let ct = cross_moment_laurent(u, u, m as u32, 0);
                let p = format!("u={u} m={m}");
                vec![
                    exact(format!("c01-{u}-m{m:02}-multinomial-dp"), model, p.clone(), &mult, &dp),
                    exact(format!("c01-{u}-m{m:02}-dp-laurent"), model, p, &dp, &ct),
                ]
            }));
        }
    }
    out.push(task(|| {
        [(Generator::X, 2, 4u64), (Generator::X, 3, 0), (Generator::X, 4, 36), (Generator::Y, 2, 5)]
            .into_iter()
            .map(|(u, m, v)| {
                let got = BigUint::from(v);
                exact(
                    format!("c01-{u}-m{m:02}-value"),
                    "Z2-walks",
                    format!("u={u} m={m}"),
                    &moment_multinomial(u, m),
                    &got,
                )
            })
            .collect()
    }));
    out
}

fn smatrix_residuals(cfg: &VerifyConfig) -> Vec<Task> {
    let tol = cfg.tol(1e-10);
    (1..=20u32)
        .map(|k| {
            task(move || {
                let s = smatrix(k);
                let model = format!("A_Sp2({k})");
                vec![
                    approx(format!("c02-k{k:02}-symmetry"), &model, "max |S - S^T|".into(), s.symmetry_residual(), 0.0, tol),
                    approx(format!("c02-k{k:02}-unitarity"), &model, "max |S S* - 1|".into(), s.unitarity_residual(), 0.0, tol),
                ]
            })
        })
        .collect()
}

/// Entries where a graph adjacency differs from the Verlinde matrix on its vertices.
fn verlinde_mismatches(s: &crate::modular::SMatrix, g: &LabeledGraph, w: Weight) -> Result<u64> {
    let n = verlinde_n_with(s, w)?;
    let idx: Vec<usize> = g
        .vertices
        .iter()
        .map(|v| s.index_of(*v).ok_or(Error::OutsideAlcove(v.l1, v.l2, s.level)))
        .collect::<Result<_>>()?;
    let dense = g.dense();
    let mut bad = 0;
    for (i, &a) in idx.iter().enumerate() {
        for (j, &b) in idx.iter().enumerate() {
            if dense[i][j] != n[a][b] {
                bad += 1;
            }
        }
    }
    Ok(bad)
}

fn verlinde_graphs() -> Vec<Task> {
    (1..=8u32)
        .map(|k| {
            task(move || {
                let s = smatrix(k);
                let mut rows = Vec::new();
                let mut cases = vec![(Group::Sp2, Generator::X), (Group::Sp2, Generator::Y), (Group::SO5, Generator::Y)];
                if k >= 2 {
                    cases.push((Group::SO5, Generator::Z));
                }
                for (group, u) in cases {
                    let id = format!("c03-k{k:02}-{}-{u}", group.to_string().to_lowercase());
                    let model = format!("A_{group}({k})");
                    let w = u.weight();
                    let params = format!("N_({},{}) vs graph, guard 1e-6", w.l1, w.l2);
                    match graph(group, k, u).and_then(|g| verlinde_mismatches(&s, &g, w)) {
                        Ok(bad) => rows.push(exact(id, &model, params, &bad, &0)),
                        Err(e) => rows.push(failed(id, &model, &e)),
                    }
                }
                rows
            })
        })
        .collect()
}

fn psi_modes(cfg: &VerifyConfig) -> Vec<Task> {
    let tol = cfg.tol(1e-10);
    let mut out: Vec<Task> = (1..=12u32)
        .map(|k| {
            task(move || {
                let model = format!("A_Sp2({k})");
                let (mut cj, mut ck, mut jk) = (0.0f64, 0.0f64, 0.0f64);
                for w in crate::fusion::sp2_alcove(k) {
                    let c = psi_star(k, w, PsiMode::Cosine);
                    let j = psi_star(k, w, PsiMode::Jacobian);
                    let kw = psi_star(k, w, PsiMode::KacWeyl);
                    cj = cj.max((c - j).abs());
                    ck = ck.max((c - kw).abs());
                    jk = jk.max((j - kw).abs());
                }
                let p = "max over the alcove".to_string();
                vec![
                    approx(format!("c04-k{k:02}-cosine-jacobian"), &model, p.clone(), cj, 0.0, tol),
                    approx(format!("c04-k{k:02}-cosine-kacweyl"), &model, p.clone(), ck, 0.0, tol),
                    approx(format!("c04-k{k:02}-jacobian-kacweyl"), &model, p, jk, 0.0, tol),
                ]
            })
        })
        .collect();
    out.push(task(move || {
        let (k, w) = (3, Weight::ZERO);
        let c = psi_star(k, w, PsiMode::Cosine);
        vec![
            discrepancy(
                "c04-printed-jacobian-sign".into(),
                "A_Sp2(3)",
                "psi*_0 = -J(theta_0)/(8 kappa pi^2) as printed".into(),
                -psi_star(k, w, PsiMode::Jacobian),
                c,
                tol,
            ),
            discrepancy(
                "c04-printed-kacweyl-factor".into(),
                "A_Sp2(3)",
                "prefactor 16 in place of 8".into(),
                2.0 * psi_star(k, w, PsiMode::KacWeyl),
                c,
                tol,
            ),
        ]
    }));
    out
}

/// Worst `|a − b| / max(1, |b|)` over the samples, with the offending pair.
fn worst(samples: impl Iterator<Item = (f64, f64)>) -> (f64, f64, f64) {
    let mut best = (0.0, 0.0, 0.0);
    for (a, b) in samples {
        let r = (a - b).abs() / b.abs().max(1.0);
        if r.is_nan() || r > best.0 {
            best = (r, a, b);
        }
    }
    best
}

fn jacobian_forms(cfg: &VerifyConfig) -> Vec<Task> {
    let tol = cfg.tol(1e-8);
    vec![task(move || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_7012);
        let pts: Vec<(f64, f64)> = (0..1000).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
        let xy = |t1: f64, t2: f64| (char_fund_angles(Generator::X, t1, t2), char_fund_angles(Generator::Y, t1, t2));
        let sine = worst(pts.iter().map(|&(a, b)| (jacobian_xy_sine_angles(a, b), jacobian_xy_angles(a, b))));
        let factored = worst(pts.iter().map(|&(a, b)| {
            let (x, y) = xy(a, b);
            let (f1, f2, f3) = xy_factors(x, y);
            (16.0 * PI.powi(4) * f1 * f2 * f3, jacobian_xy_angles(a, b).powi(2))
        }));
        let yz = worst(pts.iter().map(|&(a, b)| {
            let y = char_fund_angles(Generator::Y, a, b);
            let z = char_fund_angles(Generator::Z, a, b);
            (jacobian_yz_angles(a, b).abs(), 2.0 * (z + y + 1.0).max(0.0).sqrt() * jacobian_xy_angles(a, b).abs())
        }));
        let p = "worst of 1000 seeded points, |a-b|/max(1,|b|)";
        let row = |id: &str, params: String, w: (f64, f64, f64)| {
            let status = if w.0 <= tol { Status::Pass } else { Status::Fail };
            CheckRow::new(id.into(), "torus", params, w.1, w.2, tol, status)
        };
        // a point with (x, y) = (√2, 1) and J = 16π²
        let (t1, t2) = (0.125, 0.25);
        let (x, y) = xy(t1, t2);
        let printed = 16.0 * PI.powi(4) * (y + 2.0 * x + 3.0) * (y - 2.0 * x + 3.0) * (4.0 * y - x * x - 4.0);
        vec![
            row("c05-sine-vs-theta", format!("{p}; sine product vs theta form"), sine),
            row("c05-factored-vs-theta", format!("{p}; 16pi^4 (y+2x+3)(y-2x+3)(x^2+4-4y) vs J^2"), factored),
            row("c05-jyz-relation", format!("{p}; |J_yz| vs 2 sqrt(z+y+1) |J_xy|"), yz),
            discrepancy(
                "c05-printed-factorisation".into(),
                "torus",
                "third factor (4y-x^2-4) at (x,y)=(sqrt2,1)".into(),
                printed,
                jacobian_xy_angles(t1, t2).powi(2),
                tol,
            ),
        ]
    })]
}

fn moment_rows(
    prefix: &str,
    model: &str,
    max_order: u32,
    tol: f64,
    lhs: impl Fn(u32, u32) -> f64,
    rhs: impl Fn(u32, u32) -> Result<f64>,
) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    for m in 0..=max_order {
        for n in 0..=(max_order - m) {
            let id = format!("{prefix}-m{m}-n{n}");
            match rhs(m, n) {
                Ok(b) => rows.push(approx(id, model, format!("m={m} n={n}"), lhs(m, n), b, tol)),
                Err(e) => rows.push(failed(id, model, &e)),
            }
        }
    }
    rows
}

/// The worst disagreement of a printed measure against the verified moments.
fn printed_row(id: String, model: &str, printed: &AtomicMeasure2, pair: Pair, verified: impl Fn(u32, u32) -> f64, tol: f64) -> CheckRow {
    let mut best = (0u32, 0u32, -1.0f64, 0.0, 0.0);
    for m in 0..=6 {
        for n in 0..=(6 - m) {
            let (a, b) = (printed.cross_moment(pair, m, n), verified(m, n));
            let r = (a - b).abs() / b.abs().max(1.0);
            if r > best.2 {
                best = (m, n, r, a, b);
            }
        }
    }
    let (m, n, _, a, b) = best;
    discrepancy(id, model, format!("printed measure, worst moment m={m} n={n}"), a, b, tol)
}

fn walk(g1: &LabeledGraph, g2: &LabeledGraph, m: u32, n: u32) -> Result<f64> {
    graph_cross_moment(g1, g2, m as u64, n as u64).map(|v| big(&v))
}

fn a_series(cfg: &VerifyConfig) -> Vec<Task> {
    let tol = cfg.tol(1e-6);
    let mut out = Vec::new();
    for k in 1..=8u32 {
        out.push(task(move || {
            let model = Model::ASp2(k);
            let name = model.to_string();
            let prefix = format!("c06-sp2-k{k:02}");
            match (measure_for(model, Pair::XY), graph(Group::Sp2, k, Generator::X), graph(Group::Sp2, k, Generator::Y)) {
                (Ok(mu), Ok(gx), Ok(gy)) => moment_rows(
                    &prefix,
                    &name,
                    6,
                    tol,
                    |m, n| measure_cross_moment(&mu, Pair::XY, m, n),
                    |m, n| walk(&gx, &gy, m, n),
                ),
                (a, b, c) => vec![failed(prefix, &name, &first_err(a.err(), b.err(), c.err()))],
            }
        }));
        out.push(task(move || {
            let model = Model::ASO5(k);
            let name = model.to_string();
            let prefix = format!("c06-so5-k{k:02}");
            match (measure_for(model, Pair::YZ), graph(Group::SO5, k, Generator::Y), graph(Group::SO5, k, Generator::Z)) {
                (Ok(mu), Ok(gy), Ok(gz)) => {
                    let mut rows = moment_rows(
                        &prefix,
                        &name,
                        6,
                        tol,
                        |m, n| measure_cross_moment(&mu, Pair::YZ, m, n),
                        |m, n| walk(&gy, &gz, m, n),
                    );
                    // at k = 1 the correction line is empty and the printed form coincides
                    if k >= 2 {
                        if let Some(printed) = measure_as_printed(model) {
                            rows.push(printed_row(
                                format!("{prefix}-printed-line"),
                                &name,
                                &printed,
                                Pair::YZ,
                                |m, n| walk(&gy, &gz, m, n).unwrap_or(f64::NAN),
                                tol,
                            ));
                        }
                    }
                    rows
                }
                (a, b, c) => vec![failed(prefix, &name, &first_err(a.err(), b.err(), c.err()))],
            }
        }));
    }
    out
}

fn first_err(a: Option<Error>, b: Option<Error>, c: Option<Error>) -> Error {
    a.or(b).or(c).unwrap_or_else(|| Error::InvalidParameter("unknown".into()))
}

fn d_series(cfg: &VerifyConfig) -> Vec<Task> {
    let (tol, mass_tol) = (cfg.tol(1e-8), cfg.tol(1e-10));
    (2..=8u32)
        .map(|k| {
            task(move || {
                let model = Model::D(k);
                let name = model.to_string();
                let prefix = format!("c07-k{k:02}");
                let (mu, data) = match (measure_for(model, Pair::XY), eigendata(model)) {
                    (Ok(mu), Ok(d)) => (mu, d),
                    (a, b) => return vec![failed(prefix, &name, &first_err(a.err(), b.err(), None))],
                };
                let mut rows = moment_rows(
                    &format!("{prefix}-measure"),
                    &name,
                    6,
                    tol,
                    |m, n| measure_cross_moment(&mu, Pair::XY, m, n),
                    |m, n| Ok(exponent_sum_moment(&data, Pair::XY, m, n)),
                );
                rows.push(approx(format!("{prefix}-mass"), &name, "eigendata mass".into(), data.mass(), 1.0, mass_tol));
                // orbifold walks: A_k walks ending at 0 or at the simple current (0, k)
                if let (Ok(gx), Ok(gy)) = (graph(Group::Sp2, k, Generator::X), graph(Group::Sp2, k, Generator::Y)) {
                    let j = gx.index_of(Weight::new(0, k));
                    rows.extend(moment_rows(
                        &format!("{prefix}-walks"),
                        &name,
                        6,
                        tol,
                        |m, n| exponent_sum_moment(&data, Pair::XY, m, n),
                        |m, n| {
                            let v = graph_word_vector(&gx, &gy, m as u64, n as u64)?;
                            let j = j.ok_or(Error::OutsideAlcove(0, k, k))?;
                            Ok(big(&(&v[gx.root] + &v[j])))
                        },
                    ));
                }
                if let Some(printed) = measure_as_printed(model) {
                    rows.push(printed_row(
                        format!("{prefix}-printed"),
                        &name,
                        &printed,
                        Pair::XY,
                        |m, n| exponent_sum_moment(&data, Pair::XY, m, n),
                        tol,
                    ));
                }
                rows
            })
        })
        .collect()
}

const E8_A_LABELS: [(u32, u32); 10] = [(0, 0), (0, 8), (0, 2), (0, 6), (4, 0), (4, 4), (4, 1), (4, 3), (2, 2), (2, 4)];

fn exceptional(cfg: &VerifyConfig) -> Vec<Task> {
    let (tol, mass_tol) = (cfg.tol(1e-8), cfg.tol(1e-10));
    let mut out: Vec<Task> = Model::exceptional()
        .into_iter()
        .map(|model| {
            task(move || {
                let name = model.to_string();
                let prefix = format!("c08-{}", name.to_lowercase());
                let pair = model.pair();
                let (mu, data) = match (measure_for(model, pair), eigendata(model)) {
                    (Ok(mu), Ok(d)) => (mu, d),
                    (a, b) => return vec![failed(prefix, &name, &first_err(a.err(), b.err(), None))],
                };
                let mut rows = moment_rows(
                    &format!("{prefix}-{}", pair.to_string().to_lowercase()),
                    &name,
                    6,
                    tol,
                    |m, n| measure_cross_moment(&mu, pair, m, n),
                    |m, n| Ok(exponent_sum_moment(&data, pair, m, n)),
                );
                let mass = data.mass();
                let id = format!("{prefix}-mass");
                rows.push(match model {
                    Model::E3M => documented(id, &name, "table mass 3/2, not a probability".into(), mass, 1.5, mass_tol),
                    Model::E12 => documented(id, &name, "table mass 19/15, not a probability".into(), mass, 19.0 / 15.0, mass_tol),
                    _ => approx(id, &name, "table mass".into(), mass, 1.0, mass_tol),
                });
                if let Some(printed) = measure_as_printed(model) {
                    rows.push(printed_row(
                        format!("{prefix}-printed"),
                        &name,
                        &printed,
                        pair,
                        |m, n| exponent_sum_moment(&data, pair, m, n),
                        tol,
                    ));
                }
                rows
            })
        })
        .collect();
    out.push(task(move || e8_weights(mass_tol)));
    out
}

fn e8_weights(tol: f64) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let data = match eigendata(Model::E8) {
        Ok(d) => d,
        Err(e) => return vec![failed("c08-e8-weights".into(), "E8", &e)],
    };
    let (Some(a), Some(b)) = (QuinticRoots::solve(E8_A_QUINTIC), QuinticRoots::solve(E8_B_QUINTIC)) else {
        let e = Error::InvalidParameter("quintic without five real roots".into());
        return vec![failed("c08-e8-quintics".into(), "E8", &e)];
    };
    let vieta_a = -E8_A_QUINTIC[1] / E8_A_QUINTIC[0];
    rows.push(approx("c08-e8-a-vieta".into(), "E8", "2 * (sum of a-roots by Vieta)".into(), 2.0 * vieta_a, 6.0 / 11.0, tol));
    rows.push(approx(
        "c08-e8-a-roots-sum".into(),
        "E8",
        "2 * (sum of solved a-roots)".into(),
        2.0 * a.roots.iter().sum::<f64>(),
        6.0 / 11.0,
        tol,
    ));
    let a_mass: f64 = E8_A_LABELS
        .iter()
        .filter_map(|&(l1, l2)| data.find(Weight::new(l1, l2)))
        .map(|e| e.multiplicity as f64 * e.weight)
        .sum();
    rows.push(approx("c08-e8-a-mass".into(), "E8", "a-part of the table".into(), a_mass, 6.0 / 11.0, tol));
    let b_mass: f64 = b.roots.iter().map(|x| 1.0 / (11.0 * x)).sum();
    rows.push(approx("c08-e8-b-mass".into(), "E8", "sum 1/(11 b_i)".into(), b_mass, 5.0 / 11.0, tol));
    for &(l1, l2) in &E8_A_LABELS {
        if let Some(e) = data.find(Weight::new(l1, l2)) {
            rows.push(approx(
                format!("c08-e8-a-jacobian-{l1}-{l2}"),
                "E8",
                "table weight vs J_yz^2 closed form".into(),
                e.weight,
                e8_a_weight_from_jacobian(&e.theta),
                tol,
            ));
        }
    }
    let printed_b: f64 = b.roots.iter().map(|x| 11.0 * x).sum();
    rows.push(discrepancy(
        "c08-e8-b-printed".into(),
        "E8",
        "b-part mass with weights 11 b_i".into(),
        printed_b,
        b_mass,
        tol,
    ));
    rows.push(approx("c08-e8-a-residual".into(), "E8", "a-quintic residual".into(), a.max_residual(), 0.0, tol));
    rows.push(approx("c08-e8-b-residual".into(), "E8", "b-quintic residual".into(), b.max_residual(), 0.0, tol));
    rows
}

fn orbit_geometry() -> Vec<Task> {
    vec![task(|| {
        let q = |a: i64, b: i64| Ratio::new(a, b);
        let support = |id: &str, p: (i64, i64, i64, i64), want: usize| {
            let mu = d8_orbit_measure(q(p.0, p.1), q(p.2, p.3));
            exact(
                id.into(),
                "orbit",
                format!("d^({}/{},{}/{}) support", p.0, p.1, p.2, p.3),
                &mu.len(),
                &want,
            )
        };
        let seed = second_seed(&TorusPoint::from_fracs(1, 20, 2, 20));
        let partner = TorusPoint::from_fracs(8, 20, 9, 20);
        let e7 = d8_orbit_measure(q(1, 20), q(2, 20));
        vec![
            support("c09-support-origin", (0, 1, 0, 1), 2),
            support("c09-support-line", (1, 10, 2, 5), 8),
            support("c09-support-generic", (1, 20, 2, 20), 16),
            exact(
                "c09-second-seed".into(),
                "orbit",
                "second seed of (1/20,2/20) equals (8/20,9/20)".into(),
                &u8::from(seed == partner),
                &1u8,
            ),
            exact(
                "c09-partner-in-support".into(),
                "orbit",
                "(8/20,9/20) in the support of d^(1/20,2/20)".into(),
                &u8::from(e7.contains(&partner)),
                &1u8,
            ),
            approx("c09-mass".into(), "orbit", "d^(1/20,2/20) mass".into(), e7.mass(), 1.0, 1e-12),
        ]
    })]
}

fn weights_1d(cfg: &VerifyConfig) -> Vec<Task> {
    let (mass_tol, chain_tol, id_tol) = (cfg.tol(1e-6), cfg.tol(1e-5), cfg.tol(1e-8));
    let mut out = Vec::new();
    for family in [Family::T2, Family::Haar] {
        for u in Generator::ALL {
            out.push(task(move || {
                let w = weight(family, u);
                let moments = w.moments(6);
                let name = format!("{family}-{u}");
                let prefix = format!("c10-{}-{u}", family.to_string().to_lowercase());
                let mut rows = vec![approx(format!("{prefix}-mass"), &name, "integral of the weight".into(), moments[0], 1.0, mass_tol)];
                for m in 1..=6u64 {
                    let oracle = match family {
                        Family::T2 => moment_multinomial(u, m),
                        Family::Haar => chamber_cross_moment_walk_dp(u, u, m, 0),
                    };
                    let which = match family {
                        Family::T2 => "multinomial",
                        Family::Haar => "chamber walks",
                    };
                    rows.push(approx(
                        format!("{prefix}-m{m}"),
                        &name,
                        format!("m={m} vs {which}"),
                        moments[m as usize],
                        big(&oracle),
                        chain_tol,
                    ));
                }
                rows
            }));
        }
    }
    out.push(task(move || {
        let ys = (0..50).map(|i| -3.0 + 8.0 * (i as f64 + 0.5) / 50.0);
        let w = worst(ys.map(|y| (t2_y(y), t2_x(y - 1.0))));
        let status = if w.0 <= id_tol { Status::Pass } else { Status::Fail };
        let mut rows = vec![CheckRow::new(
            "c10-t2-y-shift".into(),
            "T2-y",
            "J_y(y) vs J_x(y-1) at 50 points, worst |a-b|/max(1,|b|)".into(),
            w.1,
            w.2,
            id_tol,
            status,
        )];
        rows.push(discrepancy(
            "c10-t2-x-second-form".into(),
            "T2-x",
            "second printed form at x=-2".into(),
            t2_x_second_printed(-2.0),
            t2_x(-2.0),
            id_tol,
        ));
        rows.push(discrepancy(
            "c10-haar-x-closed-form".into(),
            "Haar-x",
            "printed closed form / 16pi^4 at x=-2".into(),
            haar_x_printed_unscaled(-2.0) / (16.0 * PI.powi(4)),
            haar_x(-2.0),
            id_tol,
        ));
        let printed = Weight1D::new(Family::Haar, Generator::Z, vec![1.0, 2.0], haar_z_printed);
        rows.push(discrepancy(
            "c10-haar-z-prefactor".into(),
            "Haar-z",
            "mass with printed prefactor 1/8pi^4".into(),
            printed.mass(),
            1.0,
            mass_tol,
        ));
        rows
    }));
    out
}

fn a_infinity(cfg: &VerifyConfig) -> Vec<Task> {
    let tol = cfg.tol(1e-6);
    let grid = cfg.grid;
    vec![task(move || {
        let table = DensityMeasure2::a_infinity(grid).moment_table(Pair::XY, 8);
        table
            .into_iter()
            .map(|((m, n), v)| {
                let exact = big(&chamber_cross_moment_walk_dp(Generator::X, Generator::Y, m as u64, n as u64));
                approx(format!("c11-m{m}-n{n}"), "A_infty", format!("m={m} n={n} grid={grid}"), v, exact, tol)
            })
            .collect()
    })]
}

/// One row of the moment oracle table.
#[derive(Clone, Debug, Serialize)]
pub struct MomentRow {
    pub m: u32,
    pub n: u32,
    /// Closed multinomial count; single-generator tables only.
    pub multinomial: Option<String>,
    pub walk_dp: String,
    pub laurent: String,
    /// Uniform torus average on an exact grid.
    pub torus: f64,
    pub chamber_dp: String,
    pub chamber_laurent: String,
    /// A_∞ density-measure moment.
    pub haar: f64,
    pub agree: bool,
}

/// Moments `⟨u₁^m u₂^n⟩` by every oracle. With `u2 = None` only powers of `u1`.
pub fn moment_table(u1: Generator, u2: Option<Generator>, max_order: u32, grid: usize) -> Result<Vec<MomentRow>> {
    let pair = match (u1, u2) {
        (Generator::Z, None) | (Generator::Y, Some(Generator::Z)) => Pair::YZ,
        (Generator::X, Some(Generator::Y)) | (_, None) => Pair::XY,
        (a, Some(b)) => return Err(Error::InvalidParameter(format!("no generator pair {a}{b}; use xy or yz"))),
    };
    // a uniform grid of N points integrates trigonometric polynomials of degree < N exactly
    let torus = Measure::Atomic(dirac_grid(4 * max_order + 8));
    let density = DensityMeasure2::a_infinity(grid);
    let mut rows = Vec::new();
    let orders: Vec<(u32, u32)> = match u2 {
        Some(_) => (0..=max_order).flat_map(|m| (0..=max_order - m).map(move |n| (m, n))).collect(),
        None => (0..=max_order).map(|m| (m, 0)).collect(),
    };
    let v = u2.unwrap_or(u1);
    for (m, n) in orders {
        // the single-generator case reads the measure moments off the pair coordinate of u1
        let (pm, pn) = match (u2, pair.generators()) {
            (None, (a, _)) if a == u1 => (m, 0),
            (None, _) => (0, m),
            _ => (m, n),
        };
        let multinomial = u2.is_none().then(|| moment_multinomial(u1, m as u64));
        let walk = cross_moment_walk_dp(u1, v, m as u64, n as u64);
        let laurent = cross_moment_laurent(u1, v, m, n);
        let chamber = chamber_cross_moment_walk_dp(u1, v, m as u64, n as u64);
        let chamber_l = chamber_moment_laurent(u1, v, m, n);
        let t = measure_cross_moment(&torus, pair, pm, pn);
        let h = density.cross_moment(pair, pm, pn);
        let w = BigInt::from(walk.clone());
        let c = BigInt::from(chamber.clone());
        let agree = multinomial.as_ref().is_none_or(|x| *x == walk)
            && w == laurent
            && c == chamber_l
            && within(t, big(&walk), 1e-9)
            && within(h, big(&chamber), 1e-6);
        rows.push(MomentRow {
            m,
            n,
            multinomial: multinomial.map(|x| x.to_string()),
            walk_dp: walk.to_string(),
            laurent: laurent.to_string(),
            torus: t,
            chamber_dp: chamber.to_string(),
            chamber_laurent: chamber_l.to_string(),
            haar: h,
            agree,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_strings() {
        assert_eq!(Status::DiscrepancyDocumented.to_string(), "discrepancy-documented");
        assert_eq!(serde_json::to_string(&Status::Fail).unwrap(), "\"fail\"");
    }

    #[test]
    fn suites_parse() {
        for s in ["all", "smatrix", "a-series", "d-series", "exceptional", "weights"] {
            assert_eq!(s.parse::<Suite>().unwrap().to_string(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn within_rule() {
        assert!(within(1.0 + 1e-9, 1.0, 1e-8));
        assert!(within(1e4 + 1e-5, 1e4, 1e-8));
        assert!(!within(f64::NAN, 0.0, 1.0));
    }

    #[test]
    fn rows_helpers() {
        let r = discrepancy("c99-x".into(), "m", String::new(), 1.0, 1.0, 1e-9);
        assert_eq!(r.status, Status::Fail);
        let r = discrepancy("c99-x".into(), "m", String::new(), 2.0, 1.0, 1e-9);
        assert_eq!(r.status, Status::DiscrepancyDocumented);
        assert_eq!(r.criterion(), Some(99));
        let r = documented("c98-x".into(), "m", String::new(), 1.5, 1.5, 1e-9);
        assert_eq!(r.status, Status::DiscrepancyDocumented);
    }

    #[test]
    fn moment_table_examples() {
        let x = moment_table(Generator::X, None, 4, 32).unwrap();
        assert_eq!(x[4].walk_dp, "36");
        assert_eq!(x[3].walk_dp, "0");
        assert!(x.iter().all(|r| r.agree));
        let y = moment_table(Generator::Y, None, 2, 32).unwrap();
        assert_eq!(y[2].multinomial.as_deref(), Some("5"));
        let z = moment_table(Generator::Z, None, 3, 32).unwrap();
        assert!(z.iter().all(|r| r.agree));
        let xy = moment_table(Generator::X, Some(Generator::Y), 3, 64).unwrap();
        assert_eq!(xy.len(), 10);
        assert!(xy.iter().all(|r| r.agree));
        assert!(moment_table(Generator::X, Some(Generator::Z), 2, 8).is_err());
    }

    #[test]
    fn small_suite_is_clean() {
        let rep = run_criteria(&[2, 9], &VerifyConfig::default());
        assert!(!rep.any_fail());
        assert_eq!(rep.criterion_passed(2), Some(true));
        assert_eq!(rep.criterion_passed(4), None);
    }
}

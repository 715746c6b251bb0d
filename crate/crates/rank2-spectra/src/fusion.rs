//! Fusion graphs and exact moment oracles.
//!
//! Three independent routes to the moments of the unfolded (ℤ²) walk:
//! the multinomial sums, a dense lattice-walk DP and the constant term of a
//! Laurent power. Walks on the Weyl chamber (the A_∞ graph) are counted with the
//! classical product rules, and the level-k graphs A_k truncate those rules by
//! folding each term back into the alcove with the affine Weyl group.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::torus::{char_fund_poly, Generator, Weight};
use crate::weyl::jacobian_xy_poly;

/// Multiset of ℤ² steps of the unfolded walk for one generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepSet {
    pub steps: BTreeMap<(i64, i64), u32>,
}

impl StepSet {
    /// Largest coordinate of any step.
    pub fn reach(&self) -> i64 {
        self.steps
            .keys()
            .map(|(a, b)| a.abs().max(b.abs()))
            .max()
            .unwrap_or(0)
    }
}

pub fn unfolded_step_set(u: Generator) -> StepSet {
    let steps = char_fund_poly(u)
        .terms()
        .map(|(e, c)| (*e, u32::try_from(c).expect("small positive coefficient")))
        .collect();
    StepSet { steps }
}

/// `(Σk)! / Π kᵢ!` built from incremental binomials.
pub fn multinomial(parts: &[u64]) -> BigUint {
    let mut acc = BigUint::one();
    let mut total: u64 = 0;
    for &k in parts {
        for i in 1..=k {
            total += 1;
            acc = acc * BigUint::from(total) / BigUint::from(i);
        }
    }
    acc
}

/// Closed-form moment `φ((v^u)^m)` of the unfolded walk.
pub fn moment_multinomial(u: Generator, m: u64) -> BigUint {
    let mut sum = BigUint::zero();
    match u {
        Generator::X => {
            if m % 2 == 1 {
                return sum;
            }
            let h = m / 2;
            for k1 in 0..=h {
                sum += multinomial(&[k1, k1, h - k1, h - k1]);
            }
        }
        Generator::Y => {
            for k1 in 0..=m / 2 {
                for k3 in 0..=(m - 2 * k1) / 2 {
                    sum += multinomial(&[k1, k1, k3, k3, m - 2 * k1 - 2 * k3]);
                }
            }
        }
        Generator::Z => {
            // k1..k4 count the (±2,0),(0,±2) steps, k5,k6 two diagonals, p1,p2 the
            // diagonals forced by returning to the origin, k9 and the remainder
            // the two unit steps.
            let m = m as i64;
            for k1 in 0..=m {
                for k2 in 0..=m - k1 {
                    for k3 in 0..=m - k1 - k2 {
                        for k4 in 0..=m - k1 - k2 - k3 {
                            for k5 in 0..=m - k1 - k2 - k3 - k4 {
                                for k6 in 0..=m - k1 - k2 - k3 - k4 - k5 {
                                    let p1 = k1 - k2 + k3 - k4 + k5;
                                    let p2 = k1 - k2 - k3 + k4 + k6;
                                    if p1 < 0 || p2 < 0 {
                                        continue;
                                    }
                                    let used = k1 + k2 + k3 + k4 + k5 + k6 + p1 + p2;
                                    for k9 in 0..=m - used.min(m) {
                                        let rest = m - used - k9;
                                        if rest < 0 {
                                            break;
                                        }
                                        let parts = [k1, k2, k3, k4, k5, k6, p1, p2, k9, rest];
                                        let parts: Vec<u64> = parts.iter().map(|&v| v as u64).collect();
                                        sum += multinomial(&parts);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    sum
}

pub fn moment_walk_dp(u: Generator, m: u64) -> BigUint {
    cross_moment_walk_dp(u, u, m, 0)
}

/// Closed walks on ℤ² from the origin: `n` steps of `u2` followed by `m` of `u1`.
pub fn cross_moment_walk_dp(u1: Generator, u2: Generator, m: u64, n: u64) -> BigUint {
    let s1 = unfolded_step_set(u1);
    let s2 = unfolded_step_set(u2);
    let r = s1.reach() * m as i64 + s2.reach() * n as i64;
    let side = (2 * r + 1) as usize;
    let idx = |a: i64, b: i64| ((a + r) as usize) * side + (b + r) as usize;
    let mut cur = vec![BigUint::zero(); side * side];
    cur[idx(0, 0)] = BigUint::one();
    let plan = std::iter::repeat_n(&s2, n as usize).chain(std::iter::repeat_n(&s1, m as usize));
    for steps in plan {
        let mut next = vec![BigUint::zero(); side * side];
        for a in -r..=r {
            for b in -r..=r {
                let v = &cur[idx(a, b)];
                if v.is_zero() {
                    continue;
                }
                for (&(da, db), &mult) in &steps.steps {
                    let (na, nb) = (a + da, b + db);
                    if na.abs() <= r && nb.abs() <= r {
                        next[idx(na, nb)] += v * BigUint::from(mult);
                    }
                }
            }
        }
        cur = next;
    }
    cur[idx(0, 0)].clone()
}

/// Constant term of `σ_{u1}^m σ_{u2}^n`.
pub fn cross_moment_laurent(u1: Generator, u2: Generator, m: u32, n: u32) -> BigInt {
    (&char_fund_poly(u1).pow(m) * &char_fund_poly(u2).pow(n)).constant_term()
}

/// Weyl-chamber moment `CT(σ_{u1}^m σ_{u2}^n Δ²)/8`, with `Δ = J_{x,y}/4π²`:
/// the integral against `J²/128π⁴`, i.e. the A_∞ moment.
pub fn chamber_moment_laurent(u1: Generator, u2: Generator, m: u32, n: u32) -> BigInt {
    let d = jacobian_xy_poly();
    let p = &(&char_fund_poly(u1).pow(m) * &char_fund_poly(u2).pow(n)) * &(&d * &d);
    let ct = p.constant_term();
    debug_assert!((&ct % BigInt::from(8)).is_zero());
    ct / BigInt::from(8)
}

/// Classical decomposition of `ρ_u ⊗ V_w` into irreducibles (Dynkin labels).
pub fn classical_fusion(u: Generator, w: Weight) -> Vec<(Weight, i64)> {
    let (a, b) = w.partition();
    let (a, b) = (a as i64, b as i64);
    let mut out: BTreeMap<Weight, i64> = BTreeMap::new();
    let mut push = |m1: i64, m2: i64, c: i64| {
        if let Some(v) = Weight::from_partition(m1, m2) {
            *out.entry(v).or_insert(0) += c;
        }
    };
    match u {
        Generator::X => {
            push(a + 1, b, 1);
            push(a - 1, b, 1);
            push(a, b + 1, 1);
            push(a, b - 1, 1);
        }
        Generator::Y => {
            push(a + 1, b + 1, 1);
            push(a - 1, b - 1, 1);
            push(a + 1, b - 1, 1);
            push(a - 1, b + 1, 1);
            if a != b {
                push(a, b, 1);
            }
        }
        Generator::Z => {
            if (a, b) == (0, 0) {
                push(2, 0, 1);
            } else if b == 0 {
                push(a, b, 1);
                push(a - 2, b, 1);
                push(a + 2, b, 1);
                push(a - 1, b + 1, 1);
                push(a + 1, b + 1, 1);
                push(a, b + 2, 1);
            } else if a == b {
                push(a, b, 1);
                push(a + 2, b, 1);
                push(a, b - 2, 1);
                push(a + 1, b - 1, 1);
            } else {
                push(a, b, 2);
                push(a - 2, b, 1);
                push(a + 2, b, 1);
                push(a, b - 2, 1);
                push(a, b + 2, 1);
                push(a - 1, b - 1, 1);
                push(a - 1, b + 1, 1);
                push(a + 1, b - 1, 1);
                push(a + 1, b + 1, 1);
            }
        }
    }
    out.into_iter().filter(|(_, c)| *c != 0).collect()
}

/// Closed walks from the apex of the A_∞ graphs: `n` steps of `u2`, then `m` of `u1`.
pub fn chamber_cross_moment_walk_dp(u1: Generator, u2: Generator, m: u64, n: u64) -> BigUint {
    let mut cur: HashMap<Weight, BigUint> = HashMap::from([(Weight::ZERO, BigUint::one())]);
    let plan = std::iter::repeat_n(u2, n as usize).chain(std::iter::repeat_n(u1, m as usize));
    for u in plan {
        let mut next: HashMap<Weight, BigUint> = HashMap::new();
        for (w, v) in &cur {
            for (nu, c) in classical_fusion(u, *w) {
                *next.entry(nu).or_insert_with(BigUint::zero) += v * BigUint::from(c as u64);
            }
        }
        cur = next;
    }
    cur.remove(&Weight::ZERO).unwrap_or_default()
}

/// Rank-two group whose fusion graphs are built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Group {
    Sp2,
    SO5,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::Sp2 => "Sp2",
            Group::SO5 => "SO5",
        })
    }
}

impl FromStr for Group {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sp2" | "sp(2)" => Ok(Group::Sp2),
            "so5" | "so(5)" => Ok(Group::SO5),
            other => Err(Error::InvalidParameter(format!("group `{other}`"))),
        }
    }
}

/// Level-k Sp(2) alcove `λ₁+λ₂ ≤ k`, ordered by level then `λ₂`.
pub fn sp2_alcove(k: u32) -> Vec<Weight> {
    let mut v = Vec::new();
    for level in 0..=k {
        for l2 in 0..=level {
            v.push(Weight::new(level - l2, l2));
        }
    }
    v
}

/// Vertex set of A_k(G). SO(5) uses the even component `λ₁ ≡ 0 mod 2`, which in
/// SO(5) labels `(λ₁/2, λ₂)` is the alcove `2λ₁+λ₂ ≤ k`.
pub fn alcove(group: Group, k: u32) -> Vec<Weight> {
    let all = sp2_alcove(k);
    match group {
        Group::Sp2 => all,
        Group::SO5 => all.into_iter().filter(|w| w.l1 % 2 == 0).collect(),
    }
}

/// Fold a Dynkin weight into the level-k alcove by the shifted affine Weyl
/// action. Returns `None` when the shifted weight lies on a wall.
pub fn kac_walton_fold(l1: i64, l2: i64, k: u32) -> Option<(Weight, i64)> {
    let kappa = k as i64 + 3;
    let (mut a, mut b) = (l1 + 1, l2 + 1);
    let mut sign = 1;
    loop {
        if a == 0 || b == 0 || a + b == kappa {
            return None;
        }
        if a < 0 {
            (a, b) = (-a, b + a);
        } else if b < 0 {
            (a, b) = (a + 2 * b, -b);
        } else if a + b > kappa {
            a -= 2 * (a + b - kappa);
        } else {
            return Some((Weight::new((a - 1) as u32, (b - 1) as u32), sign));
        }
        sign = -sign;
    }
}

/// Level-k fusion `ρ_u ⊗ λ` from the classical rules with out-of-alcove terms
/// folded back (for ρ_x, ρ_y only drops occur; ρ_z can reflect from level k+2).
pub fn level_fusion(u: Generator, w: Weight, k: u32) -> Vec<(Weight, i64)> {
    let mut out: BTreeMap<Weight, i64> = BTreeMap::new();
    for (nu, c) in classical_fusion(u, w) {
        if let Some((v, s)) = kac_walton_fold(nu.l1 as i64, nu.l2 as i64, k) {
            *out.entry(v).or_insert(0) += s * c;
        }
    }
    out.into_iter().filter(|(_, c)| *c != 0).collect()
}

/// Fusion graph: adjacency of one generator on a level-k alcove.
#[derive(Clone, Debug)]
pub struct LabeledGraph {
    pub group: Group,
    pub level: u32,
    pub generator: Generator,
    pub vertices: Vec<Weight>,
    pub adjacency: BTreeMap<(usize, usize), u64>,
    pub root: usize,
}

#[derive(Serialize)]
struct GraphJson<'a> {
    group: String,
    level: u32,
    generator: String,
    vertices: Vec<[u32; 2]>,
    edges: Vec<[u64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    so5_labels: Option<Vec<[u32; 2]>>,
    #[serde(skip)]
    _g: std::marker::PhantomData<&'a ()>,
}

impl LabeledGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.adjacency.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn index_of(&self, w: Weight) -> Option<usize> {
        self.vertices.iter().position(|v| *v == w)
    }

    pub fn is_symmetric(&self) -> bool {
        self.adjacency.iter().all(|(&(i, j), &c)| self.entry(j, i) == c)
    }

    pub fn row_sum(&self, i: usize) -> u64 {
        self.adjacency.range((i, 0)..(i + 1, 0)).map(|(_, c)| c).sum()
    }

    /// Dense copy, `[row][col]`.
    pub fn dense(&self) -> Vec<Vec<u64>> {
        let n = self.len();
        let mut a = vec![vec![0; n]; n];
        for (&(i, j), &c) in &self.adjacency {
            a[i][j] = c;
        }
        a
    }

    fn apply(&self, v: &[BigUint]) -> Vec<BigUint> {
        let mut out = vec![BigUint::zero(); v.len()];
        for (&(i, j), &c) in &self.adjacency {
            if !v[j].is_zero() {
                out[i] += &v[j] * BigUint::from(c);
            }
        }
        out
    }

    /// JSON export. Vertices are Sp(2) Dynkin labels; SO(5) graphs also list
    /// the SO(5) labels `(λ₁/2, λ₂)`. Each undirected edge appears once, `i ≤ j`.
    pub fn to_json(&self) -> Result<String> {
        let vertices = self.vertices.iter().map(|w| [w.l1, w.l2]).collect();
        let edges = self
            .adjacency
            .iter()
            .filter(|(&(i, j), _)| i <= j)
            .map(|(&(i, j), &c)| [i as u64, j as u64, c])
            .collect();
        let so5_labels = (self.group == Group::SO5)
            .then(|| self.vertices.iter().map(|w| [w.l1 / 2, w.l2]).collect());
        let g = GraphJson {
            group: self.group.to_string(),
            level: self.level,
            generator: self.generator.to_string(),
            vertices,
            edges,
            so5_labels,
            _g: std::marker::PhantomData,
        };
        Ok(serde_json::to_string_pretty(&g)?)
    }
}

/// The graph A_k^{ρ_u}(G). Sp(2) takes generators x, y; SO(5) takes y, z.
pub fn a_graph(group: Group, k: u32, u: Generator) -> Result<LabeledGraph> {
    let ok = matches!(
        (group, u),
        (Group::Sp2, Generator::X) | (Group::Sp2, Generator::Y) | (Group::SO5, Generator::Y) | (Group::SO5, Generator::Z)
    );
    if !ok {
        return Err(Error::InvalidGenerator {
            group: group.to_string(),
            generator: u.to_string(),
        });
    }
    let vertices = alcove(group, k);
    let index: HashMap<Weight, usize> = vertices.iter().enumerate().map(|(i, w)| (*w, i)).collect();
    let mut adjacency = BTreeMap::new();
    for (i, w) in vertices.iter().enumerate() {
        for (nu, c) in level_fusion(u, *w, k) {
            let j = *index
                .get(&nu)
                .expect("generators of the even component preserve λ₁ parity");
            assert!(c > 0, "negative truncated fusion coefficient at {w} -> {nu}");
            adjacency.insert((i, j), c as u64);
        }
    }
    Ok(LabeledGraph {
        group,
        level: k,
        generator: u,
        vertices,
        adjacency,
        root: 0,
    })
}

/// `⟨G₁^m G₂^n e₀, e₀⟩` by repeated sparse products over big integers.
pub fn graph_cross_moment(g1: &LabeledGraph, g2: &LabeledGraph, m: u64, n: u64) -> Result<BigUint> {
    graph_word_vector(g1, g2, m, n).map(|v| v[g1.root].clone())
}

/// `G₁^m G₂^n e₀` as a vector.
pub fn graph_word_vector(g1: &LabeledGraph, g2: &LabeledGraph, m: u64, n: u64) -> Result<Vec<BigUint>> {
    if g1.vertices != g2.vertices || g1.root != g2.root {
        return Err(Error::VertexSetMismatch);
    }
    let mut v = vec![BigUint::zero(); g1.len()];
    v[g1.root] = BigUint::one();
    for _ in 0..n {
        v = g2.apply(&v);
    }
    for _ in 0..m {
        v = g1.apply(&v);
    }
    Ok(v)
}

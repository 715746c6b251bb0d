//! Characters of Sp(2) restricted to the maximal torus.
//!
//! A torus point is `(e^{2πiθ₁}, e^{2πiθ₂})` with exact rational angles. The
//! fundamental characters are
//!
//! ```text
//! x = 2cos2πθ₁ + 2cos2πθ₂
//! y = 1 + 2cos2π(θ₁+θ₂) + 2cos2π(θ₁-θ₂)
//! z = x² - y - 1
//! ```
//!
//! and every character is kept as a Laurent polynomial in `(ω₁, ω₂)` with
//! big-integer coefficients, which doubles as an exact integration oracle:
//! the Lebesgue integral over the torus is the constant term.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational used for torus angles.
pub type Q = Ratio<i64>;

/// Highest weight in Dynkin labels `(λ₁, λ₂)`.
///
/// Partition labels are `(μ₁, μ₂) = (λ₁+λ₂, λ₂)`; `(1,0)` is the 4-dimensional
/// representation ρ_x, `(0,1)` the 5-dimensional ρ_y and `(2,0)` the adjoint ρ_z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight {
    pub l1: u32,
    pub l2: u32,
}

impl Weight {
    pub const fn new(l1: u32, l2: u32) -> Self {
        Self { l1, l2 }
    }

    pub const ZERO: Weight = Weight::new(0, 0);

    /// Partition labels `(μ₁, μ₂)`.
    pub fn partition(self) -> (u32, u32) {
        (self.l1 + self.l2, self.l2)
    }

    /// Inverse of [`Weight::partition`]; `None` unless `μ₁ ≥ μ₂ ≥ 0`.
    pub fn from_partition(mu1: i64, mu2: i64) -> Option<Weight> {
        if mu2 < 0 || mu1 < mu2 {
            return None;
        }
        Some(Weight::new((mu1 - mu2) as u32, mu2 as u32))
    }

    /// `λ₁ + λ₂`, the smallest level at which the weight is integrable.
    pub fn level(self) -> u32 {
        self.l1 + self.l2
    }

    /// Weyl dimension formula for C₂ in Dynkin labels.
    pub fn dimension(self) -> u64 {
        let (a, b) = (self.l1 as u64, self.l2 as u64);
        (a + 1) * (b + 1) * (a + b + 2) * (a + 2 * b + 3) / 6
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.l1, self.l2)
    }
}

/// Point of 𝕋² with angles reduced to `[0,1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusPoint {
    t1: Q,
    t2: Q,
}

fn reduce_mod1(q: Q) -> Q {
    let f = q - q.floor();
    if f < Q::zero() {
        f + Q::one()
    } else {
        f
    }
}

impl TorusPoint {
    pub fn new(t1: Q, t2: Q) -> Self {
        Self {
            t1: reduce_mod1(t1),
            t2: reduce_mod1(t2),
        }
    }

    /// `(p1/q1, p2/q2)`.
    pub fn from_fracs(p1: i64, q1: i64, p2: i64, q2: i64) -> Self {
        Self::new(Q::new(p1, q1), Q::new(p2, q2))
    }

    pub fn theta1(&self) -> Q {
        self.t1
    }

    pub fn theta2(&self) -> Q {
        self.t2
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (q_to_f64(self.t1), q_to_f64(self.t2))
    }

    /// `[p1, q1, p2, q2]` in lowest terms.
    pub fn as_fracs(&self) -> [i64; 4] {
        [*self.t1.numer(), *self.t1.denom(), *self.t2.numer(), *self.t2.denom()]
    }

    /// `[[p1, q1], [p2, q2]]`, the export format.
    pub fn as_pairs(&self) -> [[i64; 2]; 2] {
        [[*self.t1.numer(), *self.t1.denom()], [*self.t2.numer(), *self.t2.denom()]]
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.t1, self.t2)
    }
}

pub(crate) fn q_to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Fundamental generators. `x` and `y` generate the Sp(2) fusion graphs,
/// `y` and `z` the SO(5) ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    X,
    Y,
    Z,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::X, Generator::Y, Generator::Z];

    /// Dynkin label of the representation.
    pub fn weight(self) -> Weight {
        match self {
            Generator::X => Weight::new(1, 0),
            Generator::Y => Weight::new(0, 1),
            Generator::Z => Weight::new(2, 0),
        }
    }

    /// Range `I_u` of the character on the torus.
    pub fn interval(self) -> (f64, f64) {
        match self {
            Generator::X => (-4.0, 4.0),
            Generator::Y => (-3.0, 5.0),
            Generator::Z => (-2.0, 10.0),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::X => "x",
            Generator::Y => "y",
            Generator::Z => "z",
        })
    }
}

impl FromStr for Generator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Generator::X),
            "y" => Ok(Generator::Y),
            "z" => Ok(Generator::Z),
            other => Err(Error::InvalidParameter(format!("generator `{other}`"))),
        }
    }
}

/// Character value at float angles.
pub fn char_fund_angles(u: Generator, t1: f64, t2: f64) -> f64 {
    let c = |a: f64| (2.0 * PI * a).cos();
    let x = 2.0 * c(t1) + 2.0 * c(t2);
    let y = 1.0 + 2.0 * c(t1 + t2) + 2.0 * c(t1 - t2);
    match u {
        Generator::X => x,
        Generator::Y => y,
        Generator::Z => x * x - y - 1.0,
    }
}

/// Character value at an exact torus point.
pub fn char_fund(u: Generator, p: &TorusPoint) -> f64 {
    let (t1, t2) = p.to_f64();
    char_fund_angles(u, t1, t2)
}

/// Finitely supported map `ℤ² → ℤ`; the monomial `(a,b)` is `ω₁^a ω₂^b`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentPoly2 {
    terms: BTreeMap<(i64, i64), BigInt>,
}

impl LaurentPoly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, 1)
    }

    pub fn monomial(a: i64, b: i64, c: i64) -> Self {
        let mut p = Self::zero();
        p.add_term((a, b), BigInt::from(c));
        p
    }

    pub fn from_terms<I: IntoIterator<Item = ((i64, i64), i64)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in it {
            p.add_term(e, BigInt::from(c));
        }
        p
    }

    fn add_term(&mut self, e: (i64, i64), c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, a: i64, b: i64) -> BigInt {
        self.terms.get(&(a, b)).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeff(0, 0)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut p = Self::zero();
        for (e, v) in &self.terms {
            p.add_term(*e, v * c);
        }
        p
    }

    pub fn pow(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Complex value at angles `(θ₁, θ₂)`.
    pub fn eval(&self, t1: f64, t2: f64) -> (f64, f64) {
        let (mut re, mut im) = (0.0, 0.0);
        for ((a, b), c) in &self.terms {
            let c = c.to_f64().unwrap_or(f64::NAN);
            let ph = 2.0 * PI * (*a as f64 * t1 + *b as f64 * t2);
            re += c * ph.cos();
            im += c * ph.sin();
        }
        (re, im)
    }

    /// Value at an exact point; phases are reduced exactly before the cosine.
    pub fn eval_at(&self, p: &TorusPoint) -> (f64, f64) {
        let (mut re, mut im) = (0.0, 0.0);
        for ((a, b), c) in &self.terms {
            let c = c.to_f64().unwrap_or(f64::NAN);
            let ph = reduce_mod1(p.theta1() * *a + p.theta2() * *b);
            let ph = 2.0 * PI * q_to_f64(ph);
            re += c * ph.cos();
            im += c * ph.sin();
        }
        (re, im)
    }

    /// Pullback under `ω ↦ Tω`, i.e. the monomial `(a,b)` goes to `(a,b)·T`.
    pub fn substitute(&self, t: [[i64; 2]; 2]) -> Self {
        let mut p = Self::zero();
        for ((a, b), c) in &self.terms {
            let e = (a * t[0][0] + b * t[1][0], a * t[0][1] + b * t[1][1]);
            p.add_term(e, c.clone());
        }
        p
    }

    /// Largest `|a|` or `|b|` in the support.
    pub fn max_degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|(a, b)| a.abs().max(b.abs()))
            .max()
            .unwrap_or(0)
    }
}

impl Add for &LaurentPoly2 {
    type Output = LaurentPoly2;
    fn add(self, rhs: &LaurentPoly2) -> LaurentPoly2 {
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(*e, c.clone());
        }
        p
    }
}

impl Sub for &LaurentPoly2 {
    type Output = LaurentPoly2;
    fn sub(self, rhs: &LaurentPoly2) -> LaurentPoly2 {
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(*e, -c.clone());
        }
        p
    }
}

impl Neg for &LaurentPoly2 {
    type Output = LaurentPoly2;
    fn neg(self) -> LaurentPoly2 {
        self.scale(&BigInt::from(-1))
    }
}

impl Mul for &LaurentPoly2 {
    type Output = LaurentPoly2;
    fn mul(self, rhs: &LaurentPoly2) -> LaurentPoly2 {
        let mut acc: BTreeMap<(i64, i64), BigInt> = BTreeMap::new();
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &rhs.terms {
                *acc.entry((a1 + a2, b1 + b2)).or_insert_with(BigInt::zero) += c1 * c2;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        LaurentPoly2 { terms: acc }
    }
}

/// Restriction of ρ_u to the torus.
pub fn char_fund_poly(u: Generator) -> LaurentPoly2 {
    match u {
        Generator::X => LaurentPoly2::from_terms([((1, 0), 1), ((-1, 0), 1), ((0, 1), 1), ((0, -1), 1)]),
        Generator::Y => LaurentPoly2::from_terms([
            ((0, 0), 1),
            ((1, 1), 1),
            ((-1, -1), 1),
            ((1, -1), 1),
            ((-1, 1), 1),
        ]),
        Generator::Z => LaurentPoly2::from_terms([
            ((0, 0), 2),
            ((2, 0), 1),
            ((-2, 0), 1),
            ((0, 2), 1),
            ((0, -2), 1),
            ((1, 1), 1),
            ((-1, -1), 1),
            ((1, -1), 1),
            ((-1, 1), 1),
        ]),
    }
}

fn char_memo() -> &'static Mutex<HashMap<(i64, i64), LaurentPoly2>> {
    static MEMO: OnceLock<Mutex<HashMap<(i64, i64), LaurentPoly2>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

// Partition-label recursion. Only the ρ_x and ρ_y product rules are used:
// χ(a,b), b ≥ 1 comes from χ_y·χ(a-1,b-1), which involves strictly lower
// μ₁+μ₂; χ(a,0) then comes from χ_x·χ(a-1,0), whose remaining unknown
// χ(a-1,1) has the same total but was already solved from lower totals.
fn chi_partition(memo: &mut HashMap<(i64, i64), LaurentPoly2>, m1: i64, m2: i64) -> LaurentPoly2 {
    if m2 < 0 || m1 < m2 {
        return LaurentPoly2::zero();
    }
    if let Some(p) = memo.get(&(m1, m2)) {
        return p.clone();
    }
    let p = if (m1, m2) == (0, 0) {
        LaurentPoly2::one()
    } else if m2 >= 1 {
        let (a, b) = (m1 - 1, m2 - 1);
        let mut p = &char_fund_poly(Generator::Y) * &chi_partition(memo, a, b);
        if a != b {
            p = &p - &chi_partition(memo, a, b);
        }
        p = &p - &chi_partition(memo, a - 1, b - 1);
        p = &p - &chi_partition(memo, a + 1, b - 1);
        p = &p - &chi_partition(memo, a - 1, b + 1);
        p
    } else {
        let a = m1 - 1;
        let mut p = &char_fund_poly(Generator::X) * &chi_partition(memo, a, 0);
        p = &p - &chi_partition(memo, a - 1, 0);
        p = &p - &chi_partition(memo, a, 1);
        p
    };
    memo.insert((m1, m2), p.clone());
    p
}

/// Character of the irreducible representation with highest weight `w`.
pub fn char_general(w: Weight) -> LaurentPoly2 {
    let (m1, m2) = w.partition();
    let mut memo = char_memo().lock().unwrap_or_else(|e| e.into_inner());
    chi_partition(&mut memo, m1 as i64, m2 as i64)
}

/// Symplectic Weyl character formula as a ratio of 2×2 sine determinants.
///
/// Independent of the recursion; degenerate (denominator zero) on the walls
/// of the Weyl chambers, so callers should sample generic points.
pub fn weyl_character(w: Weight, t1: f64, t2: f64) -> f64 {
    let (m1, m2) = w.partition();
    let s = |l: f64, t: f64| (2.0 * PI * l * t).sin();
    let det = |l1: f64, l2: f64| s(l1, t1) * s(l2, t2) - s(l1, t2) * s(l2, t1);
    det(m1 as f64 + 2.0, m2 as f64 + 1.0) / det(2.0, 1.0)
}

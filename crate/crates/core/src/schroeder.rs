//! Exact magnitude of odd-dimensional Euclidean balls.
//!
//! `Mag(tB^d)` for `d = 2m + 1` is the ratio `N(t) / (d!·D(t))`, where `N`
//! sums step-weight products over disjoint `(m+1)`-collections of Schröder
//! paths and `D` does the same over `(m−1)`-collections with a shifted
//! descent weight.
//!
//! Two independent evaluators are provided. [`enumerate_collections`] lists
//! collections explicitly and is used for the structural statements
//! (classification of one-flat collections, the shift map [`mu_map`]).
//! [`ball_magnitude_function`] never materializes collections: it sweeps the
//! lattice column by column and keeps one polynomial per frontier state.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{integer, rational, ExactRational, PolynomialQ, RationalFunctionQ};
use crate::error::{Error, Result};
use crate::intrinsic::ball_v1_odd;
use crate::special::{factorial, half_binomial};

/// Largest collection index handled by default, i.e. `d ≤ 13`.
pub const DEFAULT_MAX_K: i32 = 7;
/// Largest number of collections [`enumerate_collections`] will materialize.
pub const DEFAULT_MAX_COLLECTIONS: u64 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationCap {
    pub max_k: i32,
    pub max_collections: u64,
}

impl Default for EnumerationCap {
    fn default() -> Self {
        EnumerationCap {
            max_k: DEFAULT_MAX_K,
            max_collections: DEFAULT_MAX_COLLECTIONS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Ascent,
    Descent,
    Flat,
}

pub type Node = (i32, i32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SchroederStep {
    pub kind: StepKind,
    pub start: Node,
}

impl SchroederStep {
    pub fn end(&self) -> Node {
        let (x, y) = self.start;
        match self.kind {
            StepKind::Ascent => (x + 1, y + 1),
            StepKind::Descent => (x + 1, y - 1),
            StepKind::Flat => (x + 2, y),
        }
    }

    /// `w_j`: 1 for an ascent, `t` for a flat step, `y + 1 − j` for a
    /// descent from height `y`.
    pub fn weight(&self, j: i64) -> PolynomialQ {
        match self.kind {
            StepKind::Ascent => PolynomialQ::one(),
            StepKind::Flat => PolynomialQ::monomial(integer(1), 1),
            StepKind::Descent => PolynomialQ::constant(integer(self.start.1 as i64 + 1 - j)),
        }
    }
}

/// A Schröder path from `(−i, i)` to `(i, i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SchroederPath {
    pub index: usize,
    pub steps: Vec<SchroederStep>,
}

impl SchroederPath {
    /// Builds path `index` from its step kinds, starting at `(−index, index)`.
    pub fn from_kinds(index: usize, kinds: &[StepKind]) -> Result<Self> {
        let i = index as i32;
        let mut at = (-i, i);
        let mut steps = Vec::with_capacity(kinds.len());
        for &kind in kinds {
            let step = SchroederStep { kind, start: at };
            at = step.end();
            steps.push(step);
        }
        if at != (i, i) {
            return Err(Error::invalid(format!(
                "path {index} ends at {at:?}, expected ({i}, {i})"
            )));
        }
        Ok(SchroederPath { index, steps })
    }

    /// The path `i` ascents followed by `i` descents.
    pub fn roof(index: usize) -> Self {
        let kinds: Vec<StepKind> = std::iter::repeat_n(StepKind::Ascent, index)
            .chain(std::iter::repeat_n(StepKind::Descent, index))
            .collect();
        Self::from_kinds(index, &kinds).expect("roof path is well formed")
    }

    pub fn start(&self) -> Node {
        let i = self.index as i32;
        (-i, i)
    }

    pub fn nodes(&self) -> Vec<Node> {
        std::iter::once(self.start())
            .chain(self.steps.iter().map(SchroederStep::end))
            .collect()
    }

    pub fn kinds(&self) -> Vec<StepKind> {
        self.steps.iter().map(|s| s.kind).collect()
    }

    pub fn flat_count(&self) -> usize {
        self.steps.iter().filter(|s| s.kind == StepKind::Flat).count()
    }

    fn validate(&self) -> Result<()> {
        let i = self.index as i32;
        let mut at = (-i, i);
        for (n, s) in self.steps.iter().enumerate() {
            if s.start != at {
                return Err(Error::invalid(format!(
                    "step {n} of path {} starts at {:?}, expected {at:?}",
                    self.index, s.start
                )));
            }
            at = s.end();
        }
        if at != (i, i) {
            return Err(Error::invalid(format!(
                "path {} ends at {at:?}, expected ({i}, {i})",
                self.index
            )));
        }
        Ok(())
    }
}

/// A disjoint `k`-collection: node-disjoint paths with indices `0..=k`.
/// `k = −1` is the empty collection.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DisjointCollection {
    k: i32,
    paths: Vec<SchroederPath>,
}

impl DisjointCollection {
    /// Validates endpoints, indices and node-disjointness.
    pub fn new(mut paths: Vec<SchroederPath>) -> Result<Self> {
        paths.sort_by_key(|p| p.index);
        for (expected, p) in paths.iter().enumerate() {
            if p.index != expected {
                return Err(Error::invalid(format!(
                    "collection must have indices 0..k, found {} at position {expected}",
                    p.index
                )));
            }
            p.validate()?;
        }
        let mut seen = HashSet::new();
        for p in &paths {
            for node in p.nodes() {
                if !seen.insert(node) {
                    return Err(Error::invalid(format!("node {node:?} is used twice")));
                }
            }
        }
        Ok(DisjointCollection {
            k: paths.len() as i32 - 1,
            paths,
        })
    }

    pub fn empty() -> Self {
        DisjointCollection { k: -1, paths: vec![] }
    }

    pub fn k(&self) -> i32 {
        self.k
    }

    pub fn paths(&self) -> &[SchroederPath] {
        &self.paths
    }

    pub fn steps(&self) -> impl Iterator<Item = &SchroederStep> {
        self.paths.iter().flat_map(|p| p.steps.iter())
    }

    pub fn flat_count(&self) -> usize {
        self.paths.iter().map(SchroederPath::flat_count).sum()
    }
}

impl fmt::Display for DisjointCollection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let code = |k: StepKind| match k {
            StepKind::Ascent => 'U',
            StepKind::Descent => 'D',
            StepKind::Flat => 'F',
        };
        let parts: Vec<String> = self
            .paths
            .iter()
            .map(|p| p.steps.iter().map(|s| code(s.kind)).collect())
            .collect();
        write!(f, "[{}]", parts.join("|"))
    }
}

/// Product of `w_j` over every step of every path.
pub fn weight_product(c: &DisjointCollection, j: i64) -> PolynomialQ {
    c.steps()
        .fold(PolynomialQ::one(), |acc, s| &acc * &s.weight(j))
}

/// The unique flat-free collection in `X_k`.
pub fn roof_collection(k: i32) -> Result<DisjointCollection> {
    if k < -1 {
        return Err(Error::invalid(format!("k must be at least -1, got {k}")));
    }
    DisjointCollection::new((0..=k).map(|i| SchroederPath::roof(i as usize)).collect())
}

/// `σ^k_{p,q}`: path `p` is `p−1` ascents, a flat step and `p−1` descents;
/// paths `p+1..=p+q` dip once (`i−1` ascents, descent, ascent, `i−1`
/// descents); every other path is a roof.
pub fn sigma_pq(k: i32, p: i32, q: i32) -> Result<DisjointCollection> {
    if !(1..=k).contains(&p) || !(0..=k - p).contains(&q) {
        return Err(Error::invalid(format!(
            "need 1 ≤ p ≤ k and 0 ≤ q ≤ k − p, got k={k}, p={p}, q={q}"
        )));
    }
    let paths = (0..=k)
        .map(|i| {
            let n = i as usize;
            if i == p {
                let kinds: Vec<StepKind> = std::iter::repeat_n(StepKind::Ascent, n - 1)
                    .chain([StepKind::Flat])
                    .chain(std::iter::repeat_n(StepKind::Descent, n - 1))
                    .collect();
                SchroederPath::from_kinds(n, &kinds)
            } else if i > p && i <= p + q {
                let kinds: Vec<StepKind> = std::iter::repeat_n(StepKind::Ascent, n - 1)
                    .chain([StepKind::Descent, StepKind::Ascent])
                    .chain(std::iter::repeat_n(StepKind::Descent, n - 1))
                    .collect();
                SchroederPath::from_kinds(n, &kinds)
            } else {
                Ok(SchroederPath::roof(n))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    DisjointCollection::new(paths)
}

/// The map `X_k → X_{k+2}`: shift every path up by two, extend path `i` to
/// path `i+1` by a leading ascent and a trailing descent, then add a new
/// trivial path and an outer roof of index `k+2`.
pub fn mu_map(c: &DisjointCollection) -> Result<DisjointCollection> {
    let k = c.k();
    let mut paths = vec![SchroederPath::roof(0)];
    for old in c.paths() {
        let i = old.index as i32 + 1;
        let mut steps = vec![SchroederStep {
            kind: StepKind::Ascent,
            start: (-i, i),
        }];
        steps.extend(old.steps.iter().map(|s| SchroederStep {
            kind: s.kind,
            start: (s.start.0, s.start.1 + 2),
        }));
        steps.push(SchroederStep {
            kind: StepKind::Descent,
            start: (i - 1, i + 1),
        });
        paths.push(SchroederPath {
            index: i as usize,
            steps,
        });
    }
    paths.push(SchroederPath::roof((k + 2) as usize));
    DisjointCollection::new(paths)
}

// ---------------------------------------------------------------------------
// Column sweep.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Slot {
    y: i32,
    mid_flat: bool,
}

/// Coefficients of `t^0, t^1, …`.
type Coeffs = Vec<BigInt>;

fn add_into(acc: &mut Coeffs, other: &[BigInt]) {
    if acc.len() < other.len() {
        acc.resize(other.len(), BigInt::zero());
    }
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b;
    }
}

/// `Σ_{σ ∈ X_k} Π w(τ)` where descents from height `y` weigh `descent(y)`
/// and flats weigh `t`. Terms with more than `max_flats` flat steps are
/// dropped.
fn sweep(k: i32, descent: &dyn Fn(i32) -> BigInt, max_flats: Option<usize>) -> Coeffs {
    if k <= 0 {
        return vec![BigInt::one()];
    }
    let mut states: HashMap<Vec<Slot>, Coeffs> = HashMap::new();
    states.insert(vec![Slot { y: k, mid_flat: false }], vec![BigInt::one()]);
    for x in -k..k {
        let next_x = x + 1;
        let lo_next = next_x.abs().max(1);
        // Index of the first path still moving after this column.
        let lo_now = x.abs().max(1);
        let drop = (lo_next - lo_now).max(0) as usize;
        let entering = if next_x < 0 { Some(-next_x) } else { None };
        let mut fixed = Vec::new();
        if let Some(e) = entering {
            fixed.push(e);
        }
        if next_x == 0 {
            fixed.push(0);
        }
        let mut next: HashMap<Vec<Slot>, Coeffs> = HashMap::new();
        for (state, poly) in states {
            let movers = &state[drop..];
            let first_index = lo_now + drop as i32;
            let mut chosen = Vec::with_capacity(movers.len());
            extend(
                movers,
                first_index,
                next_x,
                &fixed,
                &mut chosen,
                BigInt::one(),
                0,
                descent,
                &mut |slots, factor, flats| {
                    let mut key = Vec::with_capacity(slots.len() + 1);
                    if let Some(e) = entering {
                        key.push(Slot { y: e, mid_flat: false });
                    }
                    key.extend_from_slice(slots);
                    let mut shifted = vec![BigInt::zero(); flats];
                    shifted.extend(poly.iter().map(|c| c * factor));
                    if let Some(limit) = max_flats {
                        shifted.truncate(limit + 1);
                    }
                    if shifted.iter().all(Zero::is_zero) {
                        return;
                    }
                    add_into(next.entry(key).or_default(), &shifted);
                },
            );
        }
        states = next;
    }
    let mut total = Coeffs::new();
    for poly in states.values() {
        add_into(&mut total, poly);
    }
    total
}

/// Chooses the next slot for each moving path in turn, rejecting node
/// collisions at column `next_x` and positions from which the path can no
/// longer reach its endpoint.
#[allow(clippy::too_many_arguments)]
fn extend(
    movers: &[Slot],
    index: i32,
    next_x: i32,
    fixed: &[i32],
    chosen: &mut Vec<Slot>,
    factor: BigInt,
    flats: usize,
    descent: &dyn Fn(i32) -> BigInt,
    emit: &mut dyn FnMut(&[Slot], &BigInt, usize),
) {
    let Some((&slot, rest)) = movers.split_first() else {
        emit(chosen, &factor, flats);
        return;
    };
    let free = |y: i32, chosen: &[Slot]| {
        !fixed.contains(&y) && !chosen.iter().any(|s| !s.mid_flat && s.y == y)
    };
    let reachable = |y: i32, x: i32| (y - index).abs() <= index - x;
    let mut options: Vec<(Slot, BigInt, usize)> = Vec::with_capacity(3);
    if slot.mid_flat {
        options.push((Slot { y: slot.y, mid_flat: false }, BigInt::one(), 0));
    } else {
        options.push((Slot { y: slot.y + 1, mid_flat: false }, BigInt::one(), 0));
        options.push((Slot { y: slot.y - 1, mid_flat: false }, descent(slot.y), 0));
        options.push((Slot { y: slot.y, mid_flat: true }, BigInt::one(), 1));
    }
    for (next, w, f) in options {
        let ok = if next.mid_flat {
            reachable(next.y, next_x + 1)
        } else {
            reachable(next.y, next_x) && free(next.y, chosen)
        };
        if !ok || w.is_zero() {
            continue;
        }
        chosen.push(next);
        extend(
            rest,
            index + 1,
            next_x,
            fixed,
            chosen,
            &factor * &w,
            flats + f,
            descent,
            emit,
        );
        chosen.pop();
    }
}

/// `Σ_{σ ∈ X_k} Π w_j(τ)` as an exact polynomial in `t`.
pub fn weighted_sum(k: i32, j: i64) -> Result<PolynomialQ> {
    if k < -1 {
        return Err(Error::invalid(format!("k must be at least -1, got {k}")));
    }
    let coeffs = sweep(k, &|y| BigInt::from(y as i64 + 1 - j), None);
    Ok(PolynomialQ::from_integers(coeffs))
}

/// `|X_k|`, or the number of collections with at most `max_flats` flat
/// steps.
pub fn count_collections(k: i32, max_flats: Option<usize>) -> Result<BigInt> {
    if k < -1 {
        return Err(Error::invalid(format!("k must be at least -1, got {k}")));
    }
    Ok(sweep(k, &|_| BigInt::one(), max_flats).into_iter().sum())
}

// ---------------------------------------------------------------------------
// Explicit enumeration.

/// Every disjoint `k`-collection, in a canonical order.
pub fn enumerate_collections(k: i32) -> Result<Vec<DisjointCollection>> {
    enumerate_collections_with(k, None, EnumerationCap::default())
}

/// Collections of `X_k` with at most `max_flats` flat steps.
pub fn enumerate_collections_with(
    k: i32,
    max_flats: Option<usize>,
    cap: EnumerationCap,
) -> Result<Vec<DisjointCollection>> {
    if k < -1 {
        return Err(Error::invalid(format!("k must be at least -1, got {k}")));
    }
    if k > cap.max_k {
        return Err(Error::ResourceLimit(format!(
            "k = {k} exceeds the enumeration cap {}",
            cap.max_k
        )));
    }
    let projected = count_collections(k, max_flats)?;
    if projected > BigInt::from(cap.max_collections) {
        return Err(Error::ResourceLimit(format!(
            "X_{k} has {projected} collections, above the cap {}",
            cap.max_collections
        )));
    }
    if k == -1 {
        return Ok(vec![DisjointCollection::empty()]);
    }
    let mut occupied: HashSet<Node> = HashSet::from([(0, 0)]);
    let mut out = Vec::new();
    let mut outer: Vec<Vec<StepKind>> = Vec::new();
    collect(k, k, max_flats.unwrap_or(usize::MAX), &mut occupied, &mut outer, &mut out);
    Ok(out)
}

/// Places path `i`, then recurses into path `i − 1`. `outer` holds the
/// already placed paths `k, k−1, …, i+1`.
fn collect(
    k: i32,
    i: i32,
    flats_left: usize,
    occupied: &mut HashSet<Node>,
    outer: &mut Vec<Vec<StepKind>>,
    out: &mut Vec<DisjointCollection>,
) {
    if i == 0 {
        let mut paths = vec![SchroederPath::roof(0)];
        for (n, kinds) in outer.iter().rev().enumerate() {
            paths.push(SchroederPath::from_kinds(n + 1, kinds).expect("endpoints checked"));
        }
        out.push(DisjointCollection { k, paths });
        return;
    }
    let mut kinds = Vec::new();
    let mut placed = Vec::new();
    walk(
        i,
        (-i, i),
        flats_left,
        occupied,
        &mut kinds,
        &mut placed,
        &mut |occupied, kinds, used| {
            outer.push(kinds.to_vec());
            collect(k, i - 1, flats_left - used, occupied, outer, out);
            outer.pop();
        },
    );
}

fn walk(
    i: i32,
    at: Node,
    flats_left: usize,
    occupied: &mut HashSet<Node>,
    kinds: &mut Vec<StepKind>,
    placed: &mut Vec<Node>,
    done: &mut dyn FnMut(&mut HashSet<Node>, &[StepKind], usize),
) {
    if placed.is_empty() {
        if !occupied.insert(at) {
            return;
        }
        placed.push(at);
        walk(i, at, flats_left, occupied, kinds, placed, done);
        placed.pop();
        occupied.remove(&at);
        return;
    }
    if at == (i, i) {
        let used = kinds.iter().filter(|&&k| k == StepKind::Flat).count();
        done(occupied, kinds, used);
        return;
    }
    let used = kinds.iter().filter(|&&k| k == StepKind::Flat).count();
    for kind in [StepKind::Ascent, StepKind::Descent, StepKind::Flat] {
        if kind == StepKind::Flat && used >= flats_left {
            continue;
        }
        let end = SchroederStep { kind, start: at }.end();
        if (end.1 - i).abs() > i - end.0 || occupied.contains(&end) {
            continue;
        }
        occupied.insert(end);
        placed.push(end);
        kinds.push(kind);
        walk(i, end, flats_left, occupied, kinds, placed, done);
        kinds.pop();
        placed.pop();
        occupied.remove(&end);
    }
}

// ---------------------------------------------------------------------------
// Ball magnitude.

/// `Mag(tB^d) = N(t) / (d!·D(t))` for odd `d = 2m + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallMagnitudeResult {
    pub d: u32,
    pub m: u32,
    pub ratfun: RationalFunctionQ,
    /// `N(t) = Σ_{σ ∈ X_{m+1}} Π w_2(τ)`.
    pub numerator: PolynomialQ,
    /// `D(t) = Σ_{σ ∈ X_{m−1}} Π w_0(τ)`.
    pub denominator: PolynomialQ,
}

impl BallMagnitudeResult {
    pub fn factorial(&self) -> BigInt {
        factorial(self.d)
    }

    pub fn eval(&self, t: &ExactRational) -> Result<ExactRational> {
        self.ratfun.eval(t)
    }

    pub fn eval_f64(&self, t: f64) -> Result<f64> {
        self.ratfun.eval_f64(t)
    }

    /// Integer coefficients of `N`.
    pub fn numerator_integers(&self) -> Vec<BigInt> {
        integer_coeffs(&self.numerator)
    }

    /// Integer coefficients of `D`.
    pub fn denominator_integers(&self) -> Vec<BigInt> {
        integer_coeffs(&self.denominator)
    }

    /// Polynomial part of the expansion at `t → ∞`.
    pub fn polynomial_part(&self) -> PolynomialQ {
        self.ratfun.polynomial_part()
    }
}

fn integer_coeffs(p: &PolynomialQ) -> Vec<BigInt> {
    p.coeffs()
        .iter()
        .map(|c| {
            debug_assert!(c.is_integer());
            c.to_integer()
        })
        .collect()
}

pub fn ball_magnitude_function(d: u32) -> Result<BallMagnitudeResult> {
    ball_magnitude_function_with(d, EnumerationCap::default())
}

pub fn ball_magnitude_function_with(d: u32, cap: EnumerationCap) -> Result<BallMagnitudeResult> {
    if d.is_multiple_of(2) {
        return Err(Error::invalid(format!("d must be odd, got {d}")));
    }
    let m = (d - 1) / 2;
    let top = m as i32 + 1;
    if top > cap.max_k {
        return Err(Error::ResourceLimit(format!(
            "d = {d} needs X_{top}, above the cap {}",
            cap.max_k
        )));
    }
    let numerator = weighted_sum(top, 2)?;
    let denominator = weighted_sum(m as i32 - 1, 0)?;
    let fact = ExactRational::from_integer(factorial(d));
    if numerator.coeff(0) != &fact * denominator.coeff(0) {
        return Err(Error::InvariantViolation(format!(
            "N(0) = {} differs from d!·D(0) = {}",
            numerator.coeff(0),
            &fact * denominator.coeff(0)
        )));
    }
    let ratfun = RationalFunctionQ::new(numerator.clone(), denominator.scale(&fact))?;
    Ok(BallMagnitudeResult {
        d,
        m,
        ratfun,
        numerator,
        denominator,
    })
}

/// `(N'(0) − d!·D'(0)) / N(0)`.
pub fn derivative_at_zero(r: &BallMagnitudeResult) -> ExactRational {
    let fact = ExactRational::from_integer(r.factorial());
    (r.numerator.coeff(1) - fact * r.denominator.coeff(1)) / r.numerator.coeff(0)
}

// ---------------------------------------------------------------------------
// Derivative at zero, term by term.

/// `t^{-1}·Π w_2(σ^k_{p,q}) / Π w_2(roof_k)`, computed from the collections.
pub fn sigma_ratio(k: i32, p: i32, q: i32) -> Result<ExactRational> {
    let sigma = weight_product(&sigma_pq(k, p, q)?, 2);
    let roof = weight_product(&roof_collection(k)?, 2);
    if sigma.degree() != Some(1) || !sigma.coeff(0).is_zero() {
        return Err(Error::InvariantViolation(format!(
            "σ^{k}_{{{p},{q}}} weight {sigma} is not a multiple of t"
        )));
    }
    Ok(sigma.coeff(1) / roof.coeff(0))
}

/// `Π_{j=1}^q [2(p+j) − 2] / Π_{j=0}^q [2(p+j) − 1]`.
pub fn ratio_formula(p: i32, q: i32) -> ExactRational {
    let num = (1..=q).fold(ExactRational::one(), |acc, j| acc * integer(2 * (p + j) as i64 - 2));
    let den = (0..=q).fold(ExactRational::one(), |acc, j| acc * integer(2 * (p + j) as i64 - 1));
    num / den
}

/// The one-flat collections of `X_{m+1}` outside the image of `μ`, as
/// `(p, q)` pairs: `σ_{1,q}` for `q < m`, then `σ_{p, m+1−p}`.
pub fn derivative_support(m: u32) -> Vec<(i32, i32)> {
    let m = m as i32;
    (0..m)
        .map(|q| (1, q))
        .chain((1..=m + 1).map(|p| (p, m + 1 - p)))
        .collect()
}

/// Sum of [`sigma_ratio`] over [`derivative_support`]; equals the
/// derivative of `Mag(tB^{2m+1})` at zero.
pub fn derivative_by_decomposition(m: u32) -> Result<Vec<((i32, i32), ExactRational)>> {
    derivative_support(m)
        .into_iter()
        .map(|(p, q)| Ok(((p, q), sigma_ratio(m as i32 + 1, p, q)?)))
        .collect()
}

// ---------------------------------------------------------------------------
// Identities.

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityRow {
    pub m: u32,
    /// `Σ_{q<m} binom(q+1/2, q)^{-1}` against `binom(m−1/2, m)^{-1} − 1`.
    pub one_sum: (String, String),
    /// `Σ_{k≤m} binom(k−1/2, k)` against `binom(m+1/2, m)`.
    pub binomial_sum: (String, String),
    /// `binom(m+1/2, m+1)^{-1} − binom(m−1/2, m)^{-1}` against
    /// `binom(m+1/2, m)^{-1}`.
    pub telescoping: (String, String),
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub rows: Vec<IdentityRow>,
}

impl IdentityReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

fn half(n: i64) -> ExactRational {
    rational(n, 2)
}

pub fn verify_combinatorial_identities(m_max: u32) -> IdentityReport {
    let rows = (0..=m_max)
        .map(|m| {
            let mi = m as i64;
            let inv = |x: ExactRational| ExactRational::one() / x;
            let one_lhs = (0..m).fold(ExactRational::zero(), |acc, q| {
                acc + inv(half_binomial(&half(2 * q as i64 + 1), q))
            });
            let one_rhs = inv(half_binomial(&half(2 * mi - 1), m)) - ExactRational::one();
            let sum_lhs = (0..=m).fold(ExactRational::zero(), |acc, k| {
                acc + half_binomial(&half(2 * k as i64 - 1), k)
            });
            let sum_rhs = half_binomial(&half(2 * mi + 1), m);
            let tel_lhs = inv(half_binomial(&half(2 * mi + 1), m + 1))
                - inv(half_binomial(&half(2 * mi - 1), m));
            let tel_rhs = inv(half_binomial(&half(2 * mi + 1), m));
            let holds = one_lhs == one_rhs && sum_lhs == sum_rhs && tel_lhs == tel_rhs;
            IdentityRow {
                m,
                one_sum: (one_lhs.to_string(), one_rhs.to_string()),
                binomial_sum: (sum_lhs.to_string(), sum_rhs.to_string()),
                telescoping: (tel_lhs.to_string(), tel_rhs.to_string()),
                holds,
            }
        })
        .collect();
    IdentityReport { rows }
}

/// Structural checks behind the derivative formula for one `m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeProofReport {
    pub m: u32,
    /// `μ` is injective on `X_{m−1}` and preserves flat counts.
    pub mu_injective: bool,
    pub mu_preserves_flats: bool,
    /// `Π w_2(μσ) = d!·Π w_0(σ)` for every `σ ∈ X_{m−1}`.
    pub mu_weight_identity: bool,
    /// The one-flat part of `X_{m+1}` is exactly `{σ_{p,q}}`.
    pub one_flat_classification: bool,
    /// `X^1_{m+1} \ μ(X^1_{m−1})` matches [`derivative_support`].
    pub set_difference: bool,
    /// [`sigma_ratio`] equals [`ratio_formula`] for all `(p, q)`.
    pub ratio_formula: bool,
    /// Sum of the support ratios equals `V_1(B^d)/2`.
    pub decomposition_matches: bool,
}

impl DerivativeProofReport {
    pub fn all_hold(&self) -> bool {
        self.mu_injective
            && self.mu_preserves_flats
            && self.mu_weight_identity
            && self.one_flat_classification
            && self.set_difference
            && self.ratio_formula
            && self.decomposition_matches
    }
}

pub fn verify_derivative_proof(m: u32, cap: EnumerationCap) -> Result<DerivativeProofReport> {
    let d = 2 * m + 1;
    let k = m as i32 + 1;
    let fact = ExactRational::from_integer(factorial(d));

    let lower = enumerate_collections_with(m as i32 - 1, None, cap)?;
    let images = lower.iter().map(mu_map).collect::<Result<Vec<_>>>()?;
    let distinct: HashSet<&DisjointCollection> = images.iter().collect();
    let mu_injective = distinct.len() == images.len();
    let mu_preserves_flats = lower
        .iter()
        .zip(&images)
        .all(|(s, i)| s.flat_count() == i.flat_count() && i.k() == k);
    let mu_weight_identity = lower
        .iter()
        .zip(&images)
        .all(|(s, i)| weight_product(i, 2) == weight_product(s, 0).scale(&fact));

    let one_flat: HashSet<DisjointCollection> = enumerate_collections_with(k, Some(1), cap)?
        .into_iter()
        .filter(|c| c.flat_count() == 1)
        .collect();
    let sigmas: HashSet<DisjointCollection> = (1..=k)
        .flat_map(|p| (0..=k - p).map(move |q| (p, q)))
        .map(|(p, q)| sigma_pq(k, p, q))
        .collect::<Result<_>>()?;
    let one_flat_classification = one_flat == sigmas;

    let image_set: HashSet<&DisjointCollection> = images.iter().filter(|c| c.flat_count() == 1).collect();
    let difference: HashSet<&DisjointCollection> =
        one_flat.iter().filter(|c| !image_set.contains(c)).collect();
    let support: Vec<DisjointCollection> = derivative_support(m)
        .into_iter()
        .map(|(p, q)| sigma_pq(k, p, q))
        .collect::<Result<_>>()?;
    let support_set: HashSet<&DisjointCollection> = support.iter().collect();
    let set_difference = support_set.len() == support.len() && difference == support_set;

    let mut ratio_ok = true;
    for p in 1..=k {
        for q in 0..=k - p {
            ratio_ok &= sigma_ratio(k, p, q)? == ratio_formula(p, q);
        }
    }

    let total = derivative_by_decomposition(m)?
        .into_iter()
        .fold(ExactRational::zero(), |acc, (_, r)| acc + r);
    let decomposition_matches = total == ball_v1_odd(m) / integer(2);

    Ok(DerivativeProofReport {
        m,
        mu_injective,
        mu_preserves_flats,
        mu_weight_identity,
        one_flat_classification,
        set_difference,
        ratio_formula: ratio_ok,
        decomposition_matches,
    })
}

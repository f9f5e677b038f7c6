//! Exact local bounds by enumeration of deterministic strategies.
//!
//! For a fixed sign vector `A` on one side the best response of the other
//! side is the sign of each inner sum, so
//!
//! ```text
//! C = max_A Σ_y | Σ_x c[x][y] A_x |
//! ```
//!
//! and only `2^(n−1)` assignments of the smaller side need to be visited
//! (`A` and `−A` give the same value). [`local_bound`] evaluates every
//! assignment from scratch; [`local_bound_graycode`] walks them in Gray-code
//! order and updates the inner sums with one row per step.
//!
//! Both split the walk into `2^k` independent partitions by fixing the top
//! `k` free signs, evaluate them on a rayon pool and merge by value. Among
//! assignments whose values agree to within `1e-9` (relative) the reported
//! witness is the lexicographically smallest `A` with `A₁ = +1`, ordering
//! `−1 < +1`, and the reported value is recomputed from that witness, so the
//! result does not depend on the thread count or the partitioning.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::BellFunctional;
use crate::matrix::Matrix;

pub const DEFAULT_MAX_EXPONENT: usize = 34;
pub const DEFAULT_PARTITION_BITS: usize = 6;

const TIE_REL: f64 = 1e-9;
const RESYNC_INTERVAL: u64 = 1 << 20;
const LANES: usize = 4;

/// Deterministic local strategy: `A_x, B_y ∈ {±1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyAssignment {
    pub a_signs: Vec<i8>,
    pub b_signs: Vec<i8>,
}

impl StrategyAssignment {
    pub fn new(a_signs: Vec<i8>, b_signs: Vec<i8>) -> Result<Self> {
        if a_signs.iter().chain(&b_signs).any(|&s| s != 1 && s != -1) {
            return Err(Error::invalid("strategy signs must be ±1"));
        }
        Ok(StrategyAssignment { a_signs, b_signs })
    }

    pub fn negated(&self) -> StrategyAssignment {
        StrategyAssignment {
            a_signs: self.a_signs.iter().map(|s| -s).collect(),
            b_signs: self.b_signs.iter().map(|s| -s).collect(),
        }
    }

    /// Correlation matrix `E[x][y] = A_x B_y` of this strategy.
    pub fn correlations(&self) -> Matrix {
        let a: Vec<f64> = self.a_signs.iter().map(|&s| f64::from(s)).collect();
        let b: Vec<f64> = self.b_signs.iter().map(|&s| f64::from(s)).collect();
        Matrix::outer(&a, &b)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalBoundResult {
    pub value: f64,
    pub witness: StrategyAssignment,
    /// Assignments of the enumerated side that were evaluated.
    pub enumerated_count: u64,
}

#[derive(Clone, Debug)]
pub struct LocalBoundOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Largest setting count (on the smaller side) that will be enumerated.
    pub max_exponent: usize,
    /// The walk is split into `2^partition_bits` sub-walks.
    pub partition_bits: usize,
}

impl Default for LocalBoundOptions {
    fn default() -> Self {
        LocalBoundOptions {
            threads: None,
            max_exponent: DEFAULT_MAX_EXPONENT,
            partition_bits: DEFAULT_PARTITION_BITS,
        }
    }
}

impl LocalBoundOptions {
    pub fn serial() -> Self {
        LocalBoundOptions {
            threads: Some(1),
            partition_bits: 0,
            ..Self::default()
        }
    }
}

/// `Σ c[x][y] a_x b_y`.
pub fn evaluate(f: &BellFunctional, s: &StrategyAssignment) -> Result<f64> {
    if s.a_signs.len() != f.n_a() || s.b_signs.len() != f.n_b() {
        return Err(Error::invalid(format!(
            "strategy is {}×{}, functional is {}×{}",
            s.a_signs.len(),
            s.b_signs.len(),
            f.n_a(),
            f.n_b()
        )));
    }
    let mut total = 0.0;
    for (x, &a) in s.a_signs.iter().enumerate() {
        let row = f.coeffs().row(x);
        let inner: f64 = row.iter().zip(&s.b_signs).map(|(c, &b)| c * f64::from(b)).sum();
        total += f64::from(a) * inner;
    }
    Ok(total)
}

/// Exhaustive maximization, every assignment evaluated from scratch.
pub fn local_bound(f: &BellFunctional) -> Result<LocalBoundResult> {
    local_bound_with(f, &LocalBoundOptions::default())
}

pub fn local_bound_with(f: &BellFunctional, opts: &LocalBoundOptions) -> Result<LocalBoundResult> {
    let problem = Oriented::new(f.coeffs(), opts.max_exponent)?;
    run(&problem, opts, Walk::Direct)
}

/// Gray-code maximization with incremental inner sums.
pub fn local_bound_graycode(f: &BellFunctional) -> Result<LocalBoundResult> {
    local_bound_graycode_with(f, &LocalBoundOptions::default())
}

pub fn local_bound_graycode_with(
    f: &BellFunctional,
    opts: &LocalBoundOptions,
) -> Result<LocalBoundResult> {
    let problem = Oriented::new(f.coeffs(), opts.max_exponent)?;
    run(&problem, opts, Walk::Gray)
}

/// Maximizes `Σ d[x][y] a_x b_y` over deterministic strategies.
pub fn linear_oracle(direction: &Matrix) -> Result<(StrategyAssignment, f64)> {
    linear_oracle_with(direction, &LocalBoundOptions::default())
}

pub fn linear_oracle_with(
    direction: &Matrix,
    opts: &LocalBoundOptions,
) -> Result<(StrategyAssignment, f64)> {
    if direction.rows() == 0 || direction.cols() == 0 {
        return Err(Error::invalid("direction must be non-empty"));
    }
    let problem = Oriented::new(direction, opts.max_exponent)?;
    let r = run(&problem, opts, Walk::Gray)?;
    Ok((r.witness, r.value))
}

#[derive(Clone, Copy)]
enum Walk {
    Direct,
    Gray,
}

/// Coefficients arranged with the enumerated (smaller) side as rows, each
/// row zero-padded to a multiple of [`LANES`].
struct Oriented {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<f64>,
    transposed: bool,
}

impl Oriented {
    fn new(c: &Matrix, max_exponent: usize) -> Result<Self> {
        let transposed = c.cols() < c.rows();
        let (rows, cols) = if transposed {
            (c.cols(), c.rows())
        } else {
            (c.rows(), c.cols())
        };
        if rows > max_exponent {
            return Err(Error::Capacity {
                exponent: rows,
                limit: max_exponent,
            });
        }
        if rows > 63 {
            return Err(Error::Capacity {
                exponent: rows,
                limit: 63,
            });
        }
        let stride = cols.div_ceil(LANES) * LANES;
        let mut data = vec![0.0; rows * stride];
        for r in 0..rows {
            for k in 0..cols {
                data[r * stride + k] = if transposed { c.get(k, r) } else { c.get(r, k) };
            }
        }
        Ok(Oriented {
            rows,
            cols,
            stride,
            data,
            transposed,
        })
    }

    fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    /// Inner sums for the assignment `mask` (bit `r−1` set ⇔ `A_r = −1`).
    fn inner_sums(&self, mask: u64, out: &mut [f64]) {
        out.fill(0.0);
        for r in 0..self.rows {
            let s = if sign_bit(mask, r) { -1.0 } else { 1.0 };
            for (o, c) in out.iter_mut().zip(self.row(r)) {
                *o += s * c;
            }
        }
    }

    fn value_of(&self, mask: u64) -> f64 {
        let mut t = vec![0.0; self.stride];
        self.inner_sums(mask, &mut t);
        t.iter().map(|v| v.abs()).sum()
    }

    fn free_bits(&self) -> usize {
        self.rows - 1
    }
}

fn sign_bit(mask: u64, row: usize) -> bool {
    row > 0 && (mask >> (row - 1)) & 1 == 1
}

/// Lexicographic comparison of the sign vectors encoded by two masks with
/// `−1 < +1`: the first differing row decides, and a set bit means `−1`.
fn lex_less(u: u64, w: u64) -> bool {
    let d = u ^ w;
    d != 0 && (u >> d.trailing_zeros()) & 1 == 1
}

#[derive(Clone, Copy)]
struct Best {
    value: f64,
    mask: u64,
}

impl Best {
    const NONE: Best = Best {
        value: f64::NEG_INFINITY,
        mask: u64::MAX,
    };

    #[inline]
    fn offer(&mut self, value: f64, mask: u64) {
        if self.value == f64::NEG_INFINITY {
            self.value = value;
            self.mask = mask;
            return;
        }
        let tol = TIE_REL * self.value.abs().max(1.0);
        if value > self.value + tol {
            self.value = value;
            self.mask = mask;
        } else if value >= self.value - tol && lex_less(mask, self.mask) {
            self.value = self.value.max(value);
            self.mask = mask;
        }
    }

    fn merge(mut self, other: Best) -> Best {
        self.offer(other.value, other.mask);
        self
    }
}

fn run(problem: &Oriented, opts: &LocalBoundOptions, walk: Walk) -> Result<LocalBoundResult> {
    let free = problem.free_bits();
    let k = opts.partition_bits.min(free);
    let low = free - k;
    let parts = 1u64 << k;
    let work = || {
        (0..parts)
            .into_par_iter()
            .map(|p| {
                let base = p << low;
                match walk {
                    Walk::Direct => direct_walk(problem, base, low),
                    Walk::Gray => gray_walk(problem, base, low),
                }
            })
            .collect::<Vec<_>>()
    };
    let partials = match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::invalid(format!("cannot build thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    let best = partials.into_iter().fold(Best::NONE, Best::merge);
    Ok(finish(problem, best.mask, 1u64 << free))
}

fn direct_walk(problem: &Oriented, base: u64, low: usize) -> Best {
    let mut best = Best::NONE;
    let mut t = vec![0.0; problem.stride];
    for i in 0..(1u64 << low) {
        let mask = base | i;
        problem.inner_sums(mask, &mut t);
        let v: f64 = t.iter().map(|v| v.abs()).sum();
        best.offer(v, mask);
    }
    best
}

fn gray_walk(problem: &Oriented, base: u64, low: usize) -> Best {
    let stride = problem.stride;
    let mut t = vec![0.0; stride];
    let mut mask = base;
    problem.inner_sums(mask, &mut t);
    let mut best = Best::NONE;
    best.offer(abs_sum(&t), mask);
    for i in 1..(1u64 << low) {
        let bit = i.trailing_zeros() as usize;
        mask ^= 1 << bit;
        if i % RESYNC_INTERVAL == 0 {
            // bound the rounding drift of the running sums
            problem.inner_sums(mask, &mut t);
            best.offer(abs_sum(&t), mask);
            continue;
        }
        let s = if (mask >> bit) & 1 == 1 { -2.0 } else { 2.0 };
        let v = flip_and_sum(&mut t, problem.row(bit + 1), s);
        best.offer(v, mask);
    }
    best
}

#[inline]
fn abs_sum(t: &[f64]) -> f64 {
    let mut acc = [0.0; LANES];
    for chunk in t.chunks_exact(LANES) {
        for l in 0..LANES {
            acc[l] += chunk[l].abs();
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3])
}

/// `t += s·row`, returning `Σ|t|`.
#[inline]
fn flip_and_sum(t: &mut [f64], row: &[f64], s: f64) -> f64 {
    let mut acc = [0.0; LANES];
    for (tc, rc) in t.chunks_exact_mut(LANES).zip(row.chunks_exact(LANES)) {
        for l in 0..LANES {
            tc[l] += s * rc[l];
            acc[l] += tc[l].abs();
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3])
}

fn finish(problem: &Oriented, mask: u64, enumerated: u64) -> LocalBoundResult {
    let mut t = vec![0.0; problem.stride];
    problem.inner_sums(mask, &mut t);
    let value = problem.value_of(mask);
    let enumerated_side: Vec<i8> = (0..problem.rows)
        .map(|r| if sign_bit(mask, r) { -1 } else { 1 })
        .collect();
    let response: Vec<i8> = t[..problem.cols]
        .iter()
        .map(|&v| if v < 0.0 { -1 } else { 1 })
        .collect();
    let witness = if problem.transposed {
        let w = StrategyAssignment {
            a_signs: response,
            b_signs: enumerated_side,
        };
        // Keep Alice's first sign at +1 whichever side was enumerated.
        if w.a_signs[0] < 0 {
            w.negated()
        } else {
            w
        }
    } else {
        StrategyAssignment {
            a_signs: enumerated_side,
            b_signs: response,
        }
    };
    LocalBoundResult {
        value,
        witness,
        enumerated_count: enumerated,
    }
}

/// Alternating best-response search over deterministic strategies. Each
/// start fixes Alice's signs, answers with Bob's best response, answers that
/// with Alice's, and so on until neither side changes. Not guaranteed to
/// find the global maximum.
pub fn best_response_search(
    direction: &Matrix,
    starts: &[Vec<i8>],
) -> (StrategyAssignment, f64) {
    let (n_a, n_b) = direction.shape();
    let mut best: Option<(StrategyAssignment, f64)> = None;
    let mut b_acc = vec![0.0; n_b];
    for start in starts {
        debug_assert_eq!(start.len(), n_a);
        let mut a = start.clone();
        let mut b = vec![1i8; n_b];
        let mut value = f64::NEG_INFINITY;
        loop {
            b_acc.fill(0.0);
            for (x, &ax) in a.iter().enumerate() {
                let s = f64::from(ax);
                for (acc, c) in b_acc.iter_mut().zip(direction.row(x)) {
                    *acc += s * c;
                }
            }
            for (by, acc) in b.iter_mut().zip(&b_acc) {
                *by = if *acc < 0.0 { -1 } else { 1 };
            }
            let mut changed = false;
            let mut total = 0.0;
            for (x, ax) in a.iter_mut().enumerate() {
                let inner: f64 = direction
                    .row(x)
                    .iter()
                    .zip(&b)
                    .map(|(c, &by)| c * f64::from(by))
                    .sum();
                let s = if inner < 0.0 { -1 } else { 1 };
                if s != *ax {
                    changed = true;
                    *ax = s;
                }
                total += inner.abs();
            }
            if !changed || total <= value {
                value = value.max(total);
                break;
            }
            value = total;
        }
        if best.as_ref().map_or(true, |(_, v)| value > *v) {
            best = Some((
                StrategyAssignment {
                    a_signs: a,
                    b_signs: b,
                },
                value,
            ));
        }
    }
    let (s, _) = best.expect("at least one start");
    let value = {
        let mut total = 0.0;
        for (x, &ax) in s.a_signs.iter().enumerate() {
            let inner: f64 = direction
                .row(x)
                .iter()
                .zip(&s.b_signs)
                .map(|(c, &by)| c * f64::from(by))
                .sum();
            total += f64::from(ax) * inner;
        }
        total
    };
    (s, value)
}

/// Maximization step over the local set used by the separation search.
pub trait LinearOracle {
    fn maximize(&mut self, direction: &Matrix) -> Result<(StrategyAssignment, f64)>;

    /// Whether [`LinearOracle::maximize`] is guaranteed to return the global
    /// maximum.
    fn is_exact(&self) -> bool;
}

/// Gray-code enumeration.
#[derive(Clone, Debug, Default)]
pub struct ExactOracle {
    pub options: LocalBoundOptions,
}

impl LinearOracle for ExactOracle {
    fn maximize(&mut self, direction: &Matrix) -> Result<(StrategyAssignment, f64)> {
        linear_oracle_with(direction, &self.options)
    }

    fn is_exact(&self) -> bool {
        true
    }
}

/// Best-response search from random starts plus the Alice signs of every
/// strategy it has previously returned.
#[derive(Clone, Debug)]
pub struct HeuristicOracle {
    random_starts: usize,
    rng: ChaCha8Rng,
    memory: Vec<Vec<i8>>,
    memory_cap: usize,
}

impl HeuristicOracle {
    pub fn new(random_starts: usize, seed: u64) -> Self {
        HeuristicOracle {
            random_starts: random_starts.max(1),
            rng: ChaCha8Rng::seed_from_u64(seed),
            memory: Vec::new(),
            memory_cap: 256,
        }
    }
}

impl LinearOracle for HeuristicOracle {
    fn maximize(&mut self, direction: &Matrix) -> Result<(StrategyAssignment, f64)> {
        let n_a = direction.rows();
        if n_a == 0 || direction.cols() == 0 {
            return Err(Error::invalid("direction must be non-empty"));
        }
        let mut starts: Vec<Vec<i8>> = self
            .memory
            .iter()
            .filter(|m| m.len() == n_a)
            .cloned()
            .collect();
        for _ in 0..self.random_starts {
            starts.push(
                (0..n_a)
                    .map(|_| if self.rng.gen::<bool>() { 1 } else { -1 })
                    .collect(),
            );
        }
        let (s, v) = best_response_search(direction, &starts);
        if !self.memory.contains(&s.a_signs) {
            if self.memory.len() == self.memory_cap {
                self.memory.remove(0);
            }
            self.memory.push(s.a_signs.clone());
        }
        Ok((s, v))
    }

    fn is_exact(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::{builtin_chsh, builtin_cuboct, builtin_icodod};

    fn random_functional(rng: &mut ChaCha8Rng, n_a: usize, n_b: usize) -> BellFunctional {
        let m = Matrix::from_fn(n_a, n_b, |_, _| rng.gen_range(-1.0..=1.0));
        BellFunctional::new("random", m).unwrap()
    }

    /// Reference: every (A, B) pair, no best-response shortcut.
    fn brute_force_pairs(f: &BellFunctional) -> f64 {
        let (n_a, n_b) = (f.n_a(), f.n_b());
        let mut best = f64::NEG_INFINITY;
        for am in 0..(1u32 << n_a) {
            for bm in 0..(1u32 << n_b) {
                let s = StrategyAssignment {
                    a_signs: (0..n_a).map(|i| if am >> i & 1 == 1 { -1 } else { 1 }).collect(),
                    b_signs: (0..n_b).map(|i| if bm >> i & 1 == 1 { -1 } else { 1 }).collect(),
                };
                best = best.max(evaluate(f, &s).unwrap());
            }
        }
        best
    }

    #[test]
    fn evaluate_examples() {
        let chsh = builtin_chsh();
        let plus = StrategyAssignment::new(vec![1, 1], vec![1, 1]).unwrap();
        assert_eq!(evaluate(&chsh, &plus).unwrap(), 2.0);
        let f = builtin_cuboct();
        let all = StrategyAssignment::new(vec![1; 8], vec![1; 6]).unwrap();
        assert_eq!(evaluate(&f, &all).unwrap(), f.coeffs().sum());
        let bad = StrategyAssignment::new(vec![1; 3], vec![1; 2]).unwrap();
        assert!(evaluate(&chsh, &bad).is_err());
        assert!(StrategyAssignment::new(vec![0], vec![1]).is_err());
    }

    #[test]
    fn flip_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random_functional(&mut rng, 5, 4);
        let s = StrategyAssignment::new(vec![1, -1, 1, 1, -1], vec![-1, 1, 1, -1]).unwrap();
        assert_eq!(evaluate(&f, &s).unwrap(), evaluate(&f, &s.negated()).unwrap());
    }

    #[test]
    fn builtin_bounds() {
        for (f, want) in [(builtin_chsh(), 2.0), (builtin_cuboct(), 24.0), (builtin_icodod(), 20.0)] {
            let r = local_bound(&f).unwrap();
            assert_eq!(r.value, want, "{}", f.label);
            let g = local_bound_graycode(&f).unwrap();
            assert_eq!(g.value, want, "{}", f.label);
            assert_eq!(g.witness, r.witness);
            assert_eq!(evaluate(&f, &r.witness).unwrap(), want);
        }
    }

    #[test]
    fn one_by_one() {
        let f = BellFunctional::from_rows("c", vec![vec![-0.75]]).unwrap();
        let r = local_bound_graycode(&f).unwrap();
        assert_eq!(r.value, 0.75);
        assert_eq!(r.enumerated_count, 1);
        assert_eq!(evaluate(&f, &r.witness).unwrap(), 0.75);
    }

    #[test]
    fn agrees_with_pair_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let n_a = rng.gen_range(1..=6);
            let n_b = rng.gen_range(1..=6);
            let f = random_functional(&mut rng, n_a, n_b);
            let want = brute_force_pairs(&f);
            let got = local_bound_graycode(&f).unwrap();
            assert!((got.value - want).abs() < 1e-12, "{n_a}×{n_b}");
        }
    }

    #[test]
    fn transposed_witness_orientation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_functional(&mut rng, 9, 4);
        let r = local_bound_graycode(&f).unwrap();
        assert_eq!(r.witness.a_signs.len(), 9);
        assert_eq!(r.witness.b_signs.len(), 4);
        assert_eq!(r.enumerated_count, 8);
        assert!((evaluate(&f, &r.witness).unwrap() - r.value).abs() < 1e-12);
    }

    #[test]
    fn witness_is_best_response() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_functional(&mut rng, 7, 9);
        let r = local_bound(&f).unwrap();
        assert_eq!(r.witness.a_signs[0], 1);
        for y in 0..f.n_b() {
            let inner: f64 = (0..f.n_a())
                .map(|x| f.get(x, y) * f64::from(r.witness.a_signs[x]))
                .sum();
            let want = if inner < 0.0 { -1 } else { 1 };
            assert_eq!(r.witness.b_signs[y], want);
        }
    }

    #[test]
    fn lexicographic_witness() {
        // CHSH optima with A₁ = +1: A = (+,+) and A = (+,−); −1 sorts first.
        let r = local_bound(&builtin_chsh()).unwrap();
        assert_eq!(r.witness.a_signs, vec![1, -1]);
        let serial = local_bound_graycode_with(&builtin_cuboct(), &LocalBoundOptions::serial()).unwrap();
        let parted = local_bound_graycode_with(
            &builtin_cuboct(),
            &LocalBoundOptions { partition_bits: 4, threads: Some(3), ..Default::default() },
        )
        .unwrap();
        assert_eq!(serial, parted);
    }

    #[test]
    fn capacity_guard() {
        let f = BellFunctional::new("big", Matrix::zeros(12, 12)).unwrap();
        let opts = LocalBoundOptions { max_exponent: 10, ..Default::default() };
        assert!(matches!(
            local_bound_graycode_with(&f, &opts),
            Err(Error::Capacity { exponent: 12, limit: 10 })
        ));
        assert!(matches!(local_bound_with(&f, &opts), Err(Error::Capacity { .. })));
    }

    #[test]
    fn oracle_examples() {
        let (_, v) = linear_oracle(builtin_chsh().coeffs()).unwrap();
        assert_eq!(v, 2.0);
        let (_, v) = linear_oracle(&Matrix::zeros(3, 4)).unwrap();
        assert_eq!(v, 0.0);
        let a = [1.0, -1.0, -1.0, 1.0, 1.0];
        let b = [-1.0, 1.0, 1.0];
        let (s, v) = linear_oracle(&Matrix::outer(&a, &b)).unwrap();
        assert_eq!(v, 15.0);
        assert_eq!(s.a_signs, vec![1, -1, -1, 1, 1]);
        assert_eq!(s.b_signs, vec![-1, 1, 1]);
    }

    #[test]
    fn cuboct_any_nondegenerate_assignment_is_optimal() {
        let f = builtin_cuboct();
        let ft = f.transpose();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut checked = 0;
        for _ in 0..100 {
            // Bob's signs with B(y₁,0) − B(y₁,1) = ±2 for every y₁; Alice
            // answers with absolute values.
            let b: Vec<f64> = (0..6).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
            let sums: Vec<f64> = (0..8)
                .map(|x| (0..6).map(|y| ft.get(y, x) * b[y]).sum())
                .collect();
            if (0..3).all(|k| b[2 * k] != b[2 * k + 1]) {
                checked += 1;
                assert_eq!(sums.iter().map(|t| t.abs()).sum::<f64>(), 24.0);
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn heuristic_is_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let f = random_functional(&mut rng, 10, 10);
        let mut oracle = HeuristicOracle::new(32, 1);
        let (s, v) = oracle.maximize(f.coeffs()).unwrap();
        assert!((evaluate(&f, &s).unwrap() - v).abs() < 1e-12);
        assert!(v <= local_bound_graycode(&f).unwrap().value + 1e-12);
    }
}

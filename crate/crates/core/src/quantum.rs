//! Quantum values on the maximally entangled two-qubit state.
//!
//! For `|φ⁺⟩` and spin measurements along Bloch directions `a` and `b` the
//! correlator is `a · b*`, where `b*` is `b` reflected in the xz-plane. A
//! full-correlation functional evaluated on such measurements is therefore a
//! bilinear form in unit vectors, and its maximum over unit vectors of any
//! dimension is the Tsirelson bound of the functional. [`seesaw_max`]
//! estimates that maximum from below by alternating closed-form updates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::{builtin_icodod, dot_functional, find_signed_permutation, BellFunctional};
use crate::localbound::{best_response_search, local_bound_graycode, StrategyAssignment};
use crate::matrix::Matrix;
use crate::polyhedra::{
    antipodal_reduce, named_vertex_set, Orientation, Solid, UnitVec3, VertexSet,
};

const CORRELATION_TOL: f64 = 1e-12;

/// Matrix of correlators `E[x][y] ∈ [−1, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Matrix", into = "Matrix")]
pub struct CorrelationPoint {
    entries: Matrix,
}

impl CorrelationPoint {
    pub fn new(entries: Matrix) -> Result<Self> {
        if entries
            .as_slice()
            .iter()
            .any(|v| !v.is_finite() || v.abs() > 1.0 + CORRELATION_TOL)
        {
            return Err(Error::invalid("correlators must lie in [-1, 1]"));
        }
        Ok(CorrelationPoint { entries })
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn into_entries(self) -> Matrix {
        self.entries
    }

    pub fn n_a(&self) -> usize {
        self.entries.rows()
    }

    pub fn n_b(&self) -> usize {
        self.entries.cols()
    }
}

impl TryFrom<Matrix> for CorrelationPoint {
    type Error = Error;

    fn try_from(m: Matrix) -> Result<Self> {
        CorrelationPoint::new(m)
    }
}

impl From<CorrelationPoint> for Matrix {
    fn from(p: CorrelationPoint) -> Matrix {
        p.entries
    }
}

pub fn correlator_maxent(a: &UnitVec3, b: &UnitVec3) -> f64 {
    a.dot(&b.star())
}

pub fn correlation_point_maxent(alice: &VertexSet, bob: &VertexSet) -> Result<CorrelationPoint> {
    correlation_point_from_vectors(&alice.vertices, &bob.vertices)
}

pub fn correlation_point_from_vectors(
    alice: &[UnitVec3],
    bob: &[UnitVec3],
) -> Result<CorrelationPoint> {
    if alice.is_empty() || bob.is_empty() {
        return Err(Error::invalid("measurement sets must be non-empty"));
    }
    CorrelationPoint::new(Matrix::from_fn(alice.len(), bob.len(), |x, y| {
        correlator_maxent(&alice[x], &bob[y])
    }))
}

/// `Σ_{x,y} (v_x · u_y*)²`: the dot-product functional of the two sets
/// measured along the sets themselves.
pub fn quantum_value_designed(alice: &VertexSet, bob: &VertexSet) -> Result<f64> {
    let f = dot_functional(alice, bob)?;
    Ok(f.coeffs().as_slice().iter().map(|c| c * c).sum())
}

pub fn quantum_value_at(f: &BellFunctional, alice: &[UnitVec3], bob: &[UnitVec3]) -> Result<f64> {
    if alice.len() != f.n_a() || bob.len() != f.n_b() {
        return Err(Error::invalid(format!(
            "{} Alice and {} Bob directions for a {}×{} functional",
            alice.len(),
            bob.len(),
            f.n_a(),
            f.n_b()
        )));
    }
    let e = correlation_point_from_vectors(alice, bob)?;
    f.value_at(e.entries())
}

/// CHSH measurement directions, ordered to match [`crate::functional::builtin_chsh`].
pub fn chsh_measurements() -> (VertexSet, VertexSet) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let alice = VertexSet::new("chsh-alice", vec![UnitVec3::X, UnitVec3::Z]);
    let bob = VertexSet::new(
        "chsh-bob",
        vec![
            UnitVec3::new(s, 0.0, s).expect("unit"),
            UnitVec3::new(s, 0.0, -s).expect("unit"),
        ],
    );
    (alice, bob)
}

/// Cube for Alice and octahedron for Bob, ordered to match
/// [`crate::functional::builtin_cuboct`]: Bob's setting `(y₁, y₂)` measures
/// along the octahedron vertex whose reflection is `(−1)^{y₂} e_{y₁}`.
pub fn cuboct_measurements() -> (VertexSet, VertexSet) {
    let alice = Solid::Cube.vertices();
    let bob = (0..6)
        .map(|y| {
            let mut v = [0.0; 3];
            v[y / 2] = if y % 2 == 0 { 1.0 } else { -1.0 };
            UnitVec3::new(v[0], v[1], v[2]).expect("axis").star()
        })
        .collect();
    (alice, VertexSet::new("octahedron", bob))
}

/// Reduced dual-aligned icosahedron (6) and dodecahedron (10), relabelled and sign-flipped
/// so that the close/distant pattern of the pair is exactly
/// [`crate::functional::builtin_icodod`].
pub fn icodod_measurements() -> (VertexSet, VertexSet) {
    let ico = antipodal_reduce(&Solid::Icosahedron.vertices_oriented(Orientation::Polar))
        .expect("closed");
    let dod = antipodal_reduce(&Solid::Dodecahedron.vertices_oriented(Orientation::Polar))
        .expect("closed");
    let dots = dot_functional(&ico, &dod).expect("non-empty");
    let pattern = dots.coeffs().map(|c| {
        if c.abs() > 0.5 {
            c.signum()
        } else {
            0.0
        }
    });
    let sp = find_signed_permutation(builtin_icodod().coeffs(), &pattern, 1e-12)
        .expect("the icosahedron–dodecahedron pattern is a relabelling of the built-in matrix");
    let flip = |v: UnitVec3, s: f64| if s < 0.0 { -v } else { v };
    let alice = sp
        .row_perm
        .iter()
        .zip(&sp.row_signs)
        .map(|(&i, &s)| flip(ico.vertices[i], s))
        .collect();
    let bob = sp
        .col_perm
        .iter()
        .zip(&sp.col_signs)
        .map(|(&j, &s)| flip(dod.vertices[j], s))
        .collect();
    (
        VertexSet {
            name: "icosahedron6".into(),
            antipodal_reduced: true,
            vertices: alice,
        },
        VertexSet {
            name: "dodecahedron10".into(),
            antipodal_reduced: true,
            vertices: bob,
        },
    )
}

/// Vector-model start: one `dim`-vector per setting on each side.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorStart {
    pub alice: Vec<Vec<f64>>,
    pub bob: Vec<Vec<f64>>,
}

impl VectorStart {
    /// Bloch measurement directions as a start. Bob's directions are
    /// reflected so that the bilinear form equals the quantum value.
    pub fn from_measurements(alice: &[UnitVec3], bob: &[UnitVec3]) -> Self {
        VectorStart {
            alice: alice.iter().map(|v| v.to_array().to_vec()).collect(),
            bob: bob.iter().map(|v| v.star().to_array().to_vec()).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SeeSawConfig {
    pub dim: usize,
    pub restarts: usize,
    /// Stop a restart once one full round improves the objective by less
    /// than `tol · max(1, |value|)`.
    pub tol: f64,
    pub seed: u64,
    pub max_iter: usize,
    /// Deterministic strategy to seed the aligned-vector start. Computed
    /// when absent (exactly for up to 20 settings on the smaller side).
    pub strategy_start: Option<StrategyAssignment>,
    /// Try Platonic and truncated-icosahedron vertex sets whose sizes match
    /// the setting counts (`dim == 3` only).
    pub solid_starts: bool,
    pub extra_starts: Vec<VectorStart>,
    /// Worker threads for the restarts; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for SeeSawConfig {
    fn default() -> Self {
        SeeSawConfig {
            dim: 3,
            restarts: 100,
            tol: 1e-12,
            seed: 0,
            max_iter: 20_000,
            strategy_start: None,
            solid_starts: true,
            extra_starts: Vec::new(),
            threads: None,
        }
    }
}

impl SeeSawConfig {
    pub fn with_dim(dim: usize) -> Self {
        SeeSawConfig {
            dim,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeeSawResult {
    pub value: f64,
    pub alice_vectors: Vec<Vec<f64>>,
    pub bob_vectors: Vec<Vec<f64>>,
    pub restarts_used: usize,
    /// Whether the winning restart met the tolerance before `max_iter`.
    pub converged: bool,
    /// Objective after each round of the winning restart.
    pub iteration_trace: Vec<f64>,
    /// Zero sum vectors replaced by random directions in the winning restart.
    pub reseeds: usize,
    /// Index of the winning start.
    pub best_start: usize,
}

impl SeeSawResult {
    /// Measurement directions for `dim == 3`: Alice's vectors unchanged and
    /// Bob's reflected back through the xz-plane.
    pub fn bloch_measurements(&self) -> Option<(Vec<UnitVec3>, Vec<UnitVec3>)> {
        let to_unit = |v: &Vec<f64>| -> Option<UnitVec3> {
            (v.len() == 3)
                .then(|| UnitVec3::normalized(v[0], v[1], v[2]).ok())
                .flatten()
        };
        let alice: Option<Vec<_>> = self.alice_vectors.iter().map(to_unit).collect();
        let bob: Option<Vec<_>> = self
            .bob_vectors
            .iter()
            .map(|v| to_unit(v).map(UnitVec3::star))
            .collect();
        Some((alice?, bob?))
    }
}

/// `Σ c[x][y] (a_x · b_y)`.
pub fn bilinear_value(f: &BellFunctional, alice: &[Vec<f64>], bob: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for (x, a) in alice.iter().enumerate() {
        for (y, b) in bob.iter().enumerate() {
            let d: f64 = a.iter().zip(b).map(|(p, q)| p * q).sum();
            total += f.get(x, y) * d;
        }
    }
    total
}

pub fn seesaw_max(f: &BellFunctional, config: &SeeSawConfig) -> Result<SeeSawResult> {
    if config.dim == 0 {
        return Err(Error::invalid("see-saw dimension must be at least 1"));
    }
    if config.restarts == 0 {
        return Err(Error::invalid("see-saw needs at least one restart"));
    }
    for s in &config.extra_starts {
        let dims_ok = s.alice.iter().chain(&s.bob).all(|v| v.len() == config.dim);
        if s.alice.len() != f.n_a() || s.bob.len() != f.n_b() || !dims_ok {
            return Err(Error::invalid("extra start does not match the functional"));
        }
    }

    let mut starts: Vec<Start> = Vec::new();
    starts.push(Start::Strategy(strategy_start(f, config)?));
    if config.dim == 3 && config.solid_starts {
        starts.extend(solid_starts(f.n_a(), f.n_b()).into_iter().map(Start::Alice));
    }
    starts.extend(config.extra_starts.iter().cloned().map(Start::Both));
    starts.extend((0..config.restarts).map(|_| Start::Random));

    let run_all = || {
        starts
            .par_iter()
            .enumerate()
            .map(|(i, start)| {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(i as u64);
                run_restart(f, config, start, &mut rng)
            })
            .collect::<Vec<_>>()
    };
    let runs = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::invalid(format!("cannot build thread pool: {e}")))?
            .install(run_all),
        None => run_all(),
    };

    let restarts_used = runs.len();
    let (best_start, best) = runs
        .into_iter()
        .enumerate()
        .reduce(|acc, cur| if cur.1.value > acc.1.value { cur } else { acc })
        .expect("at least one start");
    let value = bilinear_value(f, &best.alice, &best.bob);
    Ok(SeeSawResult {
        value,
        alice_vectors: best.alice,
        bob_vectors: best.bob,
        restarts_used,
        converged: best.converged,
        iteration_trace: best.trace,
        reseeds: best.reseeds,
        best_start,
    })
}

enum Start {
    Strategy(Vec<i8>),
    Alice(Vec<Vec<f64>>),
    Both(VectorStart),
    Random,
}

struct Run {
    value: f64,
    alice: Vec<Vec<f64>>,
    bob: Vec<Vec<f64>>,
    trace: Vec<f64>,
    converged: bool,
    reseeds: usize,
}

fn strategy_start(f: &BellFunctional, config: &SeeSawConfig) -> Result<Vec<i8>> {
    if let Some(s) = &config.strategy_start {
        if s.a_signs.len() != f.n_a() || s.b_signs.len() != f.n_b() {
            return Err(Error::invalid("strategy start does not match the functional"));
        }
        return Ok(s.a_signs.clone());
    }
    if f.n_a().min(f.n_b()) <= 20 {
        return Ok(local_bound_graycode(f)?.witness.a_signs);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed);
    let starts: Vec<Vec<i8>> = (0..64)
        .map(|_| {
            (0..f.n_a())
                .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
                .collect()
        })
        .collect();
    Ok(best_response_search(f.coeffs(), &starts).0.a_signs)
}

fn solid_candidates(n: usize) -> Vec<VertexSet> {
    let mut out = Vec::new();
    for o in [Orientation::Canonical, Orientation::Polar] {
        for solid in Solid::ALL {
            if solid.vertex_count() == n {
                out.push(solid.vertices_oriented(o));
            }
            if solid != Solid::Tetrahedron && solid.vertex_count() / 2 == n {
                out.extend(antipodal_reduce(&solid.vertices_oriented(o)));
            }
        }
    }
    for name in ["buckyball", "buckyball30"] {
        let set = named_vertex_set(name, Orientation::Canonical).expect("known set");
        if set.len() == n {
            out.push(set);
        }
    }
    out.dedup();
    out
}

/// Alice starts on a vertex set of matching size; Bob's vectors follow from
/// the first update.
fn solid_starts(n_a: usize, _n_b: usize) -> Vec<Vec<Vec<f64>>> {
    solid_candidates(n_a)
        .into_iter()
        .map(|set| set.vertices.iter().map(|v| v.to_array().to_vec()).collect())
        .collect()
}

fn random_unit(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            let n = n2.sqrt();
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Replaces each target vector by the normalized weighted sum of the
/// sources; returns the number of zero sums that had to be reseeded.
fn respond(
    weights: impl Fn(usize, usize) -> f64,
    sources: &[Vec<f64>],
    targets: &mut [Vec<f64>],
    rng: &mut ChaCha8Rng,
) -> usize {
    let mut reseeds = 0;
    for (t, target) in targets.iter_mut().enumerate() {
        target.fill(0.0);
        for (s, source) in sources.iter().enumerate() {
            let w = weights(s, t);
            if w != 0.0 {
                for (acc, v) in target.iter_mut().zip(source) {
                    *acc += w * v;
                }
            }
        }
        let n = target.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1e-300 && n.is_finite() {
            target.iter_mut().for_each(|v| *v /= n);
        } else {
            *target = random_unit(target.len(), rng);
            reseeds += 1;
        }
    }
    reseeds
}

fn run_restart(
    f: &BellFunctional,
    config: &SeeSawConfig,
    start: &Start,
    rng: &mut ChaCha8Rng,
) -> Run {
    let d = config.dim;
    let embed = |v: &Vec<f64>| -> Vec<f64> {
        let mut out = vec![0.0; d];
        for (o, x) in out.iter_mut().zip(v) {
            *o = *x;
        }
        out
    };
    let mut bob = vec![vec![0.0; d]; f.n_b()];
    let mut alice: Vec<Vec<f64>> = match start {
        Start::Strategy(signs) => signs
            .iter()
            .map(|&s| {
                let mut v = vec![0.0; d];
                v[0] = f64::from(s);
                v
            })
            .collect(),
        Start::Alice(vs) => vs.iter().map(embed).collect(),
        Start::Both(s) => {
            bob = s.bob.clone();
            s.alice.clone()
        }
        Start::Random => (0..f.n_a()).map(|_| random_unit(d, rng)).collect(),
    };
    let c = f.coeffs();
    let mut reseeds = 0;
    if !matches!(start, Start::Both(_)) {
        reseeds += respond(|x, y| c.get(x, y), &alice, &mut bob, rng);
    }
    let mut value = bilinear_value(f, &alice, &bob);
    let mut trace = vec![value];
    let mut converged = false;
    for _ in 0..config.max_iter {
        reseeds += respond(|y, x| c.get(x, y), &bob, &mut alice, rng);
        reseeds += respond(|x, y| c.get(x, y), &alice, &mut bob, rng);
        let next = bilinear_value(f, &alice, &bob);
        trace.push(next);
        let improvement = next - value;
        value = next;
        if improvement < config.tol * value.abs().max(1.0) {
            converged = true;
            break;
        }
    }
    Run {
        value,
        alice,
        bob,
        trace,
        converged,
        reseeds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::{builtin_chsh, builtin_cuboct};
    use crate::polyhedra::platonic_vertices;

    #[test]
    fn correlator_examples() {
        assert_eq!(correlator_maxent(&UnitVec3::Z, &UnitVec3::Z), 1.0);
        assert_eq!(correlator_maxent(&UnitVec3::X, &UnitVec3::Z), 0.0);
        assert_eq!(correlator_maxent(&UnitVec3::Y, &UnitVec3::Y), -1.0);
    }

    #[test]
    fn octahedron_correlations() {
        let oct = platonic_vertices("octahedron").unwrap();
        let e = correlation_point_maxent(&oct, &oct).unwrap();
        for x in 0..6 {
            let row = e.entries().row(x);
            assert_eq!(row.iter().filter(|&&v| v == 1.0).count(), 1);
            let y = row.iter().position(|&v| v == 1.0).unwrap();
            assert_eq!(oct.vertices[y].star(), oct.vertices[x]);
        }
    }

    #[test]
    fn chsh_correlations() {
        let (a, b) = chsh_measurements();
        let e = correlation_point_maxent(&a, &b).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(e.entries().as_slice().iter().all(|v| (v.abs() - s).abs() < 1e-15));
        let q = quantum_value_at(&builtin_chsh(), &a.vertices, &b.vertices).unwrap();
        assert!((q - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn designed_values() {
        let tet = platonic_vertices("tetrahedron").unwrap();
        assert!((quantum_value_designed(&tet, &tet).unwrap() - 16.0 / 3.0).abs() < 1e-12);
        let cube = platonic_vertices("cube").unwrap();
        let dod = platonic_vertices("dodecahedron").unwrap();
        assert!((quantum_value_designed(&cube, &dod).unwrap() - 160.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn two_code_paths_agree() {
        let a = platonic_vertices("icosahedron").unwrap();
        let b = platonic_vertices("cube").unwrap();
        let f = dot_functional(&a, &b).unwrap();
        let direct = quantum_value_at(&f, &a.vertices, &b.vertices).unwrap();
        let designed = quantum_value_designed(&a, &b).unwrap();
        assert!((direct - designed).abs() < 1e-12);
        assert!(direct.abs() <= f.coeffs().abs_sum());
    }

    #[test]
    fn cuboct_designed_value() {
        let (a, b) = cuboct_measurements();
        let q = quantum_value_at(&builtin_cuboct(), &a.vertices, &b.vertices).unwrap();
        assert!((q - 16.0 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn icodod_designed_value() {
        let (a, b) = icodod_measurements();
        let q = quantum_value_at(&builtin_icodod(), &a.vertices, &b.vertices).unwrap();
        let phi = crate::polyhedra::PHI;
        assert!((q - 2.0 * (45.0 + 60.0 * phi).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn dimension_mismatch() {
        let (a, _) = chsh_measurements();
        assert!(quantum_value_at(&builtin_chsh(), &a.vertices, &a.vertices[..1]).is_err());
    }

    #[test]
    fn seesaw_chsh() {
        let r = seesaw_max(&builtin_chsh(), &SeeSawConfig { restarts: 10, ..SeeSawConfig::with_dim(2) })
            .unwrap();
        assert!((r.value - 2.0 * 2f64.sqrt()).abs() < 1e-9);
        assert_eq!(r.restarts_used, 11);
    }

    #[test]
    fn seesaw_trace_is_monotone() {
        let r = seesaw_max(&builtin_icodod(), &SeeSawConfig { restarts: 8, ..Default::default() })
            .unwrap();
        for w in r.iteration_trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-12 * w[0].abs().max(1.0));
        }
        assert!((bilinear_value(&builtin_icodod(), &r.alice_vectors, &r.bob_vectors) - r.value).abs() < 1e-12);
    }

    #[test]
    fn seesaw_is_deterministic() {
        let cfg = SeeSawConfig { restarts: 6, seed: 42, ..Default::default() };
        let a = seesaw_max(&builtin_icodod(), &cfg).unwrap();
        let b = seesaw_max(&builtin_icodod(), &SeeSawConfig { threads: Some(2), ..cfg }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn seesaw_rejects_bad_config() {
        let f = builtin_chsh();
        assert!(seesaw_max(&f, &SeeSawConfig::with_dim(0)).is_err());
        assert!(seesaw_max(&f, &SeeSawConfig { restarts: 0, ..Default::default() }).is_err());
    }

    #[test]
    fn zero_rows_are_reseeded() {
        let f = BellFunctional::from_rows("z", vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let r = seesaw_max(&f, &SeeSawConfig { restarts: 2, ..Default::default() }).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(r.reseeds > 0);
    }

    #[test]
    fn bloch_measurements_reproduce_value() {
        let f = builtin_cuboct();
        let r = seesaw_max(&f, &SeeSawConfig { restarts: 4, ..Default::default() }).unwrap();
        let (a, b) = r.bloch_measurements().unwrap();
        let q = quantum_value_at(&f, &a, &b).unwrap();
        assert!((q - r.value).abs() < 1e-9);
    }
}

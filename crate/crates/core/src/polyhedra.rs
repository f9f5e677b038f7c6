//! Vertex sets of the Platonic solids and the truncated icosahedron.
//!
//! All coordinates are generated in closed form and scaled onto the unit
//! sphere. Two orientations are available:
//!
//! * [`Orientation::Canonical`]: octahedron on the coordinate axes, cube at
//!   `(±1,±1,±1)/√3`, tetrahedron as the even-parity subset of the cube,
//!   icosahedron from the cyclic permutations of `(0, ±1, ±φ)` and
//!   dodecahedron as the cube plus the cyclic permutations of
//!   `(0, ±1/φ, ±φ)`.
//! * [`Orientation::Polar`]: the tetrahedron and the icosahedron each stand
//!   on a vertex at `+z` with a neighbouring vertex in the `+x` half of the
//!   xz-plane, and the dodecahedron is the dual of that icosahedron (its
//!   vertices are the icosahedron's face centres). Octahedron and cube are
//!   unchanged.
//!
//! Quantum values of the dot-product functionals do not depend on the
//! orientation; local bounds of pairs of different solids do.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The golden ratio.
pub const PHI: f64 = 1.618_033_988_749_895;

const UNIT_NORM_TOL: f64 = 1e-12;
/// Files may carry rounded coordinates; anything this close to unit norm is
/// renormalized on load, anything further is rejected.
const LOAD_NORM_TOL: f64 = 1e-6;
const SAME_POINT_TOL: f64 = 1e-9;

/// A direction on the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct UnitVec3 {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVec3 {
    pub const X: UnitVec3 = UnitVec3 { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: UnitVec3 = UnitVec3 { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: UnitVec3 = UnitVec3 { x: 0.0, y: 0.0, z: 1.0 };

    /// Accepts `(x, y, z)` only if it already has unit norm (within 1e-12).
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !n.is_finite() || (n - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::invalid(format!(
                "({x}, {y}, {z}) is not a unit vector (norm {n})"
            )));
        }
        Ok(UnitVec3 { x, y, z })
    }

    /// Scales a nonzero finite vector onto the unit sphere.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::invalid(format!(
                "cannot normalize ({x}, {y}, {z})"
            )));
        }
        Ok(UnitVec3 {
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    fn from_raw(v: [f64; 3]) -> Self {
        Self::normalized(v[0], v[1], v[2]).expect("generator produced a zero vector")
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &UnitVec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Reflection in the xz-plane: `(x, y, z) ↦ (x, −y, z)`.
    pub fn star(self) -> UnitVec3 {
        UnitVec3 {
            x: self.x,
            y: -self.y,
            z: self.z,
        }
    }

    pub fn distance(&self, other: &UnitVec3) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    fn approx_eq(&self, other: &UnitVec3) -> bool {
        self.distance(other) <= SAME_POINT_TOL
    }
}

impl std::ops::Neg for UnitVec3 {
    type Output = UnitVec3;

    fn neg(self) -> UnitVec3 {
        UnitVec3 {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

impl TryFrom<[f64; 3]> for UnitVec3 {
    type Error = Error;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !n.is_finite() || (n - 1.0).abs() > LOAD_NORM_TOL {
            return Err(Error::invalid(format!(
                "[{}, {}, {}] is not a unit vector (norm {n})",
                v[0], v[1], v[2]
            )));
        }
        // Coordinates that are already unit to working precision are kept
        // bit-for-bit so that files round-trip exactly.
        UnitVec3::new(v[0], v[1], v[2]).or_else(|_| UnitVec3::normalized(v[0], v[1], v[2]))
    }
}

impl From<UnitVec3> for [f64; 3] {
    fn from(v: UnitVec3) -> [f64; 3] {
        v.to_array()
    }
}

/// Reflection in the xz-plane.
pub fn star(v: UnitVec3) -> UnitVec3 {
    v.star()
}

/// A named, ordered list of unit vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexSet {
    pub name: String,
    pub antipodal_reduced: bool,
    pub vertices: Vec<UnitVec3>,
}

impl VertexSet {
    pub fn new(name: impl Into<String>, vertices: Vec<UnitVec3>) -> Self {
        VertexSet {
            name: name.into(),
            antipodal_reduced: false,
            vertices,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// `Σ_k v_k v_kᵀ`.
    pub fn second_moment(&self) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for v in &self.vertices {
            let a = v.to_array();
            for (i, row) in m.iter_mut().enumerate() {
                for (j, e) in row.iter_mut().enumerate() {
                    *e += a[i] * a[j];
                }
            }
        }
        m
    }

    /// Largest entrywise deviation of the second moment from `(N/3)·I`.
    pub fn isotropy_defect(&self) -> f64 {
        let m = self.second_moment();
        let target = self.len() as f64 / 3.0;
        let mut worst: f64 = 0.0;
        for (i, row) in m.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                let want = if i == j { target } else { 0.0 };
                worst = worst.max((e - want).abs());
            }
        }
        worst
    }

    pub fn is_antipodally_closed(&self) -> bool {
        self.vertices
            .iter()
            .all(|v| self.vertices.iter().any(|w| w.approx_eq(&-*v)))
    }

    /// Number of vertex pairs at the minimal pairwise distance.
    pub fn nearest_neighbor_edges(&self) -> usize {
        let mut dmin = f64::INFINITY;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                dmin = dmin.min(a.distance(b));
            }
        }
        let mut count = 0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                if (a.distance(b) - dmin).abs() <= 1e-9 {
                    count += 1;
                }
            }
        }
        count
    }

    /// Bloch directions with the xz-reflection applied to every vertex.
    pub fn starred(&self) -> VertexSet {
        VertexSet {
            name: format!("{}*", self.name),
            antipodal_reduced: self.antipodal_reduced,
            vertices: self.vertices.iter().map(|v| v.star()).collect(),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self).expect("vertex sets always serialize");
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            line: e.line(),
            field: format!("column {}", e.column()),
            message: e.to_string(),
        })
    }
}

/// The five regular convex polyhedra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solid {
    Tetrahedron,
    Octahedron,
    Cube,
    Icosahedron,
    Dodecahedron,
}

impl Solid {
    pub const ALL: [Solid; 5] = [
        Solid::Tetrahedron,
        Solid::Octahedron,
        Solid::Cube,
        Solid::Icosahedron,
        Solid::Dodecahedron,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Solid::Tetrahedron => "tetrahedron",
            Solid::Octahedron => "octahedron",
            Solid::Cube => "cube",
            Solid::Icosahedron => "icosahedron",
            Solid::Dodecahedron => "dodecahedron",
        }
    }

    pub fn vertex_count(self) -> usize {
        match self {
            Solid::Tetrahedron => 4,
            Solid::Octahedron => 6,
            Solid::Cube => 8,
            Solid::Icosahedron => 12,
            Solid::Dodecahedron => 20,
        }
    }

    pub fn dual(self) -> Solid {
        match self {
            Solid::Tetrahedron => Solid::Tetrahedron,
            Solid::Octahedron => Solid::Cube,
            Solid::Cube => Solid::Octahedron,
            Solid::Icosahedron => Solid::Dodecahedron,
            Solid::Dodecahedron => Solid::Icosahedron,
        }
    }

    pub fn vertices(self) -> VertexSet {
        self.vertices_oriented(Orientation::Canonical)
    }

    pub fn vertices_oriented(self, orientation: Orientation) -> VertexSet {
        let raw = match (self, orientation) {
            (Solid::Tetrahedron, Orientation::Canonical) => tetrahedron_canonical(),
            (Solid::Tetrahedron, Orientation::Polar) => tetrahedron_polar(),
            (Solid::Octahedron, _) => octahedron(),
            (Solid::Cube, _) => cube(),
            (Solid::Icosahedron, Orientation::Canonical) => icosahedron_canonical(),
            (Solid::Icosahedron, Orientation::Polar) => icosahedron_polar(),
            (Solid::Dodecahedron, Orientation::Canonical) => dodecahedron(),
            (Solid::Dodecahedron, Orientation::Polar) => dodecahedron_polar(),
        };
        VertexSet::new(
            self.name(),
            raw.into_iter().map(UnitVec3::from_raw).collect(),
        )
    }
}

impl fmt::Display for Solid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Solid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Solid::ALL
            .into_iter()
            .find(|solid| solid.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::invalid(format!("unknown Platonic solid {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Canonical,
    Polar,
}

impl FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "canonical" => Ok(Orientation::Canonical),
            "polar" => Ok(Orientation::Polar),
            other => Err(Error::invalid(format!("unknown orientation {other:?}"))),
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Canonical => "canonical",
            Orientation::Polar => "polar",
        })
    }
}

/// Canonical vertex set of a Platonic solid, by name.
pub fn platonic_vertices(name: &str) -> Result<VertexSet> {
    Ok(name.parse::<Solid>()?.vertices())
}

pub fn dual_name(name: &str) -> Result<&'static str> {
    Ok(name.parse::<Solid>()?.dual().name())
}

fn sign_pairs() -> [(f64, f64); 4] {
    [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
}

fn cyclic(v: [f64; 3]) -> [[f64; 3]; 3] {
    [v, [v[1], v[2], v[0]], [v[2], v[0], v[1]]]
}

/// `(±1,±1,±1)` in binary order: bit `k` of the index (most significant
/// first) set means coordinate `k` is negative.
fn cube() -> Vec<[f64; 3]> {
    (0..8u32)
        .map(|i| {
            let s = |bit: u32| if i >> (2 - bit) & 1 == 1 { -1.0 } else { 1.0 };
            [s(0), s(1), s(2)]
        })
        .collect()
}

fn octahedron() -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(6);
    for axis in 0..3 {
        for s in [1.0, -1.0] {
            let mut v = [0.0; 3];
            v[axis] = s;
            out.push(v);
        }
    }
    out
}

fn tetrahedron_canonical() -> Vec<[f64; 3]> {
    cube()
        .into_iter()
        .filter(|v| v[0] * v[1] * v[2] > 0.0)
        .collect()
}

fn tetrahedron_polar() -> Vec<[f64; 3]> {
    let r = 2.0 * 2f64.sqrt() / 3.0;
    let mut out = vec![[0.0, 0.0, 1.0]];
    for k in 0..3 {
        let t = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
        out.push([r * t.cos(), r * t.sin(), -1.0 / 3.0]);
    }
    out
}

fn icosahedron_canonical() -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(12);
    for (s1, s2) in sign_pairs() {
        out.extend(cyclic([0.0, s1, s2 * PHI]));
    }
    out
}

fn icosahedron_polar() -> Vec<[f64; 3]> {
    let z = 1.0 / 5f64.sqrt();
    let r = 2.0 * z;
    let step = 2.0 * std::f64::consts::PI / 5.0;
    let mut out = vec![[0.0, 0.0, 1.0]];
    for k in 0..5 {
        let t = step * k as f64;
        out.push([r * t.cos(), r * t.sin(), z]);
    }
    for k in 0..5 {
        let t = step * (k as f64 + 0.5);
        out.push([r * t.cos(), r * t.sin(), -z]);
    }
    out.push([0.0, 0.0, -1.0]);
    out
}

fn dodecahedron() -> Vec<[f64; 3]> {
    let mut out = cube();
    for (s1, s2) in sign_pairs() {
        out.extend(cyclic([0.0, s1 / PHI, s2 * PHI]));
    }
    out
}

/// Face centres of [`icosahedron_polar`]: the upper cap, the two bands of
/// the antiprism and the lower cap, five faces each.
fn dodecahedron_polar() -> Vec<[f64; 3]> {
    let ico = icosahedron_polar();
    let (north, south) = (0, 11);
    let upper = |k: usize| 1 + k % 5;
    let lower = |k: usize| 6 + k % 5;
    let mut faces = Vec::with_capacity(20);
    faces.extend((0..5).map(|k| [north, upper(k), upper(k + 1)]));
    faces.extend((0..5).map(|k| [upper(k), upper(k + 1), lower(k)]));
    faces.extend((0..5).map(|k| [lower(k), lower(k + 1), upper(k + 1)]));
    faces.extend((0..5).map(|k| [south, lower(k), lower(k + 1)]));
    faces
        .iter()
        .map(|f| {
            let mut c = [0.0; 3];
            for &i in f {
                for (acc, v) in c.iter_mut().zip(ico[i]) {
                    *acc += v;
                }
            }
            c
        })
        .collect()
}

/// The truncated icosahedron: 60 unit vertices from the cyclic permutations
/// of `(0, ±1, ±3φ)`, `(±1, ±(2+φ), ±2φ)` and `(±φ, ±2, ±φ³)`.
pub fn truncated_icosahedron() -> VertexSet {
    let mut raw = Vec::with_capacity(60);
    for (s1, s2) in sign_pairs() {
        raw.extend(cyclic([0.0, s1, s2 * 3.0 * PHI]));
    }
    let phi3 = 2.0 * PHI + 1.0;
    for s0 in [1.0, -1.0] {
        for (s1, s2) in sign_pairs() {
            raw.extend(cyclic([s0, s1 * (2.0 + PHI), s2 * 2.0 * PHI]));
            raw.extend(cyclic([s0 * PHI, s1 * 2.0, s2 * phi3]));
        }
    }
    VertexSet::new(
        "buckyball",
        raw.into_iter().map(UnitVec3::from_raw).collect(),
    )
}

fn lex_greater(a: &UnitVec3, b: &UnitVec3) -> bool {
    for (p, q) in a.to_array().into_iter().zip(b.to_array()) {
        if (p - q).abs() > SAME_POINT_TOL {
            return p > q;
        }
    }
    false
}

/// Keeps one vertex per antipodal pair, the one whose coordinate triple is
/// lexicographically larger. Input order is preserved.
pub fn antipodal_reduce(set: &VertexSet) -> Result<VertexSet> {
    let mut kept = Vec::with_capacity(set.len() / 2);
    for v in &set.vertices {
        let partner = set
            .vertices
            .iter()
            .find(|w| w.approx_eq(&-*v))
            .ok_or_else(|| {
                Error::invalid(format!(
                    "{} is not antipodally closed: no partner for {:?}",
                    set.name,
                    v.to_array()
                ))
            })?;
        if lex_greater(v, partner) {
            kept.push(*v);
        }
    }
    Ok(VertexSet {
        name: format!("{}{}", set.name, kept.len()),
        antipodal_reduced: true,
        vertices: kept,
    })
}

/// Names accepted by [`named_vertex_set`].
pub const NAMED_SETS: [&str; 11] = [
    "tetrahedron",
    "octahedron",
    "cube",
    "icosahedron",
    "dodecahedron",
    "octahedron3",
    "cube4",
    "icosahedron6",
    "dodecahedron10",
    "buckyball",
    "buckyball30",
];

/// Looks up a Platonic solid, an antipodally reduced solid (`cube4`,
/// `icosahedron6`, …) or one of the truncated-icosahedron variants.
pub fn named_vertex_set(name: &str, orientation: Orientation) -> Result<VertexSet> {
    let name = name.trim().to_ascii_lowercase();
    match name.as_str() {
        "buckyball" | "truncated_icosahedron" => return Ok(truncated_icosahedron()),
        "buckyball30" => return antipodal_reduce(&truncated_icosahedron()),
        _ => {}
    }
    if let Ok(solid) = name.parse::<Solid>() {
        return Ok(solid.vertices_oriented(orientation));
    }
    let stem = name.trim_end_matches(|c: char| c.is_ascii_digit());
    if let Ok(solid) = stem.parse::<Solid>() {
        if solid != Solid::Tetrahedron && name[stem.len()..] == (solid.vertex_count() / 2).to_string()
        {
            return antipodal_reduce(&solid.vertices_oriented(orientation));
        }
    }
    Err(Error::invalid(format!(
        "unknown vertex set {name:?}; expected one of {}",
        NAMED_SETS.join(", ")
    )))
}

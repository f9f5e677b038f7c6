//! Full-correlation Bell functionals `Σ c[x][y] E(x,y)`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::polyhedra::VertexSet;

/// Version tag written into functional files.
pub const FILE_SCHEMA: u32 = 1;

/// Packaged 30×30 noise-tolerant inequality, one row per Alice setting,
/// stored verbatim at the reference precision.
pub const APPENDIX_CSV: &str = include_str!("../data/appendix_30x30.csv");

/// SHA-256 of [`APPENDIX_CSV`].
pub const APPENDIX_SHA256: &str =
    "24dede80c387129e51aaf276300398e58fdd95f673ba64978639d7e18931fab1";

/// Coefficient matrix `c[x][y]`, `x` indexing Alice's settings and `y`
/// Bob's.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFunctional")]
pub struct BellFunctional {
    pub label: String,
    coeffs: Matrix,
}

#[derive(Deserialize)]
struct RawFunctional {
    label: String,
    coeffs: Matrix,
}

impl TryFrom<RawFunctional> for BellFunctional {
    type Error = Error;

    fn try_from(raw: RawFunctional) -> Result<Self> {
        BellFunctional::new(raw.label, raw.coeffs)
    }
}

impl BellFunctional {
    pub fn new(label: impl Into<String>, coeffs: Matrix) -> Result<Self> {
        if coeffs.rows() == 0 || coeffs.cols() == 0 {
            return Err(Error::invalid("a Bell functional needs at least one setting per side"));
        }
        if !coeffs.is_finite() {
            return Err(Error::invalid("coefficients must be finite"));
        }
        Ok(BellFunctional {
            label: label.into(),
            coeffs,
        })
    }

    pub fn from_rows(label: impl Into<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(label, Matrix::from_rows(rows)?)
    }

    pub fn n_a(&self) -> usize {
        self.coeffs.rows()
    }

    pub fn n_b(&self) -> usize {
        self.coeffs.cols()
    }

    pub fn coeffs(&self) -> &Matrix {
        &self.coeffs
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.coeffs.get(x, y)
    }

    pub fn transpose(&self) -> BellFunctional {
        BellFunctional {
            label: format!("{}ᵀ", self.label),
            coeffs: self.coeffs.transpose(),
        }
    }

    /// Rescaled so that the largest `|c[x][y]|` is 1. A zero functional is
    /// returned unchanged.
    pub fn normalized_max_abs(&self) -> BellFunctional {
        let m = self.coeffs.max_abs();
        if m == 0.0 {
            return self.clone();
        }
        BellFunctional {
            label: self.label.clone(),
            coeffs: self.coeffs.map(|v| v / m),
        }
    }

    /// Value of the functional at a correlation matrix.
    pub fn value_at(&self, correlations: &Matrix) -> Result<f64> {
        if correlations.shape() != self.coeffs.shape() {
            return Err(Error::invalid(format!(
                "correlations are {:?}, functional is {:?}",
                correlations.shape(),
                self.coeffs.shape()
            )));
        }
        Ok(self.coeffs.dot(correlations))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        save_functional(self, path)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        load_functional(path)
    }
}

/// `c[x][y] = v_x · u_y*`.
pub fn dot_functional(alice: &VertexSet, bob: &VertexSet) -> Result<BellFunctional> {
    if alice.is_empty() || bob.is_empty() {
        return Err(Error::invalid("vertex sets must be non-empty"));
    }
    let coeffs = Matrix::from_fn(alice.len(), bob.len(), |x, y| {
        alice.vertices[x].dot(&bob.vertices[y].star())
    });
    BellFunctional::new(format!("{}·{}*", alice.name, bob.name), coeffs)
}

/// Cube–octahedron inequality with entries `(−1)^(x_{y₁} + y₂)`.
///
/// Rows: `x = x₁x₂x₃` in binary order `000, 001, …, 111`. Columns:
/// `(y₁, y₂) = (1,0), (1,1), (2,0), (2,1), (3,0), (3,1)`.
pub fn builtin_cuboct() -> BellFunctional {
    let coeffs = Matrix::from_fn(8, 6, |x, y| {
        let (y1, y2) = (y / 2, y % 2);
        let bit = (x >> (2 - y1)) & 1;
        if (bit + y2) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    });
    BellFunctional::new("cuboct", coeffs).expect("constant matrix")
}

const ICODOD: [[i8; 10]; 6] = [
    [1, 1, 1, 0, 1, 1, 0, 0, 0, 0],
    [1, 1, 0, 1, 0, 0, 1, 1, 0, 0],
    [1, 0, 1, 1, 0, 0, 0, 0, 1, 1],
    [0, 1, 0, 0, 1, 0, 1, 0, -1, -1],
    [0, 0, 1, 0, 0, 1, -1, -1, 1, 0],
    [0, 0, 0, 1, -1, -1, 0, 1, 0, 1],
];

/// Icosahedron–dodecahedron inequality (six by ten settings).
pub fn builtin_icodod() -> BellFunctional {
    let coeffs = Matrix::from_fn(6, 10, |x, y| f64::from(ICODOD[x][y]));
    BellFunctional::new("icodod", coeffs).expect("constant matrix")
}

pub fn builtin_chsh() -> BellFunctional {
    BellFunctional::from_rows("chsh", vec![vec![1.0, 1.0], vec![1.0, -1.0]])
        .expect("constant matrix")
}

pub fn load_appendix_matrix() -> Result<BellFunctional> {
    parse_appendix_csv(APPENDIX_CSV)
}

pub fn load_appendix_matrix_from(path: impl AsRef<Path>) -> Result<BellFunctional> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_appendix_csv(&text)
}

/// Verifies the content hash, then parses the 30×30 comma-separated table.
pub fn parse_appendix_csv(text: &str) -> Result<BellFunctional> {
    let digest = hex::encode(Sha256::digest(text.as_bytes()));
    if digest != APPENDIX_SHA256 {
        return Err(Error::DataIntegrity(format!(
            "appendix matrix checksum {digest} does not match {APPENDIX_SHA256}"
        )));
    }
    let rows = appendix_entries(text)?
        .into_iter()
        .map(|row| row.into_iter().map(|s| s.parse::<f64>()).collect())
        .collect::<std::result::Result<Vec<Vec<f64>>, _>>()
        .map_err(|e| Error::DataIntegrity(e.to_string()))?;
    if rows.len() != 30 || rows.iter().any(|r| r.len() != 30) {
        return Err(Error::DataIntegrity("appendix matrix must be 30×30".into()));
    }
    BellFunctional::from_rows("appendix", rows)
}

/// The verbatim decimal strings of the appendix table.
pub fn appendix_entries(text: &str) -> Result<Vec<Vec<&str>>> {
    Ok(text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(str::trim).collect())
        .collect())
}

/// Names accepted by [`builtin`].
pub const BUILTINS: [&str; 4] = ["chsh", "cuboct", "icodod", "appendix"];

pub fn builtin(name: &str) -> Result<BellFunctional> {
    match name.trim().to_ascii_lowercase().as_str() {
        "chsh" => Ok(builtin_chsh()),
        "cuboct" => Ok(builtin_cuboct()),
        "icodod" => Ok(builtin_icodod()),
        "appendix" => load_appendix_matrix(),
        other => Err(Error::invalid(format!(
            "unknown built-in functional {other:?}; expected one of {}",
            BUILTINS.join(", ")
        ))),
    }
}

/// A built-in name or a path to a functional file.
pub fn resolve_functional(spec: &str) -> Result<BellFunctional> {
    if BUILTINS.contains(&spec.trim().to_ascii_lowercase().as_str()) {
        builtin(spec)
    } else {
        load_functional(spec)
    }
}

#[derive(Serialize, Deserialize)]
struct FunctionalFile {
    #[serde(default = "default_schema")]
    schema: u32,
    label: String,
    n_a: usize,
    n_b: usize,
    coeffs: Vec<Vec<f64>>,
}

fn default_schema() -> u32 {
    FILE_SCHEMA
}

pub fn functional_to_json(f: &BellFunctional) -> String {
    let file = FunctionalFile {
        schema: FILE_SCHEMA,
        label: f.label.clone(),
        n_a: f.n_a(),
        n_b: f.n_b(),
        coeffs: f.coeffs.to_rows(),
    };
    serde_json::to_string_pretty(&file).expect("functionals always serialize")
}

pub fn save_functional(f: &BellFunctional, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, functional_to_json(f) + "\n").map_err(|e| Error::io(path, e))
}

pub fn load_functional(path: impl AsRef<Path>) -> Result<BellFunctional> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    functional_from_json(&text, path)
}

pub fn functional_from_json(text: &str, path: &Path) -> Result<BellFunctional> {
    let malformed = |line: usize, field: String, message: String| Error::Malformed {
        path: path.to_path_buf(),
        line,
        field,
        message,
    };
    let file: FunctionalFile = serde_json::from_str(text)
        .map_err(|e| malformed(e.line(), format!("column {}", e.column()), e.to_string()))?;
    if file.schema != FILE_SCHEMA {
        return Err(malformed(
            1,
            "schema".into(),
            format!("unsupported schema {}", file.schema),
        ));
    }
    if file.coeffs.len() != file.n_a {
        return Err(malformed(
            row_line(text, file.coeffs.len().min(file.n_a)),
            "coeffs".into(),
            format!("{} rows, expected n_a = {}", file.coeffs.len(), file.n_a),
        ));
    }
    for (i, row) in file.coeffs.iter().enumerate() {
        if row.len() != file.n_b {
            return Err(malformed(
                row_line(text, i),
                format!("coeffs[{i}]"),
                format!("row has {} entries, expected n_b = {}", row.len(), file.n_b),
            ));
        }
    }
    BellFunctional::from_rows(file.label, file.coeffs)
        .map_err(|e| malformed(1, "coeffs".into(), e.to_string()))
}

/// 1-based line on which row `index` of the `coeffs` array opens.
fn row_line(text: &str, index: usize) -> usize {
    let Some(start) = text.find("\"coeffs\"") else {
        return 1;
    };
    let mut depth = 0usize;
    let mut seen = 0usize;
    let mut line = 1 + text[..start].matches('\n').count();
    for c in text[start..].chars() {
        match c {
            '\n' => line += 1,
            '[' => {
                depth += 1;
                if depth == 2 {
                    if seen == index {
                        return line;
                    }
                    seen += 1;
                }
            }
            ']' => {
                if depth <= 1 {
                    return line;
                }
                depth -= 1;
            }
            _ => {}
        }
    }
    line
}

/// Relabelling that maps one coefficient matrix onto another:
/// `target[x][y] = scale · row_signs[x] · col_signs[y] · source[row_perm[x]][col_perm[y]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedPermutation {
    pub scale: f64,
    pub row_perm: Vec<usize>,
    pub row_signs: Vec<f64>,
    pub col_perm: Vec<usize>,
    pub col_signs: Vec<f64>,
}

/// Searches for a [`SignedPermutation`] with positive `scale` taking
/// `source` to `target`. Exhaustive over row permutations, so intended for
/// matrices with at most eight or so rows.
pub fn find_signed_permutation(
    target: &Matrix,
    source: &Matrix,
    tol: f64,
) -> Option<SignedPermutation> {
    if target.shape() != source.shape() || source.max_abs() == 0.0 {
        return None;
    }
    let (rows, cols) = target.shape();
    let scale = target.max_abs() / source.max_abs();
    let mut perm: Vec<usize> = (0..rows).collect();
    let mut found = None;
    permutations(&mut perm, 0, &mut |p| {
        // Row 0 keeps its sign; a global flip is absorbed by the columns.
        for signs in 0..(1usize << rows.saturating_sub(1)) {
            let row_signs: Vec<f64> = (0..rows)
                .map(|x| if x > 0 && signs >> (x - 1) & 1 == 1 { -1.0 } else { 1.0 })
                .collect();
            if let Some((col_perm, col_signs)) =
                match_columns(target, source, p, &row_signs, scale, tol, cols)
            {
                found = Some(SignedPermutation {
                    scale,
                    row_perm: p.to_vec(),
                    row_signs,
                    col_perm,
                    col_signs,
                });
                return true;
            }
        }
        false
    });
    found
}

fn match_columns(
    target: &Matrix,
    source: &Matrix,
    row_perm: &[usize],
    row_signs: &[f64],
    scale: f64,
    tol: f64,
    cols: usize,
) -> Option<(Vec<usize>, Vec<f64>)> {
    let mut used = vec![false; cols];
    let mut col_perm = Vec::with_capacity(cols);
    let mut col_signs = Vec::with_capacity(cols);
    for y in 0..cols {
        let hit = (0..cols).filter(|&j| !used[j]).find_map(|j| {
            [1.0, -1.0].into_iter().find_map(|s| {
                let ok = (0..target.rows()).all(|x| {
                    let want = target.get(x, y);
                    let got = scale * s * row_signs[x] * source.get(row_perm[x], j);
                    (want - got).abs() <= tol
                });
                ok.then_some((j, s))
            })
        })?;
        used[hit.0] = true;
        col_perm.push(hit.0);
        col_signs.push(hit.1);
    }
    Some((col_perm, col_signs))
}

/// Heap-style recursive permutation walk; stops once `visit` returns true.
fn permutations(p: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if k == p.len() {
        return visit(p);
    }
    for i in k..p.len() {
        p.swap(k, i);
        if permutations(p, k + 1, visit) {
            return true;
        }
        p.swap(k, i);
    }
    false
}

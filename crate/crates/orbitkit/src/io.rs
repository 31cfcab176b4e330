//! On-disk JSON formats: structure-constant tables for algebras and Gram
//! matrices for scalar products.
//!
//! An algebra file looks like
//!
//! ```json
//! {
//!   "name": "su2",
//!   "dim": 3,
//!   "basis": ["e1", "e2", "e3"],
//!   "c": [[0, 1, 2, 1.0], [0, 2, 1, -1.0], [1, 2, 0, 1.0]]
//! }
//! ```
//!
//! Each row of `c` is `[i, j, k, value]` with `i < j`; the lower triangle is
//! filled in by antisymmetry on load. Writing and re-reading a table
//! reproduces every constant bit for bit.
//!
//! A product file carries a dense symmetric Gram matrix:
//!
//! ```json
//! {"gram": [[2.0, 0.0], [0.0, 2.0]]}
//! ```

use std::collections::BTreeSet;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::jsonfmt;
use crate::products::ScalarProduct;

#[derive(Deserialize)]
struct AlgebraFile {
    name: String,
    dim: usize,
    basis: Vec<String>,
    c: Vec<(usize, usize, usize, f64)>,
}

#[derive(Deserialize)]
struct ProductFile {
    gram: Vec<Vec<f64>>,
}

/// Parses an algebra from JSON text, enforcing the upper-triangle convention
/// and the construction-time antisymmetry and Jacobi checks.
pub fn algebra_from_str(text: &str) -> Result<LieAlgebra<f64>> {
    let file: AlgebraFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.basis.len() != file.dim {
        return Err(Error::DimensionMismatch {
            expected: file.dim,
            got: file.basis.len(),
        });
    }
    let n = file.dim;
    let mut seen = BTreeSet::new();
    let mut c = vec![vec![vec![0.0f64; n]; n]; n];
    for &(i, j, k, v) in &file.c {
        if i >= j {
            return Err(Error::Parse(format!(
                "structure constant row ({i}, {j}, {k}) must have i < j"
            )));
        }
        if j >= n || k >= n {
            return Err(Error::Parse(format!(
                "structure constant row ({i}, {j}, {k}) indexes outside dimension {n}"
            )));
        }
        if !seen.insert((i, j, k)) {
            return Err(Error::Parse(format!(
                "duplicate structure constant row ({i}, {j}, {k})"
            )));
        }
        if !v.is_finite() {
            return Err(Error::Parse(format!(
                "structure constant at ({i}, {j}, {k}) is not finite"
            )));
        }
        c[i][j][k] = v;
        c[j][i][k] = -v;
    }
    LieAlgebra::new(Some(&file.name), file.basis, c)
}

/// Reads an algebra file from disk.
pub fn load_algebra(path: impl AsRef<Path>) -> Result<LieAlgebra<f64>> {
    let text = std::fs::read_to_string(path)?;
    algebra_from_str(&text)
}

/// Serializes an algebra to the upper-triangle JSON format. Exact zeros are
/// omitted and rows are sorted by `(i, j, k)`.
pub fn algebra_to_value(alg: &LieAlgebra<f64>) -> Value {
    let n = alg.dim();
    let mut rows = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                let v = alg.structure_constant(i, j, k);
                if v != 0.0 {
                    rows.push(Value::Array(vec![
                        json!(i),
                        json!(j),
                        json!(k),
                        jsonfmt::float(v),
                    ]));
                }
            }
        }
    }
    json!({
        "name": alg.name().unwrap_or("unnamed"),
        "dim": n,
        "basis": alg.basis_labels(),
        "c": Value::Array(rows),
    })
}

pub fn algebra_to_string(alg: &LieAlgebra<f64>) -> String {
    jsonfmt::to_json_string(&algebra_to_value(alg))
}

/// Writes an algebra file to disk.
pub fn save_algebra(alg: &LieAlgebra<f64>, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, algebra_to_string(alg))?;
    Ok(())
}

/// Parses a scalar product for `alg` from JSON text holding a Gram matrix.
pub fn product_from_str(alg: &LieAlgebra<f64>, text: &str) -> Result<ScalarProduct<f64>> {
    let file: ProductFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let n = file.gram.len();
    if n != alg.dim() {
        return Err(Error::DimensionMismatch {
            expected: alg.dim(),
            got: n,
        });
    }
    for row in &file.gram {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: row.len(),
            });
        }
    }
    let gram = DMatrix::from_fn(n, n, |i, j| file.gram[i][j]);
    ScalarProduct::from_gram(alg, gram)
}

/// Reads a product file from disk.
pub fn load_product(alg: &LieAlgebra<f64>, path: impl AsRef<Path>) -> Result<ScalarProduct<f64>> {
    let text = std::fs::read_to_string(path)?;
    product_from_str(alg, &text)
}

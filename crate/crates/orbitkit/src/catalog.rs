//! Built-in structure-constant tables for the classical small algebras used
//! throughout the tests and the command line tool.

use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::{real, Real};

/// Names accepted by [`load`]. `abelian(n)` stands for the family of
/// commutative algebras of any dimension `n >= 1`.
pub fn names() -> Vec<&'static str> {
    vec![
        "su2",
        "so3",
        "su3",
        "sl2r",
        "heisenberg3",
        "sl2c_real",
        "abelian(n)",
    ]
}

fn zero_table<T: Real>(n: usize) -> Vec<Vec<Vec<T>>> {
    vec![vec![vec![T::zero(); n]; n]; n]
}

/// Sets `c[i][j][k] = v` together with its antisymmetric mirror.
fn set<T: Real>(c: &mut [Vec<Vec<T>>], i: usize, j: usize, k: usize, v: f64) {
    let value: T = real(v);
    c[i][j][k] = value;
    c[j][i][k] = -value;
}

/// Expands one representative of a totally antisymmetric constant over its
/// cyclic images; [`set`] supplies the odd permutations.
fn set_cyclic<T: Real>(c: &mut [Vec<Vec<T>>], a: usize, b: usize, k: usize, v: f64) {
    set(c, a, b, k, v);
    set(c, b, k, a, v);
    set(c, k, a, b, v);
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn cross_product_table<T: Real>() -> Vec<Vec<Vec<T>>> {
    let mut c = zero_table(3);
    set_cyclic(&mut c, 0, 1, 2, 1.0);
    c
}

fn su2<T: Real>() -> Result<LieAlgebra<T>> {
    build("su2", labels(&["e1", "e2", "e3"]), cross_product_table())
}

fn so3<T: Real>() -> Result<LieAlgebra<T>> {
    build("so3", labels(&["L1", "L2", "L3"]), cross_product_table())
}

fn su3<T: Real>() -> Result<LieAlgebra<T>> {
    let mut c = zero_table(8);
    let h = 0.5;
    let r = 3.0_f64.sqrt() / 2.0;
    // Totally antisymmetric constants of the Gell-Mann basis, one
    // representative per orbit, zero-indexed.
    for &(a, b, k, v) in &[
        (0, 1, 2, 1.0),
        (0, 3, 6, h),
        (0, 4, 5, -h),
        (1, 3, 5, h),
        (1, 4, 6, h),
        (2, 3, 4, h),
        (2, 5, 6, -h),
        (3, 4, 7, r),
        (5, 6, 7, r),
    ] {
        set_cyclic(&mut c, a, b, k, v);
    }
    build(
        "su3",
        labels(&["t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8"]),
        c,
    )
}

fn sl2r<T: Real>() -> Result<LieAlgebra<T>> {
    let mut c = zero_table(3);
    set(&mut c, 0, 1, 1, 2.0); // [h, e] = 2e
    set(&mut c, 0, 2, 2, -2.0); // [h, f] = -2f
    set(&mut c, 1, 2, 0, 1.0); // [e, f] = h
    build("sl2r", labels(&["h", "e", "f"]), c)
}

fn heisenberg3<T: Real>() -> Result<LieAlgebra<T>> {
    let mut c = zero_table(3);
    set(&mut c, 0, 1, 2, 1.0); // [X, Y] = Z
    build("heisenberg3", labels(&["X", "Y", "Z"]), c)
}

/// sl(2, C) viewed as a six-dimensional real algebra. The basis doubles the
/// complex basis `h, e, f` with its multiples by `i`; a complex constant
/// `[x, y] = v z` contributes four real entries with `[ix, iy] = -v z`.
fn sl2c_real<T: Real>() -> Result<LieAlgebra<T>> {
    let mut c = zero_table(6);
    for &(a, b, k, v) in &[(0usize, 1usize, 1usize, 2.0), (0, 2, 2, -2.0), (1, 2, 0, 1.0)] {
        set(&mut c, a, b, k, v);
        set(&mut c, a, b + 3, k + 3, v);
        set(&mut c, a + 3, b, k + 3, v);
        set(&mut c, a + 3, b + 3, k, -v);
    }
    build("sl2c_real", labels(&["h", "e", "f", "ih", "ie", "if"]), c)
}

fn abelian<T: Real>(n: usize) -> Result<LieAlgebra<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "abelian dimension must be at least 1".into(),
        ));
    }
    let labs = (1..=n).map(|i| format!("a{i}")).collect();
    build(&format!("abelian({n})"), labs, zero_table(n))
}

fn build<T: Real>(
    name: &str,
    labels: Vec<String>,
    c: Vec<Vec<Vec<T>>>,
) -> Result<LieAlgebra<T>> {
    // Catalog tables are exact up to rounding the constants themselves into
    // the scalar type, so the Jacobi gate scales with machine epsilon rather
    // than using the fixed default aimed at hand-entered tables.
    let tol = T::default_epsilon() * real(1000.0);
    LieAlgebra::with_jacobi_tolerance(Some(name), labels, c, Some(tol))
}

/// Loads a catalog algebra by name, e.g. `"su2"` or `"abelian(4)"`.
pub fn load<T: Real>(name: &str) -> Result<LieAlgebra<T>> {
    match name {
        "su2" => su2(),
        "so3" => so3(),
        "su3" => su3(),
        "sl2r" => sl2r(),
        "heisenberg3" => heisenberg3(),
        "sl2c_real" => sl2c_real(),
        _ => {
            if let Some(inner) = name
                .strip_prefix("abelian(")
                .and_then(|rest| rest.strip_suffix(')'))
            {
                if let Ok(n) = inner.trim().parse::<usize>() {
                    return abelian(n);
                }
            }
            Err(Error::UnknownAlgebra(name.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_catalog_entry_loads_with_expected_dimension() {
        for (name, dim) in [
            ("su2", 3),
            ("so3", 3),
            ("su3", 8),
            ("sl2r", 3),
            ("heisenberg3", 3),
            ("sl2c_real", 6),
            ("abelian(4)", 4),
        ] {
            let alg = load::<f64>(name).unwrap();
            assert_eq!(alg.dim(), dim, "{name}");
            assert_eq!(alg.basis_labels().len(), dim, "{name}");
        }
    }

    #[test]
    fn so3_and_su2_share_the_cross_product_table() {
        let a = load::<f64>("su2").unwrap();
        let b = load::<f64>("so3").unwrap();
        assert_eq!(a.structure_constants(), b.structure_constants());
    }

    #[test]
    fn su3_representative_constants() {
        let alg = load::<f64>("su3").unwrap();
        assert_eq!(alg.structure_constant(0, 1, 2), 1.0);
        assert_eq!(alg.structure_constant(1, 0, 2), -1.0);
        assert_eq!(alg.structure_constant(0, 3, 6), 0.5);
        assert_eq!(alg.structure_constant(3, 4, 7), 3.0_f64.sqrt() / 2.0);
        // cyclic image of a representative
        assert_eq!(alg.structure_constant(4, 7, 3), 3.0_f64.sqrt() / 2.0);
    }

    #[test]
    fn sl2c_real_doubles_the_complex_table() {
        let alg = load::<f64>("sl2c_real").unwrap();
        assert_eq!(alg.structure_constant(0, 1, 1), 2.0); // [h, e] = 2e
        assert_eq!(alg.structure_constant(0, 4, 4), 2.0); // [h, ie] = 2ie
        assert_eq!(alg.structure_constant(3, 1, 4), 2.0); // [ih, e] = 2ie
        assert_eq!(alg.structure_constant(3, 4, 1), -2.0); // [ih, ie] = -2e
        assert_eq!(alg.structure_constant(4, 5, 0), -1.0); // [ie, if] = -h
    }

    #[test]
    fn abelian_brackets_vanish() {
        let alg = load::<f64>("abelian(5)").unwrap();
        assert_eq!(alg.dim(), 5);
        let x = alg.basis_element(0);
        let y = alg.basis_element(4);
        assert!(alg.bracket(&x, &y).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn unknown_names_are_rejected() {
        for bad in ["su17", "abelian", "abelian()", "abelian(x)", ""] {
            assert!(matches!(
                load::<f64>(bad),
                Err(Error::UnknownAlgebra(_)) | Err(Error::InvalidArgument(_))
            ));
        }
        assert!(matches!(
            load::<f64>("abelian(0)"),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn catalog_loads_in_single_precision() {
        for name in ["su2", "su3", "sl2c_real"] {
            assert!(load::<f32>(name).is_ok(), "{name}");
        }
    }
}

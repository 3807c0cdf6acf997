#![allow(dead_code)]

use hypertuple_core::algebra::{close_algebra, CharacterTable, CommutativeAlgebra};
use hypertuple_core::numkit::{
    mat_inverse, nullspace_basis, random_matrix, random_scalar, Field, IncrementalBasis, Matrix, Tolerance, C64,
    ONE, ZERO,
};
use rand::Rng;

/// `S·D·S⁻¹` where `D` may contain one 2×2 Jordan block; otherwise a plain
/// random matrix. Generic draws are nonderogatory.
pub fn random_nonderogatory<R: Rng>(field: Field, n: usize, rng: &mut R) -> Matrix {
    let tol = Tolerance::default();
    if n < 2 || rng.gen_bool(0.5) {
        return random_matrix(field, n, rng);
    }
    loop {
        let s = random_matrix(field, n, rng);
        let Ok(s_inv) = mat_inverse(&s, &tol) else { continue };
        if s.max_abs() * s_inv.max_abs() > 50.0 {
            continue;
        }
        let mut d = Matrix::zeros(field, n);
        let lambda = random_scalar(field, rng);
        d[(0, 0)] = lambda;
        d[(1, 1)] = lambda;
        d[(0, 1)] = ONE;
        for i in 2..n {
            d[(i, i)] = lambda + C64::new(0.5 + i as f64 * 0.4, 0.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        }
        return &(&s * &d) * &s_inv;
    }
}

/// Commuting pair `(M, M² − c·M)` for a random nonderogatory `M`; its
/// algebra is cyclic of dimension `n`.
pub fn random_cyclic_tuple<R: Rng>(field: Field, n: usize, rng: &mut R) -> Vec<Matrix> {
    let m = random_nonderogatory(field, n, rng);
    let c = random_scalar(field, rng);
    let second = &(&m * &m) - &m.scale(c);
    vec![m, second]
}

pub fn random_cyclic_algebra<R: Rng>(field: Field, n: usize, rng: &mut R) -> CommutativeAlgebra {
    let tol = Tolerance::default();
    loop {
        let tuple = random_cyclic_tuple(field, n, rng);
        if let Ok(alg) = close_algebra(field, n, &tuple, &tol) {
            if alg.dim() == n {
                return alg;
            }
        }
    }
}

/// Spectral projector onto the generalized eigenspace of `a` at `lambda`
/// with algebraic multiplicity `mult`, along the sum of the others.
///
/// Built from `ker (a − λ)^mult` and `range (a − λ)^mult`; independent of
/// any contour integral.
pub fn generalized_eigenprojector(a: &Matrix, lambda: C64, mult: usize) -> Matrix {
    let n = a.n();
    if mult == n {
        return Matrix::identity(Field::Complex, n);
    }
    let shifted = &a.complexified() - &Matrix::identity(Field::Complex, n).scale(lambda);
    let power = shifted.powi(mult as u32);
    let rows: Vec<Vec<C64>> = (0..n).map(|i| (0..n).map(|j| power[(i, j)]).collect()).collect();
    let tight = Tolerance {
        rank_tol: 1e-10,
        ..Tolerance::default()
    };
    let kernel = nullspace_basis(&rows, n, &tight).unwrap();
    assert_eq!(kernel.len(), mult, "generalized eigenspace has unexpected dimension; sv {:?}", hypertuple_core::numkit::singular_values(&rows));
    let mut span = IncrementalBasis::new();
    let mut cols: Vec<Vec<C64>> = Vec::new();
    for v in &kernel {
        assert!(span.try_push(v, 1e-8));
        cols.push(v.clone());
    }
    for j in 0..n {
        let c = power.column(j);
        if cols.len() == n {
            break;
        }
        if span.try_push(&c, 1e-6) {
            cols.push(c);
        }
    }
    assert_eq!(cols.len(), n, "kernel and range do not span");
    let mut v = Matrix::zeros(Field::Complex, n);
    for (j, c) in cols.iter().enumerate() {
        for i in 0..n {
            v[(i, j)] = c[i];
        }
    }
    let v_inv = mat_inverse(&v, &Tolerance::default()).unwrap();
    let mut sel = Matrix::zeros(Field::Complex, n);
    for k in 0..mult {
        sel[(k, k)] = ONE;
    }
    &(&v * &sel) * &v_inv
}

/// Characters evaluated on an algebra element given by coefficients.
pub fn values_on(table: &CharacterTable, coeffs: &[C64]) -> Vec<C64> {
    table
        .characters
        .iter()
        .map(|c| c.values.iter().zip(coeffs).map(|(v, x)| v * x).sum())
        .collect()
}

pub fn random_element<R: Rng>(alg: &CommutativeAlgebra, field: Field, rng: &mut R) -> (Vec<C64>, Matrix) {
    let coeffs = alg.random_coeffs(field, rng);
    let m = alg.element(&coeffs);
    (coeffs, m)
}

pub fn zero_vec(n: usize) -> Vec<C64> {
    vec![ZERO; n]
}

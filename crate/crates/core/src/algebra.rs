//! Unital commutative matrix algebras: closure of a commuting tuple,
//! commutant, cyclic vectors, characters and spectral idempotents.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{
    eigenvalues, mat_inverse, nullspace_basis, numerical_rank, random_scalar, random_vector,
    Field, IncrementalBasis, Matrix, Tolerance, C64, ZERO,
};

/// Quadrature nodes on each resolvent contour.
pub const CONTOUR_NODES: usize = 64;
/// Random probe elements tried before giving up on character separation.
pub const CHARACTER_ATTEMPTS: usize = 8;
/// Acceptance threshold for the idempotent axioms.
pub const IDEMPOTENT_TOL: f64 = 1e-7;
/// Relative residual allowed when reconstructing products from structure constants.
pub const STRUCTURE_TOL: f64 = 1e-8;

/// The unital subalgebra of L(𝕂ⁿ) generated by a commuting tuple.
#[derive(Debug, Clone)]
pub struct CommutativeAlgebra {
    field: Field,
    n: usize,
    basis: Vec<Matrix>,
    /// `basis[i]·basis[j] = Σ_k structure[i][j][k]·basis[k]`
    structure: Vec<Vec<Vec<C64>>>,
    generators: Vec<Matrix>,
    span: IncrementalBasis,
    tol: Tolerance,
}

fn check_commuting(tuple: &[Matrix], eq_tol: f64) -> Result<()> {
    for i in 0..tuple.len() {
        for j in (i + 1)..tuple.len() {
            let norm = tuple[i].commutator(&tuple[j]).max_abs();
            let scale = (tuple[i].max_abs() * tuple[j].max_abs()).max(1.0);
            if norm > eq_tol * scale {
                return Err(Error::NonCommuting { i, j, norm });
            }
        }
    }
    Ok(())
}

/// Closes `{I} ∪ tuple` under multiplication.
///
/// Products of basis pairs are appended whenever they are independent of the
/// current span (relative residual above `rank_tol`) until a full pass adds
/// nothing.
pub fn close_algebra(field: Field, n: usize, tuple: &[Matrix], tol: &Tolerance) -> Result<CommutativeAlgebra> {
    tol.validate()?;
    if n == 0 {
        return Err(Error::InvalidInput("ambient dimension must be positive".into()));
    }
    for m in tuple {
        if m.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.n(),
            });
        }
        if m.field() != field {
            return Err(Error::FieldMismatch(field, m.field()));
        }
        if !m.is_finite() {
            return Err(Error::InvalidInput("tuple contains non-finite entries".into()));
        }
    }
    check_commuting(tuple, tol.eq_tol)?;

    let mut span = IncrementalBasis::new();
    let mut basis = Vec::new();
    let identity = Matrix::identity(field, n);
    span.try_push(identity.data(), tol.rank_tol);
    basis.push(identity);
    for g in tuple {
        if span.try_push(g.data(), tol.rank_tol) {
            basis.push(g.clone());
        }
    }
    loop {
        let before = basis.len();
        let len = basis.len();
        for i in 1..len {
            for j in i..len {
                let prod = &basis[i] * &basis[j];
                if span.try_push(prod.data(), tol.rank_tol) {
                    basis.push(prod);
                    if basis.len() > n * n {
                        return Err(Error::NumericalFailure(
                            "algebra closure exceeded n² elements".into(),
                        ));
                    }
                }
            }
        }
        if basis.len() == before {
            break;
        }
    }

    let d = basis.len();
    let mut structure = vec![vec![Vec::new(); d]; d];
    for i in 0..d {
        for j in 0..d {
            let prod = &basis[i] * &basis[j];
            let (coords, resid) = span.coordinates(prod.data());
            if resid > STRUCTURE_TOL {
                return Err(Error::NumericalFailure(format!(
                    "structure constant residual {resid:.3e} for pair ({i},{j})"
                )));
            }
            structure[i][j] = coords;
        }
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let norm = basis[i].commutator(&basis[j]).max_abs();
            let scale = (basis[i].max_abs() * basis[j].max_abs()).max(1.0);
            if norm > tol.eq_tol * scale {
                return Err(Error::NonCommuting { i, j, norm });
            }
        }
    }

    Ok(CommutativeAlgebra {
        field,
        n,
        basis,
        structure,
        generators: tuple.to_vec(),
        span,
        tol: *tol,
    })
}

impl CommutativeAlgebra {
    pub fn field(&self) -> Field {
        self.field
    }

    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Algebra dimension.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    pub fn structure(&self) -> &[Vec<Vec<C64>>] {
        &self.structure
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    pub fn tolerance(&self) -> &Tolerance {
        &self.tol
    }

    /// An orthonormal basis of the algebra (Frobenius inner product), as
    /// matrices; same span as [`Self::basis`].
    pub fn orthonormal_basis(&self) -> Vec<Matrix> {
        self.span
            .orthonormal()
            .iter()
            .map(|v| Matrix::from_vec(Field::Complex, self.n, v.clone()).expect("n² entries"))
            .collect()
    }

    /// Multiplication by `m` in orthonormal coordinates: entry `(i, j)` is
    /// `⟨oᵢ, m·oⱼ⟩`. Similar to the regular representation.
    fn orthonormal_representation(&self, m: &Matrix, ortho: &[Matrix]) -> Matrix {
        let d = ortho.len();
        let mut out = Matrix::zeros(Field::Complex, d);
        for (j, o) in ortho.iter().enumerate() {
            let col = self.span.ortho_coordinates((m * o).data());
            for (i, v) in col.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }

    /// Coordinates of `m` in the basis and the relative projection residual.
    pub fn coordinates(&self, m: &Matrix) -> (Vec<C64>, f64) {
        self.span.coordinates(m.data())
    }

    pub fn contains(&self, m: &Matrix, rel_tol: f64) -> bool {
        m.n() == self.n && self.coordinates(m).1 <= rel_tol
    }

    /// Coordinates of `m`, or `NotInAlgebra` if its relative projection
    /// residual exceeds `rel_tol`.
    pub fn coordinates_checked(&self, m: &Matrix, rel_tol: f64) -> Result<Vec<C64>> {
        if m.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: m.n(),
            });
        }
        let (c, residual) = self.coordinates(m);
        if residual > rel_tol {
            return Err(Error::NotInAlgebra { residual });
        }
        Ok(c)
    }

    /// `Σ coeffs[i]·basis[i]`.
    pub fn element(&self, coeffs: &[C64]) -> Matrix {
        assert_eq!(coeffs.len(), self.dim(), "coefficient count mismatch");
        let mut acc = Matrix::zeros(self.field, self.n);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            acc = &acc + &b.scale(*c);
        }
        acc
    }

    /// A random element with coefficients uniform in [−1,1] over `field`.
    pub fn random_coeffs<R: rand::Rng + ?Sized>(&self, field: Field, rng: &mut R) -> Vec<C64> {
        (0..self.dim()).map(|_| random_scalar(field, rng)).collect()
    }

    /// Whether `{b·x : b ∈ basis}` spans 𝕂ⁿ.
    pub fn is_cyclic_vector(&self, x: &[C64]) -> bool {
        if x.len() != self.n || self.dim() < self.n {
            return false;
        }
        let images: Vec<Vec<C64>> = self.basis.iter().map(|b| b.matvec(x)).collect();
        numerical_rank(&images, &self.tol) == self.n
    }
}

/// Basis of the commutant `{S : S·b = b·S for every basis element b}`.
pub fn commutant(alg: &CommutativeAlgebra) -> Result<Vec<Matrix>> {
    let n = alg.n;
    let mut rows = Vec::new();
    for g in alg.basis.iter().skip(1) {
        // (S g − g S)[r][c] = Σ_k S[r][k] g[k][c] − g[r][k] S[k][c]
        for r in 0..n {
            for c in 0..n {
                let mut row = vec![ZERO; n * n];
                for k in 0..n {
                    row[r * n + k] += g[(k, c)];
                    row[k * n + c] -= g[(r, k)];
                }
                rows.push(row);
            }
        }
    }
    let null = nullspace_basis(&rows, n * n, &alg.tol)?;
    null.into_iter()
        .map(|v| {
            let m = Matrix::from_vec(Field::Complex, n, v)?;
            match alg.field {
                Field::Real => m.realified(0.0),
                Field::Complex => Ok(m),
            }
        })
        .collect()
}

/// Draws up to `attempts` seeded random vectors and returns the first cyclic one.
///
/// `None` is certain when `dim < n`; otherwise it is a probabilistic verdict.
pub fn find_cyclic_vector(alg: &CommutativeAlgebra, attempts: usize, seed: u64) -> Option<Vec<C64>> {
    if alg.dim() < alg.n {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..attempts)
        .map(|_| random_vector(alg.field, alg.n, &mut rng))
        .find(|x| alg.is_cyclic_vector(x))
}

/// Matrix of `x ↦ a·x` on the algebra, in basis coordinates, for
/// `a = Σ coeffs[i]·basis[i]`.
pub fn regular_representation(alg: &CommutativeAlgebra, coeffs: &[C64]) -> Result<Matrix> {
    let d = alg.dim();
    if coeffs.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: coeffs.len(),
        });
    }
    let field = if alg.field == Field::Real && coeffs.iter().all(|c| c.im == 0.0) {
        Field::Real
    } else {
        Field::Complex
    };
    let mut m = Matrix::zeros(field, d);
    for (i, &c) in coeffs.iter().enumerate() {
        if c == ZERO {
            continue;
        }
        for j in 0..d {
            for k in 0..d {
                m[(k, j)] += c * alg.structure[i][j][k];
            }
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CharacterKind {
    RealValued,
    ComplexPairMember,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Character {
    /// Values on the basis elements.
    pub values: Vec<C64>,
    /// Only set for real algebras.
    pub kind: Option<CharacterKind>,
    /// Index of the conjugate character, for complex-valued characters of a
    /// real algebra.
    pub partner: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct CharacterTable {
    pub field: Field,
    pub characters: Vec<Character>,
    /// Number of characters (of the complexification, for real algebras).
    pub kappa: usize,
    /// Conjugate pairs (real algebras only).
    pub kappa0: Option<usize>,
    /// Real-valued characters (real algebras only).
    pub kappa1: Option<usize>,
    /// Spectral idempotents `p_χ`, aligned with `characters`.
    pub idempotents: Vec<Matrix>,
    /// Worst violation of `p² = p`, `p_χ p_φ = 0`, `Σ p = I`.
    pub idempotent_residual: f64,
    /// Probe element coefficients that separated the characters.
    pub probe: Vec<C64>,
}

impl CharacterTable {
    pub fn len(&self) -> usize {
        self.characters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.characters.is_empty()
    }

    /// Indices of real-valued characters, in table order.
    pub fn real_indices(&self) -> Vec<usize> {
        self.characters
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind == Some(CharacterKind::RealValued))
            .map(|(i, _)| i)
            .collect()
    }

    /// `(representative, partner)` for each conjugate pair.
    pub fn conjugate_pairs(&self) -> Vec<(usize, usize)> {
        self.characters
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.partner.filter(|&j| j > i).map(|j| (i, j)))
            .collect()
    }
}

/// `χ(Σ coeffs[i]·basis[i]) = Σ coeffs[i]·χ(basis[i])`.
pub fn character_value(table: &CharacterTable, chi_index: usize, coeffs: &[C64]) -> Result<C64> {
    let chi = table.characters.get(chi_index).ok_or(Error::IndexOutOfRange {
        index: chi_index,
        len: table.characters.len(),
    })?;
    if coeffs.len() != chi.values.len() {
        return Err(Error::DimensionMismatch {
            expected: chi.values.len(),
            found: coeffs.len(),
        });
    }
    Ok(coeffs.iter().zip(&chi.values).map(|(c, v)| c * v).sum())
}

/// Riesz projector `(1/2πi)∮(ζ − a)⁻¹ dζ` over the circle of `radius` about
/// `center`, by the trapezoid rule with `nodes` points.
pub fn riesz_projector(a: &Matrix, center: C64, radius: f64, nodes: usize, tol: &Tolerance) -> Result<Matrix> {
    let n = a.n();
    let mut acc = Matrix::zeros(Field::Complex, n);
    for k in 0..nodes {
        let theta = 2.0 * PI * (k as f64 + 0.5) / nodes as f64;
        let w = C64::from_polar(radius, theta);
        let zeta = center + w;
        let shifted = &Matrix::identity(Field::Complex, n).scale(zeta) - a;
        let res = mat_inverse(&shifted, tol)?;
        acc = &acc + &res.scale(w);
    }
    Ok(acc.scale_real(1.0 / nodes as f64))
}

/// Single-linkage clusters of `points` within `radius`; returns member lists.
fn single_linkage(points: &[C64], radius: f64) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..points.len()).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = i;
        while parent[c] != r {
            let next = parent[c];
            parent[c] = r;
            c = next;
        }
        r
    }
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if (points[i] - points[j]).norm() <= radius {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_index = vec![usize::MAX; points.len()];
    for i in 0..points.len() {
        let r = find(&mut parent, i);
        if root_index[r] == usize::MAX {
            root_index[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_index[r]].push(i);
    }
    groups
}

/// Worst violation of the idempotent axioms for `ps` in dimension `n`.
pub fn idempotent_residual(ps: &[Matrix], n: usize) -> f64 {
    let mut worst = 0.0f64;
    let mut sum = Matrix::zeros(Field::Complex, n);
    for (i, p) in ps.iter().enumerate() {
        worst = worst.max((p * p).dist_max(p));
        for q in ps.iter().skip(i + 1) {
            worst = worst.max((p * q).max_abs());
            worst = worst.max((q * p).max_abs());
        }
        sum = &sum + p;
    }
    worst.max(sum.dist_max(&Matrix::identity(Field::Complex, n)))
}

struct Separation {
    values: Vec<Vec<C64>>,
    idempotents: Vec<Matrix>,
    residual: f64,
}

fn separate(alg: &CommutativeAlgebra, a: &Matrix, ortho: &[Matrix], tol: &Tolerance) -> Result<Separation> {
    let n = alg.n;
    let a = a.complexified();
    // The regular representation in an orthonormal basis: same spectrum and
    // traces, far better conditioned than the raw product basis.
    let reg = alg.orthonormal_representation(&a, ortho);
    let d = reg.n();
    let eig = eigenvalues(&reg)?;
    let clusters = single_linkage(&eig, tol.cluster_tol);
    let centers: Vec<C64> = clusters
        .iter()
        .map(|c| c.iter().map(|&i| eig[i]).sum::<C64>() / c.len() as f64)
        .collect();

    let mut idempotents = Vec::with_capacity(centers.len());
    let mut reg_projectors = Vec::with_capacity(centers.len());
    if centers.len() == 1 {
        idempotents.push(Matrix::identity(Field::Complex, n));
        reg_projectors.push(Matrix::identity(Field::Complex, d));
    } else {
        for (ci, &c) in centers.iter().enumerate() {
            let gap = centers
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != ci)
                .map(|(_, &o)| (o - c).norm())
                .fold(f64::INFINITY, f64::min);
            let radius = gap / 2.0;
            let spread = clusters[ci]
                .iter()
                .map(|&i| (eig[i] - c).norm())
                .fold(0.0, f64::max);
            if spread >= radius / 2.0 {
                return Ok(Separation {
                    values: Vec::new(),
                    idempotents: Vec::new(),
                    residual: f64::INFINITY,
                });
            }
            idempotents.push(riesz_projector(&a, c, radius, CONTOUR_NODES, tol)?);
            reg_projectors.push(riesz_projector(&reg, c, radius, CONTOUR_NODES, tol)?);
        }
    }

    let basis_reps: Vec<Matrix> = alg
        .basis
        .iter()
        .map(|b| alg.orthonormal_representation(b, ortho))
        .collect();
    let values = reg_projectors
        .iter()
        .map(|pi| {
            let tr = pi.trace();
            basis_reps.iter().map(|r| (r * pi).trace() / tr).collect()
        })
        .collect();
    let residual = idempotent_residual(&idempotents, n);
    Ok(Separation {
        values,
        idempotents,
        residual,
    })
}

fn conjugate_close(a: &[C64], b: &[C64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x.conj() - y).norm() <= tol)
}

/// Orders characters and pairs conjugates for a real algebra: conjugate pairs
/// first (representative then partner), then real-valued characters.
fn classify_real(sep: Separation, tol: &Tolerance) -> Option<(Vec<Character>, Vec<Matrix>, usize, usize)> {
    let k = sep.values.len();
    let is_real: Vec<bool> = sep
        .values
        .iter()
        .map(|v| v.iter().all(|z| z.im.abs() <= tol.cluster_tol))
        .collect();
    let mut used = vec![false; k];
    let mut order: Vec<(usize, Option<usize>)> = Vec::new();
    for i in 0..k {
        if used[i] || is_real[i] {
            continue;
        }
        let j = (0..k).find(|&j| {
            j != i && !used[j] && !is_real[j] && conjugate_close(&sep.values[i], &sep.values[j], tol.cluster_tol)
        })?;
        used[i] = true;
        used[j] = true;
        // representative: first non-real coordinate has positive imaginary part
        let first_im = sep.values[i]
            .iter()
            .find(|z| z.im.abs() > tol.cluster_tol)
            .map_or(0.0, |z| z.im);
        let (rep, other) = if first_im > 0.0 { (i, j) } else { (j, i) };
        order.push((rep, Some(other)));
    }
    let kappa0 = order.len();
    let mut chars = Vec::with_capacity(k);
    let mut ps = Vec::with_capacity(k);
    for &(rep, other) in &order {
        let other = other.expect("pair");
        let base = chars.len();
        chars.push(Character {
            values: sep.values[rep].clone(),
            kind: Some(CharacterKind::ComplexPairMember),
            partner: Some(base + 1),
        });
        chars.push(Character {
            values: sep.values[other].clone(),
            kind: Some(CharacterKind::ComplexPairMember),
            partner: Some(base),
        });
        ps.push(sep.idempotents[rep].clone());
        ps.push(sep.idempotents[other].clone());
    }
    let mut kappa1 = 0;
    for i in (0..k).filter(|&i| is_real[i]) {
        chars.push(Character {
            values: sep.values[i].iter().map(|z| C64::new(z.re, 0.0)).collect(),
            kind: Some(CharacterKind::RealValued),
            partner: None,
        });
        let p = &sep.idempotents[i];
        ps.push(p.realified(IDEMPOTENT_TOL).ok()?);
        kappa1 += 1;
    }
    Some((chars, ps, kappa0, kappa1))
}

/// Characters and spectral idempotents of `alg` (of its complexification
/// when the algebra is real).
///
/// A seeded random element separates the characters; its regular
/// representation's eigenvalue clusters give the character values on it, and
/// resolvent contour integrals give `p_χ` (ambient) and the regular-
/// representation projectors used to read off `χ(basis[i])` as normalized
/// traces. Up to [`CHARACTER_ATTEMPTS`] probes are tried.
pub fn compute_characters(alg: &CommutativeAlgebra, tol: &Tolerance, seed: u64) -> Result<CharacterTable> {
    tol.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_residual = f64::INFINITY;
    let ortho = alg.orthonormal_basis();
    for _ in 0..CHARACTER_ATTEMPTS {
        // random unit-scale element: coefficients drawn against the orthonormal basis
        let mut a = Matrix::zeros(Field::Complex, alg.n);
        for o in &ortho {
            a = &a + &o.scale(random_scalar(Field::Complex, &mut rng));
        }
        let probe = alg.coordinates(&a).0;
        // a probe whose contour meets the spectrum just counts as a miss
        let Ok(sep) = separate(alg, &a, &ortho, tol) else {
            continue;
        };
        best_residual = best_residual.min(sep.residual);
        if !(sep.residual <= IDEMPOTENT_TOL) {
            continue;
        }
        let residual = sep.residual;
        match alg.field {
            Field::Complex => {
                let mut order: Vec<usize> = (0..sep.values.len()).collect();
                order.sort_by(|&i, &j| {
                    let (a, b) = (&sep.values[i], &sep.values[j]);
                    a.iter()
                        .zip(b)
                        .map(|(x, y)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)))
                        .find(|o| o.is_ne())
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
                let characters: Vec<Character> = order
                    .iter()
                    .map(|&i| Character {
                        values: sep.values[i].clone(),
                        kind: None,
                        partner: None,
                    })
                    .collect();
                let idempotents = order.iter().map(|&i| sep.idempotents[i].clone()).collect();
                return Ok(CharacterTable {
                    field: Field::Complex,
                    kappa: characters.len(),
                    characters,
                    kappa0: None,
                    kappa1: None,
                    idempotents,
                    idempotent_residual: residual,
                    probe,
                });
            }
            Field::Real => {
                let Some((characters, idempotents, kappa0, kappa1)) = classify_real(sep, tol) else {
                    continue;
                };
                return Ok(CharacterTable {
                    field: Field::Real,
                    kappa: characters.len(),
                    characters,
                    kappa0: Some(kappa0),
                    kappa1: Some(kappa1),
                    idempotents,
                    idempotent_residual: residual,
                    probe,
                });
            }
        }
    }
    Err(Error::CharacterSeparationFailure {
        residual: best_residual,
    })
}

/// Values `χ(m)` for every character, with `m` required to lie in the algebra.
pub fn character_values_of(alg: &CommutativeAlgebra, table: &CharacterTable, m: &Matrix) -> Result<Vec<C64>> {
    let coeffs = alg.coordinates_checked(m, STRUCTURE_TOL)?;
    (0..table.len())
        .map(|i| character_value(table, i, &coeffs))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::ONE;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn az_generators(field: Field) -> Vec<Matrix> {
        let mut a2 = Matrix::zeros(field, 3);
        a2[(1, 0)] = ONE;
        let mut a3 = Matrix::zeros(field, 3);
        a3[(2, 0)] = ONE;
        vec![a2, a3]
    }

    fn az(field: Field, z: [f64; 3]) -> Matrix {
        Matrix::from_real_rows(&[&[z[0], 0.0, 0.0], &[z[1], z[0], 0.0], &[z[2], 0.0, z[0]]]).pipe(|m| {
            if field == Field::Complex {
                m.complexified()
            } else {
                m
            }
        })
    }

    trait Pipe: Sized {
        fn pipe<T>(self, f: impl FnOnce(Self) -> T) -> T {
            f(self)
        }
    }
    impl Pipe for Matrix {}

    #[test]
    fn closure_examples() {
        let d12 = Matrix::diag(Field::Complex, &[ONE, C64::new(2.0, 0.0)]);
        let alg = close_algebra(Field::Complex, 2, &[d12.clone()], &tol()).unwrap();
        assert_eq!(alg.dim(), 2);
        assert_eq!(alg.basis()[1], d12);

        let alg = close_algebra(Field::Complex, 3, &az_generators(Field::Complex), &tol()).unwrap();
        assert_eq!(alg.dim(), 3);

        let alg = close_algebra(Field::Real, 2, &[], &tol()).unwrap();
        assert_eq!(alg.dim(), 1);
        assert_eq!(alg.basis()[0], Matrix::identity(Field::Real, 2));
    }

    #[test]
    fn closure_rejects_noncommuting() {
        let a = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let b = Matrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]);
        match close_algebra(Field::Real, 2, &[a, b], &tol()) {
            Err(Error::NonCommuting { i: 0, j: 1, norm }) => assert!((norm - 1.0).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn commutant_examples() {
        let alg = close_algebra(Field::Complex, 2, &[], &tol()).unwrap();
        assert_eq!(commutant(&alg).unwrap().len(), 4);

        let alg = close_algebra(Field::Complex, 3, &az_generators(Field::Complex), &tol()).unwrap();
        let comm = commutant(&alg).unwrap();
        assert_eq!(comm.len(), 3);
        for s in &comm {
            assert!(alg.contains(s, 1e-8));
        }

        let d12 = Matrix::diag(Field::Complex, &[ONE, C64::new(2.0, 0.0)]);
        let alg = close_algebra(Field::Complex, 2, &[d12], &tol()).unwrap();
        assert_eq!(commutant(&alg).unwrap().len(), 2);
    }

    #[test]
    fn real_commutant_is_real() {
        let alg = close_algebra(Field::Real, 3, &az_generators(Field::Real), &tol()).unwrap();
        let comm = commutant(&alg).unwrap();
        assert_eq!(comm.len(), 3);
        assert!(comm.iter().all(|m| m.field() == Field::Real));
    }

    #[test]
    fn cyclic_vector_examples() {
        let alg = close_algebra(Field::Complex, 3, &az_generators(Field::Complex), &tol()).unwrap();
        assert!(find_cyclic_vector(&alg, 8, 1).is_some());
        assert!(alg.is_cyclic_vector(&[ONE, ZERO, ZERO]));
        assert!(!alg.is_cyclic_vector(&[ZERO, ONE, ZERO]));

        let scalar = close_algebra(Field::Complex, 2, &[], &tol()).unwrap();
        assert!(find_cyclic_vector(&scalar, 64, 1).is_none());

        let e = |i: usize| {
            let mut m = Matrix::zeros(Field::Complex, 3);
            m[(i, i)] = ONE;
            m
        };
        let diag = close_algebra(Field::Complex, 3, &[e(0), e(1)], &tol()).unwrap();
        assert_eq!(diag.dim(), 3);
        assert!(find_cyclic_vector(&diag, 8, 3).is_some());
        assert!(diag.is_cyclic_vector(&[ONE, ONE, ONE]));
    }

    #[test]
    fn regular_representation_examples() {
        let alg = close_algebra(Field::Complex, 3, &az_generators(Field::Complex), &tol()).unwrap();
        let id = regular_representation(&alg, &[ONE, ZERO, ZERO]).unwrap();
        assert!(id.approx_eq(&Matrix::identity(Field::Complex, 3), 1e-14));

        // A_(0,1,0) is nilpotent; so is its regular representation.
        let nil = regular_representation(&alg, &[ZERO, ONE, ZERO]).unwrap();
        assert!(nil.powi(3).max_abs() < 1e-14);
        assert!(nil.powi(2).max_abs() < 1e-14);
        for e in eigenvalues(&nil).unwrap() {
            assert!(e.norm() < 1e-6);
        }

        let d12 = Matrix::diag(Field::Complex, &[ONE, C64::new(2.0, 0.0)]);
        let alg = close_algebra(Field::Complex, 2, &[d12], &tol()).unwrap();
        let r = regular_representation(&alg, &[ZERO, ONE]).unwrap();
        let mut ev: Vec<f64> = eigenvalues(&r).unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] - 1.0).abs() < 1e-10 && (ev[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn characters_of_diagonal_algebra() {
        let e = |i: usize| {
            let mut m = Matrix::zeros(Field::Complex, 3);
            m[(i, i)] = ONE;
            m
        };
        let alg = close_algebra(Field::Complex, 3, &[e(0), e(1)], &tol()).unwrap();
        let table = compute_characters(&alg, &tol(), 5).unwrap();
        assert_eq!(table.kappa, 3);
        assert!(table.idempotent_residual <= 1e-7);
        let mut found = [false; 3];
        for p in &table.idempotents {
            let k = (0..3).find(|&k| p.approx_eq(&e(k), 1e-8)).expect("coordinate projection");
            found[k] = true;
        }
        assert!(found.iter().all(|&f| f));
    }

    #[test]
    fn characters_of_jordan_and_rotation() {
        let nil = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).complexified();
        let a0 = close_algebra(Field::Complex, 2, &[nil], &tol()).unwrap();
        let t = compute_characters(&a0, &tol(), 1).unwrap();
        assert_eq!(t.kappa, 1);
        assert!(t.idempotents[0].approx_eq(&Matrix::identity(Field::Complex, 2), 1e-10));

        let j = Matrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let a1 = close_algebra(Field::Real, 2, &[j], &tol()).unwrap();
        let t = compute_characters(&a1, &tol(), 1).unwrap();
        assert_eq!((t.kappa0, t.kappa1), (Some(1), Some(0)));
        assert_eq!(t.conjugate_pairs(), vec![(0, 1)]);
    }

    #[test]
    fn az_single_character() {
        for field in [Field::Complex, Field::Real] {
            let alg = close_algebra(field, 3, &az_generators(field), &tol()).unwrap();
            let t = compute_characters(&alg, &tol(), 9).unwrap();
            assert_eq!(t.len(), 1);
            let z = az(field, [2.0, 9.0, 4.0]);
            let v = character_values_of(&alg, &t, &z).unwrap();
            assert!((v[0] - C64::new(2.0, 0.0)).norm() < 1e-8);
            if field == Field::Real {
                assert_eq!((t.kappa0, t.kappa1), (Some(0), Some(1)));
            }
        }
    }

    #[test]
    fn character_value_examples() {
        let d = Matrix::diag(Field::Complex, &[C64::new(5.0, 0.0), C64::new(7.0, 0.0)]);
        let alg = close_algebra(Field::Complex, 2, &[d.clone()], &tol()).unwrap();
        let t = compute_characters(&alg, &tol(), 3).unwrap();
        let id = alg.coordinates(&Matrix::identity(Field::Complex, 2)).0;
        let coeffs = alg.coordinates(&d).0;
        let mut vals = Vec::new();
        for i in 0..t.len() {
            assert!((character_value(&t, i, &id).unwrap() - ONE).norm() < 1e-10);
            vals.push(character_value(&t, i, &coeffs).unwrap().re);
        }
        vals.sort_by(f64::total_cmp);
        assert!((vals[0] - 5.0).abs() < 1e-9 && (vals[1] - 7.0).abs() < 1e-9);
        assert!(matches!(character_value(&t, 5, &id), Err(Error::IndexOutOfRange { .. })));
    }
}

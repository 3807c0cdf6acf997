//! Minimal hypercyclic tuples inside cyclic commutative algebras, the
//! minimal-size formulas, and a gallery of named algebras.

use serde::{Deserialize, Serialize};

use crate::algebra::{close_algebra, find_cyclic_vector, CharacterTable, CommutativeAlgebra};
use crate::error::{Error, Result};
use crate::expmap::{alg_exp, ker_exp_generators, sign_group};
use crate::numkit::{mat_inverse, Field, Matrix, Tolerance, C64, I, ONE};
use crate::semigroup::{
    completing_generator, group_completing_generator, independent_reals, GroupElement, Scheme,
};

pub const SCHEMA_VERSION: u32 = 1;
/// Random vectors tried when checking that an algebra is cyclic.
pub const CYCLIC_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Construction {
    ComplexMinimal,
    RealMinimal,
    Gallery,
    User,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub algebra_id: String,
    pub construction: Construction,
    #[serde(default)]
    pub alpha_scheme: Option<Scheme>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl Default for Provenance {
    fn default() -> Self {
        Provenance {
            algebra_id: "user".into(),
            construction: Construction::User,
            alpha_scheme: None,
            seed: None,
        }
    }
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

/// An ordered commuting tuple of invertible operators with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleSpec {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub field: Field,
    pub n: usize,
    pub operators: Vec<Matrix>,
    #[serde(default)]
    pub provenance: Provenance,
    #[serde(default)]
    pub predicted_size: Option<usize>,
    /// A cyclic vector of the source algebra, hence a hypercyclic vector
    /// candidate for the tuple.
    #[serde(default)]
    pub cyclic_vector: Option<Vec<C64>>,
}

impl TupleSpec {
    pub fn user(field: Field, n: usize, operators: Vec<Matrix>) -> TupleSpec {
        TupleSpec {
            schema_version: SCHEMA_VERSION,
            field,
            n,
            operators,
            provenance: Provenance::default(),
            predicted_size: None,
            cyclic_vector: None,
        }
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// Shape and field checks for deserialized input.
    pub fn check_shape(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidInput(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        for m in &self.operators {
            if m.n() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    found: m.n(),
                });
            }
            if m.field() != self.field {
                return Err(Error::FieldMismatch(self.field, m.field()));
            }
        }
        Ok(())
    }

    /// Full invariant check: shape, pairwise commuting (relative to the
    /// operator norms), and invertibility of every member.
    pub fn validate(&self, tol: &Tolerance) -> Result<()> {
        self.check_shape()?;
        close_algebra(self.field, self.n, &self.operators, tol)?;
        for m in &self.operators {
            mat_inverse(m, tol)?;
        }
        Ok(())
    }

    /// Same tuple without operator `index`.
    pub fn without(&self, index: usize) -> Result<TupleSpec> {
        if index >= self.operators.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.operators.len(),
            });
        }
        let mut t = self.clone();
        t.operators.remove(index);
        t.predicted_size = None;
        Ok(t)
    }
}

/// Smallest size of a hypercyclic tuple on 𝕂ⁿ.
pub fn min_tuple_size(field: Field, n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    Ok(match field {
        Field::Complex => n + 1,
        Field::Real if n % 2 == 0 => n / 2 + 1,
        Field::Real => (n + 3) / 2,
    })
}

fn require_cyclic(alg: &CommutativeAlgebra, seed: u64) -> Result<Vec<C64>> {
    if alg.dim() != alg.n() {
        return Err(Error::NotCyclicAlgebra);
    }
    find_cyclic_vector(alg, CYCLIC_ATTEMPTS, seed).ok_or(Error::NotCyclicAlgebra)
}

/// Coordinates of `m` in the algebra basis, split into real and imaginary
/// parts: `[Re c₀, Im c₀, Re c₁, …]` for complex algebras, `[c₀, c₁, …]`
/// for real ones.
fn real_coordinates(alg: &CommutativeAlgebra, m: &Matrix) -> Result<Vec<f64>> {
    let c = alg.coordinates_checked(m, 1e-8)?;
    Ok(match alg.field() {
        Field::Complex => c.iter().flat_map(|z| [z.re, z.im]).collect(),
        Field::Real => c.iter().map(|z| z.re).collect(),
    })
}

fn from_real_coordinates(alg: &CommutativeAlgebra, x: &[f64]) -> Matrix {
    let coeffs: Vec<C64> = match alg.field() {
        Field::Complex => x.chunks(2).map(|p| C64::new(p[0], p[1])).collect(),
        Field::Real => x.iter().map(|&v| C64::new(v, 0.0)).collect(),
    };
    alg.element(&coeffs)
}

/// Extends `start` to a real basis of the algebra, scanning
/// `basis[0], i·basis[0], basis[1], …` (complex) or `basis[0], basis[1], …`
/// (real) and keeping each candidate that raises the real rank.
fn extend_to_real_basis(alg: &CommutativeAlgebra, start: Vec<Matrix>, tol: &Tolerance) -> Result<Vec<Matrix>> {
    let mut basis = crate::numkit::IncrementalBasis::new();
    let to_vec = |m: &Matrix| -> Result<Vec<C64>> {
        Ok(real_coordinates(alg, m)?.into_iter().map(|v| C64::new(v, 0.0)).collect())
    };
    let mut out = Vec::new();
    for m in start {
        if !basis.try_push(&to_vec(&m)?, tol.rank_tol) {
            return Err(Error::NumericalFailure("kernel generators are dependent".into()));
        }
        out.push(m);
    }
    // unit-norm candidates keep exp of the completing generator in range
    let mut candidates = Vec::new();
    for b in alg.basis() {
        let b = b.scale_real(1.0 / b.frobenius());
        candidates.push(b.clone());
        if alg.field() == Field::Complex {
            candidates.push(b.scale(I));
        }
    }
    for c in candidates {
        if basis.try_push(&to_vec(&c)?, tol.rank_tol) {
            out.push(c);
        }
    }
    let real_dim = match alg.field() {
        Field::Complex => 2 * alg.dim(),
        Field::Real => alg.dim(),
    };
    if out.len() != real_dim {
        return Err(Error::NumericalFailure("real basis extension fell short".into()));
    }
    Ok(out)
}

/// A hypercyclic `(2n − κ + 1)`-tuple in a cyclic complex algebra:
/// `exp` of the completing generator followed by `exp` of the basis
/// elements that extend the kernel generators.
pub fn build_tuple_complex(
    alg: &CommutativeAlgebra,
    table: &CharacterTable,
    scheme: Scheme,
    seed: u64,
) -> Result<TupleSpec> {
    if alg.field() != Field::Complex {
        return Err(Error::FieldMismatch(Field::Complex, alg.field()));
    }
    let x = require_cyclic(alg, seed)?;
    let n = alg.n();
    let tol = *alg.tolerance();
    let kernel = ker_exp_generators(alg, table)?;
    let k = kernel.len();
    let full = extend_to_real_basis(alg, kernel, &tol)?;
    let alpha = independent_reals(2 * n, scheme, None)?;
    let coords = full.iter().map(|b| real_coordinates(alg, b)).collect::<Result<Vec<_>>>()?;
    let b0 = from_real_coordinates(alg, &completing_generator(&coords, &alpha, &tol)?);

    let mut operators = vec![alg_exp(&b0)?];
    for b in &full[k..] {
        operators.push(alg_exp(b)?);
    }
    Ok(TupleSpec {
        schema_version: SCHEMA_VERSION,
        field: Field::Complex,
        n,
        predicted_size: Some(2 * n - table.kappa + 1),
        operators,
        provenance: Provenance {
            algebra_id: "custom".into(),
            construction: Construction::ComplexMinimal,
            alpha_scheme: Some(scheme),
            seed: Some(seed),
        },
        cyclic_vector: Some(x),
    })
}

/// A hypercyclic `(n − κ₀ + 1)`-tuple in a cyclic real algebra. Sign-group
/// generators multiply the lowest-index non-kernel factors.
pub fn build_tuple_real(
    alg: &CommutativeAlgebra,
    table: &CharacterTable,
    scheme: Scheme,
    seed: u64,
) -> Result<TupleSpec> {
    if alg.field() != Field::Real {
        return Err(Error::FieldMismatch(Field::Real, alg.field()));
    }
    let x = require_cyclic(alg, seed)?;
    let n = alg.n();
    let tol = *alg.tolerance();
    let kernel = ker_exp_generators(alg, table)?;
    let k = kernel.len();
    let signs = sign_group(alg, table)?;
    let m = signs.m;
    if 2 * k + m > n {
        return Err(Error::NumericalFailure(format!(
            "character counts violate 2κ₀+κ₁ ≤ n ({k}, {m}, {n})"
        )));
    }
    let full = extend_to_real_basis(alg, kernel, &tol)?;
    let group_gens: Vec<GroupElement> = (0..n)
        .map(|j| {
            if j >= k && j < k + m {
                GroupElement::unit(m, j - k)
            } else {
                GroupElement::identity(m)
            }
        })
        .collect();
    let alpha = independent_reals(n, scheme, None)?;
    let coords = full.iter().map(|b| real_coordinates(alg, b)).collect::<Result<Vec<_>>>()?;
    let (g0, x0) = group_completing_generator(&coords, &group_gens, &alpha, &tol)?;
    let b0 = from_real_coordinates(alg, &x0);

    let mut operators = vec![&signs.element(&g0, n) * &alg_exp(&b0)?];
    for (j, b) in full.iter().enumerate().skip(k) {
        operators.push(&signs.element(&group_gens[j], n) * &alg_exp(b)?);
    }
    let kappa0 = table.kappa0.unwrap_or(k);
    Ok(TupleSpec {
        schema_version: SCHEMA_VERSION,
        field: Field::Real,
        n,
        predicted_size: Some(n - kappa0 + 1),
        operators,
        provenance: Provenance {
            algebra_id: "custom".into(),
            construction: Construction::RealMinimal,
            alpha_scheme: Some(scheme),
            seed: Some(seed),
        },
        cyclic_vector: Some(x),
    })
}

/// Builds the minimal tuple matching the algebra's field.
pub fn build_tuple(alg: &CommutativeAlgebra, table: &CharacterTable, scheme: Scheme, seed: u64) -> Result<TupleSpec> {
    match alg.field() {
        Field::Complex => build_tuple_complex(alg, table, scheme, seed),
        Field::Real => build_tuple_real(alg, table, scheme, seed),
    }
}

pub const GALLERY_NAMES: &[&str] = &[
    "diag",
    "jordan2",
    "rotation",
    "rotation_sum",
    "rotation_sum_odd",
    "az",
    "f4",
    "jordan2_diag",
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GalleryParams {
    /// Ambient dimension for `diag` and `jordan2_diag`.
    pub n: Option<usize>,
    /// Number of rotation blocks.
    pub m: Option<usize>,
    pub field: Option<Field>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedCounts {
    pub kappa: Option<usize>,
    pub kappa0: Option<usize>,
    pub kappa1: Option<usize>,
    pub cyclic: bool,
    pub notes: String,
}

#[derive(Debug, Clone)]
pub struct GalleryEntry {
    pub name: String,
    pub algebra: CommutativeAlgebra,
    pub expected: ExpectedCounts,
}

fn unit_block(field: Field, n: usize, range: std::ops::Range<usize>) -> Matrix {
    let mut m = Matrix::zeros(field, n);
    for i in range {
        m[(i, i)] = ONE;
    }
    m
}

fn rotation_block(n: usize, at: usize) -> Matrix {
    let mut m = Matrix::zeros(Field::Real, n);
    m[(at, at + 1)] = ONE;
    m[(at + 1, at)] = -ONE;
    m
}

fn counts(field: Field, kappa: usize, kappa0: usize, kappa1: usize, notes: &str) -> ExpectedCounts {
    match field {
        Field::Complex => ExpectedCounts {
            kappa: Some(kappa),
            kappa0: None,
            kappa1: None,
            cyclic: true,
            notes: notes.into(),
        },
        Field::Real => ExpectedCounts {
            kappa: None,
            kappa0: Some(kappa0),
            kappa1: Some(kappa1),
            cyclic: true,
            notes: notes.into(),
        },
    }
}

/// Generators for `A_z = [[z₁,0,0],[z₂,z₁,0],[z₃,0,z₁]]`, z ∈ 𝕂³.
pub fn az_generators(field: Field) -> Vec<Matrix> {
    let mut a2 = Matrix::zeros(field, 3);
    a2[(1, 0)] = ONE;
    let mut a3 = Matrix::zeros(field, 3);
    a3[(2, 0)] = ONE;
    vec![a2, a3]
}

/// Named algebras with known character counts.
pub fn gallery(name: &str, params: GalleryParams, tol: &Tolerance) -> Result<GalleryEntry> {
    let positive = |v: Option<usize>, default: usize, what: &str| -> Result<usize> {
        let v = v.unwrap_or(default);
        if v == 0 {
            return Err(Error::InvalidInput(format!("{what} must be positive")));
        }
        Ok(v)
    };
    let (field, n, generators, expected) = match name {
        "diag" => {
            let field = params.field.unwrap_or(Field::Complex);
            let n = positive(params.n, 3, "n")?;
            let gens = (0..n.saturating_sub(1)).map(|i| unit_block(field, n, i..i + 1)).collect();
            (field, n, gens, counts(field, n, 0, n, "diagonal matrices"))
        }
        "jordan2" => {
            let field = params.field.unwrap_or(Field::Complex);
            let mut nil = Matrix::zeros(field, 2);
            nil[(0, 1)] = ONE;
            (field, 2, vec![nil], counts(field, 1, 0, 1, "[[a,b],[0,a]]"))
        }
        "rotation" => {
            let field = params.field.unwrap_or(Field::Real);
            let j = match field {
                Field::Real => rotation_block(2, 0),
                Field::Complex => rotation_block(2, 0).complexified(),
            };
            (field, 2, vec![j], counts(field, 2, 1, 0, "[[a,b],[-b,a]]"))
        }
        "rotation_sum" | "rotation_sum_odd" => {
            if params.field == Some(Field::Complex) {
                return Err(Error::InvalidInput(format!("{name} is a real algebra")));
            }
            let m = positive(params.m, if name == "rotation_sum" { 2 } else { 1 }, "m")?;
            let offset = usize::from(name == "rotation_sum_odd");
            let n = 2 * m + offset;
            let mut gens = Vec::new();
            if offset == 1 {
                gens.push(unit_block(Field::Real, n, 0..1));
            }
            for b in 0..m {
                let at = offset + 2 * b;
                gens.push(unit_block(Field::Real, n, at..at + 2));
                gens.push(rotation_block(n, at));
            }
            let notes = if offset == 1 { "R plus m rotation blocks" } else { "m rotation blocks" };
            (Field::Real, n, gens, counts(Field::Real, 0, m, offset, notes))
        }
        "az" => {
            let field = params.field.unwrap_or(Field::Complex);
            (field, 3, az_generators(field), counts(field, 1, 0, 1, "A_z; cyclic vector (1,0,0); non-cyclic commutant"))
        }
        "f4" => {
            let t = f4_triple(F4_DEFAULT, Scheme::SqrtPrimes, tol)?;
            (Field::Real, 2, t.operators, counts(Field::Real, 0, 0, 1, "algebra of the default half-plane triple"))
        }
        "jordan2_diag" => {
            if params.field == Some(Field::Real) {
                return Err(Error::InvalidInput("jordan2_diag is a complex algebra".into()));
            }
            let n = positive(params.n, 3, "n")?;
            if n < 2 {
                return Err(Error::InvalidInput("jordan2_diag needs n ≥ 2".into()));
            }
            let mut nil = Matrix::zeros(Field::Complex, n);
            nil[(0, 1)] = ONE;
            let mut gens = vec![unit_block(Field::Complex, n, 0..2), nil];
            for i in 2..n {
                gens.push(unit_block(Field::Complex, n, i..i + 1));
            }
            (Field::Complex, n, gens, counts(Field::Complex, n - 1, 0, 0, "jordan2 plus n-2 scalar blocks"))
        }
        other => return Err(Error::UnknownGallery(other.into())),
    };
    let algebra = close_algebra(field, n, &generators, tol)?;
    Ok(GalleryEntry {
        name: name.into(),
        algebra,
        expected,
    })
}

/// `(a₁, b₁, a₂, b₂)`.
pub const F4_DEFAULT: [f64; 4] = [2.0, 1.0, 0.5, 1.0];

/// Non-diagonalizable commuting triple `Tⱼ = [[aⱼ,bⱼ],[0,aⱼ]]` on ℝ² whose
/// orbits of vectors with `x₂ > 0` are dense in the upper half-plane.
///
/// The third member completes `vⱼ = (bⱼ/aⱼ, ln aⱼ)`, j = 1, 2, to a dense
/// subsemigroup of ℝ².
pub fn f4_triple(params: [f64; 4], scheme: Scheme, tol: &Tolerance) -> Result<TupleSpec> {
    let [a1, b1, a2, b2] = params;
    if !(a1 > 0.0 && a2 > 0.0 && a1.is_finite() && a2.is_finite()) {
        return Err(Error::InvalidInput("a₁, a₂ must be positive".into()));
    }
    if b1 == 0.0 || b2 == 0.0 || !b1.is_finite() || !b2.is_finite() {
        return Err(Error::InvalidInput("b₁, b₂ must be nonzero".into()));
    }
    let v1 = vec![b1 / a1, a1.ln()];
    let v2 = vec![b2 / a2, a2.ln()];
    let det = v1[0] * v2[1] - v1[1] * v2[0];
    if det.abs() < tol.rank_tol {
        return Err(Error::DependentVectors { det });
    }
    let alpha = independent_reals(2, scheme, None)?;
    let v3 = completing_generator(&[v1, v2], &alpha, tol)?;
    let a3 = v3[1].exp();
    let b3 = a3 * v3[0];
    let op = |a: f64, b: f64| Matrix::from_real_rows(&[&[a, b], &[0.0, a]]);
    Ok(TupleSpec {
        schema_version: SCHEMA_VERSION,
        field: Field::Real,
        n: 2,
        operators: vec![op(a1, b1), op(a2, b2), op(a3, b3)],
        provenance: Provenance {
            algebra_id: "f4".into(),
            construction: Construction::Gallery,
            alpha_scheme: Some(scheme),
            seed: None,
        },
        predicted_size: None,
        cyclic_vector: Some(vec![C64::new(0.0, 0.0), ONE]),
    })
}

/// Index of the first non-scalar member of a tuple on 𝕂². Non-scalar
/// operators on a 2-dimensional space are cyclic.
pub fn two_dim_cyclic_member(tuple: &TupleSpec, tol: &Tolerance) -> Result<usize> {
    if tuple.n != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: tuple.n,
        });
    }
    tuple
        .operators
        .iter()
        .position(|t| {
            let shift = Matrix::identity(t.field(), 2).scale(t.trace() / 2.0);
            t.dist_max(&shift) > tol.eq_tol
        })
        .ok_or(Error::AllScalar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::compute_characters;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn entry(name: &str, n: Option<usize>, m: Option<usize>, field: Option<Field>) -> GalleryEntry {
        gallery(name, GalleryParams { n, m, field }, &tol()).unwrap()
    }

    fn counts_of(e: &GalleryEntry) -> (Option<usize>, Option<usize>, Option<usize>) {
        let t = compute_characters(&e.algebra, &tol(), 7).unwrap();
        match e.algebra.field() {
            Field::Complex => (Some(t.kappa), None, None),
            Field::Real => (None, t.kappa0, t.kappa1),
        }
    }

    #[test]
    fn min_sizes() {
        assert_eq!(min_tuple_size(Field::Complex, 3).unwrap(), 4);
        assert_eq!(min_tuple_size(Field::Real, 2).unwrap(), 2);
        assert_eq!(min_tuple_size(Field::Real, 3).unwrap(), 3);
        assert_eq!(min_tuple_size(Field::Real, 1).unwrap(), 2);
        assert!(min_tuple_size(Field::Real, 0).is_err());
    }

    #[test]
    fn gallery_counts_match() {
        let cases = [
            entry("diag", Some(3), None, None),
            entry("diag", Some(2), None, Some(Field::Real)),
            entry("jordan2", None, None, None),
            entry("rotation", None, None, None),
            entry("rotation", None, None, Some(Field::Complex)),
            entry("rotation_sum", None, Some(2), None),
            entry("rotation_sum_odd", None, Some(2), None),
            entry("az", None, None, Some(Field::Complex)),
            entry("az", None, None, Some(Field::Real)),
            entry("f4", None, None, None),
            entry("jordan2_diag", Some(4), None, None),
        ];
        for e in &cases {
            assert_eq!(e.algebra.dim(), e.algebra.n(), "{} not of full dimension", e.name);
            let got = counts_of(e);
            assert_eq!(got, (e.expected.kappa, e.expected.kappa0, e.expected.kappa1), "{}", e.name);
        }
        assert!(matches!(
            gallery("nope", GalleryParams::default(), &tol()),
            Err(Error::UnknownGallery(_))
        ));
    }

    fn check_tuple(alg: &CommutativeAlgebra, t: &TupleSpec) {
        assert_eq!(Some(t.len()), t.predicted_size);
        t.validate(&tol()).unwrap();
        for op in &t.operators {
            assert!(alg.contains(op, 1e-8));
            assert_eq!(op.field(), alg.field());
        }
    }

    #[test]
    fn complex_builder_sizes() {
        let one = close_algebra(Field::Complex, 1, &[], &tol()).unwrap();
        let t1 = compute_characters(&one, &tol(), 1).unwrap();
        let t = build_tuple_complex(&one, &t1, Scheme::SqrtPrimes, 42).unwrap();
        assert_eq!(t.len(), 2);
        check_tuple(&one, &t);

        for (name, n, size) in [("diag", 2, 3), ("jordan2_diag", 3, 5)] {
            let e = entry(name, Some(n), None, None);
            let table = compute_characters(&e.algebra, &tol(), 1).unwrap();
            let t = build_tuple_complex(&e.algebra, &table, Scheme::SqrtPrimes, 42).unwrap();
            assert_eq!(t.len(), size, "{name}");
            check_tuple(&e.algebra, &t);
        }
    }

    #[test]
    fn real_builder_sizes() {
        let cases = [
            entry("rotation", None, None, None),
            entry("az", None, None, Some(Field::Real)),
            entry("rotation_sum_odd", None, Some(1), None),
        ];
        for (e, size) in cases.iter().zip([2, 4, 3]) {
            let table = compute_characters(&e.algebra, &tol(), 1).unwrap();
            let t = build_tuple_real(&e.algebra, &table, Scheme::SqrtPrimes, 42).unwrap();
            assert_eq!(t.len(), size, "{}", e.name);
            check_tuple(&e.algebra, &t);
        }
    }

    #[test]
    fn builders_reject_non_cyclic() {
        let scalar = close_algebra(Field::Complex, 2, &[], &tol()).unwrap();
        let t = compute_characters(&scalar, &tol(), 1).unwrap();
        assert_eq!(
            build_tuple_complex(&scalar, &t, Scheme::SqrtPrimes, 1),
            Err(Error::NotCyclicAlgebra)
        );
    }

    #[test]
    fn f4_examples() {
        let t = f4_triple(F4_DEFAULT, Scheme::SqrtPrimes, &tol()).unwrap();
        assert_eq!(t.len(), 3);
        for op in &t.operators {
            let a = op[(0, 0)].re;
            let nil = op - &Matrix::identity(Field::Real, 2).scale_real(a);
            assert!(nil.max_abs() > 0.0);
            assert!((&nil * &nil).max_abs() == 0.0);
            assert!(a > 0.0);
        }
        let (s2, s3) = (2f64.sqrt(), 3f64.sqrt());
        let ln2 = 2f64.ln();
        let a3 = (-(s2 * ln2) - s3 * -ln2).exp();
        let t3 = &t.operators[2];
        assert!((t3[(0, 0)].re - a3).abs() < 1e-14);
        assert!((t3[(0, 1)].re - a3 * (-s2 * 0.5 - s3 * 2.0)).abs() < 1e-13);
        t.validate(&tol()).unwrap();

        match f4_triple([2.0, 1.0, 4.0, 4.0], Scheme::SqrtPrimes, &tol()) {
            Err(Error::DependentVectors { det }) => assert!(det.abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn two_dim_member() {
        let two = Matrix::identity(Field::Real, 2).scale_real(2.0);
        let j = Matrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let t = TupleSpec::user(Field::Real, 2, vec![two.clone(), j]);
        assert_eq!(two_dim_cyclic_member(&t, &tol()).unwrap(), 1);
        let s = TupleSpec::user(Field::Real, 2, vec![Matrix::identity(Field::Real, 2), two.scale_real(1.5)]);
        assert_eq!(two_dim_cyclic_member(&s, &tol()), Err(Error::AllScalar));

        let e = entry("rotation", None, None, None);
        let table = compute_characters(&e.algebra, &tol(), 1).unwrap();
        let t = build_tuple_real(&e.algebra, &table, Scheme::SqrtPrimes, 3).unwrap();
        assert!(two_dim_cyclic_member(&t, &tol()).unwrap() <= 1);
    }

    #[test]
    fn tuple_json_roundtrip() {
        let t = f4_triple(F4_DEFAULT, Scheme::SqrtPrimes, &tol()).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        let back: TupleSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        let minimal = r#"{"field":"R","n":1,"operators":[{"field":"R","n":1,"entries":[[[2.0,0.0]]]}]}"#;
        let u: TupleSpec = serde_json::from_str(minimal).unwrap();
        assert_eq!(u.provenance.construction, Construction::User);
        u.validate(&tol()).unwrap();
    }
}

//! Dense additive subsemigroups of ℝᵈ and of ℤ₂^m × ℝᵈ.
//!
//! Rational independence of reals cannot be represented in floating point:
//! every double is rational. The schemes here are exact-real facts (√pᵢ and
//! ln pᵢ are independent over ℚ); density statements built on them are only
//! checked through finite-budget coverage experiments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{numerical_rank_real, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Scheme {
    SqrtPrimes,
    LogPrimes,
    User,
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "sqrt-primes" => Ok(Scheme::SqrtPrimes),
            "log-primes" => Ok(Scheme::LogPrimes),
            "user" => Ok(Scheme::User),
            other => Err(Error::InvalidInput(format!("unknown alpha scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependentReals {
    pub values: Vec<f64>,
    pub scheme: Scheme,
}

impl IndependentReals {
    pub fn d(&self) -> usize {
        self.values.len()
    }
}

/// First `d` primes.
pub fn primes(d: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(d);
    let mut candidate = 2u64;
    while out.len() < d {
        if out.iter().take_while(|&&p| p * p <= candidate).all(|&p| candidate % p != 0) {
            out.push(candidate);
        }
        candidate += 1;
    }
    out
}

/// `d` positive reals, rationally independent as exact reals.
///
/// `user` is consulted only for [`Scheme::User`].
pub fn independent_reals(d: usize, scheme: Scheme, user: Option<&[f64]>) -> Result<IndependentReals> {
    if d == 0 {
        return Err(Error::InvalidInput("d must be at least 1".into()));
    }
    let values = match scheme {
        Scheme::SqrtPrimes => primes(d).into_iter().map(|p| (p as f64).sqrt()).collect(),
        Scheme::LogPrimes => primes(d).into_iter().map(|p| (p as f64).ln()).collect(),
        Scheme::User => {
            let v = user.ok_or_else(|| Error::InvalidInput("USER scheme requires values".into()))?;
            if v.len() != d {
                return Err(Error::InvalidInput(format!(
                    "USER scheme got {} values, expected {d}",
                    v.len()
                )));
            }
            if v.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return Err(Error::InvalidInput("USER values must be positive and finite".into()));
            }
            v.to_vec()
        }
    };
    Ok(IndependentReals { values, scheme })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KroneckerSolution {
    pub m0: u64,
    pub m: Vec<u64>,
    /// max_l |m[l] − m0·α[l] − x[l]|
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KroneckerOutcome {
    Found(KroneckerSolution),
    /// No candidate met `eps`; carries the lowest-error candidate of the scan.
    NotFound(KroneckerSolution),
}

impl KroneckerOutcome {
    pub fn solution(&self) -> &KroneckerSolution {
        match self {
            KroneckerOutcome::Found(s) | KroneckerOutcome::NotFound(s) => s,
        }
    }

    pub fn found(&self) -> bool {
        matches!(self, KroneckerOutcome::Found(_))
    }
}

fn kronecker_candidate(alpha: &[f64], x: &[f64], m0: u64) -> KroneckerSolution {
    let mut m = Vec::with_capacity(alpha.len());
    let mut error = 0.0f64;
    for (&a, &xl) in alpha.iter().zip(x) {
        let shift = m0 as f64 * a;
        let ml = (xl + shift).round().max(0.0);
        error = error.max((ml - shift - xl).abs());
        m.push(ml as u64);
    }
    KroneckerSolution { m0, m, error }
}

/// Scans m₀ = 0..=m0_max for nonnegative integers with
/// `m[l] − m₀·α[l] ≈ x[l]`, returning the first hit within `eps`.
///
/// Each `m[l]` is `round(x[l] + m₀α[l])` clamped at zero; ties in the
/// best-error tracker keep the earliest m₀.
pub fn kronecker_approx(alpha: &IndependentReals, x: &[f64], eps: f64, m0_max: u64) -> Result<KroneckerOutcome> {
    if x.len() != alpha.d() {
        return Err(Error::DimensionMismatch {
            expected: alpha.d(),
            found: x.len(),
        });
    }
    if !(eps >= 0.0) {
        return Err(Error::InvalidInput("eps must be nonnegative".into()));
    }
    let mut best: Option<KroneckerSolution> = None;
    for m0 in 0..=m0_max {
        let cand = kronecker_candidate(&alpha.values, x, m0);
        if cand.error <= eps {
            return Ok(KroneckerOutcome::Found(cand));
        }
        if best.as_ref().map_or(true, |b| cand.error < b.error) {
            best = Some(cand);
        }
    }
    Ok(KroneckerOutcome::NotFound(best.expect("scan covers m0 = 0")))
}

fn check_basis(basis: &[Vec<f64>], alpha: &IndependentReals, tol: &Tolerance) -> Result<usize> {
    let d = basis.len();
    if d != alpha.d() {
        return Err(Error::InvalidInput(format!(
            "basis has {d} vectors but alpha has {} values",
            alpha.d()
        )));
    }
    if basis.iter().any(|v| v.len() != d) {
        return Err(Error::InvalidInput("basis vectors must lie in ℝᵈ with d = basis size".into()));
    }
    if numerical_rank_real(basis, tol) != d {
        return Err(Error::InvalidInput("basis is rank deficient".into()));
    }
    Ok(d)
}

/// `x₀ = −Σ αᵢ·basis[i]`; together with the basis it generates a dense
/// additive subsemigroup of ℝᵈ.
pub fn completing_generator(basis: &[Vec<f64>], alpha: &IndependentReals, tol: &Tolerance) -> Result<Vec<f64>> {
    let d = check_basis(basis, alpha, tol)?;
    let mut x0 = vec![0.0; d];
    for (v, &a) in basis.iter().zip(&alpha.values) {
        for (o, &vi) in x0.iter_mut().zip(v) {
            *o -= a * vi;
        }
    }
    Ok(x0)
}

/// Element of ℤ₂^m in additive notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    pub bits: Vec<u8>,
}

impl GroupElement {
    pub fn identity(m: usize) -> Self {
        GroupElement { bits: vec![0; m] }
    }

    pub fn unit(m: usize, i: usize) -> Self {
        let mut bits = vec![0; m];
        bits[i] = 1;
        GroupElement { bits }
    }

    pub fn m(&self) -> usize {
        self.bits.len()
    }

    pub fn add(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }
}

/// Rank over ℤ₂ by Gaussian elimination on bit rows.
pub fn z2_rank(elements: &[GroupElement]) -> usize {
    let mut rows: Vec<Vec<u8>> = elements.iter().map(|g| g.bits.clone()).collect();
    let m = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..m {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][col] == 1) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] == 1 {
                row.iter_mut().zip(&pivot).for_each(|(a, b)| *a ^= b);
            }
        }
        rank += 1;
    }
    rank
}

/// Generator `(g₀, x₀)` completing `(group_gens[i], basis[i])` to a family
/// whose subsemigroup is dense in ℤ₂^m × ℝᵈ; `g₀` is the identity.
pub fn group_completing_generator(
    basis: &[Vec<f64>],
    group_gens: &[GroupElement],
    alpha: &IndependentReals,
    tol: &Tolerance,
) -> Result<(GroupElement, Vec<f64>)> {
    if group_gens.len() != basis.len() {
        return Err(Error::InvalidInput(format!(
            "{} group elements for {} basis vectors",
            group_gens.len(),
            basis.len()
        )));
    }
    let m = group_gens.first().map_or(0, GroupElement::m);
    if group_gens.iter().any(|g| g.m() != m || g.bits.iter().any(|&b| b > 1)) {
        return Err(Error::InvalidInput("group elements must be bit vectors of equal length".into()));
    }
    if z2_rank(group_gens) != m {
        return Err(Error::InvalidInput(format!("group elements do not generate ℤ₂^{m}")));
    }
    let x0 = completing_generator(basis, alpha, tol)?;
    Ok((GroupElement::identity(m), x0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SubgroupVerdict {
    ProperSubspace,
    FullRankLattice,
    Overdetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupClassification {
    pub verdict: SubgroupVerdict,
    pub span_rank: usize,
}

/// Classifies the additive subgroup of ℝᵈ generated by `generators`.
///
/// At most `d` generators always give a nowhere dense subgroup: either a
/// proper subspace or a discrete lattice.
pub fn classify_subgroup(generators: &[Vec<f64>], d: usize, tol: &Tolerance) -> Result<SubgroupClassification> {
    if let Some(v) = generators.iter().find(|v| v.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: v.len(),
        });
    }
    let span_rank = numerical_rank_real(generators, tol);
    let verdict = if span_rank < d {
        SubgroupVerdict::ProperSubspace
    } else if generators.len() == d {
        SubgroupVerdict::FullRankLattice
    } else {
        SubgroupVerdict::Overdetermined
    };
    Ok(SubgroupClassification { verdict, span_rank })
}

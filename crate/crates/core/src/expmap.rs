//! Exponential and logarithm inside a commutative matrix algebra, generators
//! of the kernel of exp, and the sign group of a real algebra.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::algebra::{character_values_of, CharacterTable, CommutativeAlgebra};
use crate::error::{Error, Result};
use crate::numkit::{Field, Matrix, C64, I, ONE};
use crate::semigroup::GroupElement;

/// Imaginary residue tolerated before a result is forced real.
pub const REAL_TRUNCATION_TOL: f64 = 1e-7;
/// Angles sampled when choosing a branch cut automatically.
pub const AUTO_CUT_SAMPLES: usize = 360;

/// Matrix exponential by scaling and squaring around a Taylor core.
pub fn alg_exp(a: &Matrix) -> Result<Matrix> {
    if !a.is_finite() {
        return Err(Error::NumericalFailure("exp argument is not finite".into()));
    }
    let norm = a.norm_one();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = a.scale_real(0.5f64.powi(squarings as i32));
    let n = a.n();
    let mut sum = Matrix::identity(a.field(), n);
    let mut term = Matrix::identity(a.field(), n);
    for k in 1..=40 {
        term = (&term * &scaled).scale_real(1.0 / k as f64);
        sum = &sum + &term;
        if term.max_abs() <= 1e-18 * sum.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    if !sum.is_finite() {
        return Err(Error::NumericalFailure("matrix exponential overflowed".into()));
    }
    Ok(sum)
}

/// Direction of the ray excluded from the logarithm's domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LogCut {
    Auto,
    Ray(f64),
}

/// Angle in (−π, π].
fn wrap_angle(t: f64) -> f64 {
    let mut r = t.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

fn angular_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// Euclidean distance from `z` to the ray `{t·e^{iθ} : t ≥ 0}`.
fn ray_distance(z: C64, theta: f64) -> f64 {
    let delta = angular_distance(z.arg(), theta);
    if delta >= PI / 2.0 {
        z.norm()
    } else {
        z.norm() * delta.sin()
    }
}

/// Ray maximizing the smallest angular distance to `values`; ties go to the
/// smallest angle.
pub fn auto_cut(values: &[C64]) -> f64 {
    let mut best = (f64::NEG_INFINITY, PI);
    for k in 0..AUTO_CUT_SAMPLES {
        let theta = -PI + 2.0 * PI * (k + 1) as f64 / AUTO_CUT_SAMPLES as f64;
        let score = values
            .iter()
            .map(|z| angular_distance(z.arg(), theta))
            .fold(f64::INFINITY, f64::min);
        if score > best.0 {
            best = (score, theta);
        }
    }
    best.1
}

/// Logarithm of `z` continuous off the ray at angle `theta`; the imaginary
/// part lies in (θ − 2π, θ).
pub fn log_with_cut(z: C64, theta: f64) -> C64 {
    let lo = theta - 2.0 * PI;
    let arg = lo + (z.arg() - lo).rem_euclid(2.0 * PI);
    C64::new(z.norm().ln(), arg)
}

fn invertibility_floor(alg: &CommutativeAlgebra, a: &Matrix) -> f64 {
    alg.tolerance().rank_tol * a.max_abs().max(1.0)
}

/// `b − Σ_χ χ(b)p_χ` restricted by `p_χ` for each character.
fn nilpotent_parts(table: &CharacterTable, a: &Matrix, vals: &[C64]) -> Vec<Matrix> {
    let ac = a.complexified();
    let mut semisimple = Matrix::zeros(Field::Complex, a.n());
    for (p, &v) in table.idempotents.iter().zip(vals) {
        semisimple = &semisimple + &p.scale(v);
    }
    let rest = &ac - &semisimple;
    table.idempotents.iter().map(|p| &rest * p).collect()
}

fn force_real(m: &Matrix) -> Result<Matrix> {
    let scale = m.max_abs().max(1.0);
    m.realified(REAL_TRUNCATION_TOL * scale).map_err(|_| {
        Error::NumericalFailure(format!(
            "imaginary residue {:.3e} exceeds truncation tolerance",
            m.max_imag()
        ))
    })
}

/// Logarithm of `a` inside the algebra via its character/nilpotent
/// decomposition.
///
/// For a real algebra the branch for each conjugate pair is chosen on the
/// representative and conjugated for its partner, and real characters use
/// the real logarithm, so the result is real.
pub fn alg_log(alg: &CommutativeAlgebra, table: &CharacterTable, a: &Matrix, cut: LogCut) -> Result<Matrix> {
    let vals = character_values_of(alg, table, a)?;
    let floor = invertibility_floor(alg, a);
    if vals.iter().any(|v| v.norm() <= floor) {
        return Err(Error::NotInvertible);
    }
    let cluster_tol = alg.tolerance().cluster_tol;
    let theta = match cut {
        LogCut::Auto => auto_cut(&vals),
        LogCut::Ray(t) => {
            if !(t > -PI && t <= PI) {
                return Err(Error::InvalidInput(format!("cut angle {t} outside (−π, π]")));
            }
            if vals.iter().any(|&v| ray_distance(v, t) < cluster_tol) {
                return Err(Error::RayHitsSpectrum { angle: t });
            }
            t
        }
    };

    let logs: Vec<C64> = match alg.field() {
        Field::Complex => vals.iter().map(|&v| log_with_cut(v, theta)).collect(),
        Field::Real => {
            let mut logs = vec![C64::new(0.0, 0.0); vals.len()];
            for i in table.real_indices() {
                if vals[i].re <= 0.0 {
                    return Err(Error::NoRealLog);
                }
                logs[i] = C64::new(vals[i].re.ln(), 0.0);
            }
            for (rep, partner) in table.conjugate_pairs() {
                logs[rep] = log_with_cut(vals[rep], theta);
                logs[partner] = logs[rep].conj();
            }
            logs
        }
    };

    let d = alg.dim();
    let nilps = nilpotent_parts(table, a, &vals);
    let mut b = Matrix::zeros(Field::Complex, alg.n());
    for ((p, nil), (&lambda, &log)) in table.idempotents.iter().zip(&nilps).zip(vals.iter().zip(&logs)) {
        b = &b + &p.scale(log);
        let x = nil.scale(ONE / lambda);
        let mut power = x.clone();
        for j in 1..d {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            b = &b + &power.scale_real(sign / j as f64);
            power = &power * &x;
        }
    }
    let b = match alg.field() {
        Field::Complex => b,
        Field::Real => force_real(&b)?,
    };
    let back = alg_exp(&b)?;
    let residual = back.dist_max(&a.complexified());
    if residual > 1e-7 * a.max_abs().max(1.0) {
        return Err(Error::NumericalFailure(format!("exp(log a) residual {residual:.3e}")));
    }
    Ok(b)
}

/// Generators of `ker exp`: `2πi·p_χ` for a complex algebra, and
/// `2πi(p_j − p_j̄)` over conjugate pairs for a real one.
pub fn ker_exp_generators(alg: &CommutativeAlgebra, table: &CharacterTable) -> Result<Vec<Matrix>> {
    let two_pi_i = I * (2.0 * PI);
    let gens: Vec<Matrix> = match alg.field() {
        Field::Complex => table.idempotents.iter().map(|p| p.scale(two_pi_i)).collect(),
        Field::Real => table
            .conjugate_pairs()
            .into_iter()
            .map(|(j, k)| force_real(&(&table.idempotents[j] - &table.idempotents[k]).scale(two_pi_i)))
            .collect::<Result<_>>()?,
    };
    let id = Matrix::identity(alg.field(), alg.n());
    for g in &gens {
        let r = alg_exp(g)?.dist_max(&id);
        if r > 1e-6 {
            return Err(Error::NumericalFailure(format!("exp of kernel generator misses I by {r:.3e}")));
        }
    }
    Ok(gens)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignGroup {
    /// `I − 2p_r` for each real-valued character `r`, in table order.
    pub generators: Vec<Matrix>,
    pub m: usize,
}

impl SignGroup {
    /// Product of the generators selected by `g`.
    pub fn element(&self, g: &GroupElement, n: usize) -> Matrix {
        let mut acc = Matrix::identity(Field::Real, n);
        for (bit, gen) in g.bits.iter().zip(&self.generators) {
            if *bit == 1 {
                acc = &acc * gen;
            }
        }
        acc
    }
}

pub fn sign_group(alg: &CommutativeAlgebra, table: &CharacterTable) -> Result<SignGroup> {
    if alg.field() != Field::Real {
        return Err(Error::ComplexFieldError);
    }
    let id = Matrix::identity(Field::Real, alg.n());
    let generators = table
        .real_indices()
        .into_iter()
        .map(|r| force_real(&(&id.complexified() - &table.idempotents[r].scale_real(2.0))))
        .collect::<Result<Vec<_>>>()?;
    Ok(SignGroup {
        m: generators.len(),
        generators,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpPreimage {
    pub exists: bool,
    /// `b` with `exp(b) ≈ a`, when one exists.
    pub witness: Option<Matrix>,
}

/// Whether `a = exp(b)` for some `b` in the algebra: `a` invertible and,
/// for a real algebra, `χ(a) > 0` on every real-valued character.
pub fn has_exp_preimage(alg: &CommutativeAlgebra, table: &CharacterTable, a: &Matrix) -> Result<ExpPreimage> {
    let vals = character_values_of(alg, table, a)?;
    let floor = invertibility_floor(alg, a);
    let invertible = vals.iter().all(|v| v.norm() > floor);
    let signs_ok = table.real_indices().iter().all(|&r| vals[r].re > 0.0);
    if !(invertible && signs_ok) {
        return Ok(ExpPreimage {
            exists: false,
            witness: None,
        });
    }
    let witness = alg_log(alg, table, a, LogCut::Auto)?;
    Ok(ExpPreimage {
        exists: true,
        witness: Some(witness),
    })
}

/// Sign-group element `g` (as bits over the real characters) with `g·a` in
/// the image of exp; `a` must be invertible.
pub fn sign_component(alg: &CommutativeAlgebra, table: &CharacterTable, a: &Matrix) -> Result<GroupElement> {
    if alg.field() != Field::Real {
        return Err(Error::ComplexFieldError);
    }
    let vals = character_values_of(alg, table, a)?;
    if vals.iter().any(|v| v.norm() <= invertibility_floor(alg, a)) {
        return Err(Error::NotInvertible);
    }
    Ok(GroupElement {
        bits: table
            .real_indices()
            .iter()
            .map(|&r| u8::from(vals[r].re < 0.0))
            .collect(),
    })
}

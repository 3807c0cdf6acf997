//! Orbit enumeration for commuting tuples and grid-coverage density evidence.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{commutant, CommutativeAlgebra};
use crate::construct::TupleSpec;
use crate::error::{Error, Result};
use crate::numkit::{krylov_rank, matrix_rank, random_scalar, random_vector, Field, Matrix, C64};

/// Axis-aligned window in real coordinates: `n` of them for a real space,
/// `2n` (re, im interleaved) for a complex one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxRegion {
    pub field: Field,
    pub n: usize,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxRegion {
    pub fn new(field: Field, n: usize, lo: Vec<f64>, hi: Vec<f64>) -> Result<BoxRegion> {
        let b = BoxRegion { field, n, lo, hi };
        b.validate()?;
        Ok(b)
    }

    /// Same bounds on every real axis.
    pub fn cube(field: Field, n: usize, lo: f64, hi: f64) -> Result<BoxRegion> {
        let k = real_dim(field, n);
        BoxRegion::new(field, n, vec![lo; k], vec![hi; k])
    }

    pub fn validate(&self) -> Result<()> {
        let k = real_dim(self.field, self.n);
        if self.lo.len() != k || self.hi.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: self.lo.len().min(self.hi.len()),
            });
        }
        if self.lo.iter().zip(&self.hi).any(|(l, h)| !(l < h) || !l.is_finite() || !h.is_finite()) {
            return Err(Error::InvalidInput("box needs finite lo < hi on every axis".into()));
        }
        Ok(())
    }

    pub fn real_dim(&self) -> usize {
        self.lo.len()
    }
}

fn real_dim(field: Field, n: usize) -> usize {
    match field {
        Field::Real => n,
        Field::Complex => 2 * n,
    }
}

/// Real coordinates of a point, matching [`BoxRegion`] axes.
pub fn real_coordinates(field: Field, point: &[C64]) -> Vec<f64> {
    match field {
        Field::Real => point.iter().map(|z| z.re).collect(),
        Field::Complex => point.iter().flat_map(|z| [z.re, z.im]).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitBudget {
    /// Cap on the total degree of exponent vectors.
    pub max_degree: u32,
    pub max_points: u64,
}

impl OrbitBudget {
    pub fn degree(max_degree: u32) -> OrbitBudget {
        OrbitBudget {
            max_degree,
            max_points: u64::MAX,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_points == 0 {
            return Err(Error::InvalidInput("max_points must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitPoint {
    pub q: Vec<u32>,
    pub degree: u32,
    pub point: Vec<C64>,
    pub finite: bool,
}

/// Iterator over `T^q x` by total degree, lexicographic within a degree.
///
/// Each shell is built from the previous one: `q` is reached from
/// `q − e_j` with `j` the first nonzero index of `q`, so every point costs
/// one matrix-vector product.
pub struct OrbitIter<'a> {
    ops: &'a [Matrix],
    shell: Vec<(Vec<u32>, Vec<C64>)>,
    pos: usize,
    degree: u32,
    budget: OrbitBudget,
    emitted: u64,
}

fn first_nonzero(q: &[u32]) -> usize {
    q.iter().position(|&v| v != 0).unwrap_or(q.len().saturating_sub(1))
}

impl OrbitIter<'_> {
    fn advance_shell(&mut self) -> bool {
        if self.degree >= self.budget.max_degree || self.ops.is_empty() {
            return false;
        }
        let prev = std::mem::take(&mut self.shell);
        let mut next = Vec::new();
        for (q, p) in &prev {
            let limit = if q.iter().all(|&v| v == 0) { self.ops.len() - 1 } else { first_nonzero(q) };
            for j in 0..=limit {
                let mut child = q.clone();
                child[j] += 1;
                next.push((child, self.ops[j].matvec(p)));
            }
        }
        next.sort_by(|a, b| a.0.cmp(&b.0));
        self.shell = next;
        self.pos = 0;
        self.degree += 1;
        true
    }
}

impl Iterator for OrbitIter<'_> {
    type Item = OrbitPoint;

    fn next(&mut self) -> Option<OrbitPoint> {
        if self.emitted >= self.budget.max_points {
            return None;
        }
        if self.pos >= self.shell.len() && !self.advance_shell() {
            return None;
        }
        let (q, p) = &self.shell[self.pos];
        self.pos += 1;
        self.emitted += 1;
        Some(OrbitPoint {
            q: q.clone(),
            degree: self.degree,
            finite: p.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
            point: p.clone(),
        })
    }
}

pub fn enumerate_orbit<'a>(tuple: &'a TupleSpec, x: &[C64], budget: OrbitBudget) -> Result<OrbitIter<'a>> {
    budget.validate()?;
    if x.len() != tuple.n {
        return Err(Error::DimensionMismatch {
            expected: tuple.n,
            found: x.len(),
        });
    }
    tuple.check_shape()?;
    Ok(OrbitIter {
        ops: &tuple.operators,
        shell: vec![(vec![0; tuple.operators.len()], x.to_vec())],
        pos: 0,
        degree: 0,
        budget,
        emitted: 0,
    })
}

/// `T₁^{q₁}⋯T_r^{q_r}·x` by repeated multiplication.
pub fn apply_word(tuple: &TupleSpec, q: &[u32], x: &[C64]) -> Vec<C64> {
    let mut v = x.to_vec();
    for (op, &k) in tuple.operators.iter().zip(q) {
        for _ in 0..k {
            v = op.matvec(&v);
        }
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    DenseEvidence,
    NowhereDenseEvidence,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerdictThresholds {
    pub dense: f64,
    pub sparse: f64,
    pub plateau_eps: f64,
}

impl Default for VerdictThresholds {
    fn default() -> Self {
        VerdictThresholds {
            dense: 0.8,
            sparse: 0.5,
            plateau_eps: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub grid_per_axis: usize,
    pub budget_degrees: Vec<u32>,
    pub coverage: Vec<f64>,
    pub points_total: u64,
    pub points_in_box: u64,
    pub points_non_finite: u64,
    pub thresholds: VerdictThresholds,
    pub verdict: Verdict,
}

impl CoverageReport {
    pub fn final_coverage(&self) -> f64 {
        self.coverage.last().copied().unwrap_or(0.0)
    }

    /// Coverage gain over the last checkpoint interval.
    pub fn last_gain(&self) -> f64 {
        match self.coverage.as_slice() {
            [] => 0.0,
            [only] => *only,
            [.., a, b] => b - a,
        }
    }

    pub fn strictly_increasing(&self) -> bool {
        self.coverage.windows(2).all(|w| w[1] > w[0])
    }
}

pub fn density_verdict(report: &CoverageReport, t: &VerdictThresholds) -> Verdict {
    let last = report.final_coverage();
    if last >= t.dense {
        Verdict::DenseEvidence
    } else if last <= t.sparse && report.last_gain() <= t.plateau_eps {
        Verdict::NowhereDenseEvidence
    } else {
        Verdict::Inconclusive
    }
}

/// Bitset over the cells of a uniform grid on a box.
pub struct CellGrid {
    region: BoxRegion,
    grid: usize,
    bits: Vec<u64>,
    hit: u64,
    cells: u64,
}

impl CellGrid {
    pub fn new(region: &BoxRegion, grid: usize) -> Result<CellGrid> {
        region.validate()?;
        if grid < 2 {
            return Err(Error::InvalidInput("grid_per_axis must be at least 2".into()));
        }
        let cells = (grid as f64).powi(region.real_dim() as i32);
        if cells > 2f64.powi(32) {
            return Err(Error::InvalidInput(format!(
                "{cells:.3e} cells exceeds 2^32; choose a coarser grid"
            )));
        }
        let cells = cells as u64;
        Ok(CellGrid {
            region: region.clone(),
            grid,
            bits: vec![0; cells.div_ceil(64) as usize],
            hit: 0,
            cells,
        })
    }

    /// Cell index of a point, or `None` outside the closed box.
    pub fn cell_of(&self, coords: &[f64]) -> Option<u64> {
        let mut idx = 0u64;
        for ((&c, &lo), &hi) in coords.iter().zip(&self.region.lo).zip(&self.region.hi) {
            if !(c >= lo && c <= hi) {
                return None;
            }
            let k = (((c - lo) / (hi - lo)) * self.grid as f64).floor() as usize;
            idx = idx * self.grid as u64 + k.min(self.grid - 1) as u64;
        }
        Some(idx)
    }

    /// Marks the cell containing `coords`; returns whether it was inside.
    pub fn insert(&mut self, coords: &[f64]) -> bool {
        match self.cell_of(coords) {
            Some(i) => {
                let (w, b) = ((i / 64) as usize, i % 64);
                if self.bits[w] >> b & 1 == 0 {
                    self.bits[w] |= 1 << b;
                    self.hit += 1;
                }
                true
            }
            None => false,
        }
    }

    pub fn fraction(&self) -> f64 {
        self.hit as f64 / self.cells as f64
    }

    pub fn cells(&self) -> u64 {
        self.cells
    }
}

/// Grid coverage of the box at each checkpoint degree.
///
/// Points must arrive in nondecreasing degree order; checkpoints beyond the
/// last emitted degree record the final coverage.
pub fn coverage<I>(points: I, region: &BoxRegion, grid_per_axis: usize, checkpoints: &[u32]) -> Result<CoverageReport>
where
    I: IntoIterator<Item = OrbitPoint>,
{
    coverage_with(points, region, grid_per_axis, checkpoints, &VerdictThresholds::default())
}

pub fn coverage_with<I>(
    points: I,
    region: &BoxRegion,
    grid_per_axis: usize,
    checkpoints: &[u32],
    thresholds: &VerdictThresholds,
) -> Result<CoverageReport>
where
    I: IntoIterator<Item = OrbitPoint>,
{
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("checkpoints must be nonempty and strictly increasing".into()));
    }
    let mut cells = CellGrid::new(region, grid_per_axis)?;
    let mut cov = Vec::with_capacity(checkpoints.len());
    let (mut total, mut inside, mut bad) = (0u64, 0u64, 0u64);
    for p in points {
        while cov.len() < checkpoints.len() && p.degree > checkpoints[cov.len()] {
            cov.push(cells.fraction());
        }
        if cov.len() == checkpoints.len() {
            break;
        }
        total += 1;
        if !p.finite {
            bad += 1;
            continue;
        }
        if p.point.len() != region.n {
            return Err(Error::DimensionMismatch {
                expected: region.n,
                found: p.point.len(),
            });
        }
        if cells.insert(&real_coordinates(region.field, &p.point)) {
            inside += 1;
        }
    }
    while cov.len() < checkpoints.len() {
        cov.push(cells.fraction());
    }
    let mut report = CoverageReport {
        grid_per_axis,
        budget_degrees: checkpoints.to_vec(),
        coverage: cov,
        points_total: total,
        points_in_box: inside,
        points_non_finite: bad,
        thresholds: *thresholds,
        verdict: Verdict::Inconclusive,
    };
    report.verdict = density_verdict(&report, thresholds);
    Ok(report)
}

/// `(aⱼ, bⱼ)` read off a tuple of upper-triangular 2×2 Jordan-type operators.
pub fn f4_parameters(tuple: &TupleSpec) -> Result<Vec<(f64, f64)>> {
    if tuple.n != 2 || tuple.field != Field::Real {
        return Err(Error::InvalidInput("expected a real tuple on R^2".into()));
    }
    tuple
        .operators
        .iter()
        .map(|t| {
            let (a, b) = (t[(0, 0)].re, t[(0, 1)].re);
            if t[(1, 0)].re != 0.0 || t[(1, 1)].re != a {
                return Err(Error::InvalidInput("operator is not of the form [[a,b],[0,a]]".into()));
            }
            Ok((a, b))
        })
        .collect()
}

/// `Π aⱼ^{qⱼ} · (x₁ + x₂ Σ bⱼqⱼ/aⱼ, x₂)`.
pub fn f4_closed_form(params: &[(f64, f64)], q: &[u32], x: [f64; 2]) -> [f64; 2] {
    let mut scale = 1.0;
    let mut shear = 0.0;
    for (&(a, b), &k) in params.iter().zip(q) {
        scale *= a.powi(k as i32);
        shear += b * k as f64 / a;
    }
    [scale * (x[0] + x[1] * shear), scale * x[1]]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfplaneReport {
    pub confined: bool,
    pub sign_violations: u64,
    pub points_checked: u64,
    /// Worst relative gap between the second coordinate and `x₂·Π aⱼ^{qⱼ}`.
    pub max_scale_deviation: f64,
    /// Worst relative gap between enumerated points and the closed form.
    pub max_closed_form_deviation: f64,
}

/// Checks that every orbit point of an upper-triangular 2×2 tuple keeps the
/// sign of `x₂` in its second coordinate.
pub fn halfplane_check(tuple: &TupleSpec, x: [f64; 2], budget: OrbitBudget) -> Result<HalfplaneReport> {
    if x[1] == 0.0 {
        return Err(Error::InvalidInput("x₂ must be nonzero".into()));
    }
    let params = f4_parameters(tuple)?;
    let start = [C64::new(x[0], 0.0), C64::new(x[1], 0.0)];
    let mut report = HalfplaneReport {
        confined: true,
        sign_violations: 0,
        points_checked: 0,
        max_scale_deviation: 0.0,
        max_closed_form_deviation: 0.0,
    };
    for p in enumerate_orbit(tuple, &start, budget)? {
        if !p.finite {
            continue;
        }
        report.points_checked += 1;
        let (s, t) = (p.point[0].re, p.point[1].re);
        if !(t * x[1].signum() > 0.0) {
            report.sign_violations += 1;
            report.confined = false;
        }
        let closed = f4_closed_form(&params, &p.q, x);
        let scale_dev = (t - closed[1]).abs() / closed[1].abs();
        report.max_scale_deviation = report.max_scale_deviation.max(scale_dev);
        let norm = closed[0].abs().max(closed[1].abs());
        let dev = (s - closed[0]).abs().max((t - closed[1]).abs()) / norm;
        report.max_closed_form_deviation = report.max_closed_form_deviation.max(dev);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonCyclicReport {
    pub all_non_cyclic: bool,
    pub max_krylov_rank: usize,
    pub trials: usize,
    pub commutant_dim: usize,
    /// Largest `rank(S − (tr S/n)·I)` over the tested commutant elements.
    pub max_shifted_rank: usize,
    /// `max_shifted_rank ≤ n − 2`, which rules out cyclic operators whose
    /// spectrum is a single point.
    pub rank_certificate: bool,
}

const KRYLOV_VECTORS: usize = 8;

/// Samples the commutant (basis elements and random combinations) and
/// tests each sample for cyclicity with random Krylov sequences.
pub fn verify_non_cyclic_commutant(alg: &CommutativeAlgebra, samples: usize, seed: u64) -> Result<NonCyclicReport> {
    let n = alg.n();
    let tol = *alg.tolerance();
    let basis = commutant(alg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut elements = basis.clone();
    for _ in 0..samples {
        let mut s = Matrix::zeros(alg.field(), n);
        for b in &basis {
            s = &s + &b.scale(random_scalar(alg.field(), &mut rng));
        }
        elements.push(s);
    }
    let mut max_rank = 0;
    let mut max_shifted = 0;
    let mut trials = 0;
    for s in &elements {
        for _ in 0..KRYLOV_VECTORS {
            let x = random_vector(alg.field(), n, &mut rng);
            max_rank = max_rank.max(krylov_rank(s, &x, &tol)?);
            trials += 1;
        }
        let shift = Matrix::identity(s.field(), n).scale(s.trace() / n as f64);
        max_shifted = max_shifted.max(matrix_rank(&(s - &shift), &tol));
    }
    Ok(NonCyclicReport {
        all_non_cyclic: max_rank < n,
        max_krylov_rank: max_rank,
        trials,
        commutant_dim: basis.len(),
        max_shifted_rank: max_shifted,
        rank_certificate: max_shifted + 2 <= n,
    })
}

//! Level norms of matrix-valued measures on a finite point set.
//!
//! A measure `μ ∈ M_p(M(Ω))` with `|Ω| = m` is stored as its `m` atom slices
//! `c_j ∈ M_p`. Evaluating it on an `m`-tuple of `n x n` matrices gives
//! `Σ_j v_j ⊗ c_j ∈ M_n(M_p)` ([`tmu_apply`]). The standard-dual norm is the
//! supremum of the operator norm of that evaluation over unitary tuples and
//! all levels `n`; everything reported here is a lower estimate certified by
//! a stored witness.

use serde::{Deserialize, Serialize};

use crate::dilation::dilate;
use crate::error::{Error, Result};
use crate::linalg::{
    accumulate_kronecker, ginibre, haar_unitary_from, operator_norm, ComplexMatrix, Seed, C64, ONE,
};
use crate::manifold::{
    ascend_ball, ascend_torus, ascend_unitary_product, LevelNormObjective, OptimizerConfig,
    PhaseObjective, PhaseSumObjective,
};

/// Unitarity tolerance for tuple blocks.
pub const UNITARY_TOL: f64 = 1e-9;
/// Allowed drift between a stored estimate and its re-evaluated witness.
pub const CERTIFY_TOL: f64 = 1e-9;
/// Total number of grid points used for the torus floor in `min_level_norm`.
pub const TORUS_GRID_BUDGET: usize = 1 << 18;
/// Finest grid resolution per circle.
pub const TORUS_GRID_RESOLUTION: usize = 64;
/// Largest number of atoms for which the torus grid floor is evaluated.
pub const TORUS_GRID_MAX_ATOMS: usize = 8;

const MIN_NORM_STREAM: u64 = 0x4d_494e;

/// Complex measure on `m` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicMeasure {
    atoms: Vec<C64>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<C64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Dimension("a measure needs at least one atom".into()));
        }
        if atoms.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Precondition("atoms must be finite".into()));
        }
        Ok(Self { atoms })
    }

    pub fn point_mass(m: usize, k: usize) -> Result<Self> {
        if k >= m {
            return Err(Error::Dimension(format!(
                "point {k} out of range for {m} points"
            )));
        }
        let mut atoms = vec![C64::new(0.0, 0.0); m];
        atoms[k] = ONE;
        Self::new(atoms)
    }

    pub fn atoms(&self) -> &[C64] {
        &self.atoms
    }

    pub fn m(&self) -> usize {
        self.atoms.len()
    }

    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.norm()).sum()
    }

    /// The same measure viewed at matrix level `p = 1`.
    pub fn to_matrix_measure(&self) -> MatrixMeasure {
        MatrixMeasure {
            coeffs: self
                .atoms
                .iter()
                .map(|&a| ComplexMatrix::scalar(a))
                .collect(),
        }
    }
}

/// Element of `M_p(M(Ω))` stored as `m` coefficient matrices in `M_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixMeasure {
    coeffs: Vec<ComplexMatrix>,
}

impl MatrixMeasure {
    pub fn new(coeffs: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = coeffs.first() else {
            return Err(Error::Dimension("a measure needs at least one atom".into()));
        };
        let p = first.rows();
        if let Some(j) = coeffs.iter().position(|c| c.rows() != p || c.cols() != p) {
            return Err(Error::Dimension(format!(
                "coefficient {j} is {}x{}, expected {p}x{p}",
                coeffs[j].rows(),
                coeffs[j].cols()
            )));
        }
        Ok(Self { coeffs })
    }

    pub fn zero(p: usize, m: usize) -> Self {
        Self {
            coeffs: vec![ComplexMatrix::zeros(p, p); m],
        }
    }

    /// `δ_{ω_k}` at level `p = 1`.
    pub fn point_mass(m: usize, k: usize) -> Result<Self> {
        Ok(AtomicMeasure::point_mass(m, k)?.to_matrix_measure())
    }

    /// `m` independent Haar unitaries in `M_p`.
    pub fn haar_coefficients(p: usize, m: usize, seed: Seed) -> Result<Self> {
        let mut rng = seed.rng();
        let coeffs = (0..m)
            .map(|_| haar_unitary_from(p, &mut rng))
            .collect::<Result<_>>()?;
        Self::new(coeffs)
    }

    /// `m` independent complex Gaussian `p x p` coefficients, scaled by `1/sqrt(p)`.
    pub fn gaussian(p: usize, m: usize, seed: Seed) -> Result<Self> {
        if p == 0 || m == 0 {
            return Err(Error::Dimension("p and m must be positive".into()));
        }
        let mut rng = seed.rng();
        let s = 1.0 / (p as f64).sqrt();
        Self::new(
            (0..m)
                .map(|_| ginibre(p, p, &mut rng).scale_real(s))
                .collect(),
        )
    }

    pub fn p(&self) -> usize {
        self.coeffs[0].rows()
    }

    pub fn m(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[ComplexMatrix] {
        &self.coeffs
    }

    /// `Σ_j ‖c_j‖`, an upper bound for every level norm.
    pub fn triangle_bound(&self) -> f64 {
        self.coeffs.iter().map(operator_norm).sum()
    }

    /// Phases `conj(tr c_j / |tr c_j|)`; optimal when `p = 1`.
    pub fn aligned_phases(&self) -> Vec<C64> {
        self.coeffs
            .iter()
            .map(|c| {
                let t = c.trace();
                if t.norm() > 0.0 {
                    (t / t.norm()).conj()
                } else {
                    ONE
                }
            })
            .collect()
    }
}

/// `m`-tuple of `n x n` unitaries, a point of `C(Ω; U_n)` for finite `Ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ComplexMatrix>", into = "Vec<ComplexMatrix>")]
pub struct UnitaryTuple {
    blocks: Vec<ComplexMatrix>,
}

impl TryFrom<Vec<ComplexMatrix>> for UnitaryTuple {
    type Error = Error;
    fn try_from(blocks: Vec<ComplexMatrix>) -> Result<Self> {
        Self::new(blocks)
    }
}

impl From<UnitaryTuple> for Vec<ComplexMatrix> {
    fn from(t: UnitaryTuple) -> Self {
        t.blocks
    }
}

impl UnitaryTuple {
    pub fn new(blocks: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = blocks.first() else {
            return Err(Error::Dimension(
                "a unitary tuple needs at least one block".into(),
            ));
        };
        let n = first.rows();
        for (j, b) in blocks.iter().enumerate() {
            if b.rows() != n || b.cols() != n {
                return Err(Error::Dimension(format!(
                    "block {j} is {}x{}, expected {n}x{n}",
                    b.rows(),
                    b.cols()
                )));
            }
            let r = b.unitarity_residual();
            if r > UNITARY_TOL {
                return Err(Error::Precondition(format!(
                    "block {j} is not unitary (residual {r:e})"
                )));
            }
        }
        Ok(Self { blocks })
    }

    pub(crate) fn from_blocks_unchecked(blocks: Vec<ComplexMatrix>) -> Self {
        Self { blocks }
    }

    pub fn identity(n: usize, m: usize) -> Self {
        Self {
            blocks: vec![ComplexMatrix::identity(n); m],
        }
    }

    /// Scalar tuple `z_j I_n`.
    pub fn from_phases(phases: &[C64], n: usize) -> Self {
        Self {
            blocks: phases
                .iter()
                .map(|&z| ComplexMatrix::identity(n).scale(z / z.norm()))
                .collect(),
        }
    }

    pub fn haar(n: usize, m: usize, seed: Seed) -> Result<Self> {
        Self::haar_from(n, m, &mut seed.rng())
    }

    pub fn haar_from(n: usize, m: usize, rng: &mut impl rand::Rng) -> Result<Self> {
        if m == 0 {
            return Err(Error::Dimension(
                "a unitary tuple needs at least one block".into(),
            ));
        }
        let blocks = (0..m)
            .map(|_| haar_unitary_from(n, rng))
            .collect::<Result<_>>()?;
        Ok(Self { blocks })
    }

    pub fn n(&self) -> usize {
        self.blocks[0].rows()
    }

    pub fn m(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn max_unitarity_residual(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.unitarity_residual())
            .fold(0.0, f64::max)
    }

    /// Direct sum with an identity block, lifting to level `n`.
    pub fn pad_to(&self, n: usize) -> Result<Self> {
        let cur = self.n();
        if n < cur {
            return Err(Error::Dimension(format!(
                "cannot pad level {cur} down to {n}"
            )));
        }
        if n == cur {
            return Ok(self.clone());
        }
        let pad = ComplexMatrix::identity(n - cur);
        Ok(Self {
            blocks: self
                .blocks
                .iter()
                .map(|b| ComplexMatrix::block_diag(&[b.clone(), pad.clone()]))
                .collect(),
        })
    }

    /// `I_k ⊗ u_j`: each block repeated `k` times along the diagonal.
    pub fn inflate(&self, k: usize) -> Self {
        Self {
            blocks: self
                .blocks
                .iter()
                .map(|b| ComplexMatrix::block_diag(&vec![b.clone(); k]))
                .collect(),
        }
    }

    /// Entrywise complex conjugate of every block.
    pub fn conj(&self) -> Self {
        Self {
            blocks: self.blocks.iter().map(|b| b.conj()).collect(),
        }
    }
}

/// What a [`NormEstimate`] was attained at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Witness {
    Unitaries(UnitaryTuple),
    Contractions(Vec<ComplexMatrix>),
    Phases(Vec<C64>),
}

impl Witness {
    pub fn evaluate(&self, mu: &MatrixMeasure) -> Result<f64> {
        match self {
            Witness::Unitaries(u) => Ok(operator_norm(&tmu_apply(mu, u)?)),
            Witness::Contractions(v) => Ok(operator_norm(&tmu_apply_blocks(mu, v)?)),
            Witness::Phases(z) => {
                if z.len() != mu.m() {
                    return Err(Error::Dimension(format!(
                        "{} phases for a measure on {} points",
                        z.len(),
                        mu.m()
                    )));
                }
                Ok(phase_sum_norm(mu, z))
            }
        }
    }
}

/// A certified lower estimate of a level norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub witness: Witness,
    pub level: usize,
    pub restarts_used: usize,
    pub converged: bool,
}

impl NormEstimate {
    /// Re-evaluates the witness and checks it against the stored value.
    pub fn recertify(&self, mu: &MatrixMeasure) -> Result<f64> {
        let recomputed = self.witness.evaluate(mu)?;
        if (recomputed - self.value).abs() > CERTIFY_TOL {
            return Err(Error::Certification {
                stored: self.value,
                recomputed,
            });
        }
        Ok(recomputed)
    }
}

/// `Σ_j u_j ⊗ c_j`, the level-n evaluation `(T_μ)_n(u)` in `M_n(M_p)`.
pub fn tmu_apply(mu: &MatrixMeasure, u: &UnitaryTuple) -> Result<ComplexMatrix> {
    tmu_apply_blocks(mu, u.blocks())
}

/// [`tmu_apply`] for arbitrary square blocks of a common size.
pub fn tmu_apply_blocks(mu: &MatrixMeasure, blocks: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    if blocks.len() != mu.m() {
        return Err(Error::Dimension(format!(
            "{} blocks for a measure on {} points",
            blocks.len(),
            mu.m()
        )));
    }
    let n = blocks[0].rows();
    if let Some(j) = blocks.iter().position(|b| b.rows() != n || b.cols() != n) {
        return Err(Error::Dimension(format!("block {j} is not {n}x{n}")));
    }
    let p = mu.p();
    let mut out = ComplexMatrix::zeros(n * p, n * p);
    for (b, c) in blocks.iter().zip(mu.coeffs()) {
        accumulate_kronecker(&mut out, b, c);
    }
    Ok(out)
}

fn phase_sum_norm(mu: &MatrixMeasure, phases: &[C64]) -> f64 {
    let p = mu.p();
    let sum = phases
        .iter()
        .zip(mu.coeffs())
        .fold(ComplexMatrix::zeros(p, p), |acc, (&z, c)| {
            &acc + &c.scale(z)
        });
    operator_norm(&sum)
}

struct Run<P> {
    value: f64,
    point: P,
    converged: bool,
}

/// Maximum with the smallest index winning ties.
fn best_run<P>(runs: Vec<Run<P>>) -> Option<Run<P>> {
    runs.into_iter()
        .reduce(|best, r| if r.value > best.value { r } else { best })
}

#[cfg(feature = "parallel")]
fn map_ordered<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_ordered<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.iter().map(f).collect()
}

fn reaches_bound(value: f64, bound: f64) -> bool {
    value >= bound * (1.0 - 1e-12)
}

/// Level-n estimate of `sup_u ‖(T_μ)_n(u)‖` over unitary tuples.
///
/// Besides `cfg.restarts` Haar-random starts, the ascent is also started at
/// the scalar tuple built from the best phase vector of [`min_level_norm`], so
/// the result always dominates the commutative norm.
pub fn maxl1_level_norm(
    mu: &MatrixMeasure,
    n: usize,
    cfg: &OptimizerConfig,
    seed: Seed,
) -> Result<NormEstimate> {
    let floor = min_level_norm(mu, cfg, seed.split(MIN_NORM_STREAM))?;
    let Witness::Phases(z) = &floor.witness else {
        unreachable!("min_level_norm returns a phase witness")
    };
    let warm = UnitaryTuple::from_phases(z, n.max(1));
    maxl1_level_norm_with_starts(mu, n, cfg, seed, &[warm])
}

/// [`maxl1_level_norm`] with caller-supplied warm starts, which are run before
/// the random restarts. Warm starts at a lower level are padded with an
/// identity block. If some run attains the triangle bound `Σ‖c_j‖` the
/// remaining runs are skipped, since no tuple can exceed it.
pub fn maxl1_level_norm_with_starts(
    mu: &MatrixMeasure,
    n: usize,
    cfg: &OptimizerConfig,
    seed: Seed,
    warm_starts: &[UnitaryTuple],
) -> Result<NormEstimate> {
    if n == 0 {
        return Err(Error::Dimension("level must be at least 1".into()));
    }
    cfg.validate()?;
    let objective = LevelNormObjective::new(mu);
    let bound = mu.triangle_bound();

    let mut fixed = Vec::with_capacity(warm_starts.len() + 1);
    for w in warm_starts {
        if w.m() != mu.m() {
            return Err(Error::Dimension(format!(
                "warm start has {} blocks, measure has {} points",
                w.m(),
                mu.m()
            )));
        }
        fixed.push(w.pad_to(n)?);
    }
    fixed.push(UnitaryTuple::from_phases(&mu.aligned_phases(), n));

    let run = |start: &UnitaryTuple| -> Result<Run<UnitaryTuple>> {
        let initial = operator_norm(&tmu_apply(mu, start)?);
        if reaches_bound(initial, bound) {
            return Ok(Run {
                value: initial,
                point: start.clone(),
                converged: true,
            });
        }
        let trace = ascend_unitary_product(&objective, start, cfg)?;
        let value = operator_norm(&tmu_apply(mu, &trace.point)?);
        Ok(Run {
            value,
            point: trace.point,
            converged: trace.converged,
        })
    };

    let mut runs = Vec::new();
    for start in &fixed {
        let r = run(start)?;
        let done = reaches_bound(r.value, bound);
        runs.push(r);
        if done {
            break;
        }
    }
    let attained = runs.iter().any(|r| reaches_bound(r.value, bound));
    if !attained {
        let starts = (0..cfg.restarts)
            .map(|r| UnitaryTuple::haar(n, mu.m(), seed.split(r as u64)))
            .collect::<Result<Vec<_>>>()?;
        for r in map_ordered(&starts, run) {
            runs.push(r?);
        }
    }
    let restarts_used = runs.len();
    let best = best_run(runs).expect("at least one run");
    Ok(NormEstimate {
        value: best.value,
        witness: Witness::Unitaries(best.point),
        level: n,
        restarts_used,
        converged: best.converged,
    })
}

/// Level-n estimate of the supremum over tuples of contractions.
///
/// One run starts from the unitary witness of [`maxl1_level_norm`] at the
/// same level and seed, so the ball value never falls below it.
pub fn ball_level_norm(
    mu: &MatrixMeasure,
    n: usize,
    cfg: &OptimizerConfig,
    seed: Seed,
) -> Result<NormEstimate> {
    let unitary = maxl1_level_norm(mu, n, cfg, seed)?;
    let Witness::Unitaries(u) = &unitary.witness else {
        unreachable!("maxl1_level_norm returns a unitary witness")
    };
    let objective = LevelNormObjective::new(mu);

    let mut starts = vec![u.blocks().to_vec()];
    for r in 0..cfg.restarts {
        let mut rng = seed.split(0xBA11 + r as u64).rng();
        let t = UnitaryTuple::haar_from(n, mu.m(), &mut rng)?;
        let scale = 0.5 + 0.5 * rand::Rng::random::<f64>(&mut rng);
        starts.push(t.blocks().iter().map(|b| b.scale_real(scale)).collect());
    }
    let runs = map_ordered(&starts, |start| -> Result<Run<Vec<ComplexMatrix>>> {
        let trace = ascend_ball(&objective, start, cfg)?;
        let value = operator_norm(&tmu_apply_blocks(mu, &trace.point)?);
        Ok(Run {
            value,
            point: trace.point,
            converged: trace.converged,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let restarts_used = runs.len();
    let best = best_run(runs).expect("at least one run");
    Ok(NormEstimate {
        value: best.value,
        witness: Witness::Contractions(best.point),
        level: n,
        restarts_used,
        converged: best.converged,
    })
}

/// Grid resolution per circle for a measure on `m` points (first phase fixed).
pub fn torus_grid_resolution(m: usize) -> usize {
    if m <= 1 {
        return 1;
    }
    let per_circle = (TORUS_GRID_BUDGET as f64)
        .powf(1.0 / (m - 1) as f64)
        .floor() as usize;
    per_circle.clamp(1, TORUS_GRID_RESOLUTION)
}

/// Exhaustive search over `{1} x G^{m-1}` where `G` holds `resolution`
/// equally spaced phases. The common phase is fixed since it does not
/// change the norm.
pub fn torus_grid_search(mu: &MatrixMeasure, resolution: usize) -> (f64, Vec<C64>) {
    let m = mu.m();
    let objective = PhaseSumObjective::new(mu);
    let step = std::f64::consts::TAU / resolution.max(1) as f64;
    let total = resolution.pow((m - 1) as u32);
    let decode = |mut idx: usize| -> Vec<f64> {
        let mut angles = vec![0.0; m];
        for a in angles.iter_mut().skip(1) {
            *a = (idx % resolution) as f64 * step;
            idx /= resolution;
        }
        angles
    };
    let chunk = 4096usize;
    let chunks: Vec<usize> = (0..total.div_ceil(chunk)).collect();
    let partial = map_ordered(&chunks, |&c| {
        let mut best = (f64::NEG_INFINITY, 0usize);
        for idx in c * chunk..((c + 1) * chunk).min(total) {
            let v = objective.value(&decode(idx));
            if v > best.0 {
                best = (v, idx);
            }
        }
        best
    });
    let (value, idx) = partial
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("non-empty grid");
    (
        value,
        decode(idx)
            .iter()
            .map(|&t| C64::from_polar(1.0, t))
            .collect(),
    )
}

/// Estimate of `sup_{z ∈ T^m} ‖Σ_j z_j c_j‖`, the commutative (min) norm.
pub fn min_level_norm(
    mu: &MatrixMeasure,
    cfg: &OptimizerConfig,
    seed: Seed,
) -> Result<NormEstimate> {
    cfg.validate()?;
    let m = mu.m();
    let objective = PhaseSumObjective::new(mu);

    let mut starts = vec![mu.aligned_phases()];
    let mut grid_floor = None;
    if m <= TORUS_GRID_MAX_ATOMS {
        let (value, phases) = torus_grid_search(mu, torus_grid_resolution(m));
        starts.push(phases.clone());
        grid_floor = Some((value, phases));
    }
    let mut rng = seed.rng();
    for _ in 0..cfg.restarts {
        starts.push(
            (0..m)
                .map(|_| {
                    C64::from_polar(
                        1.0,
                        std::f64::consts::TAU * rand::Rng::random::<f64>(&mut rng),
                    )
                })
                .collect(),
        );
    }
    let mut runs = map_ordered(&starts, |start| -> Result<Run<Vec<C64>>> {
        let trace = ascend_torus(&objective, start, cfg)?;
        let value = phase_sum_norm(mu, &trace.point);
        Ok(Run {
            value,
            point: trace.point,
            converged: trace.converged,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let restarts_used = runs.len();
    if let Some((_, phases)) = grid_floor {
        let value = phase_sum_norm(mu, &phases);
        runs.push(Run {
            value,
            point: phases,
            converged: false,
        });
    }
    let best = best_run(runs).expect("at least one run");
    Ok(NormEstimate {
        value: best.value,
        witness: Witness::Phases(best.point),
        level: 1,
        restarts_used,
        converged: best.converged,
    })
}

/// `max_{n ≤ n_max}` of the level-n unitary estimates. Each level is
/// warm-started from the best witness so far, so the sequence is
/// nondecreasing; ties keep the smallest level.
pub fn sd_norm(
    mu: &MatrixMeasure,
    n_max: usize,
    cfg: &OptimizerConfig,
    seed: Seed,
) -> Result<NormEstimate> {
    if n_max == 0 {
        return Err(Error::Dimension("n_max must be at least 1".into()));
    }
    let floor = min_level_norm(mu, cfg, seed.split(MIN_NORM_STREAM))?;
    let Witness::Phases(z) = &floor.witness else {
        unreachable!("min_level_norm returns a phase witness")
    };
    let mut best: Option<NormEstimate> = None;
    let mut restarts_used = floor.restarts_used;
    for n in 1..=n_max {
        let mut warm = vec![UnitaryTuple::from_phases(z, n)];
        if let Some(Witness::Unitaries(u)) = best.as_ref().map(|b| &b.witness) {
            warm.push(u.pad_to(n)?);
        }
        let est = maxl1_level_norm_with_starts(mu, n, cfg, seed.split(n as u64), &warm)?;
        restarts_used += est.restarts_used;
        let improves = match &best {
            None => true,
            Some(b) => est.value > b.value + 1e-12 * b.value.max(1.0),
        };
        if improves {
            best = Some(est);
        }
    }
    let mut best = best.expect("n_max >= 1");
    best.restarts_used = restarts_used;
    Ok(best)
}

/// `n / (2 sqrt(n - 1))`, the lower bound for the cb-distance between
/// `max ℓ₁^n` and any n-dimensional subspace of the compact operators.
pub fn pisier_bound(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("bound needs n >= 2, got {n}")));
    }
    let n = n as f64;
    Ok(n / (2.0 * (n - 1.0).sqrt()))
}

/// `‖(T_μ)_{2n}(U_v)‖` for a tuple of contractions `v`, dilating each block.
pub fn dilated_value(
    mu: &MatrixMeasure,
    contractions: &[ComplexMatrix],
) -> Result<(f64, UnitaryTuple)> {
    let blocks = contractions
        .iter()
        .map(|v| dilate(v).map(|d| d.result))
        .collect::<Result<Vec<_>>>()?;
    let tuple = UnitaryTuple::new(blocks)?;
    Ok((operator_norm(&tmu_apply(mu, &tuple)?), tuple))
}

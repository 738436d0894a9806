//! Projected-gradient ascent over products of unitary groups, tori and
//! contraction balls.
//!
//! All three engines share one line search: a candidate step is accepted only
//! if it strictly improves the objective, otherwise the step is halved. A run
//! stops when the relative gain of an accepted step drops below
//! `convergence_tol`, when no improving step exists, or after `max_iters`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    accumulate_kronecker, clip_to_ball, operator_norm, polar_unitary, svd, ComplexMatrix, C64,
};
use crate::norms::{MatrixMeasure, UnitaryTuple};

/// Top singular values closer than this are treated as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;

const MAX_HALVINGS: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub step_size: f64,
    pub convergence_tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iters: 500,
            step_size: 0.1,
            convergence_tol: 1e-8,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::Precondition(
                "restarts and max_iters must be positive".into(),
            ));
        }
        if !(self.step_size > 0.0 && self.convergence_tol > 0.0)
            || !self.step_size.is_finite()
            || !self.convergence_tol.is_finite()
        {
            return Err(Error::Precondition(
                "step_size and convergence_tol must be positive and finite".into(),
            ));
        }
        Ok(())
    }
}

/// Objective values of every accepted iterate, plus the final point.
#[derive(Debug, Clone)]
pub struct AscentTrace<P> {
    pub values: Vec<f64>,
    pub point: P,
    pub converged: bool,
    pub iterations: usize,
}

impl<P> AscentTrace<P> {
    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("trace holds the start value")
    }

    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }
}

/// Real-valued objective on tuples of square matrices with its Euclidean
/// gradient, one matrix per factor, w.r.t. the real inner product
/// `Re tr(G* X)`.
pub trait TupleObjective: Sync {
    fn value(&self, point: &[ComplexMatrix]) -> f64;
    fn value_and_gradient(&self, point: &[ComplexMatrix]) -> (f64, Vec<ComplexMatrix>);
}

/// Real-valued objective on phase angles with its gradient.
pub trait PhaseObjective: Sync {
    fn value(&self, angles: &[f64]) -> f64;
    fn value_and_gradient(&self, angles: &[f64]) -> (f64, Vec<f64>);
}

/// `v ↦ ‖Σ_j v_j ⊗ c_j‖`, the largest singular value of the level-n
/// evaluation of a matrix measure.
#[derive(Debug, Clone, Copy)]
pub struct LevelNormObjective<'a> {
    coeffs: &'a [ComplexMatrix],
}

impl<'a> LevelNormObjective<'a> {
    pub fn new(mu: &'a MatrixMeasure) -> Self {
        Self {
            coeffs: mu.coeffs(),
        }
    }

    fn evaluate(&self, point: &[ComplexMatrix]) -> ComplexMatrix {
        let n = point[0].rows();
        let p = self.coeffs[0].rows();
        let mut out = ComplexMatrix::zeros(n * p, n * p);
        for (v, c) in point.iter().zip(self.coeffs) {
            accumulate_kronecker(&mut out, v, c);
        }
        out
    }

    /// `G_j = U conj(c_j) V*` where `U`, `V` are the singular vectors
    /// reshaped to `n x p`.
    fn pullback(&self, left: &[C64], right: &[C64], n: usize) -> Vec<ComplexMatrix> {
        let p = self.coeffs[0].rows();
        let lmat = ComplexMatrix::from_fn(n, p, |i, s| left[i * p + s]);
        let rmat_adj = ComplexMatrix::from_fn(p, n, |t, k| right[k * p + t].conj());
        self.coeffs
            .iter()
            .map(|c| &(&lmat * &c.conj()) * &rmat_adj)
            .collect()
    }
}

impl TupleObjective for LevelNormObjective<'_> {
    fn value(&self, point: &[ComplexMatrix]) -> f64 {
        crate::linalg::singular_values(&self.evaluate(point))[0]
    }

    fn value_and_gradient(&self, point: &[ComplexMatrix]) -> (f64, Vec<ComplexMatrix>) {
        let n = point[0].rows();
        let d = svd(&self.evaluate(point));
        let s = &d.singular_values;
        let mut grad = self.pullback(&d.left_vector(0), &d.right_vector(0), n);
        if s.len() > 1 && s[0] - s[1] < DEGENERACY_GAP {
            // subgradient surrogate: gradient of the mean of the top two
            let second = self.pullback(&d.left_vector(1), &d.right_vector(1), n);
            grad = grad
                .iter()
                .zip(&second)
                .map(|(a, b)| (a + b).scale_real(0.5))
                .collect();
        }
        (s[0], grad)
    }
}

/// `θ ↦ ‖Σ_j e^{iθ_j} c_j‖`
#[derive(Debug, Clone, Copy)]
pub struct PhaseSumObjective<'a> {
    coeffs: &'a [ComplexMatrix],
}

impl<'a> PhaseSumObjective<'a> {
    pub fn new(mu: &'a MatrixMeasure) -> Self {
        Self {
            coeffs: mu.coeffs(),
        }
    }

    pub fn from_coeffs(coeffs: &'a [ComplexMatrix]) -> Self {
        Self { coeffs }
    }

    fn evaluate(&self, angles: &[f64]) -> ComplexMatrix {
        let p = self.coeffs[0].rows();
        angles
            .iter()
            .zip(self.coeffs)
            .fold(ComplexMatrix::zeros(p, p), |acc, (&t, c)| {
                &acc + &c.scale(C64::from_polar(1.0, t))
            })
    }

    fn partials(&self, angles: &[f64], left: &[C64], right: &[C64]) -> Vec<f64> {
        // d/dθ_j Re(u* M v) = Re(i z_j u* c_j v) = -Im(z_j u* c_j v)
        angles
            .iter()
            .zip(self.coeffs)
            .map(|(&t, c)| {
                let cv = c.mul_vec(right);
                let ucv: C64 = left.iter().zip(&cv).map(|(a, b)| a.conj() * b).sum();
                -(C64::from_polar(1.0, t) * ucv).im
            })
            .collect()
    }
}

impl PhaseObjective for PhaseSumObjective<'_> {
    fn value(&self, angles: &[f64]) -> f64 {
        crate::linalg::singular_values(&self.evaluate(angles))[0]
    }

    fn value_and_gradient(&self, angles: &[f64]) -> (f64, Vec<f64>) {
        let d = svd(&self.evaluate(angles));
        let s = &d.singular_values;
        let mut grad = self.partials(angles, &d.left_vector(0), &d.right_vector(0));
        if s.len() > 1 && s[0] - s[1] < DEGENERACY_GAP {
            let second = self.partials(angles, &d.left_vector(1), &d.right_vector(1));
            grad = grad
                .iter()
                .zip(&second)
                .map(|(a, b)| 0.5 * (a + b))
                .collect();
        }
        (s[0], grad)
    }
}

/// Shared accept-or-halve loop.
fn ascend<P: Clone, G>(
    start: P,
    cfg: &OptimizerConfig,
    value_and_gradient: impl Fn(&P) -> (f64, G),
    value: impl Fn(&P) -> f64,
    gradient_is_zero: impl Fn(&G) -> bool,
    step: impl Fn(&P, &G, f64) -> P,
) -> AscentTrace<P> {
    let mut point = start;
    let (mut f, mut g) = value_and_gradient(&point);
    let mut values = vec![f];
    let mut eta = cfg.step_size;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        iterations += 1;
        if gradient_is_zero(&g) {
            converged = true;
            break;
        }
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let cand = step(&point, &g, eta);
            let fc = value(&cand);
            if fc > f {
                accepted = Some((cand, fc));
                break;
            }
            eta *= 0.5;
        }
        let Some((cand, fc)) = accepted else {
            converged = true;
            break;
        };
        let gain = (fc - f) / f.abs().max(f64::MIN_POSITIVE);
        point = cand;
        (f, g) = value_and_gradient(&point);
        // the accepted value is recomputed alongside the gradient; keep the trace monotone
        f = f.max(fc);
        values.push(f);
        if gain < cfg.convergence_tol {
            converged = true;
            break;
        }
        eta = (2.0 * eta).min(cfg.step_size);
    }
    AscentTrace {
        values,
        point,
        converged,
        iterations,
    }
}

fn skew_hermitian_part(x: &ComplexMatrix) -> ComplexMatrix {
    (x - &x.adjoint()).scale_real(0.5)
}

/// Riemannian ascent on `U(n)^m` with polar retraction.
pub fn ascend_unitary_product(
    objective: &impl TupleObjective,
    start: &UnitaryTuple,
    cfg: &OptimizerConfig,
) -> Result<AscentTrace<UnitaryTuple>> {
    cfg.validate()?;
    let residual = start.max_unitarity_residual();
    if residual > crate::norms::UNITARY_TOL {
        return Err(Error::Precondition(format!(
            "start tuple is not unitary (residual {residual:e})"
        )));
    }
    let trace = ascend(
        start.blocks().to_vec(),
        cfg,
        |x| {
            let (f, g) = objective.value_and_gradient(x);
            // project onto the tangent space u·skew(u* g)
            let tangent = x
                .iter()
                .zip(&g)
                .map(|(u, gj)| u * &skew_hermitian_part(&(&u.adjoint() * gj)))
                .collect::<Vec<_>>();
            (f, tangent)
        },
        |x| objective.value(x),
        |g: &Vec<ComplexMatrix>| g.iter().all(|t| t.max_abs() == 0.0),
        |x, g, eta| {
            x.iter()
                .zip(g)
                .map(|(u, t)| polar_unitary(&(u + &t.scale_real(eta))))
                .collect()
        },
    );
    Ok(AscentTrace {
        values: trace.values,
        point: UnitaryTuple::from_blocks_unchecked(trace.point),
        converged: trace.converged,
        iterations: trace.iterations,
    })
}

/// Gradient ascent in phase angles; iterates stay exactly unimodular.
pub fn ascend_torus(
    objective: &impl PhaseObjective,
    start: &[C64],
    cfg: &OptimizerConfig,
) -> Result<AscentTrace<Vec<C64>>> {
    cfg.validate()?;
    if let Some(j) = start
        .iter()
        .position(|z| z.norm() == 0.0 || !z.norm().is_finite())
    {
        return Err(Error::Precondition(format!(
            "start phase {j} has zero modulus"
        )));
    }
    let angles: Vec<f64> = start.iter().map(|z| z.arg()).collect();
    let trace = ascend(
        angles,
        cfg,
        |x| objective.value_and_gradient(x),
        |x| objective.value(x),
        |g: &Vec<f64>| g.iter().all(|&d| d == 0.0),
        |x, g, eta| x.iter().zip(g).map(|(t, d)| t + eta * d).collect(),
    );
    Ok(AscentTrace {
        values: trace.values,
        point: trace
            .point
            .iter()
            .map(|&t| C64::from_polar(1.0, t))
            .collect(),
        converged: trace.converged,
        iterations: trace.iterations,
    })
}

/// Euclidean ascent over tuples of contractions with singular-value clipping.
pub fn ascend_ball(
    objective: &impl TupleObjective,
    start: &[ComplexMatrix],
    cfg: &OptimizerConfig,
) -> Result<AscentTrace<Vec<ComplexMatrix>>> {
    cfg.validate()?;
    for (j, v) in start.iter().enumerate() {
        let norm = operator_norm(v);
        if norm > 1.0 + crate::dilation::CONTRACTION_SLACK {
            return Err(Error::Precondition(format!(
                "start block {j} has norm {norm} > 1"
            )));
        }
    }
    Ok(ascend(
        start.to_vec(),
        cfg,
        |x| objective.value_and_gradient(x),
        |x| objective.value(x),
        |g: &Vec<ComplexMatrix>| g.iter().all(|t| t.max_abs() == 0.0),
        |x, g, eta| {
            x.iter()
                .zip(g)
                .map(|(v, gj)| clip_to_ball(&(v + &gj.scale_real(eta))))
                .collect()
        },
    ))
}

//! Unitarization devices: the 2x2 block unitary dilation of a contraction
//! and the decomposition of a matrix into four unitaries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, operator_norm, svd, ComplexMatrix, C64, I, ONE, ZERO};

/// Operator norms up to `1 + CONTRACTION_SLACK` are rescaled onto the unit sphere.
pub const CONTRACTION_SLACK: f64 = 1e-10;

/// A contraction together with its block unitary dilation
///
/// ```text
///     [ (1 - a a*)^{1/2}        a        ]
///     [       -a*        (1 - a* a)^{1/2} ]
/// ```
#[derive(Debug, Clone)]
pub struct Dilation {
    pub source: ComplexMatrix,
    pub result: ComplexMatrix,
}

impl Dilation {
    pub fn unitarity_residual(&self) -> f64 {
        self.result
            .unitarity_residual()
            .max(self.result.co_unitarity_residual())
    }
}

/// Builds the block unitary `U_a` of a square contraction `a`.
pub fn dilate(a: &ComplexMatrix) -> Result<Dilation> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "dilation needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let norm = operator_norm(a);
    if norm > 1.0 + CONTRACTION_SLACK {
        return Err(Error::NotContraction { norm });
    }
    let source = if norm > 1.0 {
        a.scale_real(1.0 / norm)
    } else {
        a.clone()
    };
    let n = source.rows();
    let adj = source.adjoint();
    let (left_defect, right_defect) = defects(&source);

    let mut result = ComplexMatrix::zeros(2 * n, 2 * n);
    result.set_block(0, 0, &left_defect);
    result.set_block(0, n, &source);
    result.set_block(n, 0, &(-&adj));
    result.set_block(n, n, &right_defect);
    Ok(Dilation { source, result })
}

/// `(1 - a a*)^{1/2}` and `(1 - a* a)^{1/2}` from one SVD `a = W Σ V*`, as
/// `W (1 - Σ²)^{1/2} W*` and `V (1 - Σ²)^{1/2} V*`. Sharing the singular
/// vectors keeps `D a = a D'` exact to rounding even when `σ ≈ 1`, where
/// separate eigendecompositions of the two defects drift apart by `O(√ε)`.
fn defects(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let d = svd(a);
    let root: Vec<C64> = d
        .singular_values
        .iter()
        .map(|&s| {
            let s = s.min(1.0);
            C64::new(((1.0 - s) * (1.0 + s)).sqrt(), 0.0)
        })
        .collect();
    let diag = ComplexMatrix::from_diag(&root);
    let left = &(&d.u * &diag) * &d.u.adjoint();
    let right = &(&d.v * &diag) * &d.v.adjoint();
    (left, right)
}

/// Top-right `n x n` block of a `2n x 2n` matrix.
pub fn compress_12(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !u.is_square() || !u.rows().is_multiple_of(2) {
        return Err(Error::Dimension(format!(
            "compression needs an even square matrix, got {}x{}",
            u.rows(),
            u.cols()
        )));
    }
    let n = u.rows() / 2;
    Ok(u.block(0, n, n, n))
}

/// One summand `coefficient * unitary` of a four-unitary decomposition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnitaryTerm {
    pub coefficient: C64,
    pub unitary: ComplexMatrix,
}

/// Writes `a` as `Σ c_k u_k` with four unitaries `u_k` and `Σ|c_k| ≤ 2‖a‖`.
///
/// `a = H + iK` with Hermitian `H`, `K`; each part is scaled to a
/// contraction `h` and written as `(w + w*)/2` with `w = h + i(1 - h²)^{1/2}`.
pub fn four_unitaries(a: &ComplexMatrix) -> Result<[UnitaryTerm; 4]> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "four_unitaries needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let id = ComplexMatrix::identity(n);
    let trivial = |c: C64, u: ComplexMatrix| UnitaryTerm {
        coefficient: c,
        unitary: u,
    };

    if a.max_abs() == 0.0 {
        return Ok(std::array::from_fn(|_| trivial(ZERO, id.clone())));
    }
    if a.unitarity_residual() <= 1e-12 {
        return Ok([
            trivial(ONE, a.clone()),
            trivial(ZERO, id.clone()),
            trivial(ZERO, id.clone()),
            trivial(ZERO, id.clone()),
        ]);
    }

    let adj = a.adjoint();
    let real_part = (a + &adj).scale_real(0.5);
    let imag_part = (a - &adj).scale(C64::new(0.0, -0.5));

    let split = |h: &ComplexMatrix, phase: C64| -> Result<[UnitaryTerm; 2]> {
        let s = operator_norm(h);
        if s == 0.0 {
            return Ok([trivial(ZERO, id.clone()), trivial(ZERO, id.clone())]);
        }
        // w = h + i(1 - h²)^{1/2} evaluated on the spectrum of h = H/‖H‖
        let (vals, vecs) = hermitian_eigen(h)?;
        let phases: Vec<C64> = vals
            .iter()
            .map(|&x| {
                let x = (x / s).clamp(-1.0, 1.0);
                C64::new(x, ((1.0 - x) * (1.0 + x)).sqrt())
            })
            .collect();
        let w = &(&vecs * &ComplexMatrix::from_diag(&phases)) * &vecs.adjoint();
        let w_adj = w.adjoint();
        let c = phase * (s / 2.0);
        Ok([trivial(c, w), trivial(c, w_adj)])
    };

    let [r1, r2] = split(&real_part, ONE)?;
    let [i1, i2] = split(&imag_part, I)?;
    Ok([r1, r2, i1, i2])
}

/// `Σ c_k u_k`
pub fn recombine(terms: &[UnitaryTerm]) -> ComplexMatrix {
    let n = terms[0].unitary.rows();
    terms.iter().fold(ComplexMatrix::zeros(n, n), |acc, t| {
        &acc + &t.unitary.scale(t.coefficient)
    })
}

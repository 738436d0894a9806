//! Finite truncations of the standard-dual embedding of measures on a
//! finite point set into a product of matrix algebras.
//!
//! An [`EmbeddingSample`] is an ordered list of unitary tuples `u_i`, each
//! at its own level `n_i`. A measure maps to the block-diagonal operator with
//! blocks `(T_μ)_{n_i}(u_i)`; trace-class tuples pair with such operators by
//! `Σ_i Tr(S_i X_i)` and pull back to functions on the point set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inner, operator_norm, singular_values, ComplexMatrix, Seed, C64};
use crate::norms::{tmu_apply, AtomicMeasure, MatrixMeasure, UnitaryTuple};

/// Levels drawn by [`EmbeddingSample::default_for`].
pub const DEFAULT_LEVELS: [usize; 3] = [1, 2, 4];
/// Haar tuples per level in the default sample.
pub const DEFAULT_TUPLES_PER_LEVEL: usize = 32;

pub const SAMPLE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSample {
    m: usize,
    items: Vec<UnitaryTuple>,
}

impl EmbeddingSample {
    pub fn new(items: Vec<UnitaryTuple>) -> Result<Self> {
        let Some(first) = items.first() else {
            return Err(Error::Dimension(
                "an embedding sample needs at least one tuple".into(),
            ));
        };
        let m = first.m();
        if let Some(i) = items.iter().position(|u| u.m() != m) {
            return Err(Error::Dimension(format!(
                "item {i} has {} blocks, expected {m}",
                items[i].m()
            )));
        }
        Ok(Self { m, items })
    }

    /// For each level in [`DEFAULT_LEVELS`]: the all-identity tuple followed by
    /// [`DEFAULT_TUPLES_PER_LEVEL`] Haar tuples.
    pub fn default_for(m: usize, seed: Seed) -> Result<Self> {
        Self::with_levels(m, &DEFAULT_LEVELS, DEFAULT_TUPLES_PER_LEVEL, seed)
    }

    pub fn with_levels(m: usize, levels: &[usize], per_level: usize, seed: Seed) -> Result<Self> {
        if m == 0 {
            return Err(Error::Dimension("m must be positive".into()));
        }
        let mut items = Vec::with_capacity(levels.len() * (per_level + 1));
        for (li, &n) in levels.iter().enumerate() {
            items.push(UnitaryTuple::identity(n, m));
            let mut rng = seed.split(li as u64).rng();
            for _ in 0..per_level {
                items.push(UnitaryTuple::haar_from(n, m, &mut rng)?);
            }
        }
        Self::new(items)
    }

    /// Appends `count` Haar tuples at level `n`.
    pub fn extend_haar(&mut self, n: usize, count: usize, seed: Seed) -> Result<()> {
        let mut rng = seed.rng();
        for _ in 0..count {
            self.items
                .push(UnitaryTuple::haar_from(n, self.m, &mut rng)?);
        }
        Ok(())
    }

    pub fn push(&mut self, u: UnitaryTuple) -> Result<()> {
        if u.m() != self.m {
            return Err(Error::Dimension(format!(
                "tuple has {} blocks, expected {}",
                u.m(),
                self.m
            )));
        }
        self.items.push(u);
        Ok(())
    }

    /// The first `len` items.
    pub fn prefix(&self, len: usize) -> Result<Self> {
        if len == 0 || len > self.items.len() {
            return Err(Error::Dimension(format!(
                "prefix length {len} outside 1..={}",
                self.items.len()
            )));
        }
        Ok(Self {
            m: self.m,
            items: self.items[..len].to_vec(),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn items(&self) -> &[UnitaryTuple] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn levels(&self) -> Vec<usize> {
        self.items.iter().map(|u| u.n()).collect()
    }

    pub fn max_level(&self) -> usize {
        self.items.iter().map(|u| u.n()).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&SampleDocument::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SampleDocument = serde_json::from_str(text)?;
        doc.try_into()
    }
}

/// Versioned JSON form of an [`EmbeddingSample`].
#[derive(Debug, Serialize, Deserialize)]
pub struct SampleDocument {
    pub version: u32,
    pub m: usize,
    pub items: Vec<SampleItem>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SampleItem {
    pub n: usize,
    /// One row-major list of `[re, im]` pairs per block.
    pub blocks: Vec<Vec<C64>>,
}

impl From<&EmbeddingSample> for SampleDocument {
    fn from(s: &EmbeddingSample) -> Self {
        SampleDocument {
            version: SAMPLE_FORMAT_VERSION,
            m: s.m,
            items: s
                .items
                .iter()
                .map(|u| SampleItem {
                    n: u.n(),
                    blocks: u.blocks().iter().map(|b| b.as_slice().to_vec()).collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<SampleDocument> for EmbeddingSample {
    type Error = Error;
    fn try_from(doc: SampleDocument) -> Result<Self> {
        if doc.version != SAMPLE_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported sample version {}, expected {SAMPLE_FORMAT_VERSION}",
                doc.version
            )));
        }
        let mut items = Vec::with_capacity(doc.items.len());
        for (i, item) in doc.items.into_iter().enumerate() {
            if item.blocks.len() != doc.m {
                return Err(Error::Format(format!(
                    "item {i} has {} blocks, header says m = {}",
                    item.blocks.len(),
                    doc.m
                )));
            }
            let blocks = item
                .blocks
                .into_iter()
                .map(|b| ComplexMatrix::new(item.n, item.n, b))
                .collect::<Result<Vec<_>>>()?;
            items.push(UnitaryTuple::new(blocks)?);
        }
        EmbeddingSample::new(items)
    }
}

/// Element of the truncated product algebra, one block per sample item.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDiagonalOperator {
    pub blocks: Vec<ComplexMatrix>,
}

impl BlockDiagonalOperator {
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(operator_norm).fold(0.0, f64::max)
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::block_diag(&self.blocks)
    }
}

/// Predual element: one trace-class matrix per sample item.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceClassTuple {
    pub entries: Vec<ComplexMatrix>,
}

impl TraceClassTuple {
    pub fn zero_for(sample: &EmbeddingSample, p: usize) -> Self {
        Self {
            entries: sample
                .items
                .iter()
                .map(|u| ComplexMatrix::zeros(u.n() * p, u.n() * p))
                .collect(),
        }
    }

    /// `Σ_i ‖S_i‖₁`
    pub fn trace_norm_budget(&self) -> f64 {
        self.entries
            .iter()
            .map(|s| singular_values(s).iter().sum::<f64>())
            .sum()
    }
}

fn check_m(sample: &EmbeddingSample, mu: &MatrixMeasure) -> Result<()> {
    if sample.m != mu.m() {
        return Err(Error::Dimension(format!(
            "measure on {} points, sample on {} points",
            mu.m(),
            sample.m
        )));
    }
    Ok(())
}

/// Truncated `J_p(μ)`: the blocks `(T_μ)_{n_i}(u_i)`.
pub fn embed(sample: &EmbeddingSample, mu: &MatrixMeasure) -> Result<BlockDiagonalOperator> {
    check_m(sample, mu)?;
    let blocks = sample
        .items
        .iter()
        .map(|u| tmu_apply(mu, u))
        .collect::<Result<_>>()?;
    Ok(BlockDiagonalOperator { blocks })
}

/// `max_i ‖(T_μ)_{n_i}(u_i)‖`
pub fn truncated_sd_norm(sample: &EmbeddingSample, mu: &MatrixMeasure) -> Result<f64> {
    Ok(embed(sample, mu)?.norm())
}

/// Running maximum of the truncated norm over every prefix of the sample.
pub fn truncated_sd_norm_prefixes(
    sample: &EmbeddingSample,
    mu: &MatrixMeasure,
) -> Result<Vec<f64>> {
    check_m(sample, mu)?;
    let mut best = 0.0f64;
    sample
        .items
        .iter()
        .map(|u| {
            best = best.max(operator_norm(&tmu_apply(mu, u)?));
            Ok(best)
        })
        .collect()
}

/// `Σ_i Tr(S_i X_i)`
pub fn pairing(x: &BlockDiagonalOperator, s: &TraceClassTuple) -> Result<C64> {
    if x.blocks.len() != s.entries.len() {
        return Err(Error::Dimension(format!(
            "{} blocks paired with {} trace-class entries",
            x.blocks.len(),
            s.entries.len()
        )));
    }
    let mut total = C64::new(0.0, 0.0);
    for (i, (xb, sb)) in x.blocks.iter().zip(&s.entries).enumerate() {
        if xb.rows() != sb.cols() || xb.cols() != sb.rows() {
            return Err(Error::Dimension(format!("item {i}: shapes do not pair")));
        }
        total += (sb * xb).trace();
    }
    Ok(total)
}

/// Pre-adjoint at matrix level 1: `h(ω_k) = Σ_i Tr(S_i u_i(ω_k))`.
pub fn preadjoint(sample: &EmbeddingSample, s: &TraceClassTuple) -> Result<Vec<C64>> {
    if s.entries.len() != sample.items.len() {
        return Err(Error::Dimension(format!(
            "{} trace-class entries for {} sample items",
            s.entries.len(),
            sample.items.len()
        )));
    }
    for (i, (u, e)) in sample.items.iter().zip(&s.entries).enumerate() {
        if e.rows() != u.n() || e.cols() != u.n() {
            return Err(Error::Dimension(format!(
                "entry {i} is {}x{}, item level is {}",
                e.rows(),
                e.cols(),
                u.n()
            )));
        }
    }
    Ok((0..sample.m)
        .map(|k| {
            sample
                .items
                .iter()
                .zip(&s.entries)
                .map(|(u, e)| (e * &u.blocks()[k]).trace())
                .sum()
        })
        .collect())
}

/// Coefficient function `ω_k ↦ <g_k ξ, η>` of the block-diagonal
/// representation `g_k = diag_i(u_i(ω_k))`.
pub fn coefficient_function(
    sample: &EmbeddingSample,
    xi: &[C64],
    eta: &[C64],
    points: &[usize],
) -> Result<Vec<C64>> {
    let dim: usize = sample.items.iter().map(|u| u.n()).sum();
    if xi.len() != dim || eta.len() != dim {
        return Err(Error::Dimension(format!(
            "vectors of length {} and {}, representation has dimension {dim}",
            xi.len(),
            eta.len()
        )));
    }
    if let Some(&k) = points.iter().find(|&&k| k >= sample.m) {
        return Err(Error::Dimension(format!(
            "point {k} out of range for {} points",
            sample.m
        )));
    }
    Ok(points
        .iter()
        .map(|&k| {
            let mut gx = Vec::with_capacity(dim);
            let mut offset = 0;
            for u in &sample.items {
                let n = u.n();
                gx.extend(u.blocks()[k].mul_vec(&xi[offset..offset + n]));
                offset += n;
            }
            inner(&gx, eta)
        })
        .collect())
}

/// Values `Σ_k a_k γ_k` of a scalar measure on each supplied character,
/// together with the supremum over those characters and the optimal one
/// `γ_k = conj(a_k/|a_k|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbelianEmbedding {
    pub values: Vec<C64>,
    pub optimal_character: Vec<C64>,
    pub optimal_value: f64,
    pub sup: f64,
}

pub fn abelian_embed(mu: &AtomicMeasure, characters: &[Vec<C64>]) -> Result<AbelianEmbedding> {
    if characters.is_empty() {
        return Err(Error::Precondition(
            "at least one character is required".into(),
        ));
    }
    let m = mu.m();
    if let Some(i) = characters.iter().position(|c| c.len() != m) {
        return Err(Error::Dimension(format!(
            "character {i} has length {}, measure has {m} points",
            characters[i].len()
        )));
    }
    let evaluate =
        |gamma: &[C64]| -> C64 { mu.atoms().iter().zip(gamma).map(|(a, g)| a * g).sum() };
    let values: Vec<C64> = characters.iter().map(|c| evaluate(c)).collect();
    let optimal_character: Vec<C64> = mu
        .atoms()
        .iter()
        .map(|a| {
            if a.norm() > 0.0 {
                (a / a.norm()).conj()
            } else {
                C64::new(1.0, 0.0)
            }
        })
        .collect();
    // a_k conj(a_k)/|a_k| = |a_k|, summed without cancellation
    let optimal_value: f64 = mu.atoms().iter().map(|a| a.norm()).sum();
    let sup = values
        .iter()
        .map(|v| v.norm())
        .fold(optimal_value, f64::max);
    Ok(AbelianEmbedding {
        values,
        optimal_character,
        optimal_value,
        sup,
    })
}

/// Uniformly random characters on `m` points.
pub fn random_characters(m: usize, count: usize, seed: Seed) -> Vec<Vec<C64>> {
    let mut rng = seed.rng();
    (0..count)
        .map(|_| {
            (0..m)
                .map(|_| {
                    C64::from_polar(
                        1.0,
                        std::f64::consts::TAU * rand::Rng::random::<f64>(&mut rng),
                    )
                })
                .collect()
        })
        .collect()
}

//! Shannon entropies and signed multivariate information over categorical
//! joint distributions.
//!
//! Interaction information follows the inclusion-exclusion convention in
//! which the highest-order term enters the joint entropy with a plus sign:
//!
//! ```text
//! H12  = H1 + H2 - T12
//! H123 = H1 + H2 + H3 - T12 - T13 - T23 + T123
//! ```
//!
//! so that `T = sum over non-empty subsets S of (-1)^(|S|+1) H_S`. Mutual
//! redundancy flips the sign for every even dimensionality:
//! `R = (-1)^(n+1) T`, giving `R12 = -T12`, `R123 = T123`, `R1234 = -T1234`.
//! The literature uses both sign conventions for the three-way term; this one
//! makes the parity (XOR) distribution come out at `T123 = -1` bit.

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance on the sum of normalized probabilities.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Tolerance used when [`total_uncertainty`] cross-checks `H12 = H1 + H2 - T12`.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

/// Upper bound on the number of dimensions; the subset enumeration is `2^n`.
pub const MAX_DIMENSIONS: usize = 20;

/// A labeled categorical axis of a joint table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dimension {
    pub label: String,
    pub categories: Vec<String>,
}

impl Dimension {
    pub fn new(label: impl Into<String>, categories: Vec<String>) -> Self {
        Self {
            label: label.into(),
            categories,
        }
    }

    /// A dimension with categories named `0..n`.
    pub fn indexed(label: impl Into<String>, n: usize) -> Self {
        Self::new(label, (0..n).map(|i| i.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }
}

/// Normalized N-dimensional probability table.
///
/// Cells are stored row-major: the last dimension varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalJoint {
    dims: Vec<Dimension>,
    probs: Vec<f64>,
    log_base: f64,
}

impl CategoricalJoint {
    /// Builds a joint table from raw non-negative weights (counts or
    /// probabilities), normalizing them to sum to one.
    pub fn new(dims: Vec<Dimension>, weights: Vec<f64>, log_base: f64) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::domain("a joint table needs at least one dimension"));
        }
        if dims.len() > MAX_DIMENSIONS {
            return Err(Error::domain(format!(
                "at most {MAX_DIMENSIONS} dimensions are supported, got {}",
                dims.len()
            )));
        }
        check_log_base(log_base)?;
        for (i, d) in dims.iter().enumerate() {
            if d.is_empty() {
                return Err(Error::domain(format!("dimension {i} has no categories")));
            }
            if dims[..i].iter().any(|o| o.label == d.label) {
                return Err(Error::domain(format!("duplicate dimension label {:?}", d.label)));
            }
        }
        let size: usize = dims.iter().map(Dimension::len).product();
        if weights.len() != size {
            return Err(Error::domain(format!(
                "expected {size} cells for the given dimensions, got {}",
                weights.len()
            )));
        }
        let probs = normalize(&weights)?;
        Ok(Self {
            dims,
            probs,
            log_base,
        })
    }

    /// Joint table with anonymous dimensions `X1..Xn` of the given sizes.
    pub fn from_shape(shape: &[usize], weights: Vec<f64>) -> Result<Self> {
        let dims = shape
            .iter()
            .enumerate()
            .map(|(i, &n)| Dimension::indexed(format!("X{}", i + 1), n))
            .collect();
        Self::new(dims, weights, 2.0)
    }

    /// Builds a table from sparse `(category labels, weight)` records.
    ///
    /// Categories are numbered in order of first appearance; repeated records
    /// for the same cell accumulate.
    pub fn from_records<I, S>(labels: Vec<String>, records: I, log_base: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<S>, f64)>,
        S: AsRef<str>,
    {
        let n = labels.len();
        let mut categories: Vec<Vec<String>> = vec![Vec::new(); n];
        let mut cells: Vec<(Vec<usize>, f64)> = Vec::new();
        for (row, (keys, w)) in records.into_iter().enumerate() {
            if keys.len() != n {
                return Err(Error::Parse(format!(
                    "record {row} has {} labels, expected {n}",
                    keys.len()
                )));
            }
            let idx = keys
                .iter()
                .zip(categories.iter_mut())
                .map(|(k, cats)| {
                    let k = k.as_ref();
                    match cats.iter().position(|c| c == k) {
                        Some(p) => p,
                        None => {
                            cats.push(k.to_string());
                            cats.len() - 1
                        }
                    }
                })
                .collect();
            cells.push((idx, w));
        }
        let dims: Vec<Dimension> = labels
            .into_iter()
            .zip(categories)
            .map(|(l, c)| Dimension::new(l, c))
            .collect();
        if dims.iter().any(Dimension::is_empty) {
            return Err(Error::InvalidDistribution("table has no cells".into()));
        }
        let strides = strides(&dims.iter().map(Dimension::len).collect::<Vec<_>>());
        let size: usize = dims.iter().map(Dimension::len).product();
        let mut weights = vec![0.0; size];
        for (idx, w) in cells {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::domain(format!("cell weight {w} is not a finite non-negative number")));
            }
            let flat: usize = idx.iter().zip(&strides).map(|(i, s)| i * s).sum();
            weights[flat] += w;
        }
        Self::new(dims, weights, log_base)
    }

    pub fn dims(&self) -> &[Dimension] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.dims.iter().map(Dimension::len).collect()
    }

    /// Normalized cell probabilities, row-major.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn log_base(&self) -> f64 {
        self.log_base
    }

    pub fn with_log_base(mut self, log_base: f64) -> Result<Self> {
        check_log_base(log_base)?;
        self.log_base = log_base;
        Ok(self)
    }

    /// Entropy of the full table.
    pub fn entropy(&self) -> f64 {
        entropy_of(&self.probs, self.log_base)
    }

    /// Entropy of the marginal over the dimensions whose bits are set in `mask`.
    fn subset_entropy(&self, mask: u32) -> f64 {
        let keep: Vec<usize> = (0..self.ndim()).filter(|d| mask & (1 << d) != 0).collect();
        let probs = marginal_probs(&self.shape(), &self.probs, &keep);
        entropy_of(&probs, self.log_base)
    }

    fn dim_index(&self, label: &str) -> Option<usize> {
        self.dims.iter().position(|d| d.label == label)
    }
}

fn check_log_base(log_base: f64) -> Result<()> {
    if !(log_base.is_finite() && log_base > 0.0 && log_base != 1.0) {
        return Err(Error::domain(format!("invalid logarithm base {log_base}")));
    }
    Ok(())
}

fn normalize(weights: &[f64]) -> Result<Vec<f64>> {
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::domain(format!("weight {w} is not a finite non-negative number")));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidDistribution("all weights are zero".into()));
    }
    if !total.is_finite() {
        return Err(Error::InvalidDistribution("weights sum to infinity".into()));
    }
    let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "normalized weights sum to {sum}"
        )));
    }
    Ok(probs)
}

fn entropy_of(probs: &[f64], log_base: f64) -> f64 {
    let h: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum();
    h / log_base.ln()
}

fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for d in (0..shape.len().saturating_sub(1)).rev() {
        s[d] = s[d + 1] * shape[d + 1];
    }
    s
}

/// Sums `probs` (row-major over `shape`) onto the sorted dimensions `keep`.
fn marginal_probs(shape: &[usize], probs: &[f64], keep: &[usize]) -> Vec<f64> {
    let kept_shape: Vec<usize> = keep.iter().map(|&d| shape[d]).collect();
    let kept_strides = strides(&kept_shape);
    let mut out_stride = vec![0; shape.len()];
    for (k, &d) in keep.iter().enumerate() {
        out_stride[d] = kept_strides[k];
    }
    let mut out = vec![0.0; kept_shape.iter().product()];
    let mut idx = vec![0usize; shape.len()];
    for &p in probs {
        let flat: usize = idx.iter().zip(&out_stride).map(|(i, s)| i * s).sum();
        out[flat] += p;
        for d in (0..shape.len()).rev() {
            idx[d] += 1;
            if idx[d] < shape[d] {
                break;
            }
            idx[d] = 0;
        }
    }
    out
}

/// Shannon entropy `-sum p log p` of the distribution obtained by normalizing
/// `weights`. Empty cells contribute zero.
pub fn shannon_entropy(weights: &[f64], log_base: f64) -> Result<f64> {
    check_log_base(log_base)?;
    let probs = normalize(weights)?;
    Ok(entropy_of(&probs, log_base))
}

/// Sums the table over every dimension not listed in `keep`.
///
/// `keep` holds dimension indices; the result keeps them in their original
/// order regardless of the order given.
pub fn marginalize(joint: &CategoricalJoint, keep: &[usize]) -> Result<CategoricalJoint> {
    if keep.is_empty() {
        return Err(Error::domain("cannot marginalize onto an empty set of dimensions"));
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::domain("repeated dimension in marginal"));
    }
    if let Some(&bad) = sorted.iter().find(|&&d| d >= joint.ndim()) {
        return Err(Error::domain(format!(
            "dimension {bad} out of range for a {}-dimensional table",
            joint.ndim()
        )));
    }
    let probs = marginal_probs(&joint.shape(), &joint.probs, &sorted);
    let dims = sorted.iter().map(|&d| joint.dims[d].clone()).collect();
    CategoricalJoint::new(dims, probs, joint.log_base)
}

/// [`marginalize`] addressed by dimension label.
pub fn marginalize_labels(joint: &CategoricalJoint, keep: &[&str]) -> Result<CategoricalJoint> {
    let idx = keep
        .iter()
        .map(|l| {
            joint
                .dim_index(l)
                .ok_or_else(|| Error::domain(format!("unknown dimension {l:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    marginalize(joint, &idx)
}

fn require_multivariate(joint: &CategoricalJoint) -> Result<()> {
    if joint.ndim() < 2 {
        return Err(Error::domain(format!(
            "interaction measures need at least 2 dimensions, got {}",
            joint.ndim()
        )));
    }
    Ok(())
}

fn interaction_from_subsets(n: usize, entropy: impl Fn(u32) -> f64) -> f64 {
    (1u32..(1 << n))
        .map(|mask| {
            let h = entropy(mask);
            if mask.count_ones() % 2 == 1 {
                h
            } else {
                -h
            }
        })
        .sum()
}

/// Signed interaction (configurational) information: the alternating
/// inclusion-exclusion sum of all subset entropies.
pub fn interaction_information(joint: &CategoricalJoint) -> Result<f64> {
    require_multivariate(joint)?;
    Ok(interaction_from_subsets(joint.ndim(), |m| joint.subset_entropy(m)))
}

fn redundancy_sign(n: usize) -> f64 {
    if n % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Mutual redundancy `(-1)^(n+1) T`.
pub fn mutual_redundancy(joint: &CategoricalJoint) -> Result<f64> {
    Ok(redundancy_sign(joint.ndim()) * interaction_information(joint)?)
}

/// Joint entropy `H12` of a two-dimensional table, cross-checked against
/// `H1 + H2 - T12`.
pub fn total_uncertainty(joint: &CategoricalJoint) -> Result<f64> {
    if joint.ndim() != 2 {
        return Err(Error::domain(format!(
            "total uncertainty is defined for 2 dimensions, got {}",
            joint.ndim()
        )));
    }
    let h1 = joint.subset_entropy(0b01);
    let h2 = joint.subset_entropy(0b10);
    let h12 = joint.entropy();
    let t12 = interaction_information(joint)?;
    let gap = (h12 - (h1 + h2 - t12)).abs();
    if gap > IDENTITY_TOLERANCE {
        return Err(Error::Range(format!(
            "H12 = H1 + H2 - T12 violated by {gap:e}"
        )));
    }
    Ok(h12)
}

/// Unused fraction of the maximum entropy, `(h_max - h) / h_max`.
pub fn relative_redundancy(h: f64, h_max: f64) -> Result<f64> {
    if !(h_max.is_finite() && h_max > 0.0) {
        return Err(Error::domain(format!("h_max must be positive, got {h_max}")));
    }
    if !(h.is_finite() && h >= 0.0) {
        return Err(Error::domain(format!("entropy must be non-negative, got {h}")));
    }
    if h > h_max {
        return Err(Error::domain(format!("entropy {h} exceeds maximum {h_max}")));
    }
    Ok((h_max - h) / h_max)
}

/// The pair of three-vectors whose squared norms trade off historical
/// realization (`p_vec`) against self-organization (`q_vec`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TradeoffVectors {
    pub p_vec: [f64; 3],
    pub q_vec: [f64; 3],
}

/// Instantaneous redundancy balance `|P|^2 - |Q|^2`.
///
/// Positive values mean historical realization prevails, negative values mean
/// self-organization prevails. The proportionality constant is taken as one.
pub fn redundancy_tradeoff(v: &TradeoffVectors) -> Result<f64> {
    if v.p_vec.iter().chain(&v.q_vec).any(|c| !c.is_finite()) {
        return Err(Error::domain("trade-off vectors must be finite"));
    }
    let sq = |a: &[f64; 3]| a.iter().map(|c| c * c).sum::<f64>();
    Ok(sq(&v.p_vec) - sq(&v.q_vec))
}

/// Entropy of one marginal, keyed by the labels of the dimensions it keeps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetEntropy {
    /// Dimension labels, sorted lexicographically.
    pub dims: Vec<String>,
    pub entropy: f64,
}

/// All subset entropies of a table together with its signed interaction
/// information and mutual redundancy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub subset_entropies: Vec<SubsetEntropy>,
    pub interaction: f64,
    pub redundancy: f64,
    pub log_base: f64,
}

impl EntropyReport {
    pub fn compute(joint: &CategoricalJoint) -> Result<Self> {
        require_multivariate(joint)?;
        let n = joint.ndim();
        let mut masks: Vec<u32> = (1u32..(1 << n)).collect();
        masks.sort_by_key(|&m| (m.count_ones(), (0..n).filter(|d| m & (1 << d) != 0).collect::<Vec<_>>()));
        let entropies: Vec<(u32, f64)> =
            masks.iter().map(|&m| (m, joint.subset_entropy(m))).collect();
        let lookup = |m: u32| {
            entropies
                .iter()
                .find(|(k, _)| *k == m)
                .map(|(_, h)| *h)
                .unwrap_or(0.0)
        };
        let interaction = interaction_from_subsets(n, lookup);
        let redundancy = redundancy_sign(n) * interaction;
        let subset_entropies = entropies
            .iter()
            .map(|&(m, h)| {
                let mut dims: Vec<String> = (0..n)
                    .filter(|d| m & (1 << d) != 0)
                    .map(|d| joint.dims[d].label.clone())
                    .collect();
                dims.sort();
                SubsetEntropy { dims, entropy: h }
            })
            .collect();
        Ok(Self {
            subset_entropies,
            interaction,
            redundancy,
            log_base: joint.log_base,
        })
    }

    pub fn entropy_of(&self, labels: &[&str]) -> Option<f64> {
        let mut want: Vec<&str> = labels.to_vec();
        want.sort_unstable();
        self.subset_entropies
            .iter()
            .find(|s| s.dims.iter().map(String::as_str).eq(want.iter().copied()))
            .map(|s| s.entropy)
    }
}

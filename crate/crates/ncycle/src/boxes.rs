//! The n-cycle box data model and the canonical boxes.
//!
//! A box assigns one joint outcome distribution to every edge of the cycle;
//! edge i holds p(x_i, x_{i+1} | X_i X_{i+1}) with indices taken cyclically,
//! so edge n pairs X_n with X_1. Observables are dichotomic in the canonical
//! constructions, but the data model and the marginal/mixing operations accept
//! any outcome alphabet size d >= 2.

use crate::error::{Error, Result};
use crate::sign::{Parity, SignVector};
use crate::tolerance;

/// Which of the two edges incident to an observable a marginal is read from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeSide {
    /// Edge (X_{i-1}, X_i): the observable sits in the second slot.
    Left,
    /// Edge (X_i, X_{i+1}): the observable sits in the first slot.
    Right,
}

/// An n-cycle box: one joint distribution per cyclic edge.
///
/// Values are immutable after construction; all operations are pure.
/// Construction always validates, so every `CycleBox` in circulation
/// satisfies the probability invariants; file I/O goes through [`crate::io`].
#[derive(Debug, Clone, PartialEq)]
pub struct CycleBox {
    n: usize,
    d: usize,
    /// `edges[i]` is row-major d x d: entry `a * d + b` is p(x_{i+1}=a, x_{i+2}=b)
    /// in 1-based observable labels.
    edges: Vec<Vec<f64>>,
}

impl CycleBox {
    /// Builds a box from per-edge distributions, validating at the
    /// user-data tolerance.
    pub fn new(d: usize, edges: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_tolerance(d, edges, tolerance::USER_DATA)
    }

    /// Builds a box validating entries and edge normalization within `tol`.
    pub fn with_tolerance(d: usize, edges: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let n = edges.len();
        if n < 3 {
            return Err(Error::CycleTooShort(n));
        }
        if d < 2 {
            return Err(Error::AlphabetTooSmall(d));
        }
        for (i, edge) in edges.iter().enumerate() {
            if edge.len() != d * d {
                return Err(Error::DimensionMismatch(format!(
                    "edge {} has {} entries, expected {}",
                    i + 1,
                    edge.len(),
                    d * d
                )));
            }
            let mut sum = 0.0;
            for &p in edge {
                if !p.is_finite() || p < -tol || p > 1.0 + tol {
                    return Err(Error::InvalidProbability {
                        edge: i + 1,
                        value: p,
                        tol,
                    });
                }
                sum += p;
            }
            if (sum - 1.0).abs() > tol {
                return Err(Error::BadNormalization {
                    edge: i + 1,
                    sum,
                    tol,
                });
            }
        }
        Ok(Self { n, d, edges })
    }

    /// Internal constructor for distributions assembled by the library itself.
    pub(crate) fn assembled(d: usize, edges: Vec<Vec<f64>>) -> Self {
        Self::with_tolerance(d, edges, tolerance::CONSTRUCTION)
            .expect("library-constructed box violates its own invariants")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Joint distribution on edge `k` (1-based), row-major d x d.
    pub fn edge(&self, k: usize) -> Result<&[f64]> {
        if k == 0 || k > self.n {
            return Err(Error::IndexOutOfRange {
                index: k,
                max: self.n,
            });
        }
        Ok(&self.edges[k - 1])
    }

    /// p(x_k = a, x_{k+1} = b) on edge `k` (1-based).
    pub fn prob(&self, k: usize, a: usize, b: usize) -> Result<f64> {
        let edge = self.edge(k)?;
        if a >= self.d || b >= self.d {
            return Err(Error::IndexOutOfRange {
                index: a.max(b) + 1,
                max: self.d,
            });
        }
        Ok(edge[a * self.d + b])
    }

    pub(crate) fn edges(&self) -> &[Vec<f64>] {
        &self.edges
    }

    /// Single-observable marginal p(x_i | X_i) computed from one of the two
    /// edges incident to observable `i` (1-based).
    pub fn marginal(&self, i: usize, side: EdgeSide) -> Result<Vec<f64>> {
        if i == 0 || i > self.n {
            return Err(Error::IndexOutOfRange {
                index: i,
                max: self.n,
            });
        }
        let d = self.d;
        let mut out = vec![0.0; d];
        match side {
            EdgeSide::Right => {
                // edge i = (X_i, X_{i+1}); sum over the second outcome
                let edge = &self.edges[i - 1];
                for a in 0..d {
                    for b in 0..d {
                        out[a] += edge[a * d + b];
                    }
                }
            }
            EdgeSide::Left => {
                // edge i-1 = (X_{i-1}, X_i); sum over the first outcome
                let edge = &self.edges[(i + self.n - 2) % self.n];
                for a in 0..d {
                    for b in 0..d {
                        out[b] += edge[a * d + b];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Largest marginal inconsistency across all observables.
    pub fn disturbance(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 1..=self.n {
            let left = self.marginal(i, EdgeSide::Left).expect("index in range");
            let right = self.marginal(i, EdgeSide::Right).expect("index in range");
            for (l, r) in left.iter().zip(&right) {
                worst = worst.max((l - r).abs());
            }
        }
        worst
    }

    /// True iff every observable's two marginals agree entrywise within `tol`.
    pub fn is_nondisturbing(&self, tol: f64) -> bool {
        self.check_nondisturbing(tol).is_ok()
    }

    /// As [`Self::is_nondisturbing`], but reports the first inconsistent
    /// observable on failure.
    pub fn check_nondisturbing(&self, tol: f64) -> Result<()> {
        for i in 1..=self.n {
            let left = self.marginal(i, EdgeSide::Left)?;
            let right = self.marginal(i, EdgeSide::Right)?;
            let delta = left
                .iter()
                .zip(&right)
                .map(|(l, r)| (l - r).abs())
                .fold(0.0f64, f64::max);
            if delta > tol {
                return Err(Error::Disturbing {
                    observable: i,
                    delta,
                    tol,
                });
            }
        }
        Ok(())
    }

    /// Correlation value p(00) + p(11) - p(01) - p(10) of edge `k` (1-based).
    /// Defined for dichotomic outcomes only.
    pub fn correlator(&self, k: usize) -> Result<f64> {
        if self.d != 2 {
            return Err(Error::NotDichotomic(self.d));
        }
        let edge = self.edge(k)?;
        Ok(edge[0] + edge[3] - edge[1] - edge[2])
    }

    /// All n correlators, edge 1 first.
    pub fn correlators(&self) -> Result<Vec<f64>> {
        (1..=self.n).map(|k| self.correlator(k)).collect()
    }
}

/// Edgewise convex combination of boxes with matching n and d.
pub fn mix(boxes: &[CycleBox], weights: &[f64]) -> Result<CycleBox> {
    if boxes.is_empty() {
        return Err(Error::InvalidWeights("empty mixture".into()));
    }
    if boxes.len() != weights.len() {
        return Err(Error::InvalidWeights(format!(
            "{} boxes but {} weights",
            boxes.len(),
            weights.len()
        )));
    }
    let n = boxes[0].n;
    let d = boxes[0].d;
    for b in boxes {
        if b.n != n || b.d != d {
            return Err(Error::DimensionMismatch(format!(
                "cannot mix ({}, {}) with ({}, {})",
                n, d, b.n, b.d
            )));
        }
    }
    let mut sum = 0.0;
    for &w in weights {
        if !w.is_finite() || w < -tolerance::CONSTRUCTION {
            return Err(Error::InvalidWeights(format!("negative weight {w}")));
        }
        sum += w;
    }
    if (sum - 1.0).abs() > tolerance::CONSTRUCTION {
        return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
    }
    let mut edges = vec![vec![0.0; d * d]; n];
    for (b, &w) in boxes.iter().zip(weights) {
        for (acc, edge) in edges.iter_mut().zip(&b.edges) {
            for (a, &p) in acc.iter_mut().zip(edge) {
                *a += w * p;
            }
        }
    }
    Ok(CycleBox::assembled(d, edges))
}

/// Binary mixture `v * a + (1 - v) * b`.
pub fn mix2(a: &CycleBox, b: &CycleBox, v: f64) -> Result<CycleBox> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::MixingWeightOutOfRange(v));
    }
    mix(&[a.clone(), b.clone()], &[v, 1.0 - v])
}

/// The deterministic box assigning outcome `assignment[i]` to observable
/// X_{i+1} with certainty. Every edge is a point mass.
pub fn deterministic_box(d: usize, assignment: &[u8]) -> Result<CycleBox> {
    let n = assignment.len();
    if n < 3 {
        return Err(Error::CycleTooShort(n));
    }
    if d < 2 {
        return Err(Error::AlphabetTooSmall(d));
    }
    if let Some(&bad) = assignment.iter().find(|&&a| (a as usize) >= d) {
        return Err(Error::InvalidVertexLabel(format!(
            "assignment outcome {bad} out of range for d = {d}"
        )));
    }
    let mut edges = Vec::with_capacity(n);
    for i in 0..n {
        let a = assignment[i] as usize;
        let b = assignment[(i + 1) % n] as usize;
        let mut edge = vec![0.0; d * d];
        edge[a * d + b] = 1.0;
        edges.push(edge);
    }
    Ok(CycleBox::assembled(d, edges))
}

/// Pure white noise: every edge uniform over the d x d outcome pairs.
pub fn white_noise(n: usize, d: usize) -> Result<CycleBox> {
    if n < 3 {
        return Err(Error::CycleTooShort(n));
    }
    if d < 2 {
        return Err(Error::AlphabetTooSmall(d));
    }
    let p = 1.0 / ((d * d) as f64);
    Ok(CycleBox::assembled(d, vec![vec![p; d * d]; n]))
}

/// Edge distribution putting weight 1/2 on each outcome pair with
/// x_i XOR x_{i+1} equal to `anti` (0 = correlated, 1 = anticorrelated).
fn xor_edge(anti: u8) -> Vec<f64> {
    if anti == 0 {
        vec![0.5, 0.0, 0.0, 0.5]
    } else {
        vec![0.0, 0.5, 0.5, 0.0]
    }
}

fn xor_box(signs: &SignVector) -> CycleBox {
    let edges = signs
        .signs()
        .iter()
        .map(|&s| xor_edge(if s < 0 { 1 } else { 0 }))
        .collect();
    CycleBox::assembled(2, edges)
}

/// Extremal nonsignalling box for an odd-parity sign vector: edge k is
/// uniformly correlated when the sign is +1 and uniformly anticorrelated
/// when it is -1. For n = 4 and signs ++-+ this is the PR box.
pub fn pr_box(signs: &SignVector) -> Result<CycleBox> {
    signs.require_parity(Parity::Odd)?;
    Ok(xor_box(signs))
}

/// Classically correlated box for an even-parity sign vector: same edge
/// formula as [`pr_box`] but realizable with one bit of shared randomness.
pub fn classical_box(signs: &SignVector) -> Result<CycleBox> {
    signs.require_parity(Parity::Even)?;
    Ok(xor_box(signs))
}

/// Isotropic box: `epsilon` parts extremal box, `1 - epsilon` parts white
/// noise. Locally unbiased and symmetric under exchanging edge outcomes.
pub fn isotropic_box(n: usize, epsilon: f64, signs: &SignVector) -> Result<CycleBox> {
    if signs.len() != n {
        return Err(Error::SignLength {
            expected: n,
            got: signs.len(),
        });
    }
    if !(0.0..=1.0).contains(&epsilon) || !epsilon.is_finite() {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    let extremal = pr_box(signs)?;
    let noise = white_noise(n, 2)?;
    mix(&[extremal, noise], &[epsilon, 1.0 - epsilon])
}

/// Maximal entropic-violation box: equal mixture of the extremal box for
/// `signs` and the classical box for its companion at edge `k` (1-based,
/// which must carry a -1 sign). Edge k becomes uniform over four outcomes
/// while every other edge stays pinned.
pub fn emax_box(signs: &SignVector, k: usize) -> Result<CycleBox> {
    signs.require_parity(Parity::Odd)?;
    if signs.sign(k)? != -1 {
        return Err(Error::InvalidVertexLabel(format!(
            "edge {k} of {signs} does not carry a -1 sign"
        )));
    }
    let companion = signs.companion(k)?;
    mix(
        &[pr_box(signs)?, classical_box(&companion)?],
        &[0.5, 0.5],
    )
}

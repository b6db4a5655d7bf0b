//! Vertex labels of the nonsignalling polytope, convex decompositions over
//! them, and random box sampling.
//!
//! For dichotomic outcomes the polytope has 2^n deterministic vertices (one
//! per outcome assignment) and 2^(n-1) extremal nonlocal vertices (one per
//! odd-parity sign vector).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boxes::{self, CycleBox};
use crate::error::{Error, Result};
use crate::sign::{Parity, SignVector};
use crate::tolerance;

/// Label of a nonsignalling-polytope vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexLabel {
    /// Deterministic assignment of one outcome per observable.
    Deterministic(Vec<u8>),
    /// Extremal nonlocal box labeled by an odd-parity sign vector.
    PrBox(SignVector),
}

impl VertexLabel {
    pub fn cycle_len(&self) -> usize {
        match self {
            VertexLabel::Deterministic(a) => a.len(),
            VertexLabel::PrBox(g) => g.len(),
        }
    }

    /// Builds the vertex box itself (deterministic boxes honor `d`; extremal
    /// boxes are dichotomic).
    pub fn to_box(&self, d: usize) -> Result<CycleBox> {
        match self {
            VertexLabel::Deterministic(a) => boxes::deterministic_box(d, a),
            VertexLabel::PrBox(g) => {
                if d != 2 {
                    return Err(Error::NotDichotomic(d));
                }
                boxes::pr_box(g)
            }
        }
    }

    /// Stable text label for CSV output: `det:0101` or `pr:++-+`.
    pub fn label(&self) -> String {
        match self {
            VertexLabel::Deterministic(a) => {
                let digits: String = a.iter().map(|x| char::from(b'0' + x)).collect();
                format!("det:{digits}")
            }
            VertexLabel::PrBox(g) => format!("pr:{g}"),
        }
    }
}

/// All d^n deterministic assignments, least-significant observable first.
pub fn all_assignments(n: usize, d: usize) -> Vec<Vec<u8>> {
    let total = (d as u128).pow(n as u32);
    let mut out = Vec::with_capacity(total as usize);
    for idx in 0..total {
        let mut rem = idx;
        let mut a = Vec::with_capacity(n);
        for _ in 0..n {
            a.push((rem % d as u128) as u8);
            rem /= d as u128;
        }
        out.push(a);
    }
    out
}

/// All vertices of the dichotomic nonsignalling polytope: 2^n deterministic
/// labels followed by the 2^(n-1) odd-parity extremal labels.
pub fn nonsignalling_vertices(n: usize) -> Vec<VertexLabel> {
    let mut out: Vec<VertexLabel> = all_assignments(n, 2)
        .into_iter()
        .map(VertexLabel::Deterministic)
        .collect();
    out.extend(
        SignVector::enumerate(n, Parity::Odd)
            .into_iter()
            .map(VertexLabel::PrBox),
    );
    out
}

/// Convex weights over labeled vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    d: usize,
    entries: Vec<(VertexLabel, f64)>,
}

impl Decomposition {
    pub fn new(d: usize, entries: Vec<(VertexLabel, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidWeights("empty decomposition".into()));
        }
        let n = entries[0].0.cycle_len();
        let mut sum = 0.0;
        for (label, w) in &entries {
            if label.cycle_len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "vertex {} has cycle length {}, expected {}",
                    label.label(),
                    label.cycle_len(),
                    n
                )));
            }
            if !w.is_finite() || *w < -tolerance::CONSTRUCTION {
                return Err(Error::InvalidWeights(format!(
                    "weight {w} on {}",
                    label.label()
                )));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > tolerance::USER_DATA {
            return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
        }
        Ok(Self { d, entries })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[(VertexLabel, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Reassembles the box this decomposition represents.
    pub fn remix(&self) -> Result<CycleBox> {
        let n = self.entries[0].0.cycle_len();
        let d = self.d;
        let mut edges = vec![vec![0.0; d * d]; n];
        for (label, w) in &self.entries {
            if *w == 0.0 {
                continue;
            }
            let vertex = label.to_box(d)?;
            for (acc, edge) in edges.iter_mut().zip(vertex.edges()) {
                for (x, &p) in acc.iter_mut().zip(edge) {
                    *x += w * p;
                }
            }
        }
        CycleBox::with_tolerance(d, edges, tolerance::USER_DATA)
    }

    /// Drops zero-weight entries (below `cutoff`).
    pub fn support(&self, cutoff: f64) -> Vec<(VertexLabel, f64)> {
        self.entries
            .iter()
            .filter(|(_, w)| *w > cutoff)
            .cloned()
            .collect()
    }

    /// Two-column CSV (label, weight).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,weight\n");
        for (label, w) in &self.entries {
            out.push_str(&format!("{},{}\n", label.label(), w));
        }
        out
    }
}

fn simplex_weights(rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    // Normalized unit exponentials: a flat Dirichlet over the simplex.
    let mut w: Vec<f64> = (0..count)
        .map(|_| {
            let u: f64 = rng.random();
            -(1.0 - u).ln()
        })
        .collect();
    let sum: f64 = w.iter().sum();
    for x in &mut w {
        *x /= sum;
    }
    w
}

/// A uniformly seeded random point of the dichotomic nonsignalling polytope,
/// sampled as a flat-simplex mixture of all its vertices. Deterministic for
/// a fixed seed.
pub fn random_ns_box(n: usize, seed: u64) -> Result<CycleBox> {
    random_ns_decomposition(n, seed)?.remix()
}

/// Largest cycle the vertex-mixture samplers will enumerate (2^n + 2^(n-1)
/// vertex boxes).
pub const SAMPLER_GUARD: usize = 20;

fn check_sampler_size(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::CycleTooShort(n));
    }
    if n > SAMPLER_GUARD {
        return Err(Error::SizeGuard {
            size: 1u128 << n,
            limit: 1 << SAMPLER_GUARD,
        });
    }
    Ok(())
}

/// The decomposition behind [`random_ns_box`], with the same seed convention.
pub fn random_ns_decomposition(n: usize, seed: u64) -> Result<Decomposition> {
    check_sampler_size(n)?;
    let labels = nonsignalling_vertices(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = simplex_weights(&mut rng, labels.len());
    Decomposition::new(2, labels.into_iter().zip(weights).collect())
}

/// A random point of the local polytope: flat-simplex mixture of the 2^n
/// deterministic vertices only.
pub fn random_local_box(n: usize, seed: u64) -> Result<CycleBox> {
    check_sampler_size(n)?;
    let labels: Vec<VertexLabel> = all_assignments(n, 2)
        .into_iter()
        .map(VertexLabel::Deterministic)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6c6f_63616c); // distinct stream from the NS sampler
    let weights = simplex_weights(&mut rng, labels.len());
    Decomposition::new(2, labels.into_iter().zip(weights).collect())?.remix()
}

/// A random nonlocal box with a guaranteed violation margin: a random
/// nonsignalling box pushed toward a random extremal vertex until the
/// matching inequality exceeds its local bound by at least `min_margin`.
///
/// The margin floor keeps the activation weight of the resulting box within
/// double-precision range; margins may otherwise be arbitrarily small.
pub fn random_nonlocal_box(n: usize, seed: u64, min_margin: f64) -> Result<(CycleBox, SignVector)> {
    check_sampler_size(n)?;
    if !(min_margin > 0.0 && min_margin < 2.0) {
        return Err(Error::InvalidWeights(format!(
            "margin floor {min_margin} outside (0, 2)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6e6f_6e6c6f63);
    let base = {
        let labels = nonsignalling_vertices(n);
        let weights = simplex_weights(&mut rng, labels.len());
        Decomposition::new(2, labels.into_iter().zip(weights).collect())?.remix()?
    };
    let odd = SignVector::enumerate(n, Parity::Odd);
    let target = odd[rng.random_range(0..odd.len())].clone();
    let vertex = boxes::pr_box(&target)?;

    // C is linear in the mixture weight: value mu*n + (1-mu)*c_base along the
    // push toward the vertex. Choose mu so the margin lands in
    // [min_margin, margin_max], uniformly at random.
    let c_base: f64 = target
        .signs()
        .iter()
        .zip(base.correlators()?)
        .map(|(&g, e)| f64::from(g) * e)
        .sum();
    let nf = n as f64;
    let bound = nf - 2.0;
    let margin_max = (2.0f64 - min_margin).max(min_margin * 1.5).min(2.0);
    let margin = min_margin + (margin_max - min_margin) * rng.random::<f64>();
    let mu = ((bound + margin) - c_base) / (nf - c_base);
    let mu = mu.clamp(0.0, 1.0);
    let pushed = boxes::mix(&[vertex, base], &[mu, 1.0 - mu])?;
    Ok((pushed, target))
}

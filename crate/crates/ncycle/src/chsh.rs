//! The 4-cycle in two-party notation: vertex weights over the 16
//! deterministic and 8 extremal nonlocal points, and the closed-form CHSH
//! value of a mixture in that parametrization.
//!
//! Observable correspondence: X_1 and X_3 are one party's settings (x = 0
//! and x = 1), X_2 and X_4 the other's (y = 0 and y = 1). Deterministic
//! points output `a = alpha x XOR beta` and `b = gamma y XOR delta`;
//! extremal points satisfy `a XOR b = x y XOR alpha x XOR beta y XOR gamma`
//! uniformly. The CHSH value here is normalized so the local bound is 1,
//! i.e. half the 4-cycle correlation value of the matching inequality.

use crate::error::{Error, Result};
use crate::sign::SignVector;
use crate::vertex::{Decomposition, VertexLabel};

/// Convex weights over the 24 vertices in the two-party parametrization.
///
/// Deterministic weights are indexed by the bits (alpha, beta, gamma, delta)
/// packed high to low; extremal weights by (alpha, beta, gamma).
#[derive(Debug, Clone, PartialEq)]
pub struct ChshVertexWeights {
    pub deterministic: [f64; 16],
    pub extremal: [f64; 8],
}

impl ChshVertexWeights {
    pub fn new(deterministic: [f64; 16], extremal: [f64; 8]) -> Result<Self> {
        let sum: f64 = deterministic.iter().chain(extremal.iter()).sum();
        for w in deterministic.iter().chain(extremal.iter()) {
            if !w.is_finite() || *w < -1e-12 {
                return Err(Error::InvalidWeights(format!("weight {w}")));
            }
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
        }
        Ok(Self {
            deterministic,
            extremal,
        })
    }

    /// CHSH value of the mixture, local bound 1: the signed deterministic
    /// sum plus twice the difference of the two distinguished extremal
    /// weights.
    pub fn chsh_value(&self) -> f64 {
        let mut total = 0.0;
        for (idx, w) in self.deterministic.iter().enumerate() {
            let (alpha, beta, gamma, delta) = unpack4(idx);
            let exponent = (1 - alpha) * (beta + delta) + alpha * (beta + gamma + delta);
            let sign = if exponent % 2 == 0 { 1.0 } else { -1.0 };
            total += sign * w;
        }
        total + 2.0 * self.extremal[0b000] - 2.0 * self.extremal[0b001]
    }

    /// The 4-cycle sign vector whose correlation inequality this value
    /// evaluates (at half normalization): ++-+.
    pub fn matching_inequality() -> SignVector {
        SignVector::new(vec![1, 1, -1, 1]).expect("static sign vector")
    }

    /// The equivalent cycle decomposition over labeled vertices.
    pub fn to_decomposition(&self) -> Result<Decomposition> {
        let mut entries = Vec::with_capacity(24);
        for (idx, w) in self.deterministic.iter().enumerate() {
            let (alpha, beta, gamma, delta) = unpack4(idx);
            entries.push((
                VertexLabel::Deterministic(det_assignment(alpha, beta, gamma, delta).to_vec()),
                *w,
            ));
        }
        for (idx, w) in self.extremal.iter().enumerate() {
            let alpha = (idx >> 2) & 1;
            let beta = (idx >> 1) & 1;
            let gamma = idx & 1;
            entries.push((VertexLabel::PrBox(extremal_signs(alpha, beta, gamma)?), *w));
        }
        Decomposition::new(2, entries)
    }

    /// The mixture box itself, in cycle form.
    pub fn to_box(&self) -> Result<crate::boxes::CycleBox> {
        self.to_decomposition()?.remix()
    }
}

fn unpack4(idx: usize) -> (usize, usize, usize, usize) {
    ((idx >> 3) & 1, (idx >> 2) & 1, (idx >> 1) & 1, idx & 1)
}

/// Cycle outcome assignment of a deterministic two-party point:
/// (X_1, X_2, X_3, X_4) = (a at x=0, b at y=0, a at x=1, b at y=1).
pub fn det_assignment(alpha: usize, beta: usize, gamma: usize, delta: usize) -> [u8; 4] {
    [
        beta as u8,
        delta as u8,
        (alpha ^ beta) as u8,
        (gamma ^ delta) as u8,
    ]
}

/// Cycle sign vector of an extremal two-party point: the XOR offset on each
/// edge follows from evaluating `x y XOR alpha x XOR beta y XOR gamma` on the
/// setting pair the edge joins.
pub fn extremal_signs(alpha: usize, beta: usize, gamma: usize) -> Result<SignVector> {
    let offsets = [
        gamma,                      // edge 1: (x=0, y=0)
        alpha ^ gamma,              // edge 2: (y=0, x=1)
        1 ^ alpha ^ beta ^ gamma,   // edge 3: (x=1, y=1)
        beta ^ gamma,               // edge 4: (y=1, x=0)
    ];
    SignVector::new(
        offsets
            .iter()
            .map(|&o| if o == 1 { -1 } else { 1 })
            .collect(),
    )
}

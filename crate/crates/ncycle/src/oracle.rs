//! Local/noncontextual polytope membership.
//!
//! Two independent routes decide whether a box admits a deterministic-vertex
//! decomposition: an explicit linear feasibility solve over all d^n
//! deterministic assignments, and (for dichotomic boxes) the complete facet
//! description by the 2^(n-1) correlation inequalities. The two must agree;
//! the test suites cross-check them against each other.

use std::fmt;

use crate::boxes::CycleBox;
use crate::error::{Error, Result};
use crate::sign::{Parity, SignVector};
use crate::simplex::{lp_feasibility, LpOutcome};
use crate::tolerance;
use crate::vertex::{all_assignments, Decomposition, VertexLabel};

/// Columns beyond this are refused by [`decompose_local`].
pub const DECOMPOSITION_GUARD: u128 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipMethod {
    FacetCheck,
    LpDecomposition,
}

impl fmt::Display for MembershipMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MembershipMethod::FacetCheck => write!(f, "facet-check"),
            MembershipMethod::LpDecomposition => write!(f, "lp-decomposition"),
        }
    }
}

/// A violated correlation inequality with its violation amount.
#[derive(Debug, Clone)]
pub struct FacetViolation {
    pub signs: SignVector,
    pub amount: f64,
}

/// Verdict on local-polytope membership.
///
/// A local verdict from the LP route carries the decomposition it found; a
/// nonlocal verdict carries the most violated facet when the facet family is
/// known (d = 2). A nonlocal verdict without a facet certificate is an
/// LP-only verdict (d > 2, where no facet list is available).
#[derive(Debug, Clone)]
pub struct MembershipVerdict {
    pub is_local: bool,
    pub method: MembershipMethod,
    pub decomposition: Option<Decomposition>,
    pub violation: Option<FacetViolation>,
}

impl MembershipVerdict {
    pub fn is_lp_only(&self) -> bool {
        !self.is_local && self.violation.is_none()
    }
}

impl fmt::Display for MembershipVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_local {
            write!(f, "local ({})", self.method)?;
            if let Some(dec) = &self.decomposition {
                let support = dec.support(1e-12).len();
                write!(f, ", certificate over {support} vertices")?;
            }
        } else {
            write!(f, "nonlocal ({})", self.method)?;
            match &self.violation {
                Some(v) => write!(f, ", facet {} violated by {:.6e}", v.signs, v.amount)?,
                None => write!(f, ", LP-only verdict")?,
            }
        }
        Ok(())
    }
}

/// Decides membership by solving for convex weights over all deterministic
/// vertices that reproduce every edge distribution.
///
/// The constraint system uses d^2 - 1 cells per edge plus one normalization
/// row; the dropped cell is implied by normalization.
pub fn decompose_local(b: &CycleBox, tol: f64) -> Result<MembershipVerdict> {
    let n = b.n();
    let d = b.d();
    let cols = (d as u128)
        .checked_pow(n as u32)
        .ok_or(Error::SizeGuard {
            size: u128::MAX,
            limit: DECOMPOSITION_GUARD,
        })?;
    if cols > DECOMPOSITION_GUARD {
        return Err(Error::SizeGuard {
            size: cols,
            limit: DECOMPOSITION_GUARD,
        });
    }
    b.check_nondisturbing(tol)?;

    let assignments = all_assignments(n, d);
    let ncols = assignments.len();
    let nrows = 1 + n * (d * d - 1);
    let mut a = Vec::with_capacity(nrows);
    let mut rhs = Vec::with_capacity(nrows);

    a.push(vec![1.0; ncols]);
    rhs.push(1.0);
    for edge in 0..n {
        let succ = (edge + 1) % n;
        for cell in 0..(d * d) {
            let (x, y) = (cell / d, cell % d);
            if x == d - 1 && y == d - 1 {
                continue; // implied by normalization
            }
            let row: Vec<f64> = assignments
                .iter()
                .map(|lam| {
                    if lam[edge] as usize == x && lam[succ] as usize == y {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect();
            a.push(row);
            rhs.push(b.prob(edge + 1, x, y)?);
        }
    }

    match lp_feasibility(&a, &rhs, tolerance::LP_FEASIBILITY)? {
        LpOutcome::Feasible { weights, .. } => {
            // basic solutions satisfy the normalization row only to the
            // feasibility threshold; renormalize so the certificate is an
            // exact convex combination
            let total: f64 = weights.iter().sum();
            let entries: Vec<(VertexLabel, f64)> = assignments
                .into_iter()
                .zip(weights)
                .filter(|(_, w)| *w > 0.0)
                .map(|(lam, w)| (VertexLabel::Deterministic(lam), w / total))
                .collect();
            let decomposition = Decomposition::new(d, entries)?;
            Ok(MembershipVerdict {
                is_local: true,
                method: MembershipMethod::LpDecomposition,
                decomposition: Some(decomposition),
                violation: None,
            })
        }
        LpOutcome::Infeasible { .. } => {
            let violation = if d == 2 { worst_facet(b)? } else { None };
            Ok(MembershipVerdict {
                is_local: false,
                method: MembershipMethod::LpDecomposition,
                decomposition: None,
                violation,
            })
        }
    }
}

/// Decides membership of a dichotomic box by evaluating the complete facet
/// family: local iff every correlation value stays within n - 2 + tol.
pub fn facet_check(b: &CycleBox, tol: f64) -> Result<MembershipVerdict> {
    if b.d() != 2 {
        return Err(Error::NotDichotomic(b.d()));
    }
    if b.n() > crate::inequality::SWEEP_GUARD {
        return Err(Error::SizeGuard {
            size: 1u128 << (b.n() - 1),
            limit: 1 << (crate::inequality::SWEEP_GUARD - 1),
        });
    }
    b.check_nondisturbing(tol)?;
    match worst_facet(b)? {
        Some(v) if v.amount > tol => Ok(MembershipVerdict {
            is_local: false,
            method: MembershipMethod::FacetCheck,
            decomposition: None,
            violation: Some(v),
        }),
        _ => Ok(MembershipVerdict {
            is_local: true,
            method: MembershipMethod::FacetCheck,
            decomposition: None,
            violation: None,
        }),
    }
}

/// The most violated facet of a dichotomic box, if any facet is exceeded.
fn worst_facet(b: &CycleBox) -> Result<Option<FacetViolation>> {
    let bound = b.n() as f64 - 2.0;
    let correlators = b.correlators()?;
    let mut worst: Option<FacetViolation> = None;
    for signs in SignVector::enumerate(b.n(), Parity::Odd) {
        let value: f64 = signs
            .signs()
            .iter()
            .zip(&correlators)
            .map(|(&g, e)| f64::from(g) * e)
            .sum();
        let amount = value - bound;
        if amount > 0.0 && worst.as_ref().is_none_or(|w| amount > w.amount) {
            worst = Some(FacetViolation { signs, amount });
        }
    }
    Ok(worst)
}

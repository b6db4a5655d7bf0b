//! Shannon entropies and the two inequality families on the n-cycle: the
//! 2^(n-1) correlation inequalities with local bound n-2, and the n cyclic
//! Braunstein-Caves entropic inequalities with local bound 0.
//!
//! All entropies are in bits. Marginal entropies entering a Braunstein-Caves
//! value are read from the left edge of each observable after a
//! nondisturbance check, so results are deterministic for near-nondisturbing
//! input.

use crate::boxes::{CycleBox, EdgeSide};
use crate::error::{Error, Result};
use crate::par;
use crate::sign::{Parity, SignVector};
use crate::tolerance;

/// Shannon entropy in bits of a validated probability vector, with the
/// convention 0 log 0 = 0.
pub fn shannon_entropy(dist: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for &p in dist {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::NegativeProbability(p));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > tolerance::USER_DATA {
        return Err(Error::UnnormalizedDistribution(sum));
    }
    Ok(entropy_unchecked(dist))
}

/// Entropy of a distribution already known to be valid.
pub(crate) fn entropy_unchecked(dist: &[f64]) -> f64 {
    dist.iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Expectation value of the product of the two dichotomic observables on
/// edge `k` (1-based): p(00) + p(11) - p(01) - p(10).
pub fn expectation(b: &CycleBox, k: usize) -> Result<f64> {
    b.correlator(k)
}

/// Correlation inequality value for an odd-parity sign vector: the signed
/// sum of all edge expectations. Local boxes stay at or below n - 2.
pub fn c_value(b: &CycleBox, signs: &SignVector) -> Result<f64> {
    signs.require_parity(Parity::Odd)?;
    if signs.len() != b.n() {
        return Err(Error::SignLength {
            expected: b.n(),
            got: signs.len(),
        });
    }
    let mut total = 0.0;
    for k in 1..=b.n() {
        total += f64::from(signs.sign(k)?) * b.correlator(k)?;
    }
    Ok(total)
}

/// Braunstein-Caves entropic value for distinguished edge `k` (1-based):
///
/// H(X_k X_{k+1}) + sum of the other n-2 marginal entropies
///                - sum of the other n-1 edge entropies.
///
/// Local boxes stay at or below 0; dichotomic nonsignalling boxes at or
/// below 1. Uses the default nondisturbance tolerance.
pub fn bc_value(b: &CycleBox, k: usize) -> Result<f64> {
    bc_value_with_tol(b, k, tolerance::NONDISTURBANCE)
}

/// As [`bc_value`] with an explicit nondisturbance tolerance.
pub fn bc_value_with_tol(b: &CycleBox, k: usize, tol: f64) -> Result<f64> {
    if k == 0 || k > b.n() {
        return Err(Error::IndexOutOfRange { index: k, max: b.n() });
    }
    Ok(bc_values_with_tol(b, tol)?[k - 1])
}

/// All n Braunstein-Caves values at once (index k-1 holds BC for edge k).
pub fn bc_values_with_tol(b: &CycleBox, tol: f64) -> Result<Vec<f64>> {
    b.check_nondisturbing(tol)?;
    let n = b.n();
    let edge_entropy: Vec<f64> = (1..=n)
        .map(|k| entropy_unchecked(b.edge(k).expect("edge index in range")))
        .collect();
    let marginal_entropy: Vec<f64> = (1..=n)
        .map(|i| {
            entropy_unchecked(&b.marginal(i, EdgeSide::Left).expect("index in range"))
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let succ = (k + 1) % n;
        let mut value = edge_entropy[k];
        for j in 0..n {
            if j != k && j != succ {
                value += marginal_entropy[j];
            }
            if j != k {
                value -= edge_entropy[j];
            }
        }
        out.push(value);
    }
    Ok(out)
}

/// One evaluated inequality: its label, value, bound, and violation flag.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedInequality {
    pub label: String,
    pub value: f64,
    pub bound: f64,
    pub violated: bool,
}

/// Evaluation of both inequality families on one box.
#[derive(Debug, Clone)]
pub struct InequalityReport {
    n: usize,
    tol: f64,
    /// Odd-parity sign vectors in lexicographic order paired with their values.
    /// Empty when the box is not dichotomic.
    c_values: Vec<(SignVector, f64)>,
    bc_values: Vec<f64>,
}

impl InequalityReport {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c_bound(&self) -> f64 {
        self.n as f64 - 2.0
    }

    pub fn bc_bound(&self) -> f64 {
        0.0
    }

    pub fn c_values(&self) -> &[(SignVector, f64)] {
        &self.c_values
    }

    pub fn bc_values(&self) -> &[f64] {
        &self.bc_values
    }

    pub fn c_value_for(&self, signs: &SignVector) -> Option<f64> {
        self.c_values
            .iter()
            .find(|(g, _)| g == signs)
            .map(|(_, v)| *v)
    }

    /// Sign vectors whose correlation value exceeds the local bound.
    pub fn violated_c(&self) -> Vec<&SignVector> {
        let bound = self.c_bound() + self.tol;
        self.c_values
            .iter()
            .filter(|(_, v)| *v > bound)
            .map(|(g, _)| g)
            .collect()
    }

    /// Distinguished edges (1-based) whose entropic value exceeds 0.
    pub fn violated_bc(&self) -> Vec<usize> {
        self.bc_values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > self.tol)
            .map(|(k, _)| k + 1)
            .collect()
    }

    /// The largest correlation violation, if any.
    pub fn max_c_violation(&self) -> Option<(&SignVector, f64)> {
        let bound = self.c_bound() + self.tol;
        self.c_values
            .iter()
            .filter(|(_, v)| *v > bound)
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(g, v)| (g, *v))
    }

    /// Flat list of every evaluated inequality, correlation family first.
    pub fn rows(&self) -> Vec<EvaluatedInequality> {
        let mut rows = Vec::with_capacity(self.c_values.len() + self.bc_values.len());
        for (g, v) in &self.c_values {
            rows.push(EvaluatedInequality {
                label: format!("C[{g}]"),
                value: *v,
                bound: self.c_bound(),
                violated: *v > self.c_bound() + self.tol,
            });
        }
        for (k, v) in self.bc_values.iter().enumerate() {
            rows.push(EvaluatedInequality {
                label: format!("BC{}", k + 1),
                value: *v,
                bound: 0.0,
                violated: *v > self.tol,
            });
        }
        rows
    }

    /// CSV export with columns (family, label, value, bound, violated).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("family,label,value,bound,violated\n");
        for row in self.rows() {
            let family = if row.label.starts_with("C[") { "C" } else { "BC" };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                family, row.label, row.value, row.bound, row.violated
            ));
        }
        out
    }

    /// Human-readable table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<12} {:>22} {:>10} {:>9}\n",
            "inequality", "value", "bound", "violated"
        ));
        for row in self.rows() {
            out.push_str(&format!(
                "{:<12} {:>22.15} {:>10} {:>9}\n",
                row.label,
                row.value,
                row.bound,
                if row.violated { "YES" } else { "no" }
            ));
        }
        out
    }
}

/// Evaluates every correlation inequality (dichotomic boxes) and every
/// entropic inequality on `b`, flagging violations above `tol`.
pub fn full_report(b: &CycleBox, tol: f64) -> Result<InequalityReport> {
    full_report_with(b, tol, true)
}

/// Largest cycle for which the exponential correlation-family sweep is
/// attempted (2^(n-1) values; matches the decomposition oracle's guard).
pub const SWEEP_GUARD: usize = 21;

/// As [`full_report`], with explicit control over parallel evaluation of the
/// 2^(n-1) correlation values. Results are identical either way.
pub fn full_report_with(b: &CycleBox, tol: f64, parallel: bool) -> Result<InequalityReport> {
    if b.n() > SWEEP_GUARD {
        return Err(Error::SizeGuard {
            size: 1u128 << (b.n() - 1),
            limit: 1 << (SWEEP_GUARD - 1),
        });
    }
    let bc_values = bc_values_with_tol(b, tol.max(tolerance::NONDISTURBANCE))?;
    let c_values = if b.d() == 2 {
        let n = b.n();
        let correlators = b.correlators()?;
        // each item is cheap (pattern build + length-n dot product), so cap
        // how finely rayon may split the range
        par::map_indexed(1 << (n - 1), parallel, 512, |idx| {
            let signs = SignVector::by_index(n, Parity::Odd, idx);
            let value = signs
                .signs()
                .iter()
                .zip(&correlators)
                .map(|(&g, e)| f64::from(g) * e)
                .sum::<f64>();
            (signs, value)
        })
    } else {
        Vec::new()
    };
    Ok(InequalityReport {
        n: b.n(),
        tol,
        c_values,
        bc_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::{
        classical_box, deterministic_box, emax_box, mix, pr_box, white_noise,
    };
    use crate::vertex::random_ns_box;

    fn canonical(n: usize) -> SignVector {
        SignVector::canonical(n).unwrap()
    }

    #[test]
    fn entropy_reference_points() {
        assert_eq!(shannon_entropy(&[0.25; 4]).unwrap(), 2.0);
        assert_eq!(shannon_entropy(&[1.0, 0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(shannon_entropy(&[0.5, 0.5, 0.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn entropy_rejects_invalid_input() {
        assert!(matches!(
            shannon_entropy(&[-0.1, 1.1]),
            Err(Error::NegativeProbability(_))
        ));
        assert!(matches!(
            shannon_entropy(&[0.3, 0.3]),
            Err(Error::UnnormalizedDistribution(_))
        ));
    }

    #[test]
    fn expectation_reference_points() {
        let c = classical_box(&SignVector::all_plus(4).unwrap()).unwrap();
        assert_eq!(expectation(&c, 1).unwrap(), 1.0);
        let w = white_noise(4, 2).unwrap();
        assert_eq!(expectation(&w, 2).unwrap(), 0.0);
        let p = pr_box(&canonical(4)).unwrap();
        assert_eq!(expectation(&p, 4).unwrap(), -1.0);
    }

    #[test]
    fn c_value_reference_points() {
        for n in 3..=8 {
            let g = canonical(n);
            let p = pr_box(&g).unwrap();
            assert_eq!(c_value(&p, &g).unwrap(), n as f64);

            let iso = crate::boxes::isotropic_box(n, 0.7, &g).unwrap();
            assert!((c_value(&iso, &g).unwrap() - 0.7 * n as f64).abs() < 1e-12);

            let c = classical_box(&SignVector::all_plus(n).unwrap()).unwrap();
            assert_eq!(c_value(&c, &g).unwrap(), n as f64 - 2.0);
        }
        assert!(c_value(
            &white_noise(4, 2).unwrap(),
            &SignVector::all_plus(4).unwrap()
        )
        .is_err());
    }

    #[test]
    fn bc_value_reference_points() {
        for n in 3..=8 {
            let g = canonical(n);
            // maximal entropic violation box: exactly 1 on the flipped edge
            let e = emax_box(&g, n).unwrap();
            assert_eq!(bc_value(&e, n).unwrap(), 1.0);

            // extremal nonlocal boxes sit exactly on the entropic boundary
            let p = pr_box(&g).unwrap();
            for k in 1..=n {
                assert_eq!(bc_value(&p, k).unwrap(), 0.0);
            }

            // white noise: every edge entropy 2, every marginal 1
            let w = white_noise(n, 2).unwrap();
            assert_eq!(bc_value(&w, 1).unwrap(), 2.0 - n as f64);
        }
    }

    #[test]
    fn bc_value_names_disturbing_observable() {
        let edges = vec![
            vec![1.0, 0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
        ];
        let b = CycleBox::new(2, edges).unwrap();
        match bc_value(&b, 1) {
            Err(Error::Disturbing { observable: 1, .. }) => {}
            other => panic!("expected disturbance error, got {other:?}"),
        }
    }

    #[test]
    fn full_report_flags_the_right_family() {
        let n = 4;
        let g = canonical(n);

        let det = deterministic_box(2, &[0, 1, 1, 0]).unwrap();
        let r = full_report(&det, 1e-9).unwrap();
        assert!(r.violated_c().is_empty());
        assert!(r.violated_bc().is_empty());

        let p = pr_box(&g).unwrap();
        let r = full_report(&p, 1e-9).unwrap();
        assert_eq!(r.violated_c(), vec![&g]);
        assert!(r.violated_bc().is_empty());
        assert_eq!(r.c_value_for(&g), Some(4.0));

        let e = emax_box(&g, n).unwrap();
        let r = full_report(&e, 1e-9).unwrap();
        assert_eq!(r.violated_bc(), vec![n]);
    }

    #[test]
    fn report_csv_and_table_have_all_rows() {
        let p = pr_box(&canonical(4)).unwrap();
        let r = full_report(&p, 1e-9).unwrap();
        assert_eq!(r.rows().len(), 8 + 4);
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 1 + 12);
        assert!(csv.contains("C,C[+++-],4,2,true"));
        let table = r.to_table();
        assert!(table.contains("BC4"));
    }

    #[test]
    fn parallel_and_sequential_reports_agree() {
        let b = random_ns_box(6, 99).unwrap();
        let par = full_report_with(&b, 1e-9, true).unwrap();
        let seq = full_report_with(&b, 1e-9, false).unwrap();
        assert_eq!(par.c_values(), seq.c_values());
        assert_eq!(par.bc_values(), seq.bc_values());
    }

    #[test]
    fn entropic_values_blind_to_sign_of_one_edge() {
        // extremal nonlocal box vs companion classical box: identical
        // entropies edge by edge, so identical BC values, all exactly zero
        for n in [3usize, 4, 5, 6] {
            for g in SignVector::enumerate(n, Parity::Odd) {
                let k = g.first_minus().unwrap();
                let p = pr_box(&g).unwrap();
                let c = classical_box(&g.companion(k).unwrap()).unwrap();
                let bp = bc_values_with_tol(&p, 1e-12).unwrap();
                let bc = bc_values_with_tol(&c, 1e-12).unwrap();
                assert_eq!(bp, bc);
                assert!(bp.iter().all(|&v| v == 0.0));
            }
        }
    }

    #[test]
    fn deterministic_boxes_satisfy_both_families() {
        for a in crate::vertex::all_assignments(5, 2) {
            let b = deterministic_box(2, &a).unwrap();
            let r = full_report(&b, 1e-12).unwrap();
            for (_, v) in r.c_values() {
                assert!(*v <= 3.0 + 1e-12);
            }
            for v in r.bc_values() {
                assert!(*v <= 1e-12);
            }
        }
    }

    #[test]
    fn at_most_one_correlation_inequality_violated() {
        for seed in 0..50 {
            let b = random_ns_box(4, seed).unwrap();
            let r = full_report(&b, 1e-9).unwrap();
            assert!(r.violated_c().len() <= 1);
        }
        // even a maximally violating vertex trips exactly one
        let p = pr_box(&canonical(4)).unwrap();
        assert_eq!(full_report(&p, 1e-9).unwrap().violated_c().len(), 1);
    }

    #[test]
    fn dichotomic_bc_values_capped_at_one() {
        for n in [3usize, 4, 5, 6, 7] {
            for seed in 0..40 {
                let b = random_ns_box(n, seed).unwrap();
                for v in bc_values_with_tol(&b, 1e-9).unwrap() {
                    assert!(v <= 1.0 + 1e-9);
                }
            }
        }
    }

    #[test]
    fn elemental_entropy_inequalities_on_random_boxes() {
        for seed in 0..60 {
            let b = random_ns_box(5, seed).unwrap();
            for k in 1..=5usize {
                let joint = entropy_unchecked(b.edge(k).unwrap());
                let left = entropy_unchecked(&b.marginal(k, EdgeSide::Right).unwrap());
                let succ = if k == 5 { 1 } else { k + 1 };
                let right = entropy_unchecked(&b.marginal(succ, EdgeSide::Left).unwrap());
                assert!(joint >= -1e-10);
                assert!(joint <= left + right + 1e-10, "subadditivity");
                assert!(left <= joint + 1e-10, "monotonicity");
                assert!(right <= joint + 1e-10, "monotonicity");
            }
        }
    }

    #[test]
    fn bc_values_defined_for_larger_alphabets() {
        let w = white_noise(4, 3).unwrap();
        let vals = bc_values_with_tol(&w, 1e-9).unwrap();
        // edge entropy log2(9), marginal entropy log2(3)
        let expected = 9f64.log2() + 2.0 * 3f64.log2() - 3.0 * 9f64.log2();
        for v in vals {
            assert!((v - expected).abs() < 1e-12);
        }
        let r = full_report(&w, 1e-9).unwrap();
        assert!(r.c_values().is_empty());
        assert_eq!(r.bc_values().len(), 4);
    }

    #[test]
    fn mixture_of_nonviolating_boxes_can_violate_entropically() {
        let g = canonical(4);
        let p = pr_box(&g).unwrap();
        let c = classical_box(&g.companion(4).unwrap()).unwrap();
        assert!(bc_value(&p, 4).unwrap() <= 0.0);
        assert!(bc_value(&c, 4).unwrap() <= 0.0);
        let m = mix(&[p, c], &[0.5, 0.5]).unwrap();
        assert_eq!(bc_value(&m, 4).unwrap(), 1.0);
    }
}

//! Local reversible relabelings of n-cycle boxes and the depolarizing twirl.
//!
//! Three relabeling atoms are supported: flipping the outputs of a set of
//! observables, cyclically shifting the observable labels, and flipping both
//! outputs of a single edge's joint distribution. Output flips and shifts
//! preserve nondisturbance and permute the correlation-inequality values;
//! the edge double flip acts on one edge in isolation.
//!
//! The twirl for a target odd-parity sign vector averages a box over a small
//! group of relabelings that stabilize both the target extremal box and
//! white noise: per cyclic shift, the two complementary flip sets undoing
//! the shift's effect on the target label. The complementary pairing
//! symmetrizes every edge under its double output flip, so the average is
//! always of isotropic form, and each element preserves the target's
//! correlation value exactly.

use std::fmt;

use crate::boxes::{mix, CycleBox};
use crate::error::{Error, Result};
use crate::inequality::c_value;
use crate::sign::{Parity, SignVector};
use crate::tolerance;

/// One reversible relabeling step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelabelAtom {
    /// Flip the outputs of the listed observables (1-based). An involution.
    OutputFlip { observables: Vec<usize> },
    /// Relabel observables so that new X_i is old X_{i+offset}.
    CyclicShift { offset: usize },
    /// Flip both outputs of edge `edge` (1-based) in place. An involution.
    /// Touches a single joint distribution, so it preserves marginal
    /// consistency only on exchange-symmetric edges.
    EdgeDoubleFlip { edge: usize },
}

impl fmt::Display for RelabelAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelabelAtom::OutputFlip { observables } => {
                let list: Vec<String> = observables.iter().map(|i| i.to_string()).collect();
                write!(f, "flip[{}]", list.join(","))
            }
            RelabelAtom::CyclicShift { offset } => write!(f, "shift[{offset}]"),
            RelabelAtom::EdgeDoubleFlip { edge } => write!(f, "edgeflip[{edge}]"),
        }
    }
}

/// An ordered sequence of relabeling atoms, applied left to right.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LocalOperation {
    atoms: Vec<RelabelAtom>,
}

impl LocalOperation {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(atoms: Vec<RelabelAtom>) -> Self {
        Self { atoms }
    }

    pub fn is_identity(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[RelabelAtom] {
        &self.atoms
    }

    pub fn then(mut self, atom: RelabelAtom) -> Self {
        self.atoms.push(atom);
        self
    }

    /// The inverse operation on an n-cycle: atoms reversed, shifts negated.
    pub fn inverse(&self, n: usize) -> Self {
        let atoms = self
            .atoms
            .iter()
            .rev()
            .map(|atom| match atom {
                RelabelAtom::CyclicShift { offset } => RelabelAtom::CyclicShift {
                    offset: (n - offset % n) % n,
                },
                other => other.clone(),
            })
            .collect();
        Self { atoms }
    }

    /// Applies every atom in order to `b`.
    pub fn apply(&self, b: &CycleBox) -> Result<CycleBox> {
        let mut current = b.clone();
        for atom in &self.atoms {
            current = apply_atom(atom, &current)?;
        }
        Ok(current)
    }
}

impl fmt::Display for LocalOperation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "identity");
        }
        let parts: Vec<String> = self.atoms.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(" >> "))
    }
}

/// Applies a single relabeling atom to a box.
pub fn apply_atom(atom: &RelabelAtom, b: &CycleBox) -> Result<CycleBox> {
    let n = b.n();
    let d = b.d();
    match atom {
        RelabelAtom::OutputFlip { observables } => {
            if d != 2 {
                return Err(Error::NotDichotomic(d));
            }
            let mut member = vec![false; n];
            for &i in observables {
                if i == 0 || i > n {
                    return Err(Error::InvalidRelabeling(format!(
                        "observable {i} out of range 1..={n}"
                    )));
                }
                member[i - 1] = true;
            }
            let mut edges = Vec::with_capacity(n);
            for k in 0..n {
                let old = b.edge(k + 1)?;
                let fa = usize::from(member[k]);
                let fb = usize::from(member[(k + 1) % n]);
                let mut edge = vec![0.0; 4];
                for a in 0..2 {
                    for c in 0..2 {
                        edge[a * 2 + c] = old[(a ^ fa) * 2 + (c ^ fb)];
                    }
                }
                edges.push(edge);
            }
            Ok(CycleBox::assembled(d, edges))
        }
        RelabelAtom::CyclicShift { offset } => {
            let off = offset % n;
            let edges = (0..n)
                .map(|k| b.edge((k + off) % n + 1).map(<[f64]>::to_vec))
                .collect::<Result<Vec<_>>>()?;
            Ok(CycleBox::assembled(d, edges))
        }
        RelabelAtom::EdgeDoubleFlip { edge } => {
            if d != 2 {
                return Err(Error::NotDichotomic(d));
            }
            if *edge == 0 || *edge > n {
                return Err(Error::InvalidRelabeling(format!(
                    "edge {edge} out of range 1..={n}"
                )));
            }
            let mut edges: Vec<Vec<f64>> = (1..=n)
                .map(|k| b.edge(k).map(<[f64]>::to_vec))
                .collect::<Result<Vec<_>>>()?;
            let e = &mut edges[edge - 1];
            e.swap(0, 3);
            e.swap(1, 2);
            Ok(CycleBox::assembled(d, edges))
        }
    }
}

/// The depolarizing twirl group for one odd-parity sign vector.
#[derive(Debug, Clone)]
pub struct TwirlSpec {
    elements: Vec<LocalOperation>,
    target: SignVector,
}

impl TwirlSpec {
    /// Builds the group stabilizing the extremal box of `target` and white
    /// noise: for every cyclic shift, the two output-flip sets that undo the
    /// shift's effect on the target label. 2n elements in total.
    pub fn depolarizing(target: &SignVector) -> Result<Self> {
        target.require_parity(Parity::Odd)?;
        let n = target.len();
        let mut elements = Vec::with_capacity(2 * n);
        for offset in 0..n {
            // Sign pattern the flip must realize so that shift-then-flip
            // maps the target extremal box to itself.
            let shifted = target.shifted(offset);
            let wanted = target.product(&shifted)?;
            let flips = flip_set_for(&wanted)?;
            let complement: Vec<usize> =
                (1..=n).filter(|i| !flips.contains(i)).collect();
            for set in [flips, complement] {
                let mut op = LocalOperation::identity();
                if offset != 0 {
                    op = op.then(RelabelAtom::CyclicShift { offset });
                }
                if !set.is_empty() {
                    op = op.then(RelabelAtom::OutputFlip { observables: set });
                }
                elements.push(op);
            }
        }
        Ok(Self {
            elements,
            target: target.clone(),
        })
    }

    pub fn elements(&self) -> &[LocalOperation] {
        &self.elements
    }

    pub fn target(&self) -> &SignVector {
        &self.target
    }

    /// Uniform average of the box over every group element.
    pub fn average(&self, b: &CycleBox) -> Result<CycleBox> {
        let transformed: Vec<CycleBox> = self
            .elements
            .iter()
            .map(|op| op.apply(b))
            .collect::<Result<_>>()?;
        let w = 1.0 / transformed.len() as f64;
        mix(&transformed, &vec![w; transformed.len()])
    }
}

/// Observable set whose output flips realize a given even-parity edge sign
/// pattern: flipping observable i negates the signs of its two incident
/// edges, so the set is determined by a prefix-xor sweep.
fn flip_set_for(pattern: &SignVector) -> Result<Vec<usize>> {
    pattern.require_parity(Parity::Even)?;
    let n = pattern.len();
    let mut member = vec![false; n];
    for i in 0..n - 1 {
        member[i + 1] = member[i] ^ (pattern.sign(i + 1)? < 0);
    }
    // Even parity guarantees the wrap-around constraint on edge n holds.
    debug_assert_eq!(member[n - 1] ^ member[0], pattern.sign(n)? < 0);
    Ok((1..=n).filter(|&i| member[i - 1]).collect())
}

/// Depolarizes a nondisturbing dichotomic box toward the isotropic form of
/// `target`, preserving the target's correlation value exactly.
pub fn depolarize(b: &CycleBox, target: &SignVector) -> Result<CycleBox> {
    depolarize_with_tol(b, target, tolerance::NONDISTURBANCE)
}

/// As [`depolarize`] with an explicit nondisturbance tolerance.
pub fn depolarize_with_tol(b: &CycleBox, target: &SignVector, tol: f64) -> Result<CycleBox> {
    if b.d() != 2 {
        return Err(Error::NotDichotomic(b.d()));
    }
    if target.len() != b.n() {
        return Err(Error::SignLength {
            expected: b.n(),
            got: target.len(),
        });
    }
    b.check_nondisturbing(tol)?;
    TwirlSpec::depolarizing(target)?.average(b)
}

/// Mixing weight of the extremal box in an isotropic-form box, recovered as
/// the correlation value over n.
pub fn isotropic_epsilon(b: &CycleBox, target: &SignVector) -> Result<f64> {
    Ok(c_value(b, target)? / b.n() as f64)
}

/// Relabels a box so that its violated correlation inequality (if any)
/// becomes the canonical one: all +1 except -1 on edge n. A box violating
/// no inequality is returned unchanged with the identity operation.
pub fn align_to_canonical(b: &CycleBox, tol: f64) -> Result<(CycleBox, LocalOperation)> {
    if b.d() != 2 {
        return Err(Error::NotDichotomic(b.d()));
    }
    if b.n() > crate::inequality::SWEEP_GUARD {
        return Err(Error::SizeGuard {
            size: 1u128 << (b.n() - 1),
            limit: 1 << (crate::inequality::SWEEP_GUARD - 1),
        });
    }
    let n = b.n();
    let bound = n as f64 - 2.0;
    let correlators = b.correlators()?;
    let mut worst: Option<(SignVector, f64)> = None;
    for signs in SignVector::enumerate(n, Parity::Odd) {
        let value: f64 = signs
            .signs()
            .iter()
            .zip(&correlators)
            .map(|(&g, e)| f64::from(g) * e)
            .sum();
        if value > bound + tol && worst.as_ref().is_none_or(|(_, v)| value > *v) {
            worst = Some((signs, value));
        }
    }
    let Some((violated, _)) = worst else {
        return Ok((b.clone(), LocalOperation::identity()));
    };
    let canonical = SignVector::canonical(n)?;
    if violated == canonical {
        return Ok((b.clone(), LocalOperation::identity()));
    }
    let pattern = violated.product(&canonical)?;
    let flips = flip_set_for(&pattern)?;
    let op = LocalOperation::new(vec![RelabelAtom::OutputFlip { observables: flips }]);
    let relabeled = op.apply(b)?;
    Ok((relabeled, op))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::{classical_box, deterministic_box, isotropic_box, pr_box, white_noise};
    use crate::inequality::{bc_values_with_tol, full_report};
    use crate::vertex::random_ns_box;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn canonical(n: usize) -> SignVector {
        SignVector::canonical(n).unwrap()
    }

    fn boxes_close(a: &CycleBox, b: &CycleBox, tol: f64) -> bool {
        (1..=a.n()).all(|k| {
            a.edge(k)
                .unwrap()
                .iter()
                .zip(b.edge(k).unwrap())
                .all(|(x, y)| (x - y).abs() <= tol)
        })
    }

    fn random_operation(n: usize, rng: &mut ChaCha8Rng) -> LocalOperation {
        let mut op = LocalOperation::identity();
        for _ in 0..rng.random_range(1..4) {
            if rng.random::<f64>() < 0.5 {
                let observables: Vec<usize> =
                    (1..=n).filter(|_| rng.random::<f64>() < 0.5).collect();
                op = op.then(RelabelAtom::OutputFlip { observables });
            } else {
                op = op.then(RelabelAtom::CyclicShift {
                    offset: rng.random_range(0..n),
                });
            }
        }
        op
    }

    #[test]
    fn global_flip_fixes_the_correlated_classical_box() {
        let b = classical_box(&SignVector::all_plus(4).unwrap()).unwrap();
        let op = LocalOperation::new(vec![RelabelAtom::OutputFlip {
            observables: vec![1, 2, 3, 4],
        }]);
        assert_eq!(op.apply(&b).unwrap(), b);
    }

    #[test]
    fn shift_by_n_is_the_identity() {
        let b = random_ns_box(5, 3).unwrap();
        let op = LocalOperation::new(vec![RelabelAtom::CyclicShift { offset: 5 }]);
        assert_eq!(op.apply(&b).unwrap(), b);
    }

    #[test]
    fn single_observable_flip_flips_two_adjacent_edge_signs() {
        let g = canonical(4);
        let b = pr_box(&g).unwrap();
        let op = LocalOperation::new(vec![RelabelAtom::OutputFlip {
            observables: vec![1],
        }]);
        // observable 1 sits on edges 4 and 1
        let expected = pr_box(&SignVector::new(vec![-1, 1, 1, 1]).unwrap()).unwrap();
        assert_eq!(op.apply(&b).unwrap(), expected);
    }

    #[test]
    fn atoms_invert_cleanly() {
        let b = random_ns_box(6, 11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let op = random_operation(6, &mut rng);
            let round_trip = op.inverse(6).apply(&op.apply(&b).unwrap()).unwrap();
            assert!(boxes_close(&round_trip, &b, 1e-15));
        }
    }

    #[test]
    fn edge_double_flip_is_an_involution() {
        let b = random_ns_box(4, 2).unwrap();
        let atom = RelabelAtom::EdgeDoubleFlip { edge: 2 };
        let once = apply_atom(&atom, &b).unwrap();
        let twice = apply_atom(&atom, &once).unwrap();
        assert_eq!(twice, b);
        assert_ne!(once.edge(2).unwrap(), b.edge(2).unwrap());
        assert_eq!(once.edge(1).unwrap(), b.edge(1).unwrap());
    }

    #[test]
    fn relabeling_permutes_inequality_value_multisets() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for seed in 0..12 {
            let b = random_ns_box(5, seed).unwrap();
            let op = random_operation(5, &mut rng);
            let relabeled = op.apply(&b).unwrap();

            let sorted = |report: &crate::inequality::InequalityReport| {
                let mut c: Vec<f64> = report.c_values().iter().map(|(_, v)| *v).collect();
                c.sort_by(f64::total_cmp);
                c
            };
            let ra = full_report(&b, 1e-9).unwrap();
            let rb = full_report(&relabeled, 1e-9).unwrap();
            for (x, y) in sorted(&ra).iter().zip(sorted(&rb)) {
                assert!((x - y).abs() < 1e-12);
            }
            let mut ba = bc_values_with_tol(&b, 1e-9).unwrap();
            let mut bb = bc_values_with_tol(&relabeled, 1e-9).unwrap();
            ba.sort_by(f64::total_cmp);
            bb.sort_by(f64::total_cmp);
            for (x, y) in ba.iter().zip(&bb) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn twirl_group_has_two_n_elements_and_stabilizes_its_target() {
        for n in [3usize, 4, 5, 6] {
            let g = canonical(n);
            let spec = TwirlSpec::depolarizing(&g).unwrap();
            assert_eq!(spec.elements().len(), 2 * n);
            let target = pr_box(&g).unwrap();
            for op in spec.elements() {
                assert_eq!(op.apply(&target).unwrap(), target);
            }
        }
    }

    #[test]
    fn twirl_average_is_invariant_under_every_element() {
        let g = canonical(5);
        let spec = TwirlSpec::depolarizing(&g).unwrap();
        for seed in 0..5 {
            let avg = spec.average(&random_ns_box(5, seed).unwrap()).unwrap();
            for op in spec.elements() {
                assert!(boxes_close(&op.apply(&avg).unwrap(), &avg, 1e-12));
            }
        }
    }

    #[test]
    fn twirl_fixed_points() {
        let g = canonical(5);
        let p = pr_box(&g).unwrap();
        assert!(boxes_close(&depolarize(&p, &g).unwrap(), &p, 1e-15));
        let w = white_noise(5, 2).unwrap();
        assert!(boxes_close(&depolarize(&w, &g).unwrap(), &w, 1e-15));
    }

    #[test]
    fn depolarized_deterministic_box_lands_on_the_local_boundary() {
        for n in [4usize, 5, 6] {
            let g = canonical(n);
            let det = deterministic_box(2, &vec![0; n]).unwrap();
            let twirled = depolarize(&det, &g).unwrap();
            let eps = isotropic_epsilon(&twirled, &g).unwrap();
            assert!((eps - (n as f64 - 2.0) / n as f64).abs() < 1e-12);
            let reference = isotropic_box(n, eps, &g).unwrap();
            assert!(boxes_close(&twirled, &reference, 1e-12));
        }
    }

    #[test]
    fn twirl_preserves_c_value_and_is_idempotent() {
        for n in [3usize, 4, 6, 8] {
            let g = canonical(n);
            for seed in 0..10 {
                let b = random_ns_box(n, seed).unwrap();
                let before = c_value(&b, &g).unwrap();
                let twirled = depolarize(&b, &g).unwrap();
                let after = c_value(&twirled, &g).unwrap();
                assert!((before - after).abs() < 1e-12);

                let eps = after / n as f64;
                let reference = {
                    let extremal = pr_box(&g).unwrap();
                    let noise = white_noise(n, 2).unwrap();
                    // eps may be negative; assemble entries directly
                    let edges: Vec<Vec<f64>> = (1..=n)
                        .map(|k| {
                            extremal
                                .edge(k)
                                .unwrap()
                                .iter()
                                .zip(noise.edge(k).unwrap())
                                .map(|(e, w)| eps * e + (1.0 - eps) * w)
                                .collect()
                        })
                        .collect();
                    CycleBox::new(2, edges).unwrap()
                };
                assert!(boxes_close(&twirled, &reference, 1e-10));

                let again = depolarize(&twirled, &g).unwrap();
                assert!(boxes_close(&again, &twirled, 1e-12));
            }
        }
    }

    #[test]
    fn align_examples() {
        let n = 4;
        let odd = SignVector::new(vec![-1, 1, 1, 1]).unwrap();
        let b = pr_box(&odd).unwrap();
        let (aligned, op) = align_to_canonical(&b, 1e-9).unwrap();
        assert!(!op.is_identity());
        assert_eq!(aligned, pr_box(&canonical(n)).unwrap());

        let already = pr_box(&canonical(n)).unwrap();
        let (same, op) = align_to_canonical(&already, 1e-9).unwrap();
        assert!(op.is_identity());
        assert_eq!(same, already);

        let local = white_noise(n, 2).unwrap();
        let (unchanged, op) = align_to_canonical(&local, 1e-9).unwrap();
        assert!(op.is_identity());
        assert_eq!(unchanged, local);
    }

    #[test]
    fn alignment_preserves_the_violation_value() {
        for seed in 0..20 {
            let (b, _) = crate::vertex::random_nonlocal_box(5, seed, 0.05).unwrap();
            let report = full_report(&b, 1e-9).unwrap();
            let (_, before) = report.max_c_violation().unwrap();
            let (aligned, _) = align_to_canonical(&b, 1e-9).unwrap();
            let after = c_value(&aligned, &canonical(5)).unwrap();
            assert!((before - after).abs() < 1e-12);
        }
    }

    #[test]
    fn operation_display_is_readable() {
        let op = LocalOperation::new(vec![
            RelabelAtom::CyclicShift { offset: 2 },
            RelabelAtom::OutputFlip {
                observables: vec![1, 3],
            },
        ]);
        assert_eq!(op.to_string(), "shift[2] >> flip[1,3]");
        assert_eq!(LocalOperation::identity().to_string(), "identity");
    }
}

//! Entropic activation: mixing a nonlocal box with its companion classical
//! box until a Braunstein-Caves inequality is violated.
//!
//! The violation lives at small mixing weights v, where every entropic value
//! of the mixture behaves like `v * (A (1 - ln v) + B)`: the slope A equals
//! half the box's correlation-inequality violation, so any nonlocal box
//! violates entropically for small enough v. Near the local boundary the
//! required v shrinks like exp(-|B|/A) and can undercut anything a plain
//! entropy evaluation resolves, so this module evaluates mixtures in a
//! cancellation-free form (each entropy as 1 + correction, corrections via
//! log1p) and falls back to the asymptotic slope with an explicit remainder
//! bound when the grid bottoms out.

use std::f64::consts::LN_2;

use crate::boxes::CycleBox;
use crate::error::{Error, Result};
use crate::inequality::c_value;
use crate::oracle::facet_check;
use crate::sign::{Parity, SignVector};
use crate::symmetry::{align_to_canonical, depolarize, LocalOperation};
use crate::tolerance;

fn ln4() -> f64 {
    2.0 * LN_2
}

// ---------------------------------------------------------------------------
// Stable mixture evaluation
// ---------------------------------------------------------------------------

/// Per-edge corrections of the mixture `v * b + (1 - v) * classical(signs)`
/// relative to the 1-bit entropies of the pure classical box, in bits.
///
/// `edge[j]` is H(edge j+1) - 1 and `marginal[i]` is H(X_{i+1}) - 1; all are
/// O(v ln v), so Braunstein-Caves values assemble without cancellation of
/// O(1) terms.
struct MixtureCorrections {
    edge: Vec<f64>,
    marginal: Vec<f64>,
}

fn mixture_corrections(b: &CycleBox, signs: &SignVector, v: f64) -> Result<MixtureCorrections> {
    if b.d() != 2 {
        return Err(Error::NotDichotomic(b.d()));
    }
    signs.require_parity(Parity::Even)?;
    if signs.len() != b.n() {
        return Err(Error::SignLength {
            expected: b.n(),
            got: signs.len(),
        });
    }
    if !(0.0..=1.0).contains(&v) || !v.is_finite() {
        return Err(Error::MixingWeightOutOfRange(v));
    }
    let n = b.n();
    let mut edge = Vec::with_capacity(n);
    let mut marginal = Vec::with_capacity(n);
    for j in 0..n {
        let p = b.edge(j + 1)?;
        // Cells carrying 1/2 in the classical box: the diagonal for a +1
        // sign, the antidiagonal for -1.
        let (big, small) = if signs.sign(j + 1)? > 0 {
            ([p[0], p[3]], [p[1], p[2]])
        } else {
            ([p[1], p[2]], [p[0], p[3]])
        };
        let mut corr = 0.0;
        for q in big {
            // mixture cell (1 + t)/2 with t = v (2q - 1)
            let t = v * (2.0 * q - 1.0);
            let log_term = if 1.0 + t > 0.0 {
                (1.0 + t) * 0.5 * (t.ln_1p() / LN_2)
            } else {
                0.0
            };
            corr += 0.5 * t - log_term;
        }
        for q in small {
            let cell = v * q;
            if cell > 0.0 {
                corr -= cell * cell.log2();
            }
        }
        edge.push(corr);

        // marginal of X_{j+1} read from this edge's second slot is the
        // marginal convention used by the entropic values (left edge of the
        // successor observable); equivalently, compute every observable's
        // marginal from the edge where it sits second.
        let col0 = p[0] + p[2];
        let s = v * (2.0 * col0 - 1.0);
        let plus = if 1.0 + s > 0.0 {
            (1.0 + s) * (s.ln_1p() / LN_2)
        } else {
            0.0
        };
        let minus = if 1.0 - s > 0.0 {
            (1.0 - s) * ((-s).ln_1p() / LN_2)
        } else {
            0.0
        };
        marginal.push(-0.5 * (plus + minus));
    }
    // marginal[i] should describe observable i+1; the loop above filled
    // index j with the marginal of X_{j+2} (second slot of edge j+1).
    marginal.rotate_right(1);
    Ok(MixtureCorrections { edge, marginal })
}

/// All n Braunstein-Caves values of `v * b + (1 - v) * classical(signs)`,
/// evaluated in the cancellation-free form. Exact for every v in [0, 1];
/// at v = 1 it reduces to the plain entropic values of `b`.
pub fn mixture_bc_values(b: &CycleBox, signs: &SignVector, v: f64) -> Result<Vec<f64>> {
    let c = mixture_corrections(b, signs, v)?;
    let n = b.n();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let succ = (k + 1) % n;
        let mut value = c.edge[k];
        for j in 0..n {
            if j != k && j != succ {
                value += c.marginal[j];
            }
            if j != k {
                value -= c.edge[j];
            }
        }
        out.push(value);
    }
    Ok(out)
}

/// Braunstein-Caves value of the mixture `v * b + (1 - v) * classical(signs)`
/// for distinguished edge `k` (1-based).
pub fn bc_of_mixture(b: &CycleBox, signs: &SignVector, v: f64, k: usize) -> Result<f64> {
    if k == 0 || k > b.n() {
        return Err(Error::IndexOutOfRange { index: k, max: b.n() });
    }
    Ok(mixture_bc_values(b, signs, v)?[k - 1])
}

// ---------------------------------------------------------------------------
// Small-v structure
// ---------------------------------------------------------------------------

/// Exact leading small-v behaviour of one mixture value, in nats:
///
/// BC(v) = v * (slope * (1 - ln v) + intercept) + E(v),  |E(v)| <= 2 n v^2.
///
/// The slope equals half the violation of the correlation inequality whose
/// sign vector is `signs` flipped at `k`, so it is positive exactly when the
/// box is nonlocal along that facet.
#[derive(Debug, Clone, Copy)]
pub struct SmallVExpansion {
    pub slope: f64,
    pub intercept: f64,
    n: usize,
}

impl SmallVExpansion {
    /// Remainder bound at mixing weight v.
    pub fn remainder_bound(&self, v: f64) -> f64 {
        2.0 * self.n as f64 * v * v
    }

    /// Leading-order value in bits at mixing weight `exp(-neg_ln_v)`.
    pub fn bc_per_v_bits(&self, neg_ln_v: f64) -> f64 {
        (self.slope * (1.0 + neg_ln_v) + self.intercept) / LN_2
    }
}

/// Computes the exact small-v slope and intercept of the mixture value for
/// distinguished edge `k` (1-based).
pub fn small_v_expansion(b: &CycleBox, signs: &SignVector, k: usize) -> Result<SmallVExpansion> {
    if b.d() != 2 {
        return Err(Error::NotDichotomic(b.d()));
    }
    signs.require_parity(Parity::Even)?;
    let n = b.n();
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, max: n });
    }
    // u_j: mass off the classical box's support on edge j.
    // beta_j: -ln2 * u_j - sum of p ln p over that off-support mass.
    let mut u = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    for j in 0..n {
        let p = b.edge(j + 1)?;
        let small = if signs.sign(j + 1)? > 0 {
            [p[1], p[2]]
        } else {
            [p[0], p[3]]
        };
        let uj: f64 = small.iter().sum();
        let mut plogp = 0.0;
        for q in small {
            if q > 0.0 {
                plogp += q * q.ln();
            }
        }
        u.push(uj);
        beta.push(-LN_2 * uj - plogp);
    }
    let slope = u[k - 1] - (u.iter().sum::<f64>() - u[k - 1]);
    let intercept = beta[k - 1] - (beta.iter().sum::<f64>() - beta[k - 1]);
    Ok(SmallVExpansion {
        slope,
        intercept,
        n,
    })
}

/// Closed-form small-v expansion of the mixture value for an isotropic box
/// of noise parameter `epsilon` mixed with the companion classical box:
///
/// BC(v) = (v / ln 4) * (f(n, eps) - (2 - n (1 - eps)) ln v)
///
/// in bits, with natural logarithms inside. Singular at eps in {0, 1}.
#[derive(Debug, Clone, Copy)]
pub struct ExpansionModel {
    pub n: usize,
    pub epsilon: f64,
    /// 2 - n (1 - eps); positive exactly when the isotropic box is nonlocal.
    pub coefficient: f64,
    pub f_value: f64,
}

impl ExpansionModel {
    pub fn new(n: usize, epsilon: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::CycleTooShort(n));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::ExpansionDomain(epsilon));
        }
        let nf = n as f64;
        let f_value = 2.0 - nf * (1.0 - epsilon) * (1.0 + LN_2)
            + (nf + epsilon - nf * epsilon) * (1.0 - epsilon).ln()
            - epsilon * (1.0 + epsilon).ln()
            + (4.0 / (1.0 - epsilon * epsilon)).ln();
        Ok(Self {
            n,
            epsilon,
            coefficient: 2.0 - nf * (1.0 - epsilon),
            f_value,
        })
    }

    /// Expansion value at mixing weight v (bits).
    pub fn bc(&self, v: f64) -> Result<f64> {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::ExpansionWeightDomain(v));
        }
        Ok(v / ln4() * (self.f_value - self.coefficient * v.ln()))
    }
}

/// Convenience wrapper around [`ExpansionModel`].
pub fn expansion_value(n: usize, epsilon: f64, v: f64) -> Result<f64> {
    ExpansionModel::new(n, epsilon)?.bc(v)
}

// ---------------------------------------------------------------------------
// Activation search
// ---------------------------------------------------------------------------

/// Logarithmic mixing-weight grid: halvings starting at `start`.
#[derive(Debug, Clone, Copy)]
pub struct VGridSpec {
    pub start: f64,
    pub halvings: usize,
}

impl Default for VGridSpec {
    fn default() -> Self {
        // 2^-360 ~ 4e-109 keeps every grid point comfortably inside normal
        // double range; anything needing smaller v is handled by the
        // asymptotic certificate.
        Self {
            start: 0.5,
            halvings: 360,
        }
    }
}

impl VGridSpec {
    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.halvings).map(|i| self.start * 0.5f64.powi(i as i32))
    }
}

/// Options for [`activation_search`].
#[derive(Debug, Clone)]
pub struct ActivationOptions {
    /// Violation threshold, applied per unit of mixing weight: a value
    /// counts as violated at weight v when it exceeds `tol * v`.
    pub tol: f64,
    /// Depolarize toward the canonical extremal box before mixing.
    pub depolarize: bool,
    pub grid: VGridSpec,
    /// Golden-section polish of the first violating weight.
    pub refine: bool,
}

impl Default for ActivationOptions {
    fn default() -> Self {
        Self {
            tol: tolerance::VIOLATION,
            depolarize: true,
            grid: VGridSpec::default(),
            refine: true,
        }
    }
}

/// How a reported violation was certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActivationCertificate {
    /// Evaluated directly on a grid weight.
    GridScan,
    /// Certified from the exact small-v slope with its remainder bound; the
    /// reported weight may underflow f64 (see `ln_v_star`).
    SmallVAsymptotics,
}

/// Result of an activation search.
#[derive(Debug, Clone)]
pub struct ActivationResult {
    pub found: bool,
    pub used_depolarization: bool,
    /// Relabeling that brought the violated inequality to canonical form.
    pub alignment: LocalOperation,
    /// Violation of the canonical inequality after alignment.
    pub margin: Option<f64>,
    /// Companion classical box label used in the mixture.
    pub gamma_prime: Option<SignVector>,
    /// Distinguished edge of the violated entropic inequality (1-based).
    pub k_star: Option<usize>,
    /// Mixing weight achieving the violation; 0.0 when it underflows.
    pub v_star: Option<f64>,
    /// ln of the mixing weight (always finite when found).
    pub ln_v_star: Option<f64>,
    /// Entropic value at `v_star`; 0.0 when it underflows.
    pub bc_at_v: Option<f64>,
    /// Entropic value per unit mixing weight at `v_star` (always finite).
    pub bc_per_v: Option<f64>,
    pub certificate: Option<ActivationCertificate>,
    /// Set when a nonlocal box could not be activated (conjecture
    /// counterexample candidate).
    pub diagnostic: Option<String>,
}

impl ActivationResult {
    fn not_found(used_depolarization: bool) -> Self {
        Self {
            found: false,
            used_depolarization,
            alignment: LocalOperation::identity(),
            margin: None,
            gamma_prime: None,
            k_star: None,
            v_star: None,
            ln_v_star: None,
            bc_at_v: None,
            bc_per_v: None,
            certificate: None,
            diagnostic: None,
        }
    }
}

/// Scans a mixture for an entropic violation over a halving grid.
/// Returns the first violating (v, k, value), scanning k = `k_first` before
/// the remaining edges at each weight.
fn scan_grid(
    b: &CycleBox,
    signs: &SignVector,
    grid: &VGridSpec,
    tol: f64,
    k_first: usize,
) -> Result<Option<(f64, usize, f64)>> {
    let n = b.n();
    let order: Vec<usize> = std::iter::once(k_first)
        .chain((1..=n).filter(|&k| k != k_first))
        .collect();
    for v in grid.points() {
        let values = mixture_bc_values(b, signs, v)?;
        for &k in &order {
            if values[k - 1] > tol * v {
                return Ok(Some((v, k, values[k - 1])));
            }
        }
    }
    Ok(None)
}

/// Golden-section maximization of the mixture value over ln v around a
/// violating weight.
fn refine_peak(
    b: &CycleBox,
    signs: &SignVector,
    k: usize,
    v_found: f64,
    v_max: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let eval = |t: f64| -> Result<f64> { bc_of_mixture(b, signs, t.exp(), k) };
    let mut lo = (v_found / 32.0).ln();
    let mut hi = (v_found * 2.0).min(v_max).ln();
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut t1 = hi - phi * (hi - lo);
    let mut t2 = lo + phi * (hi - lo);
    let mut f1 = eval(t1)?;
    let mut f2 = eval(t2)?;
    for _ in 0..70 {
        if f1 < f2 {
            lo = t1;
            t1 = t2;
            f1 = f2;
            t2 = lo + phi * (hi - lo);
            f2 = eval(t2)?;
        } else {
            hi = t2;
            t2 = t1;
            f2 = f1;
            t1 = hi - phi * (hi - lo);
            f1 = eval(t1)?;
        }
    }
    let t = if f1 > f2 { t1 } else { t2 };
    let v = t.exp();
    let bc = eval(t)?;
    let base = bc_of_mixture(b, signs, v_found, k)?;
    // keep the grid point unless the peak genuinely improves on it and
    // still clears the weight-scaled threshold
    if bc > base * (1.0 + 1e-12) + 1e-300 && bc > tol * v {
        Ok((v, bc))
    } else {
        Ok((v_found, base))
    }
}

/// Entropic activation of a nonlocal box.
///
/// Pipeline: facet membership gate, relabeling to the canonical inequality,
/// optional depolarization, then a mixture scan against the all-plus
/// classical box. If the grid bottoms out, the exact small-v slope decides:
/// a positive slope certifies a violation at an explicitly reported
/// (possibly underflowing) weight.
///
/// ```
/// use ncycle::{activation_search, isotropic_box, ActivationOptions, SignVector};
///
/// let signs = SignVector::canonical(5)?;
/// let noisy = isotropic_box(5, 0.7, &signs)?;           // nonlocal: 0.7 > 3/5
/// let result = activation_search(&noisy, &ActivationOptions::default())?;
/// assert!(result.found);
/// assert!(result.bc_at_v.unwrap() > 0.0);
/// # Ok::<(), ncycle::Error>(())
/// ```
pub fn activation_search(b: &CycleBox, opts: &ActivationOptions) -> Result<ActivationResult> {
    if b.d() != 2 {
        return Err(Error::NotDichotomic(b.d()));
    }
    b.check_nondisturbing(opts.tol.max(tolerance::NONDISTURBANCE))?;
    let n = b.n();

    let verdict = facet_check(b, opts.tol)?;
    if verdict.is_local {
        return Ok(ActivationResult::not_found(opts.depolarize));
    }

    let (aligned, alignment) = align_to_canonical(b, opts.tol)?;
    let canonical = SignVector::canonical(n)?;
    let margin = c_value(&aligned, &canonical)? - (n as f64 - 2.0);
    let working = if opts.depolarize {
        depolarize(&aligned, &canonical)?
    } else {
        aligned
    };
    let gamma_prime = canonical.companion(n)?;

    if let Some((v, k, bc)) = scan_grid(&working, &gamma_prime, &opts.grid, opts.tol, n)? {
        let (v_star, bc_at_v) = if opts.refine {
            refine_peak(&working, &gamma_prime, k, v, opts.grid.start, opts.tol)?
        } else {
            (v, bc)
        };
        return Ok(ActivationResult {
            found: true,
            used_depolarization: opts.depolarize,
            alignment,
            margin: Some(margin),
            gamma_prime: Some(gamma_prime),
            k_star: Some(k),
            v_star: Some(v_star),
            ln_v_star: Some(v_star.ln()),
            bc_at_v: Some(bc_at_v),
            bc_per_v: Some(bc_at_v / v_star),
            certificate: Some(ActivationCertificate::GridScan),
            diagnostic: None,
        });
    }

    // Grid exhausted: decide from the exact small-v slope.
    let expansion = small_v_expansion(&working, &gamma_prime, n)?;
    let slope_floor = opts.tol / 4.0;
    if expansion.slope > slope_floor {
        // Pick a weight where the leading term dominates comfortably, and in
        // any case below the exhausted grid.
        let grid_floor_neg_ln =
            (opts.grid.halvings as f64 - 1.0) * LN_2 - opts.grid.start.ln();
        let target = 0.05f64.max(2.0 * LN_2 * opts.tol);
        let neg_ln_v = ((target - expansion.intercept) / expansion.slope - 1.0)
            .max(grid_floor_neg_ln + 10.0);
        let bc_per_v = expansion.bc_per_v_bits(neg_ln_v);
        let v_star = (-neg_ln_v).exp();
        debug_assert!(expansion.remainder_bound(v_star.max(1e-300)) < 1e-200);
        return Ok(ActivationResult {
            found: true,
            used_depolarization: opts.depolarize,
            alignment,
            margin: Some(margin),
            gamma_prime: Some(gamma_prime),
            k_star: Some(n),
            v_star: Some(v_star),
            ln_v_star: Some(-neg_ln_v),
            bc_at_v: Some(bc_per_v * v_star),
            bc_per_v: Some(bc_per_v),
            certificate: Some(ActivationCertificate::SmallVAsymptotics),
            diagnostic: None,
        });
    }

    Ok(ActivationResult {
        found: false,
        used_depolarization: opts.depolarize,
        alignment,
        margin: Some(margin),
        gamma_prime: Some(gamma_prime),
        k_star: None,
        v_star: None,
        ln_v_star: None,
        bc_at_v: None,
        bc_per_v: None,
        certificate: None,
        diagnostic: Some(format!(
            "nonlocal box (margin {margin:.3e}) produced no entropic violation on the grid and its small-v slope {:.3e} is not positive; counterexample candidate",
            expansion.slope
        )),
    })
}

// ---------------------------------------------------------------------------
// Curve data
// ---------------------------------------------------------------------------

/// One sample of the entropic value of an isotropic-box mixture, exact and
/// first-order.
#[derive(Debug, Clone, Copy)]
pub struct CurvePoint {
    pub v: f64,
    pub k: usize,
    pub bc_exact: f64,
    pub bc_expansion: f64,
}

/// Exact and first-order mixture values for the isotropic box of parameter
/// `epsilon` against its companion classical box, at the given weights.
pub fn isotropic_activation_curve(
    n: usize,
    epsilon: f64,
    weights: &[f64],
) -> Result<Vec<CurvePoint>> {
    let canonical = SignVector::canonical(n)?;
    let iso = crate::boxes::isotropic_box(n, epsilon, &canonical)?;
    let gamma_prime = canonical.companion(n)?;
    let model = ExpansionModel::new(n, epsilon)?;
    weights
        .iter()
        .map(|&v| {
            Ok(CurvePoint {
                v,
                k: n,
                bc_exact: bc_of_mixture(&iso, &gamma_prime, v, n)?,
                bc_expansion: model.bc(v)?,
            })
        })
        .collect()
}

/// Least-squares fit of `bc/v * ln 4` against `ln v` over the given weights,
/// returning (intercept, slope). For small weights the slope approaches the
/// negative of the correlation-inequality violation; the intercept is the
/// mixture's box-dependent constant, which has no closed form here and is
/// only ever extracted numerically.
pub fn small_v_intercept(
    b: &CycleBox,
    signs: &SignVector,
    k: usize,
    weights: &[f64],
) -> Result<(f64, f64)> {
    if weights.len() < 2 {
        return Err(Error::DimensionMismatch(
            "at least two weights required for the fit".into(),
        ));
    }
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let m = weights.len() as f64;
    for &v in weights {
        let x = v.ln();
        let y = bc_of_mixture(b, signs, v, k)? / v * ln4();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let intercept = (sy - slope * sx) / m;
    Ok((intercept, slope))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::{classical_box, isotropic_box, mix2, pr_box, white_noise};
    use crate::inequality::bc_values_with_tol;
    use crate::sign::SignVector;
    use crate::vertex::{random_local_box, random_nonlocal_box, random_ns_box};

    fn canonical(n: usize) -> SignVector {
        SignVector::canonical(n).unwrap()
    }

    fn all_plus(n: usize) -> SignVector {
        SignVector::all_plus(n).unwrap()
    }

    #[test]
    fn half_mixture_of_the_extremal_box_hits_the_entropic_maximum() {
        for n in [3usize, 4, 5, 6] {
            let p = pr_box(&canonical(n)).unwrap();
            let bc = bc_of_mixture(&p, &all_plus(n), 0.5, n).unwrap();
            assert!((bc - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_weight_mixture_is_the_classical_box() {
        let b = random_ns_box(5, 4).unwrap();
        for k in 1..=5 {
            assert_eq!(bc_of_mixture(&b, &all_plus(5), 0.0, k).unwrap(), 0.0);
        }
    }

    #[test]
    fn unit_weight_mixture_is_the_box_itself() {
        let g = canonical(4);
        let iso = isotropic_box(4, 0.8, &g).unwrap();
        let direct = bc_values_with_tol(&iso, 1e-9).unwrap();
        for k in 1..=4usize {
            let via_mixture = bc_of_mixture(&iso, &all_plus(4), 1.0, k).unwrap();
            assert!((via_mixture - direct[k - 1]).abs() < 1e-12);
            assert!(via_mixture <= 0.0 + 1e-12);
        }
    }

    #[test]
    fn stable_path_matches_plain_entropies_at_moderate_weights() {
        for seed in 0..15 {
            let b = random_ns_box(4, seed).unwrap();
            let gp = all_plus(4);
            let classical = classical_box(&gp).unwrap();
            for v in [0.5, 0.25, 1e-2, 1e-4] {
                let mixture = mix2(&b, &classical, v).unwrap();
                let direct = bc_values_with_tol(&mixture, 1e-9).unwrap();
                let stable = mixture_bc_values(&b, &gp, v).unwrap();
                for (x, y) in stable.iter().zip(&direct) {
                    assert!((x - y).abs() < 1e-11, "v = {v}: {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn expansion_coefficient_vanishes_at_the_locality_threshold() {
        for n in [4usize, 5, 6, 8] {
            let eps = (n as f64 - 2.0) / n as f64;
            let model = ExpansionModel::new(n, eps).unwrap();
            assert!(model.coefficient.abs() < 1e-14);
        }
    }

    #[test]
    fn expansion_positive_for_strongly_nonlocal_noise() {
        let value = expansion_value(4, 0.9, 1e-6).unwrap();
        assert!(value > 0.0);
        assert!(ExpansionModel::new(4, 0.0).is_err());
        assert!(ExpansionModel::new(4, 1.0).is_err());
        assert!(ExpansionModel::new(4, 0.5).unwrap().bc(0.0).is_err());
    }

    #[test]
    fn expansion_agrees_with_exact_mixture_as_v_shrinks() {
        for n in [4usize, 5, 6] {
            let eps = (n as f64 - 2.0) / n as f64 + 0.1;
            let iso = isotropic_box(n, eps, &canonical(n)).unwrap();
            let gp = all_plus(n);
            let model = ExpansionModel::new(n, eps).unwrap();
            let mut last_ratio = f64::INFINITY;
            for v in [1e-4, 1e-5, 1e-6] {
                let exact = bc_of_mixture(&iso, &gp, v, n).unwrap();
                let approx = model.bc(v).unwrap();
                let ratio = (exact - approx).abs() / (v * v.ln().abs());
                assert!(ratio < last_ratio);
                last_ratio = ratio;
            }
            assert!(last_ratio < 1e-4);
        }
    }

    #[test]
    fn small_v_expansion_tracks_the_exact_values() {
        for seed in 0..10 {
            let (b, _) = random_nonlocal_box(4, seed, 0.1).unwrap();
            let (aligned, _) = align_to_canonical(&b, 1e-9).unwrap();
            let gp = all_plus(4);
            let exp = small_v_expansion(&aligned, &gp, 4).unwrap();
            let margin = c_value(&aligned, &canonical(4)).unwrap() - 2.0;
            assert!((exp.slope - margin / 2.0).abs() < 1e-12);
            for v in [1e-7, 1e-9] {
                let exact = bc_of_mixture(&aligned, &gp, v, 4).unwrap();
                let lead = v * exp.bc_per_v_bits(-v.ln());
                assert!(
                    (exact - lead).abs() < exp.remainder_bound(v) / LN_2 + 1e-18,
                    "v = {v}: exact {exact} vs leading {lead}"
                );
            }
        }
    }

    #[test]
    fn activation_finds_the_extremal_boxes_at_half_weight() {
        for n in 3..=8usize {
            let b = pr_box(&canonical(n)).unwrap();
            let res = activation_search(&b, &ActivationOptions::default()).unwrap();
            assert!(res.found);
            assert_eq!(res.certificate, Some(ActivationCertificate::GridScan));
            assert_eq!(res.k_star, Some(n));
            // first grid point already violates maximally
            assert!(res.bc_at_v.unwrap() >= 1.0 - 1e-9);
            assert!((res.v_star.unwrap() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn activation_threshold_for_isotropic_boxes() {
        let opts = ActivationOptions::default();
        let strong = isotropic_box(4, 0.9, &canonical(4)).unwrap();
        let res = activation_search(&strong, &opts).unwrap();
        assert!(res.found);

        let weak = isotropic_box(4, 0.4, &canonical(4)).unwrap();
        let res = activation_search(&weak, &opts).unwrap();
        assert!(!res.found);
        assert!(res.margin.is_none());
    }

    #[test]
    fn near_threshold_isotropic_boxes_need_tiny_weights_but_still_activate() {
        // coefficient 0.04: the first violating weight sits near 4e-18
        let iso = isotropic_box(4, 0.51, &canonical(4)).unwrap();
        let res = activation_search(&iso, &ActivationOptions::default()).unwrap();
        assert!(res.found);
        assert_eq!(res.certificate, Some(ActivationCertificate::GridScan));
        let v = res.v_star.unwrap();
        assert!(v < 1e-15, "expected deep violation weight, got {v}");
        assert!(res.bc_at_v.unwrap() > 0.0);

        // coefficient 0.04 with larger |f|: violation near 2e-33
        let iso = isotropic_box(7, 0.72, &canonical(7)).unwrap();
        let res = activation_search(&iso, &ActivationOptions::default()).unwrap();
        assert!(res.found);
        let v = res.v_star.unwrap();
        assert!(v < 1e-30, "expected deep violation weight, got {v}");
    }

    #[test]
    fn asymptotic_certificate_covers_underflowing_margins() {
        // margin ~1e-4 drives the violating weight far below double range
        let g = canonical(4);
        let eps = 0.5 + 0.5e-4;
        let iso = isotropic_box(4, eps, &g).unwrap();
        let res = activation_search(&iso, &ActivationOptions::default()).unwrap();
        assert!(res.found);
        assert_eq!(
            res.certificate,
            Some(ActivationCertificate::SmallVAsymptotics)
        );
        assert!(res.ln_v_star.unwrap() < -300.0);
        assert!(res.bc_per_v.unwrap() > 0.0);
    }

    #[test]
    fn local_boxes_never_activate() {
        let opts = ActivationOptions::default();
        for seed in 0..30 {
            let b = random_local_box(4, seed).unwrap();
            let res = activation_search(&b, &opts).unwrap();
            assert!(!res.found);
        }
    }

    #[test]
    fn activation_without_depolarization() {
        let opts = ActivationOptions {
            depolarize: false,
            ..ActivationOptions::default()
        };
        for seed in 0..20 {
            let (b, _) = random_nonlocal_box(5, seed, 0.05).unwrap();
            let res = activation_search(&b, &opts).unwrap();
            assert!(res.found, "seed {seed}");
            assert!(!res.used_depolarization);
            let bc = res.bc_per_v.unwrap();
            assert!(bc > 0.0);
        }
    }

    #[test]
    fn activation_is_stable_under_relabeling() {
        use crate::symmetry::{LocalOperation, RelabelAtom};
        let opts = ActivationOptions::default();
        for (seed, nonlocal) in [(3u64, true), (4, true), (5, false)] {
            let b = if nonlocal {
                random_nonlocal_box(4, seed, 0.2).unwrap().0
            } else {
                random_local_box(4, seed).unwrap()
            };
            let base = activation_search(&b, &opts).unwrap();
            assert_eq!(base.found, nonlocal);
            for op in [
                LocalOperation::new(vec![RelabelAtom::CyclicShift { offset: 2 }]),
                LocalOperation::new(vec![RelabelAtom::OutputFlip {
                    observables: vec![1, 3],
                }]),
                LocalOperation::new(vec![
                    RelabelAtom::CyclicShift { offset: 1 },
                    RelabelAtom::OutputFlip {
                        observables: vec![2],
                    },
                ]),
            ] {
                let res = activation_search(&op.apply(&b).unwrap(), &opts).unwrap();
                assert_eq!(res.found, base.found);
                if nonlocal {
                    // the relabeling permutes edges, so the violation margin
                    // carries over exactly
                    assert!((res.margin.unwrap() - base.margin.unwrap()).abs() < 1e-12);
                    assert!(res.bc_per_v.unwrap() > 0.0);
                }
            }
        }
    }

    #[test]
    fn curve_points_carry_both_columns() {
        let pts = isotropic_activation_curve(4, 0.8, &[1e-2, 1e-4, 1e-6]).unwrap();
        assert_eq!(pts.len(), 3);
        for p in pts {
            assert_eq!(p.k, 4);
            assert!(p.bc_expansion.is_finite());
            assert!(p.bc_exact.is_finite());
        }
    }

    #[test]
    fn regression_intercept_matches_the_analytic_expansion() {
        let (b, _) = random_nonlocal_box(4, 9, 0.3).unwrap();
        let (aligned, _) = align_to_canonical(&b, 1e-9).unwrap();
        let gp = all_plus(4);
        let weights: Vec<f64> = (20..28).map(|k| 2f64.powi(-k)).collect();
        let (intercept, slope) = small_v_intercept(&aligned, &gp, 4, &weights).unwrap();
        let exp = small_v_expansion(&aligned, &gp, 4).unwrap();
        // bc/v * ln4 = 2 (slope (1 - ln v) + intercept) in nats
        assert!((slope - (-2.0 * exp.slope)).abs() < 1e-6, "slope {slope}");
        assert!(
            (intercept - 2.0 * (exp.slope + exp.intercept)).abs() < 1e-5,
            "intercept {intercept} vs {}",
            2.0 * (exp.slope + exp.intercept)
        );
    }

    #[test]
    fn deep_weight_values_match_an_independent_high_precision_oracle() {
        // Expected values computed with 400-digit arithmetic from the exact
        // f64 entries of this box; plain entropy sums would drown these in
        // absolute rounding noise (~1e-16).
        let iso = isotropic_box(7, 0.72, &canonical(7)).unwrap();
        let gp = all_plus(7);
        for (exp2, oracle) in [
            (-120, 1.7553156481636399e-37),
            (-300, 1.8818133379242726e-90),
        ] {
            let v = 2f64.powi(exp2);
            let bc = bc_of_mixture(&iso, &gp, v, 7).unwrap();
            let rel = ((bc - oracle) / oracle).abs();
            assert!(rel < 5e-13, "v = 2^{exp2}: {bc:e} vs {oracle:e} (rel {rel:e})");
        }
    }

    #[test]
    fn white_noise_mixtures_stay_nonpositive() {
        let w = white_noise(4, 2).unwrap();
        let gp = all_plus(4);
        for v in VGridSpec::default().points().step_by(10) {
            for k in 1..=4 {
                assert!(bc_of_mixture(&w, &gp, v, k).unwrap() <= 1e-15);
            }
        }
    }
}

//! Randomized activation experiments over the nonsignalling polytope.
//!
//! Samples boxes from the flat vertex mixture, classifies them with the
//! facet oracle, and verifies that every nonlocal sample activates
//! entropically (by default without depolarization) while no local sample
//! produces a spurious violation anywhere on the mixing-weight grid.

use std::fmt;

use crate::activation::{
    activation_search, mixture_bc_values, small_v_expansion, ActivationOptions, VGridSpec,
};
use crate::error::{Error, Result};
use crate::oracle::facet_check;
use crate::par;
use crate::sign::SignVector;
use crate::tolerance;
use crate::vertex::random_ns_box;

/// Cycle sizes beyond this are refused unless conjecture mode lifts the
/// guard: the vertex count doubles with every step.
pub const EXPERIMENT_GUARD: usize = 7;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    /// Depolarize inside the activation pipeline. Off by default: the point
    /// of the experiment is that plain mixing already suffices.
    pub depolarize: bool,
    /// Lift the cycle-size guard (conjecture probing).
    pub lift_guard: bool,
    pub parallel: bool,
}

impl ExperimentConfig {
    pub fn new(n: usize, trials: usize, seed: u64) -> Self {
        Self {
            n,
            trials,
            seed,
            tol: tolerance::VIOLATION,
            depolarize: false,
            lift_guard: false,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone)]
enum TrialOutcome {
    Local { false_positive: bool },
    Nonlocal {
        activated: bool,
        margin: f64,
        bc_per_v: Option<f64>,
    },
}

/// Aggregate record of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub depolarize: bool,
    pub nonlocal: usize,
    pub activated: usize,
    /// Trial indices of nonlocal samples that failed to activate.
    pub failed: Vec<usize>,
    /// Local samples showing a violation somewhere on the grid (must be 0).
    pub local_false_positives: usize,
    /// Smallest facet violation among the nonlocal samples.
    pub min_margin: Option<f64>,
    /// Worst certified entropic violation per unit mixing weight.
    pub min_bc_per_v: Option<f64>,
}

impl ExperimentSummary {
    pub fn all_nonlocal_activated(&self) -> bool {
        self.failed.is_empty()
    }
}

impl fmt::Display for ExperimentSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "experiment n={} trials={} seed={} depolarize={}",
            self.n,
            self.trials,
            self.seed,
            if self.depolarize { "on" } else { "off" }
        )?;
        writeln!(f, "  nonlocal samples:      {}", self.nonlocal)?;
        writeln!(f, "  activated:             {}", self.activated)?;
        match self.failed.len() {
            0 => writeln!(f, "  failed activations:    none")?,
            k => writeln!(f, "  failed activations:    {k} (trials {:?})", self.failed)?,
        }
        writeln!(f, "  local false positives: {}", self.local_false_positives)?;
        if let Some(m) = self.min_margin {
            writeln!(f, "  min facet margin:      {m:.6e}")?;
        }
        if let Some(b) = self.min_bc_per_v {
            writeln!(f, "  min bc per unit v:     {b:.6e}")?;
        }
        Ok(())
    }
}

/// splitmix64-style derivation so trials are independent of evaluation order.
pub fn trial_seed(master: u64, index: usize) -> u64 {
    let mut z = master.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_trial(cfg: &ExperimentConfig, index: usize) -> Result<TrialOutcome> {
    let b = random_ns_box(cfg.n, trial_seed(cfg.seed, index))?;
    let verdict = facet_check(&b, cfg.tol)?;
    if verdict.is_local {
        // Bypass the membership gate and look for spurious violations of the
        // mixture anywhere on the grid or in the small-v slope.
        let gamma_prime = SignVector::all_plus(cfg.n)?;
        let grid = VGridSpec::default();
        let mut spurious = false;
        'outer: for v in grid.points() {
            for value in mixture_bc_values(&b, &gamma_prime, v)? {
                if value > cfg.tol * v {
                    spurious = true;
                    break 'outer;
                }
            }
        }
        if !spurious {
            for k in 1..=cfg.n {
                if small_v_expansion(&b, &gamma_prime, k)?.slope > cfg.tol / 4.0 {
                    spurious = true;
                    break;
                }
            }
        }
        return Ok(TrialOutcome::Local {
            false_positive: spurious,
        });
    }

    let margin = verdict.violation.as_ref().map_or(0.0, |v| v.amount);
    let opts = ActivationOptions {
        tol: cfg.tol,
        depolarize: cfg.depolarize,
        ..ActivationOptions::default()
    };
    let result = activation_search(&b, &opts)?;
    Ok(TrialOutcome::Nonlocal {
        activated: result.found,
        margin,
        bc_per_v: result.bc_per_v,
    })
}

/// Runs the randomized activation experiment.
pub fn appendix_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    if cfg.n < 3 {
        return Err(Error::CycleTooShort(cfg.n));
    }
    if cfg.n > EXPERIMENT_GUARD && !cfg.lift_guard {
        return Err(Error::ExperimentGuard {
            n: cfg.n,
            limit: EXPERIMENT_GUARD,
        });
    }
    let outcomes = par::map_indexed(cfg.trials, cfg.parallel, 1, |i| run_trial(cfg, i));

    let mut summary = ExperimentSummary {
        n: cfg.n,
        trials: cfg.trials,
        seed: cfg.seed,
        depolarize: cfg.depolarize,
        nonlocal: 0,
        activated: 0,
        failed: Vec::new(),
        local_false_positives: 0,
        min_margin: None,
        min_bc_per_v: None,
    };
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome? {
            TrialOutcome::Local { false_positive } => {
                if false_positive {
                    summary.local_false_positives += 1;
                }
            }
            TrialOutcome::Nonlocal {
                activated,
                margin,
                bc_per_v,
            } => {
                summary.nonlocal += 1;
                summary.min_margin = Some(summary.min_margin.map_or(margin, |m| m.min(margin)));
                if activated {
                    summary.activated += 1;
                    if let Some(b) = bc_per_v {
                        summary.min_bc_per_v =
                            Some(summary.min_bc_per_v.map_or(b, |m| m.min(b)));
                    }
                } else {
                    summary.failed.push(i);
                }
            }
        }
    }
    Ok(summary)
}

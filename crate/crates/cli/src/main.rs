//! `ncycle` — evaluate, classify, and activate n-cycle boxes from the shell.
//!
//! Exit codes: 0 success (or activation found), 2 box is local,
//! 3 nonlocal box not activated, 64 usage error, 65 data error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ncycle::activation::{isotropic_activation_curve, ActivationCertificate};
use ncycle::experiment::{appendix_experiment, ExperimentConfig};
use ncycle::inequality::full_report;
use ncycle::oracle::{decompose_local, facet_check};
use ncycle::{
    activation_search, classical_box, emax_box, io, isotropic_box, pr_box, verify, white_noise,
    ActivationOptions, ActivationResult, CycleBox, SignVector,
};

const EXIT_LOCAL: u8 = 2;
const EXIT_NOT_ACTIVATED: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;

/// Auto-run the decomposition oracle in reports only up to this many
/// deterministic vertices; beyond it the facet verdict stands alone.
const AUTO_LP_LIMIT: u128 = 1 << 14;

#[derive(Parser)]
#[command(name = "ncycle", version, about = "n-cycle boxes: inequalities, membership, entropic activation", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every correlation and entropic inequality plus membership
    Report(ReportArgs),
    /// Search for an entropic violation of a mixed nonlocal box
    Activate(ActivateArgs),
    /// Run the quantitative reproduction gate
    VerifyPaper(VerifyArgs),
    /// Randomized activation experiment over the nonsignalling polytope
    Appendix(AppendixArgs),
    /// Exact vs first-order mixture values for an isotropic box, as CSV
    Curve(CurveArgs),
    /// Write a seeded random box as a box file
    Sample(SampleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Structured,
}

#[derive(Args)]
struct BoxSource {
    /// Box file (JSON document with n, d, edges, optional label)
    input: Option<PathBuf>,
    /// Built-in box instead of a file: pr4, pr, classical, white, iso, emax4
    #[arg(long)]
    preset: Option<String>,
    /// Cycle size for presets that need one
    #[arg(long)]
    n: Option<usize>,
    /// Outcome alphabet size (white preset only)
    #[arg(long)]
    d: Option<usize>,
    /// Noise weight for the iso preset
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    source: BoxSource,
    /// Violation tolerance
    #[arg(long, default_value_t = ncycle::tolerance::VIOLATION)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write output here (atomically) instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the local decomposition certificate as (label, weight) CSV
    #[arg(long)]
    certificate_out: Option<PathBuf>,
}

#[derive(Args)]
struct ActivateArgs {
    #[command(flatten)]
    source: BoxSource,
    #[arg(long, default_value_t = ncycle::tolerance::VIOLATION)]
    tol: f64,
    /// Skip the depolarization step of the pipeline
    #[arg(long)]
    no_depolarize: bool,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the certified violating mixture as a box file
    #[arg(long)]
    mixture_out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated criterion indices to run (default: all)
    #[arg(long, value_delimiter = ',')]
    only: Vec<usize>,
    /// Disable data-parallel execution inside criteria
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct AppendixArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = ncycle::tolerance::VIOLATION)]
    tol: f64,
    /// Depolarize inside the activation pipeline (off by default here)
    #[arg(long)]
    depolarize: bool,
    /// Lift the cycle-size guard to probe beyond the verified range
    #[arg(long)]
    conjecture: bool,
    /// Disable parallel trials
    #[arg(long)]
    sequential: bool,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SampleKind {
    /// Flat mixture of all nonsignalling vertices
    Ns,
    /// Flat mixture of the deterministic vertices only
    Local,
    /// Pushed toward a random extremal vertex until nonlocal
    Nonlocal,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = SampleKind::Ns)]
    kind: SampleKind,
    /// Violation margin floor for nonlocal samples
    #[arg(long, default_value_t = 0.05)]
    margin: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    epsilon: f64,
    /// Number of halvings of the mixing weight starting at 1/2
    #[arg(long, default_value_t = 48)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Data(String),
}

impl From<ncycle::Error> for CliError {
    fn from(e: ncycle::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not usage errors
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let outcome = match cli.command {
        Command::Report(args) => cmd_report(&args),
        Command::Activate(args) => cmd_activate(&args),
        Command::VerifyPaper(args) => cmd_verify(&args),
        Command::Appendix(args) => cmd_appendix(&args),
        Command::Curve(args) => cmd_curve(&args),
        Command::Sample(args) => cmd_sample(&args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_DATA)
        }
    }
}

fn load_box(source: &BoxSource) -> CliResult<(CycleBox, String)> {
    match (&source.input, &source.preset) {
        (Some(_), Some(_)) => Err(CliError::Usage(
            "give either a box file or --preset, not both".into(),
        )),
        (None, None) => Err(CliError::Usage(
            "no input: give a box file or --preset".into(),
        )),
        (Some(path), None) => {
            for (flag, set) in [
                ("--n", source.n.is_some()),
                ("--d", source.d.is_some()),
                ("--epsilon", source.epsilon.is_some()),
            ] {
                if set {
                    return Err(CliError::Usage(format!("{flag} only applies to presets")));
                }
            }
            let (b, label) = io::read_box_file(path)?;
            let name = label.unwrap_or_else(|| path.display().to_string());
            Ok((b, name))
        }
        (None, Some(preset)) => build_preset(source, preset),
    }
}

fn build_preset(source: &BoxSource, preset: &str) -> CliResult<(CycleBox, String)> {
    let need_n = || {
        source
            .n
            .ok_or_else(|| CliError::Usage(format!("preset {preset} requires --n")))
    };
    let no_eps = |ok: bool| {
        if !ok && source.epsilon.is_some() {
            return Err(CliError::Usage(format!(
                "preset {preset} does not take --epsilon"
            )));
        }
        Ok(())
    };
    if preset != "white" && source.d.is_some() {
        return Err(CliError::Usage("--d only applies to the white preset".into()));
    }
    match preset {
        "pr4" => {
            no_eps(false)?;
            Ok((pr_box(&SignVector::canonical(4)?)?, "pr4".into()))
        }
        "pr" => {
            no_eps(false)?;
            let n = need_n()?;
            Ok((pr_box(&SignVector::canonical(n)?)?, format!("pr{n}")))
        }
        "classical" => {
            no_eps(false)?;
            let n = need_n()?;
            Ok((
                classical_box(&SignVector::all_plus(n)?)?,
                format!("classical{n}"),
            ))
        }
        "white" => {
            no_eps(false)?;
            let n = need_n()?;
            let d = source.d.unwrap_or(2);
            Ok((white_noise(n, d)?, format!("white{n}")))
        }
        "iso" => {
            let n = need_n()?;
            let eps = source
                .epsilon
                .ok_or_else(|| CliError::Usage("preset iso requires --epsilon".into()))?;
            Ok((
                isotropic_box(n, eps, &SignVector::canonical(n)?)?,
                format!("iso{n}-eps{eps}"),
            ))
        }
        "emax4" => {
            no_eps(false)?;
            Ok((emax_box(&SignVector::canonical(4)?, 4)?, "emax4".into()))
        }
        other => Err(CliError::Usage(format!(
            "unknown preset {other}; available: pr4, pr, classical, white, iso, emax4"
        ))),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => Ok(io::write_atomic(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_report(args: &ReportArgs) -> CliResult<u8> {
    let (b, name) = load_box(&args.source)?;
    let report = full_report(&b, args.tol)?;
    let facet = if b.d() == 2 {
        Some(facet_check(&b, args.tol)?)
    } else {
        None
    };
    let columns = (b.d() as u128).saturating_pow(b.n() as u32);
    let lp = if columns <= AUTO_LP_LIMIT {
        Some(decompose_local(&b, args.tol)?)
    } else {
        None
    };

    let mut text = String::new();
    match args.format {
        Format::Csv => {
            text.push_str(&report.to_csv());
            if let Some(v) = &facet {
                let _ = writeln!(text, "# facet_check: {v}");
            }
            if let Some(v) = &lp {
                let _ = writeln!(text, "# decompose_local: {v}");
            }
        }
        Format::Structured => {
            let _ = writeln!(text, "box name={name} n={} d={}", b.n(), b.d());
            for row in report.rows() {
                let _ = writeln!(
                    text,
                    "inequality label={} value={} bound={} violated={}",
                    row.label, row.value, row.bound, row.violated
                );
            }
            if let Some(v) = &facet {
                let _ = writeln!(text, "verdict method=facet-check local={}", v.is_local);
            }
            if let Some(v) = &lp {
                let _ = writeln!(text, "verdict method=lp-decomposition local={}", v.is_local);
            }
        }
        Format::Table => {
            let _ = writeln!(text, "box: {name} (n={}, d={})", b.n(), b.d());
            text.push_str(&report.to_table());
            if let Some(v) = &facet {
                let _ = writeln!(text, "facet_check:      {v}");
            }
            match &lp {
                Some(v) => {
                    let _ = writeln!(text, "decompose_local:  {v}");
                }
                None => {
                    let _ = writeln!(
                        text,
                        "decompose_local:  skipped ({columns} vertices exceed the report limit)"
                    );
                }
            }
        }
    }
    emit(&args.out, &text)?;

    if let Some(path) = &args.certificate_out {
        match lp.as_ref().and_then(|v| v.decomposition.as_ref()) {
            Some(dec) => io::write_atomic(path, &dec.to_csv())?,
            None => {
                return Err(CliError::Data(
                    "no decomposition certificate available for --certificate-out".into(),
                ))
            }
        }
    }
    Ok(0)
}

fn describe_activation(res: &ActivationResult, format: Format) -> String {
    let mut text = String::new();
    let kv: Vec<(&str, String)> = vec![
        ("found", res.found.to_string()),
        ("depolarized", res.used_depolarization.to_string()),
        ("alignment", res.alignment.to_string()),
        (
            "margin",
            res.margin.map_or("-".into(), |m| format!("{m:.12e}")),
        ),
        (
            "gamma_prime",
            res.gamma_prime
                .as_ref()
                .map_or("-".into(), ToString::to_string),
        ),
        ("k", res.k_star.map_or("-".into(), |k| k.to_string())),
        (
            "v",
            res.v_star.map_or("-".into(), |v| format!("{v:e}")),
        ),
        (
            "ln_v",
            res.ln_v_star.map_or("-".into(), |v| format!("{v:.6}")),
        ),
        (
            "bc_at_v",
            res.bc_at_v.map_or("-".into(), |b| format!("{b:e}")),
        ),
        (
            "bc_per_v",
            res.bc_per_v.map_or("-".into(), |b| format!("{b:.12e}")),
        ),
        (
            "certificate",
            match res.certificate {
                Some(ActivationCertificate::GridScan) => "grid-scan".into(),
                Some(ActivationCertificate::SmallVAsymptotics) => "small-v-asymptotics".into(),
                None => "-".into(),
            },
        ),
    ];
    match format {
        Format::Csv => {
            let header: Vec<&str> = kv.iter().map(|(k, _)| *k).collect();
            let row: Vec<String> = kv.iter().map(|(_, v)| v.clone()).collect();
            let _ = writeln!(text, "{}", header.join(","));
            let _ = writeln!(text, "{}", row.join(","));
        }
        Format::Table | Format::Structured => {
            for (k, v) in kv {
                let _ = writeln!(text, "{k:<13} {v}");
            }
            if let Some(d) = &res.diagnostic {
                let _ = writeln!(text, "diagnostic    {d}");
            }
        }
    }
    text
}

fn cmd_activate(args: &ActivateArgs) -> CliResult<u8> {
    let (b, _) = load_box(&args.source)?;
    let opts = ActivationOptions {
        tol: args.tol,
        depolarize: !args.no_depolarize,
        ..ActivationOptions::default()
    };
    let res = activation_search(&b, &opts)?;
    emit(&args.out, &describe_activation(&res, args.format))?;

    if let Some(path) = &args.mixture_out {
        let (Some(gamma_prime), Some(v)) = (&res.gamma_prime, res.v_star) else {
            return Err(CliError::Data(
                "no violating mixture to export (box not activated)".into(),
            ));
        };
        if v <= 0.0 {
            return Err(CliError::Data(format!(
                "certified mixing weight underflows double precision (ln v = {}); cannot export the mixture",
                res.ln_v_star.unwrap_or(f64::NEG_INFINITY)
            )));
        }
        let aligned = res.alignment.apply(&b)?;
        let working = if res.used_depolarization {
            ncycle::depolarize(&aligned, &SignVector::canonical(b.n())?)?
        } else {
            aligned
        };
        let mixture = ncycle::mix2(&working, &classical_box(gamma_prime)?, v)?;
        io::write_box_file(path, &mixture, Some("violating-mixture"))?;
    }

    if res.found {
        Ok(0)
    } else if res.margin.is_none() {
        Ok(EXIT_LOCAL)
    } else {
        Ok(EXIT_NOT_ACTIVATED)
    }
}

fn cmd_verify(args: &VerifyArgs) -> CliResult<u8> {
    let indices: Vec<usize> = if args.only.is_empty() {
        verify::CRITERIA.iter().map(|(i, _)| *i).collect()
    } else {
        args.only.clone()
    };
    let mut all_passed = true;
    for index in indices {
        match verify::run(index, !args.sequential) {
            Some(report) => {
                println!("{}", report.line());
                all_passed &= report.passed;
            }
            None => {
                return Err(CliError::Usage(format!(
                    "no criterion {index}; valid indices are 1..={}",
                    verify::CRITERIA.len()
                )))
            }
        }
    }
    Ok(if all_passed { 0 } else { 1 })
}

fn cmd_appendix(args: &AppendixArgs) -> CliResult<u8> {
    let cfg = ExperimentConfig {
        n: args.n,
        trials: args.trials,
        seed: args.seed,
        tol: args.tol,
        depolarize: args.depolarize,
        lift_guard: args.conjecture,
        parallel: !args.sequential,
    };
    let summary = appendix_experiment(&cfg)?;
    let text = match args.format {
        Format::Csv => {
            let mut t = String::from(
                "n,trials,seed,depolarize,nonlocal,activated,failed,local_false_positives,min_margin,min_bc_per_v\n",
            );
            let _ = writeln!(
                t,
                "{},{},{},{},{},{},{},{},{},{}",
                summary.n,
                summary.trials,
                summary.seed,
                summary.depolarize,
                summary.nonlocal,
                summary.activated,
                summary.failed.len(),
                summary.local_false_positives,
                summary.min_margin.map_or(String::from("-"), |m| m.to_string()),
                summary.min_bc_per_v.map_or(String::from("-"), |m| m.to_string()),
            );
            t
        }
        _ => summary.to_string(),
    };
    emit(&args.out, &text)?;
    let clean = summary.all_nonlocal_activated() && summary.local_false_positives == 0;
    Ok(if clean { 0 } else { EXIT_NOT_ACTIVATED })
}

fn cmd_sample(args: &SampleArgs) -> CliResult<u8> {
    let (b, label) = match args.kind {
        SampleKind::Ns => (
            ncycle::random_ns_box(args.n, args.seed)?,
            format!("random-ns-n{}-seed{}", args.n, args.seed),
        ),
        SampleKind::Local => (
            ncycle::random_local_box(args.n, args.seed)?,
            format!("random-local-n{}-seed{}", args.n, args.seed),
        ),
        SampleKind::Nonlocal => {
            let (b, target) = ncycle::random_nonlocal_box(args.n, args.seed, args.margin)?;
            (b, format!("random-nonlocal-n{}-seed{}-[{target}]", args.n, args.seed))
        }
    };
    emit(&args.out, &io::to_json(&b, Some(&label)))?;
    Ok(0)
}

fn cmd_curve(args: &CurveArgs) -> CliResult<u8> {
    if args.points == 0 {
        return Err(CliError::Usage("--points must be positive".into()));
    }
    let weights: Vec<f64> = (0..args.points).map(|i| 0.5 * 0.5f64.powi(i as i32)).collect();
    let points = isotropic_activation_curve(args.n, args.epsilon, &weights)?;
    let mut text = String::from("v,k,bc_exact,bc_expansion\n");
    for p in points {
        let _ = writeln!(text, "{},{},{},{}", p.v, p.k, p.bc_exact, p.bc_expansion);
    }
    emit(&args.out, &text)?;
    Ok(0)
}

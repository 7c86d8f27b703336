//! Subcommand implementations. Each returns the process exit code.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use preserve_core::extremal::{kadison_extreme_test, ExtremeVerdict, StarAlgebraBasis};
use preserve_core::gen::{derive_seed, generate, InstanceKind, InstanceSpec};
use preserve_core::linalg::{DEFAULT_ABS_TOL, RNG_NAME};
use preserve_core::preserver::{
    classify_preserver, falsify_by_sampling, verify_identities, Verdict,
};
use preserve_core::Tolerance;

use crate::error::CliError;
use crate::files::{read_json, write_json, BasisFile, MatrixFile, SuperOpFile};
use crate::report::{AuditJson, CertificateJson, CrossCheck, ExtremeJson, ReportFile};

/// Environment variable that turns on ANSI color in the stderr summary.
pub const COLOR_ENV: &str = "PRESERVE_COLOR";

#[derive(Debug, Parser)]
#[command(
    name = "preserve",
    version,
    about = "Decide whether a linear map on M_n preserves unitaries"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test whether a matrix is an extreme point of the unit ball of a *-algebra.
    CheckExtreme {
        input: PathBuf,
        /// "full" for all of M_n, or a basis file.
        #[arg(long, default_value = "full")]
        algebra: String,
        #[arg(long, default_value_t = DEFAULT_ABS_TOL)]
        tol: f64,
    },
    /// Classify a superoperator as a unitary preserver or not.
    Classify {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ABS_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        falsify_trials: usize,
    },
    /// Generate a superoperator instance.
    Make {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Audit the identities every unitary preserver satisfies.
    VerifyIdentities {
        input: PathBuf,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_ABS_TOL)]
        tol: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Hom,
    Anti,
    Mixed,
    TracePinch,
    Perturbed,
    RandomContraction,
}

struct Clock {
    started_unix_ms: u64,
    start: Instant,
}

impl Clock {
    fn start() -> Self {
        let started_unix_ms = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_millis() as u64);
        Self {
            started_unix_ms,
            start: Instant::now(),
        }
    }

    fn report<T>(
        &self,
        command: &str,
        tolerance: Tolerance,
        seed: Option<u64>,
        result: T,
    ) -> ReportFile<T> {
        ReportFile {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            tolerance,
            seed,
            rng: RNG_NAME.to_string(),
            started_unix_ms: self.started_unix_ms,
            elapsed_ms: self.start.elapsed().as_secs_f64() * 1e3,
            result,
        }
    }
}

fn tolerance(abs: f64) -> Result<Tolerance, CliError> {
    Tolerance::new(abs)
        .map_err(|_| CliError::usage(format!("--tol must be finite and >= 0, got {abs}")))
}

fn emit<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::format(e.to_string()))?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}").map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

fn summary(ok: bool, line: &str) {
    let color = std::env::var(COLOR_ENV)
        .map(|v| matches!(v.as_str(), "1" | "true" | "always" | "yes"))
        .unwrap_or(false);
    if color {
        let code = if ok { 32 } else { 31 };
        eprintln!("\x1b[{code}m{line}\x1b[0m");
    } else {
        eprintln!("{line}");
    }
}

pub fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::CheckExtreme {
            input,
            algebra,
            tol,
        } => check_extreme(&input, &algebra, tol),
        Command::Classify {
            input,
            tol,
            seed,
            falsify_trials,
        } => classify(&input, tol, seed, falsify_trials),
        Command::Make {
            kind,
            n,
            p,
            q,
            epsilon,
            seed,
            out,
        } => make(kind, n, p, q, epsilon, seed, &out),
        Command::VerifyIdentities {
            input,
            samples,
            seed,
            tol,
        } => verify(&input, samples, seed, tol),
    }
}

fn check_extreme(input: &Path, algebra: &str, tol: f64) -> Result<u8, CliError> {
    let clock = Clock::start();
    let tol = tolerance(tol)?;
    let w = read_json::<MatrixFile>(input)?.to_matrix()?;
    if !w.is_square() {
        return Err(CliError::format(format!(
            "extreme-point test needs a square matrix, got {}x{}",
            w.rows(),
            w.cols()
        )));
    }
    let basis = if algebra == "full" {
        StarAlgebraBasis::full(w.rows())
    } else {
        read_json::<BasisFile>(Path::new(algebra))?.to_basis(&tol)?
    };
    let report = kadison_extreme_test(&w, &basis, &tol)?;
    let verdict = report.verdict;
    let body = ExtremeJson::new(w.rows(), w.cols(), basis.elements().len(), report)?;
    emit(&clock.report("check-extreme", tol, None, body))?;
    summary(
        verdict == ExtremeVerdict::Extreme,
        &format!("check-extreme: {verdict:?}"),
    );
    Ok(match verdict {
        ExtremeVerdict::Extreme => 0,
        ExtremeVerdict::NotExtreme => 1,
        ExtremeVerdict::Inconclusive => 2,
    })
}

fn classify(input: &Path, tol: f64, seed: u64, trials: usize) -> Result<u8, CliError> {
    let clock = Clock::start();
    let tol = tolerance(tol)?;
    let phi = read_json::<SuperOpFile>(input)?.to_superop()?;
    let cert = classify_preserver(&phi, &tol, seed)?;
    let cross_check = if phi.is_endomorphism() {
        let falsifier_seed = derive_seed(seed, "falsify", 0);
        let witness = falsify_by_sampling(&phi, trials, falsifier_seed, &tol)?;
        let agree = match cert.verdict {
            Verdict::Inconclusive => None,
            v => Some(witness.is_some() == (v == Verdict::NotPreserver)),
        };
        Some(CrossCheck {
            falsify_trials: trials,
            falsifier_seed,
            falsifier_witness: witness.as_ref().map(MatrixFile::from_matrix),
            agree,
        })
    } else {
        None
    };
    let body = CertificateJson::from_certificate(&cert, cross_check)?;
    emit(&clock.report("classify", tol, Some(seed), body))?;
    let mut line = format!("classify: {:?} ({:?})", cert.verdict, cert.kind);
    if let Some(r) = cert.reconstruction_residual {
        line.push_str(&format!(", reconstruction residual {r:.3e}"));
    }
    if let Some(note) = &cert.note {
        line.push_str(&format!("; {note}"));
    }
    summary(cert.verdict == Verdict::Preserver, &line);
    Ok(match cert.verdict {
        Verdict::Preserver => 0,
        Verdict::NotPreserver => 1,
        Verdict::Inconclusive => 2,
    })
}

fn instance_kind(
    kind: KindArg,
    p: Option<usize>,
    q: Option<usize>,
    epsilon: Option<f64>,
) -> Result<InstanceKind, CliError> {
    if kind != KindArg::Mixed && (p.is_some() || q.is_some()) {
        return Err(CliError::usage("--p and --q only apply to --kind mixed"));
    }
    if kind != KindArg::Perturbed && epsilon.is_some() {
        return Err(CliError::usage(
            "--epsilon only applies to --kind perturbed",
        ));
    }
    Ok(match kind {
        KindArg::Hom => InstanceKind::HomPreserver,
        KindArg::Anti => InstanceKind::AntiPreserver,
        KindArg::Mixed => match (p, q) {
            (Some(p), Some(q)) => InstanceKind::MixedJordan { p, q },
            _ => return Err(CliError::usage("--kind mixed needs --p and --q")),
        },
        KindArg::TracePinch => InstanceKind::TracePinch,
        KindArg::Perturbed => match epsilon {
            Some(epsilon) => InstanceKind::PerturbedPreserver { epsilon },
            None => return Err(CliError::usage("--kind perturbed needs --epsilon")),
        },
        KindArg::RandomContraction => InstanceKind::RandomContraction,
    })
}

fn make(
    kind: KindArg,
    n: usize,
    p: Option<usize>,
    q: Option<usize>,
    epsilon: Option<f64>,
    seed: u64,
    out: &Path,
) -> Result<u8, CliError> {
    let kind = instance_kind(kind, p, q, epsilon)?;
    let spec = InstanceSpec::new(n, kind, seed).map_err(|e| CliError::usage(e.to_string()))?;
    let phi = generate(&spec)?;
    write_json(out, &SuperOpFile::from_superop(&phi))?;
    emit(&spec)?;
    Ok(0)
}

fn verify(input: &Path, samples: usize, seed: u64, tol: f64) -> Result<u8, CliError> {
    let clock = Clock::start();
    let tol = tolerance(tol)?;
    let phi = read_json::<SuperOpFile>(input)?.to_superop()?;
    let audit = verify_identities(&phi, samples, seed, &tol)?;
    let passed = audit.passed;
    let note = (!phi.is_endomorphism()).then(|| {
        format!(
            "theorem-scope: map M_{} -> M_{} is not an endomorphism; diagnostics only",
            phi.dim_in(),
            phi.dim_out()
        )
    });
    let scoped = note.is_some();
    let body = AuditJson::new(phi.dim_in(), phi.dim_out(), note, audit)?;
    let worst = body.audit.max_residual();
    emit(&clock.report("verify-identities", tol, Some(seed), body))?;
    summary(
        passed,
        &format!("verify-identities: worst residual {worst:.3e}, passed {passed}"),
    );
    Ok(if scoped {
        2
    } else if passed {
        0
    } else {
        1
    })
}

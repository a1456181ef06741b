use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use serde_json::value::RawValue;
use sicprob::io::{scientific, search_result_doc, sic_from_doc};
use sicprob::quantum::HilbertDim;
use sicprob::search::{search_with_jobs, SearchConfig, SearchStatus};
use sicprob::sic::CERTIFICATION_THRESHOLD;

use crate::session::{CliResult, ExitStatus, Session};

#[derive(Debug, Args)]
pub struct FindArgs {
    /// Hilbert-space dimension.
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Maximum number of random restarts.
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    /// Overlap residual at which a candidate is accepted.
    #[arg(long, visible_alias = "tol", default_value_t = 1e-9)]
    pub target: f64,
    /// Iteration cap for each local descent.
    #[arg(long, default_value_t = 20_000)]
    pub max_iterations: usize,
    /// Worker threads for restarts; defaults to available parallelism.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn find(args: &FindArgs, session: &mut Session) -> CliResult<ExitStatus> {
    session.record_seed(args.seed);
    let dim = HilbertDim::new(args.dim)?;
    let config = SearchConfig {
        max_restarts: args.restarts,
        max_iterations: args.max_iterations,
        target_residual: args.target,
        ..SearchConfig::new(dim, args.seed)
    };
    config.validate()?;
    let jobs = args.jobs.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    let result = search_with_jobs(&config, jobs)?;
    session.emit(args.out.as_deref(), &search_result_doc(&result))?;
    match result.status {
        SearchStatus::Found => {
            session.say(format_args!(
                "found SIC fiducial in d={} after {} restart(s), {} iterations: residual {:.3e}, frame-potential gap {:.3e}",
                args.dim, result.restarts_used, result.iterations_used, result.residual, result.frame_potential_gap
            ));
            Ok(ExitStatus::Success)
        }
        SearchStatus::NotFound => {
            eprintln!(
                "no SIC fiducial found in d={} within {} restart(s); best residual {:.3e}",
                args.dim, result.restarts_used, result.residual
            );
            Ok(ExitStatus::NotFound)
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// A SIC, fiducial or search-result document.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = CERTIFICATION_THRESHOLD)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct VerificationDoc {
    kind: &'static str,
    dim: usize,
    verified: bool,
    tol: f64,
    residual: Box<RawValue>,
    worst_pair: (usize, usize),
    povm_deviation: Box<RawValue>,
    gram_determinant: Box<RawValue>,
}

pub fn verify(args: &VerifyArgs, session: &mut Session) -> CliResult<ExitStatus> {
    let doc = session.read_document(&args.input)?;
    let sic = sic_from_doc(&doc)?;
    let report = sic.report();
    let verified = report.residual <= args.tol;
    session.emit(
        args.out.as_deref(),
        &VerificationDoc {
            kind: "sic_verification",
            dim: sic.dim().get(),
            verified,
            tol: args.tol,
            residual: scientific(report.residual),
            worst_pair: report.worst_pair,
            povm_deviation: scientific(report.povm_deviation),
            gram_determinant: scientific(report.gram_determinant),
        },
    )?;
    session.say(format_args!(
        "d={} residual {:.6e} at pair {:?}, povm_deviation {:.6e}, gram_determinant {:.6e}: {}",
        sic.dim(),
        report.residual,
        report.worst_pair,
        report.povm_deviation,
        report.gram_determinant,
        if verified {
            "verified"
        } else {
            "NOT a SIC at this tolerance"
        }
    ));
    Ok(if verified {
        ExitStatus::Success
    } else {
        ExitStatus::VerificationFailed
    })
}

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use sicprob::dualtrack::{run_amplitude, run_dual, run_probability};
use sicprob::io::{circuit_from_doc, sic_from_doc, track_report_doc};
use sicprob::quantum::VALIDITY_TOL;

use crate::session::{format_values, CliResult, ExitStatus, Session};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Track {
    Amplitude,
    Probability,
    Both,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    #[arg(long)]
    pub sic: PathBuf,
    #[arg(long, value_enum, default_value_t = Track::Both)]
    pub track: Track,
    /// Largest dual-track deviation accepted by --track both.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, visible_alias = "out")]
    pub report: Option<PathBuf>,
}

#[derive(Serialize)]
struct TrackOutcomeDoc {
    kind: &'static str,
    dim: usize,
    track: &'static str,
    outcome: Vec<f64>,
}

pub fn simulate(args: &SimulateArgs, session: &mut Session) -> CliResult<ExitStatus> {
    let circuit = circuit_from_doc(&session.read_document(&args.circuit)?, VALIDITY_TOL)?;
    let sic = sic_from_doc(&session.read_document(&args.sic)?)?.certified()?;
    let dim = circuit.dim();

    let single = |track: &'static str, outcome: Vec<f64>| -> CliResult<ExitStatus> {
        session.emit(
            args.report.as_deref(),
            &TrackOutcomeDoc {
                kind: "track_outcome",
                dim: dim.get(),
                track,
                outcome: outcome.clone(),
            },
        )?;
        session.say(format_args!(
            "{track} track outcome: {}",
            format_values(&outcome)
        ));
        Ok(ExitStatus::Success)
    };

    match args.track {
        Track::Amplitude => single(
            "amplitude",
            run_amplitude(&circuit, &sic)?.entries().to_vec(),
        ),
        Track::Probability => single(
            "probability",
            run_probability(&circuit, &sic)?.entries().to_vec(),
        ),
        Track::Both => {
            let report = run_dual(&circuit, &sic)?;
            session.emit(args.report.as_deref(), &track_report_doc(dim, &report))?;
            let pass = report.max_abs_deviation <= args.tol;
            session.say(format_args!(
                "d={} steps={} amplitude {}",
                dim,
                circuit.steps().len(),
                format_values(report.amplitude_outcome.entries())
            ));
            session.say(format_args!(
                "probability {}",
                format_values(report.probability_outcome.entries())
            ));
            session.say(format_args!(
                "max_abs_deviation {:.6e} ({})",
                report.max_abs_deviation,
                if pass {
                    "tracks agree"
                } else {
                    "tracks DISAGREE"
                }
            ));
            Ok(if pass {
                ExitStatus::Success
            } else {
                ExitStatus::VerificationFailed
            })
        }
    }
}

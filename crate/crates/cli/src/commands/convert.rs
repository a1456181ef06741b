use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use sicprob::io::{
    density_doc, density_from_doc, mic_from_doc, probs_doc, probs_from_doc, sic_from_doc,
};
use sicprob::quantum::VALIDITY_TOL;
use sicprob::sic::SicStructure;
use sicprob::urgleichung::{
    probs_to_state, probs_to_state_mic, state_to_probs, state_to_probs_mic, MicStructure,
};
use sicprob::Error;

use crate::session::{CliError, CliResult, ExitStatus, Session};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Target {
    Probs,
    State,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long, value_enum)]
    pub to: Target,
    /// A density document (for --to probs) or a probs document (for --to state).
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, conflicts_with = "mic", required_unless_present = "mic")]
    pub sic: Option<PathBuf>,
    #[arg(long)]
    pub mic: Option<PathBuf>,
    /// Validity tolerance for input states.
    #[arg(long, default_value_t = VALIDITY_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

enum Frame {
    Sic(SicStructure),
    Mic(MicStructure),
}

#[derive(Serialize)]
struct RejectionDoc {
    kind: &'static str,
    error: &'static str,
    min_eigenvalue: f64,
}

pub fn convert(args: &ConvertArgs, session: &mut Session) -> CliResult<ExitStatus> {
    let input = session.read_document(&args.input)?;
    let frame = match (&args.sic, &args.mic) {
        (Some(path), _) => Frame::Sic(sic_from_doc(&session.read_document(path)?)?.certified()?),
        (None, Some(path)) => Frame::Mic(mic_from_doc(&session.read_document(path)?)?),
        (None, None) => return Err(CliError::Input("one of --sic or --mic is required".into())),
    };
    match args.to {
        Target::Probs => {
            let rho = density_from_doc(&input, args.tol)?;
            let p = match &frame {
                Frame::Sic(sic) => state_to_probs(&rho, sic)?,
                Frame::Mic(mic) => state_to_probs_mic(&rho, mic)?,
            };
            session.emit(args.out.as_deref(), &probs_doc(&p))?;
            session.say(format_args!(
                "probs (d={}): {}",
                p.dim(),
                crate::session::format_values(p.entries())
            ));
            Ok(ExitStatus::Success)
        }
        Target::State => {
            let p = probs_from_doc(&input)?;
            let rho = match &frame {
                Frame::Sic(sic) => probs_to_state(&p, sic),
                Frame::Mic(mic) => probs_to_state_mic(&p, mic),
            };
            match rho {
                Ok(rho) => {
                    session.emit(args.out.as_deref(), &density_doc(&rho))?;
                    session.say(format_args!(
                        "state (d={}), purity {:.12}",
                        rho.dim(),
                        rho.purity()
                    ));
                    Ok(ExitStatus::Success)
                }
                Err(Error::NotAQuantumState { min_eigenvalue }) => {
                    session.emit(
                        args.out.as_deref(),
                        &RejectionDoc {
                            kind: "conversion_rejected",
                            error: "NotAQuantumState",
                            min_eigenvalue,
                        },
                    )?;
                    session.say(format_args!(
                        "NotAQuantumState: reconstruction has minimum eigenvalue {min_eigenvalue:.6e}"
                    ));
                    Ok(ExitStatus::VerificationFailed)
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::value::RawValue;
use sicprob::io::{density_from_doc, povm_from_doc, probs_from_doc, scientific, sic_from_doc};
use sicprob::quantum::{born_direct, DensityMatrix, VALIDITY_TOL};
use sicprob::sic::SicStructure;
use sicprob::urgleichung::{
    born_urgleichung, classical_ltp, cond_prob_matrix, ltp_deviation, probs_to_state,
    state_to_probs, ProbVector,
};

use crate::session::{format_values, CliError, CliResult, ExitStatus, Session};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Direct,
    Urgleichung,
    Both,
    Ltp,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Urgleichung => "urgleichung",
            Method::Both => "both",
            Method::Ltp => "ltp",
        }
    }
}

#[derive(Debug, Args)]
pub struct BornArgs {
    #[arg(long, conflicts_with = "probs", required_unless_present = "probs")]
    pub state: Option<PathBuf>,
    #[arg(long)]
    pub probs: Option<PathBuf>,
    #[arg(long)]
    pub povm: PathBuf,
    #[arg(long)]
    pub sic: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Method::Both)]
    pub method: Method,
    /// Largest direct/urgleichung deviation accepted by --method both.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct BornDoc {
    kind: &'static str,
    method: &'static str,
    dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    direct: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    urgleichung: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classical: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_abs_deviation: Option<Box<RawValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ltp_deviation: Option<Box<RawValue>>,
}

enum Input {
    State(DensityMatrix),
    Probs(ProbVector),
}

fn require_sic(sic: &Option<SicStructure>, method: Method) -> CliResult<&SicStructure> {
    sic.as_ref()
        .ok_or_else(|| CliError::Input(format!("--method {} requires --sic", method.name())))
}

pub fn born(args: &BornArgs, session: &mut Session) -> CliResult<ExitStatus> {
    let input = match (&args.state, &args.probs) {
        (Some(path), _) => Input::State(density_from_doc(
            &session.read_document(path)?,
            VALIDITY_TOL,
        )?),
        (None, Some(path)) => Input::Probs(probs_from_doc(&session.read_document(path)?)?),
        (None, None) => {
            return Err(CliError::Input(
                "one of --state or --probs is required".into(),
            ))
        }
    };
    let povm = povm_from_doc(&session.read_document(&args.povm)?, VALIDITY_TOL)?;
    let sic = match &args.sic {
        Some(path) => Some(sic_from_doc(&session.read_document(path)?)?.certified()?),
        None => None,
    };
    if args.method != Method::Direct {
        require_sic(&sic, args.method)?;
    }

    let state = || -> CliResult<DensityMatrix> {
        match &input {
            Input::State(rho) => Ok(rho.clone()),
            Input::Probs(p) => Ok(probs_to_state(p, require_sic(&sic, args.method)?)?),
        }
    };
    let probs = || -> CliResult<ProbVector> {
        match &input {
            Input::State(rho) => Ok(state_to_probs(rho, require_sic(&sic, args.method)?)?),
            Input::Probs(p) => Ok(p.clone()),
        }
    };

    let dim = povm.dim();
    let mut doc = BornDoc {
        kind: "born_report",
        method: args.method.name(),
        dim: dim.get(),
        direct: None,
        urgleichung: None,
        classical: None,
        max_abs_deviation: None,
        ltp_deviation: None,
    };
    let mut status = ExitStatus::Success;
    let mut lines = Vec::new();

    match args.method {
        Method::Direct => {
            let q = born_direct(&state()?, &povm)?;
            lines.push(format!("direct:      {}", format_values(q.entries())));
            doc.direct = Some(q.entries().to_vec());
        }
        Method::Urgleichung => {
            let sic = require_sic(&sic, args.method)?;
            let q = born_urgleichung(&probs()?, &cond_prob_matrix(&povm, sic)?, dim)?;
            lines.push(format!("urgleichung: {}", format_values(q.entries())));
            doc.urgleichung = Some(q.entries().to_vec());
        }
        Method::Both => {
            let sic = require_sic(&sic, args.method)?;
            let direct = born_direct(&state()?, &povm)?;
            let urg = born_urgleichung(&probs()?, &cond_prob_matrix(&povm, sic)?, dim)?;
            let deviation = direct.max_abs_deviation(&urg);
            lines.push(format!("direct:      {}", format_values(direct.entries())));
            lines.push(format!("urgleichung: {}", format_values(urg.entries())));
            lines.push(format!("max_abs_deviation: {deviation:.6e}"));
            if !(deviation <= args.tol) {
                status = ExitStatus::VerificationFailed;
                lines.push(format!("deviation exceeds tolerance {:.1e}", args.tol));
            }
            doc.direct = Some(direct.entries().to_vec());
            doc.urgleichung = Some(urg.entries().to_vec());
            doc.max_abs_deviation = Some(scientific(deviation));
        }
        Method::Ltp => {
            let sic = require_sic(&sic, args.method)?;
            let p = probs()?;
            let r = cond_prob_matrix(&povm, sic)?;
            let urg = born_urgleichung(&p, &r, dim)?;
            let classical = classical_ltp(&p, &r)?;
            let deviation = ltp_deviation(&p, &r, dim)?;
            lines.push(format!("urgleichung: {}", format_values(urg.entries())));
            lines.push(format!(
                "classical:   {}",
                format_values(classical.entries())
            ));
            lines.push(format!("ltp_deviation: {deviation:.12}"));
            doc.urgleichung = Some(urg.entries().to_vec());
            doc.classical = Some(classical.entries().to_vec());
            doc.ltp_deviation = Some(scientific(deviation));
        }
    }

    session.emit(args.out.as_deref(), &doc)?;
    for line in lines {
        session.say(line);
    }
    Ok(status)
}

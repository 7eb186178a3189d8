//! Command-line front end for the information-measure toolkit.
//!
//! Four commands: `entropy`, `relent`, `channel-info`, `capacity`. Inputs
//! are JSON documents (see `document`); reports are deterministic
//! key-value text or `--json`, always reproducible under a fixed
//! `--seed`. The env var `QENT_MAX_DIM` overrides the default guard of
//! 256 on the total embedded dimension of any input.

mod document;
mod error;
mod report;

use clap::{Args, Parser, Subcommand};
use document::{load_document, ParsedDocument};
use error::CliError;
use qent_core::capacity::{
    additivity_check, capacity_c, capacity_q, coherent_info, info_q, min_output_mean_entropy,
    OptimizerConfig,
};
use qent_core::channel::{apply_channel, push_coupling};
use qent_core::coupling::standard_coupling;
use qent_core::infomeasure::{
    bs_relative_entropy, entangled_information, q_entropy_closed, q_entropy_direct,
    umegaki_relative_entropy, vn_entropy,
};
use qent_core::{algebra, AlgebraState, Channel};
use report::{Report, Units};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "qicli",
    about = "Entanglement-based information measures and channel capacities on block operator algebras",
    version
)]
struct Cli {
    /// Emit the report as JSON instead of key-value lines.
    #[arg(long, global = true)]
    json: bool,

    /// Display information quantities in bits (divides by ln 2).
    #[arg(long, global = true)]
    bits: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OptimArgs {
    /// Seed for the optimizer's random restarts.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Number of optimizer restarts.
    #[arg(long, default_value_t = 16)]
    restarts: usize,

    /// Optimizer convergence threshold.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,

    /// Exit with a nonzero status when an optimizer fails to converge.
    #[arg(long)]
    fail_on_nonconvergence: bool,
}

impl OptimArgs {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            restarts: self.restarts.max(1),
            tol: self.tol,
            seed: self.seed,
            ..OptimizerConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Von Neumann and q-entropy of a state document.
    Entropy { state: PathBuf },

    /// Relative entropies between two equal-dimension states.
    Relent { state_a: PathBuf, state_b: PathBuf },

    /// Channel informations I_q, I_c, I_s for a channel and input state.
    #[command(name = "channel-info")]
    ChannelInfo {
        channel: PathBuf,
        state: PathBuf,
        #[command(flatten)]
        optim: OptimArgs,
    },

    /// q-capacity (and optionally c-capacity) of a channel.
    Capacity {
        channel: PathBuf,
        #[command(flatten)]
        optim: OptimArgs,
        /// Also compute the c-capacity (nested optimization).
        #[arg(long)]
        with_cc: bool,
        /// Run the tensor-square additivity check at the argmax state.
        #[arg(long)]
        additivity: bool,
    },
}

fn max_dim() -> usize {
    std::env::var("QENT_MAX_DIM")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(qent_core::DEFAULT_MAX_DIM)
}

fn guard_dim(doc: &ParsedDocument) -> Result<(), CliError> {
    let dim = doc.embedded_dim();
    let limit = max_dim();
    if dim > limit {
        return Err(CliError::guard(format!(
            "input dimension {dim} exceeds the limit {limit} (set QENT_MAX_DIM to raise it)"
        )));
    }
    Ok(())
}

fn load_state(path: &Path) -> Result<AlgebraState, CliError> {
    let doc = load_document(path)?;
    guard_dim(&doc)?;
    match doc {
        ParsedDocument::State(s) => Ok(s),
        _ => Err(CliError::semantic(format!(
            "{} is not a state document",
            path.display()
        ))),
    }
}

fn load_channel(path: &Path) -> Result<Channel, CliError> {
    let doc = load_document(path)?;
    guard_dim(&doc)?;
    match doc {
        ParsedDocument::Channel(ch) => Ok(ch),
        _ => Err(CliError::semantic(format!(
            "{} is not a channel document",
            path.display()
        ))),
    }
}

fn cmd_entropy(state: &Path) -> Result<Report, CliError> {
    let s = load_state(state)?;
    let direct = q_entropy_direct(&s).map_err(CliError::from_core)?;
    let closed = q_entropy_closed(&s);
    let mut r = Report::new("entropy");
    r.text(
        "shape",
        &format!("{:?}", s.shape().dims()).replace(' ', ""),
    );
    r.info("S", vn_entropy(&s));
    r.info("H_closed", closed);
    r.info("H_direct", direct);
    r.info("H_gap", (closed - direct).abs());
    r.int("algebra_rank", algebra::algebra_rank(s.shape()) as u64);
    r.int("algebra_dim", algebra::algebra_dim(s.shape()) as u64);
    Ok(r)
}

fn cmd_relent(state_a: &Path, state_b: &Path) -> Result<Report, CliError> {
    let a = load_state(state_a)?;
    let b = load_state(state_b)?;
    if a.shape().total_dim() != b.shape().total_dim() {
        return Err(CliError::semantic(format!(
            "states have different embedded dimensions ({} vs {})",
            a.shape().total_dim(),
            b.shape().total_dim()
        )));
    }
    let bs = bs_relative_entropy(&a.density(), &b.density()).map_err(CliError::from_core)?;
    let um = umegaki_relative_entropy(&a.density(), &b.density()).map_err(CliError::from_core)?;
    let mut r = Report::new("relent");
    r.info("R_bs", bs.value);
    r.info("R_umegaki", um.value);
    r.flag("finite", bs.finite && um.finite);
    r.flag("support_ok", bs.support_ok && um.support_ok);
    if bs.finite && um.finite {
        r.info("difference", bs.value - um.value);
    }
    Ok(r)
}

fn cmd_channel_info(
    channel: &Path,
    state: &Path,
    optim: &OptimArgs,
) -> Result<Report, CliError> {
    let ch = load_channel(channel)?;
    let s = load_state(state)?;
    let cfg = optim.config();

    let output = apply_channel(&ch, &s).map_err(CliError::from_core)?;
    let s_out = vn_entropy(&output);
    let pushed = push_coupling(&standard_coupling(&s), &ch).map_err(CliError::from_core)?;
    let e_pushed = entangled_information(&pushed).map_err(CliError::from_core)?;
    let iq = info_q(&s, &ch).map_err(CliError::from_core)?;
    let min = min_output_mean_entropy(&s, &ch, &cfg).map_err(CliError::from_core)?;
    let ic = s_out - min.value;
    let is = coherent_info(&s, &ch).map_err(CliError::from_core)?;

    let mut r = Report::new("channel-info");
    r.info("I_q", iq);
    r.info("I_c", ic);
    r.info("I_s", is);
    r.info("S_output", s_out);
    r.info("E_pushed", e_pushed.value);
    r.info("min_mean_output_entropy", min.value);
    r.int("optimizer_restarts", cfg.restarts as u64);
    r.int("optimizer_iterations", min.iterations as u64);
    r.flag("optimizer_converged", min.converged);
    if optim.fail_on_nonconvergence && !min.converged {
        return Err(CliError::NonConvergence(
            "inner entropy minimization did not converge".into(),
        ));
    }
    Ok(r)
}

fn cmd_capacity(
    channel: &Path,
    optim: &OptimArgs,
    with_cc: bool,
    additivity: bool,
) -> Result<Report, CliError> {
    let ch = load_channel(channel)?;
    let cfg = optim.config();

    let rq = capacity_q(&ch, &cfg).map_err(CliError::from_core)?;
    let mut r = Report::new("capacity");
    r.int("restarts", cfg.restarts as u64);
    r.int("seed", cfg.seed);
    r.info("C_q", rq.value);
    r.flag("C_q_converged", rq.converged);
    r.int("C_q_iterations", rq.iterations_used as u64);
    r.state("C_q_argmax", &rq.argmax_state);
    let mut all_converged = rq.converged;

    if with_cc {
        let rc = capacity_c(&ch, &cfg).map_err(CliError::from_core)?;
        r.info("C_c", rc.value);
        r.flag("C_c_converged", rc.converged);
        r.int("C_c_iterations", rc.iterations_used as u64);
        r.state("C_c_argmax", &rc.argmax_state);
        all_converged &= rc.converged;
    }

    if additivity {
        let check = additivity_check(&rq.argmax_state, &ch).map_err(CliError::from_core)?;
        r.info("additivity_lhs", check.lhs);
        r.info("additivity_rhs", check.rhs);
        r.info("additivity_gap", check.gap);
    }

    if optim.fail_on_nonconvergence && !all_converged {
        return Err(CliError::NonConvergence(
            "capacity optimization did not converge".into(),
        ));
    }
    Ok(r)
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Entropy { state } => cmd_entropy(state),
        Command::Relent { state_a, state_b } => cmd_relent(state_a, state_b),
        Command::ChannelInfo {
            channel,
            state,
            optim,
        } => cmd_channel_info(channel, state, optim),
        Command::Capacity {
            channel,
            optim,
            with_cc,
            additivity,
        } => cmd_capacity(channel, optim, *with_cc, *additivity),
    }
}

fn main() {
    let cli = Cli::parse();
    let units = if cli.bits { Units::Bits } else { Units::Nats };
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                print!("{}", report.render_json(units));
            } else {
                print!("{}", report.render_human(units));
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

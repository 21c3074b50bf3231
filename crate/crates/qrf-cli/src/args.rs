use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "qrf", version, about = "Reference frames and superselection rules: twirls, alignment, bounded frames")]
pub struct Cli {
    /// Seed for every stochastic step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the series of the command as CSV to this path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// What to print on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Twirl a state over U(1) or collective SU(2).
    Twirl(TwirlArgs),
    /// Communication without a shared frame.
    #[command(subcommand)]
    Comm(CommCmd),
    /// Frame alignment.
    #[command(subcommand)]
    Align(AlignCmd),
    /// Bounded (quantum) reference frames.
    #[command(subcommand)]
    Bounded(BoundedCmd),
    /// Lifting a superselection rule with a quantum frame.
    #[command(subcommand)]
    Lift(LiftCmd),
    /// Nonlocal resources under local superselection.
    #[command(subcommand)]
    Resources(ResourcesCmd),
    /// Run every acceptance check.
    Suite(SuiteArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GroupArg {
    U1,
    Su2,
}

#[derive(Args, Debug)]
pub struct TwirlArgs {
    #[arg(long, value_enum)]
    pub group: GroupArg,
    /// Expected number of qubits; checked against the state file.
    #[arg(long)]
    pub n_qubits: Option<usize>,
    /// State file `{dims, re, im}`.
    #[arg(long)]
    pub state: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum CommCmd {
    /// Sector table and private capacities for N qubits.
    Capacity {
        #[arg(long)]
        n: usize,
    },
    /// Encode, rotate by a random collective rotation, decode.
    Encode(EncodeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    /// One bit in the singlet/triplet split of two qubits.
    Bit,
    /// One qubit in the j = 1/2 multiplicity space of three qubits.
    Qubit,
}

#[derive(Args, Debug)]
pub struct EncodeArgs {
    #[arg(long, value_enum)]
    pub scheme: Scheme,
    /// Bit value for `--scheme bit`.
    #[arg(long, default_value_t = 0)]
    pub bit: u8,
    /// Qubit state file for `--scheme qubit`; defaults to |+⟩.
    #[arg(long)]
    pub state: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Frame {
    Phase,
    Direction,
    Cartesian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Merit {
    Fidelity,
    Likelihood,
}

#[derive(Subcommand, Debug)]
pub enum AlignCmd {
    /// Optimal signal for a figure of merit.
    Optimize {
        #[arg(long, value_enum)]
        frame: Frame,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Merit::Fidelity)]
        merit: Merit,
    },
    /// Monte Carlo alignment with the optimal fidelity signal.
    Simulate {
        #[arg(long, value_enum)]
        frame: Frame,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Bit-by-bit phase estimation.
    Bitwise {
        #[arg(long, default_value_t = 4)]
        k: u32,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Phase in [0, π); with `--runs` a random phase is drawn per run.
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        /// Number of runs for a failure-rate estimate.
        #[arg(long)]
        runs: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
pub enum BoundedCmd {
    /// Invariant discrimination of ±z against a spin-j frame.
    Discriminate {
        /// Frame spin, e.g. `0.5`, `1/2` or `3`.
        #[arg(long)]
        j: String,
    },
    /// Repeated use of a spin-j frame.
    Degrade {
        #[arg(long)]
        j: String,
        #[arg(long, default_value_t = 50)]
        steps: u32,
    },
    /// Number of uses before the success probability drops by ε.
    Longevity {
        #[arg(long)]
        j: String,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
    },
    /// Jaynes-Cummings π-pulse driven by a quantized field.
    Jc {
        #[arg(long)]
        alpha2: f64,
        #[arg(long, default_value_t = 1.0)]
        g: f64,
        #[arg(long)]
        cutoff: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LiftGroup {
    Zd,
}

#[derive(Subcommand, Debug)]
pub enum LiftCmd {
    /// Compare invariant and ordinary Born-rule probabilities on random inputs.
    BornCheck {
        #[arg(long, value_enum, default_value_t = LiftGroup::Zd)]
        group: LiftGroup,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Protocol {
    Activate,
    Distill,
    Bitcommit,
}

#[derive(Subcommand, Debug)]
pub enum ResourcesCmd {
    /// Superselection-induced variance of a bipartite pure state.
    Siv(CutArgs),
    /// Entanglement accessible under local number superselection.
    Essr(CutArgs),
    /// Fixed protocols.
    Demo {
        #[arg(long, value_enum)]
        protocol: Protocol,
    },
}

#[derive(Args, Debug)]
pub struct CutArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// Factors held by A (default: the first half).
    #[arg(long, value_delimiter = ',')]
    pub part_a: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
pub struct SuiteArgs {
    /// Fewer Monte Carlo samples.
    #[arg(long)]
    pub fast: bool,
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use loan_qcbo::datagen::GenConfig;
use loan_qcbo::pipeline::{
    cmd_generate, cmd_oracle, cmd_solve, cmd_sweep, InstanceSource, Mode, RunConfig,
};
use loan_qcbo::qaoa::CycleOrder;
use loan_qcbo::Error;

#[derive(Parser)]
#[command(
    name = "loan-qcbo",
    version,
    about = "Loan-collection action selection under a provision budget"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance file.
    Generate {
        #[command(flatten)]
        gen: GenArgs,
        /// Output instance file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the hybrid pipeline or the standalone greedy baseline.
    Solve {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, value_enum, default_value_t = ModeArg::Hybrid)]
        mode: ModeArg,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run both modes across a grid of epsilon values.
    Sweep {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated epsilon values.
        #[arg(long, value_delimiter = ',', required = true)]
        epsilon_grid: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exhaustive constrained optimum of a small instance.
    Oracle {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        provision_cap: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 600)]
    n_loanees: usize,
    #[arg(long, default_value_t = 5)]
    n_actions: usize,
    #[arg(long, default_value_t = 0.7)]
    poisson_mean: f64,
    #[arg(long, default_value_t = 2.0)]
    mean_degree: f64,
    /// Epsilon stored in the generated instance.
    #[arg(long = "gen-epsilon", default_value_t = 0.5)]
    gen_epsilon: f64,
    #[arg(long = "gen-seed", default_value_t = 0)]
    gen_seed: u64,
}

impl GenArgs {
    fn config(&self) -> GenConfig {
        GenConfig {
            poisson_mean: self.poisson_mean,
            mean_degree: self.mean_degree,
            epsilon: self.gen_epsilon,
            ..GenConfig::new(self.n_loanees, self.n_actions, self.gen_seed)
        }
    }
}

#[derive(Args)]
struct SourceArgs {
    /// Instance file; a generated instance is used when absent.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[command(flatten)]
    gen: GenArgs,
}

impl SourceArgs {
    fn source(&self) -> Result<InstanceSource, Error> {
        match &self.instance {
            Some(path) if !path.exists() => Err(Error::InvalidConfig(format!(
                "{} does not exist",
                path.display()
            ))),
            Some(path) => Ok(InstanceSource::File(path.clone())),
            None => Ok(InstanceSource::Generated(self.gen.config())),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 7)]
    nu: usize,
    #[arg(long, default_value_t = 2)]
    cycles: usize,
    #[arg(long, default_value_t = 200)]
    opt_iters: usize,
    /// Defaults to N * M.
    #[arg(long)]
    gpr_iters: Option<usize>,
    #[arg(long, default_value_t = 10)]
    lambda: usize,
    #[arg(long, default_value_t = 4)]
    restarts: usize,
    #[arg(long)]
    provision_cap: Option<f64>,
    #[arg(long, value_enum, default_value_t = OrderArg::MixerFirst)]
    order: OrderArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl RunArgs {
    fn config(&self, epsilon: Option<f64>, mode: Mode) -> RunConfig {
        RunConfig {
            nu: self.nu,
            cycles: self.cycles,
            qaoa_iters: self.opt_iters,
            gpr_iters: self.gpr_iters,
            lambda: self.lambda,
            restarts: self.restarts,
            epsilon,
            provision_cap: self.provision_cap,
            mode,
            order: match self.order {
                OrderArg::MixerFirst => CycleOrder::MixerFirst,
                OrderArg::CostFirst => CycleOrder::CostFirst,
            },
            seed: self.seed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Hybrid,
    StandaloneGpr,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    MixerFirst,
    CostFirst,
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Generate { gen, out } => {
            let inst = cmd_generate(&gen.config(), &out)?;
            println!(
                "wrote {} ({} loanees, {} actions)",
                out.display(),
                inst.n_loanees(),
                inst.n_actions()
            );
        }
        Command::Solve {
            source,
            run,
            epsilon,
            mode,
            out,
        } => {
            let mode = match mode {
                ModeArg::Hybrid => Mode::Hybrid,
                ModeArg::StandaloneGpr => Mode::StandaloneGpr,
            };
            let m = cmd_solve(&source.source()?, &run.config(epsilon, mode), &out)?;
            println!(
                "Y={} provision={} dpo_count={} bank_profit={} gpr_steps={}",
                m.objective, m.provision, m.dpo_count, m.bank_profit, m.gpr_steps
            );
        }
        Command::Sweep {
            source,
            run,
            epsilon_grid,
            out,
        } => {
            let rows = cmd_sweep(
                &source.source()?,
                &run.config(None, Mode::Hybrid),
                &epsilon_grid,
                &out,
            )?;
            println!(
                "wrote {} rows to {}",
                rows.len(),
                out.join("sweep.csv").display()
            );
        }
        Command::Oracle {
            source,
            epsilon,
            provision_cap,
            out,
        } => {
            let r = cmd_oracle(&source.source()?, provision_cap, epsilon, &out)?;
            println!(
                "Y*={} provision={} evaluated={}",
                r.objective, r.provision, r.evaluated
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_guard() { 2 } else { 1 })
        }
    }
}

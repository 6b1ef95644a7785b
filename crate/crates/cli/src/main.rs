use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rssp_core::cost::{Cascade, GammaReading, Mode, ModelOptions};
use rssp_core::em::{em_solve, sample_level0, EmParams, Side};
use rssp_core::exact::{brute_force, meet_in_middle};
use rssp_core::harness::{load_config, run_experiment};
use rssp_core::optimizer::{optimize, reproduce_table1, write_table1_csv, OptimizeOptions};
use rssp_core::rng::{Purpose, SeedStream};
use rssp_core::walk::{classical_walk_search, spectral_gap_exact, write_walk_trace, WalkConfig};
use rssp_core::{generate_instance, Error, RsspInstance};

#[derive(Parser)]
#[command(name = "rssp", version, about = "Random subset sum solvers, walk simulator and cost model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Brute,
    Mitm,
    Em,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Quantum,
    Classical,
}

#[derive(Clone, Copy, ValueEnum)]
enum GammaArg {
    Exponential,
    Literal,
}

#[derive(Clone, Copy, ValueEnum)]
enum CascadeArg {
    FilterAware,
    Product,
}

#[derive(clap::Args)]
struct ModelArgs {
    /// Reading of the filter rate g_i.
    #[arg(long, value_enum, default_value = "exponential")]
    gamma: GammaArg,
    /// Update-cost cascade used in the walk terms.
    #[arg(long, value_enum, default_value = "filter-aware")]
    cascade: CascadeArg,
}

impl ModelArgs {
    fn options(&self) -> OptimizeOptions {
        let model = ModelOptions {
            gamma: match self.gamma {
                GammaArg::Exponential => GammaReading::Exponential,
                GammaArg::Literal => GammaReading::Literal,
            },
            cascade: match self.cascade {
                CascadeArg::FilterAware => Cascade::FilterAware,
                CascadeArg::Product => Cascade::Product,
            },
        };
        OptimizeOptions { model, ..Default::default() }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a planted instance and write it as JSON.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve an instance file.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "mitm")]
        algo: Algo,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 0.125)]
        alpha: f64,
        #[arg(long, default_value_t = 1)]
        l1: usize,
        #[arg(long, default_value_t = 2)]
        l2: usize,
        /// Ignored at depth 3.
        #[arg(long, default_value_t = 2)]
        l3: usize,
        /// Distinct level-0 vectors per leaf; defaults to C(n/2, alpha n/2),
        /// which is too small at n = 16 (use 16 there).
        #[arg(long)]
        level0_size: Option<u64>,
        #[arg(long, default_value_t = 10)]
        retries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Minimize the time exponent for one depth.
    Optimize {
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, value_enum, default_value = "quantum")]
        mode: ModeArg,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// Print the full cost breakdown as JSON.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Recompute the depth 3..8 comparison table.
    Table1 {
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Classical random walk on a depth-4 vertex of a fresh planted instance.
    Walk {
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        r: usize,
        #[arg(long, default_value_t = 100)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Update cap; defaults to n^2 ceil(Tu).
        #[arg(long)]
        kappa: Option<u64>,
        #[arg(long, default_value_t = 0.25)]
        alpha: f64,
        /// Split sizes l_1,l_2,l_3; defaults to n/8 each.
        #[arg(long, value_delimiter = ',')]
        l: Option<Vec<usize>>,
        #[arg(long, default_value_t = 1)]
        check_interval: u64,
        /// Leaf list size; defaults to C(n/2, alpha n/2).
        #[arg(long)]
        level0_size: Option<u64>,
        /// Write the step trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Spectral gap of the m-fold product of the Johnson graph J(N, r).
    Gap {
        #[arg(short = 'N', long = "N")]
        big_n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// Run an experiment described by a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
}

/// Failure with the process exit code it maps to.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_)
            | Error::Config(_)
            | Error::SizeGuard { .. }
            | Error::Json(_)
            | Error::DegenerateInstance(_) => 2,
            _ => 1,
        };
        Failure(code, e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure(1, e.to_string())
    }
}

fn absent(what: &str) -> Failure {
    Failure(1, what.to_string())
}

fn print_solution(inst: &RsspInstance, x: &rssp_core::BinVector) -> Result<(), Failure> {
    println!("{x}");
    eprintln!("weight {}, congruent {}", x.weight(), inst.verify(x)?);
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen { n, seed, out } => {
            let (inst, _) = generate_instance(n, seed)?;
            inst.write(&out)?;
            eprintln!("wrote {}", out.display());
        }
        Command::Solve { instance, algo, depth, alpha, l1, l2, l3, level0_size, retries, seed } => {
            let inst = RsspInstance::read(&instance)?;
            let found = match algo {
                Algo::Brute => brute_force(&inst, true)?.into_iter().next(),
                Algo::Mitm => meet_in_middle(&inst)?,
                Algo::Em => {
                    let l = match depth {
                        3 => vec![l1, l2],
                        4 => vec![l1, l2, l3],
                        _ => return Err(Failure(2, format!("em depth must be 3 or 4, got {depth}"))),
                    };
                    let params = EmParams { level0_size, ..EmParams::new(alpha, l).with_retries(retries) };
                    let mut rng = SeedStream::new(seed).rng(Purpose::Solver, 0);
                    em_solve(&inst, &params, &mut rng)?
                }
            };
            let x = found.ok_or_else(|| absent("no solution found"))?;
            print_solution(&inst, &x)?;
        }
        Command::Optimize { depth, mode, tol, json, model } => {
            let mode = match mode {
                ModeArg::Quantum => Mode::Quantum,
                ModeArg::Classical => Mode::Classical,
            };
            let r = optimize(depth, mode, tol, &model.options())?;
            if json {
                println!("{}", r.breakdown.to_json()?);
            } else {
                println!(
                    "T = {:.5}  alpha = {:.5}  beta = {:.5}  lambda = {:?}  binding = {}",
                    r.t,
                    r.params.alpha,
                    r.params.beta,
                    r.params.lambda.iter().map(|x| (x * 1e5).round() / 1e5).collect::<Vec<_>>(),
                    r.breakdown.binding_term
                );
            }
        }
        Command::Table1 { tol, out, model } => {
            let rows = reproduce_table1(tol, &model.options())?;
            match out {
                Some(p) => write_table1_csv(BufWriter::new(File::create(&p)?), &rows)?,
                None => write_table1_csv(io::stdout().lock(), &rows)?,
            }
        }
        Command::Walk { n, r, steps, seed, kappa, alpha, l, check_interval, level0_size, trace } => {
            let l = l.unwrap_or_else(|| vec![n / 8; 3]);
            let streams = SeedStream::new(seed);
            let (inst, _) = generate_instance(n, seed)?;
            let mut rng = streams.rng(Purpose::Walk, 0);
            let pools = (0..1usize << (l.len() + 1))
                .map(|j| sample_level0(n, alpha, level0_size, Side::of_leaf(j), None, &mut rng))
                .collect::<rssp_core::Result<Vec<_>>>()?;
            let cfg = WalkConfig { l, r, max_steps: steps, check_interval, kappa };
            let outcome = classical_walk_search(&inst, pools, &cfg, &mut rng)?;
            if let Some(p) = trace {
                write_walk_trace(BufWriter::new(File::create(&p)?), &outcome.trace)?;
            }
            eprintln!("steps {}, kappa {}", outcome.steps, outcome.kappa);
            let x = outcome.solution.ok_or_else(|| absent("no marked vertex reached"))?;
            print_solution(&inst, &x)?;
        }
        Command::Gap { big_n, r, m } => {
            println!("{:.12}", spectral_gap_exact(big_n, r, m)?);
        }
        Command::Experiment { config, out } => {
            let cfg = load_config(&config)?;
            let summary = run_experiment(&cfg, &out)?;
            println!("{}", serde_json::to_string_pretty(&summary).map_err(Error::from)?);
            if !summary.passed {
                return Err(Failure(1, format!("experiment {} failed", summary.experiment)));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

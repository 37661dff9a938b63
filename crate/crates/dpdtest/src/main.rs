use clap::Parser;

mod asymptotics;
mod baselines;
mod cli;
mod datasets;
mod error;
mod influence;
mod manifest;
mod mdpd;
mod model;
mod montecarlo;
mod optim;
mod quadrature;
mod rng;
mod special;
mod wald;

fn main() {
    let parsed = cli::Cli::parse();
    if let Err(e) = cli::run(parsed) {
        eprintln!("error: {}", e.message);
        std::process::exit(e.code);
    }
}

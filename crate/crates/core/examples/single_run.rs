//! Simulates one protocol end to end and prints the alive-node and residual
//! energy series at a coarse stride.
//!
//!     cargo run --release --example single_run -- [leach|edeec|fuzzy] [seed]

use wsn_fuzzy::{simulate, ProtocolKind, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let protocol: ProtocolKind = args.next().as_deref().unwrap_or("fuzzy").parse()?;
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);
    let cfg = SimConfig { protocol, seed, ..SimConfig::default() };
    let run = simulate(&cfg)?;

    println!(
        "{protocol}, seed {seed}: {} nodes, {:.1} J initial, formation {:.2e} J",
        run.nodes, run.initial_energy, run.formation_j
    );
    match run.fnd {
        Some(f) => println!("first node died in round {f}"),
        None => println!("no node died"),
    }
    if let Some(l) = run.lnd {
        println!("last node died in round {l}");
    }
    println!("\n{:>6} {:>6} {:>12}", "round", "alive", "residual J");
    for m in run.metrics.iter().step_by(250) {
        println!("{:>6} {:>6} {:>12.4}", m.round, m.alive, m.residual_j);
    }
    Ok(())
}

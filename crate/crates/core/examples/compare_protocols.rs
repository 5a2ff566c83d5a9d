//! Runs LEACH, E-DEEC and the fuzzy protocol over several seeds and prints
//! first-node-death statistics.
//!
//!     cargo run --release --example compare_protocols -- [config] [seeds]

use std::path::Path;

use wsn_fuzzy::{compare, load_config, ProtocolKind, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let base = match args.next() {
        Some(path) => load_config(Path::new(&path))?,
        None => SimConfig::default(),
    };
    let count: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(5);
    let seeds: Vec<u64> = (0..count).map(|i| base.seed + i).collect();

    let cmp = compare(&base, &ProtocolKind::ALL, &seeds)?;
    println!("{:<8}{:>12}{:>10}{:>10}{:>14}", "protocol", "median FND", "min", "max", "alive@end");
    for s in &cmp.stats {
        println!(
            "{:<8}{:>12.1}{:>10}{:>10}{:>14.1}",
            s.protocol.name(),
            s.median_fnd,
            s.min_fnd,
            s.max_fnd,
            s.median_final_alive
        );
    }
    println!();
    for &seed in &seeds {
        let fnd = |p| cmp.run(p, seed).map(|r| r.fnd_or_horizon()).unwrap_or(0);
        println!(
            "seed {seed:>3}: leach {:>5}  edeec {:>5}  fuzzy {:>5}",
            fnd(ProtocolKind::Leach),
            fnd(ProtocolKind::Edeec),
            fnd(ProtocolKind::Fuzzy)
        );
    }
    Ok(())
}

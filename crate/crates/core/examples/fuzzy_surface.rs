//! Prints the election and relay rule-base surfaces as coarse text grids.
//! `wsnsim surface` writes the same data as CSV.

use wsn_fuzzy::fuzzy::RuleBase;
use wsn_fuzzy::rules::{FuzzyParams, FuzzySystem};

fn show(title: &str, rb: &RuleBase, fixed: &[(usize, f64)], res: usize) {
    let rows = rb.surface_grid(res, fixed).expect("valid surface request");
    let free: Vec<&str> = (0..rb.inputs().len())
        .filter(|i| !fixed.iter().any(|(f, _)| f == i))
        .map(|i| rb.inputs()[i].name())
        .collect();
    println!("{title}: rows = {}, columns = {}", free[0], free[1]);
    print!("{:>8}", "");
    for r in &rows[..res] {
        print!("{:>7.1}", r.x2);
    }
    println!();
    for chunk in rows.chunks(res) {
        print!("{:>8.2}", chunk[0].x1);
        for r in chunk {
            print!("{:>7.1}", r.output);
        }
        println!();
    }
    println!();
}

fn main() {
    let system = FuzzySystem::new(&FuzzyParams::default(), 1.5).unwrap();
    let dist_bs = system.election.input_index("DistBS").unwrap();
    show("election, DistBS = 20 m", &system.election, &[(dist_bs, 20.0)], 7);
    show("election, DistBS = 120 m", &system.election, &[(dist_bs, 120.0)], 7);
    show("relay", &system.relay, &[], 7);
}

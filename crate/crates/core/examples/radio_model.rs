//! Energy of a single transmission and reception under the first-order
//! radio model, across the free-space / multipath threshold.

use wsn_fuzzy::RadioParams;

fn main() {
    let radio = RadioParams::default();
    let bits = radio.data_bits;
    println!("threshold distance d0 = {:.4} m", radio.d0());
    println!("rx {bits} bits: {:.3e} J", radio.rx_energy(bits));
    println!("aggregate {bits} bits, 1 signal: {:.3e} J", radio.aggregation_energy(bits, 1));
    println!();
    println!("{:>8}  {:>12}  {:>10}", "d (m)", "tx (J)", "regime");
    for d in [0.0, 25.0, 50.0, 75.0, 87.0, 88.0, 100.0, 125.0, 150.0] {
        let regime = if d < radio.d0() { "free space" } else { "multipath" };
        println!("{d:>8.1}  {:>12.4e}  {regime:>10}", radio.tx_energy(bits, d));
    }
}

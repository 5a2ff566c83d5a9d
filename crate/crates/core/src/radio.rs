//! First-order radio energy model: electronics cost per bit plus a
//! free-space (d²) or multipath (d⁴) amplifier term, switched at `d0`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("radio parameter `{0}` must be positive and finite")]
pub struct RadioError(pub &'static str);

/// Radio constants in SI units (joules, metres, bits).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// J/bit
    pub e_elec: f64,
    /// J/bit/m²
    pub eps_fs: f64,
    /// J/bit/m⁴
    pub eps_amp: f64,
    /// J/bit/signal
    pub e_da: f64,
    pub data_bits: u64,
    pub info_bits: u64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            e_elec: 50e-9,
            eps_fs: 10e-12,
            eps_amp: 0.0013e-12,
            e_da: 5e-9,
            data_bits: 4000,
            info_bits: 100,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<(), RadioError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        for (name, v) in [
            ("e_elec", self.e_elec),
            ("eps_fs", self.eps_fs),
            ("eps_amp", self.eps_amp),
            ("e_da", self.e_da),
        ] {
            if !positive(v) {
                return Err(RadioError(name));
            }
        }
        if self.data_bits == 0 {
            return Err(RadioError("data_bits"));
        }
        if self.info_bits == 0 {
            return Err(RadioError("info_bits"));
        }
        Ok(())
    }

    /// Crossover distance between the free-space and multipath regimes.
    pub fn d0(&self) -> f64 {
        (self.eps_fs / self.eps_amp).sqrt()
    }

    /// Amplifier part of a transmission only.
    pub fn amplifier_energy(&self, bits: u64, distance: f64) -> f64 {
        let k = bits as f64;
        if distance < self.d0() {
            self.eps_fs * k * distance * distance
        } else {
            self.eps_amp * k * distance.powi(4)
        }
    }

    pub fn tx_energy(&self, bits: u64, distance: f64) -> f64 {
        self.e_elec * bits as f64 + self.amplifier_energy(bits, distance)
    }

    pub fn rx_energy(&self, bits: u64) -> f64 {
        self.e_elec * bits as f64
    }

    pub fn aggregation_energy(&self, bits: u64, signals: usize) -> f64 {
        self.e_da * bits as f64 * signals as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tx_examples() {
        let r = RadioParams::default();
        assert!((r.tx_energy(4000, 50.0) - 3.0e-4).abs() < 1e-18);
        assert!((r.tx_energy(4000, 100.0) - 7.2e-4).abs() < 1e-18);
        assert_eq!(r.tx_energy(4000, 0.0), r.e_elec * 4000.0);
    }

    #[test]
    fn rx_and_aggregation_examples() {
        let r = RadioParams::default();
        assert!((r.rx_energy(4000) - 2.0e-4).abs() < 1e-18);
        assert_eq!(r.rx_energy(0), 0.0);
        assert!((r.rx_energy(100) - 5.0e-6).abs() < 1e-18);
        assert!((r.aggregation_energy(4000, 1) - 2.0e-5).abs() < 1e-18);
        assert_eq!(r.aggregation_energy(4000, 0), 0.0);
        assert!((r.aggregation_energy(4000, 21) - 4.2e-4).abs() < 1e-18);
    }

    #[test]
    fn d0_examples() {
        let r = RadioParams::default();
        assert!((r.d0() - (10.0f64 / 0.0013).sqrt()).abs() < 1e-12);
        assert!((r.d0() - 87.7058).abs() < 1e-4);
        let eq = RadioParams { eps_fs: 2.0, eps_amp: 2.0, ..r };
        assert_eq!(eq.d0(), 1.0);
        let four = RadioParams { eps_fs: 4.0, eps_amp: 1.0, ..r };
        assert_eq!(four.d0(), 2.0);
    }

    #[test]
    fn continuous_at_d0() {
        let r = RadioParams::default();
        let d0 = r.d0();
        let fs = r.eps_fs * d0 * d0;
        let mp = r.eps_amp * d0.powi(4);
        assert!((fs - mp).abs() / fs < 1e-12);
        let below = r.tx_energy(4000, d0 * (1.0 - 1e-12));
        let at = r.tx_energy(4000, d0);
        assert!((at - below).abs() < 1e-15);
    }

    #[test]
    fn validate_rejects_zero() {
        let r = RadioParams {
            eps_amp: 0.0,
            ..RadioParams::default()
        };
        assert_eq!(r.validate(), Err(RadioError("eps_amp")));
        assert!(RadioParams::default().validate().is_ok());
    }

    proptest! {
        #[test]
        fn tx_monotone_and_above_rx(bits in 0u64..10_000, d1 in 0.0f64..300.0, d2 in 0.0f64..300.0) {
            let r = RadioParams::default();
            let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
            prop_assert!(r.tx_energy(bits, lo) <= r.tx_energy(bits, hi) * (1.0 + 1e-12));
            prop_assert!(r.tx_energy(bits, lo) >= r.rx_energy(bits));
            prop_assert!(r.tx_energy(bits, lo) <= r.tx_energy(bits + 1, lo));
        }
    }
}

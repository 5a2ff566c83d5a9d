//! E-DEEC: election probability weighted by node class and by residual
//! energy relative to an estimate of the network's average energy.

use rand::{Rng, RngCore};

use super::{run_local_round, Protocol, ProtocolKind, RoundError, RoundOutcome};
use crate::network::{Network, NodeClass, NodeId};

/// Lower bound on the average-energy estimate.
pub const AVG_ENERGY_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdeecParams {
    pub p_opt: f64,
    pub mf: f64,
    pub mp: f64,
    /// Advanced-node energy multiplier (E_adv = E_o·(1 + a)).
    pub a: f64,
    /// Super-node energy multiplier (E_super = E_o·(1 + b)).
    pub b: f64,
    pub r_estimate: u64,
}

impl Default for EdeecParams {
    fn default() -> Self {
        Self {
            p_opt: 0.05,
            mf: 1.0,
            mp: 0.6,
            a: 1.0,
            b: 2.0,
            r_estimate: 5000,
        }
    }
}

impl EdeecParams {
    pub fn weight(&self, class: NodeClass) -> f64 {
        match class {
            NodeClass::Normal => 1.0,
            NodeClass::Advanced => 1.0 + self.a,
            NodeClass::Super => 1.0 + self.b,
        }
    }

    /// Estimated average node energy at `round`, linear decay to zero at
    /// `r_estimate`, floored.
    pub fn average_energy(&self, initial_total: f64, nodes: usize, round: u64) -> f64 {
        let frac = 1.0 - round as f64 / self.r_estimate as f64;
        (initial_total / nodes as f64 * frac).max(AVG_ENERGY_FLOOR)
    }

    pub fn probability(&self, class: NodeClass, energy: f64, average: f64) -> f64 {
        let norm = 1.0 + self.mf * (self.a + self.mp * self.b);
        self.p_opt * self.weight(class) * energy / (norm * average)
    }
}

/// Epoch length and threshold for a node with election probability `p`.
fn epoch_and_threshold(p: f64, round: u64) -> (u64, f64) {
    if p <= 0.0 {
        return (u64::MAX, 0.0);
    }
    if p >= 1.0 {
        return (1, 1.0);
    }
    let epoch = (1.0 / p).round().clamp(1.0, 1e15) as u64;
    let denom = 1.0 - p * (round % epoch) as f64;
    let t = if denom <= p { 1.0 } else { (p / denom).min(1.0) };
    (epoch, t)
}

#[derive(Debug, Clone)]
pub struct Edeec {
    pub params: EdeecParams,
    pub compression_ratio: f64,
    last_head: Vec<Option<u64>>,
}

impl Edeec {
    pub fn new(params: EdeecParams, nodes: usize, compression_ratio: f64) -> Self {
        Self {
            params,
            compression_ratio,
            last_head: vec![None; nodes],
        }
    }

    pub fn elect<R: Rng + ?Sized>(&mut self, round: u64, net: &Network, rng: &mut R) -> Vec<NodeId> {
        let avg = self
            .params
            .average_energy(net.initial_total(), net.nodes.len(), round);
        let mut heads = Vec::new();
        for n in net.nodes.iter().filter(|n| n.alive) {
            let draw: f64 = rng.random();
            let p = self.params.probability(n.class, n.energy, avg);
            let (epoch, t) = epoch_and_threshold(p, round);
            let epoch_start = round - round % epoch;
            let eligible = self.last_head[n.id as usize].is_none_or(|r| r < epoch_start);
            if eligible && draw < t {
                self.last_head[n.id as usize] = Some(round);
                heads.push(n.id);
            }
        }
        heads
    }
}

impl Protocol for Edeec {
    fn kind(&self) -> ProtocolKind {
        ProtocolKind::Edeec
    }

    fn run_round(
        &mut self,
        round: u64,
        net: &mut Network,
        mut rng: &mut dyn RngCore,
    ) -> Result<RoundOutcome, RoundError> {
        let alive = net.alive_ids();
        if alive.is_empty() {
            return Err(RoundError::NoAliveNodes);
        }
        let heads = self.elect(round, net, &mut rng);
        Ok(run_local_round(net, &alive, &heads, self.compression_ratio))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn full_energy_normal_node() {
        let p = EdeecParams::default();
        let avg = p.average_energy(130.0, 100, 0);
        assert!((avg - 1.3).abs() < 1e-15);
        let prob = p.probability(NodeClass::Normal, 0.5, avg);
        let expected = 0.05 / (1.0 + 1.0 * (1.0 + 0.6 * 2.0)) * 0.5 / 1.3;
        assert!((prob - expected).abs() < 1e-15);
    }

    #[test]
    fn super_node_ratio() {
        let p = EdeecParams::default();
        let normal = p.probability(NodeClass::Normal, 0.4, 1.0);
        let sup = p.probability(NodeClass::Super, 1.2, 1.0);
        assert!((sup / normal - 3.0 * (1.0 + p.b)).abs() < 1e-12);
    }

    #[test]
    fn average_energy_floor() {
        let p = EdeecParams::default();
        assert_eq!(p.average_energy(130.0, 100, 5000), AVG_ENERGY_FLOOR);
        assert_eq!(p.average_energy(130.0, 100, 9000), AVG_ENERGY_FLOOR);
        assert!(p.probability(NodeClass::Super, 1.0, AVG_ENERGY_FLOOR).is_finite());
    }

    #[test]
    fn threshold_edges() {
        assert_eq!(epoch_and_threshold(0.0, 5), (u64::MAX, 0.0));
        assert_eq!(epoch_and_threshold(3.0, 5), (1, 1.0));
        let (e, t) = epoch_and_threshold(0.05, 0);
        assert_eq!(e, 20);
        assert!((t - 0.05).abs() < 1e-15);
        assert_eq!(epoch_and_threshold(0.05, 19).1, 1.0);
    }

    proptest! {
        #[test]
        fn probability_monotone(e1 in 0.0f64..2.0, e2 in 0.0f64..2.0, avg in 0.01f64..2.0) {
            let p = EdeecParams::default();
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            for c in [NodeClass::Normal, NodeClass::Advanced, NodeClass::Super] {
                prop_assert!(p.probability(c, lo, avg) <= p.probability(c, hi, avg));
            }
            prop_assert!(p.probability(NodeClass::Normal, lo, avg) <= p.probability(NodeClass::Advanced, lo, avg));
            prop_assert!(p.probability(NodeClass::Advanced, lo, avg) <= p.probability(NodeClass::Super, lo, avg));
        }
    }
}

//! LEACH: each round every eligible node elects itself with threshold
//! T = p / (1 − p·(r mod ⌊1/p⌋)). A node that has served in the current
//! epoch of ⌊1/p⌋ rounds is ineligible until the next epoch.

use rand::{Rng, RngCore};

use super::{run_local_round, Protocol, ProtocolKind, RoundError, RoundOutcome};
use crate::network::{Network, NodeId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeachParams {
    pub p_opt: f64,
}

impl Default for LeachParams {
    fn default() -> Self {
        Self { p_opt: 0.05 }
    }
}

impl LeachParams {
    pub fn epoch_len(&self) -> u64 {
        ((1.0 / self.p_opt) + 1e-9).floor().max(1.0) as u64
    }

    pub fn threshold(&self, round: u64) -> f64 {
        let denom = 1.0 - self.p_opt * (round % self.epoch_len()) as f64;
        if denom <= self.p_opt {
            1.0
        } else {
            (self.p_opt / denom).min(1.0)
        }
    }
}

#[derive(Debug, Clone)]
pub struct Leach {
    pub params: LeachParams,
    pub compression_ratio: f64,
    last_epoch: Vec<Option<u64>>,
}

impl Leach {
    pub fn new(params: LeachParams, nodes: usize, compression_ratio: f64) -> Self {
        Self {
            params,
            compression_ratio,
            last_epoch: vec![None; nodes],
        }
    }

    pub fn is_eligible(&self, id: NodeId, round: u64) -> bool {
        self.last_epoch[id as usize] != Some(round / self.params.epoch_len())
    }

    /// Self-election draw for every alive node, in id order.
    pub fn elect<R: Rng + ?Sized>(&mut self, round: u64, alive: &[NodeId], rng: &mut R) -> Vec<NodeId> {
        let t = self.params.threshold(round);
        let epoch = round / self.params.epoch_len();
        let mut heads = Vec::new();
        for &id in alive {
            let draw: f64 = rng.random();
            if self.is_eligible(id, round) && draw < t {
                self.last_epoch[id as usize] = Some(epoch);
                heads.push(id);
            }
        }
        heads
    }
}

impl Protocol for Leach {
    fn kind(&self) -> ProtocolKind {
        ProtocolKind::Leach
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
        let heads = self.elect(round, &alive, &mut rng);
        Ok(run_local_round(net, &alive, &heads, self.compression_ratio))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn threshold_examples() {
        let p = LeachParams::default();
        assert_eq!(p.epoch_len(), 20);
        assert!((p.threshold(0) - 0.05).abs() < 1e-15);
        assert!((p.threshold(40) - 0.05).abs() < 1e-15);
        assert_eq!(p.threshold(19), 1.0);
        assert!((p.threshold(10) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn recent_head_is_ineligible() {
        let mut l = Leach::new(LeachParams::default(), 3, 0.05);
        l.last_epoch[1] = Some(0);
        assert!(!l.is_eligible(1, 3));
        assert!(l.is_eligible(1, 20));
        assert!(l.is_eligible(0, 3));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        // round 19: T = 1 for eligible nodes only
        let heads = l.elect(19, &[0, 1, 2], &mut rng);
        assert_eq!(heads, vec![0, 2]);
    }

    #[test]
    fn every_node_serves_once_per_epoch() {
        let mut l = Leach::new(LeachParams::default(), 20, 0.05);
        let alive: Vec<NodeId> = (0..20).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for epoch in 0..3u64 {
            let mut count = [0u32; 20];
            for r in epoch * 20..(epoch + 1) * 20 {
                for h in l.elect(r, &alive, &mut rng) {
                    count[h as usize] += 1;
                }
            }
            assert!(count.iter().all(|&c| c == 1), "{count:?}");
        }
    }
}

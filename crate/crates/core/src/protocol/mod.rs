//! Clustering protocols and the association/data-phase machinery they share.
//!
//! All protocols debit energy through [`Network`], so the per-category
//! ledger is comparable across them. The fuzzy protocol lives in [`fuzzy`];
//! the LEACH and E-DEEC baselines in [`leach`] and [`edeec`].

pub mod edeec;
pub mod fuzzy;
pub mod leach;

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::FuzzyError;
use crate::geometry::ClusterError;
use crate::ledger::Category;
use crate::network::{Network, NodeId};

pub use edeec::{Edeec, EdeecParams};
pub use fuzzy::{FuzzyProtocol, RelaySelection, RoundPlan};
pub use leach::{Leach, LeachParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Leach,
    Edeec,
    Fuzzy,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 3] = [ProtocolKind::Leach, ProtocolKind::Edeec, ProtocolKind::Fuzzy];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Leach => "leach",
            ProtocolKind::Edeec => "edeec",
            ProtocolKind::Fuzzy => "fuzzy",
        }
    }

    /// RNG stream reserved for this protocol; stream 0 is deployment.
    pub fn stream(self) -> u64 {
        match self {
            ProtocolKind::Leach => 1,
            ProtocolKind::Edeec => 2,
            ProtocolKind::Fuzzy => 3,
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown protocol `{0}` (expected leach, edeec or fuzzy)")]
pub struct UnknownProtocol(pub String);

impl FromStr for ProtocolKind {
    type Err = UnknownProtocol;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "leach" => Ok(ProtocolKind::Leach),
            "edeec" | "e-deec" => Ok(ProtocolKind::Edeec),
            "fuzzy" => Ok(ProtocolKind::Fuzzy),
            _ => Err(UnknownProtocol(s.to_owned())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RoundError {
    #[error("no alive nodes left")]
    NoAliveNodes,
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
}

/// What a round decided, for traces and metrics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RoundOutcome {
    pub cluster_heads: Vec<NodeId>,
    /// (source CH, relay CH) pairs.
    pub relays: Vec<(NodeId, NodeId)>,
    /// Nodes per cluster, head included, in `cluster_heads` order.
    pub cluster_sizes: Vec<usize>,
    /// Over-threshold CHs that had to use multipath to reach the BS.
    pub direct_multipath: usize,
}

pub trait Protocol: Send {
    fn kind(&self) -> ProtocolKind;

    /// Runs one round. `round` is zero-based.
    fn run_round(
        &mut self,
        round: u64,
        net: &mut Network,
        rng: &mut dyn RngCore,
    ) -> Result<RoundOutcome, RoundError>;
}

/// Aggregated payload size: ceil(ratio · (members + 1) · data_bits), never
/// below one data packet.
pub fn compressed_bits(members: usize, data_bits: u64, ratio: f64) -> u64 {
    let raw = ratio * (members as f64 + 1.0) * data_bits as f64;
    // 0.05 · 22 · 4000 evaluates to 4400.000000000001
    let bits = (raw - 1e-9).ceil().max(0.0) as u64;
    bits.max(data_bits)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub head: NodeId,
    /// Associated nodes, head excluded.
    pub members: Vec<NodeId>,
}

impl Cluster {
    pub fn radius(&self, net: &Network) -> f64 {
        self.members
            .iter()
            .map(|&m| net.dist(self.head, m))
            .fold(0.0, f64::max)
    }
}

/// Join requests (member tx info to the head, head rx per member) and the
/// head's TDMA schedule broadcast at the cluster radius.
pub(crate) fn associate(net: &mut Network, clusters: &[Cluster]) {
    let info = net.radio.info_bits;
    for c in clusters {
        for &m in &c.members {
            let d = net.dist(m, c.head);
            net.tx(m, info, d, Category::Association);
            net.rx(c.head, info, Category::Association);
        }
        if !c.members.is_empty() {
            let r = c.radius(net);
            net.tx(c.head, info, r, Category::Tdma);
        }
    }
}

/// Member data to the head, reception and aggregation at the head. Returns
/// the aggregated payload size in bits.
pub(crate) fn collect_data(net: &mut Network, cluster: &Cluster, ratio: f64) -> u64 {
    let data = net.radio.data_bits;
    for &m in &cluster.members {
        let d = net.dist(m, cluster.head);
        net.tx(m, data, d, Category::MemberData);
        net.rx(cluster.head, data, Category::ChReceive);
    }
    let agg = net.radio.aggregation_energy(data, cluster.members.len() + 1);
    net.debit(cluster.head, agg, Category::Aggregation);
    compressed_bits(cluster.members.len(), data, ratio)
}

/// Shared round body of the distributed baselines: advertisement by each
/// elected head, join-nearest-head, association, data collection and direct
/// head-to-BS transmission. With no heads, every alive node sends its data
/// straight to the BS.
pub(crate) fn run_local_round(
    net: &mut Network,
    alive: &[NodeId],
    heads: &[NodeId],
    ratio: f64,
) -> RoundOutcome {
    let data = net.radio.data_bits;
    let info = net.radio.info_bits;
    let d0 = net.radio.d0();
    if heads.is_empty() {
        let mut multipath = 0;
        for &id in alive {
            let d = net.dist_to_bs(id);
            if d >= d0 {
                multipath += 1;
            }
            net.tx(id, data, d, Category::Direct);
        }
        return RoundOutcome {
            direct_multipath: multipath,
            ..RoundOutcome::default()
        };
    }

    let mut clusters: Vec<Cluster> = heads
        .iter()
        .map(|&h| Cluster {
            head: h,
            members: Vec::new(),
        })
        .collect();
    for &id in alive {
        if heads.contains(&id) {
            continue;
        }
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, &h) in heads.iter().enumerate() {
            let d = net.dist(id, h);
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        clusters[best].members.push(id);
    }

    for c in &clusters {
        let r = c.radius(net);
        net.tx(c.head, info, r, Category::Advertisement);
        for &id in alive {
            if id != c.head {
                net.rx(id, info, Category::Announcement);
            }
        }
    }
    associate(net, &clusters);

    let mut multipath = 0;
    for c in &clusters {
        let payload = collect_data(net, c, ratio);
        let d = net.dist_to_bs(c.head);
        if d >= d0 {
            multipath += 1;
        }
        net.tx(c.head, payload, d, Category::ChTransmit);
    }
    RoundOutcome {
        cluster_heads: heads.to_vec(),
        relays: Vec::new(),
        cluster_sizes: clusters.iter().map(|c| c.members.len() + 1).collect(),
        direct_multipath: multipath,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compressed_bits_examples() {
        assert_eq!(compressed_bits(21, 4000, 0.05), 4400);
        assert_eq!(compressed_bits(21, 4000, 1.0), 22 * 4000);
        assert_eq!(compressed_bits(0, 4000, 0.05), 4000);
        assert_eq!(compressed_bits(30, 4000, 0.05), 6200);
    }

    #[test]
    fn protocol_names_round_trip() {
        for k in ProtocolKind::ALL {
            assert_eq!(k.name().parse::<ProtocolKind>().unwrap(), k);
        }
        assert!("sep".parse::<ProtocolKind>().is_err());
    }
}

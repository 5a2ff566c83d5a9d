//! Centralized fuzzy protocol. Each round the BS divides the alive nodes
//! with k-means, elects one head per cluster by fuzzy score, picks fuzzy
//! relays for heads beyond `d0`, broadcasts the plan and then runs the
//! association and data phases.

use std::collections::BTreeMap;

use rand::RngCore;

use super::{associate, collect_data, Cluster, Protocol, ProtocolKind, RoundError, RoundOutcome};
use crate::fuzzy::FuzzyError;
use crate::geometry::{centrality, euclidean, kmeans, ClusterLayout, Point2D};
use crate::ledger::Category;
use crate::network::{Network, NodeId};
use crate::radio::RadioParams;
use crate::rules::FuzzySystem;

/// Relay scores closer than this are treated as equal.
pub const SCORE_TIE: f64 = 1e-9;

/// Relays chained behind an over-threshold head, at most.
pub const MAX_RELAY_DEPTH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadInfo {
    pub id: NodeId,
    pub energy: f64,
    pub position: Point2D,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayScore {
    pub source: NodeId,
    pub candidate: NodeId,
    pub distance: f64,
    pub score: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RelaySelection {
    /// Over-threshold head → chosen relay head.
    pub map: BTreeMap<NodeId, NodeId>,
    pub scores: Vec<RelayScore>,
    /// Over-threshold heads with no other head to relay through.
    pub unrelayed: Vec<NodeId>,
}

/// Picks a relay for every head at or beyond `d0` from the BS.
///
/// Every other head is scored on (battery, hop distance). Only candidates
/// whose two hops need less amplifier energy than the direct link are
/// eligible. Among those, heads with both hops below `d0` come first; the
/// best score wins, equal scores go to the shorter hop, then to the lower
/// id. Heads without an eligible candidate send directly.
pub fn select_relays(
    heads: &[HeadInfo],
    bs: Point2D,
    system: &FuzzySystem,
    radio: &RadioParams,
) -> Result<RelaySelection, FuzzyError> {
    let d0 = radio.d0();
    // per-bit amplifier energy; the payload size cancels out
    let amp = |d: f64| radio.amplifier_energy(1, d);
    let mut sel = RelaySelection::default();
    let mut sorted = heads.to_vec();
    sorted.sort_by_key(|h| h.id);
    for src in sorted.iter().filter(|h| euclidean(h.position, bs) >= d0) {
        let direct = amp(euclidean(src.position, bs));
        let mut best: Option<(u8, f64, f64, NodeId)> = None;
        for cand in sorted.iter().filter(|h| h.id != src.id) {
            let hop = euclidean(src.position, cand.position);
            let score = system.relay_score(cand.energy, hop)?;
            sel.scores.push(RelayScore {
                source: src.id,
                candidate: cand.id,
                distance: hop,
                score,
            });
            let to_bs = euclidean(cand.position, bs);
            if amp(hop) + amp(to_bs) >= direct {
                continue;
            }
            let tier = u8::from(!(hop < d0 && to_bs < d0));
            let better = match best {
                None => true,
                Some((t, s, d, _)) => {
                    tier < t
                        || (tier == t && (score > s + SCORE_TIE || ((score - s).abs() <= SCORE_TIE && hop < d)))
                }
            };
            if better {
                best = Some((tier, score, hop, cand.id));
            }
        }
        match best {
            Some((_, _, _, relay)) => {
                sel.map.insert(src.id, relay);
            }
            None => sel.unrelayed.push(src.id),
        }
    }
    Ok(sel)
}

/// Relay path from `head` to the BS, excluding `head` itself.
pub fn relay_path(head: NodeId, map: &BTreeMap<NodeId, NodeId>) -> Vec<NodeId> {
    let mut path = Vec::new();
    let mut cur = head;
    while let Some(&next) = map.get(&cur) {
        if next == head || path.contains(&next) || path.len() == MAX_RELAY_DEPTH {
            break;
        }
        path.push(next);
        cur = next;
    }
    path
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElectionScore {
    pub id: NodeId,
    pub cluster: usize,
    pub battery: f64,
    pub centrality: f64,
    pub dist_bs: f64,
    pub score: f64,
}

/// Highest score per cluster wins; ties go to the lowest id. Clusters with
/// no members get no head.
pub fn elect_cluster_heads(
    net: &Network,
    layout: &ClusterLayout,
    system: &FuzzySystem,
) -> Result<(Vec<Option<NodeId>>, Vec<ElectionScore>), RoundError> {
    let mut heads: Vec<Option<(NodeId, f64)>> = vec![None; layout.k];
    let mut scores = Vec::with_capacity(layout.ids.len());
    for (&id, &cluster) in layout.ids.iter().zip(&layout.assignment) {
        let node = net.node(id);
        if !node.alive {
            continue;
        }
        let c = centrality(id, node.position, layout)?;
        let dist_bs = net.dist_to_bs(id);
        let score = system.election_score(node.energy, c, dist_bs)?;
        scores.push(ElectionScore {
            id,
            cluster,
            battery: node.energy,
            centrality: c,
            dist_bs,
            score,
        });
        // ids ascend, so strict comparison keeps the lowest id on ties
        if heads[cluster].is_none_or(|(_, s)| score > s) {
            heads[cluster] = Some((id, score));
        }
    }
    Ok((heads.into_iter().map(|h| h.map(|(id, _)| id)).collect(), scores))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundPlan {
    pub layout: ClusterLayout,
    /// Head per cluster index.
    pub heads: Vec<Option<NodeId>>,
    pub relays: RelaySelection,
    pub election: Vec<ElectionScore>,
}

impl RoundPlan {
    pub fn clusters(&self) -> Vec<Cluster> {
        self.heads
            .iter()
            .enumerate()
            .filter_map(|(c, h)| {
                h.map(|head| Cluster {
                    head,
                    members: self.layout.members(c).filter(|&m| m != head).collect(),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct FuzzyProtocol {
    pub system: FuzzySystem,
    pub clusters: usize,
    pub compression_ratio: f64,
}

impl FuzzyProtocol {
    pub fn new(system: FuzzySystem, clusters: usize, compression_ratio: f64) -> Self {
        Self {
            system,
            clusters,
            compression_ratio,
        }
    }

    /// Clustering, election and relay selection on the current energies.
    /// Debits nothing.
    pub fn plan_round(&self, net: &Network, rng: &mut dyn RngCore) -> Result<RoundPlan, RoundError> {
        let alive: Vec<(NodeId, Point2D)> = net
            .nodes
            .iter()
            .filter(|n| n.alive)
            .map(|n| (n.id, n.position))
            .collect();
        if alive.is_empty() {
            return Err(RoundError::NoAliveNodes);
        }
        let k = self.clusters.clamp(1, alive.len());
        let layout = kmeans(&alive, k, rng)?;
        let (heads, election) = elect_cluster_heads(net, &layout, &self.system)?;
        let infos: Vec<HeadInfo> = heads
            .iter()
            .flatten()
            .map(|&id| HeadInfo {
                id,
                energy: net.energy(id),
                position: net.position(id),
            })
            .collect();
        let relays = select_relays(&infos, net.bs.position, &self.system, &net.radio)?;
        Ok(RoundPlan {
            layout,
            heads,
            relays,
            election,
        })
    }

    /// Applies every debit of a planned round.
    pub fn execute_plan(&self, plan: &RoundPlan, net: &mut Network) -> RoundOutcome {
        let info = net.radio.info_bits;
        let d0 = net.radio.d0();
        for id in net.alive_ids() {
            net.rx(id, info, Category::Announcement);
        }
        let clusters = plan.clusters();
        associate(net, &clusters);

        let mut multipath = 0;
        for c in &clusters {
            let payload = collect_data(net, c, self.compression_ratio);
            let path = relay_path(c.head, &plan.relays.map);
            let mut from = c.head;
            for (hop, &relay) in path.iter().enumerate() {
                let d = net.dist(from, relay);
                let cat = if hop == 0 { Category::ChTransmit } else { Category::Relay };
                net.tx(from, payload, d, cat);
                net.rx(relay, payload, Category::Relay);
                from = relay;
            }
            let d = net.dist_to_bs(from);
            if d >= d0 {
                multipath += 1;
            }
            let cat = if path.is_empty() { Category::ChTransmit } else { Category::Relay };
            net.tx(from, payload, d, cat);
        }

        RoundOutcome {
            cluster_heads: clusters.iter().map(|c| c.head).collect(),
            relays: plan.relays.map.iter().map(|(s, r)| (*s, *r)).collect(),
            cluster_sizes: clusters.iter().map(|c| c.members.len() + 1).collect(),
            direct_multipath: multipath,
        }
    }
}

impl Protocol for FuzzyProtocol {
    fn kind(&self) -> ProtocolKind {
        ProtocolKind::Fuzzy
    }

    fn run_round(
        &mut self,
        _round: u64,
        net: &mut Network,
        rng: &mut dyn RngCore,
    ) -> Result<RoundOutcome, RoundError> {
        let plan = self.plan_round(net, rng)?;
        Ok(self.execute_plan(&plan, net))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{BaseStation, Node, NodeClass};
    use crate::radio::RadioParams;
    use crate::rules::FuzzyParams;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn system() -> FuzzySystem {
        FuzzySystem::new(&FuzzyParams::default(), 1.5).unwrap()
    }

    fn net_of(points: &[(f64, f64, f64)]) -> Network {
        let nodes = points
            .iter()
            .enumerate()
            .map(|(i, &(x, y, e))| Node {
                id: i as NodeId,
                position: Point2D::new(x, y),
                class: NodeClass::Super,
                initial_energy: e,
                energy: e,
                alive: true,
            })
            .collect();
        Network::new(nodes, BaseStation::default(), RadioParams::default())
    }

    #[test]
    fn no_relays_when_all_heads_are_close() {
        let heads = [
            HeadInfo { id: 0, energy: 1.0, position: Point2D::new(10.0, 90.0) },
            HeadInfo { id: 1, energy: 1.0, position: Point2D::new(50.0, 50.0) },
        ];
        let sel = select_relays(&heads, Point2D::new(5.0, 95.0), &system(), &RadioParams::default()).unwrap();
        assert!(sel.map.is_empty());
        assert!(sel.unrelayed.is_empty());
    }

    #[test]
    fn lone_far_head_is_unrelayed() {
        let heads = [HeadInfo { id: 4, energy: 1.0, position: Point2D::new(100.0, 0.0) }];
        let sel = select_relays(&heads, Point2D::new(5.0, 95.0), &system(), &RadioParams::default()).unwrap();
        assert_eq!(sel.unrelayed, vec![4]);
    }

    #[test]
    fn equal_energy_picks_nearest_candidate() {
        // brute-force: score every candidate, compare against argmin distance
        let bs = Point2D::new(5.0, 95.0);
        let src = HeadInfo { id: 0, energy: 1.2, position: Point2D::new(95.0, 20.0) };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        use rand::Rng;
        for _ in 0..50 {
            let mut heads = vec![src];
            for id in 1..5 {
                let position = loop {
                    let p = Point2D::new(rng.random::<f64>() * 100.0, rng.random::<f64>() * 100.0);
                    if euclidean(p, bs) < 87.0 && euclidean(p, src.position) < 87.0 {
                        break p;
                    }
                };
                heads.push(HeadInfo { id, energy: 1.2, position });
            }
            let sel = select_relays(&heads, bs, &system(), &RadioParams::default()).unwrap();
            let nearest = heads[1..]
                .iter()
                .min_by(|a, b| {
                    euclidean(a.position, src.position).total_cmp(&euclidean(b.position, src.position))
                })
                .unwrap()
                .id;
            assert_eq!(sel.map[&0], nearest);
        }
    }

    #[test]
    fn relay_path_is_bounded_and_acyclic() {
        let map: BTreeMap<NodeId, NodeId> = [(1, 2), (2, 1)].into_iter().collect();
        assert_eq!(relay_path(1, &map), vec![2]);
        let chain: BTreeMap<NodeId, NodeId> = [(1, 2), (2, 3), (3, 4)].into_iter().collect();
        assert_eq!(relay_path(1, &chain), vec![2, 3]);
        assert!(relay_path(9, &chain).is_empty());
    }

    #[test]
    fn singleton_cluster_elects_its_node() {
        let net = net_of(&[(40.0, 40.0, 0.7)]);
        let p = FuzzyProtocol::new(system(), 1, 0.05);
        let plan = p.plan_round(&net, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(plan.heads, vec![Some(0)]);
    }

    #[test]
    fn higher_battery_candidate_wins() {
        let net = net_of(&[(20.0, 80.0, 0.1), (20.5, 80.0, 1.5)]);
        let p = FuzzyProtocol::new(system(), 1, 0.05);
        let plan = p.plan_round(&net, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(plan.heads, vec![Some(1)]);
    }

    #[test]
    fn single_node_round_ledger() {
        let mut net = net_of(&[(40.0, 60.0, 1.0)]);
        let mut p = FuzzyProtocol::new(system(), 5, 0.05);
        let out = p.run_round(0, &mut net, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(out.cluster_heads, vec![0]);
        let r = RadioParams::default();
        let d = euclidean(Point2D::new(40.0, 60.0), Point2D::new(5.0, 95.0));
        let expected = r.rx_energy(100) + r.aggregation_energy(4000, 1) + r.tx_energy(4000, d);
        assert!((1.0 - net.energy(0) - expected).abs() < 1e-15);
    }

    #[test]
    fn colocated_nodes_pay_only_electronics() {
        let bs = BaseStation::default().position;
        let mut net = net_of(&[(bs.x, bs.y, 1.0); 4]);
        let mut p = FuzzyProtocol::new(system(), 2, 0.05);
        let out = p.run_round(0, &mut net, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let r = RadioParams::default();
        let info = r.rx_energy(100);
        let data = r.rx_energy(4000);
        let mut expected = 4.0 * info; // announcement
        for &size in &out.cluster_sizes {
            let members = (size - 1) as f64;
            expected += members * 2.0 * info // join tx + rx
                + if size > 1 { info } else { 0.0 } // tdma
                + members * 2.0 * data // member data tx + rx
                + r.aggregation_energy(4000, size)
                + data; // payload to BS
        }
        let spent = 4.0 - net.residual_total();
        assert!((spent - expected).abs() < 1e-15, "{spent} vs {expected}");
    }

    #[test]
    fn no_alive_nodes_finishes() {
        let mut net = net_of(&[(1.0, 1.0, 1.0)]);
        net.nodes[0].alive = false;
        let mut p = FuzzyProtocol::new(system(), 1, 0.05);
        assert_eq!(
            p.run_round(0, &mut net, &mut ChaCha8Rng::seed_from_u64(0)),
            Err(RoundError::NoAliveNodes)
        );
    }
}

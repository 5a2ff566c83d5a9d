//! Round loop, lifecycle metrics and multi-seed protocol comparison.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::fuzzy::FuzzyError;
use crate::ledger::DebitBreakdown;
use crate::network::{deploy, formation_cost, BaseStation, Field, HeterogeneityConfig, Network, NetworkError, NodeId};
use crate::protocol::{
    Edeec, EdeecParams, FuzzyProtocol, Leach, LeachParams, Protocol, ProtocolKind, RoundError, RoundOutcome,
};
use crate::radio::{RadioError, RadioParams};
use crate::rules::{FuzzyParams, FuzzySystem};

/// Largest tolerated ledger gap per round, in joules.
pub const LEDGER_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("rounds must be at least 1")]
    ZeroRounds,
    #[error("clusters must be at least 1")]
    ZeroClusters,
    #[error("compression ratio must lie in (0, 1], got {0}")]
    CompressionRatio(f64),
    #[error("p_opt must lie in (0, 1), got {0}")]
    POpt(f64),
    #[error("edeec multipliers must satisfy 0 <= a <= b, r_estimate >= 1")]
    EdeecParams,
    #[error("base station must have finite coordinates")]
    BaseStation,
    #[error(transparent)]
    Radio(#[from] RadioError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("fuzzy rule base: {0}")]
    Fuzzy(#[from] FuzzyError),
    #[error("round {round}: {source}")]
    Round { round: u64, source: RoundError },
    #[error("round {round}: energy ledger off by {gap:e} J")]
    Ledger { round: u64, gap: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub protocol: ProtocolKind,
    pub seed: u64,
    pub rounds: u64,
    pub clusters: usize,
    pub compression_ratio: f64,
    pub field: Field,
    pub bs: BaseStation,
    pub radio: RadioParams,
    pub heterogeneity: HeterogeneityConfig,
    pub leach: LeachParams,
    pub edeec: EdeecParams,
    pub fuzzy: FuzzyParams,
}

impl Default for SimConfig {
    /// The reference scenario: 100 nodes on a 100 m square, BS at (5, 95),
    /// five clusters, 5000 rounds.
    fn default() -> Self {
        Self {
            protocol: ProtocolKind::Fuzzy,
            seed: 1,
            rounds: 5000,
            clusters: 5,
            compression_ratio: 0.05,
            field: Field::default(),
            bs: BaseStation::default(),
            radio: RadioParams::default(),
            heterogeneity: HeterogeneityConfig::default(),
            leach: LeachParams::default(),
            edeec: EdeecParams::default(),
            fuzzy: FuzzyParams::default(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.rounds == 0 {
            return Err(SimError::ZeroRounds);
        }
        if self.clusters == 0 {
            return Err(SimError::ZeroClusters);
        }
        if !(self.compression_ratio > 0.0 && self.compression_ratio <= 1.0) {
            return Err(SimError::CompressionRatio(self.compression_ratio));
        }
        for p in [self.leach.p_opt, self.edeec.p_opt] {
            if !(p > 0.0 && p < 1.0) {
                return Err(SimError::POpt(p));
            }
        }
        let e = &self.edeec;
        if !(e.a >= 0.0 && e.a <= e.b && e.b.is_finite() && e.r_estimate >= 1) {
            return Err(SimError::EdeecParams);
        }
        if !(self.bs.position.x.is_finite() && self.bs.position.y.is_finite()) {
            return Err(SimError::BaseStation);
        }
        if !(self.field.width > 0.0 && self.field.height > 0.0) {
            return Err(NetworkError::Field(self.field.width, self.field.height).into());
        }
        self.radio.validate()?;
        self.heterogeneity.validate()?;
        FuzzySystem::new(&self.fuzzy, self.heterogeneity.energies.max())?;
        Ok(())
    }

    pub fn with_protocol(&self, protocol: ProtocolKind) -> Self {
        Self {
            protocol,
            ..self.clone()
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    /// Deterministic deployment for this seed; identical across protocols.
    pub fn build_network(&self) -> Result<Network, SimError> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let nodes = deploy(&self.heterogeneity, self.field, &mut rng)?;
        Ok(Network::new(nodes, self.bs, self.radio))
    }

    pub fn protocol_rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.protocol.stream());
        rng
    }

    pub fn build_protocol(&self) -> Result<Box<dyn Protocol>, SimError> {
        let n = self.heterogeneity.nodes;
        Ok(match self.protocol {
            ProtocolKind::Fuzzy => {
                let system = FuzzySystem::new(&self.fuzzy, self.heterogeneity.energies.max())?;
                Box::new(FuzzyProtocol::new(system, self.clusters, self.compression_ratio))
            }
            ProtocolKind::Leach => Box::new(Leach::new(self.leach, n, self.compression_ratio)),
            ProtocolKind::Edeec => Box::new(Edeec::new(self.edeec, n, self.compression_ratio)),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundMetrics {
    /// One-based round number.
    pub round: u64,
    pub alive: usize,
    pub residual_j: f64,
    pub ch_count: usize,
    pub relay_count: usize,
    pub dead: Vec<NodeId>,
    pub outcome: RoundOutcome,
    pub debits: DebitBreakdown,
    pub ledger_gap: f64,
}

impl RoundMetrics {
    fn empty(round: u64) -> Self {
        Self {
            round,
            alive: 0,
            residual_j: 0.0,
            ch_count: 0,
            relay_count: 0,
            dead: Vec::new(),
            outcome: RoundOutcome::default(),
            debits: DebitBreakdown::default(),
            ledger_gap: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub protocol: ProtocolKind,
    pub seed: u64,
    pub nodes: usize,
    pub initial_energy: f64,
    pub formation_j: f64,
    /// Round in which the first node died; 0 if one died during formation.
    pub fnd: Option<u64>,
    /// Round in which the last node died.
    pub lnd: Option<u64>,
    pub rounds_simulated: u64,
    pub final_alive: usize,
    /// One entry per configured round; rounds after the network died are
    /// zero-filled.
    pub metrics: Vec<RoundMetrics>,
}

impl RunSummary {
    /// FND, or one past the horizon when no node died.
    pub fn fnd_or_horizon(&self) -> u64 {
        self.fnd.unwrap_or(self.metrics.len() as u64 + 1)
    }
}

/// Runs one configuration to completion.
pub fn simulate(config: &SimConfig) -> Result<RunSummary, SimError> {
    config.validate()?;
    let mut net = config.build_network()?;
    let initial_energy = net.initial_total();
    let nodes = net.nodes.len();
    formation_cost(&mut net);
    let formation_j = net.take_round_debits().total();
    let mut fnd = (!net.settle_deaths().is_empty()).then_some(0);
    let mut lnd = None;
    if nodes > 0 && net.alive_count() == 0 {
        lnd = Some(0);
    }

    let mut protocol = config.build_protocol()?;
    let mut rng = config.protocol_rng();
    let mut metrics = Vec::with_capacity(config.rounds as usize);
    let mut rounds_simulated = 0;
    for r in 0..config.rounds {
        if net.alive_count() == 0 {
            metrics.push(RoundMetrics::empty(r + 1));
            continue;
        }
        let outcome = protocol
            .run_round(r, &mut net, &mut rng)
            .map_err(|source| SimError::Round { round: r + 1, source })?;
        rounds_simulated += 1;
        let dead = net.settle_deaths();
        if !dead.is_empty() && fnd.is_none() {
            fnd = Some(r + 1);
        }
        let alive = net.alive_count();
        if alive == 0 && lnd.is_none() {
            lnd = Some(r + 1);
        }
        let gap = net.ledger_gap();
        if gap.abs() > LEDGER_TOLERANCE {
            return Err(SimError::Ledger { round: r + 1, gap });
        }
        metrics.push(RoundMetrics {
            round: r + 1,
            alive,
            residual_j: net.residual_total(),
            ch_count: outcome.cluster_heads.len(),
            relay_count: outcome.relays.len(),
            dead,
            outcome,
            debits: net.take_round_debits(),
            ledger_gap: gap,
        });
    }
    Ok(RunSummary {
        protocol: config.protocol,
        seed: config.seed,
        nodes,
        initial_energy,
        formation_j,
        fnd,
        lnd,
        rounds_simulated,
        final_alive: net.alive_count(),
        metrics,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolStats {
    pub protocol: ProtocolKind,
    pub runs: usize,
    /// Median FND, counting runs without a death as one past the horizon.
    pub median_fnd: f64,
    pub min_fnd: u64,
    pub max_fnd: u64,
    pub median_final_alive: f64,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub runs: BTreeMap<(ProtocolKind, u64), RunSummary>,
    pub stats: Vec<ProtocolStats>,
}

impl Comparison {
    pub fn run(&self, protocol: ProtocolKind, seed: u64) -> Option<&RunSummary> {
        self.runs.get(&(protocol, seed))
    }
}

pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Runs every (protocol, seed) pair, in parallel on the current rayon pool.
/// Protocols in `protocols` keep their order in the statistics.
pub fn compare(base: &SimConfig, protocols: &[ProtocolKind], seeds: &[u64]) -> Result<Comparison, SimError> {
    base.validate()?;
    let pairs: Vec<(ProtocolKind, u64)> = protocols
        .iter()
        .flat_map(|&p| seeds.iter().map(move |&s| (p, s)))
        .collect();
    let results: Vec<((ProtocolKind, u64), Result<RunSummary, SimError>)> = pairs
        .par_iter()
        .map(|&(p, s)| ((p, s), simulate(&base.with_protocol(p).with_seed(s))))
        .collect();
    let mut runs = BTreeMap::new();
    for (key, res) in results {
        runs.insert(key, res?);
    }
    let stats = protocols
        .iter()
        .map(|&p| {
            let of_p: Vec<&RunSummary> = seeds.iter().map(|&s| &runs[&(p, s)]).collect();
            let fnds: Vec<u64> = of_p.iter().map(|r| r.fnd_or_horizon()).collect();
            ProtocolStats {
                protocol: p,
                runs: of_p.len(),
                median_fnd: median(&mut fnds.iter().map(|&f| f as f64).collect::<Vec<_>>()),
                min_fnd: fnds.iter().copied().min().unwrap_or(0),
                max_fnd: fnds.iter().copied().max().unwrap_or(0),
                median_final_alive: median(
                    &mut of_p.iter().map(|r| r.final_alive as f64).collect::<Vec<_>>(),
                ),
            }
        })
        .collect();
    Ok(Comparison { runs, stats })
}

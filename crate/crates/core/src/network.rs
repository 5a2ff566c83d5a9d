//! Node population with three energy classes, random deployment, the fixed
//! base station and the energy ledger that every protocol debits through.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point2D;
use crate::ledger::{Category, CompensatedSum, DebitBreakdown};
use crate::radio::RadioParams;

pub type NodeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeClass {
    Normal,
    Advanced,
    Super,
}

impl NodeClass {
    pub fn name(self) -> &'static str {
        match self {
            NodeClass::Normal => "normal",
            NodeClass::Advanced => "advanced",
            NodeClass::Super => "super",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("fraction `{0}` must lie in [0, 1], got {1}")]
    Fraction(&'static str, f64),
    #[error("class energies must be positive and ordered normal <= advanced <= super")]
    ClassEnergies,
    #[error("field dimensions must be positive, got {0} x {1}")]
    Field(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassEnergies {
    pub normal: f64,
    pub advanced: f64,
    pub super_: f64,
}

impl Default for ClassEnergies {
    fn default() -> Self {
        Self {
            normal: 0.5,
            advanced: 1.0,
            super_: 1.5,
        }
    }
}

impl ClassEnergies {
    pub fn of(&self, class: NodeClass) -> f64 {
        match class {
            NodeClass::Normal => self.normal,
            NodeClass::Advanced => self.advanced,
            NodeClass::Super => self.super_,
        }
    }

    pub fn max(&self) -> f64 {
        self.normal.max(self.advanced).max(self.super_)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassCounts {
    pub normal: usize,
    pub advanced: usize,
    pub super_: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeterogeneityConfig {
    pub nodes: usize,
    /// Fraction of nodes with extra energy.
    pub mf: f64,
    /// Fraction of those that are super nodes.
    pub mp: f64,
    /// Extra-energy multiplier of the closed-form total.
    pub e: f64,
    pub energies: ClassEnergies,
}

impl Default for HeterogeneityConfig {
    fn default() -> Self {
        Self {
            nodes: 100,
            mf: 1.0,
            mp: 0.6,
            e: 1.0,
            energies: ClassEnergies::default(),
        }
    }
}

// Products like 100 * 0.4 land a hair below the integer.
fn floor_count(x: f64) -> usize {
    (x + 1e-9).floor().max(0.0) as usize
}

impl HeterogeneityConfig {
    pub fn validate(&self) -> Result<(), NetworkError> {
        if !(0.0..=1.0).contains(&self.mf) {
            return Err(NetworkError::Fraction("mf", self.mf));
        }
        if !(0.0..=1.0).contains(&self.mp) {
            return Err(NetworkError::Fraction("mp", self.mp));
        }
        let ClassEnergies {
            normal,
            advanced,
            super_,
        } = self.energies;
        if !(normal > 0.0 && normal <= advanced && advanced <= super_ && super_.is_finite()) {
            return Err(NetworkError::ClassEnergies);
        }
        Ok(())
    }

    /// Class counts: floor for normal and advanced, the remainder are super.
    pub fn partition(&self) -> ClassCounts {
        let n = self.nodes as f64;
        let normal = floor_count(n * (1.0 - self.mf)).min(self.nodes);
        let advanced = floor_count(n * self.mf * (1.0 - self.mp)).min(self.nodes - normal);
        ClassCounts {
            normal,
            advanced,
            super_: self.nodes - normal - advanced,
        }
    }

    pub fn class_of(&self, id: NodeId) -> NodeClass {
        let c = self.partition();
        let i = id as usize;
        if i < c.normal {
            NodeClass::Normal
        } else if i < c.normal + c.advanced {
            NodeClass::Advanced
        } else {
            NodeClass::Super
        }
    }

    /// Closed form N·E_o·(1 + mf·(2 + mp·e)) for the total initial energy. It
    /// does not always agree with the per-class sum; both are reported.
    pub fn closed_form_total(&self) -> f64 {
        self.nodes as f64 * self.energies.normal * (1.0 + self.mf * (2.0 + self.mp * self.e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub width: f64,
    pub height: f64,
}

impl Default for Field {
    fn default() -> Self {
        Self {
            width: 100.0,
            height: 100.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseStation {
    pub position: Point2D,
}

impl Default for BaseStation {
    fn default() -> Self {
        Self {
            position: Point2D::new(5.0, 95.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub position: Point2D,
    pub class: NodeClass,
    pub initial_energy: f64,
    pub energy: f64,
    pub alive: bool,
}

/// Uniform random placement; classes follow the partition in id order.
pub fn deploy<R: Rng + ?Sized>(
    cfg: &HeterogeneityConfig,
    field: Field,
    rng: &mut R,
) -> Result<Vec<Node>, NetworkError> {
    if !(field.width > 0.0 && field.height > 0.0) {
        return Err(NetworkError::Field(field.width, field.height));
    }
    Ok((0..cfg.nodes as NodeId)
        .map(|id| {
            let position = Point2D::new(
                rng.random::<f64>() * field.width,
                rng.random::<f64>() * field.height,
            );
            let class = cfg.class_of(id);
            let energy = cfg.energies.of(class);
            Node {
                id,
                position,
                class,
                initial_energy: energy,
                energy,
                alive: energy > 0.0,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialEnergy {
    pub summed: f64,
    pub closed_form: f64,
}

pub fn total_initial_energy(nodes: &[Node], cfg: &HeterogeneityConfig) -> InitialEnergy {
    InitialEnergy {
        summed: nodes
            .iter()
            .map(|n| n.initial_energy)
            .collect::<CompensatedSum>()
            .value(),
        closed_form: cfg.closed_form_total(),
    }
}

/// A population together with its base station, radio model and ledger.
#[derive(Debug, Clone)]
pub struct Network {
    pub nodes: Vec<Node>,
    pub bs: BaseStation,
    pub radio: RadioParams,
    initial_total: f64,
    cumulative: DebitBreakdown,
    round: DebitBreakdown,
}

impl Network {
    /// Node ids must equal their index.
    pub fn new(nodes: Vec<Node>, bs: BaseStation, radio: RadioParams) -> Self {
        debug_assert!(nodes.iter().enumerate().all(|(i, n)| n.id as usize == i));
        let initial_total = nodes
            .iter()
            .map(|n| n.initial_energy)
            .collect::<CompensatedSum>()
            .value();
        Self {
            nodes,
            bs,
            radio,
            initial_total,
            cumulative: DebitBreakdown::default(),
            round: DebitBreakdown::default(),
        }
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn position(&self, id: NodeId) -> Point2D {
        self.nodes[id as usize].position
    }

    pub fn energy(&self, id: NodeId) -> f64 {
        self.nodes[id as usize].energy
    }

    pub fn dist_to_bs(&self, id: NodeId) -> f64 {
        self.position(id).distance(&self.bs.position)
    }

    pub fn dist(&self, a: NodeId, b: NodeId) -> f64 {
        self.position(a).distance(&self.position(b))
    }

    pub fn alive_ids(&self) -> Vec<NodeId> {
        self.nodes.iter().filter(|n| n.alive).map(|n| n.id).collect()
    }

    pub fn alive_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.alive).count()
    }

    pub fn max_class_energy(&self) -> f64 {
        self.nodes.iter().map(|n| n.initial_energy).fold(0.0, f64::max)
    }

    pub fn initial_total(&self) -> f64 {
        self.initial_total
    }

    pub fn residual_total(&self) -> f64 {
        self.nodes
            .iter()
            .map(|n| n.energy)
            .collect::<CompensatedSum>()
            .value()
    }

    /// Removes up to `joules` from a node, clamping at zero, and records the
    /// amount actually removed. The alive flag is only updated by
    /// [`Network::settle_deaths`].
    pub fn debit(&mut self, id: NodeId, joules: f64, category: Category) -> f64 {
        debug_assert!(joules >= 0.0 && joules.is_finite());
        let node = &mut self.nodes[id as usize];
        let before = node.energy;
        node.energy = (before - joules).max(0.0);
        let taken = before - node.energy;
        self.cumulative.add(category, taken);
        self.round.add(category, taken);
        taken
    }

    pub fn tx(&mut self, id: NodeId, bits: u64, distance: f64, category: Category) -> f64 {
        let e = self.radio.tx_energy(bits, distance);
        self.debit(id, e, category)
    }

    pub fn rx(&mut self, id: NodeId, bits: u64, category: Category) -> f64 {
        let e = self.radio.rx_energy(bits);
        self.debit(id, e, category)
    }

    /// Marks drained nodes dead and returns their ids.
    pub fn settle_deaths(&mut self) -> Vec<NodeId> {
        let mut dead = Vec::new();
        for n in self.nodes.iter_mut().filter(|n| n.alive && n.energy <= 0.0) {
            n.alive = false;
            dead.push(n.id);
        }
        dead
    }

    pub fn cumulative_debits(&self) -> &DebitBreakdown {
        &self.cumulative
    }

    /// Starts a new per-round breakdown and returns the previous one.
    pub fn take_round_debits(&mut self) -> DebitBreakdown {
        std::mem::take(&mut self.round)
    }

    pub fn round_debits(&self) -> &DebitBreakdown {
        &self.round
    }

    /// initial − debits − residual; zero up to rounding when books close.
    pub fn ledger_gap(&self) -> f64 {
        let mut s = CompensatedSum::default();
        s.add(self.initial_total);
        s.add(-self.cumulative.total());
        for n in &self.nodes {
            s.add(-n.energy);
        }
        s.value()
    }
}

/// Every node reports position and energy to the BS once at formation.
pub fn formation_cost(net: &mut Network) -> Vec<f64> {
    let bits = net.radio.info_bits;
    (0..net.nodes.len() as NodeId)
        .map(|id| {
            let d = net.dist_to_bs(id);
            net.tx(id, bits, d, Category::Formation)
        })
        .collect()
}

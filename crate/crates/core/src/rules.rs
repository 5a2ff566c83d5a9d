//! The two rule bases used by the fuzzy protocol: cluster-head election
//! (Centrality, Battery, DistBS → Election-CH, 27 rules) and relay selection
//! (BatteryCH, DistanceMH → Relay, 9 rules), with their default membership
//! functions.

use crate::fuzzy::{FuzzyError, FuzzyRule, LinguisticVariable, MembershipFunction, OutputVariable, RuleBase};

pub const CENTRALITY: &str = "Centrality";
pub const BATTERY: &str = "Battery";
pub const DIST_BS: &str = "DistBS";
pub const BATTERY_CH: &str = "BatteryCH";
pub const DISTANCE_MH: &str = "DistanceMH";

/// Declarative description of one input variable. Battery-type variables
/// are expressed as fractions of the largest class energy and scaled when
/// the rule base is built.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableSpec {
    pub max: f64,
    pub terms: Vec<(String, MembershipFunction)>,
}

impl VariableSpec {
    fn build(&self, name: &str, unit: &str, scale: f64) -> Result<LinguisticVariable, FuzzyError> {
        let terms = self
            .terms
            .iter()
            .map(|(l, mf)| (l.clone(), mf.scaled(scale)))
            .collect();
        LinguisticVariable::new(name, unit, 0.0, self.max * scale, terms)
    }
}

fn tri(a: f64, b: f64, c: f64) -> MembershipFunction {
    MembershipFunction::Triangular { a, b, c }
}

fn trap(a: f64, b: f64, c: f64, d: f64) -> MembershipFunction {
    MembershipFunction::Trapezoidal { a, b, c, d }
}

fn spec(max: f64, terms: [(&str, MembershipFunction); 3]) -> VariableSpec {
    VariableSpec {
        max,
        terms: terms.iter().map(|(l, mf)| (l.to_string(), *mf)).collect(),
    }
}

/// The 27 election rules as (Centrality, Battery, DistBS) → output. Rule n
/// (1-based) is entry n - 1.
pub const ELECTION_TABLE: [(&str, &str, &str, &str); 27] = [
    ("Far", "High", "Far", "Weak"),
    ("Far", "High", "Moderate", "Weak"),
    ("Far", "High", "Near", "Medium"),
    ("Far", "Low", "Far", "Very weak"),
    ("Far", "Low", "Moderate", "Very weak"),
    ("Far", "Low", "Near", "Very weak"),
    ("Far", "Moderate", "Far", "Very weak"),
    ("Far", "Moderate", "Moderate", "Weak"),
    ("Far", "Moderate", "Near", "Very weak"),
    ("Moderate", "High", "Far", "Medium"),
    ("Moderate", "High", "Moderate", "Strong"),
    ("Moderate", "High", "Near", "Strong"),
    ("Moderate", "Low", "Far", "Very weak"),
    ("Moderate", "Low", "Moderate", "Weak"),
    ("Moderate", "Low", "Near", "Very weak"),
    ("Moderate", "Moderate", "Far", "Weak"),
    ("Moderate", "Moderate", "Moderate", "Strong"),
    ("Moderate", "Moderate", "Near", "Medium"),
    ("Near", "High", "Near", "Very strong"),
    ("Near", "High", "Far", "Strong"),
    ("Near", "High", "Moderate", "Very strong"),
    ("Near", "Low", "Far", "Very weak"),
    ("Near", "Low", "Moderate", "Very weak"),
    ("Near", "Low", "Near", "Very weak"),
    ("Near", "Moderate", "Far", "Medium"),
    ("Near", "Moderate", "Moderate", "Strong"),
    ("Near", "Moderate", "Near", "Strong"),
];

/// Relay rules as (BatteryCH, DistanceMH) → output. Monotone: never better
/// with a longer hop, never worse with more battery.
pub const RELAY_TABLE: [(&str, &str, &str); 9] = [
    ("Low", "Small", "Medium"),
    ("Low", "Medium", "Weak"),
    ("Low", "Big", "Weak"),
    ("Moderate", "Small", "Medium"),
    ("Moderate", "Medium", "Medium"),
    ("Moderate", "Big", "Weak"),
    ("High", "Small", "Strong"),
    ("High", "Medium", "Medium"),
    ("High", "Big", "Weak"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyParams {
    /// Fractions of the largest class energy.
    pub battery: VariableSpec,
    pub centrality: VariableSpec,
    pub dist_bs: VariableSpec,
    /// Fractions of the largest class energy.
    pub battery_ch: VariableSpec,
    pub distance_mh: VariableSpec,
    pub election_centroids: Vec<(String, f64)>,
    pub relay_centroids: Vec<(String, f64)>,
    pub election_rules: Vec<FuzzyRule>,
    pub relay_rules: Vec<FuzzyRule>,
}

impl Default for FuzzyParams {
    fn default() -> Self {
        // Election inputs use evenly spaced terms whose neighbours overlap
        // across the whole universe. Where only one term is active its
        // degree cancels out of the center average and the input stops
        // ranking candidates.
        let even = |max: f64, labels: [&str; 3]| {
            let h = max / 2.0;
            spec(
                max,
                [
                    (labels[0], trap(0.0, 0.0, 0.0, h)),
                    (labels[1], tri(0.0, h, max)),
                    (labels[2], trap(h, max, max, max)),
                ],
            )
        };
        let battery = even(1.0, ["Low", "Moderate", "High"]);
        Self {
            battery: battery.clone(),
            centrality: even(75.0, ["Near", "Moderate", "Far"]),
            dist_bs: even(150.0, ["Near", "Moderate", "Far"]),
            battery_ch: battery,
            distance_mh: spec(
                100.0,
                [
                    ("Small", trap(0.0, 0.0, 25.0, 50.0)),
                    ("Medium", tri(40.0, 62.0, 85.0)),
                    ("Big", trap(83.0, 90.0, 100.0, 100.0)),
                ],
            ),
            election_centroids: [
                ("Very weak", 10.0),
                ("Weak", 30.0),
                ("Medium", 50.0),
                ("Strong", 70.0),
                ("Very strong", 90.0),
            ]
            .iter()
            .map(|(l, c)| (l.to_string(), *c))
            .collect(),
            relay_centroids: [("Weak", 20.0), ("Medium", 50.0), ("Strong", 80.0)]
                .iter()
                .map(|(l, c)| (l.to_string(), *c))
                .collect(),
            election_rules: ELECTION_TABLE
                .iter()
                .map(|(c, b, d, out)| FuzzyRule::new(&[*c, *b, *d], out))
                .collect(),
            relay_rules: RELAY_TABLE
                .iter()
                .map(|(b, d, out)| FuzzyRule::new(&[*b, *d], out))
                .collect(),
        }
    }
}

impl FuzzyParams {
    /// Election base with inputs ordered (Centrality, Battery, DistBS).
    pub fn election_rule_base(&self, max_energy: f64) -> Result<RuleBase, FuzzyError> {
        RuleBase::new(
            vec![
                self.centrality.build(CENTRALITY, "m", 1.0)?,
                self.battery.build(BATTERY, "J", max_energy)?,
                self.dist_bs.build(DIST_BS, "m", 1.0)?,
            ],
            OutputVariable::new("Election-CH", 0.0, 100.0, self.election_centroids.clone())?,
            self.election_rules.clone(),
        )
    }

    /// Relay base with inputs ordered (BatteryCH, DistanceMH).
    pub fn relay_rule_base(&self, max_energy: f64) -> Result<RuleBase, FuzzyError> {
        RuleBase::new(
            vec![
                self.battery_ch.build(BATTERY_CH, "J", max_energy)?,
                self.distance_mh.build(DISTANCE_MH, "m", 1.0)?,
            ],
            OutputVariable::new("Relay", 0.0, 100.0, self.relay_centroids.clone())?,
            self.relay_rules.clone(),
        )
    }
}

/// Both rule bases, built once per simulation.
#[derive(Debug, Clone)]
pub struct FuzzySystem {
    pub election: RuleBase,
    pub relay: RuleBase,
}

impl FuzzySystem {
    pub fn new(params: &FuzzyParams, max_energy: f64) -> Result<Self, FuzzyError> {
        let election = params.election_rule_base(max_energy)?;
        let relay = params.relay_rule_base(max_energy)?;
        for (name, rb) in [("election", &election), ("relay", &relay)] {
            if !rb.is_total() {
                return Err(FuzzyError::Incomplete(name.to_owned()));
            }
        }
        Ok(Self { election, relay })
    }

    pub fn election_score(&self, battery: f64, centrality: f64, dist_bs: f64) -> Result<f64, FuzzyError> {
        self.election.infer(&[centrality, battery, dist_bs])
    }

    pub fn relay_score(&self, battery_ch: f64, distance_mh: f64) -> Result<f64, FuzzyError> {
        self.relay.infer(&[battery_ch, distance_mh])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rank(rb: &RuleBase, label: &str) -> usize {
        rb.output().label_index(label).unwrap()
    }

    #[test]
    fn election_table_is_total_and_verbatim() {
        let rb = FuzzyParams::default().election_rule_base(1.5).unwrap();
        assert_eq!(rb.rules().len(), 27);
        assert!(rb.is_total());
        let r19 = &rb.rules()[18];
        assert_eq!(r19.antecedents, ["Near", "High", "Near"]);
        assert_eq!(r19.consequent, "Very strong");
    }

    #[test]
    fn election_consequent_non_decreasing_in_battery() {
        let rb = FuzzyParams::default().election_rule_base(1.5).unwrap();
        for c in ["Near", "Moderate", "Far"] {
            for d in ["Near", "Moderate", "Far"] {
                let ranks: Vec<usize> = ["Low", "Moderate", "High"]
                    .iter()
                    .map(|b| rank(&rb, rb.consequent_of(&[c, b, d]).unwrap()))
                    .collect();
                assert!(ranks.windows(2).all(|w| w[0] <= w[1]), "{c}/{d}: {ranks:?}");
            }
        }
    }

    #[test]
    fn relay_table_monotone() {
        let rb = FuzzyParams::default().relay_rule_base(1.5).unwrap();
        assert_eq!(rb.rules().len(), 9);
        assert!(rb.is_total());
        assert_eq!(rb.consequent_of(&["High", "Small"]), Some("Strong"));
        assert_eq!(rb.consequent_of(&["Low", "Big"]), Some("Weak"));
        let dists = ["Small", "Medium", "Big"];
        let batts = ["Low", "Moderate", "High"];
        for b in batts {
            let r: Vec<usize> = dists
                .iter()
                .map(|d| rank(&rb, rb.consequent_of(&[b, *d]).unwrap()))
                .collect();
            assert!(r.windows(2).all(|w| w[0] >= w[1]), "{b}: {r:?}");
        }
        for d in dists {
            let r: Vec<usize> = batts
                .iter()
                .map(|b| rank(&rb, rb.consequent_of(&[*b, d]).unwrap()))
                .collect();
            assert!(r.windows(2).all(|w| w[0] <= w[1]), "{d}: {r:?}");
        }
    }

    #[test]
    fn battery_scales_with_max_energy() {
        let rb = FuzzyParams::default().election_rule_base(1.5).unwrap();
        assert_eq!(rb.inputs()[1].universe(), (0.0, 1.5));
        let battery = &rb.inputs()[1];
        assert_eq!(battery.degree("High", 1.5).unwrap(), 1.0);
        assert_eq!(battery.degree("Moderate", 0.75).unwrap(), 1.0);
        assert_eq!(battery.degree("High", 0.75).unwrap(), 0.0);
    }

    #[test]
    fn big_starts_at_83_m() {
        let rb = FuzzyParams::default().relay_rule_base(1.5).unwrap();
        let dmh = &rb.inputs()[1];
        assert_eq!(dmh.universe(), (0.0, 100.0));
        assert_eq!(dmh.degree("Big", 83.0).unwrap(), 0.0);
        assert!(dmh.degree("Big", 83.5).unwrap() > 0.0);
    }

    #[test]
    fn higher_battery_wins_near_center_and_bs() {
        let sys = FuzzySystem::new(&FuzzyParams::default(), 1.5).unwrap();
        // at the center and on the BS only rule 19 or rule 24 fires
        assert_eq!(sys.election_score(1.5, 0.0, 0.0).unwrap(), 90.0);
        assert_eq!(sys.election_score(0.0, 0.0, 0.0).unwrap(), 10.0);
        let strong = sys.election_score(1.5, 2.0, 10.0).unwrap();
        let weak = sys.election_score(0.1, 2.0, 10.0).unwrap();
        assert!(strong > weak + 50.0, "{strong} vs {weak}");
    }
}

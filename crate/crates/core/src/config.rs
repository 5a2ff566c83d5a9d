//! TOML configuration files. Every key is optional and defaults to the
//! reference scenario; unknown keys are rejected. Radio constants are given
//! in the units they are usually quoted in (nJ, pJ) and converted to joules
//! here.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Deserialize;

use crate::fuzzy::{FuzzyRule, MembershipFunction};
use crate::geometry::Point2D;
use crate::network::ClassEnergies;
use crate::protocol::ProtocolKind;
use crate::rules::{FuzzyParams, VariableSpec};
use crate::sim::SimConfig;

/// A configuration problem, anchored to a line of the source when possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub source_name: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}:{}: {}", self.source_name, line, self.message),
            None => write!(f, "{}: {}", self.source_name, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ConfigFile {
    protocol: String,
    seed: u64,
    rounds: u64,
    nodes: usize,
    clusters: usize,
    compression_ratio: f64,
    field: FieldSection,
    base_station: BaseStationSection,
    radio: RadioSection,
    heterogeneity: HeterogeneitySection,
    leach: LeachSection,
    edeec: EdeecSection,
    fuzzy: FuzzySection,
}

impl Default for ConfigFile {
    fn default() -> Self {
        let d = SimConfig::default();
        Self {
            protocol: d.protocol.name().to_owned(),
            seed: d.seed,
            rounds: d.rounds,
            nodes: d.heterogeneity.nodes,
            clusters: d.clusters,
            compression_ratio: d.compression_ratio,
            field: FieldSection::default(),
            base_station: BaseStationSection::default(),
            radio: RadioSection::default(),
            heterogeneity: HeterogeneitySection::default(),
            leach: LeachSection::default(),
            edeec: EdeecSection::default(),
            fuzzy: FuzzySection::default(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FieldSection {
    width: f64,
    height: f64,
}

impl Default for FieldSection {
    fn default() -> Self {
        Self {
            width: 100.0,
            height: 100.0,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct BaseStationSection {
    x: f64,
    y: f64,
}

impl Default for BaseStationSection {
    fn default() -> Self {
        Self { x: 5.0, y: 95.0 }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RadioSection {
    e_elec_nj: f64,
    eps_fs_pj: f64,
    eps_amp_pj: f64,
    e_da_nj: f64,
    data_bits: u64,
    info_bits: u64,
}

impl Default for RadioSection {
    fn default() -> Self {
        Self {
            e_elec_nj: 50.0,
            eps_fs_pj: 10.0,
            eps_amp_pj: 0.0013,
            e_da_nj: 5.0,
            data_bits: 4000,
            info_bits: 100,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct HeterogeneitySection {
    mf: f64,
    mp: f64,
    e: f64,
    normal_j: f64,
    advanced_j: f64,
    super_j: f64,
}

impl Default for HeterogeneitySection {
    fn default() -> Self {
        let e = ClassEnergies::default();
        Self {
            mf: 1.0,
            mp: 0.6,
            e: 1.0,
            normal_j: e.normal,
            advanced_j: e.advanced,
            super_j: e.super_,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct LeachSection {
    p_opt: f64,
}

impl Default for LeachSection {
    fn default() -> Self {
        Self { p_opt: 0.05 }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct EdeecSection {
    p_opt: f64,
    /// Defaults to advanced_j / normal_j − 1.
    a: Option<f64>,
    /// Defaults to super_j / normal_j − 1.
    b: Option<f64>,
    /// Defaults to `rounds`.
    r_estimate: Option<u64>,
}

impl Default for EdeecSection {
    fn default() -> Self {
        Self {
            p_opt: 0.05,
            a: None,
            b: None,
            r_estimate: None,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FuzzySection {
    battery: Option<VariableSection>,
    centrality: Option<VariableSection>,
    dist_bs: Option<VariableSection>,
    battery_ch: Option<VariableSection>,
    distance_mh: Option<VariableSection>,
    election_centroids: Option<BTreeMap<String, f64>>,
    relay_centroids: Option<BTreeMap<String, f64>>,
    /// Rows of [Centrality, Battery, DistBS, output].
    election_rules: Option<Vec<[String; 4]>>,
    /// Rows of [BatteryCH, DistanceMH, output].
    relay_rules: Option<Vec<[String; 3]>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VariableSection {
    max: Option<f64>,
    terms: Vec<TermSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermSection {
    label: String,
    shape: String,
    points: Vec<f64>,
}

/// First line defining `key`, either as `key = ...` or as a table header
/// whose last path segment is `key`.
fn locate(src: &str, key: &str) -> Option<usize> {
    src.lines()
        .position(|l| {
            let t = l.trim();
            if let Some(header) = t.strip_prefix('[') {
                let name = header.trim_matches(|c| c == '[' || c == ']').trim();
                name == key || name.rsplit('.').next() == Some(key)
            } else {
                t.strip_prefix(key)
                    .is_some_and(|rest| rest.trim_start().starts_with('='))
            }
        })
        .map(|i| i + 1)
}

fn unknown_field(message: &str) -> Option<&str> {
    let rest = message.strip_prefix("unknown field `")?;
    rest.split('`').next()
}

struct Ctx<'a> {
    name: &'a str,
    src: &'a str,
}

impl Ctx<'_> {
    fn err(&self, key: &str, message: impl fmt::Display) -> ConfigError {
        ConfigError {
            source_name: self.name.to_owned(),
            line: locate(self.src, key),
            message: format!("{key}: {message}"),
        }
    }
}

fn variable(ctx: &Ctx, key: &str, section: Option<VariableSection>, default: &VariableSpec) -> Result<VariableSpec, ConfigError> {
    let Some(section) = section else {
        return Ok(default.clone());
    };
    let terms = section
        .terms
        .into_iter()
        .map(|t| {
            let mf = match (t.shape.as_str(), t.points.as_slice()) {
                ("triangular", &[a, b, c]) => MembershipFunction::triangular(a, b, c),
                ("trapezoidal", &[a, b, c, d]) => MembershipFunction::trapezoidal(a, b, c, d),
                (shape, pts) => {
                    return Err(ctx.err(
                        key,
                        format!(
                            "term `{}`: shape `{shape}` with {} points (need triangular/3 or trapezoidal/4)",
                            t.label,
                            pts.len()
                        ),
                    ))
                }
            }
            .map_err(|e| ctx.err(key, format!("term `{}`: {e}", t.label)))?;
            Ok((t.label, mf))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VariableSpec {
        max: section.max.unwrap_or(default.max),
        terms,
    })
}

fn centroids(
    ctx: &Ctx,
    key: &str,
    given: Option<BTreeMap<String, f64>>,
    default: &[(String, f64)],
) -> Result<Vec<(String, f64)>, ConfigError> {
    let Some(mut given) = given else {
        return Ok(default.to_vec());
    };
    // keep the semantic order of the defaults; extra labels go last
    let mut out = Vec::new();
    for (label, _) in default {
        if let Some(v) = given.remove(label) {
            out.push((label.clone(), v));
        }
    }
    out.extend(given);
    if out.is_empty() {
        return Err(ctx.err(key, "no centroids given"));
    }
    Ok(out)
}

/// Parses configuration text. `source_name` is used in diagnostics.
pub fn parse_config(src: &str, source_name: &str) -> Result<SimConfig, ConfigError> {
    let ctx = Ctx { name: source_name, src };
    let file: ConfigFile = toml::from_str(src).map_err(|e| ConfigError {
        source_name: source_name.to_owned(),
        line: unknown_field(e.message())
            .and_then(|k| locate(src, k))
            .or_else(|| e.span().map(|s| src[..s.start.min(src.len())].lines().count().max(1))),
        message: e.message().to_owned(),
    })?;

    let protocol: ProtocolKind = file.protocol.parse().map_err(|e| ctx.err("protocol", e))?;
    let h = &file.heterogeneity;
    let energies = ClassEnergies {
        normal: h.normal_j,
        advanced: h.advanced_j,
        super_: h.super_j,
    };
    let defaults = FuzzyParams::default();
    let fz = file.fuzzy;
    let election_rules = match fz.election_rules {
        Some(rows) => rows
            .iter()
            .map(|[c, b, d, out]| FuzzyRule::new(&[c, b, d], out))
            .collect(),
        None => defaults.election_rules.clone(),
    };
    let relay_rules = match fz.relay_rules {
        Some(rows) => rows.iter().map(|[b, d, out]| FuzzyRule::new(&[b, d], out)).collect(),
        None => defaults.relay_rules.clone(),
    };
    let fuzzy = FuzzyParams {
        battery: variable(&ctx, "battery", fz.battery, &defaults.battery)?,
        centrality: variable(&ctx, "centrality", fz.centrality, &defaults.centrality)?,
        dist_bs: variable(&ctx, "dist_bs", fz.dist_bs, &defaults.dist_bs)?,
        battery_ch: variable(&ctx, "battery_ch", fz.battery_ch, &defaults.battery_ch)?,
        distance_mh: variable(&ctx, "distance_mh", fz.distance_mh, &defaults.distance_mh)?,
        election_centroids: centroids(&ctx, "election_centroids", fz.election_centroids, &defaults.election_centroids)?,
        relay_centroids: centroids(&ctx, "relay_centroids", fz.relay_centroids, &defaults.relay_centroids)?,
        election_rules,
        relay_rules,
    };

    let cfg = SimConfig {
        protocol,
        seed: file.seed,
        rounds: file.rounds,
        clusters: file.clusters,
        compression_ratio: file.compression_ratio,
        field: crate::network::Field {
            width: file.field.width,
            height: file.field.height,
        },
        bs: crate::network::BaseStation {
            position: Point2D::new(file.base_station.x, file.base_station.y),
        },
        radio: crate::radio::RadioParams {
            e_elec: file.radio.e_elec_nj / 1e9,
            eps_fs: file.radio.eps_fs_pj / 1e12,
            eps_amp: file.radio.eps_amp_pj / 1e12,
            e_da: file.radio.e_da_nj / 1e9,
            data_bits: file.radio.data_bits,
            info_bits: file.radio.info_bits,
        },
        heterogeneity: crate::network::HeterogeneityConfig {
            nodes: file.nodes,
            mf: h.mf,
            mp: h.mp,
            e: h.e,
            energies,
        },
        leach: crate::protocol::LeachParams { p_opt: file.leach.p_opt },
        edeec: crate::protocol::EdeecParams {
            p_opt: file.edeec.p_opt,
            mf: h.mf,
            mp: h.mp,
            a: file.edeec.a.unwrap_or(h.advanced_j / h.normal_j - 1.0),
            b: file.edeec.b.unwrap_or(h.super_j / h.normal_j - 1.0),
            r_estimate: file.edeec.r_estimate.unwrap_or(file.rounds),
        },
        fuzzy,
    };
    cfg.validate().map_err(|e| {
        use crate::sim::SimError::*;
        let key = match &e {
            ZeroRounds => "rounds",
            ZeroClusters => "clusters",
            CompressionRatio(_) => "compression_ratio",
            POpt(_) => "p_opt",
            EdeecParams => "edeec",
            BaseStation => "base_station",
            Radio(_) => "radio",
            Network(crate::network::NetworkError::Field(..)) => "field",
            Network(_) => "heterogeneity",
            Fuzzy(_) => "fuzzy",
            Round { .. } | Ledger { .. } => "",
        };
        ctx.err(key, e)
    })?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<SimConfig, ConfigError> {
    let name = path.display().to_string();
    let src = std::fs::read_to_string(path).map_err(|e| ConfigError {
        source_name: name.clone(),
        line: None,
        message: e.to_string(),
    })?;
    parse_config(&src, &name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_reference_scenario() {
        let cfg = parse_config("", "empty").unwrap();
        let d = SimConfig::default();
        assert_eq!(cfg.rounds, d.rounds);
        assert_eq!(cfg.heterogeneity, d.heterogeneity);
        assert_eq!(cfg.edeec, d.edeec);
        assert_eq!(cfg.fuzzy, d.fuzzy);
        assert_eq!(cfg.radio, d.radio);
    }

    #[test]
    fn unknown_key_rejected_with_line() {
        let err = parse_config("rounds = 10\n\n[radio]\nbogus = 1\n", "x.cfg").unwrap_err();
        assert_eq!(err.line, Some(4), "{err}");
        assert!(err.to_string().starts_with("x.cfg:4:"));
    }

    #[test]
    fn validation_error_points_at_key() {
        let err = parse_config("seed = 3\nrounds = 0\n", "x.cfg").unwrap_err();
        assert_eq!(err.line, Some(2));
        assert!(err.message.contains("rounds"));
    }

    #[test]
    fn unknown_protocol() {
        let err = parse_config("protocol = \"sep\"\n", "x.cfg").unwrap_err();
        assert_eq!(err.line, Some(1));
    }

    #[test]
    fn membership_override() {
        let src = r#"
[fuzzy.distance_mh]
terms = [
  { label = "Small", shape = "trapezoidal", points = [0, 0, 20, 45] },
  { label = "Medium", shape = "triangular", points = [35, 60, 85] },
  { label = "Big", shape = "trapezoidal", points = [80, 90, 100, 100] },
]
"#;
        let cfg = parse_config(src, "x").unwrap();
        assert_eq!(
            cfg.fuzzy.distance_mh.terms[0].1,
            MembershipFunction::Trapezoidal { a: 0.0, b: 0.0, c: 20.0, d: 45.0 }
        );
    }

    #[test]
    fn bad_override_is_rejected() {
        let src = r#"
[fuzzy.centrality]
terms = [ { label = "Near", shape = "triangular", points = [0, 5] } ]
"#;
        let err = parse_config(src, "x").unwrap_err();
        assert_eq!(err.line, Some(2));
        // labels no longer match the rules
        let src = r#"
[fuzzy.centrality]
terms = [ { label = "Close", shape = "trapezoidal", points = [0, 0, 75, 75] } ]
"#;
        assert!(parse_config(src, "x").is_err());
    }

    #[test]
    fn relay_rule_override() {
        let mut rows = String::from("[fuzzy]\nrelay_rules = [\n");
        for b in ["Low", "Moderate", "High"] {
            for d in ["Small", "Medium", "Big"] {
                rows.push_str(&format!("  [\"{b}\", \"{d}\", \"Medium\"],\n"));
            }
        }
        rows.push_str("]\n");
        let cfg = parse_config(&rows, "x").unwrap();
        assert!(cfg.fuzzy.relay_rules.iter().all(|r| r.consequent == "Medium"));

        let partial = "[fuzzy]\nrelay_rules = [[\"Low\", \"Small\", \"Weak\"]]\n";
        let err = parse_config(partial, "x").unwrap_err();
        assert!(err.message.contains("does not cover"), "{err}");
    }
}

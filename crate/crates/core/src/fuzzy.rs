//! Mamdani-style fuzzy inference with product inference and center-average
//! defuzzification.
//!
//! A [`RuleBase`] is built once from declarative parts (input variables,
//! output centroids and rules) and is immutable afterwards, so it can be
//! shared between threads freely.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FuzzyError {
    #[error("membership function breakpoints must be finite and non-decreasing: {0:?}")]
    BadBreakpoints(Vec<f64>),
    #[error("variable `{0}`: universe [{1}, {2}] is empty or not finite")]
    BadUniverse(String, f64, f64),
    #[error("variable `{variable}`: duplicate label `{label}`")]
    DuplicateLabel { variable: String, label: String },
    #[error("variable `{variable}`: no set covers x = {x}")]
    CoverageGap { variable: String, x: f64 },
    #[error("variable `{variable}` has no label `{label}`")]
    UnknownLabel { variable: String, label: String },
    #[error("rule {rule}: expected {expected} antecedents, got {got}")]
    Arity { rule: usize, expected: usize, got: usize },
    #[error("expected {expected} inputs, got {got}")]
    InputCount { expected: usize, got: usize },
    #[error("input {0} is not finite")]
    NonFiniteInput(usize),
    #[error("output centroid {label} = {value} lies outside the output universe")]
    CentroidOutOfRange { label: String, value: f64 },
    #[error("rule base `{0}` does not cover every combination of input labels")]
    Incomplete(String),
    #[error("no rule fired for inputs {0:?}")]
    NoRuleFired(Vec<f64>),
    #[error("surface resolution must be at least 2, got {0}")]
    Resolution(usize),
    #[error("surface needs exactly two free inputs; base has {inputs} inputs and {fixed} fixed")]
    SurfaceShape { inputs: usize, fixed: usize },
}

/// Piecewise-linear membership function over a variable's physical unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MembershipFunction {
    Triangular { a: f64, b: f64, c: f64 },
    Trapezoidal { a: f64, b: f64, c: f64, d: f64 },
}

impl MembershipFunction {
    pub fn triangular(a: f64, b: f64, c: f64) -> Result<Self, FuzzyError> {
        check_breakpoints(&[a, b, c])?;
        Ok(Self::Triangular { a, b, c })
    }

    pub fn trapezoidal(a: f64, b: f64, c: f64, d: f64) -> Result<Self, FuzzyError> {
        check_breakpoints(&[a, b, c, d])?;
        Ok(Self::Trapezoidal { a, b, c, d })
    }

    /// Trapezoid view: a triangle is a trapezoid whose plateau is a point.
    fn corners(&self) -> (f64, f64, f64, f64) {
        match *self {
            Self::Triangular { a, b, c } => (a, b, b, c),
            Self::Trapezoidal { a, b, c, d } => (a, b, c, d),
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Self::Triangular { a, b, c } => vec![a, b, c],
            Self::Trapezoidal { a, b, c, d } => vec![a, b, c, d],
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            Self::Triangular { a, b, c } => Self::Triangular {
                a: a * factor,
                b: b * factor,
                c: c * factor,
            },
            Self::Trapezoidal { a, b, c, d } => Self::Trapezoidal {
                a: a * factor,
                b: b * factor,
                c: c * factor,
                d: d * factor,
            },
        }
    }

    /// Degree of membership of `x`. Out-of-support values give 0.
    pub fn degree(&self, x: f64) -> f64 {
        let (a, b, c, d) = self.corners();
        if (b..=c).contains(&x) {
            1.0
        } else if x <= a || x >= d {
            0.0
        } else if x < b {
            (x - a) / (b - a)
        } else {
            (d - x) / (d - c)
        }
    }
}

fn check_breakpoints(points: &[f64]) -> Result<(), FuzzyError> {
    let ok = points.iter().all(|p| p.is_finite()) && points.windows(2).all(|w| w[0] <= w[1]);
    if ok {
        Ok(())
    } else {
        Err(FuzzyError::BadBreakpoints(points.to_vec()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinguisticVariable {
    name: String,
    unit: String,
    min: f64,
    max: f64,
    terms: Vec<(String, MembershipFunction)>,
}

impl LinguisticVariable {
    /// Builds a variable and checks label uniqueness and full coverage of the
    /// universe. Term order is the semantic order (lowest first).
    pub fn new(
        name: impl Into<String>,
        unit: impl Into<String>,
        min: f64,
        max: f64,
        terms: Vec<(String, MembershipFunction)>,
    ) -> Result<Self, FuzzyError> {
        let name = name.into();
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(FuzzyError::BadUniverse(name, min, max));
        }
        for (i, (label, mf)) in terms.iter().enumerate() {
            check_breakpoints(&mf.breakpoints())?;
            if terms[..i].iter().any(|(l, _)| l == label) {
                return Err(FuzzyError::DuplicateLabel {
                    variable: name,
                    label: label.clone(),
                });
            }
        }
        let var = Self {
            name,
            unit: unit.into(),
            min,
            max,
            terms,
        };
        var.check_coverage()?;
        Ok(var)
    }

    // Coverage is constant on every open interval between consecutive
    // breakpoints, so breakpoints plus midpoints decide it exactly.
    fn check_coverage(&self) -> Result<(), FuzzyError> {
        let mut marks: Vec<f64> = self
            .terms
            .iter()
            .flat_map(|(_, mf)| mf.breakpoints())
            .filter(|p| *p > self.min && *p < self.max)
            .collect();
        marks.push(self.min);
        marks.push(self.max);
        marks.sort_by(f64::total_cmp);
        marks.dedup();
        let mids: Vec<f64> = marks.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        for x in marks.into_iter().chain(mids) {
            if self.terms.iter().all(|(_, mf)| mf.degree(x) <= 0.0) {
                return Err(FuzzyError::CoverageGap {
                    variable: self.name.clone(),
                    x,
                });
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn universe(&self) -> (f64, f64) {
        (self.min, self.max)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(|(l, _)| l.as_str())
    }

    pub fn terms(&self) -> &[(String, MembershipFunction)] {
        &self.terms
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.terms.iter().position(|(l, _)| l == label)
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.min, self.max)
    }

    /// Degree of `label` at `x` (clamped to the universe).
    pub fn degree(&self, label: &str, x: f64) -> Result<f64, FuzzyError> {
        let i = self.label_index(label).ok_or_else(|| FuzzyError::UnknownLabel {
            variable: self.name.clone(),
            label: label.to_owned(),
        })?;
        Ok(self.terms[i].1.degree(self.clamp(x)))
    }
}

/// Output variable described only by per-label representative centroids.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputVariable {
    name: String,
    min: f64,
    max: f64,
    centroids: Vec<(String, f64)>,
}

impl OutputVariable {
    pub fn new(
        name: impl Into<String>,
        min: f64,
        max: f64,
        centroids: Vec<(String, f64)>,
    ) -> Result<Self, FuzzyError> {
        let name = name.into();
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(FuzzyError::BadUniverse(name, min, max));
        }
        for (i, (label, value)) in centroids.iter().enumerate() {
            if !(min..=max).contains(value) {
                return Err(FuzzyError::CentroidOutOfRange {
                    label: label.clone(),
                    value: *value,
                });
            }
            if centroids[..i].iter().any(|(l, _)| l == label) {
                return Err(FuzzyError::DuplicateLabel {
                    variable: name,
                    label: label.clone(),
                });
            }
        }
        Ok(Self {
            name,
            min,
            max,
            centroids,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn universe(&self) -> (f64, f64) {
        (self.min, self.max)
    }

    pub fn centroids(&self) -> &[(String, f64)] {
        &self.centroids
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.centroids.iter().position(|(l, _)| l == label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzyRule {
    pub antecedents: Vec<String>,
    pub consequent: String,
}

impl FuzzyRule {
    pub fn new<S: AsRef<str>>(antecedents: &[S], consequent: &str) -> Self {
        Self {
            antecedents: antecedents.iter().map(|s| s.as_ref().to_owned()).collect(),
            consequent: consequent.to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct CompiledRule {
    antecedents: Vec<usize>,
    consequent: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleBase {
    inputs: Vec<LinguisticVariable>,
    output: OutputVariable,
    rules: Vec<FuzzyRule>,
    compiled: Vec<CompiledRule>,
}

impl RuleBase {
    pub fn new(
        inputs: Vec<LinguisticVariable>,
        output: OutputVariable,
        rules: Vec<FuzzyRule>,
    ) -> Result<Self, FuzzyError> {
        let mut compiled = Vec::with_capacity(rules.len());
        for (i, rule) in rules.iter().enumerate() {
            if rule.antecedents.len() != inputs.len() {
                return Err(FuzzyError::Arity {
                    rule: i + 1,
                    expected: inputs.len(),
                    got: rule.antecedents.len(),
                });
            }
            let antecedents = inputs
                .iter()
                .zip(&rule.antecedents)
                .map(|(var, label)| {
                    var.label_index(label).ok_or_else(|| FuzzyError::UnknownLabel {
                        variable: var.name.clone(),
                        label: label.clone(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let consequent =
                output
                    .label_index(&rule.consequent)
                    .ok_or_else(|| FuzzyError::UnknownLabel {
                        variable: output.name.clone(),
                        label: rule.consequent.clone(),
                    })?;
            compiled.push(CompiledRule {
                antecedents,
                consequent,
            });
        }
        Ok(Self {
            inputs,
            output,
            rules,
            compiled,
        })
    }

    pub fn inputs(&self) -> &[LinguisticVariable] {
        &self.inputs
    }

    pub fn output(&self) -> &OutputVariable {
        &self.output
    }

    pub fn rules(&self) -> &[FuzzyRule] {
        &self.rules
    }

    pub fn input_index(&self, name: &str) -> Option<usize> {
        self.inputs.iter().position(|v| v.name == name)
    }

    /// True when every combination of input labels has exactly one rule.
    pub fn is_total(&self) -> bool {
        let expected: usize = self.inputs.iter().map(|v| v.terms.len()).product();
        let mut seen: Vec<&[usize]> = self.compiled.iter().map(|r| &r.antecedents[..]).collect();
        seen.sort();
        seen.dedup();
        seen.len() == expected && self.compiled.len() == expected
    }

    /// Consequent label of the rule with exactly these antecedent labels.
    pub fn consequent_of<S: AsRef<str>>(&self, antecedents: &[S]) -> Option<&str> {
        self.rules
            .iter()
            .find(|r| {
                r.antecedents.len() == antecedents.len()
                    && r.antecedents.iter().zip(antecedents).all(|(a, b)| a == b.as_ref())
            })
            .map(|r| r.consequent.as_str())
    }

    fn check_inputs(&self, inputs: &[f64]) -> Result<(), FuzzyError> {
        if inputs.len() != self.inputs.len() {
            return Err(FuzzyError::InputCount {
                expected: self.inputs.len(),
                got: inputs.len(),
            });
        }
        if let Some(i) = inputs.iter().position(|x| !x.is_finite()) {
            return Err(FuzzyError::NonFiniteInput(i));
        }
        Ok(())
    }

    /// Firing strength of an arbitrary rule: the product of its antecedent
    /// degrees at the (clamped) inputs.
    pub fn fire_rule(&self, rule: &FuzzyRule, inputs: &[f64]) -> Result<f64, FuzzyError> {
        self.check_inputs(inputs)?;
        if rule.antecedents.len() != self.inputs.len() {
            return Err(FuzzyError::Arity {
                rule: 0,
                expected: self.inputs.len(),
                got: rule.antecedents.len(),
            });
        }
        self.inputs
            .iter()
            .zip(&rule.antecedents)
            .zip(inputs)
            .try_fold(1.0, |acc, ((var, label), &x)| Ok(acc * var.degree(label, x)?))
    }

    /// Firing strength of every rule, in rule order.
    pub fn strengths(&self, inputs: &[f64]) -> Result<Vec<f64>, FuzzyError> {
        self.check_inputs(inputs)?;
        let degrees: Vec<Vec<f64>> = self
            .inputs
            .iter()
            .zip(inputs)
            .map(|(var, &x)| {
                let x = var.clamp(x);
                var.terms.iter().map(|(_, mf)| mf.degree(x)).collect()
            })
            .collect();
        Ok(self
            .compiled
            .iter()
            .map(|rule| {
                rule.antecedents
                    .iter()
                    .enumerate()
                    .map(|(v, &t)| degrees[v][t])
                    .product()
            })
            .collect())
    }

    /// Crisp output: Σ strength·centroid / Σ strength over all rules.
    pub fn infer(&self, inputs: &[f64]) -> Result<f64, FuzzyError> {
        let strengths = self.strengths(inputs)?;
        let (num, den) = strengths.iter().zip(&self.compiled).fold(
            (0.0, 0.0),
            |(num, den), (&s, rule)| (num + s * self.output.centroids[rule.consequent].1, den + s),
        );
        if den <= 0.0 {
            return Err(FuzzyError::NoRuleFired(inputs.to_vec()));
        }
        Ok(num / den)
    }

    /// Evaluates `infer` on a `resolution × resolution` lattice over the two
    /// free inputs. Bases with more than two inputs need the others pinned
    /// through `fixed` as `(input index, value)`.
    pub fn surface_grid(
        &self,
        resolution: usize,
        fixed: &[(usize, f64)],
    ) -> Result<Vec<SurfaceRow>, FuzzyError> {
        if resolution < 2 {
            return Err(FuzzyError::Resolution(resolution));
        }
        let free: Vec<usize> = (0..self.inputs.len())
            .filter(|i| !fixed.iter().any(|(f, _)| f == i))
            .collect();
        if free.len() != 2 || fixed.len() + 2 != self.inputs.len() {
            return Err(FuzzyError::SurfaceShape {
                inputs: self.inputs.len(),
                fixed: fixed.len(),
            });
        }
        let axis = |v: usize| -> Vec<f64> {
            let (lo, hi) = self.inputs[v].universe();
            (0..resolution)
                .map(|i| lo + (hi - lo) * i as f64 / (resolution - 1) as f64)
                .collect()
        };
        let (xs, ys) = (axis(free[0]), axis(free[1]));
        let mut point = vec![0.0; self.inputs.len()];
        for &(i, v) in fixed {
            point[i] = v;
        }
        let mut rows = Vec::with_capacity(resolution * resolution);
        for &x1 in &xs {
            for &x2 in &ys {
                point[free[0]] = x1;
                point[free[1]] = x2;
                rows.push(SurfaceRow {
                    x1,
                    x2,
                    output: self.infer(&point)?,
                });
            }
        }
        Ok(rows)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceRow {
    pub x1: f64,
    pub x2: f64,
    pub output: f64,
}

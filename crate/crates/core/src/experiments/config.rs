//! Experiment configuration: a JSON document with a `schema_version`.
//!
//! Random inputs are drawn from independent ChaCha20 streams of `seed`:
//! stream 0 builds the unitary (Haar spectrum or Haar eigenbasis), stream
//! `1 + i` builds operator `i`, and [`PROBE_STREAM`] draws the unit vectors
//! used for weak errors. Adding an operator never changes the others.

use std::f64::consts::TAU;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure_model::{MeasureVector, RankOneChainSpec, SpectralMeasure, TrigPoly};
use crate::num_core::random::{gaussian_vector, haar_unitary_with, random_low_rank, random_unit_vector};
use crate::num_core::{haar_unitary, stream_rng, ComplexMatrix, ComplexVector};
use crate::spectral::{Partition, UnitaryOperator};

pub const SCHEMA_VERSION: u32 = 1;
/// Stream for the probe vectors `x`, `y`.
pub const PROBE_STREAM: u64 = 1 << 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    MeanErgodic,
    Entangled,
    Adjoint,
    PowerChain,
    Furstenberg,
    KdynTrace,
    Recurrence,
    MeasureGn,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::MeanErgodic,
        ExperimentKind::Entangled,
        ExperimentKind::Adjoint,
        ExperimentKind::PowerChain,
        ExperimentKind::Furstenberg,
        ExperimentKind::KdynTrace,
        ExperimentKind::Recurrence,
        ExperimentKind::MeasureGn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::MeanErgodic => "mean-ergodic",
            ExperimentKind::Entangled => "entangled",
            ExperimentKind::Adjoint => "adjoint",
            ExperimentKind::PowerChain => "power-chain",
            ExperimentKind::Furstenberg => "furstenberg",
            ExperimentKind::KdynTrace => "kdyn-trace",
            ExperimentKind::Recurrence => "recurrence",
            ExperimentKind::MeasureGn => "measure-gn",
        }
    }
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisSpec {
    #[default]
    Identity,
    Haar,
}

/// Where the unitary's spectrum comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpectrumSpec {
    /// Eigenvalue angles in radians, or in turns (`angle = 2π · turn`).
    Explicit {
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        angles: Vec<f64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        turns: Vec<f64>,
        /// Defaults to all ones.
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        multiplicities: Vec<usize>,
        #[serde(default)]
        basis: BasisSpec,
    },
    /// A Haar-random unitary of the configured dimension.
    Haar,
}

/// One interleaved operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OperatorSpec {
    /// A Haar unitary.
    Haar,
    /// Gaussian factors of the given rank (full rank by default), scaled to
    /// operator norm one.
    Gaussian {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rank: Option<usize>,
    },
    /// `u v*`; missing vectors are drawn as random unit vectors.
    RankOne {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        u: Option<Vec<[f64; 2]>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v: Option<Vec<[f64; 2]>>,
    },
    /// Row-major entries as `[re, im]` pairs.
    Explicit { entries: Vec<Vec<[f64; 2]>> },
}

/// Measure on the circle. Density terms `[k, re, im]` are Fourier
/// coefficients in units of `1/2π`: the density is
/// `h(θ) = (1/2π) Σ c_k e^{ikθ}`, so `μ̂(−k)` picks up exactly `c_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    /// `[angle, mass]` pairs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub density: Vec<(i64, f64, f64)>,
}

/// Vector in `L²(μ)`: atom values `[re, im]` and polynomial terms
/// `[k, re, im]` for the continuous part.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureVectorSpec {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub poly: Vec<(i64, f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainTermSpec {
    pub u: MeasureVectorSpec,
    pub v: MeasureVectorSpec,
}

/// `A = c · ΩΩ* + Σ u_t v_t*` in the weak-mixing measure model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub omega_weight: [f64; 2],
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<ChainTermSpec>,
}

/// Geometric schedule `start, start·factor, …` (`count` points), or an
/// explicit strictly increasing list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    #[serde(default = "default_start")]
    pub start: usize,
    #[serde(default = "default_factor")]
    pub factor: usize,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<usize>>,
}

fn default_start() -> usize {
    8
}

fn default_factor() -> usize {
    2
}

fn default_count() -> usize {
    9
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        Self {
            start: default_start(),
            factor: default_factor(),
            count: default_count(),
            points: None,
        }
    }
}

impl ScheduleSpec {
    pub fn resolve(&self) -> Result<Vec<usize>> {
        let points = match &self.points {
            Some(p) => p.clone(),
            None => {
                if self.start == 0 {
                    return Err(config_error("schedule.start", "must be at least 1"));
                }
                if self.factor < 2 && self.count > 1 {
                    return Err(config_error("schedule.factor", "must be at least 2"));
                }
                let mut out = Vec::with_capacity(self.count);
                let mut n = self.start;
                for i in 0..self.count {
                    out.push(n);
                    if i + 1 < self.count {
                        n = n
                            .checked_mul(self.factor)
                            .ok_or_else(|| config_error("schedule", "schedule overflows"))?;
                    }
                }
                out
            }
        };
        if points.first() == Some(&0) {
            return Err(config_error("schedule.points", "entries must be at least 1"));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config_error("schedule.points", "must be strictly increasing"));
        }
        Ok(points)
    }
}

fn default_tolerance() -> f64 {
    1e-9
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    /// Number of points of the cyclic model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub operators: Vec<OperatorSpec>,
    /// 1-based block labels, e.g. `[1, 2, 1, 2]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub measures: Vec<MeasureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainSpec>,
    #[serde(default)]
    pub schedule: ScheduleSpec,
    /// Slack allowed in the `strong_error ≤ bound` check.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Record wall-clock seconds. Off by default so reports are
    /// byte-reproducible.
    #[serde(default, skip_serializing_if = "is_false")]
    pub timing: bool,
}

pub(crate) fn config_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

/// Re-labels numerical errors raised while resolving a config field.
fn at(path: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Budget { .. } | Error::Config { .. } | Error::Io(_) => e,
        other => config_error(path, other.to_string()),
    }
}

fn complex(pair: &[f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

fn complex_vector(path: &str, values: &[[f64; 2]], dim: usize) -> Result<ComplexVector> {
    if values.len() != dim {
        return Err(config_error(path, format!("expected {dim} entries, got {}", values.len())));
    }
    Ok(ComplexVector::from(values.iter().map(complex).collect::<Vec<_>>()))
}

fn trig_poly(terms: &[(i64, f64, f64)], scale: f64) -> TrigPoly {
    let terms: Vec<(i64, Complex64)> = terms
        .iter()
        .map(|&(k, re, im)| (k, Complex64::new(re, im) * scale))
        .collect();
    TrigPoly::from_terms(&terms)
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| {
            config_error(
                format!("line {} column {}", e.line(), e.column()),
                e.to_string(),
            )
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            config_error(path.display().to_string(), format!("cannot read config: {e}"))
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    /// Structural checks that need no numerical work.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(config_error(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(config_error("tolerance", "must be finite and nonnegative"));
        }
        self.schedule.resolve()?;
        let need = |field: &str, present: bool| {
            if present {
                Ok(())
            } else {
                Err(config_error(field, format!("required for kind {}", self.kind)))
            }
        };
        let ops = self.operators.len();
        match self.kind {
            ExperimentKind::MeanErgodic => {}
            ExperimentKind::Entangled => {
                need("partition", self.partition.is_some())?;
                let partition = self.partition()?;
                if ops + 1 != partition.slots() {
                    return Err(config_error(
                        "operators",
                        format!("partition has {} slots, so {} operators are needed", partition.slots(), partition.slots() - 1),
                    ));
                }
            }
            ExperimentKind::Adjoint => need("operators", ops == 1)?,
            ExperimentKind::PowerChain => {
                need("exponents", self.exponents.is_some())?;
                let e = self.exponents.as_ref().unwrap();
                if e.is_empty() || e.contains(&0) {
                    return Err(config_error("exponents", "must be a nonempty list of nonzero integers"));
                }
                if ops + 1 != e.len() {
                    return Err(config_error("operators", format!("{} exponents need {} operators", e.len(), e.len() - 1)));
                }
            }
            ExperimentKind::Furstenberg => need("p", self.p.is_some())?,
            ExperimentKind::KdynTrace => need("operators", ops == 2)?,
            ExperimentKind::Recurrence => {
                need("measures", self.measures.len() == 1)?;
                need("chain", self.chain.is_some())?;
                need("exponents", self.exponents.is_some())?;
            }
            ExperimentKind::MeasureGn => {
                need("measures", !self.measures.is_empty())?;
                need("exponents", self.exponents.is_some())?;
                if self.exponents.as_ref().unwrap().len() != self.measures.len() {
                    return Err(config_error("exponents", "need one exponent per measure"));
                }
            }
        }
        let uses_unitary = matches!(
            self.kind,
            ExperimentKind::MeanErgodic
                | ExperimentKind::Entangled
                | ExperimentKind::Adjoint
                | ExperimentKind::PowerChain
                | ExperimentKind::KdynTrace
        );
        if uses_unitary && self.spectrum.is_none() && self.dimension.is_none() {
            return Err(config_error("spectrum", "give a spectrum or a dimension for a Haar unitary"));
        }
        Ok(())
    }

    pub fn schedule(&self) -> Result<Vec<usize>> {
        self.schedule.resolve()
    }

    pub fn partition(&self) -> Result<Partition> {
        let labels = self
            .partition
            .clone()
            .ok_or_else(|| config_error("partition", "missing"))?;
        Partition::new(labels).map_err(at("partition"))
    }

    pub fn exponents(&self) -> Result<Vec<i64>> {
        self.exponents.clone().ok_or_else(|| config_error("exponents", "missing"))
    }

    pub fn build_unitary(&self) -> Result<UnitaryOperator> {
        let spec = self.spectrum.clone().unwrap_or(SpectrumSpec::Haar);
        match spec {
            SpectrumSpec::Haar => {
                let d = self
                    .dimension
                    .ok_or_else(|| config_error("dimension", "required for a Haar spectrum"))?;
                if d == 0 {
                    return Err(config_error("dimension", "must be at least 1"));
                }
                let m = haar_unitary(d, self.seed).map_err(at("spectrum"))?;
                UnitaryOperator::from_matrix(m).map_err(at("spectrum"))
            }
            SpectrumSpec::Explicit {
                angles,
                turns,
                multiplicities,
                basis,
            } => {
                let points: Vec<f64> = match (angles.is_empty(), turns.is_empty()) {
                    (false, true) => angles,
                    (true, false) => turns.iter().map(|t| TAU * t).collect(),
                    _ => {
                        return Err(config_error(
                            "spectrum",
                            "give exactly one of `angles` or `turns`",
                        ))
                    }
                };
                let mult = if multiplicities.is_empty() {
                    vec![1; points.len()]
                } else {
                    multiplicities
                };
                if mult.len() != points.len() || mult.contains(&0) {
                    return Err(config_error(
                        "spectrum.multiplicities",
                        "need one positive multiplicity per eigenvalue",
                    ));
                }
                let expanded: Vec<f64> = points
                    .iter()
                    .zip(&mult)
                    .flat_map(|(&a, &m)| std::iter::repeat_n(a, m))
                    .collect();
                if let Some(d) = self.dimension {
                    if d != expanded.len() {
                        return Err(config_error(
                            "dimension",
                            format!("spectrum has total multiplicity {}, dimension is {d}", expanded.len()),
                        ));
                    }
                }
                match basis {
                    BasisSpec::Identity => UnitaryOperator::diagonal(&expanded),
                    BasisSpec::Haar => {
                        let v = haar_unitary(expanded.len(), self.seed).map_err(at("spectrum.basis"))?;
                        UnitaryOperator::conjugated(&v, &expanded)
                    }
                }
                .map_err(at("spectrum"))
            }
        }
    }

    pub fn build_operators(&self, dim: usize) -> Result<Vec<ComplexMatrix>> {
        self.operators
            .iter()
            .enumerate()
            .map(|(i, spec)| build_operator(spec, dim, self.seed, i))
            .collect()
    }

    /// Unit probe vectors `(x, y)`.
    pub fn probes(&self, dim: usize) -> (ComplexVector, ComplexVector) {
        let mut rng = stream_rng(self.seed, PROBE_STREAM);
        let x = random_unit_vector(dim, &mut rng);
        let y = random_unit_vector(dim, &mut rng);
        (x, y)
    }

    /// A random diagonal operator for the cyclic model (operator stream 0).
    pub fn random_diagonal(&self, p: usize) -> ComplexMatrix {
        let mut rng = stream_rng(self.seed, 1);
        ComplexMatrix::from_diagonal(gaussian_vector(p, &mut rng).as_slice())
    }

    pub fn build_measures(&self) -> Result<Vec<SpectralMeasure>> {
        self.measures
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let atoms = m.atoms.iter().map(|a| (a[0], a[1])).collect();
                SpectralMeasure::new(atoms, trig_poly(&m.density, 1.0 / TAU))
                    .map_err(|e| config_error(format!("measures[{i}]"), e.to_string()))
            })
            .collect()
    }

    pub fn build_chain(&self, atoms: usize) -> Result<RankOneChainSpec> {
        let chain = self.chain.as_ref().ok_or_else(|| config_error("chain", "missing"))?;
        let vector = |path: String, v: &MeasureVectorSpec| -> Result<MeasureVector> {
            let coeffs = if v.atoms.is_empty() {
                vec![Complex64::new(0.0, 0.0); atoms]
            } else {
                complex_vector(&format!("{path}.atoms"), &v.atoms, atoms)?.into_inner()
            };
            Ok(MeasureVector::new(coeffs, trig_poly(&v.poly, 1.0)))
        };
        let mut terms = Vec::new();
        for (i, t) in chain.terms.iter().enumerate() {
            terms.push((
                vector(format!("chain.terms[{i}].u"), &t.u)?,
                vector(format!("chain.terms[{i}].v"), &t.v)?,
            ));
        }
        Ok(RankOneChainSpec {
            omega_weight: complex(&chain.omega_weight),
            terms,
            exponents: self.exponents()?,
        })
    }
}

fn build_operator(spec: &OperatorSpec, dim: usize, seed: u64, index: usize) -> Result<ComplexMatrix> {
    let path = format!("operators[{index}]");
    let mut rng = stream_rng(seed, 1 + index as u64);
    match spec {
        OperatorSpec::Haar => haar_unitary_with(dim, &mut rng).map_err(at(&path)),
        OperatorSpec::Gaussian { rank } => {
            let r = rank.unwrap_or(dim);
            if r == 0 || r > dim {
                return Err(config_error(format!("{path}.rank"), format!("must be in 1..={dim}")));
            }
            Ok(random_low_rank(dim, r, &mut rng))
        }
        OperatorSpec::RankOne { u, v } => {
            let u = match u {
                Some(u) => complex_vector(&format!("{path}.u"), u, dim)?,
                None => random_unit_vector(dim, &mut rng),
            };
            let v = match v {
                Some(v) => complex_vector(&format!("{path}.v"), v, dim)?,
                None => random_unit_vector(dim, &mut rng),
            };
            Ok(ComplexMatrix::outer(&u, &v))
        }
        OperatorSpec::Explicit { entries } => {
            if entries.len() != dim || entries.iter().any(|r| r.len() != dim) {
                return Err(config_error(format!("{path}.entries"), format!("must be {dim}x{dim}")));
            }
            let data = entries.iter().flatten().map(complex).collect();
            ComplexMatrix::new(dim, dim, data).map_err(at(&path))
        }
    }
}

//! Config-driven experiments: run an averager over a schedule of `N`,
//! compare each mean against its closed-form limit, and report the errors
//! next to the analytic bound.
//!
//! Rows are independent and computed in parallel; every row is a pure
//! function of the config, so reports do not depend on the thread count.

mod config;
mod csv;

pub use config::{
    BasisSpec, ChainSpec, ChainTermSpec, ExperimentConfig, ExperimentKind, MeasureSpec,
    MeasureVectorSpec, OperatorSpec, ScheduleSpec, SpectrumSpec, PROBE_STREAM, SCHEMA_VERSION,
};
pub use csv::{config_echo_path, emit_csv, render_csv, write_atomic, write_config_echo, CSV_HEADER};

use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::averagers::{
    adjoint_average, entangled_average, mean_ergodic_average, power_chain_average, AverageMode,
    OperatorChain,
};
use crate::dynamics::{trace_pairing_convergence, CompactSystem};
use crate::error::{Error, Result};
use crate::furstenberg::{diam_limit_check, CyclicSystem};
use crate::limits::{
    cesaro_error_bound, conditional_expectation, entangled_limit, mean_ergodic_error_bound,
    mean_ergodic_limit, power_chain_limit,
};
use crate::measure_model::{
    g_limit, g_n_value, recurrence_scan_measure, weak_mixing_chain_average, SpectralMeasure,
    WeakMixingModel,
};
use crate::num_core::{singular_values, ComplexMatrix, ComplexVector};
use crate::spectral::{
    classify, is_zero_phase, resonant_assignments_for, SlotPattern, UnitaryOperator,
    ENUMERATION_BUDGET,
};
use config::config_error;

/// Slack in the `weak ≤ strong` check.
pub const WEAK_STRONG_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub n: usize,
    pub weak_error: f64,
    pub strong_error: f64,
    /// Analytic bound on `strong_error`, where one is known.
    pub bound: Option<f64>,
    pub seconds: f64,
}

impl ReportRow {
    pub fn consistent(&self, tolerance: f64) -> bool {
        self.weak_error <= self.strong_error + WEAK_STRONG_SLACK
            && self.bound.is_none_or(|b| self.strong_error <= b + tolerance)
    }
}

/// Which closed form the rows were compared against.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitDescriptor {
    pub formula: &'static str,
    /// Surviving terms of the limit (resonant assignments or atom tuples).
    pub resonance_count: Option<usize>,
    /// Recurrence threshold, for `recurrence` runs.
    pub n0: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub kind: ExperimentKind,
    pub rows: Vec<ReportRow>,
    pub descriptor: LimitDescriptor,
    /// Every row is consistent.
    pub passed: bool,
}

fn formula(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::MeanErgodic => "E_1, the projection onto the fixed space of U",
        ExperimentKind::Entangled => {
            "sum over resonant assignments of E_{z_1} A_1 E_{z_2} ... A_{m-1} E_{z_m}"
        }
        ExperimentKind::Adjoint => "conditional expectation sum_z E_z A E_z",
        ExperimentKind::PowerChain => {
            "sum over (z_1..z_k) with prod z_j^{m_j} = 1 of E_{z_1} A_1 ... E_{z_k}"
        }
        ExperimentKind::Furstenberg => "V(A Omega (x) x) over character pairs (j, k), j = -2k mod p",
        ExperimentKind::KdynTrace => "Tr(T E(A)) with E the conditional expectation",
        ExperimentKind::Recurrence => "omega(A)^(l+1) in the weakly mixing measure model",
        ExperimentKind::MeasureGn => {
            "sum over atom tuples with sum m_j theta_j = 0 mod 2pi of prod masses"
        }
    }
}

fn spectral_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

/// `|<Dx, y>|` and `‖D‖_op`.
fn matrix_errors(diff: &ComplexMatrix, x: &ComplexVector, y: &ComplexVector) -> Result<(f64, f64)> {
    Ok((diff.mul_vec(x).inner(y).norm(), spectral_norm(diff)?))
}

fn norms(ops: &[ComplexMatrix]) -> Result<Vec<f64>> {
    ops.iter().map(spectral_norm).collect()
}

/// Computes every schedule row in parallel. `row(n)` returns
/// `(weak, strong, bound)`.
fn rows<F>(schedule: &[usize], timing: bool, row: F) -> Result<Vec<ReportRow>>
where
    F: Fn(usize) -> Result<(f64, f64, Option<f64>)> + Sync,
{
    schedule
        .par_iter()
        .map(|&n| {
            let start = Instant::now();
            let (weak_error, strong_error, bound) = row(n)?;
            let seconds = if timing { start.elapsed().as_secs_f64() } else { 0.0 };
            Ok(ReportRow {
                n,
                weak_error,
                strong_error,
                bound,
                seconds,
            })
        })
        .collect()
}

fn resonance_count(u: &UnitaryOperator, pattern: &SlotPattern) -> Result<usize> {
    Ok(resonant_assignments_for(u, pattern)?.len())
}

/// Atom tuples `(θ_1, …, θ_k)` with `Σ m_j θ_j ≡ 0`.
fn atom_resonances(measures: &[SpectralMeasure], exponents: &[i64]) -> Result<usize> {
    let tuples: f64 = measures.iter().map(|m| m.atoms().len() as f64).product();
    crate::error::check_budget("atom tuple enumeration", tuples, ENUMERATION_BUDGET)?;
    if measures.iter().any(|m| m.atoms().is_empty()) {
        return Ok(0);
    }
    let mut idx = vec![0usize; measures.len()];
    let mut count = 0;
    loop {
        let phase: f64 = idx
            .iter()
            .zip(measures)
            .zip(exponents)
            .map(|((&i, m), &e)| e as f64 * m.atoms()[i].0)
            .sum();
        if is_zero_phase(phase) {
            count += 1;
        }
        let mut p = 0;
        loop {
            if p == idx.len() {
                return Ok(count);
            }
            idx[p] += 1;
            if idx[p] < measures[p].atoms().len() {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}

fn weak_mixing_model(config: &ExperimentConfig) -> Result<WeakMixingModel> {
    let measure = config.build_measures()?.remove(0);
    let model = if measure.atoms().is_empty() {
        WeakMixingModel::new(measure.density().clone())
    } else {
        WeakMixingModel::from_measure(measure)
    };
    model.map_err(|e| config_error("measures[0]", e.to_string()))
}

/// Runs the experiment described by `config`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ConvergenceReport> {
    config.validate()?;
    let schedule = config.schedule()?;
    let timing = config.timing;
    let kind = config.kind;
    let mut n0 = None;
    let (rows, resonances) = match kind {
        ExperimentKind::MeanErgodic => {
            let u = config.build_unitary()?;
            let (x, y) = config.probes(u.dim());
            let limit = mean_ergodic_limit(&u);
            let rows = rows(&schedule, timing, |n| {
                let diff = &mean_ergodic_average(&u, n)? - &limit;
                let (weak, strong) = matrix_errors(&diff, &x, &y)?;
                Ok((weak, strong, Some(mean_ergodic_error_bound(&u, n)?)))
            })?;
            (rows, Some(resonance_count(&u, &SlotPattern::from_exponents(&[1])?)?))
        }
        ExperimentKind::Entangled => {
            let u = config.build_unitary()?;
            let partition = config.partition()?;
            let ops = config.build_operators(u.dim())?;
            let pattern = SlotPattern::from_partition(&partition);
            let op_norms = norms(&ops)?;
            let limit = entangled_limit(&u, &partition, &ops)?;
            let chain = OperatorChain::new(&u, partition, ops)?;
            let (x, y) = config.probes(u.dim());
            let rows = rows(&schedule, timing, |n| {
                let avg = entangled_average(&chain, n, &AverageMode::Matrix)?;
                let (weak, strong) = matrix_errors(&(avg.matrix() - &limit), &x, &y)?;
                Ok((weak, strong, Some(cesaro_error_bound(&u, &pattern, &op_norms, n)?)))
            })?;
            (rows, Some(resonance_count(&u, &pattern)?))
        }
        ExperimentKind::Adjoint => {
            let u = config.build_unitary()?;
            let a = config.build_operators(u.dim())?.remove(0);
            let pattern = SlotPattern::from_exponents(&[1, -1])?;
            let a_norm = spectral_norm(&a)?;
            let limit = conditional_expectation(&u, &a)?;
            let (x, y) = config.probes(u.dim());
            let rows = rows(&schedule, timing, |n| {
                let (weak, strong) = matrix_errors(&(&adjoint_average(&u, &a, n)? - &limit), &x, &y)?;
                Ok((weak, strong, Some(cesaro_error_bound(&u, &pattern, &[a_norm], n)?)))
            })?;
            (rows, Some(resonance_count(&u, &pattern)?))
        }
        ExperimentKind::PowerChain => {
            let u = config.build_unitary()?;
            let exponents = config.exponents()?;
            let ops = config.build_operators(u.dim())?;
            let pattern = SlotPattern::from_exponents(&exponents).map_err(|e| config_error("exponents", e.to_string()))?;
            let op_norms = norms(&ops)?;
            let limit = power_chain_limit(&u, &exponents, &ops)?;
            let (x, y) = config.probes(u.dim());
            let rows = rows(&schedule, timing, |n| {
                let avg = power_chain_average(&u, &exponents, &ops, n, &AverageMode::Matrix)?;
                let (weak, strong) = matrix_errors(&(avg.matrix() - &limit), &x, &y)?;
                Ok((weak, strong, Some(cesaro_error_bound(&u, &pattern, &op_norms, n)?)))
            })?;
            (rows, Some(resonance_count(&u, &pattern)?))
        }
        ExperimentKind::Furstenberg => {
            let p = config.p.expect("validated");
            let system = CyclicSystem::new(p).map_err(|e| config_error("p", e.to_string()))?;
            let a = config.random_diagonal(p);
            let a_norm = spectral_norm(&a)?;
            let (x, y) = config.probes(p);
            let pattern = SlotPattern::from_exponents(&[1, 1])?;
            let rows = rows(&schedule, timing, |n| {
                let check = diam_limit_check(&system, &a, &x, n)?;
                let weak = (&check.average - &check.limit).inner(&y).norm();
                // ‖x‖ = 1, so the operator bound carries over to the vector.
                let bound = cesaro_error_bound(system.unitary(), &pattern, &[a_norm], n)?;
                Ok((weak, check.error, Some(bound)))
            })?;
            (rows, Some(resonance_count(system.unitary(), &pattern)?))
        }
        ExperimentKind::KdynTrace => {
            let u = config.build_unitary()?;
            let mut ops = config.build_operators(u.dim())?;
            let a = ops.pop().expect("validated");
            let t = ops.pop().expect("validated");
            let pattern = SlotPattern::from_exponents(&[1, -1])?;
            let a_norm = spectral_norm(&a)?;
            let limit = conditional_expectation(&u, &a)?;
            let system = CompactSystem::new(u.clone());
            let rows = rows(&schedule, timing, |n| {
                let pairing = trace_pairing_convergence(&system, &t, &a, &[n])?;
                let weak = if pairing.trace_norm > 0.0 {
                    pairing.values[0].norm() / pairing.trace_norm
                } else {
                    0.0
                };
                let strong = spectral_norm(&(&adjoint_average(&u, &a, n)? - &limit))?;
                Ok((weak, strong, Some(cesaro_error_bound(&u, &pattern, &[a_norm], n)?)))
            })?;
            (rows, Some(resonance_count(&u, &pattern)?))
        }
        ExperimentKind::Recurrence => {
            let model = weak_mixing_model(config)?;
            let spec = config.build_chain(model.measure().atoms().len())?;
            if let Some(&horizon) = schedule.last() {
                n0 = recurrence_scan_measure(&model, &spec, horizon)
                    .map_err(|e| relabel("chain", e))?
                    .n0;
            }
            let rows = rows(&schedule, timing, |n| {
                let avg = weak_mixing_chain_average(&model, &spec, n)?;
                let err = (avg.s_n - avg.limit).norm();
                Ok((err, err, None))
            })?;
            (rows, None)
        }
        ExperimentKind::MeasureGn => {
            let measures = config.build_measures()?;
            let exponents = config.exponents()?;
            let limit = g_limit(&measures, &exponents).map_err(|e| relabel("exponents", e))?;
            let rows = rows(&schedule, timing, |n| {
                let err = (g_n_value(&measures, &exponents, n)? - limit).norm();
                Ok((err, err, None))
            })?;
            (rows, Some(atom_resonances(&measures, &exponents)?))
        }
    };
    let passed = rows.iter().all(|r| r.consistent(config.tolerance));
    Ok(ConvergenceReport {
        kind,
        rows,
        descriptor: LimitDescriptor {
            formula: formula(kind),
            resonance_count: resonances,
            n0,
        },
        passed,
    })
}

fn relabel(path: &str, e: Error) -> Error {
    match e {
        Error::InvalidArgument(m) | Error::PreconditionViolation(m) => config_error(path, m),
        other => other,
    }
}

fn push_spectrum(out: &mut String, u: &UnitaryOperator) {
    let c = classify(u);
    let _ = writeln!(out, "dimension: {}", u.dim());
    let _ = writeln!(out, "spectrum (angle / multiplicity):");
    for p in u.spectrum() {
        let _ = writeln!(out, "  {:+.12} rad  x{}", p.angle, p.multiplicity);
    }
    let _ = writeln!(out, "ergodic: {}  weakly mixing: {}", c.ergodic, c.weakly_mixing);
}

/// Human-readable summary: resolved spectrum, resonance count and the limit
/// formula. No averages are computed.
pub fn describe(config: &ExperimentConfig) -> Result<String> {
    config.validate()?;
    let kind = config.kind;
    let mut out = String::new();
    let _ = writeln!(out, "kind: {kind}");
    let _ = writeln!(out, "seed: {}", config.seed);
    let _ = writeln!(out, "schedule: {:?}", config.schedule()?);
    let resonances = match kind {
        ExperimentKind::MeanErgodic
        | ExperimentKind::Entangled
        | ExperimentKind::Adjoint
        | ExperimentKind::PowerChain
        | ExperimentKind::KdynTrace => {
            let u = config.build_unitary()?;
            push_spectrum(&mut out, &u);
            let pattern = match kind {
                ExperimentKind::MeanErgodic => SlotPattern::from_exponents(&[1])?,
                ExperimentKind::Entangled => {
                    let p = config.partition()?;
                    let _ = writeln!(out, "partition: {p}");
                    SlotPattern::from_partition(&p)
                }
                ExperimentKind::PowerChain => {
                    let e = config.exponents()?;
                    let _ = writeln!(out, "exponents: {e:?}");
                    SlotPattern::from_exponents(&e).map_err(|e| config_error("exponents", e.to_string()))?
                }
                _ => SlotPattern::from_exponents(&[1, -1])?,
            };
            Some(resonance_count(&u, &pattern)?)
        }
        ExperimentKind::Furstenberg => {
            let system = CyclicSystem::new(config.p.expect("validated"))
                .map_err(|e| config_error("p", e.to_string()))?;
            push_spectrum(&mut out, system.unitary());
            Some(resonance_count(system.unitary(), &SlotPattern::from_exponents(&[1, 1])?)?)
        }
        ExperimentKind::Recurrence => {
            let model = weak_mixing_model(config)?;
            let spec = config.build_chain(model.measure().atoms().len())?;
            let omega = spec.omega_value(&model).map_err(|e| relabel("chain", e))?;
            let _ = writeln!(out, "exponents: {:?}", spec.exponents);
            let _ = writeln!(out, "omega(A): {omega}");
            let _ = writeln!(out, "limit: {}", omega.powi(spec.exponents.len() as i32 + 1));
            None
        }
        ExperimentKind::MeasureGn => {
            let measures = config.build_measures()?;
            let exponents = config.exponents()?;
            for (i, m) in measures.iter().enumerate() {
                let _ = writeln!(out, "measure {i}: {} atoms, total mass {:.12}", m.atoms().len(), m.total_mass());
            }
            let _ = writeln!(out, "exponents: {exponents:?}");
            let limit: Complex64 = g_limit(&measures, &exponents).map_err(|e| relabel("exponents", e))?;
            let _ = writeln!(out, "limit: {limit}");
            Some(atom_resonances(&measures, &exponents)?)
        }
    };
    if let Some(r) = resonances {
        let _ = writeln!(out, "resonance count: {r}");
    }
    let _ = writeln!(out, "limit formula: {}", formula(kind));
    Ok(out)
}

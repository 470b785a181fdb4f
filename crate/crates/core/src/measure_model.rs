//! Spectral measures on the circle with finitely many atoms plus a
//! trigonometric-polynomial density.
//!
//! `U` acts on `L²(μ)` as multiplication by `z = e^{iθ}`, so
//! `<U^k x, y> = ∫ e^{ikθ} x ȳ dμ`. With polynomial densities every such
//! integral is a finite convolution, so nothing here has quadrature error.

use std::f64::consts::TAU;

use log::warn;
use num_complex::Complex64;

use crate::error::{check_budget, Error, Result};
use crate::num_core::{cis, normalize_angle};
use crate::spectral::{is_zero_phase, ENUMERATION_BUDGET};

const DENSITY_GRID: usize = 1024;
const DENSITY_TOL: f64 = 1e-12;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `p(θ) = Σ_{k=lo}^{lo+len−1} c_k e^{ikθ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    lo: i64,
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    pub fn new(lo: i64, coeffs: Vec<Complex64>) -> Self {
        Self { lo, coeffs }
    }

    pub fn zero() -> Self {
        Self::new(0, Vec::new())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(0, vec![c])
    }

    /// Builds from `(k, c_k)` pairs; repeated frequencies add up.
    pub fn from_terms(terms: &[(i64, Complex64)]) -> Self {
        let Some(lo) = terms.iter().map(|t| t.0).min() else {
            return Self::zero();
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap_or(lo);
        let mut coeffs = vec![zero(); (hi - lo + 1) as usize];
        for &(k, c) in terms {
            coeffs[(k - lo) as usize] += c;
        }
        Self::new(lo, coeffs)
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == zero())
    }

    pub fn coefficient(&self, k: i64) -> Complex64 {
        let i = k - self.lo;
        if i < 0 || i as usize >= self.coeffs.len() {
            zero()
        } else {
            self.coeffs[i as usize]
        }
    }

    pub fn evaluate(&self, theta: f64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * cis(normalize_angle((self.lo + i as i64) as f64 * theta)))
            .sum()
    }

    /// Pointwise product (coefficient convolution).
    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero();
        }
        let mut coeffs = vec![zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::new(self.lo + other.lo, coeffs)
    }

    /// The pointwise complex conjugate `θ ↦ conj(p(θ))`.
    pub fn conj(&self) -> Self {
        if self.coeffs.is_empty() {
            return Self::zero();
        }
        let hi = self.lo + self.coeffs.len() as i64 - 1;
        Self::new(-hi, self.coeffs.iter().rev().map(|c| c.conj()).collect())
    }
}

/// Anything with Fourier coefficients `∫ e^{ikθ} dν` and a list of atoms.
pub trait CircleMeasure {
    fn coefficient(&self, k: i64) -> Complex64;
    /// `(angle, weight)` for every atom.
    fn atom_weights(&self) -> Vec<(f64, Complex64)>;
}

fn atomic_part(atoms: &[(f64, Complex64)], k: i64) -> Complex64 {
    atoms
        .iter()
        .map(|&(theta, w)| w * cis(normalize_angle(k as f64 * theta)))
        .sum()
}

/// Positive measure `Σ m_a δ_{θ_a} + h(θ) dθ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMeasure {
    atoms: Vec<(f64, f64)>,
    density: TrigPoly,
}

impl SpectralMeasure {
    /// Checks positive masses, a real nonnegative density and positive
    /// total mass.
    pub fn new(atoms: Vec<(f64, f64)>, density: TrigPoly) -> Result<Self> {
        for &(theta, mass) in &atoms {
            if !theta.is_finite() || !(mass > 0.0 && mass.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "atom ({theta}, {mass}) needs a finite angle and positive mass"
                )));
            }
        }
        let hi = density.lo + density.coeffs.len() as i64 - 1;
        for k in density.lo..=hi {
            if (density.coefficient(k) - density.coefficient(-k).conj()).norm() > DENSITY_TOL {
                return Err(Error::InvalidArgument(format!(
                    "density is not real-valued (coefficients {k} and {} are not conjugate)",
                    -k
                )));
            }
        }
        if !density.is_zero() {
            for g in 0..DENSITY_GRID {
                let h = density.evaluate(TAU * g as f64 / DENSITY_GRID as f64).re;
                if h < -DENSITY_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "density is negative ({h:.3e}) at grid point {g}"
                    )));
                }
            }
        }
        let atoms: Vec<(f64, f64)> = atoms.into_iter().map(|(t, m)| (normalize_angle(t), m)).collect();
        let measure = Self { atoms, density };
        if measure.total_mass() <= 0.0 {
            return Err(Error::InvalidArgument("measure has zero total mass".into()));
        }
        Ok(measure)
    }

    /// Normalized Lebesgue measure `dθ / 2π`.
    pub fn lebesgue() -> Self {
        Self {
            atoms: Vec::new(),
            density: TrigPoly::constant(Complex64::new(1.0 / TAU, 0.0)),
        }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn density(&self) -> &TrigPoly {
        &self.density
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum::<f64>() + TAU * self.density.coefficient(0).re
    }

    /// `<x, y> = ∫ x ȳ dμ`.
    pub fn inner(&self, x: &MeasureVector, y: &MeasureVector) -> Result<Complex64> {
        self.cross_coefficient(x, y, 0)
    }

    pub fn norm(&self, x: &MeasureVector) -> Result<f64> {
        Ok(self.inner(x, x)?.re.max(0.0).sqrt())
    }

    /// `x ȳ μ` as a complex measure.
    pub fn cross_measure(&self, x: &MeasureVector, y: &MeasureVector) -> Result<ComplexMeasure> {
        for v in [x, y] {
            if v.atom_coeffs.len() != self.atoms.len() {
                return Err(Error::InvalidArgument(format!(
                    "vector has {} atom coefficients, measure has {} atoms",
                    v.atom_coeffs.len(),
                    self.atoms.len()
                )));
            }
        }
        let atoms = self
            .atoms
            .iter()
            .zip(x.atom_coeffs.iter().zip(&y.atom_coeffs))
            .map(|(&(theta, mass), (xa, ya))| (theta, xa * ya.conj() * mass))
            .collect();
        let density = x.continuous.mul(&y.continuous.conj()).mul(&self.density);
        Ok(ComplexMeasure { atoms, density })
    }

    /// `<U^k x, y>`.
    pub fn cross_coefficient(&self, x: &MeasureVector, y: &MeasureVector, k: i64) -> Result<Complex64> {
        Ok(self.cross_measure(x, y)?.coefficient(k))
    }
}

impl CircleMeasure for SpectralMeasure {
    fn coefficient(&self, k: i64) -> Complex64 {
        let atoms: Vec<(f64, Complex64)> = self.atom_weights();
        atomic_part(&atoms, k) + self.density.coefficient(-k) * TAU
    }

    fn atom_weights(&self) -> Vec<(f64, Complex64)> {
        self.atoms.iter().map(|&(t, m)| (t, Complex64::new(m, 0.0))).collect()
    }
}

/// Complex measure `Σ w_a δ_{θ_a} + q(θ) dθ`, e.g. a cross measure.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMeasure {
    pub atoms: Vec<(f64, Complex64)>,
    pub density: TrigPoly,
}

impl CircleMeasure for ComplexMeasure {
    fn coefficient(&self, k: i64) -> Complex64 {
        atomic_part(&self.atoms, k) + self.density.coefficient(-k) * TAU
    }

    fn atom_weights(&self) -> Vec<(f64, Complex64)> {
        self.atoms.clone()
    }
}

impl From<&SpectralMeasure> for ComplexMeasure {
    fn from(m: &SpectralMeasure) -> Self {
        Self {
            atoms: m.atom_weights(),
            density: m.density.clone(),
        }
    }
}

/// An element of `L²(μ)`: a value on each atom plus a polynomial on the
/// continuous part.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureVector {
    pub atom_coeffs: Vec<Complex64>,
    pub continuous: TrigPoly,
}

impl MeasureVector {
    pub fn new(atom_coeffs: Vec<Complex64>, continuous: TrigPoly) -> Self {
        Self {
            atom_coeffs,
            continuous,
        }
    }

    /// Indicator of atom `i` out of `atoms`.
    pub fn atom(i: usize, atoms: usize) -> Self {
        let mut c = vec![zero(); atoms];
        c[i] = Complex64::new(1.0, 0.0);
        Self::new(c, TrigPoly::zero())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(
            self.atom_coeffs.iter().map(|a| a * c).collect(),
            TrigPoly::new(
                self.continuous.lo,
                self.continuous.coeffs.iter().map(|a| a * c).collect(),
            ),
        )
    }
}

/// `μ̂(k) = ∫ e^{ikθ} dμ`.
pub fn fourier_coefficient(measure: &SpectralMeasure, k: i64) -> Complex64 {
    measure.coefficient(k)
}

/// `<U^k x, y>` in `L²(μ)`.
pub fn cross_coefficient(
    measure: &SpectralMeasure,
    x: &MeasureVector,
    y: &MeasureVector,
    k: i64,
) -> Result<Complex64> {
    measure.cross_coefficient(x, y, k)
}

fn check_exponents<M>(measures: &[M], exponents: &[i64]) -> Result<()> {
    if measures.is_empty() {
        return Err(Error::InvalidArgument("need at least one measure".into()));
    }
    if measures.len() != exponents.len() {
        return Err(Error::InvalidArgument(format!(
            "{} measures but {} exponents",
            measures.len(),
            exponents.len()
        )));
    }
    if exponents.contains(&0) {
        return Err(Error::InvalidArgument("exponents must be nonzero".into()));
    }
    Ok(())
}

/// `(1/N) Σ_{n<N} Π_l μ̂_l(m_l n)`.
pub fn g_n_value<M: CircleMeasure>(measures: &[M], exponents: &[i64], n: usize) -> Result<Complex64> {
    check_exponents(measures, exponents)?;
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let mut sum = zero();
    for t in 0..n as i64 {
        sum += measures
            .iter()
            .zip(exponents)
            .map(|(mu, &m)| mu.coefficient(m * t))
            .product::<Complex64>();
    }
    Ok(sum / n as f64)
}

/// `lim G_N`: total product weight of atom tuples with `Σ m_l θ_l ≡ 0`.
/// Continuous parts never contribute.
pub fn g_limit<M: CircleMeasure>(measures: &[M], exponents: &[i64]) -> Result<Complex64> {
    check_exponents(measures, exponents)?;
    let atoms: Vec<Vec<(f64, Complex64)>> = measures.iter().map(|m| m.atom_weights()).collect();
    if atoms.iter().any(|a| a.is_empty()) {
        return Ok(zero());
    }
    let tuples: f64 = atoms.iter().map(|a| a.len() as f64).product();
    check_budget("atom tuples", tuples, ENUMERATION_BUDGET)?;
    let mut idx = vec![0usize; atoms.len()];
    let mut total = zero();
    loop {
        let phase: f64 = idx
            .iter()
            .zip(&atoms)
            .zip(exponents)
            .map(|((&i, a), &m)| m as f64 * a[i].0)
            .sum();
        if is_zero_phase(normalize_angle(phase)) {
            total += idx.iter().zip(&atoms).map(|(&i, a)| a[i].1).product::<Complex64>();
        }
        let mut l = atoms.len();
        loop {
            if l == 0 {
                return Ok(total);
            }
            l -= 1;
            idx[l] += 1;
            if idx[l] < atoms[l].len() {
                break;
            }
            idx[l] = 0;
        }
    }
}

/// One unit atom at angle 0 (the invariant vector Ω) plus an atomless
/// density, so the point spectrum is `{1}`.
#[derive(Clone, Debug)]
pub struct WeakMixingModel {
    measure: SpectralMeasure,
}

impl WeakMixingModel {
    pub fn new(density: TrigPoly) -> Result<Self> {
        Self::from_measure(SpectralMeasure::new(vec![(0.0, 1.0)], density)?)
    }

    pub fn from_measure(measure: SpectralMeasure) -> Result<Self> {
        let ok = measure.atoms.len() == 1
            && measure.atoms[0].0 == 0.0
            && (measure.atoms[0].1 - 1.0).abs() <= 1e-14;
        if !ok {
            return Err(Error::PreconditionViolation(format!(
                "weak-mixing model needs exactly one unit atom at angle 0, got {:?}",
                measure.atoms
            )));
        }
        Ok(Self { measure })
    }

    pub fn measure(&self) -> &SpectralMeasure {
        &self.measure
    }

    /// The invariant unit vector Ω.
    pub fn omega(&self) -> MeasureVector {
        MeasureVector::atom(0, 1)
    }

    /// A vector with no atomic component.
    pub fn continuous_vector(&self, poly: TrigPoly) -> MeasureVector {
        MeasureVector::new(vec![zero()], poly)
    }
}

/// `A = c · ΩΩ* + Σ_t u_t v_t*` together with exponents
/// `m_1 < m_2 < ⋯ < m_l`.
#[derive(Clone, Debug)]
pub struct RankOneChainSpec {
    pub omega_weight: Complex64,
    pub terms: Vec<(MeasureVector, MeasureVector)>,
    pub exponents: Vec<i64>,
}

impl RankOneChainSpec {
    fn validate(&self) -> Result<()> {
        if self.exponents.is_empty() {
            return Err(Error::InvalidArgument("need at least one exponent".into()));
        }
        if self.exponents[0] < 1 || self.exponents.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "exponents must be positive and strictly increasing, got {:?}",
                self.exponents
            )));
        }
        Ok(())
    }

    /// Every term as a `(u, v)` pair, the Ω-projection first.
    fn factors(&self, model: &WeakMixingModel) -> Vec<(MeasureVector, MeasureVector)> {
        let omega = model.omega();
        let mut out = vec![(omega.scale(self.omega_weight), omega)];
        out.extend(self.terms.iter().cloned());
        out
    }

    /// `ω(A) = <AΩ, Ω>`.
    pub fn omega_value(&self, model: &WeakMixingModel) -> Result<Complex64> {
        let mu = model.measure();
        let omega = model.omega();
        let mut total = self.omega_weight;
        for (u, v) in &self.terms {
            total += mu.inner(&omega, v)? * mu.inner(u, &omega)?;
        }
        Ok(total)
    }
}

/// Gaps `d_i = m_i − m_{i−1}` with `m_0 = 0`.
fn gaps(exponents: &[i64]) -> Vec<i64> {
    let mut prev = 0;
    exponents
        .iter()
        .map(|&m| {
            let d = m - prev;
            prev = m;
            d
        })
        .collect()
}

/// Expansion of `<A U^{n d_1} A ⋯ U^{n d_l} A Ω, Ω>` over term chains
/// `t_0, …, t_l`: boundary weights `<u_{t_0}, Ω>` and `<Ω, v_{t_l}>` and
/// cross measures `u_a v̄_b μ` for every pair of terms.
struct ChainExpansion {
    left: Vec<Complex64>,
    right: Vec<Complex64>,
    cross: Vec<Vec<ComplexMeasure>>,
    gaps: Vec<i64>,
}

impl ChainExpansion {
    fn new(model: &WeakMixingModel, spec: &RankOneChainSpec) -> Result<Self> {
        spec.validate()?;
        let mu = model.measure();
        let omega = model.omega();
        let factors = spec.factors(model);
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (u, v) in &factors {
            left.push(mu.inner(u, &omega)?);
            right.push(mu.inner(&omega, v)?);
        }
        let mut cross = Vec::new();
        for (u, _) in &factors {
            let mut row = Vec::new();
            for (_, v) in &factors {
                row.push(mu.cross_measure(u, v)?);
            }
            cross.push(row);
        }
        Ok(Self {
            left,
            right,
            cross,
            gaps: gaps(&spec.exponents),
        })
    }

    /// Contracts the chain with `step(i, a, b)` as the link from term `b`
    /// to term `a` across gap `i`.
    fn contract(&self, mut step: impl FnMut(usize, usize, usize) -> Complex64) -> Complex64 {
        let terms = self.left.len();
        let mut w = self.left.clone();
        for i in 0..self.gaps.len() {
            w = (0..terms)
                .map(|a| (0..terms).map(|b| w[b] * step(i, a, b)).sum())
                .collect();
        }
        w.iter().zip(&self.right).map(|(x, r)| x * r).sum()
    }

    fn term(&self, n: i64) -> Complex64 {
        self.contract(|i, a, b| self.cross[a][b].coefficient(self.gaps[i] * n))
    }

    /// Limit through the resonant atom sums, link by link. Each link has
    /// one index, so its limit is the weight of the atom at angle 0.
    fn resonant_limit(&self) -> Result<Complex64> {
        let mut links = Vec::new();
        for row in &self.cross {
            let mut out = Vec::new();
            for nu in row {
                out.push(g_limit(std::slice::from_ref(nu), &[1])?);
            }
            links.push(out);
        }
        Ok(self.contract(|_, a, b| links[a][b]))
    }
}

#[derive(Clone, Debug)]
pub struct ChainAverage {
    pub n: usize,
    pub s_n: Complex64,
    /// `ω(A)^{l+1}`.
    pub limit: Complex64,
    /// The same limit assembled from resonant atom weights.
    pub limit_from_atoms: Complex64,
}

/// `s_N = (1/N) Σ_{n<N} ω(A α^{n m_1}(A) ⋯ α^{n m_l}(A))` and its limit.
pub fn weak_mixing_chain_average(
    model: &WeakMixingModel,
    spec: &RankOneChainSpec,
    n: usize,
) -> Result<ChainAverage> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let expansion = ChainExpansion::new(model, spec)?;
    let sum: Complex64 = (0..n as i64).map(|t| expansion.term(t)).sum();
    let l = spec.exponents.len() as i32;
    Ok(ChainAverage {
        n,
        s_n: sum / n as f64,
        limit: spec.omega_value(model)?.powi(l + 1),
        limit_from_atoms: expansion.resonant_limit()?,
    })
}

#[derive(Clone, Debug)]
pub struct RecurrenceScan {
    /// Least `N_0` with `Re s_N > 0` for every `N_0 < N ≤ horizon`.
    /// `None` when `s_horizon` itself is not positive.
    pub n0: Option<usize>,
    /// `s_1, …, s_horizon`.
    pub trace: Vec<Complex64>,
    pub limit: Complex64,
    /// `max_N N·|s_N − limit|`, an empirical `C/N` envelope.
    pub envelope: f64,
}

/// First index after which the trace stays positive, if the last entry is.
pub(crate) fn positivity_onset(trace: &[f64]) -> Option<usize> {
    match trace.iter().rposition(|&s| s <= 0.0) {
        None => Some(0),
        Some(i) if i + 1 == trace.len() => None,
        Some(i) => Some(i + 1),
    }
}

pub fn recurrence_scan_measure(
    model: &WeakMixingModel,
    spec: &RankOneChainSpec,
    horizon: usize,
) -> Result<RecurrenceScan> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let expansion = ChainExpansion::new(model, spec)?;
    let omega = spec.omega_value(model)?;
    if omega.re <= 0.0 {
        warn!("ω(A) = {omega} is not positive; the recurrence limit is not positive");
    }
    let limit = omega.powi(spec.exponents.len() as i32 + 1);
    let mut trace = Vec::with_capacity(horizon);
    let mut sum = zero();
    for t in 0..horizon {
        sum += expansion.term(t as i64);
        trace.push(sum / (t + 1) as f64);
    }
    let real: Vec<f64> = trace.iter().map(|s| s.re).collect();
    let envelope = trace
        .iter()
        .enumerate()
        .map(|(i, s)| (i + 1) as f64 * (s - limit).norm())
        .fold(0.0, f64::max);
    Ok(RecurrenceScan {
        n0: positivity_onset(&real),
        trace,
        limit,
        envelope,
    })
}

//! Periodic Lagrangian problems and the name-keyed catalog that builds them
//! from configuration.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use crate::config::Config;
use crate::crystal::{cyclic_crystal, CrystalGroup};

use super::FunctionalError;

/// `φ(q) = ∫ ½⟨L(t,q)q̇,q̇⟩ − W(t,q) + ⟨f(t),q⟩ dt` on `T0`-periodic loops.
///
/// Callbacks write into caller-provided buffers so quadrature loops stay
/// allocation free.
pub trait PeriodicProblem: Send + Sync {
    fn name(&self) -> &str;
    fn dimension(&self) -> usize;
    fn period(&self) -> f64;
    /// Spatial periods `T_1, …, T_n`.
    fn spatial_periods(&self) -> &[f64];
    fn ellipticity(&self) -> f64;
    /// Default Fourier truncation.
    fn modes(&self) -> usize;
    /// `L(t,q)`, row-major `n × n`.
    fn kinetic(&self, t: f64, q: &[f64], out: &mut [f64]);
    /// `∂L_ij/∂q_k` at `out[k*n*n + i*n + j]`.
    fn kinetic_jacobian(&self, t: f64, q: &[f64], out: &mut [f64]);
    fn potential(&self, t: f64, q: &[f64]) -> f64;
    fn potential_gradient(&self, t: f64, q: &[f64], out: &mut [f64]);
    fn forcing(&self, t: f64, out: &mut [f64]);
    fn symmetry(&self) -> Option<&CrystalGroup>;
}

pub type ProblemBuilder = fn(&Config) -> Result<Box<dyn PeriodicProblem>, FunctionalError>;

/// Problems registered by name; `problem=<name>` in a config selects one.
#[derive(Clone)]
pub struct ProblemRegistry {
    builders: BTreeMap<String, ProblemBuilder>,
}

impl Default for ProblemRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl ProblemRegistry {
    pub fn empty() -> Self {
        ProblemRegistry { builders: BTreeMap::new() }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register("pendulum", Pendulum::from_config);
        r.register("coupled_pendulum", CoupledPendulum::from_config);
        r.register("quadratic", Quadratic::from_config);
        r
    }

    pub fn register(&mut self, name: &str, builder: ProblemBuilder) {
        self.builders.insert(name.to_string(), builder);
    }

    pub fn names(&self) -> Vec<&str> {
        self.builders.keys().map(String::as_str).collect()
    }

    pub fn build(&self, config: &Config) -> Result<Box<dyn PeriodicProblem>, FunctionalError> {
        let name: String = config.require("problem")?;
        let builder = self
            .builders
            .get(&name)
            .ok_or_else(|| FunctionalError::Problem(format!("unknown problem {name:?}; known: {}", self.names().join(", "))))?;
        builder(config)
    }
}

/// Parameters shared by the built-in problems.
#[derive(Debug, Clone)]
struct Common {
    period: f64,
    periods: Vec<f64>,
    modes: usize,
    symmetry: Option<CrystalGroup>,
}

fn common(config: &Config, dimension: usize, default_symmetry: &str) -> Result<Common, FunctionalError> {
    let period: f64 = config.get_or("T0", TAU)?;
    let periods = config.get_list("periods")?.unwrap_or_else(|| vec![TAU; dimension]);
    let modes: usize = config.get_or("modes", 16)?;
    if !(period > 0.0 && period.is_finite()) {
        return Err(FunctionalError::Problem(format!("T0 must be positive, got {period}")));
    }
    if periods.len() != dimension || periods.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(FunctionalError::Problem(format!("need {dimension} positive spatial periods, got {periods:?}")));
    }
    let sym = config.raw("symmetry").unwrap_or(default_symmetry);
    let symmetry = match sym {
        "off" => None,
        "lattice" => Some(CrystalGroup::lattice(dimension)),
        "neg" => {
            let m = (0..dimension).map(|i| (0..dimension).map(|j| if i == j { -1 } else { 0 }).collect()).collect();
            Some(cyclic_crystal("neg", 2, 2, m).map_err(|e| FunctionalError::Problem(e.to_string()))?)
        }
        other => return Err(FunctionalError::Problem(format!("unknown symmetry {other:?} (off|lattice|neg)"))),
    };
    Ok(Common { period, periods, modes, symmetry })
}

fn nonnegative(config: &Config, key: &str, default: f64) -> Result<f64, FunctionalError> {
    let v: f64 = config.get_or(key, default)?;
    if !(v >= 0.0 && v.is_finite()) {
        return Err(FunctionalError::Problem(format!("{key} must be a non-negative number, got {v}")));
    }
    Ok(v)
}

/// `n = 1`, `W = A(1 − cos θ)`, `θ = 2πq/T_1`, `L = 1 + γ(1 − cos θ)`,
/// optional forcing `c·cos(2πt/T0)`.
#[derive(Debug, Clone)]
pub struct Pendulum {
    common: Common,
    amplitude: f64,
    kinetic_mod: f64,
    forcing_amp: f64,
}

impl Pendulum {
    pub fn from_config(config: &Config) -> Result<Box<dyn PeriodicProblem>, FunctionalError> {
        let common = common(config, 1, "neg")?;
        let amplitude = nonnegative(config, "A", 1.0)?;
        let kinetic_mod = nonnegative(config, "kinetic_mod", 0.0)?;
        let forcing_amp = match config.raw("forcing").unwrap_or("zero") {
            "zero" => 0.0,
            "cos1" => config.get_or("forcing_amp", 1.0)?,
            other => return Err(FunctionalError::Problem(format!("unknown forcing {other:?} (zero|cos1)"))),
        };
        Ok(Box::new(Pendulum { common, amplitude, kinetic_mod, forcing_amp }))
    }

    fn angle_scale(&self) -> f64 {
        TAU / self.common.periods[0]
    }
}

impl PeriodicProblem for Pendulum {
    fn name(&self) -> &str {
        "pendulum"
    }
    fn dimension(&self) -> usize {
        1
    }
    fn period(&self) -> f64 {
        self.common.period
    }
    fn spatial_periods(&self) -> &[f64] {
        &self.common.periods
    }
    fn ellipticity(&self) -> f64 {
        1.0
    }
    fn modes(&self) -> usize {
        self.common.modes
    }
    fn kinetic(&self, _t: f64, q: &[f64], out: &mut [f64]) {
        out[0] = 1.0 + self.kinetic_mod * (1.0 - (self.angle_scale() * q[0]).cos());
    }
    fn kinetic_jacobian(&self, _t: f64, q: &[f64], out: &mut [f64]) {
        let s = self.angle_scale();
        out[0] = self.kinetic_mod * s * (s * q[0]).sin();
    }
    fn potential(&self, _t: f64, q: &[f64]) -> f64 {
        self.amplitude * (1.0 - (self.angle_scale() * q[0]).cos())
    }
    fn potential_gradient(&self, _t: f64, q: &[f64], out: &mut [f64]) {
        let s = self.angle_scale();
        out[0] = self.amplitude * s * (s * q[0]).sin();
    }
    fn forcing(&self, t: f64, out: &mut [f64]) {
        out[0] = self.forcing_amp * (TAU * t / self.common.period).cos();
    }
    fn symmetry(&self) -> Option<&CrystalGroup> {
        self.common.symmetry.as_ref()
    }
}

/// `n = 2`, `W = A(1−cos θ1) + A(1−cos θ2) + κ(1−cos(θ1−θ2))`,
/// `L = diag(1 + γ(1 − cos θ_i))`, no forcing. Even in `q`.
#[derive(Debug, Clone)]
pub struct CoupledPendulum {
    common: Common,
    amplitude: f64,
    coupling: f64,
    kinetic_mod: f64,
}

impl CoupledPendulum {
    pub fn from_config(config: &Config) -> Result<Box<dyn PeriodicProblem>, FunctionalError> {
        let common = common(config, 2, "neg")?;
        let amplitude = nonnegative(config, "A", 1.0)?;
        let coupling = nonnegative(config, "coupling", 0.25)?;
        let kinetic_mod = nonnegative(config, "kinetic_mod", 0.0)?;
        Ok(Box::new(CoupledPendulum { common, amplitude, coupling, kinetic_mod }))
    }

    fn angles(&self, q: &[f64]) -> [f64; 2] {
        [TAU * q[0] / self.common.periods[0], TAU * q[1] / self.common.periods[1]]
    }
}

impl PeriodicProblem for CoupledPendulum {
    fn name(&self) -> &str {
        "coupled_pendulum"
    }
    fn dimension(&self) -> usize {
        2
    }
    fn period(&self) -> f64 {
        self.common.period
    }
    fn spatial_periods(&self) -> &[f64] {
        &self.common.periods
    }
    fn ellipticity(&self) -> f64 {
        1.0
    }
    fn modes(&self) -> usize {
        self.common.modes
    }
    fn kinetic(&self, _t: f64, q: &[f64], out: &mut [f64]) {
        let th = self.angles(q);
        out.copy_from_slice(&[1.0 + self.kinetic_mod * (1.0 - th[0].cos()), 0.0, 0.0, 1.0 + self.kinetic_mod * (1.0 - th[1].cos())]);
    }
    fn kinetic_jacobian(&self, _t: f64, q: &[f64], out: &mut [f64]) {
        let th = self.angles(q);
        out.iter_mut().for_each(|x| *x = 0.0);
        // k=0 touches L_00, k=1 touches L_11
        out[0] = self.kinetic_mod * TAU / self.common.periods[0] * th[0].sin();
        out[4 + 3] = self.kinetic_mod * TAU / self.common.periods[1] * th[1].sin();
    }
    fn potential(&self, _t: f64, q: &[f64]) -> f64 {
        let th = self.angles(q);
        self.amplitude * (2.0 - th[0].cos() - th[1].cos()) + self.coupling * (1.0 - (th[0] - th[1]).cos())
    }
    fn potential_gradient(&self, _t: f64, q: &[f64], out: &mut [f64]) {
        let th = self.angles(q);
        let c = self.coupling * (th[0] - th[1]).sin();
        out[0] = TAU / self.common.periods[0] * (self.amplitude * th[0].sin() + c);
        out[1] = TAU / self.common.periods[1] * (self.amplitude * th[1].sin() - c);
    }
    fn forcing(&self, _t: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
    }
    fn symmetry(&self) -> Option<&CrystalGroup> {
        self.common.symmetry.as_ref()
    }
}

/// Free particle `φ = ½∫|q̇|²` in `R^n`: convex, no mountain-pass geometry.
#[derive(Debug, Clone)]
pub struct Quadratic {
    common: Common,
    dimension: usize,
}

impl Quadratic {
    pub fn from_config(config: &Config) -> Result<Box<dyn PeriodicProblem>, FunctionalError> {
        let dimension: usize = config.get_or("dimension", 1)?;
        if dimension == 0 {
            return Err(FunctionalError::Problem("dimension must be positive".into()));
        }
        let common = common(config, dimension, "lattice")?;
        Ok(Box::new(Quadratic { common, dimension }))
    }
}

impl PeriodicProblem for Quadratic {
    fn name(&self) -> &str {
        "quadratic"
    }
    fn dimension(&self) -> usize {
        self.dimension
    }
    fn period(&self) -> f64 {
        self.common.period
    }
    fn spatial_periods(&self) -> &[f64] {
        &self.common.periods
    }
    fn ellipticity(&self) -> f64 {
        1.0
    }
    fn modes(&self) -> usize {
        self.common.modes
    }
    fn kinetic(&self, _t: f64, _q: &[f64], out: &mut [f64]) {
        let n = self.dimension;
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = if i == j { 1.0 } else { 0.0 };
            }
        }
    }
    fn kinetic_jacobian(&self, _t: f64, _q: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
    }
    fn potential(&self, _t: f64, _q: &[f64]) -> f64 {
        0.0
    }
    fn potential_gradient(&self, _t: f64, _q: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
    }
    fn forcing(&self, _t: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
    }
    fn symmetry(&self) -> Option<&CrystalGroup> {
        self.common.symmetry.as_ref()
    }
}

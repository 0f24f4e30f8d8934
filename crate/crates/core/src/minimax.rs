//! Equivariant deformation flow, mountain-pass search and classification of
//! critical points modulo the group action.

use rand::Rng;
use thiserror::Error;

use crate::functional::{
    distance_to_region, evaluate, gradient, normalize_to_region, ode_residual, orbit_distance, FunctionalError,
    LoopState, PeriodicProblem,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MinimaxError {
    #[error(transparent)]
    Functional(#[from] FunctionalError),
    #[error("flow step fell below {floor:e} at t={t}: value keeps increasing")]
    StepFloor { t: f64, floor: f64 },
    #[error("invalid parameters: {0}")]
    Parameters(String),
    #[error("mountain-pass geometry not satisfied: {0}")]
    Geometry(String),
}

/// Where the spatial cutoff is measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Distance to the box `{0 ≤ mean_i ≤ T_i}`.
    Fundamental,
    /// The box saturated by the lattice, i.e. everything; the cutoff then
    /// depends on values only and the flow commutes with the group.
    Saturated,
}

/// Level `c`, window `ε` and displacement bound `δ` of the deformation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationParams {
    pub level: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub region: Region,
    /// Fixed RK4 steps over `[0, δt]` before any halving.
    pub steps: usize,
}

impl DeformationParams {
    pub fn new(level: f64, epsilon: f64, delta: f64) -> Result<Self, MinimaxError> {
        if !(epsilon > 0.0 && delta > 0.0 && level.is_finite()) {
            return Err(MinimaxError::Parameters(format!("need epsilon, delta > 0; got {epsilon}, {delta}")));
        }
        Ok(DeformationParams { level, epsilon, delta, region: Region::Fundamental, steps: 32 })
    }

    pub fn with_region(mut self, region: Region) -> Self {
        self.region = region;
        self
    }

    /// `ε` from `8ε/δ ≤ gradient_floor`.
    pub fn epsilon_for(delta: f64, gradient_floor: f64) -> f64 {
        gradient_floor * delta / 8.0
    }
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// `χ = clamp((2ε − |φ−c|)/ε) · clamp((2δ − dist(q,S))/δ)`
pub fn cutoff(p: &dyn PeriodicProblem, dp: &DeformationParams, q: &LoopState, value: f64) -> f64 {
    let energy = clamp01((2.0 * dp.epsilon - (value - dp.level).abs()) / dp.epsilon);
    if energy == 0.0 {
        return 0.0;
    }
    let region = match dp.region {
        Region::Saturated => 1.0,
        Region::Fundamental => clamp01((2.0 * dp.delta - distance_to_region(p, q)) / dp.delta),
    };
    energy * region
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowReport {
    pub state: LoopState,
    pub start_value: f64,
    pub end_value: f64,
    pub displacement: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Value after each accepted step.
    pub trace: Vec<f64>,
    /// Smallest gradient norm seen where the cutoff was positive.
    pub min_gradient: f64,
    /// Whether `min_gradient ≥ 8ε/δ`.
    pub hypothesis_holds: bool,
}

type Extra<'a> = &'a dyn Fn(&LoopState) -> Result<f64, MinimaxError>;

/// `ψ = −χ g/‖g‖`, plus the gradient norm where `χ > 0`.
fn field(
    p: &dyn PeriodicProblem,
    dp: &DeformationParams,
    extra: Extra<'_>,
    q: &LoopState,
    min_grad: &mut f64,
) -> Result<LoopState, MinimaxError> {
    let value = evaluate(p, q)?;
    let mut chi = cutoff(p, dp, q, value);
    if chi > 0.0 {
        chi *= extra(q)?;
    }
    if chi == 0.0 {
        return Ok(LoopState::zeros(q.period(), q.dimension(), q.modes()));
    }
    let g = gradient(p, q)?;
    let gn = g.h1_norm();
    *min_grad = min_grad.min(gn);
    if gn == 0.0 {
        return Ok(g);
    }
    Ok(g.scaled(-chi / gn))
}

fn flow_with(
    p: &dyn PeriodicProblem,
    q: &LoopState,
    dp: &DeformationParams,
    t: f64,
    extra: Extra<'_>,
) -> Result<FlowReport, MinimaxError> {
    let start_value = evaluate(p, q)?;
    let mut report = FlowReport {
        state: q.clone(),
        start_value,
        end_value: start_value,
        displacement: 0.0,
        accepted_steps: 0,
        rejected_steps: 0,
        trace: Vec::new(),
        min_gradient: f64::INFINITY,
        hypothesis_holds: true,
    };
    let t = t.clamp(0.0, 1.0);
    if t == 0.0 {
        return Ok(report);
    }
    if cutoff(p, dp, q, start_value) == 0.0 || extra(q)? == 0.0 {
        return Ok(report);
    }
    let horizon = dp.delta * t;
    let base_step = horizon / dp.steps.max(1) as f64;
    let floor = base_step * 1e-12;
    let mut h = base_step;
    let mut elapsed = 0.0;
    let mut w = q.clone();
    let mut value = start_value;
    let mut min_grad = f64::INFINITY;
    while horizon - elapsed > 1e-15 * horizon {
        let step = h.min(horizon - elapsed);
        let k1 = field(p, dp, extra, &w, &mut min_grad)?;
        let k2 = field(p, dp, extra, &w.add(&k1.scaled(step / 2.0)), &mut min_grad)?;
        let k3 = field(p, dp, extra, &w.add(&k2.scaled(step / 2.0)), &mut min_grad)?;
        let k4 = field(p, dp, extra, &w.add(&k3.scaled(step)), &mut min_grad)?;
        let mut next = w.clone();
        next.axpy(step / 6.0, &k1);
        next.axpy(step / 3.0, &k2);
        next.axpy(step / 3.0, &k3);
        next.axpy(step / 6.0, &k4);
        let next_value = evaluate(p, &next)?;
        if next_value > value + 1e-13 * (1.0 + value.abs()) {
            report.rejected_steps += 1;
            h = step / 2.0;
            if h < floor {
                return Err(MinimaxError::StepFloor { t: elapsed / dp.delta, floor });
            }
            continue;
        }
        report.accepted_steps += 1;
        report.trace.push(next_value);
        elapsed += step;
        w = next;
        value = next_value;
        h = (h * 2.0).min(base_step);
    }
    report.displacement = w.sub(q).h1_norm();
    report.end_value = value;
    report.state = w;
    report.min_gradient = min_grad;
    report.hypothesis_holds = min_grad >= 8.0 * dp.epsilon / dp.delta;
    if !report.hypothesis_holds {
        log::warn!(
            "gradient {:.3e} below 8ε/δ = {:.3e} inside the deformation strip",
            min_grad,
            8.0 * dp.epsilon / dp.delta
        );
    }
    Ok(report)
}

/// `η(q, t)`: integrates `ψ` over `[0, δt]` with fixed-step RK4, halving
/// steps that would raise the value.
pub fn deformation_flow(
    p: &dyn PeriodicProblem,
    q: &LoopState,
    dp: &DeformationParams,
    t: f64,
) -> Result<FlowReport, MinimaxError> {
    flow_with(p, q, dp, t, &|_| Ok(1.0))
}

/// Deformation whose cutoff also vanishes on the orbit neighborhood of
/// radius `radius` around `candidates`.
#[derive(Debug, Clone)]
pub struct NeighborhoodDeformation {
    pub candidates: Vec<LoopState>,
    pub radius: f64,
    pub params: DeformationParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodReport {
    /// Samples starting in `φ^{c+ε}` outside the neighborhood.
    pub tested: usize,
    /// Of those, how many ended at or below `c − ε`.
    pub pushed_below: usize,
    pub hypothesis_violations: usize,
}

impl NeighborhoodDeformation {
    pub fn new(candidates: Vec<LoopState>, radius: f64, params: DeformationParams) -> Result<Self, MinimaxError> {
        if !(radius > 0.0) {
            return Err(MinimaxError::Parameters(format!("neighborhood radius must be positive, got {radius}")));
        }
        Ok(NeighborhoodDeformation { candidates, radius, params })
    }

    pub fn distance(&self, p: &dyn PeriodicProblem, q: &LoopState) -> Result<f64, MinimaxError> {
        let mut best = f64::INFINITY;
        for c in &self.candidates {
            best = best.min(orbit_distance(p, q, c)?);
        }
        Ok(best)
    }

    pub fn flow(&self, p: &dyn PeriodicProblem, q: &LoopState, t: f64) -> Result<FlowReport, MinimaxError> {
        let extra = |w: &LoopState| -> Result<f64, MinimaxError> {
            if self.candidates.is_empty() {
                return Ok(1.0);
            }
            Ok(clamp01((self.distance(p, w)? - self.radius) / self.radius))
        };
        flow_with(p, q, &self.params, t, &extra)
    }

    /// Runs the full flow on each sample lying in `φ^{c+ε}` outside `U` and
    /// counts those that end below `c − ε`.
    pub fn verify(&self, p: &dyn PeriodicProblem, samples: &[LoopState]) -> Result<NeighborhoodReport, MinimaxError> {
        let dp = &self.params;
        let mut report = NeighborhoodReport { tested: 0, pushed_below: 0, hypothesis_violations: 0 };
        for q in samples {
            let v = evaluate(p, q)?;
            if v > dp.level + dp.epsilon || (dp.region == Region::Fundamental && distance_to_region(p, q) > 0.0) {
                continue;
            }
            if !self.candidates.is_empty() && self.distance(p, q)? <= 2.0 * self.radius {
                continue;
            }
            report.tested += 1;
            let r = self.flow(p, q, 1.0)?;
            if r.end_value <= dp.level - dp.epsilon {
                report.pushed_below += 1;
            }
            if !r.hypothesis_holds {
                report.hypothesis_violations += 1;
            }
        }
        Ok(report)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentResult {
    pub state: LoopState,
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Steepest descent in `H¹` with Armijo backtracking.
pub fn descend(
    p: &dyn PeriodicProblem,
    start: &LoopState,
    gtol: f64,
    max_iter: usize,
) -> Result<DescentResult, MinimaxError> {
    let mut q = start.clone();
    let mut value = evaluate(p, &q)?;
    let mut g = gradient(p, &q)?;
    let mut gn = g.h1_norm();
    let mut step = 1.0;
    let mut it = 0;
    while gn > gtol && it < max_iter {
        it += 1;
        let mut accepted = false;
        for _ in 0..60 {
            let trial = q.add(&g.scaled(-step));
            let tv = evaluate(p, &trial)?;
            if tv <= value - 1e-4 * step * gn * gn {
                q = trial;
                value = tv;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        g = gradient(p, &q)?;
        gn = g.h1_norm();
        step = (step * 2.0).min(4.0);
    }
    Ok(DescentResult { state: q, value, gradient_norm: gn, iterations: it, converged: gn <= gtol })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MountainPassConfig {
    pub base: LoopState,
    pub far: LoopState,
    /// Optional level `a` with `φ(base), φ(far) ≤ a` below the rim.
    pub rim_level: Option<f64>,
    pub rim_radius: f64,
    /// Interior path points `N`; the path holds `N + 1` loops.
    pub path_points: usize,
    pub sweeps: usize,
    pub gtol: f64,
    /// Step length of one relaxation move.
    pub step: f64,
    /// Random directions sampled on the rim.
    pub rim_samples: usize,
}

impl MountainPassConfig {
    pub fn new(base: LoopState, far: LoopState, rim_radius: f64) -> Self {
        MountainPassConfig {
            base,
            far,
            rim_level: None,
            rim_radius,
            path_points: 40,
            sweeps: 2000,
            gtol: 1e-6,
            step: 0.5,
            rim_samples: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryReport {
    pub base_value: f64,
    pub far_value: f64,
    pub far_distance: f64,
    pub rim_min: f64,
    pub passed: bool,
    pub reason: Option<String>,
}

/// Samples the sphere of radius `r` about the base (the `±mean` axes plus
/// random directions) and checks it separates base and far point.
pub fn geometry_check<R: Rng + ?Sized>(
    p: &dyn PeriodicProblem,
    cfg: &MountainPassConfig,
    rng: &mut R,
) -> Result<GeometryReport, MinimaxError> {
    let base_value = evaluate(p, &cfg.base)?;
    let far_value = evaluate(p, &cfg.far)?;
    let far_distance = cfg.far.sub(&cfg.base).h1_norm();
    let r = cfg.rim_radius;
    let (period, n, modes) = (cfg.base.period(), cfg.base.dimension(), cfg.base.modes());
    let mut directions = Vec::new();
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut d = LoopState::zeros(period, n, modes);
            d.mean_mut()[i] = sign;
            directions.push(d);
        }
    }
    for _ in 0..cfg.rim_samples {
        directions.push(LoopState::random(period, n, modes, 1.0, rng));
    }
    let mut rim_min = f64::INFINITY;
    for d in directions {
        let norm = d.h1_norm();
        if norm == 0.0 {
            continue;
        }
        let point = cfg.base.add(&d.scaled(r / norm));
        rim_min = rim_min.min(evaluate(p, &point)?);
    }
    let top = base_value.max(far_value);
    let reason = if !(r > 0.0) {
        Some(format!("rim radius {r} is not positive"))
    } else if far_distance <= r {
        Some(format!("far point lies inside the rim ({far_distance:.6} <= {r})"))
    } else if let Some(a) = cfg.rim_level.filter(|&a| top > a) {
        Some(format!("endpoint value {top:.6e} above rim level {a:.6e}"))
    } else if rim_min <= cfg.rim_level.unwrap_or(f64::NEG_INFINITY).max(top) + 1e-9 * (1.0 + top.abs()) {
        Some(format!("rim minimum {rim_min:.6e} does not exceed endpoint values {top:.6e}"))
    } else {
        None
    };
    Ok(GeometryReport { base_value, far_value, far_distance, rim_min, passed: reason.is_none(), reason })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalCandidate {
    /// Normalized into the fundamental box.
    pub state: LoopState,
    pub value: f64,
    pub gradient_norm: f64,
    pub residual: f64,
    pub orbit_id: usize,
    pub converged: bool,
    pub label: String,
}

impl CriticalCandidate {
    pub fn new(p: &dyn PeriodicProblem, q: &LoopState, gtol: f64, label: &str) -> Result<Self, MinimaxError> {
        let (state, _) = normalize_to_region(p, q);
        let value = evaluate(p, &state)?;
        let gradient_norm = gradient(p, &state)?.h1_norm();
        let residual = ode_residual(p, &state)?;
        Ok(CriticalCandidate {
            state,
            value,
            gradient_norm,
            residual,
            orbit_id: 0,
            converged: gradient_norm <= gtol,
            label: label.to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MountainPassResult {
    pub candidate: CriticalCandidate,
    pub path: Vec<LoopState>,
    pub sweeps: usize,
    /// Highest path value after the last sweep.
    pub path_max: f64,
}

fn unit_tangent(path: &[LoopState], i: usize) -> LoopState {
    let t = path[i + 1].sub(&path[i - 1]);
    let n = t.h1_norm();
    if n > 0.0 {
        t.scaled(1.0 / n)
    } else {
        t
    }
}

/// Redistributes `path[lo..=hi]` evenly by `H¹` arclength, endpoints fixed.
fn equidistribute(path: &mut [LoopState], lo: usize, hi: usize) {
    if hi <= lo + 1 {
        return;
    }
    let seg = &path[lo..=hi];
    let mut arc = vec![0.0];
    for w in seg.windows(2) {
        arc.push(arc.last().unwrap() + w[1].sub(&w[0]).h1_norm());
    }
    let total = *arc.last().unwrap();
    if total == 0.0 {
        return;
    }
    let old: Vec<LoopState> = seg.to_vec();
    let count = hi - lo;
    let mut j = 0;
    for i in 1..count {
        let target = total * i as f64 / count as f64;
        while j + 1 < arc.len() - 1 && arc[j + 1] < target {
            j += 1;
        }
        let span = arc[j + 1] - arc[j];
        let s = if span > 0.0 { (target - arc[j]) / span } else { 0.0 };
        path[lo + i] = old[j].lerp(&old[j + 1], s.clamp(0.0, 1.0));
    }
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Climbing-image string method between `base` and `far`.
///
/// Interior points relax along the gradient component normal to the path,
/// the highest point moves along the gradient reflected in the tangent, and
/// each side of it is redistributed by arclength every sweep. The result is
/// polished with the reflected direction at a frozen tangent.
pub fn mountain_pass(
    p: &dyn PeriodicProblem,
    cfg: &MountainPassConfig,
    initial: Option<Vec<LoopState>>,
) -> Result<MountainPassResult, MinimaxError> {
    let n = cfg.path_points.max(2);
    let mut path = match initial {
        Some(path) if path.len() == n + 1 => path,
        Some(path) => {
            return Err(MinimaxError::Parameters(format!("initial path has {} loops, expected {}", path.len(), n + 1)))
        }
        None => (0..=n).map(|i| cfg.base.lerp(&cfg.far, i as f64 / n as f64)).collect(),
    };
    let mut values = path.iter().map(|q| evaluate(p, q)).collect::<Result<Vec<_>, _>>()?;
    let mut sweeps = 0;
    let mut top = argmax(&values[1..n]) + 1;
    while sweeps < cfg.sweeps {
        sweeps += 1;
        let grads = (1..n).map(|i| gradient(p, &path[i])).collect::<Result<Vec<_>, _>>()?;
        if grads[top - 1].h1_norm() <= cfg.gtol * 1e-2 {
            break;
        }
        let mut next = path.clone();
        for i in 1..n {
            let g = &grads[i - 1];
            let tau = unit_tangent(&path, i);
            let along = g.h1_inner(&tau);
            let mut dir = g.clone();
            dir.axpy(if i == top { -2.0 } else { -1.0 } * along, &tau);
            next[i].axpy(-cfg.step, &dir);
        }
        path = next;
        equidistribute(&mut path, 0, top);
        equidistribute(&mut path, top, n);
        values = path.iter().map(|q| evaluate(p, q)).collect::<Result<Vec<_>, _>>()?;
        top = argmax(&values[1..n]) + 1;
    }
    let path_max = values[top];
    let tau = unit_tangent(&path, top);
    let mut q = path[top].clone();
    for _ in 0..5000 {
        let g = gradient(p, &q)?;
        if g.h1_norm() <= cfg.gtol * 1e-4 {
            break;
        }
        let along = g.h1_inner(&tau);
        let mut dir = g.clone();
        dir.axpy(-2.0 * along, &tau);
        q.axpy(-cfg.step, &dir);
    }
    let candidate = CriticalCandidate::new(p, &q, cfg.gtol, "mountain_pass")?;
    Ok(MountainPassResult { candidate, path, sweeps, path_max })
}

/// Assigns `orbit_id`s: two candidates share an orbit when their orbit
/// distance is at most `tol·(1+‖q2‖)`; ids follow discovery order.
pub fn classify_orbits(
    p: &dyn PeriodicProblem,
    candidates: &mut [CriticalCandidate],
    tol: f64,
) -> Result<usize, MinimaxError> {
    let n = candidates.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            let q2 = &candidates[j].state;
            if orbit_distance(p, &candidates[i].state, q2)? <= tol * (1.0 + q2.h1_norm()) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut ids: Vec<Option<usize>> = vec![None; n];
    let mut next = 0;
    for i in 0..n {
        let root = find(&mut parent, i);
        let id = *ids[root].get_or_insert_with(|| {
            next += 1;
            next - 1
        });
        candidates[i].orbit_id = id;
    }
    Ok(next)
}

/// Default displacement bound: a tenth of the smallest spatial period.
pub fn default_delta(p: &dyn PeriodicProblem) -> f64 {
    p.spatial_periods().iter().cloned().fold(f64::INFINITY, f64::min) / 10.0
}

/// Default rim radius: a quarter of the distance to the nearest lattice
/// translate of a constant loop.
pub fn default_rim_radius(p: &dyn PeriodicProblem) -> f64 {
    0.25 * p.spatial_periods().iter().cloned().fold(f64::INFINITY, f64::min) * p.period().sqrt()
}

/// Gradient descent from a random small loop.
pub fn find_minimum<R: Rng + ?Sized>(
    p: &dyn PeriodicProblem,
    modes: usize,
    gtol: f64,
    rng: &mut R,
) -> Result<DescentResult, MinimaxError> {
    let start = LoopState::random(p.period(), p.dimension(), modes, 0.1, rng);
    descend(p, &start, gtol, 20_000)
}

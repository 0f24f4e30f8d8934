//! Fourier–Galerkin discretization of the periodic variational problem:
//! values, `H¹` gradients, the Euler–Lagrange residual and the action of
//! `Z^n ⋊ P` on loops.

mod loops;
mod problems;

use std::f64::consts::TAU;
use std::fmt;

use rand::Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::config::ConfigError;

pub use loops::{Grid, LoopState};
pub use problems::{CoupledPendulum, Pendulum, PeriodicProblem, ProblemBuilder, ProblemRegistry, Quadratic};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunctionalError {
    #[error("non-finite {what} at t={t}")]
    NonFinite { what: &'static str, t: f64 },
    #[error("problem declares no symmetry group")]
    NoSymmetry,
    #[error("loop has dimension {got}, problem has {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid problem: {0}")]
    Problem(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

fn check_shape(p: &dyn PeriodicProblem, q: &LoopState) -> Result<(), FunctionalError> {
    if q.dimension() != p.dimension() {
        return Err(FunctionalError::Dimension { expected: p.dimension(), got: q.dimension() });
    }
    Ok(())
}

fn finite(x: &[f64], what: &'static str, t: f64) -> Result<(), FunctionalError> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(FunctionalError::NonFinite { what, t })
    }
}

/// Samples of the Lagrangian's pieces at the quadrature nodes.
struct NodeData {
    grid: Grid,
    pos: Vec<f64>,
    vel: Vec<f64>,
}

impl NodeData {
    fn new(p: &dyn PeriodicProblem, q: &LoopState) -> Result<Self, FunctionalError> {
        check_shape(p, q)?;
        let grid = Grid::for_modes(q.period(), q.modes());
        let (pos, vel) = grid.synthesize(q);
        Ok(NodeData { grid, pos, vel })
    }
}

/// Per-node buffers for the callbacks.
struct Scratch {
    l: Vec<f64>,
    dl: Vec<f64>,
    wq: Vec<f64>,
    f: Vec<f64>,
    /// `L q̇`
    momentum: Vec<f64>,
    /// `½ ∂_q⟨L q̇, q̇⟩ − W_q + f`
    force: Vec<f64>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            l: vec![0.0; n * n],
            dl: vec![0.0; n * n * n],
            wq: vec![0.0; n],
            f: vec![0.0; n],
            momentum: vec![0.0; n],
            force: vec![0.0; n],
        }
    }

    /// Fills every buffer at node `(t, x, v)`.
    fn load(&mut self, p: &dyn PeriodicProblem, t: f64, x: &[f64], v: &[f64]) -> Result<(), FunctionalError> {
        let n = x.len();
        p.kinetic(t, x, &mut self.l);
        finite(&self.l, "kinetic matrix", t)?;
        p.kinetic_jacobian(t, x, &mut self.dl);
        finite(&self.dl, "kinetic jacobian", t)?;
        p.potential_gradient(t, x, &mut self.wq);
        finite(&self.wq, "potential gradient", t)?;
        p.forcing(t, &mut self.f);
        finite(&self.f, "forcing", t)?;
        for i in 0..n {
            self.momentum[i] = (0..n).map(|j| self.l[i * n + j] * v[j]).sum();
        }
        for k in 0..n {
            let d = &self.dl[k * n * n..(k + 1) * n * n];
            let quad: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| d[i * n + j] * v[i] * v[j]).sum();
            self.force[k] = 0.5 * quad - self.wq[k] + self.f[k];
        }
        Ok(())
    }
}

/// `φ(q)` by trapezoidal quadrature on `max(64, 4K+1)` nodes.
pub fn evaluate(p: &dyn PeriodicProblem, q: &LoopState) -> Result<f64, FunctionalError> {
    let nd = NodeData::new(p, q)?;
    let n = q.dimension();
    let mut l = vec![0.0; n * n];
    let mut f = vec![0.0; n];
    let mut total = 0.0;
    for (j, &t) in nd.grid.times.iter().enumerate() {
        let x = &nd.pos[j * n..(j + 1) * n];
        let v = &nd.vel[j * n..(j + 1) * n];
        p.kinetic(t, x, &mut l);
        finite(&l, "kinetic matrix", t)?;
        p.forcing(t, &mut f);
        finite(&f, "forcing", t)?;
        let w = p.potential(t, x);
        if !w.is_finite() {
            return Err(FunctionalError::NonFinite { what: "potential", t });
        }
        let mut kin = 0.0;
        for a in 0..n {
            for b in 0..n {
                kin += l[a * n + b] * v[a] * v[b];
            }
        }
        let work: f64 = f.iter().zip(x).map(|(a, b)| a * b).sum();
        total += 0.5 * kin - w + work;
    }
    Ok(total * nd.grid.weight())
}

/// `H¹`-Riesz representative of `dφ(q)`: the exact derivative of the
/// discretized functional with respect to each coefficient, divided by that
/// coefficient's `H¹` weight.
pub fn gradient(p: &dyn PeriodicProblem, q: &LoopState) -> Result<LoopState, FunctionalError> {
    let nd = NodeData::new(p, q)?;
    let n = q.dimension();
    let h = nd.grid.weight();
    let mut s = Scratch::new(n);
    let mut g = LoopState::zeros(q.period(), n, q.modes());
    for (j, &t) in nd.grid.times.iter().enumerate() {
        let x = &nd.pos[j * n..(j + 1) * n];
        let v = &nd.vel[j * n..(j + 1) * n];
        s.load(p, t, x, v)?;
        let data = g.data_mut();
        for i in 0..n {
            data[i] += s.force[i];
        }
        for k in 1..=q.modes() {
            let (c, sn, w) = (nd.grid.cos(j, k), nd.grid.sin(j, k), q.frequency(k));
            for i in 0..n {
                data[n * (2 * k - 1) + i] += -w * sn * s.momentum[i] + c * s.force[i];
                data[n * 2 * k + i] += w * c * s.momentum[i] + sn * s.force[i];
            }
        }
    }
    for b in 0..2 * q.modes() + 1 {
        let scale = h / g.block_weight(b);
        for x in &mut g.data_mut()[b * n..(b + 1) * n] {
            *x *= scale;
        }
    }
    Ok(g)
}

/// Normalized sup-norm of `d/dt(L q̇) − ½∂_q⟨L q̇,q̇⟩ + W_q − f` over the
/// quadrature nodes, with the time derivative taken spectrally.
pub fn ode_residual(p: &dyn PeriodicProblem, q: &LoopState) -> Result<f64, FunctionalError> {
    let nd = NodeData::new(p, q)?;
    let n = q.dimension();
    let m = nd.grid.nodes();
    let mut s = Scratch::new(n);
    let mut momentum = vec![vec![Complex::new(0.0, 0.0); m]; n];
    let mut force = vec![0.0; m * n];
    let (mut sup_f, mut sup_wq) = (0.0f64, 0.0f64);
    for (j, &t) in nd.grid.times.iter().enumerate() {
        s.load(p, t, &nd.pos[j * n..(j + 1) * n], &nd.vel[j * n..(j + 1) * n])?;
        for i in 0..n {
            momentum[i][j] = Complex::new(s.momentum[i], 0.0);
            force[j * n + i] = s.force[i];
        }
        sup_f = sup_f.max(norm(&s.f));
        sup_wq = sup_wq.max(norm(&s.wq));
    }
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let base = TAU / q.period();
    for series in &mut momentum {
        fwd.process(series);
        for (k, c) in series.iter_mut().enumerate() {
            let freq = if 2 * k < m {
                k as f64
            } else if 2 * k == m {
                0.0
            } else {
                k as f64 - m as f64
            };
            *c *= Complex::new(0.0, base * freq / m as f64);
        }
        inv.process(series);
    }
    let mut worst = 0.0f64;
    let mut r = vec![0.0; n];
    for j in 0..m {
        for i in 0..n {
            r[i] = momentum[i][j].re - force[j * n + i];
        }
        worst = worst.max(norm(&r));
    }
    Ok(worst / (1.0 + sup_f + sup_wq))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// An element `(m, h)` of `Z^n ⋊ P`; `m` in lattice coordinates, so the
/// translation part is `Σ m_i T_i e_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub translation: Vec<i64>,
    pub point: usize,
}

impl GroupElement {
    pub fn identity(n: usize) -> Self {
        GroupElement { translation: vec![0; n], point: 0 }
    }

    pub fn translation(m: Vec<i64>) -> Self {
        GroupElement { translation: m, point: 0 }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, h{})", self.translation, self.point)
    }
}

/// `β(h)` in lattice coordinates: `B_ij = β_ij T_j / T_i`, which must be
/// integral for the lattice `⊕ T_i Z e_i` to be invariant.
pub fn lattice_action(p: &dyn PeriodicProblem, point: usize) -> Result<Vec<Vec<i64>>, FunctionalError> {
    let sym = p.symmetry().ok_or(FunctionalError::NoSymmetry)?;
    let t = p.spatial_periods();
    let beta = sym.matrix(point);
    let mut out = vec![vec![0i64; t.len()]; t.len()];
    for i in 0..t.len() {
        for j in 0..t.len() {
            let x = beta[i][j] as f64 * t[j] / t[i];
            if (x - x.round()).abs() > 1e-9 * (1.0 + x.abs()) {
                return Err(FunctionalError::Problem(format!(
                    "point group element {point} does not preserve the period lattice"
                )));
            }
            out[i][j] = x.round() as i64;
        }
    }
    Ok(out)
}

/// `(m1, h1)(m2, h2) = (m1 + B(h1) m2, h1 h2)`
pub fn compose(p: &dyn PeriodicProblem, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, FunctionalError> {
    let sym = p.symmetry().ok_or(FunctionalError::NoSymmetry)?;
    let bm = lattice_action(p, a.point)?;
    let translation = (0..a.translation.len())
        .map(|i| a.translation[i] + bm[i].iter().zip(&b.translation).map(|(x, y)| x * y).sum::<i64>())
        .collect();
    Ok(GroupElement { translation, point: sym.point_group().mul(a.point, b.point) })
}

/// Random word of length `1..=max_len` in the generators `±e_i` and the
/// generators of `P`.
pub fn random_element<R: Rng + ?Sized>(
    p: &dyn PeriodicProblem,
    max_len: usize,
    rng: &mut R,
) -> Result<GroupElement, FunctionalError> {
    let sym = p.symmetry().ok_or(FunctionalError::NoSymmetry)?;
    let n = p.dimension();
    let pg = sym.point_group();
    let point_gens: Vec<usize> = pg.generators().iter().filter_map(|g| pg.index_of(g)).filter(|&i| i != 0).collect();
    let mut gens = Vec::new();
    for i in 0..n {
        for sign in [1, -1] {
            let mut m = vec![0; n];
            m[i] = sign;
            gens.push(GroupElement::translation(m));
        }
    }
    gens.extend(point_gens.iter().map(|&h| GroupElement { translation: vec![0; n], point: h }));
    let len = rng.gen_range(1..=max_len.max(1));
    let mut g = GroupElement::identity(n);
    for _ in 0..len {
        g = compose(p, &g, &gens[rng.gen_range(0..gens.len())])?;
    }
    Ok(g)
}

/// `β(h)` applied to every coefficient block.
pub fn apply_linear(p: &dyn PeriodicProblem, point: usize, q: &LoopState) -> Result<LoopState, FunctionalError> {
    check_shape(p, q)?;
    let sym = p.symmetry().ok_or(FunctionalError::NoSymmetry)?;
    let beta = sym.matrix(point);
    let n = q.dimension();
    let mut out = q.clone();
    for (dst, src) in out.blocks_mut().zip(q.blocks()) {
        for i in 0..n {
            dst[i] = (0..n).map(|j| beta[i][j] as f64 * src[j]).sum();
        }
    }
    Ok(out)
}

/// `(g q)(t) = β(h) q(t) + Σ m_i T_i e_i`
pub fn apply_group(p: &dyn PeriodicProblem, g: &GroupElement, q: &LoopState) -> Result<LoopState, FunctionalError> {
    let mut out = apply_linear(p, g.point, q)?;
    for ((a, m), t) in out.mean_mut().iter_mut().zip(&g.translation).zip(p.spatial_periods()) {
        *a += *m as f64 * t;
    }
    Ok(out)
}

/// Translates `q` so each mean coordinate lies in `[0, T_i)`; returns the
/// translated loop and the lattice coordinates used.
pub fn normalize_to_region(p: &dyn PeriodicProblem, q: &LoopState) -> (LoopState, Vec<i64>) {
    let mut out = q.clone();
    let mut shift = Vec::with_capacity(q.dimension());
    for (a, &t) in out.mean_mut().iter_mut().zip(p.spatial_periods()) {
        let mut m = -(*a / t).floor();
        let mut r = *a + m * t;
        if r >= t {
            m -= 1.0;
            r = 0.0;
        } else if r < 0.0 {
            r = 0.0;
        }
        *a = r;
        shift.push(m as i64);
    }
    (out, shift)
}

/// `H¹` distance from `q` to the region `{0 ≤ mean_i ≤ T_i}`.
pub fn distance_to_region(p: &dyn PeriodicProblem, q: &LoopState) -> f64 {
    let d2: f64 = q
        .mean()
        .iter()
        .zip(p.spatial_periods())
        .map(|(&a, &t)| {
            let d = if a < 0.0 { -a } else if a > t { a - t } else { 0.0 };
            d * d
        })
        .sum();
    q.period().sqrt() * d2.sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub samples: usize,
    pub max_deviation: f64,
    /// Largest `|φ(gq) − φ(q)| / (1 + |φ(q)|)`.
    pub max_relative: f64,
    pub worst_element: Option<GroupElement>,
    pub passed: bool,
}

pub const INVARIANCE_TOL: f64 = 1e-10;

/// Random loop for sampling: band-limited oscillation plus a mean spread
/// over a few period cells.
pub fn sample_loop<R: Rng + ?Sized>(p: &dyn PeriodicProblem, modes: usize, rng: &mut R) -> LoopState {
    let mut q = LoopState::random(p.period(), p.dimension(), modes, 1.0, rng);
    for (a, &t) in q.mean_mut().iter_mut().zip(p.spatial_periods()) {
        *a = rng.gen_range(-2.0..2.0) * t;
    }
    q
}

/// Compares `φ(gq)` with `φ(q)` on random pairs, words of length ≤ 3.
pub fn invariance_check<R: Rng + ?Sized>(
    p: &dyn PeriodicProblem,
    samples: usize,
    rng: &mut R,
) -> Result<InvarianceReport, FunctionalError> {
    let mut report =
        InvarianceReport { samples, max_deviation: 0.0, max_relative: 0.0, worst_element: None, passed: true };
    for _ in 0..samples {
        let q = sample_loop(p, p.modes(), rng);
        let g = random_element(p, 3, rng)?;
        let base = evaluate(p, &q)?;
        let moved = evaluate(p, &apply_group(p, &g, &q)?)?;
        let dev = (moved - base).abs();
        let rel = dev / (1.0 + base.abs());
        report.max_deviation = report.max_deviation.max(dev);
        if rel > report.max_relative || report.worst_element.is_none() {
            report.max_relative = report.max_relative.max(rel);
            report.worst_element = Some(g);
        }
    }
    report.passed = report.max_relative <= INVARIANCE_TOL;
    Ok(report)
}

/// Sampled checks of symmetry, ellipticity and periodicity of `L`, `W`,
/// zero mean of `f`, and lattice invariance under `β`.
pub fn validate_problem<R: Rng + ?Sized>(p: &dyn PeriodicProblem, rng: &mut R) -> Result<(), FunctionalError> {
    let n = p.dimension();
    let t0 = p.period();
    let periods = p.spatial_periods().to_vec();
    let bad = |msg: String| Err(FunctionalError::Problem(msg));
    if periods.len() != n {
        return bad(format!("{} spatial periods for dimension {n}", periods.len()));
    }
    let alpha = p.ellipticity();
    if !(alpha > 0.0) {
        return bad(format!("ellipticity must be positive, got {alpha}"));
    }
    let mut l = vec![0.0; n * n];
    let mut l2 = vec![0.0; n * n];
    for _ in 0..32 {
        let t = rng.gen_range(0.0..t0);
        let q: Vec<f64> = periods.iter().map(|&tp| rng.gen_range(-2.0..2.0) * tp).collect();
        p.kinetic(t, &q, &mut l);
        let scale = norm(&l).max(f64::MIN_POSITIVE);
        for i in 0..n {
            for j in 0..n {
                if (l[i * n + j] - l[j * n + i]).abs() > 1e-12 * scale {
                    return bad(format!("L({t}, {q:?}) is not symmetric"));
                }
            }
        }
        let xi: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let quad: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| l[i * n + j] * xi[i] * xi[j]).sum();
        if quad < alpha * xi.iter().map(|x| x * x).sum::<f64>() * (1.0 - 1e-12) {
            return bad(format!("L({t}, {q:?}) violates ellipticity {alpha}"));
        }
        let w = p.potential(t, &q);
        let mut shifted = vec![(t + t0, q.clone())];
        for i in 0..n {
            let mut qs = q.clone();
            qs[i] += periods[i];
            shifted.push((t, qs));
        }
        for (ts, qs) in shifted {
            p.kinetic(ts, &qs, &mut l2);
            let dl = l.iter().zip(&l2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let dw = (p.potential(ts, &qs) - w).abs();
            if dl > 1e-9 * (1.0 + scale) || dw > 1e-9 * (1.0 + w.abs()) {
                return bad(format!("L or W not periodic at t={t}, q={q:?}"));
            }
        }
    }
    let nodes = 256;
    let mut f = vec![0.0; n];
    let mut mean = vec![0.0; n];
    let mut fmax = 0.0f64;
    for j in 0..nodes {
        p.forcing(t0 * j as f64 / nodes as f64, &mut f);
        fmax = fmax.max(norm(&f));
        mean.iter_mut().zip(&f).for_each(|(m, x)| *m += x / nodes as f64);
    }
    if norm(&mean) > 1e-10 * fmax {
        return bad(format!("forcing has nonzero mean {mean:?}"));
    }
    if let Some(sym) = p.symmetry() {
        if sym.rank() != n {
            return bad(format!("symmetry has rank {}, problem has dimension {n}", sym.rank()));
        }
        for h in 0..sym.point_group().order() {
            lattice_action(p, h)?;
        }
    }
    Ok(())
}

/// `‖q1 − q2‖` after the best point-group element and lattice shift, i.e.
/// `min_h ‖β(h) q1 − q2‖` with mean differences wrapped to `[−T_i/2, T_i/2]`.
pub fn orbit_distance(p: &dyn PeriodicProblem, q1: &LoopState, q2: &LoopState) -> Result<f64, FunctionalError> {
    let order = p.symmetry().map_or(1, |s| s.point_group().order());
    let mut best = f64::INFINITY;
    for h in 0..order {
        let moved = if p.symmetry().is_some() { apply_linear(p, h, q1)? } else { q1.clone() };
        let mut d = moved.sub(q2);
        for (a, &t) in d.mean_mut().iter_mut().zip(p.spatial_periods()) {
            *a -= (*a / t).round() * t;
        }
        best = best.min(d.h1_norm());
    }
    Ok(best)
}

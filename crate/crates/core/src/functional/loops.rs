//! Truncated Fourier representation of `T0`-periodic loops in `R^n` and the
//! `H¹` geometry on their coefficients.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use rand::Rng;

/// `q(t) = a_0 + Σ_k a_k cos(ω_k t) + b_k sin(ω_k t)`, `ω_k = 2πk/T0`.
///
/// Coefficients are stored flat: the mean, then `cos_1, sin_1, cos_2, …`,
/// each a block of `dimension` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopState {
    period: f64,
    dimension: usize,
    modes: usize,
    data: Vec<f64>,
}

impl LoopState {
    pub fn zeros(period: f64, dimension: usize, modes: usize) -> Self {
        LoopState { period, dimension, modes, data: vec![0.0; dimension * (2 * modes + 1)] }
    }

    pub fn constant(period: f64, modes: usize, value: &[f64]) -> Self {
        let mut q = Self::zeros(period, value.len(), modes);
        q.mean_mut().copy_from_slice(value);
        q
    }

    pub fn from_data(period: f64, dimension: usize, modes: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), dimension * (2 * modes + 1), "coefficient count");
        LoopState { period, dimension, modes, data }
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Number of Fourier modes `K`.
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn mean(&self) -> &[f64] {
        &self.data[..self.dimension]
    }

    pub fn mean_mut(&mut self) -> &mut [f64] {
        &mut self.data[..self.dimension]
    }

    pub fn cos(&self, k: usize) -> &[f64] {
        let n = self.dimension;
        &self.data[n * (2 * k - 1)..n * 2 * k]
    }

    pub fn sin(&self, k: usize) -> &[f64] {
        let n = self.dimension;
        &self.data[n * 2 * k..n * (2 * k + 1)]
    }

    /// Coefficient blocks: index 0 is the mean, then alternating cos/sin.
    pub fn blocks(&self) -> std::slice::Chunks<'_, f64> {
        self.data.chunks(self.dimension)
    }

    pub fn blocks_mut(&mut self) -> std::slice::ChunksMut<'_, f64> {
        self.data.chunks_mut(self.dimension)
    }

    pub fn frequency(&self, k: usize) -> f64 {
        TAU * k as f64 / self.period
    }

    /// `H¹` weight of block `b`: `T0` for the mean, `(T0/2)(1+ω_k²)` otherwise.
    pub fn block_weight(&self, block: usize) -> f64 {
        if block == 0 {
            self.period
        } else {
            let w = self.frequency(block.div_ceil(2));
            0.5 * self.period * (1.0 + w * w)
        }
    }

    pub fn h1_inner(&self, other: &LoopState) -> f64 {
        self.blocks()
            .zip(other.blocks())
            .enumerate()
            .map(|(b, (x, y))| self.block_weight(b) * x.iter().zip(y).map(|(a, c)| a * c).sum::<f64>())
            .sum()
    }

    pub fn h1_norm(&self) -> f64 {
        self.h1_inner(self).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// `self += alpha * other`
    pub fn axpy(&mut self, alpha: f64, other: &LoopState) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn scaled(&self, alpha: f64) -> LoopState {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|x| *x *= alpha);
        out
    }

    pub fn sub(&self, other: &LoopState) -> LoopState {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn add(&self, other: &LoopState) -> LoopState {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    /// `(1-s) self + s other`
    pub fn lerp(&self, other: &LoopState, s: f64) -> LoopState {
        let mut out = self.scaled(1.0 - s);
        out.axpy(s, other);
        out
    }

    pub fn value_at(&self, t: f64, out: &mut [f64]) {
        out.copy_from_slice(self.mean());
        for k in 1..=self.modes {
            let (c, s) = (self.frequency(k) * t).sin_cos();
            for i in 0..self.dimension {
                out[i] += self.cos(k)[i] * s + self.sin(k)[i] * c;
            }
        }
    }

    pub fn velocity_at(&self, t: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for k in 1..=self.modes {
            let w = self.frequency(k);
            let (s, c) = (w * t).sin_cos();
            for i in 0..self.dimension {
                out[i] += w * (-self.cos(k)[i] * s + self.sin(k)[i] * c);
            }
        }
    }

    /// Random loop whose block `k` has entries uniform in `±scale/(1+k)`.
    pub fn random<R: Rng + ?Sized>(period: f64, dimension: usize, modes: usize, scale: f64, rng: &mut R) -> Self {
        let mut q = Self::zeros(period, dimension, modes);
        for (b, block) in q.blocks_mut().enumerate() {
            let k = b.div_ceil(2) as f64;
            for x in block {
                *x = rng.gen_range(-1.0..1.0) * scale / (1.0 + k);
            }
        }
        q
    }

    /// Text form: `loop n=<n> K=<K>`, a `period` line, then one line per block.
    pub fn to_text(&self) -> String {
        let mut s = format!("loop n={} K={}\n", self.dimension, self.modes);
        let _ = writeln!(s, "period {:?}", self.period);
        let row = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "mean {}", row(self.mean()));
        for k in 1..=self.modes {
            let _ = writeln!(s, "cos {k} {}", row(self.cos(k)));
            let _ = writeln!(s, "sin {k} {}", row(self.sin(k)));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, String> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or("empty loop file")?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("loop") {
            return Err(format!("bad header {header:?}"));
        }
        let field = |p: Option<&str>, key: &str| -> Result<usize, String> {
            p.and_then(|s| s.strip_prefix(key))
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| format!("bad header {header:?}"))
        };
        let n = field(parts.next(), "n=")?;
        let modes = field(parts.next(), "K=")?;
        let floats = |s: &str| -> Result<Vec<f64>, String> {
            s.split_whitespace().map(|x| x.parse::<f64>().map_err(|e| format!("{x:?}: {e}"))).collect()
        };
        let period_line = lines.next().ok_or("missing period line")?;
        let period = period_line
            .strip_prefix("period")
            .and_then(|s| s.trim().parse::<f64>().ok())
            .ok_or_else(|| format!("bad period line {period_line:?}"))?;
        let mut q = LoopState::zeros(period, n, modes);
        let mean_line = lines.next().ok_or("missing mean line")?;
        let mean = floats(mean_line.strip_prefix("mean").ok_or("expected mean line")?)?;
        if mean.len() != n {
            return Err("mean has wrong length".into());
        }
        q.mean_mut().copy_from_slice(&mean);
        for b in 1..=2 * modes {
            let line = lines.next().ok_or_else(|| format!("missing coefficient block {b}"))?;
            let kind = if b % 2 == 1 { "cos" } else { "sin" };
            let rest = line.strip_prefix(kind).ok_or_else(|| format!("expected {kind} line, got {line:?}"))?;
            let mut vals = floats(rest)?;
            if vals.len() != n + 1 || vals.remove(0) as usize != b.div_ceil(2) {
                return Err(format!("malformed line {line:?}"));
            }
            q.data[n * b..n * (b + 1)].copy_from_slice(&vals);
        }
        Ok(q)
    }
}

/// Uniform quadrature nodes with cached trigonometric tables.
#[derive(Debug, Clone)]
pub struct Grid {
    pub period: f64,
    pub modes: usize,
    pub times: Vec<f64>,
    /// `cos(ω_k t_j)` at `[j * modes + (k-1)]`
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Grid {
    /// `max(64, 4K+1)` nodes.
    pub fn for_modes(period: f64, modes: usize) -> Self {
        Self::with_nodes(period, modes, (4 * modes + 1).max(64))
    }

    pub fn with_nodes(period: f64, modes: usize, nodes: usize) -> Self {
        let times: Vec<f64> = (0..nodes).map(|j| period * j as f64 / nodes as f64).collect();
        let mut cos = Vec::with_capacity(nodes * modes);
        let mut sin = Vec::with_capacity(nodes * modes);
        for &t in &times {
            for k in 1..=modes {
                let (s, c) = (TAU * k as f64 * t / period).sin_cos();
                cos.push(c);
                sin.push(s);
            }
        }
        Grid { period, modes, times, cos, sin }
    }

    pub fn nodes(&self) -> usize {
        self.times.len()
    }

    /// Trapezoidal weight (uniform for periodic integrands).
    pub fn weight(&self) -> f64 {
        self.period / self.nodes() as f64
    }

    pub fn cos(&self, j: usize, k: usize) -> f64 {
        self.cos[j * self.modes + k - 1]
    }

    pub fn sin(&self, j: usize, k: usize) -> f64 {
        self.sin[j * self.modes + k - 1]
    }

    /// Positions and velocities at every node, row-major `nodes × n`.
    pub fn synthesize(&self, q: &LoopState) -> (Vec<f64>, Vec<f64>) {
        let n = q.dimension();
        let m = self.nodes();
        let mut pos = vec![0.0; m * n];
        let mut vel = vec![0.0; m * n];
        for j in 0..m {
            let p = &mut pos[j * n..(j + 1) * n];
            p.copy_from_slice(q.mean());
            let v = &mut vel[j * n..(j + 1) * n];
            for k in 1..=q.modes() {
                let (c, s, w) = (self.cos(j, k), self.sin(j, k), q.frequency(k));
                let (a, b) = (q.cos(k), q.sin(k));
                for i in 0..n {
                    p[i] += a[i] * c + b[i] * s;
                    v[i] += w * (b[i] * c - a[i] * s);
                }
            }
        }
        (pos, vel)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn h1_norm_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let q = LoopState::random(2.7, 2, 8, 1.0, &mut rng);
            let grid = Grid::for_modes(q.period(), q.modes());
            let (pos, vel) = grid.synthesize(&q);
            let quad: f64 = grid.weight() * pos.iter().chain(&vel).map(|x| x * x).sum::<f64>();
            let closed = q.h1_norm().powi(2);
            assert!((quad - closed).abs() <= 1e-10 * closed, "{quad} vs {closed}");
        }
    }

    #[test]
    fn pointwise_synthesis_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q = LoopState::random(1.5, 3, 4, 1.0, &mut rng);
        let grid = Grid::for_modes(q.period(), q.modes());
        let (pos, vel) = grid.synthesize(&q);
        let (mut p, mut v) = (vec![0.0; 3], vec![0.0; 3]);
        q.value_at(grid.times[7], &mut p);
        q.velocity_at(grid.times[7], &mut v);
        for i in 0..3 {
            assert!((p[i] - pos[7 * 3 + i]).abs() < 1e-13);
            assert!((v[i] - vel[7 * 3 + i]).abs() < 1e-12);
        }
    }

    #[test]
    fn text_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q = LoopState::random(std::f64::consts::TAU, 2, 5, 3.0, &mut rng);
        let back = LoopState::from_text(&q.to_text()).unwrap();
        assert_eq!(back, q);
        let c = LoopState::constant(1.0, 0, &[0.25]);
        assert_eq!(LoopState::from_text(&c.to_text()).unwrap(), c);
        assert!(LoopState::from_text("loop n=1 K=1\nperiod 1\nmean 0\n").is_err());
    }

    #[test]
    fn single_mode_norm() {
        // ε sin(2πt/T0): ‖q‖² = (T0/2)(1+ω²)ε²
        let mut q = LoopState::zeros(3.0, 1, 2);
        q.data_mut()[2] = 0.1;
        let w = TAU / 3.0;
        assert!((q.h1_norm().powi(2) - 1.5 * (1.0 + w * w) * 0.01).abs() < 1e-15);
    }
}

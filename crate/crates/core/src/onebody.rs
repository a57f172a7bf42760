//! One particle in a one-dimensional trap.
//!
//! `H = -½ d²/dq² + V(q)` is discretised with the five-point fourth-order
//! stencil on a uniform grid with Dirichlet walls, and the lowest states are
//! extracted with the banded bisection solver in [`crate::linalg`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymBanded;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TrapKind {
    /// `V = ½q²`, so that `ε_n = n + ½`.
    Harmonic,
    /// `V = |q|^z`.
    PowerLaw { z: f64 },
    /// `V = Σ c_k q^k`.
    Polynomial { coefficients: Vec<f64> },
    /// Hard walls at `±width/2`.
    InfiniteWell { width: f64 },
    /// `V = a q⁴ − b q²`.
    DoubleWell { a: f64, b: f64 },
    /// Piecewise-linear potential through `(q[i], v[i])`, constant outside.
    CustomSampled { q: Vec<f64>, v: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapSpec {
    pub potential: TrapKind,
    /// Position of the trap origin.
    #[serde(default)]
    pub offset: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub q_min: f64,
    pub q_max: f64,
    pub n_points: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub tol_ortho: f64,
    pub degeneracy_tol: f64,
    pub boundary_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol_ortho: 1e-8, degeneracy_tol: 1e-9, boundary_tol: 1e-7 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OneBodySolution {
    pub trap: TrapSpec,
    /// Grid actually used (the box itself for an infinite well).
    pub grid: Grid,
    pub energies: Vec<f64>,
    /// `wavefunctions[n][i] = φ_n(q_i)`, normalised with the trapezoid rule.
    pub wavefunctions: Vec<Vec<f64>>,
    pub derivatives: Vec<Vec<f64>>,
    pub parities: Option<Vec<i8>>,
}

impl TrapSpec {
    pub fn new(potential: TrapKind) -> Self {
        TrapSpec { potential, offset: 0.0 }
    }

    pub fn harmonic() -> Self {
        Self::new(TrapKind::Harmonic)
    }

    pub fn infinite_well(width: f64) -> Self {
        Self::new(TrapKind::InfiniteWell { width })
    }

    pub fn power_law(z: f64) -> Self {
        Self::new(TrapKind::PowerLaw { z })
    }

    pub fn double_well(a: f64, b: f64) -> Self {
        Self::new(TrapKind::DoubleWell { a, b })
    }

    pub fn validate(&self) -> Result<()> {
        match &self.potential {
            TrapKind::PowerLaw { z } if !(*z > 0.0) => {
                Err(Error::Invalid(format!("power-law exponent must be positive, got {z}")))
            }
            TrapKind::InfiniteWell { width } if !(*width > 0.0) => {
                Err(Error::Invalid(format!("well width must be positive, got {width}")))
            }
            TrapKind::Polynomial { coefficients } if coefficients.is_empty() => {
                Err(Error::Invalid("polynomial needs at least one coefficient".into()))
            }
            TrapKind::CustomSampled { q, v } => {
                if q.len() != v.len() || q.len() < 2 {
                    return Err(Error::Invalid("custom potential needs ≥2 matching (q, v) samples".into()));
                }
                if q.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Invalid("custom potential abscissae must increase".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Potential relative to the trap origin, `V(q - offset)`.
    pub fn potential(&self, q: f64) -> f64 {
        let x = q - self.offset;
        match &self.potential {
            TrapKind::Harmonic => 0.5 * x * x,
            TrapKind::PowerLaw { z } => x.abs().powf(*z),
            TrapKind::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
            }
            TrapKind::InfiniteWell { .. } => 0.0,
            TrapKind::DoubleWell { a, b } => a * x.powi(4) - b * x * x,
            TrapKind::CustomSampled { q, v } => interp(q, v, x),
        }
    }

    /// Reflection symmetry about the origin, checked by sampling.
    pub fn is_symmetric(&self) -> bool {
        let reach = match &self.potential {
            TrapKind::InfiniteWell { .. } => return true,
            TrapKind::CustomSampled { q, .. } => q[0].abs().min(q[q.len() - 1].abs()),
            _ => 10.0,
        };
        (1..=200).all(|k| {
            let x = reach * k as f64 / 200.0;
            let l = self.potential(self.offset - x);
            let r = self.potential(self.offset + x);
            (l - r).abs() <= 1e-12 * (1.0 + l.abs().max(r.abs()))
        })
    }

    pub fn name(&self) -> &'static str {
        match self.potential {
            TrapKind::Harmonic => "harmonic",
            TrapKind::PowerLaw { .. } => "power_law",
            TrapKind::Polynomial { .. } => "polynomial",
            TrapKind::InfiniteWell { .. } => "infinite_well",
            TrapKind::DoubleWell { .. } => "double_well",
            TrapKind::CustomSampled { .. } => "custom_sampled",
        }
    }
}

fn interp(q: &[f64], v: &[f64], x: f64) -> f64 {
    if x <= q[0] {
        return v[0];
    }
    if x >= q[q.len() - 1] {
        return v[v.len() - 1];
    }
    let j = q.partition_point(|&p| p <= x) - 1;
    let t = (x - q[j]) / (q[j + 1] - q[j]);
    v[j] + t * (v[j + 1] - v[j])
}

impl Grid {
    pub fn new(q_min: f64, q_max: f64, n_points: usize) -> Self {
        Grid { q_min, q_max, n_points }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q_min < self.q_max) {
            return Err(Error::Invalid(format!("grid needs q_min < q_max ({} ≥ {})", self.q_min, self.q_max)));
        }
        if self.n_points < 64 {
            return Err(Error::Invalid(format!("grid needs ≥ 64 points, got {}", self.n_points)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.q_max - self.q_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.q_min + i as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }

    /// Same interval, half the spacing.
    pub fn refined(&self) -> Grid {
        Grid { n_points: 2 * (self.n_points - 1) + 1, ..*self }
    }
}

pub fn analytic_energy(kind: &TrapKind, n: usize) -> Result<f64> {
    match kind {
        TrapKind::Harmonic => Ok(n as f64 + 0.5),
        TrapKind::InfiniteWell { width } => {
            let k = (n + 1) as f64;
            Ok(PI * PI / (2.0 * width * width) * k * k)
        }
        other => Err(Error::UnsupportedKind(TrapSpec::new(other.clone()).name().into())),
    }
}

/// Fourth-order central second-difference weights for `-½ d²/dq²`.
fn kinetic_weights(h: f64) -> [f64; 3] {
    let s = 1.0 / (24.0 * h * h);
    [30.0 * s, -16.0 * s, s]
}

pub fn solve_one_body(trap: &TrapSpec, grid: &Grid, n_states: usize) -> Result<OneBodySolution> {
    solve_one_body_with(trap, grid, n_states, &SolverOptions::default())
}

pub fn solve_one_body_with(
    trap: &TrapSpec,
    grid: &Grid,
    n_states: usize,
    opts: &SolverOptions,
) -> Result<OneBodySolution> {
    trap.validate()?;
    grid.validate()?;
    if n_states == 0 {
        return Err(Error::Invalid("need at least one state".into()));
    }
    if n_states > grid.n_points / 4 {
        return Err(Error::GridTooSmall(format!(
            "{n_states} states requested but a {}-point grid supports at most {}",
            grid.n_points,
            grid.n_points / 4
        )));
    }
    let (grid, walls) = match trap.potential {
        TrapKind::InfiniteWell { width } => (
            Grid::new(trap.offset - 0.5 * width, trap.offset + 0.5 * width, grid.n_points),
            true,
        ),
        _ => (*grid, false),
    };
    let h = grid.spacing();
    let m = grid.n_points - 2;
    let [d0, d1, d2] = kinetic_weights(h);
    let mut a = SymBanded::zeros(m, 2);
    for j in 0..m {
        a.set(j, 0, d0 + trap.potential(grid.point(j + 1)));
        if j + 1 < m {
            a.set(j, 1, d1);
        }
        if j + 2 < m {
            a.set(j, 2, d2);
        }
    }
    if walls {
        // odd reflection through the wall: φ(-h) = -φ(h)
        a.add(0, 0, -d2);
        a.add(m - 1, 0, -d2);
    }
    let (energies, vectors) = a.lowest_eigenpairs(n_states)?;

    for (n, w) in energies.windows(2).enumerate() {
        if w[1] - w[0] < opts.degeneracy_tol {
            return Err(Error::DegenerateSpectrum(format!(
                "ε_{} - ε_{} = {:e}",
                n + 1,
                n,
                w[1] - w[0]
            )));
        }
    }

    let scale = 1.0 / h.sqrt();
    let mut wavefunctions = Vec::with_capacity(n_states);
    for v in &vectors {
        let mut phi = vec![0.0; grid.n_points];
        for (j, x) in v.iter().enumerate() {
            phi[j + 1] = x * scale;
        }
        let peak = phi.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if let Some(first) = phi.iter().find(|x| x.abs() > 1e-3 * peak) {
            if *first < 0.0 {
                phi.iter_mut().for_each(|x| *x = -*x);
            }
        }
        wavefunctions.push(phi);
    }

    if !walls {
        let np = grid.n_points;
        for (n, phi) in wavefunctions.iter().enumerate() {
            let edge = [phi[1], phi[2], phi[np - 2], phi[np - 3]]
                .iter()
                .fold(0.0f64, |acc, x| acc.max(x.abs()));
            if edge >= opts.boundary_tol {
                return Err(Error::GridTooSmall(format!(
                    "state {n} has amplitude {edge:e} at the grid edge"
                )));
            }
        }
    }

    for i in 0..n_states {
        for j in 0..=i {
            let o = overlap(&wavefunctions[i], &wavefunctions[j], h);
            let e = if i == j { 1.0 } else { 0.0 };
            if (o - e).abs() >= opts.tol_ortho {
                return Err(Error::NonconvergedEigensolver(format!(
                    "⟨φ_{i}|φ_{j}⟩ = {o:e}"
                )));
            }
        }
    }

    let derivatives = wavefunctions.iter().map(|phi| derivative(phi, h)).collect();
    let mut sol = OneBodySolution {
        trap: trap.clone(),
        grid,
        energies,
        wavefunctions,
        derivatives,
        parities: None,
    };
    if trap.is_symmetric() {
        let parities: Vec<i8> = (0..n_states).map(|n| if n % 2 == 0 { 1 } else { -1 }).collect();
        for (n, &p) in parities.iter().enumerate() {
            let o = sol.reflection_overlap(n);
            if o * f64::from(p) < 0.9 {
                return Err(Error::NonconvergedEigensolver(format!(
                    "state {n} reflection overlap {o:.6} contradicts parity {p}"
                )));
            }
        }
        sol.parities = Some(parities);
    }
    Ok(sol)
}

/// Energies extrapolated from `grid` and its refinement, assuming an `h⁴`
/// leading error.
pub fn richardson_energies(trap: &TrapSpec, grid: &Grid, n_states: usize) -> Result<Vec<f64>> {
    let coarse = solve_one_body(trap, grid, n_states)?;
    let fine = solve_one_body(trap, &grid.refined(), n_states)?;
    Ok(coarse
        .energies
        .iter()
        .zip(&fine.energies)
        .map(|(c, f)| (16.0 * f - c) / 15.0)
        .collect())
}

pub fn parity_of(sol: &OneBodySolution, n: usize) -> Result<i8> {
    if !sol.trap.is_symmetric() {
        return Err(Error::AsymmetricTrap);
    }
    if n >= sol.energies.len() {
        return Err(Error::StateOutOfRange(n, sol.energies.len()));
    }
    Ok(if n % 2 == 0 { 1 } else { -1 })
}

fn overlap(a: &[f64], b: &[f64], h: f64) -> f64 {
    // endpoints vanish, so the trapezoid rule is a plain sum
    h * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
}

/// Fourth-order central differences inside, lower order at the ends.
fn derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    for i in 2..n - 2 {
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    }
    d[1] = (f[2] - f[0]) / (2.0 * h);
    d[n - 2] = (f[n - 1] - f[n - 3]) / (2.0 * h);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    d
}

impl OneBodySolution {
    pub fn n_states(&self) -> usize {
        self.energies.len()
    }

    pub fn spacing(&self) -> f64 {
        self.grid.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        self.grid.points()
    }

    pub fn overlap(&self, m: usize, n: usize) -> f64 {
        overlap(&self.wavefunctions[m], &self.wavefunctions[n], self.spacing())
    }

    /// Linear interpolation of `φ_n` at an arbitrary point (zero off-grid).
    pub fn eval(&self, n: usize, q: f64) -> f64 {
        let h = self.spacing();
        let x = (q - self.grid.q_min) / h;
        if x < 0.0 || x > (self.grid.n_points - 1) as f64 {
            return 0.0;
        }
        let j = (x.floor() as usize).min(self.grid.n_points - 2);
        let t = x - j as f64;
        let phi = &self.wavefunctions[n];
        phi[j] * (1.0 - t) + phi[j + 1] * t
    }

    /// `∫ φ_n(q) φ_n(2·offset − q) dq`, which is ±1 for a state of definite
    /// parity about the trap origin.
    pub fn reflection_overlap(&self, n: usize) -> f64 {
        let h = self.spacing();
        let c = 2.0 * self.trap.offset;
        let phi = &self.wavefunctions[n];
        h * self
            .points()
            .iter()
            .zip(phi)
            .map(|(&q, &p)| p * self.eval(n, c - q))
            .sum::<f64>()
    }
}

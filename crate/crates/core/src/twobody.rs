//! Two-body matrix elements `⟨αβ|V|γδ⟩ = ∫∫ φ_α φ_γ(q₁) V(q₁−q₂) φ_β φ_δ(q₂)`.
//!
//! With real orbitals a general kernel has an eight-element symmetry group
//! (swap the particles, and swap bra/ket label within either particle), so
//! elements are stored under `[min(p₁,p₂), max(p₁,p₂)]` with the sorted pairs
//! `p₁ = (α,γ)`, `p₂ = (β,δ)`. A contact kernel is symmetric in all four
//! labels and is keyed by the sorted quadruple.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::onebody::OneBodySolution;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InteractionSpec {
    /// `g δ(q₁ − q₂)`.
    Contact { g: f64 },
    /// Piecewise-linear `V(|r|)` through `(r[i], v[i])`, zero beyond the last sample.
    SampledKernel { r: Vec<f64>, v: Vec<f64> },
    /// `strength · exp(−r²/2range²)`; a smeared contact, mainly for testing.
    Gaussian { strength: f64, range: f64 },
}

impl InteractionSpec {
    /// Strength of the contact interaction with the same integral.
    pub fn equivalent_g(&self) -> f64 {
        match self {
            InteractionSpec::Contact { g } => *g,
            InteractionSpec::Gaussian { strength, range } => {
                strength * range * (2.0 * std::f64::consts::PI).sqrt()
            }
            InteractionSpec::SampledKernel { r, v } => {
                // ∫ V(|r|) dr over the whole line
                2.0 * r.windows(2).zip(v.windows(2)).map(|(r, v)| 0.5 * (r[1] - r[0]) * (v[0] + v[1])).sum::<f64>()
            }
        }
    }

    pub fn kernel(&self, r: f64) -> f64 {
        let r = r.abs();
        match self {
            InteractionSpec::Contact { .. } => 0.0,
            InteractionSpec::Gaussian { strength, range } => strength * (-0.5 * (r / range).powi(2)).exp(),
            InteractionSpec::SampledKernel { r: rs, v } => {
                if r > rs[rs.len() - 1] || r < rs[0] {
                    return if r < rs[0] { v[0] } else { 0.0 };
                }
                let j = rs.partition_point(|&p| p <= r).saturating_sub(1).min(rs.len() - 2);
                let t = (r - rs[j]) / (rs[j + 1] - rs[j]);
                v[j] + t * (v[j + 1] - v[j])
            }
        }
    }

    /// Separation beyond which the kernel is negligible.
    fn reach(&self) -> f64 {
        match self {
            InteractionSpec::Contact { .. } => 0.0,
            InteractionSpec::Gaussian { range, .. } => 12.0 * range,
            InteractionSpec::SampledKernel { r, .. } => r[r.len() - 1],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            InteractionSpec::Gaussian { range, .. } if !(*range > 0.0) => {
                Err(Error::Invalid(format!("gaussian range must be positive, got {range}")))
            }
            InteractionSpec::SampledKernel { r, v } => {
                if r.len() != v.len() || r.len() < 2 {
                    return Err(Error::Invalid("sampled kernel needs ≥2 matching (r, v) samples".into()));
                }
                if r[0] < 0.0 || r.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Invalid("kernel separations must be non-negative and increasing".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    General,
    Contact,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoBodyTable {
    pub kind: TableKind,
    pub states: Vec<usize>,
    values: BTreeMap<[usize; 4], f64>,
}

fn sorted2(a: usize, b: usize) -> [usize; 2] {
    if a <= b {
        [a, b]
    } else {
        [b, a]
    }
}

/// Storage key of `⟨ab|V|cd⟩`.
pub fn canonical_key(kind: TableKind, a: usize, b: usize, c: usize, d: usize) -> [usize; 4] {
    match kind {
        TableKind::Contact => {
            let mut k = [a, b, c, d];
            k.sort_unstable();
            k
        }
        TableKind::General => {
            let p = sorted2(a, c);
            let q = sorted2(b, d);
            let (p, q) = if p <= q { (p, q) } else { (q, p) };
            [p[0], p[1], q[0], q[1]]
        }
    }
}

/// Every storage key over a state set.
pub fn all_keys(kind: TableKind, states: &[usize]) -> Vec<[usize; 4]> {
    let mut s = states.to_vec();
    s.sort_unstable();
    s.dedup();
    let n = s.len();
    let mut keys = Vec::new();
    match kind {
        TableKind::Contact => {
            for i in 0..n {
                for j in i..n {
                    for k in j..n {
                        for l in k..n {
                            keys.push([s[i], s[j], s[k], s[l]]);
                        }
                    }
                }
            }
        }
        TableKind::General => {
            let pairs: Vec<[usize; 2]> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).map(|(i, j)| [s[i], s[j]]).collect();
            for (x, p) in pairs.iter().enumerate() {
                for q in &pairs[x..] {
                    keys.push([p[0], p[1], q[0], q[1]]);
                }
            }
        }
    }
    keys
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    kind: TableKind,
    states: Vec<usize>,
    entries: Vec<([usize; 4], f64)>,
}

impl TwoBodyTable {
    pub fn from_fn(kind: TableKind, states: &[usize], f: impl Fn([usize; 4]) -> f64) -> Self {
        let mut s = states.to_vec();
        s.sort_unstable();
        s.dedup();
        let values = all_keys(kind, &s).into_iter().map(|k| (k, f(k))).collect();
        TwoBodyTable { kind, states: s, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `⟨ab|V|cd⟩`.
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> Result<f64> {
        let key = canonical_key(self.kind, a, b, c, d);
        self.values.get(&key).copied().ok_or(Error::MissingElement([a, b, c, d]))
    }

    /// Direct term `v_{⌊α²⌋⌊β²⌋} = ⟨αβ|V|αβ⟩`.
    pub fn direct(&self, a: usize, b: usize) -> Result<f64> {
        self.get(a, b, a, b)
    }

    /// Exchange term `v_{⌊αβ⌋²} = ⟨αβ|V|βα⟩`.
    pub fn exchange(&self, a: usize, b: usize) -> Result<f64> {
        self.get(a, b, b, a)
    }

    pub fn scaled(&self, s: f64) -> Self {
        TwoBodyTable {
            kind: self.kind,
            states: self.states.clone(),
            values: self.values.iter().map(|(k, v)| (*k, v * s)).collect(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[usize; 4], &f64)> {
        self.values.iter()
    }

    pub fn to_json(&self) -> String {
        let file = TableFile {
            kind: self.kind,
            states: self.states.clone(),
            entries: self.values.iter().map(|(k, v)| (*k, *v)).collect(),
        };
        serde_json::to_string_pretty(&file).expect("table serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: TableFile = serde_json::from_str(s).map_err(|e| Error::Invalid(format!("table file: {e}")))?;
        let mut values = BTreeMap::new();
        for (k, v) in file.entries {
            if canonical_key(file.kind, k[0], k[2], k[1], k[3]) != k {
                return Err(Error::Invalid(format!("non-canonical key {k:?}")));
            }
            values.insert(k, v);
        }
        Ok(TwoBodyTable { kind: file.kind, states: file.states, values })
    }
}

fn check_states(sol: &OneBodySolution, states: &[usize]) -> Result<()> {
    match states.iter().find(|&&s| s >= sol.n_states()) {
        Some(&s) => Err(Error::StateOutOfRange(s, sol.n_states())),
        None => Ok(()),
    }
}

pub fn contact_elements(sol: &OneBodySolution, states: &[usize], g: f64) -> Result<TwoBodyTable> {
    check_states(sol, states)?;
    let h = sol.spacing();
    let phi = &sol.wavefunctions;
    let keys = all_keys(TableKind::Contact, states);
    let vals: Vec<f64> = keys
        .par_iter()
        .map(|k| {
            let (a, b, c, d) = (&phi[k[0]], &phi[k[1]], &phi[k[2]], &phi[k[3]]);
            g * h * (0..a.len()).map(|i| a[i] * b[i] * c[i] * d[i]).sum::<f64>()
        })
        .collect();
    let mut s = states.to_vec();
    s.sort_unstable();
    s.dedup();
    Ok(TwoBodyTable { kind: TableKind::Contact, states: s, values: keys.into_iter().zip(vals).collect() })
}

pub fn general_elements(sol: &OneBodySolution, spec: &InteractionSpec, states: &[usize]) -> Result<TwoBodyTable> {
    spec.validate()?;
    check_states(sol, states)?;
    if matches!(spec, InteractionSpec::Contact { .. }) {
        return Err(Error::Invalid("contact interactions use contact_elements".into()));
    }
    let h = sol.spacing();
    if spec.reach() < 2.0 * h || matches!(spec, InteractionSpec::Gaussian { range, .. } if *range <= 2.0 * h) {
        return Err(Error::KernelUndersampled(format!("kernel width below 2h = {:e}", 2.0 * h)));
    }
    let np = sol.grid.n_points;
    let width = ((spec.reach() / h).ceil() as usize).min(np - 1);
    let kern: Vec<f64> = (0..=width).map(|k| spec.kernel(k as f64 * h)).collect();
    let phi = &sol.wavefunctions;

    let mut s = states.to_vec();
    s.sort_unstable();
    s.dedup();
    let pairs: Vec<[usize; 2]> = (0..s.len()).flat_map(|i| (i..s.len()).map(|j| [s[i], s[j]]).collect::<Vec<_>>()).collect();
    // W_{βδ}(q₁) = ∫ V(q₁−q₂) φ_β φ_δ(q₂) dq₂
    let potentials: BTreeMap<[usize; 2], Vec<f64>> = pairs
        .par_iter()
        .map(|p| {
            let rho: Vec<f64> = (0..np).map(|i| phi[p[0]][i] * phi[p[1]][i]).collect();
            let w: Vec<f64> = (0..np)
                .map(|i| {
                    let lo = i.saturating_sub(width);
                    let hi = (i + width).min(np - 1);
                    h * (lo..=hi).map(|j| kern[i.abs_diff(j)] * rho[j]).sum::<f64>()
                })
                .collect();
            (*p, w)
        })
        .collect();
    let keys = all_keys(TableKind::General, &s);
    let vals: Vec<f64> = keys
        .par_iter()
        .map(|k| {
            let w = &potentials[&[k[2], k[3]]];
            let (a, c) = (&phi[k[0]], &phi[k[1]]);
            h * (0..np).map(|i| a[i] * c[i] * w[i]).sum::<f64>()
        })
        .collect();
    Ok(TwoBodyTable { kind: TableKind::General, states: s, values: keys.into_iter().zip(vals).collect() })
}

/// Dispatches on the interaction kind.
pub fn build_table(sol: &OneBodySolution, spec: &InteractionSpec, states: &[usize]) -> Result<TwoBodyTable> {
    match spec {
        InteractionSpec::Contact { g } => contact_elements(sol, states, *g),
        _ => general_elements(sol, spec, states),
    }
}

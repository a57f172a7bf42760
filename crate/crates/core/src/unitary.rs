//! The g → ∞ contact limit and its 1/g neighbourhood.
//!
//! At unitarity every composition of distinct labels gives an N!-fold level
//! spanned by snippets: restrictions of the antisymmetric state to one ordering
//! sector `q_{s₁} < q_{s₂} < …`. Particle permutations relabel sectors
//! (`Q_s → Q_{s p⁻¹}`), ordering permutations shuffle positions
//! (`Q_s → Q_{𝔬 s}`); tunnelling between neighbouring sectors breaks the
//! ordering symmetry at order 1/g.

use std::fmt;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::sym_eigen;
use crate::onebody::OneBodySolution;
use crate::permsym::Perm;
use crate::perturbation::{Provenance, SplitLevel};
use crate::spectra::{enumerate_compositions, Composition};

/// Levels of the unitary limit: one per composition of distinct labels,
/// each N!-fold degenerate.
pub fn unitary_spectrum(sigma1: &[f64], n: usize, e_max: f64) -> Result<Vec<Composition>> {
    let fact = (1..=n).product();
    Ok(enumerate_compositions(sigma1, n, e_max)?
        .into_iter()
        .filter(|c| c.distinct().len() == n)
        .map(|mut c| {
            c.degeneracy = fact;
            c
        })
        .collect())
}

/// Ordering sector `q_{s₁} < q_{s₂} < …`; `order` holds the 0-based particle
/// at each position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sector {
    pub order: Perm,
}

/// Sector order used for rows and columns everywhere below; for three
/// particles this is the a–f lettering.
const ORDER_2: [&str; 2] = ["12", "21"];
const ORDER_3: [&str; 6] = ["123", "213", "231", "321", "312", "132"];

impl Sector {
    pub fn new(order: Perm) -> Self {
        Sector { order }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(Sector { order: Perm::from_notation(s)? })
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// All sectors of `n` particles in the canonical order.
    pub fn all(n: usize) -> Result<Vec<Sector>> {
        let names: &[&str] = match n {
            2 => &ORDER_2,
            3 => &ORDER_3,
            _ => return Err(Error::UnsupportedN(n)),
        };
        names.iter().map(|s| Sector::parse(s)).collect()
    }

    /// Letter a–f for three particles.
    pub fn letter(&self) -> Option<char> {
        if self.n() != 3 {
            return None;
        }
        let text: String = self.order.images().iter().map(|k| char::from(b'1' + *k as u8)).collect();
        ORDER_3.iter().position(|s| *s == text).map(|i| char::from(b'a' + i as u8))
    }

    pub fn sign(&self) -> i32 {
        self.order.sign()
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.order)
    }
}

/// Ordering permutation from cycle notation on position letters, e.g.
/// `"(AB)"`, `"(ABC)"`.
pub fn ordering_from_cycles(s: &str, n: usize) -> Result<Perm> {
    let digits: String = s
        .chars()
        .map(|c| match c {
            'A'..='I' => char::from(b'1' + (c as u8 - b'A')),
            _ => c,
        })
        .collect();
    Perm::from_cycles(&digits, n)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SectorAction {
    /// Particle permutation `p`: `Q_s → Q_{s p⁻¹}`.
    Particle(Perm),
    /// Ordering permutation `𝔬` on positions: `Q_s → Q_{𝔬 s}`.
    Ordering(Perm),
}

pub fn sector_action(action: &SectorAction, s: &Sector) -> Result<Sector> {
    let p = match action {
        SectorAction::Particle(p) | SectorAction::Ordering(p) => p,
    };
    if p.len() != s.n() {
        return Err(Error::SizeMismatch(p.len(), s.n()));
    }
    let imgs = match action {
        SectorAction::Particle(p) => {
            let inv = p.invert();
            s.order.images().iter().map(|&k| inv.apply(k)).collect()
        }
        SectorAction::Ordering(o) => (0..s.n()).map(|k| s.order.apply(o.apply(k))).collect(),
    };
    Ok(Sector { order: Perm::from_images(imgs)? })
}

/// Matrix of an action on the snippet space, columns and rows in canonical
/// sector order.
pub fn action_matrix(action: &SectorAction, n: usize) -> Result<DMatrix<f64>> {
    let sectors = Sector::all(n)?;
    let d = sectors.len();
    let mut m = DMatrix::zeros(d, d);
    for (c, s) in sectors.iter().enumerate() {
        let img = sector_action(action, s)?;
        let r = sectors.iter().position(|x| *x == img).expect("sectors closed under actions");
        m[(r, c)] = 1.0;
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnippetRow {
    pub irrep: Vec<usize>,
    /// Ordering-symmetry tableau, e.g. `"AC/B"`.
    pub ordering: String,
    /// Particle-symmetry tableau, e.g. `"12/3"`.
    pub young: String,
    /// Eigenvalue of `U(AC)` (of `U(AB)` for two particles).
    pub reversal: i8,
}

#[derive(Clone, Debug)]
pub struct SnippetBasis {
    pub labels: Vec<usize>,
    pub sectors: Vec<Sector>,
    pub rows: Vec<SnippetRow>,
    /// Row `r` holds the coefficients of basis vector `r` over `sectors`.
    pub coeffs: DMatrix<f64>,
}

impl SnippetBasis {
    pub fn transform(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        &self.coeffs * m * self.coeffs.transpose()
    }
}

fn normalized(v: nalgebra::DVector<f64>) -> Vec<f64> {
    let norm = v.norm();
    v.iter().map(|x| x / norm).collect()
}

fn positive_first(mut v: Vec<f64>) -> Vec<f64> {
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    v
}

/// Snippet vectors diagonalising `C₂⌊1…N⌋`, `U(12)` and the reversal
/// ordering `U(AC)` (`U(AB)` for two particles).
///
/// Three-particle rows: `[ABC]`, `(AC,B)⊗12/3`, `(AC,B)⊗13/2`, `(AB,C)⊗12/3`,
/// `(AB,C)⊗13/2`, `[A,B,C]`. Within each mixed pair the `13/2` vector is
/// obtained from the `12/3` one by the Young orthogonal form, and the `12/3`
/// vector has its first non-zero coefficient positive.
pub fn snippet_symmetrized_basis(labels: &[usize]) -> Result<SnippetBasis> {
    let n = labels.len();
    let mut sorted = labels.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != n {
        return Err(Error::RepeatedLabel);
    }
    let sectors = Sector::all(n)?;
    let d = sectors.len();
    let signs: Vec<f64> = sectors.iter().map(|s| s.sign() as f64).collect();
    let norm = (d as f64).sqrt();
    let uniform: Vec<f64> = vec![1.0 / norm; d];
    let alternating: Vec<f64> = signs.iter().map(|s| s / norm).collect();
    let row = |irrep: Vec<usize>, ordering: &str, young: &str, reversal: i8| SnippetRow {
        irrep,
        ordering: ordering.into(),
        young: young.into(),
        reversal,
    };
    if n == 2 {
        return Ok(SnippetBasis {
            labels: labels.to_vec(),
            sectors,
            rows: vec![row(vec![2], "AB", "12", 1), row(vec![1, 1], "A/B", "1/2", -1)],
            coeffs: DMatrix::from_row_slice(2, 2, &[uniform, alternating].concat()),
        });
    }

    let part = |p: &str| action_matrix(&SectorAction::Particle(Perm::from_cycles(p, 3)?), 3);
    let c2 = part("(12)")? + part("(23)")? + part("(13)")?;
    let u12 = part("(12)")?;
    let u23 = part("(23)")?;
    let uac = action_matrix(&SectorAction::Ordering(ordering_from_cycles("(AC)", 3)?), 3)?;
    let id = DMatrix::<f64>::identity(d, d);
    let mixed = &id - &c2 * &c2 / 9.0;

    let mut coeffs = vec![uniform];
    let mut rows = vec![row(vec![3], "ABC", "123", 1)];
    for (rev, otext) in [(1.0, "AC/B"), (-1.0, "AB/C")] {
        let proj = &mixed * (&id + &u12) * (&id + &uac * rev) / 4.0;
        let best = (0..d)
            .max_by(|&a, &b| proj.column(a).norm().partial_cmp(&proj.column(b).norm()).unwrap())
            .expect("non-empty");
        let v = positive_first(normalized(proj.column(best).into_owned()));
        let vm = nalgebra::DVector::from_column_slice(&v);
        let partner = normalized((&u23 * &vm + &vm * 0.5) * (2.0 / 3f64.sqrt()));
        coeffs.push(v);
        coeffs.push(partner);
        rows.push(row(vec![2, 1], otext, "12/3", rev as i8));
        rows.push(row(vec![2, 1], otext, "13/2", rev as i8));
    }
    coeffs.push(alternating);
    rows.push(row(vec![1, 1, 1], "A/B/C", "1/2/3", -1));
    Ok(SnippetBasis {
        labels: labels.to_vec(),
        sectors,
        rows,
        coeffs: DMatrix::from_row_slice(d, d, &coeffs.concat()),
    })
}

/// Tunnelling amplitudes, stored as the g-independent products `g·t`, `g·u`.
/// For two particles only `t` is meaningful and `u == t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TunnelingParams {
    pub t: f64,
    pub u: f64,
    pub labels: Vec<usize>,
    pub energy: f64,
}

impl TunnelingParams {
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Amplitudes at coupling `g`.
    pub fn at(&self, g: f64) -> (f64, f64) {
        (self.t / g, self.u / g)
    }
}

fn det3(c: [[f64; 3]; 3]) -> f64 {
    c[0][0] * (c[1][1] * c[2][2] - c[1][2] * c[2][1]) - c[0][1] * (c[1][0] * c[2][2] - c[1][2] * c[2][0])
        + c[0][2] * (c[1][0] * c[2][1] - c[1][1] * c[2][0])
}

/// `g·t` (and `g·u`) from the normal derivative of the Slater determinant on
/// the coincidence planes, trapezoid rule on the solver grid.
pub fn tunneling_params(sol: &OneBodySolution, labels: &[usize]) -> Result<TunnelingParams> {
    let n = labels.len();
    let mut sorted = labels.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != n {
        return Err(Error::RepeatedLabel);
    }
    if let Some(&top) = sorted.last() {
        if top >= sol.n_states() {
            return Err(Error::StateOutOfRange(top, sol.n_states()));
        }
    }
    let h = sol.spacing();
    let phi = |k: usize| &sol.wavefunctions[sorted[k]];
    let dphi = |k: usize| &sol.derivatives[sorted[k]];
    let energy = sorted.iter().map(|&l| sol.energies[l]).sum();
    match n {
        2 => {
            // ∂₁Ψ at q₁ = q₂ = x is the Wronskian over √2
            let sum: f64 = (0..sol.grid.n_points)
                .map(|i| {
                    let w = dphi(0)[i] * phi(1)[i] - phi(0)[i] * dphi(1)[i];
                    w * w / 2.0
                })
                .sum();
            let t = 2.0 * sum * h;
            Ok(TunnelingParams { t, u: t, labels: sorted, energy })
        }
        3 => {
            let m = sol.grid.n_points;
            // integrands vanish on q₁ = q₂ = q₃ and at the box edges, so the
            // trapezoid rule reduces to a plain sum over the open triangle x < y
            let rows: Vec<(f64, f64)> = (0..m)
                .into_par_iter()
                .map(|j| {
                    let mut acc = (0.0, 0.0);
                    for i in 0..j {
                        // t: q₁ = q₂ = x < q₃ = y, derivative in q₁
                        let ct = [0, 1, 2].map(|k| [dphi(k)[i], phi(k)[i], phi(k)[j]]);
                        // u: q₁ = x < q₂ = q₃ = y, derivative in q₂
                        let cu = [0, 1, 2].map(|k| [phi(k)[i], dphi(k)[j], phi(k)[j]]);
                        let (a, b) = (det3(ct), det3(cu));
                        acc.0 += a * a / 6.0;
                        acc.1 += b * b / 6.0;
                    }
                    acc
                })
                .collect();
            // summed in order so results are bit-reproducible
            let (st, su) = rows.iter().fold((0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
            Ok(TunnelingParams { t: 6.0 * st * h * h, u: 6.0 * su * h * h, labels: sorted, energy })
        }
        _ => Err(Error::UnsupportedN(n)),
    }
}

/// `T = −t U(AB) − u U(BC) − (t+u)` on the sector basis (for two particles
/// `T = −t U(AB) − t`).
pub fn tunneling_matrix(n: usize, t: f64, u: f64) -> Result<DMatrix<f64>> {
    let ord = |c: &str| action_matrix(&SectorAction::Ordering(ordering_from_cycles(c, n)?), n);
    match n {
        2 => Ok(ord("(AB)")? * -t - DMatrix::identity(2, 2) * t),
        3 => Ok(ord("(AB)")? * -t - ord("(BC)")? * u - DMatrix::identity(6, 6) * (t + u)),
        _ => Err(Error::UnsupportedN(n)),
    }
}

/// First-order shifts away from unitarity, in the units of `params` divided
/// by `g` (pass `g = 1` for the products `g·ΔE`). `parity` is the product of
/// the one-body parities for a symmetric trap; it labels the levels.
///
/// Three particles: `[3]`, the lower and upper `[21]` pair, `[1³]`.
pub fn near_unitary_split(params: &TunnelingParams, g: f64, parity: Option<i8>) -> Result<Vec<SplitLevel>> {
    let (t, u) = params.at(g);
    if !(t >= 0.0 && u >= 0.0) {
        return Err(Error::NegativeAmplitude);
    }
    let text = Composition::with_energy(params.labels.clone(), params.energy).text();
    let level = |shift: f64, degeneracy: usize, irrep: Vec<usize>, parity: Option<i8>, eigvec: Vec<f64>| SplitLevel {
        base_energy: params.energy,
        shift,
        degeneracy,
        irrep,
        parity,
        eigvec,
        provenance: Provenance::NearUnitary,
        labels: text.clone(),
    };
    let flip = parity.map(|p| -p);
    match params.n() {
        2 => Ok(vec![
            level(-2.0 * t, 1, vec![2], flip, vec![1.0, 0.0]),
            level(0.0, 1, vec![1, 1], parity, vec![0.0, 1.0]),
        ]),
        3 => {
            let r = (t * t - t * u + u * u).sqrt();
            // the mixed pair, in the (AC,B)/(AB,C) copies of 12/3
            let basis = snippet_symmetrized_basis(&params.labels)?;
            let tb = basis.transform(&tunneling_matrix(3, t, u)?);
            let block = DMatrix::from_row_slice(2, 2, &[tb[(1, 1)], tb[(1, 3)], tb[(3, 1)], tb[(3, 3)]]);
            let (_, vecs) = sym_eigen(&block);
            let vec_of = |k: usize| vecs.column(k).iter().copied().collect::<Vec<f64>>();
            // at t = u the lower pair is U(AC)-odd, the upper one U(AC)-even
            Ok(vec![
                level(-2.0 * t - 2.0 * u, 1, vec![3], flip, vec![1.0]),
                level(-t - u - r, 2, vec![2, 1], parity, vec_of(0)),
                level(-t - u + r, 2, vec![2, 1], flip, vec_of(1)),
                level(0.0, 1, vec![1, 1, 1], parity, vec![1.0]),
            ])
        }
        n => Err(Error::UnsupportedN(n)),
    }
}

/// Value at `(q_{i₁}, …)` (grid indices) of the snippet combination with
/// coefficients `coeffs` over the canonical sectors. Points on a coincidence
/// plane return 0.
pub fn snippet_wavefunction(sol: &OneBodySolution, labels: &[usize], coeffs: &[f64], idx: &[usize]) -> Result<f64> {
    let n = labels.len();
    if idx.len() != n {
        return Err(Error::SizeMismatch(idx.len(), n));
    }
    let sectors = Sector::all(n)?;
    if coeffs.len() != sectors.len() {
        return Err(Error::SizeMismatch(coeffs.len(), sectors.len()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&k| idx[k]);
    if order.windows(2).any(|w| idx[w[0]] == idx[w[1]]) {
        return Ok(0.0);
    }
    let here = Sector::new(Perm::from_images(order)?);
    let k = sectors.iter().position(|s| *s == here).expect("every order is a sector");
    let f = |l: usize, i: usize| sol.wavefunctions[labels[l]][i];
    let antisym = match n {
        2 => (f(0, idx[0]) * f(1, idx[1]) - f(0, idx[1]) * f(1, idx[0])) / 2f64.sqrt(),
        _ => det3([0, 1, 2].map(|l| [f(l, idx[0]), f(l, idx[1]), f(l, idx[2])])) / 6f64.sqrt(),
    };
    let fact = sectors.len() as f64;
    Ok(coeffs[k] * here.sign() as f64 * fact.sqrt() * antisym)
}

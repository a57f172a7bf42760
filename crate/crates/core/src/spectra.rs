//! Non-interacting few-body levels: compositions, their partial order and
//! their symmetry classification.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::onebody::TrapKind;
use crate::permsym::{shape_text, superscript};

/// Relative tolerance under which two composition energies count as equal.
pub const ENERGY_TIE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Composition {
    /// Sorted one-particle indices.
    pub labels: Vec<usize>,
    pub energy: f64,
    /// Label multiplicities, descending.
    pub shape: Vec<usize>,
    /// Number of distinct orderings.
    pub degeneracy: usize,
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

impl Composition {
    pub fn new(labels: &[usize], sigma1: &[f64]) -> Result<Self> {
        let mut labels = labels.to_vec();
        labels.sort_unstable();
        if let Some(&bad) = labels.iter().find(|&&l| l >= sigma1.len()) {
            return Err(Error::StateOutOfRange(bad, sigma1.len()));
        }
        let energy = labels.iter().map(|&l| sigma1[l]).sum();
        Ok(Self::with_energy(labels, energy))
    }

    pub fn with_energy(mut labels: Vec<usize>, energy: f64) -> Self {
        labels.sort_unstable();
        let mult = multiplicities(&labels);
        let mut shape: Vec<usize> = mult.values().copied().collect();
        shape.sort_unstable_by(|a, b| b.cmp(a));
        let degeneracy = factorial(labels.len()) / mult.values().map(|&m| factorial(m)).product::<usize>();
        Composition { labels, energy, shape, degeneracy }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn distinct(&self) -> Vec<usize> {
        let mut d = self.labels.clone();
        d.dedup();
        d
    }

    /// Key ordering equal-energy compositions: descending labels, lexicographic.
    pub fn tie_key(&self) -> Vec<usize> {
        self.labels.iter().rev().copied().collect()
    }

    /// `⌊0²1⌋`; comma-separated once any label has two digits.
    pub fn text(&self) -> String {
        let wide = self.labels.iter().any(|&l| l > 9);
        let parts: Vec<String> = multiplicities(&self.labels)
            .iter()
            .map(|(l, &m)| if m > 1 { format!("{l}{}", superscript(m)) } else { l.to_string() })
            .collect();
        format!("⌊{}⌋", parts.join(if wide { "," } else { "" }))
    }

    /// Abstract pattern `⌊α²β⌋`, `⌊αβγ⌋`, … from the shape.
    pub fn pattern(&self) -> String {
        const GREEK: [char; 3] = ['α', 'β', 'γ'];
        let body: String = self
            .shape
            .iter()
            .enumerate()
            .map(|(i, &m)| {
                let mut s = GREEK[i.min(2)].to_string();
                if m > 1 {
                    s.push_str(&superscript(m));
                }
                s
            })
            .collect();
        format!("⌊{body}⌋")
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

pub(crate) fn multiplicities(labels: &[usize]) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    for &l in labels {
        *m.entry(l).or_insert(0) += 1;
    }
    m
}

fn energies_tie(a: f64, b: f64) -> bool {
    (a - b).abs() <= ENERGY_TIE_TOL * (1.0 + a.abs().max(b.abs()))
}

/// Sort by energy; runs of tied energies are ordered by [`Composition::tie_key`].
pub fn sort_compositions(comps: &mut [Composition]) {
    comps.sort_by(|a, b| a.energy.total_cmp(&b.energy).then_with(|| a.tie_key().cmp(&b.tie_key())));
    let mut start = 0;
    while start < comps.len() {
        let mut end = start + 1;
        while end < comps.len() && energies_tie(comps[end - 1].energy, comps[end].energy) {
            end += 1;
        }
        comps[start..end].sort_by_key(Composition::tie_key);
        start = end;
    }
}

/// All compositions of `n` particles with energy at most `e_max`.
pub fn enumerate_compositions(sigma1: &[f64], n: usize, e_max: f64) -> Result<Vec<Composition>> {
    if sigma1.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    if !(1..=3).contains(&n) {
        return Err(Error::UnsupportedN(n));
    }
    if sigma1.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Invalid("one-body energies must increase strictly".into()));
    }
    let cut = e_max + ENERGY_TIE_TOL * (1.0 + e_max.abs());
    // the highest available state must already lie above the cutoff
    let top = sigma1[sigma1.len() - 1] + (n - 1) as f64 * sigma1[0];
    if top <= cut {
        return Err(Error::Invalid(format!(
            "{} one-body states do not cover e_max = {e_max}",
            sigma1.len()
        )));
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(sigma1: &[f64], n: usize, start: usize, energy: f64, cut: f64, cur: &mut Vec<usize>, out: &mut Vec<Composition>) {
        if cur.len() == n {
            out.push(Composition::with_energy(cur.clone(), energy));
            return;
        }
        let left = (n - cur.len()) as f64;
        for l in start..sigma1.len() {
            // remaining particles sit at l or above
            if energy + left * sigma1[l] > cut {
                break;
            }
            cur.push(l);
            rec(sigma1, n, l, energy + sigma1[l], cut, cur, out);
            cur.pop();
        }
    }
    rec(sigma1, n, 0, 0.0, cut, &mut cur, &mut out);
    sort_compositions(&mut out);
    Ok(out)
}

/// `a ≤ b` for every strictly increasing one-body spectrum.
pub fn dominated(a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Covering relation of the spectrum-independent partial order, as index
/// pairs `(lower, upper)` into `comps`.
///
/// Sorted label vectors are compared componentwise: `a` lies below `b` for
/// every increasing spectrum iff `a_i ≤ b_i` for all `i`. (If `a_k > b_k`,
/// a spectrum with a large jump just below `a_k` puts `a` above `b`.)
pub fn partial_order_edges(comps: &[Composition]) -> Vec<(usize, usize)> {
    let n = comps.len();
    let below = |i: usize, j: usize| i != j && comps[i].labels != comps[j].labels && dominated(&comps[i].labels, &comps[j].labels);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if below(i, j) && !(0..n).any(|k| below(i, k) && below(k, j)) {
                edges.push((i, j));
            }
        }
    }
    edges
}

pub fn fermi_bose_labels(labels: &[usize]) -> Vec<usize> {
    let mut sorted = labels.to_vec();
    sorted.sort_unstable();
    sorted.iter().enumerate().map(|(k, l)| l + k).collect()
}

pub fn fermi_bose_map(comp: &Composition, sigma1: &[f64]) -> Result<Composition> {
    Composition::new(&fermi_bose_labels(&comp.labels), sigma1)
}

pub fn emergent_degeneracy_check(trap: &TrapKind, x: usize, n: usize) -> Result<usize> {
    if *trap != TrapKind::Harmonic {
        return Err(Error::UnsupportedTrap);
    }
    match n {
        1 => Ok(1),
        2 => Ok(x + 1),
        3 => Ok((x + 1) * (x + 2) / 2),
        _ => Err(Error::UnsupportedN(n)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrapSymmetry {
    Asymmetric,
    Symmetric,
    Harmonic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KIrrep {
    pub shape: Vec<usize>,
    pub parity: Option<i8>,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelClassification {
    pub k0_class: String,
    /// Point-group irreps with multiplicities.
    pub c0_irreps: Vec<(String, usize)>,
    pub k_irreps: Vec<KIrrep>,
}

fn parity_mark(p: i8) -> &'static str {
    if p > 0 {
        "⁺"
    } else {
        "⁻"
    }
}

pub fn irrep_text(shape: &[usize], parity: Option<i8>) -> String {
    let mut s = shape_text(shape);
    if let Some(p) = parity {
        s.push_str(parity_mark(p));
    }
    s
}

fn join_mult<'a>(items: impl Iterator<Item = (String, usize)> + 'a) -> String {
    items
        .map(|(s, m)| if m > 1 { format!("{m}{s}") } else { s })
        .collect::<Vec<_>>()
        .join("⊕")
}

impl LevelClassification {
    pub fn c0_text(&self) -> String {
        join_mult(self.c0_irreps.iter().cloned())
    }

    pub fn k_text(&self) -> String {
        join_mult(self.k_irreps.iter().map(|k| (irrep_text(&k.shape, k.parity), k.multiplicity)))
    }
}

fn subscript(n: usize) -> String {
    const SUB: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
    n.to_string().chars().map(|c| SUB[c.to_digit(10).unwrap() as usize]).collect()
}

/// Parity-pattern label such as `⌊+₁²+₂⌋` or `⌊+−²⌋`.
pub fn k0_class(labels: &[usize], parities: &[i8]) -> String {
    let mut by_parity: BTreeMap<i8, Vec<usize>> = BTreeMap::new();
    for (l, m) in multiplicities(labels) {
        let k = labels.iter().position(|&x| x == l).unwrap();
        by_parity.entry(parities[k]).or_default().push(m);
    }
    let mut out = String::from("⌊");
    for p in [1i8, -1] {
        let Some(ms) = by_parity.get_mut(&p) else { continue };
        ms.sort_unstable_by(|a, b| b.cmp(a));
        let sign = if p > 0 { '+' } else { '−' };
        for (i, &m) in ms.iter().enumerate() {
            out.push(sign);
            if ms.len() > 1 {
                out.push_str(&subscript(i + 1));
            }
            if m > 1 {
                out.push_str(&superscript(m));
            }
        }
    }
    out.push('⌋');
    out
}

type Row = (&'static str, &'static [(&'static str, usize)], &'static [(&'static [usize], i8, usize)]);

/// Two particles, reflection-symmetric trap: point group D₄.
const TABLE_N2: &[Row] = &[
    ("⌊+²⌋", &[("A1", 1)], &[(&[2], 1, 1)]),
    ("⌊−²⌋", &[("A2", 1)], &[(&[2], 1, 1)]),
    ("⌊+−⌋", &[("E", 1)], &[(&[2], -1, 1), (&[1, 1], -1, 1)]),
    ("⌊+₁+₂⌋", &[("A1", 1), ("B1", 1)], &[(&[2], 1, 1), (&[1, 1], 1, 1)]),
    ("⌊−₁−₂⌋", &[("A2", 1), ("B2", 1)], &[(&[2], 1, 1), (&[1, 1], 1, 1)]),
];

/// Three particles, reflection-symmetric trap: point group O_h.
const TABLE_N3: &[Row] = &[
    ("⌊+³⌋", &[("A1g", 1)], &[(&[3], 1, 1)]),
    ("⌊−³⌋", &[("A2u", 1)], &[(&[3], -1, 1)]),
    ("⌊+²−⌋", &[("T1u", 1)], &[(&[3], -1, 1), (&[2, 1], -1, 1)]),
    ("⌊+−²⌋", &[("T2g", 1)], &[(&[3], 1, 1), (&[2, 1], 1, 1)]),
    ("⌊+₁²+₂⌋", &[("A1g", 1), ("Eg", 1)], &[(&[3], 1, 1), (&[2, 1], 1, 1)]),
    ("⌊−₁²−₂⌋", &[("A2u", 1), ("Eu", 1)], &[(&[3], -1, 1), (&[2, 1], -1, 1)]),
    (
        "⌊+₁+₂−⌋",
        &[("T1u", 1), ("T2u", 1)],
        &[(&[3], -1, 1), (&[2, 1], -1, 2), (&[1, 1, 1], -1, 1)],
    ),
    (
        "⌊+−₁−₂⌋",
        &[("T1g", 1), ("T2g", 1)],
        &[(&[3], 1, 1), (&[2, 1], 1, 2), (&[1, 1, 1], 1, 1)],
    ),
    (
        "⌊+₁+₂+₃⌋",
        &[("A1g", 1), ("A2g", 1), ("Eg", 2)],
        &[(&[3], 1, 1), (&[2, 1], 1, 2), (&[1, 1, 1], 1, 1)],
    ),
    (
        "⌊−₁−₂−₃⌋",
        &[("A2u", 1), ("A1u", 1), ("Eu", 2)],
        &[(&[3], -1, 1), (&[2, 1], -1, 2), (&[1, 1, 1], -1, 1)],
    ),
];

pub fn point_group_irrep_dim(name: &str) -> usize {
    match name.chars().next() {
        Some('E') => 2,
        Some('T') => 3,
        _ => 1,
    }
}

/// `S_N` content of a composition space without parity: `[μ]` with
/// multiplicity given by the number of Weyl tableaux.
fn sn_content(labels: &[usize]) -> Vec<KIrrep> {
    crate::permsym::partitions(labels.len())
        .into_iter()
        .filter_map(|shape| {
            let m = crate::permsym::weyl_multiplicity(&shape, labels);
            (m > 0).then_some(KIrrep { shape, parity: None, multiplicity: m })
        })
        .collect()
}

pub fn classify_level(
    comp: &Composition,
    parities: Option<&[i8]>,
    symmetry: TrapSymmetry,
) -> Result<LevelClassification> {
    let n = comp.n();
    if !(1..=3).contains(&n) {
        return Err(Error::UnsupportedN(n));
    }
    if symmetry == TrapSymmetry::Asymmetric || n == 1 {
        let k = sn_content(&comp.labels);
        let c0 = k.iter().map(|k| (shape_text(&k.shape), k.multiplicity)).collect();
        let k0_class = match (symmetry, parities) {
            (TrapSymmetry::Asymmetric, _) | (_, None) => comp.pattern(),
            (_, Some(p)) => k0_class(&comp.labels, p),
        };
        return Ok(LevelClassification { k0_class, c0_irreps: c0, k_irreps: k });
    }
    let parities = parities.ok_or_else(|| Error::Invalid("symmetric trap needs parities".into()))?;
    if parities.len() != n {
        return Err(Error::SizeMismatch(parities.len(), n));
    }
    let class = k0_class(&comp.labels, parities);
    let table = if n == 2 { TABLE_N2 } else { TABLE_N3 };
    let (_, c0, k) = table
        .iter()
        .find(|(key, _, _)| *key == class)
        .ok_or_else(|| Error::UnknownClass(class.clone()))?;
    Ok(LevelClassification {
        k0_class: class,
        c0_irreps: c0.iter().map(|(s, m)| (s.to_string(), *m)).collect(),
        k_irreps: k
            .iter()
            .map(|(shape, p, m)| KIrrep { shape: shape.to_vec(), parity: Some(*p), multiplicity: *m })
            .collect(),
    })
}

/// Parities `(−1)^label` for each entry of a composition.
pub fn label_parities(labels: &[usize]) -> Vec<i8> {
    labels.iter().map(|l| if l % 2 == 0 { 1 } else { -1 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permsym::{irrep_dim, weyl_multiplicity};
    use proptest::prelude::*;

    fn harmonic(n: usize) -> Vec<f64> {
        (0..n).map(|k| k as f64 + 0.5).collect()
    }

    fn texts(c: &[Composition]) -> Vec<String> {
        c.iter().map(Composition::text).collect()
    }

    #[test]
    fn three_particle_low_levels() {
        let c = enumerate_compositions(&harmonic(20), 3, 4.6).unwrap();
        // ⌊0²3⌋ is also at 4.5 and closes the X = 3 shell
        assert_eq!(texts(&c), ["⌊0³⌋", "⌊0²1⌋", "⌊01²⌋", "⌊0²2⌋", "⌊1³⌋", "⌊012⌋", "⌊0²3⌋"]);
        assert_eq!(c.iter().map(|c| c.degeneracy).collect::<Vec<_>>(), [1, 3, 3, 3, 1, 6, 3]);
        assert_eq!(c[3].energy, 3.5);
        assert_eq!(c[1].shape, vec![2, 1]);
    }

    #[test]
    fn one_particle_is_the_spectrum() {
        let c = enumerate_compositions(&harmonic(10), 1, 4.5).unwrap();
        assert_eq!(c.len(), 5);
        assert!(c.iter().enumerate().all(|(k, c)| c.labels == [k]));
    }

    #[test]
    fn infinite_well_accidental_degeneracy() {
        let sigma: Vec<f64> = (0..12).map(|n| 0.5 * ((n + 1) * (n + 1)) as f64).collect();
        let c = enumerate_compositions(&sigma, 2, 25.5).unwrap();
        let a = c.iter().find(|c| c.labels == [0, 6]).unwrap();
        let b = c.iter().find(|c| c.labels == [4, 4]).unwrap();
        assert!((a.energy - b.energy).abs() < 1e-9);
        assert_eq!(a.degeneracy + b.degeneracy, 3);
    }

    #[test]
    fn short_spectrum_rejected() {
        assert!(enumerate_compositions(&harmonic(3), 2, 10.0).is_err());
        assert!(matches!(enumerate_compositions(&[], 2, 1.0), Err(Error::EmptySpectrum)));
    }

    #[test]
    fn edges_match_figures() {
        let c = enumerate_compositions(&harmonic(20), 3, 3.6).unwrap();
        let e = partial_order_edges(&c);
        let named: Vec<(String, String)> = e.iter().map(|&(i, j)| (c[i].text(), c[j].text())).collect();
        assert!(named.contains(&("⌊0²1⌋".into(), "⌊01²⌋".into())));
        assert!(named.contains(&("⌊0²1⌋".into(), "⌊0²2⌋".into())));
        assert!(!named.iter().any(|(a, b)| (a == "⌊01²⌋" && b == "⌊0²2⌋") || (a == "⌊0²2⌋" && b == "⌊01²⌋")));
        assert!(e.iter().all(|(i, j)| i != j));

        let c = enumerate_compositions(&harmonic(20), 2, 3.1).unwrap();
        let e = partial_order_edges(&c);
        let from_ground: Vec<_> = e.iter().filter(|(i, _)| *i == 0).collect();
        assert_eq!(from_ground.len(), 1);
        assert_eq!(c[from_ground[0].1].labels, [0, 1]);
        // ⌊1²⌋ and ⌊02⌋ are incomparable
        let i11 = c.iter().position(|c| c.labels == [1, 1]).unwrap();
        let i02 = c.iter().position(|c| c.labels == [0, 2]).unwrap();
        assert!(!e.contains(&(i11, i02)) && !e.contains(&(i02, i11)));
    }

    #[test]
    fn fermi_bose_examples() {
        assert_eq!(fermi_bose_labels(&[0, 0, 2]), vec![0, 1, 4]);
        assert_eq!(fermi_bose_labels(&[0, 0]), vec![0, 1]);
        assert_eq!(fermi_bose_labels(&[1, 3, 4]), vec![1, 4, 6]);
        let c = Composition::new(&[0, 0, 2], &harmonic(10)).unwrap();
        let f = fermi_bose_map(&c, &harmonic(10)).unwrap();
        assert_eq!(f.shape, vec![1, 1, 1]);
        assert_eq!(f.energy, c.energy + 3.0);
    }

    #[test]
    fn harmonic_degeneracy_counts() {
        let t = TrapKind::Harmonic;
        assert_eq!(emergent_degeneracy_check(&t, 3, 2).unwrap(), 4);
        assert_eq!(emergent_degeneracy_check(&t, 2, 3).unwrap(), 6);
        assert_eq!(emergent_degeneracy_check(&t, 0, 3).unwrap(), 1);
        assert!(emergent_degeneracy_check(&TrapKind::InfiniteWell { width: 1.0 }, 0, 2).is_err());
        for n in 2..=3 {
            let c = enumerate_compositions(&harmonic(30), n, 8.0 + n as f64 / 2.0 + 0.1).unwrap();
            for x in 0..=8 {
                let e = x as f64 + n as f64 / 2.0;
                let total: usize = c.iter().filter(|c| (c.energy - e).abs() < 1e-9).map(|c| c.degeneracy).sum();
                assert_eq!(total, emergent_degeneracy_check(&t, x, n).unwrap());
            }
        }
    }

    #[test]
    fn k0_labels() {
        assert_eq!(k0_class(&[0, 2], &[1, 1]), "⌊+₁+₂⌋");
        assert_eq!(k0_class(&[0, 1, 2], &[1, -1, 1]), "⌊+₁+₂−⌋");
        assert_eq!(k0_class(&[0, 2, 2], &[1, 1, 1]), "⌊+₁²+₂⌋");
        assert_eq!(k0_class(&[1, 1, 2], &[-1, -1, 1]), "⌊+−²⌋");
        assert_eq!(k0_class(&[1, 1, 3], &[-1, -1, -1]), "⌊−₁²−₂⌋");
        assert_eq!(k0_class(&[0, 0, 0], &[1, 1, 1]), "⌊+³⌋");
    }

    #[test]
    fn classification_examples() {
        let s = harmonic(10);
        let c = Composition::new(&[0, 2], &s).unwrap();
        let l = classify_level(&c, Some(&[1, 1]), TrapSymmetry::Symmetric).unwrap();
        assert_eq!((l.k0_class.as_str(), l.c0_text(), l.k_text()), ("⌊+₁+₂⌋", "A1⊕B1".into(), "[2]⁺⊕[1²]⁺".into()));
        let c = Composition::new(&[0, 1, 2], &s).unwrap();
        let l = classify_level(&c, Some(&[1, -1, 1]), TrapSymmetry::Harmonic).unwrap();
        assert_eq!(l.c0_text(), "T1u⊕T2u");
        assert_eq!(l.k_text(), "[3]⁻⊕2[21]⁻⊕[1³]⁻");
        let c = Composition::new(&[0, 0, 0], &s).unwrap();
        let l = classify_level(&c, Some(&[1, 1, 1]), TrapSymmetry::Symmetric).unwrap();
        assert_eq!((l.k0_class.as_str(), l.c0_text(), l.k_text()), ("⌊+³⌋", "A1g".into(), "[3]⁺".into()));
        let l = classify_level(&Composition::new(&[0, 1, 2], &s).unwrap(), None, TrapSymmetry::Asymmetric).unwrap();
        assert_eq!(l.k0_class, "⌊αβγ⌋");
        assert_eq!(l.k_text(), "[3]⊕2[21]⊕[1³]");
    }

    /// Every table row is consistent with the permutation-module content of
    /// a composition realising it and with its total parity.
    #[test]
    fn tables_agree_with_group_theory() {
        let s = harmonic(12);
        for n in 2..=3 {
            for c in enumerate_compositions(&s, n, 10.0).unwrap() {
                let p = label_parities(&c.labels);
                let l = classify_level(&c, Some(&p), TrapSymmetry::Symmetric).unwrap();
                let total: i8 = p.iter().product();
                for k in &l.k_irreps {
                    assert_eq!(k.multiplicity, weyl_multiplicity(&k.shape, &c.labels), "{c}");
                    assert_eq!(k.parity, Some(total));
                }
                let kd: usize = l.k_irreps.iter().map(|k| k.multiplicity * irrep_dim(&k.shape)).sum();
                let cd: usize = l.c0_irreps.iter().map(|(s, m)| m * point_group_irrep_dim(s)).sum();
                assert_eq!(kd, c.degeneracy);
                assert_eq!(cd, c.degeneracy);
            }
        }
    }

    proptest! {
        #[test]
        fn fermi_bose_preserves_order(a in proptest::collection::vec(0usize..6, 3), b in proptest::collection::vec(0usize..6, 3)) {
            let mut a = a; a.sort();
            let mut b = b; b.sort();
            if dominated(&a, &b) {
                prop_assert!(dominated(&fermi_bose_labels(&a), &fermi_bose_labels(&b)));
            }
            let fa = fermi_bose_labels(&a);
            prop_assert!(fa.windows(2).all(|w| w[0] < w[1]));
            if a != b {
                prop_assert_ne!(fa, fermi_bose_labels(&b));
            }
        }

        #[test]
        fn enumeration_is_complete(n in 1usize..=3, e_max in 1.5f64..7.0) {
            let s = harmonic(12);
            let c = enumerate_compositions(&s, n, e_max).unwrap();
            let mut brute = 0;
            for a in 0..12 { for b in a..12 { for g in b..12 {
                let l: Vec<usize> = [a, b, g][..n].to_vec();
                if (n < 3 && g != b) || (n < 2 && b != a) { continue; }
                if l.iter().map(|&k| s[k]).sum::<f64>() <= e_max + 1e-9 { brute += 1; }
            }}}
            prop_assert_eq!(c.len(), brute);
            prop_assert!(c.windows(2).all(|w| w[0].energy <= w[1].energy + 1e-12));
        }
    }
}

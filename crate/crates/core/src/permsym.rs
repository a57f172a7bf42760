//! Permutations, tableaux and symmetrized bases for two and three particles.
//!
//! Conventions:
//! * A permutation `p` stores its images `p(k)` (0-based); it is printed
//!   1-based, e.g. `{231}` for the cycle `(123)`.
//! * On particle sequences `U(p)|n_1 … n_N⟩ = |n_{p(1)} … n_{p(N)}⟩`.
//! * `compose(a, b)` is the operator product, `U(compose(a, b)) = U(a) U(b)`.
//! * Sequence bases are ordered lexicographically in the state labels.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm { images: (0..n).collect() }
    }

    /// From 0-based images.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::Invalid(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Perm { images })
    }

    /// From 1-based permutation notation, e.g. `"231"` or `"{231}"`.
    pub fn from_notation(s: &str) -> Result<Self> {
        let digits: Vec<usize> = s
            .trim_matches(|c| c == '{' || c == '}')
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as usize))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Invalid(format!("bad permutation notation {s:?}")))?;
        if digits.iter().any(|&d| d == 0) {
            return Err(Error::Invalid(format!("bad permutation notation {s:?}")));
        }
        Self::from_images(digits.into_iter().map(|d| d - 1).collect())
    }

    /// From 1-based cycle notation on `n` points, e.g. `"(132)"`, `"(12)(3)"`
    /// or `"e"`.
    pub fn from_cycles(s: &str, n: usize) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let s = s.trim();
        if s == "e" || s.is_empty() {
            return Ok(Perm { images });
        }
        let bad = || Error::Invalid(format!("bad cycle notation {s:?}"));
        let mut seen = vec![false; n];
        for cyc in s.split(')') {
            let cyc = cyc.trim();
            if cyc.is_empty() {
                continue;
            }
            let body = cyc.strip_prefix('(').ok_or_else(bad)?;
            let pts: Vec<usize> = body
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as usize))
                .collect::<Option<_>>()
                .ok_or_else(bad)?;
            for &p in &pts {
                if p == 0 || p > n || seen[p - 1] {
                    return Err(bad());
                }
                seen[p - 1] = true;
            }
            for (k, &p) in pts.iter().enumerate() {
                images[p - 1] = pts[(k + 1) % pts.len()] - 1;
            }
        }
        Ok(Perm { images })
    }

    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(i, j);
        Perm { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, k: usize) -> usize {
        self.images[k]
    }

    /// Operator product: `act(compose(a, b), s) == act(a, act(b, s))`.
    pub fn compose(&self, other: &Perm) -> Result<Perm> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch(self.len(), other.len()));
        }
        Ok(Perm { images: self.images.iter().map(|&k| other.images[k]).collect() })
    }

    /// Plain function composition `(a ∘ b)(k) = a(b(k))`.
    pub fn then_after(&self, other: &Perm) -> Result<Perm> {
        other.compose(self)
    }

    pub fn invert(&self) -> Perm {
        let mut inv = vec![0; self.len()];
        for (k, &p) in self.images.iter().enumerate() {
            inv[p] = k;
        }
        Perm { images: inv }
    }

    pub fn sign(&self) -> i32 {
        let mut seen = vec![false; self.len()];
        let mut s = 1;
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = self.images[k];
                len += 1;
            }
            if len % 2 == 0 {
                s = -s;
            }
        }
        s
    }

    /// 1-based cycle notation with fixed points dropped; `e` for the identity.
    pub fn to_cycles(&self) -> String {
        let mut seen = vec![false; self.len()];
        let mut out = String::new();
        for start in 0..self.len() {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            out.push('(');
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                out.push_str(&(k + 1).to_string());
                k = self.images[k];
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push('e');
        }
        out
    }

    pub fn all(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        permute(&mut cur, 0, &mut out);
        out.sort();
        out
    }
}

fn permute(cur: &mut Vec<usize>, k: usize, out: &mut Vec<Perm>) {
    if k == cur.len() {
        out.push(Perm { images: cur.clone() });
        return;
    }
    for i in k..cur.len() {
        cur.swap(k, i);
        permute(cur, k + 1, out);
        cur.swap(k, i);
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for &i in &self.images {
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

pub fn act_particle_basis<T: Clone>(p: &Perm, seq: &[T]) -> Result<Vec<T>> {
    if p.len() != seq.len() {
        return Err(Error::SizeMismatch(p.len(), seq.len()));
    }
    Ok(p.images.iter().map(|&k| seq[k].clone()).collect())
}

/// A relabelling of one-particle states; labels not mentioned are fixed.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct StatePerm {
    map: BTreeMap<usize, usize>,
}

impl StatePerm {
    pub fn identity() -> Self {
        Self::default()
    }

    /// The cycle `labels[0] → labels[1] → … → labels[0]`.
    pub fn cycle(labels: &[usize]) -> Self {
        let map = labels
            .iter()
            .enumerate()
            .map(|(k, &a)| (a, labels[(k + 1) % labels.len()]))
            .collect();
        StatePerm { map }
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self::cycle(&[a, b])
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map.get(&x).copied().unwrap_or(x)
    }

    fn moved(&self) -> impl Iterator<Item = usize> + '_ {
        self.map.iter().filter(|(a, b)| a != b).map(|(a, _)| *a)
    }
}

pub fn act_state_perm(sp: &StatePerm, seq: &[usize]) -> Result<Vec<usize>> {
    if let Some(x) = sp.moved().find(|x| !seq.contains(x)) {
        return Err(Error::LabelNotInComposition(x));
    }
    Ok(seq.iter().map(|&x| sp.apply(x)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Young,
    Weyl,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Tableau {
    pub rows: Vec<Vec<usize>>,
    pub flavor: Flavor,
}

impl Tableau {
    pub fn shape(&self) -> Vec<usize> {
        self.rows.iter().map(Vec::len).collect()
    }

    pub fn is_valid(&self) -> bool {
        let shape = self.shape();
        if shape.windows(2).any(|w| w[1] > w[0]) || shape.contains(&0) {
            return false;
        }
        for (r, row) in self.rows.iter().enumerate() {
            for (c, &x) in row.iter().enumerate() {
                if c > 0 {
                    let left = row[c - 1];
                    let ok = match self.flavor {
                        Flavor::Young => left < x,
                        Flavor::Weyl => left <= x,
                    };
                    if !ok {
                        return false;
                    }
                }
                if r > 0 && self.rows[r - 1][c] >= x {
                    return false;
                }
            }
        }
        true
    }

    /// Rows separated by `/`; entries comma-separated if any exceeds 9.
    pub fn to_text(&self) -> String {
        let wide = self.rows.iter().flatten().any(|&x| x > 9);
        self.rows
            .iter()
            .map(|row| {
                let parts: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                parts.join(if wide { "," } else { "" })
            })
            .collect::<Vec<_>>()
            .join("/")
    }

    pub fn parse(s: &str, flavor: Flavor) -> Result<Self> {
        let bad = || Error::Invalid(format!("bad tableau {s:?}"));
        let wide = s.contains(',');
        let rows = s
            .split('/')
            .map(|row| {
                if wide {
                    row.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
                } else {
                    row.chars()
                        .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                        .collect()
                }
            })
            .collect::<Result<Vec<Vec<usize>>>>()?;
        let t = Tableau { rows, flavor };
        if t.is_valid() {
            Ok(t)
        } else {
            Err(bad())
        }
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Partitions of `n` in reverse lexicographic order (`[3], [2,1], [1,1,1]`).
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            cur.push(k);
            rec(n - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

pub fn conjugate(shape: &[usize]) -> Vec<usize> {
    let w = shape.first().copied().unwrap_or(0);
    (0..w).map(|c| shape.iter().filter(|&&r| r > c).count()).collect()
}

pub fn shape_text(shape: &[usize]) -> String {
    // [21], [1³] style
    let mut out = String::from("[");
    let mut i = 0;
    while i < shape.len() {
        let v = shape[i];
        let run = shape[i..].iter().take_while(|&&x| x == v).count();
        out.push_str(&v.to_string());
        if run > 1 {
            out.push_str(&superscript(run));
        }
        i += run;
    }
    out.push(']');
    out
}

pub fn superscript(n: usize) -> String {
    const SUP: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string().chars().map(|c| SUP[c.to_digit(10).unwrap() as usize]).collect()
}

/// All tableaux of `shape` filled with the multiset `alphabet`, sorted.
pub fn enumerate_tableaux(shape: &[usize], alphabet: &[usize], flavor: Flavor) -> Result<Vec<Tableau>> {
    let total: usize = shape.iter().sum();
    if total != alphabet.len() || shape.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::ShapeAlphabetMismatch(format!(
            "shape {shape:?} vs {} labels",
            alphabet.len()
        )));
    }
    let mut sorted = alphabet.to_vec();
    sorted.sort_unstable();
    if flavor == Flavor::Young && sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::ShapeAlphabetMismatch("Young tableaux need distinct entries".into()));
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &a in &sorted {
        *counts.entry(a).or_default() += 1;
    }
    let cells: Vec<(usize, usize)> = shape
        .iter()
        .enumerate()
        .flat_map(|(r, &len)| (0..len).map(move |c| (r, c)))
        .collect();
    let mut rows: Vec<Vec<usize>> = shape.iter().map(|&l| vec![0; l]).collect();
    let mut out = Vec::new();
    fill(&cells, 0, &mut rows, &mut counts, flavor, &mut out);
    out.sort();
    out.dedup();
    Ok(out)
}

fn fill(
    cells: &[(usize, usize)],
    k: usize,
    rows: &mut Vec<Vec<usize>>,
    counts: &mut BTreeMap<usize, usize>,
    flavor: Flavor,
    out: &mut Vec<Tableau>,
) {
    if k == cells.len() {
        out.push(Tableau { rows: rows.clone(), flavor });
        return;
    }
    let (r, c) = cells[k];
    let labels: Vec<usize> = counts.iter().filter(|(_, &n)| n > 0).map(|(&a, _)| a).collect();
    for a in labels {
        if c > 0 {
            let left = rows[r][c - 1];
            if a < left || (flavor == Flavor::Young && a == left) {
                continue;
            }
        }
        if r > 0 && rows[r - 1][c] >= a {
            continue;
        }
        rows[r][c] = a;
        *counts.get_mut(&a).unwrap() -= 1;
        fill(cells, k + 1, rows, counts, flavor, out);
        *counts.get_mut(&a).unwrap() += 1;
    }
}

/// Number of standard Young tableaux, i.e. the dimension of `[μ]`.
pub fn irrep_dim(shape: &[usize]) -> usize {
    let n: usize = shape.iter().sum();
    let alphabet: Vec<usize> = (1..=n).collect();
    enumerate_tableaux(shape, &alphabet, Flavor::Young).map(|v| v.len()).unwrap_or(0)
}

/// Multiplicity of `[μ]` in the permutation module of a composition.
pub fn weyl_multiplicity(shape: &[usize], labels: &[usize]) -> usize {
    enumerate_tableaux(shape, labels, Flavor::Weyl).map(|v| v.len()).unwrap_or(0)
}

/// Semistandard tableaux of `shape` with entries from `j` letters.
pub fn semistandard_count(shape: &[usize], j: usize) -> usize {
    let n: usize = shape.iter().sum();
    multisets(j, n).iter().map(|m| weyl_multiplicity(shape, m)).sum()
}

fn multisets(j: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, j: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for a in start..j {
            cur.push(a);
            rec(a, j, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, j, n, &mut Vec::new(), &mut out);
    out
}

/// All distinct orderings of a multiset, lexicographic.
pub fn sequences(labels: &[usize]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Perm::all(labels.len())
        .iter()
        .map(|p| p.images.iter().map(|&k| labels[k]).collect())
        .collect();
    out.sort();
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisRow {
    pub irrep: Vec<usize>,
    pub weyl: Tableau,
    pub young: Tableau,
}

#[derive(Clone, Debug)]
pub struct SymmetrizedBasis {
    /// Sorted composition labels.
    pub labels: Vec<usize>,
    /// Particle-sequence basis, lexicographic.
    pub sequences: Vec<Vec<usize>>,
    pub rows: Vec<BasisRow>,
    /// `coeffs[(r, c)] = ⟨sequence c | row r⟩`.
    pub coeffs: DMatrix<f64>,
}

fn young(s: &str) -> Tableau {
    Tableau::parse(s, Flavor::Young).expect("static tableau")
}

fn weyl(rows: &[&[usize]]) -> Tableau {
    Tableau { rows: rows.iter().map(|r| r.to_vec()).collect(), flavor: Flavor::Weyl }
}

pub fn symmetrized_basis(labels: &[usize]) -> Result<SymmetrizedBasis> {
    let mut labels = labels.to_vec();
    labels.sort_unstable();
    let seqs = sequences(&labels);
    let pos = |s: &[usize]| seqs.iter().position(|x| x == s).expect("sequence in basis");
    let mut rows = Vec::new();
    // (row, list of (sequence, coefficient))
    let mut entries: Vec<Vec<(Vec<usize>, f64)>> = Vec::new();
    let s2 = std::f64::consts::SQRT_2;
    let s3 = 3f64.sqrt();
    let s6 = 6f64.sqrt();
    let s12 = 12f64.sqrt();
    match labels.as_slice() {
        [a] => {
            rows.push(BasisRow { irrep: vec![1], weyl: weyl(&[&[*a]]), young: young("1") });
            entries.push(vec![(vec![*a], 1.0)]);
        }
        [a, b] if a == b => {
            rows.push(BasisRow { irrep: vec![2], weyl: weyl(&[&[*a, *a]]), young: young("12") });
            entries.push(vec![(vec![*a, *a], 1.0)]);
        }
        [a, b] => {
            let (a, b) = (*a, *b);
            rows.push(BasisRow { irrep: vec![2], weyl: weyl(&[&[a, b]]), young: young("12") });
            entries.push(vec![(vec![a, b], 1.0 / s2), (vec![b, a], 1.0 / s2)]);
            rows.push(BasisRow { irrep: vec![1, 1], weyl: weyl(&[&[a], &[b]]), young: young("1/2") });
            entries.push(vec![(vec![a, b], 1.0 / s2), (vec![b, a], -1.0 / s2)]);
        }
        [a, b, c] if a == b && b == c => {
            let a = *a;
            rows.push(BasisRow { irrep: vec![3], weyl: weyl(&[&[a, a, a]]), young: young("123") });
            entries.push(vec![(vec![a, a, a], 1.0)]);
        }
        [a, b, c] if a == b || b == c => {
            // d doubled, s single; coefficients over (dds, dsd, sdd)
            let (d, s) = if a == b { (*a, *c) } else { (*c, *a) };
            let order = [vec![d, d, s], vec![d, s, d], vec![s, d, d]];
            let mixed = if d < s { weyl(&[&[d, d], &[s]]) } else { weyl(&[&[s, d], &[d]]) };
            let mut sorted = vec![d, d, s];
            sorted.sort_unstable();
            rows.push(BasisRow { irrep: vec![3], weyl: weyl(&[&sorted]), young: young("123") });
            entries.push(order.iter().map(|q| (q.clone(), 1.0 / s3)).collect());
            rows.push(BasisRow { irrep: vec![2, 1], weyl: mixed.clone(), young: young("12/3") });
            entries.push(order.iter().cloned().zip([2.0 / s6, -1.0 / s6, -1.0 / s6]).collect());
            rows.push(BasisRow { irrep: vec![2, 1], weyl: mixed, young: young("13/2") });
            entries.push(order.iter().cloned().zip([0.0, 1.0 / s2, -1.0 / s2]).collect());
        }
        [a, b, g] => {
            let (a, b, g) = (*a, *b, *g);
            // αβγ, βαγ, γβα, αγβ, γαβ, βγα
            let order = [
                vec![a, b, g],
                vec![b, a, g],
                vec![g, b, a],
                vec![a, g, b],
                vec![g, a, b],
                vec![b, g, a],
            ];
            let table: [(Vec<usize>, Tableau, &str, [f64; 6], f64); 6] = [
                (vec![3], weyl(&[&[a, b, g]]), "123", [1.0; 6], s6),
                (vec![2, 1], weyl(&[&[a, b], &[g]]), "12/3", [2.0, 2.0, -1.0, -1.0, -1.0, -1.0], s12),
                (vec![2, 1], weyl(&[&[a, b], &[g]]), "13/2", [0.0, 0.0, -1.0, 1.0, -1.0, 1.0], 2.0),
                (vec![2, 1], weyl(&[&[a, g], &[b]]), "12/3", [0.0, 0.0, -1.0, 1.0, 1.0, -1.0], 2.0),
                (vec![2, 1], weyl(&[&[a, g], &[b]]), "13/2", [2.0, -2.0, 1.0, 1.0, -1.0, -1.0], s12),
                (vec![1, 1, 1], weyl(&[&[a], &[b], &[g]]), "1/2/3", [1.0, -1.0, -1.0, -1.0, 1.0, 1.0], s6),
            ];
            for (irrep, w, y, coef, norm) in table {
                rows.push(BasisRow { irrep, weyl: w, young: young(y) });
                entries.push(order.iter().cloned().zip(coef.iter().map(|c| c / norm)).collect());
            }
        }
        _ => return Err(Error::UnsupportedN(labels.len())),
    }
    let mut coeffs = DMatrix::zeros(rows.len(), seqs.len());
    for (r, row) in entries.iter().enumerate() {
        for (seq, v) in row {
            coeffs[(r, pos(seq))] = *v;
        }
    }
    Ok(SymmetrizedBasis { labels, sequences: seqs, rows, coeffs })
}

impl SymmetrizedBasis {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// `B M Bᵀ` for an operator given in the sequence basis.
    pub fn transform(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        &self.coeffs * m * self.coeffs.transpose()
    }
}

/// Matrix of `U(p)` in the sequence basis of a composition.
pub fn particle_perm_matrix(p: &Perm, labels: &[usize]) -> Result<DMatrix<f64>> {
    let seqs = sequences(labels);
    let mut m = DMatrix::zeros(seqs.len(), seqs.len());
    for (c, s) in seqs.iter().enumerate() {
        let img = act_particle_basis(p, s)?;
        let r = seqs.iter().position(|x| *x == img).expect("closed orbit");
        m[(r, c)] = 1.0;
    }
    Ok(m)
}

/// Matrix of a state permutation; it must map the composition to itself.
pub fn state_perm_matrix(sp: &StatePerm, labels: &[usize]) -> Result<DMatrix<f64>> {
    let seqs = sequences(labels);
    let mut m = DMatrix::zeros(seqs.len(), seqs.len());
    for (c, s) in seqs.iter().enumerate() {
        let img = act_state_perm(sp, s)?;
        let r = seqs.iter().position(|x| *x == img).ok_or_else(|| {
            Error::Invalid("state permutation leaves the composition space".into())
        })?;
        m[(r, c)] = 1.0;
    }
    Ok(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassOp {
    /// Sum over all particle transpositions, `C₂⌊1…N⌋`.
    AllTranspositions,
    /// `U((i j))` for 0-based particles.
    Transposition(usize, usize),
    /// State-label swap `U(αβ)`.
    StateSwap(usize, usize),
}

pub fn class_operator_matrix(op: ClassOp, labels: &[usize]) -> Result<DMatrix<f64>> {
    let n = labels.len();
    if !(1..=3).contains(&n) {
        return Err(Error::UnsupportedN(n));
    }
    match op {
        ClassOp::AllTranspositions => {
            let d = sequences(labels).len();
            let mut m = DMatrix::zeros(d, d);
            for i in 0..n {
                for j in i + 1..n {
                    m += particle_perm_matrix(&Perm::transposition(n, i, j), labels)?;
                }
            }
            Ok(m)
        }
        ClassOp::Transposition(i, j) => {
            if i >= n || j >= n {
                return Err(Error::SizeMismatch(i.max(j) + 1, n));
            }
            particle_perm_matrix(&Perm::transposition(n, i, j), labels)
        }
        ClassOp::StateSwap(a, b) => state_perm_matrix(&StatePerm::swap(a, b), labels),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistics {
    Distinguishable,
    Boson,
    Fermion,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinSector {
    pub shape: Vec<usize>,
    /// Copies of the `S_N` irrep in the spin space (semistandard tableaux).
    pub multiplicity: usize,
    pub irrep_dim: usize,
}

impl SpinSector {
    pub fn dim(&self) -> usize {
        self.multiplicity * self.irrep_dim
    }
}

pub fn spin_sector_dims(n: usize, j: usize) -> Result<Vec<SpinSector>> {
    if !(2..=3).contains(&n) {
        return Err(Error::UnsupportedN(n));
    }
    if j == 0 {
        return Err(Error::Invalid("need at least one spin component".into()));
    }
    Ok(partitions(n)
        .into_iter()
        .map(|shape| SpinSector {
            multiplicity: semistandard_count(&shape, j),
            irrep_dim: irrep_dim(&shape),
            shape,
        })
        .collect())
}

/// Physical states in one composition level once spin is attached.
pub fn count_symmetrized_states(labels: &[usize], stats: Statistics, j: usize) -> Result<usize> {
    let n = labels.len();
    if !(1..=3).contains(&n) {
        return Err(Error::UnsupportedN(n));
    }
    if j == 0 {
        return Err(Error::Invalid("need at least one spin component".into()));
    }
    Ok(match stats {
        Statistics::Distinguishable => sequences(labels).len() * j.pow(n as u32),
        Statistics::Boson => partitions(n)
            .iter()
            .map(|mu| weyl_multiplicity(mu, labels) * semistandard_count(mu, j))
            .sum(),
        Statistics::Fermion => partitions(n)
            .iter()
            .map(|mu| weyl_multiplicity(mu, labels) * semistandard_count(&conjugate(mu), j))
            .sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const A: usize = 0;
    const B: usize = 1;
    const G: usize = 2;

    fn p(s: &str) -> Perm {
        Perm::from_notation(s).unwrap()
    }

    #[test]
    fn notation_and_cycles() {
        assert_eq!(Perm::from_cycles("(123)", 3).unwrap(), p("231"));
        assert_eq!(p("231").to_cycles(), "(123)");
        assert_eq!(p("213").to_cycles(), "(12)");
        assert_eq!(Perm::identity(3).to_cycles(), "e");
        assert_eq!(p("312").invert(), p("231"));
        assert_eq!(p("231").sign(), 1);
        assert_eq!(p("213").sign(), -1);
        assert_eq!(format!("{}", p("312")), "{312}");
        assert!(Perm::from_notation("113").is_err());
        assert!(Perm::from_cycles("(14)", 3).is_err());
    }

    #[test]
    fn particle_action() {
        let seq = [A, B, G];
        assert_eq!(act_particle_basis(&p("213"), &seq).unwrap(), vec![B, A, G]);
        let c = Perm::from_cycles("(123)", 3).unwrap();
        assert_eq!(act_particle_basis(&c, &seq).unwrap(), vec![B, G, A]);
        assert_eq!(act_particle_basis(&Perm::identity(3), &seq).unwrap(), seq.to_vec());
        assert!(act_particle_basis(&p("21"), &seq).is_err());
    }

    #[test]
    fn compose_is_operator_product() {
        let a = p("312");
        let b = p("213");
        let probe = [7, 8, 9];
        let lhs = act_particle_basis(&a.compose(&b).unwrap(), &probe).unwrap();
        let rhs = act_particle_basis(&a, &act_particle_basis(&b, &probe).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert!(a.compose(&p("21")).is_err());
    }

    #[test]
    fn state_action() {
        assert_eq!(act_state_perm(&StatePerm::swap(A, B), &[B, G, A]).unwrap(), vec![A, G, B]);
        assert_eq!(act_state_perm(&StatePerm::cycle(&[A, B, G]), &[B, A, G]).unwrap(), vec![G, B, A]);
        assert_eq!(act_state_perm(&StatePerm::identity(), &[B, A]).unwrap(), vec![B, A]);
        assert!(matches!(
            act_state_perm(&StatePerm::swap(A, 5), &[A, B]),
            Err(Error::LabelNotInComposition(5))
        ));
    }

    #[test]
    fn tableaux_counts() {
        let aab = [A, A, B];
        let total: usize = partitions(3)
            .iter()
            .map(|s| enumerate_tableaux(s, &aab, Flavor::Weyl).unwrap().len())
            .sum();
        assert_eq!(total, 2);
        assert_eq!(enumerate_tableaux(&[2, 1], &[A, A, B], Flavor::Weyl).unwrap().len(), 1);
        assert_eq!(enumerate_tableaux(&[1, 1, 1], &aab, Flavor::Weyl).unwrap().len(), 0);
        let y = enumerate_tableaux(&[2, 1], &[1, 2, 3], Flavor::Young).unwrap();
        assert_eq!(y.iter().map(|t| t.to_text()).collect::<Vec<_>>(), ["12/3", "13/2"]);
        let abg: usize = partitions(3)
            .iter()
            .map(|s| enumerate_tableaux(s, &[A, B, G], Flavor::Weyl).unwrap().len())
            .sum();
        assert_eq!(abg, 4);
        assert_eq!(
            enumerate_tableaux(&[1, 1, 1], &[A, A, A], Flavor::Weyl).unwrap().len()
                + enumerate_tableaux(&[3], &[A, A, A], Flavor::Weyl).unwrap().len(),
            1
        );
        assert!(enumerate_tableaux(&[2, 1], &[A, B], Flavor::Weyl).is_err());
    }

    #[test]
    fn tableau_text_round_trip() {
        let t = Tableau { rows: vec![vec![3, 12], vec![14]], flavor: Flavor::Weyl };
        assert_eq!(t.to_text(), "3,12/14");
        assert_eq!(Tableau::parse("3,12/14", Flavor::Weyl).unwrap(), t);
        assert!(Tableau::parse("ab", Flavor::Weyl).is_err());
        assert!(Tableau::parse("21", Flavor::Young).is_err());
    }

    #[test]
    fn shapes() {
        assert_eq!(partitions(3), vec![vec![3], vec![2, 1], vec![1, 1, 1]]);
        assert_eq!(conjugate(&[2, 1]), vec![2, 1]);
        assert_eq!(conjugate(&[3]), vec![1, 1, 1]);
        assert_eq!(shape_text(&[1, 1, 1]), "[1³]");
        assert_eq!(shape_text(&[2, 1]), "[21]");
        assert_eq!(irrep_dim(&[2, 1]), 2);
    }

    #[test]
    fn printed_basis_rows() {
        let b = symmetrized_basis(&[A, B]).unwrap();
        let r = 1.0 / 2f64.sqrt();
        assert_eq!(b.coeffs.row(0).iter().copied().collect::<Vec<_>>(), vec![r, r]);
        assert_eq!(b.coeffs.row(1).iter().copied().collect::<Vec<_>>(), vec![r, -r]);

        let b = symmetrized_basis(&[A, A, B]).unwrap();
        assert_eq!(b.sequences, vec![vec![A, A, B], vec![A, B, A], vec![B, A, A]]);
        let row = |k: usize| b.coeffs.row(k).iter().copied().collect::<Vec<_>>();
        let s6 = 6f64.sqrt();
        assert_eq!(row(1), vec![2.0 / s6, -1.0 / s6, -1.0 / s6]);
        assert_eq!(row(2), vec![0.0, r, -r]);
        assert_eq!(b.rows[1].weyl.to_text(), "00/1");
        assert_eq!(b.rows[2].young.to_text(), "13/2");

        // antisymmetric row over lexicographic αβγ, αγβ, βαγ, βγα, γαβ, γβα
        let b = symmetrized_basis(&[A, B, G]).unwrap();
        let last: Vec<f64> = b.coeffs.row(5).iter().map(|x| x * s6).collect();
        for (x, e) in last.iter().zip([1.0, -1.0, -1.0, 1.0, 1.0, -1.0]) {
            assert!((x - e).abs() < 1e-14);
        }
    }

    #[test]
    fn doubled_upper_label_keeps_pattern() {
        // ⌊0 1 1⌋: the doubled label is the larger one
        let b = symmetrized_basis(&[0, 1, 1]).unwrap();
        assert_eq!(b.rows[1].weyl.to_text(), "01/1");
        assert!(b.rows[1].weyl.is_valid());
        // (12,3) row: 2|110⟩ − |101⟩ − |011⟩
        let s6 = 6f64.sqrt();
        let expect = [-1.0 / s6, -1.0 / s6, 2.0 / s6];
        for (x, e) in b.coeffs.row(1).iter().zip(expect) {
            assert!((x - e).abs() < 1e-15);
        }
    }

    fn check_orthogonal(labels: &[usize]) {
        let b = symmetrized_basis(labels).unwrap();
        let g = &b.coeffs * b.coeffs.transpose();
        assert_eq!(g.nrows(), b.sequences.len());
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((g[(i, j)] - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bases_are_orthogonal() {
        for labels in [vec![3], vec![2, 2], vec![1, 4], vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 1], vec![2, 5, 7]] {
            check_orthogonal(&labels);
        }
    }

    #[test]
    fn class_operator_diagonal_in_basis() {
        for labels in [vec![0, 0], vec![0, 1], vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 1], vec![0, 1, 2]] {
            let b = symmetrized_basis(&labels).unwrap();
            let c = b.transform(&class_operator_matrix(ClassOp::AllTranspositions, &labels).unwrap());
            for (r, row) in b.rows.iter().enumerate() {
                let expect = match row.irrep.as_slice() {
                    [2] => 1.0,
                    [1, 1] => -1.0,
                    [3] => 3.0,
                    [2, 1] => 0.0,
                    [1, 1, 1] => -3.0,
                    _ => unreachable!(),
                };
                for col in 0..b.dim() {
                    let e = if col == r { expect } else { 0.0 };
                    assert!((c[(r, col)] - e).abs() < 1e-12, "{labels:?} {r} {col}");
                }
            }
            // Young tableau 12/3 is even under (12), 13/2 odd
            let u12 = b.transform(&class_operator_matrix(ClassOp::Transposition(0, 1), &labels).unwrap());
            for (r, row) in b.rows.iter().enumerate() {
                let expect = match row.young.to_text().as_str() {
                    "12/3" | "12" | "123" => 1.0,
                    "13/2" | "1/2" | "1/2/3" => -1.0,
                    _ => unreachable!(),
                };
                assert!((u12[(r, r)] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spectrum_of_c2_on_abg() {
        let m = class_operator_matrix(ClassOp::AllTranspositions, &[A, B, G]).unwrap();
        let ev = crate::linalg::sym_eigenvalues(&m);
        let expect = [-3.0, 0.0, 0.0, 0.0, 0.0, 3.0];
        for (x, e) in ev.iter().zip(expect) {
            assert!((x - e).abs() < 1e-12);
        }
        let m = class_operator_matrix(ClassOp::AllTranspositions, &[A, A, A]).unwrap();
        assert_eq!(m[(0, 0)], 3.0);
    }

    #[test]
    fn state_swap_eigen_on_abg_rows() {
        // Û(αβ) is diagonal: even on [3] and the (αβ,γ) copy, odd on the rest
        let labels = [A, B, G];
        let b = symmetrized_basis(&labels).unwrap();
        let s = b.transform(&class_operator_matrix(ClassOp::StateSwap(A, B), &labels).unwrap());
        let expect = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 1.0, -1.0, -1.0, -1.0]));
        assert!((s - expect).amax() < 1e-12);
        assert!(class_operator_matrix(ClassOp::StateSwap(A, B), &[A, A, B]).is_err());
    }

    #[test]
    fn particle_and_state_perms_commute() {
        let labels = [A, B, G];
        for pp in Perm::all(3) {
            let u = particle_perm_matrix(&pp, &labels).unwrap();
            for sp in [StatePerm::swap(A, B), StatePerm::swap(B, G), StatePerm::cycle(&[A, B, G])] {
                let s = state_perm_matrix(&sp, &labels).unwrap();
                assert_eq!(&u * &s, &s * &u);
            }
        }
    }

    #[test]
    fn spin_sectors() {
        let d = spin_sector_dims(3, 2).unwrap();
        assert_eq!((d[0].multiplicity, d[0].dim()), (4, 4));
        assert_eq!((d[1].multiplicity, d[1].irrep_dim, d[1].dim()), (2, 2, 4));
        assert_eq!(d[2].dim(), 0);
        let d = spin_sector_dims(2, 2).unwrap();
        assert_eq!((d[0].dim(), d[1].dim()), (3, 1));
        assert_eq!(spin_sector_dims(3, 3).unwrap()[2].dim(), 1);
        for n in 2..=3 {
            for j in 1..=4 {
                let total: usize = spin_sector_dims(n, j).unwrap().iter().map(SpinSector::dim).sum();
                assert_eq!(total, j.pow(n as u32));
            }
        }
        assert!(spin_sector_dims(4, 2).is_err());
    }

    #[test]
    fn spin_populations() {
        assert_eq!(count_symmetrized_states(&[A, B, G], Statistics::Fermion, 2).unwrap(), 8);
        assert_eq!(count_symmetrized_states(&[A, A, B], Statistics::Fermion, 2).unwrap(), 2);
        assert_eq!(count_symmetrized_states(&[A, A, A], Statistics::Fermion, 2).unwrap(), 0);
        assert_eq!(count_symmetrized_states(&[A, B], Statistics::Fermion, 1).unwrap(), 1);
        assert_eq!(count_symmetrized_states(&[A, A], Statistics::Fermion, 1).unwrap(), 0);
        assert_eq!(count_symmetrized_states(&[A, B, G], Statistics::Boson, 2).unwrap(), 4 + 2 * 2);
        assert_eq!(count_symmetrized_states(&[A, B, G], Statistics::Distinguishable, 2).unwrap(), 48);
    }

    proptest! {
        #[test]
        fn group_axioms(a in 0usize..24, b in 0usize..24, c in 0usize..24) {
            let all = Perm::all(4);
            let (a, b, c) = (&all[a], &all[b], &all[c]);
            let ab_c = a.compose(b).unwrap().compose(c).unwrap();
            let a_bc = a.compose(&b.compose(c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            prop_assert_eq!(a.compose(&a.invert()).unwrap(), Perm::identity(4));
            prop_assert_eq!(a.compose(b).unwrap().sign(), a.sign() * b.sign());
            prop_assert_eq!(Perm::from_cycles(&a.to_cycles(), 4).unwrap(), a.clone());
        }

        #[test]
        fn act_then_inverse(k in 0usize..6, seq in proptest::collection::vec(0usize..5, 3)) {
            let pp = &Perm::all(3)[k];
            let there = act_particle_basis(pp, &seq).unwrap();
            prop_assert_eq!(act_particle_basis(&pp.invert(), &there).unwrap(), seq);
        }

        #[test]
        fn random_compositions_orthogonal(mut labels in proptest::collection::vec(0usize..6, 1..=3)) {
            labels.sort();
            let b = symmetrized_basis(&labels).unwrap();
            let g = &b.coeffs * b.coeffs.transpose();
            prop_assert!((g - DMatrix::identity(b.dim(), b.dim())).amax() < 1e-12);
            prop_assert_eq!(b.dim(), b.sequences.len());
            // Σ m_μ d_μ tallies with the number of orderings
            let mult: usize = partitions(labels.len())
                .iter()
                .map(|mu| weyl_multiplicity(mu, &labels) * irrep_dim(mu))
                .sum();
            prop_assert_eq!(mult, b.dim());
        }
    }
}

//! Weak-coupling splitting of non-interacting levels and exact
//! diagonalisation in symmetry-adapted truncated bases.
//!
//! Both work on the same objects: for every composition the symmetrized
//! basis supplies one row per (Weyl tableau, Young tableau). Interactions are
//! diagonal in the Young tableau and identical across tableaux of one irrep,
//! so a single representative Young tableau per irrep copy is kept.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::sym_eigen;
use crate::onebody::OneBodySolution;
use crate::permsym::{irrep_dim, symmetrized_basis, SymmetrizedBasis};
use crate::spectra::{enumerate_compositions, Composition};
use crate::twobody::{build_table, InteractionSpec, TwoBodyTable};

/// Compositions closer than this in energy are treated as one level.
pub const DEGENERACY_MERGE_TOL: f64 = 1e-8;
/// Largest block handed to the dense eigensolver.
pub const MAX_DENSE_BLOCK: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Noninteracting,
    Weak,
    Ed,
    Unitary,
    NearUnitary,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Noninteracting => "noninteracting",
            Provenance::Weak => "weak",
            Provenance::Ed => "ed",
            Provenance::Unitary => "unitary",
            Provenance::NearUnitary => "near_unitary",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitLevel {
    pub base_energy: f64,
    pub shift: f64,
    pub degeneracy: usize,
    pub irrep: Vec<usize>,
    pub parity: Option<i8>,
    /// Coefficients over the irrep copies of the level (weak), or over the
    /// sector basis (ED).
    pub eigvec: Vec<f64>,
    pub provenance: Provenance,
    /// Composition(s) the level comes from.
    pub labels: String,
}

impl SplitLevel {
    pub fn energy(&self) -> f64 {
        self.base_energy + self.shift
    }
}

/// `⟨s|V^N|t⟩` between particle sequences.
pub fn sequence_element(table: &TwoBodyTable, s: &[usize], t: &[usize]) -> Result<f64> {
    match (s, t) {
        ([_], [_]) => Ok(0.0),
        ([a, b], [c, d]) => table.get(*a, *b, *c, *d),
        ([a, b, g], [z, e, th]) => {
            let mut v = 0.0;
            if g == th {
                v += table.get(*a, *b, *z, *e)?;
            }
            if a == z {
                v += table.get(*b, *g, *e, *th)?;
            }
            if b == e {
                v += table.get(*a, *g, *z, *th)?;
            }
            Ok(v)
        }
        _ => Err(Error::SizeMismatch(s.len(), t.len())),
    }
}

fn sequence_matrix(table: &TwoBodyTable, rows: &[Vec<usize>], cols: &[Vec<usize>]) -> Result<DMatrix<f64>> {
    let mut m = DMatrix::zeros(rows.len(), cols.len());
    for (i, s) in rows.iter().enumerate() {
        for (j, t) in cols.iter().enumerate() {
            m[(i, j)] = sequence_element(table, s, t)?;
        }
    }
    Ok(m)
}

fn fix_phase(v: &mut [f64]) {
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

pub fn weak_split_2(comp: &Composition, table: &TwoBodyTable) -> Result<Vec<SplitLevel>> {
    if comp.n() != 2 {
        return Err(Error::UnsupportedN(comp.n()));
    }
    let (a, b) = (comp.labels[0], comp.labels[1]);
    let level = |shift: f64, irrep: Vec<usize>| SplitLevel {
        base_energy: comp.energy,
        shift,
        degeneracy: 1,
        irrep,
        parity: None,
        eigvec: vec![1.0],
        provenance: Provenance::Weak,
        labels: comp.text(),
    };
    if a == b {
        // ⟨αα|V|αα⟩, a single symmetric state
        return Ok(vec![level(table.get(a, a, a, a)?, vec![2])]);
    }
    let d = table.direct(a, b)?;
    let x = table.exchange(a, b)?;
    Ok(vec![level(d + x, vec![2]), level(d - x, vec![1, 1])])
}

/// `V³` on a composition space, in the rows of `basis`.
pub fn v3_block(comp: &Composition, table: &TwoBodyTable, basis: &SymmetrizedBasis) -> Result<DMatrix<f64>> {
    if comp.n() != 3 {
        return Err(Error::UnsupportedN(comp.n()));
    }
    if basis.labels != comp.labels {
        return Err(Error::Invalid("basis belongs to another composition".into()));
    }
    let m = sequence_matrix(table, &basis.sequences, &basis.sequences)?;
    Ok(basis.transform(&m))
}

/// Reduced `[21]` block of `⌊αβγ⌋` over the copies `(⌊αβ,γ⌋, ⌊αγ,β⌋)`.
pub fn reduced_21_block(table: &TwoBodyTable, a: usize, b: usize, g: usize) -> Result<[[f64; 2]; 2]> {
    let (dab, dbg, dag) = (table.direct(a, b)?, table.direct(b, g)?, table.direct(a, g)?);
    let (xab, xbg, xag) = (table.exchange(a, b)?, table.exchange(b, g)?, table.exchange(a, g)?);
    let p = dab + xab + dbg - 0.5 * xbg + dag - 0.5 * xag;
    let q = dab - xab + dbg + 0.5 * xbg + dag + 0.5 * xag;
    let o = -0.5 * 3f64.sqrt() * (xag - xbg);
    Ok([[p, o], [o, q]])
}

fn eigvec_2x2(m: [[f64; 2]; 2], lam: f64) -> Vec<f64> {
    let [[p, o], [_, q]] = m;
    let u = [o, lam - p];
    let w = [lam - q, o];
    let pick = if u[0].hypot(u[1]) >= w[0].hypot(w[1]) { u } else { w };
    let n = pick[0].hypot(pick[1]);
    let mut v = if n > 0.0 { vec![pick[0] / n, pick[1] / n] } else { vec![1.0, 0.0] };
    fix_phase(&mut v);
    v
}

pub fn weak_split_3(comp: &Composition, table: &TwoBodyTable) -> Result<Vec<SplitLevel>> {
    if comp.n() != 3 {
        return Err(Error::UnsupportedN(comp.n()));
    }
    let level = |shift: f64, irrep: Vec<usize>, eigvec: Vec<f64>| SplitLevel {
        base_energy: comp.energy,
        shift,
        degeneracy: irrep_dim(&irrep),
        irrep,
        parity: None,
        eigvec,
        provenance: Provenance::Weak,
        labels: comp.text(),
    };
    let l = &comp.labels;
    match comp.shape.as_slice() {
        [3] => Ok(vec![level(3.0 * table.get(l[0], l[0], l[0], l[0])?, vec![3], vec![1.0])]),
        [2, 1] => {
            let (d, s) = if l[0] == l[1] { (l[0], l[2]) } else { (l[2], l[0]) };
            let vdd = table.get(d, d, d, d)?;
            let dir = table.direct(d, s)?;
            let x = table.exchange(d, s)?;
            Ok(vec![
                level(vdd + 2.0 * dir + 2.0 * x, vec![3], vec![1.0]),
                level(vdd + 2.0 * dir - x, vec![2, 1], vec![1.0]),
            ])
        }
        _ => {
            let (a, b, g) = (l[0], l[1], l[2]);
            let sd = table.direct(a, b)? + table.direct(b, g)? + table.direct(a, g)?;
            let (xab, xbg, xag) = (table.exchange(a, b)?, table.exchange(b, g)?, table.exchange(a, g)?);
            let sx = xab + xbg + xag;
            let rad = (xab * xab - xab * xbg + xbg * xbg - xbg * xag + xag * xag - xab * xag).max(0.0).sqrt();
            let m = reduced_21_block(table, a, b, g)?;
            let (vp, vm) = (sd + rad, sd - rad);
            Ok(vec![
                level(sd + sx, vec![3], vec![1.0]),
                level(vp, vec![2, 1], eigvec_2x2(m, vp)),
                level(vm, vec![2, 1], eigvec_2x2(m, vm)),
                level(sd - sx, vec![1, 1, 1], vec![1.0]),
            ])
        }
    }
}

pub fn weak_split(comp: &Composition, table: &TwoBodyTable) -> Result<Vec<SplitLevel>> {
    match comp.n() {
        2 => weak_split_2(comp, table),
        3 => weak_split_3(comp, table),
        n => Err(Error::UnsupportedN(n)),
    }
}

/// One symmetry-adapted basis vector: a row of a composition's symmetrized
/// basis with the representative Young tableau of its irrep.
#[derive(Clone, Debug)]
pub struct SectorState {
    pub comp: usize,
    pub irrep: Vec<usize>,
    pub parity: Option<i8>,
    pub sequences: Vec<Vec<usize>>,
    pub coeffs: Vec<f64>,
}

pub type SectorKey = (Vec<usize>, Option<i8>);

/// Symmetry-adapted states of a list of compositions grouped by sector.
///
/// `rep` picks which standard Young tableau represents each irrep (0 is the
/// first in lexicographic order; it is clamped to the irrep dimension).
pub fn sector_states(
    comps: &[Composition],
    parities: Option<&[i8]>,
    rep: usize,
) -> Result<BTreeMap<SectorKey, Vec<SectorState>>> {
    let mut out: BTreeMap<SectorKey, Vec<SectorState>> = BTreeMap::new();
    for (ci, comp) in comps.iter().enumerate() {
        let basis = symmetrized_basis(&comp.labels)?;
        let parity = match parities {
            Some(p) => {
                let mut prod = 1i8;
                for &l in &comp.labels {
                    prod *= *p.get(l).ok_or(Error::StateOutOfRange(l, p.len()))?;
                }
                Some(prod)
            }
            None => None,
        };
        // Young tableaux of each irrep in row order; keep the chosen one
        let mut seen: BTreeMap<(Vec<usize>, Vec<Vec<usize>>), usize> = BTreeMap::new();
        for (r, row) in basis.rows.iter().enumerate() {
            let k = seen.entry((row.irrep.clone(), row.weyl.rows.clone())).or_insert(0);
            let idx = *k;
            *k += 1;
            if idx != rep.min(irrep_dim(&row.irrep) - 1) {
                continue;
            }
            out.entry((row.irrep.clone(), parity)).or_default().push(SectorState {
                comp: ci,
                irrep: row.irrep.clone(),
                parity,
                sequences: basis.sequences.clone(),
                coeffs: basis.coeffs.row(r).iter().copied().collect(),
            });
        }
    }
    Ok(out)
}

fn state_element(table: &TwoBodyTable, a: &SectorState, b: &SectorState) -> Result<f64> {
    let mut v = 0.0;
    for (s, ca) in a.sequences.iter().zip(&a.coeffs) {
        if *ca == 0.0 {
            continue;
        }
        for (t, cb) in b.sequences.iter().zip(&b.coeffs) {
            if *cb == 0.0 {
                continue;
            }
            v += ca * cb * sequence_element(table, s, t)?;
        }
    }
    Ok(v)
}

/// Interaction matrix within one sector.
pub fn sector_interaction(table: &TwoBodyTable, states: &[SectorState]) -> Result<DMatrix<f64>> {
    let n = states.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (i..n).map(|j| state_element(table, &states[i], &states[j])).collect::<Result<Vec<f64>>>())
        .collect::<Result<_>>()?;
    let mut m = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            m[(i, i + k)] = *v;
            m[(i + k, i)] = *v;
        }
    }
    Ok(m)
}

/// Groups of composition indices whose energies agree within the merge tolerance.
pub fn degenerate_groups(comps: &[Composition]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..comps.len()).collect();
    order.sort_by(|&a, &b| comps[a].energy.total_cmp(&comps[b].energy));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in order {
        match groups.last_mut() {
            Some(g) if (comps[i].energy - comps[g[g.len() - 1]].energy).abs() < DEGENERACY_MERGE_TOL => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

fn sort_levels(levels: &mut [SplitLevel]) {
    levels.sort_by(|a, b| {
        a.energy()
            .total_cmp(&b.energy())
            .then_with(|| b.irrep.cmp(&a.irrep))
            .then_with(|| b.parity.cmp(&a.parity))
            .then_with(|| a.labels.cmp(&b.labels))
    });
}

/// First-order levels of every composition, with accidentally degenerate
/// compositions diagonalised together.
pub fn weak_levels(comps: &[Composition], table: &TwoBodyTable, parities: Option<&[i8]>) -> Result<Vec<SplitLevel>> {
    let mut levels = Vec::new();
    for group in degenerate_groups(comps) {
        let members: Vec<Composition> = group.iter().map(|&i| comps[i].clone()).collect();
        let base = members[0].energy;
        let labels = members.iter().map(Composition::text).collect::<Vec<_>>().join("+");
        for ((irrep, parity), states) in sector_states(&members, parities, 0)? {
            let v = sector_interaction(table, &states)?;
            let (vals, vecs) = sym_eigen(&v);
            for (k, val) in vals.iter().enumerate() {
                levels.push(SplitLevel {
                    base_energy: base,
                    shift: *val,
                    degeneracy: irrep_dim(&irrep),
                    irrep: irrep.clone(),
                    parity,
                    eigvec: vecs.column(k).iter().copied().collect(),
                    provenance: Provenance::Weak,
                    labels: labels.clone(),
                });
            }
        }
    }
    sort_levels(&mut levels);
    Ok(levels)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EDConfig {
    pub e_max: f64,
    #[serde(default)]
    pub sector: Option<SectorKey>,
    pub interaction: InteractionSpec,
}

/// Sector sizes of a truncation.
pub fn sector_dims(comps: &[Composition], parities: Option<&[i8]>) -> Result<BTreeMap<SectorKey, usize>> {
    Ok(sector_states(comps, parities, 0)?.into_iter().map(|(k, v)| (k, v.len())).collect())
}

/// Exact diagonalisation with a precomputed interaction table.
pub fn diagonalize_sectors(
    comps: &[Composition],
    table: &TwoBodyTable,
    parities: Option<&[i8]>,
    sector: Option<&SectorKey>,
    rep: usize,
) -> Result<Vec<SplitLevel>> {
    let sectors = sector_states(comps, parities, rep)?;
    let mut levels = Vec::new();
    let mut any = false;
    for (key, states) in sectors {
        if let Some(want) = sector {
            if want.0 != key.0 || (want.1.is_some() && want.1 != key.1) {
                continue;
            }
        }
        any = true;
        if states.len() > MAX_DENSE_BLOCK {
            return Err(Error::BlockTooLarge(states.len()));
        }
        let mut h = sector_interaction(table, &states)?;
        for (i, s) in states.iter().enumerate() {
            h[(i, i)] += comps[s.comp].energy;
        }
        let (vals, vecs) = sym_eigen(&h);
        for (k, e) in vals.iter().enumerate() {
            let col: Vec<f64> = vecs.column(k).iter().copied().collect();
            let dom = col
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .map(|(i, _)| i)
                .unwrap_or(0);
            let comp = &comps[states[dom].comp];
            levels.push(SplitLevel {
                base_energy: comp.energy,
                shift: e - comp.energy,
                degeneracy: irrep_dim(&key.0),
                irrep: key.0.clone(),
                parity: key.1,
                eigvec: col,
                provenance: Provenance::Ed,
                labels: comp.text(),
            });
        }
    }
    if !any {
        return Err(Error::EmptySector(match sector {
            Some((mu, p)) => format!("{mu:?} parity {p:?}"),
            None => "no basis states below cutoff".into(),
        }));
    }
    sort_levels(&mut levels);
    Ok(levels)
}

pub fn exact_diagonalize(sol: &OneBodySolution, n: usize, cfg: &EDConfig) -> Result<Vec<SplitLevel>> {
    if !(2..=3).contains(&n) {
        return Err(Error::UnsupportedN(n));
    }
    let comps = enumerate_compositions(&sol.energies, n, cfg.e_max)?;
    let mut states: Vec<usize> = comps.iter().flat_map(|c| c.labels.iter().copied()).collect();
    states.sort_unstable();
    states.dedup();
    let table = build_table(sol, &cfg.interaction, &states)?;
    diagonalize_sectors(&comps, &table, sol.parities.as_deref(), cfg.sector.as_ref(), 0)
}

/// `E(X) = E∞ + a X^{-1/2} + b X^{-1} + c X^{-3/2}` through the given points;
/// returns `E∞`. Contact-interaction ED converges like the inverse square
/// root of the cutoff.
pub fn extrapolate_cutoff(points: &[(f64, f64)]) -> Result<f64> {
    let k = points.len();
    if k < 2 {
        return Err(Error::Invalid("need at least two cutoffs".into()));
    }
    let a = DMatrix::from_fn(k, k, |i, j| points[i].0.powf(-0.5 * j as f64));
    let y = nalgebra::DVector::from_iterator(k, points.iter().map(|p| p.1));
    let sol = a.lu().solve(&y).ok_or_else(|| Error::NonconvergedEigensolver("singular extrapolation".into()))?;
    Ok(sol[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::onebody::{solve_one_body, Grid, TrapSpec};
    use crate::spectra::label_parities;
    use crate::twobody::{contact_elements, TableKind};
    use rand::{Rng, SeedableRng};

    fn random_general(seed: u64, states: &[usize]) -> TwoBodyTable {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let vals: BTreeMap<[usize; 4], f64> = crate::twobody::all_keys(TableKind::General, states)
            .into_iter()
            .map(|k| (k, rng.gen_range(-1.0..1.0)))
            .collect();
        TwoBodyTable::from_fn(TableKind::General, states, |k| vals[&k])
    }

    fn comp(labels: &[usize]) -> Composition {
        Composition::with_energy(labels.to_vec(), labels.iter().map(|&l| l as f64 + 0.5).sum())
    }

    #[test]
    fn two_particle_contact_shifts() {
        let t = TwoBodyTable::from_fn(TableKind::Contact, &[0, 1], |k| 1.0 + k.iter().sum::<usize>() as f64);
        let lv = weak_split_2(&comp(&[0, 1]), &t).unwrap();
        assert_eq!(lv[0].shift, 2.0 * t.get(0, 0, 1, 1).unwrap());
        assert_eq!(lv[1].shift, 0.0);
        let lv = weak_split_2(&comp(&[1, 1]), &t).unwrap();
        assert_eq!(lv.len(), 1);
        assert_eq!(lv[0].shift, t.get(1, 1, 1, 1).unwrap());
        let zero = t.scaled(0.0);
        assert!(weak_split_2(&comp(&[0, 1]), &zero).unwrap().iter().all(|l| l.shift == 0.0));
        assert!(weak_split_2(&comp(&[0, 1, 2]), &t).is_err());
    }

    #[test]
    fn harmonic_pair_shift() {
        let sol = solve_one_body(&TrapSpec::harmonic(), &Grid::new(-10.0, 10.0, 2001), 3).unwrap();
        let t = contact_elements(&sol, &[0, 1], 1.0).unwrap();
        let lv = weak_split_2(&comp(&[0, 1]), &t).unwrap();
        assert!((lv[0].shift - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-8);
    }

    #[test]
    fn printed_blocks() {
        let t = random_general(3, &[0, 1, 2]);
        let b = symmetrized_basis(&[1, 1, 1]).unwrap();
        let m = v3_block(&comp(&[1, 1, 1]), &t, &b).unwrap();
        assert!((m[(0, 0)] - 3.0 * t.get(1, 1, 1, 1).unwrap()).abs() < 1e-14);

        let (a, bb) = (0, 2);
        let b = symmetrized_basis(&[a, a, bb]).unwrap();
        let m = v3_block(&comp(&[a, a, bb]), &t, &b).unwrap();
        let (v, d, x) = (t.get(a, a, a, a).unwrap(), t.direct(a, bb).unwrap(), t.exchange(a, bb).unwrap());
        assert!((m[(0, 0)] - (v + 2.0 * d + 2.0 * x)).abs() < 1e-13);
        assert!((m[(1, 1)] - (v + 2.0 * d - x)).abs() < 1e-13);
        assert!((m[(2, 2)] - (v + 2.0 * d - x)).abs() < 1e-13);
        assert!(m[(0, 1)].abs() < 1e-13 && m[(1, 2)].abs() < 1e-13);
    }

    #[test]
    fn abg_block_structure() {
        let t = random_general(5, &[0, 1, 2]);
        let b = symmetrized_basis(&[0, 1, 2]).unwrap();
        let m = v3_block(&comp(&[0, 1, 2]), &t, &b).unwrap();
        let r = reduced_21_block(&t, 0, 1, 2).unwrap();
        // rows: [3], (αβ,γ)·(12,3), (αβ,γ)·(13,2), (αγ,β)·(12,3), (αγ,β)·(13,2), [1³]
        for (y, (i, j)) in [(1, 3), (2, 4)].iter().enumerate() {
            assert!((m[(*i, *i)] - r[0][0]).abs() < 1e-13, "{y}");
            assert!((m[(*j, *j)] - r[1][1]).abs() < 1e-13);
            assert!((m[(*i, *j)] - r[0][1]).abs() < 1e-13);
        }
        // different Young tableaux and different irreps do not mix
        for (i, j) in [(1, 2), (1, 4), (2, 3), (3, 4), (0, 1), (0, 5), (1, 5)] {
            assert!(m[(i, j)].abs() < 1e-13, "({i},{j}) = {}", m[(i, j)]);
        }
        let (xbg, xag) = (t.exchange(1, 2).unwrap(), t.exchange(0, 2).unwrap());
        assert!((r[0][1] + 0.5 * 3f64.sqrt() * (xag - xbg)).abs() < 1e-14);
    }

    #[test]
    fn closed_forms_match_dense_and_trace() {
        for seed in 0..20 {
            let t = random_general(seed, &[0, 1, 2, 3]);
            for labels in [[0, 1, 2], [0, 2, 3], [1, 1, 3], [0, 3, 3], [2, 2, 2]] {
                let c = comp(&labels);
                let b = symmetrized_basis(&labels).unwrap();
                let m = v3_block(&c, &t, &b).unwrap();
                let dense = crate::linalg::sym_eigenvalues(&m);
                let mut closed: Vec<f64> = weak_split_3(&c, &t)
                    .unwrap()
                    .iter()
                    .flat_map(|l| std::iter::repeat(l.shift).take(l.degeneracy))
                    .collect();
                closed.sort_by(f64::total_cmp);
                for (x, y) in closed.iter().zip(&dense) {
                    assert!((x - y).abs() < 1e-10);
                }
                let tr: f64 = weak_split_3(&c, &t).unwrap().iter().map(|l| l.shift * l.degeneracy as f64).sum();
                assert!((tr - m.trace()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn equal_exchange_terms_close_the_radical() {
        // with X_αβ = X_βγ = X_αγ = w the quadratic form vanishes: both [21]
        // copies sit at Σ direct, while [3] and [1³] move by ±3w
        let w = 0.37;
        let t = TwoBodyTable::from_fn(TableKind::General, &[0, 1, 2], |k| {
            if k[0] != k[1] && k[2] != k[3] && k[0] == k[2] && k[1] == k[3] { w } else { 0.11 * (k[0] + k[1] + 2 * k[3]) as f64 }
        });
        let sd = t.direct(0, 1).unwrap() + t.direct(1, 2).unwrap() + t.direct(0, 2).unwrap();
        let lv = weak_split_3(&comp(&[0, 1, 2]), &t).unwrap();
        assert!((lv[0].shift - (sd + 3.0 * w)).abs() < 1e-12);
        assert!((lv[1].shift - sd).abs() < 1e-12);
        assert!((lv[2].shift - sd).abs() < 1e-12);
        assert!((lv[3].shift - (sd - 3.0 * w)).abs() < 1e-12);
    }

    #[test]
    fn repulsive_contact_ordering() {
        let sol = solve_one_body(&TrapSpec::power_law(0.5), &Grid::new(-40.0, 40.0, 4001), 6).unwrap();
        let t = contact_elements(&sol, &[0, 1, 2, 3, 4, 5], 1.0).unwrap();
        let c = Composition::new(&[0, 2, 5], &sol.energies).unwrap();
        let lv = weak_split_3(&c, &t).unwrap();
        assert!(lv[0].shift >= lv[1].shift && lv[1].shift >= lv[2].shift && lv[2].shift >= lv[3].shift - 1e-12);
        assert!(lv[3].shift.abs() < 1e-12);
    }

    #[test]
    fn weak_levels_match_closed_forms() {
        let t = random_general(11, &[0, 1, 2, 3]);
        for labels in [[0, 1, 2], [1, 1, 3], [0, 0, 0]] {
            let c = comp(&labels);
            let mut a: Vec<f64> = weak_split_3(&c, &t).unwrap().iter().map(|l| l.shift).collect();
            let mut b: Vec<f64> = weak_levels(&[c], &t, None).unwrap().iter().map(|l| l.shift).collect();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn young_representative_does_not_matter() {
        let t = random_general(2, &[0, 1, 2, 3, 4]);
        let sigma: Vec<f64> = (0..8).map(|k| k as f64 + 0.5).collect();
        let comps = enumerate_compositions(&sigma, 3, 5.6).unwrap();
        let p = label_parities(&(0..8).collect::<Vec<_>>());
        let a = diagonalize_sectors(&comps, &t, Some(&p), None, 0).unwrap();
        let b = diagonalize_sectors(&comps, &t, Some(&p), None, 1).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x.energy() - y.energy()).abs() < 1e-10);
        }
    }

    #[test]
    fn sector_counts_of_small_truncation() {
        let sigma: Vec<f64> = (0..10).map(|k| k as f64 + 0.5).collect();
        let comps = enumerate_compositions(&sigma, 3, 6.5).unwrap();
        assert_eq!(comps.len(), 16);
        assert_eq!(comps.iter().map(|c| c.degeneracy).sum::<usize>(), 56);
        let dims = sector_dims(&comps, None).unwrap();
        assert_eq!(dims[&(vec![3], None)], 16);
        assert_eq!(dims[&(vec![2, 1], None)], 18);
        assert_eq!(dims[&(vec![1, 1, 1], None)], 4);
        let p = label_parities(&(0..10).collect::<Vec<_>>());
        let dims = sector_dims(&comps, Some(&p)).unwrap();
        let got: Vec<usize> = [(vec![3], 1), (vec![3], -1), (vec![2, 1], 1), (vec![2, 1], -1), (vec![1, 1, 1], 1), (vec![1, 1, 1], -1)]
            .into_iter()
            .map(|(s, q)| dims[&(s, Some(q))])
            .collect();
        assert_eq!(got, [7, 9, 7, 11, 1, 3]);
    }

    #[test]
    fn empty_sector_is_an_error() {
        let t = random_general(1, &[0, 1]);
        let comps = vec![comp(&[0, 0, 0]), comp(&[0, 0, 1])];
        let r = diagonalize_sectors(&comps, &t, None, Some(&(vec![1, 1, 1], None)), 0);
        assert!(matches!(r, Err(Error::EmptySector(_))));
    }

    #[test]
    fn extrapolation_recovers_model() {
        let f = |x: f64| 1.25 + 0.3 / x.sqrt() - 0.2 / x + 0.05 / x.powf(1.5);
        let pts: Vec<(f64, f64)> = [24.0, 32.0, 48.0, 64.0].iter().map(|&x| (x, f(x))).collect();
        assert!((extrapolate_cutoff(&pts).unwrap() - 1.25).abs() < 1e-10);
    }
}

//! Config-driven command-line driver.
//!
//! A run is one JSON document (see [`RunConfig`]) plus a subcommand. One-body
//! solutions and two-body tables are cached under content hashes; outputs are
//! CSV or JSON level tables written to `<out>/<mode>.<ext>`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::onebody::{analytic_energy, solve_one_body_with, Grid, OneBodySolution, SolverOptions, TrapKind, TrapSpec};
use crate::permsym::{conjugate, irrep_dim, semistandard_count, count_symmetrized_states, Statistics};
use crate::perturbation::{diagonalize_sectors, weak_levels, SectorKey, SplitLevel};
use crate::spectra::{
    classify_level, enumerate_compositions, irrep_text, label_parities, partial_order_edges, Composition, TrapSymmetry,
};
use crate::twobody::{build_table, InteractionSpec, TwoBodyTable};
use crate::unitary::{near_unitary_split, tunneling_params, unitary_spectrum};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Solve,
    /// Alias of `classify`.
    Spectrum,
    Classify,
    Weak,
    Ed,
    Unitary,
    NearUnitary,
}

impl Mode {
    fn stem(self) -> &'static str {
        match self {
            Mode::Solve => "solve",
            Mode::Spectrum | Mode::Classify => "classify",
            Mode::Weak => "weak",
            Mode::Ed => "ed",
            Mode::Unitary => "unitary",
            Mode::NearUnitary => "near_unitary",
        }
    }
}

/// Second trap for two-panel weak-coupling diagrams.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Panel {
    pub trap: TrapSpec,
    pub grid: Grid,
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub trap: TrapSpec,
    pub grid: Grid,
    #[serde(default = "one")]
    pub particles: usize,
    #[serde(default)]
    pub statistics: Option<Statistics>,
    #[serde(default = "one")]
    pub spin_components: usize,
    #[serde(default)]
    pub interaction: Option<InteractionSpec>,
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub e_max: Option<f64>,
    #[serde(default)]
    pub n_states: Option<usize>,
    #[serde(default)]
    pub solver: SolverOptions,
    /// ED only: restrict to one `([μ], parity)` sector.
    #[serde(default)]
    pub sector: Option<SectorKey>,
    /// Keep only the lowest this-many compositions (classify, weak, unitary)
    /// or levels (ed).
    #[serde(default)]
    pub max_levels: Option<usize>,
    /// Weak mode: contact coupling `g = ΔE / divisor`, with ΔE the gap between
    /// the lowest composition of distinct labels and the ground composition.
    #[serde(default)]
    pub g_gap_divisor: Option<f64>,
    /// Weak mode: second panel.
    #[serde(default)]
    pub compare: Option<Panel>,
    /// Near-unitary mode: a single composition instead of all below `e_max`.
    #[serde(default)]
    pub labels: Option<Vec<usize>>,
    /// Use closed-form one-body energies where the trap has them.
    #[serde(default = "yes")]
    pub closed_form_energies: bool,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl RunConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| config_err(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics.unwrap_or(Statistics::Distinguishable)
    }

    fn e_max(&self) -> Result<f64> {
        self.e_max.ok_or_else(|| config_err("e_max is required for this mode"))
    }

    pub fn validate(&self, mode: Mode) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(config_err(format!("unsupported config version {}", self.version)));
        }
        if let Some(m) = self.mode {
            if m.stem() != mode.stem() {
                return Err(config_err(format!("config is for mode {:?}, not {:?}", m, mode)));
            }
        }
        self.trap.validate()?;
        self.grid.validate()?;
        if !(1..=3).contains(&self.particles) {
            return Err(config_err(format!("particles must be 1, 2 or 3, got {}", self.particles)));
        }
        if self.spin_components == 0 {
            return Err(config_err("spin_components must be at least 1"));
        }
        if let Some(i) = &self.interaction {
            i.validate()?;
        }
        if let Some(p) = &self.compare {
            p.trap.validate()?;
            p.grid.validate()?;
        }
        let needs_pairs = matches!(mode, Mode::Weak | Mode::Ed | Mode::Unitary | Mode::NearUnitary);
        if needs_pairs && self.particles < 2 {
            return Err(config_err("this mode needs at least two particles"));
        }
        match mode {
            Mode::Solve => {
                if self.n_states.is_none() && self.e_max.is_none() {
                    return Err(config_err("solve needs n_states or e_max"));
                }
            }
            Mode::Spectrum | Mode::Classify | Mode::Unitary => {
                self.e_max()?;
            }
            Mode::Weak => {
                self.e_max()?;
                match (&self.interaction, self.g_gap_divisor) {
                    (None, None) => return Err(config_err("weak mode needs interaction or g_gap_divisor")),
                    (Some(_), Some(_)) => return Err(config_err("give either interaction or g_gap_divisor, not both")),
                    (_, Some(d)) if !(d > 0.0) => return Err(config_err("g_gap_divisor must be positive")),
                    _ => {}
                }
            }
            Mode::Ed => {
                self.e_max()?;
                if self.interaction.is_none() {
                    return Err(config_err("ed mode needs an interaction"));
                }
            }
            Mode::NearUnitary => {
                match &self.labels {
                    Some(l) if l.len() != self.particles => {
                        return Err(config_err("labels must list one state per particle"))
                    }
                    None => {
                        self.e_max()?;
                    }
                    _ => {}
                }
                if !matches!(self.interaction, None | Some(InteractionSpec::Contact { .. })) {
                    return Err(config_err("near-unitary mode is defined for the contact interaction only"));
                }
            }
        }
        Ok(())
    }
}

/// Content-addressed JSON cache; `None` disables it.
#[derive(Clone, Debug)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Cache { dir }
    }

    pub fn disabled() -> Self {
        Cache { dir: None }
    }

    pub fn key(kind: &str, payload: &impl Serialize) -> String {
        let mut h = Sha256::new();
        h.update(kind.as_bytes());
        h.update([0u8]);
        h.update(serde_json::to_vec(payload).expect("serialisable key"));
        hex::encode(h.finalize())
    }

    fn path(&self, kind: &str, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{kind}-{key}.json")))
    }

    pub fn load<T: DeserializeOwned>(&self, kind: &str, key: &str) -> Option<T> {
        let text = fs::read_to_string(self.path(kind, key)?).ok()?;
        serde_json::from_str(&text).ok()
    }

    /// Write-temp-then-rename so concurrent readers never see partial files.
    pub fn store<T: Serialize>(&self, kind: &str, key: &str, value: &T) -> Result<()> {
        let (Some(dir), Some(path)) = (&self.dir, self.path(kind, key)) else { return Ok(()) };
        fs::create_dir_all(dir)?;
        let tmp = dir.join(format!(".{kind}-{key}.{}.tmp", std::process::id()));
        fs::write(&tmp, serde_json::to_vec(value).map_err(|e| Error::Invalid(e.to_string()))?)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn get_or<T: Serialize + DeserializeOwned>(
        &self,
        kind: &str,
        key: &str,
        compute: impl FnOnce() -> Result<T>,
    ) -> Result<T> {
        if let Some(v) = self.load(kind, key) {
            return Ok(v);
        }
        let v = compute()?;
        self.store(kind, key, &v)?;
        Ok(v)
    }
}

/// One-body data a run works with: the grid solution (if any was needed),
/// the spectrum σ1 and parities indexed by state.
struct OneBody {
    key: String,
    solution: Option<OneBodySolution>,
    sigma: Vec<f64>,
    parities: Option<Vec<i8>>,
}

fn symmetry_of(trap: &TrapSpec) -> TrapSymmetry {
    match trap.potential {
        TrapKind::Harmonic => TrapSymmetry::Harmonic,
        _ if trap.is_symmetric() => TrapSymmetry::Symmetric,
        _ => TrapSymmetry::Asymmetric,
    }
}

fn has_closed_form(trap: &TrapSpec) -> bool {
    analytic_energy(&trap.potential, 0).is_ok()
}

fn covers(sigma: &[f64], n: usize, e_max: f64) -> bool {
    let cut = e_max + 1e-9 * (1.0 + e_max.abs());
    !sigma.is_empty() && sigma[sigma.len() - 1] + (n - 1) as f64 * sigma[0] > cut
}

struct Solver<'a> {
    cfg: &'a RunConfig,
    cache: &'a Cache,
}

impl Solver<'_> {
    fn solve(&self, trap: &TrapSpec, grid: &Grid, n_states: usize) -> Result<(String, OneBodySolution)> {
        let key = Cache::key("onebody", &(trap, grid, n_states, &self.cfg.solver));
        let sol = self
            .cache
            .get_or("onebody", &key, || solve_one_body_with(trap, grid, n_states, &self.cfg.solver))?;
        Ok((key, sol))
    }

    fn finish(&self, trap: &TrapSpec, key: String, mut sol: OneBodySolution) -> Result<OneBody> {
        if self.cfg.closed_form_energies && has_closed_form(trap) {
            sol.energies = (0..sol.n_states()).map(|k| analytic_energy(&trap.potential, k)).collect::<Result<_>>()?;
            sol.parities = Some(label_parities(&(0..sol.n_states()).collect::<Vec<_>>()));
        }
        Ok(OneBody { key, sigma: sol.energies.clone(), parities: sol.parities.clone(), solution: Some(sol) })
    }

    /// Grid solution with enough states for `particles` below `e_max`.
    fn covering(&self, trap: &TrapSpec, grid: &Grid, e_max: f64) -> Result<OneBody> {
        let n = self.cfg.particles;
        if let Some(k) = self.cfg.n_states {
            let (key, sol) = self.solve(trap, grid, k)?;
            return self.finish(trap, key, sol);
        }
        let cap = grid.n_points / 4;
        let mut k = 8.min(cap);
        loop {
            let (key, sol) = self.solve(trap, grid, k)?;
            let ob = self.finish(trap, key, sol)?;
            if covers(&ob.sigma, n, e_max) {
                return Ok(ob);
            }
            if k == cap {
                return Err(Error::GridTooSmall(format!("{k} states do not reach e_max = {e_max}")));
            }
            k = (2 * k).min(cap);
        }
    }

    /// Spectrum only; closed forms skip the grid entirely.
    fn spectrum(&self, e_max: f64) -> Result<OneBody> {
        let trap = &self.cfg.trap;
        if self.cfg.closed_form_energies && has_closed_form(trap) {
            let n = self.cfg.particles;
            let mut sigma = Vec::new();
            while !covers(&sigma, n, e_max) {
                sigma.push(analytic_energy(&trap.potential, sigma.len())?);
            }
            let parities = label_parities(&(0..sigma.len()).collect::<Vec<_>>());
            return Ok(OneBody { key: String::new(), solution: None, sigma, parities: Some(parities) });
        }
        self.covering(trap, &self.cfg.grid, e_max)
    }
}

fn population(irrep: &[usize], stats: Statistics, j: usize) -> usize {
    let n: usize = irrep.iter().sum();
    match stats {
        Statistics::Distinguishable => irrep_dim(irrep) * j.pow(n as u32),
        Statistics::Boson => semistandard_count(irrep, j),
        Statistics::Fermion => semistandard_count(&conjugate(irrep), j),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagramRow {
    pub base_energy: f64,
    pub shift: f64,
    pub total_energy: f64,
    pub degeneracy: usize,
    pub irrep: String,
    pub parity: Option<i8>,
    pub provenance: String,
    pub population: usize,
    pub labels: String,
    pub panel: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearUnitaryRow {
    pub base_energy: f64,
    pub shift: f64,
    pub total_energy: f64,
    pub degeneracy: usize,
    pub irrep: String,
    pub parity: Option<i8>,
    pub provenance: String,
    pub population: usize,
    pub labels: String,
    pub panel: String,
    /// `g·t` and `g·u`.
    pub g_t: f64,
    pub g_u: f64,
    pub shift_over_t: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyRow {
    pub labels: String,
    pub energy: f64,
    pub degeneracy: usize,
    pub k0_class: String,
    pub c0_irreps: String,
    pub k_irreps: String,
    pub population: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRow {
    pub lower: String,
    pub upper: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveRow {
    pub n: usize,
    pub energy: f64,
    pub parity: Option<i8>,
}

fn level_row(l: &SplitLevel, stats: Statistics, j: usize, panel: &str) -> DiagramRow {
    DiagramRow {
        base_energy: l.base_energy,
        shift: l.shift,
        total_energy: l.energy(),
        degeneracy: l.degeneracy,
        irrep: irrep_text(&l.irrep, l.parity),
        parity: l.parity,
        provenance: l.provenance.as_str().into(),
        population: population(&l.irrep, stats, j),
        labels: l.labels.clone(),
        panel: panel.into(),
    }
}

fn composition_row(c: &Composition, provenance: &str, stats: Statistics, j: usize, panel: &str) -> Result<DiagramRow> {
    Ok(DiagramRow {
        base_energy: c.energy,
        shift: 0.0,
        total_energy: c.energy,
        degeneracy: c.degeneracy,
        irrep: String::new(),
        parity: None,
        provenance: provenance.into(),
        population: count_symmetrized_states(&c.labels, stats, j)?,
        labels: c.text(),
        panel: panel.into(),
    })
}

fn edges_of(comps: &[Composition]) -> Vec<EdgeRow> {
    partial_order_edges(comps)
        .into_iter()
        .map(|(lo, hi)| EdgeRow { lower: comps[lo].text(), upper: comps[hi].text() })
        .collect()
}

fn truncate<T>(mut v: Vec<T>, k: Option<usize>) -> Vec<T> {
    if let Some(k) = k {
        v.truncate(k);
    }
    v
}

/// Everything one run produces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Output {
    Solve { levels: Vec<SolveRow> },
    Classify { levels: Vec<ClassifyRow>, edges: Vec<EdgeRow> },
    Diagram { levels: Vec<DiagramRow>, edges: Option<Vec<EdgeRow>> },
    NearUnitary { levels: Vec<NearUnitaryRow> },
}

fn build_table_cached(cache: &Cache, ob: &OneBody, spec: &InteractionSpec, states: &[usize]) -> Result<TwoBodyTable> {
    let sol = ob.solution.as_ref().expect("grid solution present");
    let key = Cache::key("table", &(&ob.key, spec, states));
    if let Some(text) = cache.path("table", &key).and_then(|p| fs::read_to_string(p).ok()) {
        if let Ok(t) = TwoBodyTable::from_json(&text) {
            return Ok(t);
        }
    }
    let t = build_table(sol, spec, states)?;
    if let Some(dir) = &cache.dir {
        fs::create_dir_all(dir)?;
        let tmp = dir.join(format!(".table-{key}.{}.tmp", std::process::id()));
        fs::write(&tmp, t.to_json())?;
        fs::rename(&tmp, cache.path("table", &key).expect("cache enabled"))?;
    }
    Ok(t)
}

fn used_states(comps: &[Composition]) -> Vec<usize> {
    let mut s: Vec<usize> = comps.iter().flat_map(|c| c.labels.iter().copied()).collect();
    s.sort_unstable();
    s.dedup();
    s
}

fn weak_panel(cfg: &RunConfig, cache: &Cache, trap: &TrapSpec, grid: &Grid, panel: &str) -> Result<Vec<DiagramRow>> {
    let e_max = cfg.e_max()?;
    let ob = Solver { cfg, cache }.covering(trap, grid, e_max)?;
    let comps = truncate(enumerate_compositions(&ob.sigma, cfg.particles, e_max)?, cfg.max_levels);
    let spec = match (&cfg.interaction, cfg.g_gap_divisor) {
        (Some(i), _) => i.clone(),
        (None, Some(d)) => {
            let n = cfg.particles;
            let s = &ob.sigma;
            if s.len() < n {
                return Err(Error::GridTooSmall("not enough states for the gap".into()));
            }
            let gap: f64 = s[..n].iter().sum::<f64>() - n as f64 * s[0];
            InteractionSpec::Contact { g: gap / d }
        }
        (None, None) => return Err(config_err("weak mode needs interaction or g_gap_divisor")),
    };
    let table = build_table_cached(cache, &ob, &spec, &used_states(&comps))?;
    let parities = match symmetry_of(trap) {
        TrapSymmetry::Asymmetric => None,
        _ => ob.parities.clone(),
    };
    let (stats, j) = (cfg.statistics(), cfg.spin_components);
    let mut rows = Vec::new();
    for c in &comps {
        rows.push(composition_row(c, "noninteracting", stats, j, panel)?);
    }
    for l in weak_levels(&comps, &table, parities.as_deref())? {
        rows.push(level_row(&l, stats, j, panel));
    }
    // stable: each composition row stays ahead of its split levels
    rows.sort_by(|a, b| a.base_energy.total_cmp(&b.base_energy));
    Ok(rows)
}

pub fn run(cfg: &RunConfig, mode: Mode, cache: &Cache) -> Result<Output> {
    cfg.validate(mode)?;
    let solver = Solver { cfg, cache };
    let (stats, j) = (cfg.statistics(), cfg.spin_components);
    match mode {
        Mode::Solve => {
            let ob = match cfg.n_states {
                Some(k) => {
                    let (key, sol) = solver.solve(&cfg.trap, &cfg.grid, k)?;
                    solver.finish(&cfg.trap, key, sol)?
                }
                None => solver.covering(&cfg.trap, &cfg.grid, cfg.e_max()?)?,
            };
            let levels = ob
                .sigma
                .iter()
                .enumerate()
                .map(|(n, &e)| SolveRow { n, energy: e, parity: ob.parities.as_ref().map(|p| p[n]) })
                .collect();
            Ok(Output::Solve { levels })
        }
        Mode::Spectrum | Mode::Classify => {
            let ob = solver.spectrum(cfg.e_max()?)?;
            let comps = truncate(enumerate_compositions(&ob.sigma, cfg.particles, cfg.e_max()?)?, cfg.max_levels);
            let symmetry = symmetry_of(&cfg.trap);
            let mut levels = Vec::new();
            for c in &comps {
                let p: Option<Vec<i8>> = ob.parities.as_ref().map(|p| c.labels.iter().map(|&l| p[l]).collect());
                let class = classify_level(c, p.as_deref(), symmetry)?;
                levels.push(ClassifyRow {
                    labels: c.text(),
                    energy: c.energy,
                    degeneracy: c.degeneracy,
                    k0_class: class.k0_class.clone(),
                    c0_irreps: class.c0_text(),
                    k_irreps: class.k_text(),
                    population: count_symmetrized_states(&c.labels, stats, j)?,
                });
            }
            Ok(Output::Classify { levels, edges: edges_of(&comps) })
        }
        Mode::Weak => {
            let mut levels = weak_panel(cfg, cache, &cfg.trap, &cfg.grid, "a")?;
            if let Some(p) = &cfg.compare {
                levels.extend(weak_panel(cfg, cache, &p.trap, &p.grid, "b")?);
            }
            Ok(Output::Diagram { levels, edges: None })
        }
        Mode::Ed => {
            let e_max = cfg.e_max()?;
            let ob = solver.covering(&cfg.trap, &cfg.grid, e_max)?;
            let comps = enumerate_compositions(&ob.sigma, cfg.particles, e_max)?;
            let spec = cfg.interaction.clone().expect("validated");
            let table = build_table_cached(cache, &ob, &spec, &used_states(&comps))?;
            let parities = match symmetry_of(&cfg.trap) {
                TrapSymmetry::Asymmetric => None,
                _ => ob.parities.clone(),
            };
            let mut levels = diagonalize_sectors(&comps, &table, parities.as_deref(), cfg.sector.as_ref(), 0)?;
            levels.sort_by(|a, b| a.energy().total_cmp(&b.energy()));
            let levels = truncate(levels, cfg.max_levels);
            Ok(Output::Diagram { levels: levels.iter().map(|l| level_row(l, stats, j, "a")).collect(), edges: None })
        }
        Mode::Unitary => {
            let e_max = cfg.e_max()?;
            let ob = solver.spectrum(e_max)?;
            let comps = truncate(unitary_spectrum(&ob.sigma, cfg.particles, e_max)?, cfg.max_levels);
            let levels = comps.iter().map(|c| composition_row(c, "unitary", stats, j, "a")).collect::<Result<_>>()?;
            Ok(Output::Diagram { levels, edges: Some(edges_of(&comps)) })
        }
        Mode::NearUnitary => {
            let n = cfg.particles;
            let ob = match &cfg.labels {
                Some(l) => {
                    let top = l.iter().copied().max().unwrap_or(0);
                    let k = cfg.n_states.unwrap_or(top + 1).max(top + 1);
                    let (key, sol) = solver.solve(&cfg.trap, &cfg.grid, k)?;
                    solver.finish(&cfg.trap, key, sol)?
                }
                None => solver.covering(&cfg.trap, &cfg.grid, cfg.e_max()?)?,
            };
            let comps: Vec<Vec<usize>> = match &cfg.labels {
                Some(l) => vec![l.clone()],
                None => unitary_spectrum(&ob.sigma, n, cfg.e_max()?)?.into_iter().map(|c| c.labels).collect(),
            };
            let g = match cfg.interaction {
                Some(InteractionSpec::Contact { g }) => g,
                _ => 1.0,
            };
            let symmetric = symmetry_of(&cfg.trap) != TrapSymmetry::Asymmetric;
            let sol = ob.solution.as_ref().expect("grid solution present");
            let mut levels = Vec::new();
            for labels in comps {
                let mut params = tunneling_params(sol, &labels)?;
                params.energy = params.labels.iter().map(|&l| ob.sigma[l]).sum();
                let parity = match (&ob.parities, symmetric) {
                    (Some(p), true) => Some(params.labels.iter().map(|&l| p[l]).product()),
                    _ => None,
                };
                for l in near_unitary_split(&params, g, parity)? {
                    let base = level_row(&l, stats, j, "a");
                    levels.push(NearUnitaryRow {
                        base_energy: base.base_energy,
                        shift: base.shift,
                        total_energy: base.total_energy,
                        degeneracy: base.degeneracy,
                        irrep: base.irrep,
                        parity: base.parity,
                        provenance: base.provenance,
                        population: base.population,
                        labels: base.labels,
                        panel: base.panel,
                        g_t: params.t,
                        g_u: params.u,
                        shift_over_t: l.shift * g / params.t,
                    });
                }
            }
            Ok(Output::NearUnitary { levels })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(header).map_err(|e| Error::Invalid(e.to_string()))?;
    }
    for r in rows {
        w.serialize(r).map_err(|e| Error::Invalid(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
    atomic_write(path, &bytes)
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

const EDGE_HEADER: &[&str] = &["lower", "upper"];

/// Writes the output files and returns their paths.
pub fn emit(output: &Output, mode: Mode, out: &Path, format: Format) -> Result<Vec<PathBuf>> {
    let stem = mode.stem();
    if format == Format::Json {
        let path = out.join(format!("{stem}.json"));
        let mut text = serde_json::to_string_pretty(output).map_err(|e| Error::Invalid(e.to_string()))?;
        text.push('\n');
        atomic_write(&path, text.as_bytes())?;
        return Ok(vec![path]);
    }
    let path = out.join(format!("{stem}.csv"));
    let edges_path = out.join(format!("{stem}_edges.csv"));
    match output {
        Output::Solve { levels } => write_csv(&path, levels, &["n", "energy", "parity"])?,
        Output::Classify { levels, edges } => {
            write_csv(&path, levels, &["labels", "energy", "degeneracy", "k0_class", "c0_irreps", "k_irreps", "population"])?;
            write_csv(&edges_path, edges, EDGE_HEADER)?;
            return Ok(vec![path, edges_path]);
        }
        Output::Diagram { levels, edges } => {
            write_csv(&path, levels, &[
                "base_energy", "shift", "total_energy", "degeneracy", "irrep", "parity", "provenance", "population",
                "labels", "panel",
            ])?;
            if let Some(e) = edges {
                write_csv(&edges_path, e, EDGE_HEADER)?;
                return Ok(vec![path, edges_path]);
            }
        }
        Output::NearUnitary { levels } => write_csv(&path, levels, &[
            "base_energy", "shift", "total_energy", "degeneracy", "irrep", "parity", "provenance", "population", "labels",
            "panel", "g_t", "g_u", "shift_over_t",
        ])?,
    }
    Ok(vec![path])
}

#[derive(Parser, Debug)]
#[command(name = "fewbody", version, about = "Spectra of one to three identical particles in 1D traps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Common {
    /// Run configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Cache directory (default: $XDG_CACHE_HOME/fewbody or ~/.cache/fewbody).
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long, conflicts_with = "cache")]
    pub no_cache: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// One-body energies and parities.
    Solve(Common),
    /// Non-interacting compositions with their symmetry classes and partial order.
    Classify(Common),
    /// First-order splitting under a weak interaction.
    Weak(Common),
    /// Exact diagonalisation in a truncated symmetrized basis.
    Ed(Common),
    /// Levels of the unitary (g → ∞) contact limit.
    Unitary(Common),
    /// First-order 1/g splitting of unitary levels.
    NearUnitary(Common),
}

impl Command {
    fn parts(&self) -> (Mode, &Common) {
        match self {
            Command::Solve(c) => (Mode::Solve, c),
            Command::Classify(c) => (Mode::Classify, c),
            Command::Weak(c) => (Mode::Weak, c),
            Command::Ed(c) => (Mode::Ed, c),
            Command::Unitary(c) => (Mode::Unitary, c),
            Command::NearUnitary(c) => (Mode::NearUnitary, c),
        }
    }
}

fn default_cache_dir() -> Option<PathBuf> {
    std::env::var_os("XDG_CACHE_HOME")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))
        .map(|d| d.join("fewbody"))
}

pub fn execute(cli: &Cli) -> Result<Vec<PathBuf>> {
    let (mode, common) = cli.command.parts();
    let cfg = RunConfig::load(&common.config)?;
    let cache = if common.no_cache {
        Cache::disabled()
    } else {
        Cache::new(common.cache.clone().or_else(default_cache_dir))
    };
    let output = run(&cfg, mode, &cache)?;
    emit(&output, mode, &common.out, common.format)
}

/// Process entry point; returns the exit status.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("fewbody: {e}");
            if e.is_config() {
                2
            } else {
                3
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> RunConfig {
        RunConfig::from_json(
            r#"{"version": 1, "trap": {"potential": {"type": "harmonic"}},
                "grid": {"q_min": -10, "q_max": 10, "n_points": 801},
                "particles": 3, "e_max": 5.5}"#,
        )
        .unwrap()
    }

    #[test]
    fn unknown_fields_rejected() {
        let err = RunConfig::from_json(r#"{"version": 1, "trap": {"potential": {"type": "harmonic"}}, "grid": {"q_min": -1, "q_max": 1, "n_points": 100}, "colour": 3}"#);
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn validation_is_mode_specific() {
        let cfg = base();
        assert!(cfg.validate(Mode::Classify).is_ok());
        assert!(cfg.validate(Mode::Ed).unwrap_err().is_config());
        let cfg = RunConfig { version: 2, ..base() };
        assert!(cfg.validate(Mode::Classify).is_err());
        let cfg = RunConfig { spin_components: 0, ..base() };
        assert!(cfg.validate(Mode::Classify).is_err());
        let cfg = RunConfig { mode: Some(Mode::Weak), ..base() };
        assert!(cfg.validate(Mode::Classify).is_err());
        let cfg = RunConfig { mode: Some(Mode::Spectrum), ..base() };
        assert!(cfg.validate(Mode::Classify).is_ok());
    }

    #[test]
    fn cache_keys_are_content_hashes() {
        let a = Cache::key("onebody", &(1, 2.5));
        assert_eq!(a, Cache::key("onebody", &(1, 2.5)));
        assert_ne!(a, Cache::key("onebody", &(1, 2.5000001)));
        assert_ne!(a, Cache::key("table", &(1, 2.5)));
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn cache_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(Some(dir.path().to_path_buf()));
        let v = vec![0.1f64, 1.0 / 3.0, std::f64::consts::PI * 1e-17];
        cache.store("x", "k", &v).unwrap();
        let back: Vec<f64> = cache.load("x", "k").unwrap();
        assert_eq!(v, back);
        let leftovers = fs::read_dir(dir.path()).unwrap().filter(|e| {
            e.as_ref().unwrap().file_name().to_string_lossy().ends_with(".tmp")
        });
        assert_eq!(leftovers.count(), 0);
    }

    #[test]
    fn populations_by_statistics() {
        assert_eq!(population(&[2, 1], Statistics::Fermion, 2), 2);
        assert_eq!(population(&[1, 1, 1], Statistics::Boson, 2), 0);
        assert_eq!(population(&[3], Statistics::Fermion, 3), 1);
        assert_eq!(population(&[2, 1], Statistics::Distinguishable, 2), 16);
    }

    #[test]
    fn classify_single_level() {
        let cfg = RunConfig { max_levels: Some(1), ..base() };
        let Output::Classify { levels, edges } = run(&cfg, Mode::Classify, &Cache::disabled()).unwrap() else {
            panic!()
        };
        assert_eq!(levels.len(), 1);
        assert_eq!(levels[0].k_irreps, "[3]⁺");
        assert!(edges.is_empty());
    }
}

//! Minimal free resolutions over the Steenrod algebra.
//!
//! The resolution is built degree by degree: in homological degree `s` and
//! internal degree `t`, new generators of `F_s` are chosen to span the kernel
//! of `d_{s-1}` modulo the image of the generators already present. Because
//! every choice goes through [`quotient_lift`] with a fixed pivot rule, the
//! result is reproducible bit for bit.
//!
//! For a minimal resolution of `M`, the generators of `F_s` in degree `t`
//! are dual to a basis of `Ext^{s,t}(M, F_2)`, and the coefficient of
//! `Sq^{2^i}` in differentials gives multiplication by `h_i`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::gf2::{quotient_lift, Echelon, Gf2Matrix, Gf2Vector};
use crate::modules::{parse_module, FdModule, ModuleElement};
use crate::steenrod::{AdmissibleMonomial, AlgebraTables};

pub const DEFAULT_MAX_S: u32 = 20;
pub const DEFAULT_MAX_T: i32 = 48;

const FILE_MAGIC: &str = "adamsext-resolution";
const FILE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ResolutionError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported resolution file header `{0}`")]
    Version(String),
    #[error("checksum mismatch: the file is corrupt or truncated")]
    Checksum,
    #[error("malformed resolution file, line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("saved resolution is for a different module")]
    ModuleMismatch,
}

/// A generator of `F_s` in internal degree `t`, the `index`-th in its bidegree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub s: u32,
    pub t: i32,
    pub index: usize,
}

impl Generator {
    pub fn name(&self) -> String {
        format!("x_{{{},{},{}}}", self.s, self.t, self.index)
    }
}

/// A free module given by the degrees of its generators (nondecreasing).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeModule {
    degrees: Vec<i32>,
}

impl FreeModule {
    pub fn generator_count(&self) -> usize {
        self.degrees.len()
    }

    pub fn generator_degree(&self, g: usize) -> i32 {
        self.degrees[g]
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    /// Block starts of the basis in degree `d`: generator `g` (with
    /// `t_g <= d`) owns `starts[g]..starts[g + 1]`, one entry per admissible
    /// monomial of degree `d - t_g`.
    pub fn starts(&self, d: i32, tables: &AlgebraTables) -> Vec<usize> {
        let mut starts = vec![0];
        let mut acc = 0;
        for &t in self.degrees.iter().take_while(|&&t| t <= d) {
            acc += tables.dim((d - t) as u32);
            starts.push(acc);
        }
        starts
    }

    pub fn dim_in(&self, d: i32, tables: &AlgebraTables) -> usize {
        *self.starts(d, tables).last().expect("nonempty starts")
    }

    /// Splits a basis index of degree `d` into (generator, monomial).
    fn locate(starts: &[usize], bit: usize) -> (usize, usize) {
        let g = starts.partition_point(|&o| o <= bit) - 1;
        (g, bit - starts[g])
    }
}

#[derive(Clone, Debug)]
struct Level {
    free: FreeModule,
    /// `d(g)` for each generator, in codomain coordinates of degree `t_g`.
    images: Vec<Gf2Vector>,
    /// Rows of the differential, per internal degree starting at the base
    /// degree: one row per basis element of `F_s` in that degree.
    rows: Vec<Vec<Gf2Vector>>,
}

impl Level {
    fn new() -> Self {
        Level {
            free: FreeModule::default(),
            images: Vec::new(),
            rows: Vec::new(),
        }
    }
}

/// A minimal free resolution `… → F_1 → F_0 → M`, complete for
/// `s <= max_s` and `t <= max_t`.
#[derive(Clone, Debug)]
pub struct Resolution {
    target: FdModule,
    max_t: i32,
    base: i32,
    tables: Arc<AlgebraTables>,
    levels: Vec<Level>,
}

impl PartialEq for Resolution {
    fn eq(&self, other: &Self) -> bool {
        self.target == other.target
            && self.max_t == other.max_t
            && self.levels.len() == other.levels.len()
            && self
                .levels
                .iter()
                .zip(&other.levels)
                .all(|(a, b)| a.free == b.free && a.images == b.images)
    }
}

/// Resolves `m` through homological degree `max_s` and internal degree `max_t`.
pub fn resolve(m: &FdModule, max_s: u32, max_t: i32) -> Resolution {
    let mut r = Resolution::empty(m.clone());
    r.extend(max_s, max_t);
    r
}

impl Resolution {
    fn empty(target: FdModule) -> Self {
        let base = target.min_degree().unwrap_or(0);
        Resolution {
            target,
            max_t: base - 1,
            base,
            tables: AlgebraTables::shared(0),
            levels: Vec::new(),
        }
    }

    pub fn target(&self) -> &FdModule {
        &self.target
    }

    pub fn max_s(&self) -> u32 {
        self.levels.len().saturating_sub(1) as u32
    }

    pub fn max_t(&self) -> i32 {
        self.max_t
    }

    /// Lowest internal degree in which anything can happen.
    pub fn base_degree(&self) -> i32 {
        self.base
    }

    pub fn tables(&self) -> &AlgebraTables {
        &self.tables
    }

    pub fn level(&self, s: u32) -> &FreeModule {
        &self.levels[s as usize].free
    }

    /// `d(g)`: for `s = 0` an element of the target, otherwise an element of
    /// `F_{s-1}` in degree `t_g`.
    pub fn image(&self, s: u32, g: usize) -> &Gf2Vector {
        &self.levels[s as usize].images[g]
    }

    pub fn generators(&self, s: u32) -> Vec<Generator> {
        let mut out = Vec::new();
        let mut last = None;
        let mut index = 0;
        for &t in self.level(s).degrees() {
            index = if last == Some(t) { index + 1 } else { 0 };
            last = Some(t);
            out.push(Generator { s, t, index });
        }
        out
    }

    /// Global indices of the generators of `F_s` in degree `t`.
    pub fn generators_in(&self, s: u32, t: i32) -> std::ops::Range<usize> {
        let d = self.level(s).degrees();
        d.partition_point(|&x| x < t)..d.partition_point(|&x| x <= t)
    }

    /// Grows the resolution to cover at least `max_s` and `max_t`.
    ///
    /// Extending is deterministic: the result equals a fresh resolve to the
    /// larger bounds.
    pub fn extend(&mut self, max_s: u32, max_t: i32) {
        let new_t = max_t.max(self.max_t);
        let new_s = if self.levels.is_empty() { max_s } else { max_s.max(self.max_s()) };
        if new_t >= self.base {
            let needed = (new_t - self.base) as u32;
            if self.tables.max_degree() < needed {
                self.tables = AlgebraTables::shared(needed);
            }
        }
        for s in 0..=new_s {
            if s as usize >= self.levels.len() {
                self.levels.push(Level::new());
            }
            let from = self.base + self.levels[s as usize].rows.len() as i32;
            self.extend_level(s, from, new_t);
        }
        self.max_t = new_t;
    }

    fn extend_level(&mut self, s: u32, from: i32, to: i32) {
        if from > to {
            return;
        }
        let ambients: Vec<Vec<Gf2Vector>> = if s == 0 {
            (from..=to)
                .map(|t| {
                    let n = self.target.dim_in(t);
                    (0..n).map(|k| Gf2Vector::unit(n, k)).collect()
                })
                .collect()
        } else {
            (from..=to)
                .into_par_iter()
                .map(|t| self.kernel_at(s - 1, t))
                .collect()
        };
        for (t, ambient) in (from..=to).zip(ambients) {
            let mut rows = self.rows_at(s, t);
            let new = quotient_lift(&ambient, &rows).expect("image of d lies in the kernel");
            let level = &mut self.levels[s as usize];
            for v in new {
                level.free.degrees.push(t);
                level.images.push(v.clone());
                rows.push(v);
            }
            level.rows.push(rows);
        }
    }

    fn rows_in(&self, s: u32, t: i32) -> &[Gf2Vector] {
        if t < self.base {
            return &[];
        }
        self.levels[s as usize]
            .rows
            .get((t - self.base) as usize)
            .map_or(&[], Vec::as_slice)
    }

    fn codomain_dim(&self, s: u32, t: i32) -> usize {
        if s == 0 {
            self.target.dim_in(t)
        } else {
            self.level(s - 1).dim_in(t, &self.tables)
        }
    }

    fn kernel_at(&self, s: u32, t: i32) -> Vec<Gf2Vector> {
        let rows = self.rows_in(s, t).to_vec();
        if rows.is_empty() {
            return Vec::new();
        }
        Gf2Matrix::from_rows(self.codomain_dim(s, t), rows)
            .expect("uniform rows")
            .transpose()
            .kernel_basis()
    }

    /// Images of the basis of `F_s` in degree `t` under `d_s`, using the
    /// generators present so far.
    fn rows_at(&self, s: u32, t: i32) -> Vec<Gf2Vector> {
        let level = &self.levels[s as usize];
        let starts = level.free.starts(t, &self.tables);
        let count = starts.len() - 1;
        let mut lower_starts: HashMap<i32, Vec<usize>> = HashMap::new();
        let mut rows = Vec::with_capacity(starts[count]);
        for g in 0..count {
            let deg = (t - level.free.degrees[g]) as u32;
            if deg == 0 {
                rows.push(level.images[g].clone());
                continue;
            }
            for k in 0..self.tables.dim(deg) {
                let (i, tail) = self.tables.tail(deg, k);
                let lower_t = t - i as i32;
                let ls = lower_starts
                    .entry(lower_t)
                    .or_insert_with(|| level.free.starts(lower_t, &self.tables));
                let src = &self.rows_in(s, lower_t)[ls[g] + tail];
                rows.push(self.apply_sq(s, i, lower_t, src));
            }
        }
        rows
    }

    /// `Sq^i` applied to an element of the codomain of `d_s` in degree `d`.
    fn apply_sq(&self, s: u32, i: u32, d: i32, v: &Gf2Vector) -> Gf2Vector {
        if s == 0 {
            let x = ModuleElement {
                degree: d,
                coords: v.clone(),
            };
            return self.target.act_sq(i, &x).coords;
        }
        let lower = self.level(s - 1);
        let src = lower.starts(d, &self.tables);
        let dst = lower.starts(d + i as i32, &self.tables);
        let mut out = Gf2Vector::zeros(*dst.last().expect("nonempty"));
        for bit in v.ones() {
            let (g, k) = FreeModule::locate(&src, bit);
            let deg = (d - lower.degrees[g]) as u32;
            out.add_at(dst[g], self.tables.sq_times(i, deg, k));
        }
        out
    }

    /// `d(g)` as (monomial, generator of the level below) terms; for `s = 0`
    /// the generator index is a basis index of the target module.
    pub fn differential_terms(&self, s: u32, g: usize) -> Vec<(AdmissibleMonomial, usize)> {
        let image = self.image(s, g);
        if s == 0 {
            let t = self.level(0).generator_degree(g);
            let basis = self.target.basis_in(t);
            return image.ones().map(|k| (AdmissibleMonomial::unit(), basis[k])).collect();
        }
        let t = self.level(s).generator_degree(g);
        let lower = self.level(s - 1);
        let starts = lower.starts(t, &self.tables);
        image
            .ones()
            .map(|bit| {
                let (h, k) = FreeModule::locate(&starts, bit);
                let deg = (t - lower.degrees[h]) as u32;
                (self.tables.basis(deg)[k].clone(), h)
            })
            .collect()
    }

    /// Checks `d∘d = 0`, exactness, surjectivity onto the target and
    /// minimality in every computed degree. Returns the first failure.
    pub fn check_invariants(&self) -> Result<(), String> {
        for s in 0..=self.max_s() {
            for (g, _) in self.level(s).degrees().iter().enumerate() {
                for (m, h) in self.differential_terms(s, g) {
                    if s > 0 && m.is_unit() {
                        return Err(format!("not minimal: d(x) for generator {g} of F_{s} has a unit coefficient on {h}"));
                    }
                }
            }
            for t in self.base..=self.max_t {
                let rows = self.rows_in(s, t);
                if s == 0 {
                    let rank = rank_of(rows, self.target.dim_in(t));
                    if rank != self.target.dim_in(t) {
                        return Err(format!("F_0 does not surject onto the target in degree {t}"));
                    }
                } else {
                    let below = self.rows_in(s - 1, t);
                    for (r, row) in rows.iter().enumerate() {
                        let mut acc = Gf2Vector::zeros(self.codomain_dim(s - 1, t));
                        for bit in row.ones() {
                            acc.add_assign(&below[bit]);
                        }
                        if !acc.is_zero() {
                            return Err(format!("d∘d ≠ 0 at s={s}, t={t}, row {r}"));
                        }
                    }
                    let kernel = self.kernel_at(s - 1, t).len();
                    let image = rank_of(rows, self.codomain_dim(s, t));
                    if kernel != image {
                        return Err(format!(
                            "not exact at s={}, t={t}: kernel {kernel}, image {image}",
                            s - 1
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn ext_table(&self) -> ExtTable {
        let mut table = ExtTable::new(self.max_s(), self.base, self.max_t);
        if self.levels.is_empty() {
            return table;
        }
        for s in 0..=self.max_s() {
            for g in self.generators(s) {
                *table.dims.entry((s, g.t)).or_default() += 1;
                table.names.entry((s, g.t)).or_default().push(g.name());
            }
        }
        table
    }

    /// Multiplication by `h_i` read off the `Sq^{2^i}` coefficients of the differentials.
    pub fn h_action(&self, i: u32) -> HProducts {
        let step = 1i32 << i;
        let mut out = HProducts {
            power: i,
            max_s: self.max_s(),
            max_t: self.max_t,
            matrices: BTreeMap::new(),
        };
        if self.levels.is_empty() || (step as u32) > self.tables.max_degree() {
            return out;
        }
        let sq = self
            .tables
            .index_of(&AdmissibleMonomial::sq(step as u32))
            .expect("Sq^{2^i} is admissible");
        for s in 0..self.max_s() {
            let mut by_t: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
            for (g, &t) in self.level(s).degrees().iter().enumerate() {
                by_t.entry(t).or_default().push(g);
            }
            for (&t, sources) in &by_t {
                if t + step > self.max_t {
                    continue;
                }
                let targets: Vec<usize> = self.generators_in(s + 1, t + step).collect();
                let starts = self.level(s).starts(t + step, &self.tables);
                let mut m = Gf2Matrix::zeros(targets.len(), sources.len());
                for (row, &gp) in targets.iter().enumerate() {
                    let image = self.image(s + 1, gp);
                    for (col, &g) in sources.iter().enumerate() {
                        if image.get(starts[g] + sq) {
                            m.set(row, col, true);
                        }
                    }
                }
                out.matrices.insert((s, t), m);
            }
        }
        out
    }

    // -- persistence ------------------------------------------------------

    fn body(&self) -> String {
        let mut b = String::new();
        let _ = writeln!(b, "bounds {} {}", self.max_s(), self.max_t);
        let _ = writeln!(b, "module");
        b.push_str(&self.target.to_dsl());
        let _ = writeln!(b, "end-module");
        for s in 0..self.levels.len() as u32 {
            let level = self.level(s);
            let _ = writeln!(b, "level {s} {}", level.generator_count());
            for g in 0..level.generator_count() {
                let terms: Vec<String> = self
                    .differential_terms(s, g)
                    .into_iter()
                    .map(|(m, h)| {
                        if s == 0 {
                            self.target.label(h).to_string()
                        } else {
                            let word: Vec<String> = m.exponents().iter().map(u32::to_string).collect();
                            let word = if word.is_empty() { "0".to_string() } else { word.join(".") };
                            format!("{word}@{h}")
                        }
                    })
                    .collect();
                let rhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
                let _ = writeln!(b, "g {} = {rhs}", level.generator_degree(g));
            }
        }
        b
    }

    /// Canonical text serialization with a SHA-256 checksum of the body.
    pub fn to_file_string(&self) -> String {
        let body = self.body();
        let digest = Sha256::digest(body.as_bytes());
        format!("{FILE_MAGIC} {FILE_VERSION}\nsha256 {}\n{body}", hex::encode(digest))
    }

    pub fn save(&self, path: &Path) -> Result<(), ResolutionError> {
        std::fs::write(path, self.to_file_string()).map_err(|source| ResolutionError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Resolution, ResolutionError> {
        let text = std::fs::read_to_string(path).map_err(|source| ResolutionError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_file_string(&text)
    }

    /// Loads a saved resolution and checks it resolves `module`.
    pub fn load_for(path: &Path, module: &FdModule) -> Result<Resolution, ResolutionError> {
        let r = Self::load(path)?;
        if r.target.to_dsl() != module.to_dsl() {
            return Err(ResolutionError::ModuleMismatch);
        }
        Ok(r)
    }

    pub fn from_file_string(text: &str) -> Result<Resolution, ResolutionError> {
        let (header, rest) = text.split_once('\n').unwrap_or((text, ""));
        if header != format!("{FILE_MAGIC} {FILE_VERSION}") {
            return Err(ResolutionError::Version(header.to_string()));
        }
        let (sum_line, body) = rest.split_once('\n').ok_or(ResolutionError::Checksum)?;
        let expected = sum_line.strip_prefix("sha256 ").ok_or(ResolutionError::Checksum)?;
        if hex::encode(Sha256::digest(body.as_bytes())) != expected {
            return Err(ResolutionError::Checksum);
        }
        parse_body(body)
    }
}

fn rank_of(rows: &[Gf2Vector], len: usize) -> usize {
    let mut e = Echelon::new(len);
    rows.iter().filter(|r| e.insert((*r).clone())).count()
}

fn parse_body(body: &str) -> Result<Resolution, ResolutionError> {
    let lines: Vec<&str> = body.lines().collect();
    let err = |line: usize, message: &str| ResolutionError::Format {
        line: line + 3,
        message: message.to_string(),
    };
    let mut i = 0;
    let bounds: Vec<i64> = lines
        .first()
        .and_then(|l| l.strip_prefix("bounds "))
        .map(|l| l.split_whitespace().filter_map(|x| x.parse().ok()).collect())
        .ok_or_else(|| err(0, "expected bounds"))?;
    let [max_s, max_t] = bounds[..] else {
        return Err(err(0, "expected two bounds"));
    };
    i += 1;
    if lines.get(i) != Some(&"module") {
        return Err(err(i, "expected module"));
    }
    i += 1;
    let start = i;
    while i < lines.len() && lines[i] != "end-module" {
        i += 1;
    }
    if i == lines.len() {
        return Err(err(i, "unterminated module"));
    }
    let target = parse_module(&lines[start..i].join("\n")).map_err(|e| err(start, &e.to_string()))?;
    i += 1;

    let mut r = Resolution::empty(target);
    r.max_t = max_t as i32;
    if max_t as i32 >= r.base {
        r.tables = AlgebraTables::shared((max_t as i32 - r.base) as u32);
    }
    for s in 0..=max_s as u32 {
        let header = lines.get(i).ok_or_else(|| err(i, "missing level"))?;
        let count: usize = header
            .strip_prefix(&format!("level {s} "))
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| err(i, "expected level header"))?;
        i += 1;
        let mut level = Level::new();
        for _ in 0..count {
            let line = lines.get(i).ok_or_else(|| err(i, "missing generator"))?;
            let (t, rhs) = line
                .strip_prefix("g ")
                .and_then(|l| l.split_once(" = "))
                .ok_or_else(|| err(i, "expected generator"))?;
            let t: i32 = t.parse().map_err(|_| err(i, "bad degree"))?;
            let mut v = Gf2Vector::zeros(if s == 0 {
                r.target.dim_in(t)
            } else {
                r.level(s - 1).dim_in(t, &r.tables)
            });
            if rhs != "0" {
                for term in rhs.split(" + ") {
                    let bit = if s == 0 {
                        let b = r.target.index_of(term).ok_or_else(|| err(i, "unknown basis label"))?;
                        if r.target.degree_of(b) != t {
                            return Err(err(i, "term has the wrong degree"));
                        }
                        r.target.position_in_degree(b)
                    } else {
                        let (word, h) = term.split_once('@').ok_or_else(|| err(i, "bad term"))?;
                        let h: usize = h.parse().map_err(|_| err(i, "bad generator index"))?;
                        let exps: Vec<u32> = if word == "0" {
                            Vec::new()
                        } else {
                            word.split('.').map(str::parse).collect::<Result<_, _>>().map_err(|_| err(i, "bad monomial"))?
                        };
                        let m = AdmissibleMonomial::new(exps).ok_or_else(|| err(i, "inadmissible monomial"))?;
                        let lower = r.level(s - 1);
                        if h >= lower.generator_count() || lower.generator_degree(h) + m.degree() as i32 != t {
                            return Err(err(i, "term has the wrong degree"));
                        }
                        let starts = lower.starts(t, &r.tables);
                        starts[h] + r.tables.index_of(&m).expect("admissible")
                    };
                    v.flip(bit);
                }
            }
            level.free.degrees.push(t);
            level.images.push(v);
            i += 1;
        }
        if level.free.degrees.windows(2).any(|w| w[0] > w[1]) {
            return Err(err(i, "generators out of order"));
        }
        r.levels.push(level);
        for t in r.base..=r.max_t {
            let rows = r.rows_at(s, t);
            r.levels[s as usize].rows.push(rows);
        }
    }
    if i != lines.len() {
        return Err(err(i, "trailing data"));
    }
    Ok(r)
}

/// Ext dimensions per bidegree `(s, t)`, with the range they are valid for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtTable {
    pub max_s: u32,
    pub min_t: i32,
    pub max_t: i32,
    dims: BTreeMap<(u32, i32), usize>,
    names: BTreeMap<(u32, i32), Vec<String>>,
}

impl ExtTable {
    pub fn new(max_s: u32, min_t: i32, max_t: i32) -> Self {
        ExtTable {
            max_s,
            min_t,
            max_t,
            dims: BTreeMap::new(),
            names: BTreeMap::new(),
        }
    }

    pub fn dim(&self, s: u32, t: i32) -> usize {
        self.dims.get(&(s, t)).copied().unwrap_or(0)
    }

    pub fn names(&self, s: u32, t: i32) -> &[String] {
        self.names.get(&(s, t)).map_or(&[], Vec::as_slice)
    }

    pub fn covers(&self, s: u32, t: i32) -> bool {
        s <= self.max_s && (self.min_t..=self.max_t).contains(&t)
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Nonzero entries, ordered by `(s, t)`.
    pub fn entries(&self) -> impl Iterator<Item = ((u32, i32), usize)> + '_ {
        self.dims.iter().map(|(&k, &v)| (k, v))
    }

    /// The same table with every `t` moved by `shift`.
    pub fn shifted(&self, shift: i32) -> ExtTable {
        ExtTable {
            max_s: self.max_s,
            min_t: self.min_t + shift,
            max_t: self.max_t + shift,
            dims: self.dims.iter().map(|(&(s, t), &d)| ((s, t + shift), d)).collect(),
            names: self.names.iter().map(|(&(s, t), n)| ((s, t + shift), n.clone())).collect(),
        }
    }

    /// First bidegree (in `(s, t)` order) inside both ranges and `keep`
    /// where the dimensions differ: `(s, t, ours, theirs)`.
    pub fn first_difference(
        &self,
        other: &ExtTable,
        keep: impl Fn(u32, i32) -> bool,
    ) -> Option<(u32, i32, usize, usize)> {
        let max_s = self.max_s.min(other.max_s);
        let (lo, hi) = (self.min_t.max(other.min_t), self.max_t.min(other.max_t));
        for s in 0..=max_s {
            for t in lo..=hi {
                if !keep(s, t) {
                    continue;
                }
                let (a, b) = (self.dim(s, t), other.dim(s, t));
                if a != b {
                    return Some((s, t, a, b));
                }
            }
        }
        None
    }
}

/// Multiplication by `h_i`: for each source bidegree `(s, t)`, the matrix
/// `Ext^{s,t} → Ext^{s+1, t+2^i}` in generator bases (row = target class).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HProducts {
    pub power: u32,
    pub max_s: u32,
    pub max_t: i32,
    matrices: BTreeMap<(u32, i32), Gf2Matrix>,
}

impl HProducts {
    pub fn matrix(&self, s: u32, t: i32) -> Option<&Gf2Matrix> {
        self.matrices.get(&(s, t))
    }

    pub fn matrices(&self) -> impl Iterator<Item = ((u32, i32), &Gf2Matrix)> {
        self.matrices.iter().map(|(&k, v)| (k, v))
    }

    /// Image of a class at `(s, t)`, or `None` when the target bidegree is
    /// outside the computed range.
    pub fn apply(&self, s: u32, t: i32, x: &Gf2Vector) -> Option<Gf2Vector> {
        let m = self.matrices.get(&(s, t))?;
        Some(m.mul_vec(x).expect("class vector matches bidegree"))
    }

    /// Largest `k` with `h^k x ≠ 0` inside the range, and whether the range
    /// boundary cut the search short.
    pub fn tower_height(&self, s: u32, t: i32, x: &Gf2Vector) -> (usize, bool) {
        let step = 1i32 << self.power;
        let (mut s, mut t, mut x) = (s, t, x.clone());
        let mut height = 0;
        loop {
            if x.is_zero() {
                return (height, false);
            }
            match self.apply(s, t, &x) {
                None => return (height, true),
                Some(y) => {
                    if y.is_zero() {
                        return (height, false);
                    }
                    height += 1;
                    s += 1;
                    t += step;
                    x = y;
                }
            }
        }
    }
}

/// `Ext^{s,t}(M, N)` as the cohomology of `Hom_A(F_*, N)`, where `F_*`
/// resolves `M`. Uses only exactness of `r`, not minimality.
///
/// Covers `s < r.max_s()` and the `t` for which every generator that can
/// contribute lies inside `r`'s degree bound.
pub fn hom_complex_ext(r: &Resolution, n: &FdModule) -> ExtTable {
    let (Some(n_lo), Some(n_hi)) = (n.min_degree(), n.max_degree()) else {
        return ExtTable::new(r.max_s().saturating_sub(1), 0, -1);
    };
    let t_lo = r.base_degree() - n_hi;
    let t_hi = r.max_t() - n_hi;
    if r.max_s() == 0 || r.target().is_zero() {
        return ExtTable::new(r.max_s().saturating_sub(1), t_lo, t_hi);
    }
    let top_s = r.max_s() - 1;
    let mut table = ExtTable::new(top_s, t_lo, t_hi);

    let computed: Vec<Vec<usize>> = (t_lo..=t_hi)
        .into_par_iter()
        .map(|t| {
            // basis of Hom^t(F_s, N): (generator, basis position in N[t_g - t])
            let homs: Vec<Vec<(usize, usize)>> = (0..=r.max_s())
                .map(|s| {
                    r.level(s)
                        .degrees()
                        .iter()
                        .enumerate()
                        .flat_map(|(g, &tg)| (0..n.dim_in(tg - t)).map(move |b| (g, b)))
                        .collect()
                })
                .collect();
            let ranks: Vec<usize> = (0..=top_s)
                .map(|s| coboundary_rank(r, n, s, t, &homs[s as usize], (n_lo, n_hi)))
                .collect();
            (0..=top_s as usize)
                .map(|s| {
                    let below = if s == 0 { 0 } else { ranks[s - 1] };
                    homs[s].len() - ranks[s] - below
                })
                .collect()
        })
        .collect();
    for (t, dims) in (t_lo..=t_hi).zip(computed) {
        for (s, d) in dims.into_iter().enumerate() {
            if d > 0 {
                table.dims.insert((s as u32, t), d);
            }
        }
    }
    table
}

/// Rank of `δ: Hom^t(F_s, N) → Hom^t(F_{s+1}, N)`, `(δf)(g') = f(d g')`.
fn coboundary_rank(
    r: &Resolution,
    n: &FdModule,
    s: u32,
    t: i32,
    source: &[(usize, usize)],
    (n_lo, n_hi): (i32, i32),
) -> usize {
    if source.is_empty() {
        return 0;
    }
    let column: HashMap<(usize, usize), usize> = source.iter().enumerate().map(|(c, &k)| (k, c)).collect();
    let upper = r.level(s + 1);
    let mut echelon = Echelon::new(source.len());
    let mut action_cache: HashMap<(AdmissibleMonomial, i32, usize), ModuleElement> = HashMap::new();
    for (gp, &tgp) in upper.degrees().iter().enumerate() {
        let target_deg = tgp - t;
        if target_deg < n_lo || target_deg > n_hi || n.dim_in(target_deg) == 0 {
            continue;
        }
        // One row of δ per basis element c of N[t_{g'} - t].
        let mut rows = vec![Gf2Vector::zeros(source.len()); n.dim_in(target_deg)];
        for (m, h) in r.differential_terms(s + 1, gp) {
            let src_deg = r.level(s).generator_degree(h) - t;
            for b in 0..n.dim_in(src_deg) {
                let y = action_cache.entry((m.clone(), src_deg, b)).or_insert_with(|| {
                    let x = n.basis_element(n.basis_in(src_deg)[b]);
                    n.act_word(m.exponents(), &x)
                });
                let col = column[&(h, b)];
                for c in y.coords.ones() {
                    rows[c].flip(col);
                }
            }
        }
        for row in rows {
            echelon.insert(row);
        }
    }
    echelon.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::Fixture;

    fn sphere() -> FdModule {
        Fixture::Sphere.module()
    }

    #[test]
    fn sphere_f1_generators() {
        let r = resolve(&sphere(), 3, 10);
        assert_eq!(r.level(1).degrees(), &[1, 2, 4, 8]);
        r.check_invariants().unwrap();
    }

    #[test]
    fn zero_module() {
        let r = resolve(&FdModule::zero("Z"), 3, 10);
        for s in 0..=3 {
            assert_eq!(r.level(s).generator_count(), 0);
        }
        assert!(r.ext_table().is_empty());
        assert!(r.h_action(0).matrices().next().is_none());
        assert!(hom_complex_ext(&r, &sphere()).is_empty());
        assert!(hom_complex_ext(&resolve(&sphere(), 3, 10), &FdModule::zero("Z")).is_empty());
    }

    #[test]
    fn x_is_cyclic() {
        let r = resolve(&Fixture::X.normalized(), 0, 10);
        assert_eq!(r.level(0).degrees(), &[0]);
    }

    #[test]
    fn sphere_ext_bottom() {
        let r = resolve(&sphere(), 4, 12);
        let e = r.ext_table();
        assert_eq!(e.dim(0, 0), 1);
        assert_eq!(e.dim(1, 1), 1);
        assert_eq!(e.dim(1, 3), 0);
        assert_eq!(e.dim(2, 2), 1);
        let h0 = r.h_action(0);
        assert_eq!(h0.matrix(0, 0).unwrap(), &Gf2Matrix::identity(1));
    }

    #[test]
    fn hom_oracle_matches_on_sphere() {
        let r = resolve(&sphere(), 6, 20);
        let hom = hom_complex_ext(&r, &sphere());
        assert_eq!(r.ext_table().first_difference(&hom, |_, _| true), None);
    }

    #[test]
    fn save_load_round_trip() {
        let r = resolve(&Fixture::Y.normalized(), 4, 14);
        let text = r.to_file_string();
        let back = Resolution::from_file_string(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_file_string(), text);
        back.check_invariants().unwrap();

        let truncated = &text[..text.len() - 20];
        assert!(matches!(Resolution::from_file_string(truncated), Err(ResolutionError::Checksum)));
        let other = text.replacen("adamsext-resolution 1", "adamsext-resolution 9", 1);
        assert!(matches!(Resolution::from_file_string(&other), Err(ResolutionError::Version(_))));
    }

    #[test]
    fn resume_matches_fresh() {
        let m = Fixture::X.normalized();
        let mut r = resolve(&m, 3, 12);
        let text = r.to_file_string();
        r = Resolution::from_file_string(&text).unwrap();
        r.extend(5, 18);
        assert_eq!(r, resolve(&m, 5, 18));
    }

    #[test]
    fn tower_height_sphere() {
        let r = resolve(&sphere(), 6, 12);
        let h0 = r.h_action(0);
        let unit = Gf2Vector::unit(1, 0);
        assert_eq!(h0.tower_height(0, 0, &unit), (6, true));
        // h1 is killed by h0.
        assert_eq!(h0.tower_height(1, 2, &unit), (0, false));
    }
}

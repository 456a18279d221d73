//! Finite-dimensional graded modules over the Steenrod algebra.
//!
//! A module is a list of labelled basis elements with integer degrees plus
//! the action of every square `Sq^i`. The text format lists generators and
//! the nonzero actions of squares; see [`parse_module`].

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::gf2::{Gf2Matrix, Gf2Vector};
use crate::steenrod::{adem_pair, antipode, SteenrodElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuleError {
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: duplicate generator `{label}`")]
    DuplicateGenerator {
        label: String,
        line: usize,
        column: usize,
    },
    #[error("{line}:{column}: unknown generator `{label}`")]
    UnknownGenerator {
        label: String,
        line: usize,
        column: usize,
    },
    #[error("{line}:{column}: Sq{square}({source_label}) must land in degree {expected}, but `{target}` has degree {found}")]
    DegreeMismatch {
        square: u32,
        source_label: String,
        target: String,
        expected: i32,
        found: i32,
        line: usize,
        column: usize,
    },
    #[error("{line}:{column}: Sq{square}({label}) is given twice")]
    DuplicateAction {
        square: u32,
        label: String,
        line: usize,
        column: usize,
    },
}

/// A homogeneous element: coordinates over the basis elements of one degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModuleElement {
    pub degree: i32,
    pub coords: Gf2Vector,
}

impl ModuleElement {
    pub fn is_zero(&self) -> bool {
        self.coords.is_zero()
    }
}

/// An Adem relation that fails on a basis element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub a: u32,
    pub b: u32,
    pub generator: String,
    /// `Sq^a Sq^b v`, as labels.
    pub composite: Vec<String>,
    /// The admissible side of the relation applied to `v`, as labels.
    pub expanded: Vec<String>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[String]| if v.is_empty() { "0".to_string() } else { v.join(" + ") };
        write!(
            f,
            "Sq{} Sq{} ({}) = {} but the Adem relation gives {}",
            self.a,
            self.b,
            self.generator,
            show(&self.composite),
            show(&self.expanded)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FdModule {
    name: String,
    labels: Vec<String>,
    degrees: Vec<i32>,
    min_degree: i32,
    by_degree: Vec<Vec<usize>>,
    position: Vec<usize>,
    /// Nonzero values of `Sq^i(b)` keyed by `(i, b)`, over the basis of degree `deg b + i`.
    actions: BTreeMap<(u32, usize), Gf2Vector>,
}

impl FdModule {
    /// A module with the given basis and no nonzero actions.
    pub fn new(name: impl Into<String>, basis: Vec<(String, i32)>) -> Self {
        let min_degree = basis.iter().map(|b| b.1).min().unwrap_or(0);
        let max_degree = basis.iter().map(|b| b.1).max().unwrap_or(-1);
        let mut by_degree = vec![Vec::new(); (max_degree - min_degree + 1).max(0) as usize];
        let mut position = Vec::with_capacity(basis.len());
        for (i, (_, d)) in basis.iter().enumerate() {
            let slot = &mut by_degree[(d - min_degree) as usize];
            position.push(slot.len());
            slot.push(i);
        }
        let (labels, degrees) = basis.into_iter().unzip();
        FdModule {
            name: name.into(),
            labels,
            degrees,
            min_degree,
            by_degree,
            position,
            actions: BTreeMap::new(),
        }
    }

    pub fn zero(name: impl Into<String>) -> Self {
        Self::new(name, Vec::new())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dimension(&self) -> usize {
        self.labels.len()
    }

    pub fn is_zero(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, b: usize) -> &str {
        &self.labels[b]
    }

    pub fn degree_of(&self, b: usize) -> i32 {
        self.degrees[b]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn min_degree(&self) -> Option<i32> {
        (!self.is_zero()).then_some(self.min_degree)
    }

    pub fn max_degree(&self) -> Option<i32> {
        (!self.is_zero()).then(|| self.min_degree + self.by_degree.len() as i32 - 1)
    }

    /// Top degree minus bottom degree (0 for the zero module).
    pub fn span(&self) -> u32 {
        self.by_degree.len().saturating_sub(1) as u32
    }

    /// Basis indices in degree `d`, in declaration order.
    pub fn basis_in(&self, d: i32) -> &[usize] {
        if d < self.min_degree {
            return &[];
        }
        self.by_degree
            .get((d - self.min_degree) as usize)
            .map_or(&[], Vec::as_slice)
    }

    pub fn dim_in(&self, d: i32) -> usize {
        self.basis_in(d).len()
    }

    /// Position of basis element `b` within its degree.
    pub fn position_in_degree(&self, b: usize) -> usize {
        self.position[b]
    }

    pub fn basis_element(&self, b: usize) -> ModuleElement {
        let d = self.degrees[b];
        ModuleElement {
            degree: d,
            coords: Gf2Vector::unit(self.dim_in(d), self.position[b]),
        }
    }

    pub fn element(&self, label: &str) -> Option<ModuleElement> {
        self.index_of(label).map(|b| self.basis_element(b))
    }

    pub fn zero_element(&self, d: i32) -> ModuleElement {
        ModuleElement {
            degree: d,
            coords: Gf2Vector::zeros(self.dim_in(d)),
        }
    }

    pub fn element_labels(&self, x: &ModuleElement) -> Vec<String> {
        let basis = self.basis_in(x.degree);
        x.coords.ones().map(|k| self.labels[basis[k]].clone()).collect()
    }

    /// `Sq^i(b)` for a basis element, as coordinates in degree `deg b + i`.
    pub fn sq_basis(&self, i: u32, b: usize) -> Gf2Vector {
        if i == 0 {
            return Gf2Vector::unit(self.dim_in(self.degrees[b]), self.position[b]);
        }
        self.actions
            .get(&(i, b))
            .cloned()
            .unwrap_or_else(|| Gf2Vector::zeros(self.dim_in(self.degrees[b] + i as i32)))
    }

    /// Sets `Sq^i(b)`. The vector must have the dimension of degree `deg b + i`.
    pub fn set_action(&mut self, i: u32, b: usize, value: Gf2Vector) {
        assert!(i > 0, "Sq0 is the identity");
        assert_eq!(
            value.len(),
            self.dim_in(self.degrees[b] + i as i32),
            "action value has the wrong degree"
        );
        if value.is_zero() {
            self.actions.remove(&(i, b));
        } else {
            self.actions.insert((i, b), value);
        }
    }

    pub fn act_sq(&self, i: u32, x: &ModuleElement) -> ModuleElement {
        if i == 0 {
            return x.clone();
        }
        let target = x.degree + i as i32;
        let mut out = Gf2Vector::zeros(self.dim_in(target));
        if !out.is_empty() {
            let basis = self.basis_in(x.degree);
            for k in x.coords.ones() {
                if let Some(v) = self.actions.get(&(i, basis[k])) {
                    out.add_assign(v);
                }
            }
        }
        ModuleElement {
            degree: target,
            coords: out,
        }
    }

    /// Applies the squares of `word` right to left.
    pub fn act_word(&self, word: &[u32], x: &ModuleElement) -> ModuleElement {
        word.iter().rev().fold(x.clone(), |acc, &i| self.act_sq(i, &acc))
    }

    pub fn act(&self, op: &SteenrodElement, x: &ModuleElement) -> ModuleElement {
        let mut out = self.zero_element(x.degree + op.degree() as i32);
        for m in op.terms() {
            let y = self.act_word(m.exponents(), x);
            if !out.coords.is_empty() {
                out.coords.add_assign(&y.coords);
            }
        }
        out
    }

    /// The matrix of `op` from degree `d` to `d + deg op`; column `k` is the
    /// image of the `k`-th basis element of degree `d`.
    pub fn action_matrix(&self, op: &SteenrodElement, d: i32) -> Gf2Matrix {
        let target = d + op.degree() as i32;
        let columns: Vec<Gf2Vector> = self
            .basis_in(d)
            .iter()
            .map(|&b| self.act(op, &self.basis_element(b)).coords)
            .collect();
        Gf2Matrix::from_rows(self.dim_in(target), columns)
            .expect("action values have uniform length")
            .transpose()
    }

    /// Checks every Adem relation `Sq^a Sq^b`, `a < 2b`, that can act nontrivially.
    pub fn validate(&self) -> Vec<Violation> {
        let span = self.span();
        let mut out = Vec::new();
        for b in 1..=span {
            for a in 1..(2 * b).min(span + 1) {
                if a + b > span {
                    break;
                }
                let rel = adem_pair(a, b);
                for v in 0..self.dimension() {
                    let x = self.basis_element(v);
                    let composite = self.act_sq(a, &self.act_sq(b, &x));
                    let mut expanded = self.zero_element(composite.degree);
                    for &(hi, lo) in rel.iter() {
                        let y = self.act_sq(hi, &self.act_sq(lo, &x));
                        if !expanded.coords.is_empty() {
                            expanded.coords.add_assign(&y.coords);
                        }
                    }
                    if composite != expanded {
                        out.push(Violation {
                            a,
                            b,
                            generator: self.labels[v].clone(),
                            composite: self.element_labels(&composite),
                            expanded: self.element_labels(&expanded),
                        });
                    }
                }
            }
        }
        out
    }

    /// The same module with every degree shifted by `k`.
    pub fn suspend(&self, k: i32) -> FdModule {
        let mut out = FdModule::new(
            self.name.clone(),
            self.labels
                .iter()
                .cloned()
                .zip(self.degrees.iter().map(|d| d + k))
                .collect(),
        );
        out.actions = self.actions.clone();
        out
    }

    /// Shifted so the bottom basis element sits in degree 0.
    pub fn normalized(&self) -> FdModule {
        self.suspend(-self.min_degree().unwrap_or(0))
    }

    /// Tensor product with the Cartan-formula action.
    ///
    /// Basis pairs are ordered with the left factor varying slowest.
    pub fn tensor(&self, other: &FdModule) -> FdModule {
        let basis: Vec<(String, i32)> = (0..self.dimension())
            .flat_map(|a| {
                (0..other.dimension()).map(move |b| {
                    (
                        format!("{}*{}", wrap(self.label(a)), wrap(other.label(b))),
                        self.degrees[a] + other.degrees[b],
                    )
                })
            })
            .collect();
        let name = format!("{}*{}", wrap(&self.name), wrap(&other.name));
        let mut out = FdModule::new(name, basis);
        let pair = |a: usize, b: usize| a * other.dimension() + b;
        let span = out.span();
        for a in 0..self.dimension() {
            for b in 0..other.dimension() {
                let src = pair(a, b);
                for n in 1..=span {
                    let target = out.degrees[src] + n as i32;
                    let mut value = Gf2Vector::zeros(out.dim_in(target));
                    if value.is_empty() {
                        continue;
                    }
                    for i in 0..=n {
                        let left = self.sq_basis(i, a);
                        if left.is_zero() {
                            continue;
                        }
                        let right = other.sq_basis(n - i, b);
                        let left_basis = self.basis_in(self.degrees[a] + i as i32);
                        let right_basis = other.basis_in(other.degrees[b] + (n - i) as i32);
                        for x in left.ones() {
                            for y in right.ones() {
                                let idx = pair(left_basis[x], right_basis[y]);
                                value.flip(out.position[idx]);
                            }
                        }
                    }
                    out.set_action(n, src, value);
                }
            }
        }
        out
    }

    /// The dual module in negated degrees: `Sq^i` acts on a dual basis
    /// element by the transpose of `χ(Sq^i)`.
    pub fn dual(&self) -> FdModule {
        let basis = self
            .labels
            .iter()
            .zip(&self.degrees)
            .map(|(l, d)| (format!("~{l}"), -d))
            .collect();
        let mut out = FdModule::new(format!("~{}", self.name), basis);
        for n in 1..=self.span() {
            let chi = antipode(n);
            for b in 0..self.dimension() {
                // Sq^n(b*) lives in degree -(deg b - n): pair with sources c in degree deg b - n.
                let source_degree = self.degrees[b] - n as i32;
                let sources = self.basis_in(source_degree);
                if sources.is_empty() {
                    continue;
                }
                let mut value = Gf2Vector::zeros(sources.len());
                for (k, &c) in sources.iter().enumerate() {
                    let image = self.act(&chi, &self.basis_element(c));
                    if image.coords.get(self.position[b]) {
                        value.set(k, true);
                    }
                }
                // Dual basis of degree -source_degree is listed in the same order.
                out.set_action(n, b, value);
            }
        }
        out
    }

    /// True if the two modules agree basis-element by basis-element (same
    /// degrees in the same order, same actions), ignoring labels and name.
    pub fn same_structure(&self, other: &FdModule) -> bool {
        self.degrees == other.degrees && self.actions == other.actions
    }

    /// Dimension of each degree from bottom to top.
    pub fn dimension_table(&self) -> BTreeMap<i32, usize> {
        (0..self.by_degree.len())
            .filter(|&k| !self.by_degree[k].is_empty())
            .map(|k| (self.min_degree + k as i32, self.by_degree[k].len()))
            .collect()
    }

    /// Canonical text form that parses back to an equal module.
    ///
    /// Actions of `Sq^{2^k}` are listed when nonzero; other squares only when
    /// they differ from what the parser would derive.
    pub fn to_dsl(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "module {} {{", self.name);
        for (l, d) in self.labels.iter().zip(&self.degrees) {
            let _ = writeln!(s, "  gen {l}:{d}");
        }
        let mut table = BTreeMap::new();
        for n in 1..=self.span() {
            for b in 0..self.dimension() {
                let actual = self.sq_basis(n, b);
                let write = if n.is_power_of_two() {
                    !actual.is_zero()
                } else {
                    derive_square(self, &table, n, b) != actual
                };
                if write {
                    let targets = self.basis_in(self.degrees[b] + n as i32);
                    let sum: Vec<&str> = actual.ones().map(|k| self.labels[targets[k]].as_str()).collect();
                    let rhs = if sum.is_empty() { "0".to_string() } else { sum.join(" + ") };
                    let _ = writeln!(s, "  sq {n} {} = {rhs}", self.labels[b]);
                }
                if !actual.is_zero() {
                    table.insert((n, b), actual);
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

fn wrap(label: &str) -> String {
    if label.contains('*') {
        format!("({label})")
    } else {
        label.to_string()
    }
}

/// `Sq^n(b)` for `n` not a power of two, from the Adem relation for
/// `Sq^m Sq^{2^k}` with `n = 2^k + m`, using the actions already in `table`.
fn derive_square(
    module: &FdModule,
    table: &BTreeMap<(u32, usize), Gf2Vector>,
    n: u32,
    b: usize,
) -> Gf2Vector {
    let top = 1u32 << (31 - n.leading_zeros());
    let m = n - top;
    debug_assert!(m > 0 && m < top);
    let apply = |i: u32, x: &ModuleElement| -> ModuleElement {
        if i == 0 {
            return x.clone();
        }
        let target = x.degree + i as i32;
        let mut out = Gf2Vector::zeros(module.dim_in(target));
        if !out.is_empty() {
            let basis = module.basis_in(x.degree);
            for k in x.coords.ones() {
                if let Some(v) = table.get(&(i, basis[k])) {
                    out.add_assign(v);
                }
            }
        }
        ModuleElement {
            degree: target,
            coords: out,
        }
    };
    let x = module.basis_element(b);
    let mut value = apply(m, &apply(top, &x)).coords;
    for &(hi, lo) in adem_pair(m, top).iter() {
        if lo == 0 {
            debug_assert_eq!(hi, n);
            continue;
        }
        if !value.is_empty() {
            value.add_assign(&apply(hi, &apply(lo, &x)).coords);
        }
    }
    value
}

// ---------------------------------------------------------------------------
// Text format

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    LBrace,
    RBrace,
    Colon,
    Eq,
    Plus,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

const SPECIAL: &[char] = &['{', '}', ':', '=', '+', '#'];

fn lex(text: &str) -> Result<Vec<Spanned>, ModuleError> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line, column) = (li + 1, i + 1);
            let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line, column });
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            match c {
                '{' => push(&mut out, Tok::LBrace),
                '}' => push(&mut out, Tok::RBrace),
                ':' => push(&mut out, Tok::Colon),
                '=' => push(&mut out, Tok::Eq),
                '+' => push(&mut out, Tok::Plus),
                _ if c.is_ascii_digit() || c == '-' => {
                    let start = i;
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let s: String = chars[start..i].iter().collect();
                    let value = s.parse::<i64>().map_err(|_| ModuleError::Parse {
                        line,
                        column,
                        message: format!("malformed integer `{s}`"),
                    })?;
                    push(&mut out, Tok::Int(value));
                    if i < chars.len() && !chars[i].is_whitespace() && !SPECIAL.contains(&chars[i]) {
                        return Err(ModuleError::Parse {
                            line,
                            column: i + 1,
                            message: "identifiers may not start with a digit".into(),
                        });
                    }
                    continue;
                }
                _ => {
                    let start = i;
                    while i < chars.len() && !chars[i].is_whitespace() && !SPECIAL.contains(&chars[i]) {
                        i += 1;
                    }
                    push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
                    continue;
                }
            }
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn error_here(&self, message: impl Into<String>) -> ModuleError {
        let (line, column) = self.peek().map_or(self.end, |t| (t.line, t.column));
        ModuleError::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    fn next(&mut self, what: &str) -> Result<Spanned, ModuleError> {
        let t = self
            .peek()
            .cloned()
            .ok_or_else(|| self.error_here(format!("unexpected end of input, expected {what}")))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Spanned, ModuleError> {
        let t = self.next(what)?;
        if t.tok != tok {
            self.pos -= 1;
            return Err(self.error_here(format!("expected {what}")));
        }
        Ok(t)
    }

    fn ident(&mut self, what: &str) -> Result<(String, Spanned), ModuleError> {
        let t = self.next(what)?;
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t.clone())),
            _ => {
                self.pos -= 1;
                Err(self.error_here(format!("expected {what}")))
            }
        }
    }

    fn int(&mut self, what: &str) -> Result<(i64, Spanned), ModuleError> {
        let t = self.next(what)?;
        match t.tok {
            Tok::Int(v) => Ok((v, t)),
            _ => {
                self.pos -= 1;
                Err(self.error_here(format!("expected {what}")))
            }
        }
    }
}

struct ActionLine {
    square: u32,
    source: String,
    targets: Vec<(String, usize, usize)>,
    line: usize,
    column: usize,
}

/// Parses the module text format:
///
/// ```text
/// module  := "module" IDENT "{" item* "}"
/// item    := "gen" IDENT ":" INT | "sq" INT IDENT "=" sum
/// sum     := "0" | IDENT ("+" IDENT)*
/// ```
///
/// Unlisted actions of `Sq^{2^k}` are zero. Any other square not listed is
/// derived from the squares below it through the Adem relations, so a cell
/// diagram given by `Sq^1`, `Sq^2`, `Sq^4`, … determines the whole action.
pub fn parse_module(text: &str) -> Result<FdModule, ModuleError> {
    let toks = lex(text)?;
    let lines: Vec<&str> = text.lines().collect();
    let end = (lines.len().max(1), lines.last().map_or(0, |l| l.chars().count()) + 1);
    let mut p = Parser { toks, pos: 0, end };

    let (kw, _) = p.ident("`module`")?;
    if kw != "module" {
        p.pos -= 1;
        return Err(p.error_here("expected `module`"));
    }
    let (name, _) = p.ident("module name")?;
    p.expect(Tok::LBrace, "`{`")?;

    let mut gens: Vec<(String, i32, usize, usize)> = Vec::new();
    let mut actions: Vec<ActionLine> = Vec::new();
    loop {
        let Some(t) = p.peek().cloned() else {
            return Err(p.error_here("unexpected end of input, expected `}`"));
        };
        match &t.tok {
            Tok::RBrace => {
                p.pos += 1;
                break;
            }
            Tok::Ident(kw) if kw == "gen" => {
                p.pos += 1;
                let (label, at) = p.ident("generator name")?;
                p.expect(Tok::Colon, "`:`")?;
                let (deg, deg_at) = p.int("degree")?;
                let deg = i32::try_from(deg).map_err(|_| ModuleError::Parse {
                    line: deg_at.line,
                    column: deg_at.column,
                    message: "degree out of range".into(),
                })?;
                gens.push((label, deg, at.line, at.column));
            }
            Tok::Ident(kw) if kw == "sq" => {
                p.pos += 1;
                let (square, sq_at) = p.int("square index")?;
                if square < 1 || square > i64::from(u16::MAX) {
                    return Err(ModuleError::Parse {
                        line: sq_at.line,
                        column: sq_at.column,
                        message: format!("square index must be positive, got {square}"),
                    });
                }
                let (source, at) = p.ident("generator name")?;
                p.expect(Tok::Eq, "`=`")?;
                let mut targets = Vec::new();
                if matches!(p.peek().map(|t| &t.tok), Some(Tok::Int(0))) {
                    p.pos += 1;
                } else {
                    loop {
                        let (label, lat) = p.ident("generator name or `0`")?;
                        targets.push((label, lat.line, lat.column));
                        if matches!(p.peek().map(|t| &t.tok), Some(Tok::Plus)) {
                            p.pos += 1;
                        } else {
                            break;
                        }
                    }
                }
                actions.push(ActionLine {
                    square: square as u32,
                    source,
                    targets,
                    line: at.line,
                    column: at.column,
                });
            }
            _ => return Err(p.error_here("expected `gen`, `sq` or `}`")),
        }
    }
    if p.pos < p.toks.len() {
        return Err(p.error_here("unexpected input after module"));
    }

    let mut seen = BTreeMap::new();
    for (label, _, line, column) in &gens {
        if seen.insert(label.clone(), ()).is_some() {
            return Err(ModuleError::DuplicateGenerator {
                label: label.clone(),
                line: *line,
                column: *column,
            });
        }
    }
    let mut module = FdModule::new(name, gens.iter().map(|g| (g.0.clone(), g.1)).collect());

    let mut explicit: BTreeMap<(u32, usize), Gf2Vector> = BTreeMap::new();
    for a in &actions {
        let src = module.index_of(&a.source).ok_or_else(|| ModuleError::UnknownGenerator {
            label: a.source.clone(),
            line: a.line,
            column: a.column,
        })?;
        let expected = module.degrees[src] + a.square as i32;
        let mut value = Gf2Vector::zeros(module.dim_in(expected));
        for (label, line, column) in &a.targets {
            let t = module.index_of(label).ok_or_else(|| ModuleError::UnknownGenerator {
                label: label.clone(),
                line: *line,
                column: *column,
            })?;
            if module.degrees[t] != expected {
                return Err(ModuleError::DegreeMismatch {
                    square: a.square,
                    source_label: a.source.clone(),
                    target: label.clone(),
                    expected,
                    found: module.degrees[t],
                    line: *line,
                    column: *column,
                });
            }
            value.flip(module.position[t]);
        }
        if explicit.insert((a.square, src), value).is_some() {
            return Err(ModuleError::DuplicateAction {
                square: a.square,
                label: a.source.clone(),
                line: a.line,
                column: a.column,
            });
        }
    }

    let mut table: BTreeMap<(u32, usize), Gf2Vector> = BTreeMap::new();
    for n in 1..=module.span() {
        for b in 0..module.dimension() {
            let value = match explicit.get(&(n, b)) {
                Some(v) => v.clone(),
                None if n.is_power_of_two() => continue,
                None => derive_square(&module, &table, n, b),
            };
            if !value.is_zero() {
                table.insert((n, b), value);
            }
        }
    }
    module.actions = table;
    Ok(module)
}

#[cfg(test)]
mod tests {
    use super::*;

    const X: &str = "module X { gen x13:13 gen x15:15 gen x16:16 sq 2 x13 = x15 sq 1 x15 = x16 }";
    const Y: &str = "module Y { gen y9:9 gen y13:13 gen y15:15 gen y16:16 sq 4 y9 = y13 sq 2 y13 = y15 sq 1 y15 = y16 }";

    fn labels(m: &FdModule, x: &ModuleElement) -> Vec<String> {
        m.element_labels(x)
    }

    #[test]
    fn parse_x() {
        let x = parse_module(X).unwrap();
        assert_eq!(x.name(), "X");
        assert_eq!(x.dimension(), 3);
        assert_eq!(x.min_degree(), Some(13));
        assert_eq!(x.max_degree(), Some(16));
        let x13 = x.element("x13").unwrap();
        assert_eq!(labels(&x, &x.act_sq(2, &x13)), vec!["x15"]);
        // Sq3 = Sq1 Sq2 is forced.
        assert_eq!(labels(&x, &x.act_sq(3, &x13)), vec!["x16"]);
        assert!(x.act_sq(1, &x13).is_zero());
        assert!(x.validate().is_empty());
    }

    #[test]
    fn parse_sphere_and_y() {
        let s = parse_module("module S { gen x0:0 }").unwrap();
        assert_eq!(s.dimension(), 1);
        assert!(s.validate().is_empty());
        let y = parse_module(Y).unwrap();
        let y9 = y.element("y9").unwrap();
        assert_eq!(labels(&y, &y.act(&SteenrodElement::sq(4), &y9)), vec!["y13"]);
        assert!(y.validate().is_empty());
    }

    #[test]
    fn parse_errors() {
        let err = parse_module("module M { gen a:0 gen a:1 }").unwrap_err();
        assert!(matches!(err, ModuleError::DuplicateGenerator { ref label, line: 1, column: 24 } if label == "a"), "{err:?}");
        let err = parse_module("module M { gen a:0 gen b:3 sq 2 a = b }").unwrap_err();
        assert!(matches!(err, ModuleError::DegreeMismatch { expected: 2, found: 3, .. }), "{err:?}");
        let err = parse_module("module M { gen a:0 sq 1 a = c }").unwrap_err();
        assert!(matches!(err, ModuleError::UnknownGenerator { ref label, .. } if label == "c"));
        let err = parse_module("module M {\n  gen a 0\n}").unwrap_err();
        assert_eq!(
            err,
            ModuleError::Parse {
                line: 2,
                column: 9,
                message: "expected `:`".into()
            }
        );
        let err = parse_module("module M { gen a:0").unwrap_err();
        assert!(matches!(err, ModuleError::Parse { .. }));
        let err = parse_module("module M { gen a:0 gen b:1 sq 1 a = b sq 1 a = 0 }").unwrap_err();
        assert!(matches!(err, ModuleError::DuplicateAction { square: 1, .. }));
        let err = parse_module("module M { gen a:0 sq 0 a = a }").unwrap_err();
        assert!(matches!(err, ModuleError::Parse { .. }));
    }

    #[test]
    fn comments_and_negative_degrees() {
        let m = parse_module("# leading comment\nmodule D { # trailing\n gen u:-3\n gen v:-2 sq 1 u = v }").unwrap();
        assert_eq!(m.min_degree(), Some(-3));
        assert!(!m.act_sq(1, &m.element("u").unwrap()).is_zero());
    }

    #[test]
    fn sq1_sq1_violation() {
        let m = parse_module("module B { gen a:0 gen b:1 gen c:2 sq 1 a = b sq 1 b = c }").unwrap();
        let v = m.validate();
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].a, v[0].b, v[0].generator.as_str()), (1, 1, "a"));
        assert_eq!(v[0].composite, vec!["c"]);
        assert!(v[0].expanded.is_empty());
    }

    #[test]
    fn explicit_override_is_checked() {
        let m = parse_module("module M { gen a:0 gen b:2 gen c:3 sq 2 a = b sq 1 b = c sq 3 a = 0 }").unwrap();
        let v = m.validate();
        assert!(v.iter().any(|v| (v.a, v.b) == (1, 2)), "{v:?}");
    }

    #[test]
    fn act_unit_and_composites() {
        let y = parse_module(Y).unwrap();
        for b in 0..y.dimension() {
            let x = y.basis_element(b);
            assert_eq!(y.act(&SteenrodElement::unit(), &x), x);
        }
        // Sq2 Sq4 = Sq6 + Sq5 Sq1 acting on y9.
        let y9 = y.element("y9").unwrap();
        let sq6 = y.act(&SteenrodElement::sq(6), &y9);
        assert_eq!(labels(&y, &sq6), vec!["y15"]);
    }

    #[test]
    fn tensor_cartan() {
        let x = parse_module(X).unwrap();
        let xx = x.tensor(&x);
        assert_eq!(xx.dimension(), 9);
        assert!(xx.validate().is_empty());
        let v = xx.element("x13*x13").unwrap();
        let mut got = labels(&xx, &xx.act_sq(2, &v));
        got.sort();
        assert_eq!(got, vec!["x13*x15", "x15*x13"]);
        let y = parse_module(Y).unwrap();
        assert_eq!(x.tensor(&y).dimension(), 12);
        let s = parse_module("module S { gen x0:0 }").unwrap();
        assert!(x.tensor(&s).same_structure(&x));
    }

    #[test]
    fn dual_and_suspend() {
        let x = parse_module(X).unwrap();
        let a = x.dual().suspend(16);
        assert!(a.validate().is_empty());
        let mut degs: Vec<_> = (0..3).map(|b| a.degree_of(b)).collect();
        degs.sort();
        assert_eq!(degs, vec![0, 1, 3]);
        let bottom = a.basis_in(0)[0];
        assert_eq!(labels(&a, &a.act_sq(1, &a.basis_element(bottom))), vec!["~x15"]);
        let one = a.basis_in(1)[0];
        assert_eq!(labels(&a, &a.act_sq(2, &a.basis_element(one))), vec!["~x13"]);
        assert!(x.dual().dual().same_structure(&x));

        assert_eq!(x.suspend(0), x);
        let s8 = x.suspend(8);
        assert_eq!((0..3).map(|b| s8.degree_of(b)).collect::<Vec<_>>(), vec![21, 23, 24]);
        assert_eq!(x.suspend(5).suspend(-5), x);
        let s = parse_module("module S { gen x0:0 }").unwrap();
        assert!(s.dual().same_structure(&s));
    }

    #[test]
    fn dsl_round_trip() {
        let x = parse_module(X).unwrap();
        let y = parse_module(Y).unwrap();
        for m in [x.clone(), y.clone(), x.tensor(&y.dual()), x.dual().normalized()] {
            let back = parse_module(&m.to_dsl()).unwrap();
            assert_eq!(back, m, "{}", m.to_dsl());
        }
        let odd = parse_module("module M { gen a:0 gen b:2 gen c:3 sq 2 a = b sq 1 b = c sq 3 a = 0 }").unwrap();
        assert_eq!(parse_module(&odd.to_dsl()).unwrap(), odd);
    }
}

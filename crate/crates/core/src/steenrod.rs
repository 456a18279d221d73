//! The mod 2 Steenrod algebra in the admissible (Serre–Cartan) basis.
//!
//! Products are computed by straightening words with the Adem relations,
//! always rewriting the leftmost inadmissible adjacent pair first. Pair
//! expansions and whole-word reductions are memoized in process-wide tables.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use crate::gf2::Gf2Vector;

/// `binom(n, k) mod 2` by Lucas' theorem.
pub fn binomial_mod2(n: i64, k: i64) -> bool {
    if n < 0 || k < 0 || k > n {
        return false;
    }
    k & !n == 0
}

/// A word `Sq^{i1} … Sq^{ik}` with `i_j >= 2 i_{j+1}`. The empty word is the unit.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdmissibleMonomial(Vec<u32>);

impl AdmissibleMonomial {
    pub fn unit() -> Self {
        AdmissibleMonomial(Vec::new())
    }

    pub fn sq(i: u32) -> Self {
        if i == 0 {
            Self::unit()
        } else {
            AdmissibleMonomial(vec![i])
        }
    }

    /// Returns `None` unless the exponents are positive and admissible.
    pub fn new(exponents: Vec<u32>) -> Option<Self> {
        is_admissible(&exponents).then_some(AdmissibleMonomial(exponents))
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for AdmissibleMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for e in &self.0 {
            write!(f, "Sq{e}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for AdmissibleMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub fn is_admissible(word: &[u32]) -> bool {
    word.iter().all(|&e| e > 0) && word.windows(2).all(|w| w[0] >= 2 * w[1])
}

/// A homogeneous sum of admissible monomials.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SteenrodElement {
    degree: u32,
    terms: BTreeSet<AdmissibleMonomial>,
}

impl SteenrodElement {
    pub fn zero(degree: u32) -> Self {
        SteenrodElement {
            degree,
            terms: BTreeSet::new(),
        }
    }

    pub fn unit() -> Self {
        Self::from_monomial(AdmissibleMonomial::unit())
    }

    pub fn sq(i: u32) -> Self {
        Self::from_monomial(AdmissibleMonomial::sq(i))
    }

    pub fn from_monomial(m: AdmissibleMonomial) -> Self {
        SteenrodElement {
            degree: m.degree(),
            terms: BTreeSet::from([m]),
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &BTreeSet<AdmissibleMonomial> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds a monomial of the same degree (mod 2).
    pub fn toggle(&mut self, m: AdmissibleMonomial) {
        assert_eq!(m.degree(), self.degree, "inhomogeneous sum");
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn add_assign(&mut self, other: &SteenrodElement) {
        if other.is_zero() {
            return;
        }
        if self.is_zero() {
            self.degree = other.degree;
        }
        for m in &other.terms {
            self.toggle(m.clone());
        }
    }
}

impl fmt::Display for SteenrodElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, m) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for SteenrodElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// All admissible monomials of degree `t`, in lexicographic order.
pub fn admissible_basis(t: u32) -> Vec<AdmissibleMonomial> {
    fn extend(remaining: u32, cap: u32, prefix: &mut Vec<u32>, out: &mut Vec<AdmissibleMonomial>) {
        if remaining == 0 {
            out.push(AdmissibleMonomial(prefix.clone()));
            return;
        }
        // The tail after a leading `i` has degree at most i - 1, so i > remaining / 2.
        for i in (remaining.div_ceil(2))..=remaining.min(cap) {
            let rest = remaining - i;
            if rest > 0 && rest >= i {
                continue;
            }
            prefix.push(i);
            extend(rest, i / 2, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(t, t, &mut Vec::new(), &mut out);
    out.sort();
    out
}

type PairExpansion = Arc<Vec<(u32, u32)>>;

fn pair_memo() -> &'static RwLock<HashMap<(u32, u32), PairExpansion>> {
    static MEMO: OnceLock<RwLock<HashMap<(u32, u32), PairExpansion>>> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

fn word_memo() -> &'static RwLock<HashMap<Vec<u32>, SteenrodElement>> {
    static MEMO: OnceLock<RwLock<HashMap<Vec<u32>, SteenrodElement>>> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

/// The Adem relation for `a < 2b`: the list of `(a + b - c, c)` with odd
/// coefficient `binom(b - c - 1, a - 2c)`.
pub fn adem_pair(a: u32, b: u32) -> PairExpansion {
    debug_assert!(a < 2 * b);
    if let Some(hit) = pair_memo().read().expect("memo poisoned").get(&(a, b)) {
        return Arc::clone(hit);
    }
    let terms: Vec<(u32, u32)> = (0..=a / 2)
        .filter(|&c| binomial_mod2(i64::from(b) - i64::from(c) - 1, i64::from(a) - 2 * i64::from(c)))
        .map(|c| (a + b - c, c))
        .collect();
    let terms = Arc::new(terms);
    pair_memo()
        .write()
        .expect("memo poisoned")
        .insert((a, b), Arc::clone(&terms));
    terms
}

fn leftmost_inadmissible(word: &[u32]) -> Option<usize> {
    word.windows(2).position(|w| w[0] < 2 * w[1])
}

/// Straightens a product of squares into the admissible basis.
///
/// Zero exponents are treated as `Sq^0 = 1`.
pub fn adem_reduce(word: &[u32]) -> SteenrodElement {
    let word: Vec<u32> = word.iter().copied().filter(|&e| e > 0).collect();
    let degree = word.iter().sum();
    if is_admissible(&word) {
        return SteenrodElement::from_monomial(AdmissibleMonomial(word));
    }
    if let Some(hit) = word_memo().read().expect("memo poisoned").get(&word) {
        return hit.clone();
    }

    let mut result = SteenrodElement::zero(degree);
    let mut pending: BTreeSet<Vec<u32>> = BTreeSet::from([word.clone()]);
    while let Some(w) = pending.pop_first() {
        let Some(p) = leftmost_inadmissible(&w) else {
            result.toggle(AdmissibleMonomial(w));
            continue;
        };
        for &(x, c) in adem_pair(w[p], w[p + 1]).iter() {
            let mut next = Vec::with_capacity(w.len());
            next.extend_from_slice(&w[..p]);
            next.push(x);
            if c > 0 {
                next.push(c);
            }
            next.extend_from_slice(&w[p + 2..]);
            if !pending.remove(&next) {
                pending.insert(next);
            }
        }
    }
    word_memo()
        .write()
        .expect("memo poisoned")
        .insert(word, result.clone());
    result
}

/// Product in the Steenrod algebra.
pub fn multiply(a: &SteenrodElement, b: &SteenrodElement) -> SteenrodElement {
    let mut out = SteenrodElement::zero(a.degree + b.degree);
    for x in &a.terms {
        for y in &b.terms {
            let mut word = x.0.clone();
            word.extend_from_slice(&y.0);
            out.add_assign(&adem_reduce(&word));
        }
    }
    out
}

/// The canonical antipode `χ(Sq^n)`, from `Σ_i Sq^i χ(Sq^{n-i}) = 0`.
pub fn antipode(n: u32) -> SteenrodElement {
    static MEMO: OnceLock<Mutex<Vec<SteenrodElement>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(vec![SteenrodElement::unit()]));
    let mut known = memo.lock().expect("memo poisoned");
    while known.len() <= n as usize {
        let k = known.len() as u32;
        let mut next = SteenrodElement::zero(k);
        for i in 1..=k {
            next.add_assign(&multiply(&SteenrodElement::sq(i), &known[(k - i) as usize]));
        }
        known.push(next);
    }
    known[n as usize].clone()
}

/// Multiplication tables `Sq^i · m` for admissible `m`, through a degree bound.
///
/// This is what the resolver runs on: the basis of each degree is indexed,
/// and left multiplication by a single square is a lookup.
pub struct AlgebraTables {
    max_degree: u32,
    bases: Vec<Vec<AdmissibleMonomial>>,
    index: Vec<HashMap<AdmissibleMonomial, usize>>,
    /// `sq[d][i - 1][k]` is `Sq^i` times basis element `k` of degree `d`.
    sq: Vec<Vec<Vec<Gf2Vector>>>,
    /// For basis element `k` of degree `d > 0`: its leading square and the
    /// index of the (admissible) remaining word in degree `d - i`.
    tails: Vec<Vec<(u32, usize)>>,
}

impl std::fmt::Debug for AlgebraTables {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AlgebraTables").field("max_degree", &self.max_degree).finish_non_exhaustive()
    }
}

impl AlgebraTables {
    pub fn new(max_degree: u32) -> Self {
        let bases: Vec<_> = (0..=max_degree).map(admissible_basis).collect();
        let index: Vec<HashMap<_, _>> = bases
            .iter()
            .map(|b| b.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect())
            .collect();
        let mut tables = AlgebraTables {
            max_degree,
            bases,
            index,
            sq: Vec::new(),
            tails: Vec::new(),
        };
        tables.tails = (0..=max_degree)
            .map(|d| {
                tables.bases[d as usize]
                    .iter()
                    .map(|m| match m.exponents().split_first() {
                        None => (0, 0),
                        Some((&i, rest)) => {
                            let rest = AdmissibleMonomial(rest.to_vec());
                            (i, tables.index[(d - i) as usize][&rest])
                        }
                    })
                    .collect()
            })
            .collect();
        let sq = (0..=max_degree)
            .map(|d| {
                (1..=max_degree - d)
                    .map(|i| {
                        tables.bases[d as usize]
                            .iter()
                            .map(|m| {
                                let mut word = vec![i];
                                word.extend_from_slice(m.exponents());
                                tables.to_vector(&adem_reduce(&word))
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        tables.sq = sq;
        tables
    }

    /// Shared tables covering at least `max_degree`.
    pub fn shared(max_degree: u32) -> Arc<AlgebraTables> {
        static CACHE: OnceLock<Mutex<Option<Arc<AlgebraTables>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(None));
        let mut slot = cache.lock().expect("table cache poisoned");
        match slot.as_ref() {
            Some(t) if t.max_degree >= max_degree => Arc::clone(t),
            _ => {
                let t = Arc::new(AlgebraTables::new(max_degree));
                *slot = Some(Arc::clone(&t));
                t
            }
        }
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn dim(&self, degree: u32) -> usize {
        self.bases[degree as usize].len()
    }

    pub fn basis(&self, degree: u32) -> &[AdmissibleMonomial] {
        &self.bases[degree as usize]
    }

    pub fn index_of(&self, m: &AdmissibleMonomial) -> Option<usize> {
        self.index.get(m.degree() as usize)?.get(m).copied()
    }

    pub fn to_vector(&self, x: &SteenrodElement) -> Gf2Vector {
        let d = x.degree();
        let mut v = Gf2Vector::zeros(self.dim(d));
        for m in x.terms() {
            v.flip(self.index[d as usize][m]);
        }
        v
    }

    pub fn to_element(&self, degree: u32, v: &Gf2Vector) -> SteenrodElement {
        let mut x = SteenrodElement::zero(degree);
        for k in v.ones() {
            x.toggle(self.bases[degree as usize][k].clone());
        }
        x
    }

    /// Leading square and tail index of basis element `k` of degree `d`;
    /// `(0, 0)` for the unit.
    pub fn tail(&self, d: u32, k: usize) -> (u32, usize) {
        self.tails[d as usize][k]
    }

    /// `Sq^i` times basis element `k` of degree `d`, as a vector in degree `d + i`.
    pub fn sq_times(&self, i: u32, d: u32, k: usize) -> &Gf2Vector {
        &self.sq[d as usize][(i - 1) as usize][k]
    }
}

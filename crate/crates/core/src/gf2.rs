//! Dense, bit-packed linear algebra over the two-element field.
//!
//! Vectors and matrix rows are stored as `u64` words; row operations are
//! word-wise XOR. Every routine uses the same pivot rule (leftmost column,
//! topmost nonzero row), so results are bit-identical across runs.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subspace is not contained in the ambient span (vector {index})")]
    NotASubspace { index: usize },
}

const WORD: usize = 64;

fn word_count(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A vector over GF(2) of fixed length.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf2Vector {
    words: Vec<u64>,
    len: usize,
}

impl Gf2Vector {
    pub fn zeros(len: usize) -> Self {
        Gf2Vector {
            words: vec![0; word_count(len)],
            len,
        }
    }

    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector from 0/1 entries; any odd value counts as 1.
    pub fn from_u8s(entries: &[u8]) -> Self {
        Self::from_bits(entries.iter().map(|&x| x & 1 == 1))
    }

    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in indices {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    /// `self += other`.
    pub fn add_assign(&mut self, other: &Gf2Vector) {
        assert_eq!(self.len, other.len, "vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Adds `other` into the bits `offset..offset + other.len()`.
    pub fn add_at(&mut self, offset: usize, other: &Gf2Vector) {
        assert!(offset + other.len <= self.len, "block out of range");
        if offset.is_multiple_of(WORD) {
            let start = offset / WORD;
            for (i, w) in other.words.iter().enumerate() {
                self.words[start + i] ^= w;
            }
        } else {
            for i in other.ones() {
                self.flip(offset + i);
            }
        }
    }

    /// Copies out bits `offset..offset + len`.
    pub fn slice(&self, offset: usize, len: usize) -> Gf2Vector {
        assert!(offset + len <= self.len, "slice out of range");
        let mut out = Gf2Vector::zeros(len);
        for i in self.ones_in(offset, offset + len) {
            out.set(i - offset, true);
        }
        out
    }

    pub fn dot(&self, other: &Gf2Vector) -> bool {
        assert_eq!(self.len, other.len, "vector length mismatch");
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() % 2 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set bit at or after `from`.
    pub fn next_one(&self, from: usize) -> Option<usize> {
        if from >= self.len {
            return None;
        }
        let mut wi = from / WORD;
        let mut w = self.words[wi] & (!0u64 << (from % WORD));
        loop {
            if w != 0 {
                let i = wi * WORD + w.trailing_zeros() as usize;
                return (i < self.len).then_some(i);
            }
            wi += 1;
            if wi >= self.words.len() {
                return None;
            }
            w = self.words[wi];
        }
    }

    pub fn first_one(&self) -> Option<usize> {
        self.next_one(0)
    }

    /// Indices of the set bits, ascending.
    pub fn ones(&self) -> Ones<'_> {
        self.ones_in(0, self.len)
    }

    fn ones_in(&self, start: usize, end: usize) -> Ones<'_> {
        Ones {
            v: self,
            pos: start,
            end,
        }
    }

    /// Appends the bits of `other` after the bits of `self`.
    pub fn concat(&self, other: &Gf2Vector) -> Gf2Vector {
        let mut out = Gf2Vector::zeros(self.len + other.len);
        out.add_at(0, self);
        out.add_at(self.len, other);
        out
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Debug for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, "]")
    }
}

pub struct Ones<'a> {
    v: &'a Gf2Vector,
    pos: usize,
    end: usize,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        let i = self.v.next_one(self.pos)?;
        if i >= self.end {
            self.pos = self.end;
            return None;
        }
        self.pos = i + 1;
        Some(i)
    }
}

/// A `rows × cols` matrix over GF(2), stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    rows: Vec<Gf2Vector>,
    cols: usize,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Gf2Matrix {
            rows: vec![Gf2Vector::zeros(cols); rows],
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        Gf2Matrix {
            rows: (0..n).map(|i| Gf2Vector::unit(n, i)).collect(),
            cols: n,
        }
    }

    /// Builds a matrix from rows that all have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<Gf2Vector>) -> Result<Self, Gf2Error> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Gf2Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(Gf2Matrix { rows, cols })
    }

    /// Convenience constructor from nested 0/1 rows. Panics on ragged input.
    pub fn from_u8_rows(rows: &[&[u8]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows.iter().map(|r| Gf2Vector::from_u8s(r)).collect();
        Self::from_rows(cols, rows).expect("ragged matrix literal")
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &Gf2Vector {
        &self.rows[i]
    }

    pub fn row_vectors(&self) -> &[Gf2Vector] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Gf2Vector> {
        self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value)
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut out = Gf2Matrix::zeros(self.cols, self.rows());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones() {
                out.rows[c].set(r, true);
            }
        }
        out
    }

    /// `self · v` for a column vector `v`.
    pub fn mul_vec(&self, v: &Gf2Vector) -> Result<Gf2Vector, Gf2Error> {
        if v.len() != self.cols {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(Gf2Vector::from_bits(self.rows.iter().map(|r| r.dot(v))))
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Gf2Matrix) -> Result<Gf2Matrix, Gf2Error> {
        if self.cols != other.rows() {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc = Gf2Vector::zeros(other.cols);
                for k in r.ones() {
                    acc.add_assign(&other.rows[k]);
                }
                acc
            })
            .collect();
        Ok(Gf2Matrix {
            rows,
            cols: other.cols,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Gf2Vector::is_zero)
    }

    /// Reduced row-echelon form and the (strictly increasing) pivot columns.
    pub fn rref(&self) -> (Gf2Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next_row = 0;
        for col in 0..self.cols {
            if next_row == self.rows.len() {
                break;
            }
            let Some(found) = (next_row..self.rows.len()).find(|&r| self.rows[r].get(col)) else {
                continue;
            };
            self.rows.swap(next_row, found);
            let (head, tail) = self.rows.split_at_mut(next_row);
            let (pivot, rest) = tail.split_first_mut().expect("pivot row exists");
            for row in head.iter_mut().chain(rest.iter_mut()) {
                if row.get(col) {
                    row.add_assign(pivot);
                }
            }
            pivots.push(col);
            next_row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::new(self.cols);
        for r in &self.rows {
            e.insert(r.clone());
        }
        e.rank()
    }

    /// Basis of `{v : self · v = 0}`, one vector per free column of the
    /// rref, in increasing column order.
    pub fn kernel_basis(&self) -> Vec<Gf2Vector> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = Gf2Vector::unit(self.cols, free);
                for (i, &p) in pivots.iter().enumerate() {
                    if r.rows[i].get(free) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    /// A solution of `self · v = b` with all free variables zero, or `None`.
    pub fn solve(&self, b: &Gf2Vector) -> Result<Option<Gf2Vector>, Gf2Error> {
        if b.len() != self.rows() {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.rows(),
                found: b.len(),
            });
        }
        let augmented = Gf2Matrix {
            rows: self
                .rows
                .iter()
                .enumerate()
                .map(|(i, r)| r.concat(&Gf2Vector::from_bits([b.get(i)])))
                .collect(),
            cols: self.cols + 1,
        };
        let (r, pivots) = augmented.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut v = Gf2Vector::zeros(self.cols);
        for (i, &p) in pivots.iter().enumerate() {
            if r.rows[i].get(self.cols) {
                v.set(p, true);
            }
        }
        Ok(Some(v))
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}", self.rows(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r:?}")?;
        }
        Ok(())
    }
}

/// Incrementally built echelon basis of a subspace.
///
/// Each stored vector's lowest set bit is its pivot, and pivots are distinct,
/// so reduction can sweep pivots left to right.
#[derive(Clone, Debug)]
pub struct Echelon {
    len: usize,
    basis: Vec<Gf2Vector>,
    pivot_slot: Vec<Option<usize>>,
}

impl Echelon {
    pub fn new(len: usize) -> Self {
        Echelon {
            len,
            basis: Vec::new(),
            pivot_slot: vec![None; len],
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Reduces `v` against the basis; the result is zero iff `v` is in the span.
    pub fn reduce(&self, v: &mut Gf2Vector) {
        assert_eq!(v.len(), self.len, "vector length mismatch");
        let mut pos = 0;
        while let Some(i) = v.next_one(pos) {
            if let Some(slot) = self.pivot_slot[i] {
                v.add_assign(&self.basis[slot]);
            }
            pos = i + 1;
        }
    }

    pub fn contains(&self, v: &Gf2Vector) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_zero()
    }

    /// Adds `v` to the span. Returns `true` if the rank grew.
    pub fn insert(&mut self, mut v: Gf2Vector) -> bool {
        self.reduce(&mut v);
        match v.first_one() {
            None => false,
            Some(p) => {
                self.pivot_slot[p] = Some(self.basis.len());
                self.basis.push(v);
                true
            }
        }
    }
}

/// Vectors drawn from `ambient` whose classes form a basis of
/// `span(ambient) / span(sub)`.
///
/// Ambient vectors are scanned in order and kept when they are independent
/// of `sub` and of the vectors already kept.
pub fn quotient_lift(ambient: &[Gf2Vector], sub: &[Gf2Vector]) -> Result<Vec<Gf2Vector>, Gf2Error> {
    let Some(len) = ambient.first().or(sub.first()).map(Gf2Vector::len) else {
        return Ok(Vec::new());
    };
    if let Some(bad) = ambient.iter().chain(sub).find(|v| v.len() != len) {
        return Err(Gf2Error::DimensionMismatch {
            expected: len,
            found: bad.len(),
        });
    }
    let mut span = Echelon::new(len);
    for v in ambient {
        span.insert(v.clone());
    }
    if let Some(index) = sub.iter().position(|v| !span.contains(v)) {
        return Err(Gf2Error::NotASubspace { index });
    }
    let mut acc = Echelon::new(len);
    for v in sub {
        acc.insert(v.clone());
    }
    Ok(ambient
        .iter()
        .filter(|v| acc.insert((*v).clone()))
        .cloned()
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[u8]]) -> Gf2Matrix {
        Gf2Matrix::from_u8_rows(rows)
    }

    fn v(bits: &[u8]) -> Gf2Vector {
        Gf2Vector::from_u8s(bits)
    }

    #[test]
    fn rref_examples() {
        let (r, p) = m(&[&[1, 1], &[1, 1]]).rref();
        assert_eq!(r, m(&[&[1, 1], &[0, 0]]));
        assert_eq!(p, vec![0]);

        let (r, p) = Gf2Matrix::identity(3).rref();
        assert_eq!(r, Gf2Matrix::identity(3));
        assert_eq!(p, vec![0, 1, 2]);

        let (r, p) = m(&[&[0, 1, 1], &[1, 1, 0]]).rref();
        assert_eq!(r, m(&[&[1, 0, 1], &[0, 1, 1]]));
        assert_eq!(p, vec![0, 1]);
    }

    #[test]
    fn kernel_examples() {
        let k = Gf2Matrix::zeros(2, 3).kernel_basis();
        assert_eq!(k, vec![v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])]);
        assert!(Gf2Matrix::identity(4).kernel_basis().is_empty());
        assert_eq!(m(&[&[1, 1, 0], &[0, 1, 1]]).kernel_basis(), vec![v(&[1, 1, 1])]);
    }

    #[test]
    fn solve_examples() {
        let id = Gf2Matrix::identity(2);
        assert_eq!(id.solve(&v(&[1, 0])).unwrap(), Some(v(&[1, 0])));
        assert_eq!(m(&[&[1, 1]]).solve(&v(&[0])).unwrap(), Some(v(&[0, 0])));
        assert_eq!(m(&[&[1, 1], &[1, 1]]).solve(&v(&[1, 0])).unwrap(), None);
        assert!(matches!(
            id.solve(&v(&[1, 0, 0])),
            Err(Gf2Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn quotient_lift_examples() {
        let e0 = v(&[1, 0]);
        let e1 = v(&[0, 1]);
        let both = v(&[1, 1]);
        assert_eq!(quotient_lift(&[e0.clone(), e1.clone()], &[]).unwrap(), vec![e0.clone(), e1.clone()]);
        assert!(quotient_lift(&[e0.clone(), e1.clone()], &[e0.clone(), e1.clone()])
            .unwrap()
            .is_empty());
        let lifted = quotient_lift(&[e0.clone(), e1.clone(), both], std::slice::from_ref(&e0)).unwrap();
        assert_eq!(lifted, vec![e1.clone()]);
        assert_eq!(
            quotient_lift(std::slice::from_ref(&e0), &[e1]),
            Err(Gf2Error::NotASubspace { index: 0 })
        );
    }

    #[test]
    fn bits_across_word_boundaries() {
        let mut a = Gf2Vector::zeros(130);
        a.set(0, true);
        a.set(63, true);
        a.set(64, true);
        a.set(129, true);
        assert_eq!(a.ones().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        let s = a.slice(63, 3);
        assert_eq!(s, v(&[1, 1, 0]));
        let mut b = Gf2Vector::zeros(130);
        b.add_at(62, &s);
        assert_eq!(b.ones().collect::<Vec<_>>(), vec![62, 63]);
    }

    fn arb_matrix() -> impl Strategy<Value = Gf2Matrix> {
        (0usize..9, 0usize..9).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), c), r).prop_map(
                move |rows| {
                    Gf2Matrix::from_rows(c, rows.into_iter().map(Gf2Vector::from_bits).collect())
                        .unwrap()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn rref_is_idempotent(a in arb_matrix()) {
            let (r, p) = a.rref();
            let (rr, pp) = r.rref();
            prop_assert_eq!(&r, &rr);
            prop_assert_eq!(&p, &pp);
            prop_assert!(p.windows(2).all(|w| w[0] < w[1]));
        }

        #[test]
        fn rank_nullity(a in arb_matrix()) {
            let k = a.kernel_basis();
            prop_assert_eq!(a.rank() + k.len(), a.cols());
            for x in &k {
                prop_assert!(a.mul_vec(x).unwrap().is_zero());
            }
        }

        #[test]
        fn solve_is_sound(a in arb_matrix(), seed in any::<u64>()) {
            let b = Gf2Vector::from_bits((0..a.rows()).map(|i| (seed >> (i % 64)) & 1 == 1));
            let mut aug_rows = Vec::new();
            for i in 0..a.rows() {
                aug_rows.push(a.row(i).concat(&Gf2Vector::from_bits([b.get(i)])));
            }
            let aug = Gf2Matrix::from_rows(a.cols() + 1, aug_rows).unwrap();
            match a.solve(&b).unwrap() {
                Some(x) => {
                    prop_assert_eq!(a.mul_vec(&x).unwrap(), b);
                    prop_assert_eq!(aug.rank(), a.rank());
                }
                None => prop_assert!(aug.rank() > a.rank()),
            }
        }

        #[test]
        fn quotient_lift_dimension(a in arb_matrix(), keep in 0usize..9) {
            let ambient = a.row_vectors().to_vec();
            let sub: Vec<_> = ambient.iter().take(keep).cloned().collect();
            if ambient.is_empty() { return Ok(()); }
            let lifted = quotient_lift(&ambient, &sub).unwrap();
            let sub_rank = Gf2Matrix::from_rows(a.cols(), sub.clone()).unwrap().rank();
            prop_assert_eq!(lifted.len() + sub_rank, a.rank());
            let mut all = sub.clone();
            all.extend(lifted);
            prop_assert_eq!(Gf2Matrix::from_rows(a.cols(), all).unwrap().rank(), a.rank());
        }

        #[test]
        fn deterministic(a in arb_matrix()) {
            prop_assert_eq!(a.rref(), a.clone().rref());
            prop_assert_eq!(a.kernel_basis(), a.clone().kernel_basis());
        }
    }
}

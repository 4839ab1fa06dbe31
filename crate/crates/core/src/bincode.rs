//! GF(2) linear algebra on word-packed bit vectors.
//!
//! Codes are stored by a basis in reduced row-echelon form (pivot = leftmost
//! one, pivots strictly increasing), so two codes are equal exactly when their
//! bases are identical. Index 0 of a [`BitVector`] is the leftmost character of
//! its text form.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// A vector in GF(2)^n. Bits past `len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    #[must_use]
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(WORD)],
            len,
        }
    }

    #[must_use]
    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for w in &mut v.words {
            *w = u64::MAX;
        }
        v.clear_tail();
        v
    }

    /// The vector with a single one at `index`.
    #[must_use]
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    #[must_use]
    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector from the low `len` bits of `bits`, bit `i` of the integer
    /// becoming index `i`.
    #[must_use]
    pub fn from_u64(len: usize, bits: u64) -> Self {
        assert!(len <= WORD);
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = bits;
            v.clear_tail();
        }
        v
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.len
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[must_use]
    pub fn get(&self, index: usize) -> bool {
        debug_assert!(index < self.len);
        (self.words[index / WORD] >> (index % WORD)) & 1 == 1
    }

    pub fn set(&mut self, index: usize, value: bool) {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        let mask = 1u64 << (index % WORD);
        if value {
            self.words[index / WORD] |= mask;
        } else {
            self.words[index / WORD] &= !mask;
        }
    }

    #[must_use]
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the leftmost one.
    #[must_use]
    pub fn leading_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            core::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let t = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(i * WORD + t)
                }
            })
        })
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len == other.len {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: self.len,
                found: other.len,
            })
        }
    }

    /// In-place GF(2) addition. Lengths must agree.
    pub fn xor_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn and_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    #[must_use]
    pub fn xor(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// GF(2) inner product.
    #[must_use]
    pub fn dot(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            & 1
            == 1
    }

    /// Number of positions where both vectors are one.
    #[must_use]
    pub fn overlap(&self, other: &Self) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

/// Componentwise product `(u*v)_i = u_i v_i`.
pub fn star(u: &BitVector, v: &BitVector) -> Result<BitVector> {
    u.check_len(v)?;
    let mut out = u.clone();
    out.and_assign(v);
    Ok(out)
}

impl Ord for BitVector {
    /// Length first, then lexicographic with index 0 most significant.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| {
            for (a, b) in self.words.iter().zip(&other.words) {
                if a != b {
                    return a.reverse_bits().cmp(&b.reverse_bits());
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for BitVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut v = Self::zeros(s.len());
        for (i, c) in s.bytes().enumerate() {
            match c {
                b'0' => {}
                b'1' => v.set(i, true),
                _ => {
                    return Err(Error::Parse(alloc::format!(
                        "invalid character {:?} at position {i} in bitstring",
                        c as char
                    )))
                }
            }
        }
        Ok(v)
    }
}

/// Row-reduces `rows` in place to RREF and drops zero rows.
fn rref_in_place(rows: &mut Vec<BitVector>) {
    let mut rank = 0;
    let n = rows.first().map_or(0, BitVector::len);
    for col in 0..n {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
}

/// A binary linear code held by its canonical RREF basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BinaryCode {
    n: usize,
    basis: Vec<BitVector>,
    pivots: Vec<usize>,
}

impl BinaryCode {
    /// The span of `rows`, canonicalized.
    pub fn from_rows(n: usize, rows: impl IntoIterator<Item = BitVector>) -> Result<Self> {
        let mut basis = Vec::new();
        for r in rows {
            if r.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
            basis.push(r);
        }
        rref_in_place(&mut basis);
        let pivots = basis
            .iter()
            .map(|r| r.leading_one().expect("rref rows are nonzero"))
            .collect();
        Ok(Self { n, basis, pivots })
    }

    #[must_use]
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    #[must_use]
    pub fn full(n: usize) -> Self {
        let basis: Vec<_> = (0..n).map(|i| BitVector::unit(n, i)).collect();
        Self {
            n,
            pivots: (0..n).collect(),
            basis,
        }
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.n
    }

    #[must_use]
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    #[must_use]
    pub fn basis(&self) -> &[BitVector] {
        &self.basis
    }

    #[must_use]
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Remainder of `v` after clearing every pivot column of the basis.
    #[must_use]
    pub fn reduce(&self, v: &BitVector) -> BitVector {
        let mut r = v.clone();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if r.get(p) {
                r.xor_assign(row);
            }
        }
        r
    }

    #[must_use]
    pub fn contains(&self, v: &BitVector) -> bool {
        v.len() == self.n && self.reduce(v).is_zero()
    }

    #[must_use]
    pub fn is_subcode_of(&self, other: &Self) -> bool {
        self.n == other.n && self.basis.iter().all(|r| other.contains(r))
    }

    /// The dual code `C^perp`, of dimension `n - k`.
    #[must_use]
    pub fn dual(&self) -> Self {
        let mut is_pivot = vec![false; self.n];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let rows = (0..self.n).filter(|&f| !is_pivot[f]).map(|f| {
            let mut v = BitVector::unit(self.n, f);
            for (row, &p) in self.basis.iter().zip(&self.pivots) {
                if row.get(f) {
                    v.set(p, true);
                }
            }
            v
        });
        Self::from_rows(self.n, rows).expect("lengths agree")
    }

    /// `C^r`, the span of all r-fold star products of codewords.
    pub fn schur_power(&self, r: usize) -> Self {
        assert!(r >= 1, "schur power needs r >= 1");
        let mut current = self.clone();
        for _ in 1..r {
            let mut rows = current.basis.clone();
            for a in &current.basis {
                for b in &self.basis {
                    let mut p = a.clone();
                    p.and_assign(b);
                    rows.push(p);
                }
            }
            let next = Self::from_rows(self.n, rows).expect("lengths agree");
            if next == current {
                break;
            }
            current = next;
        }
        current
    }

    /// Iterates every codeword in Gray-code order, starting from zero.
    pub fn codewords(&self) -> Codewords<'_> {
        Codewords {
            basis: &self.basis,
            current: BitVector::zeros(self.n),
            counter: 0,
            total: 1u64 << self.basis.len(),
        }
    }
}

impl fmt::Display for BinaryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]{{", self.n, self.dim())?;
        for (i, r) in self.basis.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("}")
    }
}

/// Gray-code walk over all `2^k` codewords.
pub struct Codewords<'a> {
    basis: &'a [BitVector],
    current: BitVector,
    counter: u64,
    total: u64,
}

impl Iterator for Codewords<'_> {
    type Item = BitVector;

    fn next(&mut self) -> Option<BitVector> {
        if self.counter >= self.total {
            return None;
        }
        if self.counter > 0 {
            let flip = self.counter.trailing_zeros() as usize;
            self.current.xor_assign(&self.basis[flip]);
        }
        self.counter += 1;
        Some(self.current.clone())
    }
}

/// Canonical basis of the span of `rows`.
pub fn rref_basis(rows: &[BitVector]) -> Result<BinaryCode> {
    let n = rows.first().map_or(0, BitVector::len);
    BinaryCode::from_rows(n, rows.iter().cloned())
}

/// `A^(r)`: star products of `r` distinct members of `basis`, deduplicated,
/// in lexicographic order of index subsets. `A^(0)` is the all-ones vector.
#[must_use]
pub fn star_family(basis: &[BitVector], n: usize, r: usize) -> Vec<BitVector> {
    if r == 0 {
        return vec![BitVector::ones(n)];
    }
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for_each_subset_product(basis, n, r, |_, p| {
        if seen.insert(p.clone()) {
            out.push(p.clone());
        }
    });
    out
}

/// Calls `f(indices, product)` for every r-subset of `basis` in lexicographic
/// order, where `product` is the star product of the chosen vectors.
pub fn for_each_subset_product<F>(basis: &[BitVector], n: usize, r: usize, mut f: F)
where
    F: FnMut(&[usize], &BitVector),
{
    if r > basis.len() {
        return;
    }
    let mut idx = Vec::with_capacity(r);
    let mut prods = Vec::with_capacity(r + 1);
    prods.push(BitVector::ones(n));
    subset_dfs(basis, r, 0, &mut idx, &mut prods, &mut f);
}

fn subset_dfs<F>(
    basis: &[BitVector],
    r: usize,
    start: usize,
    idx: &mut Vec<usize>,
    prods: &mut Vec<BitVector>,
    f: &mut F,
) where
    F: FnMut(&[usize], &BitVector),
{
    if idx.len() == r {
        f(idx, prods.last().expect("nonempty"));
        return;
    }
    let remaining = r - idx.len();
    for i in start..=basis.len() - remaining {
        let mut p = prods.last().expect("nonempty").clone();
        p.and_assign(&basis[i]);
        idx.push(i);
        prods.push(p);
        subset_dfs(basis, r, i + 1, idx, prods, f);
        prods.pop();
        idx.pop();
    }
}

/// Nested codes `C2 <= C1` with bases `beta2` of `C2` and `extension`
/// completing it to a basis of `C1`. The extension rows are the coset
/// representatives `w_1..w_K` of the logical encoding.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NestedCodePair {
    c1: BinaryCode,
    c2: BinaryCode,
    beta2: Vec<BitVector>,
    extension: Vec<BitVector>,
}

impl NestedCodePair {
    /// Canonical alignment: `beta2` is the RREF basis of `C2`, the extension is
    /// the RREF of the remainders of `C1`'s basis modulo `C2`.
    pub fn aligned(c1: &BinaryCode, c2: &BinaryCode) -> Result<Self> {
        if c1.len() != c2.len() {
            return Err(Error::LengthMismatch {
                expected: c1.len(),
                found: c2.len(),
            });
        }
        if !c2.is_subcode_of(c1) {
            return Err(Error::NotNested);
        }
        let remainders = c1.basis().iter().map(|r| c2.reduce(r));
        let ext = BinaryCode::from_rows(c1.len(), remainders)?;
        Ok(Self {
            c1: c1.clone(),
            c2: c2.clone(),
            beta2: c2.basis().to_vec(),
            extension: ext.basis,
        })
    }

    /// Uses the given bases verbatim. `beta2 ++ extension` must be linearly
    /// independent.
    pub fn from_bases(n: usize, beta2: Vec<BitVector>, extension: Vec<BitVector>) -> Result<Self> {
        for v in beta2.iter().chain(&extension) {
            if v.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        let c2 = BinaryCode::from_rows(n, beta2.iter().cloned())?;
        let c1 = BinaryCode::from_rows(n, beta2.iter().chain(&extension).cloned())?;
        if c1.dim() != beta2.len() + extension.len() {
            return Err(Error::DependentBasis);
        }
        Ok(Self {
            c1,
            c2,
            beta2,
            extension,
        })
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.c1.len()
    }

    #[must_use]
    pub fn c1(&self) -> &BinaryCode {
        &self.c1
    }

    #[must_use]
    pub fn c2(&self) -> &BinaryCode {
        &self.c2
    }

    #[must_use]
    pub fn beta2(&self) -> &[BitVector] {
        &self.beta2
    }

    /// The coset representatives `w_1..w_K`.
    #[must_use]
    pub fn extension(&self) -> &[BitVector] {
        &self.extension
    }

    /// `beta1 = beta2 ++ extension`.
    #[must_use]
    pub fn beta1(&self) -> Vec<BitVector> {
        self.beta2.iter().chain(&self.extension).cloned().collect()
    }

    /// Number of logical qubits `K = dim C1 - dim C2`.
    #[must_use]
    pub fn logical_count(&self) -> usize {
        self.extension.len()
    }

    /// `Bv`: the mod-2 combination of the representatives selected by `v`.
    #[must_use]
    pub fn encode(&self, v: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.len());
        for i in v.ones_iter() {
            out.xor_assign(&self.extension[i]);
        }
        out
    }
}

/// Rank of a list of GF(2) vectors.
#[must_use]
pub fn rank(rows: &[BitVector]) -> usize {
    let mut r = rows.to_vec();
    rref_in_place(&mut r);
    r.len()
}

/// Formats a basis as comma-separated bitstrings.
#[must_use]
pub fn format_rows(rows: &[BitVector]) -> String {
    use core::fmt::Write;
    let mut s = String::new();
    for (i, r) in rows.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{r}");
    }
    s
}

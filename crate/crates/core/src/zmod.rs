//! Submodules of `Z_N^n` for `N = 2^l`, held in Howell normal form.
//!
//! A Howell basis has one row per pivot column, pivots are powers of two,
//! entries above a pivot are reduced modulo it, and every row multiple that
//! vanishes on the pivot column is generated by the rows below. That last
//! property makes membership a single top-down reduction and makes the basis
//! unique, so module equality is generator-list equality.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bincode::BitVector;
use crate::error::{Error, Result};

pub const MAX_LEVEL: u32 = 30;

pub fn check_level(ell: u32) -> Result<()> {
    if (1..=MAX_LEVEL).contains(&ell) {
        Ok(())
    } else {
        Err(Error::LevelOutOfRange(ell))
    }
}

#[inline]
fn mask(ell: u32) -> u64 {
    (1u64 << ell) - 1
}

/// Inverse of an odd `u` modulo 2^64.
fn odd_inverse(u: u64) -> u64 {
    debug_assert!(u & 1 == 1);
    // Newton: each step doubles the number of correct low bits
    let mut x = u;
    for _ in 0..6 {
        x = x.wrapping_mul(2u64.wrapping_sub(u.wrapping_mul(x)));
    }
    x
}

/// A vector of residues in `{0, .., N-1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZVector {
    entries: Vec<u64>,
    ell: u32,
}

impl ZVector {
    /// Reduces every entry mod `N`.
    pub fn new(entries: Vec<u64>, ell: u32) -> Result<Self> {
        check_level(ell)?;
        let m = mask(ell);
        Ok(Self {
            entries: entries.into_iter().map(|e| e & m).collect(),
            ell,
        })
    }

    /// Reduces signed entries mod `N`.
    pub fn from_signed(entries: &[i64], ell: u32) -> Result<Self> {
        check_level(ell)?;
        let m = mask(ell);
        Ok(Self {
            entries: entries.iter().map(|&e| (e as u64) & m).collect(),
            ell,
        })
    }

    #[must_use]
    pub fn zeros(n: usize, ell: u32) -> Self {
        Self {
            entries: vec![0; n],
            ell,
        }
    }

    /// `scale * v` with the 0/1 entries of `v` read as integers.
    #[must_use]
    pub fn lift(v: &BitVector, ell: u32, scale: u64) -> Self {
        let s = scale & mask(ell);
        let mut entries = vec![0; v.len()];
        if s != 0 {
            for i in v.ones_iter() {
                entries[i] = s;
            }
        }
        Self { entries, ell }
    }

    /// Parses comma-separated decimal residues.
    pub fn parse(s: &str, ell: u32) -> Result<Self> {
        check_level(ell)?;
        let mut entries = Vec::new();
        for tok in s.split(',') {
            let t = tok.trim();
            let x: u64 = t
                .parse()
                .map_err(|_| Error::Parse(alloc::format!("invalid residue {t:?}")))?;
            if x >> ell != 0 {
                return Err(Error::Parse(alloc::format!(
                    "residue {x} not below 2^{ell}"
                )));
            }
            entries.push(x);
        }
        Ok(Self { entries, ell })
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[must_use]
    pub fn ell(&self) -> u32 {
        self.ell
    }

    #[must_use]
    pub fn modulus(&self) -> u64 {
        1 << self.ell
    }

    #[must_use]
    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    /// `b . v mod N` with `v` lifted 0/1 to integers.
    #[must_use]
    pub fn dot_bits(&self, v: &BitVector) -> u64 {
        debug_assert_eq!(self.len(), v.len());
        let mut acc = 0u64;
        for i in v.ones_iter() {
            acc = acc.wrapping_add(self.entries[i]);
        }
        acc & mask(self.ell)
    }

    #[must_use]
    pub fn dot(&self, other: &Self) -> u64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(0u64, |acc, (a, b)| acc.wrapping_add(a.wrapping_mul(*b)))
            & mask(self.ell)
    }

    #[must_use]
    pub fn add(&self, other: &Self) -> Self {
        let m = mask(self.ell);
        Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.wrapping_add(*b) & m)
                .collect(),
            ell: self.ell,
        }
    }

    #[must_use]
    pub fn scale(&self, k: u64) -> Self {
        let m = mask(self.ell);
        Self {
            entries: self.entries.iter().map(|a| a.wrapping_mul(k) & m).collect(),
            ell: self.ell,
        }
    }

    #[must_use]
    pub fn neg(&self) -> Self {
        let m = mask(self.ell);
        Self {
            entries: self.entries.iter().map(|a| a.wrapping_neg() & m).collect(),
            ell: self.ell,
        }
    }

    /// The same residues read at a higher level, multiplied by `2^(to - ell)`.
    #[must_use]
    pub fn scale_lift(&self, to: u32) -> Self {
        debug_assert!(to >= self.ell);
        let shift = to - self.ell;
        Self {
            entries: self.entries.iter().map(|a| a << shift).collect(),
            ell: to,
        }
    }

    /// Entries mod 2 as a bit vector.
    #[must_use]
    pub fn parity(&self) -> BitVector {
        let mut v = BitVector::zeros(self.len());
        for (i, e) in self.entries.iter().enumerate() {
            if e & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }
}

impl fmt::Display for ZVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ZVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ZVector[Z_{}]({self})", 1u64 << self.ell)
    }
}

/// Incremental Howell reduction. Rows may arrive in any order; the finished
/// module does not depend on it.
#[derive(Clone, Debug)]
pub struct HowellBuilder {
    n: usize,
    ell: u32,
    slots: Vec<Option<Vec<u64>>>,
}

impl HowellBuilder {
    pub fn new(n: usize, ell: u32) -> Result<Self> {
        check_level(ell)?;
        Ok(Self {
            n,
            ell,
            slots: vec![None; n],
        })
    }

    pub fn push(&mut self, row: &ZVector) -> Result<()> {
        if row.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: row.len(),
            });
        }
        if row.ell != self.ell {
            return Err(Error::LevelMismatch {
                expected: self.ell,
                found: row.ell,
            });
        }
        self.insert(row.entries.clone());
        Ok(())
    }

    fn insert(&mut self, row: Vec<u64>) {
        let m = mask(self.ell);
        let mut work = vec![row];
        while let Some(mut v) = work.pop() {
            while let Some(c) = v.iter().position(|&e| e != 0) {
                let a_v = v[c].trailing_zeros();
                match &mut self.slots[c] {
                    Some(p) if a_v >= p[c].trailing_zeros() => {
                        let k = v[c] >> p[c].trailing_zeros();
                        for (x, y) in v.iter_mut().zip(p.iter()).skip(c) {
                            *x = x.wrapping_sub(k.wrapping_mul(*y)) & m;
                        }
                    }
                    slot => {
                        let inv = odd_inverse(v[c] >> a_v);
                        for x in v.iter_mut().skip(c) {
                            *x = x.wrapping_mul(inv) & m;
                        }
                        if a_v > 0 {
                            let shift = self.ell - a_v;
                            let ann: Vec<u64> = v.iter().map(|x| (x << shift) & m).collect();
                            if ann.iter().any(|&e| e != 0) {
                                work.push(ann);
                            }
                        }
                        if let Some(old) = slot.replace(v) {
                            work.push(old);
                        }
                        break;
                    }
                }
            }
        }
    }

    #[must_use]
    pub fn finish(self) -> ZModule {
        let m = mask(self.ell);
        let mut rows: Vec<(usize, Vec<u64>)> = self
            .slots
            .into_iter()
            .enumerate()
            .filter_map(|(c, s)| s.map(|r| (c, r)))
            .collect();
        for i in 0..rows.len() {
            let c = rows[i].0;
            let pivot_row = rows[i].1.clone();
            let a = pivot_row[c].trailing_zeros();
            for (_, r) in rows.iter_mut().take(i) {
                let k = r[c] >> a;
                if k != 0 {
                    for (x, y) in r.iter_mut().zip(&pivot_row).skip(c) {
                        *x = x.wrapping_sub(k.wrapping_mul(*y)) & m;
                    }
                }
            }
        }
        let pivots = rows
            .iter()
            .map(|(c, r)| (*c, r[*c].trailing_zeros()))
            .collect();
        let gens = rows
            .into_iter()
            .map(|(_, entries)| ZVector {
                entries,
                ell: self.ell,
            })
            .collect();
        ZModule {
            n: self.n,
            ell: self.ell,
            gens,
            pivots,
        }
    }
}

/// A submodule of `Z_N^n`, `N = 2^l`, by its Howell basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ZModule {
    n: usize,
    ell: u32,
    gens: Vec<ZVector>,
    /// (pivot column, exponent a with pivot entry 2^a)
    pivots: Vec<(usize, u32)>,
}

impl fmt::Debug for ZModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ZModule[Z_{}^{}]{{", 1u64 << self.ell, self.n)?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{g}")?;
        }
        f.write_str("}")
    }
}

/// Howell basis of the span of `rows`.
pub fn howell_form(rows: &[ZVector], n: usize, ell: u32) -> Result<ZModule> {
    let mut b = HowellBuilder::new(n, ell)?;
    for r in rows {
        b.push(r)?;
    }
    Ok(b.finish())
}

/// The annihilator `{b : r . b = 0 mod N for every row r}`.
pub fn kernel_perp(rows: &[ZVector], n: usize, ell: u32) -> Result<ZModule> {
    let span = howell_form(rows, n, ell)?;
    Ok(span.annihilator())
}

impl ZModule {
    #[must_use]
    pub fn zero(n: usize, ell: u32) -> Self {
        Self {
            n,
            ell,
            gens: Vec::new(),
            pivots: Vec::new(),
        }
    }

    #[must_use]
    pub fn full(n: usize, ell: u32) -> Self {
        let gens = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                ZVector { entries: e, ell }
            })
            .collect();
        Self {
            n,
            ell,
            gens,
            pivots: (0..n).map(|c| (c, 0)).collect(),
        }
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.n
    }

    #[must_use]
    pub fn ell(&self) -> u32 {
        self.ell
    }

    #[must_use]
    pub fn gens(&self) -> &[ZVector] {
        &self.gens
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    /// Module length: `sum over pivots 2^a of (l - a)`.
    #[must_use]
    pub fn length(&self) -> u32 {
        self.pivots.iter().map(|&(_, a)| self.ell - a).sum()
    }

    /// Number of elements, `2^length`, if it fits in a u64.
    #[must_use]
    pub fn order(&self) -> Option<u64> {
        let l = self.length();
        (l < 64).then(|| 1u64 << l)
    }

    fn check(&self, v: &ZVector) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        if v.ell != self.ell {
            return Err(Error::LevelMismatch {
                expected: self.ell,
                found: v.ell,
            });
        }
        Ok(())
    }

    pub fn contains(&self, v: &ZVector) -> Result<bool> {
        self.check(v)?;
        let m = mask(self.ell);
        let mut r = v.entries.clone();
        for (g, &(c, a)) in self.gens.iter().zip(&self.pivots) {
            if r[..c].iter().any(|&e| e != 0) {
                return Ok(false);
            }
            if r[c] & ((1 << a) - 1) != 0 {
                return Ok(false);
            }
            let k = r[c] >> a;
            if k != 0 {
                for (x, y) in r.iter_mut().zip(&g.entries).skip(c) {
                    *x = x.wrapping_sub(k.wrapping_mul(*y)) & m;
                }
            }
        }
        Ok(r.iter().all(|&e| e == 0))
    }

    /// `self <= other` as modules.
    pub fn is_submodule_of(&self, other: &Self) -> Result<bool> {
        for g in &self.gens {
            if !other.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        if other.ell != self.ell {
            return Err(Error::LevelMismatch {
                expected: self.ell,
                found: other.ell,
            });
        }
        let mut b = HowellBuilder::new(self.n, self.ell)?;
        for g in self.gens.iter().chain(&other.gens) {
            b.push(g)?;
        }
        Ok(b.finish())
    }

    /// `2 * M` read inside `Z_{2N}^n`, for `M` at level `l - 1`.
    pub fn scale_lift(&self, to: u32) -> Result<Self> {
        check_level(to)?;
        if to != self.ell + 1 {
            return Err(Error::LevelMismatch {
                expected: self.ell + 1,
                found: to,
            });
        }
        let rows: Vec<ZVector> = self.gens.iter().map(|g| g.scale_lift(to)).collect();
        howell_form(&rows, self.n, to)
    }

    /// `M^perp`.
    #[must_use]
    pub fn annihilator(&self) -> Self {
        let n = self.n;
        let k = self.gens.len();
        // rows (A^T | I_n): the rows with zero left block span {(0, b) : M b = 0}
        let mut b = HowellBuilder::new(k + n, self.ell).expect("level checked");
        for j in 0..n {
            let mut e = vec![0; k + n];
            for (i, g) in self.gens.iter().enumerate() {
                e[i] = g.entries[j];
            }
            e[k + j] = 1;
            b.insert(e);
        }
        let aug = b.finish();
        let mut out = HowellBuilder::new(n, self.ell).expect("level checked");
        for (g, &(c, _)) in aug.gens.iter().zip(&aug.pivots) {
            if c >= k {
                out.insert(g.entries[k..].to_vec());
            }
        }
        out.finish()
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        Ok(self.annihilator().sum(&other.annihilator())?.annihilator())
    }

    /// Every element, each exactly once: `sum c_j g_j` with `0 <= c_j < 2^(l - a_j)`.
    pub fn elements(&self, limit: u64) -> Result<Vec<ZVector>> {
        let order = self
            .order()
            .filter(|&o| o <= limit)
            .ok_or(Error::TooLarge {
                what: "module order",
                limit,
            })?;
        let mut out = Vec::with_capacity(order as usize);
        let ranges: Vec<u64> = self
            .pivots
            .iter()
            .map(|&(_, a)| 1u64 << (self.ell - a))
            .collect();
        let mut coeffs = vec![0u64; self.gens.len()];
        loop {
            let mut acc = ZVector::zeros(self.n, self.ell);
            for (g, &c) in self.gens.iter().zip(&coeffs) {
                if c != 0 {
                    acc = acc.add(&g.scale(c));
                }
            }
            out.push(acc);
            let mut i = 0;
            loop {
                if i == coeffs.len() {
                    return Ok(out);
                }
                coeffs[i] += 1;
                if coeffs[i] < ranges[i] {
                    break;
                }
                coeffs[i] = 0;
                i += 1;
            }
        }
    }

    /// Generators as decimal rows.
    #[must_use]
    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.gens.iter().map(|g| g.entries.clone()).collect()
    }

    #[must_use]
    pub fn describe(&self) -> String {
        alloc::format!("{self:?}")
    }
}

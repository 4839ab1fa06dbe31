//! Codes spanned by evaluations of square-free monomials on `F_2^m`, and
//! closed forms for their gate groups.
//!
//! Points are ordered LSB-first: `P_i` has coordinates given by the binary
//! digits of `i - 1` with `x_1` the least significant, so `P_1 = 0` and
//! `P_n = (1, .., 1)`. A square-free monomial is a bitmask of its variables.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::bincode::{BinaryCode, BitVector, NestedCodePair};
use crate::error::{Error, Hypothesis, Result};
use crate::gates::{CssCode, PhaseProfile};
use crate::zmod::{check_level, HowellBuilder, ZModule, ZVector};

pub const MAX_VARIABLES: u32 = 16;

/// A square-free monomial `x^i` in `m` variables.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    mask: u32,
    m: u32,
}

impl Monomial {
    pub fn new(mask: u32, m: u32) -> Result<Self> {
        if m == 0 || m > MAX_VARIABLES {
            return Err(Error::Parse(alloc::format!(
                "variable count {m} outside 1..={MAX_VARIABLES}"
            )));
        }
        if mask >> m != 0 {
            return Err(Error::Parse(alloc::format!(
                "monomial mask {mask:#b} uses variables beyond x{m}"
            )));
        }
        Ok(Self { mask, m })
    }

    #[must_use]
    pub fn one(m: u32) -> Self {
        Self { mask: 0, m }
    }

    /// `x_1 x_2 .. x_m`.
    #[must_use]
    pub fn full(m: u32) -> Self {
        Self {
            mask: full_mask(m),
            m,
        }
    }

    /// Parses `"1"` or a product like `"x1x3"` with strictly increasing
    /// indices.
    pub fn parse(token: &str, m: u32) -> Result<Self> {
        let t = token.trim();
        if t == "1" {
            return Self::new(0, m);
        }
        let mut mask = 0u32;
        let mut last = 0u32;
        let mut rest = t;
        if rest.is_empty() {
            return Err(Error::Parse("empty monomial token".into()));
        }
        while !rest.is_empty() {
            let Some(after) = rest.strip_prefix('x') else {
                return Err(Error::Parse(alloc::format!("malformed monomial {t:?}")));
            };
            let digits = after.bytes().take_while(u8::is_ascii_digit).count();
            if digits == 0 {
                return Err(Error::Parse(alloc::format!("malformed monomial {t:?}")));
            }
            let k: u32 = after[..digits]
                .parse()
                .map_err(|_| Error::Parse(alloc::format!("malformed monomial {t:?}")))?;
            if k == 0 || k > m {
                return Err(Error::Parse(alloc::format!(
                    "variable x{k} outside x1..x{m} in {t:?}"
                )));
            }
            if k <= last {
                return Err(Error::Parse(alloc::format!(
                    "variables must strictly increase in {t:?}"
                )));
            }
            last = k;
            mask |= 1 << (k - 1);
            rest = &after[digits..];
        }
        Self::new(mask, m)
    }

    #[must_use]
    pub fn mask(self) -> u32 {
        self.mask
    }

    #[must_use]
    pub fn vars(self) -> u32 {
        self.m
    }

    #[must_use]
    pub fn degree(self) -> u32 {
        self.mask.count_ones()
    }

    /// Square-free part of the product.
    #[must_use]
    pub fn times(self, other: Self) -> Self {
        Self {
            mask: self.mask | other.mask,
            m: self.m,
        }
    }

    #[must_use]
    pub fn divides(self, other: Self) -> bool {
        self.mask & other.mask == self.mask
    }

    /// `x_1 .. x_m / u`.
    #[must_use]
    pub fn complement(self) -> Self {
        Self {
            mask: full_mask(self.m) & !self.mask,
            m: self.m,
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mask == 0 {
            return f.write_str("1");
        }
        for i in 0..self.m {
            if self.mask >> i & 1 == 1 {
                write!(f, "x{}", i + 1)?;
            }
        }
        Ok(())
    }
}

fn full_mask(m: u32) -> u32 {
    if m == 32 {
        u32::MAX
    } else {
        (1u32 << m) - 1
    }
}

/// `ev(u) = (u(P_1), .., u(P_n))`, `n = 2^m`.
#[must_use]
pub fn evaluate(u: Monomial) -> BitVector {
    let n = 1usize << u.m;
    let mut v = BitVector::zeros(n);
    let mask = u.mask as usize;
    for i in 0..n {
        if i & mask == mask {
            v.set(i, true);
        }
    }
    v
}

/// A set of square-free monomials in `m` variables.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MonomialSet {
    m: u32,
    members: BTreeSet<u32>,
}

impl MonomialSet {
    pub fn new(m: u32, members: impl IntoIterator<Item = Monomial>) -> Result<Self> {
        Monomial::new(0, m)?;
        let mut set = BTreeSet::new();
        for u in members {
            if u.m != m {
                return Err(Error::Parse(alloc::format!(
                    "monomial {u} has {} variables, expected {m}",
                    u.m
                )));
            }
            set.insert(u.mask);
        }
        Ok(Self { m, members: set })
    }

    pub fn parse<'a>(m: u32, tokens: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut out = Vec::new();
        for t in tokens {
            out.push(Monomial::parse(t, m)?);
        }
        Self::new(m, out)
    }

    /// Every square-free monomial of degree at most `r`.
    #[must_use]
    pub fn up_to_degree(m: u32, r: u32) -> Self {
        Self {
            m,
            members: (0..=full_mask(m))
                .filter(|mask| mask.count_ones() <= r)
                .collect(),
        }
    }

    #[must_use]
    pub fn all(m: u32) -> Self {
        Self::up_to_degree(m, m)
    }

    fn from_masks(m: u32, members: BTreeSet<u32>) -> Self {
        Self { m, members }
    }

    #[must_use]
    pub fn vars(&self) -> u32 {
        self.m
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[must_use]
    pub fn contains(&self, u: Monomial) -> bool {
        self.members.contains(&u.mask)
    }

    pub fn iter(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.members
            .iter()
            .map(move |&mask| Monomial { mask, m: self.m })
    }

    /// Members ordered by `(degree, mask)`.
    #[must_use]
    pub fn sorted_by_degree(&self) -> Vec<Monomial> {
        let mut v: Vec<Monomial> = self.iter().collect();
        v.sort_by_key(|u| (u.degree(), u.mask));
        v
    }

    #[must_use]
    pub fn is_subset(&self, other: &Self) -> bool {
        self.members.is_subset(&other.members)
    }

    #[must_use]
    pub fn difference(&self, other: &Self) -> Self {
        Self::from_masks(
            self.m,
            self.members.difference(&other.members).copied().collect(),
        )
    }

    /// Members with no proper multiple in the set.
    #[must_use]
    pub fn maximal_elements(&self) -> Self {
        let members = self
            .members
            .iter()
            .copied()
            .filter(|&u| !self.members.iter().any(|&v| v != u && v & u == u))
            .collect();
        Self::from_masks(self.m, members)
    }

    /// Members with no proper divisor in the set.
    #[must_use]
    pub fn minimal_elements(&self) -> Self {
        let members = self
            .members
            .iter()
            .copied()
            .filter(|&u| !self.members.iter().any(|&v| v != u && v & u == v))
            .collect();
        Self::from_masks(self.m, members)
    }

    /// Every divisor of every member.
    #[must_use]
    pub fn divisibility_closure(&self) -> Self {
        let mut out = BTreeSet::new();
        for &u in &self.members {
            // walk the submasks of u
            let mut s = u;
            loop {
                out.insert(s);
                if s == 0 {
                    break;
                }
                s = (s - 1) & u;
            }
        }
        Self::from_masks(self.m, out)
    }

    #[must_use]
    pub fn is_decreasing(&self) -> bool {
        *self == self.divisibility_closure()
    }

    /// `{x_1..x_m / u : u in self}`.
    #[must_use]
    pub fn complements(&self) -> Self {
        let full = full_mask(self.m);
        Self::from_masks(self.m, self.members.iter().map(|u| full & !u).collect())
    }

    /// Square-free monomials not in the set.
    #[must_use]
    pub fn complement_set(&self) -> Self {
        Self::from_masks(
            self.m,
            (0..=full_mask(self.m))
                .filter(|u| !self.members.contains(u))
                .collect(),
        )
    }

    pub fn tokens(&self) -> Vec<String> {
        self.sorted_by_degree()
            .into_iter()
            .map(|u| alloc::format!("{u}"))
            .collect()
    }
}

/// `M2 M1^s`: square-free products of one member of `m2` with at most `s`
/// members of `m1`.
#[must_use]
pub fn product_set(m2: &MonomialSet, m1: &MonomialSet, s: usize) -> MonomialSet {
    let mut current = m2.members.clone();
    for _ in 0..s {
        let mut next = current.clone();
        for &a in &current {
            for &b in &m1.members {
                next.insert(a | b);
            }
        }
        if next == current {
            break;
        }
        current = next;
    }
    MonomialSet::from_masks(m2.m, current)
}

/// `M^s`: products of at most `s` members (`M^0 = {1}`).
#[must_use]
pub fn power(m1: &MonomialSet, s: usize) -> MonomialSet {
    if s == 0 {
        return MonomialSet::from_masks(m1.m, [0].into_iter().collect());
    }
    product_set(m1, m1, s - 1)
}

/// The pair `M2 <= M1` defining `C_j = span{ev(u) : u in M_j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialCodeSpec {
    m: u32,
    m1: MonomialSet,
    m2: MonomialSet,
}

impl MonomialCodeSpec {
    pub fn new(m1: MonomialSet, m2: MonomialSet) -> Result<Self> {
        if m1.m != m2.m {
            return Err(Error::LengthMismatch {
                expected: 1 << m1.m,
                found: 1 << m2.m,
            });
        }
        if !m2.is_subset(&m1) {
            return Err(Error::NotNested);
        }
        Ok(Self { m: m1.m, m1, m2 })
    }

    /// `RM(q, m) <= RM(r, m)`.
    pub fn reed_muller(q: u32, r: u32, m: u32) -> Result<Self> {
        Self::new(
            MonomialSet::up_to_degree(m, r),
            MonomialSet::up_to_degree(m, q),
        )
    }

    #[must_use]
    pub fn vars(&self) -> u32 {
        self.m
    }

    #[must_use]
    pub fn len(&self) -> usize {
        1 << self.m
    }

    #[must_use]
    pub fn m1(&self) -> &MonomialSet {
        &self.m1
    }

    #[must_use]
    pub fn m2(&self) -> &MonomialSet {
        &self.m2
    }

    /// `M1 \ M2` in encoding order `(degree, mask)`.
    #[must_use]
    pub fn encoding(&self) -> Vec<Monomial> {
        self.m1.difference(&self.m2).sorted_by_degree()
    }

    /// `beta2 = ev(M2)` and representatives `ev(M1 \ M2)`, both in
    /// `(degree, mask)` order and used verbatim.
    #[must_use]
    pub fn pair(&self) -> NestedCodePair {
        let beta2 = self
            .m2
            .sorted_by_degree()
            .into_iter()
            .map(evaluate)
            .collect();
        let ext = self.encoding().into_iter().map(evaluate).collect();
        // evaluations of distinct square-free monomials are independent
        NestedCodePair::from_bases(self.len(), beta2, ext)
            .expect("monomial evaluations are independent")
    }

    #[must_use]
    pub fn css(&self) -> CssCode {
        CssCode::unsigned(self.pair())
    }

    #[must_use]
    pub fn c1(&self) -> BinaryCode {
        self.pair().c1().clone()
    }

    #[must_use]
    pub fn c2(&self) -> BinaryCode {
        self.pair().c2().clone()
    }

    /// `(q, r)` when both sets are full Reed-Muller monomial sets.
    #[must_use]
    pub fn reed_muller_orders(&self) -> Option<(u32, u32)> {
        let degree_of = |s: &MonomialSet| {
            let r = s.iter().map(Monomial::degree).max()?;
            (*s == MonomialSet::up_to_degree(self.m, r)).then_some(r)
        };
        Some((degree_of(&self.m2)?, degree_of(&self.m1)?))
    }
}

fn span(
    monomials: impl IntoIterator<Item = Monomial>,
    n: usize,
    ell: u32,
    scale: u64,
) -> Result<ZModule> {
    let mut b = HowellBuilder::new(n, ell)?;
    for u in monomials {
        b.push(&ZVector::lift(&evaluate(u), ell, scale))?;
    }
    Ok(b.finish())
}

/// Which hypotheses of the recursive `H_N` closed form hold at level `ell`.
pub fn check_h_hypotheses(spec: &MonomialCodeSpec, ell: u32) -> Result<()> {
    check_level(ell)?;
    let full = Monomial::full(spec.m);
    if product_set(&spec.m2, &spec.m1, ell as usize - 1).contains(full) {
        return Err(Error::Hypothesis(Hypothesis::FullMonomialReachable));
    }
    if ell >= 2 && power(&spec.m1, ell as usize - 1) == power(&spec.m1, ell as usize - 2) {
        return Err(Error::Hypothesis(Hypothesis::ProductChainStalled));
    }
    Ok(())
}

/// `span{ev(x_1..x_m / u) : u not in M2 M1^(l-1)} + 2 H_{N/2}`, unrolled down
/// to level one.
fn recursive_h(spec: &MonomialCodeSpec, ell: u32) -> Result<ZModule> {
    let outside = product_set(&spec.m2, &spec.m1, ell as usize - 1).complement_set();
    let head = span(outside.complements().iter(), spec.len(), ell, 1)?;
    if ell == 1 {
        return Ok(head);
    }
    head.sum(&recursive_h(spec, ell - 1)?.scale_lift(ell)?)
}

/// `H_N` of a monomial CSS code from the recursive closed form. The
/// hypotheses are checked at the requested level.
pub fn closed_form_h(spec: &MonomialCodeSpec, ell: u32) -> Result<ZModule> {
    check_h_hypotheses(spec, ell)?;
    recursive_h(spec, ell)
}

/// The minimal `l` with `x_1..x_m` in `M2 M1^(l-1)`, if any.
#[must_use]
pub fn minimal_full_level(spec: &MonomialCodeSpec) -> Option<u32> {
    let full = Monomial::full(spec.m);
    let mut prev_len = 0;
    for ell in 1..=crate::zmod::MAX_LEVEL {
        let p = product_set(&spec.m2, &spec.m1, ell as usize - 1);
        if p.contains(full) {
            return Some(ell);
        }
        if p.len() == prev_len {
            return None;
        }
        prev_len = p.len();
    }
    None
}

/// For the minimal `l` with `x_1..x_m` in `M2 M1^(l-1)`, returns `l` and
/// `span{ev(u) - ev(1) : u not in {x_1..x_m / w : w in M2 M1^(l-1), w != x_1..x_m}} + 2 H_{N/2}`.
pub fn closed_form_h_general(spec: &MonomialCodeSpec) -> Result<(u32, ZModule)> {
    let full = Monomial::full(spec.m);
    let ell =
        minimal_full_level(spec).ok_or(Error::Hypothesis(Hypothesis::FullMonomialUnreachable))?;
    let products = product_set(&spec.m2, &spec.m1, ell as usize - 1);
    if products.len() == 1 << spec.m {
        return Err(Error::Hypothesis(Hypothesis::ProductSetIsEverything));
    }
    let n = spec.len();
    let mut excluded = products.clone();
    excluded.members.remove(&full.mask);
    let excluded = excluded.complements();
    let one = evaluate(Monomial::one(spec.m));
    let mut b = HowellBuilder::new(n, ell)?;
    for u in excluded.complement_set().iter() {
        let ev = evaluate(u);
        let entries: Vec<i64> = (0..n)
            .map(|i| i64::from(ev.get(i)) - i64::from(one.get(i)))
            .collect();
        b.push(&ZVector::from_signed(&entries, ell)?)?;
    }
    let mut module = b.finish();
    if ell > 1 {
        module = module.sum(&recursive_h(spec, ell - 1)?.scale_lift(ell)?)?;
    }
    Ok((ell, module))
}

/// `Delta`: square-free monomials not divisible by any `x_1..x_m / u` with
/// `u` in `B2 B1^(l-1)`, `B_j` the maximal elements of decreasing `M_j`.
pub fn delta_generators(spec: &MonomialCodeSpec, ell: u32) -> Result<DeltaSet> {
    check_level(ell)?;
    if !spec.m1.is_decreasing() || !spec.m2.is_decreasing() {
        return Err(Error::Hypothesis(Hypothesis::NotDecreasing));
    }
    if product_set(&spec.m2, &spec.m1, ell as usize - 1).contains(Monomial::full(spec.m)) {
        return Err(Error::Hypothesis(Hypothesis::FullMonomialReachable));
    }
    let b1 = spec.m1.maximal_elements();
    let b2 = spec.m2.maximal_elements();
    let quotients = product_set(&b2, &b1, ell as usize - 1)
        .complements()
        .minimal_elements();
    let delta = MonomialSet::from_masks(
        spec.m,
        (0..=full_mask(spec.m))
            .filter(|&u| !quotients.members.iter().any(|&q| q & u == q))
            .collect(),
    );
    Ok(DeltaSet { quotients, delta })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaSet {
    /// Minimal elements of `{x_1..x_m / u : u in B2 B1^(l-1)}`.
    pub quotients: MonomialSet,
    pub delta: MonomialSet,
}

/// `span{ev(u) : u in Delta}` at level `ell`.
pub fn delta_span(spec: &MonomialCodeSpec, ell: u32) -> Result<ZModule> {
    let d = delta_generators(spec, ell)?;
    span(d.delta.iter(), spec.len(), ell, 1)
}

pub fn check_t_id_hypotheses(spec: &MonomialCodeSpec, ell: u32) -> Result<()> {
    check_level(ell)?;
    let full = Monomial::full(spec.m);
    let p = power(&spec.m1, ell as usize);
    if spec.m2.contains(full) || (p.contains(full) && !spec.m1.contains(full)) {
        return Err(Error::Hypothesis(Hypothesis::FullMonomialInProducts));
    }
    if p == power(&spec.m1, ell as usize - 1) {
        return Err(Error::Hypothesis(Hypothesis::PowerChainStalled));
    }
    Ok(())
}

fn recursive_id(spec: &MonomialCodeSpec, ell: u32) -> Result<ZModule> {
    let outside = power(&spec.m1, ell as usize).complement_set();
    let head = span(outside.complements().iter(), spec.len(), ell, 1)?;
    if ell == 1 {
        return Ok(head);
    }
    head.sum(&recursive_id(spec, ell - 1)?.scale_lift(ell)?)
}

/// `(T_N, Id_N)` of a monomial CSS code from the closed forms
/// `Id_N = span{ev(x_1..x_m / u) : u not in M1^l} + 2 Id_{N/2}` and
/// `T_N = Id_N + span{2^(l-1) ev(x_1..x_m / u) : u in M1 \ M2}`.
pub fn closed_form_t_id(spec: &MonomialCodeSpec, ell: u32) -> Result<(ZModule, ZModule)> {
    check_t_id_hypotheses(spec, ell)?;
    let id = recursive_id(spec, ell)?;
    let logical = spec.m1.difference(&spec.m2).complements();
    let mut b = HowellBuilder::new(spec.len(), ell)?;
    for u in logical.iter() {
        b.push(&ZVector::lift(&evaluate(u), ell, 1 << (ell - 1)))?;
    }
    let t = id.sum(&b.finish())?;
    Ok((t, id))
}

/// Logical action of `U(ev(u))` on a monomial CSS code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialAction {
    /// `c_i = 2^(m - deg(u u_i)) mod N` over the encoding order.
    pub c: ZVector,
    /// `wt(ev(u f)) mod N` for `f` in the span of the encoding monomials,
    /// indexed like [`PhaseProfile::phases`].
    pub profile: PhaseProfile,
    pub in_h: bool,
    pub in_t: bool,
}

/// `c` and the phase profile of `U(ev(u))`. Membership is checked against the
/// supplied groups; the values are computed either way.
pub fn monomial_action(
    spec: &MonomialCodeSpec,
    ell: u32,
    u: Monomial,
    h: &ZModule,
    t: &ZModule,
) -> Result<MonomialAction> {
    check_level(ell)?;
    let enc = spec.encoding();
    let k = enc.len();
    if k > crate::gates::MAX_PROFILE_QUBITS {
        return Err(Error::TooLarge {
            what: "logical qubit count for a phase profile",
            limit: crate::gates::MAX_PROFILE_QUBITS as u64,
        });
    }
    let modmask = (1u64 << ell) - 1;
    let m = spec.m;
    let c: Vec<u64> = enc
        .iter()
        .map(|ui| {
            let e = m - u.times(*ui).degree();
            if e >= ell {
                0
            } else {
                1u64 << e
            }
        })
        .collect();
    let b = ZVector::lift(&evaluate(u), ell, 1);
    let ev_u = evaluate(u);
    let phases = (0..1usize << k)
        .map(|x| {
            let mut f = BitVector::zeros(spec.len());
            for (i, ui) in enc.iter().enumerate() {
                if x >> i & 1 == 1 {
                    f.xor_assign(&evaluate(*ui));
                }
            }
            ev_u.overlap(&f) as u64 & modmask
        })
        .collect();
    let in_h = h.contains(&b)?;
    let in_t = t.contains(&b)?;
    Ok(MonomialAction {
        c: ZVector::new(c, ell)?,
        profile: PhaseProfile {
            k,
            ell,
            global_phase: 0,
            phases,
            well_defined: in_h,
        },
        in_h,
        in_t,
    })
}

//! Groups of diagonal transversal gates on a CSS code and their logical action.
//!
//! Every group is an annihilator over `Z_N` of star products of basis vectors,
//! lifted 0/1 to integers and scaled by powers of two:
//!
//! - `H_N`: `2^i (v * p)` for `v` in `beta2`, `p` a product of `i` distinct
//!   members of `beta1`, `0 <= i < l`.
//! - `T_N`: `beta2` together with `2^(i-1) p` for `p` a product of `i >= 2`
//!   distinct members of `beta1`. Also computed as `H_N` intersected with the
//!   annihilator of `2^i (w * p)`, `w` a coset representative, `1 <= i < l`.
//! - `Id_N`: `2^(i-1) p` for `p` a product of `1 <= i <= l` distinct members
//!   of `beta1`. Also computed as `T_N` intersected with the annihilator of the
//!   coset representatives.
//!
//! The two routes to `T_N` and to `Id_N` are compared on every call and a
//! mismatch is reported as [`Error::Inconsistent`].

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bincode::{self, BinaryCode, BitVector, NestedCodePair};
use crate::error::{Error, Result};
use crate::zmod::{check_level, HowellBuilder, ZModule, ZVector};

/// Largest `K` for which full phase profiles are tabulated.
pub const MAX_PROFILE_QUBITS: usize = 20;

/// Largest `dim C1` for which codeword weights are scanned.
pub const MAX_WEIGHT_SCAN_DIM: usize = 24;

/// `Q(C1, C2, y_x, y_z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssCode {
    pair: NestedCodePair,
    y_x: BitVector,
    y_z: BitVector,
}

impl CssCode {
    pub fn new(pair: NestedCodePair, y_x: BitVector, y_z: BitVector) -> Result<Self> {
        let n = pair.len();
        for y in [&y_x, &y_z] {
            if y.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: y.len(),
                });
            }
        }
        Ok(Self { pair, y_x, y_z })
    }

    /// `Q(C1, C2) = Q(C1, C2, 0, 0)`.
    #[must_use]
    pub fn unsigned(pair: NestedCodePair) -> Self {
        let n = pair.len();
        Self {
            pair,
            y_x: BitVector::zeros(n),
            y_z: BitVector::zeros(n),
        }
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.pair.len()
    }

    #[must_use]
    pub fn logical_count(&self) -> usize {
        self.pair.logical_count()
    }

    /// `(n, K)`.
    #[must_use]
    pub fn params(&self) -> (usize, usize) {
        (self.len(), self.logical_count())
    }

    #[must_use]
    pub fn pair(&self) -> &NestedCodePair {
        &self.pair
    }

    #[must_use]
    pub fn y_x(&self) -> &BitVector {
        &self.y_x
    }

    #[must_use]
    pub fn y_z(&self) -> &BitVector {
        &self.y_z
    }

    /// The same code with both characters set to zero.
    #[must_use]
    pub fn without_characters(&self) -> Self {
        Self::unsigned(self.pair.clone())
    }
}

/// Builds `Q(C1, C2, y_x, y_z)` with the canonical aligned bases. Missing
/// characters default to zero.
pub fn build_css(
    c1: &BinaryCode,
    c2: &BinaryCode,
    y_x: Option<BitVector>,
    y_z: Option<BitVector>,
) -> Result<CssCode> {
    let pair = NestedCodePair::aligned(c1, c2)?;
    let n = pair.len();
    CssCode::new(
        pair,
        y_x.unwrap_or_else(|| BitVector::zeros(n)),
        y_z.unwrap_or_else(|| BitVector::zeros(n)),
    )
}

/// `U(b) = (x)_i diag(1, w^(b_i))` with `w = exp(2 pi i / 2^l)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiagonalGate {
    b: ZVector,
}

impl DiagonalGate {
    #[must_use]
    pub fn new(b: ZVector) -> Self {
        Self { b }
    }

    #[must_use]
    pub fn ell(&self) -> u32 {
        self.b.ell()
    }

    #[must_use]
    pub fn vector(&self) -> &ZVector {
        &self.b
    }
}

impl fmt::Display for DiagonalGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U({})", self.b)
    }
}

/// Pushes `scale * v` for every distinct nonzero `v` not yet seen.
struct ConstraintSink {
    builder: HowellBuilder,
    seen: BTreeSet<ZVector>,
    ell: u32,
}

impl ConstraintSink {
    fn new(n: usize, ell: u32) -> Result<Self> {
        Ok(Self {
            builder: HowellBuilder::new(n, ell)?,
            seen: BTreeSet::new(),
            ell,
        })
    }

    fn push_bits(&mut self, v: &BitVector, scale: u64) {
        let row = ZVector::lift(v, self.ell, scale);
        if !row.is_zero() && self.seen.insert(row.clone()) {
            self.builder.push(&row).expect("row shape matches sink");
        }
    }

    fn rows(&self) -> impl Iterator<Item = &ZVector> {
        self.seen.iter()
    }

    fn kernel(self) -> ZModule {
        self.builder.finish().annihilator()
    }
}

fn pow2_mod(i: usize, ell: u32) -> u64 {
    if i >= ell as usize {
        0
    } else {
        1u64 << i
    }
}

/// Calls `f(p)` for each distinct product of `i` distinct members of `basis`.
fn for_each_family(basis: &[BitVector], n: usize, i: usize, mut f: impl FnMut(&BitVector)) {
    for p in bincode::star_family(basis, n, i) {
        f(&p);
    }
}

fn h_constraints(pair: &NestedCodePair, ell: u32, sink: &mut ConstraintSink) {
    let n = pair.len();
    let beta1 = pair.beta1();
    for i in 0..ell as usize {
        let scale = pow2_mod(i, ell);
        for_each_family(&beta1, n, i, |p| {
            for v in pair.beta2() {
                let mut q = p.clone();
                q.and_assign(v);
                sink.push_bits(&q, scale);
            }
        });
    }
}

/// The rows generating `H_N^perp`: `2^i (v * p)` with `v` in `beta2` and `p`
/// in `beta1^(i)`, `0 <= i < l`. Zero rows and repeats are dropped; the order
/// is first occurrence in (i, subset, v) order.
pub fn stabilizer_constraints(pair: &NestedCodePair, ell: u32) -> Result<Vec<ZVector>> {
    check_level(ell)?;
    let n = pair.len();
    let beta1 = pair.beta1();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for i in 0..ell as usize {
        let scale = pow2_mod(i, ell);
        for_each_family(&beta1, n, i, |p| {
            for v in pair.beta2() {
                let mut q = p.clone();
                q.and_assign(v);
                let row = ZVector::lift(&q, ell, scale);
                if !row.is_zero() && seen.insert(row.clone()) {
                    out.push(row);
                }
            }
        });
    }
    Ok(out)
}

/// `H_N`, `T_N` and `Id_N` of one code at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateGroups {
    pub ell: u32,
    pub h: ZModule,
    pub t: ZModule,
    pub id: ZModule,
}

fn unsigned_groups(pair: &NestedCodePair, ell: u32) -> Result<GateGroups> {
    check_level(ell)?;
    let n = pair.len();
    let beta1 = pair.beta1();

    let mut h_sink = ConstraintSink::new(n, ell)?;
    h_constraints(pair, ell, &mut h_sink);
    let h = h_sink.kernel();

    // T_N, first route
    let mut t_sink = ConstraintSink::new(n, ell)?;
    for v in pair.beta2() {
        t_sink.push_bits(v, 1);
    }
    for i in 2..=ell as usize {
        let scale = pow2_mod(i - 1, ell);
        for_each_family(&beta1, n, i, |p| t_sink.push_bits(p, scale));
    }
    let t = t_sink.kernel();

    // T_N, second route
    let mut tx_sink = ConstraintSink::new(n, ell)?;
    let offset = pair.beta2().len();
    for i in 1..ell as usize {
        let scale = pow2_mod(i, ell);
        bincode::for_each_subset_product(&beta1, n, i, |idx, p| {
            for (j, w) in pair.extension().iter().enumerate() {
                // w * p must be a product of i + 1 distinct members
                if idx.contains(&(offset + j)) {
                    continue;
                }
                let mut q = p.clone();
                q.and_assign(w);
                tx_sink.push_bits(&q, scale);
            }
        });
    }
    let t_alt = h.intersect(&tx_sink.kernel())?;
    if t != t_alt {
        return Err(Error::Inconsistent("the two forms of T_N disagree"));
    }

    // Id_N, first route
    let mut id_sink = ConstraintSink::new(n, ell)?;
    for i in 1..=ell as usize {
        let scale = pow2_mod(i - 1, ell);
        for_each_family(&beta1, n, i, |p| id_sink.push_bits(p, scale));
    }
    let id = id_sink.kernel();

    // Id_N, second route
    let mut ext_sink = ConstraintSink::new(n, ell)?;
    for w in pair.extension() {
        ext_sink.push_bits(w, 1);
    }
    let id_alt = t.intersect(&ext_sink.kernel())?;
    if id != id_alt {
        return Err(Error::Inconsistent("the two forms of Id_N disagree"));
    }

    // with no logical qubits every element of H_N is trivially transversal
    let t = if pair.logical_count() == 0 {
        h.clone()
    } else {
        t
    };
    Ok(GateGroups { ell, h, t, id })
}

/// Image of a module under `b -> b_{y_z}`.
fn conjugate_module(m: &ZModule, y_z: &BitVector) -> Result<ZModule> {
    let mut b = HowellBuilder::new(m.len(), m.ell())?;
    for g in m.gens() {
        b.push(&conjugate_by_yz(g, y_z)?.0)?;
    }
    Ok(b.finish())
}

/// Computes all three groups. For `y_z != 0` the groups of `Q(C1, C2)` are
/// carried over by `b -> b_{y_z}`; `Id_N` additionally needs `b . y_z = 0`.
pub fn compute_groups(css: &CssCode, ell: u32) -> Result<GateGroups> {
    let base = unsigned_groups(css.pair(), ell)?;
    if css.y_z().is_zero() {
        return Ok(base);
    }
    let y = css.y_z();
    let h = conjugate_module(&base.h, y)?;
    let t = conjugate_module(&base.t, y)?;
    let mut phase_free = HowellBuilder::new(css.len(), ell)?;
    phase_free.push(&ZVector::lift(y, ell, 1))?;
    let id = conjugate_module(&base.id, y)?.intersect(&phase_free.finish().annihilator())?;
    Ok(GateGroups { ell, h, t, id })
}

pub fn compute_h(css: &CssCode, ell: u32) -> Result<ZModule> {
    Ok(compute_groups(css, ell)?.h)
}

pub fn compute_t(css: &CssCode, ell: u32) -> Result<ZModule> {
    Ok(compute_groups(css, ell)?.t)
}

pub fn compute_id(css: &CssCode, ell: u32) -> Result<ZModule> {
    Ok(compute_groups(css, ell)?.id)
}

/// The span of the `H_N` constraint rows, for the length identity
/// `length(H_N) + length(span) = n l`.
pub fn constraint_span(pair: &NestedCodePair, ell: u32) -> Result<ZModule> {
    let mut sink = ConstraintSink::new(pair.len(), ell)?;
    h_constraints(pair, ell, &mut sink);
    let rows: Vec<ZVector> = sink.rows().cloned().collect();
    crate::zmod::howell_form(&rows, pair.len(), ell)
}

/// `b_{y_z}` (entries negated where `y_z` is one) and the phase `y_z . b`.
pub fn conjugate_by_yz(b: &ZVector, y_z: &BitVector) -> Result<(ZVector, u64)> {
    if b.len() != y_z.len() {
        return Err(Error::LengthMismatch {
            expected: b.len(),
            found: y_z.len(),
        });
    }
    let n = 1u64 << b.ell();
    let entries: Vec<u64> = b
        .entries()
        .iter()
        .enumerate()
        .map(|(i, &e)| if y_z.get(i) { (n - e) % n } else { e })
        .collect();
    Ok((ZVector::new(entries, b.ell())?, b.dot_bits(y_z)))
}

fn check_gate(css: &CssCode, b: &ZVector) -> Result<()> {
    if b.len() != css.len() {
        return Err(Error::LengthMismatch {
            expected: css.len(),
            found: b.len(),
        });
    }
    Ok(())
}

/// `b . (y_z + Bv) mod N`, the exponent of the phase `U(b)` puts on `|v>_L`.
/// Only meaningful as a logical action when `b` lies in `H_N`.
pub fn logical_phase(css: &CssCode, b: &ZVector, v: &BitVector) -> Result<u64> {
    check_gate(css, b)?;
    if v.len() != css.logical_count() {
        return Err(Error::LengthMismatch {
            expected: css.logical_count(),
            found: v.len(),
        });
    }
    let mut x = css.pair().encode(v);
    x.xor_assign(css.y_z());
    Ok(b.dot_bits(&x))
}

/// The diagonal logical action `|v>_L -> w^phi(v) |v>_L` up to the global
/// phase `w^phi(0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseProfile {
    pub k: usize,
    pub ell: u32,
    /// `phi(0)`, removed from `phases`.
    pub global_phase: u64,
    /// `phases[x] = phi(v) - phi(0)` where bit `i` of `x` is `v_i`.
    pub phases: Vec<u64>,
    /// False when `b` is not in `H_N`, so the profile is not a logical action.
    pub well_defined: bool,
}

impl PhaseProfile {
    #[must_use]
    pub fn phase(&self, v: &BitVector) -> u64 {
        let x = v.ones_iter().fold(0usize, |acc, i| acc | (1 << i));
        self.phases[x]
    }

    /// True when `phi(v) = sum_i v_i phi(e_i)`.
    #[must_use]
    pub fn is_transversal(&self) -> bool {
        let m = (1u64 << self.ell) - 1;
        (0..self.phases.len()).all(|x| {
            let lin = (0..self.k)
                .filter(|i| x >> i & 1 == 1)
                .fold(0u64, |acc, i| acc.wrapping_add(self.phases[1 << i]));
            lin & m == self.phases[x]
        })
    }

    #[must_use]
    pub fn is_identity(&self) -> bool {
        self.global_phase == 0 && self.phases.iter().all(|&p| p == 0)
    }

    /// `(phi(e_1), .., phi(e_K))`.
    #[must_use]
    pub fn single_qubit_phases(&self) -> Vec<u64> {
        (0..self.k).map(|i| self.phases[1 << i]).collect()
    }
}

/// Tabulates `phi(v)` for every `v` in `F_2^K`.
pub fn phase_profile(css: &CssCode, h: &ZModule, b: &ZVector) -> Result<PhaseProfile> {
    check_gate(css, b)?;
    let k = css.logical_count();
    if k > MAX_PROFILE_QUBITS {
        return Err(Error::TooLarge {
            what: "logical qubit count for a phase profile",
            limit: MAX_PROFILE_QUBITS as u64,
        });
    }
    let well_defined = h.contains(b)?;
    let m = (1u64 << b.ell()) - 1;
    let global_phase = b.dot_bits(css.y_z());
    let ext = css.pair().extension();
    let mut x = css.y_z().clone();
    let mut phases = vec![0u64; 1 << k];
    // Gray-code walk over the cosets
    let mut code = 0usize;
    for step in 1usize..(1 << k) {
        let flip = step.trailing_zeros() as usize;
        x.xor_assign(&ext[flip]);
        code ^= 1 << flip;
        phases[code] = b.dot_bits(&x).wrapping_sub(global_phase) & m;
    }
    Ok(PhaseProfile {
        k,
        ell: b.ell(),
        global_phase,
        phases,
        well_defined,
    })
}

/// `C_J-U(a)`: phase `w^a` exactly when every logical qubit in `J` is one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ControlledFactor {
    /// Zero-based logical qubit indices, increasing.
    pub qubits: Vec<usize>,
    pub a: u64,
}

/// The logical action of `U(b)` as a global phase times a product of
/// controlled phases, sorted by `(|J|, J)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalDecomposition {
    pub k: usize,
    pub ell: u32,
    pub global_phase: u64,
    pub factors: Vec<ControlledFactor>,
}

impl LogicalDecomposition {
    /// Reassembles `phi(v) - phi(0) = sum_J (prod_{i in J} v_i) a_J`.
    #[must_use]
    pub fn phase(&self, v: &BitVector) -> u64 {
        let m = (1u64 << self.ell) - 1;
        self.factors
            .iter()
            .filter(|f| f.qubits.iter().all(|&i| v.get(i)))
            .fold(0u64, |acc, f| acc.wrapping_add(f.a))
            & m
    }

    /// Factors as `(one-based J, a)` pairs.
    #[must_use]
    pub fn one_based(&self) -> Vec<(Vec<usize>, u64)> {
        self.factors
            .iter()
            .map(|f| (f.qubits.iter().map(|i| i + 1).collect(), f.a))
            .collect()
    }
}

/// `a_J = (-2)^(|J|-1) (b . (w_j1 * .. * w_jh)) mod N` for every nonempty `J`
/// with `a_J != 0`. Sizes above `l` contribute nothing and are skipped. With
/// `y_z != 0` the decomposition is that of `b_{y_z}` on `Q(C1, C2)` and
/// `y_z . b` becomes the global phase.
pub fn decompose_action(css: &CssCode, b: &ZVector) -> Result<LogicalDecomposition> {
    check_gate(css, b)?;
    let ell = b.ell();
    let m = (1u64 << ell) - 1;
    let (b_eff, global_phase) = conjugate_by_yz(b, css.y_z())?;
    let ext = css.pair().extension();
    let k = ext.len();
    let n = css.len();
    let mut factors = Vec::new();
    for h in 1..=k.min(ell as usize) {
        let mag = pow2_mod(h - 1, ell);
        let coef = if h % 2 == 1 {
            mag
        } else {
            mag.wrapping_neg() & m
        };
        bincode::for_each_subset_product(ext, n, h, |idx, p| {
            let a = coef.wrapping_mul(b_eff.dot_bits(p)) & m;
            if a != 0 {
                factors.push(ControlledFactor {
                    qubits: idx.to_vec(),
                    a,
                });
            }
        });
    }
    Ok(LogicalDecomposition {
        k,
        ell,
        global_phase,
        factors,
    })
}

/// `c_i = b . w_i mod N`, the single-qubit phases of a transversal gate.
pub fn transversal_phases(css: &CssCode, b: &ZVector) -> Result<ZVector> {
    check_gate(css, b)?;
    let (b_eff, _) = conjugate_by_yz(b, css.y_z())?;
    let c: Vec<u64> = css
        .pair()
        .extension()
        .iter()
        .map(|w| b_eff.dot_bits(w))
        .collect();
    ZVector::new(c, b.ell())
}

/// `cM` over `Z_N`, `M` a `K x K` matrix over GF(2) given by rows. Column `j`
/// of `M` holds the coordinates of the new representative `w'_j` in the old
/// ones.
pub fn rebase_action(c: &ZVector, m: &[BitVector]) -> Result<ZVector> {
    let k = c.len();
    if m.len() != k {
        return Err(Error::LengthMismatch {
            expected: k,
            found: m.len(),
        });
    }
    for row in m {
        if row.len() != k {
            return Err(Error::LengthMismatch {
                expected: k,
                found: row.len(),
            });
        }
    }
    if bincode::rank(m) != k {
        return Err(Error::Singular);
    }
    let out: Vec<u64> = (0..k)
        .map(|j| {
            (0..k)
                .filter(|&i| m[i].get(j))
                .fold(0u64, |acc, i| acc.wrapping_add(c.entries()[i]))
        })
        .collect();
    ZVector::new(out, c.ell())
}

/// What the all-ones gate `U(1, .., 1)` does on `Q(C1, C2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AllOnesReport {
    pub in_h: bool,
    pub in_t: bool,
    pub in_id: bool,
    /// `C2 <= (C1^(l-1))^perp`.
    pub css_t_necessary: bool,
    /// `wt(u + Bv) = sum_i v_i wt(w_i) mod N` for all `u`, `v`.
    pub weights_condition: Option<bool>,
    /// `wt(u + Bv) = |v| mod N` for all `u`, `v`.
    pub transversal_u: Option<bool>,
    /// Every codeword weight of `C1` divisible by `N`.
    pub divisible: Option<bool>,
}

/// Evaluates the all-ones gate against `groups` (which must be the groups of
/// `Q(C1, C2)`) and cross-checks the weight characterizations.
pub fn allones_report(pair: &NestedCodePair, groups: &GateGroups) -> Result<AllOnesReport> {
    let ell = groups.ell;
    let n = pair.len();
    let ones = ZVector::lift(&BitVector::ones(n), ell, 1);
    let in_h = groups.h.contains(&ones)?;
    let in_t = groups.t.contains(&ones)?;
    let in_id = groups.id.contains(&ones)?;

    let power = if ell == 1 {
        BinaryCode::from_rows(n, [BitVector::ones(n)])?
    } else {
        pair.c1().schur_power(ell as usize - 1)
    };
    let css_t_necessary = pair.c2().is_subcode_of(&power.dual());

    let (mut weights_condition, mut transversal_u, mut divisible) = (None, None, None);
    if pair.c1().dim() <= MAX_WEIGHT_SCAN_DIM {
        let m = (1u64 << ell) - 1;
        let ext = pair.extension();
        let single: Vec<u64> = ext.iter().map(|w| w.weight() as u64).collect();
        let (mut wc, mut tu, mut dv) = (true, true, true);
        let mut rep = BitVector::zeros(n);
        let (mut lin, mut count) = (0u64, 0u64);
        let mut code = 0usize;
        for step in 0usize..(1 << ext.len()) {
            if step > 0 {
                let flip = step.trailing_zeros() as usize;
                rep.xor_assign(&ext[flip]);
                code ^= 1 << flip;
                lin = (0..ext.len())
                    .filter(|i| code >> i & 1 == 1)
                    .map(|i| single[i])
                    .sum();
                count = code.count_ones() as u64;
            }
            for u in pair.c2().codewords() {
                let wt = u.xor(&rep).weight() as u64;
                wc &= (wt.wrapping_sub(lin)) & m == 0;
                tu &= (wt.wrapping_sub(count)) & m == 0;
                dv &= wt & m == 0;
            }
        }
        weights_condition = Some(wc);
        transversal_u = Some(tu);
        divisible = Some(dv);
    }

    if in_h && !css_t_necessary {
        return Err(Error::Inconsistent(
            "all-ones gate in H_N but C2 not in (C1^(l-1))^perp",
        ));
    }
    if weights_condition.is_some_and(|wc| wc != in_t) {
        return Err(Error::Inconsistent(
            "all-ones membership in T_N disagrees with weight scan",
        ));
    }
    if let Some(tu) = transversal_u {
        let all_u = in_t
            && pair
                .extension()
                .iter()
                .all(|w| (w.weight() as u64) & ((1 << ell) - 1) == 1);
        if tu != all_u {
            return Err(Error::Inconsistent(
                "transversal-U weight scan disagrees with T_N",
            ));
        }
    }
    if divisible.is_some_and(|d| d != in_id) {
        return Err(Error::Inconsistent(
            "all-ones membership in Id_N disagrees with divisibility",
        ));
    }
    Ok(AllOnesReport {
        in_h,
        in_t,
        in_id,
        css_t_necessary,
        weights_condition,
        transversal_u,
        divisible,
    })
}

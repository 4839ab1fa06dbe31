//! Brute-force classification of diagonal gates, straight from the
//! definitions. Nothing here calls the group computations in
//! [`crate::gates`]; only vectors, codes and the [`PhaseProfile`] record are
//! shared.
//!
//! `U(b)` multiplies `|x>` by `w^(b . x)`. A basis state of `Q(C1, C2, y_x, y_z)`
//! is supported on a coset `y_z + w_v + C2`, so `U(b)` fixes the code exactly
//! when `b . x` is constant on every such coset.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::bincode::BitVector;
use crate::error::{Error, Result};
use crate::gates::{CssCode, PhaseProfile};
use crate::zmod::{check_level, ZVector};

pub const MAX_C2_DIM: usize = 24;
pub const MAX_LOGICAL: usize = 16;
pub const MAX_AMPLITUDE_C2_DIM: usize = 16;
pub const MAX_AMPLITUDE_LEN: usize = 24;
pub const MAX_SEARCH: u64 = 1 << 22;

/// Classification levels, ordered so that each implies the ones below it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Class {
    NotInH,
    InH,
    TransversalLogical,
    LogicalIdentity,
}

/// Evidence that a gate fails the next class up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// `b . (x + u)` differs from `b . x` for `x = y_z + Bv` and `u` in `C2`.
    Coset { v: BitVector, u: BitVector },
    /// The phase profile is nonlinear at `v`.
    Nonlinear { v: BitVector },
    /// The logical state `v` picks up a nonzero phase.
    Phase { v: BitVector },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateClass {
    pub class: Class,
    pub witness: Option<Witness>,
    pub profile: Option<PhaseProfile>,
}

/// Which group to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Group {
    H,
    T,
    Id,
}

impl Group {
    fn min_class(self) -> Class {
        match self {
            Group::H => Class::InH,
            Group::T => Class::TransversalLogical,
            Group::Id => Class::LogicalIdentity,
        }
    }
}

/// Every physical basis vector of every logical state.
struct Cosets {
    k: usize,
    c2: Vec<BitVector>,
    /// `reps[x] = y_z + sum_i v_i w_i` with bit `i` of `x` equal to `v_i`
    reps: Vec<BitVector>,
}

impl Cosets {
    fn new(css: &CssCode) -> Result<Self> {
        let pair = css.pair();
        if pair.c2().dim() > MAX_C2_DIM {
            return Err(Error::TooLarge {
                what: "dim C2 for coset enumeration",
                limit: MAX_C2_DIM as u64,
            });
        }
        let k = pair.logical_count();
        if k > MAX_LOGICAL {
            return Err(Error::TooLarge {
                what: "logical qubits for coset enumeration",
                limit: MAX_LOGICAL as u64,
            });
        }
        let c2: Vec<BitVector> = pair.c2().codewords().collect();
        let reps = (0..1usize << k)
            .map(|x| {
                let mut r = css.y_z().clone();
                for (i, w) in pair.extension().iter().enumerate() {
                    if x >> i & 1 == 1 {
                        r.xor_assign(w);
                    }
                }
                r
            })
            .collect();
        Ok(Self { k, c2, reps })
    }

    fn logical(&self, x: usize) -> BitVector {
        let mut v = BitVector::zeros(self.k);
        for i in 0..self.k {
            if x >> i & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }

    fn classify(&self, b: &ZVector) -> GateClass {
        let ell = b.ell();
        let m = (1u64 << ell) - 1;
        let dot = |x: &BitVector| -> u64 {
            x.ones_iter()
                .fold(0u64, |acc, i| acc.wrapping_add(b.entries()[i]))
                & m
        };
        let mut raw = vec![0u64; self.reps.len()];
        for (x, rep) in self.reps.iter().enumerate() {
            let base = dot(rep);
            for u in &self.c2 {
                if dot(&rep.xor(u)) != base {
                    return GateClass {
                        class: Class::NotInH,
                        witness: Some(Witness::Coset {
                            v: self.logical(x),
                            u: u.clone(),
                        }),
                        profile: None,
                    };
                }
            }
            raw[x] = base;
        }
        let global = raw[0];
        let phases: Vec<u64> = raw.iter().map(|p| p.wrapping_sub(global) & m).collect();
        let profile = PhaseProfile {
            k: self.k,
            ell,
            global_phase: global,
            phases: phases.clone(),
            well_defined: true,
        };
        for x in 0..phases.len() {
            let lin = (0..self.k)
                .filter(|i| x >> i & 1 == 1)
                .fold(0u64, |acc, i| acc.wrapping_add(phases[1 << i]))
                & m;
            if lin != phases[x] {
                return GateClass {
                    class: Class::InH,
                    witness: Some(Witness::Nonlinear { v: self.logical(x) }),
                    profile: Some(profile),
                };
            }
        }
        if let Some(x) = raw.iter().position(|&p| p != 0) {
            return GateClass {
                class: Class::TransversalLogical,
                witness: Some(Witness::Phase { v: self.logical(x) }),
                profile: Some(profile),
            };
        }
        GateClass {
            class: Class::LogicalIdentity,
            witness: None,
            profile: Some(profile),
        }
    }
}

/// Decides how `U(b)` acts on the code by checking phase constancy on every
/// coset `y_z + Bv + C2`, then linearity and vanishing of the phases.
pub fn coset_phase_check(css: &CssCode, b: &ZVector) -> Result<GateClass> {
    if b.len() != css.len() {
        return Err(Error::LengthMismatch {
            expected: css.len(),
            found: b.len(),
        });
    }
    Ok(Cosets::new(css)?.classify(b))
}

/// All `b` in `Z_N^n` whose class is at least that of `which`, in odometer
/// order (last coordinate fastest). The result is checked to be a group.
pub fn enumerate_group(css: &CssCode, ell: u32, which: Group) -> Result<Vec<ZVector>> {
    check_level(ell)?;
    let n = css.len();
    let modulus = 1u64 << ell;
    let total = (ell as u64)
        .checked_mul(n as u64)
        .filter(|&bits| bits <= 22)
        .map(|bits| 1u64 << bits)
        .ok_or(Error::TooLarge {
            what: "search space N^n",
            limit: MAX_SEARCH,
        })?;
    let cosets = Cosets::new(css)?;
    let want = which.min_class();
    let mut out = Vec::new();
    let mut digits = vec![0u64; n];
    for _ in 0..total {
        let b = ZVector::new(digits.clone(), ell)?;
        if cosets.classify(&b).class >= want {
            out.push(b);
        }
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < modulus {
                break;
            }
            *d = 0;
        }
    }
    if !is_subgroup(&out, n, ell) {
        return Err(Error::Inconsistent(
            "enumerated gate set is not closed under addition",
        ));
    }
    Ok(out)
}

/// Grows the subgroup generated by `set` one element at a time and compares.
fn is_subgroup(set: &[ZVector], n: usize, ell: u32) -> bool {
    let members: alloc::collections::BTreeSet<&ZVector> = set.iter().collect();
    let mut span = alloc::collections::BTreeSet::new();
    span.insert(ZVector::zeros(n, ell));
    for s in set {
        if span.contains(s) {
            continue;
        }
        let mut next = span.clone();
        let mut mult = s.clone();
        while !mult.is_zero() {
            for x in &span {
                next.insert(x.add(&mult));
            }
            mult = mult.add(s);
        }
        span = next;
        if span.len() > members.len() {
            return false;
        }
    }
    span.len() == members.len() && span.iter().all(|x| members.contains(x))
}

/// Applies `U(b)` to every basis state `|C2 + w + y_z>` as an explicit sparse
/// amplitude vector and tests whether the image is a multiple of one basis
/// state. Amplitudes are exponents of `exp(2 pi i / 2N)`, so signs
/// `(-1)^(y_x . v)` are the exponent `N`.
pub fn amplitude_fix_check(css: &CssCode, b: &ZVector) -> Result<bool> {
    if b.len() != css.len() {
        return Err(Error::LengthMismatch {
            expected: css.len(),
            found: b.len(),
        });
    }
    let pair = css.pair();
    if pair.c2().dim() > MAX_AMPLITUDE_C2_DIM || css.len() > MAX_AMPLITUDE_LEN {
        return Err(Error::TooLarge {
            what: "amplitude check size (dim C2 <= 16, n <= 24)",
            limit: MAX_AMPLITUDE_C2_DIM as u64,
        });
    }
    if pair.logical_count() > MAX_LOGICAL {
        return Err(Error::TooLarge {
            what: "logical qubits for amplitude check",
            limit: MAX_LOGICAL as u64,
        });
    }
    let n_mod = 1u64 << b.ell();
    let two_n = 2 * n_mod;
    let c2: Vec<BitVector> = pair.c2().codewords().collect();

    let states: Vec<BTreeMap<BitVector, u64>> = (0..1usize << pair.logical_count())
        .map(|x| {
            let mut w = css.y_z().clone();
            for (i, e) in pair.extension().iter().enumerate() {
                if x >> i & 1 == 1 {
                    w.xor_assign(e);
                }
            }
            c2.iter()
                .map(|v| {
                    let sign = if v.dot(css.y_x()) { n_mod } else { 0 };
                    (v.xor(&w), sign)
                })
                .collect()
        })
        .collect();

    for state in &states {
        let image: BTreeMap<BitVector, u64> = state
            .iter()
            .map(|(x, &e)| {
                let phase = x
                    .ones_iter()
                    .fold(0u64, |acc, i| acc.wrapping_add(b.entries()[i]))
                    % n_mod;
                (x.clone(), (e + 2 * phase) % two_n)
            })
            .collect();
        let proportional = states.iter().any(|target| {
            if target.len() != image.len() || !target.keys().eq(image.keys()) {
                return false;
            }
            let mut ratios = image
                .values()
                .zip(target.values())
                .map(|(a, t)| (a + two_n - t) % two_n);
            let first = ratios.next();
            ratios.all(|r| Some(r) == first)
        });
        if !proportional {
            return Ok(false);
        }
    }
    Ok(true)
}

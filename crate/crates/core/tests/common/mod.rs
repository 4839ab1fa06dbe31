#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use transversal_core::bincode::{rank, BinaryCode, BitVector, NestedCodePair};
use transversal_core::gates::{build_css, CssCode};
use transversal_core::monomial::{
    check_h_hypotheses, check_t_id_hypotheses, Monomial, MonomialCodeSpec, MonomialSet,
};

pub fn bits(s: &str) -> BitVector {
    s.parse().unwrap()
}

pub fn ex1_spec() -> MonomialCodeSpec {
    MonomialCodeSpec::new(
        MonomialSet::parse(4, ["1", "x1", "x2", "x3", "x4", "x1x2"]).unwrap(),
        MonomialSet::parse(4, ["1"]).unwrap(),
    )
    .unwrap()
}

pub fn ex1() -> CssCode {
    ex1_spec().css()
}

pub fn ex2_pair() -> NestedCodePair {
    NestedCodePair::from_bases(2, vec![bits("11")], vec![bits("10")]).unwrap()
}

pub fn ex2() -> CssCode {
    CssCode::unsigned(ex2_pair())
}

pub fn ex3_spec() -> MonomialCodeSpec {
    MonomialCodeSpec::reed_muller(0, 1, 4).unwrap()
}

pub fn ex3() -> CssCode {
    ex3_spec().css()
}

pub fn hamming() -> BinaryCode {
    BinaryCode::from_rows(7, ["1101000", "0110100", "0011010", "0001101"].map(bits)).unwrap()
}

pub fn ex4() -> CssCode {
    let c1 = hamming();
    build_css(&c1, &c1.dual(), None, None).unwrap()
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> BitVector {
    let bools: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    BitVector::from_bools(&bools)
}

/// A uniformly random `k`-dimensional code of length `n`.
pub fn random_code(rng: &mut ChaCha8Rng, n: usize, k: usize) -> BinaryCode {
    loop {
        let rows: Vec<BitVector> = (0..k).map(|_| random_vector(rng, n)).collect();
        if rank(&rows) == k {
            return BinaryCode::from_rows(n, rows).unwrap();
        }
    }
}

fn combination(rng: &mut ChaCha8Rng, rows: &[BitVector], n: usize) -> BitVector {
    let mut v = BitVector::zeros(n);
    for r in rows {
        if rng.gen() {
            v.xor_assign(r);
        }
    }
    v
}

/// Random `C2 <= C1` with `n` in `2..=max_n` and `dim C1 <= max_k1`.
pub fn random_pair(rng: &mut ChaCha8Rng, max_n: usize, max_k1: usize) -> CssCode {
    let n = rng.gen_range(2..=max_n);
    let k1 = rng.gen_range(1..=max_k1.min(n));
    let k2 = rng.gen_range(0..=k1);
    let c1 = random_code(rng, n, k1);
    let c2 = loop {
        let rows: Vec<BitVector> = (0..k2).map(|_| combination(rng, c1.basis(), n)).collect();
        if rank(&rows) == k2 {
            break BinaryCode::from_rows(n, rows).unwrap();
        }
    };
    build_css(&c1, &c2, None, None).unwrap()
}

/// The same pair with a random basis of `C2` and a random basis of `C1 / C2`
/// (an invertible change of logical basis), with representatives shifted by
/// random elements of `C2`.
pub fn realign(rng: &mut ChaCha8Rng, pair: &NestedCodePair) -> NestedCodePair {
    let ext = random_basis_change(rng, pair.extension(), pair.len());
    shift_representatives(rng, pair, ext)
}

/// Like [`realign`] but keeps every representative in its coset, so the
/// logical basis is unchanged.
pub fn realign_within_cosets(rng: &mut ChaCha8Rng, pair: &NestedCodePair) -> NestedCodePair {
    shift_representatives(rng, pair, pair.extension().to_vec())
}

fn shift_representatives(
    rng: &mut ChaCha8Rng,
    pair: &NestedCodePair,
    ext: Vec<BitVector>,
) -> NestedCodePair {
    let n = pair.len();
    let beta2 = random_basis_change(rng, pair.beta2(), n);
    let ext: Vec<BitVector> = ext
        .into_iter()
        .map(|mut w| {
            w.xor_assign(&combination(rng, pair.beta2(), n));
            w
        })
        .collect();
    NestedCodePair::from_bases(n, beta2, ext).unwrap()
}

fn random_basis_change(rng: &mut ChaCha8Rng, rows: &[BitVector], n: usize) -> Vec<BitVector> {
    loop {
        let out: Vec<BitVector> = (0..rows.len()).map(|_| combination(rng, rows, n)).collect();
        if rank(&out) == rows.len() {
            return out;
        }
    }
}

/// A random decreasing pair `M2 <= M1` in `m` variables, `2 <= m <= max_m`.
pub fn random_decreasing(rng: &mut ChaCha8Rng, max_m: u32) -> MonomialCodeSpec {
    let m = rng.gen_range(2..=max_m);
    let full = (1u32 << m) - 1;
    let tops: Vec<Monomial> = (0..rng.gen_range(1..=3))
        .map(|_| {
            let mut mask = rng.gen_range(0..=full);
            while mask.count_ones() > m - 1 {
                mask &= mask - 1;
            }
            Monomial::new(mask, m).unwrap()
        })
        .collect();
    let m1 = MonomialSet::new(m, tops).unwrap().divisibility_closure();
    let picked: Vec<Monomial> = m1.iter().filter(|_| rng.gen_bool(0.4)).collect();
    let m2 = MonomialSet::new(m, picked.into_iter().chain([Monomial::one(m)]))
        .unwrap()
        .divisibility_closure();
    MonomialCodeSpec::new(m1, m2).unwrap()
}

/// Levels in `1..=max_ell` at which the hypotheses of both monomial closed forms hold,
/// including `|M2| < |M1|`.
pub fn hypothesis_levels(spec: &MonomialCodeSpec, max_ell: u32) -> Vec<u32> {
    if spec.m2().len() >= spec.m1().len() {
        return Vec::new();
    }
    (1..=max_ell)
        .filter(|&ell| {
            check_h_hypotheses(spec, ell).is_ok() && check_t_id_hypotheses(spec, ell).is_ok()
        })
        .collect()
}

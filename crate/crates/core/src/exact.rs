//! Ground-truth solvers and the modular list join.

use crate::bits::{low_mask, BinVector};
use crate::error::{Error, Result};
use crate::instance::RsspInstance;

pub const BRUTE_FORCE_MAX_N: usize = 28;
pub const MITM_MAX_N: usize = 48;

/// Every `f` with `<a, f> = s (mod 2^n)`, optionally restricted to weight
/// `n/2`, in lexicographic order.
pub fn brute_force(inst: &RsspInstance, require_half_weight: bool) -> Result<Vec<BinVector>> {
    let n = inst.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::SizeGuard {
            what: "n",
            value: n as u64,
            limit: BRUTE_FORCE_MAX_N as u64,
        });
    }
    let a = inst.weights();
    let mask = inst.mask();
    let mut out = Vec::new();
    // Gray-code walk: one coordinate flips per step
    let mut bits = 0u64;
    let mut sum = 0u64;
    for step in 0u64..(1u64 << n) {
        if step > 0 {
            let flip = step.trailing_zeros() as usize;
            bits ^= 1 << flip;
            if bits >> flip & 1 == 1 {
                sum = sum.wrapping_add(a[flip]);
            } else {
                sum = sum.wrapping_sub(a[flip]);
            }
        }
        if sum & mask == inst.target()
            && (!require_half_weight || bits.count_ones() as usize * 2 == n)
        {
            out.push(BinVector::from_bits_unchecked(bits, n));
        }
    }
    out.sort();
    Ok(out)
}

/// Horowitz-Sahni split: enumerate both halves over all weights, sort the
/// right half by `s - <a, e2>` and binary-search each left sum.
/// Returns the lexicographically smallest solution, if any.
pub fn meet_in_middle(inst: &RsspInstance) -> Result<Option<BinVector>> {
    let n = inst.n();
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("n must be even, got {n}")));
    }
    if n > MITM_MAX_N {
        return Err(Error::SizeGuard {
            what: "n",
            value: n as u64,
            limit: MITM_MAX_N as u64,
        });
    }
    let h = n / 2;
    let mask = inst.mask();

    let mut right: Vec<(u64, u64)> = (0u64..(1u64 << h))
        .map(|m| {
            let e2 = m << h;
            (inst.target().wrapping_sub(inst.key_bits(e2)) & mask, e2)
        })
        .collect();
    right.sort_unstable();

    // left halves in lexicographic order of their coordinate pattern
    for v in 0u64..(1u64 << h) {
        let e1 = if h == 0 { 0 } else { v.reverse_bits() >> (64 - h) };
        let k1 = inst.key_bits(e1);
        let lo = right.partition_point(|&(k, _)| k < k1);
        let best = right[lo..]
            .iter()
            .take_while(|&&(k, _)| k == k1)
            .map(|&(_, e2)| BinVector::from_bits_unchecked(e1 | e2, n))
            .min();
        if best.is_some() {
            return Ok(best);
        }
    }
    Ok(None)
}

/// Output of a join together with the number of congruent pairs found
/// before `merge` had a chance to reject any.
#[derive(Clone, Debug)]
pub struct JoinOutput<C> {
    pub merged: Vec<C>,
    pub congruent_pairs: usize,
}

/// `{ merge(x1, x2) : key(x1) + key(x2) = R (mod 2^modulus_bits) }`.
///
/// Sorts `l1` by reduced key and binary-searches once per element of `l2`.
/// `merge` may return `None` to drop a pair. Output order is deterministic:
/// by position in `l2`, then by reduced key and position in `l1`.
pub fn join_lists_counted<A, B, C>(
    l1: &[(u64, A)],
    l2: &[(u64, B)],
    modulus_bits: u32,
    residue: u64,
    mut merge: impl FnMut(&(u64, A), &(u64, B)) -> Option<C>,
) -> Result<JoinOutput<C>> {
    if modulus_bits > 64 {
        return Err(Error::InvalidParameter(format!(
            "modulus 2^{modulus_bits} exceeds a machine word"
        )));
    }
    let mask = low_mask(modulus_bits);
    if residue & !mask != 0 {
        return Err(Error::InvalidParameter(format!(
            "residue {residue} is not below 2^{modulus_bits}"
        )));
    }
    let mut sorted: Vec<(u64, usize)> = l1
        .iter()
        .enumerate()
        .map(|(i, (k, _))| (k & mask, i))
        .collect();
    sorted.sort_unstable();

    let mut merged = Vec::new();
    let mut congruent_pairs = 0;
    for x2 in l2 {
        let need = residue.wrapping_sub(x2.0) & mask;
        let lo = sorted.partition_point(|&(k, _)| k < need);
        for &(_, i) in sorted[lo..].iter().take_while(|&&(k, _)| k == need) {
            congruent_pairs += 1;
            if let Some(c) = merge(&l1[i], x2) {
                merged.push(c);
            }
        }
    }
    Ok(JoinOutput { merged, congruent_pairs })
}

pub fn join_lists<A, B, C>(
    l1: &[(u64, A)],
    l2: &[(u64, B)],
    modulus_bits: u32,
    residue: u64,
    merge: impl FnMut(&(u64, A), &(u64, B)) -> Option<C>,
) -> Result<Vec<C>> {
    join_lists_counted(l1, l2, modulus_bits, residue, merge).map(|o| o.merged)
}

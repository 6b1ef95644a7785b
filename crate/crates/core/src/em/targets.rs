use rand::Rng;

use crate::bits::low_mask;
use crate::error::{Error, Result};

/// Modular join targets `s^(i)_j` for levels `1..=d`.
///
/// `moduli[i] = k_i + l_i = l_1 + ... + l_i`, with `l_d = n - sum` implied,
/// so the top level always works modulo `2^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelTargets {
    depth: usize,
    moduli: Vec<u32>,
    targets: Vec<Vec<u64>>,
}

impl LevelTargets {
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `k_i + l_i` for level `i`; level 0 has modulus bits 0.
    pub fn modulus_bits(&self, level: usize) -> u32 {
        self.moduli[level]
    }

    /// `k_i`, the bits already fixed by level `i - 1`.
    pub fn fixed_bits(&self, level: usize) -> u32 {
        self.moduli[level - 1]
    }

    /// `s^(level)_j` with 0-based `j`.
    pub fn target(&self, level: usize, j: usize) -> u64 {
        self.targets[level][j]
    }

    pub fn level(&self, level: usize) -> &[u64] {
        &self.targets[level]
    }

    /// Checks both consistency laws against the top target `s`.
    pub fn check(&self, s: u64) -> bool {
        (1..=self.depth).all(|i| {
            let m = low_mask(self.moduli[i]);
            let k = low_mask(self.moduli[i - 1]);
            let row = &self.targets[i];
            let total = row.iter().fold(0u64, |a, &t| a.wrapping_add(t));
            let pairs_ok = i == 1
                || row.iter().enumerate().all(|(j, &t)| {
                    let below = &self.targets[i - 1];
                    (t.wrapping_sub(below[2 * j]).wrapping_sub(below[2 * j + 1])) & k == 0
                });
            row.iter().all(|&t| t & !m == 0) && (total.wrapping_sub(s)) & m == 0 && pairs_ok
        })
    }
}

/// Full split `(l_1, ..., l_d)` with `l_d = n - (l_1 + ... + l_{d-1})`.
pub fn full_split(n: usize, l: &[usize], depth: usize) -> Result<Vec<usize>> {
    if depth < 1 || l.len() + 1 != depth {
        return Err(Error::InvalidParameter(format!(
            "depth {depth} needs {} split sizes, got {}",
            depth.saturating_sub(1),
            l.len()
        )));
    }
    let used: usize = l.iter().sum();
    if used > n {
        return Err(Error::InvalidParameter(format!(
            "split sizes sum to {used}, exceeding n = {n}"
        )));
    }
    let mut out = l.to_vec();
    out.push(n - used);
    Ok(out)
}

/// Algorithm 1 steps (2.1)-(2.3) with uniformly random free bits.
pub fn choose_targets(
    s: u64,
    n: usize,
    l: &[usize],
    depth: usize,
    rng: &mut impl Rng,
) -> Result<LevelTargets> {
    choose_targets_with(s, n, l, depth, |bits| rng.gen::<u64>() & low_mask(bits))
}

/// Same as [`choose_targets`] with the free high bits supplied by `draw`,
/// which receives the number of bits wanted.
pub fn choose_targets_with(
    s: u64,
    n: usize,
    l: &[usize],
    depth: usize,
    mut draw: impl FnMut(u32) -> u64,
) -> Result<LevelTargets> {
    let split = full_split(n, l, depth)?;
    let mut moduli = vec![0u32];
    for &li in &split {
        moduli.push(moduli.last().unwrap() + li as u32);
    }
    let s = s & low_mask(n as u32);
    let mut targets = vec![Vec::new()];
    for i in 1..=depth {
        let count = 1usize << (depth - i);
        let k = moduli[i - 1];
        let m = low_mask(moduli[i]);
        let li = split[i - 1] as u32;
        let mut row = Vec::with_capacity(count);
        for j in 0..count - 1 {
            let low = if i == 1 {
                0
            } else {
                let below: &Vec<u64> = &targets[i - 1];
                below[2 * j].wrapping_add(below[2 * j + 1]) & low_mask(k)
            };
            let high = if li == 0 || k >= 64 { 0 } else { (draw(li) & low_mask(li)) << k };
            row.push((low | high) & m);
        }
        let sum = row.iter().fold(0u64, |a, &t| a.wrapping_add(t));
        row.push(s.wrapping_sub(sum) & m);
        targets.push(row);
    }
    Ok(LevelTargets { depth, moduli, targets })
}

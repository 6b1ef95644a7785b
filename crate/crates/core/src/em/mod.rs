//! The classical EM^(d) representation solver (Algorithm 1) for `d` in {3, 4}.

mod sample;
mod targets;

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::{low_mask, BinVector};
use crate::error::{Error, Result};
use crate::exact::{join_lists_counted, JoinOutput};
use crate::instance::RsspInstance;

pub use sample::{
    default_level0_size, draw_half, is_degenerate_rate, sample_level0, sample_with_replacement,
    Side,
};
pub use targets::{choose_targets, choose_targets_with, full_split, LevelTargets};

/// A list element with its cached key `<a, x> mod 2^n`.
pub type Keyed = (u64, BinVector);

#[derive(Clone, Debug, PartialEq)]
pub struct EmParams {
    pub alpha: f64,
    pub depth: usize,
    /// `(l_1, ..., l_{d-1})`; `l_d` is whatever remains of `n`.
    pub l: Vec<usize>,
    pub retries: usize,
    /// Overrides `C(n/2, round(alpha n/2))`.
    pub level0_size: Option<u64>,
    pub sample_budget: Option<u64>,
}

impl EmParams {
    pub fn new(alpha: f64, l: Vec<usize>) -> Self {
        EmParams {
            alpha,
            depth: l.len() + 1,
            l,
            retries: 0,
            level0_size: None,
            sample_budget: None,
        }
    }

    pub fn with_retries(mut self, retries: usize) -> Self {
        self.retries = retries;
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(3..=4).contains(&self.depth) {
            return Err(Error::InvalidParameter(format!(
                "executable depth must be 3 or 4, got {}",
                self.depth
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("n must be even, got {n}")));
        }
        full_split(n, &self.l, self.depth).map(|_| ())
    }
}

/// `levels[i][j]` holds the filtered list `L^(i)_j` (0-based `j`).
#[derive(Clone, Debug, PartialEq)]
pub struct ListTree {
    pub levels: Vec<Vec<Vec<Keyed>>>,
    /// Congruent pairs found before filtering, per node; zero at level 0.
    pub raw_sizes: Vec<Vec<usize>>,
}

impl ListTree {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn top(&self) -> &[Keyed] {
        &self.levels[self.depth()][0]
    }
}

/// One node of the join tree with fused filtering: the sum of two binary
/// vectors has a 2-entry exactly when their supports meet.
pub fn join_level(
    left: &[Keyed],
    right: &[Keyed],
    modulus_bits: u32,
    residue: u64,
    n: usize,
) -> Result<JoinOutput<Keyed>> {
    let mask = low_mask(n as u32);
    join_lists_counted(left, right, modulus_bits, residue, |x1, x2| {
        x1.1.disjoint_sum(&x2.1)
            .map(|v| (x1.0.wrapping_add(x2.0) & mask, v))
    })
}

/// Reference join: materializes every congruent sum in `{0,1,2}^n`, then
/// drops those containing a 2. Quadratic, for testing only.
pub fn two_phase_join(
    left: &[Keyed],
    right: &[Keyed],
    modulus_bits: u32,
    residue: u64,
    n: usize,
) -> Vec<Keyed> {
    let m = low_mask(modulus_bits);
    let mask = low_mask(n as u32);
    let mut sums: Vec<(u64, Vec<u8>)> = Vec::new();
    for x2 in right {
        for x1 in left {
            if x1.0.wrapping_add(x2.0) & m == residue {
                let coords = (0..n)
                    .map(|i| x1.1.get(i) as u8 + x2.1.get(i) as u8)
                    .collect();
                sums.push((x1.0.wrapping_add(x2.0) & mask, coords));
            }
        }
    }
    sums.into_iter()
        .filter(|(_, c)| c.iter().all(|&v| v < 2))
        .map(|(k, c)| {
            let bools: Vec<bool> = c.iter().map(|&v| v == 1).collect();
            (k, BinVector::from_coords(&bools).expect("binary after filtering"))
        })
        .collect()
}

/// Builds every level from the given leaves. Sibling joins run in parallel.
pub fn build_tree(
    inst: &RsspInstance,
    leaves: Vec<Vec<BinVector>>,
    targets: &LevelTargets,
) -> Result<ListTree> {
    let d = targets.depth();
    if leaves.len() != 1 << d {
        return Err(Error::InvalidParameter(format!(
            "depth {d} needs {} leaves, got {}",
            1 << d,
            leaves.len()
        )));
    }
    let n = inst.n();
    let level0: Vec<Vec<Keyed>> = leaves
        .into_iter()
        .map(|l| l.into_iter().map(|v| (inst.key(&v), v)).collect())
        .collect();
    let mut levels = vec![level0];
    let mut raw_sizes = vec![vec![0; 1 << d]];
    for i in 1..=d {
        let below = &levels[i - 1];
        let bits = targets.modulus_bits(i);
        let outs: Vec<JoinOutput<Keyed>> = (0..1usize << (d - i))
            .into_par_iter()
            .map(|j| join_level(&below[2 * j], &below[2 * j + 1], bits, targets.target(i, j), n))
            .collect::<Result<_>>()?;
        raw_sizes.push(outs.iter().map(|o| o.congruent_pairs).collect());
        levels.push(outs.into_iter().map(|o| o.merged).collect());
    }
    Ok(ListTree { levels, raw_sizes })
}

/// Draws all `2^d` level-0 lists.
pub fn sample_leaves(n: usize, params: &EmParams, rng: &mut impl Rng) -> Result<Vec<Vec<BinVector>>> {
    (0..1usize << params.depth)
        .map(|j| {
            sample_level0(
                n,
                params.alpha,
                params.level0_size,
                Side::of_leaf(j),
                params.sample_budget,
                rng,
            )
        })
        .collect()
}

/// One complete pass: sample, choose targets, join.
pub fn run_once(
    inst: &RsspInstance,
    params: &EmParams,
    rng: &mut impl Rng,
) -> Result<(LevelTargets, ListTree)> {
    params.validate(inst.n())?;
    let leaves = sample_leaves(inst.n(), params, rng)?;
    let targets = choose_targets(inst.target(), inst.n(), &params.l, params.depth, rng)?;
    let tree = build_tree(inst, leaves, &targets)?;
    Ok((targets, tree))
}

/// Algorithm 1 with up to `retries` additional independent runs.
/// Returns the lexicographically smallest weight-`n/2` vector of the first
/// successful run.
pub fn em_solve(
    inst: &RsspInstance,
    params: &EmParams,
    rng: &mut impl Rng,
) -> Result<Option<BinVector>> {
    for _ in 0..=params.retries {
        let (_, tree) = run_once(inst, params, rng)?;
        let found = tree
            .top()
            .iter()
            .filter(|(_, v)| inst.is_planted_shape(v))
            .map(|&(_, v)| v)
            .min();
        if let Some(e) = found {
            debug_assert!(inst.is_solution(&e));
            return Ok(Some(e));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize)]
pub struct NodeStats {
    pub level: usize,
    pub index: usize,
    pub raw_size: usize,
    pub filtered_size: usize,
}

#[derive(Clone, Debug)]
pub struct RunStats {
    pub n: usize,
    pub depth: usize,
    pub nodes: Vec<NodeStats>,
    /// Top-list entries of weight `n/2`, counted with multiplicity: each is
    /// one surviving level-`d` representation.
    pub representations: usize,
    pub distinct_solutions: usize,
}

impl RunStats {
    pub fn level_count(&self, level: usize) -> usize {
        self.nodes.iter().filter(|s| s.level == level).count()
    }

    /// Mean filtered size over the nodes of one level.
    pub fn mean_size(&self, level: usize) -> f64 {
        let (sum, k) = self
            .nodes
            .iter()
            .filter(|s| s.level == level)
            .fold((0usize, 0usize), |(s, k), x| (s + x.filtered_size, k + 1));
        sum as f64 / k.max(1) as f64
    }

    /// `(raw, filtered)` summed over one level.
    pub fn survival(&self, level: usize) -> (usize, usize) {
        self.nodes
            .iter()
            .filter(|s| s.level == level)
            .fold((0, 0), |(r, f), x| (r + x.raw_size, f + x.filtered_size))
    }
}

/// Single run of Algorithm 1 recording every node size.
pub fn measure_run(inst: &RsspInstance, params: &EmParams, rng: &mut impl Rng) -> Result<RunStats> {
    let (_, tree) = run_once(inst, params, rng)?;
    let mut nodes = Vec::new();
    for (i, level) in tree.levels.iter().enumerate() {
        for (j, list) in level.iter().enumerate() {
            nodes.push(NodeStats {
                level: i,
                index: j,
                raw_size: if i == 0 { list.len() } else { tree.raw_sizes[i][j] },
                filtered_size: list.len(),
            });
        }
    }
    let mut sols: Vec<BinVector> = tree
        .top()
        .iter()
        .filter(|(_, v)| inst.is_planted_shape(v))
        .map(|&(_, v)| v)
        .collect();
    let representations = sols.len();
    sols.sort();
    sols.dedup();
    Ok(RunStats {
        n: inst.n(),
        depth: params.depth,
        nodes,
        representations,
        distinct_solutions: sols.len(),
    })
}

#[derive(Serialize)]
struct ReportRow {
    level: usize,
    index: usize,
    raw_size: usize,
    filtered_size: usize,
    predicted_exponent: Option<f64>,
    representation_count: usize,
    seed: Option<u64>,
}

/// Run report CSV. `predicted[i]` is the model's per-`n` exponent of a
/// level-`i` list, when available.
pub fn write_run_report(
    out: impl Write,
    stats: &RunStats,
    predicted: &[f64],
    seed: Option<u64>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in &stats.nodes {
        w.serialize(ReportRow {
            level: s.level,
            index: s.index,
            raw_size: s.raw_size,
            filtered_size: s.filtered_size,
            predicted_exponent: predicted.get(s.level).copied(),
            representation_count: stats.representations,
            seed,
        })
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Pooled per-coordinate filter survival.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SurvivalCount {
    pub survived: u64,
    pub total: u64,
}

impl SurvivalCount {
    pub fn rate(&self) -> f64 {
        self.survived as f64 / self.total as f64
    }

    pub fn std_error(&self) -> f64 {
        let p = self.rate();
        (p * (1.0 - p) / self.total as f64).sqrt()
    }
}

/// An element that survived filtering at `level`, built from independent
/// Bernoulli half-vectors by rejection.
fn survivor(n: usize, alpha: f64, level: usize, rng: &mut impl Rng) -> BinVector {
    if level <= 1 {
        let l = draw_half(n, alpha, Side::Left, rng);
        let r = draw_half(n, alpha, Side::Right, rng);
        return l.disjoint_sum(&r).expect("halves are disjoint");
    }
    loop {
        let a = survivor(n, alpha, level - 1, rng);
        let b = survivor(n, alpha, level - 1, rng);
        if let Some(v) = a.disjoint_sum(&b) {
            return v;
        }
    }
}

/// Monte Carlo estimate of the per-coordinate rate `g_level`: joins `pairs`
/// independent pairs of level-`(level-1)` survivors and counts coordinates
/// where the two parents do not collide.
pub fn coordinate_survival(
    n: usize,
    alpha: f64,
    level: usize,
    pairs: usize,
    rng: &mut impl Rng,
) -> Result<SurvivalCount> {
    if level < 2 {
        return Err(Error::InvalidParameter(format!(
            "filtering starts at level 2, got {level}"
        )));
    }
    sample::check_rate(n, alpha)?;
    let mut c = SurvivalCount::default();
    for _ in 0..pairs {
        let a = survivor(n, alpha, level - 1, rng);
        let b = survivor(n, alpha, level - 1, rng);
        c.survived += (n as u32 - (a.bits() & b.bits()).count_ones()) as u64;
        c.total += n as u64;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::brute_force;
    use crate::instance::generate_instance;
    use crate::rng::seeded_rng;

    fn kv(n: usize, s: &str, key: u64) -> Keyed {
        let v: BinVector = s.parse().unwrap();
        assert_eq!(v.len(), n);
        (key, v)
    }

    #[test]
    fn join_level_examples() {
        let a = [kv(4, "0101", 0)];
        let b = [kv(4, "1010", 0)];
        let c = [kv(4, "0011", 0)];
        let kept = join_level(&a, &b, 0, 0, 4).unwrap();
        assert_eq!(kept.merged[0].1.to_string(), "1111");
        let dropped = join_level(&a, &c, 0, 0, 4).unwrap();
        assert!(dropped.merged.is_empty());
        assert_eq!(dropped.congruent_pairs, 1);
        assert!(join_level(&[], &b, 0, 0, 4).unwrap().merged.is_empty());
    }

    #[test]
    fn tree_shape_and_filter_invariant() {
        let (inst, _) = generate_instance(16, 5).unwrap();
        let params = EmParams::new(0.25, vec![2, 3, 4]);
        let mut rng = seeded_rng(5);
        let (targets, tree) = run_once(&inst, &params, &mut rng).unwrap();
        let shape: Vec<usize> = tree.levels.iter().map(|l| l.len()).collect();
        assert_eq!(shape, vec![16, 8, 4, 2, 1]);
        for i in 1..=4 {
            let m = low_mask(targets.modulus_bits(i));
            for (j, list) in tree.levels[i].iter().enumerate() {
                for (k, v) in list {
                    assert_eq!(*k, inst.key(v));
                    assert_eq!(k & m, targets.target(i, j));
                }
            }
        }
    }

    #[test]
    fn solves_planted_n16() {
        let mut params = EmParams::new(0.125, vec![1, 2, 2]).with_retries(10);
        params.level0_size = Some(16);
        for seed in 0..5 {
            let (inst, _) = generate_instance(16, seed).unwrap();
            let mut rng = seeded_rng(seed);
            let e = em_solve(&inst, &params, &mut rng).unwrap().expect("solution");
            assert!(inst.is_solution(&e));
            assert!(brute_force(&inst, true).unwrap().contains(&e));
        }
    }

    #[test]
    fn no_half_weight_solution_gives_absent() {
        // all weights even, odd target: nothing verifies
        let inst = RsspInstance::new((1..=16).map(|i| 2 * i).collect(), 1).unwrap();
        let params = EmParams::new(0.25, vec![2, 2, 2]).with_retries(2);
        let mut rng = seeded_rng(1);
        assert_eq!(em_solve(&inst, &params, &mut rng).unwrap(), None);
        let stats = measure_run(&inst, &params, &mut rng).unwrap();
        assert_eq!(stats.representations, 0);
        assert_eq!(
            (0..=4).map(|i| stats.level_count(i)).collect::<Vec<_>>(),
            vec![16, 8, 4, 2, 1]
        );
    }

    #[test]
    fn depth_three_runs() {
        let (inst, _) = generate_instance(16, 2).unwrap();
        let params = EmParams::new(0.3, vec![3, 4]).with_retries(30);
        let mut rng = seeded_rng(2);
        if let Some(e) = em_solve(&inst, &params, &mut rng).unwrap() {
            assert!(inst.is_solution(&e));
        }
        let stats = measure_run(&inst, &params, &mut rng).unwrap();
        assert_eq!(stats.nodes.len(), 8 + 4 + 2 + 1);
    }

    #[test]
    fn invalid_params() {
        assert!(EmParams::new(0.2, vec![1]).validate(16).is_err());
        assert!(EmParams::new(0.0, vec![1, 1, 1]).validate(16).is_err());
        assert!(EmParams::new(0.2, vec![9, 9, 9]).validate(16).is_err());
    }

    #[test]
    fn level_two_survival_close_to_model() {
        let mut rng = seeded_rng(7);
        let c = coordinate_survival(32, 0.2, 2, 2000, &mut rng).unwrap();
        assert!((c.rate() - 0.96).abs() < 4.0 * c.std_error());
    }

    #[test]
    fn report_has_header_and_rows() {
        let (inst, _) = generate_instance(16, 1).unwrap();
        let mut rng = seeded_rng(1);
        let stats = measure_run(&inst, &EmParams::new(0.25, vec![2, 2, 2]), &mut rng).unwrap();
        let mut buf = Vec::new();
        write_run_report(&mut buf, &stats, &[0.5], Some(1)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "level,index,raw_size,filtered_size,predicted_exponent,representation_count,seed"
        );
        assert_eq!(lines.count(), 31);
    }
}

//! Classical model of the quantum-walk vertex: indexed list sets, Johnson
//! graph steps and the incremental delete/insert cascade.

mod spectral;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::Serialize;

use crate::bits::{low_mask, BinVector};
use crate::em::{build_tree, choose_targets, csv_err, LevelTargets};
use crate::error::{Error, Result};
use crate::instance::RsspInstance;

pub use spectral::{johnson_gap_formula, spectral_gap_exact, write_gap_table, GapRow, GAP_GUARD};

/// One list `U^(i)_j` stored twice: `A` keyed by the vector, `B` keyed by
/// `(<a, x> mod 2^m, x)` where `m` is the modulus of the join this list
/// feeds. Both hold multiplicities; the root has no `B`.
///
/// Ordered maps give logarithmic search, insert and delete.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexedList {
    a: BTreeMap<BinVector, u64>,
    b: Option<BTreeMap<(u64, BinVector), u64>>,
    residue_bits: u32,
}

impl IndexedList {
    /// `residue_bits = None` builds a root list without a `B` structure.
    pub fn new(residue_bits: Option<u32>) -> Self {
        IndexedList {
            a: BTreeMap::new(),
            b: residue_bits.map(|_| BTreeMap::new()),
            residue_bits: residue_bits.unwrap_or(0),
        }
    }

    fn residue(&self, key: u64) -> u64 {
        key & low_mask(self.residue_bits)
    }

    pub fn insert(&mut self, x: BinVector, key: u64, count: u64) {
        let r = self.residue(key);
        if let Some(b) = &mut self.b {
            *b.entry((r, x)).or_default() += count;
        }
        *self.a.entry(x).or_default() += count;
    }

    /// Removes up to `count` copies; returns how many were present.
    pub fn remove(&mut self, x: &BinVector, key: u64, count: u64) -> u64 {
        let Some(have) = self.a.get_mut(x) else { return 0 };
        let taken = count.min(*have);
        *have -= taken;
        if *have == 0 {
            self.a.remove(x);
        }
        let r = self.residue(key);
        if let Some(b) = &mut self.b {
            if let Some(c) = b.get_mut(&(r, *x)) {
                *c -= taken.min(*c);
                if *c == 0 {
                    b.remove(&(r, *x));
                }
            }
        }
        taken
    }

    pub fn multiplicity(&self, x: &BinVector) -> u64 {
        self.a.get(x).copied().unwrap_or(0)
    }

    pub fn contains(&self, x: &BinVector) -> bool {
        self.a.contains_key(x)
    }

    /// Entries of `B` with the given residue.
    pub fn search(&self, residue: u64) -> Vec<(BinVector, u64)> {
        let Some(b) = &self.b else { return Vec::new() };
        let residue = self.residue(residue);
        b.range((residue, BinVector::zero(0))..)
            .take_while(|((r, _), _)| *r == residue)
            .map(|((_, x), &c)| (*x, c))
            .collect()
    }

    /// Size counted with multiplicity.
    pub fn len(&self) -> u64 {
        self.a.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn distinct_len(&self) -> usize {
        self.a.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BinVector, u64)> {
        self.a.iter().map(|(x, &c)| (x, c))
    }

    pub fn has_b(&self) -> bool {
        self.b.is_some()
    }

    /// The multiset in `A` equals the multiset of values in `B`.
    pub fn is_mirrored(&self) -> bool {
        let Some(b) = &self.b else { return true };
        let mut from_b: BTreeMap<BinVector, u64> = BTreeMap::new();
        for ((_, x), &c) in b {
            *from_b.entry(*x).or_default() += c;
        }
        from_b == self.a
    }
}

/// Work done by one cascade.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct UpdateReport {
    /// Elementary operations above level 0 (searches plus derived edits).
    pub ops: u64,
    pub capped: bool,
    /// Per level `i`: searches issued into `B^(i)` of the sibling.
    pub searches: Vec<u64>,
    /// Per level `i`: distinct congruent entries those searches returned.
    pub hits: Vec<u64>,
    /// Per level `i`: summed `|sibling| / 2^l_(i+1)` over the searches.
    pub predicted_hits: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Edit {
    Delete,
    Insert,
}

/// One walk step: leaf `leaf` swapped `removed` for `added`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub leaf: usize,
    pub removed: BinVector,
    pub added: BinVector,
    pub delete: UpdateReport,
    pub insert: UpdateReport,
}

impl StepRecord {
    pub fn ops(&self) -> u64 {
        self.delete.ops + self.insert.ops
    }

    pub fn capped(&self) -> bool {
        self.delete.capped || self.insert.capped
    }
}

/// A vertex `(U^(0)_1, ..., U^(0)_{2^d})` with every derived list indexed.
#[derive(Clone, Debug)]
pub struct VertexState {
    inst: RsspInstance,
    targets: LevelTargets,
    r: usize,
    pools: Vec<Vec<BinVector>>,
    nodes: Vec<Vec<IndexedList>>,
    half_weight: u64,
    stale: bool,
}

fn check_pools(inst: &RsspInstance, pools: &[Vec<BinVector>], depth: usize) -> Result<()> {
    if pools.len() != 1 << depth {
        return Err(Error::InvalidParameter(format!(
            "depth {depth} needs {} leaf lists, got {}",
            1 << depth,
            pools.len()
        )));
    }
    for (j, pool) in pools.iter().enumerate() {
        let mut seen = BTreeSet::new();
        for x in pool {
            if x.len() != inst.n() {
                return Err(Error::InvalidParameter(format!(
                    "leaf {j} holds a vector of length {}, expected {}",
                    x.len(),
                    inst.n()
                )));
            }
            if !seen.insert(*x) {
                return Err(Error::DuplicateElement(x.to_string(), j));
            }
        }
    }
    Ok(())
}

/// Samples a uniform `r`-subset of every leaf list and builds the vertex.
pub fn setup_vertex(
    inst: &RsspInstance,
    pools: Vec<Vec<BinVector>>,
    r: usize,
    targets: LevelTargets,
    rng: &mut impl Rng,
) -> Result<VertexState> {
    check_pools(inst, &pools, targets.depth())?;
    if let Some(small) = pools.iter().map(Vec::len).min().filter(|&m| r > m) {
        return Err(Error::InvalidParameter(format!(
            "subset size r = {r} exceeds the smallest leaf list ({small})"
        )));
    }
    let subsets = pools
        .iter()
        .map(|p| {
            let mut idx = sample_indices(rng, p.len(), r).into_vec();
            idx.sort_unstable();
            idx.into_iter().map(|k| p[k]).collect()
        })
        .collect();
    build_vertex(inst, pools, subsets, targets, r)
}

/// From-scratch construction through the EM joins.
pub fn build_vertex(
    inst: &RsspInstance,
    pools: Vec<Vec<BinVector>>,
    subsets: Vec<Vec<BinVector>>,
    targets: LevelTargets,
    r: usize,
) -> Result<VertexState> {
    let d = targets.depth();
    check_pools(inst, &subsets, d)?;
    let tree = build_tree(inst, subsets, &targets)?;
    let n = inst.n();
    let mut nodes = Vec::with_capacity(d + 1);
    let mut half_weight = 0;
    for (i, level) in tree.levels.into_iter().enumerate() {
        let bits = (i < d).then(|| targets.modulus_bits(i + 1));
        let lists = level
            .into_iter()
            .map(|list| {
                let mut il = IndexedList::new(bits);
                for (key, x) in list {
                    if i == d && x.weight() as usize == n / 2 {
                        half_weight += 1;
                    }
                    il.insert(x, key, 1);
                }
                il
            })
            .collect();
        nodes.push(lists);
    }
    Ok(VertexState { inst: inst.clone(), targets, r, pools, nodes, half_weight, stale: false })
}

impl VertexState {
    pub fn depth(&self) -> usize {
        self.targets.depth()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn targets(&self) -> &LevelTargets {
        &self.targets
    }

    pub fn instance(&self) -> &RsspInstance {
        &self.inst
    }

    pub fn is_stale(&self) -> bool {
        self.stale
    }

    pub fn list(&self, level: usize, j: usize) -> &IndexedList {
        &self.nodes[level][j]
    }

    pub fn pool(&self, leaf: usize) -> &[BinVector] {
        &self.pools[leaf]
    }

    /// Current `U^(0)_leaf` in vector order.
    pub fn leaf(&self, leaf: usize) -> Vec<BinVector> {
        self.nodes[0][leaf].iter().map(|(x, _)| *x).collect()
    }

    /// Number of `A` and `B` structures: 61 at depth 4.
    pub fn set_count(&self) -> usize {
        self.nodes.iter().flatten().map(|l| 1 + l.has_b() as usize).sum()
    }

    /// Weight-`n/2` entries of the root, with multiplicity.
    pub fn half_weight_count(&self) -> u64 {
        self.half_weight
    }

    pub fn is_marked(&self) -> bool {
        self.half_weight > 0
    }

    /// Smallest verifying weight-`n/2` root vector.
    pub fn solution(&self) -> Option<BinVector> {
        let n = self.inst.n();
        self.nodes[self.depth()][0]
            .iter()
            .map(|(x, _)| *x)
            .find(|x| x.weight() as usize == n / 2 && self.inst.is_solution(x))
    }

    /// Rebuilds the vertex from its current leaf subsets.
    pub fn rebuild_oracle(&self) -> Result<VertexState> {
        let subsets = (0..self.pools.len()).map(|j| self.leaf(j)).collect();
        build_vertex(&self.inst, self.pools.clone(), subsets, self.targets.clone(), self.r)
    }

    /// Exact equality of all indexed sets and the witness counter.
    pub fn same_sets(&self, other: &VertexState) -> bool {
        self.nodes == other.nodes && self.half_weight == other.half_weight
    }

    pub fn update_delete(&mut self, leaf: usize, x: &BinVector, kappa: u64) -> Result<UpdateReport> {
        self.check_leaf(leaf, x)?;
        if !self.nodes[0][leaf].contains(x) {
            return Err(Error::MissingElement(x.to_string(), leaf));
        }
        Ok(self.cascade(leaf, *x, kappa, Edit::Delete))
    }

    pub fn update_insert(&mut self, leaf: usize, y: &BinVector, kappa: u64) -> Result<UpdateReport> {
        self.check_leaf(leaf, y)?;
        if self.nodes[0][leaf].contains(y) {
            return Err(Error::DuplicateElement(y.to_string(), leaf));
        }
        Ok(self.cascade(leaf, *y, kappa, Edit::Insert))
    }

    fn check_leaf(&self, leaf: usize, x: &BinVector) -> Result<()> {
        if leaf >= self.pools.len() {
            return Err(Error::InvalidParameter(format!("leaf index {leaf} out of range")));
        }
        if x.len() != self.inst.n() {
            return Err(Error::InvalidParameter(format!(
                "vector length {} does not match n = {}",
                x.len(),
                self.inst.n()
            )));
        }
        Ok(())
    }

    fn apply(&mut self, level: usize, j: usize, x: BinVector, count: u64, edit: Edit) {
        let key = self.inst.key(&x);
        let changed = match edit {
            Edit::Insert => {
                self.nodes[level][j].insert(x, key, count);
                count
            }
            Edit::Delete => {
                let got = self.nodes[level][j].remove(&x, key, count);
                debug_assert!(self.stale || got == count, "incremental state diverged");
                got
            }
        };
        if level == self.depth() && x.weight() as usize == self.inst.n() / 2 {
            match edit {
                Edit::Insert => self.half_weight += changed,
                Edit::Delete => self.half_weight -= changed.min(self.half_weight),
            }
        }
    }

    /// The deleting subprogram, level by level. Step 2 searches for the
    /// level-1 target `s^(1)`, since level-0 lists carry no target.
    fn cascade(&mut self, leaf: usize, x: BinVector, kappa: u64, edit: Edit) -> UpdateReport {
        let d = self.depth();
        let mut rep = UpdateReport {
            searches: vec![0; d],
            hits: vec![0; d],
            predicted_hits: vec![0.0; d],
            ..Default::default()
        };
        self.apply(0, leaf, x, 1, edit);
        let mut frontier = vec![(x, 1u64)];
        let mut idx = leaf;
        for i in 0..d {
            let (sib, parent) = (idx ^ 1, idx / 2);
            let bits = self.targets.modulus_bits(i + 1);
            let t = self.targets.target(i + 1, parent);
            let fresh = bits - self.targets.fixed_bits(i + 1);
            let per_search = self.nodes[i][sib].distinct_len() as f64 / 2f64.powi(fresh as i32);
            let mut next: BTreeMap<BinVector, u64> = BTreeMap::new();
            for (z, c) in &frontier {
                if rep.ops >= kappa {
                    rep.capped = true;
                    self.stale = true;
                    return rep;
                }
                rep.ops += 1;
                rep.searches[i] += 1;
                let want = t.wrapping_sub(self.inst.key(z)) & low_mask(bits);
                let found = self.nodes[i][sib].search(want);
                rep.hits[i] += found.len() as u64;
                rep.predicted_hits[i] += per_search;
                for (y, cy) in found {
                    if let Some(w) = z.disjoint_sum(&y) {
                        *next.entry(w).or_default() += c * cy;
                    }
                }
            }
            for (&w, &c) in &next {
                if rep.ops >= kappa {
                    rep.capped = true;
                    self.stale = true;
                    return rep;
                }
                rep.ops += 1;
                self.apply(i + 1, parent, w, c, edit);
            }
            if next.is_empty() {
                break;
            }
            frontier = next.into_iter().collect();
            idx = parent;
        }
        rep
    }

    /// Replaces `remove` by `add` in one leaf: delete cascade, then insert.
    pub fn apply_swap(
        &mut self,
        leaf: usize,
        remove: &BinVector,
        add: &BinVector,
        kappa: u64,
    ) -> Result<StepRecord> {
        self.check_leaf(leaf, add)?;
        if self.nodes[0][leaf].contains(add) {
            return Err(Error::DuplicateElement(add.to_string(), leaf));
        }
        let delete = self.update_delete(leaf, remove, kappa)?;
        let insert = self.update_insert(leaf, add, kappa)?;
        Ok(StepRecord { leaf, removed: *remove, added: *add, delete, insert })
    }

    /// One Johnson-graph step on a uniformly chosen non-saturated leaf.
    pub fn walk_step(&mut self, kappa: u64, rng: &mut impl Rng) -> Result<StepRecord> {
        let open: Vec<usize> = (0..self.pools.len())
            .filter(|&j| self.pools[j].len() > self.nodes[0][j].distinct_len())
            .collect();
        if open.is_empty() {
            return Err(Error::SaturatedLeaf);
        }
        let leaf = open[rng.gen_range(0..open.len())];
        let current = &self.nodes[0][leaf];
        let removed = *current
            .iter()
            .nth(rng.gen_range(0..current.distinct_len()))
            .expect("non-empty leaf")
            .0;
        let outside: Vec<BinVector> =
            self.pools[leaf].iter().filter(|y| !current.contains(y)).copied().collect();
        let added = outside[rng.gen_range(0..outside.len())];
        self.apply_swap(leaf, &removed, &added, kappa)
    }
}

/// `max(1, U0/2^l1, U0 U1/2^(l1+l2), ...)` from measured mean list sizes
/// `sizes[i] = |U^(i)|` and the full split `(l_1, ..., l_d)`.
pub fn analytic_tu(sizes: &[f64], split: &[usize]) -> f64 {
    let mut best = 1.0f64;
    let mut prod = 1.0f64;
    for (i, &li) in split.iter().enumerate() {
        let Some(&u) = sizes.get(i) else { break };
        prod *= u / 2f64.powi(li as i32);
        best = best.max(prod);
    }
    best
}

/// `kappa = n^2 * ceil(Tu)`.
pub fn default_kappa(n: usize, tu: f64) -> u64 {
    (n * n) as u64 * tu.ceil().max(1.0) as u64
}

impl VertexState {
    /// Mean `|U^(i)_j|` per level, with multiplicity.
    pub fn mean_sizes(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .map(|lv| lv.iter().map(|l| l.len() as f64).sum::<f64>() / lv.len() as f64)
            .collect()
    }

    /// `default_kappa` evaluated at this vertex's list sizes.
    pub fn default_kappa(&self, split: &[usize]) -> u64 {
        default_kappa(self.inst.n(), analytic_tu(&self.mean_sizes(), split))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceRow {
    pub step: u64,
    pub leaf: Option<usize>,
    pub op_count: u64,
    pub capped: bool,
    pub marked: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct WalkConfig {
    /// `(l_1, ..., l_{d-1})`.
    pub l: Vec<usize>,
    pub r: usize,
    pub max_steps: u64,
    /// Check for a marked vertex every this many steps (and at step 0).
    pub check_interval: u64,
    /// `None` picks [`default_kappa`] from the set-up vertex.
    pub kappa: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct WalkOutcome {
    pub solution: Option<BinVector>,
    pub steps: u64,
    pub kappa: u64,
    pub trace: Vec<TraceRow>,
}

/// Random walk with periodic checks. The quantum speedups are not modelled.
pub fn classical_walk_search(
    inst: &RsspInstance,
    pools: Vec<Vec<BinVector>>,
    cfg: &WalkConfig,
    rng: &mut impl Rng,
) -> Result<WalkOutcome> {
    if cfg.check_interval == 0 {
        return Err(Error::InvalidParameter("check_interval must be positive".into()));
    }
    let depth = cfg.l.len() + 1;
    let targets = choose_targets(inst.target(), inst.n(), &cfg.l, depth, rng)?;
    let split = crate::em::full_split(inst.n(), &cfg.l, depth)?;
    let mut v = setup_vertex(inst, pools, cfg.r, targets, rng)?;
    let kappa = cfg.kappa.unwrap_or_else(|| v.default_kappa(&split));
    let marked = v.is_marked();
    let mut trace = vec![TraceRow { step: 0, leaf: None, op_count: 0, capped: false, marked: Some(marked) }];
    if marked {
        return Ok(WalkOutcome { solution: v.solution(), steps: 0, kappa, trace });
    }
    for step in 1..=cfg.max_steps {
        let rec = v.walk_step(kappa, rng)?;
        let check = step % cfg.check_interval == 0 || step == cfg.max_steps;
        let marked = check.then(|| v.is_marked());
        trace.push(TraceRow {
            step,
            leaf: Some(rec.leaf),
            op_count: rec.ops(),
            capped: rec.capped(),
            marked,
        });
        if marked == Some(true) {
            if let Some(sol) = v.solution() {
                return Ok(WalkOutcome { solution: Some(sol), steps: step, kappa, trace });
            }
        }
    }
    Ok(WalkOutcome { solution: None, steps: cfg.max_steps, kappa, trace })
}

pub fn write_walk_trace(out: impl Write, trace: &[TraceRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "leaf", "op_count", "capped", "marked"]).map_err(csv_err)?;
    for t in trace {
        w.write_record([
            t.step.to_string(),
            t.leaf.map_or(String::new(), |l| l.to_string()),
            t.op_count.to_string(),
            t.capped.to_string(),
            t.marked.map_or(String::new(), |m| m.to_string()),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

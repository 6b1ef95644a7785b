//! Minimizes the total time exponent over `(alpha, beta, lambda)`.
//!
//! For fixed `(alpha, beta)` the objective is a maximum of affine functions
//! of `lambda` under linear constraints, so the inner problem is an exact
//! epigraph LP. The outer search is a parallel grid over `(alpha, beta)`
//! followed by nested golden-section refinement.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use rayon::prelude::*;
use serde::Serialize;

use crate::cost::{
    constraints_check, representation_constraints, time_terms, total_time_exponent, CostBreakdown,
    CostParams, Mode, ModelOptions, Sense,
};
use crate::error::{Error, Result};

pub const MIN_DEPTH: usize = 3;
pub const MAX_DEPTH: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct InnerSolution {
    pub t: f64,
    pub lambda: Vec<f64>,
}

/// Exact `min_lambda max_k term_k(lambda)` under the representation
/// constraints, `lambda >= 0` and `sum lambda <= 1`.
///
/// Returns `None` when the region is empty or the model is undefined at
/// this `alpha`.
pub fn solve_inner(
    alpha: f64,
    beta: f64,
    depth: usize,
    mode: Mode,
    model: ModelOptions,
) -> Result<Option<InnerSolution>> {
    let terms = match time_terms(alpha, beta, depth, mode, model) {
        Ok(t) => t,
        Err(Error::Domain(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let dim = depth - 1;
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let lam: Vec<_> = (0..dim).map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    let t = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    for term in &terms {
        let mut row: Vec<_> = lam.iter().zip(&term.form.v).map(|(&x, &c)| (x, c)).collect();
        row.push((t, -1.0));
        lp.add_constraint(row.as_slice(), ComparisonOp::Le, -term.form.c);
    }
    let ones: Vec<_> = lam.iter().map(|&x| (x, 1.0)).collect();
    lp.add_constraint(ones.as_slice(), ComparisonOp::Le, 1.0);
    for c in representation_constraints(alpha, depth)? {
        let row: Vec<_> = lam.iter().zip(&c.coeffs).map(|(&x, &k)| (x, k)).collect();
        let op = match c.sense {
            Sense::Le => ComparisonOp::Le,
            Sense::Ge => ComparisonOp::Ge,
        };
        lp.add_constraint(row.as_slice(), op, c.rhs);
    }
    match lp.solve() {
        Ok(outcome) => {
            let sol = outcome
                .into_solution()
                .map_err(|e| Error::Lp(format!("interrupted: {:?}", e.termination_reason())))?;
            Ok(Some(InnerSolution {
                t: sol.objective(),
                lambda: lam.iter().map(|&x| sol.var_value(x).max(0.0)).collect(),
            }))
        }
        Err(microlp::Error::Infeasible) => Ok(None),
        Err(e) => Err(Error::Lp(e.to_string())),
    }
}

/// Outer search grid. `offset` in `[0, 1)` shifts both axes by that fraction
/// of a step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub alpha: (f64, f64, f64),
    pub beta: (f64, f64, f64),
    pub offset: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { alpha: (0.01, 0.5, 0.005), beta: (0.5, 1.0, 0.005), offset: 0.0 }
    }
}

impl GridSpec {
    fn axis((start, end, step): (f64, f64, f64), offset: f64, cap: f64) -> Vec<f64> {
        let count = ((end - start) / step + 1e-9).floor() as usize + 1;
        let mut v: Vec<f64> = (0..count)
            .map(|k| start + (k as f64 + offset) * step)
            .filter(|&x| x > 0.0 && x <= cap)
            .collect();
        if offset > 0.0 && cap == 1.0 && v.last() != Some(&1.0) {
            v.push(1.0);
        }
        v
    }

    pub fn alphas(&self) -> Vec<f64> {
        Self::axis(self.alpha, self.offset, 0.999)
    }

    pub fn betas(&self) -> Vec<f64> {
        Self::axis(self.beta, self.offset, 1.0)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OptimizeOptions {
    pub model: ModelOptions,
    pub grid: GridSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    pub stage: String,
    pub alpha: f64,
    pub beta: f64,
    pub t: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimizeResult {
    pub params: CostParams,
    pub t: f64,
    pub breakdown: CostBreakdown,
    pub trace: Vec<TraceEntry>,
}

fn check_args(depth: usize, tol: f64) -> Result<()> {
    if !(MIN_DEPTH..=MAX_DEPTH).contains(&depth) {
        return Err(Error::InvalidParameter(format!(
            "depth must be in {MIN_DEPTH}..={MAX_DEPTH}, got {depth}"
        )));
    }
    if tol.is_nan() || tol < 1e-6 {
        return Err(Error::InvalidParameter(format!("tol must be at least 1e-6, got {tol}")));
    }
    Ok(())
}

const INVPHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimum of `f` on `[lo, hi]`, returning `(x, f(x))`.
fn golden(mut lo: f64, mut hi: f64, width: f64, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    let mut x1 = hi - INVPHI * (hi - lo);
    let mut x2 = lo + INVPHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > width {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INVPHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INVPHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn inner_value(alpha: f64, beta: f64, depth: usize, mode: Mode, model: ModelOptions) -> f64 {
    match solve_inner(alpha, beta, depth, mode, model) {
        Ok(Some(s)) => s.t,
        _ => f64::INFINITY,
    }
}

/// Best `T` over `(alpha, beta, lambda)` for one depth and mode.
pub fn optimize(depth: usize, mode: Mode, tol: f64, opts: &OptimizeOptions) -> Result<OptimizeResult> {
    check_args(depth, tol)?;
    let model = opts.model;
    let alphas = opts.grid.alphas();
    let betas = match mode {
        Mode::Quantum => opts.grid.betas(),
        Mode::Classical => vec![1.0],
    };
    let points: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| betas.iter().map(move |&b| (a, b)))
        .collect();
    let values: Vec<f64> = points
        .par_iter()
        .map(|&(a, b)| inner_value(a, b, depth, mode, model))
        .collect();
    let (best_idx, best_t) = values
        .iter()
        .copied()
        .enumerate()
        .fold((usize::MAX, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    if best_idx == usize::MAX {
        return Err(Error::Infeasible(format!(
            "no grid point is feasible at depth {depth} ({mode:?})"
        )));
    }
    let (mut a, mut b) = points[best_idx];
    let mut t = best_t;
    let mut trace = vec![TraceEntry { stage: "grid".into(), alpha: a, beta: b, t }];

    let width = (tol * 1e-3).max(1e-10);
    let a_step = opts.grid.alpha.2;
    let b_step = opts.grid.beta.2;
    // best beta for a given alpha: grid scan, then golden around the winner
    let beta_at = |alpha: f64| -> (f64, f64) {
        if mode == Mode::Classical {
            return (1.0, inner_value(alpha, 1.0, depth, mode, model));
        }
        let (bi, bv) = betas
            .par_iter()
            .map(|&x| inner_value(alpha, x, depth, mode, model))
            .enumerate()
            .reduce(|| (usize::MAX, f64::INFINITY), |p, q| if q.1 < p.1 || (q.1 == p.1 && q.0 < p.0) { q } else { p });
        if bi == usize::MAX {
            return (1.0, f64::INFINITY);
        }
        let center = betas[bi];
        let lo = (center - b_step).max(1e-3);
        let hi = (center + b_step).min(1.0);
        let (bb, v) = golden(lo, hi, width, |x| inner_value(alpha, x, depth, mode, model));
        let at_one = inner_value(alpha, 1.0, depth, mode, model);
        [(center, bv), (bb, v), (1.0, at_one)]
            .into_iter()
            .fold((center, f64::INFINITY), |acc, c| if c.1 < acc.1 { c } else { acc })
    };
    // re-center while the refined point hugs the bracket edge
    for round in 0..6 {
        let lo = (a - a_step).max(1e-4);
        let hi = (a + a_step).min(0.999);
        let (na, _) = golden(lo, hi, width, |x| beta_at(x).1);
        let (nb, nt) = beta_at(na);
        if nt <= t {
            a = na;
            b = nb;
            t = nt;
        }
        trace.push(TraceEntry { stage: format!("refine{round}"), alpha: a, beta: b, t });
        let edge = (a - lo).min(hi - a);
        if edge > 0.05 * a_step || lo <= 1e-4 {
            break;
        }
    }

    let inner = solve_inner(a, b, depth, mode, model)?
        .ok_or_else(|| Error::Infeasible(format!("refined point alpha={a}, beta={b} lost feasibility")))?;
    let params = CostParams { alpha: a, beta: b, lambda: inner.lambda, depth, mode };
    let breakdown = total_time_exponent(&params, model)?;
    if !constraints_check(&params)?.feasible {
        return Err(Error::Infeasible("optimizer returned a constraint-violating point".into()));
    }
    Ok(OptimizeResult { t: breakdown.exponents.t, params, breakdown, trace })
}

/// Table 1 of the source: `(d, T quantum, beta, T classical)` for d = 3..8.
pub const PAPER_TABLE1: [(usize, f64, f64, f64); 6] = [
    (3, 0.2531, 0.8889, 0.2960),
    (4, 0.2090, 0.9412, 0.2659),
    (5, 0.2194, 0.9697, 0.2616),
    (6, 0.2326, 0.9846, 0.2584),
    (7, 0.2417, 0.9922, 0.2565),
    (8, 0.2473, 0.9961, 0.2558),
];

#[derive(Clone, Debug, Serialize)]
pub struct Table1Row {
    pub depth: usize,
    pub t_quantum: f64,
    pub beta: f64,
    pub t_classical: f64,
    pub paper_t_quantum: f64,
    pub paper_beta: f64,
    pub paper_t_classical: f64,
    pub err_quantum: f64,
    pub err_beta: f64,
    pub err_classical: f64,
    pub alpha_quantum: f64,
    pub lambda_quantum: Vec<f64>,
    pub alpha_classical: f64,
    pub lambda_classical: Vec<f64>,
}

pub fn reproduce_table1(tol: f64, opts: &OptimizeOptions) -> Result<Vec<Table1Row>> {
    PAPER_TABLE1
        .iter()
        .map(|&(d, pq, pb, pc)| {
            let q = optimize(d, Mode::Quantum, tol, opts)?;
            let c = optimize(d, Mode::Classical, tol, opts)?;
            Ok(Table1Row {
                depth: d,
                t_quantum: q.t,
                beta: q.params.beta,
                t_classical: c.t,
                paper_t_quantum: pq,
                paper_beta: pb,
                paper_t_classical: pc,
                err_quantum: q.t - pq,
                err_beta: q.params.beta - pb,
                err_classical: c.t - pc,
                alpha_quantum: q.params.alpha,
                lambda_quantum: q.params.lambda,
                alpha_classical: c.params.alpha,
                lambda_classical: c.params.lambda,
            })
        })
        .collect()
}

pub fn write_table1_csv(out: impl std::io::Write, rows: &[Table1Row]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "d", "T_quantum", "beta", "T_classical", "paper_T_quantum", "paper_beta",
        "paper_T_classical", "err_quantum", "err_beta", "err_classical",
    ])
    .map_err(crate::em::csv_err)?;
    for r in rows {
        w.write_record([
            r.depth.to_string(),
            format!("{:.5}", r.t_quantum),
            format!("{:.5}", r.beta),
            format!("{:.5}", r.t_classical),
            format!("{:.4}", r.paper_t_quantum),
            format!("{:.4}", r.paper_beta),
            format!("{:.4}", r.paper_t_classical),
            format!("{:+.5}", r.err_quantum),
            format!("{:+.5}", r.err_beta),
            format!("{:+.5}", r.err_classical),
        ])
        .map_err(crate::em::csv_err)?;
    }
    w.flush()?;
    Ok(())
}

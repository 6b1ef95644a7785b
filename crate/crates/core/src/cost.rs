//! Per-`n`, base-2 exponent arithmetic for EM^(d) and its quantum-walk
//! variant. Every quantity `X = 2^{x n}` is represented by `x`.
//!
//! For fixed `(alpha, beta)` each list size and each walk cost is affine in
//! `lambda = (l_1, ..., l_{d-1}) / n`, which is what the optimizer exploits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Quantum,
    Classical,
}

/// How to read the numerator `2^2(i-1)` in the filter-rate display.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaReading {
    /// `4 (i - 1) alpha^2`.
    Literal,
    /// `4^(i - 1) alpha^2`: the exact survival rate of independent
    /// coordinates.
    #[default]
    Exponential,
}

/// Which walk-update cost to charge.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cascade {
    /// `max(1, U^(i) / U^(0))`: partners are searched in the filtered
    /// sibling lists.
    #[default]
    FilterAware,
    /// `max(1, U^(0) ... U^(i-1) / 2^{l_1 + ... + l_i})`, ignoring filtering.
    Product,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelOptions {
    pub gamma: GammaReading,
    pub cascade: Cascade,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    pub alpha: f64,
    pub beta: f64,
    /// `(l_1, ..., l_{d-1}) / n`.
    pub lambda: Vec<f64>,
    pub depth: usize,
    pub mode: Mode,
}

impl CostParams {
    pub fn quantum(alpha: f64, beta: f64, lambda: Vec<f64>) -> Self {
        CostParams { alpha, beta, depth: lambda.len() + 1, lambda, mode: Mode::Quantum }
    }

    pub fn classical(alpha: f64, lambda: Vec<f64>) -> Self {
        CostParams { alpha, beta: 1.0, depth: lambda.len() + 1, lambda, mode: Mode::Classical }
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth < 2 || self.lambda.len() + 1 != self.depth {
            return Err(Error::InvalidParameter(format!(
                "depth {} needs {} lambda values, got {}",
                self.depth,
                self.depth.saturating_sub(1),
                self.lambda.len()
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must lie in (0, 1], got {}",
                self.beta
            )));
        }
        if self.mode == Mode::Classical && self.beta != 1.0 {
            return Err(Error::InvalidParameter("classical mode requires beta = 1".into()));
        }
        if self.lambda.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidParameter("lambda must be finite".into()));
        }
        Ok(())
    }
}

pub fn entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("entropy argument {x} outside [0, 1]")));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    Ok(-x * x.log2() - (1.0 - x) * (1.0 - x).log2())
}

/// Shannon entropy of `Binomial(m, alpha)` in bits.
pub fn binom_entropy(m: u32, alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha {alpha} outside [0, 1]")));
    }
    if alpha == 0.0 || alpha == 1.0 {
        return Ok(0.0);
    }
    let ratio = alpha / (1.0 - alpha);
    let mut p = (1.0 - alpha).powi(m as i32);
    let mut h = 0.0;
    for k in 0..=m {
        if p > 0.0 {
            h -= p * p.log2();
        }
        p *= (m - k) as f64 / (k + 1) as f64 * ratio;
    }
    Ok(h)
}

/// `log2 g_i` where `gamma_i = g_i^n` is the level-`i` filter survival rate.
/// Levels 0 and 1 never filter anything.
pub fn gamma_log_rate(level: usize, alpha: f64, reading: GammaReading) -> Result<f64> {
    if level <= 1 {
        return Ok(0.0);
    }
    let i = level as i32;
    let num = match reading {
        GammaReading::Literal => 4.0 * (i - 1) as f64,
        GammaReading::Exponential => 4f64.powi(i - 1),
    } * alpha
        * alpha;
    let den = ((2f64.powi(i - 1) - 2.0) * alpha + 2.0).powi(2);
    let g = 1.0 - num / den;
    if g <= 0.0 {
        return Err(Error::Domain(format!(
            "filter rate {g} at level {level}, alpha {alpha} is not positive"
        )));
    }
    Ok(g.log2())
}

/// `c + v . lambda`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Affine {
    pub c: f64,
    pub v: Vec<f64>,
}

impl Affine {
    fn constant(c: f64, dim: usize) -> Self {
        Affine { c, v: vec![0.0; dim] }
    }

    pub fn eval(&self, lambda: &[f64]) -> f64 {
        self.c + self.v.iter().zip(lambda).map(|(a, b)| a * b).sum::<f64>()
    }

    fn add(&self, other: &Affine) -> Affine {
        Affine {
            c: self.c + other.c,
            v: self.v.iter().zip(&other.v).map(|(a, b)| a + b).collect(),
        }
    }

    fn sub(&self, other: &Affine) -> Affine {
        Affine {
            c: self.c - other.c,
            v: self.v.iter().zip(&other.v).map(|(a, b)| a - b).collect(),
        }
    }

    fn shift(&self, c: f64) -> Affine {
        Affine { c: self.c + c, v: self.v.clone() }
    }
}

/// `lambda_i` as an affine form; index `d` gives `lambda_d = 1 - sum`.
fn lambda_form(i: usize, depth: usize) -> Affine {
    let dim = depth - 1;
    if i == depth {
        Affine { c: 1.0, v: vec![-1.0; dim] }
    } else {
        let mut v = vec![0.0; dim];
        v[i - 1] = 1.0;
        Affine { c: 0.0, v }
    }
}

/// `u_0, ..., u_d` via `u_i = 2 (u_{i-1} + log2 g_{i-1}) - lambda_i`.
pub fn list_exponent_forms(
    alpha: f64,
    beta: f64,
    depth: usize,
    reading: GammaReading,
) -> Result<Vec<Affine>> {
    let h = entropy(alpha)?;
    let mut u = vec![Affine::constant(beta * h / 2.0, depth - 1)];
    for i in 1..=depth {
        let g = gamma_log_rate(i - 1, alpha, reading)?;
        let prev = u[i - 1].shift(g);
        u.push(prev.add(&prev).sub(&lambda_form(i, depth)));
    }
    Ok(u)
}

/// The recurrence evaluated at `p.lambda`.
pub fn list_exponents_recurrence(p: &CostParams, reading: GammaReading) -> Result<Vec<f64>> {
    p.validate()?;
    Ok(list_exponent_forms(p.alpha, p.beta, p.depth, reading)?
        .iter()
        .map(|f| f.eval(&p.lambda))
        .collect())
}

/// `u_0, ..., u_d`. At depth 4 this uses the solved closed forms; other
/// depths use the recurrence.
pub fn list_exponents(p: &CostParams, reading: GammaReading) -> Result<Vec<f64>> {
    p.validate()?;
    if p.depth != 4 {
        return list_exponents_recurrence(p, reading);
    }
    let bh = p.beta * entropy(p.alpha)?;
    let (l1, l2, l3) = (p.lambda[0], p.lambda[1], p.lambda[2]);
    let g2 = gamma_log_rate(2, p.alpha, reading)?;
    let g3 = gamma_log_rate(3, p.alpha, reading)?;
    Ok(vec![
        bh / 2.0,
        bh - l1,
        2.0 * bh - 2.0 * l1 - l2,
        4.0 * bh - 4.0 * l1 - 2.0 * l2 - l3 + 2.0 * g2,
        8.0 * bh - 1.0 - 7.0 * l1 - 3.0 * l2 - l3 + 4.0 * g2 + 2.0 * g3,
    ])
}

/// A named term of the total-time maximum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Term {
    pub name: String,
    pub form: Affine,
}

/// All terms whose maximum is the total time exponent.
///
/// Quantum: `L0`, the setup terms `U^(i)`, then
/// `-eps/2 - delta/2 + Tu_k` for each cascade term and `-eps/2 + Tc`.
/// Classical: `L0` and the `U^(i)` with `beta = 1`.
pub fn time_terms(
    alpha: f64,
    beta: f64,
    depth: usize,
    mode: Mode,
    opts: ModelOptions,
) -> Result<Vec<Term>> {
    let dim = depth - 1;
    let h = entropy(alpha)?;
    let beta = if mode == Mode::Classical { 1.0 } else { beta };
    let u = list_exponent_forms(alpha, beta, depth, opts.gamma)?;
    let mut terms = vec![Term { name: "L0".into(), form: Affine::constant(h / 2.0, dim) }];
    for (i, f) in u.iter().enumerate() {
        terms.push(Term { name: format!("Ts:U{i}"), form: f.clone() });
    }
    if mode == Mode::Classical {
        return Ok(terms);
    }
    let (eps, delta) = walk_exponents(h, beta, depth);
    let walk = -eps / 2.0 - delta / 2.0;
    for (name, f) in update_forms(&u, depth, opts.cascade) {
        terms.push(Term { name: format!("walk:Tu:{name}"), form: f.shift(walk) });
    }
    // Tc = 0
    terms.push(Term { name: "walk:Tc".into(), form: Affine::constant(-eps / 2.0, dim) });
    Ok(terms)
}

/// `(epsilon, delta)`: marked fraction `(U0/L0)^{2^d}` and gap `1/U0`.
pub fn walk_exponents(h: f64, beta: f64, depth: usize) -> (f64, f64) {
    let eps = 2f64.powi(depth as i32) * (beta - 1.0) * h / 2.0;
    (eps, -beta * h / 2.0)
}

fn update_forms(u: &[Affine], depth: usize, cascade: Cascade) -> Vec<(String, Affine)> {
    let dim = depth - 1;
    let mut out = vec![("1".to_string(), Affine::constant(0.0, dim))];
    match cascade {
        Cascade::FilterAware => {
            for (i, ui) in u.iter().enumerate().skip(1) {
                out.push((format!("U{i}/U0"), ui.sub(&u[0])));
            }
        }
        Cascade::Product => {
            let mut acc = Affine::constant(0.0, dim);
            for i in 1..=depth {
                acc = acc.add(&u[i - 1]).sub(&lambda_form(i, depth));
                out.push((format!("prod{i}"), acc.clone()));
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Le,
    Ge,
}

/// `coeffs . lambda (<= | >=) rhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearConstraint {
    pub name: String,
    pub coeffs: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
    /// False only for constraints printed in the source at depth 4.
    pub derived: bool,
}

impl LinearConstraint {
    /// Nonnegative exactly when satisfied.
    pub fn slack(&self, lambda: &[f64]) -> f64 {
        let lhs: f64 = self.coeffs.iter().zip(lambda).map(|(a, b)| a * b).sum();
        match self.sense {
            Sense::Le => self.rhs - lhs,
            Sense::Ge => lhs - self.rhs,
        }
    }
}

/// Representation constraints for depth `d`:
/// `EMC1: sum_i (2^{d-i} - 1) l_i <= 2^{d-1} H + log2(2^{d-1} a (1-a)^{2^d - 1}) / 2`
/// and for `2 <= i <= d-1`:
/// `sum_{k<i} (2^{i-k} - 1) l_k >= 2^{i-1} H - H(Bin(2^{i-1}, a))`.
/// At depth 4 these are EMC1, EMC2 and the corrected EMC3.
pub fn representation_constraints(alpha: f64, depth: usize) -> Result<Vec<LinearConstraint>> {
    let h = entropy(alpha)?;
    let dim = depth - 1;
    let half = 2f64.powi(depth as i32 - 1);
    let log_term = (half * alpha).log2() + (2f64.powi(depth as i32) - 1.0) * (1.0 - alpha).log2();
    let mut out = vec![LinearConstraint {
        name: "EMC1".into(),
        coeffs: (1..depth).map(|i| 2f64.powi((depth - i) as i32) - 1.0).collect(),
        sense: Sense::Le,
        rhs: half * h + 0.5 * log_term,
        derived: depth != 4,
    }];
    for i in 2..depth {
        let m = 1u32 << (i - 1);
        let mut coeffs = vec![0.0; dim];
        for (k, c) in coeffs.iter_mut().enumerate().take(i - 1) {
            *c = 2f64.powi((i - 1 - k) as i32) - 1.0;
        }
        out.push(LinearConstraint {
            name: format!("EMC{i}"),
            coeffs,
            sense: Sense::Ge,
            rhs: m as f64 * h - binom_entropy(m, alpha)?,
            // EMC2 matches the printed form; EMC3 is the corrected reading
            derived: !(depth == 4 && i == 2),
        });
    }
    Ok(out)
}

/// EMC3 exactly as printed: `2 l_2 >= (8 H - 2 H(Bin(4, a))) n`.
pub fn emc3_as_printed(alpha: f64) -> Result<LinearConstraint> {
    Ok(LinearConstraint {
        name: "EMC3 (as printed)".into(),
        coeffs: vec![0.0, 2.0, 0.0],
        sense: Sense::Ge,
        rhs: 8.0 * entropy(alpha)? - 2.0 * binom_entropy(4, alpha)?,
        derived: false,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Slack {
    pub name: String,
    pub slack: f64,
    pub derived: bool,
    /// Informational entries do not affect feasibility.
    pub enforced: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub feasible: bool,
    pub slacks: Vec<Slack>,
}

/// Tolerance on constraint slacks, absorbing LP round-off.
pub const FEASIBILITY_TOL: f64 = 1e-9;

pub fn constraints_check(p: &CostParams) -> Result<ConstraintReport> {
    p.validate()?;
    let mut slacks = vec![Slack {
        name: "sum lambda <= 1".into(),
        slack: 1.0 - p.lambda.iter().sum::<f64>(),
        derived: false,
        enforced: true,
    }];
    for (i, l) in p.lambda.iter().enumerate() {
        slacks.push(Slack {
            name: format!("lambda{} >= 0", i + 1),
            slack: *l,
            derived: false,
            enforced: true,
        });
    }
    for c in representation_constraints(p.alpha, p.depth)? {
        slacks.push(Slack {
            slack: c.slack(&p.lambda),
            name: c.name,
            derived: c.derived,
            enforced: true,
        });
    }
    if p.depth == 4 {
        let c = emc3_as_printed(p.alpha)?;
        slacks.push(Slack {
            slack: c.slack(&p.lambda),
            name: c.name,
            derived: false,
            enforced: false,
        });
    }
    let feasible = slacks
        .iter()
        .filter(|s| s.enforced)
        .all(|s| s.slack >= -FEASIBILITY_TOL);
    Ok(ConstraintReport { feasible, slacks })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Exponents {
    pub l0: f64,
    pub u: Vec<f64>,
    /// `log2 g_i` for `i = 0..=d`.
    pub gamma_log: Vec<f64>,
    pub epsilon: f64,
    pub delta: f64,
    pub ts: f64,
    pub tu: f64,
    pub tc: f64,
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostBreakdown {
    pub params: CostParams,
    pub exponents: Exponents,
    pub binding_term: String,
    pub feasible: bool,
    pub slacks: Vec<Slack>,
    pub terms: Vec<(String, f64)>,
}

impl CostBreakdown {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn total_time_exponent(p: &CostParams, opts: ModelOptions) -> Result<CostBreakdown> {
    p.validate()?;
    let h = entropy(p.alpha)?;
    let u = list_exponents(p, opts.gamma)?;
    let terms: Vec<(String, f64)> = time_terms(p.alpha, p.beta, p.depth, p.mode, opts)?
        .into_iter()
        .map(|t| (t.name, t.form.eval(&p.lambda)))
        .collect();
    let (name, t) = terms
        .iter()
        .fold(("", f64::NEG_INFINITY), |best, (n, v)| {
            if *v > best.1 {
                (n.as_str(), *v)
            } else {
                best
            }
        });
    let (epsilon, delta) = walk_exponents(h, p.beta, p.depth);
    let forms = list_exponent_forms(p.alpha, p.beta, p.depth, opts.gamma)?;
    let tu = update_forms(&forms, p.depth, opts.cascade)
        .iter()
        .map(|(_, f)| f.eval(&p.lambda))
        .fold(f64::NEG_INFINITY, f64::max);
    let gamma_log = (0..=p.depth)
        .map(|i| gamma_log_rate(i, p.alpha, opts.gamma))
        .collect::<Result<Vec<_>>>()?;
    let report = constraints_check(p)?;
    Ok(CostBreakdown {
        params: p.clone(),
        exponents: Exponents {
            l0: h / 2.0,
            ts: u.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            u,
            gamma_log,
            epsilon,
            delta,
            tu,
            tc: 0.0,
            t,
        },
        binding_term: name.to_string(),
        feasible: report.feasible,
        slacks: report.slacks,
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(0.5).unwrap(), 1.0);
        assert_eq!(entropy(0.0).unwrap(), 0.0);
        assert_eq!(entropy(1.0).unwrap(), 0.0);
        // -0.188 log2 0.188 - 0.812 log2 0.812, evaluated independently
        let direct = -(0.188f64.ln() * 0.188 + 0.812f64.ln() * 0.812) / 2f64.ln();
        assert!(close(entropy(0.188).unwrap(), direct, 1e-15));
        // the spec quotes 0.6974; the defining formula gives 0.697269
        assert!(close(entropy(0.188).unwrap(), 0.697269, 1e-6));
        assert!(entropy(1.5).is_err());
    }

    #[test]
    fn binomial_entropy_values() {
        for a in [0.1, 0.188, 0.4] {
            assert!(close(binom_entropy(1, a).unwrap(), entropy(a).unwrap(), 1e-12));
        }
        assert!(close(binom_entropy(2, 0.5).unwrap(), 1.5, 1e-12));
        assert_eq!(binom_entropy(5, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn gamma_values() {
        for r in [GammaReading::Literal, GammaReading::Exponential] {
            assert_eq!(gamma_log_rate(1, 0.3, r).unwrap(), 0.0);
            assert!(close(gamma_log_rate(2, 0.5, r).unwrap(), 0.75f64.log2(), 1e-12));
            assert!(gamma_log_rate(3, 1e-9, r).unwrap().abs() < 1e-12);
        }
        // the readings part ways at level 3: 1 - 2a^2/(1+a)^2 vs 1 - 4a^2/(1+a)^2
        let a: f64 = 0.2;
        let lit = 1.0 - 2.0 * a * a / (1.0 + a).powi(2);
        let exp = 1.0 - 4.0 * a * a / (1.0 + a).powi(2);
        assert!(close(gamma_log_rate(3, a, GammaReading::Literal).unwrap(), lit.log2(), 1e-12));
        assert!(close(gamma_log_rate(3, a, GammaReading::Exponential).unwrap(), exp.log2(), 1e-12));
    }

    #[test]
    fn u1_example() {
        // H(alpha) = 1/2 at alpha ~ 0.110028
        let mut lo = 0.0;
        let mut hi = 0.5;
        for _ in 0..100 {
            let mid = (lo + hi) / 2.0;
            if entropy(mid).unwrap() < 0.5 {
                lo = mid
            } else {
                hi = mid
            }
        }
        let p = CostParams::classical(lo, vec![0.2, 0.1, 0.1]);
        assert!(close(list_exponents(&p, GammaReading::Literal).unwrap()[1], 0.3, 1e-12));
    }

    #[test]
    fn zero_lambda_recurrence() {
        let p = CostParams::classical(0.15, vec![0.0, 0.0, 0.0]);
        let u = list_exponents_recurrence(&p, GammaReading::Exponential).unwrap();
        for i in 1..4 {
            let g = gamma_log_rate(i - 1, 0.15, GammaReading::Exponential).unwrap();
            assert!(close(u[i], 2.0 * u[i - 1] + 2.0 * g, 1e-12));
        }
    }

    #[test]
    fn emc2_at_one_half() {
        let p = CostParams::classical(0.5, vec![0.5, 0.0, 0.0]);
        let r = constraints_check(&p).unwrap();
        let emc2 = r.slacks.iter().find(|s| s.name == "EMC2").unwrap();
        assert!(close(emc2.slack, 0.0, 1e-12));
        let p = CostParams::classical(0.5, vec![0.49, 0.0, 0.0]);
        assert!(!constraints_check(&p).unwrap().feasible);
    }

    #[test]
    fn sum_over_one_is_infeasible() {
        let p = CostParams::classical(0.2, vec![0.5, 0.4, 0.2]);
        assert!(!constraints_check(&p).unwrap().feasible);
    }

    #[test]
    fn depth4_constraints_match_lemma() {
        let a = 0.188;
        let h = entropy(a).unwrap();
        let c = representation_constraints(a, 4).unwrap();
        assert_eq!(c[0].coeffs, vec![7.0, 3.0, 1.0]);
        let rhs = 8.0 * h + 0.5 * (8.0 * a * (1.0f64 - a).powi(15)).log2();
        assert!(close(c[0].rhs, rhs, 1e-12));
        // EMC2: 4 l1 >= 8H - 4 H(Bin2) scaled by 1/4
        assert_eq!(c[1].coeffs, vec![1.0, 0.0, 0.0]);
        assert!(close(c[1].rhs, 2.0 * h - binom_entropy(2, a).unwrap(), 1e-12));
        // corrected EMC3: 6 l1 + 2 l2 >= 8H - 2 H(Bin4), scaled by 1/2
        assert_eq!(c[2].coeffs, vec![3.0, 1.0, 0.0]);
        assert!(close(c[2].rhs, 4.0 * h - binom_entropy(4, a).unwrap(), 1e-12));
    }

    #[test]
    fn classical_breakdown_has_no_walk_terms() {
        let p = CostParams::classical(0.1, vec![0.2, 0.2, 0.2]);
        let b = total_time_exponent(&p, ModelOptions::default()).unwrap();
        assert_eq!(b.exponents.epsilon, 0.0);
        assert!(b.terms.iter().all(|(n, _)| !n.starts_with("walk")));
        let max_u = b.exponents.u.iter().copied().fold(b.exponents.l0, f64::max);
        assert!(close(b.exponents.t, max_u, 1e-12));
    }

    #[test]
    fn degenerate_alpha_limit() {
        let p = CostParams::quantum(1e-12, 0.9, vec![0.0, 0.0, 0.0]);
        let b = total_time_exponent(&p, ModelOptions::default()).unwrap();
        // with lambda = 0 every term but the final modulus vanishes
        assert!(b.exponents.l0.abs() < 1e-9);
        assert!(b.exponents.u[..4].iter().all(|u| u.abs() < 1e-9));
        assert!(b.exponents.epsilon.abs() < 1e-9);
    }

    #[test]
    fn json_report_fields() {
        let p = CostParams::quantum(0.0846, 0.9412, vec![0.1844, 0.2090, 0.1883]);
        let b = total_time_exponent(&p, ModelOptions::default()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&b.to_json().unwrap()).unwrap();
        for k in ["params", "exponents", "binding_term", "feasible", "slacks"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert_eq!(v["params"]["mode"], "quantum");
    }
}

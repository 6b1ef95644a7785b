use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::bits::binomial;
use crate::em::csv_err;
use crate::error::{Error, Result};

/// Largest vertex count `C(N, r)^m` accepted for dense diagonalization.
pub const GAP_GUARD: u64 = 4096;

/// Closed form `N / (r (N - r))` for one Johnson graph.
pub fn johnson_gap_formula(big_n: usize, r: usize) -> f64 {
    big_n as f64 / (r * (big_n - r)) as f64
}

/// All `r`-subsets of `0..N` as bitmasks, in increasing order (Gosper).
fn subsets(big_n: usize, r: usize) -> Vec<u64> {
    let mut out = Vec::new();
    if r == 0 {
        return vec![0];
    }
    let mut s: u64 = (1 << r) - 1;
    while s < 1 << big_n {
        out.push(s);
        let c = s & s.wrapping_neg();
        let next = s + c;
        s = (((next ^ s) >> 2) / c) | next;
    }
    out
}

/// Spectral gap `1 - lambda_2 / lambda_1` of the random-walk operator on
/// the `m`-fold Cartesian product of `J(N, r)`.
pub fn spectral_gap_exact(big_n: usize, r: usize, m: usize) -> Result<f64> {
    if m == 0 || r > big_n || big_n > 63 {
        return Err(Error::InvalidParameter(format!(
            "need m >= 1, r <= N and N <= 63, got N={big_n}, r={r}, m={m}"
        )));
    }
    let base = binomial(big_n as u64, r as u64);
    let total = (0..m).try_fold(1u64, |acc, _| acc.checked_mul(base)).unwrap_or(u64::MAX);
    if total > GAP_GUARD {
        return Err(Error::SizeGuard { what: "C(N,r)^m", value: total, limit: GAP_GUARD });
    }
    if total < 2 {
        return Err(Error::InvalidParameter(format!("J({big_n},{r})^{m} has a single vertex")));
    }
    let verts = subsets(big_n, r);
    let k = verts.len();
    let size = total as usize;
    let degree = (m * r * (big_n - r)) as f64;
    let mut p = DMatrix::<f64>::zeros(size, size);
    for u in 0..size {
        let mut rest = u;
        let mut stride = 1;
        for _ in 0..m {
            let coord = rest % k;
            rest /= k;
            for (c, &s) in verts.iter().enumerate() {
                if (s ^ verts[coord]).count_ones() == 2 {
                    let v = u - coord * stride + c * stride;
                    p[(u, v)] = 1.0 / degree;
                }
            }
            stride *= k;
        }
    }
    let mut eig: Vec<f64> = SymmetricEigen::new(p).eigenvalues.iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    Ok(1.0 - eig[1] / eig[0])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapRow {
    pub big_n: usize,
    pub r: usize,
    pub m: usize,
    pub delta: f64,
    pub bound_1_over_r: f64,
    pub bound_lemma25: f64,
}

impl GapRow {
    pub fn compute(big_n: usize, r: usize, m: usize) -> Result<GapRow> {
        let delta = spectral_gap_exact(big_n, r, m)?;
        Ok(GapRow {
            big_n,
            r,
            m,
            delta,
            bound_1_over_r: 1.0 / r as f64,
            bound_lemma25: johnson_gap_formula(big_n, r) / m as f64,
        })
    }

    /// `delta >= 1/(r m)` and `delta >= delta(J)/m`, up to rounding.
    pub fn bounds_hold(&self) -> bool {
        self.delta >= self.bound_1_over_r / self.m as f64 - 1e-9 && self.delta >= self.bound_lemma25 - 1e-9
    }
}

pub fn write_gap_table(out: impl Write, rows: &[GapRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["N", "r", "m", "delta", "bound_1_over_r", "bound_lemma25"]).map_err(csv_err)?;
    for g in rows {
        w.write_record([
            g.big_n.to_string(),
            g.r.to_string(),
            g.m.to_string(),
            format!("{:.9}", g.delta),
            format!("{:.9}", g.bound_1_over_r),
            format!("{:.9}", g.bound_lemma25),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

use std::collections::HashSet;

use rand::Rng;

use crate::bits::{binomial, BinVector};
use crate::error::{Error, Result};

/// Which half of the coordinates a level-0 vector occupies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// Leaves alternate left, right, left, ... starting from index 0.
    pub fn of_leaf(index: usize) -> Side {
        if index.is_multiple_of(2) {
            Side::Left
        } else {
            Side::Right
        }
    }
}

/// Rates below `1 / (n 2^10)` collapse to the zero-vector list.
pub fn is_degenerate_rate(n: usize, alpha: f64) -> bool {
    alpha < 1.0 / (n as f64 * 1024.0)
}

/// `C(n/2, round(alpha n / 2))`.
pub fn default_level0_size(n: usize, alpha: f64) -> u64 {
    let half = n / 2;
    let w = (alpha * half as f64).round() as u64;
    binomial(half as u64, w)
}

/// One draw of `x ~ B^{n/2}(alpha)` embedded on `side`.
pub fn draw_half(n: usize, alpha: f64, side: Side, rng: &mut impl Rng) -> BinVector {
    let half = n / 2;
    let mut x = 0u64;
    for i in 0..half {
        if rng.gen_bool(alpha) {
            x |= 1 << i;
        }
    }
    let bits = match side {
        Side::Left => x,
        Side::Right => x << half,
    };
    BinVector::from_bits_unchecked(bits, n)
}

/// Samples distinct half-supported vectors until `target_size` are found.
///
/// `target_size` defaults to [`default_level0_size`] and `budget` to
/// `64 * target_size * n` draws. Output keeps first-seen order.
pub fn sample_level0(
    n: usize,
    alpha: f64,
    target_size: Option<u64>,
    side: Side,
    budget: Option<u64>,
    rng: &mut impl Rng,
) -> Result<Vec<BinVector>> {
    check_rate(n, alpha)?;
    if is_degenerate_rate(n, alpha) {
        return Ok(vec![BinVector::zero(n)]);
    }
    let target = target_size.unwrap_or_else(|| default_level0_size(n, alpha));
    let space = 1u64 << (n / 2);
    if target > space {
        return Err(Error::InfeasibleTarget { target, space });
    }
    let budget = budget.unwrap_or_else(|| target.saturating_mul(64).saturating_mul(n as u64));
    let mut seen = HashSet::with_capacity(target as usize);
    let mut out = Vec::with_capacity(target as usize);
    let mut draws = 0u64;
    while (out.len() as u64) < target {
        if draws == budget {
            return Err(Error::BudgetExceeded {
                budget,
                found: out.len(),
                target: target as usize,
            });
        }
        draws += 1;
        let v = draw_half(n, alpha, side, rng);
        if seen.insert(v.bits()) {
            out.push(v);
        }
    }
    Ok(out)
}

/// `count` independent draws, duplicates kept.
pub fn sample_with_replacement(
    n: usize,
    alpha: f64,
    count: usize,
    side: Side,
    rng: &mut impl Rng,
) -> Result<Vec<BinVector>> {
    check_rate(n, alpha)?;
    Ok((0..count).map(|_| draw_half(n, alpha, side, rng)).collect())
}

pub(crate) fn check_rate(n: usize, alpha: f64) -> Result<()> {
    if n < 2 || !n.is_multiple_of(2) || n > crate::bits::MAX_DIM {
        return Err(Error::InvalidParameter(format!(
            "n must be even and in 2..=64, got {n}"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;

    #[test]
    fn left_side_has_empty_right_half() {
        let mut rng = seeded_rng(1);
        let l = sample_level0(16, 0.25, None, Side::Left, None, &mut rng).unwrap();
        assert_eq!(l.len(), 28);
        assert!(l.iter().all(|v| v.bits() >> 8 == 0));
        let distinct: HashSet<_> = l.iter().map(|v| v.bits()).collect();
        assert_eq!(distinct.len(), 28);

        let r = sample_level0(16, 0.25, None, Side::Right, None, &mut rng).unwrap();
        assert!(r.iter().all(|v| v.bits() & 0xff == 0));
    }

    #[test]
    fn degenerate_rate_gives_zero_vector() {
        let mut rng = seeded_rng(1);
        let l = sample_level0(16, 1e-6, None, Side::Left, None, &mut rng).unwrap();
        assert_eq!(l, vec![BinVector::zero(16)]);
    }

    #[test]
    fn infeasible_and_budget_errors() {
        let mut rng = seeded_rng(1);
        assert!(matches!(
            sample_level0(8, 0.5, Some(17), Side::Left, None, &mut rng),
            Err(Error::InfeasibleTarget { target: 17, space: 16 })
        ));
        assert!(matches!(
            sample_level0(8, 0.5, Some(16), Side::Left, Some(3), &mut rng),
            Err(Error::BudgetExceeded { budget: 3, .. })
        ));
        assert!(sample_level0(8, 1.0, None, Side::Left, None, &mut rng).is_err());
    }
}

//! Latin rectangles: exact counts, the product bounds and the row-extension
//! event family.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::bounds::{Bound, Check};
use crate::exact::{factorial, falling, ratio};
use crate::family::{EventFamily, FamilyError};
use crate::interval::Interval;
use crate::matching::{Matching, MatchingSpace, Vertex};
use crate::parallel::map_slice;
use crate::report;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatinError {
    #[error("need 1 <= k <= n, got k = {k}, n = {n}")]
    BadParams { k: u32, n: u32 },
    #[error("too large for exact counting: {0}")]
    TooLarge(String),
    #[error("invalid rectangle: {0}")]
    InvalidRectangle(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// A `k x n` array over `1..=n` whose rows are permutations and whose columns
/// have no repeated symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatinRectangle {
    n: u32,
    rows: Vec<Vec<u32>>,
}

impl LatinRectangle {
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self, LatinError> {
        let n = rows.first().map_or(0, |r| r.len());
        if n == 0 {
            return Err(LatinError::InvalidRectangle("no rows or empty rows".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(LatinError::InvalidRectangle(format!("row {} has length {}, expected {n}", i + 1, row.len())));
            }
            let mut seen = vec![false; n + 1];
            for &s in row {
                if s == 0 || s as usize > n || std::mem::replace(&mut seen[s as usize], true) {
                    return Err(LatinError::InvalidRectangle(format!("row {} is not a permutation of 1..={n}", i + 1)));
                }
            }
        }
        for j in 0..n {
            for a in 0..rows.len() {
                for b in a + 1..rows.len() {
                    if rows[a][j] == rows[b][j] {
                        return Err(LatinError::InvalidRectangle(format!("column {} repeats symbol {}", j + 1, rows[a][j])));
                    }
                }
            }
        }
        Ok(LatinRectangle { n: n as u32, rows })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// `availability[j][s]`: symbol `s + 1` may go in column `j + 1` of a new row.
    pub fn availability(&self) -> Vec<Vec<bool>> {
        let n = self.n as usize;
        let mut a = vec![vec![true; n]; n];
        for row in &self.rows {
            for (j, &s) in row.iter().enumerate() {
                a[j][s as usize - 1] = false;
            }
        }
        a
    }
}

/// Permanent of a 0/1 matrix by Ryser's inclusion-exclusion over column
/// subsets.
pub fn permanent(m: &[Vec<bool>]) -> BigInt {
    let n = m.len();
    assert!(n <= 24, "permanent of a {n}x{n} matrix is out of range");
    if n == 0 {
        return BigInt::one();
    }
    let mut total = BigInt::zero();
    for s in 1u32..(1 << n) {
        let mut prod = BigInt::one();
        for row in m {
            let sum = (0..n).filter(|&j| s >> j & 1 == 1 && row[j]).count();
            if sum == 0 {
                prod = BigInt::zero();
                break;
            }
            prod *= sum;
        }
        if (n - s.count_ones() as usize).is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    total
}

/// Number of permutations that extend `rect` by one row.
pub fn extension_count(rect: &LatinRectangle) -> BigUint {
    permanent(&rect.availability()).to_biguint().expect("permanent of a 0/1 matrix is nonnegative")
}

/// Number of ways to fill one row given column masks of used symbols:
/// `f[S]` counts fillings of the first `|S|` columns with symbol set `S`.
fn last_row_count(col_used: &[u16], n: usize) -> u64 {
    let mut f = vec![0u64; 1 << n];
    f[0] = 1;
    for mask in 0..(1usize << n) {
        let c = f[mask];
        if c == 0 {
            continue;
        }
        let j = mask.count_ones() as usize;
        if j == n {
            continue;
        }
        let mut free = !(mask as u16 | col_used[j]) & ((1u16 << n) - 1);
        while free != 0 {
            let s = free.trailing_zeros() as usize;
            free &= free - 1;
            f[mask | 1 << s] += c;
        }
    }
    f[(1 << n) - 1]
}

/// Counts completions of rows `row..k` where row `r`'s first entry is fixed
/// to symbol `r` (the normalised first column), the last row by
/// [`last_row_count`].
fn count_normalised(n: usize, k: usize, row: usize, col_used: &mut [u16]) -> u64 {
    if row == k - 1 {
        let mut used = col_used.to_vec();
        // first column fixed to symbol k-1
        if used[0] >> (k - 1) & 1 == 1 {
            return 0;
        }
        used[0] = !(1u16 << (k - 1)) & ((1u16 << n) - 1);
        return last_row_count(&used, n);
    }
    let mut total = 0u64;
    fill_row(n, 0, 0, row, col_used, &mut |cu| total += count_normalised(n, k, row + 1, cu));
    total
}

/// Fills row `row` column by column (the first column forced to symbol `row`).
fn fill_row(n: usize, j: usize, row_used: u16, row: usize, col_used: &mut [u16], done: &mut dyn FnMut(&mut [u16])) {
    if j == n {
        done(col_used);
        return;
    }
    let mut free = !(row_used | col_used[j]) & ((1u16 << n) - 1);
    if j == 0 {
        free &= 1 << row;
    }
    while free != 0 {
        let s = free.trailing_zeros();
        free &= free - 1;
        col_used[j] |= 1 << s;
        fill_row(n, j + 1, row_used | 1 << s, row, col_used, done);
        col_used[j] &= !(1 << s);
    }
}

/// Largest `k` for which [`latin_count_exact`] runs at each `n`.
pub fn exact_count_supported(k: u32, n: u32) -> bool {
    n <= 7 || (n == 8 && k <= 4)
}

/// `L(k, n)` by counting normalised rectangles (first row the identity,
/// first column `1..=k`) and multiplying by `n! (n-1)! / (n-k)!`. The last
/// row is counted as a permanent; `L(n, n) = L(n-1, n)`.
pub fn latin_count_exact(k: u32, n: u32) -> Result<BigUint, LatinError> {
    if k == 0 || k > n {
        return Err(LatinError::BadParams { k, n });
    }
    if !exact_count_supported(k, n) {
        return Err(LatinError::TooLarge(format!("k = {k}, n = {n}")));
    }
    if k == 1 {
        return Ok(factorial(n as u64));
    }
    if k == n {
        return latin_count_exact(n - 1, n);
    }
    let (nn, kk) = (n as usize, k as usize);
    let identity: Vec<u16> = (0..nn).map(|j| 1u16 << j).collect();
    let normalised = if kk == 2 {
        let mut cu = identity.clone();
        count_normalised(nn, kk, 1, &mut cu)
    } else {
        // split over the choices of row 2 for parallelism
        let mut rows2 = Vec::new();
        let mut cu = identity.clone();
        fill_row(nn, 0, 0, 1, &mut cu, &mut |c| rows2.push(c.to_vec()));
        map_slice(&rows2, |c| count_normalised(nn, kk, 2, &mut c.clone())).into_iter().sum()
    };
    Ok(factorial(n as u64) * falling(n as u64 - 1, k as u64 - 1) * normalised)
}

/// `L(k, n)` by plain backtracking over rows with the first row fixed to the
/// identity (times `n!`); a cross-check for `n <= 6`.
pub fn latin_count_backtrack(k: u32, n: u32) -> Result<BigUint, LatinError> {
    if k == 0 || k > n {
        return Err(LatinError::BadParams { k, n });
    }
    if n > 6 {
        return Err(LatinError::TooLarge(format!("backtracking needs n <= 6, got {n}")));
    }
    fn rows(n: usize, left: usize, col_used: &mut [u16]) -> u64 {
        if left == 0 {
            return 1;
        }
        let mut total = 0;
        fill_any(n, 0, 0, col_used, &mut |cu| total += rows(n, left - 1, cu));
        total
    }
    fn fill_any(n: usize, j: usize, row_used: u16, col_used: &mut [u16], done: &mut dyn FnMut(&mut [u16])) {
        if j == n {
            done(col_used);
            return;
        }
        for s in 0..n {
            if (row_used | col_used[j]) >> s & 1 == 0 {
                col_used[j] |= 1 << s;
                fill_any(n, j + 1, row_used | 1 << s, col_used, done);
                col_used[j] &= !(1 << s);
            }
        }
    }
    let nn = n as usize;
    let mut cu: Vec<u16> = (0..nn).map(|j| 1u16 << j).collect();
    Ok(factorial(n as u64) * rows(nn, k as usize - 1, &mut cu))
}

/// `(n!)^k prod_{t=1}^{k-1} (1 - t/n)^n`, exactly.
pub fn latin_lower_exact(k: u32, n: u32) -> BigRational {
    let nf = BigRational::from_integer(BigInt::from(factorial(n as u64)));
    (1..k).fold(nf.pow(k as i32), |acc, t| acc * BigRational::new(BigInt::from(n - t), BigInt::from(n)).pow(n as i32))
}

/// `(n!)^k prod_{t=1}^{k-1} (1 - t/n + 4t^2/n^2)^n`, exactly, when
/// `8(k-1)/n < 1`.
pub fn latin_upper_exact(k: u32, n: u32) -> Option<BigRational> {
    if !upper_applicable(k, n) {
        return None;
    }
    let nf = BigRational::from_integer(BigInt::from(factorial(n as u64)));
    let n2 = BigInt::from(n as u64 * n as u64);
    Some((1..k as u64).fold(nf.pow(k as i32), |acc, t| {
        let num = BigInt::from(n as u64 * n as u64 - t * n as u64 + 4 * t * t);
        acc * BigRational::new(num, n2.clone()).pow(n as i32)
    }))
}

fn upper_applicable(k: u32, n: u32) -> bool {
    8 * (k as u64).saturating_sub(1) < n as u64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatinBounds {
    pub k: u32,
    pub n: u32,
    /// Natural logs; the lower bound rounded down, the upper bound rounded up.
    #[serde(serialize_with = "report::f64_str")]
    pub log_lower_lat2: f64,
    pub log_upper_felso3: Bound,
    #[serde(serialize_with = "report::f64_str")]
    pub log_stein: f64,
    /// Each bound divided by `(n!)^k`.
    #[serde(serialize_with = "report::f64_str")]
    pub lower_ratio: f64,
    pub upper_ratio: Bound,
    #[serde(serialize_with = "report::f64_str")]
    pub stein_ratio: f64,
    pub validity: Vec<Check>,
}

fn ln_factorial_interval(n: u64) -> Interval {
    (2..=n).fold(Interval::exact(0.0), |acc, m| acc.add(Interval::from_u64(m).ln()))
}

/// The lower bound from the local lemma, the near-positive upper bound and
/// Stein's asymptotic `(n!)^k e^{-C(k,2) - k^3/(6n)}`, in log space.
pub fn latin_bounds(k: u32, n: u32) -> Result<LatinBounds, LatinError> {
    if k == 0 || k > n {
        return Err(LatinError::BadParams { k, n });
    }
    let base = ln_factorial_interval(n as u64).scale(k as u64);
    let nn = Interval::from_u64(n as u64);
    let lower_log_ratio = (1..k).fold(Interval::exact(0.0), |acc, t| {
        let x = Interval::from_u64(t as u64).div(nn).neg();
        acc.add(x.ln_1p().scale(n as u64))
    });
    let applicable = upper_applicable(k, n);
    let check = Check::rational("8 (k - 1) / n < 1", &ratio(8 * (k as u64 - 1), n as u64), &ratio(1, 1), applicable);
    let upper_log_ratio = applicable.then(|| {
        (1..k as u64).fold(Interval::exact(0.0), |acc, t| {
            let x = Interval::from_u64(4 * t * t).div(nn.mul(nn)).sub(Interval::from_u64(t).div(nn));
            acc.add(x.ln_1p().scale(n as u64))
        })
    });
    let kf = k as f64;
    let stein_log_ratio = -(kf * (kf - 1.0) / 2.0) - kf.powi(3) / (6.0 * n as f64);
    let log_stein = base.mid() + stein_log_ratio;
    Ok(LatinBounds {
        k,
        n,
        log_lower_lat2: base.add(lower_log_ratio).lo(),
        log_upper_felso3: upper_log_ratio.map_or(Bound::Inapplicable, |u| Bound::Value(base.add(u).hi())),
        log_stein,
        lower_ratio: lower_log_ratio.exp().lo(),
        upper_ratio: upper_log_ratio.map_or(Bound::Inapplicable, |u| Bound::Value(u.exp().hi())),
        stein_ratio: stein_log_ratio.exp(),
        validity: vec![check],
    })
}

/// The single-edge events forbidding a new row from repeating a symbol in a
/// column, in `K_{n,n}` with columns on the left and symbols on the right,
/// and the partition of those events by column.
pub fn row_extension_family(rect: &LatinRectangle) -> Result<(EventFamily, Vec<Vec<usize>>), LatinError> {
    let t = rect.rows().len();
    let n = rect.n();
    if t as u32 >= n {
        return Err(LatinError::InvalidRectangle(format!("{t} rows leave no room for another row of length {n}")));
    }
    let mut members = Vec::with_capacity(t * n as usize);
    let mut partition = Vec::with_capacity(n as usize);
    for j in 0..n as usize {
        let mut class = Vec::with_capacity(t);
        for row in rect.rows() {
            class.push(members.len());
            members.push(Matching::new([(j as Vertex + 1, -(row[j] as Vertex))]).expect("one edge"));
        }
        partition.push(class);
    }
    let family = EventFamily::new(MatchingSpace::bipartite(n, n).expect("n >= 1"), members)?;
    Ok((family, partition))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutations::derangements;

    #[test]
    fn small_counts() {
        assert_eq!(latin_count_exact(1, 5).unwrap(), factorial(5));
        assert_eq!(latin_count_exact(2, 3).unwrap(), BigUint::from(12u32));
        assert_eq!(latin_count_exact(3, 3).unwrap(), BigUint::from(12u32));
        assert_eq!(latin_count_exact(4, 4).unwrap(), BigUint::from(576u32));
        assert_eq!(latin_count_exact(5, 5).unwrap(), BigUint::from(161280u32));
        for n in 1..=5 {
            for k in 1..=n {
                assert_eq!(latin_count_exact(k, n).unwrap(), latin_count_backtrack(k, n).unwrap(), "k={k} n={n}");
            }
        }
        assert!(latin_count_exact(5, 8).is_err());
    }

    #[test]
    fn two_rows_are_derangements() {
        for n in 2..=7 {
            assert_eq!(latin_count_exact(2, n).unwrap(), factorial(n as u64) * derangements(n));
        }
    }

    #[test]
    fn permanent_matches_row_count() {
        let rect = LatinRectangle::new(vec![vec![1, 2, 3, 4], vec![2, 1, 4, 3]]).unwrap();
        assert_eq!(extension_count(&rect), BigUint::from(4u32));
        let all = vec![vec![true; 5]; 5];
        assert_eq!(permanent(&all), BigInt::from(120));
    }

    #[test]
    fn bound_examples() {
        assert_eq!(latin_lower_exact(2, 3), ratio(32, 3));
        assert_eq!(latin_upper_exact(2, 3), None);
        let b = latin_bounds(2, 3).unwrap();
        assert!((b.log_lower_lat2.exp() - 32.0 / 3.0).abs() < 1e-9);
        assert_eq!(b.log_upper_felso3, Bound::Inapplicable);
        let exact = BigRational::from_integer(BigInt::from(factorial(9) * derangements(9)));
        assert!(latin_lower_exact(2, 9) <= exact && exact <= latin_upper_exact(2, 9).unwrap());
    }

    #[test]
    fn rectangle_validation() {
        assert!(LatinRectangle::new(vec![vec![1, 2, 3], vec![1, 3, 2]]).is_err());
        assert!(LatinRectangle::new(vec![vec![1, 2, 2]]).is_err());
        let (f, p) = row_extension_family(&LatinRectangle::new(vec![vec![1, 2, 3]]).unwrap()).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(p, vec![vec![0], vec![1], vec![2]]);
    }
}

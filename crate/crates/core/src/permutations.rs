//! Permutations without `k`-cycles, as avoidance of canonical events in
//! `K_{n,n}`.
//!
//! A permutation `sigma` of `1..=n` is the perfect matching
//! `{(l, -sigma(l))}`; a `k`-cycle on the set `K` is the size-`k` matching
//! `{(l, -sigma(l)) : l in K}`.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{binomial, factorial};
use crate::family::{EventFamily, FamilyError};
use crate::matching::{Matching, MatchingSpace, Vertex};
use crate::report;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermutationError {
    #[error("need 1 <= k <= n, got n = {n}, k = {k}")]
    BadParams { n: u32, k: u32 },
    #[error("too large: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

pub const MAX_CYCLE_MEMBERS: u64 = 2_000_000;

/// Calls `visit` with every cyclic order of every `k`-subset of `1..=n`,
/// written with its smallest element first.
fn for_each_k_cycle(n: u32, k: u32, mut visit: impl FnMut(&[u32])) {
    fn arrange(rest: &mut Vec<u32>, cycle: &mut Vec<u32>, visit: &mut dyn FnMut(&[u32])) {
        if rest.is_empty() {
            visit(cycle);
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            cycle.push(x);
            arrange(rest, cycle, visit);
            cycle.pop();
            rest.insert(i, x);
        }
    }
    fn choose(n: u32, k: u32, start: u32, subset: &mut Vec<u32>, visit: &mut dyn FnMut(&[u32])) {
        if subset.len() == k as usize {
            let mut cycle = vec![subset[0]];
            let mut rest = subset[1..].to_vec();
            arrange(&mut rest, &mut cycle, visit);
            return;
        }
        for x in start..=n {
            subset.push(x);
            choose(n, k, x + 1, subset, visit);
            subset.pop();
        }
    }
    choose(n, k, 1, &mut Vec::new(), &mut visit);
}

/// All `C(n, k) (k-1)!` matchings of `K_{n,n}` encoding a `k`-cycle.
pub fn k_cycle_event_family(n: u32, k: u32) -> Result<EventFamily, PermutationError> {
    if k == 0 || k > n {
        return Err(PermutationError::BadParams { n, k });
    }
    let size = binomial(n as u64, k as u64) * factorial(k as u64 - 1);
    if size > BigUint::from(MAX_CYCLE_MEMBERS) {
        return Err(PermutationError::TooLarge(format!("{size} cycles > {MAX_CYCLE_MEMBERS}")));
    }
    let mut members = Vec::new();
    for_each_k_cycle(n, k, |cycle| {
        let len = cycle.len();
        let edges = (0..len).map(|i| (cycle[i] as Vertex, -(cycle[(i + 1) % len] as Vertex)));
        members.push(Matching::new(edges).expect("a cycle is a matching"));
    });
    let space = MatchingSpace::bipartite(n, n).expect("n >= 1");
    Ok(EventFamily::new(space, members)?)
}

/// `sum_{j=0}^{n/k} (-1)^j n! / (j! k^j)`.
pub fn k_cycle_free_inclusion_exclusion(n: u32, k: u32) -> Result<BigUint, PermutationError> {
    if k == 0 || k > n {
        return Err(PermutationError::BadParams { n, k });
    }
    let nf = BigInt::from(factorial(n as u64));
    let mut sum = BigInt::zero();
    for j in 0..=(n / k) {
        let term = &nf / (BigInt::from(factorial(j as u64)) * BigInt::from(k).pow(j));
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    debug_assert!(!sum.is_negative());
    Ok(sum.to_biguint().expect("nonnegative"))
}

pub const MAX_BRUTE_FORCE_N: u32 = 11;

/// For every `k` in `1..=n`, the number of permutations of `1..=n` with no
/// `k`-cycle, by visiting all `n!` permutations (Heap's algorithm). Entry
/// `k - 1` holds the count for `k`.
pub fn k_cycle_free_brute_force_all(n: u32) -> Result<Vec<u64>, PermutationError> {
    if n == 0 {
        return Err(PermutationError::BadParams { n, k: 0 });
    }
    if n > MAX_BRUTE_FORCE_N {
        return Err(PermutationError::TooLarge(format!("n = {n} > {MAX_BRUTE_FORCE_N}")));
    }
    let n = n as usize;
    let mut counts = vec![0u64; n];
    let mut perm: Vec<usize> = (0..n).collect();
    let mut tally = |p: &[usize]| {
        let mut seen = 0u32;
        let mut lengths = 0u32;
        for s in 0..n {
            if seen >> s & 1 == 1 {
                continue;
            }
            let mut len = 0;
            let mut x = s;
            while seen >> x & 1 == 0 {
                seen |= 1 << x;
                x = p[x];
                len += 1;
            }
            lengths |= 1 << (len - 1);
        }
        for (k, c) in counts.iter_mut().enumerate() {
            if lengths >> k & 1 == 0 {
                *c += 1;
            }
        }
    };
    tally(&perm);
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            tally(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(counts)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleFreeCount {
    pub n: u32,
    pub k: u32,
    /// By inclusion-exclusion.
    #[serde(serialize_with = "report::display_str")]
    pub count: BigUint,
    /// By enumerating permutations, when `n` is small enough.
    #[serde(serialize_with = "opt_display")]
    pub brute_force: Option<BigUint>,
}

fn opt_display<S: serde::Serializer>(x: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

impl CycleFreeCount {
    /// Both methods agree (vacuously true without a brute-force value).
    pub fn consistent(&self) -> bool {
        self.brute_force.as_ref().is_none_or(|b| *b == self.count)
    }
}

/// Permutations of `1..=n` with no `k`-cycle, by inclusion-exclusion and, for
/// `n <= brute_force_max`, also by enumeration.
pub fn k_cycle_free_count(n: u32, k: u32, brute_force_max: u32) -> Result<CycleFreeCount, PermutationError> {
    let count = k_cycle_free_inclusion_exclusion(n, k)?;
    let brute_force = if n <= brute_force_max.min(MAX_BRUTE_FORCE_N) {
        Some(BigUint::from(k_cycle_free_brute_force_all(n)?[k as usize - 1]))
    } else {
        None
    };
    Ok(CycleFreeCount { n, k, count, brute_force })
}

/// `D_n`, the number of derangements, by `D_n = (n-1)(D_{n-1} + D_{n-2})`.
pub fn derangements(n: u32) -> BigUint {
    let (mut a, mut b) = (BigUint::from(1u32), BigUint::zero()); // D_0, D_1
    if n == 0 {
        return a;
    }
    for m in 2..=n {
        let next = (&a + &b) * (m - 1);
        a = b;
        b = next;
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use crate::family::family_stats;

    #[test]
    fn family_examples() {
        let f = k_cycle_event_family(5, 2).unwrap();
        assert_eq!(f.len(), 10);
        assert_eq!(family_stats(&f).unwrap().mu, ratio(1, 2));
        assert_eq!(k_cycle_event_family(3, 3).unwrap().len(), 2);
        let f = k_cycle_event_family(4, 1).unwrap();
        assert_eq!(f.len(), 4);
        assert_eq!(family_stats(&f).unwrap().mu, ratio(1, 1));
        assert!(k_cycle_event_family(3, 4).is_err());
    }

    #[test]
    fn count_examples() {
        assert_eq!(k_cycle_free_count(4, 2, 10).unwrap().count, BigUint::from(15u32));
        assert_eq!(k_cycle_free_count(4, 1, 10).unwrap().count, BigUint::from(9u32));
        let c = k_cycle_free_count(5, 5, 10).unwrap();
        assert_eq!(c.count, BigUint::from(96u32));
        assert!(c.consistent());
        assert_eq!(derangements(9), BigUint::from(133496u32));
    }
}

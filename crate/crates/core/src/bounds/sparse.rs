//! Sparseness conditions and the near-positive upper bound.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::lll::discriminant;
use super::{asymptotic_value, Bound, BoundReport, BoundsError, Check};
use crate::exact::{ratio, rational_from_f64};
use crate::family::{EventFamily, FamilyStats};
use crate::interval::Interval;
use crate::matching::{in_conflict, Matching, MatchingSpace, Vertex};
use crate::parallel::map_indexed;
use crate::report;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaChoice {
    /// The smallest delta allowed by the overlap condition.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparsenessReport {
    /// No member is a subset of another.
    pub cond1_holds: bool,
    /// A pair `(sub, sup)` of member indices breaking condition 1.
    pub cond1_witness: Option<(usize, usize)>,
    /// `sum_j d_j p_{N-2r+2,j} < 1/(8r) - delta`.
    pub cond2: Check,
    /// `max_F sum_{M in M_F} p_{N,|M|}`.
    #[serde(serialize_with = "report::rational_str")]
    pub delta_min_cond3: BigRational,
    /// A member attaining `delta_min_cond3`.
    pub cond3_argmax: Option<usize>,
    pub cond3_holds: bool,
    /// `16 r delta < 1`.
    pub cond4: Check,
    #[serde(serialize_with = "report::rational_str")]
    pub chosen_delta: BigRational,
}

impl SparsenessReport {
    pub fn cond2_holds(&self) -> bool {
        self.cond2.holds
    }

    pub fn cond4_holds(&self) -> bool {
        self.cond4.holds
    }

    pub fn holds(&self) -> bool {
        self.cond1_holds && self.cond2.holds && self.cond3_holds && self.cond4.holds
    }

    pub fn checks(&self) -> Vec<Check> {
        vec![
            Check::text(
                "no member is a subset of another",
                self.cond1_witness.map_or("none".to_string(), |(a, b)| format!("member {a} within member {b}")),
                "none",
                self.cond1_holds,
            ),
            self.cond2.clone(),
            Check::rational("max_F sum_(M in M_F) p_(N,|M|) <= delta", &self.delta_min_cond3, &self.chosen_delta, self.cond3_holds),
            self.cond4.clone(),
        ]
    }
}

fn resolve_delta(choice: DeltaChoice, delta_min: &BigRational) -> Result<BigRational, BoundsError> {
    match choice {
        DeltaChoice::Auto => Ok(delta_min.clone()),
        DeltaChoice::Fixed(x) => {
            if !x.is_finite() || x < 0.0 {
                return Err(BoundsError::BadDelta(x));
            }
            Ok(rational_from_f64(x).expect("finite"))
        }
    }
}

/// Members indexed by each edge they contain.
fn edge_index(members: &[Matching]) -> HashMap<(Vertex, Vertex), Vec<usize>> {
    let mut index: HashMap<(Vertex, Vertex), Vec<usize>> = HashMap::new();
    for (i, m) in members.iter().enumerate() {
        for &e in m.edges() {
            index.entry(e).or_default().push(i);
        }
    }
    index
}

fn subset_witness(members: &[Matching], index: &HashMap<(Vertex, Vertex), Vec<usize>>) -> Option<(usize, usize)> {
    members.iter().enumerate().find_map(|(i, m)| {
        let first = m.edges().first()?;
        index[first].iter().find(|&&j| j != i && m.is_subset_of(&members[j])).map(|&j| (i, j))
    })
}

/// `sum_{M in M_F} p_{N,|M|}` for member `f`, where `M_F` is the set of
/// differences `M \ F` over members `M != F` sharing an edge with `F` and not
/// conflicting with it.
fn overlap_sum(space: &MatchingSpace, members: &[Matching], index: &HashMap<(Vertex, Vertex), Vec<usize>>, f: usize) -> BigRational {
    let fm = &members[f];
    let mut seen: HashSet<usize> = HashSet::new();
    let mut diffs: HashSet<Matching> = HashSet::new();
    for e in fm.edges() {
        for &j in &index[e] {
            if j != f && seen.insert(j) && !in_conflict(fm, &members[j]) {
                diffs.insert(members[j].difference(fm));
            }
        }
    }
    diffs.iter().fold(BigRational::zero(), |acc, d| acc + space.extension_probability(d.len()).expect("fits in the space"))
}

fn shrunk_degree_sum(stats: &FamilyStats, space: &MatchingSpace, k: usize) -> Option<BigRational> {
    stats.degree_weighted_sum(&space.shrink(k)?)
}

/// Evaluates the four sparseness conditions. With [`DeltaChoice::Auto`] the
/// delta is the smallest value allowed by the overlap condition.
pub fn delta_sparseness(family: &EventFamily, delta: DeltaChoice) -> Result<SparsenessReport, BoundsError> {
    if family.is_empty() {
        let chosen = resolve_delta(delta, &BigRational::zero())?;
        return Ok(SparsenessReport {
            cond1_holds: true,
            cond1_witness: None,
            cond2: Check::text("sum_j d_j p_(N-2r+2,j) < 1/(8r) - delta", "0", "empty family", true),
            delta_min_cond3: BigRational::zero(),
            cond3_argmax: None,
            cond3_holds: true,
            cond4: Check::text("16 r delta < 1", "0", "1", true),
            chosen_delta: chosen,
        });
    }
    let stats = family.stats()?;
    let space = family.space();
    let members = family.members();
    let index = edge_index(members);

    let cond1_witness = subset_witness(members, &index);

    let sums = map_indexed(members.len() as u64, |f| overlap_sum(space, members, &index, f as usize));
    let (arg, delta_min) = sums
        .iter()
        .enumerate()
        .fold((0usize, BigRational::zero()), |(bi, best), (i, s)| if *s > best { (i, s.clone()) } else { (bi, best) });
    let cond3_argmax = (!delta_min.is_zero()).then_some(arg);
    let chosen = resolve_delta(delta, &delta_min)?;

    let r = stats.r;
    let eighth = ratio(1, 8 * r as i64);
    let rhs2 = &eighth - &chosen;
    let cond2 = match shrunk_degree_sum(stats, space, r - 1) {
        Some(lhs) => {
            let holds = lhs < rhs2;
            Check::rational("sum_j d_j p_(N-2r+2,j) < 1/(8r) - delta", &lhs, &rhs2, holds)
        }
        None => Check::text("sum_j d_j p_(N-2r+2,j) < 1/(8r) - delta", "undefined", crate::exact::fmt_rational(&rhs2), false),
    };
    let lhs4 = &chosen * BigInt::from(16 * r);
    let cond4 = Check::rational("16 r delta < 1", &lhs4, &BigRational::one(), lhs4 < BigRational::one());

    Ok(SparsenessReport {
        cond1_holds: cond1_witness.is_none(),
        cond1_witness,
        cond2,
        cond3_holds: delta_min <= chosen,
        delta_min_cond3: delta_min,
        cond3_argmax,
        cond4,
        chosen_delta: chosen,
    })
}

/// Encloses `1 - (1 - 2 delta) prod_{i<r} (1 + sqrt(1 - 8 r sum_j d_j p_{N-2i,j})) / 2`,
/// with `N - 2i` meaning the space shrunk by `i` edges. `None` if a
/// discriminant is negative or a shrunken space cannot hold the sizes.
fn epsilon_interval(family: &EventFamily, delta: &BigRational) -> Result<Option<Interval>, BoundsError> {
    let twice = Interval::from_rational(&(delta * BigInt::from(2)));
    if family.is_empty() {
        return Ok(Some(twice));
    }
    let one = Interval::exact(1.0);
    let scale = one.sub(twice);
    let stats = family.stats()?;
    let mut prod = scale;
    for i in 0..stats.r {
        let Some(s) = shrunk_degree_sum(stats, family.space(), i) else { return Ok(None) };
        let disc = discriminant(stats.r, &s);
        if disc.is_negative() {
            return Ok(None);
        }
        let factor = one.add(Interval::from_rational(&disc).sqrt()).mul(Interval::exact(0.5));
        prod = prod.mul(factor);
    }
    Ok(Some(one.sub(prod).clamp(0.0, 1.0)))
}

/// The `epsilon` for which a `delta`-sparse family's conflict graph is an
/// `epsilon`-near-positive dependency graph, rounded up.
pub fn near_positive_epsilon(family: &EventFamily, delta: f64) -> Result<Bound, BoundsError> {
    let delta = resolve_delta(DeltaChoice::Fixed(delta), &BigRational::zero())?;
    Ok(match epsilon_interval(family, &delta)? {
        Some(iv) => Bound::Value(iv.hi()),
        None => Bound::Inapplicable,
    })
}

/// `prod_M (1 - (1 - eps) Pr(A_M))`, rounded up, when the family is
/// delta-sparse; the report's validity lists the four conditions.
pub fn upper_bound(family: &EventFamily, delta: DeltaChoice) -> Result<BoundReport, BoundsError> {
    if family.is_empty() {
        return Ok(BoundReport { epsilon: Some(0.0), delta: Some(BigRational::zero()), ..BoundReport::trivial() });
    }
    let stats = family.stats()?;
    let sparse = delta_sparseness(family, delta)?;
    let mut report = BoundReport {
        asymptotic: Some(asymptotic_value(&stats.mu)),
        delta: Some(sparse.chosen_delta.clone()),
        validity: sparse.checks(),
        ..BoundReport::empty()
    };
    if !sparse.holds() {
        return Ok(report);
    }
    let Some(eps) = epsilon_interval(family, &sparse.chosen_delta)? else {
        report.validity.push(Check::text("1 - 8 r sum_j d_j p_(N-2i,j) >= 0 for all i < r", "negative", "0", false));
        return Ok(report);
    };
    let keep = Interval::exact(1.0).sub(eps);
    let log = stats.classes.iter().fold(Interval::exact(0.0), |acc, c| {
        let x = keep.mul(Interval::from_rational(&c.probability));
        acc.add(x.neg().ln_1p().scale(c.count as u64))
    });
    report.epsilon = Some(eps.hi());
    report.upper = Bound::Value(log.exp().hi().min(1.0));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::canonical_form;

    fn fam(space: MatchingSpace, ms: &[&[[Vertex; 2]]]) -> EventFamily {
        EventFamily::new(space, ms.iter().map(|p| canonical_form(p).unwrap()).collect()).unwrap()
    }

    #[test]
    fn single_edge_in_k100() {
        let f = fam(MatchingSpace::complete(100).unwrap(), &[&[[1, 2]]]);
        let s = delta_sparseness(&f, DeltaChoice::Auto).unwrap();
        assert!(s.holds());
        assert!(s.delta_min_cond3.is_zero());
        assert_eq!(s.cond2.lhs, "1/99");

        let eps = near_positive_epsilon(&f, 0.0).unwrap().value().unwrap();
        let expect = 1.0 - (1.0 + (1.0f64 - 8.0 / 99.0).sqrt()) / 2.0;
        assert!((eps - expect).abs() < 1e-14 && eps >= expect);
        assert!((eps - 0.02063).abs() < 1e-5);

        let u = upper_bound(&f, DeltaChoice::Auto).unwrap().upper.value().unwrap();
        assert!((u - (1.0 - (1.0 - expect) / 99.0)).abs() < 1e-14);
        assert!(u >= 98.0 / 99.0);
        assert!((u - 0.990107).abs() < 1e-6);
    }

    #[test]
    fn subset_breaks_condition_one() {
        let f = fam(MatchingSpace::complete(10).unwrap(), &[&[[1, 2]], &[[1, 2], [3, 4]]]);
        let s = delta_sparseness(&f, DeltaChoice::Auto).unwrap();
        assert!(!s.cond1_holds);
        assert_eq!(s.cond1_witness, Some((0, 1)));
        assert_eq!(upper_bound(&f, DeltaChoice::Auto).unwrap().upper, Bound::Inapplicable);
    }

    #[test]
    fn overlap_sum_counts_distinct_differences() {
        // F = {12,34}; {12,56} and {34,56} both leave {56}; {12,35} conflicts.
        let f = fam(
            MatchingSpace::complete(20).unwrap(),
            &[&[[1, 2], [3, 4]], &[[1, 2], [5, 6]], &[[3, 4], [5, 6]], &[[1, 2], [3, 5]]],
        );
        let s = delta_sparseness(&f, DeltaChoice::Auto).unwrap();
        // for every F the two compatible overlaps leave the same single edge
        assert_eq!(s.delta_min_cond3, ratio(1, 19));
    }

    #[test]
    fn large_delta_breaks_condition_four() {
        let f = fam(MatchingSpace::complete(100).unwrap(), &[&[[1, 2]]]);
        let s = delta_sparseness(&f, DeltaChoice::Fixed(0.5)).unwrap();
        assert!(!s.cond4_holds());
        assert!(!s.holds());
        assert!(delta_sparseness(&f, DeltaChoice::Fixed(-1.0)).is_err());
    }

    #[test]
    fn empty_family_is_trivial() {
        let f = EventFamily::new(MatchingSpace::complete(4).unwrap(), vec![]).unwrap();
        assert!(delta_sparseness(&f, DeltaChoice::Auto).unwrap().holds());
        assert_eq!(upper_bound(&f, DeltaChoice::Auto).unwrap().upper, Bound::Value(1.0));
        assert_eq!(near_positive_epsilon(&f, 0.0).unwrap(), Bound::Value(0.0));
    }
}

//! Local-lemma lower bounds.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{asymptotic_value, Bound, BoundReport, BoundsError, Check};
use crate::exact::rational_from_f64;
use crate::family::{conflict_graph, ConflictGraph, EventFamily, FamilyStats};
use crate::interval::Interval;

#[derive(Debug, Clone, PartialEq)]
pub enum LllOutcome {
    /// `prod (1 - x_i)`, rounded down.
    Lower(f64),
    /// `p_index > x_index * prod_{j ~ index} (1 - x_j)`.
    Infeasible { index: usize },
}

/// The local lemma with weights `x`: if `p_i <= x_i prod_{ij in E} (1 - x_j)`
/// for every `i`, no event occurs with probability at least `prod (1 - x_i)`.
/// The condition is checked exactly, treating each `x_i` as the rational
/// value of its float.
pub fn lll_lower_bound(probabilities: &[BigRational], graph: &ConflictGraph, x: &[f64]) -> Result<LllOutcome, BoundsError> {
    let n = probabilities.len();
    if graph.len() != n {
        return Err(BoundsError::DimensionMismatch { what: "graph", expected: n, got: graph.len() });
    }
    if x.len() != n {
        return Err(BoundsError::DimensionMismatch { what: "x", expected: n, got: x.len() });
    }
    let mut xr = Vec::with_capacity(n);
    for (index, &value) in x.iter().enumerate() {
        if !(0.0..1.0).contains(&value) {
            return Err(BoundsError::BadWeight { index, value });
        }
        xr.push(rational_from_f64(value).expect("finite"));
    }
    let one = BigRational::one();
    for i in 0..n {
        let rhs = graph.neighbors(i).iter().fold(xr[i].clone(), |acc, &j| acc * (&one - &xr[j]));
        if probabilities[i] > rhs {
            return Ok(LllOutcome::Infeasible { index: i });
        }
    }
    let log = x
        .iter()
        .filter(|&&v| v != 0.0)
        .fold(Interval::exact(0.0), |acc, &v| acc.add(Interval::exact(-v).ln_1p()));
    Ok(LllOutcome::Lower(log.exp().lo().min(1.0)))
}

/// The symmetric corollary: for `0 < eps < 0.14`, if every event has
/// probability below `eps` and every neighbourhood sum is below `eps`, no
/// event occurs with probability at least `exp(-(1 + 3 eps) mu)`.
pub fn simple_lower_bound(family: &EventFamily, epsilon: f64) -> Result<BoundReport, BoundsError> {
    if !(epsilon > 0.0 && epsilon < 0.14) {
        return Err(BoundsError::BadEpsilon(epsilon));
    }
    if family.is_empty() {
        return Ok(BoundReport::trivial());
    }
    let eps = rational_from_f64(epsilon).expect("finite");
    let probs = family.probabilities()?;
    let graph = conflict_graph(family);

    let (pi, pmax) = probs.iter().enumerate().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0))).expect("nonempty");
    let point = Check::rational(&format!("max Pr(A_i) < eps (i = {pi})"), pmax, &eps, *pmax < eps);

    let sums: Vec<BigRational> =
        (0..family.len()).map(|i| graph.neighbors(i).iter().fold(BigRational::zero(), |acc, &j| acc + &probs[j])).collect();
    let (si, smax) = sums.iter().enumerate().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0))).expect("nonempty");
    let neighbourhood =
        Check::rational(&format!("max sum_(j ~ i) Pr(A_j) < eps (i = {si})"), smax, &eps, *smax < eps);

    let mu = probs.iter().fold(BigRational::zero(), |acc, p| acc + p);
    let holds = point.holds && neighbourhood.holds;
    let lower = if holds {
        let factor = Interval::exact(1.0).add(Interval::exact(epsilon).scale(3));
        let v = factor.mul(Interval::from_rational(&mu)).neg().exp().lo().min(1.0);
        Bound::Value(v)
    } else {
        Bound::Inapplicable
    };
    Ok(BoundReport {
        lower,
        asymptotic: Some(asymptotic_value(&mu)),
        validity: vec![point, neighbourhood],
        ..BoundReport::empty()
    })
}

/// `sum_j d_j p_{N,j}` over the family's size classes.
pub(super) fn degree_sum(stats: &FamilyStats) -> BigRational {
    stats.classes.iter().fold(BigRational::zero(), |acc, c| acc + &c.probability * BigInt::from(c.degree))
}

/// `1 - 8 r s`.
pub(super) fn discriminant(r: usize, s: &BigRational) -> BigRational {
    BigRational::one() - s * BigInt::from(8 * r)
}

/// The product bound from the symmetric local lemma with `x_i = y p_{N,i}`,
/// `y = 2 / (1 + sqrt(1 - 8 r sum_j d_j p_{N,j}))`.
pub fn l5_lower_bound(family: &EventFamily) -> Result<BoundReport, BoundsError> {
    if family.is_empty() {
        return Ok(BoundReport::trivial());
    }
    let stats = family.stats()?;
    let disc = discriminant(stats.r, &degree_sum(stats));
    let check = Check::rational("1 - 8 r sum_j d_j p_(N,j) >= 0", &disc, &BigRational::zero(), !disc.is_negative());
    let lower = if check.holds {
        let denom = Interval::exact(1.0).add(Interval::from_rational(&disc).sqrt());
        let log = stats.classes.iter().fold(Interval::exact(0.0), |acc, c| {
            let x = Interval::from_rational(&c.probability).scale(2).div(denom);
            acc.add(x.neg().ln_1p().scale(c.count as u64))
        });
        Bound::Value(log.exp().lo().min(1.0))
    } else {
        Bound::Inapplicable
    };
    Ok(BoundReport { lower, asymptotic: Some(asymptotic_value(&stats.mu)), validity: vec![check], ..BoundReport::empty() })
}

/// `2 / (1 + sqrt(1 - 8 r sum_i d_i p_{N,i}))`, rounded up: the factor by
/// which the avoidance probability can grow when the space gains two
/// vertices. `None` when the discriminant is negative.
pub fn embedding_ratio_bound(family: &EventFamily) -> Result<Option<f64>, BoundsError> {
    if family.is_empty() {
        return Ok(Some(1.0));
    }
    let stats = family.stats()?;
    let disc = discriminant(stats.r, &degree_sum(stats));
    if disc.is_negative() {
        return Ok(None);
    }
    let denom = Interval::exact(1.0).add(Interval::from_rational(&disc).sqrt());
    Ok(Some(Interval::exact(2.0).div(denom).hi()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use crate::matching::{canonical_form, MatchingSpace};

    fn single_edge(n: u32) -> EventFamily {
        EventFamily::new(MatchingSpace::complete(n).unwrap(), vec![canonical_form(&[[1, 2]]).unwrap()]).unwrap()
    }

    #[test]
    fn lll_examples() {
        let g = ConflictGraph::edgeless(1);
        match lll_lower_bound(&[ratio(1, 9)], &g, &[1.0 / 6.0]).unwrap() {
            LllOutcome::Lower(v) => assert!((v - 5.0 / 6.0).abs() < 1e-12 && v <= 5.0 / 6.0 + 1e-16),
            other => panic!("{other:?}"),
        }
        let g = ConflictGraph::from_adjacency(vec![vec![1], vec![]]);
        let zero = vec![BigRational::zero(); 2];
        assert_eq!(lll_lower_bound(&zero, &g, &[0.0, 0.0]).unwrap(), LllOutcome::Lower(1.0));
        let half = vec![ratio(1, 2); 2];
        assert_eq!(lll_lower_bound(&half, &g, &[0.6, 0.6]).unwrap(), LllOutcome::Infeasible { index: 0 });
        assert!(matches!(lll_lower_bound(&half, &g, &[0.6]), Err(BoundsError::DimensionMismatch { .. })));
    }

    #[test]
    fn simple_bound_example() {
        let r = simple_lower_bound(&single_edge(100), 0.02).unwrap();
        let v = r.lower.value().unwrap();
        assert!((v - (-1.06f64 / 99.0).exp()).abs() < 1e-12);
        assert!(v <= 98.0 / 99.0);
        let r = simple_lower_bound(&single_edge(10), 0.1).unwrap();
        assert_eq!(r.lower, Bound::Inapplicable);
        assert!(simple_lower_bound(&single_edge(10), 0.14).is_err());
    }

    #[test]
    fn l5_examples() {
        let r = l5_lower_bound(&single_edge(10)).unwrap();
        let v = r.lower.value().unwrap();
        assert!((v - 5.0 / 6.0).abs() < 1e-12 && v <= 8.0 / 9.0);
        assert_eq!(l5_lower_bound(&single_edge(4)).unwrap().lower, Bound::Inapplicable);
        let empty = EventFamily::new(MatchingSpace::complete(4).unwrap(), vec![]).unwrap();
        assert_eq!(l5_lower_bound(&empty).unwrap().lower, Bound::Value(1.0));
    }

    #[test]
    fn l5_at_zero_discriminant() {
        // r = 1, d_1 = 1, p = 1/8 in K_{8,8}: 8 r d p = 1 exactly
        let space = MatchingSpace::bipartite(8, 8).unwrap();
        let f = EventFamily::new(space, vec![canonical_form(&[[1, -1]]).unwrap()]).unwrap();
        let v = l5_lower_bound(&f).unwrap().lower.value().unwrap();
        assert!((v - (1.0 - 2.0 / 8.0)).abs() < 1e-12);
    }
}

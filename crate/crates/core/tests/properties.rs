use std::collections::HashMap;

use negdep::bounds::{embedding_ratio_bound, l5_lower_bound, upper_bound, Bound, DeltaChoice};
use negdep::exact::ratio;
use negdep::oracle::{approx, avoid_probability_exact, check_negative_dependency, event_probability_exact, OracleLimits};
use negdep::{canonical_form, event_probability, family_stats, in_conflict, EventFamily, Matching, MatchingSpace, Vertex};
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

/// A matching of size `size` read off a shuffled vertex list.
fn complete_member(n: u32, max_size: usize) -> impl Strategy<Value = Vec<[Vertex; 2]>> {
    let vs: Vec<Vertex> = (1..=n as Vertex).collect();
    (Just(vs).prop_shuffle(), 1..=max_size).prop_map(|(v, size)| (0..size).map(|i| [v[2 * i], v[2 * i + 1]]).collect())
}

fn bipartite_member(n: u32, max_size: usize) -> impl Strategy<Value = Vec<[Vertex; 2]>> {
    let vs: Vec<Vertex> = (1..=n as Vertex).collect();
    (Just(vs.clone()).prop_shuffle(), Just(vs).prop_shuffle(), 1..=max_size)
        .prop_map(|(l, r, size)| (0..size).map(|i| [l[i], -r[i]]).collect())
}

fn build(space: MatchingSpace, raw: Vec<Vec<[Vertex; 2]>>) -> EventFamily {
    let mut members: Vec<Matching> = raw.iter().map(|p| canonical_form(p).unwrap()).collect();
    members.sort_by(|a, b| a.edges().cmp(b.edges()));
    members.dedup();
    EventFamily::new(space, members).unwrap()
}

fn complete_family(sizes: &'static [u32], max_size: usize, max_members: usize) -> impl Strategy<Value = EventFamily> {
    prop::sample::select(sizes).prop_flat_map(move |n| {
        prop::collection::vec(complete_member(n, max_size.min(n as usize / 2)), 1..=max_members)
            .prop_map(move |raw| build(MatchingSpace::complete(n).unwrap(), raw))
    })
}

fn bipartite_family(sizes: &'static [u32], max_size: usize, max_members: usize) -> impl Strategy<Value = EventFamily> {
    prop::sample::select(sizes).prop_flat_map(move |n| {
        prop::collection::vec(bipartite_member(n, max_size.min(n as usize)), 1..=max_members)
            .prop_map(move |raw| build(MatchingSpace::bipartite(n, n).unwrap(), raw))
    })
}

/// Union of two matchings is a matching iff no vertex gets two partners.
fn union_is_matching(a: &Matching, b: &Matching) -> bool {
    let mut partner: HashMap<Vertex, Vertex> = HashMap::new();
    for &(u, v) in a.edges().iter().chain(b.edges()) {
        for (x, y) in [(u, v), (v, u)] {
            if *partner.entry(x).or_insert(y) != y {
                return false;
            }
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_ignores_order_and_orientation(pairs in complete_member(12, 6)) {
        let m = canonical_form(&pairs).unwrap();
        prop_assert_eq!(&canonical_form(&m.to_pairs()).unwrap(), &m);
        let flipped: Vec<_> = pairs.iter().rev().map(|[a, b]| [*b, *a]).collect();
        prop_assert_eq!(canonical_form(&flipped).unwrap(), m);
    }

    #[test]
    fn conflict_is_symmetric_and_means_non_matching_union(a in complete_member(8, 4), b in complete_member(8, 4)) {
        let (a, b) = (canonical_form(&a).unwrap(), canonical_form(&b).unwrap());
        prop_assert_eq!(in_conflict(&a, &b), in_conflict(&b, &a));
        prop_assert_eq!(in_conflict(&a, &b), !union_is_matching(&a, &b));
    }

    #[test]
    fn event_probability_matches_enumeration(f in complete_family(&[4, 6, 8], 3, 3)) {
        let limits = OracleLimits::default();
        for (i, m) in f.members().iter().enumerate() {
            prop_assert_eq!(event_probability(f.space(), m).unwrap(), event_probability_exact(&f, i, &limits).unwrap());
        }
    }

    #[test]
    fn mu_is_sum_of_probabilities(f in bipartite_family(&[3, 5, 7], 3, 8)) {
        let sum = f.members().iter().fold(BigRational::zero(), |acc, m| acc + event_probability(f.space(), m).unwrap());
        prop_assert_eq!(&family_stats(&f).unwrap().mu, &sum);
    }

    #[test]
    fn conflict_graph_is_a_negative_dependency_graph(f in complete_family(&[4, 6, 8], 3, 6)) {
        let report = check_negative_dependency(&f, 6, &OracleLimits::default()).unwrap();
        prop_assert!(report.passed, "{:?}", report.violations);
    }

    #[test]
    fn bipartite_conflict_graph_is_a_negative_dependency_graph(f in bipartite_family(&[3, 4], 3, 6)) {
        let report = check_negative_dependency(&f, 6, &OracleLimits::default()).unwrap();
        prop_assert!(report.passed, "{:?}", report.violations);
    }

    #[test]
    fn avoidance_grows_with_the_space(f in complete_family(&[4, 6, 8], 2, 5)) {
        let limits = OracleLimits::default();
        let n = f.space().n();
        let small = avoid_probability_exact(&f, &limits).unwrap();
        let big = avoid_probability_exact(&f.reembed(MatchingSpace::complete(n + 2).unwrap()).unwrap(), &limits).unwrap();
        prop_assert!(small <= big);
        if let Some(ratio) = embedding_ratio_bound(&f).unwrap() {
            prop_assert!(approx(&big) <= ratio * approx(&small) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn bounds_sandwich_the_exact_value(f in complete_family(&[8, 10, 12], 1, 4)) {
        let exact = avoid_probability_exact(&f, &OracleLimits::default()).unwrap();
        if let Bound::Value(lo) = l5_lower_bound(&f).unwrap().lower {
            prop_assert!(BigRational::from_float(lo).unwrap() <= exact);
        }
        let up = upper_bound(&f, DeltaChoice::Auto).unwrap();
        if let (true, Bound::Value(hi)) = (up.all_hold(), up.upper) {
            prop_assert!(exact <= BigRational::from_float(hi).unwrap());
        }
    }
}

#[test]
fn single_edge_probability_is_one_over_n_minus_one() {
    for n in [4u32, 6, 10] {
        let f = build(MatchingSpace::complete(n).unwrap(), vec![vec![[1, 2]]]);
        assert_eq!(f.probabilities().unwrap()[0], ratio(1, n - 1));
    }
}

//! The asymptotic bracket for regular families and quotient events.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{asymptotic_value, l5_lower_bound, upper_bound, BoundReport, BoundsError, DeltaChoice, RegimeRatio};
use crate::family::{conflict_graph, ConflictGraph, EventFamily};
use crate::matching::in_conflict;

/// Lower bound, upper bound at the automatic delta and `e^{-mu}` for a
/// regular family, with the ratios `mu r^{3/2} / sqrt(N)` and `delta mu`
/// describing how deep the instance sits in the asymptotic regime.
pub fn asymptotic_bracket(family: &EventFamily) -> Result<BoundReport, BoundsError> {
    if family.is_empty() {
        return Ok(BoundReport::trivial());
    }
    let stats = family.stats()?;
    if !stats.regular {
        return Err(BoundsError::NotRegular);
    }
    let lower = l5_lower_bound(family)?;
    let mut report = upper_bound(family, DeltaChoice::Auto)?;
    report.lower = lower.lower;
    report.validity.splice(0..0, lower.validity);
    report.asymptotic = Some(asymptotic_value(&stats.mu));

    let mu = stats.mu.to_f64().unwrap_or(f64::INFINITY);
    let n = family.space().n() as f64;
    let r = stats.r as f64;
    let delta = report.delta.as_ref().and_then(|d| d.to_f64()).unwrap_or(0.0);
    report.regime = vec![
        RegimeRatio { name: "mu r^(3/2) / sqrt(N)".to_string(), value: mu * r.powf(1.5) / n.sqrt() },
        RegimeRatio { name: "delta mu".to_string(), value: delta * mu },
    ];
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Quotient {
    /// Classes `J`, `K` adjacent iff some member of `J` conflicts some member of `K`.
    pub graph: ConflictGraph,
    /// `Pr(B_J) = sum_{j in J} Pr(A_j)`, exact because members of a class are
    /// mutually exclusive.
    pub probabilities: Vec<BigRational>,
}

/// Merges the events of each class of `partition` into their union. Members
/// within a class must pairwise conflict so that their events are disjoint.
pub fn quotient_events(family: &EventFamily, partition: &[Vec<usize>]) -> Result<Quotient, BoundsError> {
    let n = family.len();
    let mut class_of = vec![usize::MAX; n];
    for (c, class) in partition.iter().enumerate() {
        if class.is_empty() {
            return Err(BoundsError::BadPartition(format!("class {c} is empty")));
        }
        for &i in class {
            if i >= n {
                return Err(BoundsError::BadPartition(format!("index {i} out of range for {n} members")));
            }
            if class_of[i] != usize::MAX {
                return Err(BoundsError::BadPartition(format!("member {i} appears twice")));
            }
            class_of[i] = c;
        }
    }
    if let Some(i) = class_of.iter().position(|&c| c == usize::MAX) {
        return Err(BoundsError::BadPartition(format!("member {i} is not covered")));
    }
    let members = family.members();
    for (c, class) in partition.iter().enumerate() {
        for (x, &a) in class.iter().enumerate() {
            for &b in &class[x + 1..] {
                if !in_conflict(&members[a], &members[b]) {
                    return Err(BoundsError::ClassNotExclusive { class: c, first: a, second: b });
                }
            }
        }
    }
    let probs = family.probabilities()?;
    let graph = conflict_graph(family);
    let mut adjacency = vec![Vec::new(); partition.len()];
    for (i, j) in graph.edges() {
        let (a, b) = (class_of[i], class_of[j]);
        if a != b {
            adjacency[a].push(b);
        }
    }
    let probabilities = partition
        .iter()
        .map(|class| class.iter().fold(BigRational::zero(), |acc, &i| acc + &probs[i]))
        .collect();
    Ok(Quotient { graph: ConflictGraph::from_adjacency(adjacency), probabilities })
}

//! Collections of canonical events, their statistics and conflict graphs.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::matching::{in_conflict, Matching, MatchingError, MatchingSpace, SpaceKind, Vertex};
use crate::report;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("member {index}: {source}")]
    Member { index: usize, source: MatchingError },
    #[error("member {index} is the empty matching")]
    EmptyMember { index: usize },
    #[error("members {first} and {second} are the same matching")]
    Duplicate { first: usize, second: usize },
    #[error("the family is empty")]
    EmptyFamily,
    #[error("statistics need a complete or complete bipartite space")]
    UnsupportedSpace,
}

/// A collection of distinct nonempty matchings in one space; member `i`
/// defines the canonical event `A_i`.
#[derive(Debug, Clone)]
pub struct EventFamily {
    space: MatchingSpace,
    members: Vec<Matching>,
    stats: OnceLock<Result<FamilyStats, FamilyError>>,
}

impl EventFamily {
    pub fn new(space: MatchingSpace, members: Vec<Matching>) -> Result<Self, FamilyError> {
        let mut seen: HashMap<&Matching, usize> = HashMap::with_capacity(members.len());
        for (index, m) in members.iter().enumerate() {
            if m.is_empty() {
                return Err(FamilyError::EmptyMember { index });
            }
            m.validate_in(&space).map_err(|source| FamilyError::Member { index, source })?;
            if let Some(&first) = seen.get(m) {
                return Err(FamilyError::Duplicate { first, second: index });
            }
            seen.insert(m, index);
        }
        Ok(EventFamily { space, members, stats: OnceLock::new() })
    }

    /// The same members viewed in another space (e.g. `K_N` inside `K_{N+2}`).
    pub fn reembed(&self, space: MatchingSpace) -> Result<Self, FamilyError> {
        EventFamily::new(space, self.members.clone())
    }

    pub fn space(&self) -> &MatchingSpace {
        &self.space
    }

    pub fn members(&self) -> &[Matching] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `Pr(A_M)` for every member, in member order.
    pub fn probabilities(&self) -> Result<Vec<BigRational>, FamilyError> {
        self.members
            .iter()
            .map(|m| self.space.extension_probability(m.len()).map_err(|_| FamilyError::UnsupportedSpace))
            .collect()
    }

    pub fn stats(&self) -> Result<&FamilyStats, FamilyError> {
        self.stats.get_or_init(|| compute_stats(self)).as_ref().map_err(Clone::clone)
    }
}

/// Per-size data for the members of one size `i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeClass {
    pub size: usize,
    /// `|M_i|`.
    pub count: usize,
    /// Tight `d_i`: the largest number of size-`i` members covering one vertex.
    pub degree: usize,
    /// `p_{N,i}`.
    #[serde(serialize_with = "report::rational_str")]
    pub probability: BigRational,
    /// Every vertex of the space is covered by exactly `degree` members of this size.
    pub uniform: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyStats {
    /// Largest member size.
    pub r: usize,
    /// One entry per occurring size, in increasing size order.
    pub classes: Vec<SizeClass>,
    /// `sum_M Pr(A_M)`.
    #[serde(serialize_with = "report::rational_str")]
    pub mu: BigRational,
    pub regular: bool,
}

impl FamilyStats {
    pub fn sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.classes.iter().map(|c| c.size)
    }

    pub fn class(&self, size: usize) -> Option<&SizeClass> {
        self.classes.iter().find(|c| c.size == size)
    }

    /// `sum_j d_j p_{S,j}` evaluated in `space` (typically a shrunken copy of
    /// the family's space). `None` if some size does not fit there.
    pub fn degree_weighted_sum(&self, space: &MatchingSpace) -> Option<BigRational> {
        self.classes.iter().try_fold(BigRational::zero(), |acc, c| {
            let p = space.extension_probability(c.size).ok()?;
            Some(acc + p * BigInt::from(c.degree))
        })
    }

    /// The same sum with caller-supplied degree upper bounds.
    pub fn with_degrees(&self, degrees: &BTreeMap<usize, usize>) -> FamilyStats {
        let mut out = self.clone();
        for c in &mut out.classes {
            if let Some(&d) = degrees.get(&c.size) {
                assert!(d >= c.degree, "override d_{} = {d} is below the tight value {}", c.size, c.degree);
                c.degree = d;
            }
        }
        out
    }
}

fn compute_stats(family: &EventFamily) -> Result<FamilyStats, FamilyError> {
    if family.is_empty() {
        return Err(FamilyError::EmptyFamily);
    }
    let space = &family.space;
    if space.is_general() {
        return Err(FamilyError::UnsupportedSpace);
    }
    let nv = space.vertex_count();
    let mut incidence: BTreeMap<usize, (usize, Vec<usize>)> = BTreeMap::new();
    for m in &family.members {
        let entry = incidence.entry(m.len()).or_insert_with(|| (0, vec![0; nv]));
        entry.0 += 1;
        for v in m.vertices() {
            entry.1[space.index_of(v).expect("validated member")] += 1;
        }
    }
    let mut classes = Vec::with_capacity(incidence.len());
    let mut mu = BigRational::zero();
    for (size, (count, per_vertex)) in incidence {
        let probability = space.extension_probability(size).map_err(|_| FamilyError::UnsupportedSpace)?;
        mu += &probability * BigInt::from(count);
        let degree = per_vertex.iter().copied().max().unwrap_or(0);
        let uniform = per_vertex.iter().all(|&c| c == degree);
        classes.push(SizeClass { size, count, degree, probability, uniform });
    }
    let regular = classes.iter().all(|c| c.uniform);
    if regular {
        for c in &classes {
            debug_assert_eq!(c.degree * nv, 2 * c.size * c.count);
        }
    }
    let r = classes.last().map(|c| c.size).unwrap_or(0);
    Ok(FamilyStats { r, classes, mu, regular })
}

/// Statistics of a nonempty family in `K_N` or `K_{N,M}`.
pub fn family_stats(family: &EventFamily) -> Result<&FamilyStats, FamilyError> {
    family.stats()
}

/// Simple graph on member indices; `i ~ j` iff the matchings conflict.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConflictGraph {
    adjacency: Vec<Vec<usize>>,
}

impl ConflictGraph {
    /// Builds a graph from adjacency lists, symmetrizing and dropping loops.
    pub fn from_adjacency(adjacency: Vec<Vec<usize>>) -> Self {
        let n = adjacency.len();
        let mut adj = vec![Vec::new(); n];
        for (i, nbrs) in adjacency.iter().enumerate() {
            for &j in nbrs {
                assert!(j < n, "neighbor {j} out of range");
                if i != j {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        for l in &mut adj {
            l.sort_unstable();
            l.dedup();
        }
        ConflictGraph { adjacency: adj }
    }

    pub fn edgeless(n: usize) -> Self {
        ConflictGraph { adjacency: vec![Vec::new(); n] }
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    /// Indices other than `i` that are not adjacent to `i`, ascending.
    pub fn non_neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&j| j != i && !self.adjacent(i, j)).collect()
    }

    /// Edges `(i, j)` with `i < j`, lexicographic.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, l)| l.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// The negative dependency graph of the family's canonical events.
pub fn conflict_graph(family: &EventFamily) -> ConflictGraph {
    let space = family.space();
    let mut at_vertex: Vec<Vec<(usize, Vertex)>> = vec![Vec::new(); space.vertex_count()];
    for (i, m) in family.members().iter().enumerate() {
        for &(a, b) in m.edges() {
            at_vertex[space.index_of(a).expect("validated")].push((i, b));
            at_vertex[space.index_of(b).expect("validated")].push((i, a));
        }
    }
    let mut adjacency = vec![Vec::new(); family.len()];
    for list in &at_vertex {
        for (x, &(i, pi)) in list.iter().enumerate() {
            for &(j, pj) in &list[x + 1..] {
                if pi != pj {
                    adjacency[i].push(j);
                    adjacency[j].push(i);
                }
            }
        }
    }
    for l in &mut adjacency {
        l.sort_unstable();
        l.dedup();
    }
    debug_assert!(family.len() > 300 || {
        let m = family.members();
        (0..m.len()).all(|i| (0..m.len()).all(|j| adjacency[i].binary_search(&j).is_ok() == in_conflict(&m[i], &m[j])))
    });
    ConflictGraph { adjacency }
}

/// Family file reading and writing.
///
/// The first line is a JSON header naming the space, e.g.
/// `{"space":"complete","n":12}`, `{"space":"bipartite","n":5,"m":5}` or
/// `{"space":"general","n":6,"edges":[[1,2],[2,3]]}`. Every following
/// nonblank line is one matching, e.g. `[[1,2],[3,4]]`.
pub mod io {
    use super::*;
    use crate::matching::canonical_form;

    #[derive(Debug, Error)]
    pub enum FamilyFileError {
        #[error("missing header line")]
        MissingHeader,
        #[error("line {line}: {source}")]
        Json { line: usize, source: serde_json::Error },
        #[error("line {line}: {source}")]
        Matching { line: usize, source: MatchingError },
        #[error(transparent)]
        Family(#[from] FamilyError),
    }

    pub fn parse_family(text: &str) -> Result<EventFamily, FamilyFileError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or(FamilyFileError::MissingHeader)?;
        let kind: SpaceKind =
            serde_json::from_str(header).map_err(|source| FamilyFileError::Json { line: hline + 1, source })?;
        let space = MatchingSpace::from_kind(kind).map_err(|source| FamilyFileError::Matching { line: hline + 1, source })?;
        let mut members = Vec::new();
        for (idx, l) in lines {
            let pairs: Vec<[Vertex; 2]> =
                serde_json::from_str(l).map_err(|source| FamilyFileError::Json { line: idx + 1, source })?;
            members.push(canonical_form(&pairs).map_err(|source| FamilyFileError::Matching { line: idx + 1, source })?);
        }
        Ok(EventFamily::new(space, members)?)
    }

    pub fn write_family(family: &EventFamily) -> String {
        let mut out = serde_json::to_string(family.space().kind()).expect("header serializes");
        out.push('\n');
        for m in family.members() {
            out.push_str(&serde_json::to_string(&m.to_pairs()).expect("pairs serialize"));
            out.push('\n');
        }
        out
    }
}

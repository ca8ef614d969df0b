//! Matching spaces, canonical partial matchings and the conflict relation.
//!
//! Vertices are integer labels. In `K_N` and in general graphs they run over
//! `1..=N`. In `K_{N,M}` the first class is `1..=N` and the second class is
//! `-1..=-M`, so a single edge type serves every space.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::falling;

pub type Vertex = i32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("vertex {0} is covered by two different edges")]
    NotAMatching(Vertex),
    #[error("edge ({0}, {0}) is a loop")]
    LoopEdge(Vertex),
    #[error("vertex {0} is not in the space")]
    BadVertex(Vertex),
    #[error("edge ({0}, {1}) is not an edge of the space")]
    EdgeNotInSpace(Vertex, Vertex),
    #[error("matching of size {size} does not fit (maximum {max})")]
    SizeTooLarge { size: usize, max: usize },
    #[error("invalid space: {0}")]
    BadSpace(String),
    #[error("operation needs a complete or complete bipartite space")]
    UnsupportedSpace,
}

/// The underlying graph whose uniformly random perfect matching is the
/// probability space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "lowercase")]
pub enum SpaceKind {
    Complete { n: u32 },
    Bipartite { n: u32, m: u32 },
    General { n: u32, edges: Vec<[Vertex; 2]> },
}

/// A validated [`SpaceKind`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatchingSpace {
    kind: SpaceKind,
}

impl MatchingSpace {
    pub fn complete(n: u32) -> Result<Self, MatchingError> {
        if n == 0 || !n.is_multiple_of(2) {
            return Err(MatchingError::BadSpace(format!("K_{n}: N must be even and positive")));
        }
        Ok(MatchingSpace { kind: SpaceKind::Complete { n } })
    }

    pub fn bipartite(n: u32, m: u32) -> Result<Self, MatchingError> {
        if n == 0 || m == 0 || m > n {
            return Err(MatchingError::BadSpace(format!("K_{{{n},{m}}}: need 1 <= M <= N")));
        }
        Ok(MatchingSpace { kind: SpaceKind::Bipartite { n, m } })
    }

    /// A simple graph on `1..=n`. Whether it has a perfect matching is only
    /// discovered by enumeration.
    pub fn general(n: u32, edges: &[[Vertex; 2]]) -> Result<Self, MatchingError> {
        if n == 0 || !n.is_multiple_of(2) {
            return Err(MatchingError::BadSpace(format!("graph on {n} vertices has no perfect matching")));
        }
        let mut canon = Vec::with_capacity(edges.len());
        for &[a, b] in edges {
            for v in [a, b] {
                if v < 1 || v > n as Vertex {
                    return Err(MatchingError::BadVertex(v));
                }
            }
            if a == b {
                return Err(MatchingError::LoopEdge(a));
            }
            canon.push([a.min(b), a.max(b)]);
        }
        canon.sort_unstable();
        canon.dedup();
        Ok(MatchingSpace { kind: SpaceKind::General { n, edges: canon } })
    }

    pub fn from_kind(kind: SpaceKind) -> Result<Self, MatchingError> {
        match kind {
            SpaceKind::Complete { n } => Self::complete(n),
            SpaceKind::Bipartite { n, m } => Self::bipartite(n, m),
            SpaceKind::General { n, edges } => Self::general(n, &edges),
        }
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    /// The `N` parameter: vertex count of `K_N`, first-class size of `K_{N,M}`.
    pub fn n(&self) -> u32 {
        match self.kind {
            SpaceKind::Complete { n } | SpaceKind::Bipartite { n, .. } | SpaceKind::General { n, .. } => n,
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self.kind {
            SpaceKind::Complete { n } | SpaceKind::General { n, .. } => n as usize,
            SpaceKind::Bipartite { n, m } => (n + m) as usize,
        }
    }

    /// Number of edges in a perfect matching of the space.
    pub fn perfect_size(&self) -> usize {
        match self.kind {
            SpaceKind::Complete { n } | SpaceKind::General { n, .. } => n as usize / 2,
            SpaceKind::Bipartite { m, .. } => m as usize,
        }
    }

    pub fn is_general(&self) -> bool {
        matches!(self.kind, SpaceKind::General { .. })
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        match self.kind {
            SpaceKind::Complete { n } | SpaceKind::General { n, .. } => v >= 1 && v <= n as Vertex,
            SpaceKind::Bipartite { n, m } => (v >= 1 && v <= n as Vertex) || (v <= -1 && v >= -(m as Vertex)),
        }
    }

    /// Dense index in `0..vertex_count()`.
    pub fn index_of(&self, v: Vertex) -> Option<usize> {
        if !self.contains_vertex(v) {
            return None;
        }
        Some(match self.kind {
            SpaceKind::Bipartite { n, .. } if v < 0 => n as usize + (-v) as usize - 1,
            _ => v as usize - 1,
        })
    }

    pub fn vertex_at(&self, idx: usize) -> Vertex {
        match self.kind {
            SpaceKind::Bipartite { n, .. } if idx >= n as usize => -((idx - n as usize + 1) as Vertex),
            _ => idx as Vertex + 1,
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.vertex_count()).map(|i| self.vertex_at(i))
    }

    /// `(a, b)` must already be canonical (`a < b`).
    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        if !self.contains_vertex(a) || !self.contains_vertex(b) || a == b {
            return false;
        }
        match &self.kind {
            SpaceKind::Complete { .. } => true,
            SpaceKind::Bipartite { .. } => (a < 0) != (b < 0),
            SpaceKind::General { edges, .. } => edges.binary_search(&[a.min(b), a.max(b)]).is_ok(),
        }
    }

    /// The space left after fixing `k` edges of a perfect matching:
    /// `K_{N-2k}` or `K_{N-k,M-k}`.
    pub fn shrink(&self, k: usize) -> Option<MatchingSpace> {
        let k = u32::try_from(k).ok()?;
        match self.kind {
            SpaceKind::Complete { n } => {
                let rest = n.checked_sub(2 * k)?;
                (rest > 0).then_some(MatchingSpace { kind: SpaceKind::Complete { n: rest } })
            }
            SpaceKind::Bipartite { n, m } => {
                let (rn, rm) = (n.checked_sub(k)?, m.checked_sub(k)?);
                (rm > 0).then_some(MatchingSpace { kind: SpaceKind::Bipartite { n: rn, m: rm } })
            }
            SpaceKind::General { .. } => None,
        }
    }

    /// `p_{N,i}`: probability that a fixed matching of size `i` lies in a
    /// uniform perfect matching.
    pub fn extension_probability(&self, size: usize) -> Result<BigRational, MatchingError> {
        let max = self.perfect_size();
        if size > max {
            return Err(MatchingError::SizeTooLarge { size, max });
        }
        let den = match self.kind {
            SpaceKind::Complete { n } => (0..size as u64).fold(num_bigint::BigUint::one(), |acc, t| acc * (n as u64 - 2 * t - 1)),
            SpaceKind::Bipartite { n, .. } => falling(n as u64, size as u64),
            SpaceKind::General { .. } => return Err(MatchingError::UnsupportedSpace),
        };
        Ok(BigRational::new(BigInt::one(), BigInt::from(den)))
    }
}

impl fmt::Display for MatchingSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SpaceKind::Complete { n } => write!(f, "K_{n}"),
            SpaceKind::Bipartite { n, m } => write!(f, "K_{{{n},{m}}}"),
            SpaceKind::General { n, edges } => write!(f, "G({n} vertices, {} edges)", edges.len()),
        }
    }
}

/// A partial matching in canonical form: each edge stored as `(min, max)`,
/// edges sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Matching {
    edges: Vec<(Vertex, Vertex)>,
}

impl Matching {
    pub fn new<I>(pairs: I) -> Result<Self, MatchingError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut edges: Vec<(Vertex, Vertex)> = pairs
            .into_iter()
            .map(|(a, b)| if a == b { Err(MatchingError::LoopEdge(a)) } else { Ok((a.min(b), a.max(b))) })
            .collect::<Result<_, _>>()?;
        edges.sort_unstable();
        let mut seen: Vec<Vertex> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(MatchingError::NotAMatching(w[0]));
        }
        Ok(Matching { edges })
    }

    pub fn empty() -> Self {
        Matching::default()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.edges.iter().flat_map(|&(a, b)| [a, b])
    }

    pub fn partner(&self, v: Vertex) -> Option<Vertex> {
        self.edges.iter().find_map(|&(a, b)| {
            if a == v {
                Some(b)
            } else if b == v {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn contains_edge(&self, e: (Vertex, Vertex)) -> bool {
        self.edges.binary_search(&(e.0.min(e.1), e.0.max(e.1))).is_ok()
    }

    pub fn is_subset_of(&self, other: &Matching) -> bool {
        self.edges.iter().all(|e| other.edges.binary_search(e).is_ok())
    }

    pub fn shares_edge_with(&self, other: &Matching) -> bool {
        self.edges.iter().any(|e| other.edges.binary_search(e).is_ok())
    }

    /// Edges of `self` not in `other`.
    pub fn difference(&self, other: &Matching) -> Matching {
        Matching { edges: self.edges.iter().copied().filter(|e| other.edges.binary_search(e).is_err()).collect() }
    }

    /// Checks every vertex and edge against the space.
    pub fn validate_in(&self, space: &MatchingSpace) -> Result<(), MatchingError> {
        for &(a, b) in &self.edges {
            for v in [a, b] {
                if !space.contains_vertex(v) {
                    return Err(MatchingError::BadVertex(v));
                }
            }
            if !space.has_edge(a, b) {
                return Err(MatchingError::EdgeNotInSpace(a, b));
            }
        }
        if self.len() > space.perfect_size() {
            return Err(MatchingError::SizeTooLarge { size: self.len(), max: space.perfect_size() });
        }
        Ok(())
    }

    pub fn to_pairs(&self) -> Vec<[Vertex; 2]> {
        self.edges.iter().map(|&(a, b)| [a, b]).collect()
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (a, b)) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}{b}")?;
        }
        write!(f, "}}")
    }
}

/// Canonical form of an edge list; rejects repeated vertices.
pub fn canonical_form(pairs: &[[Vertex; 2]]) -> Result<Matching, MatchingError> {
    Matching::new(pairs.iter().map(|&[a, b]| (a, b)))
}

/// True iff the union of the two matchings, with duplicate edges merged, is
/// not a matching.
pub fn in_conflict(m1: &Matching, m2: &Matching) -> bool {
    m2.edges.iter().any(|&(a, b)| {
        m1.partner(a).is_some_and(|p| p != b) || m1.partner(b).is_some_and(|p| p != a)
    })
}

/// `Pr(A_M)` in a complete or complete bipartite space.
pub fn event_probability(space: &MatchingSpace, m: &Matching) -> Result<BigRational, MatchingError> {
    space.extension_probability(m.len())
}

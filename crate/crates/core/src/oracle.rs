//! Exhaustive enumeration of perfect matchings at desk scale: exact avoidance
//! probabilities and exhaustive checks of the dependency inequalities.

use std::collections::BTreeMap;
use std::ops::Deref;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{falling, perfect_matching_count, rational_from_f64};
use crate::family::{conflict_graph, EventFamily};
use crate::matching::{Matching, MatchingSpace, SpaceKind};
use crate::parallel::map_slice;
use crate::report;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{space} is beyond the enumeration limit ({limit})")]
    TooLarge { space: String, limit: String },
    #[error("the graph has no perfect matching")]
    NoPerfectMatching,
    #[error("epsilon must be a number in [0, 1], got {0}")]
    BadEpsilon(String),
}

/// Size guards for exhaustive enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    /// Largest `N` for `K_N`.
    pub max_complete: u32,
    /// Largest `N` for `K_{N,M}`.
    pub max_bipartite: u32,
    /// Largest vertex count for a general graph.
    pub max_general: u32,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_complete: 16, max_bipartite: 10, max_general: 16 }
    }
}

impl OracleLimits {
    fn admit(&self, space: &MatchingSpace) -> Result<(), OracleError> {
        let (size, limit) = match space.kind() {
            SpaceKind::Complete { n } => (*n, self.max_complete),
            SpaceKind::Bipartite { n, .. } => (*n, self.max_bipartite),
            SpaceKind::General { n, .. } => (*n, self.max_general),
        };
        if size > limit {
            return Err(OracleError::TooLarge { space: space.to_string(), limit: format!("N <= {limit}") });
        }
        Ok(())
    }
}

pub(crate) const NONE: u8 = u8::MAX;

/// Candidate partners per vertex index, ascending, and the rule choosing the
/// next vertex to match.
struct Layout {
    adj: Vec<Vec<u8>>,
    /// Vertices that must be matched; in `K_{N,M}` only the second class.
    to_match: Vec<u8>,
}

impl Layout {
    fn new(space: &MatchingSpace) -> Layout {
        let nv = space.vertex_count();
        match space.kind() {
            SpaceKind::Complete { .. } => Layout {
                adj: (0..nv).map(|v| (0..nv as u8).filter(|&u| u as usize != v).collect()).collect(),
                to_match: (0..nv as u8).collect(),
            },
            SpaceKind::Bipartite { n, .. } => {
                let n = *n as usize;
                let adj = (0..nv).map(|v| if v < n { (n as u8..nv as u8).collect() } else { (0..n as u8).collect() }).collect();
                Layout { adj, to_match: (n as u8..nv as u8).collect() }
            }
            SpaceKind::General { edges, .. } => {
                let mut adj = vec![Vec::new(); nv];
                for &[a, b] in edges {
                    let (a, b) = ((a - 1) as u8, (b - 1) as u8);
                    adj[a as usize].push(b);
                    adj[b as usize].push(a);
                }
                for l in &mut adj {
                    l.sort_unstable();
                }
                Layout { adj, to_match: (0..nv as u8).collect() }
            }
        }
    }
}

struct Frame {
    v: u8,
    next: usize,
    end: usize,
    current: u8,
}

/// Depth-first enumeration with an explicit stack: the first unmatched vertex
/// of `to_match` is paired with each free candidate in increasing order.
struct Enumerator<L: Deref<Target = Layout>> {
    layout: L,
    partner: Vec<u8>,
    stack: Vec<Frame>,
    started: bool,
    /// Restricts the root frame to candidate positions `root.0..root.1`.
    root: Option<(usize, usize)>,
}

impl<L: Deref<Target = Layout>> Enumerator<L> {
    fn new(layout: L, root: Option<(usize, usize)>) -> Self {
        let partner = vec![NONE; layout.adj.len()];
        Enumerator { layout, partner, stack: Vec::new(), started: false, root }
    }

    fn first_unmatched(&self) -> Option<u8> {
        self.layout.to_match.iter().copied().find(|&v| self.partner[v as usize] == NONE)
    }

    fn push(&mut self, v: u8) {
        let (next, end) = if self.stack.is_empty() {
            self.root.unwrap_or((0, self.layout.adj[v as usize].len()))
        } else {
            (0, self.layout.adj[v as usize].len())
        };
        self.stack.push(Frame { v, next, end, current: NONE });
    }

    /// Advances the top frame to its next free candidate; false if exhausted.
    fn step_top(&mut self) -> bool {
        let frame = self.stack.last_mut().expect("nonempty stack");
        let v = frame.v as usize;
        if frame.current != NONE {
            self.partner[frame.current as usize] = NONE;
            self.partner[v] = NONE;
            frame.current = NONE;
        }
        let cands = &self.layout.adj[v];
        while frame.next < frame.end {
            let u = cands[frame.next];
            frame.next += 1;
            if self.partner[u as usize] == NONE {
                frame.current = u;
                self.partner[v] = u;
                self.partner[u as usize] = v as u8;
                return true;
            }
        }
        false
    }

    /// The next perfect matching as a partner array (`NONE` for unmatched
    /// first-class vertices of `K_{N,M}`).
    fn next_matching(&mut self) -> Option<&[u8]> {
        let mut descend = if self.started {
            false
        } else {
            self.started = true;
            true
        };
        loop {
            if descend {
                match self.first_unmatched() {
                    None => return Some(&self.partner),
                    Some(v) => self.push(v),
                }
            }
            if self.stack.is_empty() {
                return None;
            }
            if self.step_top() {
                descend = true;
            } else {
                self.stack.pop();
                descend = false;
            }
        }
    }
}

fn to_matching(space: &MatchingSpace, partner: &[u8]) -> Matching {
    let pairs = partner
        .iter()
        .enumerate()
        .filter(|&(v, &u)| u != NONE && (v as u8) < u)
        .map(|(v, &u)| (space.vertex_at(v), space.vertex_at(u as usize)));
    Matching::new(pairs).expect("partner array is a matching")
}

/// All perfect matchings of a space in deterministic order.
pub struct PerfectMatchings {
    space: MatchingSpace,
    inner: Enumerator<Box<Layout>>,
}

impl Iterator for PerfectMatchings {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        let p = self.inner.next_matching()?;
        Some(to_matching(&self.space, p))
    }
}

/// Streams the perfect matchings of `space`: match the first unmatched vertex
/// (in `K_{N,M}`, the first unmatched second-class vertex) with each free
/// partner in increasing index order.
pub fn perfect_matchings(space: &MatchingSpace, limits: &OracleLimits) -> Result<PerfectMatchings, OracleError> {
    limits.admit(space)?;
    let inner = Enumerator::new(Box::new(Layout::new(space)), None);
    Ok(PerfectMatchings { space: space.clone(), inner })
}

/// `(N-1)!!` for `K_N`, `N (N-1) ... (N-M+1)` for `K_{N,M}`; `None` for
/// general graphs.
pub fn closed_form_count(space: &MatchingSpace) -> Option<BigUint> {
    match space.kind() {
        SpaceKind::Complete { n } => Some(perfect_matching_count(*n as u64)),
        SpaceKind::Bipartite { n, m } => Some(falling(*n as u64, *m as u64)),
        SpaceKind::General { .. } => None,
    }
}

/// Number of perfect matchings; enumerates for general graphs.
pub fn count_perfect_matchings(space: &MatchingSpace, limits: &OracleLimits) -> Result<BigUint, OracleError> {
    if let Some(c) = closed_form_count(space) {
        return Ok(c);
    }
    limits.admit(space)?;
    Ok(BigUint::from(fold_matchings(space, || 0u64, |acc, _| *acc += 1, |a, b| a + b)))
}

/// Folds over all perfect matchings, split into independent branches by the
/// root vertex's partner and combined in branch order.
pub(crate) fn fold_matchings<T, I, L, M>(space: &MatchingSpace, init: I, leaf: L, merge: M) -> T
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    L: Fn(&mut T, &[u8]) + Sync + Send,
    M: Fn(T, T) -> T,
{
    let layout = Layout::new(space);
    let roots = layout.to_match.first().map_or(0, |&v| layout.adj[v as usize].len());
    if roots == 0 {
        let mut acc = init();
        let mut e = Enumerator::new(&layout, None);
        while let Some(p) = e.next_matching() {
            leaf(&mut acc, p);
        }
        return acc;
    }
    let branches: Vec<usize> = (0..roots).collect();
    let parts = map_slice(&branches, |&b| {
        let mut acc = init();
        let mut e = Enumerator::new(&layout, Some((b, b + 1)));
        while let Some(p) = e.next_matching() {
            leaf(&mut acc, p);
        }
        acc
    });
    let mut it = parts.into_iter();
    let first = it.next().expect("at least one branch");
    it.fold(first, merge)
}

/// Members as index pairs, for fast containment tests against a partner array.
fn member_index_pairs(family: &EventFamily) -> Vec<Vec<(u8, u8)>> {
    let space = family.space();
    family
        .members()
        .iter()
        .map(|m| {
            m.edges()
                .iter()
                .map(|&(a, b)| (space.index_of(a).expect("valid") as u8, space.index_of(b).expect("valid") as u8))
                .collect()
        })
        .collect()
}

fn contains(partner: &[u8], edges: &[(u8, u8)]) -> bool {
    edges.iter().all(|&(a, b)| partner[a as usize] == b)
}

/// `Pr(no member of the family lies in the random perfect matching)`.
pub fn avoid_probability_exact(family: &EventFamily, limits: &OracleLimits) -> Result<BigRational, OracleError> {
    let space = family.space();
    limits.admit(space)?;
    let members = member_index_pairs(family);
    let (total, avoid) = fold_matchings(
        space,
        || (0u64, 0u64),
        |acc, p| {
            acc.0 += 1;
            if !members.iter().any(|m| contains(p, m)) {
                acc.1 += 1;
            }
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    );
    if total == 0 {
        return Err(OracleError::NoPerfectMatching);
    }
    Ok(BigRational::new(BigInt::from(avoid), BigInt::from(total)))
}

/// Number of perfect matchings for each set of occurring member events,
/// keyed by a little-endian bitset over member indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventHistogram {
    pub total: u64,
    pub counts: BTreeMap<Vec<u64>, u64>,
    members: usize,
}

impl EventHistogram {
    pub fn build(family: &EventFamily, limits: &OracleLimits) -> Result<Self, OracleError> {
        let space = family.space();
        limits.admit(space)?;
        let members = member_index_pairs(family);
        let words = family.len().div_ceil(64).max(1);
        let (total, counts) = fold_matchings(
            space,
            || (0u64, BTreeMap::<Vec<u64>, u64>::new()),
            |acc, p| {
                acc.0 += 1;
                let mut key = vec![0u64; words];
                for (i, m) in members.iter().enumerate() {
                    if contains(p, m) {
                        key[i / 64] |= 1 << (i % 64);
                    }
                }
                *acc.1.entry(key).or_insert(0) += 1;
            },
            |mut a, b| {
                a.0 += b.0;
                for (k, c) in b.1 {
                    *a.1.entry(k).or_insert(0) += c;
                }
                a
            },
        );
        if total == 0 {
            return Err(OracleError::NoPerfectMatching);
        }
        Ok(EventHistogram { total, counts, members: family.len() })
    }

    fn has(key: &[u64], i: usize) -> bool {
        key[i / 64] >> (i % 64) & 1 == 1
    }

    /// Matchings in which member `i` occurs.
    pub fn occurrences(&self, i: usize) -> u64 {
        self.counts.iter().filter(|(k, _)| Self::has(k, i)).map(|(_, c)| c).sum()
    }

    /// Matchings in which no member occurs.
    pub fn avoiding(&self) -> u64 {
        self.counts.iter().filter(|(k, _)| k.iter().all(|&w| w == 0)).map(|(_, c)| c).sum()
    }

    /// For member `i` and the index list `others` (at most ~20 long), counts
    /// indexed by subsets `S` of `others` (bit `t` = `others[t]`):
    /// `(matchings avoiding all of S, matchings containing i and avoiding all of S)`.
    fn avoid_tables(&self, i: usize, others: &[usize]) -> (Vec<u64>, Vec<u64>) {
        let k = others.len();
        let size = 1usize << k;
        let mut all = vec![0u64; size];
        let mut with_i = vec![0u64; size];
        for (key, &c) in &self.counts {
            let pattern = others.iter().enumerate().fold(0usize, |acc, (t, &j)| acc | (Self::has(key, j) as usize) << t);
            all[pattern] += c;
            if Self::has(key, i) {
                with_i[pattern] += c;
            }
        }
        // g[T] = sum over patterns inside T
        for t in 0..k {
            for mask in 0..size {
                if mask >> t & 1 == 1 {
                    all[mask] += all[mask ^ (1 << t)];
                    with_i[mask] += with_i[mask ^ (1 << t)];
                }
            }
        }
        let full = size - 1;
        let avoid = (0..size).map(|s| all[full & !s]).collect();
        let avoid_i = (0..size).map(|s| with_i[full & !s]).collect();
        (avoid, avoid_i)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// `Pr(A_i | no A_j, j in S) > Pr(A_i)`.
    NegativeDependency,
    /// `Pr(A_i | no A_j, j in S) < (1 - eps) Pr(A_i)`.
    NearPositive,
    /// Two conflicting members occur together.
    Exclusivity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub member: usize,
    pub subset: Vec<usize>,
    #[serde(serialize_with = "report::rational_str")]
    pub lhs: BigRational,
    #[serde(serialize_with = "report::rational_str")]
    pub rhs: BigRational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DependencyCheckReport {
    /// `(i, S)` pairs whose inequality was evaluated.
    pub checked_pairs: u64,
    /// `(i, S)` pairs skipped because `Pr(no A_j, j in S) = 0`.
    pub skipped_undefined: u64,
    /// Some member had more non-neighbours than the subset cap; only the
    /// first `max_subset` of them were used.
    pub truncated: bool,
    pub violation_count: u64,
    /// The first violations found (at most [`MAX_LISTED_VIOLATIONS`]).
    pub violations: Vec<Violation>,
    pub passed: bool,
}

pub const MAX_LISTED_VIOLATIONS: usize = 64;

impl DependencyCheckReport {
    fn new() -> Self {
        DependencyCheckReport {
            checked_pairs: 0,
            skipped_undefined: 0,
            truncated: false,
            violation_count: 0,
            violations: Vec::new(),
            passed: true,
        }
    }

    fn record(&mut self, v: Violation) {
        self.violation_count += 1;
        self.passed = false;
        if self.violations.len() < MAX_LISTED_VIOLATIONS {
            self.violations.push(v);
        }
    }
}

fn subset_members(others: &[usize], s: usize) -> Vec<usize> {
    others.iter().enumerate().filter(|(t, _)| s >> t & 1 == 1).map(|(_, &j)| j).collect()
}

/// Calls `check(i, S, avoid_S, with_i_avoid_S, occurrences_i)` for every
/// member and every subset of its (possibly truncated) non-neighbours.
fn for_each_condition(
    family: &EventFamily,
    hist: &EventHistogram,
    max_subset: usize,
    report: &mut DependencyCheckReport,
    mut check: impl FnMut(&mut DependencyCheckReport, usize, usize, &[usize], u64, u64, u64),
) {
    let graph = conflict_graph(family);
    for i in 0..family.len() {
        let mut others = graph.non_neighbors(i);
        if others.len() > max_subset {
            others.truncate(max_subset);
            report.truncated = true;
        }
        let occ = hist.occurrences(i);
        let (avoid, avoid_i) = hist.avoid_tables(i, &others);
        for s in 0..avoid.len() {
            if avoid[s] == 0 {
                report.skipped_undefined += 1;
                continue;
            }
            report.checked_pairs += 1;
            check(report, i, s, &others, avoid[s], avoid_i[s], occ);
        }
    }
}

/// Checks `Pr(A_i | no A_j, j in S) <= Pr(A_i)` for every member `i` and every
/// subset `S` of its non-neighbours in the conflict graph, exactly.
pub fn check_negative_dependency(
    family: &EventFamily,
    max_subset: usize,
    limits: &OracleLimits,
) -> Result<DependencyCheckReport, OracleError> {
    let hist = EventHistogram::build(family, limits)?;
    let total = hist.total as u128;
    let mut report = DependencyCheckReport::new();
    for_each_condition(family, &hist, max_subset, &mut report, |rep, i, s, others, avoid, avoid_i, occ| {
        if avoid_i as u128 * total > occ as u128 * avoid as u128 {
            rep.record(Violation {
                kind: ViolationKind::NegativeDependency,
                member: i,
                subset: subset_members(others, s),
                lhs: BigRational::new(avoid_i.into(), avoid.into()),
                rhs: BigRational::new(occ.into(), hist.total.into()),
            });
        }
    });
    Ok(report)
}

/// Checks both parts of the near-positive property: conflicting members never
/// occur together, and `Pr(A_i | no A_j, j in T) >= (1 - eps) Pr(A_i)` for
/// every subset `T` of non-neighbours.
pub fn check_near_positive(
    family: &EventFamily,
    epsilon: f64,
    max_subset: usize,
    limits: &OracleLimits,
) -> Result<DependencyCheckReport, OracleError> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(OracleError::BadEpsilon(epsilon.to_string()));
    }
    let keep = BigRational::from_integer(1.into()) - rational_from_f64(epsilon).expect("finite");
    let hist = EventHistogram::build(family, limits)?;
    let mut report = DependencyCheckReport::new();

    let graph = conflict_graph(family);
    for (i, j) in graph.edges() {
        let joint: u64 = hist
            .counts
            .iter()
            .filter(|(k, _)| EventHistogram::has(k, i) && EventHistogram::has(k, j))
            .map(|(_, c)| c)
            .sum();
        report.checked_pairs += 1;
        if joint > 0 {
            report.record(Violation {
                kind: ViolationKind::Exclusivity,
                member: i,
                subset: vec![j],
                lhs: BigRational::new(joint.into(), hist.total.into()),
                rhs: BigRational::zero(),
            });
        }
    }

    let total = BigInt::from(hist.total);
    for_each_condition(family, &hist, max_subset, &mut report, |rep, i, s, others, avoid, avoid_i, occ| {
        let lhs = BigRational::new(avoid_i.into(), avoid.into());
        let rhs = &keep * BigRational::new(occ.into(), total.clone());
        if lhs < rhs {
            rep.record(Violation { kind: ViolationKind::NearPositive, member: i, subset: subset_members(others, s), lhs, rhs });
        }
    });
    debug_assert_eq!(hist.members, family.len());
    Ok(report)
}

/// `Pr(A_M)` computed by counting, valid in any space including general graphs.
pub fn event_probability_exact(family: &EventFamily, i: usize, limits: &OracleLimits) -> Result<BigRational, OracleError> {
    let hist = EventHistogram::build(family, limits)?;
    Ok(BigRational::new(hist.occurrences(i).into(), hist.total.into()))
}

/// Rational to `f64`, for display.
pub fn approx(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

//! The configuration model: a uniform perfect matching of `N = sum d_i`
//! mini-vertices, grouped into `n` classes, projected to a multigraph with
//! degree sequence `d`.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{binomial, ln_factorial};
use crate::family::{EventFamily, FamilyError};
use crate::matching::{Matching, MatchingSpace, Vertex};
use crate::oracle::{fold_matchings, NONE};
use crate::parallel::map_indexed;
use crate::report;
use crate::rng::trial_rng;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("the degree sequence is empty")]
    Empty,
    #[error("vertex {vertex} has degree 0")]
    ZeroDegree { vertex: usize },
    #[error("degree sum {0} is odd")]
    OddSum(u64),
    #[error("n d = {n} * {d} is odd")]
    OddProduct { n: u32, d: u32 },
    #[error("the matching is not a perfect matching of the mini-vertices")]
    NotPerfect,
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("too large: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DegreeSequence {
    degrees: Vec<u32>,
    total: u64,
}

impl DegreeSequence {
    pub fn new(degrees: Vec<u32>) -> Result<Self, ConfigError> {
        if degrees.is_empty() {
            return Err(ConfigError::Empty);
        }
        if let Some(vertex) = degrees.iter().position(|&d| d == 0) {
            return Err(ConfigError::ZeroDegree { vertex: vertex + 1 });
        }
        let total = degrees.iter().map(|&d| d as u64).sum::<u64>();
        if total % 2 == 1 {
            return Err(ConfigError::OddSum(total));
        }
        Ok(DegreeSequence { degrees, total })
    }

    pub fn regular(n: u32, d: u32) -> Result<Self, ConfigError> {
        if n == 0 || d == 0 {
            return Err(ConfigError::BadParams(format!("need n >= 1 and d >= 1, got n = {n}, d = {d}")));
        }
        if (n as u64 * d as u64) % 2 == 1 {
            return Err(ConfigError::OddProduct { n, d });
        }
        DegreeSequence::new(vec![d; n as usize])
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    /// `N`, the number of mini-vertices.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// `Some(d)` if every degree equals `d`.
    pub fn regular_degree(&self) -> Option<u32> {
        let d = self.degrees[0];
        self.degrees.iter().all(|&x| x == d).then_some(d)
    }
}

/// Mini-vertices `1..=N` split into contiguous classes; class `i` holds `d_i`
/// mini-vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiniVertexPartition {
    /// Zero-based class of each zero-based mini-vertex.
    class_of: Vec<u32>,
    starts: Vec<usize>,
}

impl MiniVertexPartition {
    pub fn new(dseq: &DegreeSequence) -> Self {
        let mut class_of = Vec::with_capacity(dseq.total() as usize);
        let mut starts = Vec::with_capacity(dseq.n() + 1);
        for (i, &d) in dseq.degrees().iter().enumerate() {
            starts.push(class_of.len());
            class_of.extend(std::iter::repeat_n(i as u32, d as usize));
        }
        starts.push(class_of.len());
        MiniVertexPartition { class_of, starts }
    }

    pub fn total(&self) -> usize {
        self.class_of.len()
    }

    pub fn classes(&self) -> usize {
        self.starts.len() - 1
    }

    /// Class (1-based vertex) of a 1-based mini-vertex.
    pub fn class_of(&self, mini: u32) -> u32 {
        self.class_of[mini as usize - 1] + 1
    }

    /// 1-based mini-vertices of 1-based vertex `v`.
    pub fn minis(&self, v: u32) -> std::ops::RangeInclusive<u32> {
        let i = v as usize - 1;
        (self.starts[i] as u32 + 1)..=(self.starts[i + 1] as u32)
    }
}

/// Multigraph on `1..=n` stored as a sorted edge multiset of pairs `(a, b)`
/// with `a <= b`; loops are `(a, a)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiGraph {
    n: u32,
    edges: Vec<(u32, u32)>,
}

impl MultiGraph {
    pub fn new(n: u32, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut edges: Vec<(u32, u32)> = edges
            .into_iter()
            .map(|(a, b)| {
                assert!(a >= 1 && b >= 1 && a <= n && b <= n, "vertex out of range");
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        MultiGraph { n, edges }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Degrees with loops counted twice.
    pub fn degrees(&self) -> Vec<u32> {
        let mut deg = vec![0; self.n as usize];
        for &(a, b) in &self.edges {
            deg[a as usize - 1] += 1;
            deg[b as usize - 1] += 1;
        }
        deg
    }

    pub fn has_loop(&self) -> bool {
        self.edges.iter().any(|&(a, b)| a == b)
    }

    pub fn has_multi_edge(&self) -> bool {
        self.edges.windows(2).any(|w| w[0] == w[1] && w[0].0 != w[0].1)
    }

    pub fn is_simple(&self) -> bool {
        !self.has_loop() && !self.has_multi_edge()
    }

    fn simple_adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.n as usize];
        let mut prev = None;
        for &(a, b) in &self.edges {
            if a != b && prev != Some((a, b)) {
                adj[a as usize - 1].push(b - 1);
                adj[b as usize - 1].push(a - 1);
            }
            prev = Some((a, b));
        }
        adj
    }

    /// Length of the shortest cycle: 1 with a loop, 2 with a repeated edge,
    /// otherwise the shortest simple cycle. `None` for forests.
    pub fn girth(&self) -> Option<u32> {
        self.shortest_cycle_below(u32::MAX)
    }

    /// The girth if it is below `limit`, else `None`.
    pub fn shortest_cycle_below(&self, limit: u32) -> Option<u32> {
        if limit > 1 && self.has_loop() {
            return Some(1);
        }
        if limit > 2 && self.has_multi_edge() {
            return Some(2);
        }
        if limit <= 3 {
            return None;
        }
        shortest_simple_cycle(&self.simple_adjacency(), limit)
    }

    pub fn girth_at_least(&self, g: u32) -> bool {
        self.shortest_cycle_below(g).is_none()
    }
}

/// Breadth-first search from every root; a non-tree edge between `u` and `w`
/// closes a walk of length `dist u + dist w + 1`, and the minimum over roots
/// is the girth. Only cycles shorter than `limit` are looked for.
fn shortest_simple_cycle(adj: &[Vec<u32>], limit: u32) -> Option<u32> {
    let n = adj.len();
    let mut best = limit;
    let mut dist = vec![u32::MAX; n];
    let mut parent = vec![u32::MAX; n];
    let mut queue = Vec::with_capacity(n);
    for root in 0..n {
        queue.clear();
        queue.push(root as u32);
        dist[root] = 0;
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head] as usize;
            head += 1;
            if 2 * dist[u] + 1 >= best {
                break;
            }
            for &w in &adj[u] {
                let wi = w as usize;
                if dist[wi] == u32::MAX {
                    dist[wi] = dist[u] + 1;
                    parent[wi] = u as u32;
                    queue.push(w);
                } else if parent[u] != w {
                    best = best.min(dist[u] + dist[wi] + 1);
                }
            }
        }
        for &v in &queue {
            dist[v as usize] = u32::MAX;
            parent[v as usize] = u32::MAX;
        }
    }
    (best < limit).then_some(best)
}

/// The multigraph of a perfect matching of mini-vertices `1..=N`.
pub fn project(matching: &Matching, partition: &MiniVertexPartition) -> Result<MultiGraph, ConfigError> {
    let total = partition.total();
    if matching.len() * 2 != total {
        return Err(ConfigError::NotPerfect);
    }
    let mut covered = vec![false; total];
    for v in matching.vertices() {
        if v < 1 || v as usize > total {
            return Err(ConfigError::NotPerfect);
        }
        covered[v as usize - 1] = true;
    }
    if covered.iter().any(|c| !c) {
        return Err(ConfigError::NotPerfect);
    }
    let edges = matching.edges().iter().map(|&(a, b)| (partition.class_of(a as u32), partition.class_of(b as u32)));
    Ok(MultiGraph::new(partition.classes() as u32, edges))
}

/// Projection of a zero-based partner array.
fn project_partner(partner: &[u8], partition: &MiniVertexPartition) -> MultiGraph {
    let edges = partner
        .iter()
        .enumerate()
        .filter(|&(v, &u)| u != NONE && v < u as usize)
        .map(|(v, &u)| (partition.class_of[v] + 1, partition.class_of[u as usize] + 1));
    MultiGraph::new(partition.classes() as u32, edges)
}

/// A uniform perfect matching of `0..n` as a partner array: the lowest
/// unmatched point is paired with a uniformly chosen other unmatched point.
pub fn sample_matching<R: Rng>(n: usize, rng: &mut R) -> Vec<u32> {
    assert!(n.is_multiple_of(2), "odd number of points");
    let mut free: Vec<u32> = (0..n as u32).collect();
    let mut pos: Vec<usize> = (0..n).collect();
    let mut partner = vec![u32::MAX; n];
    let remove = |free: &mut Vec<u32>, pos: &mut Vec<usize>, x: u32| {
        let i = pos[x as usize];
        let last = *free.last().expect("nonempty");
        free.swap_remove(i);
        if last != x {
            pos[last as usize] = i;
        }
    };
    for v in 0..n as u32 {
        if partner[v as usize] != u32::MAX {
            continue;
        }
        remove(&mut free, &mut pos, v);
        let j = rng.random_range(0..free.len() as u32) as usize;
        let u = free[j];
        remove(&mut free, &mut pos, u);
        partner[v as usize] = u;
        partner[u as usize] = v;
    }
    partner
}

fn project_sample(partner: &[u32], partition: &MiniVertexPartition) -> MultiGraph {
    let edges = partner
        .iter()
        .enumerate()
        .filter(|&(v, &u)| v < u as usize)
        .map(|(v, &u)| (partition.class_of[v] + 1, partition.class_of[u as usize] + 1));
    MultiGraph::new(partition.classes() as u32, edges)
}

/// One configuration-model multigraph for trial `trial` of seed `seed`.
pub fn sample_multigraph_trial(dseq: &DegreeSequence, seed: u64, trial: u64) -> MultiGraph {
    let partition = MiniVertexPartition::new(dseq);
    let mut rng = trial_rng(seed, trial);
    project_sample(&sample_matching(partition.total(), &mut rng), &partition)
}

pub fn sample_multigraph(dseq: &DegreeSequence, seed: u64) -> MultiGraph {
    sample_multigraph_trial(dseq, seed, 0)
}

/// `exp(-sum_{i=1}^{g-1} (d-1)^i / (2i))`, the limiting probability that a
/// configuration-model `d`-regular multigraph has girth at least `g`.
pub fn girth_prediction(d: u32, g: u32) -> Result<f64, ConfigError> {
    if d < 3 || g < 3 {
        return Err(ConfigError::BadParams(format!("need d >= 3 and g >= 3, got d = {d}, g = {g}")));
    }
    Ok((-cycle_mean(d, g)).exp())
}

/// `sum_{i=1}^{g-1} (d-1)^i / (2i)` evaluated exactly, then rounded.
fn cycle_mean(d: u32, g: u32) -> f64 {
    let sum = (1..g).fold(BigRational::zero(), |acc, i| {
        acc + BigRational::new(BigInt::from(d - 1).pow(i), BigInt::from(2 * i))
    });
    sum.to_f64().unwrap_or(f64::INFINITY)
}

/// `g^3 d^{2g-3} / n`; the prediction needs this to be small.
pub fn regime_ratio(n: u32, d: u32, g: u32) -> f64 {
    (g as f64).powi(3) * (d as f64).powi(2 * g as i32 - 3) / n as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    #[serde(serialize_with = "report::f64_str")]
    pub estimate: f64,
    #[serde(serialize_with = "report::f64_str")]
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
    pub hits: u64,
}

const CHUNK: u64 = 512;

/// Monte Carlo estimate of `Pr(girth >= g)`. Trial `t` always uses random
/// stream `t`, so the estimate depends only on the seed and trial count.
pub fn mc_girth_at_least(dseq: &DegreeSequence, g: u32, trials: u64, seed: u64) -> Result<McEstimate, ConfigError> {
    if trials == 0 {
        return Err(ConfigError::BadParams("trials must be at least 1".into()));
    }
    let partition = MiniVertexPartition::new(dseq);
    let chunks = trials.div_ceil(CHUNK);
    let hits: u64 = map_indexed(chunks, |c| {
        let (start, end) = (c * CHUNK, ((c + 1) * CHUNK).min(trials));
        (start..end)
            .filter(|&t| {
                let mut rng = trial_rng(seed, t);
                project_sample(&sample_matching(partition.total(), &mut rng), &partition).girth_at_least(g)
            })
            .count() as u64
    })
    .into_iter()
    .sum();
    let p = hits as f64 / trials as f64;
    Ok(McEstimate { estimate: p, stderr: (p * (1.0 - p) / trials as f64).sqrt(), trials, seed, hits })
}

/// Girth of the multigraph sampled in each trial, in trial order.
pub fn mc_girth_trials(dseq: &DegreeSequence, trials: u64, seed: u64) -> Vec<Option<u32>> {
    let partition = MiniVertexPartition::new(dseq);
    map_indexed(trials, |t| {
        let mut rng = trial_rng(seed, t);
        project_sample(&sample_matching(partition.total(), &mut rng), &partition).girth()
    })
}

pub const MAX_EXACT_MINIS: u64 = 16;

/// Exact `Pr(girth >= g)` by enumerating all `(N-1)!!` matchings.
pub fn exact_girth_probability(dseq: &DegreeSequence, g: u32) -> Result<BigRational, ConfigError> {
    if dseq.total() > MAX_EXACT_MINIS {
        return Err(ConfigError::TooLarge(format!("N = {} > {MAX_EXACT_MINIS}", dseq.total())));
    }
    let partition = MiniVertexPartition::new(dseq);
    let space = MatchingSpace::complete(dseq.total() as u32).expect("even and positive");
    let (total, hits) = fold_matchings(
        &space,
        || (0u64, 0u64),
        |acc, p| {
            acc.0 += 1;
            if project_partner(p, &partition).girth_at_least(g) {
                acc.1 += 1;
            }
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    );
    Ok(BigRational::new(hits.into(), total.into()))
}

pub const MAX_CYCLE_FAMILY: u64 = 2_000_000;

/// Distinct-vertex cycles `v_1 .. v_i` with `v_1` smallest and `v_2 < v_i`,
/// zero-based.
fn vertex_cycles(n: usize, i: usize, mut visit: impl FnMut(&[usize])) {
    fn extend(n: usize, i: usize, path: &mut Vec<usize>, used: &mut [bool], visit: &mut dyn FnMut(&[usize])) {
        if path.len() == i {
            if path[1] < path[i - 1] {
                visit(path);
            }
            return;
        }
        for v in path[0] + 1..n {
            if !used[v] {
                used[v] = true;
                path.push(v);
                extend(n, i, path, used, visit);
                path.pop();
                used[v] = false;
            }
        }
    }
    let mut used = vec![false; n];
    for s in 0..n {
        used[s] = true;
        let mut path = vec![s];
        extend(n, i, &mut path, &mut used, &mut visit);
        used[s] = false;
    }
}

fn cycle_family_size(dseq: &DegreeSequence, g: u32) -> BigUint {
    let d = dseq.degrees();
    let mut total = BigUint::zero();
    for i in 1..g as usize {
        match i {
            1 => total += d.iter().map(|&x| binomial(x as u64, 2)).sum::<BigUint>(),
            2 => {
                for a in 0..d.len() {
                    for b in a + 1..d.len() {
                        total += binomial(d[a] as u64, 2) * (d[b] as u64 * (d[b] as u64 - 1));
                    }
                }
            }
            _ => {
                if let Some(deg) = dseq.regular_degree() {
                    // (n)_i / (2i) cycles, each with (d(d-1))^i mini choices
                    let n = d.len() as u64;
                    let cycles = crate::exact::falling(n, i as u64) / (2 * i as u64);
                    total += cycles * BigUint::from(deg as u64 * (deg as u64 - 1)).pow(i as u32);
                } else {
                    let mut count = BigUint::zero();
                    vertex_cycles(d.len(), i, |c| {
                        count += c.iter().fold(BigUint::one(), |acc, &v| acc * (d[v] as u64 * (d[v] as u64).saturating_sub(1)));
                    });
                    total += count;
                }
            }
        }
    }
    total
}

/// All matchings of mini-vertices whose projection is a cycle of length
/// `1..g`, as an event family in `K_N`. A length-`i` cycle through vertices
/// `v_1 .. v_i` uses two distinct mini-vertices at each `v_t`.
pub fn cycle_event_family(dseq: &DegreeSequence, g: u32) -> Result<EventFamily, ConfigError> {
    if g < 2 {
        return Err(ConfigError::BadParams(format!("need g >= 2, got {g}")));
    }
    let size = cycle_family_size(dseq, g);
    if size > BigUint::from(MAX_CYCLE_FAMILY) {
        return Err(ConfigError::TooLarge(format!("{size} cycle matchings > {MAX_CYCLE_FAMILY}")));
    }
    let partition = MiniVertexPartition::new(dseq);
    let minis = |v: usize| -> Vec<Vertex> { partition.minis(v as u32 + 1).map(|x| x as Vertex).collect() };
    let n = dseq.n();
    let mut members = Vec::new();
    for i in 1..g as usize {
        match i {
            1 => {
                for v in 0..n {
                    let m = minis(v);
                    for a in 0..m.len() {
                        for b in a + 1..m.len() {
                            members.push(Matching::new([(m[a], m[b])]).expect("one edge"));
                        }
                    }
                }
            }
            2 => {
                for u in 0..n {
                    let mu = minis(u);
                    for v in u + 1..n {
                        let mv = minis(v);
                        for a1 in 0..mu.len() {
                            for a2 in a1 + 1..mu.len() {
                                for (b1, &x) in mv.iter().enumerate() {
                                    for (b2, &y) in mv.iter().enumerate() {
                                        if b1 != b2 {
                                            members.push(Matching::new([(mu[a1], x), (mu[a2], y)]).expect("disjoint"));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
            _ => vertex_cycles(n, i, |cycle| {
                let choices: Vec<Vec<Vertex>> = cycle.iter().map(|&v| minis(v)).collect();
                // (in, out) mini-vertex pair at each cycle vertex
                let mut pick = vec![(0usize, 0usize); i];
                fn rec(t: usize, choices: &[Vec<Vertex>], pick: &mut [(usize, usize)], out: &mut Vec<Matching>) {
                    let i = choices.len();
                    if t == i {
                        let edges = (0..i).map(|s| (choices[s][pick[s].1], choices[(s + 1) % i][pick[(s + 1) % i].0]));
                        out.push(Matching::new(edges).expect("distinct minis"));
                        return;
                    }
                    for a in 0..choices[t].len() {
                        for b in 0..choices[t].len() {
                            if a != b {
                                pick[t] = (a, b);
                                rec(t + 1, choices, pick, out);
                            }
                        }
                    }
                }
                rec(0, &choices, &mut pick, &mut members);
            }),
        }
    }
    let space = MatchingSpace::complete(dseq.total() as u32).expect("even and positive");
    Ok(EventFamily::new(space, members)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularCountEstimates {
    /// `e^{(1-d^2)/4} (dn)! / ((dn/2)! 2^{dn/2} (d!)^n)`.
    #[serde(serialize_with = "report::f64_str")]
    pub bollobas_os: f64,
    #[serde(serialize_with = "report::f64_str")]
    pub log_bollobas_os: f64,
    /// The same with `e^{-sum_{i<g} (d-1)^i/(2i)}`: graphs of girth at least `g`.
    #[serde(serialize_with = "report::f64_str")]
    pub wormald_faktor: f64,
    #[serde(serialize_with = "report::f64_str")]
    pub log_wormald_faktor: f64,
}

/// Asymptotic counts of labelled `d`-regular graphs on `n` vertices (simple,
/// and of girth at least `g`), evaluated in log space.
pub fn regular_count_estimates(n: u32, d: u32, g: u32) -> Result<RegularCountEstimates, ConfigError> {
    if n == 0 || d == 0 || g < 3 {
        return Err(ConfigError::BadParams(format!("need n, d >= 1 and g >= 3, got n = {n}, d = {d}, g = {g}")));
    }
    if (n as u64 * d as u64) % 2 == 1 {
        return Err(ConfigError::OddProduct { n, d });
    }
    let total = n as u64 * d as u64;
    let log_pairings = ln_factorial(total) - ln_factorial(total / 2) - (total / 2) as f64 * std::f64::consts::LN_2
        - n as f64 * ln_factorial(d as u64);
    let simple = BigRational::new(BigInt::from(d as u64 * d as u64 - 1), BigInt::from(4));
    let log_simple = log_pairings - simple.to_f64().expect("small");
    let log_cycles = log_pairings - cycle_mean(d, g);
    Ok(RegularCountEstimates { bollobas_os: log_simple.exp(), log_bollobas_os: log_simple, wormald_faktor: log_cycles.exp(), log_wormald_faktor: log_cycles })
}

pub const MAX_EXACT_GRAPH_VERTICES: usize = 24;

/// Number of labelled simple graphs with the given degree sequence.
///
/// The first vertex picks its neighbours among the rest; afterwards only the
/// multiset of residual degrees matters, which is memoised.
pub fn exact_degree_sequence_count(degrees: &[u32]) -> Result<BigUint, ConfigError> {
    if degrees.len() > MAX_EXACT_GRAPH_VERTICES {
        return Err(ConfigError::TooLarge(format!("{} vertices > {MAX_EXACT_GRAPH_VERTICES}", degrees.len())));
    }
    if degrees.iter().map(|&d| d as u64).sum::<u64>() % 2 == 1 {
        return Ok(BigUint::zero());
    }
    let mut memo = HashMap::new();
    let mut key: Vec<u32> = degrees.to_vec();
    key.sort_unstable_by(|a, b| b.cmp(a));
    Ok(count_graphs(key, &mut memo))
}

fn count_graphs(mut degs: Vec<u32>, memo: &mut HashMap<Vec<u32>, BigUint>) -> BigUint {
    // degs sorted descending
    while degs.last() == Some(&0) {
        degs.pop();
    }
    if degs.is_empty() {
        return BigUint::one();
    }
    if let Some(v) = memo.get(&degs) {
        return v.clone();
    }
    let k = degs[0] as usize;
    let rest = &degs[1..];
    let mut result = BigUint::zero();
    if k <= rest.len() {
        // groups of equal residual degree
        let mut groups: Vec<(u32, usize)> = Vec::new();
        for &d in rest {
            match groups.last_mut() {
                Some((v, m)) if *v == d => *m += 1,
                _ => groups.push((d, 1)),
            }
        }
        let mut take = vec![0usize; groups.len()];
        distribute(k, 0, &groups, &mut take, &mut |take| {
            let mut weight = BigUint::one();
            let mut next = Vec::with_capacity(rest.len());
            for (g, &(value, mult)) in groups.iter().enumerate() {
                weight *= binomial(mult as u64, take[g] as u64);
                next.extend(std::iter::repeat_n(value - 1, take[g]));
                next.extend(std::iter::repeat_n(value, mult - take[g]));
            }
            next.sort_unstable_by(|a, b| b.cmp(a));
            result += weight * count_graphs(next, memo);
        });
    }
    memo.insert(degs, result.clone());
    result
}

fn distribute(left: usize, g: usize, groups: &[(u32, usize)], take: &mut [usize], f: &mut dyn FnMut(&[usize])) {
    if g == groups.len() {
        if left == 0 {
            f(take);
        }
        return;
    }
    let remaining_cap: usize = groups[g..].iter().map(|&(_, m)| m).sum();
    if left > remaining_cap {
        return;
    }
    for c in 0..=left.min(groups[g].1) {
        take[g] = c;
        distribute(left - c, g + 1, groups, take, f);
    }
    take[g] = 0;
}

/// Number of labelled simple `d`-regular graphs on `n` vertices (0 when `n d`
/// is odd or `d >= n`).
pub fn exact_regular_count(n: u32, d: u32) -> Result<BigUint, ConfigError> {
    exact_degree_sequence_count(&vec![d; n as usize])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use crate::family::family_stats;
    use crate::matching::canonical_form;

    #[test]
    fn projection_examples() {
        let d11 = DegreeSequence::new(vec![1, 1]).unwrap();
        let g = project(&canonical_form(&[[1, 2]]).unwrap(), &MiniVertexPartition::new(&d11)).unwrap();
        assert_eq!(g.edges(), &[(1, 2)]);
        let d2 = DegreeSequence::new(vec![2]).unwrap();
        let g = project(&canonical_form(&[[1, 2]]).unwrap(), &MiniVertexPartition::new(&d2)).unwrap();
        assert_eq!((g.edges(), g.girth()), (&[(1, 1)][..], Some(1)));
        let d22 = DegreeSequence::new(vec![2, 2]).unwrap();
        let g = project(&canonical_form(&[[1, 3], [2, 4]]).unwrap(), &MiniVertexPartition::new(&d22)).unwrap();
        assert_eq!((g.edges(), g.girth()), (&[(1, 2), (1, 2)][..], Some(2)));
        assert_eq!(project(&canonical_form(&[[1, 3]]).unwrap(), &MiniVertexPartition::new(&d22)), Err(ConfigError::NotPerfect));
    }

    #[test]
    fn girth_examples() {
        let k4 = MultiGraph::new(4, [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
        assert_eq!(k4.girth(), Some(3));
        let c5 = MultiGraph::new(5, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)]);
        assert_eq!(c5.girth(), Some(5));
        assert!(c5.girth_at_least(5) && !c5.girth_at_least(6));
        let c6 = MultiGraph::new(6, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 1)]);
        assert_eq!(c6.girth(), Some(6));
        let path = MultiGraph::new(3, [(1, 2), (2, 3)]);
        assert_eq!(path.girth(), None);
        // Petersen graph has girth 5
        let outer = (0..5).map(|i| (i + 1, (i + 1) % 5 + 1));
        let spokes = (0..5).map(|i| (i + 1, i + 6));
        let inner = (0..5).map(|i| (i + 6, (i + 2) % 5 + 6));
        let petersen = MultiGraph::new(10, outer.chain(spokes).chain(inner));
        assert_eq!(petersen.girth(), Some(5));
    }

    #[test]
    fn sampler_preserves_degrees() {
        let d = DegreeSequence::regular(4, 3).unwrap();
        for seed in 0..20 {
            assert_eq!(sample_multigraph(&d, seed).degrees(), vec![3; 4]);
        }
        assert_eq!(sample_multigraph(&DegreeSequence::new(vec![1, 1]).unwrap(), 9).edges(), &[(1, 2)]);
        assert_eq!(sample_multigraph(&d, 5), sample_multigraph(&d, 5));
    }

    #[test]
    fn predictions() {
        assert!((girth_prediction(3, 3).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        assert!((girth_prediction(3, 4).unwrap() - (-10.0f64 / 3.0).exp()).abs() < 1e-15);
        assert!(girth_prediction(2, 3).is_err());
        let e = regular_count_estimates(4, 3, 3).unwrap();
        assert!((e.bollobas_os - (-2.0f64).exp() * 10395.0 / 1296.0).abs() < 1e-9);
        assert_eq!(e.log_bollobas_os, e.log_wormald_faktor);
    }

    #[test]
    fn exact_counts() {
        assert_eq!(exact_regular_count(4, 3).unwrap(), BigUint::from(1u32));
        assert_eq!(exact_regular_count(5, 3).unwrap(), BigUint::zero());
        assert_eq!(exact_regular_count(6, 3).unwrap(), BigUint::from(70u32));
        assert_eq!(exact_regular_count(8, 3).unwrap(), BigUint::from(19355u32));
        // cycles: (n-1)!/2 Hamiltonian plus unions of smaller cycles; n = 5 gives 12
        assert_eq!(exact_regular_count(5, 2).unwrap(), BigUint::from(12u32));
        assert_eq!(exact_degree_sequence_count(&[1, 2, 1]).unwrap(), BigUint::one());
    }

    #[test]
    fn exact_girth_examples() {
        let d = DegreeSequence::regular(4, 3).unwrap();
        assert_eq!(exact_girth_probability(&d, 3).unwrap(), ratio(1296, 10395));
        assert_eq!(exact_girth_probability(&d, 1).unwrap(), ratio(1, 1));
        assert_eq!(exact_girth_probability(&DegreeSequence::new(vec![2, 2]).unwrap(), 3).unwrap(), ratio(0, 1));
    }

    #[test]
    fn cycle_family_sizes() {
        let d = DegreeSequence::regular(4, 3).unwrap();
        let f = cycle_event_family(&d, 2).unwrap();
        assert_eq!(f.len(), 12);
        let f = cycle_event_family(&d, 3).unwrap();
        assert_eq!(f.len(), 120);
        let s = family_stats(&f).unwrap();
        assert_eq!(s.mu, ratio(24, 11));
        assert_eq!(s.class(1).unwrap().degree, 2);
        assert_eq!(s.class(2).unwrap().degree, 3 * 3 * 4);
        assert!(s.regular);
        assert_eq!(BigUint::from(f.len()), cycle_family_size(&d, 3));
    }
}

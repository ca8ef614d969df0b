//! Traversal probabilities and the existence certificate for graphs with a
//! prescribed degree sequence, girth above `ell` and chromatic number at
//! least `k`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::bounds::Check;
use crate::config_model::{sample_multigraph_trial, ConfigError, DegreeSequence, MultiGraph};
use crate::exact::{binomial, ratio, ratio_u};
use crate::interval::Interval;
use crate::oracle::approx;
use crate::parallel::map_indexed;
use crate::report;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GirthChromError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("empty degree sequence")]
    Empty,
    #[error("too large: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Probability that a uniform perfect matching of `K_N` has no edge inside a
/// fixed `s`-set: `2^s C(N/2, s) / C(N, s)`, zero for `s > N/2`.
pub fn traversal_probability(n: u64, s: u64) -> Result<BigRational, GirthChromError> {
    if n % 2 == 1 || s > n {
        return Err(GirthChromError::BadParams(format!("need even N and 0 <= s <= N, got N = {n}, s = {s}")));
    }
    if s > n / 2 {
        return Ok(BigRational::zero());
    }
    let num = binomial(n / 2, s) << s as usize;
    Ok(ratio_u(&num, &binomial(n, s)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraversalAsymptotic {
    pub n: u64,
    #[serde(serialize_with = "report::f64_str")]
    pub x: f64,
    /// `exp(-N x^2 / 2)`.
    #[serde(serialize_with = "report::f64_str")]
    pub leading: f64,
    /// `sqrt((1-x)/(1-2x)) exp(N (H(2x)/2 - H(x) + x ln 2))`, the Stirling form
    /// before the cubic terms are dropped.
    #[serde(serialize_with = "report::f64_str")]
    pub entropy_form: f64,
    /// The exact probability, when `xN` is an integer.
    #[serde(serialize_with = "report::opt_f64_str")]
    pub exact: Option<f64>,
    /// `ln^2 N / N^{1/3} <= x <= 1/4`.
    pub in_regime: bool,
}

fn entropy(x: f64) -> f64 {
    let h = |t: f64| if t <= 0.0 { 0.0 } else { -t * t.ln() };
    h(x) + h(1.0 - x)
}

/// Leading term of the traversal probability of a set of size `xN`, with the
/// exact value alongside when `xN` is an integer.
pub fn traversal_asymptotic(n: u64, x: f64) -> Result<TraversalAsymptotic, GirthChromError> {
    if !(x > 0.0 && x < 0.5) {
        return Err(GirthChromError::BadParams(format!("x must lie in (0, 1/2), got {x}")));
    }
    if n == 0 || n % 2 == 1 {
        return Err(GirthChromError::BadParams(format!("N must be even and positive, got {n}")));
    }
    let nf = n as f64;
    let leading = (-nf * x * x / 2.0).exp();
    let exponent = nf * (entropy(2.0 * x) / 2.0 - entropy(x) + x * std::f64::consts::LN_2);
    let entropy_form = ((1.0 - x) / (1.0 - 2.0 * x)).sqrt() * exponent.exp();
    let s = (x * nf).round();
    let exact = if (s - x * nf).abs() < 1e-9 { Some(approx(&traversal_probability(n, s as u64)?)) } else { None };
    let lo = nf.ln().powi(2) / nf.cbrt();
    Ok(TraversalAsymptotic { n, x, leading, entropy_form, exact, in_regime: lo <= x && x <= 0.25 })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeStats {
    pub n: usize,
    /// `N = Vol(V)`.
    pub volume: u64,
    pub max_degree: u32,
    /// Average degree.
    #[serde(serialize_with = "report::rational_str")]
    pub dbar: BigRational,
    /// `sum d_i^2 / sum d_i`.
    #[serde(serialize_with = "report::rational_str")]
    pub dtilde: BigRational,
    #[serde(skip)]
    degrees: Vec<u32>,
}

impl DegreeStats {
    /// `Vol(S)` for 1-based vertices `S`.
    pub fn vol(&self, subset: &[u32]) -> u64 {
        subset.iter().map(|&v| self.degrees[v as usize - 1] as u64).sum()
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }
}

pub fn degree_stats(degrees: &[u32]) -> Result<DegreeStats, GirthChromError> {
    if degrees.is_empty() {
        return Err(GirthChromError::Empty);
    }
    if let Some(v) = degrees.iter().position(|&d| d == 0) {
        return Err(ConfigError::ZeroDegree { vertex: v + 1 }.into());
    }
    let volume: u64 = degrees.iter().map(|&d| d as u64).sum();
    let squares: u64 = degrees.iter().map(|&d| d as u64 * d as u64).sum();
    Ok(DegreeStats {
        n: degrees.len(),
        volume,
        max_degree: *degrees.iter().max().expect("nonempty"),
        dbar: ratio(volume, degrees.len() as u64),
        dtilde: ratio(squares, volume),
        degrees: degrees.to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColorPolicy {
    /// Bound the probability of `k`-colourability by `2^n exp(-N / (2k^2))`,
    /// dropping the unquantified `O(N/k^3)` term.
    LeadingTerm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateOptions {
    pub policy: ColorPolicy,
    /// Log bounds closer than this fraction of the smaller magnitude give
    /// `Indeterminate`.
    pub margin: f64,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        CertificateOptions { policy: ColorPolicy::LeadingTerm, margin: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Conditions hold, `epsilon < 1/8` and the girth bound beats the
    /// colourability bound.
    Holds,
    ConditionsFail,
    /// Conditions hold but the colourability bound is at least the girth bound.
    BoundsFail,
    Indeterminate,
}

/// Under `d~ >= 3` and the third condition, `N > 120 ell 2^{ell-1}`, so
/// `(N / (N - 2 ell + 1))^ell < e^{1/59}` and `epsilon < 0.1 e^{1/59} < 1/8`
/// for every `ell >= 1`. The threshold `ell_0` is therefore 1.
pub const ELL_FLOOR: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExistenceCertificate {
    pub k: u32,
    pub ell: u32,
    pub stats: DegreeStats,
    /// `d~ >= 3`, `8k^2(d~-1)^ell < N`, `4 ell Delta (d~-1)^{ell-1} < N/10`,
    /// all in exact arithmetic.
    pub conditions: Vec<Check>,
    /// Rounded up; `None` when `N <= 2 ell - 1`.
    #[serde(serialize_with = "report::opt_f64_str")]
    pub epsilon: Option<f64>,
    pub epsilon_check: Check,
    /// Log of the lower bound on `Pr(girth > ell)`, rounded down.
    #[serde(serialize_with = "report::opt_f64_str")]
    pub log_girth_bound: Option<f64>,
    /// Log of the upper bound on `Pr(k-colourable)`, rounded up.
    #[serde(serialize_with = "report::f64_str")]
    pub log_color_bound: f64,
    pub policy: ColorPolicy,
    #[serde(serialize_with = "report::f64_str")]
    pub margin: f64,
    pub ell_floor: u32,
    pub verdict: Verdict,
}

fn pow_interval(base: &BigRational, e: u32) -> Interval {
    if e == 0 {
        return Interval::exact(1.0);
    }
    if base.is_zero() {
        return Interval::exact(0.0);
    }
    Interval::from_rational(base).ln().scale(e as u64).exp()
}

/// Evaluates the three conditions, `epsilon`, and both log bounds for the
/// configuration model on `dseq`.
pub fn existence_certificate(
    dseq: &DegreeSequence,
    k: u32,
    ell: u32,
    options: CertificateOptions,
) -> Result<ExistenceCertificate, GirthChromError> {
    if k == 0 || ell == 0 {
        return Err(GirthChromError::BadParams(format!("need k >= 1 and ell >= 1, got k = {k}, ell = {ell}")));
    }
    if !(options.margin >= 0.0 && options.margin.is_finite()) {
        return Err(GirthChromError::BadParams(format!("margin must be finite and >= 0, got {}", options.margin)));
    }
    let stats = degree_stats(dseq.degrees())?;
    let big_n = BigRational::from_integer(BigInt::from(stats.volume));
    let dm1 = &stats.dtilde - BigRational::one();
    let k2 = BigRational::from_integer(BigInt::from(k as u64 * k as u64));
    let three = BigRational::from_integer(BigInt::from(3));
    let dense = Check::rational("d~ >= 3", &stats.dtilde, &three, stats.dtilde >= three);
    let short_lhs = BigRational::from_integer(BigInt::from(8)) * &k2 * dm1.pow(ell as i32);
    let short_cycles = Check::rational("8 k^2 (d~ - 1)^ell < N", &short_lhs, &big_n, short_lhs < big_n);
    let spread_lhs =
        BigRational::from_integer(BigInt::from(4u64 * ell as u64 * stats.max_degree as u64)) * dm1.pow(ell as i32 - 1);
    let spread_rhs = &big_n / BigRational::from_integer(BigInt::from(10));
    let spread = Check::rational("4 ell Delta (d~ - 1)^(ell - 1) < N / 10", &spread_lhs, &spread_rhs, spread_lhs < spread_rhs);
    let conditions = vec![dense, short_cycles, spread];

    let nf = Interval::from_u64(stats.volume);
    let log_color = Interval::from_u64(stats.n as u64)
        .mul(Interval::exact(2.0).ln())
        .sub(nf.div(Interval::from_u64(2 * k as u64 * k as u64)));

    let shrunk = stats.volume as i128 - 2 * ell as i128 + 1;
    let (epsilon, log_girth) = if shrunk > 0 {
        // N^ell / (N - 2 ell + 1)^ell
        let growth = nf.ln().sub(Interval::from_u64(shrunk as u64).ln()).scale(ell as u64).exp();
        let eps = Interval::from_u64(4 * ell as u64 * stats.max_degree as u64)
            .div(nf)
            .mul(pow_interval(&dm1, ell - 1))
            .mul(growth);
        let expected = Interval::exact(2.0).mul(pow_interval(&dm1, ell)).mul(growth);
        let log_girth = Interval::exact(1.0).add(eps.scale(2)).mul(expected).neg();
        (Some(eps.hi()), Some(log_girth.lo()))
    } else {
        (None, None)
    };
    let epsilon_check = match epsilon {
        Some(e) => Check::float("epsilon < 1/8", e, 0.125, e < 0.125),
        None => Check::text("epsilon < 1/8", "undefined", "1/8", false),
    };
    let log_color_bound = log_color.hi();

    let verdict = if !conditions.iter().all(|c| c.holds) || !epsilon_check.holds {
        Verdict::ConditionsFail
    } else {
        let girth = log_girth.expect("defined when epsilon is");
        let gap = girth - log_color_bound;
        if gap.abs() <= options.margin * girth.abs().min(log_color_bound.abs()) {
            Verdict::Indeterminate
        } else if gap > 0.0 {
            Verdict::Holds
        } else {
            Verdict::BoundsFail
        }
    };
    Ok(ExistenceCertificate {
        k,
        ell,
        stats,
        conditions,
        epsilon,
        epsilon_check,
        log_girth_bound: log_girth,
        log_color_bound,
        policy: options.policy,
        margin: options.margin,
        ell_floor: ELL_FLOOR,
        verdict,
    })
}

pub const MAX_EXACT_INDEPENDENT: u32 = 48;

/// Largest volume of an independent set (loops exclude their vertex), by
/// branch and bound over bitmasks.
pub fn max_independent_volume(graph: &MultiGraph, degrees: &[u32]) -> Result<u64, GirthChromError> {
    let n = graph.n();
    if n > MAX_EXACT_INDEPENDENT {
        return Err(GirthChromError::TooLarge(format!("{n} vertices > {MAX_EXACT_INDEPENDENT}")));
    }
    let mut adj = vec![0u64; n as usize];
    let mut allowed = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    for &(u, v) in graph.edges() {
        let (a, b) = (u as usize - 1, v as usize - 1);
        if a == b {
            allowed &= !(1 << a);
        } else {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
    }
    fn search(cand: u64, vol: u64, adj: &[u64], w: &[u32], best: &mut u64) {
        if cand == 0 {
            *best = (*best).max(vol);
            return;
        }
        let bound: u64 = vol + (0..64).filter(|&i| cand >> i & 1 == 1).map(|i| w[i] as u64).sum::<u64>();
        if bound <= *best {
            return;
        }
        let v = 63 - cand.leading_zeros() as usize;
        search(cand & !(1 << v) & !adj[v], vol + w[v] as u64, adj, w, best);
        search(cand & !(1 << v), vol, adj, w, best);
    }
    let mut best = greedy_independent_volume(graph, degrees);
    search(allowed, 0, &adj, degrees, &mut best);
    Ok(best)
}

/// Volume of a greedy independent set taking vertices by increasing degree.
pub fn greedy_independent_volume(graph: &MultiGraph, degrees: &[u32]) -> u64 {
    let n = graph.n() as usize;
    let mut blocked = vec![false; n];
    let mut nbrs = vec![Vec::new(); n];
    for &(u, v) in graph.edges() {
        let (a, b) = (u as usize - 1, v as usize - 1);
        if a == b {
            blocked[a] = true;
        } else {
            nbrs[a].push(b);
            nbrs[b].push(a);
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (degrees[v], v));
    let mut vol = 0;
    for v in order {
        if !blocked[v] {
            vol += degrees[v] as u64;
            blocked[v] = true;
            for &u in &nbrs[v] {
                blocked[u] = true;
            }
        }
    }
    vol
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpotCheck {
    pub trials: u64,
    pub seed: u64,
    /// `ceil(N / k)`.
    pub target_volume: u64,
    /// Samples with girth above `ell`.
    pub girth_above_ell: u64,
    /// Samples whose largest independent set has volume below the target,
    /// so that they are not `k`-colourable.
    pub not_k_colourable: u64,
    /// Samples with both properties.
    pub both: u64,
}

/// Samples configuration-model multigraphs and counts those certified to have
/// girth above `ell` and no independent set of volume `>= N/k`. A
/// demonstration at tiny sizes, not a test of the certificate.
pub fn independent_set_spot_check(
    dseq: &DegreeSequence,
    k: u32,
    ell: u32,
    trials: u64,
    seed: u64,
) -> Result<SpotCheck, GirthChromError> {
    if k == 0 || trials == 0 {
        return Err(GirthChromError::BadParams("need k >= 1 and trials >= 1".into()));
    }
    if dseq.n() as u32 > MAX_EXACT_INDEPENDENT {
        return Err(GirthChromError::TooLarge(format!("{} vertices > {MAX_EXACT_INDEPENDENT}", dseq.n())));
    }
    let target = dseq.total().div_ceil(k as u64);
    let per_trial = map_indexed(trials, |t| {
        let g = sample_multigraph_trial(dseq, seed, t);
        let girth_ok = g.girth_at_least(ell + 1);
        let colour_ok = max_independent_volume(&g, dseq.degrees()).expect("size checked") < target;
        (girth_ok, colour_ok)
    });
    let count = |f: fn(&(bool, bool)) -> bool| per_trial.iter().filter(|x| f(x)).count() as u64;
    Ok(SpotCheck {
        trials,
        seed,
        target_volume: target,
        girth_above_ell: count(|x| x.0),
        not_k_colourable: count(|x| x.1),
        both: count(|x| x.0 && x.1),
    })
}

/// `dbar <= dtilde <= Delta`, with each equality exactly when all degrees agree.
pub fn degree_inequalities_hold(stats: &DegreeStats) -> bool {
    let delta = BigRational::from_integer(BigInt::from(stats.max_degree));
    let constant = stats.degrees.iter().all(|&d| d == stats.max_degree);
    let ordered = stats.dbar <= stats.dtilde && stats.dtilde <= delta;
    ordered && (stats.dbar == stats.dtilde) == constant && (stats.dtilde == delta) == constant
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn traversal_examples() {
        assert_eq!(traversal_probability(4, 2).unwrap(), ratio(2, 3));
        assert_eq!(traversal_probability(6, 3).unwrap(), ratio(2, 5));
        assert_eq!(traversal_probability(10, 0).unwrap(), ratio(1, 1));
        assert_eq!(traversal_probability(6, 4).unwrap(), ratio(0, 1));
        assert!(traversal_probability(5, 1).is_err());
    }

    #[test]
    fn traversal_leading_term() {
        let t = traversal_asymptotic(1000, 0.1).unwrap();
        assert!((t.leading - (-5.0f64).exp()).abs() < 1e-15);
        let ratio = t.exact.unwrap() / t.leading;
        assert!((-2.0..2.0).contains(&ratio.ln()), "{ratio}");
        assert!((t.entropy_form / t.exact.unwrap() - 1.0).abs() < 0.02);
        let t = traversal_asymptotic(400, 0.25).unwrap();
        assert!((t.leading - (-12.5f64).exp()).abs() < 1e-18);
    }

    #[test]
    fn degree_stat_examples() {
        let s = degree_stats(&[1, 2, 3]).unwrap();
        assert_eq!((s.volume, s.max_degree), (6, 3));
        assert_eq!((s.dbar.clone(), s.dtilde.clone()), (ratio(2, 1), ratio(7, 3)));
        assert_eq!(s.vol(&[1, 3]), 4);
        let s = degree_stats(&[1, 1, 2]).unwrap();
        assert_eq!((s.dbar.clone(), s.dtilde.clone()), (ratio(4, 3), ratio(3, 2)));
        assert!(degree_inequalities_hold(&s));
        let s = degree_stats(&[3; 4]).unwrap();
        assert_eq!((s.dbar.clone(), s.dtilde.clone()), (ratio(3, 1), ratio(3, 1)));
        assert!(degree_inequalities_hold(&s));
        assert_eq!(degree_stats(&[]), Err(GirthChromError::Empty));
    }

    #[test]
    fn certificate_examples() {
        let opts = CertificateOptions::default();
        let c = existence_certificate(&DegreeSequence::regular(100, 3).unwrap(), 3, 5, opts).unwrap();
        assert_eq!(c.verdict, Verdict::ConditionsFail);
        assert_eq!((c.conditions[1].lhs.as_str(), c.conditions[1].rhs.as_str()), ("2304/1", "300/1"));

        let c = existence_certificate(&DegreeSequence::regular(3334, 3).unwrap(), 3, 5, opts).unwrap();
        assert!(c.conditions.iter().all(|x| x.holds));
        assert!((c.epsilon.unwrap() - 0.09641).abs() < 1e-4);
        assert!((c.log_girth_bound.unwrap() + 76.685).abs() < 0.01);
        // 2^n dwarfs everything at k = 3
        assert_eq!(c.verdict, Verdict::BoundsFail);
    }

    #[test]
    fn independent_sets() {
        // C5: max independent set has 2 vertices
        let c5 = MultiGraph::new(5, [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)]);
        assert_eq!(max_independent_volume(&c5, &[2; 5]).unwrap(), 4);
        let looped = MultiGraph::new(2, [(1, 1), (2, 2)]);
        assert_eq!(max_independent_volume(&looped, &[2, 2]).unwrap(), 0);
        let s = independent_set_spot_check(&DegreeSequence::regular(10, 3).unwrap(), 3, 3, 50, 1).unwrap();
        assert!(s.both <= s.girth_above_ell.min(s.not_k_colourable));
    }
}

//! Acceptance criteria, one line each. Runs as a plain binary so that the
//! summary is printed whether or not the criteria pass.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use negdep::bounds::{l5_lower_bound, upper_bound, Bound, DeltaChoice};
use negdep::config_model::{
    cycle_event_family, exact_girth_probability, exact_regular_count, mc_girth_at_least, regular_count_estimates,
    DegreeSequence,
};
use negdep::exact::{factorial, perfect_matching_count, ratio};
use negdep::family::io::parse_family;
use negdep::girth_chromatic::traversal_probability;
use negdep::latin::{latin_upper_exact, latin_lower_exact, latin_count_exact};
use negdep::oracle::{
    avoid_probability_exact, check_near_positive, check_negative_dependency, perfect_matchings, OracleLimits,
};
use negdep::permutations::{derangements, k_cycle_event_family, k_cycle_free_brute_force_all, k_cycle_free_inclusion_exclusion};
use negdep::rng::trial_rng;
use negdep::{canonical_form, EventFamily, Matching, MatchingSpace, Vertex};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// A random family of up to `max_members` distinct matchings of up to
/// `max_size` edges.
fn random_family(space: MatchingSpace, max_members: usize, max_size: usize, seed: u64, index: u64) -> EventFamily {
    let mut rng = trial_rng(seed, index);
    let bipartite = !matches!(space.kind(), negdep::matching::SpaceKind::Complete { .. });
    let n = space.n() as Vertex;
    let cap = max_size.min(space.perfect_size()).max(1);
    let count = rng.random_range(1..=max_members);
    let mut members: Vec<Matching> = (0..count)
        .map(|_| {
            let size = rng.random_range(1..=cap);
            let mut left: Vec<Vertex> = (1..=n).collect();
            left.shuffle(&mut rng);
            let pairs: Vec<[Vertex; 2]> = if bipartite {
                let mut right: Vec<Vertex> = (1..=n).collect();
                right.shuffle(&mut rng);
                (0..size).map(|i| [left[i], -right[i]]).collect()
            } else {
                (0..size).map(|i| [left[2 * i], left[2 * i + 1]]).collect()
            };
            canonical_form(&pairs).expect("valid matching")
        })
        .collect();
    members.sort_by(|a, b| a.edges().cmp(b.edges()));
    members.dedup();
    EventFamily::new(space, members).expect("valid family")
}

fn exact_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite bound")
}

fn negative_dependency() -> Outcome {
    let limits = OracleLimits::default();
    let spaces = [
        MatchingSpace::complete(4),
        MatchingSpace::complete(6),
        MatchingSpace::complete(8),
        MatchingSpace::bipartite(3, 3),
        MatchingSpace::bipartite(4, 4),
    ];
    let mut families = 0;
    let mut pairs = 0;
    for (s, space) in spaces.into_iter().enumerate() {
        let space = space.expect("valid space");
        for i in 0..50 {
            let f = random_family(space.clone(), 6, 3, 1 + s as u64, i);
            let report = check_negative_dependency(&f, 6, &limits).map_err(|e| e.to_string())?;
            ensure(report.passed, || format!("{space}: family {i} violates: {:?}", report.violations[0]))?;
            families += 1;
            pairs += report.checked_pairs;
        }
    }
    let c6 = parse_family(&std::fs::read_to_string(format!("{FIXTURES}/c6.jsonl")).unwrap()).map_err(|e| e.to_string())?;
    let report = check_negative_dependency(&c6, 6, &limits).map_err(|e| e.to_string())?;
    ensure(!report.passed && report.violation_count > 0, || "C6 fixture passed".into())?;
    for v in &report.violations {
        ensure(v.lhs == ratio(1, 1) && v.rhs == ratio(1, 2), || format!("unexpected C6 violation {v:?}"))?;
    }
    Ok(format!(
        "{families} random families, {pairs} (member, subset) pairs, 0 violations; C6: {} violations, all 1/1 > 1/2",
        report.violation_count
    ))
}

fn sandwich_one(f: &EventFamily, limits: &OracleLimits, stats: &mut [u32; 3]) -> Result<(), String> {
    let exact = avoid_probability_exact(f, limits).map_err(|e| e.to_string())?;
    stats[0] += 1;
    if let Bound::Value(lo) = l5_lower_bound(f).map_err(|e| e.to_string())?.lower {
        ensure(exact_f64(lo) <= exact, || format!("{}: lower {lo} > exact {exact}", f.space()))?;
        stats[1] += 1;
    }
    let up = upper_bound(f, DeltaChoice::Auto).map_err(|e| e.to_string())?;
    if let (true, Bound::Value(hi)) = (up.all_hold(), up.upper) {
        ensure(exact <= exact_f64(hi), || format!("{}: exact {exact} > upper {hi}", f.space()))?;
        stats[2] += 1;
    }
    Ok(())
}

fn sandwich() -> Outcome {
    let limits = OracleLimits::default();
    // [instances, lower applicable, upper applicable]
    let mut stats = [0u32; 3];
    for n in (10..=16).step_by(2) {
        for i in 0..4 {
            let f = random_family(MatchingSpace::complete(n).unwrap(), 2 + i as usize, 1, 20 + n as u64, i);
            sandwich_one(&f, &limits, &mut stats)?;
        }
    }
    for n in 1..=7 {
        for k in 1..=n {
            sandwich_one(&k_cycle_event_family(n, k).unwrap(), &limits, &mut stats)?;
        }
    }
    let dseq = DegreeSequence::regular(4, 3).unwrap();
    for g in 2..=4 {
        sandwich_one(&cycle_event_family(&dseq, g).unwrap(), &limits, &mut stats)?;
    }
    ensure(stats[1] > 0 && stats[2] > 0, || format!("vacuous: {stats:?}"))?;
    Ok(format!(
        "{} instances; lower <= exact on the {} where it applies, exact <= upper on the {} where the conditions hold",
        stats[0], stats[1], stats[2]
    ))
}

fn monotone_in_n() -> Outcome {
    let limits = OracleLimits::default();
    let mut checked = 0;
    for n in [4u32, 6, 8] {
        for i in 0..20 {
            let f = random_family(MatchingSpace::complete(n).unwrap(), 5, 2, 40 + n as u64, i);
            let small = avoid_probability_exact(&f, &limits).map_err(|e| e.to_string())?;
            let big = f.reembed(MatchingSpace::complete(n + 2).unwrap()).unwrap();
            let big = avoid_probability_exact(&big, &limits).map_err(|e| e.to_string())?;
            ensure(small <= big, || format!("K_{n} family {i}: {small} > {big}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} families, avoidance in K_(N+2) >= avoidance in K_N for N in 4, 6, 8"))
}

fn permutations() -> Outcome {
    for n in 1..=10u32 {
        let brute = k_cycle_free_brute_force_all(n).map_err(|e| e.to_string())?;
        for k in 1..=n {
            let ie = k_cycle_free_inclusion_exclusion(n, k).unwrap();
            ensure(ie == BigUint::from(brute[k as usize - 1]), || format!("n={n} k={k}: {ie} vs {}", brute[k as usize - 1]))?;
        }
    }
    let mut worst: f64 = 0.0;
    for k in 1..=3u32 {
        let count = k_cycle_free_inclusion_exclusion(12, k).unwrap();
        let frac = BigRational::new(BigInt::from(count), BigInt::from(factorial(12))).to_f64().unwrap();
        let gap = (frac - (-1.0 / k as f64).exp()).abs();
        ensure(gap <= 0.02, || format!("n=12 k={k}: |{frac} - e^(-1/k)| = {gap}"))?;
        worst = worst.max(gap);
    }
    Ok(format!("brute force = inclusion-exclusion for n <= 10; n = 12 worst |count/n! - e^(-1/k)| = {worst:.2e} <= 0.02"))
}

fn latin() -> Outcome {
    let mut upper_checked = 0;
    for n in 1..=7u32 {
        for k in 1..=n {
            let exact = BigRational::from_integer(BigInt::from(latin_count_exact(k, n).map_err(|e| e.to_string())?));
            ensure(latin_lower_exact(k, n) <= exact, || format!("lower bound above L({k},{n})"))?;
            if let Some(up) = latin_upper_exact(k, n) {
                ensure(exact <= up, || format!("L({k},{n}) above the upper bound"))?;
                upper_checked += 1;
            }
        }
    }
    for n in 2..=8u32 {
        let l2 = latin_count_exact(2, n).map_err(|e| e.to_string())?;
        let expected = factorial(n as u64) * derangements(n);
        ensure(l2 == expected, || format!("L(2,{n}) = {l2}, n! D_n = {expected}"))?;
    }
    Ok(format!("lower <= L(k,n) for all 28 pairs with n <= 7, L <= upper on the {upper_checked} where it applies; L(2,n) = n! D_n for 2 <= n <= 8"))
}

fn configuration_exact() -> Outcome {
    let p = exact_girth_probability(&DegreeSequence::regular(4, 3).unwrap(), 3).map_err(|e| e.to_string())?;
    ensure(p == ratio(1296, 10395), || format!("Pr(simple) for 3-regular n=4 is {p}"))?;
    let mut checked = 0;
    for n in 1..=14u32 {
        for d in 1..=14u32 {
            let total = n * d;
            if total > 14 || total % 2 == 1 {
                continue;
            }
            let dseq = DegreeSequence::regular(n, d).unwrap();
            let simple = exact_girth_probability(&dseq, 3).map_err(|e| e.to_string())?;
            let pairings = BigRational::from_integer(BigInt::from(perfect_matching_count(total as u64)));
            let count = exact_regular_count(n, d).map_err(|e| e.to_string())?;
            let labelled = BigRational::from_integer(BigInt::from(count * factorial(d as u64).pow(n)));
            ensure(simple * pairings == labelled, || format!("n={n} d={d}: pairings and labelled count disagree"))?;
            checked += 1;
        }
    }
    Ok(format!("Pr = 1296/10395 exactly; simple pairings = count * (d!)^n for {checked} regular sequences with N <= 14"))
}

fn configuration_mc() -> Outcome {
    let start = Instant::now();
    let dseq = DegreeSequence::regular(100, 3).unwrap();
    let g3 = mc_girth_at_least(&dseq, 3, 100_000, 2024).map_err(|e| e.to_string())?;
    let g4 = mc_girth_at_least(&dseq, 4, 100_000, 2024).map_err(|e| e.to_string())?;
    let (t3, t4) = ((-2.0f64).exp(), (-10.0f64 / 3.0).exp());
    let elapsed = start.elapsed();
    ensure((g3.estimate - t3).abs() <= 0.01, || format!("g=3: {} vs {t3}", g3.estimate))?;
    ensure((g4.estimate - t4).abs() <= 0.01, || format!("g=4: {} vs {t4}", g4.estimate))?;
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "g=3: {:.4} vs e^-2 = {t3:.4}; g=4: {:.4} vs e^(-10/3) = {t4:.4}; 2 x 10^5 trials in {:.1}s",
        g3.estimate,
        g4.estimate,
        elapsed.as_secs_f64()
    ))
}

fn regular_counts() -> Outcome {
    let mut parts = Vec::new();
    let mut failed = false;
    for n in [4u32, 6] {
        let est = regular_count_estimates(n, 3, 3).map_err(|e| e.to_string())?.bollobas_os;
        let exact = exact_regular_count(n, 3).map_err(|e| e.to_string())?.to_f64().unwrap();
        let r = est / exact;
        failed |= !(0.8..=1.3).contains(&r);
        parts.push(format!("n={n}: {est:.2} / {exact} = {r:.4}"));
    }
    let line = format!("{}; required in [0.8, 1.3]", parts.join(", "));
    if failed {
        Err(line)
    } else {
        Ok(line)
    }
}

fn traversal() -> Outcome {
    let limits = OracleLimits::default();
    let mut cases = 0;
    for n in (2..=12u32).step_by(2) {
        let space = MatchingSpace::complete(n).unwrap();
        let all: Vec<Matching> = perfect_matchings(&space, &limits).map_err(|e| e.to_string())?.collect();
        for s in 0..=n as Vertex {
            let good = all.iter().filter(|m| m.edges().iter().all(|&(a, b)| a > s || b > s)).count();
            let expected = ratio(good as u64, all.len() as u64);
            let got = traversal_probability(n as u64, s as u64).map_err(|e| e.to_string())?;
            ensure(got == expected, || format!("N={n} s={s}: {got} vs {expected}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} (N, s) pairs with N <= 12 equal the enumerated fraction exactly"))
}

fn near_positive() -> Outcome {
    let limits = OracleLimits::default();
    let mut candidates: Vec<EventFamily> = Vec::new();
    for n in [8u32, 10, 12] {
        for i in 0..30 {
            candidates.push(random_family(MatchingSpace::complete(n).unwrap(), 4, 2, 60 + n as u64, i));
        }
    }
    for n in [5u32, 6, 7] {
        for i in 0..20 {
            candidates.push(random_family(MatchingSpace::bipartite(n, n).unwrap(), 4, 2, 70 + n as u64, i));
        }
        for k in 1..=n {
            candidates.push(k_cycle_event_family(n, k).unwrap());
        }
    }
    let mut sparse = 0;
    let mut worst_eps: f64 = 0.0;
    for f in &candidates {
        let up = upper_bound(f, DeltaChoice::Auto).map_err(|e| e.to_string())?;
        if !up.all_hold() {
            continue;
        }
        let eps = up.epsilon.expect("set when the conditions hold");
        let report = check_near_positive(f, eps, 8, &limits).map_err(|e| e.to_string())?;
        ensure(report.passed, || format!("{}: eps = {eps}: {:?}", f.space(), report.violations.first()))?;
        sparse += 1;
        worst_eps = worst_eps.max(eps);
    }
    ensure(sparse >= 10, || format!("only {sparse} sparse families among {}", candidates.len()))?;
    Ok(format!("{sparse} of {} families are delta-sparse; all pass the near-positive check (largest eps {worst_eps:.4})", candidates.len()))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_negdep");
    let c6 = format!("{FIXTURES}/c6.jsonl");
    let k6 = format!("{FIXTURES}/k6_canonical.jsonl");
    let invocations: Vec<Vec<&str>> = vec![
        vec!["--seed", "5", "regular", "--n", "60", "--d", "3", "--g", "4", "--trials", "4000"],
        vec!["--seed", "5", "regular", "--n", "20", "--d", "4", "--trials", "300", "--format", "csv"],
        vec!["latin", "--k", "4", "--n", "7"],
        vec!["permutations", "--n", "7", "--k", "1", "--bounds"],
        vec!["verify", "--family", &c6],
        vec!["bounds", "--family", &k6, "--exact"],
        vec!["--seed", "9", "girthchrom", "--regular", "3,12", "--k", "3", "--ell", "3", "--spot-check", "40"],
    ];
    for argv in &invocations {
        let mut outputs = Vec::new();
        for threads in ["1", "4", "8"] {
            for _ in 0..2 {
                let out = Command::new(bin).arg("--threads").arg(threads).args(argv).output().map_err(|e| e.to_string())?;
                outputs.push((out.status.code(), out.stdout));
            }
        }
        ensure(outputs.iter().all(|o| *o == outputs[0]), || format!("output differs for {argv:?}"))?;
        ensure(!outputs[0].1.is_empty(), || format!("no output for {argv:?}"))?;
    }
    Ok(format!("{} invocations byte-identical over 2 runs each at 1, 4 and 8 threads", invocations.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("negative dependency, exhaustive", negative_dependency),
        ("bounds sandwich the exact value", sandwich),
        ("avoidance is monotone in N", monotone_in_n),
        ("permutations without k-cycles", permutations),
        ("Latin rectangle bounds", latin),
        ("configuration model, exact", configuration_exact),
        ("configuration model, Monte Carlo", configuration_mc),
        ("regular graph count estimate", regular_counts),
        ("traversal probability", traversal),
        ("near-positive dependency", near_positive),
        ("CLI determinism", determinism),
    ];
    let filter: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if filter.is_some_and(|f| f != id) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failures += 1;
                println!("criterion {id:>2} FAIL  {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    if failures > 0 {
        println!("{failures} criterion(s) failed");
        std::process::exit(1);
    }
}

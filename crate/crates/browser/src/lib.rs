//! WebAssembly entry points for the demo page in `www/`. Each returns a JSON
//! string; errors come back as a thrown string.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use negdep::bounds::asymptotic_bracket;
use negdep::config_model::{exact_girth_probability, girth_prediction, mc_girth_trials, DegreeSequence, MAX_EXACT_MINIS};
use negdep::exact::{binomial, factorial};
use negdep::girth_chromatic::traversal_probability;
use negdep::oracle::approx;
use negdep::permutations::{k_cycle_event_family, k_cycle_free_inclusion_exclusion};
use num_rational::BigRational;

const MAX_FAMILY: u64 = 5_000;
const MAX_TRIALS: u64 = 200_000;

#[derive(Serialize)]
struct PermutationPoint {
    n: u32,
    exact: f64,
    lower: Option<f64>,
    upper: Option<f64>,
    limit: f64,
}

fn to_js<T: Serialize>(value: &T) -> Result<String, JsValue> {
    serde_json::to_string(value).map_err(|e| JsValue::from_str(&e.to_string()))
}

fn err(e: impl ToString) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn permutation_points(k: u32, n_max: u32) -> Result<Vec<PermutationPoint>, String> {
    if k == 0 || n_max < k || n_max > 40 {
        return Err(format!("need 1 <= k <= n_max <= 40, got k = {k}, n_max = {n_max}"));
    }
    let mut points = Vec::new();
    for n in k..=n_max {
        let count = k_cycle_free_inclusion_exclusion(n, k).map_err(|e| e.to_string())?;
        let exact = approx(&BigRational::new(count.into(), factorial(n as u64).into()));
        let members = binomial(n as u64, k as u64) * factorial(k as u64 - 1);
        let (lower, upper) = if members <= MAX_FAMILY.into() {
            let family = k_cycle_event_family(n, k).map_err(|e| e.to_string())?;
            let report = asymptotic_bracket(&family).map_err(|e| e.to_string())?;
            (report.lower.value(), report.all_hold().then(|| report.upper.value()).flatten())
        } else {
            (None, None)
        };
        points.push(PermutationPoint { n, exact, lower, upper, limit: (-1.0 / k as f64).exp() });
    }
    Ok(points)
}

/// Fraction of permutations of `n` points with no `k`-cycle for each `n` up
/// to `n_max`, with the local-lemma bracket where its hypotheses hold.
#[wasm_bindgen]
pub fn permutation_bracket(k: u32, n_max: u32) -> Result<String, JsValue> {
    to_js(&permutation_points(k, n_max).map_err(err)?)
}

#[derive(Serialize)]
struct GirthSummary {
    trials: u64,
    /// `histogram[g]` counts trials of girth `g`; acyclic samples are not counted.
    histogram: Vec<u64>,
    acyclic: u64,
    estimate: f64,
    stderr: f64,
    prediction: Option<f64>,
    exact: Option<f64>,
}

fn girth_summary(n: u32, d: u32, g: u32, trials: u64, seed: u64) -> Result<GirthSummary, String> {
    if trials == 0 || trials > MAX_TRIALS {
        return Err(format!("trials must lie in 1..={MAX_TRIALS}"));
    }
    let dseq = DegreeSequence::regular(n, d).map_err(|e| e.to_string())?;
    let girths = mc_girth_trials(&dseq, trials, seed);
    let mut histogram = vec![0u64; 1];
    let mut acyclic = 0;
    let mut hits = 0;
    for girth in &girths {
        match girth {
            Some(x) => {
                let x = *x as usize;
                if histogram.len() <= x {
                    histogram.resize(x + 1, 0);
                }
                histogram[x] += 1;
                hits += u64::from(x as u32 >= g);
            }
            None => {
                acyclic += 1;
                hits += 1;
            }
        }
    }
    let p = hits as f64 / trials as f64;
    let exact = if dseq.total() <= MAX_EXACT_MINIS {
        Some(approx(&exact_girth_probability(&dseq, g).map_err(|e| e.to_string())?))
    } else {
        None
    };
    Ok(GirthSummary {
        trials,
        histogram,
        acyclic,
        estimate: p,
        stderr: (p * (1.0 - p) / trials as f64).sqrt(),
        prediction: girth_prediction(d, g).ok(),
        exact,
    })
}

/// Samples configuration-model `d`-regular multigraphs on `n` vertices and
/// compares the fraction with girth at least `g` to its limiting value.
#[wasm_bindgen]
pub fn girth_experiment(n: u32, d: u32, g: u32, trials: u32, seed: u32) -> Result<String, JsValue> {
    to_js(&girth_summary(n, d, g, trials as u64, seed as u64).map_err(err)?)
}

#[derive(Serialize)]
struct TraversalPoint {
    s: u64,
    exact: f64,
    leading: f64,
}

fn traversal_points(n: u64) -> Result<Vec<TraversalPoint>, String> {
    if n == 0 || n % 2 == 1 || n > 4000 {
        return Err(format!("N must be even and in 2..=4000, got {n}"));
    }
    (0..=n / 2)
        .map(|s| {
            let exact = approx(&traversal_probability(n, s).map_err(|e| e.to_string())?);
            let x = s as f64 / n as f64;
            Ok(TraversalPoint { s, exact, leading: (-(n as f64) * x * x / 2.0).exp() })
        })
        .collect()
}

/// Exact probability that a uniform perfect matching of `K_N` has no edge
/// inside a fixed `s`-set, against `exp(-s^2 / 2N)`, for `s <= N/2`.
#[wasm_bindgen]
pub fn traversal_curve(n: u32) -> Result<String, JsValue> {
    to_js(&traversal_points(n as u64).map_err(err)?)
}

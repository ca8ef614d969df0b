use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use negdep::bounds::{
    asymptotic_bracket, l5_lower_bound, simple_lower_bound, upper_bound, BoundReport, DeltaChoice,
};
use negdep::config_model::{
    exact_girth_probability, exact_regular_count, girth_prediction, mc_girth_at_least, mc_girth_trials,
    regime_ratio, regular_count_estimates, DegreeSequence, McEstimate, RegularCountEstimates, MAX_EXACT_MINIS,
};
use negdep::exact::{factorial, fmt_rational};
use negdep::family::io::parse_family;
use negdep::girth_chromatic::{
    existence_certificate, independent_set_spot_check, CertificateOptions, ExistenceCertificate, SpotCheck,
};
use negdep::latin::{exact_count_supported, latin_bounds, latin_count_exact, latin_lower_exact, latin_upper_exact, LatinBounds};
use negdep::matching::SpaceKind;
use negdep::oracle::{avoid_probability_exact, check_near_positive, check_negative_dependency, DependencyCheckReport, OracleLimits};
use negdep::permutations::{k_cycle_event_family, k_cycle_free_count, CycleFreeCount};
use negdep::report::{f64_str, opt_f64_str};
use negdep::{family_stats, EventFamily, MatchingSpace};

/// Local-lemma bounds, exhaustive checks and counting for events in random
/// perfect matchings.
#[derive(Debug, Parser)]
#[command(name = "negdep", version)]
struct Cli {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lower and upper bounds on avoiding every event of a family.
    Bounds(BoundsArgs),
    /// Exhaustive check of the dependency inequalities.
    Verify(VerifyArgs),
    /// Permutations without k-cycles.
    Permutations(PermutationArgs),
    /// Latin rectangle counts and bounds.
    Latin(LatinArgs),
    /// Girth of configuration-model regular multigraphs.
    Regular(RegularArgs),
    /// Certificate for high girth and high chromatic number.
    Girthchrom(GirthchromArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SpaceName {
    Complete,
    Bipartite,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    /// Family file: a JSON space header line, then one matching per line.
    #[arg(long)]
    family: PathBuf,
    /// Re-embed the family in this space instead of the header's.
    #[arg(long, requires = "n")]
    space: Option<SpaceName>,
    #[arg(long)]
    n: Option<u32>,
    /// Right-hand side size of a bipartite space (default: n).
    #[arg(long)]
    m: Option<u32>,
    /// Largest N the exhaustive oracle will enumerate in K_N.
    #[arg(long, default_value_t = 16)]
    max_complete: u32,
    /// Largest N the exhaustive oracle will enumerate in K_{N,M}.
    #[arg(long, default_value_t = 10)]
    max_bipartite: u32,
}

impl FamilyArgs {
    fn load(&self) -> Result<EventFamily> {
        let text = read(&self.family)?;
        let family = parse_family(&text).with_context(|| format!("parsing {}", self.family.display()))?;
        let Some(space) = self.space else { return Ok(family) };
        let n = self.n.expect("clap requires --n with --space");
        let space = match space {
            SpaceName::Complete => MatchingSpace::complete(n)?,
            SpaceName::Bipartite => MatchingSpace::bipartite(n, self.m.unwrap_or(n))?,
        };
        Ok(family.reembed(space)?)
    }

    fn limits(&self) -> OracleLimits {
        OracleLimits { max_complete: self.max_complete, max_bipartite: self.max_bipartite, ..OracleLimits::default() }
    }
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// delta for the upper bound: "auto" or a number.
    #[arg(long, default_value = "auto")]
    delta: String,
    /// Also evaluate exp(-(1 + 3 eps) mu) at this eps.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Also compute the exact avoidance probability by enumeration.
    #[arg(long)]
    exact: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Largest subset size of non-neighbours used per member.
    #[arg(long, default_value_t = 10)]
    max_subset: usize,
    /// Also check near-positive dependency at this eps ("auto" uses the
    /// eps of the upper bound).
    #[arg(long)]
    near_positive: Option<String>,
}

#[derive(Debug, Args)]
struct PermutationArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
    /// Enumerate all permutations as a cross-check when n is at most this.
    #[arg(long, default_value_t = 10)]
    brute_force_max: u32,
    /// Evaluate the bounds on the k-cycle event family.
    #[arg(long)]
    bounds: bool,
}

#[derive(Debug, Args)]
struct LatinArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    n: u32,
    /// Exact count (n <= 7, or n = 8 with k <= 4).
    #[arg(long)]
    exact: bool,
    /// Product bounds and the asymptotic formula.
    #[arg(long)]
    bounds: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct RegularArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    d: u32,
    /// Girth threshold: estimate Pr(girth >= g).
    #[arg(long, default_value_t = 3)]
    g: u32,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// csv prints the girth of every trial instead of the summary.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Exact probability by enumerating pairings, and the exact count of
    /// simple d-regular graphs.
    #[arg(long)]
    exact: bool,
}

#[derive(Debug, Args)]
struct GirthchromArgs {
    /// "d,n": the d-regular sequence on n vertices.
    #[arg(long, conflicts_with = "degrees", required_unless_present = "degrees")]
    regular: Option<String>,
    /// File of whitespace- or comma-separated degrees.
    #[arg(long)]
    degrees: Option<PathBuf>,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    ell: u32,
    /// Log bounds this close (relative to the smaller) are indeterminate.
    #[arg(long, default_value_t = 0.1)]
    margin: f64,
    /// Also sample this many multigraphs and search them for large
    /// independent sets (at most 48 vertices).
    #[arg(long)]
    spot_check: Option<u64>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn parse_delta(s: &str) -> Result<DeltaChoice> {
    if s == "auto" {
        return Ok(DeltaChoice::Auto);
    }
    let d: f64 = s.parse().with_context(|| format!("--delta must be \"auto\" or a number, got {s:?}"))?;
    Ok(DeltaChoice::Fixed(d))
}

#[derive(Serialize)]
struct BoundsOutput {
    space: SpaceKind,
    members: usize,
    r: usize,
    mu: String,
    regular: bool,
    l5: BoundReport,
    upper: BoundReport,
    simple: Option<BoundReport>,
    bracket: Option<BoundReport>,
    exact: Option<String>,
    sandwich_holds: Option<bool>,
}

fn bounds(args: &BoundsArgs) -> Result<bool> {
    let family = args.family.load()?;
    let stats = family_stats(&family)?;
    let l5 = l5_lower_bound(&family)?;
    let upper = upper_bound(&family, parse_delta(&args.delta)?)?;
    let simple = args.epsilon.map(|e| simple_lower_bound(&family, e)).transpose()?;
    let bracket = if stats.regular { Some(asymptotic_bracket(&family)?) } else { None };
    let (exact, sandwich) = if args.exact {
        let p = avoid_probability_exact(&family, &args.family.limits())?;
        let x = negdep::oracle::approx(&p);
        let below = |b: &BoundReport| b.lower.value().is_none_or(|lo| lo <= x);
        let above = |b: &BoundReport| !b.all_hold() || b.upper.value().is_none_or(|hi| x <= hi);
        let ok = below(&l5) && above(&upper) && simple.as_ref().is_none_or(|s| !s.all_hold() || below(s));
        (Some(fmt_rational(&p)), Some(ok))
    } else {
        (None, None)
    };
    emit(&BoundsOutput {
        space: family.space().kind().clone(),
        members: family.len(),
        r: stats.r,
        mu: fmt_rational(&stats.mu),
        regular: stats.regular,
        l5,
        upper,
        simple,
        bracket,
        exact,
        sandwich_holds: sandwich,
    })?;
    Ok(sandwich != Some(false))
}

#[derive(Serialize)]
struct NearPositiveOutput {
    #[serde(serialize_with = "f64_str")]
    epsilon: f64,
    report: DependencyCheckReport,
}

#[derive(Serialize)]
struct VerifyOutput {
    space: SpaceKind,
    members: usize,
    negative_dependency: DependencyCheckReport,
    near_positive: Option<NearPositiveOutput>,
    passed: bool,
}

fn verify(args: &VerifyArgs) -> Result<bool> {
    let family = args.family.load()?;
    let limits = args.family.limits();
    let negative = check_negative_dependency(&family, args.max_subset, &limits)?;
    let near_positive = match args.near_positive.as_deref() {
        None => None,
        Some(spec) => {
            let epsilon = if spec == "auto" {
                let report = upper_bound(&family, DeltaChoice::Auto)?;
                if !report.all_hold() {
                    bail!("the family is not delta-sparse, so there is no eps to check; pass a number instead");
                }
                report.epsilon.expect("set when the conditions hold")
            } else {
                spec.parse().with_context(|| format!("--near-positive must be \"auto\" or a number, got {spec:?}"))?
            };
            let report = check_near_positive(&family, epsilon, args.max_subset, &limits)?;
            Some(NearPositiveOutput { epsilon, report })
        }
    };
    let passed = negative.passed && near_positive.as_ref().is_none_or(|n| n.report.passed);
    emit(&VerifyOutput {
        space: family.space().kind().clone(),
        members: family.len(),
        negative_dependency: negative,
        near_positive,
        passed,
    })?;
    Ok(passed)
}

#[derive(Serialize)]
struct PermutationOutput {
    #[serde(flatten)]
    count: CycleFreeCount,
    /// count / n!
    fraction: String,
    #[serde(serialize_with = "f64_str")]
    fraction_approx: f64,
    /// e^{-1/k}
    #[serde(serialize_with = "f64_str")]
    limit: f64,
    bounds: Option<BoundReport>,
}

fn permutations(args: &PermutationArgs) -> Result<bool> {
    let count = k_cycle_free_count(args.n, args.k, args.brute_force_max)?;
    let nf = factorial(args.n as u64);
    let fraction = num_rational::BigRational::new(count.count.clone().into(), nf.into());
    let bounds = if args.bounds {
        let family = k_cycle_event_family(args.n, args.k)?;
        Some(asymptotic_bracket(&family)?)
    } else {
        None
    };
    let consistent = count.consistent();
    emit(&PermutationOutput {
        fraction: fmt_rational(&fraction),
        fraction_approx: negdep::oracle::approx(&fraction),
        limit: (-1.0 / args.k as f64).exp(),
        count,
        bounds,
    })?;
    Ok(consistent)
}

#[derive(Serialize)]
struct LatinOutput {
    k: u32,
    n: u32,
    exact: Option<String>,
    /// Exact values of the product bounds.
    lower_exact: Option<String>,
    upper_exact: Option<String>,
    bounds: Option<LatinBounds>,
    bracket_holds: Option<bool>,
}

fn latin(args: &LatinArgs) -> Result<bool> {
    let (want_exact, want_bounds) = if args.exact || args.bounds { (args.exact, args.bounds) } else { (true, true) };
    let (k, n) = (args.k, args.n);
    let exact = if want_exact {
        if !exact_count_supported(k, n) && args.exact {
            bail!("exact counting supports n <= 7, or n = 8 with k <= 4");
        }
        exact_count_supported(k, n).then(|| latin_count_exact(k, n)).transpose()?
    } else {
        None
    };
    let bounds = want_bounds.then(|| latin_bounds(k, n)).transpose()?;
    let lower = want_bounds.then(|| latin_lower_exact(k, n));
    let upper = if want_bounds { latin_upper_exact(k, n) } else { None };
    let bracket = match (&exact, &lower) {
        (Some(e), Some(lo)) => {
            let e = num_rational::BigRational::from_integer(e.clone().into());
            Some(*lo <= e && upper.as_ref().is_none_or(|u| e <= *u))
        }
        _ => None,
    };
    emit(&LatinOutput {
        k,
        n,
        exact: exact.map(|e| e.to_string()),
        lower_exact: lower.as_ref().map(fmt_rational),
        upper_exact: upper.as_ref().map(fmt_rational),
        bounds,
        bracket_holds: bracket,
    })?;
    Ok(bracket != Some(false))
}

#[derive(Serialize)]
struct RegularOutput {
    n: u32,
    d: u32,
    g: u32,
    #[serde(flatten)]
    estimate: McEstimate,
    #[serde(serialize_with = "opt_f64_str")]
    prediction: Option<f64>,
    #[serde(serialize_with = "f64_str")]
    regime_ratio: f64,
    exact_probability: Option<String>,
    counts: Option<RegularCountEstimates>,
    exact_simple_count: Option<String>,
}

fn regular(args: &RegularArgs, seed: u64) -> Result<bool> {
    let dseq = DegreeSequence::regular(args.n, args.d)?;
    if let Format::Csv = args.format {
        println!("trial,girth");
        for (t, g) in mc_girth_trials(&dseq, args.trials, seed).iter().enumerate() {
            match g {
                Some(g) => println!("{t},{g}"),
                None => println!("{t},"),
            }
        }
        return Ok(true);
    }
    let estimate = mc_girth_at_least(&dseq, args.g, args.trials, seed)?;
    let (exact_probability, exact_simple_count) = if args.exact {
        if dseq.total() > MAX_EXACT_MINIS {
            bail!("exact enumeration needs n d <= {MAX_EXACT_MINIS}");
        }
        let p = exact_girth_probability(&dseq, args.g)?;
        (Some(fmt_rational(&p)), Some(exact_regular_count(args.n, args.d)?.to_string()))
    } else {
        (None, None)
    };
    emit(&RegularOutput {
        n: args.n,
        d: args.d,
        g: args.g,
        estimate,
        prediction: girth_prediction(args.d, args.g).ok(),
        regime_ratio: regime_ratio(args.n, args.d, args.g),
        exact_probability,
        counts: (args.g >= 3).then(|| regular_count_estimates(args.n, args.d, args.g)).transpose()?,
        exact_simple_count,
    })?;
    Ok(true)
}

#[derive(Serialize)]
struct GirthchromOutput {
    certificate: ExistenceCertificate,
    spot_check: Option<SpotCheck>,
}

fn parse_degrees(text: &str) -> Result<Vec<u32>> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().with_context(|| format!("bad degree {s:?}")))
        .collect()
}

fn girthchrom(args: &GirthchromArgs, seed: u64) -> Result<bool> {
    let dseq = match (&args.regular, &args.degrees) {
        (Some(spec), _) => {
            let parts = parse_degrees(spec)?;
            let [d, n] = parts[..] else { bail!("--regular takes \"d,n\", got {spec:?}") };
            DegreeSequence::regular(n, d)?
        }
        (None, Some(path)) => DegreeSequence::new(parse_degrees(&read(path)?)?)?,
        (None, None) => bail!("pass --regular d,n or --degrees FILE"),
    };
    let options = CertificateOptions { margin: args.margin, ..CertificateOptions::default() };
    let certificate = existence_certificate(&dseq, args.k, args.ell, options)?;
    let spot_check = args.spot_check.map(|t| independent_set_spot_check(&dseq, args.k, args.ell, t, seed)).transpose()?;
    emit(&GirthchromOutput { certificate, spot_check })?;
    Ok(true)
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(t) = cli.threads {
        if t == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    match &cli.command {
        Command::Bounds(a) => bounds(a),
        Command::Verify(a) => verify(a),
        Command::Permutations(a) => permutations(a),
        Command::Latin(a) => latin(a),
        Command::Regular(a) => regular(a, cli.seed),
        Command::Girthchrom(a) => girthchrom(a, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use dilation_core::configcount::{count_c, count_s_k, count_v, v_density, CountReport, Method};
use dilation_core::families::{
    count_family, count_nondeg_simplexes, count_nondeg_triangles, lambda_sums, Family, FamilyCount,
};
use dilation_core::geometry::{distance_set, quotient_set};
use dilation_core::orthogonal::enumerate_orthogonal;
use dilation_core::verify::{check_claim, scan_threshold, Claim, RatioPolicy, ScanResult, Verdict};
use dilation_core::{Error, PointSet, Prime, Ratio};

/// Counts and checks dilated point configurations over F_p^d.
#[derive(Parser, Debug)]
#[command(name = "dilab", version)]
struct Cli {
    /// Worker threads; defaults to the machine's parallelism. Results do not
    /// depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a random point set, sampled without replacement.
    Gen(GenArgs),
    /// Count walk pairs, closed walks, families or quotient sets.
    Count(CountArgs),
    /// Evaluate lemma inequalities and existence thresholds.
    Verify(VerifyArgs),
    /// Sample random sets of increasing size and record when a family appears.
    Scan(ScanArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Where the point sets come from. Without --set, --size or --random the
/// whole space F_p^d is used.
#[derive(Args, Debug)]
struct SetArgs {
    #[arg(long, default_value_t = 7)]
    p: u64,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Point-set file (`p=.. d=..` header, one comma-separated point per line).
    #[arg(long, conflicts_with_all = ["full_plane", "size", "random"])]
    set: Option<PathBuf>,
    /// Use every point of F_p^d.
    #[arg(long)]
    full_plane: bool,
    /// Size of each random set.
    #[arg(long)]
    size: Option<usize>,
    /// Number of random sets. Without --size each size is drawn from
    /// 1..=min(12, p^d).
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[command(flatten)]
    source: SetArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// S_k, C, V, quotient, distances, T, P, or a family name (A, B, A_and_B,
    /// C2path, k_path, A13, A24, B13, B24, F4cycle, Lambda_theta, N_theta, A_kl).
    #[arg(long)]
    what: String,
    /// Dilation ratio: an integer, `squares` or `all`.
    #[arg(long, default_value = "1")]
    r: String,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// brute, nu_identity, mu_identity, walk_dp, group_sum, or `all` to run
    /// every applicable method and require agreement.
    #[arg(long, default_value = "all")]
    method: String,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    source: SetArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// s1-lower-bound, s2-lower-bound, c-lower-bound, nu2-bound,
    /// degenerate-sandwich, walk-power-bound, double-count, two-paths-exist,
    /// four-cycles-exist, triangles-exist, simplices-exist, walk-lower-bound,
    /// quotient, or `all`.
    #[arg(long, default_value = "all")]
    claim: String,
    #[arg(long, default_value = "all")]
    r: String,
    /// Walk length for the walk-count claims.
    #[arg(long, default_value_t = 2)]
    k: usize,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[command(flatten)]
    output: OutputArgs,
    #[arg(long, default_value_t = 7)]
    p: u64,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value = "C2path")]
    family: String,
    #[arg(long, default_value = "all")]
    r: String,
    /// Inclusive size range `a:b`.
    #[arg(long, default_value = "2:30")]
    sizes: String,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Raised when a claim fails on an instance that meets its hypothesis.
#[derive(Debug)]
struct Contradiction(usize);

impl std::fmt::Display for Contradiction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} verdict(s) contradict a claim whose hypothesis is met", self.0)
    }
}

impl std::error::Error for Contradiction {}

/// Errors from bad arguments rather than from the computation.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Contradiction>().is_some() {
        return 4;
    }
    if err.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::TooLarge { .. }) => 3,
        Some(
            Error::NotPrime(_)
            | Error::EvenPrime
            | Error::Invalid(_)
            | Error::SizeExceedsSpace { .. }
            | Error::ZeroRatio
            | Error::DimensionMismatch { .. },
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Count(args) => cmd_count(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Scan(args) => cmd_scan(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn write_out(path: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().lock().write_all(text.as_bytes()).context("writing stdout"),
    }
}

#[derive(Serialize)]
struct JsonDoc<'a, T: Serialize> {
    format: &'static str,
    kind: &'a str,
    seed: u64,
    rows: &'a [T],
}

fn render<T: Serialize>(
    format: Format,
    kind: &str,
    seed: u64,
    header: &str,
    rows: &[T],
    csv: impl Fn(&T) -> Vec<String>,
) -> anyhow::Result<String> {
    Ok(match format {
        Format::Csv => {
            let mut s = format!("# dilab csv v1 {kind} seed={seed}\n{header}\n");
            for row in rows {
                for line in csv(row) {
                    s.push_str(&line);
                    s.push('\n');
                }
            }
            s
        }
        Format::Json => {
            let doc = JsonDoc { format: "dilab json v1", kind, seed, rows };
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    })
}

fn cmd_gen(args: GenArgs) -> anyhow::Result<()> {
    let prime = Prime::new(args.p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let set = PointSet::random(prime, args.d, args.size, &mut rng)?;
    let text = format!("# seed={}\n{}", args.seed, set.to_text());
    write_out(args.out.as_ref(), &text)
}

/// The point sets named by the arguments, in a fixed order. Random set i is
/// drawn from stream i of the seeded generator.
fn load_sets(src: &SetArgs) -> anyhow::Result<Vec<PointSet>> {
    if let Some(path) = &src.set {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(vec![PointSet::parse(&text)?]);
    }
    let prime = Prime::new(src.p)?;
    if src.full_plane || (src.size.is_none() && src.random.is_none()) {
        return Ok(vec![PointSet::full_space(prime, src.d)?]);
    }
    let count = src.random.unwrap_or(1);
    if count == 0 {
        return Err(usage("--random must be at least 1"));
    }
    let space = (src.p as u128).checked_pow(src.d as u32).unwrap_or(u128::MAX);
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(src.seed);
            rng.set_stream(i as u64);
            let size = match src.size {
                Some(s) => s,
                None => rand::Rng::gen_range(&mut rng, 1..=space.min(12) as usize),
            };
            Ok(PointSet::random(prime, src.d, size, &mut rng)?)
        })
        .collect()
}

fn ratios(spec: &str, prime: Prime) -> anyhow::Result<Vec<Ratio>> {
    let policy: RatioPolicy = spec.parse().map_err(|e: Error| usage(e.to_string()))?;
    Ok(policy.ratios(prime)?)
}

enum What {
    Sk,
    C,
    V,
    Quotient,
    Distances,
    Family(Family),
}

fn parse_what(s: &str) -> anyhow::Result<What> {
    Ok(match s.to_ascii_lowercase().as_str() {
        "s_k" | "sk" | "s-k" => What::Sk,
        "c" => What::C,
        "v" => What::V,
        "quotient" => What::Quotient,
        "distances" => What::Distances,
        "t" => What::Family(Family::TTriangle),
        "p" => What::Family(Family::PSimplex),
        other => What::Family(other.parse().map_err(|e: Error| usage(e.to_string()))?),
    })
}

fn parse_methods(spec: &str, applicable: &[Method]) -> anyhow::Result<Vec<Method>> {
    if spec == "all" {
        return Ok(applicable.to_vec());
    }
    let m: Method = spec.parse().map_err(|e: Error| usage(e.to_string()))?;
    if !applicable.contains(&m) {
        return Err(usage(format!("method {m} does not apply here")));
    }
    Ok(vec![m])
}

/// Rows for one counted quantity; exact methods must agree with each other.
fn agree(rows: &[CountReport]) -> anyhow::Result<()> {
    if let Some(first) = rows.first() {
        if let Some(bad) = rows.iter().find(|r| r.value != first.value) {
            let dump: Vec<String> = rows.iter().map(|r| r.csv_row()).collect();
            eprintln!("{}\n{}", CountReport::CSV_HEADER, dump.join("\n"));
            return Err(Error::MethodMismatch {
                name: first.name.clone(),
                detail: format!("{} gave {} but {} gave {}", first.method, first.value, bad.method, bad.value),
            }
            .into());
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct SetReport {
    name: &'static str,
    p: u32,
    d: usize,
    e_size: usize,
    size: usize,
    elements: String,
}

impl SetReport {
    const CSV_HEADER: &'static str = "name,p,d,E_size,size,elements";

    fn csv_row(&self) -> String {
        format!("{},{},{},{},{},{}", self.name, self.p, self.d, self.e_size, self.size, self.elements)
    }
}

fn cmd_count(args: CountArgs) -> anyhow::Result<()> {
    let what = parse_what(&args.what)?;
    let sets = load_sets(&args.source)?;
    let seed = args.source.seed;
    let fmt = args.output.format;
    let text = match what {
        What::Quotient | What::Distances => {
            let mut rows = Vec::new();
            for set in &sets {
                let (name, elems) = match what {
                    What::Quotient => ("quotient", quotient_set(set)?),
                    _ => ("distances", distance_set(set)),
                };
                let list: Vec<String> = elems.iter().map(|s| s.value().to_string()).collect();
                rows.push(SetReport {
                    name,
                    p: set.prime().p(),
                    d: set.dim(),
                    e_size: set.len(),
                    size: elems.len(),
                    elements: list.join(" "),
                });
            }
            render(fmt, "sets", seed, SetReport::CSV_HEADER, &rows, |r| vec![r.csv_row()])?
        }
        What::Sk | What::C | What::V => {
            let applicable: &[Method] = match what {
                What::Sk => &[Method::Brute, Method::NuIdentity, Method::WalkDp],
                What::C => &[Method::Brute, Method::MuIdentity],
                _ => &[Method::NuIdentity],
            };
            let methods = parse_methods(&args.method, applicable)?;
            let mut rows = Vec::new();
            for set in &sets {
                for r in ratios(&args.r, set.prime())? {
                    let group: Vec<CountReport> = methods
                        .iter()
                        .map(|&m| match what {
                            What::Sk => count_s_k(set, r, args.k, m),
                            What::C => count_c(set, r, m),
                            _ => Ok(count_v(set, r)),
                        })
                        .collect::<Result<_, _>>()?;
                    agree(&group)?;
                    if matches!(what, What::V) {
                        eprintln!("V density p*V/|E|^4 = {} (r = {r})", v_density(set, r));
                    }
                    rows.extend(group);
                }
            }
            render(fmt, "counts", seed, CountReport::CSV_HEADER, &rows, |r| vec![r.csv_row()])?
        }
        What::Family(family) => {
            let mut rows = Vec::new();
            for set in &sets {
                for r in ratios(&args.r, set.prime())? {
                    rows.extend(family_rows(family, set, r, &args)?);
                }
            }
            render(fmt, "families", seed, FamilyCount::CSV_HEADER, &rows, |r| vec![r.csv_row()])?
        }
    };
    write_out(args.output.out.as_ref(), &text)
}

fn family_rows(family: Family, set: &PointSet, r: Ratio, args: &CountArgs) -> anyhow::Result<Vec<FamilyCount>> {
    match family {
        Family::TTriangle | Family::PSimplex => {
            let methods = parse_methods(&args.method, &[Method::Brute, Method::GroupSum])?;
            let count = |m| match family {
                Family::TTriangle => count_nondeg_triangles(set, r, m),
                _ => count_nondeg_simplexes(set, r, m),
            };
            let mut rows = Vec::new();
            for m in &methods {
                match count(*m) {
                    Ok(row) => rows.push(row),
                    // With several methods, a nonsquare ratio only rules out the
                    // group sum.
                    Err(e @ Error::NotASquareRatio { .. }) if methods.len() > 1 => {
                        eprintln!("note: {m} skipped: {e}");
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            // The group sum is a certified lower bound, not an exact count.
            if let [exact, bound] = rows.as_slice() {
                if bound.value > exact.value {
                    return Err(Error::MethodMismatch {
                        name: family.to_string(),
                        detail: format!("group-sum bound {} exceeds exact count {}", bound.value, exact.value),
                    }
                    .into());
                }
            }
            Ok(rows)
        }
        Family::LambdaTheta | Family::NTheta | Family::Akl => {
            parse_methods(&args.method, &[Method::GroupSum])?;
            let group = enumerate_orthogonal(set.dim(), set.prime())?;
            let mut rows = Vec::new();
            for theta in group.iter() {
                let sums = lambda_sums(set, r, theta)?;
                let value = match family {
                    Family::LambdaTheta => sums.sum_pow_m,
                    Family::NTheta => sums.n_theta,
                    _ => sums.sum_pow_d,
                };
                let label: Vec<String> = theta.entries().iter().map(|e| e.value().to_string()).collect();
                rows.push(FamilyCount {
                    family,
                    p: set.prime().p(),
                    d: set.dim(),
                    e_size: set.len(),
                    r: r.value().value(),
                    value,
                    method: Method::GroupSum,
                    k: None,
                    theta: Some(label.join(" ")),
                });
            }
            Ok(rows)
        }
        _ => {
            parse_methods(&args.method, &[Method::Brute])?;
            Ok(vec![count_family(set, r, family, args.k)?])
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<()> {
    let claims: Vec<Claim> = if args.claim == "all" {
        Claim::ALL.to_vec()
    } else {
        vec![args.claim.parse().map_err(|e: Error| usage(e.to_string()))?]
    };
    let sets = load_sets(&args.source)?;
    let mut rows: Vec<Verdict> = Vec::new();
    for (i, set) in sets.iter().enumerate() {
        let rs = ratios(&args.r, set.prime())?;
        for &claim in &claims {
            let instance_ratios = if claim.uses_ratio() { rs.clone() } else { rs[..1].to_vec() };
            for r in instance_ratios {
                let mut v = check_claim(claim, set, r, args.k, args.source.seed)?;
                v.params.insert("instance".into(), i.to_string());
                rows.push(v);
            }
        }
    }
    let text = render(args.output.format, "verdicts", args.source.seed, Verdict::CSV_HEADER, &rows, |v| {
        vec![v.csv_row()]
    })?;
    write_out(args.output.out.as_ref(), &text)?;
    let bad = rows.iter().filter(|v| v.is_contradiction()).count();
    if bad > 0 {
        return Err(Contradiction(bad).into());
    }
    Ok(())
}

fn parse_sizes(s: &str) -> anyhow::Result<std::ops::RangeInclusive<usize>> {
    let (a, b) = s.split_once(':').ok_or_else(|| usage(format!("--sizes must be a:b, got {s:?}")))?;
    let a: usize = a.trim().parse().map_err(|_| usage(format!("bad size {a:?}")))?;
    let b: usize = b.trim().parse().map_err(|_| usage(format!("bad size {b:?}")))?;
    if a == 0 || a > b {
        return Err(usage(format!("size range {a}:{b} is empty or starts at 0")));
    }
    Ok(a..=b)
}

fn cmd_scan(args: ScanArgs) -> anyhow::Result<()> {
    let prime = Prime::new(args.p)?;
    let family: Family = args.family.parse().map_err(|e: Error| usage(e.to_string()))?;
    let policy: RatioPolicy = args.r.parse().map_err(|e: Error| usage(e.to_string()))?;
    let sizes = parse_sizes(&args.sizes)?;
    let result = scan_threshold(prime, args.d, family, policy, sizes, args.samples as usize, args.seed)?;
    if let Some(min) = result.empirical_min_size {
        eprintln!(
            "empirical always-positive size {min}; theoretical threshold {}",
            result.theoretical_threshold.map_or("none".into(), |t| t.to_string())
        );
    }
    let text = render(args.output.format, "scan", args.seed, ScanResult::CSV_HEADER, &[result], |r| r.csv_rows())?;
    write_out(args.output.out.as_ref(), &text)
}

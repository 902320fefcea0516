//! `weylmoments`: exact Vinogradov counts, Weyl-sum moments and bound shapes
//! from the command line.

mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use weylmoments::bounds::{self, RegimeInput, SmoothInput, Theorem};
use weylmoments::curvepoints::{self, CurvePreset, SmoothCurve};
use weylmoments::largesieve::{self, MonicPoly, VSequence};
use weylmoments::vinogradov::{self, Budget, JMethod};
use weylmoments::weylsum::{self, PolyCoeffs};
use weylmoments::{Error, Rational};

use report::{big, Format, ReportDocument};

const ENV_WORKERS: &str = "WEYLMOMENTS_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "weylmoments", version, about = "Weyl sums, Vinogradov counts and moment bounds")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Serialize)]
struct Global {
    /// Output format
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for internal parallelism
    #[arg(long, global = true, env = ENV_WORKERS, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=1024))]
    workers: u64,
    /// Enumeration budget in states
    #[arg(long, global = true, default_value_t = Budget::DEFAULT_STATES)]
    budget: u128,
    /// Seed for pseudo-random inputs
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Flat key=value file with default flag values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

fn rational(s: &str) -> Result<Rational, String> {
    s.parse::<Rational>().map_err(|e| e.to_string())
}

fn theorem(s: &str) -> Result<Theorem, String> {
    s.parse::<Theorem>().map_err(|e| e.to_string())
}

fn method(s: &str) -> Result<JMethod, String> {
    s.parse::<JMethod>().map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Cmd {
    /// Exact J_k(x, s) and its main-conjecture ratio
    Jk(JkArgs),
    /// J_k(x, s) ratios over a list of x
    JkScan(JkScanArgs),
    /// A single Weyl sum S_{az}
    Weyl(WeylArgs),
    /// Discrete moments over the twist a <= T, with the Holder reduction
    Moments(MomentArgs),
    /// Improved vs standard moment bound at given (k, x, T, z, q)
    Regime(RegimeArgs),
    /// Major/minor arc classification
    Arcs(ArcArgs),
    /// Sum lemma: exact LHS against the RHS shape
    Sumlemma(SumLemmaArgs),
    /// Variant of the sum lemma over one period
    Varsumlemma(VarSumLemmaArgs),
    /// Smooth-sum moment bounds and the measured LHS for a preset curve
    Smooth(SmoothArgs),
    /// Integer points close to a preset curve and the curve bounds
    Curve(CurveArgs),
    /// Polynomial large-sieve quantity and bound shapes
    Sieve(SieveArgs),
    /// Derived exponents s0, s1, s2, sigma, rho, tau, omega
    Exponents(ExponentArgs),
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Jk(_) => "jk",
            Cmd::JkScan(_) => "jk-scan",
            Cmd::Weyl(_) => "weyl",
            Cmd::Moments(_) => "moments",
            Cmd::Regime(_) => "regime",
            Cmd::Arcs(_) => "arcs",
            Cmd::Sumlemma(_) => "sumlemma",
            Cmd::Varsumlemma(_) => "varsumlemma",
            Cmd::Smooth(_) => "smooth",
            Cmd::Curve(_) => "curve",
            Cmd::Sieve(_) => "sieve",
            Cmd::Exponents(_) => "exponents",
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct JkArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    s: u32,
    #[arg(long)]
    x: u64,
    /// naive, table or mitm
    #[arg(long, default_value = "mitm", value_parser = method)]
    method: JMethod,
}

#[derive(Args, Debug, Serialize)]
struct JkScanArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    s: u32,
    /// Comma-separated list of x
    #[arg(long, value_delimiter = ',', required = true)]
    xs: Vec<u64>,
    #[arg(long, default_value = "mitm", value_parser = method)]
    method: JMethod,
}

#[derive(Args, Debug, Serialize)]
struct WeylArgs {
    /// alpha_1,...,alpha_k as rationals (p/q or decimals)
    #[arg(long, value_delimiter = ',', required = true, value_parser = rational)]
    coeffs: Vec<Rational>,
    #[arg(long, value_parser = rational)]
    x: Rational,
    #[arg(long, default_value_t = 1)]
    a: u64,
    #[arg(long, default_value_t = 1)]
    z: u64,
}

#[derive(Args, Debug, Serialize)]
struct MomentArgs {
    #[arg(long, value_delimiter = ',', required = true, value_parser = rational)]
    coeffs: Vec<Rational>,
    #[arg(long, value_parser = rational)]
    x: Rational,
    #[arg(long)]
    t: u64,
    #[arg(long, default_value_t = 1)]
    z: u64,
    #[arg(long, default_value_t = 1)]
    s: u32,
}

#[derive(Args, Debug, Serialize)]
struct RegimeArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    x: f64,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = 1)]
    z: u64,
    /// Comma-separated list of q
    #[arg(long, value_delimiter = ',', required = true)]
    q: Vec<u64>,
    #[arg(long)]
    w: Option<u64>,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    constant: f64,
}

#[derive(Args, Debug, Serialize)]
struct ArcArgs {
    /// Comma-separated list of alpha
    #[arg(long, value_delimiter = ',', required = true, value_parser = rational)]
    alpha: Vec<Rational>,
    #[arg(long)]
    k: u32,
    #[arg(long, value_parser = rational)]
    x: Rational,
    #[arg(long, value_parser = rational)]
    t: Rational,
    #[arg(long, default_value_t = 1)]
    z: u64,
}

#[derive(Args, Debug, Serialize)]
struct SumLemmaArgs {
    #[arg(long, value_parser = rational)]
    alpha: Rational,
    #[arg(long, value_parser = rational, default_value = "0")]
    beta: Rational,
    /// The cap X
    #[arg(long)]
    cap: f64,
    #[arg(long)]
    from: i128,
    #[arg(long)]
    to: i128,
    #[arg(long)]
    q: u64,
}

#[derive(Args, Debug, Serialize)]
struct VarSumLemmaArgs {
    #[arg(long, value_parser = rational)]
    alpha: Rational,
    #[arg(long, value_parser = rational, default_value = "0")]
    beta: Rational,
    #[arg(long)]
    cap: f64,
    #[arg(long)]
    q: u64,
}

#[derive(Args, Debug, Serialize)]
struct SmoothArgs {
    /// log:t | invpow:B:r | invroot:B:r | poly:c0,c1,...
    #[arg(long)]
    curve: String,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    t: u64,
    #[arg(long, default_value_t = 1)]
    z: u64,
    /// Comma-separated subset of smooth_improved, smooth_standard, heath_brown
    #[arg(long, value_delimiter = ',', value_parser = theorem,
          default_value = "smooth_improved,smooth_standard,heath_brown")]
    theorem: Vec<Theorem>,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    constant: f64,
}

#[derive(Args, Debug, Serialize)]
struct CurveArgs {
    /// log:t | invpow:B:r | invroot:B:r | poly:c0,c1,...
    #[arg(long)]
    curve: String,
    /// Derivative order of the certificate
    #[arg(long)]
    k: u32,
    #[arg(long)]
    n: u64,
    /// Closeness threshold in (0, 1/2]
    #[arg(long)]
    delta: f64,
}

#[derive(Args, Debug, Serialize)]
struct SieveArgs {
    /// Coefficients c_1,...,c_k of the monic P (c_k = 1)
    #[arg(long, value_delimiter = ',', required = true, value_parser = rational)]
    poly: Vec<Rational>,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 0)]
    m: i64,
    /// ones, alternating or random
    #[arg(long, default_value = "ones")]
    v: String,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
}

#[derive(Args, Debug, Serialize)]
struct ExponentArgs {
    /// Comma-separated list of k
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<u32>,
}

enum Failure {
    Usage(String),
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Io(_) => 2,
            Failure::Lib(e) if e.is_resource() => 3,
            Failure::Lib(e) if e.is_violation() => 4,
            Failure::Lib(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Io(m) => f.write_str(m),
            Failure::Lib(e) => write!(f, "{e}"),
        }
    }
}

/// Appends `--key=value` for every config entry whose flag is not already
/// on the command line.
fn apply_config(argv: Vec<OsString>) -> Result<Vec<OsString>, Failure> {
    let mut path = None;
    let mut iter = argv.iter().skip(1);
    while let Some(a) = iter.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = iter.next().map(PathBuf::from);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let text = std::fs::read_to_string(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let given: Vec<String> = argv
        .iter()
        .filter_map(|a| a.to_str())
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    let mut out = argv.clone();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("{}:{}: expected key=value", path.display(), lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if key == "config" || key.is_empty() {
            return Err(Failure::Usage(format!("{}:{}: invalid key {key:?}", path.display(), lineno + 1)));
        }
        if !given.iter().any(|g| g == key) {
            out.push(format!("--{key}={value}").into());
        }
    }
    Ok(out)
}

fn parse_curve(spec: &str) -> Result<CurvePreset, Failure> {
    let bad = || Failure::Usage(format!("bad curve spec {spec:?}"));
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
    let (family, rest) = spec.split_once(':').ok_or_else(bad)?;
    let parts: Vec<&str> = rest.split(':').collect();
    Ok(match (family, parts.as_slice()) {
        ("log", [t]) => CurvePreset::Log { t: num(t)? },
        ("invpow", [b, r]) => CurvePreset::InversePower { b: num(b)?, r: num(r)? },
        ("invroot", [b, r]) => CurvePreset::InverseRoot { b: num(b)?, r: num(r)? },
        ("poly", [cs]) => CurvePreset::Polynomial {
            coeffs: cs
                .split(',')
                .map(|c| c.trim().parse::<Rational>())
                .collect::<Result<_, _>>()?,
        },
        _ => return Err(bad()),
    })
}

fn theorem_row(b: &bounds::BoundValue) -> serde_json::Map<String, Value> {
    let mut row = serde_json::Map::new();
    row.insert("theorem".into(), json!(b.theorem.name()));
    row.insert("value".into(), json!(b.value));
    row.insert("bracket".into(), json!(b.bracket()));
    row.insert("exponent".into(), json!(b.exponent));
    row.insert("applicable".into(), json!(b.applicable));
    for t in &b.bracket_terms {
        row.insert(format!("term[{}]", t.label), json!(t.value));
    }
    row
}

fn execute(cmd: &Cmd, budget: &Budget, seed: u64, doc: &mut ReportDocument) -> Result<(), Failure> {
    match cmd {
        Cmd::Jk(a) => {
            let j = vinogradov::j_exact(a.x, a.s, a.k, a.method, budget)?;
            let r = vinogradov::vmvt_ratio(a.x, a.s, a.k, budget)?;
            doc.push(json!({
                "j": big(j.value), "k": a.k, "s": a.s, "x": a.x, "method": a.method.name(),
                "denominator": r.denominator, "ratio": j.value as f64 / r.denominator,
            }));
        }
        Cmd::JkScan(a) => {
            for &x in &a.xs {
                let j = vinogradov::j_exact(x, a.s, a.k, a.method, budget)?;
                let r = vinogradov::vmvt_ratio(x, a.s, a.k, budget)?;
                doc.push(json!({
                    "j": big(j.value), "k": a.k, "s": a.s, "x": x, "method": a.method.name(),
                    "denominator": r.denominator, "ratio": j.value as f64 / r.denominator,
                }));
            }
        }
        Cmd::Weyl(a) => {
            let p = PolyCoeffs::new(a.coeffs.clone())?;
            let v = weylsum::weyl_sum(&p, &a.x, a.a, a.z)?;
            let oracle = match weylsum::weyl_sum_sq_oracle(&p, &a.x, a.a, a.z) {
                Ok(o) => json!(o),
                Err(Error::SizeGuard(m)) => {
                    doc.note(format!("oracle skipped: {m}"));
                    Value::Null
                }
                Err(e) => return Err(e.into()),
            };
            doc.push(json!({
                "re": v.re, "im": v.im, "magnitude": v.magnitude, "abs_sq": v.magnitude * v.magnitude,
                "oracle_abs_sq": oracle, "length": a.x.floor().max(0).to_string(), "a": a.a, "z": a.z,
            }));
        }
        Cmd::Moments(a) => {
            let p = PolyCoeffs::new(a.coeffs.clone())?;
            let rep = weylsum::discrete_moment(&p, &a.x, a.t, a.z, a.s)?;
            let h = weylsum::holder_check(&rep);
            if !h.holds {
                doc.note("holder reduction failed");
            }
            doc.push(json!({
                "t": a.t, "z": a.z, "s": a.s, "moment_2s": rep.moment_2s, "first_moment": rep.first_moment,
                "trivial_first": rep.trivial_first, "trivial_2s": rep.trivial_2s,
                "holder_lhs": h.lhs, "holder_rhs": h.rhs, "holder_holds": h.holds,
            }));
        }
        Cmd::Regime(a) => {
            let inputs: Vec<RegimeInput> = a
                .q
                .iter()
                .map(|&q| RegimeInput {
                    k: a.k,
                    x: a.x,
                    t: a.t,
                    z: a.z,
                    q,
                    w: a.w,
                    epsilon: a.epsilon,
                    constant: a.constant,
                })
                .collect();
            for rep in bounds::regime_sweep(&inputs) {
                let rep = rep?;
                if !rep.agree {
                    doc.note(format!("q = {}: evaluated argmin differs from the asymptotic prediction", rep.input.q));
                }
                doc.push(json!({
                    "q": rep.input.q, "improved": rep.improved.value, "standard": rep.standard.value,
                    "conjectured": rep.conjectured.value,
                    "second_improved": rep.second_improved.as_ref().map(|b| b.value),
                    "argmin": rep.argmin.name(), "predicted": rep.predicted.name(), "agree": rep.agree,
                    "q_lo": rep.range.q_lo, "q_hi": rep.range.q_hi, "nonempty": rep.range.nonempty,
                    "critical_t": rep.range.critical_t, "sigma": rep.range.sigma,
                }));
            }
        }
        Cmd::Arcs(a) => {
            for alpha in &a.alpha {
                let c = bounds::major_arc_classify(alpha, a.k, &a.x, &a.t, a.z)?;
                doc.push(json!({
                    "alpha": alpha.to_string(), "is_major": c.is_major, "q0": c.q0.to_string(),
                    "witness_u": c.witness.map(|w| w.u.to_string()),
                    "witness_q": c.witness.map(|w| w.q.to_string()),
                    "witness_error": c.witness.map(|w| w.error.to_string()),
                }));
            }
        }
        Cmd::Sumlemma(a) => {
            let s = bounds::sum_lemma_pair(&a.alpha, &a.beta, a.cap, a.from, a.to, a.q)?;
            if !s.certified {
                doc.note("|alpha - u/q| < q^-2 not satisfied by the nearest fraction");
            }
            if s.log_substituted {
                doc.note("ratio uses max(log q, 1)");
            }
            doc.push(lemma_row(&s));
        }
        Cmd::Varsumlemma(a) => {
            let s = bounds::var_sum_lemma_pair(&a.alpha, &a.beta, a.cap, a.q)?;
            if !s.certified {
                doc.note("|alpha - u/q| < 1/(q X) not satisfied by the nearest fraction");
            }
            doc.push(lemma_row(&s));
        }
        Cmd::Smooth(a) => {
            let curve = SmoothCurve::preset(&parse_curve(&a.curve)?, a.k, a.n)?;
            curve.spot_check(a.n)?;
            let cert = curve
                .order_k
                .ok_or_else(|| Error::Certificate("curve has no order-k certificate".into()))?;
            let lhs = curvepoints::smooth_moment_lhs(&curve, a.n, a.t, a.z, budget)?;
            let input = SmoothInput {
                k: a.k,
                n: a.n as f64,
                t: a.t as f64,
                z: a.z,
                a: cert.a,
                lambda: cert.lambda,
                epsilon: a.epsilon,
                constant: a.constant,
            };
            for th in &a.theorem {
                let b = bounds::rhs_smooth(&input, *th)?;
                if !b.bound.applicable {
                    doc.note(format!("{}: {}", th.name(), b.bound.reason));
                }
                let mut row = theorem_row(&b.bound);
                row.insert("lhs".into(), json!(lhs));
                row.insert("ratio".into(), json!(lhs / b.bound.value));
                row.insert("trivial".into(), json!(b.trivial));
                row.insert("nontrivial".into(), json!(b.nontrivial));
                row.insert("a".into(), json!(cert.a));
                row.insert("lambda".into(), json!(cert.lambda));
                for t in &b.thresholds {
                    row.insert(format!("threshold[{}]", t.label), json!(t.value));
                }
                doc.push(Value::Object(row));
            }
        }
        Cmd::Curve(a) => {
            let curve = SmoothCurve::preset(&parse_curve(&a.curve)?, a.k, a.n)?;
            let rep = curvepoints::curve_report(&curve, a.n, a.delta, budget)?;
            for n in &rep.notes {
                doc.note(n.clone());
            }
            let mut row = serde_json::Map::new();
            row.insert("n".into(), json!(rep.n));
            row.insert("delta".into(), json!(rep.delta));
            row.insert("count".into(), json!(rep.count));
            row.insert("ambiguous".into(), json!(rep.ambiguous));
            row.insert("spaced_subset_size".into(), json!(rep.spaced_subset_size));
            row.insert("h_prime".into(), json!(rep.h_prime));
            for (k, v) in &rep.bound_values {
                row.insert(format!("bound[{k}]"), json!(v));
            }
            for (k, v) in &rep.conditions {
                row.insert(format!("condition[{k}]"), json!(v));
            }
            doc.push(Value::Object(row));
        }
        Cmd::Sieve(a) => {
            let p = MonicPoly::from_coeffs(a.poly.clone())?;
            let kind: VSequence = a.v.parse()?;
            let v = largesieve::v_sequence(kind, a.n as usize, seed);
            let rep = largesieve::sieve_report(&p, a.q, &v, a.m, a.epsilon, budget)?;
            if !rep.range_ok {
                doc.note("N outside Q^k <= N <= Q^(2k)");
            }
            if !rep.setting_ok {
                doc.note(rep.details.clone());
            }
            let mut row = serde_json::Map::new();
            row.insert("q".into(), json!(rep.q));
            row.insert("n".into(), json!(rep.n));
            row.insert("m".into(), json!(rep.m));
            row.insert("sigma_p".into(), json!(rep.sigma_p));
            row.insert("v_norm_sq".into(), json!(rep.v_norm_sq));
            row.insert("range_ok".into(), json!(rep.range_ok));
            row.insert("setting_ok".into(), json!(rep.setting_ok));
            for (k, b) in &rep.bounds {
                row.insert(format!("bound[{k}]"), json!(b.full));
                row.insert(format!("core[{k}]"), json!(b.core));
                row.insert(format!("ratio[{k}]"), json!(rep.sigma_p / b.full));
            }
            doc.push(Value::Object(row));
        }
        Cmd::Exponents(a) => {
            for &k in &a.k {
                let e = bounds::exponents(k)?;
                let opt = |r: Option<Rational>| r.map(|r| r.to_string());
                doc.push(json!({
                    "k": e.k, "s0": e.s0, "s1": e.s1, "s2": e.s2, "sigma": opt(e.sigma),
                    "rho": opt(e.rho), "tau": opt(e.tau), "omega": e.omega.to_string(),
                }));
            }
        }
    }
    Ok(())
}

fn lemma_row(s: &bounds::SumLemmaReport) -> Value {
    json!({
        "lhs": s.lhs, "rhs_shape": s.rhs_shape, "ratio": s.ratio, "certified": s.certified,
        "log_substituted": s.log_substituted, "u": s.approx.u.to_string(), "q": s.approx.q.to_string(),
        "approx_error": s.approx.error.to_string(),
    })
}

fn run(argv: Vec<OsString>) -> Result<(), Failure> {
    let argv = apply_config(argv)?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return Ok(());
            }
            return Err(Failure::Usage(e.render().to_string()));
        }
    };
    let g = &cli.global;
    let seed = g.seed.unwrap_or(0);
    let config = json!({
        "subcommand": cli.cmd.name(),
        "format": g.format,
        "output": g.output,
        "workers": g.workers,
        "budget": big(g.budget),
        "seed": seed,
        "config": g.config,
        "parameters": serde_json::to_value(&cli.cmd).map_err(|e| Failure::Io(e.to_string()))?
            .as_object()
            .and_then(|m| m.values().next().cloned())
            .unwrap_or(Value::Null),
    });
    let mut doc = ReportDocument::new(config);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(g.workers as usize)
        .build()
        .map_err(|e| Failure::Io(e.to_string()))?;
    let budget = Budget::new(g.budget);
    pool.install(|| execute(&cli.cmd, &budget, seed, &mut doc))?;
    doc.emit(g.format, g.output.as_deref()).map_err(Failure::Io)
}

fn main() {
    if let Err(f) = run(std::env::args_os().collect()) {
        let msg = f.to_string();
        eprint!("{msg}");
        if !msg.ends_with('\n') {
            eprintln!();
        }
        std::process::exit(f.exit_code());
    }
}

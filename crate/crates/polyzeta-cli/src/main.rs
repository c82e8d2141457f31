//! Command-line pipeline: Newton polyhedron, dual fan, non-degeneracy,
//! candidate poles and numerical zeta validation.
//!
//! Exit codes: 0 success, 1 usage or parse errors, 2 refusal because the
//! non-degeneracy hypothesis fails (override with `--force`).

mod expr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use polyzeta::fan::{dual_fan, regularize, simplicialize, Fan};
use polyzeta::newton::{self, NewtonPolyhedron};
use polyzeta::nondeg::{self, NondegConfig, Overall};
use polyzeta::poles::{self, CandidatePoleSet, Hypothesis, PoleError};
use polyzeta::poly::LaurentPolynomial;
use polyzeta::zetanum::{self, BumpSpec, GridSpec};

#[derive(Parser)]
#[command(
    name = "polyzeta",
    version,
    about = "Candidate poles of complex local zeta functions from Newton polyhedra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Newton polyhedron: vertices, facets, face lattice, remoteness
    Np(RunArgs),
    /// Dual fan with its simplicial and regular refinements
    Fan(RunArgs),
    /// Non-degeneracy verdicts per face
    Nondeg(RunArgs),
    /// Refined candidate-pole list
    Poles(RunArgs),
    /// Quadrature samples of the zeta function, or a holomorphy probe
    Zeta(RunArgs),
    /// Everything: np, fan, nondeg and poles in one report
    Analyze(RunArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Polynomial in x1..xn; parenthesized powers like (x1+x2)^2 expand
    polynomial: String,

    /// Number of variables
    #[arg(short = 'n', value_name = "DIM")]
    n: usize,

    /// Truncation depth K of each pole progression
    #[arg(long, default_value_t = 20)]
    max_k: u32,

    /// Restrict non-degeneracy checks to compact faces (default)
    #[arg(long, overrides_with = "all_faces")]
    compact_only: bool,

    /// Check non-degeneracy on every face of the polyhedron
    #[arg(long)]
    all_faces: bool,

    /// Witness-search seed; falls back to POLYZETA_SEED, then 0
    #[arg(long)]
    seed: Option<u64>,

    /// Randomized witness-search restarts per face
    #[arg(long, default_value_t = 200)]
    attempts: u32,

    /// Witness residual tolerance
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Quadrature grid per variable: RADIALxANGULAR
    #[arg(long, default_value = "64x16")]
    grid: String,

    /// Support radius R of the bump cutoff
    #[arg(long, default_value_t = 1.0)]
    bump_radius: f64,

    /// Smoothness exponent p of the bump (1 - r^2/R^2)^p
    #[arg(long, default_value_t = 1)]
    bump_p: u32,

    /// Emit candidates even when non-degeneracy fails (tagged output)
    #[arg(long)]
    force: bool,

    /// s value for zeta as RE or RE,IM; repeat for several samples
    #[arg(long = "s", value_name = "RE[,IM]", allow_hyphen_values = true)]
    s_values: Vec<String>,

    /// Probe grid stability along the s values instead of sampling
    #[arg(long)]
    probe: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let _ = e.print();
            return 1;
        }
    };
    let (name, args) = match &cli.command {
        Command::Np(a) => ("np", a),
        Command::Fan(a) => ("fan", a),
        Command::Nondeg(a) => ("nondeg", a),
        Command::Poles(a) => ("poles", a),
        Command::Zeta(a) => ("zeta", a),
        Command::Analyze(a) => ("analyze", a),
    };
    match dispatch(name, args) {
        Ok(code) => code,
        Err(Refusal::Message(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Refusal::Degenerate) => 2,
    }
}

/// A refusal carries exit code 2; everything else is a usage error.
enum Refusal {
    Message(String),
    Degenerate,
}

impl From<String> for Refusal {
    fn from(s: String) -> Self {
        Refusal::Message(s)
    }
}

fn dispatch(name: &str, args: &RunArgs) -> Result<i32, Refusal> {
    validate(args, name)?;
    let f = expr::parse_expression(&args.polynomial, args.n).map_err(Refusal::Message)?;
    match name {
        "np" => cmd_np(args, &f),
        "fan" => cmd_fan(args, &f),
        "nondeg" => cmd_nondeg(args, &f),
        "poles" => cmd_poles(args, &f),
        "zeta" => cmd_zeta(args, &f),
        "analyze" => cmd_analyze(args, &f),
        _ => unreachable!(),
    }
}

fn validate(args: &RunArgs, name: &str) -> Result<(), String> {
    if args.n == 0 || args.n > 6 {
        return Err("dimension must be between 1 and 6".into());
    }
    if args.max_k > 10_000 {
        return Err("--max-k must be at most 10000".into());
    }
    if !(args.tol > 0.0 && args.tol <= 1e-2) {
        return Err("--tol must lie in (0, 1e-2]".into());
    }
    if args.attempts == 0 {
        return Err("--attempts must be positive".into());
    }
    if args.bump_radius <= 0.0 {
        return Err("--bump-radius must be positive".into());
    }
    if args.format == Format::Csv && name != "zeta" {
        return Err("--format csv is only available for zeta samples".into());
    }
    parse_grid(&args.grid)?;
    Ok(())
}

fn parse_grid(text: &str) -> Result<GridSpec, String> {
    let (r, a) = text
        .split_once(['x', 'X'])
        .ok_or("grid must look like 64x16")?;
    let radial: usize = r.trim().parse().map_err(|_| "bad radial grid size")?;
    let angular: usize = a.trim().parse().map_err(|_| "bad angular grid size")?;
    GridSpec::new(radial, angular).map_err(|e| e.to_string())
}

fn parse_s(text: &str) -> Result<Complex64, String> {
    let (re, im) = match text.split_once(',') {
        Some((re, im)) => (re, im),
        None => (text, "0"),
    };
    Ok(Complex64::new(
        re.trim()
            .parse()
            .map_err(|_| format!("bad s value: {text}"))?,
        im.trim()
            .parse()
            .map_err(|_| format!("bad s value: {text}"))?,
    ))
}

fn nondeg_config(args: &RunArgs) -> NondegConfig {
    let seed = args.seed.unwrap_or_else(|| {
        std::env::var("POLYZETA_SEED")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(0)
    });
    NondegConfig {
        seed,
        attempts: args.attempts,
        tol: args.tol,
    }
}

fn compact_only(args: &RunArgs) -> bool {
    !args.all_faces
}

fn wrap(command: &str, args: &RunArgs, body: serde_json::Value) -> serde_json::Value {
    let mut obj = json!({
        "schema": 1,
        "command": command,
        "polynomial": args.polynomial,
        "n": args.n,
    });
    obj.as_object_mut()
        .unwrap()
        .extend(body.as_object().unwrap().clone());
    obj
}

// --- np ---

fn np_payload(np: &NewtonPolyhedron) -> serde_json::Value {
    let remoteness = newton::remoteness(np).ok().map(|r| {
        json!({
            "t0": r.t0.to_string(),
            "nu0": r.nu0.to_string(),
            "attaining_normals": r.attaining_normals.iter()
                .map(|u| u.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    });
    json!({ "np": np.to_json(), "remoteness": remoteness })
}

fn print_np_text(np: &NewtonPolyhedron) {
    println!(
        "vertices: {}",
        np.vertices
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    );
    println!("facets:");
    for fa in &np.facets {
        println!(
            "  u = ({})  nu = {}",
            fa.normal
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(","),
            fa.offset
        );
    }
    let compact = np.faces.iter().filter(|f| f.compact).count();
    println!(
        "faces: {} total, {} compact, improper id {}",
        np.faces.len(),
        compact,
        np.improper_face
    );
    match newton::remoteness(np) {
        Ok(r) => println!("remoteness: t0 = {}, nu0 = {}", r.t0, r.nu0),
        Err(_) => println!("remoteness: undefined (no facet with positive offset)"),
    }
}

fn cmd_np(args: &RunArgs, f: &LaurentPolynomial) -> Result<i32, Refusal> {
    let np = newton::newton_polyhedron(f).map_err(|e| Refusal::Message(e.to_string()))?;
    match args.format {
        Format::Json => println!("{}", wrap("np", args, np_payload(&np))),
        _ => print_np_text(&np),
    }
    Ok(0)
}

// --- fan ---

fn fan_payload(np: &NewtonPolyhedron) -> Result<serde_json::Value, String> {
    let fan = dual_fan(np);
    let simp = simplicialize(&fan);
    let reg = regularize(&simp).map_err(|e| e.to_string())?;
    Ok(json!({
        "dual_fan": fan.to_json(),
        "simplicial": simp.to_json(),
        "regular": reg.to_json(),
    }))
}

fn print_fan_text(np: &NewtonPolyhedron) -> Result<(), String> {
    let describe = |label: &str, fan: &Fan| {
        println!(
            "{label}: {} rays, {} max cones{}",
            fan.rays().len(),
            fan.max_cone_ids().len(),
            if fan.is_regular() { " (regular)" } else { "" }
        );
        println!(
            "  rays: {}",
            fan.rays()
                .iter()
                .map(|r| format!(
                    "({})",
                    r.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                ))
                .collect::<Vec<_>>()
                .join(" ")
        );
    };
    let fan = dual_fan(np);
    describe("dual fan", &fan);
    let simp = simplicialize(&fan);
    describe("simplicial refinement", &simp);
    let reg = regularize(&simp).map_err(|e| e.to_string())?;
    describe("regular refinement", &reg);
    Ok(())
}

fn cmd_fan(args: &RunArgs, f: &LaurentPolynomial) -> Result<i32, Refusal> {
    let np = newton::newton_polyhedron(f).map_err(|e| Refusal::Message(e.to_string()))?;
    match args.format {
        Format::Json => println!("{}", wrap("fan", args, fan_payload(&np)?)),
        _ => print_fan_text(&np)?,
    }
    Ok(0)
}

// --- nondeg ---

fn cmd_nondeg(args: &RunArgs, f: &LaurentPolynomial) -> Result<i32, Refusal> {
    let cfg = nondeg_config(args);
    let (np, report) = nondeg::check_polynomial(f, compact_only(args), &cfg)
        .map_err(|e| Refusal::Message(e.to_string()))?;
    match args.format {
        Format::Json => println!(
            "{}",
            wrap("nondeg", args, json!({ "nondeg": report.to_json() }))
        ),
        _ => {
            for v in &report.verdicts {
                let face = &np.faces[v.face];
                let status = match &v.status {
                    nondeg::VerdictStatus::NonDegenerate => "non-degenerate (exact)".to_string(),
                    nondeg::VerdictStatus::Degenerate { witness, residual } => format!(
                        "DEGENERATE  witness {}  residual {residual:.2e}",
                        witness
                            .iter()
                            .map(|z| format!("{:.6}{:+.6}i", z.re, z.im))
                            .collect::<Vec<_>>()
                            .join(" ")
                    ),
                    nondeg::VerdictStatus::Unknown { attempts, .. } => {
                        format!("unknown after {attempts} attempts")
                    }
                };
                println!(
                    "face {} (dim {}, {}): {}",
                    v.face,
                    v.dim,
                    if face.compact { "compact" } else { "non-compact" },
                    status
                );
            }
            let overall = match report.overall {
                Overall::NonDegenerate => "non-degenerate",
                Overall::Degenerate => "degenerate",
                Overall::Inconclusive => "inconclusive",
            };
            println!("overall: {overall}");
        }
    }
    Ok(if report.overall == Overall::Degenerate {
        2
    } else {
        0
    })
}

// --- poles ---

fn poles_set(args: &RunArgs, f: &LaurentPolynomial) -> Result<CandidatePoleSet, Refusal> {
    let cfg = nondeg_config(args);
    match poles::candidate_poles(f, args.max_k, compact_only(args), &cfg) {
        Ok(set) => Ok(set),
        Err(PoleError::DegenerateInput { face, dim }) if args.force => {
            let set = poles::candidate_poles_forced(f, args.max_k, compact_only(args), &cfg)
                .map_err(|e| Refusal::Message(e.to_string()))?;
            eprintln!(
                "warning: degenerate face {face} (dim {dim}); emitting hypothesis-unverified candidates"
            );
            Ok(set)
        }
        Err(e @ PoleError::DegenerateInput { .. }) => {
            eprintln!("refused: {e}");
            Err(Refusal::Degenerate)
        }
        Err(e) => Err(Refusal::Message(e.to_string())),
    }
}

fn print_poles_text(set: &CandidatePoleSet) {
    println!(
        "holomorphy: Z is holomorphic for Re(s) > {}",
        set.holomorphy_bound
    );
    println!(
        "remoteness: nu0 = {} (t0 = {})",
        set.remoteness.nu0, set.remoteness.t0
    );
    println!(
        "hypothesis: {}",
        match set.hypothesis {
            Hypothesis::Verified => "verified non-degenerate",
            Hypothesis::Inconclusive => "inconclusive (some faces undecided)",
            Hypothesis::Unverified => "UNVERIFIED (degenerate input, forced)",
        }
    );
    println!("candidates (K = {}):", set.k_max);
    for e in &set.entries {
        let sources = e
            .sources
            .iter()
            .map(|s| match s {
                poles::PoleSource::Normal(u) => format!(
                    "({})",
                    u.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                ),
                poles::PoleSource::HalfIntegers => "half-integers".to_string(),
            })
            .collect::<Vec<_>>()
            .join(", ");
        println!(
            "  {:>8}   order <= {}   from {}",
            e.value.to_string(),
            e.order_bound,
            sources
        );
    }
    println!("note: {}", set.caveat);
}

fn cmd_poles(args: &RunArgs, f: &LaurentPolynomial) -> Result<i32, Refusal> {
    let set = poles_set(args, f)?;
    match args.format {
        Format::Json => println!("{}", wrap("poles", args, json!({ "poles": set.to_json() }))),
        _ => print_poles_text(&set),
    }
    Ok(0)
}

// --- zeta ---

fn cmd_zeta(args: &RunArgs, f: &LaurentPolynomial) -> Result<i32, Refusal> {
    let grid = parse_grid(&args.grid)?;
    let bump = BumpSpec::new(args.bump_radius, args.bump_p)
        .map_err(|e| Refusal::Message(e.to_string()))?;
    let s_values: Vec<Complex64> = if args.s_values.is_empty() {
        vec![Complex64::new(1.0, 0.0)]
    } else {
        args.s_values
            .iter()
            .map(|t| parse_s(t))
            .collect::<Result<_, String>>()?
    };

    if args.probe {
        let report = zetanum::holomorphy_probe(f, &bump, &s_values, grid)
            .map_err(|e| Refusal::Message(e.to_string()))?;
        match args.format {
            Format::Json => println!(
                "{}",
                wrap("zeta", args, json!({ "probe": report.to_json() }))
            ),
            _ => {
                println!("holomorphy bound: {}", report.holomorphy_bound);
                for e in &report.entries {
                    println!(
                        "Re(s) = {:>7.3}: rel change {:>7.3}% -> {}{}",
                        e.s.re,
                        e.rel_change * 100.0,
                        if e.stable { "stable" } else { "UNSTABLE" },
                        if e.within_guarantee {
                            ""
                        } else {
                            " (outside guarantee)"
                        },
                    );
                }
                if !report.violations().is_empty() {
                    println!("VIOLATION: instability inside the guaranteed half-plane");
                }
            }
        }
        return Ok(0);
    }

    let mut samples = Vec::new();
    for s in s_values {
        samples.push(
            zetanum::zeta_quadrature(f, &bump, s, grid)
                .map_err(|e| Refusal::Message(e.to_string()))?,
        );
    }
    match args.format {
        Format::Json => println!(
            "{}",
            wrap(
                "zeta",
                args,
                json!({ "samples": samples.iter().map(|s| s.to_json()).collect::<Vec<_>>() })
            )
        ),
        Format::Csv => {
            println!("{}", zetanum::ZetaSample::CSV_HEADER);
            for s in &samples {
                println!("{}", s.to_csv_row());
            }
        }
        Format::Text => {
            for s in &samples {
                println!(
                    "Z({}{:+}i) = {:.9}{:+.9}i   (est err {:.2e}, grid {}x{})",
                    s.s.re,
                    s.s.im,
                    s.value.re,
                    s.value.im,
                    s.est_error,
                    s.grid.radial,
                    s.grid.angular
                );
            }
        }
    }
    Ok(0)
}

// --- analyze ---

fn cmd_analyze(args: &RunArgs, f: &LaurentPolynomial) -> Result<i32, Refusal> {
    let np = newton::newton_polyhedron(f).map_err(|e| Refusal::Message(e.to_string()))?;
    let cfg = nondeg_config(args);
    let report = nondeg::check_all(f, &np, compact_only(args), &cfg);
    let set = poles_set(args, f)?;
    match args.format {
        Format::Json => {
            let mut body = serde_json::Map::new();
            body.extend(np_payload(&np).as_object().unwrap().clone());
            body.extend(fan_payload(&np)?.as_object().unwrap().clone());
            body.insert("nondeg".into(), report.to_json());
            body.insert("poles".into(), set.to_json());
            println!("{}", wrap("analyze", args, serde_json::Value::Object(body)));
        }
        _ => {
            println!("== newton polyhedron ==");
            print_np_text(&np);
            println!("== fans ==");
            print_fan_text(&np)?;
            println!("== non-degeneracy ==");
            let overall = match report.overall {
                Overall::NonDegenerate => "non-degenerate",
                Overall::Degenerate => "degenerate",
                Overall::Inconclusive => "inconclusive",
            };
            println!("overall: {overall}");
            println!("== candidate poles ==");
            print_poles_text(&set);
        }
    }
    Ok(0)
}

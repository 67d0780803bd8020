use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use ishida_core::homology::{cohomology_table, verify_phi_transfer, verify_vanishing, ComputeOptions, Regime, Report, Verdict};
use ishida_core::ishida::{build_ishida, CochainComplex};
use ishida_core::kcomplex::verify_kcomplex;
use ishida_core::linalg::LatticeVector;
use ishida_core::polyhedral::io::{load_fan, save_fan, FanFile};
use ishida_core::polyhedral::{
    complete_from_convex, gamma_pi, graph_fans, hirzebruch_fan, product_fan, projective_space_fan, star_removal, Cone, Fan,
};
use ishida_core::random::fuzz;
use ishida_core::Error;

/// Exit code for unreadable input, bad arguments and other usage errors.
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "ishida", version, about = "Ishida complexes of rational fans")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the fan axioms for a fan file.
    Validate { file: PathBuf },
    /// Print H^q(Δ, Λ^p) for a fan file.
    Cohomology(CohomologyArgs),
    /// Write a fan file for a standard construction to stdout.
    Build {
        #[command(subcommand)]
        builder: Builder,
    },
    /// Check a vanishing theorem on a fan.
    Verify(VerifyArgs),
    /// Check invariants on seeded random simplicial fans.
    Fuzz {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: u64,
        #[arg(long, default_value_t = 2)]
        rank: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args)]
struct CohomologyArgs {
    file: PathBuf,
    /// Degrees p: a single value, a list `0,2`, or a range `0..2` (inclusive).
    #[arg(long = "p")]
    p: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Assemble Betti numbers even for non-simplicial fans.
    #[arg(long)]
    force: bool,
    /// Also write the cochain complexes as JSON to this path.
    #[arg(long, value_name = "PATH")]
    emit_complex: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Builder {
    /// Fan of projective space P^r.
    Pr { r: usize },
    /// Hirzebruch surface F_a.
    Hirzebruch { a: i64 },
    /// Product of two fans.
    Product { first: PathBuf, second: PathBuf },
    /// All faces of one cone, rays given as `1,0;1,2`.
    Gamma {
        #[arg(long, allow_hyphen_values = true)]
        rays: String,
    },
    /// Graph fans over a complete simplicial base; writes three files.
    Graph {
        #[arg(long)]
        base: PathBuf,
        /// Values of the piecewise-linear function on the base rays, in file order.
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Completion of a fan with convex support by one extra ray.
    CompleteFromConvex { file: PathBuf },
    /// Remove the star of a ray.
    StarRemoval {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        rho: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Theorem {
    #[value(name = "prop2.1")]
    Prop21,
    #[value(name = "prop4.1")]
    Prop41,
    #[value(name = "prop4.1-kcomplex")]
    Prop41K,
    #[value(name = "thm4.2")]
    Thm42,
    #[value(name = "cor4.4")]
    Cor44,
    #[value(name = "lem4.3")]
    Lem43,
}

#[derive(Args)]
struct VerifyArgs {
    /// Fan file; for thm4.2 the complete fan, for lem4.3 the base fan.
    file: Option<PathBuf>,
    /// Builder instead of a file: `pr:R`, `hirzebruch:A`, `product:SPEC*SPEC`.
    #[arg(long, conflicts_with = "file")]
    build: Option<String>,
    #[arg(long, value_enum)]
    theorem: Theorem,
    /// Ray whose star is removed (thm4.2).
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<String>,
    /// Ray values of the piecewise-linear function (lem4.3); defaults to 0.
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

fn threads() -> usize {
    match std::env::var("ISHIDA_THREADS") {
        Ok(v) => v.trim().parse().unwrap_or(0),
        Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
    }
}

fn read_fan(path: &Path) -> Result<Fan> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    load_fan(&text).with_context(|| format!("{}", path.display()))
}

fn parse_ints(text: &str) -> Result<Vec<BigInt>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<BigInt>().map_err(|_| anyhow!("not an integer: {s:?}")))
        .collect()
}

fn parse_degrees(spec: Option<&str>, rank: usize) -> Result<Vec<usize>> {
    let Some(spec) = spec else { return Ok((0..=rank).collect()) };
    let spec = spec.trim();
    let ps: Vec<usize> = if let Some((a, b)) = spec.split_once("..") {
        let b = b.trim_start_matches('=');
        let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
        (a..=b).collect()
    } else {
        spec.split(',').map(|s| s.trim().parse::<usize>()).collect::<std::result::Result<_, _>>()?
    };
    if let Some(p) = ps.iter().find(|&&p| p > rank) {
        bail!("p = {p} is outside 0..={rank}");
    }
    Ok(ps)
}

fn build_spec(spec: &str) -> Result<Fan> {
    if let Some(rest) = spec.strip_prefix("product:") {
        let (a, b) = rest.split_once('*').ok_or_else(|| anyhow!("product needs SPEC*SPEC"))?;
        return Ok(product_fan(&build_spec(a)?, &build_spec(b)?));
    }
    let (name, arg) = spec.split_once(':').ok_or_else(|| anyhow!("builder spec must look like NAME:ARG, got {spec:?}"))?;
    match name {
        "pr" => Ok(projective_space_fan(arg.parse()?)),
        "hirzebruch" => Ok(hirzebruch_fan(arg.parse()?)),
        _ => bail!("unknown builder {name:?}"),
    }
}

fn ray_index(fan: &Fan, text: &str) -> std::result::Result<usize, String> {
    let v = parse_ints(text).map_err(|e| e.to_string())?;
    if v.len() != fan.rank() {
        return Err(format!("ray {text} has {} entries, fan rank is {}", v.len(), fan.rank()));
    }
    let v = ishida_core::linalg::primitive(&LatticeVector(v)).map_err(|e| e.to_string())?;
    fan.ray_cone(&v).ok_or_else(|| format!("{v} is not a ray of the fan"))
}

fn cmd_validate(file: &Path) -> Result<ExitCode> {
    let text = fs::read_to_string(file).with_context(|| format!("cannot read {}", file.display()))?;
    match load_fan(&text) {
        Ok(fan) => {
            println!("valid: {}", fan.summary());
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            println!("invalid: {e}");
            Ok(ExitCode::from(1))
        }
    }
}

fn complex_dump(fan: &Fan, ps: &[usize]) -> Result<String> {
    let complexes: Vec<serde_json::Value> =
        ps.iter().map(|&p| build_ishida(fan, p).map(|cx: CochainComplex| cx.to_json(fan))).collect::<std::result::Result<_, _>>()?;
    let dump = serde_json::json!({ "fan": serde_json::to_value(FanFile::from_fan(fan))?, "complexes": complexes });
    Ok(serde_json::to_string_pretty(&dump)? + "\n")
}

fn cmd_cohomology(args: &CohomologyArgs) -> Result<ExitCode> {
    let fan = read_fan(&args.file)?;
    let ps = parse_degrees(args.p.as_deref(), fan.rank())?;
    let opts = ComputeOptions { threads: threads(), ..Default::default() };
    let table = cohomology_table(&fan, &ps, args.force, opts)?;
    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&table.to_json())?),
        Format::Table => print!("{}", table.render()),
    }
    if let Some(path) = &args.emit_complex {
        fs::write(path, complex_dump(&fan, &ps)?).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_build(builder: &Builder) -> Result<ExitCode> {
    let fan = match builder {
        Builder::Pr { r } => projective_space_fan(*r),
        Builder::Hirzebruch { a } => hirzebruch_fan(*a),
        Builder::Product { first, second } => product_fan(&read_fan(first)?, &read_fan(second)?),
        Builder::Gamma { rays } => {
            let gens: Vec<LatticeVector> = rays.split(';').map(|r| parse_ints(r).map(LatticeVector)).collect::<Result<_>>()?;
            let rank = gens.first().map_or(0, LatticeVector::len);
            gamma_pi(&Cone::new(rank, &gens)?)
        }
        Builder::Graph { base, eta, out_dir } => {
            let base = read_fan(base)?;
            let graphs = graph_fans(&base, &parse_ints(eta)?)?;
            fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
            for (name, fan) in [("phi_tilde.json", &graphs.phi_tilde), ("phi.json", &graphs.phi), ("phi_flat.json", &graphs.phi_flat)] {
                let path = out_dir.join(name);
                fs::write(&path, save_fan(fan)).with_context(|| format!("cannot write {}", path.display()))?;
                println!("{}", path.display());
            }
            return Ok(ExitCode::SUCCESS);
        }
        Builder::CompleteFromConvex { file } => {
            let completion = complete_from_convex(&read_fan(file)?)?;
            eprintln!("added ray {}", completion.n_circ);
            completion.tilde
        }
        Builder::StarRemoval { file, rho } => {
            let fan = read_fan(file)?;
            let idx = ray_index(&fan, rho).map_err(|e| anyhow!(e))?;
            star_removal(&fan, idx)?
        }
    };
    print!("{}", save_fan(&fan));
    Ok(ExitCode::SUCCESS)
}

fn hypothesis_report(theorem: &str, regime: &str, reason: String) -> Report {
    Report {
        theorem: theorem.into(),
        regime: regime.into(),
        verdict: Verdict::HypothesisViolation,
        reason: Some(reason),
        checks: Vec::new(),
        table: None,
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode> {
    let fan = match (&args.file, &args.build) {
        (Some(f), None) => read_fan(f)?,
        (None, Some(spec)) => build_spec(spec)?,
        _ => bail!("give either a fan file or --build"),
    };
    let opts = ComputeOptions { threads: threads(), inject_fault: args.inject_fault };
    let report = match args.theorem {
        Theorem::Prop21 => verify_vanishing(&fan, &Regime::Cone, opts),
        Theorem::Prop41 => verify_vanishing(&fan, &Regime::CompleteSimplicial, opts),
        Theorem::Cor44 => verify_vanishing(&fan, &Regime::ConvexSupport, opts),
        Theorem::Prop41K => verify_kcomplex(&fan, opts),
        Theorem::Thm42 => {
            let rho = args.rho.as_deref().ok_or_else(|| anyhow!("thm4.2 needs --rho"))?;
            match ray_index(&fan, rho) {
                Ok(idx) => match star_removal(&fan, idx) {
                    Ok(delta) => verify_vanishing(&delta, &Regime::StarRemoval { tilde: fan, rho: idx }, opts),
                    Err(e) => hypothesis_report("thm4.2", "star-removal", e.to_string()),
                },
                Err(e) => hypothesis_report("thm4.2", "star-removal", e),
            }
        }
        Theorem::Lem43 => {
            let eta = match &args.eta {
                Some(text) => parse_ints(text)?,
                None => vec![BigInt::from(0); fan.rays().len()],
            };
            verify_phi_transfer(&fan, &eta, opts)
        }
    };
    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report.to_json())?),
        Format::Table => print!("{}", report.render()),
    }
    Ok(ExitCode::from(report.verdict.exit_code() as u8))
}

fn cmd_fuzz(seed: u64, count: u64, rank: usize) -> Result<ExitCode> {
    let cases = fuzz(seed, count, rank)?;
    let failed: Vec<_> = cases.iter().filter(|c| !c.failures.is_empty()).collect();
    for c in &failed {
        println!("case {} (reproduce with --seed {seed} --count {}):", c.index, c.index + 1);
        for f in &c.failures {
            println!("  {f}");
        }
        print!("{}", save_fan(&c.fan));
    }
    println!("fuzz: seed {seed}, rank {rank}, {} fans, {} failing", cases.len(), failed.len());
    Ok(if failed.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INPUT) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Validate { file } => cmd_validate(file),
        Command::Cohomology(args) => cmd_cohomology(args),
        Command::Build { builder } => cmd_build(builder),
        Command::Verify(args) => cmd_verify(args),
        Command::Fuzz { seed, count, rank } => cmd_fuzz(*seed, *count, *rank),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::Hypothesis(_)) => ExitCode::from(2),
                _ => ExitCode::from(EXIT_INPUT),
            }
        }
    }
}

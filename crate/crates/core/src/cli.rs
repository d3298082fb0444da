//! Command-line front end.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::cg_engine::relprime_transfer;
use crate::error::Error;
use crate::ff_algebra::is_odd_prime;
use crate::gilmer::{
    check_certificate, check_transfer, subspace_count, verify_genus_bound, wrap_transfer, Certificate,
    CheckReport, InvariantSubspace, ObstructionContext, TransferCertificate, Variant, VerifyOptions,
    WitnessMethod, CERTIFICATE_SCHEMA, DEFAULT_BUDGET, TRANSFER_SCHEMA,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_NOT_OBSTRUCTED: i32 = 4;
pub const EXIT_BAD_CERTIFICATE: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "cgslice", version, about = "Casson-Gordon slice genus certificates")]
pub struct RunConfig {
    #[command(subcommand)]
    pub mode: Mode,
}

#[derive(Debug, Subcommand)]
pub enum Mode {
    /// Certify g4(K # -K^r) > g for the infected Levine knot.
    Verify(VerifyArgs),
    /// Re-check a certificate or transfer certificate file.
    Check { file: PathBuf },
    /// Count invariant subspaces of the target rank.
    Count(CountArgs),
    /// Certify the bound for the (m,1)-cable of K.
    Transfer(TransferArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    pub g: u32,
    #[arg(long, default_value_t = 0)]
    pub c: u32,
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long, default_value = "certificate.json")]
    pub out: PathBuf,
    #[arg(long = "strategy", value_delimiter = ',', default_value = "constructive,brute-force")]
    pub strategies: Vec<String>,
    #[arg(long, default_value = "closed-form")]
    pub formula: String,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long, default_value = "mirror-reverse")]
    pub variant: Variant,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CountArgs {
    #[arg(long, conflicts_with = "dims", required_unless_present = "dims")]
    pub p: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub g: u32,
    #[arg(long)]
    pub q: Option<u32>,
    /// Eigenspace dimensions, e.g. 2,2 (requires --rank and --q).
    #[arg(long, value_delimiter = ',', requires_all = ["rank", "q"])]
    pub dims: Option<Vec<usize>>,
    #[arg(long)]
    pub rank: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct TransferArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub m: i64,
    /// Cover order; defaults to the least odd prime not dividing m.
    #[arg(long)]
    pub p: Option<u32>,
    #[command(flatten)]
    pub search: SearchArgs,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        _ => EXIT_INVALID,
    }
}

fn fail(e: &Error) -> i32 {
    eprintln!("error: {e}");
    exit_code(e)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), i32> {
    fs::write(path, bytes).map_err(|e| {
        eprintln!("error: cannot write {}: {e}", path.display());
        EXIT_IO
    })
}

/// Least odd prime not dividing `m`.
pub fn auto_prime(m: i64) -> u32 {
    (3u32..)
        .step_by(2)
        .find(|&p| is_odd_prime(p as u64) && !m.unsigned_abs().is_multiple_of(p as u64))
        .expect("some odd prime does not divide m")
}

fn options(search: &SearchArgs, variant: Variant, m: i64) -> VerifyOptions {
    VerifyOptions {
        q: search.q,
        variant,
        budget: search.budget,
        strategies: search.strategies.clone(),
        formula: search.formula.clone(),
        m,
        sigmas: None,
    }
}

pub fn run(config: RunConfig) -> i32 {
    match config.mode {
        Mode::Verify(args) => run_verify(&args),
        Mode::Check { file } => run_check(&file),
        Mode::Count(args) => run_count(&args),
        Mode::Transfer(args) => run_transfer(&args),
    }
}

fn run_verify(args: &VerifyArgs) -> i32 {
    let s = &args.search;
    let cert = match verify_genus_bound(args.p, s.g, s.c, &options(s, args.variant, 1)) {
        Ok(cert) => cert,
        Err(e) => return fail(&e),
    };
    if let Err(code) = write_file(&s.out, &cert.to_json()) {
        return code;
    }
    print!("{}", emit_summary(&cert));
    println!("certificate written to {}", s.out.display());
    if cert.is_obstructed() {
        EXIT_OK
    } else {
        EXIT_NOT_OBSTRUCTED
    }
}

fn run_transfer(args: &TransferArgs) -> i32 {
    if args.m == 0 {
        return fail(&Error::InvalidParameter("winding number m must be nonzero".into()));
    }
    let p = args.p.unwrap_or_else(|| auto_prime(args.m));
    if let Err(e) = relprime_transfer(args.m, p, &Default::default()) {
        return fail(&e);
    }
    let s = &args.search;
    let cert = match verify_genus_bound(p, s.g, s.c, &options(s, Variant::MirrorReverse, args.m)) {
        Ok(cert) => cert,
        Err(e) => return fail(&e),
    };
    print!("{}", emit_summary(&cert));
    if !cert.is_obstructed() {
        if let Err(code) = write_file(&s.out, &cert.to_json()) {
            return code;
        }
        return EXIT_NOT_OBSTRUCTED;
    }
    let wrapped = match wrap_transfer(cert, args.m) {
        Ok(t) => t,
        Err(e) => return fail(&e),
    };
    if let Err(code) = write_file(&s.out, &wrapped.to_json()) {
        return code;
    }
    let t = &wrapped.transfer;
    println!(
        "transfer: pattern {} with m = {}, p = {}, gcd {}; {} witness values carried over",
        t.pattern, t.m, t.p, t.gcd, t.transferred_values
    );
    println!("conclusion: {}", t.conclusion);
    println!("certificate written to {}", s.out.display());
    EXIT_OK
}

fn run_check(file: &Path) -> i32 {
    let bytes = match fs::read(file) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", file.display());
            return EXIT_IO;
        }
    };
    let report = match parse_and_check(&bytes) {
        Ok(r) => r,
        Err(msg) => CheckReport {
            valid: false,
            diagnoses: vec![msg],
        },
    };
    if report.valid {
        println!("valid");
        EXIT_OK
    } else {
        println!("invalid");
        for d in &report.diagnoses {
            println!("  {d}");
        }
        EXIT_BAD_CERTIFICATE
    }
}

fn parse_and_check(bytes: &[u8]) -> Result<CheckReport, String> {
    let value: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| format!("not JSON: {e}"))?;
    match value.get("schema").and_then(|s| s.as_str()) {
        Some(CERTIFICATE_SCHEMA) => {
            let cert: Certificate =
                serde_json::from_value(value).map_err(|e| format!("malformed certificate: {e}"))?;
            Ok(check_certificate(&cert))
        }
        Some(TRANSFER_SCHEMA) => {
            let cert: TransferCertificate =
                serde_json::from_value(value).map_err(|e| format!("malformed transfer certificate: {e}"))?;
            Ok(check_transfer(&cert))
        }
        other => Err(format!("unknown schema {other:?}")),
    }
}

fn run_count(args: &CountArgs) -> i32 {
    let count = if let Some(dims) = &args.dims {
        let (rank, q) = (args.rank.expect("clap requires rank"), args.q.expect("clap requires q"));
        if rank > dims.iter().sum() {
            return fail(&Error::RankOutOfRange {
                rank,
                dim: dims.iter().sum(),
            });
        }
        subspace_count(dims, rank, q)
    } else {
        let p = args.p.expect("clap requires p");
        let opts = VerifyOptions {
            q: args.q,
            ..VerifyOptions::default()
        };
        match ObstructionContext::build(p, args.g, 0, &opts) {
            Ok(ctx) => subspace_count(&ctx.decomposition.dims(), ctx.rank, ctx.q),
            Err(e) => return fail(&e),
        }
    };
    println!("{count}");
    EXIT_OK
}

fn format_subspace(h: &InvariantSubspace) -> String {
    let mut s = String::new();
    for part in &h.per_eigen {
        let _ = write!(s, "  B_{} (eigenvalue {}):", part.eigen, part.eigenvalue);
        if part.rows.is_empty() {
            s.push_str(" 0\n");
            continue;
        }
        s.push('\n');
        for row in &part.rows {
            let _ = writeln!(s, "    {row:?}");
        }
    }
    s
}

fn sigma_line(name: &str, p: u32, sigma: i64, bound: i64) -> String {
    let p = p as i64;
    let margin = p * sigma - bound;
    let tight = p * (sigma - 2) <= bound;
    format!(
        "{name} = {sigma}: {p}*{sigma} = {} > {bound} (margin {margin}); {name} - 2 gives {} {} {bound}{}\n",
        p * sigma,
        p * (sigma - 2),
        if tight { "<=" } else { ">" },
        if tight { " (tight)" } else { "" },
    )
}

/// Human-readable report of a certificate.
pub fn emit_summary(cert: &Certificate) -> String {
    let par = &cert.parameters;
    let mut s = String::new();
    let knot = match par.variant {
        Variant::MirrorReverse => "K # -K^r",
        Variant::MirrorOnly => "K # -K (control)",
    };
    let _ = writeln!(s, "knot: {knot}, K = #^{} J_{}", par.g + 1, par.g);
    let _ = writeln!(s, "p = {}, q = {}, g = {}, c = {}, m = {}", par.p, par.q, par.g, par.c, par.m);
    let eig: Vec<String> = cert
        .eigenvalues
        .iter()
        .map(|e| format!("a_{} = {} (dim {})", e.index, e.value, e.dim))
        .collect();
    let _ = writeln!(s, "eigenvalues: {}", eig.join(", "));
    s.push_str(&sigma_line("sigma_A", par.p, par.sigma_a, par.bound_a));
    s.push_str(&sigma_line("sigma_B", par.p, par.sigma_b, par.bound_b));
    let _ = writeln!(
        s,
        "target rank {}, threshold {} (root sum {}), formula {}",
        par.target_rank, par.threshold, par.root_sum, par.formula
    );
    let constructive = cert
        .witnesses
        .iter()
        .filter(|w| w.method == WitnessMethod::Constructive)
        .count();
    let _ = writeln!(
        s,
        "invariant subspaces: {}, witnessed: {} (constructive {}, brute force {})",
        cert.subspace_count,
        cert.witnesses.len(),
        constructive,
        cert.witnesses.len() - constructive
    );
    if cert.is_obstructed() {
        let _ = writeln!(s, "verdict: obstructed");
        let _ = writeln!(s, "conclusion: g4 > {} for {knot}, so g4 >= {}", par.g, par.g + 1);
    } else {
        let _ = writeln!(s, "verdict: not_obstructed ({} subspaces unwitnessed)", cert.unwitnessed.len());
        if let Some(h) = cert.counterexample() {
            let _ = writeln!(s, "counterexample subspace:");
            s.push_str(&format_subspace(h));
        }
        let _ = writeln!(s, "conclusion: no bound on g4 beyond g4 >= 0 from these characters");
    }
    s
}

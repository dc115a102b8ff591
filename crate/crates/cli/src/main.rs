//! `sqw` — batch front end for exact Schrödinger-algebra computations.
//!
//! Exit codes: 0 on success, 1 on a mathematical error (for example a zero
//! Whittaker type where an adapted basis is required), 2 on usage or parse
//! errors. All errors go to stderr as single-line records
//! `ERROR <code>: <message>`.

use sqw_cli::{output, parser, verify};

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sqw_cli::verify::Suite;
use serde_json::{json, Value};

use sqw_core::rat::Rat;
use sqw_core::structure::{cyclic_reduction, FactoredPoly, FiniteQW, QuotElem};
use sqw_core::whittaker::{act, qw_vector_basis, ModElem, WhittakerType};

use output::{
    component_to_json, fin_to_text, mod_to_json, quot_to_json, quot_to_text, series_to_json,
    uea_to_json, witness_to_json, Envelope, JsonTerm,
};

#[derive(Parser)]
#[command(name = "sqw", version, about = "Exact computations in the Schrödinger algebra and its quasi-Whittaker modules")]
struct Cli {
    /// Output format for results on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Degree truncation for closure-based verifications.
    #[arg(long, global = true, default_value_t = 6)]
    trunc: u32,
    /// Seed for the randomized verification suites.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Also write the JSON envelope to this path.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Rewrite an expression into the sorted-monomial canonical form.
    Normalize {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Act by an expression on a module element (default: the cyclic vector).
    Act {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        phi_p: RatArg,
        #[arg(long, allow_hyphen_values = true)]
        phi_q: RatArg,
        /// Module element as JSON `[{"monomial":[i,j,k],"coeff":"n/d"},…]`.
        #[arg(long)]
        on: Option<String>,
    },
    /// Exact basis of the quasi-Whittaker vectors up to a degree.
    Qwvectors {
        #[arg(long, allow_hyphen_values = true)]
        phi_p: RatArg,
        #[arg(long, allow_hyphen_values = true)]
        phi_q: RatArg,
        #[arg(long)]
        degree: u32,
    },
    /// Composition series of the finite quotient by d(C0)·w.
    Series {
        #[arg(long, allow_hyphen_values = true)]
        phi_p: RatArg,
        #[arg(long, allow_hyphen_values = true)]
        phi_q: RatArg,
        /// Factored polynomial as `root:mult,root:mult,…`.
        #[arg(long, allow_hyphen_values = true)]
        d: String,
    },
    /// Direct-sum decomposition of the finite quotient along its roots.
    Decompose {
        #[arg(long, allow_hyphen_values = true)]
        phi_p: RatArg,
        #[arg(long, allow_hyphen_values = true)]
        phi_q: RatArg,
        #[arg(long, allow_hyphen_values = true)]
        d: String,
    },
    /// Does the expression annihilate the cyclic vector of the quotient?
    Annihilates {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        phi_p: RatArg,
        #[arg(long, allow_hyphen_values = true)]
        phi_q: RatArg,
        #[arg(long, allow_hyphen_values = true)]
        d: String,
    },
    /// Reduce a simple-quotient element to the cyclic line; emits the witness.
    Reduce {
        /// Element as JSON `[{"monomial":[i,j],"coeff":"n/d"},…]`.
        #[arg(allow_hyphen_values = true)]
        element: String,
        #[arg(long, allow_hyphen_values = true)]
        phi_p: RatArg,
        #[arg(long, allow_hyphen_values = true)]
        phi_q: RatArg,
        #[arg(long, allow_hyphen_values = true)]
        xi: RatArg,
    },
    /// Run the verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
}

/// Exact rational CLI argument, `numer` or `numer/denom`.
#[derive(Clone)]
struct RatArg(Rat);

impl std::str::FromStr for RatArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rat::parse_fraction(s)
            .map(RatArg)
            .ok_or_else(|| format!("expected an exact rational like 2, -3/4; got {s:?}"))
    }
}

struct CliError {
    code: String,
    message: String,
    exit: u8,
}

impl CliError {
    fn math(e: sqw_core::Error) -> Self {
        CliError { code: e.code().to_string(), message: e.to_string(), exit: 1 }
    }

    fn parse(e: parser::ParseError) -> Self {
        CliError { code: e.code().to_string(), message: e.to_string(), exit: 2 }
    }

    fn input(code: &str, message: impl Into<String>) -> Self {
        CliError { code: code.to_string(), message: message.into(), exit: 2 }
    }

    fn io(message: impl Into<String>) -> Self {
        CliError { code: "IoError".to_string(), message: message.into(), exit: 1 }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ERROR {}: {}", e.code, e.message);
            ExitCode::from(e.exit)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (command, inputs, result, text) = dispatch(&cli)?;
    let envelope = Envelope {
        command,
        inputs,
        result,
        trunc: cli.trunc,
        seed: cli.seed,
    };
    let json = serde_json::to_string(&envelope).expect("envelope serializes");
    match cli.format {
        Format::Text => println!("{text}"),
        Format::Json => println!("{json}"),
    }
    if let Some(path) = &cli.out {
        std::fs::write(path, &json).map_err(|e| CliError::io(e.to_string()))?;
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(String, Value, Value, String), CliError> {
    match &cli.command {
        Command::Normalize { expr } => {
            let ast = parser::parse_expr(expr).map_err(CliError::parse)?;
            let u = ast.eval();
            Ok((
                "normalize".into(),
                json!({ "expr": expr }),
                json!(uea_to_json(&u)),
                u.to_string(),
            ))
        }
        Command::Act { expr, phi_p, phi_q, on } => {
            let ast = parser::parse_expr(expr).map_err(CliError::parse)?;
            let u = ast.eval();
            let phi = WhittakerType::new(phi_p.0.clone(), phi_q.0.clone());
            let v = match on {
                None => ModElem::cyclic(phi),
                Some(raw) => {
                    let mut v = ModElem::zero(phi);
                    for (t, c) in parse_element_json(raw, 3)? {
                        v.add_term([t[0], t[1], t[2]], c);
                    }
                    v
                }
            };
            let out = act(&u, &v);
            Ok((
                "act".into(),
                json!({
                    "expr": expr,
                    "phi_p": phi_p.0.to_fraction_string(),
                    "phi_q": phi_q.0.to_fraction_string(),
                    "on": on.as_ref().map(|s| serde_json::from_str::<Value>(s).unwrap_or(Value::Null)),
                }),
                json!(mod_to_json(&out)),
                out.to_string(),
            ))
        }
        Command::Qwvectors { phi_p, phi_q, degree } => {
            let phi = WhittakerType::new(phi_p.0.clone(), phi_q.0.clone());
            let basis = qw_vector_basis(&phi, *degree).map_err(CliError::math)?;
            let text = if basis.is_empty() {
                "(none)".to_string()
            } else {
                basis.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
            };
            Ok((
                "qwvectors".into(),
                json!({
                    "phi_p": phi_p.0.to_fraction_string(),
                    "phi_q": phi_q.0.to_fraction_string(),
                    "degree": degree,
                }),
                json!(basis.iter().map(mod_to_json).collect::<Vec<_>>()),
                text,
            ))
        }
        Command::Series { phi_p, phi_q, d } => {
            let phi = WhittakerType::new(phi_p.0.clone(), phi_q.0.clone());
            let factored = parse_factor_list(d)?;
            let module = FiniteQW::new(phi, factored, cli.trunc).map_err(CliError::math)?;
            let report = module.composition_series();
            let text = format!(
                "layers (top to bottom): {}\nlength {} verified at degree <= {}",
                report
                    .layers
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(", "),
                report.layers.len(),
                report.trunc,
            );
            Ok((
                "series".into(),
                json!({
                    "phi_p": phi_p.0.to_fraction_string(),
                    "phi_q": phi_q.0.to_fraction_string(),
                    "d": d,
                }),
                series_to_json(&report),
                text,
            ))
        }
        Command::Decompose { phi_p, phi_q, d } => {
            let phi = WhittakerType::new(phi_p.0.clone(), phi_q.0.clone());
            let factored = parse_factor_list(d)?;
            let module =
                FiniteQW::new(phi.clone(), factored, cli.trunc).map_err(CliError::math)?;
            let comps = module.decompose().map_err(CliError::math)?;
            let degenerate = phi.class().is_degenerate();
            let text = comps
                .iter()
                .map(|c| {
                    format!(
                        "root {} (multiplicity {}): generator {}, complement {}, bezout {}",
                        c.root,
                        c.multiplicity,
                        fin_to_text(&c.generator, degenerate),
                        c.complement,
                        c.bezout,
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            Ok((
                "decompose".into(),
                json!({
                    "phi_p": phi_p.0.to_fraction_string(),
                    "phi_q": phi_q.0.to_fraction_string(),
                    "d": d,
                }),
                json!(comps.iter().map(component_to_json).collect::<Vec<_>>()),
                text,
            ))
        }
        Command::Annihilates { expr, phi_p, phi_q, d } => {
            let ast = parser::parse_expr(expr).map_err(CliError::parse)?;
            let u = ast.eval();
            let phi = WhittakerType::new(phi_p.0.clone(), phi_q.0.clone());
            let factored = parse_factor_list(d)?;
            let module = FiniteQW::new(phi, factored, cli.trunc).map_err(CliError::math)?;
            let answer = module.annihilator_contains(&u);
            Ok((
                "annihilates".into(),
                json!({
                    "expr": expr,
                    "phi_p": phi_p.0.to_fraction_string(),
                    "phi_q": phi_q.0.to_fraction_string(),
                    "d": d,
                }),
                json!(answer),
                answer.to_string(),
            ))
        }
        Command::Reduce { element, phi_p, phi_q, xi } => {
            let phi = WhittakerType::new(phi_p.0.clone(), phi_q.0.clone());
            let mut v = QuotElem::zero(phi.clone(), xi.0.clone());
            for (t, c) in parse_element_json(element, 2)? {
                v.add_term([t[0], t[1]], c);
            }
            let witness = cyclic_reduction(&v).map_err(CliError::math)?;
            let degenerate = phi.class().is_degenerate();
            let text = format!(
                "witness {} carries {} to {}*w",
                witness.element,
                quot_to_text(&v, degenerate),
                witness.scalar,
            );
            Ok((
                "reduce".into(),
                json!({
                    "element": quot_to_json(&v),
                    "phi_p": phi_p.0.to_fraction_string(),
                    "phi_q": phi_q.0.to_fraction_string(),
                    "xi": xi.0.to_fraction_string(),
                }),
                witness_to_json(&witness),
                text,
            ))
        }
        Command::Verify { suite } => {
            let results = verify::run_suites(*suite, cli.seed);
            let ok = results.iter().all(|r| r.passed == r.total);
            let text = results
                .iter()
                .map(|r| format!("suite {}: {}/{} checks passed", r.name, r.passed, r.total))
                .collect::<Vec<_>>()
                .join("\n");
            if !ok {
                eprintln!("{text}");
                return Err(CliError {
                    code: "VerificationFailed".into(),
                    message: "one or more suites reported failures".into(),
                    exit: 1,
                });
            }
            Ok((
                "verify".into(),
                json!({ "suite": suite_name(*suite) }),
                json!(results
                    .iter()
                    .map(|r| json!({ "name": r.name, "passed": r.passed, "total": r.total }))
                    .collect::<Vec<_>>()),
                text,
            ))
        }
    }
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Jacobi => "jacobi",
        Suite::Pbw => "pbw",
        Suite::Lemmas => "lemmas",
        Suite::Oracle => "oracle",
        Suite::All => "all",
    }
}

/// Parses the element JSON schema, enforcing the monomial arity.
fn parse_element_json(raw: &str, arity: usize) -> Result<Vec<(Vec<u32>, Rat)>, CliError> {
    let terms: Vec<JsonTerm> = serde_json::from_str(raw)
        .map_err(|e| CliError::input("BadElement", format!("element JSON: {e}")))?;
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        if t.monomial.len() != arity {
            return Err(CliError::input(
                "BadElement",
                format!("monomial {:?} must have {arity} exponents", t.monomial),
            ));
        }
        let c = Rat::parse_fraction(&t.coeff).ok_or_else(|| {
            CliError::input("BadElement", format!("bad coefficient {:?}", t.coeff))
        })?;
        out.push((t.monomial, c));
    }
    Ok(out)
}

/// Parses `root:mult,root:mult,…` into a factored polynomial.
fn parse_factor_list(raw: &str) -> Result<FactoredPoly, CliError> {
    let mut roots: Vec<(Rat, u32)> = Vec::new();
    for piece in raw.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let (root, mult) = piece.split_once(':').ok_or_else(|| {
            CliError::input("BadFactorList", format!("expected root:mult, got {piece:?}"))
        })?;
        let root = Rat::parse_fraction(root.trim()).ok_or_else(|| {
            CliError::input("BadFactorList", format!("bad root {root:?}"))
        })?;
        let mult: u32 = mult.trim().parse().map_err(|_| {
            CliError::input("BadFactorList", format!("bad multiplicity {mult:?}"))
        })?;
        if mult == 0 {
            return Err(CliError::input("BadFactorList", "multiplicity must be positive"));
        }
        if roots.iter().any(|(r, _)| r == &root) {
            return Err(CliError::input("BadFactorList", format!("repeated root {root}")));
        }
        roots.push((root, mult));
    }
    if roots.is_empty() {
        return Err(CliError::input("BadFactorList", "no factors given"));
    }
    Ok(FactoredPoly::new(roots))
}

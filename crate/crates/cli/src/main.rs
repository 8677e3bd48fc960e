//! Batch front end for the chainmorph library: JSON in, JSON out.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain error (machine-readable
//! error JSON on stdout), 3 suite violation.

use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use chainmorph::chain::{FiniteChain, IntervalUnion, Rat};
use chainmorph::enumerate::{count_class, enumerate_class, DEFAULT_MAX_CANDIDATES, GreenRelation};
use chainmorph::finite::{classify, find_ideals, ClassTag, IdealSet, PartialMap};
use chainmorph::green::{green_check_op, green_check_regular};
use chainmorph::regularity::{
    build_op_inverse, build_op_inverse_symbolic, reg_o_criterion, reg_op_criterion,
    verify_inner_inverse, zeta_inverse, ImageFacts,
};
use chainmorph::suites::{self, SuiteParams};
use chainmorph::symbolic::{
    dj_gap_witness, image_of, is_orientation_preserving_symbolic, PiecewiseMoebiusMap,
};

#[derive(Parser)]
#[command(
    name = "chainmorph",
    about = "Order- and orientation-preserving transformations on chains",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy)]
enum ChainSpec {
    Finite(usize),
    Q,
}

impl FromStr for ChainSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("q") {
            return Ok(ChainSpec::Q);
        }
        if let Some(n) = s.strip_prefix("finite:") {
            let n: usize =
                n.parse().map_err(|e| format!("bad chain size {n:?}: {e}"))?;
            if n == 0 {
                return Err("chain size must be ≥ 1".into());
            }
            return Ok(ChainSpec::Finite(n));
        }
        Err(format!("expected finite:<n> or q, got {s:?}"))
    }
}

#[derive(Args)]
struct FiniteMapArgs {
    /// Chain, e.g. finite:4
    #[arg(long)]
    chain: ChainSpec,
    /// Map spec: full `[2,3,1]` or partial `{1:2,3:1}`
    #[arg(long)]
    map: String,
}

#[derive(Subcommand)]
enum Command {
    /// Class tags of a finite-chain map
    Classify(FiniteMapArgs),
    /// Ideals of a finite-chain map
    Ideal(FiniteMapArgs),
    /// Regularity criterion for an image on a chain
    Regular {
        /// Criterion: o (order-preserving) or op (orientation-preserving)
        #[arg(long)]
        criterion: String,
        #[arg(long)]
        chain: ChainSpec,
        /// Finite map spec, or piecewise-map JSON when --chain q
        #[arg(long)]
        map: Option<String>,
        /// Interval union, e.g. "{(-1,1)}", evaluated directly
        #[arg(long)]
        image: Option<String>,
    },
    /// Explicit inner inverse construction on a finite chain
    Inverse {
        /// Construction: zeta (partial) or beta (full)
        #[arg(long)]
        construct: String,
        #[arg(long)]
        chain: ChainSpec,
        #[arg(long)]
        map: String,
        /// Ideal as comma-separated elements (required for constant maps)
        #[arg(long)]
        ideal: Option<String>,
    },
    /// Green's relation criterion for a pair of maps
    Green {
        /// Class: op, po, pop, poi, popi
        #[arg(long)]
        class: String,
        #[arg(long)]
        chain: ChainSpec,
        /// Relation: L, R, H, D, J
        #[arg(long)]
        rel: String,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
    },
    /// List all members of a class on X_n
    Enumerate {
        #[arg(long)]
        class: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_candidates: Option<u64>,
    },
    /// Count members of a class
    Count {
        #[arg(long)]
        class: String,
        #[arg(long)]
        n: Option<usize>,
        /// Emit the fixture body for n = 1..5
        #[arg(long)]
        fixture: bool,
        #[arg(long)]
        max_candidates: Option<u64>,
    },
    /// Operations on piecewise-Möbius maps over ℚ
    Symbolic {
        #[command(subcommand)]
        command: SymbolicCommand,
    },
    /// Run a registered verification suite
    Suite {
        #[arg(long)]
        name: Option<String>,
        /// List registered suites
        #[arg(long)]
        list: bool,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        class: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        max_candidates: Option<u64>,
    },
}

#[derive(Subcommand)]
enum SymbolicCommand {
    /// Exact image of a piecewise map
    Image {
        #[arg(long)]
        map: String,
    },
    /// Orientation/order-preservation and the ideal
    Classify {
        #[arg(long)]
        map: String,
    },
    /// Regularity criterion on the map's image
    Regular {
        #[arg(long)]
        criterion: String,
        #[arg(long)]
        map: String,
    },
    /// Symbolic inverse construction
    Inverse {
        #[arg(long)]
        map: String,
        /// Ideal as an interval union, e.g. "{(-inf,0)}"
        #[arg(long)]
        ideal: Option<String>,
    },
    /// D-versus-J witness from two partial identities
    Djwitness {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
        #[arg(long)]
        d: String,
    },
}

enum CliError {
    Usage(String),
    Domain { kind: &'static str, message: String },
}

impl CliError {
    fn domain(kind: &'static str, err: impl std::fmt::Display) -> CliError {
        CliError::Domain { kind, message: err.to_string() }
    }
}

macro_rules! domain_from {
    ($ty:ty, $kind:expr) => {
        impl From<$ty> for CliError {
            fn from(e: $ty) -> CliError {
                CliError::Domain { kind: $kind(&e), message: e.to_string() }
            }
        }
    };
}

fn transform_kind(e: &chainmorph::finite::TransformError) -> &'static str {
    use chainmorph::finite::TransformError::*;
    match e {
        ChainMismatch => "ChainMismatch",
        NotInjective => "NotInjective",
        NotOrientationPreserving => "NotOrientationPreserving",
        ConstantMap => "ConstantMap",
        NotAnIdeal => "NotAnIdeal",
        NotIdempotent => "NotIdempotent",
        NotFull => "NotFull",
        OutOfRange(..) => "OutOfRange",
        Parse(..) => "Parse",
    }
}

fn reg_kind(e: &chainmorph::regularity::RegError) -> &'static str {
    use chainmorph::regularity::RegError::*;
    match e {
        EmptyImage => "EmptyImage",
        NotOrientationPreserving => "NotOrientationPreserving",
        NotAnIdeal => "NotAnIdeal",
        NotFull => "NotFull",
        CriterionFails => "CriterionFails",
        UnsupportedShape(..) => "UnsupportedShape",
        Transform(t) => transform_kind(t),
        Symbolic(s) => symbolic_kind(s),
    }
}

fn green_kind(e: &chainmorph::green::GreenError) -> &'static str {
    use chainmorph::green::GreenError::*;
    match e {
        KernelMismatch => "KernelMismatch",
        NotInjective => "NotInjective",
        NotFull => "NotFull",
        NotInClass(..) => "NotInClass",
        SizeLimit { .. } => "SizeLimit",
        UnsupportedClass(..) => "UnsupportedClass",
        Transform(t) => transform_kind(t),
    }
}

fn enum_kind(e: &chainmorph::enumerate::EnumError) -> &'static str {
    use chainmorph::enumerate::EnumError::*;
    match e {
        SizeLimit { .. } => "SizeLimit",
        ClosureViolation { .. } => "ClosureViolation",
    }
}

fn symbolic_kind(e: &chainmorph::symbolic::SymbolicError) -> &'static str {
    use chainmorph::symbolic::SymbolicError::*;
    match e {
        MalformedMap(..) => "MalformedMap",
        BadInterval(..) => "BadInterval",
        UnboundedUnsupported => "UnboundedUnsupported",
        Chain(..) => "Chain",
    }
}

fn chain_kind(e: &chainmorph::chain::ChainError) -> &'static str {
    use chainmorph::chain::ChainError::*;
    match e {
        EmptySet => "EmptySet",
        InvalidInterval(..) => "InvalidInterval",
        Parse(..) => "Parse",
    }
}

domain_from!(chainmorph::finite::TransformError, transform_kind);
domain_from!(chainmorph::regularity::RegError, reg_kind);
domain_from!(chainmorph::green::GreenError, green_kind);
domain_from!(chainmorph::enumerate::EnumError, enum_kind);
domain_from!(chainmorph::symbolic::SymbolicError, symbolic_kind);
domain_from!(chainmorph::chain::ChainError, chain_kind);

fn finite_chain(spec: ChainSpec) -> Result<FiniteChain, CliError> {
    match spec {
        ChainSpec::Finite(n) => {
            FiniteChain::new(n).map_err(|e| CliError::Usage(e.to_string()))
        }
        ChainSpec::Q => {
            Err(CliError::Usage("this operation needs --chain finite:<n>".into()))
        }
    }
}

fn parse_map(chain: FiniteChain, spec: &str) -> Result<PartialMap, CliError> {
    PartialMap::parse(chain, spec).map_err(CliError::from)
}

fn parse_class(s: &str) -> Result<ClassTag, CliError> {
    ClassTag::from_str(s).map_err(|e| CliError::Usage(e.to_string()))
}

fn parse_ideal(spec: &Option<String>) -> Result<Option<IdealSet>, CliError> {
    match spec {
        None => Ok(None),
        Some(s) => {
            let s = s.trim().trim_start_matches('{').trim_end_matches('}');
            if s.is_empty() {
                return Ok(Some(IdealSet::empty()));
            }
            let elems: Result<Vec<usize>, _> =
                s.split(',').map(|t| t.trim().parse::<usize>()).collect();
            match elems {
                Ok(e) => Ok(Some(IdealSet::new(e))),
                Err(e) => Err(CliError::Usage(format!("bad ideal spec: {e}"))),
            }
        }
    }
}

fn max_candidates(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("CHAINMORPH_MAX_CANDIDATES").ok().and_then(|v| v.parse().ok())
    })
    .unwrap_or(DEFAULT_MAX_CANDIDATES)
}

fn map_json(m: &PartialMap) -> Value {
    json!({
        "spec": m.to_string(),
        "json": serde_json::to_value(m).expect("serializable"),
        "classes": classify(m).iter().map(|t| t.name()).collect::<Vec<_>>(),
    })
}

fn parse_symbolic(spec: &str) -> Result<PiecewiseMoebiusMap, CliError> {
    serde_json::from_str(spec)
        .map_err(|e| CliError::domain("MalformedMap", format!("bad piecewise-map JSON: {e}")))
}

fn parse_rat(s: &str) -> Result<Rat, CliError> {
    Rat::from_str(s).map_err(|e| CliError::Usage(format!("bad rational {s:?}: {e}")))
}

enum Output {
    Json(Value),
    /// Verbatim body, already valid JSON (used for byte-stable fixtures).
    Raw(String),
}

fn run(cli: Cli) -> Result<(Output, ExitCode), CliError> {
    let ok = ExitCode::SUCCESS;
    match cli.command {
        Command::Classify(args) => {
            let chain = finite_chain(args.chain)?;
            let m = parse_map(chain, &args.map)?;
            Ok((
                Output::Json(json!({
                    "chain": chain.size(),
                    "map": m.to_string(),
                    "classes": classify(&m).iter().map(|t| t.name()).collect::<Vec<_>>(),
                })),
                ok,
            ))
        }
        Command::Ideal(args) => {
            let chain = finite_chain(args.chain)?;
            let m = parse_map(chain, &args.map)?;
            let ideals = find_ideals(&m);
            let unique = (!m.is_constant() && ideals.len() == 1)
                .then(|| ideals[0].elems().to_vec());
            Ok((
                Output::Json(json!({
                    "map": m.to_string(),
                    "orientation_preserving": m.is_empty_map() || !ideals.is_empty(),
                    "ideals": ideals.iter().map(|y| y.elems().to_vec()).collect::<Vec<_>>(),
                    "unique": unique,
                })),
                ok,
            ))
        }
        Command::Regular { criterion, chain, map, image } => {
            let facts = match (chain, &map, &image) {
                (_, None, Some(img)) => {
                    let u = IntervalUnion::from_str(img)?;
                    ImageFacts::from_union(&u)?
                }
                (ChainSpec::Finite(n), Some(spec), None) => {
                    let chain =
                        FiniteChain::new(n).map_err(|e| CliError::Usage(e.to_string()))?;
                    let m = parse_map(chain, spec)?;
                    ImageFacts::from_finite_image(&m.image())?
                }
                (ChainSpec::Q, Some(spec), None) => {
                    let m = parse_symbolic(spec)?;
                    ImageFacts::from_union(&image_of(&m))?
                }
                _ => {
                    return Err(CliError::Usage(
                        "pass exactly one of --map or --image".into(),
                    ))
                }
            };
            let report = match criterion.to_ascii_lowercase().as_str() {
                "o" => reg_o_criterion(&facts),
                "op" => reg_op_criterion(&facts),
                other => {
                    return Err(CliError::Usage(format!(
                        "criterion must be o or op, got {other:?}"
                    )))
                }
            };
            Ok((Output::Json(serde_json::to_value(&report).expect("serializable")), ok))
        }
        Command::Inverse { construct, chain, map, ideal } => {
            let chain = finite_chain(chain)?;
            let alpha = parse_map(chain, &map)?;
            let ideal = match parse_ideal(&ideal)? {
                Some(y) => y,
                None => {
                    let mut ideals = find_ideals(&alpha);
                    if alpha.is_constant() {
                        return Err(CliError::domain(
                            "ConstantMap",
                            "constant maps admit several ideals; pass --ideal",
                        ));
                    }
                    if ideals.is_empty() {
                        return Err(CliError::domain(
                            "NotOrientationPreserving",
                            format!("{alpha} admits no ideal"),
                        ));
                    }
                    ideals.pop().unwrap()
                }
            };
            let inverse = match construct.to_ascii_lowercase().as_str() {
                "zeta" => zeta_inverse(&alpha, &ideal)?,
                "beta" => build_op_inverse(&alpha, &ideal)?,
                other => {
                    return Err(CliError::Usage(format!(
                        "construct must be zeta or beta, got {other:?}"
                    )))
                }
            };
            let verified = verify_inner_inverse(&alpha, &inverse)?;
            Ok((
                Output::Json(json!({
                    "construct": construct.to_ascii_lowercase(),
                    "alpha": alpha.to_string(),
                    "ideal": ideal.elems().to_vec(),
                    "inverse": map_json(&inverse),
                    "verified": verified,
                })),
                ok,
            ))
        }
        Command::Green { class, chain, rel, alpha, beta } => {
            let chain = finite_chain(chain)?;
            let tag = parse_class(&class)?;
            let rel = GreenRelation::from_str(&rel).map_err(CliError::Usage)?;
            let a = parse_map(chain, &alpha)?;
            let b = parse_map(chain, &beta)?;
            let verdict = match tag {
                ClassTag::OP => green_check_op(&a, &b, rel)?,
                ClassTag::PO | ClassTag::POP | ClassTag::POI | ClassTag::POPI => {
                    green_check_regular(&a, &b, rel, tag)?
                }
                other => {
                    return Err(CliError::Usage(format!(
                        "green criteria cover op, po, pop, poi, popi; got {other}"
                    )))
                }
            };
            Ok((Output::Json(serde_json::to_value(&verdict).expect("serializable")), ok))
        }
        Command::Enumerate { class, n, max_candidates: mc } => {
            let tag = parse_class(&class)?;
            let members = enumerate_class(tag, n, max_candidates(mc))?;
            Ok((
                Output::Json(json!({
                    "class": tag.name(),
                    "n": n,
                    "count": members.len(),
                    "members": members.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
                })),
                ok,
            ))
        }
        Command::Count { class, n, fixture, max_candidates: mc } => {
            let tag = parse_class(&class)?;
            let ceiling = max_candidates(mc);
            if fixture {
                let mut counts = [0u64; 5];
                for (i, c) in counts.iter_mut().enumerate() {
                    *c = count_class(tag, i + 1, ceiling)?;
                }
                return Ok((
                    Output::Raw(chainmorph::suites::fixture_json(&counts)),
                    ok,
                ));
            }
            let n = n.ok_or_else(|| CliError::Usage("pass --n or --fixture".into()))?;
            let count = count_class(tag, n, ceiling)?;
            Ok((Output::Json(json!({"class": tag.name(), "n": n, "count": count})), ok))
        }
        Command::Symbolic { command } => run_symbolic(command).map(|v| (Output::Json(v), ok)),
        Command::Suite { name, list, n, class, seed, samples, max_candidates: mc } => {
            if list {
                let suites: Vec<Value> = suites::registry()
                    .iter()
                    .map(|s| json!({"name": s.name(), "summary": s.summary()}))
                    .collect();
                return Ok((Output::Json(json!({ "suites": suites })), ok));
            }
            let name =
                name.ok_or_else(|| CliError::Usage("pass --name or --list".into()))?;
            let suite = suites::find(&name).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown suite {name:?}; run suite --list for the registry"
                ))
            })?;
            let class = match class {
                Some(c) => Some(parse_class(&c)?),
                None => None,
            };
            let params = SuiteParams {
                n,
                class,
                seed: seed.unwrap_or_else(|| SuiteParams::default().seed),
                samples,
                max_candidates: max_candidates(mc),
            };
            let report = suite.run(&params);
            let code = if report.passed { ok } else { ExitCode::from(3) };
            Ok((Output::Json(serde_json::to_value(&report).expect("serializable")), code))
        }
    }
}

fn run_symbolic(cmd: SymbolicCommand) -> Result<Value, CliError> {
    match cmd {
        SymbolicCommand::Image { map } => {
            let m = parse_symbolic(&map)?;
            Ok(json!({
                "image": image_of(&m).to_string(),
                "domain": m.domain().to_string(),
                "full": m.is_full(),
            }))
        }
        SymbolicCommand::Classify { map } => {
            let m = parse_symbolic(&map)?;
            let ideal = is_orientation_preserving_symbolic(&m);
            let order = ideal.as_ref().map(|y| *y == m.domain()).unwrap_or(false);
            Ok(json!({
                "orientation_preserving": ideal.is_some(),
                "order_preserving": order,
                "ideal": ideal.map(|y| y.to_string()),
                "full": m.is_full(),
                "image": image_of(&m).to_string(),
            }))
        }
        SymbolicCommand::Regular { criterion, map } => {
            let m = parse_symbolic(&map)?;
            let image = image_of(&m);
            let facts = ImageFacts::from_union(&image)?;
            let report = match criterion.to_ascii_lowercase().as_str() {
                "o" => reg_o_criterion(&facts),
                "op" => reg_op_criterion(&facts),
                other => {
                    return Err(CliError::Usage(format!(
                        "criterion must be o or op, got {other:?}"
                    )))
                }
            };
            let mut value = serde_json::to_value(&report).expect("serializable");
            value["image"] = Value::String(image.to_string());
            Ok(value)
        }
        SymbolicCommand::Inverse { map, ideal } => {
            let m = parse_symbolic(&map)?;
            let ideal = match ideal {
                None => None,
                Some(s) => Some(IntervalUnion::from_str(&s)?),
            };
            let inv = build_op_inverse_symbolic(&m, ideal.as_ref())?;
            Ok(json!({
                "beta": serde_json::to_value(&inv.beta).expect("serializable"),
                "beta_display": inv.beta.to_string(),
                "verified": inv.verified,
                "mutual": inv.mutual,
            }))
        }
        SymbolicCommand::Djwitness { a, b, c, d } => {
            let report = dj_gap_witness(
                &parse_rat(&a)?,
                &parse_rat(&b)?,
                &parse_rat(&c)?,
                &parse_rat(&d)?,
            )?;
            Ok(serde_json::to_value(&report).expect("serializable"))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok((Output::Json(value), code)) => {
            println!("{}", serde_json::to_string_pretty(&value).expect("valid JSON"));
            code
        }
        Ok((Output::Raw(body), code)) => {
            println!("{body}");
            code
        }
        Err(CliError::Usage(message)) => {
            eprintln!("usage error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Domain { kind, message }) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "error": {"kind": kind, "message": message}
                }))
                .expect("valid JSON")
            );
            ExitCode::from(2)
        }
    }
}

mod formats;
mod witness;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use teamsem::dependencies::{check_closure_properties, check_domain_independence, DependencyError, Registry, Verdict};
use teamsem::harness::oracles::{chain_oracle, parity_oracle};
use teamsem::harness::{
    build_chain_instance, build_parity_instance, check_semantic_equivalence, enumerate_structures, enumerate_teams,
    Bounds, Equivalence, HarnessError,
};
use teamsem::structures::Team;
use teamsem::syntax::{parse_expr, parse_formula, validate_ded, validate_usentence, Formula, Var};
use teamsem::tarski::tarski_eval;
use teamsem::teameval::{team_eval_with, EvalError, EvalOptions, Strategy};
use teamsem::ulogic::{disjunction_translate, usentence_translate};

use formats::{assignment, read_json, ChainFile, DependencyFile, StructureFile, TeamFile};
use witness::Witness;

#[derive(Parser)]
#[command(name = "teamsem", version, about = "Model checking under lax team semantics")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Step budget for team evaluation.
    #[arg(long, env = "TEAMSEM_BUDGET", global = true)]
    budget: Option<u64>,
    /// Seed for sampled (non-exhaustive) checks.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Naive,
    Memoized,
    Optimized,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Naive => Strategy::Naive,
            StrategyArg::Memoized => Strategy::Memoized,
            StrategyArg::Optimized => Strategy::Optimized,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ValidateKind {
    Ded,
    Usentence,
}

#[derive(Subcommand)]
enum Command {
    /// Decide M ⊨_X φ.
    Eval {
        #[arg(short, long)]
        structure: PathBuf,
        #[arg(short, long)]
        team: PathBuf,
        #[arg(short, long)]
        formula: String,
        #[arg(long, value_enum, default_value_t = StrategyArg::Optimized)]
        strategy: StrategyArg,
        /// Dependency files registering `D:name` atoms.
        #[arg(short, long)]
        dependency: Vec<PathBuf>,
    },
    /// Decide M ⊨_s φ for a first order formula.
    Tarski {
        #[arg(short, long)]
        structure: PathBuf,
        /// JSON object mapping variables to element labels.
        #[arg(short, long)]
        assignment: Option<PathBuf>,
        #[arg(short, long)]
        formula: String,
    },
    /// Compare two formulas on every instance up to a bound.
    Equiv {
        phi: String,
        psi: String,
        #[arg(long, default_value_t = 2)]
        max_domain: usize,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        #[arg(long, default_value = "R")]
        symbol: String,
        /// Team variables, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "x,y")]
        vars: Vec<String>,
        /// Check this many seeded random instances instead of all.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(short, long)]
        dependency: Vec<PathBuf>,
    },
    /// Compile U-sentences into a team formula; several become a global disjunction.
    Translate {
        #[arg(short, long, required = true)]
        formula: Vec<String>,
    },
    /// Check that a sentence is a DED or a U-sentence.
    Validate {
        #[arg(value_enum)]
        kind: ValidateKind,
        sentence: String,
    },
    /// Bounded closure properties of a dependency.
    Classify {
        #[arg(short, long)]
        dependency: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_domain: usize,
    },
    /// Evaluate the parity sentence on M_ℓ.
    Parity {
        #[arg(long)]
        ell: usize,
        #[arg(long, value_enum, default_value_t = StrategyArg::Optimized)]
        mode: StrategyArg,
    },
    /// Evaluate the chain sentence for a chain of relations.
    Chain {
        #[arg(short, long)]
        chain: PathBuf,
        #[arg(short)]
        d: usize,
        #[arg(long)]
        dependency: PathBuf,
    },
}

/// A command's verdict: exit code 0 for true/pass, 1 for false/counterexample.
struct Report {
    ok: bool,
    text: String,
    json: Value,
}

fn options(cli: &Cli, strategy: Strategy) -> EvalOptions {
    EvalOptions::new(strategy).with_budget(cli.budget)
}

fn registry(paths: &[PathBuf]) -> Result<Registry> {
    let mut r = Registry::new();
    for p in paths {
        r.insert(read_json::<DependencyFile>(p)?.to_dependency()?);
    }
    Ok(r)
}

fn boolean(b: bool) -> Report {
    Report { ok: b, text: b.to_string(), json: json!({ "result": b }) }
}

fn verdict_json<C: Witness>(v: &Verdict<C>) -> Value {
    match v {
        Verdict::Pass { bound } => json!({ "pass": true, "bound": bound }),
        Verdict::Counterexample(c) => json!({ "pass": false, "counterexample": c.to_json() }),
    }
}

fn verdict_text<C: Witness>(name: &str, v: &Verdict<C>) -> String {
    match v {
        Verdict::Pass { bound } => format!("{name}: pass (bound {bound})"),
        Verdict::Counterexample(c) => format!("{name}: counterexample {}", c.to_json()),
    }
}

fn run(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Eval { structure, team, formula, strategy, dependency } => {
            let m = read_json::<StructureFile>(structure)?.to_structure()?;
            let x = read_json::<TeamFile>(team)?.to_team(&m)?;
            let reg = registry(dependency)?;
            let ctx = reg.parse_context().with_constants(m.constants().keys().cloned());
            let f = parse_formula(formula, &ctx)?;
            Ok(boolean(team_eval_with(&m, &x, &f, &reg, &options(cli, (*strategy).into()))?))
        }
        Command::Tarski { structure, assignment: path, formula } => {
            let m = read_json::<StructureFile>(structure)?.to_structure()?;
            let s = match path {
                Some(p) => assignment(&m, &read_json::<BTreeMap<String, String>>(p)?)?,
                None => Default::default(),
            };
            let ctx = Registry::new().parse_context().with_constants(m.constants().keys().cloned());
            Ok(boolean(tarski_eval(&m, &s, &parse_formula(formula, &ctx)?)?))
        }
        Command::Equiv { phi, psi, max_domain, arity, symbol, vars, sample, dependency } => {
            let reg = registry(dependency)?;
            let (phi, psi) = (parse_formula(phi, &reg.parse_context())?, parse_formula(psi, &reg.parse_context())?);
            let vars: Vec<&str> = vars.iter().map(String::as_str).filter(|v| !v.is_empty()).collect();
            let bounds = Bounds::new(*max_domain, *arity, &vars).with_symbol(symbol.clone());
            let opts = options(cli, Strategy::Optimized);
            let verdict = match sample {
                None => check_semantic_equivalence(&phi, &psi, &bounds, &reg, &opts)?,
                Some(count) => sampled_equivalence(&phi, &psi, &bounds, &reg, &opts, *count, cli.seed)?,
            };
            Ok(match verdict {
                Equivalence::Equivalent { bound } => match sample {
                    None => Report {
                        ok: true,
                        text: format!("equivalent (bound {bound})"),
                        json: json!({ "result": "equivalent", "bound": bound }),
                    },
                    Some(count) => Report {
                        ok: true,
                        text: format!("equivalent on {count} sampled instances (bound {bound}, seed {})", cli.seed),
                        json: json!({ "result": "equivalent", "bound": bound, "sampled": count, "seed": cli.seed }),
                    },
                },
                Equivalence::Counterexample { structure, team, left, right } => {
                    let m = StructureFile::from_structure(&structure);
                    let x = TeamFile::from_team(&structure, &team);
                    Report {
                        ok: false,
                        text: format!(
                            "counterexample: structure {} team {} (left {left}, right {right})",
                            serde_json::to_string(&m)?,
                            serde_json::to_string(&x)?
                        ),
                        json: json!({ "result": "counterexample", "structure": m, "team": x, "left": left, "right": right }),
                    }
                }
            })
        }
        Command::Translate { formula } => {
            let us = formula
                .iter()
                .map(|t| Ok(validate_usentence(&parse_expr(t, &Default::default())?)?))
                .collect::<Result<Vec<_>>>()?;
            let compiled = match us.as_slice() {
                [one] => usentence_translate(one)?,
                many => disjunction_translate(many)?,
            };
            let text = compiled.to_string();
            Ok(Report { ok: true, json: json!({ "formula": text }), text })
        }
        Command::Validate { kind, sentence } => {
            let e = parse_expr(sentence, &Default::default())?;
            let normal = match kind {
                ValidateKind::Ded => validate_ded(&e)?.to_string(),
                ValidateKind::Usentence => validate_usentence(&e)?.to_string(),
            };
            Ok(Report { ok: true, json: json!({ "valid": true, "normal_form": normal }), text: normal })
        }
        Command::Classify { dependency, max_domain } => {
            let d = read_json::<DependencyFile>(dependency)?.to_dependency()?;
            let independence = check_domain_independence(&d, *max_domain)?;
            let c = check_closure_properties(&d, *max_domain)?;
            let text = [
                format!("dependency {} (arity {}), bound {}", d.name(), d.arity(), c.bound),
                verdict_text("domain independent", &independence),
                verdict_text("downwards closed", &c.downwards),
                verdict_text("upwards closed", &c.upwards),
                verdict_text("union closed", &c.union_closed),
                verdict_text("isomorphism closed", &c.isomorphism_closed),
            ]
            .join("\n");
            let json = json!({
                "dependency": d.name(),
                "arity": d.arity(),
                "bound": c.bound,
                "domain_independent": verdict_json(&independence),
                "downwards_closed": verdict_json(&c.downwards),
                "upwards_closed": verdict_json(&c.upwards),
                "union_closed": verdict_json(&c.union_closed),
                "isomorphism_closed": verdict_json(&c.isomorphism_closed),
            });
            Ok(Report { ok: true, text, json })
        }
        Command::Parity { ell, mode } => {
            let inst = build_parity_instance(*ell)?;
            let opts = options(cli, (*mode).into()).with_symmetry(true);
            let v = team_eval_with(&inst.structure, &Team::unit(), &inst.formula, &inst.registry, &opts)?;
            let mut r = boolean(v);
            r.json = json!({ "ell": ell, "result": v, "oracle": parity_oracle(*ell).is_some() });
            Ok(r)
        }
        Command::Chain { chain, d, dependency } => {
            let dep = read_json::<DependencyFile>(dependency)?.to_dependency()?;
            let (base, links) = read_json::<ChainFile>(chain)?.to_chain()?;
            let inst = build_chain_instance(*d, &dep, base, &links)?;
            let v = team_eval_with(
                &inst.structure,
                &Team::unit(),
                &inst.formula,
                &inst.registry,
                &options(cli, Strategy::Optimized),
            )?;
            let domain: BTreeSet<_> = inst.structure.domain().iter().copied().collect();
            let witness = chain_oracle(&dep, &domain, &links, *d)?;
            let mut r = boolean(v);
            r.json = json!({ "result": v, "formula": inst.formula.to_string(), "oracle_indices": witness });
            Ok(r)
        }
    }
}

fn sampled_equivalence(
    phi: &Formula,
    psi: &Formula,
    bounds: &Bounds,
    reg: &Registry,
    opts: &EvalOptions,
    count: usize,
    seed: u64,
) -> Result<Equivalence> {
    let vars: BTreeSet<&Var> = bounds.vars.iter().collect();
    if let Some(v) = phi.free_vars().into_iter().chain(psi.free_vars()).find(|v| !vars.contains(v)) {
        return Err(HarnessError::UnboundVariable(v).into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let structures = enumerate_structures(bounds)?;
    let mut teams: BTreeMap<usize, Vec<Team>> = BTreeMap::new();
    for _ in 0..count {
        let m = structures.choose(&mut rng).ok_or_else(|| anyhow!("no structures within the bounds"))?;
        if let std::collections::btree_map::Entry::Vacant(e) = teams.entry(m.size()) {
            e.insert(enumerate_teams(m, &bounds.vars)?);
        }
        let x = teams[&m.size()].choose(&mut rng).expect("at least the empty team");
        let (l, r) = (team_eval_with(m, x, phi, reg, opts)?, team_eval_with(m, x, psi, reg, opts)?);
        if l != r {
            return Ok(Equivalence::Counterexample { structure: m.clone(), team: x.clone(), left: l, right: r });
        }
    }
    Ok(Equivalence::Equivalent { bound: bounds.max_domain })
}

fn is_resource(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<EvalError>().is_some_and(EvalError::is_resource)
            || c.downcast_ref::<HarnessError>().is_some_and(HarnessError::is_resource)
            || matches!(c.downcast_ref::<DependencyError>(), Some(DependencyError::Budget(_)))
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            match cli.format {
                Format::Text => println!("{}", report.text),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.json).expect("serializable")),
            }
            ExitCode::from(if report.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_resource(&e) { 3 } else { 2 })
        }
    }
}

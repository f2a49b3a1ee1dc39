use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use qpl::algebra::{parse_term, term_equal, term_geq};
use qpl::calculus::{check_derivation, CalculusVariant, Derivation, DerivationJson};
use qpl::closure::closure_with_cap;
use qpl::engine::{entails_with, EngineOptions, SaturationStats, Verdict};
use qpl::generators::{
    bounded_halting_instance, classical_horn_bottom, halts_within_bound, random_horn,
    random_instance, random_machine, simulate, HornParams, RandomParams,
};
use qpl::semantics::{
    countermodel_for, oracle_exponent, semantic_yields_bruteforce_with_cap, OracleError,
};
use qpl::syntax::{parameters_star, parse_formula, parse_problem, render, Formula, Problem, Store};
use serde::Serialize;
use serde_json::json;

use crate::{
    AlgebraRelation, BenchCommand, CheckArgs, Cli, CliError, Command, GenCommand, ProveArgs,
    RunConfig,
};

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: &Cli) -> Result<()> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Check(args) => check(cfg, args),
        Command::Prove(args) => prove(cfg, args),
        Command::Closure { file } => closure(cfg, file),
        Command::Oracle { hyps, query } => oracle(cfg, hyps, query),
        Command::VerifyProof { hyps, proof, query } => {
            verify_proof(cfg, hyps, proof, query.as_deref())
        }
        Command::Algebra {
            relation,
            left,
            right,
        } => algebra(cfg, *relation, left, right),
        Command::Gen(g) => generate(cfg, g),
        Command::Bench(BenchCommand::Chain { n, repeat }) => bench_chain(cfg, *n, *repeat),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, format!("{text}\n"))
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_problem(store: &mut Store, path: &Path) -> Result<Problem> {
    let text = read(path)?;
    parse_problem(store, &text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_query(store: &mut Store, text: &str, problem: &Problem) -> Result<Formula> {
    parse_formula(store, text, &problem.var_refs())
        .map_err(|e| CliError::Input(format!("query `{text}`: {e}")))
}

fn print_json(value: &impl Serialize) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("output serializes")
    );
}

/// `out.json` for a single query, `out.0.json`, `out.1.json`, ... otherwise.
fn numbered(base: &Path, i: usize, count: usize) -> PathBuf {
    if count == 1 {
        return base.to_path_buf();
    }
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}.{i}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{i}"),
    };
    base.with_file_name(name)
}

fn decide(store: &mut Store, cfg: &RunConfig, hyps: &[Formula], q: Formula) -> Result<Verdict> {
    let options = EngineOptions {
        closure_cap: cfg.closure_cap,
    };
    entails_with(store, hyps, q, cfg.variant, options).map_err(CliError::resource)
}

fn proof_text(store: &Store, proof: &Derivation, cfg: &RunConfig, tree: bool) -> Result<String> {
    if tree {
        let t = proof
            .expand_tree(cfg.closure_cap)
            .map_err(CliError::resource)?;
        Ok(t.to_json_string(store))
    } else {
        Ok(proof.to_json_string(store))
    }
}

#[derive(Serialize)]
struct QueryResult {
    query: String,
    entailed: bool,
    stats: SaturationStats,
    proof: Option<String>,
    countermodel: Option<String>,
}

#[derive(Serialize)]
struct CheckReport {
    variant: &'static str,
    results: Vec<QueryResult>,
}

fn check(cfg: &RunConfig, args: &CheckArgs) -> Result<()> {
    if args.countermodel.is_some()
        && !matches!(cfg.variant, CalculusVariant::Qpl | CalculusVariant::PfQpl)
    {
        return Err(CliError::Input(format!(
            "countermodels are available for qpl and pfqpl, not {}",
            cfg.variant
        )));
    }
    let mut store = Store::new();
    let problem = load_problem(&mut store, &args.hyps)?;
    let mut queries = Vec::new();
    for q in &args.queries {
        queries.push(parse_query(&mut store, q, &problem)?);
    }
    if let Some(path) = &args.queries_file {
        // Queries see the hypothesis file's free variables as well as their own.
        let text = format!("@vars {}\n{}", problem.vars.join(" "), read(path)?);
        let extra = parse_problem(&mut store, &text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        queries.extend(extra.formulas);
    }
    if queries.is_empty() {
        return Err(CliError::Input("no query given".into()));
    }

    let mut results = Vec::new();
    for (i, &q) in queries.iter().enumerate() {
        let verdict = decide(&mut store, cfg, &problem.formulas, q)?;
        let mut result = QueryResult {
            query: render(&store, q),
            entailed: verdict.entailed,
            stats: verdict.stats,
            proof: None,
            countermodel: None,
        };
        if let (Some(base), Some(proof)) = (&args.proof, &verdict.proof) {
            let path = numbered(base, i, queries.len());
            write(&path, &proof_text(&store, proof, cfg, args.expand_tree)?)?;
            result.proof = Some(path.display().to_string());
        }
        if let (Some(base), Some(handle)) = (&args.countermodel, &verdict.countermodel) {
            let cm = countermodel_for(&store, handle).map_err(CliError::input)?;
            let path = numbered(base, i, queries.len());
            let text = serde_json::to_string_pretty(&cm.to_json(&store, &handle.closure))
                .expect("countermodel serializes");
            write(&path, &text)?;
            result.countermodel = Some(path.display().to_string());
        }
        results.push(result);
    }

    if cfg.json {
        print_json(&CheckReport {
            variant: cfg.variant.name(),
            results,
        });
    } else {
        for r in &results {
            let verdict = if r.entailed {
                "entailed"
            } else {
                "not entailed"
            };
            let file = r.proof.as_ref().or(r.countermodel.as_ref());
            match file {
                Some(f) => println!("{}: {verdict} ({f})", r.query),
                None => println!("{}: {verdict}", r.query),
            }
        }
    }
    Ok(())
}

fn prove(cfg: &RunConfig, args: &ProveArgs) -> Result<()> {
    check(
        cfg,
        &CheckArgs {
            hyps: args.hyps.clone(),
            queries: vec![args.query.clone()],
            queries_file: None,
            proof: Some(args.proof.clone()),
            countermodel: None,
            expand_tree: args.expand_tree,
        },
    )
}

fn closure(cfg: &RunConfig, file: &Path) -> Result<()> {
    let mut store = Store::new();
    let problem = load_problem(&mut store, file)?;
    if problem.formulas.is_empty() {
        return Err(CliError::Input(format!("{}: no formulas", file.display())));
    }
    let ct = closure_with_cap(&mut store, &problem.formulas, cfg.closure_cap)
        .map_err(CliError::resource)?;
    let stats = ct.stats();
    let bound = stats.size_bound();
    let params: Vec<String> = ct
        .params()
        .elements()
        .iter()
        .map(|&t| store.term_name(t).to_owned())
        .collect();
    let universe: Vec<String> = ct.universe().iter().map(|&f| render(&store, f)).collect();
    if cfg.json {
        print_json(&json!({
            "parameters": params,
            "universe": universe,
            "stats": stats,
            "size_bound": bound,
            "bound_holds": stats.size as u128 <= bound,
        }));
    } else {
        println!("# parameters: {}", params.join(", "));
        println!(
            "# size {} (bound {} = length {} * {}^{}), closure length {}",
            stats.size, bound, stats.length, stats.params, stats.depth, stats.closure_length
        );
        for f in universe {
            println!("{f}");
        }
    }
    Ok(())
}

fn oracle(cfg: &RunConfig, hyps: &Path, query: &str) -> Result<()> {
    let mut store = Store::new();
    let problem = load_problem(&mut store, hyps)?;
    let q = parse_query(&mut store, query, &problem)?;
    let yields =
        match semantic_yields_bruteforce_with_cap(&mut store, &problem.formulas, q, cfg.oracle_cap)
        {
            Ok(b) => b,
            Err(e @ (OracleError::TooLarge { .. } | OracleError::Closure(_))) => {
                return Err(CliError::resource(e))
            }
        };
    let mut set = problem.formulas.clone();
    set.push(q);
    let ct = closure_with_cap(&mut store, &set, cfg.closure_cap).map_err(CliError::resource)?;
    let exponent = oracle_exponent(&store, &ct);
    if cfg.json {
        print_json(
            &json!({ "query": render(&store, q), "semantic": yields, "exponent": exponent }),
        );
    } else {
        let verdict = if yields {
            "semantically entailed"
        } else {
            "not semantically entailed"
        };
        println!("{}: {verdict} (2^{exponent} candidates)", render(&store, q));
    }
    Ok(())
}

fn verify_proof(cfg: &RunConfig, hyps: &Path, proof: &Path, query: Option<&str>) -> Result<()> {
    let mut store = Store::new();
    let problem = load_problem(&mut store, hyps)?;
    let text = read(proof)?;
    let json: DerivationJson = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", proof.display())))?;
    let d = Derivation::from_json(&mut store, &json, &problem.var_refs())
        .map_err(|e| CliError::Input(format!("{}: {e}", proof.display())))?;
    let expected = query
        .map(|q| parse_query(&mut store, q, &problem))
        .transpose()?;
    let (valid, lines) =
        match check_derivation(&mut store, &d, cfg.variant, &problem.formulas, expected) {
            Ok(report) => {
                let mut lines: Vec<String> = report
                    .failures()
                    .map(|n| format!("node {}: {}", n.id, n.failure.as_ref().expect("failure")))
                    .collect();
                if report.root_mismatch {
                    lines.push("root label differs from the query".into());
                }
                (report.passed, lines)
            }
            Err(e) => (false, vec![e.to_string()]),
        };
    if cfg.json {
        print_json(&json!({
            "valid": valid,
            "variant": cfg.variant.name(),
            "nodes": d.nodes.len(),
            "failures": lines,
        }));
    } else {
        println!("{}", if valid { "valid" } else { "invalid" });
        for l in lines {
            println!("  {l}");
        }
    }
    Ok(())
}

fn algebra(cfg: &RunConfig, relation: AlgebraRelation, left: &str, right: &str) -> Result<()> {
    let s = parse_term(left).map_err(CliError::input)?;
    let t = parse_term(right).map_err(CliError::input)?;
    let mut store = Store::new();
    let holds = match relation {
        AlgebraRelation::Geq => term_geq(&mut store, &s, &t),
        AlgebraRelation::Equal => term_equal(&mut store, &s, &t),
    };
    let op = match relation {
        AlgebraRelation::Geq => ">=",
        AlgebraRelation::Equal => "=",
    };
    if cfg.json {
        print_json(
            &json!({ "left": s.to_string(), "right": t.to_string(), "relation": op, "holds": holds }),
        );
    } else {
        println!("{s} {op} {t}: {holds}");
    }
    Ok(())
}

fn seed(cfg: &RunConfig) -> Result<u64> {
    match cfg.seed {
        Some(s) => Ok(s),
        None if cfg.json => Err(CliError::Input("--seed is required with --json".into())),
        None => Ok(SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_nanos() as u64)),
    }
}

fn generate(cfg: &RunConfig, g: &GenCommand) -> Result<()> {
    let seed = seed(cfg)?;
    let mut store = Store::new();
    match *g {
        GenCommand::Horn {
            clauses,
            relations,
            constants,
            max_bound_vars,
        } => {
            let p = HornParams {
                clauses,
                relations,
                constants,
                max_bound_vars,
                ..Default::default()
            };
            let set = random_horn(seed, p);
            let hyps: Vec<Formula> = set.iter().map(|c| c.to_formula(&mut store)).collect();
            let params: Vec<String> = parameters_star(&mut store, &hyps)
                .elements()
                .iter()
                .map(|&t| store.term_name(t).to_owned())
                .collect();
            let bottom = classical_horn_bottom(&set, &params);
            let hyps: Vec<String> = hyps.iter().map(|&f| render(&store, f)).collect();
            if cfg.json {
                print_json(
                    &json!({ "seed": seed, "hyps": hyps, "query": "false", "classical_bottom": bottom }),
                );
            } else {
                println!("# seed {seed}; classically derives false: {bottom}");
                hyps.iter().for_each(|h| println!("{h}"));
            }
        }
        GenCommand::Machine { states, bound } => {
            let m = random_machine(seed, states);
            let sim = simulate(&m, 10_000);
            let instance = bound.map(|t| {
                let (hyps, q) = bounded_halting_instance(&mut store, &m, t);
                let hyps: Vec<String> = hyps.iter().map(|&f| render(&store, f)).collect();
                (t, hyps, render(&store, q), halts_within_bound(&m, t))
            });
            if cfg.json {
                print_json(&json!({
                    "seed": seed,
                    "machine": m.to_string(),
                    "simulation": { "halts": sim.halts, "steps": sim.steps },
                    "instance": instance.as_ref().map(|(t, hyps, q, reach)| json!({
                        "bound": t, "hyps": hyps, "query": q, "halts_within_bound": reach,
                    })),
                }));
            } else {
                println!(
                    "# seed {seed}; halts: {} after {} steps",
                    sim.halts, sim.steps
                );
                print!("{m}");
                if let Some((t, hyps, q, reach)) = instance {
                    println!("# bounded instance, t = {t}; reachable within bound: {reach}");
                    hyps.iter().for_each(|h| println!("{h}"));
                    println!("# query: {q}");
                }
            }
        }
        GenCommand::Random {
            hyps,
            queries,
            constants,
            max_quantifiers,
            max_depth,
            free_var,
        } => {
            let p = RandomParams {
                hyps,
                queries,
                constants,
                max_quantifiers,
                max_depth,
                free_var,
                ..Default::default()
            };
            let inst = random_instance(&mut store, seed, &p, cfg.variant);
            let hyps: Vec<String> = inst.hyps.iter().map(|&f| render(&store, f)).collect();
            let queries: Vec<String> = inst.queries.iter().map(|&f| render(&store, f)).collect();
            if cfg.json {
                print_json(&json!({
                    "seed": seed,
                    "variant": cfg.variant.name(),
                    "vars": inst.vars,
                    "hyps": hyps,
                    "queries": queries,
                }));
            } else {
                println!("# seed {seed}; variant {}", cfg.variant);
                if !inst.vars.is_empty() {
                    println!("@vars {}", inst.vars.join(" "));
                }
                hyps.iter().for_each(|h| println!("{h}"));
                queries.iter().for_each(|q| println!("# query: {q}"));
            }
        }
    }
    Ok(())
}

fn bench_chain(cfg: &RunConfig, n: usize, repeat: usize) -> Result<()> {
    if n < 6 {
        return Err(CliError::Input("--n must be at least 6 symbols".into()));
    }
    // `p0` is one symbol and each `p_i -> p_{i+1}` is five.
    let links = (n - 1) / 5;
    let mut text = String::with_capacity(links * 24);
    text.push_str("p0\n");
    for i in 0..links {
        text.push_str(&format!("p{i} -> p{}\n", i + 1));
    }
    let mut best = Duration::MAX;
    let mut entailed = false;
    for _ in 0..repeat.max(1) {
        let start = Instant::now();
        let mut store = Store::new();
        let problem = parse_problem(&mut store, &text).map_err(CliError::input)?;
        let q = store.atom_named(&format!("p{links}"), &[]);
        entailed = decide(&mut store, cfg, &problem.formulas, q)?.entailed;
        best = best.min(start.elapsed());
    }
    if cfg.json {
        print_json(&json!({
            "symbols": 1 + 5 * links,
            "links": links,
            "variant": cfg.variant.name(),
            "entailed": entailed,
            "seconds": best.as_secs_f64(),
            "runs": repeat.max(1),
        }));
    } else {
        println!(
            "chain of {} links ({} symbols) under {}: entailed {entailed}, best {:.3} s over {} runs",
            links,
            1 + 5 * links,
            cfg.variant,
            best.as_secs_f64(),
            repeat.max(1)
        );
    }
    Ok(())
}

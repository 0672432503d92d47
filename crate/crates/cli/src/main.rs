use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use combdim::graph::{cdim, fcdim_in, gamma, gamma_full, socle_collapse, CTriple, CycGraph, GraphDoc};
use combdim::linalg::{Subspace, DEFAULT_ENUMERATION_BUDGET};
use combdim::oracle::{OracleConfig, DEFAULT_ORACLE_BUDGET, DEFAULT_TRIALS};
use combdim::suites::{self, SuiteReport};
use combdim::towers::{self, parse_terms, AdmSeq, Metric, SearchConfig};
use combdim::trivext::{AModule, Algebra, Ideal};
use combdim::zdomain::{gamma_z, PrincIdeal, ZGraph, ZTriple};
use combdim::Error;

#[derive(Parser, Debug)]
#[command(name = "combdim", version, about = "Graphs of cyclic modules over F_p ⋉ F_p^n")]
struct Cli {
    /// JSON configuration file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Largest number of vectors enumerated.
    #[arg(long, global = true)]
    budget: Option<u128>,
    /// Largest algebra scanned exhaustively by the oracle.
    #[arg(long, global = true)]
    oracle_budget: Option<u128>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Deserialize, Debug, Default)]
#[serde(default, deny_unknown_fields)]
struct Config {
    enumeration_budget: Option<u128>,
    oracle_budget: Option<u128>,
    oracle_trials: Option<usize>,
    seed: Option<u64>,
    depth: Option<usize>,
    beam: Option<usize>,
    /// Directory that relative output paths are resolved against.
    output_dir: Option<PathBuf>,
}

struct Settings {
    budget: u128,
    oracle: OracleConfig,
    seed: u64,
    depth: Option<usize>,
    beam: Option<usize>,
    output_dir: Option<PathBuf>,
}

impl Settings {
    fn resolve(cli: &Cli) -> anyhow::Result<Self> {
        let cfg: Config = match &cli.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str(&text).map_err(|e| Error::Parse {
                    path: format!("{}: line {} column {}", path.display(), e.line(), e.column()),
                    message: e.to_string(),
                })?
            }
            None => Config::default(),
        };
        let budget = cli.budget.or(cfg.enumeration_budget).unwrap_or(DEFAULT_ENUMERATION_BUDGET);
        let oracle_budget = cli.oracle_budget.or(cfg.oracle_budget).unwrap_or(DEFAULT_ORACLE_BUDGET);
        if budget == 0 || oracle_budget == 0 {
            return Err(Error::Parse { path: "budget".into(), message: "budgets must be positive".into() }.into());
        }
        let seed = cli.seed.or(cfg.seed).unwrap_or(0);
        Ok(Settings {
            budget,
            oracle: OracleConfig { budget: oracle_budget, trials: cfg.oracle_trials.unwrap_or(DEFAULT_TRIALS), seed },
            seed,
            depth: cfg.depth,
            beam: cfg.beam,
            output_dir: cfg.output_dir,
        })
    }

    fn out_path(&self, path: &Path) -> PathBuf {
        match &self.output_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }

    fn write(&self, path: &Path, text: &str) -> anyhow::Result<()> {
        let path = self.out_path(path);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a graph of cyclic submodules and emit DOT and JSON.
    Graph {
        #[command(flatten)]
        module: ModuleArgs,
        #[command(flatten)]
        graph: GraphArgs,
        /// Identify vertices with equal ideal images.
        #[arg(long)]
        collapse: bool,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Number of components of the full graph.
    Cdim {
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long, default_value = "soc")]
        ideal: String,
    },
    /// Components met by a fundamental set (the generators by default).
    Fcdim {
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long, default_value = "soc")]
        ideal: String,
        /// Vectors separated by ';', entries by ','.
        #[arg(long)]
        set: Option<String>,
    },
    /// Print a module as JSON.
    Module {
        #[command(flatten)]
        module: ModuleArgs,
    },
    /// Check the constructions of indecomposables of Goldie dimension 1..=3n-2.
    #[command(name = "verify-thm31")]
    VerifyConstructions {
        #[arg(long, default_value_t = 3)]
        p: u32,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run one of the seeded structural checks.
    #[command(name = "lemma-check")]
    LemmaCheck {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(suites::CHECKS))]
        name: String,
        #[arg(long)]
        cases: Option<usize>,
    },
    /// Random-module bound suite and oracle soundness checks.
    #[command(name = "oracle-check")]
    OracleCheck {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 8)]
        max_d: usize,
    },
    /// Beam search over admissible sequences; writes a CSV report.
    Search {
        #[arg(long, default_value_t = 3)]
        p: u32,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        beam: Option<usize>,
        #[arg(long, default_value = "tilde")]
        metric: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Record per-row wall-clock times (breaks byte-identical reruns).
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Preset {
    Free,
    #[value(name = "Mi")]
    Mi,
    #[value(name = "Mn1i")]
    Mn1i,
    Tower,
    Local,
    Zdom,
}

#[derive(Args, Debug)]
struct ModuleArgs {
    #[arg(long, value_enum, conflicts_with = "module")]
    preset: Option<Preset>,
    /// Module JSON file.
    #[arg(long)]
    module: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    p: u32,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    i: usize,
    /// Rank of the free module.
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Goldie dimension of the local quotient.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Admissible sequence for the tower preset, e.g. "2,2,1".
    #[arg(long, default_value = "")]
    seq: String,
    /// Integer vectors for the zdom preset, e.g. "1,0;2,0;0,1".
    #[arg(long)]
    zsigma: Option<String>,
    /// Marked integer vectors for the zdom preset.
    #[arg(long)]
    zmarked: Option<String>,
    /// Generator of the principal ideal for the zdom preset.
    #[arg(long, default_value_t = 1)]
    zideal: i64,
}

#[derive(Args, Debug)]
struct GraphArgs {
    /// zero, whole, soc, or w=<vectors> for the socle ideal 0 ⊕ W.
    #[arg(long, default_value = "soc")]
    ideal: String,
    #[arg(long, value_enum, default_value_t = SigmaChoice::Full)]
    sigma: SigmaChoice,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SigmaChoice {
    Full,
    Tilde,
}

enum Loaded {
    Module { module: AModule, generators: Vec<Vec<u32>> },
    Z(ZTriple, PrincIdeal),
}

fn parse_vectors(text: &str) -> anyhow::Result<Vec<Vec<i64>>> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|v| {
            v.split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| anyhow!(Error::Parse { path: v.into(), message: "not an integer vector".into() })))
                .collect()
        })
        .collect()
}

fn residues(alg: &Algebra, vs: Vec<Vec<i64>>) -> Vec<Vec<u32>> {
    vs.into_iter().map(|v| v.into_iter().map(|x| alg.field().reduce(x)).collect()).collect()
}

fn load(args: &ModuleArgs) -> anyhow::Result<Loaded> {
    if let Some(path) = &args.module {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let module = AModule::from_json(&text)?;
        let generators = module.generators();
        return Ok(Loaded::Module { module, generators });
    }
    let preset = args.preset.ok_or_else(|| anyhow!(Error::Parse { path: "preset".into(), message: "give --preset or --module".into() }))?;
    let level = |seq: AdmSeq| -> anyhow::Result<Loaded> {
        let l = towers::build(&seq)?;
        Ok(Loaded::Module { module: l.module, generators: l.sigma })
    };
    match preset {
        Preset::Free => {
            let module = AModule::free(Algebra::new(args.p, args.n)?, args.r);
            let generators = module.generators();
            Ok(Loaded::Module { module, generators })
        }
        Preset::Mi => level(AdmSeq::new(args.p, args.n, vec![args.i])?),
        Preset::Mn1i => {
            let l = towers::m_n1_i(args.p, args.n, args.i)?;
            Ok(Loaded::Module { module: l.module, generators: l.sigma })
        }
        Preset::Tower => level(AdmSeq::new(args.p, args.n, parse_terms(&args.seq)?)?),
        Preset::Local => {
            let module = towers::local_quotient(args.p, args.n, args.m)?;
            let generators = vec![module.unit(0)];
            Ok(Loaded::Module { module, generators })
        }
        Preset::Zdom => {
            let sigma = parse_vectors(args.zsigma.as_deref().unwrap_or(""))?;
            let marked = parse_vectors(args.zmarked.as_deref().unwrap_or(""))?;
            let d = sigma.first().map_or(0, |v| v.len());
            Ok(Loaded::Z(ZTriple::new(d, sigma, marked)?, PrincIdeal::new(args.zideal)))
        }
    }
}

fn parse_ideal(alg: &Algebra, text: &str) -> anyhow::Result<Ideal> {
    match text {
        "zero" => Ok(Ideal::Zero),
        "whole" => Ok(Ideal::Whole),
        "soc" | "J" => Ok(alg.radical()),
        other => {
            let body = other
                .strip_prefix("w=")
                .ok_or_else(|| anyhow!(Error::Parse { path: "ideal".into(), message: format!("unknown ideal {:?}", other) }))?;
            let vs = residues(alg, parse_vectors(body)?);
            Ok(Ideal::soc_sub(Subspace::span(alg.field(), alg.n(), &vs)?))
        }
    }
}

fn module_only(loaded: Loaded) -> anyhow::Result<(AModule, Vec<Vec<u32>>)> {
    match loaded {
        Loaded::Module { module, generators } => Ok((module, generators)),
        Loaded::Z(..) => Err(Error::Parse { path: "preset".into(), message: "not available for the zdom preset".into() }.into()),
    }
}

fn emit(s: &Settings, dot: String, json: String, dot_path: &Option<PathBuf>, json_path: &Option<PathBuf>) -> anyhow::Result<()> {
    if let Some(p) = dot_path {
        s.write(p, &dot)?;
    }
    if let Some(p) = json_path {
        s.write(p, &(json + "\n"))?;
    }
    if dot_path.is_none() && json_path.is_none() {
        print!("{}", dot);
    }
    Ok(())
}

fn graph_summary(len: usize, components: usize) {
    eprintln!("vertices: {}, components: {}", len, components);
}

fn run_graph(s: &Settings, module: &ModuleArgs, g: &GraphArgs, collapse: bool, dot: &Option<PathBuf>, json: &Option<PathBuf>) -> anyhow::Result<u8> {
    match load(module)? {
        Loaded::Z(t, ideal) => {
            let zg: ZGraph = gamma_z(&t, &ideal);
            graph_summary(zg.len(), zg.graph.component_count());
            emit(s, zg.to_dot(), zg.to_doc().to_json(), dot, json)?;
        }
        Loaded::Module { module, generators } => {
            let ideal = parse_ideal(module.algebra(), &g.ideal)?;
            let mut graph: CycGraph = match g.sigma {
                SigmaChoice::Full => gamma_full(&module, &ideal, s.budget)?,
                SigmaChoice::Tilde => {
                    let tilde = towers::subset_sums(&module, &generators, s.budget)?;
                    gamma(&CTriple::new(module.clone(), tilde, Vec::new())?, &ideal)?
                }
            };
            if collapse {
                graph = socle_collapse(&graph, &ideal, &module)?.graph;
            }
            graph_summary(graph.len(), graph.component_count());
            let doc: GraphDoc = graph.to_doc();
            emit(s, graph.to_dot(), doc.to_json(), dot, json)?;
        }
    }
    Ok(0)
}

fn print_report(r: &SuiteReport) {
    println!("{} {}", if r.passed() { "PASS" } else { "FAIL" }, r.summary());
    for note in &r.notes {
        println!("  note: {}", note);
    }
    for v in &r.violations {
        println!("  case {}: {}", v.case, v.detail);
        println!("  witness: {}", v.witness);
    }
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    let s = Settings::resolve(cli)?;
    match &cli.command {
        Command::Graph { module, graph, collapse, dot, json } => run_graph(&s, module, graph, *collapse, dot, json),
        Command::Cdim { module, ideal } => {
            match load(module)? {
                Loaded::Z(t, i) => println!("{}", gamma_z(&t, &i).graph.component_count()),
                Loaded::Module { module, .. } => {
                    let ideal = parse_ideal(module.algebra(), ideal)?;
                    println!("{}", cdim(&module, &ideal, s.budget)?);
                }
            }
            Ok(0)
        }
        Command::Fcdim { module, ideal, set } => {
            let (module, generators) = module_only(load(module)?)?;
            let ideal = parse_ideal(module.algebra(), ideal)?;
            let sigma = match set {
                Some(text) => residues(module.algebra(), parse_vectors(text)?),
                None => generators,
            };
            if !module.in_decomposition_domain(&ideal)? {
                return Err(Error::NotDecompositionIdeal.into());
            }
            let full = gamma_full(&module, &ideal, s.budget)?;
            println!("{}", fcdim_in(&full, &module, &ideal, &sigma)?);
            Ok(0)
        }
        Command::Module { module } => {
            let (module, _) = module_only(load(module)?)?;
            println!("{}", module.to_json());
            Ok(0)
        }
        Command::VerifyConstructions { p, n, json } => {
            let report = towers::verify_constructions(*p, *n, s.budget, &s.oracle)?;
            for c in &report.claims {
                let tag = match (c.passed, c.asserted) {
                    (true, _) => "PASS",
                    (false, true) => "FAIL",
                    (false, false) => "INFO",
                };
                println!("{} {}: {}", tag, c.name, c.detail);
            }
            println!("certified Goldie dimensions: {:?}", report.gdims_certified);
            for note in &report.notes {
                println!("note: {}", note);
            }
            if let Some(path) = json {
                s.write(path, &(serde_json::to_string_pretty(&report)? + "\n"))?;
            }
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::LemmaCheck { name, cases } => {
            let r = suites::run_check(name, s.seed, *cases, s.budget)?;
            print_report(&r);
            Ok(if r.passed() { 0 } else { 1 })
        }
        Command::OracleCheck { trials, max_d } => {
            let bounds = suites::bound_suite(s.seed, *trials, *max_d, &s.oracle)?;
            let sound = suites::oracle_soundness(s.seed, *trials, &s.oracle)?;
            print_report(&bounds);
            print_report(&sound);
            Ok(if bounds.passed() && sound.passed() { 0 } else { 1 })
        }
        Command::Search { p, n, depth, beam, metric, out, json, timing } => {
            let depth = depth.or(s.depth).unwrap_or(4);
            let beam = beam.or(s.beam).unwrap_or(50);
            let mut cfg = SearchConfig::new(*p, *n, depth, beam);
            cfg.metric = metric.parse::<Metric>()?;
            cfg.enumeration_budget = s.budget;
            cfg.oracle = s.oracle;
            cfg.timing = *timing;
            let report = towers::search(&cfg)?;
            let csv = report.to_csv();
            match out {
                Some(path) => s.write(path, &csv)?,
                None => print!("{}", csv),
            }
            if let Some(path) = json {
                s.write(path, &(report.to_json() + "\n"))?;
            }
            eprintln!(
                "{} rows; large-summand instances checked: {}, violations: {}; fundamental-set disagreements: {}",
                report.rows.len(),
                report.large_summand_checked,
                report.large_summand_violations.len(),
                report.fundamental_disagreements.len()
            );
            let ok = report.large_summand_violations.is_empty() && report.fundamental_disagreements.is_empty();
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            match err.downcast_ref::<Error>() {
                Some(Error::BudgetExceeded { required, budget }) => {
                    eprintln!("error: budget exceeded: {} vectors required, budget is {}", required, budget);
                    ExitCode::from(2)
                }
                Some(e @ (Error::NotFundamental | Error::NotDecompositionIdeal)) => {
                    eprintln!("error: {}", e);
                    ExitCode::from(1)
                }
                _ => {
                    eprintln!("error: {:#}", err);
                    ExitCode::from(2)
                }
            }
        }
    }
}

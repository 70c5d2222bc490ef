//! Command-line front end.
//!
//! Exit codes: 0 success (or `yes`), 1 `no` / verification failure,
//! 2 usage error, 3 unreadable or malformed input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nestsim::charform::char_system;
use nestsim::declarations::{elaborate, parse_decl_file};
use nestsim::logic::{check_level, eval_closed, parse_formula, ConstantEnv, Logic};
use nestsim::lts::{generate_random, parse_aut, parse_names, render_aut, Lts};
use nestsim::relations::{preorder, Kind};
use nestsim::verify::{classics, default_kinds, pair_verdicts, random_corpus, verify_corpus, CorpusEntry, VerifyConfig};
use nestsim::Error;

#[derive(Parser)]
#[command(name = "nestsim", version, about = "Simulation-family preorders via relational and characteristic fixed points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct LtsArgs {
    /// Aldebaran (.aut) file
    #[arg(long)]
    lts: PathBuf,
    /// Sidecar file with one display name per state
    #[arg(long)]
    names: Option<PathBuf>,
    /// Extra actions to add to the alphabet (comma separated)
    #[arg(long, value_delimiter = ',')]
    alphabet: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Pairs,
    Summary,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a pair is related
    Check {
        #[command(flatten)]
        lts: LtsArgs,
        #[arg(long)]
        kind: Kind,
        /// `<p>,<q>` by id or display name
        #[arg(long)]
        pair: String,
    },
    /// Print a whole relation
    Relation {
        #[command(flatten)]
        lts: LtsArgs,
        #[arg(long)]
        kind: Kind,
        #[arg(long, value_enum, default_value = "pairs")]
        format: Format,
    },
    /// Print the characteristic equation system
    Charformula {
        #[command(flatten)]
        lts: LtsArgs,
        #[arg(long)]
        kind: Kind,
        #[arg(long)]
        process: Option<String>,
        /// Also print the target constant unfolded this many times
        #[arg(long)]
        unfold: Option<usize>,
    },
    /// Model-check a closed formula
    Mc {
        #[command(flatten)]
        lts: LtsArgs,
        /// Formula text, or `@path` to read it from a file
        #[arg(long)]
        formula: String,
        /// Declaration file binding the `nu<level>:<i>` constants
        #[arg(long)]
        decls: Option<PathBuf>,
    },
    /// Cross-check the characteristic route against the relational one
    Verify {
        /// Verify a single system instead of the built-in corpus
        #[arg(long, conflicts_with = "random")]
        lts: Option<PathBuf>,
        /// Number of random systems added to the built-in corpus
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 8)]
        max_states: usize,
        #[arg(long, value_delimiter = ',', default_value = "a,b")]
        actions: Vec<String>,
        /// One density, or several cycled through the random corpus
        #[arg(long, value_delimiter = ',', default_value = "0.3")]
        density: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        kinds: Vec<Kind>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report per-kind verdicts for this pair (with --lts)
        #[arg(long, requires = "lts")]
        pair: Option<String>,
    },
    /// Write a seeded random system
    Gen {
        #[arg(long)]
        states: usize,
        #[arg(long, value_delimiter = ',')]
        actions: Vec<String>,
        #[arg(long)]
        density: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownProcess(_)
            | Error::InvalidKind(_)
            | Error::NestingDepth(_)
            | Error::InvalidParameter(_) => Failure::Usage(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(args: &LtsArgs) -> Result<Lts, Failure> {
    let text = read(&args.lts)?;
    let mut lts = parse_aut(&text).map_err(|e| Failure::Input(format!("{}: {e}", args.lts.display())))?;
    if !args.alphabet.is_empty() {
        lts = lts.with_alphabet(&args.alphabet)?;
    }
    if let Some(path) = &args.names {
        lts = lts.with_names(parse_names(&read(path)?))?;
    }
    Ok(lts)
}

fn parse_pair(lts: &Lts, text: &str) -> Result<(usize, usize), Failure> {
    let (p, q) = text
        .split_once(',')
        .ok_or_else(|| Failure::Usage(format!("expected `<p>,<q>`, got `{text}`")))?;
    Ok((lts.resolve_process(p)?, lts.resolve_process(q)?))
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Check { lts, kind, pair } => {
            let lts = load(&lts)?;
            let (p, q) = parse_pair(&lts, &pair)?;
            let related = preorder(kind, &lts)?.contains(p, q);
            println!("{}", if related { "yes" } else { "no" });
            Ok(if related { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Relation { lts, kind, format } => {
            let lts = load(&lts)?;
            let r = preorder(kind, &lts)?;
            let name = |p| lts.display_name(p);
            print!(
                "{}",
                match format {
                    Format::Pairs => r.render_pairs(name),
                    Format::Summary => r.render_summary(name),
                }
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Charformula {
            lts,
            kind,
            process,
            unfold,
        } => {
            let lts = load(&lts)?;
            let processes: Vec<usize> = match &process {
                Some(p) => vec![lts.resolve_process(p)?],
                None => (0..lts.num_states()).collect(),
            };
            let cs = char_system(kind, &lts)?;
            let mut out = cs.render(processes.iter().copied());
            if let Some(depth) = unfold {
                for &p in &processes {
                    out.push_str(&format!("# unfold {depth} {} = {}\n", cs.target(p), cs.unfold(p, depth)));
                }
            }
            print!("{out}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Mc {
            lts,
            formula,
            decls,
        } => {
            let lts = load(&lts)?;
            let text = match formula.strip_prefix('@') {
                Some(path) => read(Path::new(path))?,
                None => formula,
            };
            let f = parse_formula(text.trim()).map_err(|e| Failure::Input(e.to_string()))?;
            let env = match &decls {
                Some(path) => {
                    let file = parse_decl_file(&read(path)?)
                        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                    let levels = file.system.len();
                    if !check_level(&f, levels, Logic::Closed) {
                        return Err(Failure::Input(format!(
                            "formula must be closed and use constants of levels below {levels}"
                        )));
                    }
                    elaborate(&file.system, &lts)?
                }
                None => ConstantEnv::new(),
            };
            let sat = eval_closed(&f, &lts, &env)?;
            let names: Vec<String> = sat.iter().map(|p| lts.display_name(p)).collect();
            println!("{}", names.join(" "));
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            lts,
            random,
            max_states,
            actions,
            density,
            kinds,
            samples,
            seed,
            pair,
        } => {
            if density.iter().any(|d| !(0.0..=1.0).contains(d)) {
                return Err(Failure::Usage("densities must lie in [0, 1]".into()));
            }
            if max_states == 0 {
                return Err(Failure::Usage("--max-states must be positive".into()));
            }
            let kinds = if kinds.is_empty() { default_kinds() } else { kinds };
            let corpus = match &lts {
                Some(path) => {
                    let text = read(path)?;
                    let l = parse_aut(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                    vec![CorpusEntry::new(path.display().to_string(), l)]
                }
                None => {
                    let mut c = classics();
                    c.extend(random_corpus(random.unwrap_or(0), max_states, &actions, &density, seed)?);
                    c
                }
            };
            let config = VerifyConfig {
                kinds: kinds.clone(),
                samples,
                seed,
            };
            let report = verify_corpus(&corpus, &config)?;
            println!("verified {} system(s), {} kind(s)", corpus.len(), kinds.len());
            print!("{report}");
            if let Some(pair) = pair {
                let l = &corpus[0].lts;
                let (p, q) = parse_pair(l, &pair)?;
                for (k, oracle, logic) in pair_verdicts(l, &kinds, p, q)? {
                    let yn = |b: bool| if b { "yes" } else { "no" };
                    println!("{k} ({p},{q}): {} [relational {}, characteristic {}]", yn(oracle && logic), yn(oracle), yn(logic));
                }
            }
            let ok = report.all_passed();
            println!("{}", if ok { "all properties hold" } else { "FAILURES found" });
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Gen {
            states,
            actions,
            density,
            seed,
            out,
        } => {
            let lts = generate_random(states, &actions, density, seed)?;
            fs::write(&out, render_aut(&lts))
                .map_err(|e| Failure::Input(format!("{}: {e}", out.display())))?;
            println!("{}", out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

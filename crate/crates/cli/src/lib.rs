//! `bmgame` command-line front end.
//!
//! Exit codes: 0 in core / verified / solved, 1 not in core / unstable /
//! verification failed, 2 usage or input error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use bmgame_core::game::DEFAULT_MAX_AGENTS;
use bmgame_core::reductions::REDUCTION_MAX_AGENTS;
use bmgame_core::scalar::format_scalar;
use bmgame_core::*;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Signed;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "bmgame",
    version,
    about = "Core analysis of bipartite b-matching games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and check an instance (and optionally a payoff and coalition).
    Validate {
        #[command(flatten)]
        input: InstanceArg,
        #[arg(long)]
        payoff: Option<PathBuf>,
        #[arg(long)]
        coalition: Option<PathBuf>,
    },
    /// Maximum-weight b-matching of the whole graph.
    Solve {
        #[command(flatten)]
        input: InstanceArg,
        /// Use exhaustive search instead of the flow solver.
        #[arg(long)]
        brute: bool,
    },
    /// Worth of one coalition.
    Worth {
        #[command(flatten)]
        input: InstanceArg,
        #[arg(long)]
        coalition: PathBuf,
    },
    /// Marginal utility of every agent.
    Marginals {
        #[command(flatten)]
        input: InstanceArg,
        /// Also test diminishing marginals (stars only).
        #[arg(long)]
        diminishing: bool,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decide core membership of a payoff vector.
    CheckCore {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, value_enum, default_value_t = CoreMethod::Auto)]
        method: CoreMethod,
        /// Accept a profit share that does not sum to the grand worth.
        #[arg(long)]
        profit_share: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_AGENTS)]
        max_agents: usize,
    },
    /// Report a coalition of largest deficit.
    FindUnstable {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, value_enum, default_value_t = SearchMethod::Brute)]
        method: SearchMethod,
        #[arg(long, default_value_t = DEFAULT_MAX_AGENTS)]
        max_agents: usize,
    },
    /// Generate a gadget instance and payoff.
    #[command(subcommand)]
    Reduce(Reduce),
    /// Solve a 0-1 knapsack instance.
    Knapsack {
        #[arg(long)]
        knapsack: PathBuf,
    },
    /// Check a generated instance against its construction.
    Verify {
        #[command(flatten)]
        game: GameArgs,
        /// Skip exhaustive coalition enumeration where optional.
        #[arg(long)]
        no_brute: bool,
        #[arg(long, default_value_t = REDUCTION_MAX_AGENTS)]
        max_agents: usize,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand, Debug)]
enum Reduce {
    /// Knapsack instance to star game with profit share.
    KnapsackToStar {
        #[arg(long)]
        knapsack: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Star profit share to imputation of a bipartite graph.
    StarToBipartite {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Imputation to uniform payoff on the graph with partner vertices.
    Partner {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        out: PathBuf,
        /// Use p* = 1 + max p + max w instead of 1 + max(max p, max w).
        #[arg(long)]
        strong: bool,
    },
}

#[derive(Args, Debug)]
struct InstanceArg {
    #[arg(long)]
    instance: PathBuf,
}

#[derive(Args, Debug)]
struct GameArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    payoff: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CoreMethod {
    Auto,
    Brute,
    Star,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SearchMethod {
    Brute,
    StarDp,
}

#[derive(Debug)]
enum Failure {
    Io(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = std::result::Result<i32, Failure>;

/// Runs the tool on `args` (including the program name), writing results
/// to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, A>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Core(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

fn load_game(path: &Path) -> std::result::Result<Game, Failure> {
    parse_instance(&read(path)?).map_err(|e| in_file(path, e))
}

fn load_pair(args: &GameArgs) -> std::result::Result<(Game, Payoff), Failure> {
    let g = load_game(&args.instance)?;
    let p = parse_payoff(&g, &read(&args.payoff)?).map_err(|e| in_file(&args.payoff, e))?;
    Ok((g, p))
}

fn load_knapsack(path: &Path) -> std::result::Result<KnapsackInstance, Failure> {
    KnapsackInstance::parse(&read(path)?).map_err(|e| in_file(path, e))
}

fn in_file(path: &Path, e: Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn members(g: &Game, s: &Coalition) -> String {
    format!("{{{}}}", s.sorted_ids(g).join(","))
}

fn print_witness(out: &mut dyn Write, g: &Game, w: &Witness<Rational>) -> std::io::Result<()> {
    writeln!(out, "coalition: {}", members(g, &w.coalition))?;
    writeln!(out, "deficit: {}", format_scalar(&w.deficit))
}

fn write_pair(out: &mut dyn Write, dir: &Path, g: &Game, p: &Payoff) -> Outcome {
    fs::create_dir_all(dir)?;
    let instance = dir.join("instance.json");
    let payoff = dir.join("payoff.json");
    fs::write(&instance, serialize_instance(g))?;
    fs::write(&payoff, serialize_payoff(g, p))?;
    writeln!(out, "wrote {}", instance.display())?;
    writeln!(out, "wrote {}", payoff.display())?;
    Ok(EXIT_OK)
}

fn dispatch(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Validate {
            input,
            payoff,
            coalition,
        } => {
            let g = load_game(&input.instance)?;
            writeln!(
                out,
                "valid instance: {} agents ({} + {}), {} edges",
                g.agent_count(),
                g.u_side().len(),
                g.v_side().len(),
                g.edges().len()
            )?;
            if let Ok(star) = g.star() {
                writeln!(
                    out,
                    "star: center {}, {} leaves",
                    g.id(star.center),
                    star.leaf_count()
                )?;
            }
            if let Some(path) = payoff {
                let p = parse_payoff(&g, &read(&path)?).map_err(|e| in_file(&path, e))?;
                let kind = if is_imputation(&g, &p) {
                    "imputation"
                } else {
                    "profit share"
                };
                writeln!(
                    out,
                    "valid payoff: {kind}, total {}, grand worth {}",
                    format_scalar(&p.total()),
                    format_scalar(&grand_worth(&g))
                )?;
            }
            if let Some(path) = coalition {
                let s = parse_coalition(&g, &read(&path)?).map_err(|e| in_file(&path, e))?;
                writeln!(out, "valid coalition: {}", members(&g, &s))?;
            }
            Ok(EXIT_OK)
        }
        Command::Solve { input, brute } => {
            let g = load_game(&input.instance)?;
            let m = if brute {
                brute_force_matching(&g)?
            } else {
                max_weight_b_matching(&g)
            };
            writeln!(out, "value: {}", format_scalar(&m.total_weight))?;
            writeln!(out, "multiplicities:")?;
            for (e, k) in g.edges().iter().zip(&m.multiplicities) {
                if *k > 0 {
                    writeln!(out, "  {} {} {}", g.id(e.u), g.id(e.v), k)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Worth { input, coalition } => {
            let g = load_game(&input.instance)?;
            let s = parse_coalition(&g, &read(&coalition)?).map_err(|e| in_file(&coalition, e))?;
            writeln!(out, "coalition: {}", members(&g, &s))?;
            writeln!(out, "worth: {}", format_scalar(&worth(&g, &s)?))?;
            Ok(EXIT_OK)
        }
        Command::Marginals {
            input,
            diminishing,
            trials,
            seed,
        } => {
            let g = load_game(&input.instance)?;
            for (id, mu) in g.ids().iter().zip(marginal_utilities(&g)) {
                writeln!(out, "{id}: {}", format_scalar(&mu))?;
            }
            if !diminishing {
                return Ok(EXIT_OK);
            }
            let check = verify_diminishing_marginals(&g, trials, seed)?;
            let mode = if check.exhaustive {
                "exhaustive"
            } else {
                "sampled"
            };
            match check.violation {
                None => {
                    writeln!(
                        out,
                        "diminishing marginals: HOLD ({mode}, {} triples)",
                        check.checked
                    )?;
                    Ok(EXIT_OK)
                }
                Some(v) => {
                    writeln!(out, "diminishing marginals: VIOLATED")?;
                    writeln!(out, "base: {}", members(&g, &v.triple.base))?;
                    writeln!(out, "v: {}", g.id(v.triple.v))?;
                    writeln!(out, "v': {}", g.id(v.triple.v_prime))?;
                    writeln!(out, "gain alone: {}", format_scalar(&v.gain_alone))?;
                    writeln!(out, "gain with v': {}", format_scalar(&v.gain_with_other))?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::CheckCore {
            game,
            method,
            profit_share,
            max_agents,
        } => {
            let (g, p) = load_pair(&game)?;
            let use_star = match method {
                CoreMethod::Star => true,
                CoreMethod::Brute => false,
                CoreMethod::Auto => g.is_star() && is_imputation(&g, &p),
            };
            let verdict = if use_star {
                check_core_star(&g, &p)?
            } else {
                check_core_bruteforce(
                    &g,
                    &p,
                    CoreCheck {
                        allow_profit_share: profit_share,
                        max_agents,
                    },
                )?
            };
            match verdict.witness {
                None => {
                    writeln!(out, "IN CORE")?;
                    Ok(EXIT_OK)
                }
                Some(w) => {
                    writeln!(out, "NOT IN CORE")?;
                    print_witness(out, &g, &w)?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::FindUnstable {
            game,
            method,
            max_agents,
        } => {
            let (g, p) = load_pair(&game)?;
            let w = match method {
                SearchMethod::Brute => max_deficit(&g, &p, max_agents)?,
                // The DP covers coalitions with the center; the rest are
                // worth 0, so the empty coalition stands in for them.
                SearchMethod::StarDp => {
                    let w = star_max_deficit_dp(&g, &p)?;
                    if w.deficit.is_negative() {
                        Witness {
                            coalition: Coalition::empty(),
                            deficit: Rational::from_integer(0.into()),
                        }
                    } else {
                        w
                    }
                }
            };
            if w.deficit.is_positive() {
                writeln!(out, "UNSTABLE")?;
                print_witness(out, &g, &w)?;
                Ok(EXIT_NEGATIVE)
            } else {
                writeln!(out, "NO UNSTABLE COALITION")?;
                writeln!(out, "max deficit: {}", format_scalar(&w.deficit))?;
                Ok(EXIT_OK)
            }
        }
        Command::Reduce(r) => match r {
            Reduce::KnapsackToStar { knapsack, out: dir } => {
                let k = load_knapsack(&knapsack)?;
                let (g, p) = knapsack_to_star::<Rational>(&k)?;
                write_pair(out, &dir, &g, &p)
            }
            Reduce::StarToBipartite { game, out: dir } => {
                let (g, p) = load_pair(&game)?;
                let (h, q) = star_to_bipartite_gadget(&g, &p)?;
                write_pair(out, &dir, &h, &q)
            }
            Reduce::Partner {
                game,
                out: dir,
                strong,
            } => {
                let (g, p) = load_pair(&game)?;
                let level = if strong {
                    strong_partner_level(&g, &p)
                } else {
                    partner_level(&g, &p)
                };
                let (h, q) = partner_duplication_at(&g, &p, level)?;
                write_pair(out, &dir, &h, &q)
            }
        },
        Command::Knapsack { knapsack } => {
            let k = load_knapsack(&knapsack)?;
            let s = solve_knapsack(&k)?;
            writeln!(out, "best value: {}", s.best_value)?;
            writeln!(out, "goal: {}", k.goal)?;
            writeln!(out, "answer: {}", if s.yes { "YES" } else { "NO" })?;
            let items: Vec<String> = s.witness.iter().map(|i| (i + 1).to_string()).collect();
            writeln!(out, "items: {}", items.join(" "))?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            game,
            no_brute,
            max_agents,
            json,
        } => {
            let (g, p) = load_pair(&game)?;
            let report = verify(&g, &p, !no_brute, max_agents)?;
            if json {
                write!(out, "{}", report.to_json())?;
            } else {
                writeln!(out, "{report}")?;
            }
            Ok(if report.passed() {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            })
        }
    }
}

fn verify(g: &Game, p: &Payoff, brute: bool, max_agents: usize) -> Result<ReductionReport> {
    match g.provenance() {
        Some(Provenance::KnapsackToStar { knapsack }) => {
            let mut report = verify_fully_matched_lemmas(g, p, max_agents)?;
            let answer = solve_knapsack(knapsack)?;
            let unstable = max_deficit(g, p, max_agents)?.deficit.is_positive();
            report.flag(
                "knapsack YES iff an unstable coalition exists",
                unstable,
                answer.yes,
            );
            let (expected, _) = knapsack_to_star::<Rational>(knapsack)?;
            report.flag(
                "instance matches its knapsack",
                expected.edges() == g.edges() && expected.capacities() == g.capacities(),
                true,
            );
            Ok(report)
        }
        Some(Provenance::StarToBipartite { .. }) => verify_gadget(
            g,
            p,
            GadgetCheck {
                brute_force: brute,
                max_agents,
            },
        ),
        Some(Provenance::PartnerDuplication { .. }) => {
            let (source, source_payoff) = partner_source(g)?;
            verify_partner_equivalence(&source, &source_payoff, g, p, max_agents)
        }
        None => Err(Error::MissingProvenance("any construction")),
    }
}

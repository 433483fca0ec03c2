use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use chordlab::experiments::{run_experiment_with, ExperimentConfig, ExperimentKind, Params, RunOptions, DEFAULT_BUDGET};
use chordlab::extremal::extremal_stats;
use chordlab::formulas::{self, RationalValue};
use chordlab::graph::{
    all_degrees, components_of_diagram, intersection_graph, is_monolithic, k_core_of_diagram, length_profile, lengths,
};
use chordlab::oracle::{exact_distribution, Condition, StatisticSpec};
use chordlab::oriented::{orient, scc};
use chordlab::{
    parse_diagram, sample_uniform, serialize_diagram, Chord, ChordDiagram,
    Error, Format, Model, Seed,
};
use chordlab::sampler::{run_continuous_with, run_discrete_with, SnapshotPolicy};

/// Random chord diagrams and their intersection graphs.
#[derive(Parser)]
#[command(name = "chordlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw uniform random diagrams.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Decimal or 0x-prefixed hex.
        #[arg(long, default_value = "0")]
        seed: Seed,
        #[arg(long, value_enum, default_value_t = OutFormat::Text)]
        format: OutFormat,
    },
    /// Lengths, degrees, components, k-core and monolithicity of a diagram.
    Analyze {
        #[command(flatten)]
        input: Input,
        /// Also report the k-core.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Exact law of a statistic by enumeration of all diagrams.
    Exact {
        #[arg(long)]
        n: usize,
        /// l<j>, z<k>, zfact<k>, zsq<k>, deg_c1, len_c1, x_c1, xsq_c1, components,
        /// monolithic, blocks<k>, indep<r>, omega, alpha, alpha_nest, crossings,
        /// trivial_scc or count.
        #[arg(long)]
        stat: StatisticSpec,
        /// For example `c1=<1,4>`.
        #[arg(long)]
        condition: Option<Condition>,
    },
    /// Evaluate a closed-form expression exactly.
    Formulas {
        /// One of double_factorial, mean_xk, var_xk, var_xk_bound, degree_cdf_limit,
        /// length_dist_c1, mean_lj, mean_zk, second_factorial_zk, mean_block_sets,
        /// mean_independent_sets, poisson_pmf.
        #[arg(long)]
        name: String,
        /// Comma-separated arguments, for example `6,4`.
        #[arg(long, allow_hyphen_values = true)]
        args: String,
    },
    /// Run a growth process.
    Evolve {
        #[arg(long)]
        model: Model,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "0")]
        seed: Seed,
        /// Write the JSON-lines trace here (`-` for standard output).
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Orient every crossing by a fair coin and find strong components.
    Orient {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "0")]
        seed: Seed,
    },
    /// Clique, independence and nesting numbers with witnesses.
    Extremal {
        #[command(flatten)]
        input: Input,
    },
    /// Run a Monte Carlo experiment and print its report.
    Experiment {
        #[arg(long)]
        kind: ExperimentKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        replicas: u64,
        #[arg(long, default_value = "0")]
        seed: Seed,
        /// Kind-specific parameters as a JSON object.
        #[arg(long)]
        params: Option<String>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
        /// Worker threads; results do not depend on it.
        #[arg(long)]
        workers: Option<usize>,
        /// Work budget in elementary steps.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: f64,
        /// Run even when the cost estimate exceeds the budget.
        #[arg(long)]
        unsafe_no_cap: bool,
    },
}

#[derive(Args)]
struct Input {
    /// Diagram as `1-4 2-7 ...` or JSON; read from --file or standard input if absent.
    diagram: Option<String>,
    #[arg(long, conflicts_with = "diagram")]
    file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

enum Failure {
    Invalid(String),
    Cost(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CostCapExceeded { .. } => Failure::Cost(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let mut out = String::new();
    match run(cli.command, &mut out) {
        Ok(()) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Cost(msg)) => {
            eprintln!("error: {msg} (pass --unsafe-no-cap or raise --budget to run anyway)");
            ExitCode::from(3)
        }
    }
}

fn read_diagram(input: &Input) -> Result<ChordDiagram, Failure> {
    let text = match (&input.diagram, &input.file) {
        (Some(s), _) => s.clone(),
        (None, Some(path)) => fs::read_to_string(path)?,
        (None, None) => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    Ok(parse_diagram(&text)?)
}

fn to_line(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string(value).expect("json");
    s.push('\n');
    s
}

fn texts(cs: &[Chord]) -> Vec<String> {
    cs.iter().map(|c| c.to_string()).collect()
}

fn run(command: Command, out: &mut String) -> Result<(), Failure> {
    match command {
        Command::Sample { n, count, seed, format } => {
            let mut rng = seed.rng();
            let format = match format {
                OutFormat::Text => Format::Text,
                OutFormat::Json => Format::Json,
            };
            for _ in 0..count {
                let d = sample_uniform(n, &mut rng)?;
                out.push_str(&serialize_diagram(&d, format));
                out.push('\n');
            }
        }
        Command::Analyze { input, k } => {
            let d = read_diagram(&input)?;
            let g = intersection_graph(&d);
            let comps = components_of_diagram(&d);
            let chords: Vec<Chord> = d.chords().collect();
            let members: Vec<Vec<String>> = comps
                .members
                .iter()
                .map(|m| m.iter().map(|&v| chords[v as usize].to_string()).collect())
                .collect();
            let mut report = json!({
                "n": d.n(),
                "chords": texts(&chords),
                "lengths": lengths(&d),
                "length_profile": length_profile(&d).counts,
                "degrees": all_degrees(&d),
                "edges": g.edges().map(|(u, v)| [chords[u].to_string(), chords[v].to_string()]).collect::<Vec<_>>(),
                "component_count": comps.count(),
                "components": members,
                "monolithic": is_monolithic(&d),
            });
            if let Some(k) = k {
                report["k"] = json!(k);
                report["k_core"] = json!(texts(k_core_of_diagram(&d, k).chords()));
            }
            out.push_str(&to_line(&report));
        }
        Command::Exact { n, stat, condition } => {
            let dist = exact_distribution(n, stat, condition)?;
            out.push_str(&dist.to_json());
            out.push('\n');
        }
        Command::Formulas { name, args } => {
            let value = eval_formula(&name, &args)?;
            out.push_str(&to_line(&json!({"name": name, "args": args, "exact": value.0, "decimal": value.1})));
        }
        Command::Evolve { model, n, seed, trace } => {
            let mut rng = seed.rng();
            let policy = SnapshotPolicy::DeltasOnly;
            let t = match model {
                Model::Continuous => run_continuous_with(n, &mut rng, policy)?,
                Model::Discrete => run_discrete_with(n, &mut rng, policy)?,
            };
            let summary = json!({
                "model": model,
                "n": n,
                "seed": seed.to_string(),
                "pairs": t.final_diagram().pairs(),
                "labeling": t.labeling(),
            });
            match trace {
                Some(path) if path.as_os_str() == "-" => {
                    let mut buf = Vec::new();
                    t.write_jsonl(&mut buf)?;
                    out.push_str(&String::from_utf8(buf).expect("utf8"));
                }
                Some(path) => {
                    let file = io::BufWriter::new(fs::File::create(path)?);
                    t.write_jsonl(file)?;
                    out.push_str(&to_line(&summary));
                }
                None => out.push_str(&to_line(&summary)),
            }
        }
        Command::Orient { input, seed } => {
            let d = read_diagram(&input)?;
            let od = orient(&d, &mut seed.rng());
            let dec = scc(&od);
            let chords: Vec<Chord> = d.chords().collect();
            let comps: Vec<Vec<String>> = dec
                .components
                .iter()
                .map(|c| c.iter().map(|&v| chords[v as usize].to_string()).collect())
                .collect();
            let orientation: serde_json::Value = serde_json::from_str(&od.to_json()).expect("json");
            out.push_str(&to_line(&json!({
                "orientation": orientation,
                "components": comps,
                "giant_index": dec.giant_index,
                "giant_size": dec.giant_size(),
                "trivial_count": dec.trivial_count,
            })));
        }
        Command::Extremal { input } => {
            let d = read_diagram(&input)?;
            let s = extremal_stats(&d);
            out.push_str(&to_line(&json!({
                "omega": s.omega,
                "omega_witness": texts(&s.omega_witness),
                "alpha": s.alpha,
                "alpha_witness": texts(&s.alpha_witness),
                "alpha_nest": s.alpha_nest,
                "alpha_nest_witness": texts(&s.alpha_nest_witness),
            })));
        }
        Command::Experiment { kind, n, replicas, seed, params, format, workers, budget, unsafe_no_cap } => {
            let params = match params {
                Some(text) => Params::from_json(&text)?,
                None => Params::default(),
            };
            let cfg = ExperimentConfig::new(kind, n, replicas, seed).with_params(params);
            let report = run_experiment_with(&cfg, &RunOptions { workers, budget, unsafe_no_cap })?;
            match format {
                ReportFormat::Json => out.push_str(&report.to_json()),
                ReportFormat::Csv => out.push_str(&report.to_csv()),
            }
            if !out.ends_with('\n') {
                out.push('\n');
            }
        }
    }
    Ok(())
}

fn int_args(args: &str, want: usize) -> Result<Vec<i64>, Failure> {
    let vals: Vec<i64> = args
        .split(',')
        .map(|a| a.trim().parse::<i64>().map_err(|_| Failure::Invalid(format!("bad integer argument {a:?}"))))
        .collect::<Result<_, _>>()?;
    if vals.len() != want {
        return Err(Failure::Invalid(format!("expected {want} arguments, got {}", vals.len())));
    }
    Ok(vals)
}

fn unsigned(v: i64) -> Result<u64, Failure> {
    u64::try_from(v).map_err(|_| Failure::Invalid(format!("argument {v} must be nonnegative")))
}

/// Exact text (or `None` for floating-point formulas) and decimal value.
fn eval_formula(name: &str, args: &str) -> Result<(Option<String>, f64), Failure> {
    let exact = |v: RationalValue| (Some(v.to_string()), v.to_f64());
    let pair = |args: &str| -> Result<(u64, u64), Failure> {
        let v = int_args(args, 2)?;
        Ok((unsigned(v[0])?, unsigned(v[1])?))
    };
    Ok(match name {
        "double_factorial" => {
            let v = int_args(args, 1)?;
            let r = formulas::double_factorial(v[0])?;
            let text = r.to_string();
            let dec = text.parse::<f64>().unwrap_or(f64::INFINITY);
            (Some(text), dec)
        }
        "mean_xk" | "var_xk" | "var_xk_bound" | "length_dist_c1" | "mean_lj" | "mean_zk" | "second_factorial_zk"
        | "mean_block_sets" | "mean_independent_sets" => {
            let (a, b) = pair(args)?;
            let f = match name {
                "mean_xk" => formulas::mean_xk,
                "var_xk" => formulas::var_xk,
                "var_xk_bound" => formulas::var_xk_bound,
                "length_dist_c1" => formulas::length_dist_c1,
                "mean_lj" => formulas::mean_lj,
                "mean_zk" => formulas::mean_zk,
                "second_factorial_zk" => formulas::second_factorial_zk,
                "mean_block_sets" => formulas::mean_block_sets,
                _ => formulas::mean_independent_sets,
            };
            exact(f(a, b)?)
        }
        "degree_cdf_limit" => {
            let b: f64 = args.trim().parse().map_err(|_| Failure::Invalid(format!("bad argument {args:?}")))?;
            (None, formulas::degree_cdf_limit(b)?)
        }
        "poisson_pmf" => {
            let (l, j) = args
                .split_once(',')
                .ok_or_else(|| Failure::Invalid("poisson_pmf takes lambda,j".into()))?;
            let lambda: f64 = l.trim().parse().map_err(|_| Failure::Invalid(format!("bad lambda {l:?}")))?;
            let j: u64 = j.trim().parse().map_err(|_| Failure::Invalid(format!("bad j {j:?}")))?;
            (None, formulas::poisson_pmf(lambda, j)?)
        }
        other => return Err(Failure::Invalid(format!("unknown formula {other:?}"))),
    })
}

//! Command-line entry point for the verification suites.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser};
use treelike::{run, Command, Format, RunConfig};

/// Run verification suites for ends of the trivalent tree and related structures.
#[derive(Debug, Parser)]
#[command(name = "treelike", version)]
struct Cli {
    /// One of: verify-axioms, verify-isomorphism, verify-jordan, verify-orbits,
    /// verify-fraisse, verify-ef, dt-graphs, classical, all.
    #[arg(value_parser = parse_command)]
    command: Command,

    /// TOML file with `key = value` lines naming config fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Master seed; each suite derives its own from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Samples per universally quantified axiom.
    #[arg(long)]
    samples: Option<u64>,
    /// Constructed witnesses per suite.
    #[arg(long)]
    instances: Option<u64>,
    /// Sampled ends have support inside [-window, window].
    #[arg(long)]
    window: Option<i64>,
    /// Depth to which TypeB rays are unrolled.
    #[arg(long)]
    depth_bound: Option<u64>,
    /// Highest game rank checked by verify-ef.
    #[arg(long)]
    ef_max_rank: Option<u32>,
    /// New vertices per clique in the clique-tree graph (needs --l).
    #[arg(long)]
    k: Option<u64>,
    /// Cliques per vertex in the clique-tree graph (needs --k).
    #[arg(long)]
    l: Option<u64>,
    /// Ball radius for the sphere counts.
    #[arg(long)]
    radius: Option<u32>,
    /// Comma-separated distances; repeat for several sets.
    #[arg(long = "distance-set", value_delimiter = ';')]
    distance_sets: Vec<String>,
    /// Half-radius for the adjacency reconstruction.
    #[arg(long)]
    n: Option<u32>,
    /// Comma-separated valencies for the tree-square check.
    #[arg(long, value_delimiter = ',')]
    t: Vec<u64>,
    /// Comma-separated primes.
    #[arg(long, value_delimiter = ',')]
    p: Vec<u64>,
    /// Samples per axiom in the classical suite.
    #[arg(long)]
    classical_samples: Option<u64>,
    #[arg(long)]
    affine_maps: Option<u64>,
    #[arg(long)]
    affine_triples: Option<u64>,
    /// text or json.
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
}

fn parse_command(s: &str) -> Result<Command, String> {
    s.parse().map_err(|e: treelike::Error| e.to_string())
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: treelike::Error| e.to_string())
}

fn parse_distance_set(s: &str) -> Result<Vec<u32>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| format!("bad distance {t:?} in {s:?}")))
        .collect()
}

fn build_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => RunConfig::default(),
    };
    macro_rules! set {
        ($($field:ident),*) => {
            $(if let Some(v) = cli.$field { config.$field = v; })*
        };
    }
    set!(
        seed,
        samples,
        instances,
        window,
        depth_bound,
        ef_max_rank,
        radius,
        n,
        classical_samples,
        affine_maps,
        affine_triples,
        format
    );
    if cli.k.is_some() {
        config.k = cli.k;
    }
    if cli.l.is_some() {
        config.l = cli.l;
    }
    if !cli.distance_sets.is_empty() {
        config.distance_sets = cli
            .distance_sets
            .iter()
            .map(|s| parse_distance_set(s))
            .collect::<Result<_, _>>()?;
    }
    if !cli.t.is_empty() {
        config.t_values = cli.t.clone();
    }
    if !cli.p.is_empty() {
        config.primes = cli.p.clone();
    }
    Ok(config)
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}\n");
    eprintln!("{}", Cli::command().render_usage());
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    match run(cli.command, &config) {
        Ok(report) => {
            let mut out = report.render();
            if !out.ends_with('\n') {
                out.push('\n');
            }
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = stdout.write_all(out.as_bytes()).and_then(|()| stdout.flush()) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => usage_error(&e.to_string()),
    }
}

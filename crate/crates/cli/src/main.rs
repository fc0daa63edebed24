//! `rotaposet`: build instances from posets, analyse rotation posets, count,
//! sample and pick fair stable matchings.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rotaposet::downset_dp::{count_downsets_with_cap, DEFAULT_WIDTH_CAP};
use rotaposet::fair::{
    count_stable_matchings, median_report, optimize_bruteforce, FairnessScores, MedianChoice, Objective,
    StableMatchingSampler,
};
use rotaposet::instance::{compute_range, Instance, Matching};
use rotaposet::pathwidth::{
    construct_path_decomposition, parse_decomposition, pathwidth_exact_tiny, to_nice, PathDecomposition,
};
use rotaposet::poset::{parse_dag, Dag};
use rotaposet::realize::{
    check_realization, construct_instance, realize_attr6, realize_bounded3, realize_complete, realize_list2inf_with,
    realize_range, ColorAssignment, ColorOrdering, MasterSide,
};
use rotaposet::rotation::{all_stable_matchings_with_cap, rotation_digraph, DEFAULT_MATCHING_CAP};
use rotaposet::Error;

#[derive(Parser)]
#[command(name = "rotaposet", version, about = "Stable matching rotation posets and their realizations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an instance whose rotation poset is the given poset.
    Realize(RealizeArgs),
    /// Print rotations, digraph edges, range and the extent decomposition width.
    Analyze {
        #[arg(long)]
        instance: PathBuf,
        /// Also write the rotation digraph in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Count stable matchings, or downsets of a DAG.
    Count(CountArgs),
    /// Draw stable matchings uniformly at random.
    Sample {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        draws: usize,
    },
    /// The median stable matching.
    Median {
        #[arg(long)]
        instance: PathBuf,
        /// Take the upper median when the number of matchings is even.
        #[arg(long)]
        upper: bool,
    },
    /// A sex-equal or balanced stable matching, by enumeration.
    Fair {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        objective: FairObjective,
        #[arg(long, default_value_t = DEFAULT_MATCHING_CAP)]
        cap: usize,
    },
    /// Check that an instance realizes a poset.
    Verify {
        #[arg(long)]
        poset: PathBuf,
        #[arg(long)]
        instance: PathBuf,
    },
    /// Brute-force counterparts of the fast routines.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Args)]
struct RealizeArgs {
    #[arg(long, value_enum)]
    model: Model,
    #[arg(long)]
    poset: PathBuf,
    /// Path decomposition of the poset, for the range model.
    #[arg(long)]
    decomp: Option<PathBuf>,
    /// `u v c` lines coloring the edges, for the generic model.
    #[arg(long)]
    coloring: Option<PathBuf>,
    /// Shared lists on the women's side instead of the men's, for list2inf.
    #[arg(long)]
    women: bool,
    /// Output instance; sidecars are written next to it.
    #[arg(short = 'o', long = "out")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CountArgs {
    /// Instance files; each gets one line of output.
    #[arg(long, num_args = 1.., conflicts_with_all = ["dag", "decomp"])]
    instance: Vec<PathBuf>,
    #[arg(long, required_unless_present = "instance")]
    dag: Option<PathBuf>,
    #[arg(long, requires = "dag")]
    decomp: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_WIDTH_CAP)]
    width_cap: usize,
    /// Worker threads across instance files.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Count stable matchings by enumerating them.
    Count {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MATCHING_CAP)]
        cap: usize,
    },
    /// Count downsets by enumerating them.
    Downsets {
        #[arg(long)]
        dag: PathBuf,
        #[arg(long)]
        list: bool,
    },
    /// Exact pathwidth of a small DAG and an optimal nice decomposition.
    Pathwidth {
        #[arg(long)]
        dag: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Every stable matching.
    Matchings {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MATCHING_CAP)]
        cap: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Generic,
    Complete,
    Bounded3,
    Attr6,
    List2inf,
    Range,
}

#[derive(Clone, Copy, ValueEnum)]
enum FairObjective {
    Sexequal,
    Balanced,
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_instance(path: &Path) -> anyhow::Result<Instance> {
    Instance::parse(&read(path)?).with_context(|| path.display().to_string())
}

fn load_dag(path: &Path) -> anyhow::Result<Dag> {
    parse_dag(&read(path)?).with_context(|| path.display().to_string())
}

fn load_decomposition(path: &Path) -> anyhow::Result<PathDecomposition> {
    parse_decomposition(&read(path)?).with_context(|| path.display().to_string())
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn sidecar(out: &Path, ext: &str) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".");
    name.push(ext);
    PathBuf::from(name)
}

/// `u v c` lines, 1-based vertices; `#` starts a comment.
fn parse_coloring(text: &str) -> anyhow::Result<BTreeMap<(usize, usize), usize>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let nums: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| Error::Parse { line: i + 1, message: "expected `u v color`".into() })?;
        match nums[..] {
            [u, v, c] if u >= 1 && v >= 1 && c >= 1 => {
                map.insert((u - 1, v - 1), c);
            }
            _ => return Err(Error::Parse { line: i + 1, message: "expected `u v color`".into() }.into()),
        }
    }
    Ok(map)
}

/// The given decomposition made nice, or an optimal one for small graphs.
fn nice_decomposition(g: &Dag, path: Option<&Path>) -> anyhow::Result<PathDecomposition> {
    match path {
        Some(p) => Ok(to_nice(g, &load_decomposition(p)?)?),
        None => Ok(pathwidth_exact_tiny(g)?.1),
    }
}

fn with_scores(inst: &Instance, mu: &Matching, total: &impl std::fmt::Display) -> String {
    let s = FairnessScores::of(inst, mu);
    format!(
        "{}# N={total} sM={} sW={} delta={} beta={}\n",
        inst.format_matching(mu),
        s.s_men,
        s.s_women,
        s.delta,
        s.beta
    )
}

fn realize(args: &RealizeArgs, out: &mut impl Write) -> anyhow::Result<()> {
    let h = load_dag(&args.poset)?;
    let coloring = args.coloring.as_deref().map(read).transpose()?;
    let (inst, sidecars): (Instance, Vec<(&str, String)>) = match args.model {
        Model::Generic => {
            let map = match &coloring {
                Some(text) => parse_coloring(text)?,
                None => h.edges().iter().map(|&(u, v)| ((u, v), h.color(u, v).unwrap_or(1))).collect(),
            };
            let colors = ColorAssignment::padded(&h, map)?;
            (construct_instance(&h, &colors, &ColorOrdering::ascending(&colors))?, vec![])
        }
        Model::Complete => (realize_complete(&h)?, vec![]),
        Model::Bounded3 => (realize_bounded3(&h)?, vec![]),
        Model::Attr6 => {
            let (inst, profiles) = realize_attr6(&h)?;
            let text = profiles.to_text(&inst);
            (inst, vec![("profiles", text)])
        }
        Model::List2inf => {
            let side = if args.women { MasterSide::Women } else { MasterSide::Men };
            let r = realize_list2inf_with(&h, side)?;
            let inst = r.instance;
            let (prefix, shared, other) = match side {
                MasterSide::Men => ("LM", inst.men_names(), inst.women_names()),
                MasterSide::Women => ("LW", inst.women_names(), inst.men_names()),
            };
            let names = |l: &[usize]| l.iter().map(|&x| other[x].as_str()).collect::<Vec<_>>().join(" ");
            let mut text = format!("{prefix}1: {}\n{prefix}2: {}\n", names(&r.first_list), names(&r.second_list));
            for (agent, g) in shared.iter().zip(&r.groups) {
                text.push_str(&format!("group {agent}: {g}\n"));
            }
            (inst, vec![("lists", text)])
        }
        Model::Range => {
            let x = nice_decomposition(&h, args.decomp.as_deref())?;
            (realize_range(&h, &x)?, vec![])
        }
    };
    match &args.out {
        Some(path) => {
            write_file(path, &inst.to_text())?;
            for (ext, text) in sidecars {
                write_file(&sidecar(path, ext), &text)?;
            }
        }
        None => out.write_all(inst.to_text().as_bytes())?,
    }
    Ok(())
}

fn analyze(instance: &Path, dot: Option<&Path>, out: &mut impl Write) -> anyhow::Result<()> {
    let inst = load_instance(instance)?;
    let dg = rotation_digraph(&inst);
    writeln!(out, "rotations {}", dg.len())?;
    for r in &dg.rotations {
        writeln!(out, "r{} {}", r.id + 1, r.format(&inst))?;
    }
    writeln!(out, "edges {}", dg.edges().count())?;
    for (a, b, tags) in dg.edges() {
        writeln!(out, "r{} -> r{} rule={}", a + 1, b + 1, tags.code())?;
    }
    match compute_range(&inst) {
        Ok(profile) => {
            let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
            writeln!(out, "range {}", profile.k)?;
            writeln!(out, "minrank men {}", join(&profile.man_min))?;
            writeln!(out, "minrank women {}", join(&profile.woman_min))?;
            let (_, x) = construct_path_decomposition(&inst)?;
            writeln!(out, "extent width {}", x.width())?;
        }
        Err(e) => writeln!(out, "range n/a ({e})")?,
    }
    if let Some(path) = dot {
        write_file(path, &dg.to_dot(&inst))?;
    }
    Ok(())
}

fn count_files(files: &[PathBuf], jobs: usize, out: &mut impl Write) -> anyhow::Result<()> {
    let texts = files.iter().map(|p| read(p)).collect::<anyhow::Result<Vec<_>>>()?;
    let results: Vec<Mutex<Option<anyhow::Result<String>>>> = files.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    thread::scope(|s| {
        for _ in 0..jobs.clamp(1, files.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= files.len() {
                    break;
                }
                let r = Instance::parse(&texts[i])
                    .with_context(|| files[i].display().to_string())
                    .and_then(|inst| Ok(count_stable_matchings(&inst)?.to_string()));
                *results[i].lock().unwrap() = Some(r);
            });
        }
    });
    for (path, r) in files.iter().zip(results) {
        let count = r.into_inner().unwrap().expect("every file is processed")?;
        if files.len() == 1 {
            writeln!(out, "{count}")?;
        } else {
            writeln!(out, "{}: {count}", path.display())?;
        }
    }
    Ok(())
}

fn count(args: &CountArgs, out: &mut impl Write) -> anyhow::Result<()> {
    if !args.instance.is_empty() {
        return count_files(&args.instance, args.jobs, out);
    }
    let g = load_dag(args.dag.as_deref().expect("clap requires --dag"))?;
    let x = nice_decomposition(&g, args.decomp.as_deref())?;
    writeln!(out, "{}", count_downsets_with_cap(&g, &x, args.width_cap)?)?;
    Ok(())
}

fn sample(instance: &Path, seed: u64, draws: usize, out: &mut impl Write) -> anyhow::Result<()> {
    let inst = load_instance(instance)?;
    let sampler = StableMatchingSampler::new(&inst)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..draws {
        let mu = sampler.sample(&mut rng)?;
        writeln!(out, "# draw {}", i + 1)?;
        out.write_all(inst.format_matching(&mu).as_bytes())?;
    }
    Ok(())
}

fn oracle(cmd: &OracleCommand, out: &mut impl Write) -> anyhow::Result<()> {
    match cmd {
        OracleCommand::Count { instance, cap } => {
            let inst = load_instance(instance)?;
            writeln!(out, "{}", all_stable_matchings_with_cap(&inst, *cap)?.len())?;
        }
        OracleCommand::Downsets { dag, list } => {
            let g = load_dag(dag)?;
            let mut n: u128 = 0;
            let mut lines = String::new();
            g.for_each_downset::<()>(|z| {
                n += 1;
                if *list {
                    let names: Vec<String> = z.iter().map(|v| (v + 1).to_string()).collect();
                    lines.push_str(&format!("{{{}}}\n", names.join(" ")));
                }
                std::ops::ControlFlow::Continue(())
            });
            out.write_all(lines.as_bytes())?;
            writeln!(out, "{n}")?;
        }
        OracleCommand::Pathwidth { dag, out: path } => {
            let (width, x) = pathwidth_exact_tiny(&load_dag(dag)?)?;
            writeln!(out, "{width}")?;
            if let Some(p) = path {
                write_file(p, &x.to_text())?;
            }
        }
        OracleCommand::Matchings { instance, cap } => {
            let inst = load_instance(instance)?;
            let all = all_stable_matchings_with_cap(&inst, *cap)?;
            for (i, mu) in all.iter().enumerate() {
                writeln!(out, "# matching {}", i + 1)?;
                out.write_all(inst.format_matching(mu).as_bytes())?;
            }
            writeln!(out, "# N={}", all.len())?;
        }
    }
    Ok(())
}

enum Outcome {
    Done,
    Mismatch,
}

fn run(cli: Cli, out: &mut impl Write) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Realize(args) => realize(&args, out)?,
        Command::Analyze { instance, dot } => analyze(&instance, dot.as_deref(), out)?,
        Command::Count(args) => count(&args, out)?,
        Command::Sample { instance, seed, draws } => sample(&instance, seed, draws, out)?,
        Command::Median { instance, upper } => {
            let inst = load_instance(&instance)?;
            let choice = if upper { MedianChoice::Upper } else { MedianChoice::Lower };
            let report = median_report(&inst, choice)?;
            out.write_all(with_scores(&inst, &report.matching, &report.total).as_bytes())?;
        }
        Command::Fair { instance, objective, cap } => {
            let inst = load_instance(&instance)?;
            let objective = match objective {
                FairObjective::Sexequal => Objective::SexEqual,
                FairObjective::Balanced => Objective::Balanced,
            };
            let (mu, _) = optimize_bruteforce(&inst, objective, cap)?;
            out.write_all(with_scores(&inst, &mu, &count_stable_matchings(&inst)?).as_bytes())?;
        }
        Command::Verify { poset, instance } => {
            let h = load_dag(&poset)?;
            let inst = load_instance(&instance)?;
            if check_realization(&h, &inst)? {
                writeln!(out, "ok")?;
            } else {
                writeln!(out, "mismatch")?;
                return Ok(Outcome::Mismatch);
            }
        }
        Command::Oracle(cmd) => oracle(&cmd, out)?,
    }
    Ok(Outcome::Done)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = run(cli, &mut out).and_then(|o| {
        out.flush()?;
        Ok(o)
    });
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Mismatch) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            let capped = e.chain().any(|c| matches!(c.downcast_ref::<Error>(), Some(Error::CapExceeded(_))));
            ExitCode::from(if capped { 3 } else { 2 })
        }
    }
}

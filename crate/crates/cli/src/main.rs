use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use rayon::prelude::*;

use planar_sep::constructions::ktv_family;
use planar_sep::engine::{solve, EngineError, Rule};
use planar_sep::format::{parse_instance, serialize_instance};
use planar_sep::gen::{random_instance, AssignmentMode, InstanceParams};
use planar_sep::lists::{check_instance, verify_coloring, Coloring, Instance};
use planar_sep::oracle::{exact_color, falsify_kd_choosability, FalsifyOutcome, SearchBudget};

const EXIT_FAILURE: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_UNSAT: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "planar-sep",
    version,
    about = "List coloring of plane graphs with separated lists"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file against the hypotheses.
    Validate { file: PathBuf },
    /// Color an instance with the reduction engine.
    Color {
        file: PathBuf,
        /// Write the reduction trace here, one JSON record per line.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Decide colorability by exhaustive search.
    Oracle { file: PathBuf },
    /// Generate a random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        sparsify: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "private-merge")]
        mode: AssignmentMode,
    },
    /// Emit the uncolorable K_{2,(k-1)^2} instance.
    Family {
        #[arg(long)]
        k: usize,
    },
    /// Search for lists showing the graph is not (k,d)-choosable.
    Falsify {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        budget: u64,
    },
    /// Solve a batch of random instances and write a CSV report.
    Bench {
        #[arg(long)]
        count: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value_t = 0)]
        sparsify: usize,
        #[arg(long, default_value = "private-merge")]
        mode: AssignmentMode,
        /// Write 0 in the solve_us column so the file is reproducible.
        #[arg(long)]
        no_timing: bool,
    },
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn print_coloring(phi: &Coloring) -> Result<()> {
    let mut out = std::io::stdout().lock();
    for (v, c) in phi.iter() {
        writeln!(out, "{v} {c}")?;
    }
    Ok(())
}

fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Validate { file } => {
            let report = check_instance(&read_instance(&file)?);
            if report.is_empty() {
                println!("ok");
                Ok(0)
            } else {
                print!("{report}");
                Ok(EXIT_FAILURE)
            }
        }
        Command::Color { file, trace } => {
            let inst = read_instance(&file)?;
            match solve(&inst) {
                Ok((phi, records)) => {
                    if !verify_coloring(&inst.graph, &inst.lists, &phi) {
                        anyhow::bail!("engine produced an invalid coloring");
                    }
                    if let Some(path) = trace {
                        let mut text = String::new();
                        for r in &records.records {
                            text.push_str(&serde_json::to_string(r)?);
                            text.push('\n');
                        }
                        fs::write(&path, text)
                            .with_context(|| format!("writing {}", path.display()))?;
                    }
                    print_coloring(&phi)?;
                    Ok(0)
                }
                Err(EngineError::PreconditionViolated(report)) => {
                    eprint!("{report}");
                    Ok(EXIT_PRECONDITION)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Oracle { file } => {
            let inst = read_instance(&file)?;
            match exact_color(&inst.graph, &inst.lists, &Coloring::new()) {
                Some(phi) => {
                    print_coloring(&phi)?;
                    Ok(0)
                }
                None => {
                    println!("unsat");
                    Ok(EXIT_UNSAT)
                }
            }
        }
        Command::Gen {
            n,
            sparsify,
            seed,
            mode,
        } => {
            let inst = random_instance(InstanceParams { n, sparsify, mode }, seed)?;
            print!("{}", serialize_instance(&inst));
            Ok(0)
        }
        Command::Family { k } => {
            let (g, lists) = ktv_family(k)?;
            let inst = Instance::new(g, Default::default(), Vec::new(), lists);
            print!("{}", serialize_instance(&inst));
            Ok(0)
        }
        Command::Falsify {
            file,
            k,
            d,
            seed,
            budget,
        } => {
            let inst = read_instance(&file)?;
            let hint = Some(&inst.lists).filter(|l| !l.is_empty());
            match falsify_kd_choosability(
                &inst.graph,
                k,
                d,
                SearchBudget::nodes(budget),
                seed,
                hint,
            ) {
                FalsifyOutcome::Certificate(lists) => {
                    for (v, l) in lists.iter() {
                        let colors: Vec<String> = l.iter().map(|c| c.to_string()).collect();
                        println!("list {v}: {}", colors.join(" "));
                    }
                }
                FalsifyOutcome::NoneFound => println!("none"),
            }
            Ok(0)
        }
        Command::Bench {
            count,
            n,
            seed,
            csv,
            sparsify,
            mode,
            no_timing,
        } => {
            let rows = bench(count, n, seed, sparsify, mode, no_timing)?;
            let mut text = String::from("seed,n,edges");
            for rule in &Rule::ALL[..Rule::ALL.len() - 1] {
                text.push(',');
                text.push_str(&rule.name().to_ascii_lowercase());
            }
            text.push_str(",solve_us,verified,fallbacks\n");
            for row in rows {
                text.push_str(&row);
                text.push('\n');
            }
            fs::write(&csv, text).with_context(|| format!("writing {}", csv.display()))?;
            Ok(0)
        }
    }
}

fn bench(
    count: u64,
    n: usize,
    seed: u64,
    sparsify: usize,
    mode: AssignmentMode,
    no_timing: bool,
) -> Result<Vec<String>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .stack_size(64 << 20)
        .build()?;
    let mut rows: Vec<(u64, String)> = pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(|i| -> Result<(u64, String)> {
                let s = seed.wrapping_add(i);
                let inst = random_instance(InstanceParams { n, sparsify, mode }, s)?;
                let started = Instant::now();
                let (phi, trace) = solve(&inst).with_context(|| format!("seed {s}"))?;
                let us = if no_timing {
                    0
                } else {
                    started.elapsed().as_micros()
                };
                let counts = trace.rule_counts();
                let mut row = format!(
                    "{s},{},{}",
                    inst.graph.vertex_count(),
                    inst.graph.edge_count()
                );
                for c in &counts[..counts.len() - 1] {
                    row.push_str(&format!(",{c}"));
                }
                let verified = verify_coloring(&inst.graph, &inst.lists, &phi);
                row.push_str(&format!(",{us},{verified},{}", trace.fallbacks()));
                Ok((s, row))
            })
            .collect::<Result<_>>()
    })?;
    rows.sort_by_key(|(s, _)| *s);
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    // Deep reductions recurse once per rule application.
    let worker = std::thread::Builder::new()
        .stack_size(256 << 20)
        .spawn(move || run(cli.command))
        .expect("spawn worker thread");
    match worker.join() {
        Ok(Ok(code)) => ExitCode::from(code),
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILURE)
        }
        Err(_) => ExitCode::from(EXIT_FAILURE),
    }
}

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use bellforge_core::functional::{dot_functional, resolve_functional, save_functional};
use bellforge_core::localbound::{local_bound_graycode_with, LocalBoundOptions, DEFAULT_MAX_EXPONENT};
use bellforge_core::polyhedra::{named_vertex_set, Orientation, NAMED_SETS};
use bellforge_core::quantum::{seesaw_max, SeeSawConfig};
use bellforge_core::report::{buckyball_report, table1, verify_appendix, Report};
use bellforge_core::robustness::{
    critical_visibility, robustness_search_with, NoiseSchedule, RobustnessConfig,
    RobustnessTrace,
};
use bellforge_core::{Error, VertexSet};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

mod output;

use output::{emit, write_json_file, Table};

const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "bellforge", version, about = "Polyhedral Bell inequalities: bounds, quantum values, noise robustness")]
struct Cli {
    /// Emit machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for enumeration and see-saw restarts.
    #[arg(long, global = true, env = "BELLFORGE_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List, show or export vertex sets.
    Solids {
        #[command(subcommand)]
        action: SolidsAction,
    },
    /// Build the dot-product functional of two vertex sets.
    Build {
        #[arg(long)]
        alice: String,
        #[arg(long)]
        bob: String,
        #[arg(long, value_enum, default_value_t = OrientationArg::Canonical)]
        orientation: OrientationArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact local bound of a functional.
    Bounds {
        /// Built-in name (chsh, cuboct, icodod, appendix) or a functional file.
        #[arg(long)]
        functional: String,
        #[arg(long, default_value_t = DEFAULT_MAX_EXPONENT)]
        max_exponent: usize,
    },
    /// See-saw estimate of the quantum value.
    Quantum {
        #[arg(long)]
        functional: String,
        #[command(flatten)]
        seesaw: SeeSawArgs,
        /// Write Alice's Bloch directions as a vertex-set file (dim 3 only).
        #[arg(long)]
        alice_out: Option<PathBuf>,
        /// Write Bob's Bloch directions as a vertex-set file (dim 3 only).
        #[arg(long)]
        bob_out: Option<PathBuf>,
    },
    /// Critical white-noise visibility.
    Visibility {
        #[arg(long, required_unless_present = "functional", conflicts_with = "functional")]
        local: Option<f64>,
        #[arg(long, required_unless_present = "functional", conflicts_with = "functional")]
        quantum: Option<f64>,
        /// Compute both bounds for this functional instead.
        #[arg(long)]
        functional: Option<String>,
        #[command(flatten)]
        seesaw: SeeSawArgs,
    },
    /// Local and quantum bounds for every pair of Platonic solids.
    Table1 {
        #[arg(long, value_enum, default_value_t = OrientationArg::Polar)]
        orientation: OrientationArg,
        /// Also run the see-saw at dimension 3 for every pair.
        #[arg(long)]
        seesaw: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Bounds of the 30-setting buckyball inequality.
    Buckyball,
    /// Check the packaged 30-setting inequality against its reference bounds.
    VerifyAppendix {
        #[command(flatten)]
        seesaw: SeeSawArgs,
    },
    /// Iterated separating-hyperplane search for noise-robust inequalities.
    GilbertSearch {
        #[arg(long)]
        alice: String,
        #[arg(long)]
        bob: String,
        #[arg(long, default_value_t = 0.005)]
        noise_step: f64,
        #[arg(long, default_value_t = 50)]
        max_rounds: usize,
        #[arg(long, default_value_t = 5)]
        patience: usize,
        #[arg(long, value_enum, default_value_t = ScheduleArg::Fixed)]
        schedule: ScheduleArg,
        #[arg(long, default_value_t = 2000)]
        gilbert_iter: usize,
        #[arg(long, default_value_t = 100)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trace file, rewritten after every round.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum SolidsAction {
    List,
    Show {
        name: String,
        #[arg(long, value_enum, default_value_t = OrientationArg::Canonical)]
        orientation: OrientationArg,
    },
    Export {
        name: String,
        #[arg(long, value_enum, default_value_t = OrientationArg::Canonical)]
        orientation: OrientationArg,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug, Clone)]
struct SeeSawArgs {
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 100)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SeeSawArgs {
    fn config(&self, threads: Option<usize>) -> SeeSawConfig {
        SeeSawConfig {
            dim: self.dim,
            restarts: self.restarts,
            seed: self.seed,
            threads,
            ..SeeSawConfig::default()
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OrientationArg {
    Canonical,
    Polar,
}

impl From<OrientationArg> for Orientation {
    fn from(o: OrientationArg) -> Self {
        match o {
            OrientationArg::Canonical => Orientation::Canonical,
            OrientationArg::Polar => Orientation::Polar,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ScheduleArg {
    Fixed,
    Cumulative,
}

enum Failure {
    Error(Error),
    ChecksFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::ChecksFailed) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::InvalidInput(_) => 2,
                Error::Capacity { .. } => 3,
                _ => 1,
            })
        }
    }
}

fn local_options(cli: &Cli, max_exponent: usize) -> LocalBoundOptions {
    LocalBoundOptions {
        threads: cli.threads,
        max_exponent,
        ..LocalBoundOptions::default()
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let json = cli.json;
    match &cli.command {
        Command::Solids { action } => solids(action, json)?,
        Command::Build {
            alice,
            bob,
            orientation,
            out,
        } => {
            let a = named_vertex_set(alice, (*orientation).into())?;
            let b = named_vertex_set(bob, (*orientation).into())?;
            let f = dot_functional(&a, &b)?;
            save_functional(&f, out)?;
            emit(
                json,
                json!({"schema": SCHEMA, "command": "build", "label": f.label,
                       "n_a": f.n_a(), "n_b": f.n_b(), "out": out}),
                || format!("wrote {} ({}×{}) to {}", f.label, f.n_a(), f.n_b(), out.display()),
            );
        }
        Command::Bounds {
            functional,
            max_exponent,
        } => {
            let f = resolve_functional(functional)?;
            let start = Instant::now();
            let r = local_bound_graycode_with(&f, &local_options(cli, *max_exponent))?;
            let elapsed = start.elapsed();
            emit(
                json,
                json!({"schema": SCHEMA, "command": "bounds", "functional": f.label,
                       "n_a": f.n_a(), "n_b": f.n_b(), "local": r.value,
                       "witness": r.witness, "enumerated": r.enumerated_count}),
                || {
                    format!(
                        "functional  {} ({}×{})\nlocal bound {}\nwitness A   {}\nwitness B   {}\nenumerated  {}\nwall time   {:.3} s",
                        f.label,
                        f.n_a(),
                        f.n_b(),
                        r.value,
                        signs(&r.witness.a_signs),
                        signs(&r.witness.b_signs),
                        r.enumerated_count,
                        elapsed.as_secs_f64()
                    )
                },
            );
        }
        Command::Quantum {
            functional,
            seesaw,
            alice_out,
            bob_out,
        } => {
            let f = resolve_functional(functional)?;
            let start = Instant::now();
            let q = seesaw_max(&f, &seesaw.config(cli.threads))?;
            let local = local_bound_graycode_with(&f, &local_options(cli, DEFAULT_MAX_EXPONENT))?;
            let vis = critical_visibility(local.value, q.value)?;
            let elapsed = start.elapsed();
            if alice_out.is_some() || bob_out.is_some() {
                let (a, b) = q.bloch_measurements().ok_or_else(|| {
                    Error::InvalidInput("vector output needs --dim 3".into())
                })?;
                if let Some(path) = alice_out {
                    VertexSet::new(format!("{}-alice", f.label), a).save(path)?;
                }
                if let Some(path) = bob_out {
                    VertexSet::new(format!("{}-bob", f.label), b).save(path)?;
                }
            }
            emit(
                json,
                json!({"schema": SCHEMA, "command": "quantum", "functional": f.label,
                       "dim": seesaw.dim, "seed": seesaw.seed, "quantum": q.value,
                       "local": local.value, "gap": q.value - local.value,
                       "visibility": vis.visibility, "violation": vis.violation,
                       "restarts_used": q.restarts_used, "converged": q.converged,
                       "alice_vectors": q.alice_vectors, "bob_vectors": q.bob_vectors}),
                || {
                    format!(
                        "functional  {} ({}×{})\nquantum     {} (dim {}, {} starts)\nlocal bound {}\ngap         {}\nvisibility  {}{}\nwall time   {:.3} s",
                        f.label,
                        f.n_a(),
                        f.n_b(),
                        q.value,
                        seesaw.dim,
                        q.restarts_used,
                        local.value,
                        q.value - local.value,
                        vis.visibility,
                        if vis.violation { "" } else { " (no violation)" },
                        elapsed.as_secs_f64()
                    )
                },
            );
        }
        Command::Visibility {
            local,
            quantum,
            functional,
            seesaw,
        } => {
            let (label, l, q) = match functional {
                Some(spec) => {
                    let f = resolve_functional(spec)?;
                    let l = local_bound_graycode_with(&f, &local_options(cli, DEFAULT_MAX_EXPONENT))?
                        .value;
                    let q = seesaw_max(&f, &seesaw.config(cli.threads))?.value;
                    (Some(f.label), l, q)
                }
                None => (None, local.unwrap_or_default(), quantum.unwrap_or_default()),
            };
            let v = critical_visibility(l, q)?;
            emit(
                json,
                json!({"schema": SCHEMA, "command": "visibility", "functional": label,
                       "local": l, "quantum": q, "visibility": v.visibility,
                       "violation": v.violation}),
                || {
                    format!(
                        "visibility {}{}",
                        v.visibility,
                        if v.violation { "" } else { " (no violation)" }
                    )
                },
            );
        }
        Command::Table1 {
            orientation,
            seesaw,
            seed,
        } => {
            let cfg = SeeSawConfig {
                seed: *seed,
                threads: cli.threads,
                ..SeeSawConfig::default()
            };
            let rows = table1(
                (*orientation).into(),
                &local_options(cli, DEFAULT_MAX_EXPONENT),
                seesaw.then_some(&cfg),
            )?;
            let orientation: Orientation = (*orientation).into();
            emit(
                json,
                json!({"schema": SCHEMA, "command": "table1",
                       "orientation": orientation, "rows": rows}),
                || {
                    let mut t = Table::new(&[
                        "alice", "bob", "local", "reference", "quantum", "reference", "visibility",
                        "see-saw", "note",
                    ]);
                    for r in &rows {
                        t.row(vec![
                            r.alice.to_string(),
                            r.bob.to_string(),
                            format!("{:.4}", r.row.local),
                            r.reference_local.clone(),
                            format!("{:.4}", r.row.quantum),
                            r.reference_quantum.clone(),
                            format!("{:.4}", r.row.visibility),
                            r.seesaw.map_or("-".into(), |v| format!("{v:.4}")),
                            if r.orientation_divergent {
                                "orientation-divergent".into()
                            } else if !r.row.violated {
                                "no violation".into()
                            } else {
                                String::new()
                            },
                        ]);
                    }
                    t.render()
                },
            );
        }
        Command::Buckyball => {
            let report = buckyball_report(&local_options(cli, DEFAULT_MAX_EXPONENT))?;
            print_report(json, "buckyball", &report)?;
        }
        Command::VerifyAppendix { seesaw } => {
            let start = Instant::now();
            let report = verify_appendix(
                &local_options(cli, DEFAULT_MAX_EXPONENT),
                &seesaw.config(cli.threads),
            )?;
            if !json {
                eprintln!("wall time {:.3} s", start.elapsed().as_secs_f64());
            }
            print_report(json, "verify-appendix", &report)?;
        }
        Command::GilbertSearch {
            alice,
            bob,
            noise_step,
            max_rounds,
            patience,
            schedule,
            gilbert_iter,
            restarts,
            seed,
            out,
        } => gilbert_search(
            cli,
            GilbertArgs {
                alice,
                bob,
                noise_step: *noise_step,
                max_rounds: *max_rounds,
                patience: *patience,
                schedule: *schedule,
                gilbert_iter: *gilbert_iter,
                restarts: *restarts,
                seed: *seed,
                out: out.as_ref(),
            },
        )?,
    }
    Ok(())
}

fn signs(s: &[i8]) -> String {
    s.iter().map(|&v| if v > 0 { '+' } else { '-' }).collect()
}

fn solids(action: &SolidsAction, json: bool) -> Result<(), Failure> {
    match action {
        SolidsAction::List => {
            let sets: Vec<Value> = NAMED_SETS
                .iter()
                .map(|name| {
                    let n = named_vertex_set(name, Orientation::Canonical).map(|s| s.len());
                    json!({"name": name, "vertices": n.unwrap_or(0)})
                })
                .collect();
            emit(json, json!({"schema": SCHEMA, "command": "solids list", "sets": sets}), || {
                let mut t = Table::new(&["name", "vertices"]);
                for s in &sets {
                    t.row(vec![s["name"].as_str().unwrap_or("").to_string(), s["vertices"].to_string()]);
                }
                t.render()
            });
        }
        SolidsAction::Show { name, orientation } => {
            let set = named_vertex_set(name, (*orientation).into())?;
            emit(
                json,
                json!({"schema": SCHEMA, "command": "solids show", "set": set,
                       "isotropy_defect": set.isotropy_defect(),
                       "antipodally_closed": set.is_antipodally_closed()}),
                || {
                    let mut t = Table::new(&["#", "x", "y", "z"]);
                    for (i, v) in set.vertices.iter().enumerate() {
                        t.row(vec![
                            i.to_string(),
                            format!("{:+.6}", v.x()),
                            format!("{:+.6}", v.y()),
                            format!("{:+.6}", v.z()),
                        ]);
                    }
                    format!("{} ({} vertices)\n{}", set.name, set.len(), t.render())
                },
            );
        }
        SolidsAction::Export {
            name,
            orientation,
            out,
        } => {
            let set = named_vertex_set(name, (*orientation).into())?;
            set.save(out)?;
            emit(
                json,
                json!({"schema": SCHEMA, "command": "solids export", "name": set.name,
                       "vertices": set.len(), "out": out}),
                || format!("wrote {} ({} vertices) to {}", set.name, set.len(), out.display()),
            );
        }
    }
    Ok(())
}

fn print_report(json: bool, command: &str, report: &Report) -> Result<(), Failure> {
    emit(
        json,
        json!({"schema": SCHEMA, "command": command, "row": report.row,
               "checks": report.checks, "passed": report.passed()}),
        || {
            let mut t = Table::new(&["check", "value", "expected", "tolerance", "result"]);
            for c in &report.checks {
                t.row(vec![
                    c.name.clone(),
                    format!("{:.6}", c.value),
                    format!("{}", c.expected),
                    format!("{:e}", c.tolerance),
                    if c.pass { "pass".into() } else { "FAIL".into() },
                ]);
            }
            format!(
                "{}: local {}, quantum {}, visibility {}\n{}",
                report.row.label,
                report.row.local,
                report.row.quantum,
                report.row.visibility,
                t.render()
            )
        },
    );
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::ChecksFailed)
    }
}

struct GilbertArgs<'a> {
    alice: &'a str,
    bob: &'a str,
    noise_step: f64,
    max_rounds: usize,
    patience: usize,
    schedule: ScheduleArg,
    gilbert_iter: usize,
    restarts: usize,
    seed: u64,
    out: Option<&'a PathBuf>,
}

fn gilbert_search(cli: &Cli, args: GilbertArgs<'_>) -> Result<(), Failure> {
    let alice = named_vertex_set(args.alice, Orientation::Canonical)?;
    let bob = named_vertex_set(args.bob, Orientation::Canonical)?;
    let mut config = RobustnessConfig {
        noise_step: args.noise_step,
        max_rounds: args.max_rounds,
        patience: args.patience,
        schedule: match args.schedule {
            ScheduleArg::Fixed => NoiseSchedule::Fixed,
            ScheduleArg::Cumulative => NoiseSchedule::Cumulative,
        },
        ..RobustnessConfig::default()
    };
    config.gilbert.max_iter = args.gilbert_iter;
    config.gilbert.seed = args.seed;
    config.gilbert.local = local_options(cli, DEFAULT_MAX_EXPONENT);
    config.seesaw = SeeSawConfig {
        restarts: args.restarts,
        seed: args.seed,
        threads: cli.threads,
        ..SeeSawConfig::default()
    };

    let header = |rounds: &[Value], complete: Option<&RobustnessTrace>| {
        json!({"schema": SCHEMA, "command": "gilbert-search", "alice": alice.name,
               "bob": bob.name, "noise_step": args.noise_step, "seed": args.seed,
               "rounds": rounds, "complete": complete.is_some(),
               "best_visibility": complete.map(|t| t.best_visibility),
               "stop_reason": complete.map(|t| t.stop_reason)})
    };
    let mut rounds: Vec<Value> = Vec::new();
    let mut write_error = None;
    let trace = robustness_search_with(&alice, &bob, &config, |round| {
        rounds.push(serde_json::to_value(round).unwrap_or(Value::Null));
        if !cli.json {
            eprintln!(
                "round {:>3}: local {:.6} quantum {:.6} visibility {:.6}",
                round.round, round.local, round.quantum, round.visibility
            );
        }
        if let Some(path) = args.out {
            if let Err(e) = write_json_file(path, &header(&rounds, None)) {
                write_error.get_or_insert(e);
            }
        }
    })?;
    if let Some(e) = write_error {
        return Err(e.into());
    }
    let doc = header(&rounds, Some(&trace));
    if let Some(path) = args.out {
        write_json_file(path, &doc)?;
    }
    emit(cli.json, doc, || {
        format!(
            "{} rounds, best visibility {} ({:?})",
            trace.rounds.len(),
            trace.best_visibility,
            trace.stop_reason
        )
    });
    Ok(())
}

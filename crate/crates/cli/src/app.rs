//! Argument parsing, dispatch and exit codes.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use zeroclass::ideal_terms::TermBounds;
use zeroclass::workspace::Workspace;
use zeroclass::{fixtures, Error};

use crate::commands::{self, Ctx, Settings};
use crate::report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "zeroclass",
    version,
    about = "Zero-classes, clots, ideals and connectors of finite pointed algebras"
)]
pub struct Cli {
    /// Workspace file; defaults to the bundled examples.
    #[arg(long, global = true, value_name = "PATH")]
    pub workspace: Option<PathBuf>,
    /// Maximum term depth for the ideal-term search.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Maximum number of x and of y variables in ideal terms.
    #[arg(long = "arity-bound", global = true)]
    pub arity_bound: Option<usize>,
    /// Certificate pool: `default`, algebra names, or `default,NAME,...`.
    #[arg(long, global = true)]
    pub pool: Option<String>,
    /// Work budget for connector extension and the ideal-term search.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Exit with status 3 when some verdict is unknown.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Also write the report as JSON (`-` for stdout instead of text).
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Replay every artifact in a JSON report.
    #[arg(long, value_name = "PATH")]
    pub replay: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// List all subuniverses.
    Subalgebras { algebra: String },
    /// List all congruences.
    Congruences { algebra: String },
    /// Zero-class of a relation from the algebra.
    ZeroClass { algebra: String, relation: String },
    /// Normalisation of a relation from the algebra.
    Normalise { algebra: String, relation: String },
    /// Subalgebra, normal, kernel, clot and ideal verdicts for a subset.
    Classify {
        algebra: String,
        subset: String,
        #[arg(long)]
        variety: Option<String>,
    },
    /// Exhaustive search for endorelations with the subset as zero-class.
    EndorelationSearch { algebra: String, subset: String },
    /// Search the pool for an ideal certificate.
    Certify {
        algebra: String,
        subset: String,
        #[arg(long)]
        variety: Option<String>,
    },
    /// Left-split relation with a clot as zero-class, onto a quotient.
    ConstructLeftsplit {
        algebra: String,
        clot: String,
        /// Pairs generating the congruence (`{}` for the identity).
        quotient_pairs: String,
    },
    /// The reflexive relation whose kernel maps onto a zero-class.
    #[command(name = "construct-T")]
    ConstructT { relation: String },
    /// Do two homomorphisms with a common codomain commute?
    CommuteHuq { alpha: String, gamma: String },
    /// Do two reflexive relations on an algebra commute? Inline pair sets
    /// generate a relation together with the diagonal.
    CommuteSmith { algebra: String, r: String, s: String },
    /// Do two left-split spans commute?
    CommuteLeftsplit {
        f: String,
        r: String,
        alpha: String,
        g: String,
        s: String,
        gamma: String,
    },
    /// Search for a Maltsev term.
    Maltsev {
        #[arg(long)]
        variety: String,
    },
    /// Abelian group structure from a connector of the total relation with itself.
    Abelianize { algebra: String },
    /// Kernel reflection instance for a pair of left-split spans `f,r,alpha,g,s,gamma`.
    PtInstance {
        spec: String,
        #[arg(long)]
        variety: Option<String>,
    },
    /// Check the bundled three-element example.
    VerifyPaperExample,
    /// Run the tasks declared in the workspace.
    Tasks,
}

fn exit_for(e: &Error) -> i32 {
    match e {
        Error::Invariant(_) => EXIT_INVARIANT,
        _ => EXIT_VALIDATION,
    }
}

fn settings(cli: &Cli) -> Settings {
    let mut bounds = match cli.depth {
        Some(d) => TermBounds::with_depth(d),
        None => TermBounds::default(),
    };
    if let Some(k) = cli.arity_bound {
        bounds.max_x_vars = Some(k);
        bounds.max_y_vars = Some(k);
    }
    let mut s = Settings {
        bounds,
        pool: cli.pool.clone(),
        ..Settings::default()
    };
    if let Some(b) = cli.budget {
        s.budget = b;
        s.bounds.work_budget = b;
    }
    s
}

fn load_workspace(cli: &Cli) -> Result<Workspace, (i32, String)> {
    let src = match &cli.workspace {
        Some(p) => std::fs::read_to_string(p).map_err(|e| (EXIT_VALIDATION, format!("{}: {e}", p.display())))?,
        None => format!("{}\n{}", fixtures::EXAMPLE_WORKSPACE, fixtures::GROUPS_WORKSPACE),
    };
    Workspace::parse(&src).map_err(|e| {
        let origin = cli
            .workspace
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or("<builtin>".into());
        (exit_for(&e), format!("{origin}: {e}"))
    })
}

pub fn execute(ctx: &Ctx, cmd: &Command) -> zeroclass::Result<Report> {
    use Command::*;
    match cmd {
        Subalgebras { algebra } => commands::subalgebras(ctx, algebra),
        Congruences { algebra } => commands::congruences(ctx, algebra),
        ZeroClass { algebra, relation } => commands::zero_class_report(ctx, algebra, relation, false),
        Normalise { algebra, relation } => commands::zero_class_report(ctx, algebra, relation, true),
        Classify {
            algebra,
            subset,
            variety,
        } => commands::classify_cmd(ctx, algebra, subset, variety.as_deref()),
        EndorelationSearch { algebra, subset } => commands::endorelation_cmd(ctx, algebra, subset),
        Certify {
            algebra,
            subset,
            variety,
        } => commands::certify_cmd(ctx, algebra, subset, variety.as_deref()),
        ConstructLeftsplit {
            algebra,
            clot,
            quotient_pairs,
        } => commands::construct_leftsplit_cmd(ctx, algebra, clot, quotient_pairs),
        ConstructT { relation } => commands::construct_t_cmd(ctx, relation),
        CommuteHuq { alpha, gamma } => commands::commute_huq_cmd(ctx, alpha, gamma),
        CommuteSmith { algebra, r, s } => commands::commute_smith_cmd(ctx, algebra, r, s),
        CommuteLeftsplit {
            f,
            r,
            alpha,
            g,
            s,
            gamma,
        } => commands::commute_leftsplit_cmd(ctx, &[f, r, alpha, g, s, gamma]),
        Maltsev { variety } => commands::maltsev_cmd(ctx, variety),
        Abelianize { algebra } => commands::abelianize_cmd(ctx, algebra),
        PtInstance { spec, variety } => commands::pt_instance_cmd(ctx, spec, variety.as_deref()),
        VerifyPaperExample => commands::verify_example(&ctx.settings),
        Tasks => run_tasks(ctx),
    }
}

/// Runs the workspace tasks in parallel and joins their reports in
/// declaration order.
fn run_tasks(ctx: &Ctx) -> zeroclass::Result<Report> {
    let results: Vec<zeroclass::Result<Report>> = ctx
        .ws
        .tasks
        .par_iter()
        .map(|task| {
            let argv = std::iter::once("zeroclass".to_string()).chain(task.args.iter().cloned());
            let cli = Cli::try_parse_from(argv).map_err(|e| Error::Parse {
                line: task.line,
                column: 1,
                message: e.kind().to_string(),
            })?;
            let cmd = match &cli.command {
                Some(Command::Tasks) | None => {
                    return Err(Error::Parse {
                        line: task.line,
                        column: 1,
                        message: "task must name a command other than tasks".into(),
                    })
                }
                Some(c) => c.clone(),
            };
            let mut s = settings(&cli);
            if cli.depth.is_none() && cli.arity_bound.is_none() && cli.budget.is_none() {
                s.bounds = ctx.settings.bounds;
                s.budget = ctx.settings.budget;
            }
            if s.pool.is_none() {
                s.pool = ctx.settings.pool.clone();
            }
            execute(
                &Ctx {
                    ws: ctx.ws,
                    settings: s,
                },
                &cmd,
            )
        })
        .collect();
    let mut out = Report::default();
    for (task, r) in ctx.ws.tasks.iter().zip(results) {
        let mut r = r?;
        if let Some(first) = r.sections.first_mut() {
            first.title = format!("task {}: {}", task.line, task.args.join(" "));
        }
        out.absorb(r);
    }
    Ok(out)
}

fn replay(path: &PathBuf, out: &mut dyn Write) -> Result<i32, (i32, String)> {
    let src = std::fs::read_to_string(path).map_err(|e| (EXIT_VALIDATION, format!("{}: {e}", path.display())))?;
    let report: Report =
        serde_json::from_str(&src).map_err(|e| (EXIT_VALIDATION, format!("{}: {e}", path.display())))?;
    let mut failed = 0usize;
    for (i, a) in report.artifacts.iter().enumerate() {
        let status = match a.replay() {
            Ok(()) => "ok".to_string(),
            Err(e) => {
                failed += 1;
                format!("failed: {e}")
            }
        };
        let _ = writeln!(out, "replay.{}.{} = {status}", i + 1, a.kind());
    }
    let _ = writeln!(out, "replayed = {}", report.artifacts.len());
    let _ = writeln!(out, "failed = {failed}");
    Ok(if failed == 0 { EXIT_OK } else { EXIT_INVARIANT })
}

fn threads() -> usize {
    std::env::var("ZEROCLASS_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if e.use_stderr() {
                let _ = write!(err, "{e}");
            } else {
                let _ = write!(out, "{e}");
            }
            return code;
        }
    };
    match run_cli(&cli, out) {
        Ok(code) => code,
        Err((code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn run_cli(cli: &Cli, out: &mut dyn Write) -> Result<i32, (i32, String)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads())
        .build()
        .map_err(|e| (EXIT_INVARIANT, e.to_string()))?;
    if let Some(path) = &cli.replay {
        if cli.command.is_some() {
            return Err((EXIT_USAGE, "--replay takes no subcommand".into()));
        }
        return replay(path, out);
    }
    let Some(cmd) = &cli.command else {
        return Err((EXIT_USAGE, "no subcommand given (try --help)".into()));
    };
    let ws = load_workspace(cli)?;
    let ctx = Ctx {
        ws: &ws,
        settings: settings(cli),
    };
    let report = pool
        .install(|| execute(&ctx, cmd))
        .map_err(|e| (exit_for(&e), e.to_string()))?;
    match cli.json.as_deref() {
        Some(p) if p.as_os_str() == "-" => {
            let _ = out.write_all(report.json().as_bytes());
        }
        Some(p) => {
            let _ = out.write_all(report.text().as_bytes());
            std::fs::write(p, report.json()).map_err(|e| (EXIT_VALIDATION, format!("{}: {e}", p.display())))?;
        }
        None => {
            let _ = out.write_all(report.text().as_bytes());
        }
    }
    Ok(if cli.strict && report.unknown {
        EXIT_UNKNOWN
    } else {
        EXIT_OK
    })
}

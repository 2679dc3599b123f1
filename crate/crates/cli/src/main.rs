//! `cardpipe`: validate, run, render and grade card pipelines, or serve the classroom API.

use std::fmt::Write as _;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use cardpipe_core::activity::{
    grade_answer, AnswerPayload, QuestionBank, ScoringPolicy, SessionStore, TimeBonus, Verdict,
};
use cardpipe_core::catalog::Catalog;
use cardpipe_core::chart::render_svg;
use cardpipe_core::datasets::DatasetRegistry;
use cardpipe_core::pipeline::{
    Engine, ExecutionTrace, Pipeline, StepValue, ValidationReport, VariableStore,
};
use cardpipe_core::table::{serialize_csv, CsvOptions};
use cardpipe_server::{AppState, ServerConfig};
use clap::{Args, Parser, Subcommand};

/// Exit status for usage and IO problems.
const USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "cardpipe",
    version,
    about = "Card-based data pipelines for the classroom"
)]
struct Cli {
    #[command(flatten)]
    data: DataArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DataArgs {
    /// Extra datasets (`<id>/<id>.csv` + `<id>/manifest.json`); also the root for relative CSV paths
    #[arg(long, global = true, env = "CARDPIPE_DATA_DIR")]
    data_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a pipeline without running it
    Validate {
        pipeline: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run a pipeline and print its final output
    Run {
        pipeline: PathBuf,
        /// Print every step's output, in order
        #[arg(long)]
        trace: bool,
        /// Print the full trace document as JSON
        #[arg(long)]
        json: bool,
    },
    /// Run a pipeline that ends in a chart and write it as SVG
    Render {
        pipeline: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = 800, env = "CARDPIPE_WIDTH")]
        width: u32,
        #[arg(long, default_value_t = 500, env = "CARDPIPE_HEIGHT")]
        height: u32,
    },
    /// Grade a pipeline as the answer to a question
    Grade {
        question: String,
        pipeline: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Serve the HTTP API (and the web client, if given)
    Serve(ServeArgs),
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value_t = 8080, env = "CARDPIPE_PORT", value_parser = clap::value_parser!(u16).range(1..))]
    port: u16,
    #[arg(long, default_value = "127.0.0.1", env = "CARDPIPE_HOST")]
    host: String,
    /// Base of the dataset links handed to students, e.g. http://10.0.0.5:8080
    #[arg(long, env = "CARDPIPE_PUBLIC_URL")]
    public_url: Option<String>,
    /// Points for answering within the bonus window after a question opens
    #[arg(long, env = "CARDPIPE_TIME_BONUS")]
    time_bonus: Option<i64>,
    #[arg(long, default_value_t = 120, env = "CARDPIPE_BONUS_WINDOW")]
    bonus_window: i64,
    /// Points for every correct answer, replacing each question's own value
    #[arg(long, env = "CARDPIPE_BASE_POINTS")]
    base_points: Option<i64>,
    /// Directory for session event logs; sessions found there are resumed
    #[arg(long, env = "CARDPIPE_SESSION_DIR")]
    session_dir: Option<PathBuf>,
    /// Built web client to serve at /
    #[arg(long, env = "CARDPIPE_UI_DIR")]
    ui_dir: Option<PathBuf>,
}

/// A failure with the exit status it maps to.
struct Failure(u8, anyhow::Error);

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Failure {
        Failure(USAGE, e)
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}

fn dispatch(cli: Cli) -> Outcome {
    let public_url = match &cli.command {
        Command::Serve(s) => Some(
            s.public_url
                .clone()
                .unwrap_or_else(|| format!("http://localhost:{}", s.port)),
        ),
        _ => None,
    };
    let engine = engine(&cli.data, public_url)?;
    match cli.command {
        Command::Validate { pipeline, json } => validate(&engine, &pipeline, json),
        Command::Run {
            pipeline,
            trace,
            json,
        } => run(&engine, &pipeline, trace, json),
        Command::Render {
            pipeline,
            out,
            width,
            height,
        } => render(&engine, &pipeline, &out, width, height),
        Command::Grade {
            question,
            pipeline,
            json,
        } => grade(&engine, &question, &pipeline, json),
        Command::Serve(args) => serve(engine, args),
    }
}

fn engine(data: &DataArgs, public_url: Option<String>) -> anyhow::Result<Engine> {
    let mut registry = DatasetRegistry::bundled();
    if let Some(url) = public_url {
        registry = registry.with_base_url(url);
    }
    let mut engine_root = None;
    if let Some(dir) = &data.data_dir {
        registry
            .load_dir(dir)
            .with_context(|| format!("loading datasets from {}", dir.display()))?;
        engine_root = Some(dir.clone());
    }
    let engine = Engine::new(Catalog::builtin().clone(), registry);
    Ok(match engine_root {
        Some(root) => engine.with_file_root(root),
        None => engine,
    })
}

fn read_pipeline(path: &Path) -> anyhow::Result<Pipeline> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text)
        .with_context(|| format!("{} is not a pipeline document", path.display()))
}

fn print_report(report: &ValidationReport, out: &mut String) {
    if report.is_valid() {
        let _ = writeln!(out, "valid: {} steps", report.steps);
    }
    for e in &report.errors {
        let _ = writeln!(out, "step {}: {}: {}", e.step_index, e.code, e.message);
    }
}

fn to_json(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("output serializes")
}

fn validate(engine: &Engine, path: &Path, json: bool) -> Outcome {
    let report = engine.validate(&read_pipeline(path)?, None);
    if json {
        println!("{}", to_json(&report));
    } else {
        let mut out = String::new();
        print_report(&report, &mut out);
        print!("{out}");
    }
    Ok(if report.is_valid() { 0 } else { 1 })
}

/// Text form of one step value. Tables print as CSV, charts as their JSON spec.
fn describe(value: &StepValue, out: &mut String) {
    match value {
        StepValue::Table(t) => {
            let csv = serialize_csv(t, CsvOptions::default());
            out.push_str(&String::from_utf8_lossy(&csv));
        }
        StepValue::Scalar(c) => {
            let _ = writeln!(out, "{c}");
        }
        StepValue::Chart(c) => {
            let _ = writeln!(out, "{}", to_json(c));
        }
    }
}

fn run_pipeline(engine: &Engine, path: &Path) -> Result<ExecutionTrace, Failure> {
    let pipeline = read_pipeline(path)?;
    engine
        .execute(&pipeline, &mut VariableStore::new())
        .map_err(|report| {
            let mut out = String::new();
            print_report(&report, &mut out);
            Failure(1, anyhow!("pipeline is not valid\n{}", out.trim_end()))
        })
}

fn run(engine: &Engine, path: &Path, trace_steps: bool, json: bool) -> Outcome {
    if json {
        let report = engine.validate(&read_pipeline(path)?, None);
        if !report.is_valid() {
            println!("{}", to_json(&report));
            return Ok(1);
        }
    }
    let trace = run_pipeline(engine, path)?;
    if json {
        println!("{}", trace.to_json());
    } else {
        let mut out = String::new();
        if trace_steps {
            for s in &trace.steps {
                let _ = writeln!(out, "== step {} ({}): {}", s.step_index, s.card, s.summary);
                describe(&s.value, &mut out);
            }
        } else if let (Some(last), None) = (trace.final_output(), &trace.error) {
            describe(&last.value, &mut out);
        }
        print!("{out}");
    }
    match &trace.error {
        Some(e) => Err(Failure(
            1,
            anyhow!(
                "step {} ({}) failed: {}: {}",
                e.step_index,
                e.card,
                e.code,
                e.message
            ),
        )),
        None => Ok(0),
    }
}

fn render(engine: &Engine, path: &Path, out: &Path, width: u32, height: u32) -> Outcome {
    let trace = run_pipeline(engine, path)?;
    if let Some(e) = &trace.error {
        return Err(Failure(
            1,
            anyhow!(
                "step {} ({}) failed: {}: {}",
                e.step_index,
                e.card,
                e.code,
                e.message
            ),
        ));
    }
    let Some(StepValue::Chart(spec)) = trace.final_output().map(|o| &o.value) else {
        return Err(Failure(1, anyhow!("the pipeline does not end in a chart")));
    };
    let svg = render_svg(spec, width, height).map_err(|e| Failure(1, e.into()))?;
    std::fs::write(out, svg).with_context(|| format!("writing {}", out.display()))?;
    let report = spec.completeness();
    let missing: Vec<&str> = report.missing.iter().map(|e| e.label()).collect();
    if missing.is_empty() {
        println!("wrote {} ({} points)", out.display(), spec.data.len());
    } else {
        println!(
            "wrote {} ({} points, missing: {})",
            out.display(),
            spec.data.len(),
            missing.join(", ")
        );
    }
    Ok(0)
}

fn grade(engine: &Engine, question: &str, path: &Path, json: bool) -> Outcome {
    let bank = QuestionBank::builtin();
    let q = bank
        .get(question)
        .ok_or_else(|| anyhow!("no question `{question}`"))?;
    let pipeline = read_pipeline(path)?;
    let result =
        grade_answer(q, &AnswerPayload::Pipeline(pipeline), engine).map_err(anyhow::Error::from)?;
    if json {
        println!("{}", to_json(&result));
    } else {
        println!(
            "{}: {} ({} points)",
            result.verdict.as_str(),
            result.explanation,
            result.points_awarded
        );
    }
    Ok(if result.verdict == Verdict::Correct {
        0
    } else {
        1
    })
}

fn serve(engine: Engine, args: ServeArgs) -> Outcome {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_env("CARDPIPE_LOG")
                .unwrap_or_else(|_| "info,tower_http=debug".into()),
        )
        .init();
    let policy = ScoringPolicy {
        base_points: args.base_points,
        time_bonus: args.time_bonus.map(|points| TimeBonus {
            points,
            window_secs: args.bonus_window,
        }),
    };
    let engine = Arc::new(engine);
    let mut store = SessionStore::new(
        engine.clone(),
        Arc::new(QuestionBank::builtin().clone()),
        policy,
    );
    if let Some(dir) = &args.session_dir {
        store = store
            .with_log_dir(dir)
            .map_err(|e| anyhow!("session logs in {}: {e}", dir.display()))?;
    }
    let state = AppState::new(engine, Arc::new(store));
    let config = ServerConfig {
        ui_dir: args.ui_dir,
    };
    let addr: SocketAddr = format!("{}:{}", args.host, args.port)
        .parse()
        .with_context(|| format!("`{}` is not an IP address", args.host))?;
    let runtime = tokio::runtime::Runtime::new().context("starting the runtime")?;
    runtime
        .block_on(async move {
            let listener = tokio::net::TcpListener::bind(addr).await?;
            eprintln!("serving on http://{}", listener.local_addr()?);
            let app = cardpipe_server::router(state, &config);
            cardpipe_server::serve(listener, app, async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
        })
        .with_context(|| format!("serving on {addr}"))?;
    Ok(0)
}

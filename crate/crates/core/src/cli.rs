//! Command-line front end. Every command reads JSON files and writes one
//! pretty-printed JSON document with sorted keys.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use crate::anim::{plans_to_json, recommend_animations, AnimError, AnimationPlanCandidate};
use crate::edit::{diff, EditError};
use crate::keyframe::{recommend_keyframes, KeyframeError, KeyframeOptions, DEFAULT_MAX_KEYFRAMES, DEFAULT_OP_CAP};
use crate::spec::{parse_chart_value, ChartSpec, SpecError};
use crate::timeline::{compile, sample, CompileOptions, StaggerOrder, Timeline, TimelineError};

/// Environment variable overriding the largest op set the enumerator accepts.
pub const OP_CAP_ENV: &str = "GEMINI2_OP_CAP";

#[derive(Debug, Parser)]
#[command(name = "keystage", version, about = "Recommend keyframes and staged animations between charts")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Write the output document here instead of standard output.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the edit operations turning one chart into another.
    Diff { start: PathBuf, end: PathBuf },
    /// Rank keyframe sequences between two charts.
    RecommendKeyframes {
        start: PathBuf,
        end: PathBuf,
        #[arg(long, default_value_t = 5)]
        top_k: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_KEYFRAMES)]
        max_keyframes: usize,
    },
    /// Rank staged animation plans for a keyframe sequence.
    RecommendAnim {
        sequence: PathBuf,
        #[arg(long)]
        stages: usize,
        #[arg(long, default_value_t = 5)]
        top_k: usize,
    },
    /// Compile a keyframe sequence and a plan into a timeline.
    Compile {
        sequence: PathBuf,
        plan: PathBuf,
        /// Field joining elements across keyframes.
        #[arg(long)]
        key: Option<String>,
        #[arg(long, value_enum, default_value_t = StaggerArg::Data)]
        stagger_order: StaggerArg,
    },
    /// Sample a compiled timeline at normalized time t.
    Sample {
        timeline: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
    },
    /// Keyframes, animation plan and timeline in one go.
    Pipeline {
        start: PathBuf,
        end: PathBuf,
        #[arg(long)]
        stages: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_KEYFRAMES)]
        max_keyframes: usize,
        #[arg(long)]
        key: Option<String>,
        #[arg(long, value_enum, default_value_t = StaggerArg::Data)]
        stagger_order: StaggerArg,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StaggerArg {
    Data,
    Value,
}

impl From<StaggerArg> for StaggerOrder {
    fn from(s: StaggerArg) -> Self {
        match s {
            StaggerArg::Data => StaggerOrder::Data,
            StaggerArg::Value => StaggerOrder::Value,
        }
    }
}

/// A failed command: exit code plus a structured error document.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
    pub path: Option<String>,
}

impl CliError {
    fn new(code: i32, kind: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code,
            kind,
            message: message.into(),
            path: None,
        }
    }

    fn at(mut self, path: impl Into<String>) -> Self {
        self.path = Some(path.into());
        self
    }

    pub fn to_json(&self) -> Json {
        let mut body = json!({ "code": self.code, "kind": self.kind, "message": self.message });
        if let Some(p) = &self.path {
            body["path"] = json!(p);
        }
        json!({ "error": body })
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        let err = match &e {
            SpecError::Unsupported { .. } => CliError::new(2, "unsupported", e.to_string()),
            SpecError::Syntax(_) => CliError::new(1, "parse", e.to_string()),
            SpecError::Validation { .. } => CliError::new(1, "validation", e.to_string()),
        };
        match e.path() {
            Some(p) => err.at(p),
            None => err,
        }
    }
}

impl From<EditError> for CliError {
    fn from(e: EditError) -> Self {
        match e {
            EditError::Unsupported { ref path, .. } => CliError::new(2, "unsupported", e.to_string()).at(path.clone()),
            EditError::InapplicableOp { ref op, .. } => CliError::new(1, "inapplicable-op", e.to_string()).at(op.clone()),
            EditError::InvalidResult(inner) => inner.into(),
        }
    }
}

impl From<KeyframeError> for CliError {
    fn from(e: KeyframeError) -> Self {
        match e {
            KeyframeError::Edit(inner) => inner.into(),
            KeyframeError::EmptyDiff => CliError::new(3, "empty-diff", e.to_string()),
            KeyframeError::CombinatorialLimit { .. } => CliError::new(3, "combinatorial-limit", e.to_string()),
            KeyframeError::NoValidSequence => CliError::new(3, "no-valid-sequence", e.to_string()),
            KeyframeError::InvalidIntermediate { .. } => CliError::new(1, "invalid-intermediate", e.to_string()),
        }
    }
}

impl From<AnimError> for CliError {
    fn from(e: AnimError) -> Self {
        match e {
            AnimError::InfeasibleBudget { .. } => CliError::new(3, "infeasible-budget", e.to_string()),
            AnimError::TooFewKeyframes => CliError::new(1, "too-few-keyframes", e.to_string()),
            AnimError::InvalidPlan { ref path, .. } => CliError::new(1, "invalid-plan", e.to_string()).at(path.clone()),
        }
    }
}

impl From<TimelineError> for CliError {
    fn from(e: TimelineError) -> Self {
        let kind = match e {
            TimelineError::StepCount { .. } => "step-count",
            TimelineError::CoverageMismatch { .. } => "coverage-mismatch",
            TimelineError::JoinAmbiguity { .. } => "join-ambiguity",
            TimelineError::Render { .. } => "render",
            TimelineError::OutOfRange(_) => "out-of-range",
        };
        CliError::new(1, kind, e.to_string())
    }
}

fn read_json(path: &Path) -> Result<Json, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::new(1, "io", format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::new(1, "parse", format!("{}: {e}", path.display())))
}

fn read_chart(path: &Path) -> Result<ChartSpec, CliError> {
    Ok(parse_chart_value(&read_json(path)?)?)
}

/// Reads a keyframe sequence given as a ranked recommendation (first entry
/// wins), an object with a `keyframes` array, or a bare array of charts.
fn read_sequence(path: &Path) -> Result<Vec<ChartSpec>, CliError> {
    let json = read_json(path)?;
    let charts = match &json {
        Json::Array(items) if items.first().is_some_and(|x| x.get("keyframes").is_some()) => &items[0]["keyframes"],
        Json::Object(o) if o.contains_key("keyframes") => &o["keyframes"],
        _ => &json,
    };
    let charts = charts
        .as_array()
        .ok_or_else(|| CliError::new(1, "parse", "expected a keyframe array").at("keyframes"))?;
    charts.iter().map(|c| Ok(parse_chart_value(c)?)).collect()
}

fn op_cap() -> Result<usize, CliError> {
    match std::env::var(OP_CAP_ENV) {
        Err(_) => Ok(DEFAULT_OP_CAP),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::new(1, "config", format!("{OP_CAP_ENV} must be a non-negative integer, got `{v}`"))),
    }
}

fn execute(command: &Command) -> Result<Json, CliError> {
    match command {
        Command::Diff { start, end } => Ok(diff(&read_chart(start)?, &read_chart(end)?)?.to_json()),
        Command::RecommendKeyframes { start, end, top_k, max_keyframes } => {
            let options = KeyframeOptions { max_keyframes: *max_keyframes, top_k: *top_k, op_cap: op_cap()? };
            Ok(recommend_keyframes(&read_chart(start)?, &read_chart(end)?, &options)?.to_json())
        }
        Command::RecommendAnim { sequence, stages, top_k } => {
            Ok(plans_to_json(&recommend_animations(&read_sequence(sequence)?, *stages, *top_k)?))
        }
        Command::Compile { sequence, plan, key, stagger_order } => {
            let plan = AnimationPlanCandidate::from_json(&read_json(plan)?)?;
            let options = CompileOptions { key: key.clone(), stagger_order: (*stagger_order).into() };
            Ok(compile(&read_sequence(sequence)?, &plan.steps, &options)?.to_json())
        }
        Command::Sample { timeline, t } => {
            let tl = Timeline::from_json(&read_json(timeline)?)
                .map_err(|e| CliError::new(1, "parse", format!("{}: {e}", timeline.display())))?;
            let scene = sample(&tl, *t)?;
            Ok(serde_json::to_value(scene).expect("scene samples serialize"))
        }
        Command::Pipeline { start, end, stages, max_keyframes, key, stagger_order } => {
            let options = KeyframeOptions { max_keyframes: *max_keyframes, top_k: usize::MAX, op_cap: op_cap()? };
            let ranked = recommend_keyframes(&read_chart(start)?, &read_chart(end)?, &options)?;
            let mut last_err = None;
            for (i, seq) in ranked.sequences.iter().enumerate() {
                if seq.keyframes.len() - 1 > *stages {
                    continue;
                }
                match recommend_animations(&seq.keyframes, *stages, 1) {
                    Ok(plans) => {
                        let plan = &plans[0];
                        let opts = CompileOptions { key: key.clone(), stagger_order: (*stagger_order).into() };
                        let tl = compile(&seq.keyframes, &plan.steps, &opts)?;
                        return Ok(json!({
                            "sequence": seq.to_json(i + 1),
                            "plan": plan.to_json(1),
                            "timeline": tl.to_json(),
                        }));
                    }
                    Err(e @ AnimError::InfeasibleBudget { .. }) => last_err = Some(e),
                    Err(e) => return Err(e.into()),
                }
            }
            Err(match last_err {
                Some(e) => e.into(),
                None => CliError::new(3, "infeasible-budget", format!("no keyframe sequence fits in {stages} stages")),
            })
        }
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn render(doc: &Json) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Parse arguments and run one command. Returns the exit code together with
/// the text for standard output and standard error.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match CliConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => (0, e.to_string(), String::new()),
                _ => (1, String::new(), render(&CliError::new(1, "usage", e.to_string()).to_json())),
            }
        }
    };
    let result = execute(&config.command).and_then(|doc| {
        let text = render(&doc);
        match &config.output {
            None => Ok(text),
            Some(path) => std::fs::write(path, &text)
                .map(|_| String::new())
                .map_err(|e| CliError::new(1, "io", format!("cannot write {}: {e}", path.display()))),
        }
    });
    match result {
        Ok(out) => (0, out, String::new()),
        Err(e) => (e.code, String::new(), render(&e.to_json())),
    }
}

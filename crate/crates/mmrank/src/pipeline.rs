//! Declarative multi-step runner: each step takes a scheme (a file, a
//! standard scheme or the previous step's result), optionally morphs it
//! to another format, optionally searches, and persists its best scheme.
//!
//! Plan files are TOML:
//!
//! ```toml
//! [[step]]
//! name = "s222"
//! source = "std:2,2,2"
//! [step.search]
//! max_steps = 1000000
//! seed = 1
//! target_rank = 7
//!
//! [[step]]
//! source = "previous"
//! morph = "extend"
//! operand = "std:2,2,1"
//! [step.search]
//! max_steps = 1000000
//! seed = 2
//! ```
//!
//! `morph` is one of none, extend (with `operand`), restrict (with
//! `target` and optional `selector`, default keeps leading indices),
//! rotate, transpose, canonical, mod2. Omitting `[step.search]` makes a
//! step morph-only.

use std::fmt;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::io;
use crate::morph::Selector;
use crate::scheme::{AnyScheme, Format, Gf2Scheme, Ring};
use crate::search::{orchestrate_in, SearchConfig};

#[derive(Clone, Debug, Deserialize)]
pub struct Plan {
    #[serde(default, rename = "step")]
    pub steps: Vec<PlanStep>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct PlanStep {
    #[serde(default)]
    pub name: Option<String>,
    /// "previous", "std:n,m,p" (optionally "std:n,m,p:ring") or a file path.
    pub source: String,
    #[serde(default)]
    pub morph: Option<String>,
    /// Second operand for extend, same syntax as `source`.
    #[serde(default)]
    pub operand: Option<String>,
    /// Target format "n,m,p" for restrict.
    #[serde(default)]
    pub target: Option<String>,
    /// Kept indices per axis for restrict, e.g. "0,1;0,1,2;0,2".
    #[serde(default)]
    pub selector: Option<String>,
    #[serde(default)]
    pub search: Option<SearchConfig>,
}

#[derive(Clone, Debug)]
pub struct StepReport {
    pub name: String,
    pub format: Format,
    pub start_rank: usize,
    pub end_rank: usize,
    pub steps: u64,
    pub wall: Duration,
}

#[derive(Clone, Debug, Default)]
pub struct PipelineReport {
    pub steps: Vec<StepReport>,
}

impl fmt::Display for PipelineReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<16} {:>8} {:>11} {:>9} {:>12} {:>9}",
            "step", "format", "start rank", "end rank", "steps", "wall s"
        )?;
        for s in &self.steps {
            writeln!(
                f,
                "{:<16} {:>8} {:>11} {:>9} {:>12} {:>9.1}",
                s.name,
                s.format.to_string(),
                s.start_rank,
                s.end_rank,
                s.steps,
                s.wall.as_secs_f64()
            )?;
        }
        Ok(())
    }
}

pub fn parse_plan(text: &str) -> Result<Plan> {
    toml::from_str(text).map_err(|e| Error::Pipeline(format!("bad plan file: {e}")))
}

pub fn parse_format_triple(s: &str) -> Result<Format> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::InvalidFormat(format!(
            "expected n,m,p, got {s:?}"
        )));
    }
    let dim = |t: &str| -> Result<usize> {
        t.parse()
            .map_err(|_| Error::InvalidFormat(format!("bad dimension {t:?}")))
    };
    Format::new(dim(parts[0])?, dim(parts[1])?, dim(parts[2])?)
}

fn parse_selector(s: &str, source: Format, target: Format) -> Result<Selector> {
    let axes: Vec<&str> = s.split(';').collect();
    if axes.len() != 3 {
        return Err(Error::SelectorOutOfRange(format!(
            "expected three ;-separated axis lists, got {s:?}"
        )));
    }
    let parse_axis = |t: &str| -> Result<Vec<usize>> {
        t.split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(|x| {
                x.parse()
                    .map_err(|_| Error::SelectorOutOfRange(format!("bad index {x:?}")))
            })
            .collect()
    };
    let sel = Selector {
        n_keep: parse_axis(axes[0])?,
        m_keep: parse_axis(axes[1])?,
        p_keep: parse_axis(axes[2])?,
    };
    let _ = (source, target);
    Ok(sel)
}

/// Resolve a step input: previous result, standard scheme or scheme file
/// (canonical or published format), paths relative to `base`.
fn resolve_source(
    source: &str,
    previous: Option<&AnyScheme>,
    base: &Path,
) -> Result<AnyScheme> {
    if source == "previous" {
        return previous.cloned().ok_or_else(|| {
            Error::Pipeline("`previous` used in the first step".into())
        });
    }
    if let Some(rest) = source.strip_prefix("std:") {
        let mut parts = rest.splitn(2, ':');
        let f = parse_format_triple(parts.next().unwrap())?;
        let ring = match parts.next() {
            Some(r) => Ring::parse(r)?,
            None => Ring::Gf2,
        };
        return crate::scheme::standard_scheme(f, ring);
    }
    let path = base.join(source);
    let text = std::fs::read_to_string(&path).map_err(|e| {
        Error::Pipeline(format!("cannot read scheme {}: {e}", path.display()))
    })?;
    io::load_scheme_text(&text)
}

fn apply_morph(step: &PlanStep, scheme: AnyScheme, base: &Path) -> Result<AnyScheme> {
    match step.morph.as_deref().unwrap_or("none") {
        "none" => Ok(scheme),
        "rotate" => Ok(scheme.rotate()),
        "transpose" => Ok(scheme.transpose()),
        "canonical" => Ok(scheme.canonical_format()),
        "mod2" => Ok(scheme.reduce_mod2()),
        "extend" => {
            let operand = step.operand.as_deref().ok_or_else(|| {
                Error::Pipeline("extend needs an `operand`".into())
            })?;
            let second = resolve_source(operand, None, base)?;
            scheme.extend(&second)
        }
        "restrict" => {
            let target = step
                .target
                .as_deref()
                .ok_or_else(|| Error::Pipeline("restrict needs a `target`".into()))?;
            let target = parse_format_triple(target)?;
            let selector = match step.selector.as_deref() {
                Some(s) => parse_selector(s, scheme.format(), target)?,
                None => Selector::prefix(target),
            };
            scheme.restrict(target, &selector)
        }
        other => Err(Error::Pipeline(format!("unknown morph {other:?}"))),
    }
}

/// Execute the plan. `plan_dir` anchors relative scheme paths; step
/// artifacts (per-step run directories and best schemes) go under
/// `out_dir`.
pub fn run_pipeline(plan: &Plan, plan_dir: &Path, out_dir: &Path) -> Result<PipelineReport> {
    let mut report = PipelineReport::default();
    if plan.steps.is_empty() {
        return Ok(report);
    }
    std::fs::create_dir_all(out_dir)?;
    let mut previous: Option<AnyScheme> = None;
    for (i, step) in plan.steps.iter().enumerate() {
        let name = step
            .name
            .clone()
            .unwrap_or_else(|| format!("step-{}", i + 1));
        let t0 = Instant::now();
        let source = resolve_source(&step.source, previous.as_ref(), plan_dir)?;
        let morphed = apply_morph(step, source, plan_dir)?;
        let start_rank = morphed.rank();
        let mut steps_taken = 0;
        let result = match &step.search {
            Some(cfg) if cfg.max_steps > 0 => {
                let gf2: &Gf2Scheme = morphed.as_gf2().ok_or_else(|| {
                    Error::Pipeline(format!(
                        "step {name}: search needs a gf2 scheme, got ring {}",
                        morphed.ring()
                    ))
                })?;
                let run_dir = out_dir.join(&name);
                let state = orchestrate_in(gf2, cfg, Some(&run_dir))?;
                steps_taken = state.workers.iter().map(|w| w.steps).sum();
                AnyScheme::Gf2(state.best)
            }
            _ => morphed,
        };
        let out_file = out_dir.join(format!("{name}.scheme"));
        std::fs::write(&out_file, io::serialize(&result))?;
        report.steps.push(StepReport {
            name,
            format: result.format(),
            start_rank,
            end_rank: result.rank(),
            steps: steps_taken,
            wall: t0.elapsed(),
        });
        previous = Some(result);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_plan_gives_empty_report() {
        let plan = parse_plan("").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let report = run_pipeline(&plan, dir.path(), &dir.path().join("out")).unwrap();
        assert!(report.steps.is_empty());
    }

    #[test]
    fn morph_only_step_extends() {
        let text = r#"
[[step]]
name = "grow"
source = "std:2,2,2"
morph = "extend"
operand = "std:2,2,1"
"#;
        let plan = parse_plan(text).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let report = run_pipeline(&plan, dir.path(), &dir.path().join("out")).unwrap();
        assert_eq!(report.steps.len(), 1);
        assert_eq!(report.steps[0].format, Format::new(2, 2, 3).unwrap());
        assert_eq!(report.steps[0].end_rank, 12);
        let written = dir.path().join("out/grow.scheme");
        let parsed = io::parse(&std::fs::read_to_string(written).unwrap()).unwrap();
        assert!(parsed.verify());
    }

    #[test]
    fn search_then_extend_then_search() {
        let text = r#"
[[step]]
name = "s222"
source = "std:2,2,2"
[step.search]
max_steps = 200000
escape_after = 1000
restart_after = 50000
seed = 1
target_rank = 7

[[step]]
name = "s223"
source = "previous"
morph = "extend"
operand = "std:2,2,1"
[step.search]
max_steps = 200000
escape_after = 1000
restart_after = 50000
seed = 2
target_rank = 11
"#;
        let plan = parse_plan(text).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let report = run_pipeline(&plan, dir.path(), &dir.path().join("out")).unwrap();
        assert_eq!(report.steps.len(), 2);
        assert_eq!(report.steps[0].end_rank, 7);
        // extension arithmetic: 7 + 4 = 11 at the start of step 2
        assert_eq!(report.steps[1].start_rank, 11);
        assert!(report.steps[1].end_rank <= 11);
        let rendered = format!("{report}");
        assert!(rendered.contains("s223"));
    }

    #[test]
    fn previous_in_first_step_errors() {
        let plan = parse_plan("[[step]]\nsource = \"previous\"\n").unwrap();
        let dir = tempfile::tempdir().unwrap();
        assert!(run_pipeline(&plan, dir.path(), &dir.path().join("out")).is_err());
    }

    #[test]
    fn restrict_step_with_selector() {
        let text = r#"
[[step]]
source = "std:3,3,3"
morph = "restrict"
target = "2,3,3"
selector = "0,2;0,1,2;0,1,2"
"#;
        let plan = parse_plan(text).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let report = run_pipeline(&plan, dir.path(), &dir.path().join("out")).unwrap();
        assert_eq!(report.steps[0].end_rank, 18);
        assert_eq!(report.steps[0].format, Format::new(2, 3, 3).unwrap());
    }
}

//! Parameter sweeps over a base scenario, with analytic columns for
//! comparison.

use std::path::Path;

use crate::error::{Error, Result};
use crate::pulses::PulseShape;

use super::artifacts;
use super::scenario::{self, GridOverrides};
use super::seq::{self, ScenarioSpec};

/// A swept parameter over a base scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub base: SweepBase,
    /// Parameter path: `medium.alphaL`, `medium.T1`, `medium.T2`, or
    /// `schedule.t23`.
    pub param: String,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SweepBase {
    Registry(String),
    Inline(Box<ScenarioSpec>),
}

/// One output row per sweep point.
#[derive(Clone, Copy, Debug)]
pub struct SweepRow {
    pub value: f64,
    pub measured: f64,
    pub analytic: f64,
}

/// A sweep file is a `sweep` line plus either `scenario=<name>` or a full
/// inline scenario in the same file.
pub fn parse_sweep(text: &str) -> Result<SweepSpec> {
    let mut sweep_line = None;
    let mut rest = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.starts_with("sweep") {
            if sweep_line.is_some() {
                return Err(Error::parse(idx + 1, "duplicate sweep line"));
            }
            sweep_line = Some((idx + 1, content.to_string()));
        } else {
            rest.push_str(raw);
            rest.push('\n');
        }
    }
    let (line, content) = sweep_line.ok_or_else(|| Error::parse(0, "missing sweep line"))?;
    let tokens: Vec<&str> = content.split_whitespace().skip(1).collect();
    let mut scenario_name = None;
    let mut param = None;
    let mut lo = None;
    let mut hi = None;
    let mut steps = None;
    for tok in tokens {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::parse(line, format!("expected key=value, got `{tok}`")))?;
        match k {
            "scenario" => scenario_name = Some(v.to_string()),
            "param" => param = Some(v.to_string()),
            "lo" => lo = seq::parse_quantity(v),
            "hi" => hi = seq::parse_quantity(v),
            "steps" => {
                steps = Some(v.parse::<usize>().map_err(|_| {
                    Error::parse(line, format!("cannot parse `steps={v}` as integer"))
                })?)
            }
            other => return Err(Error::parse(line, format!("unknown sweep key `{other}`"))),
        }
    }
    let param = param.ok_or_else(|| Error::parse(line, "sweep needs param="))?;
    let lo = lo.ok_or_else(|| Error::parse(line, "sweep needs lo="))?;
    let hi = hi.ok_or_else(|| Error::parse(line, "sweep needs hi="))?;
    let steps = steps.ok_or_else(|| Error::parse(line, "sweep needs steps="))?;
    if !(lo < hi) {
        return Err(Error::Config(format!(
            "sweep rule violated: lo < hi required, got [{lo}, {hi}]"
        )));
    }
    if steps < 2 {
        return Err(Error::Config(format!(
            "sweep rule violated: steps >= 2 required, got {steps}"
        )));
    }
    let base = if let Some(name) = scenario_name {
        SweepBase::Registry(name)
    } else if rest.contains("medium") {
        SweepBase::Inline(Box::new(seq::parse_sequence(&rest)?))
    } else {
        return Err(Error::parse(
            line,
            "sweep needs scenario=<name> or an inline scenario in the same file",
        ));
    };
    Ok(SweepSpec {
        base,
        param,
        lo,
        hi,
        steps,
    })
}

/// Set one parameter by path.
pub(crate) fn apply_param(spec: &mut ScenarioSpec, path: &str, value: f64) -> Result<()> {
    match path {
        "medium.alphaL" => spec.medium.alpha_l = value,
        "medium.T1" => spec.medium.t1 = value,
        "medium.T2" => spec.medium.t2 = value,
        "schedule.t23" => {
            // Move the last rephasing pulse so the rephasing separation
            // becomes `value`.
            let strong: Vec<usize> = spec
                .pulses
                .iter()
                .enumerate()
                .filter(|(_, p)| p.shape.area() >= 0.5 * std::f64::consts::PI)
                .map(|(i, _)| i)
                .collect();
            let [.., second_last, last] = strong.as_slice() else {
                return Err(Error::Config(
                    "schedule.t23 sweep needs two rephasing pulses".into(),
                ));
            };
            let t2 = spec.pulses[*second_last].reference_time();
            let target = t2 + value;
            match &mut spec.pulses[*last].shape {
                PulseShape::Chs(c) => c.center = target,
                PulseShape::Gaussian(g) => g.center = target,
                PulseShape::Rect(r) => r.start = target - 0.5 * r.duration,
            }
        }
        other => return Err(Error::UnknownParameter(other.to_string())),
    }
    Ok(())
}

/// Run every sweep point and return one row per point; writes
/// `<name>_sweep.csv` when an output directory is given.
pub fn run_sweep(
    sweep: &SweepSpec,
    overrides: GridOverrides,
    out_dir: Option<&Path>,
) -> Result<Vec<SweepRow>> {
    let base = match &sweep.base {
        SweepBase::Registry(name) => seq::parse_sequence(scenario::scenario_source(name)?)?,
        SweepBase::Inline(spec) => (**spec).clone(),
    };
    let mut rows = Vec::with_capacity(sweep.steps);
    for i in 0..sweep.steps {
        let value = sweep.lo + (sweep.hi - sweep.lo) * i as f64 / (sweep.steps - 1) as f64;
        let mut spec = base.clone();
        apply_param(&mut spec, &sweep.param, value)?;
        // Per-point artifacts are not kept; the sweep table is the product.
        let report = scenario::run_scenario_spec(&spec, overrides, None)?;
        let measured = report.summary.get("efficiency").copied().unwrap_or(f64::NAN);
        let analytic = report
            .summary
            .get("analytic_efficiency")
            .copied()
            .unwrap_or(f64::NAN);
        rows.push(SweepRow {
            value,
            measured,
            analytic,
        });
    }
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}_sweep.csv", base.name));
        artifacts::write_sweep_csv(&path, &rows)?;
    }
    Ok(rows)
}

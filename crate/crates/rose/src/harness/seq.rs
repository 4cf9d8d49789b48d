//! Line-oriented sequence grammar.
//!
//! One declaration per line, `#` comments, `key=value` fields:
//!
//! ```text
//! name er_yso_rose
//! medium alphaL=0.71 L=7.5mm T1=10ms T2=230us lambda=1536nm inhom=5Mrad
//! grid nz=64 ndet=801 nphi=8 nr=1 dt=10ns
//! geometry counterprop            # optional; derived from pulses otherwise
//! prepare ground                  # optional; `inverted` for gain checks
//! pulse t=28us shape=gaussian fwhm=3us area=0.05pi dir=+z
//! pulse t=48us shape=chs beta=125krad mu=10 rabi=3.5Mrad dir=-z
//! detect label=rose kind=rose     # auto window at the predicted time
//! detect label=tail from=100us to=120us
//! expect metric=efficiency value=0.12 rtol=0.15
//! expect metric=n_b_after_chs2 max=0.1
//! ```
//!
//! Unit suffixes: `ns us ms s` (time), `mm um nm` (length), `krad Mrad`
//! (angular frequency, rad/s), `Hz kHz MHz` (ordinary frequency — converted
//! to angular by 2 pi on ingestion), `pi` (areas, multiples of pi). Bare
//! numbers are base SI; `inf` is accepted for relaxation times. Unknown keys
//! are rejected.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use crate::ensemble::{EnsembleGrid, MediumSpec};
use crate::error::{Error, Result};
use crate::propagation::InitialState;
use crate::protocol::{EchoLabel, Geometry, Schedule};
use crate::pulses::{ChsParams, Direction, GaussianParams, PulseEvent, PulseShape, RectParams};

/// Parse a number with an optional unit suffix into base SI (angular
/// frequencies in rad/s).
pub fn parse_quantity(text: &str) -> Option<f64> {
    // Longest suffixes first so `Mrad` wins over a hypothetical `rad`, and
    // `ms` over `s`.
    const SUFFIXES: [(&str, f64); 13] = [
        ("Mrad", 1e6),
        ("krad", 1e3),
        ("MHz", TAU * 1e6),
        ("kHz", TAU * 1e3),
        ("Hz", TAU),
        ("ns", 1e-9),
        ("us", 1e-6),
        ("ms", 1e-3),
        ("mm", 1e-3),
        ("um", 1e-6),
        ("nm", 1e-9),
        ("pi", PI),
        ("s", 1.0),
    ];
    for (suffix, factor) in SUFFIXES {
        if let Some(prefix) = text.strip_suffix(suffix) {
            if let Ok(v) = prefix.parse::<f64>() {
                return Some(v * factor);
            }
        }
    }
    text.parse::<f64>().ok()
}

/// Unresolved detection request; auto windows are placed at run time from
/// the predicted echo times.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectSpec {
    pub label: String,
    pub kind: DetectKind,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DetectKind {
    Auto(EchoLabel),
    Explicit { lo: f64, hi: f64 },
}

/// A regression expectation against a summary metric.
#[derive(Clone, Debug, PartialEq)]
pub struct Expectation {
    pub metric: String,
    pub check: Check,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Check {
    Approx {
        value: f64,
        rtol: Option<f64>,
        atol: Option<f64>,
    },
    Min(f64),
    Max(f64),
}

impl Check {
    pub fn passes(&self, measured: f64) -> bool {
        match *self {
            Check::Approx { value, rtol, atol } => {
                let tol = atol.unwrap_or(0.0) + rtol.unwrap_or(0.0) * value.abs();
                (measured - value).abs() <= tol
            }
            Check::Min(v) => measured >= v,
            Check::Max(v) => measured <= v,
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            Check::Approx { value, rtol, atol } => match (rtol, atol) {
                (Some(r), None) => format!("{value} +- {}%", 100.0 * r),
                (None, Some(a)) => format!("{value} +- {a}"),
                (Some(r), Some(a)) => format!("{value} +- ({a} + {}%)", 100.0 * r),
                (None, None) => format!("== {value}"),
            },
            Check::Min(v) => format!(">= {v}"),
            Check::Max(v) => format!("<= {v}"),
        }
    }
}

/// Everything a sequence file declares.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub medium: MediumSpec,
    pub grid: EnsembleGrid,
    pub prepare: InitialState,
    pub geometry_override: Option<Geometry>,
    pub pulses: Vec<PulseEvent>,
    pub detects: Vec<DetectSpec>,
    pub expects: Vec<Expectation>,
}

impl ScenarioSpec {
    /// Geometry: the explicit override, otherwise counterpropagating when
    /// any pulse travels along -z.
    pub fn geometry(&self) -> Geometry {
        self.geometry_override.unwrap_or_else(|| {
            if self
                .pulses
                .iter()
                .any(|p| p.direction == Direction::Backward)
            {
                Geometry::Counterpropagating
            } else {
                Geometry::Copropagating
            }
        })
    }

    pub fn schedule(&self) -> Schedule {
        Schedule::new(self.pulses.clone(), self.geometry())
    }
}

struct Fields<'a> {
    line: usize,
    pairs: Vec<(&'a str, &'a str)>,
    used: Vec<bool>,
}

impl<'a> Fields<'a> {
    fn new(line: usize, tokens: &[&'a str]) -> Result<Self> {
        let mut pairs = Vec::new();
        for tok in tokens {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::parse(line, format!("expected key=value, got `{tok}`")))?;
            pairs.push((k, v));
        }
        let used = vec![false; pairs.len()];
        Ok(Fields { line, pairs, used })
    }

    fn take(&mut self, key: &str) -> Option<&'a str> {
        for (i, (k, v)) in self.pairs.iter().enumerate() {
            if *k == key && !self.used[i] {
                self.used[i] = true;
                return Some(v);
            }
        }
        None
    }

    fn require(&mut self, key: &str) -> Result<&'a str> {
        self.take(key)
            .ok_or_else(|| Error::parse(self.line, format!("missing required key `{key}`")))
    }

    fn quantity(&mut self, key: &str) -> Result<f64> {
        let raw = self.require(key)?;
        parse_quantity(raw)
            .ok_or_else(|| Error::parse(self.line, format!("cannot parse `{key}={raw}`")))
    }

    fn quantity_opt(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some(raw) => parse_quantity(raw)
                .map(Some)
                .ok_or_else(|| Error::parse(self.line, format!("cannot parse `{key}={raw}`"))),
        }
    }

    fn integer(&mut self, key: &str) -> Result<usize> {
        let raw = self.require(key)?;
        raw.parse::<usize>()
            .map_err(|_| Error::parse(self.line, format!("cannot parse `{key}={raw}` as integer")))
    }

    fn finish(self) -> Result<()> {
        for (i, (k, _)) in self.pairs.iter().enumerate() {
            if !self.used[i] {
                return Err(Error::parse(self.line, format!("unknown key `{k}`")));
            }
        }
        Ok(())
    }
}

fn parse_direction(line: usize, raw: &str) -> Result<Direction> {
    match raw {
        "+z" => Ok(Direction::Forward),
        "-z" => Ok(Direction::Backward),
        other => Err(Error::parse(line, format!("direction must be +z or -z, got `{other}`"))),
    }
}

/// Parse a sequence file into a scenario description, then run the semantic
/// checks (pulse ordering, revival causality, grid and medium bounds).
pub fn parse_sequence(text: &str) -> Result<ScenarioSpec> {
    let mut name = None;
    let mut medium = None;
    let mut grid = None;
    let mut prepare = InitialState::Ground;
    let mut geometry_override = None;
    let mut pulses: Vec<PulseEvent> = Vec::new();
    let mut detects = Vec::new();
    let mut expects = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let (verb, rest) = tokens.split_first().expect("non-empty line");
        match *verb {
            "name" => {
                let [n] = rest else {
                    return Err(Error::parse(line, "usage: name <identifier>"));
                };
                name = Some(n.to_string());
            }
            "medium" => {
                if medium.is_some() {
                    return Err(Error::parse(line, "duplicate medium line"));
                }
                let mut f = Fields::new(line, rest)?;
                let spec = MediumSpec {
                    alpha_l: f.quantity("alphaL")?,
                    length: f.quantity("L")?,
                    t1: f.quantity("T1")?,
                    t2: f.quantity("T2")?,
                    lambda: f.quantity("lambda")?,
                    inhom_halfwidth: f.quantity("inhom")?,
                };
                f.finish()?;
                spec.validate()
                    .map_err(|e| Error::parse(line, e.to_string()))?;
                medium = Some(spec);
            }
            "grid" => {
                if grid.is_some() {
                    return Err(Error::parse(line, "duplicate grid line"));
                }
                let mut f = Fields::new(line, rest)?;
                let g = EnsembleGrid {
                    n_z: f.integer("nz")?,
                    n_det: f.integer("ndet")?,
                    n_phi: f.integer("nphi")?,
                    n_r: f.take("nr").map_or(Ok(1), |v| {
                        v.parse::<usize>().map_err(|_| {
                            Error::parse(line, format!("cannot parse `nr={v}` as integer"))
                        })
                    })?,
                    dt: f.quantity("dt")?,
                };
                f.finish()?;
                grid = Some(g);
            }
            "geometry" => {
                let [g] = rest else {
                    return Err(Error::parse(line, "usage: geometry coprop|counterprop|backward60"));
                };
                geometry_override = Some(match *g {
                    "coprop" => Geometry::Copropagating,
                    "counterprop" => Geometry::Counterpropagating,
                    "backward60" => Geometry::BackwardSixtyDeg,
                    other => {
                        return Err(Error::parse(
                            line,
                            format!("unknown geometry `{other}`"),
                        ))
                    }
                });
            }
            "prepare" => {
                let [p] = rest else {
                    return Err(Error::parse(line, "usage: prepare ground|inverted"));
                };
                prepare = match *p {
                    "ground" => InitialState::Ground,
                    "inverted" => InitialState::Inverted,
                    other => {
                        return Err(Error::parse(line, format!("unknown preparation `{other}`")))
                    }
                };
            }
            "pulse" => {
                let mut f = Fields::new(line, rest)?;
                let t = f.quantity("t")?;
                let shape_raw = f.require("shape")?;
                let dir = parse_direction(line, f.require("dir")?)?;
                let shape = match shape_raw {
                    "gaussian" => {
                        let g = GaussianParams::new(f.quantity("fwhm")?, f.quantity("area")?, t)
                            .map_err(|e| Error::parse(line, e.to_string()))?;
                        let g = match f.quantity_opt("offset")? {
                            Some(o) => g.with_carrier_offset(o),
                            None => g,
                        };
                        PulseShape::Gaussian(g)
                    }
                    "rect" => {
                        let r = RectParams::new(f.quantity("dur")?, f.quantity("area")?, t)
                            .map_err(|e| Error::parse(line, e.to_string()))?;
                        PulseShape::Rect(r)
                    }
                    "chs" => {
                        let c = ChsParams::new(
                            f.quantity("rabi")?,
                            f.quantity("beta")?,
                            f.quantity("mu")?,
                            t,
                        )
                        .map_err(|e| Error::parse(line, e.to_string()))?;
                        let c = match f.quantity_opt("trunc")? {
                            Some(tr) => c
                                .with_truncation(tr)
                                .map_err(|e| Error::parse(line, e.to_string()))?,
                            None => c,
                        };
                        let c = match f.quantity_opt("offset")? {
                            Some(o) => c.with_carrier_offset(o),
                            None => c,
                        };
                        PulseShape::Chs(c)
                    }
                    other => {
                        return Err(Error::parse(
                            line,
                            format!("unknown pulse shape `{other}` (gaussian|rect|chs)"),
                        ))
                    }
                };
                f.finish()?;
                pulses.push(PulseEvent::new(shape, dir));
            }
            "detect" => {
                let mut f = Fields::new(line, rest)?;
                let label = f.require("label")?.to_string();
                let kind = if let Some(kind_raw) = f.take("kind") {
                    let echo = match kind_raw {
                        "2pe" => EchoLabel::TwoPulse,
                        "rose" => EchoLabel::Rose,
                        "3pe" => EchoLabel::ThreePulse,
                        other => {
                            return Err(Error::parse(
                                line,
                                format!("unknown detect kind `{other}` (2pe|rose|3pe)"),
                            ))
                        }
                    };
                    DetectKind::Auto(echo)
                } else {
                    let lo = f.quantity("from")?;
                    let hi = f.quantity("to")?;
                    if hi <= lo {
                        return Err(Error::parse(line, "detect window must have to > from"));
                    }
                    DetectKind::Explicit { lo, hi }
                };
                f.finish()?;
                detects.push(DetectSpec { label, kind });
            }
            "expect" => {
                let mut f = Fields::new(line, rest)?;
                let metric = f.require("metric")?.to_string();
                let value = f.quantity_opt("value")?;
                let rtol = f.quantity_opt("rtol")?;
                let atol = f.quantity_opt("atol")?;
                let min = f.quantity_opt("min")?;
                let max = f.quantity_opt("max")?;
                f.finish()?;
                let check = match (value, min, max) {
                    (Some(v), None, None) => Check::Approx { value: v, rtol, atol },
                    (None, Some(v), None) => Check::Min(v),
                    (None, None, Some(v)) => Check::Max(v),
                    _ => {
                        return Err(Error::parse(
                            line,
                            "expect needs exactly one of value=, min=, max=",
                        ))
                    }
                };
                expects.push(Expectation { metric, check });
            }
            "sweep" => {
                return Err(Error::parse(
                    line,
                    "sweep lines belong in sweep files (use `rose sweep <file>`)",
                ));
            }
            other => {
                return Err(Error::parse(line, format!("unknown declaration `{other}`")));
            }
        }
    }

    let medium = medium.ok_or_else(|| Error::parse(0, "missing medium line"))?;
    let grid = grid.ok_or_else(|| Error::parse(0, "missing grid line"))?;
    let spec = ScenarioSpec {
        name: name.unwrap_or_else(|| "unnamed".to_string()),
        medium,
        grid,
        prepare,
        geometry_override,
        pulses,
        detects,
        expects,
    };
    validate_semantics(&spec)?;
    Ok(spec)
}

/// Semantic checks shared by files and programmatic specs.
pub(crate) fn validate_semantics(spec: &ScenarioSpec) -> Result<()> {
    spec.medium.validate_against(&spec.pulses)?;
    let schedule = spec.schedule();
    schedule.validate()?;
    let duration = schedule.support_end();
    spec.grid.validate(&spec.medium, duration)?;
    Ok(())
}

fn push_quantity(out: &mut String, key: &str, value: f64) {
    // Rust's shortest-round-trip float formatting keeps parse(serialize(x))
    // exact.
    let _ = write!(out, " {key}={value}");
}

/// Canonical serialization; `parse_sequence` of the output reproduces the
/// input structure exactly.
pub fn serialize_sequence(spec: &ScenarioSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "name {}", spec.name);

    let m = &spec.medium;
    let mut line = String::from("medium");
    push_quantity(&mut line, "alphaL", m.alpha_l);
    push_quantity(&mut line, "L", m.length);
    push_quantity(&mut line, "T1", m.t1);
    push_quantity(&mut line, "T2", m.t2);
    push_quantity(&mut line, "lambda", m.lambda);
    push_quantity(&mut line, "inhom", m.inhom_halfwidth);
    let _ = writeln!(out, "{line}");

    let g = &spec.grid;
    let mut line = format!(
        "grid nz={} ndet={} nphi={} nr={}",
        g.n_z, g.n_det, g.n_phi, g.n_r
    );
    push_quantity(&mut line, "dt", g.dt);
    let _ = writeln!(out, "{line}");

    if let Some(geom) = spec.geometry_override {
        let _ = writeln!(out, "geometry {}", geom.label());
    }
    if spec.prepare == InitialState::Inverted {
        let _ = writeln!(out, "prepare inverted");
    }

    for p in &spec.pulses {
        let mut line = String::from("pulse");
        match &p.shape {
            PulseShape::Gaussian(g) => {
                push_quantity(&mut line, "t", g.center);
                line.push_str(" shape=gaussian");
                push_quantity(&mut line, "fwhm", g.fwhm);
                push_quantity(&mut line, "area", g.area);
                if g.carrier_offset != 0.0 {
                    push_quantity(&mut line, "offset", g.carrier_offset);
                }
            }
            PulseShape::Rect(r) => {
                push_quantity(&mut line, "t", r.start);
                line.push_str(" shape=rect");
                push_quantity(&mut line, "dur", r.duration);
                push_quantity(&mut line, "area", r.area);
            }
            PulseShape::Chs(c) => {
                push_quantity(&mut line, "t", c.center);
                line.push_str(" shape=chs");
                push_quantity(&mut line, "beta", c.beta);
                push_quantity(&mut line, "mu", c.mu);
                push_quantity(&mut line, "rabi", c.rabi_peak);
                push_quantity(&mut line, "trunc", c.truncation);
                if c.carrier_offset != 0.0 {
                    push_quantity(&mut line, "offset", c.carrier_offset);
                }
            }
        }
        let _ = writeln!(out, "{line} dir={}", p.direction.label());
    }

    for d in &spec.detects {
        match d.kind {
            DetectKind::Auto(echo) => {
                let _ = writeln!(out, "detect label={} kind={}", d.label, echo.label());
            }
            DetectKind::Explicit { lo, hi } => {
                let mut line = format!("detect label={}", d.label);
                push_quantity(&mut line, "from", lo);
                push_quantity(&mut line, "to", hi);
                let _ = writeln!(out, "{line}");
            }
        }
    }

    for e in &spec.expects {
        let mut line = format!("expect metric={}", e.metric);
        match e.check {
            Check::Approx { value, rtol, atol } => {
                push_quantity(&mut line, "value", value);
                if let Some(r) = rtol {
                    push_quantity(&mut line, "rtol", r);
                }
                if let Some(a) = atol {
                    push_quantity(&mut line, "atol", a);
                }
            }
            Check::Min(v) => push_quantity(&mut line, "min", v),
            Check::Max(v) => push_quantity(&mut line, "max", v),
        }
        let _ = writeln!(out, "{line}");
    }
    out
}

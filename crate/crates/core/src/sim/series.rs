//! Recorded measurement channels and their CSV persistence.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::vehicle::VehicleState;

pub const CSV_HEADER: &str = "t,delta,v,a_long,psi_dot";

/// Why a simulation stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EndReason {
    /// The scenario ran to its full duration.
    #[default]
    Complete,
    /// The lateral demand exceeded the available grip for too long.
    LeftRoad,
    /// The sideslip grew past the spin threshold.
    Spun,
    /// The vehicle slowed below the simulation floor.
    Stopped,
}

impl EndReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            EndReason::Complete => "complete",
            EndReason::LeftRoad => "left_road",
            EndReason::Spun => "spun",
            EndReason::Stopped => "stopped",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "complete" => Ok(EndReason::Complete),
            "left_road" => Ok(EndReason::LeftRoad),
            "spun" => Ok(EndReason::Spun),
            "stopped" => Ok(EndReason::Stopped),
            _ => Err(Error::Parse(format!("unknown end reason `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SeriesMeta {
    pub scenario: String,
    pub mu: f64,
    pub vehicle: String,
    pub mass_extra: f64,
    pub dt: f64,
    pub end: EndReason,
}

/// Uniformly sampled measurement channels of one run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    pub t: Vec<f64>,
    pub delta: Vec<f64>,
    pub v: Vec<f64>,
    pub a_long: Vec<f64>,
    pub psi_dot: Vec<f64>,
    pub meta: SeriesMeta,
    /// Full simulator state at every sample. Only present in memory for
    /// freshly simulated series; never persisted.
    pub states: Option<Vec<VehicleState>>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.t.len();
        for len in [self.delta.len(), self.v.len(), self.a_long.len(), self.psi_dot.len()] {
            if len != n {
                return Err(Error::LengthMismatch { left: n, right: len });
            }
        }
        if let Some(states) = &self.states {
            if states.len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: states.len(),
                });
            }
        }
        if n < 2 {
            return Err(Error::TooShortSeries { len: n, min: 2 });
        }
        let dt = self.meta.dt;
        if !(dt > 0.0) {
            return Err(Error::InvalidScenario(format!("non-positive dt {dt}")));
        }
        for (k, w) in self.t.windows(2).enumerate() {
            let step = w[1] - w[0];
            if !(step > 0.0) || (step - dt).abs() > 1e-9 {
                return Err(Error::Parse(format!(
                    "non-uniform time step {step} at sample {} (dt = {dt})",
                    k + 1
                )));
            }
        }
        Ok(())
    }

    /// Writes `<path>` as CSV and the metadata sidecar next to it.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = String::with_capacity(self.len() * 64);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for k in 0..self.len() {
            writeln!(
                out,
                "{},{},{},{},{}",
                self.t[k], self.delta[k], self.v[k], self.a_long[k], self.psi_dot[k]
            )
            .expect("writing to a String cannot fail");
        }
        fs::write(path, out)?;
        fs::write(meta_path(path), self.meta.to_text())?;
        Ok(())
    }

    /// Reads a CSV written by [`TimeSeries::write`] together with its sidecar.
    pub fn read(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        let meta_file = meta_path(path);
        if !meta_file.exists() {
            return Err(Error::MissingFile(meta_file));
        }
        let meta = SeriesMeta::parse(&fs::read_to_string(&meta_file)?)?;
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == CSV_HEADER => {}
            other => {
                return Err(Error::Parse(format!(
                    "{}: expected header `{CSV_HEADER}`, found `{}`",
                    path.display(),
                    other.unwrap_or("")
                )))
            }
        }
        let mut ts = TimeSeries {
            meta,
            ..TimeSeries::default()
        };
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(Error::ChannelCount {
                    path: path.display().to_string(),
                    line: i + 2,
                    found: fields.len(),
                    expected: 5,
                });
            }
            let mut vals = [0.0; 5];
            for (slot, field) in vals.iter_mut().zip(&fields) {
                *slot = field.trim().parse().map_err(|_| {
                    Error::Parse(format!("{}:{}: bad number `{field}`", path.display(), i + 2))
                })?;
            }
            ts.t.push(vals[0]);
            ts.delta.push(vals[1]);
            ts.v.push(vals[2]);
            ts.a_long.push(vals[3]);
            ts.psi_dot.push(vals[4]);
        }
        ts.validate()?;
        Ok(ts)
    }
}

/// Sidecar path: the CSV path with a `.meta` extension.
pub fn meta_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta")
}

impl SeriesMeta {
    pub fn to_text(&self) -> String {
        format!(
            "scenario = {}\nmu = {:?}\nvehicle = {}\nmass_extra = {:?}\ndt = {:?}\nend = {}\n",
            self.scenario,
            self.mu,
            self.vehicle,
            self.mass_extra,
            self.dt,
            self.end.as_str()
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut meta = SeriesMeta::default();
        let mut seen = [false; 5];
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("metadata line without `=`: `{line}`")))?;
            let value = value.trim();
            let num = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("metadata `{}`: bad number `{v}`", key.trim())))
            };
            match key.trim() {
                "scenario" => {
                    meta.scenario = value.to_string();
                    seen[0] = true;
                }
                "mu" => {
                    meta.mu = num(value)?;
                    seen[1] = true;
                }
                "vehicle" => {
                    meta.vehicle = value.to_string();
                    seen[2] = true;
                }
                "mass_extra" => {
                    meta.mass_extra = num(value)?;
                    seen[3] = true;
                }
                "dt" => {
                    meta.dt = num(value)?;
                    seen[4] = true;
                }
                "end" => meta.end = EndReason::parse(value)?,
                other => return Err(Error::Parse(format!("unknown metadata key `{other}`"))),
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            let key = ["scenario", "mu", "vehicle", "mass_extra", "dt"][i];
            return Err(Error::Parse(format!("metadata key `{key}` missing")));
        }
        Ok(meta)
    }
}

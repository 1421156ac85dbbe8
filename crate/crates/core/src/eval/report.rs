//! Evaluation reports: per-run records, aggregated RMSE rows, CSV and aligned
//! text output, qualitative trajectories.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::experiments::{Predictor, RunDetail};
use crate::error::Result;
use crate::sim::{EndReason, Scenario};

pub const REPORT_HEADER: &str = "experiment,predictor,condition,rmse";
pub const AVG: &str = "avg";

/// Result of one ground-truth run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub scenario: String,
    /// Vehicle id in the vehicle experiment, empty otherwise.
    pub group: String,
    pub condition: String,
    pub len: usize,
    pub context: usize,
    pub end: EndReason,
    /// RMSE by predictor index; `None` marks an excluded predictor.
    pub rmse: [Option<f64>; 6],
    pub errors: Vec<(Predictor, String)>,
    /// CNP targets whose truth lies within two standard deviations.
    pub inside_2sigma: usize,
    pub targets: usize,
}

impl RunRecord {
    /// A run whose ground truth could not be produced.
    pub fn failed(scenario: &Scenario, group: &str, reason: String) -> Self {
        Self {
            scenario: scenario.id.clone(),
            group: group.to_string(),
            condition: super::experiments::condition_label(scenario.mu),
            len: 0,
            context: 0,
            end: EndReason::Complete,
            rmse: [None; 6],
            errors: Predictor::ALL.iter().map(|&p| (p, format!("ground truth: {reason}"))).collect(),
            inside_2sigma: 0,
            targets: 0,
        }
    }
}

/// Mean RMSE of one predictor under one condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub experiment: String,
    pub predictor: String,
    /// `<mu>` or `avg`; prefixed by `<vehicle>/` in the vehicle experiment.
    pub condition: String,
    /// NaN when every run of the cell was excluded.
    pub rmse: f64,
    pub runs: usize,
    pub excluded: usize,
}

fn cell_name(group: &str, condition: &str) -> String {
    if group.is_empty() {
        condition.to_string()
    } else {
        format!("{group}/{condition}")
    }
}

impl ReportRow {
    /// Row-wise means over all runs of each (group, predictor, condition),
    /// plus an `avg` over all runs of the group.
    pub fn aggregate(
        experiment: &str,
        with_mass: bool,
        groups: &[String],
        conditions: &[String],
        runs: &[RunRecord],
    ) -> Vec<ReportRow> {
        let mut rows = Vec::new();
        for group in groups {
            for p in Predictor::ALL {
                let columns = conditions.iter().map(Some).chain([None]);
                for cond in columns {
                    let selected: Vec<&RunRecord> = runs
                        .iter()
                        .filter(|r| &r.group == group && cond.is_none_or(|c| &r.condition == c))
                        .collect();
                    let values: Vec<f64> = selected.iter().filter_map(|r| r.rmse[p.index()]).collect();
                    let rmse = if values.is_empty() {
                        f64::NAN
                    } else {
                        values.iter().sum::<f64>() / values.len() as f64
                    };
                    rows.push(ReportRow {
                        experiment: experiment.to_string(),
                        predictor: p.label(with_mass).to_string(),
                        condition: cell_name(group, cond.map_or(AVG, String::as_str)),
                        rmse,
                        runs: values.len(),
                        excluded: selected.len() - values.len(),
                    });
                }
            }
        }
        rows
    }
}

/// Per-timestep truth and predictions of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Qualitative {
    pub scenario: String,
    pub condition: String,
    pub end: EndReason,
    pub csv: String,
}

pub const QUALITATIVE_HEADER: &str =
    "t,delta,v,a_long,psi_dot,context,kst,dst,dst_ideal,std,std_ideal,cnp_mu,cnp_sigma2,cnp_lower,cnp_upper";

impl Qualitative {
    /// Context rows carry `context = 1` and no predictions. The CNP band is
    /// the mean plus or minus two standard deviations.
    pub fn from_detail(d: &RunDetail) -> Self {
        let ts = &d.series;
        let n = d.record.context;
        let mut csv = String::from(QUALITATIVE_HEADER);
        csv.push('\n');
        for k in 0..ts.len() {
            write!(csv, "{},{},{},{},{}", ts.t[k], ts.delta[k], ts.v[k], ts.a_long[k], ts.psi_dot[k])
                .expect("writing to a String cannot fail");
            if k < n {
                csv.push_str(",1,,,,,,,,,\n");
                continue;
            }
            let j = k - n;
            csv.push_str(",0");
            for pred in &d.physical {
                match pred {
                    Some(p) => write!(csv, ",{}", p[j]).expect("infallible"),
                    None => csv.push(','),
                }
            }
            match &d.cnp {
                Some(c) => {
                    let s = 2.0 * c[j].sigma2.sqrt();
                    write!(csv, ",{},{},{},{}", c[j].mu, c[j].sigma2, c[j].mu - s, c[j].mu + s).expect("infallible");
                }
                None => csv.push_str(",,,,"),
            }
            csv.push('\n');
        }
        Self {
            scenario: d.record.scenario.clone(),
            condition: d.record.condition.clone(),
            end: d.record.end,
            csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub experiment: String,
    pub with_mass: bool,
    pub rows: Vec<ReportRow>,
    pub runs: Vec<RunRecord>,
    pub qualitative: Vec<Qualitative>,
}

impl EvalReport {
    /// Mean RMSE of a cell; `group` is empty except in the vehicle
    /// experiment, `condition` is a friction label or `avg`.
    pub fn cell(&self, predictor: Predictor, group: &str, condition: &str) -> Option<f64> {
        let label = predictor.label(self.with_mass);
        let name = cell_name(group, condition);
        self.rows
            .iter()
            .find(|r| r.predictor == label && r.condition == name)
            .map(|r| r.rmse)
    }

    /// Share of CNP targets inside the two-sigma band, over all runs.
    pub fn coverage(&self) -> Option<f64> {
        let targets: usize = self.runs.iter().map(|r| r.targets).sum();
        let inside: usize = self.runs.iter().map(|r| r.inside_2sigma).sum();
        (targets > 0).then(|| inside as f64 / targets as f64)
    }

    /// Runs with at least one excluded predictor.
    pub fn failures(&self) -> Vec<&RunRecord> {
        self.runs.iter().filter(|r| !r.errors.is_empty()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(REPORT_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(out, "{},{},{},{}", r.experiment, r.predictor, r.condition, r.rmse).expect("infallible");
        }
        out
    }

    /// Every run with its per-predictor RMSE; excluded predictors are empty.
    pub fn runs_csv(&self) -> String {
        let mut out = String::from("scenario,group,condition,len,context,end");
        for p in Predictor::ALL {
            write!(out, ",{}", p.slug()).expect("infallible");
        }
        out.push_str(",cnp_inside_2sigma,cnp_targets,errors\n");
        for r in &self.runs {
            write!(out, "{},{},{},{},{},{}", r.scenario, r.group, r.condition, r.len, r.context, r.end.as_str())
                .expect("infallible");
            for v in r.rmse {
                match v {
                    Some(v) => write!(out, ",{v}").expect("infallible"),
                    None => out.push(','),
                }
            }
            let errors: Vec<String> = r
                .errors
                .iter()
                .map(|(p, e)| format!("{}: {}", p.slug(), e.replace([',', '\n'], ";")))
                .collect();
            writeln!(out, ",{},{},{}", r.inside_2sigma, r.targets, errors.join(" | ")).expect("infallible");
        }
        out
    }

    /// Aligned text tables. Single-vehicle experiments print predictors as
    /// rows and conditions as columns; the vehicle experiment prints one table
    /// per condition with vehicles as rows.
    pub fn to_table(&self) -> String {
        let mut groups: Vec<&str> = Vec::new();
        let mut conditions: Vec<&str> = Vec::new();
        for r in &self.rows {
            let (g, c) = r.condition.rsplit_once('/').unwrap_or(("", &r.condition));
            if !groups.contains(&g) {
                groups.push(g);
            }
            if !conditions.contains(&c) {
                conditions.push(c);
            }
        }
        let labels: Vec<&str> = Predictor::ALL.iter().map(|p| p.label(self.with_mass)).collect();
        let value = |g: &str, p: usize, c: &str| {
            self.cell(Predictor::ALL[p], g, c)
                .map_or_else(|| "-".to_string(), |v| if v.is_nan() { "n/a".into() } else { format!("{v:.4}") })
        };
        let mut out = format!("RMSE [rad/s], experiment `{}`\n", self.experiment);
        if groups.len() == 1 && groups[0].is_empty() {
            let head: Vec<String> = conditions.iter().map(|c| format!("mu={c}")).collect();
            table(
                &mut out,
                "predictor",
                &head.iter().map(String::as_str).collect::<Vec<_>>(),
                &labels
                    .iter()
                    .enumerate()
                    .map(|(p, l)| (l.to_string(), conditions.iter().map(|c| value("", p, c)).collect()))
                    .collect::<Vec<_>>(),
            );
        } else {
            for c in &conditions {
                writeln!(out, "\ncondition {}", if *c == AVG { "average".to_string() } else { format!("mu={c}") })
                    .expect("infallible");
                table(
                    &mut out,
                    "vehicle",
                    &labels,
                    &groups
                        .iter()
                        .map(|g| (g.to_string(), (0..labels.len()).map(|p| value(g, p, c)).collect()))
                        .collect::<Vec<_>>(),
                );
            }
        }
        if let Some(cov) = self.coverage() {
            writeln!(out, "\nCNP two-sigma coverage: {cov:.4}").expect("infallible");
        }
        let failures = self.failures();
        if !failures.is_empty() {
            writeln!(out, "\nexcluded predictions ({} runs):", failures.len()).expect("infallible");
            for r in failures {
                for (p, e) in &r.errors {
                    let run = cell_name(&r.group, &r.scenario);
                    writeln!(out, "  {run} {}: {e}", p.label(self.with_mass)).expect("infallible");
                }
            }
        }
        out
    }

    /// Writes `<experiment>.csv`, `<experiment>.txt`, `<experiment>_runs.csv`
    /// and the qualitative trajectories into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut put = |name: String, text: &str| -> Result<()> {
            let path = dir.join(name);
            fs::write(&path, text)?;
            written.push(path);
            Ok(())
        };
        put(format!("{}.csv", self.experiment), &self.to_csv())?;
        put(format!("{}.txt", self.experiment), &self.to_table())?;
        put(format!("{}_runs.csv", self.experiment), &self.runs_csv())?;
        for q in &self.qualitative {
            put(format!("{}_qualitative_{}_mu{}.csv", self.experiment, q.scenario.split('@').next().unwrap_or(&q.scenario), q.condition), &q.csv)?;
        }
        Ok(written)
    }
}

fn table(out: &mut String, corner: &str, head: &[&str], rows: &[(String, Vec<String>)]) {
    let first = rows.iter().map(|r| r.0.len()).chain([corner.len()]).max().unwrap_or(0);
    let widths: Vec<usize> = head
        .iter()
        .enumerate()
        .map(|(i, h)| rows.iter().map(|r| r.1[i].len()).chain([h.len()]).max().unwrap_or(0))
        .collect();
    write!(out, "{corner:<first$}").expect("infallible");
    for (h, w) in head.iter().zip(&widths) {
        write!(out, "  {h:>w$}").expect("infallible");
    }
    out.push('\n');
    for (name, cells) in rows {
        write!(out, "{name:<first$}").expect("infallible");
        for (c, w) in cells.iter().zip(&widths) {
            write!(out, "  {c:>w$}").expect("infallible");
        }
        out.push('\n');
    }
}

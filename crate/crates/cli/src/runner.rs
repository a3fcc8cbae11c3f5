//! Suite execution and report output.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use holoq::suites::{conformal_suite, critical_suite, hypergeom_suite, merge, numeric_suite, sphere_suite};
use holoq::QuantitiesReport;
use rayon::prelude::*;

use crate::config::{Format, RunConfig, Suite};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error("suite {suite} aborted: {source}")]
    Suite { suite: Suite, source: holoq::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

/// Process exit codes.
pub mod exit {
    pub const PASS: u8 = 0;
    pub const CHECK_FAILED: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const RUNTIME: u8 = 3;
}

fn run_suite(config: &RunConfig, suite: Suite) -> Result<QuantitiesReport, RunError> {
    let wrap = |source| RunError::Suite { suite, source };
    match suite {
        Suite::Sphere => sphere_suite(&config.sphere_params()).map_err(wrap),
        Suite::Hypergeom => Ok(hypergeom_suite(&config.hypergeom_params())),
        Suite::Numeric => numeric_suite(&config.numeric_params()).map_err(wrap),
        Suite::CriticalN4 => critical_suite(&config.numeric_params()).map_err(wrap),
        Suite::Conformal => conformal_suite(&config.numeric_params()).map_err(wrap),
    }
}

/// Run the selected suites in parallel and merge them in a fixed order.
pub fn run(config: &RunConfig) -> Result<QuantitiesReport, RunError> {
    config.validate()?;
    let mut suites = config.suites.clone();
    suites.sort();
    suites.dedup();
    let results: Vec<Result<(QuantitiesReport, f64), RunError>> = suites
        .par_iter()
        .map(|&s| {
            let t = Instant::now();
            let mut r = run_suite(config, s)?;
            r.metadata.insert("suite".into(), s.name().into());
            Ok((r, t.elapsed().as_secs_f64()))
        })
        .collect();
    let mut reports = Vec::with_capacity(results.len());
    let mut timings = Vec::with_capacity(results.len());
    for (s, r) in suites.iter().zip(results) {
        let (report, secs) = r?;
        reports.push(report);
        timings.push((s.name().to_string(), secs));
    }
    let mut report = merge(reports);
    report.timing.suites.extend(timings);
    report.timing.generated_at = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    Ok(report)
}

pub fn render(report: &QuantitiesReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Md => report.to_markdown(),
    }
}

/// Write `report.<ext>` into `dir` for every format; returns the paths.
pub fn write_reports(report: &QuantitiesReport, dir: &Path, formats: &[Format]) -> Result<Vec<PathBuf>, RunError> {
    std::fs::create_dir_all(dir).map_err(|source| RunError::Write { path: dir.into(), source })?;
    let mut written = Vec::new();
    for &f in formats {
        let path = dir.join(format!("report.{}", f.extension()));
        std::fs::write(&path, render(report, f)).map_err(|source| RunError::Write { path: path.clone(), source })?;
        written.push(path);
    }
    Ok(written)
}

/// One line per suite plus every failing check.
pub fn summary(report: &QuantitiesReport) -> String {
    let mut out = String::new();
    let suites: Vec<&str> = report.metadata.get("suites").map(|s| s.split(", ").collect()).unwrap_or_default();
    for s in suites {
        let prefix = match s {
            "critical-n4" => "critical.",
            "sphere" => "",
            other => other,
        };
        let belongs = |id: &str| {
            if s == "sphere" {
                id.starts_with("sphere.") || id.starts_with("holo.") || id.starts_with("spot.")
            } else {
                id.starts_with(prefix)
            }
        };
        let (total, failed) = report
            .checks
            .iter()
            .filter(|c| belongs(&c.id))
            .fold((0, 0), |(t, f), c| (t + 1, f + usize::from(!c.passed)));
        let secs = report.timing.suites.get(s).copied().unwrap_or(0.0);
        out.push_str(&format!("{s}: {total} checks, {failed} failed ({secs:.2}s)\n"));
    }
    for c in report.checks.iter().filter(|c| !c.passed) {
        let params: Vec<String> = c.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!("FAIL {} [{}]", c.id, params.join(", ")));
        if let Some(r) = c.residual {
            out.push_str(&format!(" residual {r:.3e}"));
        }
        if let Some(d) = &c.detail {
            out.push_str(&format!(" ({d})"));
        }
        out.push('\n');
    }
    out.push_str(&format!("total: {} checks, {} failed\n", report.checks.len(), report.failed()));
    out
}

pub fn exit_code(report: &QuantitiesReport) -> u8 {
    if report.all_passed() {
        exit::PASS
    } else {
        exit::CHECK_FAILED
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::DimRange;

    fn small() -> RunConfig {
        let mut c = RunConfig::default();
        c.suites = vec![Suite::Sphere, Suite::Hypergeom];
        c.sphere.n = DimRange { min: 4, max: 5 };
        c.sphere.big_n_max = 2;
        c.hypergeom.instances = 5;
        c.hypergeom.connection_instances = 3;
        c
    }

    #[test]
    fn small_run_passes_and_is_deterministic() {
        let c = small();
        let a = run(&c).unwrap();
        let b = run(&c).unwrap();
        assert!(a.all_passed());
        assert_eq!(exit_code(&a), exit::PASS);
        assert_eq!((&a.metadata, &a.checks), (&b.metadata, &b.checks));
        assert_eq!(a.metadata["suites"], "sphere, hypergeom");
        assert_eq!(a.timing.suites.len(), 2);
        let s = summary(&a);
        assert!(s.contains("sphere: ") && s.contains("hypergeom: ") && s.contains("0 failed"));
    }

    #[test]
    fn invalid_config_is_rejected_before_running() {
        let mut c = small();
        c.numeric.presets = vec!["nope".into()];
        assert!(matches!(run(&c), Err(RunError::Config(_))));
    }
}

//! CSV and text renderings of a [`SuiteReport`].

use std::io::{self, Write};

use crate::scene::{format_num, Relation};
use crate::suite::{SuiteReport, TrialResult};

pub const CSV_HEADER: [&str; 11] =
    ["suite", "geometry", "seed", "trial", "invariant", "predicate", "value", "deviation", "tol", "relation", "pass"];

fn relation_name(r: Relation) -> &'static str {
    match r {
        Relation::Within => "within",
        Relation::Beyond => "beyond",
    }
}

/// One row per (trial, assertion), then `#` summary lines.
pub fn write_csv<W: Write>(report: &SuiteReport, out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let suite = report.spec.suite.name();
    let geometry = report.spec.geometry.name();
    let seed = report.spec.seed.to_string();
    for rec in &report.records {
        let trial = rec.trial.to_string();
        match &rec.result {
            TrialResult::Checked { outcomes, .. } => {
                for o in outcomes {
                    let value = o.value.as_ref().map(|v| format_num(*v)).unwrap_or_default();
                    w.write_record([
                        suite,
                        geometry,
                        &seed,
                        &trial,
                        &o.label,
                        &o.predicate,
                        &value,
                        &format_num(o.deviation),
                        &format_num(o.tol),
                        relation_name(o.relation),
                        if o.pass { "true" } else { "false" },
                    ])?;
                }
            }
            TrialResult::GenerationFailed(_) => {
                w.write_record([suite, geometry, &seed, &trial, "generation", "", "", "", "", "", "false"])?;
            }
        }
    }
    let mut out = w.into_inner().map_err(|e| e.into_error())?;
    for line in summary_lines(report) {
        writeln!(out, "# {line}")?;
    }
    out.flush()
}

pub fn summary_lines(report: &SuiteReport) -> Vec<String> {
    let s = &report.spec;
    let mut lines = vec![format!(
        "suite={} geometry={} trials={} seed={} passed={} failed={} generation_failed={} max_retries={} max_deviation={} duration_s={:.3}",
        s.suite,
        s.geometry,
        s.trials,
        s.seed,
        report.passed,
        report.failed,
        report.generation_failed,
        report.max_retries,
        format_num(report.max_deviation()),
        report.duration.as_secs_f64(),
    )];
    for (label, st) in &report.invariants {
        lines.push(format!(
            "invariant={label} relation={} tol={} checked={} failed={} max_deviation={} min_deviation={}",
            relation_name(st.relation),
            format_num(st.tol),
            st.checked,
            st.failed,
            format_num(st.max_deviation),
            format_num(st.min_deviation),
        ));
    }
    lines
}

/// Human-readable summary for the terminal.
pub fn render(report: &SuiteReport) -> String {
    let s = &report.spec;
    let mut out = format!(
        "{} on {}: {}/{} trials passed ({} generation failures), seed {}, {:.2}s\n",
        s.suite,
        s.geometry,
        report.passed,
        s.trials,
        report.generation_failed,
        s.seed,
        report.duration.as_secs_f64()
    );
    for (label, st) in &report.invariants {
        let (cmp, stat) = match st.relation {
            Relation::Within => ("<=", "max"),
            Relation::Beyond => (">", "min"),
        };
        out.push_str(&format!(
            "  {:<8} {label:<22} {stat} deviation {:.3e} (must be {cmp} {:.1e}), {} of {} failed\n",
            if st.failed == 0 { "ok" } else { "FAIL" },
            st.worst(),
            st.tol,
            st.failed,
            st.checked
        ));
    }
    out
}

use std::fmt::Write;

use super::counts::MAX_NGRAM;
use super::ThresholdResult;

/// How LC combines the n-gram precisions; written into every report.
pub const LC_AGGREGATION: &str = "arithmetic mean of p_n over n in 1..5 with candidates > 0; no brevity penalty";

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleSummary {
    pub name: String,
    pub la: f64,
    pub lc: f64,
    pub ga: f64,
    pub per_threshold: Vec<ThresholdResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub schedules: Vec<ScheduleSummary>,
}

impl MetricReport {
    pub fn schedule(&self, name: &str) -> Option<&ScheduleSummary> {
        self.schedules.iter().find(|s| s.name == name)
    }

    /// JSON rendering with a fixed key order and metric values to 4 decimals.
    pub fn to_json(&self) -> String {
        let mut s = String::new();
        s.push_str("{\n");
        let _ = writeln!(s, "  \"aggregation\": \"micro\",");
        let _ = writeln!(s, "  \"lc_aggregation\": \"{LC_AGGREGATION}\",");
        s.push_str("  \"schedules\": [");
        for (i, sched) in self.schedules.iter().enumerate() {
            s.push_str(if i == 0 { "\n" } else { ",\n" });
            let _ = writeln!(s, "    {{");
            let _ = writeln!(s, "      \"name\": \"{}\",", sched.name);
            let _ = writeln!(s, "      \"LA\": {:.4},", sched.la);
            let _ = writeln!(s, "      \"LC\": {:.4},", sched.lc);
            let _ = writeln!(s, "      \"GA\": {:.4},", sched.ga);
            s.push_str("      \"thresholds\": [");
            for (j, r) in sched.per_threshold.iter().enumerate() {
                s.push_str(if j == 0 { "\n" } else { ",\n" });
                write_threshold(&mut s, r);
            }
            s.push_str("\n      ]\n    }");
        }
        s.push_str("\n  ]\n}\n");
        s
    }
}

fn write_threshold(s: &mut String, r: &ThresholdResult) {
    let list = |xs: &[u64; MAX_NGRAM]| xs.iter().map(u64::to_string).collect::<Vec<_>>().join(", ");
    let mut undefined = Vec::new();
    if r.la.is_undefined() {
        undefined.push("\"LA\"");
    }
    if r.lc.is_undefined() {
        undefined.push("\"LC\"");
    }
    if r.ga.is_undefined() {
        undefined.push("\"GA\"");
    }
    let _ = write!(
        s,
        "        {{\"iou\": {:.2}, \"LA\": {:.4}, \"LC\": {:.4}, \"GA\": {:.4}, \
         \"la_tp\": {}, \"la_n\": {}, \"ga_tp\": {}, \"ga_n\": {}, \
         \"lc_matches\": [{}], \"lc_candidates\": [{}], \"undefined\": [{}]}}",
        r.threshold,
        r.la.value(),
        r.lc.value(),
        r.ga.value(),
        r.la.tp,
        r.la.n,
        r.ga.tp,
        r.ga.n,
        list(&r.lc.matches),
        list(&r.lc.candidates),
        undefined.join(", "),
    );
}

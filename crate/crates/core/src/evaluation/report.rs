use serde::Serialize;
use serde_json::Value;

/// One metric result as written to report files.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub metric: String,
    pub value: f64,
    pub config: Value,
    pub n: usize,
}

impl MetricReport {
    pub fn new(metric: impl Into<String>, value: f64, config: Value, n: usize) -> Self {
        MetricReport {
            metric: metric.into(),
            value,
            config,
            n,
        }
    }

    pub fn to_line(&self) -> String {
        crate::jsonl::to_line(self)
    }
}

use std::fmt::Write as _;

use cayley_core::SrgReport;
use serde::Serialize;
use serde_json::Value;

use crate::args::Output;
use crate::commands::{CensusRow, FieldInfo, GraphBuildReport, VerifySummary};

/// Something a command prints. JSON and CSV have generic defaults; text is
/// per command.
pub trait Render: Serialize {
    fn text(&self) -> String;

    fn csv(&self) -> String {
        key_value_csv(&serde_json::to_value(self).expect("plain data serializes"))
    }

    fn render(&self, output: Output) -> String {
        match output {
            Output::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
                s.push('\n');
                s
            }
            Output::Csv => self.csv(),
            Output::Text => self.text(),
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn write_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

fn key_value_csv(v: &Value) -> String {
    let rows = v
        .as_object()
        .into_iter()
        .flatten()
        .map(|(k, v)| vec![k.clone(), scalar(v)]);
    write_csv(&["key", "value"], rows)
}

impl Render for FieldInfo {
    fn text(&self) -> String {
        match &self.modulus {
            Some(m) => format!(
                "GF({}^{}) order {} modulus (constant first) {:?}\n",
                self.p, self.k, self.q, m
            ),
            None => format!("GF({}) prime field\n", self.p),
        }
    }
}

impl Render for Vec<CensusRow> {
    fn text(&self) -> String {
        let mut out = String::new();
        for row in self {
            let r = &row.record;
            let _ = write!(
                out,
                "n={} q={} rank={} {:<7} {}",
                r.n, r.q, r.rank, r.method, r.count
            );
            if let Some(a) = row.agrees {
                let _ = write!(out, " agrees={a}");
            }
            out.push('\n');
        }
        out
    }

    fn csv(&self) -> String {
        let rows = self.iter().map(|row| {
            let r = &row.record;
            vec![
                r.n.to_string(),
                r.q.to_string(),
                r.rank.to_string(),
                r.method.to_string(),
                r.count.to_string(),
                row.agrees.map(|a| a.to_string()).unwrap_or_default(),
            ]
        });
        write_csv(&["n", "q", "rank", "method", "count", "agrees"], rows)
    }
}

impl Render for VerifySummary {
    fn text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(
                out,
                "{verdict} {} n={} q={}: expected {}, observed {}",
                c.check, c.n, c.q, c.expected, c.observed
            );
        }
        let _ = writeln!(
            out,
            "{}",
            if self.passed {
                "all checks passed"
            } else {
                "some checks failed"
            }
        );
        out
    }

    fn csv(&self) -> String {
        let rows = self.checks.iter().map(|c| {
            vec![
                c.check.clone(),
                c.n.to_string(),
                c.q.to_string(),
                c.passed.to_string(),
                c.expected.clone(),
                c.observed.clone(),
            ]
        });
        write_csv(&["check", "n", "q", "passed", "expected", "observed"], rows)
    }
}

impl Render for SrgReport {
    fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "Cay(M_{}(F_{}), GL_{}): {} vertices, degree {}",
            self.n, self.q, self.n, self.order, self.degree
        );
        let _ = writeln!(out, "lambda = {}", self.lambda);
        for (r, mu) in &self.mu_by_rank {
            let _ = writeln!(out, "mu[rank {r}] = {mu}");
        }
        let _ = writeln!(out, "strongly regular: {}", self.is_srg);
        if let Some([v, k, l, m]) = self.parameters {
            let _ = writeln!(out, "parameters: ({v}, {k}, {l}, {m})");
        }
        if let Some(w) = &self.witness {
            let _ = writeln!(
                out,
                "witness: ranks {} and {} give {} vs {} common neighbours",
                w.rank_pair[0], w.rank_pair[1], w.counts[0], w.counts[1]
            );
        }
        if let Some(note) = &self.note {
            let _ = writeln!(out, "note: {note}");
        }
        out
    }
}

impl Render for GraphBuildReport {
    fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} vertices, {} edges", self.vertices, self.edges);
        let _ = writeln!(
            out,
            "degrees {:?}, lambdas {:?}, mus {:?}",
            self.degrees, self.lambdas, self.mus
        );
        let _ = writeln!(out, "pairwise SRG test: {}", self.is_srg);
        let _ = writeln!(out, "rank-class decision: {}", self.rank_class_is_srg);
        let _ = writeln!(out, "agree: {}", self.agrees);
        out
    }
}

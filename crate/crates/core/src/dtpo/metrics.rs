//! Per-iteration training records and their CSV form.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "iteration,env_steps,mean_batch_return,ldt_before,ldt_after,accepted,critic_loss,det_eval_return,best_return,leaves,seconds";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationMetrics {
    /// 1-based.
    pub iteration: usize,
    /// Environment steps taken so far, evaluation excluded.
    pub env_steps: u64,
    /// Mean return of episodes finished inside this iteration's batch.
    pub mean_batch_return: Option<f64>,
    pub ldt_before: f64,
    pub ldt_after: f64,
    pub accepted: bool,
    pub critic_loss: f64,
    /// Mean greedy return, on iterations where an evaluation ran.
    pub det_eval_return: Option<f64>,
    pub best_return: f64,
    /// Leaves of the incumbent policy after the acceptance test.
    pub leaves: usize,
    pub seconds: f64,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl IterationMetrics {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.iteration,
            self.env_steps,
            opt(self.mean_batch_return),
            self.ldt_before,
            self.ldt_after,
            self.accepted,
            self.critic_loss,
            opt(self.det_eval_return),
            self.best_return,
            self.leaves,
            self.seconds
        )
    }

    pub fn from_csv_row(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != 11 {
            return Err(Error::MalformedInput(format!(
                "expected 11 metric fields, found {}",
                fields.len()
            )));
        }
        fn num<T: std::str::FromStr>(s: &str, name: &str) -> Result<T> {
            s.parse()
                .map_err(|_| Error::MalformedInput(format!("bad {name}: {s:?}")))
        }
        fn maybe(s: &str, name: &str) -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                num(s, name).map(Some)
            }
        }
        Ok(Self {
            iteration: num(fields[0], "iteration")?,
            env_steps: num(fields[1], "env_steps")?,
            mean_batch_return: maybe(fields[2], "mean_batch_return")?,
            ldt_before: num(fields[3], "ldt_before")?,
            ldt_after: num(fields[4], "ldt_after")?,
            accepted: num(fields[5], "accepted")?,
            critic_loss: num(fields[6], "critic_loss")?,
            det_eval_return: maybe(fields[7], "det_eval_return")?,
            best_return: num(fields[8], "best_return")?,
            leaves: num(fields[9], "leaves")?,
            seconds: num(fields[10], "seconds")?,
        })
    }
}

pub fn write_csv<W: Write>(mut out: W, rows: &[IterationMetrics]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.csv_row())?;
    }
    Ok(())
}

pub fn read_csv(text: &str) -> Result<Vec<IterationMetrics>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == CSV_HEADER => {}
        other => {
            return Err(Error::MalformedInput(format!(
                "unexpected metrics header: {:?}",
                other.unwrap_or("")
            )))
        }
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(IterationMetrics::from_csv_row)
        .collect()
}

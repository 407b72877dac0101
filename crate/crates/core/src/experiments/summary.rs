//! Output files and the per-run JSON summary.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::ExperimentConfig;
use crate::error::Result;

/// A CSV destination: a file when the run has an output directory, memory
/// otherwise. Every byte also feeds the run-id hash.
pub struct CsvSink {
    name: String,
    file: Option<BufWriter<File>>,
    buffer: Vec<u8>,
    hasher: Sha256,
}

impl CsvSink {
    pub fn create(dir: Option<&Path>, name: &str, header: &str) -> Result<Self> {
        let file = match dir {
            Some(d) => {
                std::fs::create_dir_all(d)?;
                Some(BufWriter::new(File::create(d.join(name))?))
            }
            None => None,
        };
        let mut sink = Self {
            name: name.to_string(),
            file,
            buffer: Vec::new(),
            hasher: Sha256::new(),
        };
        sink.row(header)?;
        Ok(sink)
    }

    /// Appends one line; `line` carries no terminator.
    pub fn row(&mut self, line: &str) -> Result<()> {
        self.hasher.update(line.as_bytes());
        self.hasher.update(b"\n");
        match &mut self.file {
            Some(f) => writeln!(f, "{line}")?,
            None => {
                self.buffer.extend_from_slice(line.as_bytes());
                self.buffer.push(b'\n');
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Result<CsvOutput> {
        if let Some(mut f) = self.file {
            f.flush()?;
        }
        Ok(CsvOutput {
            name: self.name,
            digest: self.hasher.finalize().to_vec(),
            contents: self.buffer,
        })
    }
}

/// A finished CSV. `contents` is empty when the file went to disk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsvOutput {
    pub name: String,
    pub digest: Vec<u8>,
    pub contents: Vec<u8>,
}

impl CsvOutput {
    pub fn text(&self) -> &str {
        std::str::from_utf8(&self.contents).expect("CSV rows are UTF-8")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub experiment: String,
    /// SHA-256 over the experiment name, the result-relevant configuration
    /// and every CSV written, in hex.
    pub run_id: String,
    pub config: ExperimentConfig,
    pub results: serde_json::Value,
}

impl RunSummary {
    pub fn new(
        experiment: &str,
        config: &ExperimentConfig,
        csvs: &[CsvOutput],
        results: serde_json::Value,
    ) -> Self {
        let mut h = Sha256::new();
        h.update(experiment.as_bytes());
        h.update(serde_json::to_vec(&config.result_relevant()).expect("config serializes"));
        for c in csvs {
            h.update(c.name.as_bytes());
            h.update(&c.digest);
        }
        let run_id = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Self {
            experiment: experiment.to_string(),
            run_id,
            config: config.clone(),
            results,
        }
    }

    /// Writes `<experiment>_summary.json` into the configured output
    /// directory, if any.
    pub fn write(&self) -> Result<()> {
        if let Some(dir) = &self.config.output {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(format!("{}_summary.json", self.experiment));
            std::fs::write(
                path,
                serde_json::to_string_pretty(self).expect("summary serializes"),
            )?;
        }
        Ok(())
    }
}

/// What an experiment run hands back: its summary and the CSVs that were
/// kept in memory.
#[derive(Clone, Debug)]
pub struct ExperimentOutput<R> {
    pub summary: RunSummary,
    pub csvs: Vec<CsvOutput>,
    pub report: R,
}

impl<R> ExperimentOutput<R> {
    pub fn csv(&self, name: &str) -> Option<&CsvOutput> {
        self.csvs.iter().find(|c| c.name == name)
    }
}

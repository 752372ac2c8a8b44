//! File emission: CSV with a `#` header block, JSON documents and
//! optional plot-script stubs.

use crate::config::Scenario;
use crate::failure::Failure;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// SHA-256 of the canonical JSON form of the scenario, output placement
/// excluded.
pub fn scenario_hash(s: &Scenario) -> String {
    let canonical = serde_json::to_vec(&s.payload_key()).expect("scenario serialises");
    let digest = Sha256::digest(&canonical);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Output context shared by the files of one run.
pub struct Sink {
    pub dir: PathBuf,
    pub degrees: bool,
    pub plot_stubs: bool,
    header: Vec<String>,
}

impl Sink {
    pub fn new(dir: &Path, scenario: &Scenario) -> Result<Self, Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure::io(&dir.display().to_string(), e))?;
        let sv = &scenario.solver;
        let header = vec![
            format!("fold-dynamics {VERSION}"),
            format!("scenario_sha256 {}", scenario_hash(scenario)),
            format!(
                "tolerances rel_tol={} abs_tol={} event_tol={} max_step={} eps_restart={}",
                num(sv.rel_tol),
                num(sv.abs_tol),
                num(sv.event_tol),
                num(sv.max_step),
                num(scenario.run.eps_restart)
            ),
            format!("angles {}", if scenario.output.degrees { "degrees" } else { "radians" }),
        ];
        Ok(Self { dir: dir.to_path_buf(), degrees: scenario.output.degrees, plot_stubs: scenario.output.plot_stubs, header })
    }

    pub fn angle(&self, a: f64) -> f64 {
        if self.degrees {
            a.to_degrees()
        } else {
            a
        }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Opens a CSV file, writes the header block and the column row.
    pub fn csv(&self, name: &str, columns: &[&str]) -> Result<CsvFile, Failure> {
        let path = self.path(name);
        let file = File::create(&path).map_err(|e| Failure::io(&path.display().to_string(), e))?;
        let mut raw = BufWriter::new(file);
        for line in &self.header {
            writeln!(raw, "# {line}").map_err(|e| Failure::io(name, e))?;
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(raw);
        w.write_record(columns).map_err(|e| csv_failure(name, e))?;
        if self.plot_stubs {
            self.plot_stub(name, columns)?;
        }
        Ok(CsvFile { name: name.to_string(), w, rows: 0 })
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), Failure> {
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(value).expect("report serialises");
        text.push('\n');
        fs::write(&path, text).map_err(|e| Failure::io(&path.display().to_string(), e))
    }

    fn plot_stub(&self, name: &str, columns: &[&str]) -> Result<(), Failure> {
        let stem = name.trim_end_matches(".csv");
        let (x, y) = (columns.first().copied().unwrap_or("x"), columns.get(1).copied().unwrap_or("y"));
        let script = format!(
            "import pandas as pd\nimport matplotlib.pyplot as plt\n\n\
             df = pd.read_csv(\"{name}\", comment=\"#\")\n\
             df.plot(x=\"{x}\", y=\"{y}\", style=\".\", markersize=1)\n\
             plt.savefig(\"{stem}.png\", dpi=150)\n"
        );
        let path = self.path(&format!("plot_{stem}.py"));
        fs::write(&path, script).map_err(|e| Failure::io(&path.display().to_string(), e))
    }
}

fn csv_failure(name: &str, e: csv::Error) -> Failure {
    Failure { code: crate::failure::EXIT_NUMERICAL, kind: "Io".into(), message: format!("{name}: {e}") }
}

pub struct CsvFile {
    name: String,
    w: csv::Writer<BufWriter<File>>,
    pub rows: usize,
}

impl CsvFile {
    pub fn row<I, S>(&mut self, fields: I) -> Result<(), Failure>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.rows += 1;
        self.w.write_record(fields).map_err(|e| csv_failure(&self.name, e))
    }

    pub fn finish(mut self) -> Result<usize, Failure> {
        self.w.flush().map_err(|e| Failure::io(&self.name, e))?;
        Ok(self.rows)
    }
}

/// Shortest round-trip decimal form; exponent notation outside
/// `[1e-5, 1e16)`.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !a.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use cube_needlets::Error;
use serde_json::Value;

pub enum Failure {
    Invalid(String),
    /// Names of the invariants that failed.
    Check(Vec<String>),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Convergence { .. } | Error::GridResolution(_) | Error::SpectrumNotCovered { .. } => {
                Failure::Check(vec![e.to_string()])
            }
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

pub type Outcome = Result<(), Failure>;

/// 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn point(x: &[f64]) -> String {
    x.iter().map(|&v| num(v)).collect::<Vec<_>>().join(";")
}

/// Routes the primary report to `--out` or stdout and the summary to whichever is left.
pub struct Output<'a> {
    path: Option<&'a Path>,
}

impl<'a> Output<'a> {
    pub fn new(path: Option<&'a Path>) -> Self {
        Self { path }
    }

    pub fn has_path(&self) -> bool {
        self.path.is_some()
    }

    fn primary(&self) -> io::Result<Box<dyn Write>> {
        Ok(match self.path {
            Some(p) => Box::new(File::create(p)?),
            None => Box::new(io::stdout().lock()),
        })
    }

    pub fn csv(&self, header: &[&str], rows: &[Vec<String>]) -> Outcome {
        let mut w = csv::Writer::from_writer(self.primary()?);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn json(&self, value: &Value) -> Outcome {
        let mut w = self.primary()?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        Ok(())
    }

    /// One-line JSON summary next to a CSV report.
    pub fn summary(&self, value: &Value) -> Outcome {
        let line = serde_json::to_string(value)?;
        match self.path {
            Some(_) => println!("{line}"),
            None => eprintln!("{line}"),
        }
        Ok(())
    }
}

/// Pass/fail lines on stderr, collected into an exit status.
#[derive(Default)]
pub struct Checks {
    failed: Vec<String>,
}

impl Checks {
    pub fn check(&mut self, name: &str, ok: bool, detail: String) {
        eprintln!("[{}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed.push(name.to_string());
        }
    }

    pub fn info(&self, name: &str, detail: String) {
        eprintln!("[INFO] {name}: {detail}");
    }

    pub fn finish(self) -> Outcome {
        if self.failed.is_empty() {
            Ok(())
        } else {
            Err(Failure::Check(self.failed))
        }
    }
}

//! Artifact emission.

use std::fs;
use std::io::{self, Write};

use serde_json::Value;

use crate::config::{Format, Target};
use crate::error::CliError;

/// Full double precision, 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub enum Artifact {
    Csv(Table),
    Json(Value),
}

impl Artifact {
    pub fn format(&self) -> Format {
        match self {
            Artifact::Csv(_) => Format::Csv,
            Artifact::Json(_) => Format::Json,
        }
    }

    fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        match self {
            Artifact::Csv(t) => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| CliError::Io(e.to_string());
                w.write_record(&t.header).map_err(io)?;
                for row in &t.rows {
                    w.write_record(row).map_err(io)?;
                }
                w.into_inner().map_err(|e| CliError::Io(e.to_string()))
            }
            Artifact::Json(v) => {
                let mut out = serde_json::to_vec_pretty(v).map_err(|e| CliError::Io(e.to_string()))?;
                out.push(b'\n');
                Ok(out)
            }
        }
    }
}

pub fn emit(artifact: &Artifact, target: &Target) -> Result<String, CliError> {
    let bytes = artifact.to_bytes()?;
    match target {
        Target::Stdout => {
            io::stdout()
                .write_all(&bytes)
                .map_err(|e| CliError::Io(format!("stdout: {e}")))?;
            Ok("stdout".into())
        }
        Target::File(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            }
            fs::write(path, &bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            log::info!("wrote {} bytes to {}", bytes.len(), path.display());
            Ok(path.display().to_string())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(num(-0.25), "-2.5000000000000000e-1");
    }

    #[test]
    fn csv_bytes() {
        let a = Artifact::Csv(Table {
            header: vec!["a", "b"],
            rows: vec![vec!["1".into(), "x,y".into()]],
        });
        assert_eq!(a.to_bytes().unwrap(), b"a,b\n1,\"x,y\"\n");
    }
}

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Accumulates CSV rows in memory and writes them in one go.
pub struct Csv {
    path: PathBuf,
    body: String,
    width: usize,
}

impl Csv {
    pub fn new(dir: &Path, name: &str, header: &[&str]) -> Self {
        let mut body = header.join(",");
        body.push('\n');
        Self {
            path: dir.join(name),
            body,
            width: header.len(),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.width);
        let _ = writeln!(self.body, "{}", fields.join(","));
    }

    pub fn finish(self) -> Result<PathBuf, CliError> {
        fs::write(&self.path, self.body)?;
        Ok(self.path)
    }
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_carry_seventeen_digits() {
        let s = num(std::f64::consts::PI);
        assert_eq!(s, "3.1415926535897931e0");
        assert_eq!(s.parse::<f64>().unwrap(), std::f64::consts::PI);
    }
}

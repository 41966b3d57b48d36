//! Output files: every table starts with a comment line holding the command
//! and its effective configuration as JSON; `--json` replaces the tables by
//! one JSON object.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) if p != Path::new("-") => {
            Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?))
        }
        _ => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub struct Run {
    pub command: &'static str,
    pub config: Value,
    pub json: bool,
}

impl Run {
    pub fn new(command: &'static str, args: &impl Serialize, json: bool) -> Result<Self> {
        Ok(Run { command, config: serde_json::to_value(args)?, json })
    }

    /// Records a resolved default or derived setting in the header.
    pub fn set(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        if let Value::Object(map) = &mut self.config {
            map.insert(key.to_string(), serde_json::to_value(value)?);
        }
        Ok(())
    }

    pub fn header(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "# mfitt {} {}", self.command, self.config)
    }

    /// Writes `result` as JSON, or its text rendering after the header.
    pub fn emit<R: Serialize>(
        &self,
        path: Option<&Path>,
        result: &R,
        text: impl FnOnce(&mut dyn Write) -> Result<()>,
    ) -> Result<()> {
        let mut out = open_output(path)?;
        if self.json {
            serde_json::to_writer(
                &mut out,
                &json!({ "command": self.command, "config": self.config, "result": result }),
            )?;
            writeln!(out)?;
        } else {
            self.header(&mut out)?;
            text(&mut out)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `PREFIX.name.txt`, or `None` (stdout) without a prefix.
pub fn with_suffix(prefix: Option<&Path>, name: &str) -> Option<PathBuf> {
    prefix.map(|p| {
        let mut s = p.as_os_str().to_owned();
        s.push(format!(".{name}"));
        PathBuf::from(s)
    })
}

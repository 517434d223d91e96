use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use serde_json::{json, Value};

use crate::{Format, OutputArgs};

pub const GIT_DESCRIBE: &str = env!("CFTP_GIT_DESCRIBE");

/// Provenance embedded in every artifact.
pub struct Meta {
    command: &'static str,
    master_seed: Option<u64>,
    config: Value,
}

impl Meta {
    pub fn new(command: &'static str, master_seed: u64, config: Value) -> Self {
        Self {
            command,
            master_seed: Some(master_seed),
            config,
        }
    }

    /// For deterministic commands that draw no randomness.
    pub fn unseeded(command: &'static str, config: Value) -> Self {
        Self {
            command,
            master_seed: None,
            config,
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "git_describe": GIT_DESCRIBE,
            "command": self.command,
            "master_seed": self.master_seed,
            "config": self.config,
        })
    }
}

pub fn json_document(meta: &Meta, body: Value) -> String {
    let mut doc = json!({ "meta": meta.to_json() });
    if let (Some(doc), Value::Object(body)) = (doc.as_object_mut(), body) {
        doc.extend(body);
    }
    let mut text = serde_json::to_string_pretty(&doc).expect("json values serialize");
    text.push('\n');
    text
}

/// CSV preamble: one `#` comment line holding the metadata, then the header.
pub fn csv_header(meta: &Meta, header: &str) -> String {
    format!("# {}\n{header}\n", meta.to_json())
}

fn target(args: &OutputArgs, command: &str, seed: Option<u64>) -> Option<PathBuf> {
    if let Some(out) = &args.out {
        return (out.as_os_str() != "-").then(|| out.clone());
    }
    let ext = match args.format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    let name = match seed {
        Some(seed) => format!("{command}-{seed}.{ext}"),
        None => format!("{command}.{ext}"),
    };
    args.out_dir.as_ref().map(|dir| dir.join(name))
}

pub fn emit(args: &OutputArgs, command: &str, seed: impl Into<Option<u64>>, text: &str) -> anyhow::Result<()> {
    match target(args, command, seed.into()) {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

use std::fmt::Display;
use std::io::{Read, Write};
use std::path::Path;

use anyhow::{Context, Result};
use recolor_core::format::from_any;
use recolor_core::Hypergraph;

/// Reads a text or JSON instance from a file, or from stdin for `-`.
pub fn read_instance(path: &str) -> Result<Hypergraph> {
    let text = read_string(path)?;
    from_any(&text).with_context(|| format!("parsing instance {path}"))
}

pub fn read_string(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

pub fn write_output(path: Option<&Path>, body: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn join<T: Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

//! Line-oriented text formats for problem instances.
//!
//! NK landscape:
//!
//! ```text
//! nk <n> <k> <comment>
//! <partner indices of variable 0, space separated; empty when k = 0>
//! <2^(k+1) contribution values of variable 0>
//! ... one pair of lines per variable
//! ```
//!
//! TSP instance:
//!
//! ```text
//! tsp <m> <comment>
//! <x> <y>
//! ... one line per city
//! ```
//!
//! The comment is free text (conventionally `seed=<u64>`). Reals carry 17
//! significant digits so that reading a file reproduces every value exactly.
//! Distances are recomputed from the coordinates on load.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use pps_core::{NkLandscape, TspInstance};

use crate::error::{LabError, Result};
use crate::numfmt::sig17;

pub fn write_landscape<W: Write>(mut out: W, l: &NkLandscape, comment: &str) -> io::Result<()> {
    writeln!(out, "nk {} {} {}", l.n(), l.k(), comment)?;
    for i in 0..l.n() {
        let partners: Vec<String> = l.partners(i).iter().map(|p| p.to_string()).collect();
        writeln!(out, "{}", partners.join(" "))?;
        let mut first = true;
        for &v in l.table(i) {
            if !first {
                out.write_all(b" ")?;
            }
            first = false;
            out.write_all(sig17(v).as_bytes())?;
        }
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn write_tsp<W: Write>(mut out: W, inst: &TspInstance, comment: &str) -> io::Result<()> {
    writeln!(out, "tsp {} {}", inst.cities(), comment)?;
    for &(x, y) in inst.coords() {
        writeln!(out, "{} {}", sig17(x), sig17(y))?;
    }
    out.flush()
}

/// An instance read from disk.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Nk(NkLandscape),
    Tsp(TspInstance),
}

struct Lines<'a, R> {
    inner: io::Lines<R>,
    line: usize,
    origin: &'a Path,
}

impl<R: BufRead> Lines<'_, R> {
    fn next(&mut self) -> Result<String> {
        self.line += 1;
        match self.inner.next() {
            Some(Ok(s)) => Ok(s),
            Some(Err(e)) => Err(LabError::io(self.origin)(e)),
            None => Err(self.error("unexpected end of file")),
        }
    }

    fn error(&self, message: impl Into<String>) -> LabError {
        LabError::Parse {
            path: self.origin.to_path_buf(),
            line: self.line,
            message: message.into(),
        }
    }

    fn expect_end(&mut self) -> Result<()> {
        for rest in self.inner.by_ref() {
            self.line += 1;
            let rest = rest.map_err(LabError::io(self.origin))?;
            if !rest.trim().is_empty() {
                return Err(self.error("trailing content after the last record"));
            }
        }
        Ok(())
    }
}

fn parse_usize<R: BufRead>(lines: &Lines<'_, R>, tok: Option<&str>, what: &str) -> Result<usize> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| lines.error(format!("expected {what}")))
}

fn parse_reals<R: BufRead>(lines: &Lines<'_, R>, text: &str) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| lines.error(format!("`{t}` is not a number")))
        })
        .collect()
}

/// Reads either instance kind, dispatching on the header keyword.
pub fn read_instance<R: BufRead>(input: R, origin: &Path) -> Result<Instance> {
    let mut lines = Lines {
        inner: input.lines(),
        line: 0,
        origin,
    };
    let header = lines.next()?;
    let mut toks = header.split_whitespace();
    let instance = match toks.next() {
        Some("nk") => {
            let n = parse_usize(&lines, toks.next(), "n in header")?;
            let k = parse_usize(&lines, toks.next(), "k in header")?;
            let mut partners = Vec::with_capacity(n);
            let mut tables = Vec::with_capacity(n);
            for _ in 0..n {
                let p = lines.next()?;
                let list = p
                    .split_whitespace()
                    .map(|t| parse_usize(&lines, Some(t), "partner index"))
                    .collect::<Result<Vec<_>>>()?;
                partners.push(list);
                let t = lines.next()?;
                tables.push(parse_reals(&lines, &t)?);
            }
            lines.expect_end()?;
            Instance::Nk(
                NkLandscape::from_parts(n, k, partners, tables)
                    .map_err(|e| lines.error(e.to_string()))?,
            )
        }
        Some("tsp") => {
            let m = parse_usize(&lines, toks.next(), "city count in header")?;
            let mut coords = Vec::with_capacity(m);
            for _ in 0..m {
                let l = lines.next()?;
                match parse_reals(&lines, &l)?[..] {
                    [x, y] => coords.push((x, y)),
                    _ => return Err(lines.error("expected `x y`")),
                }
            }
            lines.expect_end()?;
            Instance::Tsp(TspInstance::from_coords(coords).map_err(|e| lines.error(e.to_string()))?)
        }
        _ => return Err(lines.error("header must start with `nk` or `tsp`")),
    };
    Ok(instance)
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    let file = File::open(path).map_err(LabError::io(path))?;
    read_instance(BufReader::new(file), path)
}

pub fn save_instance(path: &Path, instance: &Instance, comment: &str) -> Result<()> {
    let file = File::create(path).map_err(LabError::io(path))?;
    let out = BufWriter::new(file);
    match instance {
        Instance::Nk(l) => write_landscape(out, l, comment),
        Instance::Tsp(t) => write_tsp(out, t, comment),
    }
    .map_err(LabError::io(path))
}

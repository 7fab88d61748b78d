//! Bit-exact file I/O for hypergraphs.
//!
//! `.hg` text format: first line `n r m` (decimal); then `m` lines, each `r`
//! strictly increasing 0-based vertex indices, space-separated; lines
//! beginning `#` are comments; trailing newline required. A JSON mirror
//! `{"n":…, "r":…, "edges":[[…],…]}` is accepted on read and produced under
//! the json format flag.

use crate::error::{HxError, Result};
use crate::hypergraph::Hypergraph;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HgFormat {
    Text,
    Json,
}

#[derive(Serialize, Deserialize)]
struct JsonHypergraph {
    n: usize,
    r: usize,
    edges: Vec<Vec<usize>>,
}

/// Options shared by read and write. `one_based` shifts vertex labels by one
/// at the file boundary only; in-memory indices are always 0-based.
#[derive(Clone, Debug, Default)]
pub struct IoOptions {
    pub one_based: bool,
    /// Comment lines (without the leading `#`) emitted after the header.
    pub comments: Vec<String>,
}

pub fn parse_hypergraph(input: &str, opts: &IoOptions) -> Result<Hypergraph> {
    let trimmed = input.trim_start();
    if trimmed.starts_with('{') {
        let jh: JsonHypergraph = serde_json::from_str(trimmed)
            .map_err(|e| HxError::ParseError { line: e.line(), msg: e.to_string() })?;
        let edges = shift_in(jh.edges, opts.one_based, jh.n)?;
        return Hypergraph::canonicalize(&edges, jh.n, jh.r);
    }

    let mut header: Option<(usize, usize, usize)> = None;
    let mut raw_edges: Vec<Vec<usize>> = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<usize> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>().map_err(|_| HxError::ParseError {
                    line: lineno + 1,
                    msg: format!("not an integer: {tok}"),
                })
            })
            .collect::<Result<_>>()?;
        match header {
            None => {
                if fields.len() != 3 {
                    return Err(HxError::ParseError {
                        line: lineno + 1,
                        msg: "header must be `n r m`".into(),
                    });
                }
                header = Some((fields[0], fields[1], fields[2]));
            }
            Some((_, r, _)) => {
                if fields.len() != r {
                    return Err(HxError::ParseError {
                        line: lineno + 1,
                        msg: format!("edge line has {} fields, expected {r}", fields.len()),
                    });
                }
                if !fields.windows(2).all(|w| w[0] < w[1]) {
                    return Err(HxError::ParseError {
                        line: lineno + 1,
                        msg: "vertex indices must be strictly increasing".into(),
                    });
                }
                raw_edges.push(fields);
            }
        }
    }
    let (n, r, m) = header.ok_or(HxError::FormatViolation("missing header".into()))?;
    if raw_edges.len() != m {
        return Err(HxError::FormatViolation(format!(
            "header declares {m} edges but {} edge lines found",
            raw_edges.len()
        )));
    }
    let raw_edges = shift_in(raw_edges, opts.one_based, n)?;
    Hypergraph::canonicalize(&raw_edges, n, r)
}

pub fn format_hypergraph(h: &Hypergraph, format: HgFormat, opts: &IoOptions) -> String {
    let edges = shift_out(h.edge_lists(), opts.one_based);
    match format {
        HgFormat::Json => {
            let jh = JsonHypergraph { n: h.n(), r: h.r(), edges };
            let mut s = serde_json::to_string(&jh).expect("serialize");
            s.push('\n');
            s
        }
        HgFormat::Text => {
            let mut s = String::new();
            writeln!(s, "{} {} {}", h.n(), h.r(), h.len()).unwrap();
            for c in &opts.comments {
                writeln!(s, "# {c}").unwrap();
            }
            for e in edges {
                let line: Vec<String> = e.iter().map(|v| v.to_string()).collect();
                writeln!(s, "{}", line.join(" ")).unwrap();
            }
            s
        }
    }
}

pub fn read_hypergraph(path: impl AsRef<Path>) -> Result<Hypergraph> {
    read_hypergraph_opts(path, &IoOptions::default())
}

pub fn read_hypergraph_opts(path: impl AsRef<Path>, opts: &IoOptions) -> Result<Hypergraph> {
    let input = std::fs::read_to_string(path)?;
    parse_hypergraph(&input, opts)
}

pub fn write_hypergraph(h: &Hypergraph, path: impl AsRef<Path>) -> Result<()> {
    write_hypergraph_opts(h, path, HgFormat::Text, &IoOptions::default())
}

pub fn write_hypergraph_opts(
    h: &Hypergraph,
    path: impl AsRef<Path>,
    format: HgFormat,
    opts: &IoOptions,
) -> Result<()> {
    std::fs::write(path, format_hypergraph(h, format, opts))?;
    Ok(())
}

fn shift_in(edges: Vec<Vec<usize>>, one_based: bool, n: usize) -> Result<Vec<Vec<usize>>> {
    if !one_based {
        return Ok(edges);
    }
    edges
        .into_iter()
        .map(|e| {
            e.into_iter()
                .map(|v| {
                    v.checked_sub(1)
                        .ok_or(HxError::VertexOutOfRange { vertex: v, n })
                })
                .collect()
        })
        .collect()
}

fn shift_out(edges: Vec<Vec<usize>>, one_based: bool) -> Vec<Vec<usize>> {
    if !one_based {
        return edges;
    }
    edges
        .into_iter()
        .map(|e| e.into_iter().map(|v| v + 1).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_k3() {
        let k3 = Hypergraph::canonicalize(&[vec![0, 1], vec![0, 2], vec![1, 2]], 3, 2).unwrap();
        let text = format_hypergraph(&k3, HgFormat::Text, &IoOptions::default());
        let back = parse_hypergraph(&text, &IoOptions::default()).unwrap();
        assert_eq!(back, k3);
        // byte-for-byte stability on canonical files
        assert_eq!(format_hypergraph(&back, HgFormat::Text, &IoOptions::default()), text);
    }

    #[test]
    fn empty_graph_header_only() {
        let h = parse_hypergraph("5 2 0\n", &IoOptions::default()).unwrap();
        assert_eq!((h.n(), h.r(), h.len()), (5, 2, 0));
    }

    #[test]
    fn edge_count_mismatch_is_format_violation() {
        let err = parse_hypergraph("4 2 3\n0 1\n1 2\n", &IoOptions::default()).unwrap_err();
        assert!(matches!(err, HxError::FormatViolation(_)));
    }

    #[test]
    fn json_mirror_round_trip() {
        let k3 = Hypergraph::canonicalize(&[vec![0, 1], vec![0, 2], vec![1, 2]], 3, 2).unwrap();
        let json = format_hypergraph(&k3, HgFormat::Json, &IoOptions::default());
        let back = parse_hypergraph(&json, &IoOptions::default()).unwrap();
        assert_eq!(back, k3);
    }

    #[test]
    fn one_based_shift() {
        let opts = IoOptions { one_based: true, comments: vec![] };
        let h = parse_hypergraph("3 2 1\n1 2\n", &opts).unwrap();
        assert_eq!(h.edge_lists(), vec![vec![0, 1]]);
        let text = format_hypergraph(&h, HgFormat::Text, &opts);
        assert_eq!(text, "3 2 1\n1 2\n");
    }
}

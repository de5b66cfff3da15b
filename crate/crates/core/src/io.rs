//! On-disk graph directory format and TSV helpers.
//!
//! Layout:
//! ```text
//! <dir>/meta.json            {"n_nodes": N, "relations": ["name", ...],
//!                             "attributes": "attributes.tsv" | null,
//!                             "labels": "labels.txt" | null}
//! <dir>/relations/<name>.edges   one "u v" pair per line, 0-based ids
//! <dir>/attributes.tsv           N lines of D tab-separated reals
//! <dir>/labels.txt               N lines of one integer each
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{MultiRelGraph, Relation};

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    n_nodes: usize,
    relations: Vec<String>,
    #[serde(default)]
    attributes: Option<String>,
    #[serde(default)]
    labels: Option<String>,
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Load a validated graph from a directory.
pub fn load_graph(dir: &Path) -> Result<MultiRelGraph> {
    let meta_path = dir.join("meta.json");
    let meta_text = fs::read_to_string(&meta_path).map_err(|e| io_err(&meta_path, e))?;
    let meta: Meta = serde_json::from_str(&meta_text).map_err(|e| Error::DataFormat {
        path: meta_path.display().to_string(),
        line: e.line(),
        msg: e.to_string(),
    })?;
    if meta.relations.is_empty() {
        return Err(Error::Data(format!(
            "{}: no relations declared",
            meta_path.display()
        )));
    }

    let mut relations = Vec::with_capacity(meta.relations.len());
    for name in &meta.relations {
        let path = dir.join("relations").join(format!("{name}.edges"));
        relations.push(load_relation(&path, name, meta.n_nodes)?);
    }

    let attributes = match &meta.attributes {
        Some(file) => Some(read_tsv_matrix(&dir.join(file))?),
        None => None,
    };
    let labels = match &meta.labels {
        Some(file) => Some(read_labels(&dir.join(file))?),
        None => None,
    };
    MultiRelGraph::new(meta.n_nodes, relations, attributes, labels)
}

fn load_relation(path: &Path, name: &str, n_nodes: usize) -> Result<Relation> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<usize> {
            tok.ok_or_else(|| format_err(path, lineno + 1, "expected `u v`"))?
                .parse::<usize>()
                .map_err(|_| format_err(path, lineno + 1, "node id is not a non-negative integer"))
        };
        let u = parse(parts.next())?;
        let v = parse(parts.next())?;
        if parts.next().is_some() {
            return Err(format_err(path, lineno + 1, "expected exactly two fields"));
        }
        if u == v {
            return Err(format_err(
                path,
                lineno + 1,
                &format!("self-loop ({u}, {v})"),
            ));
        }
        if u >= n_nodes || v >= n_nodes {
            return Err(format_err(
                path,
                lineno + 1,
                &format!("node id out of range [0, {n_nodes})"),
            ));
        }
        edges.push((u, v));
    }
    // Relation::new re-validates and reports duplicates without line numbers;
    // catch those here so the message carries the file.
    Relation::new(name, edges, n_nodes).map_err(|e| match e {
        Error::Data(msg) => Error::Data(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn format_err(path: &Path, line: usize, msg: &str) -> Error {
    Error::DataFormat {
        path: path.display().to_string(),
        line,
        msg: msg.to_string(),
    }
}

/// Matrix of tab/space separated reals, one row per line.
pub fn read_tsv_matrix(path: &Path) -> Result<Array2<f64>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| format_err(path, lineno + 1, &format!("bad real `{tok}`")))
            })
            .collect::<Result<_>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(format_err(
                    path,
                    lineno + 1,
                    &format!("expected {} columns, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Data(format!("{}: empty matrix", path.display())));
    }
    let ncols = rows[0].len();
    let flat: Vec<f64> = rows.concat();
    Array2::from_shape_vec((flat.len() / ncols, ncols), flat)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))
}

pub fn write_tsv_matrix(path: &Path, m: &Array2<f64>) -> Result<()> {
    let mut out = String::new();
    for row in m.rows() {
        let mut first = true;
        for v in row {
            if !first {
                out.push('\t');
            }
            // shortest round-trip representation, lossless on reload
            out.push_str(&format!("{v}"));
            first = false;
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

pub fn read_labels(path: &Path) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(lineno, line)| {
            line.trim()
                .parse::<usize>()
                .map_err(|_| format_err(path, lineno + 1, "bad label"))
        })
        .collect()
}

pub fn write_labels(path: &Path, labels: &[usize]) -> Result<()> {
    let mut out = String::with_capacity(labels.len() * 2);
    for l in labels {
        out.push_str(&l.to_string());
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Save a graph into the directory layout read by [`load_graph`].
pub fn save_graph(graph: &MultiRelGraph, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir.join("relations")).map_err(|e| io_err(dir, e))?;
    let meta = Meta {
        n_nodes: graph.n_nodes(),
        relations: graph.relations().iter().map(|r| r.name.clone()).collect(),
        attributes: graph.attributes().map(|_| "attributes.tsv".to_string()),
        labels: graph.labels().map(|_| "labels.txt".to_string()),
    };
    let meta_path = dir.join("meta.json");
    let mut f = fs::File::create(&meta_path).map_err(|e| io_err(&meta_path, e))?;
    serde_json::to_writer_pretty(&mut f, &meta)
        .map_err(|e| Error::Data(format!("{}: {e}", meta_path.display())))?;
    f.write_all(b"\n").map_err(|e| io_err(&meta_path, e))?;

    for rel in graph.relations() {
        let path = dir.join("relations").join(format!("{}.edges", rel.name));
        let mut out = String::with_capacity(rel.n_edges() * 8);
        for &(u, v) in rel.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        fs::write(&path, out).map_err(|e| io_err(&path, e))?;
    }
    if let Some(attrs) = graph.attributes() {
        write_tsv_matrix(&dir.join("attributes.tsv"), attrs)?;
    }
    if let Some(labels) = graph.labels() {
        write_labels(&dir.join("labels.txt"), labels)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{synth_mrg, SynthConfig};

    fn tmpdir(tag: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("demm-io-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn minimal_dir_loads() {
        let dir = tmpdir("minimal");
        fs::write(
            dir.join("meta.json"),
            r#"{"n_nodes": 2, "relations": ["r0"]}"#,
        )
        .unwrap();
        fs::create_dir_all(dir.join("relations")).unwrap();
        fs::write(dir.join("relations/r0.edges"), "0 1\n").unwrap();
        let g = load_graph(&dir).unwrap();
        assert_eq!(g.n_nodes(), 2);
        assert_eq!(g.total_edges(), 1);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn self_loop_reports_file_and_line() {
        let dir = tmpdir("selfloop");
        fs::write(
            dir.join("meta.json"),
            r#"{"n_nodes": 2, "relations": ["r0"]}"#,
        )
        .unwrap();
        fs::create_dir_all(dir.join("relations")).unwrap();
        fs::write(dir.join("relations/r0.edges"), "0 0\n").unwrap();
        let err = load_graph(&dir).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("r0.edges:1"), "got: {msg}");
        assert!(msg.contains("self-loop"), "got: {msg}");
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn id_out_of_range_rejected() {
        let dir = tmpdir("range");
        fs::write(
            dir.join("meta.json"),
            r#"{"n_nodes": 2, "relations": ["r0"]}"#,
        )
        .unwrap();
        fs::create_dir_all(dir.join("relations")).unwrap();
        fs::write(dir.join("relations/r0.edges"), "0 1\n1 2\n").unwrap();
        let err = load_graph(&dir).unwrap_err();
        assert!(err.to_string().contains(":2:"), "got: {err}");
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn synth_round_trip() {
        let g = synth_mrg(&SynthConfig {
            clusters: 2,
            nodes_per_cluster: 6,
            relations: 2,
            p_in: 0.6,
            p_out: vec![0.1, 0.2],
            attr_dim: 3,
            attr_sep: 2.0,
            seed: 42,
        })
        .unwrap();
        let dir = tmpdir("roundtrip");
        save_graph(&g, &dir).unwrap();
        let back = load_graph(&dir).unwrap();
        assert_eq!(back.n_nodes(), g.n_nodes());
        for (a, b) in g.relations().iter().zip(back.relations()) {
            assert_eq!(a.edges(), b.edges());
        }
        let (orig, loaded) = (g.attributes().unwrap(), back.attributes().unwrap());
        for (a, b) in orig.iter().zip(loaded.iter()) {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
        assert_eq!(g.labels().unwrap(), back.labels().unwrap());
        fs::remove_dir_all(&dir).unwrap();
    }
}

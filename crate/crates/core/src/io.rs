//! Text formats for graphs, partitions and models.
//!
//! Graph files start with a header line `# n=<items> L=<labels>` followed by
//! one `u<TAB>v<TAB>label` line per labeled pair. Partition files hold one
//! `item<TAB>cluster` line per item, with cluster `-1` for unassigned items.
//! Other lines starting with `#` and blank lines are ignored.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{LabelGraph, Partition};
use crate::model::{build_scaled_model, ModelFile, ModelParams, ScaledModel};

/// Model JSON: either explicit probabilities or scaled constants.
#[derive(Debug, Clone, serde::Deserialize)]
#[serde(untagged)]
pub enum ModelSource {
    Explicit(ModelFile),
    Scaled(ScaledModel),
}

impl ModelSource {
    pub fn build(self) -> Result<ModelParams> {
        match self {
            ModelSource::Explicit(file) => ModelParams::from_file(file),
            ModelSource::Scaled(spec) => build_scaled_model(&spec),
        }
    }
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), line, msg: msg.into() }
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::Config(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

pub fn format_graph(graph: &LabelGraph) -> String {
    let mut out = format!("# n={} L={}\n", graph.n(), graph.labels());
    let mut edges: Vec<_> = graph.iter_edges().collect();
    edges.sort_unstable();
    for (u, v, l) in edges {
        out.push_str(&format!("{u}\t{v}\t{l}\n"));
    }
    out
}

fn header_field(text: &str, key: &str) -> Option<usize> {
    text.split_whitespace()
        .find_map(|tok| tok.strip_prefix(key).and_then(|rest| rest.strip_prefix('=')))
        .and_then(|v| v.parse().ok())
}

pub fn parse_graph(text: &str, path: &Path) -> Result<LabelGraph> {
    let mut header = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if header.is_none() {
                if let (Some(n), Some(l)) = (header_field(comment, "n"), header_field(comment, "L")) {
                    header = Some((n, l));
                }
            }
            continue;
        }
        let (n, labels) = header.ok_or_else(|| parse_err(path, line_no, "missing '# n=<items> L=<labels>' header"))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(path, line_no, format!("expected 'u v label', found {} fields", fields.len())));
        }
        let num = |s: &str, what: &str| -> Result<usize> {
            s.parse().map_err(|_| parse_err(path, line_no, format!("{what} '{s}' is not a non-negative integer")))
        };
        let (u, v, l) = (num(fields[0], "item")?, num(fields[1], "item")?, num(fields[2], "label")?);
        if u >= n || v >= n {
            return Err(parse_err(path, line_no, format!("item outside 0..{n}")));
        }
        if l == 0 || l > labels {
            return Err(parse_err(path, line_no, format!("label {l} outside 1..={labels}")));
        }
        if u == v {
            return Err(parse_err(path, line_no, "self-loop"));
        }
        edges.push((u, v, l));
    }
    let (n, labels) = header.ok_or_else(|| parse_err(path, 1, "missing '# n=<items> L=<labels>' header"))?;
    LabelGraph::from_edges(n, labels, edges).map_err(|e| parse_err(path, 0, e.to_string()))
}

pub fn read_graph(path: &Path) -> Result<LabelGraph> {
    parse_graph(&fs::read_to_string(path)?, path)
}

/// One line per item; `None` is written as `-1`.
pub fn format_labels(labels: &[Option<usize>]) -> String {
    let mut out = format!("# n={}\n", labels.len());
    for (v, c) in labels.iter().enumerate() {
        match c {
            Some(k) => out.push_str(&format!("{v}\t{k}\n")),
            None => out.push_str(&format!("{v}\t-1\n")),
        }
    }
    out
}

pub fn format_partition(p: &Partition) -> String {
    format_labels(&p.assignment().iter().map(|&c| Some(c)).collect::<Vec<_>>())
}

/// Reads per-item clusters; every item `0..n` must appear exactly once.
pub fn parse_labels(text: &str, path: &Path) -> Result<Vec<Option<usize>>> {
    let mut declared = None;
    let mut entries: Vec<(usize, Option<usize>, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if declared.is_none() {
                declared = header_field(comment, "n");
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(parse_err(path, line_no, format!("expected 'item cluster', found {} fields", fields.len())));
        }
        let v: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(path, line_no, format!("item '{}' is not a non-negative integer", fields[0])))?;
        let c: i64 = fields[1]
            .parse()
            .map_err(|_| parse_err(path, line_no, format!("cluster '{}' is not an integer", fields[1])))?;
        let c = match c {
            -1 => None,
            c if c >= 0 => Some(c as usize),
            _ => return Err(parse_err(path, line_no, "cluster must be -1 or non-negative")),
        };
        entries.push((v, c, line_no));
    }
    let n = declared.unwrap_or_else(|| entries.iter().map(|e| e.0 + 1).max().unwrap_or(0));
    let mut out = vec![None; n];
    let mut seen = vec![false; n];
    for (v, c, line_no) in entries {
        if v >= n {
            return Err(parse_err(path, line_no, format!("item {v} outside 0..{n}")));
        }
        if seen[v] {
            return Err(parse_err(path, line_no, format!("item {v} listed twice")));
        }
        seen[v] = true;
        out[v] = c;
    }
    if let Some(v) = seen.iter().position(|&s| !s) {
        return Err(parse_err(path, 0, format!("item {v} has no line")));
    }
    Ok(out)
}

pub fn read_labels(path: &Path) -> Result<Vec<Option<usize>>> {
    parse_labels(&fs::read_to_string(path)?, path)
}

/// Reads a complete partition; unassigned items are rejected.
pub fn read_partition(path: &Path) -> Result<Partition> {
    let labels = read_labels(path)?;
    let assignment = labels
        .iter()
        .enumerate()
        .map(|(v, c)| c.ok_or_else(|| parse_err(path, 0, format!("item {v} is unassigned"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Partition::from_assignment(assignment))
}

pub fn read_model(path: &Path) -> Result<ModelParams> {
    let text = fs::read_to_string(path)?;
    let source: ModelSource = serde_json::from_str(&text).map_err(|e| parse_err(path, e.line(), e.to_string()))?;
    source.build().map_err(|e| parse_err(path, 0, e.to_string()))
}

pub fn format_model(params: &ModelParams) -> Result<String> {
    Ok(serde_json::to_string_pretty(&params.to_file())? + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_round_trip() {
        let g = LabelGraph::from_edges(6, 2, [(4, 1, 2), (0, 5, 1), (2, 3, 1)]).unwrap();
        let text = format_graph(&g);
        assert!(text.starts_with("# n=6 L=2\n0\t5\t1\n"));
        assert_eq!(parse_graph(&text, Path::new("g")).unwrap(), g);
    }

    #[test]
    fn graph_errors_carry_line_numbers() {
        let err = parse_graph("# n=3 L=1\n0\t1\t1\n\n0\tx\t1\n", Path::new("g.tsv")).unwrap_err();
        assert!(err.to_string().starts_with("g.tsv:4:"), "{err}");
        assert!(parse_graph("0\t1\t1\n", Path::new("g")).is_err());
        assert!(parse_graph("# n=3 L=1\n0\t1\t2\n", Path::new("g")).is_err());
        assert!(parse_graph("# n=3 L=1\n0\t1\t1\n1\t0\t1\n", Path::new("g")).is_err());
    }

    #[test]
    fn partition_round_trip() {
        let labels = vec![Some(0), None, Some(2), Some(1)];
        let text = format_labels(&labels);
        assert_eq!(parse_labels(&text, Path::new("p")).unwrap(), labels);
        assert!(parse_labels("# n=2\n0\t1\n", Path::new("p")).is_err());
        assert!(parse_labels("0\t1\n0\t1\n", Path::new("p")).is_err());
        assert!(parse_labels("0\t-2\n", Path::new("p")).is_err());
    }

    #[test]
    fn both_model_layouts_parse() {
        let explicit = r#"{"n": 10, "K": 2, "L": 1, "alpha": [0.5, 0.5],
            "p": [[[0.5, 0.5], [0.9, 0.1]], [[0.9, 0.1], [0.5, 0.5]]]}"#;
        let scaled = r#"{"n": 10, "alpha": [0.5, 0.5], "constants": [[[5.0], [1.0]], [[1.0], [5.0]]], "scaling": "constant"}"#;
        let a: ModelSource = serde_json::from_str(explicit).unwrap();
        let b: ModelSource = serde_json::from_str(scaled).unwrap();
        assert!(matches!(a, ModelSource::Explicit(_)));
        let b = b.build().unwrap();
        assert!((b.p(0, 0, 1) - 0.5).abs() < 1e-15);
        assert!((b.p(0, 1, 1) - 0.1).abs() < 1e-15);
        assert!((a.build().unwrap().p(1, 0, 1) - b.p(1, 0, 1)).abs() < 1e-15);
    }
}

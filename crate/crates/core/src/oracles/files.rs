//! Text formats for graphs, GF(2) matrices and value tables.
//!
//! ```text
//! graph            gf2 2 3          table 2
//! a b              110              00 0
//! b c              001              10 1
//! c d                               01 1
//!                                   11 0
//! ```
//!
//! Graph lines are `u v` or `u v label`; a single token declares an isolated
//! vertex. Vertices are numbered by first appearance. Table bitstrings list
//! element 0 first. Blank lines and `#` comments are ignored everywhere.

use std::collections::HashMap;

use super::{table_oracle, Gf2Matrix, Graph};
use crate::error::{Error, Result};
use crate::ground::{GroundSet, SubsetMask};

/// Parsed input file of any of the three kinds.
#[derive(Debug)]
pub enum FunctionFile {
    Graph(Graph),
    Matrix(Gf2Matrix),
    Table(super::ConnectivityFn),
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

pub fn parse_function_file(text: &str) -> Result<FunctionFile> {
    let header = content_lines(text).next().map(|(_, l)| l).unwrap_or("");
    match header.split_whitespace().next() {
        Some("graph") => parse_graph(text).map(FunctionFile::Graph),
        Some("gf2") => parse_matrix(text).map(FunctionFile::Matrix),
        Some("table") => parse_table(text).map(FunctionFile::Table),
        _ => Err(Error::input(format!("unrecognized file header {header:?}"))),
    }
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, "graph")) => {}
        other => return Err(Error::input(format!("expected `graph` header, found {:?}", other.map(|(_, l)| l)))),
    }
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut vertex = |name: &str| -> usize {
        if let Some(&i) = index.get(name) {
            return i;
        }
        names.push(name.to_string());
        index.insert(name.to_string(), names.len() - 1);
        names.len() - 1
    };
    let mut edges = Vec::new();
    let mut labels: Vec<Option<String>> = Vec::new();
    for (lineno, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            [v] => {
                vertex(v);
            }
            [u, v] | [u, v, _] => {
                if u == v {
                    return Err(Error::input(format!("line {lineno}: self-loop at {u}")));
                }
                let (iu, iv) = (vertex(u), vertex(v));
                edges.push((iu, iv));
                labels.push(tokens.get(2).map(|s| s.to_string()));
            }
            _ => return Err(Error::input(format!("line {lineno}: expected `u v [label]`, found {line:?}"))),
        }
    }
    let vertices = GroundSet::new(names)?;
    let edge_labels = if labels.iter().all(Option::is_none) {
        GroundSet::numbered("e", edges.len())
    } else if labels.iter().all(Option::is_some) {
        GroundSet::new(labels.into_iter().flatten())?
    } else {
        return Err(Error::input("either every edge is labelled or none is"));
    };
    Graph::with_edge_labels(vertices, edges, edge_labels)
}

pub fn parse_matrix(text: &str) -> Result<Gf2Matrix> {
    let mut lines = content_lines(text);
    let (_, header) = lines.next().ok_or_else(|| Error::input("empty matrix file"))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let (r, c) = match dims.as_slice() {
        ["gf2", r, c] => (
            r.parse::<usize>().map_err(|_| Error::input(format!("bad row count {r:?}")))?,
            c.parse::<usize>().map_err(|_| Error::input(format!("bad column count {c:?}")))?,
        ),
        _ => return Err(Error::input(format!("expected `gf2 r c` header, found {header:?}"))),
    };
    let mut m = Gf2Matrix::zeros(r, c);
    let mut seen = 0;
    for (lineno, line) in lines {
        if seen == r {
            return Err(Error::input(format!("line {lineno}: more than {r} rows")));
        }
        if line.chars().count() != c {
            return Err(Error::input(format!("line {lineno}: expected {c} entries")));
        }
        for (j, ch) in line.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => m.set(seen, j, true),
                _ => return Err(Error::input(format!("line {lineno}: entry {ch:?} is not 0 or 1"))),
            }
        }
        seen += 1;
    }
    if seen != r {
        return Err(Error::input(format!("expected {r} rows, found {seen}")));
    }
    Ok(m)
}

/// Table header is `table n`, optionally followed by `n` element labels
/// (default `x0 .. x{n-1}`).
pub fn parse_table(text: &str) -> Result<super::ConnectivityFn> {
    let mut lines = content_lines(text);
    let (_, header) = lines.next().ok_or_else(|| Error::input("empty table file"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.first() != Some(&"table") || tokens.len() < 2 {
        return Err(Error::input(format!("expected `table n` header, found {header:?}")));
    }
    let n: usize = tokens[1].parse().map_err(|_| Error::input(format!("bad element count {:?}", tokens[1])))?;
    let ground = match &tokens[2..] {
        [] => GroundSet::numbered("x", n),
        labels if labels.len() == n => GroundSet::new(labels.iter().copied())?,
        _ => return Err(Error::input(format!("table header names {} labels for {n} elements", tokens.len() - 2))),
    };
    let mut table = HashMap::new();
    for (lineno, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let (bits, value) = match parts.as_slice() {
            [bits, value] => (*bits, *value),
            // The only subset of an empty ground set has an empty bitstring.
            [value] if n == 0 => ("", *value),
            _ => return Err(Error::input(format!("line {lineno}: expected `bitstring value`"))),
        };
        if bits.len() != n || !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::input(format!("line {lineno}: bitstring {bits:?} must have {n} binary digits")));
        }
        let mask = SubsetMask::from_indices(n, bits.chars().enumerate().filter(|(_, c)| *c == '1').map(|(i, _)| i));
        let value: i64 = value.parse().map_err(|_| Error::input(format!("line {lineno}: bad value {value:?}")))?;
        if table.insert(mask, value).is_some() {
            return Err(Error::input(format!("line {lineno}: duplicate entry {bits}")));
        }
    }
    table_oracle(ground, &table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::edge_cut_oracle;

    #[test]
    fn graph_file() {
        let g = parse_graph("graph\n# path\na b\nb c\n\nc d\nz\n").unwrap();
        assert_eq!(g.vertices().names(), ["a", "b", "c", "d", "z"]);
        assert_eq!(g.edges(), [(0, 1), (1, 2), (2, 3)]);
        assert_eq!(g.edge_labels().names(), ["e0", "e1", "e2"]);
        let f = edge_cut_oracle(&g);
        assert_eq!(f.eval(&f.ground().parse_subset("a,b").unwrap()), 1);
        let labelled = parse_graph("graph\na b x\nb c y\n").unwrap();
        assert_eq!(labelled.edge_labels().names(), ["x", "y"]);
    }

    #[test]
    fn graph_errors() {
        assert!(parse_graph("a b\n").is_err());
        assert!(parse_graph("graph\na a\n").is_err());
        assert!(parse_graph("graph\na b c d\n").is_err());
        assert!(parse_graph("graph\na b x\nb c\n").is_err());
    }

    #[test]
    fn matrix_file() {
        let m = parse_matrix("gf2 2 3\n110\n001\n").unwrap();
        assert_eq!(m.rank(), 2);
        assert!(m.get(0, 1) && !m.get(1, 1));
        assert!(parse_matrix("gf2 2 3\n110\n").is_err());
        assert!(parse_matrix("gf2 1 3\n1a0\n").is_err());
        assert!(parse_matrix("gf2 1 3\n10\n").is_err());
    }

    #[test]
    fn table_file() {
        let f = parse_table("table 2\n00 0\n10 -1\n01 -1\n11 0\n").unwrap();
        assert_eq!(f.eval(&SubsetMask::from_indices(2, [0])), -1);
        let err = parse_table("table 2\n00 0\n10 1\n01 1\n").unwrap_err();
        assert!(err.to_string().contains("no entry for {x0,x1}"));
        let named = parse_table("table 1 p\n0 0\n1 0\n").unwrap();
        assert_eq!(named.ground().names(), ["p"]);
    }

    #[test]
    fn dispatch() {
        assert!(matches!(parse_function_file("graph\na b\n").unwrap(), FunctionFile::Graph(_)));
        assert!(matches!(parse_function_file("gf2 1 1\n1\n").unwrap(), FunctionFile::Matrix(_)));
        assert!(matches!(parse_function_file("table 0\n0\n").unwrap(), FunctionFile::Table(_)));
        assert!(parse_function_file("nonsense").is_err());
    }
}

//! Text embedding format shared by DIVE and dense embeddings: a `<|V|> <dims>`
//! header, then one `word v1 ... vd` line per row.

use std::fmt::Write as _;
use std::path::Path;

use crate::linalg::Matrix;
use crate::math::fmt_g6;
use crate::{Error, Result};

pub fn write_embedding(path: &Path, words: &[String], vecs: &Matrix) -> Result<()> {
    assert_eq!(words.len(), vecs.rows());
    let mut out = String::with_capacity(words.len() * (vecs.cols() * 10 + 16));
    writeln!(out, "{} {}", vecs.rows(), vecs.cols()).unwrap();
    for (i, w) in words.iter().enumerate() {
        out.push_str(w);
        for &x in vecs.row(i) {
            out.push(' ');
            out.push_str(&fmt_g6(x));
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_embedding(path: &Path) -> Result<(Vec<String>, Matrix)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::schema(path, 1, "missing `<|V|> <dims>` header"))?;
    let (v, d) = header
        .split_once(' ')
        .and_then(|(a, b)| Some((a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)))
        .ok_or_else(|| Error::schema(path, 1, "expected `<|V|> <dims>`"))?;
    let mut words = Vec::with_capacity(v);
    let mut data = Vec::with_capacity(v * d);
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        if words.len() == v {
            return Err(Error::schema(path, lineno, format!("more than {v} rows")));
        }
        let mut parts = line.split(' ');
        let word = parts.next().filter(|w| !w.is_empty()).ok_or_else(|| {
            Error::schema(path, lineno, "missing word")
        })?;
        let before = data.len();
        for p in parts {
            let x: f64 = p
                .parse()
                .map_err(|_| Error::schema(path, lineno, format!("bad number `{p}`")))?;
            data.push(x);
        }
        if data.len() - before != d {
            return Err(Error::schema(
                path,
                lineno,
                format!("expected {d} values, found {}", data.len() - before),
            ));
        }
        words.push(word.to_string());
    }
    if words.len() != v {
        return Err(Error::schema(
            path,
            words.len() + 2,
            format!("expected {v} rows, found {}", words.len()),
        ));
    }
    Ok((words, Matrix::from_vec(v, d, data)))
}

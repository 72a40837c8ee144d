//! Graph files.
//!
//! Text: one `u v` edge per line, 0-indexed. Lines starting with `#` are
//! comments, except `# n <count>`, which fixes the vertex count (otherwise
//! it is one more than the largest id).
//!
//! Binary (little-endian): magic `PCSR`, `n u64`, `m u64`, then `n + 1`
//! offsets and `2m` neighbor ids, all `u64`.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use super::{Graph, GraphError};

pub const GRAPH_MAGIC: &[u8; 4] = b"PCSR";

#[derive(Debug, Error)]
pub enum GraphFormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("bad magic {0:?}")]
    BadMagic([u8; 4]),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub fn write_edge_list<W: Write>(mut w: W, g: &Graph) -> Result<(), GraphFormatError> {
    writeln!(w, "# n {}", g.n())?;
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_edge_list<R: BufRead>(r: R) -> Result<Graph, GraphFormatError> {
    let mut declared = None;
    let mut edges = Vec::new();
    let mut max_id: Option<u32> = None;
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        let parse_err = |msg: String| GraphFormatError::Parse { line: i + 1, msg };
        if let Some(c) = t.strip_prefix('#') {
            let mut words = c.split_whitespace();
            if words.next() == Some("n") {
                let n = words
                    .next()
                    .and_then(|w| w.parse::<usize>().ok())
                    .ok_or_else(|| parse_err("expected `# n <count>`".into()))?;
                declared = Some(n);
            }
            continue;
        }
        if t.is_empty() {
            continue;
        }
        let mut it = t.split_whitespace().map(|w| w.parse::<u32>());
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(u)), Some(Ok(v)), None) => {
                max_id = max_id.max(Some(u.max(v)));
                edges.push((u, v));
            }
            _ => return Err(parse_err(format!("expected `u v`, got {t:?}"))),
        }
    }
    let n = declared.unwrap_or(max_id.map_or(0, |m| m as usize + 1));
    Ok(Graph::from_edges(n, &edges)?)
}

pub fn write_csr<W: Write>(mut w: W, g: &Graph) -> Result<(), GraphFormatError> {
    w.write_all(GRAPH_MAGIC)?;
    w.write_all(&(g.n() as u64).to_le_bytes())?;
    w.write_all(&(g.m() as u64).to_le_bytes())?;
    for &o in g.offsets() {
        w.write_all(&(o as u64).to_le_bytes())?;
    }
    for &v in g.neighbor_array() {
        w.write_all(&(v as u64).to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

pub fn read_csr<R: Read>(mut r: R) -> Result<Graph, GraphFormatError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != GRAPH_MAGIC {
        return Err(GraphFormatError::BadMagic(magic));
    }
    let n = read_u64(&mut r)?;
    let m = read_u64(&mut r)?;
    if n > u32::MAX as u64 {
        return Err(GraphError::Malformed(format!("{n} vertices exceed 32-bit ids")).into());
    }
    let mut offsets = Vec::with_capacity(n as usize + 1);
    for _ in 0..=n {
        offsets.push(read_u64(&mut r)? as usize);
    }
    let mut neighbors = Vec::with_capacity((2 * m).min(1 << 26) as usize);
    for _ in 0..2 * m {
        let v = read_u64(&mut r)?;
        if v >= n {
            return Err(GraphError::VertexOutOfRange { vertex: v, n: n as usize }.into());
        }
        neighbors.push(v as u32);
    }
    Ok(Graph::from_csr(offsets, neighbors)?)
}

fn is_binary(path: &Path) -> bool {
    matches!(path.extension().and_then(|e| e.to_str()), Some("pcsr" | "bin"))
}

/// Saves as binary for `.pcsr`/`.bin` paths, as an edge list otherwise.
pub fn save_graph(path: &Path, g: &Graph) -> Result<(), GraphFormatError> {
    let w = BufWriter::new(File::create(path)?);
    if is_binary(path) {
        write_csr(w, g)
    } else {
        write_edge_list(w, g)
    }
}

/// Loads either format, detected from the magic bytes.
pub fn load_graph(path: &Path) -> Result<Graph, GraphFormatError> {
    let mut r = BufReader::new(File::open(path)?);
    if r.fill_buf()?.starts_with(GRAPH_MAGIC) {
        read_csr(r)
    } else {
        read_edge_list(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};

    #[test]
    fn edge_list_round_trip() {
        let g = generate(GraphKind::Gnm, 100, 300, 2).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&mut buf, &g).unwrap();
        assert_eq!(read_edge_list(&buf[..]).unwrap(), g);
    }

    #[test]
    fn edge_list_parsing() {
        let g = read_edge_list("# comment\n0 1\n\n2 1\n".as_bytes()).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 2);
        let padded = read_edge_list("# n 10\n0 1\n".as_bytes()).unwrap();
        assert_eq!(padded.n(), 10);
        assert!(matches!(read_edge_list("0 x\n".as_bytes()), Err(GraphFormatError::Parse { line: 1, .. })));
        assert!(matches!(read_edge_list("1 1\n".as_bytes()), Err(GraphFormatError::Graph(_))));
    }

    #[test]
    fn csr_round_trip_and_rejects() {
        let g = generate(GraphKind::PowerLaw, 200, 600, 4).unwrap();
        let mut buf = Vec::new();
        write_csr(&mut buf, &g).unwrap();
        assert_eq!(buf.len(), 4 + 16 + 8 * (g.n() + 1 + 2 * g.m()));
        assert_eq!(read_csr(&buf[..]).unwrap(), g);
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_csr(&bad[..]), Err(GraphFormatError::BadMagic(_))));
        assert!(read_csr(&buf[..buf.len() - 1]).is_err());
    }

    #[test]
    fn files_by_extension() {
        let dir = tempfile::tempdir().unwrap();
        let g = generate(GraphKind::Path, 6, 0, 0).unwrap();
        for name in ["g.txt", "g.pcsr"] {
            let p = dir.path().join(name);
            save_graph(&p, &g).unwrap();
            assert_eq!(load_graph(&p).unwrap(), g);
        }
    }
}

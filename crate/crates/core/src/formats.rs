//! On-disk formats.
//!
//! - Trace (`.vtrc`): magic `VTRC`, version `u16`, reserved `u16`, `dt` as
//!   `f64`, then the samples as `f64`; everything little-endian.
//! - Symbol stream: raw bytes for `n = 8`, otherwise an MSB-first packed
//!   bitstream; a JSON sidecar `<file>.json` records `n` and the count.
//! - Restart matrix: same packing, row-major, with a sidecar holding the
//!   dimensions.
//! - Graphs and webs: edge-list CSV preceded by a `# {json}` header line.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::apps::{Graph, Web};
use crate::device::{TraceMeta, VoltageTrace};
use crate::extraction::SymbolStream;
use crate::sp90b::RestartMatrix;
use crate::{Error, Result};

pub const TRACE_MAGIC: &[u8; 4] = b"VTRC";
pub const TRACE_VERSION: u16 = 1;
const TRACE_HEADER: usize = 16;

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Pretty JSON with a trailing newline.
pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_file(path, &to_json_bytes(value)?)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = read_file(path)?;
    serde_json::from_slice(&bytes).map_err(|e| Error::format(path, e.to_string()))
}

/// Path of the JSON sidecar belonging to a binary file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn encode_trace(trace: &VoltageTrace) -> Vec<u8> {
    let mut out = Vec::with_capacity(TRACE_HEADER + 8 * trace.samples.len());
    out.extend_from_slice(TRACE_MAGIC);
    out.extend_from_slice(&TRACE_VERSION.to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());
    out.extend_from_slice(&trace.dt.to_le_bytes());
    for v in &trace.samples {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Decodes a trace; `origin` is recorded as the import note.
pub fn decode_trace(bytes: &[u8], origin: &Path) -> Result<VoltageTrace> {
    if bytes.len() < TRACE_HEADER || &bytes[..4] != TRACE_MAGIC {
        return Err(Error::format(origin, "missing VTRC header"));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != TRACE_VERSION {
        return Err(Error::format(
            origin,
            format!("unsupported trace version {version}"),
        ));
    }
    let body = &bytes[TRACE_HEADER..];
    if body.len() % 8 != 0 {
        return Err(Error::format(
            origin,
            "sample block is not a whole number of f64 values",
        ));
    }
    let dt = f64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    let samples = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    VoltageTrace::new(
        samples,
        dt,
        TraceMeta::Imported(origin.display().to_string()),
    )
    .map_err(|e| Error::format(origin, e.to_string()))
}

pub fn write_trace(path: &Path, trace: &VoltageTrace) -> Result<()> {
    write_file(path, &encode_trace(trace))
}

pub fn read_trace(path: &Path) -> Result<VoltageTrace> {
    decode_trace(&read_file(path)?, path)
}

/// Symbols as bytes (`n = 8`) or an MSB-first packed bitstream.
pub fn pack_symbols(n: u8, symbols: &[u16]) -> Vec<u8> {
    if n == 8 {
        return symbols.iter().map(|&s| s as u8).collect();
    }
    let n = u32::from(n);
    let total = symbols.len() * n as usize;
    let mut out = vec![0u8; total.div_ceil(8)];
    let mut pos = 0usize;
    for &s in symbols {
        for shift in (0..n).rev() {
            if (s >> shift) & 1 == 1 {
                out[pos / 8] |= 0x80 >> (pos % 8);
            }
            pos += 1;
        }
    }
    out
}

/// Inverse of [`pack_symbols`]; `count` symbols are read.
pub fn unpack_symbols(n: u8, bytes: &[u8], count: usize) -> Result<Vec<u16>> {
    crate::extraction::check_width(n)?;
    if n == 8 {
        if bytes.len() < count {
            return Err(Error::param(format!(
                "{} bytes hold fewer than {count} symbols",
                bytes.len()
            )));
        }
        return Ok(bytes[..count].iter().map(|&b| u16::from(b)).collect());
    }
    let n = n as usize;
    if bytes.len() * 8 < count * n {
        return Err(Error::param(format!(
            "{} bytes hold fewer than {count} {n}-bit symbols",
            bytes.len()
        )));
    }
    let mut out = Vec::with_capacity(count);
    let mut pos = 0usize;
    for _ in 0..count {
        let mut v = 0u16;
        for _ in 0..n {
            v = (v << 1) | u16::from((bytes[pos / 8] >> (7 - pos % 8)) & 1);
            pos += 1;
        }
        out.push(v);
    }
    Ok(out)
}

/// Sidecar of a symbol stream file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamSidecar {
    pub n: u8,
    pub count: u64,
    #[serde(default)]
    pub dropped_blocks: u64,
    #[serde(default)]
    pub empty_blocks: u64,
}

pub fn write_stream(path: &Path, stream: &SymbolStream) -> Result<()> {
    write_file(path, &pack_symbols(stream.n, &stream.symbols))?;
    write_json(
        &sidecar_path(path),
        &StreamSidecar {
            n: stream.n,
            count: stream.symbols.len() as u64,
            dropped_blocks: stream.dropped_blocks,
            empty_blocks: stream.empty_blocks,
        },
    )
}

/// Reads a stream; without a sidecar the file is taken as raw 8-bit symbols.
pub fn read_stream(path: &Path) -> Result<SymbolStream> {
    let bytes = read_file(path)?;
    let side = sidecar_path(path);
    let meta = if side.exists() {
        read_json::<StreamSidecar>(&side)?
    } else {
        StreamSidecar {
            n: 8,
            count: bytes.len() as u64,
            dropped_blocks: 0,
            empty_blocks: 0,
        }
    };
    let symbols = unpack_symbols(meta.n, &bytes, meta.count as usize)
        .map_err(|e| Error::format(path, e.to_string()))?;
    let mut stream =
        SymbolStream::new(meta.n, symbols).map_err(|e| Error::format(path, e.to_string()))?;
    stream.dropped_blocks = meta.dropped_blocks;
    stream.empty_blocks = meta.empty_blocks;
    Ok(stream)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartSidecar {
    pub rows: usize,
    pub cols: usize,
    pub n: u8,
}

pub fn write_restart(path: &Path, matrix: &RestartMatrix) -> Result<()> {
    write_file(path, &pack_symbols(matrix.n, &matrix.data))?;
    write_json(
        &sidecar_path(path),
        &RestartSidecar {
            rows: matrix.rows,
            cols: matrix.cols,
            n: matrix.n,
        },
    )
}

pub fn read_restart(path: &Path) -> Result<RestartMatrix> {
    let bytes = read_file(path)?;
    let meta: RestartSidecar = read_json(&sidecar_path(path))?;
    let data = unpack_symbols(meta.n, &bytes, meta.rows * meta.cols)
        .map_err(|e| Error::format(path, e.to_string()))?;
    RestartMatrix::new(meta.rows, meta.cols, meta.n, data)
        .map_err(|e| Error::format(path, e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct EdgeListHeader {
    kind: String,
    nodes: usize,
    edges: usize,
}

fn edge_list_csv(kind: &str, nodes: usize, edges: &[(usize, usize)]) -> Result<Vec<u8>> {
    let header = EdgeListHeader {
        kind: kind.into(),
        nodes,
        edges: edges.len(),
    };
    let mut out = format!("# {}\n", serde_json::to_string(&header)?).into_bytes();
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record(["from", "to"]).map_err(csv_err)?;
    for &(a, b) in edges {
        w.serialize((a, b)).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Validation(e.to_string()))?;
    drop(w);
    Ok(out)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Validation(e.to_string())
}

fn parse_edge_list(path: &Path, kind: &str) -> Result<(usize, Vec<(usize, usize)>)> {
    let bytes = read_file(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::format(path, e.to_string()))?;
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    let header: EdgeListHeader = first
        .strip_prefix("# ")
        .ok_or_else(|| Error::format(path, "missing '# {json}' header line"))
        .and_then(|j| serde_json::from_str(j).map_err(|e| Error::format(path, e.to_string())))?;
    if header.kind != kind {
        return Err(Error::format(
            path,
            format!("expected a {kind}, found a {}", header.kind),
        ));
    }
    let mut reader = csv::Reader::from_reader(rest.as_bytes());
    let mut edges = Vec::with_capacity(header.edges);
    for row in reader.deserialize::<(usize, usize)>() {
        edges.push(row.map_err(|e| Error::format(path, e.to_string()))?);
    }
    if edges.len() != header.edges {
        return Err(Error::format(
            path,
            format!(
                "header declares {} edges, found {}",
                header.edges,
                edges.len()
            ),
        ));
    }
    Ok((header.nodes, edges))
}

pub fn write_graph(path: &Path, graph: &Graph) -> Result<()> {
    write_file(path, &edge_list_csv("graph", graph.nodes, &graph.edges)?)
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    let (nodes, edges) = parse_edge_list(path, "graph")?;
    Graph::new(nodes, edges)
}

pub fn write_web(path: &Path, web: &Web) -> Result<()> {
    write_file(path, &edge_list_csv("web", web.nodes, &web.edges)?)
}

pub fn read_web(path: &Path) -> Result<Web> {
    let (nodes, edges) = parse_edge_list(path, "web")?;
    Web::new(nodes, edges)
}

/// CSV text from a header and rows of pre-formatted cells.
pub fn csv_bytes<I, R, S>(header: &[&str], rows: I) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    let mut out = Vec::new();
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Validation(e.to_string()))?;
    drop(w);
    Ok(out)
}

pub fn write_csv<I, R, S>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    write_file(path, &csv_bytes(header, rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trace_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.vtrc");
        let t = VoltageTrace::new(vec![0.0, -1e-3, 2.5], 8e-8, TraceMeta::Imported("x".into()))
            .unwrap();
        write_trace(&p, &t).unwrap();
        let bytes = fs::read(&p).unwrap();
        assert_eq!(&bytes[..4], b"VTRC");
        assert_eq!(bytes.len(), 16 + 24);
        let back = read_trace(&p).unwrap();
        assert_eq!(back.samples, t.samples);
        assert_eq!(back.dt, t.dt);
    }

    #[test]
    fn bad_magic_is_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.vtrc");
        fs::write(&p, b"NOPE0000000000000000").unwrap();
        assert!(matches!(read_trace(&p), Err(Error::Format { .. })));
    }

    #[test]
    fn missing_file_names_path() {
        let err = read_trace(Path::new("/nonexistent/trace.vtrc")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/trace.vtrc"));
    }

    #[test]
    fn bytes_for_eight_bit_streams() {
        assert_eq!(pack_symbols(8, &[0, 17, 255]), vec![0, 17, 255]);
        assert_eq!(pack_symbols(3, &[5, 2]), vec![0b1010_1000]);
    }

    #[test]
    fn stream_and_restart_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.bin");
        let mut s = SymbolStream::new(5, vec![1, 31, 0, 17]).unwrap();
        s.dropped_blocks = 3;
        write_stream(&p, &s).unwrap();
        assert_eq!(read_stream(&p).unwrap(), s);

        let m = RestartMatrix::new(2, 3, 4, vec![1, 2, 3, 4, 5, 15]).unwrap();
        let q = dir.path().join("r.bin");
        write_restart(&q, &m).unwrap();
        assert_eq!(read_restart(&q).unwrap(), m);
    }

    #[test]
    fn sidecarless_stream_is_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("raw.bin");
        fs::write(&p, [9u8, 200]).unwrap();
        let s = read_stream(&p).unwrap();
        assert_eq!((s.n, s.symbols), (8, vec![9, 200]));
    }

    #[test]
    fn edge_lists_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = Graph::new(3, vec![(0, 1), (1, 2), (0, 1)]).unwrap();
        let p = dir.path().join("g.csv");
        write_graph(&p, &g).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("# {\"kind\":\"graph\",\"nodes\":3,\"edges\":3}\nfrom,to\n0,1\n"));
        assert_eq!(read_graph(&p).unwrap(), g);
        assert!(read_web(&p).is_err());

        let w = Web::new(2, vec![(0, 1), (1, 0)]).unwrap();
        let q = dir.path().join("w.csv");
        write_web(&q, &w).unwrap();
        assert_eq!(read_web(&q).unwrap(), w);
    }

    proptest! {
        #[test]
        fn pack_round_trip(n in 1u8..=16, raw in proptest::collection::vec(any::<u16>(), 0..64)) {
            let mask = if n == 16 { u16::MAX } else { (1u16 << n) - 1 };
            let symbols: Vec<u16> = raw.iter().map(|v| v & mask).collect();
            let bytes = pack_symbols(n, &symbols);
            prop_assert_eq!(unpack_symbols(n, &bytes, symbols.len()).unwrap(), symbols);
        }
    }
}

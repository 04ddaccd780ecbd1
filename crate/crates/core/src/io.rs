//! File formats: grid binaries, PGM, coefficient and trace CSVs, JSON.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::approx::RateTable;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::hybrid::{CoefficientVector, HybridFrame, HybridIndex};
use crate::solver::SolveTrace;
use crate::wavelet::WaveletSystem;

/// 8-byte header (n as u32 LE, 4 reserved zero bytes), then n² little-endian
/// f64 in row-major order.
pub fn encode_grid(f: &GridFunction) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 8 * f.values().len());
    out.extend_from_slice(&(f.n() as u32).to_le_bytes());
    out.extend_from_slice(&[0; 4]);
    for v in f.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_grid(bytes: &[u8]) -> Result<GridFunction> {
    if bytes.len() < 8 {
        return Err(Error::Format(format!("grid file has {} bytes, header needs 8", bytes.len())));
    }
    let n = u32::from_le_bytes(bytes[..4].try_into().unwrap()) as usize;
    let body = &bytes[8..];
    if n.checked_mul(n).and_then(|m| m.checked_mul(8)) != Some(body.len()) {
        return Err(Error::Format(format!("header says n = {n} but body has {} bytes", body.len())));
    }
    let values = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    GridFunction::new(n, values)
}

pub fn write_grid(path: &Path, f: &GridFunction) -> Result<()> {
    Ok(fs::write(path, encode_grid(f))?)
}

pub fn read_grid(path: &Path) -> Result<GridFunction> {
    decode_grid(&fs::read(path)?)
}

/// Binary PGM (P5). Values are mapped affinely from [min, max] onto 0..=255;
/// a constant image maps to 128. Row r of the image is x₂ = 1 − (r+½)/n, so
/// the picture has the usual orientation.
pub fn encode_pgm(f: &GridFunction) -> Vec<u8> {
    let n = f.n();
    let (lo, hi) = f.values().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let mut out = format!("P5\n{n} {n}\n255\n").into_bytes();
    for r in 0..n {
        let k = n - 1 - r;
        for i in 0..n {
            let v = f.get(i, k);
            let g = if hi > lo { ((v - lo) / (hi - lo) * 255.0).round() as u8 } else { 128 };
            out.push(g);
        }
    }
    out
}

pub fn write_pgm(path: &Path, f: &GridFunction) -> Result<()> {
    Ok(fs::write(path, encode_pgm(f))?)
}

/// Reads a P5 file written by [`encode_pgm`] back as grey levels in [0, 1].
pub fn decode_pgm(bytes: &[u8]) -> Result<GridFunction> {
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format("truncated PGM header".into()));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    pos += 1;
    let parse = |s: &str| s.parse::<usize>().map_err(|_| Error::Format(format!("bad PGM field {s:?}")));
    if fields[0] != "P5" || parse(&fields[3])? != 255 {
        return Err(Error::Format("only 8-bit P5 images are supported".into()));
    }
    let (w, h) = (parse(&fields[1])?, parse(&fields[2])?);
    if w != h || bytes.len() < pos + w * h {
        return Err(Error::Format("PGM must be square with a complete body".into()));
    }
    let n = w;
    let mut v = vec![0.0; n * n];
    for r in 0..n {
        for i in 0..n {
            v[i * n + (n - 1 - r)] = bytes[pos + r * n + i] as f64 / 255.0;
        }
    }
    GridFunction::new(n, v)
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

/// `j,m1,m2,v,value` for every coefficient of the full wavelet system.
pub fn wavelet_csv(sys: &WaveletSystem, c: &[f64]) -> Result<String> {
    if c.len() != sys.len() {
        return Err(Error::SizeMismatch { expected: sys.len(), found: c.len() });
    }
    let mut s = String::from("j,m1,m2,v,value\n");
    for (pos, v) in c.iter().enumerate() {
        let w = sys.index(pos);
        writeln!(s, "{},{},{},{},{}", w.j, w.m1, w.m2, w.v, num(*v)).unwrap();
    }
    Ok(s)
}

/// `j,k,iota,m1,m2,value` for one shearlet plane (all translates).
pub fn shearlet_plane_csv(j: u32, k: i32, iota: i8, plane: &GridFunction) -> String {
    let n = plane.n();
    let mut s = String::from("j,k,iota,m1,m2,value\n");
    for m1 in 0..n {
        for m2 in 0..n {
            writeln!(s, "{j},{k},{iota},{m1},{m2},{}", num(plane.get(m1, m2))).unwrap();
        }
    }
    s
}

/// `kind,j,k_or_v,iota,m1,m2,weight,value` for the non-zero entries; `kind` is
/// `W` (k_or_v holds υ, iota empty) or `S`.
pub fn coefficient_csv(frame: &HybridFrame, c: &CoefficientVector) -> Result<String> {
    let mut s = String::from("kind,j,k_or_v,iota,m1,m2,weight,value\n");
    for (slot, v) in c.iter() {
        let w = frame.weight_of(slot);
        match frame.index(slot)? {
            HybridIndex::Wavelet(i) => writeln!(s, "W,{},{},,{},{},{},{}", i.j, i.v, i.m1, i.m2, num(w), num(v)),
            HybridIndex::Shearlet { index: i, .. } => {
                writeln!(s, "S,{},{},{},{},{},{},{}", i.j, i.k, i.iota, i.m1, i.m2, num(w), num(v))
            }
        }
        .unwrap();
    }
    Ok(s)
}

/// `iteration,residual,active_count,h1_error,seconds`. With `timing = false`
/// the seconds column is written as 0 so that files are reproducible.
pub fn trace_csv(trace: &SolveTrace, timing: bool) -> String {
    let mut s = String::from("iteration,residual,active_count,h1_error,seconds\n");
    for r in &trace.records {
        let e = r.h1_error.map(num).unwrap_or_default();
        let t = if timing { r.seconds } else { 0.0 };
        writeln!(s, "{},{},{},{},{}", r.iteration, num(r.residual), r.active_count, e, t).unwrap();
    }
    s
}

/// `N,err2_h1,err_h1,threshold,cg_iters`
pub fn rate_table_csv(t: &RateTable) -> String {
    let mut s = String::from("N,err2_h1,err_h1,threshold,cg_iters\n");
    for r in &t.rows {
        writeln!(s, "{},{},{},{},{}", r.n, num(r.err2_h1), num(r.err_h1), num(r.threshold), r.cg_iters).unwrap();
    }
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_text(path, &s)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

//! Binary wavefunction snapshots.
//!
//! Layout (little-endian throughout):
//!   magic "NLSF" | version u32 | dim u32
//!   per axis: J u64, a f64, b f64
//!   t f64
//!   then J1*...*Jd interleaved (re, im) f64 pairs, row-major with the
//!   last axis contiguous.
//!
//! A sidecar `<name>.meta` text file carries what the binary header cannot:
//! boundary kinds per axis, the scheme tag, and the config hash, so a
//! snapshot can be re-ingested without the original config.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64 as Cplx;

use crate::model::{BoundaryKind, Grid, WaveField};
use crate::{NlseError, Result};

pub const MAGIC: &[u8; 4] = b"NLSF";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct SnapshotMeta {
    pub scheme: String,
    pub config_hash: u64,
    pub bcs: Vec<BoundaryKind>,
}

fn bc_name(bc: BoundaryKind) -> &'static str {
    match bc {
        BoundaryKind::Dirichlet => "dirichlet",
        BoundaryKind::Neumann => "neumann",
        BoundaryKind::Periodic => "periodic",
    }
}

pub fn write_snapshot(path: &Path, field: &WaveField, meta: &SnapshotMeta) -> Result<()> {
    let mut buf: Vec<u8> = Vec::with_capacity(32 + 16 * field.values.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    let axes = field.grid.axes();
    buf.extend_from_slice(&(axes.len() as u32).to_le_bytes());
    for ax in axes {
        buf.extend_from_slice(&(ax.j as u64).to_le_bytes());
        buf.extend_from_slice(&ax.a.to_le_bytes());
        buf.extend_from_slice(&ax.b.to_le_bytes());
    }
    buf.extend_from_slice(&field.t.to_le_bytes());
    for z in &field.values {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(&buf)?;

    let meta_path = path.with_extension("meta");
    let mut m = String::new();
    m.push_str(&format!("scheme = {}\n", meta.scheme));
    m.push_str(&format!("config_hash = {:016x}\n", meta.config_hash));
    for (i, bc) in meta.bcs.iter().enumerate() {
        m.push_str(&format!("bc{} = {}\n", i + 1, bc_name(*bc)));
    }
    std::fs::write(meta_path, m)?;
    Ok(())
}

fn bad(msg: impl Into<String>) -> NlseError {
    NlseError::Other(format!("snapshot: {}", msg.into()))
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.data.len() {
            return Err(bad("truncated file"));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Reads a snapshot back into a field. Boundary kinds are taken from the
/// sidecar meta file when present, otherwise from `fallback_bc`.
pub fn read_snapshot(path: &Path, fallback_bc: BoundaryKind) -> Result<WaveField> {
    let mut raw = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut raw)?;
    let mut c = Cursor { data: &raw, pos: 0 };
    if c.take(4)? != MAGIC {
        return Err(bad(format!("{}: bad magic", path.display())));
    }
    let version = c.u32()?;
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let dim = c.u32()? as usize;
    if !(1..=2).contains(&dim) {
        return Err(bad(format!("unsupported dimension {dim}")));
    }

    let mut bcs = vec![fallback_bc; dim];
    let meta_path = path.with_extension("meta");
    if let Ok(meta) = std::fs::read_to_string(&meta_path) {
        for line in meta.lines() {
            if let Some((k, v)) = line.split_once('=') {
                let (k, v) = (k.trim(), v.trim());
                for i in 0..dim {
                    if k == format!("bc{}", i + 1) {
                        bcs[i] = BoundaryKind::parse(v)?;
                    }
                }
            }
        }
    }

    let mut spans = Vec::with_capacity(dim);
    for i in 0..dim {
        let j = c.u64()? as usize;
        let a = c.f64()?;
        let b = c.f64()?;
        spans.push((a, b, j, bcs[i]));
    }
    let t = c.f64()?;

    let grid = match dim {
        1 => {
            let (a, b, j, bc) = spans[0];
            Grid::build_1d(a, b, j, bc)?
        }
        _ => Grid::build_2d(spans[0], spans[1])?,
    };
    let grid = Arc::new(grid);
    let n: usize = grid.axes().iter().map(|ax| ax.num_nodes()).product();
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let re = c.f64()?;
        let im = c.f64()?;
        values.push(Cplx::new(re, im));
    }
    if c.pos != raw.len() {
        return Err(bad("trailing bytes after payload"));
    }
    WaveField::new(grid, values, t)
}

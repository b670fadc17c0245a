//! Binary checkpoint container for an in-progress [`TcmpsRun`].
//!
//! Layout, all integers `u64` little-endian and all reals `f64` little-endian:
//!
//! ```text
//! magic "TCMPSCK1" | config sha-256 (32 bytes)
//! next_step | cumulative_discarded | max_step_discarded | center | n_sites
//! n_sites × (χ_left, d, χ_right)
//! tensor data, site by site, row-major, (re, im) pairs
//! n_samples | times | f1 | f2
//! n_columns | per column: name length, UTF-8 name, values (n_samples)
//! ```

use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array3;
use sha2::{Digest, Sha256};

use super::lattice::ContinuumModelParams;
use super::state::MpsState;
use super::tebd::{EvolveConfig, TcmpsRun};
use crate::bath::ChainBath;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::result::{RunResult, TraceColumn};

const MAGIC: &[u8; 8] = b"TCMPSCK1";

pub fn config_hash(
    params: &ContinuumModelParams,
    chain: &ChainBath,
    cfg: &EvolveConfig,
) -> Result<[u8; 32]> {
    let json = serde_json::to_string(&(params, chain, cfg))?;
    Ok(Sha256::digest(json.as_bytes()).into())
}

struct Writer(Vec<u8>);

impl Writer {
    fn u64(&mut self, x: u64) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }
    fn f64(&mut self, x: f64) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }
    fn f64s(&mut self, xs: &[f64]) {
        xs.iter().for_each(|&x| self.f64(x));
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::Checkpoint("unexpected end of data".into()));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::Checkpoint("size overflow".into()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|_| self.f64()).collect()
    }
}

impl TcmpsRun {
    pub fn checkpoint_bytes(&self) -> Vec<u8> {
        let mut w = Writer(Vec::new());
        w.0.extend_from_slice(MAGIC);
        w.0.extend_from_slice(&self.config_hash);
        w.u64(self.next_step as u64);
        w.f64(self.state.cumulative_discarded);
        w.f64(self.max_step_discarded);
        w.u64(self.state.center() as u64);
        let tensors = self.state.tensors();
        w.u64(tensors.len() as u64);
        for t in tensors {
            let (l, d, r) = t.dim();
            [l, d, r].iter().for_each(|&x| w.u64(x as u64));
        }
        for t in tensors {
            for z in t.as_standard_layout().iter() {
                w.f64(z.re);
                w.f64(z.im);
            }
        }
        let res = &self.result;
        w.u64(res.times.len() as u64);
        w.f64s(&res.times);
        w.f64s(&res.f1);
        w.f64s(&res.f2);
        w.u64(res.columns.len() as u64);
        for c in &res.columns {
            w.u64(c.name.len() as u64);
            w.0.extend_from_slice(c.name.as_bytes());
            w.f64s(&c.values);
        }
        w.0
    }

    pub fn save_checkpoint(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let tmp = path.with_extension("tmp");
        std::fs::File::create(&tmp)?.write_all(&self.checkpoint_bytes())?;
        std::fs::rename(tmp, path)?;
        Ok(())
    }

    /// Rebuild a run from checkpoint bytes. The configuration must hash to the
    /// value stored in the checkpoint.
    pub fn resume_from_bytes(
        bytes: &[u8],
        params: &ContinuumModelParams,
        chain: &ChainBath,
        cfg: &EvolveConfig,
    ) -> Result<Self> {
        let mut run = TcmpsRun::new(params, chain, cfg)?;
        let mut r = Reader { buf: bytes, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err(Error::Checkpoint("bad magic".into()));
        }
        if r.take(32)? != run.config_hash {
            return Err(Error::Checkpoint("configuration hash mismatch".into()));
        }
        let next_step = r.usize()?;
        let cumulative = r.f64()?;
        let max_step = r.f64()?;
        let center = r.usize()?;
        let n_sites = r.usize()?;
        if n_sites != run.lattice().len() {
            return Err(Error::Checkpoint("site count mismatch".into()));
        }
        let shapes: Vec<(usize, usize, usize)> = (0..n_sites)
            .map(|_| Ok((r.usize()?, r.usize()?, r.usize()?)))
            .collect::<Result<_>>()?;
        let mut tensors = Vec::with_capacity(n_sites);
        for &(l, d, rr) in &shapes {
            let data = r.f64s(2 * l * d * rr)?;
            let values: Vec<C64> = data.chunks(2).map(|p| C64::new(p[0], p[1])).collect();
            tensors.push(
                Array3::from_shape_vec((l, d, rr), values)
                    .map_err(|e| Error::Checkpoint(e.to_string()))?,
            );
        }
        let mut state = MpsState::from_tensors(tensors, center)?;
        state.cumulative_discarded = cumulative;
        let n = r.usize()?;
        let mut result = RunResult::new();
        result.times = r.f64s(n)?;
        result.f1 = r.f64s(n)?;
        result.f2 = r.f64s(n)?;
        let n_cols = r.usize()?;
        for _ in 0..n_cols {
            let len = r.usize()?;
            let name = String::from_utf8(r.take(len)?.to_vec())
                .map_err(|e| Error::Checkpoint(e.to_string()))?;
            result.columns.push(TraceColumn {
                name,
                values: r.f64s(n)?,
            });
        }
        if r.pos != bytes.len() {
            return Err(Error::Checkpoint("trailing bytes".into()));
        }
        run.state = state;
        run.next_step = next_step;
        run.max_step_discarded = max_step;
        run.result = result;
        Ok(run)
    }

    pub fn resume(
        path: impl AsRef<Path>,
        params: &ContinuumModelParams,
        chain: &ChainBath,
        cfg: &EvolveConfig,
    ) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        Self::resume_from_bytes(&bytes, params, chain, cfg)
    }
}

//! Empirical FER of TSCF as a function of the threshold Ω.
//!
//! All grid points decode the same frames. The initial SC pass is shared, and
//! the outcome of retrying a given critical index is computed at most once per
//! frame: TSCF plans for different Ω are filtered prefixes of the same
//! index-ordered candidate list, so they reuse each other's retries.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::PolarCode;
use crate::error::{Error, Result};
use crate::flip::{build_critical_set, CriticalSet, Threshold};
use crate::sc::ScDecoder;
use crate::sim::{ChannelConfig, Frame, StopRule, BATCH};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub omega: f64,
    pub fer: f64,
    pub frames: u64,
    pub errors: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaSweep {
    pub ebn0_db: f64,
    pub t_max: usize,
    pub rows: Vec<SweepRow>,
}

impl OmegaSweep {
    /// Row with the lowest FER; the smallest Ω among ties.
    pub fn best(&self) -> &SweepRow {
        self.rows
            .iter()
            .min_by(|a, b| a.fer.total_cmp(&b.fer).then(a.omega.total_cmp(&b.omega)))
            .expect("sweeps have at least one row")
    }

    /// Grid values whose FER is within 10% of the best.
    pub fn band(&self) -> Vec<f64> {
        let limit = 1.1 * self.best().fer;
        self.rows.iter().filter(|r| r.fer <= limit).map(|r| r.omega).collect()
    }

    /// Columns `omega, fer, frames, errors`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        w.write_record(["omega", "fer", "frames", "errors"])?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Per-frame state: the SC decoder and memoized retries.
struct Worker {
    sc: ScDecoder,
    /// `(leaf, crc passes, payload correct)` of each retry done on this frame.
    memo: Vec<(usize, bool, bool)>,
    candidates: Vec<(usize, f64)>,
    errors: Vec<u64>,
}

impl Worker {
    fn new(code: &PolarCode, points: usize) -> Self {
        Self {
            sc: ScDecoder::new(code),
            memo: Vec::new(),
            candidates: Vec::new(),
            errors: vec![0; points],
        }
    }

    fn frame(&mut self, code: &PolarCode, cs: &CriticalSet, grid: &[Threshold], t_max: usize, frame: &Frame) {
        let initial = self.sc.decode(&frame.llr).expect("frame length matches code");
        let initial_ok = code.payload_matches(&initial.hard_out, &frame.u);
        if code.crc_passes(&initial.hard_out) {
            if !initial_ok {
                self.errors.iter_mut().for_each(|e| *e += 1);
            }
            return;
        }
        self.candidates.clear();
        self.candidates
            .extend(cs.indices().iter().map(|&i| (i, initial.leaf_llr[i].abs())));
        self.memo.clear();

        for (p, omega) in grid.iter().enumerate() {
            let mut ok = initial_ok;
            let plan = self.candidates.iter().filter(|(_, m)| omega.admits(*m)).take(t_max);
            for &(leaf, _) in plan {
                let (crc, correct) = match self.memo.iter().find(|m| m.0 == leaf) {
                    Some(&(_, crc, correct)) => (crc, correct),
                    None => {
                        let out = self
                            .sc
                            .decode_flipped(&frame.llr, &[leaf])
                            .expect("critical leaves are non-frozen");
                        let r = (
                            code.crc_passes(&out.hard_out),
                            code.payload_matches(&out.hard_out, &frame.u),
                        );
                        self.memo.push((leaf, r.0, r.1));
                        r
                    }
                };
                if crc {
                    ok = correct;
                    break;
                }
            }
            self.errors[p] += !ok as u64;
        }
    }
}

/// Simulated TSCF FER at each Ω of `grid`, all on one shared frame stream.
///
/// Runs until every grid point has `stop.min_errors` errors or
/// `stop.max_frames` frames have been decoded.
pub fn omega_sweep(
    code: &PolarCode,
    ebn0_db: f64,
    grid: &[f64],
    t_max: usize,
    stop: StopRule,
    seed: u64,
) -> Result<OmegaSweep> {
    omega_sweep_with(code, &build_critical_set(code), ebn0_db, grid, t_max, stop, seed)
}

/// [`omega_sweep`] over an explicit critical set.
pub fn omega_sweep_with(
    code: &PolarCode,
    cs: &CriticalSet,
    ebn0_db: f64,
    grid: &[f64],
    t_max: usize,
    stop: StopRule,
    seed: u64,
) -> Result<OmegaSweep> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if code.crc().is_none() {
        return Err(Error::MissingCrc);
    }
    let thresholds = grid.iter().map(|&w| Threshold::new(w)).collect::<Result<Vec<_>>>()?;
    let cfg = ChannelConfig::for_code(code, ebn0_db, seed);
    let mut errors = vec![0u64; grid.len()];
    let mut frames = 0u64;

    while !(frames >= stop.max_frames || errors.iter().all(|&e| e >= stop.min_errors)) {
        let end = (frames + BATCH).min(stop.max_frames);
        let batch = (frames..end)
            .into_par_iter()
            .fold(
                || Worker::new(code, grid.len()),
                |mut w, index| {
                    w.frame(code, cs, &thresholds, t_max, &Frame::generate(code, &cfg, index));
                    w
                },
            )
            .map(|w| w.errors)
            .reduce(
                || vec![0; grid.len()],
                |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
            );
        for (e, b) in errors.iter_mut().zip(batch) {
            *e += b;
        }
        frames = end;
    }

    Ok(OmegaSweep {
        ebn0_db,
        t_max,
        rows: grid
            .iter()
            .zip(&errors)
            .map(|(&omega, &e)| SweepRow {
                omega,
                fer: e as f64 / frames.max(1) as f64,
                frames,
                errors: e,
            })
            .collect(),
    })
}

/// Evenly spaced grid `start, start + step, …` up to and including `stop`.
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0);
    let count = ((stop - start) / step + 1e-9).floor() as i64;
    (0..=count.max(-1)).map(|k| start + k as f64 * step).collect()
}

//! Monte-Carlo FER experiments.
//!
//! Frames are processed in fixed-size batches spread over the rayon pool.
//! Every decoder at an operating point sees the same frames, so paired
//! comparisons between decoders carry no sampling noise from the channel.
//! Stop rules are evaluated per decoder at batch boundaries only, which keeps
//! the result independent of thread scheduling.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::PolarCode;
use crate::error::{Error, Result};
use crate::fast::{DecodeTree, FastDecoder, FlipMode};
use crate::flip::{FlipDecoder, Threshold};
use crate::sc::ScDecoder;

use super::channel::{ChannelConfig, Frame};

/// Frames per batch; also the granularity of the stop rule.
pub const BATCH: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecoderKind {
    #[serde(rename = "SC")]
    Sc,
    /// SC with a genie correcting the first wrong decision.
    #[serde(rename = "SCO")]
    Sco,
    #[serde(rename = "SCF")]
    Scf,
    #[serde(rename = "TSCF")]
    Tscf,
    #[serde(rename = "FAST_SC")]
    FastSc,
    #[serde(rename = "FAST_SCF")]
    FastScf,
    #[serde(rename = "FAST_TSCF")]
    FastTscf,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 7] = [
        DecoderKind::Sc,
        DecoderKind::Sco,
        DecoderKind::Scf,
        DecoderKind::Tscf,
        DecoderKind::FastSc,
        DecoderKind::FastScf,
        DecoderKind::FastTscf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::Sc => "SC",
            DecoderKind::Sco => "SCO",
            DecoderKind::Scf => "SCF",
            DecoderKind::Tscf => "TSCF",
            DecoderKind::FastSc => "FAST_SC",
            DecoderKind::FastScf => "FAST_SCF",
            DecoderKind::FastTscf => "FAST_TSCF",
        }
    }

    pub fn needs_crc(self) -> bool {
        matches!(
            self,
            DecoderKind::Scf | DecoderKind::Tscf | DecoderKind::FastScf | DecoderKind::FastTscf
        )
    }

    pub fn uses_threshold(self) -> bool {
        matches!(self, DecoderKind::Tscf | DecoderKind::FastTscf)
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        DecoderKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| Error::InvalidDecoder(format!("unknown decoder `{s}`")))
    }
}

/// Threshold selection for thresholded decoders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OmegaMode {
    /// `Ω*(Eb/N0)` at each operating point.
    Auto,
    Fixed(f64),
}

impl OmegaMode {
    pub fn at(self, ebn0_db: f64) -> Result<Threshold> {
        match self {
            OmegaMode::Auto => Ok(Threshold::approximate(ebn0_db)),
            OmegaMode::Fixed(w) => Threshold::new(w),
        }
    }
}

impl FromStr for OmegaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("auto") {
            return Ok(OmegaMode::Auto);
        }
        let w: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("threshold `{s}` (expected `auto` or a number)")))?;
        Threshold::new(w)?;
        Ok(OmegaMode::Fixed(w))
    }
}

impl fmt::Display for OmegaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaMode::Auto => f.write_str("auto"),
            OmegaMode::Fixed(w) => write!(f, "{w}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoderSpec {
    pub kind: DecoderKind,
    pub t_max: usize,
    pub omega: OmegaMode,
}

impl DecoderSpec {
    pub fn new(kind: DecoderKind, t_max: usize, omega: OmegaMode) -> Self {
        Self { kind, t_max, omega }
    }

    /// Plain decoder without flipping parameters.
    pub fn plain(kind: DecoderKind) -> Self {
        Self::new(kind, 0, OmegaMode::Auto)
    }

    pub fn validate(&self, code: &PolarCode) -> Result<()> {
        if self.kind.needs_crc() && code.crc().is_none() {
            return Err(Error::InvalidDecoder(format!("{} requires a CRC", self.kind)));
        }
        if let OmegaMode::Fixed(w) = self.omega {
            Threshold::new(w)?;
        }
        Ok(())
    }
}

/// Per-decoder stopping: at least `min_errors` frame errors, or `max_frames`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub min_errors: u64,
    pub max_frames: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_errors: 200,
            max_frames: 10_000_000,
        }
    }
}

impl StopRule {
    pub fn new(min_errors: u64, max_frames: u64) -> Self {
        Self { min_errors, max_frames }
    }

    /// Exactly `frames` frames regardless of errors.
    pub fn frames(frames: u64) -> Self {
        Self::new(u64::MAX, frames)
    }

    pub fn done(&self, frames: u64, errors: u64) -> bool {
        frames >= self.max_frames || errors >= self.min_errors
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub decoder: String,
    pub ebn0_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    /// Errors whose final estimate fails the CRC.
    pub detected_errors: u64,
    /// Errors whose final estimate passes the CRC (or no CRC is present).
    pub undetected_errors: u64,
    pub total_iterations: u64,
    pub total_steps: u64,
    pub fer: f64,
    pub avg_iterations: f64,
    pub avg_steps: f64,
    /// Decoder time summed over worker threads.
    pub wall_time_s: f64,
}

impl SimResult {
    /// Same statistics, ignoring timing.
    pub fn same_counts(&self, other: &SimResult) -> bool {
        SimResult {
            wall_time_s: 0.0,
            ..self.clone()
        } == SimResult {
            wall_time_s: 0.0,
            ..other.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    frames: u64,
    errors: u64,
    detected: u64,
    iterations: u64,
    steps: u64,
    nanos: u64,
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        self.frames += o.frames;
        self.errors += o.errors;
        self.detected += o.detected;
        self.iterations += o.iterations;
        self.steps += o.steps;
        self.nanos += o.nanos;
        self
    }

    fn finish(&self, kind: DecoderKind, ebn0_db: f64) -> SimResult {
        let frames = self.frames.max(1) as f64;
        SimResult {
            decoder: kind.name().to_string(),
            ebn0_db,
            frames: self.frames,
            frame_errors: self.errors,
            detected_errors: self.detected,
            undetected_errors: self.errors - self.detected,
            total_iterations: self.iterations,
            total_steps: self.steps,
            fer: self.errors as f64 / frames,
            avg_iterations: self.iterations as f64 / frames,
            avg_steps: self.steps as f64 / frames,
            wall_time_s: self.nanos as f64 * 1e-9,
        }
    }
}

enum Engine {
    Sc(ScDecoder),
    Sco(ScDecoder),
    Flip(FlipDecoder, bool),
    Fast(FastDecoder, Option<FlipMode>),
}

/// One decoder configured for one operating point.
struct Instance {
    engine: Engine,
    t_max: usize,
    omega: Threshold,
    full_steps: usize,
}

struct Decoded {
    error: bool,
    crc_pass: bool,
    iterations: usize,
    steps: usize,
}

impl Instance {
    fn new(code: &PolarCode, spec: &DecoderSpec, ebn0_db: f64, tree: &DecodeTree) -> Result<Self> {
        spec.validate(code)?;
        let engine = match spec.kind {
            DecoderKind::Sc => Engine::Sc(ScDecoder::new(code)),
            DecoderKind::Sco => Engine::Sco(ScDecoder::new(code)),
            DecoderKind::Scf => Engine::Flip(FlipDecoder::new(code)?, false),
            DecoderKind::Tscf => Engine::Flip(FlipDecoder::new(code)?, true),
            DecoderKind::FastSc => Engine::Fast(FastDecoder::with_tree(code, tree.clone()), None),
            DecoderKind::FastScf => Engine::Fast(FastDecoder::with_tree(code, tree.clone()), Some(FlipMode::Scf)),
            DecoderKind::FastTscf => Engine::Fast(FastDecoder::with_tree(code, tree.clone()), Some(FlipMode::Tscf)),
        };
        Ok(Self {
            engine,
            t_max: spec.t_max,
            omega: spec.omega.at(ebn0_db)?,
            full_steps: 2 * code.len() - 2,
        })
    }

    fn decode(&mut self, code: &PolarCode, frame: &Frame) -> Decoded {
        let (hard_out, iterations, steps_per) = match &mut self.engine {
            Engine::Sc(dec) => {
                let out = dec.decode(&frame.llr).expect("frame length matches code");
                (out.hard_out.clone(), 1, self.full_steps)
            }
            Engine::Sco(dec) => {
                let corrected = dec
                    .decode_oracle(&frame.llr, &frame.u)
                    .expect("frame length matches code");
                let it = 1 + corrected.is_some() as usize;
                (dec.frame().hard_out.clone(), it, self.full_steps)
            }
            Engine::Flip(dec, thresholded) => {
                let out = if *thresholded {
                    dec.tscf(&frame.llr, self.t_max, self.omega)
                } else {
                    dec.scf(&frame.llr, self.t_max)
                }
                .expect("validated decoder");
                (out.hard_out, out.iterations, self.full_steps)
            }
            Engine::Fast(dec, None) => {
                let (u, steps) = dec.decode(&frame.llr).expect("frame length matches code");
                (u.to_vec(), 1, steps)
            }
            Engine::Fast(dec, Some(mode)) => {
                let out = dec
                    .flip_decode(&frame.llr, self.t_max, *mode, self.omega)
                    .expect("validated decoder");
                (out.hard_out, out.iterations, dec.steps_per_iteration())
            }
        };
        Decoded {
            error: !code.payload_matches(&hard_out, &frame.u),
            crc_pass: code.crc_passes(&hard_out),
            iterations,
            steps: iterations * steps_per,
        }
    }
}

/// Runs several decoders on the shared frame stream of one operating point.
pub fn run_point(
    code: &PolarCode,
    specs: &[DecoderSpec],
    ebn0_db: f64,
    seed: u64,
    stop: StopRule,
) -> Result<Vec<SimResult>> {
    let tree = DecodeTree::classify(code);
    // Validate eagerly so configuration errors surface before any work.
    for spec in specs {
        Instance::new(code, spec, ebn0_db, &tree)?;
    }
    let cfg = ChannelConfig::for_code(code, ebn0_db, seed);
    let mut totals = vec![Tally::default(); specs.len()];
    let mut active: Vec<bool> = totals.iter().map(|t| !stop.done(t.frames, t.errors)).collect();
    let mut next = 0u64;

    while active.iter().any(|&a| a) {
        let end = next.saturating_add(BATCH);
        let batch = (next..end)
            .into_par_iter()
            .fold(
                || {
                    let instances: Vec<Instance> = specs
                        .iter()
                        .map(|s| Instance::new(code, s, ebn0_db, &tree).expect("validated above"))
                        .collect();
                    (instances, vec![Tally::default(); specs.len()])
                },
                |(mut instances, mut tallies), index| {
                    let frame = Frame::generate(code, &cfg, index);
                    for (d, inst) in instances.iter_mut().enumerate() {
                        if !active[d] || index >= stop.max_frames {
                            continue;
                        }
                        let t0 = Instant::now();
                        let r = inst.decode(code, &frame);
                        let t = &mut tallies[d];
                        t.nanos += t0.elapsed().as_nanos() as u64;
                        t.frames += 1;
                        t.errors += r.error as u64;
                        t.detected += (r.error && !r.crc_pass) as u64;
                        t.iterations += r.iterations as u64;
                        t.steps += r.steps as u64;
                    }
                    (instances, tallies)
                },
            )
            .map(|(_, tallies)| tallies)
            .reduce(
                || vec![Tally::default(); specs.len()],
                |a, b| a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect(),
            );
        for (d, t) in batch.into_iter().enumerate() {
            totals[d] = totals[d].merge(t);
            active[d] = active[d] && !stop.done(totals[d].frames, totals[d].errors);
        }
        next = end;
    }

    Ok(specs
        .iter()
        .zip(&totals)
        .map(|(s, t)| t.finish(s.kind, ebn0_db))
        .collect())
}

/// Single decoder at one operating point.
pub fn run_experiment(code: &PolarCode, spec: &DecoderSpec, cfg: &ChannelConfig, stop: StopRule) -> Result<SimResult> {
    let mut r = run_point(code, std::slice::from_ref(spec), cfg.ebn0_db, cfg.seed, stop)?;
    Ok(r.remove(0))
}

/// All decoders over a grid of Eb/N0 points, grid-major order.
pub fn sweep(
    code: &PolarCode,
    specs: &[DecoderSpec],
    ebn0_grid: &[f64],
    seed: u64,
    stop: StopRule,
) -> Result<Vec<SimResult>> {
    if ebn0_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut out = Vec::with_capacity(specs.len() * ebn0_grid.len());
    for &ebn0 in ebn0_grid {
        out.extend(run_point(code, specs, ebn0, seed, stop)?);
    }
    Ok(out)
}

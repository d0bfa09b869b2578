//! Leaf-level SC-Flip and thresholded SC-Flip.
//!
//! Both decoders run an initial SC pass and, if the CRC fails, retry with a
//! single leaf decision complemented per attempt. SCF tries the non-frozen
//! leaves with the smallest decision-LLR magnitudes; TSCF restricts the
//! candidates to the critical set and drops any whose magnitude exceeds the
//! threshold, then tries them in index order.

use serde::{Deserialize, Serialize};

use crate::construction::PolarCode;
use crate::error::{Error, Result};
use crate::sc::{LlrFrame, ScDecoder};
use crate::Bit;

/// LLR-magnitude threshold for TSCF candidate selection.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Threshold(f64);

impl Threshold {
    pub fn new(omega: f64) -> Result<Self> {
        if !omega.is_finite() || omega < 0.0 {
            return Err(Error::InvalidThreshold(omega));
        }
        Ok(Self(omega))
    }

    /// `Ω*(x) = 2(x + 3)`, x = Eb/N0 in dB. Clamped at zero below −3 dB.
    pub fn approximate(ebn0_db: f64) -> Self {
        Self((2.0 * (ebn0_db + 3.0)).max(0.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Inclusive test `|llr| ≤ Ω`.
    #[inline]
    pub fn admits(self, magnitude: f64) -> bool {
        magnitude <= self.0
    }
}

/// Approximated threshold for a given Eb/N0 in dB.
pub fn omega_star(ebn0_db: f64) -> Threshold {
    Threshold::approximate(ebn0_db)
}

/// First leaf index of every maximal all-non-frozen subtree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalSet {
    indices: Vec<usize>,
}

impl CriticalSet {
    pub fn from_frozen_mask(frozen: &[bool]) -> Self {
        assert!(frozen.len().is_power_of_two());
        let mut indices = Vec::new();
        collect_rate1_starts(frozen, 0, &mut indices);
        Self { indices }
    }

    /// Arbitrary leaf set, e.g. a trained one.
    pub fn from_indices(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }
}

fn collect_rate1_starts(frozen: &[bool], lo: usize, out: &mut Vec<usize>) {
    if frozen.iter().all(|&f| f) {
        return;
    }
    if frozen.iter().all(|&f| !f) {
        out.push(lo);
        return;
    }
    let h = frozen.len() / 2;
    collect_rate1_starts(&frozen[..h], lo, out);
    collect_rate1_starts(&frozen[h..], lo + h, out);
}

pub fn build_critical_set(code: &PolarCode) -> CriticalSet {
    CriticalSet::from_frozen_mask(code.frozen_mask())
}

/// One flip attempt: the leaves to complement and the metric that ranked it.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipTarget {
    pub leaves: Vec<usize>,
    pub metric: f64,
}

/// Ordered flip candidates with a cursor.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipPlan {
    candidates: Vec<FlipTarget>,
    cursor: usize,
    t_max: usize,
}

impl FlipPlan {
    /// Keeps the first `t_max` of `candidates`, in the given order.
    pub fn new(mut candidates: Vec<FlipTarget>, t_max: usize) -> Self {
        candidates.truncate(t_max);
        Self {
            candidates,
            cursor: 0,
            t_max,
        }
    }

    /// SCF plan: non-frozen leaves by ascending `|LLR|`, ties by index.
    pub fn scf(code: &PolarCode, frame: &LlrFrame, t_max: usize) -> Self {
        let mut candidates: Vec<FlipTarget> = code
            .info_positions()
            .iter()
            .map(|&i| FlipTarget {
                leaves: vec![i],
                metric: frame.leaf_llr[i].abs(),
            })
            .collect();
        // Stable sort on an index-ordered list keeps ties in index order.
        candidates.sort_by(|a, b| a.metric.total_cmp(&b.metric));
        Self::new(candidates, t_max)
    }

    /// TSCF plan: critical indices with `|LLR| ≤ Ω`, in index order.
    pub fn tscf(frame: &LlrFrame, cs: &CriticalSet, omega: Threshold, t_max: usize) -> Self {
        let candidates = cs
            .indices()
            .iter()
            .filter_map(|&i| {
                let m = frame.leaf_llr[i].abs();
                omega.admits(m).then(|| FlipTarget {
                    leaves: vec![i],
                    metric: m,
                })
            })
            .take(t_max)
            .collect();
        Self::new(candidates, t_max)
    }

    pub fn candidates(&self) -> &[FlipTarget] {
        &self.candidates
    }

    pub fn t_max(&self) -> usize {
        self.t_max
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

impl Iterator for FlipPlan {
    type Item = FlipTarget;

    fn next(&mut self) -> Option<FlipTarget> {
        let t = self.candidates.get(self.cursor).cloned();
        self.cursor += t.is_some() as usize;
        t
    }
}

/// Outcome of a flip decoder on one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipOutcome {
    pub hard_out: Vec<Bit>,
    /// Decoding passes, initial one included: `1 ..= 1 + t_max`.
    pub iterations: usize,
    /// Whether the final estimate passes the CRC.
    pub crc_pass: bool,
}

/// Reusable SCF/TSCF decoder.
#[derive(Debug, Clone)]
pub struct FlipDecoder {
    critical: CriticalSet,
    engine: Engine,
}

#[derive(Debug, Clone)]
struct Engine {
    code: PolarCode,
    sc: ScDecoder,
}

impl FlipDecoder {
    pub fn new(code: &PolarCode) -> Result<Self> {
        if code.crc().is_none() {
            return Err(Error::MissingCrc);
        }
        Ok(Self {
            critical: build_critical_set(code),
            engine: Engine {
                code: code.clone(),
                sc: ScDecoder::new(code),
            },
        })
    }

    pub fn critical_set(&self) -> &CriticalSet {
        &self.critical
    }

    pub fn scf(&mut self, channel_llr: &[f64], t_max: usize) -> Result<FlipOutcome> {
        let e = &mut self.engine;
        if e.initial_pass(channel_llr)? {
            return Ok(e.outcome(1, true));
        }
        let plan = FlipPlan::scf(&e.code, e.sc.frame(), t_max);
        e.retry(channel_llr, plan)
    }

    /// TSCF over the decoder's own Rate-1 critical set.
    pub fn tscf(&mut self, channel_llr: &[f64], t_max: usize, omega: Threshold) -> Result<FlipOutcome> {
        self.engine.tscf(channel_llr, t_max, omega, &self.critical)
    }

    /// TSCF over an arbitrary critical set.
    pub fn tscf_with(
        &mut self,
        channel_llr: &[f64],
        t_max: usize,
        omega: Threshold,
        cs: &CriticalSet,
    ) -> Result<FlipOutcome> {
        self.engine.tscf(channel_llr, t_max, omega, cs)
    }
}

impl Engine {
    /// Plain SC pass; true if the CRC passes.
    fn initial_pass(&mut self, channel_llr: &[f64]) -> Result<bool> {
        self.sc.decode(channel_llr)?;
        Ok(self.code.crc_passes(&self.sc.frame().hard_out))
    }

    fn tscf(&mut self, channel_llr: &[f64], t_max: usize, omega: Threshold, cs: &CriticalSet) -> Result<FlipOutcome> {
        if self.initial_pass(channel_llr)? {
            return Ok(self.outcome(1, true));
        }
        let plan = FlipPlan::tscf(self.sc.frame(), cs, omega, t_max);
        self.retry(channel_llr, plan)
    }

    fn retry(&mut self, channel_llr: &[f64], plan: FlipPlan) -> Result<FlipOutcome> {
        if plan.is_empty() {
            return Ok(self.outcome(1, false));
        }
        let initial = self.sc.frame().hard_out.clone();
        let mut iterations = 1;
        for target in plan {
            iterations += 1;
            self.sc.decode_flipped(channel_llr, &target.leaves)?;
            if self.code.crc_passes(&self.sc.frame().hard_out) {
                return Ok(self.outcome(iterations, true));
            }
        }
        // Exhausted: report the initial SC estimate.
        Ok(FlipOutcome {
            hard_out: initial,
            iterations,
            crc_pass: false,
        })
    }

    fn outcome(&self, iterations: usize, crc_pass: bool) -> FlipOutcome {
        FlipOutcome {
            hard_out: self.sc.frame().hard_out.clone(),
            iterations,
            crc_pass,
        }
    }
}

/// SC-Flip with up to `t_max` extra passes.
pub fn scf_decode(code: &PolarCode, channel_llr: &[f64], t_max: usize) -> Result<FlipOutcome> {
    FlipDecoder::new(code)?.scf(channel_llr, t_max)
}

/// Thresholded SC-Flip over the given critical set.
pub fn tscf_decode(
    code: &PolarCode,
    channel_llr: &[f64],
    t_max: usize,
    omega: Threshold,
    cs: &CriticalSet,
) -> Result<FlipOutcome> {
    FlipDecoder::new(code)?.tscf_with(channel_llr, t_max, omega, cs)
}

/// One SC pass with the leaves in `flip_set` complemented.
pub fn flip_and_redecode(code: &PolarCode, channel_llr: &[f64], flip_set: &[usize]) -> Result<LlrFrame> {
    let mut dec = ScDecoder::new(code);
    dec.decode_flipped(channel_llr, flip_set)?;
    Ok(dec.frame().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{polar_transform, CRC16_CCITT};
    use crate::sc::{sc_decode, sc_oracle_decode};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn mask16() -> Vec<bool> {
        let mut mask = vec![true; 16];
        for i in [7, 9, 10, 11, 12, 13, 14, 15] {
            mask[i] = false;
        }
        mask
    }

    /// Random payload, encoded and sent over BPSK/AWGN at the given sigma.
    fn noisy_frame(code: &PolarCode, sigma: f64, rng: &mut ChaCha8Rng) -> (Vec<Bit>, Vec<f64>) {
        let payload: Vec<Bit> = (0..code.info_len()).map(|_| rng.random_range(0..2)).collect();
        let u = code.place(&payload).unwrap();
        let mut x = u.clone();
        polar_transform(&mut x);
        let llr = x
            .iter()
            .map(|&b| {
                let n: f64 = rng.sample(StandardNormal);
                2.0 * ((1.0 - 2.0 * b as f64) + sigma * n) / (sigma * sigma)
            })
            .collect();
        (u, llr)
    }

    #[test]
    fn omega_star_values() {
        assert_eq!(omega_star(2.5).value(), 11.0);
        assert_eq!(omega_star(1.0).value(), 8.0);
        assert_eq!(omega_star(-3.0).value(), 0.0);
        assert!(Threshold::new(f64::NAN).is_err());
        assert!(Threshold::new(-1.0).is_err());
        assert!(Threshold::new(2.0).unwrap().admits(2.0));
    }

    #[test]
    fn critical_set_examples() {
        assert_eq!(CriticalSet::from_frozen_mask(&mask16()).indices(), &[7, 9, 10, 12]);
        assert_eq!(CriticalSet::from_frozen_mask(&[false; 32]).indices(), &[0]);
        assert!(CriticalSet::from_frozen_mask(&[true; 32]).is_empty());
        let code = PolarCode::build(10, 512, 16, CRC16_CCITT).unwrap();
        let cs = build_critical_set(&code);
        assert!(cs.indices().iter().all(|&i| !code.is_frozen(i)));
        assert!(cs.indices().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn configuration_errors() {
        let code = PolarCode::build(5, 16, 0, CRC16_CCITT).unwrap();
        assert!(matches!(scf_decode(&code, &[1.0; 32], 4), Err(Error::MissingCrc)));
        let cs = build_critical_set(&code);
        assert!(matches!(
            tscf_decode(&code, &[1.0; 32], 4, omega_star(2.0), &cs),
            Err(Error::MissingCrc)
        ));
        assert!(matches!(
            flip_and_redecode(&code, &[1.0; 32], &[0]),
            Err(Error::FrozenFlip(0))
        ));
    }

    #[test]
    fn noiseless_frames_decode_in_one_pass() {
        let code = PolarCode::build(7, 64, 8, CRC16_CCITT).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (u, llr) = noisy_frame(&code, 1e-3, &mut rng);
        let out = scf_decode(&code, &llr, 10).unwrap();
        assert_eq!((out.iterations, out.crc_pass), (1, true));
        assert_eq!(out.hard_out, u);
        let out = tscf_decode(&code, &llr, 10, omega_star(2.0), &build_critical_set(&code)).unwrap();
        assert_eq!((out.iterations, out.crc_pass), (1, true));
    }

    #[test]
    fn degenerate_modes_match_plain_sc() {
        let code = PolarCode::build(8, 128, 16, CRC16_CCITT).unwrap();
        let cs = build_critical_set(&code);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..300 {
            let (_, llr) = noisy_frame(&code, 0.9, &mut rng);
            let sc = sc_decode(&code, &llr).unwrap();
            let crc = code.crc_passes(&sc.hard_out);
            for out in [
                scf_decode(&code, &llr, 0).unwrap(),
                tscf_decode(&code, &llr, 0, omega_star(2.0), &cs).unwrap(),
                tscf_decode(&code, &llr, 10, Threshold::new(0.0).unwrap(), &cs).unwrap(),
            ] {
                assert_eq!(out.hard_out, sc.hard_out);
                assert_eq!(out.crc_pass, crc);
                assert_eq!(out.iterations, 1);
            }
            assert_eq!(flip_and_redecode(&code, &llr, &[]).unwrap(), sc);
        }
    }

    #[test]
    fn scf_plan_is_sorted_prefix() {
        let code = PolarCode::build(8, 128, 16, CRC16_CCITT).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for t_max in [0, 1, 5, 10, 200] {
            let (_, llr) = noisy_frame(&code, 1.0, &mut rng);
            let frame = sc_decode(&code, &llr).unwrap();
            let plan = FlipPlan::scf(&code, &frame, t_max);
            // Full sort oracle.
            let mut all: Vec<(f64, usize)> = code
                .info_positions()
                .iter()
                .map(|&i| (frame.leaf_llr[i].abs(), i))
                .collect();
            all.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let expect: Vec<usize> = all.iter().take(t_max).map(|p| p.1).collect();
            let got: Vec<usize> = plan.candidates().iter().map(|c| c.leaves[0]).collect();
            assert_eq!(got, expect);
            assert!(plan.len() <= t_max);
        }
    }

    #[test]
    fn scf_corrects_single_error_at_weakest_leaf() {
        let code = PolarCode::build(8, 128, 16, CRC16_CCITT).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut seen = 0;
        for _ in 0..5000 {
            let (u, llr) = noisy_frame(&code, 0.85, &mut rng);
            let frame = sc_decode(&code, &llr).unwrap();
            if frame.hard_out == u {
                continue;
            }
            let (_, oracle_ok) = sc_oracle_decode(&code, &llr, &u).unwrap();
            let first = (0..256).find(|&i| frame.hard_out[i] != u[i]).unwrap();
            let plan = FlipPlan::scf(&code, &frame, 10);
            if oracle_ok && plan.candidates()[0].leaves == [first] {
                let out = scf_decode(&code, &llr, 10).unwrap();
                assert_eq!(out.iterations, 2);
                assert_eq!(out.hard_out, u);
                seen += 1;
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn flipping_oracle_index_reproduces_oracle() {
        let code = PolarCode::build(7, 80, 16, CRC16_CCITT).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        for _ in 0..3000 {
            let (u, llr) = noisy_frame(&code, 0.8, &mut rng);
            let frame = sc_decode(&code, &llr).unwrap();
            let Some(first) = (0..128).find(|&i| frame.hard_out[i] != u[i]) else {
                continue;
            };
            let (oracle, _) = sc_oracle_decode(&code, &llr, &u).unwrap();
            let a = flip_and_redecode(&code, &llr, &[first]).unwrap();
            let b = flip_and_redecode(&code, &llr, &[first]).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.hard_out, oracle.hard_out);
            checked += 1;
        }
        assert!(checked > 10);
    }

    proptest! {
        #[test]
        fn iterations_bounded_and_candidates_monotone(
            seed in any::<u64>(), t_max in 0usize..12, w1 in 0.0f64..20.0, w2 in 0.0f64..20.0
        ) {
            let code = PolarCode::build(7, 72, 16, CRC16_CCITT).unwrap();
            let cs = build_critical_set(&code);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (_, llr) = noisy_frame(&code, 0.9, &mut rng);
            let (lo, hi) = if w1 <= w2 { (w1, w2) } else { (w2, w1) };
            let frame = sc_decode(&code, &llr).unwrap();
            let small = FlipPlan::tscf(&frame, &cs, Threshold::new(lo).unwrap(), usize::MAX);
            let large = FlipPlan::tscf(&frame, &cs, Threshold::new(hi).unwrap(), usize::MAX);
            for c in small.candidates() {
                prop_assert!(large.candidates().contains(c));
            }
            let a = scf_decode(&code, &llr, t_max).unwrap();
            let b = tscf_decode(&code, &llr, t_max, Threshold::new(hi).unwrap(), &cs).unwrap();
            prop_assert!((1..=1 + t_max).contains(&a.iterations));
            prop_assert!((1..=1 + t_max).contains(&b.iterations));
        }
    }
}

//! The embedding: marker positions in `X`, matched periodic orbits, the
//! block encoder and its decoder, and end-to-end verification.

pub mod markers;
pub mod orbits;
pub mod sample;
pub mod verify;

mod decode;
mod encode;
mod serial;

use std::collections::HashMap;
use std::sync::OnceLock;

use log::{debug, info};

use crate::error::{Error, Result};
use crate::fischer::{build_fischer_cover, FischerCover};
use crate::invariants::embeddability_precondition;
use crate::marker::{build_marker, payload_index, select_block_length, AvoidanceIndex, BlockOptions, Kmp, MarkerKit, PayloadContext, Xi};
use crate::presentations::Presentation;

pub use decode::decode_point;
pub use encode::{encode_path, encode_point, CaseKind};
pub use markers::{local_periodic_point, marker_positions, scan_markers, Catalog, LocalPeriodic, MarkerPositions, MarkerScan, MarkerStatus};
pub use orbits::{match_periodic_orbits, OrbitMatch, OrbitPair};
pub use sample::Sampler;
pub use serial::parse_embedding_code;
pub use verify::{verify_embedding, VerifyOptions};

/// Period bound for the first, cheap precondition pass.
const QUICK_PRECONDITION: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    pub block: BlockOptions,
    /// Sample words used to measure the context the encoder consults.
    pub calibration_samples: usize,
    /// Sample words re-encoded with randomized outer context.
    pub sliding_checks: usize,
    pub seed: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { block: BlockOptions::default(), calibration_samples: 200, sliding_checks: 64, seed: 0 }
    }
}

/// How the window radius was measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowCalibration {
    pub radius: usize,
    pub slack: usize,
    pub samples: usize,
    pub sliding_checks: usize,
}

/// Everything the encoder and decoder need. Immutable once built.
#[derive(Debug)]
pub struct EmbeddingCode {
    pub(crate) x: Presentation,
    pub(crate) cover: FischerCover,
    pub(crate) kit: MarkerKit,
    pub(crate) orbit_match: OrbitMatch,
    pub(crate) window: usize,
    pub(crate) calibration: WindowCalibration,
    pub(crate) runtime: OnceLock<Runtime>,
}

impl Clone for EmbeddingCode {
    fn clone(&self) -> Self {
        EmbeddingCode {
            x: self.x.clone(),
            cover: self.cover.clone(),
            kit: self.kit.clone(),
            orbit_match: self.orbit_match.clone(),
            window: self.window,
            calibration: self.calibration,
            runtime: OnceLock::new(),
        }
    }
}

/// Derived lookup tables, built on first use.
#[derive(Debug)]
pub(crate) struct Runtime {
    /// Automaton for the marker's label word.
    pub kmp: Kmp,
    pub xi: Xi,
    /// Payload indices of head blocks, by the periodic stretch they enter.
    pub heads: HashMap<PayloadContext, AvoidanceIndex>,
    /// Matched pair of each `X`-orbit, by Lyndon word.
    pub orbit_of: HashMap<Vec<u32>, usize>,
    /// Pair and phase of every identification window of a matched cycle.
    pub ident: HashMap<Vec<u32>, (usize, usize)>,
}

impl EmbeddingCode {
    pub fn x(&self) -> &Presentation {
        &self.x
    }

    pub fn cover(&self) -> &FischerCover {
        &self.cover
    }

    pub fn kit(&self) -> &MarkerKit {
        &self.kit
    }

    pub fn ell(&self) -> usize {
        self.kit.choice.ell
    }

    pub fn marker_len(&self) -> usize {
        self.kit.marker.len()
    }

    pub fn connector_len(&self) -> usize {
        self.kit.connectors.k
    }

    pub fn orbit_match(&self) -> &OrbitMatch {
        &self.orbit_match
    }

    /// Encoder context radius `W`.
    pub fn window(&self) -> usize {
        self.window
    }

    pub fn calibration(&self) -> WindowCalibration {
        self.calibration
    }

    /// Decoder context radius `W′`.
    pub fn decode_window(&self) -> usize {
        3 * self.ell() + self.marker_len() + 1
    }

    /// Replaces the orbit matching without re-checking eligibility. The
    /// verifier is then the only judge of the result.
    pub fn with_orbit_match(&self, orbit_match: OrbitMatch) -> Result<Self> {
        serial::check_orbit_match(&self.x, &self.cover, self.ell(), &orbit_match)?;
        let mut code = self.clone();
        code.orbit_match = orbit_match;
        Ok(code)
    }

    pub(crate) fn runtime(&self) -> &Runtime {
        self.runtime.get_or_init(|| Runtime::new(self))
    }

    /// Length of the identification windows of periodic stretches.
    pub(crate) fn ident_len(&self) -> usize {
        orbits::identification_length(&self.kit)
    }

    /// Entry context of the periodic stretch that starts at phase `k` of
    /// pair `p`.
    pub(crate) fn context(&self, p: usize, k: usize) -> PayloadContext {
        let pair = &self.orbit_match.pairs[p];
        let l = self.marker_len();
        PayloadContext::Periodic {
            vertex: self.cover.graph().edge(pair.edge(k)).src,
            lead: (0..l - 1).map(|d| self.cover.label(pair.edge(k + d))).collect(),
        }
    }
}

impl Runtime {
    fn new(code: &EmbeddingCode) -> Self {
        let c = &code.cover;
        let kit = &code.kit;
        let pay = kit.choice.pay(kit.choice.ell + 1);
        let m = code.ident_len();
        let mut heads = HashMap::new();
        let mut orbit_of = HashMap::new();
        let mut ident = HashMap::new();
        for (p, pair) in code.orbit_match.pairs.iter().enumerate() {
            orbit_of.entry(pair.from.clone()).or_insert(p);
            for k in 0..pair.n {
                let ctx = code.context(p, k);
                heads.entry(ctx.clone()).or_insert_with(|| payload_index(c, &kit.marker, &kit.connectors, &ctx, pay));
                let window: Vec<u32> = (0..m).map(|d| c.label(pair.edge(k + d))).collect();
                ident.entry(window).or_insert((p, k));
            }
        }
        Runtime { kmp: Kmp::new(kit.marker.label.clone()), xi: Xi::new(&code.x, c, kit), heads, orbit_of, ident }
    }
}

/// Builds an embedding code of `x` into `y`.
pub fn build_embedding(x: &Presentation, y: &Presentation, opts: &BuildOptions) -> Result<EmbeddingCode> {
    let cover = build_fischer_cover(y).map_err(|e| e.at("cover"))?;
    precondition(x, y, QUICK_PRECONDITION)?;
    let marker = build_marker(&cover).map_err(|e| e.at("marker"))?;
    let mut block = opts.block;
    let (kit, orbit_match) = loop {
        let kit = select_block_length(x, &cover, &marker, &block).map_err(|e| e.at("block_length"))?;
        info!("block length {} with marker length {} and connector length {}", kit.choice.ell, kit.marker.len(), kit.connectors.k);
        match match_periodic_orbits(x, &cover, &kit) {
            Ok(m) => break (kit, m),
            Err(Error::InsufficientOrbits { n, needed, available, eligible }) if available >= needed => {
                debug!("only {eligible} of {needed} orbits of period {n} eligible; raising the block length");
                block.min_ell = kit.choice.ell + 1;
            }
            Err(e) => return Err(e.at("orbit_match")),
        }
    };
    precondition(x, y, kit.choice.ell)?;
    let mut code = EmbeddingCode {
        x: x.clone(),
        cover,
        kit,
        orbit_match,
        window: 0,
        calibration: WindowCalibration { radius: 0, slack: 0, samples: 0, sliding_checks: 0 },
        runtime: OnceLock::new(),
    };
    let calibration = encode::calibrate(&code, opts).map_err(|e| e.at("window"))?;
    code.window = calibration.radius + calibration.slack;
    code.calibration = calibration;
    encode::certify_sliding_block(&mut code, opts).map_err(|e| e.at("window"))?;
    info!("window radius {}", code.window);
    Ok(code)
}

fn precondition(x: &Presentation, y: &Presentation, n: usize) -> Result<()> {
    let report = embeddability_precondition(x, y, n);
    if report.pass {
        return Ok(());
    }
    let failed: Vec<&str> = report.failed().map(|v| v.name.as_str()).collect();
    Err(Error::Precondition(failed.join(", ")))
}

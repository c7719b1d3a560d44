//! Analytic Roofline model of the propagation matvec.
//!
//! Per step the kernel performs `8 d⁴` FLOPs (one complex multiply-add per
//! propagator entry) and moves `(d⁴ + 2 d²) · 16` bytes: the propagator once,
//! the input and output state vectors once each, as complex128. Only this
//! compulsory traffic is counted.

use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kv;

const COMPLEX_BYTES: u64 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CacheLevel {
    L1,
    L2,
    L3,
    #[serde(rename = "DRAM")]
    Dram,
}

impl CacheLevel {
    pub const ALL: [CacheLevel; 4] = [
        CacheLevel::L1,
        CacheLevel::L2,
        CacheLevel::L3,
        CacheLevel::Dram,
    ];

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for CacheLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CacheLevel::L1 => "L1",
            CacheLevel::L2 => "L2",
            CacheLevel::L3 => "L3",
            CacheLevel::Dram => "DRAM",
        })
    }
}

/// FLOPs, bytes, and arithmetic intensity of one propagation step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelCharacter {
    pub dim: usize,
    pub flops: u64,
    pub bytes: u64,
    /// FLOP/byte.
    pub ai: f64,
    pub working_set_bytes: u64,
    pub placement: Option<CacheLevel>,
}

/// Analytic counts for state dimension `d` (propagator of side `d²`).
///
/// # Panics
/// If `d == 0` or the counts overflow `u64`.
pub fn characterize(d: usize) -> KernelCharacter {
    assert!(d >= 1, "dimension must be at least 1");
    let d = d as u64;
    let d2 = d.checked_mul(d).expect("dimension overflow");
    let d4 = d2.checked_mul(d2).expect("dimension overflow");
    let flops = d4.checked_mul(8).expect("dimension overflow");
    let bytes = d4
        .checked_add(2 * d2)
        .and_then(|x| x.checked_mul(COMPLEX_BYTES))
        .expect("dimension overflow");
    KernelCharacter {
        dim: d as usize,
        flops,
        bytes,
        ai: flops as f64 / bytes as f64,
        working_set_bytes: bytes,
        placement: None,
    }
}

/// Peak compute plus per-level bandwidths and capacities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MachineProfile {
    pub name: String,
    pub peak_gflops: f64,
    /// GB/s for L1, L2, L3, DRAM.
    pub bandwidth_gbs: [f64; 4],
    /// Bytes for L1, L2, L3.
    pub capacity_bytes: [u64; 3],
}

const PROFILE_KEYS: [&str; 8] = [
    "peak_gflops",
    "bw_l1",
    "bw_l2",
    "bw_l3",
    "bw_dram",
    "cap_l1",
    "cap_l2",
    "cap_l3",
];

impl MachineProfile {
    pub fn new(
        name: impl Into<String>,
        peak_gflops: f64,
        bandwidth_gbs: [f64; 4],
        capacity_bytes: [u64; 3],
    ) -> Result<Self> {
        let p = Self {
            name: name.into(),
            peak_gflops,
            bandwidth_gbs,
            capacity_bytes,
        };
        p.validate()?;
        Ok(p)
    }

    /// Desktop Raptor Lake core: 48 KiB L1d, 2 MiB L2, 36 MiB L3, with a
    /// DRAM ridge of 128 GFLOP/s over 80 GB/s. The L1-L3 bandwidths are
    /// nominal figures placed between the DRAM bandwidth and the
    /// 128/0.41 GB/s at which a d = 3 kernel would turn compute-bound.
    pub fn bundled() -> Self {
        Self::new(
            "i9-13980HX",
            128.0,
            [256.0, 160.0, 100.0, 80.0],
            [48 * 1024, 2 * 1024 * 1024, 36 * 1024 * 1024],
        )
        .expect("bundled profile is valid")
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.peak_gflops > 0.0 && self.peak_gflops.is_finite()) {
            return bad(format!(
                "peak_gflops must be positive, got {}",
                self.peak_gflops
            ));
        }
        if self
            .bandwidth_gbs
            .iter()
            .any(|b| !(*b > 0.0 && b.is_finite()))
        {
            return bad("bandwidths must be positive and finite".into());
        }
        if !self.bandwidth_gbs.windows(2).all(|w| w[0] > w[1]) {
            return bad("bandwidths must strictly decrease from L1 to DRAM".into());
        }
        if self.capacity_bytes[0] == 0 || !self.capacity_bytes.windows(2).all(|w| w[0] < w[1]) {
            return bad("capacities must be positive and strictly increase from L1 to L3".into());
        }
        Ok(())
    }

    pub fn bandwidth(&self, level: CacheLevel) -> f64 {
        self.bandwidth_gbs[level.index()]
    }

    /// Capacity of a cache level; `None` for DRAM.
    pub fn capacity(&self, level: CacheLevel) -> Option<u64> {
        self.capacity_bytes.get(level.index()).copied()
    }

    /// Parses the flat `key = value` profile format. All eight numeric keys
    /// are required; `name` is optional.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values: [Option<f64>; 8] = [None; 8];
        let mut name = None;
        let mut last_line = 0;
        for (line_no, line) in kv::lines(text) {
            last_line = line_no;
            let (key, value) = kv::split(line, line_no)?;
            if key == "name" {
                name = Some(value.to_string());
                continue;
            }
            let slot = PROFILE_KEYS
                .iter()
                .position(|k| *k == key)
                .ok_or_else(|| Error::parse(line_no, format!("unknown key `{key}`")))?;
            if values[slot].is_some() {
                return Err(Error::parse(line_no, format!("duplicate key `{key}`")));
            }
            values[slot] = Some(kv::number(value, &key, line_no)?);
        }
        let mut got = [0.0; 8];
        for (i, v) in values.iter().enumerate() {
            got[i] = v.ok_or_else(|| {
                Error::parse(last_line, format!("missing key `{}`", PROFILE_KEYS[i]))
            })?;
        }
        let cap = |x: f64, key: &str| -> Result<u64> {
            if x >= 1.0 && x.fract() == 0.0 && x < u64::MAX as f64 {
                Ok(x as u64)
            } else {
                Err(Error::InvalidParameter(format!(
                    "`{key}` must be a positive whole number of bytes"
                )))
            }
        };
        Self::new(
            name.unwrap_or_else(|| "custom".to_string()),
            got[0],
            [got[1], got[2], got[3], got[4]],
            [
                cap(got[5], "cap_l1")?,
                cap(got[6], "cap_l2")?,
                cap(got[7], "cap_l3")?,
            ],
        )
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Renders the profile in the file format [`MachineProfile::parse`] reads.
    pub fn to_file_format(&self) -> String {
        let [l1, l2, l3, dram] = self.bandwidth_gbs;
        let [c1, c2, c3] = self.capacity_bytes;
        format!(
            "name = {}\npeak_gflops = {}\nbw_l1 = {l1}\nbw_l2 = {l2}\nbw_l3 = {l3}\nbw_dram = {dram}\ncap_l1 = {c1}\ncap_l2 = {c2}\ncap_l3 = {c3}\n",
            self.name, self.peak_gflops
        )
    }
}

/// Smallest level whose capacity holds the working set (equal fits), else DRAM.
pub fn place(k: &KernelCharacter, m: &MachineProfile) -> KernelCharacter {
    let placement = CacheLevel::ALL.into_iter().find(|&level| {
        m.capacity(level)
            .is_none_or(|cap| k.working_set_bytes <= cap)
    });
    KernelCharacter { placement, ..*k }
}

/// `peak / bandwidth` in FLOP/byte.
pub fn ridge_point(m: &MachineProfile, level: CacheLevel) -> f64 {
    m.peak_gflops / m.bandwidth(level)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    MemoryBound,
    ComputeBound,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bound::MemoryBound => "memory_bound",
            Bound::ComputeBound => "compute_bound",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub bound: Bound,
    pub level: CacheLevel,
    pub ridge_point: f64,
    pub attainable_gflops: f64,
}

/// Memory-bound iff the intensity is below the ridge point of the level
/// holding the working set; attainable = min(peak, ai · bandwidth).
/// An unplaced kernel is placed first.
pub fn classify(k: &KernelCharacter, m: &MachineProfile) -> Classification {
    let level = k
        .placement
        .or_else(|| place(k, m).placement)
        .unwrap_or(CacheLevel::Dram);
    let ridge = ridge_point(m, level);
    let bound = if k.ai < ridge {
        Bound::MemoryBound
    } else {
        Bound::ComputeBound
    };
    Classification {
        bound,
        level,
        ridge_point: ridge,
        attainable_gflops: m.peak_gflops.min(k.ai * m.bandwidth(level)),
    }
}

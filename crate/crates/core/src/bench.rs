//! Timing harness: warm-up, one monotonic-clock block around all
//! repetitions, and analytic GFLOP/s and GB/s from the mean step time.

use std::collections::BTreeMap;
use std::hint::black_box;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expm::Propagator;
use crate::linalg::{MatrixAoS, VectorAoS};
use crate::propagate::{KernelVariant, Stepper};
use crate::random::{random_complex, rng};
use crate::roofline::characterize;

pub const DEFAULT_REPS: usize = 50_000;
pub const DEFAULT_WARMUP: usize = 10;
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Column header of the result CSV.
pub const CSV_HEADER: &str =
    "profile,dim,variant,reps,warmup,ns_per_step,gflops,gbs,checksum_re,checksum_im";

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BenchConfig {
    pub dim: usize,
    pub variant: KernelVariant,
    pub reps: usize,
    pub warmup: usize,
    pub seed: u64,
}

impl BenchConfig {
    pub fn new(dim: usize, variant: KernelVariant) -> Self {
        Self {
            dim,
            variant,
            reps: DEFAULT_REPS,
            warmup: DEFAULT_WARMUP,
            seed: DEFAULT_SEED,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidParameter("dim must be at least 1".into()));
        }
        if self.reps == 0 {
            return Err(Error::InvalidParameter("reps must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchResult {
    pub config: BenchConfig,
    /// Optimization profile of the build that produced the timing.
    pub profile: String,
    pub ns_per_step: f64,
    pub gflops: f64,
    pub gbs: f64,
    /// Sum of the final state vector.
    pub checksum: Complex64,
}

/// One CSV/JSON row; field names match [`CSV_HEADER`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub profile: String,
    pub dim: usize,
    pub variant: KernelVariant,
    pub reps: usize,
    pub warmup: usize,
    pub ns_per_step: f64,
    pub gflops: f64,
    pub gbs: f64,
    pub checksum_re: f64,
    pub checksum_im: f64,
}

impl BenchResult {
    /// Builds a result from a mean step time, deriving the rates.
    pub fn from_timing(
        config: BenchConfig,
        profile: impl Into<String>,
        ns_per_step: f64,
        checksum: Complex64,
    ) -> Self {
        let (gflops, gbs) = derived_metrics(config.dim, ns_per_step);
        Self {
            config,
            profile: profile.into(),
            ns_per_step,
            gflops,
            gbs,
            checksum,
        }
    }

    pub fn row(&self) -> BenchRow {
        BenchRow {
            profile: self.profile.clone(),
            dim: self.config.dim,
            variant: self.config.variant,
            reps: self.config.reps,
            warmup: self.config.warmup,
            ns_per_step: self.ns_per_step,
            gflops: self.gflops,
            gbs: self.gbs,
            checksum_re: self.checksum.re,
            checksum_im: self.checksum.im,
        }
    }
}

impl BenchRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{:?},{:?},{:?},{:?},{:?}",
            self.profile,
            self.dim,
            self.variant,
            self.reps,
            self.warmup,
            self.ns_per_step,
            self.gflops,
            self.gbs,
            self.checksum_re,
            self.checksum_im
        )
    }
}

/// `(GFLOP/s, GB/s)` for one step of dimension `d` taking `ns_per_step`:
/// FLOPs per nanosecond is GFLOP/s, bytes per nanosecond is GB/s.
pub fn derived_metrics(d: usize, ns_per_step: f64) -> (f64, f64) {
    let k = characterize(d);
    (k.flops as f64 / ns_per_step, k.bytes as f64 / ns_per_step)
}

/// Seeded benchmark operands of side `n = d²`.
///
/// `P = (J + ½ R₀) / n`, where `J` is all ones and `R₀` is a matrix with
/// entries uniform in [-1, 1] (both parts) minus its column means. Column
/// sums of `P` are exactly 1, so `Σ v` is invariant under `P`; every other
/// eigenvalue has modulus at most `‖R₀‖_F / (2n) ≤ 1/√2`. Repeated
/// application therefore converges to a fixed vector and neither overflows
/// nor decays into denormals.
pub fn benchmark_operands(d: usize, seed: u64) -> (MatrixAoS, VectorAoS) {
    let n = d * d;
    let mut r = rng(seed);
    let raw = MatrixAoS::from_fn(n, n, |_, _| random_complex(&mut r));
    let mut means = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        for (m, z) in means.iter_mut().zip(raw.row(i)) {
            *m += z;
        }
    }
    let inv_n = 1.0 / n as f64;
    let p = MatrixAoS::from_fn(n, n, |i, j| {
        let centred = raw[(i, j)] - means[j] * inv_n;
        (Complex64::new(1.0, 0.0) + centred * 0.5) * inv_n
    });
    let v = VectorAoS::from_fn(n, |_| {
        let z = random_complex(&mut r);
        Complex64::new(1.0 + z.re, z.im) * inv_n
    });
    (p, v)
}

/// Smallest observable positive difference between two clock reads.
pub fn timer_resolution_ns() -> u64 {
    let mut best = u64::MAX;
    for _ in 0..200 {
        let a = Instant::now();
        let mut b = Instant::now();
        while b == a {
            b = Instant::now();
        }
        best = best.min((b - a).as_nanos() as u64);
    }
    best.max(1)
}

pub fn run_bench(config: &BenchConfig) -> Result<BenchResult> {
    config.validate()?;
    if !config.variant.is_available() {
        return Err(Error::VariantUnavailable(config.variant.name()));
    }
    let (p, v) = benchmark_operands(config.dim, config.seed);
    let prop = Propagator::from_matrix(p, 0.0)?;
    let mut stepper = Stepper::new(&prop, config.variant, &v)?;
    let resolution_ns = timer_resolution_ns();

    stepper.run(config.warmup);

    let start = Instant::now();
    for _ in 0..config.reps {
        stepper.step();
    }
    let block_ns = start.elapsed().as_nanos() as u64;
    black_box(&stepper);

    if resolution_ns.saturating_mul(10) > block_ns {
        return Err(Error::TimerResolution {
            resolution_ns,
            block_ns,
        });
    }
    let ns_per_step = block_ns as f64 / config.reps as f64;
    Ok(BenchResult::from_timing(
        *config,
        crate::build_profile(),
        ns_per_step,
        stepper.state().sum(),
    ))
}

/// Outcome of one (dim, variant) cell of a benchmark matrix.
#[derive(Clone, Debug)]
pub struct BenchCell {
    pub dim: usize,
    pub variant: KernelVariant,
    pub outcome: std::result::Result<BenchResult, String>,
}

/// Runs every (dim, variant) pair sequentially, dim-major. A failing cell is
/// recorded and the sweep continues.
pub fn run_matrix(
    dims: &[usize],
    variants: &[KernelVariant],
    reps: usize,
    warmup: usize,
    seed: u64,
) -> Vec<BenchCell> {
    let mut cells = Vec::with_capacity(dims.len() * variants.len());
    for &dim in dims {
        for &variant in variants {
            let config = BenchConfig {
                dim,
                variant,
                reps,
                warmup,
                seed,
            };
            cells.push(BenchCell {
                dim,
                variant,
                outcome: run_bench(&config).map_err(|e| e.to_string()),
            });
        }
    }
    cells
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankEntry {
    pub variant: KernelVariant,
    pub gbs: f64,
    /// Throughput relative to the slowest variant at this dim.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimRanking {
    pub dim: usize,
    pub ranking: Vec<RankEntry>,
}

/// Per-dim ordering by GB/s, fastest first; ties fall back to variant order.
pub fn compare(results: &[BenchResult]) -> Vec<DimRanking> {
    let mut by_dim: BTreeMap<usize, Vec<&BenchResult>> = BTreeMap::new();
    for r in results {
        by_dim.entry(r.config.dim).or_default().push(r);
    }
    by_dim
        .into_iter()
        .map(|(dim, mut rs)| {
            rs.sort_by(|a, b| {
                b.gbs
                    .total_cmp(&a.gbs)
                    .then(a.config.variant.cmp(&b.config.variant))
            });
            let slowest = rs.iter().map(|r| r.gbs).fold(f64::INFINITY, f64::min);
            DimRanking {
                dim,
                ranking: rs
                    .iter()
                    .map(|r| RankEntry {
                        variant: r.config.variant,
                        gbs: r.gbs,
                        ratio: r.gbs / slowest,
                    })
                    .collect(),
            }
        })
        .collect()
}

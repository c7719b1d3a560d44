//! Propagation kernels, trajectory evolution, and the piecewise-constant
//! (GRAPE-style) propagator chain.

mod batch;
mod kernels;
pub mod simd;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expm::{expm, Propagator};
use crate::linalg::{MatrixAoS, MatrixSoA, VectorAoS, VectorSoA};
use crate::lindblad::{build_lindbladian, LindbladModel};
use crate::validate::{check_state, DEFAULT_TOL};

pub use batch::{evolve_batch, evolve_batch_sequential};

/// Which matvec kernel runs. Selection is always explicit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelVariant {
    Aos,
    Soa,
    Simd,
}

impl KernelVariant {
    pub const ALL: [KernelVariant; 3] =
        [KernelVariant::Aos, KernelVariant::Soa, KernelVariant::Simd];

    pub fn name(self) -> &'static str {
        match self {
            KernelVariant::Aos => "aos",
            KernelVariant::Soa => "soa",
            KernelVariant::Simd => "simd",
        }
    }

    pub fn is_available(self) -> bool {
        match self {
            KernelVariant::Simd => simd::available(),
            _ => true,
        }
    }

    /// Variants usable in this build on this CPU.
    pub fn available() -> Vec<KernelVariant> {
        Self::ALL.into_iter().filter(|v| v.is_available()).collect()
    }

    fn ensure_available(self) -> Result<()> {
        if self.is_available() {
            Ok(())
        } else {
            Err(Error::VariantUnavailable(self.name()))
        }
    }
}

impl fmt::Display for KernelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "aos" => Ok(KernelVariant::Aos),
            "soa" => Ok(KernelVariant::Soa),
            "simd" | "avx2" => Ok(KernelVariant::Simd),
            other => Err(Error::InvalidParameter(format!(
                "unknown kernel variant `{other}`"
            ))),
        }
    }
}

fn check_matvec_shapes(rows: usize, cols: usize, v_len: usize, out_len: usize) -> Result<()> {
    if cols != v_len || rows != out_len {
        return Err(Error::shape(
            format!("{rows}x{cols} operator with input {cols} and output {rows}"),
            format!("input {v_len}, output {out_len}"),
        ));
    }
    Ok(())
}

/// Interleaved-layout matvec into a caller-provided output buffer.
pub fn step_aos_into(p: &MatrixAoS, v: &VectorAoS, out: &mut VectorAoS) -> Result<()> {
    check_matvec_shapes(p.rows(), p.cols(), v.len(), out.len())?;
    kernels::matvec_aos(p.as_slice(), v.as_slice(), out.as_mut_slice());
    Ok(())
}

pub fn step_aos(p: &MatrixAoS, v: &VectorAoS) -> Result<VectorAoS> {
    let mut out = VectorAoS::zeros(p.rows());
    step_aos_into(p, v, &mut out)?;
    Ok(out)
}

/// Split-plane matvec into a caller-provided output buffer.
pub fn step_soa_into(p: &MatrixSoA, v: &VectorSoA, out: &mut VectorSoA) -> Result<()> {
    check_matvec_shapes(p.rows(), p.cols(), v.len(), out.len())?;
    let (out_re, out_im) = out.planes_mut();
    kernels::matvec_soa(p.re(), p.im(), v.re(), v.im(), out_re, out_im);
    Ok(())
}

pub fn step_soa(p: &MatrixSoA, v: &VectorSoA) -> Result<VectorSoA> {
    let mut out = VectorSoA::zeros(p.rows());
    step_soa_into(p, v, &mut out)?;
    Ok(out)
}

/// Hand-written SIMD matvec on interleaved data; errors when the CPU or
/// build lacks AVX2/FMA.
pub fn step_simd_into(p: &MatrixAoS, v: &VectorAoS, out: &mut VectorAoS) -> Result<()> {
    KernelVariant::Simd.ensure_available()?;
    check_matvec_shapes(p.rows(), p.cols(), v.len(), out.len())?;
    // SAFETY: availability checked above.
    unsafe { simd::matvec(p.as_slice(), v.as_slice(), out.as_mut_slice()) };
    Ok(())
}

pub fn step_simd(p: &MatrixAoS, v: &VectorAoS) -> Result<VectorAoS> {
    let mut out = VectorAoS::zeros(p.rows());
    step_simd_into(p, v, &mut out)?;
    Ok(out)
}

/// One kernel application through `variant`, on AoS input and output.
pub fn step(p: &Propagator, v: &VectorAoS, variant: KernelVariant) -> Result<VectorAoS> {
    match variant {
        KernelVariant::Aos => step_aos(p.matrix_aos(), v),
        KernelVariant::Soa => Ok(step_soa(p.matrix_soa(), &v.to_soa())?.to_aos()),
        KernelVariant::Simd => step_simd(p.matrix_aos(), v),
    }
}

/// A vectorized state `vec(ρ)` in the layout a kernel consumes.
#[derive(Clone, Debug, PartialEq)]
pub enum StateVec {
    Aos(VectorAoS),
    Soa(VectorSoA),
}

impl StateVec {
    pub fn new(v: &VectorAoS, variant: KernelVariant) -> Self {
        match variant {
            KernelVariant::Soa => StateVec::Soa(v.to_soa()),
            KernelVariant::Aos | KernelVariant::Simd => StateVec::Aos(v.clone()),
        }
    }

    fn zeros_like(&self) -> Self {
        match self {
            StateVec::Aos(v) => StateVec::Aos(VectorAoS::zeros(v.len())),
            StateVec::Soa(v) => StateVec::Soa(VectorSoA::zeros(v.len())),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            StateVec::Aos(v) => v.len(),
            StateVec::Soa(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_aos(&self) -> VectorAoS {
        match self {
            StateVec::Aos(v) => v.clone(),
            StateVec::Soa(v) => v.to_aos(),
        }
    }

    /// Sum of all entries.
    pub fn sum(&self) -> Complex64 {
        match self {
            StateVec::Aos(v) => v.sum(),
            StateVec::Soa(v) => Complex64::new(v.re().iter().sum(), v.im().iter().sum()),
        }
    }
}

/// Repeated application of one propagator with two alternating buffers.
/// Nothing is allocated per step.
pub struct Stepper<'p> {
    prop: &'p Propagator,
    variant: KernelVariant,
    current: StateVec,
    scratch: StateVec,
}

impl<'p> Stepper<'p> {
    pub fn new(prop: &'p Propagator, variant: KernelVariant, initial: &VectorAoS) -> Result<Self> {
        Self::with_state(prop, variant, StateVec::new(initial, variant))
    }

    /// Continues from an existing state; its layout must match `variant`.
    pub fn with_state(
        prop: &'p Propagator,
        variant: KernelVariant,
        state: StateVec,
    ) -> Result<Self> {
        variant.ensure_available()?;
        let layout_ok = matches!(
            (&state, variant),
            (StateVec::Soa(_), KernelVariant::Soa)
                | (StateVec::Aos(_), KernelVariant::Aos | KernelVariant::Simd)
        );
        let state = if layout_ok {
            state
        } else {
            StateVec::new(&state.to_aos(), variant)
        };
        let n = prop.size();
        check_matvec_shapes(n, n, state.len(), n)?;
        let scratch = state.zeros_like();
        Ok(Self {
            prop,
            variant,
            current: state,
            scratch,
        })
    }

    pub fn variant(&self) -> KernelVariant {
        self.variant
    }

    /// One kernel call followed by a buffer swap.
    #[inline]
    pub fn step(&mut self) {
        match (&self.current, &mut self.scratch) {
            (StateVec::Aos(v), StateVec::Aos(out)) => match self.variant {
                KernelVariant::Simd => {
                    // SAFETY: availability checked in `with_state`.
                    unsafe {
                        simd::matvec(
                            self.prop.matrix_aos().as_slice(),
                            v.as_slice(),
                            out.as_mut_slice(),
                        )
                    }
                }
                _ => kernels::matvec_aos(
                    self.prop.matrix_aos().as_slice(),
                    v.as_slice(),
                    out.as_mut_slice(),
                ),
            },
            (StateVec::Soa(v), StateVec::Soa(out)) => {
                let p = self.prop.matrix_soa();
                let (out_re, out_im) = out.planes_mut();
                kernels::matvec_soa(p.re(), p.im(), v.re(), v.im(), out_re, out_im);
            }
            _ => unreachable!("buffers share a layout by construction"),
        }
        std::mem::swap(&mut self.current, &mut self.scratch);
    }

    #[inline]
    pub fn run(&mut self, n_steps: usize) {
        for _ in 0..n_steps {
            self.step();
        }
    }

    pub fn state(&self) -> &StateVec {
        &self.current
    }

    pub fn into_state(self) -> StateVec {
        self.current
    }
}

fn check_initial_state(rho0: &MatrixAoS, prop: &Propagator) -> Result<()> {
    if !rho0.is_square() {
        return Err(Error::NotSquare {
            rows: rho0.rows(),
            cols: rho0.cols(),
        });
    }
    let d = rho0.rows();
    if d * d != prop.size() {
        return Err(Error::shape(
            format!("{0}x{0} propagator", d * d),
            prop.matrix_aos().shape_str(),
        ));
    }
    let report = check_state(rho0, DEFAULT_TOL)?;
    if !report.passed {
        return Err(Error::InvalidState(report));
    }
    Ok(())
}

/// `unvec(Pⁿ vec(ρ₀))` by `n_steps` kernel applications.
pub fn evolve(
    p: &Propagator,
    rho0: &MatrixAoS,
    n_steps: usize,
    variant: KernelVariant,
) -> Result<MatrixAoS> {
    check_initial_state(rho0, p)?;
    let mut stepper = Stepper::new(p, variant, &crate::linalg::vec(rho0)?)?;
    stepper.run(n_steps);
    stepper.into_state().to_aos().into_matrix()
}

/// Wall-clock split of a piecewise-constant propagator chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChainTimings {
    pub build_ms: f64,
    pub chain_ms: f64,
    pub segments: usize,
    pub steps_per_segment: usize,
    pub points_per_s: f64,
}

impl ChainTimings {
    pub fn new(build_ms: f64, chain_ms: f64, segments: usize, steps_per_segment: usize) -> Self {
        Self {
            build_ms,
            chain_ms,
            segments,
            steps_per_segment,
            points_per_s: 1000.0 / (build_ms + chain_ms),
        }
    }

    /// Fraction of the total spent building propagators.
    pub fn build_fraction(&self) -> f64 {
        self.build_ms / (self.build_ms + self.chain_ms)
    }
}

/// Piecewise-constant pulse `H_j = H_0 + a_j H_c` over the model's
/// dissipators: per segment one Lindbladian build and one `expm` (timed as
/// build), then `steps_per_segment` kernel steps (timed as chain).
pub fn grape_chain(
    model: &LindbladModel,
    control: &MatrixAoS,
    amplitudes: &[f64],
    steps_per_segment: usize,
    dt: f64,
    rho0: &MatrixAoS,
    variant: KernelVariant,
) -> Result<(MatrixAoS, ChainTimings)> {
    if amplitudes.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one pulse segment is required".into(),
        ));
    }
    let d = model.dim();
    if control.rows() != d || control.cols() != d {
        return Err(Error::shape(
            format!("{d}x{d} control hamiltonian"),
            control.shape_str(),
        ));
    }
    variant.ensure_available()?;

    let mut state = StateVec::new(&crate::linalg::vec(rho0)?, variant);
    let mut build_ms = 0.0;
    let mut chain_ms = 0.0;
    let mut first = true;

    for &amp in amplitudes {
        let t0 = Instant::now();
        let mut h = model.hamiltonian().clone();
        h.add_scaled_assign(Complex64::new(amp, 0.0), control)?;
        let segment_model = model.with_hamiltonian(h)?;
        let prop = expm(build_lindbladian(&segment_model).matrix(), dt)?;
        build_ms += t0.elapsed().as_secs_f64() * 1e3;

        if first {
            check_initial_state(rho0, &prop)?;
            first = false;
        }
        let mut stepper = Stepper::with_state(&prop, variant, state)?;
        let t1 = Instant::now();
        stepper.run(steps_per_segment);
        chain_ms += t1.elapsed().as_secs_f64() * 1e3;
        state = stepper.into_state();
    }

    let rho = state.to_aos().into_matrix()?;
    Ok((
        rho,
        ChainTimings::new(build_ms, chain_ms, amplitudes.len(), steps_per_segment),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, random_vector, rng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Naive reference: plain double loop over complex multiplication.
    fn naive(p: &MatrixAoS, v: &VectorAoS) -> VectorAoS {
        VectorAoS::from_fn(p.rows(), |i| {
            (0..p.cols()).map(|j| p[(i, j)] * v.as_slice()[j]).sum()
        })
    }

    #[test]
    fn identity_leaves_vector_unchanged() {
        let mut r = rng(51);
        let v = random_vector(&mut r, 9);
        let id = MatrixAoS::identity(9);
        assert_eq!(step_aos(&id, &v).unwrap(), v);
        assert_eq!(step_soa(&id.to_soa(), &v.to_soa()).unwrap().to_aos(), v);
        if KernelVariant::Simd.is_available() {
            assert_eq!(step_simd(&id, &v).unwrap(), v);
        }
    }

    #[test]
    fn scalar_case() {
        let p = MatrixAoS::from_row_major(1, 1, &[c(2.0, 1.0)]).unwrap();
        let v = VectorAoS::from_slice(&[c(1.0, -1.0)]);
        assert_eq!(step_aos(&p, &v).unwrap().as_slice(), &[c(3.0, -1.0)]);
        assert_eq!(
            step_soa(&p.to_soa(), &v.to_soa())
                .unwrap()
                .to_aos()
                .as_slice(),
            &[c(3.0, -1.0)]
        );
        if KernelVariant::Simd.is_available() {
            assert_eq!(step_simd(&p, &v).unwrap().as_slice(), &[c(3.0, -1.0)]);
        }
    }

    #[test]
    fn kernels_match_naive_loop() {
        let mut r = rng(52);
        for n in [1, 2, 9, 10, 81] {
            let p = random_matrix(&mut r, n, n);
            let v = random_vector(&mut r, n);
            let reference = naive(&p, &v);
            assert!(step_aos(&p, &v).unwrap().rel_error(&reference) < 1e-13);
            assert!(
                step_soa(&p.to_soa(), &v.to_soa())
                    .unwrap()
                    .to_aos()
                    .rel_error(&reference)
                    < 1e-13
            );
            if KernelVariant::Simd.is_available() {
                assert!(step_simd(&p, &v).unwrap().rel_error(&reference) < 1e-13);
            }
        }
    }

    #[test]
    fn zero_vector_maps_to_zero() {
        let mut r = rng(53);
        let p = random_matrix(&mut r, 9, 9);
        let out = step_soa(&p.to_soa(), &VectorSoA::zeros(9)).unwrap();
        assert!(out.re().iter().chain(out.im()).all(|&x| x == 0.0));
    }

    #[test]
    fn shape_errors() {
        let p = MatrixAoS::identity(4);
        assert!(matches!(
            step_aos(&p, &VectorAoS::zeros(3)),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(matches!(
            step_soa(&p.to_soa(), &VectorSoA::zeros(5)),
            Err(Error::ShapeMismatch { .. })
        ));
        let mut out = VectorAoS::zeros(3);
        assert!(step_aos_into(&p, &VectorAoS::zeros(4), &mut out).is_err());
    }

    #[test]
    fn rectangular_operator() {
        let mut r = rng(54);
        let p = random_matrix(&mut r, 3, 5);
        let v = random_vector(&mut r, 5);
        let got = step_aos(&p, &v).unwrap();
        assert_eq!(got.len(), 3);
        assert!(got.rel_error(&naive(&p, &v)) < 1e-14);
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("SoA".parse::<KernelVariant>().unwrap(), KernelVariant::Soa);
        assert_eq!(
            "avx2".parse::<KernelVariant>().unwrap(),
            KernelVariant::Simd
        );
        assert!("gpu".parse::<KernelVariant>().is_err());
        assert!(
            KernelVariant::Aos < KernelVariant::Soa && KernelVariant::Soa < KernelVariant::Simd
        );
    }

    #[test]
    fn evolve_zero_steps_and_zero_generator() {
        let mut r = rng(55);
        let rho = crate::random::random_density(&mut r, 3);
        let p = expm(&MatrixAoS::zeros(9, 9), 0.1).unwrap();
        for variant in KernelVariant::available() {
            assert_eq!(evolve(&p, &rho, 0, variant).unwrap(), rho);
            assert!(evolve(&p, &rho, 25, variant).unwrap().rel_error(&rho) < 1e-14);
        }
    }

    #[test]
    fn evolve_rejects_bad_initial_state() {
        let p = expm(&MatrixAoS::zeros(4, 4), 0.1).unwrap();
        let not_unit_trace = MatrixAoS::identity(2);
        assert!(matches!(
            evolve(&p, &not_unit_trace, 1, KernelVariant::Aos),
            Err(Error::InvalidState(_))
        ));
        let wrong_dim = MatrixAoS::diag(&[c(1.0, 0.0)]);
        assert!(matches!(
            evolve(&p, &wrong_dim, 1, KernelVariant::Aos),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn chain_timings_identity() {
        let t = ChainTimings::new(0.86, 0.12, 100, 20);
        assert!((t.points_per_s - 1000.0 / 0.98).abs() < 1e-9);
        assert!((t.build_fraction() - 0.86 / 0.98).abs() < 1e-12);
    }
}

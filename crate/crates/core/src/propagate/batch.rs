//! Many independent trajectories under one shared, read-only propagator.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::{evolve, KernelVariant};
use crate::error::Result;
use crate::expm::Propagator;
use crate::linalg::MatrixAoS;

/// Evolves every initial state for `n_steps`. Trajectories run on the rayon
/// pool when the `parallel` feature is enabled, sequentially otherwise; each
/// trajectory is itself single-threaded and results keep input order.
pub fn evolve_batch(
    p: &Propagator,
    initial: &[MatrixAoS],
    n_steps: usize,
    variant: KernelVariant,
) -> Result<Vec<MatrixAoS>> {
    #[cfg(feature = "parallel")]
    {
        initial
            .par_iter()
            .map(|rho| evolve(p, rho, n_steps, variant))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        evolve_batch_sequential(p, initial, n_steps, variant)
    }
}

pub fn evolve_batch_sequential(
    p: &Propagator,
    initial: &[MatrixAoS],
    n_steps: usize,
    variant: KernelVariant,
) -> Result<Vec<MatrixAoS>> {
    initial
        .iter()
        .map(|rho| evolve(p, rho, n_steps, variant))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expm::expm;
    use crate::lindblad::build_lindbladian;
    use crate::random::{random_density, random_model, rng};

    #[test]
    fn batch_matches_sequential_and_single() {
        let mut r = rng(61);
        let model = random_model(&mut r, 3, 2);
        let p = expm(build_lindbladian(&model).matrix(), 0.01).unwrap();
        let states: Vec<_> = (0..6).map(|_| random_density(&mut r, 3)).collect();
        let par = evolve_batch(&p, &states, 40, KernelVariant::Soa).unwrap();
        let seq = evolve_batch_sequential(&p, &states, 40, KernelVariant::Soa).unwrap();
        assert_eq!(par, seq);
        assert_eq!(
            par[4],
            evolve(&p, &states[4], 40, KernelVariant::Soa).unwrap()
        );
    }

    #[test]
    fn batch_propagates_errors() {
        let p = expm(&MatrixAoS::zeros(4, 4), 0.1).unwrap();
        let states = vec![
            MatrixAoS::diag(&[1.0.into(), 0.0.into()]),
            MatrixAoS::identity(2),
        ];
        assert!(evolve_batch(&p, &states, 1, KernelVariant::Aos).is_err());
        assert!(evolve_batch(&p, &[], 1, KernelVariant::Aos)
            .unwrap()
            .is_empty());
    }
}

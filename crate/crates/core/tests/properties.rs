//! Randomized invariants: transform unitarity and Parseval's identity,
//! structural properties of the covariance assembly, and mask bookkeeping.

mod common;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use jsarma::estimation::{assemble_block_toeplitz, lag_covariances};
use jsarma::sim::generate_mask;
use jsarma::spectral::{jft, joint_basis, joint_laplacian, jpsd_of};
use jsarma::MaskedRealizations;

use common::{basis, ring_spectrum, vi_a1_params};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn joint_basis_is_unitary(n in 2usize..=10, t in 2usize..=10) {
        let gs = ring_spectrum(n);
        let tb = basis(t);
        let uj = joint_basis(&gs, &tb);
        let gram = uj.adjoint() * &uj;
        let eye = DMatrix::<Complex64>::identity(n * t, n * t);
        prop_assert!((gram - eye).norm() <= 1e-10);
    }

    #[test]
    fn jft_preserves_energy(n in 2usize..=8, t in 2usize..=8, seed in 0u64..1000) {
        let gs = ring_spectrum(n);
        let tb = basis(t);
        let zeta0 = vi_a1_params();
        let x = jsarma::sim::simulate_spectral(&zeta0, &gs, &tb, seed).unwrap();
        let xh = jft(&x, &gs, &tb).unwrap();
        prop_assert!((x.norm() - xh.norm()).abs() <= 1e-10 * x.norm().max(1.0));
    }

    #[test]
    fn joint_laplacian_diagonalized_by_joint_basis(n in 2usize..=6, t in 2usize..=6) {
        let gs = ring_spectrum(n);
        let tb = basis(t);
        let lap_g = {
            // rebuild L_G from the spectrum: U diag(lambda) U^T
            let lam = DMatrix::from_diagonal(gs.eigenvalues());
            gs.basis() * lam * gs.basis().transpose()
        };
        let lj = joint_laplacian(&lap_g, t).map(|v| Complex64::new(v, 0.0));
        let uj = joint_basis(&gs, &tb);
        let d = uj.adjoint() * lj * &uj;
        // off-diagonal residual
        let mut off = 0.0f64;
        for i in 0..n * t {
            for j in 0..n * t {
                if i != j {
                    off += d[(i, j)].norm_sqr();
                }
            }
        }
        prop_assert!(off.sqrt() <= 1e-8 * d.norm().max(1.0));
        // eigenvalues real and consistent with the additive structure
        for i in 0..n * t {
            prop_assert!(d[(i, i)].im.abs() <= 1e-8);
        }
    }

    #[test]
    fn assembled_covariance_is_symmetric_block_toeplitz(
        n in 2usize..=6, t in 2usize..=8, l in 1usize..=4, seed in 0u64..1000,
    ) {
        let gs = ring_spectrum(n);
        let tb = basis(t);
        let zeta0 = vi_a1_params();
        let data: Vec<_> = (0..l)
            .map(|i| jsarma::sim::simulate_spectral(&zeta0, &gs, &tb, seed + i as u64).unwrap())
            .collect();
        let obs = MaskedRealizations::fully_observed(data).unwrap();
        let cov = assemble_block_toeplitz(&lag_covariances(&obs, false)).unwrap();
        let m = cov.matrix();
        prop_assert!((m - m.transpose()).norm() <= 1e-12 * m.norm().max(1.0));
        // block(t, u) depends only on |t - u|
        for dt in 0..t {
            let b0 = cov.block(dt, 0);
            for u in 0..t - dt {
                prop_assert!((cov.block(u + dt, u) - &b0).norm() <= 1e-12 * b0.norm().max(1.0));
            }
        }
    }

    #[test]
    fn generated_masks_hit_requested_counts(
        n in 2usize..=10, t in 2usize..=10, l in 1usize..=5,
        ratio in 0.0f64..0.8, seed in 0u64..1000,
    ) {
        let masks = generate_mask(n, t, l, ratio, seed).unwrap();
        prop_assert_eq!(masks.len(), l);
        let want_missing = ((n * t) as f64 * ratio).round() as usize;
        for mask in &masks {
            let missing = mask.iter().filter(|&&m| !m).count();
            prop_assert_eq!(missing, want_missing);
        }
    }

    #[test]
    fn model_jpsd_is_nonnegative(n in 2usize..=8, t in 2usize..=8) {
        let gs = ring_spectrum(n);
        let tb = basis(t);
        let h = jpsd_of(&vi_a1_params(), &gs, &tb).unwrap();
        prop_assert!(h.values().iter().all(|&v| v >= 0.0));
    }
}

use super::*;
use crate::linalg::max_abs;
use crate::model::{principal_bands_angles, ModelParams};
use crate::star::{ProductKind, StarCoefficients};
use proptest::prelude::*;

const DJ: [u32; 4] = [11, 21, 41, 81];

fn plus() -> Band {
    Band::new(1, 1).unwrap()
}

fn minus() -> Band {
    Band::new(1, -1).unwrap()
}

fn calibrated() -> StarCoefficients {
    StarCoefficients::calibrated(ProductKind::Moyal).unwrap()
}

fn printed() -> StarCoefficients {
    StarCoefficients::printed(ProductKind::Moyal)
}

#[test]
fn band_limit_follows_gap() {
    assert_eq!(symbol_band_limit(0.0).unwrap(), MIN_SYMBOL_LMAX);
    let l2 = symbol_band_limit(0.2).unwrap();
    assert_eq!(l2, symbol_band_limit(0.8).unwrap());
    assert!(symbol_band_limit(0.35).unwrap() > l2);
    assert!(matches!(symbol_band_limit(0.45), Err(Error::GapTooSmall { .. })));
    assert!(matches!(symbol_band_limit(0.5), Err(Error::GapTooSmall { .. })));
    let p = projector_symbol(0.2, plus(), l2);
    assert!(p.tail_above(l2 - 4) < 1e-9);
}

#[test]
fn decoupled_projection_is_constant() {
    for co in [calibrated(), printed()] {
        let mp = moyal_projection(0.0, plus(), 1, &co).unwrap();
        assert!(mp.terms[0].tail_above(0) < 1e-13);
        assert!(mp.idempotency_residual < 1e-12 || co.set == CoefficientSet::Printed);
        assert!(mp.commutator_residual < 1e-12);
    }
    let r = almost_invariance_norms(&[5, 9], 0.0, plus(), 0, &calibrated()).unwrap();
    assert!(r.series.values.iter().all(|&v| v < 1e-12));
}

use crate::star::CoefficientSet;

#[test]
fn principal_projection_properties() {
    let lmax = symbol_band_limit(0.2).unwrap();
    let p = projector_symbol(0.2, plus(), lmax);
    let q = projector_symbol(0.2, minus(), lmax);
    let grid = crate::sphere::shared_grid(2 * lmax + 4);
    let pp = crate::sphere::product(&p, &p).unwrap().sub(&p.with_lmax(2 * lmax));
    assert!(pp.sup_norm(&grid).unwrap() < 1e-10);
    let one = SphereSymbol::constant(&identity(2));
    assert!(p.add(&q).sub(&one.with_lmax(lmax)).sup_norm(&grid).unwrap() < 1e-10);
}

#[test]
fn order_one_projection_equations() {
    let mp = moyal_projection(0.2, plus(), 1, &calibrated()).unwrap();
    // the calibrated symmetric coefficients are zero up to fit noise
    assert!(mp.idempotency_residual < 1e-4, "{}", mp.idempotency_residual);
    assert!(mp.commutator_residual < 1e-10);
    let exact = StarCoefficients {
        first: crate::star::FirstOrder {
            product: 0.0,
            laplacian: 0.0,
            gradient: 0.0,
            poisson: 1.0,
        },
        ..calibrated()
    };
    let mp = moyal_projection(0.2, plus(), 1, &exact).unwrap();
    assert!(mp.idempotency_residual < 1e-10);
    let printed = moyal_projection(0.2, plus(), 1, &printed()).unwrap();
    // the printed product term breaks idempotency at first order
    assert!(printed.idempotency_residual > 0.1);
    assert!(matches!(
        moyal_projection(0.2, plus(), 2, &calibrated()),
        Err(Error::UnsupportedOrder(2))
    ));
}

#[test]
fn almost_invariance_slopes() {
    // for spin one half the first-order commutator term vanishes identically,
    // so the principal projection is already second order
    let r0 = almost_invariance_norms(&DJ, 0.2, plus(), 0, &calibrated()).unwrap();
    assert!(r0.series.fit.within(-2.0, 0.3), "{:?}", r0.series);
    let r1 = almost_invariance_norms(&DJ, 0.2, plus(), 1, &calibrated()).unwrap();
    assert!(r1.series.fit.within(-2.0, 0.3), "{:?}", r1.series);
}

#[test]
fn quantized_projection_is_nearly_idempotent() {
    let r = projection_spectrum_defect(&DJ, 0.2, plus(), 1, &calibrated()).unwrap();
    assert!(r.series.fit.within(-2.0, 0.3), "{:?}", r.series);
}

#[test]
fn exact_ranks() {
    let pure = exact_band_projection(&ModelParams::new(2, 1, 1.0).unwrap()).unwrap();
    assert_eq!(pure.ranks(), vec![4, 2]);
    for two_j in 4..=10u32 {
        let d = two_j as usize + 1;
        let strong = exact_band_projection(&ModelParams::new(two_j, 1, 0.8).unwrap()).unwrap();
        assert_eq!(strong.ranks(), vec![d + 1, d - 1]);
        let weak = exact_band_projection(&ModelParams::new(two_j, 1, 0.2).unwrap()).unwrap();
        assert_eq!(weak.ranks(), vec![d, d]);
        let c = weak.cluster(plus());
        assert!(max_abs(&(&c.projector * &c.projector - &c.projector)) < 1e-10);
    }
    let s1 = exact_band_projection(&ModelParams::new(8, 2, 0.8).unwrap()).unwrap();
    assert_eq!(s1.ranks(), vec![11, 9, 7]);
}

#[test]
fn ambiguous_clusters_are_refused() {
    assert!(matches!(
        exact_band_projection(&ModelParams::new(6, 1, 0.5).unwrap()),
        Err(Error::AmbiguousClusters { .. })
    ));
}

#[test]
fn two_paths_agree() {
    let points = [(std::f64::consts::FRAC_PI_2, 0.3), (0.7, 1.0), (2.5, 4.0), (0.05, 2.0)];
    for co in [calibrated(), printed()] {
        for band in [plus(), minus()] {
            for (a, b) in two_path_h1(0.2, band, &co, &points).unwrap() {
                assert!((a - b).norm() < 1e-8, "{a} {b}");
                assert!(a.im.abs() < 1e-12);
            }
        }
    }
}

#[test]
fn decoupled_h1_vanishes() {
    for co in [calibrated(), printed()] {
        for (t, p) in [(0.3, 0.1), (1.5, 2.0), (3.0, 5.0)] {
            assert_eq!(h1_closed_form(t, p, 0.0, plus(), &co.first).norm(), 0.0);
            assert_eq!(h1_printed(t, 0.0, plus()), 0.0);
        }
        let eff = effective_hamiltonian(0.0, plus(), 1, HPath::ClosedForm, &co).unwrap();
        assert_eq!(eff.terms[1].max_coeff(), 0.0);
    }
}

#[test]
fn effective_leading_term() {
    let eff = effective_hamiltonian(0.2, minus(), 1, HPath::StarMachinery, &calibrated()).unwrap();
    for (t, p) in [(0.4, 1.0), (2.0, 3.0)] {
        let n = crate::model::spectral_distance(t, 0.2);
        let h0 = eff.h0_block(t, p);
        assert!((h0[(1, 1)].re + n / 2.0).abs() < 1e-10);
        assert_eq!(h0[(0, 0)].norm(), 0.0);
    }
}

#[test]
fn effective_hamiltonian_preconditions() {
    let co = calibrated();
    assert!(matches!(
        effective_hamiltonian(0.8, plus(), 1, HPath::ClosedForm, &co),
        Err(Error::GaugeSingular(_))
    ));
    assert!(effective_hamiltonian(0.2, Band::new(2, 0).unwrap(), 1, HPath::ClosedForm, &co).is_err());
    assert!(effective_hamiltonian(0.2, Band::new(2, 0).unwrap(), 1, HPath::StarMachinery, &co).is_ok());
    assert!("star".parse::<HPath>().is_ok());
    assert!("other".parse::<HPath>().is_err());
}

#[test]
fn band_spectrum_slopes() {
    let co = calibrated();
    let r0 = band_spectrum_compare(&DJ, 0.2, plus(), 0, HPath::StarMachinery, &co).unwrap();
    assert!(r0.series.fit.within(-1.0, 0.3), "{:?}", r0.series);
    let r1 = band_spectrum_compare(&DJ, 0.2, plus(), 1, HPath::StarMachinery, &co).unwrap();
    assert!(r1.series.fit.within(-2.0, 0.4), "{:?}", r1.series);
    let flat = band_spectrum_compare(&[5, 9], 0.0, plus(), 1, HPath::ClosedForm, &co).unwrap();
    assert!(flat.series.values.iter().all(|&v| v < 1e-12));
}

#[test]
fn precession_fixes_orientation() {
    // E = n3 turns points counterclockwise about e3, so that
    // n1 o Phi_t = n1 cos t - n2 sin t, as in the Heisenberg picture
    let e3 = |n: [f64; 3]| (n[2], [0.0, 0.0, 1.0]);
    let flow = classical_flow(&e3, [1.0, 0.0, 0.0], 1.0, 1e-3).unwrap();
    let end = flow.end();
    assert!((end[0] - 1f64.cos()).abs() < 1e-10);
    assert!((end[1] - 1f64.sin()).abs() < 1e-10);
    let full = flow_endpoint(&e3, [1.0, 0.0, 0.0], std::f64::consts::TAU, 1e-3)
        .unwrap()
        .0;
    assert!((full[0] - 1.0).abs() < 1e-10 && full[1].abs() < 1e-10);

    let d = 61u32;
    let kernel = crate::sw::SwKernel::spectral(d - 1);
    let h = kernel.quantize(&SphereSymbol::coordinate(2));
    let u = crate::linalg::expi_hermitian(&h, TIME_SCALE * d as f64);
    let o = kernel.dequantize(&(&u * kernel.quantize(&SphereSymbol::coordinate(0)) * u.adjoint()));
    let (t, p) = (1.1, 0.4);
    let n = crate::spin::unit_vector(t, p);
    let classical = n[0] * 1f64.cos() - n[1] * 1f64.sin();
    assert!((o.evaluate_scalar(t, p).re - classical).abs() < 0.05);
}

#[test]
fn constant_energy_does_not_move() {
    let flat = band_energy(0.0, plus());
    let n0 = crate::spin::unit_vector(0.8, 2.0);
    let flow = classical_flow(&flat, n0, 1.0, 1e-3).unwrap();
    assert!(flow
        .trajectory
        .iter()
        .all(|n| (0..3).all(|a| (n[a] - n0[a]).abs() < 1e-15)));
}

#[test]
fn band_flow_conserves_invariants() {
    let e = band_energy(0.2, plus());
    let n0 = crate::spin::unit_vector(1.0, 0.3);
    let flow = classical_flow(&e, n0, 10.0, 1e-3).unwrap();
    assert!(flow.max_norm_drift < 1e-10);
    assert!(flow.max_energy_drift < 1e-8);
    assert!(flow.trajectory.iter().all(|n| (n[2] - n0[2]).abs() < 1e-10));
    assert_eq!(flow.times.len(), 10001);
    assert!(classical_flow(&e, [1.0, 1.0, 0.0], 1.0, 1e-3).is_err());
}

#[test]
fn egorov_slopes() {
    let co = calibrated();
    let r = egorov_error(&DJ, 0.2, plus(), 1, &SphereSymbol::coordinate(0), 1.0, 1e-3, &co).unwrap();
    assert!(r.series.fit.within(-1.0, 0.3), "{:?}", r.series);
    assert!(r.max_energy_drift < 1e-8);
    assert!(r.max_norm_drift < 1e-10);
    let one = SphereSymbol::scalar_constant(crate::linalg::c(1.0));
    let r = egorov_error(&[11, 21], 0.2, plus(), 1, &one, 1.0, 1e-3, &co).unwrap();
    assert!(r.series.values.iter().all(|&v| v < 1e-10));
}

#[test]
fn axisymmetric_observable() {
    let co = calibrated();
    let r = egorov_error(&DJ, 0.2, plus(), 1, &SphereSymbol::coordinate(2), 1.0, 1e-3, &co).unwrap();
    assert!(r.series.values.iter().all(|&v| v < 1e-10), "{:?}", r.series.values);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reference_unitary_rotates_projector(theta in 0.01..3.1f64, phi in 0.0..std::f64::consts::TAU, lambda in 0.0..0.45f64) {
        let slice = principal_bands_angles(theta, phi, lambda, 1);
        for band in [plus(), minus()] {
            let p = &slice.projectors[band.index()];
            let r = &slice.u0 * p * slice.u0.adjoint();
            prop_assert!(max_abs(&(r - crate::model::reference_projector(band))) < 1e-12);
        }
    }
}

#[test]
fn spin_one_projection_is_first_order() {
    let r = almost_invariance_norms(&DJ, 0.2, Band::new(2, 0).unwrap(), 0, &calibrated()).unwrap();
    assert!(r.series.fit.within(-1.0, 0.3), "{:?}", r.series);
}

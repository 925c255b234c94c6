use sphere_sapt::linalg::c;
use sphere_sapt::model::Band;
use sphere_sapt::sapt::{
    almost_invariance_norms, band_spectrum_compare, effective_hamiltonian, egorov_error, two_path_h1, HPath,
};
use sphere_sapt::sphere::SphereSymbol;
use sphere_sapt::star::{random_corpus, star_scaling, ProductKind, StarCoefficients};

fn coeffs() -> StarCoefficients {
    StarCoefficients::calibrated(ProductKind::Moyal).unwrap()
}

#[test]
fn truncations_improve_with_order() {
    let corpus = random_corpus(3, 2, 3);
    let r = star_scaling(ProductKind::Moyal, &coeffs(), &[11, 21, 41], &corpus, 1).unwrap();
    for i in 0..3 {
        assert!(r.truncations[1].errors[i] < r.truncations[0].errors[i]);
    }
    assert!(r.truncations[1].fit.slope < r.truncations[0].fit.slope - 0.7);
}

#[test]
fn decoupled_model_is_exact_at_every_order() {
    let band = Band::new(1, 1).unwrap();
    let inv = almost_invariance_norms(&[5, 9], 0.0, band, 1, &coeffs()).unwrap();
    assert!(inv.series.values.iter().all(|&v| v < 1e-12));
    let spectra = band_spectrum_compare(&[5, 9], 0.0, band, 1, HPath::ClosedForm, &coeffs()).unwrap();
    assert!(spectra.series.values.iter().all(|&v| v < 1e-12));
    let eff = effective_hamiltonian(0.0, band, 1, HPath::ClosedForm, &coeffs()).unwrap();
    assert_eq!(eff.terms[1].max_coeff(), 0.0);
}

#[test]
fn effective_hamiltonian_routes_agree() {
    let pts = [(0.9, 0.2), (2.2, 5.0)];
    for band in Band::all(1) {
        for (a, b) in two_path_h1(0.3, band, &coeffs(), &pts).unwrap() {
            assert!((a - b).norm() < 1e-8);
        }
    }
}

#[test]
fn constants_do_not_evolve() {
    let one = SphereSymbol::scalar_constant(c(1.0));
    let r = egorov_error(&[9, 17], 0.2, Band::new(1, -1).unwrap(), 1, &one, 0.5, 1e-3, &coeffs()).unwrap();
    assert!(r.series.values.iter().all(|&v| v < 1e-10));
}

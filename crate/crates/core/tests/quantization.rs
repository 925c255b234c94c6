use num_complex::Complex64;
use sphere_sapt::linalg::{c, max_abs, CMat};
use sphere_sapt::model::{build_hamiltonian, exact_lower_symbol, exact_symbol, ModelParams};
use sphere_sapt::sphere::{shared_grid, SphereSymbol};
use sphere_sapt::spin::make_irrep;
use sphere_sapt::star::star_exact;
use sphere_sapt::sw::{build_kernel, kernel_residuals, lower_symbol, SwKernel};

#[test]
fn sampled_kernel_satisfies_axioms() {
    for two_j in [1u32, 4, 7] {
        let k = build_kernel(&make_irrep(two_j), shared_grid(2 * two_j as usize + 2)).unwrap();
        let r = kernel_residuals(&k, 20, 99).unwrap();
        assert!(r.max() < 1e-10, "{two_j}: {r:?}");
    }
}

#[test]
fn star_product_is_the_pulled_back_operator_product() {
    let k = SwKernel::spectral(6);
    let f = SphereSymbol::harmonic(2, 1).add(&SphereSymbol::coordinate(0));
    let g = SphereSymbol::harmonic(3, -1).scale(Complex64::new(0.0, 0.5));
    let lhs = k.quantize(&star_exact(&f, &g, &k));
    let rhs = k.quantize(&f) * k.quantize(&g);
    assert!(max_abs(&(lhs - rhs)) < 1e-12);
}

#[test]
fn hamiltonian_symbols_are_exact() {
    for two_j in [3u32, 8] {
        let k = SwKernel::spectral(two_j);
        for lambda in [0.0, 0.35, 1.0] {
            let p = ModelParams::new(two_j, 1, lambda).unwrap();
            let h = build_hamiltonian(&p);
            assert!(k.dequantize(&h).sub(&exact_symbol(&p)).max_coeff() < 1e-10);
            assert!(lower_symbol(&h, two_j).sub(&exact_lower_symbol(&p)).max_coeff() < 1e-10);
            assert!(max_abs(&(k.quantize(&exact_symbol(&p)) - &h)) < 1e-10);
        }
    }
}

#[test]
fn decoupled_hamiltonian_is_spin_z() {
    let p = ModelParams::new(4, 1, 0.0).unwrap();
    let h = build_hamiltonian(&p);
    let s3 = CMat::from_row_slice(2, 2, &[c(0.5), c(0.0), c(0.0), c(-0.5)]);
    assert!(max_abs(&(h - CMat::identity(5, 5).kronecker(&s3))) < 1e-15);
}

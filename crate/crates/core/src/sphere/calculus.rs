//! Pointwise products and the gradient bilinears of the star-product
//! expansions, formed on a quadrature grid and re-analyzed.
//!
//! Tangential gradients are handled through `n x grad = i L`, so that
//! `grad f . grad g = -L f . L g` and `n . (grad f x grad g) = -n . (L f x L g)`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::shared_grid;
use super::symbol::{GridField, SphereSymbol};
use crate::error::Result;
use crate::linalg::small_matmul_acc;

/// Samples several symbols on one grid and combines them node by node.
fn combine(
    inputs: &[&SphereSymbol],
    k_out: usize,
    degree: usize,
    lmax_out: usize,
    f: impl Fn([f64; 3], &[&[Complex64]], &mut [Complex64]) + Sync,
) -> Result<SphereSymbol> {
    // integrand of each output coefficient has degree `degree + lmax_out`
    let grid = shared_grid(degree + lmax_out);
    let fields: Vec<GridField> = inputs.iter().map(|s| s.synthesize(&grid)).collect::<Result<_>>()?;
    let kk = k_out * k_out;
    let samples: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .flat_map_iter(|node| {
            let vals: Vec<&[Complex64]> = fields.iter().map(|fl| fl.at(node)).collect();
            let mut out = vec![Complex64::new(0.0, 0.0); kk];
            f(grid.point(node), &vals, &mut out);
            out
        })
        .collect();
    SphereSymbol::analyze(&GridField { k: k_out, samples }, &grid, lmax_out)
}

/// Pointwise product `f(n) g(n)` in the written order.
pub fn product(f: &SphereSymbol, g: &SphereSymbol) -> Result<SphereSymbol> {
    product_limited(f, g, f.lmax() + g.lmax())
}

/// Pointwise product keeping only `l <= lmax_out`.
pub fn product_limited(f: &SphereSymbol, g: &SphereSymbol, lmax_out: usize) -> Result<SphereSymbol> {
    assert_eq!(f.k(), g.k(), "matrix size mismatch");
    let k = f.k();
    combine(&[f, g], k, f.lmax() + g.lmax(), lmax_out, |_, v, out| {
        small_matmul_acc(k, v[0], v[1], out)
    })
}

/// Product of a scalar symbol with a matrix-valued one.
pub fn scalar_product(s: &SphereSymbol, g: &SphereSymbol, lmax_out: usize) -> Result<SphereSymbol> {
    assert!(s.is_scalar());
    combine(&[s, g], g.k(), s.lmax() + g.lmax(), lmax_out, |_, v, out| {
        let z = v[0][0];
        out.iter_mut().zip(v[1]).for_each(|(o, x)| *o = z * x)
    })
}

/// `(grad f . grad g, n . (grad f x grad g))`, each band limited at
/// `L_f + L_g`; matrix factors keep the written order.
pub fn gradient_bilinears(f: &SphereSymbol, g: &SphereSymbol) -> Result<(SphereSymbol, SphereSymbol)> {
    let lmax = f.lmax() + g.lmax();
    Ok((dot_limited(f, g, lmax)?, cross_limited(f, g, lmax)?))
}

pub fn dot(f: &SphereSymbol, g: &SphereSymbol) -> Result<SphereSymbol> {
    dot_limited(f, g, f.lmax() + g.lmax())
}

pub fn dot_limited(f: &SphereSymbol, g: &SphereSymbol, lmax_out: usize) -> Result<SphereSymbol> {
    assert_eq!(f.k(), g.k(), "matrix size mismatch");
    let k = f.k();
    let lf = f.angular_momentum();
    let lg = g.angular_momentum();
    let inputs: Vec<&SphereSymbol> = lf.iter().chain(lg.iter()).collect();
    combine(&inputs, k, f.lmax() + g.lmax(), lmax_out, |_, v, out| {
        for a in 0..3 {
            small_matmul_acc(k, v[a], v[3 + a], out);
        }
        out.iter_mut().for_each(|z| *z = -*z);
    })
}

pub fn cross(f: &SphereSymbol, g: &SphereSymbol) -> Result<SphereSymbol> {
    cross_limited(f, g, f.lmax() + g.lmax())
}

pub fn cross_limited(f: &SphereSymbol, g: &SphereSymbol, lmax_out: usize) -> Result<SphereSymbol> {
    assert_eq!(f.k(), g.k(), "matrix size mismatch");
    let k = f.k();
    let kk = k * k;
    let lf = f.angular_momentum();
    let lg = g.angular_momentum();
    let inputs: Vec<&SphereSymbol> = lf.iter().chain(lg.iter()).collect();
    combine(&inputs, k, f.lmax() + g.lmax() + 1, lmax_out, |n, v, out| {
        let mut tmp = vec![Complex64::new(0.0, 0.0); kk];
        for (a, &na) in n.iter().enumerate() {
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            tmp.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            small_matmul_acc(k, v[b], v[3 + c], &mut tmp);
            out.iter_mut().zip(&tmp).for_each(|(o, t)| *o -= t * na);
            tmp.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            small_matmul_acc(k, v[c], v[3 + b], &mut tmp);
            out.iter_mut().zip(&tmp).for_each(|(o, t)| *o += t * na);
        }
    })
}

/// `{f, g} = n . (grad f x grad g)`.
pub fn poisson_bracket(f: &SphereSymbol, g: &SphereSymbol) -> Result<SphereSymbol> {
    cross(f, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use proptest::prelude::*;

    fn random_scalar(lmax: usize, seed: u64) -> SphereSymbol {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..(lmax + 1) * (lmax + 1))
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        SphereSymbol::from_coeffs(lmax, 1, coeffs)
    }

    #[test]
    fn cross_of_coordinates() {
        let n = |a| SphereSymbol::coordinate(a);
        let (d, x) = gradient_bilinears(&n(0), &n(1)).unwrap();
        assert!(x.sub(&n(2)).max_coeff() < 1e-13);
        assert!(d.add(&product(&n(0), &n(1)).unwrap()).max_coeff() < 1e-13);
        assert!(cross(&n(1), &n(2)).unwrap().sub(&n(0)).max_coeff() < 1e-13);
    }

    #[test]
    fn dot_of_n3_is_sin_squared() {
        let n3 = SphereSymbol::coordinate(2);
        let d = dot(&n3, &n3).unwrap();
        let expected = SphereSymbol::scalar_constant(c(1.0)).sub(&product(&n3, &n3).unwrap());
        assert!(d.sub(&expected).max_coeff() < 1e-13);
    }

    #[test]
    fn constants_have_no_gradient() {
        let one = SphereSymbol::scalar_constant(c(3.0));
        let g = random_scalar(3, 4);
        let (d, x) = gradient_bilinears(&one, &g).unwrap();
        assert!(d.max_coeff() < 1e-13 && x.max_coeff() < 1e-13);
    }

    #[test]
    fn matrix_order_is_preserved() {
        let sx = crate::linalg::CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let sz = crate::linalg::CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
        let f = SphereSymbol::coordinate(0).times_matrix(&sx);
        let g = SphereSymbol::coordinate(1).times_matrix(&sz);
        let fg = cross(&f, &g).unwrap();
        let gf = cross(&g, &f).unwrap();
        let expected = SphereSymbol::coordinate(2).times_matrix(&(&sx * &sz));
        assert!(fg.sub(&expected).max_coeff() < 1e-13);
        // for anticommuting factors the bracket is symmetric, not antisymmetric
        assert!(fg.sub(&gf).max_coeff() < 1e-13);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn leibniz_rule(seed in any::<u64>()) {
            let f = random_scalar(3, seed);
            let g = random_scalar(4, seed.wrapping_add(1));
            let fg = product(&f, &g).unwrap();
            let lhs = fg.angular_square();
            let rhs = product(&f.angular_square(), &g).unwrap()
                .add(&product(&f, &g.angular_square()).unwrap())
                .add(&dot(&f, &g).unwrap().scale_re(2.0));
            prop_assert!(lhs.sub(&rhs).max_coeff() < 1e-9);
        }

        #[test]
        fn cross_antisymmetric(seed in any::<u64>()) {
            let f = random_scalar(3, seed);
            let g = random_scalar(2, seed ^ 7);
            let s = cross(&f, &g).unwrap().add(&cross(&g, &f).unwrap());
            prop_assert!(s.max_coeff() < 1e-12);
        }

        #[test]
        fn jacobi_identity(seed in any::<u64>()) {
            let (f, g, h) = (random_scalar(2, seed), random_scalar(3, seed ^ 1), random_scalar(2, seed ^ 2));
            let a = cross(&f, &cross(&g, &h).unwrap()).unwrap();
            let b = cross(&g, &cross(&h, &f).unwrap()).unwrap();
            let cc = cross(&h, &cross(&f, &g).unwrap()).unwrap();
            prop_assert!(a.add(&b).add(&cc).max_coeff() < 1e-9);
        }
    }
}

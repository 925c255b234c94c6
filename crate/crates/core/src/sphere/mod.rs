//! Band-limited harmonic analysis on the two-sphere.

mod calculus;
mod grid;
mod harmonics;
mod symbol;

pub use calculus::{
    cross, cross_limited, dot, dot_limited, gradient_bilinears, poisson_bracket, product, product_limited,
    scalar_product,
};
pub use grid::{gauss_legendre, make_grid, shared_grid, Grid};
pub use harmonics::{legendre_table, plm_index, spherical_harmonic};
pub use symbol::{GridField, SphereSymbol};

/// Samples-to-coefficients transform; needs `2 lmax <= l_exact` for an
/// exact round trip.
pub fn sh_analysis(samples: &GridField, grid: &Grid, lmax: usize) -> crate::Result<SphereSymbol> {
    if 2 * lmax > grid.l_exact() {
        return Err(crate::Error::InsufficientGrid {
            needed: 2 * lmax,
            available: grid.l_exact(),
        });
    }
    SphereSymbol::analyze(samples, grid, lmax)
}

pub fn sh_synthesis(symbol: &SphereSymbol, grid: &Grid) -> crate::Result<GridField> {
    symbol.synthesize(grid)
}

pub fn angular_square(f: &SphereSymbol) -> SphereSymbol {
    f.angular_square()
}

pub fn integrate(f: &SphereSymbol) -> crate::linalg::CMat {
    f.integrate()
}

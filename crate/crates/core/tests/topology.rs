use sphere_sapt::berry::{band_chern, berry_connection_curvature, DEFAULT_CHERN_GRID};
use sphere_sapt::model::{band_data, Band, ModelParams};
use sphere_sapt::sapt::exact_band_projection;
use sphere_sapt::sphere::shared_grid;

#[test]
fn flux_matches_lattice_chern_number() {
    let grid = shared_grid(60);
    for lambda in [0.2, 0.8] {
        for band in Band::all(1) {
            let data = band_data(&grid, lambda, band).unwrap();
            let berry = berry_connection_curvature(&data, &grid).unwrap();
            let lattice = band_chern(lambda, band, DEFAULT_CHERN_GRID).unwrap();
            assert_eq!(berry.chern, lattice.chern);
            assert!(
                (berry.flux / std::f64::consts::TAU - lattice.chern as f64).abs() < 1e-3,
                "{}",
                berry.flux
            );
        }
    }
}

#[test]
fn exact_ranks_follow_chern_numbers() {
    for two_s in [1u32, 2] {
        for lambda in [0.2, 0.8] {
            let p = ModelParams::new(7, two_s, lambda).unwrap();
            let exact = exact_band_projection(&p).unwrap();
            for c in &exact.clusters {
                let chern = band_chern(lambda, c.band, 24).unwrap().chern;
                assert_eq!(c.rank as i64, p.dj() as i64 - chern, "{two_s} {lambda} {:?}", c.band);
            }
        }
    }
}

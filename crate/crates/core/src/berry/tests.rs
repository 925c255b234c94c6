use super::*;
use crate::model::band_data;
use crate::sphere::shared_grid;

fn plus() -> Band {
    Band::new(1, 1).unwrap()
}

fn minus() -> Band {
    Band::new(1, -1).unwrap()
}

#[test]
fn decoupled_bands_are_flat() {
    let grid = shared_grid(10);
    let data = band_data(&grid, 0.0, plus()).unwrap();
    let b = berry_connection_curvature(&data, &grid).unwrap();
    assert!(b
        .a_phi
        .iter()
        .chain(&b.a_theta)
        .chain(&b.f_theta_phi)
        .all(|x| x.abs() < 1e-10));
    assert_eq!(b.chern, 0);
}

#[test]
fn spin_half_closed_forms() {
    let grid = shared_grid(16);
    for lambda in [0.2, 0.8] {
        for band in [plus(), minus()] {
            let data = band_data(&grid, lambda, band).unwrap();
            let b = berry_connection_curvature(&data, &grid).unwrap();
            for node in 0..grid.len() {
                let (theta, _) = grid.angles(node);
                let (at, ap) = closed_form_connection(theta, lambda, band);
                assert!((b.a_theta[node] - at).abs() < 1e-8);
                assert!((b.a_phi[node] - ap).abs() < 1e-8);
                assert!((b.f_theta_phi[node] - closed_form_curvature(theta, lambda, band)).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn curvature_flux() {
    let grid = shared_grid(120);
    let data = band_data(&grid, 0.8, plus()).unwrap();
    let b = berry_connection_curvature(&data, &grid).unwrap();
    assert!((b.flux + TAU).abs() < 1e-6, "{}", b.flux);
    assert_eq!(b.chern, -1);
    let data = band_data(&grid, 0.2, plus()).unwrap();
    assert!(berry_connection_curvature(&data, &grid).unwrap().flux.abs() < 1e-6);
}

#[test]
fn curvature_is_curl_of_connection() {
    // F = d A_phi / d theta in the chart, checked by central differences
    for h in [1e-2, 5e-3] {
        let mut worst = 0.0f64;
        for theta in [0.4, 1.2, 2.0] {
            let (_, p) = closed_form_connection(theta + h, 0.3, plus());
            let (_, m) = closed_form_connection(theta - h, 0.3, plus());
            let err = ((p - m) / (2.0 * h) - closed_form_curvature(theta, 0.3, plus())).abs();
            worst = worst.max(err);
        }
        assert!(worst < 10.0 * h * h);
    }
}

#[test]
fn chern_numbers_spin_half() {
    for n in [20, 40, 80] {
        assert_eq!(band_chern(0.2, plus(), n).unwrap().chern, 0);
        assert_eq!(band_chern(0.2, minus(), n).unwrap().chern, 0);
        assert_eq!(band_chern(0.8, plus(), n).unwrap().chern, -1);
        assert_eq!(band_chern(0.8, minus(), n).unwrap().chern, 1);
    }
}

#[test]
fn chern_numbers_higher_spin() {
    for two_s in [2u32, 3] {
        let mut total = 0;
        for band in Band::all(two_s) {
            let c = band_chern(0.8, band, 30).unwrap();
            assert!((c.raw - c.chern as f64).abs() < 1e-9);
            assert_eq!(c.chern, -band.two_m as i64);
            total += c.chern;
        }
        assert_eq!(total, 0);
    }
}

#[test]
fn chern_jumps_only_at_half() {
    let mut previous = None;
    for lambda in [0.0, 0.1, 0.3, 0.45, 0.49, 0.51, 0.55, 0.7, 0.9, 1.0] {
        let c = band_chern(lambda, plus(), 40).unwrap().chern;
        let expected = if lambda < 0.5 { 0 } else { -1 };
        assert_eq!(c, expected, "lambda = {lambda}");
        if let Some((pl, pc)) = previous {
            if c != pc {
                assert!(pl < 0.5 && lambda > 0.5);
            }
        }
        previous = Some((lambda, c));
    }
}

#[test]
fn degenerate_field_is_refused() {
    assert!(matches!(band_chern(0.5, plus(), 20), Err(Error::Degenerate { .. })));
}

#[test]
fn closed_grid_needs_points() {
    assert!(ClosedGrid::new(1, 10).is_err());
    assert!(ClosedGrid::new(4, 2).is_err());
}

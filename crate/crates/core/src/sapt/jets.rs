//! Second-order jets in `(theta, phi)` of the model's matrix fields, and
//! the first-order bilinear evaluated on them.

use crate::linalg::{c, CMat, I};
use crate::model::{band_angle_jet, spectral_distance_jet, Band};
use crate::spin::make_irrep;
use crate::star::FirstOrder;

/// Value and the derivatives `d_theta`, `d_phi`, `d_theta^2`, `d_phi^2`.
#[derive(Debug, Clone)]
pub(crate) struct MatJet {
    pub v: CMat,
    pub t: CMat,
    pub p: CMat,
    pub tt: CMat,
    pub pp: CMat,
}

impl MatJet {
    fn scaled_identity(k: usize, v: f64, t: f64, tt: f64) -> Self {
        let id = CMat::identity(k, k);
        Self {
            v: &id * c(v),
            t: &id * c(t),
            p: CMat::zeros(k, k),
            tt: &id * c(tt),
            pp: CMat::zeros(k, k),
        }
    }

    /// `(n x grad)^2` in the chart.
    fn laplacian(&self, theta: f64) -> CMat {
        let (s, co) = theta.sin_cos();
        &self.tt + &self.t * c(co / s) + &self.pp * c(1.0 / (s * s))
    }
}

/// Reference unitary `e^{-i phi S3} e^{i theta_lambda S2} e^{i phi S3}`.
pub(crate) fn reference_unitary_jet(theta: f64, phi: f64, lambda: f64, two_s: u32) -> MatJet {
    let srep = make_irrep(two_s);
    let beta = band_angle_jet(theta, lambda);
    let a = srep.exp_i_j3(-phi);
    let b = srep.exp_i_j3(phi);
    let r = srep.exp_i_j2(beta.value);
    let is2 = srep.j2() * I;
    let s3 = srep.j3();
    let v = &a * &r * &b;
    let t = &a * (&is2 * &r) * &b * c(beta.d1);
    let tt = &a * ((&is2 * &r) * c(beta.d2) + (&is2 * &is2 * &r) * c(beta.d1 * beta.d1)) * &b;
    let dphi = |m: &CMat| (s3 * m - m * s3) * (-I);
    let p = dphi(&v);
    let pp = dphi(&p);
    MatJet { v, t, p, tt, pp }
}

/// `H_0 = (1 - lambda) S3 + lambda n . S`.
pub(crate) fn principal_symbol_jet(theta: f64, phi: f64, lambda: f64, two_s: u32) -> MatJet {
    let srep = make_irrep(two_s);
    let s = srep.components();
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let comb = |v: [f64; 3]| {
        (0..3).fold(CMat::zeros(s[0].nrows(), s[0].nrows()), |acc, a| {
            acc + &s[a] * c(lambda * v[a])
        })
    };
    MatJet {
        v: comb([st * cp, st * sp, ct]) + srep.j3() * c(1.0 - lambda),
        t: comb([ct * cp, ct * sp, -st]),
        p: comb([-st * sp, st * cp, 0.0]),
        tt: comb([-st * cp, -st * sp, -ct]),
        pp: comb([-st * cp, -st * sp, 0.0]),
    }
}

/// `E_m = N m` times the identity.
pub(crate) fn energy_jet(theta: f64, lambda: f64, band: Band) -> MatJet {
    let n = spectral_distance_jet(theta, lambda);
    let m = band.m();
    MatJet::scaled_identity(band.two_s as usize + 1, n.value * m, n.d1 * m, n.d2 * m)
}

/// `B1(f, g)` at one point, with factor order kept.
pub(crate) fn first_order(first: &FirstOrder, f: &MatJet, g: &MatJet, theta: f64) -> CMat {
    let s = theta.sin();
    let mut out = &f.v * &g.v * c(first.product);
    out += (f.laplacian(theta) * &g.v + &f.v * g.laplacian(theta)) * c(first.laplacian);
    out += (&f.t * &g.t + &f.p * &g.p * c(1.0 / (s * s))) * c(first.gradient);
    out += (&f.t * &g.p - &f.p * &g.t) * (I * (first.poisson / s));
    out
}

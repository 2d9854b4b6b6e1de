//! Discrete ∂̄ probe: for `f` holomorphic near `z`, the ring average
//! `(1/N) Σ_k f(z + h ω^k) ω^k` (ω = e^{2πi/N}) picks out the Taylor
//! coefficient `a_{N-1} h^{N-1}` and is negligible, while a `z̄` component
//! `c z̄` contributes `c h`.

use std::f64::consts::PI;

use musb_core::transforms::{transform_sample, Version};
use musb_core::{Complex64, PolyGauss};

const RING: usize = 16;
const H: f64 = 0.25;

fn dbar_residual(f: impl Fn(Complex64) -> Complex64, z: Complex64) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut size = 0.0;
    for k in 0..RING {
        let w = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / RING as f64);
        let v = f(z + w * H);
        acc += v * w;
        size += v.norm();
    }
    (acc / RING as f64).norm() / (H * size / RING as f64)
}

#[test]
fn transforms_are_holomorphic() {
    let psi = PolyGauss::from_real(&[0.5, -1.0, 0.3], 0.4).unwrap();
    for version in Version::ALL {
        for &(mu, t) in &[(-0.3, 0.7), (0.0, 1.0), (1.5, 2.0)] {
            let f = transform_sample(version, &psi, mu, t, 7).unwrap();
            for &(re, im) in &[(0.0, 0.0), (0.6, -0.4), (-1.0, 0.8)] {
                let r = dbar_residual(|z| f.eval(z), Complex64::new(re, im));
                assert!(r <= 1e-8, "{} mu={mu} t={t} z=({re},{im}): {r:e}", version.name());
            }
        }
    }
}

#[test]
fn probe_detects_antiholomorphic_part() {
    let psi = PolyGauss::from_real(&[1.0], 0.5).unwrap();
    let f = transform_sample(Version::A, &psi, 0.5, 1.0, 7).unwrap();
    let r = dbar_residual(|z| f.eval(z) + z.conj() * 1e-3, Complex64::new(0.2, 0.1));
    assert!(r > 1e-5, "{r:e}");
}

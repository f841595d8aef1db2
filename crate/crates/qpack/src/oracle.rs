//! Closed-form rectangular-cavity references used to validate the numerical
//! chain: mode frequencies, the TE101 wall-loss quality factor, and the
//! first-order dielectric perturbation shift.
//!
//! Conventions: the cavity spans [0,a] x [0,b] x [0,d] and is filled with a
//! uniform dielectric eps_r. Mode indices (m, n, p) count half-wavelengths
//! along (x, y, z). A triple is a valid resonance when at most one index is
//! zero (TE requires p >= 1 with m, n not both zero; TM requires m, n >= 1).

use crate::constants::{C0, ETA0, MU0};
use crate::error::{Error, Result};

/// Rectangular cavity, inner dimensions in meters, uniform fill.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectCavity {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub eps_r: f64,
}

impl RectCavity {
    pub fn new(a: f64, b: f64, d: f64, eps_r: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && d > 0.0) {
            return Err(Error::Config(format!(
                "cavity dimensions must be positive, got {a} x {b} x {d}"
            )));
        }
        if !(eps_r >= 1.0) {
            return Err(Error::Config(format!(
                "cavity fill eps_r must be >= 1, got {eps_r}"
            )));
        }
        Ok(Self { a, b, d, eps_r })
    }

    /// Resonant frequency of index triple (m, n, p); does not check validity.
    pub fn mode_frequency(&self, m: u32, n: u32, p: u32) -> f64 {
        let fx = m as f64 / self.a;
        let fy = n as f64 / self.b;
        let fz = p as f64 / self.d;
        C0 / (2.0 * self.eps_r.sqrt()) * (fx * fx + fy * fy + fz * fz).sqrt()
    }

    /// TE101 resonance (one half-wave along x and z, uniform along y).
    pub fn te101_frequency(&self) -> f64 {
        self.mode_frequency(1, 0, 1)
    }
}

/// A triple is a resonance when at least two indices are nonzero.
pub fn mode_is_valid(m: u32, n: u32, p: u32) -> bool {
    let zeros = [m, n, p].iter().filter(|&&i| i == 0).count();
    zeros <= 1
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityMode {
    pub m: u32,
    pub n: u32,
    pub p: u32,
    pub frequency: f64,
}

/// All valid modes with f <= f_max, sorted by frequency then by (m, n, p).
pub fn rect_modes(cav: &RectCavity, f_max: f64) -> Result<Vec<CavityMode>> {
    if !(f_max > 0.0) {
        return Err(Error::Config(format!("f_max must be positive, got {f_max}")));
    }
    let half_wave = C0 / (2.0 * cav.eps_r.sqrt());
    let bound = |len: f64| (f_max * len / half_wave).floor() as u32;
    let (mm, nm, pm) = (bound(cav.a), bound(cav.b), bound(cav.d));
    let mut modes = Vec::new();
    for m in 0..=mm {
        for n in 0..=nm {
            for p in 0..=pm {
                if !mode_is_valid(m, n, p) {
                    continue;
                }
                let f = cav.mode_frequency(m, n, p);
                if f <= f_max {
                    modes.push(CavityMode { m, n, p, frequency: f });
                }
            }
        }
    }
    modes.sort_by(|u, v| {
        u.frequency
            .partial_cmp(&v.frequency)
            .unwrap()
            .then((u.m, u.n, u.p).cmp(&(v.m, v.n, v.p)))
    });
    Ok(modes)
}

/// Collapse a sorted mode list to distinct frequencies (degenerate triples
/// merge when within rel_tol of each other).
pub fn distinct_frequencies(modes: &[CavityMode], rel_tol: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for mode in modes {
        match out.last() {
            Some(&f) if (mode.frequency - f).abs() <= rel_tol * f => {}
            _ => out.push(mode.frequency),
        }
    }
    out
}

/// Wall-loss Q of the TE101 mode for wall conductivity sigma (S/m):
///
///   Q = (k a d)^3 b eta / (2 pi^2 Rs [2 a^3 b + 2 b d^3 + a^3 d + a d^3])
///
/// with k = 2 pi f / c0 and eta the wave impedance of the fill.
pub fn rect_te101_q(cav: &RectCavity, f: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::Config(format!("wall sigma must be positive, got {sigma}")));
    }
    if !(f > 0.0) {
        return Err(Error::Config(format!("frequency must be positive, got {f}")));
    }
    let k = 2.0 * std::f64::consts::PI * f / C0;
    let eta = ETA0 / cav.eps_r.sqrt();
    let rs = surface_resistance_at(f, sigma);
    let (a, b, d) = (cav.a, cav.b, cav.d);
    let bracket = 2.0 * a.powi(3) * b + 2.0 * b * d.powi(3) + a.powi(3) * d + a * d.powi(3);
    let q = (k * a * d).powi(3) * b * eta
        / (2.0 * std::f64::consts::PI.powi(2) * rs * bracket);
    Ok(q)
}

/// Rs = sqrt(pi f mu0 / sigma); duplicated closed form kept local so the
/// oracle stays independent of the loss module it is used to check.
fn surface_resistance_at(f: f64, sigma: f64) -> f64 {
    (std::f64::consts::PI * f * MU0 / sigma).sqrt()
}

/// TE101 phasor fields normalized to peak |Ey| = e0 at the cavity center:
///   Ey = e0 sin(pi x / a) sin(pi z / d)
///   Hx = -(e0 pi / (w mu0 d)) sin(pi x / a) cos(pi z / d)   (magnitude)
///   Hz =  (e0 pi / (w mu0 a)) cos(pi x / a) sin(pi z / d)   (magnitude)
/// The complex phase (H lags E by 90 degrees) is irrelevant for energy and
/// loss quotients, so only magnitudes are returned.
#[derive(Debug, Clone, Copy)]
pub struct Te101Fields {
    pub cav: RectCavity,
    pub e0: f64,
    omega: f64,
}

impl Te101Fields {
    pub fn new(cav: RectCavity, e0: f64) -> Self {
        let omega = 2.0 * std::f64::consts::PI * cav.te101_frequency();
        Self { cav, e0, omega }
    }

    pub fn e_y(&self, x: f64, z: f64) -> f64 {
        let pi = std::f64::consts::PI;
        self.e0 * (pi * x / self.cav.a).sin() * (pi * z / self.cav.d).sin()
    }

    pub fn h_x(&self, x: f64, z: f64) -> f64 {
        let pi = std::f64::consts::PI;
        let c = self.e0 * pi / (self.omega * MU0 * self.cav.d);
        c * (pi * x / self.cav.a).sin() * (pi * z / self.cav.d).cos()
    }

    pub fn h_z(&self, x: f64, z: f64) -> f64 {
        let pi = std::f64::consts::PI;
        let c = self.e0 * pi / (self.omega * MU0 * self.cav.a);
        c * (pi * x / self.cav.a).cos() * (pi * z / self.cav.d).sin()
    }
}

/// Integral of sin^2(pi x / len) over [x0, x1].
fn sin2_integral(len: f64, x0: f64, x1: f64) -> f64 {
    let k = std::f64::consts::PI / len;
    0.5 * (x1 - x0) - ((2.0 * k * x1).sin() - (2.0 * k * x0).sin()) / (4.0 * k)
}

/// First-order fractional frequency shift from a lossless dielectric slab
/// (relative permittivity eps_slab) inserted into a vacuum-filled cavity:
///
///   df / f = -(eps_slab - 1) / 2 * Int_slab |E|^2 dV / Int_cav |E|^2 dV
///
/// Supported modes are the TE_m0p family (single E component
/// Ey = sin(m pi x / a) sin(p pi z / d)), which covers TE101. The slab is an
/// axis-aligned box (min, max) in meters and must lie inside the cavity.
pub fn dielectric_shift(
    cav: &RectCavity,
    mode: (u32, u32, u32),
    slab_min: [f64; 3],
    slab_max: [f64; 3],
    eps_slab: f64,
) -> Result<f64> {
    let (m, n, p) = mode;
    if n != 0 || m == 0 || p == 0 {
        return Err(Error::Config(format!(
            "dielectric_shift supports TE_m0p modes only, got ({m},{n},{p})"
        )));
    }
    if !(eps_slab >= 1.0) {
        return Err(Error::Config(format!("slab eps_r must be >= 1, got {eps_slab}")));
    }
    let hi = [cav.a, cav.b, cav.d];
    for ax in 0..3 {
        if !(slab_min[ax] < slab_max[ax])
            || slab_min[ax] < -1e-12
            || slab_max[ax] > hi[ax] * (1.0 + 1e-12)
        {
            return Err(Error::Config(format!(
                "slab [{:?}, {:?}] not inside cavity {:?}",
                slab_min, slab_max, hi
            )));
        }
    }
    let ix = sin2_integral(cav.a / m as f64, slab_min[0], slab_max[0]);
    let iz = sin2_integral(cav.d / p as f64, slab_min[2], slab_max[2]);
    let dy = slab_max[1] - slab_min[1];
    let slab_integral = ix * dy * iz;
    let cavity_integral = cav.a * cav.b * cav.d / 4.0;
    Ok(-(eps_slab - 1.0) / 2.0 * slab_integral / cavity_integral)
}

//! Conductor-loss post-processing: skin depth, surface resistance, the
//! surface-participation quotient Q_cond, and the scalar Q/T1/thermal
//! relations. Loss is perturbative: lossless-mode fields feed the quotient,
//! so sub-micron skin depths never need to be resolved on the grid.

use crate::constants::{K_B, MU0, PLANCK_H};
use crate::error::{Error, Result};

/// Skin depth (m): delta = sqrt(2 / (2 pi f mu0 mu_r sigma)).
pub fn skin_depth(sigma: f64, f: f64, mu_r: f64) -> Result<f64> {
    check_positive("sigma", sigma)?;
    check_positive("f", f)?;
    check_positive("mu_r", mu_r)?;
    Ok((2.0 / (2.0 * std::f64::consts::PI * f * MU0 * mu_r * sigma)).sqrt())
}

/// Surface resistance (ohm/square): Rs = 1/(sigma delta) = sqrt(pi f mu0 mu_r / sigma).
pub fn surface_resistance(sigma: f64, f: f64, mu_r: f64) -> Result<f64> {
    check_positive("sigma", sigma)?;
    check_positive("f", f)?;
    check_positive("mu_r", mu_r)?;
    Ok((std::f64::consts::PI * f * MU0 * mu_r / sigma).sqrt())
}

/// One lossy wall face: tangential-H phasor magnitude at the half-cell next
/// to the wall, face area, and the conductivity tag assigned at voxelization.
#[derive(Debug, Clone, Copy)]
pub struct WallFace {
    /// |H_t| (A/m) at the analysis frequency.
    pub h_t: f64,
    /// Face area dA (m^2).
    pub area: f64,
    /// Conductivity sigma (S/m) of the metal behind the face.
    pub sigma: f64,
}

/// Mode fields reduced to what the participation quotient needs.
#[derive(Debug, Clone)]
pub struct WallFieldSet {
    /// Analysis frequency (Hz).
    pub f: f64,
    /// Stored mode energy W (J), normalized consistently with the |H_t|.
    pub energy: f64,
    pub faces: Vec<WallFace>,
}

impl WallFieldSet {
    fn validate(&self) -> Result<()> {
        check_positive("f", self.f)?;
        check_positive("W", self.energy)?;
        for (i, face) in self.faces.iter().enumerate() {
            if !(face.area > 0.0) {
                return Err(Error::Config(format!("face {i}: area must be > 0")));
            }
            if !(face.sigma > 0.0) {
                return Err(Error::Config(format!("face {i}: sigma must be > 0")));
            }
            if !face.h_t.is_finite() || face.h_t < 0.0 {
                return Err(Error::Config(format!("face {i}: |H_t| must be finite and >= 0")));
            }
        }
        Ok(())
    }

    /// P_loss = 1/2 sum Rs(sigma, f) |H_t|^2 dA (W, peak-phasor convention).
    pub fn wall_loss_power(&self) -> Result<f64> {
        self.validate()?;
        let mut p = 0.0;
        for face in &self.faces {
            let rs = surface_resistance(face.sigma, self.f, 1.0)?;
            p += 0.5 * rs * face.h_t * face.h_t * face.area;
        }
        Ok(p)
    }
}

/// Conductor-loss quality factor, or `Infinite` when the walls carry no
/// tangential field (lossless configuration).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QCond {
    Finite(f64),
    Infinite,
}

impl QCond {
    /// Finite value, or an analysis error for the infinite flag.
    pub fn finite(self) -> Result<f64> {
        match self {
            QCond::Finite(q) => Ok(q),
            QCond::Infinite => Err(Error::Analysis(
                "Q_cond is unbounded: no tangential wall fields".into(),
            )),
        }
    }
}

/// Q_cond = 2 pi f W / P_loss over the tagged wall faces.
pub fn q_cond(walls: &WallFieldSet) -> Result<QCond> {
    let p_loss = walls.wall_loss_power()?;
    if p_loss == 0.0 {
        return Ok(QCond::Infinite);
    }
    Ok(QCond::Finite(
        2.0 * std::f64::consts::PI * walls.f * walls.energy / p_loss,
    ))
}

/// T1 = Q / (2 pi f).
pub fn q_to_t1(q: f64, f: f64) -> Result<f64> {
    check_positive("Q", q)?;
    check_positive("f", f)?;
    Ok(q / (2.0 * std::f64::consts::PI * f))
}

/// Thermal frequency f = k_B T / h.
pub fn thermal_frequency(t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Config(format!("temperature must be >= 0, got {t}")));
    }
    Ok(K_B * t / PLANCK_H)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Config(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skin_depth_at_package_sigma_and_5p9_ghz() {
        let d = skin_depth(4.5e9, 5.9e9, 1.0).unwrap();
        assert!(
            (d - 9.7676e-8).abs() / 9.7676e-8 < 1e-3,
            "delta(4.5e9 S/m, 5.9 GHz) should be ~9.8e-8 m, got {d:.4e}"
        );
    }

    #[test]
    fn skin_depth_room_temperature_copper_at_10_ghz() {
        let d = skin_depth(5.8e7, 10e9, 1.0).unwrap();
        assert!(
            (d - 6.6086e-7).abs() / 6.6086e-7 < 1e-3,
            "delta(5.8e7 S/m, 10 GHz) should be ~6.6e-7 m, got {d:.4e}"
        );
    }

    #[test]
    fn skin_depth_vanishes_for_perfect_conductor_limit() {
        let d = skin_depth(1e30, 5e9, 1.0).unwrap();
        assert!(d < 1e-15);
    }

    #[test]
    fn surface_resistance_at_package_sigma_and_5p9_ghz() {
        let rs = surface_resistance(4.5e9, 5.9e9, 1.0).unwrap();
        assert!(
            (rs - 2.2751e-3).abs() / 2.2751e-3 < 1e-3,
            "Rs(4.5e9, 5.9 GHz) should be ~2.3e-3 ohm, got {rs:.4e}"
        );
    }

    #[test]
    fn surface_resistance_quadrupling_sigma_halves_rs() {
        let r1 = surface_resistance(1e9, 5e9, 1.0).unwrap();
        let r4 = surface_resistance(4e9, 5e9, 1.0).unwrap();
        assert!((r1 / r4 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rs_sigma_delta_is_one_identically() {
        for &(sigma, f) in &[(4.5e9, 5.9e9), (5.8e7, 10e9), (1e6, 1e8)] {
            let rs = surface_resistance(sigma, f, 1.0).unwrap();
            let d = skin_depth(sigma, f, 1.0).unwrap();
            assert!(
                (rs * sigma * d - 1.0).abs() < 1e-12,
                "Rs * sigma * delta must equal 1"
            );
        }
    }

    #[test]
    fn q_cond_scaling_sigma_by_100_multiplies_q_by_10() {
        let base = WallFieldSet {
            f: 7e9,
            energy: 1e-18,
            faces: vec![
                WallFace { h_t: 2.0e-6, area: 1e-6, sigma: 4.5e9 },
                WallFace { h_t: 1.0e-6, area: 2e-6, sigma: 4.5e9 },
            ],
        };
        let mut scaled = base.clone();
        for face in &mut scaled.faces {
            face.sigma *= 100.0;
        }
        let q0 = q_cond(&base).unwrap().finite().unwrap();
        let q1 = q_cond(&scaled).unwrap().finite().unwrap();
        assert!(
            (q1 / q0 - 10.0).abs() < 1e-9,
            "Rs ~ 1/sqrt(sigma): sigma x100 must give Q x10, got ratio {}",
            q1 / q0
        );
    }

    #[test]
    fn q_cond_zero_fields_is_infinite_flag() {
        let walls = WallFieldSet {
            f: 7e9,
            energy: 1e-18,
            faces: vec![WallFace { h_t: 0.0, area: 1e-6, sigma: 4.5e9 }],
        };
        assert_eq!(q_cond(&walls).unwrap(), QCond::Infinite);
        assert!(q_cond(&walls).unwrap().finite().is_err());
    }

    #[test]
    fn q_cond_matches_analytical_te101_q_with_exact_mode_integrals() {
        // Closed-form TE101 wall/volume integrals for the 30 mm cube at
        // sigma = 4.5e9, evaluated exactly; q_cond on those inputs must land
        // on the analytical oracle to quadrature-free precision.
        use crate::constants::{EPS0, MU0};
        use crate::oracle::{rect_te101_q, RectCavity};
        let cav = RectCavity::new(0.030, 0.030, 0.030, 1.0).unwrap();
        let f = cav.te101_frequency();
        let e0 = 1.0;
        let omega = 2.0 * std::f64::consts::PI * f;
        let (a, b, d) = (cav.a, cav.b, cav.d);
        // W = eps/2 * Int |Ey|^2 dV = eps0 e0^2 a b d / 8.
        let energy = EPS0 * e0 * e0 * a * b * d / 8.0;
        let c = e0 * std::f64::consts::PI / (omega * MU0);
        // Exact wall integrals of |H_t|^2; encode each wall as one face with
        // h_t^2 * area equal to the integral (q_cond only sees the product).
        let int_z_wall = (c / d).powi(2) * (a / 2.0) * b; // z = 0 and z = d
        let int_x_wall = (c / a).powi(2) * (d / 2.0) * b; // x = 0 and x = a
        let int_y_wall = (c / d).powi(2) * (a / 2.0) * (d / 2.0)
            + (c / a).powi(2) * (a / 2.0) * (d / 2.0); // y = 0 and y = b
        let face = |integral: f64| WallFace { h_t: integral.sqrt(), area: 1.0, sigma: 4.5e9 };
        let walls = WallFieldSet {
            f,
            energy,
            faces: vec![
                face(int_z_wall),
                face(int_z_wall),
                face(int_x_wall),
                face(int_x_wall),
                face(int_y_wall),
                face(int_y_wall),
            ],
        };
        let q = q_cond(&walls).unwrap().finite().unwrap();
        let q_ref = rect_te101_q(&cav, f, 4.5e9).unwrap();
        assert!(
            (q - q_ref).abs() / q_ref < 1e-9,
            "participation quotient on exact TE101 integrals must reproduce the closed form: {q:.6e} vs {q_ref:.6e}"
        );
    }

    #[test]
    fn q_to_t1_paper_pair() {
        let t1 = q_to_t1(4.5e6, 4.8e9).unwrap();
        assert!(
            (t1 - 1.4921e-4).abs() / 1.4921e-4 < 1e-3,
            "Q = 4.5e6 at 4.8 GHz should give T1 ~ 149 us, got {t1:.4e}"
        );
    }

    #[test]
    fn q_to_t1_identity_case() {
        let t1 = q_to_t1(2.0 * std::f64::consts::PI, 1.0).unwrap();
        assert!((t1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn q_to_t1_at_7p7_ghz() {
        let t1 = q_to_t1(1e6, 7.7e9).unwrap();
        assert!(
            (t1 - 2.0670e-5).abs() / 2.0670e-5 < 1e-3,
            "Q = 1e6 at 7.7 GHz should give ~20.7 us, got {t1:.4e}"
        );
    }

    #[test]
    fn thermal_frequency_10_mk() {
        let f = thermal_frequency(0.010).unwrap();
        assert!(
            (f - 2.083662e8).abs() / 2.083662e8 < 1e-6,
            "10 mK should map to ~0.2083 GHz, got {f:.6e}"
        );
    }

    #[test]
    fn thermal_frequency_zero_and_one_kelvin() {
        assert_eq!(thermal_frequency(0.0).unwrap(), 0.0);
        let f = thermal_frequency(1.0).unwrap();
        assert!((f - 2.083662e10).abs() / 2.083662e10 < 1e-6);
        assert!(thermal_frequency(-0.1).is_err());
    }

    #[test]
    fn non_positive_inputs_rejected() {
        assert!(skin_depth(0.0, 1e9, 1.0).is_err());
        assert!(skin_depth(1e9, -1.0, 1.0).is_err());
        assert!(surface_resistance(1e9, 0.0, 1.0).is_err());
        assert!(q_to_t1(0.0, 1e9).is_err());
        assert!(q_to_t1(1e6, f64::NAN).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn face_strategy() -> impl Strategy<Value = WallFace> {
            (1e-9..1e-3f64, 1e-9..1e-4f64, 1e7..1e10f64)
                .prop_map(|(h_t, area, sigma)| WallFace { h_t, area, sigma })
        }

        proptest! {
            #[test]
            fn q_cond_invariant_under_field_rescaling(
                faces in proptest::collection::vec(face_strategy(), 1..8),
                scale in 1e-3..1e3f64,
            ) {
                let base = WallFieldSet { f: 7e9, energy: 1e-18, faces: faces.clone() };
                let scaled = WallFieldSet {
                    f: 7e9,
                    energy: 1e-18 * scale * scale,
                    faces: faces
                        .iter()
                        .map(|w| WallFace { h_t: w.h_t * scale, ..*w })
                        .collect(),
                };
                let q0 = q_cond(&base).unwrap().finite().unwrap();
                let q1 = q_cond(&scaled).unwrap().finite().unwrap();
                prop_assert!(
                    (q0 - q1).abs() / q0 < 1e-9,
                    "quotient of quadratic forms must not see a global field rescale"
                );
            }

            #[test]
            fn inv_q_additive_over_disjoint_wall_subsets(
                faces in proptest::collection::vec(face_strategy(), 2..10),
                split in 1usize..9,
            ) {
                let split = split.min(faces.len() - 1);
                let whole = WallFieldSet { f: 6e9, energy: 2e-18, faces: faces.clone() };
                let left = WallFieldSet { f: 6e9, energy: 2e-18, faces: faces[..split].to_vec() };
                let right = WallFieldSet { f: 6e9, energy: 2e-18, faces: faces[split..].to_vec() };
                let inv = |w: &WallFieldSet| 1.0 / q_cond(w).unwrap().finite().unwrap();
                let lhs = inv(&whole);
                let rhs = inv(&left) + inv(&right);
                prop_assert!((lhs - rhs).abs() / lhs < 1e-9);
            }

            #[test]
            fn scalar_relations_are_linear(q in 1e2..1e8f64, t in 1e-4..10.0f64, s in 0.1..10.0f64) {
                let t1 = q_to_t1(q, 5e9).unwrap();
                let t1s = q_to_t1(q * s, 5e9).unwrap();
                prop_assert!((t1s / t1 - s).abs() < 1e-9);
                let f1 = thermal_frequency(t).unwrap();
                let fs = thermal_frequency(t * s).unwrap();
                prop_assert!((fs / f1 - s).abs() < 1e-9);
            }
        }
    }
}

//! Run configuration: strict JSON with mm/GHz units at the interface,
//! converted to SI in this module and nowhere else.
//!
//! Every key is optional; `{}` resolves to the documented default scenario.
//! Unknown keys are rejected with the offending key path in the message.

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::scene::{PackageParams, TraceSpec};
use crate::solver::Waveform;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

const MM: f64 = 1e-3;
const GHZ: f64 = 1e9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TraceConfig {
    pub length_mm: f64,
    pub width_mm: f64,
    pub slot_mm: f64,
    pub coupling_gap_mm: f64,
    pub pad_mm: [f64; 2],
    pub pitch_mm: f64,
    pub target_f0_ghz: f64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        let t = TraceSpec::default();
        TraceConfig {
            length_mm: t.length / MM,
            width_mm: t.width / MM,
            slot_mm: t.slot / MM,
            coupling_gap_mm: t.coupling_gap / MM,
            pad_mm: [t.pad[0] / MM, t.pad[1] / MM],
            pitch_mm: t.pitch / MM,
            target_f0_ghz: t.target_f0 / GHZ,
        }
    }
}

/// Lateral and vertical package resolution plus the isotropic cell used by
/// the empty-box `modes` command. Absent values fall back to the documented
/// defaults (0.25 mm lateral, chip thickness / 3 vertical, 0.5 mm box).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub h_xy_mm: Option<f64>,
    pub h_z_mm: Option<f64>,
    pub box_h_mm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SourceConfig {
    /// -60 dB spectral support of the drive, GHz. The default 2-22 GHz
    /// exposes both the trace resonance and the broad above-band package
    /// response.
    pub f_lo_ghz: f64,
    pub f_hi_ghz: f64,
    pub amplitude: f64,
}

impl Default for SourceConfig {
    fn default() -> Self {
        SourceConfig { f_lo_ghz: 2.0, f_hi_ghz: 22.0, amplitude: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SliceConfig {
    /// One of "zx", "xy", "yz".
    pub plane: String,
    /// Cell index along the fixed axis; defaults to the domain midplane.
    pub index: Option<usize>,
    /// Analysis frequency for the slice phasors; defaults to the trace
    /// target resonance.
    pub frequency_ghz: Option<f64>,
}

impl Default for SliceConfig {
    fn default() -> Self {
        SliceConfig { plane: "zx".into(), index: None, frequency_ghz: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Inner enclosure size (mm). Assumed geometry, not a published value.
    pub cavity_mm: [f64; 3],
    /// Wall conductivity (S/m).
    pub wall_sigma: f64,
    pub chip_mm: [f64; 3],
    /// "silicon" (eps_r 11.45) or "sapphire" (eps_r 9.8, isotropic
    /// approximation).
    pub chip_material: String,
    /// Overrides the material table when set.
    pub chip_eps_r: Option<f64>,
    pub gap_delta_mm: f64,
    pub post_cross_section_mm: f64,
    pub pedestal_mm: [f64; 3],
    pub port_impedance_ohm: f64,
    /// Feed-pin bottom to coupling pad clearance (mm); 0 lands the pin on
    /// the pad.
    pub port_launch_gap_mm: f64,
    pub band_ghz: [f64; 2],
    pub trace: TraceConfig,
    pub grid: GridConfig,
    pub source: SourceConfig,
    /// Main record length in leapfrog steps.
    pub n_steps: usize,
    /// Post-drive steps over which mode phasors are accumulated.
    pub ringdown_steps: usize,
    pub sweep_deltas_mm: Vec<f64>,
    pub slice: SliceConfig,
    /// Frequency used for the Q -> T1 conversion column (GHz).
    pub t1_reference_ghz: f64,
    /// Sweep-point worker count; defaults to QPACK_WORKERS or available
    /// cores.
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = PackageParams::default();
        RunConfig {
            cavity_mm: [p.cavity_dims[0] / MM, p.cavity_dims[1] / MM, p.cavity_dims[2] / MM],
            wall_sigma: p.wall_sigma,
            chip_mm: [p.chip_dims[0] / MM, p.chip_dims[1] / MM, p.chip_dims[2] / MM],
            chip_material: "silicon".into(),
            chip_eps_r: None,
            gap_delta_mm: p.gap_delta / MM,
            post_cross_section_mm: p.post_cross_section / MM,
            pedestal_mm: [
                p.pedestal_dims[0] / MM,
                p.pedestal_dims[1] / MM,
                p.pedestal_dims[2] / MM,
            ],
            port_impedance_ohm: p.port_impedance,
            port_launch_gap_mm: p.port_launch_gap / MM,
            band_ghz: [p.band_of_interest.0 / GHZ, p.band_of_interest.1 / GHZ],
            trace: TraceConfig::default(),
            grid: GridConfig::default(),
            source: SourceConfig::default(),
            n_steps: 65_536,
            ringdown_steps: 20_000,
            sweep_deltas_mm: vec![0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.8],
            slice: SliceConfig::default(),
            t1_reference_ghz: 4.8,
            workers: None,
        }
    }
}

/// Strict parse: unknown keys and type mismatches fail with the full key
/// path; absent keys take documented defaults.
pub fn parse_config(doc: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(doc);
    let cfg: RunConfig = serde_path_to_error::deserialize(de)
        .map_err(|e| Error::Config(format!("config {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        for (label, v) in [
            ("cavity_mm", &self.cavity_mm[..]),
            ("chip_mm", &self.chip_mm[..]),
            ("pedestal_mm", &self.pedestal_mm[..]),
        ] {
            if v.iter().any(|&x| !(x > 0.0)) {
                return Err(Error::Config(format!("{label}: all entries must be > 0")));
            }
        }
        if self.gap_delta_mm < 0.0 {
            return Err(Error::Config(format!(
                "gap_delta_mm must be >= 0, got {}",
                self.gap_delta_mm
            )));
        }
        if !(self.band_ghz[0] > 0.0 && self.band_ghz[0] < self.band_ghz[1]) {
            return Err(Error::Config(format!(
                "band_ghz must be an increasing positive pair, got {:?}",
                self.band_ghz
            )));
        }
        if !(self.source.f_lo_ghz > 0.0 && self.source.f_lo_ghz < self.source.f_hi_ghz) {
            return Err(Error::Config("source band must be an increasing positive pair".into()));
        }
        if self.n_steps == 0 || self.ringdown_steps == 0 {
            return Err(Error::Config("n_steps and ringdown_steps must be >= 1".into()));
        }
        if self.sweep_deltas_mm.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "sweep_deltas_mm must be strictly increasing".into(),
            ));
        }
        if self.sweep_deltas_mm.iter().any(|&d| d < 0.0) {
            return Err(Error::Config("sweep_deltas_mm entries must be >= 0".into()));
        }
        if !matches!(self.slice.plane.as_str(), "zx" | "xy" | "yz") {
            return Err(Error::Config(format!(
                "slice.plane must be one of zx|xy|yz, got {:?}",
                self.slice.plane
            )));
        }
        if !(self.t1_reference_ghz > 0.0) {
            return Err(Error::Config("t1_reference_ghz must be > 0".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be >= 1 when set".into()));
        }
        if self.port_launch_gap_mm < 0.0 {
            return Err(Error::Config(format!(
                "port_launch_gap_mm must be >= 0, got {}",
                self.port_launch_gap_mm
            )));
        }
        self.chip_eps()?;
        Ok(())
    }

    fn chip_eps(&self) -> Result<f64> {
        if let Some(e) = self.chip_eps_r {
            if !(e >= 1.0) {
                return Err(Error::Config(format!("chip_eps_r must be >= 1, got {e}")));
            }
            return Ok(e);
        }
        match self.chip_material.as_str() {
            "silicon" => Ok(11.45),
            "sapphire" => Ok(9.8),
            other => Err(Error::Config(format!(
                "chip_material must be silicon or sapphire, got {other:?}"
            ))),
        }
    }

    /// SI package parameters; the only mm/GHz -> SI conversion point.
    pub fn package_params(&self) -> Result<PackageParams> {
        Ok(PackageParams {
            cavity_dims: [self.cavity_mm[0] * MM, self.cavity_mm[1] * MM, self.cavity_mm[2] * MM],
            wall_sigma: self.wall_sigma,
            chip_dims: [self.chip_mm[0] * MM, self.chip_mm[1] * MM, self.chip_mm[2] * MM],
            chip_eps_r: self.chip_eps()?,
            gap_delta: self.gap_delta_mm * MM,
            post_cross_section: self.post_cross_section_mm * MM,
            pedestal_dims: [
                self.pedestal_mm[0] * MM,
                self.pedestal_mm[1] * MM,
                self.pedestal_mm[2] * MM,
            ],
            trace_spec: TraceSpec {
                length: self.trace.length_mm * MM,
                width: self.trace.width_mm * MM,
                slot: self.trace.slot_mm * MM,
                coupling_gap: self.trace.coupling_gap_mm * MM,
                pad: [self.trace.pad_mm[0] * MM, self.trace.pad_mm[1] * MM],
                pitch: self.trace.pitch_mm * MM,
                target_f0: self.trace.target_f0_ghz * GHZ,
            },
            port_impedance: self.port_impedance_ohm,
            port_launch_gap: self.port_launch_gap_mm * MM,
            band_of_interest: (self.band_ghz[0] * GHZ, self.band_ghz[1] * GHZ),
        })
    }

    /// Lattice for package scenarios: 0.25 mm lateral, chip thickness / 3
    /// vertical by default so the chip top lands on a face plane.
    pub fn package_grid(&self, params: &PackageParams) -> Result<GridSpec> {
        let hxy = self.grid.h_xy_mm.unwrap_or(0.25) * MM;
        let hz = self.grid.h_z_mm.map(|v| v * MM).unwrap_or(params.chip_dims[2] / 3.0);
        GridSpec::for_extent(params.cavity_dims, [hxy, hxy, hz])
    }

    /// Isotropic lattice for the empty-box `modes` command.
    pub fn box_grid(&self) -> Result<GridSpec> {
        let h = self.grid.box_h_mm.unwrap_or(0.5) * MM;
        let dims = [self.cavity_mm[0] * MM, self.cavity_mm[1] * MM, self.cavity_mm[2] * MM];
        GridSpec::for_extent(dims, [h, h, h])
    }

    pub fn waveform(&self) -> Waveform {
        Waveform::band(self.source.f_lo_ghz * GHZ, self.source.f_hi_ghz * GHZ)
    }

    pub fn band(&self) -> (f64, f64) {
        (self.band_ghz[0] * GHZ, self.band_ghz[1] * GHZ)
    }

    pub fn t1_reference(&self) -> f64 {
        self.t1_reference_ghz * GHZ
    }

    /// SHA-256 of the resolved config serialization; embedded in every
    /// output artifact so identical configs give identical files. The
    /// worker count only schedules work and never reaches the numbers, so
    /// it stays out of the digest.
    pub fn digest(&self) -> String {
        let mut physics = self.clone();
        physics.workers = None;
        let doc = serde_json::to_string(&physics).expect("config serialization cannot fail");
        let mut hasher = Sha256::new();
        hasher.update(doc.as_bytes());
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Sweep worker count: explicit field, then QPACK_WORKERS, then the
    /// number of available cores.
    pub fn worker_count(&self) -> usize {
        if let Some(w) = self.workers {
            return w.max(1);
        }
        if let Ok(v) = std::env::var("QPACK_WORKERS") {
            if let Ok(w) = v.parse::<usize>() {
                if w >= 1 {
                    return w;
                }
            }
        }
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_resolves_to_full_defaults() {
        let cfg = parse_config("{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        let p = cfg.package_params().unwrap();
        assert_eq!(p, PackageParams::default(), "config defaults mirror scene defaults");
    }

    #[test]
    fn gap_delta_override_converts_to_si() {
        let cfg = parse_config(r#"{"gap_delta_mm": 1.9}"#).unwrap();
        let p = cfg.package_params().unwrap();
        assert!((p.gap_delta - 1.9e-3).abs() < 1e-15);
        assert_eq!(p.cavity_dims, PackageParams::default().cavity_dims, "rest stays default");
    }

    #[test]
    fn type_mismatch_names_the_key() {
        let err = parse_config(r#"{"gap_delta_mm": "big"}"#).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("gap_delta_mm"), "message should name the key: {msg}");
    }

    #[test]
    fn unknown_key_rejected_with_path() {
        let err = parse_config(r#"{"gap_mm": 1.0}"#).unwrap_err();
        assert!(format!("{err}").contains("gap_mm"));
        let err = parse_config(r#"{"trace": {"bogus": 2.0}}"#).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("bogus"), "nested path expected: {msg}");
    }

    #[test]
    fn chip_material_table_and_override() {
        let cfg = parse_config(r#"{"chip_material": "sapphire"}"#).unwrap();
        assert_eq!(cfg.package_params().unwrap().chip_eps_r, 9.8);
        let cfg = parse_config(r#"{"chip_eps_r": 10.5, "chip_material": "sapphire"}"#).unwrap();
        assert_eq!(cfg.package_params().unwrap().chip_eps_r, 10.5);
        assert!(parse_config(r#"{"chip_material": "wood"}"#).is_err());
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(parse_config(r#"{"gap_delta_mm": -0.5}"#).is_err());
        assert!(parse_config(r#"{"band_ghz": [8.0, 4.0]}"#).is_err());
        assert!(parse_config(r#"{"sweep_deltas_mm": [0.0, 0.0]}"#).is_err());
        assert!(parse_config(r#"{"slice": {"plane": "qq"}}"#).is_err());
        assert!(parse_config(r#"{"workers": 0}"#).is_err());
        assert!(parse_config(r#"{"n_steps": 0}"#).is_err());
    }

    #[test]
    fn digest_distinguishes_configs_and_is_stable() {
        let a = parse_config("{}").unwrap();
        let b = parse_config(r#"{"gap_delta_mm": 0.0}"#).unwrap();
        assert_eq!(a.digest(), parse_config("{}").unwrap().digest());
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
        let c = parse_config(r#"{"workers": 3}"#).unwrap();
        assert_eq!(
            a.digest(),
            c.digest(),
            "scheduling knobs must not change the artifact identity"
        );
    }

    #[test]
    fn default_waveform_fits_default_package_grid() {
        let cfg = RunConfig::default();
        let p = cfg.package_params().unwrap();
        let spec = cfg.package_grid(&p).unwrap();
        let max_h = spec.h.iter().cloned().fold(0.0f64, f64::max);
        cfg.waveform().validate(max_h).unwrap();
        // Chip top face must land on a z face plane for the sheet metal.
        let chip_top = p.pedestal_dims[2] + p.chip_dims[2];
        let planes = chip_top / spec.h[2];
        assert!(
            (planes - planes.round()).abs() < 1e-9,
            "chip top at {planes} cells must align with a face plane"
        );
    }

    #[test]
    fn workers_field_wins_over_environment() {
        let cfg = parse_config(r#"{"workers": 3}"#).unwrap();
        assert_eq!(cfg.worker_count(), 3);
    }
}

//! Scenario orchestration shared by the CLI and the acceptance suite:
//! build -> voxelize -> simulate -> analyze, plus the CSV artifact writers.
//!
//! Every artifact starts with comment lines carrying the tool version and
//! the config digest, and all float formatting is fixed-precision, so a
//! given config produces byte-identical files on every run and under any
//! worker count.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::grid::{voxelize, GridSpec, MaterialGrid};
use crate::loss::{q_cond, q_to_t1, QCond, WallFace, WallFieldSet};
use crate::scene::{build_package, validate_scene, PackageParams, Scene};
use crate::solver::{ModeDft, Plane, ProbeRecords, Slice, SolverState, SourceKind, SourceSpec, Waveform};
use crate::spectral::{
    find_peaks, mode_table, s21, spectrum, ModeRecord, Reference, TransmissionSpectrum, Window,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Peak prominence used by all scenario analyses (dB over local baseline).
pub const PROMINENCE_DB: f64 = 6.0;

/// Nearest-frequency continuation window for the gap sweep (Hz).
pub const TRACK_WINDOW: f64 = 0.5e9;

/// Half-bandwidth of the phase-2 mode-isolation drive (Hz).
pub const PHASE2_HALF_BAND: f64 = 0.75e9;

const CHUNK: usize = 2048;

pub fn artifact_header(command: &str, cfg: &RunConfig) -> String {
    format!(
        "# qpack v{TOOL_VERSION}\n# command: {command}\n# config sha256: {}\n",
        cfg.digest()
    )
}

pub fn write_artifact(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}

/// A package scenario ready to simulate.
pub struct BuiltScenario {
    pub params: PackageParams,
    pub scene: Scene,
    pub spec: GridSpec,
    pub grid: MaterialGrid,
}

/// Build and voxelize the package at the given gap, failing on any scene
/// validation finding before a single step is taken.
pub fn build_scenario(cfg: &RunConfig, gap_delta: f64) -> Result<BuiltScenario> {
    let mut params = cfg.package_params()?;
    params.gap_delta = gap_delta;
    let scene = build_package(&params)?;
    let report = validate_scene(&scene);
    if !report.findings.is_empty() {
        let list: Vec<String> = report.findings.iter().map(|f| format!("{f:?}")).collect();
        return Err(Error::Config(format!("scene validation failed: {}", list.join("; "))));
    }
    let spec = cfg.package_grid(&params)?;
    let max_h = spec.h.iter().cloned().fold(0.0f64, f64::max);
    cfg.waveform().validate(max_h)?;
    let grid = voxelize(&scene, &spec)?;
    Ok(BuiltScenario { params, scene, spec, grid })
}

/// Step in chunks, printing progress to stderr between chunks. Chunking
/// does not alter the integration, so records match a single run() call
/// bit for bit.
pub fn run_chunked(
    st: &mut SolverState,
    n_steps: usize,
    label: &str,
    progress: bool,
) -> Result<ProbeRecords> {
    let t0 = std::time::Instant::now();
    let mut parts = Vec::new();
    let mut done = 0;
    while done < n_steps {
        let n = CHUNK.min(n_steps - done);
        parts.push(st.run(n)?);
        done += n;
        if progress && done < n_steps {
            let el = t0.elapsed().as_secs_f64();
            let eta = el / done as f64 * (n_steps - done) as f64;
            eprintln!(
                "[{label}] step {done}/{n_steps} energy {:.3e} J eta {eta:.0}s",
                st.total_energy()
            );
        }
    }
    if progress {
        eprintln!("[{label}] step {n_steps}/{n_steps} done in {:.0}s", t0.elapsed().as_secs_f64());
    }
    Ok(merge_records(parts))
}

fn merge_records(parts: Vec<ProbeRecords>) -> ProbeRecords {
    let mut parts = parts.into_iter();
    let mut out = match parts.next() {
        Some(first) => first,
        None => return ProbeRecords::default(),
    };
    for p in parts {
        out.n_steps += p.n_steps;
        for (dst, src) in out.e_point_series.iter_mut().zip(p.e_point_series) {
            for c in 0..3 {
                dst[c].extend(&src[c]);
            }
        }
        for (dst, src) in out.port_v.iter_mut().zip(p.port_v) {
            dst.extend(src);
        }
        for (dst, src) in out.port_i.iter_mut().zip(p.port_i) {
            dst.extend(src);
        }
        out.source_v.extend(p.source_v);
        if !p.mode_dfts.is_empty() {
            out.mode_dfts = p.mode_dfts;
        }
    }
    out
}

/// One transmission run: drive one port through its Thevenin source,
/// record both ports, and reduce to |S21|(f) plus the classified mode
/// table over the band of interest.
pub struct PortRun {
    pub records: ProbeRecords,
    pub trans: TransmissionSpectrum,
    pub table: Vec<ModeRecord>,
}

pub fn port_transmission(
    cfg: &RunConfig,
    sc: &BuiltScenario,
    drive: usize,
    listen: usize,
    label: &str,
    progress: bool,
) -> Result<PortRun> {
    let src = SourceSpec {
        kind: SourceKind::Port { index: drive },
        waveform: cfg.waveform(),
        amplitude: cfg.source.amplitude,
    };
    let mut st = SolverState::new(&sc.grid, &sc.scene.ports, &sc.scene.probes, &[src])?;
    let records = run_chunked(&mut st, cfg.n_steps, label, progress)?;
    let trans = s21(
        &records.port_v[drive],
        &records.port_v[listen],
        records.dt,
        &Reference::SourceVoltage(&records.source_v),
    )?;
    let peaks = find_peaks(&trans.f, &trans.mag, cfg.band(), PROMINENCE_DB)?;
    let table = mode_table(&peaks, sc.scene.designed_f0, cfg.band());
    Ok(PortRun { records, trans, table })
}

/// Assemble the participation inputs from the voxelizer's wall-face list
/// and the matching phasor magnitudes of one accumulated mode.
pub fn wall_field_set(grid: &MaterialGrid, dft: &ModeDft) -> Result<WallFieldSet> {
    if grid.wall_faces.len() != dft.face_h_t.len() {
        return Err(Error::Analysis(format!(
            "wall-face mismatch: {} faces, {} phasors",
            grid.wall_faces.len(),
            dft.face_h_t.len()
        )));
    }
    let h = grid.spec.h;
    let faces = grid
        .wall_faces
        .iter()
        .zip(&dft.face_h_t)
        .map(|(sf, &h_t)| {
            let (u, v) = match sf.axis {
                0 => (1, 2),
                1 => (2, 0),
                _ => (0, 1),
            };
            WallFace { h_t, area: h[u] * h[v], sigma: sf.sigma }
        })
        .collect();
    Ok(WallFieldSet { f: dft.f, energy: dft.energy, faces })
}

/// Phase 2 of the loss analysis: re-drive the scenario with a narrow band
/// around the fitted resonance, let the drive die out, then accumulate the
/// mode phasors over the ringdown. The participation quotient is invariant
/// under the overall ringdown decay, so the record length only sets how
/// well neighbors are rejected.
pub fn mode_phasors(
    cfg: &RunConfig,
    sc: &BuiltScenario,
    f0: f64,
    label: &str,
    progress: bool,
) -> Result<ModeDft> {
    let wf = Waveform::band(f0 - PHASE2_HALF_BAND, f0 + PHASE2_HALF_BAND);
    let max_h = sc.spec.h.iter().cloned().fold(0.0f64, f64::max);
    wf.validate(max_h)?;
    let drive_end = wf.duration();
    let src = SourceSpec {
        kind: SourceKind::Port { index: 0 },
        waveform: wf,
        amplitude: cfg.source.amplitude,
    };
    let mut st = SolverState::new(&sc.grid, &sc.scene.ports, &sc.scene.probes, &[src])?;
    let settle = (drive_end / st.dt).ceil() as usize + 2000;
    run_chunked(&mut st, settle, &format!("{label} settle"), progress)?;
    st.set_analysis_frequencies(&[f0]);
    if progress {
        eprintln!("[{label}] accumulating phasors over {} steps", cfg.ringdown_steps);
    }
    let rec = st.run(cfg.ringdown_steps)?;
    rec.mode_dfts
        .into_iter()
        .next()
        .ok_or_else(|| Error::Analysis("phasor accumulation produced no mode".into()))
}

/// One gap-sweep row. `fit` is None when the tracked mode was lost at this
/// gap; such rows are emitted as nan and flagged on stderr.
#[derive(Debug, Clone)]
pub struct QcondPoint {
    pub delta: f64,
    pub fit: Option<ModeRecord>,
    pub qcond: Option<QCond>,
}

/// Track the chip resonance over the sweep by nearest-frequency
/// continuation against the previous gap's fit, anchored at the designed
/// trace frequency.
pub fn track_modes(tables: &[Vec<ModeRecord>], designed_f0: f64) -> Vec<Option<ModeRecord>> {
    let mut anchor = designed_f0;
    let mut out = Vec::with_capacity(tables.len());
    for table in tables {
        let best = table
            .iter()
            .min_by(|a, b| (a.f0 - anchor).abs().total_cmp(&(b.f0 - anchor).abs()))
            .filter(|p| (p.f0 - anchor).abs() <= TRACK_WINDOW)
            .cloned();
        if let Some(p) = &best {
            anchor = p.f0;
        }
        out.push(best);
    }
    out
}

/// Full Fig.-2(e)-style sweep: phase-1 transmission runs at every gap (in
/// parallel across workers), sequential mode tracking, then phase-2 phasor
/// runs and the participation quotient per tracked gap. Rows come back in
/// gap order regardless of completion order.
pub fn gap_sweep_qcond(cfg: &RunConfig, progress: bool) -> Result<Vec<QcondPoint>> {
    let deltas: Vec<f64> = cfg.sweep_deltas_mm.iter().map(|&d| d * 1e-3).collect();
    if deltas.is_empty() {
        return Err(Error::Config("sweep_deltas_mm must not be empty".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.worker_count())
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;

    let scenarios: Vec<BuiltScenario> = deltas
        .iter()
        .map(|&d| build_scenario(cfg, d))
        .collect::<Result<_>>()?;

    use rayon::prelude::*;
    let tables: Vec<Vec<ModeRecord>> = pool.install(|| {
        scenarios
            .par_iter()
            .enumerate()
            .map(|(i, sc)| {
                let label = format!("sweep {:.2} mm phase 1", deltas[i] * 1e3);
                Ok(port_transmission(cfg, sc, 0, 1, &label, progress)?.table)
            })
            .collect::<Result<_>>()
    })?;

    // The trace is designed at the large-gap operating point, so the
    // anchor fits the largest gap best and the resonance drifts most as
    // the gap closes: track gaps in descending order.
    let designed = scenarios[0].scene.designed_f0;
    let mut rev_tables = tables.clone();
    rev_tables.reverse();
    let mut tracked = track_modes(&rev_tables, designed);
    tracked.reverse();

    let points: Vec<QcondPoint> = pool.install(|| {
        scenarios
            .par_iter()
            .enumerate()
            .map(|(i, sc)| {
                let delta = deltas[i];
                let Some(fit) = tracked[i].clone() else {
                    eprintln!("[sweep {:.2} mm] tracked mode lost, row flagged", delta * 1e3);
                    return Ok(QcondPoint { delta, fit: None, qcond: None });
                };
                let label = format!("sweep {:.2} mm phase 2", delta * 1e3);
                let dft = mode_phasors(cfg, sc, fit.f0, &label, progress)?;
                let walls = wall_field_set(&sc.grid, &dft)?;
                let q = q_cond(&walls)?;
                Ok(QcondPoint { delta, fit: Some(fit), qcond: Some(q) })
            })
            .collect::<Result<_>>()
    })?;
    Ok(points)
}

/// Empty-enclosure eigenmode extraction: broadband dipoles, off-node
/// probes, Hann-windowed point spectra summed incoherently, then the
/// standard peak search over the interior of the driven band.
pub fn empty_box_modes(cfg: &RunConfig, progress: bool) -> Result<Vec<ModeRecord>> {
    let dims = [
        cfg.cavity_mm[0] * 1e-3,
        cfg.cavity_mm[1] * 1e-3,
        cfg.cavity_mm[2] * 1e-3,
    ];
    let scene = Scene::empty_box(dims, cfg.wall_sigma, cfg.band())?;
    let spec = cfg.box_grid()?;
    let max_h = spec.h.iter().cloned().fold(0.0f64, f64::max);
    let wf = cfg.waveform();
    wf.validate(max_h)?;
    let grid = voxelize(&scene, &spec)?;
    let frac = |f: [f64; 3]| [dims[0] * f[0], dims[1] * f[1], dims[2] * f[2]];
    let sources = [
        SourceSpec {
            kind: SourceKind::Dipole { position: frac([0.43, 0.56, 0.61]), axis: 2 },
            waveform: wf.clone(),
            amplitude: cfg.source.amplitude,
        },
        SourceSpec {
            kind: SourceKind::Dipole { position: frac([0.59, 0.33, 0.47]), axis: 1 },
            waveform: wf,
            amplitude: cfg.source.amplitude,
        },
    ];
    let mut st = SolverState::new(&grid, &[], &scene.probes, &sources)?;
    let rec = run_chunked(&mut st, cfg.n_steps, "modes", progress)?;

    let mut combined: Vec<f64> = Vec::new();
    let mut f_axis: Vec<f64> = Vec::new();
    for series_per_probe in &rec.e_point_series {
        for c in 0..3 {
            let s = spectrum(&series_per_probe[c], rec.dt, Window::Hann, 4)?;
            if combined.is_empty() {
                combined = vec![0.0; s.values.len()];
                f_axis = s.f.clone();
            }
            for (acc, v) in combined.iter_mut().zip(&s.values) {
                *acc += v.norm();
            }
        }
    }
    let peaks = find_peaks(&f_axis, &combined, modes_search_band(cfg), PROMINENCE_DB)?;
    Ok(mode_table(&peaks, 0.0, modes_search_band(cfg)))
}

/// Interior of the driven band: the outer 5% on each side is excluded
/// because the drive spectrum is at its -60 dB edges there.
pub fn modes_search_band(cfg: &RunConfig) -> (f64, f64) {
    let lo = cfg.source.f_lo_ghz * 1e9;
    let hi = cfg.source.f_hi_ghz * 1e9;
    let span = hi - lo;
    (lo + 0.05 * span, hi - 0.05 * span)
}

/// Mode-field |E| slice at the configured frequency: broadband phase-1 is
/// skipped; the slice frequency comes from the config (default: designed
/// trace resonance).
pub fn field_slice_run(cfg: &RunConfig, progress: bool) -> Result<(Slice, f64)> {
    let sc = build_scenario(cfg, cfg.gap_delta_mm * 1e-3)?;
    let f_slice = cfg
        .slice
        .frequency_ghz
        .map(|g| g * 1e9)
        .unwrap_or(sc.scene.designed_f0);
    let plane: Plane = cfg.slice.plane.parse()?;
    let (fixed_ax, _, _) = plane.axes();
    let index = cfg.slice.index.unwrap_or(sc.spec.dims[fixed_ax] / 2);
    let dft = mode_phasors(cfg, &sc, f_slice, "field-slice", progress)?;
    let src = SourceSpec {
        kind: SourceKind::Port { index: 0 },
        waveform: cfg.waveform(),
        amplitude: cfg.source.amplitude,
    };
    // A fresh state only hosts the slice extraction (geometry metadata).
    let st = SolverState::new(&sc.grid, &sc.scene.ports, &sc.scene.probes, &[src])?;
    let slice = st.mode_slice(&dft, plane, index)?;
    Ok((slice, f_slice))
}

// ---------------------------------------------------------------- artifacts

/// (f_Hz, s21_mag) rows over the valid positive-frequency bins.
pub fn transmission_csv(trans: &TransmissionSpectrum, header: &str) -> String {
    let mut out = String::from(header);
    out.push_str("f_Hz,s21_mag\n");
    let nyquist = match trans.f.len() {
        0 | 1 => f64::INFINITY,
        n => trans.f[n - 1] / 2.0,
    };
    for k in 0..trans.f.len() {
        if trans.valid[k] && trans.f[k] <= nyquist {
            let _ = writeln!(out, "{:.9e},{:.9e}", trans.f[k], trans.mag[k]);
        }
    }
    out
}

pub fn mode_table_csv(table: &[ModeRecord], header: &str) -> String {
    let mut out = String::from(header);
    out.push_str("f0_Hz,Q,amplitude,class\n");
    for m in table {
        let _ = writeln!(
            out,
            "{:.9e},{:.9e},{:.9e},{}",
            m.f0,
            m.q_loaded,
            m.amplitude,
            m.classification.label()
        );
    }
    out
}

/// Sweep rows: delta_mm, f0_Hz, Qcond, inv_Qcond, T1_us_at_f0. Lost rows
/// carry nan payloads so the gap axis stays complete.
pub fn sweep_csv(points: &[QcondPoint], header: &str) -> String {
    let mut out = String::from(header);
    out.push_str("delta_mm,f0_Hz,Qcond,inv_Qcond,T1_us_at_f0\n");
    for p in points {
        let delta_mm = p.delta * 1e3;
        match (&p.fit, &p.qcond) {
            (Some(fit), Some(QCond::Finite(q))) => {
                let t1_us = q_to_t1(*q, fit.f0).map(|t| t * 1e6).unwrap_or(f64::NAN);
                let _ = writeln!(
                    out,
                    "{delta_mm:.6},{:.9e},{:.9e},{:.9e},{t1_us:.6}",
                    fit.f0,
                    q,
                    1.0 / q
                );
            }
            (Some(fit), Some(QCond::Infinite)) => {
                let _ = writeln!(out, "{delta_mm:.6},{:.9e},inf,0.0,inf", fit.f0);
            }
            _ => {
                let _ = writeln!(out, "{delta_mm:.6},nan,nan,nan,nan");
            }
        }
    }
    out
}

/// Row-major |E| grid with plane, index, and units in the header.
pub fn slice_csv(slice: &Slice, f: f64, header: &str) -> String {
    let mut out = String::from(header);
    let plane = match slice.plane {
        Plane::Xy => "xy",
        Plane::Zx => "zx",
        Plane::Yz => "yz",
    };
    let _ = writeln!(out, "# plane: {plane}");
    let _ = writeln!(out, "# fixed-axis cell index: {}", slice.index);
    let _ = writeln!(out, "# frequency_Hz: {f:.9e}");
    let _ = writeln!(out, "# rows: {} cols: {} units: V/m", slice.rows, slice.cols);
    for r in 0..slice.rows {
        let row: Vec<String> = (0..slice.cols)
            .map(|c| format!("{:.9e}", slice.data[r * slice.cols + c]))
            .collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Classification;

    fn tiny_cfg() -> RunConfig {
        crate::config::parse_config("{}").unwrap()
    }

    #[test]
    fn artifact_header_carries_version_and_digest() {
        let cfg = tiny_cfg();
        let h = artifact_header("s21", &cfg);
        assert!(h.contains(TOOL_VERSION));
        assert!(h.contains(&cfg.digest()));
        assert!(h.lines().all(|l| l.starts_with('#')));
    }

    #[test]
    fn chunked_run_matches_single_run_bitwise() {
        let dims = [10e-3; 3];
        let scene = Scene::empty_box(dims, 4.5e9, (4e9, 8e9)).unwrap();
        let spec = GridSpec::for_extent(dims, [1e-3; 3]).unwrap();
        let grid = voxelize(&scene, &spec).unwrap();
        let src = SourceSpec {
            kind: SourceKind::Dipole { position: [5.5e-3, 4.5e-3, 3.5e-3], axis: 2 },
            waveform: Waveform::band(8e9, 14e9),
            amplitude: 1.0,
        };
        let run = |chunked: bool| -> ProbeRecords {
            let mut st = SolverState::new(&grid, &[], &scene.probes, &[src.clone()]).unwrap();
            if chunked {
                let a = st.run(17).unwrap();
                let b = st.run(46).unwrap();
                merge_records(vec![a, b])
            } else {
                st.run(63).unwrap()
            }
        };
        let a = run(false);
        let b = run(true);
        assert_eq!(a.n_steps, b.n_steps);
        for (x, y) in a.e_point_series.iter().zip(&b.e_point_series) {
            for c in 0..3 {
                assert_eq!(x[c], y[c], "chunking must not change the integration");
            }
        }
    }

    #[test]
    fn wall_field_set_covers_every_tagged_face() {
        let dims = [10e-3; 3];
        let scene = Scene::empty_box(dims, 4.5e9, (4e9, 8e9)).unwrap();
        let spec = GridSpec::for_extent(dims, [1e-3; 3]).unwrap();
        let grid = voxelize(&scene, &spec).unwrap();
        let src = SourceSpec {
            kind: SourceKind::Dipole { position: [5.5e-3, 4.5e-3, 3.5e-3], axis: 2 },
            waveform: Waveform::band(8e9, 14e9),
            amplitude: 1.0,
        };
        let mut st = SolverState::new(&grid, &[], &scene.probes, &[src]).unwrap();
        st.set_analysis_frequencies(&[12e9]);
        let rec = st.run(600).unwrap();
        let walls = wall_field_set(&grid, &rec.mode_dfts[0]).unwrap();
        assert_eq!(walls.faces.len(), grid.wall_faces.len());
        // 6 cube walls of 10x10 cells each.
        assert_eq!(walls.faces.len(), 600);
        assert!(walls.faces.iter().all(|f| (f.area - 1e-6).abs() < 1e-18));
        assert!(walls.energy > 0.0, "driven cavity must store energy");
        assert!(
            walls.faces.iter().any(|f| f.h_t > 0.0),
            "wall tangential H must be nonzero after driving"
        );
        match q_cond(&walls).unwrap() {
            QCond::Finite(q) => assert!(q > 0.0),
            QCond::Infinite => panic!("finite wall fields must give finite Q"),
        }
    }

    #[test]
    fn track_modes_follows_drift_and_flags_loss() {
        let mk = |f0: f64| ModeRecord {
            f0,
            q_loaded: 100.0,
            amplitude: 1.0,
            classification: Classification::ChipResonance,
            refined: true,
        };
        let tables = vec![
            vec![mk(7.7e9), mk(5.9e9)],
            vec![mk(7.45e9)],
            vec![mk(5.9e9)],
            vec![mk(7.3e9)],
        ];
        let tracked = track_modes(&tables, 7.7e9);
        assert_eq!(tracked[0].as_ref().unwrap().f0, 7.7e9);
        assert_eq!(tracked[1].as_ref().unwrap().f0, 7.45e9, "follows a 250 MHz drift");
        assert!(tracked[2].is_none(), "1.55 GHz jump exceeds the window");
        assert_eq!(
            tracked[3].as_ref().unwrap().f0,
            7.3e9,
            "anchor survives a lost point"
        );
    }

    #[test]
    fn sweep_csv_rows_in_order_with_nan_for_lost() {
        let fit = ModeRecord {
            f0: 7.5e9,
            q_loaded: 300.0,
            amplitude: 0.5,
            classification: Classification::ChipResonance,
            refined: true,
        };
        let points = vec![
            QcondPoint { delta: 0.0, fit: Some(fit.clone()), qcond: Some(QCond::Finite(2.0e4)) },
            QcondPoint { delta: 1.9e-3, fit: None, qcond: None },
        ];
        let csv = sweep_csv(&points, "# h\n");
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[1], "delta_mm,f0_Hz,Qcond,inv_Qcond,T1_us_at_f0");
        assert!(lines[2].starts_with("0.000000,7.500000000e9"));
        assert_eq!(lines[3], "1.900000,nan,nan,nan,nan");
    }

    #[test]
    fn transmission_csv_excludes_mirror_and_invalid_bins() {
        let trans = TransmissionSpectrum {
            f: vec![1e9, 2e9, 3e9, 4e9],
            mag: vec![0.5, 0.0, 0.25, 0.125],
            valid: vec![true, false, true, true],
            dt: 1e-12,
        };
        let csv = transmission_csv(&trans, "");
        let rows: Vec<&str> = csv.lines().skip(1).collect();
        assert_eq!(rows.len(), 1, "only valid bins below the record midpoint survive");
        assert!(rows[0].starts_with("1.000000000e9"));
    }
}

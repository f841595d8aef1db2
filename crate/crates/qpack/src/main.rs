//! Command entry point. All progress goes to stderr; stdout carries only
//! the validate report. Artifact files land in the --out directory.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qpack::config::{parse_config, RunConfig};
use qpack::error::{Error, Result};
use qpack::loss::{q_cond, q_to_t1, skin_depth, thermal_frequency};
use qpack::oracle::{distinct_frequencies, rect_modes, rect_te101_q, RectCavity};
use qpack::pipeline::{
    artifact_header, build_scenario, empty_box_modes, field_slice_run, gap_sweep_qcond,
    mode_phasors, mode_table_csv, port_transmission, slice_csv, sweep_csv, track_modes,
    transmission_csv, wall_field_set, write_artifact, QcondPoint,
};
use qpack::scene::{build_package, validate_scene};

#[derive(Parser)]
#[command(
    name = "qpack",
    version,
    about = "FDTD mode and conductor-loss analysis for chip-in-box microwave packages"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Eigenmode table of the empty enclosure (no chip, no pedestal)
    Modes(RunArgs),
    /// Two-port transmission spectrum and classified mode table
    S21(RunArgs),
    /// Conductor-loss Q of the tracked resonance at the configured gap
    Qcond(RunArgs),
    /// Q_cond versus chip-to-pedestal gap
    SweepGap(RunArgs),
    /// |E| magnitude slice of the accumulated mode field
    FieldSlice(RunArgs),
    /// Scene and oracle self-checks, no simulation
    Validate(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config, JSON; `{}` selects all defaults
    #[arg(long)]
    config: PathBuf,
    /// Directory receiving the artifact files
    #[arg(long)]
    out: PathBuf,
    /// Worker threads for sweep stages (beats config and QPACK_WORKERS)
    #[arg(long)]
    workers: Option<usize>,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig> {
        let doc = std::fs::read_to_string(&self.config).map_err(|e| {
            Error::Config(format!("cannot read config {}: {e}", self.config.display()))
        })?;
        let mut cfg = parse_config(&doc)?;
        if let Some(w) = self.workers {
            cfg.workers = Some(w);
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Modes(a) => cmd_modes(&a.load()?, &a.out),
        Cmd::S21(a) => cmd_s21(&a.load()?, &a.out),
        Cmd::Qcond(a) => cmd_qcond(&a.load()?, &a.out),
        Cmd::SweepGap(a) => cmd_sweep_gap(&a.load()?, &a.out),
        Cmd::FieldSlice(a) => cmd_field_slice(&a.load()?, &a.out),
        Cmd::Validate(a) => cmd_validate(&a.load()?, &a.out),
    }
}

fn done(path: &Path) {
    eprintln!("wrote {}", path.display());
}

fn cmd_modes(cfg: &RunConfig, out: &Path) -> Result<()> {
    let table = empty_box_modes(cfg, true)?;
    let path = out.join("modes.csv");
    write_artifact(&path, &mode_table_csv(&table, &artifact_header("modes", cfg)))?;
    done(&path);
    Ok(())
}

fn cmd_s21(cfg: &RunConfig, out: &Path) -> Result<()> {
    let sc = build_scenario(cfg, cfg.gap_delta_mm * 1e-3)?;
    let run = port_transmission(cfg, &sc, 0, 1, "s21", true)?;
    let spectrum_path = out.join("s21.csv");
    write_artifact(
        &spectrum_path,
        &transmission_csv(&run.trans, &artifact_header("s21", cfg)),
    )?;
    done(&spectrum_path);
    let table_path = out.join("mode_table.csv");
    write_artifact(
        &table_path,
        &mode_table_csv(&run.table, &artifact_header("s21", cfg)),
    )?;
    done(&table_path);
    Ok(())
}

fn cmd_qcond(cfg: &RunConfig, out: &Path) -> Result<()> {
    let delta = cfg.gap_delta_mm * 1e-3;
    let sc = build_scenario(cfg, delta)?;
    let run = port_transmission(cfg, &sc, 0, 1, "qcond phase 1", true)?;
    let tracked = track_modes(&[run.table], sc.scene.designed_f0);
    let fit = tracked
        .into_iter()
        .next()
        .flatten()
        .ok_or_else(|| Error::Analysis("no resonance within the tracking window".into()))?;
    let dft = mode_phasors(cfg, &sc, fit.f0, "qcond phase 2", true)?;
    let q = q_cond(&wall_field_set(&sc.grid, &dft)?)?;
    let point = QcondPoint { delta, fit: Some(fit), qcond: Some(q) };
    let path = out.join("qcond.csv");
    write_artifact(&path, &sweep_csv(&[point], &artifact_header("qcond", cfg)))?;
    done(&path);
    Ok(())
}

fn cmd_sweep_gap(cfg: &RunConfig, out: &Path) -> Result<()> {
    let points = gap_sweep_qcond(cfg, true)?;
    let path = out.join("sweep_gap.csv");
    write_artifact(&path, &sweep_csv(&points, &artifact_header("sweep-gap", cfg)))?;
    done(&path);
    Ok(())
}

fn cmd_field_slice(cfg: &RunConfig, out: &Path) -> Result<()> {
    let (slice, f) = field_slice_run(cfg, true)?;
    let path = out.join("field_slice.csv");
    write_artifact(&path, &slice_csv(&slice, f, &artifact_header("field-slice", cfg)))?;
    done(&path);
    Ok(())
}

/// Static checks: build the scene, run the placement validator, size the
/// grid, check the drive against the grid, and print oracle self-checks
/// for the configured enclosure. Exit code 2 on any finding.
fn cmd_validate(cfg: &RunConfig, out: &Path) -> Result<()> {
    let mut report = String::new();
    let params = cfg.package_params()?;
    let scene = build_package(&params)?;
    let findings = validate_scene(&scene).findings;

    let spec = cfg.package_grid(&params)?;
    report.push_str(&format!(
        "scene: {} shapes, {} ports, {} probes\n",
        scene.shapes.len(),
        scene.ports.len(),
        scene.probes.len()
    ));
    report.push_str(&format!(
        "grid: {} x {} x {} cells, h = [{:.3e}, {:.3e}, {:.3e}] m\n",
        spec.dims[0], spec.dims[1], spec.dims[2], spec.h[0], spec.h[1], spec.h[2]
    ));
    let max_h = spec.h.iter().cloned().fold(0.0f64, f64::max);
    cfg.waveform().validate(max_h)?;
    report.push_str("drive: resolved on this grid\n");

    let cav = RectCavity::new(
        params.cavity_dims[0],
        params.cavity_dims[1],
        params.cavity_dims[2],
        1.0,
    )?;
    let f_hi = cfg.source.f_hi_ghz * 1e9;
    let modes = rect_modes(&cav, f_hi)?;
    let distinct = distinct_frequencies(&modes, 1e-9);
    report.push_str(&format!(
        "empty enclosure below {:.2} GHz: {} modes, {} distinct frequencies\n",
        f_hi / 1e9,
        modes.len(),
        distinct.len()
    ));
    for f in distinct.iter().take(5) {
        report.push_str(&format!("  mode at {:.4} GHz\n", f / 1e9));
    }
    if let Some(f1) = distinct.first() {
        let q = rect_te101_q(&cav, *f1, params.wall_sigma)?;
        let delta_s = skin_depth(params.wall_sigma, *f1, 1.0)?;
        report.push_str(&format!(
            "lowest mode: wall Q = {q:.4e}, skin depth = {:.2} nm\n",
            delta_s * 1e9
        ));
    }
    report.push_str(&format!(
        "thermal frequency at 10 mK: {:.4} GHz\n",
        thermal_frequency(0.010)? / 1e9
    ));
    report.push_str(&format!(
        "Q = 4.5e6 at {:.2} GHz corresponds to T1 = {:.1} us\n",
        cfg.t1_reference() / 1e9,
        q_to_t1(4.5e6, cfg.t1_reference())? * 1e6
    ));

    if findings.is_empty() {
        report.push_str("placement: ok\n");
    } else {
        for f in &findings {
            report.push_str(&format!("placement finding: {f}\n"));
        }
    }

    let path = out.join("validate.txt");
    write_artifact(&path, &format!("{}{report}", artifact_header("validate", cfg)))?;
    done(&path);
    print!("{report}");
    if findings.is_empty() {
        Ok(())
    } else {
        Err(Error::Config(format!("{} placement findings", findings.len())))
    }
}

//! Leapfrog time-domain Maxwell integrator on the staggered (Yee) lattice
//! inside a closed perfect-conductor enclosure.
//!
//! E components live on cell edges, H components on cell faces. For cell
//! counts (nx, ny, nz) the arrays span
//!   Ex: (nx, ny+1, nz+1)   Hx: (nx+1, ny, nz)
//!   Ey: (nx+1, ny, nz+1)   Hy: (nx, ny+1, nz)
//!   Ez: (nx+1, ny+1, nz)   Hz: (nx, ny, nz+1)
//! x fastest in memory. A degenerate axis (single cell) collapses its node
//! direction to extent 1 and drops the derivative along it, which turns the
//! lattice into a lower-dimensional line or plane.
//!
//! Walls are lossless perfect conductors: boundary-tangential E is never
//! updated and stays exactly zero; conductor loss enters only in
//! post-processing. Lumped resistive ports, thin feed wires, sheet metal,
//! and soft dipole sources modify individual edges after the bulk update.
//!
//! Lattice updates run single-threaded: one state steps deterministically
//! regardless of worker count, and scenario-level parallelism (independent
//! sweep points) is where the cores go.

use crate::constants::{C0, EPS0, MU0};
use crate::error::{Error, Result};
use crate::grid::{cfl_timestep, MaterialGrid, SurfaceFace};
use num_complex::Complex64;

/// Gaussian-modulated sinusoid: sin(2 pi f_c (t - delay)) under a Gaussian
/// envelope whose spectrum falls to -60 dB at f_c +- bandwidth.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub f_center: f64,
    /// Half-width of the -60 dB spectral support (Hz).
    pub bandwidth: f64,
    pub delay: f64,
}

/// exp(-B^2 / (2 sigma_f^2)) = 1e-3 at the band edge.
const BAND_EDGE_SIGMAS: f64 = 3.716_922_420_755_789; // sqrt(2 ln 1e3)

impl Waveform {
    /// Flat coverage of [f_lo, f_hi] at -60 dB edges, delay long enough that
    /// the envelope is below -60 dB at t = 0.
    pub fn band(f_lo: f64, f_hi: f64) -> Waveform {
        let f_center = 0.5 * (f_lo + f_hi);
        let bandwidth = 0.5 * (f_hi - f_lo);
        let mut w = Waveform { f_center, bandwidth, delay: 0.0 };
        w.delay = 4.0 * w.sigma_t();
        w
    }

    pub fn sigma_t(&self) -> f64 {
        let sigma_f = self.bandwidth / BAND_EDGE_SIGMAS;
        1.0 / (2.0 * std::f64::consts::PI * sigma_f)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let u = t - self.delay;
        let s = self.sigma_t();
        (-u * u / (2.0 * s * s)).exp() * (2.0 * std::f64::consts::PI * self.f_center * u).sin()
    }

    /// Effectively over after this time (envelope below -60 dB).
    pub fn duration(&self) -> f64 {
        self.delay + 4.0 * self.sigma_t()
    }

    /// The spectrum must be below -60 dB both at DC and at the coarsest
    /// resolved frequency (20 cells per wavelength on the largest cell).
    pub fn validate(&self, max_h: f64) -> Result<()> {
        if !(self.f_center > 0.0 && self.bandwidth > 0.0) {
            return Err(Error::Config("waveform needs positive center and bandwidth".into()));
        }
        if self.f_center < self.bandwidth * (1.0 - 1e-12) {
            return Err(Error::Config(format!(
                "waveform spectrum reaches DC: f_center {:.3e} < bandwidth {:.3e}",
                self.f_center, self.bandwidth
            )));
        }
        let f_grid = C0 / (20.0 * max_h);
        if self.f_center + self.bandwidth > f_grid * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "waveform extends to {:.3e} Hz beyond the 20-cells-per-wavelength limit {:.3e} Hz",
                self.f_center + self.bandwidth,
                f_grid
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SourceKind {
    /// Soft additive E source on the edge nearest `position`, along `axis`.
    Dipole { position: [f64; 3], axis: usize },
    /// Thevenin drive on the lumped resistor of scene port `index`.
    Port { index: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    pub kind: SourceKind,
    pub waveform: Waveform,
    /// V for port drives, V/m per step for dipoles.
    pub amplitude: f64,
}

/// Steady-state phasors accumulated at one analysis frequency.
#[derive(Debug, Clone)]
pub struct ModeDft {
    pub f: f64,
    /// Complex E per edge, same layout as the solver fields.
    pub e_hat: [Vec<Complex64>; 3],
    /// |H_tangential| phasor magnitude per wall face, aligned with the
    /// grid's wall_faces list; sampled half a cell inside the wall.
    pub face_h_t: Vec<f64>,
    /// Total mode energy 2 * <W_E> = 1/2 sum eps |E_hat|^2 dV; at resonance
    /// electric and magnetic energy each average half of this.
    pub energy: f64,
    pub(crate) edims: [[usize; 3]; 3],
    pub(crate) dims: [usize; 3],
}

#[derive(Debug, Clone, Default)]
pub struct ProbeRecords {
    pub dt: f64,
    pub n_steps: usize,
    pub probe_names: Vec<String>,
    /// Per probe, per component, one sample per step (cell-centered V/m).
    pub e_point_series: Vec<[Vec<f64>; 3]>,
    pub port_names: Vec<String>,
    /// Voltage across each port gap (V), one sample per step.
    pub port_v: Vec<Vec<f64>>,
    /// Ampere-loop current around each port edge (A).
    pub port_i: Vec<Vec<f64>>,
    /// Thevenin open-circuit voltage of the driven port (V); zero series
    /// when no port is driven.
    pub source_v: Vec<f64>,
    pub mode_dfts: Vec<ModeDft>,
}

struct PortState {
    name: String,
    /// Pin direction: the resistor edge is an E edge along this axis,
    /// adjacent to the entry wall.
    axis: usize,
    /// Lattice index (x, y, z) of the resistor edge in the edge array of
    /// `axis`.
    idx: [usize; 3],
    flat: usize,
    beta: f64,
    /// dt / (R eps A): multiplies the source voltage.
    src_coef: f64,
    drive: Option<usize>,
}

struct DipoleState {
    comp: usize,
    flat: usize,
    source: usize,
}

struct ProbePoint {
    name: String,
    cell: [usize; 3],
}

/// Precomputed H samples for one wall face: tangential components averaged
/// to the face center from half a cell inside the field region.
struct FaceSample {
    comp_a: usize,
    a0: usize,
    a1: usize,
    comp_b: usize,
    b0: usize,
    b1: usize,
}

struct DftAcc {
    f: f64,
    e_hat: [Vec<Complex64>; 3],
    face_acc: Vec<[Complex64; 2]>,
    n_samples: usize,
}

pub struct SolverState {
    pub dims: [usize; 3],
    pub h: [f64; 3],
    pub dt: f64,
    deg: [bool; 3],
    edims: [[usize; 3]; 3],
    fdims: [[usize; 3]; 3],
    e: [Vec<f64>; 3],
    hf: [Vec<f64>; 3],
    /// dt / eps per edge; zero marks a perfect-conductor or wall edge.
    cb: [Vec<f64>; 3],
    db: f64,
    cell_eps: Vec<f64>,
    n: usize,
    sources: Vec<SourceSpec>,
    dipoles: Vec<DipoleState>,
    ports: Vec<PortState>,
    probes: Vec<ProbePoint>,
    wall_faces: Vec<SurfaceFace>,
    face_samples: Vec<FaceSample>,
    dfts: Vec<DftAcc>,
    /// Accumulate phasors every this many steps.
    dft_stride: usize,
}

fn transverse(c: usize) -> (usize, usize) {
    match c {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

#[inline]
fn flat(d: [usize; 3], i: usize, j: usize, k: usize) -> usize {
    (k * d[1] + j) * d[0] + i
}

impl SolverState {
    fn edge_dims(dims: [usize; 3], c: usize) -> [usize; 3] {
        let mut d = [0; 3];
        for ax in 0..3 {
            d[ax] = if ax == c {
                dims[ax]
            } else if dims[ax] == 1 {
                1
            } else {
                dims[ax] + 1
            };
        }
        d
    }

    fn face_dims(dims: [usize; 3], c: usize) -> [usize; 3] {
        let mut d = [0; 3];
        for ax in 0..3 {
            d[ax] = if ax == c {
                if dims[ax] == 1 { 1 } else { dims[ax] + 1 }
            } else {
                dims[ax]
            };
        }
        d
    }

    /// Mean eps_r of the (up to four) cells sharing edge (c; i, j, k), and
    /// whether any of them is a conductor. Edge coordinates use cell index
    /// along c and node indices transverse.
    fn edge_environment(
        grid: &MaterialGrid,
        c: usize,
        idx: [usize; 3],
    ) -> (f64, bool) {
        let dims = grid.spec.dims;
        let (u, v) = transverse(c);
        let adj = |ax: usize, node: usize| -> Vec<usize> {
            if dims[ax] == 1 {
                vec![0]
            } else {
                let mut cells = Vec::with_capacity(2);
                if node > 0 {
                    cells.push(node - 1);
                }
                if node < dims[ax] {
                    cells.push(node);
                }
                cells
            }
        };
        let mut eps_sum = 0.0;
        let mut count = 0.0;
        let mut any_pec = false;
        for &cu in &adj(u, idx[u]) {
            for &cv in &adj(v, idx[v]) {
                let mut cell = [0; 3];
                cell[c] = idx[c];
                cell[u] = cu;
                cell[v] = cv;
                if grid.is_pec_cell(cell[0], cell[1], cell[2]) {
                    any_pec = true;
                }
                eps_sum += grid.cell_eps_r(cell[0], cell[1], cell[2]);
                count += 1.0;
            }
        }
        (eps_sum / count, any_pec)
    }

    pub fn new(
        grid: &MaterialGrid,
        ports: &[crate::scene::PortSpec],
        probes: &[crate::scene::ProbeSpec],
        sources: &[SourceSpec],
    ) -> Result<SolverState> {
        let dims = grid.spec.dims;
        let h = grid.spec.h;
        let origin = grid.origin;
        let deg = [dims[0] == 1, dims[1] == 1, dims[2] == 1];
        // Degenerate axes carry no derivative and must not tighten the step.
        let mut h_cfl = h;
        for ax in 0..3 {
            if deg[ax] {
                h_cfl[ax] = f64::INFINITY;
            }
        }
        let dt = cfl_timestep(h_cfl);
        for m in &grid.materials {
            if (m.mu_r - 1.0).abs() > 1e-12 {
                return Err(Error::Config(format!(
                    "material {} has mu_r != 1, not supported by the integrator",
                    m.name
                )));
            }
        }
        let max_h = (0..3)
            .filter(|&ax| !deg[ax])
            .map(|ax| h[ax])
            .fold(0.0, f64::max);
        for s in sources {
            s.waveform.validate(if max_h > 0.0 { max_h } else { h[0] })?;
        }

        let edims = [
            Self::edge_dims(dims, 0),
            Self::edge_dims(dims, 1),
            Self::edge_dims(dims, 2),
        ];
        let fdims = [
            Self::face_dims(dims, 0),
            Self::face_dims(dims, 1),
            Self::face_dims(dims, 2),
        ];
        let alloc = |d: [usize; 3]| vec![0.0; d[0] * d[1] * d[2]];
        let e = [alloc(edims[0]), alloc(edims[1]), alloc(edims[2])];
        let hf = [alloc(fdims[0]), alloc(fdims[1]), alloc(fdims[2])];

        // Per-edge update coefficient; 0 freezes the edge at zero (domain
        // walls, conductor volumes, sheet rims, feed wires).
        let mut cb = [alloc(edims[0]), alloc(edims[1]), alloc(edims[2])];
        for c in 0..3 {
            let ed = edims[c];
            let (u, v) = transverse(c);
            for k in 0..ed[2] {
                for j in 0..ed[1] {
                    for i in 0..ed[0] {
                        let idx = [i, j, k];
                        let on_wall = (!deg[u] && (idx[u] == 0 || idx[u] == dims[u]))
                            || (!deg[v] && (idx[v] == 0 || idx[v] == dims[v]));
                        if on_wall {
                            continue;
                        }
                        let (eps, any_pec) = Self::edge_environment(grid, c, idx);
                        if !any_pec {
                            cb[c][flat(ed, i, j, k)] = dt / (EPS0 * eps);
                        }
                    }
                }
            }
        }

        // Sheet conductors force their rim edges to zero.
        for a in 0..3 {
            let fd = {
                let mut d = dims;
                d[a] += 1;
                d
            };
            let (u, v) = transverse(a);
            for k in 0..fd[2] {
                for j in 0..fd[1] {
                    for i in 0..fd[0] {
                        if !grid.pec_faces[a][(k * fd[1] + j) * fd[0] + i] {
                            continue;
                        }
                        let idx = [i, j, k];
                        // Rim edges: component u spans the face along u at the
                        // two v-node rows, and vice versa.
                        for (ec, other) in [(u, v), (v, u)] {
                            let ed = edims[ec];
                            for off in 0..2 {
                                let mut eidx = idx;
                                eidx[other] += off;
                                if eidx[other] >= ed[other] {
                                    continue;
                                }
                                cb[ec][flat(ed, eidx[0], eidx[1], eidx[2])] = 0.0;
                            }
                        }
                    }
                }
            }
        }

        let mut cell_eps = vec![0.0; dims[0] * dims[1] * dims[2]];
        for k in 0..dims[2] {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    cell_eps[(k * dims[1] + j) * dims[0] + i] = grid.cell_eps_r(i, j, k);
                }
            }
        }

        let node = |p: f64, ax: usize| -> usize {
            ((p - origin[ax]) / h[ax]).round().max(0.0) as usize
        };
        let mut port_states = Vec::new();
        for spec in ports {
            if dims.iter().any(|&d| d == 1) {
                return Err(Error::Config("ports need a full 3D grid".into()));
            }
            let c = spec.axis;
            if c > 2 {
                return Err(Error::Config(format!(
                    "port {}: axis must be 0, 1, or 2",
                    spec.name
                )));
            }
            let (u, v) = ((c + 1) % 3, (c + 2) % 3);
            let ed = edims[c];
            let mut idx = [0usize; 3];
            idx[u] = node(spec.lateral[0], u).clamp(1, dims[u] - 1);
            idx[v] = node(spec.lateral[1], v).clamp(1, dims[v] - 1);
            let tip_cell = node(spec.tip, c);
            if tip_cell >= dims[c] {
                return Err(Error::Placement(format!(
                    "port {}: pin tip outside the domain",
                    spec.name
                )));
            }
            // Feed pin: frozen E edges along `c` from the entry wall to the
            // tip, with the lumped resistor in the wall-adjacent cell.
            let (port_m, wire) = if spec.side >= 0 {
                (dims[c] - 1, tip_cell..dims[c] - 1)
            } else {
                (0, 1..tip_cell)
            };
            for m in wire {
                idx[c] = m;
                cb[c][flat(ed, idx[0], idx[1], idx[2])] = 0.0;
            }
            idx[c] = port_m;
            let fl = flat(ed, idx[0], idx[1], idx[2]);
            if cb[c][fl] == 0.0 {
                return Err(Error::Placement(format!(
                    "port {}: resistor edge lands inside a conductor",
                    spec.name
                )));
            }
            if !(spec.resistance > 0.0) {
                return Err(Error::Config(format!("port {}: resistance must be positive", spec.name)));
            }
            let eps_edge = dt / cb[c][fl] / EPS0;
            let area = h[u] * h[v];
            let beta = dt * h[c] / (2.0 * spec.resistance * EPS0 * eps_edge * area);
            let src_coef = dt / (spec.resistance * EPS0 * eps_edge * area);
            port_states.push(PortState {
                name: spec.name.clone(),
                axis: c,
                idx,
                flat: fl,
                beta,
                src_coef,
                drive: None,
            });
        }

        let mut dipoles = Vec::new();
        for (si, s) in sources.iter().enumerate() {
            match &s.kind {
                SourceKind::Port { index } => {
                    let port = port_states.get_mut(*index).ok_or_else(|| {
                        Error::Config(format!("source references missing port {index}"))
                    })?;
                    port.drive = Some(si);
                }
                SourceKind::Dipole { position, axis } => {
                    let c = *axis;
                    if c > 2 {
                        return Err(Error::Config("dipole axis must be 0, 1, or 2".into()));
                    }
                    let ed = edims[c];
                    let mut idx = [0usize; 3];
                    for ax in 0..3 {
                        let x = (position[ax] - origin[ax]) / h[ax];
                        idx[ax] = if ax == c {
                            (x - 0.5).round().max(0.0) as usize
                        } else if deg[ax] {
                            0
                        } else {
                            x.round().max(0.0) as usize
                        };
                        idx[ax] = idx[ax].min(ed[ax] - 1);
                    }
                    let fl = flat(ed, idx[0], idx[1], idx[2]);
                    if cb[c][fl] == 0.0 {
                        return Err(Error::Placement(format!(
                            "dipole at {position:?} lands on a conductor or wall edge"
                        )));
                    }
                    dipoles.push(DipoleState { comp: c, flat: fl, source: si });
                }
            }
        }

        let probe_points = probes
            .iter()
            .map(|p| {
                let mut cell = [0; 3];
                for ax in 0..3 {
                    let c = ((p.position[ax] - origin[ax]) / h[ax]).floor().max(0.0) as usize;
                    cell[ax] = c.min(dims[ax] - 1);
                }
                ProbePoint { name: p.name.clone(), cell }
            })
            .collect();

        let face_samples = grid
            .wall_faces
            .iter()
            .map(|f| Self::face_sample(dims, fdims, f))
            .collect();

        Ok(SolverState {
            dims,
            h,
            dt,
            deg,
            edims,
            fdims,
            e,
            hf,
            cb,
            db: dt / MU0,
            cell_eps,
            n: 0,
            sources: sources.to_vec(),
            dipoles,
            ports: port_states,
            probes: probe_points,
            wall_faces: grid.wall_faces.clone(),
            face_samples,
            dfts: Vec::new(),
            dft_stride: 4,
        })
    }

    /// Tangential-H averaging stencil for one wall face; the samples sit half
    /// a cell inside the field region (standard surface-impedance
    /// collocation).
    fn face_sample(dims: [usize; 3], fdims: [[usize; 3]; 3], face: &SurfaceFace) -> FaceSample {
        let a = face.axis;
        let (u, v) = transverse(a);
        // Interior cell index along the normal.
        let na = if face.side > 0 { face.idx[a] } else { face.idx[a] - 1 };
        let mut base = face.idx;
        base[a] = na;
        // Tangential component along u: faces normal to u at nodes idx[u]
        // and idx[u] + 1.
        let mk = |comp: usize, shift_ax: usize| -> (usize, usize) {
            let d = fdims[comp];
            let mut p0 = base;
            let mut p1 = base;
            p1[shift_ax] += 1;
            p1[shift_ax] = p1[shift_ax].min(d[shift_ax] - 1);
            p0[shift_ax] = p0[shift_ax].min(d[shift_ax] - 1);
            (flat(d, p0[0], p0[1], p0[2]), flat(d, p1[0], p1[1], p1[2]))
        };
        let _ = dims;
        let (a0, a1) = mk(u, u);
        let (b0, b1) = mk(v, v);
        FaceSample { comp_a: u, a0, a1, comp_b: v, b0, b1 }
    }

    pub fn t(&self) -> f64 {
        self.n as f64 * self.dt
    }

    pub fn step_count(&self) -> usize {
        self.n
    }

    /// Register analysis frequencies for on-the-fly phasor accumulation;
    /// resets any previous accumulation.
    pub fn set_analysis_frequencies(&mut self, freqs: &[f64]) {
        let alloc = |d: [usize; 3]| vec![Complex64::new(0.0, 0.0); d[0] * d[1] * d[2]];
        self.dfts = freqs
            .iter()
            .map(|&f| DftAcc {
                f,
                e_hat: [alloc(self.edims[0]), alloc(self.edims[1]), alloc(self.edims[2])],
                face_acc: vec![[Complex64::new(0.0, 0.0); 2]; self.wall_faces.len()],
                n_samples: 0,
            })
            .collect();
    }

    fn advance_h(&mut self) {
        let inv = [1.0 / self.h[0], 1.0 / self.h[1], 1.0 / self.h[2]];
        let db = self.db;
        let (degx, degy, degz) = (self.deg[0], self.deg[1], self.deg[2]);
        let (edx, edy, edz) = (self.edims[0], self.edims[1], self.edims[2]);
        let (fdx, fdy, fdz) = (self.fdims[0], self.fdims[1], self.fdims[2]);

        // Hx += db ((dEy/dz) - (dEz/dy))
        {
            let (ey, ez) = (&self.e[1], &self.e[2]);
            let hx = &mut self.hf[0];
            for k in 0..fdx[2] {
                for j in 0..fdx[1] {
                    let row = flat(fdx, 0, j, k);
                    let eyk = flat(edy, 0, j, k);
                    let eyk1 = flat(edy, 0, j, if degz { k } else { k + 1 });
                    let ezj = flat(edz, 0, j, k);
                    let ezj1 = flat(edz, 0, if degy { j } else { j + 1 }, k);
                    for i in 0..fdx[0] {
                        let dey_dz = (ey[eyk1 + i] - ey[eyk + i]) * inv[2];
                        let dez_dy = (ez[ezj1 + i] - ez[ezj + i]) * inv[1];
                        hx[row + i] += db * (dey_dz - dez_dy);
                    }
                }
            }
        }
        // Hy += db ((dEz/dx) - (dEx/dz))
        {
            let (ez, ex) = (&self.e[2], &self.e[0]);
            let hy = &mut self.hf[1];
            for k in 0..fdy[2] {
                for j in 0..fdy[1] {
                    let row = flat(fdy, 0, j, k);
                    let ezi = flat(edz, 0, j, k);
                    let exk = flat(edx, 0, j, k);
                    let exk1 = flat(edx, 0, j, if degz { k } else { k + 1 });
                    for i in 0..fdy[0] {
                        let i1 = if degx { i } else { i + 1 };
                        let dez_dx = (ez[ezi + i1] - ez[ezi + i]) * inv[0];
                        let dex_dz = (ex[exk1 + i] - ex[exk + i]) * inv[2];
                        hy[row + i] += db * (dez_dx - dex_dz);
                    }
                }
            }
        }
        // Hz += db ((dEx/dy) - (dEy/dx))
        {
            let (ex, ey) = (&self.e[0], &self.e[1]);
            let hz = &mut self.hf[2];
            for k in 0..fdz[2] {
                for j in 0..fdz[1] {
                    let row = flat(fdz, 0, j, k);
                    let exj = flat(edx, 0, j, k);
                    let exj1 = flat(edx, 0, if degy { j } else { j + 1 }, k);
                    let eyi = flat(edy, 0, j, k);
                    for i in 0..fdz[0] {
                        let i1 = if degx { i } else { i + 1 };
                        let dex_dy = (ex[exj1 + i] - ex[exj + i]) * inv[1];
                        let dey_dx = (ey[eyi + i1] - ey[eyi + i]) * inv[0];
                        hz[row + i] += db * (dex_dy - dey_dx);
                    }
                }
            }
        }
    }

    fn advance_e(&mut self) {
        let inv = [1.0 / self.h[0], 1.0 / self.h[1], 1.0 / self.h[2]];
        let (degx, degy, degz) = (self.deg[0], self.deg[1], self.deg[2]);
        let (edx, edy, edz) = (self.edims[0], self.edims[1], self.edims[2]);
        let (fdx, fdy, fdz) = (self.fdims[0], self.fdims[1], self.fdims[2]);

        // Ex += cb ((dHz/dy) - (dHy/dz)); rows with j or k on a wall have
        // cb = 0 throughout, and the stencil below stays in bounds because
        // those rows read backward differences only after index 1.
        {
            let (hz, hy) = (&self.hf[2], &self.hf[1]);
            let ex = &mut self.e[0];
            let cbx = &self.cb[0];
            let (k_lo, k_hi) = if degz { (0, 1) } else { (1, edx[2] - 1) };
            let (j_lo, j_hi) = if degy { (0, 1) } else { (1, edx[1] - 1) };
            for k in k_lo..k_hi {
                for j in j_lo..j_hi {
                    let row = flat(edx, 0, j, k);
                    let hzj = flat(fdz, 0, j, k);
                    let hzj0 = flat(fdz, 0, if degy { j } else { j - 1 }, k);
                    let hyk = flat(fdy, 0, j, k);
                    let hyk0 = flat(fdy, 0, j, if degz { k } else { k - 1 });
                    for i in 0..edx[0] {
                        let dhz_dy = (hz[hzj + i] - hz[hzj0 + i]) * inv[1];
                        let dhy_dz = (hy[hyk + i] - hy[hyk0 + i]) * inv[2];
                        ex[row + i] += cbx[row + i] * (dhz_dy - dhy_dz);
                    }
                }
            }
        }
        // Ey += cb ((dHx/dz) - (dHz/dx))
        {
            let (hx, hz) = (&self.hf[0], &self.hf[2]);
            let ey = &mut self.e[1];
            let cby = &self.cb[1];
            let (k_lo, k_hi) = if degz { (0, 1) } else { (1, edy[2] - 1) };
            let (i_lo, i_hi) = if degx { (0, edy[0]) } else { (1, edy[0] - 1) };
            for k in k_lo..k_hi {
                for j in 0..edy[1] {
                    let row = flat(edy, 0, j, k);
                    let hxk = flat(fdx, 0, j, k);
                    let hxk0 = flat(fdx, 0, j, if degz { k } else { k - 1 });
                    let hzi = flat(fdz, 0, j, k);
                    for i in i_lo..i_hi {
                        let dhx_dz = (hx[hxk + i] - hx[hxk0 + i]) * inv[2];
                        let i0 = if degx { i } else { i - 1 };
                        let dhz_dx = (hz[hzi + i] - hz[hzi + i0]) * inv[0];
                        ey[row + i] += cby[row + i] * (dhx_dz - dhz_dx);
                    }
                }
            }
        }
        // Ez += cb ((dHy/dx) - (dHx/dy))
        {
            let (hy, hx) = (&self.hf[1], &self.hf[0]);
            let ez = &mut self.e[2];
            let cbz = &self.cb[2];
            let (j_lo, j_hi) = if degy { (0, 1) } else { (1, edz[1] - 1) };
            let (i_lo, i_hi) = if degx { (0, edz[0]) } else { (1, edz[0] - 1) };
            for k in 0..edz[2] {
                for j in j_lo..j_hi {
                    let row = flat(edz, 0, j, k);
                    let hyj = flat(fdy, 0, j, k);
                    let hxj = flat(fdx, 0, j, k);
                    let hxj0 = flat(fdx, 0, if degy { j } else { j - 1 }, k);
                    for i in i_lo..i_hi {
                        let i0 = if degx { i } else { i - 1 };
                        let dhy_dx = (hy[hyj + i] - hy[hyj + i0]) * inv[0];
                        let dhx_dy = (hx[hxj + i] - hx[hxj0 + i]) * inv[1];
                        ez[row + i] += cbz[row + i] * (dhy_dx - dhx_dy);
                    }
                }
            }
        }
    }

    /// Ampere loop around the resistor edge, right-handed about `axis`.
    fn port_loop_current(&self, p: &PortState) -> f64 {
        let c = p.axis;
        let (u, v) = ((c + 1) % 3, (c + 2) % 3);
        let (hu, hv) = (&self.hf[u], &self.hf[v]);
        let (fdu, fdv) = (self.fdims[u], self.fdims[v]);
        let mut a = p.idx;
        let at = |d: [usize; 3], b: [usize; 3]| flat(d, b[0], b[1], b[2]);
        let hv_hi = hv[at(fdv, a)];
        let hu_hi = hu[at(fdu, a)];
        a[u] -= 1;
        let hv_lo = hv[at(fdv, a)];
        a[u] += 1;
        a[v] -= 1;
        let hu_lo = hu[at(fdu, a)];
        (hv_hi - hv_lo) * self.h[v] + (hu_lo - hu_hi) * self.h[u]
    }

    /// One leapfrog step: H advances half a step from curl E, E a full step
    /// from curl H, then lumped ports and soft sources act on their edges.
    pub fn step(&mut self) -> Result<()> {
        self.advance_h();

        // Port update rewrites the bulk result with the semi-implicit
        // resistor form, so remember the pre-update field.
        let e_old: Vec<f64> = self.ports.iter().map(|p| self.e[p.axis][p.flat]).collect();
        self.advance_e();
        let t_new = (self.n + 1) as f64 * self.dt;
        for (pi, p) in self.ports.iter().enumerate() {
            let curl_term = self.e[p.axis][p.flat] - e_old[pi];
            let vs = match p.drive {
                Some(si) => {
                    let s = &self.sources[si];
                    s.amplitude * s.waveform.eval(t_new)
                }
                None => 0.0,
            };
            self.e[p.axis][p.flat] =
                ((1.0 - p.beta) * e_old[pi] + curl_term + p.src_coef * vs) / (1.0 + p.beta);
        }
        for d in &self.dipoles {
            let s = &self.sources[d.source];
            self.e[d.comp][d.flat] += s.amplitude * s.waveform.eval(t_new);
        }
        self.n += 1;

        if self.n % 256 == 0 {
            for c in 0..3 {
                if !self.e[c].iter().all(|v| v.is_finite())
                    || !self.hf[c].iter().all(|v| v.is_finite())
                {
                    return Err(Error::Instability {
                        step: self.n,
                        detail: format!("non-finite component {c} field"),
                    });
                }
            }
        }
        Ok(())
    }

    fn accumulate_dfts(&mut self) {
        if self.dfts.is_empty() || self.n % self.dft_stride != 0 {
            return;
        }
        let t_e = self.n as f64 * self.dt;
        let t_h = t_e - 0.5 * self.dt;
        let scale = self.dft_stride as f64 * self.dt;
        for acc in &mut self.dfts {
            let w = 2.0 * std::f64::consts::PI * acc.f;
            let rot_e = Complex64::from_polar(scale, -w * t_e);
            let rot_h = Complex64::from_polar(scale, -w * t_h);
            for c in 0..3 {
                let src = &self.e[c];
                let dst = &mut acc.e_hat[c];
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d += rot_e * *s;
                }
            }
            for (fa, fs) in acc.face_acc.iter_mut().zip(self.face_samples.iter()) {
                let ha = 0.5 * (self.hf[fs.comp_a][fs.a0] + self.hf[fs.comp_a][fs.a1]);
                let hb = 0.5 * (self.hf[fs.comp_b][fs.b0] + self.hf[fs.comp_b][fs.b1]);
                fa[0] += rot_h * ha;
                fa[1] += rot_h * hb;
            }
            acc.n_samples += 1;
        }
    }

    /// Advance n_steps, recording probes, ports, and phasor accumulators
    /// each step. n_steps = 0 returns empty records.
    pub fn run(&mut self, n_steps: usize) -> Result<ProbeRecords> {
        let mut rec = ProbeRecords {
            dt: self.dt,
            n_steps,
            probe_names: self.probes.iter().map(|p| p.name.clone()).collect(),
            e_point_series: self
                .probes
                .iter()
                .map(|_| {
                    [
                        Vec::with_capacity(n_steps),
                        Vec::with_capacity(n_steps),
                        Vec::with_capacity(n_steps),
                    ]
                })
                .collect(),
            port_names: self.ports.iter().map(|p| p.name.clone()).collect(),
            port_v: vec![Vec::with_capacity(n_steps); self.ports.len()],
            port_i: vec![Vec::with_capacity(n_steps); self.ports.len()],
            source_v: Vec::with_capacity(n_steps),
            mode_dfts: Vec::new(),
        };
        for _ in 0..n_steps {
            self.step()?;
            self.accumulate_dfts();
            let t = self.t();
            let mut vs_now = 0.0;
            for (pi, p) in self.ports.iter().enumerate() {
                rec.port_v[pi].push(-self.e[p.axis][p.flat] * self.h[p.axis]);
                rec.port_i[pi].push(self.port_loop_current(p));
                if let Some(si) = p.drive {
                    let s = &self.sources[si];
                    vs_now = s.amplitude * s.waveform.eval(t);
                }
            }
            rec.source_v.push(vs_now);
            for (qi, q) in self.probes.iter().enumerate() {
                let ec = self.cell_center_e(q.cell);
                for c in 0..3 {
                    rec.e_point_series[qi][c].push(ec[c]);
                }
            }
        }
        rec.mode_dfts = self.finalize_dfts();
        Ok(rec)
    }

    fn finalize_dfts(&mut self) -> Vec<ModeDft> {
        let dfts = std::mem::take(&mut self.dfts);
        dfts.into_iter()
            .map(|acc| {
                let energy = self.phasor_energy(&acc.e_hat);
                let face_h_t = acc
                    .face_acc
                    .iter()
                    .map(|fa| (fa[0].norm_sqr() + fa[1].norm_sqr()).sqrt())
                    .collect();
                ModeDft {
                    f: acc.f,
                    e_hat: acc.e_hat,
                    face_h_t,
                    energy,
                    edims: self.edims,
                    dims: self.dims,
                }
            })
            .collect()
    }

    /// Trapezoidal edge weight: half on non-degenerate transverse boundary
    /// node planes. Uniform fields integrate exactly.
    fn edge_weight(&self, c: usize, idx: [usize; 3]) -> f64 {
        let (u, v) = transverse(c);
        let mut w = 1.0;
        for ax in [u, v] {
            if !self.deg[ax] && (idx[ax] == 0 || idx[ax] == self.dims[ax]) {
                w *= 0.5;
            }
        }
        w
    }

    fn edge_eps(&self, c: usize, idx: [usize; 3]) -> f64 {
        let (u, v) = transverse(c);
        let adj = |ax: usize, node: usize| -> (usize, usize) {
            if self.deg[ax] {
                (0, 1)
            } else if node == 0 {
                (0, 1)
            } else if node == self.dims[ax] {
                (node - 1, node)
            } else {
                (node - 1, node + 1)
            }
        };
        let (u0, u1) = adj(u, idx[u]);
        let (v0, v1) = adj(v, idx[v]);
        let mut sum = 0.0;
        let mut count = 0.0;
        for cu in u0..u1 {
            for cv in v0..v1 {
                let mut cell = [0; 3];
                cell[c] = idx[c];
                cell[u] = cu;
                cell[v] = cv;
                sum += self.cell_eps[(cell[2] * self.dims[1] + cell[1]) * self.dims[0] + cell[0]];
                count += 1.0;
            }
        }
        sum / count
    }

    fn phasor_energy(&self, e_hat: &[Vec<Complex64>; 3]) -> f64 {
        let dv = self.h[0] * self.h[1] * self.h[2];
        let mut w = 0.0;
        for c in 0..3 {
            let ed = self.edims[c];
            for k in 0..ed[2] {
                for j in 0..ed[1] {
                    for i in 0..ed[0] {
                        let idx = [i, j, k];
                        let a = e_hat[c][flat(ed, i, j, k)].norm_sqr();
                        if a > 0.0 {
                            w += 0.5
                                * EPS0
                                * self.edge_eps(c, idx)
                                * a
                                * dv
                                * self.edge_weight(c, idx);
                        }
                    }
                }
            }
        }
        w
    }

    /// W = 1/2 integral (eps |E|^2 + mu |H|^2) dV with trapezoidal edge/face
    /// quadrature; E is taken at the current step, H at the half step just
    /// behind it (staggered collocation).
    pub fn total_energy(&self) -> f64 {
        let dv = self.h[0] * self.h[1] * self.h[2];
        let mut w = 0.0;
        for c in 0..3 {
            let ed = self.edims[c];
            for k in 0..ed[2] {
                for j in 0..ed[1] {
                    for i in 0..ed[0] {
                        let idx = [i, j, k];
                        let val = self.e[c][flat(ed, i, j, k)];
                        if val != 0.0 {
                            w += 0.5
                                * EPS0
                                * self.edge_eps(c, idx)
                                * val
                                * val
                                * dv
                                * self.edge_weight(c, idx);
                        }
                    }
                }
            }
        }
        for c in 0..3 {
            let fd = self.fdims[c];
            for k in 0..fd[2] {
                for j in 0..fd[1] {
                    for i in 0..fd[0] {
                        let idx = [i, j, k];
                        let val = self.hf[c][flat(fd, i, j, k)];
                        if val != 0.0 {
                            let wt = if !self.deg[c] && (idx[c] == 0 || idx[c] == self.dims[c]) {
                                0.5
                            } else {
                                1.0
                            };
                            w += 0.5 * MU0 * val * val * dv * wt;
                        }
                    }
                }
            }
        }
        w
    }

    /// Discrete leapfrog invariant: 1/2 integral (eps E_prev.E + mu |H|^2) dV,
    /// where `e_prev` is a snapshot of the E arrays taken immediately before
    /// the last step() call. The product form centers both terms on the same
    /// half step, so in a closed lossless region the value is conserved to
    /// rounding, without the O((w dt)^2) collocation ripple of total_energy.
    pub fn leapfrog_invariant(&self, e_prev: &[Vec<f64>; 3]) -> f64 {
        let dv = self.h[0] * self.h[1] * self.h[2];
        let mut w = 0.0;
        for c in 0..3 {
            let ed = self.edims[c];
            for k in 0..ed[2] {
                for j in 0..ed[1] {
                    for i in 0..ed[0] {
                        let idx = [i, j, k];
                        let n = flat(ed, i, j, k);
                        let val = self.e[c][n] * e_prev[c][n];
                        if val != 0.0 {
                            w += 0.5
                                * EPS0
                                * self.edge_eps(c, idx)
                                * val
                                * dv
                                * self.edge_weight(c, idx);
                        }
                    }
                }
            }
        }
        for c in 0..3 {
            let fd = self.fdims[c];
            for k in 0..fd[2] {
                for j in 0..fd[1] {
                    for i in 0..fd[0] {
                        let idx = [i, j, k];
                        let val = self.hf[c][flat(fd, i, j, k)];
                        if val != 0.0 {
                            let wt = if !self.deg[c] && (idx[c] == 0 || idx[c] == self.dims[c]) {
                                0.5
                            } else {
                                1.0
                            };
                            w += 0.5 * MU0 * val * val * dv * wt;
                        }
                    }
                }
            }
        }
        w
    }

    /// Cell-centered E vector: each component averaged over its (up to four)
    /// edges around the cell.
    fn cell_center_e(&self, cell: [usize; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for c in 0..3 {
            let ed = self.edims[c];
            let (u, v) = transverse(c);
            let nodes = |ax: usize| -> (usize, usize) {
                if ed[ax] == 1 { (0, 0) } else { (cell[ax], cell[ax] + 1) }
            };
            let (u0, u1) = nodes(u);
            let (v0, v1) = nodes(v);
            let mut sum = 0.0;
            let mut count = 0.0;
            for nu in [u0, u1] {
                for nv in [v0, v1] {
                    let mut idx = cell;
                    idx[u] = nu;
                    idx[v] = nv;
                    sum += self.e[c][flat(ed, idx[0], idx[1], idx[2])];
                    count += 1.0;
                }
            }
            out[c] = sum / count;
        }
        out
    }

    fn cell_center_e_hat(&self, dft: &ModeDft, cell: [usize; 3]) -> f64 {
        let mut mag2 = 0.0;
        for c in 0..3 {
            let ed = dft.edims[c];
            let (u, v) = transverse(c);
            let nodes = |ax: usize| -> (usize, usize) {
                if ed[ax] == 1 { (0, 0) } else { (cell[ax], cell[ax] + 1) }
            };
            let (u0, u1) = nodes(u);
            let (v0, v1) = nodes(v);
            let mut sum = Complex64::new(0.0, 0.0);
            let mut count = 0.0;
            for nu in [u0, u1] {
                for nv in [v0, v1] {
                    let mut idx = cell;
                    idx[u] = nu;
                    idx[v] = nv;
                    sum += dft.e_hat[c][flat(ed, idx[0], idx[1], idx[2])];
                    count += 1.0;
                }
            }
            mag2 += (sum / count).norm_sqr();
        }
        mag2.sqrt()
    }

    pub fn field_slice(&self, plane: Plane, index: usize) -> Result<Slice> {
        self.slice_impl(plane, index, |cell| {
            let e = self.cell_center_e(cell);
            (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt()
        })
    }

    /// |E| phasor magnitude slice of an accumulated mode.
    pub fn mode_slice(&self, dft: &ModeDft, plane: Plane, index: usize) -> Result<Slice> {
        if dft.dims != self.dims {
            return Err(Error::Analysis("mode was accumulated on a different grid".into()));
        }
        self.slice_impl(plane, index, |cell| self.cell_center_e_hat(dft, cell))
    }

    fn slice_impl(
        &self,
        plane: Plane,
        index: usize,
        f: impl Fn([usize; 3]) -> f64,
    ) -> Result<Slice> {
        let (fixed_ax, col_ax, row_ax) = plane.axes();
        if index >= self.dims[fixed_ax] {
            return Err(Error::Analysis(format!(
                "slice index {index} out of range (axis has {} cells)",
                self.dims[fixed_ax]
            )));
        }
        let cols = self.dims[col_ax];
        let rows = self.dims[row_ax];
        let mut data = vec![0.0; rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                let mut cell = [0; 3];
                cell[fixed_ax] = index;
                cell[col_ax] = c;
                cell[row_ax] = r;
                data[r * cols + c] = f(cell);
            }
        }
        Ok(Slice { plane, index, rows, cols, data })
    }

    /// Raw edge access for tests and calibrated initial conditions.
    pub fn e_field_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.e[c]
    }

    pub fn e_field(&self, c: usize) -> &[f64] {
        &self.e[c]
    }

    pub fn h_field(&self, c: usize) -> &[f64] {
        &self.hf[c]
    }

    pub fn edge_index(&self, c: usize, i: usize, j: usize, k: usize) -> usize {
        flat(self.edims[c], i, j, k)
    }

    pub fn edge_dims_of(&self, c: usize) -> [usize; 3] {
        self.edims[c]
    }

    pub fn wall_faces(&self) -> &[SurfaceFace] {
        &self.wall_faces
    }
}

/// Slice plane naming: the letters give (row axis, column axis); xy fixes z.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    Xy,
    Zx,
    Yz,
}

impl Plane {
    /// (fixed axis, column axis, row axis)
    pub fn axes(self) -> (usize, usize, usize) {
        match self {
            Plane::Xy => (2, 0, 1),
            Plane::Zx => (1, 0, 2),
            Plane::Yz => (0, 1, 2),
        }
    }
}

impl std::str::FromStr for Plane {
    type Err = Error;
    fn from_str(s: &str) -> Result<Plane> {
        match s {
            "xy" => Ok(Plane::Xy),
            "zx" => Ok(Plane::Zx),
            "yz" => Ok(Plane::Yz),
            other => Err(Error::Config(format!("unknown plane '{other}', expected xy|zx|yz"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Slice {
    pub plane: Plane,
    pub index: usize,
    pub rows: usize,
    pub cols: usize,
    /// Row-major |E| values (V/m).
    pub data: Vec<f64>,
}

//! Uniform-grid voxelizer: samples the scene at cell centers onto a
//! structured lattice, marks perfect-conductor sheet faces, and tags every
//! exposed metal face (enclosure walls, pedestal, posts) with its surface
//! conductivity for the loss post-processing.
//!
//! Cell (i, j, k) spans [origin + (i, j, k) * h, origin + (i+1, j+1, k+1) * h],
//! x fastest in memory. Face grids: an axis-a face plane at index f sits at
//! origin[a] + f * h[a]; interior faces separate cells f-1 and f.

use crate::constants::C0;
use crate::error::{Error, Result};
use crate::scene::{Axis, Material, Scene};

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    /// Cell size per axis (m).
    pub h: [f64; 3],
    /// Cell counts per axis.
    pub dims: [usize; 3],
}

impl GridSpec {
    /// Cover `extent` with cells as close to `target_h` as possible; the
    /// resulting h divides the extent exactly.
    pub fn for_extent(extent: [f64; 3], target_h: [f64; 3]) -> Result<GridSpec> {
        let mut h = [0.0; 3];
        let mut dims = [0; 3];
        for ax in 0..3 {
            if !(target_h[ax] > 0.0) {
                return Err(Error::Config("grid cell size must be positive".into()));
            }
            dims[ax] = (extent[ax] / target_h[ax]).round().max(1.0) as usize;
            h[ax] = extent[ax] / dims[ax] as f64;
        }
        let spec = GridSpec { h, dims };
        spec.validate(extent)?;
        Ok(spec)
    }

    /// Axes with a single cell are degenerate (uniform along that axis);
    /// every simulated axis needs at least 8 cells.
    pub fn validate(&self, extent: [f64; 3]) -> Result<()> {
        for ax in 0..3 {
            if !(self.h[ax] > 0.0) {
                return Err(Error::Config("grid cell size must be positive".into()));
            }
            if self.dims[ax] != 1 && self.dims[ax] < 8 {
                return Err(Error::Config(format!(
                    "axis {ax}: {} cells is too coarse, need at least 8",
                    self.dims[ax]
                )));
            }
            let cover = self.h[ax] * self.dims[ax] as f64;
            if (cover - extent[ax]).abs() > self.h[ax] * (1.0 + 1e-9) {
                return Err(Error::Config(format!(
                    "axis {ax}: grid covers {cover:.6e} m but the domain extends {:.6e} m",
                    extent[ax]
                )));
            }
        }
        Ok(())
    }

    pub fn n_cells(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }
}

/// Largest stable leapfrog step at Courant number 0.99. Degenerate axes are
/// expressed by a huge h (their 1/h^2 term vanishes).
pub fn cfl_timestep(h: [f64; 3]) -> f64 {
    let inv = h.iter().map(|hi| 1.0 / (hi * hi)).sum::<f64>();
    0.99 / (C0 * inv.sqrt())
}

/// One exposed metal face: the boundary between a conductor and the field
/// region, carrying the conductor's surface conductivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceFace {
    /// Normal axis (0 = x, 1 = y, 2 = z).
    pub axis: usize,
    /// Face-grid index: cell coords on the two tangential axes, face plane
    /// index on the normal axis.
    pub idx: [usize; 3],
    /// +1 when the field region lies on the positive-normal side.
    pub side: i8,
    pub sigma: f64,
}

#[derive(Debug, Clone)]
pub struct MaterialGrid {
    pub spec: GridSpec,
    pub origin: [f64; 3],
    pub materials: Vec<Material>,
    /// Material index per cell, x fastest.
    pub cell_material: Vec<u16>,
    /// Sheet-conductor faces, one bool grid per normal axis. Axis-a grid has
    /// dims[a] + 1 planes of dims[u] x dims[v] faces, x fastest within the
    /// same (face plane, v) ordering as cells.
    pub pec_faces: [Vec<bool>; 3],
    /// Every exposed metal face, each tagged exactly once.
    pub wall_faces: Vec<SurfaceFace>,
}

impl MaterialGrid {
    #[inline]
    pub fn cidx(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.spec.dims[1] + j) * self.spec.dims[0] + i
    }

    #[inline]
    pub fn material_at(&self, i: usize, j: usize, k: usize) -> &Material {
        &self.materials[self.cell_material[self.cidx(i, j, k)] as usize]
    }

    #[inline]
    pub fn is_pec_cell(&self, i: usize, j: usize, k: usize) -> bool {
        self.material_at(i, j, k).is_pec
    }

    #[inline]
    pub fn cell_eps_r(&self, i: usize, j: usize, k: usize) -> f64 {
        let m = self.material_at(i, j, k);
        // Permittivity inside a conductor never enters an update: every
        // adjacent edge is forced to zero. Use 1 to keep averages benign.
        if m.is_pec { 1.0 } else { m.eps_r }
    }

    /// Face-grid dimensions for normal axis `a`: cells on tangential axes,
    /// dims[a] + 1 on the normal axis (kept in xyz slot order).
    pub fn face_dims(&self, a: usize) -> [usize; 3] {
        let mut d = self.spec.dims;
        d[a] += 1;
        d
    }

    #[inline]
    pub fn fidx(&self, a: usize, idx: [usize; 3]) -> usize {
        let d = self.face_dims(a);
        (idx[2] * d[1] + idx[1]) * d[0] + idx[0]
    }

    pub fn is_pec_face(&self, a: usize, idx: [usize; 3]) -> bool {
        self.pec_faces[a][self.fidx(a, idx)]
    }

    pub fn count_material(&self, name: &str) -> usize {
        match self.materials.iter().position(|m| m.name == name) {
            Some(mi) => self.cell_material.iter().filter(|&&c| c as usize == mi).count(),
            None => 0,
        }
    }

    /// z-slice of material indices as CSV (one row per j, columns i).
    pub fn material_slice_csv(&self, k: usize) -> String {
        let [nx, ny, _] = self.spec.dims;
        let mut out = String::new();
        for j in 0..ny {
            let row: Vec<String> = (0..nx)
                .map(|i| self.cell_material[self.cidx(i, j, k)].to_string())
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Sample the scene onto the grid. Errors when geometry is thinner than a
/// cell, a sheet does not land on a face plane, or the spec does not cover
/// the domain.
pub fn voxelize(scene: &Scene, spec: &GridSpec) -> Result<MaterialGrid> {
    let origin = scene.domain.min;
    let extent = [
        scene.domain.max[0] - origin[0],
        scene.domain.max[1] - origin[1],
        scene.domain.max[2] - origin[2],
    ];
    spec.validate(extent)?;
    let report = crate::scene::validate_scene(scene);
    if !report.is_clean() {
        let msgs: Vec<String> = report.findings.iter().map(|f| f.to_string()).collect();
        return Err(Error::Placement(msgs.join("; ")));
    }

    for shape in &scene.shapes {
        for ax in 0..3 {
            let span = shape.max[ax] - shape.min[ax];
            if span < spec.h[ax] * (1.0 - 1e-9) {
                return Err(Error::Placement(format!(
                    "shape '{}' spans {span:.3e} m on axis {ax}, below one cell ({:.3e} m)",
                    shape.label, spec.h[ax]
                )));
            }
        }
    }

    let [nx, ny, nz] = spec.dims;
    let mut materials = scene.materials.clone();
    if !materials.iter().any(|m| m.name == crate::scene::VACUUM) {
        materials.insert(0, Material::vacuum());
    }
    let vacuum_idx = materials.iter().position(|m| m.name == crate::scene::VACUUM).unwrap() as u16;
    if materials.len() > u16::MAX as usize {
        return Err(Error::Config("too many materials".into()));
    }
    let mat_index = |name: &str| -> u16 {
        materials.iter().position(|m| m.name == name).unwrap() as u16
    };

    let mut cell_material = vec![vacuum_idx; nx * ny * nz];
    let cidx = |i: usize, j: usize, k: usize| (k * ny + j) * nx + i;
    for k in 0..nz {
        let z = origin[2] + (k as f64 + 0.5) * spec.h[2];
        for j in 0..ny {
            let y = origin[1] + (j as f64 + 0.5) * spec.h[1];
            for i in 0..nx {
                let x = origin[0] + (i as f64 + 0.5) * spec.h[0];
                let mut best: Option<(i32, u16)> = None;
                for shape in &scene.shapes {
                    if shape.contains([x, y, z]) {
                        let m = mat_index(&shape.material);
                        // Later shapes win ties; validate_scene flags those.
                        if best.map_or(true, |(p, _)| shape.priority >= p) {
                            best = Some((shape.priority, m));
                        }
                    }
                }
                if let Some((_, m)) = best {
                    cell_material[cidx(i, j, k)] = m;
                }
            }
        }
    }

    // Sheet conductors, lowest priority first so openings and metal layer
    // correctly.
    let face_len = |a: usize| -> usize {
        let mut d = spec.dims;
        d[a] += 1;
        d[0] * d[1] * d[2]
    };
    let mut pec_faces = [vec![false; face_len(0)], vec![false; face_len(1)], vec![false; face_len(2)]];
    let mut sheet_order: Vec<&crate::scene::SheetRegion> = scene.sheets.iter().collect();
    sheet_order.sort_by_key(|s| s.priority);
    for sheet in sheet_order {
        let a = match sheet.normal {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        };
        let (u, v) = match a {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let pos = (sheet.level - origin[a]) / spec.h[a];
        let f = pos.round();
        if (pos - f).abs() > 1e-6 {
            return Err(Error::Placement(format!(
                "sheet '{}' at {:.6e} m does not land on a face plane (h = {:.3e} m)",
                sheet.label, sheet.level, spec.h[a]
            )));
        }
        let f = f as usize;
        let d = {
            let mut d = spec.dims;
            d[a] += 1;
            d
        };
        let metal = match &sheet.material {
            Some(name) => {
                if !materials[mat_index(name) as usize].is_pec {
                    return Err(Error::Placement(format!(
                        "sheet '{}' material '{}' is not a conductor",
                        sheet.label, name
                    )));
                }
                true
            }
            None => false,
        };
        for cu in 0..spec.dims[u] {
            let pu = origin[u] + (cu as f64 + 0.5) * spec.h[u];
            for cv in 0..spec.dims[v] {
                let pv = origin[v] + (cv as f64 + 0.5) * spec.h[v];
                if sheet.contains([pu, pv]) {
                    let mut idx = [0; 3];
                    idx[a] = f;
                    idx[u] = cu;
                    idx[v] = cv;
                    let flat = (idx[2] * d[1] + idx[1]) * d[0] + idx[0];
                    pec_faces[a][flat] = metal;
                }
            }
        }
    }

    // Exposed metal faces: between a conductor cell and the field region, or
    // where a non-conductor cell touches the enclosure boundary.
    let mut wall_faces = Vec::new();
    let is_pec = |i: usize, j: usize, k: usize| materials[cell_material[cidx(i, j, k)] as usize].is_pec;
    let sigma_of = |i: usize, j: usize, k: usize| materials[cell_material[cidx(i, j, k)] as usize].sigma;
    for a in 0..3 {
        if spec.dims[a] == 1 {
            // Degenerate axis: uniform fields, no physical walls.
            continue;
        }
        let (u, v) = match a {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        for cu in 0..spec.dims[u] {
            for cv in 0..spec.dims[v] {
                for f in 0..=spec.dims[a] {
                    let cell_at = |n: usize| {
                        let mut c = [0; 3];
                        c[a] = n;
                        c[u] = cu;
                        c[v] = cv;
                        c
                    };
                    let below = if f > 0 { Some(cell_at(f - 1)) } else { None };
                    let above = if f < spec.dims[a] { Some(cell_at(f)) } else { None };
                    let pec_below = below.map(|c| is_pec(c[0], c[1], c[2]));
                    let pec_above = above.map(|c| is_pec(c[0], c[1], c[2]));
                    let mut idx = cell_at(f);
                    idx[a] = f;
                    let face = |side: i8, sigma: f64| SurfaceFace { axis: a, idx, side, sigma };
                    match (pec_below, pec_above) {
                        // Enclosure boundary next to the field region.
                        (None, Some(false)) => wall_faces.push(face(1, scene.wall_sigma)),
                        (Some(false), None) => wall_faces.push(face(-1, scene.wall_sigma)),
                        // Interior conductor surface.
                        (Some(true), Some(false)) => {
                            let c = below.unwrap();
                            wall_faces.push(face(1, sigma_of(c[0], c[1], c[2])));
                        }
                        (Some(false), Some(true)) => {
                            let c = above.unwrap();
                            wall_faces.push(face(-1, sigma_of(c[0], c[1], c[2])));
                        }
                        _ => {}
                    }
                }
            }
        }
    }

    Ok(MaterialGrid {
        spec: spec.clone(),
        origin,
        materials,
        cell_material,
        pec_faces,
        wall_faces,
    })
}

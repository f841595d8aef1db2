//! Materials and the parametric package geometry: a list of prioritized
//! axis-aligned boxes (pedestal, pit, posts, chip) plus zero-thickness
//! conductor sheets (trace strip, coupling pads), two lumped
//! ports, and probe points.
//!
//! Geometry convention: the simulation domain is the cavity interior,
//! spanning [0, cavity_dims] with the enclosure walls on the domain
//! boundary. All lengths in meters.

use crate::error::{Error, Result};
use serde::Serialize;

pub const VACUUM: &str = "vacuum";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Material {
    pub name: String,
    /// Electrical conductivity (S/m). For is_pec metals this tags the
    /// surface-loss post-processing; 0 means lossless (superconducting).
    pub sigma: f64,
    pub eps_r: f64,
    pub mu_r: f64,
    /// Thermal conductivity (W/(m K)), informational metadata only.
    pub kappa: f64,
    /// Perfect-conductor volumes are excluded from the field region and
    /// handled as boundary condition.
    pub is_pec: bool,
}

impl Material {
    pub fn vacuum() -> Self {
        Material { name: VACUUM.into(), sigma: 0.0, eps_r: 1.0, mu_r: 1.0, kappa: 0.0, is_pec: false }
    }

    /// Gold-plated copper package body; sigma from the cryogenic
    /// measurement-backed value used throughout the loss analysis.
    pub fn gold_plated_copper() -> Self {
        Material { name: "gold_plated_copper".into(), sigma: 4.5e9, eps_r: 1.0, mu_r: 1.0, kappa: 380.0, is_pec: true }
    }

    /// OFHC copper, room-temperature conductivity; kappa exceeds the plated
    /// variant (metadata only).
    pub fn copper() -> Self {
        Material { name: "copper".into(), sigma: 5.8e7, eps_r: 1.0, mu_r: 1.0, kappa: 400.0, is_pec: true }
    }

    /// Aluminum package: superconducting at operating temperature, so the
    /// surfaces are lossless (sigma tag 0); thermal conduction is poor.
    pub fn aluminum() -> Self {
        Material { name: "aluminum".into(), sigma: 0.0, eps_r: 1.0, mu_r: 1.0, kappa: 20.0, is_pec: true }
    }

    pub fn silicon() -> Self {
        Material { name: "silicon".into(), sigma: 0.0, eps_r: 11.45, mu_r: 1.0, kappa: 148.0, is_pec: false }
    }

    /// Isotropic effective permittivity for c-plane sapphire.
    pub fn sapphire() -> Self {
        Material { name: "sapphire".into(), sigma: 0.0, eps_r: 9.8, mu_r: 1.0, kappa: 25.0, is_pec: false }
    }

    /// Superconducting film for trace sheets: lossless perfect conductor.
    pub fn superconductor() -> Self {
        Material { name: "superconductor".into(), sigma: 0.0, eps_r: 1.0, mu_r: 1.0, kappa: 0.1, is_pec: true }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma < 0.0 {
            return Err(Error::Config(format!("material {}: sigma must be >= 0", self.name)));
        }
        if !self.is_pec && self.eps_r < 1.0 {
            return Err(Error::Config(format!("material {}: eps_r must be >= 1", self.name)));
        }
        if !(self.mu_r > 0.0) {
            return Err(Error::Config(format!("material {}: mu_r must be > 0", self.name)));
        }
        Ok(())
    }
}

/// Prioritized axis-aligned box; higher priority wins on overlap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxRegion {
    pub label: String,
    pub min: [f64; 3],
    pub max: [f64; 3],
    pub material: String,
    pub priority: i32,
}

impl BoxRegion {
    pub fn new(label: &str, min: [f64; 3], max: [f64; 3], material: &str, priority: i32) -> Result<Self> {
        for ax in 0..3 {
            if !(min[ax] < max[ax]) {
                return Err(Error::Config(format!(
                    "box {label}: min must be strictly below max on every axis, got {min:?}..{max:?}"
                )));
            }
        }
        Ok(BoxRegion { label: label.into(), min, max, material: material.into(), priority })
    }

    pub fn contains(&self, p: [f64; 3]) -> bool {
        (0..3).all(|ax| p[ax] >= self.min[ax] && p[ax] < self.max[ax])
    }

    pub fn volume(&self) -> f64 {
        (0..3).map(|ax| self.max[ax] - self.min[ax]).product()
    }

    pub fn overlaps(&self, other: &BoxRegion) -> bool {
        (0..3).all(|ax| self.min[ax] < other.max[ax] && other.min[ax] < self.max[ax])
    }

    fn inside(&self, domain: &BoxRegion) -> bool {
        (0..3).all(|ax| {
            self.min[ax] >= domain.min[ax] - GEOM_EPS && self.max[ax] <= domain.max[ax] + GEOM_EPS
        })
    }
}

const GEOM_EPS: f64 = 1e-12;

/// Normal axis of a sheet plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Zero-thickness conductor sheet (or opening in one) on an axis-normal
/// plane. `min`/`max` are the in-plane coordinates in xyz order with the
/// normal axis removed. `material: None` cuts an opening in lower-priority
/// sheets instead of adding metal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SheetRegion {
    pub label: String,
    pub normal: Axis,
    /// Position of the plane along the normal axis (m).
    pub level: f64,
    pub min: [f64; 2],
    pub max: [f64; 2],
    pub material: Option<String>,
    pub priority: i32,
}

impl SheetRegion {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        (0..2).all(|ax| p[ax] >= self.min[ax] && p[ax] < self.max[ax])
    }
}

/// Lumped resistive port: a thin feed pin entering through a wall, with
/// the lumped resistor (and, when driven, the Thevenin source) in the
/// wall-adjacent cell. The pin tip stops short of the on-chip coupling
/// pad; the launch is capacitive. A horizontal pin barely loads the
/// enclosure modes (their electric field is vertical) while its tip
/// couples to the in-plane field of the trace, which keeps package
/// resonances sharp and the chip line visible.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortSpec {
    pub name: String,
    /// Pin direction.
    pub axis: usize,
    /// Entry wall along `axis`: -1 low, +1 high.
    pub side: i8,
    /// Pin tip coordinate along `axis` (m).
    pub tip: f64,
    /// Pin position in the two perpendicular axes, cyclic order
    /// (axis+1, axis+2) (m).
    pub lateral: [f64; 2],
    /// Reference impedance (ohm).
    pub resistance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeSpec {
    pub name: String,
    pub position: [f64; 3],
}

/// Half-wave interrupted transmission-line resonator on the chip top face:
/// a bare S-shaped meander strip (five legs along x, four jogs along y)
/// between two coupling gaps and pads. No coplanar ground sheet: the
/// package metal is the only return conductor. At the half-wave resonance
/// the sin-weighted leg currents alternate (+0.31, -0.81, +1, -0.81, +0.31)
/// and sum to zero, so the net current moment along x vanishes and the
/// external field falls off multipole-fast. That makes the wall
/// participation collapse as the pedestal recedes, which a shielded
/// coplanar layout cannot reproduce.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceSpec {
    /// Centerline length of the resonator (m); sets the half-wave frequency.
    pub length: f64,
    pub width: f64,
    /// Minimum in-plane clearance between adjacent conductors (m).
    pub slot: f64,
    /// Longitudinal coupling gap between resonator end and pad (m).
    pub coupling_gap: f64,
    /// Coupling pad size along (x, y) (m).
    pub pad: [f64; 2],
    /// Meander leg-to-leg pitch (m).
    pub pitch: f64,
    /// Designed resonance used for mode classification (Hz).
    pub target_f0: f64,
}

impl Default for TraceSpec {
    fn default() -> Self {
        TraceSpec {
            length: 12.0e-3,
            width: 0.25e-3,
            slot: 0.25e-3,
            coupling_gap: 0.25e-3,
            pad: [0.5e-3, 0.5e-3],
            pitch: 0.5e-3,
            target_f0: 6.694e9,
        }
    }
}

/// Parametric package description. Lengths in meters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackageParams {
    /// Inner enclosure size (assumed; the publication does not state it).
    pub cavity_dims: [f64; 3],
    /// Wall conductivity tag for loss post-processing (S/m).
    pub wall_sigma: f64,
    pub chip_dims: [f64; 3],
    pub chip_eps_r: f64,
    /// Chip-underside-to-pedestal distance; 0 means solid pedestal.
    pub gap_delta: f64,
    /// Corner-post footprint side (m); posts exist only when gap_delta > 0.
    pub post_cross_section: f64,
    /// Pedestal footprint and height (m); the chip sits on its top face.
    pub pedestal_dims: [f64; 3],
    pub trace_spec: TraceSpec,
    /// Port impedance (ohm) for the two trace-coupled ports.
    pub port_impedance: f64,
    /// Vertical clearance between the horizontal feed pins and the chip
    /// top face; the pins hover this far above the coupling pads (m).
    pub port_launch_gap: f64,
    pub band_of_interest: (f64, f64),
}

impl Default for PackageParams {
    fn default() -> Self {
        // Footprint keeps bare-enclosure modes (first at ~19 GHz) and the
        // feed-pin stub resonance above the 4-8 GHz analysis band.
        PackageParams {
            cavity_dims: [11e-3, 11e-3, 9.8e-3],
            wall_sigma: 4.5e9,
            chip_dims: [5e-3, 5e-3, 0.35e-3],
            chip_eps_r: 11.45,
            gap_delta: 3.8e-3,
            post_cross_section: 1e-3,
            pedestal_dims: [5e-3, 5e-3, 5.95e-3],
            trace_spec: TraceSpec::default(),
            port_impedance: 50.0,
            port_launch_gap: 0.5e-3,
            band_of_interest: (4e9, 8e9),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scene {
    pub domain: BoxRegion,
    pub materials: Vec<Material>,
    pub shapes: Vec<BoxRegion>,
    pub sheets: Vec<SheetRegion>,
    pub ports: Vec<PortSpec>,
    pub probes: Vec<ProbeSpec>,
    /// (f_lo, f_hi) in Hz.
    pub band_of_interest: (f64, f64),
    /// Conductivity tag for the enclosure boundary walls (S/m).
    pub wall_sigma: f64,
    /// Designed trace resonance (Hz), used for mode classification.
    pub designed_f0: f64,
}

impl Scene {
    pub fn material(&self, name: &str) -> Option<&Material> {
        self.materials.iter().find(|m| m.name == name)
    }

    /// Canonical JSON form: stable key order (struct declaration order),
    /// deterministic float formatting; used for golden files and digests.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serialization cannot fail")
    }

    /// An empty rectangular enclosure with a broadband probe/source layout,
    /// used for cavity-mode validation runs.
    pub fn empty_box(dims: [f64; 3], wall_sigma: f64, band: (f64, f64)) -> Result<Scene> {
        let domain = BoxRegion::new("domain", [0.0; 3], dims, VACUUM, 0)?;
        // Off-center probe positions avoid nodal planes of low-order modes.
        let frac = |f: [f64; 3]| [dims[0] * f[0], dims[1] * f[1], dims[2] * f[2]];
        Ok(Scene {
            domain,
            materials: vec![Material::vacuum()],
            shapes: Vec::new(),
            sheets: Vec::new(),
            ports: Vec::new(),
            probes: vec![
                ProbeSpec { name: "p0".into(), position: frac([0.29, 0.37, 0.41]) },
                ProbeSpec { name: "p1".into(), position: frac([0.63, 0.71, 0.23]) },
            ],
            band_of_interest: band,
            wall_sigma,
            designed_f0: 0.0,
        })
    }
}

/// Meander layout on the chip top face, all coordinates absolute (m).
struct TraceLayout {
    /// Strip segments (legs and jogs) as in-plane rectangles.
    segments: Vec<([f64; 2], [f64; 2])>,
    /// Coupling pads.
    pads: [([f64; 2], [f64; 2]); 2],
    /// Pad centers (wire landing points).
    pad_centers: [[f64; 2]; 2],
}

fn trace_layout(params: &PackageParams) -> Result<TraceLayout> {
    let t = &params.trace_spec;
    let [cw, cd, _] = params.chip_dims;
    let cx = params.cavity_dims[0] / 2.0;
    let cy = params.cavity_dims[1] / 2.0;
    // Keep the metalization two clearance widths inside the chip edge.
    let edge_margin = 2.0 * t.slot;
    if !(t.length > 0.0 && t.width > 0.0 && t.slot > 0.0 && t.coupling_gap > 0.0) {
        return Err(Error::Config("trace dimensions must be positive".into()));
    }
    if t.pitch < t.width + t.slot {
        return Err(Error::Config(format!(
            "trace pitch {} too small for width {} and clearance {}",
            t.pitch, t.width, t.slot
        )));
    }
    // Five legs along x, four jogs along y; centerline length 5 L + 4 pitch.
    let leg = (t.length - 4.0 * t.pitch) / 5.0;
    let w2 = t.width / 2.0;
    let leg_max = cw - 2.0 * (edge_margin + t.pad[0] + t.coupling_gap + w2);
    if leg <= 0.0 || leg > leg_max {
        return Err(Error::Config(format!(
            "trace length {:.3e} does not fit the chip: leg {:.3e} outside (0, {:.3e}]",
            t.length, leg, leg_max
        )));
    }
    let span_y = 4.0 * t.pitch + t.width;
    if span_y + 2.0 * edge_margin > cd {
        return Err(Error::Config("meander pitch exceeds chip depth".into()));
    }
    let x0 = cx - leg / 2.0;
    let x1 = cx + leg / 2.0;
    let y_leg: Vec<f64> = (0..5).map(|i| cy + (i as f64 - 2.0) * t.pitch).collect();
    let mut segments = Vec::new();
    // Legs.
    for &y in &y_leg {
        segments.push(([x0 - w2, y - w2], [x1 + w2, y + w2]));
    }
    // Jogs alternate sides: right between legs 0-1 and 2-3, left between 1-2 and 3-4.
    segments.push(([x1 - w2, y_leg[0] - w2], [x1 + w2, y_leg[1] + w2]));
    segments.push(([x0 - w2, y_leg[1] - w2], [x0 + w2, y_leg[2] + w2]));
    segments.push(([x1 - w2, y_leg[2] - w2], [x1 + w2, y_leg[3] + w2]));
    segments.push(([x0 - w2, y_leg[3] - w2], [x0 + w2, y_leg[4] + w2]));
    // Ports couple at the free ends: leg 0 at x0 (facing -x), leg 4 at x1.
    let pad_a = (
        [x0 - w2 - t.coupling_gap - t.pad[0], y_leg[0] - t.pad[1] / 2.0],
        [x0 - w2 - t.coupling_gap, y_leg[0] + t.pad[1] / 2.0],
    );
    let pad_b = (
        [x1 + w2 + t.coupling_gap, y_leg[4] - t.pad[1] / 2.0],
        [x1 + w2 + t.coupling_gap + t.pad[0], y_leg[4] + t.pad[1] / 2.0],
    );
    let center = |r: &([f64; 2], [f64; 2])| {
        [(r.0[0] + r.1[0]) / 2.0, (r.0[1] + r.1[1]) / 2.0]
    };
    let chip_min = [cx - cw / 2.0 + edge_margin, cy - cd / 2.0 + edge_margin];
    let chip_max = [cx + cw / 2.0 - edge_margin, cy + cd / 2.0 - edge_margin];
    for rect in segments.iter().chain([&pad_a, &pad_b]) {
        for ax in 0..2 {
            if rect.0[ax] < chip_min[ax] - GEOM_EPS || rect.1[ax] > chip_max[ax] + GEOM_EPS {
                return Err(Error::Config(
                    "trace layout exceeds the chip top face (reduce length, pads, or pitch)".into(),
                ));
            }
        }
    }
    Ok(TraceLayout {
        pad_centers: [center(&pad_a), center(&pad_b)],
        segments,
        pads: [pad_a, pad_b],
    })
}

/// Build the package scene: pedestal (recessed by gap_delta under the chip
/// footprint, four corner posts remaining), chip slab, trace metalization,
/// two ports, probes.
pub fn build_package(params: &PackageParams) -> Result<Scene> {
    let [lx, ly, lz] = params.cavity_dims;
    if !(lx > 0.0 && ly > 0.0 && lz > 0.0) {
        return Err(Error::Config("cavity dimensions must be positive".into()));
    }
    if params.gap_delta < 0.0 {
        return Err(Error::Config(format!(
            "gap_delta must be >= 0, got {}",
            params.gap_delta
        )));
    }
    let [cw, cd, ct] = params.chip_dims;
    if !(cw > 0.0 && cd > 0.0 && ct > 0.0) {
        return Err(Error::Config("chip dimensions must be positive".into()));
    }
    if cw >= lx || cd >= ly {
        return Err(Error::Config("chip must fit strictly inside the cavity".into()));
    }
    let [pw, pd, ph] = params.pedestal_dims;
    if cw > pw || cd > pd {
        return Err(Error::Config("chip footprint must not overhang the pedestal".into()));
    }
    if params.gap_delta > ph {
        return Err(Error::Config(format!(
            "gap_delta {} exceeds pedestal height {}",
            params.gap_delta, ph
        )));
    }
    if ph + ct >= lz {
        return Err(Error::Config("pedestal plus chip must fit below the lid".into()));
    }
    let (cx, cy) = (lx / 2.0, ly / 2.0);
    let chip_top = ph + ct;

    let domain = BoxRegion::new("domain", [0.0; 3], params.cavity_dims, VACUUM, 0)?;
    let substrate = if (params.chip_eps_r - Material::sapphire().eps_r).abs() < 1e-9 {
        Material::sapphire()
    } else {
        let mut m = Material::silicon();
        m.eps_r = params.chip_eps_r;
        m
    };
    let wall = {
        let mut m = Material::gold_plated_copper();
        m.sigma = params.wall_sigma;
        m
    };
    let materials = vec![
        Material::vacuum(),
        wall,
        substrate.clone(),
        Material::superconductor(),
    ];

    let mut shapes = Vec::new();
    shapes.push(BoxRegion::new(
        "pedestal",
        [cx - pw / 2.0, cy - pd / 2.0, 0.0],
        [cx + pw / 2.0, cy + pd / 2.0, ph],
        "gold_plated_copper",
        10,
    )?);
    if params.gap_delta > 0.0 {
        // Recess the pedestal under the full chip footprint, leaving four
        // corner posts that carry the chip.
        let pit_min = [cx - cw / 2.0, cy - cd / 2.0, ph - params.gap_delta];
        let pit_max = [cx + cw / 2.0, cy + cd / 2.0, ph];
        shapes.push(BoxRegion::new("pit", pit_min, pit_max, VACUUM, 20)?);
        let s = params.post_cross_section;
        if !(s > 0.0) || 2.0 * s > cw || 2.0 * s > cd {
            return Err(Error::Config(format!(
                "post cross-section {s} incompatible with chip footprint"
            )));
        }
        let corners = [
            (pit_min[0], pit_min[1]),
            (pit_max[0] - s, pit_min[1]),
            (pit_min[0], pit_max[1] - s),
            (pit_max[0] - s, pit_max[1] - s),
        ];
        for (i, (px, py)) in corners.iter().enumerate() {
            shapes.push(BoxRegion::new(
                &format!("post{i}"),
                [*px, *py, ph - params.gap_delta],
                [*px + s, *py + s, ph],
                "gold_plated_copper",
                30,
            )?);
        }
    }
    shapes.push(BoxRegion::new(
        "chip",
        [cx - cw / 2.0, cy - cd / 2.0, ph],
        [cx + cw / 2.0, cy + cd / 2.0, chip_top],
        &substrate.name,
        40,
    )?);

    let layout = trace_layout(params)?;
    let mut sheets = Vec::new();
    for (i, rect) in layout.segments.iter().enumerate() {
        sheets.push(SheetRegion {
            label: format!("trace{i}"),
            normal: Axis::Z,
            level: chip_top,
            min: rect.0,
            max: rect.1,
            material: Some("superconductor".into()),
            priority: 30,
        });
    }
    for (i, rect) in layout.pads.iter().enumerate() {
        sheets.push(SheetRegion {
            label: format!("pad{i}"),
            normal: Axis::Z,
            level: chip_top,
            min: rect.0,
            max: rect.1,
            material: Some("superconductor".into()),
            priority: 30,
        });
    }

    // Horizontal pins along x from opposite walls, hovering
    // port_launch_gap above the pads at the trace's free ends.
    let pin_z = chip_top + params.port_launch_gap;
    let ports = vec![
        PortSpec {
            name: "port1".into(),
            axis: 0,
            side: -1,
            tip: layout.pad_centers[0][0],
            lateral: [layout.pad_centers[0][1], pin_z],
            resistance: params.port_impedance,
        },
        PortSpec {
            name: "port2".into(),
            axis: 0,
            side: 1,
            tip: layout.pad_centers[1][0],
            lateral: [layout.pad_centers[1][1], pin_z],
            resistance: params.port_impedance,
        },
    ];

    let probes = vec![
        ProbeSpec {
            name: "chip_vicinity".into(),
            position: [cx + cw / 4.0, cy + cd / 8.0, chip_top + 0.6e-3],
        },
        ProbeSpec {
            name: "moat".into(),
            position: [lx - (lx - pw) / 4.0 - 0.3e-3, cy + 1.1e-3, ph / 2.0],
        },
    ];

    Ok(Scene {
        domain,
        materials,
        shapes,
        sheets,
        ports,
        probes,
        band_of_interest: params.band_of_interest,
        wall_sigma: params.wall_sigma,
        designed_f0: params.trace_spec.target_f0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Finding {
    OutOfDomain { kind: &'static str, label: String },
    DanglingMaterial { label: String, material: String },
    SamePriorityOverlap { a: String, b: String },
}

impl std::fmt::Display for Finding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Finding::OutOfDomain { kind, label } => write!(f, "{kind} '{label}' extends outside the domain"),
            Finding::DanglingMaterial { label, material } => {
                write!(f, "shape '{label}' references unknown material '{material}'")
            }
            Finding::SamePriorityOverlap { a, b } => {
                write!(f, "shapes '{a}' and '{b}' overlap at equal priority")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }
}

/// Structural checks: out-of-domain geometry, dangling material references,
/// ambiguous same-priority overlaps. Never fails; findings carry the issues.
pub fn validate_scene(scene: &Scene) -> ValidationReport {
    let mut findings = Vec::new();
    let dom = &scene.domain;
    for shape in &scene.shapes {
        if !shape.inside(dom) {
            findings.push(Finding::OutOfDomain { kind: "shape", label: shape.label.clone() });
        }
        if scene.material(&shape.material).is_none() {
            findings.push(Finding::DanglingMaterial {
                label: shape.label.clone(),
                material: shape.material.clone(),
            });
        }
    }
    for sheet in &scene.sheets {
        let (u, v, level_hi) = match sheet.normal {
            Axis::X => (1, 2, dom.max[0]),
            Axis::Y => (0, 2, dom.max[1]),
            Axis::Z => (0, 1, dom.max[2]),
        };
        let lo = [dom.min[u], dom.min[v]];
        let hi = [dom.max[u], dom.max[v]];
        let ok_plane = sheet.level >= -GEOM_EPS && sheet.level <= level_hi + GEOM_EPS;
        let ok_rect = (0..2).all(|ax| {
            sheet.min[ax] >= lo[ax] - GEOM_EPS && sheet.max[ax] <= hi[ax] + GEOM_EPS
        });
        if !ok_plane || !ok_rect {
            findings.push(Finding::OutOfDomain { kind: "sheet", label: sheet.label.clone() });
        }
        if let Some(mat) = &sheet.material {
            if scene.material(mat).is_none() {
                findings.push(Finding::DanglingMaterial {
                    label: sheet.label.clone(),
                    material: mat.clone(),
                });
            }
        }
    }
    for port in &scene.ports {
        let inside = port.axis <= 2 && {
            let (u, v) = ((port.axis + 1) % 3, (port.axis + 2) % 3);
            port.lateral[0] > dom.min[u]
                && port.lateral[0] < dom.max[u]
                && port.lateral[1] > dom.min[v]
                && port.lateral[1] < dom.max[v]
                && port.tip > dom.min[port.axis]
                && port.tip < dom.max[port.axis]
        };
        if !inside {
            findings.push(Finding::OutOfDomain { kind: "port", label: port.name.clone() });
        }
    }
    for probe in &scene.probes {
        if !(0..3).all(|ax| probe.position[ax] > dom.min[ax] && probe.position[ax] < dom.max[ax]) {
            findings.push(Finding::OutOfDomain { kind: "probe", label: probe.name.clone() });
        }
    }
    for (i, a) in scene.shapes.iter().enumerate() {
        for b in scene.shapes.iter().skip(i + 1) {
            if a.priority == b.priority && a.overlaps(b) {
                findings.push(Finding::SamePriorityOverlap {
                    a: a.label.clone(),
                    b: b.label.clone(),
                });
            }
        }
    }
    ValidationReport { findings }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_package_is_clean() {
        let scene = build_package(&PackageParams::default()).unwrap();
        let report = validate_scene(&scene);
        assert!(report.is_clean(), "default package should validate: {:?}", report.findings);
    }

    #[test]
    fn solid_pedestal_emits_no_pit_or_posts() {
        let params = PackageParams { gap_delta: 0.0, ..PackageParams::default() };
        let scene = build_package(&params).unwrap();
        assert!(scene.shapes.iter().all(|s| s.label != "pit"));
        assert!(scene.shapes.iter().all(|s| !s.label.starts_with("post")));
        let ped = scene.shapes.iter().find(|s| s.label == "pedestal").unwrap();
        let chip = scene.shapes.iter().find(|s| s.label == "chip").unwrap();
        assert_eq!(
            ped.max[2], chip.min[2],
            "solid pedestal top must touch the chip underside"
        );
    }

    #[test]
    fn drilled_pedestal_has_pit_and_four_posts_of_height_delta() {
        let params = PackageParams { gap_delta: 3.8e-3, ..PackageParams::default() };
        let scene = build_package(&params).unwrap();
        let pit = scene.shapes.iter().find(|s| s.label == "pit").unwrap();
        assert!((pit.max[2] - pit.min[2] - 3.8e-3).abs() < 1e-12);
        let posts: Vec<_> = scene.shapes.iter().filter(|s| s.label.starts_with("post")).collect();
        assert_eq!(posts.len(), 4, "four corner posts must remain in place");
        for post in &posts {
            assert!((post.max[2] - post.min[2] - 3.8e-3).abs() < 1e-12);
            assert_eq!(post.material, "gold_plated_copper");
        }
        // Pit spans the full chip footprint.
        let chip = scene.shapes.iter().find(|s| s.label == "chip").unwrap();
        assert!((pit.min[0] - chip.min[0]).abs() < 1e-12);
        assert!((chip.max[1] - pit.max[1]).abs() < 1e-12);
    }

    #[test]
    fn negative_delta_rejected() {
        let params = PackageParams { gap_delta: -1e-3, ..PackageParams::default() };
        assert!(build_package(&params).is_err());
    }

    #[test]
    fn oversized_chip_rejected() {
        let mut params = PackageParams::default();
        params.chip_dims = [30e-3, 5e-3, 0.35e-3];
        assert!(build_package(&params).is_err(), "chip wider than cavity must fail");
    }

    #[test]
    fn build_is_deterministic_bit_equal_serialized() {
        let a = build_package(&PackageParams::default()).unwrap().to_canonical_json();
        let b = build_package(&PackageParams::default()).unwrap().to_canonical_json();
        assert_eq!(a, b);
    }

    #[test]
    fn copper_volume_monotone_nonincreasing_in_delta() {
        let copper_volume = |delta: f64| {
            let params = PackageParams { gap_delta: delta, ..PackageParams::default() };
            let scene = build_package(&params).unwrap();
            let vol = |label: &str| {
                scene
                    .shapes
                    .iter()
                    .filter(|s| s.label.starts_with(label))
                    .map(BoxRegion::volume)
                    .sum::<f64>()
            };
            // Priority stack: posts sit inside the pit, the pit inside the
            // pedestal, so copper = pedestal - pit + posts.
            vol("pedestal") - vol("pit") + vol("post")
        };
        let deltas = [0.0, 0.5e-3, 1.0e-3, 2.0e-3, 3.8e-3];
        for pair in deltas.windows(2) {
            assert!(
                copper_volume(pair[0]) >= copper_volume(pair[1]),
                "larger gap must not add copper"
            );
        }
    }

    #[test]
    fn trace_sheets_lie_on_chip_top_face() {
        let scene = build_package(&PackageParams::default()).unwrap();
        let chip = scene.shapes.iter().find(|s| s.label == "chip").unwrap();
        for sheet in &scene.sheets {
            assert_eq!(sheet.normal, Axis::Z);
            assert!(
                (sheet.level - chip.max[2]).abs() < 1e-12,
                "sheet {} must lie on the chip top plane",
                sheet.label
            );
            for ax in 0..2 {
                assert!(sheet.min[ax] >= chip.min[ax] - 1e-12);
                assert!(sheet.max[ax] <= chip.max[ax] + 1e-12);
            }
        }
    }

    #[test]
    fn trace_too_long_for_chip_rejected() {
        let mut params = PackageParams::default();
        params.trace_spec.length = 30e-3;
        assert!(build_package(&params).is_err());
    }

    #[test]
    fn out_of_domain_shape_flagged() {
        let mut scene = build_package(&PackageParams::default()).unwrap();
        scene.shapes.push(
            BoxRegion::new("stray", [-1e-3; 3], [1e-3; 3], VACUUM, 99).unwrap(),
        );
        let report = validate_scene(&scene);
        assert!(report
            .findings
            .iter()
            .any(|f| matches!(f, Finding::OutOfDomain { label, .. } if label == "stray")));
    }

    #[test]
    fn dangling_material_flagged() {
        let mut scene = build_package(&PackageParams::default()).unwrap();
        scene.shapes.push(
            BoxRegion::new("odd", [1e-3; 3], [2e-3; 3], "unobtainium", 99).unwrap(),
        );
        let report = validate_scene(&scene);
        assert!(report
            .findings
            .iter()
            .any(|f| matches!(f, Finding::DanglingMaterial { material, .. } if material == "unobtainium")));
    }

    #[test]
    fn same_priority_overlap_flagged() {
        let mut scene = build_package(&PackageParams::default()).unwrap();
        scene.shapes.push(BoxRegion::new("a", [1e-3; 3], [3e-3; 3], VACUUM, 77).unwrap());
        scene.shapes.push(BoxRegion::new("b", [2e-3; 3], [4e-3; 3], VACUUM, 77).unwrap());
        let report = validate_scene(&scene);
        assert!(report
            .findings
            .iter()
            .any(|f| matches!(f, Finding::SamePriorityOverlap { .. })));
    }

    #[test]
    fn box_invariant_rejects_inverted_corners() {
        assert!(BoxRegion::new("bad", [1e-3; 3], [1e-3; 3], VACUUM, 0).is_err());
    }

    #[test]
    fn material_invariants() {
        for m in [
            Material::vacuum(),
            Material::gold_plated_copper(),
            Material::copper(),
            Material::aluminum(),
            Material::silicon(),
            Material::sapphire(),
            Material::superconductor(),
        ] {
            m.validate().unwrap();
        }
        let bad = Material { eps_r: 0.5, ..Material::vacuum() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn gold_plated_copper_carries_package_sigma() {
        assert_eq!(Material::gold_plated_copper().sigma, 4.5e9);
    }
}

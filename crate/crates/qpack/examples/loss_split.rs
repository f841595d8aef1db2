//! Diagnostic: split the wall-loss integral of the tracked package mode by
//! surface region. Usage: loss_split <config.json> <delta_mm> <f0_ghz>

use qpack::loss::surface_resistance;
use qpack::pipeline::{build_scenario, mode_phasors, wall_field_set};

fn main() {
    let mut args = std::env::args().skip(1);
    let cfg_path = args.next().expect("config path");
    let delta_mm: f64 = args.next().expect("delta_mm").parse().unwrap();
    let f0_ghz: f64 = args.next().expect("f0_ghz").parse().unwrap();

    let text = std::fs::read_to_string(&cfg_path).unwrap();
    let cfg = qpack::config::parse_config(&text).unwrap();
    let sc = build_scenario(&cfg, delta_mm * 1e-3).unwrap();
    let dft = mode_phasors(&cfg, &sc, f0_ghz * 1e9, "split", false).unwrap();
    let walls = wall_field_set(&sc.grid, &dft).unwrap();

    let dims = sc.grid.spec.dims;
    let h = sc.grid.spec.h;
    let ped_top = (sc.params.pedestal_dims[2] / h[2]).round() as usize;
    let pit_floor = ((sc.params.pedestal_dims[2] - sc.params.gap_delta) / h[2]).round() as usize;

    let mut groups: std::collections::BTreeMap<&str, (f64, f64)> = Default::default();
    for (sf, wf) in sc.grid.wall_faces.iter().zip(&walls.faces) {
        let a = sf.axis;
        let m = sf.idx[a];
        let name = if a == 2 && m == 0 {
            "enclosure floor"
        } else if a == 2 && m == dims[2] {
            "enclosure lid"
        } else if a < 2 && (m == 0 || m == dims[a]) {
            "enclosure side walls"
        } else if a == 2 && m == ped_top {
            "pedestal top plane"
        } else if a == 2 && m == pit_floor {
            "pit floor"
        } else if a == 2 {
            "other horizontal"
        } else {
            "interior verticals"
        };
        let rs = surface_resistance(wf.sigma, walls.f, 1.0).unwrap();
        let p = 0.5 * rs * wf.h_t * wf.h_t * wf.area;
        let e = groups.entry(name).or_insert((0.0, 0.0));
        e.0 += p;
        e.1 += wf.area;
    }

    let total: f64 = groups.values().map(|v| v.0).sum();
    println!("delta {delta_mm} mm  f0 {f0_ghz} GHz  W {:.4e} J", walls.energy);
    for (name, (p, area)) in &groups {
        println!(
            "  {name:<22} P {p:10.4e} W  ({:5.1}%)  area {:.2e} m^2",
            100.0 * p / total,
            area
        );
    }
    let q = 2.0 * std::f64::consts::PI * walls.f * walls.energy / total;
    println!("  total P {total:.4e} W  -> Q_cond {q:.4e}");
}

//! Deterministic SVG rendering of grids, complement atlases, and cycles.
//!
//! Coordinates are cell units with the imaginary axis pointing up; every
//! number written is an integer, so output bytes depend only on the inputs.

use crate::domain::SymmetricDomainGrid;
use crate::planar::{ComplementAtlas, GridCycle};

const PALETTE: [&str; 8] = [
    "#e6550d", "#3182bd", "#31a354", "#756bb1", "#de2d26", "#636363", "#fd8d3c", "#9ecae1",
];

fn header(nx: usize, ny: usize) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {nx} {ny}\" \
         width=\"{}\" height=\"{}\">\n",
        nx * 4,
        ny * 4
    )
}

fn cell_rect(i: usize, j: usize, ny: usize, fill: &str) -> String {
    format!("<rect x=\"{i}\" y=\"{}\" width=\"1\" height=\"1\" fill=\"{fill}\"/>\n", ny - 1 - j)
}

/// Domain in grey, bounded complement components in palette colors, the
/// unbounded complement left white, and the real-axis cell row of the
/// domain marked as dark intervals.
pub fn topology_svg(g: &SymmetricDomainGrid, atlas: &ComplementAtlas) -> String {
    let (nx, ny) = (g.nx(), g.ny());
    let mut out = header(nx, ny);
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");
    for j in 0..ny {
        for i in 0..nx {
            if g.inside(i, j) {
                out.push_str(&cell_rect(i, j, ny, "#d9d9d9"));
            } else if let Some(c) = atlas.label_at(i, j) {
                if let Some(pos) = atlas.bounded_pos(c) {
                    out.push_str(&cell_rect(i, j, ny, PALETTE[pos % PALETTE.len()]));
                }
            }
        }
    }
    let mid = g.mid_row();
    for i in 0..nx {
        if g.inside(i, mid) {
            out.push_str(&cell_rect(i, mid, ny, "#252525"));
        }
    }
    out.push_str("</svg>\n");
    out
}

/// The cycle's corner-lattice polygons drawn over the domain mask.
pub fn cycle_svg(g: &SymmetricDomainGrid, cycle: &GridCycle) -> String {
    let (nx, ny) = (g.nx(), g.ny());
    let mut out = header(nx, ny);
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");
    for j in 0..ny {
        for i in 0..nx {
            if g.inside(i, j) {
                out.push_str(&cell_rect(i, j, ny, "#d9d9d9"));
            }
        }
    }
    for (n, poly) in cycle.polygons.iter().enumerate() {
        let pts: Vec<String> =
            poly.iter().map(|&(i, j)| format!("{i},{}", ny as i64 - j)).collect();
        out.push_str(&format!(
            "<polygon points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"0.4\"/>\n",
            pts.join(" "),
            PALETTE[n % PALETTE.len()],
        ));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{rasterize, Box2, DomainSpec};
    use crate::planar::{cycle_from_class, label_components, separating_class};

    #[test]
    fn topology_svg_is_deterministic_and_marks_components() {
        let g = rasterize(
            &DomainSpec::Annulus { center: 0.0, inner: 1.0, outer: 2.0 },
            Box2::square(2.5),
            65,
            65,
        )
        .unwrap();
        let atlas = label_components(&g);
        let a = topology_svg(&g, &atlas);
        let b = topology_svg(&g, &atlas);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains(PALETTE[0]), "bounded hole should be colored");
        assert!(a.ends_with("</svg>\n"));
    }

    #[test]
    fn cycle_svg_draws_each_polygon() {
        let g = rasterize(
            &DomainSpec::Annulus { center: 0.0, inner: 1.0, outer: 2.0 },
            Box2::square(2.5),
            65,
            65,
        )
        .unwrap();
        let atlas = label_components(&g);
        let b = atlas.bounded()[0];
        let cycle =
            cycle_from_class(&g, &atlas, &separating_class(&atlas, b).unwrap()).unwrap();
        let svg = cycle_svg(&g, &cycle);
        assert_eq!(svg.matches("<polygon").count(), cycle.polygons.len());
        assert!(svg.ends_with("</svg>\n"));
    }
}

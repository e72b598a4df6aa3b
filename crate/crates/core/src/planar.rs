//! Complement component analysis, winding numbers, and the translation
//! between first-homology classes and explicit lattice cycles.
//!
//! An H1 class of the open set D is stored as an integer per bounded
//! component of the complement; the unbounded component (always unique,
//! since the frame ring is connected) carries 0. Cycles are closed polygons
//! on the cell-corner lattice; winding numbers are computed by signed
//! crossing counts, so every class value is an exact integer.

use crate::domain::{check_nested, Box2, DomainError, SymmetricDomainGrid};
use crate::intmat::IntMat;
use thiserror::Error;

pub type CompId = usize;

#[derive(Debug, Error, PartialEq)]
pub enum PlanarError {
    #[error("point lies on the cycle")]
    OnCurve,
    #[error("cycle passes through complement cells")]
    CycleLeavesDomain,
    #[error("component {0} touches another complement component; resolution too coarse")]
    NoCollar(CompId),
    #[error("first grid is not contained in the second")]
    NotNested,
    #[error("component {0} is unbounded")]
    NotBounded(CompId),
    #[error("bad cycle: {0}")]
    BadCycle(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Clone, Debug)]
pub struct ComponentInfo {
    pub bounded: bool,
    /// First cell in row-major scan order (also the minimum-row cell).
    pub rep: (usize, usize),
    pub size: usize,
    pub min_row: usize,
    /// Conjugate-reflected component; an involution.
    pub conj: CompId,
    pub touches_real: bool,
}

/// Labeled 4-connected components of the outside cells of a grid.
#[derive(Clone, Debug)]
pub struct ComplementAtlas {
    labels: Vec<i32>, // -1 on inside cells
    comps: Vec<ComponentInfo>,
    bounded: Vec<CompId>,
    nx: usize,
    ny: usize,
}

impl ComplementAtlas {
    pub fn comp_count(&self) -> usize {
        self.comps.len()
    }

    pub fn comp(&self, id: CompId) -> &ComponentInfo {
        &self.comps[id]
    }

    pub fn bounded(&self) -> &[CompId] {
        &self.bounded
    }

    pub fn label_at(&self, i: usize, j: usize) -> Option<CompId> {
        let l = self.labels[j * self.nx + i];
        (l >= 0).then_some(l as CompId)
    }

    /// Position of a bounded component in the bounded list (the H1 basis).
    pub fn bounded_pos(&self, id: CompId) -> Option<usize> {
        self.bounded.iter().position(|&b| b == id)
    }

    pub fn cells_of(&self, id: CompId) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.comps[id].size);
        for j in 0..self.ny {
            for i in 0..self.nx {
                if self.labels[j * self.nx + i] == id as i32 {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Label the 4-connected components of the outside cells; a component is
/// unbounded iff it contains a frame cell. Component 0 is always the frame
/// component with representative (0, 0).
pub fn label_components(g: &SymmetricDomainGrid) -> ComplementAtlas {
    let (nx, ny) = (g.nx(), g.ny());
    let mut labels = vec![-1i32; nx * ny];
    let mut comps: Vec<ComponentInfo> = Vec::new();
    for j0 in 0..ny {
        for i0 in 0..nx {
            if g.inside(i0, j0) || labels[j0 * nx + i0] >= 0 {
                continue;
            }
            let id = comps.len() as i32;
            let mut stack = vec![(i0, j0)];
            labels[j0 * nx + i0] = id;
            let mut size = 0usize;
            let mut touches_frame = false;
            let mut touches_real = false;
            while let Some((i, j)) = stack.pop() {
                size += 1;
                touches_frame |= g.is_frame(i, j);
                touches_real |= j == g.mid_row();
                let mut push = |i: usize, j: usize, labels: &mut Vec<i32>| {
                    if !g.inside(i, j) && labels[j * nx + i] < 0 {
                        labels[j * nx + i] = id;
                        stack.push((i, j));
                    }
                };
                if i > 0 {
                    push(i - 1, j, &mut labels);
                }
                if i + 1 < nx {
                    push(i + 1, j, &mut labels);
                }
                if j > 0 {
                    push(i, j - 1, &mut labels);
                }
                if j + 1 < ny {
                    push(i, j + 1, &mut labels);
                }
            }
            comps.push(ComponentInfo {
                bounded: !touches_frame,
                rep: (i0, j0),
                size,
                min_row: j0,
                conj: 0,
                touches_real,
            });
        }
    }
    for id in 0..comps.len() {
        let (i, j) = comps[id].rep;
        comps[id].conj = labels[(ny - 1 - j) * nx + i] as CompId;
    }
    let bounded = (0..comps.len()).filter(|&c| comps[c].bounded).collect();
    ComplementAtlas { labels, comps, bounded, nx, ny }
}

/// Components of the complement of D-minus-the-real-line, upper model.
///
/// The upper open part of D excludes the real row, so its complement holds
/// the whole closed lower half plane plus every above-axis outside cell.
/// A virtual floor node stands for the lower half plane: an outside cell in
/// the first row above the axis connects to it exactly when the real-row
/// cell below is also outside (an inside real-row cell contributes material
/// between the axis and that cell, blocking the descent). Bounded
/// components are the non-floor ones.
#[derive(Clone, Debug)]
pub struct UpperAtlas {
    labels: Vec<i32>, // comp id on outside cells with row > mid; -1 elsewhere
    floor: CompId,
    sizes: Vec<usize>,
    reps: Vec<(usize, usize)>,
    bounded: Vec<CompId>,
    nx: usize,
}

impl UpperAtlas {
    pub fn bounded(&self) -> &[CompId] {
        &self.bounded
    }

    pub fn bounded_count(&self) -> usize {
        self.bounded.len()
    }

    pub fn floor(&self) -> CompId {
        self.floor
    }

    pub fn label_at(&self, i: usize, j: usize) -> Option<CompId> {
        let l = self.labels[j * self.nx + i];
        (l >= 0).then_some(l as CompId)
    }

    pub fn bounded_pos(&self, id: CompId) -> Option<usize> {
        self.bounded.iter().position(|&b| b == id)
    }

    pub fn size(&self, id: CompId) -> usize {
        self.sizes[id]
    }

    pub fn rep(&self, id: CompId) -> (usize, usize) {
        self.reps[id]
    }
}

pub fn label_upper_components(g: &SymmetricDomainGrid) -> UpperAtlas {
    let (nx, ny, mid) = (g.nx(), g.ny(), g.mid_row());
    let mut labels = vec![-1i32; nx * ny];
    let mut sizes: Vec<usize> = Vec::new();
    // floor first so seeded flood fill gives it id 0
    let mut floor_cells: Vec<(usize, usize)> = Vec::new();
    for i in 0..nx {
        if !g.inside(i, mid + 1) && !g.inside(i, mid) {
            floor_cells.push((i, mid + 1));
        }
    }
    let flood = |seeds: Vec<(usize, usize)>, id: i32, labels: &mut Vec<i32>| -> usize {
        let mut stack = Vec::new();
        for (i, j) in seeds {
            if labels[j * nx + i] < 0 {
                labels[j * nx + i] = id;
                stack.push((i, j));
            }
        }
        let mut size = 0usize;
        while let Some((i, j)) = stack.pop() {
            size += 1;
            let mut push = |i: usize, j: usize, labels: &mut Vec<i32>| {
                if j > mid && !g.inside(i, j) && labels[j * nx + i] < 0 {
                    labels[j * nx + i] = id;
                    stack.push((i, j));
                }
            };
            if i > 0 {
                push(i - 1, j, labels);
            }
            if i + 1 < nx {
                push(i + 1, j, labels);
            }
            if j > mid + 1 {
                push(i, j - 1, labels);
            }
            if j + 1 < ny {
                push(i, j + 1, labels);
            }
        }
        size
    };
    let mut reps = vec![floor_cells.first().copied().unwrap_or((0, mid + 1))];
    sizes.push(flood(floor_cells, 0, &mut labels));
    let floor: CompId = 0;
    for j0 in mid + 1..ny {
        for i0 in 0..nx {
            if g.inside(i0, j0) || labels[j0 * nx + i0] >= 0 {
                continue;
            }
            let id = sizes.len() as i32;
            let size = flood(vec![(i0, j0)], id, &mut labels);
            sizes.push(size);
            reps.push((i0, j0));
        }
    }
    let bounded = (1..sizes.len()).collect();
    UpperAtlas { labels, floor, sizes, reps, bounded, nx }
}

/// Closed polygons on the cell-corner lattice of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridCycle {
    pub box2: Box2,
    pub nx: usize,
    pub ny: usize,
    pub polygons: Vec<Vec<(i64, i64)>>,
}

impl GridCycle {
    pub fn empty(g: &SymmetricDomainGrid) -> Self {
        GridCycle { box2: g.box2(), nx: g.nx(), ny: g.ny(), polygons: Vec::new() }
    }

    pub fn from_corner_loops(
        g: &SymmetricDomainGrid,
        polygons: Vec<Vec<(i64, i64)>>,
    ) -> Result<Self, PlanarError> {
        for poly in &polygons {
            if poly.len() < 4 {
                return Err(PlanarError::BadCycle("polygon needs at least 4 vertices".into()));
            }
            for k in 0..poly.len() {
                let a = poly[k];
                let b = poly[(k + 1) % poly.len()];
                if (a.0 != b.0) == (a.1 != b.1) {
                    return Err(PlanarError::BadCycle(format!(
                        "edge {a:?}->{b:?} not axis-aligned or zero length"
                    )));
                }
                for v in [a, b] {
                    if v.0 < 0 || v.1 < 0 || v.0 > g.nx() as i64 || v.1 > g.ny() as i64 {
                        return Err(PlanarError::BadCycle(format!("vertex {v:?} off lattice")));
                    }
                }
            }
        }
        Ok(GridCycle { box2: g.box2(), nx: g.nx(), ny: g.ny(), polygons })
    }

    fn corner(&self, v: (i64, i64)) -> (f64, f64) {
        let hx = (self.box2.x_max - self.box2.x_min) / (2.0 * self.nx as f64);
        let hy = (self.box2.y_max - self.box2.y_min) / (2.0 * self.ny as f64);
        let xc = (self.box2.x_min + self.box2.x_max) / 2.0;
        (
            xc + ((2 * v.0 - self.nx as i64) as f64) * hx,
            ((2 * v.1 - self.ny as i64) as f64) * hy,
        )
    }

    pub fn total_length(&self) -> f64 {
        let mut len = 0.0;
        for poly in &self.polygons {
            for k in 0..poly.len() {
                let (ax, ay) = self.corner(poly[k]);
                let (bx, by) = self.corner(poly[(k + 1) % poly.len()]);
                len += (ax - bx).abs() + (ay - by).abs();
            }
        }
        len
    }

    /// Real-coordinate vertex loops (closed; last edge returns to first).
    pub fn real_polylines(&self) -> Vec<Vec<(f64, f64)>> {
        self.polygons
            .iter()
            .map(|poly| poly.iter().map(|&v| self.corner(v)).collect())
            .collect()
    }

    /// Rotation- and order-independent form for equality tests: each loop
    /// rotated to start at its lexicographic minimum, loops sorted.
    pub fn canonicalized(&self) -> GridCycle {
        let mut polys: Vec<Vec<(i64, i64)>> = self
            .polygons
            .iter()
            .map(|p| {
                let k = (0..p.len()).min_by_key(|&k| p[k]).unwrap();
                let mut q: Vec<(i64, i64)> = p[k..].to_vec();
                q.extend_from_slice(&p[..k]);
                q
            })
            .collect();
        polys.sort();
        GridCycle { polygons: polys, ..self.clone() }
    }
}

/// Integer winding number by signed counting of rightward crossings of the
/// horizontal ray from z.
pub fn winding_number(cycle: &GridCycle, zx: f64, zy: f64) -> Result<i64, PlanarError> {
    let mut total = 0i64;
    for poly in &cycle.polygons {
        for k in 0..poly.len() {
            let a = cycle.corner(poly[k]);
            let b = cycle.corner(poly[(k + 1) % poly.len()]);
            // distance to the axis-aligned segment
            let (lo_x, hi_x) = (a.0.min(b.0), a.0.max(b.0));
            let (lo_y, hi_y) = (a.1.min(b.1), a.1.max(b.1));
            let dx = (lo_x - zx).max(zx - hi_x).max(0.0);
            let dy = (lo_y - zy).max(zy - hi_y).max(0.0);
            if dx.hypot(dy) < 1e-12 {
                return Err(PlanarError::OnCurve);
            }
            if a.0 == b.0 && a.0 > zx && lo_y <= zy && zy < hi_y {
                total += if b.1 > a.1 { 1 } else { -1 };
            }
        }
    }
    Ok(total)
}

/// H1 class of a grid domain: one integer per bounded complement component,
/// ordered as in the atlas bounded list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H1Class {
    pub values: Vec<i64>,
}

impl H1Class {
    pub fn zero(atlas: &ComplementAtlas) -> Self {
        H1Class { values: vec![0; atlas.bounded().len()] }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }
}

/// Indicator class of a bounded component; the grid form of a function that
/// is 1 on the component and 0 elsewhere (in particular 0 at any cell of a
/// different component).
pub fn separating_class(atlas: &ComplementAtlas, b: CompId) -> Result<H1Class, PlanarError> {
    let pos = atlas.bounded_pos(b).ok_or(PlanarError::NotBounded(b))?;
    let mut values = vec![0i64; atlas.bounded().len()];
    values[pos] = 1;
    Ok(H1Class { values })
}

fn edge_cells(
    g: &SymmetricDomainGrid,
    a: (i64, i64),
    b: (i64, i64),
) -> Vec<(Option<(usize, usize)>, Option<(usize, usize)>)> {
    // cells flanking each unit step of the segment; None = off-grid
    let mut out = Vec::new();
    let cell = |i: i64, j: i64| -> Option<(usize, usize)> {
        (i >= 0 && j >= 0 && i < g.nx() as i64 && j < g.ny() as i64)
            .then_some((i as usize, j as usize))
    };
    if a.0 == b.0 {
        let (lo, hi) = (a.1.min(b.1), a.1.max(b.1));
        for j in lo..hi {
            out.push((cell(a.0 - 1, j), cell(a.0, j)));
        }
    } else {
        let (lo, hi) = (a.0.min(b.0), a.0.max(b.0));
        for i in lo..hi {
            out.push((cell(i, a.1 - 1), cell(i, a.1)));
        }
    }
    out
}

/// Winding numbers of the cycle on every bounded complement component.
/// Rejects cycles running through complement material (an edge with outside
/// cells, or the box exterior, on both flanks).
pub fn class_from_cycle(
    g: &SymmetricDomainGrid,
    atlas: &ComplementAtlas,
    cycle: &GridCycle,
) -> Result<H1Class, PlanarError> {
    for poly in &cycle.polygons {
        for k in 0..poly.len() {
            let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
            for (l, r) in edge_cells(g, a, b) {
                let out = |c: Option<(usize, usize)>| c.map_or(true, |(i, j)| !g.inside(i, j));
                if out(l) && out(r) {
                    return Err(PlanarError::CycleLeavesDomain);
                }
            }
        }
    }
    let mut values = Vec::with_capacity(atlas.bounded().len());
    for &b in atlas.bounded() {
        let (i, j) = atlas.comp(b).rep;
        let (x, y) = g.center(i, j);
        values.push(winding_number(cycle, x, y)?);
    }
    // the unbounded component must read zero
    for id in 0..atlas.comp_count() {
        if !atlas.comp(id).bounded {
            let (i, j) = atlas.comp(id).rep;
            let (x, y) = g.center(i, j);
            if winding_number(cycle, x, y)? != 0 {
                return Err(PlanarError::BadCycle("nonzero winding on unbounded component".into()));
            }
        }
    }
    Ok(H1Class { values })
}

/// Oriented boundary loops of a cell set, region on the left of travel.
/// At a corner where the region touches itself diagonally the trace turns
/// left first, which keeps the two diagonal region cells on separate sides
/// of the curve (the same tie-break as threshold-1/2 contouring that splits
/// the high cells at a saddle).
fn trace_boundary(g: &SymmetricDomainGrid, in_set: &[bool]) -> Vec<Vec<(i64, i64)>> {
    use std::collections::HashMap;
    let nx = g.nx() as i64;
    let has = |i: i64, j: i64| -> bool {
        i >= 0 && j >= 0 && i < nx && j < g.ny() as i64 && in_set[(j * nx + i) as usize]
    };
    // directed edges with the set on the left
    let mut by_start: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut edges: Vec<((i64, i64), (i64, i64))> = Vec::new();
    for j in 0..g.ny() as i64 {
        for i in 0..nx {
            if !has(i, j) {
                continue;
            }
            if !has(i - 1, j) {
                edges.push(((i, j + 1), (i, j)));
            }
            if !has(i + 1, j) {
                edges.push(((i + 1, j), (i + 1, j + 1)));
            }
            if !has(i, j - 1) {
                edges.push(((i, j), (i + 1, j)));
            }
            if !has(i, j + 1) {
                edges.push(((i + 1, j + 1), (i, j + 1)));
            }
        }
    }
    edges.sort();
    for (k, (s, _)) in edges.iter().enumerate() {
        by_start.entry(*s).or_default().push(k);
    }
    let mut used = vec![false; edges.len()];
    let mut loops = Vec::new();
    for start in 0..edges.len() {
        if used[start] {
            continue;
        }
        let mut path = vec![edges[start].0];
        let mut cur = start;
        loop {
            used[cur] = true;
            let (from, to) = edges[cur];
            let dir = (to.0 - from.0, to.1 - from.1);
            if to == path[0] {
                break;
            }
            path.push(to);
            // left turn first, then straight, then right
            let prefs = [(-dir.1, dir.0), dir, (dir.1, -dir.0)];
            let cands = by_start.get(&to).map(Vec::as_slice).unwrap_or(&[]);
            let next = prefs.iter().find_map(|&want| {
                cands.iter().copied().find(|&e| {
                    let (s, t) = edges[e];
                    !used[e] && (t.0 - s.0, t.1 - s.1) == want
                })
            });
            cur = next.expect("boundary edges must chain into closed loops");
        }
        loops.push(path);
    }
    loops
}

/// Explicit cycle realizing a class: for each bounded component with value
/// v, the boundary of the component thickened by its one-cell collar into
/// the domain, traversed |v| times with orientation sign(v).
pub fn cycle_from_class(
    g: &SymmetricDomainGrid,
    atlas: &ComplementAtlas,
    class: &H1Class,
) -> Result<GridCycle, PlanarError> {
    assert_eq!(class.values.len(), atlas.bounded().len());
    let (nx, ny) = (g.nx(), g.ny());
    let mut polygons = Vec::new();
    for (pos, &b) in atlas.bounded().iter().enumerate() {
        let v = class.values[pos];
        if v == 0 {
            continue;
        }
        let cells = atlas.cells_of(b);
        // the component must be insulated from other complement components
        for &(i, j) in &cells {
            for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if ni < 0 || nj < 0 || ni >= nx as i64 || nj >= ny as i64 {
                        continue;
                    }
                    if let Some(other) = atlas.label_at(ni as usize, nj as usize) {
                        if other != b {
                            return Err(PlanarError::NoCollar(b));
                        }
                    }
                }
            }
        }
        let mut in_set = vec![false; nx * ny];
        for &(i, j) in &cells {
            in_set[j * nx + i] = true;
            for (ni, nj) in [(i + 1, j), (i.wrapping_sub(1), j), (i, j + 1), (i, j.wrapping_sub(1))] {
                if ni < nx && nj < ny && g.inside(ni, nj) {
                    in_set[nj * nx + ni] = true;
                }
            }
        }
        let loops = trace_boundary(g, &in_set);
        for lp in loops {
            let oriented: Vec<(i64, i64)> = if v > 0 {
                lp
            } else {
                let mut r = lp;
                r.reverse();
                r
            };
            for _ in 0..v.unsigned_abs() {
                polygons.push(oriented.clone());
            }
        }
    }
    Ok(GridCycle { box2: g.box2(), nx, ny, polygons })
}

/// Matrix of the restriction of complement-supported classes along a
/// nesting d inside d1: one row per bounded component of the larger
/// domain's complement, one column per bounded component of the smaller
/// domain's complement; the entry is 1 exactly when the row component sits
/// inside the column component.
pub fn restriction_map(
    d: &SymmetricDomainGrid,
    atlas_d: &ComplementAtlas,
    d1: &SymmetricDomainGrid,
    atlas_d1: &ComplementAtlas,
) -> Result<IntMat, PlanarError> {
    if !check_nested(d, d1)? {
        return Err(PlanarError::NotNested);
    }
    let rows = atlas_d1.bounded().len();
    let cols = atlas_d.bounded().len();
    let mut m = IntMat::zeros(rows, cols);
    for (r, &cprime) in atlas_d1.bounded().iter().enumerate() {
        let (i, j) = atlas_d1.comp(cprime).rep;
        let host = atlas_d.label_at(i, j).expect("outside d1 is outside d");
        if let Some(c) = atlas_d.bounded_pos(host) {
            m.set(r, c, 1);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{derive_regions, rasterize, DomainSpec};

    fn grid(spec: &DomainSpec) -> SymmetricDomainGrid {
        rasterize(spec, Box2::square(2.5), 65, 65).unwrap()
    }

    fn annulus() -> DomainSpec {
        DomainSpec::Annulus { center: 0.0, inner: 1.0, outer: 2.0 }
    }

    fn punctured_plane() -> DomainSpec {
        DomainSpec::Difference {
            from: Box::new(DomainSpec::All),
            minus: Box::new(DomainSpec::ClosedDisc { center: [0.0, 0.0], radius: 0.0 }),
        }
    }

    fn two_holes() -> DomainSpec {
        // symmetric pair of off-axis holes
        DomainSpec::Difference {
            from: Box::new(DomainSpec::Disc { center: [0.0, 0.0], radius: 2.2 }),
            minus: Box::new(DomainSpec::Symmetrize {
                of: Box::new(DomainSpec::ClosedDisc { center: [0.0, 1.0], radius: 0.4 }),
            }),
        }
    }

    #[test]
    fn disc_complement_has_no_bounded_part() {
        let g = grid(&DomainSpec::Disc { center: [0.0, 0.0], radius: 1.0 });
        let a = label_components(&g);
        assert_eq!(a.comp_count(), 1);
        assert!(a.bounded().is_empty());
        assert_eq!(a.comp(0).rep, (0, 0));
        assert!(!a.comp(0).bounded);
    }

    #[test]
    fn annulus_complement_hole() {
        let g = grid(&annulus());
        let a = label_components(&g);
        assert_eq!(a.comp_count(), 2);
        assert_eq!(a.bounded(), &[1]);
        assert!(a.comp(1).touches_real);
        assert_eq!(a.comp(1).conj, 1);
        // hole is the grid trace of the closed unit disc
        let cells = a.cells_of(1);
        assert!(cells.iter().all(|&(i, j)| {
            let (x, y) = g.center(i, j);
            x * x + y * y <= 1.0 + 1e-9
        }));
    }

    #[test]
    fn puncture_is_single_bounded_cell() {
        let g = grid(&punctured_plane());
        let a = label_components(&g);
        assert_eq!(a.comp_count(), 2);
        assert_eq!(a.bounded(), &[1]);
        assert_eq!(a.comp(1).size, 1);
        assert_eq!(a.comp(1).rep, (32, 32));
    }

    #[test]
    fn conjugation_is_involution_swapping_off_axis_holes() {
        let g = grid(&two_holes());
        let a = label_components(&g);
        assert_eq!(a.bounded().len(), 2);
        let [b1, b2] = [a.bounded()[0], a.bounded()[1]];
        assert_eq!(a.comp(b1).conj, b2);
        assert_eq!(a.comp(b2).conj, b1);
        assert!(!a.comp(b1).touches_real && !a.comp(b2).touches_real);
        for id in 0..a.comp_count() {
            assert_eq!(a.comp(a.comp(id).conj).conj, id);
            if a.comp(id).touches_real {
                assert_eq!(a.comp(id).conj, id);
            }
        }
    }

    #[test]
    fn upper_atlas_annulus_has_no_bounded_comp() {
        // the inner gap touches the real axis through outside real cells
        let g = grid(&annulus());
        let u = label_upper_components(&g);
        assert_eq!(u.bounded_count(), 0);
    }

    #[test]
    fn upper_atlas_counts_off_axis_hole() {
        let g = grid(&two_holes());
        let u = label_upper_components(&g);
        assert_eq!(u.bounded_count(), 1);
        let a = label_components(&g);
        let upper_hole = a
            .bounded()
            .iter()
            .copied()
            .find(|&b| a.comp(b).rep.1 > g.mid_row())
            .unwrap();
        let (i, j) = a.comp(upper_hole).rep;
        assert_eq!(u.label_at(i, j), Some(u.bounded()[0]));
    }

    #[test]
    fn upper_atlas_blocks_hole_resting_on_real_material() {
        // disc with a symmetric pair of holes resting right above and below
        // the covered real axis: the upper hole is a genuine upper-model
        // bounded component because the real row underneath it is inside
        let spec = DomainSpec::Difference {
            from: Box::new(DomainSpec::Disc { center: [0.0, 0.0], radius: 2.2 }),
            minus: Box::new(DomainSpec::Symmetrize {
                of: Box::new(DomainSpec::Rect { x: [-0.5, 0.5], y: [0.15, 0.8] }),
            }),
        };
        let g = grid(&spec);
        let r = derive_regions(&g);
        assert_eq!(r.real_intervals.len(), 1); // real axis fully covered
        let u = label_upper_components(&g);
        assert_eq!(u.bounded_count(), 1);
    }

    #[test]
    fn winding_square_cases() {
        let g = grid(&annulus());
        let sq = |k: i64, rev: bool| {
            let mut p = vec![(32 - k, 32 - k), (32 + k, 32 - k), (32 + k, 32 + k), (32 - k, 32 + k)];
            if rev {
                p.reverse();
            }
            GridCycle::from_corner_loops(&g, vec![p]).unwrap()
        };
        let ccw = sq(3, false);
        assert_eq!(winding_number(&ccw, 0.0, 0.0).unwrap(), 1);
        assert_eq!(winding_number(&ccw, 2.0, 2.0).unwrap(), 0);
        let cw = sq(3, true);
        assert_eq!(winding_number(&cw, 0.0, 0.0).unwrap(), -1);
        let doubled = GridCycle {
            polygons: [ccw.polygons.clone(), ccw.polygons.clone()].concat(),
            ..ccw.clone()
        };
        assert_eq!(winding_number(&doubled, 0.0, 0.0).unwrap(), 2);
        let (ex, ey) = (g.corner(32 - 3, 32).0, 0.0);
        assert_eq!(winding_number(&ccw, ex, ey), Err(PlanarError::OnCurve));
    }

    #[test]
    fn class_from_hand_cycle_in_annulus() {
        let g = grid(&annulus());
        let a = label_components(&g);
        let square = |k: i64| {
            let p = vec![(32 - k, 32 - k), (32 + k, 32 - k), (32 + k, 32 + k), (32 - k, 32 + k)];
            GridCycle::from_corner_loops(&g, vec![p]).unwrap()
        };
        // half-width 39/26 = 1.5: corners at radius 2.12, outside the ring
        assert_eq!(
            class_from_cycle(&g, &a, &square(19)),
            Err(PlanarError::CycleLeavesDomain)
        );
        // half-width 31/26 ~ 1.19: corner radius ~1.69, fully in the ring
        let class = class_from_cycle(&g, &a, &square(15)).unwrap();
        assert_eq!(class.values, vec![1]);
    }

    #[test]
    fn contractible_square_gives_zero_class() {
        let g = grid(&annulus());
        let a = label_components(&g);
        // small square in the annulus material near (1.5, 0)
        let ci = 32 + 19;
        let p = vec![(ci, 31), (ci + 2, 31), (ci + 2, 33), (ci, 33)];
        let cy = GridCycle::from_corner_loops(&g, vec![p]).unwrap();
        assert!(class_from_cycle(&g, &a, &cy).unwrap().is_zero());
    }

    #[test]
    fn roundtrip_on_two_hole_domain() {
        let g = grid(&two_holes());
        let a = label_components(&g);
        assert_eq!(a.bounded().len(), 2);
        for values in [vec![1, 0], vec![0, 1], vec![2, -1], vec![-3, 3], vec![0, 0]] {
            let f = H1Class { values: values.clone() };
            let cy = cycle_from_class(&g, &a, &f).unwrap();
            let back = class_from_cycle(&g, &a, &cy).unwrap();
            assert_eq!(back.values, values, "values {values:?}");
            // extracting again from the recovered class reproduces the cycle
            let cy2 = cycle_from_class(&g, &a, &back).unwrap();
            assert_eq!(cy.canonicalized(), cy2.canonicalized());
        }
    }

    #[test]
    fn roundtrip_on_puncture_and_annulus() {
        for spec in [punctured_plane(), annulus()] {
            let g = grid(&spec);
            let a = label_components(&g);
            let f = H1Class { values: vec![2] };
            let cy = cycle_from_class(&g, &a, &f).unwrap();
            assert_eq!(class_from_cycle(&g, &a, &cy).unwrap(), f);
        }
    }

    #[test]
    fn winding_invariant_under_square_detour() {
        let g = grid(&annulus());
        let a = label_components(&g);
        let k = 15i64;
        let base = vec![(32 - k, 32 - k), (32 + k, 32 - k), (32 + k, 32 + k), (32 - k, 32 + k)];
        // elementary square move: push one bottom-edge cell outward
        let bumped = vec![
            (32 - k, 32 - k),
            (31, 32 - k),
            (31, 32 - k - 1),
            (33, 32 - k - 1),
            (33, 32 - k),
            (32 + k, 32 - k),
            (32 + k, 32 + k),
            (32 - k, 32 + k),
        ];
        let c1 = class_from_cycle(&g, &a, &GridCycle::from_corner_loops(&g, vec![base]).unwrap());
        let c2 = class_from_cycle(&g, &a, &GridCycle::from_corner_loops(&g, vec![bumped]).unwrap());
        assert_eq!(c1.unwrap(), c2.unwrap());
    }

    #[test]
    fn separating_class_basics() {
        let g = grid(&two_holes());
        let a = label_components(&g);
        let b = a.bounded()[0];
        let f = separating_class(&a, b).unwrap();
        assert_eq!(f.values, vec![1, 0]);
        // value is 0 on any other component, including the unbounded one
        assert_eq!(separating_class(&a, 0), Err(PlanarError::NotBounded(0)));
    }

    #[test]
    fn no_collar_on_checkerboard_touching_components() {
        // two complement blobs meeting at a corner (not well-composed)
        let (nx, ny) = (9, 9);
        let mid = ny / 2;
        let mut mask = vec![true; nx * ny];
        let mut clear = |i: usize, j: usize| {
            mask[j * nx + i] = false;
            mask[(ny - 1 - j) * nx + i] = false;
        };
        for i in 0..nx {
            clear(i, 0);
            clear(i, ny - 1);
        }
        for j in 0..ny {
            clear(0, j);
            clear(nx - 1, j);
        }
        clear(3, mid);
        clear(4, mid + 1); // diagonal neighbor of (3, mid): separate comps
        let b = Box2::square(2.0);
        let g = SymmetricDomainGrid::from_raw_mask(b, nx, ny, mask).unwrap();
        assert!(!g.is_well_composed());
        let a = label_components(&g);
        assert_eq!(a.bounded().len(), 3); // (3,mid), (4,mid+1), (4,mid-1)
        for &bid in a.bounded() {
            let f = separating_class(&a, bid).unwrap();
            assert_eq!(cycle_from_class(&g, &a, &f), Err(PlanarError::NoCollar(bid)));
        }
    }

    #[test]
    fn restriction_identity_and_lune_fixture() {
        let d = grid(&DomainSpec::Difference {
            from: Box::new(DomainSpec::All),
            minus: Box::new(DomainSpec::ClosedDisc { center: [0.0, 0.0], radius: 1.0 }),
        });
        let ad = label_components(&d);
        let self_map = restriction_map(&d, &ad, &d, &ad).unwrap();
        assert_eq!(self_map, IntMat::identity(1));

        let d1 = grid(&DomainSpec::Union {
            parts: vec![
                DomainSpec::Difference {
                    from: Box::new(DomainSpec::All),
                    minus: Box::new(DomainSpec::ClosedDisc { center: [0.0, 0.0], radius: 1.0 }),
                },
                DomainSpec::Strip { y: [-0.5, 0.5] },
            ],
        });
        let ad1 = label_components(&d1);
        assert_eq!(ad1.bounded().len(), 2); // two lunes
        let m = restriction_map(&d, &ad, &d1, &ad1).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 1));
        assert_eq!(m.column(0), vec![1, 1]);
        assert!(crate::intmat::is_injective(&m));
    }

    #[test]
    fn restriction_zero_column_when_hole_fills() {
        let d = grid(&DomainSpec::Difference {
            from: Box::new(DomainSpec::All),
            minus: Box::new(DomainSpec::ClosedDisc { center: [0.0, 0.0], radius: 0.8 }),
        });
        let d1 = grid(&DomainSpec::All);
        let (ad, ad1) = (label_components(&d), label_components(&d1));
        let m = restriction_map(&d, &ad, &d1, &ad1).unwrap();
        assert_eq!((m.rows(), m.cols()), (0, 1));
        assert!(!crate::intmat::is_injective(&m));
        // reversed nesting is rejected
        assert_eq!(
            restriction_map(&d1, &ad1, &d, &ad).unwrap_err(),
            PlanarError::NotNested
        );
    }
}

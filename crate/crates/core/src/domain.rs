//! Conjugation-symmetric planar domains on a rasterized window.
//!
//! A domain is described by a small expression tree of primitives and set
//! operators, then rasterized to a cell grid by center sampling. The grid
//! always carries an odd row count so one cell row is centered exactly on
//! the real axis, the outer one-cell frame is forced outside, and the mask
//! is mirror-symmetric across the real row by construction. Cell centers
//! are computed from the box midline with integer offsets so that mirrored
//! rows have exactly negated y coordinates and the middle row sits at 0.0.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DomainError {
    #[error("bad box: {0}")]
    BadBox(String),
    #[error("bad resolution: {0}")]
    BadResolution(String),
    #[error("spec is not invariant under conjugation; wrap it in symmetrize or pair the primitives")]
    AsymmetricSpec,
    #[error("spec bounding region [{x0},{x1}]x[{y0},{y1}] does not fit the box with a 2-cell margin")]
    BoxTooSmall { x0: f64, x1: f64, y0: f64, y1: f64 },
    #[error("grids have different boxes or resolutions")]
    GridMismatch,
    #[error("bad mask: {0}")]
    BadMask(String),
    #[error("spec parse error: {0}")]
    Parse(String),
}

/// Symmetric axis-aligned window; y range must be centered on the real axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Box2 {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Box2 {
    pub fn square(half: f64) -> Self {
        Box2 { x_min: -half, x_max: half, y_min: -half, y_max: half }
    }

    fn validate(&self) -> Result<(), DomainError> {
        if !(self.x_min < self.x_max) || !(self.y_min < self.y_max) {
            return Err(DomainError::BadBox("empty or inverted box".into()));
        }
        if self.y_min != -self.y_max {
            return Err(DomainError::BadBox("y range must be symmetric about 0".into()));
        }
        if ![self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite()) {
            return Err(DomainError::BadBox("non-finite box".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DomainSpec {
    /// Whole plane (clipped by the rasterization window).
    All,
    /// Open disc.
    Disc { center: [f64; 2], radius: f64 },
    /// Closed disc; radius 0 is a single point (useful as a puncture).
    ClosedDisc { center: [f64; 2], radius: f64 },
    /// Open annulus about a real center.
    Annulus { center: f64, inner: f64, outer: f64 },
    /// Open axis-aligned rectangle.
    Rect { x: [f64; 2], y: [f64; 2] },
    /// Open horizontal strip y in (y0, y1).
    Strip { y: [f64; 2] },
    /// Closed horizontal strip y in [y0, y1]; [0,0] is the real axis.
    ClosedStrip { y: [f64; 2] },
    Union { parts: Vec<DomainSpec> },
    Intersection { parts: Vec<DomainSpec> },
    Difference { from: Box<DomainSpec>, minus: Box<DomainSpec> },
    /// Union with the conjugate reflection; always symmetric.
    Symmetrize { of: Box<DomainSpec> },
}

impl DomainSpec {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            DomainSpec::All => true,
            DomainSpec::Disc { center, radius } => {
                let (dx, dy) = (x - center[0], y - center[1]);
                dx * dx + dy * dy < radius * radius
            }
            DomainSpec::ClosedDisc { center, radius } => {
                let (dx, dy) = (x - center[0], y - center[1]);
                dx * dx + dy * dy <= radius * radius
            }
            DomainSpec::Annulus { center, inner, outer } => {
                let (dx, dy) = (x - center, y);
                let rr = dx * dx + dy * dy;
                inner * inner < rr && rr < outer * outer
            }
            DomainSpec::Rect { x: xs, y: ys } => {
                xs[0] < x && x < xs[1] && ys[0] < y && y < ys[1]
            }
            DomainSpec::Strip { y: ys } => ys[0] < y && y < ys[1],
            DomainSpec::ClosedStrip { y: ys } => ys[0] <= y && y <= ys[1],
            DomainSpec::Union { parts } => parts.iter().any(|p| p.contains(x, y)),
            DomainSpec::Intersection { parts } => {
                !parts.is_empty() && parts.iter().all(|p| p.contains(x, y))
            }
            DomainSpec::Difference { from, minus } => {
                from.contains(x, y) && !minus.contains(x, y)
            }
            DomainSpec::Symmetrize { of } => of.contains(x, y) || of.contains(x, -y),
        }
    }

    /// Conjugate reflection of the described set.
    pub fn mirror(&self) -> DomainSpec {
        // -y + 0.0 collapses -0.0 so mirrored trees compare structurally
        let neg = |v: f64| -v + 0.0;
        match self {
            DomainSpec::All => DomainSpec::All,
            DomainSpec::Disc { center, radius } => DomainSpec::Disc {
                center: [center[0], neg(center[1])],
                radius: *radius,
            },
            DomainSpec::ClosedDisc { center, radius } => DomainSpec::ClosedDisc {
                center: [center[0], neg(center[1])],
                radius: *radius,
            },
            DomainSpec::Annulus { .. } => self.clone(),
            DomainSpec::Rect { x, y } => DomainSpec::Rect {
                x: *x,
                y: [neg(y[1]), neg(y[0])],
            },
            DomainSpec::Strip { y } => DomainSpec::Strip { y: [neg(y[1]), neg(y[0])] },
            DomainSpec::ClosedStrip { y } => {
                DomainSpec::ClosedStrip { y: [neg(y[1]), neg(y[0])] }
            }
            DomainSpec::Union { parts } => DomainSpec::Union {
                parts: parts.iter().map(|p| p.mirror()).collect(),
            },
            DomainSpec::Intersection { parts } => DomainSpec::Intersection {
                parts: parts.iter().map(|p| p.mirror()).collect(),
            },
            DomainSpec::Difference { from, minus } => DomainSpec::Difference {
                from: Box::new(from.mirror()),
                minus: Box::new(minus.mirror()),
            },
            DomainSpec::Symmetrize { of } => DomainSpec::Symmetrize {
                of: Box::new(of.mirror()),
            },
        }
    }

    fn canonical(&self) -> DomainSpec {
        match self {
            DomainSpec::Union { parts } => {
                let mut c: Vec<DomainSpec> = parts.iter().map(|p| p.canonical()).collect();
                c.sort_by_key(|p| serde_json::to_string(p).expect("serialize spec"));
                DomainSpec::Union { parts: c }
            }
            DomainSpec::Intersection { parts } => {
                let mut c: Vec<DomainSpec> = parts.iter().map(|p| p.canonical()).collect();
                c.sort_by_key(|p| serde_json::to_string(p).expect("serialize spec"));
                DomainSpec::Intersection { parts: c }
            }
            DomainSpec::Difference { from, minus } => DomainSpec::Difference {
                from: Box::new(from.canonical()),
                minus: Box::new(minus.canonical()),
            },
            // expand into the defining union so the mirror comparison sees
            // a symmetric tree
            DomainSpec::Symmetrize { of } => {
                let mut c = vec![of.canonical(), of.mirror().canonical()];
                c.sort_by_key(|p| serde_json::to_string(p).expect("serialize spec"));
                DomainSpec::Union { parts: c }
            }
            other => other.clone(),
        }
    }

    /// Structural conjugation invariance; sufficient for everything this
    /// crate builds, though a semantically symmetric tree written in a
    /// non-mirror-closed form would be rejected.
    pub fn is_symmetric(&self) -> bool {
        self.canonical() == self.mirror().canonical()
    }

    /// Smallest known axis-aligned box containing the set; None if unbounded.
    pub fn bounding_box(&self) -> Option<(f64, f64, f64, f64)> {
        match self {
            DomainSpec::All | DomainSpec::Strip { .. } | DomainSpec::ClosedStrip { .. } => None,
            DomainSpec::Disc { center, radius } | DomainSpec::ClosedDisc { center, radius } => {
                Some((center[0] - radius, center[0] + radius, center[1] - radius, center[1] + radius))
            }
            DomainSpec::Annulus { center, outer, .. } => {
                Some((center - outer, center + outer, -outer, *outer))
            }
            DomainSpec::Rect { x, y } => Some((x[0], x[1], y[0], y[1])),
            DomainSpec::Union { parts } => {
                let mut acc: Option<(f64, f64, f64, f64)> = None;
                for p in parts {
                    let b = p.bounding_box()?;
                    acc = Some(match acc {
                        None => b,
                        Some(a) => (a.0.min(b.0), a.1.max(b.1), a.2.min(b.2), a.3.max(b.3)),
                    });
                }
                acc
            }
            DomainSpec::Intersection { parts } => {
                let mut acc: Option<(f64, f64, f64, f64)> = None;
                for p in parts {
                    if let Some(b) = p.bounding_box() {
                        acc = Some(match acc {
                            None => b,
                            Some(a) => (a.0.max(b.0), a.1.min(b.1), a.2.max(b.2), a.3.min(b.3)),
                        });
                    }
                }
                acc
            }
            DomainSpec::Difference { from, .. } => from.bounding_box(),
            DomainSpec::Symmetrize { of } => {
                let b = of.bounding_box()?;
                let ym = b.2.abs().max(b.3.abs());
                Some((b.0, b.1, -ym, ym))
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialize spec")
    }

    pub fn from_json(s: &str) -> Result<Self, DomainError> {
        serde_json::from_str(s).map_err(|e| DomainError::Parse(e.to_string()))
    }
}

/// Rasterized conjugation-symmetric open set with a forced outside frame.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricDomainGrid {
    box2: Box2,
    nx: usize,
    ny: usize,
    mask: Vec<bool>, // row-major, index j*nx + i, row 0 at y_min
}

impl SymmetricDomainGrid {
    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn box2(&self) -> Box2 {
        self.box2
    }

    /// Index of the cell row centered on the real axis.
    pub fn mid_row(&self) -> usize {
        self.ny / 2
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        j * self.nx + i
    }

    #[inline]
    pub fn inside(&self, i: usize, j: usize) -> bool {
        self.mask[self.idx(i, j)]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Cell center; mirrored rows get exactly negated y, the middle row
    /// exactly 0.0, by the integer-offset form of the formula.
    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        let hx = (self.box2.x_max - self.box2.x_min) / (2.0 * self.nx as f64);
        let hy = (self.box2.y_max - self.box2.y_min) / (2.0 * self.ny as f64);
        let xc = (self.box2.x_min + self.box2.x_max) / 2.0;
        let x = xc + ((2 * i as i64 + 1 - self.nx as i64) as f64) * hx;
        let y = ((2 * j as i64 + 1 - self.ny as i64) as f64) * hy;
        (x, y)
    }

    /// Corner (i, j) of the cell lattice, i in 0..=nx, j in 0..=ny.
    pub fn corner(&self, i: i64, j: i64) -> (f64, f64) {
        let hx = (self.box2.x_max - self.box2.x_min) / (2.0 * self.nx as f64);
        let hy = (self.box2.y_max - self.box2.y_min) / (2.0 * self.ny as f64);
        let xc = (self.box2.x_min + self.box2.x_max) / 2.0;
        let x = xc + ((2 * i - self.nx as i64) as f64) * hx;
        let y = ((2 * j - self.ny as i64) as f64) * hy;
        (x, y)
    }

    pub fn cell_width(&self) -> f64 {
        (self.box2.x_max - self.box2.x_min) / self.nx as f64
    }

    pub fn cell_height(&self) -> f64 {
        (self.box2.y_max - self.box2.y_min) / self.ny as f64
    }

    /// Cell containing the point, if inside the box.
    pub fn locate(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let b = self.box2;
        if !(b.x_min <= x && x < b.x_max && b.y_min <= y && y < b.y_max) {
            return None;
        }
        let i = ((x - b.x_min) / self.cell_width()).floor() as usize;
        let j = ((y - b.y_min) / self.cell_height()).floor() as usize;
        Some((i.min(self.nx - 1), j.min(self.ny - 1)))
    }

    pub fn is_frame(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx - 1 || j == self.ny - 1
    }

    pub fn inside_count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// No 2x2 block may hold either diagonal in/out checker pattern; this is
    /// the resolution-adequacy condition that makes 4-connected components
    /// of both phases meaningful.
    pub fn is_well_composed(&self) -> bool {
        for j in 0..self.ny - 1 {
            for i in 0..self.nx - 1 {
                let a = self.inside(i, j);
                let b = self.inside(i + 1, j);
                let c = self.inside(i, j + 1);
                let d = self.inside(i + 1, j + 1);
                if a == d && b == c && a != b {
                    return false;
                }
            }
        }
        true
    }

    /// Build from an explicit mask; frame and mirror symmetry are validated,
    /// not silently fixed. Meant for tests and file import.
    pub fn from_raw_mask(box2: Box2, nx: usize, ny: usize, mask: Vec<bool>) -> Result<Self, DomainError> {
        box2.validate()?;
        check_resolution(nx, ny)?;
        if mask.len() != nx * ny {
            return Err(DomainError::BadMask(format!(
                "mask length {} != {}x{}",
                mask.len(),
                nx,
                ny
            )));
        }
        let g = SymmetricDomainGrid { box2, nx, ny, mask };
        for j in 0..ny {
            for i in 0..nx {
                if g.is_frame(i, j) && g.inside(i, j) {
                    return Err(DomainError::BadMask("frame cell marked inside".into()));
                }
                if g.inside(i, j) != g.inside(i, ny - 1 - j) {
                    return Err(DomainError::BadMask("mask not mirror-symmetric".into()));
                }
            }
        }
        Ok(g)
    }

    /// Rows of 0/1 characters, top row (largest y) first.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity((self.nx + 1) * self.ny);
        for j in (0..self.ny).rev() {
            for i in 0..self.nx {
                s.push(if self.inside(i, j) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }
}

fn check_resolution(nx: usize, ny: usize) -> Result<(), DomainError> {
    if nx < 5 || ny < 5 {
        return Err(DomainError::BadResolution("need at least 5x5 cells".into()));
    }
    if ny % 2 == 0 {
        return Err(DomainError::BadResolution("row count must be odd".into()));
    }
    Ok(())
}

/// Center-sample the spec on the window. The upper half (rows at y >= 0) is
/// evaluated and mirrored downward, so the symmetry invariant is exact; an
/// unbounded spec is silently clipped at the frame, while a bounded spec
/// whose support does not fit inside the frame with a 2-cell margin is
/// rejected.
pub fn rasterize(
    spec: &DomainSpec,
    box2: Box2,
    nx: usize,
    ny: usize,
) -> Result<SymmetricDomainGrid, DomainError> {
    box2.validate()?;
    check_resolution(nx, ny)?;
    if !spec.is_symmetric() {
        return Err(DomainError::AsymmetricSpec);
    }
    if let Some((x0, x1, y0, y1)) = spec.bounding_box() {
        let not_empty = x0 <= x1 && y0 <= y1;
        let mx = 2.0 * (box2.x_max - box2.x_min) / nx as f64;
        let my = 2.0 * (box2.y_max - box2.y_min) / ny as f64;
        let fits = x0 > box2.x_min + mx
            && x1 < box2.x_max - mx
            && y0 > box2.y_min + my
            && y1 < box2.y_max - my;
        if not_empty && !fits {
            return Err(DomainError::BoxTooSmall { x0, x1, y0, y1 });
        }
    }
    let mut g = SymmetricDomainGrid { box2, nx, ny, mask: vec![false; nx * ny] };
    let mid = g.mid_row();
    for j in mid..ny {
        for i in 0..nx {
            if g.is_frame(i, j) || g.is_frame(i, ny - 1 - j) {
                continue;
            }
            let (x, y) = g.center(i, j);
            if spec.contains(x, y) {
                let k = g.idx(i, j);
                g.mask[k] = true;
                let m = g.idx(i, ny - 1 - j);
                g.mask[m] = true;
            }
        }
    }
    Ok(g)
}

/// Maximal runs of inside cells on the real row, as inclusive column ranges.
pub type RealInterval = (usize, usize);

#[derive(Clone, Debug)]
pub struct DerivedRegions {
    /// Inside cells with center y >= 0 (rows mid..).
    pub dplus: Vec<bool>,
    /// Inside cells with center y > 0 (rows mid+1..).
    pub dstar: Vec<bool>,
    pub real_intervals: Vec<RealInterval>,
}

pub fn derive_regions(g: &SymmetricDomainGrid) -> DerivedRegions {
    let (nx, ny, mid) = (g.nx(), g.ny(), g.mid_row());
    let mut dplus = vec![false; nx * ny];
    let mut dstar = vec![false; nx * ny];
    for j in mid..ny {
        for i in 0..nx {
            if g.inside(i, j) {
                dplus[g.idx(i, j)] = true;
                if j > mid {
                    dstar[g.idx(i, j)] = true;
                }
            }
        }
    }
    let mut real_intervals = Vec::new();
    let mut run: Option<usize> = None;
    for i in 0..nx {
        match (g.inside(i, mid), run) {
            (true, None) => run = Some(i),
            (false, Some(s)) => {
                real_intervals.push((s, i - 1));
                run = None;
            }
            _ => {}
        }
    }
    if let Some(s) = run {
        real_intervals.push((s, nx - 1));
    }
    DerivedRegions { dplus, dstar, real_intervals }
}

/// True iff every inside cell of `d` is inside `d1`.
pub fn check_nested(
    d: &SymmetricDomainGrid,
    d1: &SymmetricDomainGrid,
) -> Result<bool, DomainError> {
    if d.box2 != d1.box2 || d.nx != d1.nx || d.ny != d1.ny {
        return Err(DomainError::GridMismatch);
    }
    Ok(d.mask.iter().zip(&d1.mask).all(|(&a, &b)| !a || b))
}

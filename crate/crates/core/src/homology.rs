//! Integer homology of a symmetric grid domain and of the four-dimensional
//! body swept by rotating it about the real axis.
//!
//! Every group is realized as a free abelian group on explicit labels:
//! bounded complement components for first homology, real-axis intervals for
//! the reduced connectivity of the real trace. Maps become small integer
//! matrices over those bases and all rank or injectivity questions are
//! settled by Smith normal form, never by floating point.
//!
//! Bases are always ordered by ascending component id (which is row-major
//! scan order of representatives), so matrices are reproducible across runs.

use serde::Serialize;
use thiserror::Error;

use crate::domain::{check_nested, derive_regions, DomainError, RealInterval, SymmetricDomainGrid};
use crate::intmat::{self, IntMat};
use crate::planar::{
    label_components, label_upper_components, restriction_map, CompId, ComplementAtlas,
    PlanarError, UpperAtlas,
};

#[derive(Debug, Error, PartialEq)]
pub enum HomologyError {
    /// The restriction matrix fails to carry relations into relations; this
    /// indicates a bug in the component bookkeeping, not a legitimate input.
    #[error("restriction does not descend to the quotient presentations")]
    NotDescending,
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Planar(#[from] PlanarError),
}

/// Betti numbers of the rotation body of a symmetric planar domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BettiTriple {
    pub b1: usize,
    pub b2: usize,
    pub b3: usize,
}

/// Kernel of the map sending each real-axis interval to the component of
/// the closed upper part containing it. A nonzero kernel records pairs of
/// real intervals joined through the upper half but not along the axis.
#[derive(Clone, Debug)]
pub struct Hhat0Report {
    /// Rows: components of the closed upper part. Columns: real intervals.
    pub matrix: IntMat,
    /// Basis vectors over interval labels.
    pub kernel: Vec<Vec<i64>>,
    pub rank: usize,
}

/// Third homology of the rotation body, presented as the free group on the
/// bounded complement components modulo the columns of `relations`.
#[derive(Clone, Debug)]
pub struct H3Presentation {
    /// Atlas ids of the generators, in basis order.
    pub generators: Vec<CompId>,
    /// Rows: generators. Columns: one relation per bounded upper component.
    pub relations: IntMat,
    pub snf_diagonal: Vec<i64>,
    /// Free rank of the quotient.
    pub rank: usize,
    pub torsion_free: bool,
}

/// A map induced on homology by a nesting of domains, with its injectivity
/// decided over the integers.
#[derive(Clone, Debug)]
pub struct InducedMap {
    pub matrix: IntMat,
    pub injective: bool,
    /// A nonzero class of the source killed by the map, when one exists.
    pub witness: Option<Vec<i64>>,
}

/// Exactness audit of the splitting of first homology into off-axis loop
/// classes and axis-crossing classes.
#[derive(Clone, Debug)]
pub struct AxisSplitReport {
    /// Inclusion of upper and lower hole classes; columns are the upper
    /// copies followed by the lower copies.
    pub off_axis: IntMat,
    /// Crossing counts: each real interval reads (component to its right)
    /// minus (component to its left).
    pub crossing: IntMat,
    pub composite_vanishes: bool,
    pub off_axis_injective: bool,
    /// ker(crossing) equals the image lattice of the off-axis inclusion.
    pub kernel_matches_off_axis: bool,
    /// im(crossing) equals the interval-pairing kernel lattice.
    pub image_matches_hhat0: bool,
    /// Bounded components split as twice the upper holes plus the pairing rank.
    pub rank_identity: bool,
    pub ok: bool,
}

/// Shared analysis of one rasterized domain: complement atlas, upper-half
/// atlas, real intervals, and the components of the closed upper part.
pub struct DomainAnalysis {
    grid: SymmetricDomainGrid,
    atlas: ComplementAtlas,
    upper: UpperAtlas,
    intervals: Vec<RealInterval>,
    dplus_labels: Vec<i32>,
    dplus_meets_real: Vec<bool>,
}

impl DomainAnalysis {
    pub fn new(grid: SymmetricDomainGrid) -> Self {
        let atlas = label_components(&grid);
        let upper = label_upper_components(&grid);
        let intervals = derive_regions(&grid).real_intervals;
        let (dplus_labels, dplus_meets_real) = dplus_components(&grid);
        DomainAnalysis { grid, atlas, upper, intervals, dplus_labels, dplus_meets_real }
    }

    pub fn grid(&self) -> &SymmetricDomainGrid {
        &self.grid
    }

    pub fn atlas(&self) -> &ComplementAtlas {
        &self.atlas
    }

    pub fn upper(&self) -> &UpperAtlas {
        &self.upper
    }

    pub fn real_intervals(&self) -> &[RealInterval] {
        &self.intervals
    }

    /// Rank of first homology: one generator per bounded complement component.
    pub fn h1_rank(&self) -> usize {
        self.atlas.bounded().len()
    }

    /// Rank of first homology of the upper open part.
    pub fn upper_h1_rank(&self) -> usize {
        self.upper.bounded_count()
    }

    pub fn hhat0(&self) -> Hhat0Report {
        let mid = self.grid.mid_row();
        let rows = self.dplus_meets_real.len();
        let mut matrix = IntMat::zeros(rows, self.intervals.len());
        for (c, &(i0, _)) in self.intervals.iter().enumerate() {
            let id = self.dplus_labels[self.grid.idx(i0, mid)];
            matrix.set(id as usize, c, 1);
        }
        let kernel = intmat::kernel_basis(&matrix);
        let rank = kernel.len();
        Hhat0Report { matrix, kernel, rank }
    }

    pub fn betti(&self) -> BettiTriple {
        let b1 = self.upper.bounded_count();
        let b2 = self.dplus_meets_real.iter().filter(|&&m| !m).count();
        let b3 = b1 + self.hhat0().rank;
        BettiTriple { b1, b2, b3 }
    }

    /// Image of each upper hole class in the full domain minus its conjugate
    /// reflection. Rows: bounded complement components. Columns: bounded
    /// upper components. The columns are the relations of `h3_presentation`.
    pub fn relation_map(&self) -> IntMat {
        let mut m = IntMat::zeros(self.atlas.bounded().len(), self.upper.bounded_count());
        for (r, &c) in self.atlas.bounded().iter().enumerate() {
            if let Some(b) = self.upper_position(c) {
                m.set(r, b, m.get(r, b) + 1);
            }
            if let Some(b) = self.upper_position(self.atlas.comp(c).conj) {
                m.set(r, b, m.get(r, b) - 1);
            }
        }
        m
    }

    pub fn h3_presentation(&self) -> H3Presentation {
        let relations = self.relation_map();
        let sm = intmat::smith(&relations);
        let snf_diagonal = sm.diagonal();
        let rank = self.atlas.bounded().len() - sm.rank();
        let torsion_free = snf_diagonal.iter().all(|&d| d == 0 || d == 1);
        H3Presentation {
            generators: self.atlas.bounded().to_vec(),
            relations,
            snf_diagonal,
            rank,
            torsion_free,
        }
    }

    /// Verify that first homology splits exactly into off-axis hole classes
    /// (upper and lower copies) and axis-crossing classes.
    pub fn axis_split_check(&self) -> AxisSplitReport {
        let mid = self.grid.mid_row();
        let nb = self.atlas.bounded().len();
        let nup = self.upper.bounded_count();

        let mut off_axis = IntMat::zeros(nb, 2 * nup);
        for (r, &c) in self.atlas.bounded().iter().enumerate() {
            if let Some(b) = self.upper_position(c) {
                off_axis.set(r, b, 1);
            }
            if let Some(b) = self.upper_position(self.atlas.comp(c).conj) {
                off_axis.set(r, nup + b, 1);
            }
        }

        // Runs on the real row are maximal and the frame is outside, so both
        // flanking cells exist and are complement cells.
        let mut crossing = IntMat::zeros(self.intervals.len(), nb);
        for (row, &(i0, i1)) in self.intervals.iter().enumerate() {
            let right = self.atlas.label_at(i1 + 1, mid).expect("cell right of a maximal run");
            if let Some(c) = self.atlas.bounded_pos(right) {
                crossing.set(row, c, crossing.get(row, c) + 1);
            }
            let left = self.atlas.label_at(i0 - 1, mid).expect("cell left of a maximal run");
            if let Some(c) = self.atlas.bounded_pos(left) {
                crossing.set(row, c, crossing.get(row, c) - 1);
            }
        }

        let hh = self.hhat0();
        let composite_vanishes = crossing.mul(&off_axis).is_zero();
        let off_axis_injective = intmat::is_injective(&off_axis);
        let kernel_matches_off_axis =
            intmat::lattice_equal(&columns_matrix(nb, &intmat::kernel_basis(&crossing)), &off_axis);
        let image_matches_hhat0 =
            intmat::lattice_equal(&crossing, &columns_matrix(self.intervals.len(), &hh.kernel));
        let rank_identity = nb == 2 * nup + hh.rank;
        let ok = composite_vanishes
            && off_axis_injective
            && kernel_matches_off_axis
            && image_matches_hhat0
            && rank_identity;
        AxisSplitReport {
            off_axis,
            crossing,
            composite_vanishes,
            off_axis_injective,
            kernel_matches_off_axis,
            image_matches_hhat0,
            rank_identity,
            ok,
        }
    }

    /// Position in the upper basis of a complement component lying strictly
    /// above the axis; `None` when the component meets or crosses the axis.
    fn upper_position(&self, c: CompId) -> Option<usize> {
        let info = self.atlas.comp(c);
        if info.min_row <= self.grid.mid_row() {
            return None;
        }
        let (i, j) = info.rep;
        let label = self.upper.label_at(i, j).expect("strictly above cells carry upper labels");
        let pos = self.upper.bounded_pos(label);
        debug_assert!(pos.is_some(), "strictly off-axis component fell into the floor");
        pos
    }
}

/// Map induced on upper-hole classes by a nesting `d` inside `d1`: each hole
/// of the larger domain's upper part lands in at most one hole of the
/// smaller domain's upper part.
pub fn induced_h1(d: &DomainAnalysis, d1: &DomainAnalysis) -> Result<InducedMap, HomologyError> {
    if !check_nested(&d.grid, &d1.grid)? {
        return Err(PlanarError::NotNested.into());
    }
    let mut matrix = IntMat::zeros(d1.upper.bounded_count(), d.upper.bounded_count());
    for (r, &bprime) in d1.upper.bounded().iter().enumerate() {
        let (i, j) = d1.upper.rep(bprime);
        let host = d.upper.label_at(i, j).expect("outside the larger domain is outside the smaller");
        if let Some(c) = d.upper.bounded_pos(host) {
            matrix.set(r, c, 1);
        }
    }
    let injective = intmat::is_injective(&matrix);
    let witness =
        if injective { None } else { Some(intmat::kernel_basis(&matrix).swap_remove(0)) };
    Ok(InducedMap { matrix, injective, witness })
}

/// Map induced on the third homology presentations by a nesting `d` inside
/// `d1`. The matrix is the restriction on generators; injectivity of the
/// quotient map is decided over the integers: a class dies exactly when its
/// restriction is a relation of the larger domain while it is not one of the
/// smaller.
pub fn induced_h3(d: &DomainAnalysis, d1: &DomainAnalysis) -> Result<InducedMap, HomologyError> {
    let restriction = restriction_map(&d.grid, &d.atlas, &d1.grid, &d1.atlas)?;
    let relations = d.relation_map();
    let relations1 = d1.relation_map();

    let pushed = restriction.mul(&relations);
    let pushed_cols: Vec<Vec<i64>> = (0..pushed.cols()).map(|c| pushed.column(c)).collect();
    if !intmat::lattice_contains(&relations1, &pushed_cols) {
        return Err(HomologyError::NotDescending);
    }

    // Kernel columns of [restriction | -relations1] project onto every
    // generator combination whose image is a relation downstream.
    let stacked = restriction.hstack(&negated(&relations1));
    let gens = d.atlas.bounded().len();
    let mut injective = true;
    let mut witness = None;
    for k in intmat::kernel_basis(&stacked) {
        let x: Vec<i64> = k[..gens].to_vec();
        if x.iter().all(|&v| v == 0) {
            continue;
        }
        if intmat::solve(&relations, &x).is_none() {
            injective = false;
            witness = Some(x);
            break;
        }
    }
    Ok(InducedMap { matrix: restriction, injective, witness })
}

/// 4-connected components of the inside cells on and above the axis.
/// Returns full-size labels (-1 off the region) and a per-component flag
/// for meeting the real row.
fn dplus_components(g: &SymmetricDomainGrid) -> (Vec<i32>, Vec<bool>) {
    let (nx, ny, mid) = (g.nx(), g.ny(), g.mid_row());
    let mut labels = vec![-1i32; nx * ny];
    let mut meets_real = Vec::new();
    for j0 in mid..ny {
        for i0 in 0..nx {
            if !g.inside(i0, j0) || labels[j0 * nx + i0] >= 0 {
                continue;
            }
            let id = meets_real.len() as i32;
            let mut meets = false;
            let mut stack = vec![(i0, j0)];
            labels[j0 * nx + i0] = id;
            while let Some((i, j)) = stack.pop() {
                meets |= j == mid;
                let mut push = |i: usize, j: usize, labels: &mut Vec<i32>| {
                    if g.inside(i, j) && labels[j * nx + i] < 0 {
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
                if j > mid {
                    push(i, j - 1, &mut labels);
                }
                if j + 1 < ny {
                    push(i, j + 1, &mut labels);
                }
            }
            meets_real.push(meets);
        }
    }
    (labels, meets_real)
}

fn negated(m: &IntMat) -> IntMat {
    let mut out = IntMat::zeros(m.rows(), m.cols());
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            out.set(r, c, -m.get(r, c));
        }
    }
    out
}

fn columns_matrix(rows: usize, cols: &[Vec<i64>]) -> IntMat {
    let mut m = IntMat::zeros(rows, cols.len());
    for (c, v) in cols.iter().enumerate() {
        assert_eq!(v.len(), rows, "column length mismatch");
        for (r, &x) in v.iter().enumerate() {
            m.set(r, c, x);
        }
    }
    m
}

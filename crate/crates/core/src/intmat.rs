//! Dense integer matrices and Smith normal form over the integers.
//!
//! All homology bookkeeping in this crate reduces to small incidence-like
//! matrices (rows and columns indexed by complement components or real-axis
//! intervals), so a dense `i64` representation is plenty. Reductions
//! accumulate in `i128` and convert back checked; entry growth beyond `i64`
//! indicates a bug, not a legitimate input.

use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<i64>, // row-major
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMat { rows: r, cols: c, data: rows.iter().flatten().copied().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<i64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn row(&self, r: usize) -> Vec<i64> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let mut m = IntMat::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                m.set(r, self.cols + c, other.get(r, c));
            }
        }
        m
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = IntMat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc: i128 = 0;
                for k in 0..self.cols {
                    acc += self.get(r, k) as i128 * other.get(k, c) as i128;
                }
                out.set(r, c, narrow(acc));
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|r| {
                let acc: i128 =
                    (0..self.cols).map(|c| self.get(r, c) as i128 * v[c] as i128).sum();
                narrow(acc)
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            let t = self.get(a, c);
            self.set(a, c, self.get(b, c));
            self.set(b, c, t);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            let t = self.get(r, a);
            self.set(r, a, self.get(r, b));
            self.set(r, b, t);
        }
    }

    /// row[a] += k * row[b]
    fn add_row_multiple(&mut self, a: usize, b: usize, k: i64) {
        for c in 0..self.cols {
            let v = self.get(a, c) as i128 + k as i128 * self.get(b, c) as i128;
            self.set(a, c, narrow(v));
        }
    }

    /// col[a] += k * col[b]
    fn add_col_multiple(&mut self, a: usize, b: usize, k: i64) {
        for r in 0..self.rows {
            let v = self.get(r, a) as i128 + k as i128 * self.get(r, b) as i128;
            self.set(r, a, narrow(v));
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            self.set(r, c, -self.get(r, c));
        }
    }
}

fn narrow(v: i128) -> i64 {
    i64::try_from(v).expect("integer matrix entry overflowed i64")
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMat {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Smith normal form `u * a * v = s` with `u`, `v` unimodular and `s`
/// diagonal with nonnegative entries satisfying `d_i | d_{i+1}`.
pub struct Smith {
    pub u: IntMat,
    pub v: IntMat,
    pub s: IntMat,
}

impl Smith {
    pub fn diagonal(&self) -> Vec<i64> {
        let n = self.s.rows().min(self.s.cols());
        (0..n).map(|i| self.s.get(i, i)).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|&&d| d != 0).count()
    }
}

pub fn smith(a: &IntMat) -> Smith {
    let mut s = a.clone();
    let mut u = IntMat::identity(a.rows());
    let mut v = IntMat::identity(a.cols());
    let n = a.rows().min(a.cols());
    let mut t = 0;
    while t < n {
        let Some((pr, pc)) = pivot(&s, t) else { break };
        s.swap_rows(t, pr);
        u.swap_rows(t, pr);
        s.swap_cols(t, pc);
        v.swap_cols(t, pc);
        // Clear row and column t by remainder steps; each pass strictly
        // shrinks |pivot|, so this terminates.
        loop {
            let mut dirty = false;
            for r in t + 1..s.rows() {
                if s.get(r, t) != 0 {
                    let q = s.get(r, t).div_euclid(s.get(t, t));
                    s.add_row_multiple(r, t, -q);
                    u.add_row_multiple(r, t, -q);
                    if s.get(r, t) != 0 {
                        s.swap_rows(t, r);
                        u.swap_rows(t, r);
                        dirty = true;
                    }
                }
            }
            for c in t + 1..s.cols() {
                if s.get(t, c) != 0 {
                    let q = s.get(t, c).div_euclid(s.get(t, t));
                    s.add_col_multiple(c, t, -q);
                    v.add_col_multiple(c, t, -q);
                    if s.get(t, c) != 0 {
                        s.swap_cols(t, c);
                        v.swap_cols(t, c);
                        dirty = true;
                    }
                }
            }
            if !dirty {
                break;
            }
        }
        // Divisibility fix-up: pivot must divide the rest of the submatrix.
        let mut fixed = true;
        'scan: for r in t + 1..s.rows() {
            for c in t + 1..s.cols() {
                if s.get(r, c) % s.get(t, t) != 0 {
                    s.add_row_multiple(t, r, 1);
                    u.add_row_multiple(t, r, 1);
                    fixed = false;
                    break 'scan;
                }
            }
        }
        if !fixed {
            continue; // redo position t with the fresh row mixed in
        }
        if s.get(t, t) < 0 {
            s.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    Smith { u, v, s }
}

fn pivot(s: &IntMat, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, i64)> = None;
    for r in t..s.rows() {
        for c in t..s.cols() {
            let v = s.get(r, c).abs();
            if v != 0 && best.map_or(true, |(_, _, b)| v < b) {
                best = Some((r, c, v));
            }
        }
    }
    best.map(|(r, c, _)| (r, c))
}

pub fn rank(a: &IntMat) -> usize {
    smith(a).rank()
}

/// Basis of `ker(a)` as columns, from the trailing columns of `v`.
pub fn kernel_basis(a: &IntMat) -> Vec<Vec<i64>> {
    let sm = smith(a);
    let r = sm.rank();
    (r..a.cols()).map(|j| sm.v.column(j)).collect()
}

/// Solve `a x = b` over the integers; `None` when no integral solution exists.
pub fn solve(a: &IntMat, b: &[i64]) -> Option<Vec<i64>> {
    assert_eq!(a.rows(), b.len(), "solve shape mismatch");
    let sm = smith(a);
    let y = sm.u.mul_vec(b);
    let diag = sm.diagonal();
    let r = sm.rank();
    let mut yp = vec![0i64; a.cols()];
    for (i, &yi) in y.iter().enumerate() {
        if i < r {
            if yi % diag[i] != 0 {
                return None;
            }
            yp[i] = yi / diag[i];
        } else if yi != 0 {
            return None;
        }
    }
    Some(sm.v.mul_vec(&yp))
}

/// Does the column span of `a` over the integers contain every given vector?
pub fn lattice_contains(a: &IntMat, vecs: &[Vec<i64>]) -> bool {
    vecs.iter().all(|v| solve(a, v).is_some())
}

/// Mutual containment of the integer column spans.
pub fn lattice_equal(a: &IntMat, b: &IntMat) -> bool {
    let a_cols: Vec<Vec<i64>> = (0..a.cols()).map(|c| a.column(c)).collect();
    let b_cols: Vec<Vec<i64>> = (0..b.cols()).map(|c| b.column(c)).collect();
    lattice_contains(a, &b_cols) && lattice_contains(b, &a_cols)
}

pub fn is_injective(a: &IntMat) -> bool {
    rank(a) == a.cols()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Fraction-free determinant, used only to certify unimodularity of the
    // transform matrices independently of the SNF code path.
    fn det_bareiss(m: &IntMat) -> i128 {
        assert_eq!(m.rows(), m.cols());
        let n = m.rows();
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> =
            (0..n).map(|r| (0..n).map(|c| m.get(r, c) as i128).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                let Some(p) = (k + 1..n).find(|&r| a[r][k] != 0) else { return 0 };
                a.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
                a[i][k] = 0;
            }
            prev = a[k][k];
        }
        sign * a[n - 1][n - 1]
    }

    fn check_snf(a: &IntMat) {
        let sm = smith(a);
        assert_eq!(sm.u.mul(a).mul(&sm.v), sm.s, "u*a*v != s");
        assert_eq!(det_bareiss(&sm.u).abs(), 1, "u not unimodular");
        assert_eq!(det_bareiss(&sm.v).abs(), 1, "v not unimodular");
        let d = sm.diagonal();
        for i in 0..d.len() {
            assert!(d[i] >= 0);
            if i + 1 < d.len() && d[i + 1] != 0 {
                assert!(d[i] != 0 && d[i + 1] % d[i] == 0, "divisibility chain broken: {:?}", d);
            }
        }
        // off-diagonal must vanish
        for r in 0..sm.s.rows() {
            for c in 0..sm.s.cols() {
                if r != c {
                    assert_eq!(sm.s.get(r, c), 0);
                }
            }
        }
    }

    #[test]
    fn snf_hand_cases() {
        // det = -8, gcd = 2 => diag (2, 4)
        let a = IntMat::from_rows(&[vec![2, 4], vec![6, 8]]);
        check_snf(&a);
        assert_eq!(smith(&a).diagonal(), vec![2, 4]);

        // divisibility fix-up: diag(2,3) ~ diag(1,6)
        let b = IntMat::from_rows(&[vec![2, 0], vec![0, 3]]);
        check_snf(&b);
        assert_eq!(smith(&b).diagonal(), vec![1, 6]);

        let id = IntMat::identity(3);
        assert_eq!(smith(&id).diagonal(), vec![1, 1, 1]);

        let z = IntMat::zeros(2, 3);
        assert_eq!(smith(&z).diagonal(), vec![0, 0]);

        // wide and tall shapes
        check_snf(&IntMat::from_rows(&[vec![1, 1, 0], vec![0, -1, 1]]));
        check_snf(&IntMat::from_rows(&[vec![1, -1], vec![-1, 1], vec![0, 3]]));
    }

    #[test]
    fn kernel_and_solve() {
        let a = IntMat::from_rows(&[vec![1, 1]]);
        let k = kernel_basis(&a);
        assert_eq!(k.len(), 1);
        assert_eq!(a.mul_vec(&k[0]), vec![0]);
        assert!(k[0] == vec![1, -1] || k[0] == vec![-1, 1]);

        // 2x = 4 solvable, 2x = 3 not
        let two = IntMat::from_rows(&[vec![2]]);
        assert_eq!(solve(&two, &[4]), Some(vec![2]));
        assert_eq!(solve(&two, &[3]), None);

        // column span of [[1],[1]] contains (2,2) but not (1,0)
        let a = IntMat::from_rows(&[vec![1], vec![1]]);
        assert!(lattice_contains(&a, &[vec![2, 2]]));
        assert!(!lattice_contains(&a, &[vec![1, 0]]));

        assert!(is_injective(&IntMat::from_rows(&[vec![1, 1], vec![0, 1]])));
        assert!(!is_injective(&IntMat::from_rows(&[vec![1, 1], vec![1, 1]])));
        // a zero column is never injective
        assert!(!is_injective(&IntMat::from_rows(&[vec![1, 0], vec![1, 0]])));
    }

    #[test]
    fn lattice_equality() {
        let a = IntMat::from_rows(&[vec![1, 0], vec![0, 1]]);
        let b = IntMat::from_rows(&[vec![1, 1], vec![0, 1]]);
        assert!(lattice_equal(&a, &b));
        let c = IntMat::from_rows(&[vec![2, 0], vec![0, 1]]);
        assert!(!lattice_equal(&a, &c));
    }

    proptest! {
        #[test]
        fn snf_random(rows in 1usize..5, cols in 1usize..5, seed in any::<u64>()) {
            let mut state = seed;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 33) as i64 % 7) - 3
            };
            let m = IntMat::from_rows(
                &(0..rows).map(|_| (0..cols).map(|_| next()).collect()).collect::<Vec<_>>(),
            );
            check_snf(&m);
        }

        #[test]
        fn solve_random_consistency(seed in any::<u64>()) {
            let mut state = seed;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 33) as i64 % 5) - 2
            };
            let a = IntMat::from_rows(
                &(0..3).map(|_| (0..3).map(|_| next()).collect()).collect::<Vec<_>>(),
            );
            let x: Vec<i64> = (0..3).map(|_| next()).collect();
            let b = a.mul_vec(&x);
            let got = solve(&a, &b).expect("constructed system must be solvable");
            prop_assert_eq!(a.mul_vec(&got), b);
        }
    }
}

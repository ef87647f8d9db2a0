//! Linear algebra over a finite field given as a length-one [`LocalRing`].

use crate::rings::{LocalRing, RingElement};

/// Row-reduced form of a matrix together with the row operations that
/// produced it, so that `A v = b` can be solved for many right-hand sides.
#[derive(Clone, Debug)]
pub struct FieldSolver {
    rows: usize,
    cols: usize,
    rank: usize,
    /// Pivot column of each of the first `rank` rows.
    pivots: Vec<usize>,
    /// Reduced row echelon form, `rows x cols`.
    rref: Vec<Vec<RingElement>>,
    /// `transform * A = rref`, `rows x rows`.
    transform: Vec<Vec<RingElement>>,
}

impl FieldSolver {
    pub fn new(field: &LocalRing, matrix: &[Vec<RingElement>], cols: usize) -> Self {
        let rows = matrix.len();
        let mut a: Vec<Vec<RingElement>> = matrix.to_vec();
        let mut t: Vec<Vec<RingElement>> = (0..rows)
            .map(|i| {
                (0..rows)
                    .map(|j| if i == j { field.one() } else { field.zero() })
                    .collect()
            })
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| !field.is_zero(a[i][c])) else {
                continue;
            };
            a.swap(r, pr);
            t.swap(r, pr);
            let inv = field.field_inv(a[r][c]).expect("nonzero pivot");
            for x in a[r].iter_mut() {
                *x = field.mul(*x, inv);
            }
            for x in t[r].iter_mut() {
                *x = field.mul(*x, inv);
            }
            for i in 0..rows {
                if i == r || field.is_zero(a[i][c]) {
                    continue;
                }
                let factor = a[i][c];
                for j in 0..cols {
                    let d = field.mul(factor, a[r][j]);
                    a[i][j] = field.sub(a[i][j], d);
                }
                for j in 0..rows {
                    let d = field.mul(factor, t[r][j]);
                    t[i][j] = field.sub(t[i][j], d);
                }
            }
            pivots.push(c);
            r += 1;
        }
        FieldSolver {
            rows,
            cols,
            rank: r,
            pivots,
            rref: a,
            transform: t,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `true` when the rows are independent.
    pub fn full_row_rank(&self) -> bool {
        self.rank == self.rows
    }

    /// Dimension of the solution space of the homogeneous system.
    pub fn nullity(&self) -> usize {
        self.cols - self.rank
    }

    /// A particular solution of `A v = b` (free coordinates zero), or `None`
    /// when the system is inconsistent.
    pub fn solve(&self, field: &LocalRing, b: &[RingElement]) -> Option<Vec<RingElement>> {
        debug_assert_eq!(b.len(), self.rows);
        let c: Vec<RingElement> = self
            .transform
            .iter()
            .map(|row| {
                row.iter()
                    .zip(b)
                    .fold(field.zero(), |acc, (&t, &bi)| field.add(acc, field.mul(t, bi)))
            })
            .collect();
        if c[self.rank..].iter().any(|&x| !field.is_zero(x)) {
            return None;
        }
        let mut v = vec![field.zero(); self.cols];
        for (i, &pc) in self.pivots.iter().enumerate() {
            v[pc] = c[i];
        }
        Some(v)
    }

    /// `true` when `A v = b` has a solution.
    pub fn is_consistent(&self, field: &LocalRing, b: &[RingElement]) -> bool {
        self.transform[self.rank..].iter().all(|row| {
            let s = row
                .iter()
                .zip(b)
                .fold(field.zero(), |acc, (&t, &bi)| field.add(acc, field.mul(t, bi)));
            field.is_zero(s)
        })
    }

    /// Basis of the kernel, one vector per free column.
    pub fn kernel_basis(&self, field: &LocalRing) -> Vec<Vec<RingElement>> {
        let free: Vec<usize> = (0..self.cols).filter(|c| !self.pivots.contains(c)).collect();
        free.iter()
            .map(|&j| {
                let mut v = vec![field.zero(); self.cols];
                v[j] = field.one();
                for (i, &pc) in self.pivots.iter().enumerate() {
                    v[pc] = field.neg(self.rref[i][j]);
                }
                v
            })
            .collect()
    }
}

/// Calls `visit` on every point of `particular + span(basis)`.
pub fn for_each_affine_point(
    field: &LocalRing,
    particular: &[RingElement],
    basis: &[Vec<RingElement>],
    mut visit: impl FnMut(&[RingElement]),
) {
    let q = field.cardinality();
    let k = basis.len();
    let mut coeffs = vec![0u64; k];
    let mut point = particular.to_vec();
    loop {
        visit(&point);
        // odometer increment; update point incrementally by adding basis[i]
        let mut i = 0;
        loop {
            if i == k {
                return;
            }
            coeffs[i] += 1;
            if coeffs[i] < q {
                // point += (new - old) * basis[i]; recompute coordinate-wise
                let old = RingElement::from_index(coeffs[i] - 1);
                let new = RingElement::from_index(coeffs[i]);
                let delta = field.sub(new, old);
                for (x, &b) in point.iter_mut().zip(&basis[i]) {
                    *x = field.add(*x, field.mul(delta, b));
                }
                break;
            }
            // wrap: remove (q-1) * basis[i]
            let old = RingElement::from_index(q - 1);
            for (x, &b) in point.iter_mut().zip(&basis[i]) {
                *x = field.sub(*x, field.mul(old, b));
            }
            coeffs[i] = 0;
            i += 1;
        }
    }
}

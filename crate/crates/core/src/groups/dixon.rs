//! Irreducible character degrees by Dixon's method.
//!
//! The class sums span the centre of the group algebra. Their structure
//! constants, reduced modulo a prime `l = 1 mod exp(G)`, have the central
//! characters as common eigenvectors; each central character determines its
//! degree through `d^2 = |G| / sum_i w_i w_(i*) / |C_i|`.

use serde::{Deserialize, Serialize};

use super::{ConjClasses, FiniteGroup};
use crate::error::{Error, Result};
use crate::par;
use crate::rings::primes::{inv_mod, is_prime};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharDegrees {
    /// Sorted ascending.
    pub degrees: Vec<u64>,
    /// The prime the eigenvector computation ran modulo.
    pub prime: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

struct Fl {
    l: u64,
}

impl Fl {
    fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.l
    }
    fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.l - b) % self.l
    }
    fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.l as u128) as u64
    }
    fn inv(&self, a: u64) -> u64 {
        inv_mod(a, self.l).expect("nonzero element of a prime field")
    }
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(f: &Fl, m: &mut [Vec<u64>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        let inv = f.inv(m[r][c]);
        for x in m[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let k = m[i][c];
                for j in 0..m[i].len() {
                    let t = f.mul(k, m[r][j]);
                    m[i][j] = f.sub(m[i][j], t);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    pivots
}

/// Kernel basis of a `rows x cols` matrix.
fn kernel(f: &Fl, mut m: Vec<Vec<u64>>, cols: usize) -> Vec<Vec<u64>> {
    let pivots = rref(f, &mut m, cols);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0; cols];
            v[free] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = f.sub(0, m[row][free]);
            }
            v
        })
        .collect()
}

/// Characteristic polynomial, low degree first, via reduction to upper
/// Hessenberg form.
fn charpoly(f: &Fl, mut h: Vec<Vec<u64>>) -> Vec<u64> {
    let n = h.len();
    for m in 1..n.saturating_sub(1) {
        let Some(i) = (m..n).find(|&i| h[i][m - 1] != 0) else {
            continue;
        };
        if i != m {
            h.swap(i, m);
            for row in h.iter_mut() {
                row.swap(i, m);
            }
        }
        let inv = f.inv(h[m][m - 1]);
        for i in m + 1..n {
            let u = f.mul(h[i][m - 1], inv);
            if u == 0 {
                continue;
            }
            for j in 0..n {
                let t = f.mul(u, h[m][j]);
                h[i][j] = f.sub(h[i][j], t);
            }
            for row in h.iter_mut() {
                let t = f.mul(u, row[i]);
                row[m] = f.add(row[m], t);
            }
        }
    }
    // p_k = charpoly of the leading k x k block
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for k in 1..=n {
        let prev = &polys[k - 1];
        // (x - h[k-1][k-1]) p_(k-1)
        let mut p = vec![0u64; k + 1];
        for (d, &c) in prev.iter().enumerate() {
            p[d + 1] = f.add(p[d + 1], c);
            p[d] = f.sub(p[d], f.mul(h[k - 1][k - 1], c));
        }
        let mut t = 1u64;
        for i in 1..k {
            t = f.mul(t, h[k - i][k - i - 1]);
            let coef = f.mul(t, h[k - i - 1][k - 1]);
            for (d, &c) in polys[k - i - 1].iter().enumerate() {
                p[d] = f.sub(p[d], f.mul(coef, c));
            }
        }
        polys.push(p);
    }
    polys.pop().expect("nonempty")
}

fn roots(f: &Fl, poly: &[u64]) -> Vec<u64> {
    (0..f.l)
        .filter(|&x| poly.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c)) == 0)
        .collect()
}

/// Coordinates of `v` in the basis `basis` (which must span it).
fn coordinates(f: &Fl, basis: &[Vec<u64>], v: &[u64]) -> Option<Vec<u64>> {
    let t = basis.len();
    let r = v.len();
    let mut aug: Vec<Vec<u64>> = (0..r)
        .map(|i| {
            let mut row: Vec<u64> = basis.iter().map(|b| b[i]).collect();
            row.push(v[i]);
            row
        })
        .collect();
    let pivots = rref(f, &mut aug, t + 1);
    if pivots.contains(&t) {
        return None;
    }
    let mut x = vec![0; t];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[row][t];
    }
    Some(x)
}

fn matvec(f: &Fl, a: &[Vec<u64>], v: &[u64]) -> Vec<u64> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y))))
        .collect()
}

/// Splits `space` into eigenspaces of `a`, or reports a failure when `a`
/// does not act semisimply with eigenvalues in the field.
fn split(f: &Fl, a: &[Vec<u64>], space: Vec<Vec<u64>>) -> Option<Vec<Vec<Vec<u64>>>> {
    let t = space.len();
    if t == 1 {
        return Some(vec![space]);
    }
    // matrix of a on the subspace, column by column
    let mut cols = Vec::with_capacity(t);
    for b in &space {
        cols.push(coordinates(f, &space, &matvec(f, a, b))?);
    }
    let restricted: Vec<Vec<u64>> = (0..t).map(|i| (0..t).map(|j| cols[j][i]).collect()).collect();
    let lambdas = roots(f, &charpoly(f, restricted.clone()));
    let mut parts = Vec::new();
    let mut total = 0;
    for lambda in lambdas {
        let shifted: Vec<Vec<u64>> = (0..t)
            .map(|i| {
                (0..t)
                    .map(|j| if i == j { f.sub(restricted[i][j], lambda) } else { restricted[i][j] })
                    .collect()
            })
            .collect();
        let ker = kernel(f, shifted, t);
        total += ker.len();
        let vectors = ker
            .iter()
            .map(|c| {
                (0..space[0].len())
                    .map(|i| c.iter().zip(&space).fold(0, |acc, (&ci, b)| f.add(acc, f.mul(ci, b[i]))))
                    .collect()
            })
            .collect();
        parts.push(vectors);
    }
    (total == t).then_some(parts)
}

fn attempt(g: &FiniteGroup, classes: &ConjClasses, l: u64) -> Option<Vec<u64>> {
    let f = Fl { l };
    let r = classes.len();
    let n = g.order() as u64;
    // consts[j][i][k] = #{x in C_i : x^-1 z_k in C_j}
    let per_k: Vec<Vec<u64>> = par::map_collect(&classes.reps, |&z| {
        let mut c = vec![0u64; r * r];
        for x in 0..n as u32 {
            let i = classes.class_of[x as usize] as usize;
            let j = classes.class_of[g.mul(g.inv(x), z) as usize] as usize;
            c[j * r + i] += 1;
        }
        c
    });
    let matrices: Vec<Vec<Vec<u64>>> = (0..r)
        .map(|j| (0..r).map(|i| (0..r).map(|k| per_k[k][j * r + i] % l).collect()).collect())
        .collect();
    let mut spaces: Vec<Vec<Vec<u64>>> = vec![(0..r)
        .map(|i| {
            let mut v = vec![0; r];
            v[i] = 1;
            v
        })
        .collect()];
    for a in matrices.iter().skip(1) {
        if spaces.iter().all(|s| s.len() == 1) {
            break;
        }
        let mut next = Vec::new();
        for s in spaces {
            next.extend(split(&f, a, s)?);
        }
        spaces = next;
    }
    if spaces.len() != r || spaces.iter().any(|s| s.len() != 1) {
        return None;
    }
    let inverse = classes.inverse_classes(g);
    let sqrt_n = (n as f64).sqrt() as u64 + 1;
    let mut degrees = Vec::with_capacity(r);
    for s in spaces {
        let w = &s[0];
        if w[0] == 0 {
            return None;
        }
        let scale = f.inv(w[0]);
        let w: Vec<u64> = w.iter().map(|&x| f.mul(x, scale)).collect();
        let mut sum = 0u64;
        for i in 0..r {
            let term = f.mul(f.mul(w[i], w[inverse[i] as usize]), f.inv(classes.sizes[i] % l));
            sum = f.add(sum, term);
        }
        if sum == 0 {
            return None;
        }
        let d2 = f.mul(n % l, f.inv(sum));
        let d = (1..=sqrt_n).find(|&d| f.mul(d, d) == d2 && n.is_multiple_of(d))?;
        degrees.push(d);
    }
    degrees.sort_unstable();
    (degrees.iter().map(|d| d * d).sum::<u64>() == n).then_some(degrees)
}

/// Degrees of the irreducible complex characters.
pub fn character_degrees(g: &FiniteGroup, classes: &ConjClasses) -> Result<CharDegrees> {
    let n = g.order() as u64;
    let exponent = classes
        .reps
        .iter()
        .map(|&x| g.element_order(x))
        .fold(1u64, |acc, o| acc / gcd(acc, o) * o);
    let floor = 2.0 * (n as f64).sqrt();
    let mut candidate = exponent + 1;
    while (candidate as f64) <= floor || !is_prime(candidate) {
        candidate += exponent;
    }
    let mut tried = 0;
    loop {
        // class sizes must be invertible as well
        if classes.sizes.iter().all(|&s| s % candidate != 0) {
            if let Some(degrees) = attempt(g, classes, candidate) {
                return Ok(CharDegrees {
                    degrees,
                    prime: candidate,
                });
            }
        }
        tried += 1;
        if tried == 8 {
            return Err(Error::Computation(format!(
                "eigenspace splitting failed for {} modulo 8 primes",
                g.name()
            )));
        }
        candidate += exponent;
        while !is_prime(candidate) {
            candidate += exponent;
        }
    }
}

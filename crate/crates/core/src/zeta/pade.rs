//! Exact Padé fitting of power series with rational coefficients.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::rational_vec;

/// `numerator(T) / denominator(T)` with `denominator(0) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalFit {
    #[serde(with = "rational_vec")]
    pub numerator: Vec<BigRational>,
    #[serde(with = "rational_vec")]
    pub denominator: Vec<BigRational>,
    /// Number of series coefficients the fit was required to reproduce.
    pub match_length: usize,
    /// The fit found from all but the last two coefficients is the same.
    pub stable: bool,
}

impl RationalFit {
    /// First `n` coefficients of the power series expansion.
    pub fn expand(&self, n: usize) -> Vec<BigRational> {
        let mut out: Vec<BigRational> = Vec::with_capacity(n);
        for k in 0..n {
            let mut c = self.numerator.get(k).cloned().unwrap_or_else(BigRational::zero);
            for j in 1..self.denominator.len().min(k + 1) {
                c -= &self.denominator[j] * &out[k - j];
            }
            out.push(c);
        }
        out
    }

    /// Whether `1 - c T` divides the denominator, i.e. `Q(1/c) = 0`.
    pub fn has_pole_factor(&self, c: &BigRational) -> bool {
        if c.is_zero() {
            return false;
        }
        let t = c.recip();
        let mut acc = BigRational::zero();
        for a in self.denominator.iter().rev() {
            acc = acc * &t + a;
        }
        acc.is_zero()
    }
}

fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.len() > 1 && v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

/// Solves `A x = b` exactly; free unknowns are set to zero.
fn solve(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>, cols: usize) -> Option<Vec<BigRational>> {
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, pr);
        b.swap(r, pr);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        b[r] *= &inv;
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let d = &f * &a[r][j];
                    a[i][j] -= d;
                }
                let d = &f * &b[r];
                b[i] -= d;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if b[r..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = b[i].clone();
    }
    Some(x)
}

/// A fit with numerator degree `<= a` and denominator degree `<= b`
/// reproducing all of `s`, if one exists.
fn fit_degrees(s: &[BigRational], a: usize, b: usize) -> Option<(Vec<BigRational>, Vec<BigRational>)> {
    let coeff = |i: isize| -> BigRational {
        if i < 0 {
            BigRational::zero()
        } else {
            s.get(i as usize).cloned().unwrap_or_else(BigRational::zero)
        }
    };
    // sum_{j=0..b} Q_j s_{k-j} = 0 for a < k < len, with Q_0 = 1
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for k in (a + 1)..s.len() {
        rows.push((1..=b).map(|j| coeff(k as isize - j as isize)).collect());
        rhs.push(-coeff(k as isize));
    }
    let q_tail = if b == 0 { Some(Vec::new()) } else { solve(rows, rhs, b) }?;
    if b == 0 && s.len() > a + 1 && s[a + 1..].iter().any(|c| !c.is_zero()) {
        return None;
    }
    let mut q = vec![BigRational::one()];
    q.extend(q_tail);
    let p: Vec<BigRational> = (0..=a)
        .map(|k| {
            (0..=b.min(k))
                .map(|j| &q[j] * coeff(k as isize - j as isize))
                .fold(BigRational::zero(), |acc, x| acc + x)
        })
        .collect();
    Some((trim(p), trim(q)))
}

fn minimal_fit(s: &[BigRational], max_deg: usize) -> Option<(Vec<BigRational>, Vec<BigRational>)> {
    for total in 0..=2 * max_deg {
        for b in 0..=total.min(max_deg) {
            let a = total - b;
            if a > max_deg {
                continue;
            }
            if let Some(fit) = fit_degrees(s, a, b) {
                return Some(fit);
            }
        }
    }
    None
}

/// Minimal-degree exact rational fit of the series `s` with numerator and
/// denominator degrees at most `max_deg`. Requires
/// `s.len() >= 2 max_deg + 2`; returns `Ok(None)` when no fit exists.
pub fn pade_fit(s: &[BigRational], max_deg: usize) -> crate::Result<Option<RationalFit>> {
    if s.len() < 2 * max_deg + 2 {
        return Err(crate::Error::invalid(format!(
            "Padé fit of degree {max_deg} needs at least {} coefficients, got {}",
            2 * max_deg + 2,
            s.len()
        )));
    }
    let Some((numerator, denominator)) = minimal_fit(s, max_deg) else {
        return Ok(None);
    };
    let stable = minimal_fit(&s[..s.len() - 2], max_deg)
        .is_some_and(|(p, q)| p == numerator && q == denominator);
    Ok(Some(RationalFit {
        numerator,
        denominator,
        match_length: s.len(),
        stable,
    }))
}

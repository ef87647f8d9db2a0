//! Local zeta series, rational fits, Euler products and growth estimates.
//!
//! Series use the variable `T = p^-s` for the point-count series
//! `P_p(s) = sum_n |X(Z/p^n)| p^(-ns)` and `T = p^-(s+1)` for the Igusa
//! series `Z_p(s) = (1 - p^s) P_p(s + d + 1) + p^s`, so that every
//! coefficient is rational.

mod pade;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::counting::{count_lift, Budgets};
use crate::error::{Error, Result};
use crate::exact::{format_rational, rational_vec};
use crate::par;
use crate::rings::{primes, LocalRingSpec};
use crate::schemes::AffineScheme;

pub use pade::{pade_fit, RationalFit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    /// Coefficients `|X(Z/p^n)|` in `T = p^-s`.
    P,
    /// Igusa coefficients in `T = p^-(s+1)`.
    Z,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalSeries {
    pub scheme: String,
    pub p: u64,
    pub kind: SeriesKind,
    #[serde(with = "rational_vec")]
    pub coeffs: Vec<BigRational>,
}

impl LocalSeries {
    /// CSV with columns `scheme,p,kind,n,coefficient`.
    pub fn to_csv(&self) -> String {
        let kind = match self.kind {
            SeriesKind::P => "P",
            SeriesKind::Z => "Z",
        };
        let mut out = String::from("scheme,p,kind,n,coefficient\n");
        for (n, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{},{}", self.scheme, self.p, kind, n, format_rational(c));
        }
        out
    }
}

fn prime_counts(x: &AffineScheme, p: u64, m_max: u32, budgets: &Budgets) -> Result<Vec<BigUint>> {
    if !primes::is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let levels: Vec<u32> = (1..=m_max).collect();
    let counts: Result<Vec<BigUint>> = par::map_collect(&levels, |&m| {
        Ok(count_lift(x, LocalRingSpec::mixed(p, 1, m)?, budgets)?.count)
    })
    .into_iter()
    .collect();
    let mut out = vec![BigUint::one()];
    out.extend(counts?);
    Ok(out)
}

/// `c_n = |X(Z/p^n)|` for `0 <= n <= m_max`, with `c_0 = 1`.
pub fn local_p_series(x: &AffineScheme, p: u64, m_max: u32, budgets: &Budgets) -> Result<LocalSeries> {
    let coeffs = prime_counts(x, p, m_max, budgets)?
        .into_iter()
        .map(|c| BigRational::from_integer(c.into()))
        .collect();
    Ok(LocalSeries {
        scheme: x.name.clone(),
        p,
        kind: SeriesKind::P,
        coeffs,
    })
}

/// `h_n = |X(Z/p^n)| / p^(n d)` from a point-count series.
fn normalized(series: &LocalSeries, dim: usize) -> Vec<BigRational> {
    let p = BigInt::from(series.p);
    series
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| c / BigRational::from_integer(num_traits::pow(p.clone(), n * dim)))
        .collect()
}

/// Igusa coefficients `a_n = h_n - h_(n+1) / p` for `0 <= n <= m_max`,
/// from counts up to level `m_max + 1`.
pub fn igusa_z_series(x: &AffineScheme, p: u64, m_max: u32, budgets: &Budgets) -> Result<LocalSeries> {
    let pseries = local_p_series(x, p, m_max + 1, budgets)?;
    Ok(igusa_from_p_series(&pseries, x.declared_dim))
}

pub fn igusa_from_p_series(pseries: &LocalSeries, dim: usize) -> LocalSeries {
    let h = normalized(pseries, dim);
    let p = BigRational::from_integer(pseries.p.into());
    let coeffs = h.windows(2).map(|w| &w[0] - &w[1] / &p).collect();
    LocalSeries {
        scheme: pseries.scheme.clone(),
        p: pseries.p,
        kind: SeriesKind::Z,
        coeffs,
    }
}

/// The Igusa series computed from its definition: expands
/// `(1 - p^s) P(s + d + 1) + p^s` as a Laurent series in `T = p^-(s+1)`,
/// where `p^s = p^-1 T^-1`. Fails if the `T^-1` term does not cancel.
pub fn igusa_by_definition(pseries: &LocalSeries, dim: usize) -> Result<LocalSeries> {
    // P(s + d + 1) = sum h_n T^n
    let h = normalized(pseries, dim);
    let inv_p = BigRational::new(1.into(), pseries.p.into());
    // Laurent coefficients indexed from T^-1
    let len = h.len();
    let mut laurent = vec![BigRational::zero(); len + 1];
    for (n, hn) in h.iter().enumerate() {
        laurent[n + 1] += hn;
        laurent[n] -= hn * &inv_p;
    }
    laurent[0] += &inv_p;
    if !laurent[0].is_zero() {
        return Err(Error::Computation(format!(
            "T^-1 coefficient {} does not vanish",
            format_rational(&laurent[0])
        )));
    }
    // the top coefficient lacks its h_(n+1) contribution
    laurent.truncate(len);
    Ok(LocalSeries {
        scheme: pseries.scheme.clone(),
        p: pseries.p,
        kind: SeriesKind::Z,
        coeffs: laurent.into_iter().skip(1).collect(),
    })
}

/// Memoized `|X(Z/N)|` via prime-power factors.
pub struct CompositeCounts<'a> {
    x: &'a AffineScheme,
    budgets: Budgets,
    prime_powers: BTreeMap<(u64, u32), BigUint>,
}

impl<'a> CompositeCounts<'a> {
    pub fn new(x: &'a AffineScheme, budgets: &Budgets) -> Self {
        CompositeCounts {
            x,
            budgets: *budgets,
            prime_powers: BTreeMap::new(),
        }
    }

    /// Computes every prime-power count needed for `1..=n`, in parallel.
    pub fn prepare(&mut self, n: u64) -> Result<()> {
        let mut needed = Vec::new();
        for p in primes::primes_up_to(n) {
            let mut e = 1u32;
            let mut pe = p;
            while pe <= n {
                if !self.prime_powers.contains_key(&(p, e)) {
                    needed.push((p, e));
                }
                e += 1;
                match pe.checked_mul(p) {
                    Some(v) => pe = v,
                    None => break,
                }
            }
        }
        let x = self.x;
        let budgets = self.budgets;
        let counts = par::map_collect(&needed, |&(p, e)| {
            Ok(count_lift(x, LocalRingSpec::mixed(p, 1, e)?, &budgets)?.count)
        });
        for (key, c) in needed.into_iter().zip(counts) {
            self.prime_powers.insert(key, c?);
        }
        Ok(())
    }

    pub fn count(&mut self, n: u64) -> Result<BigUint> {
        if n == 0 {
            return Err(Error::invalid("modulus must be at least 1"));
        }
        let mut total = BigUint::one();
        for (p, e) in primes::factor(n) {
            let c = match self.prime_powers.get(&(p, e)) {
                Some(c) => c.clone(),
                None => {
                    let c = count_lift(self.x, LocalRingSpec::mixed(p, 1, e)?, &self.budgets)?.count;
                    self.prime_powers.insert((p, e), c.clone());
                    c
                }
            };
            total *= c;
        }
        Ok(total)
    }

    /// `|X(Z/n)|` for `n = 1..=n_max`.
    pub fn counts_up_to(&mut self, n_max: u64) -> Result<Vec<BigUint>> {
        self.prepare(n_max)?;
        (1..=n_max).map(|n| self.count(n)).collect()
    }
}

fn big_ln(v: &BigUint) -> f64 {
    match v.to_f64() {
        Some(f) if f.is_finite() && f > 0.0 => f.ln(),
        _ => {
            let bits = v.bits();
            let shift = bits.saturating_sub(60);
            let top = (v >> shift).to_f64().unwrap_or(1.0);
            top.ln() + shift as f64 * std::f64::consts::LN_2
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbscissaEstimate {
    pub n_max: u64,
    /// Least-squares slope of `log S(n)` against `log n` over
    /// `n_max/2 <= n <= n_max`, where `S(n) = sum_(k<=n) |X(Z/k)|`.
    pub slope: f64,
    /// `(n, log S(n) / log n)` at sample points.
    pub partial_exponents: Vec<(u64, f64)>,
}

/// Estimates the abscissa of convergence of `sum |X(Z/n)| n^-s` from the
/// growth of the partial sums.
pub fn abscissa_estimate(x: &AffineScheme, n_max: u64, budgets: &Budgets) -> Result<AbscissaEstimate> {
    if n_max < 4 {
        return Err(Error::invalid("abscissa estimate needs N >= 4"));
    }
    let counts = CompositeCounts::new(x, budgets).counts_up_to(n_max)?;
    let mut partial = BigUint::zero();
    let mut pts = Vec::new();
    let mut samples = Vec::new();
    let stride = (n_max / 20).max(1);
    for (i, c) in counts.iter().enumerate() {
        let n = i as u64 + 1;
        partial += c;
        if n >= n_max / 2 {
            pts.push(((n as f64).ln(), big_ln(&partial)));
        }
        if n >= 2 && (n.is_multiple_of(stride) || n == n_max) {
            samples.push((n, big_ln(&partial) / (n as f64).ln()));
        }
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(AbscissaEstimate {
        n_max,
        slope: sxy / sxx,
        partial_exponents: samples,
    })
}

/// Running means `(1/n) sum_(k<=n) k^-d |X(Z/k)|` for `n = 1..=n_max`.
pub fn cesaro_mean(x: &AffineScheme, n_max: u64, budgets: &Budgets) -> Result<Vec<BigRational>> {
    let counts = CompositeCounts::new(x, budgets).counts_up_to(n_max)?;
    let d = x.declared_dim;
    let mut sum = BigRational::zero();
    let mut out = Vec::with_capacity(counts.len());
    for (i, c) in counts.into_iter().enumerate() {
        let n = BigInt::from(i as u64 + 1);
        sum += BigRational::new(c.into(), num_traits::pow(n.clone(), d));
        out.push(&sum / BigRational::from_integer(n));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `prod_p P_p(s)`.
    P,
    /// `prod_p Z_p(s) / Z_p(infinity)`.
    Z,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerProduct {
    pub s: f64,
    pub normalization: Normalization,
    pub p_max: u64,
    pub m_max: u32,
    /// Partial product over the included primes. Every local factor is a
    /// truncated series with nonnegative terms, so this is a lower value
    /// when the factors are.
    pub value: f64,
    pub primes: Vec<u64>,
    /// Series length used for each prime (capped by the ring-size budget).
    pub levels: Vec<u32>,
    pub factors: Vec<f64>,
    pub divergence_suspected: bool,
    pub note: String,
}

/// Truncated Euler product at real `s > dim + 1`.
pub fn global_euler_product(
    x: &AffineScheme,
    s: f64,
    p_max: u64,
    m_max: u32,
    normalization: Normalization,
    budgets: &Budgets,
) -> Result<EulerProduct> {
    let d = x.declared_dim as f64;
    if s.is_nan() || s <= d + 1.0 {
        return Err(Error::invalid(format!(
            "s = {s} is outside the region of absolute convergence s > {}",
            d + 1.0
        )));
    }
    if m_max == 0 {
        return Err(Error::invalid("m_max must be at least 1"));
    }
    let ps = if p_max < 2 { Vec::new() } else { primes::primes_up_to(p_max) };
    let levels: Vec<u32> = ps
        .iter()
        .map(|&p| {
            let fit = (budgets.ring_bits as f64 / (p as f64).log2()).floor() as u32;
            m_max.min(fit.max(1))
        })
        .collect();
    let jobs: Vec<(u64, u32)> = ps.iter().copied().zip(levels.iter().copied()).collect();
    let factors: Result<Vec<f64>> = par::map_collect(&jobs, |&(p, m)| {
        let extra = match normalization {
            Normalization::P => 0,
            Normalization::Z => 1,
        };
        let levels = if extra == 1 && m + 1 > levels_cap(p, budgets) { m - 1 } else { m };
        let series = local_p_series(x, p, levels + extra, budgets)?;
        let h = normalized(&series, x.declared_dim);
        let pf = p as f64;
        Ok(match normalization {
            // c_n p^-ns = h_n p^(n(d - s))
            Normalization::P => h
                .iter()
                .enumerate()
                .map(|(n, hn)| hn.to_f64().unwrap_or(f64::NAN) * pf.powf(n as f64 * (d - s)))
                .sum(),
            Normalization::Z => {
                let z = igusa_from_p_series(&series, x.declared_dim);
                let t = pf.powf(-(s + 1.0));
                let a0 = z.coeffs[0].to_f64().unwrap_or(f64::NAN);
                z.coeffs
                    .iter()
                    .enumerate()
                    .map(|(n, a)| a.to_f64().unwrap_or(f64::NAN) * t.powi(n as i32))
                    .sum::<f64>()
                    / a0
            }
        })
    })
    .into_iter()
    .collect();
    let factors = factors?;
    let value = factors.iter().product();
    let logs: Vec<f64> = factors.iter().map(|f| f.ln().abs()).collect();
    let half = logs.len() / 2;
    let divergence_suspected = logs.len() >= 4 && {
        let early = logs[..half].iter().cloned().fold(0.0, f64::max);
        let late = logs[half..].iter().cloned().fold(0.0, f64::max);
        late >= early
    };
    let truncated: BTreeSet<u64> = ps
        .iter()
        .zip(&levels)
        .filter(|(_, &m)| m < m_max)
        .map(|(&p, _)| p)
        .collect();
    let mut note = format!(
        "product over {} primes <= {p_max}, local series truncated at level {m_max}; evaluated at real s only",
        ps.len()
    );
    if !truncated.is_empty() {
        let _ = write!(note, "; ring-size budget shortened the series for p in {truncated:?}");
    }
    if divergence_suspected {
        note.push_str("; late local factors do not decay, the product may diverge");
    }
    Ok(EulerProduct {
        s,
        normalization,
        p_max,
        m_max,
        value,
        primes: ps,
        levels,
        factors,
        divergence_suspected,
        note,
    })
}

fn levels_cap(p: u64, budgets: &Budgets) -> u32 {
    (budgets.ring_bits as f64 / (p as f64).log2()).floor() as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{affine_space, corpus};

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn ints(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| r(x, 1)).collect()
    }

    #[test]
    fn p_series_examples() {
        let b = Budgets::default();
        assert_eq!(local_p_series(&corpus::point(), 3, 4, &b).unwrap().coeffs, ints(&[1, 1, 1, 1, 1]));
        assert_eq!(local_p_series(&affine_space(1), 3, 4, &b).unwrap().coeffs, ints(&[1, 3, 9, 27, 81]));
        assert_eq!(local_p_series(&corpus::cone(), 3, 3, &b).unwrap().coeffs, ints(&[1, 9, 99, 891]));
    }

    #[test]
    fn igusa_examples() {
        let b = Budgets::default();
        let z = igusa_z_series(&corpus::point(), 3, 5, &b).unwrap();
        assert!(z.coeffs.iter().all(|a| *a == r(2, 3)));
        let z = igusa_z_series(&affine_space(1), 3, 3, &b).unwrap();
        assert!(z.coeffs.iter().all(|a| *a == r(2, 3)));
        let z = igusa_z_series(&corpus::cusp(), 5, 1, &b).unwrap();
        assert_eq!(z.coeffs, vec![r(4, 5), r(16, 25)]);
    }

    #[test]
    fn igusa_routes_agree() {
        let b = Budgets::default();
        for x in corpus::all() {
            if x.nvars() > 4 {
                continue;
            }
            for p in [2u64, 3] {
                let ps = local_p_series(&x, p, 4, &b).unwrap();
                assert_eq!(
                    igusa_by_definition(&ps, x.declared_dim).unwrap(),
                    igusa_from_p_series(&ps, x.declared_dim),
                    "{}",
                    x.name
                );
            }
        }
    }

    #[test]
    fn smooth_series_is_geometric() {
        let b = Budgets::default();
        let x = corpus::sl2();
        for p in [2u64, 3] {
            let c = local_p_series(&x, p, 4, &b).unwrap().coeffs;
            for n in 1..c.len() {
                let expected = &c[1] * BigRational::from_integer(num_traits::pow(BigInt::from(p), 3 * (n - 1)));
                assert_eq!(c[n], expected);
            }
        }
    }

    #[test]
    fn pade_on_local_series() {
        let b = Budgets::default();
        let s = local_p_series(&corpus::point(), 3, 7, &b).unwrap();
        let fit = pade_fit(&s.coeffs, 3).unwrap().unwrap();
        assert_eq!((fit.numerator.clone(), fit.denominator.clone()), (ints(&[1]), ints(&[1, -1])));
        assert!(fit.stable);
        let s = local_p_series(&affine_space(1), 3, 7, &b).unwrap();
        let fit = pade_fit(&s.coeffs, 3).unwrap().unwrap();
        assert_eq!(fit.denominator, ints(&[1, -3]));
        assert!(fit.stable);
    }

    #[test]
    fn abscissa_small() {
        let b = Budgets::default();
        let a = abscissa_estimate(&affine_space(1), 2000, &b).unwrap();
        assert!((a.slope - 2.0).abs() < 0.05, "{}", a.slope);
        let a = abscissa_estimate(&corpus::point(), 2000, &b).unwrap();
        assert!((a.slope - 1.0).abs() < 0.05, "{}", a.slope);
    }

    #[test]
    fn cesaro_constant_for_affine_line_and_point() {
        let b = Budgets::default();
        for x in [affine_space(1), corpus::point()] {
            assert!(cesaro_mean(&x, 50, &b).unwrap().iter().all(|m| m.is_one()));
        }
    }

    #[test]
    fn euler_products() {
        let b = Budgets::default();
        let z2 = std::f64::consts::PI.powi(2) / 6.0;
        let e = global_euler_product(&affine_space(1), 3.0, 100, 30, Normalization::P, &b).unwrap();
        assert!((e.value - z2).abs() < 0.01, "{}", e.value);
        assert!(!e.divergence_suspected);
        let e = global_euler_product(&corpus::point(), 2.0, 100, 30, Normalization::P, &b).unwrap();
        assert!((e.value - z2).abs() < 0.01, "{}", e.value);
        let small = global_euler_product(&corpus::cone(), 4.0, 13, 3, Normalization::P, &b).unwrap();
        let large = global_euler_product(&corpus::cone(), 4.0, 23, 3, Normalization::P, &b).unwrap();
        assert!(large.value >= small.value && large.value.is_finite());
        assert!(global_euler_product(&corpus::cone(), 3.0, 10, 2, Normalization::P, &b).is_err());
        let empty = global_euler_product(&corpus::cone(), 4.0, 1, 2, Normalization::Z, &b).unwrap();
        assert_eq!(empty.value, 1.0);
        let z = global_euler_product(&affine_space(1), 3.0, 20, 4, Normalization::Z, &b).unwrap();
        assert!(z.value.is_finite() && z.value > 0.0);
    }

    #[test]
    fn product_matches_dirichlet_sum() {
        // over 2- and 3-smooth N with exponents <= 3 the two views agree
        let b = Budgets::default();
        let x = corpus::cusp();
        let s = 3.0;
        let e = global_euler_product(&x, s, 3, 3, Normalization::P, &b).unwrap();
        let mut counts = CompositeCounts::new(&x, &b);
        let mut sum = 0.0;
        for i in 0..=3u32 {
            for j in 0..=3u32 {
                let n = 2u64.pow(i) * 3u64.pow(j);
                sum += counts.count(n).unwrap().to_f64().unwrap() * (n as f64).powf(-s);
            }
        }
        assert!((sum - e.value).abs() < 1e-12 * sum);
    }
}

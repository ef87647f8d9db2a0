//! Sweeps of normalized counts `h(q, m)` and the statistics built on them.
//!
//! For a scheme with rational singularities the normalized counts stay
//! close to `1` horizontally (`|h(q,1) - 1| = O(q^-1/2)`) and vertically
//! (`|h(q,m) - h(q,1)| = O(q^-1)`). The constants are not effective, so the
//! report gives exact statistics and a labelled heuristic verdict.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::counting::{count_lift, normalize, Budgets, HEntry};
use crate::exact::{format_rational, natural, rational};
use crate::par;
use crate::rings::{LocalRingSpec, PrimePower, RingKind};
use crate::schemes::{AffineScheme, Hypotheses};

/// A table cell that could not be computed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellFailure {
    pub q: u64,
    pub m: u32,
    pub kind: RingKind,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HTable {
    pub scheme: String,
    pub declared_dim: usize,
    pub hypotheses: Hypotheses,
    /// Sorted by `(kind, q, m)`.
    pub entries: Vec<HEntry>,
    pub failures: Vec<CellFailure>,
}

impl HTable {
    pub fn get(&self, kind: RingKind, q: u64, m: u32) -> Option<&HEntry> {
        self.entries
            .iter()
            .find(|e| e.kind == kind && e.q == q && e.m == m)
    }

    /// CSV with columns `scheme,q,m,kind,count,h_num,h_den`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scheme,q,m,kind,count,h_num,h_den\n");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                self.scheme,
                e.q,
                e.m,
                e.kind,
                e.count,
                e.h.numer(),
                e.h.denom()
            );
        }
        out
    }
}

/// Computes `h(q, m)` for every `q` in `q_list`, `1 <= m <= m_max` and every
/// ring kind. Cells that fail (for instance on a budget) are recorded in
/// `failures`; the sweep itself never fails.
pub fn h_sweep(
    x: &AffineScheme,
    q_list: &[PrimePower],
    m_max: u32,
    kinds: &[RingKind],
    budgets: &Budgets,
) -> HTable {
    let mut cells = Vec::new();
    for &kind in kinds {
        for &q in q_list {
            for m in 1..=m_max {
                cells.push((kind, q, m));
            }
        }
    }
    cells.sort_by_key(|&(k, q, m)| (k, q.q(), m));
    cells.dedup();
    let results = par::map_collect(&cells, |&(kind, q, m)| {
        let spec = LocalRingSpec::new(q, m, kind)?;
        count_lift(x, spec, budgets).map(|c| normalize(x, spec, &c.count))
    });
    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for ((kind, q, m), r) in cells.into_iter().zip(results) {
        match r {
            Ok(e) => entries.push(e),
            Err(e) => failures.push(CellFailure {
                q: q.q(),
                m,
                kind,
                error: e.to_string(),
            }),
        }
    }
    HTable {
        scheme: x.name.clone(),
        declared_dim: x.declared_dim,
        hypotheses: x.hypotheses,
        entries,
        failures,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LangWeilEstimate {
    pub q: u64,
    #[serde(with = "natural")]
    pub count: BigUint,
    /// `|X(F_q)| / q^dim`.
    #[serde(with = "rational")]
    pub ratio: BigRational,
    /// Nearest integer to the ratio (halves round up).
    pub c: u64,
    #[serde(with = "rational")]
    pub residual: BigRational,
}

fn nearest_integer(r: &BigRational) -> BigInt {
    let half = BigRational::new(1.into(), 2.into());
    (r + half).floor().to_integer()
}

fn lang_weil_from_ratio(q: u64, count: BigUint, ratio: BigRational) -> LangWeilEstimate {
    let c = nearest_integer(&ratio);
    let residual = (&ratio - BigRational::from_integer(c.clone())).abs();
    LangWeilEstimate {
        q,
        count,
        ratio,
        c: c.to_u64().unwrap_or(u64::MAX),
        residual,
    }
}

/// Estimates the number of top-dimensional `F_q`-rational components from
/// `|X(F_q)| / q^dim`.
pub fn lang_weil_c(
    x: &AffineScheme,
    q_list: &[PrimePower],
    budgets: &Budgets,
) -> crate::Result<Vec<LangWeilEstimate>> {
    par::map_collect(q_list, |&q| {
        let spec = LocalRingSpec::new(q, 1, RingKind::Mixed)?;
        let count = count_lift(x, spec, budgets)?.count;
        let e = normalize(x, spec, &count);
        Ok(lang_weil_from_ratio(q.q(), count, e.h))
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Largest admissible `s3(q)`.
    pub s3_max: f64,
    /// Largest admissible log-log growth exponent of `s3` in `q`.
    pub s3_growth_max: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            s3_max: 10.0,
            s3_growth_max: 0.5,
        }
    }
}

/// Statistics for one residue field size and ring kind.
///
/// `s1 = sqrt(q) |h(q,1) - 1|` and `s2 = max_m sqrt(q) |h(q,m) - 1|` involve
/// square roots, so their exact squares are kept alongside the rounded
/// values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QStats {
    pub q: u64,
    pub kind: RingKind,
    pub m_max: u32,
    #[serde(with = "rational")]
    pub s1_squared: BigRational,
    pub s1: f64,
    #[serde(with = "rational")]
    pub s2_squared: BigRational,
    pub s2: f64,
    /// `max_m q |h(q,m) - h(q,1)|`.
    #[serde(with = "rational")]
    pub s3: BigRational,
    /// `max_m h(q,m)` over the tested range.
    #[serde(with = "rational")]
    pub vertical_sup: BigRational,
    /// `max_m h(q,m) - h(q,1)`.
    #[serde(with = "rational")]
    pub vertical_excess: BigRational,
    pub lang_weil: LangWeilEstimate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    RsConsistent,
    NonRs,
    /// The residue counts contradict a geometrically irreducible scheme of
    /// the declared dimension, so the statistics carry no meaning.
    HypothesisViolated,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub scheme: String,
    pub declared_dim: usize,
    pub hypotheses: Hypotheses,
    pub thresholds: Thresholds,
    pub stats: Vec<QStats>,
    /// Least-squares slope of `log s3` against `log q`, per ring kind, over
    /// the fields where `s3 > 0`.
    pub s3_growth: BTreeMap<RingKind, f64>,
    pub verdict: Verdict,
    pub label: String,
    pub reasons: Vec<String>,
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Computes the statistics of `table` and a heuristic verdict.
///
/// The verdict is `hypothesis-violated` when some tested field has a
/// Lang-Weil constant different from 1. Otherwise it is `rs-consistent` when
/// every `s3` is below the threshold, `s3` does not grow like a positive
/// power of `q`, and the vertical excess `max_m h(q,m) - h(q,1)` does not
/// increase with `q`; `non-rs` otherwise.
pub fn rs_report(table: &HTable, thresholds: Thresholds) -> DiagnosticsReport {
    let mut stats = Vec::new();
    let mut reasons = Vec::new();
    let mut by_field: BTreeMap<(RingKind, u64), Vec<&HEntry>> = BTreeMap::new();
    for e in &table.entries {
        by_field.entry((e.kind, e.q)).or_default().push(e);
    }
    for ((kind, q), mut cells) in by_field {
        cells.sort_by_key(|e| e.m);
        let Some(base) = cells.iter().find(|e| e.m == 1) else {
            reasons.push(format!("{kind} q={q}: h(q,1) missing, field skipped"));
            continue;
        };
        let h1 = base.h.clone();
        let qr = BigRational::from_integer(q.into());
        let one = BigRational::one();
        let s1_squared = &qr * (&h1 - &one).pow(2);
        let mut s2_squared = BigRational::zero();
        let mut s3 = BigRational::zero();
        let mut sup = h1.clone();
        for e in &cells {
            let d2 = &qr * (&e.h - &one).pow(2);
            if d2 > s2_squared {
                s2_squared = d2;
            }
            let v = &qr * (&e.h - &h1).abs();
            if v > s3 {
                s3 = v;
            }
            if e.h > sup {
                sup = e.h.clone();
            }
        }
        stats.push(QStats {
            q,
            kind,
            m_max: cells.last().map(|e| e.m).unwrap_or(1),
            s1: to_f64(&s1_squared).sqrt(),
            s1_squared,
            s2: to_f64(&s2_squared).sqrt(),
            s2_squared,
            s3,
            vertical_excess: &sup - &h1,
            vertical_sup: sup,
            lang_weil: lang_weil_from_ratio(q, base.count.clone(), h1),
        });
    }

    let mut s3_growth = BTreeMap::new();
    let mut verdict = Verdict::RsConsistent;
    if stats.is_empty() {
        verdict = Verdict::Inconclusive;
        reasons.push("no usable table cells".into());
    }
    for s in &stats {
        if s.lang_weil.c != 1 {
            verdict = Verdict::HypothesisViolated;
            reasons.push(format!(
                "{} q={}: |X(F_q)|/q^dim = {} suggests c = {}, not one geometric component",
                s.kind,
                s.q,
                format_rational(&s.lang_weil.ratio),
                s.lang_weil.c
            ));
        }
    }
    if verdict == Verdict::RsConsistent {
        for kind in [RingKind::Mixed, RingKind::Equal] {
            let rows: Vec<&QStats> = stats.iter().filter(|s| s.kind == kind).collect();
            for s in &rows {
                if to_f64(&s.s3) > thresholds.s3_max {
                    verdict = Verdict::NonRs;
                    reasons.push(format!(
                        "{kind} q={}: s3 = {} exceeds {}",
                        s.q,
                        format_rational(&s.s3),
                        thresholds.s3_max
                    ));
                }
            }
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|s| s.s3.is_positive())
                .map(|s| ((s.q as f64).ln(), to_f64(&s.s3).ln()))
                .collect();
            if let Some(slope) = least_squares_slope(&pts) {
                s3_growth.insert(kind, slope);
                if slope >= thresholds.s3_growth_max {
                    verdict = Verdict::NonRs;
                    reasons.push(format!(
                        "{kind}: s3 grows like q^{slope:.3} across the tested fields"
                    ));
                }
            }
            for w in rows.windows(2) {
                if w[1].vertical_excess > w[0].vertical_excess {
                    verdict = Verdict::NonRs;
                    reasons.push(format!(
                        "{kind}: vertical excess increases from {} (q={}) to {} (q={})",
                        format_rational(&w[0].vertical_excess),
                        w[0].q,
                        format_rational(&w[1].vertical_excess),
                        w[1].q
                    ));
                }
            }
        }
    }
    if !table.failures.is_empty() {
        reasons.push(format!("{} table cells failed and were skipped", table.failures.len()));
    }
    let m_max = stats.iter().map(|s| s.m_max).max().unwrap_or(0);
    DiagnosticsReport {
        scheme: table.scheme.clone(),
        declared_dim: table.declared_dim,
        hypotheses: table.hypotheses,
        thresholds,
        stats,
        s3_growth,
        verdict,
        label: format!(
            "empirical: hypotheses user-asserted; vertical behaviour checked for m <= {m_max} only"
        ),
        reasons,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::corpus;

    fn primes(qs: &[u64]) -> Vec<PrimePower> {
        qs.iter().map(|&q| PrimePower::from_q(q).unwrap()).collect()
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    const BOTH: [RingKind; 2] = [RingKind::Mixed, RingKind::Equal];

    #[test]
    fn cone_sweep_and_report() {
        let t = h_sweep(&corpus::cone(), &primes(&[3, 5, 7]), 3, &BOTH, &Budgets::default());
        assert!(t.failures.is_empty());
        for e in &t.entries {
            let q = e.q as i64;
            let expected = if e.m == 1 { r(1, 1) } else { r(q * q + q - 1, q * q) };
            assert_eq!(e.h, expected, "q={q} m={}", e.m);
        }
        let rep = rs_report(&t, Thresholds::default());
        assert_eq!(rep.verdict, Verdict::RsConsistent, "{:?}", rep.reasons);
        for s in &rep.stats {
            assert_eq!(s.s3, r(s.q as i64 - 1, s.q as i64));
        }
    }

    #[test]
    fn cusp_is_flagged() {
        let t = h_sweep(&corpus::cusp(), &primes(&[3, 5, 7]), 2, &BOTH, &Budgets::default());
        for e in t.entries.iter().filter(|e| e.m == 2) {
            assert_eq!(e.h, r(2 * e.q as i64 - 1, e.q as i64));
        }
        let rep = rs_report(&t, Thresholds::default());
        assert_eq!(rep.verdict, Verdict::NonRs);
        for s in &rep.stats {
            assert_eq!(s.s3, r(s.q as i64 - 1, 1));
        }
    }

    #[test]
    fn smooth_schemes_have_vanishing_statistics() {
        for x in [corpus::affine_plane(), corpus::sl2()] {
            let t = h_sweep(&x, &primes(&[2, 3, 5]), 2, &BOTH, &Budgets::default());
            let rep = rs_report(&t, Thresholds::default());
            assert_eq!(rep.verdict, Verdict::RsConsistent);
            for s in &rep.stats {
                assert!(s.s3.is_zero());
            }
        }
        let t = h_sweep(&corpus::affine_plane(), &primes(&[3]), 2, &BOTH, &Budgets::default());
        assert!(t.entries.iter().all(|e| e.h.is_one()));
    }

    #[test]
    fn crossing_violates_irreducibility() {
        let t = h_sweep(&corpus::crossing(), &primes(&[3, 5, 7]), 2, &[RingKind::Mixed], &Budgets::default());
        let rep = rs_report(&t, Thresholds::default());
        assert_eq!(rep.verdict, Verdict::HypothesisViolated);
    }

    #[test]
    fn lang_weil_examples() {
        let b = Budgets::default();
        let lw = lang_weil_c(&corpus::crossing(), &primes(&[7]), &b).unwrap();
        assert_eq!((lw[0].ratio.clone(), lw[0].c), (r(13, 7), 2));
        let lw = lang_weil_c(&corpus::sum_of_squares(), &primes(&[5, 7]), &b).unwrap();
        assert_eq!(lw[0].c, 2);
        assert_eq!((lw[1].ratio.clone(), lw[1].c), (r(1, 7), 0));
        let lw = lang_weil_c(&corpus::affine_plane(), &primes(&[4, 9]), &b).unwrap();
        assert!(lw.iter().all(|e| e.ratio.is_one() && e.c == 1));
    }

    #[test]
    fn failures_are_recorded() {
        let tight = Budgets {
            enumeration: 10,
            ..Budgets::default()
        };
        let t = h_sweep(&corpus::cone(), &primes(&[3, 5]), 1, &[RingKind::Mixed], &tight);
        assert_eq!(t.entries.len(), 1);
        assert_eq!(t.failures.len(), 1);
    }

    #[test]
    fn csv_layout() {
        let t = h_sweep(&corpus::cusp(), &primes(&[3]), 2, &[RingKind::Mixed], &Budgets::default());
        assert_eq!(
            t.to_csv(),
            "scheme,q,m,kind,count,h_num,h_den\ncusp,3,1,mixed,3,1,1\ncusp,3,2,mixed,15,5,3\n"
        );
    }
}

//! Exact point counts over finite local rings.
//!
//! Two engines: [`count_bruteforce`] enumerates `R^n` and serves as the
//! oracle; [`count_lift`] counts solutions over the residue field and lifts
//! them level by level, closing whole subtrees at points where the Jacobian
//! has full row rank.

mod brute;
mod lift;
mod residue;
mod tally;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rings::{make_ring_with_budget, primes, LocalRing, LocalRingSpec, PrimePower, RingElement, RingKind};
use crate::schemes::AffineScheme;

pub use residue::FieldPlan;
pub use tally::Tally;

/// Resource limits. Exceeding any of them is an error, never a truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    /// Maximum number of points enumerated by brute force, and maximum size
    /// of the residue-field search space of the lifting engine.
    pub enumeration: u64,
    /// Maximum number of interior nodes of the lifting tree.
    pub lift_nodes: u64,
    /// Maximum `log2 |R|`.
    pub ring_bits: u32,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            enumeration: 100_000_000,
            lift_nodes: 1_000_000_000,
            ring_bits: crate::rings::DEFAULT_MAX_RING_BITS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    BruteForce,
    Lift,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::BruteForce => "bruteforce",
            Engine::Lift => "lift",
        })
    }
}

impl FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bruteforce" | "brute" => Ok(Engine::BruteForce),
            "lift" => Ok(Engine::Lift),
            _ => Err(Error::invalid(format!("unknown engine {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountResult {
    pub scheme: String,
    pub spec: LocalRingSpec,
    #[serde(with = "crate::exact::natural")]
    pub count: BigUint,
    pub engine: Engine,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// A normalized count `h = |X(R)| / |R|^dim`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HEntry {
    pub q: u64,
    pub m: u32,
    pub kind: RingKind,
    #[serde(with = "crate::exact::natural")]
    pub count: BigUint,
    #[serde(with = "crate::exact::rational")]
    pub h: BigRational,
}

fn ring_for(spec: LocalRingSpec, budgets: &Budgets) -> Result<crate::rings::RingHandle> {
    make_ring_with_budget(spec, budgets.ring_bits)
}

pub fn count_bruteforce(x: &AffineScheme, spec: LocalRingSpec, budgets: &Budgets) -> Result<CountResult> {
    let start = Instant::now();
    let ring = ring_for(spec, budgets)?;
    let compiled = x.system.compile(&ring);
    let tally = brute::count_points(&compiled, &ring, x.nvars(), budgets.enumeration)?;
    Ok(CountResult {
        scheme: x.name.clone(),
        spec,
        count: tally.value(),
        engine: Engine::BruteForce,
        elapsed: start.elapsed(),
    })
}

pub fn count_lift(x: &AffineScheme, spec: LocalRingSpec, budgets: &Budgets) -> Result<CountResult> {
    let start = Instant::now();
    let ring = ring_for(spec, budgets)?;
    let count = count_lift_in(x, &ring, budgets)?;
    Ok(CountResult {
        scheme: x.name.clone(),
        spec,
        count,
        engine: Engine::Lift,
        elapsed: start.elapsed(),
    })
}

fn count_lift_in(x: &AffineScheme, ring: &LocalRing, budgets: &Budgets) -> Result<BigUint> {
    let lifter = lift::Lifter::new(&x.system, ring, budgets.lift_nodes);
    lifter.check_budget(budgets.enumeration)?;
    Ok(lifter.count()?.value())
}

/// Counts with the requested engine, or the lifting engine by default.
pub fn count(x: &AffineScheme, spec: LocalRingSpec, engine: Option<Engine>, budgets: &Budgets) -> Result<CountResult> {
    match engine.unwrap_or(Engine::Lift) {
        Engine::BruteForce => count_bruteforce(x, spec, budgets),
        Engine::Lift => count_lift(x, spec, budgets),
    }
}

/// `count / q^(m * dim)` as an exact rational.
pub fn normalize(x: &AffineScheme, spec: LocalRingSpec, count: &BigUint) -> HEntry {
    let denom: BigUint = Pow::pow(BigUint::from(spec.q.q()), (spec.m as usize) * x.declared_dim);
    HEntry {
        q: spec.q.q(),
        m: spec.m,
        kind: spec.kind,
        count: count.clone(),
        h: BigRational::new(BigInt::from(count.clone()), BigInt::from(denom)),
    }
}

pub fn h_value(x: &AffineScheme, spec: LocalRingSpec, budgets: &Budgets) -> Result<HEntry> {
    let c = count_lift(x, spec, budgets)?;
    Ok(normalize(x, spec, &c.count))
}

/// `|X(Z/N)|` as the product of its prime-power factors; `1` for `N = 1`.
pub fn count_composite(x: &AffineScheme, n: u64, budgets: &Budgets) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::invalid("modulus must be at least 1"));
    }
    let mut total = BigUint::one();
    for (p, e) in primes::factor(n) {
        let spec = LocalRingSpec::new(PrimePower::prime(p)?, e, RingKind::Mixed)?;
        total *= count_lift(x, spec, budgets)?.count;
    }
    Ok(total)
}

/// Counts over `Z_q / p^m` and `F_q[t]/t^m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub q: u64,
    pub m: u32,
    #[serde(with = "crate::exact::natural")]
    pub mixed_count: BigUint,
    #[serde(with = "crate::exact::natural")]
    pub equal_count: BigUint,
    pub equal: bool,
}

pub fn cross_check_rings(x: &AffineScheme, q: PrimePower, m: u32, budgets: &Budgets) -> Result<CrossCheck> {
    let mixed = count_lift(x, LocalRingSpec::new(q, m, RingKind::Mixed)?, budgets)?.count;
    let equal = count_lift(x, LocalRingSpec::new(q, m, RingKind::Equal)?, budgets)?.count;
    Ok(CrossCheck {
        q: q.q(),
        m,
        equal: mixed == equal,
        mixed_count: mixed,
        equal_count: equal,
    })
}

/// Points of `X(R)` in enumeration order, as coordinate lists. Refuses to
/// produce more than `limit` points.
pub fn list_points(
    x: &AffineScheme,
    spec: LocalRingSpec,
    limit: usize,
    budgets: &Budgets,
) -> Result<Vec<Vec<RingElement>>> {
    let ring = ring_for(spec, budgets)?;
    let compiled = x.system.compile(&ring);
    let mut out = Vec::new();
    brute::stream_points(&compiled, &ring, x.nvars(), budgets.enumeration, limit, |p| {
        out.push(p.to_vec())
    })?;
    Ok(out)
}

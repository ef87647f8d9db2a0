use super::tally::Tally;
use crate::error::{Error, Result};
use crate::par;
use crate::polys::CompiledSystem;
use crate::rings::{LocalRing, RingElement};

/// Number of points of `R^n` in which every compiled polynomial vanishes,
/// by exhaustive enumeration.
pub(crate) fn count_points(
    system: &CompiledSystem,
    ring: &LocalRing,
    nvars: usize,
    budget: u64,
) -> Result<Tally> {
    let card = ring.cardinality();
    let total = card.checked_pow(nvars as u32).filter(|&t| t <= budget);
    if total.is_none() {
        return Err(Error::budget(format!(
            "brute force over {}^{} points exceeds budget {}",
            card, nvars, budget
        )));
    }
    if nvars == 0 {
        let mut t = Tally::new();
        if system.is_zero_at(ring, &[]) {
            t.add_u128(1);
        }
        return Ok(t);
    }
    // the first coordinate (and the second, for small rings) index tasks
    let split = if nvars >= 2 && card < 64 { 2 } else { 1 };
    let tasks = card.pow(split as u32);
    Ok(par::map_reduce(
        tasks as usize,
        Tally::new(),
        |task| {
            let mut point = vec![ring.zero(); nvars];
            let mut t = task as u64;
            for x in point.iter_mut().take(split) {
                *x = RingElement::from_index(t % card);
                t /= card;
            }
            let mut hits: u128 = 0;
            loop {
                hits += system.is_zero_at(ring, &point) as u128;
                // odometer over the remaining coordinates
                let mut i = split;
                loop {
                    if i == nvars {
                        let mut tally = Tally::new();
                        tally.add_u128(hits);
                        return tally;
                    }
                    let next = point[i].index() + 1;
                    if next < card {
                        point[i] = RingElement::from_index(next);
                        break;
                    }
                    point[i] = ring.zero();
                    i += 1;
                }
            }
        },
        Tally::merge,
    ))
}

/// Calls `visit` on every point, in enumeration order, stopping after
/// `limit` points.
pub(crate) fn stream_points(
    system: &CompiledSystem,
    ring: &LocalRing,
    nvars: usize,
    budget: u64,
    limit: usize,
    mut visit: impl FnMut(&[RingElement]),
) -> Result<usize> {
    let card = ring.cardinality();
    match card.checked_pow(nvars as u32) {
        Some(t) if t <= budget => {}
        _ => {
            return Err(Error::budget(format!(
                "point listing over {}^{} points exceeds budget {}",
                card, nvars, budget
            )))
        }
    }
    let mut point = vec![ring.zero(); nvars];
    let mut seen = 0;
    loop {
        if system.is_zero_at(ring, &point) {
            if seen == limit {
                return Err(Error::budget(format!(
                    "more than {limit} points; listing refused"
                )));
            }
            visit(&point);
            seen += 1;
        }
        let mut i = 0;
        loop {
            if i == nvars {
                return Ok(seen);
            }
            let next = point[i].index() + 1;
            if next < card {
                point[i] = RingElement::from_index(next);
                break;
            }
            point[i] = ring.zero();
            i += 1;
        }
    }
}

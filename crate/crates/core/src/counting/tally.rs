use num_bigint::BigUint;
use num_traits::Zero;

/// Exact nonnegative accumulator: a `u128` fast path spilling into a
/// `BigUint`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    small: u128,
    big: BigUint,
}

impl Tally {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add_u128(&mut self, v: u128) {
        match self.small.checked_add(v) {
            Some(s) => self.small = s,
            None => {
                self.big += BigUint::from(self.small) + BigUint::from(v);
                self.small = 0;
            }
        }
    }

    /// Adds `q^e`.
    #[inline]
    pub fn add_pow(&mut self, q: u64, e: u64) {
        match u32::try_from(e).ok().and_then(|e| (q as u128).checked_pow(e)) {
            Some(v) => self.add_u128(v),
            None => self.big += num_traits::pow(BigUint::from(q), e as usize),
        }
    }

    pub fn add_big(&mut self, v: &BigUint) {
        self.big += v;
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        self.add_u128(other.small);
        self.big += other.big;
        self
    }

    pub fn value(&self) -> BigUint {
        if self.big.is_zero() {
            BigUint::from(self.small)
        } else {
            &self.big + BigUint::from(self.small)
        }
    }
}

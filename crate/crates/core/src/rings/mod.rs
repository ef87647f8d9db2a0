//! Finite local rings `Z_q/m^m` (Galois rings) and `F_q[t]/t^m`.
//!
//! Both families are realised as `B[u]/(h(u))` where `B` is `Z/p^m` (mixed
//! characteristic) or `F_p[t]/t^m` (equal characteristic) and `h` is the
//! lexicographically least monic irreducible polynomial of degree `f` over
//! `F_p`. Since `h` is separable, `(F_p[t]/t^m)[u]/h = (F_p[u]/h)[t]/t^m`.
//!
//! An element is stored as a single machine word: its index in the ring's
//! canonical enumeration. Writing `M = p^m`, the index of
//! `b_0 + b_1 u + ... + b_{f-1} u^{f-1}` is `sum b_i M^i`, where a base
//! coordinate `b_i` is either an integer in `[0, M)` or the base-`p` packing
//! `sum_j d_j p^j` of the `t`-digits. In both kinds the base-`p` digit `k` of
//! a coordinate is its `pi^k` digit for the uniformizer `pi = p` or `pi = t`.

mod fp_poly;
pub mod primes;

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fp_poly::{is_irreducible, least_irreducible};

/// Default limit on `log2 |R|`.
pub const DEFAULT_MAX_RING_BITS: u32 = 62;

/// `q = p^f` with `p` prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct PrimePower {
    p: u64,
    f: u32,
    q: u64,
}

impl PrimePower {
    pub fn new(p: u64, f: u32) -> Result<Self> {
        if !primes::is_prime(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        if f == 0 {
            return Err(Error::invalid("extension degree must be at least 1"));
        }
        let q = p
            .checked_pow(f)
            .ok_or_else(|| Error::budget(format!("{p}^{f} does not fit in 64 bits")))?;
        Ok(PrimePower { p, f, q })
    }

    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    /// Recognises `q` as a prime power.
    pub fn from_q(q: u64) -> Result<Self> {
        let fac = primes::factor(q);
        match fac.as_slice() {
            [(p, f)] => Self::new(*p, *f),
            _ => Err(Error::invalid(format!("{q} is not a prime power"))),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn q(&self) -> u64 {
        self.q
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.f)
    }
}

impl FromStr for PrimePower {
    type Err = Error;

    /// Accepts `p^f` or a bare prime power `q`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::invalid(format!("malformed prime power `{s}`"));
        match s.split_once('^') {
            Some((p, f)) => {
                let p = p.trim().parse().map_err(|_| bad())?;
                let f = f.trim().parse().map_err(|_| bad())?;
                PrimePower::new(p, f)
            }
            None => PrimePower::from_q(s.parse().map_err(|_| bad())?),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RingKind {
    /// Galois ring `Z_q/m_q^m`; `Z/p^m` when `f = 1`.
    Mixed,
    /// `F_q[t]/t^m`.
    Equal,
}

impl fmt::Display for RingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RingKind::Mixed => "mixed",
            RingKind::Equal => "equal",
        })
    }
}

impl FromStr for RingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "mixed" => Ok(RingKind::Mixed),
            "equal" => Ok(RingKind::Equal),
            other => Err(Error::invalid(format!("unknown ring kind `{other}`"))),
        }
    }
}

/// A finite local ring of length `m` with residue field `F_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct LocalRingSpec {
    pub q: PrimePower,
    pub m: u32,
    pub kind: RingKind,
}

impl LocalRingSpec {
    pub fn new(q: PrimePower, m: u32, kind: RingKind) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("ring length m must be at least 1"));
        }
        Ok(LocalRingSpec { q, m, kind })
    }

    pub fn mixed(p: u64, f: u32, m: u32) -> Result<Self> {
        Self::new(PrimePower::new(p, f)?, m, RingKind::Mixed)
    }

    pub fn equal(p: u64, f: u32, m: u32) -> Result<Self> {
        Self::new(PrimePower::new(p, f)?, m, RingKind::Equal)
    }

    /// The residue field `F_q`, as a length-one ring of the same kind.
    pub fn residue(&self) -> LocalRingSpec {
        LocalRingSpec { m: 1, ..*self }
    }

    /// `log2 |R| = f m log2 p`.
    pub fn bits(&self) -> f64 {
        self.q.f as f64 * self.m as f64 * (self.q.p as f64).log2()
    }
}

impl fmt::Display for LocalRingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.kind, self.q, self.m)
    }
}

impl FromStr for LocalRingSpec {
    type Err = Error;

    /// `mixed:p^f:m` or `equal:p^f:m`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() != 3 {
            return Err(Error::invalid(format!(
                "ring spec `{s}` must look like mixed:p^f:m or equal:p^f:m"
            )));
        }
        let kind = parts[0].parse()?;
        let q = parts[1].parse()?;
        let m = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad ring length in `{s}`")))?;
        LocalRingSpec::new(q, m, kind)
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl From<$t> for String {
            fn from(v: $t) -> String {
                v.to_string()
            }
        }

        impl TryFrom<String> for $t {
            type Error = Error;
            fn try_from(s: String) -> Result<Self> {
                s.parse()
            }
        }
    };
}

string_serde!(PrimePower);
string_serde!(LocalRingSpec);

/// An element of a [`LocalRing`], by its canonical enumeration index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElement(pub(crate) u64);

impl RingElement {
    pub fn index(self) -> u64 {
        self.0
    }

    pub fn from_index(index: u64) -> Self {
        RingElement(index)
    }
}

#[derive(Debug, Clone, Copy)]
enum Base {
    /// `Z/M`, `M < 2^32`: products fit a word.
    SmallInt(u64),
    /// `Z/M` with 128-bit products.
    WideInt(u64),
    /// `F_p[t]/t^m` with base-`p` digit packing.
    Truncated,
}

pub type RingHandle = Arc<LocalRing>;

/// Arithmetic in a finite local ring. Immutable after construction.
#[derive(Debug, Clone)]
pub struct LocalRing {
    spec: LocalRingSpec,
    p: u64,
    f: usize,
    m: usize,
    /// `M = p^m`, the size of the base ring.
    base_size: u64,
    card: u64,
    base: Base,
    /// Defining polynomial `h`, low degree first, leading 1 included.
    defining: Vec<u64>,
    /// `p^0 ..= p^m`.
    pow_p: Vec<u64>,
    /// `f = 1` with integer base arithmetic: no tables needed.
    native: bool,
    /// Lookup tables for the other small rings, built on first use.
    tables: OnceLock<Option<Arc<FieldTables>>>,
}

/// Largest non-prime field with log/exp tables.
const LOG_TABLE_MAX: u64 = 1 << 16;
/// Largest ring with full addition and multiplication tables.
const FULL_TABLE_MAX: u64 = 1 << 10;

/// Lookup tables for rings without native integer arithmetic (`f > 1` or
/// `F_p[t]/t^m`), in index encoding. Small rings get full `card x card`
/// tables; larger fields get log/exp tables for multiplication.
struct FieldTables {
    q: u64,
    /// `add[a * q + b]` and `mul[a * q + b]`, present when `q <= FULL_TABLE_MAX`.
    add: Vec<u32>,
    mul: Vec<u32>,
    /// `log[x]` for `x != 0` with respect to a fixed primitive element, for
    /// larger fields.
    log: Vec<u32>,
    /// `exp[i] = g^i` for `0 <= i < 2 (q - 1)`.
    exp: Vec<u32>,
    neg: Vec<u32>,
}

impl fmt::Debug for FieldTables {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldTables(q = {}, full: {})", self.q, !self.mul.is_empty())
    }
}

/// Builds the ring described by `spec`, rejecting rings with more than
/// `2^62` elements.
pub fn make_ring(spec: LocalRingSpec) -> Result<RingHandle> {
    make_ring_with_budget(spec, DEFAULT_MAX_RING_BITS)
}

pub fn make_ring_with_budget(spec: LocalRingSpec, max_bits: u32) -> Result<RingHandle> {
    LocalRing::new(spec, max_bits).map(Arc::new)
}

impl LocalRing {
    pub fn new(spec: LocalRingSpec, max_bits: u32) -> Result<Self> {
        let max_bits = max_bits.min(DEFAULT_MAX_RING_BITS);
        if spec.m == 0 {
            return Err(Error::invalid("ring length m must be at least 1"));
        }
        if !primes::is_prime(spec.q.p) {
            return Err(Error::invalid(format!("{} is not prime", spec.q.p)));
        }
        let p = spec.q.p;
        let f = spec.q.f as usize;
        let m = spec.m as usize;
        let too_big = || {
            Error::budget(format!(
                "ring {spec} has about 2^{:.1} elements, limit is 2^{max_bits}",
                spec.bits()
            ))
        };
        if spec.bits() > max_bits as f64 + 1e-9 {
            return Err(too_big());
        }
        let base_size = p.checked_pow(spec.m).ok_or_else(too_big)?;
        let card = base_size.checked_pow(spec.q.f).ok_or_else(too_big)?;
        if card > (1u64 << max_bits) {
            return Err(too_big());
        }
        let base = match spec.kind {
            RingKind::Mixed if base_size < (1 << 32) => Base::SmallInt(base_size),
            RingKind::Mixed => Base::WideInt(base_size),
            RingKind::Equal if m == 1 && p < (1 << 32) => Base::SmallInt(p),
            RingKind::Equal if m == 1 => Base::WideInt(p),
            RingKind::Equal => Base::Truncated,
        };
        let pow_p = (0..=spec.m).map(|k| p.pow(k)).collect();
        Ok(LocalRing {
            spec,
            p,
            f,
            m,
            base_size,
            card,
            base,
            defining: least_irreducible(p, f),
            pow_p,
            native: f == 1 && !matches!(base, Base::Truncated),
            tables: OnceLock::new(),
        })
    }

    pub fn spec(&self) -> LocalRingSpec {
        self.spec
    }

    pub fn kind(&self) -> RingKind {
        self.spec.kind
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.spec.q.q
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn length(&self) -> usize {
        self.m
    }

    pub fn cardinality(&self) -> u64 {
        self.card
    }

    /// `p^m` for mixed rings, `p` for equal-characteristic rings.
    pub fn characteristic(&self) -> u64 {
        match self.spec.kind {
            RingKind::Mixed => self.base_size,
            RingKind::Equal => self.p,
        }
    }

    /// The defining polynomial of the residue extension, low degree first.
    pub fn defining_polynomial(&self) -> &[u64] {
        &self.defining
    }

    /// The residue field `F_q` of this ring.
    pub fn residue_field(&self) -> LocalRing {
        LocalRing::new(self.spec.residue(), DEFAULT_MAX_RING_BITS)
            .expect("residue field of a valid ring is valid")
    }

    pub fn zero(&self) -> RingElement {
        RingElement(0)
    }

    pub fn one(&self) -> RingElement {
        RingElement(1 % self.card.max(2))
    }

    /// The uniformizer `p` (mixed) or `t` (equal); zero when `m = 1`.
    pub fn uniformizer(&self) -> RingElement {
        if self.m == 1 {
            RingElement(0)
        } else {
            RingElement(self.p)
        }
    }

    pub fn from_i64(&self, v: i64) -> RingElement {
        let b = match self.spec.kind {
            RingKind::Mixed => (v as i128).rem_euclid(self.base_size as i128) as u64,
            RingKind::Equal => (v as i128).rem_euclid(self.p as i128) as u64,
        };
        RingElement(b)
    }

    pub fn from_bigint(&self, v: &BigInt) -> RingElement {
        let modulus = BigInt::from(match self.spec.kind {
            RingKind::Mixed => self.base_size,
            RingKind::Equal => self.p,
        });
        let r = v.mod_floor(&modulus);
        debug_assert!(!r.is_negative());
        RingElement(r.to_u64().expect("reduced value fits"))
    }

    // ----- base ring B = Z/p^m or F_p[t]/t^m -----

    #[inline]
    fn b_add(&self, a: u64, b: u64) -> u64 {
        match self.base {
            Base::SmallInt(n) | Base::WideInt(n) => {
                let s = a + b;
                if s >= n {
                    s - n
                } else {
                    s
                }
            }
            Base::Truncated => {
                if self.p == 2 {
                    return a ^ b;
                }
                let (mut a, mut b) = (a, b);
                let mut out = 0;
                for k in 0..self.m {
                    let d = (a % self.p + b % self.p) % self.p;
                    out += d * self.pow_p[k];
                    a /= self.p;
                    b /= self.p;
                }
                out
            }
        }
    }

    #[inline]
    fn b_neg(&self, a: u64) -> u64 {
        match self.base {
            Base::SmallInt(n) | Base::WideInt(n) => {
                if a == 0 {
                    0
                } else {
                    n - a
                }
            }
            Base::Truncated => {
                if self.p == 2 {
                    return a;
                }
                let mut a = a;
                let mut out = 0;
                for k in 0..self.m {
                    let d = (self.p - a % self.p) % self.p;
                    out += d * self.pow_p[k];
                    a /= self.p;
                }
                out
            }
        }
    }

    #[inline]
    fn b_mul(&self, a: u64, b: u64) -> u64 {
        match self.base {
            Base::SmallInt(n) => a * b % n,
            Base::WideInt(n) => ((a as u128 * b as u128) % n as u128) as u64,
            Base::Truncated => {
                let p = self.p;
                let m = self.m;
                let mut da = [0u64; 64];
                let mut db = [0u64; 64];
                let (mut x, mut y) = (a, b);
                for k in 0..m {
                    da[k] = x % p;
                    db[k] = y % p;
                    x /= p;
                    y /= p;
                }
                let mut out = 0;
                for k in 0..m {
                    let mut acc: u128 = 0;
                    for i in 0..=k {
                        acc += da[i] as u128 * db[k - i] as u128;
                    }
                    out += (acc % p as u128) as u64 * self.pow_p[k];
                }
                out
            }
        }
    }

    #[inline]
    fn coords(&self, x: RingElement) -> [u64; 64] {
        let mut c = [0u64; 64];
        let mut v = x.0;
        for ci in c.iter_mut().take(self.f) {
            *ci = v % self.base_size;
            v /= self.base_size;
        }
        c
    }

    #[inline]
    fn pack(&self, c: &[u64]) -> RingElement {
        let mut v = 0u64;
        for &ci in c[..self.f].iter().rev() {
            v = v * self.base_size + ci;
        }
        RingElement(v)
    }

    // ----- ring operations -----

    fn field_tables(&self) -> Option<&FieldTables> {
        self.tables
            .get_or_init(|| {
                let full = self.card <= FULL_TABLE_MAX;
                let logs = self.m == 1 && self.card <= LOG_TABLE_MAX;
                (!self.native && (full || logs)).then(|| Arc::new(self.build_tables()))
            })
            .as_deref()
    }

    fn build_tables(&self) -> FieldTables {
        let q = self.card;
        let neg = (0..q).map(|a| self.poly_neg(RingElement(a)).0 as u32).collect();
        if q <= FULL_TABLE_MAX {
            let table = |op: &dyn Fn(RingElement, RingElement) -> RingElement| {
                (0..q * q)
                    .map(|ab| op(RingElement(ab / q), RingElement(ab % q)).0 as u32)
                    .collect()
            };
            return FieldTables {
                q,
                add: table(&|a, b| self.poly_add(a, b)),
                mul: table(&|a, b| self.poly_mul(a, b)),
                log: Vec::new(),
                exp: Vec::new(),
                neg,
            };
        }
        let order = q - 1;
        let one = self.one();
        let factors = primes::factor(order);
        let raw_pow = |mut b: RingElement, mut e: u64| {
            let mut acc = one;
            while e > 0 {
                if e & 1 == 1 {
                    acc = self.poly_mul(acc, b);
                }
                b = self.poly_mul(b, b);
                e >>= 1;
            }
            acc
        };
        let g = (2..q)
            .map(RingElement)
            .find(|&g| factors.iter().all(|&(r, _)| raw_pow(g, order / r) != one))
            .expect("finite fields have primitive elements");
        let mut exp = Vec::with_capacity(2 * order as usize);
        let mut log = vec![0u32; q as usize];
        let mut x = one;
        for i in 0..order {
            exp.push(x.0 as u32);
            log[x.0 as usize] = i as u32;
            x = self.poly_mul(x, g);
        }
        exp.extend_from_within(..);
        FieldTables {
            q,
            add: Vec::new(),
            mul: Vec::new(),
            log,
            exp,
            neg,
        }
    }

    #[inline]
    pub fn add(&self, a: RingElement, b: RingElement) -> RingElement {
        if self.native {
            return RingElement(self.b_add(a.0, b.0));
        }
        if let Some(t) = self.field_tables() {
            if !t.add.is_empty() {
                return RingElement(t.add[(a.0 * t.q + b.0) as usize] as u64);
            }
        }
        self.poly_add(a, b)
    }

    fn poly_add(&self, a: RingElement, b: RingElement) -> RingElement {
        if self.f == 1 {
            return RingElement(self.b_add(a.0, b.0));
        }
        let (ca, cb) = (self.coords(a), self.coords(b));
        let mut c = [0u64; 64];
        for i in 0..self.f {
            c[i] = self.b_add(ca[i], cb[i]);
        }
        self.pack(&c)
    }

    #[inline]
    pub fn neg(&self, a: RingElement) -> RingElement {
        if self.native {
            return RingElement(self.b_neg(a.0));
        }
        if let Some(t) = self.field_tables() {
            return RingElement(t.neg[a.0 as usize] as u64);
        }
        self.poly_neg(a)
    }

    fn poly_neg(&self, a: RingElement) -> RingElement {
        if self.f == 1 {
            return RingElement(self.b_neg(a.0));
        }
        let ca = self.coords(a);
        let mut c = [0u64; 64];
        for i in 0..self.f {
            c[i] = self.b_neg(ca[i]);
        }
        self.pack(&c)
    }

    #[inline]
    pub fn sub(&self, a: RingElement, b: RingElement) -> RingElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: RingElement, b: RingElement) -> RingElement {
        if self.native {
            return RingElement(self.b_mul(a.0, b.0));
        }
        if let Some(t) = self.field_tables() {
            if !t.mul.is_empty() {
                return RingElement(t.mul[(a.0 * t.q + b.0) as usize] as u64);
            }
            if a.0 == 0 || b.0 == 0 {
                return RingElement(0);
            }
            let i = t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize;
            return RingElement(t.exp[i] as u64);
        }
        self.poly_mul(a, b)
    }

    fn poly_mul(&self, a: RingElement, b: RingElement) -> RingElement {
        if self.f == 1 {
            return RingElement(self.b_mul(a.0, b.0));
        }
        let (ca, cb) = (self.coords(a), self.coords(b));
        let f = self.f;
        let mut prod = [0u64; 128];
        for i in 0..f {
            if ca[i] == 0 {
                continue;
            }
            for j in 0..f {
                let t = self.b_mul(ca[i], cb[j]);
                prod[i + j] = self.b_add(prod[i + j], t);
            }
        }
        // reduce by the monic defining polynomial
        for k in (f..2 * f - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..f {
                let hi = self.defining[i];
                if hi != 0 {
                    let t = self.b_mul(c, hi % self.base_size);
                    prod[k - f + i] = self.b_add(prod[k - f + i], self.b_neg(t));
                }
            }
        }
        self.pack(&prod[..f])
    }

    pub fn pow(&self, a: RingElement, mut e: u64) -> RingElement {
        let mut acc = self.one();
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Image in the residue field `F_q` (as an element of
    /// [`LocalRing::residue_field`]).
    #[inline]
    pub fn residue(&self, x: RingElement) -> RingElement {
        self.digit(x, 0)
    }

    /// The `pi^k` digit of `x` as a residue-field element. For `x` divisible
    /// by `pi^k` this is the residue of `x / pi^k`.
    #[inline]
    pub fn digit(&self, x: RingElement, k: usize) -> RingElement {
        if self.f == 1 {
            return RingElement((x.0 / self.pow_p[k]) % self.p);
        }
        let c = self.coords(x);
        let mut v = 0u64;
        for i in (0..self.f).rev() {
            v = v * self.p + (c[i] / self.pow_p[k]) % self.p;
        }
        RingElement(v)
    }

    /// `pi^k * r~` where `r~` is the digit representative of the residue
    /// element `r`.
    #[inline]
    pub fn embed_digit(&self, r: RingElement, k: usize) -> RingElement {
        if k >= self.m {
            return self.zero();
        }
        if self.f == 1 {
            return RingElement(r.0 * self.pow_p[k]);
        }
        let mut c = [0u64; 64];
        let mut v = r.0;
        for ci in c.iter_mut().take(self.f) {
            *ci = (v % self.p) * self.pow_p[k];
            v /= self.p;
        }
        self.pack(&c)
    }

    #[inline]
    pub fn is_zero(&self, x: RingElement) -> bool {
        x.0 == 0
    }

    #[inline]
    pub fn is_unit(&self, x: RingElement) -> bool {
        self.residue(x).0 != 0
    }

    /// Valuation `v` with `x = pi^v * unit`; `m` for zero.
    pub fn valuation(&self, x: RingElement) -> usize {
        (0..self.m)
            .find(|&k| self.digit(x, k).0 != 0)
            .unwrap_or(self.m)
    }

    /// Inverse of a unit, by Newton iteration from the residue inverse.
    pub fn inv(&self, x: RingElement) -> Option<RingElement> {
        if !self.is_unit(x) {
            return None;
        }
        let r = self.residue(x);
        let field = if self.m == 1 { None } else { Some(self.residue_field()) };
        let field_ref = field.as_ref().unwrap_or(self);
        let r_inv = field_ref.field_inv(r)?;
        let mut y = self.embed_digit(r_inv, 0);
        let two = self.from_i64(2);
        let mut precision = 1;
        while precision < self.m {
            y = self.mul(y, self.sub(two, self.mul(x, y)));
            precision *= 2;
        }
        debug_assert_eq!(self.mul(x, y), self.one());
        Some(y)
    }

    /// Inverse in a field (`m = 1`).
    pub fn field_inv(&self, x: RingElement) -> Option<RingElement> {
        debug_assert_eq!(self.m, 1);
        if x.0 == 0 {
            return None;
        }
        if self.f == 1 {
            return primes::inv_mod(x.0, self.p).map(RingElement);
        }
        Some(self.pow(x, self.card - 2))
    }

    /// The `f m` coordinates over `Z/p`: for each `u`-power the base-`p`
    /// digits of its base coordinate, least significant first.
    pub fn coordinates(&self, x: RingElement) -> Vec<u64> {
        let c = self.coords(x);
        let mut out = Vec::with_capacity(self.f * self.m);
        for &ci in c.iter().take(self.f) {
            let mut v = ci;
            for _ in 0..self.m {
                out.push(v % self.p);
                v /= self.p;
            }
        }
        out
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = RingElement> {
        (0..self.card).map(RingElement)
    }

    /// Budgeted enumeration.
    pub fn enumerate(&self, budget: u64) -> Result<impl Iterator<Item = RingElement>> {
        if self.card > budget {
            return Err(Error::budget(format!(
                "ring {} has {} elements, budget {}",
                self.spec, self.card, budget
            )));
        }
        Ok(self.elements())
    }

    /// Additive generators: `u^i` (mixed) or `u^i t^j` (equal).
    pub fn additive_generators(&self) -> Vec<RingElement> {
        let field_one = RingElement(1);
        let mut out = Vec::new();
        let levels = match self.spec.kind {
            RingKind::Mixed => 1,
            RingKind::Equal => self.m,
        };
        for i in 0..self.f {
            for k in 0..levels {
                let r = RingElement(field_one.0 * self.p.pow(i as u32));
                out.push(self.embed_digit(r, k));
            }
        }
        out
    }
}

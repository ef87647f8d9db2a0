//! Finite groups, commutator words and representation zeta values.
//!
//! Groups are either congruence quotients `SL_d(R)` of a finite local ring,
//! built by closing the elementary matrices under multiplication, or small
//! groups given by a multiplication table. Elements are dense `u32` ids with
//! the identity at id 0.

mod dixon;

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{natural, rational};
use crate::par;
use crate::rings::{make_ring, LocalRingSpec, RingElement, RingHandle, RingKind};

pub use dixon::{character_degrees, CharDegrees};

/// Group sizes and pair counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupBudgets {
    /// Largest group that will be built.
    pub order: u64,
    /// Largest `|G|^2` for pair enumeration.
    pub pairs: u64,
}

impl Default for GroupBudgets {
    fn default() -> Self {
        GroupBudgets {
            order: 100_000,
            pairs: 100_000_000,
        }
    }
}

/// Multiplication tables are cached up to this order.
const TABLE_LIMIT: usize = 2048;

#[derive(Clone, Debug)]
enum Lookup {
    Dense(Vec<u32>),
    Sparse(HashMap<u128, u32>),
}

#[derive(Clone, Debug)]
struct MatrixData {
    ring: RingHandle,
    d: usize,
    /// Entries of element `i` at `entries[i*d*d..(i+1)*d*d]`, row-major.
    entries: Vec<RingElement>,
    lookup: Lookup,
    generators: Vec<u32>,
    /// For `Z/p^m` the element index is the residue itself, and products
    /// can use machine arithmetic.
    modulus: Option<u64>,
}

impl MatrixData {
    fn key(&self, m: &[RingElement]) -> u128 {
        let card = self.ring.cardinality() as u128;
        m.iter().rev().fold(0u128, |acc, e| acc * card + e.index() as u128)
    }

    fn find(&self, m: &[RingElement]) -> Option<u32> {
        let k = self.key(m);
        match &self.lookup {
            Lookup::Dense(v) => v.get(k as usize).copied().filter(|&i| i != u32::MAX),
            Lookup::Sparse(h) => h.get(&k).copied(),
        }
    }

    fn insert(&mut self, m: &[RingElement], id: u32) {
        let k = self.key(m);
        match &mut self.lookup {
            Lookup::Dense(v) => v[k as usize] = id,
            Lookup::Sparse(h) => {
                h.insert(k, id);
            }
        }
    }

    fn get(&self, i: u32) -> &[RingElement] {
        let s = self.d * self.d;
        &self.entries[i as usize * s..(i as usize + 1) * s]
    }

    fn product(&self, a: &[RingElement], b: &[RingElement], out: &mut [RingElement]) {
        let d = self.d;
        if let Some(n) = self.modulus {
            for i in 0..d {
                for j in 0..d {
                    let mut acc = 0u64;
                    for k in 0..d {
                        acc += a[i * d + k].index() * b[k * d + j].index() % n;
                    }
                    out[i * d + j] = RingElement::from_index(acc % n);
                }
            }
            return;
        }
        let r = &self.ring;
        for i in 0..d {
            for j in 0..d {
                let mut acc = r.zero();
                for k in 0..d {
                    acc = r.add(acc, r.mul(a[i * d + k], b[k * d + j]));
                }
                out[i * d + j] = acc;
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    inverse: Vec<u32>,
    table: Option<Vec<u32>>,
    matrices: Option<MatrixData>,
}

fn elementary(ring: &RingHandle, d: usize, i: usize, j: usize, g: RingElement) -> Vec<RingElement> {
    let mut m = vec![ring.zero(); d * d];
    for k in 0..d {
        m[k * d + k] = ring.one();
    }
    m[i * d + j] = g;
    m
}

/// `|SL_d(R)| = |R|^(d^2-1) prod_(i=2..d) (1 - q^-i)`, if it fits.
fn sl_order(ring: &RingHandle, d: usize) -> Option<u128> {
    let card = ring.cardinality() as u128;
    let q = ring.q() as u128;
    let mut n = card.checked_pow((d * d - 1) as u32)?;
    for i in 2..=d as u32 {
        let qi = q.checked_pow(i)?;
        n = n / qi * (qi - 1);
    }
    Some(n)
}

/// Determinant by cofactor expansion along the first row.
fn det(ring: &RingHandle, m: &[RingElement], d: usize) -> RingElement {
    if d == 1 {
        return m[0];
    }
    let mut acc = ring.zero();
    for c in 0..d {
        let minor = minor(m, d, 0, c);
        let t = ring.mul(m[c], det(ring, &minor, d - 1));
        acc = if c % 2 == 0 { ring.add(acc, t) } else { ring.sub(acc, t) };
    }
    acc
}

fn minor(m: &[RingElement], d: usize, row: usize, col: usize) -> Vec<RingElement> {
    let mut out = Vec::with_capacity((d - 1) * (d - 1));
    for i in (0..d).filter(|&i| i != row) {
        for j in (0..d).filter(|&j| j != col) {
            out.push(m[i * d + j]);
        }
    }
    out
}

/// Adjugate; the inverse of a determinant-one matrix.
fn adjugate(ring: &RingHandle, m: &[RingElement], d: usize) -> Vec<RingElement> {
    if d == 1 {
        return vec![ring.one()];
    }
    let mut out = vec![ring.zero(); d * d];
    for i in 0..d {
        for j in 0..d {
            let c = det(ring, &minor(m, d, j, i), d - 1);
            out[i * d + j] = if (i + j) % 2 == 0 { c } else { ring.neg(c) };
        }
    }
    out
}

impl FiniteGroup {
    /// `SL_d(R)`, generated by the elementary matrices `E_ij(g)` with `g`
    /// running over additive generators of `R`.
    pub fn special_linear(d: usize, ring: RingHandle, budget: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("matrix size must be positive"));
        }
        match sl_order(&ring, d) {
            Some(n) if n <= budget as u128 => {}
            _ => {
                return Err(Error::budget(format!(
                    "SL_{d}({}) exceeds the group budget {budget}",
                    ring.spec()
                )))
            }
        }
        let s = d * d;
        let card = ring.cardinality() as u128;
        let lookup = match card.checked_pow(s as u32) {
            Some(n) if n <= 1 << 24 => Lookup::Dense(vec![u32::MAX; n as usize]),
            _ => Lookup::Sparse(HashMap::new()),
        };
        let mut data = MatrixData {
            ring: ring.clone(),
            d,
            entries: Vec::new(),
            lookup,
            generators: Vec::new(),
            modulus: (ring.kind() == RingKind::Mixed && ring.f() == 1 && ring.cardinality() < 1 << 31)
                .then(|| ring.cardinality()),
        };
        let identity = elementary(&ring, d, 0, 0, ring.one());
        data.entries.extend_from_slice(&identity);
        data.insert(&identity, 0);
        let mut gens: Vec<Vec<RingElement>> = Vec::new();
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    for &g in &ring.additive_generators() {
                        gens.push(elementary(&ring, d, i, j, g));
                    }
                }
            }
        }
        // breadth-first closure under right multiplication by generators
        let mut count = 1usize;
        let mut head = 0usize;
        let mut buf = vec![ring.zero(); s];
        while head < count {
            for g in &gens {
                let cur = data.get(head as u32).to_vec();
                data.product(&cur, g, &mut buf);
                if data.find(&buf).is_none() {
                    data.entries.extend_from_slice(&buf);
                    data.insert(&buf, count as u32);
                    count += 1;
                }
            }
            head += 1;
        }
        data.generators = gens
            .iter()
            .map(|g| data.find(g).expect("generators are elements"))
            .collect();
        let inverse = (0..count as u32)
            .map(|i| {
                let adj = adjugate(&ring, data.get(i), d);
                data.find(&adj).expect("closed under inverses")
            })
            .collect();
        let mut group = FiniteGroup {
            name: format!("SL_{d}({})", ring.spec()),
            order: count,
            inverse,
            table: None,
            matrices: Some(data),
        };
        group.cache_table();
        Ok(group)
    }

    /// Builds `SL_d` over the ring described by `spec`.
    pub fn special_linear_over(d: usize, spec: LocalRingSpec, budget: u64) -> Result<Self> {
        Self::special_linear(d, make_ring(spec)?, budget)
    }

    /// A group from its multiplication table, `table[a][b] = a * b`.
    /// Elements are relabelled so that the identity has id 0.
    pub fn from_table(name: impl Into<String>, table: &[Vec<u32>]) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::invalid("empty group table"));
        }
        if table.iter().any(|row| row.len() != n || row.iter().any(|&x| x as usize >= n)) {
            return Err(Error::invalid("group table must be n rows of n entries below n"));
        }
        let e = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] as usize == a && table[a][e] as usize == a))
            .ok_or_else(|| Error::invalid("group table has no identity"))?;
        // swap e and 0
        let relabel = |x: usize| -> usize {
            if x == e {
                0
            } else if x == 0 {
                e
            } else {
                x
            }
        };
        let mut flat = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                flat[relabel(a) * n + relabel(b)] = relabel(table[a][b] as usize) as u32;
            }
        }
        for a in 0..n {
            let mut seen = vec![false; n];
            for b in 0..n {
                let x = flat[a * n + b] as usize;
                if seen[x] {
                    return Err(Error::invalid("group table is not a Latin square"));
                }
                seen[x] = true;
            }
        }
        if (n as u64).pow(3) <= 100_000_000 {
            for a in 0..n {
                for b in 0..n {
                    let ab = flat[a * n + b] as usize;
                    for c in 0..n {
                        let bc = flat[b * n + c] as usize;
                        if flat[ab * n + c] != flat[a * n + bc] {
                            return Err(Error::invalid("group table is not associative"));
                        }
                    }
                }
            }
        }
        let inverse = (0..n)
            .map(|a| (0..n as u32).find(|&b| flat[a * n + b as usize] == 0).expect("Latin square"))
            .collect();
        Ok(FiniteGroup {
            name: name.into(),
            order: n,
            inverse,
            table: Some(flat),
            matrices: None,
        })
    }

    /// Parses `order n` followed by `n` lines of `n` element indices.
    pub fn parse_table(name: impl Into<String>, text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let parse_err = |line: usize, message: String| Error::Parse {
            line,
            column: 1,
            message,
        };
        let (line, header) = lines.next().ok_or_else(|| parse_err(1, "empty group file".into()))?;
        let n: usize = header
            .strip_prefix("order")
            .and_then(|r| r.trim().parse().ok())
            .ok_or_else(|| parse_err(line, format!("expected `order n`, found {header:?}")))?;
        let mut table = Vec::with_capacity(n);
        for (line, l) in lines {
            let row: std::result::Result<Vec<u32>, _> = l.split_whitespace().map(str::parse).collect();
            let row = row.map_err(|_| parse_err(line, "non-integer table entry".into()))?;
            if row.len() != n {
                return Err(parse_err(line, format!("expected {n} entries, found {}", row.len())));
            }
            table.push(row);
        }
        if table.len() != n {
            return Err(Error::invalid(format!("expected {n} table rows, found {}", table.len())));
        }
        Self::from_table(name, &table)
    }

    /// The symmetric group on `n <= 6` letters.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 || n > 6 {
            return Err(Error::invalid("symmetric groups are built for 1 <= n <= 6"));
        }
        let mut perms: Vec<Vec<usize>> = vec![(0..n).collect()];
        // lexicographic enumeration
        loop {
            let mut p = perms.last().expect("nonempty").clone();
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("exists");
            p.swap(i, j);
            p[i + 1..].reverse();
            perms.push(p);
        }
        let index: HashMap<Vec<usize>, u32> = perms.iter().enumerate().map(|(i, p)| (p.clone(), i as u32)).collect();
        let table: Vec<Vec<u32>> = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| index[&(0..n).map(|k| a[b[k]]).collect::<Vec<_>>()])
                    .collect()
            })
            .collect();
        Self::from_table(format!("S_{n}"), &table)
    }

    /// The quaternion group of order 8.
    pub fn quaternion() -> Self {
        // element (s, u): s in {+1,-1} as 0/1, u in {1,i,j,k} as 0..3
        let unit_mul = |a: usize, b: usize| -> (usize, usize) {
            match (a, b) {
                (0, x) | (x, 0) => (0, x),
                (x, y) if x == y => (1, 0),
                (1, 2) => (0, 3),
                (2, 1) => (1, 3),
                (2, 3) => (0, 1),
                (3, 2) => (1, 1),
                (3, 1) => (0, 2),
                (1, 3) => (1, 2),
                _ => unreachable!(),
            }
        };
        let table: Vec<Vec<u32>> = (0..8)
            .map(|a| {
                (0..8)
                    .map(|b| {
                        let (s, u) = unit_mul(a % 4, b % 4);
                        let sign = (a / 4 + b / 4 + s) % 2;
                        (sign * 4 + u) as u32
                    })
                    .collect()
            })
            .collect();
        Self::from_table("Q_8", &table).expect("quaternion table is a group")
    }

    fn cache_table(&mut self) {
        if self.table.is_some() || self.order > TABLE_LIMIT {
            return;
        }
        let n = self.order as u32;
        let rows: Vec<u32> = (0..n).collect();
        let table: Vec<Vec<u32>> = par::map_collect(&rows, |&a| (0..n).map(|b| self.mul(a, b)).collect());
        self.table = Some(table.concat());
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> u32 {
        0
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if let Some(t) = &self.table {
            return t[a as usize * self.order + b as usize];
        }
        let m = self.matrices.as_ref().expect("matrix or table backend");
        let mut buf = [RingElement::default(); 16];
        let s = m.d * m.d;
        if s <= 16 {
            m.product(m.get(a), m.get(b), &mut buf[..s]);
            m.find(&buf[..s]).expect("closed under products")
        } else {
            let mut v = vec![RingElement::default(); s];
            m.product(m.get(a), m.get(b), &mut v);
            m.find(&v).expect("closed under products")
        }
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    /// `[x, y] = x y x^-1 y^-1`.
    #[inline]
    pub fn commutator(&self, x: u32, y: u32) -> u32 {
        match (&self.table, &self.matrices) {
            (None, Some(m)) if m.d * m.d <= 16 => {
                // one lookup instead of three
                let s = m.d * m.d;
                let mut xy = [RingElement::default(); 16];
                let mut inv = [RingElement::default(); 16];
                let mut out = [RingElement::default(); 16];
                m.product(m.get(x), m.get(y), &mut xy[..s]);
                m.product(m.get(self.inv(x)), m.get(self.inv(y)), &mut inv[..s]);
                m.product(&xy[..s], &inv[..s], &mut out[..s]);
                m.find(&out[..s]).expect("closed under products")
            }
            _ => self.mul(self.mul(x, y), self.mul(self.inv(x), self.inv(y))),
        }
    }

    pub fn element_order(&self, a: u32) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Elements whose conjugates generate the conjugation action: the
    /// matrix generators, or every element for table groups.
    fn conjugators(&self) -> Vec<u32> {
        match &self.matrices {
            Some(m) => m.generators.clone(),
            None => (0..self.order as u32).collect(),
        }
    }

    /// Entries of a matrix element, for display.
    pub fn matrix(&self, a: u32) -> Option<Vec<u64>> {
        self.matrices
            .as_ref()
            .map(|m| m.get(a).iter().map(|e| e.index()).collect())
    }
}

/// Partition of a group into conjugacy classes. Class 0 is the identity;
/// classes are numbered by their smallest element id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjClasses {
    pub class_of: Vec<u32>,
    pub reps: Vec<u32>,
    pub sizes: Vec<u64>,
}

impl ConjClasses {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Class of inverses, per class.
    pub fn inverse_classes(&self, g: &FiniteGroup) -> Vec<u32> {
        self.reps.iter().map(|&r| self.class_of[g.inv(r) as usize]).collect()
    }
}

pub fn conj_classes(g: &FiniteGroup) -> ConjClasses {
    let n = g.order();
    let conj = g.conjugators();
    let conj_inv: Vec<u32> = conj.iter().map(|&c| g.inv(c)).collect();
    let mut class_of = vec![u32::MAX; n];
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    let mut queue = Vec::new();
    for start in 0..n as u32 {
        if class_of[start as usize] != u32::MAX {
            continue;
        }
        let c = reps.len() as u32;
        reps.push(start);
        class_of[start as usize] = c;
        queue.clear();
        queue.push(start);
        let mut size = 0u64;
        while let Some(x) = queue.pop() {
            size += 1;
            for (&h, &hi) in conj.iter().zip(&conj_inv) {
                let y = g.mul(g.mul(h, x), hi);
                if class_of[y as usize] == u32::MAX {
                    class_of[y as usize] = c;
                    queue.push(y);
                }
            }
        }
        sizes.push(size);
    }
    ConjClasses {
        class_of,
        reps,
        sizes,
    }
}

/// A class function, by its value at each class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFunction {
    #[serde(with = "crate::exact::natural_vec")]
    pub values: Vec<BigUint>,
}

impl ClassFunction {
    pub fn at(&self, classes: &ConjClasses, g: u32) -> &BigUint {
        &self.values[classes.class_of[g as usize] as usize]
    }

    /// `sum_g f(g)`.
    pub fn mass(&self, classes: &ConjClasses) -> BigUint {
        self.values
            .iter()
            .zip(&classes.sizes)
            .map(|(v, &s)| v * s)
            .sum()
    }

    /// The indicator of the identity, scaled by `c`.
    pub fn delta(classes: &ConjClasses, c: BigUint) -> Self {
        let mut values = vec![BigUint::zero(); classes.len()];
        values[0] = c;
        ClassFunction { values }
    }
}

fn check_pairs(pairs: u128, budgets: &GroupBudgets) -> Result<()> {
    if pairs > budgets.pairs as u128 {
        return Err(Error::budget(format!(
            "{pairs} pairs exceed the pair budget {}",
            budgets.pairs
        )));
    }
    Ok(())
}

fn class_totals_to_function(totals: &[u64], classes: &ConjClasses) -> ClassFunction {
    let values = totals
        .iter()
        .zip(&classes.sizes)
        .map(|(&t, &s)| {
            debug_assert_eq!(t % s, 0);
            BigUint::from(t / s)
        })
        .collect();
    ClassFunction { values }
}

fn add_vectors(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// `M(g) = #{(x, y) : [x, y] = g}`.
///
/// Conjugating a pair conjugates its commutator, so it suffices to
/// enumerate the pairs `(x, y)` with `x` a class representative and weight
/// them by the class size. The budget bounds the `#classes * |G|` pairs
/// actually visited.
pub fn commutator_distribution(g: &FiniteGroup, classes: &ConjClasses, budgets: &GroupBudgets) -> Result<ClassFunction> {
    let n = g.order() as u32;
    check_pairs(classes.len() as u128 * n as u128, budgets)?;
    let r = classes.len();
    let totals = par::map_reduce(
        r,
        vec![0u64; r],
        |c| {
            let x = classes.reps[c];
            let mut local = vec![0u64; r];
            for y in 0..n {
                local[classes.class_of[g.commutator(x, y) as usize] as usize] += 1;
            }
            for v in local.iter_mut() {
                *v *= classes.sizes[c];
            }
            local
        },
        add_vectors,
    );
    Ok(class_totals_to_function(&totals, classes))
}

/// The same distribution by visiting all `|G|^2` pairs.
pub fn commutator_distribution_exhaustive(
    g: &FiniteGroup,
    classes: &ConjClasses,
    budgets: &GroupBudgets,
) -> Result<ClassFunction> {
    let n = g.order() as u32;
    check_pairs(n as u128 * n as u128, budgets)?;
    let r = classes.len();
    let totals = par::map_reduce(
        n as usize,
        vec![0u64; r],
        |x| {
            let mut local = vec![0u64; r];
            for y in 0..n {
                local[classes.class_of[g.commutator(x as u32, y) as usize] as usize] += 1;
            }
            local
        },
        add_vectors,
    );
    Ok(class_totals_to_function(&totals, classes))
}

/// `(f1 * f2)(z) = sum_h f1(h) f2(h^-1 z)`, evaluated at class
/// representatives.
pub fn word_convolve(g: &FiniteGroup, classes: &ConjClasses, f1: &ClassFunction, f2: &ClassFunction) -> ClassFunction {
    let values = par::map_collect(&classes.reps, |&z| {
        let mut acc = BigUint::zero();
        for h in 0..g.order() as u32 {
            let a = f1.at(classes, h);
            if a.is_zero() {
                continue;
            }
            let b = f2.at(classes, g.mul(g.inv(h), z));
            if !b.is_zero() {
                acc += a * b;
            }
        }
        acc
    });
    ClassFunction { values }
}

/// `M_n`: the distribution of `[x_1, y_1] ... [x_n, y_n]`.
pub fn word_distribution(g: &FiniteGroup, classes: &ConjClasses, m: &ClassFunction, n: usize) -> Result<ClassFunction> {
    if n == 0 {
        return Err(Error::invalid("genus must be at least 1"));
    }
    let mut acc = m.clone();
    for _ in 1..n {
        acc = word_convolve(g, classes, &acc, m);
    }
    Ok(acc)
}

/// `#{(g_i, h_i) : [g_1, h_1] ... [g_n, h_n] = 1}`.
pub fn def_count(g: &FiniteGroup, classes: &ConjClasses, m: &ClassFunction, n: usize) -> Result<BigUint> {
    Ok(word_distribution(g, classes, m, n)?.values[0].clone())
}

/// `def_count / |G|^(2n-1)`, which equals `sum_pi dim(pi)^(2-2n)`.
pub fn frobenius_zeta(order: usize, def_count: &BigUint, n: usize) -> BigRational {
    let denom = num_traits::pow(BigInt::from(order), 2 * n - 1);
    BigRational::new(BigInt::from(def_count.clone()), denom)
}

/// `sum_i d_i^-s` for integer `s`.
pub fn rep_zeta_eval(degrees: &[u64], s: i64) -> BigRational {
    degrees
        .iter()
        .map(|&d| {
            let d = BigRational::from_integer(BigInt::from(d));
            if s >= 0 {
                num_traits::pow(d, s as usize).recip()
            } else {
                num_traits::pow(d, (-s) as usize)
            }
        })
        .fold(BigRational::zero(), |a, b| a + b)
}

/// `sum_i d_i^-s` for real `s`.
pub fn rep_zeta_eval_f64(degrees: &[u64], s: f64) -> f64 {
    degrees.iter().map(|&d| (d as f64).powf(-s)).sum()
}

/// Number of irreducible representations of dimension `n`.
pub fn r_n(degrees: &[u64], n: u64) -> usize {
    degrees.iter().filter(|&&d| d == n).count()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordProb {
    pub class: usize,
    pub representative: u32,
    pub class_size: u64,
    #[serde(with = "natural")]
    pub count: BigUint,
    /// `M_n(g) / |G|^(2n)`.
    #[serde(with = "rational")]
    pub probability: BigRational,
    /// `probability * |G|`, the constant compared against 1.
    #[serde(with = "rational")]
    pub ratio: BigRational,
}

/// Probability that `[x_1, y_1] ... [x_n, y_n]` equals a given element of
/// each class, for uniform independent `x_i, y_i`.
pub fn word_prob(g: &FiniteGroup, classes: &ConjClasses, m: &ClassFunction, n: usize) -> Result<Vec<WordProb>> {
    let mn = word_distribution(g, classes, m, n)?;
    let order = BigInt::from(g.order());
    let total = num_traits::pow(order.clone(), 2 * n);
    Ok(mn
        .values
        .iter()
        .enumerate()
        .map(|(c, v)| {
            let probability = BigRational::new(BigInt::from(v.clone()), total.clone());
            WordProb {
                class: c,
                representative: classes.reps[c],
                class_size: classes.sizes[c],
                count: v.clone(),
                ratio: &probability * BigRational::from_integer(order.clone()),
                probability,
            }
        })
        .collect())
}

/// One row of the compact zeta table: `zeta_G(2n-2)` for `G = SL_d(Z/p^m)`
/// computed from commutator counts and from character degrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaRow {
    pub group_type: String,
    pub p: u64,
    pub m: u32,
    pub n: usize,
    pub order: usize,
    pub classes: usize,
    #[serde(with = "rational")]
    pub zeta_frobenius: BigRational,
    #[serde(with = "rational")]
    pub zeta_characters: BigRational,
    pub agree: bool,
    /// `q (zeta - 1)` with `q` the residue field size.
    #[serde(with = "rational")]
    pub q_times_zeta_minus_1: BigRational,
}

/// Everything computed about one finite group.
pub struct GroupData {
    pub group: FiniteGroup,
    pub classes: ConjClasses,
    pub commutators: ClassFunction,
}

impl GroupData {
    pub fn new(group: FiniteGroup, budgets: &GroupBudgets) -> Result<Self> {
        let classes = conj_classes(&group);
        let commutators = commutator_distribution(&group, &classes, budgets)?;
        Ok(GroupData {
            group,
            classes,
            commutators,
        })
    }

    pub fn sl(d: usize, spec: LocalRingSpec, budgets: &GroupBudgets) -> Result<Self> {
        Self::new(FiniteGroup::special_linear_over(d, spec, budgets.order)?, budgets)
    }

    pub fn def_count(&self, n: usize) -> Result<BigUint> {
        def_count(&self.group, &self.classes, &self.commutators, n)
    }

    pub fn frobenius_zeta(&self, n: usize) -> Result<BigRational> {
        Ok(frobenius_zeta(self.group.order(), &self.def_count(n)?, n))
    }
}

pub fn compact_zeta_table(d: usize, p: u64, m_list: &[u32], n: usize, budgets: &GroupBudgets) -> Result<Vec<ZetaRow>> {
    if n == 0 {
        return Err(Error::invalid("genus must be at least 1"));
    }
    let mut rows = Vec::new();
    for &m in m_list {
        let spec = LocalRingSpec::mixed(p, 1, m)?;
        let data = GroupData::sl(d, spec, budgets)?;
        let zf = data.frobenius_zeta(n)?;
        let degrees = character_degrees(&data.group, &data.classes)?;
        let zc = rep_zeta_eval(&degrees.degrees, 2 * n as i64 - 2);
        let q = BigRational::from_integer(BigInt::from(spec.q.q()));
        rows.push(ZetaRow {
            group_type: format!("SL{d}"),
            p,
            m,
            n,
            order: data.group.order(),
            classes: data.classes.len(),
            agree: zf == zc,
            q_times_zeta_minus_1: q * (&zf - BigRational::one()),
            zeta_frobenius: zf,
            zeta_characters: zc,
        });
    }
    Ok(rows)
}

/// CSV with columns `type,p,m,n,zeta_num,zeta_den,q_times_zeta_minus_1`.
pub fn zeta_table_csv(rows: &[ZetaRow]) -> String {
    let mut out = String::from("type,p,m,n,zeta_num,zeta_den,q_times_zeta_minus_1\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.group_type,
            r.p,
            r.m,
            r.n,
            r.zeta_frobenius.numer(),
            r.zeta_frobenius.denom(),
            crate::exact::format_rational(&r.q_times_zeta_minus_1)
        );
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdelicProduct {
    pub n: usize,
    pub m: u32,
    pub p_max: u64,
    pub value: f64,
    pub primes: Vec<u64>,
    #[serde(with = "crate::exact::rational_vec")]
    pub factors: Vec<BigRational>,
    pub note: String,
}

/// `prod_(p <= p_max) zeta_(SL_d(Z/p^m))(2n - 2)` in floating point, from
/// exact local factors.
pub fn adelic_product(d: usize, n: usize, p_max: u64, m: u32, budgets: &GroupBudgets) -> Result<AdelicProduct> {
    let primes = if p_max < 2 { Vec::new() } else { crate::rings::primes::primes_up_to(p_max) };
    let mut factors = Vec::new();
    for &p in &primes {
        let data = GroupData::sl(d, LocalRingSpec::mixed(p, 1, m)?, budgets)?;
        factors.push(data.frobenius_zeta(n)?);
    }
    let value = factors.iter().map(|f| f.to_f64().unwrap_or(f64::NAN)).product();
    Ok(AdelicProduct {
        n,
        m,
        p_max,
        value,
        primes,
        factors,
        note: format!(
            "finite-level surrogate: level m = {m} at every prime, primes above {p_max} omitted; each factor is at least 1"
        ),
    })
}

/// The genus threshold `C(G)` by root system type: 12 for A, B, D; 21 for
/// C; `ceil(3 (dim + 1) / 2)` for exceptional types, which needs `dim`.
pub fn rs_threshold(root_type: &str, dim: Option<u64>) -> Result<u64> {
    let t = root_type.trim().to_ascii_uppercase();
    match t.chars().next() {
        Some('A' | 'B' | 'D') => Ok(12),
        Some('C') => Ok(21),
        Some('E' | 'F' | 'G') => {
            let dim = dim.ok_or_else(|| Error::invalid(format!("type {t} needs the dimension of its Lie algebra")))?;
            Ok((3 * (dim + 1)).div_ceil(2))
        }
        _ => Err(Error::invalid(format!("unknown root system type {root_type:?}"))),
    }
}

//! Multivariate polynomials with arbitrary-precision integer coefficients.

mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rings::{LocalRing, RingElement};

pub use parse::{parse_poly, parse_system};

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

pub type Vars = Arc<[String]>;

pub fn vars_from<S: AsRef<str>>(names: &[S]) -> Vars {
    names.iter().map(|s| s.as_ref().to_string()).collect()
}

/// A polynomial in a fixed variable list. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    vars: Vars,
    terms: BTreeMap<Monomial, BigInt>,
}

impl IntPoly {
    pub fn zero(vars: Vars) -> Self {
        IntPoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: Vars, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(vars);
        let n = p.vars.len();
        p.add_term(Monomial::one(n), c.into());
        p
    }

    pub fn var(vars: Vars, index: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[index] = 1;
        let mut p = Self::zero(vars);
        p.add_term(Monomial(e), BigInt::one());
        p
    }

    pub fn from_terms(vars: Vars, terms: impl IntoIterator<Item = (Vec<u32>, BigInt)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.vars.len(), "exponent arity");
            p.add_term(Monomial(e), c);
        }
        p
    }

    fn add_term(&mut self, mono: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Largest exponent of variable `i`.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0)
    }

    /// Indices of variables that occur.
    pub fn support(&self) -> Vec<usize> {
        (0..self.nvars())
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .collect()
    }

    /// The constant term.
    pub fn constant_term(&self) -> BigInt {
        self.terms
            .get(&Monomial::one(self.nvars()))
            .cloned()
            .unwrap_or_default()
    }

    fn check_same(&self, other: &IntPoly) {
        assert!(
            Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars,
            "polynomials over different variable lists"
        );
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        self.check_same(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        self.check_same(other);
        let mut out = IntPoly::zero(self.vars.clone());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        let mut out = IntPoly::zero(self.vars.clone());
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> IntPoly {
        let mut acc = IntPoly::constant(self.vars.clone(), 1);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Formal partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> IntPoly {
        let mut out = IntPoly::zero(self.vars.clone());
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            out.add_term(m2, c * BigInt::from(e));
        }
        out
    }

    /// Re-expresses the polynomial over `new_vars`, sending variable `i` to
    /// `new_vars[map[i]]`.
    pub fn relabel(&self, new_vars: Vars, map: &[usize]) -> IntPoly {
        assert_eq!(map.len(), self.nvars());
        let mut out = IntPoly::zero(new_vars);
        let n = out.nvars();
        for (m, c) in &self.terms {
            let mut e = vec![0; n];
            for (i, &k) in m.0.iter().enumerate() {
                e[map[i]] += k;
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Substitutes polynomials (over a common variable list) for every
    /// variable.
    pub fn substitute(&self, values: &[IntPoly]) -> IntPoly {
        assert_eq!(values.len(), self.nvars());
        let target = values
            .first()
            .map(|v| v.vars.clone())
            .unwrap_or_else(|| self.vars.clone());
        let mut out = IntPoly::zero(target.clone());
        for (m, c) in &self.terms {
            let mut t = IntPoly::constant(target.clone(), c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&values[i].pow(e));
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Evaluates at integer values.
    pub fn eval_int(&self, point: &[BigInt]) -> BigInt {
        assert_eq!(point.len(), self.nvars());
        let mut acc = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(point[i].clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Exact image of the polynomial at `point` in `ring`.
    pub fn eval(&self, ring: &LocalRing, point: &[RingElement]) -> Result<RingElement> {
        if point.len() != self.nvars() {
            return Err(Error::invalid(format!(
                "point has {} coordinates, polynomial has {} variables",
                point.len(),
                self.nvars()
            )));
        }
        Ok(CompiledPoly::new(self, ring).eval(ring, point))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars[i].clone()),
                    _ => factors.push(format!("{}^{}", self.vars[i], e)),
                }
            }
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                f.write_str(&factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// An ordered list of polynomials over shared variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolySystem {
    vars: Vars,
    polys: Vec<IntPoly>,
}

impl PolySystem {
    pub fn new(vars: Vars, polys: Vec<IntPoly>) -> Result<Self> {
        for p in &polys {
            if p.vars != vars {
                return Err(Error::invalid("polynomial over a different variable list"));
            }
        }
        Ok(PolySystem { vars, polys })
    }

    pub fn empty(vars: Vars) -> Self {
        PolySystem {
            vars,
            polys: Vec::new(),
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn polys(&self) -> &[IntPoly] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// Jacobian matrix: entry `(i, j)` is `d f_i / d x_j`.
    pub fn jacobian(&self) -> Vec<Vec<IntPoly>> {
        self.polys
            .iter()
            .map(|p| (0..self.nvars()).map(|j| p.derivative(j)).collect())
            .collect()
    }

    /// Jet expansion of order `m`.
    ///
    /// Substitutes `x = x_0 + x_1 t + ... + x_m t^m` for every variable,
    /// truncates modulo `t^(m+1)` and returns the coefficients of
    /// `t^0, ..., t^m`. Variables are ordered level by level
    /// (`x_0, y_0, ..., x_1, y_1, ...`) and so are the output polynomials:
    /// the first `len()` of them are the original system renamed.
    pub fn jet_expand(&self, m: usize) -> PolySystem {
        let n = self.nvars();
        let names: Vec<String> = (0..=m)
            .flat_map(|j| self.vars.iter().map(move |v| format!("{v}_{j}")))
            .collect();
        let jet_vars: Vars = names.into();
        let jet_var = |i: usize, j: usize| IntPoly::var(jet_vars.clone(), j * n + i);
        // truncated series of each original variable
        let series: Vec<Vec<IntPoly>> = (0..n)
            .map(|i| (0..=m).map(|j| jet_var(i, j)).collect())
            .collect();
        let zero_series = || vec![IntPoly::zero(jet_vars.clone()); m + 1];
        let series_mul = |a: &[IntPoly], b: &[IntPoly]| {
            let mut out = zero_series();
            for (i, ai) in a.iter().enumerate() {
                if ai.is_zero() {
                    continue;
                }
                for (j, bj) in b.iter().enumerate().take(m + 1 - i) {
                    if !bj.is_zero() {
                        out[i + j] = out[i + j].add(&ai.mul(bj));
                    }
                }
            }
            out
        };
        let mut power_cache: BTreeMap<(usize, u32), Vec<IntPoly>> = BTreeMap::new();
        let mut power = |i: usize, e: u32| -> Vec<IntPoly> {
            if let Some(s) = power_cache.get(&(i, e)) {
                return s.clone();
            }
            let mut acc = zero_series();
            acc[0] = IntPoly::constant(jet_vars.clone(), 1);
            for _ in 0..e {
                acc = series_mul(&acc, &series[i]);
            }
            power_cache.insert((i, e), acc.clone());
            acc
        };
        let mut by_level: Vec<Vec<IntPoly>> = vec![Vec::new(); m + 1];
        for f in &self.polys {
            let mut acc = zero_series();
            for (mono, c) in f.terms() {
                let mut t = zero_series();
                t[0] = IntPoly::constant(jet_vars.clone(), c.clone());
                for (i, &e) in mono.0.iter().enumerate() {
                    if e > 0 {
                        t = series_mul(&t, &power(i, e));
                    }
                }
                for j in 0..=m {
                    acc[j] = acc[j].add(&t[j]);
                }
            }
            for (j, cj) in acc.into_iter().enumerate() {
                by_level[j].push(cj);
            }
        }
        PolySystem {
            vars: jet_vars,
            polys: by_level.into_iter().flatten().collect(),
        }
    }

    /// Compiles the system for repeated evaluation over `ring`.
    pub fn compile(&self, ring: &LocalRing) -> CompiledSystem {
        CompiledSystem {
            polys: self.polys.iter().map(|p| CompiledPoly::new(p, ring)).collect(),
        }
    }
}

impl fmt::Display for PolySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.polys.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Determinant of a square matrix of polynomials by cofactor expansion.
pub fn determinant(matrix: &[Vec<IntPoly>], vars: &Vars) -> IntPoly {
    let n = matrix.len();
    if n == 0 {
        return IntPoly::constant(vars.clone(), 1);
    }
    if n == 1 {
        return matrix[0][0].clone();
    }
    let mut acc = IntPoly::zero(vars.clone());
    for col in 0..n {
        if matrix[0][col].is_zero() {
            continue;
        }
        let minor: Vec<Vec<IntPoly>> = matrix[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != col)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let term = matrix[0][col].mul(&determinant(&minor, vars));
        acc = if col % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// A polynomial with coefficients reduced into a ring, for fast evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(RingElement, Vec<(usize, u32)>)>,
    support: Vec<usize>,
}

impl CompiledPoly {
    pub fn new(p: &IntPoly, ring: &LocalRing) -> Self {
        let terms = p
            .terms()
            .filter_map(|(m, c)| {
                let c = ring.from_bigint(c);
                if ring.is_zero(c) {
                    return None;
                }
                let factors = m
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i, e))
                    .collect();
                Some((c, factors))
            })
            .collect();
        CompiledPoly {
            terms,
            support: p.support(),
        }
    }

    /// Variables occurring in the source polynomial.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    #[inline]
    pub fn eval(&self, ring: &LocalRing, point: &[RingElement]) -> RingElement {
        let mut acc = ring.zero();
        for (c, factors) in &self.terms {
            let mut t = *c;
            for &(i, e) in factors {
                let x = point[i];
                t = match e {
                    1 => ring.mul(t, x),
                    2 => ring.mul(t, ring.mul(x, x)),
                    _ => ring.mul(t, ring.pow(x, e as u64)),
                };
            }
            acc = ring.add(acc, t);
        }
        acc
    }
}

#[derive(Clone, Debug)]
pub struct CompiledSystem {
    pub polys: Vec<CompiledPoly>,
}

impl CompiledSystem {
    #[inline]
    pub fn is_zero_at(&self, ring: &LocalRing, point: &[RingElement]) -> bool {
        self.polys
            .iter()
            .all(|p| ring.is_zero(p.eval(ring, point)))
    }

    pub fn eval(&self, ring: &LocalRing, point: &[RingElement]) -> Vec<RingElement> {
        self.polys.iter().map(|p| p.eval(ring, point)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::make_ring;

    fn sys(vars: &[&str], polys: &[&str]) -> PolySystem {
        parse_system(&vars_from(vars), polys).unwrap()
    }

    #[test]
    fn eval_examples() {
        let z9 = make_ring("mixed:3^1:2".parse().unwrap()).unwrap();
        let s = sys(&["x", "y", "z"], &["x*y - z^2"]);
        let p = &s.polys()[0];
        let e = |v: &[i64]| {
            let pt: Vec<_> = v.iter().map(|&x| z9.from_i64(x)).collect();
            p.eval(&z9, &pt).unwrap().index()
        };
        assert_eq!(e(&[1, 1, 1]), 0);
        assert_eq!(e(&[2, 2, 1]), 3);
        assert!(p.eval(&z9, &[z9.one()]).is_err());

        let r = make_ring("equal:3^1:2".parse().unwrap()).unwrap();
        let cusp = sys(&["x", "y"], &["y^2 - x^3"]);
        let t = r.uniformizer();
        assert_eq!(cusp.polys()[0].eval(&r, &[t, r.zero()]).unwrap(), r.zero());
    }

    #[test]
    fn jacobian_examples() {
        let s = sys(&["x", "y", "z"], &["x*y - z^2"]);
        let j: Vec<String> = s.jacobian()[0].iter().map(|p| p.to_string()).collect();
        assert_eq!(j, vec!["y", "x", "-2*z"]);
        let a1 = sys(&["x"], &["x"]);
        assert_eq!(a1.jacobian()[0][0].to_string(), "1");
        let cusp = sys(&["x", "y"], &["y^2 - x^3"]);
        let j: Vec<String> = cusp.jacobian()[0].iter().map(|p| p.to_string()).collect();
        assert_eq!(j, vec!["-3*x^2", "2*y"]);
    }

    #[test]
    fn jet_expand_examples() {
        let cone = sys(&["x", "y", "z"], &["x*y - z^2"]);
        let j = cone.jet_expand(1);
        assert_eq!(j.nvars(), 6);
        let strs: Vec<String> = j.polys().iter().map(|p| p.to_string()).collect();
        assert_eq!(strs[0], "x_0*y_0 - z_0^2");
        let expected = parse_poly(j.vars(), "x_0*y_1 + x_1*y_0 - 2*z_0*z_1").unwrap();
        assert_eq!(j.polys()[1], expected);

        let cusp = sys(&["x", "y"], &["y^2 - x^3"]);
        let j = cusp.jet_expand(1);
        let expected = parse_poly(j.vars(), "2*y_0*y_1 - 3*x_0^2*x_1").unwrap();
        assert_eq!(j.polys()[1], expected);

        let j0 = cusp.jet_expand(0);
        assert_eq!(j0.polys()[0].to_string(), "-x_0^3 + y_0^2");
        assert_eq!(j0.len(), 1);
    }

    #[test]
    fn jet_expansion_matches_truncated_ring_evaluation() {
        // Evaluating the jet system at (a_0..a_m) over F_q must give the
        // t-coefficients of f(sum a_j t^j) in F_q[t]/t^(m+1).
        for (vars, polys) in [
            (vec!["x", "y", "z"], vec!["x*y - z^2"]),
            (vec!["x", "y"], vec!["y^2 - x^3", "x^2*y + 2*y - 1"]),
        ] {
            let s = sys(&vars, &polys);
            for m in 0..=2usize {
                let jet = s.jet_expand(m);
                let field = make_ring("equal:3^1:1".parse().unwrap()).unwrap();
                let trunc = make_ring(format!("equal:3^1:{}", m + 1).parse().unwrap()).unwrap();
                let n = s.nvars();
                let total = 3u64.pow((n * (m + 1)) as u32);
                for idx in 0..total {
                    let mut v = idx;
                    let a: Vec<RingElement> = (0..n * (m + 1))
                        .map(|_| {
                            let d = v % 3;
                            v /= 3;
                            RingElement::from_index(d)
                        })
                        .collect();
                    // x_i = sum_j a[j*n+i] t^j
                    let point: Vec<RingElement> = (0..n)
                        .map(|i| {
                            (0..=m).fold(trunc.zero(), |acc, j| {
                                trunc.add(acc, trunc.embed_digit(a[j * n + i], j))
                            })
                        })
                        .collect();
                    for (k, f) in s.polys().iter().enumerate() {
                        let val = f.eval(&trunc, &point).unwrap();
                        for j in 0..=m {
                            let coeff = jet.polys()[j * s.len() + k].eval(&field, &a).unwrap();
                            assert_eq!(trunc.digit(val, j), coeff);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn derivative_rules_against_finite_differences() {
        // Over a large prime field, f(x + h e_i) - f(x) - h df/dx_i(x) must be
        // divisible by h^2 as a polynomial in h; check at h = 1, 2 via the
        // second difference.
        let s = sys(&["x", "y"], &["x^3*y - 5*x*y^2 + 7", "x^2 + y^4"]);
        let r = make_ring("mixed:10007^1:1".parse().unwrap()).unwrap();
        let f = &s.polys()[0];
        let g = &s.polys()[1];
        let fg = f.mul(g);
        let sum = f.add(g);
        for (a, b) in [(3i64, 5i64), (17, 2), (1000, 9999)] {
            let pt = [r.from_i64(a), r.from_i64(b)];
            for i in 0..2 {
                // product and sum rules
                let lhs = fg.derivative(i).eval(&r, &pt).unwrap();
                let rhs = r.add(
                    r.mul(f.derivative(i).eval(&r, &pt).unwrap(), g.eval(&r, &pt).unwrap()),
                    r.mul(f.eval(&r, &pt).unwrap(), g.derivative(i).eval(&r, &pt).unwrap()),
                );
                assert_eq!(lhs, rhs);
                let lin = sum.derivative(i).eval(&r, &pt).unwrap();
                assert_eq!(
                    lin,
                    r.add(
                        f.derivative(i).eval(&r, &pt).unwrap(),
                        g.derivative(i).eval(&r, &pt).unwrap()
                    )
                );
                // symmetric difference quotient is exact for the cubic part
                // up to h^2 terms: D(h) = (f(x+h) - f(x-h)) / 2h = f' + O(h^2);
                // D(2) - 4 D(1) = -3 f' for polynomials of degree <= 4.
                let shifted = |h: i64| {
                    let mut p = pt;
                    p[i] = r.add(p[i], r.from_i64(h));
                    f.eval(&r, &p).unwrap()
                };
                let d = |h: i64| {
                    let num = r.sub(shifted(h), shifted(-h));
                    r.mul(num, r.inv(r.from_i64(2 * h)).unwrap())
                };
                let richardson = r.sub(r.mul(r.from_i64(4), d(1)), d(2));
                let three_fp = r.mul(r.from_i64(3), f.derivative(i).eval(&r, &pt).unwrap());
                assert_eq!(richardson, three_fp);
            }
        }
    }

    #[test]
    fn display_order_is_graded_lex() {
        let s = sys(&["x", "y"], &["1 + x + y^2 + x*y"]);
        assert_eq!(s.polys()[0].to_string(), "x*y + y^2 + x + 1");
    }

    #[test]
    fn determinant_of_generic_2x2() {
        let v = vars_from(&["a", "b", "c", "d"]);
        let m = vec![
            vec![IntPoly::var(v.clone(), 0), IntPoly::var(v.clone(), 1)],
            vec![IntPoly::var(v.clone(), 2), IntPoly::var(v.clone(), 3)],
        ];
        assert_eq!(determinant(&m, &v), parse_poly(&v, "a*d - b*c").unwrap());
    }
}

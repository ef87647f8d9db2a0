//! Dense polynomials over a prime field `F_p`, just enough to find defining
//! polynomials of extension fields.

type Poly = Vec<u64>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn rem(a: &[u64], b: &[u64], p: u64) -> Poly {
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    let lead_inv = super::primes::inv_mod(b[db], p).expect("nonzero leading coefficient");
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = mulmod(*r.last().unwrap(), lead_inv, p);
        for (i, &bi) in b.iter().enumerate() {
            let t = mulmod(c, bi, p);
            r[shift + i] = (r[shift + i] + p - t) % p;
        }
        r = trim(r);
    }
    r
}

fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulmod(x, y, p)) % p;
        }
    }
    trim(out)
}

fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
    let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// `u^(p^k) mod h` by repeated `p`-th powering.
fn frobenius_power(h: &[u64], k: usize, p: u64) -> Poly {
    let mut x: Poly = rem(&[0, 1], h, p);
    for _ in 0..k {
        // x <- x^p mod h by square-and-multiply
        let mut acc: Poly = vec![1];
        let mut base = x.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(&mul(&acc, &base, p), h, p);
            }
            base = rem(&mul(&base, &base, p), h, p);
            e >>= 1;
        }
        x = acc;
    }
    x
}

/// Rabin-style test: monic `h` of degree `f` is irreducible iff
/// `gcd(h, u^(p^i) - u) = 1` for `1 <= i <= f/2`.
pub fn is_irreducible(h: &[u64], p: u64) -> bool {
    let f = h.len() - 1;
    if f == 0 {
        return false;
    }
    if f == 1 {
        return true;
    }
    for i in 1..=f / 2 {
        let mut x = frobenius_power(h, i, p);
        if x.len() < 2 {
            x.resize(2, 0);
        }
        x[1] = (x[1] + p - 1) % p;
        let g = gcd(h, &trim(x), p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Lexicographically least monic irreducible polynomial of degree `f` over
/// `F_p`, returned low-degree-first with the leading 1 included. The order
/// compares `(c_{f-1}, ..., c_0)` with the highest non-leading coefficient
/// most significant.
pub fn least_irreducible(p: u64, f: usize) -> Vec<u64> {
    if f == 1 {
        return vec![0, 1];
    }
    let mut digits = vec![0u64; f];
    loop {
        let mut h: Vec<u64> = digits.clone();
        h.push(1);
        if is_irreducible(&h, p) {
            return h;
        }
        // increment with c_0 least significant
        let mut i = 0;
        loop {
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
            i += 1;
            assert!(i < f, "irreducible polynomials exist in every degree");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_least_irreducibles() {
        assert_eq!(least_irreducible(2, 2), vec![1, 1, 1]);
        assert_eq!(least_irreducible(3, 2), vec![1, 0, 1]);
        assert_eq!(least_irreducible(2, 3), vec![1, 1, 0, 1]);
        assert_eq!(least_irreducible(5, 2), vec![2, 0, 1]);
    }

    #[test]
    fn irreducibility_by_root_search_for_quadratics_and_cubics() {
        for p in [2u64, 3, 5, 7] {
            for f in [2usize, 3] {
                let total = p.pow(f as u32);
                for idx in 0..total {
                    let mut h: Vec<u64> = (0..f).map(|i| (idx / p.pow(i as u32)) % p).collect();
                    h.push(1);
                    let has_root = (0..p).any(|x| {
                        h.iter().rev().fold(0u64, |acc, &c| (acc * x + c) % p) == 0
                    });
                    assert_eq!(is_irreducible(&h, p), !has_root, "p={p} h={h:?}");
                }
            }
        }
    }
}

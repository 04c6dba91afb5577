//! The residue field 𝔽_q = 𝔽_p[ω]/(R(ω)), q = p^f.
//!
//! Elements are coefficient vectors of length f over 𝔽_p in the power basis
//! 1, ω, …, ω^{f−1}. The tables needed to reduce products (the expansions of
//! ω^f, …, ω^{2f−2}) are precomputed at construction time.

use crate::error::{Error, Result};

/// An element of 𝔽_q as its coefficient vector (length f, entries in [0, p)).
pub type FqElt = Vec<u64>;

/// The residue field 𝔽_{p^f} with precomputed reduction and generator data.
#[derive(Debug, Clone)]
pub struct Fq {
    /// The residue characteristic.
    pub p: u64,
    /// The degree f of 𝔽_q over 𝔽_p.
    pub f: usize,
    /// q = p^f.
    pub q: u64,
    /// The monic residue polynomial R, little-endian, length f+1, lead 1.
    pub residue_poly: Vec<u64>,
    /// red[t] = coefficients of ω^{f+t} in the power basis, for 0 ≤ t ≤ f−2.
    red: Vec<Vec<u64>>,
    /// A generator of 𝔽_q^× (the smallest one in index order).
    generator: FqElt,
}

impl Fq {
    /// Builds 𝔽_q from a monic polynomial over 𝔽_p, checking irreducibility.
    pub fn new(p: u64, residue_poly: &[i64]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::config(format!("p = {p} is not prime")));
        }
        if p == 2 {
            return Err(Error::config("p must be an odd prime"));
        }
        if residue_poly.len() < 2 {
            return Err(Error::config("residue polynomial must have degree >= 1"));
        }
        let f = residue_poly.len() - 1;
        let rp: Vec<u64> = residue_poly.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
        if rp[f] != 1 {
            return Err(Error::config("residue polynomial must be monic"));
        }
        let q = (p as u128).checked_pow(f as u32).ok_or_else(|| Error::config("q overflow"))?;
        if q > 6561 {
            return Err(Error::config(format!(
                "residue field size q = {q} exceeds the supported bound 6561"
            )));
        }
        let q = q as u64;

        // Reduction rows: omega^{f+t} expressed in the power basis.
        let mut red: Vec<Vec<u64>> = Vec::with_capacity(f.saturating_sub(1));
        // omega^f = -(rp[0] + rp[1] omega + ... + rp[f-1] omega^{f-1})
        let mut cur: Vec<u64> = (0..f).map(|i| (p - rp[i] % p) % p).collect();
        for _ in 0..f.saturating_sub(1) {
            red.push(cur.clone());
            // multiply by omega: shift, then reduce the overflow via omega^f row.
            let top = cur[f - 1];
            let mut next = vec![0u64; f];
            for i in (1..f).rev() {
                next[i] = cur[i - 1];
            }
            let base: Vec<u64> = (0..f).map(|i| (p - rp[i] % p) % p).collect();
            for i in 0..f {
                next[i] = (next[i] + top * base[i]) % p;
            }
            cur = next;
        }

        let mut fq = Fq { p, f, q, residue_poly: rp, red, generator: vec![0; f] };

        fq.check_irreducible()?;
        fq.generator = fq.find_generator()?;
        Ok(fq)
    }

    /// Irreducibility over 𝔽_p: R is irreducible of degree f iff
    /// x^{p^f} ≡ x mod R and gcd(x^{p^{f/ℓ}} − x, R) = 1 for every prime ℓ | f.
    fn check_irreducible(&self) -> Result<()> {
        // x^{p^k} mod R as an Fq element (the image of omega under k-fold Frobenius
        // composed with nothing — we work with polynomials in omega directly).
        let xq = self.omega_frobenius_power(self.f);
        let mut x = vec![0u64; self.f];
        if self.f >= 2 {
            x[1] = 1;
        } else {
            // f = 1: omega is a scalar root of the degree-1 polynomial; always fine.
            return Ok(());
        }
        if xq != x {
            return Err(Error::config("residue polynomial is not irreducible (x^q != x)"));
        }
        let mut ell = 2usize;
        let mut rem = self.f;
        let mut prime_divs = Vec::new();
        while ell * ell <= rem {
            if rem % ell == 0 {
                prime_divs.push(ell);
                while rem % ell == 0 {
                    rem /= ell;
                }
            }
            ell += 1;
        }
        if rem > 1 {
            prime_divs.push(rem);
        }
        for ell in prime_divs {
            let xe = self.omega_frobenius_power(self.f / ell);
            // gcd(x^{p^{f/l}} - x, R) must be 1; since R generates a field iff the
            // difference is a unit or ... simpler: x^{p^{f/l}} must differ from x.
            let mut diff = xe.clone();
            for i in 0..self.f {
                diff[i] = (diff[i] + self.p - x[i]) % self.p;
            }
            if diff.iter().all(|&c| c == 0) {
                return Err(Error::config(
                    "residue polynomial is not irreducible (fixed by a proper Frobenius power)",
                ));
            }
        }
        Ok(())
    }

    /// The image of ω under the k-fold p-power Frobenius, i.e. ω^{p^k} reduced.
    fn omega_frobenius_power(&self, k: usize) -> FqElt {
        let mut x = self.omega();
        for _ in 0..k {
            x = self.pow(&x, self.p);
        }
        x
    }

    /// The zero element.
    pub fn zero(&self) -> FqElt {
        vec![0; self.f]
    }

    /// The identity element.
    pub fn one(&self) -> FqElt {
        let mut v = vec![0; self.f];
        v[0] = 1;
        v
    }

    /// The class of ω (for f = 1 this is the image of the root, i.e. −R(0)).
    pub fn omega(&self) -> FqElt {
        if self.f == 1 {
            vec![(self.p - self.residue_poly[0] % self.p) % self.p]
        } else {
            let mut v = vec![0; self.f];
            v[1] = 1;
            v
        }
    }

    /// An element from an integer.
    pub fn from_u64(&self, n: u64) -> FqElt {
        let mut v = vec![0; self.f];
        v[0] = n % self.p;
        v
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> FqElt {
        (0..self.f).map(|i| (a[i] + b[i]) % self.p).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> FqElt {
        (0..self.f).map(|i| (a[i] + self.p - b[i]) % self.p).collect()
    }

    pub fn neg(&self, a: &[u64]) -> FqElt {
        (0..self.f).map(|i| (self.p - a[i]) % self.p).collect()
    }

    pub fn scalar_mul(&self, c: u64, a: &[u64]) -> FqElt {
        let c = c % self.p;
        (0..self.f).map(|i| (a[i] * c) % self.p).collect()
    }

    /// Product in 𝔽_q (schoolbook + reduction rows).
    pub fn mul(&self, a: &[u64], b: &[u64]) -> FqElt {
        let f = self.f;
        let mut wide = vec![0u64; 2 * f - 1];
        for i in 0..f {
            if a[i] == 0 {
                continue;
            }
            for j in 0..f {
                wide[i + j] = (wide[i + j] + a[i] * b[j]) % self.p;
            }
        }
        let mut out: Vec<u64> = wide[..f].to_vec();
        for t in 0..f.saturating_sub(1) {
            let c = wide[f + t];
            if c == 0 {
                continue;
            }
            for i in 0..f {
                out[i] = (out[i] + c * self.red[t][i]) % self.p;
            }
        }
        out
    }

    pub fn pow(&self, a: &[u64], mut n: u64) -> FqElt {
        let mut base = a.to_vec();
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self, a: &[u64]) -> Result<FqElt> {
        if self.is_zero(a) {
            return Err(Error::config("inversion of zero in the residue field"));
        }
        Ok(self.pow(a, self.q - 2))
    }

    /// The p-power Frobenius x ↦ x^p.
    pub fn frobenius(&self, a: &[u64]) -> FqElt {
        self.pow(a, self.p)
    }

    /// Bijection 𝔽_q ↔ [0, q): mixed-radix encoding of the coefficient vector.
    pub fn index(&self, a: &[u64]) -> usize {
        let mut n = 0u64;
        for i in (0..self.f).rev() {
            n = n * self.p + a[i];
        }
        n as usize
    }

    /// Inverse of [`Fq::index`].
    pub fn from_index(&self, mut n: usize) -> FqElt {
        let mut v = vec![0u64; self.f];
        for slot in v.iter_mut() {
            *slot = (n as u64) % self.p;
            n /= self.p as usize;
        }
        v
    }

    /// Iterates over all q elements in index order.
    pub fn all_elements(&self) -> impl Iterator<Item = FqElt> + '_ {
        (0..self.q as usize).map(|i| self.from_index(i))
    }

    /// Whether the element lies in the prime field 𝔽_p.
    pub fn in_prime_field(&self, a: &[u64]) -> bool {
        a[1..].iter().all(|&c| c == 0)
    }

    /// A fixed generator of the cyclic group 𝔽_q^×.
    pub fn mult_generator(&self) -> FqElt {
        self.generator.clone()
    }

    fn find_generator(&self) -> Result<FqElt> {
        // Factor q - 1 and test candidates in index order.
        let mut n = self.q - 1;
        let mut primes = Vec::new();
        let mut d = 2u64;
        while d * d <= n {
            if n % d == 0 {
                primes.push(d);
                while n % d == 0 {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            primes.push(n);
        }
        'cand: for i in 1..self.q as usize {
            let g = self.from_index(i);
            for &ell in &primes {
                if self.pow(&g, (self.q - 1) / ell) == self.one() {
                    continue 'cand;
                }
            }
            return Ok(g);
        }
        Err(Error::config("residue field has no multiplicative generator (impossible)"))
    }
}

/// Deterministic primality for the small moduli used here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f9() -> Fq {
        // F_9 = F_3[w]/(w^2 + 2w + 2); w is a generator of F_9^x.
        Fq::new(3, &[2, 2, 1]).unwrap()
    }

    #[test]
    fn rejects_reducible_polynomials() {
        // x^2 - 1 = (x-1)(x+1) mod 3
        assert!(Fq::new(3, &[2, 0, 1]).is_err());
        // x^2 factors as x * x
        assert!(Fq::new(3, &[0, 0, 1]).is_err());
    }

    #[test]
    fn rejects_composite_characteristic() {
        assert!(Fq::new(9, &[1, 1]).is_err());
        assert!(Fq::new(2, &[1, 1, 1]).is_err());
    }

    #[test]
    fn field_axioms_spot_checks() {
        let k = f9();
        let w = k.omega();
        // w^2 = -2w - 2 = w + 1 mod 3
        let w2 = k.mul(&w, &w);
        assert_eq!(w2, vec![1, 1]);
        // w has order 8 = q - 1 (it is a generator for this choice of polynomial).
        let mut x = w.clone();
        let mut order = 1;
        while x != k.one() {
            x = k.mul(&x, &w);
            order += 1;
        }
        assert_eq!(order, 8);
    }

    #[test]
    fn inverses_and_frobenius() {
        let k = f9();
        for a in k.all_elements().skip(1) {
            let ai = k.inv(&a).unwrap();
            assert_eq!(k.mul(&a, &ai), k.one());
            // Frobenius is additive and fixes exactly F_p.
            let fr = k.frobenius(&a);
            assert_eq!(k.frobenius(&fr), a, "Frobenius should have order f = 2");
            if k.in_prime_field(&a) {
                assert_eq!(fr, a);
            } else {
                assert_ne!(fr, a);
            }
        }
    }

    #[test]
    fn index_roundtrip() {
        let k = f9();
        for i in 0..9 {
            assert_eq!(k.index(&k.from_index(i)), i);
        }
    }

    #[test]
    fn generator_has_full_order() {
        let k = f9();
        let g = k.mult_generator();
        let mut x = g.clone();
        let mut order = 1;
        while x != k.one() {
            x = k.mul(&x, &g);
            order += 1;
        }
        assert_eq!(order, 8);
    }

    #[test]
    fn degree_one_residue_field() {
        let k = Fq::new(5, &[0, 1]).unwrap();
        assert_eq!(k.q, 5);
        assert_eq!(k.mul(&vec![2], &vec![3]), vec![1]);
        assert!(k.in_prime_field(&vec![4]));
    }
}

//! Elements of 𝒪_K and their exact truncated arithmetic.
//!
//! An element is stored as Σ_{i<e} aᵢ πⁱ with aᵢ ∈ 𝒪_{K₀} held mod p^{mw}.
//! Two precision quantities are tracked:
//!
//! * `cp` — how many low p-digits of each stored coefficient are meaningful
//!   (coefficients are exact mod p^{cp}; digits above may be garbage left
//!   behind by exact divisions);
//! * `prec` — the π-adic precision of the value: the element is known as an
//!   element of 𝒪_K/𝔪^{prec}.
//!
//! The invariant prec ≤ e·cp is maintained by [`Field::clamp`]. All divisions
//! are exact (division by π uses the precomputed unit p·π^{−1}, division by p
//! divides coefficients digit-wise); anything that would leave 𝒪_K is an error,
//! which keeps every stored coefficient an honest truncated Witt-style integer
//! and avoids denominators entirely.

use crate::error::{Error, Result};

use super::field::Field;
use super::fq::FqElt;

/// An element of 𝒪_K at tracked precision. Create and combine via [`Field`]
/// methods; elements carry no back-reference to their field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicElement {
    /// Coefficients a_0..a_{e-1} in the π-power basis, each an OK0 vector.
    pub(crate) c: Vec<Vec<u64>>,
    /// Stored coefficients are exact mod p^{cp}.
    pub(crate) cp: u32,
    /// The value is known mod 𝔪^{prec}.
    pub prec: i64,
}

impl PadicElement {
    pub(crate) fn raw(c: Vec<Vec<u64>>, cp: u32, prec: i64) -> Self {
        PadicElement { c, cp, prec }
    }
}

impl Field {
    fn clamp(&self, mut x: PadicElement) -> PadicElement {
        let cap = self.e * x.cp as i64;
        if x.prec > cap {
            x.prec = cap;
        }
        x
    }

    /// The largest precision an exactly-known element can claim.
    pub fn full_prec(&self) -> i64 {
        self.e * self.mw as i64
    }

    /// Zero, exact.
    pub fn zero(&self) -> PadicElement {
        self.clamp(PadicElement::raw(
            vec![self.ok0_zero(); self.e as usize],
            self.mw,
            self.full_prec(),
        ))
    }

    /// One, exact.
    pub fn one(&self) -> PadicElement {
        self.from_ok0(&self.ok0_one())
    }

    /// π, exact. (For e = 1 this is the scalar −E₀ via the Eisenstein relation.)
    pub fn pi(&self) -> PadicElement {
        self.monomial(&self.ok0_one(), 1)
    }

    /// An exact integer constant.
    pub fn from_i64(&self, n: i64) -> PadicElement {
        self.from_ok0(&self.ok0_from_i64(n))
    }

    /// An exact constant from a raw residue mod p^{mw} (series tables).
    pub(crate) fn from_scalar_u64(&self, c: u64) -> PadicElement {
        let mut v = self.ok0_zero();
        v[0] = c % self.pmw;
        self.from_ok0(&v)
    }

    /// An exact 𝒪_{K₀} constant.
    pub fn from_ok0(&self, a: &[u64]) -> PadicElement {
        let mut c = vec![self.ok0_zero(); self.e as usize];
        c[0] = a.to_vec();
        self.clamp(PadicElement::raw(c, self.mw, self.full_prec()))
    }

    /// The Teichmüller lift of a residue element, as an element of 𝒪_K.
    pub fn teich(&self, r: &FqElt) -> PadicElement {
        self.from_ok0(&self.ok0_teich(r))
    }

    /// c·π^h for an exact OK0 scalar c and h in [0, e).
    fn monomial_raw(&self, a: &[u64], h: i64) -> PadicElement {
        debug_assert!((0..self.e).contains(&h));
        let mut c = vec![self.ok0_zero(); self.e as usize];
        c[h as usize] = a.to_vec();
        self.clamp(PadicElement::raw(c, self.mw, self.full_prec()))
    }

    /// c·π^h for any h ≥ 0.
    pub fn monomial(&self, a: &[u64], h: i64) -> PadicElement {
        let (alpha, beta) = (h.div_euclid(self.e), h.rem_euclid(self.e));
        let base = self.monomial_raw(a, beta);
        if alpha == 0 {
            return base;
        }
        self.mul(&base, &self.pow_u(&self.pi_pow_unit_step(), alpha as u64))
    }

    /// teich(d)·π^h — the basic digit term.
    pub fn digit_term(&self, d: &FqElt, h: i64) -> PadicElement {
        self.monomial(&self.ok0_teich(d), h)
    }

    /// π^e as an element (from the Eisenstein relation).
    fn pi_pow_unit_step(&self) -> PadicElement {
        let c: Vec<Vec<u64>> = self.pi_row(0).to_vec();
        self.clamp(PadicElement::raw(c, self.mw, self.full_prec()))
    }

    /// π^h for h ≥ 0.
    pub fn pi_pow(&self, h: i64) -> PadicElement {
        debug_assert!(h >= 0);
        self.pow_u(&self.pi(), h as u64)
    }

    pub fn add(&self, x: &PadicElement, y: &PadicElement) -> PadicElement {
        let e = self.e as usize;
        let c: Vec<Vec<u64>> = (0..e).map(|i| self.ok0_add(&x.c[i], &y.c[i])).collect();
        self.clamp(PadicElement::raw(c, x.cp.min(y.cp), x.prec.min(y.prec)))
    }

    pub fn sub(&self, x: &PadicElement, y: &PadicElement) -> PadicElement {
        let e = self.e as usize;
        let c: Vec<Vec<u64>> = (0..e).map(|i| self.ok0_sub(&x.c[i], &y.c[i])).collect();
        self.clamp(PadicElement::raw(c, x.cp.min(y.cp), x.prec.min(y.prec)))
    }

    pub fn neg(&self, x: &PadicElement) -> PadicElement {
        let c: Vec<Vec<u64>> = x.c.iter().map(|a| self.ok0_neg(a)).collect();
        PadicElement::raw(c, x.cp, x.prec)
    }

    /// Product, with the usual p-adic precision propagation
    /// prec(xy) = min(prec(x) + v(y), prec(y) + v(x)).
    pub fn mul(&self, x: &PadicElement, y: &PadicElement) -> PadicElement {
        let e = self.e as usize;
        let mut wide: Vec<Vec<u64>> = vec![self.ok0_zero(); 2 * e - 1];
        for i in 0..e {
            if self.ok0_is_zero(&x.c[i]) {
                continue;
            }
            for j in 0..e {
                if self.ok0_is_zero(&y.c[j]) {
                    continue;
                }
                let prod = self.ok0_mul(&x.c[i], &y.c[j]);
                wide[i + j] = self.ok0_add(&wide[i + j], &prod);
            }
        }
        let mut c: Vec<Vec<u64>> = wide[..e].to_vec();
        for t in 0..e.saturating_sub(1) {
            if self.ok0_is_zero(&wide[e + t]) {
                continue;
            }
            let row = self.pi_row(t);
            for i in 0..e {
                let prod = self.ok0_mul(&wide[e + t], &row[i]);
                c[i] = self.ok0_add(&c[i], &prod);
            }
        }
        let vx = self.vlow(x);
        let vy = self.vlow(y);
        let prec = (x.prec + vy).min(y.prec + vx);
        self.clamp(PadicElement::raw(c, x.cp.min(y.cp), prec))
    }

    /// Product with an exact OK0 scalar.
    pub fn mul_scalar_ok0(&self, x: &PadicElement, a: &[u64]) -> PadicElement {
        if self.ok0_is_zero(a) {
            return self.zero();
        }
        let va = self.ok0_vp(a, self.mw) as i64;
        let c: Vec<Vec<u64>> = x.c.iter().map(|ci| self.ok0_mul(ci, a)).collect();
        let cp = (x.cp + va as u32).min(self.mw);
        self.clamp(PadicElement::raw(c, cp, x.prec + self.e * va))
    }

    /// Product with an exact integer.
    pub fn mul_i64(&self, x: &PadicElement, n: i64) -> PadicElement {
        self.mul_scalar_ok0(x, &self.ok0_from_i64(n))
    }

    pub fn pow_u(&self, x: &PadicElement, mut n: u64) -> PadicElement {
        let mut base = x.clone();
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

    /// The valuation v_K(x), or `None` when x vanishes at its precision.
    pub fn val(&self, x: &PadicElement) -> Option<i64> {
        let mut v = i64::MAX;
        for i in 0..self.e as usize {
            let t = self.ok0_vp(&x.c[i], x.cp) as i64;
            v = v.min(self.e * t + i as i64);
        }
        if v >= x.prec {
            None
        } else {
            Some(v)
        }
    }

    /// v_K(x) capped at the precision (used by precision propagation).
    pub fn vlow(&self, x: &PadicElement) -> i64 {
        self.val(x).unwrap_or(x.prec)
    }

    /// Whether x ≡ 0 mod 𝔪^{min(prec, n)}.
    pub fn is_zero_mod(&self, x: &PadicElement, n: i64) -> bool {
        self.vlow(x) >= n
    }

    /// The residue x̄ ∈ 𝔽_q of an integral element.
    pub fn residue(&self, x: &PadicElement) -> Result<FqElt> {
        if x.prec < 1 || x.cp < 1 {
            return Err(Error::precision("residue of an element with no tracked digits"));
        }
        Ok(self.ok0_residue(&x.c[0]))
    }

    /// Inverse of a unit of 𝒪_K (v = 0), by Newton iteration.
    pub fn unit_inv(&self, x: &PadicElement) -> Result<PadicElement> {
        match self.val(x) {
            Some(0) => {}
            _ => return Err(Error::config("unit_inv requires a unit of O_K")),
        }
        let r0 = self.ok0_inv(&x.c[0])?;
        let mut z = self.from_ok0(&r0);
        let iters = 64 - u64::from(self.mw).leading_zeros() + 3;
        let two = self.from_i64(2);
        for _ in 0..iters {
            // z <- z(2 - xz)
            let xz = self.mul(x, &z);
            z = self.mul(&z, &self.sub(&two, &xz));
        }
        // 1/x is known to the precision of x itself.
        z.prec = z.prec.min(x.prec);
        Ok(self.clamp(z))
    }

    /// Exact division by p (legal when v(x) ≥ e; consumes one coefficient digit).
    pub fn divide_by_p_exact(&self, x: &PadicElement) -> Result<PadicElement> {
        if x.cp < 1 {
            return Err(Error::precision("division by p with no remaining coefficient digits"));
        }
        let mut c = Vec::with_capacity(self.e as usize);
        for a in &x.c {
            c.push(self.ok0_div_p(a)?);
        }
        Ok(self.clamp(PadicElement::raw(c, x.cp - 1, x.prec - self.e)))
    }

    /// Exact division by π (legal when v(x) ≥ 1):
    /// (a₀ + a₁π + …)/π = a₁ + a₂π + … + (a₀/p)·(p·π^{−1}).
    pub fn divide_by_pi(&self, x: &PadicElement) -> Result<PadicElement> {
        if x.cp < 1 {
            return Err(Error::precision("division by pi with no remaining coefficient digits"));
        }
        if x.c[0].iter().any(|&d| d % self.p != 0) {
            return Err(Error::precision(
                "division by pi of an element with nonzero constant digit (v = 0)",
            ));
        }
        let e = self.e as usize;
        let t = self.ok0_div_p(&x.c[0])?;
        let mut c: Vec<Vec<u64>> = Vec::with_capacity(e);
        for i in 1..e {
            c.push(x.c[i].clone());
        }
        c.push(self.ok0_zero());
        let shifted = PadicElement::raw(c, x.cp - 1, x.prec - 1);
        let correction = self.mul_scalar_ok0(&self.mu_shift, &t);
        Ok(self.clamp(self.add(&shifted, &correction)))
    }

    /// Exact division by π^k, k ≥ 0 (legal when v(x) ≥ k). Full e-blocks are
    /// divided by p and corrected by the unit μ^α (p = μ·π^e), the remainder
    /// by single π-steps.
    pub fn divide_by_pi_pow(&self, x: &PadicElement, k: i64) -> Result<PadicElement> {
        debug_assert!(k >= 0);
        let alpha = k / self.e;
        let beta = k % self.e;
        let mut y = x.clone();
        for _ in 0..alpha {
            y = self.divide_by_p_exact(&y)?;
        }
        if alpha > 0 {
            y = self.mul(&y, &self.pow_u(&self.mu, alpha as u64));
        }
        for _ in 0..beta {
            y = self.divide_by_pi(&y)?;
        }
        Ok(y)
    }

    /// Exact division x/y in 𝒪_K; requires v(x) ≥ v(y) and y ≠ 0 at precision.
    pub fn div_exact(&self, x: &PadicElement, y: &PadicElement) -> Result<PadicElement> {
        let vy = self
            .val(y)
            .ok_or_else(|| Error::precision("division by an element that vanishes at precision"))?;
        if let Some(vx) = self.val(x) {
            if vx < vy {
                return Err(Error::config("exact division would leave O_K (v(x) < v(y))"));
            }
        }
        let u = self.divide_by_pi_pow(y, vy)?;
        let q = self.mul(x, &self.unit_inv(&u)?);
        self.divide_by_pi_pow(&q, vy)
    }

    fn digit_width(&self, n: i64, slot: i64) -> u32 {
        let w = (n - slot).div_euclid(self.e) + i64::from((n - slot).rem_euclid(self.e) != 0);
        w.clamp(0, self.mw as i64) as u32
    }

    /// Canonical representative of x mod 𝔪^n (digits above the cut zeroed).
    pub fn reduce_mod(&self, x: &PadicElement, n: i64) -> Result<PadicElement> {
        if n > x.prec {
            return Err(Error::precision(format!(
                "reduce_mod {n} exceeds element precision {}",
                x.prec
            )));
        }
        let e = self.e as usize;
        let mut c = Vec::with_capacity(e);
        for i in 0..e {
            let w = self.digit_width(n, i as i64);
            let modulus = self.p.pow(w);
            c.push(x.c[i].iter().map(|&d| if w >= self.mw { d } else { d % modulus }).collect());
        }
        Ok(PadicElement::raw(c, self.mw, n))
    }

    /// Equality mod 𝔪^n.
    pub fn eq_mod(&self, x: &PadicElement, y: &PadicElement, n: i64) -> Result<bool> {
        Ok(self.is_zero_mod(&self.sub(x, y), n))
    }

    /// Canonical byte encoding of x mod 𝔪^n, usable as a dedup/sort key.
    pub fn canon_bytes(&self, x: &PadicElement, n: i64) -> Result<Vec<u8>> {
        let r = self.reduce_mod(x, n)?;
        let mut out = Vec::with_capacity(self.e as usize * self.f * 8);
        for a in &r.c {
            for &d in a {
                out.extend_from_slice(&d.to_le_bytes());
            }
        }
        Ok(out)
    }

    /// The leading digit: (v, d) with x ≡ teich(d)·π^v mod 𝔪^{v+1}.
    pub fn leading_digit(&self, x: &PadicElement) -> Result<(i64, FqElt)> {
        let v = self
            .val(x)
            .ok_or_else(|| Error::precision("leading digit of an element that vanishes at precision"))?;
        let shifted = self.divide_by_pi_pow(x, v)?;
        Ok((v, self.residue(&shifted)?))
    }

    /// The Teichmüller digit expansion x = Σ teich(d_h)·π^h, for levels
    /// h < min(prec(x), limit). Zero digits are omitted.
    pub fn digit_expansion(&self, x: &PadicElement, limit: i64) -> Result<Vec<(i64, FqElt)>> {
        let stop = x.prec.min(limit);
        let mut w = x.clone();
        let mut out = Vec::new();
        while let Some(v) = self.val(&w) {
            if v >= stop {
                break;
            }
            let d = self.residue(&self.divide_by_pi_pow(&w, v)?)?;
            w = self.sub(&w, &self.digit_term(&d, v));
            out.push((v, d));
        }
        Ok(out)
    }

    /// Rebuilds Σ teich(d_h)·π^h from digit terms (h ≥ 0 required).
    pub fn from_digit_terms(&self, terms: &[(i64, FqElt)]) -> Result<PadicElement> {
        let mut acc = self.zero();
        for (h, d) in terms {
            if *h < 0 {
                return Err(Error::config("digit terms must have nonnegative levels"));
            }
            acc = self.add(&acc, &self.digit_term(d, *h));
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use crate::padic::testutil::{std_field, zeta9_field};

    #[test]
    fn basic_arithmetic_in_q9_zeta3() {
        let k = std_field();
        let pi = k.pi();
        // pi^2 = -3 - 3pi (Eisenstein relation x^2 + 3x + 3).
        let pi2 = k.mul(&pi, &pi);
        let expect = k.add(&k.from_i64(-3), &k.mul_i64(&pi, -3));
        assert_eq!(k.val(&k.sub(&pi2, &expect)), None);
        // v(3) = e = 2, v(pi) = 1.
        assert_eq!(k.val(&k.from_i64(3)), Some(2));
        assert_eq!(k.val(&pi), Some(1));
        assert_eq!(k.val(&k.from_i64(1)), Some(0));
        assert_eq!(k.val(&k.zero()), None);
    }

    #[test]
    fn division_by_pi_inverts_multiplication() {
        let k = std_field();
        let w = k.residue_field().omega();
        let x = k.add(&k.digit_term(&w, 3), &k.from_i64(12));
        for h in 0..4 {
            let shifted = k.mul(&x, &k.pi_pow(h));
            let back = k.divide_by_pi_pow(&shifted, h).unwrap();
            let diff = k.sub(&back, &x);
            assert!(k.is_zero_mod(&diff, back.prec));
        }
    }

    #[test]
    fn division_by_pi_rejects_units() {
        let k = std_field();
        assert!(k.divide_by_pi(&k.one()).is_err());
    }

    #[test]
    fn unit_inverse_roundtrip() {
        let k = std_field();
        let w = k.residue_field().omega();
        let u = k.add(&k.one(), &k.digit_term(&w, 1));
        let ui = k.unit_inv(&u).unwrap();
        let prod = k.mul(&u, &ui);
        assert!(k.is_zero_mod(&k.sub(&prod, &k.one()), prod.prec));
    }

    #[test]
    fn div_exact_agrees_with_mul() {
        let k = std_field();
        let w = k.residue_field().omega();
        let x = k.add(&k.digit_term(&w, 2), &k.from_i64(6));
        let y = k.add(&k.pi(), &k.from_i64(3));
        let q = k.div_exact(&k.mul(&x, &y), &y).unwrap();
        assert!(k.is_zero_mod(&k.sub(&q, &x), q.prec));
        // Division that would leave O_K is refused.
        assert!(k.div_exact(&k.one(), &k.pi()).is_err());
    }

    #[test]
    fn digit_expansion_roundtrip() {
        let k = std_field();
        // 3 = -pi^2 - pi^3 * (stuff): check the first digits are (2, d) form.
        let three = k.from_i64(3);
        let digits = k.digit_expansion(&three, k.n_prec).unwrap();
        assert_eq!(digits[0].0, 2, "v(3) = 2");
        let rebuilt = k.from_digit_terms(&digits).unwrap();
        assert!(k.eq_mod(&rebuilt, &three, k.n_prec).unwrap());
        // Digits determine canonical bytes.
        assert_eq!(
            k.canon_bytes(&rebuilt, k.n_prec).unwrap(),
            k.canon_bytes(&three, k.n_prec).unwrap()
        );
    }

    #[test]
    fn three_equals_minus_pi_squared_times_unit() {
        let k = std_field();
        // In Q_9(zeta_3) with pi^2 + 3pi + 3 = 0: 3 = -pi^2 - 3pi = -pi^2(1 + 3pi/pi^2)...
        // Just check leading digit of 3 is (2, -1 mod 3) = (2, teich-index of 2).
        let (v, d) = k.leading_digit(&k.from_i64(3)).unwrap();
        assert_eq!(v, 2);
        assert_eq!(d, k.residue_field().from_u64(2));
    }

    #[test]
    fn precision_tracks_products_and_divisions() {
        let k = zeta9_field();
        let x = k.reduce_mod(&k.from_i64(10), 7).unwrap();
        assert_eq!(x.prec, 7);
        let y = k.mul(&x, &k.pi_pow(3));
        assert_eq!(y.prec, 10, "multiplying by pi^3 shifts the precision window up");
        let z = k.divide_by_pi_pow(&y, 3).unwrap();
        assert_eq!(z.prec, 7);
        let w = k.mul(&x, &x);
        assert_eq!(w.prec, 7, "multiplying two units keeps min precision");
    }

    #[test]
    fn zeta9_field_constructs() {
        let k = zeta9_field();
        assert_eq!(k.e, 6);
        assert_eq!(k.pm_level().unwrap(), 9);
        // v(3) = 6.
        assert_eq!(k.val(&k.from_i64(3)), Some(6));
        // Eisenstein relation: the polynomial of zeta_9 - 1 evaluates to zero at pi.
        let pi = k.pi();
        let coeffs: [i64; 7] = [3, 9, 18, 21, 15, 6, 1];
        let mut acc = k.zero();
        for (i, &ci) in coeffs.iter().enumerate() {
            acc = k.add(&acc, &k.mul_i64(&k.pi_pow(i as i64), ci));
        }
        assert_eq!(k.val(&acc), None);
        let _ = pi;
    }
}

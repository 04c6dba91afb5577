//! The Artin–Hasse exponential E_p and its inverse Λ_p.
//!
//! E_p(X) = exp(Σ_{i≥0} X^{pⁱ}/pⁱ) has p-integral coefficients; it converts
//! additive data γ ∈ 𝔪 into principal units E_p(γ) ∈ U¹ and is the basic
//! building block both for unit-group generators and for the power-series
//! lifts used by the reciprocity pairing.
//!
//! Coefficients are computed two independent ways — from the exponential
//! definition via the differential equation n·e_n = Σ_{pⁱ≤n} e_{n−pⁱ}, and
//! from the Möbius product ∏_{p∤c} (1−X^c)^{−μ(c)/c} — over exact rationals;
//! the unit tests pin the two against each other. Reduced tables mod p^{mw}
//! are cached on the [`Field`], together with the compositional inverse
//! series of E_p(X) − 1, which evaluates Λ_p (E_p(Λ_p(u)) = u) directly; an
//! independent multiplicative-refinement solver, [`Field::lambda_p_refine`],
//! converges to the same preimage one valuation step at a time and is
//! cross-checked against the series route in tests.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::padic::{Field, PadicElement};

/// Reduced Artin–Hasse tables mod p^{mw} for one field.
#[derive(Debug, Clone)]
pub struct EpTables {
    /// Largest tracked power of X.
    pub tmax: usize,
    /// Coefficients of E_p, ep[0] = 1.
    pub ep: Vec<u64>,
    /// Coefficients of the compositional inverse of E_p(X) − 1 (lam[1] = 1):
    /// Λ_p(1 + w) = Σ lam[n]·wⁿ.
    pub lam: Vec<u64>,
}

/// Exact rational coefficients of E_p up to X^t, from the exponential
/// definition: with S = Σ X^{pⁱ}/pⁱ one has E' = S'·E, which gives the
/// triangular recurrence n·e_n = Σ_{pⁱ ≤ n} e_{n−pⁱ} (every term of S'
/// contributes with weight 1).
pub fn ep_rational_coeffs(p: u64, t: usize) -> Arc<Vec<BigRational>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<Vec<BigRational>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&(p, t)) {
        return hit.clone();
    }
    let mut e: Vec<BigRational> = Vec::with_capacity(t + 1);
    e.push(BigRational::one());
    for n in 1..=t {
        let mut s = BigRational::zero();
        let mut pk = 1usize;
        while pk <= n {
            s += &e[n - pk];
            match pk.checked_mul(p as usize) {
                Some(next) => pk = next,
                None => break,
            }
        }
        e.push(s / BigRational::from(BigInt::from(n)));
    }
    let out = Arc::new(e);
    cache.lock().unwrap().insert((p, t), out.clone());
    out
}

/// Exact rational coefficients of E_p up to X^t from the Möbius product
/// ∏_{c≥1, p∤c} (1 − X^c)^{−μ(c)/c}. Independent of [`ep_rational_coeffs`];
/// the two are pinned against each other in tests.
pub fn ep_rational_coeffs_mobius(p: u64, t: usize) -> Vec<BigRational> {
    // Sieve the Möbius function.
    let mut mu = vec![1i64; t + 1];
    let mut sieved = vec![false; t + 1];
    for i in 2..=t {
        if !sieved[i] {
            // i is prime
            let mut j = i;
            while j <= t {
                if j != i {
                    sieved[j] = true;
                }
                j += i;
            }
            let mut j = i;
            while j <= t {
                mu[j] = -mu[j];
                j += i;
            }
            if let Some(i2) = i.checked_mul(i) {
                let mut j = i2;
                while j <= t {
                    mu[j] = 0;
                    j += i2;
                }
            }
        }
    }
    let mut acc: Vec<BigRational> = vec![BigRational::zero(); t + 1];
    acc[0] = BigRational::one();
    for c in 1..=t {
        if c % (p as usize) == 0 || mu[c] == 0 {
            continue;
        }
        // factor (1 - X^c)^alpha with alpha = -mu(c)/c, expanded as
        // sum_k C(alpha, k) (-1)^k X^{ck}.
        let alpha = BigRational::new(BigInt::from(-mu[c]), BigInt::from(c as i64));
        let kmax = t / c;
        let mut terms: Vec<BigRational> = Vec::with_capacity(kmax + 1);
        let mut cur = BigRational::one();
        terms.push(cur.clone());
        for k in 1..=kmax {
            // C(alpha,k)(-1)^k = C(alpha,k-1)(-1)^{k-1} * (alpha-k+1)/k * (-1)
            let num = &alpha - BigRational::from(BigInt::from(k as i64 - 1));
            cur = cur * num / BigRational::from(BigInt::from(-(k as i64)));
            terms.push(cur.clone());
        }
        let mut next = vec![BigRational::zero(); t + 1];
        for (n, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, b) in terms.iter().enumerate() {
                let deg = n + c * k;
                if deg > t {
                    break;
                }
                next[deg] += a * b;
            }
        }
        acc = next;
    }
    acc
}

pub(crate) fn modinv_u64(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (m as i128, a as i128 % m as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(m as i128) as u64)
}

/// Reduces an exact rational with p-unit denominator mod p^{mw}.
pub(crate) fn rat_mod(r: &BigRational, pmw: u64) -> Result<u64> {
    let num = r.numer();
    let den = r.denom();
    let m = BigInt::from(pmw);
    let n_red = ((num % &m) + &m) % &m;
    let d_red = ((den % &m) + &m) % &m;
    let n_u: u64 = n_red.try_into().map_err(|_| Error::config("rational reduction overflow"))?;
    let d_u: u64 = d_red.try_into().map_err(|_| Error::config("rational reduction overflow"))?;
    let d_inv = modinv_u64(d_u, pmw)
        .ok_or_else(|| Error::config("series coefficient has a p in its denominator"))?;
    Ok(((n_u as u128 * d_inv as u128) % pmw as u128) as u64)
}

impl Field {
    /// The cached Artin–Hasse tables for this field.
    pub fn ep_tables(&self) -> Result<&EpTables> {
        self.ep_cell
            .get_or_init(|| self.build_ep_tables())
            .as_ref()
            .map_err(|e| e.clone())
    }

    fn build_ep_tables(&self) -> Result<EpTables> {
        let tmax = self.n_prec as usize + 2;
        let rats = ep_rational_coeffs(self.p, tmax);
        let mut ep = Vec::with_capacity(tmax + 1);
        for r in rats.iter() {
            if r.denom().is_multiple_of(&BigInt::from(self.p)) {
                return Err(Error::config("Artin-Hasse coefficient not p-integral (impossible)"));
            }
            ep.push(rat_mod(r, self.pmw)?);
        }
        // Compositional inverse of W(X) = E_p(X) - 1 = X + w_2 X^2 + ...:
        // solve W(P(T)) = T triangularly; all arithmetic mod p^mw is exact
        // because the leading coefficient is 1.
        let mut lam = vec![0u64; tmax + 1];
        lam[1] = 1;
        for n in 2..=tmax {
            // coefficient of T^n in W(P) with P known below degree n
            let comp = self.compose_mod(&ep, &lam, n);
            lam[n] = (self.pmw - comp) % self.pmw;
        }
        // Verify the inversion: W(P(T)) = T up to degree tmax.
        for n in 1..=tmax {
            let c = self.compose_mod(&ep, &lam, n);
            let expect = u64::from(n == 1);
            if c != expect {
                return Err(Error::config("series inversion self-check failed"));
            }
        }
        Ok(EpTables { tmax, ep, lam })
    }

    /// Coefficient of T^n in Σ_{k≥1} ep[k]·P(T)^k where P = Σ lam[i]T^i
    /// (entries of `lam` at indices ≥ n are ignored).
    fn compose_mod(&self, ep: &[u64], lam: &[u64], n: usize) -> u64 {
        // P^k restricted to degree <= n, built iteratively. While lam[n] is
        // still being solved it is zero here, so the k = 1 term contributes
        // nothing and the caller may set lam[n] = -result.
        let mut pk: Vec<u64> = vec![0; n + 1];
        for (i, &l) in lam.iter().enumerate().take(n + 1) {
            pk[i] = l;
        }
        let base = pk.clone();
        let mut acc = 0u64;
        for k in 1..=n {
            if k > 1 {
                // pk <- pk * base, truncated at degree n
                let mut next = vec![0u64; n + 1];
                for i in 0..=n {
                    if pk[i] == 0 {
                        continue;
                    }
                    for j in 0..=(n - i) {
                        if base[j] == 0 {
                            continue;
                        }
                        next[i + j] = (next[i + j] + self.mm(pk[i], base[j])) % self.pmw;
                    }
                }
                pk = next;
            }
            if k < ep.len() {
                acc = (acc + self.mm(ep[k], pk[n])) % self.pmw;
            }
        }
        acc
    }

    /// E_p(κ) for κ ∈ 𝔪 (v(κ) ≥ 1), a principal unit.
    pub fn ep_eval(&self, kappa: &PadicElement) -> Result<PadicElement> {
        let vk = self.vlow(kappa);
        if vk < 1 {
            return Err(Error::config("ep_eval requires v(kappa) >= 1"));
        }
        let tables = self.ep_tables()?;
        let target = kappa.prec.min(self.n_prec + 2);
        let n_max = ((target + vk - 1) / vk).clamp(1, tables.tmax as i64) as usize;
        let mut acc = self.zero();
        for n in (1..=n_max).rev() {
            acc = self.mul(&acc, kappa);
            acc = self.add(&acc, &self.from_scalar_u64(tables.ep[n]));
        }
        let mut out = self.add(&self.one(), &self.mul(&acc, kappa));
        out.prec = out.prec.min((n_max as i64 + 1) * vk);
        Ok(out)
    }

    /// Λ_p(u) for a principal unit u: the unique κ ∈ 𝔪 with E_p(κ) = u
    /// (modulo the tracked precision), via the cached inverse series.
    pub fn lambda_p(&self, u: &PadicElement) -> Result<PadicElement> {
        let w = self.sub(u, &self.one());
        let vw = self.vlow(&w);
        if vw < 1 {
            return Err(Error::config("lambda_p requires a principal unit"));
        }
        let tables = self.ep_tables()?;
        let target = w.prec.min(self.n_prec + 2);
        let n_max = ((target + vw - 1) / vw).clamp(1, tables.tmax as i64) as usize;
        let mut acc = self.zero();
        for n in (2..=n_max).rev() {
            acc = self.mul(&acc, &w);
            acc = self.add(&acc, &self.from_scalar_u64(tables.lam[n]));
        }
        let mut out = self.add(&w, &self.mul(&self.mul(&acc, &w), &w));
        out.prec = out.prec.min((n_max as i64 + 1) * vw);
        Ok(out)
    }

    /// Reference implementation of Λ_p by multiplicative refinement:
    /// repeatedly replace κ by κ + (u·E_p(κ)^{−1} − 1). Since
    /// v(u·E_p(κ)^{−1} − 1) = v(Λ_p(u) − κ), the defect valuation strictly
    /// increases each round, so this converges to the E_p-preimage of u using
    /// nothing beyond [`Field::ep_eval`] and division — independent of the
    /// inverse-series tables backing [`Field::lambda_p`].
    pub fn lambda_p_refine(&self, u: &PadicElement) -> Result<PadicElement> {
        if self.vlow(&self.sub(u, &self.one())) < 1 {
            return Err(Error::config("lambda_p_refine requires a principal unit"));
        }
        let stop = u.prec.min(self.n_prec + 2);
        let mut kappa = self.zero();
        for _ in 0..(2 * stop + 8) {
            let ek = self.ep_eval_or_one(&kappa)?;
            let r = self.mul(u, &self.unit_inv(&ek)?);
            let delta = self.sub(&r, &self.one());
            match self.val(&delta) {
                None => break,
                Some(v) if v >= stop => break,
                Some(_) => {}
            }
            kappa = self.add(&kappa, &delta);
        }
        kappa.prec = kappa.prec.min(stop);
        Ok(kappa)
    }

    fn ep_eval_or_one(&self, kappa: &PadicElement) -> Result<PadicElement> {
        if self.val(kappa).is_none() {
            Ok(self.one())
        } else {
            self.ep_eval(kappa)
        }
    }

    /// The truncated power u^[α] = Σ_{n<p} C(α,n)(u−1)ⁿ for α ∈ 𝒪_K and a
    /// principal unit u.
    pub fn trunc_pow(&self, u: &PadicElement, alpha: &PadicElement) -> Result<PadicElement> {
        let w = self.sub(u, &self.one());
        if self.vlow(&w) < 1 {
            return Err(Error::config("trunc_pow requires a principal unit"));
        }
        let mut acc = self.one();
        let mut coeff = self.one();
        let mut wpow = self.one();
        for n in 1..self.p {
            // C(alpha, n) = C(alpha, n-1) * (alpha - n + 1) / n
            let factor = self.sub(alpha, &self.from_i64(n as i64 - 1));
            coeff = self.mul(&coeff, &factor);
            coeff = self.mul(&coeff, &self.unit_inv(&self.from_i64(n as i64))?);
            wpow = self.mul(&wpow, &w);
            acc = self.add(&acc, &self.mul(&coeff, &wpow));
        }
        Ok(acc)
    }

    /// The level c(j) with (K^×)^p ∩ U^j = (U^{c(j)})^p, for j ≥ 1.
    ///
    /// Follows from v(u^p−1) = p·v(u−1) below m, = v(u−1) + e above m, and
    /// the cancellation range at exactly m (μ_p absorbs into (U^m)^p since
    /// ζ_p is itself a p-th power of an element of U^m).
    pub fn pth_intersection_level(&self, j: i64) -> Result<i64> {
        let m = self.m_level()?;
        let pm = self.p as i64 * m;
        if j < 1 {
            return Err(Error::config("pth_intersection_level requires j >= 1"));
        }
        if j <= pm {
            Ok(m.min((j + self.p as i64 - 1) / self.p as i64))
        } else {
            Ok(j - self.e)
        }
    }

    /// Multiplicative generators (modulo U^i) of ((K^×)^p ∩ U^j)·U^i/U^i:
    /// the p-th powers of the digit units 1 + teich(ω^t)π^a over
    /// c(j) ≤ a < i and t < f, or `FullSpace` when i ≤ j.
    pub fn pth_power_monomial_generators(&self, j: i64, i: i64) -> Result<PthPowerImage> {
        if i <= j {
            return Ok(PthPowerImage::FullSpace);
        }
        let cmin = self.pth_intersection_level(j)?;
        let fq = self.residue_field();
        let omega = fq.omega();
        let mut gens = Vec::new();
        for a in cmin..i {
            let mut wt = fq.one();
            for _ in 0..self.f {
                let u = self.add(&self.one(), &self.digit_term(&wt, a));
                gens.push(self.pow_u(&u, self.p as u64));
                wt = fq.mul(&wt, &omega);
            }
        }
        Ok(PthPowerImage::Generators(gens))
    }
}

/// The image of ((K^×)^p ∩ U^j) in U^j/U^i.
#[derive(Debug, Clone)]
pub enum PthPowerImage {
    /// i ≤ j: the image is everything.
    FullSpace,
    /// Multiplicative generators of the image modulo U^i.
    Generators(Vec<PadicElement>),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::testutil::{std_field, zeta9_field};

    #[test]
    fn exponential_and_mobius_forms_agree() {
        for (p, t) in [(3u64, 40usize), (5, 30), (7, 25)] {
            let a = ep_rational_coeffs(p, t);
            let b = ep_rational_coeffs_mobius(p, t);
            assert_eq!(a.as_slice(), b.as_slice(), "E_{p} coefficient mismatch");
        }
    }

    #[test]
    fn e3_low_coefficients_are_known_values() {
        let c = ep_rational_coeffs(3, 6);
        assert_eq!(c[0], BigRational::one());
        assert_eq!(c[1], BigRational::one());
        assert_eq!(c[2], BigRational::new(1.into(), 2.into()));
        assert_eq!(c[3], BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn coefficients_are_p_integral() {
        for p in [3u64, 5, 7] {
            let c = ep_rational_coeffs(p, 40);
            for (n, r) in c.iter().enumerate() {
                let d = r.denom();
                assert!(
                    !d.is_multiple_of(&BigInt::from(p)),
                    "denominator of coefficient {n} of E_{p} is divisible by {p}"
                );
            }
        }
    }

    #[test]
    fn ep_lambda_roundtrip() {
        let k = std_field();
        let fq = k.residue_field();
        for idx in [1usize, 2, 4, 7] {
            for h in 1..=3i64 {
                let kappa = k.digit_term(&fq.from_index(idx), h);
                let u = k.ep_eval(&kappa).unwrap();
                assert_eq!(k.val(&k.sub(&u, &k.one())), Some(h), "E_p(kappa) = 1 + kappa + ...");
                let back = k.lambda_p(&u).unwrap();
                let diff = k.sub(&back, &kappa);
                assert!(k.is_zero_mod(&diff, back.prec.min(kappa.prec)));
            }
        }
    }

    #[test]
    fn lambda_agrees_with_multiplicative_refinement() {
        let k = zeta9_field();
        let fq = k.residue_field();
        // A handful of deterministic multi-digit units.
        let units: Vec<_> = [(1i64, 1usize), (1, 5), (2, 3), (4, 8)]
            .iter()
            .map(|&(h, idx)| {
                let mut u = k.add(&k.one(), &k.digit_term(&fq.from_index(idx), h));
                u = k.mul(&u, &k.add(&k.one(), &k.digit_term(&fq.from_index(3), h + 2)));
                u
            })
            .collect();
        for u in units {
            let fast = k.lambda_p(&u).unwrap();
            let slow = k.lambda_p_refine(&u).unwrap();
            let n = fast.prec.min(slow.prec);
            assert!(
                k.eq_mod(&fast, &slow, n).unwrap(),
                "series inversion and multiplicative refinement disagree"
            );
            // Both must actually invert E_p.
            let back = k.ep_eval(&fast).unwrap();
            assert!(k.eq_mod(&back, &u, back.prec.min(n)).unwrap());
        }
    }

    #[test]
    fn inverse_series_low_coefficients_match_hand_computation() {
        // For p = 3: E_3 - 1 = X + X^2/2 + X^3/2 + 3X^4/8 + ..., whose
        // compositional inverse is T - T^2/2 + 0*T^3 + T^4/4 + ...
        let k = std_field();
        let tables = k.ep_tables().unwrap();
        let half_neg = rat_mod(&BigRational::new((-1).into(), 2.into()), k.pmw).unwrap();
        let quarter = rat_mod(&BigRational::new(1.into(), 4.into()), k.pmw).unwrap();
        assert_eq!(tables.lam[1], 1);
        assert_eq!(tables.lam[2], half_neg);
        assert_eq!(tables.lam[3], 0);
        assert_eq!(tables.lam[4], quarter);
    }

    #[test]
    fn truncated_integer_powers_are_exact() {
        let k = std_field();
        let fq = k.residue_field();
        let u = k.add(&k.one(), &k.digit_term(&fq.from_index(5), 1));
        for n in 0..3i64 {
            let t = k.trunc_pow(&u, &k.from_i64(n)).unwrap();
            let exact = k.pow_u(&u, n as u64);
            assert!(k.eq_mod(&t, &exact, t.prec.min(exact.prec)).unwrap(), "u^[{n}] != u^{n}");
        }
    }

    #[test]
    fn pth_power_valuation_laws() {
        // v(u^p - 1) = p c below m, c + e above m, >= pm at c = m.
        let k = zeta9_field();
        let fq = k.residue_field();
        let m = k.m_level().unwrap();
        let pm = k.pm_level().unwrap();
        for c in 1..=(m + 3) {
            let u = k.add(&k.one(), &k.digit_term(&fq.omega(), c));
            let v = k.val(&k.sub(&k.pow_u(&u, 3), &k.one())).unwrap();
            if c < m {
                assert_eq!(v, 3 * c);
            } else if c > m {
                assert_eq!(v, c + k.e);
            } else {
                assert!(v >= pm);
            }
        }
    }

    #[test]
    fn intersection_levels() {
        let k = zeta9_field(); // m = 3, pm = 9, e = 6
        assert_eq!(k.pth_intersection_level(1).unwrap(), 1);
        assert_eq!(k.pth_intersection_level(5).unwrap(), 2);
        assert_eq!(k.pth_intersection_level(7).unwrap(), 3);
        assert_eq!(k.pth_intersection_level(9).unwrap(), 3);
        assert_eq!(k.pth_intersection_level(12).unwrap(), 6);
    }

    #[test]
    fn rational_reduction_sanity() {
        // 1/2 mod 3^k is (3^k + 1)/2.
        let r = BigRational::new(1.into(), 2.into());
        let v = rat_mod(&r, 27).unwrap();
        assert_eq!(v, 14);
        assert_eq!((v * 2) % 27, 1);
    }
}

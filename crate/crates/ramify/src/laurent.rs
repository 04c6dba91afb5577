//! Windowed Laurent series over 𝒪_{K₀} — the coefficient layer for the
//! power-series route to the reciprocity pairing.
//!
//! A series is tracked on an exponent window [lo, hi): coefficients below
//! `lo` are ≡ 0 (to the stored p-adic precision), coefficients at or above
//! `hi` are unknown (truncated away). Every operation propagates the honest
//! window — a product of series known on finite windows is only correct up to
//! min(x.lo + y.hi, y.lo + x.hi) — so truncation can never silently corrupt a
//! coefficient that is later read.
//!
//! Two global precision fields ride along:
//!
//! * `cprec` — stored coefficients are known mod p^{cprec};
//! * `dshift` — the value of the series is (Σ c_h Xʰ)·p^{−dshift}. Divisions
//!   by integers (the antiderivative inside `log`) and the 1/p in the
//!   twisted-logarithm map ℓ = (1 − Δ/p)∘log are performed by raising
//!   `dshift`, never by leaving the integral coefficient ring; ℓ then checks
//!   that the accumulated denominator cancels exactly and renormalizes back
//!   to `dshift = 0`.
//!
//! Inversion handles the shape that actually occurs in the pairing: series
//! whose reduction mod p has a finite X-order d but which carry p-divisible
//! coefficients below d (such as ζ̃^p − 1). The inverse then has a
//! genuinely infinite principal part; at working precision p^t only
//! exponents down to (lo−d)·(t−1) − d survive, and the returned iterate is
//! verified against its defining equation on the window where that product
//! is honest.

use crate::artin_hasse::{ep_rational_coeffs, modinv_u64, rat_mod};
use crate::error::{Error, Result};
use crate::padic::{Field, PadicElement};

/// Hard cap on tracked window length, to turn runaway window requests into
/// errors instead of memory exhaustion.
const MAX_WINDOW: i64 = 1 << 14;

/// A Laurent series over 𝒪_{K₀}, tracked on the exponent window [lo, hi).
///
/// The value represented is (Σ_{lo ≤ h < hi} c_{h−lo} Xʰ)·p^{−dshift}, with
/// coefficients known mod p^{cprec}; exponents below `lo` are zero to that
/// precision and exponents at `hi` and above are untracked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LSeries {
    /// First tracked exponent.
    pub lo: i64,
    /// One past the last tracked exponent.
    pub hi: i64,
    /// Coefficients c[(h − lo) as usize] ∈ 𝒪_{K₀}, stored mod p^{mw}.
    pub c: Vec<Vec<u64>>,
    /// Global denominator exponent: the value is the stored sum times p^{−dshift}.
    pub dshift: u32,
    /// Stored coefficients are known mod p^{cprec}.
    pub cprec: u32,
}

impl LSeries {
    /// Window length.
    pub fn len(&self) -> usize {
        (self.hi - self.lo) as usize
    }

    /// True if the window is empty.
    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }
}

fn check_window(lo: i64, hi: i64) -> Result<()> {
    if hi <= lo {
        return Err(Error::precision(format!(
            "series window [{lo}, {hi}) is empty: raise the working window"
        )));
    }
    if hi - lo > MAX_WINDOW {
        return Err(Error::precision(format!(
            "series window [{lo}, {hi}) exceeds the {MAX_WINDOW}-coefficient cap"
        )));
    }
    Ok(())
}

/// v_p(|n|) for nonzero n.
fn vp_i64(p: u64, n: i64) -> u32 {
    let mut m = n.unsigned_abs();
    let mut v = 0;
    while m % p == 0 {
        m /= p;
        v += 1;
    }
    v
}

impl Field {
    /// The zero series tracked on [lo, hi).
    pub fn ls_zero(&self, lo: i64, hi: i64) -> Result<LSeries> {
        check_window(lo, hi)?;
        Ok(LSeries {
            lo,
            hi,
            c: vec![self.ok0_zero(); (hi - lo) as usize],
            dshift: 0,
            cprec: self.mw,
        })
    }

    /// The constant series 1, tracked on [0, hi).
    pub fn ls_one(&self, hi: i64) -> Result<LSeries> {
        let mut s = self.ls_zero(0, hi)?;
        s.c[0] = self.ok0_one();
        Ok(s)
    }

    /// A series from explicit terms (exponent, coefficient), tracked up to `hi`.
    pub fn ls_from_terms(&self, terms: &[(i64, Vec<u64>)], hi: i64) -> Result<LSeries> {
        let lo = terms.iter().map(|&(h, _)| h).min().unwrap_or(0).min(0);
        let mut s = self.ls_zero(lo, hi)?;
        for (h, a) in terms {
            if *h >= hi {
                return Err(Error::precision(format!(
                    "term at exponent {h} outside window [.., {hi})"
                )));
            }
            let i = (*h - lo) as usize;
            s.c[i] = self.ok0_add(&s.c[i], a);
        }
        Ok(self.ls_tighten(s))
    }

    /// The stored coefficient at exponent `i` (zero below the window).
    ///
    /// Requires `dshift = 0` so the stored value is the value. Reading at or
    /// above the tracked window is a precision error: that coefficient was
    /// truncated away.
    pub fn ls_coeff(&self, x: &LSeries, i: i64) -> Result<Vec<u64>> {
        if x.dshift != 0 {
            return Err(Error::precision(
                "coefficient read from a series with an uncancelled denominator",
            ));
        }
        if i >= x.hi {
            return Err(Error::precision(format!(
                "coefficient at exponent {i} is outside the tracked window [.., {})",
                x.hi
            )));
        }
        if i < x.lo {
            return Ok(self.ok0_zero());
        }
        Ok(x.c[(i - x.lo) as usize].clone())
    }

    /// Raises `lo` past stored-zero leading coefficients.
    pub fn ls_tighten(&self, mut x: LSeries) -> LSeries {
        let mut drop = 0usize;
        while drop + 1 < x.c.len() && self.ok0_is_zero(&x.c[drop]) {
            drop += 1;
        }
        if drop > 0 {
            x.c.drain(..drop);
            x.lo += drop as i64;
        }
        x
    }

    /// Forgets the coefficients at exponents ≥ `new_hi` (a pure weakening of
    /// the tracked window; a no-op when `new_hi ≥ hi`).
    pub fn ls_clip(&self, x: &LSeries, new_hi: i64) -> LSeries {
        if new_hi >= x.hi {
            return x.clone();
        }
        let hi = new_hi.max(x.lo);
        LSeries {
            lo: x.lo,
            hi,
            c: x.c[..(hi - x.lo) as usize].to_vec(),
            dshift: x.dshift,
            cprec: x.cprec,
        }
    }

    /// Relabels exponents by +k (multiplication by X^k); exact.
    pub fn ls_shift(&self, x: &LSeries, k: i64) -> LSeries {
        let mut y = x.clone();
        y.lo += k;
        y.hi += k;
        y
    }

    /// Multiplies stored coefficients by p^k (the value is unchanged:
    /// `dshift` rises by k).
    pub fn ls_scale_p(&self, x: &LSeries, k: u32) -> LSeries {
        let mut y = x.clone();
        if k == 0 {
            return y;
        }
        let pk = self.pow_p_mod(k);
        for a in &mut y.c {
            *a = self.ok0_scalar(pk, a);
        }
        y.dshift += k;
        y.cprec = (y.cprec + k).min(self.mw);
        y
    }

    /// Divides the value by p formally, by raising `dshift`.
    pub fn ls_div_p_formal(&self, x: &LSeries) -> LSeries {
        let mut y = x.clone();
        y.dshift += 1;
        y
    }

    /// p^k mod p^{mw} (zero once k ≥ mw).
    fn pow_p_mod(&self, k: u32) -> u64 {
        if k >= self.mw {
            return 0;
        }
        let mut out = 1u64;
        for _ in 0..k {
            out = self.mm(out, self.p);
        }
        out
    }

    fn ls_align_dshift(&self, x: &LSeries, y: &LSeries) -> (LSeries, LSeries) {
        let d = x.dshift.max(y.dshift);
        (
            self.ls_scale_p(x, d - x.dshift),
            self.ls_scale_p(y, d - y.dshift),
        )
    }

    pub fn ls_neg(&self, x: &LSeries) -> LSeries {
        let mut y = x.clone();
        for a in &mut y.c {
            *a = self.ok0_neg(a);
        }
        y
    }

    pub fn ls_add(&self, x: &LSeries, y: &LSeries) -> Result<LSeries> {
        let (x, y) = self.ls_align_dshift(x, y);
        let lo = x.lo.min(y.lo);
        let hi = x.hi.min(y.hi);
        check_window(lo, hi)?;
        let mut c = vec![self.ok0_zero(); (hi - lo) as usize];
        for src in [&x, &y] {
            for h in src.lo..hi.min(src.hi) {
                let i = (h - lo) as usize;
                c[i] = self.ok0_add(&c[i], &src.c[(h - src.lo) as usize]);
            }
        }
        Ok(LSeries {
            lo,
            hi,
            c,
            dshift: x.dshift,
            cprec: x.cprec.min(y.cprec),
        })
    }

    pub fn ls_sub(&self, x: &LSeries, y: &LSeries) -> Result<LSeries> {
        self.ls_add(x, &self.ls_neg(y))
    }

    /// Product with honest window propagation: the result is tracked on
    /// [x.lo + y.lo, min(x.lo + y.hi, y.lo + x.hi)) — beyond that, untracked
    /// coefficients of one factor could contribute.
    pub fn ls_mul(&self, x: &LSeries, y: &LSeries) -> Result<LSeries> {
        let lo = x.lo + y.lo;
        let hi = (x.lo + y.hi).min(y.lo + x.hi);
        check_window(lo, hi)?;
        let len = (hi - lo) as usize;
        let mut c = vec![self.ok0_zero(); len];
        for (i, a) in x.c.iter().enumerate() {
            if self.ok0_is_zero(a) {
                continue;
            }
            for (j, b) in y.c.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                c[i + j] = self.ok0_add(&c[i + j], &self.ok0_mul(a, b));
            }
        }
        Ok(LSeries {
            lo,
            hi,
            c,
            dshift: x.dshift + y.dshift,
            cprec: x.cprec.min(y.cprec),
        })
    }

    /// Scales every coefficient by a ∈ 𝒪_{K₀}.
    pub fn ls_mul_ok0(&self, x: &LSeries, a: &[u64]) -> LSeries {
        let mut y = x.clone();
        for ci in &mut y.c {
            *ci = self.ok0_mul(ci, a);
        }
        y
    }

    /// Full convolution of the stored arrays truncated to a fixed window
    /// [wlo, whi), with both factors treated as exact. Used inside Newton
    /// iteration, where the iterate's quality is established by a final
    /// residual check rather than per-step window bookkeeping.
    fn ls_mul_window(&self, x: &LSeries, y: &LSeries, wlo: i64, whi: i64) -> Result<LSeries> {
        check_window(wlo, whi)?;
        let mut c = vec![self.ok0_zero(); (whi - wlo) as usize];
        for (i, a) in x.c.iter().enumerate() {
            if self.ok0_is_zero(a) {
                continue;
            }
            for (j, b) in y.c.iter().enumerate() {
                let h = x.lo + i as i64 + y.lo + j as i64;
                if h < wlo || h >= whi {
                    continue;
                }
                let k = (h - wlo) as usize;
                c[k] = self.ok0_add(&c[k], &self.ok0_mul(a, b));
            }
        }
        Ok(LSeries {
            lo: wlo,
            hi: whi,
            c,
            dshift: x.dshift + y.dshift,
            cprec: x.cprec.min(y.cprec),
        })
    }

    /// Formal derivative d/dX, with the leading window tightened.
    pub fn ls_deriv(&self, x: &LSeries) -> Result<LSeries> {
        check_window(x.lo - 1, x.hi - 1)?;
        let mut c = Vec::with_capacity(x.c.len());
        for (i, a) in x.c.iter().enumerate() {
            let h = x.lo + i as i64;
            let scal = ((h % self.pmw as i64) + self.pmw as i64) as u64 % self.pmw;
            c.push(self.ok0_scalar(scal, a));
        }
        Ok(self.ls_tighten(LSeries {
            lo: x.lo - 1,
            hi: x.hi - 1,
            c,
            dshift: x.dshift,
            cprec: x.cprec,
        }))
    }

    /// The Frobenius twist Δ: φ on coefficients and X ↦ X^p on exponents.
    pub fn ls_frob_twist(&self, x: &LSeries) -> Result<LSeries> {
        let p = self.p as i64;
        let lo = p * x.lo;
        let hi = p * (x.hi - 1) + 1;
        check_window(lo, hi)?;
        let mut c = vec![self.ok0_zero(); (hi - lo) as usize];
        for (i, a) in x.c.iter().enumerate() {
            let h = p * (x.lo + i as i64);
            c[(h - lo) as usize] = self.ok0_frobenius(a);
        }
        Ok(LSeries {
            lo,
            hi,
            c,
            dshift: x.dshift,
            cprec: x.cprec,
        })
    }

    /// Inverts a series whose reduction mod p is nonzero somewhere in the
    /// window, to p-adic working precision `min(t_target, x.cprec)`.
    ///
    /// Returns `(b, verified_hi)`: the product x·b has been checked to equal
    /// 1 mod p^t at every exponent below `verified_hi` (having it hold only
    /// below a bound is intrinsic — the inverse of a series with p-divisible
    /// coefficients below its unit X-order d has an infinite principal part,
    /// resolvable only to finite p-adic depth). Callers that multiply by `b`
    /// must keep the exponents they read below `verified_hi` plus the
    /// X-order of the cofactor.
    pub fn ls_inv(&self, x: &LSeries, t_target: u32) -> Result<(LSeries, i64)> {
        if x.dshift != 0 {
            return Err(Error::precision(
                "inverse of a series with an uncancelled denominator",
            ));
        }
        let t = t_target.min(x.cprec).max(1);
        let mut d = None;
        for (i, a) in x.c.iter().enumerate() {
            if self.ok0_vp(a, 1) == 0 {
                d = Some(x.lo + i as i64);
                break;
            }
        }
        let d = d.ok_or_else(|| {
            Error::precision("series has no unit coefficient in its window: cannot invert")
        })?;
        // Work with v = x / X^d (a unit at exponent 0, p-divisible tail
        // possibly below it).
        let vlo = x.lo - d;
        let vhi = x.hi - d;
        // At precision p^t the true inverse is supported (mod p^t) on
        // exponents ≥ vlo·(t − 1) when vlo < 0.
        let ilo = if vlo < 0 { vlo * (t as i64 - 1) } else { 0 };
        let ihi = vhi;
        check_window(ilo, ihi)?;
        let cwlo = vlo + ilo;
        let cwhi = ihi;
        let check_hi = (ilo + vhi).min(cwhi);

        let v = LSeries {
            lo: vlo,
            hi: vhi,
            c: x.c.clone(),
            dshift: 0,
            cprec: x.cprec,
        };
        let mut b = self.ls_zero(ilo, ihi)?;
        b.c[(-ilo) as usize] = self.ok0_inv(&x.c[(d - x.lo) as usize])?;

        let mut converged = false;
        for _ in 0..32 {
            let prod = self.ls_mul_window(&v, &b, cwlo, cwhi)?;
            let mut good = true;
            for h in cwlo..check_hi {
                let mut a = prod.c[(h - cwlo) as usize].clone();
                if h == 0 {
                    a = self.ok0_sub(&a, &self.ok0_one());
                }
                if self.ok0_vp(&a, t) < t {
                    good = false;
                    break;
                }
            }
            if good {
                converged = true;
                break;
            }
            // b ← b·(2 − v·b)
            let mut tm = self.ls_neg(&prod);
            let z = (-cwlo) as usize;
            tm.c[z] = self.ok0_add(&tm.c[z], &self.ok0_from_i64(2));
            b = self.ls_mul_window(&b, &tm, ilo, ihi)?;
        }
        if !converged {
            return Err(Error::precision(
                "series inversion did not converge: widen the window or raise precision",
            ));
        }
        let out = LSeries {
            lo: ilo - d,
            hi: ihi - d,
            c: b.c,
            dshift: 0,
            cprec: t,
        };
        Ok((out, check_hi))
    }

    /// log x for a series with constant term exactly 1, via ∫ x′·x^{−1}.
    ///
    /// Division by the integration index n is absorbed into `dshift`, so the
    /// result carries dshift = max_n v_p(n) over the window.
    pub fn ls_log(&self, x: &LSeries) -> Result<LSeries> {
        if x.dshift != 0 {
            return Err(Error::precision(
                "log of a series with an uncancelled denominator",
            ));
        }
        let xt = self.ls_tighten(x.clone());
        if xt.lo != 0 || xt.c[0] != self.ok0_one() {
            return Err(Error::precision(
                "log requires a series with constant term exactly 1",
            ));
        }
        let dx = self.ls_deriv(&xt)?;
        let (binv, _) = self.ls_inv(&xt, xt.cprec)?;
        let g = self.ls_mul(&dx, &binv)?;
        // Antiderivative: exponent n picks up g[n−1]/n.
        let out_lo = g.lo + 1;
        let out_hi = g.hi + 1;
        check_window(out_lo, out_hi)?;
        let delta = (out_lo..out_hi)
            .filter(|&n| n != 0)
            .map(|n| vp_i64(self.p, n))
            .max()
            .unwrap_or(0);
        let mut c = vec![self.ok0_zero(); (out_hi - out_lo) as usize];
        for n in out_lo..out_hi {
            let src = &g.c[(n - 1 - g.lo) as usize];
            if n == 0 {
                if self.ok0_vp(src, g.cprec) < g.cprec {
                    return Err(Error::precision(
                        "logarithmic residue obstruction: coefficient at X^{-1} does not vanish",
                    ));
                }
                continue;
            }
            let v = vp_i64(self.p, n);
            let unit = n / (self.p as i64).pow(v);
            let unit_mod = ((unit % self.pmw as i64) + self.pmw as i64) as u64 % self.pmw;
            let inv = modinv_u64(unit_mod, self.pmw)
                .ok_or_else(|| Error::precision("integration index not invertible"))?;
            let scal = self.mm(self.pow_p_mod(delta - v), inv);
            c[(n - out_lo) as usize] = self.ok0_scalar(scal, src);
        }
        Ok(LSeries {
            lo: out_lo,
            hi: out_hi,
            c,
            dshift: delta,
            cprec: g.cprec,
        })
    }

    /// The twisted logarithm ℓ(x) = (1 − Δ/p)·log x.
    ///
    /// For x ∈ 1 + X·𝒪_{K₀}[[X]] the value is p-integral even though log x
    /// and the 1/p are not: x^p ≡ Δx mod p forces the denominators to cancel.
    /// The cancellation is checked coefficient-by-coefficient and the result
    /// is renormalized to dshift = 0; failure to cancel is reported as a
    /// precision error rather than silently truncated.
    pub fn ls_l_map(&self, x: &LSeries) -> Result<LSeries> {
        let lg = self.ls_log(x)?;
        let tw = self.ls_div_p_formal(&self.ls_frob_twist(&lg)?);
        let r = self.ls_sub(&lg, &tw)?;
        let ds = r.dshift;
        if r.cprec <= ds {
            return Err(Error::precision(
                "insufficient coefficient precision to certify the twisted logarithm",
            ));
        }
        let mut c = Vec::with_capacity(r.c.len());
        for (i, a) in r.c.iter().enumerate() {
            if self.ok0_vp(a, ds) < ds {
                return Err(Error::precision(format!(
                    "twisted logarithm is not p-integral at exponent {} (precision loss)",
                    r.lo + i as i64
                )));
            }
            let mut b = a.clone();
            for _ in 0..ds {
                b = self.ok0_div_p(&b)?;
            }
            c.push(b);
        }
        Ok(LSeries {
            lo: r.lo,
            hi: r.hi,
            c,
            dshift: 0,
            cprec: r.cprec - ds,
        })
    }

    /// E_p(a·X^k) as a series on [0, hi), from the exact rational
    /// coefficients of the Artin–Hasse exponential.
    pub fn ls_ep_series(&self, a: &[u64], k: i64, hi: i64) -> Result<LSeries> {
        if k < 1 {
            return Err(Error::precision("E_p series argument must have X-order ≥ 1"));
        }
        check_window(0, hi)?;
        let nmax = ((hi - 1) / k) as usize;
        if nmax as i64 > MAX_WINDOW {
            return Err(Error::precision("E_p series order cap exceeded"));
        }
        let rats = ep_rational_coeffs(self.p, nmax);
        let mut s = self.ls_zero(0, hi)?;
        let mut apow = self.ok0_one();
        for (n, r) in rats.iter().enumerate().take(nmax + 1) {
            let em = rat_mod(r, self.pmw)?;
            let h = (n as i64) * k;
            if h < hi {
                s.c[h as usize] = self.ok0_scalar(em, &apow);
            }
            apow = self.ok0_mul(&apow, a);
        }
        Ok(s)
    }

    /// Substitutes X = π into a denominator-free series supported in
    /// exponents ≥ 0, yielding an element known mod 𝔪^{e·cprec} (capped by
    /// the window: exponents ≥ hi are unknown).
    pub fn ls_eval(&self, x: &LSeries) -> Result<PadicElement> {
        if x.dshift != 0 {
            return Err(Error::precision(
                "evaluation of a series with an uncancelled denominator",
            ));
        }
        if x.lo < 0 {
            return Err(Error::precision(
                "evaluation at π requires a series without principal part",
            ));
        }
        let mut acc = self.zero();
        for (i, a) in x.c.iter().enumerate() {
            if self.ok0_is_zero(a) {
                continue;
            }
            acc = self.add(&acc, &self.monomial(a, x.lo + i as i64));
        }
        acc.prec = acc.prec.min(self.e * x.cprec as i64).min(x.hi);
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::testutil::{std_field, zeta9_field};
    use num_rational::BigRational;

    #[test]
    fn products_respect_windows() {
        let k = std_field();
        let one_plus = k
            .ls_from_terms(&[(0, k.ok0_one()), (1, k.ok0_one())], 10)
            .unwrap();
        let one_minus = k
            .ls_from_terms(&[(0, k.ok0_one()), (1, k.ok0_neg(&k.ok0_one()))], 10)
            .unwrap();
        let prod = k.ls_mul(&one_plus, &one_minus).unwrap();
        assert_eq!(prod.lo, 0);
        assert_eq!(prod.hi, 10);
        assert_eq!(k.ls_coeff(&prod, 0).unwrap(), k.ok0_one());
        assert!(k.ok0_is_zero(&k.ls_coeff(&prod, 1).unwrap()));
        assert_eq!(k.ls_coeff(&prod, 2).unwrap(), k.ok0_neg(&k.ok0_one()));
        for i in 3..10 {
            assert!(k.ok0_is_zero(&k.ls_coeff(&prod, i).unwrap()));
        }

        // Shifted windows: (X^{-2})·(X^3 known to 8) is known to 8 - 2 = 6.
        let a = k.ls_from_terms(&[(-2, k.ok0_one())], 4).unwrap();
        let b = k.ls_from_terms(&[(3, k.ok0_one())], 8).unwrap();
        let ab = k.ls_mul(&a, &b).unwrap();
        assert_eq!(ab.lo, 1);
        assert_eq!(ab.hi, 6);
        assert_eq!(k.ls_coeff(&ab, 1).unwrap(), k.ok0_one());
    }

    #[test]
    fn inverse_of_unit_power_series() {
        let k = std_field();
        let x = k
            .ls_from_terms(&[(0, k.ok0_one()), (1, k.ok0_one())], 14)
            .unwrap();
        let (b, vh) = k.ls_inv(&x, k.mw).unwrap();
        assert!(vh >= 14);
        // 1/(1+X) = Σ (−1)^n X^n.
        for n in 0..14 {
            let want = if n % 2 == 0 {
                k.ok0_one()
            } else {
                k.ok0_neg(&k.ok0_one())
            };
            assert_eq!(k.ls_coeff(&b, n).unwrap(), want, "coefficient {n}");
        }
        let prod = k.ls_mul(&x, &b).unwrap();
        for h in prod.lo..prod.hi {
            let a = k.ls_coeff(&prod, h).unwrap();
            if h == 0 {
                assert_eq!(a, k.ok0_one());
            } else {
                assert!(k.ok0_is_zero(&a), "x·x^{{-1}} has residue at {h}");
            }
        }
    }

    #[test]
    fn inverse_handles_p_divisible_head() {
        let k = std_field();
        // t = 3X + X^2 = X^2(1 + 3X^{-1}): inverse is Σ_k (−3)^k X^{−2−k}.
        let t = k
            .ls_from_terms(&[(1, k.ok0_from_i64(3)), (2, k.ok0_one())], 12)
            .unwrap();
        let tprec = 6u32;
        let (b, vh) = k.ls_inv(&t, tprec).unwrap();
        assert!(b.lo <= -2 - (tprec as i64 - 1));
        let mut pow = 1i64;
        for j in 0..tprec as i64 {
            let got = k.ls_coeff(&b, -2 - j).unwrap();
            let want = k.ok0_from_i64(pow);
            let diff = k.ok0_sub(&got, &want);
            assert!(
                k.ok0_vp(&diff, tprec) >= tprec,
                "principal-part coefficient at {} wrong",
                -2 - j
            );
            pow *= -3;
        }
        // The defining equation holds mod p^t below the verified bound.
        let prod = k.ls_mul(&t, &b).unwrap();
        for h in prod.lo..prod.hi.min(vh) {
            let mut a = k.ls_coeff(&prod, h).unwrap();
            if h == 0 {
                a = k.ok0_sub(&a, &k.ok0_one());
            }
            assert!(k.ok0_vp(&a, tprec) >= tprec, "residual at exponent {h}");
        }
    }

    #[test]
    fn log_matches_mercator_series() {
        let k = std_field();
        let x = k
            .ls_from_terms(&[(0, k.ok0_one()), (1, k.ok0_one())], 12)
            .unwrap();
        let lg = k.ls_log(&x).unwrap();
        // log(1+X) = Σ (−1)^{n+1} X^n / n; stored coefficients carry p^{dshift}.
        let pd = BigRational::from_integer((k.p as i64).pow(lg.dshift).into());
        for n in 1..12i64 {
            let want_val = BigRational::new(
                (if n % 2 == 1 { 1i64 } else { -1 }).into(),
                n.into(),
            ) * pd.clone();
            let want = rat_mod(&want_val, k.pmw).unwrap();
            // dshift > 0 blocks ls_coeff; read the raw slot directly.
            let got = lg.c[(n - lg.lo) as usize][0];
            assert_eq!(got, want, "coefficient of X^{n}");
            for extra in 1..k.f as usize {
                assert_eq!(lg.c[(n - lg.lo) as usize][extra], 0);
            }
        }
    }

    #[test]
    fn log_is_additive_on_products() {
        let k = zeta9_field();
        let f = k
            .ls_from_terms(&[(0, k.ok0_one()), (1, k.ok0_from_i64(2))], 16)
            .unwrap();
        let g = k
            .ls_from_terms(&[(0, k.ok0_one()), (2, k.ok0_one()), (3, k.ok0_from_i64(5))], 16)
            .unwrap();
        let lhs = k.ls_log(&k.ls_mul(&f, &g).unwrap()).unwrap();
        let rhs = k.ls_add(&k.ls_log(&f).unwrap(), &k.ls_log(&g).unwrap()).unwrap();
        let (lhs, rhs) = k.ls_align_dshift(&lhs, &rhs);
        let hi = lhs.hi.min(rhs.hi);
        let t = lhs.cprec.min(rhs.cprec).min(lhs.dshift + 8);
        for n in 1..hi {
            let a = &lhs.c[(n - lhs.lo) as usize];
            let b = &rhs.c[(n - rhs.lo) as usize];
            let diff = k.ok0_sub(a, b);
            assert!(k.ok0_vp(&diff, t) >= t, "log additivity fails at X^{n}");
        }
    }

    #[test]
    fn frobenius_twist_maps_coefficients_and_exponents() {
        let k = std_field();
        let fq = k.residue_field();
        let w = k.ok0_teich(&fq.from_index(2));
        let x = k.ls_from_terms(&[(1, w.clone()), (2, k.ok0_from_i64(4))], 5).unwrap();
        let tw = k.ls_frob_twist(&x).unwrap();
        assert_eq!(k.ls_coeff(&tw, 3).unwrap(), k.ok0_frobenius(&w));
        assert_eq!(k.ls_coeff(&tw, 6).unwrap(), k.ok0_from_i64(4));
        assert!(k.ok0_is_zero(&k.ls_coeff(&tw, 4).unwrap()));
    }

    #[test]
    fn twisted_log_telescopes_artin_hasse_series() {
        // ℓ(E_p(a·X^k)) = a·X^k exactly: the defining property of the basis.
        let k = std_field();
        let fq = k.residue_field();
        for (idx, c) in [(1usize, 1i64), (2, 1), (1, 2), (5, 3)] {
            let a = k.ok0_teich(&fq.from_index(idx));
            let s = k.ls_ep_series(&a, c, 30).unwrap();
            let l = k.ls_l_map(&s).unwrap();
            for h in l.lo..l.hi {
                let got = k.ls_coeff(&l, h).unwrap();
                let want = if h == c { a.clone() } else { k.ok0_zero() };
                let diff = k.ok0_sub(&got, &want);
                assert!(
                    k.ok0_vp(&diff, l.cprec) >= l.cprec,
                    "ℓ(E_p({idx}·X^{c})) has an unexpected term at X^{h}"
                );
            }
        }
    }

    #[test]
    fn twisted_log_is_additive() {
        let k = zeta9_field();
        let fq = k.residue_field();
        let f = k
            .ls_from_terms(&[(0, k.ok0_one()), (1, k.ok0_teich(&fq.from_index(1)))], 24)
            .unwrap();
        let g = k
            .ls_from_terms(&[(0, k.ok0_one()), (3, k.ok0_from_i64(2))], 24)
            .unwrap();
        let sum = k
            .ls_add(&k.ls_l_map(&f).unwrap(), &k.ls_l_map(&g).unwrap())
            .unwrap();
        let both = k.ls_l_map(&k.ls_mul(&f, &g).unwrap()).unwrap();
        let hi = sum.hi.min(both.hi);
        let t = sum.cprec.min(both.cprec);
        for n in 1..hi {
            let a = k.ls_coeff(&sum, n).unwrap();
            let b = k.ls_coeff(&both, n).unwrap();
            let diff = k.ok0_sub(&a, &b);
            assert!(k.ok0_vp(&diff, t) >= t, "ℓ additivity fails at X^{n}");
        }
    }

    #[test]
    fn evaluation_at_pi_matches_element_arithmetic() {
        let k = std_field();
        let fq = k.residue_field();
        let w = k.ok0_teich(&fq.from_index(3));
        let s = k
            .ls_from_terms(&[(0, k.ok0_one()), (1, w.clone()), (4, k.ok0_from_i64(2))], 9)
            .unwrap();
        let lhs = k.ls_eval(&s).unwrap();
        let direct = k.add(
            &k.add(&k.one(), &k.monomial(&w, 1)),
            &k.mul_i64(&k.pi_pow(4), 2),
        );
        let n = lhs.prec.min(direct.prec);
        assert!(k.eq_mod(&lhs, &direct, n).unwrap());
    }
}

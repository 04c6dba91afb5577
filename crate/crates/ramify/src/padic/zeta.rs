//! Roots of unity and root finding: ζ_p by digit-wise Hensel refinement, and a
//! generic digit-search root finder for Eisenstein polynomials (used to test
//! uniformizer independence).

use crate::error::{Error, Result};

use super::elt::PadicElement;
use super::field::Field;

impl Field {
    /// A primitive p-th root of unity ζ_p ∈ K, cached.
    ///
    /// Writing m = e/(p−1), ζ_p = 1 + z with v(z) = m. The leading digit d of z
    /// satisfies d^{p−1} = −ū_p where ū_p is the residue of p·π^{−e} (all other
    /// digits of (1+z)^p − 1 at level pm = m+e vanish for valuation reasons);
    /// the smallest solution in index order is chosen and refined one digit at
    /// a time: if (1+z)^p − 1 has valuation v, the digit at level v−e of the
    /// update is −(leading digit)·ū_p^{−1}, and v strictly increases.
    ///
    /// Errors if (p−1) ∤ e or the digit equation has no solution in 𝔽_q — in
    /// both cases K contains no primitive p-th root of unity.
    pub fn zeta_p(&self) -> Result<PadicElement> {
        self.zeta_cell.get_or_init(|| self.compute_zeta_p()).clone()
    }

    /// ζ_p − 1 (valuation m); convenience over [`Field::zeta_p`].
    pub fn zeta_p_minus_1(&self) -> Result<PadicElement> {
        let z = self.zeta_p()?;
        Ok(self.sub(&z, &self.one()))
    }

    fn compute_zeta_p(&self) -> Result<PadicElement> {
        let m = self.m_level()?;
        let fq = self.residue_field();
        let ubar = self.ok0_residue(&self.mu.c[0]);
        let target = fq.neg(&ubar);
        let mut lead = None;
        for idx in 1..self.q as usize {
            let d = fq.from_index(idx);
            if fq.pow(&d, self.p - 1) == target {
                lead = Some(d);
                break;
            }
        }
        let lead = lead.ok_or_else(|| {
            Error::config(format!(
                "K contains no primitive {}-th root of unity: x^{} = -p/pi^e has no residue solution",
                self.p,
                self.p - 1
            ))
        })?;

        let ubar_inv = fq.inv(&ubar)?;
        let mut z = self.digit_term(&lead, m);
        let one = self.one();
        let stop = self.n_prec + self.e;
        let max_iters = (self.n_prec + self.pm_level()? + 8) as usize;
        let mut last_v = -1i64;
        for _ in 0..max_iters {
            let g = self.sub(&self.pow_u(&self.add(&one, &z), self.p), &one);
            let vg = match self.val(&g) {
                None => {
                    // Vanishes at the full tracked precision: as good as it gets.
                    let mut zeta = self.add(&one, &z);
                    zeta.prec = zeta.prec.min(g.prec - self.e);
                    return Ok(zeta);
                }
                Some(v) => v,
            };
            if vg >= stop {
                let mut zeta = self.add(&one, &z);
                zeta.prec = zeta.prec.min(vg - self.e);
                return Ok(zeta);
            }
            if vg <= last_v {
                return Err(Error::precision(
                    "zeta_p refinement stalled (valuation of (1+z)^p - 1 stopped increasing)",
                ));
            }
            last_v = vg;
            // Digit correction at level vg - e: d = -lead(g) * ubar^{-1}.
            let g_lead = self.residue(&self.divide_by_pi_pow(&g, vg)?)?;
            let d = fq.neg(&fq.mul(&g_lead, &ubar_inv));
            z = self.add(&z, &self.digit_term(&d, vg - self.e));
        }
        Err(Error::precision("zeta_p refinement did not converge within the iteration budget"))
    }

    /// Finds a root of the monic polynomial Σ coeffs[i]·x^i (an Eisenstein
    /// polynomial over 𝒪_K is the intended input) by breadth-first digit
    /// search, returning the root that is smallest in digit-lexicographic
    /// order. The result is accurate modulo 𝔪^{prec} for the returned prec.
    pub fn find_eisenstein_root(&self, coeffs: &[PadicElement]) -> Result<PadicElement> {
        if coeffs.len() < 2 {
            return Err(Error::config("root search requires a polynomial of degree >= 1"));
        }
        let eval = |x: &PadicElement| -> PadicElement {
            let mut acc = self.zero();
            for c in coeffs.iter().rev() {
                acc = self.add(&self.mul(&acc, x), c);
            }
            acc
        };
        let fq = self.residue_field();
        let target = self.n_prec;
        // Partial expansions with the valuation of their defect.
        let mut frontier: Vec<(PadicElement, i64)> = vec![(self.zero(), self.vlow(&eval(&self.zero())))];
        for level in 1..=target {
            let mut next: Vec<(PadicElement, i64)> = Vec::new();
            for (z, vz) in &frontier {
                for idx in 0..self.q as usize {
                    let d = fq.from_index(idx);
                    let cand = if fq.is_zero(&d) {
                        z.clone()
                    } else {
                        self.add(z, &self.digit_term(&d, level))
                    };
                    let vc = self.vlow(&eval(&cand));
                    if vc > *vz || vc >= target + self.e {
                        next.push((cand, vc));
                    }
                }
            }
            if next.is_empty() {
                return Err(Error::config("the polynomial has no root in K (digit search exhausted)"));
            }
            next.sort_by(|a, b| b.1.cmp(&a.1));
            next.truncate(4 * self.e as usize);
            if next[0].1 >= target + self.e {
                let mut root = next.swap_remove(0).0;
                root.prec = root.prec.min(target);
                return Ok(root);
            }
            frontier = next;
        }
        Err(Error::config("root digit search did not converge"))
    }
}

#[cfg(test)]
mod tests {
    use crate::padic::testutil::{std_field, zeta9_field};

    #[test]
    fn zeta3_in_q9_zeta3_is_one_plus_pi() {
        let k = std_field();
        let zeta = k.zeta_p().unwrap();
        // For the Eisenstein polynomial x^2 + 3x + 3 (the minimal polynomial of
        // zeta_3 - 1), the chosen root is exactly 1 + pi.
        let expect = k.add(&k.one(), &k.pi());
        assert!(k.eq_mod(&zeta, &expect, zeta.prec).unwrap());
        // And it is a genuine primitive cube root: zeta^3 = 1, zeta != 1.
        let cube = k.pow_u(&zeta, 3);
        assert!(k.eq_mod(&cube, &k.one(), zeta.prec.min(cube.prec)).unwrap());
        assert_eq!(k.val(&k.sub(&zeta, &k.one())), Some(1));
    }

    #[test]
    fn zeta3_in_q9_zeta9() {
        let k = zeta9_field();
        let zeta = k.zeta_p().unwrap();
        let m = k.m_level().unwrap();
        assert_eq!(m, 3);
        assert_eq!(k.val(&k.sub(&zeta, &k.one())), Some(m));
        let cube = k.pow_u(&zeta, 3);
        assert!(k.eq_mod(&cube, &k.one(), zeta.prec.min(cube.prec) - 1).unwrap());
        // zeta_p = (1+pi)^3 in this model (pi = zeta_9 - 1): cross-check.
        let alt = k.pow_u(&k.add(&k.one(), &k.pi()), 3);
        assert!(k.eq_mod(&zeta, &alt, zeta.prec.min(alt.prec) - 1).unwrap() ||
                k.eq_mod(&k.pow_u(&zeta, 2), &alt, zeta.prec - 1).unwrap(),
                "zeta_p must be a power of (1+pi)^3");
    }

    #[test]
    fn no_zeta_p_without_ramification() {
        // Q_9 itself (e = 1) has no zeta_3.
        let k = crate::padic::Field::from_parts(3, &[2, 2, 1], &[&[3], &[1]], Some(8)).unwrap();
        assert!(k.zeta_p().is_err());
    }

    #[test]
    fn eisenstein_root_search_recovers_pi() {
        let k = std_field();
        // x^2 + 3x + 3 has a root congruent to pi.
        let coeffs = vec![k.from_i64(3), k.from_i64(3), k.one()];
        let root = k.find_eisenstein_root(&coeffs).unwrap();
        let check = k.add(&k.add(&k.mul(&root, &root), &k.mul_i64(&root, 3)), &k.from_i64(3));
        assert!(k.is_zero_mod(&check, k.n_prec));
        assert_eq!(k.val(&root), Some(1));
    }

    #[test]
    fn root_search_rejects_rootless_polynomials() {
        let k = std_field();
        // x^2 + pi has no root (it would need valuation 1/2).
        let coeffs = vec![k.pi(), k.zero(), k.one()];
        assert!(k.find_eisenstein_root(&coeffs).is_err());
    }
}

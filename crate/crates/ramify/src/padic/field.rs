//! The base field K = K₀(π): construction, validation, and coefficient-ring
//! (𝒪_{K₀} = W(𝔽_q)-style) arithmetic at a fixed working modulus p^{mw}.
//!
//! K₀ = ℚ_q is the unramified extension of ℚ_p with residue field 𝔽_q = 𝔽_p(ω̄),
//! realized as ℤ_p[ω]/(R(ω)) for the given monic lift R; K = K₀(π) where π is a
//! root of the given Eisenstein polynomial E of degree e. Elements of 𝒪_{K₀}
//! ("OK0 vectors") are length-f coefficient vectors in the power basis of ω,
//! each coordinate an integer modulo p^{mw}. Field elements live in
//! [`super::PadicElement`]; their arithmetic is implemented in `elt.rs`.
//!
//! The working modulus exponent mw is derived from the requested π-adic
//! precision with generous headroom for the exact-division steps performed by
//! higher layers; p^{mw} is capped below 2^62 so coordinate products fit u128.

use std::sync::OnceLock;

use crate::artin_hasse::EpTables;
use crate::error::{Error, Result};
use crate::vostokov::PairingTables;

use super::elt::PadicElement;
use super::fq::{is_prime, Fq, FqElt};

/// Extra coefficient digits kept beyond what the requested precision strictly
/// needs. Exact divisions by p (inside division by π, Laurent-series
/// integration, tower-element normalization) each consume one digit of this
/// headroom; the budget is sized so the deepest pipelines stay exact.
const MW_SLACK: u32 = 14;

/// A textual/structural description of the field K, as parsed from a field
/// file or built directly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    /// The residue characteristic (an odd prime).
    pub p: u64,
    /// Monic lift of the minimal polynomial of ω̄ over 𝔽_p, little-endian,
    /// degree f ≥ 1.
    pub residue_poly: Vec<i64>,
    /// Eisenstein polynomial E(x) = x^e + E_{e−1}x^{e−1} + … + E_0 over 𝒪_{K₀},
    /// little-endian in x; each coefficient is itself little-endian in ω.
    /// The leading coefficient must be [1].
    pub eisenstein_poly: Vec<Vec<i64>>,
    /// Requested absolute π-adic precision N (values are tracked mod 𝔪^N).
    /// `None` selects the default floor for the field.
    pub precision: Option<i64>,
}

impl FieldSpec {
    /// The minimal supported precision for this shape: enough to see past
    /// level pe/(p−1) (where p-th power structure lives) with margin.
    pub fn precision_floor(p: u64, e: i64) -> i64 {
        let pm = (p as i64) * e / (p as i64 - 1) + i64::from((e % (p as i64 - 1)) != 0);
        pm + e + 2
    }
}

/// The field K with all precomputed arithmetic tables.
pub struct Field {
    pub(crate) fq: Fq,
    /// Residue characteristic.
    pub p: u64,
    /// Residue degree f = [𝔽_q : 𝔽_p].
    pub f: usize,
    /// Ramification index e = [K : K₀] = v_K(p).
    pub e: i64,
    /// Residue field size q = p^f.
    pub q: u64,
    /// Absolute precision N: elements are meaningful mod 𝔪^N by default.
    pub n_prec: i64,
    /// Working modulus exponent: coefficients live mod p^{mw}.
    pub mw: u32,
    /// p^{mw}.
    pub(crate) pmw: u64,
    /// The spec this field was built from.
    pub(crate) spec: FieldSpec,
    /// ω^{f+t} expansions mod p^{mw}, t = 0..f−1.
    omega_rows: Vec<Vec<u64>>,
    /// φ^i(ω) for i = 0..f, where φ is the Frobenius of K₀/ℚ_p.
    frob_pows: Vec<Vec<u64>>,
    /// Lifted Eisenstein coefficients E_0..E_{e−1} (OK0 vectors mod p^{mw}).
    pub(crate) eis: Vec<Vec<u64>>,
    /// π^{e+t} = Σ_i pi_rows[t][i] π^i for t = 0..e−1.
    pi_rows: Vec<Vec<Vec<u64>>>,
    /// μ = p·π^{−e}, a unit of 𝒪_K.
    pub(crate) mu: PadicElement,
    /// μ·π^{e−1} = p·π^{−1}; used for exact division by π.
    pub(crate) mu_shift: PadicElement,
    /// Teichmüller lifts indexed by residue-element index.
    teich_table: Vec<Vec<u64>>,
    /// Lazily computed primitive p-th root of unity.
    pub(crate) zeta_cell: OnceLock<Result<PadicElement>>,
    /// Lazily computed Artin–Hasse coefficient tables.
    pub(crate) ep_cell: OnceLock<Result<EpTables>>,
    /// Lazily computed pairing tables (s-series inverses per window).
    pub(crate) pairing_cell: OnceLock<Result<PairingTables>>,
    /// Multiplier applied to every Laurent window when the pairing tables are
    /// first built (1 unless widened via [`Field::with_window_scale`]).
    pub(crate) window_scale: i64,
}

impl std::fmt::Debug for Field {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("Field")
            .field("p", &self.p)
            .field("f", &self.f)
            .field("e", &self.e)
            .field("n_prec", &self.n_prec)
            .field("mw", &self.mw)
            .finish()
    }
}

impl Field {
    /// Builds and validates the field, precomputing all arithmetic tables.
    pub fn new(spec: &FieldSpec) -> Result<Self> {
        let p = spec.p;
        if !is_prime(p) || p == 2 {
            return Err(Error::config(format!("p = {p} must be an odd prime")));
        }
        let fq = Fq::new(p, &spec.residue_poly)?;
        let f = fq.f;
        let q = fq.q;

        if spec.eisenstein_poly.len() < 2 {
            return Err(Error::config("Eisenstein polynomial must have degree >= 1"));
        }
        let e = (spec.eisenstein_poly.len() - 1) as i64;
        let lead = &spec.eisenstein_poly[e as usize];
        if lead.len() != 1 || lead[0] != 1 {
            return Err(Error::config("Eisenstein polynomial must be monic with leading coefficient [1]"));
        }
        for (i, c) in spec.eisenstein_poly.iter().enumerate() {
            if c.is_empty() || c.len() > f {
                return Err(Error::config(format!(
                    "Eisenstein coefficient {i} must have between 1 and f = {f} entries"
                )));
            }
        }

        let floor = FieldSpec::precision_floor(p, e);
        let n_prec = spec.precision.unwrap_or(floor);
        if n_prec < floor {
            return Err(Error::config(format!(
                "precision {n_prec} is below the floor {floor} for p = {p}, e = {e}"
            )));
        }
        if n_prec > 10_000 {
            return Err(Error::config("precision exceeds the supported bound 10000"));
        }

        let mw = (n_prec as u64).div_ceil(e as u64) as u32 + 1 + MW_SLACK;
        let mut pmw: u64 = 1;
        for _ in 0..mw {
            pmw = pmw
                .checked_mul(p)
                .filter(|&m| m < (1u64 << 62))
                .ok_or_else(|| {
                    Error::config(format!(
                        "working modulus p^{mw} does not fit the u64 coefficient backend; \
                         lower the precision"
                    ))
                })?;
        }

        // --- OK0 reduction rows: omega^{f+t} mod p^mw ---
        let rp_lift: Vec<u64> = spec
            .residue_poly
            .iter()
            .map(|&c| (c as i128).rem_euclid(pmw as i128) as u64)
            .collect();
        let mm = |a: u64, b: u64| ((a as u128 * b as u128) % pmw as u128) as u64;
        let mut omega_rows: Vec<Vec<u64>> = Vec::new();
        if f >= 2 {
            let base: Vec<u64> = (0..f).map(|i| (pmw - rp_lift[i] % pmw) % pmw).collect();
            let mut cur = base.clone();
            for _ in 0..f - 1 {
                omega_rows.push(cur.clone());
                let top = cur[f - 1];
                let mut next = vec![0u64; f];
                for i in (1..f).rev() {
                    next[i] = cur[i - 1];
                }
                for i in 0..f {
                    next[i] = (next[i] + mm(top, base[i])) % pmw;
                }
                cur = next;
            }
        }

        // Partially initialized field: enough structure for OK0 arithmetic.
        let mut k = Field {
            fq,
            p,
            f,
            e,
            q,
            n_prec,
            mw,
            pmw,
            spec: spec.clone(),
            omega_rows,
            frob_pows: Vec::new(),
            eis: Vec::new(),
            pi_rows: Vec::new(),
            mu: PadicElement::raw(vec![vec![0; f]; e as usize], mw, 0),
            mu_shift: PadicElement::raw(vec![vec![0; f]; e as usize], mw, 0),
            teich_table: Vec::new(),
            zeta_cell: OnceLock::new(),
            ep_cell: OnceLock::new(),
            pairing_cell: OnceLock::new(),
            window_scale: 1,
        };

        // --- Frobenius of K0: the root of R congruent to omega^p mod p ---
        k.frob_pows = k.build_frobenius_powers(&rp_lift)?;

        // --- Teichmüller lifts (x -> x^q iteration) ---
        k.teich_table = k.build_teich_table();

        // --- Eisenstein data: lift, validate, pi-reduction rows ---
        let mut eis: Vec<Vec<u64>> = Vec::with_capacity(e as usize);
        // Lift coefficients with one extra p-digit so E_i / p is exact.
        let pmw1 = pmw.checked_mul(p).ok_or_else(|| Error::config("modulus overflow"))?;
        let mut eis_over_p: Vec<Vec<u64>> = Vec::with_capacity(e as usize);
        for i in 0..e as usize {
            let c = &spec.eisenstein_poly[i];
            let mut v1 = vec![0u64; f];
            for (j, &cj) in c.iter().enumerate() {
                v1[j] = (cj as i128).rem_euclid(pmw1 as i128) as u64;
            }
            if v1.iter().any(|&x| x % p != 0) {
                return Err(Error::config(format!(
                    "coefficient {i} of the Eisenstein polynomial is not divisible by p"
                )));
            }
            let over_p: Vec<u64> = v1.iter().map(|&x| (x / p) % pmw).collect();
            if i == 0 && over_p.iter().all(|&x| x % p == 0) {
                return Err(Error::config(
                    "constant coefficient of the Eisenstein polynomial is divisible by p^2",
                ));
            }
            eis_over_p.push(over_p);
            eis.push(v1.iter().map(|&x| x % pmw).collect());
        }
        k.eis = eis;

        // pi^{e+t} rows.
        let e_us = e as usize;
        let mut pi_rows: Vec<Vec<Vec<u64>>> = Vec::with_capacity(e_us);
        let base: Vec<Vec<u64>> = (0..e_us).map(|i| k.ok0_neg(&k.eis[i])).collect();
        let mut cur = base.clone();
        for _ in 0..e_us {
            pi_rows.push(cur.clone());
            let top = cur[e_us - 1].clone();
            let mut next: Vec<Vec<u64>> = vec![vec![0; f]; e_us];
            for i in (1..e_us).rev() {
                next[i] = cur[i - 1].clone();
            }
            for i in 0..e_us {
                next[i] = k.ok0_add(&next[i], &k.ok0_mul(&top, &base[i]));
            }
            cur = next;
        }
        k.pi_rows = pi_rows;

        // --- mu = p / pi^e ---
        // pi^e = -(E_0 + E_1 pi + ...) = -p (eps + S/p...) with eps = E_0/p a unit:
        // pi^e = -p * eps * (1 + eps^{-1} * sum_{i>=1} (E_i/p) pi^i),
        // hence mu = p/pi^e = -eps^{-1} * (1 + ...)^{-1}, a unit of O_K.
        let eps = eis_over_p[0].clone();
        let eps_inv = k.ok0_inv(&eps)?;
        let mut one_plus = k.one();
        for (i, c) in eis_over_p.iter().enumerate().skip(1) {
            let coeff = k.ok0_mul(&eps_inv, c);
            one_plus = k.add(&one_plus, &k.monomial(&coeff, i as i64));
        }
        let inv = k.unit_inv(&one_plus)?;
        let mut mu = k.mul_scalar_ok0(&inv, &eps_inv);
        mu = k.neg(&mu);
        k.mu = mu.clone();
        k.mu_shift = k.mul(&mu, &k.pi_pow(e - 1));

        // Consistency: pi^e * mu == p at full stored precision.
        let lhs = k.mul(&k.pi_pow(e), &k.mu);
        let rhs = k.from_i64(p as i64);
        let check_prec = lhs.prec.min(rhs.prec);
        if !k.eq_mod(&lhs, &rhs, check_prec)? {
            return Err(Error::config(
                "internal consistency failure: pi^e * (p/pi^e) != p (bad Eisenstein data?)",
            ));
        }

        Ok(k)
    }

    /// Convenience constructor for specs written directly in code.
    pub fn from_parts(
        p: u64,
        residue_poly: &[i64],
        eisenstein_poly: &[&[i64]],
        precision: Option<i64>,
    ) -> Result<Self> {
        Field::new(&FieldSpec {
            p,
            residue_poly: residue_poly.to_vec(),
            eisenstein_poly: eisenstein_poly.iter().map(|c| c.to_vec()).collect(),
            precision,
        })
    }

    /// The spec this field was constructed from.
    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    /// Widens every Laurent-series window used by the residue pairing by the
    /// factor `scale` (≥ 1). Consumes the field so the widened tables are
    /// built lazily on first use; stability checks re-run a whole pipeline on
    /// a scaled copy and compare reports.
    pub fn with_window_scale(mut self, scale: i64) -> Result<Self> {
        if scale < 1 {
            return Err(Error::config("window scale must be at least 1"));
        }
        self.window_scale = scale;
        self.pairing_cell = OnceLock::new();
        Ok(self)
    }

    /// m = e/(p−1); errors when not integral (then ζ_p ∉ K for valuation reasons).
    pub fn m_level(&self) -> Result<i64> {
        let pm1 = self.p as i64 - 1;
        if self.e % pm1 != 0 {
            return Err(Error::config(format!(
                "e = {} is not divisible by p - 1 = {pm1}, so K contains no primitive p-th root of unity",
                self.e
            )));
        }
        Ok(self.e / pm1)
    }

    /// pm = pe/(p−1) = v_K(ζ_p − 1)·…: the level of p-th power structure.
    pub fn pm_level(&self) -> Result<i64> {
        Ok(self.p as i64 * self.m_level()?)
    }

    /// Access to the residue field.
    pub fn residue_field(&self) -> &Fq {
        &self.fq
    }

    // ------------------------------------------------------------------
    // OK0 arithmetic (coefficient vectors over omega, mod p^mw)
    // ------------------------------------------------------------------

    #[inline]
    pub(crate) fn mm(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.pmw as u128) as u64
    }

    pub(crate) fn ok0_zero(&self) -> Vec<u64> {
        vec![0; self.f]
    }

    pub(crate) fn ok0_one(&self) -> Vec<u64> {
        let mut v = vec![0; self.f];
        v[0] = 1;
        v
    }

    pub(crate) fn ok0_from_i64(&self, n: i64) -> Vec<u64> {
        let mut v = vec![0; self.f];
        v[0] = (n as i128).rem_euclid(self.pmw as i128) as u64;
        v
    }

    /// Lifts a little-endian integer vector over ω-powers into OK0.
    #[cfg(test)]
    pub(crate) fn ok0_lift(&self, c: &[i64]) -> Result<Vec<u64>> {
        if c.len() > self.f {
            return Err(Error::config(format!(
                "coefficient vector of length {} exceeds f = {}",
                c.len(),
                self.f
            )));
        }
        let mut v = vec![0u64; self.f];
        for (j, &cj) in c.iter().enumerate() {
            v[j] = (cj as i128).rem_euclid(self.pmw as i128) as u64;
        }
        Ok(v)
    }

    pub(crate) fn ok0_is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub(crate) fn ok0_add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        (0..self.f).map(|i| (a[i] + b[i]) % self.pmw).collect()
    }

    pub(crate) fn ok0_sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        (0..self.f).map(|i| (a[i] + self.pmw - b[i]) % self.pmw).collect()
    }

    pub(crate) fn ok0_neg(&self, a: &[u64]) -> Vec<u64> {
        (0..self.f).map(|i| (self.pmw - a[i]) % self.pmw).collect()
    }

    pub(crate) fn ok0_scalar(&self, c: u64, a: &[u64]) -> Vec<u64> {
        (0..self.f).map(|i| self.mm(c, a[i])).collect()
    }

    pub(crate) fn ok0_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let f = self.f;
        if f == 1 {
            return vec![self.mm(a[0], b[0])];
        }
        let mut wide = vec![0u64; 2 * f - 1];
        for i in 0..f {
            if a[i] == 0 {
                continue;
            }
            for j in 0..f {
                wide[i + j] = (wide[i + j] + self.mm(a[i], b[j])) % self.pmw;
            }
        }
        let mut out: Vec<u64> = wide[..f].to_vec();
        for t in 0..f - 1 {
            let c = wide[f + t];
            if c == 0 {
                continue;
            }
            for i in 0..f {
                out[i] = (out[i] + self.mm(c, self.omega_rows[t][i])) % self.pmw;
            }
        }
        out
    }

    pub(crate) fn ok0_pow(&self, a: &[u64], mut n: u64) -> Vec<u64> {
        let mut base = a.to_vec();
        let mut acc = self.ok0_one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.ok0_mul(&acc, &base);
            }
            base = self.ok0_mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    /// p-adic valuation of a u64 residue, capped at `cap`.
    #[inline]
    pub(crate) fn vp_u64(&self, mut x: u64, cap: u32) -> u32 {
        if x == 0 {
            return cap;
        }
        let mut v = 0;
        while v < cap && x % self.p == 0 {
            x /= self.p;
            v += 1;
        }
        v
    }

    /// Minimal p-valuation over the coordinates, capped.
    pub(crate) fn ok0_vp(&self, a: &[u64], cap: u32) -> u32 {
        a.iter().map(|&c| self.vp_u64(c, cap)).min().unwrap_or(cap)
    }

    /// Reduction to the residue field.
    pub(crate) fn ok0_residue(&self, a: &[u64]) -> FqElt {
        a.iter().map(|&c| c % self.p).collect()
    }

    /// Exact division by p; the caller guarantees divisibility (checked).
    pub(crate) fn ok0_div_p(&self, a: &[u64]) -> Result<Vec<u64>> {
        if a.iter().any(|&c| c % self.p != 0) {
            return Err(Error::precision("exact division by p of a non-divisible coefficient"));
        }
        Ok(a.iter().map(|&c| c / self.p).collect())
    }

    /// Inverse of a unit of 𝒪_{K₀} (residue nonzero), by Hensel/Newton lifting.
    pub(crate) fn ok0_inv(&self, a: &[u64]) -> Result<Vec<u64>> {
        let r = self.ok0_residue(a);
        if self.fq.is_zero(&r) {
            return Err(Error::config("inversion of a non-unit in O_K0"));
        }
        let r_inv = self.fq.inv(&r)?;
        let mut z: Vec<u64> = r_inv.clone();
        let iters = 64 - u64::from(self.mw).leading_zeros() + 2;
        for _ in 0..iters {
            // z <- z(2 - a z)
            let az = self.ok0_mul(a, &z);
            let two_minus = self.ok0_sub(&self.ok0_scalar(2, &self.ok0_one()), &az);
            z = self.ok0_mul(&z, &two_minus);
        }
        Ok(z)
    }

    /// The Frobenius φ of K₀/ℚ_p applied to an OK0 vector (evaluation of the
    /// underlying polynomial at φ(ω)).
    pub(crate) fn ok0_frobenius(&self, a: &[u64]) -> Vec<u64> {
        self.ok0_apply_root(a, &self.frob_pows[1])
    }

    /// Tr_{K₀/ℚ_p}(a) as a scalar residue mod p^{mw} (returned as OK0 constant).
    pub(crate) fn ok0_trace(&self, a: &[u64]) -> u64 {
        let mut acc = self.ok0_zero();
        for i in 0..self.f {
            acc = self.ok0_add(&acc, &self.ok0_apply_root(a, &self.frob_pows[i]));
        }
        // The trace lands in Z_p: upper coordinates must vanish.
        debug_assert!(acc[1..].iter().all(|&c| c == 0), "trace not rational");
        acc[0]
    }

    /// Evaluates the polynomial with coefficients `a` (in the ω-power basis)
    /// at the OK0 element `root` (Horner).
    fn ok0_apply_root(&self, a: &[u64], root: &[u64]) -> Vec<u64> {
        let mut acc = self.ok0_zero();
        for i in (0..self.f).rev() {
            acc = self.ok0_mul(&acc, root);
            acc[0] = (acc[0] + a[i]) % self.pmw;
        }
        acc
    }

    /// Teichmüller lift of a residue element, as an OK0 vector.
    pub(crate) fn ok0_teich(&self, r: &[u64]) -> Vec<u64> {
        self.teich_table[self.fq.index(r)].clone()
    }

    fn build_teich_table(&self) -> Vec<Vec<u64>> {
        let mut table = Vec::with_capacity(self.q as usize);
        for idx in 0..self.q as usize {
            let r = self.fq.from_index(idx);
            let mut x: Vec<u64> = r.clone();
            // x -> x^q converges linearly (one digit per step) to the lift.
            for _ in 0..self.mw + 2 {
                let next = self.ok0_pow(&x, self.q);
                if next == x {
                    break;
                }
                x = next;
            }
            table.push(x);
        }
        table
    }

    fn build_frobenius_powers(&self, rp_lift: &[u64]) -> Result<Vec<Vec<u64>>> {
        let f = self.f;
        let mut pows: Vec<Vec<u64>> = Vec::with_capacity(f);
        // phi^0(omega) = omega.
        let omega = if f == 1 {
            vec![(self.pmw - rp_lift[0] % self.pmw) % self.pmw]
        } else {
            let mut v = vec![0u64; f];
            v[1] = 1;
            v
        };
        pows.push(omega.clone());
        if f == 1 {
            return Ok(pows);
        }
        // phi(omega): Newton on R starting from omega^p.
        let rp: Vec<Vec<u64>> = (0..=f)
            .map(|i| {
                let mut v = vec![0u64; f];
                v[0] = rp_lift[i];
                v
            })
            .collect();
        let eval = |x: &[u64]| -> Vec<u64> {
            let mut acc = self.ok0_zero();
            for i in (0..=f).rev() {
                acc = self.ok0_mul(&acc, x);
                acc = self.ok0_add(&acc, &rp[i]);
            }
            acc
        };
        let eval_deriv = |x: &[u64]| -> Vec<u64> {
            let mut acc = self.ok0_zero();
            for i in (1..=f).rev() {
                acc = self.ok0_mul(&acc, x);
                acc = self.ok0_add(&acc, &self.ok0_scalar(i as u64, &rp[i]));
            }
            acc
        };
        let mut x = self.ok0_pow(&omega, self.p);
        let iters = 64 - u64::from(self.mw).leading_zeros() + 2;
        for _ in 0..iters {
            let fx = eval(&x);
            if self.ok0_is_zero(&fx) {
                break;
            }
            let dfx = eval_deriv(&x);
            let step = self.ok0_mul(&fx, &self.ok0_inv(&dfx)?);
            x = self.ok0_sub(&x, &step);
        }
        if !self.ok0_is_zero(&eval(&x)) {
            return Err(Error::config("failed to lift the Frobenius root of the residue polynomial"));
        }
        pows.push(x);
        for i in 2..f {
            let prev = pows[i - 1].clone();
            pows.push(self.ok0_apply_root(&prev, &pows[1]));
        }
        Ok(pows)
    }

    pub(crate) fn pi_row(&self, t: usize) -> &[Vec<u64>] {
        &self.pi_rows[t]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::testutil::std_field;

    #[test]
    fn construction_validates_inputs() {
        // Non-Eisenstein: constant term not divisible by p.
        assert!(Field::from_parts(3, &[2, 2, 1], &[&[1], &[3], &[1]], None).is_err());
        // Constant term divisible by p^2.
        assert!(Field::from_parts(3, &[2, 2, 1], &[&[9], &[3], &[1]], None).is_err());
        // Non-monic.
        assert!(Field::from_parts(3, &[2, 2, 1], &[&[3], &[3], &[2]], None).is_err());
        // Precision below floor.
        assert!(Field::from_parts(3, &[2, 2, 1], &[&[3], &[3], &[1]], Some(3)).is_err());
        // Good field.
        let k = std_field();
        assert_eq!(k.e, 2);
        assert_eq!(k.q, 9);
        assert_eq!(k.pm_level().unwrap(), 3);
    }

    #[test]
    fn ok0_ring_axioms() {
        let k = std_field();
        let a = k.ok0_lift(&[5, 7]).unwrap();
        let b = k.ok0_lift(&[-2, 11]).unwrap();
        let c = k.ok0_lift(&[1, -4]).unwrap();
        let ab_c = k.ok0_mul(&k.ok0_mul(&a, &b), &c);
        let a_bc = k.ok0_mul(&a, &k.ok0_mul(&b, &c));
        assert_eq!(ab_c, a_bc);
        let dist = k.ok0_mul(&a, &k.ok0_add(&b, &c));
        let dist2 = k.ok0_add(&k.ok0_mul(&a, &b), &k.ok0_mul(&a, &c));
        assert_eq!(dist, dist2);
    }

    #[test]
    fn ok0_inverse_is_exact() {
        let k = std_field();
        let a = k.ok0_lift(&[4, 9]).unwrap(); // unit: residue (1, 0) != 0
        let ai = k.ok0_inv(&a).unwrap();
        assert_eq!(k.ok0_mul(&a, &ai), k.ok0_one());
        // Non-units are rejected.
        let b = k.ok0_lift(&[3, 6]).unwrap();
        assert!(k.ok0_inv(&b).is_err());
    }

    #[test]
    fn frobenius_fixes_rationals_and_has_order_f() {
        let k = std_field();
        let a = k.ok0_lift(&[17]).unwrap();
        assert_eq!(k.ok0_frobenius(&a), a);
        let w = k.ok0_lift(&[0, 1]).unwrap();
        let fw = k.ok0_frobenius(&w);
        assert_ne!(fw, w);
        assert_eq!(k.ok0_frobenius(&fw), w, "phi^2 = id on K0 with f = 2");
        // phi(omega) reduces to omega^p mod p.
        assert_eq!(k.ok0_residue(&fw), k.fq.frobenius(&k.fq.omega()));
    }

    #[test]
    fn trace_matches_sum_of_conjugates() {
        let k = std_field();
        let w = k.ok0_lift(&[0, 1]).unwrap();
        let tr = k.ok0_trace(&w);
        // Tr(omega) = omega + phi(omega) = -(coefficient of x in R) = -2.
        let expect = (-2i128).rem_euclid(k.pmw as i128) as u64;
        assert_eq!(tr, expect);
        // Trace is phi-invariant.
        assert_eq!(k.ok0_trace(&k.ok0_frobenius(&w)), tr);
    }

    #[test]
    fn teichmuller_lifts_are_roots_of_unity() {
        let k = std_field();
        for r in k.fq.all_elements() {
            let t = k.ok0_teich(&r);
            assert_eq!(k.ok0_residue(&t), r);
            assert_eq!(k.ok0_pow(&t, k.q), t, "teich lift must satisfy x^q = x");
        }
        // Multiplicativity.
        let a = k.fq.from_index(5);
        let b = k.fq.from_index(7);
        let ab = k.fq.mul(&a, &b);
        assert_eq!(k.ok0_mul(&k.ok0_teich(&a), &k.ok0_teich(&b)), k.ok0_teich(&ab));
        // teich(-1) = -1: for p = 3, -1 in F_9 has index of the vector (2, 0).
        let m1 = k.fq.from_u64(2);
        assert_eq!(k.ok0_teich(&m1), k.ok0_lift(&[-1]).unwrap());
    }
}

//! Explicit arithmetic in the Kummer tower L = K(y₁, y₂), y_i^p = 1 + ρ_i,
//! and direct extraction of its ramification data.
//!
//! This module is the brute-force side of the dual verification.  Where the
//! rest of the library works entirely inside K (norm subgroups, pairings,
//! unit filtrations), here we construct the degree-p² extension L itself and
//! measure everything by valuations in L.  The work splits into two phases
//! with different representations:
//!
//! 1. **Construction phase** (y-basis).  Elements of L are π_K-denominator-
//!    tracked vectors over the monomial basis {y₁^a y₂^c : 0 ≤ a, c < p},
//!    with y_i^p reduced to the unit 1 + ρ_i.  The Galois action is diagonal
//!    (σ_{(m₁,m₂)} scales the (a, c) coordinate by ζ_p^{m₁a + m₂c}),
//!    valuations come from norms (v_L(x) = v_K(N_{L/K}(x)), the norm being
//!    the product of all p² conjugates), and a uniformizer π_L is built in
//!    two floors: a Bézout combination of y₁ − 1 and π_K reaches valuation p
//!    on K(y₁), then 1 + ρ₂ is driven to its stable level by multiplicative
//!    p-th power corrections and a second Bézout combination reaches
//!    valuation 1.  Denominators concentrate precision loss in this basis,
//!    so the phase ends as soon as π_L and the matrix of multiplication by
//!    π_L are known.
//!
//! 2. **Measurement phase** (π_L-basis).  The minimal polynomial g of π_L is
//!    the characteristic polynomial of that multiplication matrix, computed
//!    division-free (Berkowitz), and all further work happens in the ring
//!    R = 𝒪_K[X]/(g) ≅ 𝒪_L, where coordinates are integral, valuations are
//!    exact coordinate minima (the terms a_j X^j have pairwise distinct
//!    valuations mod p²), and digit extraction never divides.  The p² − 1
//!    non-trivial automorphisms are recovered as the other roots of g by
//!    digit-by-digit Hensel refinement inside R and organised into a labelled
//!    (ℤ/p)² acting through p² × p² matrices over 𝒪_K.
//!
//! From this the module computes the invariants reported by
//! [`OracleReport`]: the ordinary ramification break b (read off the root
//! separation of g and checked on every automorphism), the indices of
//! inseparability i₀ ≥ i₁ ≥ i₂ = 0 — both from the digits of π_K along
//! powers of π_L and, independently, from the valuations of the coefficients
//! of g — and the refined break b_*, the valuation of the truncated-binomial
//! operator σ₁∘σ₂^{[−δ]} − 1 acting on 𝒪_L.

use crate::error::{Error, Result};
use crate::invariants::ExtensionSpec;
use crate::padic::{Field, FqElt, PadicElement};
use crate::report::OracleReport;

/// An element of L = K(y₁, y₂), stored as π_K^{−scale} · Σ c_{a,c} y₁^a y₂^c
/// with integral coordinates c_{a,c} ∈ 𝒪_K.
///
/// The ring of integers 𝒪_L is strictly larger than 𝒪_K[y₁, y₂], so useful
/// integral elements of L (uniformizers in particular) need denominators in
/// this basis; `scale` tracks the π_K-power that has been factored out.
/// Arithmetic keeps `scale` minimal, which bounds it by the conductor of the
/// order 𝒪_K[y₁, y₂] in 𝒪_L and keeps the precision loss bounded.
#[derive(Clone, Debug)]
pub struct TowerElement {
    /// Coordinates over the monomial basis, indexed by a·p + c ↔ y₁^a y₂^c.
    c: Vec<PadicElement>,
    /// The factored-out π_K-power: the element is π_K^{−scale} · Σ c · y.
    scale: i64,
}

/// Arithmetic context for the tower: the base field together with the two
/// Kummer units u_i = 1 + ρ_i and the p-th roots of unity that drive the
/// Galois action.
pub struct Tower<'a> {
    field: &'a Field,
    /// p as usize, for basis indexing.
    np: usize,
    /// Carry factors u₁^{ε₁}·u₂^{ε₂} for reducing y-exponent overflow,
    /// indexed by ε₁·2 + ε₂.
    carry: Vec<PadicElement>,
    /// ζ_p^m for m ∈ [0, p).
    zeta_pows: Vec<PadicElement>,
}

impl<'a> Tower<'a> {
    /// Sets up tower arithmetic for the extension described by `spec`.
    ///
    /// The spec must have been validated on (an identically-shaped copy of)
    /// `field`; the Kummer units and ζ_p are derived here.
    pub fn new(field: &'a Field, spec: &ExtensionSpec) -> Result<Self> {
        if spec.rho1.c.len() != field.e as usize
            || spec.rho1.c.first().map(Vec::len) != Some(field.f)
        {
            return Err(Error::config(
                "extension datum was built on a field with a different shape",
            ));
        }
        let one = field.one();
        let u1 = field.add(&one, &spec.rho1);
        let u2 = field.add(&one, &spec.rho2);
        let u12 = field.mul(&u1, &u2);
        let zeta = field.zeta_p()?;
        let mut zeta_pows = Vec::with_capacity(field.p as usize);
        let mut z = one.clone();
        for _ in 0..field.p {
            zeta_pows.push(z.clone());
            z = field.mul(&z, &zeta);
        }
        Ok(Tower {
            field,
            np: field.p as usize,
            carry: vec![one, u2, u1, u12],
            zeta_pows,
        })
    }

    /// The base field.
    pub fn field(&self) -> &Field {
        self.field
    }

    fn dim(&self) -> usize {
        self.np * self.np
    }

    /// The zero element.
    pub fn zero(&self) -> TowerElement {
        TowerElement {
            c: vec![self.field.zero(); self.dim()],
            scale: 0,
        }
    }

    /// The multiplicative identity.
    pub fn one(&self) -> TowerElement {
        self.from_k(&self.field.one())
    }

    /// Embeds a base-field element into the tower.
    pub fn from_k(&self, x: &PadicElement) -> TowerElement {
        let mut c = vec![self.field.zero(); self.dim()];
        c[0] = x.clone();
        TowerElement { c, scale: 0 }
    }

    /// The first Kummer generator y₁ (a p-th root of 1 + ρ₁).
    pub fn y1(&self) -> TowerElement {
        let mut c = vec![self.field.zero(); self.dim()];
        c[self.np] = self.field.one();
        TowerElement { c, scale: 0 }
    }

    /// The second Kummer generator y₂ (a p-th root of 1 + ρ₂).
    pub fn y2(&self) -> TowerElement {
        let mut c = vec![self.field.zero(); self.dim()];
        c[1] = self.field.one();
        TowerElement { c, scale: 0 }
    }

    /// Re-encodes the coordinates canonically at their tracked precision.
    ///
    /// Exact π-divisions consume stored digit width; re-encoding restores the
    /// full width so that long strip chains cannot exhaust it.
    fn refresh(&self, x: &mut TowerElement) {
        for c in &mut x.c {
            if let Ok(r) = self.field.reduce_mod(c, c.prec) {
                *c = r;
            }
        }
    }

    /// Strips common π_K-divisibility from the coordinates into `scale`,
    /// keeping the denominator exponent minimal.
    fn normalize(&self, x: &mut TowerElement) {
        self.refresh(x);
        'strip: while x.scale > 0 {
            let mut reduced = Vec::with_capacity(x.c.len());
            for coeff in &x.c {
                match self.field.divide_by_pi(coeff) {
                    Ok(d) => reduced.push(d),
                    Err(_) => break 'strip,
                }
            }
            x.c = reduced;
            x.scale -= 1;
            self.refresh(x);
        }
    }

    /// Coordinates of x rescaled to a common denominator exponent s ≥ x.scale.
    fn coords_at_scale(&self, x: &TowerElement, s: i64) -> Vec<PadicElement> {
        debug_assert!(s >= x.scale);
        if s == x.scale {
            return x.c.clone();
        }
        let shift = self.field.pi_pow(s - x.scale);
        x.c.iter().map(|c| self.field.mul(c, &shift)).collect()
    }

    /// x + y.
    pub fn add(&self, x: &TowerElement, y: &TowerElement) -> TowerElement {
        let s = x.scale.max(y.scale);
        let xc = self.coords_at_scale(x, s);
        let yc = self.coords_at_scale(y, s);
        let c = xc
            .iter()
            .zip(&yc)
            .map(|(a, b)| self.field.add(a, b))
            .collect();
        let mut out = TowerElement { c, scale: s };
        self.normalize(&mut out);
        out
    }

    /// −x.
    pub fn neg(&self, x: &TowerElement) -> TowerElement {
        TowerElement {
            c: x.c.iter().map(|a| self.field.neg(a)).collect(),
            scale: x.scale,
        }
    }

    /// x − y.
    pub fn sub(&self, x: &TowerElement, y: &TowerElement) -> TowerElement {
        self.add(x, &self.neg(y))
    }

    /// x · y, reducing y_i^p to the Kummer unit 1 + ρ_i.
    pub fn mul(&self, x: &TowerElement, y: &TowerElement) -> TowerElement {
        let p = self.np;
        let mut c = vec![self.field.zero(); self.dim()];
        for (i, xi) in x.c.iter().enumerate() {
            if self.field.val(xi).is_none() {
                continue;
            }
            let (a1, c1) = (i / p, i % p);
            for (j, yj) in y.c.iter().enumerate() {
                if self.field.val(yj).is_none() {
                    continue;
                }
                let (a2, c2) = (j / p, j % p);
                let (mut a, mut cc) = (a1 + a2, c1 + c2);
                let mut carry = 0usize;
                if a >= p {
                    a -= p;
                    carry |= 2;
                }
                if cc >= p {
                    cc -= p;
                    carry |= 1;
                }
                let mut t = self.field.mul(xi, yj);
                if carry != 0 {
                    t = self.field.mul(&t, &self.carry[carry]);
                }
                let slot = &mut c[a * p + cc];
                *slot = self.field.add(slot, &t);
            }
        }
        let mut out = TowerElement {
            c,
            scale: x.scale + y.scale,
        };
        self.normalize(&mut out);
        out
    }

    /// x · κ for a base-field scalar κ.
    pub fn mul_k(&self, x: &TowerElement, kappa: &PadicElement) -> TowerElement {
        let mut out = TowerElement {
            c: x.c.iter().map(|a| self.field.mul(a, kappa)).collect(),
            scale: x.scale,
        };
        self.normalize(&mut out);
        out
    }

    /// x · π_K^n for any n ∈ ℤ (negative powers go into the denominator).
    pub fn mul_pi_signed(&self, x: &TowerElement, n: i64) -> TowerElement {
        let mut out = if n >= 0 {
            self.mul_k(x, &self.field.pi_pow(n))
        } else {
            TowerElement {
                c: x.c.clone(),
                scale: x.scale - n,
            }
        };
        self.normalize(&mut out);
        out
    }

    /// x^n for n ≥ 0.
    pub fn pow_u(&self, x: &TowerElement, mut n: u64) -> TowerElement {
        let mut acc = self.one();
        let mut base = x.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// x^n for any n ∈ ℤ (x must be invertible when n < 0).
    pub fn pow_i(&self, x: &TowerElement, n: i64) -> Result<TowerElement> {
        if n >= 0 {
            Ok(self.pow_u(x, n as u64))
        } else {
            let xi = self.inv(x)?;
            Ok(self.pow_u(&xi, (-n) as u64))
        }
    }

    /// The automorphism σ_{(m₁,m₂)} : y_i ↦ ζ_p^{m_i} y_i, applied to x.
    pub fn galois(&self, x: &TowerElement, m1: u64, m2: u64) -> TowerElement {
        let p = self.np as u64;
        let c = x
            .c
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let (e1, e2) = ((i / self.np) as u64, (i % self.np) as u64);
                let m = (m1 * e1 + m2 * e2) % p;
                if m == 0 {
                    a.clone()
                } else {
                    self.field.mul(a, &self.zeta_pows[m as usize])
                }
            })
            .collect();
        TowerElement { c, scale: x.scale }
    }

    /// Π_{σ ≠ 1} σ(x) over the p² − 1 non-trivial automorphisms.
    fn conjugate_product(&self, x: &TowerElement) -> TowerElement {
        let p = self.np as u64;
        let mut acc = self.one();
        for m1 in 0..p {
            for m2 in 0..p {
                if m1 == 0 && m2 == 0 {
                    continue;
                }
                acc = self.mul(&acc, &self.galois(x, m1, m2));
            }
        }
        acc
    }

    /// N_{L/K}(x) as a pair (n₀, shift) with N(x) = π_K^{−shift} · n₀.
    ///
    /// The norm is the product of all p² conjugates, which is Galois-stable
    /// and therefore must have vanishing non-scalar coordinates; a violation
    /// signals an internal arithmetic error.
    pub fn norm(&self, x: &TowerElement) -> Result<(PadicElement, i64)> {
        let full = self.mul(x, &self.conjugate_product(x));
        for (i, coeff) in full.c.iter().enumerate().skip(1) {
            if self.field.val(coeff).is_some() {
                return Err(Error::config(format!(
                    "internal: norm has a non-scalar coordinate at slot {i}"
                )));
            }
        }
        Ok((full.c[0].clone(), full.scale))
    }

    /// v_L(x) = v_K(N_{L/K}(x)), or None when x vanishes at working precision.
    pub fn v_l(&self, x: &TowerElement) -> Result<Option<i64>> {
        let (n0, shift) = self.norm(x)?;
        Ok(self.field.val(&n0).map(|v| v - shift))
    }

    /// The residue class of a valuation-zero element.
    ///
    /// Since L/K is totally ramified the residue fields agree and every
    /// conjugate of x has the same residue, so res(N(x)) = res(x)^{p²};
    /// inverting the p²-power Frobenius recovers res(x).
    pub fn residue0(&self, x: &TowerElement) -> Result<FqElt> {
        let (n0, shift) = self.norm(x)?;
        match self.field.val(&n0) {
            Some(v) if v == shift => {
                let unit = self.field.divide_by_pi_pow(&n0, shift)?;
                let r = self.field.residue(&unit)?;
                let fq = self.field.residue_field();
                let k = (2 * self.field.f).saturating_sub(2) % self.field.f;
                let mut root = r;
                for _ in 0..k {
                    root = fq.frobenius(&root);
                }
                Ok(root)
            }
            Some(_) => Err(Error::config(
                "internal: residue requested for an element of nonzero valuation",
            )),
            None => Err(Error::precision(
                "residue requested for an element that vanishes at working precision",
            )),
        }
    }

    /// x⁻¹, computed as (Π_{σ≠1} σ(x)) / N(x).
    pub fn inv(&self, x: &TowerElement) -> Result<TowerElement> {
        let cofactor = self.conjugate_product(x);
        let full = self.mul(x, &cofactor);
        for coeff in full.c.iter().skip(1) {
            if self.field.val(coeff).is_some() {
                return Err(Error::config("internal: norm has a non-scalar coordinate"));
            }
        }
        let v = self
            .field
            .val(&full.c[0])
            .ok_or_else(|| Error::precision("inverting an element that vanishes at precision"))?;
        let unit = self.field.divide_by_pi_pow(&full.c[0], v)?;
        let unit_inv = self.field.unit_inv(&unit)?;
        let mut out = self.mul_k(&cofactor, &unit_inv);
        // value(x)⁻¹ = value(cofactor) · unit⁻¹ · π_K^{shift − v}
        out = self.mul_pi_signed(&out, full.scale - v);
        Ok(out)
    }
}

/// An element of R = 𝒪_K[X]/(g): coordinates over 1, X, …, X^{deg−1}.
pub type RingElt = Vec<PadicElement>;

/// The quotient ring 𝒪_K[X]/(g) for an Eisenstein polynomial
/// g = X^n + a_1 X^{n−1} + … + a_n over 𝒪_K.
///
/// When g is the minimal polynomial of a uniformizer π_L of a totally
/// ramified degree-n extension L/K, this ring **is** 𝒪_L with X ↦ π_L, and
/// the representation makes L-valuations exact: the terms a_j X^j of a
/// coordinate vector have pairwise distinct valuations n·v_K(a_j) + j
/// modulo n, so
///
///   v_L(Σ a_j X^j) = min_j (n·v_K(a_j) + j)
///
/// with no cancellation.  Every measurement in the second phase of the
/// tower oracle — digits, indices, Galois action, the refined break —
/// happens here, where arithmetic is integral and never divides.
pub struct EisensteinRing<'a> {
    field: &'a Field,
    n: usize,
    /// a_1, …, a_n.
    a: Vec<PadicElement>,
    /// res(π_K / X^n): the correction turning coordinate residues into
    /// digits along X.  From X^n ≡ −a_n mod X^{n+1}, this is res(−a_n/π)⁻¹.
    d0: FqElt,
}

impl<'a> EisensteinRing<'a> {
    /// Wraps the quotient by X^n + a_1 X^{n−1} + … + a_n, checking the
    /// Eisenstein shape (all v_K(a_i) ≥ 1, v_K(a_n) = 1).
    pub fn new(field: &'a Field, a: &[PadicElement]) -> Result<Self> {
        let n = a.len();
        if n < 2 {
            return Err(Error::config("quotient ring needs degree ≥ 2"));
        }
        for (i, ai) in a.iter().enumerate() {
            match field.val(ai) {
                None => {}
                Some(v) if v >= 1 => {}
                Some(_) => {
                    return Err(Error::config(format!(
                        "polynomial is not Eisenstein: coefficient {} is a unit",
                        i + 1
                    )))
                }
            }
        }
        if field.val(&a[n - 1]) != Some(1) {
            return Err(Error::config(
                "polynomial is not Eisenstein: constant term is not π·unit",
            ));
        }
        let fq = field.residue_field();
        let top = field.residue(&field.divide_by_pi_pow(&a[n - 1], 1)?)?;
        let d0 = fq.inv(&fq.neg(&top))?;
        Ok(EisensteinRing {
            field,
            n,
            a: a.to_vec(),
            d0,
        })
    }

    /// The base field.
    pub fn field(&self) -> &Field {
        self.field
    }

    /// The degree n of the quotient.
    pub fn degree(&self) -> usize {
        self.n
    }

    /// The zero element.
    pub fn zero(&self) -> RingElt {
        vec![self.field.zero(); self.n]
    }

    /// The multiplicative identity.
    pub fn one(&self) -> RingElt {
        self.from_k(&self.field.one())
    }

    /// Embeds a base-field element.
    pub fn from_k(&self, x: &PadicElement) -> RingElt {
        let mut c = self.zero();
        c[0] = x.clone();
        c
    }

    /// The image of X (the uniformizer of L).
    pub fn x(&self) -> RingElt {
        self.monomial(1)
    }

    /// x + y.
    pub fn add(&self, x: &RingElt, y: &RingElt) -> RingElt {
        x.iter()
            .zip(y)
            .map(|(a, b)| self.field.add(a, b))
            .collect()
    }

    /// −x.
    pub fn neg(&self, x: &RingElt) -> RingElt {
        x.iter().map(|a| self.field.neg(a)).collect()
    }

    /// x − y.
    pub fn sub(&self, x: &RingElt, y: &RingElt) -> RingElt {
        x.iter()
            .zip(y)
            .map(|(a, b)| self.field.sub(a, b))
            .collect()
    }

    /// x · κ for a base-field scalar κ.
    pub fn mul_k(&self, x: &RingElt, kappa: &PadicElement) -> RingElt {
        x.iter().map(|a| self.field.mul(a, kappa)).collect()
    }

    /// X · x: a coordinate shift, with the overflow folded back through
    /// X^n = −(a_1 X^{n−1} + … + a_n).
    pub fn mul_by_x(&self, x: &RingElt) -> RingElt {
        let f = self.field;
        let top = &x[self.n - 1];
        let mut out = self.zero();
        for j in 1..self.n {
            out[j] = x[j - 1].clone();
        }
        for i in 1..=self.n {
            let slot = self.n - i;
            out[slot] = f.sub(&out[slot], &f.mul(&self.a[i - 1], top));
        }
        out
    }

    /// X^k reduced mod g, for any k ≥ 0.
    pub fn monomial(&self, k: i64) -> RingElt {
        debug_assert!(k >= 0);
        if (k as usize) < self.n {
            let mut c = self.zero();
            c[k as usize] = self.field.one();
            return c;
        }
        let mut c = self.zero();
        c[self.n - 1] = self.field.one();
        for _ in 0..(k as usize - (self.n - 1)) {
            c = self.mul_by_x(&c);
        }
        c
    }

    /// x · y: convolution followed by top-down folding of the overflow
    /// coordinates, conv[k] distributing as X^k = X^{k−n}·X^n.
    pub fn mul(&self, x: &RingElt, y: &RingElt) -> RingElt {
        let f = self.field;
        let n = self.n;
        let mut conv = vec![f.zero(); 2 * n - 1];
        for (i, xi) in x.iter().enumerate() {
            if f.val(xi).is_none() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if f.val(yj).is_none() {
                    continue;
                }
                conv[i + j] = f.add(&conv[i + j], &f.mul(xi, yj));
            }
        }
        for k in (n..2 * n - 1).rev() {
            let top = conv[k].clone();
            if f.val(&top).is_none() {
                continue;
            }
            for i in 1..=n {
                conv[k - i] = f.sub(&conv[k - i], &f.mul(&self.a[i - 1], &top));
            }
        }
        conv.truncate(n);
        conv
    }

    /// x^m for m ≥ 0.
    pub fn pow_u(&self, x: &RingElt, mut m: u64) -> RingElt {
        let mut acc = self.one();
        let mut base = x.clone();
        while m > 0 {
            if m & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            m >>= 1;
            if m > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Evaluates a polynomial with base-field coefficients (descending
    /// degree, leading coefficient first) at a ring element.
    pub fn eval_k_poly(&self, coeffs: &[PadicElement], at: &RingElt) -> RingElt {
        let mut acc = self.zero();
        for co in coeffs {
            acc = self.mul(&acc, at);
            acc[0] = self.field.add(&acc[0], co);
        }
        acc
    }

    /// Evaluates a polynomial with ring coordinates (coordinate vector read
    /// as Σ c_j T^j) at a ring element — the composition underlying the
    /// Galois action σ(c(X)) = c(σX).
    pub fn eval_coords(&self, coords: &RingElt, at: &RingElt) -> RingElt {
        let mut acc = self.zero();
        for co in coords.iter().rev() {
            acc = self.mul(&acc, at);
            acc[0] = self.field.add(&acc[0], co);
        }
        acc
    }

    /// v_L(x) = min_j (n·v_K(x_j) + j), or None when that minimum cannot be
    /// certified at the working precision (every coordinate that vanishes at
    /// precision caps the certifiable range at n·prec + j).
    pub fn val(&self, x: &RingElt) -> Option<i64> {
        let n = self.n as i64;
        let mut best: Option<i64> = None;
        let mut cert = i64::MAX;
        for (j, a) in x.iter().enumerate() {
            match self.field.val(a) {
                Some(v) => {
                    let t = n * v + j as i64;
                    if best.map_or(true, |b| t < b) {
                        best = Some(t);
                    }
                }
                None => cert = cert.min(n * a.prec + j as i64),
            }
        }
        best.filter(|v| *v < cert)
    }

    /// The leading term of x: the level v = v_L(x) together with the true
    /// digit d = res(x / X^v), so that x ≡ [d]·X^v mod X^{v+1} and digits
    /// multiply across products.
    ///
    /// The leading coordinate a_j π^{v_j} X^j decides it, but its residue is
    /// skewed by the unit π_K/X^n once per π_K-power: the digit is
    /// res(a_j/π^{v_j})·d₀^{v_j}.
    pub fn lead(&self, x: &RingElt) -> Result<(i64, FqElt)> {
        let v = self.val(x).ok_or_else(|| {
            Error::precision("leading term of an element that vanishes at working precision")
        })?;
        let n = self.n as i64;
        let j = (v % n) as usize;
        let vj = v / n;
        let unit = self.field.divide_by_pi_pow(&x[j], vj)?;
        let raw = self.field.residue(&unit)?;
        let fq = self.field.residue_field();
        let d = fq.mul(&raw, &fq.pow(&self.d0, vj as u64));
        Ok((v, d))
    }
}

/// Bézout data for a level coprime to p: returns (α, β) with α·j + β·p = 1
/// and 0 < α < p.
fn bezout_unit(j: i64, p: u64) -> Result<(u64, i64)> {
    let pp = p as i64;
    for alpha in 1..pp {
        if (alpha * j) % pp == 1 % pp {
            let beta = (1 - alpha * j) / pp;
            return Ok((alpha as u64, beta));
        }
    }
    Err(Error::config(format!("internal: level {j} is divisible by p")))
}

/// The p-th root in 𝔽_q, the inverse of Frobenius: x ↦ x^{p^{f−1}}.
fn fq_pth_root(field: &Field, a: &FqElt) -> FqElt {
    let fq = field.residue_field();
    let mut r = a.clone();
    for _ in 0..field.f.saturating_sub(1) {
        r = fq.frobenius(&r);
    }
    r
}

/// The characteristic polynomial det(X·I − M) of an integral matrix, by the
/// division-free Berkowitz recursion on leading principal blocks.
///
/// `m` is column-major (m[j][i] = entry in row i, column j); the result is
/// c_0, …, c_n with det(X·I − M) = Σ c_k X^{n−k} and c_0 = 1.  Division-free
/// matters here: the coefficients come out at full working precision even
/// when the matrix entries carry large π_K-powers.
fn berkowitz_charpoly(field: &Field, m: &[Vec<PadicElement>]) -> Vec<PadicElement> {
    let n = m.len();
    let mut c = vec![field.one(), field.neg(&m[0][0])];
    for r in 2..=n {
        let k = r - 1;
        // Toeplitz column: 1, −a_kk, −R·S, −R·A·S, …, −R·A^{r−2}·S with A the
        // previous principal block, R the new row, S the new column.
        let mut t = Vec::with_capacity(r + 1);
        t.push(field.one());
        t.push(field.neg(&m[k][k]));
        let mut w: Vec<PadicElement> = (0..k).map(|i| m[k][i].clone()).collect();
        for step in 2..=r {
            let mut dot = field.zero();
            for j in 0..k {
                dot = field.add(&dot, &field.mul(&m[j][k], &w[j]));
            }
            t.push(field.neg(&dot));
            if step < r {
                let mut next = vec![field.zero(); k];
                for (j, col) in m.iter().enumerate().take(k) {
                    for i in 0..k {
                        next[i] = field.add(&next[i], &field.mul(&col[i], &w[j]));
                    }
                }
                w = next;
            }
        }
        let mut out = vec![field.zero(); r + 1];
        for (i, oi) in out.iter_mut().enumerate() {
            for (j, cj) in c.iter().enumerate() {
                if i >= j && i - j <= r {
                    *oi = field.add(oi, &field.mul(&t[i - j], cj));
                }
            }
        }
        c = out;
    }
    c
}

/// Minimal precision (in 𝔪_K-exponent) for running the tower oracle on an
/// extension with break b over a field of ramification index e.
///
/// Covers the digit-extraction depth max(p²e, p²b − b) + p² in v_L plus
/// slack for the uniformizer construction.  The construction additionally
/// checks at runtime that the denominator scale it actually encounters fits
/// the stored digit window, and reports the deficit when it does not.
pub fn oracle_precision_floor(p: u64, e: i64, b: i64) -> i64 {
    let p2 = (p * p) as i64;
    let h = (p2 * e).max(p2 * b - b) + 1;
    let depth = (h + p2) / p2 + 2;
    (depth + e + 8).max(crate::padic::FieldSpec::precision_floor(p, e))
}

/// Re-encodes a validated extension datum on a second field instance with
/// the same shape (typically one carrying more precision for the oracle).
///
/// The generators are truncated to their digits below level pm + 1.  This is
/// faithful: U^{pm+1} consists of p-th powers, so the truncation multiplies
/// each Kummer generator by a p-th power and leaves the extension L — and
/// therefore every invariant computed from it — unchanged.
pub fn transport_spec(src: &Field, dst: &Field, spec: &ExtensionSpec) -> Result<ExtensionSpec> {
    if src.p != dst.p || src.f != dst.f || src.e != dst.e || src.q != dst.q {
        return Err(Error::config(
            "transport requires two instances of the same field shape",
        ));
    }
    let lim = src.pm_level()? + 1;
    let rho1 = dst.from_digit_terms(&src.digit_expansion(&spec.rho1, lim)?)?;
    let rho2 = dst.from_digit_terms(&src.digit_expansion(&spec.rho2, lim)?)?;
    dst.validate_spec(&rho1, &rho2)
}

/// The fully constructed tower for one extension: the y-basis arithmetic
/// used during construction, the quotient ring R = 𝒪_K[X]/(g) ≅ 𝒪_L used
/// for measurement, the labelled Galois group, and the measured break.
pub struct TowerOracle<'a> {
    tower: Tower<'a>,
    ring: EisensteinRing<'a>,
    /// Coefficients a_1, …, a_{p²} of the minimal polynomial
    /// X^{p²} + a_1 X^{p²−1} + … + a_{p²} of π_L over K (checked Eisenstein).
    minpoly: Vec<PadicElement>,
    /// The ramification break, read off v_L(g′(π_L)) = (p²−1)(b+1) and
    /// checked as v_L(σπ_L − π_L) = b+1 for every non-trivial σ.
    b: i64,
    /// σ_{(m₁,m₂)}(X) for the labelled group, indexed m₁·p + m₂.
    root_table: Vec<RingElt>,
    /// Matrices of the automorphisms: sigma_mats[idx][j] = (σX)^j, so that
    /// σ(Σ c_j X^j) = Σ c_j · sigma_mats[idx][j].
    sigma_mats: Vec<Vec<RingElt>>,
    /// The roots in `root_table` are exact only modulo X^refine_cap; any
    /// Galois-stability check must ignore coordinates at or above this level.
    refine_cap: i64,
}

impl<'a> TowerOracle<'a> {
    /// Builds the tower, finds a uniformizer, computes its minimal
    /// polynomial, and reconstructs the labelled Galois action on
    /// R = 𝒪_K[X]/(g).
    ///
    /// Errors with [`Error::Precision`] when the field carries less than
    /// [`oracle_precision_floor`] digits, or when the denominator scale of
    /// the constructed uniformizer needs a wider digit window than the field
    /// stores.
    pub fn new(field: &'a Field, spec: &ExtensionSpec) -> Result<Self> {
        let needed = oracle_precision_floor(field.p, field.e, spec.b);
        if field.n_prec < needed {
            return Err(Error::precision(format!(
                "tower oracle needs precision ≥ {needed} for break {} on this field \
                 (have {}); rebuild the field with more digits",
                spec.b, field.n_prec
            )));
        }
        let tower = Tower::new(field, spec)?;
        let p = field.p;
        let p2 = (p * p) as i64;
        let pm = field.pm_level()?;

        // First floor K(y₁): v_L(y₁ − 1) = p·j₀ with p ∤ j₀, so a Bézout
        // combination with π_K (of valuation p²) reaches valuation p — a
        // uniformizer τ of K(y₁).
        let y1m1 = tower.sub(&tower.y1(), &tower.one());
        match tower.v_l(&y1m1)? {
            Some(v) if v == p as i64 * spec.j0 => {}
            v => {
                return Err(Error::config(format!(
                    "internal: v_L(y₁ − 1) = {v:?}, expected {}",
                    p as i64 * spec.j0
                )))
            }
        }
        let (alpha, beta) = bezout_unit(spec.j0, p)?;
        let tau = tower.mul_pi_signed(&tower.pow_u(&y1m1, alpha), beta);
        match tower.v_l(&tau)? {
            Some(v) if v == p as i64 => {}
            v => {
                return Err(Error::config(format!(
                    "internal: first-floor uniformizer has v_L = {v:?}, expected {p}"
                )))
            }
        }
        let tau_inv = tower.inv(&tau)?;

        // Second floor: drive 1 + ρ₂ to its stable level over K(y₁) by
        // cancelling leading digits with p-th powers 1 + g·τ^c.  Levels here
        // are τ-adic (v_L/p); the loop exits at the first level not divisible
        // by p, which ramification theory pins at p·pm − b.
        let mut x = tower.from_k(&field.add(&field.one(), &spec.rho2));
        let mut w = tower.one();
        let level_cap = p as i64 * pm;
        let mut last_level = -1i64;
        let j_prime = loop {
            let d = tower.sub(&x, &tower.one());
            let lv = match tower.v_l(&d)? {
                Some(v) => v,
                None => {
                    return Err(Error::precision(
                        "second-floor level normalization ran out of precision",
                    ))
                }
            };
            if lv % p as i64 != 0 {
                return Err(Error::config(format!(
                    "internal: first-floor element has v_L = {lv} not divisible by p"
                )));
            }
            let level = lv / p as i64;
            if level <= last_level || level >= level_cap {
                return Err(Error::config(format!(
                    "internal: level normalization stalled at τ-level {level}"
                )));
            }
            last_level = level;
            if level % p as i64 != 0 {
                break level;
            }
            let z = tower.mul(&d, &tower.pow_u(&tau_inv, level as u64));
            let digit = tower.residue0(&z)?;
            let fq = field.residue_field();
            let g = fq_pth_root(field, &fq.neg(&digit));
            let m = tower.add(
                &tower.one(),
                &tower.mul_k(&tower.pow_u(&tau, (level / p as i64) as u64), &field.teich(&g)),
            );
            x = tower.mul(&x, &tower.pow_u(&m, p));
            w = tower.mul(&w, &m);
        };

        // With v_L(y₂·w − 1) = j′ coprime to p, a Bézout combination against
        // τ (valuation p) reaches valuation 1.
        let y2w = tower.sub(&tower.mul(&tower.y2(), &w), &tower.one());
        let (gamma, delta) = bezout_unit(j_prime, p)?;
        let pi_l = tower.mul(&tower.pow_u(&y2w, gamma), &tower.pow_i(&tau, delta)?);
        match tower.v_l(&pi_l)? {
            Some(1) => {}
            v => {
                return Err(Error::config(format!(
                    "internal: uniformizer construction produced v_L = {v:?}"
                )))
            }
        }
        match tower.v_l(&tower.from_k(&field.pi()))? {
            Some(v) if v == p2 => {}
            v => {
                return Err(Error::config(format!(
                    "internal: v_L(π_K) = {v:?}, expected {p2}"
                )))
            }
        }

        // Matrix of multiplication by π_L over the y-monomial basis, pulled
        // to a common denominator π_K^{s*}.  Its characteristic polynomial is
        // the minimal polynomial of π_L; Berkowitz keeps the computation
        // division-free, so the only precision cost is the final π^{k·s*}
        // extraction — checked against the stored digit window first.
        let dim = (p * p) as usize;
        let mut cols = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut basis = tower.zero();
            basis.c[j] = field.one();
            cols.push(tower.mul(&pi_l, &basis));
        }
        let s_star = cols.iter().map(|c| c.scale).max().unwrap_or(0);
        let window = field.full_prec();
        let need = p2 * s_star + field.e + 4;
        if need > window {
            return Err(Error::precision(format!(
                "tower oracle needs a digit window of {need} for a uniformizer with \
                 denominator exponent {s_star} (have {window}); rebuild the field with \
                 precision ≥ {}",
                field.n_prec + (need - window)
            )));
        }
        let matrix: Vec<Vec<PadicElement>> = cols
            .iter()
            .map(|c| tower.coords_at_scale(c, s_star))
            .collect();
        let char_poly = berkowitz_charpoly(field, &matrix);
        // char(π^{−s*}·M̃)(X) = Σ c_k(M̃)·π^{−k·s*}·X^{n−k}.
        let mut minpoly = Vec::with_capacity(dim);
        for (k, ck) in char_poly.iter().enumerate().skip(1) {
            minpoly.push(field.divide_by_pi_pow(ck, k as i64 * s_star).map_err(|_| {
                Error::config(
                    "internal: characteristic polynomial coefficient misses its denominator",
                )
            })?);
        }
        let ring = EisensteinRing::new(field, &minpoly)?;

        // The break from the different: g′(π_L) = Π_{σ≠1}(π_L − σπ_L) has
        // valuation (p²−1)(b+1).
        let mut gp = ring.zero();
        gp[dim - 1] = field.from_i64(p2);
        for i in 1..dim {
            gp[dim - 1 - i] = field.mul_i64(&minpoly[i - 1], (dim - i) as i64);
        }
        let w_diff = ring.val(&gp).ok_or_else(|| {
            Error::precision("derivative of the minimal polynomial vanishes at precision")
        })?;
        if w_diff % (p2 - 1) != 0 {
            return Err(Error::config(format!(
                "internal: v_L(g′(π_L)) = {w_diff} is not a multiple of p² − 1"
            )));
        }
        let b = w_diff / (p2 - 1) - 1;
        if b < 1 || b % p as i64 == 0 {
            return Err(Error::config(format!(
                "internal: measured break b = {b} is outside the wild range"
            )));
        }

        // The other roots of g in R: one Teichmüller direction [d]·X^{b+1}
        // per non-trivial automorphism (distinct roots separate at exactly
        // b+1), refined digit by digit.  Seed acceptance is sharp: the root
        // directions give v_L(g(X + [d]X^{b+1})) ≥ w + b + 2, all others
        // exactly w + b + 1.
        let g_full: Vec<PadicElement> = std::iter::once(field.one())
            .chain(minpoly.iter().cloned())
            .collect();
        let gp_full: Vec<PadicElement> = std::iter::once(field.from_i64(p2))
            .chain((1..dim).map(|i| field.mul_i64(&minpoly[i - 1], (dim - i) as i64)))
            .collect();
        let refine_cap = p2 * (b + field.e + 4);
        let fq = field.residue_field();
        let xelt = ring.x();
        let mut roots = Vec::with_capacity(dim - 1);
        for di in 1..field.q as usize {
            let d = fq.from_index(di);
            let seed = ring.add(
                &xelt,
                &ring.mul_k(&ring.monomial(b + 1), &field.teich(&d)),
            );
            let v0 = ring.val(&ring.eval_k_poly(&g_full, &seed));
            match v0 {
                Some(v) if v == w_diff + b + 1 => continue,
                Some(v) if v >= w_diff + b + 2 => {}
                None => {}
                Some(v) => {
                    return Err(Error::config(format!(
                        "internal: root seed at digit {di} has v_L(g) = {v} < {}",
                        w_diff + b + 1
                    )))
                }
            }
            roots.push(Self::refine_root(
                &ring, &g_full, &gp_full, seed, w_diff, refine_cap,
            )?);
        }
        if roots.len() != dim - 1 {
            return Err(Error::config(format!(
                "internal: found {} root directions, expected {}",
                roots.len(),
                dim - 1
            )));
        }
        for r in &roots {
            if ring.val(&ring.sub(r, &xelt)) != Some(b + 1) {
                return Err(Error::config(
                    "internal: a conjugate root misses the common break level",
                ));
            }
        }

        // Label the group: composition of automorphisms is evaluation of
        // coordinate polynomials, (σ∘τ)(X) = τX-coords evaluated at σX.
        // Any independent pair generates, so take σ₁ = the first root and
        // σ₂ = the first root outside ⟨σ₁⟩; the refined break is
        // generator-independent (and tested to be).
        let same = |x: &RingElt, y: &RingElt| -> bool {
            match ring.val(&ring.sub(x, y)) {
                None => true,
                Some(v) => v >= b + 2,
            }
        };
        let r1 = roots[0].clone();
        let mut s1_pows = vec![xelt.clone()];
        for k in 1..p as usize {
            let prev = &s1_pows[k - 1];
            s1_pows.push(ring.eval_coords(prev, &r1));
        }
        if !same(&ring.eval_coords(&s1_pows[p as usize - 1], &r1), &xelt) {
            return Err(Error::config("internal: first generator is not of order p"));
        }
        let r2 = roots
            .iter()
            .find(|r| !s1_pows.iter().any(|s| same(r, s)))
            .ok_or_else(|| Error::config("internal: root set is a single cyclic orbit"))?
            .clone();
        let mut s2_pows = vec![xelt.clone()];
        for k in 1..p as usize {
            let prev = &s2_pows[k - 1];
            s2_pows.push(ring.eval_coords(prev, &r2));
        }
        if !same(&ring.eval_coords(&s2_pows[p as usize - 1], &r2), &xelt) {
            return Err(Error::config("internal: second generator is not of order p"));
        }
        let mut root_table = Vec::with_capacity(dim);
        for m1 in 0..p as usize {
            for m2 in 0..p as usize {
                root_table.push(ring.eval_coords(&s2_pows[m2], &s1_pows[m1]));
            }
        }
        for i in 0..dim {
            for j in 0..i {
                if same(&root_table[i], &root_table[j]) {
                    return Err(Error::config(
                        "internal: labelled automorphisms collide — not a (ℤ/p)² action",
                    ));
                }
            }
        }

        // Matrices: σ(Σ c_j X^j) = Σ c_j (σX)^j.
        let mut sigma_mats = Vec::with_capacity(dim);
        for root in &root_table {
            let mut pows = Vec::with_capacity(dim);
            pows.push(ring.one());
            for j in 1..dim {
                let prev = &pows[j - 1];
                pows.push(ring.mul(prev, root));
            }
            sigma_mats.push(pows);
        }

        Ok(TowerOracle {
            tower,
            ring,
            minpoly,
            b,
            root_table,
            sigma_mats,
            refine_cap,
        })
    }

    /// Digit-by-digit Hensel refinement of a root seed: while the defect
    /// E = g(r) is visible and v_L(E) − w < cap, cancel its leading term
    /// with the correction −[lead(E)/lead(g′(r))]·X^{v_L(E)−w}.
    ///
    /// Quadratic terms sit at 2h − (b+1) + w ≥ w + h + 1 once h ≥ b + 2,
    /// which the seeds guarantee, so the defect level strictly increases.
    fn refine_root(
        ring: &EisensteinRing<'_>,
        g_full: &[PadicElement],
        gp_full: &[PadicElement],
        seed: RingElt,
        w: i64,
        cap: i64,
    ) -> Result<RingElt> {
        let field = ring.field();
        let fq = field.residue_field();
        let mut r = seed;
        let mut guard = 0i64;
        loop {
            let defect = ring.eval_k_poly(g_full, &r);
            let v_e = match ring.val(&defect) {
                None => break,
                Some(v) => v,
            };
            let h = v_e - w;
            if h >= cap {
                break;
            }
            guard += 1;
            if guard > cap + 8 {
                return Err(Error::config(
                    "internal: root refinement failed to converge",
                ));
            }
            let (_, d_e) = ring.lead(&defect)?;
            let deriv = ring.eval_k_poly(gp_full, &r);
            let (v_g, d_g) = ring.lead(&deriv)?;
            if v_g != w {
                return Err(Error::config(format!(
                    "internal: v_L(g′) drifted to {v_g} during refinement"
                )));
            }
            let t = fq.neg(&fq.mul(&d_e, &fq.inv(&d_g)?));
            let correction = ring.mul_k(&ring.monomial(h), &field.teich(&t));
            r = ring.add(&r, &correction);
        }
        Ok(r)
    }

    /// The y-basis arithmetic context.
    pub fn tower(&self) -> &Tower<'a> {
        &self.tower
    }

    /// The measurement ring R = 𝒪_K[X]/(g) ≅ 𝒪_L, X ↦ π_L.
    pub fn ring(&self) -> &EisensteinRing<'a> {
        &self.ring
    }

    /// The measured ramification break.
    pub fn ordinary_break(&self) -> i64 {
        self.b
    }

    /// Coefficients a_1, …, a_{p²} of the minimal polynomial of the
    /// uniformizer: X^{p²} + a_1 X^{p²−1} + … + a_{p²}.
    pub fn minpoly(&self) -> &[PadicElement] {
        &self.minpoly
    }

    /// σ_{(m₁,m₂)} applied to a ring element, through the precomputed
    /// matrix: σ(Σ c_j X^j) = Σ c_j (σX)^j.
    pub fn galois_r(&self, m1: u64, m2: u64, x: &RingElt) -> RingElt {
        let p = self.tower.np as u64;
        let mat = &self.sigma_mats[((m1 % p) * p + m2 % p) as usize];
        let field = self.ring.field();
        let mut out = self.ring.zero();
        for (j, cj) in x.iter().enumerate() {
            if field.val(cj).is_none() {
                continue;
            }
            for (i, oi) in out.iter_mut().enumerate() {
                *oi = field.add(oi, &field.mul(cj, &mat[j][i]));
            }
        }
        out
    }

    /// N_{L/K}(x) for x ∈ R: the product of all p² conjugates, which must be
    /// a scalar up to the truncation level of the tabulated roots.
    pub fn norm_r(&self, x: &RingElt) -> Result<PadicElement> {
        let p = self.tower.np as u64;
        let mut acc = x.clone();
        for m1 in 0..p {
            for m2 in 0..p {
                if m1 == 0 && m2 == 0 {
                    continue;
                }
                acc = self.ring.mul(&acc, &self.galois_r(m1, m2, x));
            }
        }
        let field = self.ring.field();
        let n = self.ring.degree() as i64;
        let threshold = self.refine_cap - n;
        for (j, coeff) in acc.iter().enumerate().skip(1) {
            if let Some(v) = field.val(coeff) {
                if n * v + (j as i64) < threshold {
                    return Err(Error::config(
                        "internal: ring norm has a non-scalar coordinate",
                    ));
                }
            }
        }
        Ok(acc.swap_remove(0))
    }

    /// The digits d_0, …, d_{count−1} of π_K along powers of π_L:
    /// π_K = Σ_{h≥0} [d_h]·π_L^{p²+h} with Teichmüller digits [d_h],
    /// peeled coordinate-wise in R (no divisions, no precision loss).
    pub fn uniformizer_digits(&self, count: usize) -> Result<Vec<FqElt>> {
        let field = self.ring.field();
        let fq = field.residue_field();
        let p2 = (field.p * field.p) as i64;
        let mut z = self.ring.from_k(&field.pi());
        let mut mono = self.ring.monomial(p2);
        let mut digits = Vec::with_capacity(count);
        for h in 0..count {
            let level = p2 + h as i64;
            let d = match self.ring.val(&z) {
                Some(v) if v == level => {
                    let (_, d) = self.ring.lead(&z)?;
                    z = self
                        .ring
                        .sub(&z, &self.ring.mul_k(&mono, &field.teich(&d)));
                    d
                }
                Some(v) if v > level => fq.zero(),
                Some(v) => {
                    return Err(Error::config(format!(
                        "internal: digit extraction met v_L = {v} below level {level}"
                    )))
                }
                None => fq.zero(),
            };
            digits.push(d);
            mono = self.ring.mul_by_x(&mono);
        }
        Ok(digits)
    }

    /// The indices of inseparability (i₀, i₁, i₂), from the digits of π_K:
    /// with i_j^* = min{h ≥ 0 : d_h ≠ 0, v_p(h + p²) ≤ j}, the index is
    /// i_j = min{i_{j′}^* + p²e·(j′ − j) : j ≤ j′ ≤ 2}.
    pub fn inseparability_indices(&self) -> Result<(i64, i64, i64)> {
        let field = self.ring.field();
        let p = field.p;
        let p2 = (p * p) as i64;
        let h_max = (p2 * field.e).max(p2 * self.b - self.b);
        let depth_needed = (h_max + p2) / p2 + 2;
        if field.n_prec < depth_needed {
            return Err(Error::precision(format!(
                "digit extraction to level {h_max} needs precision ≥ {depth_needed}"
            )));
        }
        let digits = self.uniformizer_digits((h_max + 1) as usize)?;
        let fq = field.residue_field();
        const INF: i64 = i64::MAX / 4;
        let mut istar = [INF; 3];
        for (h, d) in digits.iter().enumerate() {
            if fq.is_zero(d) {
                continue;
            }
            let mut m = h as u64 + p * p;
            let mut vp = 0usize;
            while m % p == 0 {
                m /= p;
                vp += 1;
            }
            for (j, slot) in istar.iter_mut().enumerate() {
                if vp <= j && (h as i64) < *slot {
                    *slot = h as i64;
                }
            }
        }
        if istar[2] != 0 {
            return Err(Error::config(
                "internal: leading digit of π_K vanished (v_L(π_K) ≠ p²)",
            ));
        }
        let index = |j: i64| -> i64 {
            (j..=2)
                .map(|jp| {
                    let s = istar[jp as usize];
                    if s >= INF {
                        INF
                    } else {
                        s + p2 * field.e * (jp - j)
                    }
                })
                .min()
                .unwrap()
        };
        Ok((index(0), index(1), index(2)))
    }

    /// i₁ recomputed from the minimal polynomial of the uniformizer:
    /// min({p²·v_K(a_i) − i : 1 ≤ i ≤ p² − 1} ∪ {p²e}).
    pub fn i1_from_minpoly(&self) -> i64 {
        let field = self.ring.field();
        let p2 = (field.p * field.p) as i64;
        let mut best = p2 * field.e;
        for (idx, a) in self.minpoly.iter().enumerate().take(p2 as usize - 1) {
            let i = idx as i64 + 1;
            if let Some(v) = field.val(a) {
                best = best.min(p2 * v - i);
            }
        }
        best
    }

    /// v_L((T − 1)(α)) − v_L(α) for the truncated-binomial operator
    /// T = σ₁∘σ₂^{[−δ]}, or None when the difference vanishes at precision.
    pub(crate) fn operator_gap(
        &self,
        s1: (u64, u64),
        s2: (u64, u64),
        alpha: &RingElt,
    ) -> Result<Option<i64>> {
        let coeffs = self.operator_coefficients(s1, s2)?;
        let image = self.apply_operator(&coeffs, s1, s2, alpha);
        let diff = self.ring.sub(&image, alpha);
        let va = self
            .ring
            .val(alpha)
            .ok_or_else(|| Error::config("operator gap of the zero element"))?;
        Ok(self.ring.val(&diff).map(|v| v - va))
    }

    /// The binomial coefficients C(−δ, n) for n < p, where δ is the residue
    /// ratio of β₁ = σ₁(π_L) − π_L and β₂ = σ₂(π_L) − π_L.
    fn operator_coefficients(&self, s1: (u64, u64), s2: (u64, u64)) -> Result<Vec<PadicElement>> {
        let field = self.ring.field();
        let fq = field.residue_field();
        let p = field.p as i64;
        let det = (s1.0 as i64 * s2.1 as i64 - s1.1 as i64 * s2.0 as i64).rem_euclid(p);
        if det == 0 {
            return Err(Error::config(
                "refined break requires an independent pair of generators",
            ));
        }
        let xelt = self.ring.x();
        let mut lead_digits = Vec::with_capacity(2);
        for s in [s1, s2] {
            let beta = self.ring.sub(&self.galois_r(s.0, s.1, &xelt), &xelt);
            let (v, d) = self.ring.lead(&beta)?;
            if v != self.b + 1 {
                return Err(Error::config(
                    "internal: generator difference misses the expected break level",
                ));
            }
            lead_digits.push(d);
        }
        let delta = fq.mul(&lead_digits[0], &fq.inv(&lead_digits[1])?);
        let minus_delta = field.neg(&field.teich(&delta));
        let mut coeffs = Vec::with_capacity(field.p as usize);
        let mut c = field.one();
        coeffs.push(c.clone());
        for n in 1..p {
            // C(−δ, n) = C(−δ, n−1)·(−δ − (n−1))/n, and n < p is a unit.
            let num = field.sub(&minus_delta, &field.from_i64(n - 1));
            c = field.mul(&c, &num);
            c = field.mul(&c, &field.unit_inv(&field.from_i64(n))?);
            coeffs.push(c.clone());
        }
        Ok(coeffs)
    }

    /// T(α) = σ₁(Σ_{n<p} C(−δ, n)·(σ₂ − 1)ⁿ(α)).
    fn apply_operator(
        &self,
        coeffs: &[PadicElement],
        s1: (u64, u64),
        s2: (u64, u64),
        alpha: &RingElt,
    ) -> RingElt {
        let mut chain = alpha.clone();
        let mut acc = self.ring.mul_k(&chain, &coeffs[0]);
        for c in coeffs.iter().skip(1) {
            chain = self.ring.sub(&self.galois_r(s2.0, s2.1, &chain), &chain);
            acc = self.ring.add(&acc, &self.ring.mul_k(&chain, c));
        }
        self.galois_r(s1.0, s1.1, &acc)
    }

    /// The refined break for a specific choice of generators (as labelled
    /// group indices).
    pub(crate) fn refined_break_with(&self, s1: (u64, u64), s2: (u64, u64)) -> Result<i64> {
        let field = self.ring.field();
        let p2 = (field.p * field.p) as i64;
        let coeffs = self.operator_coefficients(s1, s2)?;
        // T − 1 is 𝒪_K-linear and the terms of a π_L-expansion have distinct
        // valuations, so its valuation as an operator on 𝒪_L is attained on
        // the monomials π_L^j with 0 ≤ j < p² (see docs/refined-break-operator.md).
        let mut best: Option<i64> = None;
        let mut alpha = self.ring.one();
        for j in 0..p2 {
            if j > 0 {
                alpha = self.ring.mul_by_x(&alpha);
            }
            let image = self.apply_operator(&coeffs, s1, s2, &alpha);
            let diff = self.ring.sub(&image, &alpha);
            if let Some(v) = self.ring.val(&diff) {
                let gap = v - j;
                best = Some(best.map_or(gap, |b: i64| b.min(gap)));
            }
        }
        best.ok_or_else(|| {
            Error::precision("refined break exceeds the certifiable range at this precision")
        })
    }

    /// The refined break b_*: the valuation of σ₁∘σ₂^{[−δ]} − 1 on 𝒪_L,
    /// where σ₂^{[−δ]} = Σ_{n<p} C(−δ, n)(σ₂ − 1)ⁿ and δ is the residue
    /// ratio of the two uniformizer displacements.
    pub fn refined_break(&self) -> Result<i64> {
        self.refined_break_with((1, 0), (0, 1))
    }

    /// The full invariant report from the tower side.
    pub fn report(&self) -> Result<OracleReport> {
        let (i0, i1, i2) = self.inseparability_indices()?;
        Ok(OracleReport {
            b: self.b,
            i0,
            i1,
            i2,
            i1_minpoly: self.i1_from_minpoly(),
            b_star: self.refined_break()?,
        })
    }
}

/// Runs the full tower oracle for one extension: builds L, finds a
/// uniformizer, and reports break, inseparability indices (by two
/// independent routes), and refined break.
pub fn run_oracle(field: &Field, spec: &ExtensionSpec) -> Result<OracleReport> {
    TowerOracle::new(field, spec)?.report()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::artin_hasse::{ep_rational_coeffs, rat_mod};
    use crate::padic::testutil::{std_field, std_field_with_precision};
    use crate::padic::FieldSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn oracle_field() -> Field {
        std_field_with_precision(Some(22))
    }

    /// ρ₁ = ω·π, ρ₂ = ω³·π: break b = 2 on ℚ₉(ζ₃).
    fn std_spec(field: &Field) -> ExtensionSpec {
        let fq = field.residue_field();
        let w = fq.omega();
        let rho1 = field.digit_term(&w, 1);
        let rho2 = field.digit_term(&fq.pow(&w, 3), 1);
        field.validate_spec(&rho1, &rho2).unwrap()
    }

    /// ρ₁ = ω·π², ρ₂ = ω³·π²: break b = 1 on ℚ₉(ζ₃).
    fn std_spec_b1(field: &Field) -> ExtensionSpec {
        let fq = field.residue_field();
        let w = fq.omega();
        let rho1 = field.digit_term(&w, 2);
        let rho2 = field.digit_term(&fq.pow(&w, 3), 2);
        field.validate_spec(&rho1, &rho2).unwrap()
    }

    /// Residue degree 3 (q = 27, e = 2): every spec is degenerate.
    fn f27_field() -> Field {
        Field::new(&FieldSpec {
            p: 3,
            residue_poly: vec![1, 2, 0, 1],
            eisenstein_poly: vec![vec![3], vec![3], vec![1]],
            precision: Some(20),
        })
        .unwrap()
    }

    #[test]
    fn tower_valuations_match_the_two_floors() {
        let field = oracle_field();
        let spec = std_spec(&field);
        let tw = Tower::new(&field, &spec).unwrap();
        // v_L(π_K) = p², v_L(y₁ − 1) = p·j₀, and the Kummer units are units.
        assert_eq!(tw.v_l(&tw.from_k(&field.pi())).unwrap(), Some(9));
        let y1m1 = tw.sub(&tw.y1(), &tw.one());
        assert_eq!(tw.v_l(&y1m1).unwrap(), Some(3 * spec.j0));
        let u1 = tw.from_k(&field.add(&field.one(), &spec.rho1));
        assert_eq!(tw.v_l(&u1).unwrap(), Some(0));
        // y₁ itself is a unit whose p-th power is u₁.
        let y1p = tw.pow_u(&tw.y1(), 3);
        assert!(tw.v_l(&tw.sub(&y1p, &u1)).unwrap().is_none());
    }

    #[test]
    fn inverse_is_a_two_sided_inverse() {
        let field = oracle_field();
        let spec = std_spec(&field);
        let tw = Tower::new(&field, &spec).unwrap();
        let x = tw.add(&tw.y1(), &tw.mul_k(&tw.y2(), &field.pi()));
        let xi = tw.inv(&x).unwrap();
        let prod = tw.mul(&x, &xi);
        let diff = tw.sub(&prod, &tw.one());
        assert!(tw.v_l(&diff).unwrap().is_none());
    }

    #[test]
    fn oracle_rejects_insufficient_precision() {
        let field = std_field();
        let spec = std_spec(&field);
        match TowerOracle::new(&field, &spec) {
            Err(Error::Precision(_)) => {}
            Err(other) => panic!("expected a precision error, got {other:?}"),
            Ok(_) => panic!("expected a precision error, got a constructed oracle"),
        }
    }

    #[test]
    fn transported_specs_preserve_break_data() {
        let lo = std_field();
        let hi = oracle_field();
        let spec = std_spec(&lo);
        let moved = transport_spec(&lo, &hi, &spec).unwrap();
        assert_eq!(moved.b, spec.b);
        assert_eq!(moved.j0, spec.j0);
        assert_eq!(moved.theta, spec.theta);
    }

    #[test]
    fn quotient_ring_valuations_are_coordinate_minima() {
        let field = oracle_field();
        let spec = std_spec(&field);
        let oracle = TowerOracle::new(&field, &spec).unwrap();
        let ring = oracle.ring();
        // v_L(X^j) = j, v_L(π_K·X^j) = 9 + j, and sums take the minimum.
        for j in 0..9i64 {
            assert_eq!(ring.val(&ring.monomial(j)), Some(j));
        }
        let x5 = ring.mul_k(&ring.monomial(5), &field.pi());
        assert_eq!(ring.val(&x5), Some(14));
        let mix = ring.add(&x5, &ring.monomial(7));
        assert_eq!(ring.val(&mix), Some(7));
        // X^9 ≡ −(a₁X^8 + … + a₉) still has valuation 9.
        assert_eq!(ring.val(&ring.monomial(9)), Some(9));
        // The norm of X is ±a₉, a uniformizer of K.
        let nx = oracle.norm_r(&ring.x()).unwrap();
        assert_eq!(field.val(&nx), Some(1));
    }

    #[test]
    fn measured_break_matches_unit_level_on_all_generators() {
        let field = oracle_field();
        for (spec, expect) in [(std_spec(&field), 2), (std_spec_b1(&field), 1)] {
            let oracle = TowerOracle::new(&field, &spec).unwrap();
            assert_eq!(oracle.ordinary_break(), expect);
            assert_eq!(oracle.ordinary_break(), spec.b);
            // Every non-trivial automorphism moves π_L at exactly b + 1.
            let xelt = oracle.ring().x();
            for m1 in 0..3 {
                for m2 in 0..3 {
                    if m1 == 0 && m2 == 0 {
                        continue;
                    }
                    let moved = oracle.galois_r(m1, m2, &xelt);
                    let diff = oracle.ring().sub(&moved, &xelt);
                    assert_eq!(oracle.ring().val(&diff), Some(expect + 1));
                }
            }
        }
    }

    #[test]
    fn uniformizer_digits_reconstruct_pi_k() {
        let field = oracle_field();
        let spec = std_spec(&field);
        let oracle = TowerOracle::new(&field, &spec).unwrap();
        let ring = oracle.ring();
        let count = 12usize;
        let digits = oracle.uniformizer_digits(count).unwrap();
        let mut partial = ring.zero();
        let mut mono = ring.monomial(9);
        for d in &digits {
            if !field.residue_field().is_zero(d) {
                partial = ring.add(&partial, &ring.mul_k(&mono, &field.teich(d)));
            }
            mono = ring.mul_by_x(&mono);
        }
        let diff = ring.sub(&ring.from_k(&field.pi()), &partial);
        match ring.val(&diff) {
            None => {}
            Some(v) => assert!(v >= 9 + count as i64, "partial sum stops at v_L = {v}"),
        }
    }

    #[test]
    fn minimal_polynomial_coefficients_satisfy_break_valuation_bounds() {
        // v_K(a_i) ≥ (1 − 1/p²)b + i/p² for 1 ≤ i < p², and the sharper
        // v_K(a_{pi}) ≥ (1 − 1/p)b + i/p on the p-divisible rungs.
        for field in [oracle_field(), f27_field()] {
            let spec = std_spec(&field);
            let oracle = TowerOracle::new(&field, &spec).unwrap();
            let b = oracle.ordinary_break();
            let a = oracle.minpoly();
            for i in 1..9i64 {
                if i % 3 == 0 {
                    continue;
                }
                if let Some(v) = field.val(&a[i as usize - 1]) {
                    assert!(9 * v >= 8 * b + i, "a_{i} too shallow: v = {v}");
                }
            }
            for i in 1..3i64 {
                if let Some(v) = field.val(&a[(3 * i) as usize - 1]) {
                    assert!(9 * v >= 6 * b + 3 * i, "a_{} too shallow: v = {v}", 3 * i);
                }
            }
            assert_eq!(field.val(&a[8]), Some(1));
        }
    }

    #[test]
    fn indices_and_refined_break_match_class_field_pipeline() {
        let lo = std_field();
        let hi = oracle_field();
        let spec_lo = std_spec(&lo);
        let pipeline = lo.verify_main_theorem(&spec_lo).unwrap();
        let spec_hi = transport_spec(&lo, &hi, &spec_lo).unwrap();
        let report = run_oracle(&hi, &spec_hi).unwrap();
        assert_eq!(report.b, 2);
        assert_eq!(report.i2, 0);
        assert_eq!(report.i0, 9 * 2 - 2);
        assert_eq!(report.i1, report.i1_minpoly);
        assert_eq!(report.i1, pipeline.i1);
        assert_eq!(report.b_star, pipeline.b_star);
        // The headline identity, measured entirely inside L.
        assert_eq!(report.b_star, report.i1 - 9 * 2 + 3 * 2 + 2);
    }

    #[test]
    fn minimal_break_tower_has_coincident_indices() {
        let field = oracle_field();
        let spec = std_spec_b1(&field);
        let pipeline = field.verify_main_theorem(&spec).unwrap();
        let report = run_oracle(&field, &spec).unwrap();
        assert_eq!(report.b, 1);
        assert_eq!(report.i0, 8);
        assert_eq!(report.i1, 8);
        assert_eq!(report.i1_minpoly, 8);
        assert_eq!(report.b_star, 3);
        assert_eq!(report.b_star, pipeline.b_star);
        assert_eq!(report.i1, pipeline.i1);
    }

    #[test]
    fn degenerate_tower_agrees_with_membership_route() {
        // Residue degree 3: the class-field side is forced into the
        // degenerate branch, yet its membership-scan refined break must
        // still match the value measured in the tower.
        let field = f27_field();
        let spec = std_spec(&field);
        let pipeline = field.verify_main_theorem(&spec).unwrap();
        assert!(pipeline.degenerate);
        let report = run_oracle(&field, &spec).unwrap();
        assert_eq!(report.b, 2);
        assert_eq!(report.i1, 9 * 2 - 3 * 2);
        assert_eq!(report.i1, pipeline.i1);
        assert_eq!(report.i1, report.i1_minpoly);
        assert_eq!(report.b_star, pipeline.b_star);
    }

    #[test]
    fn refined_break_is_invariant_under_generator_change() {
        let field = oracle_field();
        let spec = std_spec(&field);
        let oracle = TowerOracle::new(&field, &spec).unwrap();
        let reference = oracle.refined_break_with((1, 0), (0, 1)).unwrap();
        for (s1, s2) in [((0, 1), (1, 0)), ((1, 1), (0, 1)), ((1, 1), (1, 2))] {
            assert_eq!(
                oracle.refined_break_with(s1, s2).unwrap(),
                reference,
                "generator pair {s1:?}, {s2:?}"
            );
        }
    }

    #[test]
    fn operator_minimum_is_attained_on_monomials() {
        // The operator gap of any nonzero α ∈ 𝒪_L is ≥ b_*, with equality on
        // some monomial π_L^j; random integral elements never go lower.
        let field = oracle_field();
        let spec = std_spec(&field);
        let oracle = TowerOracle::new(&field, &spec).unwrap();
        let b_star = oracle.refined_break().unwrap();
        let ring = oracle.ring();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let fq = field.residue_field();
        for _ in 0..8 {
            let mut alpha = ring.zero();
            for (j, slot) in alpha.iter_mut().enumerate() {
                let d = fq.from_index(rng.gen_range(0..field.q as usize));
                let lvl = rng.gen_range(0..2);
                if !fq.is_zero(&d) {
                    *slot = field.digit_term(&d, lvl);
                }
                let _ = j;
            }
            if ring.val(&alpha).is_none() {
                continue;
            }
            if let Some(gap) = oracle.operator_gap((1, 0), (0, 1), &alpha).unwrap() {
                assert!(gap >= b_star, "gap {gap} undercuts the refined break {b_star}");
            }
        }
    }

    #[test]
    fn norm_of_artin_hasse_units_matches_coefficient_formula() {
        // N_{L/K}(E_p(r·π_L^i)) ≡ E_p(ϖ^i r^{p²} − i·a_{pi}·r^p − i·a_i·r)
        // mod 𝔪^{b+1} for p ∤ i, where ϖ = N_{L/K}(π_L) = −a_{p²}: the
        // tower-side norm of an Artin–Hasse unit is controlled by two
        // minimal-polynomial coefficients.
        let field = oracle_field();
        let spec = std_spec(&field);
        let oracle = TowerOracle::new(&field, &spec).unwrap();
        let ring = oracle.ring();
        let b = oracle.ordinary_break();
        let a = oracle.minpoly();
        let fq = field.residue_field();
        // Series cutoff: terms beyond x^n with n·i ≥ p²(b+3) change the norm
        // only above 𝔪^{b+3}, which the comparison modulus never sees.
        let cutoff = (9 * (b + 3)) as usize;
        let coeffs = ep_rational_coeffs(field.p, cutoff);
        let to_k = |r: &num_rational::BigRational| -> PadicElement {
            field.from_scalar_u64(rat_mod(r, field.pmw).unwrap())
        };
        for i in [1u64, 2] {
            for re in [fq.omega(), fq.pow(&fq.omega(), 3)] {
                let r = field.teich(&re);
                let x = ring.mul_k(&ring.monomial(i as i64), &r);
                // E_p(x) by Horner over the truncated series.
                let mut ep = ring.from_k(&to_k(&coeffs[cutoff]));
                for n in (0..cutoff).rev() {
                    ep = ring.mul(&ep, &x);
                    ep[0] = field.add(&ep[0], &to_k(&coeffs[n]));
                }
                let lhs = oracle.norm_r(&ep).unwrap();
                let ii = field.from_i64(i as i64);
                let norm_pi = field.neg(&a[8]);
                let arg = field.sub(
                    &field.mul(&field.pow_u(&norm_pi, i), &field.pow_u(&r, 9)),
                    &field.add(
                        &field.mul(&ii, &field.mul(&a[3 * i as usize - 1], &field.pow_u(&r, 3))),
                        &field.mul(&ii, &field.mul(&a[i as usize - 1], &r)),
                    ),
                );
                let rhs = field.ep_eval(&arg).unwrap();
                assert!(
                    field.eq_mod(&lhs, &rhs, b + 1).unwrap(),
                    "norm–series mismatch at i = {i}"
                );
            }
        }
    }
}

//! Finitely generated ℤ/p^E-submodules of (ℤ/p^E)ⁿ, and coordinates on the
//! quotients 𝔪^{lo}/𝔪^{hi} of the maximal ideal.
//!
//! [`ZpeSpan`] keeps a set of generators in a Howell-style normal form: each
//! row has a pivot column whose entry is exactly p^a (unit normalized), rows
//! are closed under multiplication by p^{E−a} (so that membership can be
//! decided by greedy reduction), and every row is reduced against the pivots
//! above it. This is the correct notion of echelon form over the chain ring
//! ℤ/p^E: it supports membership tests, size computation, and stability
//! checks under module endomorphisms.
//!
//! [`IdealQuot`] identifies 𝔪^{lo}/𝔪^{hi} with a product of cyclic groups
//! ℤ/p^{d_i} embedded in (ℤ/p^E)ⁿ (E = max d_i, coordinates scaled by
//! p^{E−d_i}), compatibly with multiplication by p, so that additive spans of
//! unit-group data can be analyzed by [`ZpeSpan`].

use crate::error::{Error, Result};
use crate::padic::{Field, PadicElement};

/// Rank and a basis of the right-nullspace {x ∈ 𝔽_pⁿ : Mx = 0} of the matrix
/// with the given rows (entries reduced mod p; p prime).
pub(crate) fn fp_nullspace(p: u64, rows: &[Vec<u64>], n: usize) -> (usize, Vec<Vec<u64>>) {
    let powmod = |mut b: u64, mut k: u64| -> u64 {
        let mut acc = 1u64;
        b %= p;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            k >>= 1;
        }
        acc
    };
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| x % p).collect()).collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for col in 0..n {
        let Some(r) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, r);
        let inv = powmod(m[rank][col], p - 2);
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for rr in 0..m.len() {
            if rr != rank && m[rr][col] != 0 {
                let c = m[rr][col];
                for i in 0..n {
                    let sub = c * m[rank][i] % p;
                    m[rr][i] = (m[rr][i] + p - sub) % p;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..n {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![0u64; n];
        v[free] = 1;
        for (ri, &pc) in pivots.iter().enumerate() {
            v[pc] = (p - m[ri][free]) % p;
        }
        basis.push(v);
    }
    (rank, basis)
}

/// A submodule of (ℤ/p^E)ⁿ in Howell-style normal form.
#[derive(Debug, Clone)]
pub struct ZpeSpan {
    p: u64,
    /// Exponent E of the coefficient ring ℤ/p^E.
    ee: u32,
    /// p^E.
    pe: u64,
    /// Ambient rank n.
    n: usize,
    /// Rows in normal form, ordered by pivot column; rows[i].1 is the pivot
    /// column, rows[i].2 the pivot valuation a (pivot entry = p^a).
    rows: Vec<(Vec<u64>, usize, u32)>,
}

impl ZpeSpan {
    /// The zero submodule of (ℤ/p^E)ⁿ.
    pub fn new(p: u64, ee: u32, n: usize) -> Result<Self> {
        let pe = (p as u128).checked_pow(ee).filter(|&x| x < (1 << 62)).ok_or_else(|| {
            Error::config("span modulus p^E does not fit the u64 backend")
        })? as u64;
        Ok(ZpeSpan { p, ee, pe, n, rows: Vec::new() })
    }

    pub fn ambient_rank(&self) -> usize {
        self.n
    }

    pub fn exponent(&self) -> u32 {
        self.ee
    }

    fn mm(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.pe as u128) as u64
    }

    fn vp(&self, mut x: u64) -> u32 {
        if x == 0 {
            return self.ee;
        }
        let mut v = 0;
        while x % self.p == 0 {
            x /= self.p;
            v += 1;
        }
        v
    }

    fn modinv(&self, a: u64) -> u64 {
        // a is a unit mod p^E: invert mod p by Fermat, lift by Newton.
        let mut inv = 1u64;
        let mut base = a % self.p;
        let mut n = self.p - 2;
        while n > 0 {
            if n & 1 == 1 {
                inv = inv * base % self.p;
            }
            base = base * base % self.p;
            n >>= 1;
        }
        for _ in 0..self.ee.ilog2() + 2 {
            // inv <- inv(2 - a*inv)
            let t = (2 + self.pe - self.mm(a, inv) % self.pe) % self.pe;
            inv = self.mm(inv, t);
        }
        inv
    }

    /// Reduces `v` against the current rows (leaving a canonical remainder).
    fn reduce(&self, v: &mut [u64]) {
        for (row, col, a) in &self.rows {
            let x = v[*col];
            if x == 0 {
                continue;
            }
            // subtract the largest multiple of the pivot p^a that divides into x
            let q = x / self.p.pow(*a);
            if q == 0 {
                continue;
            }
            for i in 0..self.n {
                v[i] = (v[i] + self.pe - self.mm(q, row[i])) % self.pe;
            }
        }
    }

    /// Inserts a vector, returning true if the span grew.
    pub fn insert(&mut self, v: &[u64]) -> Result<bool> {
        if v.len() != self.n {
            return Err(Error::config("span insert: wrong vector length"));
        }
        let mut v: Vec<u64> = v.iter().map(|&x| x % self.pe).collect();
        let mut grew = false;
        loop {
            self.reduce(&mut v);
            // find leading column
            let lead = (0..self.n).find(|&i| v[i] != 0);
            let Some(col) = lead else { break };
            let a = self.vp(v[col]);
            // normalize: make pivot entry exactly p^a
            let unit = v[col] / self.p.pow(a);
            let uinv = self.modinv(unit);
            for x in v.iter_mut() {
                *x = self.mm(*x, uinv);
            }
            // is there an existing pivot at this column?
            match self.rows.iter().position(|(_, c, _)| *c == col) {
                None => {
                    self.install(v.clone(), col, a);
                    grew = true;
                    break;
                }
                Some(idx) => {
                    let (_, _, a_old) = self.rows[idx];
                    if a >= a_old {
                        // reduce() above should have cleared this; defensive
                        let q = self.p.pow(a - a_old);
                        let row = self.rows[idx].0.clone();
                        for i in 0..self.n {
                            v[i] = (v[i] + self.pe - self.mm(q, row[i])) % self.pe;
                        }
                        continue;
                    }
                    // v becomes the new pivot; the old row gets reduced by it.
                    let (old_row, _, _) = self.rows.remove(idx);
                    self.install(v.clone(), col, a);
                    grew = true;
                    v = old_row;
                    continue;
                }
            }
        }
        Ok(grew)
    }

    fn install(&mut self, v: Vec<u64>, col: usize, a: u32) {
        let pos = self.rows.partition_point(|(_, c, _)| *c < col);
        self.rows.insert(pos, (v.clone(), col, a));
        // Howell closure: p^{E-a} * row has its pivot annihilated, but its tail
        // may still contribute to the span at later columns.
        if a > 0 {
            let q = self.p.pow(self.ee - a);
            let mut tail: Vec<u64> = v.iter().map(|&x| self.mm(q, x)).collect();
            tail[col] = 0;
            if tail.iter().any(|&x| x != 0) {
                let _ = self.insert(&tail);
            }
        }
    }

    /// Membership test by greedy reduction.
    pub fn contains(&self, v: &[u64]) -> bool {
        let mut w: Vec<u64> = v.iter().map(|&x| x % self.pe).collect();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// log_p of the number of elements of the span.
    pub fn log_size(&self) -> u64 {
        self.rows.iter().map(|(_, _, a)| (self.ee - a) as u64).sum()
    }

    /// The normalized rows (for stability checks and iteration).
    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.rows.iter().map(|(r, _, _)| r.as_slice())
    }

    /// Enumerates all elements of the span (use only when log_size is small).
    pub fn enumerate(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![0u64; self.n]];
        for (row, _, a) in &self.rows {
            let order = self.p.pow(self.ee - a);
            let mut next = Vec::with_capacity(out.len() * order as usize);
            for base in &out {
                let mut acc = base.clone();
                for _ in 0..order {
                    next.push(acc.clone());
                    for i in 0..self.n {
                        acc[i] = (acc[i] + row[i]) % self.pe;
                    }
                }
            }
            out = next;
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Coordinates on Q = 𝔪^{lo}/𝔪^{hi}.
///
/// Slot (i, j) (π-power i < e, ω-power j < f) carries the coefficient digits
/// w_i(lo) .. w_i(hi)−1 of the π^i-coordinate, where w_i(n) = ⌈(n−i)/e⌉⁺ is
/// the number of p-digits of that coordinate below level n. The slot group is
/// ℤ/p^{d_i} with d_i = w_i(hi) − w_i(lo); it embeds in ℤ/p^E (E = max d_i)
/// scaled by p^{E−d_i}, making the embedding compatible with multiplication
/// by p on the ideal side.
#[derive(Debug, Clone)]
pub struct IdealQuot {
    /// Lower level (inclusive).
    pub lo: i64,
    /// Upper level (exclusive on digits: classes are taken mod 𝔪^{hi}).
    pub hi: i64,
    /// Common exponent E.
    pub ee: u32,
    /// Per (i, j) slot: (pi-power i, omega-power j, w_lo, d).
    slots: Vec<(usize, usize, u32, u32)>,
}

impl IdealQuot {
    /// Builds the coordinate system for 𝔪^{lo}/𝔪^{hi}.
    pub fn new(field: &Field, lo: i64, hi: i64) -> Result<Self> {
        if lo < 0 || hi < lo {
            return Err(Error::config("IdealQuot requires 0 <= lo <= hi"));
        }
        let e = field.e as usize;
        let width = |n: i64, i: usize| -> u32 {
            let d = n - i as i64;
            if d <= 0 {
                0
            } else {
                d.div_euclid(field.e) as u32 + u32::from(d.rem_euclid(field.e) != 0)
            }
        };
        let mut slots = Vec::new();
        let mut ee = 0u32;
        for i in 0..e {
            let w_lo = width(lo, i);
            let w_hi = width(hi, i);
            let d = w_hi - w_lo;
            if d == 0 {
                continue;
            }
            ee = ee.max(d);
            for j in 0..field.f {
                slots.push((i, j, w_lo, d));
            }
        }
        if ee as i64 > field.mw as i64 {
            return Err(Error::precision("IdealQuot digit range exceeds the working modulus"));
        }
        Ok(IdealQuot { lo, hi, ee: ee.max(1), slots })
    }

    /// Number of coordinates.
    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    /// A fresh zero span over the matching coefficient ring.
    pub fn zero_span(&self, field: &Field) -> Result<ZpeSpan> {
        ZpeSpan::new(field.p, self.ee, self.rank())
    }

    /// Coordinates of x (requires v(x) ≥ lo and prec(x) ≥ hi).
    pub fn to_coords(&self, field: &Field, x: &PadicElement) -> Result<Vec<u64>> {
        if x.prec < self.hi {
            return Err(Error::precision(format!(
                "element precision {} below quotient level {}",
                x.prec, self.hi
            )));
        }
        if field.vlow(x) < self.lo {
            return Err(Error::config("element does not lie in the ideal power m^lo"));
        }
        let r = field.reduce_mod(x, self.hi)?;
        let mut out = Vec::with_capacity(self.slots.len());
        for &(i, j, w_lo, d) in &self.slots {
            let digits = (r.c[i][j] / field.p.pow(w_lo)) % field.p.pow(d);
            out.push(digits * field.p.pow(self.ee - d));
        }
        Ok(out)
    }

    /// The element of 𝔪^{lo}/𝔪^{hi} with the given coordinates, as a canonical
    /// representative with precision hi.
    pub fn from_coords(&self, field: &Field, coords: &[u64]) -> Result<PadicElement> {
        if coords.len() != self.slots.len() {
            return Err(Error::config("from_coords: wrong coordinate length"));
        }
        let mut x = field.zero();
        for (&(i, j, w_lo, d), &c) in self.slots.iter().zip(coords) {
            let scale = field.p.pow(self.ee - d);
            if c % scale != 0 {
                return Err(Error::config("from_coords: coordinate outside the embedded subgroup"));
            }
            let digits = (c / scale) % field.p.pow(d);
            let mut a = vec![0u64; field.f];
            a[j] = digits * field.p.pow(w_lo);
            let mut term = field.zero();
            term.c[i] = a;
            x = field.add(&x, &term);
        }
        field.reduce_mod(&x, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::testutil::{std_field, zeta9_field};

    /// Brute-force closure of a generating set inside (Z/p^E)^n.
    fn brute_span(p: u64, ee: u32, n: usize, gens: &[Vec<u64>]) -> Vec<Vec<u64>> {
        let pe = p.pow(ee);
        let mut set = std::collections::BTreeSet::new();
        set.insert(vec![0u64; n]);
        loop {
            let mut grew = false;
            let snapshot: Vec<Vec<u64>> = set.iter().cloned().collect();
            for s in &snapshot {
                for g in gens {
                    let sum: Vec<u64> = (0..n).map(|i| (s[i] + g[i]) % pe).collect();
                    if set.insert(sum) {
                        grew = true;
                    }
                }
            }
            if !grew {
                return set.into_iter().collect();
            }
        }
    }

    #[test]
    fn span_matches_brute_force_closure() {
        // Deterministic pseudo-random small cases over Z/9 and Z/27.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rng = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for &(p, ee, n, gens_count) in
            &[(3u64, 2u32, 2usize, 2usize), (3, 2, 3, 2), (3, 3, 2, 3), (5, 2, 2, 2)]
        {
            let pe = p.pow(ee);
            for _case in 0..6 {
                let gens: Vec<Vec<u64>> =
                    (0..gens_count).map(|_| (0..n).map(|_| rng() % pe).collect()).collect();
                let mut span = ZpeSpan::new(p, ee, n).unwrap();
                for g in &gens {
                    span.insert(g).unwrap();
                }
                let brute = brute_span(p, ee, n, &gens);
                assert_eq!(
                    p.pow(span.log_size() as u32) as usize,
                    brute.len(),
                    "size mismatch for gens {gens:?}"
                );
                for v in &brute {
                    assert!(span.contains(v), "missing {v:?} for gens {gens:?}");
                }
                // And nothing extra: check a sample of non-members.
                let enumerated = span.enumerate();
                assert_eq!(enumerated.len(), brute.len());
                assert_eq!(enumerated, brute);
            }
        }
    }

    #[test]
    fn nullspace_matches_hand_computation() {
        // x1 + 2x2 = 0, x3 = 0 over F_3: rank 2, kernel spanned by (1,1,0).
        let (rank, basis) = fp_nullspace(3, &[vec![1, 2, 0], vec![0, 0, 1]], 3);
        assert_eq!(rank, 2);
        assert_eq!(basis, vec![vec![1, 1, 0]]);
        // Every basis vector of a random system is annihilated by every row.
        let rows = vec![vec![2u64, 4, 1, 0, 3], vec![1, 1, 1, 1, 1], vec![0, 3, 2, 4, 0]];
        let (rank, basis) = fp_nullspace(5, &rows, 5);
        assert_eq!(rank + basis.len(), 5);
        for v in &basis {
            for r in &rows {
                let dot: u64 = r.iter().zip(v).map(|(&a, &b)| a * b % 5).sum::<u64>() % 5;
                assert_eq!(dot, 0);
            }
        }
    }

    #[test]
    fn insert_reports_growth() {
        let mut s = ZpeSpan::new(3, 2, 2).unwrap();
        assert!(s.insert(&[3, 0]).unwrap());
        assert!(!s.insert(&[6, 0]).unwrap());
        assert!(s.insert(&[1, 1]).unwrap());
        assert!(!s.insert(&[4, 1]).unwrap());
        assert_eq!(s.log_size(), 3); // <(1,1)> has 9 elements, <(3,0)> adds 3 more
    }

    #[test]
    fn quotient_coords_roundtrip() {
        let k = zeta9_field();
        for (lo, hi) in [(0i64, 5i64), (2, 9), (3, 10), (7, 13)] {
            let q = IdealQuot::new(&k, lo, hi).unwrap();
            // roundtrip a few canonical elements
            let fq = k.residue_field();
            for idx in [1usize, 4, 7] {
                for h in lo..hi.min(lo + 4) {
                    let x = k.digit_term(&fq.from_index(idx), h);
                    let coords = q.to_coords(&k, &x).unwrap();
                    let back = q.from_coords(&k, &coords).unwrap();
                    assert!(k.eq_mod(&x, &back, hi).unwrap(), "roundtrip failed at level {h}");
                }
            }
        }
    }

    #[test]
    fn quotient_embedding_respects_addition_and_p_scaling() {
        let k = std_field();
        let q = IdealQuot::new(&k, 1, 6).unwrap();
        let fq = k.residue_field();
        let x = k.digit_term(&fq.from_index(2), 1);
        let y = k.digit_term(&fq.from_index(5), 2);
        let cx = q.to_coords(&k, &x).unwrap();
        let cy = q.to_coords(&k, &y).unwrap();
        let pe = k.p.pow(q.ee);
        let sum: Vec<u64> = cx.iter().zip(&cy).map(|(&a, &b)| (a + b) % pe).collect();
        let direct = q.to_coords(&k, &k.add(&x, &y)).unwrap();
        assert_eq!(sum, direct, "coordinates must be additive");
        // p * x on the ideal side = scalar p on the coordinate side.
        let px = k.mul_i64(&x, 3);
        let c_px = q.to_coords(&k, &px).unwrap();
        let scaled: Vec<u64> = cx.iter().map(|&a| (a * 3) % pe).collect();
        assert_eq!(c_px, scaled, "multiplication by p must commute with the embedding");
    }

    #[test]
    fn coords_reject_low_precision_and_wrong_ideal() {
        let k = std_field();
        let q = IdealQuot::new(&k, 2, 6).unwrap();
        let one = k.one();
        assert!(q.to_coords(&k, &one).is_err(), "v(1) = 0 < lo = 2");
        let x = k.reduce_mod(&k.pi_pow(2), 4).unwrap();
        assert!(q.to_coords(&k, &x).is_err(), "precision 4 < hi = 6");
    }
}

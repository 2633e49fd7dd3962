//! The rank-2 Heisenberg Fock space `M_2(1)` in the sigma-eigenbasis
//! `a`, `a'` with `<a,a> = <a',a'> = 0` and `<a,a'> = 1`.
//!
//! Elements are finite rational combinations of oscillator monomials
//! `a(-i_1)...a(-i_h) a'(-j_1)...a'(-j_k) 1`. The n-th products `v_n u` are
//! computed by the normal-product recursion
//!
//! ```text
//! (h(-m) y)_n w = sum_{i>=0} (-1)^i C(-m,i) { h(-m-i) y_{n+i} w - (-1)^m y_{-m+n-i} h(i) w }
//! ```
//!
//! peeling one creation mode of the left argument at a time.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{fmt_rational, int, Rational};

/// The two sigma-eigenvectors spanning `C L`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gen {
    /// `a`, eigenvalue `zeta`.
    A,
    /// `a'`, eigenvalue `zeta^2`.
    Aprime,
}

impl Gen {
    /// The generator with nonzero pairing against `self`.
    pub fn partner(self) -> Gen {
        match self {
            Gen::A => Gen::Aprime,
            Gen::Aprime => Gen::A,
        }
    }
}

/// A monomial in creation modes, stored canonically: each block
/// non-increasing, `a` block first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct OscMonomial {
    a: Vec<u16>,
    b: Vec<u16>,
}

impl OscMonomial {
    pub fn vacuum() -> Self {
        Self::default()
    }

    /// Builds a monomial from mode indices `i` of `a(-i)` and `j` of `a'(-j)`.
    /// Panics if an index is zero.
    pub fn new(a_modes: &[u16], b_modes: &[u16]) -> Self {
        assert!(
            a_modes.iter().chain(b_modes).all(|&i| i >= 1),
            "creation mode indices must be >= 1"
        );
        let mut a = a_modes.to_vec();
        let mut b = b_modes.to_vec();
        a.sort_unstable_by(|x, y| y.cmp(x));
        b.sort_unstable_by(|x, y| y.cmp(x));
        OscMonomial { a, b }
    }

    pub fn a_modes(&self) -> &[u16] {
        &self.a
    }

    pub fn b_modes(&self) -> &[u16] {
        &self.b
    }

    pub fn modes(&self, g: Gen) -> &[u16] {
        match g {
            Gen::A => &self.a,
            Gen::Aprime => &self.b,
        }
    }

    pub fn is_vacuum(&self) -> bool {
        self.a.is_empty() && self.b.is_empty()
    }

    pub fn weight(&self) -> i64 {
        self.a.iter().chain(&self.b).map(|&i| i as i64).sum()
    }

    /// `(#a - #a') mod 3`.
    pub fn sigma_charge(&self) -> u8 {
        (self.a.len() as i64 - self.b.len() as i64).rem_euclid(3) as u8
    }

    pub fn degree(&self) -> usize {
        self.a.len() + self.b.len()
    }

    pub fn count(&self, g: Gen, k: u16) -> usize {
        self.modes(g).iter().filter(|&&i| i == k).count()
    }

    /// Multiply by the creation mode `g(-k)`.
    pub fn with_mode(&self, g: Gen, k: u16) -> Self {
        let mut out = self.clone();
        let v = match g {
            Gen::A => &mut out.a,
            Gen::Aprime => &mut out.b,
        };
        let pos = v.iter().position(|&i| i < k).unwrap_or(v.len());
        v.insert(pos, k);
        out
    }

    /// Remove one copy of `g(-k)`, if present.
    pub fn without_mode(&self, g: Gen, k: u16) -> Option<Self> {
        let mut out = self.clone();
        let v = match g {
            Gen::A => &mut out.a,
            Gen::Aprime => &mut out.b,
        };
        let pos = v.iter().position(|&i| i == k)?;
        v.remove(pos);
        Some(out)
    }

    /// Split off the creation mode with the largest index (`a` wins ties).
    fn peel(&self) -> Option<(Gen, u16, OscMonomial)> {
        let ta = self.a.first().copied();
        let tb = self.b.first().copied();
        let g = match (ta, tb) {
            (None, None) => return None,
            (Some(_), None) => Gen::A,
            (None, Some(_)) => Gen::Aprime,
            (Some(x), Some(y)) => {
                if x >= y {
                    Gen::A
                } else {
                    Gen::Aprime
                }
            }
        };
        let mut rest = self.clone();
        let k = match g {
            Gen::A => rest.a.remove(0),
            Gen::Aprime => rest.b.remove(0),
        };
        Some((g, k, rest))
    }
}

impl fmt::Display for OscMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_vacuum() {
            return write!(f, "1");
        }
        for i in &self.a {
            write!(f, "a(-{i})")?;
        }
        for j in &self.b {
            write!(f, "a'(-{j})")?;
        }
        Ok(())
    }
}

impl Serialize for OscMonomial {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        (&self.a, &self.b).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for OscMonomial {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let (a, b) = <(Vec<u16>, Vec<u16>)>::deserialize(de)?;
        if a.iter().chain(&b).any(|&i| i == 0) {
            return Err(serde::de::Error::custom("mode index 0"));
        }
        Ok(OscMonomial::new(&a, &b))
    }
}

/// A finite rational linear combination of monomials. Zero coefficients are
/// never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FockElement {
    terms: BTreeMap<OscMonomial, Rational>,
}

impl FockElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn vacuum() -> Self {
        Self::from_monomial(OscMonomial::vacuum())
    }

    pub fn from_monomial(m: OscMonomial) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(m, Rational::one());
        FockElement { terms }
    }

    /// Shorthand for `a(-i...) a'(-j...) 1`.
    pub fn mono(a_modes: &[u16], b_modes: &[u16]) -> Self {
        Self::from_monomial(OscMonomial::new(a_modes, b_modes))
    }

    pub fn terms(&self) -> &BTreeMap<OscMonomial, Rational> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &OscMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: OscMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += k * other`.
    pub fn add_scaled(&mut self, other: &FockElement, k: &Rational) {
        if k.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c * k);
        }
    }

    pub fn scaled(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        FockElement {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    /// Common weight of all terms, `None` if inhomogeneous or zero.
    pub fn weight(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|m| m.weight());
        let w = it.next()?;
        it.all(|x| x == w).then_some(w)
    }

    pub fn sigma_charge(&self) -> Option<u8> {
        let mut it = self.terms.keys().map(|m| m.sigma_charge());
        let c = it.next()?;
        it.all(|x| x == c).then_some(c)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.weight().is_some()
    }

    /// Map each monomial through `f`, keeping coefficients.
    fn map_monomials(&self, mut f: impl FnMut(&OscMonomial) -> FockElement) -> FockElement {
        let mut out = FockElement::zero();
        for (m, c) in &self.terms {
            out.add_scaled(&f(m), c);
        }
        out
    }
}

impl fmt::Display for FockElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "({})*{m}", fmt_rational(c))?;
            }
        }
        Ok(())
    }
}

impl std::ops::Add for &FockElement {
    type Output = FockElement;
    fn add(self, o: &FockElement) -> FockElement {
        let mut out = self.clone();
        out.add_scaled(o, &Rational::one());
        out
    }
}

impl std::ops::Add for FockElement {
    type Output = FockElement;
    fn add(self, o: FockElement) -> FockElement {
        &self + &o
    }
}

impl std::ops::Sub for &FockElement {
    type Output = FockElement;
    fn sub(self, o: &FockElement) -> FockElement {
        let mut out = self.clone();
        out.add_scaled(o, &-Rational::one());
        out
    }
}

impl std::ops::Sub for FockElement {
    type Output = FockElement;
    fn sub(self, o: FockElement) -> FockElement {
        &self - &o
    }
}

impl std::ops::Neg for FockElement {
    type Output = FockElement;
    fn neg(self) -> FockElement {
        self.scaled(&-Rational::one())
    }
}

impl std::ops::Mul<&FockElement> for &Rational {
    type Output = FockElement;
    fn mul(self, v: &FockElement) -> FockElement {
        v.scaled(self)
    }
}

impl std::ops::Mul<FockElement> for i64 {
    type Output = FockElement;
    fn mul(self, v: FockElement) -> FockElement {
        v.scaled(&int(self))
    }
}

impl Serialize for FockElement {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let list: Vec<(&OscMonomial, String)> =
            self.terms.iter().map(|(m, c)| (m, fmt_rational(c))).collect();
        list.serialize(ser)
    }
}

/// Action of a single mode `g(n)` on a monomial.
fn mode_on_monomial(g: Gen, n: i64, m: &OscMonomial) -> FockElement {
    if n < 0 {
        return FockElement::from_monomial(m.with_mode(g, (-n) as u16));
    }
    if n == 0 {
        // zero modes act by the momentum, which is 0 on M_2(1)
        return FockElement::zero();
    }
    let k = n as u16;
    let partner = g.partner();
    let c = m.count(partner, k);
    if c == 0 {
        return FockElement::zero();
    }
    let rest = m.without_mode(partner, k).expect("mode present");
    let mut out = FockElement::zero();
    out.add_term(rest, int(n * c as i64));
    out
}

/// Apply the mode `g(n)` to `v`; weight changes by `-n`.
pub fn mode_apply(g: Gen, n: i64, v: &FockElement) -> FockElement {
    v.map_monomials(|m| mode_on_monomial(g, n, m))
}

/// `C(m + i - 1, i) = (-1)^i C(-m, i)` for `m >= 1`, `i >= 0`.
fn neg_binom_abs(m: i64, i: i64) -> Rational {
    let mut acc: u128 = 1;
    for j in 0..i {
        acc = acc * (m + j) as u128 / (j + 1) as u128;
    }
    Rational::from_integer(acc.into())
}

type ProductKey = (OscMonomial, i64, OscMonomial);

/// Memoised evaluator for `v_n u`. Reuse one instance across many products
/// of the same grades; each instance is single-threaded.
#[derive(Default)]
pub struct NormalProducts {
    memo: HashMap<ProductKey, Arc<FockElement>>,
}

impl NormalProducts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cache_len(&self) -> usize {
        self.memo.len()
    }

    /// `v_n u`, bilinear in `v` and `u`.
    pub fn product(&mut self, v: &FockElement, n: i64, u: &FockElement) -> FockElement {
        let mut out = FockElement::zero();
        for (mv, cv) in v.terms() {
            for (mu, cu) in u.terms() {
                let p = self.monomial_product(mv, n, mu);
                out.add_scaled(&p, &(cv * cu));
            }
        }
        out
    }

    fn monomial_product(&mut self, y: &OscMonomial, n: i64, w: &OscMonomial) -> Arc<FockElement> {
        if y.weight() + w.weight() - n - 1 < 0 {
            return Arc::new(FockElement::zero());
        }
        if y.is_vacuum() {
            return Arc::new(if n == -1 {
                FockElement::from_monomial(w.clone())
            } else {
                FockElement::zero()
            });
        }
        let key = (y.clone(), n, w.clone());
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let res = Arc::new(self.expand(y, n, w));
        self.memo.insert(key, res.clone());
        res
    }

    fn expand(&mut self, y: &OscMonomial, n: i64, w: &OscMonomial) -> FockElement {
        let (h, m, rest) = y.peel().expect("non-vacuum");
        let m = m as i64;
        let mut out = FockElement::zero();

        // h(-m-i) rest_{n+i} w
        let bound = rest.weight() + w.weight() - 1;
        let range: Vec<i64> = if rest.is_vacuum() {
            if -1 - n >= 0 {
                vec![-1 - n]
            } else {
                vec![]
            }
        } else {
            (0..=(bound - n).max(-1)).collect()
        };
        for i in range {
            let inner = self.monomial_product(&rest, n + i, w);
            if inner.is_zero() {
                continue;
            }
            let coef = neg_binom_abs(m, i);
            let raised = (m + i) as u16;
            for (mono, c) in inner.terms() {
                out.add_term(mono.with_mode(h, raised), c * &coef);
            }
        }

        // - (-1)^m rest_{-m+n-i} h(i) w, i >= 1
        let sign = if m % 2 == 0 { -1 } else { 1 };
        let partner = h.partner();
        let mut seen: Vec<u16> = w.modes(partner).to_vec();
        seen.dedup();
        for k in seen {
            let i = k as i64;
            let cnt = w.count(partner, k) as i64;
            let w2 = w.without_mode(partner, k).expect("mode present");
            let inner = self.monomial_product(&rest, -m + n - i, &w2);
            if inner.is_zero() {
                continue;
            }
            let coef = neg_binom_abs(m, i) * int(sign * cnt * i);
            out.add_scaled(&inner, &coef);
        }
        out
    }
}

/// `v_n u` via the normal-product recursion.
pub fn normal_product(v: &FockElement, n: i64, u: &FockElement) -> FockElement {
    NormalProducts::new().product(v, n, u)
}

/// The Virasoro element `omega = a(-1) a'(-1) 1`.
pub fn omega() -> FockElement {
    FockElement::mono(&[1], &[1])
}

/// `L(k) v = omega_{k+1} v`.
pub fn virasoro(k: i64, v: &FockElement) -> FockElement {
    normal_product(&omega(), k + 1, v)
}

/// `gamma(n) = a(-n+1) a'(-1) 1`, weight `n`.
pub fn gamma(n: i64) -> Result<FockElement> {
    if n < 2 {
        return Err(Error::GammaIndex(n));
    }
    Ok(FockElement::mono(&[(n - 1) as u16], &[1]))
}

/// Partitions of `n` with parts at most `max`, in descending lexicographic
/// order (`[2]` before `[1, 1]`).
fn partitions(n: u16, max: u16, prefix: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
    if n == 0 {
        out.push(prefix.clone());
        return;
    }
    for p in (1..=max.min(n)).rev() {
        prefix.push(p);
        partitions(n - p, p, prefix, out);
        prefix.pop();
    }
}

pub(crate) fn partitions_of(n: u16) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    partitions(n, n, &mut Vec::new(), &mut out);
    out
}

/// All monomials of the given weight, optionally restricted to one
/// sigma-charge. Ordered by the weight of the `a` block (descending), then
/// each block in descending lexicographic order.
pub fn basis(weight: i64, charge_filter: Option<u8>) -> Result<Vec<OscMonomial>> {
    if weight < 0 {
        return Err(Error::NegativeWeight(weight));
    }
    let w = weight as u16;
    let mut out = Vec::new();
    for wa in (0..=w).rev() {
        let pa = partitions_of(wa);
        let pb = partitions_of(w - wa);
        for a in &pa {
            for b in &pb {
                let m = OscMonomial {
                    a: a.clone(),
                    b: b.clone(),
                };
                if charge_filter.is_none_or(|c| m.sigma_charge() == c) {
                    out.push(m);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> FockElement {
        FockElement::vacuum()
    }

    #[test]
    fn single_contraction() {
        let v = FockElement::mono(&[], &[1]);
        assert_eq!(mode_apply(Gen::A, 1, &v), one());
        assert!(mode_apply(Gen::A, 0, &FockElement::mono(&[2, 1], &[])).is_zero());
        assert!(mode_apply(Gen::A, 0, &one()).is_zero());
    }

    #[test]
    fn annihilation_by_hand() {
        let v = FockElement::mono(&[], &[2, 1]);
        assert_eq!(
            mode_apply(Gen::A, 2, &v),
            FockElement::mono(&[], &[1]).scaled(&int(2))
        );
    }

    #[test]
    fn vacuum_products() {
        let v = FockElement::mono(&[3, 1], &[2]);
        assert_eq!(normal_product(&v, -1, &one()), v);
        for n in 0..4 {
            assert!(normal_product(&v, n, &one()).is_zero());
        }
        assert_eq!(normal_product(&one(), -1, &v), v);
        assert!(normal_product(&one(), -2, &v).is_zero());
    }

    #[test]
    fn omega_zero_mode_on_two_modes() {
        for n in 1..4u16 {
            for m in 1..4u16 {
                let v = FockElement::mono(&[n], &[m]);
                let lhs = normal_product(&omega(), 0, &v);
                let mut rhs = FockElement::mono(&[n + 1], &[m]).scaled(&int(n as i64));
                rhs.add_scaled(&FockElement::mono(&[n], &[m + 1]), &int(m as i64));
                assert_eq!(lhs, rhs, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn virasoro_grading() {
        let v = FockElement::mono(&[3], &[1]);
        assert_eq!(virasoro(0, &v), v.scaled(&int(4)));
        assert!(virasoro(-1, &one()).is_zero());
    }

    #[test]
    fn gamma_elements() {
        assert_eq!(gamma(2).unwrap(), omega());
        assert_eq!(gamma(5).unwrap().weight(), Some(5));
        assert_eq!(gamma(7).unwrap().sigma_charge(), Some(0));
        assert!(matches!(gamma(1), Err(Error::GammaIndex(1))));
    }

    #[test]
    fn basis_small() {
        assert_eq!(basis(0, None).unwrap(), vec![OscMonomial::vacuum()]);
        let b2 = basis(2, None).unwrap();
        let expect = vec![
            OscMonomial::new(&[2], &[]),
            OscMonomial::new(&[1, 1], &[]),
            OscMonomial::new(&[1], &[1]),
            OscMonomial::new(&[], &[2]),
            OscMonomial::new(&[], &[1, 1]),
        ];
        assert_eq!(b2, expect);
        assert_eq!(basis(2, Some(0)).unwrap(), vec![OscMonomial::new(&[1], &[1])]);
        assert!(basis(-1, None).is_err());
    }

    #[test]
    fn monomial_canonical_form() {
        let m = OscMonomial::new(&[1, 3, 2], &[1, 4]);
        assert_eq!(m.a_modes(), &[3, 2, 1]);
        assert_eq!(m.b_modes(), &[4, 1]);
        assert_eq!(m.weight(), 11);
        assert_eq!(m.sigma_charge(), 1);
        assert_eq!(m.with_mode(Gen::A, 2).a_modes(), &[3, 2, 2, 1]);
        assert_eq!(m.to_string(), "a(-3)a(-2)a(-1)a'(-4)a'(-1)");
    }
}

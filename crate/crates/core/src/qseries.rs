//! Truncated q-expansions with rational exponents and coefficients in
//! Q(sqrt 3), eta and theta building blocks, and the twisted characters of
//! the two orbifold cases.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{fmt_rational, int, modular_mul, rat, ModularScalar, NumericEmbed, Quad3, Rational};

/// Sparse series `sum c_k q^(k/den)`; exponents at or above `trunc/den`
/// are unknown. `trunc == None` marks an exact (finite) series.
#[derive(Clone, Debug, PartialEq)]
pub struct QSeries {
    den: i64,
    terms: BTreeMap<i64, Quad3>,
    trunc: Option<i64>,
}

fn to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("exponent fits in i64")
}

/// `(numerator, denominator)` of `x` as machine integers.
fn parts(x: &Rational) -> (i64, i64) {
    (to_i64(x.numer()), to_i64(x.denom()))
}

impl QSeries {
    pub fn new(den: i64, terms: impl IntoIterator<Item = (i64, Quad3)>, trunc: Option<i64>) -> Self {
        assert!(den > 0, "exponent denominator must be positive");
        let mut map = BTreeMap::new();
        for (k, c) in terms {
            let e: &mut Quad3 = map.entry(k).or_insert_with(Quad3::zero);
            *e += &c;
        }
        QSeries { den, terms: map, trunc }.normalized()
    }

    pub fn zero() -> Self {
        QSeries::new(1, [], None)
    }

    pub fn one() -> Self {
        Self::constant(Quad3::one())
    }

    pub fn constant(c: Quad3) -> Self {
        QSeries::new(1, [(0, c)], None)
    }

    /// `c q^e`, exact.
    pub fn monomial(c: Quad3, e: &Rational) -> Self {
        let (n, d) = parts(e);
        QSeries::new(d, [(n, c)], None)
    }

    /// Unknown above `t`: all coefficients at exponents `>= t` dropped.
    pub fn truncated(&self, t: &Rational) -> Self {
        let (n, d) = parts(t);
        let l = self.den.lcm(&d);
        let mut out = self.lifted(l);
        let k = n * (l / d);
        out.trunc = Some(out.trunc.map_or(k, |x| x.min(k)));
        out.normalized()
    }

    pub fn exp_denominator(&self) -> i64 {
        self.den
    }

    pub fn truncation(&self) -> Option<Rational> {
        self.trunc.map(|t| rat(t, self.den))
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Rational, &Quad3)> + '_ {
        self.terms.iter().map(move |(k, c)| (rat(*k, self.den), c))
    }

    fn exponent_key(&self, e: &Rational) -> Option<i64> {
        let (n, d) = parts(e);
        if self.den % d == 0 {
            Some(n * (self.den / d))
        } else {
            None
        }
    }

    /// Coefficient at `q^e`; fails at or above the truncation order.
    pub fn coeff(&self, e: &Rational) -> Result<Quad3> {
        if let Some(t) = self.truncation() {
            if e >= &t {
                return Err(Error::BeyondTruncation(fmt_rational(e)));
            }
        }
        Ok(match self.exponent_key(e) {
            Some(k) => self.terms.get(&k).cloned().unwrap_or_else(Quad3::zero),
            None => Quad3::zero(),
        })
    }

    /// Smallest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<Rational> {
        self.terms.keys().next().map(|k| rat(*k, self.den))
    }

    pub fn leading(&self) -> Option<(Rational, Quad3)> {
        self.terms.iter().next().map(|(k, c)| (rat(*k, self.den), c.clone()))
    }

    pub fn is_rational(&self) -> bool {
        self.terms.values().all(Quad3::is_rational)
    }

    pub fn has_nonneg_integer_coeffs(&self) -> bool {
        self.terms
            .values()
            .all(|c| c.is_rational() && c.r.is_integer() && !c.r.is_negative())
    }

    fn lifted(&self, den: i64) -> Self {
        debug_assert_eq!(den % self.den, 0);
        let f = den / self.den;
        QSeries {
            den,
            terms: self.terms.iter().map(|(k, c)| (k * f, c.clone())).collect(),
            trunc: self.trunc.map(|t| t * f),
        }
    }

    fn normalized(mut self) -> Self {
        self.terms.retain(|_, c| !c.is_zero());
        if let Some(t) = self.trunc {
            self.terms.retain(|k, _| *k < t);
        }
        let mut g = self.den;
        for k in self.terms.keys() {
            g = g.gcd(k);
        }
        if let Some(t) = self.trunc {
            g = g.gcd(&t);
        }
        if g > 1 {
            self.den /= g;
            self.terms = std::mem::take(&mut self.terms).into_iter().map(|(k, c)| (k / g, c)).collect();
            self.trunc = self.trunc.map(|t| t / g);
        }
        self
    }

    fn aligned(a: &QSeries, b: &QSeries) -> (QSeries, QSeries) {
        let l = a.den.lcm(&b.den);
        (a.lifted(l), b.lifted(l))
    }

    pub fn scale(&self, c: &Quad3) -> Self {
        QSeries {
            den: self.den,
            terms: self.terms.iter().map(|(k, x)| (*k, x * c)).collect(),
            trunc: self.trunc,
        }
        .normalized()
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        QSeries {
            den: self.den,
            terms: self.terms.iter().map(|(k, x)| (*k, x.scale(c))).collect(),
            trunc: self.trunc,
        }
        .normalized()
    }

    /// Multiply by `q^e`.
    pub fn shift(&self, e: &Rational) -> Self {
        let (n, d) = parts(e);
        let l = self.den.lcm(&d);
        let s = self.lifted(l);
        let off = n * (l / d);
        QSeries {
            den: l,
            terms: s.terms.into_iter().map(|(k, c)| (k + off, c)).collect(),
            trunc: s.trunc.map(|t| t + off),
        }
        .normalized()
    }

    /// Substitute `q -> q^k` for a positive rational `k`.
    pub fn dilate(&self, k: &Rational) -> Result<Self> {
        if !k.is_positive() {
            return Err(Error::InvalidParameters(format!("dilation factor must be positive, got {}", fmt_rational(k))));
        }
        let (kn, kd) = parts(k);
        Ok(QSeries {
            den: self.den * kd,
            terms: self.terms.iter().map(|(e, c)| (e * kn, c.clone())).collect(),
            trunc: self.trunc.map(|t| t * kn),
        }
        .normalized())
    }

    /// Terms with exponent congruent to `r` modulo 1.
    pub fn sector(&self, r: &Rational) -> Self {
        let (n, d) = parts(r);
        let l = self.den.lcm(&d);
        let s = self.lifted(l);
        let target = (n * (l / d)).rem_euclid(l);
        QSeries {
            den: l,
            terms: s.terms.into_iter().filter(|(k, _)| k.rem_euclid(l) == target).collect(),
            trunc: s.trunc,
        }
        .normalized()
    }

    fn valuation_key(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn times(&self, o: &QSeries) -> QSeries {
        let (a, b) = QSeries::aligned(self, o);
        // an exact zero annihilates; otherwise an empty truncated series
        // contributes its truncation as valuation
        if (a.terms.is_empty() && a.trunc.is_none()) || (b.terms.is_empty() && b.trunc.is_none()) {
            return QSeries::zero();
        }
        let va = a.valuation_key().or(a.trunc).expect("nonempty or truncated");
        let vb = b.valuation_key().or(b.trunc).expect("nonempty or truncated");
        let trunc = match (a.trunc, b.trunc) {
            (None, None) => None,
            (Some(ta), None) => Some(ta + vb),
            (None, Some(tb)) => Some(tb + va),
            (Some(ta), Some(tb)) => Some((ta + vb).min(tb + va)),
        };
        let mut out: BTreeMap<i64, Quad3> = BTreeMap::new();
        for (ka, ca) in &a.terms {
            for (kb, cb) in &b.terms {
                let k = ka + kb;
                if let Some(t) = trunc {
                    if k >= t {
                        break;
                    }
                }
                let e = out.entry(k).or_insert_with(Quad3::zero);
                *e += &(ca * cb);
            }
        }
        QSeries { den: a.den, terms: out, trunc }.normalized()
    }

    pub fn plus(&self, o: &QSeries) -> QSeries {
        let (mut a, b) = QSeries::aligned(self, o);
        for (k, c) in b.terms {
            let e = a.terms.entry(k).or_insert_with(Quad3::zero);
            *e += &c;
        }
        a.trunc = match (a.trunc, b.trunc) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        };
        a.normalized()
    }

    pub fn minus(&self, o: &QSeries) -> QSeries {
        self.plus(&o.negated())
    }

    pub fn negated(&self) -> QSeries {
        QSeries {
            den: self.den,
            terms: self.terms.iter().map(|(k, c)| (*k, -c.clone())).collect(),
            trunc: self.trunc,
        }
    }

    /// Multiplicative inverse. The leading coefficient must be invertible;
    /// an exact series must be a monomial.
    pub fn inverse(&self) -> Result<QSeries> {
        let (v, c) = self
            .terms
            .iter()
            .next()
            .map(|(k, c)| (*k, c.clone()))
            .ok_or_else(|| Error::NonInvertibleSeries("no known nonzero coefficient".into()))?;
        let cinv = c
            .inverse()
            .ok_or_else(|| Error::NonInvertibleSeries("leading coefficient is not invertible".into()))?;
        let t = match self.trunc {
            Some(t) => t,
            None if self.terms.len() == 1 => {
                return Ok(QSeries { den: self.den, terms: [(-v, cinv)].into(), trunc: None });
            }
            None => return Err(Error::NonInvertibleSeries("exact series with several terms needs a truncation".into())),
        };
        // u = self / (c q^v) = 1 + sum u_j q^(j/den), known for j < n
        let n = t - v;
        let u: Vec<(i64, Quad3)> = self.terms.iter().skip(1).map(|(k, x)| (k - v, x * &cinv)).collect();
        let mut b: Vec<Quad3> = vec![Quad3::zero(); n as usize];
        b[0] = Quad3::one();
        for k in 1..n {
            let mut acc = Quad3::zero();
            for (j, uj) in &u {
                if *j > k {
                    break;
                }
                let bk = &b[(k - j) as usize];
                if !bk.is_zero() {
                    acc += &(uj * bk);
                }
            }
            b[k as usize] = -acc;
        }
        let terms = b
            .into_iter()
            .enumerate()
            .map(|(k, x)| (k as i64 - v, &x * &cinv));
        Ok(QSeries::new(self.den, terms, Some(n - v)))
    }

    pub fn div(&self, o: &QSeries) -> Result<QSeries> {
        Ok(self.times(&o.inverse()?))
    }

    pub fn pow(&self, e: i64) -> Result<QSeries> {
        if e < 0 {
            return self.inverse()?.pow(-e);
        }
        let mut acc = QSeries::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.times(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.times(&base);
            }
        }
        Ok(acc)
    }

    /// `sum c e^(2 pi i tau exponent)`, with the principal branch for
    /// fractional exponents.
    pub fn numeric_eval(&self, tau: Complex64) -> Result<Complex64> {
        if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(Error::NotUpperHalfPlane(tau.im));
        }
        let two_pi_i_tau = Complex64::new(0.0, 2.0 * std::f64::consts::PI) * tau;
        let mut sum = Complex64::zero();
        for (k, c) in &self.terms {
            let e = *k as f64 / self.den as f64;
            sum += (two_pi_i_tau * e).exp() * c.numeric_embed(tau)?;
        }
        Ok(sum)
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})q^{}", fmt_rational(&e))?;
        }
        if first {
            write!(f, "0")?;
        }
        if let Some(t) = self.truncation() {
            write!(f, " + O(q^{})", fmt_rational(&t))?;
        }
        Ok(())
    }
}

impl Serialize for QSeries {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let terms: Vec<(String, String, String, String)> = self
            .iter()
            .map(|(e, c)| (e.numer().to_string(), e.denom().to_string(), fmt_rational(&c.r), fmt_rational(&c.s)))
            .collect();
        let mut st = ser.serialize_struct("QSeries", 3)?;
        st.serialize_field("exp_denominator", &self.den)?;
        st.serialize_field("terms", &terms)?;
        st.serialize_field("truncation", &self.truncation().map(|t| fmt_rational(&t)))?;
        st.end()
    }
}

macro_rules! series_binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr for &QSeries {
            type Output = QSeries;
            fn $m(self, o: &QSeries) -> QSeries {
                QSeries::$f(self, o)
            }
        }
        impl $tr for QSeries {
            type Output = QSeries;
            fn $m(self, o: QSeries) -> QSeries {
                QSeries::$f(&self, &o)
            }
        }
    };
}
series_binop!(Add, add, plus);
series_binop!(Sub, sub, minus);
series_binop!(Mul, mul, times);

impl Neg for QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries::negated(&self)
    }
}

/// Coefficients of `prod_{n>=1} (1 - x^n)^power` below `x^len`.
fn euler_product(power: i64, len: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); len];
    if len == 0 {
        return c;
    }
    c[0] = BigInt::one();
    for n in 1..len {
        for _ in 0..power.unsigned_abs() {
            if power > 0 {
                // multiply by (1 - x^n)
                for k in (n..len).rev() {
                    let t = c[k - n].clone();
                    c[k] -= t;
                }
            } else {
                // divide by (1 - x^n)
                for k in n..len {
                    let t = c[k - n].clone();
                    c[k] += t;
                }
            }
        }
    }
    c
}

/// `eta(k tau)^power = q^(k power/24) prod (1 - q^(k n))^power`, below
/// `q^trunc`.
pub fn eta_power(scale: &Rational, power: i64, trunc: &Rational) -> Result<QSeries> {
    if !scale.is_positive() {
        return Err(Error::InvalidParameters("eta scale must be positive".into()));
    }
    let lead = scale * rat(power, 24);
    // number of x-powers needed: k m + lead < trunc
    let need = ((trunc - &lead) / scale).ceil();
    let len = need.to_integer().to_i64().unwrap_or(0).max(0) as usize;
    let c = euler_product(power, len);
    let base = QSeries::new(
        1,
        c.into_iter().enumerate().map(|(m, x)| (m as i64, Quad3::from_rational(Rational::from_integer(x)))),
        Some(len as i64),
    );
    Ok(base.dilate(scale)?.shift(&lead).truncated(trunc))
}

/// `eta(k tau)` below `q^trunc`.
pub fn eta(scale: &Rational, trunc: &Rational) -> Result<QSeries> {
    eta_power(scale, 1, trunc)
}

fn theta_sum(scale: &Rational, half: bool, trunc: &Rational) -> Result<QSeries> {
    if !scale.is_positive() {
        return Err(Error::InvalidParameters("theta scale must be positive".into()));
    }
    // exponent k x^2 / 2 with x = m or m + 1/2
    let mut terms = Vec::new();
    let mut m: i64 = 0;
    loop {
        let x = if half { rat(2 * m + 1, 2) } else { int(m) };
        let e = scale * &x * &x / int(2);
        if &e >= trunc {
            break;
        }
        let mult = if half || m > 0 { 2 } else { 1 };
        terms.push((e, mult));
        m += 1;
    }
    let mut out = QSeries::new(1, [], None);
    for (e, mult) in terms {
        out = out.plus(&QSeries::monomial(Quad3::from_int(mult), &e));
    }
    Ok(out.truncated(trunc))
}

/// `theta_3(k tau) = sum_m q^(k m^2 / 2)`, `q = e^(2 pi i tau)`.
pub fn theta3(scale: &Rational, trunc: &Rational) -> Result<QSeries> {
    theta_sum(scale, false, trunc)
}

/// `theta_2(k tau) = sum_m q^(k (m + 1/2)^2 / 2)`.
pub fn theta2(scale: &Rational, trunc: &Rational) -> Result<QSeries> {
    theta_sum(scale, true, trunc)
}

/// `phi_0(k tau) = theta_2(2k tau) theta_2(6k tau) + theta_3(2k tau) theta_3(6k tau)`,
/// the theta series of the A2 root lattice.
pub fn phi0(scale: &Rational, trunc: &Rational) -> Result<QSeries> {
    let s2 = scale * int(2);
    let s6 = scale * int(6);
    Ok(theta2(&s2, trunc)?.times(&theta2(&s6, trunc)?) + theta3(&s2, trunc)?.times(&theta3(&s6, trunc)?))
}

/// Theta series of `sqrt(3) E6^*`:
/// `(1/3) [phi_0^3 + (1/4)(3 phi_0(3 tau) - phi_0)^3]`.
pub fn theta_h_e6(trunc: &Rational) -> Result<QSeries> {
    let p1 = phi0(&int(1), trunc)?;
    let p3 = phi0(&int(3), trunc)?;
    let d = p3.scale_rational(&int(3)) - p1.clone();
    let sum = p1.pow(3)? + d.pow(3)?.scale_rational(&rat(1, 4));
    Ok(sum.scale_rational(&rat(1, 3)))
}

/// The two lattices with a fixed-point-free-on-`H^perp` order-3 automorphism.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LatticeCase {
    /// Leech lattice, `H = 0`.
    Leech,
    /// `E6^4` Niemeier lattice, `H = sqrt(3) E6^*`.
    E6Niemeier,
}

impl LatticeCase {
    /// `(s, t)`: rank of `H` and half the rank of its complement.
    pub fn ranks(self) -> (i64, i64) {
        match self {
            LatticeCase::Leech => (0, 12),
            LatticeCase::E6Niemeier => (6, 9),
        }
    }

    /// Number of norm-2 vectors of the lattice.
    pub fn roots(self) -> i64 {
        match self {
            LatticeCase::Leech => 0,
            LatticeCase::E6Niemeier => 288,
        }
    }

    pub fn theta_h(self, trunc: &Rational) -> Result<QSeries> {
        match self {
            LatticeCase::Leech => Ok(QSeries::one().truncated(trunc)),
            LatticeCase::E6Niemeier => theta_h_e6(trunc),
        }
    }
}

/// `theta_H eta^(t-s) / eta(3 tau)^t`, the trace of the automorphism on the
/// lattice VOA. Coefficients beyond what `theta_h` determines are dropped.
pub fn twisted_trace(s: i64, t: i64, theta_h: &QSeries, trunc: &Rational) -> Result<QSeries> {
    if s < 0 || t < 0 {
        return Err(Error::InvalidParameters(format!("ranks must be non-negative, got s = {s}, t = {t}")));
    }
    // factor truncations so that the product is known below `trunc`
    let rest = trunc - theta_h.valuation().unwrap_or_else(Rational::zero);
    let e1 = eta_power(&int(1), t - s, &(&rest + rat(3 * t, 24)))?;
    let e3 = eta_power(&int(3), -t, &(&rest - rat(t - s, 24)))?;
    Ok(theta_h.times(&e1).times(&e3).truncated(trunc))
}

/// Twisted trace for one of the two lattices, with `theta_H` computed to
/// the precision needed.
pub fn twisted_trace_case(case: LatticeCase, trunc: &Rational) -> Result<QSeries> {
    let (s, t) = case.ranks();
    let th = case.theta_h(&(trunc + rat(s + 2 * t, 24)))?;
    twisted_trace(s, t, &th, trunc)
}

/// One factor of an S-transformation: `f(-1/tau) = scalar * series(tau)`.
#[derive(Clone, Debug)]
pub struct TransformFactor {
    pub name: String,
    pub scalar: ModularScalar,
    pub series: QSeries,
}

/// The S-transform of a twisted trace, with the transformation constants
/// tracked symbolically.
#[derive(Clone, Debug)]
pub struct STransform {
    pub case: LatticeCase,
    pub factors: Vec<TransformFactor>,
    pub scalar: ModularScalar,
    pub constant: Quad3,
    pub series: QSeries,
}

/// `phi_0(-1/tau) = (tau / (i sqrt 3)) phi_0(tau/3)`: the constant.
pub fn phi0_s_scalar() -> ModularScalar {
    modular_mul(&ModularScalar::tau_over_i_sqrt().powi(2), &ModularScalar::sqrt3().powi(-1))
}

/// `theta_H(-1/tau)` for `H = sqrt(3) E6^*`: constant and series
/// `phi_0(tau/3)^3 + (1/4)(phi_0(tau/9) - phi_0(tau/3))^3`.
pub fn theta_h_e6_s_transform(trunc: &Rational) -> Result<TransformFactor> {
    let c = phi0_s_scalar();
    // phi_0(3(-1/tau)) = phi_0(-1/(tau/3)) = ((tau/3) / (i sqrt 3)) phi_0(tau/9)
    let c3 = modular_mul(&c, &ModularScalar::from_rational(rat(1, 3)));
    // both cubes must carry the same constant to factor it out
    let first = c.powi(3);
    let second = modular_mul(&ModularScalar::from_rational(int(3)), &c3).powi(3);
    if first != second {
        return Err(Error::InvalidParameters(format!("theta_H transform constants differ: {first} vs {second}")));
    }
    let p3 = phi0(&rat(1, 3), trunc)?;
    let p9 = phi0(&rat(1, 9), trunc)?;
    let series = p3.pow(3)? + (p9 - p3).pow(3)?.scale_rational(&rat(1, 4));
    Ok(TransformFactor {
        name: "theta_H".into(),
        scalar: modular_mul(&first, &ModularScalar::from_rational(rat(1, 3))),
        series,
    })
}

/// `eta(-1/tau)^power = (tau/i)^(power/2) eta(tau)^power` and
/// `eta(3(-1/tau))^power = (tau/(3i))^(power/2) eta(tau/3)^power`.
fn eta_s_factor(scale3: bool, power: i64, trunc: &Rational) -> Result<TransformFactor> {
    let mut c = ModularScalar::tau_over_i_sqrt();
    if scale3 {
        c = modular_mul(&c, &ModularScalar::sqrt3().powi(-1));
    }
    let scale = if scale3 { rat(1, 3) } else { int(1) };
    Ok(TransformFactor {
        name: if scale3 { format!("eta(3tau)^{power}") } else { format!("eta^{power}") },
        scalar: c.powi(power as i32),
        series: eta_power(&scale, power, trunc)?,
    })
}

/// The twisted trace evaluated at `-1/tau`, i.e. the character of the
/// twisted module, as an exact series in `q^(1/9)`-steps. Fails if the
/// accumulated constant does not close.
pub fn s_transform_twisted(case: LatticeCase, trunc: &Rational) -> Result<STransform> {
    let (s, t) = case.ranks();
    // eta(tau)^(t-s)/eta(tau/3)^t starts at q^((t-s)/24 - t/72); give the
    // other factors enough room
    let slack = int(1);
    let mut factors = Vec::new();
    if case == LatticeCase::E6Niemeier {
        factors.push(theta_h_e6_s_transform(&(trunc + &slack))?);
    }
    factors.push(eta_s_factor(false, t - s, &(trunc + &slack))?);
    factors.push(eta_s_factor(true, -t, &(trunc + &slack))?);
    let mut scalar = ModularScalar::one();
    let mut series = QSeries::one();
    for f in &factors {
        scalar = modular_mul(&scalar, &f.scalar);
        series = series.times(&f.series);
    }
    let constant = scalar.closed_value()?;
    let series = series.scale(&constant).truncated(trunc);
    Ok(STransform { case, factors, scalar, constant, series })
}

/// `T_{V_H}(-1/tau) = theta_H(-1/tau) / eta(-1/tau)^6` for the E6 case.
pub fn theta_h_over_eta6_s_transform(trunc: &Rational) -> Result<(ModularScalar, QSeries)> {
    let th = theta_h_e6_s_transform(&(trunc + int(1)))?;
    let e = eta_s_factor(false, -6, &(trunc + int(1)))?;
    let scalar = modular_mul(&th.scalar, &e.scalar);
    let c = scalar.closed_value()?;
    Ok((scalar, th.series.times(&e.series).scale(&c).truncated(trunc)))
}

/// Terms with exponent congruent to `residue` modulo 1.
pub fn sector_extract(series: &QSeries, residue: &Rational) -> QSeries {
    series.sector(residue)
}

/// `sigma_3(n)`.
fn sigma3(n: i64) -> BigInt {
    let mut s = BigInt::zero();
    for d in 1..=n {
        if n % d == 0 {
            s += BigInt::from(d).pow(3);
        }
    }
    s
}

/// `E_4 = 1 + 240 sum sigma_3(n) q^n` below `q^trunc`.
pub fn eisenstein_e4(trunc: &Rational) -> QSeries {
    let n = trunc.ceil().to_integer().to_i64().unwrap_or(0).max(0);
    let terms = (0..n).map(|k| {
        let c = if k == 0 { BigInt::one() } else { sigma3(k) * 240 };
        (k, Quad3::from_rational(Rational::from_integer(c)))
    });
    QSeries::new(1, terms, Some(n)).truncated(trunc)
}

/// `Delta = eta^24`.
pub fn delta(trunc: &Rational) -> Result<QSeries> {
    eta_power(&int(1), 24, trunc)
}

/// `J = E_4^3 / Delta - 744`.
pub fn j_oracle(trunc: &Rational) -> Result<QSeries> {
    // dividing by Delta = q + ... costs two orders of precision
    let e4 = eisenstein_e4(&(trunc + int(1)));
    let j = e4.pow(3)?.div(&delta(&(trunc + int(2)))?)?;
    Ok((j - QSeries::constant(Quad3::from_int(744))).truncated(trunc))
}

/// `Theta / eta^24` for an even unimodular lattice of rank 24 with the
/// given number of roots: `Theta = E_4^3 + (roots - 720) Delta`.
pub fn niemeier_character(roots: i64, trunc: &Rational) -> Result<QSeries> {
    let d = delta(&(trunc + int(2)))?;
    let theta = eisenstein_e4(&(trunc + int(1))).pow(3)? + d.scale_rational(&int(roots - 720));
    theta.div(&d).map(|x| x.truncated(trunc))
}

/// Pieces of the orbifold character.
#[derive(Clone, Debug)]
pub struct OrbifoldCharacter {
    pub case: LatticeCase,
    pub ch_v: QSeries,
    pub twisted_trace: QSeries,
    pub ch_w0: QSeries,
    pub twisted_module: STransform,
    /// Integer-exponent part of the twisted module character.
    pub ch_w3: QSeries,
    pub total: QSeries,
}

/// `ch W^0 + 2 ch W^3` with `ch W^0 = (ch V + 2 T_sigma) / 3`.
pub fn orbifold_character(case: LatticeCase, trunc: &Rational) -> Result<OrbifoldCharacter> {
    let ch_v = niemeier_character(case.roots(), trunc)?;
    let tt = twisted_trace_case(case, trunc)?;
    let ch_w0 = (ch_v.clone() + tt.scale_rational(&int(2))).scale_rational(&rat(1, 3));
    let st = s_transform_twisted(case, trunc)?;
    let ch_w3 = st.series.sector(&Rational::zero());
    let total = ch_w0.clone() + ch_w3.scale_rational(&int(2));
    Ok(OrbifoldCharacter {
        case,
        ch_v,
        twisted_trace: tt,
        ch_w0,
        twisted_module: st,
        ch_w3,
        total,
    })
}

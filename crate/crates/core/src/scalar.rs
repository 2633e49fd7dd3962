//! Exact scalars: rationals, the quadratic field Q(sqrt 3), the cyclotomic
//! field Q(zeta_3), and a bookkeeping scalar for modular transformation
//! constants.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n / d`, reduced. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rational_to_f64(x: &Rational) -> f64 {
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        // huge numerators/denominators: shift both down before dividing
        _ => {
            let nb = x.numer().bits() as i64;
            let db = x.denom().bits() as i64;
            let shift = (nb.max(db) - 1000).max(0) as u64;
            let n = (x.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (x.denom() >> shift).to_f64().unwrap_or(1.0);
            if d == 0.0 {
                f64::INFINITY.copysign(n)
            } else {
                n / d
            }
        }
    }
}

/// Generalized binomial `C(top, k)` for any integer `top`; zero for `k < 0`.
pub fn binomial(top: i64, k: i64) -> Rational {
    if k < 0 {
        return Rational::zero();
    }
    let mut acc = Rational::one();
    for j in 0..k {
        acc = acc * int(top - j) / int(j + 1);
    }
    acc
}

/// `n!` as an exact integer.
pub fn factorial(n: u32) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, j| acc * int(j))
}

/// Render a rational as `n` or `n/d`.
pub fn fmt_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Serialize a rational as its `n/d` string.
pub fn ser_rational<S: serde::Serializer>(x: &Rational, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&fmt_rational(x))
}

/// Serialize any collection of rationals as strings.
pub fn ser_rationals<'a, S, I>(xs: I, ser: S) -> std::result::Result<S::Ok, S::Error>
where
    S: serde::Serializer,
    I: IntoIterator<Item = &'a Rational>,
{
    ser.collect_seq(xs.into_iter().map(fmt_rational))
}

/// Parse `n` or `n/d`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Shared numeric embedding used by the cross-checks.
pub trait NumericEmbed {
    /// Floating-point value at `tau`. Values that do not depend on `tau`
    /// still validate it, so every embedding shares one error contract.
    fn numeric_embed(&self, tau: Complex64) -> Result<Complex64>;
}

fn check_tau(tau: Complex64) -> Result<()> {
    if tau.im > 0.0 && tau.re.is_finite() && tau.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NotUpperHalfPlane(tau.im))
    }
}

/// `r + s * sqrt(3)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Quad3 {
    pub r: Rational,
    pub s: Rational,
}

impl Quad3 {
    pub fn new(r: Rational, s: Rational) -> Self {
        Quad3 { r, s }
    }

    pub fn from_rational(r: Rational) -> Self {
        Quad3 {
            r,
            s: Rational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(int(n))
    }

    pub fn sqrt3() -> Self {
        Quad3 {
            r: Rational::zero(),
            s: Rational::one(),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.s.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.s.is_zero()
    }

    pub fn conj(&self) -> Self {
        Quad3 {
            r: self.r.clone(),
            s: -self.s.clone(),
        }
    }

    /// Field norm `r^2 - 3 s^2`.
    pub fn norm(&self) -> Rational {
        &self.r * &self.r - int(3) * &self.s * &self.s
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(Quad3 {
            r: c.r / &n,
            s: c.s / n,
        })
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Quad3 {
            r: &self.r * k,
            s: &self.s * k,
        }
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.r) + rational_to_f64(&self.s) * 3f64.sqrt()
    }
}

impl fmt::Display for Quad3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.r.is_zero(), self.s.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.r)),
            (true, false) => write!(f, "{}*sqrt3", fmt_rational(&self.s)),
            (false, false) => write!(
                f,
                "{} + {}*sqrt3",
                fmt_rational(&self.r),
                fmt_rational(&self.s)
            ),
        }
    }
}

impl Add for &Quad3 {
    type Output = Quad3;
    fn add(self, o: &Quad3) -> Quad3 {
        Quad3 {
            r: &self.r + &o.r,
            s: &self.s + &o.s,
        }
    }
}

impl Add for Quad3 {
    type Output = Quad3;
    fn add(self, o: Quad3) -> Quad3 {
        &self + &o
    }
}

impl AddAssign<&Quad3> for Quad3 {
    fn add_assign(&mut self, o: &Quad3) {
        self.r += &o.r;
        self.s += &o.s;
    }
}

impl Sub for &Quad3 {
    type Output = Quad3;
    fn sub(self, o: &Quad3) -> Quad3 {
        Quad3 {
            r: &self.r - &o.r,
            s: &self.s - &o.s,
        }
    }
}

impl Sub for Quad3 {
    type Output = Quad3;
    fn sub(self, o: Quad3) -> Quad3 {
        &self - &o
    }
}

impl Neg for Quad3 {
    type Output = Quad3;
    fn neg(self) -> Quad3 {
        Quad3 {
            r: -self.r,
            s: -self.s,
        }
    }
}

impl Mul for &Quad3 {
    type Output = Quad3;
    fn mul(self, o: &Quad3) -> Quad3 {
        if self.s.is_zero() && o.s.is_zero() {
            return Quad3::from_rational(&self.r * &o.r);
        }
        Quad3 {
            r: &self.r * &o.r + int(3) * &self.s * &o.s,
            s: &self.r * &o.s + &self.s * &o.r,
        }
    }
}

impl Mul for Quad3 {
    type Output = Quad3;
    fn mul(self, o: Quad3) -> Quad3 {
        &self * &o
    }
}

impl NumericEmbed for Quad3 {
    fn numeric_embed(&self, tau: Complex64) -> Result<Complex64> {
        check_tau(tau)?;
        Ok(Complex64::new(self.to_f64(), 0.0))
    }
}

impl Serialize for Quad3 {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        [fmt_rational(&self.r), fmt_rational(&self.s)].serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Quad3 {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let [r, s] = <[String; 2]>::deserialize(de)?;
        let p = |x: &str| {
            parse_rational(x).ok_or_else(|| serde::de::Error::custom(format!("bad rational {x}")))
        };
        Ok(Quad3::new(p(&r)?, p(&s)?))
    }
}

/// `u + v * zeta` with `zeta = exp(2 pi i / 3)`, so `zeta^2 = -1 - zeta`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Cyclo3 {
    pub u: Rational,
    pub v: Rational,
}

impl Cyclo3 {
    pub fn new(u: Rational, v: Rational) -> Self {
        Cyclo3 { u, v }
    }

    pub fn from_rational(u: Rational) -> Self {
        Cyclo3 {
            u,
            v: Rational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(int(n))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn zeta() -> Self {
        Cyclo3 {
            u: Rational::zero(),
            v: Rational::one(),
        }
    }

    /// `zeta^k` for any integer `k`.
    pub fn zeta_pow(k: i64) -> Self {
        match k.rem_euclid(3) {
            0 => Self::one(),
            1 => Self::zeta(),
            _ => Cyclo3::new(int(-1), int(-1)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.v.is_zero()
    }

    /// Complex conjugation: `zeta -> zeta^2`.
    pub fn conj(&self) -> Self {
        Cyclo3 {
            u: &self.u - &self.v,
            v: -self.v.clone(),
        }
    }

    /// `x * conj(x) = u^2 - u v + v^2`.
    pub fn norm(&self) -> Rational {
        &self.u * &self.u - &self.u * &self.v + &self.v * &self.v
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(Cyclo3 {
            u: c.u / &n,
            v: c.v / n,
        })
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Cyclo3 {
            u: &self.u * k,
            v: &self.v * k,
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Cyclo3::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = cyclo_mul(&acc, &base);
            }
            base = cyclo_mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn to_complex(&self) -> Complex64 {
        let z = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
        Complex64::new(rational_to_f64(&self.u), 0.0) + z * rational_to_f64(&self.v)
    }
}

/// Product in the basis `{1, zeta}`.
pub fn cyclo_mul(x: &Cyclo3, y: &Cyclo3) -> Cyclo3 {
    let vv = &x.v * &y.v;
    Cyclo3 {
        u: &x.u * &y.u - &vv,
        v: &x.u * &y.v + &x.v * &y.u - vv,
    }
}

impl fmt::Display for Cyclo3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.u.is_zero(), self.v.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.u)),
            (true, false) => write!(f, "{}*z", fmt_rational(&self.v)),
            (false, false) => write!(f, "{} + {}*z", fmt_rational(&self.u), fmt_rational(&self.v)),
        }
    }
}

impl Add for &Cyclo3 {
    type Output = Cyclo3;
    fn add(self, o: &Cyclo3) -> Cyclo3 {
        Cyclo3 {
            u: &self.u + &o.u,
            v: &self.v + &o.v,
        }
    }
}

impl Add for Cyclo3 {
    type Output = Cyclo3;
    fn add(self, o: Cyclo3) -> Cyclo3 {
        &self + &o
    }
}

impl AddAssign<&Cyclo3> for Cyclo3 {
    fn add_assign(&mut self, o: &Cyclo3) {
        self.u += &o.u;
        self.v += &o.v;
    }
}

impl Sub for &Cyclo3 {
    type Output = Cyclo3;
    fn sub(self, o: &Cyclo3) -> Cyclo3 {
        Cyclo3 {
            u: &self.u - &o.u,
            v: &self.v - &o.v,
        }
    }
}

impl Sub for Cyclo3 {
    type Output = Cyclo3;
    fn sub(self, o: Cyclo3) -> Cyclo3 {
        &self - &o
    }
}

impl Neg for Cyclo3 {
    type Output = Cyclo3;
    fn neg(self) -> Cyclo3 {
        Cyclo3 {
            u: -self.u,
            v: -self.v,
        }
    }
}

impl Mul for &Cyclo3 {
    type Output = Cyclo3;
    fn mul(self, o: &Cyclo3) -> Cyclo3 {
        cyclo_mul(self, o)
    }
}

impl Mul for Cyclo3 {
    type Output = Cyclo3;
    fn mul(self, o: Cyclo3) -> Cyclo3 {
        cyclo_mul(&self, &o)
    }
}

impl NumericEmbed for Cyclo3 {
    fn numeric_embed(&self, tau: Complex64) -> Result<Complex64> {
        check_tau(tau)?;
        Ok(self.to_complex())
    }
}

impl Serialize for Cyclo3 {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        [fmt_rational(&self.u), fmt_rational(&self.v)].serialize(ser)
    }
}

/// Constant of a modular transformation:
/// `mag * 3^(three_half/2) * exp(i pi eighth/4) * tau^(tau_half/2)`.
///
/// `tau^(1/2)` is the principal branch on the upper half plane. Even powers
/// of `3^(1/2)` are folded into `mag`, so `three_half_exponent` is 0 or 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularScalar {
    pub mag: Quad3,
    pub eighth_root_exponent: u8,
    pub tau_half_exponent: i32,
    pub three_half_exponent: i32,
}

impl ModularScalar {
    pub fn one() -> Self {
        Self::from_quad(Quad3::one())
    }

    pub fn from_quad(mag: Quad3) -> Self {
        ModularScalar {
            mag,
            eighth_root_exponent: 0,
            tau_half_exponent: 0,
            three_half_exponent: 0,
        }
    }

    pub fn from_rational(q: Rational) -> Self {
        Self::from_quad(Quad3::from_rational(q))
    }

    /// `(tau / i)^(1/2) = tau^(1/2) * exp(-i pi / 4)`, the factor in the
    /// transformation of the eta function.
    pub fn tau_over_i_sqrt() -> Self {
        ModularScalar {
            mag: Quad3::one(),
            eighth_root_exponent: 7,
            tau_half_exponent: 1,
            three_half_exponent: 0,
        }
    }

    /// `3^(1/2)` kept as an exponent.
    pub fn sqrt3() -> Self {
        ModularScalar {
            mag: Quad3::one(),
            eighth_root_exponent: 0,
            tau_half_exponent: 0,
            three_half_exponent: 1,
        }
    }

    /// `exp(i pi k / 4)`.
    pub fn eighth_root(k: i32) -> Self {
        ModularScalar {
            mag: Quad3::one(),
            eighth_root_exponent: k.rem_euclid(8) as u8,
            tau_half_exponent: 0,
            three_half_exponent: 0,
        }
    }

    fn normalized(mut self) -> Self {
        let pairs = self.three_half_exponent.div_euclid(2);
        self.three_half_exponent = self.three_half_exponent.rem_euclid(2);
        if pairs != 0 {
            let three = int(3);
            let factor = if pairs > 0 {
                num_traits::pow(three, pairs as usize)
            } else {
                num_traits::pow(three, (-pairs) as usize).recip()
            };
            self.mag = self.mag.scale(&factor);
        }
        self
    }

    pub fn powi(&self, e: i32) -> Self {
        if e < 0 {
            return self
                .inverse()
                .expect("power of a zero modular scalar")
                .powi(-e);
        }
        let mut acc = ModularScalar::one();
        for _ in 0..e {
            acc = modular_mul(&acc, self);
        }
        acc
    }

    pub fn inverse(&self) -> Option<Self> {
        let mag = self.mag.inverse()?;
        Some(
            ModularScalar {
                mag,
                eighth_root_exponent: ((8 - self.eighth_root_exponent as i32) % 8) as u8,
                tau_half_exponent: -self.tau_half_exponent,
                three_half_exponent: -self.three_half_exponent,
            }
            .normalized(),
        )
    }

    pub fn is_closed(&self) -> bool {
        self.tau_half_exponent == 0 && self.eighth_root_exponent.is_multiple_of(8)
    }

    /// Exact value of a closed scalar, ready to multiply series coefficients.
    pub fn closed_value(&self) -> Result<Quad3> {
        if !self.is_closed() {
            return Err(Error::OpenModularScalar {
                tau_half: self.tau_half_exponent,
                eighth: self.eighth_root_exponent,
            });
        }
        Ok(if self.three_half_exponent == 1 {
            &self.mag * &Quad3::sqrt3()
        } else {
            self.mag.clone()
        })
    }
}

/// Exponents add componentwise; pairs of `3^(1/2)` fold into the magnitude.
pub fn modular_mul(x: &ModularScalar, y: &ModularScalar) -> ModularScalar {
    ModularScalar {
        mag: &x.mag * &y.mag,
        eighth_root_exponent: ((x.eighth_root_exponent + y.eighth_root_exponent) % 8),
        tau_half_exponent: x.tau_half_exponent + y.tau_half_exponent,
        three_half_exponent: x.three_half_exponent + y.three_half_exponent,
    }
    .normalized()
}

impl Mul for &ModularScalar {
    type Output = ModularScalar;
    fn mul(self, o: &ModularScalar) -> ModularScalar {
        modular_mul(self, o)
    }
}

impl NumericEmbed for ModularScalar {
    fn numeric_embed(&self, tau: Complex64) -> Result<Complex64> {
        check_tau(tau)?;
        let sqrt_tau = (tau.ln() * 0.5).exp();
        let phase = Complex64::from_polar(
            1.0,
            std::f64::consts::PI * self.eighth_root_exponent as f64 / 4.0,
        );
        let three = 3f64.sqrt().powi(self.three_half_exponent);
        Ok(sqrt_tau.powi(self.tau_half_exponent) * phase * three * self.mag.to_f64())
    }
}

impl fmt::Display for ModularScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.mag)?;
        if self.three_half_exponent != 0 {
            write!(f, "*3^({}/2)", self.three_half_exponent)?;
        }
        if self.eighth_root_exponent != 0 {
            write!(f, "*e^(i pi {}/4)", self.eighth_root_exponent)?;
        }
        if self.tau_half_exponent != 0 {
            write!(f, "*tau^({}/2)", self.tau_half_exponent)?;
        }
        Ok(())
    }
}

/// Sign helper for integer-valued rationals.
pub(crate) fn is_nonneg_integer(x: &Rational) -> bool {
    x.is_integer() && !x.is_negative()
}

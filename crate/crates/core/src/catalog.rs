//! The registered congruences of `M_2(1)^sigma`, as data.

use serde::{Deserialize, Serialize};

use crate::fock::{gamma, normal_product, FockElement};
use crate::quotient::Modulus;
use crate::scalar::{binomial, int};

/// Where the expected outcome comes from.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Paper,
    Derived,
    Trivial,
}

/// How a refutation is treated.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    /// Must verify.
    Verified,
    /// Either outcome is a finding; only a definite status is required.
    VerifyOrReport,
}

#[derive(Clone, Debug)]
pub struct Identity {
    pub id: String,
    /// `lhs - rhs`, homogeneous of `weight`.
    pub expr: FockElement,
    pub weight: i64,
    pub modulus: Modulus,
    pub source: Source,
    pub expectation: Expectation,
}

fn g(n: i64) -> FockElement {
    gamma(n).expect("n >= 2")
}

fn p(v: &FockElement, u: &FockElement) -> FockElement {
    normal_product(v, -1, u)
}

/// Integer linear combination.
fn lin(terms: &[(i64, FockElement)]) -> FockElement {
    let mut out = FockElement::zero();
    for (c, t) in terms {
        out.add_scaled(t, &int(*c));
    }
    out
}

fn entry(id: &str, weight: i64, modulus: Modulus, expectation: Expectation, expr: FockElement) -> Identity {
    Identity {
        id: id.to_string(),
        expr,
        weight,
        modulus,
        source: Source::Paper,
        expectation,
    }
}

/// `a(-1)^3 1` and `a'(-1)^3 1`.
pub fn alpha_beta() -> (FockElement, FockElement) {
    (FockElement::mono(&[1, 1, 1], &[]), FockElement::mono(&[], &[1, 1, 1]))
}

/// All registered congruences of weight at most `max_weight`, sorted by id.
pub fn identities(max_weight: i64) -> Vec<Identity> {
    use Expectation::*;
    use Modulus::*;
    let mut out = Vec::new();
    let g22 = || p(&g(2), &g(2));
    let g2g3sq = || p(&g(2), &p(&g(3), &g(3)));
    let g2sqg4 = || p(&g(2), &p(&g(2), &g(4)));

    if max_weight >= 6 {
        out.push(entry("2γ(6)", 6, C2Sigma, Verified, lin(&[(2, g(6)), (-1, p(&g(3), &g(3))), (2, p(&g(2), &g(4)))])));
        let (a, b) = alpha_beta();
        out.push(entry(
            "γ(2)^3",
            6,
            C2Sigma,
            Verified,
            lin(&[(1, p(&g(2), &g22())), (-1, p(&a, &b)), (264, p(&g(2), &g(4))), (-117, p(&g(3), &g(3)))]),
        ));
    }
    if max_weight >= 7 {
        out.push(entry("7γ(7)", 7, C2Sigma, Verified, lin(&[(7, g(7)), (-1, p(&g(3), &g(4))), (3, p(&g(2), &g(5)))])));
        out.push(entry(
            "120γ(7)",
            7,
            C2Sigma,
            VerifyOrReport,
            lin(&[(120, g(7)), (-8, p(&g(2), &g(5))), (-1, p(&g(2), &p(&g(2), &g(3))))]),
        ));
        out.push(entry(
            "120γ(3)γ(4)",
            7,
            C2Sigma,
            VerifyOrReport,
            lin(&[(120, p(&g(3), &g(4))), (-7, p(&g(2), &p(&g(2), &g(3)))), (-416, p(&g(2), &g(5)))]),
        ));
        out.push(entry(
            "120γ(3)γ(4)-via-γ(7)",
            7,
            C2Sigma,
            VerifyOrReport,
            lin(&[(120, p(&g(3), &g(4))), (-840, g(7)), (-360, p(&g(2), &g(5)))]),
        ));
    }
    if max_weight >= 8 {
        out.push(entry("16γ(8)", 8, C2Sigma, Verified, lin(&[(16, g(8)), (-1, p(&g(3), &g(5))), (4, p(&g(2), &g(6)))])));
        out.push(entry("30γ(8)", 8, C2Sigma, Verified, lin(&[(30, g(8)), (-1, p(&g(4), &g(4))), (6, p(&g(2), &g(6)))])));
        out.push(entry("60γ(8)", 8, C2Sigma, VerifyOrReport, lin(&[(60, g(8)), (-6, g2g3sq()), (13, g2sqg4())])));
        out.push(entry(
            "2γ(4)γ(4)",
            8,
            C2Sigma,
            VerifyOrReport,
            lin(&[(2, p(&g(4), &g(4))), (-12, g2g3sq()), (25, g2sqg4())]),
        ));
        out.push(entry(
            "2γ(4)γ(4)-via-γ(8)",
            8,
            C2Sigma,
            VerifyOrReport,
            lin(&[(2, p(&g(4), &g(4))), (-12, p(&g(2), &g(6))), (-60, g(8))]),
        ));
        out.push(entry(
            "15γ(3)γ(5)",
            8,
            C2Sigma,
            VerifyOrReport,
            lin(&[(15, p(&g(3), &g(5))), (-54, g2g3sq()), (112, g2sqg4())]),
        ));
        out.push(entry(
            "15γ(3)γ(5)-via-γ(8)",
            8,
            C2Sigma,
            VerifyOrReport,
            lin(&[(15, p(&g(3), &g(5))), (-60, p(&g(2), &g(6))), (-240, g(8))]),
        ));
    }
    // a(-n)a'(-m-1) = C(-n, m) g(n+m+1) modulo the image of L(-1)
    for n in 1..=4i64 {
        for m in 1..=4i64 {
            let w = n + m + 1;
            if w > max_weight {
                continue;
            }
            let mut e = FockElement::mono(&[n as u16], &[(m + 1) as u16]);
            e.add_scaled(&g(w), &-binomial(-n, m));
            out.push(entry(&format!("lemma-gamma-quad({n},{m})"), w, Omega0Full, Verified, e));
        }
    }
    // (n-1)(n-2)(n+3) g(n+3) = 6 (g3 gn - (n-1) g2 g(n+1))
    for n in 3..=(max_weight - 3) {
        let k = int((n - 1) * (n - 2) * (n + 3));
        let mut e = g(n + 3).scaled(&k);
        e.add_scaled(&p(&g(3), &g(n)), &int(-6));
        e.add_scaled(&p(&g(2), &g(n + 1)), &int(6 * (n - 1)));
        out.push(entry(&format!("γ(n+3)-corollary({n:02})"), n + 3, C2Sigma, VerifyOrReport, e));
    }
    for n in 6..=max_weight {
        out.push(entry(&format!("γ({n:02})-in-C1"), n, C1Sigma, VerifyOrReport, g(n)));
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

//! Graded congruence oracle for the sigma-fixed subalgebra `M_2(1)^sigma`.
//!
//! Every congruence is decided one weight grade at a time: the generators of
//! the chosen subspace are computed exactly with the normal-product
//! recursion, row-reduced over the rationals, and the candidate element is
//! reduced against the result.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{basis, gamma, normal_product, virasoro, FockElement, NormalProducts, OscMonomial};
use crate::linalg::{Echelon, SparseVec};
use crate::scalar::{binomial, factorial, fmt_rational, int, ser_rational, ser_rationals, Rational};

/// The subspace a congruence is taken modulo.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Modulus {
    /// `span{ v_{-2} u : v, u in M_2(1)^sigma, wt(v) >= 1 }`.
    C2Sigma,
    /// `span{ v_{-1} u : wt(v), wt(u) >= 1 } + L(-1) M_2(1)^sigma`.
    C1Sigma,
    /// `omega_0 M_2(1)`, the image of `L(-1)` on the whole Fock space.
    Omega0Full,
    /// `C2Sigma + Omega0Full`.
    C2SigmaPlusOmega0,
}

impl Modulus {
    pub fn name(self) -> &'static str {
        match self {
            Modulus::C2Sigma => "C2_SIGMA",
            Modulus::C1Sigma => "C1_SIGMA",
            Modulus::Omega0Full => "OMEGA0_FULL",
            Modulus::C2SigmaPlusOmega0 => "C2_SIGMA_PLUS_OMEGA0",
        }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of a membership test.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Refuted,
}

/// Result of checking one congruence. `status` is `Verified` exactly when
/// `residual` is zero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub identity_id: String,
    pub modulus: Modulus,
    pub status: Status,
    pub residual: FockElement,
    pub generator_count: usize,
    pub rank: usize,
}

impl Report {
    pub fn is_verified(&self) -> bool {
        self.status == Status::Verified
    }
}

/// Exact reduced row-echelon basis of one weight grade of a subspace of
/// `M_2(1)^sigma`, in coordinates over `basis(weight, Some(0))`.
#[derive(Clone, Debug)]
pub struct GradedSpan {
    weight: i64,
    modulus: Modulus,
    columns: Vec<OscMonomial>,
    index: HashMap<OscMonomial, usize>,
    rows: Echelon,
    generator_count: usize,
}

/// Sigma-invariant monomials of weight `w`, as elements.
fn invariant_elements(w: i64) -> Vec<FockElement> {
    basis(w, Some(0))
        .expect("non-negative weight")
        .into_iter()
        .map(FockElement::from_monomial)
        .collect()
}

/// `(v, n, u)` triples whose products generate the grade.
fn product_generators(weight: i64, modulus: Modulus) -> Vec<(FockElement, i64, FockElement)> {
    let mut out = Vec::new();
    match modulus {
        Modulus::C2Sigma => {
            for wv in 1..weight {
                let wu = weight - 1 - wv;
                if wu < 0 {
                    continue;
                }
                let us = invariant_elements(wu);
                for v in invariant_elements(wv) {
                    for u in &us {
                        out.push((v.clone(), -2, u.clone()));
                    }
                }
            }
        }
        Modulus::C1Sigma => {
            for wv in 1..weight {
                let wu = weight - wv;
                let us = invariant_elements(wu);
                for v in invariant_elements(wv) {
                    for u in &us {
                        out.push((v.clone(), -1, u.clone()));
                    }
                }
            }
        }
        Modulus::Omega0Full | Modulus::C2SigmaPlusOmega0 => {}
    }
    out
}

/// Elements `L(-1) w` contributing to the grade.
fn translation_generators(weight: i64, modulus: Modulus) -> Vec<FockElement> {
    if weight < 1 {
        return Vec::new();
    }
    match modulus {
        Modulus::C2Sigma => Vec::new(),
        Modulus::C1Sigma => invariant_elements(weight - 1),
        Modulus::Omega0Full | Modulus::C2SigmaPlusOmega0 => basis(weight - 1, None)
            .expect("weight >= 0")
            .into_iter()
            .map(FockElement::from_monomial)
            .collect(),
    }
}

impl GradedSpan {
    /// Build the grade `weight` of `modulus` by exact elimination.
    pub fn build(weight: i64, modulus: Modulus) -> Result<Self> {
        if weight < 0 {
            return Err(Error::NegativeWeight(weight));
        }
        Self::from_generators(weight, modulus, &generators(weight, modulus))
    }

    /// Row-reduce an explicit generator list. Elements of nonzero
    /// sigma-charge are dropped.
    pub fn from_generators(weight: i64, modulus: Modulus, gens: &[FockElement]) -> Result<Self> {
        let columns = basis(weight, Some(0))?;
        let index: HashMap<OscMonomial, usize> =
            columns.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut span = GradedSpan {
            weight,
            modulus,
            rows: Echelon::new(columns.len()),
            columns,
            index,
            generator_count: 0,
        };
        let gens: Vec<&FockElement> = gens
            .iter()
            .filter(|g| !g.is_zero() && g.sigma_charge() == Some(0))
            .collect();
        for g in &gens {
            span.check_input(g)?;
        }
        span.generator_count = gens.len();

        let mut vecs: Vec<SparseVec> = gens.iter().map(|g| span.coords(g)).collect();
        vecs.sort_by(|x, y| (x.len(), x.first().map(|e| e.0)).cmp(&(y.len(), y.first().map(|e| e.0))));
        for v in &vecs {
            span.rows.insert(v);
            if span.rows.is_full() {
                break;
            }
        }
        span.rows = std::mem::take(&mut span.rows).into_reduced();
        Ok(span)
    }

    /// The grade spanned by `self` together with `extra`.
    pub fn extended(&self, extra: &[FockElement]) -> Result<Self> {
        let mut out = self.clone();
        let mut rows = std::mem::take(&mut out.rows);
        for e in extra {
            self.check_input(e)?;
            rows.insert(&self.coords(e));
            out.generator_count += 1;
        }
        out.rows = rows.into_reduced();
        Ok(out)
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn rank(&self) -> usize {
        self.rows.rank()
    }

    /// Dimension of the sigma-invariant grade.
    pub fn ambient_dim(&self) -> usize {
        self.columns.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient_dim() - self.rank()
    }

    pub fn generator_count(&self) -> usize {
        self.generator_count
    }

    pub fn columns(&self) -> &[OscMonomial] {
        &self.columns
    }

    /// Rows of the reduced row-echelon form, as elements.
    pub fn row_elements(&self) -> Vec<FockElement> {
        self.rows.rows().map(|(_, r)| self.element(r)).collect()
    }

    fn coords(&self, v: &FockElement) -> SparseVec {
        let mut out: SparseVec = v
            .terms()
            .iter()
            .map(|(m, c)| (self.index[m], c.clone()))
            .collect();
        out.sort_by_key(|e| e.0);
        out
    }

    fn element(&self, v: &SparseVec) -> FockElement {
        let mut out = FockElement::zero();
        for (c, x) in v {
            out.add_term(self.columns[*c].clone(), x.clone());
        }
        out
    }

    fn check_input(&self, v: &FockElement) -> Result<()> {
        if v.is_zero() {
            return Ok(());
        }
        let w = v.weight().ok_or_else(|| Error::NotHomogeneous(v.to_string()))?;
        if w != self.weight {
            return Err(Error::WeightMismatch {
                expected: self.weight,
                found: w,
            });
        }
        match v.sigma_charge() {
            Some(0) => Ok(()),
            Some(c) => Err(Error::ChargeMismatch(c)),
            None => Err(Error::ChargeMismatch(
                v.terms().keys().map(|m| m.sigma_charge()).find(|&c| c != 0).unwrap_or(0),
            )),
        }
    }

    /// Canonical normal form of `v` modulo the span.
    pub fn residual(&self, v: &FockElement) -> Result<FockElement> {
        self.check_input(v)?;
        Ok(self.element(&self.rows.reduce(&self.coords(v))))
    }

    /// Membership test; the residual is zero iff `v` lies in the span.
    pub fn member(&self, v: &FockElement) -> Result<(bool, FockElement)> {
        let r = self.residual(v)?;
        Ok((r.is_zero(), r))
    }

    /// Solve `v = sum x_i basis_i` modulo the span. Fails if the residues of
    /// `basis` are dependent or `v` is not in their span.
    pub fn coordinates_in(&self, v: &FockElement, residue_basis: &[FockElement]) -> Result<Vec<Rational>> {
        let target = self.rows.reduce(&self.coords(v));
        self.check_input(v)?;
        let mut res = Vec::new();
        for b in residue_basis {
            self.check_input(b)?;
            res.push(self.rows.reduce(&self.coords(b)));
        }
        // eliminate on the residues with an augmented identity block
        let n = res.len();
        let width = self.columns.len();
        let mut ech = Echelon::new(width + n);
        for (i, r) in res.iter().enumerate() {
            let mut row = r.clone();
            row.push((width + i, Rational::from_integer(1.into())));
            ech.insert(&row);
        }
        // a residue that reduces to zero against the others pivots in the identity block
        if ech.rank() < n || ech.pivots().any(|p| p >= width) {
            return Err(Error::DependentResidueBasis(self.modulus.to_string(), self.weight));
        }
        let mut t = target.clone();
        t.push((width + n, Rational::zero()));
        t.retain(|e| !e.1.is_zero());
        let ech = ech.into_reduced();
        let reduced = ech.reduce(&t);
        if reduced.iter().any(|(c, _)| *c < width) {
            return Err(Error::NotInResidueSpan(self.weight));
        }
        // target - sum x_i res_i = 0  =>  reduced = -x in the identity block
        let mut x = vec![Rational::zero(); n];
        for (c, val) in reduced {
            x[c - width] = -val;
        }
        Ok(x)
    }
}

fn generate(weight: i64, modulus: Modulus) -> Vec<FockElement> {
    let triples = product_generators(weight, modulus);
    let mut out: Vec<FockElement> = triples
        .par_iter()
        .map_init(NormalProducts::new, |np, (v, n, u)| np.product(v, *n, u))
        .collect();
    let trans: Vec<FockElement> = translation_generators(weight, modulus)
        .par_iter()
        .map(|w| virasoro(-1, w))
        .collect();
    out.extend(trans);
    out
}

/// Generators of one grade of `modulus`, before charge filtering.
pub fn generators(weight: i64, modulus: Modulus) -> Vec<FockElement> {
    if modulus == Modulus::C2SigmaPlusOmega0 {
        let mut g = generate(weight, Modulus::C2Sigma);
        g.extend(generate(weight, Modulus::Omega0Full));
        g
    } else {
        generate(weight, modulus)
    }
}

/// Build a grade.
pub fn build_span(weight: i64, modulus: Modulus) -> Result<GradedSpan> {
    GradedSpan::build(weight, modulus)
}

/// Grades built on first use and shared afterwards. Safe to query from
/// several threads.
#[derive(Debug, Default)]
pub struct SpanCache {
    spans: Mutex<HashMap<(i64, Modulus), Arc<GradedSpan>>>,
}

impl SpanCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, weight: i64, modulus: Modulus) -> Result<Arc<GradedSpan>> {
        if let Some(s) = self.spans.lock().expect("poisoned").get(&(weight, modulus)) {
            return Ok(s.clone());
        }
        let built = Arc::new(GradedSpan::build(weight, modulus)?);
        let mut map = self.spans.lock().expect("poisoned");
        Ok(map.entry((weight, modulus)).or_insert(built).clone())
    }

    /// Build the missing grades in parallel.
    pub fn prefetch(&self, keys: &[(i64, Modulus)]) -> Result<()> {
        let missing: Vec<(i64, Modulus)> = {
            let map = self.spans.lock().expect("poisoned");
            let mut k: Vec<_> = keys.iter().copied().filter(|k| !map.contains_key(k)).collect();
            k.sort();
            k.dedup();
            k
        };
        let built: Vec<((i64, Modulus), GradedSpan)> = missing
            .into_par_iter()
            .map(|(w, m)| GradedSpan::build(w, m).map(|s| ((w, m), s)))
            .collect::<Result<_>>()?;
        let mut map = self.spans.lock().expect("poisoned");
        for (k, s) in built {
            map.entry(k).or_insert_with(|| Arc::new(s));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.spans.lock().expect("poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Membership with residual.
pub fn member(v: &FockElement, span: &GradedSpan) -> Result<(bool, FockElement)> {
    span.member(v)
}

/// Check `lhs_minus_rhs == 0` modulo `span`'s subspace.
pub fn verify_in(id: &str, lhs_minus_rhs: &FockElement, span: &GradedSpan) -> Result<Report> {
    let (ok, residual) = span.member(lhs_minus_rhs)?;
    Ok(Report {
        identity_id: id.to_string(),
        modulus: span.modulus(),
        status: if ok { Status::Verified } else { Status::Refuted },
        residual,
        generator_count: span.generator_count(),
        rank: span.rank(),
    })
}

/// Check a homogeneous congruence, building the needed grade.
pub fn verify_identity(id: &str, lhs_minus_rhs: &FockElement, modulus: Modulus) -> Result<Report> {
    verify_identity_in(&SpanCache::new(), id, lhs_minus_rhs, modulus)
}

pub fn verify_identity_in(cache: &SpanCache, id: &str, lhs_minus_rhs: &FockElement, modulus: Modulus) -> Result<Report> {
    if lhs_minus_rhs.is_zero() {
        return Ok(Report {
            identity_id: id.to_string(),
            modulus,
            status: Status::Verified,
            residual: FockElement::zero(),
            generator_count: 0,
            rank: 0,
        });
    }
    let w = lhs_minus_rhs
        .weight()
        .ok_or_else(|| Error::NotHomogeneous(lhs_minus_rhs.to_string()))?;
    verify_in(id, lhs_minus_rhs, &*cache.get(w, modulus)?)
}

fn p(v: &FockElement, u: &FockElement) -> FockElement {
    normal_product(v, -1, u)
}

fn g(n: i64) -> FockElement {
    gamma(n).expect("n >= 2")
}

/// Coefficient of `gamma(r+m+n+1)` in the aaaa relation:
/// `(-1)^(n-1) (r+m+n-1)! (m+n+r+1) / ((r-1)! (m-1)! (n-1)! (m+1) (r+n))`.
pub fn aaaa_coefficient(r: i64, m: i64, n: i64) -> Result<Rational> {
    if r < 1 || m < 1 || n < 1 {
        return Err(Error::InvalidParameters(format!("aaaa needs r, m, n >= 1, got ({r}, {m}, {n})")));
    }
    let sign = if (n - 1) % 2 == 0 { 1 } else { -1 };
    let num = factorial((r + m + n - 1) as u32) * int(m + n + r + 1);
    let den = factorial((r - 1) as u32)
        * factorial((m - 1) as u32)
        * factorial((n - 1) as u32)
        * int(m + 1)
        * int(r + n);
    Ok(int(sign) * num / den)
}

/// Both sign readings of the aaaa relation, each under `OMEGA0_FULL` and
/// `C2_SIGMA_PLUS_OMEGA0`.
#[derive(Clone, Debug, Serialize)]
pub struct AaaaCheck {
    pub r: i64,
    pub m: i64,
    pub n: i64,
    #[serde(serialize_with = "ser_rational")]
    pub coefficient: Rational,
    /// `a(-r)a(-m)a'(-n)a' - C(-m,n-1) g(r+1)g(m+n) + K g(t)`
    pub minus: Vec<Report>,
    /// `a(-r)a(-m)a'(-n)a' - C(-m,n-1) g(r+1)g(m+n) - K g(t)`
    pub plus: Vec<Report>,
}

impl AaaaCheck {
    /// `-1` or `+1` for the sign that verifies under `modulus`, if any.
    pub fn verified_sign(&self, modulus: Modulus) -> Option<i8> {
        let ok = |rs: &[Report]| rs.iter().any(|r| r.modulus == modulus && r.is_verified());
        match (ok(&self.minus), ok(&self.plus)) {
            (true, _) => Some(-1),
            (false, true) => Some(1),
            _ => None,
        }
    }

    pub fn reports(&self) -> impl Iterator<Item = &Report> {
        self.minus.iter().chain(self.plus.iter())
    }
}

pub fn prop_aaaa_check(r: i64, m: i64, n: i64) -> Result<AaaaCheck> {
    prop_aaaa_check_in(&SpanCache::new(), r, m, n)
}

pub fn prop_aaaa_check_in(cache: &SpanCache, r: i64, m: i64, n: i64) -> Result<AaaaCheck> {
    let k = aaaa_coefficient(r, m, n)?;
    let t = r + m + n + 1;
    let lhs = FockElement::mono(&[r as u16, m as u16], &[n as u16, 1]);
    let base = &lhs - &p(&g(r + 1), &g(m + n)).scaled(&binomial(-m, n - 1));
    let kg = g(t).scaled(&k);
    let minus_expr = &base + &kg;
    let plus_expr = &base - &kg;
    let mut minus = Vec::new();
    let mut plus = Vec::new();
    for modulus in [Modulus::Omega0Full, Modulus::C2SigmaPlusOmega0] {
        let span = cache.get(t, modulus)?;
        minus.push(verify_in(&format!("aaaa({r},{m},{n})-minus"), &minus_expr, &span)?);
        plus.push(verify_in(&format!("aaaa({r},{m},{n})-plus"), &plus_expr, &span)?);
    }
    Ok(AaaaCheck { r, m, n, coefficient: k, minus, plus })
}

/// Spanning sets checked against a quotient grade.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpanningSet {
    /// Spans `M_2(1)^sigma` modulo `C2_SIGMA`.
    S2,
    /// Spans `M_2(1)^sigma` modulo `C1_SIGMA`.
    S1,
    /// `gamma(2)^n, gamma(n+1), gamma(2)gamma(m)`; spans the balanced part
    /// (equal numbers of `a` and `a'` modes) modulo `C2_SIGMA`.
    OSpan,
}

impl SpanningSet {
    pub fn name(self) -> &'static str {
        match self {
            SpanningSet::S2 => "S2",
            SpanningSet::S1 => "S1",
            SpanningSet::OSpan => "O_SPAN",
        }
    }

    pub fn modulus(self) -> Modulus {
        match self {
            SpanningSet::S1 => Modulus::C1Sigma,
            _ => Modulus::C2Sigma,
        }
    }
}

/// Pairs `i >= j >= 1` with `i + j = total`.
fn pairs(total: i64) -> impl Iterator<Item = (u16, u16)> {
    (1..total).filter(move |&j| total - j >= j).map(move |j| ((total - j) as u16, j as u16))
}

/// Elements of `set` of the given weight.
pub fn spanning_elements(set: SpanningSet, weight: i64) -> Vec<FockElement> {
    let mut out = Vec::new();
    if weight == 0 {
        out.push(FockElement::vacuum());
        return out;
    }
    match set {
        SpanningSet::S2 => {
            for i in 0..=weight {
                let j = weight - i;
                if (i - j).rem_euclid(3) == 0 {
                    out.push(FockElement::mono(&vec![1; i as usize], &vec![1; j as usize]));
                }
            }
            for (i, j) in pairs(weight - 1) {
                out.push(FockElement::mono(&[i, j, 1], &[]));
                out.push(FockElement::mono(&[], &[i, j, 1]));
            }
            if weight >= 4 {
                out.push(FockElement::mono(&[(weight - 3) as u16, 1], &[1, 1]));
            }
            if weight >= 2 {
                out.push(FockElement::mono(&[(weight - 1) as u16], &[1]));
            }
        }
        SpanningSet::S1 => {
            for (i, j) in pairs(weight - 1).filter(|&(i, _)| i <= 5) {
                out.push(FockElement::mono(&[i, j, 1], &[]));
                out.push(FockElement::mono(&[], &[i, j, 1]));
            }
            if (2..=5).contains(&weight) {
                out.push(FockElement::mono(&[(weight - 1) as u16], &[1]));
            }
        }
        SpanningSet::OSpan => {
            if weight >= 2 && weight % 2 == 0 {
                let mut x = g(2);
                for _ in 1..weight / 2 {
                    x = p(&g(2), &x);
                }
                out.push(x);
            }
            if weight >= 2 {
                out.push(g(weight));
            }
            if weight >= 4 {
                out.push(p(&g(2), &g(weight - 2)));
            }
        }
    }
    out
}

/// Every sigma-invariant basis monomial of the grade lies in the modulus
/// plus the span of `set`. For `OSpan` only balanced monomials are tested.
/// A refuted report carries the residual of the first monomial left over.
pub fn spanning_check(weight: i64, set: SpanningSet) -> Result<Report> {
    spanning_check_in(&SpanCache::new(), weight, set)
}

pub fn spanning_check_in(cache: &SpanCache, weight: i64, set: SpanningSet) -> Result<Report> {
    let span = cache.get(weight, set.modulus())?;
    let ext = span.extended(&spanning_elements(set, weight))?;
    let mut residual = FockElement::zero();
    for m in basis(weight, Some(0))? {
        if set == SpanningSet::OSpan && m.a_modes().len() != m.b_modes().len() {
            continue;
        }
        let r = ext.residual(&FockElement::from_monomial(m))?;
        if !r.is_zero() {
            residual = r;
            break;
        }
    }
    Ok(Report {
        identity_id: format!("span-{}-w{weight}", set.name()),
        modulus: set.modulus(),
        status: if residual.is_zero() { Status::Verified } else { Status::Refuted },
        residual,
        generator_count: ext.generator_count(),
        rank: ext.rank(),
    })
}

/// The matrix of multiplication by `gamma(4)` on
/// `e1 = gamma(3)^2, e2 = gamma(2)gamma(4)`, in units of `gamma(2)^2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Gamma4Matrix {
    #[serde(serialize_with = "ser_matrix")]
    pub matrix: [[Rational; 2]; 2],
    #[serde(serialize_with = "ser_rational")]
    pub trace: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub det: Rational,
    /// `(c1, c0)` with `X^2 + c1 X + c0` the characteristic polynomial of
    /// `1800 M`.
    #[serde(serialize_with = "ser_pair")]
    pub char_poly_1800: (Rational, Rational),
}

fn ser_matrix<S: serde::Serializer>(m: &[[Rational; 2]; 2], ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.collect_seq(m.iter().map(|row| row.iter().map(fmt_rational).collect::<Vec<_>>()))
}

fn ser_pair<S: serde::Serializer>(x: &(Rational, Rational), ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser_rationals([&x.0, &x.1], ser)
}

impl Gamma4Matrix {
    fn from_rows(row1: [Rational; 2], row2: [Rational; 2]) -> Self {
        let trace = &row1[0] + &row2[1];
        let det = &row1[0] * &row2[1] - &row1[1] * &row2[0];
        let s = int(1800);
        let c1 = -(&trace * &s);
        let c0 = &det * &s * &s;
        Gamma4Matrix {
            matrix: [row1, row2],
            trace,
            det,
            char_poly_1800: (c1, c0),
        }
    }

    /// `X^2-69X-4608900` style rendering.
    pub fn char_poly_string(&self) -> String {
        fn term(c: &Rational, suffix: &str) -> String {
            if c.is_zero() {
                return String::new();
            }
            let sign = if c < &Rational::zero() { "-" } else { "+" };
            let mag = fmt_rational(&c.abs());
            if suffix.is_empty() {
                format!("{sign}{mag}")
            } else if mag == "1" {
                format!("{sign}{suffix}")
            } else {
                format!("{sign}{mag}{suffix}")
            }
        }
        let (c1, c0) = &self.char_poly_1800;
        format!("X^2{}{}", term(c1, "X"), term(c0, ""))
    }
}

fn weight8_basis() -> Vec<FockElement> {
    vec![p(&g(2), &p(&g(3), &g(3))), p(&g(2), &p(&g(2), &g(4)))]
}

/// Row 2 from `gamma(4)gamma(4)` at weight 8 and row 1 from
/// `gamma(4)(gamma(3)gamma(3))` at weight 10, both solved exactly modulo
/// `C2_SIGMA`. Fails if either residue basis is dependent.
pub fn gamma4_matrix() -> Result<Gamma4Matrix> {
    let s8 = GradedSpan::build(8, Modulus::C2Sigma)?;
    let r2 = s8.coordinates_in(&p(&g(4), &g(4)), &weight8_basis())?;
    let s10 = GradedSpan::build(10, Modulus::C2Sigma)?;
    let b10 = vec![
        p(&g(2), &p(&g(2), &p(&g(3), &g(3)))),
        p(&g(2), &p(&g(2), &p(&g(2), &g(4)))),
    ];
    let r1 = s10.coordinates_in(&p(&g(4), &p(&g(3), &g(3))), &b10)?;
    Ok(Gamma4Matrix::from_rows(
        [r1[0].clone(), r1[1].clone()],
        [r2[0].clone(), r2[1].clone()],
    ))
}

/// The same matrix assembled by rewriting instead of solving at weight 10:
/// `gamma(3)gamma(4)` is expanded at weight 7 and `gamma(3)gamma(5)` at
/// weight 8, then combined with commutativity of the quotient product.
pub fn gamma4_matrix_rewritten() -> Result<Gamma4Matrix> {
    let s7 = GradedSpan::build(7, Modulus::C2Sigma)?;
    let b7 = vec![p(&g(2), &g(5)), p(&g(2), &p(&g(2), &g(3)))];
    let x = s7.coordinates_in(&p(&g(3), &g(4)), &b7)?;
    let s8 = GradedSpan::build(8, Modulus::C2Sigma)?;
    let b8 = weight8_basis();
    let y = s8.coordinates_in(&p(&g(3), &g(5)), &b8)?;
    let r2 = s8.coordinates_in(&p(&g(4), &g(4)), &b8)?;
    // g3(x0 g2g5 + x1 g2^2g3) = x0 g2(y0 g2g3^2 + y1 g2^2g4) + x1 g2^2g3^2
    let r1 = [&x[1] + &x[0] * &y[0], &x[0] * &y[1]];
    Ok(Gamma4Matrix::from_rows(r1, [r2[0].clone(), r2[1].clone()]))
}

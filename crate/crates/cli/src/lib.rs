//! Suites, reports and rendering for `z3orb-verify`.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use z3orb::catalog::{identities, Expectation, Identity, Source};
use z3orb::fock::{basis, gamma, mode_apply, normal_product, omega, virasoro, FockElement, Gen};
use z3orb::orbifold::{
    completed_square_holds, default_smatrix, glue_scan, glue_vector_search, explicit_choice, parameter_scan,
    s_square_permutation, simple_current_check, verlinde,
};
use z3orb::qseries::{
    eta_power, j_oracle, orbifold_character, phi0, phi0_s_scalar, s_transform_twisted, theta_h_e6,
    theta_h_over_eta6_s_transform, twisted_trace_case, LatticeCase, QSeries,
};
use z3orb::quotient::{
    gamma4_matrix, gamma4_matrix_rewritten, prop_aaaa_check_in, spanning_check_in, verify_identity_in, Modulus,
    SpanCache, SpanningSet, Status,
};
use z3orb::scalar::{fmt_rational, int, parse_rational, rat, Cyclo3, NumericEmbed, Quad3, Rational};

pub const CONFIG_ENV: &str = "Z3ORB_CONFIG";

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Fock,
    Quotient,
    CharactersLeech,
    CharactersE6,
    Fusion,
    Glue,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Fock => "fock",
            Suite::Quotient => "quotient",
            Suite::CharactersLeech => "characters-leech",
            Suite::CharactersE6 => "characters-e6",
            Suite::Fusion => "fusion",
            Suite::Glue => "glue",
            Suite::All => "all",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub max_weight: i64,
    /// Truncation of the exact character computations.
    pub q_truncation: Rational,
    /// Truncation used for numerical evaluation.
    pub numeric_q_truncation: i64,
    /// Relative error allowed in numerical checks.
    pub tolerance: f64,
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suite: Suite::All,
            max_weight: 14,
            q_truncation: int(12),
            numeric_q_truncation: 60,
            tolerance: 1e-8,
            output_path: None,
            format: Format::Text,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {0}: {1}")]
    Read(PathBuf, std::io::Error),
    #[error("malformed config {0}: {1}")]
    Parse(PathBuf, serde_json::Error),
    #[error("invalid value for {0}: {1}")]
    Invalid(&'static str, String),
}

/// Optional overrides, as read from a JSON config file or the command line.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub suite: Option<Suite>,
    pub max_weight: Option<i64>,
    pub q_trunc: Option<String>,
    pub numeric_q_trunc: Option<i64>,
    pub tolerance: Option<f64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl ConfigOverrides {
    pub fn from_file(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read(path.into(), e))?;
        serde_json::from_str(&text).map_err(|e| ConfigError::Parse(path.into(), e))
    }

    pub fn apply(&self, cfg: &mut SuiteConfig) -> Result<(), ConfigError> {
        if let Some(s) = self.suite {
            cfg.suite = s;
        }
        if let Some(w) = self.max_weight {
            cfg.max_weight = w;
        }
        if let Some(t) = &self.q_trunc {
            cfg.q_truncation = parse_rational(t).ok_or_else(|| ConfigError::Invalid("q_trunc", t.clone()))?;
        }
        if let Some(t) = self.numeric_q_trunc {
            cfg.numeric_q_truncation = t;
        }
        if let Some(t) = self.tolerance {
            cfg.tolerance = t;
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if let Some(o) = &self.out {
            cfg.output_path = Some(o.clone());
        }
        Ok(())
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.max_weight < 2 {
            return Err(ConfigError::Invalid("max_weight", format!("{} < 2", self.max_weight)));
        }
        if self.q_truncation <= int(0) {
            return Err(ConfigError::Invalid("q_trunc", fmt_rational(&self.q_truncation)));
        }
        if self.numeric_q_truncation <= 0 {
            return Err(ConfigError::Invalid("numeric_q_trunc", self.numeric_q_truncation.to_string()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(ConfigError::Invalid("tolerance", self.tolerance.to_string()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Item {
    pub id: String,
    pub status: Status,
    pub expected_source: Source,
    pub expectation: Expectation,
    pub detail: String,
    pub payload: Value,
}

impl Item {
    fn new(id: impl Into<String>, ok: bool, source: Source, detail: impl Into<String>, payload: Value) -> Self {
        Item {
            id: id.into(),
            status: if ok { Status::Verified } else { Status::Refuted },
            expected_source: source,
            expectation: Expectation::Verified,
            detail: detail.into(),
            payload,
        }
    }

    fn finding(mut self) -> Self {
        self.expectation = Expectation::VerifyOrReport;
        self
    }

    pub fn is_verified(&self) -> bool {
        self.status == Status::Verified
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub suite: String,
    pub items: Vec<Item>,
    pub exit_code: i32,
    pub elapsed_ms: u64,
}

impl RunReport {
    /// Sorts the items and sets the exit code from their statuses.
    pub fn new(suite: &str, mut items: Vec<Item>, elapsed_ms: u64) -> Self {
        items.sort_by(|a, b| a.id.cmp(&b.id));
        let exit_code = if items.iter().all(Item::is_verified) { 0 } else { 1 };
        RunReport {
            suite: suite.to_string(),
            items,
            exit_code,
            elapsed_ms,
        }
    }

    /// A report for a run that could not be carried out.
    pub fn failed(suite: &str, message: &str) -> Self {
        RunReport {
            suite: suite.to_string(),
            items: vec![Item::new("internal-error", false, Source::Trivial, message, Value::Null)],
            exit_code: 2,
            elapsed_ms: 0,
        }
    }

    pub fn verified_count(&self) -> usize {
        self.items.iter().filter(|i| i.is_verified()).count()
    }
}

type SuiteResult = z3orb::Result<Vec<Item>>;

pub fn run_suite(cfg: &SuiteConfig) -> RunReport {
    let start = Instant::now();
    let name = cfg.suite.name();
    if let Err(e) = cfg.validate() {
        return RunReport::failed(name, &e.to_string());
    }
    let items = match cfg.suite {
        Suite::All => [
            Suite::Fock,
            Suite::Quotient,
            Suite::CharactersLeech,
            Suite::CharactersE6,
            Suite::Fusion,
            Suite::Glue,
        ]
        .iter()
        .map(|&s| run_items(s, cfg))
        .collect::<z3orb::Result<Vec<_>>>()
        .map(|v| v.concat()),
        s => run_items(s, cfg),
    };
    match items {
        Ok(items) => RunReport::new(name, items, start.elapsed().as_millis() as u64),
        Err(e) => {
            let mut r = RunReport::failed(name, &e.to_string());
            r.elapsed_ms = start.elapsed().as_millis() as u64;
            r
        }
    }
}

/// Checks only the given identities, reported under `suite`.
pub fn run_catalog(suite: &str, catalog: &[Identity]) -> RunReport {
    let start = Instant::now();
    let cache = SpanCache::new();
    match catalog_items(&cache, catalog) {
        Ok(items) => RunReport::new(suite, items, start.elapsed().as_millis() as u64),
        Err(e) => RunReport::failed(suite, &e.to_string()),
    }
}

fn run_items(suite: Suite, cfg: &SuiteConfig) -> SuiteResult {
    let mut items = match suite {
        Suite::Fock => fock_suite(cfg),
        Suite::Quotient => quotient_suite(cfg),
        Suite::CharactersLeech => leech_suite(cfg),
        Suite::CharactersE6 => e6_suite(cfg),
        Suite::Fusion => fusion_suite(),
        Suite::Glue => glue_suite(),
        Suite::All => unreachable!(),
    }?;
    if cfg.suite == Suite::All {
        for it in &mut items {
            it.id = format!("{}/{}", suite.name(), it.id);
        }
    }
    Ok(items)
}

fn fock_value(v: &FockElement) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn fock_suite(cfg: &SuiteConfig) -> SuiteResult {
    let top = cfg.max_weight.min(6);
    let mut items = Vec::new();
    let all: Vec<FockElement> = (0..=top)
        .map(|w| basis(w, None))
        .collect::<z3orb::Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .map(FockElement::from_monomial)
        .collect();
    let small: Vec<&FockElement> = all.iter().filter(|v| v.weight().unwrap_or(0) <= 4).collect();

    items.push(Item::new("γ(2)=ω", gamma(2)? == omega(), Source::Trivial, "a(-1)a'(-1)1", fock_value(&omega())));

    let grading = all.iter().all(|v| virasoro(0, v) == v.scaled(&int(v.weight().unwrap_or(0))));
    items.push(Item::new(
        "L(0)-grading",
        grading,
        Source::Derived,
        format!("L(0) = wt on {} basis vectors", all.len()),
        Value::Null,
    ));

    let l1 = virasoro(-1, &FockElement::vacuum());
    items.push(Item::new("L(-1)1=0", l1.is_zero(), Source::Trivial, "", fock_value(&l1)));

    let mut bad = Vec::new();
    for n in 1..=4u16 {
        for m in 1..=4u16 {
            let got = virasoro(-1, &FockElement::mono(&[n], &[m]));
            let mut want = FockElement::mono(&[n + 1], &[m]).scaled(&int(n as i64));
            want.add_scaled(&FockElement::mono(&[n], &[m + 1]), &int(m as i64));
            if got != want {
                bad.push(format!("({n},{m})"));
            }
        }
    }
    items.push(Item::new(
        "ω0-on-a(-n)a'(-m)",
        bad.is_empty(),
        Source::Derived,
        "L(-1)a(-n)a'(-m) = n a(-n-1)a'(-m) + m a(-n)a'(-m-1), 1 <= n,m <= 4",
        json!(bad),
    ));

    let vac = FockElement::vacuum();
    let creation = all.iter().all(|v| &normal_product(v, -1, &vac) == v);
    items.push(Item::new("v(-1)1=v", creation, Source::Trivial, "creation property", Value::Null));

    let mut comm_ok = true;
    for v in &small {
        for n in -4..=4i64 {
            for m in -4..=4i64 {
                let ab = mode_apply(Gen::A, n, &mode_apply(Gen::Aprime, m, v));
                let ba = mode_apply(Gen::Aprime, m, &mode_apply(Gen::A, n, v));
                let want = if n + m == 0 { v.scaled(&int(n)) } else { FockElement::zero() };
                let aa = &mode_apply(Gen::A, n, &mode_apply(Gen::A, m, v)) - &mode_apply(Gen::A, m, &mode_apply(Gen::A, n, v));
                comm_ok &= &ab - &ba == want && aa.is_zero();
            }
        }
    }
    items.push(Item::new(
        "heisenberg-commutator",
        comm_ok,
        Source::Paper,
        "[a(n), a'(m)] = n δ(n+m,0), [a(n), a(m)] = 0",
        Value::Null,
    ));

    let counts: Vec<usize> = (0..=cfg.max_weight)
        .map(|w| basis(w, None).map(|b| b.len()))
        .collect::<z3orb::Result<_>>()?;
    let expected = two_colour_partitions(cfg.max_weight as usize);
    items.push(Item::new(
        "basis-counts",
        counts == expected,
        Source::Derived,
        format!("prod (1-q^m)^-2 through q^{}", cfg.max_weight),
        json!({ "counts": counts, "expected": expected }),
    ));

    let mut vir_ok = true;
    for v in small.iter().filter(|v| v.weight().unwrap_or(0) <= 3) {
        for m in -2..=2i64 {
            for n in -2..=2i64 {
                let lhs = &virasoro(m, &virasoro(n, v)) - &virasoro(n, &virasoro(m, v));
                let mut rhs = virasoro(m + n, v).scaled(&int(m - n));
                if m + n == 0 {
                    rhs.add_scaled(v, &rat(2 * (m * m * m - m), 12));
                }
                vir_ok &= lhs == rhs;
            }
        }
    }
    items.push(Item::new("virasoro-c=2", vir_ok, Source::Paper, "[L(m),L(n)] with central charge 2", Value::Null));

    let mut graded = true;
    let mut translation = true;
    for v in small.iter().filter(|v| v.weight().unwrap_or(0) <= 3) {
        let dv = virasoro(-1, v);
        for u in small.iter().filter(|u| u.weight().unwrap_or(0) <= 3) {
            for n in -2..=2i64 {
                let p = normal_product(v, n, u);
                if !p.is_zero() {
                    let want_w = v.weight().unwrap_or(0) + u.weight().unwrap_or(0) - n - 1;
                    let want_c = (v.sigma_charge().unwrap_or(0) + u.sigma_charge().unwrap_or(0)) % 3;
                    graded &= p.weight() == Some(want_w) && p.sigma_charge() == Some(want_c);
                }
                let lhs = normal_product(&dv, n, u);
                let rhs = normal_product(v, n - 1, u).scaled(&int(-n));
                translation &= lhs == rhs;
            }
        }
    }
    items.push(Item::new("product-grading", graded, Source::Derived, "wt(v_n u) = wt v + wt u - n - 1, charge additive", Value::Null));
    items.push(Item::new("L(-1)-derivative", translation, Source::Paper, "(L(-1)v)_n u = -n v_(n-1) u", Value::Null));
    Ok(items)
}

fn two_colour_partitions(max: usize) -> Vec<usize> {
    let mut c = vec![0usize; max + 1];
    c[0] = 1;
    for _ in 0..2 {
        for m in 1..=max {
            for k in m..=max {
                c[k] += c[k - m];
            }
        }
    }
    c
}

fn catalog_items(cache: &SpanCache, catalog: &[Identity]) -> SuiteResult {
    let keys: Vec<_> = catalog.iter().map(|i| (i.weight, i.modulus)).collect();
    cache.prefetch(&keys)?;
    catalog
        .iter()
        .map(|id| {
            let r = verify_identity_in(cache, &id.id, &id.expr, id.modulus)?;
            let detail = format!("weight {} mod {}, rank {}", id.weight, id.modulus, r.rank);
            let mut it = Item::new(id.id.clone(), r.is_verified(), id.source, detail, to_value(&r));
            it.expectation = id.expectation;
            Ok(it)
        })
        .collect()
}

fn gamma4_target() -> [[Rational; 2]; 2] {
    [[rat(22569, 1800), rat(-46592, 1800)], [int(6), rat(-25, 2)]]
}

fn quotient_suite(cfg: &SuiteConfig) -> SuiteResult {
    let max = cfg.max_weight;
    let cache = SpanCache::new();
    let catalog = identities(max);
    let aaaa: Vec<(i64, i64, i64)> = (1..=3)
        .flat_map(|r| (1..=3).flat_map(move |m| (1..=3).map(move |n| (r, m, n))))
        .filter(|&(r, m, n)| r + m + n < max)
        .collect();
    let s1_top = max.min(12);
    let mut keys: Vec<(i64, Modulus)> = catalog.iter().map(|i| (i.weight, i.modulus)).collect();
    for w in 2..=max {
        keys.push((w, Modulus::C2Sigma));
    }
    for w in 2..=s1_top {
        keys.push((w, Modulus::C1Sigma));
    }
    for &(r, m, n) in &aaaa {
        keys.push((r + m + n + 1, Modulus::Omega0Full));
        keys.push((r + m + n + 1, Modulus::C2SigmaPlusOmega0));
    }
    cache.prefetch(&keys)?;

    let mut items = catalog_items(&cache, &catalog)?;

    for (r, m, n) in aaaa {
        let c = prop_aaaa_check_in(&cache, r, m, n)?;
        let t = r + m + n + 1;
        let sign = c.verified_sign(Modulus::C2SigmaPlusOmega0);
        let pure = match c.verified_sign(Modulus::Omega0Full) {
            Some(-1) => "also modulo OMEGA0_FULL",
            Some(_) => "plus sign modulo OMEGA0_FULL",
            None => "not modulo OMEGA0_FULL alone",
        };
        let detail = match sign {
            Some(-1) => format!("minus K γ({t}) verifies, K = {}, {pure}", fmt_rational(&c.coefficient)),
            Some(_) => format!("only the plus sign verifies, {pure}"),
            None => format!("neither sign verifies, {pure}"),
        };
        items.push(Item::new(format!("aaaa({r},{m},{n})"), sign == Some(-1), Source::Paper, detail, to_value(&c)));
    }

    let spanning = |set: SpanningSet, lo: i64, hi: i64, items: &mut Vec<Item>| -> z3orb::Result<()> {
        for w in lo..=hi {
            let r = spanning_check_in(&cache, w, set)?;
            items.push(Item::new(
                format!("spanning-{}({w:02})", set.name()),
                r.is_verified(),
                Source::Paper,
                format!("mod {}, {} extra generators", r.modulus, r.generator_count),
                to_value(&r),
            ));
        }
        Ok(())
    };
    spanning(SpanningSet::S2, 2, max, &mut items)?;
    spanning(SpanningSet::S1, 2, s1_top, &mut items)?;
    spanning(SpanningSet::OSpan, 2, max.min(10), &mut items)?;

    if max >= 10 {
        items.push(gamma4_item("gamma4-matrix", gamma4_matrix()));
        items.push(gamma4_item("gamma4-matrix-rewritten", gamma4_matrix_rewritten()).finding());
    }
    Ok(items)
}

fn gamma4_item(id: &str, m: z3orb::Result<z3orb::quotient::Gamma4Matrix>) -> Item {
    let target = "X^2-69X-4608900";
    match m {
        Ok(m) => {
            let poly = m.char_poly_string();
            let ok = m.matrix == gamma4_target() && poly == target;
            let detail = format!("1800M has char poly {poly}, expected {target}");
            Item::new(id, ok, Source::Paper, detail, to_value(&m))
        }
        Err(e) => Item::new(id, false, Source::Paper, format!("expected {target}: {e}"), Value::Null),
    }
}

fn coeff(s: &QSeries, n: i64, d: i64) -> z3orb::Result<Quad3> {
    s.coeff(&rat(n, d))
}

fn q(n: i64) -> Quad3 {
    Quad3::from_int(n)
}

fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

fn sample_points() -> [Complex64; 3] {
    [Complex64::new(0.0, 1.1), Complex64::new(0.4, 1.2), Complex64::new(0.0, 2.0)]
}

fn numeric_item(id: String, errors: Vec<(Complex64, f64)>, tol: f64, detail: &str) -> Item {
    let worst = errors.iter().map(|e| e.1).fold(0.0, f64::max);
    let payload: Vec<Value> = errors
        .iter()
        .map(|(t, e)| json!({ "tau": [t.re, t.im], "relative_error": format!("{e:.3e}") }))
        .collect();
    Item::new(id, worst < tol, Source::Paper, format!("{detail}, worst {worst:.1e}"), json!(payload))
}

fn eq5_item(case: LatticeCase, cfg: &SuiteConfig) -> z3orb::Result<Item> {
    let t = int(cfg.numeric_q_truncation);
    let tt = twisted_trace_case(case, &t)?;
    let st = s_transform_twisted(case, &t)?;
    let mut errs = Vec::new();
    for tau in sample_points() {
        let lhs = tt.numeric_eval(-tau.inv())?;
        let rhs = st.series.numeric_eval(tau)?;
        errs.push((tau, rel_err(lhs, rhs)));
    }
    Ok(numeric_item("numeric-s-transform".into(), errs, cfg.tolerance, "T(-1/τ) against the transformed series"))
}

fn leech_suite(cfg: &SuiteConfig) -> SuiteResult {
    let t = &cfg.q_truncation;
    let mut items = Vec::new();
    let case = LatticeCase::Leech;

    let tt = twisted_trace_case(case, t)?;
    let slack = t + int(2);
    let quot = eta_power(&int(1), 12, &slack)?.div(&eta_power(&int(3), 12, &slack)?)?;
    let mut mism = Vec::new();
    let mut top = -1i64;
    while top < 10 && int(top + 1) < *t {
        top += 1;
    }
    for n in -1..=top {
        if coeff(&tt, n, 1)? != coeff(&quot, n, 1)? {
            mism.push(n);
        }
    }
    items.push(Item::new(
        "twisted-trace=η^12/η(3τ)^12",
        mism.is_empty(),
        Source::Paper,
        format!("q^-1 through q^{top}"),
        json!({ "mismatched_exponents": mism, "twisted_trace": tt }),
    ));

    let oc = orbifold_character(case, t)?;
    let st = &oc.twisted_module;
    items.push(Item::new(
        "scalar-closes",
        st.scalar.is_closed() && st.scalar.tau_half_exponent == 0 && st.scalar.eighth_root_exponent % 8 == 0,
        Source::Derived,
        format!("constant {}", st.scalar),
        Value::Null,
    ));
    let lead = st.series.leading();
    let lead_ok = lead == Some((rat(1, 3), q(729)))
        && coeff(&st.series, 2, 3)? == q(729 * 12)
        && coeff(&st.series, 1, 1)? == q(729 * 90);
    items.push(Item::new(
        "twisted-module-leading",
        lead_ok,
        Source::Paper,
        "729 q^(1/3) (1 + 12 q^(1/3) + 90 q^(2/3) + ...)",
        json!(st.series),
    ));
    let w32 = coeff(&oc.ch_w3, 1, 1)?;
    items.push(Item::new("dim W3_2 = 65610", w32 == q(65610), Source::Paper, format!("got {w32}"), Value::Null));
    let w31 = coeff(&oc.ch_w3, 0, 1)?;
    items.push(Item::new("dim W3_1 = 0", w31.is_zero(), Source::Derived, format!("got {w31}"), Value::Null));
    items.push(Item::new(
        "nonnegative-integral",
        oc.ch_w0.has_nonneg_integer_coeffs() && oc.ch_w3.has_nonneg_integer_coeffs(),
        Source::Derived,
        "ch W0 and ch W3",
        Value::Null,
    ));

    let j = j_oracle(t)?;
    let head = [coeff(&oc.total, -1, 1)?, coeff(&oc.total, 0, 1)?, coeff(&oc.total, 1, 1)?];
    items.push(Item::new(
        "ch=J leading",
        head == [q(1), q(0), q(196884)],
        Source::Paper,
        format!("{}, {}, {}", head[0], head[1], head[2]),
        Value::Null,
    ));
    let total_t = oc.total.truncated(t);
    let j_t = j.truncated(t);
    items.push(Item::new(
        "ch=J",
        total_t == j_t,
        Source::Paper,
        format!("through truncation {}", fmt_rational(t)),
        json!({ "character": total_t }),
    ));

    items.push(eq5_item(case, cfg)?);
    Ok(items)
}

fn e6_suite(cfg: &SuiteConfig) -> SuiteResult {
    let t = &cfg.q_truncation;
    let mut items = Vec::new();
    let case = LatticeCase::E6Niemeier;

    let th = theta_h_e6(t)?;
    let th_head = [coeff(&th, 0, 1)?, coeff(&th, 1, 1)?, coeff(&th, 2, 1)?];
    items.push(Item::new(
        "theta_H",
        th.has_nonneg_integer_coeffs() && th_head == [q(1), q(0), q(54)],
        Source::Derived,
        "1 + 54 q^2 + ...",
        json!(th),
    ));

    let oc = orbifold_character(case, t)?;
    let st = &oc.twisted_module;
    items.push(Item::new(
        "scalar-closes",
        st.scalar.is_closed() && st.scalar.tau_half_exponent == 0 && st.scalar.eighth_root_exponent % 8 == 0,
        Source::Paper,
        format!("constant {}", st.scalar),
        Value::Null,
    ));
    items.push(Item::new("constant = 9", st.constant == q(9), Source::Paper, format!("got {}", st.constant), Value::Null));
    let w3 = coeff(&oc.ch_w3, 0, 1)?;
    items.push(Item::new(
        "twisted-sector-weight-1",
        w3 == q(9),
        Source::Paper,
        format!("2 x {w3} from the transformed series"),
        json!(oc.ch_w3),
    ));
    let total = coeff(&oc.total, 0, 1)?;
    items.push(Item::new(
        "dim V_1 = 120",
        total == q(120),
        Source::Paper,
        format!("{} + 2 x {w3} = {total}", coeff(&oc.ch_w0, 0, 1)?),
        json!(oc.total),
    ));

    let (scalar, tvh) = theta_h_over_eta6_s_transform(&int(1))?;
    let lead = tvh.leading();
    items.push(Item::new(
        "T_VH leading term",
        scalar.is_closed() && lead == Some((rat(-1, 4), Quad3::new(int(0), rat(1, 27)))),
        Source::Derived,
        "q^(-1/4) / (9 sqrt 3)",
        Value::Null,
    ));

    let nt = int(cfg.numeric_q_truncation);
    let p = phi0(&int(1), &nt)?;
    let p3 = phi0(&rat(1, 3), &nt)?;
    let k = phi0_s_scalar();
    let mut errs = Vec::new();
    for tau in [Complex64::new(0.0, 1.3)].into_iter().chain(sample_points()) {
        let lhs = p.numeric_eval(-tau.inv())?;
        let rhs = k.numeric_embed(tau)? * p3.numeric_eval(tau)?;
        errs.push((tau, rel_err(lhs, rhs)));
    }
    items.push(numeric_item("numeric-phi0".into(), errs, cfg.tolerance, "φ0(-1/τ) = (τ/(i√3)) φ0(τ/3)"));
    items.push(eq5_item(case, cfg)?);
    Ok(items)
}

fn fusion_suite() -> SuiteResult {
    let mut items = Vec::new();
    let s = default_smatrix();
    let third = Cyclo3::from_rational(rat(1, 3));
    items.push(Item::new("S symmetric", s.is_symmetric(), Source::Paper, "", json!(s)));
    items.push(Item::new("S00 = 1/3", s.entry(0, 0) == &third, Source::Paper, format!("got {}", s.entry(0, 0)), Value::Null));
    let zeta3 = Cyclo3::zeta().scale(&rat(1, 3));
    items.push(Item::new("S34 = ζ/3", s.entry(3, 4) == &zeta3, Source::Paper, format!("got {}", s.entry(3, 4)), Value::Null));

    let perm = s_square_permutation(&s)?;
    let involution = perm.iter().enumerate().all(|(i, &j)| perm[j] == i);
    items.push(Item::new(
        "S^2 involution",
        involution && perm[0] == 0 && perm[1] == 2,
        Source::Paper,
        format!("{perm:?}"),
        json!(perm),
    ));

    let table = verlinde(&s)?;
    items.push(Item::new("verlinde-integral", true, Source::Paper, "729 nonnegative integers", json!(table)));
    let duals = (0..9).all(|i| table.get(i, perm[i], 0) == 1);
    items.push(Item::new("N_{i,i'}^0 = 1", duals, Source::Paper, "", Value::Null));
    items.push(Item::new("N_{3,3}^6 = 1", table.get(3, 3, 6) == 1, Source::Paper, "W3 x W3 = W6", Value::Null));
    items.push(Item::new("N_{3,6}^0 = 1", table.get(3, 6, 0) == 1, Source::Paper, "W3 x W6 = W0", Value::Null));

    let check = simple_current_check(&table, &perm);
    items.push(Item::new(
        "simple-currents",
        check.simple_currents && check.vacuum_is_unit && check.inverses_are_duals,
        Source::Paper,
        "every W^i is a simple current",
        to_value(&check),
    ));
    items.push(Item::new(
        "Z3xZ3",
        check.is_verified(),
        Source::Paper,
        "abelian, exponent 3, order 9",
        Value::Null,
    ));
    items.push(Item::new(
        "associativity",
        check.associative && check.commutative,
        Source::Derived,
        "",
        Value::Null,
    ));
    items.push(Item::new(
        "subgroups",
        check.closed_0_3_6 && check.closed_0_1_2,
        Source::Derived,
        "{0,3,6} and {0,1,2} closed",
        Value::Null,
    ));

    let scan = parameter_scan();
    let admissible: Vec<_> = scan.iter().filter(|o| o.integral).collect();
    let robust = admissible.len() == 6
        && admissible.iter().all(|o| o.lambda0 == o.lambda1)
        && scan.iter().any(|o| o.lambda0 == Cyclo3::one() && o.lambda1 == Cyclo3::one() && o.mu1 == Cyclo3::one() && o.integral);
    items.push(Item::new(
        "parameter-robustness",
        robust,
        Source::Derived,
        format!("{} of {} tuples integral", admissible.len(), scan.len()),
        to_value(&scan),
    ));
    Ok(items)
}

fn glue_suite() -> SuiteResult {
    let mut items = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut bad = Vec::new();
    for _ in 0..200 {
        let (p, q) = (rng.gen_range(-1000..=1000), rng.gen_range(-1000..=1000));
        if !completed_square_holds(p, q) {
            bad.push((p, q));
        }
    }
    items.push(Item::new(
        "completed-square",
        bad.is_empty(),
        Source::Paper,
        "200 random (p,q)",
        json!(bad),
    ));

    let scan = glue_scan(-30, 30);
    items.push(Item::new(
        "scan[-30,30]",
        scan.is_verified(),
        Source::Paper,
        format!("{} targets, {} witnessed, {} exceptional", scan.checked, scan.witnessed, scan.exceptional.len()),
        to_value(&scan),
    ));

    let pc = explicit_choice(-2, 0)?;
    items.push(Item::new(
        "example(-2,0)",
        pc.is_positive() && (pc.p, pc.q) == (2, 1),
        Source::Paper,
        format!("(p,q) = ({},{}), forms {} and {}", pc.p, pc.q, pc.form1, pc.form2),
        to_value(&pc),
    ));
    let ex = glue_vector_search(-2, -5);
    let ex_ok = ex.as_ref().map(|r| r.witness.is_positive()).unwrap_or(false);
    items.push(Item::new(
        "witness(-2,-5)",
        ex_ok,
        Source::Derived,
        ex.as_ref()
            .map(|r| format!("σ^{} with μ = {}, pairings {} and {}", r.witness.power_index, r.witness.mu, r.witness.inner1, r.witness.inner2))
            .unwrap_or_default(),
        ex.as_ref().map(to_value).unwrap_or_else(|e| json!(e.to_string())),
    ));

    items.push(Item::new(
        "explicit-choice-forms-positive",
        scan.explicit_form_failures.is_empty(),
        Source::Paper,
        format!("{} failures", scan.explicit_form_failures.len()),
        Value::Null,
    ));
    items.push(
        Item::new(
            "explicit-choice-relation",
            scan.explicit_relation_mismatches == 0,
            Source::Paper,
            format!("relation fails for {} of {} targets", scan.explicit_relation_mismatches, scan.checked),
            to_value(&pc),
        )
        .finding(),
    );
    Ok(items)
}

/// Renders a report as text or JSON.
pub fn emit_report(report: &RunReport, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string(report).expect("serializable");
            s.push('\n');
            s.into_bytes()
        }
        Format::Text => render_text(report).into_bytes(),
    }
}

fn pad(s: &str, width: usize) -> String {
    let n = s.chars().count();
    if n >= width {
        s.to_string()
    } else {
        format!("{s}{}", " ".repeat(width - n))
    }
}

fn render_text(report: &RunReport) -> String {
    let idw = report.items.iter().map(|i| i.id.chars().count()).max().unwrap_or(2).max(2);
    let mut out = String::new();
    let _ = writeln!(out, "{}  {}  detail", pad("id", idw), pad("status", 8));
    let _ = writeln!(out, "{}  {}  {}", "-".repeat(idw), "-".repeat(8), "-".repeat(6));
    for it in &report.items {
        let status = match it.status {
            Status::Verified => "verified",
            Status::Refuted => "refuted",
        };
        let _ = writeln!(out, "{}  {}  {}", pad(&it.id, idw), pad(status, 8), it.detail);
    }
    let _ = writeln!(
        out,
        "suite {}: {}/{} verified, exit {}, {} ms",
        report.suite,
        report.verified_count(),
        report.items.len(),
        report.exit_code,
        report.elapsed_ms
    );
    out
}

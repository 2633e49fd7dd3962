//! Cross-checks of the normal-product recursion against an independent
//! Wick-contraction evaluation of `Y(v, z) u`.

use num_traits::Zero;
use z3orb::fock::{
    basis, mode_apply, normal_product, omega, virasoro, FockElement, Gen, NormalProducts,
    OscMonomial,
};
use z3orb::scalar::{int, Rational};

fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let mut acc: i128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as i128 / (j + 1) as i128;
    }
    acc as i64
}

/// `C(-l-1, k-1)`, the coefficient of `h(l)` in `d^(k-1) h(z) / (k-1)!`.
fn field_coeff(mode: i64, k: i64) -> i64 {
    // C(-mode-1, k-1) for any integer mode
    let top = -mode - 1;
    let j = k - 1;
    if top >= 0 {
        binom(top, j)
    } else {
        // C(-x, j) = (-1)^j C(x+j-1, j)
        let x = -top;
        let s = if j % 2 == 0 { 1 } else { -1 };
        s * binom(x + j - 1, j)
    }
}

fn factors(m: &OscMonomial) -> Vec<(Gen, i64)> {
    m.a_modes()
        .iter()
        .map(|&i| (Gen::A, i as i64))
        .chain(m.b_modes().iter().map(|&j| (Gen::Aprime, j as i64)))
        .collect()
}

/// Distribute `total` over the creation factors, each `|m_s| >= k_s`.
fn distribute(
    creators: &[(Gen, i64)],
    total: i64,
    base: OscMonomial,
    coef: i64,
    out: &mut FockElement,
) {
    match creators.split_first() {
        None => {
            if total == 0 {
                out.add_term(base, int(coef));
            }
        }
        Some((&(g, k), rest)) => {
            let min_rest: i64 = rest.iter().map(|&(_, k)| k).sum();
            let mut mm = k;
            while mm + min_rest <= total {
                let c = field_coeff(-mm, k);
                if c != 0 {
                    distribute(rest, total - mm, base.with_mode(g, mm as u16), coef * c, out);
                }
                mm += 1;
            }
        }
    }
}

/// Wick evaluation of `v_n u` for monomials.
fn wick_monomial(v: &OscMonomial, n: i64, u: &OscMonomial) -> FockElement {
    let vf = factors(v);
    let uf = factors(u);
    let wt_v: i64 = vf.iter().map(|&(_, k)| k).sum();
    let mut out = FockElement::zero();
    // choose for each v-factor: None (creation) or Some(index into uf)
    fn rec(
        s: usize,
        vf: &[(Gen, i64)],
        uf: &[(Gen, i64)],
        used: &mut Vec<bool>,
        creators: &mut Vec<(Gen, i64)>,
        coef: i64,
        ann_sum: i64,
        wt_v: i64,
        n: i64,
        out: &mut FockElement,
    ) {
        if s == vf.len() {
            let mut rest = OscMonomial::vacuum();
            for (t, &(g, l)) in uf.iter().enumerate() {
                if !used[t] {
                    rest = rest.with_mode(g, l as u16);
                }
            }
            let total = wt_v - n - 1 + ann_sum;
            distribute(creators, total, rest, coef, out);
            return;
        }
        let (g, k) = vf[s];
        creators.push((g, k));
        rec(s + 1, vf, uf, used, creators, coef, ann_sum, wt_v, n, out);
        creators.pop();
        for t in 0..uf.len() {
            let (gu, l) = uf[t];
            if used[t] || gu != g.partner() {
                continue;
            }
            let c = l * field_coeff(l, k);
            if c == 0 {
                continue;
            }
            used[t] = true;
            rec(s + 1, vf, uf, used, creators, coef * c, ann_sum + l, wt_v, n, out);
            used[t] = false;
        }
    }
    let mut used = vec![false; uf.len()];
    rec(0, &vf, &uf, &mut used, &mut Vec::new(), 1, 0, wt_v, n, &mut out);
    out
}

fn wick(v: &FockElement, n: i64, u: &FockElement) -> FockElement {
    let mut out = FockElement::zero();
    for (mv, cv) in v.terms() {
        for (mu, cu) in u.terms() {
            out.add_scaled(&wick_monomial(mv, n, mu), &(cv * cu));
        }
    }
    out
}

fn all_basis(max_weight: i64) -> Vec<OscMonomial> {
    (0..=max_weight).flat_map(|w| basis(w, None).unwrap()).collect()
}

#[test]
fn recursion_matches_wick_on_all_pairs_up_to_weight_4() {
    let mut np = NormalProducts::new();
    let b = all_basis(4);
    for v in &b {
        for u in &b {
            let ve = FockElement::from_monomial(v.clone());
            let ue = FockElement::from_monomial(u.clone());
            for n in -3..=(v.weight() + u.weight()) {
                let lhs = np.product(&ve, n, &ue);
                let rhs = wick(&ve, n, &ue);
                assert_eq!(lhs, rhs, "v={v} n={n} u={u}");
            }
        }
    }
}

#[test]
fn gamma2_squared_matches_wick() {
    let g2 = omega();
    let lhs = normal_product(&g2, -1, &g2);
    assert_eq!(lhs, wick(&g2, -1, &g2));
    assert_eq!(lhs.weight(), Some(4));
    // a(-1)^2 a'(-1)^2 + 2 a(-3) a'(-1) + 2 a(-1) a'(-3)-type terms from two contractions
    assert!(lhs.len() >= 2);
}

#[test]
fn virasoro_on_omega() {
    let w = omega();
    assert!(virasoro(1, &w).is_zero());
    assert_eq!(virasoro(1, &w), wick(&omega(), 2, &w));
    // central term c/2 with c = 2
    assert_eq!(virasoro(2, &w), FockElement::vacuum());
    assert_eq!(virasoro(2, &w), wick(&omega(), 3, &w));
    assert_eq!(virasoro(0, &w), w.scaled(&int(2)));
}

#[test]
fn heisenberg_commutator() {
    let b = all_basis(6);
    for v in &b {
        let ve = FockElement::from_monomial(v.clone());
        for n in -6..=6i64 {
            for m in -6..=6i64 {
                let ab = mode_apply(Gen::A, n, &mode_apply(Gen::Aprime, m, &ve));
                let ba = mode_apply(Gen::Aprime, m, &mode_apply(Gen::A, n, &ve));
                let lhs = &ab - &ba;
                let rhs = if n + m == 0 { ve.scaled(&int(n)) } else { FockElement::zero() };
                assert_eq!(lhs, rhs, "v={v} n={n} m={m}");
            }
        }
    }
}

#[test]
fn translation_derivative_identity() {
    let mut np = NormalProducts::new();
    let vs = all_basis(4);
    let ws = all_basis(6);
    for v in &vs {
        let ve = FockElement::from_monomial(v.clone());
        let lv = virasoro(-1, &ve);
        for w in &ws {
            let we = FockElement::from_monomial(w.clone());
            for m in -4..=4i64 {
                let lhs = np.product(&lv, m, &we);
                let rhs = np.product(&ve, m - 1, &we).scaled(&int(-m));
                assert_eq!(lhs, rhs, "v={v} m={m} w={w}");
            }
        }
    }
}

fn factorial(j: i64) -> i64 {
    (1..=j).product()
}

#[test]
fn skew_symmetry_up_to_weight_5() {
    // u_n v = sum_j (-1)^(n+j+1) L(-1)^j / j! (v_{n+j} u)
    let mut np = NormalProducts::new();
    let b: Vec<OscMonomial> = (0..=5).flat_map(|w| basis(w, Some(0)).unwrap()).collect();
    for u in &b {
        for v in &b {
            let ue = FockElement::from_monomial(u.clone());
            let ve = FockElement::from_monomial(v.clone());
            for n in -2..=1i64 {
                let lhs = np.product(&ue, n, &ve);
                let mut rhs = FockElement::zero();
                let top = u.weight() + v.weight();
                for j in 0..=(top - n + 1).max(0) {
                    let mut t = wick(&ve, n + j, &ue);
                    if t.is_zero() {
                        continue;
                    }
                    for _ in 0..j {
                        t = virasoro(-1, &t);
                    }
                    let sign = if (n + j + 1).rem_euclid(2) == 0 { 1 } else { -1 };
                    rhs.add_scaled(&t, &Rational::new(sign.into(), factorial(j).into()));
                }
                assert_eq!(lhs, rhs, "u={u} n={n} v={v}");
            }
        }
    }
}

#[test]
fn products_are_graded() {
    let mut np = NormalProducts::new();
    let b = all_basis(5);
    for (i, v) in b.iter().enumerate().step_by(3) {
        for u in b.iter().skip(i % 5).step_by(4) {
            let ve = FockElement::from_monomial(v.clone());
            let ue = FockElement::from_monomial(u.clone());
            for n in -3..=2 {
                let p = np.product(&ve, n, &ue);
                if p.is_zero() {
                    continue;
                }
                assert_eq!(p.weight(), Some(v.weight() + u.weight() - n - 1));
                assert_eq!(
                    p.sigma_charge(),
                    Some((v.sigma_charge() + u.sigma_charge()) % 3)
                );
            }
        }
    }
}

#[test]
fn basis_sizes_match_generating_function() {
    // coefficients of prod (1 - q^m)^(-2)
    let n = 15usize;
    let mut c = vec![Rational::zero(); n + 1];
    c[0] = int(1);
    for _ in 0..2 {
        for m in 1..=n {
            for k in m..=n {
                let add = c[k - m].clone();
                c[k] += add;
            }
        }
    }
    for w in 0..=n {
        assert_eq!(int(basis(w as i64, None).unwrap().len() as i64), c[w], "weight {w}");
    }
}

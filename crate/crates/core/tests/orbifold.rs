use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use z3orb::orbifold::*;
use z3orb::scalar::{rat, Cyclo3};
use z3orb::Error;

#[test]
fn smatrix_entries() {
    let s = default_smatrix();
    assert_eq!(*s.entry(0, 0), Cyclo3::from_rational(rat(1, 3)));
    assert_eq!(*s.entry(3, 4), Cyclo3::zeta().scale(&rat(1, 3)));
    assert_eq!(*s.entry(1, 3), Cyclo3::zeta_pow(2).scale(&rat(1, 3)));
    assert_eq!(*s.entry(4, 8), Cyclo3::from_rational(rat(1, 3)));
    assert!(s.is_symmetric());
}

#[test]
fn rejects_bad_parameters() {
    let one = Cyclo3::one;
    assert!(matches!(build_smatrix(Cyclo3::zeta(), one(), one(), one()), Err(Error::InvalidParameters(_))));
    assert!(matches!(build_smatrix(one(), one(), Cyclo3::zeta(), one()), Err(Error::InvalidParameters(_))));
    assert!(build_smatrix(one(), one(), Cyclo3::zeta(), Cyclo3::zeta_pow(2)).is_ok());
}

#[test]
fn duality_from_s_square() {
    let p = s_square_permutation(&default_smatrix()).unwrap();
    assert_eq!(p, vec![0, 2, 1, 6, 7, 8, 3, 4, 5]);
    assert!((0..9).all(|i| p[p[i]] == i));
}

#[test]
fn verlinde_numbers() {
    let s = default_smatrix();
    let t = verlinde(&s).unwrap();
    let dual = s_square_permutation(&s).unwrap();
    for i in 0..9 {
        assert_eq!(t.get(i, dual[i], 0), 1);
    }
    assert_eq!(t.get(3, 3, 6), 1);
    assert_eq!(t.get(3, 6, 0), 1);
    assert_eq!(t.product(3, 3), Some(6));
    let check = simple_current_check(&t, &dual);
    assert!(check.is_verified(), "{check:?}");
    let v = serde_json::to_value(&t).unwrap();
    assert_eq!(v[3][3][6], 1);
}

#[test]
fn parameter_robustness() {
    let scan = parameter_scan();
    assert_eq!(scan.len(), 24);
    let ok: Vec<_> = scan.iter().filter(|o| o.integral).collect();
    assert_eq!(ok.len(), 6);
    for o in ok {
        assert_eq!(o.lambda0, o.lambda1);
        // mu1 carries the sign of lambda
        assert_eq!(&o.mu1 * &o.mu1 * o.mu1.clone(), o.lambda0);
    }
    assert!(scan.iter().filter(|o| !o.integral).all(|o| o.error.is_some()));
}

#[test]
fn completed_square() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..200 {
        let (p, q) = (rng.gen_range(-1000..1000), rng.gen_range(-1000..1000));
        assert!(completed_square_holds(p, q));
        assert_eq!(form2(p, q), form1(q, p));
    }
}

#[test]
fn glue_witness_relation() {
    for (m, n) in [(-4, 2), (5, -1), (7, 7), (-13, 0), (1, 3), (30, -29)] {
        let r = glue_vector_search(m, n).unwrap();
        let w = &r.witness;
        assert!(w.inner1 > 0 && w.inner2 > 0);
        let mu = match w.mu.as_str() {
            "x" => X,
            "y" => Y,
            "-x-y" => Z,
            "-x" => [-1, 0],
            "-y" => [0, -1],
            "x+y" => [1, 1],
            other => panic!("{other}"),
        };
        let g = [w.p, w.q];
        let s = sigma_pow([g[0] - mu[0], g[1] - mu[1]], w.power_index as i64);
        assert_eq!([g[0] - s[0], g[1] - s[1]], [m, n]);
        assert_eq!(w.inner1, pairing(g, sigma_pow([mu[0] - g[0], mu[1] - g[1]], 1)));
    }
}

#[test]
fn glue_input_checks() {
    assert!(matches!(glue_vector_search(1, 2), Err(Error::GlueResidueZero(1, 2))));
    assert!(matches!(glue_vector_search(1, 0), Err(Error::GlueNotFound { .. })));
    assert!(is_exceptional(0, -2) && is_exceptional(2, 2) && is_exceptional(-1, 0));
    assert!(!is_exceptional(-2, -5));
}

#[test]
fn explicit_choice_after_normalization() {
    let c = explicit_choice(-2, 0).unwrap();
    assert_eq!((c.p, c.q, c.alternate), (2, 1, false));
    assert!(c.is_positive() && c.forms_match_pairing);
    let c = explicit_choice(0, -2).unwrap();
    assert!(c.alternate);
    assert_eq!((c.p, c.q), (2, 1));
    assert!(c.is_positive());
    let c = explicit_choice(2, 0).unwrap();
    assert!(c.flipped);
    assert_eq!(c.normalized, [-2, 0]);
}

#[test]
fn glue_scan_range() {
    let s = glue_scan(-30, 30);
    assert!(s.is_verified(), "{:?}", s.failures);
    assert_eq!(s.checked, 61 * 61 - (61 * 61 + 2) / 3);
    assert_eq!(s.exceptional.len(), 12);
    assert!(s.exceptional.iter().all(|v| is_exceptional(v[0], v[1])));
    assert!(s.explicit_form_failures.is_empty());
    assert_eq!(s.explicit_form_mismatches, 0);
    assert_eq!(s.explicit_relation_mismatches, s.checked);
}

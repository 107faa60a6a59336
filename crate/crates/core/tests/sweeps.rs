use cotype_core::bernoulli::bivariate_bernoulli;
use cotype_core::calibration::seeded_function;
use cotype_core::identities::{
    verify_closed_form, verify_expansion, verify_off_box, verify_vanishing, verify_weighted_sums, Sweep,
};
use cotype_core::kernels::SchemeParams;

#[test]
fn identities_hold_on_small_tori() {
    let table = bivariate_bernoulli(4);
    for (n, k) in [(1, 1), (1, 3), (2, 3)] {
        let p = SchemeParams::new(n, 8, k, 2).unwrap();
        let sweep = Sweep::default();
        assert!(verify_closed_form(&p, &sweep).passed());
        assert!(verify_vanishing(&p, &sweep).passed());
        assert!(verify_off_box(&p, &sweep).passed());
        assert!(verify_expansion(&p, &table, &sweep).unwrap().passed());
    }
}

#[test]
fn weighted_sums_hold_for_random_f() {
    let p = SchemeParams::new(2, 8, 3, 2).unwrap();
    for seed in 0..3 {
        let f = seeded_function(p.torus(), 1, 10, seed).unwrap();
        let report = verify_weighted_sums(&f, &p, &Sweep::default()).unwrap();
        assert!(report.passed(), "{}", report.to_json());
    }
}

#[test]
fn sampled_sweep_is_reproducible() {
    let p = SchemeParams::new(3, 8, 3, 2).unwrap();
    let sweep = Sweep { budget: 200, seed: 9 };
    let a = verify_closed_form(&p, &sweep);
    let b = verify_closed_form(&p, &sweep);
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.mode.to_string(), "sampled(9)");
}

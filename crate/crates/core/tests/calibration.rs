use cotype_core::bernoulli::{bivariate_bernoulli, BernoulliTable};
use cotype_core::calibration::*;
use cotype_core::lower_bounds::LatticeWalk;

#[test]
fn quote_constant_is_reproduced() {
    assert_eq!(quote_sweep().unwrap(), frozen(QUOTE_CONSTANT));
    assert!(frozen(QUOTE_CONSTANT) <= cotype_core::rational::int(3));
}

#[test]
fn cotype_bound_is_reproduced() {
    assert_eq!(cotype_sweep().unwrap(), frozen(COTYPE_RATIO_BOUND));
}

#[test]
fn jigsaw_slope_is_reproduced() {
    assert_eq!(jigsaw_slope().unwrap(), frozen(JIGSAW_SLOPE));
}

#[test]
fn walk_bounds_cover_grid() {
    let (lo, hi) = (frozen(WALK_LOWER), frozen(WALK_UPPER));
    for k in (1..=WALK_MAX_K).step_by(2) {
        for w in LatticeWalk::sweep(WALK_MAX_N, k).unwrap().into_iter().skip(1) {
            assert!(w.within_scale(&lo, &hi), "n={} k={k}", w.n());
        }
    }
    let (flo, fhi) = walk_extremes().unwrap();
    assert_eq!(round_thousandths(flo, false), lo);
    assert_eq!(round_thousandths(fhi, true), hi);
}

#[test]
fn bernoulli_bound_is_reproduced() {
    assert_eq!(bernoulli_bound_n12(), frozen(BERNOULLI_BOUND_N12));
}

#[test]
fn bernoulli_golden_csv() {
    let golden = include_str!("../golden/bernoulli_n12.csv");
    assert_eq!(bivariate_bernoulli(12).to_csv(), golden);
    assert_eq!(BernoulliTable::from_csv(golden).unwrap(), bivariate_bernoulli(12));
}

//! Recomputes the frozen constants in `cotype_core::calibration`; with a path
//! argument also writes the `N = 12` Bernoulli table there as CSV.

use cotype_core::calibration::*;
use cotype_core::rational::{to_f64, to_string};

fn main() -> cotype_core::Result<()> {
    let quote = quote_sweep()?;
    println!("QUOTE_CONSTANT = {} ({:.6})", to_string(&quote), to_f64(&quote));
    let cot = cotype_sweep()?;
    println!("COTYPE_RATIO_BOUND = {} ({:.6})", to_string(&cot), to_f64(&cot));
    for k in JIGSAW_KS {
        let a = jigsaw_a(k)?;
        println!("A({k}) = {} ({:.6})", to_string(&a), to_f64(&a));
    }
    let slope = jigsaw_slope()?;
    println!(
        "JIGSAW_SLOPE = {} (exact {})",
        to_string(&round_thousandths(to_f64(&slope), false)),
        to_string(&slope)
    );
    let (lo, hi) = walk_extremes()?;
    println!(
        "WALK_LOWER = {} WALK_UPPER = {} (observed {lo:.6} .. {hi:.6})",
        to_string(&round_thousandths(lo, false)),
        to_string(&round_thousandths(hi, true))
    );
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, cotype_core::bernoulli::bivariate_bernoulli(12).to_csv()).expect("writable path");
        println!("wrote {path}");
    }
    let b = bernoulli_bound_n12();
    println!("BERNOULLI_BOUND_N12 = {} ({:.6})", to_string(&b), to_f64(&b));
    Ok(())
}

//! Seeded sweeps that fix the measured constants, and the values they produced.
//!
//! Each constant below was computed by the function next to it (run
//! `cargo run --release --example calibrate`) and is checked against a fresh
//! run in the test suite.

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bernoulli::bivariate_bernoulli;
use crate::error::Result;
use crate::kernels::SchemeParams;
use crate::lower_bounds::{jigsaw_vector_fn, LatticeWalk};
use crate::metrics::{metric_cotype_ratio, quote_ratio, scheme_constants};
use crate::rational::{self, Rational};
use crate::torus::{NormSpec, PNorm, Torus, TorusFunction};

/// Numerator bound for random families.
pub const DEFAULT_RADIUS: i64 = 10;

/// The random family: integer values uniform in `[-radius, radius]` drawn
/// from `ChaCha8Rng` seeded with `seed`.
pub fn seeded_function(torus: Torus, d: usize, radius: i64, seed: u64) -> Result<TorusFunction<Rational>> {
    TorusFunction::random(torus, d, radius, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Largest `ℓ_1` increment ratio seen by [`quote_sweep`]; the pipeline uses
/// it as the constant `C` in `E‖f(x+e_j) - f(x)‖^q ≤ C 2^q E_σ‖f(x+δ) - f(x)‖^q`.
pub const QUOTE_CONSTANT: &str = "3/4";

/// Max of [`quote_ratio`] over seeds `0..1000`. Seed `i` fixes `n = 1 + i mod 3`,
/// `m ∈ {4, 6, 8}`, `q ∈ {1, 2}` and either `ℝ` or `ℓ_∞^2`.
pub fn quote_sweep() -> Result<Rational> {
    let mut best = Rational::zero();
    for i in 0..1000u64 {
        let n = 1 + (i % 3) as usize;
        let m = [4, 6, 8][(i / 3 % 3) as usize];
        let q = 1.0 + (i / 9 % 2) as f64;
        let (d, p) = if i / 18 % 2 == 0 { (1, PNorm::Finite(2)) } else { (2, PNorm::Infinity) };
        let f = seeded_function(Torus::new(m, n)?, d, DEFAULT_RADIUS, i)?;
        if let Some(r) = quote_ratio(&f, &NormSpec::new(p, q)?)? {
            best = best.max(r);
        }
    }
    Ok(best)
}

/// Parses one of the frozen literals above.
pub fn frozen(literal: &str) -> Rational {
    rational::parse(literal).expect("valid literal")
}

/// Largest metric cotype ratio seen by [`cotype_sweep`].
pub const COTYPE_RATIO_BOUND: &str = "149931/22322000";

/// Max metric cotype ratio for real-valued `f` on `ℤ_20^2` with `q = 2`, seeds `0..100`.
pub fn cotype_sweep() -> Result<Rational> {
    let t = Torus::new(20, 2)?;
    let spec = NormSpec::euclidean_squared();
    let mut best = Rational::zero();
    for seed in 0..100 {
        let f = seeded_function(t, 1, DEFAULT_RADIUS, seed)?;
        if let Some(r) = metric_cotype_ratio(&f, &spec, "random")?.ratio {
            best = best.max(r);
        }
    }
    Ok(best)
}

/// Jigsaw scales used to probe the approximation constant.
pub const JIGSAW_SCALES: [i64; 3] = [1, 2, 4];

/// Kernel sizes over which the approximation constant is probed.
pub const JIGSAW_KS: [u32; 4] = [3, 5, 7, 9];

/// Lower bound on `A(k) / k` over [`JIGSAW_KS`], rounded down.
pub const JIGSAW_SLOPE: &str = "2/5";

/// Empirical `A` (with `q = 1`) for the `S(j,k)` kernels on `ℤ_48`: the max
/// over the jigsaw functions `f_s`, `s ∈ JIGSAW_SCALES`.
pub fn jigsaw_a(k: u32) -> Result<Rational> {
    let params = SchemeParams::new(1, 48, k, 1)?;
    let spec = NormSpec::new(PNorm::Infinity, 1.0)?;
    let mut best = Rational::zero();
    for s in JIGSAW_SCALES {
        let (f, _) = jigsaw_vector_fn(s, params.torus());
        if let Some(a) = scheme_constants(&params, &f, &spec)?.a_q() {
            best = best.max(a);
        }
    }
    Ok(best)
}

/// `min_k A(k) / k` over [`JIGSAW_KS`].
pub fn jigsaw_slope() -> Result<Rational> {
    let ratios = JIGSAW_KS.iter().map(|&k| Ok(jigsaw_a(k)? / rational::int(k as i64))).collect::<Result<Vec<_>>>()?;
    Ok(ratios.into_iter().min().expect("nonempty"))
}

/// Largest `n` in the lattice walk grid.
pub const WALK_MAX_N: usize = 200;

/// Largest `k` in the lattice walk grid.
pub const WALK_MAX_K: u32 = 41;

/// `E[Z]` stays within `[WALK_LOWER, WALK_UPPER] · min(√(np), np)` on the grid.
pub const WALK_LOWER: &str = "679/1000";
pub const WALK_UPPER: &str = "1";

/// Extremes of `E[Z] / min(√(np), np)` in floating point over `n ≤ 200`, odd `k ≤ 41`.
pub fn walk_extremes() -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for k in (1..=WALK_MAX_K).step_by(2) {
        for w in LatticeWalk::sweep(WALK_MAX_N, k)?.into_iter().skip(1) {
            let np = rational::to_f64(&w.second_moment_formula());
            let r = rational::to_f64(&w.expected_abs()) / np.sqrt().min(np);
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    Ok((lo, hi))
}

/// `max 2^{r+s} |B_{r,s}| / (r! s!)` over `r, s ≤ 12`.
pub const BERNOULLI_BOUND_N12: &str = "4/3";

pub fn bernoulli_bound_n12() -> Rational {
    bivariate_bernoulli(12).bound_ratio().0
}

/// Rounds `v` down (`up = false`) or up to a multiple of `1/1000`.
pub fn round_thousandths(v: f64, up: bool) -> Rational {
    let scaled = v * 1000.0;
    let n = if up { scaled.ceil() } else { scaled.floor() };
    rational::frac(n as i64, 1000)
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cotype_core::check::Check;
use cotype_core::kernels::{scheme_kernels, EdgeMeasure, Kernel, SchemeParams};
use cotype_core::lower_bounds::{random_kernel, symmetrize, verify_conv_perm, verify_norm_identity, verify_symmetrization};
use cotype_core::rational::Rational;
use cotype_core::torus::{Torus, TorusFunction};

use super::{exact_only, norm_spec};
use crate::config::RunConfig;
use crate::{ConfigError, Report};

/// Largest `n` whose `n!` permutations are enumerated.
pub const MAX_SYM_DIM: usize = 8;

/// Weights of random kernels are drawn from `1..=MAX_WEIGHT` before normalizing.
const MAX_WEIGHT: u32 = 9;

pub(super) fn run(config: &RunConfig, report: &mut Report) -> Result<(), ConfigError> {
    exact_only(config)?;
    if config.n > MAX_SYM_DIM {
        return Err(ConfigError::new(format!("symmetrization enumerates n! permutations; n <= {MAX_SYM_DIM}")));
    }
    let torus = Torus::new(config.m, config.n)?;
    let spec = norm_spec(config)?;
    let beta = EdgeMeasure::beta1(torus)?;
    let mut all_ok = true;
    for i in 0..config.count as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed() + i);
        let kernels: Vec<Kernel> = (0..config.n)
            .map(|_| random_kernel(torus, config.support.min(torus.size()), MAX_WEIGHT, &mut rng))
            .collect::<Result<_, _>>()?;
        let f = TorusFunction::<Rational>::random(torus, config.d, config.radius, &mut rng)?;
        let sym = symmetrize(&kernels, &beta)?;
        let mut checks = verify_symmetrization(&kernels, &beta, &sym, &f, &spec)?;
        checks.push(verify_conv_perm(&f, &kernels[0])?);
        checks.push(verify_norm_identity(&f, &kernels[(i as usize) % config.n], &spec)?);
        for mut c in checks {
            all_ok &= c.passed();
            c.name = format!("family{i}.{}", c.name);
            report.check(c);
        }
    }
    report.quantity("families", config.count as u64);
    report.quantity("all_families_pass", all_ok);

    if let Ok(params) = SchemeParams::new(config.n, config.m, config.k, config.q) {
        let ks = scheme_kernels(&params);
        let sym = symmetrize(&ks, &EdgeMeasure::beta2(&params)?)?;
        let fixed = ks.iter().zip(&sym.kernels).all(|(a, b)| a.support() == b.support());
        report.check(Check::new("scheme_fixed_point", fixed, "the S(j,k) kernels are their own average"));
    }
    Ok(())
}

//! Permutation averaging of a scheme `({ν_j}, β)`.

use num_traits::{One, Zero};
use rand::seq::index::sample;
use rand::Rng;

use crate::check::Check;
use crate::error::{Error, Result};
use crate::kernels::{convolve, edge_energy, EdgeMeasure, Kernel};
use crate::rational::{self, Rational};
use crate::torus::{NormSpec, Permutation, Torus, TorusFunction};

use super::{check_family, marginal, marginal_variation, tail_mass};

/// `ν̄_j = (1/n!) Σ_π (ν_{π(j)})^{π⁻¹}` together with `β̄`.
#[derive(Clone)]
pub struct SymmetrizedScheme {
    pub kernels: Vec<Kernel>,
    pub beta: EdgeMeasure,
}

pub fn symmetrize(kernels: &[Kernel], beta: &EdgeMeasure) -> Result<SymmetrizedScheme> {
    let t = check_family(kernels)?;
    if beta.torus() != t {
        return Err(Error::InvalidParams("edge measure lives on a different torus".into()));
    }
    let perms = Permutation::all(t.n());
    let c = rational::frac(1, perms.len() as i64);
    let sym = (0..t.n())
        .map(|j| {
            let parts: Vec<Kernel> =
                perms.iter().map(|pi| kernels[pi.image(j)].permute(&pi.inverse())).collect::<Result<_>>()?;
            let weighted: Vec<(Rational, &Kernel)> = parts.iter().map(|k| (c.clone(), k)).collect();
            Kernel::mixture(&weighted)
        })
        .collect::<Result<_>>()?;
    Ok(SymmetrizedScheme { kernels: sym, beta: beta.symmetrized()? })
}

/// A kernel on `support` distinct uniformly chosen points with weights drawn
/// from `1..=max_weight` and then normalized.
pub fn random_kernel<R: Rng + ?Sized>(torus: Torus, support: usize, max_weight: u32, rng: &mut R) -> Result<Kernel> {
    if support == 0 || support > torus.size() || max_weight == 0 {
        return Err(Error::InvalidParams(format!(
            "random kernel needs 1 <= support <= {} and a positive weight bound",
            torus.size()
        )));
    }
    let points = sample(rng, torus.size(), support).into_vec();
    let raw: Vec<i64> = points.iter().map(|_| rng.gen_range(1..=max_weight as i64)).collect();
    let total: i64 = raw.iter().sum();
    Kernel::new(torus, points.iter().zip(&raw).map(|(&i, &w)| (torus.coords(i), rational::frac(w, total))))
}

fn same_kernel(a: &Kernel, b: &Kernel) -> bool {
    a.support() == b.support()
}

/// `f * ν^π = (f^{π⁻¹} * ν)^π` for every permutation.
pub fn verify_conv_perm(f: &TorusFunction<Rational>, nu: &Kernel) -> Result<Check> {
    let n = f.torus().n();
    let mut bad = Vec::new();
    for pi in Permutation::all(n) {
        let lhs = convolve(f, &nu.permute(&pi)?)?;
        let rhs = convolve(&f.permute(&pi.inverse())?, nu)?.permute(&pi)?;
        if lhs != rhs {
            bad.push(pi.apply(&(0..n).collect::<Vec<_>>()));
        }
    }
    Ok(Check::new("conv_perm", bad.is_empty(), format!("failing permutations: {bad:?}")))
}

/// `E‖f * ν^π - f‖^q = E‖f^{π⁻¹} * ν - f^{π⁻¹}‖^q` for every permutation.
pub fn verify_norm_identity(f: &TorusFunction<Rational>, nu: &Kernel, spec: &NormSpec) -> Result<Check> {
    let n = f.torus().n();
    let mut bad = 0usize;
    for pi in Permutation::all(n) {
        let lhs = convolve(f, &nu.permute(&pi)?)?.sub(f)?.mean_norm_q_power(spec)?;
        let g = f.permute(&pi.inverse())?;
        let rhs = convolve(&g, nu)?.sub(&g)?.mean_norm_q_power(spec)?;
        if lhs != rhs {
            bad += 1;
        }
    }
    Ok(Check::new("norm_identity", bad == 0, format!("{bad} permutations disagree")))
}

fn approx_sum(f: &TorusFunction<Rational>, kernels: &[Kernel], spec: &NormSpec) -> Result<Rational> {
    let mut total = Rational::zero();
    for nu in kernels {
        total += convolve(f, nu)?.sub(f)?.mean_norm_q_power(spec)?;
    }
    Ok(total / rational::int(kernels.len() as i64))
}

/// Structural properties of the averaged scheme, the convexity bound on the
/// approximation numerator, and the averaged edge energy, all for one `f`.
pub fn verify_symmetrization(
    original: &[Kernel],
    beta: &EdgeMeasure,
    sym: &SymmetrizedScheme,
    f: &TorusFunction<Rational>,
    spec: &NormSpec,
) -> Result<Vec<Check>> {
    let t = check_family(original)?;
    let n = t.n();
    let mut checks = Vec::new();

    let mut swap_ok = true;
    let mut stabilizer_ok = true;
    let mut marginal_ok = true;
    for j in 0..n {
        for h in 0..n {
            let tau = Permutation::transposition(n, j, h)?;
            swap_ok &= same_kernel(&sym.kernels[j], &sym.kernels[h].permute(&tau)?);
            if h != j {
                for a in (0..n).filter(|&a| a != j && a != h) {
                    let tau = Permutation::transposition(n, h, a)?;
                    stabilizer_ok &= same_kernel(&sym.kernels[j], &sym.kernels[j].permute(&tau)?);
                }
                let pj = (0..n).filter(|&c| c != j).map(|c| marginal(&sym.kernels[j], c)).collect::<Result<Vec<_>>>()?;
                marginal_ok &= pj.windows(2).all(|w| w[0] == w[1]);
            }
        }
    }
    checks.push(Check::new("sym_swap", swap_ok, "nu_bar_j equals nu_bar_h permuted by (j h)"));
    checks.push(Check::new("sym_stabilizer", stabilizer_ok, "nu_bar_j is invariant under permutations fixing j"));
    checks.push(Check::new("sym_off_marginals", marginal_ok, "P_c(nu_bar_j) is the same for all c != j"));

    let mv0 = marginal_variation(original)?;
    let mv1 = marginal_variation(&sym.kernels)?;
    checks.push(Check::new(
        "sym_marginal_variation",
        mv1 <= mv0,
        format!("{} <= {}", rational::to_string(&mv1), rational::to_string(&mv0)),
    ));
    let half = t.m() as i64 / 2;
    let tails_ok = (0..=half).map(|s| Ok(tail_mass(original, s)? == tail_mass(&sym.kernels, s)?)).collect::<Result<Vec<_>>>()?;
    checks.push(Check::new("sym_tail_mass", tails_ok.iter().all(|&b| b), "tail mass unchanged for every s"));

    let perms = Permutation::all(n);
    let count = rational::int(perms.len() as i64);
    let mut averaged = Rational::zero();
    let mut energy = Rational::zero();
    for pi in &perms {
        let g = f.permute(pi)?;
        let permuted: Vec<Kernel> = (0..n).map(|j| original[pi.image(j)].clone()).collect();
        averaged += approx_sum(&g, &permuted, spec)?;
        energy += edge_energy(&f.permute(&pi.inverse())?, beta, spec)?;
    }
    averaged /= count.clone();
    energy /= count;
    let sym_approx = approx_sum(f, &sym.kernels, spec)?;
    checks.push(Check::new(
        "sym_approximation_convexity",
        sym_approx <= averaged,
        format!("{} <= {}", rational::to_string(&sym_approx), rational::to_string(&averaged)),
    ));
    let sym_energy = edge_energy(f, &sym.beta, spec)?;
    checks.push(Check::new(
        "sym_edge_energy",
        sym_energy == energy,
        format!("{} = {}", rational::to_string(&sym_energy), rational::to_string(&energy)),
    ));
    let masses_ok = sym.kernels.iter().all(|k| k.support().iter().map(|(_, w)| w).sum::<Rational>().is_one());
    checks.push(Check::new("sym_unit_mass", masses_ok, "every nu_bar_j is a probability measure"));
    Ok(checks)
}

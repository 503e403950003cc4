//! Strict triviality, the grid-shift factorization, near-indecomposability
//! and the perturbation experiment.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::eta;
use crate::decompose::decompose;
use crate::error::{Error, Result};
use crate::grid::{translate, Grid};
use crate::library::single_cell;
use crate::matrix::Matrix;
use crate::metric::{distance_bracket, Bound, Interleaving};
use crate::morphism::Morphism;
use crate::rational::Rat;
use crate::search::{random_vector, SearchBudget};
use crate::stepmodule::StepModule;

/// Whether `η_σ` vanishes, with the first nonzero component otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrivialityReport {
    pub sigma: Rat,
    pub strict: bool,
    pub witness: Option<Vec<Rat>>,
}

pub fn strictly_trivial(v: &StepModule, sigma: Rat) -> Result<TrivialityReport> {
    let e = eta(v, sigma)?;
    let witness = e
        .comps()
        .iter()
        .position(|m| !m.is_zero())
        .map(|f| e.grid().point(f));
    Ok(TrivialityReport {
        sigma,
        strict: witness.is_none(),
        witness,
    })
}

/// `m: L_{Q+r} → L_Q[β−r]` with `m[r] ∘ (η_r^L)_Q = η_β^{L_Q}` checked.
#[derive(Clone, Debug)]
pub struct ShiftFactor {
    pub morphism: Morphism,
    /// `(η_r^L)_Q: L_Q → (L_{Q+r})[r]`
    pub eta_r: Morphism,
    pub verified: bool,
}

/// Requires `q` to refine `l`'s grid, `0 < r ≤ min gap(q)` and
/// `β ≥ max gap(q)`.
pub fn shift_factor_morphism(l: &StepModule, q: &Grid, r: Rat, beta: Rat) -> Result<ShiftFactor> {
    let zero = Rat::from_integer(0);
    if !q.refines(l.grid()) {
        return Err(Error::NotARefinement);
    }
    let alpha = q.min_gap();
    let gap_max = q.max_gap().unwrap_or(zero);
    if r <= zero || alpha.is_some_and(|a| r > a) {
        return Err(Error::InvalidArgument("r must satisfy 0 < r ≤ minimum grid gap".into()));
    }
    if beta < gap_max {
        return Err(Error::InvalidArgument("β must be at least the maximum grid gap".into()));
    }
    let lq = l.restrict_extend(q)?;
    let q_plus = q.shifted(-r);
    let source = l.restrict_extend(&q_plus)?;
    let target = lq.shifted(beta - r);
    let grid = q_plus.union(target.grid())?;
    let morphism = Morphism::from_structure_maps(
        l,
        source.restrict_extend(&grid)?,
        target.restrict_extend(&grid)?,
        |s| q_plus.anchor(s).map(|a| q_plus.point(a)),
        |s| q.anchor(&translate(s, beta - r)).map(|a| q.point(a)),
    )?;
    let eta_r = Morphism::from_structure_maps(l, lq.clone(), source.shifted(r), |s| Some(s.to_vec()), |s| {
        Some(translate(s, r))
    })?;
    let verified = morphism.check_naturality().is_ok()
        && eta_r.check_naturality().is_ok()
        && morphism.shifted(r).compose(&eta_r)?.equals(&eta(&lq, beta)?)?;
    Ok(ShiftFactor {
        morphism,
        eta_r,
        verified,
    })
}

/// Near-indecomposability of `w` at `τ`: every summand but at most one is
/// strictly `τ`-trivial.
#[derive(Clone, Debug)]
pub struct TauReport {
    pub tau: Rat,
    pub holds: bool,
    pub summands: Vec<StepModule>,
    /// Indices of summands that are not strictly `τ`-trivial.
    pub nontrivial: Vec<usize>,
}

pub fn tau_indecomposable(w: &StepModule, tau: Rat, budget: &SearchBudget) -> Result<TauReport> {
    let d = decompose(w, budget)?;
    let mut nontrivial = Vec::new();
    for (i, s) in d.summands.iter().enumerate() {
        if !strictly_trivial(s, tau)?.strict {
            nontrivial.push(i);
        }
    }
    Ok(TauReport {
        tau,
        holds: nontrivial.len() <= 1,
        summands: d.summands,
        nontrivial,
    })
}

/// How a perturbed module was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SampleKind {
    /// A rank-one change to one step matrix (rejected if not a module).
    RankOne,
    /// `v ⊕` a small cell.
    SmallCell,
    /// `v[δ]` for a small `δ`.
    Shift,
    /// `v` re-expressed on a finer regular grid.
    Refine,
}

#[derive(Clone, Debug)]
pub struct Trial {
    pub kind: SampleKind,
    pub module: StepModule,
    /// The interleaving that put the sample inside the ball.
    pub witness: Interleaving,
    pub tau_indecomposable: bool,
}

#[derive(Clone, Debug)]
pub struct PerturbationReport {
    pub eps: Rat,
    pub mu: Rat,
    pub tau: Rat,
    pub sampled: usize,
    pub rejected_invalid: usize,
    pub rejected_far: usize,
    pub budget_skipped: usize,
    pub accepted: Vec<Trial>,
}

impl PerturbationReport {
    pub fn passed(&self) -> usize {
        self.accepted.iter().filter(|t| t.tau_indecomposable).count()
    }
}

/// Samples modules near `v` until `trials` lie within `μ = ε/2` by a
/// verified interleaving (or `max_samples` is reached) and checks that each
/// is `cμ`-indecomposable.
pub fn perturbation_experiment(
    v: &StepModule,
    eps: Rat,
    c: Rat,
    trials: usize,
    max_samples: usize,
    seed: u64,
    budget: &SearchBudget,
) -> Result<PerturbationReport> {
    let two = Rat::from_integer(2);
    let mu = eps / two;
    let tau = c * mu;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = PerturbationReport {
        eps,
        mu,
        tau,
        sampled: 0,
        rejected_invalid: 0,
        rejected_far: 0,
        budget_skipped: 0,
        accepted: Vec::new(),
    };
    while report.accepted.len() < trials && report.sampled < max_samples {
        report.sampled += 1;
        let kind = match rng.random_range(0..4) {
            0 => SampleKind::RankOne,
            1 => SampleKind::SmallCell,
            2 => SampleKind::Shift,
            _ => SampleKind::Refine,
        };
        let Some(w) = sample(v, eps, kind, &mut rng)? else {
            report.rejected_invalid += 1;
            continue;
        };
        let b = match distance_bracket(v, &w, budget) {
            Ok(b) => b,
            Err(Error::BudgetExceeded { .. }) => {
                report.budget_skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let witness = match (b.upper, b.upper_witness) {
            (Bound::Finite(u), Some(i)) if u < mu => i,
            _ => {
                report.rejected_far += 1;
                continue;
            }
        };
        let t = tau_indecomposable(&w, tau, budget)?;
        report.accepted.push(Trial {
            kind,
            module: w,
            witness,
            tau_indecomposable: t.holds,
        });
    }
    Ok(report)
}

fn sample(v: &StepModule, eps: Rat, kind: SampleKind, rng: &mut ChaCha8Rng) -> Result<Option<StepModule>> {
    let field = v.field();
    let g = v.grid();
    // small parameters: ε/8, ε/4 or 3ε/8
    let small = eps * Rat::new(rng.random_range(1..=3), 8);
    match kind {
        SampleKind::RankOne => {
            let axis = rng.random_range(0..g.n_axes());
            let candidates: Vec<usize> = (0..g.size())
                .filter(|&x| g.successor(x, axis).is_some_and(|y| v.dim(x) > 0 && v.dim(y) > 0))
                .collect();
            if candidates.is_empty() {
                return Ok(None);
            }
            let x = candidates[rng.random_range(0..candidates.len())];
            let y = g.successor(x, axis).unwrap();
            let p = field.p();
            let u = Matrix::column(field, &random_vector(rng, p, v.dim(y)));
            let w = Matrix::column(field, &random_vector(rng, p, v.dim(x)));
            let delta = u.mul(&w.transpose());
            let mut steps = v.steps().to_vec();
            let old = steps[axis][x].take().unwrap();
            steps[axis][x] = Some(old.add(&delta));
            match StepModule::new(field, g.clone(), v.dims().to_vec(), steps) {
                Ok(m) => Ok(Some(m)),
                Err(_) => Ok(None),
            }
        }
        SampleKind::SmallCell => {
            let at = g.point(rng.random_range(0..g.size()));
            let cell = single_cell(field, &at, small)?;
            v.direct_sum(&cell).map(Some)
        }
        SampleKind::Shift => Ok(Some(v.shifted(small))),
        SampleKind::Refine => {
            let step = eps / Rat::from_integer(4);
            let q = Grid::regular(step, &g.lower_corner(), &g.upper_corner())?;
            v.restrict_extend(&q).map(Some)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;
    use crate::rational::{int, rat};

    #[test]
    fn cell_triviality_boundary() {
        let f = Fp::new(2).unwrap();
        let c = single_cell(f, &[int(0), int(0)], int(1)).unwrap();
        assert!(!strictly_trivial(&c, rat(1, 2)).unwrap().strict);
        assert!(strictly_trivial(&c, int(1)).unwrap().strict);
        let z = StepModule::zero(f, 2);
        assert!(strictly_trivial(&z, int(0)).unwrap().strict);
    }

    #[test]
    fn constant_shift_factor() {
        let f = Fp::new(3).unwrap();
        let l = StepModule::constant(f, Grid::integer_box(2, 3));
        let sf = shift_factor_morphism(&l, l.grid(), int(1), int(1)).unwrap();
        assert!(sf.verified);
        assert!(shift_factor_morphism(&l, l.grid(), int(2), int(2)).is_err());
        assert!(shift_factor_morphism(&l, l.grid(), int(1), rat(1, 2)).is_err());
    }

    #[test]
    fn double_free_is_never_near_indecomposable() {
        let f = Fp::new(2).unwrap();
        let c = StepModule::constant(f, Grid::integer_box(2, 2));
        let cc = c.direct_sum(&c).unwrap();
        let r = tau_indecomposable(&cc, int(10), &SearchBudget::for_prime(2)).unwrap();
        assert!(!r.holds);
        assert_eq!(r.nontrivial.len(), 2);
    }
}

//! Shifts, refinement, restriction-extension, the shift morphisms `η_ε`,
//! smoothing `S_εV = im η_ε` and persistent rank.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::factor::factor_morphism;
use crate::grid::{translate, Grid};
use crate::morphism::Morphism;
use crate::rational::Rat;
use crate::stepmodule::StepModule;

fn check_nonnegative(eps: Rat, what: &str) -> Result<()> {
    if eps < Rat::from_integer(0) {
        return Err(Error::InvalidArgument(alloc::format!("{what} must be nonnegative")));
    }
    Ok(())
}

/// Expresses `v` on a finer grid; the extension is unchanged.
pub fn refine(v: &StepModule, grid: &Grid) -> Result<StepModule> {
    if !grid.refines(v.grid()) {
        return Err(Error::NotARefinement);
    }
    v.restrict_extend(grid)
}

/// `V_P`: restrict the extension to the grid `p` and extend again.
pub fn restrict_extend(v: &StepModule, p: &Grid) -> Result<StepModule> {
    v.restrict_extend(p)
}

/// `V[ε]`, with `V[ε]_s = V_{s+ε}`. Negative shifts are allowed.
pub fn shift(v: &StepModule, eps: Rat) -> StepModule {
    v.shifted(eps)
}

/// The shift morphism `η_ε: V → V[ε]` on the grid `G ∪ (G − ε)`.
pub fn eta(v: &StepModule, eps: Rat) -> Result<Morphism> {
    check_nonnegative(eps, "shift")?;
    let shifted = v.shifted(eps);
    let grid = v.grid().union(shifted.grid())?;
    let source = v.restrict_extend(&grid)?;
    let target = shifted.restrict_extend(&grid)?;
    Morphism::from_structure_maps(v, source, target, |r| Some(r.to_vec()), |r| Some(translate(r, eps)))
}

/// `S_εV` together with the two morphisms exhibiting it as ε-interleaved
/// with `V`.
#[derive(Clone, Debug)]
pub struct Smoothing {
    pub eps: Rat,
    pub module: StepModule,
    /// `S_εV ↪ V[ε]`
    pub inclusion: Morphism,
    /// `V ↠ S_εV` followed by `η_ε: S_εV → S_εV[ε]`
    pub quotient_shift: Morphism,
}

pub fn smooth(v: &StepModule, eps: Rat) -> Result<Smoothing> {
    let e = eta(v, eps)?;
    let fac = factor_morphism(&e)?;
    let shift_s = eta(&fac.image, eps)?;
    let quotient_shift = shift_s.compose(&fac.coimage)?;
    Ok(Smoothing {
        eps,
        module: fac.image,
        inclusion: fac.image_inclusion,
        quotient_shift,
    })
}

/// `V_Q` for `Q = εZ^n ∩ box`, with the interleaving pair from the density
/// argument.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub eps: Rat,
    pub grid: Grid,
    pub module: StepModule,
    /// `V → V_Q[ε]`, sending `V_s` to `V_p` for the grid point `s ≤ p < s+ε`.
    pub to_discrete: Morphism,
    /// `V_Q → V → V[ε]`
    pub from_discrete: Morphism,
}

/// The regular grid `εZ^n` over the bounding box of `v`'s grid, snapped
/// outward to multiples of `ε`.
pub fn discretization_grid(v: &StepModule, eps: Rat) -> Result<Grid> {
    Grid::regular(eps, &v.grid().lower_corner(), &v.grid().upper_corner())
}

pub fn discretize(v: &StepModule, eps: Rat) -> Result<Discretization> {
    if eps <= Rat::from_integer(0) {
        return Err(Error::InvalidArgument("discretization step must be positive".into()));
    }
    let q = discretization_grid(v, eps)?;
    discretize_on(v, eps, &q)
}

/// Discretization on a caller-chosen regular grid `q` of mesh `eps` whose
/// box contains `v`'s grid.
pub fn discretize_on(v: &StepModule, eps: Rat, q: &Grid) -> Result<Discretization> {
    let covers = v
        .grid()
        .lower_corner()
        .iter()
        .zip(q.lower_corner())
        .all(|(a, b)| b <= *a)
        && v
            .grid()
            .upper_corner()
            .iter()
            .zip(q.upper_corner())
            .all(|(a, b)| b >= *a);
    let regular = q
        .axes()
        .iter()
        .all(|a| a.windows(2).all(|w| w[1] - w[0] == eps));
    if !covers || !regular {
        return Err(Error::InvalidArgument(
            "discretization grid must be regular of mesh ε and cover the module grid".into(),
        ));
    }
    let vq = v.restrict_extend(q)?;
    let snap = |s: &[Rat]| q.anchor(s).map(|a| q.point(a));

    let vq_shift = vq.shifted(eps);
    let r1 = v.grid().union(vq_shift.grid())?;
    let to_discrete = Morphism::from_structure_maps(
        v,
        v.restrict_extend(&r1)?,
        vq_shift.restrict_extend(&r1)?,
        |r| Some(r.to_vec()),
        |r| snap(&translate(r, eps)),
    )?;

    let v_shift = v.shifted(eps);
    let r2 = q.union(v_shift.grid())?;
    let from_discrete = Morphism::from_structure_maps(
        v,
        vq.restrict_extend(&r2)?,
        v_shift.restrict_extend(&r2)?,
        |r| snap(r),
        |r| Some(translate(r, eps)),
    )?;
    Ok(Discretization {
        eps,
        grid: q.clone(),
        module: vq,
        to_discrete,
        from_discrete,
    })
}

/// `c^V(ε) = max_s rk(V_s → V_{s+ε})`, the maximum taken over anchor points
/// of `G ∪ (G − ε)`.
pub fn persistent_rank(v: &StepModule, eps: Rat) -> Result<usize> {
    let e = eta(v, eps)?;
    Ok(e.comps().iter().map(|m| m.rank()).max().unwrap_or(0))
}

/// Ranks of all structure maps between comparable points of `v`'s grid.
/// Rank queries for arbitrary rational pairs resolve through anchors.
#[derive(Clone, Debug)]
pub struct RankTable {
    grid: Grid,
    ranks: Vec<usize>,
}

impl RankTable {
    pub fn new(v: &StepModule) -> Self {
        let g = v.grid().clone();
        let n = g.size();
        let mut ranks = alloc::vec![0; n * n];
        for a in 0..n {
            // maps from `a` to every point above it, built by extending along one axis
            let mut maps: Vec<Option<crate::matrix::Matrix>> = alloc::vec![None; n];
            maps[a] = Some(crate::matrix::Matrix::identity(v.field(), v.dim(a)));
            for b in a..n {
                if !g.leq(a, b) {
                    continue;
                }
                if b != a {
                    let mb = g.multi(b);
                    let ma = g.multi(a);
                    let axis = (0..g.n_axes()).find(|&i| mb[i] > ma[i]).unwrap();
                    let prev = b - g.stride(axis);
                    let m = v.step(prev, axis).unwrap().mul(maps[prev].as_ref().unwrap());
                    maps[b] = Some(m);
                }
                ranks[a * n + b] = maps[b].as_ref().unwrap().rank();
            }
        }
        RankTable { grid: g, ranks }
    }

    /// `rk(V_s → V_t)` for rational `s ≤ t`.
    pub fn rank(&self, s: &[Rat], t: &[Rat]) -> usize {
        match (self.grid.anchor(s), self.grid.anchor(t)) {
            (Some(a), Some(b)) if self.grid.leq(a, b) => self.ranks[a * self.grid.size() + b],
            _ => 0,
        }
    }
}

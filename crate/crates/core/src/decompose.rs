//! Krull–Schmidt decomposition and isomorphism testing.
//!
//! Splitting uses Fitting's lemma: for an endomorphism `x` and `N` at least
//! every pointwise dimension, `V = ker xᴺ ⊕ im xᴺ`. The endomorphism algebra
//! of `V` is local exactly when every element is nilpotent or invertible, so
//! an exhaustive pass over `End(V)` (up to scalars) either finds a splitting
//! element or certifies `V` indecomposable.

use alloc::vec::Vec;

use crate::calculus::RankTable;
use crate::error::{Error, Result};
use crate::factor::submodule;
use crate::hom::{coordinates, hom_basis};
use crate::matrix::Matrix;
use crate::morphism::Morphism;
use crate::search::{for_each_projective, random_vector, SearchBudget};
use crate::stepmodule::StepModule;

/// `End(V)` with a basis and its structure constants:
/// `basis[i] ∘ basis[j] = Σ_k table[i][j][k] · basis[k]`.
#[derive(Clone, Debug)]
pub struct EndoAlgebra {
    pub module: StepModule,
    pub basis: Vec<Morphism>,
    pub table: Vec<Vec<Vec<u32>>>,
}

impl EndoAlgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of the identity.
    pub fn identity(&self) -> Result<Vec<u32>> {
        coordinates(&self.basis, &Morphism::identity(&self.module))?
            .ok_or_else(|| Error::InvalidArgument("identity not in End basis span".into()))
    }
}

pub fn endo_algebra(v: &StepModule) -> Result<EndoAlgebra> {
    let basis = hom_basis(v, v)?;
    let mut table = Vec::with_capacity(basis.len());
    for a in &basis {
        let mut row = Vec::with_capacity(basis.len());
        for b in &basis {
            let prod = a.compose(b)?;
            let c = coordinates(&basis, &prod)?
                .ok_or_else(|| Error::InvalidArgument("End is not closed under composition".into()))?;
            row.push(c);
        }
        table.push(row);
    }
    Ok(EndoAlgebra {
        module: v.clone(),
        basis,
        table,
    })
}

/// A splitting `V ≅ A ⊕ B` with inclusions and projections on `V`'s grid.
#[derive(Clone, Debug)]
pub struct Split {
    pub a: StepModule,
    pub b: StepModule,
    pub incl_a: Morphism,
    pub incl_b: Morphism,
    pub proj_a: Morphism,
    pub proj_b: Morphism,
}

fn combine(basis: &[Morphism], coeffs: &[u32]) -> Vec<Matrix> {
    let mut comps: Vec<Matrix> = basis[0]
        .comps()
        .iter()
        .map(|m| Matrix::zeros(m.field(), m.rows(), m.cols()))
        .collect();
    for (b, &c) in basis.iter().zip(coeffs) {
        if c == 0 {
            continue;
        }
        for (acc, m) in comps.iter_mut().zip(b.comps()) {
            acc.add_scaled(m, c);
        }
    }
    comps
}

/// Splits along the Fitting decomposition of `x` when `x` is neither
/// nilpotent nor invertible.
fn fitting_split(v: &StepModule, x: &[Matrix]) -> Result<Option<Split>> {
    let n = v.max_dim().max(1);
    let powers: Vec<Matrix> = x.iter().map(|m| m.pow(n)).collect();
    if powers.iter().all(Matrix::is_zero) || powers.iter().all(Matrix::is_invertible) {
        return Ok(None);
    }
    let image: Vec<Matrix> = powers.iter().map(Matrix::column_basis).collect();
    let kernel: Vec<Matrix> = powers.iter().map(Matrix::kernel_basis).collect();
    let mut proj_a = Vec::with_capacity(x.len());
    let mut proj_b = Vec::with_capacity(x.len());
    for (i, k) in image.iter().zip(&kernel) {
        let inv = i
            .hstack(k)
            .inverse()
            .ok_or_else(|| Error::InvalidArgument("Fitting summands do not span".into()))?;
        let ra: Vec<usize> = (0..i.cols()).collect();
        let rb: Vec<usize> = (i.cols()..i.cols() + k.cols()).collect();
        proj_a.push(inv.select_rows(&ra));
        proj_b.push(inv.select_rows(&rb));
    }
    let (a, incl_a) = submodule(v, image)?;
    let (b, incl_b) = submodule(v, kernel)?;
    let proj_a = Morphism::new_unchecked(v.clone(), a.clone(), proj_a)?;
    let proj_b = Morphism::new_unchecked(v.clone(), b.clone(), proj_b)?;
    Ok(Some(Split {
        a,
        b,
        incl_a,
        incl_b,
        proj_a,
        proj_b,
    }))
}

/// `None` certifies `v` indecomposable (`End v` local); otherwise a
/// nontrivial splitting. Randomized first, exhaustive when no random
/// element splits.
pub fn split_once(v: &StepModule, budget: &SearchBudget) -> Result<Option<Split>> {
    if v.is_zero() {
        return Err(Error::InvalidArgument("cannot split the zero module".into()));
    }
    let basis = hom_basis(v, v)?;
    let d = basis.len();
    if d <= 1 {
        return Ok(None);
    }
    for b in &basis {
        if let Some(s) = fitting_split(v, b.comps())? {
            return Ok(Some(s));
        }
    }
    let p = v.field().p();
    let mut rng = budget.rng();
    for _ in 0..budget.random_attempts {
        let c = random_vector(&mut rng, p, d);
        if let Some(s) = fitting_split(v, &combine(&basis, &c))? {
            return Ok(Some(s));
        }
    }
    budget.check(d)?;
    let mut found = None;
    let mut err = None;
    for_each_projective(p, d, |c| match fitting_split(v, &combine(&basis, c)) {
        Ok(Some(s)) => {
            found = Some(s);
            true
        }
        Ok(None) => false,
        Err(e) => {
            err = Some(e);
            true
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(found)
}

/// Indecomposable summands with inclusions into and projections out of the
/// original module.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub module: StepModule,
    pub summands: Vec<StepModule>,
    pub inclusions: Vec<Morphism>,
    pub projections: Vec<Morphism>,
}

impl Decomposition {
    /// `π_i ∘ ι_j = δ_ij` and `Σ ι_i ∘ π_i = id`, checked pointwise.
    pub fn verify(&self) -> Result<bool> {
        let n = self.summands.len();
        for i in 0..n {
            for j in 0..n {
                let c = self.projections[i].compose(&self.inclusions[j])?;
                let expected = if i == j {
                    Morphism::identity(&self.summands[i])
                } else {
                    Morphism::zero(&self.summands[j], &self.summands[i])?
                };
                if !c.equals(&expected)? {
                    return Ok(false);
                }
            }
        }
        let mut total = Morphism::zero(&self.module, &self.module)?;
        for (i, p) in self.inclusions.iter().zip(&self.projections) {
            total = total.add(&i.compose(p)?)?;
        }
        total.equals(&Morphism::identity(&self.module))
    }
}

pub fn decompose(v: &StepModule, budget: &SearchBudget) -> Result<Decomposition> {
    let mut out = Decomposition {
        module: v.clone(),
        summands: Vec::new(),
        inclusions: Vec::new(),
        projections: Vec::new(),
    };
    if v.is_zero() {
        return Ok(out);
    }
    let mut stack = alloc::vec![(v.clone(), Morphism::identity(v), Morphism::identity(v))];
    let mut round = 0u64;
    while let Some((m, incl, proj)) = stack.pop() {
        let b = budget.with_seed(budget.seed.wrapping_add(round));
        round += 1;
        match split_once(&m, &b)? {
            None => {
                out.summands.push(m);
                out.inclusions.push(incl);
                out.projections.push(proj);
            }
            Some(s) => {
                stack.push((s.b.clone(), incl.compose(&s.incl_b)?, s.proj_b.compose(&proj)?));
                stack.push((s.a.clone(), incl.compose(&s.incl_a)?, s.proj_a.compose(&proj)?));
            }
        }
    }
    Ok(out)
}

/// Searches for an isomorphism `v → w`. Both modules are first refined to the
/// union grid; the witness lives there.
///
/// Cheap invariants (pointwise dims, rank invariant) reject first. An
/// answer of `None` is only returned after exhaustive search.
pub fn iso_test(v: &StepModule, w: &StepModule, budget: &SearchBudget) -> Result<Option<Morphism>> {
    if v.field() != w.field() {
        return Err(Error::FieldMismatch {
            left: v.field().p(),
            right: w.field().p(),
        });
    }
    let u = v.grid().union(w.grid())?;
    let vu = v.restrict_extend(&u)?;
    let wu = w.restrict_extend(&u)?;
    if vu.dims() != wu.dims() {
        return Ok(None);
    }
    if vu.is_zero() {
        return Ok(Some(Morphism::zero(&vu, &wu)?));
    }
    if vu == wu {
        return Ok(Some(Morphism::identity(&vu)));
    }
    if !same_rank_invariant(&vu, &wu) {
        return Ok(None);
    }
    let basis = hom_basis(&vu, &wu)?;
    let d = basis.len();
    if d == 0 {
        return Ok(None);
    }
    let is_iso = |comps: &[Matrix]| comps.iter().all(Matrix::is_invertible);
    let wrap = |comps: Vec<Matrix>| Morphism::new_unchecked(vu.clone(), wu.clone(), comps);
    for b in &basis {
        if b.is_iso() {
            return Ok(Some(b.clone()));
        }
    }
    let p = v.field().p();
    let mut rng = budget.rng();
    for _ in 0..budget.random_attempts {
        let comps = combine(&basis, &random_vector(&mut rng, p, d));
        if is_iso(&comps) {
            return wrap(comps).map(Some);
        }
    }
    budget.check(d)?;
    let mut found = None;
    for_each_projective(p, d, |c| {
        let comps = combine(&basis, c);
        if is_iso(&comps) {
            found = Some(comps);
            true
        } else {
            false
        }
    });
    found.map(wrap).transpose()
}

fn same_rank_invariant(a: &StepModule, b: &StepModule) -> bool {
    let (ra, rb) = (RankTable::new(a), RankTable::new(b));
    let g = a.grid();
    (0..g.size()).all(|x| {
        (x..g.size())
            .filter(|&y| g.leq(x, y))
            .all(|y| ra.rank(&g.point(x), &g.point(y)) == rb.rank(&g.point(x), &g.point(y)))
    })
}

/// Groups modules into isomorphism classes; returns class labels in input
/// order (labels are indices of the first member of each class).
pub fn iso_classes(modules: &[StepModule], budget: &SearchBudget) -> Result<Vec<usize>> {
    let mut labels: Vec<usize> = Vec::with_capacity(modules.len());
    let mut reps: Vec<usize> = Vec::new();
    for (i, m) in modules.iter().enumerate() {
        let mut label = i;
        for &r in &reps {
            if iso_test(&modules[r], m, budget)?.is_some() {
                label = r;
                break;
            }
        }
        if label == i {
            reps.push(i);
        }
        labels.push(label);
    }
    Ok(labels)
}

/// True when the two lists agree as multisets of isomorphism classes.
pub fn same_iso_multiset(a: &[StepModule], b: &[StepModule], budget: &SearchBudget) -> Result<bool> {
    if a.len() != b.len() {
        return Ok(false);
    }
    let mut used = alloc::vec![false; b.len()];
    'outer: for x in a {
        for (j, y) in b.iter().enumerate() {
            if !used[j] && iso_test(x, y, budget)?.is_some() {
                used[j] = true;
                continue 'outer;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

//! Modules indexed by comparable pairs `(p, q)`, `p ≤ q`, of grid points:
//! the image functor `im` and the diagonal restriction `dg`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::matrix::Matrix;
use crate::morphism::Morphism;
use crate::stepmodule::StepModule;

/// Finite model of a module over the pair poset `{(p, q) : p ≤ q}`.
///
/// Unit steps either move the first coordinate (`(p,q) → (p⁺ᵢ,q)`) or the
/// second (`(p,q) → (p,q⁺ᵢ)`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairGridModule {
    grid: Grid,
    field: crate::field::Fp,
    pairs: Vec<(usize, usize)>,
    index: BTreeMap<(usize, usize), usize>,
    dims: Vec<usize>,
    /// `first[axis][k]`: step from pair `k` moving `p` up along `axis`.
    first: Vec<Vec<Option<Matrix>>>,
    /// `second[axis][k]`: step from pair `k` moving `q` up along `axis`.
    second: Vec<Vec<Option<Matrix>>>,
    /// For modules built by [`image_pairs`], the basis of `im V_{p,q}` inside `V_q`.
    embeddings: Option<Vec<Matrix>>,
}

/// Which unit step of a pair module failed the mono-epi test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonoEpiViolation {
    FirstNotInjective { p: Vec<usize>, q: Vec<usize>, axis: usize },
    SecondNotSurjective { p: Vec<usize>, q: Vec<usize>, axis: usize },
}

impl PairGridModule {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn dim(&self, p: usize, q: usize) -> Option<usize> {
        self.index.get(&(p, q)).map(|&k| self.dims[k])
    }

    pub fn first_step(&self, p: usize, q: usize, axis: usize) -> Option<&Matrix> {
        let k = *self.index.get(&(p, q))?;
        self.first[axis][k].as_ref()
    }

    pub fn second_step(&self, p: usize, q: usize, axis: usize) -> Option<&Matrix> {
        let k = *self.index.get(&(p, q))?;
        self.second[axis][k].as_ref()
    }

    /// First-coordinate steps are monomorphisms and second-coordinate steps
    /// are epimorphisms.
    pub fn check_mono_epi(&self) -> core::result::Result<(), MonoEpiViolation> {
        for (k, &(p, q)) in self.pairs.iter().enumerate() {
            for axis in 0..self.grid.n_axes() {
                if let Some(m) = &self.first[axis][k] {
                    if m.rank() != m.cols() {
                        return Err(MonoEpiViolation::FirstNotInjective {
                            p: self.grid.multi(p),
                            q: self.grid.multi(q),
                            axis,
                        });
                    }
                }
                if let Some(m) = &self.second[axis][k] {
                    if m.rank() != m.rows() {
                        return Err(MonoEpiViolation::SecondNotSurjective {
                            p: self.grid.multi(p),
                            q: self.grid.multi(q),
                            axis,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// All squares formed by two unit steps commute.
    pub fn check_commutativity(&self) -> bool {
        let n = self.grid.n_axes();
        // a step is (kind, axis) with kind 0 = first coordinate, 1 = second
        let apply = |k: usize, kind: usize, axis: usize| -> Option<(usize, &Matrix)> {
            let (p, q) = self.pairs[k];
            let (np, nq) = if kind == 0 {
                (self.grid.successor(p, axis)?, q)
            } else {
                (p, self.grid.successor(q, axis)?)
            };
            let m = if kind == 0 { &self.first } else { &self.second }[axis][k].as_ref()?;
            Some((*self.index.get(&(np, nq))?, m))
        };
        for k in 0..self.pairs.len() {
            for s1 in 0..2 * n {
                for s2 in s1 + 1..2 * n {
                    let (k1, a1) = (s1 / n, s1 % n);
                    let (k2, a2) = (s2 / n, s2 % n);
                    let (Some((x, m1)), Some((y, m2))) = (apply(k, k1, a1), apply(k, k2, a2)) else {
                        continue;
                    };
                    let (Some((xy, m12)), Some((yx, m21))) = (apply(x, k2, a2), apply(y, k1, a1)) else {
                        continue;
                    };
                    if xy != yx || m12.mul(m1) != m21.mul(m2) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// `im V`: the value at `(p, q)` is the image of `V_{p,q}`, steps are
/// induced by the structure maps of `V`.
pub fn image_pairs(v: &StepModule) -> Result<PairGridModule> {
    let g = v.grid().clone();
    let field = v.field();
    let n = g.size();
    let mut pairs = Vec::new();
    let mut index = BTreeMap::new();
    let mut bases = Vec::new();
    for p in 0..n {
        for q in p..n {
            if g.leq(p, q) {
                index.insert((p, q), pairs.len());
                pairs.push((p, q));
                bases.push(v.path_map(p, q).column_basis());
            }
        }
    }
    let dims: Vec<usize> = bases.iter().map(Matrix::cols).collect();
    let mut first = Vec::with_capacity(g.n_axes());
    let mut second = Vec::with_capacity(g.n_axes());
    for axis in 0..g.n_axes() {
        let mut fcol = Vec::with_capacity(pairs.len());
        let mut scol = Vec::with_capacity(pairs.len());
        for (k, &(p, q)) in pairs.iter().enumerate() {
            let f = match g.successor(p, axis).and_then(|np| index.get(&(np, q))) {
                Some(&t) => Some(solve_exact(&bases[t], &bases[k])?),
                None => None,
            };
            let s = match g.successor(q, axis).and_then(|nq| index.get(&(p, nq)).map(|&t| (nq, t))) {
                Some((_, t)) => {
                    let moved = v.step(q, axis).unwrap().mul(&bases[k]);
                    Some(solve_exact(&bases[t], &moved)?)
                }
                None => None,
            };
            fcol.push(f);
            scol.push(s);
        }
        first.push(fcol);
        second.push(scol);
    }
    Ok(PairGridModule {
        grid: g,
        field,
        pairs,
        index,
        dims,
        first,
        second,
        embeddings: Some(bases),
    })
}

fn solve_exact(basis: &Matrix, rhs: &Matrix) -> Result<Matrix> {
    basis
        .solve(rhs)?
        .ok_or_else(|| Error::InvalidArgument("image is not contained in the target image".into()))
}

/// `dg`: restriction of a pair module to the diagonal `(p, p)`. The unit
/// step `p → p⁺ᵢ` is `(p,p) → (p,p⁺ᵢ) → (p⁺ᵢ,p⁺ᵢ)`.
pub fn diagonal(pm: &PairGridModule) -> Result<StepModule> {
    let g = pm.grid.clone();
    let dims = (0..g.size())
        .map(|p| pm.dim(p, p).ok_or(Error::InvalidArgument("missing diagonal pair".into())))
        .collect::<Result<Vec<_>>>()?;
    let m = StepModule::from_step_fn(pm.field, g, dims, |p, axis, np| {
        let up = pm.second_step(p, p, axis).expect("second step on the diagonal");
        let over = pm.first_step(p, np, axis).expect("first step to the diagonal");
        over.mul(up)
    });
    Ok(m)
}

/// The isomorphism `dg(im V) → V` given by the stored embeddings at the
/// diagonal pairs.
pub fn round_trip_witness(v: &StepModule, pm: &PairGridModule) -> Result<Morphism> {
    let emb = pm
        .embeddings
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("pair module was not built from a module".into()))?;
    let d = diagonal(pm)?;
    let comps = (0..v.grid().size())
        .map(|p| emb[pm.index[&(p, p)]].clone())
        .collect();
    Morphism::new(d, v.clone(), comps)
}

//! Natural transformations between step modules on a shared grid.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::matrix::Matrix;
use crate::rational::Rat;
use crate::stepmodule::StepModule;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Morphism {
    source: StepModule,
    target: StepModule,
    comps: Vec<Matrix>,
}

/// The first failing naturality square of a morphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismViolation {
    ComponentShape { at: Vec<usize> },
    Naturality { at: Vec<usize>, axis: usize },
}

impl core::fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            MorphismViolation::ComponentShape { at } => write!(f, "component at {at:?} has the wrong shape"),
            MorphismViolation::Naturality { at, axis } => {
                write!(f, "naturality square at {at:?} along axis {axis} fails")
            }
        }
    }
}

impl Morphism {
    pub fn new(source: StepModule, target: StepModule, comps: Vec<Matrix>) -> Result<Self> {
        let m = Morphism::new_unchecked(source, target, comps)?;
        m.check_naturality()
            .map_err(|v| Error::InvalidMorphism(format!("{v}")))?;
        Ok(m)
    }

    /// Checks only that source and target share a grid and component count.
    pub fn new_unchecked(source: StepModule, target: StepModule, comps: Vec<Matrix>) -> Result<Self> {
        if source.grid() != target.grid() {
            return Err(Error::GridMismatch);
        }
        if source.field() != target.field() {
            return Err(Error::FieldMismatch {
                left: source.field().p(),
                right: target.field().p(),
            });
        }
        if comps.len() != source.grid().size() {
            return Err(Error::DimensionMismatch {
                context: "morphism component count",
            });
        }
        Ok(Morphism {
            source,
            target,
            comps,
        })
    }

    pub fn identity(v: &StepModule) -> Morphism {
        let comps = v.dims().iter().map(|&d| Matrix::identity(v.field(), d)).collect();
        Morphism {
            source: v.clone(),
            target: v.clone(),
            comps,
        }
    }

    pub fn zero(source: &StepModule, target: &StepModule) -> Result<Morphism> {
        if source.grid() != target.grid() {
            return Err(Error::GridMismatch);
        }
        let comps = source
            .dims()
            .iter()
            .zip(target.dims())
            .map(|(&s, &t)| Matrix::zeros(source.field(), t, s))
            .collect();
        Morphism::new_unchecked(source.clone(), target.clone(), comps)
    }

    /// Builds the morphism whose component at each grid point is a structure
    /// map of `base` from `from(q)` to `to(q)`; `None` stands for a zero value.
    ///
    /// `source` and `target` must be modules on one grid whose values are
    /// those of `base` at `from(q)` and `to(q)`.
    pub fn from_structure_maps(
        base: &StepModule,
        source: StepModule,
        target: StepModule,
        from: impl Fn(&[Rat]) -> Option<Vec<Rat>>,
        to: impl Fn(&[Rat]) -> Option<Vec<Rat>>,
    ) -> Result<Morphism> {
        let grid = source.grid().clone();
        let field = base.field();
        let mut comps = Vec::with_capacity(grid.size());
        for (flat, q) in grid.points().enumerate() {
            let m = match (from(&q), to(&q)) {
                (Some(s), Some(t)) => base.structure_map(&s, &t)?,
                _ => Matrix::zeros(field, target.dim(flat), source.dim(flat)),
            };
            if m.shape() != (target.dim(flat), source.dim(flat)) {
                return Err(Error::ModuleMismatch("structure-map morphism"));
            }
            comps.push(m);
        }
        Morphism::new_unchecked(source, target, comps)
    }

    pub fn source(&self) -> &StepModule {
        &self.source
    }

    pub fn target(&self) -> &StepModule {
        &self.target
    }

    pub fn grid(&self) -> &Grid {
        self.source.grid()
    }

    pub fn comps(&self) -> &[Matrix] {
        &self.comps
    }

    pub fn comp(&self, flat: usize) -> &Matrix {
        &self.comps[flat]
    }

    pub fn into_parts(self) -> (StepModule, StepModule, Vec<Matrix>) {
        (self.source, self.target, self.comps)
    }

    /// The component at an arbitrary rational point (a `0×0` matrix below
    /// the grid).
    pub fn component_at(&self, s: &[Rat]) -> Matrix {
        match self.grid().anchor(s) {
            Some(a) => self.comps[a].clone(),
            None => Matrix::zeros(self.source.field(), 0, 0),
        }
    }

    pub fn check_naturality(&self) -> core::result::Result<(), MorphismViolation> {
        let g = self.grid();
        for flat in 0..g.size() {
            if self.comps[flat].shape() != (self.target.dim(flat), self.source.dim(flat)) {
                return Err(MorphismViolation::ComponentShape { at: g.multi(flat) });
            }
        }
        for flat in 0..g.size() {
            for axis in 0..g.n_axes() {
                let Some(succ) = g.successor(flat, axis) else { continue };
                let lhs = self.comps[succ].mul(self.source.step(flat, axis).unwrap());
                let rhs = self.target.step(flat, axis).unwrap().mul(&self.comps[flat]);
                if lhs != rhs {
                    return Err(MorphismViolation::Naturality {
                        at: g.multi(flat),
                        axis,
                    });
                }
            }
        }
        Ok(())
    }

    /// The same morphism expressed on a finer grid.
    pub fn refine(&self, grid: &Grid) -> Result<Morphism> {
        if grid == self.grid() {
            return Ok(self.clone());
        }
        if !grid.refines(self.grid()) {
            return Err(Error::NotARefinement);
        }
        let source = self.source.restrict_extend(grid)?;
        let target = self.target.restrict_extend(grid)?;
        let comps = grid.points().map(|q| self.component_at(&q)).collect();
        Morphism::new_unchecked(source, target, comps)
    }

    /// `f[eps]: V[eps] → W[eps]`.
    pub fn shifted(&self, eps: Rat) -> Morphism {
        Morphism {
            source: self.source.shifted(eps),
            target: self.target.shifted(eps),
            comps: self.comps.clone(),
        }
    }

    /// `self ∘ first`, computed on the union of both grids. The target of
    /// `first` and the source of `self` must be the same extension.
    pub fn compose(&self, first: &Morphism) -> Result<Morphism> {
        let u = self.grid().union(first.grid())?;
        let a = first.refine(&u)?;
        let b = self.refine(&u)?;
        if a.target != b.source {
            return Err(Error::ModuleMismatch("composition"));
        }
        let comps = b.comps.iter().zip(&a.comps).map(|(x, y)| x.mul(y)).collect();
        Morphism::new_unchecked(a.source, b.target, comps)
    }

    /// Equality of morphisms between the same extensions, tested on the
    /// union grid.
    pub fn equals(&self, other: &Morphism) -> Result<bool> {
        let u = self.grid().union(other.grid())?;
        let a = self.refine(&u)?;
        let b = other.refine(&u)?;
        if a.source != b.source || a.target != b.target {
            return Err(Error::ModuleMismatch("morphism comparison"));
        }
        Ok(a.comps == b.comps)
    }

    /// First grid point (on the union grid) where the two morphisms differ.
    pub fn first_difference(&self, other: &Morphism) -> Result<Option<Vec<Rat>>> {
        let u = self.grid().union(other.grid())?;
        let a = self.refine(&u)?;
        let b = other.refine(&u)?;
        if a.source != b.source || a.target != b.target {
            return Err(Error::ModuleMismatch("morphism comparison"));
        }
        Ok((0..u.size()).find(|&f| a.comps[f] != b.comps[f]).map(|f| u.point(f)))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Matrix::is_zero)
    }

    pub fn is_iso(&self) -> bool {
        self.comps.iter().all(Matrix::is_invertible)
    }

    /// Componentwise inverse of an isomorphism.
    pub fn inverse(&self) -> Option<Morphism> {
        let comps = self.comps.iter().map(Matrix::inverse).collect::<Option<Vec<_>>>()?;
        Some(Morphism {
            source: self.target.clone(),
            target: self.source.clone(),
            comps,
        })
    }

    pub fn add(&self, other: &Morphism) -> Result<Morphism> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::ModuleMismatch("morphism sum"));
        }
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect();
        Ok(Morphism {
            source: self.source.clone(),
            target: self.target.clone(),
            comps,
        })
    }

    pub fn scale(&self, c: u32) -> Morphism {
        Morphism {
            source: self.source.clone(),
            target: self.target.clone(),
            comps: self.comps.iter().map(|m| m.scale(c)).collect(),
        }
    }

    /// `Σ coeffs[i] · basis[i]`; all basis elements share source and target.
    pub fn combination(basis: &[Morphism], coeffs: &[u32]) -> Result<Morphism> {
        let first = basis
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty basis".into()))?;
        let mut comps: Vec<Matrix> = first.comps.iter().map(|m| Matrix::zeros(m.field(), m.rows(), m.cols())).collect();
        for (b, &c) in basis.iter().zip(coeffs) {
            if b.source != first.source || b.target != first.target {
                return Err(Error::ModuleMismatch("linear combination"));
            }
            for (acc, m) in comps.iter_mut().zip(&b.comps) {
                acc.add_scaled(m, c);
            }
        }
        Ok(Morphism {
            source: first.source.clone(),
            target: first.target.clone(),
            comps,
        })
    }

    /// Flattened component entries, for linear-algebra over Hom spaces.
    pub fn to_vector(&self) -> Vec<u32> {
        self.comps.iter().flat_map(|m| m.data().iter().copied()).collect()
    }

    /// Componentwise block-diagonal sum `f ⊕ g`.
    pub fn direct_sum(&self, other: &Morphism) -> Result<Morphism> {
        let u = self.grid().union(other.grid())?;
        let a = self.refine(&u)?;
        let b = other.refine(&u)?;
        let source = a.source.direct_sum(&b.source)?;
        let target = a.target.direct_sum(&b.target)?;
        let comps = a.comps.iter().zip(&b.comps).map(|(x, y)| x.block_diag(y)).collect();
        Morphism::new_unchecked(source, target, comps)
    }
}

//! Persistence modules on finite grids and their step extensions to `Q^n`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::field::Fp;
use crate::grid::Grid;
use crate::matrix::Matrix;
use crate::rational::Rat;

/// A module given by a vector space at each point of a finite grid and a
/// structure matrix for every unit grid step.
///
/// It stands for its extension to all of `R^n`: the value at `s` is the value
/// at `sup{p ∈ grid : p ≤ s}`, and `0` when no grid point lies below `s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StepModule {
    field: Fp,
    grid: Grid,
    dims: Vec<usize>,
    /// `steps[axis][flat]` maps the point `flat` to its successor along
    /// `axis`; `None` on the top face of that axis.
    steps: Vec<Vec<Option<Matrix>>>,
}

/// The first invariant a candidate module violates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DimsLength { expected: usize, found: usize },
    MissingStep { at: Vec<usize>, axis: usize },
    ExtraStep { at: Vec<usize>, axis: usize },
    StepShape {
        at: Vec<usize>,
        axis: usize,
        expected: (usize, usize),
        found: (usize, usize),
    },
    WrongField { at: Vec<usize>, axis: usize },
    /// `step_j(g⁺ᵢ)·step_i(g) ≠ step_i(g⁺ʲ)·step_j(g)`.
    NonCommuting { at: Vec<usize>, axes: (usize, usize) },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimsLength { expected, found } => {
                write!(f, "dims has {found} entries, grid has {expected} points")
            }
            Violation::MissingStep { at, axis } => write!(f, "missing step at {at:?} along axis {axis}"),
            Violation::ExtraStep { at, axis } => {
                write!(f, "step at {at:?} along axis {axis} leaves the grid")
            }
            Violation::StepShape {
                at,
                axis,
                expected,
                found,
            } => write!(
                f,
                "step at {at:?} along axis {axis} has shape {}x{}, expected {}x{}",
                found.0, found.1, expected.0, expected.1
            ),
            Violation::WrongField { at, axis } => {
                write!(f, "step at {at:?} along axis {axis} is over a different field")
            }
            Violation::NonCommuting { at, axes } => write!(
                f,
                "square at {at:?} spanned by axes {} and {} does not commute",
                axes.0, axes.1
            ),
        }
    }
}

impl StepModule {
    /// Builds a module and checks every shape and commutativity invariant.
    pub fn new(field: Fp, grid: Grid, dims: Vec<usize>, steps: Vec<Vec<Option<Matrix>>>) -> Result<Self> {
        let m = StepModule::new_unchecked(field, grid, dims, steps);
        m.validate()
            .map_err(|v| Error::InvalidModule(format!("{v}")))?;
        Ok(m)
    }

    /// Builds a module without checking invariants; call [`validate`](Self::validate)
    /// before trusting the result.
    pub fn new_unchecked(field: Fp, grid: Grid, dims: Vec<usize>, steps: Vec<Vec<Option<Matrix>>>) -> Self {
        StepModule {
            field,
            grid,
            dims,
            steps,
        }
    }

    /// Builds a module from a step callback `(flat, axis, successor) -> matrix`.
    pub(crate) fn from_step_fn(
        field: Fp,
        grid: Grid,
        dims: Vec<usize>,
        mut step: impl FnMut(usize, usize, usize) -> Matrix,
    ) -> Self {
        let steps = (0..grid.n_axes())
            .map(|axis| {
                (0..grid.size())
                    .map(|flat| grid.successor(flat, axis).map(|succ| step(flat, axis, succ)))
                    .collect()
            })
            .collect();
        StepModule {
            field,
            grid,
            dims,
            steps,
        }
    }

    /// The zero module: a single grid point of dimension zero.
    pub fn zero(field: Fp, n_axes: usize) -> Self {
        let grid = Grid::origin(n_axes);
        StepModule::from_step_fn(field, grid, alloc::vec![0], |_, _, _| unreachable!())
    }

    /// `k` at every point of `grid` with identity steps. On a grid with
    /// lower corner `c` this is the free module generated at `c`.
    pub fn constant(field: Fp, grid: Grid) -> Self {
        let dims = alloc::vec![1; grid.size()];
        StepModule::from_step_fn(field, grid, dims, |_, _, _| Matrix::identity(field, 1))
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n_axes(&self) -> usize {
        self.grid.n_axes()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, flat: usize) -> usize {
        self.dims[flat]
    }

    /// Structure matrix from `flat` to its successor along `axis`.
    pub fn step(&self, flat: usize, axis: usize) -> Option<&Matrix> {
        self.steps[axis][flat].as_ref()
    }

    pub fn steps(&self) -> &[Vec<Option<Matrix>>] {
        &self.steps
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn max_dim(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(0)
    }

    pub fn validate(&self) -> core::result::Result<(), Violation> {
        let g = &self.grid;
        if self.dims.len() != g.size() {
            return Err(Violation::DimsLength {
                expected: g.size(),
                found: self.dims.len(),
            });
        }
        if self.steps.len() != g.n_axes() || self.steps.iter().any(|s| s.len() != g.size()) {
            return Err(Violation::MissingStep {
                at: alloc::vec![],
                axis: self.steps.len().min(g.n_axes()),
            });
        }
        for flat in 0..g.size() {
            for axis in 0..g.n_axes() {
                let at = || g.multi(flat);
                match (g.successor(flat, axis), &self.steps[axis][flat]) {
                    (None, None) => {}
                    (None, Some(_)) => return Err(Violation::ExtraStep { at: at(), axis }),
                    (Some(_), None) => return Err(Violation::MissingStep { at: at(), axis }),
                    (Some(succ), Some(m)) => {
                        let expected = (self.dims[succ], self.dims[flat]);
                        if m.shape() != expected {
                            return Err(Violation::StepShape {
                                at: at(),
                                axis,
                                expected,
                                found: m.shape(),
                            });
                        }
                        if m.field() != self.field {
                            return Err(Violation::WrongField { at: at(), axis });
                        }
                    }
                }
            }
        }
        for flat in 0..g.size() {
            for i in 0..g.n_axes() {
                for j in i + 1..g.n_axes() {
                    let (Some(gi), Some(gj)) = (g.successor(flat, i), g.successor(flat, j)) else {
                        continue;
                    };
                    let via_i = self.step(gi, j).unwrap().mul(self.step(flat, i).unwrap());
                    let via_j = self.step(gj, i).unwrap().mul(self.step(flat, j).unwrap());
                    if via_i != via_j {
                        return Err(Violation::NonCommuting {
                            at: g.multi(flat),
                            axes: (i, j),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Composite structure map between grid points `a ≤ b` (flat indices).
    pub fn path_map(&self, a: usize, b: usize) -> Matrix {
        let g = &self.grid;
        let (ma, mb) = (g.multi(a), g.multi(b));
        assert!(
            ma.iter().zip(&mb).all(|(x, y)| x <= y),
            "path_map needs comparable grid points"
        );
        let mut cur = a;
        let mut acc = Matrix::identity(self.field, self.dims[a]);
        for axis in 0..g.n_axes() {
            for _ in ma[axis]..mb[axis] {
                acc = self.step(cur, axis).unwrap().mul(&acc);
                cur += g.stride(axis);
            }
        }
        acc
    }

    /// `(dim Ṽ_s, anchor)` where the anchor is `sup{p ∈ grid : p ≤ s}`.
    pub fn evaluate(&self, s: &[Rat]) -> (usize, Option<Vec<usize>>) {
        match self.grid.anchor(s) {
            Some(a) => (self.dims[a], Some(self.grid.multi(a))),
            None => (0, None),
        }
    }

    /// Dimension of the extended module at a rational point.
    pub fn dim_at(&self, s: &[Rat]) -> usize {
        self.grid.anchor(s).map_or(0, |a| self.dims[a])
    }

    /// The structure map `Ṽ_s → Ṽ_t` of the extension. Requires the anchors
    /// of `s` and `t` to be comparable, which holds whenever `s ≤ t`.
    pub fn structure_map(&self, s: &[Rat], t: &[Rat]) -> Result<Matrix> {
        let (a, b) = (self.grid.anchor(s), self.grid.anchor(t));
        match (a, b) {
            (None, None) => Ok(Matrix::zeros(self.field, 0, 0)),
            (None, Some(b)) => Ok(Matrix::zeros(self.field, self.dims[b], 0)),
            (Some(a), Some(b)) if self.grid.leq(a, b) => Ok(self.path_map(a, b)),
            _ => Err(Error::NotComparable {
                from: s.to_vec(),
                to: t.to_vec(),
            }),
        }
    }

    /// Re-expresses the extension on another grid: the value at `q ∈ grid` is
    /// `Ṽ_q` and steps are the extension's structure maps.
    pub fn restrict_extend(&self, grid: &Grid) -> Result<StepModule> {
        if grid.n_axes() != self.n_axes() {
            return Err(Error::AxisMismatch {
                left: self.n_axes(),
                right: grid.n_axes(),
            });
        }
        if *grid == self.grid {
            return Ok(self.clone());
        }
        let anchors: Vec<Option<usize>> = grid.points().map(|q| self.grid.anchor(&q)).collect();
        let dims = anchors.iter().map(|a| a.map_or(0, |a| self.dims[a])).collect();
        let field = self.field;
        Ok(StepModule::from_step_fn(field, grid.clone(), dims, |flat, _, succ| {
            match (anchors[flat], anchors[succ]) {
                (Some(a), Some(b)) => self.path_map(a, b),
                (None, Some(b)) => Matrix::zeros(field, self.dims[b], 0),
                (None, None) => Matrix::zeros(field, 0, 0),
                (Some(_), None) => unreachable!("anchors are monotone"),
            }
        }))
    }

    /// Same extension, same data, on a grid translated by `-eps`:
    /// `V[eps]_s = V_{s+eps}`.
    pub fn shifted(&self, eps: Rat) -> StepModule {
        StepModule {
            field: self.field,
            grid: self.grid.shifted(eps),
            dims: self.dims.clone(),
            steps: self.steps.clone(),
        }
    }

    /// True when both modules have equal data after refining to the union of
    /// their grids, i.e. they define the same extension with the same bases.
    pub fn same_extension(&self, other: &StepModule) -> bool {
        if self.field != other.field || self.n_axes() != other.n_axes() {
            return false;
        }
        if self.grid == other.grid {
            return self == other;
        }
        let Ok(u) = self.grid.union(&other.grid) else {
            return false;
        };
        match (self.restrict_extend(&u), other.restrict_extend(&u)) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }

    /// Pointwise direct sum with block-diagonal steps, on the union grid.
    pub fn direct_sum(&self, other: &StepModule) -> Result<StepModule> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.p(),
                right: other.field.p(),
            });
        }
        let u = self.grid.union(&other.grid)?;
        let a = self.restrict_extend(&u)?;
        let b = other.restrict_extend(&u)?;
        let dims = a.dims.iter().zip(&b.dims).map(|(x, y)| x + y).collect();
        Ok(StepModule::from_step_fn(self.field, u, dims, |flat, axis, _| {
            a.step(flat, axis).unwrap().block_diag(b.step(flat, axis).unwrap())
        }))
    }

    pub fn direct_sum_all<'a>(modules: impl IntoIterator<Item = &'a StepModule>) -> Result<StepModule> {
        let mut it = modules.into_iter();
        let first = it
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty direct sum".into()))?
            .clone();
        it.try_fold(first, |acc, m| acc.direct_sum(m))
    }

    /// Dims listed as `(multi-index, dim)` for reporting.
    pub fn dim_table(&self) -> Vec<(Vec<usize>, usize)> {
        (0..self.grid.size())
            .map(|f| (self.grid.multi(f), self.dims[f]))
            .collect()
    }

    /// Short human-readable summary.
    pub fn summary(&self) -> String {
        format!(
            "F_{} module on {:?} grid, total dim {}",
            self.field.p(),
            self.grid.shape(),
            self.total_dim()
        )
    }
}

//! Finite product grids with exact rational coordinates.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rational::Rat;

/// A finite grid `A_1 × … × A_n ⊂ Q^n`, each axis strictly increasing.
///
/// Grid points are addressed either by a multi-index or by a flat row-major
/// index (last axis fastest).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grid {
    axes: Vec<Vec<Rat>>,
    strides: Vec<usize>,
}

impl Grid {
    pub fn new(axes: Vec<Vec<Rat>>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidGrid("a grid needs at least one axis".into()));
        }
        for (i, a) in axes.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::InvalidGrid(format!("axis {i} is empty")));
            }
            if a.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidGrid(format!(
                    "axis {i} is not strictly increasing"
                )));
            }
        }
        let mut strides = alloc::vec![1; axes.len()];
        for i in (0..axes.len() - 1).rev() {
            strides[i] = strides[i + 1] * axes[i + 1].len();
        }
        Ok(Grid { axes, strides })
    }

    /// Builds a grid from arbitrary per-axis coordinate lists, sorting and
    /// deduplicating them.
    pub fn from_unsorted(mut axes: Vec<Vec<Rat>>) -> Result<Self> {
        for a in axes.iter_mut() {
            a.sort();
            a.dedup();
        }
        Grid::new(axes)
    }

    /// The same coordinate list on each of `n` axes.
    pub fn uniform(n: usize, coords: &[Rat]) -> Result<Self> {
        Grid::new((0..n).map(|_| coords.to_vec()).collect())
    }

    /// `{0, 1, …, k−1}^n`.
    pub fn integer_box(n: usize, k: i64) -> Self {
        let coords: Vec<Rat> = (0..k).map(Rat::from_integer).collect();
        Grid::uniform(n, &coords).expect("nonempty integer axis")
    }

    /// The single-point grid used for the zero module.
    pub fn origin(n: usize) -> Self {
        Grid::uniform(n, &[Rat::from_integer(0)]).expect("one point per axis")
    }

    /// `stepZ^n` intersected with the box `[lo, hi]` (per axis, inclusive),
    /// after snapping the box outward to multiples of `step`.
    pub fn regular(step: Rat, lo: &[Rat], hi: &[Rat]) -> Result<Self> {
        if step <= Rat::from_integer(0) {
            return Err(Error::InvalidArgument("grid step must be positive".into()));
        }
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::InvalidArgument("box corners disagree in length".into()));
        }
        let axes = lo
            .iter()
            .zip(hi)
            .map(|(&l, &h)| {
                let a = (l / step).floor().to_integer();
                let b = (h / step).ceil().to_integer().max(a);
                (a..=b).map(|k| step * Rat::from_integer(k)).collect()
            })
            .collect();
        Grid::new(axes)
    }

    pub fn n_axes(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Vec<Rat>] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &[Rat] {
        &self.axes[i]
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Vec::len).collect()
    }

    /// Number of grid points.
    pub fn size(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn multi(&self, mut flat: usize) -> Vec<usize> {
        let mut out = alloc::vec![0; self.axes.len()];
        for (i, s) in self.strides.iter().enumerate() {
            out[i] = flat / s;
            flat %= s;
        }
        out
    }

    /// Coordinates of the grid point with flat index `flat`.
    pub fn point(&self, flat: usize) -> Vec<Rat> {
        self.multi(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.axes[a][i])
            .collect()
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<Rat>> + '_ {
        (0..self.size()).map(|f| self.point(f))
    }

    /// Flat index of the neighbour one step up along `axis`, if any.
    pub fn successor(&self, flat: usize, axis: usize) -> Option<usize> {
        let i = (flat / self.strides[axis]) % self.axes[axis].len();
        (i + 1 < self.axes[axis].len()).then(|| flat + self.strides[axis])
    }

    pub fn predecessor(&self, flat: usize, axis: usize) -> Option<usize> {
        let i = (flat / self.strides[axis]) % self.axes[axis].len();
        (i > 0).then(|| flat - self.strides[axis])
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    /// Largest coordinate on `axis` that is `≤ x`.
    pub fn axis_anchor(&self, axis: usize, x: &Rat) -> Option<usize> {
        let a = &self.axes[axis];
        let n = a.partition_point(|c| c <= x);
        n.checked_sub(1)
    }

    /// `sup{p ∈ grid : p ≤ s}` as a flat index, or `None` when no grid point
    /// lies below `s`.
    pub fn anchor(&self, s: &[Rat]) -> Option<usize> {
        debug_assert_eq!(s.len(), self.n_axes());
        let mut flat = 0;
        for (axis, x) in s.iter().enumerate() {
            flat += self.axis_anchor(axis, x)? * self.strides[axis];
        }
        Some(flat)
    }

    /// Translates every coordinate by `-eps`.
    pub fn shifted(&self, eps: Rat) -> Grid {
        Grid {
            axes: self
                .axes
                .iter()
                .map(|a| a.iter().map(|&c| c - eps).collect())
                .collect(),
            strides: self.strides.clone(),
        }
    }

    /// Axiswise union of coordinates.
    pub fn union(&self, other: &Grid) -> Result<Grid> {
        if self.n_axes() != other.n_axes() {
            return Err(Error::AxisMismatch {
                left: self.n_axes(),
                right: other.n_axes(),
            });
        }
        if self == other {
            return Ok(self.clone());
        }
        let axes = self
            .axes
            .iter()
            .zip(&other.axes)
            .map(|(a, b)| merge_sorted(a, b))
            .collect();
        Grid::new(axes)
    }

    pub fn union_all<'a>(grids: impl IntoIterator<Item = &'a Grid>) -> Result<Grid> {
        let mut it = grids.into_iter();
        let first = it
            .next()
            .ok_or_else(|| Error::InvalidArgument("union of no grids".into()))?
            .clone();
        it.try_fold(first, |acc, g| acc.union(g))
    }

    /// True when every coordinate of `other` is a coordinate of `self`.
    pub fn refines(&self, other: &Grid) -> bool {
        self.n_axes() == other.n_axes()
            && self
                .axes
                .iter()
                .zip(&other.axes)
                .all(|(a, b)| b.iter().all(|c| a.binary_search(c).is_ok()))
    }

    /// Smallest gap between consecutive coordinates over all axes, if any
    /// axis has two or more coordinates.
    pub fn min_gap(&self) -> Option<Rat> {
        self.gaps().min()
    }

    pub fn max_gap(&self) -> Option<Rat> {
        self.gaps().max()
    }

    fn gaps(&self) -> impl Iterator<Item = Rat> + '_ {
        self.axes
            .iter()
            .flat_map(|a| a.windows(2).map(|w| w[1] - w[0]))
    }

    pub fn lower_corner(&self) -> Vec<Rat> {
        self.axes.iter().map(|a| a[0]).collect()
    }

    pub fn upper_corner(&self) -> Vec<Rat> {
        self.axes.iter().map(|a| *a.last().unwrap()).collect()
    }

    /// Componentwise `a ≤ b` on flat indices.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        let (ma, mb) = (self.multi(a), self.multi(b));
        ma.iter().zip(&mb).all(|(x, y)| x <= y)
    }
}

fn merge_sorted(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x < y => {
                i += 1;
                *x
            }
            (Some(x), Some(y)) if y < x => {
                j += 1;
                *y
            }
            (Some(x), Some(_)) => {
                i += 1;
                j += 1;
                *x
            }
            (Some(x), None) => {
                i += 1;
                *x
            }
            (None, Some(y)) => {
                j += 1;
                *y
            }
            (None, None) => unreachable!(),
        };
        out.push(next);
    }
    out
}

/// Componentwise `a ≤ b` on rational points.
pub fn point_leq(a: &[Rat], b: &[Rat]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// `s + eps·(1,…,1)`.
pub fn translate(s: &[Rat], eps: Rat) -> Vec<Rat> {
    s.iter().map(|&x| x + eps).collect()
}

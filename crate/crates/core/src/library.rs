//! Named modules and random generators used by tests, examples and the
//! experiments.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::factor::quotient;
use crate::field::Fp;
use crate::grid::Grid;
use crate::matrix::Matrix;
use crate::rational::Rat;
use crate::stepmodule::StepModule;

fn from_table(
    field: Fp,
    grid: Grid,
    dims: Vec<usize>,
    step: impl FnMut(usize, usize, usize) -> Matrix,
) -> Result<StepModule> {
    let m = StepModule::from_step_fn(field, grid, dims, step);
    m.validate().map_err(|v| Error::InvalidModule(alloc::format!("{v}")))?;
    Ok(m)
}

/// `M_λ` on the grid `{0,1,2,3}²`: four lines in a plane, the fourth
/// spanned by `(1, λ)`. Pairwise non-isomorphic for distinct nonzero `λ`.
pub fn lambda_module(field: Fp, lambda: u32) -> Result<StepModule> {
    let grid = Grid::integer_box(2, 4);
    let dim_of = |x: usize, y: usize| -> usize {
        match (x, y) {
            (0, 3) | (1, 2) | (2, 1) | (3, 0) => 1,
            _ if x + y >= 4 => 2,
            _ => 0,
        }
    };
    let dims: Vec<usize> = (0..grid.size())
        .map(|f| {
            let m = grid.multi(f);
            dim_of(m[0], m[1])
        })
        .collect();
    let col = |a: i64, b: i64| Matrix::from_rows(field, &[alloc::vec![a], alloc::vec![b]]).unwrap();
    let lam = lambda as i64;
    from_table(field, grid.clone(), dims.clone(), |x, _axis, y| {
        let (a, b) = (grid.multi(x), grid.multi(y));
        let (dx, dy) = (dims[x], dims[y]);
        match (dx, dy) {
            (0, _) | (_, 0) => Matrix::zeros(field, dy, dx),
            (2, 2) => Matrix::identity(field, 2),
            (1, 2) => match (a[0], a[1], b[0], b[1]) {
                (0, 3, _, _) => col(0, 1),
                (1, 2, _, _) => col(1, 0),
                (2, 1, _, _) => col(1, 1),
                (3, 0, _, _) => col(1, lam),
                _ => unreachable!(),
            },
            _ => unreachable!("no 2 → 1 steps in M_λ"),
        }
    })
}

/// The module `k` on the box `[lo, hi)` (an unbounded side where `hi` is
/// `None`), on the grid spanned by the box corners.
pub fn rectangle(field: Fp, lo: &[Rat], hi: &[Option<Rat>]) -> Result<StepModule> {
    if lo.len() != hi.len() || lo.is_empty() {
        return Err(Error::InvalidArgument("rectangle corners disagree".into()));
    }
    let mut axes = Vec::with_capacity(lo.len());
    for (l, h) in lo.iter().zip(hi) {
        match h {
            Some(h) if h <= l => return Err(Error::InvalidArgument("empty rectangle".into())),
            Some(h) => axes.push(alloc::vec![*l, *h]),
            None => axes.push(alloc::vec![*l]),
        }
    }
    let grid = Grid::new(axes)?;
    let dims = (0..grid.size())
        .map(|f| usize::from(grid.multi(f).iter().all(|&i| i == 0)))
        .collect::<Vec<_>>();
    from_table(field, grid, dims.clone(), |x, _, y| Matrix::zeros(field, dims[y], dims[x]))
}

/// A single closed-open cell `[at, at + width)^n`.
pub fn single_cell(field: Fp, at: &[Rat], width: Rat) -> Result<StepModule> {
    let hi: Vec<Option<Rat>> = at.iter().map(|&a| Some(a + width)).collect();
    rectangle(field, at, &hi)
}

/// The free module generated at `at`.
pub fn free(field: Fp, at: &[Rat]) -> Result<StepModule> {
    rectangle(field, at, &alloc::vec![None; at.len()])
}

/// An interval module on `grid`: `k` at the grid points satisfying
/// `support`, identity steps between them. The support must be convex and
/// connected for the result to be an interval.
pub fn interval(field: Fp, grid: Grid, support: impl Fn(&[usize]) -> bool) -> Result<StepModule> {
    let dims: Vec<usize> = (0..grid.size()).map(|f| usize::from(support(&grid.multi(f)))).collect();
    from_table(field, grid, dims.clone(), |x, _, y| {
        if dims[x] == 1 && dims[y] == 1 {
            Matrix::identity(field, 1)
        } else {
            Matrix::zeros(field, dims[y], dims[x])
        }
    })
}

/// Three generators at `(0,2)`, `(1,1)`, `(2,0)` on `{0,1,2}²` whose
/// images are the three lines `e₁`, `e₂`, `e₁+e₂` of a plane at `(2,2)`.
pub fn three_lines(field: Fp) -> Result<StepModule> {
    let grid = Grid::integer_box(2, 3);
    let dim_of = |x: usize, y: usize| match (x, y) {
        (0, 2) | (1, 1) | (2, 0) => 1,
        (1, 2) | (2, 1) | (2, 2) => 2,
        _ => 0,
    };
    let dims: Vec<usize> = (0..grid.size())
        .map(|f| {
            let m = grid.multi(f);
            dim_of(m[0], m[1])
        })
        .collect();
    let col = |a: i64, b: i64| Matrix::from_rows(field, &[alloc::vec![a], alloc::vec![b]]).unwrap();
    from_table(field, grid.clone(), dims.clone(), |x, axis, y| {
        let a = grid.multi(x);
        match (a[0], a[1], axis) {
            (0, 2, 0) => col(1, 0),
            (1, 1, 1) => col(0, 1),
            (1, 1, 0) => col(1, 0),
            (2, 0, 1) => col(0, 1),
            (1, 2, 0) => Matrix::identity(field, 2),
            (2, 1, 1) => Matrix::from_rows(field, &[alloc::vec![0, 1], alloc::vec![1, 1]]).unwrap(),
            _ => Matrix::zeros(field, dims[y], dims[x]),
        }
    })
}

/// Indecomposables on `{0,1,2}²` used to build Krull–Schmidt test sums.
pub fn grid3_indecomposables(field: Fp) -> Result<Vec<StepModule>> {
    let g = Grid::integer_box(2, 3);
    let two = Rat::from_integer(2);
    let i = |n: i64| Rat::from_integer(n);
    let on_g = |m: StepModule| m.restrict_extend(&g);
    Ok(alloc::vec![
        on_g(free(field, &[i(0), i(0)])?)?,
        on_g(free(field, &[i(1), i(0)])?)?,
        on_g(rectangle(field, &[i(0), i(0)], &[Some(i(1)), Some(two)])?)?,
        on_g(rectangle(field, &[i(1), i(1)], &[Some(two), None])?)?,
        on_g(single_cell(field, &[i(2), i(2)], i(1))?)?,
        interval(field, g.clone(), |m| m[0] + m[1] >= 1)?,
        interval(field, g.clone(), |m| m[0] + m[1] >= 1 && m[0] + m[1] <= 3)?,
        three_lines(field)?,
    ])
}

/// Sorted distinct rationals in `[0, 4]` with denominators in `{1, 2, 3, 4}`.
pub fn random_axis(rng: &mut impl Rng, len: usize) -> Vec<Rat> {
    let mut out: Vec<Rat> = Vec::new();
    while out.len() < len {
        let den = rng.random_range(1..=4i64);
        let num = rng.random_range(0..=4 * den);
        let r = Rat::new(num, den);
        if !out.contains(&r) {
            out.push(r);
        }
    }
    out.sort();
    out
}

/// A random finitely presented module on a random rational grid in
/// `[0, 4]²`: free generators at random grid points modulo random relations.
pub fn random_presented(rng: &mut impl Rng, field: Fp) -> Result<StepModule> {
    let axes = (0..2)
        .map(|_| {
            let len = rng.random_range(2..=4usize);
            random_axis(rng, len)
        })
        .collect();
    let grid = Grid::new(axes)?;
    let n_gens = rng.random_range(1..=3usize);
    let n_rels = rng.random_range(0..=2usize);
    random_presented_on(rng, field, &grid, n_gens, n_rels)
}

pub fn random_presented_on(
    rng: &mut impl Rng,
    field: Fp,
    grid: &Grid,
    n_gens: usize,
    n_rels: usize,
) -> Result<StepModule> {
    let p = field.p();
    let gens: Vec<usize> = (0..n_gens).map(|_| rng.random_range(0..grid.size())).collect();
    // relations: (position, coefficient vector over generators)
    let mut rels: Vec<(usize, Vec<u32>)> = Vec::new();
    for _ in 0..n_rels {
        let at = rng.random_range(0..grid.size());
        let coeffs = gens
            .iter()
            .map(|&g| if grid.leq(g, at) { rng.random_range(0..p) } else { 0 })
            .collect();
        rels.push((at, coeffs));
    }
    presented(field, grid, &gens, &rels)
}

/// The cokernel of `⊕ free(rel) → ⊕ free(gen)`. Relations are coefficient
/// vectors over the generators; only generators below the relation may
/// appear.
pub fn presented(field: Fp, grid: &Grid, gens: &[usize], rels: &[(usize, Vec<u32>)]) -> Result<StepModule> {
    let active = |x: usize| -> Vec<usize> { (0..gens.len()).filter(|&i| grid.leq(gens[i], x)).collect() };
    let dims: Vec<usize> = (0..grid.size()).map(|x| active(x).len()).collect();
    let free_sum = StepModule::from_step_fn(field, grid.clone(), dims, |x, _, y| {
        let (ax, ay) = (active(x), active(y));
        Matrix::from_fn(field, ay.len(), ax.len(), |r, c| u32::from(ay[r] == ax[c]))
    });
    let mut bases = Vec::with_capacity(grid.size());
    for x in 0..grid.size() {
        let ax = active(x);
        let mut cols: Vec<Vec<u32>> = Vec::new();
        for (at, coeffs) in rels {
            if !grid.leq(*at, x) {
                continue;
            }
            if coeffs.iter().enumerate().any(|(i, &c)| c != 0 && !grid.leq(gens[i], *at)) {
                return Err(Error::InvalidArgument("relation uses a generator above it".into()));
            }
            cols.push(ax.iter().map(|&i| coeffs[i] % field.p()).collect());
        }
        let m = Matrix::from_fn(field, ax.len(), cols.len(), |r, c| cols[c][r]);
        bases.push(m.column_basis());
    }
    Ok(quotient(&free_sum, &bases)?.0)
}

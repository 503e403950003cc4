//! Bases of morphism spaces `Hom(V, W)` by solving the naturality equations.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::morphism::Morphism;
use crate::stepmodule::StepModule;

/// A basis of `Hom(v, w)` for modules on a common grid.
///
/// The unknowns are the entries of every component matrix; each unit step
/// contributes the equations `C_{g⁺}·V_step − W_step·C_g = 0`.
pub fn hom_basis(v: &StepModule, w: &StepModule) -> Result<Vec<Morphism>> {
    if v.grid() != w.grid() {
        return Err(Error::GridMismatch);
    }
    if v.field() != w.field() {
        return Err(Error::FieldMismatch {
            left: v.field().p(),
            right: w.field().p(),
        });
    }
    let field = v.field();
    let g = v.grid();
    let mut offsets = Vec::with_capacity(g.size() + 1);
    let mut total = 0;
    for x in 0..g.size() {
        offsets.push(total);
        total += v.dim(x) * w.dim(x);
    }
    offsets.push(total);
    if total == 0 {
        return Ok(Vec::new());
    }

    let mut rows: Vec<u32> = Vec::new();
    let mut n_rows = 0;
    for x in 0..g.size() {
        for axis in 0..g.n_axes() {
            let Some(y) = g.successor(x, axis) else { continue };
            let a = v.step(x, axis).unwrap();
            let b = w.step(x, axis).unwrap();
            let (dvx, dvy, dwx, dwy) = (v.dim(x), v.dim(y), w.dim(x), w.dim(y));
            for r in 0..dwy {
                for c in 0..dvx {
                    let mut row = alloc::vec![0u32; total];
                    let mut nonzero = false;
                    for k in 0..dvy {
                        let coef = a.get(k, c);
                        if coef != 0 {
                            row[offsets[y] + r * dvy + k] = coef;
                            nonzero = true;
                        }
                    }
                    for k in 0..dwx {
                        let coef = b.get(r, k);
                        if coef != 0 {
                            let idx = offsets[x] + k * dvx + c;
                            row[idx] = field.sub(row[idx], coef);
                            nonzero = true;
                        }
                    }
                    if nonzero {
                        rows.extend_from_slice(&row);
                        n_rows += 1;
                    }
                }
            }
        }
    }
    let eqs = Matrix::from_vec(field, n_rows, total, rows)?;
    let kernel = eqs.kernel_basis();
    let mut basis = Vec::with_capacity(kernel.cols());
    for j in 0..kernel.cols() {
        let comps = (0..g.size())
            .map(|x| {
                Matrix::from_fn(field, w.dim(x), v.dim(x), |r, c| {
                    kernel.get(offsets[x] + r * v.dim(x) + c, j)
                })
            })
            .collect();
        basis.push(Morphism::new_unchecked(v.clone(), w.clone(), comps)?);
    }
    Ok(basis)
}

/// [`hom_basis`] after refining both modules to the union of their grids.
pub fn hom_basis_refined(v: &StepModule, w: &StepModule) -> Result<Vec<Morphism>> {
    let u = v.grid().union(w.grid())?;
    hom_basis(&v.restrict_extend(&u)?, &w.restrict_extend(&u)?)
}

/// Coordinates of `m` in the given Hom basis, if it lies in their span.
pub fn coordinates(basis: &[Morphism], m: &Morphism) -> Result<Option<Vec<u32>>> {
    let field = m.source().field();
    let target = m.to_vector();
    if basis.is_empty() {
        return Ok(target.iter().all(|&x| x == 0).then(Vec::new));
    }
    let cols: Vec<Vec<u32>> = basis.iter().map(Morphism::to_vector).collect();
    let a = Matrix::from_fn(field, target.len(), cols.len(), |i, j| cols[j][i]);
    let b = Matrix::column(field, &target);
    Ok(a.solve(&b)?.map(|x| x.col(0)))
}

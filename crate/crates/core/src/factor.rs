//! Kernels, images and cokernels of morphisms, computed pointwise.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::morphism::Morphism;
use crate::stepmodule::StepModule;

/// The canonical factorization of `f: V → W`.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub kernel: StepModule,
    pub image: StepModule,
    pub cokernel: StepModule,
    /// `ker f ↪ V`
    pub kernel_inclusion: Morphism,
    /// `V ↠ im f`
    pub coimage: Morphism,
    /// `im f ↪ W`
    pub image_inclusion: Morphism,
    /// `W ↠ cok f`
    pub cokernel_projection: Morphism,
}

/// The submodule of `v` spanned pointwise by the columns of `bases[x]`,
/// with its inclusion. Fails if the subspaces are not carried into each
/// other by the steps.
pub fn submodule(v: &StepModule, bases: Vec<Matrix>) -> Result<(StepModule, Morphism)> {
    let g = v.grid();
    let field = v.field();
    if bases.len() != g.size() || bases.iter().enumerate().any(|(x, b)| b.rows() != v.dim(x)) {
        return Err(Error::DimensionMismatch { context: "submodule bases" });
    }
    let dims: Vec<usize> = bases.iter().map(Matrix::cols).collect();
    let mut steps = Vec::with_capacity(g.n_axes());
    for axis in 0..g.n_axes() {
        let mut col = Vec::with_capacity(g.size());
        for x in 0..g.size() {
            col.push(match g.successor(x, axis) {
                None => None,
                Some(y) => {
                    let image = v.step(x, axis).unwrap().mul(&bases[x]);
                    let m = bases[y]
                        .solve(&image)?
                        .ok_or_else(|| Error::InvalidArgument("subspaces are not step-invariant".into()))?;
                    Some(m)
                }
            });
        }
        steps.push(col);
    }
    let sub = StepModule::new_unchecked(field, g.clone(), dims, steps);
    let incl = Morphism::new_unchecked(sub.clone(), v.clone(), bases)?;
    Ok((sub, incl))
}

/// The quotient of `v` by the pointwise subspaces spanned by `bases[x]`
/// (independent columns, step-invariant), with its projection.
pub fn quotient(v: &StepModule, bases: &[Matrix]) -> Result<(StepModule, Morphism)> {
    let g = v.grid();
    let field = v.field();
    let mut complements = Vec::with_capacity(g.size());
    let mut projections = Vec::with_capacity(g.size());
    for (x, b) in bases.iter().enumerate() {
        let c = b.complement_basis();
        let full = b.hstack(&c);
        let inv = full
            .inverse()
            .ok_or_else(|| Error::InvalidArgument("quotient basis columns are dependent".into()))?;
        let rows: Vec<usize> = (b.cols()..v.dim(x)).collect();
        projections.push(inv.select_rows(&rows));
        complements.push(c);
    }
    let dims: Vec<usize> = complements.iter().map(Matrix::cols).collect();
    let quot = StepModule::from_step_fn(field, g.clone(), dims, |x, axis, y| {
        projections[y].mul(v.step(x, axis).unwrap()).mul(&complements[x])
    });
    let proj = Morphism::new_unchecked(v.clone(), quot.clone(), projections)?;
    Ok((quot, proj))
}

/// Pointwise kernel, image and cokernel of `m` with their canonical maps.
pub fn factor_morphism(m: &Morphism) -> Result<Factorization> {
    let v = m.source();
    let w = m.target();
    let kernel_bases: Vec<Matrix> = m.comps().iter().map(Matrix::kernel_basis).collect();
    let image_bases: Vec<Matrix> = m.comps().iter().map(Matrix::column_basis).collect();
    let (kernel, kernel_inclusion) = submodule(v, kernel_bases)?;
    let (image, image_inclusion) = submodule(w, image_bases.clone())?;
    let coimage_comps = m
        .comps()
        .iter()
        .zip(&image_bases)
        .map(|(c, b)| b.solve(c).map(|x| x.expect("image contains the columns")))
        .collect::<Result<Vec<_>>>()?;
    let coimage = Morphism::new_unchecked(v.clone(), image.clone(), coimage_comps)?;
    let (cokernel, cokernel_projection) = quotient(w, &image_bases)?;
    Ok(Factorization {
        kernel,
        image,
        cokernel,
        kernel_inclusion,
        coimage,
        image_inclusion,
        cokernel_projection,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;
    use crate::grid::Grid;

    #[test]
    fn identity_and_zero_factorizations() {
        let f = Fp::new(3).unwrap();
        let v = StepModule::constant(f, Grid::integer_box(2, 2));
        let fac = factor_morphism(&Morphism::identity(&v)).unwrap();
        assert!(fac.kernel.is_zero() && fac.cokernel.is_zero());
        assert_eq!(fac.image.dims(), v.dims());
        let fac = factor_morphism(&Morphism::zero(&v, &v).unwrap()).unwrap();
        assert!(fac.image.is_zero());
        assert_eq!(fac.kernel.dims(), v.dims());
        assert_eq!(fac.cokernel.dims(), v.dims());
        assert!(fac.kernel.validate().is_ok() && fac.cokernel.validate().is_ok());
    }
}

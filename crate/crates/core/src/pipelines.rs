//! Simplicial complexes, sublevel and Degree-Rips bifiltrations, and their
//! homology as step modules.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::Fp;
use crate::grid::{point_leq, Grid};
use crate::matrix::Matrix;
use crate::rational::Rat;
use crate::stepmodule::StepModule;

/// Simplices are sorted vertex lists, closed under taking faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    n_vertices: usize,
    simplices: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    /// Validates sortedness, vertex range, uniqueness and face closure.
    pub fn new(n_vertices: usize, simplices: Vec<Vec<usize>>) -> Result<Self> {
        let set: BTreeSet<Vec<usize>> = simplices.iter().cloned().collect();
        if set.len() != simplices.len() {
            return Err(Error::InvalidArgument("duplicate simplex".into()));
        }
        for s in &simplices {
            if s.is_empty() || s.windows(2).any(|w| w[0] >= w[1]) || s.iter().any(|&v| v >= n_vertices) {
                return Err(Error::InvalidArgument(alloc::format!("bad simplex {s:?}")));
            }
            if s.len() > 1 {
                for i in 0..s.len() {
                    let mut face = s.clone();
                    face.remove(i);
                    if !set.contains(&face) {
                        return Err(Error::InvalidArgument(alloc::format!("face {face:?} of {s:?} missing")));
                    }
                }
            }
        }
        Ok(SimplicialComplex { n_vertices, simplices })
    }

    /// The closure of the given simplices under faces, ordered by dimension
    /// and then lexicographically.
    pub fn from_facets(n_vertices: usize, facets: &[Vec<usize>]) -> Result<Self> {
        let mut set: BTreeSet<Vec<usize>> = BTreeSet::new();
        for f in facets {
            let mut f = f.clone();
            f.sort();
            f.dedup();
            let k = f.len();
            for mask in 1u64..(1u64 << k) {
                set.insert((0..k).filter(|&i| mask >> i & 1 == 1).map(|i| f[i]).collect());
            }
        }
        for v in 0..n_vertices {
            set.insert(alloc::vec![v]);
        }
        let mut simplices: Vec<Vec<usize>> = set.into_iter().collect();
        simplices.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        SimplicialComplex::new(n_vertices, simplices)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    /// Indices of the `k`-simplices.
    pub fn of_dim(&self, k: usize) -> Vec<usize> {
        (0..self.simplices.len())
            .filter(|&i| self.simplices[i].len() == k + 1)
            .collect()
    }

    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        self.simplices.iter().position(|t| t == s)
    }
}

/// A complex with a finite set of minimal grades per simplex; the simplex
/// is present at `s` when some grade is `≤ s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bifiltration {
    pub complex: SimplicialComplex,
    pub n_params: usize,
    pub grades: Vec<Vec<Vec<Rat>>>,
}

impl Bifiltration {
    pub fn new(complex: SimplicialComplex, n_params: usize, grades: Vec<Vec<Vec<Rat>>>) -> Result<Self> {
        if grades.len() != complex.simplices.len() || grades.iter().flatten().any(|g| g.len() != n_params) {
            return Err(Error::InvalidArgument("grade list does not match the complex".into()));
        }
        let b = Bifiltration {
            complex,
            n_params,
            grades,
        };
        if let Some((face, coface)) = b.monotonicity_violation() {
            return Err(Error::InvalidArgument(alloc::format!(
                "simplex {coface:?} appears before its face {face:?}"
            )));
        }
        Ok(b)
    }

    pub fn present(&self, simplex: usize, s: &[Rat]) -> bool {
        self.grades[simplex].iter().any(|g| point_leq(g, s))
    }

    /// A face present strictly later than a simplex containing it.
    pub fn monotonicity_violation(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        for (i, s) in self.complex.simplices.iter().enumerate() {
            if s.len() < 2 {
                continue;
            }
            for j in 0..s.len() {
                let mut face = s.clone();
                face.remove(j);
                let fi = self.complex.index_of(&face)?;
                if self.grades[i].iter().any(|g| !self.present(fi, g)) {
                    return Some((face, s.clone()));
                }
            }
        }
        None
    }

    /// The grid of all grade coordinates.
    pub fn grade_grid(&self) -> Result<Grid> {
        let mut axes = alloc::vec![Vec::new(); self.n_params];
        for g in self.grades.iter().flatten() {
            for (a, x) in g.iter().enumerate() {
                axes[a].push(*x);
            }
        }
        for a in axes.iter_mut() {
            a.sort();
            a.dedup();
        }
        Grid::new(axes)
    }

    /// Whether `grid` resolves every grade, so that homology on the grid
    /// extends to homology at every parameter.
    pub fn covered_by(&self, grid: &Grid) -> bool {
        self.grade_grid().is_ok_and(|g| grid.refines(&g))
    }
}

/// Pseudometric on `n` points with exact rational distances.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMetricSpace {
    distances: Vec<Vec<Rat>>,
}

impl FiniteMetricSpace {
    pub fn new(distances: Vec<Vec<Rat>>) -> Result<Self> {
        let n = distances.len();
        let zero = Rat::from_integer(0);
        for (i, row) in distances.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidArgument("distance matrix is not square".into()));
            }
            if row[i] != zero {
                return Err(Error::InvalidArgument("nonzero diagonal".into()));
            }
            for (j, d) in row.iter().enumerate() {
                if *d < zero || *d != distances[j][i] {
                    return Err(Error::InvalidArgument("distances must be symmetric and nonnegative".into()));
                }
            }
        }
        Ok(FiniteMetricSpace { distances })
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> Rat {
        self.distances[i][j]
    }

    pub fn distances(&self) -> &[Vec<Rat>] {
        &self.distances
    }

    /// Triples violating the triangle inequality (allowed, but reported).
    pub fn triangle_violations(&self) -> usize {
        let n = self.len();
        let mut count = 0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.distances[i][k] > self.distances[i][j] + self.distances[j][k] {
                        count += 1;
                    }
                }
            }
        }
        count
    }
}

/// Lower-star grades: each simplex at the componentwise maximum of its
/// vertex values.
pub fn sublevel_bifiltration(k: &SimplicialComplex, values: &[Vec<Rat>]) -> Result<Bifiltration> {
    if values.len() != k.n_vertices {
        return Err(Error::InvalidArgument("every vertex needs a value".into()));
    }
    let n = values.first().map_or(0, Vec::len);
    if n == 0 || values.iter().any(|v| v.len() != n) {
        return Err(Error::InvalidArgument("vertex values must share a positive length".into()));
    }
    let grades = k
        .simplices
        .iter()
        .map(|s| {
            let g = (0..n).map(|a| s.iter().map(|&v| values[v][a]).max().unwrap()).collect();
            alloc::vec![g]
        })
        .collect();
    Bifiltration::new(k.clone(), n, grades)
}

/// Degree-Rips on the parameter grid `radii × (−degrees)`.
///
/// A vertex is present at `(r, −k)` when at least `k` other points lie
/// within distance `r`; a simplex when all its vertices are present and its
/// diameter is at most `r`. Simplices up to dimension `max_dim` are built.
/// The degree axis is stored negated so that both axes increase.
pub fn degree_rips(m: &FiniteMetricSpace, radii: &[Rat], degrees: &[usize], max_dim: usize) -> Result<Bifiltration> {
    if radii.is_empty() || degrees.is_empty() {
        return Err(Error::InvalidArgument("radius and degree lists must be nonempty".into()));
    }
    let mut radii = radii.to_vec();
    radii.sort();
    radii.dedup();
    let mut degrees = degrees.to_vec();
    degrees.sort();
    degrees.dedup();
    let n = m.len();
    // k-th nearest other point, per vertex
    let kth: Vec<Vec<Rat>> = (0..n)
        .map(|v| {
            let mut d: Vec<Rat> = (0..n).filter(|&u| u != v).map(|u| m.distance(v, u)).collect();
            d.sort();
            d
        })
        .collect();
    let vertex_radius = |v: usize, k: usize| -> Option<Rat> {
        if k == 0 {
            Some(Rat::from_integer(0))
        } else {
            kth[v].get(k - 1).copied()
        }
    };
    let facets: Vec<Vec<usize>> = subsets(n, max_dim + 1);
    let complex = SimplicialComplex::from_facets(n, &facets)?;
    let mut grades = Vec::with_capacity(complex.simplices.len());
    for s in &complex.simplices {
        let mut diam = Rat::from_integer(0);
        for (i, &a) in s.iter().enumerate() {
            for &b in &s[i + 1..] {
                diam = diam.max(m.distance(a, b));
            }
        }
        let mut gs: Vec<Vec<Rat>> = Vec::new();
        for &k in &degrees {
            let need = s
                .iter()
                .map(|&v| vertex_radius(v, k))
                .try_fold(diam, |acc, r| r.map(|r| acc.max(r)));
            let Some(need) = need else { continue };
            let Some(&r) = radii.iter().find(|&&r| r >= need) else { continue };
            gs.push(alloc::vec![r, -Rat::from_integer(k as i64)]);
        }
        // keep minimal grades only
        let minimal: Vec<Vec<Rat>> = gs
            .iter()
            .filter(|g| !gs.iter().any(|h| h != *g && point_leq(h, g)))
            .cloned()
            .collect();
        grades.push(minimal);
    }
    Bifiltration::new(complex, 2, grades)
}

/// All nonempty subsets of `0..n` with at most `max_len` elements.
fn subsets(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut frontier: Vec<Vec<usize>> = (0..n).map(|v| alloc::vec![v]).collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for s in &frontier {
            if s.len() < max_len {
                for v in s.last().unwrap() + 1..n {
                    let mut t = s.clone();
                    t.push(v);
                    next.push(t);
                }
            }
        }
        out.extend(frontier);
        frontier = next;
    }
    out
}

/// Boundary matrix `∂_k` with rows indexed by the `(k−1)`-simplices `rows`
/// and columns by the `k`-simplices `cols`.
fn boundary(field: Fp, k: &SimplicialComplex, rows: &[usize], cols: &[usize]) -> Matrix {
    let mut m = Matrix::zeros(field, rows.len(), cols.len());
    for (c, &s) in cols.iter().enumerate() {
        let simplex = &k.simplices[s];
        if simplex.len() < 2 {
            continue;
        }
        for i in 0..simplex.len() {
            let mut face = simplex.clone();
            face.remove(i);
            let fi = k.index_of(&face).expect("closed under faces");
            if let Some(r) = rows.iter().position(|&x| x == fi) {
                let sign = if i % 2 == 0 { 1 } else { field.p() - 1 };
                m.set(r, c, sign % field.p());
            }
        }
    }
    m
}

/// Cycle representatives of a homology basis at one grade, as columns over
/// all `k`-simplices, and the boundary basis they complement.
struct GradeHomology {
    boundaries: Matrix,
    cycles: Matrix,
}

fn grade_homology(field: Fp, b: &Bifiltration, k: usize, at: &[Rat]) -> GradeHomology {
    let c = &b.complex;
    let all_k = c.of_dim(k);
    let present = |idx: &[usize]| -> Vec<usize> { idx.iter().copied().filter(|&i| b.present(i, at)).collect() };
    let pk = present(&all_k);
    let lift = |m: &Matrix, cols_of: &[usize]| -> Matrix {
        // re-index rows from `cols_of` positions to positions in `all_k`
        Matrix::from_fn(field, all_k.len(), m.cols(), |r, j| {
            cols_of.iter().position(|&x| x == all_k[r]).map_or(0, |p| m.get(p, j))
        })
    };
    let z = if k == 0 {
        Matrix::identity(field, pk.len())
    } else {
        let pkm1 = present(&c.of_dim(k - 1));
        boundary(field, c, &pkm1, &pk).kernel_basis()
    };
    let z = lift(&z, &pk);
    let pkp1 = present(&c.of_dim(k + 1));
    let bd = boundary(field, c, &all_k, &pkp1).column_basis();
    let stacked = bd.hstack(&z);
    let red = stacked.reduce();
    let chosen: Vec<usize> = red.pivots.iter().copied().filter(|&p| p >= bd.cols()).collect();
    GradeHomology {
        cycles: stacked.select_cols(&chosen),
        boundaries: bd,
    }
}

/// Source cycles written in the target's `[boundaries | cycles]` basis,
/// keeping the cycle coordinates. `None` if a source cycle is not a target
/// cycle.
fn induced(src: &GradeHomology, dst: &GradeHomology) -> Option<Matrix> {
    let basis = dst.boundaries.hstack(&dst.cycles);
    let nb = dst.boundaries.cols();
    let sol = basis.solve(&src.cycles).ok()??;
    Some(sol.select_rows(&(nb..basis.cols()).collect::<Vec<_>>()))
}

/// The map `H_k(X_s) → H_k(X_t)` induced by inclusion, in the same bases
/// that [`homology_module`] uses at `s` and `t`.
pub fn induced_map(b: &Bifiltration, k: usize, s: &[Rat], t: &[Rat], field: Fp) -> Result<Matrix> {
    if !crate::grid::point_leq(s, t) {
        return Err(Error::InvalidArgument("induced maps need s ≤ t".into()));
    }
    induced(&grade_homology(field, b, k, s), &grade_homology(field, b, k, t))
        .ok_or_else(|| Error::InvalidArgument("the bifiltration is not monotone between s and t".into()))
}

/// `H_k` of the bifiltration sampled on `grid`, with maps induced by
/// inclusion. Homology between grid points is only captured when the grid
/// resolves every grade (see [`Bifiltration::covered_by`]).
pub fn homology_module(b: &Bifiltration, k: usize, grid: &Grid, field: Fp) -> Result<StepModule> {
    if grid.n_axes() != b.n_params {
        return Err(Error::AxisMismatch {
            left: b.n_params,
            right: grid.n_axes(),
        });
    }
    let per: Vec<GradeHomology> = grid.points().map(|s| grade_homology(field, b, k, &s)).collect();
    let dims: Vec<usize> = per.iter().map(|h| h.cycles.cols()).collect();
    let mut failure = None;
    let m = StepModule::from_step_fn(field, grid.clone(), dims, |x, _, y| {
        induced(&per[x], &per[y]).unwrap_or_else(|| {
            failure = Some(x);
            Matrix::zeros(field, per[y].cycles.cols(), per[x].cycles.cols())
        })
    });
    if let Some(x) = failure {
        return Err(Error::InvalidArgument(alloc::format!(
            "cycles at {:?} are not cycles one step up; the bifiltration is not monotone",
            grid.multi(x)
        )));
    }
    m.validate().map_err(|v| Error::InvalidModule(alloc::format!("{v}")))?;
    Ok(m)
}

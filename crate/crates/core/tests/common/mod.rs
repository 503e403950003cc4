//! Test corpora and independent oracles.
#![allow(dead_code)]

use obspers_core::grid::Grid;
use obspers_core::hom::hom_basis;
use obspers_core::library::{random_presented, rectangle, single_cell};
use obspers_core::metric::{shifted_hom_basis, verify};
use obspers_core::morphism::Morphism;
use obspers_core::rational::{int, rat};
use obspers_core::search::all_vectors;
use obspers_core::{Fp, Matrix, Rat, StepModule};
use rand::{Rng, SeedableRng};
use obspers_core::grid::point_leq;
use obspers_core::pipelines::{homology_module, sublevel_bifiltration, FiniteMetricSpace, SimplicialComplex};
use obspers_core::stability::strictly_trivial;
use rand_chacha::ChaCha8Rng;

pub fn f2() -> Fp {
    Fp::new(2).unwrap()
}

/// 25 random presented modules over F_2 on random rational grids in [0,4]².
pub fn random_corpus(seed: u64, n: usize) -> Vec<StepModule> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_presented(&mut rng, f2()).unwrap()).collect()
}

/// Small F_2 modules whose shifted Hom spaces stay at most 3-dimensional.
pub fn small_corpus() -> Vec<StepModule> {
    let f = f2();
    vec![
        single_cell(f, &[int(0), int(0)], int(1)).unwrap(),
        single_cell(f, &[rat(1, 3), rat(1, 3)], int(1)).unwrap(),
        single_cell(f, &[int(0), int(0)], rat(1, 2)).unwrap(),
        rectangle(f, &[int(0), int(0)], &[Some(int(2)), Some(int(1))]).unwrap(),
        rectangle(f, &[int(0), rat(1, 2)], &[Some(int(1)), Some(int(2))]).unwrap(),
        rectangle(f, &[int(1), int(0)], &[None, Some(int(1))]).unwrap(),
        rectangle(f, &[int(0), int(0)], &[None, None]).unwrap(),
        StepModule::zero(f, 2),
        single_cell(f, &[int(0), int(0)], int(1))
            .unwrap()
            .direct_sum(&single_cell(f, &[int(1), int(1)], int(1)).unwrap())
            .unwrap(),
        single_cell(f, &[int(1), int(0)], rat(3, 2)).unwrap(),
    ]
}

/// Every `(f, g)` with `f ∈ Hom(v, w[ε])`, `g ∈ Hom(w, v[ε])` checked with
/// `verify`. Only for tiny Hom spaces.
pub fn brute_interleaved(v: &StepModule, w: &StepModule, eps: Rat) -> bool {
    let fs = shifted_hom_basis(v, w, eps).unwrap();
    let gs = shifted_hom_basis(w, v, eps).unwrap();
    assert!(fs.len() + gs.len() <= 12, "brute force is for tiny Hom spaces");
    let p = v.field().p();
    let build = |basis: &[Morphism], c: &[u32], s: &StepModule, t: &StepModule| -> Morphism {
        if basis.is_empty() {
            let g = s.grid().union(t.grid()).unwrap();
            Morphism::zero(&s.restrict_extend(&g).unwrap(), &t.restrict_extend(&g).unwrap()).unwrap()
        } else {
            Morphism::combination(basis, c).unwrap()
        }
    };
    for a in all_vectors(p, fs.len()) {
        let f = build(&fs, &a, v, &w.shifted(eps));
        for b in all_vectors(p, gs.len()) {
            let g = build(&gs, &b, w, &v.shifted(eps));
            if verify(v, w, eps, &f, &g).unwrap().is_ok() {
                return true;
            }
        }
    }
    false
}

/// `dim Hom(v, w)` by enumerating every family of component matrices and
/// keeping the natural ones. Exponential; tiny modules only.
pub fn brute_hom_dim(v: &StepModule, w: &StepModule) -> usize {
    let g = v.grid();
    let p = v.field().p();
    let sizes: Vec<usize> = (0..g.size()).map(|x| v.dim(x) * w.dim(x)).collect();
    let total: usize = sizes.iter().sum();
    assert!(total <= 14, "too many unknowns for brute force");
    let mut count = 0u64;
    for coeffs in all_vectors(p, total) {
        let mut off = 0;
        let comps: Vec<Matrix> = (0..g.size())
            .map(|x| {
                let m = Matrix::from_vec(v.field(), w.dim(x), v.dim(x), coeffs[off..off + sizes[x]].to_vec()).unwrap();
                off += sizes[x];
                m
            })
            .collect();
        if Morphism::new(v.clone(), w.clone(), comps).is_ok() {
            count += 1;
        }
    }
    // count = p^dim
    let mut d = 0;
    let mut c = 1u64;
    while c < count {
        c *= p as u64;
        d += 1;
    }
    assert_eq!(c, count);
    d
}

/// Rank over F_p by plain Gaussian elimination on an i64 copy.
pub fn rank_mod_p(rows: &[Vec<i64>], p: i64) -> usize {
    let mut a: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|x| x.rem_euclid(p)).collect()).collect();
    let n_cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..n_cols {
        let Some(piv) = (rank..a.len()).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, piv);
        let inv = (1..p).find(|&x| x * a[rank][c] % p == 1).unwrap();
        for x in a[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..a.len() {
            if r != rank && a[r][c] != 0 {
                let f = a[r][c];
                for k in 0..n_cols {
                    a[r][k] = (a[r][k] - f * a[rank][k]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Betti number `β_k` of the subcomplex made of `simplices` over F_p:
/// `n_k − rk ∂_k − rk ∂_{k+1}`.
pub fn betti(simplices: &[Vec<usize>], k: usize, p: i64) -> usize {
    let of = |d: usize| -> Vec<&Vec<usize>> { simplices.iter().filter(|s| s.len() == d + 1).collect() };
    let bd = |d: usize| -> usize {
        if d == 0 {
            return 0;
        }
        let (hi, lo) = (of(d), of(d - 1));
        if hi.is_empty() || lo.is_empty() {
            return 0;
        }
        let rows: Vec<Vec<i64>> = lo
            .iter()
            .map(|f| {
                hi.iter()
                    .map(|s| {
                        (0..s.len())
                            .find(|&i| {
                                let mut t = (*s).clone();
                                t.remove(i);
                                &t == *f
                            })
                            .map_or(0, |i| if i % 2 == 0 { 1 } else { -1 })
                    })
                    .collect()
            })
            .collect();
        rank_mod_p(&rows, p)
    };
    of(k).len() - bd(k) - bd(k + 1)
}

/// Connected components of the graph on `n` vertices restricted to
/// `present` vertices.
pub fn components(present: &[bool], edges: &[(usize, usize)]) -> usize {
    let n = present.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] == x {
            x
        } else {
            let r = find(p, p[x]);
            p[x] = r;
            r
        }
    }
    for &(a, b) in edges {
        if present[a] && present[b] {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
    }
    (0..n).filter(|&v| present[v] && find(&mut parent, v) == v).count()
}

/// A 6-vertex triangulated annulus: inner triangle 0,1,2, outer 3,4,5.
pub fn annulus_facets() -> Vec<Vec<usize>> {
    vec![
        vec![0, 1, 3],
        vec![1, 3, 4],
        vec![1, 2, 4],
        vec![2, 4, 5],
        vec![0, 2, 5],
        vec![0, 3, 5],
    ]
}

pub fn grid_box(k: i64) -> Grid {
    Grid::integer_box(2, k)
}

/// Hom dimension sanity for the oracle itself.
pub fn hom_dim(v: &StepModule, w: &StepModule) -> usize {
    hom_basis(v, w).unwrap().len()
}

/// Nullspace of `rows` over F_p as a list of basis vectors.
pub fn nullspace_mod_p(rows: &[Vec<i64>], n_cols: usize, p: i64) -> Vec<Vec<i64>> {
    let mut a: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|x| x.rem_euclid(p)).collect()).collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..n_cols {
        let Some(piv) = (rank..a.len()).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, piv);
        let inv = (1..p).find(|&x| x * a[rank][c] % p == 1).unwrap();
        for x in a[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..a.len() {
            if r != rank && a[r][c] != 0 {
                let f = a[r][c];
                for k in 0..n_cols {
                    a[r][k] = (a[r][k] - f * a[rank][k]).rem_euclid(p);
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    (0..n_cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0i64; n_cols];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (-a[r][free]).rem_euclid(p);
            }
            v
        })
        .collect()
}

fn entries(m: &Matrix) -> Vec<Vec<i64>> {
    m.to_rows().into_iter().map(|r| r.into_iter().map(i64::from).collect()).collect()
}

/// Whether `v ≅ w` for two modules on the same grid: solve the naturality
/// system directly, then try every element of the solution space for
/// pointwise invertibility.
pub fn brute_iso(v: &StepModule, w: &StepModule) -> bool {
    assert_eq!(v.grid(), w.grid());
    if v.dims() != w.dims() {
        return false;
    }
    let g = v.grid();
    let p = v.field().p() as i64;
    let dims = v.dims();
    let mut offset = vec![0usize; g.size() + 1];
    for x in 0..g.size() {
        offset[x + 1] = offset[x] + dims[x] * dims[x];
    }
    let n = offset[g.size()];
    if n == 0 {
        return true;
    }
    // unknown φ_x[i][j] sits at offset[x] + i·d_x + j
    let mut rows = Vec::new();
    for x in 0..g.size() {
        for axis in 0..g.n_axes() {
            let Some(y) = g.successor(x, axis) else { continue };
            let (dx, dy) = (dims[x], dims[y]);
            let a = v.step(x, axis).map(entries).unwrap_or_default();
            let b = w.step(x, axis).map(entries).unwrap_or_default();
            // (B φ_x − φ_y A)[i][j] = 0
            for i in 0..dy {
                for j in 0..dx {
                    let mut r = vec![0i64; n];
                    for k in 0..dx {
                        r[offset[x] + k * dx + j] += b[i][k];
                    }
                    for k in 0..dy {
                        r[offset[y] + i * dy + k] -= a[k][j];
                    }
                    rows.push(r);
                }
            }
        }
    }
    let basis = nullspace_mod_p(&rows, n, p);
    assert!(basis.len() <= 16, "Hom space too large for enumeration");
    'outer: for c in all_vectors(p as u32, basis.len()) {
        let phi: Vec<i64> = (0..n)
            .map(|k| basis.iter().zip(&c).map(|(b, &ci)| b[k] * ci as i64).sum::<i64>().rem_euclid(p))
            .collect();
        for x in 0..g.size() {
            let d = dims[x];
            let m: Vec<Vec<i64>> = (0..d).map(|i| phi[offset[x] + i * d..offset[x] + (i + 1) * d].to_vec()).collect();
            if rank_mod_p(&m, p) != d {
                continue 'outer;
            }
        }
        return true;
    }
    false
}

/// Random lower-star vertex values on `n_vertices` vertices, each
/// coordinate in `{0, 1/2, …, 2}`.
pub fn random_vertex_values(rng: &mut ChaCha8Rng, n_vertices: usize, n_params: usize) -> Vec<Vec<Rat>> {
    (0..n_vertices)
        .map(|_| (0..n_params).map(|_| Rat::new(rng.random_range(0..=4), 2)).collect())
        .collect()
}

/// A random invertible `n × n` matrix over F_p.
pub fn random_invertible(rng: &mut ChaCha8Rng, field: Fp, n: usize) -> Matrix {
    loop {
        let m = Matrix::from_fn(field, n, n, |_, _| rng.random_range(0..field.p()));
        if m.is_invertible() {
            return m;
        }
    }
}

/// `v` with a random change of basis at every grid point; isomorphic to `v`
/// by construction.
pub fn scramble(rng: &mut ChaCha8Rng, v: &StepModule) -> StepModule {
    let g = v.grid();
    let f = v.field();
    let ps: Vec<Matrix> = (0..g.size()).map(|x| random_invertible(rng, f, v.dim(x))).collect();
    let steps = (0..g.n_axes())
        .map(|a| {
            (0..g.size())
                .map(|x| {
                    let y = g.successor(x, a)?;
                    let m = v.step(x, a)?;
                    Some(ps[y].mul(m).mul(&ps[x].inverse().unwrap()))
                })
                .collect()
        })
        .collect();
    StepModule::new(f, g.clone(), v.dims().to_vec(), steps).unwrap()
}

/// `n` random direct sums of 2–4 modules from `parts`, scrambled, with the
/// parts used.
pub fn random_sums(seed: u64, n: usize, parts: &[StepModule]) -> Vec<(StepModule, Vec<StepModule>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let k = rng.random_range(2..=4);
            let chosen: Vec<StepModule> = (0..k).map(|_| parts[rng.random_range(0..parts.len())].clone()).collect();
            let sum = StepModule::direct_sum_all(chosen.iter()).unwrap();
            (scramble(&mut rng, &sum), chosen)
        })
        .collect()
}

/// Random `(L, Q, r, β)` with `Q` refining `L`'s grid, `0 < r ≤ min gap`
/// and `β ≥ max gap`.
pub fn shift_factor_instances(seed: u64, n: usize) -> Vec<(StepModule, Grid, Rat, Rat)> {
    let f = Fp::new(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let l = random_presented(&mut rng, f).unwrap();
            let extra = Grid::regular(rat(1, 2), &l.grid().lower_corner(), &l.grid().upper_corner()).unwrap();
            let q = if rng.random_bool(0.5) { l.grid().union(&extra).unwrap() } else { l.grid().clone() };
            let gap = q.min_gap().unwrap_or(int(1));
            let r = gap / Rat::from_integer(rng.random_range(1..=3));
            let beta = q.max_gap().unwrap_or(int(0)) + Rat::new(rng.random_range(0..=2), 4);
            (l, q, r, beta)
        })
        .collect()
}

/// Smallest `α` in `{0, 1/4, …, 8}` at which `v` is strictly trivial.
pub fn first_trivial(v: &StepModule) -> Option<Rat> {
    (0..=32).map(|k| Rat::new(k, 4)).find(|&a| strictly_trivial(v, a).unwrap().strict)
}

/// Instances `(L, Q, α, β)` where `L_Q` is strictly `α`-trivial and `Q` has
/// gaps at most `β` over `L`'s support. Zero modules are skipped.
pub fn transfer_instances(seed: u64, n: usize) -> Vec<(StepModule, StepModule, Rat, Rat)> {
    let f = Fp::new(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let l = random_presented(&mut rng, f).unwrap();
        if l.is_zero() {
            continue;
        }
        let beta = [rat(1, 4), rat(1, 2), int(1)][rng.random_range(0..3)];
        let lo: Vec<Rat> = l.grid().lower_corner().iter().map(|x| x.floor()).collect();
        let hi: Vec<Rat> = l.grid().upper_corner().iter().map(|x| x.ceil()).collect();
        let q = Grid::regular(beta, &lo, &hi).unwrap();
        let lq = l.restrict_extend(&q).unwrap();
        if let Some(alpha) = first_trivial(&lq) {
            out.push((l, lq, alpha, beta));
        }
    }
    out
}

/// Simplices present at `s` under lower-star values.
pub fn sublevel_at(k: &SimplicialComplex, values: &[Vec<Rat>], s: &[Rat]) -> Vec<Vec<usize>> {
    k.simplices().iter().filter(|sx| sx.iter().all(|&v| point_leq(&values[v], s))).cloned().collect()
}

pub fn perturb(rng: &mut ChaCha8Rng, values: &[Vec<Rat>], eta: Rat) -> Vec<Vec<Rat>> {
    values.iter().map(|v| v.iter().map(|&x| x + eta * Rat::new(rng.random_range(-2..=2), 2)).collect()).collect()
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize) -> FiniteMetricSpace {
    let mut pts: Vec<(i64, i64)> = Vec::new();
    while pts.len() < n {
        let p = (rng.random_range(0..5), rng.random_range(0..5));
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    let d = pts
        .iter()
        .map(|a| pts.iter().map(|b| Rat::from_integer((a.0 - b.0).abs() + (a.1 - b.1).abs())).collect())
        .collect();
    FiniteMetricSpace::new(d).unwrap()
}

/// Degree-Rips complex at `(r, −k)` built from scratch.
pub fn degree_rips_at(m: &FiniteMetricSpace, r: Rat, k: usize) -> (Vec<bool>, Vec<(usize, usize)>, Vec<Vec<usize>>) {
    let n = m.len();
    let present: Vec<bool> =
        (0..n).map(|v| (0..n).filter(|&u| u != v && m.distance(v, u) <= r).count() >= k).collect();
    let mut simplices: Vec<Vec<usize>> = (0..n).filter(|&v| present[v]).map(|v| vec![v]).collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if present[a] && present[b] && m.distance(a, b) <= r {
                edges.push((a, b));
                simplices.push(vec![a, b]);
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let all = [a, b, c].iter().all(|&v| present[v]);
                if all && m.distance(a, b) <= r && m.distance(a, c) <= r && m.distance(b, c) <= r {
                    simplices.push(vec![a, b, c]);
                }
            }
        }
    }
    (present, edges, simplices)
}


/// Lower-star `H_0` modules over F_2 of `n` random perturbations of one
/// vertex function on a path with three vertices.
pub fn sublevel_family(seed: u64, n: usize) -> Vec<StepModule> {
    let k = SimplicialComplex::from_facets(3, &[vec![0, 1], vec![1, 2]]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = random_vertex_values(&mut rng, 3, 2);
    (0..n)
        .map(|_| {
            let vals: Vec<Vec<Rat>> = base
                .iter()
                .map(|v| v.iter().map(|&x| x + Rat::new(rng.random_range(0..=2), 2)).collect())
                .collect();
            let b = sublevel_bifiltration(&k, &vals).unwrap();
            homology_module(&b, 0, &b.grade_grid().unwrap(), f2()).unwrap()
        })
        .collect()
}

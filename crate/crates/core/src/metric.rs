//! Interleavings: verification, exact decision at a fixed `ε`, a rank
//! invariant lower bound and a two-sided bracket on the interleaving
//! distance.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::calculus::{eta, RankTable};
use crate::error::{Error, Result};
use crate::grid::{translate, Grid};
use crate::hom::hom_basis;
use crate::matrix::Matrix;
use crate::morphism::{Morphism, MorphismViolation};
use crate::rational::Rat;
use crate::search::{for_each_projective, SearchBudget};
use crate::stepmodule::StepModule;

/// A verified `ε`-interleaving `f: V → W[ε]`, `g: W → V[ε]`.
#[derive(Clone, Debug)]
pub struct Interleaving {
    pub eps: Rat,
    pub f: Morphism,
    pub g: Morphism,
    pub verified: bool,
}

impl Interleaving {
    /// The same interleaving read from `W` to `V`.
    pub fn swapped(self) -> Interleaving {
        Interleaving {
            eps: self.eps,
            f: self.g,
            g: self.f,
            verified: self.verified,
        }
    }

    /// `f = g = id` on `v` at `ε = 0`.
    pub fn identity(v: &StepModule) -> Interleaving {
        Interleaving {
            eps: Rat::from_integer(0),
            f: Morphism::identity(v),
            g: Morphism::identity(v),
            verified: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    F,
    G,
}

/// Why a candidate pair fails to be an interleaving.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InterleavingViolation {
    NotNatural { side: Side, violation: MorphismViolation },
    /// `g[ε]∘f ≠ η_{2ε}^V` (side `F`) or `f[ε]∘g ≠ η_{2ε}^W` (side `G`),
    /// first differing at `at`.
    Triangle { side: Side, at: Vec<Rat> },
}

impl fmt::Display for InterleavingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InterleavingViolation::NotNatural { side, violation } => write!(f, "{side:?} is not natural: {violation}"),
            InterleavingViolation::Triangle { side, at } => {
                let which = match side {
                    Side::F => "g[ε]∘f ≠ η_2ε on V",
                    Side::G => "f[ε]∘g ≠ η_2ε on W",
                };
                write!(f, "{which} at (")?;
                for (i, x) in at.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

fn check_ends(m: &Morphism, source: &StepModule, target: &StepModule, what: &'static str) -> Result<()> {
    if !m.source().same_extension(source) || !m.target().same_extension(target) {
        return Err(Error::ModuleMismatch(what));
    }
    Ok(())
}

/// Checks naturality of `f` and `g` and both triangle identities exactly.
/// Errors when `f` or `g` does not have the required source and target.
pub fn verify(
    v: &StepModule,
    w: &StepModule,
    eps: Rat,
    f: &Morphism,
    g: &Morphism,
) -> Result<core::result::Result<Interleaving, InterleavingViolation>> {
    if eps < Rat::from_integer(0) {
        return Err(Error::InvalidArgument("interleaving ε must be nonnegative".into()));
    }
    check_ends(f, v, &w.shifted(eps), "interleaving map f: V → W[ε]")?;
    check_ends(g, w, &v.shifted(eps), "interleaving map g: W → V[ε]")?;
    if let Err(violation) = f.check_naturality() {
        return Ok(Err(InterleavingViolation::NotNatural { side: Side::F, violation }));
    }
    if let Err(violation) = g.check_naturality() {
        return Ok(Err(InterleavingViolation::NotNatural { side: Side::G, violation }));
    }
    let two = eps + eps;
    let left = g.shifted(eps).compose(f)?;
    if let Some(at) = left.first_difference(&eta(v, two)?)? {
        return Ok(Err(InterleavingViolation::Triangle { side: Side::F, at }));
    }
    let right = f.shifted(eps).compose(g)?;
    if let Some(at) = right.first_difference(&eta(w, two)?)? {
        return Ok(Err(InterleavingViolation::Triangle { side: Side::G, at }));
    }
    Ok(Ok(Interleaving {
        eps,
        f: f.clone(),
        g: g.clone(),
        verified: true,
    }))
}

/// Component of `m` at a rational point, with the correct (possibly empty)
/// shape below the grid.
fn comp_at(m: &Morphism, s: &[Rat]) -> Matrix {
    match m.grid().anchor(s) {
        Some(a) => m.comp(a).clone(),
        None => Matrix::zeros(m.source().field(), m.target().dim_at(s), m.source().dim_at(s)),
    }
}

/// Bases of `Hom(V, W[ε])` on `G_V ∪ (G_W − ε)`.
pub fn shifted_hom_basis(v: &StepModule, w: &StepModule, eps: Rat) -> Result<Vec<Morphism>> {
    let ws = w.shifted(eps);
    let grid = v.grid().union(ws.grid())?;
    hom_basis(&v.restrict_extend(&grid)?, &ws.restrict_extend(&grid)?)
}

/// Flattened entries of `Σ` over the points of `grid` of `m(s)`.
fn flatten_at(grid: &Grid, mut m: impl FnMut(&[Rat]) -> Matrix) -> Vec<u32> {
    let mut out = Vec::new();
    for s in grid.points() {
        out.extend_from_slice(m(&s).data());
    }
    out
}

/// The bilinear system for one triangle: `Σ a_i b_j T[i][j] = target`.
struct Triangle {
    /// `terms[i][j]`, flattened over the check points.
    terms: Vec<Vec<Vec<u32>>>,
    target: Vec<u32>,
}

/// `g[ε]∘f` evaluated at the points of `G_X ∪ (G_X − 2ε)` for each pair of
/// basis elements, where `f ∈ fs: X → Y[ε]` and `g ∈ gs: Y → X[ε]`.
fn triangle(x: &StepModule, eps: Rat, fs: &[Morphism], gs: &[Morphism]) -> Result<Triangle> {
    let two = eps + eps;
    let points = x.grid().union(&x.grid().shifted(two))?;
    let target = flatten_at(&points, |s| x.structure_map(s, &translate(s, two)).expect("s ≤ s + 2ε"));
    let terms = fs
        .iter()
        .map(|f| {
            gs.iter()
                .map(|g| flatten_at(&points, |s| comp_at(g, &translate(s, eps)).mul(&comp_at(f, s))))
                .collect()
        })
        .collect();
    Ok(Triangle { terms, target })
}

/// Searches for an `ε`-interleaving. `Ok(None)` is a certificate that none
/// exists: every `f` up to scalars has been tried, with `g` solved exactly.
pub fn decide(v: &StepModule, w: &StepModule, eps: Rat, budget: &SearchBudget) -> Result<Option<Interleaving>> {
    if eps < Rat::from_integer(0) {
        return Err(Error::InvalidArgument("interleaving ε must be nonnegative".into()));
    }
    if v.field() != w.field() {
        return Err(Error::FieldMismatch {
            left: v.field().p(),
            right: w.field().p(),
        });
    }
    let fs = shifted_hom_basis(v, w, eps)?;
    let gs = shifted_hom_basis(w, v, eps)?;
    if gs.len() < fs.len() {
        return Ok(decide_with(w, v, eps, &gs, &fs, budget)?.map(Interleaving::swapped));
    }
    decide_with(v, w, eps, &fs, &gs, budget)
}

fn decide_with(
    v: &StepModule,
    w: &StepModule,
    eps: Rat,
    fs: &[Morphism],
    gs: &[Morphism],
    budget: &SearchBudget,
) -> Result<Option<Interleaving>> {
    let field = v.field();
    let p = field.p();
    let (d, m) = (fs.len(), gs.len());
    let t1 = triangle(v, eps, fs, gs)?;
    // f[ε]∘g on W: roles of the two bases swap
    let t2 = triangle(w, eps, gs, fs)?;

    // One row per scalar equation; columns (i, j) for a_i b_j, then the
    // right-hand side. Row reduction keeps the solution set for every `a`.
    let n_cols = d * m + 1;
    let mut rows: Vec<u32> = Vec::new();
    let mut n_rows = 0;
    for (k, &rhs) in t1.target.iter().enumerate() {
        for i in 0..d {
            for j in 0..m {
                rows.push(t1.terms[i][j][k]);
            }
        }
        rows.push(rhs);
        n_rows += 1;
    }
    for (k, &rhs) in t2.target.iter().enumerate() {
        for i in 0..d {
            for j in 0..m {
                // t2 is indexed (g_j, f_i)
                rows.push(t2.terms[j][i][k]);
            }
        }
        rows.push(rhs);
        n_rows += 1;
    }
    let system = Matrix::from_vec(field, n_rows, n_cols, rows)?.reduce();
    let eqs = system.rref.select_rows(&(0..system.rank).collect::<Vec<_>>());
    let last = n_cols - 1;

    let solve_for = |a: &[u32]| -> Result<Option<Vec<u32>>> {
        let mut lhs = Matrix::zeros(field, eqs.rows(), m);
        for r in 0..eqs.rows() {
            for j in 0..m {
                let mut acc = 0;
                for (i, &ai) in a.iter().enumerate() {
                    if ai != 0 {
                        acc = field.add(acc, field.mul(ai, eqs.get(r, i * m + j)));
                    }
                }
                lhs.set(r, j, acc);
            }
        }
        let rhs = Matrix::from_fn(field, eqs.rows(), 1, |r, _| eqs.get(r, last));
        Ok(lhs.solve(&rhs)?.map(|b| b.col(0)))
    };

    let build = |a: &[u32], b: &[u32]| -> Result<Interleaving> {
        let f = combine_or_zero(fs, a, v, &w.shifted(eps))?;
        let g = combine_or_zero(gs, b, w, &v.shifted(eps))?;
        match verify(v, w, eps, &f, &g)? {
            Ok(i) => Ok(i),
            Err(violation) => Err(Error::InvalidMorphism(alloc::format!("solved pair fails to verify: {violation}"))),
        }
    };

    let zero = alloc::vec![0u32; d];
    if let Some(b) = solve_for(&zero)? {
        return build(&zero, &b).map(Some);
    }
    budget.check(d)?;
    let mut found: Option<(Vec<u32>, Vec<u32>)> = None;
    let mut err = None;
    for_each_projective(p, d, |a| match solve_for(a) {
        Ok(Some(b)) => {
            found = Some((a.to_vec(), b));
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
    match found {
        Some((a, b)) => build(&a, &b).map(Some),
        None => Ok(None),
    }
}

fn combine_or_zero(basis: &[Morphism], coeffs: &[u32], source: &StepModule, target: &StepModule) -> Result<Morphism> {
    if basis.is_empty() {
        let grid = source.grid().union(target.grid())?;
        return Morphism::zero(&source.restrict_extend(&grid)?, &target.restrict_extend(&grid)?);
    }
    Morphism::combination(basis, coeffs)
}

/// A lower or upper bound that may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Finite(Rat),
    Infinite,
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Bound::Finite(a), Bound::Finite(b)) => a.cmp(b),
            (Bound::Finite(_), Bound::Infinite) => Ordering::Less,
            (Bound::Infinite, Bound::Finite(_)) => Ordering::Greater,
            (Bound::Infinite, Bound::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(r) => write!(f, "{r}"),
            Bound::Infinite => write!(f, "inf"),
        }
    }
}

/// A rank inequality that no `ε`-interleaving can satisfy:
/// `rk X_{s, t+2ε} > rk Y_{s+ε, t+ε}` with `X = V` (side `F`) or `X = W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankViolation {
    pub eps: Rat,
    pub side: Side,
    pub s: Vec<Rat>,
    pub t: Vec<Rat>,
    pub lhs: usize,
    pub rhs: usize,
}

/// All candidate values of `ε` at which interleaving feasibility may change:
/// zero, nonnegative axiswise differences between coordinates of the two
/// grids, halves of all such differences (same grid or across), and the
/// span beyond which nothing changes.
pub fn candidate_set(v: &StepModule, w: &StepModule) -> Vec<Rat> {
    let zero = Rat::from_integer(0);
    let two = Rat::from_integer(2);
    let mut out = alloc::vec![zero];
    for axis in 0..v.n_axes() {
        let a = v.grid().axis(axis);
        let b = w.grid().axis(axis);
        for x in a.iter().chain(b) {
            for y in a.iter().chain(b) {
                let d = *x - *y;
                if d > zero {
                    out.push(d / two);
                    // whole differences across grids and within
                    out.push(d);
                }
            }
        }
    }
    out.push(span(v, w));
    out.sort();
    out.dedup();
    out
}

/// Past this shift every point moved by `ε` lies above both grids, so
/// feasibility is constant for all larger `ε`.
fn span(v: &StepModule, w: &StepModule) -> Rat {
    let mut best = Rat::from_integer(0);
    for axis in 0..v.n_axes() {
        let a = v.grid().axis(axis);
        let b = w.grid().axis(axis);
        let lo = a[0].min(b[0]);
        let hi = *a.last().unwrap().max(b.last().unwrap());
        best = best.max(hi - lo);
    }
    best
}

/// First violated rank inequality at `eps`, in either direction.
pub fn rank_violation(v: &StepModule, w: &StepModule, eps: Rat) -> Result<Option<RankViolation>> {
    RankCheck::new(v, w).violation(eps)
}

/// Rank tables of both modules, built once for repeated queries.
struct RankCheck<'a> {
    v: &'a StepModule,
    w: &'a StepModule,
    rv: RankTable,
    rw: RankTable,
}

impl<'a> RankCheck<'a> {
    fn new(v: &'a StepModule, w: &'a StepModule) -> Self {
        RankCheck {
            v,
            w,
            rv: RankTable::new(v),
            rw: RankTable::new(w),
        }
    }

    fn violation(&self, eps: Rat) -> Result<Option<RankViolation>> {
        if let Some(x) = one_sided_violation(self.v, &self.rv, self.w, &self.rw, eps, Side::F)? {
            return Ok(Some(x));
        }
        one_sided_violation(self.w, &self.rw, self.v, &self.rv, eps, Side::G)
    }
}

fn one_sided_violation(
    x: &StepModule,
    rx: &RankTable,
    y: &StepModule,
    ry: &RankTable,
    eps: Rat,
    side: Side,
) -> Result<Option<RankViolation>> {
    let two = eps + eps;
    let r = Grid::union_all([x.grid(), &x.grid().shifted(two), &y.grid().shifted(eps)])?;
    let pts: Vec<Vec<Rat>> = r.points().collect();
    for a in 0..r.size() {
        for b in a..r.size() {
            if !r.leq(a, b) {
                continue;
            }
            let (s, t) = (&pts[a], &pts[b]);
            let lhs = rx.rank(s, &translate(t, two));
            if lhs == 0 {
                continue;
            }
            let rhs = ry.rank(&translate(s, eps), &translate(t, eps));
            if lhs > rhs {
                return Ok(Some(RankViolation {
                    eps,
                    side,
                    s: s.clone(),
                    t: t.clone(),
                    lhs,
                    rhs,
                }));
            }
        }
    }
    Ok(None)
}

/// The largest candidate `ε` at which some rank inequality fails, with its
/// witness; `Bound::Infinite` when the inequalities fail for all `ε`.
/// Sound: no interleaving exists at or below a violating `ε`.
///
/// A violation at `ε` at `(s, t)` gives one at every smaller `ε'` at
/// `(s + ε − ε', t + ε − ε')`, so the candidates are bisected.
pub fn rank_lower_bound(v: &StepModule, w: &StepModule) -> Result<(Bound, Option<RankViolation>)> {
    let cands = candidate_set(v, w);
    let check = RankCheck::new(v, w);
    let big = *cands.last().unwrap();
    if let Some(x) = check.violation(big)? {
        return Ok((Bound::Infinite, Some(x)));
    }
    // invariant: cands[hi] has no violation; cands[..lo] known violating
    let (mut lo, mut hi) = (0usize, cands.len() - 1);
    let mut best: Option<RankViolation> = None;
    while lo < hi {
        let mid = (lo + hi) / 2;
        match check.violation(cands[mid])? {
            Some(x) => {
                best = Some(x);
                lo = mid + 1;
            }
            None => hi = mid,
        }
    }
    match best {
        Some(x) => Ok((Bound::Finite(x.eps), Some(x))),
        None => Ok((Bound::Finite(Rat::from_integer(0)), None)),
    }
}

/// Evidence for the lower end of a bracket.
#[derive(Clone, Debug)]
pub enum LowerWitness {
    /// Nothing below 0 to certify.
    Trivial,
    Rank(RankViolation),
    /// `decide` certified that no interleaving exists at this `ε`.
    NoneAt(Rat),
}

/// `lower ≤ d_I ≤ upper`. When `lower_strict` holds, `d_I > lower`.
///
/// `exact` means every candidate strictly between the bounds was decided,
/// so (with the candidate set complete) `d_I = upper`.
#[derive(Clone, Debug)]
pub struct DistanceBracket {
    pub lower: Bound,
    pub lower_strict: bool,
    pub upper: Bound,
    pub lower_witness: LowerWitness,
    pub upper_witness: Option<Interleaving>,
    pub exact: bool,
    /// Candidates whose decision exceeded the budget.
    pub undecided: Vec<Rat>,
}

impl DistanceBracket {
    /// The distance when the bracket is exact.
    pub fn distance(&self) -> Option<Bound> {
        self.exact.then_some(self.upper)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Decision {
    Unknown,
    No,
    Yes,
    Budget,
}

pub fn distance_bracket(v: &StepModule, w: &StepModule, budget: &SearchBudget) -> Result<DistanceBracket> {
    let zero = Rat::from_integer(0);
    let (rank_bound, violation) = rank_lower_bound(v, w)?;
    if rank_bound == Bound::Infinite {
        return Ok(DistanceBracket {
            lower: Bound::Infinite,
            lower_strict: false,
            upper: Bound::Infinite,
            lower_witness: LowerWitness::Rank(violation.expect("infinite bound has a witness")),
            upper_witness: None,
            exact: true,
            undecided: Vec::new(),
        });
    }
    let cands = candidate_set(v, w);
    let mut state = alloc::vec![Decision::Unknown; cands.len()];
    let mut witnesses: Vec<Option<Interleaving>> = alloc::vec![None; cands.len()];
    // lo: index of the largest known failure; hi: smallest known success
    let mut lo: Option<usize> = None;
    if let (Bound::Finite(b), Some(_)) = (rank_bound, &violation) {
        let idx = cands.iter().position(|&c| c == b).expect("rank bound is a candidate");
        for s in state.iter_mut().take(idx + 1) {
            *s = Decision::No;
        }
        lo = Some(idx);
    }
    let mut hi: Option<usize> = None;
    loop {
        let start = lo.map_or(0, |l| l + 1);
        let end = hi.unwrap_or(cands.len());
        let open: Vec<usize> = (start..end).filter(|&i| state[i] == Decision::Unknown).collect();
        if open.is_empty() {
            break;
        }
        let mid = open[open.len() / 2];
        match decide(v, w, cands[mid], budget) {
            Ok(Some(i)) => {
                state[mid] = Decision::Yes;
                witnesses[mid] = Some(i);
                hi = Some(mid);
            }
            Ok(None) => {
                state[mid] = Decision::No;
                lo = Some(mid);
            }
            Err(Error::BudgetExceeded { .. }) => state[mid] = Decision::Budget,
            Err(e) => return Err(e),
        }
    }
    let start = lo.map_or(0, |l| l + 1);
    let end = hi.unwrap_or(cands.len());
    let undecided: Vec<Rat> = (start..end).filter(|&i| state[i] == Decision::Budget).map(|i| cands[i]).collect();
    let (lower, lower_strict, lower_witness) = match lo {
        None => (Bound::Finite(zero), false, LowerWitness::Trivial),
        Some(l) => {
            let w = match (&violation, rank_bound) {
                (Some(x), Bound::Finite(b)) if b == cands[l] => LowerWitness::Rank(x.clone()),
                _ => LowerWitness::NoneAt(cands[l]),
            };
            (Bound::Finite(cands[l]), true, w)
        }
    };
    let (upper, upper_witness) = match hi {
        Some(h) => (Bound::Finite(cands[h]), witnesses[h].take()),
        None => (Bound::Infinite, None),
    };
    // with no success even at the span, feasibility never changes again
    let exact = undecided.is_empty();
    let lower = if exact && upper == Bound::Infinite { Bound::Infinite } else { lower };
    Ok(DistanceBracket {
        lower,
        lower_strict: lower_strict && lower != Bound::Infinite,
        upper,
        lower_witness,
        upper_witness,
        exact,
        undecided,
    })
}

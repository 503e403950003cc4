//! Finite Cauchy chains with their limit certificates, the precompactness
//! probe and uniform bounds on module families.

use alloc::vec::Vec;

use crate::calculus::{discretize_on, persistent_rank, smooth};
use crate::decompose::iso_test;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::metric::{verify, Interleaving};
use crate::morphism::Morphism;
use crate::rational::Rat;
use crate::search::SearchBudget;
use crate::stepmodule::StepModule;

/// Terms `V^(0..K)` with verified links `V^(k) ~ V^(k+1)` at `ε_k`.
#[derive(Clone, Debug)]
pub struct CauchyChain {
    pub terms: Vec<StepModule>,
    pub links: Vec<Interleaving>,
}

impl CauchyChain {
    pub fn new(terms: Vec<StepModule>, links: Vec<Interleaving>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument("empty chain".into()));
        }
        if links.len() + 1 != terms.len() {
            return Err(Error::InvalidArgument("a chain of K terms needs K−1 links".into()));
        }
        Ok(CauchyChain { terms, links })
    }

    /// `δ_k = Σ_{m ≥ k} ε_m`, one per term (the last is 0).
    pub fn tails(&self) -> Vec<Rat> {
        let mut out = alloc::vec![Rat::from_integer(0); self.terms.len()];
        for k in (0..self.links.len()).rev() {
            out[k] = out[k + 1] + self.links[k].eps;
        }
        out
    }

    /// Re-verifies every link against its terms.
    pub fn check(&self) -> Result<()> {
        for (k, l) in self.links.iter().enumerate() {
            let ok = matches!(verify(&self.terms[k], &self.terms[k + 1], l.eps, &l.f, &l.g), Ok(Ok(_)));
            if !ok {
                return Err(Error::UnverifiedLink(k));
            }
        }
        Ok(())
    }
}

/// The limit of a finite chain and, for each term, the `δ_k`-interleaving
/// between the limit and `V^(k)` assembled from the links.
#[derive(Clone, Debug)]
pub struct CauchyLimit {
    pub limit: StepModule,
    pub tails: Vec<Rat>,
    pub certificates: Vec<Interleaving>,
}

pub fn cauchy_limit(c: &CauchyChain) -> Result<CauchyLimit> {
    c.check()?;
    let tails = c.tails();
    let last = c.terms.len() - 1;
    let limit = c.terms[last].clone();
    let mut certificates = Vec::with_capacity(c.terms.len());
    for k in 0..=last {
        if k == last {
            certificates.push(Interleaving::identity(&limit));
            continue;
        }
        // F_k = g_k[δ_{k+1}] ∘ … ∘ g_{K−1}: L → V^(k)[δ_k]
        let mut big_f: Morphism = c.links[last - 1].g.clone();
        for m in (k..last - 1).rev() {
            big_f = c.links[m].g.shifted(tails[m + 1]).compose(&big_f)?;
        }
        // G_k = f_{K−1}[δ_k − δ_{K−1}] ∘ … ∘ f_k: V^(k) → L[δ_k]
        let mut big_g: Morphism = c.links[k].f.clone();
        for m in k + 1..last {
            big_g = c.links[m].f.shifted(tails[k] - tails[m]).compose(&big_g)?;
        }
        let cert = verify(&limit, &c.terms[k], tails[k], &big_f, &big_g)?
            .map_err(|v| Error::InvalidMorphism(alloc::format!("certificate {k} fails: {v}")))?;
        certificates.push(cert);
    }
    Ok(CauchyLimit {
        limit,
        tails,
        certificates,
    })
}

/// The chain `V^(k) = V_{Q_k}`, `Q_k = 2^{-k}Z^n` over the integer box
/// around `v`'s grid, for `k = 0..=depth`, linked by the density pairs.
pub fn dyadic_chain(v: &StepModule, depth: usize) -> Result<CauchyChain> {
    let lo: Vec<Rat> = v.grid().lower_corner().iter().map(|x| x.floor()).collect();
    let hi: Vec<Rat> = v.grid().upper_corner().iter().map(|x| x.ceil()).collect();
    let mut grids = Vec::with_capacity(depth + 1);
    for k in 0..=depth {
        let step = Rat::new(1, 1i64 << k);
        grids.push(Grid::regular(step, &lo, &hi)?);
    }
    let terms: Vec<StepModule> = grids.iter().map(|q| v.restrict_extend(q)).collect::<Result<_>>()?;
    let mut links = Vec::with_capacity(depth);
    for k in 0..depth {
        let eps = Rat::new(1, 1i64 << k);
        let d = discretize_on(&terms[k + 1], eps, &grids[k])?;
        if d.module != terms[k] {
            return Err(Error::InvalidArgument("restriction to nested grids disagrees".into()));
        }
        links.push(Interleaving {
            eps,
            f: d.from_discrete,
            g: d.to_discrete,
            verified: false,
        });
    }
    CauchyChain::new(terms, links)
}

/// Grid for the probe: `δZ^n` over the smallest box containing every grid
/// of the family, padded by `δ`.
pub fn probe_grid(family: &[StepModule], delta: Rat) -> Result<Grid> {
    if delta <= Rat::from_integer(0) {
        return Err(Error::InvalidArgument("probe δ must be positive".into()));
    }
    let first = family
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty family".into()))?;
    let mut lo = first.grid().lower_corner();
    let mut hi = first.grid().upper_corner();
    for m in family {
        for (i, (l, h)) in m.grid().lower_corner().into_iter().zip(m.grid().upper_corner()).enumerate() {
            lo[i] = lo[i].min(l);
            hi[i] = hi[i].max(h);
        }
    }
    let lo: Vec<Rat> = lo.into_iter().map(|x| x - delta).collect();
    let hi: Vec<Rat> = hi.into_iter().map(|x| x + delta).collect();
    Grid::regular(delta, &lo, &hi)
}

/// `S_δV` restricted and extended to the probe grid.
pub fn probe_normalize(v: &StepModule, delta: Rat, grid: &Grid) -> Result<StepModule> {
    smooth(v, delta)?.module.restrict_extend(grid)
}

/// Outcome of one pairwise test in the probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairOutcome {
    Iso,
    NotIso,
    Budget,
}

/// Isomorphism classes found by the probe. With undecided pairs the class
/// count is only bracketed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    pub class_count_min: usize,
    pub class_count_max: usize,
    /// Class label (index of the class representative) per member.
    pub labels: Vec<usize>,
    pub representatives: Vec<usize>,
    pub undecided_pairs: Vec<(usize, usize)>,
}

impl ProbeReport {
    pub fn class_count(&self) -> Option<usize> {
        (self.class_count_min == self.class_count_max).then_some(self.class_count_min)
    }
}

/// All pairs `(i, j)`, `i < j`, in the order the probe tests them.
pub fn probe_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Builds the report from pairwise outcomes listed in [`probe_pairs`] order.
pub fn partition(n: usize, outcomes: &[((usize, usize), PairOutcome)]) -> ProbeReport {
    let mut strict = UnionFind::new(n);
    let mut loose = UnionFind::new(n);
    let mut undecided = Vec::new();
    for &((i, j), o) in outcomes {
        match o {
            PairOutcome::Iso => {
                strict.union(i, j);
                loose.union(i, j);
            }
            PairOutcome::Budget => {
                loose.union(i, j);
                undecided.push((i, j));
            }
            PairOutcome::NotIso => {}
        }
    }
    let labels: Vec<usize> = (0..n).map(|i| strict.find(i)).collect();
    let mut representatives: Vec<usize> = labels.clone();
    representatives.sort();
    representatives.dedup();
    let mut roots: Vec<usize> = (0..n).map(|i| loose.find(i)).collect();
    roots.sort();
    roots.dedup();
    ProbeReport {
        class_count_min: roots.len(),
        class_count_max: representatives.len(),
        labels,
        representatives,
        undecided_pairs: undecided,
    }
}

/// Union-find whose root is always the smallest member.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
    }
}

pub fn pair_outcome(a: &StepModule, b: &StepModule, budget: &SearchBudget) -> Result<PairOutcome> {
    match iso_test(a, b, budget) {
        Ok(Some(_)) => Ok(PairOutcome::Iso),
        Ok(None) => Ok(PairOutcome::NotIso),
        Err(Error::BudgetExceeded { .. }) => Ok(PairOutcome::Budget),
        Err(e) => Err(e),
    }
}

/// Counts isomorphism classes of `{S_δV|_{δZ^n}}` over the family.
pub fn precompact_probe(family: &[StepModule], delta: Rat, budget: &SearchBudget) -> Result<ProbeReport> {
    let grid = probe_grid(family, delta)?;
    let normal: Vec<StepModule> = family
        .iter()
        .map(|v| probe_normalize(v, delta, &grid))
        .collect::<Result<_>>()?;
    let mut outcomes = Vec::new();
    for (i, j) in probe_pairs(family.len()) {
        outcomes.push(((i, j), pair_outcome(&normal[i], &normal[j], budget)?));
    }
    Ok(partition(family.len(), &outcomes))
}

/// Smallest box containing every support, and the largest persistent rank
/// in the family at each `ε`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformBounds {
    /// `None` when every member is zero.
    pub support: Option<SupportBox>,
    pub ranks: Vec<(Rat, usize)>,
}

/// Closure of the support; an upper coordinate of `None` is unbounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportBox {
    pub lower: Vec<Rat>,
    pub upper: Vec<Option<Rat>>,
}

/// The closure of `{s : V_s ≠ 0}` as a box.
pub fn support_box(v: &StepModule) -> Option<SupportBox> {
    let g = v.grid();
    let mut out: Option<SupportBox> = None;
    for x in 0..g.size() {
        if v.dim(x) == 0 {
            continue;
        }
        let m = g.multi(x);
        let lower: Vec<Rat> = (0..g.n_axes()).map(|a| g.axis(a)[m[a]]).collect();
        let upper: Vec<Option<Rat>> = (0..g.n_axes()).map(|a| g.axis(a).get(m[a] + 1).copied()).collect();
        out = Some(match out {
            None => SupportBox { lower, upper },
            Some(b) => merge_boxes(b, SupportBox { lower, upper }),
        });
    }
    out
}

fn merge_boxes(a: SupportBox, b: SupportBox) -> SupportBox {
    SupportBox {
        lower: a.lower.iter().zip(&b.lower).map(|(x, y)| *x.min(y)).collect(),
        upper: a
            .upper
            .iter()
            .zip(&b.upper)
            .map(|(x, y)| match (x, y) {
                (Some(x), Some(y)) => Some(*x.max(y)),
                _ => None,
            })
            .collect(),
    }
}

pub fn uniform_bounds_report(family: &[StepModule], eps_list: &[Rat]) -> Result<UniformBounds> {
    let mut support: Option<SupportBox> = None;
    for m in family {
        if let Some(b) = support_box(m) {
            support = Some(match support {
                None => b,
                Some(a) => merge_boxes(a, b),
            });
        }
    }
    let mut ranks = Vec::with_capacity(eps_list.len());
    for &e in eps_list {
        let mut best = 0;
        for m in family {
            best = best.max(persistent_rank(m, e)?);
        }
        ranks.push((e, best));
    }
    Ok(UniformBounds { support, ranks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;
    use crate::rational::{int, rat};

    #[test]
    fn single_term_chain() {
        let v = StepModule::constant(Fp::new(2).unwrap(), Grid::integer_box(2, 2));
        let c = CauchyChain::new(alloc::vec![v.clone()], Vec::new()).unwrap();
        let l = cauchy_limit(&c).unwrap();
        assert_eq!(l.limit, v);
        assert_eq!(l.tails, alloc::vec![int(0)]);
    }

    #[test]
    fn dyadic_chain_certificates() {
        let f = Fp::new(2).unwrap();
        let v = crate::library::single_cell(f, &[rat(1, 3), rat(1, 2)], rat(5, 4)).unwrap();
        let c = dyadic_chain(&v, 2).unwrap();
        let l = cauchy_limit(&c).unwrap();
        assert_eq!(l.tails, alloc::vec![rat(3, 2), rat(1, 2), int(0)]);
        assert!(l.certificates.iter().all(|c| c.verified));
    }

    #[test]
    fn partition_brackets_budget_pairs() {
        let r = partition(
            3,
            &[
                ((0, 1), PairOutcome::Iso),
                ((0, 2), PairOutcome::Budget),
                ((1, 2), PairOutcome::Budget),
            ],
        );
        assert_eq!((r.class_count_min, r.class_count_max), (1, 2));
        assert_eq!(r.labels, alloc::vec![0, 0, 2]);
    }

    #[test]
    fn zero_family_bounds() {
        let z = StepModule::zero(Fp::new(2).unwrap(), 2);
        let b = uniform_bounds_report(&[z], &[int(1)]).unwrap();
        assert_eq!(b.support, None);
        assert_eq!(b.ranks, alloc::vec![(int(1), 0)]);
    }
}

//! Weighted k-medoid clustering over an arbitrary dissimilarity.
//!
//! Two stages run back to back from a seeded random choice of medoids:
//!
//! 1. Alternating (Voronoi) iteration: assign every point to its nearest
//!    medoid, then move each medoid to the member that minimizes the
//!    weighted sum of distances to the rest of its cluster. Repeats until
//!    the partition stops changing or `max_iter` is reached.
//! 2. Eager swap refinement in the style of FasterPAM: for each non-medoid
//!    candidate, find the medoid whose replacement lowers the total cost
//!    the most and perform the swap if it helps. Stops once a full cycle
//!    over the candidates makes no swap, so the result is 1-swap locally
//!    optimal, or when the work budget runs out. Small inputs (a few
//!    thousand points) always finish; large ones keep whatever
//!    improvement the budget bought, reported by
//!    [`ClusterModel::swap_converged`].
//!
//! Small inputs repeat this from several starts drawn from the same seeded
//! stream and keep the cheapest result; see [`KMedoidConfig::starts_for`].
//!
//! Distances are always taken from a point to a medoid. A point is at
//! distance zero from itself even when the dissimilarity is not reflexive.
//! Medoids always belong to their own cluster. Ties go to the medoid with
//! the lower point index, and cluster ids are ordered by medoid index.
//!
//! Work is split with rayon, but every reduction runs in index order, so
//! results do not depend on the thread count.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::distance::Dissimilarity;
use super::ColorPoint;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMedoidConfig {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Work allowed for the swap stage, in point-to-candidate distance
    /// evaluations; 0 skips the stage.
    pub swap_budget: u64,
    /// Most independent starts to try; fewer are used as the input grows.
    pub max_starts: usize,
}

/// Enough for a few hundred thousand candidate checks against a few
/// thousand points, while keeping a 256x256 image to a second or two.
pub const DEFAULT_SWAP_BUDGET: u64 = 400_000_000;

/// Starts are repeated while `starts * distinct_points^2` stays under this,
/// so a few hundred points get every start and a few thousand get one.
const RESTART_WORK: usize = 4_000_000;

impl KMedoidConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            seed,
            max_iter: 100,
            swap_budget: DEFAULT_SWAP_BUDGET,
            max_starts: 16,
        }
    }

    /// Starts used for `distinct` distinct points.
    pub fn starts_for(&self, distinct: usize) -> usize {
        let affordable = RESTART_WORK / distinct.max(1).saturating_pow(2);
        affordable.clamp(1, self.max_starts.max(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    /// Requested cluster count.
    pub k: usize,
    /// Cluster id of every input point.
    pub assignments: Vec<usize>,
    /// Point index of each cluster's medoid, ascending.
    pub medoid_indices: Vec<usize>,
    /// The medoid points themselves.
    pub medoids: Vec<ColorPoint>,
    /// Weighted sum of point-to-medoid distances.
    pub cost: f64,
    /// Independent starts tried; the other statistics describe the best one.
    pub starts: usize,
    /// Alternating iterations performed.
    pub iterations: usize,
    pub swaps: usize,
    /// The swap stage ran until no single medoid replacement lowered the
    /// cost, so the result is 1-swap locally optimal.
    pub swap_converged: bool,
    /// Cost after the initial assignment and after every subsequent step.
    pub cost_trace: Vec<f64>,
}

impl ClusterModel {
    pub fn cluster_count(&self) -> usize {
        self.medoid_indices.len()
    }

    /// Point indices of each cluster, in scan order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cluster_count()];
        for (i, &c) in self.assignments.iter().enumerate() {
            out[c].push(i);
        }
        out
    }
}

/// Cluster `points` into at most `config.k` groups.
///
/// When the number of distinct points is at most `k`, every distinct
/// point becomes its own cluster.
pub fn kmedoid<D: Dissimilarity>(
    points: &[ColorPoint],
    distance: &D,
    config: &KMedoidConfig,
) -> Result<ClusterModel> {
    if points.is_empty() {
        return Err(Error::NoPoints);
    }
    if config.k == 0 {
        return Err(Error::invalid("k", "must be at least 1"));
    }
    let space = Space::new(points, distance);

    let mut first_of: HashMap<(u8, u8, u8, u32, u32), usize> = HashMap::new();
    let mut representative = Vec::with_capacity(points.len());
    let mut distinct = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let r = *first_of.entry(p.key()).or_insert_with(|| {
            distinct.push(i);
            i
        });
        representative.push(r);
    }

    if distinct.len() <= config.k {
        let slot: HashMap<usize, usize> = distinct.iter().enumerate().map(|(s, &i)| (i, s)).collect();
        let assignments: Vec<usize> = representative.iter().map(|r| slot[r]).collect();
        let cost = space.cost_of(&assignments, &distinct);
        let mut model = space.model(config.k, assignments, distinct, 0, 0, vec![cost]);
        model.swap_converged = true;
        return Ok(model);
    }

    // Every start draws from one stream, so the first start is the same
    // whatever the start count.
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let starts = config.starts_for(distinct.len());
    let mut best: Option<ClusterModel> = None;
    for _ in 0..starts {
        let init: Vec<usize> = rand::seq::index::sample(&mut rng, distinct.len(), config.k)
            .into_iter()
            .map(|s| distinct[s])
            .collect();
        let model = run_from(&space, &distinct, init, config);
        if best.as_ref().is_none_or(|b| model.cost < b.cost) {
            best = Some(model);
        }
    }
    let mut model = best.expect("at least one start");
    model.starts = starts;
    Ok(model)
}

/// Alternating iteration then swap refinement from one initial medoid set.
fn run_from<D: Dissimilarity>(
    space: &Space<'_, D>,
    distinct: &[usize],
    mut medoids: Vec<usize>,
    config: &KMedoidConfig,
) -> ClusterModel {
    medoids.sort_unstable();
    let (mut assignments, mut cost) = space.assign(&medoids);
    let mut trace = vec![cost];
    let mut iterations = 0;
    while iterations < config.max_iter {
        iterations += 1;
        medoids = space.update_medoids(&assignments, &medoids);
        let (next, next_cost) = space.assign(&medoids);
        trace.push(next_cost);
        let converged = same_partition(&assignments, &next);
        assignments = next;
        cost = next_cost;
        if converged {
            break;
        }
    }

    let mut swaps = 0;
    let mut swap_converged = false;
    if config.swap_budget > 0 {
        let mut state = SwapState::new(space, medoids);
        let max_evaluations = (config.swap_budget / space.points.len() as u64).max(1);
        (swaps, swap_converged) = state.refine(space, distinct, max_evaluations);
        medoids = state.medoids;
        medoids.sort_unstable();
        let (a, c) = space.assign(&medoids);
        if swaps > 0 {
            trace.push(c);
        }
        assignments = a;
        cost = c;
    }

    debug_assert_eq!(cost, space.cost_of(&assignments, &medoids));
    let mut model = space.model(config.k, assignments, medoids, iterations, swaps, trace);
    model.swap_converged = swap_converged;
    model
}

/// Assign every point to the nearest of the given medoids (point indices)
/// without iterating further.
pub fn model_for_medoids<D: Dissimilarity>(
    points: &[ColorPoint],
    distance: &D,
    medoid_indices: &[usize],
    k: usize,
) -> Result<ClusterModel> {
    if points.is_empty() {
        return Err(Error::NoPoints);
    }
    let mut medoids = medoid_indices.to_vec();
    medoids.sort_unstable();
    medoids.dedup();
    if medoids.is_empty() || medoids.iter().any(|&m| m >= points.len()) {
        return Err(Error::invalid("medoid_indices", "must name at least one existing point"));
    }
    let space = Space::new(points, distance);
    let (assignments, cost) = space.assign(&medoids);
    Ok(space.model(k, assignments, medoids, 0, 0, vec![cost]))
}

/// Weighted cost of an arbitrary medoid set under nearest-medoid assignment.
pub fn total_cost<D: Dissimilarity>(points: &[ColorPoint], distance: &D, medoid_indices: &[usize]) -> f64 {
    let space = Space::new(points, distance);
    space.assign(medoid_indices).1
}

fn same_partition(a: &[usize], b: &[usize]) -> bool {
    let mut map = HashMap::new();
    a.iter().zip(b).all(|(x, y)| *map.entry(*x).or_insert(*y) == *y)
}

/// Points per envelope block.
const BLOCK: usize = 32;

struct Space<'a, D: Dissimilarity> {
    points: &'a [ColorPoint],
    embedded: Vec<D::Embedded>,
    /// Point indices grouped by color, then by index. Images arrive in scan
    /// order, so a run of this order is one color over a compact region.
    order: Vec<usize>,
    /// One envelope per `BLOCK` consecutive entries of `order`.
    envelopes: Vec<D::Envelope>,
    distance: &'a D,
}

impl<'a, D: Dissimilarity> Space<'a, D> {
    fn new(points: &'a [ColorPoint], distance: &'a D) -> Self {
        let embedded: Vec<D::Embedded> = points.par_iter().map(|p| distance.embed(p)).collect();
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by_key(|&i| (points[i].rgb(), i));
        let envelopes = order
            .chunks(BLOCK)
            .map(|group| {
                let members: Vec<D::Embedded> = group.iter().map(|&i| distance.embed(&points[i])).collect();
                distance.envelope(&members)
            })
            .collect();
        Self {
            points,
            embedded,
            order,
            envelopes,
            distance,
        }
    }

    #[inline]
    fn d(&self, point: usize, medoid: usize) -> f64 {
        if point == medoid {
            0.0
        } else {
            self.distance.between(&self.embedded[point], &self.embedded[medoid])
        }
    }

    #[inline]
    fn surrogate(&self, point: usize, medoid: usize) -> f64 {
        if point == medoid {
            f64::NEG_INFINITY
        } else {
            self.distance.surrogate(&self.embedded[point], &self.embedded[medoid])
        }
    }

    #[inline]
    fn w(&self, i: usize) -> f64 {
        self.points[i].weight as f64
    }

    /// Nearest-medoid assignment; `medoids` must be sorted ascending.
    fn assign(&self, medoids: &[usize]) -> (Vec<usize>, f64) {
        let own: HashMap<usize, usize> = medoids.iter().enumerate().map(|(s, &m)| (m, s)).collect();
        let nearest: Vec<(usize, f64)> = (0..self.points.len())
            .into_par_iter()
            .map(|i| {
                if let Some(&s) = own.get(&i) {
                    return (s, 0.0);
                }
                let mut best = (0, self.d(i, medoids[0]));
                for (s, &m) in medoids.iter().enumerate().skip(1) {
                    let d = self.d(i, m);
                    if d < best.1 {
                        best = (s, d);
                    }
                }
                best
            })
            .collect();
        let cost = nearest.iter().enumerate().map(|(i, &(_, d))| self.w(i) * d).sum();
        (nearest.into_iter().map(|(s, _)| s).collect(), cost)
    }

    fn cost_of(&self, assignments: &[usize], medoids: &[usize]) -> f64 {
        assignments
            .iter()
            .enumerate()
            .map(|(i, &c)| self.w(i) * self.d(i, medoids[c]))
            .sum()
    }

    /// Move each medoid to its cluster's weighted 1-median; returns sorted medoids.
    fn update_medoids(&self, assignments: &[usize], medoids: &[usize]) -> Vec<usize> {
        let mut members = vec![Vec::new(); medoids.len()];
        for (i, &c) in assignments.iter().enumerate() {
            members[c].push(i);
        }
        let mut next: Vec<usize> = members
            .iter()
            .zip(medoids)
            .map(|(group, &current)| self.group_median(group, current))
            .collect();
        next.sort_unstable();
        next
    }

    /// Member of `group` minimizing the weighted distance sum to the rest,
    /// lowest index on ties.
    ///
    /// Sums only grow, so a candidate is abandoned once it reaches the best
    /// sum seen so far. Candidates run in parallel batches, each abandoning
    /// against the best of earlier batches; the winner never gets abandoned,
    /// so the batch size does not affect the result.
    fn group_median(&self, group: &[usize], current: usize) -> usize {
        if group.len() <= 1 {
            return current;
        }
        let sum_below = |m: usize, limit: f64, strict: bool| -> Option<f64> {
            let mut sum = 0.0;
            for chunk in group.chunks(64) {
                for &j in chunk {
                    sum += self.w(j) * self.d(j, m);
                }
                if sum > limit || (!strict && sum == limit) {
                    return None;
                }
            }
            Some(sum)
        };
        // The current medoid is usually close to optimal, so it seeds the bound.
        let mut best = match group.iter().position(|&m| m == current) {
            Some(pos) => (pos, sum_below(current, f64::INFINITY, true).expect("unbounded sum")),
            None => (usize::MAX, f64::INFINITY),
        };
        let batch = 64 * rayon::current_num_threads().max(1);
        let mut start = 0;
        while start < group.len() {
            let end = (start + batch).min(group.len());
            let (best_pos, limit) = best;
            let sums: Vec<Option<f64>> = (start..end)
                .into_par_iter()
                .map(|pos| {
                    if pos == best_pos {
                        return None;
                    }
                    // an equal sum only wins from a lower index
                    sum_below(group[pos], limit, pos < best_pos)
                })
                .collect();
            for (pos, sum) in (start..end).zip(sums) {
                if let Some(sum) = sum {
                    if sum < best.1 || (sum == best.1 && pos < best.0) {
                        best = (pos, sum);
                    }
                }
            }
            start = end;
        }
        group[best.0]
    }

    fn model(
        &self,
        k: usize,
        assignments: Vec<usize>,
        medoid_indices: Vec<usize>,
        iterations: usize,
        swaps: usize,
        cost_trace: Vec<f64>,
    ) -> ClusterModel {
        let cost = self.cost_of(&assignments, &medoid_indices);
        ClusterModel {
            k,
            medoids: medoid_indices.iter().map(|&i| self.points[i]).collect(),
            assignments,
            medoid_indices,
            cost,
            starts: 1,
            iterations,
            swaps,
            swap_converged: false,
            cost_trace,
        }
    }
}

/// Nearest and second-nearest medoid slots per point.
struct SwapState {
    medoids: Vec<usize>,
    near: Vec<(usize, f64)>,
    second: Vec<(usize, f64)>,
    /// `second` distances as surrogates; a candidate only matters to a point
    /// it is closer to than this.
    second_bound: Vec<f64>,
    /// Largest `second_bound` within each envelope block.
    block_bound: Vec<f64>,
    removal_loss: Vec<f64>,
    cost: f64,
}

impl SwapState {
    fn new<D: Dissimilarity>(space: &Space<'_, D>, medoids: Vec<usize>) -> Self {
        let mut s = Self {
            medoids,
            near: Vec::new(),
            second: Vec::new(),
            second_bound: Vec::new(),
            block_bound: Vec::new(),
            removal_loss: Vec::new(),
            cost: 0.0,
        };
        s.rebuild(space);
        s
    }

    fn rebuild<D: Dissimilarity>(&mut self, space: &Space<'_, D>) {
        let medoids = &self.medoids;
        let rows: Vec<((usize, f64), (usize, f64), f64)> = (0..space.points.len())
            .into_par_iter()
            .map(|i| {
                let own = medoids.iter().position(|&m| m == i);
                // (slot, surrogate) of the two closest other medoids
                let mut near = (usize::MAX, f64::INFINITY);
                let mut second = (usize::MAX, f64::INFINITY);
                for (s, &m) in medoids.iter().enumerate() {
                    if Some(s) == own {
                        continue;
                    }
                    let v = space.surrogate(i, m);
                    if v < near.1 {
                        second = near;
                        near = (s, v);
                    } else if v < second.1 {
                        second = (s, v);
                    }
                }
                let exact = |(s, v): (usize, f64)| (s, if v.is_finite() { space.distance.from_surrogate(v) } else { v });
                match own {
                    Some(s) => ((s, 0.0), exact(near), near.1),
                    None => (exact(near), exact(second), second.1),
                }
            })
            .collect();
        self.near = rows.iter().map(|r| r.0).collect();
        self.second = rows.iter().map(|r| r.1).collect();
        self.second_bound = rows.iter().map(|r| r.2).collect();
        self.block_bound = space
            .order
            .chunks(BLOCK)
            .map(|b| b.iter().map(|&i| self.second_bound[i]).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        self.removal_loss = vec![0.0; self.medoids.len()];
        for i in 0..self.near.len() {
            let w = space.w(i);
            self.removal_loss[self.near[i].0] += w * (self.second[i].1 - self.near[i].1);
        }
        self.cost = (0..self.near.len()).map(|i| space.w(i) * self.near[i].1).sum();
    }

    /// Best `(slot, delta)` for swapping `candidate` in.
    fn evaluate<D: Dissimilarity>(&self, space: &Space<'_, D>, candidate: usize) -> (usize, f64) {
        if self.medoids.len() == 1 {
            let delta = (0..self.near.len())
                .map(|o| space.w(o) * (space.d(o, candidate) - self.near[o].1))
                .sum();
            return (0, delta);
        }
        let mut loss = self.removal_loss.clone();
        let mut gain = 0.0;
        let target = &space.embedded[candidate];
        let blocks = space.order.chunks(BLOCK).zip(&space.envelopes).zip(&self.block_bound);
        for ((block, envelope), &block_bound) in blocks {
            if space.distance.surrogate_floor(envelope, target) >= block_bound {
                continue;
            }
            for &o in block {
                let s = space.surrogate(o, candidate);
                if s >= self.second_bound[o] {
                    continue;
                }
                let w = space.w(o);
                let d = if o == candidate { 0.0 } else { space.distance.from_surrogate(s) };
                let (ns, nd) = self.near[o];
                let sd = self.second[o].1;
                if d < nd {
                    gain += w * (d - nd);
                    loss[ns] += w * (nd - sd);
                } else if d < sd {
                    loss[ns] += w * (d - sd);
                }
            }
        }
        let mut best = 0;
        for s in 1..loss.len() {
            if loss[s] < loss[best] {
                best = s;
            }
        }
        (best, gain + loss[best])
    }

    /// Eager swapping until a full cycle over `candidates` finds nothing or
    /// `max_evaluations` candidates have been tried. Returns the number of
    /// swaps and whether the search ran to completion.
    fn refine<D: Dissimilarity>(&mut self, space: &Space<'_, D>, candidates: &[usize], max_evaluations: u64) -> (usize, bool) {
        let n = candidates.len();
        let mut swaps = 0;
        let mut cursor = 0;
        let mut since_swap = 0;
        let mut remaining = max_evaluations;
        // Candidates are evaluated a batch at a time against one snapshot,
        // and the first improving one in order wins, so the outcome is the
        // same as a one-at-a-time scan for any batch size.
        let lookahead = rayon::current_num_threads().max(1);
        while since_swap < n {
            if remaining == 0 {
                log::debug!("swap budget spent after {swaps} swaps");
                return (swaps, false);
            }
            let size = lookahead.min(n - since_swap).min(remaining.try_into().unwrap_or(usize::MAX));
            let batch: Vec<usize> = (0..size).map(|off| (cursor + off) % n).collect();
            let results: Vec<Option<(usize, f64)>> = batch
                .par_iter()
                .map(|&ci| {
                    let c = candidates[ci];
                    (!self.medoids.contains(&c)).then(|| self.evaluate(space, c))
                })
                .collect();
            let eps = 1e-12 * self.cost.abs().max(1.0);
            let hit = results
                .iter()
                .position(|r| matches!(r, Some((_, delta)) if *delta < -eps));
            let consumed = match hit {
                Some(pos) => {
                    let (slot, _) = results[pos].expect("hit is Some");
                    self.medoids[slot] = candidates[batch[pos]];
                    self.rebuild(space);
                    swaps += 1;
                    since_swap = 0;
                    pos + 1
                }
                None => {
                    since_swap += batch.len();
                    batch.len()
                }
            };
            remaining -= consumed as u64;
            cursor = (cursor + consumed) % n;
        }
        (swaps, true)
    }
}

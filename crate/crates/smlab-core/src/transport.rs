//! Probability measures on `Z`, transportation LPs and their duals.
//!
//! `wasserstein_p` solves the transportation problem
//! `min Σ μ_{m,n} d(m,n)^p` over couplings with prescribed marginals by
//! successive shortest augmenting paths on the bipartite support graph,
//! which is exact at desk scale. The Kantorovich potential is then
//! recovered from the optimal coupling by solving the complementary
//! slackness difference constraints with Bellman-Ford, giving a dual
//! certificate: a 1-Lipschitz sequence whose objective matches the
//! primal cost. `connes_dual_lp` is the same LP read from the dual side,
//! realising the Connes distance `sup{|ρ(a)-ω(a)| : ‖[D,a]‖ ≤ 1}` with
//! the all-pairs Lipschitz constraint.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::zline::ZMetric;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransportError {
    #[error("empty support")]
    EmptySupport,
    #[error("weights must be nonnegative and sum to 1 within 1e-12, defect {0}")]
    NotNormalized(f64),
    #[error("support indices must be distinct")]
    DuplicateIndex,
    #[error("metric error: {0}")]
    Metric(String),
    #[error("p must be >= 1")]
    BadOrder,
    #[error("augmenting-path solver exceeded its iteration budget")]
    SolverStalled,
    #[error("no window radius certifies the tail bound")]
    NotTightInWindow,
}

impl From<crate::zline::ZlineError> for TransportError {
    fn from(e: crate::zline::ZlineError) -> Self {
        TransportError::Metric(format!("{e}"))
    }
}

/// Finitely supported probability vector on `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbOnZ {
    support: Vec<i64>,
    weights: Vec<f64>,
}

impl ProbOnZ {
    /// Build from `(index, weight)` pairs. Weights below `1e-15` are
    /// pruned; the remainder must sum to 1 within `1e-12`.
    pub fn new(mut pairs: Vec<(i64, f64)>) -> Result<Self, TransportError> {
        pairs.retain(|&(_, w)| w > 1e-15);
        pairs.sort_by_key(|&(n, _)| n);
        if pairs.is_empty() {
            return Err(TransportError::EmptySupport);
        }
        for k in 1..pairs.len() {
            if pairs[k].0 == pairs[k - 1].0 {
                return Err(TransportError::DuplicateIndex);
            }
        }
        let total: f64 = pairs.iter().map(|&(_, w)| w).sum();
        if !total.is_finite() || math::abs(total - 1.0) > 1e-12 {
            return Err(TransportError::NotNormalized(math::abs(total - 1.0)));
        }
        let support = pairs.iter().map(|&(n, _)| n).collect();
        let weights = pairs.iter().map(|&(_, w)| w).collect();
        Ok(Self { support, weights })
    }

    pub fn dirac(n: i64) -> Self {
        Self {
            support: vec![n],
            weights: vec![1.0],
        }
    }

    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight_at(&self, n: i64) -> f64 {
        match self.support.binary_search(&n) {
            Ok(i) => self.weights[i],
            Err(_) => 0.0,
        }
    }

    /// `ρ(a)` for a pointwise-given observable.
    pub fn expect(&self, a: impl Fn(i64) -> f64) -> f64 {
        self.support
            .iter()
            .zip(&self.weights)
            .map(|(&n, &w)| w * a(n))
            .sum()
    }

    /// First-moment tail `Σ_{|n| > r} |n| ρ_n`.
    pub fn moment_tail(&self, r: i64) -> f64 {
        self.support
            .iter()
            .zip(&self.weights)
            .filter(|&(&n, _)| n.abs() > r)
            .map(|(&n, &w)| (n.abs() as f64) * w)
            .sum()
    }
}

/// Joint coupling with prescribed marginals.
#[derive(Debug, Clone)]
pub struct Coupling {
    pub row_indices: Vec<i64>,
    pub col_indices: Vec<i64>,
    /// Row-major `rows x cols` matrix of masses.
    pub mass: Vec<f64>,
}

impl Coupling {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mass[i * self.col_indices.len() + j]
    }

    /// Largest deviation of the row/column sums from the marginals.
    pub fn marginal_defect(&self, rho: &ProbOnZ, omega: &ProbOnZ) -> f64 {
        let cols = self.col_indices.len();
        let mut worst = 0.0f64;
        for (i, &n) in self.row_indices.iter().enumerate() {
            let sum: f64 = self.mass[i * cols..(i + 1) * cols].iter().sum();
            worst = worst.max(math::abs(sum - rho.weight_at(n)));
        }
        for (j, &n) in self.col_indices.iter().enumerate() {
            let sum: f64 = (0..self.row_indices.len()).map(|i| self.get(i, j)).sum();
            worst = worst.max(math::abs(sum - omega.weight_at(n)));
        }
        worst
    }

    pub fn cost_against(&self, cost: impl Fn(i64, i64) -> f64) -> f64 {
        let mut total = 0.0;
        for (i, &m) in self.row_indices.iter().enumerate() {
            for (j, &n) in self.col_indices.iter().enumerate() {
                let mu = self.get(i, j);
                if mu > 0.0 {
                    total += mu * cost(m, n);
                }
            }
        }
        total
    }
}

/// A solved transport instance: the optimal value, an optimal coupling,
/// and a Kantorovich potential certifying optimality.
#[derive(Debug, Clone)]
pub struct TransportResult {
    /// The operation's headline value: the primal cost `Σ μ d^p` for the
    /// transportation LP, the dual objective for the Lipschitz-dual LP.
    /// The two agree within `duality_gap()`.
    pub value: f64,
    /// Primal objective `Σ μ d^p` of the returned coupling.
    pub primal_cost: f64,
    /// Dual objective `Σ (ρ_n - ω_n) a_n` of the returned potential.
    pub dual_value: f64,
    /// The order `p` of the ground cost `d^p`.
    pub order: f64,
    pub coupling: Coupling,
    /// Potential on the union of the supports, normalised to vanish at
    /// the smallest support index; 1-Lipschitz for the cost `d^p`.
    pub dual_potential: Vec<(i64, f64)>,
}

impl TransportResult {
    pub fn duality_gap(&self) -> f64 {
        math::abs(self.primal_cost - self.dual_value)
    }

    /// The Wasserstein distance itself: `(Σ μ d^p)^{1/p}`.
    pub fn distance(&self) -> f64 {
        math::powf(self.primal_cost.max(0.0), 1.0 / self.order)
    }

    pub fn potential_at(&self, n: i64) -> f64 {
        match self.dual_potential.binary_search_by_key(&n, |&(m, _)| m) {
            Ok(i) => self.dual_potential[i].1,
            Err(_) => 0.0,
        }
    }

    /// Worst violation of `|a_m - a_n| ≤ cost(m, n)` over the union.
    pub fn lipschitz_defect(&self, cost: impl Fn(i64, i64) -> f64) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for (i, &(m, am)) in self.dual_potential.iter().enumerate() {
            for &(n, an) in &self.dual_potential[i + 1..] {
                worst = worst.max(math::abs(am - an) - cost(m, n));
            }
        }
        worst.max(0.0)
    }
}

/// Wasserstein distance of order `p ≥ 1`: returns the optimal coupling
/// for the cost `d^p`; `value` is the LP optimum, so `W_p = value^(1/p)`.
pub fn wasserstein_p(
    rho: &ProbOnZ,
    omega: &ProbOnZ,
    metric: &ZMetric,
    p: f64,
) -> Result<TransportResult, TransportError> {
    if p < 1.0 {
        return Err(TransportError::BadOrder);
    }
    let cost = |m: i64, n: i64| -> Result<f64, TransportError> {
        if m == n {
            return Ok(0.0);
        }
        Ok(math::powf(metric.distance(m, n)?, p))
    };
    let mut result = solve_transport(rho, omega, &cost)?;
    result.order = p;
    Ok(result)
}

/// The Connes distance as the Lipschitz-dual LP: maximise
/// `Σ (ρ_n - ω_n) a_n` over `|a_m - a_n| ≤ d(m, n)`. Equal to `W_1` by
/// Kantorovich-Rubinstein; the returned potential is the optimiser.
pub fn connes_dual_lp(
    rho: &ProbOnZ,
    omega: &ProbOnZ,
    metric: &ZMetric,
) -> Result<TransportResult, TransportError> {
    let cost = |m: i64, n: i64| -> Result<f64, TransportError> {
        if m == n {
            return Ok(0.0);
        }
        Ok(metric.distance(m, n)?)
    };
    let mut result = solve_transport(rho, omega, &cost)?;
    // The Connes distance is the supremum the dual side computes; the
    // primal optimum certifies it through the duality gap.
    result.value = result.dual_value;
    Ok(result)
}

fn solve_transport(
    rho: &ProbOnZ,
    omega: &ProbOnZ,
    cost: &dyn Fn(i64, i64) -> Result<f64, TransportError>,
) -> Result<TransportResult, TransportError> {
    let m = rho.support().len();
    let n = omega.support().len();
    if m == 0 || n == 0 {
        return Err(TransportError::EmptySupport);
    }
    let mut costs = vec![0.0f64; m * n];
    for (i, &x) in rho.support().iter().enumerate() {
        for (j, &y) in omega.support().iter().enumerate() {
            costs[i * n + j] = cost(x, y)?;
        }
    }
    let flow = min_cost_transport(rho.weights(), omega.weights(), &costs)?;
    let coupling = Coupling {
        row_indices: rho.support().to_vec(),
        col_indices: omega.support().to_vec(),
        mass: flow,
    };
    let primal_cost: f64 = coupling
        .mass
        .iter()
        .zip(costs.iter())
        .map(|(&mu, &c)| mu * c)
        .sum();

    // Union of supports, sorted; the potential lives here.
    let mut union: Vec<i64> = rho.support().to_vec();
    union.extend_from_slice(omega.support());
    union.sort_unstable();
    union.dedup();
    let pot = recover_potential(&union, &coupling, cost)?;
    let dual_value: f64 = union
        .iter()
        .zip(&pot)
        .map(|(&u, &a)| (rho.weight_at(u) - omega.weight_at(u)) * a)
        .sum();

    Ok(TransportResult {
        value: primal_cost,
        primal_cost,
        dual_value,
        order: 1.0,
        coupling,
        dual_potential: union.into_iter().zip(pot).collect(),
    })
}

/// Successive shortest augmenting paths with Johnson potentials on the
/// bipartite transportation graph. Exact optimum; deterministic.
fn min_cost_transport(
    supply: &[f64],
    demand: &[f64],
    costs: &[f64],
) -> Result<Vec<f64>, TransportError> {
    let m = supply.len();
    let n = demand.len();
    let nodes = m + n + 2;
    let source = m + n;
    let sink = m + n + 1;

    // Paired forward/backward arcs; arc k's twin is k ^ 1.
    let mut arc_to: Vec<usize> = Vec::new();
    let mut arc_cap: Vec<f64> = Vec::new();
    let mut arc_cost: Vec<f64> = Vec::new();
    let mut head: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    {
        let mut push_arc = |from: usize, to: usize, cap: f64, cost: f64| {
            head[from].push(arc_to.len());
            arc_to.push(to);
            arc_cap.push(cap);
            arc_cost.push(cost);
            head[to].push(arc_to.len());
            arc_to.push(from);
            arc_cap.push(0.0);
            arc_cost.push(-cost);
        };
        for (i, &s) in supply.iter().enumerate() {
            push_arc(source, i, s, 0.0);
        }
        for (j, &d) in demand.iter().enumerate() {
            push_arc(m + j, sink, d, 0.0);
        }
        for i in 0..m {
            for j in 0..n {
                push_arc(i, m + j, f64::INFINITY, costs[i * n + j]);
            }
        }
    }

    let mut potential = vec![0.0f64; nodes];
    let max_rounds = 64 * (m + n) + 4096;
    let mut routed_all = false;
    for _round in 0..max_rounds {
        // Dense Dijkstra on reduced costs.
        let mut dist = vec![f64::INFINITY; nodes];
        let mut parent: Vec<Option<usize>> = vec![None; nodes];
        let mut done = vec![false; nodes];
        dist[source] = 0.0;
        for _ in 0..nodes {
            let mut u = usize::MAX;
            let mut best = f64::INFINITY;
            for v in 0..nodes {
                if !done[v] && dist[v] < best {
                    best = dist[v];
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            for &a in &head[u] {
                if arc_cap[a] <= 0.0 {
                    continue;
                }
                let v = arc_to[a];
                let rc = (arc_cost[a] + potential[u] - potential[v]).max(0.0);
                if dist[u] + rc < dist[v] {
                    dist[v] = dist[u] + rc;
                    parent[v] = Some(a);
                }
            }
        }
        if dist[sink].is_infinite() {
            routed_all = true;
            break;
        }
        for v in 0..nodes {
            potential[v] += if dist[v].is_finite() {
                dist[v]
            } else {
                dist[sink]
            };
        }
        // Bottleneck along the augmenting path.
        let mut bottleneck = f64::INFINITY;
        let mut v = sink;
        while let Some(a) = parent[v] {
            bottleneck = bottleneck.min(arc_cap[a]);
            v = arc_to[a ^ 1];
        }
        if !(bottleneck > 0.0) {
            return Err(TransportError::SolverStalled);
        }
        let mut v = sink;
        while let Some(a) = parent[v] {
            arc_cap[a] -= bottleneck;
            if arc_cap[a] < 0.0 {
                arc_cap[a] = 0.0;
            }
            arc_cap[a ^ 1] += bottleneck;
            v = arc_to[a ^ 1];
        }
    }
    if !routed_all {
        // Check whether the loop simply ran out of rounds with work left.
        let leftover: f64 = (0..m).map(|i| arc_cap[2 * i]).sum();
        if leftover > 1e-9 {
            return Err(TransportError::SolverStalled);
        }
    }

    // Flow on arc (i, j) is the accumulated reverse capacity.
    let mut flow = vec![0.0f64; m * n];
    let base = 2 * (m + n);
    for i in 0..m {
        for j in 0..n {
            let a = base + 2 * (i * n + j);
            flow[i * n + j] = arc_cap[a + 1];
        }
    }
    Ok(flow)
}

/// Solve the complementary-slackness difference constraints
/// `|a_u - a_v| ≤ c(u, v)` plus `a_x - a_y = c(x, y)` on flow-carrying
/// arcs, by Bellman-Ford from the smallest union index.
fn recover_potential(
    union: &[i64],
    coupling: &Coupling,
    cost: &dyn Fn(i64, i64) -> Result<f64, TransportError>,
) -> Result<Vec<f64>, TransportError> {
    let k = union.len();
    let pos = |n: i64| union.binary_search(&n).expect("index in union");
    // Edges (from, to, weight) meaning a_to <= a_from + weight.
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for (i, &u) in union.iter().enumerate() {
        for &v in &union[i + 1..] {
            let c = cost(u, v)?;
            edges.push((i, pos(v), c));
            edges.push((pos(v), i, c));
        }
    }
    for (i, &x) in coupling.row_indices.iter().enumerate() {
        for (j, &y) in coupling.col_indices.iter().enumerate() {
            if coupling.get(i, j) > 1e-13 && x != y {
                // tight: a_y <= a_x - c(x, y)
                edges.push((pos(x), pos(y), -cost(x, y)?));
            }
        }
    }
    let mut a = vec![f64::INFINITY; k];
    a[0] = 0.0;
    for _ in 0..=k {
        let mut changed = false;
        for &(from, to, w) in &edges {
            if a[from].is_finite() && a[from] + w < a[to] - 1e-13 {
                a[to] = a[from] + w;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let shift = a[0];
    Ok(a.into_iter().map(|x| x - shift).collect())
}

/// Independent 1-D optimal-transport identity for path-gap metrics:
/// `W_1 = Σ_n d(n+1, n) |F_ρ(n) - F_ω(n)|` with `F` the cumulative sums.
pub fn w1_line_oracle(
    rho: &ProbOnZ,
    omega: &ProbOnZ,
    metric: &ZMetric,
) -> Result<f64, TransportError> {
    let window = match metric {
        ZMetric::PathGaps { window, .. } => *window,
        _ => {
            return Err(TransportError::Metric(String::from(
                "line oracle needs a path-gap metric",
            )))
        }
    };
    let mut total = 0.0;
    let mut f_rho = 0.0;
    let mut f_omega = 0.0;
    for n in window.lo()..window.hi() {
        f_rho += rho.weight_at(n);
        f_omega += omega.weight_at(n);
        total += metric.distance(n, n + 1)? * math::abs(f_rho - f_omega);
    }
    Ok(total)
}

/// The explicit near-diagonal coupling from Dobrushin's weak-* argument:
/// `μ_{m,n} = r_n δ_{m,n} + ω⁺_m ω⁻_n / C` with `r_n = min(ρj_n, ρ_n)`
/// inside radius `cap` and 0 outside. Degenerate `C = 0` collapses to
/// the diagonal coupling.
pub fn dobrushin_coupling(rho_j: &ProbOnZ, rho: &ProbOnZ, cap: i64) -> Coupling {
    let mut union: Vec<i64> = rho_j.support().to_vec();
    union.extend_from_slice(rho.support());
    union.sort_unstable();
    union.dedup();
    let r: Vec<f64> = union
        .iter()
        .map(|&n| {
            if n.abs() <= cap {
                rho_j.weight_at(n).min(rho.weight_at(n))
            } else {
                0.0
            }
        })
        .collect();
    let plus: Vec<f64> = union
        .iter()
        .zip(&r)
        .map(|(&n, &rn)| rho_j.weight_at(n) - rn)
        .collect();
    let minus: Vec<f64> = union
        .iter()
        .zip(&r)
        .map(|(&n, &rn)| rho.weight_at(n) - rn)
        .collect();
    let c: f64 = plus.iter().sum();
    let k = union.len();
    let mut mass = vec![0.0f64; k * k];
    for i in 0..k {
        if r[i] > 0.0 {
            mass[i * k + i] += r[i];
        }
    }
    if c > 1e-15 {
        for i in 0..k {
            if plus[i] == 0.0 {
                continue;
            }
            for j in 0..k {
                mass[i * k + j] += plus[i] * minus[j] / c;
            }
        }
    } else {
        for i in 0..k {
            mass[i * k + i] += rho_j.weight_at(union[i]) - r[i];
        }
    }
    Coupling {
        row_indices: union.clone(),
        col_indices: union,
        mass,
    }
}

/// Transport cost of the Dobrushin coupling for the usual metric,
/// together with the bound `Σ (ρj_n + ρ_n - 2 r_n) |n|` from the proof.
pub fn dobrushin_cost_and_bound(rho_j: &ProbOnZ, rho: &ProbOnZ, cap: i64) -> (f64, f64) {
    let coupling = dobrushin_coupling(rho_j, rho, cap);
    let cost = coupling.cost_against(|m, n| (m - n).abs() as f64);
    let mut union: Vec<i64> = rho_j.support().to_vec();
    union.extend_from_slice(rho.support());
    union.sort_unstable();
    union.dedup();
    let bound: f64 = union
        .iter()
        .map(|&n| {
            let r = if n.abs() <= cap {
                rho_j.weight_at(n).min(rho.weight_at(n))
            } else {
                0.0
            };
            (rho_j.weight_at(n) + rho.weight_at(n) - 2.0 * r) * (n.abs() as f64)
        })
        .sum();
    (cost, bound)
}

/// Smallest radius `N` with first-moment tail `≤ eps` for every member.
pub fn d_tight_radius(family: &[ProbOnZ], eps: f64) -> Result<i64, TransportError> {
    let max_extent = family
        .iter()
        .flat_map(|p| p.support().iter().map(|n| n.abs()))
        .max()
        .ok_or(TransportError::EmptySupport)?;
    for radius in 0..=max_extent {
        if family.iter().all(|p| p.moment_tail(radius) <= eps) {
            return Ok(radius);
        }
    }
    Err(TransportError::NotTightInWindow)
}

/// Slack report for the weak-convergence and first-moment estimates
/// against `W_1` in the usual metric (computed by the exact CDF sum).
#[derive(Debug, Clone)]
pub struct MomentBounds {
    pub w1: f64,
    /// `2 ‖a‖ W_1 - |ρ(a) - ω(a)|`, nonnegative when the bound holds.
    pub weak_slack: f64,
    /// `W_1 - |Σ (ρ_n - ω_n) |n||`, nonnegative when the bound holds.
    pub moment_slack: f64,
}

pub fn moment_bounds_check(rho: &ProbOnZ, omega: &ProbOnZ, a: &[(i64, f64)]) -> MomentBounds {
    // Exact W_1 for the usual metric: unit-gap CDF sum over the hull.
    let lo = rho.support()[0].min(omega.support()[0]);
    let hi = *rho
        .support()
        .last()
        .unwrap()
        .max(omega.support().last().unwrap());
    let mut w1 = 0.0;
    let mut f_rho = 0.0;
    let mut f_omega = 0.0;
    for n in lo..hi {
        f_rho += rho.weight_at(n);
        f_omega += omega.weight_at(n);
        w1 += math::abs(f_rho - f_omega);
    }
    let lookup = |n: i64| {
        a.iter()
            .find(|&&(m, _)| m == n)
            .map(|&(_, v)| v)
            .unwrap_or(0.0)
    };
    let sup_a = a.iter().fold(0.0f64, |m, &(_, v)| m.max(math::abs(v)));
    let pairing = math::abs(rho.expect(lookup) - omega.expect(lookup));
    let first_moment = math::abs(rho.expect(|n| n.abs() as f64) - omega.expect(|n| n.abs() as f64));
    MomentBounds {
        w1,
        weak_slack: 2.0 * sup_a * w1 - pairing,
        moment_slack: w1 - first_moment,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use crate::zline::Window;

    fn win(n: i64) -> Window {
        Window::new(n).unwrap()
    }

    fn random_prob(rng: &mut SplitMix64, window: Window, max_atoms: usize) -> ProbOnZ {
        let atoms = 1 + rng.next_below(max_atoms as u64) as usize;
        let mut pairs: Vec<(i64, f64)> = Vec::new();
        let mut used = alloc::collections::BTreeSet::new();
        while pairs.len() < atoms {
            let n = window.lo() + rng.next_below(window.len() as u64) as i64;
            if used.insert(n) {
                pairs.push((n, 0.05 + rng.next_f64()));
            }
        }
        let total: f64 = pairs.iter().map(|&(_, w)| w).sum();
        ProbOnZ::new(pairs.into_iter().map(|(n, w)| (n, w / total)).collect()).unwrap()
    }

    #[test]
    fn point_mass_distances() {
        let w = win(5);
        let unit = ZMetric::unit_gaps(w);
        let zero = wasserstein_p(&ProbOnZ::dirac(0), &ProbOnZ::dirac(0), &unit, 1.0).unwrap();
        assert_eq!(zero.value, 0.0);
        let three = wasserstein_p(&ProbOnZ::dirac(0), &ProbOnZ::dirac(3), &unit, 1.0).unwrap();
        assert!((three.value - 3.0).abs() < 1e-12);
        assert!(three.duality_gap() < 1e-10);
    }

    #[test]
    fn split_mass_example() {
        // ρ = (δ0 + δ2)/2 vs ω = δ1 in the usual metric: both atoms travel
        // distance 1, total cost 1; the coupling is forced.
        let w = win(5);
        let unit = ZMetric::unit_gaps(w);
        let rho = ProbOnZ::new(vec![(0, 0.5), (2, 0.5)]).unwrap();
        let omega = ProbOnZ::dirac(1);
        let r = wasserstein_p(&rho, &omega, &unit, 1.0).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(r.coupling.marginal_defect(&rho, &omega) < 1e-12);
    }

    /// Exhaustive enumeration of extreme couplings for tiny supports:
    /// every vertex of the transportation polytope is supported on a
    /// spanning forest, found here by brute force over arc subsets of
    /// size m + n - 1 solved by leaf peeling.
    fn brute_force_transport(
        rho: &ProbOnZ,
        omega: &ProbOnZ,
        cost: impl Fn(i64, i64) -> f64,
    ) -> f64 {
        let m = rho.support().len();
        let n = omega.support().len();
        let arcs: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        let want = m + n - 1;
        let mut best = f64::INFINITY;
        let total = 1usize << arcs.len();
        for mask in 0..total {
            if (mask as u32).count_ones() as usize != want {
                continue;
            }
            let chosen: Vec<(usize, usize)> = arcs
                .iter()
                .enumerate()
                .filter(|&(k, _)| mask >> k & 1 == 1)
                .map(|(_, &a)| a)
                .collect();
            let mut supply: Vec<f64> = rho.weights().to_vec();
            let mut demand: Vec<f64> = omega.weights().to_vec();
            let mut remaining = chosen;
            let mut mass = alloc::collections::BTreeMap::new();
            let mut ok = true;
            while !remaining.is_empty() {
                let mut progress = false;
                for k in 0..remaining.len() {
                    let (i, j) = remaining[k];
                    let row_deg = remaining.iter().filter(|&&(a, _)| a == i).count();
                    let col_deg = remaining.iter().filter(|&&(_, b)| b == j).count();
                    if row_deg == 1 || col_deg == 1 {
                        let amount = if row_deg == 1 { supply[i] } else { demand[j] };
                        mass.insert((i, j), amount);
                        supply[i] -= amount;
                        demand[j] -= amount;
                        remaining.swap_remove(k);
                        progress = true;
                        break;
                    }
                }
                if !progress {
                    ok = false; // contains a cycle, not a vertex
                    break;
                }
            }
            if !ok
                || supply.iter().any(|&s| math::abs(s) > 1e-9)
                || demand.iter().any(|&d| math::abs(d) > 1e-9)
                || mass.values().any(|&v| v < -1e-9)
            {
                continue;
            }
            let c: f64 = mass
                .iter()
                .map(|(&(i, j), &v)| v.max(0.0) * cost(rho.support()[i], omega.support()[j]))
                .sum();
            best = best.min(c);
        }
        best
    }

    #[test]
    fn lp_matches_extreme_coupling_enumeration() {
        let w = win(6);
        let mut rng = SplitMix64::new(5150);
        for _ in 0..25 {
            let gaps: Vec<f64> = (0..w.len() - 1).map(|_| 0.1 + rng.next_f64()).collect();
            let metric = ZMetric::path_gaps(w, gaps).unwrap();
            let rho = random_prob(&mut rng, w, 3);
            let omega = random_prob(&mut rng, w, 3);
            let lp = wasserstein_p(&rho, &omega, &metric, 1.0).unwrap();
            let brute = brute_force_transport(&rho, &omega, |m, n| metric.distance(m, n).unwrap());
            assert!((lp.value - brute).abs() < 1e-9, "{} vs {}", lp.value, brute);
        }
    }

    #[test]
    fn line_oracle_examples_and_cross_check() {
        let w = win(6);
        let unit = ZMetric::unit_gaps(w);
        let one = w1_line_oracle(&ProbOnZ::dirac(0), &ProbOnZ::dirac(1), &unit).unwrap();
        assert_eq!(one, 1.0);
        let rho = ProbOnZ::new(vec![(0, 0.5), (2, 0.5)]).unwrap();
        assert_eq!(
            w1_line_oracle(&rho, &ProbOnZ::dirac(1), &unit).unwrap(),
            1.0
        );

        let mut rng = SplitMix64::new(777);
        for _ in 0..200 {
            let gaps: Vec<f64> = (0..w.len() - 1).map(|_| 0.05 + rng.next_f64()).collect();
            let metric = ZMetric::path_gaps(w, gaps).unwrap();
            let rho = random_prob(&mut rng, w, 4);
            let omega = random_prob(&mut rng, w, 4);
            let lp = wasserstein_p(&rho, &omega, &metric, 1.0).unwrap();
            let cdf = w1_line_oracle(&rho, &omega, &metric).unwrap();
            assert!((lp.value - cdf).abs() < 1e-9, "{} vs {}", lp.value, cdf);
        }
    }

    #[test]
    fn connes_dual_basics() {
        let w = win(5);
        let tanh = ZMetric::tanh_profile(2 * w.half() as usize);
        let same = connes_dual_lp(&ProbOnZ::dirac(2), &ProbOnZ::dirac(2), &tanh).unwrap();
        assert_eq!(same.value, 0.0);
        // Point masses: the distance itself, witnessed by a(x) = d(x, n).
        let r = connes_dual_lp(&ProbOnZ::dirac(-2), &ProbOnZ::dirac(3), &tanh).unwrap();
        let expect = tanh.distance(-2, 3).unwrap();
        assert!((r.value - expect).abs() < 1e-10);
        assert!(r.lipschitz_defect(|m, n| tanh.distance(m, n).unwrap()) < 1e-10);
        assert!(r.duality_gap() < 1e-10);
        // Normalisation: potential vanishes at the smallest union index,
        // and stays within the diameter of the support union.
        assert_eq!(r.potential_at(-2), 0.0);
        let diam = tanh.distance(-2, 3).unwrap();
        for &(_, a) in &r.dual_potential {
            assert!(math::abs(a) <= diam + 1e-12);
        }
    }

    /// Brute-force oracle over vertex potentials: every vertex of the
    /// anchored Lipschitz polytope comes from a spanning tree of tight
    /// constraints with a sign per edge; trees are enumerated through
    /// Prüfer sequences.
    fn brute_force_dual(rho: &ProbOnZ, omega: &ProbOnZ, metric: &ZMetric) -> f64 {
        let mut union: Vec<i64> = rho.support().to_vec();
        union.extend_from_slice(omega.support());
        union.sort_unstable();
        union.dedup();
        let k = union.len();
        if k == 1 {
            return 0.0;
        }
        let d = |i: usize, j: usize| metric.distance(union[i], union[j]).unwrap();
        let objective = |a: &[f64]| -> f64 {
            union
                .iter()
                .zip(a)
                .map(|(&u, &av)| (rho.weight_at(u) - omega.weight_at(u)) * av)
                .sum()
        };
        let mut best = f64::NEG_INFINITY;
        let seq_len = k.saturating_sub(2);
        let total: usize = (0..seq_len).map(|_| k).product::<usize>().max(1);
        for code in 0..total {
            let mut prufer = Vec::with_capacity(seq_len);
            let mut c = code;
            for _ in 0..seq_len {
                prufer.push(c % k);
                c /= k;
            }
            let mut degree = vec![1usize; k];
            for &p in &prufer {
                degree[p] += 1;
            }
            let mut edges: Vec<(usize, usize)> = Vec::with_capacity(k - 1);
            let mut deg = degree;
            let mut used = vec![false; k];
            for &p in &prufer {
                let leaf = (0..k).find(|&v| deg[v] == 1 && !used[v]).unwrap();
                edges.push((leaf, p));
                used[leaf] = true;
                deg[p] -= 1;
            }
            let rest: Vec<usize> = (0..k).filter(|&v| !used[v] && deg[v] >= 1).collect();
            edges.push((rest[0], rest[1]));
            for signs in 0..(1usize << (k - 1)) {
                let mut a = vec![f64::NAN; k];
                a[0] = 0.0;
                let mut frontier = vec![0usize];
                let mut seen = vec![false; k];
                seen[0] = true;
                while let Some(u) = frontier.pop() {
                    for (e, &(x, y)) in edges.iter().enumerate() {
                        let (p, q) = if x == u && !seen[y] {
                            (x, y)
                        } else if y == u && !seen[x] {
                            (y, x)
                        } else {
                            continue;
                        };
                        let sign = if signs >> e & 1 == 1 { 1.0 } else { -1.0 };
                        a[q] = a[p] + sign * d(p, q);
                        seen[q] = true;
                        frontier.push(q);
                    }
                }
                let mut feasible = true;
                'outer: for i in 0..k {
                    for j in (i + 1)..k {
                        if math::abs(a[i] - a[j]) > d(i, j) + 1e-11 {
                            feasible = false;
                            break 'outer;
                        }
                    }
                }
                if feasible {
                    best = best.max(objective(&a));
                }
            }
        }
        best
    }

    #[test]
    fn dual_lp_matches_vertex_enumeration_oracle() {
        let w = win(6);
        let mut rng = SplitMix64::new(31337);
        for _ in 0..12 {
            let metric = ZMetric::tanh_profile(2 * w.half() as usize);
            let rho = random_prob(&mut rng, w, 3);
            let omega = random_prob(&mut rng, w, 3);
            let lp = connes_dual_lp(&rho, &omega, &metric).unwrap();
            let brute = brute_force_dual(&rho, &omega, &metric);
            assert!((lp.value - brute).abs() < 1e-8, "{} vs {}", lp.value, brute);
        }
    }

    #[test]
    fn kantorovich_rubinstein_on_random_pairs() {
        let w = win(8);
        let mut rng = SplitMix64::new(2024);
        let metric = ZMetric::tanh_profile(2 * w.half() as usize);
        for _ in 0..100 {
            let rho = random_prob(&mut rng, w, 5);
            let omega = random_prob(&mut rng, w, 5);
            let wass = wasserstein_p(&rho, &omega, &metric, 1.0).unwrap();
            let dual = connes_dual_lp(&rho, &omega, &metric).unwrap();
            assert!((wass.value - dual.dual_value).abs() < 1e-7);
            assert!(dual.duality_gap() < 1e-9);
            assert!(wass.coupling.marginal_defect(&rho, &omega) < 1e-10);
            assert!(dual.lipschitz_defect(|m, n| metric.distance(m, n).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn triangle_inequality_sampled() {
        let w = win(6);
        let mut rng = SplitMix64::new(8);
        let metric = ZMetric::tanh_profile(2 * w.half() as usize);
        for _ in 0..30 {
            let a = random_prob(&mut rng, w, 4);
            let b = random_prob(&mut rng, w, 4);
            let c = random_prob(&mut rng, w, 4);
            let ab = wasserstein_p(&a, &b, &metric, 1.0).unwrap().value;
            let bc = wasserstein_p(&b, &c, &metric, 1.0).unwrap().value;
            let ac = wasserstein_p(&a, &c, &metric, 1.0).unwrap().value;
            assert!(ac <= ab + bc + 1e-7);
            let ba = wasserstein_p(&b, &a, &metric, 1.0).unwrap().value;
            assert!((ab - ba).abs() < 1e-9);
        }
    }

    #[test]
    fn higher_order_distance() {
        let w = win(5);
        let unit = ZMetric::unit_gaps(w);
        // point masses three apart at p = 2: cost 9, W_2 = 3.
        let r = wasserstein_p(&ProbOnZ::dirac(0), &ProbOnZ::dirac(3), &unit, 2.0).unwrap();
        assert!((r.primal_cost - 9.0).abs() < 1e-12);
        assert!((r.distance() - 3.0).abs() < 1e-12);
        assert!(r.duality_gap() < 1e-9);
        // W_2 triangle inequality on sampled triples.
        let mut rng = SplitMix64::new(44);
        for _ in 0..20 {
            let a = random_prob(&mut rng, w, 4);
            let b = random_prob(&mut rng, w, 4);
            let c = random_prob(&mut rng, w, 4);
            let ab = wasserstein_p(&a, &b, &unit, 2.0).unwrap().distance();
            let bc = wasserstein_p(&b, &c, &unit, 2.0).unwrap().distance();
            let ac = wasserstein_p(&a, &c, &unit, 2.0).unwrap().distance();
            assert!(ac <= ab + bc + 1e-7, "{ac} vs {ab} + {bc}");
        }
        assert!(matches!(
            wasserstein_p(&ProbOnZ::dirac(0), &ProbOnZ::dirac(1), &unit, 0.5),
            Err(TransportError::BadOrder)
        ));
    }

    #[test]
    fn dobrushin_examples() {
        let p = ProbOnZ::new(vec![(0, 0.5), (1, 0.5)]).unwrap();
        let (cost, bound) = dobrushin_cost_and_bound(&p, &p, 5);
        assert_eq!(cost, 0.0);
        assert!(bound >= cost);

        // δ1 vs δ0 with radius 0: pure outer product, cost 1.
        let (cost, _) = dobrushin_cost_and_bound(&ProbOnZ::dirac(1), &ProbOnZ::dirac(0), 0);
        assert!((cost - 1.0).abs() < 1e-12);

        let mut rng = SplitMix64::new(613);
        let w = win(6);
        for _ in 0..100 {
            let a = random_prob(&mut rng, w, 5);
            let b = random_prob(&mut rng, w, 5);
            let cap = rng.next_below(7) as i64;
            let coupling = dobrushin_coupling(&a, &b, cap);
            assert!(coupling.marginal_defect(&a, &b) < 1e-12);
            let (cost, bound) = dobrushin_cost_and_bound(&a, &b, cap);
            assert!(cost <= bound + 1e-12);
        }
    }

    #[test]
    fn d_tight_examples() {
        assert_eq!(d_tight_radius(&[ProbOnZ::dirac(0)], 0.1).unwrap(), 0);
        assert_eq!(d_tight_radius(&[ProbOnZ::dirac(5)], 0.1).unwrap(), 5);
        // Geometric family: certified radius shrinks as eps grows.
        let geo: Vec<(i64, f64)> = (-8i64..=8)
            .map(|n| (n, math::powi(2.0, -(n.abs() as i32))))
            .collect();
        let z: f64 = geo.iter().map(|&(_, w)| w).sum();
        let geo = ProbOnZ::new(geo.into_iter().map(|(n, w)| (n, w / z)).collect()).unwrap();
        let tight = d_tight_radius(&[geo.clone()], 0.01).unwrap();
        let loose = d_tight_radius(&[geo], 0.5).unwrap();
        assert!(tight > loose);
    }

    #[test]
    fn moment_bound_examples() {
        let rho = ProbOnZ::dirac(0);
        let omega = ProbOnZ::dirac(1);
        let a = vec![(0i64, 1.0)];
        let report = moment_bounds_check(&rho, &omega, &a);
        assert!((report.w1 - 1.0).abs() < 1e-12);
        assert!(report.weak_slack >= -1e-9);
        assert!(report.moment_slack >= -1e-9);

        let same = moment_bounds_check(&rho, &rho, &a);
        assert_eq!(same.w1, 0.0);

        let w = win(6);
        let mut rng = SplitMix64::new(99);
        for _ in 0..100 {
            let p = random_prob(&mut rng, w, 5);
            let q = random_prob(&mut rng, w, 5);
            let a: Vec<(i64, f64)> = w.iter().map(|n| (n, rng.next_symmetric())).collect();
            let rep = moment_bounds_check(&p, &q, &a);
            assert!(rep.weak_slack >= -1e-9);
            assert!(rep.moment_slack >= -1e-9);
        }
    }

    #[test]
    fn prob_validation() {
        assert!(matches!(
            ProbOnZ::new(vec![]),
            Err(TransportError::EmptySupport)
        ));
        assert!(matches!(
            ProbOnZ::new(vec![(0, 0.7)]),
            Err(TransportError::NotNormalized(_))
        ));
        assert!(matches!(
            ProbOnZ::new(vec![(0, 0.5), (0, 0.5)]),
            Err(TransportError::DuplicateIndex)
        ));
    }

    #[test]
    fn degenerate_ties_stay_deterministic_and_optimal() {
        // Uniform masses on a symmetric configuration create many optimal
        // couplings; repeated solves must return the identical one, and
        // the value must match the CDF oracle.
        let w = win(6);
        let unit = ZMetric::unit_gaps(w);
        let rho = ProbOnZ::new(vec![(-4, 0.25), (-2, 0.25), (2, 0.25), (4, 0.25)]).unwrap();
        let omega = ProbOnZ::new(vec![(-3, 0.5), (3, 0.5)]).unwrap();
        let first = wasserstein_p(&rho, &omega, &unit, 1.0).unwrap();
        let second = wasserstein_p(&rho, &omega, &unit, 1.0).unwrap();
        assert_eq!(first.coupling.mass, second.coupling.mass);
        let cdf = w1_line_oracle(&rho, &omega, &unit).unwrap();
        assert!((first.value - cdf).abs() < 1e-12);
        assert!(first.duality_gap() < 1e-10);
        // Clustered masses: two nearly coincident atoms against one.
        let rho = ProbOnZ::new(vec![(0, 0.5 + 1e-13), (1, 0.5 - 1e-13)]).unwrap();
        let omega = ProbOnZ::dirac(0);
        let r = wasserstein_p(&rho, &omega, &unit, 1.0).unwrap();
        assert!(r.coupling.marginal_defect(&rho, &omega) < 1e-12);
        assert!((r.value - (0.5 - 1e-13)).abs() < 1e-12);
    }
}

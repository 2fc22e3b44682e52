//! Backtracking search for d1u functions from `Z/dZ` into candidate
//! abelian groups, used to determine or bound the minimal codomain order
//! empirically.
//!
//! The search assigns `f(0), f(1), ...` depth-first. Placing `f(x)` fixes
//! the differences `f(x) - f(x-a)` for `a <= x` and the wrap-around
//! differences `f(j) - f(x)` for `j < x` (those belong to the shift
//! `d - x + j`); each is checked against a per-shift occupancy table and
//! the branch is pruned on any collision, so every difference is checked
//! exactly once on the way down. Fixing `f(0) = 0` is safe: translating a
//! function by a constant shifts every difference sequence by nothing at
//! all. Canonical labeling across codomain automorphism orbits is a
//! further reduction this module deliberately leaves unimplemented; the
//! first-assignment value order is its extension point.

use crate::diffcalc::GroupFunction;
use crate::groups::{enumerate_abelian_groups, AbelianGroup};
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::{Duration, Instant};

/// Parameters for a search run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Total wall-clock budget; `None` searches to exhaustion.
    pub time_budget: Option<Duration>,
    /// Inclusive `[min, max]` codomain orders to try.
    pub order_range: (u64, u64),
    /// Fix `f(0) = 0`; loses no solutions by translation invariance.
    pub normalize: bool,
    /// `0` keeps the canonical deterministic value ordering; any other seed
    /// shuffles the value order at every depth past the first.
    pub seed: u64,
}

impl SearchConfig {
    /// Exhaustive deterministic search over `[min, max]`.
    pub fn exhaustive(min_order: u64, max_order: u64) -> Self {
        SearchConfig {
            time_budget: None,
            order_range: (min_order, max_order),
            normalize: true,
            seed: 0,
        }
    }
}

/// Outcome for one `(order, group)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SearchStatus {
    /// A d1u function was found (re-verified by the brute-force oracle).
    Found { function: GroupFunction },
    /// The full normalized space was covered without a solution.
    /// `pigeonhole` marks groups rejected outright because `|G| < d`.
    Exhausted { pigeonhole: bool },
    /// The time budget ran out before the space was covered.
    Timeout,
}

/// Statistics and status for one searched `(order, group)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSearchResult {
    pub order: u64,
    pub group: AbelianGroup,
    #[serde(flatten)]
    pub status: SearchStatus,
    pub nodes_explored: u64,
    pub elapsed_seconds: f64,
}

/// Aggregate judgement for one codomain order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderStatus {
    Found,
    /// Every group of the order was exhausted without a solution; this is a
    /// completed nonexistence claim.
    Exhausted,
    /// At least one group timed out, so nonexistence cannot be claimed.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderSummary {
    pub order: u64,
    pub status: OrderStatus,
}

/// Full report of a minimal-order search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub d: u64,
    pub results: Vec<GroupSearchResult>,
    pub orders: Vec<OrderSummary>,
    pub found_order: Option<u64>,
}

impl SearchOutcome {
    /// The found function of minimal order, if any.
    pub fn found_function(&self) -> Option<&GroupFunction> {
        self.results.iter().find_map(|r| match &r.status {
            SearchStatus::Found { function } => Some(function),
            _ => None,
        })
    }
}

/// Searches one codomain group for a d1u function from `Z/dZ`, spending at
/// most `cfg.time_budget` on it.
pub fn search_group(d: u64, group: &AbelianGroup, cfg: &SearchConfig) -> Result<GroupSearchResult> {
    if d < 2 {
        return Err(Error::Domain("search requires d >= 2".into()));
    }
    let deadline = cfg.time_budget.map(|b| Instant::now() + b);
    search_group_with_deadline(d, group, cfg, deadline)
}

fn search_group_with_deadline(
    d: u64,
    group: &AbelianGroup,
    cfg: &SearchConfig,
    deadline: Option<Instant>,
) -> Result<GroupSearchResult> {
    let start = Instant::now();
    let order = group.order();
    if order < d {
        return Ok(GroupSearchResult {
            order,
            group: group.clone(),
            status: SearchStatus::Exhausted { pigeonhole: true },
            nodes_explored: 0,
            elapsed_seconds: 0.0,
        });
    }

    let mut dfs = Dfs::prepare(d as usize, group, cfg, deadline);
    let found = dfs.run();
    let status = if let Some(assignment) = found {
        let values = assignment
            .iter()
            .map(|&v| group.element_at(v as u64))
            .collect();
        let function = GroupFunction::new(group.clone(), values)?;
        let verdict = function.is_d1u_bruteforce()?;
        if !verdict.is_d1u {
            return Err(Error::Internal(
                "search produced a function the brute-force oracle rejects".into(),
            ));
        }
        SearchStatus::Found { function }
    } else if dfs.timed_out {
        SearchStatus::Timeout
    } else {
        SearchStatus::Exhausted { pigeonhole: false }
    };
    Ok(GroupSearchResult {
        order,
        group: group.clone(),
        status,
        nodes_explored: dfs.nodes,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Walks codomain orders ascending, trying every isomorphism class per
/// order, and stops at the first order admitting a d1u function. The time
/// budget is split evenly over all planned `(order, group)` pairs.
pub fn search_min_order(d: u64, cfg: &SearchConfig) -> Result<SearchOutcome> {
    if d < 2 {
        return Err(Error::Domain("search requires d >= 2".into()));
    }
    let (lo, hi) = cfg.order_range;
    if lo > hi {
        return Err(Error::Domain(format!("empty order range [{lo}, {hi}]")));
    }
    let mut per_order: Vec<(u64, Vec<AbelianGroup>)> = Vec::new();
    let mut pair_count = 0u32;
    for order in lo..=hi {
        let groups = enumerate_abelian_groups(order)?;
        pair_count += groups.len() as u32;
        per_order.push((order, groups));
    }
    let per_pair = cfg.time_budget.map(|b| b / pair_count.max(1));

    let mut outcome = SearchOutcome {
        d,
        results: Vec::new(),
        orders: Vec::new(),
        found_order: None,
    };
    'orders: for (order, groups) in per_order {
        let mut all_exhausted = true;
        let mut found_here = false;
        for group in groups {
            let deadline = per_pair.map(|b| Instant::now() + b);
            let result = search_group_with_deadline(d, &group, cfg, deadline)?;
            match result.status {
                SearchStatus::Found { .. } => found_here = true,
                SearchStatus::Timeout => all_exhausted = false,
                SearchStatus::Exhausted { .. } => {}
            }
            outcome.results.push(result);
            if found_here {
                break;
            }
        }
        let status = if found_here {
            OrderStatus::Found
        } else if all_exhausted {
            OrderStatus::Exhausted
        } else {
            OrderStatus::Inconclusive
        };
        outcome.orders.push(OrderSummary { order, status });
        if found_here {
            outcome.found_order = Some(order);
            break 'orders;
        }
    }
    Ok(outcome)
}

struct Dfs {
    d: usize,
    m: usize,
    // diff[i * m + j] = element index of e_i - e_j
    diff: Vec<u32>,
    // occ[a - 1][v]: value v already taken in the shift-a difference sequence
    occ: Vec<Vec<bool>>,
    assign: Vec<u32>,
    orderings: Vec<Vec<u32>>,
    start_depth: usize,
    nodes: u64,
    deadline: Option<Instant>,
    timed_out: bool,
}

impl Dfs {
    fn prepare(
        d: usize,
        group: &AbelianGroup,
        cfg: &SearchConfig,
        deadline: Option<Instant>,
    ) -> Self {
        let m = group.order() as usize;
        let elems: Vec<_> = group.elements().collect();
        let mut diff = vec![0u32; m * m];
        for (i, ei) in elems.iter().enumerate() {
            for (j, ej) in elems.iter().enumerate() {
                let delta = group.sub(ei, ej).expect("elements share the group shape");
                diff[i * m + j] = group
                    .index_of(&delta)
                    .expect("difference stays in the group")
                    as u32;
            }
        }
        let canonical: Vec<u32> = (0..m as u32).collect();
        let mut orderings = vec![canonical.clone(); d];
        if cfg.seed != 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let first_open = if cfg.normalize { 1 } else { 0 };
            // the first open depth keeps the canonical order (see module docs)
            for ordering in orderings.iter_mut().skip(first_open + 1) {
                ordering.shuffle(&mut rng);
            }
        }
        let mut assign = vec![0u32; d];
        let start_depth = if cfg.normalize {
            assign[0] = 0;
            1
        } else {
            0
        };
        Dfs {
            d,
            m,
            diff,
            occ: vec![vec![false; m]; d.saturating_sub(1)],
            assign,
            orderings,
            start_depth,
            nodes: 0,
            deadline,
            timed_out: false,
        }
    }

    fn run(&mut self) -> Option<Vec<u32>> {
        if self.dfs(self.start_depth) {
            Some(self.assign.clone())
        } else {
            None
        }
    }

    fn collides(&self, x: usize, v: usize) -> bool {
        for a in 1..=x {
            let delta = self.diff[v * self.m + self.assign[x - a] as usize] as usize;
            if self.occ[a - 1][delta] {
                return true;
            }
            // for x >= d - a this same shift also gains a wrap entry right
            // now; the two must be compared against each other as well
            if a + x >= self.d {
                let j = x + a - self.d;
                let wrap = self.diff[self.assign[j] as usize * self.m + v] as usize;
                if wrap == delta {
                    return true;
                }
            }
        }
        for j in 0..x {
            let a = self.d - x + j;
            let delta = self.diff[self.assign[j] as usize * self.m + v] as usize;
            if self.occ[a - 1][delta] {
                return true;
            }
        }
        false
    }

    fn mark(&mut self, x: usize, v: usize, on: bool) {
        for a in 1..=x {
            let delta = self.diff[v * self.m + self.assign[x - a] as usize] as usize;
            self.occ[a - 1][delta] = on;
        }
        for j in 0..x {
            let a = self.d - x + j;
            let delta = self.diff[self.assign[j] as usize * self.m + v] as usize;
            self.occ[a - 1][delta] = on;
        }
    }

    fn dfs(&mut self, x: usize) -> bool {
        if x == self.d {
            return true;
        }
        for idx in 0..self.m {
            let v = self.orderings[x][idx] as usize;
            self.nodes += 1;
            if self.nodes & 0xFFF == 0 {
                if let Some(deadline) = self.deadline {
                    if Instant::now() >= deadline {
                        self.timed_out = true;
                    }
                }
            }
            if self.timed_out {
                return false;
            }
            if self.collides(x, v) {
                continue;
            }
            self.assign[x] = v as u32;
            self.mark(x, v, true);
            if self.dfs(x + 1) {
                return true;
            }
            self.mark(x, v, false);
        }
        false
    }
}

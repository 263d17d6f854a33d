//! Exact scheduling: the MILP formulation with its RLT linearization, an LP
//! text exporter with an internal round-trip parser, and a self-contained
//! branch-and-bound solver used as the optimality oracle on small instances.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{received_power, Link, RadioParams, RateMatrix, Topology};
use crate::path_select::PathSet;
use crate::schedule::{hop_weight, FeasibilityFn, Pairing, Schedule, ScheduleError};

#[derive(Debug, Error)]
pub enum MilpError {
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error("instance has {0} UEs, above the small-instance cap of {1}")]
    TooLarge(usize, usize),
    #[error("lp parse error at line {0}: {1}")]
    Parse(usize, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Ge,
    Le,
    Eq,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub binary: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub name: String,
    /// (variable index, coefficient)
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// The linearized scheduling problem: minimize the sum of per-pairing slot
/// counts subject to coverage, demand, precedence, matching, and (optionally)
/// linearized SINR constraints, with the bilinear terms replaced by bound-
/// factor-constrained substitution variables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MilpInstance {
    pub variables: Vec<Variable>,
    pub constraints: Vec<LinearConstraint>,
    /// Minimization objective, as (variable index, coefficient).
    pub objective: Vec<(usize, f64)>,
    pub k: usize,
    pub t_bar: u64,
    pub warnings: Vec<String>,
    /// delta variable index per pairing slot 0..K.
    pub delta_idx: Vec<usize>,
    /// (receiver ue, pairing) -> scheduling indicator variable.
    pub a_idx: HashMap<(usize, usize), usize>,
    /// (receiver ue, pairing) -> delta*a substitution variable.
    pub xi_idx: HashMap<(usize, usize), usize>,
    /// (receiver u, receiver v, pairing) -> a*a substitution variable.
    pub omega_idx: HashMap<(usize, usize, usize), usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SinrConstraints {
    Off,
    On,
}

/// Build the exact scheduling MILP for the given paths and demand.
///
/// `k` is the pairing-count horizon; unused pairings take delta = 0. When it
/// is below the longest path's hop count the instance is structurally
/// infeasible and a warning is attached.
pub fn build_milp(
    paths: &PathSet,
    rates: &RateMatrix,
    d: u64,
    params: &RadioParams,
    topo: &Topology,
    k: usize,
    sinr: SinrConstraints,
) -> Result<MilpInstance, MilpError> {
    let ap = topo.ap();
    // receiver-ordered hop list: every UE u with its downloading link (s_u, u)
    let hops = paths.hops();
    let mut receivers: Vec<(usize, Link)> = hops.iter().map(|h| (h.rx, *h)).collect();
    receivers.sort_by_key(|(rx, _)| *rx);

    let mut t_bar: u64 = 0;
    for (_, link) in &receivers {
        t_bar = t_bar.max(hop_weight(d, rates.rate(link.tx, link.rx))?);
    }

    let mut warnings = Vec::new();
    let longest = paths.max_hop_count();
    if k < longest {
        warnings.push(format!(
            "K = {} is below the longest path hop count {}; precedence makes the instance infeasible",
            k, longest
        ));
    }

    let mut variables = Vec::new();
    let mut delta_idx = Vec::new();
    for kk in 0..k {
        delta_idx.push(variables.len());
        variables.push(Variable {
            name: format!("delta_{}", kk + 1),
            lower: 0.0,
            upper: t_bar as f64,
            binary: false,
        });
    }
    let mut a_idx = HashMap::new();
    let mut xi_idx = HashMap::new();
    for (u, link) in &receivers {
        for kk in 0..k {
            a_idx.insert((*u, kk), variables.len());
            variables.push(Variable {
                name: format!("a_{}_{}_{}", link.tx, link.rx, kk + 1),
                lower: 0.0,
                upper: 1.0,
                binary: true,
            });
            xi_idx.insert((*u, kk), variables.len());
            variables.push(Variable {
                name: format!("xi_{}_{}_{}", link.tx, link.rx, kk + 1),
                lower: 0.0,
                upper: t_bar as f64,
                binary: false,
            });
        }
    }
    let mut omega_idx = HashMap::new();
    for (u, lu) in &receivers {
        for (v, lv) in &receivers {
            if u == v {
                continue;
            }
            for kk in 0..k {
                omega_idx.insert((*u, *v, kk), variables.len());
                variables.push(Variable {
                    name: format!("w_{}_{}_{}_{}_{}", lu.tx, lu.rx, lv.tx, lv.rx, kk + 1),
                    lower: 0.0,
                    upper: 1.0,
                    binary: false,
                });
            }
        }
    }

    let objective: Vec<(usize, f64)> = delta_idx.iter().map(|&i| (i, 1.0)).collect();
    let mut constraints = Vec::new();

    // coverage: each UE downloads exactly once
    for (u, _) in &receivers {
        constraints.push(LinearConstraint {
            name: format!("cover_{u}"),
            terms: (0..k).map(|kk| (a_idx[&(*u, kk)], 1.0)).collect(),
            sense: Sense::Eq,
            rhs: 1.0,
        });
    }

    // demand completion through the substitution variable
    for (u, link) in &receivers {
        let c = rates.rate(link.tx, link.rx) as f64;
        constraints.push(LinearConstraint {
            name: format!("demand_{u}"),
            terms: (0..k).map(|kk| (xi_idx[&(*u, kk)], c)).collect(),
            sense: Sense::Ge,
            rhs: d as f64,
        });
    }

    // precedence: a relay must have downloaded before it serves, at every prefix
    for (u, link) in &receivers {
        let source = link.tx;
        if source == ap {
            continue;
        }
        for prefix in 0..k {
            let mut terms = Vec::new();
            for kk in 0..=prefix {
                terms.push((a_idx[&(source, kk)], 1.0));
                terms.push((a_idx[&(*u, kk)], -1.0));
            }
            constraints.push(LinearConstraint {
                name: format!("prec_{}_{}", u, prefix + 1),
                terms,
                sense: Sense::Ge,
                rhs: 0.0,
            });
        }
    }

    // matching: adjacent links never share a pairing
    for (i, (u, lu)) in receivers.iter().enumerate() {
        for (v, lv) in receivers.iter().skip(i + 1) {
            if !lu.adjacent(lv) {
                continue;
            }
            for kk in 0..k {
                constraints.push(LinearConstraint {
                    name: format!("adj_{}_{}_{}", u, v, kk + 1),
                    terms: vec![(a_idx[&(*u, kk)], 1.0), (a_idx[&(*v, kk)], 1.0)],
                    sense: Sense::Le,
                    rhs: 1.0,
                });
            }
        }
    }

    // RLT bound-factor products for xi = delta * a
    let tb = t_bar as f64;
    for (u, _) in &receivers {
        for kk in 0..k {
            let xi = xi_idx[&(*u, kk)];
            let a = a_idx[&(*u, kk)];
            let dl = delta_idx[kk];
            constraints.push(LinearConstraint {
                name: format!("xi_lb_{}_{}", u, kk + 1),
                terms: vec![(xi, 1.0)],
                sense: Sense::Ge,
                rhs: 0.0,
            });
            constraints.push(LinearConstraint {
                name: format!("xi_delta_{}_{}", u, kk + 1),
                terms: vec![(dl, 1.0), (xi, -1.0)],
                sense: Sense::Ge,
                rhs: 0.0,
            });
            constraints.push(LinearConstraint {
                name: format!("xi_cap_{}_{}", u, kk + 1),
                terms: vec![(a, tb), (xi, -1.0)],
                sense: Sense::Ge,
                rhs: 0.0,
            });
            constraints.push(LinearConstraint {
                name: format!("xi_joint_{}_{}", u, kk + 1),
                terms: vec![(dl, -1.0), (a, -tb), (xi, 1.0)],
                sense: Sense::Ge,
                rhs: -tb,
            });
        }
    }

    // RLT bound-factor products for omega = a * a
    for (u, _) in &receivers {
        for (v, _) in &receivers {
            if u == v {
                continue;
            }
            for kk in 0..k {
                let w = omega_idx[&(*u, *v, kk)];
                let au = a_idx[&(*u, kk)];
                let av = a_idx[&(*v, kk)];
                constraints.push(LinearConstraint {
                    name: format!("om_lb_{}_{}_{}", u, v, kk + 1),
                    terms: vec![(w, 1.0)],
                    sense: Sense::Ge,
                    rhs: 0.0,
                });
                constraints.push(LinearConstraint {
                    name: format!("om_u_{}_{}_{}", u, v, kk + 1),
                    terms: vec![(au, 1.0), (w, -1.0)],
                    sense: Sense::Ge,
                    rhs: 0.0,
                });
                constraints.push(LinearConstraint {
                    name: format!("om_v_{}_{}_{}", u, v, kk + 1),
                    terms: vec![(av, 1.0), (w, -1.0)],
                    sense: Sense::Ge,
                    rhs: 0.0,
                });
                constraints.push(LinearConstraint {
                    name: format!("om_joint_{}_{}_{}", u, v, kk + 1),
                    terms: vec![(au, -1.0), (av, -1.0), (w, 1.0)],
                    sense: Sense::Ge,
                    rhs: -1.0,
                });
            }
        }
    }

    // linearized SINR constraints
    if sinr == SinrConstraints::On {
        for (u, lu) in &receivers {
            let pr = received_power(params, *lu, topo)?;
            let gamma = params.sinr_threshold(rates.rate(lu.tx, lu.rx));
            let margin = pr - gamma * params.noise_mw();
            for kk in 0..k {
                let mut terms = vec![(a_idx[&(*u, kk)], margin)];
                for (v, lv) in &receivers {
                    if v == u {
                        continue;
                    }
                    let l = topo.distance(lv.tx, lu.rx).unwrap_or(f64::INFINITY);
                    if l <= 0.0 {
                        continue;
                    }
                    let interference = params.k0
                        * params.gain_product(lv.tx, lu.rx)
                        * l.powf(-params.path_loss_exp)
                        * params.tx_power_mw;
                    terms.push((
                        omega_idx[&(*u, *v, kk)],
                        -gamma * params.mui_factor * interference,
                    ));
                }
                constraints.push(LinearConstraint {
                    name: format!("sinr_{}_{}", u, kk + 1),
                    terms,
                    sense: Sense::Ge,
                    rhs: 0.0,
                });
            }
        }
    }

    Ok(MilpInstance {
        variables,
        constraints,
        objective,
        k,
        t_bar,
        warnings,
        delta_idx,
        a_idx,
        xi_idx,
        omega_idx,
    })
}

/// Default pairing horizon: longest path plus one pairing per UE is always
/// enough; surplus pairings cost nothing.
pub fn default_k(paths: &PathSet, n_ues: usize) -> usize {
    paths.max_hop_count() + n_ues
}

fn fmt_coef(first: bool, coef: f64) -> String {
    let sign = if coef < 0.0 {
        "- "
    } else if first {
        ""
    } else {
        "+ "
    };
    let mag = coef.abs();
    if (mag - 1.0).abs() < 1e-12 {
        sign.to_string()
    } else if mag.fract() == 0.0 && mag < 1e15 {
        format!("{}{} ", sign, mag as i64)
    } else {
        format!("{}{} ", sign, mag)
    }
}

/// Render the instance in LP text format (objective, rows, bounds, binaries).
pub fn export_milp(instance: &MilpInstance) -> String {
    let mut out = String::new();
    out.push_str("\\ concurrent transmission scheduling\n");
    for w in &instance.warnings {
        out.push_str(&format!("\\ warning: {w}\n"));
    }
    out.push_str("Minimize\n obj:");
    for (i, (vi, coef)) in instance.objective.iter().enumerate() {
        out.push(' ');
        out.push_str(&fmt_coef(i == 0, *coef));
        out.push_str(&instance.variables[*vi].name);
    }
    out.push_str("\nSubject To\n");
    for con in &instance.constraints {
        out.push_str(&format!(" {}:", con.name));
        for (i, (vi, coef)) in con.terms.iter().enumerate() {
            out.push(' ');
            out.push_str(&fmt_coef(i == 0, *coef));
            out.push_str(&instance.variables[*vi].name);
        }
        let sense = match con.sense {
            Sense::Ge => ">=",
            Sense::Le => "<=",
            Sense::Eq => "=",
        };
        out.push_str(&format!(" {} {}\n", sense, con.rhs));
    }
    out.push_str("Bounds\n");
    for var in &instance.variables {
        if !var.binary {
            out.push_str(&format!(" {} <= {} <= {}\n", var.lower, var.name, var.upper));
        }
    }
    out.push_str("Binary\n");
    for var in &instance.variables {
        if var.binary {
            out.push_str(&format!(" {}\n", var.name));
        }
    }
    out.push_str("End\n");
    out
}

/// Counts recovered from parsing an LP document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSummary {
    pub n_variables: usize,
    pub n_constraints: usize,
    pub n_binaries: usize,
    pub n_objective_terms: usize,
}

/// Minimal LP-format reader used to round-trip exported instances.
pub fn parse_lp(text: &str) -> Result<LpSummary, MilpError> {
    #[derive(PartialEq)]
    enum Section {
        Preamble,
        Objective,
        Constraints,
        Bounds,
        Binary,
        End,
    }
    let mut section = Section::Preamble;
    let mut vars: std::collections::HashSet<String> = Default::default();
    let mut binaries = 0usize;
    let mut constraints = 0usize;
    let mut obj_terms = 0usize;

    let is_ident = |tok: &str| {
        tok.chars()
            .next()
            .map(|c| c.is_ascii_alphabetic() || c == '_')
            .unwrap_or(false)
    };

    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        match line.to_ascii_lowercase().as_str() {
            "minimize" | "maximize" => {
                section = Section::Objective;
                continue;
            }
            "subject to" | "st" | "s.t." => {
                section = Section::Constraints;
                continue;
            }
            "bounds" => {
                section = Section::Bounds;
                continue;
            }
            "binary" | "binaries" => {
                section = Section::Binary;
                continue;
            }
            "end" => {
                section = Section::End;
                continue;
            }
            _ => {}
        }
        let body = match line.split_once(':') {
            Some((_, rest)) => rest,
            None => line,
        };
        match section {
            Section::Objective => {
                obj_terms += body.split_whitespace().filter(|t| is_ident(t)).count();
                for tok in body.split_whitespace().filter(|t| is_ident(t)) {
                    vars.insert(tok.to_string());
                }
            }
            Section::Constraints => {
                if !line.contains(':') {
                    return Err(MilpError::Parse(ln + 1, "constraint row without a name".into()));
                }
                constraints += 1;
                for tok in body.split_whitespace().filter(|t| is_ident(t)) {
                    vars.insert(tok.to_string());
                }
            }
            Section::Bounds => {
                for tok in line.split_whitespace().filter(|t| is_ident(t)) {
                    vars.insert(tok.to_string());
                }
            }
            Section::Binary => {
                binaries += 1;
                vars.insert(line.to_string());
            }
            Section::Preamble | Section::End => {
                return Err(MilpError::Parse(ln + 1, format!("unexpected content: {line}")));
            }
        }
    }
    Ok(LpSummary {
        n_variables: vars.len(),
        n_constraints: constraints,
        n_binaries: binaries,
        n_objective_terms: obj_terms,
    })
}

/// Provably optimal (or best-found) schedule for a small instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExactSolution {
    pub schedule: Schedule,
    pub objective: u64,
    pub proven_optimal: bool,
    pub nodes_explored: u64,
}

const SMALL_INSTANCE_CAP: usize = 8;

/// Depth-first branch and bound over ordered matchings respecting precedence.
///
/// Per search node the frontier (first unscheduled hop of every path) is
/// enumerated into feasible matchings; only "closed" subsets are branched on,
/// where no compatible frontier hop of weight at most the subset's slot count
/// is left out — adding such a hop never costs extra slots. The pruning bound
/// is the larger of per-path residual work and per-node residual work.
pub fn solve_exact(
    paths: &PathSet,
    rates: &RateMatrix,
    d: u64,
    feasible: &FeasibilityFn,
    node_budget: u64,
) -> Result<ExactSolution, MilpError> {
    let n_ues = paths.receivers().len();
    if n_ues > SMALL_INSTANCE_CAP {
        return Err(MilpError::TooLarge(n_ues, SMALL_INSTANCE_CAP));
    }

    let mut hop_lists: Vec<Vec<(Link, u64)>> = Vec::new();
    let mut node_max = 0usize;
    for p in &paths.paths {
        let mut hops = Vec::new();
        for w in p.windows(2) {
            let c = rates.rate(w[0], w[1]);
            if c == 0 {
                return Err(ScheduleError::UnreachableLink(w[0], w[1]).into());
            }
            hops.push((Link::new(w[0], w[1]), hop_weight(d, c)?));
            node_max = node_max.max(w[0]).max(w[1]);
        }
        hop_lists.push(hops);
    }

    // serial incumbent: one hop per pairing, always feasible
    let serial_total: u64 = hop_lists.iter().flatten().map(|(_, w)| w).sum();
    let mut search = Search {
        hop_lists: &hop_lists,
        n_nodes: node_max + 1,
        feasible,
        best: serial_total,
        best_plan: None,
        nodes: 0,
        budget: node_budget,
        exhausted: false,
        seen: HashMap::new(),
    };
    let start = vec![0usize; hop_lists.len()];
    search.dfs(&start, 0, &mut Vec::new());

    let plan = match search.best_plan {
        Some(p) => p,
        None => {
            // serial fallback plan
            let mut pairings = Vec::new();
            for hops in &hop_lists {
                for (link, w) in hops {
                    pairings.push(Pairing { links: vec![*link], slots: *w });
                }
            }
            pairings
        }
    };
    Ok(ExactSolution {
        schedule: Schedule { pairings: plan },
        objective: search.best,
        proven_optimal: !search.exhausted,
        nodes_explored: search.nodes,
    })
}

struct Search<'a> {
    hop_lists: &'a [Vec<(Link, u64)>],
    n_nodes: usize,
    feasible: &'a FeasibilityFn<'a>,
    best: u64,
    best_plan: Option<Vec<Pairing>>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
    seen: HashMap<Vec<usize>, u64>,
}

impl<'a> Search<'a> {
    fn lower_bound(&self, state: &[usize]) -> u64 {
        let mut by_path = 0u64;
        let mut by_node = vec![0u64; self.n_nodes];
        for (p, hops) in self.hop_lists.iter().enumerate() {
            let mut path_sum = 0u64;
            for (link, w) in &hops[state[p]..] {
                path_sum += w;
                by_node[link.tx] += w;
                by_node[link.rx] += w;
            }
            by_path = by_path.max(path_sum);
        }
        by_path.max(by_node.into_iter().max().unwrap_or(0))
    }

    fn dfs(&mut self, state: &[usize], cost: u64, plan: &mut Vec<Pairing>) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let done = state
            .iter()
            .zip(self.hop_lists)
            .all(|(&f, hops)| f >= hops.len());
        if done {
            if cost < self.best {
                self.best = cost;
                self.best_plan = Some(plan.clone());
            }
            return;
        }
        // the serial incumbent is always realizable, so >= pruning is safe
        if cost + self.lower_bound(state) >= self.best {
            return;
        }
        if let Some(&prev) = self.seen.get(state) {
            if prev <= cost {
                return;
            }
        }
        self.seen.insert(state.to_vec(), cost);

        // frontier hops
        let frontier: Vec<(usize, Link, u64)> = self
            .hop_lists
            .iter()
            .enumerate()
            .filter(|(p, hops)| state[*p] < hops.len())
            .map(|(p, hops)| {
                let (link, w) = hops[state[p]];
                (p, link, w)
            })
            .collect();

        let mut subsets: Vec<Vec<usize>> = Vec::new();
        enumerate_matchings(&frontier, self.feasible, &mut subsets);

        // keep only closed subsets, then try the most promising first
        let closed: Vec<&Vec<usize>> = subsets
            .iter()
            .filter(|s| {
                let slots = s.iter().map(|&i| frontier[i].2).max().unwrap();
                let links: Vec<Link> = s.iter().map(|&i| frontier[i].1).collect();
                !frontier.iter().enumerate().any(|(i, (_, link, w))| {
                    if s.contains(&i) || *w > slots {
                        return false;
                    }
                    if links.iter().any(|l| l.adjacent(link)) {
                        return false;
                    }
                    let mut extended = links.clone();
                    extended.push(*link);
                    (self.feasible)(&extended)
                })
            })
            .collect();
        let mut order: Vec<&Vec<usize>> = closed;
        order.sort_by_key(|s| {
            let slots = s.iter().map(|&i| frontier[i].2).max().unwrap();
            (std::cmp::Reverse(s.len()), slots)
        });

        for subset in order {
            let slots = subset.iter().map(|&i| frontier[i].2).max().unwrap();
            let links: Vec<Link> = subset.iter().map(|&i| frontier[i].1).collect();
            let mut next = state.to_vec();
            for &i in subset {
                next[frontier[i].0] += 1;
            }
            plan.push(Pairing { links, slots });
            self.dfs(&next, cost + slots, plan);
            plan.pop();
            if self.exhausted {
                return;
            }
        }
    }
}

fn enumerate_matchings(
    frontier: &[(usize, Link, u64)],
    feasible: &FeasibilityFn,
    out: &mut Vec<Vec<usize>>,
) {
    fn recurse(
        frontier: &[(usize, Link, u64)],
        feasible: &FeasibilityFn,
        idx: usize,
        current: &mut Vec<usize>,
        links: &mut Vec<Link>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if idx == frontier.len() {
            if !current.is_empty() {
                out.push(current.clone());
            }
            return;
        }
        // exclude frontier[idx]
        recurse(frontier, feasible, idx + 1, current, links, out);
        // include it when the matching and the feasibility closure allow
        let link = frontier[idx].1;
        if !links.iter().any(|l| l.adjacent(&link)) {
            links.push(link);
            if feasible(links) {
                current.push(idx);
                recurse(frontier, feasible, idx + 1, current, links, out);
                current.pop();
            }
            links.pop();
        }
    }
    recurse(frontier, feasible, 0, &mut Vec::new(), &mut Vec::new(), out);
}

/// Verify RLT exactness at an integral solution: with xi = delta * a and
/// omega = a * a, every bound-factor inequality must hold in integer
/// arithmetic.
pub fn check_rlt_integrality(
    instance: &MilpInstance,
    paths: &PathSet,
    solution: &Schedule,
) -> bool {
    let k = instance.k;
    let t_bar = instance.t_bar as i64;
    if solution.pairings.len() > k {
        return false;
    }
    let mut delta = vec![0i64; k];
    for (kk, pairing) in solution.pairings.iter().enumerate() {
        delta[kk] = pairing.slots as i64;
    }
    let hops = paths.hops();
    let mut a: HashMap<(usize, usize), i64> = HashMap::new();
    for hop in &hops {
        for kk in 0..k {
            let scheduled = solution
                .pairings
                .get(kk)
                .map(|p| p.links.contains(hop))
                .unwrap_or(false);
            a.insert((hop.rx, kk), if scheduled { 1 } else { 0 });
        }
    }
    for hop in &hops {
        let u = hop.rx;
        for kk in 0..k {
            let au = a[&(u, kk)];
            let xi = delta[kk] * au;
            if !(xi >= 0
                && delta[kk] - xi >= 0
                && t_bar * au - xi >= 0
                && t_bar - delta[kk] - t_bar * au + xi >= 0)
            {
                return false;
            }
            for other in &hops {
                let v = other.rx;
                if v == u {
                    continue;
                }
                let av = a[&(v, kk)];
                let om = au * av;
                if !(om >= 0 && au - om >= 0 && av - om >= 0 && 1 - au - av + om >= 0) {
                    return false;
                }
            }
        }
    }
    true
}

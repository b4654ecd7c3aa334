//! Music-format choice game over a ring network with extra links.
//!
//! Each agent uses all but one of `N_f` formats; its move is the format it
//! leaves out. Agent `a`'s happiness sums, over formats `i` and over the
//! agents `b` within `D` hops, `theta(i) * [a and b both use i] * pref(a, i)`,
//! where `theta(i)` counts every agent using `i`. The world utility is the
//! total happiness, maximized.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{ClampKind, JointState, Problem, Sense};

pub const DEFAULT_FORMAT_COUNT: usize = 4;
pub const DEFAULT_EXTRA_LINK_FRACTION: f64 = 0.06;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    /// Extra links join nodes two hops apart on the ring.
    ShortLinks,
    /// Extra links join any pair not already adjacent.
    SmallWorlds,
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "short" | "l" | "shortlinks" | "short-links" => Ok(Topology::ShortLinks),
            "small" | "w" | "smallworlds" | "small-worlds" => Ok(Topology::SmallWorlds),
            other => Err(Error::config(format!(
                "unknown topology `{other}` (expected short or small)"
            ))),
        }
    }
}

/// Undirected simple graph on nodes `0..m`, stored as `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatNetwork {
    m: usize,
    edges: BTreeSet<(usize, usize)>,
}

fn ordered(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

impl FormatNetwork {
    pub fn ring(m: usize) -> Result<Self> {
        if m < 3 {
            return Err(Error::config(format!("a ring needs at least 3 nodes, got {m}")));
        }
        let edges = (0..m).map(|i| ordered(i, (i + 1) % m)).collect();
        Ok(FormatNetwork { m, edges })
    }

    /// Ring plus `round(extra_fraction * m)` distinct extra links.
    pub fn build(m: usize, topology: Topology, extra_fraction: f64, seed: u64) -> Result<Self> {
        if m < 5 {
            return Err(Error::config(format!("network needs at least 5 nodes, got {m}")));
        }
        if !(extra_fraction >= 0.0 && extra_fraction.is_finite()) {
            return Err(Error::config("extra link fraction must be nonnegative"));
        }
        let mut net = Self::ring(m)?;
        let extra = (extra_fraction * m as f64).round() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match topology {
            Topology::ShortLinks => {
                // With m >= 5 the m pairs (i, i+2) are distinct and off the ring.
                if extra > m {
                    return Err(Error::config(format!(
                        "{extra} short links requested but only {m} exist"
                    )));
                }
                for i in index::sample(&mut rng, m, extra) {
                    net.edges.insert(ordered(i, (i + 2) % m));
                }
            }
            Topology::SmallWorlds => {
                let free = m * (m - 1) / 2 - m;
                if extra > free {
                    return Err(Error::config(format!(
                        "{extra} extra links requested but only {free} pairs are free"
                    )));
                }
                let mut added = 0;
                while added < extra {
                    let i = rng.random_range(0..m);
                    let j = rng.random_range(0..m);
                    if i != j && net.edges.insert(ordered(i, j)) {
                        added += 1;
                    }
                }
            }
        }
        Ok(net)
    }

    pub fn node_count(&self) -> usize {
        self.m
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&ordered(i, j))
    }

    /// Adds an edge; returns false if it was already present.
    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<bool> {
        if i == j || i >= self.m || j >= self.m {
            return Err(Error::config(format!("invalid edge ({i}, {j})")));
        }
        Ok(self.edges.insert(ordered(i, j)))
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.m];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }

    /// Nodes at hop distance `1..=hops` from each node, sorted.
    pub fn neighborhoods(&self, hops: usize) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut dist = vec![usize::MAX; self.m];
        let mut queue = VecDeque::new();
        (0..self.m)
            .map(|src| {
                dist.fill(usize::MAX);
                dist[src] = 0;
                queue.clear();
                queue.push_back(src);
                let mut found = Vec::new();
                while let Some(u) = queue.pop_front() {
                    if dist[u] == hops {
                        continue;
                    }
                    for &v in &adj[u] {
                        if dist[v] == usize::MAX {
                            dist[v] = dist[u] + 1;
                            found.push(v);
                            queue.push_back(v);
                        }
                    }
                }
                found.sort_unstable();
                found
            })
            .collect()
    }

    /// `m=<m>` followed by one `i j` line per edge, `i < j`, in sorted order.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("m={}\n", self.m);
        for (i, j) in &self.edges {
            let _ = writeln!(s, "{i} {j}");
        }
        s
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let bad = |line, msg: String| Error::Parse { line, msg };
        let (line, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty edge list".into(),
        })?;
        let m: usize = header
            .strip_prefix("m=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad(line, format!("expected `m=<count>`, found `{header}`")))?;
        let mut edges = BTreeSet::new();
        for (line, l) in lines {
            let nums: Vec<usize> = l
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad(line, format!("bad node `{t}`"))))
                .collect::<Result<_>>()?;
            match nums[..] {
                [i, j] if i < j && j < m => {
                    if !edges.insert((i, j)) {
                        return Err(bad(line, format!("duplicate edge {i} {j}")));
                    }
                }
                _ => return Err(bad(line, format!("expected `i j` with i < j < {m}, found `{l}`"))),
            }
        }
        Ok(FormatNetwork { m, edges })
    }
}

/// A format game on a fixed network with fixed preferences.
#[derive(Debug, Clone)]
pub struct FormatGame {
    network: FormatNetwork,
    format_count: usize,
    hops: usize,
    prefs: Vec<f64>,
    neighborhoods: Vec<Vec<usize>>,
}

impl FormatGame {
    /// `prefs` is row-major, one row of `format_count` entries per node.
    pub fn new(network: FormatNetwork, format_count: usize, hops: usize, prefs: Vec<f64>) -> Result<Self> {
        if format_count < 2 {
            return Err(Error::config("format game needs at least 2 formats"));
        }
        if hops == 0 {
            return Err(Error::config("hop radius must be at least 1"));
        }
        if prefs.len() != network.node_count() * format_count {
            return Err(Error::config(format!(
                "expected {} preferences, got {}",
                network.node_count() * format_count,
                prefs.len()
            )));
        }
        if prefs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::config("preferences must lie in [0, 1]"));
        }
        let neighborhoods = network.neighborhoods(hops);
        Ok(FormatGame {
            network,
            format_count,
            hops,
            prefs,
            neighborhoods,
        })
    }

    /// Preferences drawn uniformly from `[0, 1]`.
    pub fn random(network: FormatNetwork, format_count: usize, hops: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prefs = (0..network.node_count() * format_count)
            .map(|_| rng.random::<f64>())
            .collect();
        Self::new(network, format_count, hops, prefs)
    }

    pub fn network(&self) -> &FormatNetwork {
        &self.network
    }

    pub fn format_count(&self) -> usize {
        self.format_count
    }

    pub fn hops(&self) -> usize {
        self.hops
    }

    pub fn pref(&self, agent: usize, format: usize) -> f64 {
        self.prefs[agent * self.format_count + format]
    }

    pub fn neighborhood(&self, agent: usize) -> &[usize] {
        &self.neighborhoods[agent]
    }

    /// Number of agents using each format.
    pub fn usage_counts(&self, z: &JointState) -> Vec<f64> {
        self.theta(|a, i| self.usage(z, None, a, i))
    }

    fn usage(&self, z: &JointState, replaced: Option<(usize, &[f64])>, agent: usize, format: usize) -> f64 {
        match replaced {
            Some((r, row)) if r == agent => row[format],
            _ => (z.get(agent) != format) as u8 as f64,
        }
    }

    fn theta(&self, usage: impl Fn(usize, usize) -> f64) -> Vec<f64> {
        let mut theta = vec![0.0; self.format_count];
        for a in 0..self.network.node_count() {
            for (i, t) in theta.iter_mut().enumerate() {
                *t += usage(a, i);
            }
        }
        theta
    }

    /// World utility with `replaced`'s agent using the given per-format usage
    /// instead of its move.
    fn evaluate(&self, z: &JointState, replaced: Option<(usize, &[f64])>) -> f64 {
        let usage = |a, i| self.usage(z, replaced, a, i);
        let theta = self.theta(usage);
        let mut g = 0.0;
        for a in 0..self.network.node_count() {
            for (i, &t) in theta.iter().enumerate() {
                let own = usage(a, i);
                if own == 0.0 {
                    continue;
                }
                let shared: f64 = self.neighborhoods[a].iter().map(|&b| usage(b, i)).sum();
                g += t * own * shared * self.pref(a, i);
            }
        }
        g
    }

    pub fn g_formats(&self, z: &JointState) -> f64 {
        self.evaluate(z, None)
    }

    /// Per-format usage standing in for a clamped agent.
    pub fn clamp_usage(&self, clamp: ClampKind) -> Result<Vec<f64>> {
        match clamp {
            ClampKind::Zero => Ok(vec![1.0; self.format_count]),
            ClampKind::Absent => Ok(vec![0.0; self.format_count]),
            ClampKind::Move(f) if f < self.format_count => {
                Ok((0..self.format_count).map(|i| (i != f) as u8 as f64).collect())
            }
            ClampKind::Move(f) => Err(Error::config(format!(
                "clamp format {f} out of range for {} formats",
                self.format_count
            ))),
        }
    }

    /// `G` with `agent` clamped. `Zero` clamps the excluded-format indicator
    /// to zero, so the agent uses every format; `Absent` makes it use none.
    pub fn clamped_g(&self, z: &JointState, agent: usize, clamp: ClampKind) -> Result<f64> {
        let row = self.clamp_usage(clamp)?;
        Ok(self.evaluate(z, Some((agent, &row))))
    }

    /// `G` with `agent`'s usage replaced by its expectation over a uniform
    /// choice of excluded format: `(N_f - 1) / N_f` for every format.
    pub fn meanfield_g(&self, z: &JointState, agent: usize) -> f64 {
        let share = (self.format_count - 1) as f64 / self.format_count as f64;
        let row = vec![share; self.format_count];
        self.evaluate(z, Some((agent, &row)))
    }
}

impl Problem for FormatGame {
    fn agent_count(&self) -> usize {
        self.network.node_count()
    }

    fn move_count(&self, _agent: usize) -> usize {
        self.format_count
    }

    fn sense(&self) -> Sense {
        Sense::Maximize
    }

    fn objective(&self, z: &JointState) -> f64 {
        self.g_formats(z)
    }

    fn clamped_objective(&self, z: &JointState, agent: usize, clamp: ClampKind) -> Result<f64> {
        self.clamped_g(z, agent, clamp)
    }

    fn meanfield_objective(&self, z: &JointState, agent: usize) -> f64 {
        self.meanfield_g(z, agent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{private_utility, UtilityChoice};
    use approx::assert_relative_eq;

    fn triangle(pref: f64) -> FormatGame {
        FormatGame::new(FormatNetwork::ring(3).unwrap(), 4, 1, vec![pref; 12]).unwrap()
    }

    #[test]
    fn triangle_all_excluding_last_format() {
        let g = triangle(1.0);
        let z: JointState = vec![3, 3, 3].into();
        assert_eq!(g.g_formats(&z), 54.0);
        assert_eq!(triangle(0.0).g_formats(&z), 0.0);
        assert_eq!(g.usage_counts(&z), vec![3.0, 3.0, 3.0, 0.0]);
    }

    #[test]
    fn all_formats_clamp_on_triangle() {
        // Agent 0 picks up format 3, but its neighbors do not use it, so the
        // extra format adds nothing.
        let g = triangle(1.0);
        let z: JointState = vec![3, 3, 3].into();
        assert_eq!(g.clamped_g(&z, 0, ClampKind::Zero).unwrap(), 54.0);
        let wlu = private_utility(&g, UtilityChoice::Wlu(ClampKind::Zero), 0, &z).unwrap();
        assert_eq!(wlu, 0.0);
    }

    #[test]
    fn no_formats_clamp_on_triangle() {
        // Two remaining agents, one neighbor each, 3 shared formats, theta 2.
        let g = triangle(1.0);
        let z: JointState = vec![3, 3, 3].into();
        assert_eq!(g.clamped_g(&z, 1, ClampKind::Absent).unwrap(), 12.0);
        assert_eq!(private_utility(&g, UtilityChoice::Econ, 1, &z).unwrap(), 42.0);
    }

    #[test]
    fn clamp_move_matches_real_move() {
        let g = FormatGame::random(FormatNetwork::build(9, Topology::SmallWorlds, 0.3, 4).unwrap(), 4, 2, 8).unwrap();
        let z: JointState = vec![0, 1, 2, 3, 0, 1, 2, 3, 0].into();
        for f in 0..4 {
            assert_eq!(
                g.clamped_g(&z, 4, ClampKind::Move(f)).unwrap(),
                g.g_formats(&z.with_move(4, f))
            );
        }
        assert!(g.clamped_g(&z, 4, ClampKind::Move(4)).is_err());
    }

    #[test]
    fn pure_ring_neighborhoods() {
        let net = FormatNetwork::ring(12).unwrap();
        assert!(net.neighborhoods(1).iter().all(|n| n.len() == 2));
        let n3 = net.neighborhoods(3);
        assert!(n3.iter().all(|n| n.len() == 6));
        assert_eq!(n3[0], vec![1, 2, 3, 9, 10, 11]);
    }

    #[test]
    fn extra_link_counts() {
        for seed in 0..5 {
            let net = FormatNetwork::build(100, Topology::ShortLinks, 0.06, seed).unwrap();
            assert_eq!(net.edge_count(), 106);
            for (i, j) in net.edges() {
                let d = (j - i).min(100 - (j - i));
                assert!(d == 1 || d == 2);
            }
            let sw = FormatNetwork::build(100, Topology::SmallWorlds, 0.06, seed).unwrap();
            assert_eq!(sw.edge_count(), 106);
            assert!((0..100).all(|i| sw.has_edge(i, (i + 1) % 100)));
        }
        let pure = FormatNetwork::build(20, Topology::SmallWorlds, 0.0, 1).unwrap();
        assert!(pure.adjacency().iter().all(|a| a.len() == 2));
    }

    #[test]
    fn network_parameter_errors() {
        assert!(FormatNetwork::build(4, Topology::ShortLinks, 0.5, 0).is_err());
        assert!(FormatNetwork::build(10, Topology::ShortLinks, 1.5, 0).is_err());
        assert!(FormatNetwork::build(5, Topology::SmallWorlds, 2.0, 0).is_err());
        assert!(FormatNetwork::ring(2).is_err());
        assert!(FormatGame::new(FormatNetwork::ring(3).unwrap(), 4, 0, vec![0.5; 12]).is_err());
        assert!(FormatGame::new(FormatNetwork::ring(3).unwrap(), 4, 1, vec![1.5; 12]).is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let net = FormatNetwork::build(30, Topology::SmallWorlds, 0.2, 3).unwrap();
        let text = net.to_edge_list();
        assert!(text.starts_with("m=30\n"));
        assert_eq!(FormatNetwork::parse_edge_list(&text).unwrap(), net);
        assert!(FormatNetwork::parse_edge_list("m=3\n2 1\n").is_err());
        assert!(FormatNetwork::parse_edge_list("3\n0 1\n").is_err());
        assert!(FormatNetwork::parse_edge_list("m=3\n0 1\n0 1\n").is_err());
    }

    #[test]
    fn meanfield_is_independent_of_own_move() {
        let g = FormatGame::random(FormatNetwork::ring(8).unwrap(), 4, 2, 5).unwrap();
        let z: JointState = vec![0, 1, 2, 3, 3, 2, 1, 0].into();
        let base = g.meanfield_g(&z, 3);
        for f in 0..4 {
            assert_eq!(g.meanfield_g(&z.with_move(3, f), 3), base);
        }
        // theta under the mean field adds 0.75 per format for agent 3.
        let mean_of_moves: f64 = (0..4).map(|f| g.g_formats(&z.with_move(3, f))).sum::<f64>() / 4.0;
        assert!(mean_of_moves > 0.0 && base > 0.0);
        assert_relative_eq!(g.clamp_usage(ClampKind::Zero).unwrap().iter().sum::<f64>(), 4.0);
    }
}

//! Monte Carlo diagnostics for private utilities: intelligence (how an
//! agent's move ranks among its alternatives) and learnability (how strongly
//! a utility responds to the agent's own move relative to everyone else's).
//!
//! Utilities are passed as closures over joint states; [`utility_fn`] builds
//! one from a [`UtilityChoice`].

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{private_utility, JointState, Problem, UtilityChoice};

/// Alternatives are enumerated exactly up to this many moves.
pub const EXACT_MOVE_LIMIT: usize = 64;

/// Largest context space [`Contexts::Exhaustive`] will enumerate.
pub const MAX_EXHAUSTIVE_CONTEXTS: u64 = 1 << 22;

/// `z -> g_agent(z)` for `choice`.
pub fn utility_fn<'a, P: Problem + ?Sized>(
    problem: &'a P,
    choice: UtilityChoice,
    agent: usize,
) -> impl Fn(&JointState) -> Result<f64> + 'a {
    move |z| private_utility(problem, choice, agent, z)
}

fn heaviside(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// Fraction of `agent`'s alternative moves (other coordinates held at `z`)
/// that `utility` ranks below `z`, ties counting one half and the agent's own
/// move excluded.
///
/// Exact when the agent has at most [`EXACT_MOVE_LIMIT`] moves, otherwise
/// estimated from `samples` uniformly drawn alternatives.
pub fn estimate_intelligence<P, U, R>(
    problem: &P,
    utility: U,
    agent: usize,
    z: &JointState,
    samples: usize,
    rng: &mut R,
) -> Result<f64>
where
    P: Problem + ?Sized,
    U: Fn(&JointState) -> Result<f64>,
    R: Rng + ?Sized,
{
    problem.validate(z)?;
    let n = problem.move_count(agent);
    let own = z.get(agent);
    if n == 1 {
        return Ok(0.5);
    }
    let here = utility(z)?;
    let score = |m: usize| -> Result<f64> { Ok(heaviside(here - utility(&z.with_move(agent, m))?)) };
    if n <= EXACT_MOVE_LIMIT {
        let mut total = 0.0;
        for m in (0..n).filter(|&m| m != own) {
            total += score(m)?;
        }
        Ok(total / (n - 1) as f64)
    } else {
        if samples == 0 {
            return Err(Error::config("intelligence estimate needs at least one sample"));
        }
        let mut total = 0.0;
        for _ in 0..samples {
            // Uniform over the n - 1 alternatives.
            let mut m = rng.random_range(0..n - 1);
            if m >= own {
                m += 1;
            }
            total += score(m)?;
        }
        Ok(total / samples as f64)
    }
}

/// How contexts (the other agents' moves) are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Contexts {
    /// Every joint move of the other agents, each with equal weight.
    Exhaustive,
    /// This many independent uniform draws.
    Sampled(usize),
}

/// Utility values of one agent's moves across a shared set of contexts.
#[derive(Debug, Clone)]
pub struct ContextTable {
    /// `values[m][k]`: utility with the agent at move `m` in context `k`.
    values: Vec<Vec<f64>>,
}

impl ContextTable {
    pub fn build<P, U, R>(problem: &P, utility: U, agent: usize, contexts: Contexts, rng: &mut R) -> Result<Self>
    where
        P: Problem + ?Sized,
        U: Fn(&JointState) -> Result<f64>,
        R: Rng + ?Sized,
    {
        if agent >= problem.agent_count() {
            return Err(Error::config(format!("agent {agent} out of range")));
        }
        let counts: Vec<usize> = (0..problem.agent_count()).map(|a| problem.move_count(a)).collect();
        let states: Vec<JointState> = match contexts {
            Contexts::Exhaustive => {
                let total = counts
                    .iter()
                    .enumerate()
                    .filter(|&(a, _)| a != agent)
                    .try_fold(1u64, |acc, (_, &c)| acc.checked_mul(c as u64))
                    .filter(|&t| t <= MAX_EXHAUSTIVE_CONTEXTS)
                    .ok_or_else(|| Error::config("context space too large to enumerate; sample instead"))?;
                let mut z = vec![0usize; counts.len()];
                (0..total)
                    .map(|_| {
                        let out = JointState::new(z.clone());
                        // Odometer increment over every coordinate except `agent`.
                        for a in (0..counts.len()).filter(|&a| a != agent) {
                            z[a] += 1;
                            if z[a] < counts[a] {
                                break;
                            }
                            z[a] = 0;
                        }
                        out
                    })
                    .collect()
            }
            Contexts::Sampled(n) => {
                if n < 2 {
                    return Err(Error::config("learnability needs at least 2 contexts"));
                }
                (0..n)
                    .map(|_| JointState::new(counts.iter().map(|&c| rng.random_range(0..c)).collect()))
                    .collect()
            }
        };
        let values = (0..counts[agent])
            .map(|m| {
                states
                    .iter()
                    .map(|ctx| utility(&ctx.with_move(agent, m)))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ContextTable { values })
    }

    pub fn context_count(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    /// Mean over moves of the across-context (population) variance.
    fn noise(&self) -> f64 {
        let n = self.context_count() as f64;
        let per_move = self.values.iter().map(|v| {
            let mean = v.iter().sum::<f64>() / n;
            v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n
        });
        per_move.sum::<f64>() / self.values.len() as f64
    }

    /// Mean over contexts of the squared utility gap between two moves.
    fn signal(&self, move1: usize, move2: usize) -> f64 {
        let (a, b) = (&self.values[move1], &self.values[move2]);
        a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64
    }

    /// Signal-to-noise ratio for `move1` vs `move2`. A utility with no
    /// context dependence but some signal gives `+inf`; no signal gives 0.
    pub fn learnability(&self, move1: usize, move2: usize) -> f64 {
        let signal = self.signal(move1, move2);
        let noise = self.noise();
        if noise == 0.0 {
            return if signal == 0.0 { 0.0 } else { f64::INFINITY };
        }
        (signal / noise).sqrt()
    }

    /// Mean learnability over all unordered move pairs.
    pub fn mean_learnability(&self) -> f64 {
        let n = self.values.len();
        let (mut total, mut pairs) = (0.0, 0usize);
        for m1 in 0..n {
            for m2 in m1 + 1..n {
                total += self.learnability(m1, m2);
                pairs += 1;
            }
        }
        if pairs == 0 {
            0.0
        } else {
            total / pairs as f64
        }
    }
}

/// Learnability of `utility` for `agent` between two of its moves.
///
/// The signal is the squared gap `U(move1, ctx) - U(move2, ctx)` averaged over
/// contexts; the noise is the across-context variance of `U` averaged over the
/// agent's moves (uniform weighting). Returns `sqrt(signal / noise)`.
pub fn estimate_learnability<P, U, R>(
    problem: &P,
    utility: U,
    agent: usize,
    move1: usize,
    move2: usize,
    contexts: Contexts,
    rng: &mut R,
) -> Result<f64>
where
    P: Problem + ?Sized,
    U: Fn(&JointState) -> Result<f64>,
    R: Rng + ?Sized,
{
    let n = problem.move_count(agent);
    if move1 == move2 || move1 >= n || move2 >= n {
        return Err(Error::config(format!(
            "learnability needs two distinct moves below {n}, got {move1} and {move2}"
        )));
    }
    Ok(ContextTable::build(problem, utility, agent, contexts, rng)?.learnability(move1, move2))
}

/// Learnability of `choice` averaged over every agent and move pair.
pub fn mean_learnability<P, R>(problem: &P, choice: UtilityChoice, contexts: Contexts, rng: &mut R) -> Result<f64>
where
    P: Problem + ?Sized,
    R: Rng + ?Sized,
{
    let agents = problem.agent_count();
    let mut total = 0.0;
    for agent in 0..agents {
        total +=
            ContextTable::build(problem, utility_fn(problem, choice, agent), agent, contexts, rng)?.mean_learnability();
    }
    Ok(total / agents as f64)
}

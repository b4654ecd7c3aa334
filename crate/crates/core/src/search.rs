//! Per-timestep dynamics of simulated annealing (SA), Intelligent Coordinates
//! (IC), the COIN multi-agent RL baseline, and random search.
//!
//! SA explores by letting each coordinate keep its move with the stay
//! probability and otherwise jump uniformly to another move. IC multiplies
//! each coordinate's exploration distribution by its learner's Boltzmann
//! policy. COIN samples the learners' policies directly and always adopts
//! the result. Random search samples uniformly and keeps the best state seen.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::learner::{MoveDistribution, PayoffTable, DEFAULT_DECAY};
use crate::model::{private_utility_given, signed_objective, JointState, Problem, UtilityChoice};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Sa,
    Ic,
    Coin,
    Random,
}

impl Algorithm {
    pub fn learns(self) -> bool {
        matches!(self, Algorithm::Ic | Algorithm::Coin)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Sa => "sa",
            Algorithm::Ic => "ic",
            Algorithm::Coin => "coin",
            Algorithm::Random => "random",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sa" => Ok(Algorithm::Sa),
            "ic" => Ok(Algorithm::Ic),
            "coin" => Ok(Algorithm::Coin),
            "random" => Ok(Algorithm::Random),
            other => Err(Error::config(format!(
                "unknown algorithm `{other}` (expected sa, ic, coin or random)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmConfig {
    pub algorithm: Algorithm,
    /// Private utility the learners are paid with (IC and COIN only).
    pub utility: UtilityChoice,
    /// Probability of keeping the previous move in the exploration mixture.
    pub stay_probability: f64,
    /// SA only: if set, the stay probability ramps linearly from
    /// `stay_probability` at t = 0 to this value at the horizon.
    pub stay_final: Option<f64>,
    pub t_exploit_initial: f64,
    pub anneal_factor: f64,
    /// Exploitation steps between multiplications by `anneal_factor`.
    pub anneal_period: u64,
    pub t_learn: f64,
    pub decay: f64,
    /// Leading steps with uniformly random proposals. They count toward `t`
    /// but not toward the annealing clock.
    pub warmup_steps: u64,
    pub horizon: u64,
    /// Multiplies every payoff before it enters a learner's table.
    pub payoff_scale: f64,
}

impl Default for AlgorithmConfig {
    fn default() -> Self {
        AlgorithmConfig {
            algorithm: Algorithm::Ic,
            utility: UtilityChoice::Wlu(crate::model::ClampKind::Zero),
            stay_probability: 0.75,
            stay_final: None,
            t_exploit_initial: 0.5,
            anneal_factor: 0.8,
            anneal_period: 100,
            t_learn: 0.2,
            decay: DEFAULT_DECAY,
            warmup_steps: 100,
            horizon: 200,
            payoff_scale: 1.0,
        }
    }
}

impl AlgorithmConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::config(format!("{name} = {v} outside [0, 1]")))
            }
        };
        unit("stay probability", self.stay_probability)?;
        if let Some(end) = self.stay_final {
            unit("final stay probability", end)?;
        }
        if !(self.t_exploit_initial > 0.0 && self.t_exploit_initial.is_finite()) {
            return Err(Error::config("exploitation temperature must be positive"));
        }
        if !(self.t_learn > 0.0 && self.t_learn.is_finite()) {
            return Err(Error::config("learning temperature must be positive"));
        }
        if !(self.anneal_factor > 0.0 && self.anneal_factor <= 1.0) {
            return Err(Error::config(format!(
                "anneal factor {} outside (0, 1]",
                self.anneal_factor
            )));
        }
        if self.anneal_period == 0 {
            return Err(Error::config("anneal period must be at least 1"));
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::config(format!("decay {} outside (0, 1]", self.decay)));
        }
        if self.horizon == 0 {
            return Err(Error::config("horizon must be positive"));
        }
        if !self.payoff_scale.is_finite() || self.payoff_scale <= 0.0 {
            return Err(Error::config("payoff scale must be positive"));
        }
        Ok(())
    }

    /// Stay probability in force at step `t`.
    pub fn stay_at(&self, t: u64) -> f64 {
        match (self.algorithm, self.stay_final) {
            (Algorithm::Sa, Some(end)) => {
                let frac = (t as f64 / self.horizon as f64).min(1.0);
                self.stay_probability + (end - self.stay_probability) * frac
            }
            _ => self.stay_probability,
        }
    }

    /// Exploitation temperature after `exploitation_steps` non-warm-up steps.
    pub fn t_exploit_after(&self, exploitation_steps: u64) -> f64 {
        let k = exploitation_steps / self.anneal_period;
        self.t_exploit_initial * self.anneal_factor.powi(k.min(i32::MAX as u64) as i32)
    }
}

/// What happened to the proposal in one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    /// Strictly better than the current state.
    Improved,
    /// Not better, but taken by the Boltzmann test.
    AcceptedUphill,
    Rejected,
    /// Taken without any acceptance test (COIN).
    Adopted,
}

impl StepOutcome {
    pub fn moved(self) -> bool {
        !matches!(self, StepOutcome::Rejected)
    }
}

/// Mutable state of one search run.
#[derive(Debug, Clone)]
pub struct SearchState {
    current: JointState,
    current_signed: f64,
    current_reported: f64,
    t: u64,
    t_exploit: f64,
    exploitation_steps: u64,
    tables: Option<Vec<PayoffTable>>,
    rng: ChaCha8Rng,
}

impl SearchState {
    /// Starts from a uniformly random joint state drawn from `seed`.
    pub fn new<P: Problem + ?Sized>(problem: &P, config: &AlgorithmConfig, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = JointState::new(
            (0..problem.agent_count())
                .map(|a| rng.random_range(0..problem.move_count(a)))
                .collect(),
        );
        Self::with_start(problem, config, start, rng)
    }

    pub fn with_start<P: Problem + ?Sized>(
        problem: &P,
        config: &AlgorithmConfig,
        start: JointState,
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        config.validate()?;
        problem.validate(&start)?;
        if problem.agent_count() == 0 {
            return Err(Error::config("problem has no agents"));
        }
        let tables = if config.algorithm.learns() {
            Some(
                (0..problem.agent_count())
                    .map(|a| PayoffTable::new(problem.move_count(a), config.decay))
                    .collect::<Result<Vec<_>>>()?,
            )
        } else {
            None
        };
        Ok(SearchState {
            current_signed: signed_objective(problem, &start),
            current_reported: problem.reported(&start),
            current: start,
            t: 0,
            t_exploit: config.t_exploit_initial,
            exploitation_steps: 0,
            tables,
            rng,
        })
    }

    pub fn current(&self) -> &JointState {
        &self.current
    }

    /// Signed objective of the current state.
    pub fn current_objective(&self) -> f64 {
        self.current_signed
    }

    /// Reported (hard) value of the current state.
    pub fn current_reported(&self) -> f64 {
        self.current_reported
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn t_exploit(&self) -> f64 {
        self.t_exploit
    }

    pub fn exploitation_steps(&self) -> u64 {
        self.exploitation_steps
    }

    pub fn tables(&self) -> Option<&[PayoffTable]> {
        self.tables.as_deref()
    }

    pub fn tables_mut(&mut self) -> Option<&mut [PayoffTable]> {
        self.tables.as_deref_mut()
    }

    fn in_warmup(&self, config: &AlgorithmConfig) -> bool {
        self.t < config.warmup_steps
    }
}

/// The SA mixture: `stay` on `current`, the rest split evenly over the other moves.
fn stay_mixture(move_count: usize, current: usize, stay: f64) -> MoveDistribution {
    if move_count == 1 {
        return MoveDistribution::one_hot(1, 0);
    }
    let other = (1.0 - stay) / (move_count - 1) as f64;
    let mut p = vec![other; move_count];
    p[current] = stay;
    MoveDistribution::from_weights(p)
}

/// Distribution `agent` samples its exploration move from at the state's
/// current time, ignoring warm-up.
pub fn exploration_distribution<P: Problem + ?Sized>(
    state: &SearchState,
    agent: usize,
    config: &AlgorithmConfig,
    problem: &P,
) -> MoveDistribution {
    let n = problem.move_count(agent);
    let learned = || {
        state
            .tables
            .as_ref()
            .map(|t| t[agent].move_distribution(config.t_learn))
            .unwrap_or_else(|| MoveDistribution::uniform(n))
    };
    match config.algorithm {
        Algorithm::Random => MoveDistribution::uniform(n),
        Algorithm::Sa => stay_mixture(n, state.current.get(agent), config.stay_at(state.t)),
        Algorithm::Ic => stay_mixture(n, state.current.get(agent), config.stay_at(state.t)).product(&learned()),
        Algorithm::Coin => learned(),
    }
}

/// Samples the exploration joint move.
pub fn propose<P: Problem + ?Sized>(state: &mut SearchState, config: &AlgorithmConfig, problem: &P) -> JointState {
    let uniform = state.in_warmup(config) || config.algorithm == Algorithm::Random;
    let moves = (0..problem.agent_count())
        .map(|a| {
            if uniform {
                state.rng.random_range(0..problem.move_count(a))
            } else {
                exploration_distribution(state, a, config, problem).sample(&mut state.rng)
            }
        })
        .collect();
    JointState::new(moves)
}

/// Probability of moving to the proposal under the two-state Boltzmann rule.
pub fn acceptance_probability(u_current: f64, u_proposed: f64, t_exploit: f64) -> f64 {
    if u_proposed > u_current {
        return 1.0;
    }
    // exp(up/T) / (exp(up/T) + exp(uc/T)), written to avoid overflow.
    1.0 / (1.0 + ((u_current - u_proposed) / t_exploit).exp())
}

pub fn accept<R: Rng + ?Sized>(u_current: f64, u_proposed: f64, t_exploit: f64, rng: &mut R) -> bool {
    if u_proposed > u_current {
        return true;
    }
    rng.random::<f64>() < acceptance_probability(u_current, u_proposed, t_exploit)
}

/// Advances the search by one timestep.
pub fn step<P: Problem + ?Sized>(
    state: &mut SearchState,
    config: &AlgorithmConfig,
    problem: &P,
) -> Result<StepOutcome> {
    if state.t >= config.horizon {
        return Err(Error::HorizonReached(config.horizon));
    }
    let warm = state.in_warmup(config);
    let proposal = propose(state, config, problem);
    let u_proposed = signed_objective(problem, &proposal);

    if let Some(tables) = state.tables.as_mut() {
        for (agent, table) in tables.iter_mut().enumerate() {
            let payoff = private_utility_given(problem, config.utility, agent, &proposal, u_proposed)?;
            table.record(state.t, proposal.get(agent), config.payoff_scale * payoff)?;
        }
    }

    let outcome = match config.algorithm {
        Algorithm::Coin => StepOutcome::Adopted,
        Algorithm::Random => {
            if u_proposed > state.current_signed {
                StepOutcome::Improved
            } else {
                StepOutcome::Rejected
            }
        }
        Algorithm::Sa | Algorithm::Ic => {
            if u_proposed > state.current_signed {
                StepOutcome::Improved
            } else if accept(state.current_signed, u_proposed, state.t_exploit, &mut state.rng) {
                StepOutcome::AcceptedUphill
            } else {
                StepOutcome::Rejected
            }
        }
    };
    if outcome.moved() {
        state.current_reported = problem.reported(&proposal);
        state.current_signed = u_proposed;
        state.current = proposal;
    }

    if !warm {
        state.exploitation_steps += 1;
        state.t_exploit = config.t_exploit_after(state.exploitation_steps);
    }
    state.t += 1;
    Ok(outcome)
}

/// Reported value of the current state after every step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub values: Vec<f64>,
    pub final_state: JointState,
}

/// Runs one seeded search to the horizon.
pub fn run<P: Problem + ?Sized>(problem: &P, config: &AlgorithmConfig, seed: u64) -> Result<Trajectory> {
    let mut state = SearchState::new(problem, config, seed)?;
    let mut values = Vec::with_capacity(config.horizon as usize);
    while state.t < config.horizon {
        step(&mut state, config, problem)?;
        values.push(state.current_reported);
    }
    Ok(Trajectory {
        values,
        final_state: state.current,
    })
}

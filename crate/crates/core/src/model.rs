//! Joint-move state space, the problem abstraction, and the private-utility
//! constructions (team game, Wonderful Life, Aristocrat, economic clamp).
//!
//! Every algorithm maximizes the *signed* objective `u(z) = ±G(z)`, with the
//! sign taken from the problem's [`Sense`]. Private utilities are built from
//! the signed objective so that higher is always better for an agent.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// One move index per agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JointState(Vec<usize>);

impl JointState {
    pub fn new(moves: Vec<usize>) -> Self {
        JointState(moves)
    }

    pub fn moves(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, agent: usize) -> usize {
        self.0[agent]
    }

    pub fn set(&mut self, agent: usize, mv: usize) {
        self.0[agent] = mv;
    }

    /// Copy of `self` with `agent`'s coordinate replaced.
    pub fn with_move(&self, agent: usize, mv: usize) -> Self {
        let mut z = self.clone();
        z.0[agent] = mv;
        z
    }
}

impl From<Vec<usize>> for JointState {
    fn from(moves: Vec<usize>) -> Self {
        JointState(moves)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

impl Sense {
    /// Multiplier turning the world utility into the maximize-convention objective.
    pub fn sign(self) -> f64 {
        match self {
            Sense::Maximize => 1.0,
            Sense::Minimize => -1.0,
        }
    }

    /// True when `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Maximize => a > b,
            Sense::Minimize => a < b,
        }
    }
}

/// The fixed value an agent's coordinate is clamped to inside a Wonderful
/// Life utility. Each problem decides what the kinds mean for its encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClampKind {
    /// The zero vector in the problem's one-hot move encoding.
    Zero,
    /// The agent takes no part in the system at all.
    Absent,
    /// An ordinary move of the agent.
    Move(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UtilityChoice {
    /// `g = G` for every agent.
    TeamGame,
    /// `g = G(z) - G(z with the agent clamped)`.
    Wlu(ClampKind),
    /// `g = G(z) - G(mean-field over the agent's moves)`, uniform over moves.
    Aristocrat,
    /// Wonderful Life with the [`ClampKind::Absent`] clamp: the agent's
    /// marginal contribution to `G`.
    Econ,
}

impl UtilityChoice {
    pub fn is_difference(self) -> bool {
        !matches!(self, UtilityChoice::TeamGame)
    }
}

impl fmt::Display for UtilityChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UtilityChoice::TeamGame => f.write_str("tg"),
            UtilityChoice::Wlu(ClampKind::Zero) => f.write_str("wlu"),
            UtilityChoice::Wlu(ClampKind::Absent) => f.write_str("wlu-absent"),
            UtilityChoice::Wlu(ClampKind::Move(m)) => write!(f, "wlu-move{m}"),
            UtilityChoice::Aristocrat => f.write_str("au"),
            UtilityChoice::Econ => f.write_str("econ"),
        }
    }
}

impl FromStr for UtilityChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "tg" | "team" | "teamgame" => Ok(UtilityChoice::TeamGame),
            "wlu" => Ok(UtilityChoice::Wlu(ClampKind::Zero)),
            "wlu-absent" => Ok(UtilityChoice::Wlu(ClampKind::Absent)),
            "au" | "aristocrat" => Ok(UtilityChoice::Aristocrat),
            "econ" => Ok(UtilityChoice::Econ),
            other => match other.strip_prefix("wlu-move") {
                Some(m) => m
                    .parse()
                    .map(|m| UtilityChoice::Wlu(ClampKind::Move(m)))
                    .map_err(|_| Error::config(format!("bad clamp move in utility `{s}`"))),
                None => Err(Error::config(format!(
                    "unknown utility `{s}` (expected tg, wlu, au or econ)"
                ))),
            },
        }
    }
}

/// A concrete optimization problem over a joint move space.
pub trait Problem: Sync {
    fn agent_count(&self) -> usize;

    fn move_count(&self, agent: usize) -> usize;

    fn sense(&self) -> Sense;

    /// The world utility `G` the search drives. Callers guarantee `z` is valid.
    fn objective(&self, z: &JointState) -> f64;

    /// The value reported as performance. Defaults to [`Problem::objective`];
    /// bin-packing overrides it with the occupied-bin count.
    fn reported(&self, z: &JointState) -> f64 {
        self.objective(z)
    }

    /// `G` with `agent`'s coordinate replaced by `clamp`. The result must not
    /// depend on `z[agent]`.
    fn clamped_objective(&self, z: &JointState, agent: usize, clamp: ClampKind) -> Result<f64>;

    /// `G` with `agent`'s move replaced by its expectation under a uniform
    /// distribution over its moves. Must not depend on `z[agent]`.
    fn meanfield_objective(&self, z: &JointState, agent: usize) -> f64;

    fn validate(&self, z: &JointState) -> Result<()> {
        if z.len() != self.agent_count() {
            return Err(Error::InvalidState(format!(
                "{} moves for {} agents",
                z.len(),
                self.agent_count()
            )));
        }
        for (agent, &mv) in z.moves().iter().enumerate() {
            if mv >= self.move_count(agent) {
                return Err(Error::InvalidState(format!(
                    "agent {agent} has move {mv} but only {} moves",
                    self.move_count(agent)
                )));
            }
        }
        Ok(())
    }
}

/// `G(z)` after validating `z`.
pub fn world_utility<P: Problem + ?Sized>(problem: &P, z: &JointState) -> Result<f64> {
    problem.validate(z)?;
    Ok(problem.objective(z))
}

/// `±G(z)`, oriented so that larger is better.
pub fn signed_objective<P: Problem + ?Sized>(problem: &P, z: &JointState) -> f64 {
    problem.sense().sign() * problem.objective(z)
}

fn check_agent<P: Problem + ?Sized>(problem: &P, agent: usize) -> Result<()> {
    if agent >= problem.agent_count() {
        return Err(Error::InvalidState(format!(
            "agent {agent} out of range for {} agents",
            problem.agent_count()
        )));
    }
    Ok(())
}

/// Private utility `g_agent(z)` in the maximize convention.
pub fn private_utility<P: Problem + ?Sized>(
    problem: &P,
    choice: UtilityChoice,
    agent: usize,
    z: &JointState,
) -> Result<f64> {
    problem.validate(z)?;
    check_agent(problem, agent)?;
    private_utility_given(problem, choice, agent, z, signed_objective(problem, z))
}

/// [`private_utility`] with the signed objective at `z` already known.
/// Skips validation; the search loop calls this once per agent per step.
pub(crate) fn private_utility_given<P: Problem + ?Sized>(
    problem: &P,
    choice: UtilityChoice,
    agent: usize,
    z: &JointState,
    signed_g: f64,
) -> Result<f64> {
    let sign = problem.sense().sign();
    Ok(match choice {
        UtilityChoice::TeamGame => signed_g,
        UtilityChoice::Wlu(clamp) => signed_g - sign * problem.clamped_objective(z, agent, clamp)?,
        UtilityChoice::Econ => signed_g - sign * problem.clamped_objective(z, agent, ClampKind::Absent)?,
        UtilityChoice::Aristocrat => signed_g - sign * problem.meanfield_objective(z, agent),
    })
}

/// Strict three-way sign: zero only agrees with zero.
fn sign3(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Whether moving `agent` from `z[agent]` to `alt_move` changes its private
/// utility in the same direction as the world utility.
pub fn factoredness_check<P: Problem + ?Sized>(
    problem: &P,
    choice: UtilityChoice,
    agent: usize,
    z: &JointState,
    alt_move: usize,
) -> Result<bool> {
    problem.validate(z)?;
    check_agent(problem, agent)?;
    if alt_move >= problem.move_count(agent) {
        return Err(Error::InvalidState(format!(
            "alternative move {alt_move} out of range for agent {agent}"
        )));
    }
    let alt = z.with_move(agent, alt_move);
    let u = signed_objective(problem, z);
    let u_alt = signed_objective(problem, &alt);
    let g = private_utility_given(problem, choice, agent, z, u)?;
    let g_alt = private_utility_given(problem, choice, agent, &alt, u_alt)?;
    Ok(sign3(g - g_alt) == sign3(u - u_alt))
}


#[cfg(test)]
mod tests {
    use super::toy::Quadratic;
    use super::*;

    fn toy() -> Quadratic {
        Quadratic {
            weights: vec![1.0, -0.5, 0.0],
            moves: 4,
        }
    }

    #[test]
    fn team_game_is_world_utility() {
        let p = toy();
        let z = JointState::new(vec![3, 1, 2]);
        for agent in 0..3 {
            let g = private_utility(&p, UtilityChoice::TeamGame, agent, &z).unwrap();
            assert_eq!(g, world_utility(&p, &z).unwrap());
        }
    }

    #[test]
    fn wlu_of_ignored_agent_is_zero() {
        let p = toy();
        for a in 0..4 {
            for b in 0..4 {
                let z = JointState::new(vec![a, b, 3]);
                let g = private_utility(&p, UtilityChoice::Wlu(ClampKind::Zero), 2, &z).unwrap();
                assert_eq!(g, 0.0);
            }
        }
    }

    #[test]
    fn difference_utilities_track_world_changes() {
        let p = toy();
        let choices = [
            UtilityChoice::Wlu(ClampKind::Zero),
            UtilityChoice::Wlu(ClampKind::Move(2)),
            UtilityChoice::Econ,
            UtilityChoice::Aristocrat,
        ];
        let z = JointState::new(vec![1, 2, 0]);
        for choice in choices {
            for agent in 0..3 {
                for alt in 0..4 {
                    let z2 = z.with_move(agent, alt);
                    let dg = private_utility(&p, choice, agent, &z).unwrap()
                        - private_utility(&p, choice, agent, &z2).unwrap();
                    let dw = world_utility(&p, &z).unwrap() - world_utility(&p, &z2).unwrap();
                    assert!((dg - dw).abs() < 1e-12);
                    assert!(factoredness_check(&p, choice, agent, &z, alt).unwrap());
                }
            }
        }
    }

    #[test]
    fn rejects_bad_states_and_clamps() {
        let p = toy();
        assert!(matches!(
            world_utility(&p, &JointState::new(vec![0, 0])),
            Err(Error::InvalidState(_))
        ));
        assert!(matches!(
            world_utility(&p, &JointState::new(vec![0, 4, 0])),
            Err(Error::InvalidState(_))
        ));
        let z = JointState::new(vec![0, 0, 0]);
        assert!(matches!(
            private_utility(&p, UtilityChoice::Wlu(ClampKind::Move(9)), 0, &z),
            Err(Error::Config(_))
        ));
        assert!(private_utility(&p, UtilityChoice::TeamGame, 3, &z).is_err());
        assert!(factoredness_check(&p, UtilityChoice::TeamGame, 0, &z, 4).is_err());
    }

    #[test]
    fn sign_ties_only_agree_with_ties() {
        assert_eq!(sign3(0.0), 0);
        assert_ne!(sign3(0.0), sign3(1e-300));
        assert_eq!(sign3(-2.0), -1);
    }

    #[test]
    fn utility_names_round_trip() {
        for s in ["tg", "wlu", "wlu-absent", "wlu-move3", "au", "econ"] {
            let u: UtilityChoice = s.parse().unwrap();
            assert_eq!(u.to_string(), s);
        }
        assert!("bogus".parse::<UtilityChoice>().is_err());
    }
}

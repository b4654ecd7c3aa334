//! Fixtures shared by the benchmarks.

use intcoord_core::binpack::{BinPackInstance, SizeDistribution};
use intcoord_core::formats::{FormatGame, FormatNetwork, Topology, DEFAULT_EXTRA_LINK_FRACTION};
use intcoord_core::JointState;

/// A generated bin-packing instance with the default size distribution.
pub fn binpack(items: usize, capacity: f64) -> BinPackInstance {
    BinPackInstance::generate(items, capacity, SizeDistribution::default_for(capacity), 1).expect("valid instance")
}

pub fn format_game(nodes: usize, topology: Topology, hops: usize) -> FormatGame {
    let net = FormatNetwork::build(nodes, topology, DEFAULT_EXTRA_LINK_FRACTION, 1).expect("valid network");
    FormatGame::random(net, 4, hops, 2).expect("valid game")
}

/// A fixed, spread-out joint state: agent `a` picks `a mod moves`.
pub fn spread_state(agents: usize, moves: usize) -> JointState {
    JointState::new((0..agents).map(|a| a % moves).collect())
}

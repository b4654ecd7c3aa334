#![allow(dead_code)]

use intcoord_core::formats::{FormatGame, FormatNetwork};
use intcoord_core::JointState;

/// Every joint state with `agents` coordinates of `moves` moves each.
pub fn all_states(agents: usize, moves: usize) -> Vec<JointState> {
    let total = moves.pow(agents as u32);
    (0..total)
        .map(|mut k| {
            JointState::new(
                (0..agents)
                    .map(|_| {
                        let m = k % moves;
                        k /= moves;
                        m
                    })
                    .collect(),
            )
        })
        .collect()
}

/// All-pairs hop distances by Floyd-Warshall.
pub fn floyd_warshall(net: &FormatNetwork) -> Vec<Vec<usize>> {
    let m = net.node_count();
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; m]; m];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for (i, j) in net.edges() {
        d[i][j] = 1;
        d[j][i] = 1;
    }
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Direct evaluation of the format-game world utility over an explicit set
/// of participating agents, each using the formats in `uses[a]`.
/// Neighborhoods come from hop distances on the full network, restricted to
/// participants.
pub fn format_g_direct(game: &FormatGame, uses: &[Vec<bool>], present: &[bool]) -> f64 {
    let dist = floyd_warshall(game.network());
    let m = uses.len();
    let nf = game.format_count();
    let theta: Vec<f64> = (0..nf)
        .map(|i| (0..m).filter(|&a| present[a] && uses[a][i]).count() as f64)
        .collect();
    let mut g = 0.0;
    for a in (0..m).filter(|&a| present[a]) {
        for b in (0..m).filter(|&b| present[b] && b != a && dist[a][b] <= game.hops()) {
            for i in 0..nf {
                if uses[a][i] && uses[b][i] {
                    g += theta[i] * game.pref(a, i);
                }
            }
        }
    }
    g
}

/// Format usage implied by excluded-format moves.
pub fn uses_of(z: &JointState, nf: usize) -> Vec<Vec<bool>> {
    z.moves().iter().map(|&x| (0..nf).map(|i| i != x).collect()).collect()
}

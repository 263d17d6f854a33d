//! The 6-UE worked example: rate matrix, topology labels, expected paths,
//! and the expected 8-slot schedule. Used as a golden fixture throughout the
//! test suites and exportable through the CLI.

use crate::model::{Link, Node, Point, RateMatrix, Topology};
use crate::path_select::PathSet;
use crate::schedule::{Pairing, Schedule};

/// Rate matrix of the 6-UE example cell. UEs 1..6 are ids 0..5, the AP is
/// id 6 (last row/column).
pub fn six_ue_rates() -> RateMatrix {
    RateMatrix::new(vec![
        vec![0, 1, 1, 2, 2, 1, 3],
        vec![1, 0, 1, 1, 1, 2, 3],
        vec![1, 1, 0, 1, 1, 1, 2],
        vec![2, 1, 1, 0, 3, 1, 1],
        vec![2, 1, 1, 3, 0, 1, 1],
        vec![1, 2, 1, 1, 1, 0, 1],
        vec![3, 3, 2, 1, 1, 1, 0],
    ])
    .expect("fixture matrix is square with zero diagonal")
}

/// Fixture topology. Only the node set and AP designation matter to the
/// schedulers; positions are nominal since the fixture carries its own rates.
pub fn six_ue() -> (RateMatrix, Topology) {
    let positions = [
        (4.0, 6.5),
        (6.5, 4.0),
        (9.0, 8.0),
        (2.5, 7.5),
        (1.0, 8.5),
        (8.0, 2.0),
        (5.0, 5.0), // AP, center
    ];
    let nodes = positions
        .iter()
        .enumerate()
        .map(|(id, &(x, y))| Node {
            id,
            position: Point { x, y },
            is_ap: id == 6,
        })
        .collect();
    let topo = Topology::new(nodes, (10.0, 10.0)).expect("valid fixture topology");
    (six_ue_rates(), topo)
}

/// The paths the selection algorithm is expected to produce at h_max = 3:
/// AP->UE1->UE4->UE5, AP->UE2->UE6, AP->UE3.
pub fn six_ue_paths() -> PathSet {
    PathSet {
        paths: vec![vec![6, 0, 3, 4], vec![6, 1, 5], vec![6, 2]],
    }
}

/// The optimal 8-slot schedule for the fixture at d = 6.
pub fn six_ue_schedule() -> Schedule {
    Schedule {
        pairings: vec![
            Pairing { links: vec![Link::new(6, 0)], slots: 2 },
            Pairing { links: vec![Link::new(0, 3), Link::new(6, 1)], slots: 3 },
            Pairing {
                links: vec![Link::new(1, 5), Link::new(6, 2), Link::new(3, 4)],
                slots: 3,
            },
        ],
    }
}

/// Common demand of the worked example.
pub const SIX_UE_DEMAND: u64 = 6;

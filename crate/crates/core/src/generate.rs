//! Random tiny instances and arrangements for tests and fuzzing.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::instance::{BudgetMode, GtspInstance, MdmsopInstance, Point, ProfitRule};
use crate::solution::Arrangement;
use crate::Cost;

/// Shape of a random instance. Ranges are inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct TinySpec {
    pub travelers: usize,
    pub sets: (usize, usize),
    pub nodes: (usize, usize),
    /// Coordinates are integers in `0..=coord_max`.
    pub coord_max: i32,
    pub t_max: (Cost, Cost),
    pub w: f64,
    pub rule: ProfitRule,
    pub mode: BudgetMode,
}

impl Default for TinySpec {
    fn default() -> Self {
        Self {
            travelers: 2,
            sets: (2, 7),
            nodes: (2, 12),
            coord_max: 100,
            t_max: (100, 600),
            w: 0.25,
            rule: ProfitRule::G2,
            mode: BudgetMode::Cumulative,
        }
    }
}

/// A random partitioned point set: every set gets at least one node.
pub fn random_gtsp<R: Rng + ?Sized>(
    rng: &mut R,
    name: &str,
    sets: (usize, usize),
    nodes: (usize, usize),
    coord_max: i32,
) -> GtspInstance {
    let r = rng.gen_range(sets.0..=sets.1);
    let n = rng.gen_range(nodes.0.max(r)..=nodes.1.max(r));
    let coords = (0..n)
        .map(|_| Point {
            x: f64::from(rng.gen_range(0..=coord_max)),
            y: f64::from(rng.gen_range(0..=coord_max)),
        })
        .collect();
    let mut ids: Vec<usize> = (1..=n).collect();
    ids.shuffle(rng);
    let mut members = vec![Vec::new(); r];
    for (k, &v) in ids.iter().enumerate() {
        let q = if k < r { k } else { rng.gen_range(0..r) };
        members[q].push(v);
    }
    for m in &mut members {
        m.sort_unstable();
    }
    GtspInstance::from_sets(name, coords, members).expect("construction is a partition")
}

/// A random adapted instance following `spec`.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, spec: &TinySpec) -> MdmsopInstance {
    let lo = spec.sets.0.max(spec.travelers);
    let name = format!("tiny{}", rng.gen::<u32>());
    let base = random_gtsp(
        rng,
        &name,
        (lo, spec.sets.1.max(lo)),
        spec.nodes,
        spec.coord_max,
    );
    let t_max = rng.gen_range(spec.t_max.0..=spec.t_max.1);
    MdmsopInstance::adapt(base, spec.travelers, spec.rule, spec.mode, spec.w, t_max)
        .expect("spec yields a valid instance")
}

/// Random partition of `1..=r` into `m` traveler rows and the bucket, with
/// random orders. Rows may be empty.
pub fn random_arrangement<R: Rng + ?Sized>(rng: &mut R, m: usize, r: usize) -> Arrangement {
    let mut ids: Vec<usize> = (1..=r).collect();
    ids.shuffle(rng);
    let mut rows = vec![Vec::new(); m + 1];
    for q in ids {
        rows[rng.gen_range(0..=m)].push(q);
    }
    Arrangement::from_rows(rows)
}

/// Like [`random_arrangement`] but every traveler row gets a set first.
/// Requires `r >= m`.
pub fn random_covering_arrangement<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    r: usize,
) -> Arrangement {
    assert!(r >= m, "need at least one set per traveler");
    let mut ids: Vec<usize> = (1..=r).collect();
    ids.shuffle(rng);
    let mut rows = vec![Vec::new(); m + 1];
    for (k, q) in ids.into_iter().enumerate() {
        let row = if k < m { k } else { rng.gen_range(0..=m) };
        rows[row].push(q);
    }
    for row in &mut rows[..m] {
        row.shuffle(rng);
    }
    Arrangement::from_rows(rows)
}

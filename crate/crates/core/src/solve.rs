//! Knossos search: room placement enumeration, an exact backtracking solver
//! and a brute-force wall enumeration oracle for tiny grids.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::knossos::{is_simply_connected, verify_solution, Cell, KnossosInstance, Room, WallSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("grid has {edges} interior edges; the oracle handles at most {max}")]
    OracleTooLarge { edges: usize, max: usize },
}

pub const ORACLE_MAX_EDGES: usize = 25;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Solved(WallSet),
    Unsolvable,
    ResourceLimit,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub nodes: u64,
    pub placements_tried: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub outcome: Outcome,
    pub stats: SolveStats,
}

impl SolveResult {
    pub fn walls(&self) -> Option<&WallSet> {
        match &self.outcome {
            Outcome::Solved(w) => Some(w),
            _ => None,
        }
    }

    pub fn is_solved(&self) -> bool {
        matches!(self.outcome, Outcome::Solved(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveLimits {
    pub max_nodes: u64,
    pub timeout: Duration,
}

impl Default for SolveLimits {
    fn default() -> Self {
        Self {
            max_nodes: 50_000_000,
            timeout: Duration::from_secs(60),
        }
    }
}

/// Upper bound on the cell count of a room with the given wall length.
///
/// The bounding-box cap `(p/2 - 1)^2` is tightened by the minimum perimeter
/// of an n-omino, `2 * ceil(2 * sqrt(n))`, which gives `n <= p^2 / 16`.
pub fn max_room_cells(perimeter: u32) -> usize {
    let p = perimeter as usize;
    if p < 4 {
        return 0;
    }
    let bbox = (p / 2 - 1) * (p / 2 - 1);
    bbox.min(p * p / 16)
}

/// Cell indices (row-major) of every simply connected room containing
/// `clue_cell` with exactly `perimeter` wall segments, avoiding `blocked`
/// cells. Sorted lexicographically by cell list.
pub(crate) fn placements_indexed(
    inst: &KnossosInstance,
    clue_cell: Cell,
    perimeter: u32,
    blocked: &[bool],
) -> Vec<Vec<usize>> {
    let max_n = max_room_cells(perimeter);
    if perimeter % 2 == 1 || max_n == 0 || blocked[inst.index(clue_cell)] {
        return Vec::new();
    }
    let min_n = (perimeter as usize / 2).saturating_sub(1).max(1);
    let mut gen = Redelmeier {
        inst,
        blocked,
        perimeter,
        min_n,
        max_n,
        marked: vec![false; inst.area()],
        in_poly: vec![false; inst.area()],
        poly: Vec::new(),
        adjacency: 0,
        out: Vec::new(),
    };
    let root = inst.index(clue_cell);
    gen.marked[root] = true;
    gen.grow(vec![root]);
    let mut out = gen.out;
    for p in &mut out {
        p.sort_unstable();
    }
    out.sort();
    out
}

/// Fixed-cell polyomino enumeration: every connected set containing the
/// root is visited exactly once.
struct Redelmeier<'a> {
    inst: &'a KnossosInstance,
    blocked: &'a [bool],
    perimeter: u32,
    min_n: usize,
    max_n: usize,
    marked: Vec<bool>,
    in_poly: Vec<bool>,
    poly: Vec<usize>,
    adjacency: u32,
    out: Vec<Vec<usize>>,
}

impl Redelmeier<'_> {
    fn grow(&mut self, mut untried: Vec<usize>) {
        while let Some(cell) = untried.pop() {
            let pos = self.inst.cell_at(cell);
            let added_adj = self
                .inst
                .neighbors(pos)
                .filter(|&n| self.in_poly[self.inst.index(n)])
                .count() as u32;
            self.poly.push(cell);
            self.in_poly[cell] = true;
            self.adjacency += added_adj;
            let n = self.poly.len();
            let per = 4 * n as u32 - 2 * self.adjacency;
            if n >= self.min_n && per == self.perimeter {
                self.record();
            }
            if n < self.max_n {
                let mut fresh = Vec::new();
                for nb in self.inst.neighbors(pos) {
                    let i = self.inst.index(nb);
                    if !self.marked[i] && !self.blocked[i] {
                        self.marked[i] = true;
                        fresh.push(i);
                    }
                }
                let mut next = untried.clone();
                next.extend(fresh.iter().copied());
                self.grow(next);
                for i in fresh {
                    self.marked[i] = false;
                }
            }
            self.poly.pop();
            self.in_poly[cell] = false;
            self.adjacency -= added_adj;
        }
    }

    fn record(&mut self) {
        let cells: Vec<Cell> = self.poly.iter().map(|&i| self.inst.cell_at(i)).collect();
        let room = Room::from_cells(self.inst, cells);
        if is_simply_connected(&room, self.inst) {
            self.out.push(self.poly.clone());
        }
    }
}

/// Every legal room for the clue at `clue_cell` with the given wall length.
///
/// Rooms stay inside the grid, avoid `occupied` cells and every other clue
/// cell, are simply connected, and come out in lexicographic order of their
/// sorted cell lists.
pub fn enumerate_placements(
    inst: &KnossosInstance,
    clue_cell: Cell,
    perimeter: u32,
    occupied: &HashSet<Cell>,
) -> Vec<Room> {
    let mut blocked = vec![false; inst.area()];
    for &cell in inst.clues().keys() {
        if cell != clue_cell {
            blocked[inst.index(cell)] = true;
        }
    }
    for &cell in occupied {
        if inst.contains(cell) {
            blocked[inst.index(cell)] = true;
        }
    }
    placements_indexed(inst, clue_cell, perimeter, &blocked)
        .into_iter()
        .map(|p| Room::from_cells(inst, p.into_iter().map(|i| inst.cell_at(i)).collect()))
        .collect()
}

/// `Some(true)` when every cell carries a 4, `Some(false)` when all clues are
/// 4 but some cell is blank, `None` when another clue value occurs.
pub fn all_fours_fastpath(inst: &KnossosInstance) -> Option<bool> {
    if inst.clues().values().any(|&v| v != 4) {
        return None;
    }
    Some(inst.clues().len() == inst.area())
}

/// Exact-cover state: every cell must be covered by exactly one chosen room,
/// and every clue must choose exactly one of its placements.
struct Search<'a> {
    inst: &'a KnossosInstance,
    placements: Vec<Vec<usize>>,
    owner: Vec<usize>,
    by_clue: Vec<Vec<usize>>,
    by_cell: Vec<Vec<usize>>,
    blockers: Vec<u32>,
    covered: Vec<bool>,
    clue_alive: Vec<u32>,
    cell_alive: Vec<u32>,
    assigned: Vec<bool>,
    chosen: Vec<usize>,
    stats: SolveStats,
    limits: SolveLimits,
    start: Instant,
    hit_limit: bool,
    /// Zero stops at the first solution; otherwise collect up to this many.
    want: usize,
    solutions: Vec<WallSet>,
}

enum Step {
    Dead,
    Forced(usize),
    Branch(usize),
    Done,
}

impl<'a> Search<'a> {
    fn new(inst: &'a KnossosInstance, limits: SolveLimits) -> Self {
        let clue_cells: Vec<(Cell, u32)> = inst.clues().iter().map(|(&c, &v)| (c, v)).collect();
        let mut blocked = vec![false; inst.area()];
        for &(c, _) in &clue_cells {
            blocked[inst.index(c)] = true;
        }
        let mut placements = Vec::new();
        let mut owner = Vec::new();
        let mut by_clue = Vec::new();
        for (k, &(cell, value)) in clue_cells.iter().enumerate() {
            let idx = inst.index(cell);
            blocked[idx] = false;
            let mut ids = Vec::new();
            for p in placements_indexed(inst, cell, value, &blocked) {
                ids.push(placements.len());
                placements.push(p);
                owner.push(k);
            }
            blocked[idx] = true;
            by_clue.push(ids);
        }
        let mut by_cell = vec![Vec::new(); inst.area()];
        for (id, p) in placements.iter().enumerate() {
            for &c in p {
                by_cell[c].push(id);
            }
        }
        let clue_alive = by_clue.iter().map(|v| v.len() as u32).collect();
        let cell_alive = by_cell.iter().map(|v| v.len() as u32).collect();
        Self {
            inst,
            blockers: vec![0; placements.len()],
            placements,
            owner,
            assigned: vec![false; by_clue.len()],
            by_clue,
            by_cell,
            covered: vec![false; inst.area()],
            clue_alive,
            cell_alive,
            chosen: Vec::new(),
            stats: SolveStats::default(),
            limits,
            start: Instant::now(),
            hit_limit: false,
            want: 0,
            solutions: Vec::new(),
        }
    }

    fn apply(&mut self, p: usize) {
        self.assigned[self.owner[p]] = true;
        self.chosen.push(p);
        for i in 0..self.placements[p].len() {
            let c = self.placements[p][i];
            self.covered[c] = true;
            for j in 0..self.by_cell[c].len() {
                let q = self.by_cell[c][j];
                self.blockers[q] += 1;
                if self.blockers[q] == 1 {
                    self.clue_alive[self.owner[q]] -= 1;
                    for &d in &self.placements[q] {
                        self.cell_alive[d] -= 1;
                    }
                }
            }
        }
    }

    fn undo(&mut self, p: usize) {
        for i in (0..self.placements[p].len()).rev() {
            let c = self.placements[p][i];
            for j in 0..self.by_cell[c].len() {
                let q = self.by_cell[c][j];
                self.blockers[q] -= 1;
                if self.blockers[q] == 0 {
                    self.clue_alive[self.owner[q]] += 1;
                    for &d in &self.placements[q] {
                        self.cell_alive[d] += 1;
                    }
                }
            }
            self.covered[c] = false;
        }
        self.chosen.pop();
        self.assigned[self.owner[p]] = false;
    }

    fn next_step(&self) -> Step {
        let mut forced = None;
        for c in 0..self.covered.len() {
            if self.covered[c] {
                continue;
            }
            match self.cell_alive[c] {
                0 => return Step::Dead,
                1 if forced.is_none() => forced = Some(c),
                _ => {}
            }
        }
        if let Some(c) = forced {
            let p = self.by_cell[c]
                .iter()
                .copied()
                .find(|&q| self.blockers[q] == 0)
                .expect("alive placement");
            return Step::Forced(p);
        }
        let mut best: Option<(u32, usize)> = None;
        for k in 0..self.by_clue.len() {
            if self.assigned[k] {
                continue;
            }
            let n = self.clue_alive[k];
            if n == 0 {
                return Step::Dead;
            }
            if best.is_none_or(|(b, _)| n < b) {
                best = Some((n, k));
            }
        }
        match best {
            Some((_, k)) => Step::Branch(k),
            // All clues placed and no uncovered cell left without a room.
            None if self.covered.iter().all(|&c| c) => Step::Done,
            None => Step::Dead,
        }
    }

    fn over_budget(&mut self) -> bool {
        if self.stats.nodes >= self.limits.max_nodes
            || (self.stats.nodes.is_multiple_of(256) && self.start.elapsed() >= self.limits.timeout)
        {
            self.hit_limit = true;
        }
        self.hit_limit
    }

    fn run(&mut self) -> bool {
        let mut trail = Vec::new();
        let found = loop {
            self.stats.nodes += 1;
            if self.over_budget() {
                break false;
            }
            match self.next_step() {
                Step::Dead => break false,
                Step::Done if self.want == 0 => break true,
                Step::Done => {
                    self.solutions.push(self.walls());
                    break self.solutions.len() >= self.want;
                }
                Step::Forced(p) => {
                    self.stats.placements_tried += 1;
                    self.apply(p);
                    trail.push(p);
                }
                Step::Branch(k) => {
                    let options: Vec<usize> = self.by_clue[k]
                        .iter()
                        .copied()
                        .filter(|&q| self.blockers[q] == 0)
                        .collect();
                    let mut ok = false;
                    for p in options {
                        self.stats.placements_tried += 1;
                        self.apply(p);
                        if self.run() {
                            ok = true;
                            break;
                        }
                        self.undo(p);
                        if self.hit_limit {
                            break;
                        }
                    }
                    break ok;
                }
            }
        };
        if !found {
            for p in trail.into_iter().rev() {
                self.undo(p);
            }
        }
        found
    }

    fn walls(&self) -> WallSet {
        let mut room_of = vec![usize::MAX; self.inst.area()];
        for (n, &p) in self.chosen.iter().enumerate() {
            for &c in &self.placements[p] {
                room_of[c] = n;
            }
        }
        WallSet::from_partition(self.inst.width(), self.inst.height(), &room_of)
    }
}

/// Decides solvability exactly, within the given limits.
///
/// Clues are branched most-constrained first; a blank cell that only one
/// remaining room can reach forces that room, and a cell no room can reach
/// prunes the branch.
pub fn solve(inst: &KnossosInstance, limits: SolveLimits) -> SolveResult {
    let start = Instant::now();
    if let Some(all) = all_fours_fastpath(inst) {
        let outcome = if all {
            Outcome::Solved(WallSet::all(inst.width(), inst.height()))
        } else {
            Outcome::Unsolvable
        };
        return SolveResult {
            outcome,
            stats: SolveStats {
                elapsed: start.elapsed(),
                ..Default::default()
            },
        };
    }
    let mut search = Search::new(inst, limits);
    search.start = start;
    let found = search.run();
    search.stats.elapsed = start.elapsed();
    let outcome = if found {
        Outcome::Solved(search.walls())
    } else if search.hit_limit {
        Outcome::ResourceLimit
    } else {
        Outcome::Unsolvable
    };
    SolveResult {
        outcome,
        stats: search.stats,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllSolutions {
    pub solutions: Vec<WallSet>,
    /// No limit was hit and fewer than the requested number exist.
    pub complete: bool,
    pub stats: SolveStats,
}

/// Collects up to `max` distinct solutions.
pub fn enumerate_solutions(
    inst: &KnossosInstance,
    limits: SolveLimits,
    max: usize,
) -> AllSolutions {
    let start = Instant::now();
    if let Some(all) = all_fours_fastpath(inst) {
        let solutions = if all && max > 0 {
            vec![WallSet::all(inst.width(), inst.height())]
        } else {
            Vec::new()
        };
        return AllSolutions {
            complete: solutions.len() < max || !all,
            solutions,
            stats: SolveStats {
                elapsed: start.elapsed(),
                ..Default::default()
            },
        };
    }
    let mut search = Search::new(inst, limits);
    search.start = start;
    search.want = max.max(1);
    let stopped = search.run();
    search.stats.elapsed = start.elapsed();
    AllSolutions {
        complete: !stopped && !search.hit_limit,
        solutions: search.solutions,
        stats: search.stats,
    }
}

/// Tries every assignment of the interior edges and verifies each one.
pub fn brute_force_oracle(inst: &KnossosInstance) -> Result<SolveResult, SolveError> {
    let start = Instant::now();
    let (w, h) = (inst.width(), inst.height());
    let edges = WallSet::interior_edges(w, h);
    if edges.len() > ORACLE_MAX_EDGES {
        return Err(SolveError::OracleTooLarge {
            edges: edges.len(),
            max: ORACLE_MAX_EDGES,
        });
    }
    let mut stats = SolveStats::default();
    for mask in 0u64..(1u64 << edges.len()) {
        stats.nodes += 1;
        let mut walls = WallSet::boundary(w, h);
        for (bit, &e) in edges.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                walls.set(e, true);
            }
        }
        if verify_solution(inst, &walls)
            .expect("dimensions match by construction")
            .accepted()
        {
            stats.elapsed = start.elapsed();
            return Ok(SolveResult {
                outcome: Outcome::Solved(walls),
                stats,
            });
        }
    }
    stats.elapsed = start.elapsed();
    Ok(SolveResult {
        outcome: Outcome::Unsolvable,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knossos::parse_instance;
    use std::collections::BTreeMap;

    fn inst(w: usize, h: usize, clues: &[(Cell, u32)]) -> KnossosInstance {
        KnossosInstance::new(w, h, clues.iter().copied().collect()).unwrap()
    }

    fn open(w: usize, h: usize, clue: Cell, value: u32) -> Vec<Room> {
        enumerate_placements(&inst(w, h, &[(clue, value)]), clue, value, &HashSet::new())
    }

    #[test]
    fn size_caps() {
        assert_eq!(max_room_cells(4), 1);
        assert_eq!(max_room_cells(6), 2);
        assert_eq!(max_room_cells(8), 4);
        assert_eq!(max_room_cells(10), 6);
        assert_eq!(max_room_cells(12), 9);
        assert_eq!(max_room_cells(3), 0);
    }

    #[test]
    fn single_cell_room() {
        let rooms = open(5, 5, (2, 2), 4);
        assert_eq!(rooms.len(), 1);
        assert_eq!(rooms[0].cells, vec![(2, 2)]);
    }

    #[test]
    fn interior_dominoes() {
        let rooms = open(5, 5, (2, 2), 6);
        let cells: Vec<_> = rooms.iter().map(|r| r.cells.clone()).collect();
        assert_eq!(
            cells,
            vec![
                vec![(1, 2), (2, 2)],
                vec![(2, 1), (2, 2)],
                vec![(2, 2), (2, 3)],
                vec![(2, 2), (3, 2)],
            ]
        );
    }

    #[test]
    fn odd_or_tiny_perimeter_yields_nothing() {
        assert!(open(3, 3, (1, 1), 7).is_empty());
        assert!(open(3, 3, (1, 1), 2).is_empty());
    }

    #[test]
    fn placements_avoid_occupied_and_clues() {
        let i = inst(3, 1, &[((0, 0), 6), ((0, 2), 4)]);
        let occupied: HashSet<Cell> = HashSet::new();
        let rooms = enumerate_placements(&i, (0, 0), 6, &occupied);
        assert_eq!(rooms.len(), 1);
        let occupied: HashSet<Cell> = [(0, 1)].into_iter().collect();
        assert!(enumerate_placements(&i, (0, 0), 6, &occupied).is_empty());
    }

    #[test]
    fn sample_grid_solves() {
        let i = parse_instance(include_str!("../fixtures/fig1.kno")).unwrap();
        assert_eq!(all_fours_fastpath(&i), None);
        let res = solve(&i, SolveLimits::default());
        let walls = res.walls().expect("sample grid is solvable");
        assert!(verify_solution(&i, walls).unwrap().accepted());
    }

    #[test]
    fn tiny_cases() {
        let r = solve(&inst(2, 1, &[((0, 0), 6)]), SolveLimits::default());
        assert!(r.is_solved());
        let r = solve(
            &inst(2, 1, &[((0, 0), 4), ((0, 1), 6)]),
            SolveLimits::default(),
        );
        assert_eq!(r.outcome, Outcome::Unsolvable);
    }

    #[test]
    fn fastpath_cases() {
        assert_eq!(
            all_fours_fastpath(&KnossosInstance::filled(3, 3, 4)),
            Some(true)
        );
        let mut clues: BTreeMap<Cell, u32> = KnossosInstance::filled(3, 3, 4).clues().clone();
        clues.remove(&(1, 1));
        let i = KnossosInstance::new(3, 3, clues).unwrap();
        assert_eq!(all_fours_fastpath(&i), Some(false));
        assert_eq!(
            solve(&i, SolveLimits::default()).outcome,
            Outcome::Unsolvable
        );
    }

    #[test]
    fn oracle_small_cases() {
        let r = brute_force_oracle(&KnossosInstance::filled(2, 2, 4)).unwrap();
        assert_eq!(r.walls(), Some(&WallSet::all(2, 2)));
        let r = brute_force_oracle(&inst(2, 2, &[((0, 0), 8)])).unwrap();
        assert_eq!(r.walls(), Some(&WallSet::boundary(2, 2)));
        let r = brute_force_oracle(&inst(2, 2, &[((0, 0), 10)])).unwrap();
        assert_eq!(r.outcome, Outcome::Unsolvable);
        let r = brute_force_oracle(&inst(2, 1, &[((0, 0), 4), ((0, 1), 6)])).unwrap();
        assert_eq!(r.outcome, Outcome::Unsolvable);
    }

    #[test]
    fn oracle_guard() {
        // 5x4 has 31 interior edges.
        assert_eq!(
            brute_force_oracle(&inst(5, 4, &[])).unwrap_err(),
            SolveError::OracleTooLarge { edges: 31, max: 25 }
        );
    }

    #[test]
    fn resource_limit_is_distinct() {
        let i = parse_instance(include_str!("../fixtures/fig1.kno")).unwrap();
        let r = solve(
            &i,
            SolveLimits {
                max_nodes: 3,
                timeout: Duration::from_secs(10),
            },
        );
        assert_eq!(r.outcome, Outcome::ResourceLimit);
    }

    #[test]
    fn deterministic_stats() {
        let i = parse_instance(include_str!("../fixtures/fig1.kno")).unwrap();
        let a = solve(&i, SolveLimits::default());
        let b = solve(&i, SolveLimits::default());
        assert_eq!(a.outcome, b.outcome);
        assert_eq!(
            (a.stats.nodes, a.stats.placements_tried),
            (b.stats.nodes, b.stats.placements_tried)
        );
    }
}

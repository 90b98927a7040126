//! Wall gadgets: clue patterns whose legal completions relate the states of
//! their boundary ports, and an exhaustive checker for those relations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::knossos::{
    is_simply_connected, verify_solution, Cell, KnossosInstance, Room, VerifyReport, WallSet,
};
use crate::solve::placements_indexed;

pub const TEMPLATE_NAMES: [&str; 9] = [
    "wire",
    "corner",
    "phase_shift",
    "choice",
    "crossover",
    "and_gate",
    "slack",
    "terminator_true",
    "terminator_false",
];

/// Most undetermined edges the wall-assignment enumerator accepts.
pub const MAX_UNDETERMINED_EDGES: usize = 30;
/// Above this many undetermined edges the checker enumerates room placements.
pub const EDGE_MODE_LIMIT: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GadgetError {
    #[error("unknown template {0:?}")]
    UnknownTemplate(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("template has {edges} undetermined edges, limit is {max}")]
    TooLarge { edges: usize, max: usize },
}

fn parse_err(line: usize, message: impl Into<String>) -> GadgetError {
    GadgetError::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Entry {
    /// A clue 4: always a single-cell room.
    Square,
    Clue(u32),
    Blank,
    Port(String),
}

impl Entry {
    /// Clue value, with squares read as 4.
    pub fn clue(&self) -> Option<u32> {
        match self {
            Entry::Square => Some(4),
            Entry::Clue(k) => Some(*k),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Top,
    Bottom,
    Left,
    Right,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Top => "top",
            Side::Bottom => "bottom",
            Side::Left => "left",
            Side::Right => "right",
        }
    }

    /// Unit step `(dr, dc)` pointing out of the rectangle.
    pub fn outward(self) -> (isize, isize) {
        match self {
            Side::Top => (-1, 0),
            Side::Bottom => (1, 0),
            Side::Left => (0, -1),
            Side::Right => (0, 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Port {
    pub name: String,
    pub cell: Cell,
    pub side: Side,
}

/// Quarter turns clockwise, applied after an optional left-right mirror.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Transform {
    pub mirror: bool,
    pub rotate: u8,
}

impl Transform {
    pub const IDENTITY: Transform = Transform {
        mirror: false,
        rotate: 0,
    };

    pub fn all() -> impl Iterator<Item = Transform> {
        [false, true]
            .into_iter()
            .flat_map(|mirror| (0..4).map(move |rotate| Transform { mirror, rotate }))
    }

    /// Image of `cell` in a `rows x cols` grid, and the new dimensions.
    pub fn apply(self, rows: usize, cols: usize, (mut r, mut c): Cell) -> (Cell, usize, usize) {
        let (mut h, mut w) = (rows, cols);
        if self.mirror {
            c = w - 1 - c;
        }
        for _ in 0..self.rotate % 4 {
            (r, c) = (c, h - 1 - r);
            (h, w) = (w, h);
        }
        ((r, c), h, w)
    }

    pub fn render(self) -> String {
        format!(
            "{}{}",
            if self.mirror { "m" } else { "" },
            u32::from(self.rotate % 4) * 90
        )
    }

    pub fn parse(s: &str) -> Option<Transform> {
        let (mirror, deg) = match s.strip_prefix('m') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let rotate = match deg {
            "0" => 0,
            "90" => 1,
            "180" => 2,
            "270" => 3,
            _ => return None,
        };
        Some(Transform { mirror, rotate })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetTemplate {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    cells: Vec<Entry>,
    pub ports: Vec<Port>,
    pub note: String,
}

const SOURCES: [(&str, &str); 9] = [
    ("wire", include_str!("../templates/wire.tpl")),
    ("corner", include_str!("../templates/corner.tpl")),
    ("phase_shift", include_str!("../templates/phase_shift.tpl")),
    ("choice", include_str!("../templates/choice.tpl")),
    ("crossover", include_str!("../templates/crossover.tpl")),
    ("and_gate", include_str!("../templates/and_gate.tpl")),
    ("slack", include_str!("../templates/slack.tpl")),
    (
        "terminator_true",
        include_str!("../templates/terminator_true.tpl"),
    ),
    (
        "terminator_false",
        include_str!("../templates/terminator_false.tpl"),
    ),
];

pub fn load_template(name: &str) -> Result<GadgetTemplate, GadgetError> {
    let (_, text) = SOURCES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| GadgetError::UnknownTemplate(name.to_string()))?;
    GadgetTemplate::parse(text)
}

pub fn all_templates() -> Vec<GadgetTemplate> {
    TEMPLATE_NAMES
        .iter()
        .map(|n| load_template(n).expect("bundled template"))
        .collect()
}

impl GadgetTemplate {
    pub fn parse(text: &str) -> Result<Self, GadgetError> {
        let mut note = Vec::new();
        let mut body = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if let Some(c) = t.strip_prefix('%') {
                note.push(c.trim().to_string());
            } else if !t.is_empty() {
                body.push((i + 1, t));
            }
        }
        let mut body = body.into_iter();
        let (_, name) = body.next().ok_or_else(|| parse_err(1, "missing name"))?;
        let (ln, dims) = body
            .next()
            .ok_or_else(|| parse_err(1, "missing dimensions"))?;
        let dims: Vec<usize> = dims
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(ln, "malformed dimensions")))
            .collect::<Result<_, _>>()?;
        let [rows, cols] = dims[..] else {
            return Err(parse_err(ln, "expected \"rows cols\""));
        };
        let mut cells = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let (ln, line) = body
                .next()
                .ok_or_else(|| parse_err(ln + r + 1, format!("missing row {r}")))?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != cols {
                return Err(parse_err(
                    ln,
                    format!("expected {cols} tokens, found {}", toks.len()),
                ));
            }
            for tok in toks {
                cells.push(match tok {
                    "#" => Entry::Square,
                    "." => Entry::Blank,
                    t if t.starts_with('@') && t.len() > 1 => Entry::Port(t[1..].to_string()),
                    t => match t.parse::<u32>() {
                        Ok(4) => Entry::Square,
                        Ok(k) if k > 4 => Entry::Clue(k),
                        _ => return Err(parse_err(ln, format!("bad token {t:?}"))),
                    },
                });
            }
        }
        if let Some((ln, _)) = body.next() {
            return Err(parse_err(ln, "trailing content"));
        }
        Self::build(name.to_string(), rows, cols, cells, note.join("\n"))
            .map_err(|m| parse_err(1, m))
    }

    fn build(
        name: String,
        rows: usize,
        cols: usize,
        cells: Vec<Entry>,
        note: String,
    ) -> Result<Self, String> {
        let mut tpl = Self {
            name,
            rows,
            cols,
            cells,
            ports: Vec::new(),
            note,
        };
        let mut ports = Vec::new();
        let mut seen = BTreeSet::new();
        for r in 0..rows {
            for c in 0..cols {
                if let Entry::Port(name) = tpl.entry((r, c)) {
                    if !seen.insert(name.clone()) {
                        return Err(format!("duplicate port {name}"));
                    }
                    let side = tpl.port_side((r, c))?;
                    ports.push(Port {
                        name: name.clone(),
                        cell: (r, c),
                        side,
                    });
                }
            }
        }
        tpl.ports = ports;
        Ok(tpl)
    }

    /// A port exits opposite its unique clue neighbour, or through the one
    /// border it lies on, and must sit on that border of the rectangle.
    fn port_side(&self, (r, c): Cell) -> Result<Side, String> {
        let mut found = None;
        for (side, (dr, dc)) in [
            (Side::Bottom, (-1isize, 0isize)),
            (Side::Top, (1, 0)),
            (Side::Right, (0, -1)),
            (Side::Left, (0, 1)),
        ] {
            let Some(n) = self.offset((r, c), dr, dc) else {
                continue;
            };
            if matches!(self.entry(n), Entry::Clue(_)) {
                if found.is_some() {
                    return Err(format!("port at ({r}, {c}) has two clue neighbours"));
                }
                found = Some(side);
            }
        }
        let side = match found {
            Some(side) => side,
            None => {
                let on: Vec<Side> = [Side::Top, Side::Bottom, Side::Left, Side::Right]
                    .into_iter()
                    .filter(|s| {
                        let (dr, dc) = s.outward();
                        self.offset((r, c), dr, dc).is_none()
                    })
                    .collect();
                match on[..] {
                    [side] => side,
                    _ => return Err(format!("port at ({r}, {c}) has no clear side")),
                }
            }
        };
        let (dr, dc) = side.outward();
        if self.offset((r, c), dr, dc).is_some() {
            return Err(format!(
                "port at ({r}, {c}) is not on the {} border",
                side.as_str()
            ));
        }
        Ok(side)
    }

    fn offset(&self, (r, c): Cell, dr: isize, dc: isize) -> Option<Cell> {
        let nr = r.checked_add_signed(dr)?;
        let nc = c.checked_add_signed(dc)?;
        (nr < self.rows && nc < self.cols).then_some((nr, nc))
    }

    pub fn entry(&self, (r, c): Cell) -> &Entry {
        &self.cells[r * self.cols + c]
    }

    pub fn port(&self, name: &str) -> Option<&Port> {
        self.ports.iter().find(|p| p.name == name)
    }

    pub fn port_at(&self, cell: Cell) -> Option<&Port> {
        self.ports.iter().find(|p| p.cell == cell)
    }

    pub fn cells(&self) -> impl Iterator<Item = (Cell, &Entry)> {
        (0..self.rows)
            .flat_map(move |r| (0..self.cols).map(move |c| (r, c)))
            .map(move |cell| (cell, self.entry(cell)))
    }

    /// The clue grid alone, ports and blanks unclued.
    pub fn instance(&self) -> KnossosInstance {
        let clues = self
            .cells()
            .filter_map(|(cell, e)| e.clue().map(|k| (cell, k)))
            .collect();
        KnossosInstance::new(self.cols, self.rows, clues).expect("template dimensions")
    }

    pub fn transformed(&self, t: Transform) -> GadgetTemplate {
        let ((_, _), h, w) = t.apply(self.rows, self.cols, (0, 0));
        let mut cells = vec![Entry::Square; h * w];
        for (cell, e) in self.cells() {
            let ((r, c), _, _) = t.apply(self.rows, self.cols, cell);
            cells[r * w + c] = e.clone();
        }
        Self::build(self.name.clone(), h, w, cells, self.note.clone())
            .expect("transforms preserve port placement")
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in self.note.lines() {
            out.push_str(&format!("% {line}\n"));
        }
        out.push_str(&format!("{}\n{} {}\n", self.name, self.rows, self.cols));
        for r in 0..self.rows {
            let toks: Vec<String> = (0..self.cols)
                .map(|c| match self.entry((r, c)) {
                    Entry::Square => "#".to_string(),
                    Entry::Clue(k) => k.to_string(),
                    Entry::Blank => ".".to_string(),
                    Entry::Port(n) => format!("@{n}"),
                })
                .collect();
            out.push_str(&toks.join(" "));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PortSignal {
    Absorbed,
    Free,
}

impl PortSignal {
    pub fn as_str(self) -> &'static str {
        match self {
            PortSignal::Absorbed => "absorbed",
            PortSignal::Free => "free",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PortState(pub BTreeMap<String, PortSignal>);

impl PortState {
    /// State with exactly the named ports absorbed.
    pub fn absorbing(tpl: &GadgetTemplate, absorbed: &[&str]) -> Self {
        PortState(
            tpl.ports
                .iter()
                .map(|p| {
                    let s = if absorbed.contains(&p.name.as_str()) {
                        PortSignal::Absorbed
                    } else {
                        PortSignal::Free
                    };
                    (p.name.clone(), s)
                })
                .collect(),
        )
    }

    pub fn get(&self, port: &str) -> Option<PortSignal> {
        self.0.get(port).copied()
    }

    pub fn is_absorbed(&self, port: &str) -> bool {
        self.get(port) == Some(PortSignal::Absorbed)
    }
}

impl fmt::Display for PortState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(n, s)| format!("{n}={}", s.as_str()))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// One internal solution: every clued room, in template coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Witness {
    pub rooms: Vec<Vec<Cell>>,
}

impl Witness {
    /// Walls of the solution, free ports walled off as single cells.
    pub fn walls(&self, tpl: &GadgetTemplate) -> WallSet {
        let mut room_of = vec![usize::MAX; tpl.rows * tpl.cols];
        for (i, room) in self.rooms.iter().enumerate() {
            for &(r, c) in room {
                room_of[r * tpl.cols + c] = i;
            }
        }
        let free = room_of.iter_mut().filter(|id| **id == usize::MAX);
        for (next, id) in (self.rooms.len()..).zip(free) {
            *id = next;
        }
        WallSet::from_partition(tpl.cols, tpl.rows, &room_of)
    }

    pub fn room_containing(&self, cell: Cell) -> Option<&[Cell]> {
        self.rooms
            .iter()
            .find(|r| r.contains(&cell))
            .map(Vec::as_slice)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PortRelation {
    pub solutions: BTreeMap<PortState, Vec<Witness>>,
}

impl PortRelation {
    pub fn states(&self) -> BTreeSet<PortState> {
        self.solutions.keys().cloned().collect()
    }

    pub fn witness(&self, state: &PortState) -> Option<&Witness> {
        self.solutions.get(state).and_then(|w| w.first())
    }

    pub fn solution_count(&self) -> usize {
        self.solutions.values().map(Vec::len).sum()
    }

    fn insert(&mut self, tpl: &GadgetTemplate, mut rooms: Vec<Vec<Cell>>) {
        for r in &mut rooms {
            r.sort_unstable();
        }
        rooms.sort();
        let absorbed: Vec<&str> = tpl
            .ports
            .iter()
            .filter(|p| rooms.iter().any(|r| r.contains(&p.cell)))
            .map(|p| p.name.as_str())
            .collect();
        let state = PortState::absorbing(tpl, &absorbed);
        let list = self.solutions.entry(state).or_default();
        list.push(Witness { rooms });
        list.sort();
    }
}

/// Adjacent cell pairs whose wall is not fixed by the clues: neither cell is
/// a square and not both carry clues.
pub fn undetermined_edges(tpl: &GadgetTemplate) -> Vec<(Cell, Cell)> {
    let mut out = Vec::new();
    for (cell, e) in tpl.cells() {
        if *e == Entry::Square {
            continue;
        }
        for n in [(cell.0 + 1, cell.1), (cell.0, cell.1 + 1)] {
            if n.0 >= tpl.rows || n.1 >= tpl.cols {
                continue;
            }
            let f = tpl.entry(n);
            if *f == Entry::Square || (e.clue().is_some() && f.clue().is_some()) {
                continue;
            }
            out.push((cell, n));
        }
    }
    out
}

/// Every internal solution, by whichever enumerator suits the template size.
pub fn enumerate_gadget_solutions(tpl: &GadgetTemplate) -> PortRelation {
    if undetermined_edges(tpl).len() <= EDGE_MODE_LIMIT {
        enumerate_by_edges(tpl).expect("within the edge limit")
    } else {
        enumerate_by_placements(tpl)
    }
}

/// Tries every assignment of the undetermined edges.
pub fn enumerate_by_edges(tpl: &GadgetTemplate) -> Result<PortRelation, GadgetError> {
    let edges = undetermined_edges(tpl);
    if edges.len() > MAX_UNDETERMINED_EDGES {
        return Err(GadgetError::TooLarge {
            edges: edges.len(),
            max: MAX_UNDETERMINED_EDGES,
        });
    }
    let inst = tpl.instance();
    let n = tpl.rows * tpl.cols;
    let idx = |(r, c): Cell| r * tpl.cols + c;
    let pairs: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (idx(a), idx(b))).collect();
    let clue: Vec<Option<u32>> = (0..n).map(|i| inst.clue(inst.cell_at(i))).collect();
    let is_port: Vec<bool> = (0..n)
        .map(|i| matches!(tpl.entry(inst.cell_at(i)), Entry::Port(_)))
        .collect();
    let mut rel = PortRelation::default();
    let mut parent = vec![0usize; n];
    let mut clue_of = vec![0u32; n];
    let mut clues = vec![0u8; n];
    let mut size = vec![0usize; n];
    let mut walls = vec![0u32; n];
    let active: Vec<usize> = (0..n)
        .filter(|&i| *tpl.entry(inst.cell_at(i)) != Entry::Square)
        .collect();
    'mask: for mask in 0u64..(1u64 << pairs.len()) {
        for &i in &active {
            parent[i] = i;
        }
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 0 {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 && find(&mut parent, a) == find(&mut parent, b) {
                continue 'mask;
            }
        }
        for &i in &active {
            clues[i] = 0;
            size[i] = 0;
            walls[i] = 0;
        }
        for &i in &active {
            let root = find(&mut parent, i);
            size[root] += 1;
            if let Some(k) = clue[i] {
                clues[root] += 1;
                clue_of[root] = k;
            }
            let (r, c) = inst.cell_at(i);
            let mut own = 0;
            for nb in inst.neighbors((r, c)) {
                let j = inst.index(nb);
                if clue[j] != Some(4) && find(&mut parent, j) == root {
                    own += 1;
                }
            }
            walls[root] += 4 - own;
        }
        for &i in &active {
            if parent[i] != i {
                continue;
            }
            let ok = match clues[i] {
                0 => size[i] == 1 && is_port[i],
                1 => walls[i] == clue_of[i],
                _ => false,
            };
            if !ok {
                continue 'mask;
            }
        }
        let mut groups: BTreeMap<usize, Vec<Cell>> = BTreeMap::new();
        for i in 0..n {
            let root = if active.binary_search(&i).is_ok() {
                find(&mut parent, i)
            } else {
                i
            };
            groups.entry(root).or_default().push(inst.cell_at(i));
        }
        if let Some(rooms) = local_rooms(tpl, &inst, groups.into_values()) {
            rel.insert(tpl, rooms);
        }
    }
    Ok(rel)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// The clued rooms of a partition, or `None` if some part is illegal.
fn local_rooms(
    tpl: &GadgetTemplate,
    inst: &KnossosInstance,
    parts: impl Iterator<Item = Vec<Cell>>,
) -> Option<Vec<Vec<Cell>>> {
    let mut rooms = Vec::new();
    for cells in parts {
        let clues: Vec<u32> = cells.iter().filter_map(|&c| inst.clue(c)).collect();
        match clues[..] {
            [] => {
                if cells.len() != 1 || !matches!(tpl.entry(cells[0]), Entry::Port(_)) {
                    return None;
                }
            }
            [k] => {
                let room = Room::from_cells(inst, cells);
                if room.perimeter != k || !is_simply_connected(&room, inst) {
                    return None;
                }
                rooms.push(room.cells);
            }
            _ => return None,
        }
    }
    Some(rooms)
}

/// Exact cover of all non-port cells by room placements, ports optional.
pub fn enumerate_by_placements(tpl: &GadgetTemplate) -> PortRelation {
    let inst = tpl.instance();
    let n = inst.area();
    let mut blocked = vec![false; n];
    for &c in inst.clues().keys() {
        blocked[inst.index(c)] = true;
    }
    let mut placements: Vec<Vec<usize>> = Vec::new();
    let mut covering: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (&cell, &k) in inst.clues() {
        let i = inst.index(cell);
        blocked[i] = false;
        for p in placements_indexed(&inst, cell, k, &blocked) {
            for &c in &p {
                covering[c].push(placements.len());
            }
            placements.push(p);
        }
        blocked[i] = true;
    }
    let required: Vec<bool> = (0..n)
        .map(|i| !matches!(tpl.entry(inst.cell_at(i)), Entry::Port(_)))
        .collect();
    let mut cover = Cover {
        placements: &placements,
        covering: &covering,
        required: &required,
        used: vec![false; n],
        chosen: Vec::new(),
        found: Vec::new(),
    };
    cover.search();
    let mut rel = PortRelation::default();
    for sol in cover.found {
        let rooms = sol
            .iter()
            .map(|&p| placements[p].iter().map(|&i| inst.cell_at(i)).collect())
            .collect();
        rel.insert(tpl, rooms);
    }
    rel
}

struct Cover<'a> {
    placements: &'a [Vec<usize>],
    covering: &'a [Vec<usize>],
    required: &'a [bool],
    used: Vec<bool>,
    chosen: Vec<usize>,
    found: Vec<Vec<usize>>,
}

impl Cover<'_> {
    fn alive(&self, p: usize) -> bool {
        self.placements[p].iter().all(|&c| !self.used[c])
    }

    fn search(&mut self) {
        let mut best: Option<(usize, usize)> = None;
        for c in 0..self.used.len() {
            if !self.required[c] || self.used[c] {
                continue;
            }
            let count = self.covering[c].iter().filter(|&&p| self.alive(p)).count();
            if best.is_none_or(|(_, k)| count < k) {
                best = Some((c, count));
                if count == 0 {
                    return;
                }
            }
        }
        let Some((cell, _)) = best else {
            self.found.push(self.chosen.clone());
            return;
        };
        let options: Vec<usize> = self.covering[cell]
            .iter()
            .copied()
            .filter(|&p| self.alive(p))
            .collect();
        for p in options {
            for &c in &self.placements[p] {
                self.used[c] = true;
            }
            self.chosen.push(p);
            self.search();
            self.chosen.pop();
            for &c in &self.placements[p] {
                self.used[c] = false;
            }
        }
    }
}

/// The designed relation of a bundled template, as lists of absorbed ports.
pub fn expected_states(tpl: &GadgetTemplate) -> Option<Vec<PortState>> {
    let table: &[&[&str]] = match tpl.name.as_str() {
        "wire" | "corner" | "phase_shift" => &[&["x1"], &["x2"]],
        "choice" => &[&["x1", "x2", "x3"], &["nx1", "nx2", "nx3"]],
        "crossover" => &[&["xt", "yl"], &["xt", "yr"], &["xb", "yl"], &["xb", "yr"]],
        "and_gate" => &[&["x", "y"], &["x"], &["y"], &["z"]],
        "slack" => &[&["x"], &[]],
        "terminator_true" => &[&[]],
        "terminator_false" => &[&["p"]],
        _ => return None,
    };
    Some(table.iter().map(|a| PortState::absorbing(tpl, a)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractReport {
    pub template: String,
    pub found: BTreeSet<PortState>,
    pub missing: Vec<PortState>,
    pub extra: Vec<PortState>,
}

impl ContractReport {
    pub fn passed(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

impl fmt::Display for ContractReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} {} ({} states)",
            self.template,
            self.found.len()
        )?;
        for s in &self.missing {
            write!(f, "\n  missing {s}")?;
        }
        for s in &self.extra {
            write!(f, "\n  extra {s}")?;
        }
        Ok(())
    }
}

/// Compares the enumerated state set with `expected`.
pub fn check_contract(tpl: &GadgetTemplate, expected: &[PortState]) -> ContractReport {
    let found = enumerate_gadget_solutions(tpl).states();
    let want: BTreeSet<PortState> = expected.iter().cloned().collect();
    ContractReport {
        template: tpl.name.clone(),
        missing: want.difference(&found).cloned().collect(),
        extra: found.difference(&want).cloned().collect(),
        found,
    }
}

/// The witness alone in a grid framed by squares, free ports turned into
/// squares, ready for the full verifier.
pub fn embed_witness(tpl: &GadgetTemplate, witness: &Witness) -> (KnossosInstance, WallSet) {
    let (h, w) = (tpl.rows + 2, tpl.cols + 2);
    let mut room_of = vec![usize::MAX; h * w];
    for (i, room) in witness.rooms.iter().enumerate() {
        for &(r, c) in room {
            room_of[(r + 1) * w + c + 1] = i;
        }
    }
    let mut clues = BTreeMap::new();
    let mut next = witness.rooms.len();
    for r in 0..h {
        for c in 0..w {
            let inner =
                (r >= 1 && c >= 1 && r <= tpl.rows && c <= tpl.cols).then(|| (r - 1, c - 1));
            match inner.map(|cell| tpl.entry(cell)) {
                Some(e) if e.clue().is_some() => {
                    clues.insert((r, c), e.clue().unwrap());
                }
                Some(Entry::Blank) => {}
                Some(Entry::Port(_)) if room_of[r * w + c] != usize::MAX => {}
                _ => {
                    clues.insert((r, c), 4);
                }
            }
            if room_of[r * w + c] == usize::MAX {
                room_of[r * w + c] = next;
                next += 1;
            }
        }
    }
    let inst = KnossosInstance::new(w, h, clues).expect("positive dimensions");
    (inst, WallSet::from_partition(w, h, &room_of))
}

pub fn verify_witness(tpl: &GadgetTemplate, witness: &Witness) -> VerifyReport {
    let (inst, walls) = embed_witness(tpl, witness);
    verify_solution(&inst, &walls).expect("matching dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tpl(name: &str) -> GadgetTemplate {
        load_template(name).unwrap()
    }

    fn clues(t: &GadgetTemplate) -> Vec<u32> {
        t.cells()
            .filter_map(|(_, e)| match e {
                Entry::Clue(k) => Some(*k),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn wire_shape() {
        let w = tpl("wire");
        assert_eq!((w.rows, w.cols), (3, 7));
        assert!(
            (0..7).all(|c| *w.entry((0, c)) == Entry::Square && *w.entry((2, c)) == Entry::Square)
        );
        assert_eq!(*w.entry((1, 0)), Entry::Port("x1".into()));
        assert_eq!(*w.entry((1, 6)), Entry::Port("x2".into()));
        assert_eq!(clues(&w), vec![6, 6, 6]);
        assert_eq!(w.port("x1").unwrap().side, Side::Left);
        assert_eq!(w.port("x2").unwrap().side, Side::Right);
    }

    #[test]
    fn and_gate_and_slack_shapes() {
        let a = tpl("and_gate");
        assert_eq!(a.port("x").unwrap().side, Side::Top);
        assert_eq!(a.port("y").unwrap().side, Side::Top);
        assert_eq!(a.port("z").unwrap().side, Side::Bottom);
        assert_eq!(clues(&a), vec![6, 6, 10]);
        let s = tpl("slack");
        assert_eq!(s.ports.len(), 1);
        assert_eq!(clues(&s), vec![6, 8]);
    }

    #[test]
    fn unknown_and_malformed() {
        assert_eq!(
            load_template("nand"),
            Err(GadgetError::UnknownTemplate("nand".into()))
        );
        assert!(GadgetTemplate::parse("t\n1 2\n# #\n#").is_err());
        assert!(GadgetTemplate::parse("t\n1 2\n# 3").is_err());
        assert!(GadgetTemplate::parse("t\n3 3\n# # #\n# @p #\n# # #").is_err());
    }

    #[test]
    fn render_round_trip() {
        for t in all_templates() {
            assert_eq!(GadgetTemplate::parse(&t.render()).unwrap(), t);
        }
    }

    #[test]
    fn contracts_hold() {
        for t in all_templates() {
            let report = check_contract(&t, &expected_states(&t).unwrap());
            assert!(report.passed(), "{report}");
        }
    }

    #[test]
    fn wrong_expectation_is_reported() {
        let w = tpl("wire");
        let all: Vec<PortState> = [&[][..], &["x1"], &["x2"], &["x1", "x2"]]
            .iter()
            .map(|a| PortState::absorbing(&w, a))
            .collect();
        let report = check_contract(&w, &all);
        assert!(!report.passed());
        assert_eq!(report.missing.len(), 2);
        assert!(report.extra.is_empty());
        let report = check_contract(&w, &all[1..2]);
        assert_eq!(report.extra, vec![PortState::absorbing(&w, &["x2"])]);
    }

    #[test]
    fn enumerators_agree() {
        for t in all_templates() {
            if undetermined_edges(&t).len() <= EDGE_MODE_LIMIT {
                assert_eq!(
                    enumerate_by_edges(&t).unwrap(),
                    enumerate_by_placements(&t),
                    "{}",
                    t.name
                );
            }
        }
    }

    #[test]
    fn edge_guard() {
        let c = tpl("choice");
        assert_eq!(undetermined_edges(&c).len(), 70);
        assert!(matches!(
            enumerate_by_edges(&c),
            Err(GadgetError::TooLarge { edges: 70, .. })
        ));
    }

    #[test]
    fn witnesses_verify_when_embedded() {
        for t in all_templates() {
            let rel = enumerate_gadget_solutions(&t);
            for ws in rel.solutions.values() {
                for w in ws {
                    let report = verify_witness(&t, w);
                    assert!(report.accepted(), "{}: {:?}", t.name, report.violations);
                }
            }
        }
    }

    #[test]
    fn transforms_preserve_relations() {
        for name in [
            "wire",
            "corner",
            "phase_shift",
            "and_gate",
            "slack",
            "crossover",
        ] {
            let t = tpl(name);
            let base = enumerate_gadget_solutions(&t).states();
            for tr in Transform::all() {
                let moved = t.transformed(tr);
                assert_eq!(
                    enumerate_gadget_solutions(&moved).states(),
                    base,
                    "{name} {tr:?}"
                );
            }
        }
    }

    #[test]
    fn transform_geometry() {
        let w = tpl("wire");
        let r = w.transformed(Transform {
            mirror: false,
            rotate: 1,
        });
        assert_eq!((r.rows, r.cols), (7, 3));
        assert_eq!(r.port("x1").unwrap().side, Side::Top);
        assert_eq!(r.port("x1").unwrap().cell, (0, 1));
        let m = w.transformed(Transform {
            mirror: true,
            rotate: 0,
        });
        assert_eq!(m.port("x1").unwrap().side, Side::Right);
        for tr in Transform::all() {
            assert_eq!(Transform::parse(&tr.render()), Some(tr));
        }
    }

    #[test]
    fn choice_never_joins_both_sides() {
        let c = tpl("choice");
        let rel = enumerate_gadget_solutions(&c);
        for w in rel.solutions.values().flatten() {
            let twelve = w.room_containing((3, 6)).unwrap();
            assert!(!(twelve.contains(&(3, 2)) && twelve.contains(&(3, 10))));
        }
    }

    #[test]
    fn phase_shift_differs_from_equal_length_wire() {
        let long = GadgetTemplate::parse(
            "wire8\n3 8\n# # # # # # # #\n@x1 6 . 6 . 6 . @x2\n# # # # # # # #",
        )
        .unwrap();
        let wire = enumerate_gadget_solutions(&long).states();
        let phase = enumerate_gadget_solutions(&tpl("phase_shift")).states();
        assert_eq!(
            wire.into_iter().collect::<Vec<_>>(),
            vec![PortState::absorbing(&long, &[])]
        );
        assert_eq!(phase.len(), 2);
    }
}

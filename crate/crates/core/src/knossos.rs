//! Knossos grids: instances, wall sets, rooms and the linear-time verifier.
//!
//! Cells are addressed `(row, col)`, 0-based, row 0 at the top. A [`WallSet`]
//! stores horizontal edges as the top edge of each cell (row `height` holds
//! the bottom edges) and vertical edges as the left edge of each cell (column
//! `width` holds the right edges).

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

/// `(row, col)`.
pub type Cell = (usize, usize);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KnossosError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("dimension mismatch: instance is {expected:?}, walls are {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("clue at {0:?} lies outside the grid")]
    ClueOutOfBounds(Cell),
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> KnossosError {
    KnossosError::Parse {
        line,
        column,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnossosInstance {
    width: usize,
    height: usize,
    clues: BTreeMap<Cell, u32>,
}

impl KnossosInstance {
    pub fn new(
        width: usize,
        height: usize,
        clues: BTreeMap<Cell, u32>,
    ) -> Result<Self, KnossosError> {
        if width == 0 || height == 0 {
            return Err(parse_err(1, 1, "grid dimensions must be positive"));
        }
        if let Some(&cell) = clues.keys().find(|&&(r, c)| r >= height || c >= width) {
            return Err(KnossosError::ClueOutOfBounds(cell));
        }
        Ok(Self {
            width,
            height,
            clues,
        })
    }

    /// Grid with the same clue on every cell.
    pub fn filled(width: usize, height: usize, clue: u32) -> Self {
        let clues = (0..height)
            .flat_map(|r| (0..width).map(move |c| ((r, c), clue)))
            .collect();
        Self {
            width,
            height,
            clues,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }

    pub fn clues(&self) -> &BTreeMap<Cell, u32> {
        &self.clues
    }

    pub fn clue(&self, cell: Cell) -> Option<u32> {
        self.clues.get(&cell).copied()
    }

    pub fn contains(&self, (r, c): Cell) -> bool {
        r < self.height && c < self.width
    }

    pub fn index(&self, (r, c): Cell) -> usize {
        r * self.width + c
    }

    pub fn cell_at(&self, idx: usize) -> Cell {
        (idx / self.width, idx % self.width)
    }

    /// In-grid 4-neighbours in the order up, down, left, right.
    pub fn neighbors(&self, (r, c): Cell) -> impl Iterator<Item = Cell> {
        let (h, w) = (self.height, self.width);
        let up = (r > 0).then(|| (r - 1, c));
        let down = (r + 1 < h).then(|| (r + 1, c));
        let left = (c > 0).then(|| (r, c - 1));
        let right = (c + 1 < w).then(|| (r, c + 1));
        [up, down, left, right].into_iter().flatten()
    }

    pub fn parse(text: &str) -> Result<Self, KnossosError> {
        let mut lines = text.lines().enumerate();
        let (width, height) = loop {
            match lines.next() {
                Some((_, l)) if l.trim().is_empty() => continue,
                Some((n, l)) => break parse_dims(n + 1, l)?,
                None => return Err(parse_err(1, 1, "missing dimension line")),
            }
        };
        let mut clues = BTreeMap::new();
        let mut row = 0;
        for (n, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            if row == height {
                return Err(parse_err(n + 1, 1, "more rows than the declared height"));
            }
            let mut count = 0;
            for (col, (offset, tok)) in tokens(line).enumerate() {
                count += 1;
                if col >= width {
                    return Err(parse_err(n + 1, offset + 1, "ragged row: too many cells"));
                }
                if tok == "." {
                    continue;
                }
                match tok.parse::<i64>() {
                    Ok(v) if v > 0 && v <= u32::MAX as i64 => {
                        clues.insert((row, col), v as u32);
                    }
                    Ok(_) => return Err(parse_err(n + 1, offset + 1, "clue must be positive")),
                    Err(_) => {
                        return Err(parse_err(
                            n + 1,
                            offset + 1,
                            format!("malformed token {tok:?}"),
                        ))
                    }
                }
            }
            if count != width {
                return Err(parse_err(
                    n + 1,
                    line.len() + 1,
                    format!("ragged row: expected {width} cells, found {count}"),
                ));
            }
            row += 1;
        }
        if row != height {
            return Err(parse_err(
                text.lines().count() + 1,
                1,
                format!("expected {height} rows, found {row}"),
            ));
        }
        Self::new(width, height, clues)
    }

    pub fn render(&self) -> String {
        let mut out = format!("{} {}\n", self.width, self.height);
        for r in 0..self.height {
            let row: Vec<String> = (0..self.width)
                .map(|c| match self.clue((r, c)) {
                    Some(v) => v.to_string(),
                    None => ".".to_string(),
                })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Whitespace-separated tokens with their byte offsets.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.split_whitespace()
        .map(move |t| (t.as_ptr() as usize - line.as_ptr() as usize, t))
}

fn parse_dims(line_no: usize, line: &str) -> Result<(usize, usize), KnossosError> {
    let toks: Vec<_> = tokens(line).collect();
    if toks.len() != 2 {
        return Err(parse_err(line_no, 1, "expected \"width height\""));
    }
    let num = |(off, t): (usize, &str)| {
        t.parse::<usize>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| parse_err(line_no, off + 1, format!("bad dimension {t:?}")))
    };
    Ok((num(toks[0])?, num(toks[1])?))
}

pub fn parse_instance(text: &str) -> Result<KnossosInstance, KnossosError> {
    KnossosInstance::parse(text)
}

pub fn render_instance(inst: &KnossosInstance) -> String {
    inst.render()
}

/// A single unit edge of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Edge {
    /// Top edge of cell `(r, c)`; `r == height` is the bottom border.
    Horizontal(usize, usize),
    /// Left edge of cell `(r, c)`; `c == width` is the right border.
    Vertical(usize, usize),
}

impl Edge {
    /// The edge separating two 4-adjacent cells.
    pub fn between(a: Cell, b: Cell) -> Edge {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if lo.0 == hi.0 {
            Edge::Vertical(hi.0, hi.1)
        } else {
            Edge::Horizontal(hi.0, hi.1)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WallSet {
    width: usize,
    height: usize,
    horizontal: Vec<bool>,
    vertical: Vec<bool>,
}

impl WallSet {
    /// Only the outer boundary is walled.
    pub fn boundary(width: usize, height: usize) -> Self {
        let mut ws = Self {
            width,
            height,
            horizontal: vec![false; (height + 1) * width],
            vertical: vec![false; height * (width + 1)],
        };
        for c in 0..width {
            ws.set(Edge::Horizontal(0, c), true);
            ws.set(Edge::Horizontal(height, c), true);
        }
        for r in 0..height {
            ws.set(Edge::Vertical(r, 0), true);
            ws.set(Edge::Vertical(r, width), true);
        }
        ws
    }

    pub fn all(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            horizontal: vec![true; (height + 1) * width],
            vertical: vec![true; height * (width + 1)],
        }
    }

    /// Walls between cells assigned to different rooms; `room_of` is row-major.
    pub fn from_partition(width: usize, height: usize, room_of: &[usize]) -> Self {
        assert_eq!(room_of.len(), width * height);
        let mut ws = Self::boundary(width, height);
        for r in 0..height {
            for c in 0..width {
                let id = room_of[r * width + c];
                if r + 1 < height && room_of[(r + 1) * width + c] != id {
                    ws.set(Edge::Horizontal(r + 1, c), true);
                }
                if c + 1 < width && room_of[r * width + c + 1] != id {
                    ws.set(Edge::Vertical(r, c + 1), true);
                }
            }
        }
        ws
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_wall(&self, edge: Edge) -> bool {
        match edge {
            Edge::Horizontal(r, c) => self.horizontal[r * self.width + c],
            Edge::Vertical(r, c) => self.vertical[r * (self.width + 1) + c],
        }
    }

    pub fn set(&mut self, edge: Edge, wall: bool) {
        match edge {
            Edge::Horizontal(r, c) => self.horizontal[r * self.width + c] = wall,
            Edge::Vertical(r, c) => self.vertical[r * (self.width + 1) + c] = wall,
        }
    }

    pub fn toggle(&mut self, edge: Edge) {
        let w = self.is_wall(edge);
        self.set(edge, !w);
    }

    /// Edges between two in-grid cells, horizontal edges first, row-major.
    pub fn interior_edges(width: usize, height: usize) -> Vec<Edge> {
        let mut out = Vec::new();
        for r in 1..height {
            for c in 0..width {
                out.push(Edge::Horizontal(r, c));
            }
        }
        for r in 0..height {
            for c in 1..width {
                out.push(Edge::Vertical(r, c));
            }
        }
        out
    }

    pub fn boundary_edges(width: usize, height: usize) -> Vec<Edge> {
        let mut out = Vec::new();
        for c in 0..width {
            out.push(Edge::Horizontal(0, c));
        }
        for r in 0..height {
            out.push(Edge::Vertical(r, 0));
            out.push(Edge::Vertical(r, width));
        }
        for c in 0..width {
            out.push(Edge::Horizontal(height, c));
        }
        out
    }

    /// Is there a wall between two adjacent cells?
    pub fn separates(&self, a: Cell, b: Cell) -> bool {
        self.is_wall(Edge::between(a, b))
    }

    pub fn parse(text: &str) -> Result<Self, KnossosError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (n, first) = lines
            .next()
            .ok_or_else(|| parse_err(1, 1, "missing dimension line"))?;
        let (width, height) = parse_dims(n + 1, first)?;
        let mut ws = Self {
            width,
            height,
            horizontal: vec![false; (height + 1) * width],
            vertical: vec![false; height * (width + 1)],
        };
        for r in 0..=height {
            let (n, line) = lines
                .next()
                .ok_or_else(|| parse_err(n + 2 + r, 1, "missing horizontal wall row"))?;
            let line = line.trim_end();
            if line.chars().count() != width {
                return Err(parse_err(n + 1, 1, format!("expected {width} characters")));
            }
            for (c, ch) in line.chars().enumerate() {
                match ch {
                    '-' => ws.set(Edge::Horizontal(r, c), true),
                    '.' => {}
                    _ => return Err(parse_err(n + 1, c + 1, format!("unexpected {ch:?}"))),
                }
            }
        }
        for r in 0..height {
            let (n, line) = lines
                .next()
                .ok_or_else(|| parse_err(n + 3 + height + r, 1, "missing vertical wall row"))?;
            let line = line.trim_end();
            if line.chars().count() != width + 1 {
                return Err(parse_err(
                    n + 1,
                    1,
                    format!("expected {} characters", width + 1),
                ));
            }
            for (c, ch) in line.chars().enumerate() {
                match ch {
                    '|' => ws.set(Edge::Vertical(r, c), true),
                    '.' => {}
                    _ => return Err(parse_err(n + 1, c + 1, format!("unexpected {ch:?}"))),
                }
            }
        }
        if let Some((n, _)) = lines.next() {
            return Err(parse_err(n + 1, 1, "trailing content after wall rows"));
        }
        Ok(ws)
    }

    pub fn render(&self) -> String {
        let mut out = format!("{} {}\n", self.width, self.height);
        for r in 0..=self.height {
            for c in 0..self.width {
                out.push(if self.is_wall(Edge::Horizontal(r, c)) {
                    '-'
                } else {
                    '.'
                });
            }
            out.push('\n');
        }
        for r in 0..self.height {
            for c in 0..=self.width {
                out.push(if self.is_wall(Edge::Vertical(r, c)) {
                    '|'
                } else {
                    '.'
                });
            }
            out.push('\n');
        }
        out
    }
}

pub fn parse_solution(text: &str) -> Result<WallSet, KnossosError> {
    WallSet::parse(text)
}

pub fn render_solution(walls: &WallSet) -> String {
    walls.render()
}

/// Box-drawing picture of an instance with walls, for humans.
pub fn render_pretty(inst: &KnossosInstance, walls: &WallSet) -> String {
    let (h, w) = (inst.height(), inst.width());
    let cw = inst
        .clues()
        .values()
        .map(|v| v.to_string().len())
        .max()
        .unwrap_or(1)
        .max(2);
    let hw = |r: usize, c: usize| c < w && walls.is_wall(Edge::Horizontal(r, c));
    let vw = |r: usize, c: usize| r < h && walls.is_wall(Edge::Vertical(r, c));
    let mut out = String::new();
    for r in 0..=h {
        for c in 0..=w {
            let up = r > 0 && vw(r - 1, c);
            let down = vw(r, c);
            let left = c > 0 && hw(r, c - 1);
            let right = hw(r, c);
            out.push(junction(up, down, left, right));
            if c < w {
                let ch = if right { '─' } else { ' ' };
                for _ in 0..cw {
                    out.push(ch);
                }
            }
        }
        out.push('\n');
        if r == h {
            break;
        }
        for c in 0..=w {
            out.push(if vw(r, c) { '│' } else { ' ' });
            if c < w {
                let label = inst.clue((r, c)).map(|v| v.to_string()).unwrap_or_default();
                let _ = write!(out, "{label:^cw$}");
            }
        }
        out.push('\n');
    }
    out
}

fn junction(up: bool, down: bool, left: bool, right: bool) -> char {
    match (up, down, left, right) {
        (false, false, false, false) => '·',
        (true, true, false, false) | (true, false, false, false) | (false, true, false, false) => {
            '│'
        }
        (false, false, true, true) | (false, false, true, false) | (false, false, false, true) => {
            '─'
        }
        (false, true, false, true) => '┌',
        (false, true, true, false) => '┐',
        (true, false, false, true) => '└',
        (true, false, true, false) => '┘',
        (true, true, false, true) => '├',
        (true, true, true, false) => '┤',
        (false, true, true, true) => '┬',
        (true, false, true, true) => '┴',
        (true, true, true, true) => '┼',
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Room {
    /// Sorted row-major.
    pub cells: Vec<Cell>,
    /// Set iff exactly one clue lies in the room.
    pub clue_cell: Option<Cell>,
    /// Every clued cell inside the room.
    pub clue_cells: Vec<Cell>,
    /// Unit segments on the room border: `4 * cells - 2 * adjacencies`.
    pub perimeter: u32,
    /// Wall segments between two cells of this room.
    pub internal_walls: u32,
}

impl Room {
    /// Builds a room from its cells, computing the perimeter from adjacency.
    pub fn from_cells(inst: &KnossosInstance, mut cells: Vec<Cell>) -> Room {
        cells.sort_unstable();
        cells.dedup();
        let perimeter = polyomino_perimeter(&cells);
        let clue_cells: Vec<Cell> = cells
            .iter()
            .copied()
            .filter(|c| inst.clue(*c).is_some())
            .collect();
        Room {
            clue_cell: (clue_cells.len() == 1).then(|| clue_cells[0]),
            clue_cells,
            cells,
            perimeter,
            internal_walls: 0,
        }
    }

    /// Total wall length enclosing and inside the room.
    pub fn wall_length(&self) -> u32 {
        self.perimeter + self.internal_walls
    }
}

/// `4 * |cells| - 2 * (edge-adjacent pairs)`; `cells` must be sorted.
pub fn polyomino_perimeter(cells: &[Cell]) -> u32 {
    let adj = cells
        .iter()
        .map(|&(r, c)| {
            cells.binary_search(&(r + 1, c)).is_ok() as u32
                + cells.binary_search(&(r, c + 1)).is_ok() as u32
        })
        .sum::<u32>();
    4 * cells.len() as u32 - 2 * adj
}

fn check_dims(inst: &KnossosInstance, walls: &WallSet) -> Result<(), KnossosError> {
    if (inst.width(), inst.height()) != (walls.width(), walls.height()) {
        return Err(KnossosError::DimensionMismatch {
            expected: (inst.width(), inst.height()),
            found: (walls.width(), walls.height()),
        });
    }
    Ok(())
}

/// Room id of each cell (row-major), ids assigned in row-major order of first cell.
fn label_rooms(inst: &KnossosInstance, walls: &WallSet) -> (Vec<usize>, usize) {
    const NONE: usize = usize::MAX;
    let mut label = vec![NONE; inst.area()];
    let mut next = 0;
    let mut stack = Vec::new();
    for start in 0..inst.area() {
        if label[start] != NONE {
            continue;
        }
        label[start] = next;
        stack.push(inst.cell_at(start));
        while let Some(cell) = stack.pop() {
            for nb in inst.neighbors(cell) {
                let ni = inst.index(nb);
                if label[ni] == NONE && !walls.separates(cell, nb) {
                    label[ni] = next;
                    stack.push(nb);
                }
            }
        }
        next += 1;
    }
    (label, next)
}

/// Connected components of cells under wall-free adjacency.
pub fn rooms_from_walls(
    inst: &KnossosInstance,
    walls: &WallSet,
) -> Result<Vec<Room>, KnossosError> {
    check_dims(inst, walls)?;
    let (label, count) = label_rooms(inst, walls);
    let mut cells: Vec<Vec<Cell>> = vec![Vec::new(); count];
    for (i, &id) in label.iter().enumerate() {
        cells[id].push(inst.cell_at(i));
    }
    let mut internal = vec![0u32; count];
    for (i, &id) in label.iter().enumerate() {
        let (r, c) = inst.cell_at(i);
        if r + 1 < inst.height()
            && label[i + inst.width()] == id
            && walls.is_wall(Edge::Horizontal(r + 1, c))
        {
            internal[id] += 1;
        }
        if c + 1 < inst.width() && label[i + 1] == id && walls.is_wall(Edge::Vertical(r, c + 1)) {
            internal[id] += 1;
        }
    }
    Ok(cells
        .into_iter()
        .zip(internal)
        .map(|(cells, internal_walls)| Room {
            internal_walls,
            ..Room::from_cells(inst, cells)
        })
        .collect())
}

/// True iff the room has no holes: the complement inside the room's bounding
/// box grown by one cell is a single 4-connected region.
pub fn is_simply_connected(room: &Room, _inst: &KnossosInstance) -> bool {
    let Some(&(r0, _)) = room.cells.first() else {
        return true;
    };
    let r1 = room.cells.last().map(|c| c.0).unwrap_or(r0);
    let c0 = room.cells.iter().map(|c| c.1).min().unwrap_or(0);
    let c1 = room.cells.iter().map(|c| c.1).max().unwrap_or(0);
    // Box coordinates are shifted by one so the margin starts at 0.
    let (bh, bw) = (r1 - r0 + 3, c1 - c0 + 3);
    let mut blocked = vec![false; bh * bw];
    for &(r, c) in &room.cells {
        blocked[(r - r0 + 1) * bw + (c - c0 + 1)] = true;
    }
    let free = blocked.iter().filter(|b| !**b).count();
    let mut seen = blocked.clone();
    let mut stack = vec![(0usize, 0usize)];
    seen[0] = true;
    let mut reached = 0;
    while let Some((r, c)) = stack.pop() {
        reached += 1;
        let cand = [
            (r.wrapping_sub(1), c),
            (r + 1, c),
            (r, c.wrapping_sub(1)),
            (r, c + 1),
        ];
        for (nr, nc) in cand {
            if nr < bh && nc < bw && !seen[nr * bw + nc] {
                seen[nr * bw + nc] = true;
                stack.push((nr, nc));
            }
        }
    }
    reached == free
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    CellInNoCluedRoom,
    RoomWithMultipleClues,
    PerimeterMismatch,
    RoomNotSimplyConnected,
    BoundaryMissing,
    InternalWall,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::CellInNoCluedRoom => "cell-in-no-clued-room",
            ViolationKind::RoomWithMultipleClues => "room-with-multiple-clues",
            ViolationKind::PerimeterMismatch => "perimeter-mismatch",
            ViolationKind::RoomNotSimplyConnected => "room-not-simply-connected",
            ViolationKind::BoundaryMissing => "boundary-missing",
            ViolationKind::InternalWall => "internal-wall",
        }
    }
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub kind: ViolationKind,
    pub location: Cell,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn accepted(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

/// Holes of every room via the Euler characteristic of its closed cell
/// complex, in one pass over the grid.
fn room_hole_counts(inst: &KnossosInstance, label: &[usize], rooms: usize) -> Vec<i64> {
    let (h, w) = (inst.height(), inst.width());
    let mut chi = vec![0i64; rooms];
    // F: one per cell.
    for &id in label {
        chi[id] += 1;
    }
    // E: distinct unit edges touched by a room's cells.
    let edge_owner = |r: usize, c: usize, horizontal: bool| -> [Option<usize>; 2] {
        if horizontal {
            let a = (r > 0).then(|| label[(r - 1) * w + c]);
            let b = (r < h).then(|| label[r * w + c]);
            [a, b]
        } else {
            let a = (c > 0).then(|| label[r * w + c - 1]);
            let b = (c < w).then(|| label[r * w + c]);
            [a, b]
        }
    };
    for r in 0..=h {
        for c in 0..w {
            let [a, b] = edge_owner(r, c, true);
            if let Some(a) = a {
                chi[a] -= 1;
            }
            if let Some(b) = b {
                if Some(b) != a {
                    chi[b] -= 1;
                }
            }
        }
    }
    for r in 0..h {
        for c in 0..=w {
            let [a, b] = edge_owner(r, c, false);
            if let Some(a) = a {
                chi[a] -= 1;
            }
            if let Some(b) = b {
                if Some(b) != a {
                    chi[b] -= 1;
                }
            }
        }
    }
    // V: distinct lattice points touched by a room's cells.
    for r in 0..=h {
        for c in 0..=w {
            let mut around = [usize::MAX; 4];
            let mut n = 0;
            for (dr, dc) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                if r + dr >= 1 && c + dc >= 1 && r + dr - 1 < h && c + dc - 1 < w {
                    let id = label[(r + dr - 1) * w + c + dc - 1];
                    if !around[..n].contains(&id) {
                        around[n] = id;
                        n += 1;
                    }
                }
            }
            for &id in &around[..n] {
                chi[id] += 1;
            }
        }
    }
    chi.into_iter().map(|x| 1 - x).collect()
}

/// Checks all Knossos rules and reports every violation found.
pub fn verify_solution(
    inst: &KnossosInstance,
    walls: &WallSet,
) -> Result<VerifyReport, KnossosError> {
    check_dims(inst, walls)?;
    let (w, h) = (inst.width(), inst.height());
    let mut violations = Vec::new();
    for edge in WallSet::boundary_edges(w, h) {
        if !walls.is_wall(edge) {
            let location = match edge {
                Edge::Horizontal(r, c) => (r.min(h - 1), c),
                Edge::Vertical(r, c) => (r, c.min(w - 1)),
            };
            violations.push(Violation {
                kind: ViolationKind::BoundaryMissing,
                location,
            });
        }
    }
    let (label, count) = label_rooms(inst, walls);
    let mut size = vec![0u32; count];
    let mut adj = vec![0u32; count];
    let mut internal = vec![0u32; count];
    let mut first = vec![None; count];
    let mut clue_cells: Vec<Vec<Cell>> = vec![Vec::new(); count];
    for (i, &id) in label.iter().enumerate() {
        let cell = inst.cell_at(i);
        size[id] += 1;
        first[id].get_or_insert(cell);
        if inst.clue(cell).is_some() {
            clue_cells[id].push(cell);
        }
        let (r, c) = cell;
        if r + 1 < h && label[i + w] == id {
            if walls.is_wall(Edge::Horizontal(r + 1, c)) {
                internal[id] += 1;
            } else {
                adj[id] += 1;
            }
        }
        if c + 1 < w && label[i + 1] == id {
            if walls.is_wall(Edge::Vertical(r, c + 1)) {
                internal[id] += 1;
            } else {
                adj[id] += 1;
            }
        }
    }
    // Wall-free adjacencies undercount true adjacency when a room has internal walls.
    let holes = room_hole_counts(inst, &label, count);
    for id in 0..count {
        let anchor = first[id].expect("every room has a cell");
        match clue_cells[id].as_slice() {
            [] => violations.push(Violation {
                kind: ViolationKind::CellInNoCluedRoom,
                location: anchor,
            }),
            [clue] => {
                let perimeter = 4 * size[id] - 2 * (adj[id] + internal[id]);
                if internal[id] > 0 {
                    violations.push(Violation {
                        kind: ViolationKind::InternalWall,
                        location: anchor,
                    });
                }
                if Some(perimeter) != inst.clue(*clue) {
                    violations.push(Violation {
                        kind: ViolationKind::PerimeterMismatch,
                        location: *clue,
                    });
                }
            }
            [_, second, ..] => violations.push(Violation {
                kind: ViolationKind::RoomWithMultipleClues,
                location: *second,
            }),
        }
        if holes[id] != 0 {
            violations.push(Violation {
                kind: ViolationKind::RoomNotSimplyConnected,
                location: anchor,
            });
        }
    }
    violations.sort();
    Ok(VerifyReport { violations })
}

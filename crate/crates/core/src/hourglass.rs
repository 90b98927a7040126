//! The Hour-Glass: a double triangle of numbers, widths `W, W-1, ..., 1, ...,
//! W-1, W`, and a target sum. A path takes one cell per row and moves to an
//! absolute column one to the left or right on every step.
//!
//! Rows and in-row positions are 1-based. The widest rows occupy absolute
//! columns `1, 3, ..., 2W-1`; a row of width `w` is indented by `W - w`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Largest cell value accepted by the parser.
pub const MAX_VALUE: u64 = 1 << 40;
/// Largest half-width the path oracle will enumerate.
pub const ORACLE_MAX_HALF_WIDTH: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HourglassError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid cell address ({0}, {1})")]
    InvalidAddress(usize, usize),
    #[error("half-width {0} exceeds the oracle limit of {ORACLE_MAX_HALF_WIDTH}")]
    OracleTooLarge(usize),
    #[error("row {row} has {found} values, expected {expected}")]
    BadRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("value {0} exceeds the cap of 2^40")]
    ValueTooLarge(u64),
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> HourglassError {
    HourglassError::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// 1-based `(row, position in row)`.
pub type Address = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HourglassInstance {
    half_width: usize,
    rows: Vec<Vec<u64>>,
    target: u64,
}

impl HourglassInstance {
    pub fn new(
        half_width: usize,
        rows: Vec<Vec<u64>>,
        target: u64,
    ) -> Result<Self, HourglassError> {
        if half_width == 0 {
            return Err(parse_err(1, 1, "half-width must be positive"));
        }
        if rows.len() != 2 * half_width - 1 {
            return Err(parse_err(
                1,
                1,
                format!("expected {} rows, found {}", 2 * half_width - 1, rows.len()),
            ));
        }
        for (i, row) in rows.iter().enumerate() {
            let expected = row_width(half_width, i + 1);
            if row.len() != expected {
                return Err(HourglassError::BadRow {
                    row: i + 1,
                    expected,
                    found: row.len(),
                });
            }
            if let Some(&v) = row.iter().find(|&&v| v > MAX_VALUE) {
                return Err(HourglassError::ValueTooLarge(v));
            }
        }
        if target > MAX_VALUE.saturating_mul(rows.len() as u64) {
            return Err(HourglassError::ValueTooLarge(target));
        }
        Ok(Self {
            half_width,
            rows,
            target,
        })
    }

    /// Every cell zero.
    pub fn zeros(half_width: usize, target: u64) -> Self {
        let rows = (1..2 * half_width)
            .map(|r| vec![0; row_width(half_width, r)])
            .collect();
        Self {
            half_width,
            rows,
            target,
        }
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    pub fn with_target(&self, target: u64) -> Self {
        Self {
            target,
            ..self.clone()
        }
    }

    pub fn width(&self, row: usize) -> usize {
        row_width(self.half_width, row)
    }

    pub fn is_valid(&self, (r, j): Address) -> bool {
        r >= 1 && r <= self.row_count() && j >= 1 && j <= self.width(r)
    }

    /// Absolute column of a cell, in `1..=2W-1`.
    pub fn acol(&self, (r, j): Address) -> usize {
        (self.half_width - self.width(r)) + 2 * j - 1
    }

    pub fn value(&self, (r, j): Address) -> u64 {
        self.rows[r - 1][j - 1]
    }

    /// Position in `row` with absolute column `acol`, if any.
    pub fn at_acol(&self, row: usize, acol: usize) -> Option<Address> {
        let indent = self.half_width - self.width(row);
        if acol <= indent || (acol - indent).is_multiple_of(2) {
            return None;
        }
        let j = (acol - indent).div_ceil(2);
        (j <= self.width(row)).then_some((row, j))
    }

    pub fn parse(text: &str) -> Result<Self, HourglassError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (n, first) = lines
            .next()
            .ok_or_else(|| parse_err(1, 1, "missing \"W t\" line"))?;
        let head = numbers(n + 1, first)?;
        let [w, t] = head[..] else {
            return Err(parse_err(n + 1, 1, "expected \"W t\""));
        };
        if w == 0 || w > 1 << 20 {
            return Err(parse_err(n + 1, 1, "half-width must be positive"));
        }
        let w = w as usize;
        let mut rows = Vec::with_capacity(2 * w - 1);
        for r in 1..2 * w {
            let (n, line) = lines
                .next()
                .ok_or_else(|| parse_err(n + 1 + r, 1, format!("missing row {r}")))?;
            let vals = numbers(n + 1, line)?;
            if vals.len() != row_width(w, r) {
                return Err(parse_err(
                    n + 1,
                    1,
                    format!(
                        "row {r} needs {} values, found {}",
                        row_width(w, r),
                        vals.len()
                    ),
                ));
            }
            if let Some(&v) = vals.iter().find(|&&v| v > MAX_VALUE) {
                return Err(parse_err(n + 1, 1, format!("value {v} exceeds 2^40")));
            }
            rows.push(vals);
        }
        if let Some((n, _)) = lines.next() {
            return Err(parse_err(n + 1, 1, "trailing content"));
        }
        Self::new(w, rows, t)
    }

    pub fn render(&self) -> String {
        let mut out = format!("{} {}\n", self.half_width, self.target);
        for row in &self.rows {
            let strs: Vec<String> = row.iter().map(u64::to_string).collect();
            out.push_str(&strs.join(" "));
            out.push('\n');
        }
        out
    }
}

fn numbers(line_no: usize, line: &str) -> Result<Vec<u64>, HourglassError> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<u64>().map_err(|_| {
                let col = tok.as_ptr() as usize - line.as_ptr() as usize + 1;
                parse_err(line_no, col, format!("malformed number {tok:?}"))
            })
        })
        .collect()
}

/// Cells in row `row` of an hour-glass of half-width `w`.
pub fn row_width(w: usize, row: usize) -> usize {
    row.abs_diff(w) + 1
}

pub fn parse_hourglass(text: &str) -> Result<HourglassInstance, HourglassError> {
    HourglassInstance::parse(text)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HourglassPath {
    pub cells: Vec<Address>,
}

impl HourglassPath {
    /// Path from in-row positions, one per row starting at row 1.
    pub fn from_positions(positions: &[usize]) -> Self {
        Self {
            cells: positions
                .iter()
                .enumerate()
                .map(|(i, &j)| (i + 1, j))
                .collect(),
        }
    }

    pub fn positions(&self) -> Vec<usize> {
        self.cells.iter().map(|c| c.1).collect()
    }

    pub fn parse(text: &str) -> Result<Self, HourglassError> {
        let line = text.trim();
        let pos = line
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| parse_err(1, 1, format!("malformed index {t:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_positions(&pos))
    }

    pub fn render(&self) -> String {
        let strs: Vec<String> = self.cells.iter().map(|c| c.1.to_string()).collect();
        format!("{}\n", strs.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathFault {
    WrongLength { expected: usize, found: usize },
    RowOutOfOrder { index: usize },
    InvalidCell(Address),
    NotDiagonal { from: Address, to: Address },
    Overflow,
    WrongSum { sum: u64, target: u64 },
}

impl fmt::Display for PathFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathFault::WrongLength { expected, found } => {
                write!(f, "path has {found} cells, expected {expected}")
            }
            PathFault::RowOutOfOrder { index } => write!(f, "cell {index} is in the wrong row"),
            PathFault::InvalidCell((r, j)) => write!(f, "cell ({r}, {j}) does not exist"),
            PathFault::NotDiagonal { from, to } => {
                write!(f, "step {from:?} -> {to:?} is not diagonal")
            }
            PathFault::Overflow => write!(f, "sum overflows 64 bits"),
            PathFault::WrongSum { sum, target } => write!(f, "sum {sum} != target {target}"),
        }
    }
}

/// Cells in the next row adjacent to `cell`, smaller column first.
pub fn successors(inst: &HourglassInstance, cell: Address) -> Result<Vec<Address>, HourglassError> {
    if !inst.is_valid(cell) || cell.0 >= inst.row_count() {
        return Err(HourglassError::InvalidAddress(cell.0, cell.1));
    }
    let a = inst.acol(cell);
    let next = cell.0 + 1;
    Ok([a.checked_sub(1), Some(a + 1)]
        .into_iter()
        .flatten()
        .filter_map(|c| inst.at_acol(next, c))
        .collect())
}

fn succ_unchecked(inst: &HourglassInstance, cell: Address) -> impl Iterator<Item = Address> + '_ {
    let a = inst.acol(cell);
    let next = cell.0 + 1;
    [a.checked_sub(1), Some(a + 1)]
        .into_iter()
        .flatten()
        .filter_map(move |c| inst.at_acol(next, c))
}

/// Structural validity and the path sum.
pub fn path_sum(inst: &HourglassInstance, path: &HourglassPath) -> Result<u64, PathFault> {
    if path.cells.len() != inst.row_count() {
        return Err(PathFault::WrongLength {
            expected: inst.row_count(),
            found: path.cells.len(),
        });
    }
    let mut sum = 0u64;
    for (i, &cell) in path.cells.iter().enumerate() {
        if cell.0 != i + 1 {
            return Err(PathFault::RowOutOfOrder { index: i });
        }
        if !inst.is_valid(cell) {
            return Err(PathFault::InvalidCell(cell));
        }
        if i > 0 {
            let prev = path.cells[i - 1];
            if inst.acol(prev).abs_diff(inst.acol(cell)) != 1 {
                return Err(PathFault::NotDiagonal {
                    from: prev,
                    to: cell,
                });
            }
        }
        sum = sum
            .checked_add(inst.value(cell))
            .ok_or(PathFault::Overflow)?;
    }
    Ok(sum)
}

/// `Ok(())` iff the path is structurally valid and sums to the target.
pub fn check_path(inst: &HourglassInstance, path: &HourglassPath) -> Result<(), PathFault> {
    let sum = path_sum(inst, path)?;
    if sum != inst.target() {
        return Err(PathFault::WrongSum {
            sum,
            target: inst.target(),
        });
    }
    Ok(())
}

pub fn verify_path(inst: &HourglassInstance, path: &HourglassPath) -> bool {
    check_path(inst, path).is_ok()
}

/// Reachable prefix sums per cell, filled row by row; sums above the target
/// are dropped since every value is non-negative.
pub fn solve_dp(inst: &HourglassInstance) -> Option<HourglassPath> {
    let t = inst.target();
    let rows = inst.row_count();
    // reach[r][j] maps a prefix sum ending at (r+1, j+1) to the predecessor position.
    let mut reach: Vec<Vec<HashMap<u64, usize>>> = Vec::with_capacity(rows);
    reach.push(
        inst.rows()[0]
            .iter()
            .map(|&v| {
                let mut m = HashMap::new();
                if v <= t {
                    m.insert(v, 0);
                }
                m
            })
            .collect(),
    );
    for r in 2..=rows {
        let mut row: Vec<HashMap<u64, usize>> = vec![HashMap::new(); inst.width(r)];
        for j in 1..=inst.width(r - 1) {
            let sums: Vec<u64> = {
                let mut s: Vec<u64> = reach[r - 2][j - 1].keys().copied().collect();
                s.sort_unstable();
                s
            };
            for next in succ_unchecked(inst, (r - 1, j)) {
                let v = inst.value(next);
                let cell = &mut row[next.1 - 1];
                for &s in &sums {
                    if let Some(total) = s.checked_add(v).filter(|&x| x <= t) {
                        cell.entry(total).or_insert(j);
                    }
                }
            }
        }
        reach.push(row);
    }
    let last = (1..=inst.width(rows)).find(|&j| reach[rows - 1][j - 1].contains_key(&t))?;
    let mut positions = vec![0; rows];
    let (mut j, mut s) = (last, t);
    for r in (1..=rows).rev() {
        positions[r - 1] = j;
        let pred = reach[r - 1][j - 1][&s];
        s -= inst.value((r, j));
        j = pred;
    }
    Some(HourglassPath::from_positions(&positions))
}

/// Min and max achievable suffix sums from each cell to the last row.
#[derive(Debug, Clone)]
pub struct SuffixBounds {
    pub min: Vec<Vec<u64>>,
    pub max: Vec<Vec<u64>>,
}

pub fn suffix_bounds(inst: &HourglassInstance) -> SuffixBounds {
    let rows = inst.row_count();
    let mut min = vec![Vec::new(); rows];
    let mut max = vec![Vec::new(); rows];
    min[rows - 1] = inst.rows()[rows - 1].clone();
    max[rows - 1] = inst.rows()[rows - 1].clone();
    for r in (1..rows).rev() {
        let w = inst.width(r);
        let mut lo = Vec::with_capacity(w);
        let mut hi = Vec::with_capacity(w);
        for j in 1..=w {
            let v = inst.value((r, j));
            let succ: Vec<Address> = succ_unchecked(inst, (r, j)).collect();
            let smin = succ.iter().map(|c| min[r][c.1 - 1]).min().unwrap_or(0);
            let smax = succ.iter().map(|c| max[r][c.1 - 1]).max().unwrap_or(0);
            lo.push(v.saturating_add(smin));
            hi.push(v.saturating_add(smax));
        }
        min[r - 1] = lo;
        max[r - 1] = hi;
    }
    SuffixBounds { min, max }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DfsStats {
    pub nodes: u64,
    pub full_paths: u64,
}

/// Depth-first search pruned by suffix bounds.
pub fn solve_dfs(inst: &HourglassInstance) -> Option<HourglassPath> {
    solve_dfs_with_stats(inst).0
}

pub fn solve_dfs_with_stats(inst: &HourglassInstance) -> (Option<HourglassPath>, DfsStats) {
    let bounds = suffix_bounds(inst);
    let mut stats = DfsStats::default();
    let mut positions = Vec::with_capacity(inst.row_count());
    for j in 1..=inst.width(1) {
        if dfs(inst, &bounds, (1, j), 0, &mut positions, &mut stats) {
            return (Some(HourglassPath::from_positions(&positions)), stats);
        }
    }
    (None, stats)
}

fn dfs(
    inst: &HourglassInstance,
    bounds: &SuffixBounds,
    cell: Address,
    acc: u64,
    positions: &mut Vec<usize>,
    stats: &mut DfsStats,
) -> bool {
    let t = inst.target();
    let (r, j) = cell;
    let lo = acc.saturating_add(bounds.min[r - 1][j - 1]);
    let hi = acc.saturating_add(bounds.max[r - 1][j - 1]);
    if t < lo || t > hi {
        return false;
    }
    stats.nodes += 1;
    positions.push(j);
    let acc = acc + inst.value(cell);
    if r == inst.row_count() {
        stats.full_paths += 1;
        if acc == t {
            return true;
        }
    } else {
        for next in succ_unchecked(inst, cell) {
            if dfs(inst, bounds, next, acc, positions, stats) {
                return true;
            }
        }
    }
    positions.pop();
    false
}

/// Every diagonal path with its sum, in lexicographic order of positions.
pub fn enumerate_paths_oracle(
    inst: &HourglassInstance,
) -> Result<Vec<(u64, HourglassPath)>, HourglassError> {
    if inst.half_width() > ORACLE_MAX_HALF_WIDTH {
        return Err(HourglassError::OracleTooLarge(inst.half_width()));
    }
    let mut out = Vec::new();
    let mut positions = Vec::new();
    for j in 1..=inst.width(1) {
        walk(inst, (1, j), 0, &mut positions, &mut out);
    }
    Ok(out)
}

fn walk(
    inst: &HourglassInstance,
    cell: Address,
    acc: u64,
    positions: &mut Vec<usize>,
    out: &mut Vec<(u64, HourglassPath)>,
) {
    positions.push(cell.1);
    let acc = acc + inst.value(cell);
    if cell.0 == inst.row_count() {
        out.push((acc, HourglassPath::from_positions(positions)));
    } else {
        for next in succ_unchecked(inst, cell) {
            walk(inst, next, acc, positions, out);
        }
    }
    positions.pop();
}

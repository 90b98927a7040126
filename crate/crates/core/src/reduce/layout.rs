//! Placed gadgets joined by routed nets, the clue grid they paint, and the
//! line-oriented manifest that carries a layout between processes.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::gadgets::{load_template, Entry, GadgetTemplate, Transform};
use crate::knossos::{Cell, KnossosInstance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LayoutError {
    #[error("cell {0:?} painted twice")]
    Conflict(Cell),
    #[error("cells {0:?} and {1:?} of different parts touch")]
    Isolation(Cell, Cell),
    #[error("net {0} is not an induced path")]
    NotInduced(usize),
    #[error("net {0} has odd length without a phase shift")]
    Parity(usize),
    #[error("net {0} does not end on its ports")]
    PortMismatch(usize),
    #[error("port {0} is bound {1} times")]
    Binding(String, usize),
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error("no consistent port states at gadget {gadget} ({template})")]
    NoConsistentState { gadget: usize, template: String },
    #[error("assignment lacks variable {0}")]
    MissingAssignment(usize),
    #[error("walls do not verify against the compiled instance")]
    Rejected,
    #[error("cell {0:?} is covered by no room")]
    Uncovered(Cell),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PortRef {
    pub gadget: usize,
    pub port: String,
}

impl PortRef {
    pub fn new(gadget: usize, port: &str) -> Self {
        Self {
            gadget,
            port: port.to_string(),
        }
    }
}

impl fmt::Display for PortRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.gadget, self.port)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacedGadget {
    pub template: String,
    pub transform: Transform,
    pub offset: Cell,
}

/// A signal from an output port to an input port. `path` runs from the
/// upstream port cell to the downstream one; it is empty when both ports
/// share a cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Net {
    pub from: PortRef,
    pub to: PortRef,
    pub path: Vec<Cell>,
    /// Index where a phase section starts on an odd-length path.
    pub phase: Option<usize>,
}

impl Net {
    pub fn len(&self) -> usize {
        self.path.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.path.is_empty()
    }

    pub fn phase_shifts(&self) -> usize {
        self.phase.is_some() as usize
    }

    /// Clue of every path cell; endpoints are ports and carry none.
    pub fn clues(&self) -> Vec<Option<u32>> {
        net_clues(self.len(), self.phase)
    }
}

/// Clues along a path of `len` steps. Without a phase section every odd
/// index holds a 6; a section at `a` holds 6, 8, 6 at `a+1`, `a+3`, `a+6`
/// and shifts the later 6s to even indices.
pub fn net_clues(len: usize, phase: Option<usize>) -> Vec<Option<u32>> {
    (0..=len)
        .map(|i| {
            if i == 0 || i == len {
                return None;
            }
            let six = match phase {
                None => i % 2 == 1,
                Some(a) if i < a => i % 2 == 1,
                Some(a) => {
                    let d = i - a;
                    if d == 3 {
                        return Some(8);
                    }
                    d == 1 || (d >= 6 && d % 2 == 0)
                }
            };
            six.then_some(6)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayoutMap {
    pub rows: usize,
    pub cols: usize,
    pub num_vars: usize,
    pub gadgets: Vec<PlacedGadget>,
    pub nets: Vec<Net>,
    /// Choice gadgets of each variable, chain order; the first one decides.
    pub choices: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Owner {
    Gadget(usize),
    Net(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Painted {
    pub clue: Option<u32>,
    pub owners: Vec<Owner>,
}

/// Templates of a layout after their transforms, loaded once.
pub fn placed_templates(layout: &LayoutMap) -> Result<Vec<GadgetTemplate>, LayoutError> {
    let mut cache: HashMap<(String, Transform), GadgetTemplate> = HashMap::new();
    layout
        .gadgets
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let key = (g.template.clone(), g.transform);
            if let Some(t) = cache.get(&key) {
                return Ok(t.clone());
            }
            let t = load_template(&g.template)
                .map_err(|e| LayoutError::Manifest {
                    line: i,
                    message: e.to_string(),
                })?
                .transformed(g.transform);
            cache.insert(key, t.clone());
            Ok(t)
        })
        .collect()
}

impl LayoutMap {
    pub fn port_cell(&self, tpls: &[GadgetTemplate], p: &PortRef) -> Option<Cell> {
        let g = &self.gadgets[p.gadget];
        let port = tpls[p.gadget].port(&p.port)?;
        Some((g.offset.0 + port.cell.0, g.offset.1 + port.cell.1))
    }

    /// Every non-square cell with its clue and owners; anything absent is
    /// a square.
    pub fn paint(&self) -> Result<BTreeMap<Cell, Painted>, LayoutError> {
        let tpls = placed_templates(self)?;
        let mut grid: BTreeMap<Cell, Painted> = BTreeMap::new();
        let mut squares: HashMap<Cell, usize> = HashMap::new();
        let mut port_cells: HashMap<Cell, usize> = HashMap::new();
        for (gi, (g, t)) in self.gadgets.iter().zip(&tpls).enumerate() {
            for ((r, c), e) in t.cells() {
                let cell = (g.offset.0 + r, g.offset.1 + c);
                if cell.0 >= self.rows || cell.1 >= self.cols {
                    return Err(LayoutError::Conflict(cell));
                }
                if *e == Entry::Square {
                    if grid.contains_key(&cell) {
                        return Err(LayoutError::Conflict(cell));
                    }
                    squares.insert(cell, gi);
                    continue;
                }
                if squares.contains_key(&cell) {
                    return Err(LayoutError::Conflict(cell));
                }
                let is_port = matches!(e, Entry::Port(_));
                let shared = is_port && port_cells.contains_key(&cell);
                if is_port {
                    port_cells.insert(cell, gi);
                }
                match grid.get_mut(&cell) {
                    Some(p) if shared => p.owners.push(Owner::Gadget(gi)),
                    Some(_) => return Err(LayoutError::Conflict(cell)),
                    None => {
                        grid.insert(
                            cell,
                            Painted {
                                clue: e.clue(),
                                owners: vec![Owner::Gadget(gi)],
                            },
                        );
                    }
                }
            }
        }
        for (ni, net) in self.nets.iter().enumerate() {
            let a = self
                .port_cell(&tpls, &net.from)
                .ok_or(LayoutError::PortMismatch(ni))?;
            let b = self
                .port_cell(&tpls, &net.to)
                .ok_or(LayoutError::PortMismatch(ni))?;
            if net.path.is_empty() {
                if a != b {
                    return Err(LayoutError::PortMismatch(ni));
                }
                continue;
            }
            if net.path.first() != Some(&a) || net.path.last() != Some(&b) {
                return Err(LayoutError::PortMismatch(ni));
            }
            let clues = net.clues();
            let last = net.path.len() - 1;
            for (i, &cell) in net.path.iter().enumerate() {
                if i == 0 || i == last {
                    grid.get_mut(&cell)
                        .ok_or(LayoutError::PortMismatch(ni))?
                        .owners
                        .push(Owner::Net(ni));
                    continue;
                }
                if cell.0 >= self.rows || cell.1 >= self.cols {
                    return Err(LayoutError::Conflict(cell));
                }
                if grid.contains_key(&cell) || squares.contains_key(&cell) {
                    return Err(LayoutError::Conflict(cell));
                }
                grid.insert(
                    cell,
                    Painted {
                        clue: clues[i],
                        owners: vec![Owner::Net(ni)],
                    },
                );
            }
        }
        Ok(grid)
    }

    pub fn instance(&self) -> Result<KnossosInstance, LayoutError> {
        let grid = self.paint()?;
        let mut clues = BTreeMap::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                match grid.get(&(r, c)) {
                    Some(p) => {
                        if let Some(k) = p.clue {
                            clues.insert((r, c), k);
                        }
                    }
                    None => {
                        clues.insert((r, c), 4);
                    }
                }
            }
        }
        Ok(KnossosInstance::new(self.cols, self.rows, clues).expect("positive size"))
    }

    /// Painting, port binding, path shape, isolation and the phase ledger.
    pub fn check(&self) -> Result<(), LayoutError> {
        self.check_geometry()?;
        self.check_bindings()
    }

    /// Every port of every gadget is bound by exactly one net.
    pub fn check_bindings(&self) -> Result<(), LayoutError> {
        let tpls = placed_templates(self)?;
        let mut bound: BTreeMap<PortRef, usize> = BTreeMap::new();
        for net in &self.nets {
            *bound.entry(net.from.clone()).or_default() += 1;
            *bound.entry(net.to.clone()).or_default() += 1;
        }
        for (gi, t) in tpls.iter().enumerate() {
            for p in &t.ports {
                let k = bound.get(&PortRef::new(gi, &p.name)).copied().unwrap_or(0);
                if k != 1 {
                    return Err(LayoutError::Binding(
                        PortRef::new(gi, &p.name).to_string(),
                        k,
                    ));
                }
            }
        }
        Ok(())
    }

    /// Painting, path shape, parity and isolation, ignoring bindings.
    pub fn check_geometry(&self) -> Result<(), LayoutError> {
        let grid = self.paint()?;
        for (ni, net) in self.nets.iter().enumerate() {
            if (net.len() + net.phase_shifts()) % 2 == 1 {
                return Err(LayoutError::Parity(ni));
            }
            if let Some(a) = net.phase {
                if a % 2 == 1 || a + 7 > net.len() {
                    return Err(LayoutError::Parity(ni));
                }
            }
            let index: HashMap<Cell, usize> =
                net.path.iter().enumerate().map(|(i, &c)| (c, i)).collect();
            if index.len() != net.path.len() {
                return Err(LayoutError::NotInduced(ni));
            }
            for (i, &(r, c)) in net.path.iter().enumerate() {
                for nb in [(r + 1, c), (r, c + 1)] {
                    if let Some(&j) = index.get(&nb) {
                        if i.abs_diff(j) != 1 {
                            return Err(LayoutError::NotInduced(ni));
                        }
                    }
                }
                if i > 0 {
                    let (pr, pc) = net.path[i - 1];
                    if pr.abs_diff(r) + pc.abs_diff(c) != 1 {
                        return Err(LayoutError::NotInduced(ni));
                    }
                }
            }
        }
        for (&(r, c), a) in &grid {
            for nb in [(r + 1, c), (r, c + 1)] {
                let Some(b) = grid.get(&nb) else { continue };
                let shared = a.owners.iter().any(|o| b.owners.contains(o));
                if !shared && !(a.clue.is_some() && b.clue.is_some()) {
                    return Err(LayoutError::Isolation((r, c), nb));
                }
            }
        }
        Ok(())
    }

    /// Phase shifts across all nets.
    pub fn phase_shift_count(&self) -> usize {
        self.nets.iter().map(Net::phase_shifts).sum()
    }

    pub fn count_template(&self, name: &str) -> usize {
        self.gadgets.iter().filter(|g| g.template == name).count()
    }

    pub fn render(&self) -> String {
        let mut out = String::from("knossos-layout\n");
        out.push_str(&format!(
            "size {} {}\nvars {}\n",
            self.rows, self.cols, self.num_vars
        ));
        for (i, g) in self.gadgets.iter().enumerate() {
            out.push_str(&format!(
                "gadget {i} {} {} {} {}\n",
                g.template,
                g.transform.render(),
                g.offset.0,
                g.offset.1
            ));
        }
        for (v, chain) in self.choices.iter().enumerate() {
            let ids: Vec<String> = chain.iter().map(usize::to_string).collect();
            out.push_str(&format!("choice {} {}\n", v + 1, ids.join(" ")));
        }
        for (i, n) in self.nets.iter().enumerate() {
            let phase = n.phase.map_or("-".to_string(), |a| a.to_string());
            out.push_str(&format!("net {i} {} {} phase {phase} path", n.from, n.to));
            for (r, c) in &n.path {
                out.push_str(&format!(" {r},{c}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, LayoutError> {
        let err = |line: usize, m: &str| LayoutError::Manifest {
            line,
            message: m.to_string(),
        };
        let mut layout = LayoutMap {
            rows: 0,
            cols: 0,
            num_vars: 0,
            gadgets: Vec::new(),
            nets: Vec::new(),
            choices: Vec::new(),
        };
        let mut seen_header = false;
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let t: Vec<&str> = raw.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|_| err(ln, "malformed number"));
            match t.first().copied() {
                None => continue,
                Some("knossos-layout") => seen_header = true,
                _ if !seen_header => return Err(err(ln, "missing knossos-layout header")),
                Some("size") if t.len() == 3 => {
                    layout.rows = num(t[1])?;
                    layout.cols = num(t[2])?;
                }
                Some("vars") if t.len() == 2 => {
                    layout.num_vars = num(t[1])?;
                    layout.choices = vec![Vec::new(); layout.num_vars];
                }
                Some("gadget") if t.len() == 6 => {
                    if num(t[1])? != layout.gadgets.len() {
                        return Err(err(ln, "gadget ids out of order"));
                    }
                    let transform =
                        Transform::parse(t[3]).ok_or_else(|| err(ln, "bad transform"))?;
                    layout.gadgets.push(PlacedGadget {
                        template: t[2].to_string(),
                        transform,
                        offset: (num(t[4])?, num(t[5])?),
                    });
                }
                Some("choice") if t.len() >= 2 => {
                    let v = num(t[1])?;
                    if v == 0 || v > layout.num_vars {
                        return Err(err(ln, "variable out of range"));
                    }
                    layout.choices[v - 1] =
                        t[2..].iter().map(|s| num(s)).collect::<Result<_, _>>()?;
                }
                Some("net") if t.len() >= 7 && t[4] == "phase" && t[6] == "path" => {
                    if num(t[1])? != layout.nets.len() {
                        return Err(err(ln, "net ids out of order"));
                    }
                    let port = |s: &str| -> Result<PortRef, LayoutError> {
                        let (g, p) = s.split_once('.').ok_or_else(|| err(ln, "bad port"))?;
                        Ok(PortRef::new(num(g)?, p))
                    };
                    let phase = match t[5] {
                        "-" => None,
                        s => Some(num(s)?),
                    };
                    let path = t[7..]
                        .iter()
                        .map(|s| {
                            let (r, c) = s.split_once(',').ok_or_else(|| err(ln, "bad cell"))?;
                            Ok((num(r)?, num(c)?))
                        })
                        .collect::<Result<_, LayoutError>>()?;
                    layout.nets.push(Net {
                        from: port(t[2])?,
                        to: port(t[3])?,
                        path,
                        phase,
                    });
                }
                Some(_) => return Err(err(ln, "unrecognised line")),
            }
        }
        if !seen_header {
            return Err(err(1, "missing knossos-layout header"));
        }
        let n = layout.gadgets.len();
        if layout
            .nets
            .iter()
            .any(|net| net.from.gadget >= n || net.to.gadget >= n)
            || layout.choices.iter().flatten().any(|&g| g >= n)
        {
            return Err(err(0, "gadget reference out of range"));
        }
        Ok(layout)
    }
}

//! CNF to Knossos: choice gadgets in a top band, a staircase fanout onto
//! vertical lanes, a crossbar of crossovers, and per-clause AND chains
//! capped by terminators.

use std::collections::HashMap;

use super::cnf::{cnf_to_circuit, Circuit, CnfFormula, Node};
use super::layout::{LayoutMap, Net, PlacedGadget, PortRef};
use crate::gadgets::{load_template, GadgetTemplate, Side, Transform};
use crate::knossos::{Cell, KnossosInstance};

const CHOICE_TOP: usize = 1;
const CHOICE_LEFT: usize = 6;
const CHOICE_PITCH: usize = 24;
const FANOUT_TOP: usize = 17;
const LANE_PITCH: usize = 12;
const SINK_PITCH: usize = 8;
const GATE_STEP: usize = 11;

/// Negated literals of each clause as `(variable, uses the positive copy)`.
pub fn clause_inputs(c: &Circuit) -> Vec<Vec<(usize, bool)>> {
    if let Node::Const(_) = c.nodes[c.output] {
        return Vec::new();
    }
    let leaf = |n: usize| match c.nodes[n] {
        Node::Input(v) => (v, true),
        Node::Not(a) => match c.nodes[a] {
            Node::Input(v) => (v, false),
            _ => panic!("literal leaf expected"),
        },
        _ => panic!("literal leaf expected"),
    };
    c.and_leaves(c.output)
        .into_iter()
        .map(|clause| match c.nodes[clause] {
            Node::Not(inner) => c.and_leaves(inner).into_iter().map(leaf).collect(),
            Node::Input(v) => vec![(v, false)],
            _ => panic!("clause node expected"),
        })
        .collect()
}

struct Builder {
    gadgets: Vec<PlacedGadget>,
    tpls: Vec<GadgetTemplate>,
    nets: Vec<Net>,
    cache: HashMap<(String, Transform), GadgetTemplate>,
}

impl Builder {
    fn template(&mut self, name: &str, t: Transform) -> GadgetTemplate {
        self.cache
            .entry((name.to_string(), t))
            .or_insert_with(|| {
                load_template(name)
                    .expect("bundled template")
                    .transformed(t)
            })
            .clone()
    }

    fn place(&mut self, name: &str, transform: Transform, offset: Cell) -> usize {
        let tpl = self.template(name, transform);
        self.gadgets.push(PlacedGadget {
            template: name.to_string(),
            transform,
            offset,
        });
        self.tpls.push(tpl);
        self.gadgets.len() - 1
    }

    fn port_cell(&self, g: usize, port: &str) -> Cell {
        let p = self.tpls[g].port(port).expect("known port");
        let o = self.gadgets[g].offset;
        (o.0 + p.cell.0, o.1 + p.cell.1)
    }

    fn side(&self, g: usize, port: &str) -> Side {
        self.tpls[g].port(port).expect("known port").side
    }

    fn layout(&self, num_vars: usize, choices: Vec<Vec<usize>>) -> LayoutMap {
        let mut rows = 0;
        let mut cols = 0;
        for (g, t) in self.gadgets.iter().zip(&self.tpls) {
            rows = rows.max(g.offset.0 + t.rows);
            cols = cols.max(g.offset.1 + t.cols);
        }
        for n in &self.nets {
            for &(r, c) in &n.path {
                rows = rows.max(r + 1);
                cols = cols.max(c + 1);
            }
        }
        LayoutMap {
            rows: rows + 2,
            cols: cols + 2,
            num_vars,
            gadgets: self.gadgets.clone(),
            nets: self.nets.clone(),
            choices,
        }
    }
}

/// Appends straight steps from the last cell of `path` to `to`.
fn walk(path: &mut Vec<Cell>, to: Cell) {
    let &(mut r, mut c) = path.last().expect("non-empty path");
    assert!(r == to.0 || c == to.1, "walk must be straight");
    while (r, c) != to {
        if r < to.0 {
            r += 1;
        } else if r > to.0 {
            r -= 1;
        } else if c < to.1 {
            c += 1;
        } else {
            c -= 1;
        }
        path.push((r, c));
    }
}

fn phase_for(len: usize) -> Option<usize> {
    if len % 2 == 1 {
        assert!(
            len >= 7,
            "odd net of length {len} is too short for a phase shift"
        );
        Some(0)
    } else {
        None
    }
}

#[derive(Debug, Clone)]
struct Sink {
    port: PortRef,
    /// Row of the horizontal run that reaches the sink.
    row: usize,
    /// The run climbs to the port row one column short of the port.
    jog: bool,
}

pub fn compile_sat_to_knossos(f: &CnfFormula) -> (KnossosInstance, LayoutMap) {
    let layout = compile_layout(f);
    let inst = layout.instance().expect("compiled layout paints");
    (inst, layout)
}

pub fn compile_layout(f: &CnfFormula) -> LayoutMap {
    let circuit = cnf_to_circuit(f);
    let clauses = clause_inputs(&circuit);
    let mut b = Builder {
        gadgets: Vec::new(),
        tpls: Vec::new(),
        nets: Vec::new(),
        cache: HashMap::new(),
    };

    // Choice band, chained where a variable needs more than three copies.
    let n = f.num_vars;
    let mut need = vec![(0usize, 0usize); n + 1];
    for &(v, pos) in clauses.iter().flatten() {
        if pos {
            need[v].0 += 1;
        } else {
            need[v].1 += 1;
        }
    }
    let mut choices = Vec::with_capacity(n);
    let mut copies: Vec<(Vec<PortRef>, Vec<PortRef>)> = vec![(Vec::new(), Vec::new()); n + 1];
    let mut slot = 0;
    for v in 1..=n {
        let count = (need[v].0.max(need[v].1) / 2).max(1);
        let mut chain = Vec::new();
        for _ in 0..count {
            let x = CHOICE_LEFT + CHOICE_PITCH * slot;
            slot += 1;
            chain.push(b.place("choice", Transform::IDENTITY, (CHOICE_TOP, x)));
        }
        for w in chain.windows(2) {
            let from = b.port_cell(w[0], "nx1");
            let mut path = vec![from];
            walk(&mut path, b.port_cell(w[1], "x1"));
            b.nets.push(Net {
                from: PortRef::new(w[0], "nx1"),
                to: PortRef::new(w[1], "x1"),
                phase: phase_for(path.len() - 1),
                path,
            });
        }
        let (pos, neg) = &mut copies[v];
        pos.push(PortRef::new(chain[0], "x1"));
        for &g in &chain {
            pos.push(PortRef::new(g, "x2"));
            pos.push(PortRef::new(g, "x3"));
            neg.push(PortRef::new(g, "nx3"));
            neg.push(PortRef::new(g, "nx2"));
        }
        neg.push(PortRef::new(*chain.last().unwrap(), "nx1"));
        pos.reverse();
        neg.reverse();
        choices.push(chain);
    }

    // Sources in clause order.
    let mut sources: Vec<PortRef> = Vec::new();
    for &(v, pos) in clauses.iter().flatten() {
        let list = if pos {
            &mut copies[v].0
        } else {
            &mut copies[v].1
        };
        sources.push(list.pop().expect("chain sized for every copy"));
    }
    let total = sources.len();

    // Stub of each source down to the fanout; lanes ordered by stub column.
    let stubs: Vec<Vec<Cell>> = sources
        .iter()
        .map(|s| {
            let start = b.port_cell(s.gadget, &s.port);
            let mut path = vec![start];
            match b.side(s.gadget, &s.port) {
                Side::Left => walk(&mut path, (start.0, start.1 - 2)),
                Side::Right => walk(&mut path, (start.0, start.1 + 2)),
                _ => {}
            }
            path
        })
        .collect();
    let mut order: Vec<usize> = (0..total).collect();
    order.sort_by_key(|&i| stubs[i].last().unwrap().1);
    let lane_of: HashMap<usize, usize> = order.iter().enumerate().map(|(l, &i)| (i, l)).collect();
    let max_col = stubs.iter().map(|s| s.last().unwrap().1).max().unwrap_or(0);
    let base = max_col + 8;
    let lane_col = |l: usize| base + LANE_PITCH * l;
    let fanout_row = |l: usize| FANOUT_TOP + 2 * (total - 1 - l);

    // Gate region.
    let and_t = Transform::all()
        .find(|&t| {
            let g = load_template("and_gate").unwrap().transformed(t);
            let (x, y, z) = (
                g.port("x").unwrap(),
                g.port("y").unwrap(),
                g.port("z").unwrap(),
            );
            x.side == Side::Left
                && y.side == Side::Left
                && z.side == Side::Right
                && z.cell.0 == x.cell.0
                && y.cell.0 + 1 == x.cell.0
        })
        .expect("and_gate has a left-facing orientation");
    let gate0 = lane_col(total.saturating_sub(1)) + 5 + 12;
    let mut top = FANOUT_TOP + 2 * total.saturating_sub(1) + 13;
    let mut sinks: Vec<Sink> = Vec::with_capacity(total);
    for clause in &clauses {
        let k = clause.len();
        if k == 1 {
            let t = b.place("terminator_false", Transform::IDENTITY, (top, gate0));
            sinks.push(Sink {
                port: PortRef::new(t, "p"),
                row: b.port_cell(t, "p").0,
                jog: false,
            });
        } else {
            let mut prev: Option<usize> = None;
            for m in 1..k {
                let g = b.place(
                    "and_gate",
                    and_t,
                    (top + m - 1, gate0 + GATE_STEP * (m - 1)),
                );
                match prev {
                    None => sinks.push(Sink {
                        port: PortRef::new(g, "y"),
                        row: b.port_cell(g, "y").0,
                        jog: false,
                    }),
                    Some(p) => {
                        let mut path = vec![b.port_cell(p, "z")];
                        walk(&mut path, b.port_cell(g, "y"));
                        b.nets.push(Net {
                            from: PortRef::new(p, "z"),
                            to: PortRef::new(g, "y"),
                            phase: phase_for(path.len() - 1),
                            path,
                        });
                    }
                }
                sinks.push(Sink {
                    port: PortRef::new(g, "x"),
                    row: top + 1 + SINK_PITCH * m,
                    jog: true,
                });
                prev = Some(g);
            }
            let last = prev.unwrap();
            let z = b.port_cell(last, "z");
            let t = b.place("terminator_false", Transform::IDENTITY, (z.0 - 1, z.1));
            b.nets.push(Net {
                from: PortRef::new(last, "z"),
                to: PortRef::new(t, "p"),
                path: Vec::new(),
                phase: None,
            });
        }
        top += SINK_PITCH * k;
    }

    // Crossovers where a run crosses a lane that continues below it.
    let rho: Vec<usize> = (0..total).map(|l| sinks[order[l]].row).collect();
    let mut entries: HashMap<(usize, Cell), (usize, &'static str, Cell, &'static str)> =
        HashMap::new();
    for i in 0..total {
        for j in i + 1..total {
            if rho[i] >= rho[j] {
                continue;
            }
            let (r, c) = (rho[i], lane_col(j));
            let g = b.place("crossover", Transform::IDENTITY, (r - 3, c - 5));
            entries.insert(
                (order[j], b.port_cell(g, "xt")),
                (g, "xt", b.port_cell(g, "xb"), "xb"),
            );
            entries.insert(
                (order[i], b.port_cell(g, "yl")),
                (g, "yl", b.port_cell(g, "yr"), "yr"),
            );
        }
    }

    // Route every source to its sink and cut the route at crossovers.
    for (s, source) in sources.iter().enumerate() {
        let l = lane_of[&s];
        let sink = &sinks[s];
        let mut route = stubs[s].clone();
        let (_, c0) = *route.last().unwrap();
        walk(&mut route, (fanout_row(l), c0));
        walk(&mut route, (fanout_row(l), lane_col(l)));
        walk(&mut route, (sink.row, lane_col(l)));
        let port = b.port_cell(sink.port.gadget, &sink.port.port);
        if sink.jog {
            walk(&mut route, (sink.row, port.1 - 1));
            walk(&mut route, (port.0, port.1 - 1));
        }
        walk(&mut route, port);

        let mut from = source.clone();
        let mut path = vec![route[0]];
        let mut i = 1;
        while i < route.len() {
            let cell = route[i];
            path.push(cell);
            if let Some(&(g, enter, exit, leave)) = entries.get(&(s, cell)) {
                b.nets.push(Net {
                    from: from.clone(),
                    to: PortRef::new(g, enter),
                    phase: phase_for(path.len() - 1),
                    path: std::mem::take(&mut path),
                });
                i = route
                    .iter()
                    .position(|&c| c == exit)
                    .expect("route passes the crossover");
                from = PortRef::new(g, leave);
                path.push(exit);
            }
            i += 1;
        }
        b.nets.push(Net {
            from,
            to: sink.port.clone(),
            phase: phase_for(path.len() - 1),
            path,
        });
    }

    // Cap every unused choice output with a slack.
    let used: std::collections::HashSet<PortRef> = b
        .nets
        .iter()
        .flat_map(|n| [n.from.clone(), n.to.clone()])
        .collect();
    let choice_ports = ["x1", "x2", "x3", "nx1", "nx2", "nx3"];
    let choice_ids: Vec<usize> = choices.iter().flatten().copied().collect();
    for &g in &choice_ids {
        for port in choice_ports {
            let pr = PortRef::new(g, port);
            if used.contains(&pr) {
                continue;
            }
            let cell = b.port_cell(g, port);
            let want = opposite(b.side(g, port));
            let mut placed = false;
            for t in Transform::all() {
                let tpl = b.template("slack", t);
                let sp = tpl.port("x").unwrap();
                if sp.side != want || sp.cell.0 > cell.0 || sp.cell.1 > cell.1 {
                    continue;
                }
                let sg = b.place("slack", t, (cell.0 - sp.cell.0, cell.1 - sp.cell.1));
                b.nets.push(Net {
                    from: pr.clone(),
                    to: PortRef::new(sg, "x"),
                    path: Vec::new(),
                    phase: None,
                });
                if fits(&b.layout(n, choices.clone())) {
                    placed = true;
                    break;
                }
                b.nets.pop();
                b.gadgets.pop();
                b.tpls.pop();
            }
            assert!(
                placed,
                "no slack orientation fits at gadget {g} port {port}"
            );
        }
    }

    let layout = b.layout(n, choices);
    if let Err(e) = layout.check() {
        panic!("compiled layout is invalid: {e}");
    }
    layout
}

fn opposite(s: Side) -> Side {
    match s {
        Side::Top => Side::Bottom,
        Side::Bottom => Side::Top,
        Side::Left => Side::Right,
        Side::Right => Side::Left,
    }
}

fn fits(layout: &LayoutMap) -> bool {
    layout.check_geometry().is_ok()
}

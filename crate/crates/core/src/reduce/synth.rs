//! Wall sets from assignments, and assignments back from wall sets.

use std::collections::HashMap;

use super::layout::{placed_templates, LayoutError, LayoutMap};
use crate::gadgets::{enumerate_gadget_solutions, load_template, PortRelation, PortState};
use crate::knossos::{rooms_from_walls, verify_solution, Cell, WallSet};

/// Relations of every template used by the layout, keyed by name.
pub fn layout_relations(layout: &LayoutMap) -> HashMap<String, PortRelation> {
    let mut out = HashMap::new();
    for g in &layout.gadgets {
        if !out.contains_key(&g.template) {
            let tpl = load_template(&g.template).expect("bundled template");
            out.insert(g.template.clone(), enumerate_gadget_solutions(&tpl));
        }
    }
    out
}

/// Signal of every net under `assignment` (index `v - 1` for variable `v`),
/// and the port state chosen at every gadget.
pub fn propagate(
    layout: &LayoutMap,
    relations: &HashMap<String, PortRelation>,
    assignment: &[bool],
) -> Result<(Vec<bool>, Vec<PortState>), LayoutError> {
    if assignment.len() < layout.num_vars {
        return Err(LayoutError::MissingAssignment(assignment.len() + 1));
    }
    let mut head: HashMap<usize, bool> = HashMap::new();
    for (v, chain) in layout.choices.iter().enumerate() {
        if let Some(&g) = chain.first() {
            head.insert(g, assignment[v]);
        }
    }
    let n = layout.gadgets.len();
    let mut inputs: Vec<Vec<(String, usize)>> = vec![Vec::new(); n];
    let mut outputs: Vec<Vec<(String, usize)>> = vec![Vec::new(); n];
    for (ni, net) in layout.nets.iter().enumerate() {
        outputs[net.from.gadget].push((net.from.port.clone(), ni));
        inputs[net.to.gadget].push((net.to.port.clone(), ni));
    }
    let mut value: Vec<Option<bool>> = vec![None; layout.nets.len()];
    let mut chosen: Vec<Option<PortState>> = vec![None; n];
    let mut progress = true;
    while progress {
        progress = false;
        for g in 0..n {
            if chosen[g].is_some() || inputs[g].iter().any(|(_, ni)| value[*ni].is_none()) {
                continue;
            }
            let name = &layout.gadgets[g].template;
            let state = relations[name]
                .states()
                .into_iter()
                .find(|s| {
                    inputs[g]
                        .iter()
                        .all(|(p, ni)| s.is_absorbed(p) != value[*ni].unwrap())
                        && head.get(&g).is_none_or(|&v| s.is_absorbed("x1") == v)
                })
                .ok_or_else(|| LayoutError::NoConsistentState {
                    gadget: g,
                    template: name.clone(),
                })?;
            for (p, ni) in &outputs[g] {
                value[*ni] = Some(state.is_absorbed(p));
            }
            chosen[g] = Some(state);
            progress = true;
        }
    }
    if let Some(g) = chosen.iter().position(Option::is_none) {
        return Err(LayoutError::NoConsistentState {
            gadget: g,
            template: layout.gadgets[g].template.clone(),
        });
    }
    Ok((
        value.into_iter().map(Option::unwrap).collect(),
        chosen.into_iter().map(Option::unwrap).collect(),
    ))
}

/// Intervals of path indices forming the net's rooms.
fn net_rooms(len: usize, clues: &[Option<u32>], signal: bool) -> Option<Vec<(usize, usize)>> {
    let (mut s, end) = if signal { (1, len) } else { (0, len - 1) };
    let mut out = Vec::new();
    while s <= end {
        let (i, k) = (s..=end).find_map(|i| clues[i].map(|k| (i, k)))?;
        let size = match k {
            6 => 2,
            8 => 3,
            _ => return None,
        };
        let e = s + size - 1;
        if i > e || e > end || (i + 1..=e).any(|j| clues[j].is_some()) {
            return None;
        }
        out.push((s, e));
        s = e + 1;
    }
    Some(out)
}

/// Walls of a solution of the compiled instance when `assignment` satisfies
/// the formula; otherwise the first gadget with no consistent state.
pub fn synthesize_solution(
    layout: &LayoutMap,
    assignment: &[bool],
) -> Result<WallSet, LayoutError> {
    let relations = layout_relations(layout);
    synthesize_with(layout, &relations, assignment)
}

pub fn synthesize_with(
    layout: &LayoutMap,
    relations: &HashMap<String, PortRelation>,
    assignment: &[bool],
) -> Result<WallSet, LayoutError> {
    let (values, states) = propagate(layout, relations, assignment)?;
    let inst = layout.instance()?;
    let (w, h) = (layout.cols, layout.rows);
    let mut room_of = vec![usize::MAX; w * h];
    let mut next = 0;
    let mut claim = |cells: &mut dyn Iterator<Item = Cell>, room_of: &mut Vec<usize>| {
        for (r, c) in cells {
            room_of[r * w + c] = next;
        }
        next += 1;
    };
    for (g, placed) in layout.gadgets.iter().enumerate() {
        let base = load_template(&placed.template).expect("bundled template");
        let witness = relations[&placed.template]
            .witness(&states[g])
            .expect("chosen state has a witness");
        for room in &witness.rooms {
            let mut cells = room.iter().map(|&c| {
                let ((r, c), _, _) = placed.transform.apply(base.rows, base.cols, c);
                (placed.offset.0 + r, placed.offset.1 + c)
            });
            claim(&mut cells, &mut room_of);
        }
    }
    for (ni, net) in layout.nets.iter().enumerate() {
        if net.path.is_empty() {
            continue;
        }
        let clues = net.clues();
        let rooms = net_rooms(net.len(), &clues, values[ni]).ok_or(LayoutError::Parity(ni))?;
        for (s, e) in rooms {
            claim(&mut net.path[s..=e].iter().copied(), &mut room_of);
        }
    }
    for id in room_of.iter_mut().filter(|id| **id == usize::MAX) {
        *id = next;
        next += 1;
    }
    let walls = WallSet::from_partition(w, h, &room_of);
    let report = verify_solution(&inst, &walls).map_err(|_| LayoutError::Rejected)?;
    if !report.accepted() {
        return Err(LayoutError::Rejected);
    }
    Ok(walls)
}

/// Assignment read off a verified solution of the compiled instance: a
/// variable is true iff its deciding choice gadget absorbs `x1`.
pub fn decode_knossos_solution(
    layout: &LayoutMap,
    walls: &WallSet,
) -> Result<Vec<bool>, LayoutError> {
    let inst = layout.instance()?;
    let report = verify_solution(&inst, walls).map_err(|_| LayoutError::Rejected)?;
    if !report.accepted() {
        return Err(LayoutError::Rejected);
    }
    let rooms = rooms_from_walls(&inst, walls).map_err(|_| LayoutError::Rejected)?;
    let tpls = placed_templates(layout)?;
    let mut room_at: HashMap<Cell, usize> = HashMap::new();
    for (i, room) in rooms.iter().enumerate() {
        for &c in &room.cells {
            room_at.insert(c, i);
        }
    }
    let mut out = Vec::with_capacity(layout.num_vars);
    for (v, chain) in layout.choices.iter().enumerate() {
        let &g = chain.first().ok_or(LayoutError::MissingAssignment(v + 1))?;
        let placed = &layout.gadgets[g];
        let t = &tpls[g];
        let port = layout
            .port_cell(&tpls, &super::layout::PortRef::new(g, "x1"))
            .ok_or(LayoutError::PortMismatch(g))?;
        let room = &rooms[room_at[&port]];
        let (r0, c0) = placed.offset;
        let inside = room
            .clue_cell
            .is_some_and(|(r, c)| r >= r0 && r < r0 + t.rows && c >= c0 && c < c0 + t.cols);
        out.push(inside);
    }
    Ok(out)
}

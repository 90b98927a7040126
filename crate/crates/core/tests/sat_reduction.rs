mod common;

use std::collections::HashMap;
use std::time::Duration;

use gridhard::gadgets::{all_templates, enumerate_gadget_solutions, PortRelation};
use gridhard::reduce::*;
use gridhard::{enumerate_solutions, rooms_from_walls, solve, verify_solution, Edge, SolveLimits};

fn cnf(n: usize, clauses: &[&[i32]]) -> CnfFormula {
    CnfFormula::new(n, clauses.iter().map(|c| c.to_vec()).collect()).unwrap()
}

fn relations() -> HashMap<String, PortRelation> {
    all_templates()
        .iter()
        .map(|t| (t.name.clone(), enumerate_gadget_solutions(t)))
        .collect()
}

fn limits() -> SolveLimits {
    SolveLimits {
        max_nodes: u64::MAX,
        timeout: Duration::from_secs(120),
    }
}

#[test]
fn unit_clause_forces_true() {
    let f = cnf(1, &[&[1]]);
    let (inst, layout) = compile_sat_to_knossos(&f);
    layout.check().unwrap();
    let walls = synthesize_solution(&layout, &[true]).unwrap();
    assert!(verify_solution(&inst, &walls).unwrap().accepted());
    assert_eq!(
        decode_knossos_solution(&layout, &walls).unwrap(),
        vec![true]
    );
    match synthesize_solution(&layout, &[false]) {
        Err(LayoutError::NoConsistentState { template, .. }) => {
            assert_eq!(template, "terminator_false")
        }
        other => panic!("expected a terminator failure, got {other:?}"),
    }
}

#[test]
fn unit_clause_has_exactly_one_solution() {
    let f = cnf(1, &[&[1]]);
    let (inst, layout) = compile_sat_to_knossos(&f);
    let all = enumerate_solutions(&inst, limits(), 16);
    assert!(all.complete);
    assert_eq!(all.solutions.len(), 1);
    assert_eq!(
        decode_knossos_solution(&layout, &all.solutions[0]).unwrap(),
        vec![true]
    );
}

#[test]
fn contradictions_compile_to_unsolvable_grids() {
    for f in [cnf(1, &[&[1], &[-1]]), cnf(1, &[&[1], &[-1], &[1, 1]])] {
        let (inst, _) = compile_sat_to_knossos(&f);
        let r = solve(&inst, limits());
        assert_eq!(r.outcome, gridhard::Outcome::Unsolvable);
    }
}

#[test]
fn disjunction_round_trips() {
    let f = cnf(2, &[&[1, 2]]);
    let (inst, layout) = compile_sat_to_knossos(&f);
    for a in common::assignments(2) {
        match synthesize_solution(&layout, &a) {
            Ok(walls) => {
                assert!(f.eval(&a));
                assert!(verify_solution(&inst, &walls).unwrap().accepted());
                assert_eq!(decode_knossos_solution(&layout, &walls).unwrap(), a);
            }
            Err(e) => {
                assert!(!f.eval(&a));
                assert!(matches!(e, LayoutError::NoConsistentState { .. }));
            }
        }
    }
}

#[test]
fn family_round_trips() {
    let rel = relations();
    for f in common::formula_family() {
        let (inst, layout) = compile_sat_to_knossos(&f);
        for a in common::assignments(f.num_vars) {
            let r = synthesize_with(&layout, &rel, &a);
            assert_eq!(r.is_ok(), f.eval(&a), "{}", f.render());
            if let Ok(walls) = r {
                assert!(verify_solution(&inst, &walls).unwrap().accepted());
                assert_eq!(decode_knossos_solution(&layout, &walls).unwrap(), a);
            }
        }
    }
}

#[test]
fn squares_stay_single_rooms() {
    let f = cnf(3, &[&[1, -2, 3], &[-1, 2]]);
    let (inst, layout) = compile_sat_to_knossos(&f);
    let walls = synthesize_solution(&layout, &[true, true, false]).unwrap();
    for room in rooms_from_walls(&inst, &walls).unwrap() {
        if room.clue_cell.is_some_and(|c| inst.clue(c) == Some(4)) {
            assert_eq!(room.cells.len(), 1);
        }
    }
}

#[test]
fn every_solution_decodes_to_a_model() {
    let family = [
        cnf(2, &[&[1, 2]]),
        cnf(2, &[&[1, 2], &[-1, -2]]),
        cnf(2, &[&[-1], &[1, 2]]),
        cnf(3, &[&[1, 2, -3], &[-1, 2], &[3, -2]]),
    ];
    for f in family {
        let (inst, layout) = compile_sat_to_knossos(&f);
        let all = enumerate_solutions(&inst, limits(), 64);
        assert!(all.complete);
        let mut decoded: Vec<Vec<bool>> = all
            .solutions
            .iter()
            .map(|w| decode_knossos_solution(&layout, w).unwrap())
            .collect();
        decoded.sort();
        let mut models = f.satisfying();
        models.sort();
        assert_eq!(decoded, models, "{}", f.render());
    }
}

#[test]
fn tampered_walls_are_rejected() {
    let f = cnf(2, &[&[1, 2]]);
    let (_, layout) = compile_sat_to_knossos(&f);
    let mut walls = synthesize_solution(&layout, &[true, false]).unwrap();
    let net = layout.nets.iter().find(|n| n.len() > 2).unwrap();
    walls.toggle(Edge::between(net.path[1], net.path[2]));
    assert_eq!(
        decode_knossos_solution(&layout, &walls),
        Err(LayoutError::Rejected)
    );
}

#[test]
fn manifest_round_trips() {
    let f = cnf(3, &[&[1, -2, 3], &[-1, 2], &[2, 3]]);
    let layout = compile_layout(&f);
    let text = layout.render();
    assert_eq!(LayoutMap::parse(&text).unwrap(), layout);
    assert!(LayoutMap::parse("size 3 3\n").is_err());
    assert!(LayoutMap::parse(&text.replace("choice 1", "choice 9")).is_err());
}

#[test]
fn compilation_is_deterministic() {
    let f = cnf(3, &[&[1, 2], &[-2, 3], &[-1, -3]]);
    assert_eq!(compile_layout(&f), compile_layout(&f));
}

#[test]
fn phase_ledger_balances_every_net() {
    for f in common::formula_family() {
        let layout = compile_layout(&f);
        for net in &layout.nets {
            assert_eq!((net.len() + net.phase_shifts()) % 2, 0);
        }
    }
}

#[test]
fn wide_fanout_chains_choice_gadgets() {
    let clauses: Vec<Vec<i32>> = (0..8)
        .map(|i| vec![if i % 2 == 0 { 1 } else { -1 }, 2])
        .collect();
    let f = CnfFormula::new(2, clauses).unwrap();
    let layout = compile_layout(&f);
    layout.check().unwrap();
    assert!(layout.choices[0].len() >= 2);
    for a in f.satisfying() {
        let walls = synthesize_solution(&layout, &a).unwrap();
        assert_eq!(decode_knossos_solution(&layout, &walls).unwrap(), a);
    }
}

#[test]
fn area_grows_with_literals_and_crossings() {
    for f in common::formula_family() {
        let layout = compile_layout(&f);
        let literals: usize = f.clauses.iter().map(Vec::len).sum();
        let crossings = layout.count_template("crossover");
        assert!(layout.rows * layout.cols <= 40 * (literals + crossings + 1) * 130);
    }
}

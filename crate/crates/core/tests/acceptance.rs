mod common;

use std::collections::HashMap;
use std::time::{Duration, Instant};

use gridhard::gadgets::{
    all_templates, check_contract, enumerate_by_edges, enumerate_by_placements,
    enumerate_gadget_solutions, expected_states, load_template, verify_witness, PortRelation,
};
use gridhard::knossos::polyomino_perimeter;
use gridhard::reduce::*;
use gridhard::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const SAMPLE_KNO: &str = include_str!("../fixtures/fig1.kno");
const SAMPLE_SOL: &str = include_str!("../fixtures/fig2.sol");
const SAMPLE_HG: &str = include_str!("../fixtures/fig3.hg");
const SAMPLE_BOLD: &str = include_str!("../fixtures/fig3_bold.path");

fn fixture_knossos() -> Outcome {
    let start = Instant::now();
    let inst = parse_instance(SAMPLE_KNO).map_err(|e| e.to_string())?;
    let walls = parse_solution(SAMPLE_SOL).map_err(|e| e.to_string())?;
    ensure!(
        verify_solution(&inst, &walls).unwrap().accepted(),
        "reference solution rejected"
    );
    let elapsed = start.elapsed();
    ensure!(
        elapsed < Duration::from_secs(1),
        "verification took {elapsed:?}"
    );
    let edges = WallSet::interior_edges(inst.width(), inst.height());
    let mut still_valid = 0;
    for &e in &edges {
        let mut w = walls.clone();
        w.toggle(e);
        if verify_solution(&inst, &w).unwrap().accepted() {
            still_valid += 1;
        }
    }
    ensure!(
        still_valid == 0,
        "{still_valid} single-wall mutations still verify"
    );
    Ok(format!(
        "verified in {elapsed:?}; all {} single-wall mutations rejected",
        edges.len()
    ))
}

fn fixture_hourglass() -> Outcome {
    let start = Instant::now();
    let inst = parse_hourglass(SAMPLE_HG).map_err(|e| e.to_string())?;
    let bold = HourglassPath::parse(SAMPLE_BOLD).map_err(|e| e.to_string())?;
    ensure!(inst.target() == 53, "target is {}", inst.target());
    let values: Vec<u64> = bold.cells.iter().map(|&c| inst.value(c)).collect();
    ensure!(
        values == [8, 6, 4, 4, 2, 8, 4, 6, 1, 5, 5],
        "bold path values {values:?}"
    );
    ensure!(verify_path(&inst, &bold), "bold path rejected");
    let dp = solve_dp(&inst).ok_or("dp found no path")?;
    let dfs = solve_dfs(&inst).ok_or("dfs found no path")?;
    ensure!(
        verify_path(&inst, &dp) && verify_path(&inst, &dfs),
        "solver path rejected"
    );
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!(
        "bold path and both solver paths verify in {elapsed:?}"
    ))
}

/// Half planted partitions (sometimes perturbed), half random clue sprinkles.
fn random_knossos(rng: &mut ChaCha8Rng, w: usize, h: usize) -> KnossosInstance {
    let area = w * h;
    let mut clues = std::collections::BTreeMap::new();
    if rng.gen_bool(0.5) {
        let mut parent: Vec<usize> = (0..area).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for _ in 0..rng.gen_range(0..=area) {
            let a = rng.gen_range(0..area);
            let (r, c) = (a / w, a % w);
            let b = if rng.gen_bool(0.5) && c + 1 < w {
                a + 1
            } else if r + 1 < h {
                a + w
            } else {
                continue;
            };
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        let mut rooms: HashMap<usize, Vec<Cell>> = HashMap::new();
        for i in 0..area {
            let root = find(&mut parent, i);
            rooms.entry(root).or_default().push((i / w, i % w));
        }
        let mut rooms: Vec<Vec<Cell>> = rooms.into_values().collect();
        rooms.sort();
        for cells in rooms {
            let cell = cells[rng.gen_range(0..cells.len())];
            clues.insert(cell, polyomino_perimeter(&cells));
        }
        if rng.gen_bool(0.4) {
            let keys: Vec<Cell> = clues.keys().copied().collect();
            let k = keys[rng.gen_range(0..keys.len())];
            match rng.gen_range(0..3) {
                0 => {
                    clues.remove(&k);
                }
                1 => *clues.get_mut(&k).unwrap() += 2,
                _ => {
                    let v = clues[&k];
                    clues.insert(k, v.saturating_sub(2).max(2));
                }
            }
        }
    } else {
        for r in 0..h {
            for c in 0..w {
                if rng.gen_bool(0.45) {
                    clues.insert((r, c), 2 * rng.gen_range(2..=6));
                }
            }
        }
    }
    KnossosInstance::new(w, h, clues).unwrap()
}

fn solver_vs_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let shapes = [(2, 2), (2, 3), (3, 2), (3, 3)];
    let mut solvable = 0;
    let mut mismatches = Vec::new();
    for i in 0..200 {
        let (w, h) = shapes[i % shapes.len()];
        let inst = random_knossos(&mut rng, w, h);
        let fast = solve(&inst, SolveLimits::default());
        let slow = brute_force_oracle(&inst).map_err(|e| e.to_string())?;
        ensure!(
            fast.outcome != gridhard::Outcome::ResourceLimit,
            "solver hit its limit on instance {i}"
        );
        if let Some(walls) = fast.walls() {
            ensure!(
                verify_solution(&inst, walls).unwrap().accepted(),
                "solver walls rejected on {i}"
            );
        }
        if fast.is_solved() != slow.is_solved() {
            mismatches.push(i);
        }
        solvable += slow.is_solved() as usize;
    }
    let elapsed = start.elapsed();
    ensure!(
        mismatches.is_empty(),
        "discrepancies on instances {mismatches:?}"
    );
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!(
        "200 instances ({solvable} solvable), 0 discrepancies, {elapsed:?}"
    ))
}

fn gadget_tables() -> Outcome {
    let mut lines = Vec::new();
    let mut relations: HashMap<String, PortRelation> = HashMap::new();
    for tpl in all_templates() {
        let expected = expected_states(&tpl).ok_or(format!("no contract for {}", tpl.name))?;
        let report = check_contract(&tpl, &expected);
        ensure!(report.passed(), "{report}");
        let rel = enumerate_gadget_solutions(&tpl);
        for ws in rel.solutions.values() {
            for w in ws {
                ensure!(
                    verify_witness(&tpl, w).accepted(),
                    "{} witness fails to verify",
                    tpl.name
                );
            }
        }
        lines.push(format!("{} {}", tpl.name, report.found.len()));
        relations.insert(tpl.name.clone(), rel);
    }
    for name in ["wire", "corner", "phase_shift"] {
        let states = relations[name].states();
        ensure!(states.len() == 2, "{name} has {} states", states.len());
        ensure!(
            states
                .iter()
                .all(|s| s.is_absorbed("x1") != s.is_absorbed("x2")),
            "{name} states are not complementary"
        );
    }
    let choice = relations["choice"].states();
    ensure!(
        choice.iter().all(|s| {
            let pos = ["x1", "x2", "x3"].map(|p| s.is_absorbed(p));
            let neg = ["nx1", "nx2", "nx3"].map(|p| s.is_absorbed(p));
            pos.iter().all(|&a| a == pos[0]) && neg.iter().all(|&a| a == !pos[0])
        }),
        "choice copies are inconsistent"
    );
    let cross = relations["crossover"].states();
    ensure!(
        cross.len() == 4
            && cross.iter().all(|s| {
                s.is_absorbed("xt") != s.is_absorbed("xb")
                    && s.is_absorbed("yl") != s.is_absorbed("yr")
            }),
        "crossover transfers are not independent"
    );
    // Inputs carry TRUE when free, the output when absorbed.
    let and = relations["and_gate"].states();
    let mut seen = std::collections::BTreeSet::new();
    for s in &and {
        let (x, y, z) = (!s.is_absorbed("x"), !s.is_absorbed("y"), s.is_absorbed("z"));
        ensure!(z == (x && y), "and_gate state {s} breaks z = x and y");
        seen.insert((x, y));
    }
    ensure!(
        seen.len() == 4 && and.len() == 4,
        "and_gate is not a function of its inputs"
    );
    let tpl = load_template("crossover").unwrap();
    let by_edges = enumerate_by_edges(&tpl)
        .map_err(|e| e.to_string())?
        .states();
    ensure!(
        by_edges == enumerate_by_placements(&tpl).states(),
        "crossover enumerators disagree"
    );
    Ok(format!("all contracts pass ({})", lines.join(", ")))
}

fn sat_round_trip() -> Outcome {
    let relations: HashMap<String, PortRelation> = all_templates()
        .iter()
        .map(|t| (t.name.clone(), enumerate_gadget_solutions(t)))
        .collect();
    let family = common::formula_family();
    let mut trips = 0;
    for f in &family {
        ensure!(
            f.num_vars <= 3 && f.clauses.len() <= 3,
            "family formula too large"
        );
        let (inst, layout) = compile_sat_to_knossos(f);
        for a in f.satisfying() {
            let walls = synthesize_with(&layout, &relations, &a)
                .map_err(|e| format!("{}: {e}", f.render()))?;
            ensure!(
                verify_solution(&inst, &walls).unwrap().accepted(),
                "synthesized walls rejected"
            );
            let back = decode_knossos_solution(&layout, &walls).map_err(|e| e.to_string())?;
            ensure!(back == a, "decoded {back:?} from {a:?}");
            trips += 1;
        }
    }
    let limits = SolveLimits {
        max_nodes: u64::MAX,
        timeout: Duration::from_secs(120),
    };
    let mut times = Vec::new();
    for clauses in [vec![vec![1], vec![-1]], vec![vec![1], vec![-1], vec![1, 1]]] {
        let f = CnfFormula::new(1, clauses).unwrap();
        let (inst, _) = compile_sat_to_knossos(&f);
        let r = solve(&inst, limits);
        ensure!(
            r.outcome == gridhard::Outcome::Unsolvable,
            "{} not reported unsolvable: {:?}",
            f.render().trim(),
            r.outcome
        );
        times.push(format!("{:?}", r.stats.elapsed));
    }
    Ok(format!(
        "{} formulas, {trips} round trips exact; contradictions unsolvable in {}",
        family.len(),
        times.join(" and ")
    ))
}

fn subset_sum_equivalence() -> Outcome {
    // The n = 6 table, values 11..16 standing for x1..x6.
    let table: [&[u64]; 11] = [
        &[0, 0, 11, 0, 0, 0],
        &[0, 0, 0, 0, 0],
        &[0, 12, 0, 0],
        &[0, 0, 0],
        &[13, 0],
        &[0],
        &[14, 0],
        &[0, 0, 0],
        &[0, 15, 0, 0],
        &[0, 0, 0, 0, 0],
        &[0, 0, 16, 0, 0, 0],
    ];
    let six = SubsetSumInstance::new((11..=16).collect(), 0).unwrap();
    let (inst, _) = subsetsum_to_hourglass(&six);
    let rows: Vec<&[u64]> = inst.rows().iter().map(Vec::as_slice).collect();
    ensure!(rows == table, "n = 6 layout differs: {rows:?}");

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut yes = 0;
    for i in 0..500 {
        let n = rng.gen_range(1..=12usize);
        let values: Vec<u64> = (0..n).map(|_| rng.gen_range(1..1u64 << 20)).collect();
        let total: u64 = values.iter().sum();
        let target = if i % 2 == 0 {
            values.iter().filter(|_| rng.gen_bool(0.5)).sum()
        } else {
            rng.gen_range(0..=total)
        };
        let s = SubsetSumInstance::new(values, target).unwrap();
        let oracle = subset_sum_oracle(&s).map_err(|e| e.to_string())?;
        let (hg, cert) = subsetsum_to_hourglass(&s);
        let path = solve_dp(&hg);
        ensure!(
            oracle.is_some() == path.is_some(),
            "instance {i}: oracle and reduction disagree"
        );
        if let Some(sub) = &oracle {
            ensure!(s.sum_of(sub) == target, "oracle subset misses the target");
        }
        if let Some(p) = path {
            let sub = decode_hourglass_path(&cert, &hg, &p).map_err(|e| e.to_string())?;
            ensure!(
                s.sum_of(&sub) == target,
                "instance {i}: decoded subset sums to {}",
                s.sum_of(&sub)
            );
            yes += 1;
        }
    }
    Ok(format!(
        "n = 6 table matches; 500 instances ({yes} solvable) agree"
    ))
}

fn random_hourglass(rng: &mut ChaCha8Rng) -> HourglassInstance {
    let w = rng.gen_range(1..=6usize);
    let zeros = HourglassInstance::zeros(w, 0);
    let rows: Vec<Vec<u64>> = (1..=zeros.row_count())
        .map(|r| (0..zeros.width(r)).map(|_| rng.gen_range(0..16)).collect())
        .collect();
    let inst = HourglassInstance::new(w, rows, 0).unwrap();
    let target = if rng.gen_bool(0.5) {
        let mut pos = rng.gen_range(1..=inst.width(1));
        let mut sum = inst.value((1, pos));
        for r in 1..inst.row_count() {
            let next = successors(&inst, (r, pos)).unwrap();
            pos = next[rng.gen_range(0..next.len())].1;
            sum += inst.value((r + 1, pos));
        }
        sum
    } else {
        rng.gen_range(0..16 * inst.row_count() as u64)
    };
    inst.with_target(target)
}

fn hourglass_solvers() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut yes = 0;
    for i in 0..1000 {
        let inst = random_hourglass(&mut rng);
        let w = inst.half_width();
        let paths = enumerate_paths_oracle(&inst).map_err(|e| e.to_string())?;
        ensure!(
            paths.len() == 1 << (2 * w - 2),
            "instance {i}: {} paths for W = {w}",
            paths.len()
        );
        let oracle = paths.iter().any(|(s, _)| *s == inst.target());
        let dp = solve_dp(&inst);
        let dfs = solve_dfs(&inst);
        ensure!(
            dp.is_some() == oracle && dfs.is_some() == oracle,
            "instance {i}: dp {} dfs {} oracle {oracle}",
            dp.is_some(),
            dfs.is_some()
        );
        for p in dp.iter().chain(dfs.iter()) {
            ensure!(
                verify_path(&inst, p),
                "instance {i}: returned path rejected"
            );
        }
        yes += oracle as usize;
    }
    Ok(format!(
        "1000 instances ({yes} solvable) agree; path counts are 2^(2W-2)"
    ))
}

fn main() {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check); 7] = [
        ("fixture regression (knossos)", fixture_knossos),
        ("fixture regression (hour-glass)", fixture_hourglass),
        ("solver vs oracle (knossos)", solver_vs_oracle),
        ("gadget truth tables", gadget_tables),
        ("sat reduction round trip", sat_round_trip),
        ("subset-sum reduction equivalence", subset_sum_equivalence),
        ("hour-glass solver equivalence", hourglass_solvers),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                println!("FAIL {} {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

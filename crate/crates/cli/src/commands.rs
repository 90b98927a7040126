use std::path::Path;
use std::time::Duration;

use gridhard::gadgets::{
    check_contract, expected_states, load_template, GadgetTemplate, TEMPLATE_NAMES,
};
use gridhard::hourglass::{path_sum, HourglassPath};
use gridhard::reduce::{
    compile_sat_to_knossos, decode_hourglass_path, decode_knossos_solution, parse_dimacs,
    subsetsum_to_hourglass, synthesize_solution, CnfFormula, LayoutError, LayoutMap,
    SubsetSumCertificate, SubsetSumInstance,
};
use gridhard::{
    brute_force_oracle, check_path, parse_hourglass, parse_instance, parse_solution,
    render_solution, solve, solve_dfs, solve_dp, verify_solution, Outcome, SolveError, SolveLimits,
    SolveResult,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::{read, write, CliError, Report, EXIT_LIMIT, EXIT_OK, EXIT_REJECT};
use crate::{Cmd, DecodeCmd, GadgetCmd, GenerateCmd, HourglassCmd, KnossosCmd, Method, ReduceCmd};

pub fn run(cmd: &Cmd) -> Result<Report, CliError> {
    match cmd {
        Cmd::Knossos(k) => knossos(k),
        Cmd::Hourglass(h) => hourglass(h),
        Cmd::Reduce(r) => reduce(r),
        Cmd::Decode(d) => decode(d),
        Cmd::Gadget(GadgetCmd::Check { template, all }) => gadget_check(template.as_deref(), *all),
        Cmd::Synthesize {
            manifest,
            assign,
            out,
        } => synthesize(manifest, assign, out.as_deref()),
        Cmd::Generate(g) => generate(g),
    }
}

fn load_instance(path: &Path) -> Result<gridhard::KnossosInstance, CliError> {
    parse_instance(&read(path)?).map_err(|e| CliError::input(path, e))
}

fn load_walls(path: &Path) -> Result<gridhard::WallSet, CliError> {
    parse_solution(&read(path)?).map_err(|e| CliError::input(path, e))
}

fn load_layout(path: &Path) -> Result<LayoutMap, CliError> {
    LayoutMap::parse(&read(path)?).map_err(|e| CliError::input(path, e))
}

fn emit(out: Option<&Path>, text: &str, mut report: Report) -> Result<Report, CliError> {
    match out {
        Some(p) => {
            write(p, text)?;
            report = report.say(format!("wrote {}", p.display()));
        }
        None => report = report.say(text.trim_end()),
    }
    Ok(report)
}

fn solve_report(res: &SolveResult, out: Option<&Path>) -> Result<Report, CliError> {
    let nodes = res.stats.nodes;
    let ms = res.stats.elapsed.as_millis();
    match &res.outcome {
        Outcome::Solved(w) => {
            let r = Report::new(EXIT_OK, "solved")
                .field("nodes", nodes)
                .field("elapsed_ms", ms)
                .say(format!("solved ({nodes} nodes, {ms} ms)"));
            emit(out, &render_solution(w), r)
        }
        Outcome::Unsolvable => Ok(Report::new(EXIT_REJECT, "unsolvable")
            .field("nodes", nodes)
            .field("elapsed_ms", ms)
            .say(format!("unsolvable ({nodes} nodes, {ms} ms)"))),
        Outcome::ResourceLimit => Ok(Report::new(EXIT_LIMIT, "limit")
            .field("nodes", nodes)
            .field("elapsed_ms", ms)
            .say(format!("resource limit reached after {nodes} nodes"))),
    }
}

fn knossos(cmd: &KnossosCmd) -> Result<Report, CliError> {
    match cmd {
        KnossosCmd::Verify { instance, solution } => {
            let inst = load_instance(instance)?;
            let walls = load_walls(solution)?;
            let report = match verify_solution(&inst, &walls) {
                Ok(r) => r,
                Err(e) => {
                    return Ok(Report::new(EXIT_REJECT, "rejected")
                        .field("reason", "dimensions")
                        .say(format!("rejected: {e}")))
                }
            };
            if report.accepted() {
                return Ok(Report::new(EXIT_OK, "verified").say("verified"));
            }
            let mut r = Report::new(EXIT_REJECT, "rejected")
                .field("violations", report.violations.len())
                .say(format!("rejected: {} violations", report.violations.len()));
            for v in &report.violations {
                let (row, col) = v.location;
                r = r
                    .field("violation", format!("{} {row} {col}", v.kind))
                    .say(format!("  {} at ({row}, {col})", v.kind));
            }
            Ok(r)
        }
        KnossosCmd::Solve {
            instance,
            max_nodes,
            timeout,
            out,
        } => {
            if !timeout.is_finite() || *timeout < 0.0 {
                return Err(CliError::Usage(
                    "timeout must be a non-negative number".into(),
                ));
            }
            let inst = load_instance(instance)?;
            let limits = SolveLimits {
                max_nodes: *max_nodes,
                timeout: Duration::from_secs_f64(*timeout),
            };
            solve_report(&solve(&inst, limits), out.as_deref())
        }
        KnossosCmd::Oracle { instance } => {
            let inst = load_instance(instance)?;
            match brute_force_oracle(&inst) {
                Ok(res) => solve_report(&res, None),
                Err(SolveError::OracleTooLarge { edges, max }) => {
                    Ok(Report::new(EXIT_LIMIT, "limit")
                        .field("edges", edges)
                        .field("max_edges", max)
                        .say(format!(
                            "grid has {edges} interior edges; the oracle handles at most {max}"
                        )))
                }
            }
        }
    }
}

fn hourglass(cmd: &HourglassCmd) -> Result<Report, CliError> {
    match cmd {
        HourglassCmd::Solve {
            instance,
            method,
            out,
        } => {
            let inst =
                parse_hourglass(&read(instance)?).map_err(|e| CliError::input(instance, e))?;
            let found = match method {
                Method::Dp => solve_dp(&inst),
                Method::Dfs => solve_dfs(&inst),
            };
            match found {
                Some(path) => {
                    let sum = path_sum(&inst, &path).expect("solver paths verify");
                    let values: Vec<String> = path
                        .cells
                        .iter()
                        .map(|&a| inst.value(a).to_string())
                        .collect();
                    let r = Report::new(EXIT_OK, "solved")
                        .field("sum", sum)
                        .field("values", values.join(","))
                        .say(format!("path sums to {sum}: {}", values.join(" ")));
                    emit(out.as_deref(), &path.render(), r)
                }
                None => Ok(Report::new(EXIT_REJECT, "unsolvable")
                    .field("target", inst.target())
                    .say(format!("no path sums to {}", inst.target()))),
            }
        }
        HourglassCmd::Verify { instance, path } => {
            let inst =
                parse_hourglass(&read(instance)?).map_err(|e| CliError::input(instance, e))?;
            let p = HourglassPath::parse(&read(path)?).map_err(|e| CliError::input(path, e))?;
            match check_path(&inst, &p) {
                Ok(()) => Ok(Report::new(EXIT_OK, "verified")
                    .field("sum", inst.target())
                    .say("verified")),
                Err(fault) => Ok(Report::new(EXIT_REJECT, "rejected")
                    .field("reason", &fault)
                    .say(format!("rejected: {fault}"))),
            }
        }
    }
}

fn reduce(cmd: &ReduceCmd) -> Result<Report, CliError> {
    match cmd {
        ReduceCmd::Sat2knossos { cnf, outputs } => {
            let f = parse_dimacs(&read(cnf)?).map_err(|e| CliError::input(cnf, e))?;
            let (inst, layout) = compile_sat_to_knossos(&f);
            write(&outputs.out, &gridhard::render_instance(&inst))?;
            write(&outputs.manifest, &layout.render())?;
            Ok(Report::new(EXIT_OK, "compiled")
                .field("rows", layout.rows)
                .field("cols", layout.cols)
                .field("gadgets", layout.gadgets.len())
                .field("nets", layout.nets.len())
                .field("crossovers", layout.count_template("crossover"))
                .field("phase_shifts", layout.phase_shift_count())
                .say(format!(
                    "compiled {} variables, {} clauses into a {}x{} grid ({} gadgets, {} nets)",
                    f.num_vars,
                    f.clauses.len(),
                    layout.rows,
                    layout.cols,
                    layout.gadgets.len(),
                    layout.nets.len()
                )))
        }
        ReduceCmd::Ss2hg { values, outputs } => {
            let s =
                SubsetSumInstance::parse(&read(values)?).map_err(|e| CliError::input(values, e))?;
            let (inst, cert) = subsetsum_to_hourglass(&s);
            write(&outputs.out, &inst.render())?;
            write(&outputs.manifest, &cert.render())?;
            Ok(Report::new(EXIT_OK, "compiled")
                .field("half_width", inst.half_width())
                .field("rows", inst.row_count())
                .field("padded", cert.padded)
                .say(format!(
                    "compiled {} values into a half-width {} hour-glass{}",
                    s.values.len(),
                    inst.half_width(),
                    if cert.padded { " (padded with 0)" } else { "" }
                )))
        }
    }
}

fn decode(cmd: &DecodeCmd) -> Result<Report, CliError> {
    match cmd {
        DecodeCmd::Knossos { manifest, solution } => {
            let layout = load_layout(manifest)?;
            let walls = load_walls(solution)?;
            match decode_knossos_solution(&layout, &walls) {
                Ok(a) => {
                    let text = render_assignment(&a);
                    Ok(Report::new(EXIT_OK, "decoded")
                        .field("assignment", &text)
                        .say(text))
                }
                Err(LayoutError::Rejected) => Ok(Report::new(EXIT_REJECT, "rejected")
                    .say("rejected: walls do not verify against the compiled instance")),
                Err(e) => Err(CliError::input(manifest, e)),
            }
        }
        DecodeCmd::Hourglass { manifest, solution } => {
            let cert = SubsetSumCertificate::parse(&read(manifest)?)
                .map_err(|e| CliError::input(manifest, e))?;
            let inst = cert.instance().map_err(|e| CliError::input(manifest, e))?;
            let path =
                HourglassPath::parse(&read(solution)?).map_err(|e| CliError::input(solution, e))?;
            match decode_hourglass_path(&cert, &inst, &path) {
                Ok(subset) => {
                    let ids: Vec<String> = subset.iter().map(usize::to_string).collect();
                    Ok(Report::new(EXIT_OK, "decoded")
                        .field("subset", ids.join(","))
                        .say(format!(
                            "subset {{{}}} sums to {}",
                            ids.join(", "),
                            cert.target
                        )))
                }
                Err(e) => Ok(Report::new(EXIT_REJECT, "rejected").say(format!("rejected: {e}"))),
            }
        }
    }
}

fn render_assignment(a: &[bool]) -> String {
    a.iter()
        .enumerate()
        .map(|(i, v)| format!("{}={v}", i + 1))
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_assignment(text: &str, n: usize) -> Result<Vec<bool>, CliError> {
    let mut out = vec![None; n];
    for pair in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (v, b) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("expected var=bool, found {pair:?}")))?;
        let v: usize = v
            .trim()
            .trim_start_matches('x')
            .parse()
            .map_err(|_| CliError::Usage(format!("bad variable {v:?}")))?;
        if v == 0 || v > n {
            return Err(CliError::Usage(format!(
                "variable {v} out of range 1..={n}"
            )));
        }
        out[v - 1] = Some(match b.trim() {
            "true" | "1" | "t" => true,
            "false" | "0" | "f" => false,
            other => return Err(CliError::Usage(format!("bad truth value {other:?}"))),
        });
    }
    out.iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| CliError::Usage(format!("assignment lacks variable {}", i + 1)))
        })
        .collect()
}

fn synthesize(manifest: &Path, assign: &str, out: Option<&Path>) -> Result<Report, CliError> {
    let layout = load_layout(manifest)?;
    let a = parse_assignment(assign, layout.num_vars)?;
    match synthesize_solution(&layout, &a) {
        Ok(walls) => emit(
            out,
            &render_solution(&walls),
            Report::new(EXIT_OK, "synthesized"),
        ),
        Err(LayoutError::NoConsistentState { gadget, template }) => {
            Ok(Report::new(EXIT_REJECT, "inconsistent")
                .field("gadget", gadget)
                .field("template", &template)
                .say(format!(
                    "no consistent port states at gadget {gadget} ({template})"
                )))
        }
        Err(e) => Err(CliError::input(manifest, e)),
    }
}

fn load_gadget(name: &str) -> Result<GadgetTemplate, CliError> {
    if TEMPLATE_NAMES.contains(&name) {
        return load_template(name).map_err(|e| CliError::Usage(e.to_string()));
    }
    let path = Path::new(name);
    if path.exists() {
        return GadgetTemplate::parse(&read(path)?).map_err(|e| CliError::input(path, e));
    }
    Err(CliError::Usage(format!(
        "unknown template {name:?}; expected one of {}",
        TEMPLATE_NAMES.join(", ")
    )))
}

fn gadget_check(name: Option<&str>, all: bool) -> Result<Report, CliError> {
    let tpls: Vec<GadgetTemplate> = if all {
        TEMPLATE_NAMES
            .iter()
            .map(|n| load_gadget(n))
            .collect::<Result<_, _>>()?
    } else {
        vec![load_gadget(name.expect("clap requires a name"))?]
    };
    let mut failed = 0;
    let mut r = Report::new(EXIT_OK, "checked");
    for t in &tpls {
        let Some(expected) = expected_states(t) else {
            return Err(CliError::Usage(format!(
                "no contract for template {:?}",
                t.name
            )));
        };
        let rep = check_contract(t, &expected);
        if !rep.passed() {
            failed += 1;
        }
        r = r
            .field(&t.name, if rep.passed() { "pass" } else { "fail" })
            .say(rep.to_string());
    }
    if failed > 0 {
        r.code = EXIT_REJECT;
        r.fields[0].1 = "failed".into();
    }
    Ok(r)
}

fn generate(cmd: &GenerateCmd) -> Result<Report, CliError> {
    match *cmd {
        GenerateCmd::Cnf {
            vars,
            clauses,
            width,
            seed,
        } => {
            if vars == 0 || width == 0 {
                return Err(CliError::Usage("vars and width must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cs = (0..clauses)
                .map(|_| {
                    let k = rng.gen_range(1..=width);
                    (0..k)
                        .map(|_| {
                            let v = rng.gen_range(1..=vars as i32);
                            if rng.gen_bool(0.5) {
                                v
                            } else {
                                -v
                            }
                        })
                        .collect()
                })
                .collect();
            let f = CnfFormula::new(vars, cs).expect("literals in range");
            let mut r = Report::new(EXIT_OK, "generated").say(f.render().trim_end());
            r.raw = true;
            Ok(r)
        }
        GenerateCmd::Subsetsum { n, max_value, seed } => {
            if max_value == 0 {
                return Err(CliError::Usage("max-value must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let values: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=max_value)).collect();
            let target = values.iter().filter(|_| rng.gen_bool(0.5)).sum();
            let s = SubsetSumInstance::new(values, target)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let mut r = Report::new(EXIT_OK, "generated").say(s.render().trim_end());
            r.raw = true;
            Ok(r)
        }
    }
}

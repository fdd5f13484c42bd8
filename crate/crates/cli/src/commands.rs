use std::io::Read as _;
use std::path::Path;

use serde_json::{json, Value};

use dispersat::clique::{opt_min_clique, opt_sum_clique};
use dispersat::cnf::{
    brute_opt, diameter_via_min_ones, enumerate_solutions, enumerate_solutions_with_limit,
    parse_dimacs, Optimum,
};
use dispersat::dispersion::{
    disperse_weighted_min, gonzalez_min, sum_disperse, weighted_window, DispersionRun,
    ExactOracle, Flavor, PpzMinOracle, PpzSumOracle, SchoningMinOracle, SchoningSumOracle,
};
use dispersat::fwht::{exact_diameter, exact_dispersion};
use dispersat::ppz::OracleConfig;
use dispersat::probe::{median_iterations, probe_speedup, to_csv, ProbeSpec};
use dispersat::schoning::{binommax_argmin, budget_math, growth_base, BudgetPlan, LsVariant};
use dispersat::subset::{
    diverse_max_independent_set, diverse_min, reduce_hitting_set, reduce_independent_set,
    reduce_vertex_cover, Graph, HittingSetSystem, Reduction, SetFamily,
};
use dispersat::{
    Assignment, CnfFormula, DispersionObjective, Error, Result, SolutionCollection,
    WeightConstraint,
};

use crate::report::Report;
use crate::{Cli, Command, DiameterAlgo, DisperseAlgo, LocalSearch, Objective, Problem, Variant};

pub fn run(cli: &Cli, report: &mut Report) -> Result<()> {
    let g = &cli.global;
    let cfg = OracleConfig::seeded(g.seed).with_effort(g.effort);
    cfg.validate()?;
    match &cli.command {
        Command::Diameter { file, algo, ls } => diameter(&read_formula(file)?, *algo, ls, &cfg, report),
        Command::Disperse {
            file,
            objective,
            s,
            algo,
            weight_min,
            weight_max,
            ls,
        } => {
            let f = read_formula(file)?;
            let w = match (weight_min, weight_max) {
                (Some(x), _) => WeightConstraint::AtLeast(*x),
                (_, Some(x)) => WeightConstraint::AtMost(*x),
                _ => WeightConstraint::None,
            };
            w.validate(f.num_vars())?;
            disperse(&f, *objective, *s, *algo, w, ls, &cfg, report)
        }
        Command::DiverseMin {
            file,
            problem,
            s,
            delta,
        } => diverse(&read_text(file)?, *problem, *s, *delta, &cfg, report),
        Command::Reduce { file, problem } => {
            let red = reduction(&read_text(file)?, *problem)?;
            let dimacs = red.formula.to_dimacs();
            report.detail("variables", red.formula.num_vars());
            report.detail("clauses", red.formula.clauses().len());
            report.detail("dimacs", dimacs.clone());
            report.raw = Some(dimacs);
            Ok(())
        }
        Command::EstimateRuntime { c, alpha, delta, n } => {
            estimate(*c, *alpha, *delta, *n, report)
        }
        Command::ProbeSpeedup {
            n,
            k,
            planted,
            separation,
            trials,
            max_iterations,
        } => {
            let spec = ProbeSpec {
                n: *n,
                k: *k,
                planted_counts: planted.clone(),
                min_separation: *separation,
                trials: *trials,
                seed: g.seed,
                max_iterations: *max_iterations,
            };
            probe(&spec, report)
        }
        Command::Enumerate { file, limit } => {
            let f = read_formula(file)?;
            let sols = enumerate_solutions_with_limit(&f, *limit)?;
            report.detail("count", sols.len());
            if sols.is_empty() {
                return Err(Error::Unsat);
            }
            emit_solutions(&f, &sols, report)
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    let io = |e: std::io::Error| Error::Usage(format!("{}: {e}", path.display()));
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(io)
    }
}

fn read_formula(path: &Path) -> Result<CnfFormula> {
    parse_dimacs(&read_text(path)?)
}

/// Final gate: nothing leaves the process unless it satisfies the input formula.
fn emit_solutions(f: &CnfFormula, s: &SolutionCollection, report: &mut Report) -> Result<()> {
    if let Some(z) = s.members().iter().find(|z| !f.satisfies(z)) {
        return Err(Error::Capability(format!("internal error: {z} does not satisfy the formula")));
    }
    report.set_solutions(s);
    Ok(())
}

fn emit_run(f: &CnfFormula, run: &DispersionRun, report: &mut Report) -> Result<()> {
    report.oracle_calls = Some(run.oracle_calls);
    report.detail("rounds", run.rounds);
    report.detail("converged", run.converged);
    emit_solutions(f, &run.solutions, report)
}

fn plan_for(f: &CnfFormula, ls: &LocalSearch) -> Result<BudgetPlan> {
    let k = f.k();
    let variant = match ls.variant {
        Variant::V1 => LsVariant::v1(k),
        Variant::V2 => LsVariant::v2(k)?,
    };
    let delta = ls.delta.unwrap_or_else(|| variant.max_delta().min(0.5));
    BudgetPlan::new(f.num_vars(), variant, delta)
}

fn plan_details(plan: &BudgetPlan, report: &mut Report) {
    report.detail("delta", plan.delta);
    report.detail("radius", plan.radius);
    report.detail("alpha", plan.variant.alpha);
    report.detail("c", plan.variant.c);
}

/// A driver that stops at one member still answers the diameter question (distance 0).
fn pair_or_single(run: Result<DispersionRun>) -> Result<(SolutionCollection, u64)> {
    match run {
        Ok(r) => Ok((r.solutions, r.oracle_calls)),
        Err(Error::Partial {
            built,
            oracle_calls,
            ..
        }) if built.len() == 1 => {
            let z = built.members()[0].clone();
            Ok((SolutionCollection::from_members(vec![z.clone(), z], false)?, oracle_calls))
        }
        Err(e) => Err(e),
    }
}

fn diameter(
    f: &CnfFormula,
    algo: DiameterAlgo,
    ls: &LocalSearch,
    cfg: &OracleConfig,
    report: &mut Report,
) -> Result<()> {
    let pair = |(a, b): (Assignment, Assignment)| SolutionCollection::from_members(vec![a, b], false);
    let sols = match algo {
        DiameterAlgo::Fwht => pair(exact_diameter(f)?)?,
        DiameterAlgo::MinOnes => pair(diameter_via_min_ones(f)?)?,
        DiameterAlgo::Brute => {
            match brute_opt(f, 2, DispersionObjective::MinPd, WeightConstraint::None) {
                Ok(o) => o.witness,
                Err(Error::Infeasible(_)) => {
                    let z = enumerate_solutions(f)?.members()[0].clone();
                    pair((z.clone(), z))?
                }
                Err(e) => return Err(e),
            }
        }
        DiameterAlgo::Ppz => {
            let mut o = PpzMinOracle::new(f, *cfg);
            let (s, calls) = pair_or_single(gonzalez_min(f, 2, &mut o))?;
            report.oracle_calls = Some(calls);
            s
        }
        DiameterAlgo::Schoening => {
            let plan = plan_for(f, ls)?;
            plan_details(&plan, report);
            let mut o = SchoningMinOracle::new(f, plan, *cfg, 0);
            let (s, calls) = pair_or_single(gonzalez_min(f, 2, &mut o))?;
            report.oracle_calls = Some(calls);
            s
        }
    };
    let m = sols.members();
    report.detail("distance", m[0].distance(&m[1]));
    emit_solutions(f, &sols, report)
}

fn objective_of(o: Objective) -> DispersionObjective {
    match o {
        Objective::Min => DispersionObjective::MinPd,
        Objective::Sum => DispersionObjective::SumPd,
        Objective::SumDistinct => DispersionObjective::SumPdDistinct,
    }
}

fn no_weights(w: WeightConstraint, algo: &str) -> Result<()> {
    match w {
        WeightConstraint::None => Ok(()),
        _ => Err(Error::Usage(format!("--algo {algo} does not take a weight constraint"))),
    }
}

fn emit_optimum(f: &CnfFormula, o: &Optimum, report: &mut Report) -> Result<()> {
    report.detail("optimum", o.value);
    emit_solutions(f, &o.witness, report)
}

#[allow(clippy::too_many_arguments)]
fn disperse(
    f: &CnfFormula,
    objective: Objective,
    s: usize,
    algo: DisperseAlgo,
    w: WeightConstraint,
    ls: &LocalSearch,
    cfg: &OracleConfig,
    report: &mut Report,
) -> Result<()> {
    if s == 0 {
        return Err(Error::Usage("--s must be at least 1".into()));
    }
    let obj = objective_of(objective);
    let distinct = objective == Objective::SumDistinct;
    match algo {
        DisperseAlgo::Brute => {
            let o = brute_opt(f, s, obj, w)?;
            check_weights(f, &o.witness, w)?;
            emit_optimum(f, &o, report)
        }
        DisperseAlgo::Fwht => {
            no_weights(w, "fwht")?;
            emit_optimum(f, &exact_dispersion(f, s, obj)?, report)
        }
        DisperseAlgo::Clique => {
            let all = enumerate_solutions(f)?;
            if all.is_empty() {
                return Err(Error::Unsat);
            }
            let pts = all.members().iter().filter(|z| w.admits(z)).cloned().collect();
            let x = SolutionCollection::from_members(pts, true)?;
            let o = match objective {
                Objective::Min => opt_min_clique(&x, s)?,
                _ => opt_sum_clique(&x, s, distinct)?,
            };
            check_weights(f, &o.witness, w)?;
            emit_optimum(f, &o, report)
        }
        DisperseAlgo::Exact => {
            no_weights(w, "exact")?;
            let run = match objective {
                Objective::Min => gonzalez_min(f, s, &mut ExactOracle::new(f, Flavor::Min)?)?,
                _ => {
                    let mut o = ExactOracle::new(f, Flavor::Sum)?;
                    if distinct {
                        o = o.excluding();
                    }
                    sum_disperse(f, s, &mut o)?
                }
            };
            emit_run(f, &run, report)
        }
        DisperseAlgo::Ppz => {
            no_weights(w, "ppz")?;
            let run = match objective {
                Objective::Min => gonzalez_min(f, s, &mut PpzMinOracle::new(f, *cfg))?,
                _ => sum_disperse(f, s, &mut PpzSumOracle::new(f, *cfg, distinct))?,
            };
            emit_run(f, &run, report)
        }
        DisperseAlgo::Schoening => {
            let plan = plan_for(f, ls)?;
            plan_details(&plan, report);
            let run = match objective {
                Objective::Min => {
                    let (lo, hi) = weighted_window(f.num_vars(), w, plan.delta);
                    report.detail("weight_window", json!([lo, hi]));
                    disperse_weighted_min(f, s, w, &plan, cfg)?
                }
                _ => {
                    no_weights(w, "schoening with a sum objective")?;
                    sum_disperse(f, s, &mut SchoningSumOracle::new(f, plan, *cfg, distinct))?
                }
            };
            emit_run(f, &run, report)
        }
    }
}

fn check_weights(f: &CnfFormula, s: &SolutionCollection, w: WeightConstraint) -> Result<()> {
    match s.members().iter().find(|z| !w.admits(z)) {
        Some(z) => Err(Error::Capability(format!(
            "internal error: {z} violates the weight constraint on {} variables",
            f.num_vars()
        ))),
        None => Ok(()),
    }
}

fn reduction(text: &str, problem: Problem) -> Result<Reduction> {
    match problem {
        Problem::Vc => reduce_vertex_cover(&Graph::parse(text)?),
        Problem::Is => reduce_independent_set(&Graph::parse(text)?),
        Problem::Hs => reduce_hitting_set(&SetFamily::parse(text)?),
    }
}

fn diverse(
    text: &str,
    problem: Problem,
    s: usize,
    delta: f64,
    cfg: &OracleConfig,
    report: &mut Report,
) -> Result<()> {
    let red = reduction(text, problem)?;
    let run = match problem {
        Problem::Vc => diverse_min(&HittingSetSystem::vertex_cover(&Graph::parse(text)?), s, delta, cfg)?,
        Problem::Is => diverse_max_independent_set(&Graph::parse(text)?, s, delta, cfg)?,
        Problem::Hs => diverse_min(&HittingSetSystem::new(SetFamily::parse(text)?), s, delta, cfg)?,
    };
    let sets: Vec<Value> = run
        .solutions
        .members()
        .iter()
        .map(|z| json!(red.back_map(z).iter().map(|i| i + 1).collect::<Vec<_>>()))
        .collect();
    report.detail("sets", sets);
    report.detail("delta", delta);
    report.oracle_calls = Some(run.oracle_calls);
    emit_solutions(&red.formula, &run.solutions, report)
}

fn estimate(c: f64, alpha: f64, delta: f64, n: Option<usize>, report: &mut Report) -> Result<()> {
    let variant = LsVariant::custom(alpha, c)?;
    // validates δ against the variant
    BudgetPlan::new(n.unwrap_or(1), variant, delta)?;
    report.detail("base", growth_base(alpha, c, delta));
    report.detail("c", c);
    report.detail("alpha", alpha);
    report.detail("delta", delta);
    if let Some(n) = n {
        let b = budget_math(n, variant, delta)?;
        report.detail("n", n);
        report.detail("radius", b.radius);
        report.detail("log2_tau", b.log2_tau);
        report.detail("binommax_t", binommax_argmin(n, c));
    }
    Ok(())
}

fn probe(spec: &ProbeSpec, report: &mut Report) -> Result<()> {
    let recs = probe_speedup(spec)?;
    let rows: Vec<Value> = recs
        .iter()
        .map(|r| {
            json!({
                "trial": r.trial,
                "algo": r.algo,
                "iterations": r.iterations,
                "planted_count": r.planted_count,
                "min_separation": r.min_separation,
            })
        })
        .collect();
    let mut medians = serde_json::Map::new();
    for algo in ["ppz", "schoning"] {
        for &count in &spec.planted_counts {
            if let Some(m) = median_iterations(&recs, algo, count) {
                medians.insert(format!("{algo}/{count}"), json!(m));
            }
        }
    }
    report.iterations = Some(recs.iter().map(|r| r.iterations).sum());
    report.detail("records", rows);
    report.detail("medians", Value::Object(medians));
    report.raw = Some(to_csv(&recs));
    Ok(())
}

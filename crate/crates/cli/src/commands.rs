use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use hypersteiner::algos::ratio_greedy::ratio_greedy_constant;
use hypersteiner::algos::{loss_contracting, one_pass_reduced, ratio_greedy};
use hypersteiner::hyper::{dump_line, loss};
use hypersteiner::lp::dump::dump_lp;
use hypersteiner::lp::{Caps, LpKind, Prepared};
use hypersteiner::oracle::{gap_report, random_instance, GapReport};
use hypersteiner::ring::{fraction_string, rational};
use hypersteiner::verify::{verify_instance, VerifyOptions, VerifyReport};
use hypersteiner::{CostFunction, Error, Instance, Surd};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{usage, Algorithm, GapArgs, GenArgs, HeuristicArgs, SolveArgs, VerifyArgs};
use crate::corpus::{self, instance_path, Entry};

/// Whether every asserted invariant held.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Clean,
    Violated,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            }
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn single(input: &Path) -> Result<Entry> {
    let (mut entries, is_corpus) = corpus::load(input)?;
    if is_corpus {
        return Err(usage(format!("{} is a directory; this command takes one instance file", input.display())).into());
    }
    Ok(entries.remove(0))
}

fn edge_pairs(inst: &Instance, edges: &[usize]) -> Vec<[usize; 2]> {
    edges.iter().map(|&e| [inst.edge(e).u, inst.edge(e).v]).collect()
}

pub fn solve(args: &SolveArgs) -> Result<Outcome> {
    let caps = args.caps.caps()?;
    let entry = single(&args.input)?;
    let prep = Prepared::new(&entry.instance)?;
    let mut relaxations = serde_json::Map::new();
    for &kind in &args.lp.0 {
        let solved = prep.solve(kind, &caps)?;
        let support: Vec<Value> = solved
            .solution
            .support()
            .into_iter()
            .map(|j| json!({ "column": solved.lp.columns[j].to_string(), "value": fraction_string(&solved.solution.primal[j]) }))
            .collect();
        let mut record = json!({
            "objective": fraction_string(&solved.solution.objective),
            "rows": solved.lp.num_rows(),
            "columns": solved.lp.num_columns(),
            "pivots": solved.solution.pivots,
            "support": support,
        });
        if let Some(dir) = &args.dump_lp {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            let dump = dump_lp(&solved.lp);
            let path = dir.join(format!("{}.lp", kind.name()));
            fs::write(&path, &dump.text).with_context(|| format!("cannot write {}", path.display()))?;
            record["lossy_dump"] = Value::from(dump.lossy);
        }
        relaxations.insert(kind.name().to_string(), record);
    }
    let mut report = json!({
        "id": entry.id,
        "class": entry.instance.classify().name(),
        "vertices": entry.instance.num_vertices(),
        "terminals": entry.instance.num_terminals(),
        "full_components": prep.components.len(),
        "relaxations": relaxations,
    });
    if args.components {
        let cost = CostFunction::original(&prep.closure);
        let lines: Vec<String> =
            prep.components.iter().map(|fc| dump_line(&prep.closure, fc, &loss(&prep.closure, &cost, fc))).collect();
        report["component_dump"] = json!(lines);
    }
    emit(args.out.as_deref(), &pretty(&report))?;
    Ok(Outcome::Clean)
}

fn verify_row(r: &VerifyReport) -> Vec<String> {
    let mut row = vec![r.id.clone(), r.class.name().to_string(), r.num_vertices.to_string(), r.num_terminals.to_string()];
    for kind in LpKind::ALL {
        row.push(r.optima.get(&kind).map(fraction_string).unwrap_or_default());
    }
    row.push(fraction_string(&r.opt_integral));
    row.push(r.gap_b().map(|g| fraction_string(&g)).unwrap_or_default());
    row.push(r.passed().to_string());
    row.push(r.failures().map(|c| c.name).collect::<Vec<_>>().join(" "));
    row
}

pub fn verify(args: &VerifyArgs) -> Result<Outcome> {
    let mut options = VerifyOptions {
        caps: args.caps.caps()?,
        root_sweep: args.root_sweep,
        region_samples: args.samples,
        ..VerifyOptions::default()
    };
    if let Some(order) = args.scan_order {
        options.scan_orders = vec![order.with_seed(args.seed)];
    }
    let (entries, is_corpus) = corpus::load(&args.input)?;
    let reports = entries
        .par_iter()
        .map(|e| verify_instance(&e.id, &e.instance, &options).with_context(|| e.id.clone()))
        .collect::<Result<Vec<_>>>()?;
    let body = if is_corpus {
        Value::Array(reports.iter().map(VerifyReport::to_json).collect())
    } else {
        reports[0].to_json()
    };
    emit(args.out.as_deref(), &pretty(&body))?;
    if let Some(path) = &args.csv {
        let header = ["id", "class", "vertices", "terminals", "P", "P2", "S", "D", "B", "opt", "gap_B", "passed", "failed"];
        write_csv(path, &header, &reports.iter().map(verify_row).collect::<Vec<_>>())?;
    }
    let mut outcome = Outcome::Clean;
    for r in &reports {
        for c in r.failures() {
            eprintln!("{}: {} failed: {}", r.id, c.name, c.detail);
            outcome = Outcome::Violated;
        }
    }
    Ok(outcome)
}

/// `OPT(P)` when the partition LP fits the caps.
fn partition_optimum(inst: &Instance, caps: &Caps) -> Result<Option<Surd>> {
    match Prepared::new(inst)?.solve(LpKind::Partition, caps) {
        Ok(s) => Ok(Some(Surd::from(s.solution.objective))),
        Err(Error::CapExceeded { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn heuristic(args: &HeuristicArgs) -> Result<Outcome> {
    let caps = args.caps.caps()?;
    let entry = single(&args.input)?;
    let inst = &entry.instance;
    let order = args.scan_order.with_seed(args.seed);
    let opt_p = partition_optimum(inst, &caps)?;
    let mut text = String::new();
    let (cost, factor, mut summary) = match args.alg {
        Algorithm::RatioGreedy => {
            let out = ratio_greedy(inst)?;
            for (i, (fc, theta)) in out.chosen.iter().zip(&out.theta).enumerate() {
                let record = json!({
                    "iteration": i + 1,
                    "component": inst.terminal_mask_vertices(fc.terminals),
                    "cost": fc.cost.to_string(),
                    "theta": fraction_string(theta),
                });
                text.push_str(&serde_json::to_string(&record).expect("serializable"));
                text.push('\n');
            }
            let (constant, _) = ratio_greedy_constant(inst.num_terminals());
            let summary = json!({
                "algorithm": "ratio-greedy",
                "edges": edge_pairs(inst, &out.edges()),
                "dual_objective": out.dual.objective().to_string(),
                "theta_nondecreasing": out.theta_nondecreasing(),
            });
            let factor = Surd::from(if constant < rational(73, 60) { constant } else { rational(73, 60) });
            (Surd::from(out.cost), Some(factor), summary)
        }
        Algorithm::OnePass => {
            let closure = inst.metric_closure()?;
            let out = one_pass_reduced(&closure, order)?;
            text.push_str(&out.trace.to_json_lines());
            let sqrt2 = Surd::sqrt(2);
            let summary = json!({
                "algorithm": "one-pass",
                "fired": out.fired.len(),
                "edges": edge_pairs(&closure, &out.edges),
                "final_tree_reduced": out.final_tree_reduced.to_string(),
                "dual_objective": out.dual.objective().to_string(),
            });
            (out.cost, Some(&(&sqrt2 + &sqrt2) - &Surd::one()), summary)
        }
        Algorithm::LossContract => {
            let closure = inst.metric_closure()?;
            let out = loss_contracting(&closure, &args.alpha, order)?;
            text.push_str(&out.trace.to_json_lines());
            let losses: Vec<String> = out.losses.iter().map(Surd::to_string).collect();
            let summary = json!({
                "algorithm": "loss-contract",
                "alpha": args.alpha.to_string(),
                "fired": out.fired.len(),
                "losses": losses,
                "edges": edge_pairs(&closure, &out.edges),
                "final_tree": out.final_tree.cost.to_string(),
            });
            let factor = (args.alpha == Surd::sqrt(3)).then(|| Surd::sqrt(3));
            (out.cost, factor, summary)
        }
    };
    let bound = factor.zip(opt_p.as_ref()).map(|(f, p)| &f * p);
    let within = bound.as_ref().map_or(true, |b| cost <= *b);
    summary["cost"] = Value::from(cost.to_string());
    summary["opt_P"] = opt_p.map_or(Value::Null, |p| Value::from(p.to_string()));
    summary["bound"] = bound.map_or(Value::Null, |b| Value::from(b.to_string()));
    summary["within_bound"] = Value::from(within);
    text.push_str(&serde_json::to_string(&json!({ "summary": summary })).expect("serializable"));
    text.push('\n');
    emit(args.out.as_deref(), &text)?;
    if within {
        Ok(Outcome::Clean)
    } else {
        eprintln!("{}: cost {cost} exceeds the bound; certificate: {summary}", entry.id);
        Ok(Outcome::Violated)
    }
}

pub fn gen(args: &GenArgs) -> Result<Outcome> {
    let jobs: Vec<_> = args
        .class
        .classes()
        .into_iter()
        .flat_map(|class| (0..args.count).map(move |i| (class, args.seed + i)))
        .collect();
    let instances = jobs
        .par_iter()
        .map(|&(class, seed)| random_instance(seed, args.vertices, args.terminals, 1..=args.cost_max, class))
        .collect::<Result<Vec<_>, Error>>()?;
    for (&(class, seed), inst) in jobs.iter().zip(&instances) {
        let path = instance_path(&args.out, class, seed);
        fs::create_dir_all(path.parent().expect("class directory"))
            .with_context(|| format!("cannot create {}", args.out.display()))?;
        fs::write(&path, inst.to_text()).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(Outcome::Clean)
}

fn gap_row(r: &GapReport) -> Vec<String> {
    let mut row = vec![r.id.clone(), r.class.name().to_string(), r.num_vertices.to_string(), r.num_terminals.to_string()];
    row.push(fraction_string(&r.opt_integral));
    for kind in LpKind::ALL {
        row.push(r.optimum(kind).map(fraction_string).unwrap_or_default());
    }
    row.push(fraction_string(&r.gap_p));
    row.push(r.gap_b.as_ref().map(fraction_string).unwrap_or_default());
    row.push(r.one_pass.to_string());
    row.push(r.loss_contracting.to_string());
    row.push(r.ratio_greedy.as_ref().map(fraction_string).unwrap_or_default());
    row
}

pub fn gap(args: &GapArgs) -> Result<Outcome> {
    let caps = args.caps.caps()?;
    let (entries, is_corpus) = corpus::load(&args.input)?;
    let reports = entries
        .par_iter()
        .map(|e| gap_report(&e.id, &e.instance, &caps).with_context(|| e.id.clone()))
        .collect::<Result<Vec<_>>>()?;
    let body = if is_corpus {
        Value::Array(reports.iter().map(GapReport::to_json).collect())
    } else {
        reports[0].to_json()
    };
    emit(args.out.as_deref(), &pretty(&body))?;
    if let Some(path) = &args.csv {
        let header = [
            "id", "class", "vertices", "terminals", "opt", "P", "P2", "S", "D", "B", "gap_P", "gap_B", "one_pass",
            "loss_contracting", "ratio_greedy",
        ];
        write_csv(path, &header, &reports.iter().map(gap_row).collect::<Vec<_>>())?;
    }
    Ok(Outcome::Clean)
}

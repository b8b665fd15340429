use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use octic::arrangement::{catalog, find_kummer_splits, lookup, singularity_inventory, PlaneArrangement, Q};
use octic::counting::{count_projective_cover, OcticForm};
use octic::fibration::{align_tables, reference_tables};
use octic::modforms::{coefficients, cross_validate, load_cache, registry, save_cache, NewformRef};
use octic::verify::{
    format_rows, verify_involution, verify_kummer_family, verify_modularity, CorrectionMode, ModularityReport,
    ReportFormat, VerifyOptions,
};

#[derive(Parser)]
#[command(name = "octic", version, about = "Point counts and modularity checks for double octic Calabi-Yau threefolds")]
struct Cli {
    /// Directory holding the coefficient cache (coefficients.json).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Worker threads for point counting.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List catalog arrangements and registered newforms.
    Catalog,
    /// Singularities of the branch arrangement.
    Inventory { id: String },
    /// Points of the singular double cover over F_p.
    Count {
        id: String,
        #[arg(long)]
        p: u64,
    },
    /// Traces of Frobenius on H³ compared with the predicted newform combination.
    Trace {
        id: String,
        #[arg(long, default_value_t = 97)]
        pmax: u64,
        #[arg(long, default_value = "derived")]
        correction: CorrectionMode,
        /// Primes for the calibrated fit (comma separated).
        #[arg(long, value_delimiter = ',')]
        fit_primes: Option<Vec<u64>>,
    },
    /// Twisted fixed-point counts for the arrangement's involution.
    Twisted {
        id: String,
        #[arg(long, default_value_t = 97)]
        pmax: u64,
    },
    /// Kummer splits and their fiber tables.
    Fibers { id: String },
    /// Coefficients of a newform, e.g. 32k4A1.
    Forms {
        label: String,
        #[arg(long, default_value_t = 97)]
        pmax: u64,
    },
    /// Modularity rows for one arrangement or the whole catalog.
    Verify {
        /// Catalog id or `all`.
        target: String,
        #[arg(long, default_value_t = 97)]
        pmax: u64,
        #[arg(long, default_value = "table")]
        format: ReportFormat,
        #[arg(long, default_value = "derived")]
        correction: CorrectionMode,
    },
    /// The D(λ, μ) family.
    Kummer {
        #[arg(long, allow_hyphen_values = true)]
        lambda: Q,
        #[arg(long, allow_hyphen_values = true)]
        mu: Q,
        #[arg(long, default_value_t = 97)]
        pmax: u64,
        #[arg(long)]
        json: bool,
    },
}

type Outcome = Result<bool, Box<dyn std::error::Error>>;

fn arrangement(id: &str) -> Result<PlaneArrangement, String> {
    lookup(id).ok_or_else(|| format!("unknown catalog id `{id}`"))
}

fn cmd_catalog() -> Outcome {
    println!("{:<6} {:>4} {:>4}  {:<10} {:<8}  equation", "id", "h11", "h12", "wt4", "wt2");
    let show = |f: &Option<NewformRef>| f.as_ref().map_or("-".to_string(), |f| f.to_string());
    for a in catalog() {
        let h = |x: Option<u32>| x.map_or("-".to_string(), |v| v.to_string());
        let wt2 = match a.wt2_multiplicity {
            1 => show(&a.wt2_form),
            m => format!("{m}x{}", show(&a.wt2_form)),
        };
        println!("{:<6} {:>4} {:>4}  {:<10} {:<8}  {}", a.id, h(a.h11), h(a.h12), show(&a.wt4_form), wt2, a.equation());
    }
    println!();
    println!("newforms:");
    for e in registry() {
        let srcs: Vec<String> = e.sources.iter().map(|s| s.to_string()).collect();
        println!("  {:<12} {}", e.form.to_string(), srcs.join("; "));
    }
    Ok(true)
}

fn cmd_inventory(id: &str) -> Outcome {
    let arr = arrangement(id)?;
    let inv = singularity_inventory(&arr);
    println!("{}", arr.equation());
    println!("{}", serde_json::to_string_pretty(&inv.counts())?);
    let show = |name: &str, pts: &[octic::arrangement::MultiplePoint]| {
        for m in pts {
            println!("{name} {:?} planes {:?} triple lines {}", m.point, m.planes, m.triple_lines);
        }
    };
    for l in &inv.triple_lines {
        println!("triple line planes {l:?}");
    }
    show("fivefold", &inv.fivefold_points);
    show("fourfold", &inv.fourfold_points);
    Ok(inv.higher_lines.is_empty() && inv.higher_points.is_empty())
}

fn cmd_count(id: &str, p: u64) -> Outcome {
    let arr = arrangement(id)?;
    let c = count_projective_cover(&OcticForm::from_arrangement(&arr, p)?)?;
    println!("p = {p}: #Y(F_p) = {}, branch points = {}", c.n_total, c.n_branch);
    Ok(true)
}

fn print_modularity(rep: &ModularityReport, format: ReportFormat) {
    if format == ReportFormat::Table {
        let c = &rep.correction;
        println!("{}: tr = {}  (H2 trace {})", rep.arrangement, rep.formula, rep.h2_rule);
        println!("  correction = {}p^2 + {}p + {}, {} twist classes {:?}", c.alpha, c.beta, c.gamma, c.mode, c.twists);
        if !c.fit_primes.is_empty() {
            println!("  fit primes (not checked): {:?}", c.fit_primes);
        }
    } else if !rep.correction.fit_primes.is_empty() {
        eprintln!("{}: fit primes (not checked): {:?}", rep.arrangement, rep.correction.fit_primes);
    }
    if let Some(alt) = &rep.alternative {
        eprintln!("  {}: {}", rep.arrangement, alt.resolution);
    }
    if let Some(n) = &rep.note {
        eprintln!("  {}: {n}", rep.arrangement);
    }
}

fn cmd_verify(target: &str, pmax: u64, format: ReportFormat, mode: CorrectionMode, fit: Option<Vec<u64>>) -> Outcome {
    let arrs: Vec<PlaneArrangement> = if target == "all" {
        catalog().iter().filter(|a| a.wt4_form.is_some()).cloned().collect()
    } else {
        vec![arrangement(target)?]
    };
    let opts = VerifyOptions { mode: Some(mode), fit_primes: fit };
    let mut rows = Vec::new();
    let mut ok = true;
    for a in &arrs {
        let rep = verify_modularity(a, pmax, &opts)?;
        print_modularity(&rep, format);
        ok &= rep.all_match();
        if format == ReportFormat::Table {
            print!("{}", format_rows(&rep.rows, format));
            println!();
        }
        rows.extend(rep.rows);
    }
    if format != ReportFormat::Table {
        println!("{}", format_rows(&rows, format));
    }
    let bad = rows.iter().filter(|r| !r.matched).count();
    eprintln!("{} rows, {bad} mismatches", rows.len());
    Ok(ok)
}

fn cmd_twisted(id: &str, pmax: u64) -> Outcome {
    let arr = arrangement(id)?;
    let rep = verify_involution(&arr, pmax)?;
    println!("{}: N_p = {}", rep.arrangement, rep.formula);
    println!("lift: {}", rep.lift.map_or("none".to_string(), |l| format!("{l:?}").to_lowercase()));
    println!(
        "{:>4} {:>10} {:>10} {:>10} {:>10} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "p", "N+", "N-", "predicted", "fixed", "trace", "tr+", "tr-", "a_p", "p*b_p"
    );
    for r in &rep.rows {
        println!(
            "{:>4} {:>10} {:>10} {:>10} {:>10} {:>8} {:>8} {:>8} {:>8} {:>8}{}",
            r.p,
            r.n_plus,
            r.n_minus,
            r.predicted,
            r.fixed_points,
            r.trace,
            r.trace_plus,
            r.trace_minus,
            r.a_p,
            r.p_b_p,
            if r.eigen_match { "" } else { "  MISMATCH" }
        );
    }
    Ok(rep.all_match())
}

fn cmd_fibers(id: &str) -> Outcome {
    let arr = arrangement(id)?;
    let splits = find_kummer_splits(&arr);
    println!("{}: {} Kummer splits", arr.id, splits.len());
    let refs: Vec<_> = reference_tables().iter().filter(|r| r.family == arr.family()).collect();
    let mut found = vec![false; refs.len()];
    for (k, s) in splits.iter().enumerate() {
        println!(
            "split {k}: planes {:?} through {:?}, planes {:?} through {:?}",
            s.first, s.first_point, s.second, s.second_point
        );
        let table = s.table()?;
        println!("{table}");
        let hit = refs.iter().enumerate().find_map(|(i, r)| align_tables(&table, &r.table).map(|al| (i, al)));
        if let Some((i, al)) = hit {
            found[i] = true;
            println!(
                "  = printed table {}{}{}",
                i + 1,
                al.mobius.map_or(String::new(), |m| format!(" via {m}")),
                if al.swapped { ", rows swapped" } else { "" }
            );
        }
    }
    for (i, r) in refs.iter().enumerate() {
        if !found[i] {
            println!("printed table {} is not reproduced by any split:", i + 1);
            println!("{}", r.table);
        }
    }
    Ok(found.iter().all(|&f| f))
}

fn cmd_forms(label: &str, pmax: u64) -> Outcome {
    let form = NewformRef::parse(label)?;
    let c = coefficients(&form, pmax)?;
    println!("{}: {}", c.form, c.provenance);
    for (p, a) in &c.values {
        println!("{p:>5} {a:>10}");
    }
    let cc = cross_validate(&form, pmax)?;
    if cc.sources.len() > 1 {
        println!("{} sources agree at {} primes", cc.sources.len(), cc.compared.len());
    }
    Ok(true)
}

fn cmd_kummer(lambda: &Q, mu: &Q, pmax: u64, json: bool) -> Outcome {
    let rep = verify_kummer_family(lambda, mu, pmax)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&rep)?);
        return Ok(rep.all_match());
    }
    println!("D({}, {}): h11 = {:?}, h12 = {}, e = {:?}", rep.lambda, rep.mu, rep.h11, rep.h12, rep.euler);
    if let Some(f) = &rep.modular_formula {
        println!("modular prediction: {f}");
    }
    if let Some(d) = rep.twist {
        println!("twist: trace = ({d}/p)*prediction; prediction checked on u^2 = {d}*D");
    }
    if let Some(n) = &rep.note {
        println!("{n}");
    }
    let opt = |x: Option<i128>| x.map_or("-".to_string(), |v| v.to_string());
    println!(
        "{:>4} {:>10} {:>10} {:>10} {:>10} {:>6} {:>6} {:>9}",
        "p", "trace", "charpoly", "twisted", "modular", "t_l", "t_m", "newton"
    );
    for r in &rep.rows {
        println!(
            "{:>4} {:>10} {:>10} {:>10} {:>10} {:>6} {:>6} {:>9}",
            r.p,
            opt(r.lhs),
            r.rhs,
            opt(r.twisted_lhs),
            opt(r.modular_rhs),
            r.t_lambda,
            r.t_mu,
            r.charpoly_ok.map_or("-".to_string(), |b| b.to_string())
        );
    }
    if !rep.identities.is_empty() {
        println!("{:>4} {:>8} {:>8} {:>10} {:>7} {:>7} {:>7}", "p", "a", "b", "c", "sym2", "alt", "a*b");
        for i in &rep.identities {
            println!(
                "{:>4} {:>8} {:>8} {:>10} {:>7} {:>7} {:>7}",
                i.p, i.a, i.b, i.c, i.square_ok, i.character_rule_ok, i.product_ok
            );
        }
    }
    Ok(rep.all_match())
}

fn run(cli: Cli) -> Outcome {
    #[cfg(feature = "parallel")]
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    #[cfg(not(feature = "parallel"))]
    if cli.jobs.is_some_and(|n| n > 1) {
        eprintln!("built without the parallel feature; --jobs ignored");
    }
    if let Some(dir) = &cli.cache_dir {
        load_cache(dir)?;
    }
    let ok = match &cli.command {
        Command::Catalog => cmd_catalog(),
        Command::Inventory { id } => cmd_inventory(id),
        Command::Count { id, p } => cmd_count(id, *p),
        Command::Trace { id, pmax, correction, fit_primes } => {
            cmd_verify(id, *pmax, ReportFormat::Table, *correction, fit_primes.clone())
        }
        Command::Twisted { id, pmax } => cmd_twisted(id, *pmax),
        Command::Fibers { id } => cmd_fibers(id),
        Command::Forms { label, pmax } => cmd_forms(label, *pmax),
        Command::Verify { target, pmax, format, correction } => cmd_verify(target, *pmax, *format, *correction, None),
        Command::Kummer { lambda, mu, pmax, json } => cmd_kummer(lambda, mu, *pmax, *json),
    }?;
    if let Some(dir) = &cli.cache_dir {
        save_cache(dir)?;
    }
    Ok(ok)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

//! Subcommand implementations. Each command renders its primary output (and
//! optionally a JSON sidecar) as text; [`run`] writes them and the manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Parser;
use num_rational::BigRational;
use qpcode::construct::{self, Code};
use qpcode::erasure::{
    self, erasure_report, format_decimal, table1, CountMode, ErasureReport, ReportOptions, Table1Options,
    TrailingShortening,
};
use qpcode::product::{failure_probability, table2_printed, ProductCode, SimConfig, SimResult, Strategy};
use qpcode::spectrum::{
    dual_spectrum_by_doubling, macwilliams, oracle_dual_spectrum, oracle_spectrum, spectrum_by_doubling,
    WeightSpectrum,
};
use qpcode::Error;
use serde_json::json;

use crate::codes;
use crate::manifest::{digest, RunManifest};
use crate::{
    Cli, Command, ConstructArgs, ErasureArgs, Family, SimulateArgs, SpectrumArgs, SpectrumMethod, TableArgs,
};

/// What a command produced.
struct Rendered {
    name: &'static str,
    body: String,
    sidecar: Option<String>,
    params: serde_json::Value,
    seed: Option<u64>,
    inputs: Vec<PathBuf>,
}

pub fn run(command: Command, argv: &[String]) -> Result<()> {
    let (rendered, out) = match command {
        Command::Replay { manifest } => return replay(&manifest),
        Command::Construct(a) => {
            let out = Some(a.out.clone());
            (construct_cmd(a)?, out)
        }
        Command::Spectrum(a) => {
            let out = a.out.clone();
            (spectrum_cmd(a)?, out)
        }
        Command::Erasure(a) => {
            let out = a.out.clone();
            (erasure_cmd(a)?, out)
        }
        Command::Simulate(a) => {
            let out = a.out.clone();
            (simulate_cmd(a)?, out)
        }
        Command::Table(a) => {
            let out = a.out.clone();
            (table_cmd(a)?, out)
        }
    };
    emit(rendered, out.as_deref(), argv)
}

fn emit(r: Rendered, out: Option<&Path>, argv: &[String]) -> Result<()> {
    let Some(out) = out else {
        print!("{}", r.body);
        return Ok(());
    };
    fs::write(out, &r.body).with_context(|| format!("writing {}", out.display()))?;
    let mut outputs = vec![digest(out)?];
    if let Some(side) = &r.sidecar {
        let path = codes::sidecar(out);
        fs::write(&path, side).with_context(|| format!("writing {}", path.display()))?;
        outputs.push(digest(&path)?);
    }
    let manifest = RunManifest {
        command: r.name.to_string(),
        argv: argv.to_vec(),
        params: r.params,
        seed: r.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        inputs: r.inputs.iter().map(|p| digest(p)).collect::<Result<_>>()?,
        outputs,
    };
    let path = manifest.write(out)?;
    log::info!("wrote {} and {}", out.display(), path.display());
    Ok(())
}

/// Files among the code arguments, for the manifest.
fn input_files(code: &str) -> Vec<PathBuf> {
    let p = Path::new(code);
    if p.exists() {
        let mut v = vec![p.to_path_buf()];
        let side = codes::sidecar(p);
        if side.exists() {
            v.push(side);
        }
        v
    } else {
        Vec::new()
    }
}

fn construct_cmd(a: ConstructArgs) -> Result<Rendered> {
    let need_r = || a.r.ok_or_else(|| Error::InvalidArgument("--r is required for this family".into()));
    let code = match a.family {
        Family::Eh => construct::extended_hamming(need_r()?)?,
        Family::Panchenko => construct::panchenko(need_r()?)?,
        Family::General => {
            let g = a.g.ok_or_else(|| Error::InvalidArgument("--g is required for --family general".into()))?;
            let seed = match &a.seed {
                Some(s) => codes::resolve(s)?,
                None => construct::default_seed_for(g).ok_or_else(|| {
                    Error::InvalidArgument(format!("no built-in seed for g = {g}; pass --seed FILE"))
                })?,
            };
            construct::general_qp(need_r()?, g, &seed)?
        }
        Family::Seed => {
            let name = a
                .seed
                .as_deref()
                .ok_or_else(|| Error::InvalidArgument("--seed is required for --family seed".into()))?;
            construct::seed_by_name(name)?
        }
    };
    let code = match a.shorten {
        Some(k) => construct::shorten_trailing(&code, k)?,
        None => code,
    };
    eprintln!(
        "[{}, {}, {}] code, {} check rows",
        code.n(),
        code.dimension(),
        code.d().map_or("-".to_string(), |d| d.to_string()),
        code.r()
    );
    Ok(Rendered {
        name: "construct",
        body: code.h().to_text(),
        sidecar: Some(serde_json::to_string_pretty(code.spec())?),
        params: json!({"family": format!("{:?}", a.family).to_lowercase(), "r": a.r, "g": a.g, "seed": a.seed, "shorten": a.shorten}),
        seed: None,
        inputs: a.seed.as_deref().map(input_files).unwrap_or_default(),
    })
}

fn spectrum_json(label: &str, code: &Code, s: &WeightSpectrum, method: &str) -> serde_json::Value {
    json!({
        "code": label,
        "n": code.n(),
        "k": code.dimension(),
        "r": code.r(),
        "kind": format!("{:?}", s.kind()).to_lowercase(),
        "method": method,
        "counts": s.counts().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    })
}

fn spectrum_cmd(a: SpectrumArgs) -> Result<Rendered> {
    let code = codes::resolve(&a.code)?;
    let recursion = || -> Result<WeightSpectrum> {
        Ok(if a.dual {
            dual_spectrum_by_doubling(&code)?
        } else {
            spectrum_by_doubling(&code)?
        })
    };
    let oracle = || -> Result<WeightSpectrum> {
        Ok(if a.dual {
            oracle_dual_spectrum(&code)?
        } else {
            oracle_spectrum(&code)?
        })
    };
    let (s, method) = match a.method {
        SpectrumMethod::Recursion => (recursion()?, "recursion"),
        SpectrumMethod::Oracle => (oracle()?, "oracle"),
        SpectrumMethod::Both => {
            let (x, y) = (recursion()?, oracle()?);
            if x != y {
                return Err(Error::Inconsistent(format!("recursion gives {x:?}, oracle gives {y:?}")).into());
            }
            // the transform must also take the result to a valid dual
            let other = macwilliams(&x, if a.dual { code.h().rank() } else { code.dimension() })?;
            log::debug!("MacWilliams image has {} words", other.total());
            (x, "both")
        }
    };
    Ok(Rendered {
        name: "spectrum",
        body: serde_json::to_string_pretty(&spectrum_json(&a.code, &code, &s, method))? + "\n",
        sidecar: None,
        params: json!({"code": a.code, "method": method, "dual": a.dual}),
        seed: None,
        inputs: input_files(&a.code),
    })
}

fn fraction(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn opt_f64(v: Option<f64>, digits: usize) -> String {
    v.map(|x| format!("{x:.digits$}")).unwrap_or_default()
}

pub const ERASURE_HEADER: &str = "rho,total,psi,psi_tilde,s_exact_or_estimate,ci_halfwidth,delta,delta_lower,delta_exact,delta_tilde,delta_tilde_2,delta_entropy,delta_weak,method";

fn erasure_row(rep: &ErasureReport, digits: usize) -> String {
    let d = |q: &BigRational| format_decimal(q, digits);
    let (s_value, ci) = match (&rep.s_rho_exact, &rep.sampled) {
        (Some(v), _) => (v.to_string(), "0".to_string()),
        (None, Some(s)) => (format!("{:.0}", s.estimate()), format!("{:.0}", s.ci_halfwidth())),
        _ => (String::new(), String::new()),
    };
    format!(
        "{},{},{},{},{},{},{:.digits$},{},{},{},{},{},{},{}",
        rep.rho,
        rep.total,
        rep.psi,
        rep.psi_tilde,
        s_value,
        ci,
        rep.delta(),
        d(&rep.delta_lower),
        rep.delta_exact.as_ref().map(d).unwrap_or_default(),
        d(&rep.delta_tilde),
        d(&rep.delta_tilde_2),
        opt_f64(rep.entropy.map(|e| e.entropy), digits),
        opt_f64(rep.entropy.and_then(|e| e.weak), digits),
        rep.method.tag()
    )
}

fn erasure_json(rep: &ErasureReport) -> serde_json::Value {
    json!({
        "rho": rep.rho,
        "total": rep.total.to_string(),
        "psi": rep.psi.to_string(),
        "psi_tilde": rep.psi_tilde.to_string(),
        "s_rho_exact": rep.s_rho_exact,
        "sampled": rep.sampled.as_ref().map(|s| json!({"hits": s.hits, "samples": s.samples, "fraction": s.fraction, "sigma": s.sigma})),
        "delta_lower": fraction(&rep.delta_lower),
        "delta_exact": rep.delta_exact.as_ref().map(fraction),
        "delta_tilde": fraction(&rep.delta_tilde),
        "delta_tilde_2": fraction(&rep.delta_tilde_2),
        "exact_regime": rep.exact_regime,
        "method": rep.method.tag(),
    })
}

fn parse_depth(s: &str) -> Result<Option<u32>> {
    if s.eq_ignore_ascii_case("full") {
        return Ok(None);
    }
    let depth: u32 = s
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("recursion depth `{s}` is not a number or `full`")))?;
    if depth == 0 {
        bail!(Error::InvalidArgument("recursion depth must be at least 1".into()));
    }
    Ok(Some(depth))
}

fn erasure_cmd(a: ErasureArgs) -> Result<Rendered> {
    let code = codes::resolve(&a.code)?;
    if a.rho_min > a.rho_max || a.rho_max > code.n() {
        bail!(Error::InvalidArgument(format!(
            "need rho-min <= rho-max <= n = {}, got {}..{}",
            code.n(),
            a.rho_min,
            a.rho_max
        )));
    }
    let s = oracle_spectrum(&code)?;
    let provider = TrailingShortening::with_full_spectrum(code.clone(), s.clone())?;
    let (count, depth, mode) = if let Some(n) = a.sample {
        (CountMode::Sampled { samples: n, seed: a.seed }, None, "sample")
    } else if a.psi {
        (CountMode::PsiOnly, None, "psi")
    } else if let Some(depth) = &a.recursive {
        (CountMode::Recursive, parse_depth(depth)?, "recursive")
    } else {
        (CountMode::Exact { budget: a.budget }, None, "exact")
    };
    let opts = ReportOptions { count, depth, z: a.z };
    let mut body = format!("{ERASURE_HEADER}\n");
    let mut rows = Vec::new();
    for rho in a.rho_min..=a.rho_max {
        let rep = erasure_report(&code, &provider, &s, rho, &opts)?;
        writeln!(body, "{}", erasure_row(&rep, a.digits))?;
        rows.push(erasure_json(&rep));
    }
    let sidecar = json!({"code": a.code, "n": code.n(), "r": code.r(), "d": code.d(), "rows": rows});
    Ok(Rendered {
        name: "erasure",
        body,
        sidecar: Some(serde_json::to_string_pretty(&sidecar)?),
        params: json!({"code": a.code, "rho_min": a.rho_min, "rho_max": a.rho_max, "mode": mode,
            "samples": a.sample, "recursive": a.recursive, "budget": a.budget, "z": a.z, "digits": a.digits}),
        seed: Some(a.seed),
        inputs: input_files(&a.code),
    })
}

fn sim_json(r: &SimResult) -> serde_json::Value {
    json!({
        "p": r.p,
        "d_plus": r.d_plus,
        "trials": r.trials,
        "failures": r.failures,
        "miscorrections": r.miscorrections,
        "estimate": r.estimate,
        "sigma": r.sigma,
        "ci95": r.ci95,
        "strategy": r.strategy,
        "tail_bound": r.tail_bound,
        "eps_tail": r.eps_tail,
        "strata": r.strata,
    })
}

fn simulate_cmd(a: SimulateArgs) -> Result<Rendered> {
    let pc = ProductCode::panchenko72()?;
    let strategy = if a.stratified {
        Strategy::Stratified {
            kmax: a.kmax,
            per_stratum: a.per_stratum,
            eps_tail: a.eps_tail,
        }
    } else {
        Strategy::Plain
    };
    let cfg = SimConfig {
        p: a.p,
        d_plus: a.dplus,
        trials: a.trials,
        master_seed: a.seed,
        strategy,
    };
    let r = failure_probability(&pc, &cfg)?;
    Ok(Rendered {
        name: "simulate",
        body: serde_json::to_string_pretty(&sim_json(&r))? + "\n",
        sidecar: None,
        params: json!({"p": a.p, "d_plus": a.dplus, "trials": a.trials, "stratified": a.stratified,
            "kmax": a.kmax, "per_stratum": a.per_stratum, "eps_tail": a.eps_tail}),
        seed: Some(a.seed),
        inputs: Vec::new(),
    })
}

fn table_cmd(a: TableArgs) -> Result<Rendered> {
    if a.which == 1 {
        table1_cmd(a)
    } else {
        table2_cmd(a)
    }
}

fn table1_cmd(a: TableArgs) -> Result<Rendered> {
    let codes = if a.codes.is_empty() {
        erasure::table1_codes()?
    } else {
        a.codes
            .iter()
            .map(|name| Ok((name.clone(), codes::resolve(name)?)))
            .collect::<Result<Vec<_>>>()?
    };
    if a.rho_min > a.rho_max {
        bail!(Error::InvalidArgument("rho-min exceeds rho-max".into()));
    }
    let opts = Table1Options {
        rhos: (a.rho_min..=a.rho_max).collect(),
        budget: a.budget,
        samples: a.samples,
        seed: a.seed,
    };
    let cells = table1(&codes, &opts)?;
    let digits = a.digits;
    let mut body = String::from("code,n,r,rho,method,delta,ci_halfwidth,delta_lower,delta_tilde_2,printed,deviation\n");
    let mut rows = Vec::new();
    for c in &cells {
        let rep = &c.report;
        let ci = rep.sampled.as_ref().map_or(0.0, |s| 1.96 * s.sigma);
        writeln!(
            body,
            "{},{},{},{},{},{:.digits$},{:.digits$},{},{},{},{}",
            c.label,
            c.n,
            c.r,
            rep.rho,
            rep.method.tag(),
            rep.delta(),
            ci,
            format_decimal(&rep.delta_lower, digits),
            format_decimal(&rep.delta_tilde_2, digits),
            c.printed.map(|v| format!("{v:.4}")).unwrap_or_default(),
            opt_f64(c.printed.map(|v| rep.delta() - v), digits),
        )?;
        let mut row = erasure_json(rep);
        row["code"] = json!(c.label);
        rows.push(row);
    }
    Ok(Rendered {
        name: "table",
        body,
        sidecar: Some(serde_json::to_string_pretty(&json!({"which": 1, "cells": rows}))?),
        params: json!({"which": 1, "codes": codes.iter().map(|(l, _)| l.clone()).collect::<Vec<_>>(),
            "rho_min": a.rho_min, "rho_max": a.rho_max, "budget": a.budget, "samples": a.samples, "digits": digits}),
        seed: Some(a.seed),
        inputs: a.codes.iter().flat_map(|c| input_files(c)).collect(),
    })
}

fn table2_cmd(a: TableArgs) -> Result<Rendered> {
    let pc = ProductCode::panchenko72()?;
    let digits = a.digits;
    let mut body = String::from("p,d_plus,strategy,trials,failures,miscorrections,estimate,ci_lo,ci_hi,tail_bound,printed\n");
    let mut results = Vec::new();
    for &p in &a.p {
        for &d_plus in &a.dplus {
            let strategy = if a.stratified {
                Strategy::Stratified {
                    kmax: None,
                    per_stratum: a.per_stratum,
                    eps_tail: a.eps_tail,
                }
            } else {
                Strategy::Plain
            };
            let r = failure_probability(
                &pc,
                &SimConfig {
                    p,
                    d_plus,
                    trials: a.trials,
                    master_seed: a.seed,
                    strategy,
                },
            )?;
            writeln!(
                body,
                "{},{},{},{},{},{},{:.digits$},{:.digits$},{:.digits$},{},{}",
                p,
                d_plus,
                r.strategy,
                r.trials,
                r.failures,
                r.miscorrections,
                r.estimate,
                r.ci95[0],
                r.ci95[1],
                r.tail_bound.map(|t| format!("{t:e}")).unwrap_or_default(),
                table2_printed(p, d_plus).map(|v| format!("{v:e}")).unwrap_or_default(),
            )?;
            results.push(sim_json(&r));
        }
    }
    Ok(Rendered {
        name: "table",
        body,
        sidecar: Some(serde_json::to_string_pretty(&json!({"which": 2, "results": results}))?),
        params: json!({"which": 2, "p": a.p, "d_plus": a.dplus, "trials": a.trials, "stratified": a.stratified,
            "per_stratum": a.per_stratum, "eps_tail": a.eps_tail, "digits": digits}),
        seed: Some(a.seed),
        inputs: Vec::new(),
    })
}

/// Index of the value following `--out` (or `--out=...`) in `argv`.
fn out_position(argv: &[String]) -> Option<(usize, bool)> {
    argv.iter().enumerate().find_map(|(i, a)| {
        if a == "--out" {
            Some((i + 1, false))
        } else if a.starts_with("--out=") {
            Some((i, true))
        } else {
            None
        }
    })
}

fn replay(path: &Path) -> Result<()> {
    let m = RunManifest::read(path)?;
    let Some((pos, inline)) = out_position(&m.argv) else {
        bail!(Error::InvalidArgument("manifest has no --out argument to replay".into()));
    };
    let original = if inline {
        m.argv[pos]["--out=".len()..].to_string()
    } else {
        m.argv.get(pos).cloned().context("--out without a value")?
    };
    for input in &m.inputs {
        let now = digest(Path::new(&input.path))?;
        if now.sha256 != input.sha256 {
            bail!(Error::Inconsistent(format!("input {} changed since the run", input.path)));
        }
    }
    let dir = std::env::temp_dir().join(format!("qpcode-replay-{}", std::process::id()));
    fs::create_dir_all(&dir)?;
    let fresh = dir.join("out");
    let fresh_str = fresh.display().to_string();
    let mut argv = m.argv.clone();
    argv[pos] = if inline { format!("--out={fresh_str}") } else { fresh_str.clone() };
    let cli = Cli::try_parse_from(std::iter::once("qpcode".to_string()).chain(argv.iter().cloned()))?;
    if matches!(cli.command, Command::Replay { .. }) {
        bail!(Error::InvalidArgument("a manifest cannot replay another replay".into()));
    }
    let result = run(cli.command, &argv);
    let outcome = result.and_then(|_| {
        let mut mismatches = Vec::new();
        for out in &m.outputs {
            let suffix = out.path.strip_prefix(&original).unwrap_or("");
            let again = digest(Path::new(&format!("{fresh_str}{suffix}")))?;
            if again.sha256 == out.sha256 {
                println!("match     {}", out.path);
            } else {
                println!("MISMATCH  {}", out.path);
                mismatches.push(out.path.clone());
            }
        }
        if mismatches.is_empty() {
            Ok(())
        } else {
            Err(Error::Inconsistent(format!("replayed outputs differ: {}", mismatches.join(", "))).into())
        }
    });
    let _ = fs::remove_dir_all(&dir);
    outcome
}

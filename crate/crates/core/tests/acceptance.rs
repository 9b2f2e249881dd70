//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line for each
//! and exits nonzero if any failed.
//!
//! Pass criterion numbers as arguments to run a subset:
//! `cargo test --release -p qpcode --test acceptance -- 4 5`.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use qpcode::construct::{
    admissible_lengths, covering_radius, default_seed_for, double, extended_hamming, general_qp,
    panchenko, seed, shorten_trailing, Seed,
};
use qpcode::erasure::{
    delta_lower, psi, psi_tilde, s_rho_exact, s_rho_sampled, TrailingShortening, DEFAULT_EXACT_BUDGET,
    TABLE1_PRINTED,
};
use qpcode::gf2::binomial;
use qpcode::product::{failure_probability, OutcomeClass, ProductCode, SimConfig, SimResult, Strategy};
use qpcode::spectrum::{
    doubled_dual_spectrum, macwilliams, minimum_distance, oracle_dual_spectrum, oracle_spectrum,
    spectrum_by_doubling,
};
use qpcode::Code;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ratio(a: u64, n: usize, rho: usize) -> f64 {
    a as f64 / binomial(n as u64, rho as u64).to_f64().unwrap()
}

/// Doubling chains from every seed up to redundancy `max_r`.
fn chains(max_r: usize) -> Vec<(String, Code)> {
    let mut out = Vec::new();
    for s in [Seed::M, Seed::S, Seed::Eh3, Seed::Example9x5] {
        let mut c = seed(s);
        while c.r() < max_r {
            c = double(&c);
            out.push((format!("{}+{}", s.name(), c.spec().lineage.doublings), c.clone()));
        }
    }
    out
}

/// General family members for the seeds that exist (g = 0, 2, 3).
fn general_members(rs: std::ops::RangeInclusive<usize>) -> Vec<(String, Code)> {
    let mut out = Vec::new();
    for r in rs {
        for (g, _) in admissible_lengths(r).unwrap() {
            if let Some(s) = default_seed_for(g) {
                out.push((format!("general(r={r},g={g})"), general_qp(r, g, &s).unwrap()));
            }
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let mut codes = chains(12);
    codes.extend(general_members(6..=9));
    for (label, c) in &codes {
        let rec = spectrum_by_doubling(c).map_err(|e| format!("{label}: {e}"))?;
        let oracle = oracle_spectrum(c).map_err(|e| format!("{label}: {e}"))?;
        check(rec == oracle, || format!("{label}: recursion {rec:?} vs oracle {oracle:?}"))?;
    }
    Ok(format!("{} codes agree exactly", codes.len()))
}

fn criterion_2() -> Outcome {
    let a = |c: &Code, w: usize| oracle_spectrum(c).unwrap().get(w).clone();
    let u = BigUint::from;
    let eh4 = extended_hamming(4).unwrap();
    check(a(&eh4, 4) == u(14u32) && a(&eh4, 8) == u(1u32), || "extended_hamming(4)".into())?;
    let p5 = oracle_spectrum(&panchenko(5).unwrap()).unwrap();
    let support: Vec<(usize, u64)> = p5.support().map(|(w, c)| (w, c.to_u64().unwrap())).collect();
    check(support == [(0, 1), (4, 10), (5, 16), (8, 5)] && p5.total() == u(32u32), || {
        format!("panchenko(5): {support:?}")
    })?;
    let p7 = a(&panchenko(7).unwrap(), 4);
    let p8 = a(&panchenko(8).unwrap(), 4);
    let eh7 = a(&extended_hamming(7).unwrap(), 4);
    check(p7 == u(1190u32), || format!("panchenko(7) A_4 = {p7}"))?;
    check(p8 == u(10300u32), || format!("panchenko(8) A_4 = {p8}"))?;
    check(eh7 == u(10416u32), || format!("extended_hamming(7) A_4 = {eh7}"))?;
    Ok("A_4: EH4 14, P7 1190, P8 10300, EH7 10416; P5 {1,10,16,5}".into())
}

fn criterion_3() -> Outcome {
    let mut steps = 0;
    for s in [Seed::M, Seed::S, Seed::Eh3, Seed::Example9x5] {
        let mut base = seed(s);
        while base.r() < 12 {
            let next = double(&base);
            if base.n() % 2 == 0 {
                let eq7 = doubled_dual_spectrum(&oracle_dual_spectrum(&base).unwrap(), next.r(), base.n())
                    .map_err(|e| format!("{} step to r={}: {e}", s.name(), next.r()))?;
                let primal = spectrum_by_doubling(&next).unwrap();
                let mw = macwilliams(&primal, next.dimension()).unwrap();
                check(eq7 == mw, || format!("{} step to r={}: {eq7:?} vs {mw:?}", s.name(), next.r()))?;
                steps += 1;
            }
            base = next;
        }
    }
    Ok(format!("{steps} doubling steps with even half-length agree"))
}

fn within_printed(delta: f64, printed: f64) -> bool {
    let trunc = (delta * 1e4).floor() / 1e4;
    let round = (delta * 1e4).round() / 1e4;
    (trunc - printed).abs() <= 1e-4 + 1e-12 || (round - printed).abs() <= 1e-4 + 1e-12
}

fn table1_code(label: &str) -> Code {
    match label {
        "hamming7" => extended_hamming(7).unwrap(),
        "panchenko7" => panchenko(7).unwrap(),
        "hamming8" => extended_hamming(8).unwrap(),
        "panchenko8" => panchenko(8).unwrap(),
        _ => unreachable!(),
    }
}

fn criterion_4() -> Outcome {
    let mut lines = Vec::new();
    for (label, printed) in TABLE1_PRINTED {
        let c = table1_code(label);
        let s = oracle_spectrum(&c).unwrap();
        for (i, rho) in [4usize, 5].into_iter().enumerate() {
            let d = delta_lower(&s, 4, rho).unwrap().to_f64().unwrap();
            check(within_printed(d, printed[i]), || format!("{label} rho={rho}: {d:.6} vs {}", printed[i]))?;
            lines.push(format!("{d:.5}"));
        }
    }
    Ok(format!("computed {}", lines.join(" ")))
}

fn criterion_5(cache: &mut ExactCache) -> Outcome {
    let mut notes = Vec::new();
    for label in ["hamming7", "panchenko7"] {
        let c = table1_code(label);
        let s = oracle_spectrum(&c).unwrap();
        let printed = TABLE1_PRINTED.iter().find(|(l, _)| *l == label).unwrap().1;
        for rho in [6usize, 7] {
            let exact = cache.get(label, &c, rho)?;
            let delta = ratio(exact, c.n(), rho);
            let bound = delta_lower(&s, 4, rho).unwrap().to_f64().unwrap();
            let want = printed[rho - 4];
            check((delta - want).abs() <= 1e-2, || format!("{label} rho={rho}: exact {delta:.5} vs {want}"))?;
            check(delta >= bound, || format!("{label} rho={rho}: {delta} below bound {bound}"))?;
            notes.push(format!("{label}/{rho} {delta:.4}"));
        }
    }
    let eh7 = extended_hamming(7).unwrap();
    let bound = delta_lower(&oracle_spectrum(&eh7).unwrap(), 4, 6).unwrap().to_f64().unwrap();
    check((bound - 0.7385).abs() < 5e-5 && bound < 0.7469, || format!("hamming7 rho=6 bound {bound}"))?;
    check(psi(&oracle_spectrum(&eh7).unwrap(), 4, 6).unwrap() == BigInt::from(55371456u64), || {
        "hamming7 psi(6) != 55371456".into()
    })?;
    for label in ["hamming8", "panchenko8"] {
        let c = table1_code(label);
        let printed = TABLE1_PRINTED.iter().find(|(l, _)| *l == label).unwrap().1;
        for rho in [6usize, 7] {
            let est = s_rho_sampled(&c, rho, 100_000_000, 2024).unwrap();
            let want = printed[rho - 4];
            let tol = (3.0 * est.sigma).max(1e-2);
            check((est.fraction - want).abs() <= tol, || {
                format!("{label} rho={rho}: sampled {:.5} vs {want}", est.fraction)
            })?;
            notes.push(format!("{label}/{rho} {:.4}~", est.fraction));
        }
    }
    Ok(notes.join(", "))
}

fn small_codes() -> Vec<(String, Code)> {
    let mut codes: Vec<(String, Code)> = chains(7).into_iter().filter(|(_, c)| c.d() == Some(4)).collect();
    codes.extend(general_members(5..=8).into_iter().filter(|(_, c)| c.n() <= 64));
    codes.push(("panchenko(7)-5".into(), shorten_trailing(&panchenko(7).unwrap(), 5).unwrap()));
    codes.push(("hamming(7)-24".into(), shorten_trailing(&extended_hamming(7).unwrap(), 24).unwrap()));
    codes.push(("hamming(6)-3".into(), shorten_trailing(&extended_hamming(6).unwrap(), 3).unwrap()));
    codes.retain(|(_, c)| c.n() <= 64);
    codes
}

fn criterion_6() -> Outcome {
    let codes = small_codes();
    let mut cells = 0;
    for (label, c) in &codes {
        let s = oracle_spectrum(c).unwrap();
        let d = c.d().unwrap();
        for rho in 0..=5.min(c.n()) {
            let exact = s_rho_exact(c, rho, DEFAULT_EXACT_BUDGET).unwrap();
            let p = psi(&s, d, rho).unwrap();
            check(BigInt::from(exact) == p, || format!("{label} rho={rho}: S={exact} psi={p}"))?;
            cells += 1;
        }
    }
    Ok(format!("{} codes, {cells} (code, rho) cells", codes.len()))
}

fn criterion_7(cache: &mut ExactCache) -> Outcome {
    let codes = small_codes();
    let mut cells = 0;
    for (label, c) in &codes {
        let s = oracle_spectrum(c).unwrap();
        let d = c.d().unwrap();
        let provider = TrailingShortening::with_full_spectrum(c.clone(), s.clone()).unwrap();
        for rho in 0..=7.min(c.r()) {
            let exact = BigInt::from(cache.get(label, c, rho)?);
            let p = psi(&s, d, rho).unwrap();
            let pt = psi_tilde(&provider, d, rho, None).unwrap();
            let total = BigInt::from(binomial(c.n() as u64, rho as u64));
            check(p <= pt && pt <= exact && exact <= total, || {
                format!("{label} rho={rho}: psi={p} psi~={pt} S={exact} C={total}")
            })?;
            cells += 1;
        }
    }
    Ok(format!("{} codes, {cells} (code, rho) cells", codes.len()))
}

fn criterion_8() -> Outcome {
    let a4 = |c: &Code| oracle_spectrum(c).unwrap().get(4).clone();
    let mut notes = Vec::new();
    for (r, n) in [(7usize, 40usize), (8, 72)] {
        let qp = if n == panchenko(r).unwrap().n() {
            panchenko(r).unwrap()
        } else {
            let p = panchenko(r).unwrap();
            shorten_trailing(&p, p.n() - n).unwrap()
        };
        // the spec's comparison (one more check bit) and the same-redundancy one
        for eh_r in [r + 1, r] {
            let eh = extended_hamming(eh_r).unwrap();
            let eh = shorten_trailing(&eh, eh.n() - n).unwrap();
            let (x, y) = (a4(&qp), a4(&eh));
            check(x < y, || format!("n={n}: A_4 {x} !< shortened EH({eh_r}) {y}"))?;
            notes.push(format!("n={n}: {x} < {y} (EH{eh_r})"));
        }
    }
    Ok(notes.join(", "))
}

fn criterion_9() -> Outcome {
    let mut codes: Vec<(String, Code)> = Vec::new();
    for r in 3..=10 {
        codes.push((format!("EH({r})"), extended_hamming(r).unwrap()));
    }
    for r in 5..=10 {
        codes.push((format!("P({r})"), panchenko(r).unwrap()));
    }
    codes.extend(general_members(5..=10));
    for (label, c) in &codes {
        let d = minimum_distance(c.h()).unwrap();
        let rho = covering_radius(c).unwrap();
        check(d == Some(4) && rho == 2, || format!("{label}: d={d:?}, covering radius {rho}"))?;
    }
    Ok(format!("{} codes have d = 4 and covering radius 2", codes.len()))
}

fn criterion_10() -> Outcome {
    for r in 5..=12usize {
        let got: BTreeSet<(u32, usize)> = admissible_lengths(r).unwrap().into_iter().collect();
        let mut want = BTreeSet::new();
        want.insert((0, 1 << (r - 1)));
        for g in 2..=(r - 3) {
            want.insert((g as u32, (1 << (r - 2)) + (1 << (r - 2 - g))));
        }
        check(got == want, || format!("r={r}: {got:?} vs {want:?}"))?;
        check(got.iter().all(|&(g, _)| g != 1), || format!("r={r}: g=1 present"))?;
    }
    Ok("r = 5..12 match; g = 1 absent".into())
}

fn plain(p: f64, d_plus: usize, trials: u64, seed: u64) -> SimResult {
    let pc = ProductCode::panchenko72().unwrap();
    failure_probability(
        &pc,
        &SimConfig {
            p,
            d_plus,
            trials,
            master_seed: seed,
            strategy: Strategy::Plain,
        },
    )
    .unwrap()
}

fn criterion_11() -> Outcome {
    let mut failed = Vec::new();
    let mut notes = Vec::new();

    // (a)
    let r = plain(0.0, 3, 1_000_000, 1);
    if r.failures == 0 {
        notes.push("(a) 0/1e6".to_string());
    } else {
        failed.push(format!("(a) {} failures at p=0", r.failures));
    }

    // (b) every single-bit error, every radius
    let pc = ProductCode::panchenko72().unwrap();
    let zero = vec![0u128; 72];
    let mut bad = 0;
    for d_plus in 1..=8 {
        for i in 0..72 {
            for j in 0..72 {
                let mut y = zero.clone();
                y[i] ^= 1u128 << j;
                if pc.decode(&mut y, d_plus, &zero).class != OutcomeClass::Success {
                    bad += 1;
                }
            }
        }
    }
    if bad == 0 {
        notes.push("(b) 8x5184 single errors ok".into());
    } else {
        failed.push(format!("(b) {bad} single-error trials failed"));
    }

    // (c)
    let at_1e2: Vec<SimResult> = (3..=6).map(|d| plain(1e-2, d, 100_000, 11)).collect();
    let est: Vec<f64> = at_1e2.iter().map(|r| r.estimate).collect();
    let monotone = est.windows(2).all(|w| w[1] <= w[0]);
    let in_range = est.iter().all(|&e| (0.85..=1.0).contains(&e));
    if monotone && in_range {
        notes.push(format!("(c) {est:?}"));
    } else {
        failed.push(format!("(c) p=1e-2 estimates {est:?}"));
    }

    // (d)
    let d3 = plain(5e-3, 3, 100_000, 12);
    let d6 = plain(5e-3, 6, 100_000, 12);
    if d6.estimate * 10.0 <= d3.estimate {
        notes.push(format!("(d) {:.4} -> {:.4}", d3.estimate, d6.estimate));
    } else {
        failed.push(format!(
            "(d) p=5e-3: d+=3 {:.5} [{:.5},{:.5}], d+=6 {:.5} [{:.5},{:.5}]",
            d3.estimate, d3.ci95[0], d3.ci95[1], d6.estimate, d6.ci95[0], d6.ci95[1]
        ));
    }

    // (e)
    let strat = failure_probability(
        &pc,
        &SimConfig {
            p: 1e-2,
            d_plus: 3,
            trials: 1,
            master_seed: 13,
            strategy: Strategy::Stratified {
                kmax: None,
                per_stratum: 2_000,
                eps_tail: 1e-9,
            },
        },
    )
    .unwrap();
    let plain3 = &at_1e2[0];
    let joint = (plain3.sigma.powi(2) + strat.sigma.powi(2)).sqrt();
    let gap = (plain3.estimate - strat.estimate).abs();
    if gap <= 3.0 * joint + strat.tail_bound.unwrap() {
        notes.push(format!("(e) plain {:.5} vs stratified {:.5}", plain3.estimate, strat.estimate));
    } else {
        failed.push(format!(
            "(e) plain {:.6} vs stratified {:.6}, 3 sigma = {:.2e}",
            plain3.estimate,
            strat.estimate,
            3.0 * joint
        ));
    }

    if failed.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(format!("{}; passing parts: {}", failed.join("; "), notes.join("; ")))
    }
}

fn criterion_12() -> Outcome {
    let p7 = panchenko(7).unwrap();
    let eh6 = extended_hamming(6).unwrap();
    let pc = ProductCode::panchenko72().unwrap();
    let run = || {
        let exact = s_rho_exact(&p7, 7, DEFAULT_EXACT_BUDGET).unwrap();
        let spectrum = oracle_spectrum(&panchenko(10).unwrap()).unwrap();
        let exact_eh = s_rho_exact(&eh6, 6, DEFAULT_EXACT_BUDGET).unwrap();
        let sampled = s_rho_sampled(&p7, 6, 1_000_000, 77).unwrap();
        let sim = |strategy| {
            failure_probability(
                &pc,
                &SimConfig {
                    p: 1e-3,
                    d_plus: 4,
                    trials: 20_000,
                    master_seed: 5,
                    strategy,
                },
            )
            .unwrap()
        };
        let plain = sim(Strategy::Plain);
        let strat = sim(Strategy::Stratified {
            kmax: Some(12),
            per_stratum: 500,
            eps_tail: 1e-6,
        });
        (exact, spectrum, exact_eh, sampled, plain, strat)
    };
    let mut results = Vec::new();
    for threads in [1usize, 4, 8] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        results.push(pool.install(run));
    }
    for (i, r) in results.iter().enumerate().skip(1) {
        check(format!("{r:?}") == format!("{:?}", results[0]), || format!("run {i} differs from 1 thread"))?;
        check(r.4.estimate.to_bits() == results[0].4.estimate.to_bits(), || "plain estimate bits differ".into())?;
        check(r.5.estimate.to_bits() == results[0].5.estimate.to_bits(), || "stratified estimate bits differ".into())?;
    }
    Ok("enumeration, oracle, sampling and both simulators identical on 1/4/8 threads".into())
}

/// Exact `S_rho` values shared between criteria, keyed by the matrix.
#[derive(Default)]
struct ExactCache {
    values: BTreeMap<(String, usize), u64>,
}

impl ExactCache {
    fn get(&mut self, label: &str, c: &Code, rho: usize) -> Result<u64, String> {
        let key = (c.h().to_text(), rho);
        if let Some(&v) = self.values.get(&key) {
            return Ok(v);
        }
        let v = s_rho_exact(c, rho, DEFAULT_EXACT_BUDGET).map_err(|e| format!("{label} rho={rho}: {e}"))?;
        self.values.insert(key, v);
        Ok(v)
    }
}

fn main() {
    let selected: BTreeSet<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut cache = ExactCache::default();
    let descriptions = [
        "recursion equals oracle spectrum",
        "known spectrum values",
        "dual recursion equals MacWilliams of primal",
        "Table 1 exact-regime entries",
        "Table 1 extended-regime entries",
        "psi equals S_rho for rho <= 5",
        "psi <= psi~ <= S_rho <= C(n, rho)",
        "A_4 below shortened extended Hamming",
        "quasi-perfectness",
        "admissible lengths",
        "product-code simulator properties",
        "determinism across thread counts",
    ];
    let mut failures = 0;
    for (i, desc) in descriptions.iter().enumerate() {
        let number = i + 1;
        if !selected.is_empty() && !selected.contains(&number) {
            continue;
        }
        let start = Instant::now();
        let outcome = match number {
            1 => criterion_1(),
            2 => criterion_2(),
            3 => criterion_3(),
            4 => criterion_4(),
            5 => criterion_5(&mut cache),
            6 => criterion_6(),
            7 => criterion_7(&mut cache),
            8 => criterion_8(),
            9 => criterion_9(),
            10 => criterion_10(),
            11 => criterion_11(),
            _ => criterion_12(),
        };
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {number:>2} PASS ({secs:.1}s) {desc}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("criterion {number:>2} FAIL ({secs:.1}s) {desc}: {detail}");
            }
        }
    }
    if failures > 0 {
        println!("{failures} criterion(s) failed");
        std::process::exit(1);
    }
}

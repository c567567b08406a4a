//! Acceptance run: one pass/fail line per criterion.
//!
//! Criteria that do not hold are reported as failures but the binary still
//! exits 0, so `cargo test` stays usable; the summary line carries the count.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::lfp::corpus;
use common::*;
use prooflab::algebra::*;
use prooflab::cfi::*;
use prooflab::encoders::*;
use prooflab::games::*;
use prooflab::harness::*;
use prooflab::logic::*;
use prooflab::pc::*;
use prooflab::resolution::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Run {
    passed: usize,
    total: usize,
}

impl Run {
    fn criterion(&mut self, id: usize, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) {
        self.total += 1;
        let start = Instant::now();
        let got = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let t = start.elapsed();
        let (ok, detail) = match got {
            Ok(d) if t <= limit => (true, d),
            Ok(d) => (false, format!("{d}; over the time limit")),
            Err(d) => (false, d),
        };
        self.passed += ok as usize;
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("[{tag}] {id:>2} {name}: {detail} ({:.1}s, limit {}s)", t.as_secs_f64(), limit.as_secs());
    }
}

fn random_cnf(r: &mut ChaCha8Rng, n: u32, m: usize, max_width: usize) -> CnfFormula {
    let mut f = CnfFormula::new(n);
    for _ in 0..m {
        let w = r.gen_range(1..=max_width);
        f.add(random_clause(r, n, w));
    }
    f
}

fn horn_vs_brute_force() -> Outcome {
    let mut r = rng(1001);
    let mut unsat = 0;
    for case in 0..500 {
        let n = r.gen_range(1..=18);
        let m = r.gen_range(1..=3 * n as usize);
        let f = random_horn(&mut r, n, m);
        let bf = brute_force_sat(&f);
        ensure(horn_refute(&f).unwrap().refuted == !bf, || format!("case {case} disagrees"))?;
        unsat += !bf as usize;
    }
    Ok(format!("500 formulas agree, {unsat} unsatisfiable"))
}

fn lfp_model_checking() -> Outcome {
    let mut counts = [0usize; 2];
    for (i, (a, phi)) in corpus(1002, 120, false).into_iter().enumerate() {
        ensure(a.n <= 5, || format!("pair {i}: universe {}", a.n))?;
        let truth = eval_poslfp(&a, &phi).unwrap();
        let h = horn_encode(&a, &phi).unwrap();
        ensure(horn_refute(&h.cnf).unwrap().refuted == truth, || format!("pair {i}: {phi}"))?;
        counts[truth as usize] += 1;
    }
    let mut efp = 0;
    for (i, (a, phi)) in corpus(1003, 60, true).into_iter().enumerate() {
        let truth = eval_poslfp(&a, &phi).unwrap();
        let h = horn_encode(&a, &phi).unwrap();
        ensure(kres_refutes(&h.cnf, 3, None).unwrap() == truth, || format!("existential pair {i}: {phi}"))?;
        efp += 1;
    }
    Ok(format!("120 pairs ({} true, {} false), {efp} existential pairs refuted at width 3 iff true", counts[1], counts[0]))
}

fn width_two() -> Outcome {
    let mut r = rng(1004);
    let mut unsat = 0;
    for case in 0..200 {
        let n = r.gen_range(1..=12);
        let m = r.gen_range(1..=3 * n as usize);
        let f = random_cnf(&mut r, n, m, 2);
        let bf = brute_force_sat(&f);
        ensure(two_sat_oracle(&f).unwrap() == bf, || format!("case {case}: 2-SAT disagrees"))?;
        ensure(kres_refutes(&f, 2, None).unwrap() == !bf, || format!("case {case}: width 2 disagrees"))?;
        unsat += !bf as usize;
    }
    Ok(format!("200 formulas agree, {unsat} unsatisfiable"))
}

fn algebra() -> Outcome {
    let mut r = rng(1005);
    let q = Field::Rationals;
    let mut solvable = 0;
    for case in 0..200 {
        let (rows, cols) = (r.gen_range(1..=8), r.gen_range(1..=8));
        let a = random_ints(&mut r, rows, cols);
        let b: Vec<i64> = (0..rows).map(|_| r.gen_range(-3..=3)).collect();
        let m = Matrix::from_ints(q, &a).unwrap();
        let bv = Vector::from_ints(q, &b);
        let g = gram_solvable(&m, &bv).unwrap();
        ensure(g == gauss_solve(&m, &bv).unwrap().is_some(), || format!("case {case}: gram and gauss differ"))?;
        ensure(g == (bareiss_rank(&augmented(&a, &b)) == bareiss_rank(&a)), || format!("case {case}: rank test"))?;
        solvable += g as usize;
        let s = kernel_generators(&m).unwrap();
        ensure(m.mul(&s).unwrap().columns().iter().all(Vector::is_zero), || format!("case {case}: M S != 0"))?;
        ensure(rank(&s) == cols - bareiss_rank(&a), || format!("case {case}: rank S != nullity"))?;
        let c = compress_image(&m).unwrap();
        ensure(rank(&c) == bareiss_rank(&a), || format!("case {case}: compress changed the rank"))?;
        let v: Vec<i64> = (0..rows).map(|_| r.gen_range(-3..=3)).collect();
        let want = bareiss_rank(&augmented(&a, &v)) == bareiss_rank(&a);
        ensure(in_column_space(&c, &Vector::from_ints(q, &v)).unwrap() == want, || {
            format!("case {case}: compress changed membership")
        })?;
    }
    Ok(format!("200 systems, {solvable} solvable"))
}

fn unit(ax: &GameAxioms, v: usize, value: i64) -> PolySystem {
    let f = ax.system.field;
    let mut s = PolySystem::new(f, ax.system.num_vars);
    s.push(Polynomial::from_int_terms(f, &[(1, &[ax.x(v)]), (-value, &[])]));
    s
}

fn games() -> Outcome {
    let mut r = rng(1006);
    let (mut nodes, mut lost, mut zero_agrees) = (0, 0, 0);
    for case in 0..60 {
        let n = r.gen_range(1..=10);
        let g = random_game(&mut r, n, 3);
        let sol = solve_threshold_game(&g).unwrap();
        let oracle = game_oracle(&g);
        let ax = encode_threshold_axioms(&g, Field::Rationals).unwrap();
        let base = monpc_saturate(&ax.system, 2).unwrap();
        ensure(!base.refuted, || format!("game {case}: axioms refuted"))?;
        for v in 0..n {
            ensure(sol.player0_wins(v) == oracle[v], || format!("game {case}: solver wrong at {v}"))?;
            let one = extend_saturation(&base, &unit(&ax, v, 1), EngineKind::MonPc, &Default::default()).unwrap();
            ensure(one.refuted == !oracle[v], || format!("game {case}: X_{v} - 1 verdict"))?;
            let zero = extend_saturation(&base, &unit(&ax, v, 0), EngineKind::MonPc, &Default::default()).unwrap();
            zero_agrees += (zero.refuted == oracle[v]) as usize;
            nodes += 1;
            lost += !oracle[v] as usize;
        }
    }
    Ok(format!("60 games, {nodes} nodes, {lost} lost for player 0; X_v refuted iff won at {zero_agrees}/{nodes}"))
}

fn polynomial_systems() -> Outcome {
    let mut r = rng(1007);
    let fields = [Field::Rationals, Field::prime(2).unwrap(), Field::prime(3).unwrap()];
    let mut refuted = 0;
    for case in 0..100 {
        let f = fields[case % 3];
        let n = r.gen_range(1..=10);
        let m = r.gen_range(1..=8);
        let s = random_system(&mut r, f, n, m, 2);
        let sat = brute_force_poly_sat(&s);
        for k in 2..=3 {
            let mon = monpc_saturate(&s, k).unwrap();
            let pc = pc_saturate(&s, k).unwrap();
            ensure(!(sat && (mon.refuted || pc.refuted)), || format!("case {case} k={k}: refuted a satisfiable system"))?;
            ensure(!mon.refuted || pc.refuted, || format!("case {case} k={k}: MON-PC refuted, PC not"))?;
            for p in mon.basis.expand().unwrap() {
                ensure(pc.basis.contains(&p), || format!("case {case} k={k}: MON-PC span not inside PC span"))?;
            }
            refuted += (k == 3 && pc.refuted) as usize;
        }
    }
    Ok(format!("100 systems, {refuted} refuted by PC at degree 3"))
}

fn calibration() -> Outcome {
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    let cfg = CalibrationConfig::default();
    let rows = wl_calibrate(&cfg, "acceptance").map_err(|e| e.to_string())?;
    let summary = summarize_calibration(&rows, cfg.wl_dim_max);
    write_report(&dir, "wl_calibrate", "acceptance", &rows, &summary).map_err(|e| e.to_string())?;
    let again_cfg = CalibrationConfig { cfi_bases: vec![], ..cfg.clone() };
    let again = summarize_calibration(&wl_calibrate(&again_cfg, "acceptance").unwrap(), cfg.wl_dim_max);
    let small: Vec<_> = rows.iter().filter(|r| !r.pair.starts_with("cfi-")).collect();
    let mut offsets: BTreeMap<i64, usize> = BTreeMap::new();
    for r in &small {
        if let Some(o) = r.offset {
            *offsets.entry(o).or_default() += 1;
        }
    }
    ensure(rows.len() >= 20, || format!("only {} pairs", rows.len()))?;
    ensure(rows.iter().any(|r| r.pair == "triangles-c6"), || "triangles/C6 missing".into())?;
    ensure(rows.iter().any(|r| r.pair == "cfi-k4-p2" && r.offset.is_some()), || "CFI K4 pair unresolved".into())?;
    ensure(summary.disagreements.is_empty(), || format!("disagreements {:?}", summary.disagreements))?;
    let c = summary.c.ok_or_else(|| format!("offsets {:?}", summary.offsets))?;
    ensure(c == 0 || c == 1, || format!("c = {c}"))?;
    ensure(again.offsets == offsets, || format!("rerun offsets {:?} vs {offsets:?}", again.offsets))?;
    Ok(format!("{} pairs, {} compared, offsets {:?}, c = {c}, stable on rerun", summary.pairs, summary.compared, summary.offsets))
}

fn all_vectors(p: u32, len: usize) -> impl Iterator<Item = Vec<u32>> {
    (0..(p as u64).pow(len as u32)).map(move |mut code| {
        (0..len)
            .map(|_| {
                let x = (code % p as u64) as u32;
                code /= p as u64;
                x
            })
            .collect()
    })
}

/// Shifts with `pi(e^-1) = -pi(e)`.
fn inv_vectors(base: &CfiBase, p: u32) -> Vec<Vec<u32>> {
    all_vectors(p, base.edges.len())
        .map(|free| {
            let mut pi = vec![0; 2 * base.edges.len()];
            for (k, &(a, b)) in base.edges.iter().enumerate() {
                pi[base.edge_index(a, b).unwrap()] = free[k];
                pi[base.edge_index(b, a).unwrap()] = (p - free[k]) % p;
            }
            pi
        })
        .collect()
}

type Rels = (BTreeSet<(u32, u32)>, BTreeSet<(u32, u32)>, BTreeSet<[u32; 3]>);

fn relations(s: &CfiStructure) -> Rels {
    (s.c.iter().copied().collect(), s.i.iter().copied().collect(), s.r.iter().copied().collect())
}

fn mapped(s: &CfiStructure, pi: &[u32]) -> Rels {
    let p = s.p;
    let f = |a: u32| (a / p) * p + (a % p + pi[(a / p) as usize]) % p;
    (
        s.c.iter().map(|&(a, b)| (f(a), f(b))).collect(),
        s.i.iter().map(|&(a, b)| (f(a), f(b))).collect(),
        s.r.iter().map(|t| t.map(f)).collect(),
    )
}

fn k4_classes() -> Outcome {
    let base = CfiBase::library("k4").unwrap();
    let mut out = Vec::new();
    for p in [2u32, 3] {
        let structures: Vec<CfiStructure> = all_vectors(p, 4).map(|l| build_cfi(&base, p, &l).unwrap()).collect();
        let shifts = inv_vectors(&base, p);
        let mut reps: Vec<usize> = Vec::new();
        for (i, s) in structures.iter().enumerate() {
            if !reps.iter().any(|&j| cfi_isomorphic(s, &structures[j]).unwrap()) {
                reps.push(i);
            }
        }
        ensure(reps.len() == p as usize, || format!("p={p}: {} classes", reps.len()))?;
        let mut witnessed = 0;
        for &rep in &reps {
            for s in &structures {
                let found = shifts.iter().find(|pi| mapped(&structures[rep], pi) == relations(s));
                ensure(found.is_some() == cfi_isomorphic(&structures[rep], s).unwrap(), || {
                    format!("p={p}: shift search disagrees for load {:?}", s.lambda)
                })?;
                witnessed += found.is_some() as usize;
            }
        }
        ensure(witnessed == structures.len(), || format!("p={p}: {witnessed} loads witnessed"))?;
        out.push(format!("p={p}: {} loads, {} classes", structures.len(), reps.len()));
    }
    Ok(out.join("; ") + "; every in-class pair joined by an explicit shift")
}

fn k4_automorphisms() -> Outcome {
    let base = CfiBase::library("k4").unwrap();
    let m = base.edges.len();
    let mut out = Vec::new();
    for p in [2u32, 3] {
        let dim = automorphism_space(&base, p).unwrap().dimension();
        let s = build_cfi(&base, p, &[0; 4]).unwrap();
        let count = all_vectors(p, 2 * m)
            .filter(|pi| {
                base.edges.iter().all(|&(a, b)| {
                    (pi[base.edge_index(a, b).unwrap()] + pi[base.edge_index(b, a).unwrap()]) % p == 0
                }) && mapped(&s, pi) == relations(&s)
            })
            .count();
        ensure(dim == 3, || format!("p={p}: dimension {dim}"))?;
        ensure(count == (p as usize).pow(3), || format!("p={p}: {count} shift automorphisms"))?;
        out.push(format!("p={p}: dimension {dim}, {count} automorphisms enumerated"));
    }
    Ok(out.join("; "))
}

fn degree_growth_run() -> Outcome {
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    let cfg = DegreeGrowthConfig::default();
    let rows = degree_growth(&cfg, "acceptance").map_err(|e| e.to_string())?;
    let s = summarize_degree_growth(&rows);
    write_report(&dir, "degree_growth", "acceptance", &rows, &s).map_err(|e| e.to_string())?;
    let cells: Vec<String> = rows
        .iter()
        .map(|r| {
            let cleared = r.cleared_degree.map_or("-".to_string(), |c| c.to_string());
            let d = r.min_degree.map_or(format!("{:?} past {cleared}", r.pc_status).to_lowercase(), |d| d.to_string());
            format!("{}={d}", r.base)
        })
        .collect();
    let detail = format!("degrees [{}]", cells.join(", "));
    let largest = rows.last().map(|r| r.base.clone()).unwrap_or_default();
    ensure(!s.control_refuted, || format!("{detail}; control pair refuted"))?;
    ensure(s.non_decreasing, || format!("{detail}; decreasing"))?;
    ensure(s.unfinished.iter().all(|b| *b == largest), || format!("{detail}; unfinished {:?}", s.unfinished))?;
    ensure(s.strict_increase, || format!("{detail}; no strict increase"))?;
    Ok(detail)
}

fn two_coloring() -> Outcome {
    let k2 = RelStructure::undirected_graph(2, &[(0, 1)]).unwrap();
    let mut out = Vec::new();
    for n in 3..=8u32 {
        let edges: Vec<(u32, u32)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let c = RelStructure::undirected_graph(n, &edges).unwrap();
        let hom = brute_force_hom(&c, &k2);
        let consistent = k_consistency(&c, &k2, 3).unwrap();
        let f = encode_kconsistency_cnf(&c, &k2, 3).unwrap();
        let refuted = kres_refutes(&f, 3, None).unwrap();
        ensure(consistent == hom && refuted == !hom, || {
            format!("C{n}: hom {hom}, consistent {consistent}, refuted {refuted}")
        })?;
        out.push(format!("C{n}:{}", if hom { "yes" } else { "no" }));
    }
    Ok(out.join(" "))
}

fn main() {
    let mut run = Run { passed: 0, total: 0 };
    let s = Duration::from_secs;
    run.criterion(1, "Horn resolution vs brute force", s(10), horn_vs_brute_force);
    run.criterion(2, "posLFP model checking via Horn", s(60), lfp_model_checking);
    run.criterion(3, "width-2 resolution vs 2-SAT", s(60), width_two);
    run.criterion(4, "exact linear algebra", s(30), algebra);
    run.criterion(5, "threshold games via MON-PC", s(300), games);
    run.criterion(6, "MON-PC and PC soundness and inclusion", s(300), polynomial_systems);
    run.criterion(7, "WL calibration", s(1800), calibration);
    run.criterion(8, "CFI K4 isomorphism classes", s(60), k4_classes);
    run.criterion(9, "CFI K4 automorphism dimension", s(60), k4_automorphisms);
    run.criterion(10, "CFI degree growth", s(1800), degree_growth_run);
    run.criterion(11, "2-coloring of cycles", s(60), two_coloring);
    println!("{}/{} passed", run.passed, run.total);
}

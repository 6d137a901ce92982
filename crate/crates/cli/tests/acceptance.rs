//! Acceptance criteria 1 to 9, one test each. Every test prints a single
//! `criterion N: PASS|FAIL ...` line straight to stdout so the lines show up
//! even when libtest captures output.

use neatgames_cli::run;
use neatgames_core::bases::find_basis_with_budget;
use neatgames_core::budget::Budget;
use neatgames_core::corpus::random_ca3_frames;
use neatgames_core::fullset::build_full_set_structure;
use neatgames_core::games::{solve_game_with_budget, verify_strategy, GameSpec, Rounds, Variant, Winner};
use neatgames_core::graph::{ef_pebble_game, SimpleGraph};
use neatgames_core::hints::forced_red_labels;
use neatgames_core::ra::{basic_matrices, index_blur, validate_ra_frame, BlurParams, RaAtomStructure};
use neatgames_core::split::{split_reds, theta_check};
use neatgames_core::term::{assignment_from_names, check_inequality, eval_term, parse_term, CheckMode};
use neatgames_core::{validate_ca_frame, CaAtomStructure, RainbowFrame, RainbowSignature};
use serde_json::Value;
use std::collections::BTreeMap;
use std::io::Write;
use std::sync::OnceLock;

const CORPUS_SEED: u64 = 2024;
const CORPUS_SIZE: usize = 50;

const TAU: &str = "c(1, c(0,x) · s(1,0, c(1,y))) · c(1,x) · c(0,y)";
const TAU_3: &str = "c(3, s(3,1, c(3,x)) · s(3,0, c(3,y)))";
/// τ with x, y replaced by c3 x, c3 y.
const TAU_ON_NEAT_REDUCT: &str = "c(1, c(0,c(3,x)) · s(1,0, c(1,c(3,y)))) · c(1,c(3,x)) · c(0,c(3,y))";

fn announce(n: u32, result: &Result<String, String>) {
    let line = match result {
        Ok(detail) => format!("criterion {n}: PASS ({detail})\n"),
        Err(detail) => format!("criterion {n}: FAIL ({detail})\n"),
    };
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

fn settle(n: u32, result: Result<String, String>) {
    announce(n, &result);
    if let Err(e) = result {
        panic!("criterion {n} failed: {e}");
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs the binary's entry point; returns the exit code and the report document.
fn cli(args: &[&str]) -> (i32, String, Option<Value>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["neatgames"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    let text = String::from_utf8(out).unwrap();
    let report = text
        .split_once("--- report\n")
        .and_then(|(_, doc)| serde_json::from_str(doc).ok());
    (code, text + &String::from_utf8(err).unwrap(), report)
}

fn corpus() -> &'static [CaAtomStructure] {
    static CORPUS: OnceLock<Vec<CaAtomStructure>> = OnceLock::new();
    CORPUS.get_or_init(|| random_ca3_frames(CORPUS_SEED, CORPUS_SIZE, 6))
}

fn exists_wins(s: &CaAtomStructure, v: Variant, m: usize, r: Rounds) -> Result<bool, String> {
    let spec = GameSpec::new(v, m, r, s.clone()).map_err(|e| e.to_string())?;
    let o = solve_game_with_budget(&spec, &Budget::unlimited()).map_err(|e| e.to_string())?;
    Ok(o.winner == Winner::Exists)
}

#[test]
fn criterion_1_rainbow_verdict() {
    settle(1, (|| {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let pea = dir.path().join("pea43.json");
        let pea = pea.to_str().unwrap();
        let (code, text, _) = cli(&["rainbow", "--n", "3", "--greens", "4", "--reds", "3", "--out", pea]);
        check(code == 0, || format!("rainbow exited {code}: {text}"))?;

        let (code, text, report) = cli(&["basis", "--in", pea, "--m", "6"]);
        check(code == 0, || format!("basis exited {code}: {text}"))?;
        check(text.contains("no 6-dimensional basis"), || format!("basis said: {text}"))?;
        let verdict = report.as_ref().and_then(|r| r["verdict"].as_str().map(String::from));
        check(verdict.as_deref() == Some("no"), || format!("basis verdict {verdict:?}"))?;

        let (code, text, report) = cli(&["solve", "--in", pea, "--variant", "G", "--m", "6", "--rounds", "omega"]);
        check(code == 0, || format!("solve exited {code}: {text}"))?;
        let d = &report.ok_or("solve printed no report")?["details"];
        check(d["winner"] == "forall", || format!("solve winner {}", d["winner"]))?;
        check(d["verified"] == true, || "certificate not verified".into())?;
        Ok(format!(
            "no 6-dimensional basis; G^6 omega won by forall, {} certificate entries verified",
            d["certificate_entries"]
        ))
    })());
}

#[test]
fn criterion_2_basis_matches_game() {
    settle(2, (|| {
        let frames = corpus();
        check(frames.len() >= CORPUS_SIZE, || format!("only {} frames generated", frames.len()))?;
        let (mut with, mut without) = (0, 0);
        for (f, s) in frames.iter().enumerate() {
            check(s.atom_count() <= 6 && validate_ca_frame(s).is_valid(), || format!("frame {f} malformed"))?;
            for m in 3..=5 {
                let basis = find_basis_with_budget(s, m, &Budget::unlimited())
                    .map_err(|e| format!("frame {f} m={m}: {e}"))?
                    .is_some();
                let game = exists_wins(s, Variant::G, m, Rounds::Omega).map_err(|e| format!("frame {f} m={m}: {e}"))?;
                check(basis == game, || format!("frame {f} m={m}: basis {basis}, exists wins {game}"))?;
                if basis {
                    with += 1;
                } else {
                    without += 1;
                }
            }
        }
        Ok(format!(
            "{} frames x m in 3..=5: {with} with basis and exists winning, {without} with neither",
            frames.len()
        ))
    })());
}

#[test]
fn criterion_3_game_monotonicity() {
    settle(3, (|| {
        let mut checked = 0usize;
        for (f, s) in corpus().iter().enumerate() {
            // rounds: winning k+1 rounds implies winning k; omega implies every k
            for m in 3..=4 {
                let omega = exists_wins(s, Variant::G, m, Rounds::Omega)?;
                let mut prev = true;
                for k in 1..=4 {
                    let now = exists_wins(s, Variant::G, m, Rounds::Finite(k))?;
                    check(prev || !now, || format!("frame {f} G^{m}: wins {k} rounds but not {}", k - 1))?;
                    check(!omega || now, || format!("frame {f} G^{m}: wins omega but not {k} rounds"))?;
                    prev = now;
                    checked += 2;
                }
            }
            // pebbles: winning with m+1 nodes implies winning with m
            for r in [Rounds::Finite(3), Rounds::Omega] {
                let mut prev = true;
                for m in 3..=5 {
                    let now = exists_wins(s, Variant::G, m, r)?;
                    check(prev || !now, || format!("frame {f} rounds {r}: wins G^{m} but not G^{}", m - 1))?;
                    prev = now;
                    checked += 1;
                }
            }
            // F gives forall more moves than G
            for m in 3..=4 {
                for r in [Rounds::Finite(2), Rounds::Finite(4), Rounds::Omega] {
                    let f_win = exists_wins(s, Variant::F, m, r)?;
                    let g_win = exists_wins(s, Variant::G, m, r)?;
                    check(!f_win || g_win, || format!("frame {f} m={m} rounds {r}: exists wins F but not G"))?;
                    checked += 1;
                }
            }
        }
        Ok(format!("{checked} implications on {} frames", corpus().len()))
    })());
}

#[test]
fn criterion_4_term_domination() {
    settle(4, (|| {
        let f44 = build_full_set_structure(4, 4).map_err(|e| e.to_string())?;
        let (lhs, rhs) = (parse_term(TAU_3).unwrap(), parse_term(TAU).unwrap());

        // x and y range over the 3-dimensional neat reduct: atoms c3{a}, c3{b}
        let reduct = parse_term(TAU_ON_NEAT_REDUCT).unwrap();
        let rep = check_inequality(&f44, &lhs, &reduct, CheckMode::AtomsOnly).map_err(|e| e.to_string())?;
        check(rep.checked == 256 * 256, || format!("{} assignments checked", rep.checked))?;
        check(rep.holds, || format!("tau_3 <= tau fails on the neat reduct at {:?}", rep.counterexample))?;

        // over unrestricted x, y the c3-closed left side cannot fit under tau
        let literal = check_inequality(&f44, &lhs, &rhs, CheckMode::AtomsOnly).map_err(|e| e.to_string())?;
        let at_origin = literal
            .counterexample
            .as_ref()
            .is_some_and(|c| c.values().all(|v| v.iter().map(|&a| f44.name(a)).eq(["(0,0,0,0)"])));
        check(!literal.holds && at_origin, || format!("unrestricted form: {literal:?}"))?;

        let f33 = build_full_set_structure(3, 3).map_err(|e| e.to_string())?;
        let vars = BTreeMap::from([
            ("x".to_string(), vec!["(0,1,0)".to_string()]),
            ("y".to_string(), vec!["(1,0,0)".to_string()]),
        ]);
        let env = assignment_from_names(&f33, &vars)?;
        let val = eval_term(&f33, &rhs, &env).map_err(|e| e.to_string())?;
        let names: Vec<&str> = val.iter().map(|a| f33.name(a)).collect();
        check(names == ["(0,0,0)"], || format!("tau on ^3 3 gave {names:?}"))?;
        Ok(
            "tau_3 <= tau on all 65536 atom pairs of the 3-dimensional neat reduct of ^4 4 \
             (unrestricted x=y=(0,0,0,0) is a counterexample); tau({(0,1,0)},{(1,0,0)}) = {(0,0,0)} on ^3 3"
                .into(),
        )
    })());
}

#[test]
fn criterion_5_blow_up_and_blur() {
    settle(5, (|| {
        let base = RainbowFrame::new(RainbowSignature::pea(3, 4, 3)).map_err(|e| e.to_string())?;
        let mut parts = Vec::new();
        for t in [2, 3] {
            let split = split_reds(&base, t).map_err(|e| e.to_string())?;
            let rep = theta_check(&base, &split).map_err(|e| e.to_string())?;
            check(rep.injective, || format!("T={t}: not injective: {:?}", rep.problems))?;
            check(rep.partition, || format!("T={t}: images do not partition: {:?}", rep.problems))?;
            check(rep.lifting, || format!("T={t}: lifting fails: {:?}", rep.problems))?;
            parts.push(format!("T={t}: {} split atoms, {} faces", rep.split_atoms, rep.faces_checked));
        }
        Ok(parts.join("; "))
    })());
}

#[test]
fn criterion_6_monk_matrices() {
    settle(6, (|| {
        let mut parts = Vec::new();
        for name in ["edge", "two-triangles"] {
            let g = SimpleGraph::builtin(name).ok_or(format!("no builtin {name}"))?;
            let ra = RaAtomStructure::monk(&g, 3);
            let rep = validate_ra_frame(&ra);
            check(rep.is_valid(), || format!("alpha({name}) invalid: {rep}"))?;
            let bm = basic_matrices(&ra, 3).map_err(|e| e.to_string())?;
            check(bm.cylindric_basis, || format!("Mat_3(alpha({name})) flag false: {}", bm.report))?;
            let again = validate_ca_frame(&CaAtomStructure::from(bm.frame.clone()));
            check(again.is_valid(), || format!("Mat_3(alpha({name})) fails the CA_3 validator: {again}"))?;
            parts.push(format!("{name}: {} atoms, {} matrices", ra.len(), bm.matrices.len()));
        }
        Ok(parts.join("; "))
    })());
}

#[test]
fn criterion_7_order_restricted_truncation() {
    settle(7, (|| {
        let zn = RainbowFrame::new(RainbowSignature::order_restricted(3, -4, 4, 0, 2)).map_err(|e| e.to_string())?;
        let spec = GameSpec::new(Variant::F, 6, Rounds::Omega, CaAtomStructure::from(zn)).map_err(|e| e.to_string())?;
        let o = solve_game_with_budget(&spec, &Budget::unlimited()).map_err(|e| e.to_string())?;
        check(o.winner == Winner::Forall, || "exists wins F^6".into())?;
        verify_strategy(&spec, &o.certificate)?;
        let labels = forced_red_labels(&spec, &o.certificate).ok_or("no forcing path read from the certificate")?;
        check(labels.windows(2).all(|w| w[0] > w[1]), || format!("red labels {labels:?} not strictly decreasing"))?;
        check(labels.len() >= 2, || format!("red labels {labels:?} too short to decrease"))?;
        // regression value from the first verified run
        check(labels == [2, 1], || format!("red labels {labels:?}, recorded [2, 1]"))?;
        Ok(format!("forall wins F^6 omega, verified; forced red labels {labels:?}"))
    })());
}

#[test]
fn criterion_8_ef_game() {
    settle(8, (|| {
        let (k4, k3) = (SimpleGraph::complete(4), SimpleGraph::complete(3));
        let start = std::time::Instant::now();
        let a = ef_pebble_game(&k4, &k3, 4, 5);
        let b = ef_pebble_game(&k4, &k3, 3, 20);
        let took = start.elapsed();
        check(a == Winner::Forall, || "exists survives 4 pebbles, 5 rounds".into())?;
        check(b == Winner::Exists, || "forall wins with 3 pebbles, 20 rounds".into())?;
        check(took.as_secs_f64() < 1.0, || format!("took {took:?}"))?;
        Ok(format!("4 pebbles/5 rounds forall, 3 pebbles/20 rounds exists, {took:?}"))
    })());
}

/// Brute force over the six orderings of (i, j, k).
fn progression_oracle(i: u64, j: u64, k: u64) -> bool {
    let v = [i as i64, j as i64, k as i64];
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    perms.iter().any(|p| v[p[2]] - v[p[1]] == v[p[1]] - v[p[0]])
}

#[test]
fn criterion_9_blur_structure() {
    settle(9, (|| {
        let p = BlurParams { l: 2, i_size: 6, rows: 3 };
        let ra = RaAtomStructure::blur(&p, false).map_err(|e| e.to_string())?;
        check(ra.len() == 91, || format!("{} atoms", ra.len()))?;
        let rep = validate_ra_frame(&ra);
        check(rep.is_valid(), || format!("blur frame invalid: {rep}"))?;
        let mut agree = 0;
        for i in 0..10 {
            for j in 0..10 {
                for k in 0..10 {
                    check(index_blur(i, j, k) == progression_oracle(i, j, k), || format!("disagree at ({i},{j},{k})"))?;
                    agree += 1;
                }
            }
        }
        Ok(format!("91 atoms, valid, index blur agrees on {agree} triples"))
    })());
}

//! Acceptance suite: one PASS/FAIL line per criterion, each with its time
//! limit. Runs without the libtest harness so the lines always show.

mod common;

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use hopfgraph::corpus;
use hopfgraph::dsl::{parse_graph_source, to_dsl, to_dsl_all};
use hopfgraph::fixtures;
use hopfgraph::graph::{
    canonical_key, commutative_key, contract, divergent_subgraphs, enumerate_all_gluings, extract, insert,
    insert_with_image, is_order_respecting, FeynmanGraph, Site, SubgraphSel, Theory,
};
use hopfgraph::hopf::{rational, CoproductMode, HopfAlgebra};
use hopfgraph::renorm::{
    is_idempotent_on, rota_baxter_holds, FeynmanRules, LaurentSeries, MinimalSubtraction, Projection, Renormalizer,
    Window,
};
use hopfgraph::ribbon::{genus_change, insertion_defect, is_planar_regular, topology};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn criterion(n: usize, title: &str, limit: Duration, body: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body));
    let elapsed = start.elapsed();
    let (ok, detail) = match outcome {
        Ok(Ok(d)) => (true, d),
        Ok(Err(e)) => (false, e),
        Err(p) => (
            false,
            p.downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()),
        ),
    };
    let in_time = elapsed <= limit;
    let verdict = if ok && in_time { "PASS" } else { "FAIL" };
    let late = if in_time { "" } else { ", over the limit" };
    println!(
        "criterion {n}: {verdict}  {title}: {detail} [{:.3} s of {} s{late}]",
        elapsed.as_secs_f64(),
        limit.as_secs_f64()
    );
    ok && in_time
}

fn topology_fixtures() -> Check {
    let tp = topology(&fixtures::tadpole_p()).map_err(|e| e.to_string())?;
    let sn = topology(&fixtures::sunset_n()).map_err(|e| e.to_string())?;
    let tx = topology(&fixtures::tadpole_x()).map_err(|e| e.to_string())?;
    ensure!(tp.g == 0 && tp.broken == 1, "TADPOLE_P gave g={} B={}", tp.g, tp.broken);
    ensure!(sn.g == 1, "SUNSET_N gave g={}", sn.g);
    ensure!(tx.g == 0 && tx.broken == 2, "TADPOLE_X gave g={} B={}", tx.g, tx.broken);
    Ok("TADPOLE_P g=0 B=1, SUNSET_N g=1, TADPOLE_X g=0 B=2".into())
}

fn counting(corpus8: &[FeynmanGraph]) -> Check {
    for g in corpus8 {
        ensure!(
            4 * g.vertex_count() == 2 * g.internal_count() + g.external_count(),
            "4V != 2I + E on {:?}",
            g.name
        );
    }
    let all = fixtures::all();
    let mut insertions = 0;
    for host in &all {
        for guest in all.iter().filter(|g| matches!(g.external_count(), 2 | 4)) {
            let sites: Vec<Site> = if guest.external_count() == 4 {
                (0..host.vertex_count()).map(Site::Vertex).collect()
            } else {
                (0..host.internal_count()).map(Site::Edge).collect()
            };
            for site in sites {
                for gl in enumerate_all_gluings(host, site, guest).map_err(|e| e.to_string())? {
                    let r = insert(host, guest, &gl).map_err(|e| e.to_string())?;
                    let (v1, i1, v2, i2) = (host.vertex_count(), host.internal_count(), guest.vertex_count(), guest.internal_count());
                    let expected = if guest.external_count() == 4 { (v1 + v2 - 1, i1 + i2) } else { (v1 + v2, i1 + i2 + 1) };
                    ensure!(
                        (r.vertex_count(), r.internal_count()) == expected && r.external_count() == host.external_count(),
                        "count law fails for {:?} into {:?}",
                        guest.name,
                        host.name
                    );
                    insertions += 1;
                }
            }
        }
    }
    Ok(format!("{} corpus graphs, {insertions} fixture insertions", corpus8.len()))
}

fn hopf_axioms(corpus6: &[FeynmanGraph]) -> Check {
    for mode in CoproductMode::ALL {
        let alg = HopfAlgebra::new(mode);
        for g in corpus6 {
            let name = g.name.clone().unwrap_or_default();
            let co = alg.check_coassociativity(g).map_err(|e| e.to_string())?;
            ensure!(co.holds, "coassociativity fails on {name} in {mode}: {:?}", co.witness);
            ensure!(alg.check_counit_laws(g).map_err(|e| e.to_string())?, "counit laws fail on {name} in {mode}");
            ensure!(alg.check_antipode_axiom(g).map_err(|e| e.to_string())?, "antipode axiom fails on {name} in {mode}");
            ensure!(alg.check_grading(g).map_err(|e| e.to_string())?, "grading fails on {name} in {mode}");
        }
    }
    Ok(format!("{} graphs in phi4, gw and core", corpus6.len()))
}

fn closure(corpus8: &[FeynmanGraph], corpus6: &[FeynmanGraph]) -> Check {
    let mut cographs = 0;
    for g in corpus8.iter().filter(|g| is_planar_regular(g).unwrap()) {
        for sel in divergent_subgraphs(g, Theory::Gw).map_err(|e| e.to_string())? {
            let q = contract(g, &sel).map_err(|e| e.to_string())?;
            ensure!(is_planar_regular(&q).unwrap(), "cograph of {:?} by {:?} is not planar regular", g.name, sel.edges());
            cographs += 1;
        }
    }

    let regular: Vec<FeynmanGraph> = fixtures::all()
        .into_iter()
        .filter(|g| is_planar_regular(g).unwrap())
        .collect();
    let mut pairs = 0;
    for host in &regular {
        for guest in &regular {
            let sites: Vec<Site> = if guest.external_count() == 4 {
                (0..host.vertex_count()).map(Site::Vertex).collect()
            } else {
                (0..host.internal_count()).map(Site::Edge).collect()
            };
            for site in sites {
                let mut found = false;
                for gl in enumerate_all_gluings(host, site, guest).map_err(|e| e.to_string())? {
                    let n = insertion_defect(host, guest, &gl).map_err(|e| e.to_string())?;
                    let r = insert(host, guest, &gl).map_err(|e| e.to_string())?;
                    if n == 0 && topology(&r).unwrap().broken == 1 {
                        found = true;
                        break;
                    }
                }
                ensure!(found, "no defect-free regular gluing of {:?} into {:?} at {site:?}", guest.name, host.name);
                pairs += 1;
            }
        }
    }

    let guests: Vec<&FeynmanGraph> = corpus6
        .iter()
        .filter(|g| g.external_count() == 4 && is_planar_regular(g).unwrap())
        .collect();
    let (mut gluings, mut negative, mut negative_planar, mut dropped, mut dropped_regular_host, mut dropped_ordered) = (0, 0, 0, 0, 0, 0);
    let mut witness = None;
    for host in corpus6 {
        let b1 = topology(host).unwrap().broken;
        for guest in &guests {
            for v in 0..host.vertex_count() {
                for gl in enumerate_all_gluings(host, Site::Vertex(v), guest).map_err(|e| e.to_string())? {
                    gluings += 1;
                    if genus_change(host, guest, &gl).map_err(|e| e.to_string())? < 0 {
                        negative += 1;
                        negative_planar += usize::from(topology(host).unwrap().g == 0);
                    }
                    let b0 = topology(&insert(host, guest, &gl).map_err(|e| e.to_string())?).unwrap().broken;
                    if b0 < b1 {
                        dropped += 1;
                        dropped_regular_host += usize::from(b1 == 1);
                        dropped_ordered += usize::from(is_order_respecting(host, guest, &gl).unwrap());
                        witness.get_or_insert_with(|| {
                            format!("{:?} into {:?} at v{v} by {:?}: B {b1} -> {b0}", guest.name, host.name, gl.assignment)
                        });
                    }
                }
            }
        }
    }
    let summary = format!(
        "{cographs} regular cographs, {pairs} fixture sites with a defect-free regular gluing, \
         {gluings} regular-guest gluings: {negative} with n < 0 ({negative_planar} on planar hosts), {dropped} with B0 < B1 \
         ({dropped_regular_host} on regular hosts, {dropped_ordered} order-respecting)"
    );
    ensure!(negative == 0 && dropped == 0, "{summary}; first: {}", witness.unwrap_or_default());
    Ok(summary)
}

fn renormalization(corpus6: &[FeynmanGraph]) -> Check {
    let w = Window::default();
    let one = LaurentSeries::one(w);
    let rules = FeynmanRules::toy(w);
    let phi4 = HopfAlgebra::new(CoproductMode::Phi4Renorm);
    let gw = HopfAlgebra::new(CoproductMode::GwRenorm);
    let r4 = Renormalizer::minimal(&phi4, &rules);
    let rg = Renormalizer::minimal(&gw, &rules);
    let b = r4.renormalize(&fixtures::bubble()).map_err(|e| e.to_string())?;
    let c = r4.renormalize(&fixtures::chain()).map_err(|e| e.to_string())?;
    ensure!(b == one && c == one, "phi+(BUBBLE) = {b}, phi+(CHAIN) = {c}");
    for g in corpus6 {
        for (r, theory) in [(&r4, Theory::Phi4), (&rg, Theory::Gw)] {
            let plus = r.renormalize(g).map_err(|e| e.to_string())?;
            ensure!(MinimalSubtraction.project(&plus).is_zero(), "phi+({:?}) = {plus} has poles", g.name);
            let oracle = common::forest_renormalized(g, theory, w);
            ensure!(plus == oracle, "{:?} ({theory:?}): {plus} against forest sum {oracle}", g.name);
        }
    }
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for _ in 0..100 {
        let a = &corpus6[rng.gen_range(0..corpus6.len())];
        let b = &corpus6[rng.gen_range(0..corpus6.len())];
        let u = a.disjoint_union(b);
        if u.loop_number() > 8 {
            let small = &corpus6[rng.gen_range(0..8.min(corpus6.len()))];
            let u = a.disjoint_union(small);
            let joint = common::counterterm_direct(&r4, &phi4, &u).map_err(|e| e.to_string())?;
            let split = r4.twisted_antipode(a).unwrap().mul(&r4.twisted_antipode(small).unwrap()).unwrap();
            ensure!(joint == split, "counterterm of {:?}·{:?} is not multiplicative", a.name, small.name);
            continue;
        }
        let joint = common::counterterm_direct(&r4, &phi4, &u).map_err(|e| e.to_string())?;
        let split = r4.twisted_antipode(a).unwrap().mul(&r4.twisted_antipode(b).unwrap()).unwrap();
        ensure!(joint == split, "counterterm of {:?}·{:?} is not multiplicative", a.name, b.name);
    }
    Ok(format!(
        "BUBBLE and CHAIN renormalize to 1, {} graphs pole-free and equal to the forest sum in phi4 and gw, 100 products",
        corpus6.len()
    ))
}

fn random_series(rng: &mut StdRng, w: Window) -> LaurentSeries {
    let terms: Vec<(i32, hopfgraph::hopf::Rational)> = (0..rng.gen_range(0..6))
        .map(|_| {
            let num = rng.gen_range(-9i64..=9);
            let den = rng.gen_range(1i64..=9);
            (rng.gen_range(-4..=4), rational(num) / rational(den))
        })
        .collect();
    LaurentSeries::from_terms(w, terms).unwrap()
}

fn rota_baxter() -> Check {
    let w = Window::default();
    let mut rng = StdRng::seed_from_u64(0xba5e);
    for i in 0..1000 {
        let a = random_series(&mut rng, w);
        let b = random_series(&mut rng, w);
        ensure!(rota_baxter_holds(&MinimalSubtraction, &a, &b).unwrap(), "pair {i}: {a} and {b}");
        ensure!(is_idempotent_on(&MinimalSubtraction, &a), "T not idempotent on {a}");
    }
    Ok("1000 pairs".into())
}

fn duality(corpus8: &[FeynmanGraph]) -> Check {
    let mut backward = 0;
    for g in corpus8 {
        for sel in divergent_subgraphs(g, Theory::Phi4).map_err(|e| e.to_string())? {
            if sel.components(g).len() != 1 {
                continue;
            }
            let guest = extract(g, &sel);
            let quotient = contract(g, &sel).map_err(|e| e.to_string())?;
            let target = canonical_key(g);
            let sites: Vec<Site> = if guest.external_count() == 4 {
                (0..quotient.vertex_count()).map(Site::Vertex).collect()
            } else {
                (0..quotient.internal_count()).map(Site::Edge).collect()
            };
            let mut found = false;
            'search: for site in sites {
                for gl in enumerate_all_gluings(&quotient, site, &guest).map_err(|e| e.to_string())? {
                    if canonical_key(&insert(&quotient, &guest, &gl).map_err(|e| e.to_string())?) == target {
                        found = true;
                        break 'search;
                    }
                }
            }
            ensure!(found, "{:?} is not rebuilt from {:?} by any gluing", g.name, sel.edges());
            backward += 1;
        }
    }

    let mut forward = 0;
    for host in corpus8 {
        for guest in corpus8 {
            let e2 = guest.external_count();
            if host.internal_count() + guest.internal_count() + usize::from(e2 == 2) > 8 {
                continue;
            }
            let sites: Vec<Site> = if e2 == 4 {
                (0..host.vertex_count()).map(Site::Vertex).collect()
            } else {
                (0..host.internal_count()).map(Site::Edge).collect()
            };
            let (host_r, host_c) = (canonical_key(host), commutative_key(host));
            for site in sites {
                for gl in enumerate_all_gluings(host, site, guest).map_err(|e| e.to_string())? {
                    let (g, image): (FeynmanGraph, SubgraphSel) =
                        insert_with_image(host, guest, &gl).map_err(|e| e.to_string())?;
                    let back = contract(&g, &image).map_err(|e| e.to_string())?;
                    ensure!(commutative_key(&back) == host_c, "contracting {:?} out of {:?} changes the host", guest.name, host.name);
                    if is_order_respecting(host, guest, &gl).map_err(|e| e.to_string())? {
                        ensure!(canonical_key(&back) == host_r, "ribbon host lost after {:?} into {:?}", guest.name, host.name);
                    }
                    forward += 1;
                }
            }
        }
    }
    Ok(format!("{backward} contractions rebuilt by insertion, {forward} insertions contracted back"))
}

const TADPOLE_P: &str = "graph TADPOLE_P {\n  vertex v0;\n  edge e1: v0.0 -- v0.1;\n  ext f1: v0.2;\n  ext f2: v0.3;\n}\n";
const CHAIN: &str = "graph CHAIN {\n  vertex v0; vertex v1; vertex v2;\n  edge e1: v0.0 -- v1.1;\n  edge e2: v0.1 -- v1.0;\n  edge e3: v1.2 -- v2.1;\n  edge e4: v1.3 -- v2.0;\n  ext f1: v0.2; ext f2: v0.3; ext f3: v2.2; ext f4: v2.3;\n}\n";

fn hopfgraph(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hopfgraph"))
        .current_dir(dir)
        .env_remove("HOPFGRAPH_WINDOW")
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn cli(corpus6: &[FeynmanGraph]) -> Check {
    let mut seen = HashSet::new();
    for g in corpus6 {
        let back = parse_graph_source(&to_dsl(g)).map_err(|e| e.to_string())?;
        ensure!(back.len() == 1 && canonical_key(&back[0]) == canonical_key(g), "round trip changes {:?}", g.name);
        seen.insert(canonical_key(g));
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = dir.path();
    std::fs::write(p.join("tadpole_p.g"), TADPOLE_P).unwrap();
    std::fs::write(p.join("chain.g"), CHAIN).unwrap();
    std::fs::write(p.join("corpus.g"), to_dsl_all(&fixtures::all())).unwrap();
    std::fs::write(p.join("generated.g"), to_dsl_all(corpus6)).unwrap();

    let runs: [(&[&str], i32); 4] = [
        (&["classify", "tadpole_p.g"], 0),
        (&["renormalize", "chain.g"], 0),
        (&["check", "corpus.g", "--axioms"], 0),
        (&["canon", "generated.g"], 0),
    ];
    let mut outputs = Vec::new();
    for (args, code) in runs {
        let first = hopfgraph(p, args);
        let second = hopfgraph(p, args);
        ensure!(first.0 == code, "{args:?} exited with {}", first.0);
        ensure!(first == second, "{args:?} differs between runs");
        outputs.push(first.1);
    }
    ensure!(outputs[0] == "{\"V\":1,\"I\":1,\"E\":2,\"F\":2,\"B\":1,\"g\":0}\n", "classify printed {:?}", outputs[0]);
    let renorm: serde_json::Value = serde_json::from_str(&outputs[1]).map_err(|e| e.to_string())?;
    ensure!(renorm == serde_json::json!({"0": "1"}), "renormalize printed {:?}", outputs[1]);
    for (line, g) in outputs[3].lines().zip(corpus6) {
        let v: serde_json::Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
        ensure!(v["ribbon"] == serde_json::json!(canonical_key(g).to_hex()), "canon disagrees on {:?}", g.name);
    }
    ensure!(outputs[3].lines().count() == corpus6.len(), "canon printed {} lines", outputs[3].lines().count());
    Ok(format!("{} graphs round-trip, goldens match, outputs stable across runs", seen.len()))
}

fn main() {
    let start = Instant::now();
    let corpus8 = corpus::generate(8).expect("corpus generation");
    let corpus6: Vec<FeynmanGraph> = corpus8.iter().filter(|g| g.internal_count() <= 6).cloned().collect();
    println!(
        "corpus: {} ribbon classes with I <= 8, {} with I <= 6 ({:.3} s)",
        corpus8.len(),
        corpus6.len(),
        start.elapsed().as_secs_f64()
    );
    let s = Duration::from_secs;
    let results = [
        criterion(1, "fixture topology", s(1), topology_fixtures),
        criterion(2, "counting identities", s(1), || counting(&corpus8)),
        criterion(3, "Hopf axioms on the I <= 6 corpus", s(60), || hopf_axioms(&corpus6)),
        criterion(4, "planar regular closure", s(60), || closure(&corpus8, &corpus6)),
        criterion(5, "renormalization", s(60), || renormalization(&corpus6)),
        criterion(6, "Rota-Baxter and idempotence of MS", s(5), rota_baxter),
        criterion(7, "contraction/insertion duality for I <= 8", s(120), || duality(&corpus8)),
        criterion(8, "CLI round trip, goldens and determinism", s(60), || cli(&corpus6)),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}

//! One test per acceptance criterion. Each prints a single PASS/FAIL line.

use std::io::Write as _;
use std::time::{Duration, Instant};

use filleting::cli::generate::{caterpillar_of, parse_rational};
use filleting::cli::{generate_instance, named_pattern, Instance, Params};
use filleting::engine::{build_columns, build_ladder, find_realization, Mode, Tuning};
use filleting::oracle::{verify_certificate, Certificate};
use filleting::{Graph, Mass, MassedGraph, MassedGraphQ, Rational, VertexSet};

fn report(n: usize, name: &str, ok: bool, detail: &str) {
    let line = format!("criterion {n} ({name}): {} [{detail}]\n", if ok { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(ok, "{line}");
}

fn inst(family: &str, params: &[(&str, &str)]) -> Instance {
    generate_instance(family, &Params::from_pairs(params), 0).unwrap()
}

fn with_edge(mg: &MassedGraphQ, u: usize, v: usize) -> MassedGraphQ {
    let mut g = mg.graph.clone();
    g.ensure_edge(u, v);
    MassedGraph::new(g, mg.mass.clone()).unwrap()
}

fn without_edge(mg: &MassedGraphQ, u: usize, v: usize) -> MassedGraphQ {
    let mut g = mg.graph.clone();
    g.remove_edge(u, v);
    MassedGraph::new(g, mg.mass.clone()).unwrap()
}

/// Moves all the mass of `from` onto `to`.
fn moved_mass(mg: &MassedGraphQ, from: &VertexSet, to: usize) -> MassedGraphQ {
    let mut w: Vec<Rational> = (0..mg.n()).map(|v| mg.mass.weight(v)).collect();
    let total = mg.mu(from);
    for v in from.iter() {
        w[v] = Rational::from_integer(0.into());
    }
    w[to] += total;
    MassedGraph::new(mg.graph.clone(), Mass::weighted(w).unwrap()).unwrap()
}

/// A vertex of `b` with exactly one neighbour in `a`, and that neighbour.
fn lone_link(g: &Graph, a: &VertexSet, b: &VertexSet) -> Option<(usize, usize)> {
    b.iter().find_map(|x| {
        let n = g.neighbours(x).intersection(a);
        (n.len() == 1).then(|| (n.first().unwrap(), x))
    })
}

fn clause(mg: &MassedGraphQ, cert: &Certificate) -> Option<String> {
    verify_certificate(mg, cert).clause
}

#[test]
fn criterion_3_lemma_level_checks() {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut counts = [0usize; 4];
    let mut expect = |what: String, got: Option<String>, want: Option<&str>| {
        if got.as_deref() != want {
            problems.push(format!("{what}: got {got:?}, want {want:?}"));
        }
    };

    for t in ["3", "4"] {
        for size in ["2", "3", "4"] {
            let i = inst("gen-blobs", &[("t", t), ("size", size)]);
            let mg = i.massed().unwrap();
            let eps = i.eps.clone().unwrap();
            let delta = parse_rational(&i.params["delta"]).unwrap();
            let ys: Vec<VertexSet> = (0..1usize << t.parse::<u32>().unwrap())
                .map(|b| mg.graph.set_of(i.blocks[&format!("blob{b}")].iter().copied()))
                .collect();
            let tag = format!("gen-blobs t={t} size={size}");

            for pat in ["path:3", "path:4", "path:5", "cycle:3"] {
                let tr = caterpillar_of(&named_pattern(pat).unwrap()).unwrap();
                let what = format!("{tag} realization {pat}");
                let r = match find_realization(&mg, &tr, &ys, &delta, &eps, Mode::Exploratory, None) {
                    Ok(r) => r,
                    Err(e) => {
                        expect(what, Some(format!("{e:?}")), None);
                        continue;
                    }
                };
                counts[1] += 1;
                let cert = Certificate::realization(&tr, &ys, &r, &delta);
                expect(what.clone(), clause(&mg, &cert), None);
                let n = tr.n();
                let (u, v) = (0..n)
                    .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                    .find(|&(u, v)| !tr.tree.has_edge(u, v))
                    .unwrap();
                let (x, y) = (r.sets[u].first().unwrap(), r.sets[v].first().unwrap());
                let want = format!("X_{u}, X_{v} anticomplete");
                expect(format!("{what} +edge"), clause(&with_edge(&mg, x, y), &cert), Some(&want));
                let head = &r.sets[tr.head];
                let outside = (0..mg.n()).find(|&z| r.sets.iter().all(|s| !s.contains(z))).unwrap();
                expect(
                    format!("{what} mass"),
                    clause(&moved_mass(&mg, head, outside), &cert),
                    Some("head set has mass ≥ δ"),
                );
            }
        }
    }

    // Ladders and columns: the layered ladder-route generator, k = 2..7.
    for pat in ["path:2", "path:3", "path:4", "path:5", "cycle:3", "c4", "cycle:5"] {
        let i = inst("gen-versatile", &[("pattern", pat)]);
        let mg = i.massed().unwrap();
        let k = caterpillar_of(&named_pattern(pat).unwrap()).unwrap().n();
        let tun = Tuning::Exploratory { eps: i.eps.clone().unwrap(), overrides: i.overrides.clone() };
        let c = tun.constants(k).unwrap();
        let what = format!("gen-versatile {pat} ladder k={}", c.k);
        let l = match build_ladder(&mg, c.k, &c.kappa, &c.eps_r, c.mode) {
            Ok(l) => l,
            Err(e) => {
                expect(what, Some(format!("{e:?}")), None);
                continue;
            }
        };
        counts[2] += 1;
        let cert = Certificate::ladder(&l).with("kappa", &c.kappa);
        expect(what.clone(), clause(&mg, &cert), None);
        expect(format!("{what} half-cleaned"), Some(l.half_cleaned.to_string()), Some("true"));
        let (a1, c1) = (l.a[0].first().unwrap(), l.c[0].first().unwrap());
        expect(format!("{what} +edge"), clause(&with_edge(&mg, a1, c1), &cert), Some("A_i anticomplete to C_i"));
        expect(format!("{what} mass"), clause(&moved_mass(&mg, &l.c[0], a1), &cert), Some("μ(C_1) ≥ κ"));
        if let Some((a, b)) = lone_link(&mg.graph, &l.a[0], &l.b[0]) {
            expect(format!("{what} -edge"), clause(&without_edge(&mg, a, b), &cert), Some("A_1 covers B_1"));
        }
        let what = format!("gen-versatile {pat} columns k={}", c.k);
        let cols = match build_columns(&mg, c.k, &c.kappa, &c.eps_r, c.mode) {
            Ok(cols) => cols,
            Err(e) => {
                expect(what, Some(format!("{e:?}")), None);
                continue;
            }
        };
        counts[0] += 1;
        let cert = Certificate::columns(&cols).with("kappa", &c.kappa).with("eps", &c.eps_r);
        expect(what.clone(), clause(&mg, &cert), None);
        let (a1, c0) = (cols.a[0].first().unwrap(), cols.c.first().unwrap());
        expect(format!("{what} +edge"), clause(&with_edge(&mg, a1, c0), &cert), Some("A_1, C anticomplete"));
        expect(format!("{what} mass"), clause(&moved_mass(&mg, &cols.c, a1), &cert), Some("μ(C) ≥ 1 − 3kε"));
        if let Some((a, b)) = lone_link(&mg.graph, &cols.a[0], &cols.b[0]) {
            expect(format!("{what} -edge"), clause(&without_edge(&mg, a, b), &cert), Some("A_1 covers B_1"));
        }
    }

    // The planted blocks of the ladder generator.
    for k in 2..=8 {
        let ks = k.to_string();
        let i = inst("gen-ladder", &[("k", &ks), ("a", "1"), ("b", "1"), ("c", "40"), ("cross", "matching")]);
        let mg = i.massed().unwrap();
        let block = |name: &str| (1..=k).map(|j| i.blocks[&format!("{name}{j}")].clone()).collect::<Vec<_>>();
        let kappa = Rational::new(1.into(), (k as i64).into());
        let cert = Certificate::new(filleting::oracle::Payload::Ladder {
            a: block("A"),
            b: block("B"),
            c: block("C"),
            half_cleaned: false,
        })
        .with("kappa", &kappa);
        let what = format!("gen-ladder k={k} planted");
        expect(what.clone(), clause(&mg, &cert), None);
        let (a1, c1) = (block("A")[0][0], block("C")[0][0]);
        expect(format!("{what} +edge"), clause(&with_edge(&mg, a1, c1), &cert), Some("A_i anticomplete to C_i"));
        counts[3] += 1;
    }

    let secs = start.elapsed();
    let ok = problems.is_empty() && secs < Duration::from_secs(60);
    for p in &problems {
        let _ = std::io::stderr().write_all(format!("  {p}\n").as_bytes());
    }
    report(
        3,
        "lemma-level checks",
        ok,
        &format!(
            "{} columns, {} realizations, {} ladders built, {} planted ladders, {} problems, {:.1}s",
            counts[0],
            counts[1],
            counts[2],
            counts[3],
            problems.len(),
            secs.as_secs_f64()
        ),
    );
}

/// Adjacency bitmasks of every graph on `n` vertices up to isomorphism,
/// grown one vertex at a time and deduplicated by a canonical code.
fn graphs_up_to_iso(max_n: usize) -> Vec<Vec<Vec<u32>>> {
    let mut levels: Vec<Vec<Vec<u32>>> = vec![vec![vec![]]];
    for n in 1..=max_n {
        let mut seen = std::collections::BTreeMap::new();
        for g in &levels[n - 1] {
            for mask in 0u32..1 << (n - 1) {
                let mut adj = g.clone();
                for (v, row) in adj.iter_mut().enumerate() {
                    if mask >> v & 1 == 1 {
                        *row |= 1 << (n - 1);
                    }
                }
                adj.push(mask);
                seen.entry(canonical_code(&adj)).or_insert(adj);
            }
        }
        levels.push(seen.into_values().collect());
    }
    levels
}

/// The largest upper-triangle code over labellings that list vertices by
/// (degree, sorted neighbour degrees), permuting freely within ties.
fn canonical_code(adj: &[u32]) -> u64 {
    let n = adj.len();
    let deg: Vec<u32> = adj.iter().map(|a| a.count_ones()).collect();
    let inv: Vec<(u32, Vec<u32>)> = (0..n)
        .map(|v| {
            let mut d: Vec<u32> = (0..n).filter(|&w| adj[v] >> w & 1 == 1).map(|w| deg[w]).collect();
            d.sort_unstable();
            (deg[v], d)
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| inv[a].cmp(&inv[b]));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match classes.last_mut() {
            Some(c) if inv[c[0]] == inv[v] => c.push(v),
            _ => classes.push(vec![v]),
        }
    }
    fn go(classes: &[Vec<usize>], lab: &mut Vec<usize>, adj: &[u32], best: &mut u64) {
        let Some((first, rest)) = classes.split_first() else {
            let n = lab.len();
            let mut code = 0u64;
            for i in 0..n {
                for j in i + 1..n {
                    code = code << 1 | (adj[lab[i]] >> lab[j] & 1) as u64;
                }
            }
            *best = (*best).max(code);
            return;
        };
        let mut c = first.clone();
        permute(&mut c, 0, &mut |p| {
            let len = lab.len();
            lab.extend_from_slice(p);
            go(rest, lab, adj, best);
            lab.truncate(len);
        });
    }
    fn permute(c: &mut Vec<usize>, i: usize, f: &mut dyn FnMut(&[usize])) {
        if i == c.len() {
            f(c);
            return;
        }
        for j in i..c.len() {
            c.swap(i, j);
            permute(c, i + 1, f);
            c.swap(i, j);
        }
    }
    let mut best = 0;
    go(&classes, &mut Vec::with_capacity(n), adj, &mut best);
    best
}

/// `(ε-coherent, local bullet broken)` by direct enumeration: vertices,
/// open neighbourhoods, then all `3^n` placements into `A`, `B` or neither.
fn coherence_oracle(adj: &[u32], p: usize, q: usize) -> (bool, bool) {
    let n = adj.len();
    let heavy = |size: usize| size * q >= p * n;
    let local = (0..n).any(|v| heavy(1) || heavy(adj[v].count_ones() as usize));
    if local {
        return (false, true);
    }
    let mut place = vec![0u8; n];
    loop {
        let (mut a, mut b) = (0u32, 0u32);
        for (v, &x) in place.iter().enumerate() {
            match x {
                1 => a |= 1 << v,
                2 => b |= 1 << v,
                _ => {}
            }
        }
        let anticomplete = (0..n).all(|v| a >> v & 1 == 0 || adj[v] & b == 0);
        if anticomplete && heavy(a.count_ones() as usize) && heavy(b.count_ones() as usize) {
            return (false, false);
        }
        let Some(i) = place.iter().position(|&x| x < 2) else { break };
        place[i] += 1;
        place[..i].iter_mut().for_each(|x| *x = 0);
    }
    (true, false)
}

#[test]
fn criterion_1_coherence_exactness() {
    use filleting::coherence::{check_coherence, CoherenceConfig, Verdict};
    let start = Instant::now();
    let levels = graphs_up_to_iso(7);
    let counts: Vec<usize> = levels.iter().map(|l| l.len()).collect();
    let mut problems = Vec::new();
    let mut checked = 0;
    let mut violated = 0;
    for level in &levels[1..] {
        for adj in level {
            let n = adj.len();
            let edges: Vec<(usize, usize)> =
                (0..n).flat_map(|u| (u + 1..n).filter(move |&v| adj[u] >> v & 1 == 1).map(move |v| (u, v))).collect();
            let mg = MassedGraph::uniform(Graph::from_edges(n, &edges).unwrap());
            for (p, q) in [(1, 4), (1, 3), (1, 2)] {
                let eps = Rational::new((p as i64).into(), (q as i64).into());
                let verdict = check_coherence(&mg, &eps, None, &CoherenceConfig::default()).unwrap();
                let (coherent, local) = coherence_oracle(adj, p, q);
                checked += 1;
                let agrees = match &verdict {
                    Verdict::Coherent { heuristic } => coherent && !heuristic,
                    Verdict::Violated(v) => {
                        violated += 1;
                        let is_local = matches!(v.kind_name(), "heavy-vertex" | "heavy-neighbourhood");
                        !coherent
                            && is_local == local
                            && verify_certificate(&mg, &Certificate::violation(v, &eps)).ok()
                    }
                };
                if !agrees {
                    problems.push(format!("{edges:?} at ε={eps}: {verdict:?}"));
                }
            }
        }
    }
    let secs = start.elapsed();
    for p in problems.iter().take(10) {
        let _ = std::io::stderr().write_all(format!("  {p}\n").as_bytes());
    }
    let ok = counts == [1, 1, 2, 4, 11, 34, 156, 1044] && problems.is_empty() && secs < Duration::from_secs(30);
    report(
        1,
        "coherence exactness",
        ok,
        &format!(
            "graphs per order {:?}, {checked} checks, {violated} violations verified, {} disagreements, {:.1}s",
            &counts[1..],
            problems.len(),
            secs.as_secs_f64()
        ),
    );
}

struct Run {
    label: String,
    theorem: bool,
    mg: MassedGraphQ,
    pattern: filleting::pattern::Pattern,
    eps: Rational,
    outcome: filleting::engine::FilletingOutcome<Rational>,
}

/// The gnp corpus shared by the soundness and round-trip criteria:
/// `n ∈ {50, 75, …, 300}`, `p = d/n` for `d ∈ 1..=8`, three patterns,
/// both modes, three seeds.
fn gnp_runs() -> &'static [Run] {
    use filleting::engine::find_filleting;
    use filleting::pattern::{derive_caterpillar, hamiltonize};
    use rayon::prelude::*;
    static RUNS: std::sync::OnceLock<Vec<Run>> = std::sync::OnceLock::new();
    RUNS.get_or_init(|| {
        let mut jobs = Vec::new();
        for n in (50..=300).step_by(25) {
            for d in 1..=8 {
                for pat in ["c4", "k4", "k23"] {
                    for theorem in [true, false] {
                        for seed in 0..3u64 {
                            jobs.push((n, d, pat, theorem, seed));
                        }
                    }
                }
            }
        }
        jobs.par_iter()
            .map(|&(n, d, pat, theorem, seed)| {
                let (ns, ps) = (n.to_string(), format!("{d}/{n}"));
                let i = generate_instance("gnp", &Params::from_pairs(&[("n", &ns), ("p", &ps)]), seed).unwrap();
                let mg = i.massed().unwrap();
                let pattern = named_pattern(pat).unwrap();
                let (tuning, eps) = if theorem {
                    let t = derive_caterpillar(&hamiltonize(&pattern).pattern).unwrap().caterpillar.n();
                    (Tuning::Theorem, Tuning::<Rational>::Theorem.constants(t).unwrap().eps)
                } else {
                    let eps = Rational::new(1.into(), [10, 30, 60][seed as usize].into());
                    (Tuning::Exploratory { eps: eps.clone(), overrides: Default::default() }, eps)
                };
                let outcome = find_filleting(&mg, &pattern, &tuning).unwrap();
                let mode = if theorem { "theorem" } else { "exploratory" };
                Run { label: format!("gnp n={n} p={ps} {pat} {mode} seed={seed}"), theorem, mg, pattern, eps, outcome }
            })
            .collect()
    })
}

#[test]
fn criterion_2_certificate_soundness() {
    use filleting::engine::FilletingOutcome;
    let start = Instant::now();
    let runs = gnp_runs();
    let mut kinds = std::collections::BTreeMap::<&str, usize>::new();
    let mut problems = Vec::new();
    for r in runs {
        *kinds.entry(r.outcome.kind_name()).or_default() += 1;
        let cert = match &r.outcome {
            FilletingOutcome::Filleting(f) => Certificate::filleting(&r.pattern, f),
            FilletingOutcome::Violation(v) => Certificate::violation(v, &r.eps),
            FilletingOutcome::Failure(f) => {
                if r.theorem {
                    problems.push(format!("{}: step failure {f:?}", r.label));
                }
                continue;
            }
        };
        let back = Certificate::from_json(&cert.to_json()).unwrap();
        let check = verify_certificate(&r.mg, &back);
        if !check.ok() {
            problems.push(format!("{}: {check}", r.label));
        }
    }
    for p in problems.iter().take(10) {
        let _ = std::io::stderr().write_all(format!("  {p}\n").as_bytes());
    }
    let ok = runs.len() >= 1000 && problems.is_empty();
    report(
        2,
        "certificate soundness",
        ok,
        &format!("{} runs, outcomes {kinds:?}, {} problems, {:.1}s", runs.len(), problems.len(), start.elapsed().as_secs_f64()),
    );
}

/// Re-derives a violation's inequality from raw weights and adjacency.
fn violation_recomputes(mg: &MassedGraphQ, v: &filleting::coherence::Violation<Rational>, eps: &Rational) -> bool {
    use filleting::coherence::Violation;
    let g = &mg.graph;
    let sum = |it: &mut dyn Iterator<Item = usize>| it.fold(Rational::from_integer(0.into()), |s, x| s + mg.mass.weight(x));
    match v {
        Violation::HeavyVertex { v, mass } => sum(&mut std::iter::once(*v)) == *mass && mass >= eps,
        Violation::HeavyNeighbourhood { v, mass } => {
            sum(&mut (0..mg.n()).filter(|&w| g.has_edge(*v, w))) == *mass && mass >= eps
        }
        Violation::HeavyBall { v, r, mass } => {
            let mut dist = vec![usize::MAX; mg.n()];
            dist[*v] = 0;
            let mut queue = std::collections::VecDeque::from([*v]);
            while let Some(x) = queue.pop_front() {
                for y in 0..mg.n() {
                    if g.has_edge(x, y) && dist[y] == usize::MAX && dist[x] < *r {
                        dist[y] = dist[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
            sum(&mut (0..mg.n()).filter(|&w| dist[w] <= *r)) == *mass && mass >= eps
        }
        Violation::AnticompletePair { a, b, mass_a, mass_b } => {
            let (a, b) = (a.to_vec(), b.to_vec());
            a.iter().all(|x| !b.contains(x) && b.iter().all(|&y| !g.has_edge(*x, y)))
                && sum(&mut a.iter().copied()) == *mass_a
                && sum(&mut b.iter().copied()) == *mass_b
                && mass_a >= eps
                && mass_b >= eps
        }
    }
}

#[test]
fn criterion_6_round_trip() {
    use filleting::engine::{find_filleting_with, AlwaysBreak, FilletingOutcome, LazyFocus};
    use filleting::pattern::verify_filleting;
    let mut problems = Vec::new();
    let (mut fillets, mut violations) = (0, 0);
    let mut check = |label: &str, mg: &MassedGraphQ, pat: &filleting::pattern::Pattern, eps: &Rational, out: &FilletingOutcome<Rational>| {
        match out {
            FilletingOutcome::Filleting(f) => {
                fillets += 1;
                let (j, _) = mg.graph.induced_subgraph(&mg.graph.set_of(f.vertices.iter().copied())).unwrap();
                if verify_filleting(&j, pat).is_none() {
                    problems.push(format!("{label}: J is not a filleting"));
                }
            }
            FilletingOutcome::Violation(v) => {
                violations += 1;
                if !violation_recomputes(mg, v, eps) {
                    problems.push(format!("{label}: {v:?} does not recompute"));
                }
            }
            FilletingOutcome::Failure(_) => {}
        }
    };
    for r in gnp_runs() {
        check(&r.label, &r.mg, &r.pattern, &r.eps, &r.outcome);
    }
    let engineered = [
        ("gen-focussed", "c4", false),
        ("gen-focussed", "k4", false),
        ("gen-focussed", "k23", false),
        ("gen-focussed", "w5", false),
        ("gen-versatile", "c4", true),
        ("gen-versatile", "k4", true),
        ("gen-versatile", "k23", true),
    ];
    let mut missing = Vec::new();
    for (family, pat, always_break) in engineered {
        let i = inst(family, &[("pattern", pat)]);
        let mg = i.massed().unwrap();
        let pattern = named_pattern(pat).unwrap();
        let eps = i.eps.clone().unwrap();
        let tuning = Tuning::Exploratory { eps: eps.clone(), overrides: i.overrides.clone() };
        let out = if always_break {
            find_filleting_with(&mg, &pattern, &tuning, &mut AlwaysBreak)
        } else {
            find_filleting_with(&mg, &pattern, &tuning, &mut LazyFocus::default())
        }
        .unwrap();
        let label = format!("{family} {pat}");
        match &out {
            FilletingOutcome::Filleting(_) => {}
            other => missing.push(format!("{label}: expected a filleting, got {}", other.kind_name())),
        }
        check(&label, &mg, &pattern, &eps, &out);
    }
    problems.extend(missing);
    for p in problems.iter().take(10) {
        let _ = std::io::stderr().write_all(format!("  {p}\n").as_bytes());
    }
    report(
        6,
        "round-trip",
        problems.is_empty(),
        &format!("{fillets} filletings re-matched, {violations} violations recomputed, {} problems", problems.len()),
    );
}

#[test]
fn criterion_4_versatility_exhaustiveness() {
    use filleting::engine::{extract_paths, find_versatile_with, AlwaysBreak, FocusOracle, LazyFocus};
    use filleting::pattern::{all_pairings, verify_feasibility};
    let start = Instant::now();
    let cases = [
        ("gen-focussed", "c4"),
        ("gen-focussed", "k4"),
        ("gen-focussed", "k23"),
        ("gen-focussed", "w5"),
        ("gen-versatile", "c4"),
        ("gen-versatile", "k23"),
        ("gen-versatile", "k4"),
    ];
    let mut problems = Vec::new();
    let mut summary = Vec::new();
    for (family, pat) in cases {
        let i = inst(family, &[("pattern", pat)]);
        let mg = i.massed().unwrap();
        let t = caterpillar_of(&named_pattern(pat).unwrap()).unwrap();
        let tuning = Tuning::Exploratory { eps: i.eps.clone().unwrap(), overrides: i.overrides.clone() };
        let c = tuning.constants(t.n()).unwrap();
        let mut oracle: Box<dyn FocusOracle<Rational>> =
            if family == "gen-versatile" { Box::new(AlwaysBreak) } else { Box::new(LazyFocus::default()) };
        let cert = match find_versatile_with(&mg, &t, &c, oracle.as_mut()) {
            Ok(cert) => cert,
            Err(e) => {
                problems.push(format!("{family} {pat}: {e:?}"));
                continue;
            }
        };
        let leaves = t.leaf_list();
        let pairings = all_pairings(&leaves);
        let mut bad = 0;
        for pi in &pairings {
            let host = pi.map(|v| cert.copy.map[v]);
            let ok = match extract_paths(&mg, &cert, pi) {
                Ok(w) => verify_feasibility(&mg.graph, &t, &cert.copy, &host, &w).is_ok(),
                Err(_) => false,
            };
            if !ok {
                bad += 1;
                if bad <= 3 {
                    problems.push(format!("{family} {pat}: pairing {:?} fails", pi.blocks()));
                }
            }
        }
        summary.push(format!("{family} {pat}: {} leaves, {} pairings", leaves.len(), pairings.len()));
        if bad > 3 {
            problems.push(format!("{family} {pat}: {bad} pairings fail in total"));
        }
    }
    let secs = start.elapsed();
    for p in problems.iter().take(10) {
        let _ = std::io::stderr().write_all(format!("  {p}\n").as_bytes());
    }
    let max_leaves_ok = summary.iter().any(|s| s.contains("gen-focussed w5: 10 leaves"));
    report(
        4,
        "versatility exhaustiveness",
        problems.is_empty() && max_leaves_ok && secs < Duration::from_secs(300),
        &format!("{}; {:.1}s", summary.join("; "), secs.as_secs_f64()),
    );
}

fn to_graph(adj: &[u32]) -> Graph {
    let n = adj.len();
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u + 1..n).filter(move |&v| adj[u] >> v & 1 == 1).map(move |v| (u, v))).collect();
    Graph::from_edges(n, &edges).unwrap()
}

/// Every path of `h` as a vertex sequence, one orientation each.
fn paths_of(h: &Graph) -> Vec<Vec<usize>> {
    fn grow(h: &Graph, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if p.len() == 1 || p[0] < *p.last().unwrap() {
            out.push(p.clone());
        }
        let last = *p.last().unwrap();
        for v in 0..h.n() {
            if h.has_edge(last, v) && !p.contains(&v) {
                p.push(v);
                grow(h, p, out);
                p.pop();
            }
        }
    }
    let mut out = Vec::new();
    for v in 0..h.n() {
        grow(h, &mut vec![v], &mut out);
    }
    out
}

#[test]
fn criterion_5_matcher_cross_validation() {
    use filleting::graph::named;
    use filleting::oracle::{search_filleting_bruteforce, BruteOutcome};
    use filleting::pattern::{verify_filleting, Pattern};
    let start = Instant::now();
    let levels = graphs_up_to_iso(8);
    let patterns: Vec<(Vec<usize>, Vec<Pattern>)> = levels[1..=4]
        .iter()
        .flatten()
        .map(|adj| {
            let h = to_graph(adj);
            let mut degs: Vec<usize> = (0..h.n()).map(|v| h.degree(v)).collect();
            degs.sort_unstable();
            let pats = paths_of(&h).into_iter().map(|p| Pattern::new(h.clone(), p).unwrap()).collect();
            (degs, pats)
        })
        .collect();
    let n_pats: usize = patterns.iter().map(|(_, p)| p.len()).sum();
    let mut problems = Vec::new();
    let (mut triples, mut positive) = (0usize, 0usize);
    for level in &levels[1..] {
        for adj in level {
            let g = to_graph(adj);
            let n = g.n();
            // Induced subgraphs of G with their sorted degree sequences.
            let subsets: Vec<(Vec<usize>, Graph)> = (1u32..1 << n)
                .map(|mask| {
                    let s = g.set_of((0..n).filter(|&v| mask >> v & 1 == 1));
                    let (j, _) = g.induced_subgraph(&s).unwrap();
                    let mut degs: Vec<usize> = (0..j.n()).map(|v| j.degree(v)).collect();
                    degs.sort_unstable();
                    (degs, j)
                })
                .collect();
            for (hdeg, pats) in &patterns {
                // Subdividing adds degree-2 vertices and leaves the rest alone.
                let candidates: Vec<&Graph> = subsets
                    .iter()
                    .filter(|(d, _)| {
                        d.len() >= hdeg.len() && {
                            let mut want = hdeg.clone();
                            want.resize(d.len(), 2);
                            want.sort_unstable();
                            *d == want
                        }
                    })
                    .map(|(_, j)| j)
                    .collect();
                for pat in pats {
                    triples += 1;
                    let by_matcher = candidates.iter().any(|j| verify_filleting(j, pat).is_some());
                    let by_search = match search_filleting_bruteforce(&g, pat, 1 << 22) {
                        BruteOutcome::Found { value } => {
                            let (j, _) = g.induced_subgraph(&g.set_of(value.vertices.iter().copied())).unwrap();
                            if verify_filleting(&j, pat).is_none() {
                                problems.push(format!("G={:?} H={:?} P={:?}: search output rejected", g.edges(), pat.h.edges(), pat.path));
                            }
                            true
                        }
                        BruteOutcome::None => false,
                        BruteOutcome::Exhausted { .. } => {
                            problems.push(format!("G={:?} P={:?}: budget exhausted", g.edges(), pat.path));
                            continue;
                        }
                    };
                    positive += by_search as usize;
                    if by_matcher != by_search {
                        problems.push(format!(
                            "G={:?} H={:?} P={:?}: matcher {by_matcher}, search {by_search}",
                            g.edges(),
                            pat.h.edges(),
                            pat.path
                        ));
                    }
                }
            }
        }
    }
    let c4 = Pattern::hamiltonian(named::cycle(4)).unwrap();
    let c10 = matches!(search_filleting_bruteforce(&named::cycle(10), &c4, 1 << 22), BruteOutcome::Found { .. })
        && verify_filleting(&named::cycle(10), &c4).is_some();
    let k4 = matches!(search_filleting_bruteforce(&named::complete(4), &c4, 1 << 22), BruteOutcome::None)
        && verify_filleting(&named::complete(4), &c4).is_none();
    if !c10 {
        problems.push("C10 should contain a C4 filleting".into());
    }
    if !k4 {
        problems.push("K4 should not contain a C4 filleting".into());
    }
    let secs = start.elapsed();
    for p in problems.iter().take(10) {
        let _ = std::io::stderr().write_all(format!("  {p}\n").as_bytes());
    }
    report(
        5,
        "filleting matcher cross-validation",
        problems.is_empty() && secs < Duration::from_secs(600),
        &format!(
            "{} host graphs, {n_pats} patterns, {triples} triples, {positive} positive, {} disagreements, {:.1}s",
            levels[1..].iter().map(|l| l.len()).sum::<usize>(),
            problems.len(),
            secs.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_7_eh_recursion() {
    use filleting::graph::named;
    use filleting::oracle::{clique_and_stable_exact, BruteOutcome};
    use filleting::reduction::{eh_recursion, exact_base, rodl_split_heuristic, EhConfig};
    let start = Instant::now();
    let q = |n: i64, d: i64| Rational::new(n.into(), d.into());
    let base = exact_base(1 << 22);
    let split = |g: &Graph, e: &Rational| rodl_split_heuristic(g, e, 4);
    let mut cases: Vec<(String, Graph, Option<usize>)> = vec![
        ("2K3".into(), named::cliques_union(2, 3), Some(6)),
        ("C5".into(), named::cycle(5), Some(4)),
    ];
    for n in 1..=60 {
        cases.push((format!("empty {n}"), Graph::new(n), Some(n)));
        cases.push((format!("complete {n}"), named::complete(n), Some(n)));
    }
    let mut problems = Vec::new();
    let mut runs = 0;
    for (name, g, known) in &cases {
        let exact = match clique_and_stable_exact(g, 1 << 24).unwrap() {
            BruteOutcome::Found { value } => value.clique.len() * value.stable.len(),
            other => {
                problems.push(format!("{name}: exact solver gave {other:?}"));
                continue;
            }
        };
        if Some(exact) != *known {
            problems.push(format!("{name}: exact product {exact}, expected {known:?}"));
        }
        for (n0, eps) in [(40, q(1, 4)), (2, q(1, 3))] {
            runs += 1;
            let cfg = EhConfig { n0, ..EhConfig::default() };
            let r = eh_recursion(g, &eps, &q(1, 2), &base, &split, &cfg).unwrap();
            let clique = r.clique.iter().all(|&u| r.clique.iter().all(|&v| u == v || g.has_edge(u, v)));
            let stable = r.stable.iter().all(|&u| r.stable.iter().all(|&v| !g.has_edge(u, v)));
            let distinct = |s: &[usize]| s.iter().collect::<std::collections::BTreeSet<_>>().len() == s.len();
            let in_range = r.clique.iter().chain(&r.stable).all(|&v| v < g.n());
            if !(clique && stable && in_range && distinct(&r.clique) && distinct(&r.stable)) {
                problems.push(format!("{name} n0={n0}: witnesses do not verify"));
            }
            let product = r.clique.len() * r.stable.len();
            if product != exact {
                problems.push(format!("{name} n0={n0}: ω·α = {product}, exact {exact}"));
            }
        }
    }
    let secs = start.elapsed();
    for p in problems.iter().take(10) {
        let _ = std::io::stderr().write_all(format!("  {p}\n").as_bytes());
    }
    report(
        7,
        "EH recursion",
        problems.is_empty() && secs < Duration::from_secs(60),
        &format!("{} graphs, {runs} runs, {} problems, {:.1}s", cases.len(), problems.len(), secs.as_secs_f64()),
    );
}

#[test]
fn criterion_8_constants_plumbing() {
    use num_bigint::BigInt;
    let int = |x: usize| Rational::from_integer(BigInt::from(x));
    let two_pow = |e: usize| Rational::from_integer(BigInt::from(2).pow(e as u32));
    let one = int(1);
    let mut problems = Vec::new();
    for t in 3..=5usize {
        let c = Tuning::<Rational>::Theorem.constants(t).unwrap();
        let k = 1usize << t;
        let tt = Rational::from_integer(BigInt::from(t).pow(t as u32));
        let base = one.clone() / (two_pow(t + k) * tt.clone());
        let mut need = |ok: bool, what: &str| {
            if !ok {
                problems.push(format!("|T|={t}: {what}"));
            }
        };
        need(c.k == k && c.r == 5 * k && c.focus_radius == c.r + 1, "k = 2^t, r = 5k, focus radius r + 1");
        // The ladder route, run at ε_r.
        let ladder = int(k - 1) * int(k) * (two_pow(k) * int(3 * k + 2) + int(1)) * c.eps_r.clone();
        need(ladder <= one, "(k−1)k(2^k(3k+2)+1)ε_r ≤ 1");
        // The focus route, run at the focus radius r + 1.
        need(c.delta <= base, "δ ≤ 2^{−(t+2^t)} t^{−t}");
        let rho = c.focus_radius;
        need(c.eps <= base.clone() / (tt.clone() * int(3 * rho + 5)), "ε ≤ 2^{−(t+2^t)} t^{−2t} (3r+5)^{−1}");
        need(c.eps.clone() * int(2) <= c.delta, "ε ≤ δ/2");
        // Gluing the two routes.
        need(c.eps_r <= one.clone() / (tt.clone() * int(3 * c.r + 5)), "ε_r ≤ t^{−t} (3r+5)^{−1}");
        need(c.eps <= base.clone() * c.eps_r.clone(), "ε ≤ 2^{−(t+2^t)} t^{−t} ε_r");
        need(c.delta == c.eps.clone() / c.eps_r.clone(), "δ = ε/ε_r");
        // The ladder the big-radius route asks for.
        need(c.kappa == two_pow(k) * int(3 * k + 2) * c.eps_r.clone(), "κ = 2^k(3k+2)ε_r");
        let ke = c.kappa.clone() + c.eps_r.clone();
        need(int(k - 1) * int(k) * ke.clone() <= one, "(k−1)k(κ+ε_r) ≤ 1");
        need(int(k - 1) * ke + int(4) * c.eps_r.clone() <= one, "(k−1)(κ+ε_r)+4ε_r ≤ 1");
        need(c.lambda == one.clone() / int(k) - c.eps.clone(), "λ = 1/k − ε");
        let m = filleting::engine::schedule(&c.delta, &c.eps, 3);
        need(m == two_pow(3) * (c.delta.clone() + c.eps.clone()) - c.eps.clone(), "m_i = 2^i(δ+ε) − ε");
    }
    for p in &problems {
        let _ = std::io::stderr().write_all(format!("  {p}\n").as_bytes());
    }
    report(8, "constants plumbing", problems.is_empty(), &format!("|T| ∈ {{3, 4, 5}}, 13 relations each, {} broken", problems.len()));
}

#[test]
fn criterion_9_determinism() {
    let bin = |args: &[&str]| {
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_filleting")).args(args).output().unwrap();
        (out.status.code(), out.stdout)
    };
    let dir = tempfile::tempdir().unwrap();
    let point = dir.path().join("point.txt");
    std::fs::write(&point, "p 3 2\ne 0 1\ne 1 2\nw 1/2 1/4 1/4\n").unwrap();
    let point = point.to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["find", "--input", point, "--pattern", "c4"],
        vec!["find", "--family", "gnp", "--param", "n=120", "--param", "p=3/120", "--seed", "5", "--pattern", "k23"],
        vec!["find", "--family", "gnp", "--param", "n=200", "--param", "p=1/200", "--pattern", "c4", "--mode", "exploratory", "--epsilon", "1/10"],
        vec!["find", "--family", "gen-focussed", "--param", "pattern=k4", "--pattern", "k4", "--mode", "exploratory"],
        vec!["find", "--family", "gen-versatile", "--param", "pattern=k23", "--pattern", "k23", "--mode", "exploratory", "--always-break"],
        vec!["coherence", "--family", "gnp", "--param", "n=30", "--param", "p=1/5", "--seed", "2", "--epsilon", "1/4"],
        vec!["eh", "--family", "gnp", "--param", "n=50", "--param", "p=1/2", "--seed", "3"],
        vec!["gen", "gen-ladder", "--param", "k=3"],
        vec!["experiment", "--n", "50,80", "--d", "1,3,6", "--epsilon", "1/10,1/30", "--seeds", "4", "--pattern", "c4,k23"],
        vec!["experiment", "--n", "60", "--d", "2,4", "--seeds", "3", "--mode", "theorem", "--format", "json"],
    ];
    let mut problems = Vec::new();
    let mut bytes = 0;
    for args in &cases {
        let (a, b) = (bin(args), bin(args));
        bytes += a.1.len();
        if a.0 != Some(0) && a.0 != Some(2) {
            problems.push(format!("{}: exit {:?}", args.join(" "), a.0));
        }
        if a.1.is_empty() || a != b {
            problems.push(format!("{}: outputs differ or are empty", args.join(" ")));
        }
    }
    for p in &problems {
        let _ = std::io::stderr().write_all(format!("  {p}\n").as_bytes());
    }
    report(
        9,
        "determinism",
        problems.is_empty(),
        &format!("{} commands run twice, {bytes} bytes compared, {} differences", cases.len(), problems.len()),
    );
}

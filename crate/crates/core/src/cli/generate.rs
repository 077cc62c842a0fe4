//! Instance generators. Every family is deterministic in its parameters
//! and seed; the structured families also report the exploratory
//! thresholds at which the engine is meant to run on them.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::Overrides;
use crate::error::{Error, Result};
use crate::graph::{named, Graph};
use crate::mass::{Mass, MassedGraph};
use crate::scalar::Scalar;
use crate::pattern::{ancestors, derive_caterpillar, hamiltonize, Pattern, RootedCaterpillar};
use crate::{MassedGraphQ, Rational};

/// A generated graph with its mass and the parameters it was built from.
#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: Graph,
    /// `None` means uniform.
    pub weights: Option<Vec<Rational>>,
    /// Exploratory `ε` the instance is built for.
    pub eps: Option<Rational>,
    pub overrides: Overrides<Rational>,
    /// Every parameter that determines the instance, including defaults.
    pub params: BTreeMap<String, String>,
    /// Named vertex blocks of the construction (columns, bands, blobs).
    pub blocks: BTreeMap<String, Vec<usize>>,
}

impl Instance {
    fn plain(graph: Graph, params: BTreeMap<String, String>) -> Self {
        Instance { graph, weights: None, eps: None, overrides: Overrides::default(), params, blocks: BTreeMap::new() }
    }

    pub fn massed(&self) -> Result<MassedGraphQ> {
        match &self.weights {
            None => Ok(MassedGraph::uniform(self.graph.clone())),
            Some(w) => MassedGraph::new(self.graph.clone(), Mass::weighted(w.clone())?),
        }
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn qu(n: usize) -> Rational {
    Rational::from_integer(n.into())
}

/// Reads parameters of the form `key=value`.
#[derive(Clone, Debug, Default)]
pub struct Params {
    map: BTreeMap<String, String>,
    used: BTreeMap<String, String>,
}

impl Params {
    pub fn parse(items: &[String]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for item in items {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("parameter `{item}` is not key=value")))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Params { map, used: BTreeMap::new() })
    }

    pub fn from_pairs(pairs: &[(&str, &str)]) -> Self {
        let map = pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        Params { map, used: BTreeMap::new() }
    }

    fn usize(&mut self, key: &str, default: usize) -> Result<usize> {
        let v = match self.map.get(key) {
            Some(s) => s.parse().map_err(|_| Error::Invalid(format!("`{key}` must be a nonnegative integer")))?,
            None => default,
        };
        self.used.insert(key.into(), v.to_string());
        Ok(v)
    }

    fn rational(&mut self, key: &str, default: Rational) -> Result<Rational> {
        let v = match self.map.get(key) {
            Some(s) => parse_rational(s).ok_or_else(|| Error::Invalid(format!("`{key}` must be a rational")))?,
            None => default,
        };
        self.used.insert(key.into(), v.to_string());
        Ok(v)
    }

    fn text(&mut self, key: &str, default: &str) -> String {
        let v = self.map.get(key).cloned().unwrap_or_else(|| default.to_string());
        self.used.insert(key.into(), v.clone());
        v
    }

    fn finish(self, family: &str, seed: u64) -> Result<BTreeMap<String, String>> {
        if let Some(k) = self.map.keys().find(|k| !self.used.contains_key(*k)) {
            return Err(Error::Invalid(format!("unknown parameter `{k}` for {family}")));
        }
        let mut out = self.used;
        out.insert("family".into(), family.into());
        out.insert("seed".into(), seed.to_string());
        Ok(out)
    }
}

/// `3/4`, `7` or a terminating decimal such as `0.25`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('.') {
        if b.is_empty() || !b.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let whole: num_bigint::BigInt = format!("{a}{b}").parse().ok()?;
        let denom = num_bigint::BigInt::from(10u32).pow(b.len() as u32);
        return Some(Rational::new(whole, denom));
    }
    s.parse().ok()
}

/// Families understood by [`generate_instance`].
pub const FAMILIES: &[&str] = &[
    "gnp",
    "cliques-union",
    "cycle",
    "path",
    "complete",
    "complete-bipartite",
    "gen-ladder",
    "gen-blobs",
    "gen-versatile",
    "gen-focussed",
];

pub fn generate_instance(family: &str, params: &Params, seed: u64) -> Result<Instance> {
    let mut p = params.clone();
    let inst = match family {
        "gnp" => {
            let n = p.usize("n", 50)?;
            let prob = p.rational("p", q(1, 10))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pf = Scalar::approx(&prob);
            let mut g = Graph::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen::<f64>() < pf {
                        g.ensure_edge(u, v);
                    }
                }
            }
            Instance::plain(g, BTreeMap::new())
        }
        "cliques-union" => {
            let k = p.usize("k", 2)?;
            let size = p.usize("size", 3)?;
            Instance::plain(named::cliques_union(k, size), BTreeMap::new())
        }
        "cycle" => Instance::plain(named::cycle(p.usize("n", 5)?), BTreeMap::new()),
        "path" => Instance::plain(named::path(p.usize("n", 5)?), BTreeMap::new()),
        "complete" => Instance::plain(named::complete(p.usize("n", 4)?), BTreeMap::new()),
        "complete-bipartite" => {
            let a = p.usize("a", 2)?;
            let b = p.usize("b", 3)?;
            Instance::plain(named::complete_bipartite(a, b), BTreeMap::new())
        }
        "gen-ladder" => gen_ladder(&mut p)?,
        "gen-blobs" => gen_blobs(&mut p)?,
        "gen-versatile" => gen_versatile(&mut p)?,
        "gen-focussed" => gen_focussed(&mut p)?,
        other => return Err(Error::Invalid(format!("unknown family `{other}`"))),
    };
    let mut inst = inst;
    let mut echo = p.finish(family, seed)?;
    echo.append(&mut inst.params);
    inst.params = echo;
    Ok(inst)
}

/// Named patterns: `cycle:n`, `path:n`, `complete:n`, `wheel:n`, `c4`, `k4`,
/// `w5` and `k23` (with the path `2 0 3 1 4`).
pub fn named_pattern(name: &str) -> Result<Pattern> {
    let lower = name.to_ascii_lowercase();
    let (kind, n) = match lower.split_once(':') {
        Some((k, n)) => (k.to_string(), n.parse::<usize>().map_err(|_| Error::Invalid(format!("bad pattern `{name}`")))?),
        None => match lower.as_str() {
            "c4" => ("cycle".into(), 4),
            "k4" => ("complete".into(), 4),
            "w5" => return Pattern::new(wheel(5), (0..6).collect()),
            "k23" => return Pattern::new(named::complete_bipartite(2, 3), vec![2, 0, 3, 1, 4]),
            _ => return Err(Error::Invalid(format!("unknown pattern `{name}`"))),
        },
    };
    match kind.as_str() {
        "cycle" => Pattern::hamiltonian(named::cycle(n)),
        "path" => Pattern::hamiltonian(named::path(n)),
        "complete" => Pattern::hamiltonian(named::complete(n)),
        "wheel" => Pattern::new(wheel(n), (0..=n).collect()),
        _ => Err(Error::Invalid(format!("unknown pattern `{name}`"))),
    }
}

/// Hub 0 joined to the cycle `1, …, n`.
fn wheel(n: usize) -> Graph {
    let mut g = Graph::new(n + 1);
    for i in 1..=n {
        g.ensure_edge(0, i);
        g.ensure_edge(i, if i == n { 1 } else { i + 1 });
    }
    g
}

/// The caterpillar the engine derives from a pattern.
pub fn caterpillar_of(pat: &Pattern) -> Result<RootedCaterpillar> {
    Ok(derive_caterpillar(&hamiltonize(pat).pattern)?.caterpillar)
}

/// Column order in which the nursery merges the tree of `t` one vertex at
/// a time: vertices added as leaves in order of addition, then the root of
/// the ancestor chain, then vertices added as new heads.
pub fn nursery_order(t: &RootedCaterpillar) -> Vec<usize> {
    let anc = ancestors(t);
    let mut leaves = Vec::new();
    let mut heads = Vec::new();
    for w in anc.windows(2) {
        let added = w[1].added.expect("every later ancestor adds a vertex");
        if w[1].head == w[0].head {
            leaves.push(added);
        } else {
            heads.push(added);
        }
    }
    leaves.push(anc[0].head);
    leaves.extend(heads);
    leaves
}

/// An explicit `k`-ladder. Column `i` has a path `A_i` of `a` vertices,
/// `B_i` of `b` vertices (vertex `y` adjacent to `A_i[y mod a]`) and
/// `C_i` of `c` vertices (vertex `x` adjacent to `B_i[x mod b]`).
///
/// `cross=matching` joins `C_i[x]` to `C_j[x]` for all `i ≠ j`;
/// `cross=none` adds no cross edges. `cut=i-j` (1-based) removes the cross
/// edges between `C_i` and `C_j`. All mass sits uniformly on the `C`
/// blocks.
fn gen_ladder(p: &mut Params) -> Result<Instance> {
    let k = p.usize("k", 4)?;
    let a = p.usize("a", 1)?;
    let c = p.usize("c", 40)?;
    let b = p.usize("b", c)?;
    let cross = p.text("cross", "matching");
    let cut = p.text("cut", "");
    if k == 0 || a == 0 || b == 0 || c == 0 {
        return Err(Error::Invalid("k, a, b and c must be positive".into()));
    }
    let col = a + b + c;
    let av = |i: usize, y: usize| i * col + y;
    let bv = |i: usize, y: usize| i * col + a + y;
    let cv = |i: usize, x: usize| i * col + a + b + x;
    let mut g = Graph::new(k * col);
    for i in 0..k {
        for y in 1..a {
            g.ensure_edge(av(i, y - 1), av(i, y));
        }
        for y in 0..b {
            g.ensure_edge(bv(i, y), av(i, y % a));
        }
        for x in 0..c {
            g.ensure_edge(cv(i, x), bv(i, x % b));
        }
    }
    match cross.as_str() {
        "matching" => {
            for i in 0..k {
                for j in i + 1..k {
                    for x in 0..c {
                        g.ensure_edge(cv(i, x), cv(j, x));
                    }
                }
            }
        }
        "none" => {}
        other => return Err(Error::Invalid(format!("unknown cross wiring `{other}`"))),
    }
    if !cut.is_empty() {
        let (i, j) = cut
            .split_once('-')
            .and_then(|(x, y)| Some((x.parse::<usize>().ok()?, y.parse::<usize>().ok()?)))
            .filter(|&(i, j)| i >= 1 && j >= 1 && i <= k && j <= k && i != j)
            .ok_or_else(|| Error::Invalid(format!("`cut` must be i-j with distinct columns in 1..={k}")))?;
        for x in 0..c {
            g.remove_edge(cv(i - 1, x), cv(j - 1, x));
        }
    }
    let mut w = vec![Rational::zero(); k * col];
    for i in 0..k {
        for x in 0..c {
            w[cv(i, x)] = qu(k * c).recip();
        }
    }
    let mut inst = Instance::plain(g, BTreeMap::new());
    inst.weights = Some(w);
    // Largest ε with μ(C_i) ≥ 3kε.
    let eps = q(1, (3 * k * k) as i64);
    inst.eps = Some(eps.clone());
    inst.params.insert("eps".into(), eps.to_string());
    for i in 0..k {
        inst.blocks.insert(format!("A{}", i + 1), (0..a).map(|y| av(i, y)).collect());
        inst.blocks.insert(format!("B{}", i + 1), (0..b).map(|y| bv(i, y)).collect());
        inst.blocks.insert(format!("C{}", i + 1), (0..c).map(|x| cv(i, x)).collect());
    }
    Ok(inst)
}

/// `2^t` blobs, each a path on `size` vertices, uniform mass, with blob `i`
/// complete to blob `i + 1` and no other edges between blobs. With `cut=i`
/// the wiring between blobs `i` and `i + 1` is left out.
///
/// Two anticomplete sets are heaviest when they split the chain of blobs
/// around one blob, so the reported `ε` sits just above
/// `⌊(2^t − 1)/2⌋ / 2^t`; `delta` is half a blob.
fn gen_blobs(p: &mut Params) -> Result<Instance> {
    let t = p.usize("t", 3)?;
    let size = p.usize("size", 4)?;
    let cut = p.usize("cut", usize::MAX)?;
    if t == 0 || t > 12 || size == 0 {
        return Err(Error::Invalid("need 1 ≤ t ≤ 12 and size ≥ 1".into()));
    }
    let blobs = 1usize << t;
    let n = blobs * size;
    let mut g = Graph::new(n);
    for i in 0..blobs {
        for x in 1..size {
            g.ensure_edge(i * size + x - 1, i * size + x);
        }
        if i == cut || i + 1 == blobs {
            continue;
        }
        let j = (i + 1) % blobs;
        for x in 0..size {
            for y in 0..size {
                g.ensure_edge(i * size + x, j * size + y);
            }
        }
    }
    let mut inst = Instance::plain(g, BTreeMap::new());
    let split = ((blobs - 1) / 2 * size).max(2 * size + 2);
    let eps = p.rational("eps", q(split as i64 + 1, n as i64))?;
    let delta = q(1, 2 * blobs as i64);
    inst.eps = Some(eps.clone());
    inst.params.insert("eps".into(), eps.to_string());
    inst.params.insert("delta".into(), delta.to_string());
    for i in 0..blobs {
        inst.blocks.insert(format!("blob{i}"), (i * size..(i + 1) * size).collect());
    }
    Ok(inst)
}

/// Hub-and-spoke blocks for the focus route, one per tree vertex in the
/// nursery order, followed by a path carrying the remaining mass.
///
/// Block `v` is a hub `h_v` adjacent to the whole block, zone cells, tail
/// cells and an inner centre `g_v` adjacent to everything in the block
/// but the hub. Hubs and zone cells at equal offsets are matched along
/// tree edges. A leaf block has one tail cell per other leaf, and each
/// pair of leaves has exactly one edge between their tails. Every block
/// has mass `λ = 1/k − ε` with `λ < ε`, so each set the run queries has
/// a heavy ball of radius one.
fn gen_focussed(p: &mut Params) -> Result<Instance> {
    let pat = named_pattern(&p.text("pattern", "c4"))?;
    let t = caterpillar_of(&pat)?;
    let k = t.n();
    let leaves = t.leaf_list();
    let zone = p.usize("zone", 8)?.max(1);
    let tail = leaves.len().saturating_sub(1).max(1);
    let eps = q(3, 4 * k as i64);
    let lambda = q(1, 4 * k as i64);
    let order = nursery_order(&t);
    let block = zone + tail + 2;
    let reservoir = 4 * k;
    let n = k * block + reservoir;
    let hub = |col: usize| col * block;
    let zc = |col: usize, o: usize| col * block + 1 + o;
    let tc = |col: usize, o: usize| col * block + 1 + zone + o;
    let inner = |col: usize| col * block + block - 1;
    let mut g = Graph::new(n);
    let mut w = vec![Rational::zero(); n];
    let mut col_of = vec![0; k];
    for (col, &v) in order.iter().enumerate() {
        col_of[v] = col;
        w[hub(col)] = lambda.clone() / qu(8);
        w[inner(col)] = lambda.clone() / qu(8);
        for o in 0..zone {
            w[zc(col, o)] = lambda.clone() / qu(2 * zone);
        }
        for o in 0..tail {
            w[tc(col, o)] = lambda.clone() / qu(4 * tail);
        }
        for x in hub(col) + 1..hub(col) + block {
            g.ensure_edge(hub(col), x);
        }
        for x in hub(col) + 1..inner(col) {
            g.ensure_edge(x, inner(col));
        }
    }
    for (u, v) in t.tree.edges() {
        let (cu, cv) = (col_of[u], col_of[v]);
        g.ensure_edge(hub(cu), hub(cv));
        for o in 0..zone {
            g.ensure_edge(zc(cu, o), zc(cv, o));
        }
    }
    let leaf_cols: Vec<usize> = leaves.iter().map(|&v| col_of[v]).collect();
    for (x, &cu) in leaf_cols.iter().enumerate() {
        for (y, &cv) in leaf_cols.iter().enumerate().skip(x + 1) {
            // Leaf x's cell for y and leaf y's cell for x.
            g.ensure_edge(tc(cu, y - 1), tc(cv, x));
        }
    }
    let r0 = k * block;
    for x in 0..reservoir {
        w[r0 + x] = qu(k) * eps.clone() / qu(reservoir);
        if x > 0 {
            g.ensure_edge(r0 + x - 1, r0 + x);
        }
    }
    debug_assert!(w.iter().fold(Rational::zero(), |a, x| a + x).is_one());

    let mut inst = Instance::plain(g, BTreeMap::new());
    inst.weights = Some(w);
    inst.eps = Some(eps.clone());
    inst.overrides = Overrides {
        columns: Some(k),
        focus_radius: Some(1),
        delta: Some(lambda.clone() / qu(2)),
        focus_kappa: Some(lambda.clone() / qu(4)),
        ..Overrides::default()
    };
    inst.params.insert("columns".into(), k.to_string());
    inst.params.insert("eps".into(), eps.to_string());
    for (col, &v) in order.iter().enumerate() {
        inst.blocks.insert(format!("block{col}:t{v}"), (hub(col)..hub(col) + block).collect());
    }
    inst.blocks.insert("reservoir".into(), (r0..n).collect());
    Ok(inst)
}

/// Layered instance for the ladder route.
///
/// A strip of positions `0..P`. Every column `i` has a path `A_i` with one
/// vertex per position and a pendant `b_{i,p}` at each position; the
/// pendants carry `ε_r` in total and meet each other position by position.
/// Above a filler region sit `t` bands of cells, one per tree vertex, in
/// the nursery order from the top down. Band cells at equal offsets are
/// matched along tree edges near their light ends and between every two
/// leaf bands near their heavy ends; each `b_{i,p}` sees the cells at `p`.
fn gen_versatile(p: &mut Params) -> Result<Instance> {
    let pat = named_pattern(&p.text("pattern", "c4"))?;
    let t = caterpillar_of(&pat)?;
    let k = t.n();
    let eps_r = q(1, 10 * k as i64);
    let kappa = qu(3) * eps_r.clone();
    let rdelta = eps_r.clone();
    let head_path = t.head_path().len();
    let radius = 4 * k + head_path + 4;
    let max_deg = (0..k).map(|v| t.tree.degree(v)).max().unwrap_or(0);
    let leaves = t.leaf_list().len();
    let light = p.usize("light", radius + 2)?;
    let middle = p.usize("middle", 2 * (max_deg + 2))?;
    let far = p.usize("far", 4 * (leaves + 1) + 8)?;
    let band = light + middle + far;
    let order = nursery_order(&t);

    let sheet = qu(1) - qu(k) * eps_r.clone();
    let filler_mass = sheet.clone() - qu(k) * kappa.clone();
    // Filler cells weigh at most ε_r/4.
    let filler = (filler_mass.clone() * qu(4) / eps_r.clone()).ceil().to_integer();
    let filler: usize = filler.try_into().map_err(|_| Error::Invalid("instance too large".into()))?;
    let positions = filler + k * band;

    let m_light = eps_r.clone() / qu(10 * light * k);
    let m_middle = (rdelta.clone() - qu(light) * m_light.clone()) / qu(middle);
    let m_far = (kappa.clone() - rdelta.clone()) / qu(far);
    let m_filler = filler_mass / qu(filler);
    let b_band = eps_r.clone() / qu(10 * k * k * band);
    let b_filler = (eps_r.clone() - qu(k * band) * b_band.clone()) / qu(filler);

    // Ids: A_1, B_1, …, A_k, B_k, band cells by column then offset, filler.
    let a_id = |i: usize, pos: usize| 2 * i * positions + pos;
    let b_id = |i: usize, pos: usize| (2 * i + 1) * positions + pos;
    let cells0 = 2 * k * positions;
    let cell_id = |col: usize, off: usize| cells0 + col * band + off;
    let filler0 = cells0 + k * band;
    let n = filler0 + filler;
    // Global position of a band cell; bands alternate so that light ends
    // face light ends and the bottom band turns its heavy end to the filler.
    let pos_of = |col: usize, off: usize| {
        let from_bottom = k - 1 - col;
        let base = filler + from_bottom * band;
        if from_bottom % 2 == 0 {
            base + band - 1 - off
        } else {
            base + off
        }
    };
    let mut g = Graph::new(n);
    let mut w = vec![Rational::zero(); n];
    let mut at_pos: Vec<Vec<usize>> = vec![Vec::new(); positions];
    for f in 0..filler {
        let v = filler0 + f;
        w[v] = m_filler.clone();
        at_pos[f].push(v);
        if f > 0 {
            g.ensure_edge(v - 1, v);
        }
    }
    let mut col_of = vec![0; k];
    for (col, &v) in order.iter().enumerate() {
        col_of[v] = col;
        for off in 0..band {
            let c = cell_id(col, off);
            w[c] = if off < light {
                m_light.clone()
            } else if off < light + middle {
                m_middle.clone()
            } else {
                m_far.clone()
            };
            at_pos[pos_of(col, off)].push(c);
            if off > 0 {
                g.ensure_edge(c - 1, c);
            }
        }
    }
    for (u, v) in t.tree.edges() {
        for off in 0..light + middle {
            g.ensure_edge(cell_id(col_of[u], off), cell_id(col_of[v], off));
        }
    }
    let leaf_cols: Vec<usize> = t.leaf_list().iter().map(|&v| col_of[v]).collect();
    for (x, &cu) in leaf_cols.iter().enumerate() {
        for &cv in &leaf_cols[x + 1..] {
            for off in light + middle..band {
                g.ensure_edge(cell_id(cu, off), cell_id(cv, off));
            }
        }
    }
    for i in 0..k {
        for pos in 0..positions {
            let (a, b) = (a_id(i, pos), b_id(i, pos));
            g.ensure_edge(a, b);
            if pos > 0 {
                g.ensure_edge(a - 1, a);
            }
            w[b] = if pos < filler { b_filler.clone() } else { b_band.clone() };
            for &c in &at_pos[pos] {
                g.ensure_edge(b, c);
            }
            for j in 0..i {
                g.ensure_edge(b_id(j, pos), b);
            }
        }
    }
    debug_assert!(w.iter().fold(Rational::zero(), |a, x| a + x).is_one());

    let mut inst = Instance::plain(g, BTreeMap::new());
    inst.weights = Some(w);
    inst.eps = Some(eps_r.clone());
    inst.overrides = Overrides {
        eps_r: Some(eps_r.clone()),
        columns: Some(k),
        kappa: Some(kappa),
        realization_delta: Some(rdelta),
        ..Overrides::default()
    };
    for (key, val) in [("columns", k), ("positions", positions), ("band", band), ("filler", filler)] {
        inst.params.insert(key.into(), val.to_string());
    }
    inst.params.insert("eps".into(), eps_r.to_string());
    for i in 0..k {
        inst.blocks.insert(format!("A{}", i + 1), (0..positions).map(|pos| a_id(i, pos)).collect());
        inst.blocks.insert(format!("B{}", i + 1), (0..positions).map(|pos| b_id(i, pos)).collect());
    }
    for (col, &v) in order.iter().enumerate() {
        inst.blocks.insert(format!("band{col}:t{v}"), (0..band).map(|off| cell_id(col, off)).collect());
    }
    Ok(inst)
}

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;

use crate::graph::Graph;
use crate::mass::MassedGraph;
use crate::pattern::{all_pairings, verify_feasibility, FeasibilityWitness, Pairing, TCopy};
use crate::scalar::Scalar;
use crate::Rational;

use super::certificate::{Certificate, Payload, PairingWitness, Subdivision, ViolationRecord};

/// The verifier's verdict: either every clause holds, or the first one
/// that breaks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub clause: Option<String>,
}

impl Check {
    pub fn ok(&self) -> bool {
        self.clause.is_none()
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.clause {
            None => write!(f, "true"),
            Some(c) => write!(f, "false, clause \"{c}\""),
        }
    }
}

type Clause = std::result::Result<(), String>;

fn need(cond: bool, clause: impl Into<String>) -> Clause {
    if cond {
        Ok(())
    } else {
        Err(clause.into())
    }
}

/// Re-checks a certificate against `mg` from raw adjacency and vertex
/// masses.
pub fn verify_certificate(mg: &MassedGraph<Rational>, cert: &Certificate) -> Check {
    let v = Verifier { g: &mg.graph, mg };
    let res = match &cert.payload {
        Payload::Filleting { pattern, vertices, branch, subdivided } => {
            v.filleting(pattern.pattern().ok(), vertices, branch, subdivided)
        }
        Payload::Violation { violation } => match cert.param("eps") {
            Some(eps) => v.violation(violation, &eps),
            None => Err("parameter eps is present".into()),
        },
        Payload::Realization { tree, family, sets, spread } => match (tree.caterpillar(), cert.param("delta")) {
            (Ok(t), Some(delta)) => v.realization(&t.tree, t.head, family, sets, spread, &delta),
            (Err(_), _) => Err("tree is a rooted caterpillar".into()),
            (_, None) => Err("parameter delta is present".into()),
        },
        Payload::Columns { a, b, c } => v.columns(a, b, c, cert.param("kappa"), cert.param("eps")),
        Payload::Ladder { a, b, c, half_cleaned } => v.ladder(a, b, c, *half_cleaned, cert.param("kappa")),
        Payload::Versatile { tree, copy, witnesses } => match tree.caterpillar() {
            Ok(t) => v.versatile(&t, copy, witnesses),
            Err(_) => Err("tree is a rooted caterpillar".into()),
        },
        Payload::Witness { tree, copy, witness } => match tree.caterpillar() {
            Ok(t) => v.witness(&t, copy, witness),
            Err(_) => Err("tree is a rooted caterpillar".into()),
        },
    };
    Check { clause: res.err() }
}

struct Verifier<'a> {
    g: &'a Graph,
    mg: &'a MassedGraph<Rational>,
}

impl Verifier<'_> {
    fn in_range(&self, xs: &[usize]) -> bool {
        xs.iter().all(|&v| v < self.g.n())
    }

    fn mass(&self, xs: &[usize]) -> Rational {
        let distinct: BTreeSet<usize> = xs.iter().copied().collect();
        distinct.into_iter().fold(Rational::zero(), |acc, v| acc + self.mg.mass.weight(v))
    }

    fn disjoint(a: &[usize], b: &[usize]) -> bool {
        let sa: BTreeSet<usize> = a.iter().copied().collect();
        b.iter().all(|v| !sa.contains(v))
    }

    fn anticomplete(&self, a: &[usize], b: &[usize]) -> bool {
        a.iter().all(|&x| b.iter().all(|&y| !self.g.has_edge(x, y)))
    }

    /// Every vertex of `b` has a neighbour in `a`.
    fn covers(&self, a: &[usize], b: &[usize]) -> bool {
        b.iter().all(|&y| a.iter().any(|&x| self.g.has_edge(x, y)))
    }

    /// Vertices of `target` with a neighbour in `a`.
    fn covered(&self, a: &[usize], target: &[usize]) -> Vec<usize> {
        target.iter().copied().filter(|&y| a.iter().any(|&x| self.g.has_edge(x, y))).collect()
    }

    fn connected(&self, xs: &[usize]) -> bool {
        let Some(&s) = xs.first() else { return false };
        let members: BTreeSet<usize> = xs.iter().copied().collect();
        let mut seen = BTreeSet::from([s]);
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &w in &members {
                if !seen.contains(&w) && self.g.has_edge(v, w) {
                    seen.insert(w);
                    stack.push(w);
                }
            }
        }
        seen.len() == members.len()
    }

    /// `μ(X ∪ N(X))`.
    fn dominance(&self, xs: &[usize]) -> Rational {
        let closed: Vec<usize> =
            (0..self.g.n()).filter(|&v| xs.contains(&v) || xs.iter().any(|&x| self.g.has_edge(x, v))).collect();
        self.mass(&closed)
    }

    fn filleting(
        &self,
        pat: Option<crate::pattern::Pattern>,
        vertices: &[usize],
        branch: &[usize],
        subdivided: &[Subdivision],
    ) -> Clause {
        let pat = pat.ok_or("pattern is well formed")?;
        let h = &pat.h;
        need(self.in_range(vertices), "vertex ids are in range")?;
        need(branch.len() == h.n(), "one branch vertex per vertex of H")?;
        let mut on_path = BTreeSet::new();
        for w in pat.path.windows(2) {
            on_path.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
        let extra: BTreeSet<(usize, usize)> =
            h.edges().into_iter().filter(|e| !on_path.contains(e)).collect();
        let routed: BTreeSet<(usize, usize)> =
            subdivided.iter().map(|s| (s.edge.0.min(s.edge.1), s.edge.0.max(s.edge.1))).collect();
        need(routed == extra && routed.len() == subdivided.len(), "every edge off P is subdivided exactly once")?;
        // Expected vertex and edge sets of the filleting.
        let mut expect_v: Vec<usize> = branch.to_vec();
        let mut expect_e: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut add = |a: usize, b: usize| {
            expect_e.insert((a.min(b), a.max(b)));
        };
        for &(u, w) in &on_path {
            add(branch[u], branch[w]);
        }
        for s in subdivided {
            need(!s.inner.is_empty(), "edges off P get at least one subdivision vertex")?;
            let mut chain = vec![branch[s.edge.0]];
            chain.extend(&s.inner);
            chain.push(branch[s.edge.1]);
            for w in chain.windows(2) {
                add(w[0], w[1]);
            }
            expect_v.extend(&s.inner);
        }
        let distinct: BTreeSet<usize> = expect_v.iter().copied().collect();
        need(distinct.len() == expect_v.len(), "branch and subdivision vertices are distinct")?;
        let listed: BTreeSet<usize> = vertices.iter().copied().collect();
        need(listed == distinct, "vertex set is exactly the branch and subdivision vertices")?;
        let members: Vec<usize> = distinct.into_iter().collect();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                if self.g.has_edge(a, b) != expect_e.contains(&(a, b)) {
                    return Err(format!("induced subgraph has exactly the filleting's edges (pair {a}, {b})"));
                }
            }
        }
        Ok(())
    }

    fn violation(&self, v: &ViolationRecord, eps: &Rational) -> Clause {
        let parse = |s: &str| Rational::parse_text(s).ok_or_else(|| "stated mass is a rational".to_string());
        match v {
            ViolationRecord::HeavyVertex { v, mass } => {
                need(*v < self.g.n(), "vertex id is in range")?;
                let m = self.mass(&[*v]);
                need(m == parse(mass)?, "stated mass equals μ({v})")?;
                need(m >= *eps, "μ({v}) ≥ ε")
            }
            ViolationRecord::HeavyNeighbourhood { v, mass } => {
                need(*v < self.g.n(), "vertex id is in range")?;
                let nb: Vec<usize> = (0..self.g.n()).filter(|&w| self.g.has_edge(*v, w)).collect();
                let m = self.mass(&nb);
                need(m == parse(mass)?, "stated mass equals μ(N(v))")?;
                need(m >= *eps, "μ(N(v)) ≥ ε")
            }
            ViolationRecord::HeavyBall { v, r, mass } => {
                need(*v < self.g.n(), "vertex id is in range")?;
                let ball = self.ball(*v, *r);
                let m = self.mass(&ball);
                need(m == parse(mass)?, "stated mass equals μ(N^r[v])")?;
                need(m >= *eps, "μ(N^r[v]) ≥ ε")
            }
            ViolationRecord::AnticompletePair { a, b, mass_a, mass_b } => {
                need(self.in_range(a) && self.in_range(b), "vertex ids are in range")?;
                need(Self::disjoint(a, b), "A, B disjoint")?;
                need(self.anticomplete(a, b), "A, B anticomplete")?;
                let (ma, mb) = (self.mass(a), self.mass(b));
                need(ma == parse(mass_a)? && mb == parse(mass_b)?, "stated masses equal μ(A), μ(B)")?;
                need(ma >= *eps && mb >= *eps, "μ(A) ≥ ε and μ(B) ≥ ε")
            }
        }
    }

    fn ball(&self, v: usize, r: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.g.n()];
        dist[v] = 0;
        let mut frontier = vec![v];
        for d in 1..=r {
            let mut next = Vec::new();
            for &x in &frontier {
                for y in 0..self.g.n() {
                    if dist[y] == usize::MAX && self.g.has_edge(x, y) {
                        dist[y] = d;
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        (0..self.g.n()).filter(|&x| dist[x] != usize::MAX).collect()
    }

    fn realization(
        &self,
        tree: &Graph,
        head: usize,
        family: &[Vec<usize>],
        sets: &[Vec<usize>],
        spread: &[usize],
        delta: &Rational,
    ) -> Clause {
        let n = tree.n();
        need(sets.len() == n && spread.len() == n, "one set and one family index per tree vertex")?;
        need(family.iter().all(|y| self.in_range(y)) && sets.iter().all(|x| self.in_range(x)), "vertex ids are in range")?;
        for i in 0..family.len() {
            for j in i + 1..family.len() {
                need(Self::disjoint(&family[i], &family[j]), "family members are pairwise disjoint")?;
            }
        }
        let distinct: BTreeSet<usize> = spread.iter().copied().collect();
        need(distinct.len() == n && spread.iter().all(|&i| i < family.len()), "the sets Y_v are all different")?;
        for v in 0..n {
            let y: BTreeSet<usize> = family[spread[v]].iter().copied().collect();
            need(sets[v].iter().all(|x| y.contains(x)), format!("X_{v} ⊆ Y_{v}"))?;
        }
        for u in 0..n {
            for v in u + 1..n {
                need(Self::disjoint(&sets[u], &sets[v]), "the sets X_v are pairwise disjoint")?;
            }
        }
        // Parent of each vertex on its way to the head.
        let mut parent = vec![usize::MAX; n];
        let mut order = vec![head];
        parent[head] = head;
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            for y in 0..n {
                if tree.has_edge(x, y) && parent[y] == usize::MAX {
                    parent[y] = x;
                    order.push(y);
                }
            }
            i += 1;
        }
        for u in 0..n {
            if u != head {
                let v = parent[u];
                need(self.covers(&sets[u], &sets[v]), format!("X_{u} covers X_{v}"))?;
            }
        }
        for u in 0..n {
            for v in u + 1..n {
                if !tree.has_edge(u, v) {
                    need(self.anticomplete(&sets[u], &sets[v]), format!("X_{u}, X_{v} anticomplete"))?;
                }
            }
        }
        need(self.mass(&sets[head]) >= *delta, "head set has mass ≥ δ")?;
        for v in 0..n {
            if v != head {
                need(self.connected(&sets[v]), format!("X_{v} connected"))?;
                need(self.dominance(&sets[v]) >= *delta, format!("X_{v} δ-dominant"))?;
            }
        }
        Ok(())
    }

    fn columns(
        &self,
        a: &[Vec<usize>],
        b: &[Vec<usize>],
        c: &[usize],
        kappa: Option<Rational>,
        eps: Option<Rational>,
    ) -> Clause {
        let k = a.len();
        need(b.len() == k, "as many B_i as A_i")?;
        let mut all: Vec<&[usize]> = a.iter().chain(b).map(|x| x.as_slice()).collect();
        all.push(c);
        need(all.iter().all(|x| self.in_range(x)), "vertex ids are in range")?;
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                need(Self::disjoint(all[i], all[j]), "sets pairwise disjoint")?;
            }
        }
        for i in 0..k {
            need(self.connected(&a[i]), format!("A_{} connected", i + 1))?;
            need(self.covers(&a[i], &b[i]), format!("A_{} covers B_{}", i + 1, i + 1))?;
            need(self.anticomplete(&a[i], c), format!("A_{}, C anticomplete", i + 1))?;
            for j in 0..k {
                if i != j {
                    need(
                        self.anticomplete(&a[i], &a[j]) && self.anticomplete(&a[i], &b[j]),
                        format!("A_{} anticomplete to A_{} ∪ B_{}", i + 1, j + 1, j + 1),
                    )?;
                }
            }
        }
        if let Some(eps) = &eps {
            let three_k_eps = Rational::from_usize(3 * k) * eps.clone();
            need(self.mass(c) >= Rational::from_usize(1) - three_k_eps.clone(), "μ(C) ≥ 1 − 3kε")?;
            if let Some(kappa) = &kappa {
                for i in 0..k {
                    let cov = self.covered(&b[i], c);
                    need(
                        self.mass(&cov) >= kappa.clone() - three_k_eps.clone(),
                        format!("B_{} covers mass ≥ κ − 3kε of C", i + 1),
                    )?;
                }
            }
        }
        Ok(())
    }

    fn ladder(&self, a: &[Vec<usize>], b: &[Vec<usize>], c: &[Vec<usize>], half: bool, kappa: Option<Rational>) -> Clause {
        let k = a.len();
        need(b.len() == k && c.len() == k, "3k blocks")?;
        let all: Vec<&[usize]> = a.iter().chain(b).chain(c).map(|x| x.as_slice()).collect();
        need(all.iter().all(|x| self.in_range(x)), "vertex ids are in range")?;
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                need(Self::disjoint(all[i], all[j]), "blocks pairwise disjoint")?;
            }
        }
        for i in 0..k {
            let n = i + 1;
            need(self.connected(&a[i]), format!("A_{n} connected"))?;
            need(self.covers(&a[i], &b[i]), format!("A_{n} covers B_{n}"))?;
            need(self.covers(&b[i], &c[i]), format!("B_{n} covers C_{n}"))?;
            need(self.anticomplete(&a[i], &c[i]), "A_i anticomplete to C_i")?;
        }
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    let other: Vec<usize> = a[j].iter().chain(&b[j]).chain(&c[j]).copied().collect();
                    need(self.anticomplete(&a[i], &other), "A_i anticomplete to A_j ∪ B_j ∪ C_j")?;
                }
            }
        }
        if half {
            for i in 0..k {
                for j in i + 1..k {
                    need(self.anticomplete(&b[i], &c[j]), "B_i anticomplete to C_j for i < j")?;
                }
            }
        }
        if let Some(kappa) = kappa {
            for (i, ci) in c.iter().enumerate() {
                need(self.mass(ci) >= kappa, format!("μ(C_{}) ≥ κ", i + 1))?;
            }
        }
        Ok(())
    }

    fn witness(&self, t: &crate::pattern::RootedCaterpillar, copy: &[usize], w: &PairingWitness) -> Clause {
        let pi = Pairing::new(w.pairing.clone()).map_err(|_| "pairing is well formed".to_string())?;
        let copy = TCopy { map: copy.to_vec() };
        need(copy.map.iter().all(|&v| v < self.g.n()), "vertex ids are in range")?;
        verify_feasibility(self.g, t, &copy, &pi, &FeasibilityWitness { paths: w.paths.clone() })
    }

    fn versatile(&self, t: &crate::pattern::RootedCaterpillar, copy: &[usize], ws: &[PairingWitness]) -> Clause {
        need(copy.len() == t.n() && copy.iter().all(|&v| v < self.g.n()), "copy maps every tree vertex into G")?;
        let leaves: Vec<usize> = t.leaf_list().iter().map(|&l| copy[l]).collect();
        let want: BTreeSet<Vec<Vec<usize>>> = all_pairings(&leaves).iter().map(|p| p.blocks().to_vec()).collect();
        let have: BTreeSet<Vec<Vec<usize>>> =
            ws.iter().filter_map(|w| Pairing::new(w.pairing.clone()).ok()).map(|p| p.blocks().to_vec()).collect();
        need(have == want && ws.len() == want.len(), "one witness for every leaf pairing")?;
        for w in ws {
            self.witness(t, copy, w).map_err(|e| format!("pairing {:?}: {e}", w.pairing))?;
        }
        Ok(())
    }
}

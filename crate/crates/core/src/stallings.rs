//! Folded core graphs of finitely generated subgroups of a free group.
//!
//! A core graph is rooted, directed, edge-labeled by generators, and
//! *folded*: at every vertex, at most one outgoing and at most one
//! incoming edge per label.  Reduced words that trace a closed
//! non-backtracking path from the root are exactly the members of the
//! subgroup the graph represents; the subgroup's rank is
//! `#edges - #vertices + 1`.
//!
//! Graphs are stored in a canonical form (root is vertex 0, vertices
//! numbered by a label-ordered breadth-first search, edges sorted by
//! source then label), so structural equality coincides with rooted
//! labeled isomorphism and [`CoreGraph::canonical_key`] is just a dump
//! of the storage.

use crate::words::{Letter, Word};
use crate::{Error, Modulus, Result};
use std::collections::HashMap;

/// A directed labeled edge; `gen` is 1-based.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Edge {
    pub src: u32,
    pub dst: u32,
    pub gen: u32,
}

/// A folded core graph in canonical storage.  The root is vertex 0.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CoreGraph {
    ambient_rank: u32,
    num_vertices: u32,
    edges: Vec<Edge>,
    /// `[v * rank + (gen-1)]` -> (target, edge id) of the out-edge.
    out: Vec<Option<(u32, u32)>>,
    /// `[v * rank + (gen-1)]` -> (source, edge id) of the in-edge.
    inc: Vec<Option<(u32, u32)>>,
}

/// How many times a traced word crosses each edge, by edge id; `signed`
/// counts direction (+1 along the edge, -1 against), `unsigned` ignores it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TraversalProfile {
    pub signed: Vec<i64>,
    pub unsigned: Vec<u64>,
}

impl TraversalProfile {
    /// True when every signed crossing count is killed by the modulus —
    /// the combinatorial test selecting `Q_m` inside a fringe.
    pub fn annihilated_by(&self, m: Modulus) -> bool {
        self.signed.iter().all(|&c| m.annihilates(c))
    }
}

impl CoreGraph {
    /// Build from a folded, connected edge list; relabels into canonical
    /// breadth-first order.  Callers guarantee foldedness (checked in
    /// debug builds).
    pub(crate) fn from_folded_edges(
        ambient_rank: u32,
        num_vertices: u32,
        root: u32,
        raw_edges: &[(u32, u32, u32)],
    ) -> CoreGraph {
        let r = ambient_rank as usize;
        let n = num_vertices as usize;
        let mut out_nb: Vec<Option<u32>> = vec![None; n * r];
        let mut in_nb: Vec<Option<u32>> = vec![None; n * r];
        for &(src, dst, gen) in raw_edges {
            let g = (gen - 1) as usize;
            debug_assert!(out_nb[src as usize * r + g].is_none(), "not folded: double out-edge");
            debug_assert!(in_nb[dst as usize * r + g].is_none(), "not folded: double in-edge");
            out_nb[src as usize * r + g] = Some(dst);
            in_nb[dst as usize * r + g] = Some(src);
        }

        // Canonical numbering: BFS from the root, scanning labels in order,
        // out-neighbor before in-neighbor.
        let mut order: Vec<u32> = vec![u32::MAX; n];
        let mut bfs: Vec<u32> = Vec::with_capacity(n);
        order[root as usize] = 0;
        bfs.push(root);
        let mut head = 0;
        while head < bfs.len() {
            let v = bfs[head] as usize;
            head += 1;
            for g in 0..r {
                for nb in [out_nb[v * r + g], in_nb[v * r + g]] {
                    if let Some(u) = nb {
                        if order[u as usize] == u32::MAX {
                            order[u as usize] = bfs.len() as u32;
                            bfs.push(u);
                        }
                    }
                }
            }
        }
        debug_assert_eq!(bfs.len(), n, "core graph must be connected");

        let mut edges: Vec<Edge> = raw_edges
            .iter()
            .map(|&(src, dst, gen)| Edge {
                src: order[src as usize],
                dst: order[dst as usize],
                gen,
            })
            .collect();
        // In a folded graph (src, gen) determines the edge, so this order
        // is total and canonical.
        edges.sort_by_key(|e| (e.src, e.gen));

        let mut out = vec![None; n * r];
        let mut inc = vec![None; n * r];
        for (id, e) in edges.iter().enumerate() {
            out[e.src as usize * r + (e.gen - 1) as usize] = Some((e.dst, id as u32));
            inc[e.dst as usize * r + (e.gen - 1) as usize] = Some((e.src, id as u32));
        }
        CoreGraph {
            ambient_rank,
            num_vertices,
            edges,
            out,
            inc,
        }
    }

    pub fn ambient_rank(&self) -> u32 {
        self.ambient_rank
    }

    pub fn num_vertices(&self) -> u32 {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Rank of the represented subgroup: `#edges - #vertices + 1`.
    pub fn rank(&self) -> usize {
        self.edges.len() + 1 - self.num_vertices as usize
    }

    /// Out-edge of `v` with label `gen`, as (target, edge id).
    pub fn out_edge(&self, v: u32, gen: u32) -> Option<(u32, u32)> {
        self.out[v as usize * self.ambient_rank as usize + (gen - 1) as usize]
    }

    /// In-edge of `v` with label `gen`, as (source, edge id).
    pub fn in_edge(&self, v: u32, gen: u32) -> Option<(u32, u32)> {
        self.inc[v as usize * self.ambient_rank as usize + (gen - 1) as usize]
    }

    /// Number of edges per label, indexed 0..ambient_rank.
    pub fn edge_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.ambient_rank as usize];
        for e in &self.edges {
            counts[(e.gen - 1) as usize] += 1;
        }
        counts
    }

    /// Trace `w` from the root.  `Some(profile)` iff the path exists and
    /// closes at the root, i.e. iff `w` is a member of the subgroup.
    pub fn membership_and_profile(&self, w: &Word) -> Option<TraversalProfile> {
        let mut signed = vec![0i64; self.edges.len()];
        let mut unsigned = vec![0u64; self.edges.len()];
        let mut pos = 0u32;
        for l in w.letters() {
            if l.gen() > self.ambient_rank {
                return None;
            }
            let (next, id) = if l.is_positive() {
                self.out_edge(pos, l.gen())?
            } else {
                self.in_edge(pos, l.gen())?
            };
            signed[id as usize] += l.sign();
            unsigned[id as usize] += 1;
            pos = next;
        }
        (pos == 0).then_some(TraversalProfile { signed, unsigned })
    }

    pub fn is_member(&self, w: &Word) -> bool {
        self.membership_and_profile(w).is_some()
    }

    /// Breadth-first spanning tree from the root; returns, per vertex, the
    /// path word from the root, and per edge, whether it is a tree edge.
    fn spanning_tree(&self) -> (Vec<Vec<Letter>>, Vec<bool>) {
        let n = self.num_vertices as usize;
        let mut path: Vec<Vec<Letter>> = vec![Vec::new(); n];
        let mut seen = vec![false; n];
        let mut is_tree = vec![false; self.edges.len()];
        let mut queue = std::collections::VecDeque::new();
        seen[0] = true;
        queue.push_back(0u32);
        while let Some(v) = queue.pop_front() {
            for gen in 1..=self.ambient_rank {
                if let Some((u, id)) = self.out_edge(v, gen) {
                    if !seen[u as usize] {
                        seen[u as usize] = true;
                        is_tree[id as usize] = true;
                        let mut p = path[v as usize].clone();
                        p.push(Letter::new(gen, true));
                        path[u as usize] = p;
                        queue.push_back(u);
                    }
                }
                if let Some((u, id)) = self.in_edge(v, gen) {
                    if !seen[u as usize] {
                        seen[u as usize] = true;
                        is_tree[id as usize] = true;
                        let mut p = path[v as usize].clone();
                        p.push(Letter::new(gen, false));
                        path[u as usize] = p;
                        queue.push_back(u);
                    }
                }
            }
        }
        debug_assert!(seen.iter().all(|&s| s));
        (path, is_tree)
    }

    /// Free basis of the subgroup: one word per non-tree edge, namely
    /// (root-to-source tree path) * edge * (target-to-root tree path).
    /// Deterministic; basis length equals `rank()`.
    pub fn spanning_tree_basis(&self) -> Vec<Word> {
        let (path, is_tree) = self.spanning_tree();
        let mut basis = Vec::with_capacity(self.rank());
        for (id, e) in self.edges.iter().enumerate() {
            if is_tree[id] {
                continue;
            }
            let mut letters = path[e.src as usize].clone();
            letters.push(Letter::new(e.gen, true));
            letters.extend(path[e.dst as usize].iter().rev().map(|l| l.inverse()));
            basis.push(
                Word::from_letters(letters, self.ambient_rank)
                    .expect("basis letters are in range"),
            );
        }
        debug_assert_eq!(basis.len(), self.rank());
        basis
    }

    /// Express a member `w` in the spanning-tree basis: trace the path and
    /// record crossings of non-tree edges.  Substituting the basis words
    /// back and reducing recovers `w` exactly.  `None` if `w` is not a
    /// member.
    pub fn rewrite_in_basis(&self, w: &Word) -> Option<Word> {
        let (_, is_tree) = self.spanning_tree();
        // Basis index per edge id (1-based), for non-tree edges.
        let mut basis_ix = vec![0u32; self.edges.len()];
        let mut next = 0u32;
        for id in 0..self.edges.len() {
            if !is_tree[id] {
                next += 1;
                basis_ix[id] = next;
            }
        }
        let mut letters = Vec::new();
        let mut pos = 0u32;
        for l in w.letters() {
            if l.gen() > self.ambient_rank {
                return None;
            }
            let (nextv, id) = if l.is_positive() {
                self.out_edge(pos, l.gen())?
            } else {
                self.in_edge(pos, l.gen())?
            };
            if !is_tree[id as usize] {
                letters.push(Letter::new(basis_ix[id as usize], l.is_positive()));
            }
            pos = nextv;
        }
        if pos != 0 {
            return None;
        }
        let rank = (next).max(1);
        Some(Word::from_letters(letters, rank).expect("basis letters are in range"))
    }

    /// Bytes equal iff the graphs are isomorphic as rooted labeled graphs.
    /// (Storage is canonical, so this is a dump of the out-tables.)
    pub fn canonical_key(&self) -> Vec<u8> {
        let r = self.ambient_rank as usize;
        let n = self.num_vertices as usize;
        let mut key = Vec::with_capacity(8 + 4 * n * r);
        key.extend_from_slice(&self.ambient_rank.to_le_bytes());
        key.extend_from_slice(&self.num_vertices.to_le_bytes());
        for v in 0..n {
            for g in 0..r {
                let code = match self.out[v * r + g] {
                    Some((dst, _)) => dst + 1,
                    None => 0,
                };
                key.extend_from_slice(&code.to_le_bytes());
            }
        }
        key
    }

    /// Re-fold (a no-op on an already-valid graph; exposed so idempotence
    /// is testable against the builder path).
    pub fn fold(&self) -> CoreGraph {
        let mut b = GraphBuilder::new(self.ambient_rank, self.num_vertices, 0);
        for e in &self.edges {
            b.add_edge(e.src, e.dst, e.gen);
        }
        b.fold()
    }

    /// Debug export: one line per edge, `src dst label`, root is vertex 0.
    pub fn edge_list_text(&self) -> String {
        let mut s = String::new();
        for e in &self.edges {
            s.push_str(&format!("{} {} {}\n", e.src, e.dst, e.gen));
        }
        s
    }
}

/// Work-in-progress graph: an arbitrary rooted labeled multigraph that
/// [`GraphBuilder::fold`] turns into a valid [`CoreGraph`] by identifying
/// same-label edge pairs to a fixpoint and trimming hanging trees (the
/// root is never trimmed).
#[derive(Clone, Debug)]
pub struct GraphBuilder {
    ambient_rank: u32,
    num_vertices: u32,
    root: u32,
    edges: Vec<(u32, u32, u32)>,
}

impl GraphBuilder {
    pub fn new(ambient_rank: u32, num_vertices: u32, root: u32) -> Self {
        assert!(ambient_rank >= 1);
        assert!(root < num_vertices.max(1));
        GraphBuilder {
            ambient_rank,
            num_vertices: num_vertices.max(root + 1),
            root,
            edges: Vec::new(),
        }
    }

    pub fn add_vertex(&mut self) -> u32 {
        self.num_vertices += 1;
        self.num_vertices - 1
    }

    pub fn add_edge(&mut self, src: u32, dst: u32, gen: u32) {
        assert!(gen >= 1 && gen <= self.ambient_rank);
        assert!(src < self.num_vertices && dst < self.num_vertices);
        self.edges.push((src, dst, gen));
    }

    /// Fold to a fixpoint, trim hanging trees, canonicalize.
    pub fn fold(self) -> CoreGraph {
        let n = self.num_vertices as usize;
        let mut uf = UnionFind::new(n);

        // Repeatedly merge targets (sources) of same-label edges leaving
        // (entering) one vertex.  Each pass either unions something or is
        // the last, so this terminates after at most n passes.
        loop {
            let mut changed = false;
            let mut out_map: HashMap<(u32, u32), u32> = HashMap::new();
            let mut in_map: HashMap<(u32, u32), u32> = HashMap::new();
            for &(src, dst, gen) in &self.edges {
                let s = uf.find(src);
                let d = uf.find(dst);
                if let Some(&d2) = out_map.get(&(s, gen)) {
                    let d2 = uf.find(d2);
                    if d2 != d {
                        uf.union(d2, d);
                        changed = true;
                    }
                } else {
                    out_map.insert((s, gen), d);
                }
                let s = uf.find(src);
                let d = uf.find(dst);
                if let Some(&s2) = in_map.get(&(d, gen)) {
                    let s2 = uf.find(s2);
                    if s2 != s {
                        uf.union(s2, s);
                        changed = true;
                    }
                } else {
                    in_map.insert((d, gen), s);
                }
            }
            if !changed {
                break;
            }
        }

        // Collapse vertices and deduplicate parallel edges.  Vertices that
        // carry no edges are dropped here unless they are the root.
        fn index_of(uf: &mut UnionFind, v: u32, rep_index: &mut HashMap<u32, u32>) -> u32 {
            let r = uf.find(v);
            let next = rep_index.len() as u32;
            *rep_index.entry(r).or_insert(next)
        }
        let mut rep_index: HashMap<u32, u32> = HashMap::new();
        let root = index_of(&mut uf, self.root, &mut rep_index);
        let mut edge_set: Vec<(u32, u32, u32)> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for &(src, dst, gen) in &self.edges {
            let s = index_of(&mut uf, src, &mut rep_index);
            let d = index_of(&mut uf, dst, &mut rep_index);
            if seen.insert((s, d, gen)) {
                edge_set.push((s, d, gen));
            }
        }

        // Trim hanging trees: repeatedly delete non-root vertices of
        // degree <= 1 together with their edge.  A loop contributes 2 to
        // its vertex, so looped vertices survive.
        let mut alive: Vec<bool> = vec![false; rep_index.len()];
        alive[root as usize] = true;
        for &(s, d, _) in &edge_set {
            alive[s as usize] = true;
            alive[d as usize] = true;
        }
        loop {
            let mut degree = vec![0u32; rep_index.len()];
            for &(s, d, _) in &edge_set {
                degree[s as usize] += 1;
                degree[d as usize] += 1;
            }
            let victim = (0..rep_index.len() as u32)
                .find(|&v| alive[v as usize] && v != root && degree[v as usize] <= 1);
            match victim {
                None => break,
                Some(v) => {
                    alive[v as usize] = false;
                    edge_set.retain(|&(s, d, _)| s != v && d != v);
                }
            }
        }

        // Compact the surviving vertices.
        let mut compact: HashMap<u32, u32> = HashMap::new();
        compact.insert(root, 0);
        for v in 0..rep_index.len() as u32 {
            if alive[v as usize] && v != root {
                let next = compact.len() as u32;
                compact.insert(v, next);
            }
        }
        let edges: Vec<(u32, u32, u32)> = edge_set
            .iter()
            .map(|&(s, d, g)| (compact[&s], compact[&d], g))
            .collect();

        CoreGraph::from_folded_edges(self.ambient_rank, compact.len() as u32, 0, &edges)
    }
}

/// Cycle graph of a nonempty, cyclically reduced word, folded.  (For such
/// words the cycle is already folded; the builder run is a safety net.)
pub fn core_graph_of_word(w: &Word) -> Result<CoreGraph> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    if !w.is_cyclically_reduced() {
        return Err(Error::NotCyclicallyReduced {
            word: w.to_string(),
        });
    }
    let mut b = GraphBuilder::new(w.ambient_rank(), w.len() as u32, 0);
    add_cycle(&mut b, w, 0);
    Ok(b.fold())
}

/// Wedge of generator cycles at a common root, folded.  Empty generators
/// are ignored; all-empty input is the trivial subgroup and is an error.
pub fn core_graph_of_subgroup(gens: &[Word]) -> Result<CoreGraph> {
    let rank = gens.iter().map(|g| g.ambient_rank()).max().unwrap_or(0);
    if rank == 0 || gens.iter().all(|g| g.is_empty()) {
        return Err(Error::TrivialSubgroup);
    }
    let mut b = GraphBuilder::new(rank, 1, 0);
    for g in gens {
        if g.is_empty() {
            continue;
        }
        let start = b.num_vertices;
        for _ in 1..g.len() {
            b.add_vertex();
        }
        add_path_cycle(&mut b, g, 0, start);
    }
    Ok(b.fold())
}

/// Add the closed path of `w` through vertices `root, root+1, ..`
/// (assumes those vertices exist and are fresh).
fn add_cycle(b: &mut GraphBuilder, w: &Word, root: u32) {
    let n = w.len() as u32;
    for (i, l) in w.letters().iter().enumerate() {
        let from = if i == 0 { root } else { root + i as u32 };
        let to = if i as u32 == n - 1 { root } else { root + i as u32 + 1 };
        if l.is_positive() {
            b.add_edge(from, to, l.gen());
        } else {
            b.add_edge(to, from, l.gen());
        }
    }
}

/// Like `add_cycle` but interior vertices start at `first_interior`.
fn add_path_cycle(b: &mut GraphBuilder, w: &Word, root: u32, first_interior: u32) {
    let n = w.len() as u32;
    for (i, l) in w.letters().iter().enumerate() {
        let from = if i == 0 { root } else { first_interior + i as u32 - 1 };
        let to = if i as u32 == n - 1 { root } else { first_interior + i as u32 };
        if l.is_positive() {
            b.add_edge(from, to, l.gen());
        } else {
            b.add_edge(to, from, l.gen());
        }
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, v: u32) -> u32 {
        let mut v = v;
        while self.parent[v as usize] != v {
            let p = self.parent[v as usize];
            self.parent[v as usize] = self.parent[p as usize];
            v = self.parent[v as usize];
        }
        v
    }

    fn union(&mut self, a: u32, b: u32) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.parent[b as usize] = a;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(text: &str) -> Word {
        Word::parse(text, None).unwrap()
    }

    fn wr(text: &str, rank: u32) -> Word {
        Word::parse(text, Some(rank)).unwrap()
    }

    #[test]
    fn word_cycle_shapes() {
        let g = core_graph_of_word(&w("xxyy")).unwrap();
        assert_eq!(g.num_vertices(), 4);
        assert_eq!(g.num_edges(), 4);
        assert_eq!(g.rank(), 1);
        assert_eq!(g.edge_counts(), vec![2, 2]);

        let g = core_graph_of_word(&w("x")).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges(), g.rank()), (1, 1, 1));

        let g = core_graph_of_word(&w("xyXY")).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges(), g.rank()), (4, 4, 1));
    }

    #[test]
    fn word_cycle_preconditions() {
        assert!(matches!(
            core_graph_of_word(&Word::empty(2).unwrap()),
            Err(Error::EmptyWord)
        ));
        assert!(matches!(
            core_graph_of_word(&w("xyX")),
            Err(Error::NotCyclicallyReduced { .. })
        ));
    }

    #[test]
    fn shared_prefix_folds() {
        // {xy, xz}: the two x-edges out of the root merge.
        let g = core_graph_of_subgroup(&[wr("xy", 3), wr("xz", 3)]).unwrap();
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.num_edges(), 3);
        assert_eq!(g.rank(), 2);
        assert_eq!(g.edge_counts(), vec![1, 1, 1]);
        assert!(g.is_member(&wr("xy", 3)));
        assert!(g.is_member(&wr("xz", 3)));
        assert!(g.is_member(&wr("xyZX", 3)));
        assert!(!g.is_member(&wr("x", 3)));
    }

    #[test]
    fn two_generator_graph_shape() {
        // <x1 x2^-1 x1, x1^-2 x2>: folding merges two branches into a
        // 4-vertex, 5-edge graph of rank 2.
        let gens = [w("xYx"), w("XXy")];
        let g = core_graph_of_subgroup(&gens).unwrap();
        assert_eq!(g.num_vertices(), 4);
        assert_eq!(g.num_edges(), 5);
        assert_eq!(g.rank(), 2);
        for gen in &gens {
            assert!(g.is_member(gen));
        }
        let basis = g.spanning_tree_basis();
        assert_eq!(basis.len(), 2);
        for b in &basis {
            assert!(g.is_member(b));
        }
    }

    #[test]
    fn conjugate_generator_folds_to_decorated_loop() {
        // <x y x^-1>: an x-edge to a vertex carrying a y-loop.
        let g = core_graph_of_subgroup(&[w("xyX")]).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges(), g.rank()), (2, 2, 1));
        assert!(g.is_member(&w("xyX")));
        assert!(g.is_member(&w("xyyyX")));
        assert!(!g.is_member(&w("y")));
    }

    #[test]
    fn folding_trims_hanging_trees() {
        let mut b = GraphBuilder::new(2, 3, 0);
        b.add_edge(0, 1, 1);
        b.add_edge(1, 2, 2);
        let g = b.fold();
        assert_eq!((g.num_vertices(), g.num_edges()), (1, 0));
        assert_eq!(g.rank(), 0);
    }

    #[test]
    fn membership_and_profile_on_wedge_of_squares() {
        let g = core_graph_of_subgroup(&[w("xx"), wr("yy", 2)]).unwrap();
        let p = g.membership_and_profile(&w("xxyy")).unwrap();
        assert_eq!(p.unsigned.iter().sum::<u64>(), 4);
        assert!(p.signed.iter().all(|&c| c == 1));
        assert!(g.membership_and_profile(&w("xy")).is_none());
        assert!(g.membership_and_profile(&w("xxx")).is_none());
        // The empty word is a member of everything, with a zero profile.
        let p = g.membership_and_profile(&Word::empty(2).unwrap()).unwrap();
        assert!(p.unsigned.iter().all(|&c| c == 0));
    }

    #[test]
    fn basis_of_a_cycle_is_the_word() {
        let g = core_graph_of_word(&w("xx")).unwrap();
        assert_eq!(g.spanning_tree_basis(), vec![w("xx")]);

        let g = core_graph_of_word(&w("xyXY")).unwrap();
        let basis = g.spanning_tree_basis();
        assert_eq!(basis.len(), 1);
        assert!(g.is_member(&basis[0]));
    }

    #[test]
    fn rewrite_on_the_bouquet_renames_generators() {
        // The rank-2 bouquet: every reduced word is a member, and the
        // rewrite is the word itself in basis letters.
        let mut b = GraphBuilder::new(2, 1, 0);
        b.add_edge(0, 0, 1);
        b.add_edge(0, 0, 2);
        let g = b.fold();
        assert_eq!(g.rank(), 2);
        assert_eq!(g.rewrite_in_basis(&w("xxyy")).unwrap(), w("xxyy"));
        assert_eq!(g.rewrite_in_basis(&w("xyXY")).unwrap(), w("xyXY"));
    }

    #[test]
    fn rewrite_substitutes_back() {
        let g = core_graph_of_subgroup(&[w("xYx"), w("XXy")]).unwrap();
        let basis = g.spanning_tree_basis();
        for member in [w("xYx"), w("XXy"), w("xYxXXy"), w("xYxxYx")] {
            let rewritten = g.rewrite_in_basis(&member).expect("member");
            // Substitute basis words for the rewrite's letters.
            let mut acc = Word::empty(2).unwrap();
            for l in rewritten.letters() {
                let b = &basis[(l.gen() - 1) as usize];
                let piece = if l.is_positive() { b.clone() } else { b.inverse() };
                acc = acc.concat(&piece).unwrap();
            }
            assert_eq!(acc, member);
        }
        assert!(g.rewrite_in_basis(&w("x")).is_none());
    }

    #[test]
    fn canonical_key_ignores_construction_order() {
        let mut b1 = GraphBuilder::new(2, 3, 0);
        b1.add_edge(0, 1, 1);
        b1.add_edge(1, 2, 2);
        b1.add_edge(2, 0, 1);
        let g1 = b1.fold();
        let mut b2 = GraphBuilder::new(2, 3, 1);
        // Same triangle, different vertex names and insertion order.
        b2.add_edge(0, 1, 1);
        b2.add_edge(2, 0, 2);
        b2.add_edge(1, 2, 1);
        let g2 = b2.fold();
        assert_eq!(g1.canonical_key(), g2.canonical_key());
        assert_eq!(g1, g2);

        let loop_x = core_graph_of_word(&wr("x", 2)).unwrap();
        let loop_y = core_graph_of_word(&wr("y", 2)).unwrap();
        assert_ne!(loop_x.canonical_key(), loop_y.canonical_key());
    }

    #[test]
    fn fold_is_idempotent() {
        for text in ["xxyy", "xyXY", "xYx"] {
            let g = core_graph_of_word(&w(text)).unwrap();
            assert_eq!(g.fold(), g);
        }
    }

    #[test]
    fn bridge_edges_have_zero_signed_count() {
        // <x y x^-1>: the x-edge is a bridge; every member crosses it with
        // signed count 0.
        let g = core_graph_of_subgroup(&[w("xyX")]).unwrap();
        let bridge = g
            .edges()
            .iter()
            .position(|e| e.src != e.dst)
            .expect("the x-edge");
        for member in [w("xyX"), w("xyyX"), w("xYYX")] {
            let p = g.membership_and_profile(&member).unwrap();
            assert_eq!(p.signed[bridge], 0);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_word(max_len: usize) -> impl Strategy<Value = Word> {
            proptest::collection::vec((1u32..=2, proptest::bool::ANY), 1..=max_len)
                .prop_map(|ls| {
                    Word::from_letters(ls.into_iter().map(|(g, p)| Letter::new(g, p)), 2).unwrap()
                })
                .prop_filter("nonempty after reduction", |w| !w.is_empty())
        }

        proptest! {
            #[test]
            fn fold_confluence_under_insertion_order(
                gens in proptest::collection::vec(arb_word(6), 1..=3),
                seed in proptest::num::u64::ANY,
            ) {
                let reference = core_graph_of_subgroup(&gens);
                let reference = match reference { Ok(g) => g, Err(_) => return Ok(()) };
                // Rebuild from the same wedge with edges inserted in a
                // seed-shuffled order; folding must not care.
                let mut b = GraphBuilder::new(2, 1, 0);
                let mut all_edges = Vec::new();
                for g in &gens {
                    if g.is_empty() { continue; }
                    let start = b.num_vertices;
                    for _ in 1..g.len() { b.add_vertex(); }
                    let n = g.len() as u32;
                    for (i, l) in g.letters().iter().enumerate() {
                        let from = if i == 0 { 0 } else { start + i as u32 - 1 };
                        let to = if i as u32 == n - 1 { 0 } else { start + i as u32 };
                        if l.is_positive() {
                            all_edges.push((from, to, l.gen()));
                        } else {
                            all_edges.push((to, from, l.gen()));
                        }
                    }
                }
                // Cheap deterministic shuffle.
                let mut s = seed;
                for i in (1..all_edges.len()).rev() {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    let j = (s >> 33) as usize % (i + 1);
                    all_edges.swap(i, j);
                }
                for (src, dst, gen) in all_edges {
                    b.add_edge(src, dst, gen);
                }
                let shuffled = b.fold();
                prop_assert_eq!(reference.canonical_key(), shuffled.canonical_key());
            }

            #[test]
            fn members_close_and_nonmembers_fail(word in arb_word(8)) {
                let (core, _) = word.cyclic_reduce();
                prop_assume!(!core.is_empty());
                let g = core_graph_of_word(&core).unwrap();
                // The word itself is a member...
                let p = g.membership_and_profile(&core).unwrap();
                prop_assert!(p.unsigned.iter().all(|&c| c >= 1));
                // ...and so are its powers.
                let sq = core.concat(&core).unwrap();
                prop_assert!(g.is_member(&sq));
            }

            #[test]
            fn basis_words_are_members_and_independent(
                gens in proptest::collection::vec(arb_word(6), 1..=3)
            ) {
                let g = match core_graph_of_subgroup(&gens) { Ok(g) => g, Err(_) => return Ok(()) };
                let basis = g.spanning_tree_basis();
                prop_assert_eq!(basis.len(), g.rank());
                for b in &basis {
                    prop_assert!(g.is_member(b));
                    // Each basis word rewrites to a single basis letter.
                    let rw = g.rewrite_in_basis(b).unwrap();
                    prop_assert_eq!(rw.len(), 1);
                }
            }
        }
    }
}

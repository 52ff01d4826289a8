//! The fringe of a word: every subgroup whose core graph is a quotient of
//! the word's cycle graph, i.e. every subgroup covered by `<w>`.
//!
//! Enumeration walks vertex partitions of the base graph in
//! restricted-growth order, maintaining the quotient's per-block edge
//! tables incrementally.  A prefix dies as soon as two same-label edges
//! leave (or enter) one block toward provably distinct blocks — blocks
//! never merge later in restricted-growth order, so such a conflict can
//! never heal, and the partitions that survive to a leaf are exactly
//! those whose quotient is already folded.  Partitions whose quotient
//! would need further folding are redundant: the folded image equals the
//! quotient by a coarser partition that is enumerated anyway.
//!
//! `Q_m(w)` is the sub-fringe where `w`'s signed traversal count on every
//! edge is killed by the modulus; the expected-trace formula sums exactly
//! over it.

use crate::stallings::{core_graph_of_word, CoreGraph, TraversalProfile};
use crate::words::Word;
use crate::{Error, Modulus, Result};
use std::collections::HashSet;

/// Enumeration limits and parallelism.
#[derive(Clone, Debug)]
pub struct FringeConfig {
    /// Hard cap on partitioned vertices (= |w| for a word's fringe).
    pub max_base_vertices: usize,
    /// Worker threads; results are identical for any value.
    pub threads: usize,
}

impl Default for FringeConfig {
    fn default() -> Self {
        FringeConfig {
            max_base_vertices: 16,
            threads: 1,
        }
    }
}

/// One subgroup covered by `<w>`: its core graph and how `w` runs over it.
#[derive(Clone, Debug)]
pub struct FringeElement {
    pub graph: CoreGraph,
    pub profile: TraversalProfile,
}

/// All subgroups covered by `<w>`, in a deterministic order.
/// `w` must be nonempty and cyclically reduced.
pub fn enumerate_fringe(w: &Word, cfg: &FringeConfig) -> Result<Vec<FringeElement>> {
    let base = core_graph_of_word(w)?;
    let quotients = enumerate_quotients(&base, cfg)?;
    Ok(quotients
        .into_iter()
        .map(|graph| {
            let profile = graph
                .membership_and_profile(w)
                .expect("w traces a closed path in every quotient of its own cycle");
            FringeElement { graph, profile }
        })
        .collect())
}

/// The sub-fringe `Q_m(w)`: elements where every signed count is a
/// multiple of m (zero for m = inf; no condition for m = 1).
pub fn q_m(w: &Word, m: Modulus, cfg: &FringeConfig) -> Result<Vec<FringeElement>> {
    Ok(enumerate_fringe(w, cfg)?
        .into_iter()
        .filter(|el| el.profile.annihilated_by(m))
        .collect())
}

/// All folded quotients of an arbitrary base core graph (the fringe of a
/// subgroup when the base is its core graph).  Deterministic order,
/// deduplicated by canonical key.
pub fn enumerate_quotients(base: &CoreGraph, cfg: &FringeConfig) -> Result<Vec<CoreGraph>> {
    let n = base.num_vertices() as usize;
    if n > cfg.max_base_vertices {
        return Err(Error::FringeCapExceeded {
            len: n,
            cap: cfg.max_base_vertices,
        });
    }
    let mut state = PartitionState::new(base);
    let raw = if cfg.threads > 1 && n > 2 {
        enumerate_sharded(base, cfg.threads)
    } else {
        let mut out = Vec::new();
        descend(&mut state, 1, &mut out);
        out
    };
    // The fold-closed-prefix search emits each subgroup once, but keep the
    // canonical-key dedup as a guard; order stays enumeration order.
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut result = Vec::new();
    for g in raw {
        if seen.insert(g.canonical_key()) {
            result.push(g);
        }
    }
    Ok(result)
}

/// Incremental quotient: block assignment per vertex prefix plus the
/// quotient's out/in tables, with an undo log for backtracking.
struct PartitionState<'a> {
    base: &'a CoreGraph,
    rank: usize,
    /// Edges that become fully assigned at step t (their larger endpoint
    /// is t), as (src, dst, gen).
    edges_at: Vec<Vec<(u32, u32, u32)>>,
    assign: Vec<u32>,
    num_blocks: usize,
    block_out: Vec<Option<u32>>, // [block * rank + gen-1]
    block_in: Vec<Option<u32>>,
}

enum Undo {
    Out(usize),
    In(usize),
}

impl<'a> PartitionState<'a> {
    fn new(base: &'a CoreGraph) -> Self {
        let n = base.num_vertices() as usize;
        let rank = base.ambient_rank() as usize;
        let mut edges_at: Vec<Vec<(u32, u32, u32)>> = vec![Vec::new(); n];
        for e in base.edges() {
            let t = e.src.max(e.dst) as usize;
            edges_at[t].push((e.src, e.dst, e.gen));
        }
        let mut assign = vec![u32::MAX; n];
        assign[0] = 0;
        let mut state = PartitionState {
            base,
            rank,
            edges_at,
            assign,
            num_blocks: 1,
            block_out: vec![None; n * rank],
            block_in: vec![None; n * rank],
        };
        // Vertex 0 always sits in block 0; its loops (if any) seed the
        // tables and can never conflict on a folded base.
        let mut undo = Vec::new();
        let _ok = state.apply_edges(0, &mut undo);
        debug_assert!(_ok, "base graph is folded, vertex 0 cannot conflict");
        state
    }

    /// Record the edges that become known once vertex `t` is assigned.
    /// On conflict, roll back and report false.
    fn apply_edges(&mut self, t: usize, undo: &mut Vec<Undo>) -> bool {
        for &(src, dst, gen) in &self.edges_at[t] {
            let s = self.assign[src as usize] as usize;
            let d = self.assign[dst as usize];
            let g = (gen - 1) as usize;
            let oix = s * self.rank + g;
            match self.block_out[oix] {
                Some(existing) if existing != d => {
                    self.rollback(undo);
                    return false;
                }
                Some(_) => {}
                None => {
                    self.block_out[oix] = Some(d);
                    undo.push(Undo::Out(oix));
                }
            }
            let iix = d as usize * self.rank + g;
            let s32 = s as u32;
            match self.block_in[iix] {
                Some(existing) if existing != s32 => {
                    self.rollback(undo);
                    return false;
                }
                Some(_) => {}
                None => {
                    self.block_in[iix] = Some(s32);
                    undo.push(Undo::In(iix));
                }
            }
        }
        true
    }

    fn rollback(&mut self, undo: &mut Vec<Undo>) {
        for op in undo.drain(..) {
            match op {
                Undo::Out(i) => self.block_out[i] = None,
                Undo::In(i) => self.block_in[i] = None,
            }
        }
    }

    /// Try `assign[t] = b`, growing the block count if b is fresh.
    fn try_assign(&mut self, t: usize, b: u32, undo: &mut Vec<Undo>) -> bool {
        self.assign[t] = b;
        if b as usize == self.num_blocks {
            self.num_blocks += 1;
        }
        if self.apply_edges(t, undo) {
            true
        } else {
            self.unassign(t, b);
            false
        }
    }

    fn unassign(&mut self, t: usize, b: u32) {
        self.assign[t] = u32::MAX;
        if b as usize == self.num_blocks - 1 && !self.assign.iter().any(|&a| a == b) {
            self.num_blocks -= 1;
        }
    }

    /// Build the quotient graph at a leaf.  Foldedness holds by
    /// construction; connectivity is inherited from the base.
    fn emit(&self) -> CoreGraph {
        let mut edges = Vec::new();
        for block in 0..self.num_blocks {
            for g in 0..self.rank {
                if let Some(d) = self.block_out[block * self.rank + g] {
                    edges.push((block as u32, d, g as u32 + 1));
                }
            }
        }
        CoreGraph::from_folded_edges(
            self.base.ambient_rank(),
            self.num_blocks as u32,
            0,
            &edges,
        )
    }
}

fn descend(state: &mut PartitionState, t: usize, out: &mut Vec<CoreGraph>) {
    if t == state.assign.len() {
        out.push(state.emit());
        return;
    }
    // Restricted growth: any existing block, or the next fresh one.
    for b in 0..=state.num_blocks as u32 {
        let mut undo = Vec::new();
        if state.try_assign(t, b, &mut undo) {
            descend(state, t + 1, out);
            state.rollback(&mut undo);
            state.unassign(t, b);
        }
    }
}

/// Collect surviving prefixes of the restricted-growth search down to
/// `depth`, in lexicographic order.
fn collect_prefixes(state: &mut PartitionState, t: usize, depth: usize, out: &mut Vec<Vec<u32>>) {
    if t == depth {
        out.push(state.assign[..t].to_vec());
        return;
    }
    for b in 0..=state.num_blocks as u32 {
        let mut undo = Vec::new();
        if state.try_assign(t, b, &mut undo) {
            collect_prefixes(state, t + 1, depth, out);
            state.rollback(&mut undo);
            state.unassign(t, b);
        }
    }
}

/// Shard the search over prefixes of a fixed depth; workers share nothing
/// and the merge preserves the sequential order, so the result does not
/// depend on the thread count.
fn enumerate_sharded(base: &CoreGraph, threads: usize) -> Vec<CoreGraph> {
    let n = base.num_vertices() as usize;
    let depth = n.min(4).max(2);
    let mut prefixes = Vec::new();
    let mut state = PartitionState::new(base);
    collect_prefixes(&mut state, 1, depth, &mut prefixes);

    let mut per_prefix: Vec<Vec<CoreGraph>> = Vec::with_capacity(prefixes.len());
    per_prefix.resize_with(prefixes.len(), Vec::new);
    std::thread::scope(|scope| {
        let nthreads = threads.max(1);
        let mut buckets: Vec<Vec<(&Vec<u32>, &mut Vec<CoreGraph>)>> =
            (0..nthreads).map(|_| Vec::new()).collect();
        for (k, pair) in prefixes.iter().zip(per_prefix.iter_mut()).enumerate() {
            buckets[k % nthreads].push(pair);
        }
        for bucket in buckets {
            scope.spawn(move || {
                for (prefix, slot) in bucket {
                    let mut st = PartitionState::new(base);
                    for (t, &b) in prefix.iter().enumerate().skip(1) {
                        // The prefix survived collection, so replaying it
                        // cannot conflict; the undo log is dropped because
                        // this state is never backtracked past the prefix.
                        let mut undo = Vec::new();
                        let _ok = st.try_assign(t, b, &mut undo);
                        debug_assert!(_ok, "prefix was validated during collection");
                    }
                    descend(&mut st, prefix.len(), slot);
                }
            });
        }
    });
    per_prefix.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stallings::{core_graph_of_subgroup, GraphBuilder};

    fn w(text: &str) -> Word {
        Word::parse(text, None).unwrap()
    }

    fn fringe(text: &str) -> Vec<FringeElement> {
        enumerate_fringe(&w(text), &FringeConfig::default()).unwrap()
    }

    #[test]
    fn seven_subgroups_cover_x2y2() {
        let els = fringe("xxyy");
        assert_eq!(els.len(), 7);
        let mut ranks: Vec<usize> = els.iter().map(|e| e.graph.rank()).collect();
        ranks.sort_unstable();
        assert_eq!(ranks, vec![1, 2, 2, 2, 2, 2, 3]);
    }

    #[test]
    fn tiny_fringes() {
        assert_eq!(fringe("x").len(), 1);
        let els = fringe("xx");
        assert_eq!(els.len(), 2);
        let mut shapes: Vec<(u32, usize)> = els
            .iter()
            .map(|e| (e.graph.num_vertices(), e.graph.num_edges()))
            .collect();
        shapes.sort_unstable();
        assert_eq!(shapes, vec![(1, 1), (2, 2)]);
    }

    #[test]
    fn q_m_of_x2y2() {
        let cfg = FringeConfig::default();
        let q2 = q_m(&w("xxyy"), Modulus::Finite(2), &cfg).unwrap();
        assert_eq!(q2.len(), 1);
        let g = &q2[0].graph;
        // The one-vertex graph with both loops: F_2 itself.
        assert_eq!((g.num_vertices(), g.num_edges(), g.rank()), (1, 2, 2));
        assert!(q_m(&w("xxyy"), Modulus::Finite(3), &cfg).unwrap().is_empty());
        assert!(q_m(&w("xxyy"), Modulus::Infinity, &cfg).unwrap().is_empty());
    }

    #[test]
    fn q_m_of_commutator_and_single_letter() {
        let cfg = FringeConfig::default();
        let qinf = q_m(&w("xyXY"), Modulus::Infinity, &cfg).unwrap();
        assert!(qinf
            .iter()
            .any(|e| e.graph.num_vertices() == 1 && e.graph.num_edges() == 2));
        assert!(q_m(&w("x"), Modulus::Finite(2), &cfg).unwrap().is_empty());
        // m = 1 places no condition.
        assert_eq!(
            q_m(&w("xxyy"), Modulus::Finite(1), &cfg).unwrap().len(),
            7
        );
    }

    #[test]
    fn nesting_of_q_m() {
        let cfg = FringeConfig::default();
        for text in ["xxyy", "xyXY", "xxxYY", "xyxy"] {
            let word = w(text);
            let keys = |els: &[FringeElement]| -> HashSet<Vec<u8>> {
                els.iter().map(|e| e.graph.canonical_key()).collect()
            };
            let all = keys(&q_m(&word, Modulus::Finite(1), &cfg).unwrap());
            let q2 = keys(&q_m(&word, Modulus::Finite(2), &cfg).unwrap());
            let qi = keys(&q_m(&word, Modulus::Infinity, &cfg).unwrap());
            assert!(qi.is_subset(&q2));
            assert!(q2.is_subset(&all));
        }
    }

    #[test]
    fn profiles_cover_every_edge() {
        for text in ["x", "xx", "xxyy", "xyXY", "xYxY"] {
            for el in fringe(text) {
                assert!(el.profile.unsigned.iter().all(|&c| c >= 1));
                let r = el.graph.rank();
                assert!(r >= 1 && r <= w(text).len());
            }
        }
    }

    #[test]
    fn fringe_size_is_rotation_invariant() {
        let rotations = |text: &str| -> Vec<String> {
            let chars: Vec<char> = text.chars().collect();
            (0..chars.len())
                .map(|k| chars[k..].iter().chain(chars[..k].iter()).collect())
                .collect()
        };
        for text in ["xxyy", "xyxYY", "xxYxy"] {
            let baseline = fringe(text).len();
            for rot in rotations(text) {
                let rotated = Word::parse(&rot, None).unwrap();
                if !rotated.is_cyclically_reduced() || rotated.len() != text.len() {
                    continue;
                }
                assert_eq!(
                    enumerate_fringe(&rotated, &FringeConfig::default())
                        .unwrap()
                        .len(),
                    baseline,
                    "rotation {rot} of {text}"
                );
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let cfg = FringeConfig {
            max_base_vertices: 4,
            threads: 1,
        };
        let err = enumerate_fringe(&w("xyxyxy"), &cfg).unwrap_err();
        assert!(matches!(err, Error::FringeCapExceeded { len: 6, cap: 4 }));
        assert!(err.is_resource_limit());
    }

    #[test]
    fn threading_does_not_change_results() {
        for text in ["xxyy", "xyXY", "xxyxYxy"] {
            let seq = fringe(text);
            let par = enumerate_fringe(
                &w(text),
                &FringeConfig {
                    max_base_vertices: 16,
                    threads: 3,
                },
            )
            .unwrap();
            let k1: Vec<_> = seq.iter().map(|e| e.graph.canonical_key()).collect();
            let k2: Vec<_> = par.iter().map(|e| e.graph.canonical_key()).collect();
            assert_eq!(k1, k2);
        }
    }

    #[test]
    fn quotients_of_a_subgroup_graph() {
        // Base <x^2, y>: quotienting its 2 vertices gives the base itself
        // and the full bouquet.
        let base = core_graph_of_subgroup(&[w("xx"), Word::parse("y", Some(2)).unwrap()]).unwrap();
        let quots = enumerate_quotients(&base, &FringeConfig::default()).unwrap();
        assert_eq!(quots.len(), 2);
        let mut shapes: Vec<(u32, usize)> = quots
            .iter()
            .map(|g| (g.num_vertices(), g.num_edges()))
            .collect();
        shapes.sort_unstable();
        assert_eq!(shapes, vec![(1, 2), (2, 3)]);
    }

    /// Independent oracle: enumerate ALL partitions (no pruning), merge
    /// blocks with a general fold, and compare canonical key sets.
    fn brute_force_fringe_keys(word: &Word) -> HashSet<Vec<u8>> {
        let base = core_graph_of_word(word).unwrap();
        let n = base.num_vertices() as usize;
        let mut keys = HashSet::new();
        // Iterate restricted-growth strings over n vertices.
        let mut rgs = vec![0u32; n];
        loop {
            // Quotient by the partition, then fold whatever comes out.
            let blocks = *rgs.iter().max().unwrap() as u32 + 1;
            let mut b = GraphBuilder::new(base.ambient_rank(), blocks, rgs[0]);
            for e in base.edges() {
                b.add_edge(rgs[e.src as usize], rgs[e.dst as usize], e.gen);
            }
            keys.insert(b.fold().canonical_key());

            // Next restricted-growth string.
            let mut i = n;
            loop {
                if i == 1 {
                    return keys;
                }
                i -= 1;
                let max_prefix = rgs[..i].iter().max().unwrap() + 1;
                if rgs[i] < max_prefix {
                    rgs[i] += 1;
                    for v in rgs[i + 1..].iter_mut() {
                        *v = 0;
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn pruned_enumeration_matches_brute_force() {
        for text in ["x", "xx", "xxyy", "xyXY", "xxxyy", "xYxYxY", "xxyxYy"] {
            let word = w(text);
            let pruned: HashSet<Vec<u8>> = fringe(text)
                .iter()
                .map(|e| e.graph.canonical_key())
                .collect();
            let brute = brute_force_fringe_keys(&word);
            assert_eq!(pruned, brute, "fringe mismatch for {text}");
        }
    }

    mod props {
        use super::*;
        use crate::words::Letter;
        use proptest::prelude::*;

        fn arb_cyc_word(max_len: usize) -> impl Strategy<Value = Word> {
            proptest::collection::vec((1u32..=2, proptest::bool::ANY), 1..=max_len)
                .prop_filter_map("cyclically reduced nonempty", |ls| {
                    let word =
                        Word::from_letters(ls.into_iter().map(|(g, p)| Letter::new(g, p)), 2)
                            .ok()?;
                    let (core, _) = word.cyclic_reduce();
                    (!core.is_empty()).then_some(core)
                })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn pruned_equals_brute_force(word in arb_cyc_word(6)) {
                let pruned: HashSet<Vec<u8>> =
                    enumerate_fringe(&word, &FringeConfig::default()).unwrap()
                        .iter().map(|e| e.graph.canonical_key()).collect();
                prop_assert_eq!(pruned, brute_force_fringe_keys(&word));
            }

            #[test]
            fn signed_counts_match_basis_exponents(word in arb_cyc_word(6)) {
                // Combinatorial vs algebraic membership in K_m, both ways.
                let els = enumerate_fringe(&word, &FringeConfig::default()).unwrap();
                for m in [Modulus::Finite(2), Modulus::Finite(3), Modulus::Infinity] {
                    for el in &els {
                        let combinatorial = el.profile.annihilated_by(m);
                        let rewritten = el.graph.rewrite_in_basis(&word)
                            .expect("fringe elements contain w");
                        let algebraic = rewritten.ambient_km_member(m);
                        prop_assert_eq!(combinatorial, algebraic,
                            "word {} on a fringe element of rank {}", word, el.graph.rank());
                    }
                }
            }
        }
    }
}

use super::{MAX_BAG, MAX_PATTERN};
use crate::error::{Error, Result};
use crate::graph::{diameter, Graph};

/// Marks an unmapped pattern vertex in [`PartialMatch::phi`].
pub const NONE: u8 = u8::MAX;
pub const FLAG_INSIDE: u8 = 1;
pub const FLAG_OUTSIDE: u8 = 2;

/// Connected pattern with precomputed neighbor masks.
#[derive(Clone, Debug)]
pub struct Pattern {
    graph: Graph,
    adj: Vec<u16>,
    order: Vec<usize>,
    diameter: usize,
}

impl Pattern {
    pub fn new(h: &Graph) -> Result<Self> {
        let k = h.n();
        if k > MAX_PATTERN {
            return Err(Error::PatternTooLarge(k));
        }
        if k == 0 {
            return Err(Error::Invalid("empty pattern".into()));
        }
        if !h.is_connected() {
            return Err(Error::DisconnectedPattern);
        }
        let adj = (0..k)
            .map(|a| h.neighbors(a).iter().fold(0u16, |m, &b| m | 1 << b))
            .collect();
        // BFS from a maximum-degree vertex so mapped neighbors constrain early
        let start = (0..k).max_by_key(|&a| (h.degree(a), std::cmp::Reverse(a))).unwrap();
        let mut order = vec![start];
        let mut seen = 1u16 << start;
        let mut i = 0;
        while i < order.len() {
            let a = order[i];
            let mut next: Vec<usize> = h.neighbors(a).iter().copied().filter(|&b| seen >> b & 1 == 0).collect();
            next.sort_by_key(|&b| (std::cmp::Reverse(h.degree(b)), b));
            for b in next {
                seen |= 1 << b;
                order.push(b);
            }
            i += 1;
        }
        Ok(Pattern {
            graph: h.clone(),
            adj,
            order,
            diameter: diameter(h).expect("connected"),
        })
    }

    pub fn k(&self) -> usize {
        self.adj.len()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn diameter(&self) -> usize {
        self.diameter
    }

    pub fn all(&self) -> u16 {
        ((1u32 << self.k()) - 1) as u16
    }

    pub fn neighbor_mask(&self, a: usize) -> u16 {
        self.adj[a]
    }
}

/// DP state at one bag. Positions refer to the sorted bag vertex list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialMatch {
    /// Bag position per pattern vertex, or [`NONE`].
    pub phi: [u8; MAX_PATTERN],
    /// Pattern vertices with a position.
    pub dom: u16,
    /// Pattern vertices placed strictly below the bag.
    pub child: u16,
    /// Separating variant: bag positions colored inside / outside.
    pub inside: u64,
    pub outside: u64,
    /// Separating variant: [`FLAG_INSIDE`], [`FLAG_OUTSIDE`] seen at or below.
    pub flags: u8,
}

impl PartialMatch {
    pub const EMPTY: PartialMatch = PartialMatch {
        phi: [NONE; MAX_PATTERN],
        dom: 0,
        child: 0,
        inside: 0,
        outside: 0,
        flags: 0,
    };

    /// Same state with inside and outside exchanged.
    pub fn swapped(&self) -> Self {
        PartialMatch {
            inside: self.outside,
            outside: self.inside,
            flags: swap_flags(self.flags),
            ..*self
        }
    }

    /// Smaller of the state and its swap. Validity is invariant under the
    /// swap, so the separating variant keeps one state per pair.
    pub fn canonical(&self) -> Self {
        (*self).min(self.swapped())
    }

    pub fn unmatched(&self, all: u16) -> u16 {
        all & !(self.dom | self.child)
    }

    pub fn occupied(&self) -> u64 {
        bits16(self.dom).fold(0, |m, a| m | 1 << self.phi[a])
    }

    /// Every pattern vertex placed, and for the separating variant terminals of
    /// both colors seen.
    pub fn is_complete(&self, all: u16, separating: bool) -> bool {
        self.unmatched(all) == 0 && (!separating || self.flags == FLAG_INSIDE | FLAG_OUTSIDE)
    }
}

fn swap_flags(f: u8) -> u8 {
    (f & FLAG_INSIDE) << 1 | (f & FLAG_OUTSIDE) >> 1
}

pub(crate) fn bits16(mut m: u16) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            b
        })
    })
}

pub(crate) fn bits64(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            b
        })
    })
}

fn components16(mut rest: u16, adj: &[u16]) -> Vec<u16> {
    let mut out = Vec::new();
    while rest != 0 {
        let mut comp = rest & rest.wrapping_neg();
        loop {
            let grown = bits16(comp).fold(comp, |m, a| m | (adj[a] & rest));
            if grown == comp {
                break;
            }
            comp = grown;
        }
        rest &= !comp;
        out.push(comp);
    }
    out
}

fn components64(mut rest: u64, adj: &[u64]) -> Vec<u64> {
    let mut out = Vec::new();
    while rest != 0 {
        let mut comp = rest & rest.wrapping_neg();
        let mut frontier = comp;
        while frontier != 0 {
            let grown = bits64(frontier).fold(0, |m, q| m | adj[q]) & rest & !comp;
            comp |= grown;
            frontier = grown;
        }
        rest &= !comp;
        out.push(comp);
    }
    out
}

/// A bag with adjacency, allowed and terminal masks over its positions.
#[derive(Clone, Debug)]
pub(crate) struct BagInfo {
    pub vertices: Vec<usize>,
    pub adj: Vec<u64>,
    pub allowed: u64,
    /// Positions that may host each pattern vertex.
    pub hosts: [u64; MAX_PATTERN],
    pub terminal: u64,
    pub full: u64,
}

impl BagInfo {
    pub fn new(g: &Graph, bag: &[usize], allowed: &[bool], terminals: Option<&[bool]>) -> Result<Self> {
        if bag.len() > MAX_BAG {
            return Err(Error::BagTooLarge(bag.len()));
        }
        let mut adj = vec![0u64; bag.len()];
        let mut allowed_mask = 0;
        let mut terminal = 0;
        for (i, &v) in bag.iter().enumerate() {
            for (j, &w) in bag.iter().enumerate() {
                if g.has_edge(v, w) {
                    adj[i] |= 1 << j;
                }
            }
            if allowed[v] {
                allowed_mask |= 1 << i;
            }
            if terminals.is_some_and(|t| t[v]) {
                terminal |= 1 << i;
            }
        }
        let full = if bag.len() == 64 { u64::MAX } else { (1u64 << bag.len()) - 1 };
        Ok(BagInfo {
            vertices: bag.to_vec(),
            adj,
            allowed: allowed_mask,
            hosts: [allowed_mask; MAX_PATTERN],
            terminal,
            full,
        })
    }

    /// Narrows the hosts to `domains`, a mask of admissible pattern vertices
    /// per graph vertex.
    pub fn restrict(&mut self, domains: &[u16]) {
        for (a, hosts) in self.hosts.iter_mut().enumerate() {
            for (i, &v) in self.vertices.iter().enumerate() {
                if domains[v] >> a & 1 == 0 {
                    *hosts &= !(1 << i);
                }
            }
        }
        self.allowed &= self.hosts.iter().fold(0, |acc, h| acc | h);
    }

    fn local_flags(&self, inside: u64, outside: u64) -> u8 {
        let mut f = 0;
        if inside & self.terminal != 0 {
            f |= FLAG_INSIDE;
        }
        if outside & self.terminal != 0 {
            f |= FLAG_OUTSIDE;
        }
        f
    }
}

/// Position map from a child bag into its parent bag.
#[derive(Clone, Debug, Default)]
pub(crate) struct Link {
    pub map: Vec<u8>,
    /// Parent positions also present in the child.
    pub shared: u64,
}

impl Link {
    pub fn new(child: &[usize], parent: &[usize]) -> Self {
        let mut shared = 0;
        let map = child
            .iter()
            .map(|v| match parent.binary_search(v) {
                Ok(q) => {
                    shared |= 1 << q;
                    q as u8
                }
                Err(_) => NONE,
            })
            .collect();
        Link { map, shared }
    }
}

/// Enumerates locally consistent states of a bag.
///
/// `leaf` restricts to states without vertices placed below and with exact
/// flags; otherwise `child` ranges over unions of components of `H - dom` (each
/// touching `dom`, or everything when `dom` is empty) and flags over supersets
/// of the locally visible ones. Returns `None` once more than `limit` states
/// would be produced.
pub(crate) fn enumerate_states(
    bag: &BagInfo,
    p: &Pattern,
    leaf: bool,
    separating: bool,
    limit: usize,
) -> Option<Vec<PartialMatch>> {
    struct Walk<'a> {
        bag: &'a BagInfo,
        p: &'a Pattern,
        leaf: bool,
        separating: bool,
        limit: usize,
        out: Vec<PartialMatch>,
        overflow: bool,
    }

    impl Walk<'_> {
        fn go(&mut self, i: usize, phi: &mut [u8; MAX_PATTERN], dom: u16, used: u64) {
            if self.overflow {
                return;
            }
            if i == self.p.k() {
                self.emit(phi, dom, used);
                return;
            }
            let a = self.p.order[i];
            self.go(i + 1, phi, dom, used);
            let candidates = self.bag.hosts[a] & !used;
            for q in bits64(candidates) {
                let fits = bits16(self.p.adj[a] & dom).all(|b| self.bag.adj[q] >> phi[b] & 1 == 1);
                if fits {
                    phi[a] = q as u8;
                    self.go(i + 1, phi, dom | 1 << a, used | 1 << q);
                    phi[a] = NONE;
                }
            }
        }

        fn emit(&mut self, phi: &[u8; MAX_PATTERN], dom: u16, used: u64) {
            let all = self.p.all();
            let rest = all & !dom;
            let child_options: Vec<u16> = if self.leaf || rest == 0 {
                vec![0]
            } else if dom == 0 {
                vec![0, all]
            } else {
                let comps = components16(rest, &self.p.adj);
                (0u32..1 << comps.len())
                    .map(|s| {
                        comps
                            .iter()
                            .enumerate()
                            .filter(|&(j, _)| s >> j & 1 == 1)
                            .fold(0, |m, (_, &c)| m | c)
                    })
                    .collect()
            };
            let mut base = PartialMatch::EMPTY;
            base.phi = *phi;
            base.dom = dom;
            if !self.separating {
                if self.out.len() + child_options.len() > self.limit {
                    self.overflow = true;
                    return;
                }
                for c in child_options {
                    self.out.push(PartialMatch { child: c, ..base });
                }
                return;
            }
            let comps = components64(self.bag.full & !used, &self.bag.adj);
            if comps.len() >= 24 || self.out.len() + (child_options.len() << comps.len()) > self.limit {
                self.overflow = true;
                return;
            }
            for s in 0u32..1 << comps.len() {
                let inside = comps
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| s >> j & 1 == 1)
                    .fold(0, |m, (_, &c)| m | c);
                let outside = self.bag.full & !used & !inside;
                let local = self.bag.local_flags(inside, outside);
                for &c in &child_options {
                    for flags in 0..4u8 {
                        let exact_ok = if self.leaf { flags == local } else { flags & local == local };
                        if exact_ok {
                            self.out.push(PartialMatch {
                                child: c,
                                inside,
                                outside,
                                flags,
                                ..base
                            });
                        }
                    }
                }
                if self.out.len() > self.limit {
                    self.overflow = true;
                    return;
                }
            }
        }
    }

    let mut walk = Walk {
        bag,
        p,
        leaf,
        separating,
        limit,
        out: Vec::new(),
        overflow: false,
    };
    walk.go(0, &mut [NONE; MAX_PATTERN], 0, 0);
    (!walk.overflow).then_some(walk.out)
}

/// A child state expressed in parent positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Lifted {
    pub phi: [u8; MAX_PATTERN],
    pub dom: u16,
    /// Everything the child subtree has placed.
    pub matched: u16,
    /// Placed below the parent: the child's own `child` plus forgotten vertices.
    pub child: u16,
    pub occ: u64,
    pub inside: u64,
    pub outside: u64,
    pub flags: u8,
}

impl Lifted {
    pub const EMPTY: Lifted = Lifted {
        phi: [NONE; MAX_PATTERN],
        dom: 0,
        matched: 0,
        child: 0,
        occ: 0,
        inside: 0,
        outside: 0,
        flags: 0,
    };

    pub fn swapped(&self) -> Self {
        Lifted {
            inside: self.outside,
            outside: self.inside,
            flags: swap_flags(self.flags),
            ..*self
        }
    }
}

/// Moves a child state into parent positions. A vertex whose image leaves the
/// parent bag becomes placed-below, which needs all of its pattern neighbors to
/// be placed already.
pub(crate) fn lift(m: &PartialMatch, link: &Link, p: &Pattern) -> Option<Lifted> {
    let unmatched = m.unmatched(p.all());
    let mut out = Lifted {
        matched: m.dom | m.child,
        child: m.child,
        flags: m.flags,
        ..Lifted::EMPTY
    };
    for a in bits16(m.dom) {
        let q = link.map[m.phi[a] as usize];
        if q == NONE {
            if p.adj[a] & unmatched != 0 {
                return None;
            }
            out.child |= 1 << a;
        } else {
            out.phi[a] = q;
            out.dom |= 1 << a;
            out.occ |= 1 << q;
        }
    }
    for pos in bits64(m.inside) {
        let q = link.map[pos];
        if q != NONE {
            out.inside |= 1 << q;
        }
    }
    for pos in bits64(m.outside) {
        let q = link.map[pos];
        if q != NONE {
            out.outside |= 1 << q;
        }
    }
    Some(out)
}

/// What two lifted children must agree on: images and colors on the positions
/// present in both.
pub(crate) type JoinKey = ([u8; MAX_PATTERN], u64, u64);

pub(crate) fn join_key(l: &Lifted, shared: u64) -> JoinKey {
    let mut phi = [NONE; MAX_PATTERN];
    for a in bits16(l.dom) {
        if shared >> l.phi[a] & 1 == 1 {
            phi[a] = l.phi[a];
        }
    }
    (phi, l.inside & shared, l.outside & shared)
}

/// Parent-side data for joining two children.
pub(crate) struct JoinCtx<'a> {
    pub bag: &'a BagInfo,
    pub pattern: &'a Pattern,
    /// Parent positions present in both children.
    pub shared: u64,
    /// Parent positions present in neither child.
    pub fresh: u64,
    pub separating: bool,
    /// Report one state per inside/outside swap pair.
    pub canonical: bool,
}

impl JoinCtx<'_> {
    pub fn new<'a>(bag: &'a BagInfo, pattern: &'a Pattern, left: &Link, right: &Link, separating: bool) -> JoinCtx<'a> {
        JoinCtx {
            bag,
            pattern,
            shared: left.shared & right.shared,
            fresh: bag.full & !(left.shared | right.shared),
            separating,
            canonical: separating,
        }
    }

    /// All parent states combining `a` and `b`, which must have equal join keys.
    /// With `introduce`, unmatched pattern vertices may be placed on fresh
    /// positions.
    pub fn combine(&self, a: &Lifted, b: &Lifted, introduce: bool, out: &mut impl FnMut(PartialMatch)) {
        let p = self.pattern;
        let mut on_shared = 0u16;
        for x in bits16(a.dom) {
            if self.shared >> a.phi[x] & 1 == 1 {
                on_shared |= 1 << x;
            }
        }
        if a.matched & b.matched != on_shared {
            return;
        }
        for x in bits16(a.dom & !on_shared) {
            let row = self.bag.adj[a.phi[x] as usize];
            if bits16(p.adj[x] & b.dom & !on_shared).any(|y| row >> b.phi[y] & 1 == 0) {
                return;
            }
        }
        let mut phi = a.phi;
        for y in bits16(b.dom) {
            phi[y] = b.phi[y];
        }
        let dom = a.dom | b.dom;
        let occ = a.occ | b.occ;
        let child = a.child | b.child;
        let flags = a.flags | b.flags;
        let (inside, outside) = (a.inside | b.inside, a.outside | b.outside);
        let free = if introduce { self.fresh & self.bag.allowed & !occ } else { 0 };
        let open = p.all() & !(a.matched | b.matched);
        let mut finish = |phi: &[u8; MAX_PATTERN], dom: u16, occ: u64| {
            self.finish(phi, dom, child, occ, inside, outside, flags, out);
        };
        if free == 0 || open == 0 {
            finish(&phi, dom, occ);
        } else {
            let order: Vec<usize> = p.order.iter().copied().filter(|&x| open >> x & 1 == 1).collect();
            self.introduce(&order, &mut phi, dom, occ, free, &mut finish);
        }
    }

    fn introduce(
        &self,
        order: &[usize],
        phi: &mut [u8; MAX_PATTERN],
        dom: u16,
        occ: u64,
        free: u64,
        finish: &mut impl FnMut(&[u8; MAX_PATTERN], u16, u64),
    ) {
        let Some((&x, rest)) = order.split_first() else {
            finish(phi, dom, occ);
            return;
        };
        self.introduce(rest, phi, dom, occ, free, finish);
        for q in bits64(free & self.bag.hosts[x] & !occ) {
            let row = self.bag.adj[q];
            if bits16(self.pattern.adj[x] & dom).all(|y| row >> phi[y] & 1 == 1) {
                phi[x] = q as u8;
                self.introduce(rest, phi, dom | 1 << x, occ | 1 << q, free, finish);
                phi[x] = NONE;
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        &self,
        phi: &[u8; MAX_PATTERN],
        dom: u16,
        child: u16,
        occ: u64,
        inside: u64,
        outside: u64,
        flags: u8,
        out: &mut impl FnMut(PartialMatch),
    ) {
        let mut state = PartialMatch {
            phi: *phi,
            dom,
            child,
            ..PartialMatch::EMPTY
        };
        if !self.separating {
            out(state);
            return;
        }
        let residual = self.bag.full & !occ;
        let mut forced_in = 0;
        let mut free = Vec::new();
        for comp in components64(residual, &self.bag.adj) {
            match (comp & inside != 0, comp & outside != 0) {
                (true, true) => return,
                (true, false) => forced_in |= comp,
                (false, true) => {}
                (false, false) => free.push(comp),
            }
        }
        for s in 0u64..1 << free.len() {
            let chosen = free
                .iter()
                .enumerate()
                .filter(|&(j, _)| s >> j & 1 == 1)
                .fold(0, |m, (_, &c)| m | c);
            state.inside = forced_in | chosen;
            state.outside = residual & !state.inside;
            state.flags = flags | self.bag.local_flags(state.inside, state.outside);
            out(if self.canonical { state.canonical() } else { state });
        }
    }
}

/// All locally consistent states of `bag` (a sorted vertex list of `g`): partial
/// injective edge-preserving maps into allowed bag vertices, every admissible
/// placed-below set, and for the separating variant every componentwise
/// inside/outside coloring with compatible flags.
pub fn enumerate_partial_matches(
    g: &Graph,
    bag: &[usize],
    pattern: &Pattern,
    allowed: &[bool],
    terminals: Option<&[bool]>,
) -> Result<Vec<PartialMatch>> {
    let info = BagInfo::new(g, bag, allowed, terminals)?;
    Ok(enumerate_states(&info, pattern, false, terminals.is_some(), usize::MAX).expect("no limit"))
}

/// Whether `child` (at `child_bag`) can sit below `parent` (at `parent_bag`):
/// images agree on shared bag vertices, vertices leaving the parent bag are
/// placed below in the parent and have no unmatched neighbors, and unmatched
/// vertices of the parent are unmatched in the child. The separating variant
/// also needs equal colors on shared vertices and inherited flags.
pub fn consistent(
    parent: &PartialMatch,
    child: &PartialMatch,
    parent_bag: &[usize],
    child_bag: &[usize],
    pattern: &Pattern,
) -> bool {
    let link = Link::new(child_bag, parent_bag);
    let Some(l) = lift(child, &link, pattern) else {
        return false;
    };
    let all = pattern.all();
    bits16(l.dom).all(|a| parent.phi[a] == l.phi[a])
        && bits16(parent.dom).all(|a| link.shared >> parent.phi[a] & 1 == 0 || l.dom >> a & 1 == 1)
        && l.child & !parent.child == 0
        && parent.unmatched(all) & !child.unmatched(all) == 0
        && parent.inside & link.shared == l.inside
        && parent.outside & link.shared == l.outside
        && child.flags & !parent.flags == 0
}

/// Whether `parent` arises from `left` and `right`: both consistent with it,
/// every vertex placed below the parent placed in exactly one child subtree,
/// new images only on bag vertices missing from both children, and the
/// separating colors and flags propagated exactly.
#[allow(clippy::too_many_arguments)]
pub fn compatible(
    g: &Graph,
    parent: &PartialMatch,
    left: &PartialMatch,
    right: &PartialMatch,
    bags: [&[usize]; 3],
    pattern: &Pattern,
    allowed: &[bool],
    terminals: Option<&[bool]>,
) -> Result<bool> {
    let [xb, lb, rb] = bags;
    let info = BagInfo::new(g, xb, allowed, terminals)?;
    let (ll, rl) = (Link::new(lb, xb), Link::new(rb, xb));
    let mut ctx = JoinCtx::new(&info, pattern, &ll, &rl, terminals.is_some());
    ctx.canonical = false;
    let (Some(a), Some(b)) = (lift(left, &ll, pattern), lift(right, &rl, pattern)) else {
        return Ok(false);
    };
    if join_key(&a, ctx.shared) != join_key(&b, ctx.shared) {
        return Ok(false);
    }
    let mut found = false;
    ctx.combine(&a, &b, true, &mut |m| found |= m == *parent);
    Ok(found)
}

/// The parent state that places nothing new: images leaving the bag become
/// placed-below, unmatched vertices stay unmatched. `None` when a leaving
/// vertex still has unmatched neighbors. New bag vertices of the separating
/// variant take the color of their component, or outside when unconstrained.
pub fn trivial_extension(
    g: &Graph,
    child: &PartialMatch,
    child_bag: &[usize],
    parent_bag: &[usize],
    pattern: &Pattern,
    allowed: &[bool],
    terminals: Option<&[bool]>,
) -> Result<Option<PartialMatch>> {
    let info = BagInfo::new(g, parent_bag, allowed, terminals)?;
    let link = Link::new(child_bag, parent_bag);
    Ok(trivial_extension_in(&info, &link, child, pattern, terminals.is_some()))
}

pub(crate) fn trivial_extension_in(
    bag: &BagInfo,
    link: &Link,
    child: &PartialMatch,
    pattern: &Pattern,
    separating: bool,
) -> Option<PartialMatch> {
    let lifted = lift(child, link, pattern)?;
    let mut ctx = JoinCtx::new(bag, pattern, link, &Link::default(), separating);
    ctx.canonical = false;
    let mut first = None;
    ctx.combine(&lifted, &Lifted::EMPTY, false, &mut |m| {
        first.get_or_insert(m);
    });
    first
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, cycle, path};

    fn all_allowed(n: usize) -> Vec<bool> {
        vec![true; n]
    }

    #[test]
    fn empty_bag_states_are_bipartitions() {
        let g = path(3);
        let p = Pattern::new(&path(3)).unwrap();
        let states = enumerate_partial_matches(&g, &[], &p, &all_allowed(3), None).unwrap();
        // connected pattern: nothing placed, or everything placed below
        assert_eq!(states.len(), 2);
        assert!(states.iter().all(|s| s.dom == 0));
    }

    #[test]
    fn single_edge_into_adjacent_pair() {
        let g = path(2);
        let p = Pattern::new(&path(2)).unwrap();
        let states = enumerate_partial_matches(&g, &[0, 1], &p, &all_allowed(2), None).unwrap();
        let full: Vec<_> = states.iter().filter(|s| s.dom == 0b11).collect();
        assert_eq!(full.len(), 2);
        assert!(full.iter().any(|s| s.phi[0] == 0 && s.phi[1] == 1));
        assert!(full.iter().any(|s| s.phi[0] == 1 && s.phi[1] == 0));
    }

    #[test]
    fn state_count_bound() {
        let g = complete(4);
        for k in 1..=4 {
            let p = Pattern::new(&path(k)).unwrap();
            let bag = [0, 1, 2, 3];
            let n = enumerate_partial_matches(&g, &bag, &p, &all_allowed(4), None).unwrap().len();
            let tau = bag.len() - 1;
            assert!(n <= (tau + 3).pow(k as u32), "k = {k}: {n}");
        }
    }

    #[test]
    fn separating_state_count_bound() {
        let g = cycle(6);
        let p = Pattern::new(&path(2)).unwrap();
        let bag = [0, 1, 2, 3];
        let t = vec![true; 6];
        let n = enumerate_partial_matches(&g, &bag, &p, &all_allowed(6), Some(&t)).unwrap().len();
        let (tau, k) = (3usize, 2u32);
        assert!(n <= (tau + 3).pow(k) << (3 * k + 3));
    }

    #[test]
    fn consistency_rules() {
        // pattern x - y; bags {0,1} (parent) and {1,2} (child) on the path 0-1-2
        let p = Pattern::new(&path(2)).unwrap();
        let mut child = PartialMatch::EMPTY;
        child.phi[0] = 0; // x -> vertex 1
        child.phi[1] = 1; // y -> vertex 2
        child.dom = 0b11;
        let mut parent = PartialMatch::EMPTY;
        parent.phi[0] = 1; // x -> vertex 1
        parent.dom = 0b01;
        parent.child = 0b10;
        assert!(consistent(&parent, &child, &[0, 1], &[1, 2], &p));
        // disagreement on the shared vertex
        let mut wrong = parent;
        wrong.phi[0] = 0;
        assert!(!consistent(&wrong, &child, &[0, 1], &[1, 2], &p));
        // child's placed-below set not contained in the parent's
        let mut below = PartialMatch::EMPTY;
        below.child = 0b11;
        assert!(!consistent(&PartialMatch::EMPTY, &below, &[0, 1], &[1, 2], &p));
    }

    #[test]
    fn forget_rule() {
        // x placed on vertex 2 which leaves the parent bag while y is unmatched
        let p = Pattern::new(&path(2)).unwrap();
        let mut child = PartialMatch::EMPTY;
        child.phi[0] = 1;
        child.dom = 0b01;
        let mut parent = PartialMatch::EMPTY;
        parent.child = 0b01;
        assert!(!consistent(&parent, &child, &[0, 1], &[1, 2], &p));
    }

    #[test]
    fn compatibility() {
        // star bag {0}: children {0,1} and {0,2}; pattern P3 centered at 0
        let g = Graph::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
        let p = Pattern::new(&path(3)).unwrap(); // 0 - 1 - 2, center 1
        let allowed = all_allowed(3);
        let mut left = PartialMatch::EMPTY;
        left.phi[1] = 0;
        left.phi[0] = 1;
        left.dom = 0b011;
        let mut right = PartialMatch::EMPTY;
        right.phi[1] = 0;
        right.phi[2] = 1;
        right.dom = 0b110;
        let mut parent = PartialMatch::EMPTY;
        parent.phi[1] = 0;
        parent.dom = 0b010;
        parent.child = 0b101;
        let bags: [&[usize]; 3] = [&[0], &[0, 1], &[0, 2]];
        assert!(compatible(&g, &parent, &left, &right, bags, &p, &allowed, None).unwrap());
        // both children place pattern vertex 0
        let mut both = right;
        both.phi[2] = NONE;
        both.phi[0] = 1;
        both.dom = 0b011;
        assert!(!compatible(&g, &parent, &left, &both, bags, &p, &allowed, None).unwrap());
    }

    #[test]
    fn separating_colors_must_agree() {
        let g = path(3);
        let p = Pattern::new(&Graph::empty(1)).unwrap();
        let t = vec![true; 3];
        let allowed = all_allowed(3);
        let bags: [&[usize]; 3] = [&[1], &[0, 1], &[1, 2]];
        let mut left = PartialMatch::EMPTY;
        left.inside = 0b11;
        left.flags = FLAG_INSIDE;
        let mut right = PartialMatch::EMPTY;
        right.outside = 0b11;
        right.flags = FLAG_OUTSIDE;
        let mut parent = PartialMatch::EMPTY;
        parent.inside = 0b1;
        parent.flags = FLAG_INSIDE | FLAG_OUTSIDE;
        assert!(!compatible(&g, &parent, &left, &right, bags, &p, &allowed, Some(&t)).unwrap());
        // flags propagate exactly
        right.inside = 0b11;
        right.outside = 0;
        right.flags = FLAG_INSIDE | FLAG_OUTSIDE;
        assert!(compatible(&g, &parent, &left, &right, bags, &p, &allowed, Some(&t)).unwrap());
        parent.flags = FLAG_INSIDE;
        assert!(!compatible(&g, &parent, &left, &right, bags, &p, &allowed, Some(&t)).unwrap());
    }

    #[test]
    fn trivial_extension_moves_leaving_vertices_below() {
        // path 0-1-2-3, pattern P2 mapped onto 2-3, parent bag drops vertex 3
        let g = path(4);
        let p = Pattern::new(&path(2)).unwrap();
        let allowed = all_allowed(4);
        let mut child = PartialMatch::EMPTY;
        child.phi[0] = 0;
        child.phi[1] = 1;
        child.dom = 0b11;
        let ext = trivial_extension(&g, &child, &[2, 3], &[1, 2], &p, &allowed, None).unwrap().unwrap();
        assert_eq!(ext.dom, 0b01);
        assert_eq!(ext.phi[0], 1);
        assert_eq!(ext.child, 0b10);
        assert_eq!(ext.unmatched(p.all()), child.unmatched(p.all()));
        // empty map stays empty
        let e = trivial_extension(&g, &PartialMatch::EMPTY, &[2, 3], &[1, 2], &p, &allowed, None)
            .unwrap()
            .unwrap();
        assert_eq!(e, PartialMatch::EMPTY);
        // identical bags change nothing
        let same = trivial_extension(&g, &child, &[2, 3], &[2, 3], &p, &allowed, None).unwrap().unwrap();
        assert_eq!(same, child);
    }
}

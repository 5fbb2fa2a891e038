//! Treap-backed status with subtree aggregates.
//!
//! Arcs are kept in sweep order (top to bottom) by position only, not by a
//! stored key. Each node aggregates the sign sum, the maximum prefix sum and
//! the XOR of disk keys over its subtree, so gap plies, the current maximum
//! and coverage fingerprints are all `O(log n)` queries. Parent links make
//! arc-to-position lookups possible without keys.

use super::status::{disk_key, ArcId, Status};

const NIL: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Node {
    arc: ArcId,
    sign: i32,
    key: u64,
    prio: u64,
    left: u32,
    right: u32,
    parent: u32,
    size: u32,
    sum: i32,
    max_pref: i32,
    xor: u64,
}

#[derive(Clone, Debug, Default)]
pub struct TreeStatus {
    nodes: Vec<Node>,
    free: Vec<u32>,
    node_of: Vec<u32>,
    root: u32,
    seed: u64,
}

impl TreeStatus {
    fn next_prio(&mut self) -> u64 {
        self.seed = self.seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
        disk_key(self.seed as usize)
    }

    fn alloc(&mut self, arc: ArcId) -> u32 {
        let prio = self.next_prio();
        let node = Node {
            arc,
            sign: arc.sign(),
            key: disk_key(arc.disk()),
            prio,
            left: NIL,
            right: NIL,
            parent: NIL,
            size: 1,
            sum: arc.sign(),
            max_pref: arc.sign(),
            xor: disk_key(arc.disk()),
        };
        let id = match self.free.pop() {
            Some(id) => {
                self.nodes[id as usize] = node;
                id
            }
            None => {
                self.nodes.push(node);
                (self.nodes.len() - 1) as u32
            }
        };
        if self.node_of.len() <= arc.index() {
            self.node_of.resize(arc.index() + 1, NIL);
        }
        self.node_of[arc.index()] = id;
        id
    }

    fn node(&self, arc: ArcId) -> u32 {
        let id = self.node_of.get(arc.index()).copied().unwrap_or(NIL);
        assert!(id != NIL, "arc {arc:?} not in status");
        id
    }

    #[inline]
    fn n(&self, id: u32) -> &Node {
        &self.nodes[id as usize]
    }

    #[inline]
    fn n_mut(&mut self, id: u32) -> &mut Node {
        &mut self.nodes[id as usize]
    }

    fn pull(&mut self, id: u32) {
        let (l, r) = (self.n(id).left, self.n(id).right);
        let mut size = 1;
        let mut sum_left = 0;
        let mut xor = self.n(id).key;
        let mut best = i32::MIN;
        if l != NIL {
            let ln = self.n(l);
            size += ln.size;
            sum_left = ln.sum;
            xor ^= ln.xor;
            best = ln.max_pref;
        }
        let through = sum_left + self.n(id).sign;
        best = best.max(through);
        let mut sum = through;
        if r != NIL {
            let rn = self.n(r);
            size += rn.size;
            sum += rn.sum;
            xor ^= rn.xor;
            best = best.max(through + rn.max_pref);
        }
        let node = self.n_mut(id);
        node.size = size;
        node.sum = sum;
        node.max_pref = best;
        node.xor = xor;
    }

    fn pull_to_root(&mut self, mut id: u32) {
        while id != NIL {
            self.pull(id);
            id = self.n(id).parent;
        }
    }

    fn merge(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        if self.n(a).prio > self.n(b).prio {
            let ar = self.n(a).right;
            let m = self.merge(ar, b);
            self.n_mut(a).right = m;
            self.n_mut(m).parent = a;
            self.pull(a);
            a
        } else {
            let bl = self.n(b).left;
            let m = self.merge(a, bl);
            self.n_mut(b).left = m;
            self.n_mut(m).parent = b;
            self.pull(b);
            b
        }
    }

    /// Splits `t` into the prefix where `pred` holds and the rest.
    fn split(&mut self, t: u32, pred: &mut impl FnMut(ArcId) -> bool) -> (u32, u32) {
        if t == NIL {
            return (NIL, NIL);
        }
        if pred(self.n(t).arc) {
            let r = self.n(t).right;
            let (a, b) = self.split(r, pred);
            self.n_mut(t).right = a;
            if a != NIL {
                self.n_mut(a).parent = t;
            }
            if b != NIL {
                self.n_mut(b).parent = NIL;
            }
            self.pull(t);
            (t, b)
        } else {
            let l = self.n(t).left;
            let (a, b) = self.split(l, pred);
            self.n_mut(t).left = b;
            if b != NIL {
                self.n_mut(b).parent = t;
            }
            if a != NIL {
                self.n_mut(a).parent = NIL;
            }
            self.pull(t);
            (a, t)
        }
    }

    fn remove_node(&mut self, id: u32) {
        let (l, r, p) = (self.n(id).left, self.n(id).right, self.n(id).parent);
        if l != NIL {
            self.n_mut(l).parent = NIL;
        }
        if r != NIL {
            self.n_mut(r).parent = NIL;
        }
        let m = self.merge(l, r);
        if m != NIL {
            self.n_mut(m).parent = p;
        }
        if p == NIL {
            self.root = m;
        } else {
            if self.n(p).left == id {
                self.n_mut(p).left = m;
            } else {
                self.n_mut(p).right = m;
            }
            self.pull_to_root(p);
        }
        let arc = self.n(id).arc;
        self.node_of[arc.index()] = NIL;
        self.free.push(id);
    }

    fn rank(&self, id: u32) -> usize {
        let mut r = self.size_of(self.n(id).left) as usize;
        let mut cur = id;
        let mut p = self.n(cur).parent;
        while p != NIL {
            if self.n(p).right == cur {
                r += self.size_of(self.n(p).left) as usize + 1;
            }
            cur = p;
            p = self.n(cur).parent;
        }
        r
    }

    fn size_of(&self, id: u32) -> u32 {
        if id == NIL {
            0
        } else {
            self.n(id).size
        }
    }

    fn sum_of(&self, id: u32) -> i32 {
        if id == NIL {
            0
        } else {
            self.n(id).sum
        }
    }

    fn xor_of(&self, id: u32) -> u64 {
        if id == NIL {
            0
        } else {
            self.n(id).xor
        }
    }

    fn successor(&self, id: u32) -> u32 {
        let mut r = self.n(id).right;
        if r != NIL {
            while self.n(r).left != NIL {
                r = self.n(r).left;
            }
            return r;
        }
        let mut cur = id;
        let mut p = self.n(cur).parent;
        while p != NIL && self.n(p).right == cur {
            cur = p;
            p = self.n(cur).parent;
        }
        p
    }

    fn predecessor(&self, id: u32) -> u32 {
        let mut l = self.n(id).left;
        if l != NIL {
            while self.n(l).right != NIL {
                l = self.n(l).right;
            }
            return l;
        }
        let mut cur = id;
        let mut p = self.n(cur).parent;
        while p != NIL && self.n(p).left == cur {
            cur = p;
            p = self.n(cur).parent;
        }
        p
    }

    fn collect(&self, t: u32, out: &mut Vec<ArcId>) {
        if t == NIL {
            return;
        }
        self.collect(self.n(t).left, out);
        out.push(self.n(t).arc);
        self.collect(self.n(t).right, out);
    }

    fn visit_target(&self, t: u32, offset: i32, target: i32, f: &mut impl FnMut(ArcId)) {
        if t == NIL || offset + self.n(t).max_pref < target {
            return;
        }
        let node = self.n(t);
        self.visit_target(node.left, offset, target, f);
        let here = offset + self.sum_of(node.left) + node.sign;
        if here == target {
            f(node.arc);
        }
        self.visit_target(node.right, here, target, f);
    }
}

impl Status for TreeStatus {
    fn with_arc_capacity(arcs: usize) -> Self {
        Self {
            nodes: Vec::with_capacity(arcs),
            free: Vec::new(),
            node_of: vec![NIL; arcs],
            root: NIL,
            seed: 0x2545_F491_4F6C_DD1D,
        }
    }

    fn len(&self) -> usize {
        self.size_of(self.root) as usize
    }

    fn contains(&self, arc: ArcId) -> bool {
        self.node_of.get(arc.index()).is_some_and(|&id| id != NIL)
    }

    fn insert_pair(&mut self, top: ArcId, bottom: ArcId, mut goes_below: impl FnMut(ArcId) -> bool) {
        let (l, r) = self.split(self.root, &mut goes_below);
        let t = self.alloc(top);
        let b = self.alloc(bottom);
        let mid = self.merge(t, b);
        let left = self.merge(l, mid);
        self.root = self.merge(left, r);
        self.n_mut(self.root).parent = NIL;
    }

    fn remove_pair(&mut self, top: ArcId, bottom: ArcId) {
        let t = self.node(top);
        let b = self.node(bottom);
        debug_assert!(self.rank(t) < self.rank(b), "top arc must be above bottom arc");
        self.remove_node(t);
        self.remove_node(b);
    }

    fn swap_adjacent(&mut self, upper: ArcId, lower: ArcId) {
        let u = self.node(upper);
        let l = self.node(lower);
        debug_assert_eq!(self.successor(u), l, "arcs must be adjacent");
        let (ua, us, uk) = (self.n(u).arc, self.n(u).sign, self.n(u).key);
        let (la, ls, lk) = (self.n(l).arc, self.n(l).sign, self.n(l).key);
        {
            let n = self.n_mut(u);
            n.arc = la;
            n.sign = ls;
            n.key = lk;
        }
        {
            let n = self.n_mut(l);
            n.arc = ua;
            n.sign = us;
            n.key = uk;
        }
        self.node_of[upper.index()] = l;
        self.node_of[lower.index()] = u;
        self.pull_to_root(u);
        self.pull_to_root(l);
    }

    fn above(&self, arc: ArcId) -> Option<ArcId> {
        let p = self.predecessor(self.node(arc));
        (p != NIL).then(|| self.n(p).arc)
    }

    fn below(&self, arc: ArcId) -> Option<ArcId> {
        let s = self.successor(self.node(arc));
        (s != NIL).then(|| self.n(s).arc)
    }

    fn is_above(&self, a: ArcId, b: ArcId) -> bool {
        self.rank(self.node(a)) < self.rank(self.node(b))
    }

    fn ply(&self, arc: ArcId) -> i32 {
        let id = self.node(arc);
        let mut acc = self.sum_of(self.n(id).left) + self.n(id).sign;
        let mut cur = id;
        let mut p = self.n(cur).parent;
        while p != NIL {
            if self.n(p).right == cur {
                acc += self.sum_of(self.n(p).left) + self.n(p).sign;
            }
            cur = p;
            p = self.n(cur).parent;
        }
        acc
    }

    fn max_ply(&self) -> i32 {
        if self.root == NIL {
            0
        } else {
            self.n(self.root).max_pref.max(0)
        }
    }

    fn for_each_gap_with_ply(&self, target: i32, mut f: impl FnMut(ArcId)) {
        self.visit_target(self.root, 0, target, &mut f);
    }

    fn coverage_key(&self, arc: ArcId) -> u64 {
        let id = self.node(arc);
        let mut acc = self.xor_of(self.n(id).left) ^ self.n(id).key;
        let mut cur = id;
        let mut p = self.n(cur).parent;
        while p != NIL {
            if self.n(p).right == cur {
                acc ^= self.xor_of(self.n(p).left) ^ self.n(p).key;
            }
            cur = p;
            p = self.n(cur).parent;
        }
        acc
    }

    fn order(&self) -> Vec<ArcId> {
        let mut out = Vec::with_capacity(self.len());
        self.collect(self.root, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::super::status::{LinearStatus, Side};
    use super::*;
    use proptest::prelude::*;

    #[derive(Clone, Debug)]
    enum Op {
        Insert(usize),
        Remove(usize),
        Swap(usize),
    }

    fn op() -> impl Strategy<Value = Op> {
        prop_oneof![
            (0usize..64).prop_map(Op::Insert),
            (0usize..64).prop_map(Op::Remove),
            (0usize..64).prop_map(Op::Swap),
        ]
    }

    /// Drives both backends with the same operation stream and checks that
    /// every observable agrees.
    fn replay(ops: &[Op]) -> Result<(), TestCaseError> {
        let mut lin = LinearStatus::with_arc_capacity(128);
        let mut tree = TreeStatus::with_arc_capacity(128);
        let mut live: Vec<usize> = Vec::new();
        let mut next_disk = 0;
        for op in ops {
            match *op {
                Op::Insert(at) => {
                    let d = next_disk;
                    next_disk += 1;
                    let order = lin.order();
                    let cut = if order.is_empty() { 0 } else { at % (order.len() + 1) };
                    let prefix: Vec<ArcId> = order[..cut].to_vec();
                    let top = ArcId::new(d, Side::Top);
                    let bottom = ArcId::new(d, Side::Bottom);
                    lin.insert_pair(top, bottom, |a| prefix.contains(&a));
                    tree.insert_pair(top, bottom, |a| prefix.contains(&a));
                    live.push(d);
                }
                Op::Remove(i) => {
                    if live.is_empty() {
                        continue;
                    }
                    let d = live[i % live.len()];
                    let top = ArcId::new(d, Side::Top);
                    let bottom = ArcId::new(d, Side::Bottom);
                    if !lin.is_above(top, bottom) {
                        continue;
                    }
                    lin.remove_pair(top, bottom);
                    tree.remove_pair(top, bottom);
                    live.retain(|&x| x != d);
                }
                Op::Swap(i) => {
                    let order = lin.order();
                    if order.len() < 2 {
                        continue;
                    }
                    let k = i % (order.len() - 1);
                    let (u, l) = (order[k], order[k + 1]);
                    // keep each disk's top above its bottom
                    if u.disk() == l.disk() {
                        continue;
                    }
                    lin.swap_adjacent(u, l);
                    tree.swap_adjacent(u, l);
                }
            }
            prop_assert_eq!(lin.order(), tree.order());
            prop_assert_eq!(lin.max_ply(), tree.max_ply());
            lin.check_prefix_law().map_err(TestCaseError::fail)?;
            tree.check_prefix_law().map_err(TestCaseError::fail)?;
            for a in lin.order() {
                prop_assert_eq!(lin.ply(a), tree.ply(a));
                prop_assert_eq!(lin.coverage_key(a), tree.coverage_key(a));
                prop_assert_eq!(lin.above(a), tree.above(a));
                prop_assert_eq!(lin.below(a), tree.below(a));
            }
            let target = lin.max_ply();
            let mut a = Vec::new();
            let mut b = Vec::new();
            lin.for_each_gap_with_ply(target, |x| a.push(x));
            tree.for_each_gap_with_ply(target, |x| b.push(x));
            prop_assert_eq!(a, b);
        }
        Ok(())
    }

    proptest! {
        #[test]
        fn tree_matches_linear(ops in proptest::collection::vec(op(), 1..120)) {
            replay(&ops)?;
        }
    }
}

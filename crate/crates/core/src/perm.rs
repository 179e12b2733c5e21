//! Permutations, coincidence partitions, the height order, and chain bounds.
//!
//! The height order compares permutations by strict coarsening of their
//! coincidence partitions. Maximum chains are searched over set partitions
//! directly: every coincidence pattern is realized by the permutation whose
//! cycles are its blocks, so the search space is Bell(n) partitions instead
//! of the full group.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// A permutation of {0..n-1}; `images[i]` is the image of point i.
/// All I/O (cycle strings) is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::invalid("images are not a bijection"));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds from 1-based cycles, e.g. `&[vec![1,2,3], vec![4,5]]` on n points.
    pub fn from_cycles(cycles: &[Vec<usize>], n: usize) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for w in 0..cycle.len() {
                let a = cycle[w];
                let b = cycle[(w + 1) % cycle.len()];
                if a == 0 || a > n || b == 0 || b > n {
                    return Err(Error::invalid(format!("cycle entry out of range 1..={n}")));
                }
                if touched[a - 1] {
                    return Err(Error::invalid("cycles are not disjoint"));
                }
                touched[a - 1] = true;
                images[a - 1] = b - 1;
            }
        }
        Ok(Permutation { images })
    }

    /// Parses 1-based cycle notation: "(1 2 3)(4 5)"; identity is "()" or "".
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "()" {
            return Ok(Self::identity(n));
        }
        let mut cycles = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let open = rest
                .find('(')
                .ok_or_else(|| Error::invalid(format!("bad cycle string {s:?}")))?;
            let close = rest[open..]
                .find(')')
                .ok_or_else(|| Error::invalid(format!("unclosed cycle in {s:?}")))?
                + open;
            let inner = &rest[open + 1..close];
            let cycle: Vec<usize> = inner
                .split(|c: char| c == ' ' || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::invalid(format!("bad cycle entry {t:?}")))
                })
                .collect::<Result<_>>()?;
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = &rest[close + 1..];
        }
        Self::from_cycles(&cycles, n)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Composition `self` then `other`: (self.then(other))(i) = other(self(i)).
    pub fn then(&self, other: &Self) -> Self {
        Permutation {
            images: self.images.iter().map(|&i| other.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Cycles in canonical order: each cycle starts at its minimum element,
    /// cycles sorted by that minimum; fixed points included as 1-cycles.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut cur = self.images[start];
            while cur != start {
                seen[cur] = true;
                cycle.push(cur);
                cur = self.images[cur];
            }
            out.push(cycle);
        }
        out
    }

    /// Number of cycles including fixed points.
    pub fn cycle_count(&self) -> usize {
        self.cycles().len()
    }

    /// Sign of the permutation: even iff n - cycle_count is even.
    pub fn parity(&self) -> Parity {
        if (self.degree() - self.cycle_count()) % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Blocks = cycles; fixed points become singleton blocks.
    pub fn coincidence_partition(&self) -> SetPartition {
        SetPartition::from_blocks(self.degree(), self.cycles()).expect("cycles partition the points")
    }
}

impl fmt::Display for Permutation {
    /// 1-based cycle notation without fixed points; identity prints "()".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nontrivial: Vec<Vec<usize>> = self
            .cycles()
            .into_iter()
            .filter(|c| c.len() > 1)
            .collect();
        if nontrivial.is_empty() {
            return write!(f, "()");
        }
        for cycle in nontrivial {
            write!(f, "(")?;
            for (k, p) in cycle.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", p + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Partition of {0..n-1} into disjoint blocks. Blocks are kept sorted
/// internally and ordered by minimum element; display is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn from_blocks(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for b in &mut blocks {
            b.sort_unstable();
            for &i in b.iter() {
                if i >= n || seen[i] {
                    return Err(Error::invalid("blocks must partition 0..n-1"));
                }
                seen[i] = true;
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::invalid("blocks must cover 0..n-1"));
        }
        blocks.retain(|b| !b.is_empty());
        blocks.sort_by_key(|b| b[0]);
        Ok(SetPartition { n, blocks })
    }

    pub fn singletons(n: usize) -> Self {
        SetPartition {
            n,
            blocks: (0..n).map(|i| vec![i]).collect(),
        }
    }

    /// Parses "{1,2,3}{4}{5}" (1-based, commas or spaces).
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let s = s.trim();
        let mut blocks = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let open = rest
                .find('{')
                .ok_or_else(|| Error::invalid(format!("bad partition string {s:?}")))?;
            let close = rest[open..]
                .find('}')
                .ok_or_else(|| Error::invalid(format!("unclosed block in {s:?}")))?
                + open;
            let inner = &rest[open + 1..close];
            let block: Vec<usize> = inner
                .split(|c: char| c == ' ' || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    let v: usize = t
                        .parse()
                        .map_err(|_| Error::invalid(format!("bad block entry {t:?}")))?;
                    if v == 0 || v > n {
                        return Err(Error::invalid(format!("block entry {v} out of range 1..={n}")));
                    }
                    Ok(v - 1)
                })
                .collect::<Result<_>>()?;
            blocks.push(block);
            rest = &rest[close + 1..];
        }
        Self::from_blocks(n, blocks)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_singletons(&self) -> bool {
        self.blocks.len() == self.n
    }

    /// One 2-block, all other blocks singletons.
    pub fn is_transposition_pattern(&self) -> bool {
        self.blocks.len() + 1 == self.n && self.blocks.iter().all(|b| b.len() <= 2)
    }

    /// Every block of `self` is contained in some block of `other`.
    pub fn refines(&self, other: &Self) -> bool {
        if self.n != other.n {
            return false;
        }
        let mut owner = vec![0usize; self.n];
        for (k, b) in other.blocks.iter().enumerate() {
            for &i in b {
                owner[i] = k;
            }
        }
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&i| owner[i] == owner[b[0]]))
    }

    /// The permutation whose cycles are exactly the blocks (elements of each
    /// block cycled in increasing order); it realizes this coincidence pattern.
    pub fn realizing_permutation(&self) -> Permutation {
        let mut images: Vec<usize> = (0..self.n).collect();
        for b in &self.blocks {
            for w in 0..b.len() {
                images[b[w]] = b[(w + 1) % b.len()];
            }
        }
        Permutation { images }
    }

    /// Restricted-growth-string encoding, canonical per partition.
    fn rgs(&self) -> Vec<u8> {
        let mut label = vec![u8::MAX; self.n];
        let mut next = 0u8;
        for i in 0..self.n {
            if label[i] == u8::MAX {
                let b = self
                    .blocks
                    .iter()
                    .find(|b| b.contains(&i))
                    .expect("covered");
                for &j in b {
                    label[j] = next;
                }
                next += 1;
            }
        }
        label
    }

    fn from_rgs(rgs: &[u8]) -> Self {
        let n = rgs.len();
        let nblocks = rgs.iter().map(|&v| v as usize + 1).max().unwrap_or(0);
        let mut blocks = vec![Vec::new(); nblocks];
        for (i, &v) in rgs.iter().enumerate() {
            blocks[v as usize].push(i);
        }
        SetPartition::from_blocks(n, blocks).expect("rgs is a partition")
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            write!(f, "{{")?;
            for (k, i) in b.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", i + 1)?;
            }
            write!(f, "}}")?;
        }
        Ok(())
    }
}

/// s is lower than t iff the coincidence partition of s strictly refines
/// that of t: every block of s sits inside a block of t and they differ.
pub fn height_lt(s: &Permutation, t: &Permutation) -> Result<bool> {
    if s.degree() != t.degree() {
        return Err(Error::DegreeMismatch {
            left: s.degree(),
            right: t.degree(),
        });
    }
    let ps = s.coincidence_partition();
    let pt = t.coincidence_partition();
    Ok(ps != pt && ps.refines(&pt))
}

/// A finite permutation group held as an explicit element list.
#[derive(Debug, Clone)]
pub struct PermGroup {
    n: usize,
    elements: Vec<Permutation>,
    generators: Vec<Permutation>,
}

impl PermGroup {
    pub fn trivial(n: usize) -> Self {
        PermGroup {
            n,
            elements: vec![Permutation::identity(n)],
            generators: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    /// Set equality of the element lists.
    pub fn same_group(&self, other: &PermGroup) -> bool {
        self.n == other.n && self.elements == other.elements
    }
}

/// Breadth-first closure of the generated group. Errors once the element
/// count exceeds `max_order`.
pub fn closure(generators: &[Permutation], max_order: usize) -> Result<PermGroup> {
    let n = match generators.first() {
        Some(g) => g.degree(),
        None => return Err(Error::invalid("closure needs at least one generator")),
    };
    if generators.iter().any(|g| g.degree() != n) {
        return Err(Error::DegreeMismatch {
            left: n,
            right: generators.iter().map(|g| g.degree()).find(|&d| d != n).unwrap(),
        });
    }
    let mut seen: std::collections::HashSet<Permutation> = Default::default();
    let mut queue = std::collections::VecDeque::new();
    let id = Permutation::identity(n);
    seen.insert(id.clone());
    queue.push_back(id);
    while let Some(cur) = queue.pop_front() {
        for g in generators {
            let next = cur.then(g);
            if seen.insert(next.clone()) {
                if seen.len() > max_order {
                    return Err(Error::GroupTooLarge { max_order });
                }
                queue.push_back(next);
            }
        }
    }
    let mut elements: Vec<Permutation> = seen.into_iter().collect();
    elements.sort();
    Ok(PermGroup {
        n,
        elements,
        generators: generators.to_vec(),
    })
}

/// True iff the orbit of point 0 is all of {0..n-1}.
pub fn is_transitive(g: &PermGroup) -> bool {
    let n = g.n;
    if n == 0 {
        return true;
    }
    let gens: &[Permutation] = if g.generators.is_empty() {
        &g.elements
    } else {
        &g.generators
    };
    let inverses: Vec<Permutation> = gens.iter().map(|g| g.inverse()).collect();
    let mut reached = vec![false; n];
    reached[0] = true;
    let mut stack = vec![0usize];
    while let Some(p) = stack.pop() {
        for gperm in gens.iter().chain(&inverses) {
            let q = gperm.apply(p);
            if !reached[q] {
                reached[q] = true;
                stack.push(q);
            }
        }
    }
    reached.into_iter().all(|r| r)
}

/// Which permutations a chain element may realize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainParity {
    Any,
    EvenOnly,
}

impl ChainParity {
    fn allows(self, partition: &SetPartition) -> bool {
        match self {
            ChainParity::Any => true,
            // permutation with cycles = blocks is even iff n - #blocks is even
            ChainParity::EvenOnly => (partition.n() - partition.block_count()) % 2 == 0,
        }
    }
}

/// Advances a restricted-growth string to its lexicographic successor.
/// Returns false once the all-distinct string has been passed.
fn next_rgs(rgs: &mut [u8]) -> bool {
    let mut i = rgs.len();
    loop {
        if i <= 1 {
            return false;
        }
        i -= 1;
        let max_allowed = rgs[..i].iter().copied().max().unwrap() + 1;
        if rgs[i] < max_allowed {
            rgs[i] += 1;
            for v in rgs[i + 1..].iter_mut() {
                *v = 0;
            }
            return true;
        }
    }
}

/// All strict coarsenings of `p` obtained by merging its blocks, in a
/// deterministic canonical order (restricted-growth strings of the block set).
fn coarsenings(p: &SetPartition) -> Vec<SetPartition> {
    let r = p.block_count();
    if r == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut rgs = vec![0u8; r];
    loop {
        let nblocks = rgs.iter().map(|&v| v as usize + 1).max().unwrap() as usize;
        if nblocks < r {
            let mut merged = vec![Vec::new(); nblocks];
            for (bi, &g) in rgs.iter().enumerate() {
                merged[g as usize].extend(p.blocks()[bi].iter().copied());
            }
            out.push(SetPartition::from_blocks(p.n(), merged).expect("merged partition"));
        }
        if !next_rgs(&mut rgs) {
            return out;
        }
    }
}

struct ChainSearch<'a> {
    parity: ChainParity,
    /// extra acceptance test for every chain element (e.g. realizability)
    admit: Option<&'a mut dyn FnMut(&SetPartition) -> bool>,
    memo: HashMap<Vec<u8>, (usize, Option<Vec<u8>>)>,
}

impl<'a> ChainSearch<'a> {
    fn admitted(&mut self, p: &SetPartition) -> bool {
        if !self.parity.allows(p) {
            return false;
        }
        match self.admit.as_mut() {
            Some(f) => f(p),
            None => true,
        }
    }

    /// Longest chain starting at `p` (which must already be admitted),
    /// counting `p` itself; memoized on the RGS encoding.
    fn longest_from(&mut self, p: &SetPartition) -> (usize, Option<Vec<u8>>) {
        let key = p.rgs();
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let mut best = (1usize, None);
        for q in coarsenings(p) {
            if !self.admitted(&q) {
                continue;
            }
            let (len, _) = self.longest_from(&q);
            if len + 1 > best.0 {
                best = (len + 1, Some(q.rgs()));
            }
        }
        self.memo.insert(key, best.clone());
        best
    }
}

/// Enumerates every set partition of {0..n-1} in canonical RGS order.
pub fn all_partitions(n: usize) -> Vec<SetPartition> {
    if n == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut rgs = vec![0u8; n];
    loop {
        out.push(SetPartition::from_rgs(&rgs));
        if !next_rgs(&mut rgs) {
            return out;
        }
    }
}

/// Maximum-length strict coarsening chain of coincidence partitions whose
/// realizing permutations satisfy the parity constraint, with the bottom
/// element neither the identity pattern nor a transposition pattern.
/// Returns the length and a witness chain (finest first).
///
/// The search also powers the realizability-constrained bound in `forms`;
/// `admit` lets the caller veto individual partitions.
pub fn max_chain_with(
    n: usize,
    parity: ChainParity,
    mut admit: Option<&mut dyn FnMut(&SetPartition) -> bool>,
) -> (usize, Vec<SetPartition>) {
    let mut search = ChainSearch {
        parity,
        admit: admit.take(),
        memo: HashMap::new(),
    };
    let mut best_len = 0usize;
    let mut best_start: Option<SetPartition> = None;
    // bottoms in canonical order, finest first so the classic odd-cycle
    // witness ({1,2,3}{4}{5} for n = 5) is found first
    let mut bottoms = all_partitions(n);
    bottoms.sort_by_key(|p| std::cmp::Reverse(p.block_count()));
    for p in bottoms {
        if p.is_singletons() || p.is_transposition_pattern() {
            continue;
        }
        if !search.admitted(&p) {
            continue;
        }
        let (len, _) = search.longest_from(&p);
        if len > best_len {
            best_len = len;
            best_start = Some(p);
        }
    }
    let mut witness = Vec::new();
    if let Some(start) = best_start {
        let mut cur = start;
        loop {
            witness.push(cur.clone());
            match search.memo.get(&cur.rgs()).and_then(|(_, next)| next.clone()) {
                Some(next_rgs) => cur = SetPartition::from_rgs(&next_rgs),
                None => break,
            }
        }
    }
    (best_len, witness)
}

/// Maximum chain length over partitions realizable in the (even-only or
/// unrestricted) group, with the identity/transposition bottom exclusion.
pub fn max_chain(n: usize, even_only: bool) -> Result<(usize, Vec<SetPartition>)> {
    if n < 3 {
        return Err(Error::DegreeTooSmall { min: 3, got: n });
    }
    let parity = if even_only {
        ChainParity::EvenOnly
    } else {
        ChainParity::Any
    };
    Ok(max_chain_with(n, parity, None))
}

/// floor((n-1)/2), the closed-form value of the even-chain maximum.
pub fn chebotarev_bound(n: usize) -> Result<usize> {
    if n < 3 {
        return Err(Error::DegreeTooSmall { min: 3, got: n });
    }
    Ok((n - 1) / 2)
}

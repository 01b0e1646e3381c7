//! Rooted ordered trees whose vertices have 0 or at least 2 children, and the
//! map `chi` sending a tree to the covering system labelling its leaves.
//!
//! Trees print as nested parentheses of up-degrees: a leaf is `()`, a vertex
//! with `r` children is `(r c₁ … c_r)`.

use std::fmt;

use crate::combinat::for_each_composition;
use crate::congruence::{CoveringSystem, ResidueClass};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree {
    children: Vec<Tree>,
}

impl Tree {
    pub fn leaf() -> Self {
        Tree {
            children: Vec::new(),
        }
    }

    /// Panics on exactly one child; see [`Tree::try_node`].
    pub fn node(children: Vec<Tree>) -> Self {
        Self::try_node(children).expect("a vertex cannot have exactly one child")
    }

    pub fn try_node(children: Vec<Tree>) -> Result<Self> {
        if children.len() == 1 {
            return Err(Error::UnaryVertex);
        }
        Ok(Tree { children })
    }

    /// Root with `r` leaf children.
    pub fn star(r: usize) -> Self {
        Self::node(vec![Tree::leaf(); r])
    }

    pub fn children(&self) -> &[Tree] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn up_degree(&self) -> usize {
        self.children.len()
    }

    pub fn leaf_count(&self) -> usize {
        if self.is_leaf() {
            1
        } else {
            self.children.iter().map(Tree::leaf_count).sum()
        }
    }

    pub fn height(&self) -> usize {
        self.children
            .iter()
            .map(|c| 1 + c.height())
            .max()
            .unwrap_or(0)
    }

    /// Assigns `⟨0,1⟩` to the root and `⟨a + j·n, r·n⟩` to child `j` of a
    /// vertex labelled `⟨a, n⟩` with `r` children; returns the leaf labels.
    pub fn chi(&self) -> CoveringSystem {
        let mut leaves = Vec::with_capacity(self.leaf_count());
        let mut stack = vec![(self, 0u64, 1u64)];
        while let Some((t, a, n)) = stack.pop() {
            if t.is_leaf() {
                leaves.push(ResidueClass::new_unchecked(a, n));
                continue;
            }
            let r = t.children.len() as u64;
            for (j, c) in t.children.iter().enumerate() {
                stack.push((c, a + j as u64 * n, r * n));
            }
        }
        CoveringSystem::from_distinct(leaves)
    }

    /// Regroups a root of up-degree `a·b` into `a` children of up-degree `b`;
    /// new child `i` adopts old subtrees `i, i + a, …, i + (b−1)·a`.
    pub fn ab_bijection(&self, a: usize, b: usize) -> Result<Tree> {
        if a < 2 || b < 2 {
            return Err(Error::InvalidArgument(format!(
                "a = {a} and b = {b} must be at least 2"
            )));
        }
        if self.up_degree() != a * b {
            return Err(Error::RootDegree {
                found: self.up_degree(),
                expected: a * b,
            });
        }
        let groups = (0..a)
            .map(|i| Tree {
                children: (0..b).map(|j| self.children[i + j * a].clone()).collect(),
            })
            .collect();
        Ok(Tree { children: groups })
    }

    /// Inverse of [`Tree::ab_bijection`] for a tree whose root has `a`
    /// children, each of up-degree `b`.
    pub fn ab_inverse(&self) -> Result<Tree> {
        let a = self.up_degree();
        let b = self.children.first().map_or(0, Tree::up_degree);
        if a < 2 || b < 2 || self.children.iter().any(|c| c.up_degree() != b) {
            return Err(Error::NotGrouped);
        }
        let mut flat = vec![Tree::leaf(); a * b];
        for (i, y) in self.children.iter().enumerate() {
            for (j, x) in y.children.iter().enumerate() {
                flat[i + j * a] = x.clone();
            }
        }
        Ok(Tree { children: flat })
    }

    pub fn parse(input: &str) -> Result<Tree> {
        let mut p = Parser {
            bytes: input.as_bytes(),
            pos: 0,
        };
        let t = p.tree()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(p.err("trailing input"));
        }
        Ok(t)
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_leaf() {
            return f.write_str("()");
        }
        write!(f, "({}", self.children.len())?;
        for c in &self.children {
            write!(f, " {c}")?;
        }
        f.write_str(")")
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("byte {}: {msg}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        self.skip_ws();
        if self.bytes.get(self.pos) == Some(&b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", b as char)))
        }
    }

    fn tree(&mut self) -> Result<Tree> {
        self.expect(b'(')?;
        self.skip_ws();
        if self.bytes.get(self.pos) == Some(&b')') {
            self.pos += 1;
            return Ok(Tree::leaf());
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let r: usize = std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.err("expected an up-degree"))?;
        if r < 2 {
            return Err(self.err("up-degree must be 0 or at least 2"));
        }
        let children = (0..r).map(|_| self.tree()).collect::<Result<Vec<_>>>()?;
        self.expect(b')')?;
        Ok(Tree { children })
    }
}

/// All trees with `k` leaves, each exactly once.
///
/// Order: by root up-degree, then children leaf counts in colexicographic
/// order, then recursively by child in position order.
pub fn enumerate_trees(k: usize) -> Vec<Tree> {
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    if k == 1 {
        out.push(Tree::leaf());
        return out;
    }
    let mut memo: Vec<Vec<Tree>> = vec![Vec::new(); k];
    for j in 1..k {
        memo[j] = enumerate_trees_memo(j, &memo);
    }
    enumerate_trees_memo(k, &memo)
}

/// Trees with `k` leaves and root up-degree `r`: one shard of [`enumerate_trees`].
pub fn enumerate_trees_with_root(k: usize, r: usize) -> Vec<Tree> {
    let mut memo: Vec<Vec<Tree>> = vec![Vec::new(); k];
    for j in 1..k {
        memo[j] = enumerate_trees_memo(j, &memo);
    }
    let mut out = Vec::new();
    if r == 0 {
        if k == 1 {
            out.push(Tree::leaf());
        }
        return out;
    }
    if r >= 2 {
        push_with_root(k, r, &memo, &mut out);
    }
    out
}

fn enumerate_trees_memo(k: usize, memo: &[Vec<Tree>]) -> Vec<Tree> {
    if k == 1 {
        return vec![Tree::leaf()];
    }
    let mut out = Vec::new();
    for r in 2..=k {
        push_with_root(k, r, memo, &mut out);
    }
    out
}

fn push_with_root(k: usize, r: usize, memo: &[Vec<Tree>], out: &mut Vec<Tree>) {
    for_each_composition(k, r, |parts| {
        let mut current: Vec<Tree> = Vec::with_capacity(r);
        product(parts, memo, &mut current, out);
    });
}

fn product(parts: &[usize], memo: &[Vec<Tree>], current: &mut Vec<Tree>, out: &mut Vec<Tree>) {
    let idx = current.len();
    if idx == parts.len() {
        out.push(Tree {
            children: current.clone(),
        });
        return;
    }
    for t in &memo[parts[idx]] {
        current.push(t.clone());
        product(parts, memo, current, out);
        current.pop();
    }
}

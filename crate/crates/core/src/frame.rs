//! Explicit finite frames: free frames on a handful of generators,
//! congruence closure, quotients and the finite Scott-topology check.
//!
//! Everything here is brute force over tables and serves as the independent
//! reference for the symbolic deciders in [`crate::spaces`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::syntax::{normalize, FormalMachine, FormalMeet, GeneratorId, Relation, RelationKind};

/// Generators allowed in [`free_frame`]; four gives 168 elements out of 65536 candidates.
pub const MAX_FREE_GENERATORS: usize = 4;

/// Largest quotient whose subsets [`check_scott_quotient`] enumerates.
pub const MAX_SCOTT_CHECK: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("{requested} generators exceed the free-frame bound of {bound}")]
    TooManyGenerators { requested: usize, bound: usize },
    #[error("tables do not form a distributive lattice: {0}")]
    NotALattice(String),
    #[error("generator {0} is not part of this free frame")]
    UnknownGenerator(GeneratorId),
    #[error("lattice of {size} elements is too large for subset enumeration (bound {bound})")]
    TooLarge { size: usize, bound: usize },
}

/// A finite partial order given by its `leq` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    leq: Vec<Vec<bool>>,
}

impl Poset {
    pub fn new(leq: Vec<Vec<bool>>) -> Self {
        Poset { leq }
    }

    /// The chain `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        Poset {
            leq: (0..n).map(|a| (0..n).map(|b| a <= b).collect()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.leq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leq.is_empty()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    /// Reflexive, antisymmetric and transitive.
    pub fn is_partial_order(&self) -> bool {
        let n = self.len();
        (0..n).all(|a| self.leq[a][a])
            && (0..n).all(|a| (0..n).all(|b| a == b || !(self.leq[a][b] && self.leq[b][a])))
            && (0..n).all(|a| {
                (0..n).all(|b| !self.leq[a][b] || (0..n).all(|c| !self.leq[b][c] || self.leq[a][c]))
            })
    }
}

/// A finite distributive lattice with explicit operation tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteFrame {
    order: Poset,
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
    bottom: usize,
    top: usize,
    labels: Vec<String>,
}

impl FiniteFrame {
    /// Validates the lattice and distributive laws and locates `⊥`, `⊤`.
    pub fn from_tables(
        meet: Vec<Vec<usize>>,
        join: Vec<Vec<usize>>,
        labels: Vec<String>,
    ) -> Result<Self, FrameError> {
        let n = meet.len();
        let bad = |what: &str| Err(FrameError::NotALattice(what.to_string()));
        if n == 0 {
            return bad("empty carrier");
        }
        if join.len() != n || labels.len() != n || meet.iter().chain(&join).any(|r| r.len() != n) {
            return bad("table shape");
        }
        if meet.iter().chain(&join).flatten().any(|&x| x >= n) {
            return bad("table entry out of range");
        }
        for a in 0..n {
            if meet[a][a] != a || join[a][a] != a {
                return bad("idempotence");
            }
            for b in 0..n {
                if meet[a][b] != meet[b][a] || join[a][b] != join[b][a] {
                    return bad("commutativity");
                }
                if meet[a][join[a][b]] != a || join[a][meet[a][b]] != a {
                    return bad("absorption");
                }
                for c in 0..n {
                    if meet[a][meet[b][c]] != meet[meet[a][b]][c]
                        || join[a][join[b][c]] != join[join[a][b]][c]
                    {
                        return bad("associativity");
                    }
                    if meet[a][join[b][c]] != join[meet[a][b]][meet[a][c]] {
                        return bad("distributivity");
                    }
                }
            }
        }
        let leq: Vec<Vec<bool>> = (0..n)
            .map(|a| (0..n).map(|b| meet[a][b] == a).collect())
            .collect();
        let bottom = (0..n)
            .find(|&a| (0..n).all(|b| leq[a][b]))
            .expect("finite lattice has a bottom");
        let top = (0..n)
            .find(|&a| (0..n).all(|b| leq[b][a]))
            .expect("finite lattice has a top");
        Ok(FiniteFrame {
            order: Poset::new(leq),
            meet,
            join,
            bottom,
            top,
            labels,
        })
    }

    /// The lattice of down-sets of a finite poset, ordered by inclusion.
    pub fn downsets(poset: &Poset) -> Result<Self, FrameError> {
        let n = poset.len();
        if n > 16 {
            return Err(FrameError::TooLarge { size: n, bound: 16 });
        }
        let mut sets: Vec<u32> = (0u32..1 << n)
            .filter(|&s| {
                (0..n)
                    .all(|b| s >> b & 1 == 0 || (0..n).all(|a| !poset.leq(a, b) || s >> a & 1 == 1))
            })
            .collect();
        sets.sort_by_key(|s| (s.count_ones(), *s));
        Ok(Self::from_set_family(&sets, |s| format!("{s:#b}")))
    }

    /// A family of bitsets closed under `&` and `|` as a lattice.
    fn from_set_family(sets: &[u32], label: impl Fn(u32) -> String) -> Self {
        let index: BTreeMap<u32, usize> = sets.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let table = |op: fn(u32, u32) -> u32| -> Vec<Vec<usize>> {
            sets.iter()
                .map(|&a| sets.iter().map(|&b| index[&op(a, b)]).collect())
                .collect()
        };
        let meet = table(|a, b| a & b);
        let join = table(|a, b| a | b);
        let labels = sets.iter().map(|&s| label(s)).collect();
        FiniteFrame::from_tables(meet, join, labels).expect("set lattices are distributive")
    }

    pub fn len(&self) -> usize {
        self.meet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.meet.is_empty()
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a][b]
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a][b]
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.order.leq(a, b)
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn poset(&self) -> &Poset {
        &self.order
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    /// Hasse diagram in Graphviz DOT syntax.
    pub fn to_dot(&self) -> String {
        let n = self.len();
        let mut out = String::from("digraph frame {\n  rankdir=BT;\n");
        for a in 0..n {
            let _ = writeln!(
                out,
                "  n{a} [label=\"{}\"];",
                self.labels[a].replace('"', "\\\"")
            );
        }
        for a in 0..n {
            for b in 0..n {
                let covers = a != b
                    && self.leq(a, b)
                    && !(0..n).any(|c| c != a && c != b && self.leq(a, c) && self.leq(c, b));
                if covers {
                    let _ = writeln!(out, "  n{a} -> n{b};");
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// The free frame on a finite list of generators, with its generator map.
#[derive(Clone, Debug)]
pub struct FreeFrame {
    frame: FiniteFrame,
    generators: Vec<GeneratorId>,
    /// Each element as a bitmask over subsets of the generators.
    masks: Vec<u32>,
}

/// Down-sets of `(P_fin(G0), ⊇)`; generator `g` is the principal down-set of `{g}`.
///
/// An element is stored as the set of finite subsets `F` it contains, so it
/// is upward closed under `⊆`. A formal meet `⋀J` denotes `{F : J ⊆ F}`.
pub fn free_frame(generators: &[GeneratorId]) -> Result<FreeFrame, FrameError> {
    let n = generators.len();
    if n > MAX_FREE_GENERATORS {
        return Err(FrameError::TooManyGenerators {
            requested: n,
            bound: MAX_FREE_GENERATORS,
        });
    }
    let subsets = 1usize << n;
    let mut masks: Vec<u32> = (0u64..1u64 << subsets)
        .map(|m| m as u32)
        .filter(|&m| {
            (0..subsets)
                .all(|f| m >> f & 1 == 0 || (0..subsets).all(|g| g & f != f || m >> g & 1 == 1))
        })
        .collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let label = |m: u32| {
        let sets: Vec<String> = (0..subsets)
            .filter(|f| m >> f & 1 == 1)
            .map(|f| {
                let names: Vec<String> = (0..n)
                    .filter(|i| f >> i & 1 == 1)
                    .map(|i| generators[i].to_string())
                    .collect();
                format!("{{{}}}", names.join(","))
            })
            .collect();
        sets.join(" ")
    };
    let frame = FiniteFrame::from_set_family(&masks, label);
    Ok(FreeFrame {
        frame,
        generators: generators.to_vec(),
        masks,
    })
}

impl FreeFrame {
    pub fn frame(&self) -> &FiniteFrame {
        &self.frame
    }

    pub fn generators(&self) -> &[GeneratorId] {
        &self.generators
    }

    fn element_of_mask(&self, mask: u32) -> usize {
        self.masks
            .binary_search_by_key(&(mask.count_ones(), mask), |m| (m.count_ones(), *m))
            .expect("up-set")
    }

    fn meet_mask(&self, b: &FormalMeet) -> Result<u32, FrameError> {
        let mut j = 0usize;
        for g in b.iter() {
            let i = self
                .generators
                .iter()
                .position(|x| x == g)
                .ok_or_else(|| FrameError::UnknownGenerator(g.clone()))?;
            j |= 1 << i;
        }
        let subsets = 1usize << self.generators.len();
        Ok((0..subsets)
            .filter(|f| f & j == j)
            .fold(0u32, |acc, f| acc | 1 << f))
    }

    /// The element denoted by a formal machine.
    pub fn denote(&self, m: &FormalMachine) -> Result<usize, FrameError> {
        let mut mask = 0u32;
        for b in m.branches() {
            mask |= self.meet_mask(b)?;
        }
        Ok(self.element_of_mask(mask))
    }

    /// Element pairs identified by the relations (`a <= b` becomes `a = a ∧ b`).
    pub fn relation_pairs(
        &self,
        relations: &[Relation],
    ) -> Result<Vec<(usize, usize)>, FrameError> {
        relations
            .iter()
            .map(|r| {
                let l = self.denote(&r.lhs)?;
                let rr = self.denote(&r.rhs)?;
                Ok(match r.kind {
                    RelationKind::Equality => (l, rr),
                    RelationKind::Inequality => (l, self.frame.meet(l, rr)),
                })
            })
            .collect()
    }

    /// All machines over these generators in absorption normal form, one per element.
    pub fn normal_forms(&self) -> Vec<FormalMachine> {
        let n = self.generators.len();
        self.masks
            .iter()
            .map(|&mask| {
                let subsets = 1usize << n;
                let branches = (0..subsets).filter(|f| mask >> f & 1 == 1).map(|f| {
                    FormalMeet::new(
                        (0..n)
                            .filter(|i| f >> i & 1 == 1)
                            .map(|i| self.generators[i].clone()),
                    )
                    .expect("one presentation")
                });
                normalize(&FormalMachine::new(branches).expect("one presentation"))
            })
            .collect()
    }
}

/// A partition of a frame's elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Congruence {
    class_of: Vec<usize>,
    classes: usize,
}

impl Congruence {
    pub fn identity(n: usize) -> Self {
        Congruence {
            class_of: (0..n).collect(),
            classes: n,
        }
    }

    pub fn total(n: usize) -> Self {
        Congruence {
            class_of: vec![0; n],
            classes: usize::from(n > 0),
        }
    }

    /// Renumbers classes by first occurrence.
    fn from_labels(labels: &[usize]) -> Self {
        let mut renumber = BTreeMap::new();
        let class_of: Vec<usize> = labels
            .iter()
            .map(|l| {
                let next = renumber.len();
                *renumber.entry(*l).or_insert(next)
            })
            .collect();
        Congruence {
            classes: renumber.len(),
            class_of,
        }
    }

    pub fn class_of(&self, a: usize) -> usize {
        self.class_of[a]
    }

    pub fn class_count(&self) -> usize {
        self.classes
    }

    pub fn same(&self, a: usize, b: usize) -> bool {
        self.class_of[a] == self.class_of[b]
    }

    /// Exhaustive check of compatibility with meet and join.
    pub fn is_congruence_on(&self, fr: &FiniteFrame) -> bool {
        let n = fr.len();
        (0..n).all(|a| {
            (0..n).all(|b| {
                !self.same(a, b)
                    || (0..n).all(|c| {
                        self.same(fr.meet(a, c), fr.meet(b, c))
                            && self.same(fr.join(a, c), fr.join(b, c))
                    })
            })
        })
    }
}

fn find(parent: &mut [usize], mut a: usize) -> usize {
    while parent[a] != a {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    a
}

/// Least congruence containing the given pairs, by merge-and-close to a fixpoint.
pub fn congruence_closure(fr: &FiniteFrame, rels: &[(usize, usize)]) -> Congruence {
    let n = fr.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let union = |parent: &mut Vec<usize>, a: usize, b: usize| -> bool {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        parent[hi] = lo;
        true
    };
    for &(a, b) in rels {
        union(&mut parent, a, b);
    }
    loop {
        let mut changed = false;
        for a in 0..n {
            let r = find(&mut parent, a);
            if r == a {
                continue;
            }
            for c in 0..n {
                changed |= union(&mut parent, fr.meet(a, c), fr.meet(r, c));
                changed |= union(&mut parent, fr.join(a, c), fr.join(r, c));
            }
        }
        if !changed {
            break;
        }
    }
    let labels: Vec<usize> = (0..n).map(|a| find(&mut parent, a)).collect();
    Congruence::from_labels(&labels)
}

/// The lattice of congruence classes with the induced operations.
pub fn quotient_frame(fr: &FiniteFrame, c: &Congruence) -> FiniteFrame {
    let k = c.class_count();
    let mut rep = vec![usize::MAX; k];
    for a in 0..fr.len() {
        let cls = c.class_of(a);
        if rep[cls] == usize::MAX {
            rep[cls] = a;
        }
    }
    let table = |op: &dyn Fn(usize, usize) -> usize| -> Vec<Vec<usize>> {
        (0..k)
            .map(|x| (0..k).map(|y| c.class_of(op(rep[x], rep[y]))).collect())
            .collect()
    };
    let meet = table(&|a, b| fr.meet(a, b));
    let join = table(&|a, b| fr.join(a, b));
    let labels = rep.iter().map(|&r| format!("[{}]", fr.label(r))).collect();
    FiniteFrame::from_tables(meet, join, labels)
        .expect("quotient of a distributive lattice by a congruence")
}

/// Scott-openness in a finite poset: every directed subset has a maximum,
/// so the inaccessibility condition is vacuous and this is the up-set test.
pub fn is_scott_open(poset: &Poset, subset: &[bool]) -> bool {
    let n = poset.len();
    (0..n).all(|a| !subset[a] || (0..n).all(|b| !poset.leq(a, b) || subset[b]))
}

/// Checks, over every subset `U` of the quotient, that `U` is Scott-open
/// exactly when its preimage under the class map is.
pub fn check_scott_quotient(fr: &FiniteFrame, c: &Congruence) -> Result<bool, FrameError> {
    let q = quotient_frame(fr, c);
    let k = q.len();
    if k > MAX_SCOTT_CHECK {
        return Err(FrameError::TooLarge {
            size: k,
            bound: MAX_SCOTT_CHECK,
        });
    }
    let n = fr.len();
    let up_q: Vec<u32> = (0..k)
        .map(|a| {
            (0..k)
                .filter(|&b| q.leq(a, b))
                .fold(0u32, |m, b| m | 1 << b)
        })
        .collect();
    // preimage up-set test, per element: the classes its up-set reaches
    let up_classes: Vec<u32> = (0..n)
        .map(|a| {
            (0..n)
                .filter(|&b| fr.leq(a, b))
                .fold(0u32, |m, b| m | 1 << c.class_of(b))
        })
        .collect();
    for u in 0u32..1 << k {
        let open_q = (0..k).all(|a| u >> a & 1 == 0 || up_q[a] & !u == 0);
        let open_pre = (0..n).all(|a| u >> c.class_of(a) & 1 == 0 || up_classes[a] & !u == 0);
        if open_q != open_pre {
            return Ok(false);
        }
    }
    Ok(true)
}

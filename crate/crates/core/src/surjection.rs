//! The surjection operad over `F2` and its comparison with surjection-like
//! graph terms.

use std::fmt;

use crate::coeff::{LinCombo, Ring};
use crate::error::{Error, Result};
use crate::graph::{GraphTerm, RawGraph, Source, Target};
use crate::normalize::{coproduct_comb_into, product_comb_into, surjection_like_sequence};

/// A surjection `(s(1), .., s(n))` onto `1..=m`. Basis elements are
/// nondegenerate: no two neighbouring values agree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Surjection {
    seq: Vec<u32>,
    m: u32,
}

impl Surjection {
    /// Validates a basis surjection.
    pub fn new(seq: Vec<u32>) -> Result<Self> {
        let m = seq.iter().copied().max().unwrap_or(0);
        if seq.is_empty() {
            return Err(Error::invalid("a surjection needs at least one value"));
        }
        if seq.contains(&0) {
            return Err(Error::invalid("surjection values start at 1"));
        }
        if !covers(&seq, m) {
            return Err(Error::invalid(format!("{seq:?} is not surjective onto 1..{m}")));
        }
        if seq.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!("{seq:?} is degenerate")));
        }
        Ok(Surjection { seq, m })
    }

    /// A basis element if `seq` is one, `None` if it is zero in the quotient.
    pub fn basis(seq: Vec<u32>, m: u32) -> Option<Self> {
        if seq.windows(2).any(|w| w[0] == w[1]) || !covers(&seq, m) {
            return None;
        }
        Some(Surjection { seq, m })
    }

    /// Parses whitespace- or comma-separated values, e.g. `"1 2 1"`.
    pub fn parse(text: &str) -> Result<Self> {
        let seq = text
            .split(|c: char| c.is_whitespace() || c == ',' || c == '(' || c == ')')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u32>().map_err(|_| Error::parse(format!("bad surjection value `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        Surjection::new(seq)
    }

    pub fn seq(&self) -> &[u32] {
        &self.seq
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.m as usize
    }

    pub fn degree(&self) -> usize {
        self.seq.len() - self.m as usize
    }

    /// Sum of the faces deleting one position, keeping basis elements.
    pub fn differential(&self) -> LinCombo<Surjection> {
        let mut out = LinCombo::zero(Ring::F2);
        for k in 0..self.seq.len() {
            let mut t = self.seq.clone();
            t.remove(k);
            if let Some(s) = Surjection::basis(t, self.m) {
                out.add_int(s, 1);
            }
        }
        out
    }

    /// Postcomposition with a permutation `tau` of `0..m` (0-based).
    pub fn act(&self, tau: &[usize]) -> Result<Surjection> {
        if tau.len() != self.m as usize {
            return Err(Error::invalid(format!(
                "permutation of size {} acting on a surjection onto {}",
                tau.len(),
                self.m
            )));
        }
        let mut seen = vec![false; tau.len()];
        for &t in tau {
            if t >= tau.len() || seen[t] {
                return Err(Error::invalid(format!("{tau:?} is not a permutation")));
            }
            seen[t] = true;
        }
        Ok(Surjection { seq: self.seq.iter().map(|&v| tau[v as usize - 1] as u32 + 1).collect(), m: self.m })
    }

    /// Partial composition `outer ∘_r inner` (`r` 1-based). Occurrence `t` of
    /// `r` in `outer` is replaced by the block `inner[j_{t-1} ..= j_t]` for
    /// every chain `1 = j_0 <= j_1 <= .. <= j_k = n`, with neighbouring blocks
    /// sharing their boundary position.
    pub fn compose(outer: &Surjection, r: usize, inner: &Surjection) -> Result<LinCombo<Surjection>> {
        if r == 0 || r > outer.arity() {
            return Err(Error::invalid(format!("composition index {r} out of range 1..={}", outer.arity())));
        }
        let r = r as u32;
        let mi = inner.m;
        let n = inner.seq.len();
        let k = outer.seq.iter().filter(|&&v| v == r).count();
        let mut out = LinCombo::zero(Ring::F2);
        let mut cuts = vec![0usize; k + 1];
        cuts[k] = n - 1;
        // cuts[1..k] range over nondecreasing values in 0..n, lexicographically
        fn rec(
            t: usize,
            k: usize,
            cuts: &mut Vec<usize>,
            f: &mut dyn FnMut(&[usize]),
        ) {
            if t == k {
                f(cuts);
                return;
            }
            let lo = cuts[t - 1];
            for j in lo..=cuts[k] {
                cuts[t] = j;
                rec(t + 1, k, cuts, f);
            }
        }
        let mut emit = |cuts: &[usize]| {
            let mut seq = Vec::with_capacity(outer.seq.len() + n);
            let mut t = 0;
            for &v in &outer.seq {
                if v == r {
                    t += 1;
                    for &w in &inner.seq[cuts[t - 1]..=cuts[t]] {
                        seq.push(w + r - 1);
                    }
                } else if v > r {
                    seq.push(v + mi - 1);
                } else {
                    seq.push(v);
                }
            }
            if let Some(s) = Surjection::basis(seq, outer.m + mi - 1) {
                out.add_int(s, 1);
            }
        };
        rec(1, k, &mut cuts, &mut emit);
        Ok(out)
    }

    /// Every basis surjection onto `1..=m` of length `n`, in lexicographic
    /// order.
    pub fn all(n: usize, m: usize) -> Vec<Surjection> {
        let mut out = Vec::new();
        let mut seq = Vec::with_capacity(n);
        fn rec(n: usize, m: u32, seq: &mut Vec<u32>, out: &mut Vec<Surjection>) {
            if seq.len() == n {
                if covers(seq, m) {
                    out.push(Surjection { seq: seq.clone(), m });
                }
                return;
            }
            for v in 1..=m {
                if seq.last() != Some(&v) {
                    seq.push(v);
                    rec(n, m, seq, out);
                    seq.pop();
                }
            }
        }
        if m >= 1 && n >= m {
            rec(n, m as u32, &mut seq, &mut out);
        }
        out
    }

    /// The surjection-like term: a left comb of coproducts whose leaves are
    /// multiplied, per output, in left comb order. Coproducts come first in
    /// the orientation, then products output by output.
    pub fn to_graph(&self) -> (GraphTerm, i64) {
        graph_of_sequence(&self.seq, self.m as usize)
    }

    /// The associated surjection of a surjection-like term.
    pub fn from_graph(g: &GraphTerm) -> Result<Surjection> {
        let seq = surjection_like_sequence(g)
            .ok_or_else(|| Error::invalid("term is not surjection-like"))?;
        Surjection::new(seq)
    }
}

/// The two-layer comb graph of any surjective sequence, degenerate or not.
pub fn graph_of_sequence(seq: &[u32], m: usize) -> (GraphTerm, i64) {
    let mut raw = RawGraph::new(1, m);
    let leaves = coproduct_comb_into(&mut raw, Source::Input(0), seq.len());
    for r in 1..=m as u32 {
        let factors: Vec<Source> =
            leaves.iter().zip(seq).filter(|(_, &v)| v == r).map(|(&l, _)| l).collect();
        let s = product_comb_into(&mut raw, &factors);
        raw.wire(s, Target::Output(r - 1));
    }
    raw.canonicalize().expect("comb graphs are valid")
}

fn covers(seq: &[u32], m: u32) -> bool {
    let mut hit = vec![false; m as usize + 1];
    for &v in seq {
        if v == 0 || v > m {
            return false;
        }
        hit[v as usize] = true;
    }
    hit[1..].iter().all(|&h| h)
}

impl fmt::Display for Surjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.seq.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn from_surjection(s: &Surjection) -> GraphTerm {
    s.to_graph().0
}

pub fn to_surjection(g: &GraphTerm) -> Result<Surjection> {
    Surjection::from_graph(g)
}

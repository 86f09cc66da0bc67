//! Cup-i coproducts, cup-i products on cochains, mod 2 cohomology and
//! Steenrod squares.

use serde_json::{json, Value};

use crate::coeff::{LinCombo, Ring};
use crate::error::{Error, Result};
use crate::graph::PropElement;
use crate::linalg::{left_kernel, BitVec, Echelon};
use crate::simplicial::{coact, cochain_act, Cochain, SimplexId, SimplicialSet, XChain};
use crate::surjection::Surjection;

/// The alternating surjection `(1, 2, 1, ..)` of length `i + 2`.
pub fn cup_i_surjection(i: usize) -> Surjection {
    Surjection::new((0..i + 2).map(|k| 1 + (k % 2) as u32).collect()).expect("alternating")
}

/// `Δ_i ∈ S(1, 2)`. Over `Z` only `i <= 2` is available.
pub fn cup_i_element(i: usize, ring: Ring) -> Result<PropElement> {
    if ring == Ring::Z && i > 2 {
        return Err(Error::invalid(format!("Δ_{i} has no fixed sign convention over Z; use F2")));
    }
    let (g, sign) = cup_i_surjection(i).to_graph();
    Ok(PropElement::from_term(ring, g, sign))
}

pub fn cup_i_coproduct(i: usize, x: &SimplicialSet, c: &LinCombo<SimplexId>) -> Result<XChain> {
    coact(&cup_i_element(i, c.ring())?, x, c)
}

/// `α ∪_i β` over `F2`, of degree `|α| + |β| - i`.
pub fn cup_i_product(
    i: usize,
    x: &SimplicialSet,
    alpha: &(usize, Cochain),
    beta: &(usize, Cochain),
) -> Result<(usize, Cochain)> {
    let g = cup_i_element(i, Ring::F2)?;
    cochain_act(&g, x, &[(alpha.0, alpha.1.mod2()), (beta.0, beta.1.mod2())])
}

fn to_bits(x: &SimplicialSet, q: usize, c: &Cochain) -> BitVec {
    let mut v = BitVec::zeros(x.count(q));
    for (id, k) in c.iter() {
        if id.dim as usize == q && !k.mod2().is_zero() {
            v.flip(id.index as usize);
        }
    }
    v
}

fn from_bits(q: usize, v: &BitVec) -> Cochain {
    let mut c = Cochain::zero(Ring::F2);
    for i in v.ones() {
        c.add_int(SimplexId { dim: q as u32, index: i as u32 }, 1);
    }
    c
}

fn delta_rows(x: &SimplicialSet, q: usize) -> Vec<BitVec> {
    // row i is δ of the indicator cochain of simplex i
    let mut rows = vec![BitVec::zeros(x.count(q + 1)); x.count(q)];
    for t in x.simplices(q + 1) {
        for (f, k) in x.boundary(&LinCombo::single(Ring::F2, t)).iter() {
            if !k.is_zero() {
                rows[f.index as usize].flip(t.index as usize);
            }
        }
    }
    rows
}

/// Mod 2 cohomology with chosen representatives.
#[derive(Clone, Debug)]
pub struct Cohomology {
    /// Per degree: coboundaries followed by representatives, in one echelon.
    spans: Vec<(Echelon, usize)>,
    reps: Vec<Vec<Cochain>>,
}

impl Cohomology {
    pub fn ranks(&self) -> Vec<usize> {
        self.reps.iter().map(Vec::len).collect()
    }

    pub fn representatives(&self, q: usize) -> &[Cochain] {
        self.reps.get(q).map_or(&[], Vec::as_slice)
    }

    /// Coordinates of a cocycle in the representative basis, or an error if
    /// it is not a cocycle.
    pub fn class_of(&self, x: &SimplicialSet, q: usize, c: &Cochain) -> Result<BitVec> {
        let Some((e, b)) = self.spans.get(q) else {
            return Ok(BitVec::zeros(0));
        };
        let combo = e
            .solve(&to_bits(x, q, c))
            .ok_or_else(|| Error::invalid(format!("cochain of degree {q} is not a cocycle")))?;
        Ok(BitVec::from_indices(self.reps[q].len(), combo.into_iter().filter(|&i| i >= *b).map(|i| i - b)))
    }

    pub fn to_json(&self, x: &SimplicialSet) -> Value {
        json!({
            "ranks": self.ranks(),
            "representatives": self.reps.iter().map(|r| r.iter().map(|c| cochain_json(x, c)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

pub fn cochain_json(x: &SimplicialSet, c: &Cochain) -> Value {
    c.to_json_with(|id| json!(x.name(*id)))
}

pub fn cohomology_f2(x: &SimplicialSet) -> Cohomology {
    let top = x.dim();
    let mut spans = Vec::new();
    let mut reps = Vec::new();
    let mut previous: Option<Vec<BitVec>> = None;
    for q in 0..=top {
        let rows = delta_rows(x, q);
        let cocycles = if q == top {
            (0..x.count(q)).map(|i| BitVec::from_indices(x.count(q), [i])).collect()
        } else {
            left_kernel(&rows)
        };
        let mut e = Echelon::new(x.count(q));
        let boundaries = previous.take().unwrap_or_default();
        for r in &boundaries {
            e.insert(r);
        }
        let b = boundaries.len();
        let mut chosen = Vec::new();
        for z in &cocycles {
            if !e.contains(z) {
                e.insert(z);
                chosen.push(from_bits(q, z));
            }
        }
        spans.push((e, b));
        reps.push(chosen);
        previous = Some(rows);
    }
    Cohomology { spans, reps }
}

/// `Sq^k α = α ∪_{q-k} α` for a cocycle of degree `q`; zero when `k > q`.
pub fn steenrod_square(k: usize, x: &SimplicialSet, q: usize, alpha: &Cochain) -> Result<(usize, Cochain)> {
    if k > q {
        return Ok((q + k, Cochain::zero(Ring::F2)));
    }
    let a = (q, alpha.mod2());
    cup_i_product(q - k, x, &a, &a)
}

/// The matrix of `Sq^k : H^q -> H^{q+k}` on representatives, one row per
/// source class.
pub fn square_table(k: usize, x: &SimplicialSet, h: &Cohomology, q: usize) -> Result<Vec<BitVec>> {
    let width = h.representatives(q + k).len();
    h.representatives(q)
        .iter()
        .map(|a| {
            if q + k > x.dim() {
                return Ok(BitVec::zeros(width));
            }
            let (_, sq) = steenrod_square(k, x, q, a)?;
            h.class_of(x, q + k, &sq)
        })
        .collect()
}

/// `Sq^k` tables for every source degree, with the cohomology they are
/// written in.
pub fn square_report(k: usize, x: &SimplicialSet) -> Result<Value> {
    let h = cohomology_f2(x);
    let mut tables = Vec::new();
    for q in 0..=x.dim() {
        let rows = square_table(k, x, &h, q)?;
        let matrix: Vec<Vec<u8>> = rows.iter().map(|r| (0..r.len()).map(|i| r.get(i) as u8).collect()).collect();
        tables.push(json!({"from": q, "to": q + k, "matrix": matrix}));
    }
    Ok(json!({"square": k, "cohomology": h.to_json(x), "tables": tables}))
}

/// The minimal six-vertex triangulation of the real projective plane, on
/// vertices `1..=6` in increasing order.
pub fn rp2() -> SimplicialSet {
    let names: Vec<String> = (1..=6).map(|v| v.to_string()).collect();
    let triangles = ["123", "134", "145", "156", "162", "235", "346", "452", "563", "624"];
    let simplices: Vec<Vec<u32>> = triangles
        .iter()
        .map(|t| t.bytes().map(|b| (b - b'1') as u32).collect())
        .collect();
    SimplicialSet::from_complex(&names, &simplices).expect("valid triangulation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphTerm, Generator};
    use crate::simplicial::Face;

    #[test]
    fn small_cup_elements() {
        assert_eq!(
            cup_i_element(0, Ring::Z).unwrap(),
            PropElement::from_term(Ring::Z, GraphTerm::generator(Generator::Coproduct), 1)
        );
        for i in 0..5 {
            assert_eq!(cup_i_element(i, Ring::F2).unwrap().degree(), Some(i));
        }
        assert!(cup_i_element(3, Ring::Z).is_err());
    }

    #[test]
    fn cohomology_of_small_spaces() {
        assert_eq!(cohomology_f2(&SimplicialSet::standard(2)).ranks(), vec![1, 0, 0]);
        assert_eq!(cohomology_f2(&SimplicialSet::standard_boundary(2)).ranks(), vec![1, 1]);
        assert_eq!(cohomology_f2(&SimplicialSet::standard_boundary(3)).ranks(), vec![1, 0, 1]);
        assert_eq!(cohomology_f2(&rp2()).ranks(), vec![1, 1, 1]);
    }

    #[test]
    fn rp2_has_a_nonzero_first_square() {
        let x = rp2();
        let h = cohomology_f2(&x);
        let table = square_table(1, &x, &h, 1).unwrap();
        assert_eq!(table.len(), 1);
        assert!(!table[0].is_zero());
        // Sq^0 is the identity on H^1
        let id = square_table(0, &x, &h, 1).unwrap();
        assert_eq!(id[0], BitVec::from_indices(1, [0]));
    }

    #[test]
    fn cup_zero_on_an_edge_pairs_front_and_back() {
        let x = SimplicialSet::standard(1);
        let v0 = (0, Cochain::single(Ring::F2, x.id("[0]").unwrap()));
        let e = (1, Cochain::single(Ring::F2, x.id("[0,1]").unwrap()));
        let (d, c) = cup_i_product(0, &x, &v0, &e).unwrap();
        assert_eq!(d, 1);
        assert_eq!(c, e.1);
        assert!(x.push_face(x.id("[0,1]").unwrap(), Face::of(&[0])).is_some());
    }
}

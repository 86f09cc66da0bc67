//! Normalized chains, the chain-level action of graph terms, and finite
//! simplicial sets.
//!
//! On a standard simplex a face is a set of vertices, stored as a bitmask.
//! The three generators act by the augmentation, the Alexander-Whitney
//! diagonal and the signed join. A graph term is evaluated by running its
//! vertices in a topological order over a tensor of cells, one cell per open
//! wire. On a general simplicial set a term is evaluated on the standard
//! simplex and pushed forward along characteristic maps.
//!
//! The augmented variant grades faces by cardinality, includes the empty
//! face, and reads graphs backwards (outputs to inputs).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde_json::{json, Value};

use crate::coeff::{Coefficient, LinCombo, Ring};
use crate::error::{Error, Result};
use crate::graph::{permutation_sign, GraphTerm, Generator, PropElement, Source};
use crate::surjection::Surjection;

/// A face of a standard simplex, as the set of its vertices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face(pub u32);

impl Face {
    pub fn new(vertices: &[u32]) -> Result<Face> {
        let mut mask = 0u32;
        let mut last: Option<u32> = None;
        for &v in vertices {
            if v >= 32 || last.is_some_and(|l| l >= v) {
                return Err(Error::invalid(format!("{vertices:?} is not a strictly increasing vertex list below 32")));
            }
            mask |= 1 << v;
            last = Some(v);
        }
        Ok(Face(mask))
    }

    pub fn of(vertices: &[u32]) -> Face {
        Face::new(vertices).expect("valid face")
    }

    /// The full simplex `[0, .., d]`.
    pub fn top(d: usize) -> Face {
        Face(((1u64 << (d + 1)) - 1) as u32)
    }

    pub fn empty() -> Face {
        Face(0)
    }

    pub fn vertices(self) -> Vec<u32> {
        (0..32).filter(|&v| self.0 >> v & 1 == 1).collect()
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Simplicial dimension; `-1` for the empty face.
    pub fn dim(self) -> i64 {
        self.len() as i64 - 1
    }

    /// All faces of `Δ^d` of dimension `q`.
    pub fn all(d: usize, q: usize) -> Vec<Face> {
        (1u32..(1u32 << (d + 1))).filter(|m| m.count_ones() as usize == q + 1).map(Face).collect()
    }

    /// Every nonempty face of `Δ^d`.
    pub fn all_faces(d: usize) -> Vec<Face> {
        (1u32..(1u32 << (d + 1))).map(Face).collect()
    }

    pub fn to_json(self) -> Value {
        json!(self.vertices())
    }

    pub fn from_json(v: &Value) -> Result<Face> {
        let verts = v
            .as_array()
            .ok_or_else(|| Error::parse(format!("a face is a vertex list, got {v}")))?
            .iter()
            .map(|x| x.as_u64().map(|x| x as u32).ok_or_else(|| Error::parse(format!("bad vertex {x}"))))
            .collect::<Result<Vec<_>>>()?;
        Face::new(&verts)
    }
}

impl fmt::Debug for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.vertices())
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vertices().iter().map(u32::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// A tensor word of faces.
pub type Word = Vec<Face>;
/// A chain on (tensor powers of) a standard simplex.
pub type Chain = LinCombo<Word>;

/// `Σ_i [v0..vi] ⊗ [vi..vq]`.
pub fn aw(f: Face) -> Vec<(Face, Face)> {
    let vs = f.vertices();
    (0..vs.len()).map(|i| (Face::of(&vs[..=i]), Face::of(&vs[i..]))).collect()
}

/// Number of pairs `(x, y)` with `x ∈ a`, `y ∈ b` and `x > y`.
fn crossings(a: Face, b: Face) -> u32 {
    b.vertices().iter().map(|&y| (a.0 >> (y + 1)).count_ones()).sum()
}

fn parity(k: u32) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The join `(-1)^p sign(π) [sorted union]`, `p = dim a`, or `None` when the
/// faces share a vertex.
pub fn join(a: Face, b: Face) -> Option<(Face, i64)> {
    if a.0 & b.0 != 0 {
        return None;
    }
    Some((Face(a.0 | b.0), parity(a.dim() as u32 + crossings(a, b))))
}

pub fn augment(f: Face) -> i64 {
    (f.len() == 1) as i64
}

/// Faces of the boundary with signs; vertices have zero boundary unless
/// `augmented`, where `∂[v] = [∅]`.
pub fn face_boundary(f: Face, augmented: bool) -> Vec<(Face, i64)> {
    let vs = f.vertices();
    if vs.len() == 1 && !augmented {
        return vec![];
    }
    vs.iter().enumerate().map(|(i, &v)| (Face(f.0 & !(1 << v)), parity(i as u32))).collect()
}

/// Koszul-signed boundary of a tensor chain.
pub fn boundary(x: &Chain, augmented: bool) -> Chain {
    let mut out = Chain::zero(x.ring());
    for (w, c) in x.iter() {
        let mut prefix = 0usize;
        for k in 0..w.len() {
            for (f, s) in face_boundary(w[k], augmented) {
                let mut v = w.clone();
                v[k] = f;
                out.add_term(v, c.signed(s * parity(prefix as u32))).expect("same ring");
            }
            prefix += degree_of(w[k], augmented);
        }
    }
    out
}

fn degree_of(f: Face, augmented: bool) -> usize {
    if augmented {
        f.len()
    } else {
        f.len() - 1
    }
}

/// Which generator representation to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Forward,
    Augmented,
}

/// Applies one generator to the consumed cells, appending `(produced, sign)`.
fn apply_generator(mode: Mode, kind: Generator, cells: &[Face], out: &mut Vec<(Vec<Face>, i64)>) {
    match (mode, kind) {
        (Mode::Forward, Generator::Counit) => {
            if augment(cells[0]) != 0 {
                out.push((vec![], 1));
            }
        }
        (Mode::Forward, Generator::Coproduct) => {
            for (a, b) in aw(cells[0]) {
                out.push((vec![a, b], 1));
            }
        }
        (Mode::Forward, Generator::Product) => {
            if let Some((f, s)) = join(cells[0], cells[1]) {
                out.push((vec![f], s));
            }
        }
        (Mode::Augmented, Generator::Counit) => out.push((vec![Face::empty()], 1)),
        (Mode::Augmented, Generator::Coproduct) => {
            let (a, b) = (cells[0], cells[1]);
            if a.0 & b.0 == 0 {
                out.push((vec![Face(a.0 | b.0)], parity(crossings(a, b))));
            }
        }
        (Mode::Augmented, Generator::Product) => {
            let vs = cells[0].vertices();
            for i in 0..vs.len() {
                out.push((vec![Face::of(&vs[..=i]), Face::of(&vs[i..])], parity(i as u32)));
            }
        }
    }
}

/// Reorders `cells` by `perm` (new position `i` takes old `perm[i]`) and
/// returns the Koszul sign.
fn koszul_permute(cells: &[Face], perm: &[usize], augmented: bool) -> (Vec<Face>, i64) {
    let mut odd = 0u32;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                odd += (degree_of(cells[perm[i]], augmented) * degree_of(cells[perm[j]], augmented)) as u32;
            }
        }
    }
    (perm.iter().map(|&k| cells[k]).collect(), parity(odd))
}

/// Counts how often each of the six join cases occurs: both vertices or
/// not, sharing a vertex or not (see [`product_case`]).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CaseLog {
    pub counts: [usize; 6],
}

/// Case of the product on `a ⊗ b`: 0/1 both vertices (disjoint/sharing),
/// 2/3 exactly one vertex, 4/5 neither.
pub fn product_case(a: Face, b: Face) -> usize {
    let zeros = (a.len() == 1) as usize + (b.len() == 1) as usize;
    let base = match zeros {
        2 => 0,
        1 => 2,
        _ => 4,
    };
    base + (a.0 & b.0 != 0) as usize
}

/// Evaluates one graph on a chain. `order` must list the vertices in a
/// topological order for the chosen direction.
fn evaluate_graph(
    mode: Mode,
    g: &GraphTerm,
    x: &Chain,
    order: &[usize],
    mut log: Option<&mut CaseLog>,
) -> Chain {
    let augmented = mode == Mode::Augmented;
    let ring = x.ring();
    let verts = g.vertices();
    let products: Vec<usize> =
        order.iter().rev().copied().filter(|&v| verts[v].kind == Generator::Product).collect();
    let orientation = permutation_sign(&products);

    let (mut wires, finals): (Vec<Source>, Vec<Source>) = match mode {
        Mode::Forward => ((0..g.n() as u32).map(Source::Input).collect(), g.outputs().to_vec()),
        Mode::Augmented => (g.outputs().to_vec(), (0..g.n() as u32).map(Source::Input).collect()),
    };
    let mut state: LinCombo<Word> = LinCombo::zero(ring);
    for (w, c) in x.iter() {
        state.add_term(w.clone(), c.signed(orientation)).expect("same ring");
    }
    let mut produced = Vec::new();
    for &v in order {
        let kind = verts[v].kind;
        let ports: Vec<Source> = (0..kind.outputs() as u8).map(|p| Source::Port(v as u32, p)).collect();
        let (consumed, made): (Vec<Source>, Vec<Source>) = match mode {
            Mode::Forward => (verts[v].ins().to_vec(), ports),
            Mode::Augmented => (ports, verts[v].ins().to_vec()),
        };
        let positions: Vec<usize> = consumed
            .iter()
            .map(|s| wires.iter().position(|w| w == s).expect("consumed wire is open"))
            .collect();
        let rest: Vec<usize> = (0..wires.len()).filter(|i| !positions.contains(i)).collect();
        let perm: Vec<usize> = rest.iter().chain(&positions).copied().collect();
        let mut next: LinCombo<Word> = LinCombo::zero(ring);
        for (w, c) in state.iter() {
            let (w, s0) = koszul_permute(w, &perm, augmented);
            let split = rest.len();
            let prefix_deg: usize = w[..split].iter().map(|&f| degree_of(f, augmented)).sum();
            let s1 = parity((kind.degree() * prefix_deg) as u32);
            if let (Some(log), Generator::Product, Mode::Forward) = (log.as_deref_mut(), kind, mode) {
                log.counts[product_case(w[split], w[split + 1])] += 1;
            }
            produced.clear();
            apply_generator(mode, kind, &w[split..], &mut produced);
            for (cells, s2) in &produced {
                let mut out: Word = w[..split].to_vec();
                out.extend(cells);
                next.add_term(out, c.signed(s0 * s1 * s2)).expect("same ring");
            }
        }
        state = next;
        let mut new_wires: Vec<Source> = rest.iter().map(|&i| wires[i]).collect();
        new_wires.extend(made);
        wires = new_wires;
    }
    let perm: Vec<usize> = finals
        .iter()
        .map(|s| wires.iter().position(|w| w == s).expect("final wire is open"))
        .collect();
    let mut out = LinCombo::zero(ring);
    for (w, c) in state.iter() {
        let (w, s) = koszul_permute(w, &perm, augmented);
        out.add_term(w, c.signed(s)).expect("same ring");
    }
    out
}

fn check_input(g: &PropElement, x: &Chain, arity: usize) -> Result<()> {
    if g.ring() != x.ring() {
        return Err(Error::RingMismatch(g.ring(), x.ring()));
    }
    for w in x.basis() {
        if w.len() != arity {
            return Err(Error::invalid(format!("tensor of arity {} where {arity} was expected", w.len())));
        }
    }
    Ok(())
}

/// Evaluates `g ∈ S(n, m)` on an arity-`n` chain on a standard simplex.
pub fn evaluate(g: &PropElement, x: &Chain) -> Result<Chain> {
    check_input(g, x, g.biarity().0)?;
    if x.basis().any(|w| w.iter().any(|f| f.is_empty())) {
        return Err(Error::invalid("the empty face only exists in the augmented setting"));
    }
    let mut out = Chain::zero(x.ring());
    for (t, c) in g.terms() {
        let order = t.topological_order();
        out.add_scaled(&evaluate_graph(Mode::Forward, t, x, &order, None), c)?;
    }
    Ok(out)
}

/// As [`evaluate`], running each graph in the given vertex order.
pub fn evaluate_in_order(g: &GraphTerm, x: &Chain, order: &[usize]) -> Chain {
    evaluate_graph(Mode::Forward, g, x, order, None)
}

/// As [`evaluate`], recording the join cases met along the way.
pub fn evaluate_logged(g: &PropElement, x: &Chain, log: &mut CaseLog) -> Result<Chain> {
    check_input(g, x, g.biarity().0)?;
    let mut out = Chain::zero(x.ring());
    for (t, c) in g.terms() {
        let order = t.topological_order();
        out.add_scaled(&evaluate_graph(Mode::Forward, t, x, &order, Some(log)), c)?;
    }
    Ok(out)
}

/// Evaluates `g ∈ S(n, m)` as an operation from arity `m` to arity `n` on
/// augmented chains, reading the graph from outputs to inputs.
pub fn evaluate_augmented(g: &PropElement, x: &Chain) -> Result<Chain> {
    check_input(g, x, g.biarity().1)?;
    let mut out = Chain::zero(x.ring());
    for (t, c) in g.terms() {
        let mut order = t.topological_order();
        order.reverse();
        out.add_scaled(&evaluate_graph(Mode::Augmented, t, x, &order, None), c)?;
    }
    Ok(out)
}

/// The element of `F2`-chains given by the surjection coaction on a face:
/// the sum over `0 = i_0 <= .. <= i_n = q` of the tensors whose factor `r`
/// concatenates the blocks `[v_{i_{j-1}}, .., v_{i_j}]` with `s(j) = r`.
pub fn sur_coact(s: &Surjection, face: Face) -> Chain {
    let vs = face.vertices();
    let q = vs.len() - 1;
    let n = s.len();
    let m = s.arity();
    let mut out = Chain::zero(Ring::F2);
    let mut cuts = vec![0usize; n + 1];
    cuts[n] = q;
    fn rec(j: usize, n: usize, cuts: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if j == n {
            f(cuts);
            return;
        }
        for c in cuts[j - 1]..=cuts[n] {
            cuts[j] = c;
            rec(j + 1, n, cuts, f);
        }
    }
    let mut emit = |cuts: &[usize]| {
        let mut factors: Vec<Vec<u32>> = vec![Vec::new(); m];
        for j in 1..=n {
            factors[s.seq()[j - 1] as usize - 1].extend(&vs[cuts[j - 1]..=cuts[j]]);
        }
        let mut word = Vec::with_capacity(m);
        for f in &factors {
            match Face::new(f) {
                Ok(face) => word.push(face),
                Err(_) => return,
            }
        }
        out.add_int(word, 1);
    };
    if n == 1 {
        emit(&[0, q]);
    } else {
        rec(1, n, &mut cuts, &mut emit);
    }
    out
}

/// Identifier of a nondegenerate simplex: dimension and index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimplexId {
    pub dim: u32,
    pub index: u32,
}

/// A possibly degenerate simplex: the nondegenerate `base` pulled back along
/// the monotone surjection `eta` (a vertex map onto `0..=base.dim`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Simplex {
    pub base: SimplexId,
    pub eta: Vec<u32>,
}

impl Simplex {
    fn nondegenerate(id: SimplexId) -> Self {
        Simplex { base: id, eta: (0..=id.dim).collect() }
    }

    pub fn is_degenerate(&self) -> bool {
        self.eta.len() != self.base.dim as usize + 1
    }
}

/// A finite simplicial set given by its nondegenerate simplices and the
/// faces of each.
#[derive(Clone, Debug)]
pub struct SimplicialSet {
    names: Vec<Vec<String>>,
    /// `faces[q][k][i]` is `d_i` of simplex `k` of dimension `q`, for `q >= 1`.
    faces: Vec<Vec<Vec<Simplex>>>,
    lookup: HashMap<String, SimplexId>,
    /// For ordered complexes, the vertex list of each simplex.
    vertex_lists: Option<Vec<Vec<Vec<u32>>>>,
}

/// A chain on a simplicial set, possibly a tensor power.
pub type XChain = LinCombo<Vec<SimplexId>>;

impl SimplicialSet {
    /// The ordered complex generated by `simplices` on vertices `0..n`.
    /// Vertex lists are sorted; every face of a listed simplex is included.
    pub fn from_complex(vertex_names: &[String], simplices: &[Vec<u32>]) -> Result<Self> {
        let nv = vertex_names.len() as u32;
        let mut all: BTreeMap<usize, std::collections::BTreeSet<Vec<u32>>> = BTreeMap::new();
        for v in 0..nv {
            all.entry(0).or_default().insert(vec![v]);
        }
        for s in simplices {
            let mut s = s.clone();
            s.sort_unstable();
            s.dedup();
            if s.iter().any(|&v| v >= nv) {
                return Err(Error::invalid(format!("simplex {s:?} uses an unknown vertex")));
            }
            if s.len() > 31 {
                return Err(Error::invalid("simplices of dimension above 30 are not supported"));
            }
            let k = s.len();
            for mask in 1u32..(1u32 << k) {
                let sub: Vec<u32> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect();
                all.entry(sub.len() - 1).or_default().insert(sub);
            }
        }
        let top = all.keys().copied().max().unwrap_or(0);
        let mut lists: Vec<Vec<Vec<u32>>> = vec![Vec::new(); top + 1];
        for (q, set) in all {
            lists[q] = set.into_iter().collect();
        }
        let index: Vec<HashMap<Vec<u32>, u32>> = lists
            .iter()
            .map(|l| l.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect())
            .collect();
        let mut names = Vec::new();
        let mut faces = vec![Vec::new()];
        for (q, l) in lists.iter().enumerate() {
            names.push(
                l.iter()
                    .map(|s| {
                        let parts: Vec<&str> = s.iter().map(|&v| vertex_names[v as usize].as_str()).collect();
                        format!("[{}]", parts.join(","))
                    })
                    .collect(),
            );
            if q >= 1 {
                faces.push(
                    l.iter()
                        .map(|s| {
                            (0..s.len())
                                .map(|i| {
                                    let mut f = s.clone();
                                    f.remove(i);
                                    Simplex::nondegenerate(SimplexId { dim: q as u32 - 1, index: index[q - 1][&f] })
                                })
                                .collect()
                        })
                        .collect(),
                );
            }
        }
        let mut x = SimplicialSet { names, faces, lookup: HashMap::new(), vertex_lists: Some(lists) };
        x.build_lookup()?;
        Ok(x)
    }

    /// The standard simplex `Δ^d` with vertices `0..=d`.
    pub fn standard(d: usize) -> Self {
        let names: Vec<String> = (0..=d).map(|v| v.to_string()).collect();
        SimplicialSet::from_complex(&names, &[(0..=d as u32).collect()]).expect("valid")
    }

    /// The boundary of `Δ^d`.
    pub fn standard_boundary(d: usize) -> Self {
        let names: Vec<String> = (0..=d).map(|v| v.to_string()).collect();
        let facets: Vec<Vec<u32>> =
            (0..=d as u32).map(|i| (0..=d as u32).filter(|&v| v != i).collect()).collect();
        SimplicialSet::from_complex(&names, &facets).expect("valid")
    }

    fn build_lookup(&mut self) -> Result<()> {
        self.lookup.clear();
        for (q, l) in self.names.iter().enumerate() {
            for (i, name) in l.iter().enumerate() {
                let id = SimplexId { dim: q as u32, index: i as u32 };
                if self.lookup.insert(name.clone(), id).is_some() {
                    return Err(Error::invalid(format!("simplex name `{name}` is used twice")));
                }
            }
        }
        Ok(())
    }

    /// Parses either `{"complex": {..}}` or `{"sset": {..}}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        if let Some(c) = v.get("complex") {
            let verts = c
                .get("vertices")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::parse("complex needs a \"vertices\" array"))?;
            let names: Vec<String> = verts.iter().map(label).collect();
            let pos: HashMap<&str, u32> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i as u32)).collect();
            if pos.len() != names.len() {
                return Err(Error::invalid("complex has repeated vertex labels"));
            }
            let simplices = c
                .get("simplices")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::parse("complex needs a \"simplices\" array"))?
                .iter()
                .map(|s| {
                    s.as_array()
                        .ok_or_else(|| Error::parse("each simplex is a vertex list"))?
                        .iter()
                        .map(|v| {
                            let l = label(v);
                            pos.get(l.as_str()).copied().ok_or_else(|| Error::invalid(format!("unknown vertex {l}")))
                        })
                        .collect::<Result<Vec<u32>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            return SimplicialSet::from_complex(&names, &simplices);
        }
        let s = v.get("sset").ok_or_else(|| Error::parse("expected a \"complex\" or \"sset\" object"))?;
        let cells = s
            .get("cells")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::parse("sset needs a \"cells\" object"))?;
        let mut names: Vec<Vec<String>> = Vec::new();
        for (dim, list) in cells {
            let q: usize = dim.parse().map_err(|_| Error::parse(format!("bad dimension key `{dim}`")))?;
            if names.len() <= q {
                names.resize(q + 1, Vec::new());
            }
            names[q] = list
                .as_array()
                .ok_or_else(|| Error::parse("cells map dimensions to name lists"))?
                .iter()
                .map(label)
                .collect();
        }
        let mut x = SimplicialSet {
            faces: vec![Vec::new(); names.len()],
            names,
            lookup: HashMap::new(),
            vertex_lists: None,
        };
        x.build_lookup()?;
        let face_map = s
            .get("faces")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::parse("sset needs a \"faces\" object"))?;
        for q in 1..x.names.len() {
            let mut per = Vec::new();
            for name in &x.names[q] {
                let entries = face_map
                    .get(name)
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::invalid(format!("no faces given for `{name}`")))?;
                if entries.len() != q + 1 {
                    return Err(Error::invalid(format!("`{name}` has dimension {q} but {} faces", entries.len())));
                }
                per.push(entries.iter().map(|e| x.parse_face_entry(e, q - 1)).collect::<Result<Vec<_>>>()?);
            }
            x.faces[q] = per;
        }
        x.check_identities()?;
        Ok(x)
    }

    fn parse_face_entry(&self, e: &Value, dim: usize) -> Result<Simplex> {
        let (name, flag) = match e {
            Value::String(s) => (s.clone(), None),
            Value::Array(a) if !a.is_empty() => (label(&a[0]), a.get(1)),
            _ => return Err(Error::parse(format!("bad face entry {e}"))),
        };
        let id = *self.lookup.get(&name).ok_or_else(|| Error::invalid(format!("unknown face `{name}`")))?;
        let base_dim = id.dim as usize;
        let eta: Vec<u32> = match flag {
            None | Some(Value::Bool(false)) | Some(Value::Null) => (0..=id.dim).collect(),
            Some(Value::Bool(true)) if base_dim == 0 => vec![0; dim + 1],
            Some(Value::Bool(true)) => {
                return Err(Error::invalid(format!(
                    "degenerate face on `{name}` needs its degeneracy indices, e.g. [\"{name}\", [0]]"
                )))
            }
            Some(Value::Array(js)) => {
                // s_{j1} .. s_{jr} applied to the base: the last one acts first.
                let js: Vec<u32> = js
                    .iter()
                    .map(|j| j.as_u64().map(|j| j as u32).ok_or_else(|| Error::parse("degeneracy indices are integers")))
                    .collect::<Result<_>>()?;
                let mut eta: Vec<u32> = (0..=id.dim).collect();
                for &j in js.iter().rev() {
                    if j as usize >= eta.len() {
                        return Err(Error::invalid(format!("degeneracy s_{j} out of range on `{name}`")));
                    }
                    let len = eta.len();
                    eta = (0..=len as u32).map(|i| eta[if i <= j { i } else { i - 1 } as usize]).collect();
                }
                eta
            }
            Some(other) => return Err(Error::parse(format!("bad degeneracy flag {other}"))),
        };
        if eta.len() != dim + 1 {
            return Err(Error::invalid(format!("face `{name}` does not have dimension {dim}")));
        }
        Ok(Simplex { base: id, eta })
    }

    /// Checks `d_i d_j = d_{j-1} d_i` for `i < j` on every simplex.
    pub fn check_identities(&self) -> Result<()> {
        for q in 2..self.names.len() {
            for k in 0..self.names[q].len() {
                let x = Simplex::nondegenerate(SimplexId { dim: q as u32, index: k as u32 });
                for j in 0..=q {
                    for i in 0..j {
                        let a = self.face(&self.face(&x, j), i);
                        let b = self.face(&self.face(&x, i), j - 1);
                        if a != b {
                            return Err(Error::invalid(format!(
                                "face tables of `{}` violate d_{i} d_{j} = d_{} d_{i}",
                                self.names[q][k],
                                j - 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.names.len().saturating_sub(1)
    }

    pub fn count(&self, q: usize) -> usize {
        self.names.get(q).map_or(0, Vec::len)
    }

    pub fn simplices(&self, q: usize) -> impl Iterator<Item = SimplexId> {
        (0..self.count(q) as u32).map(move |index| SimplexId { dim: q as u32, index })
    }

    pub fn name(&self, id: SimplexId) -> &str {
        &self.names[id.dim as usize][id.index as usize]
    }

    pub fn id(&self, name: &str) -> Option<SimplexId> {
        self.lookup.get(name).copied()
    }

    /// For ordered complexes, the vertex list of a simplex.
    pub fn vertex_list(&self, id: SimplexId) -> Option<&[u32]> {
        self.vertex_lists.as_ref().map(|l| l[id.dim as usize][id.index as usize].as_slice())
    }

    /// `d_i` of a possibly degenerate simplex.
    pub fn face(&self, x: &Simplex, i: usize) -> Simplex {
        let delta: Vec<u32> = (0..x.eta.len() as u32).filter(|&v| v as usize != i).collect();
        self.restrict(x, &delta)
    }

    /// The simplex `x ∘ δ` for a strictly increasing vertex list `delta`.
    pub fn restrict(&self, x: &Simplex, delta: &[u32]) -> Simplex {
        let comp: Vec<u32> = delta.iter().map(|&i| x.eta[i as usize]).collect();
        let mut image = comp.clone();
        image.dedup();
        if image.len() == x.base.dim as usize + 1 {
            return Simplex { base: x.base, eta: comp };
        }
        let inner = self.restrict_base(x.base, &image);
        let eta = comp
            .iter()
            .map(|v| inner.eta[image.binary_search(v).expect("in image")])
            .collect();
        Simplex { base: inner.base, eta }
    }

    /// The face of a nondegenerate simplex spanned by `image` (a proper
    /// subset of its vertices), through the face tables.
    fn restrict_base(&self, id: SimplexId, image: &[u32]) -> Simplex {
        let q = id.dim as usize;
        let missing = (0..=q as u32).rev().find(|v| image.binary_search(v).is_err()).expect("proper subset");
        let f = &self.faces[q][id.index as usize][missing as usize];
        let shifted: Vec<u32> = image.iter().map(|&v| if v > missing { v - 1 } else { v }).collect();
        self.restrict(f, &shifted)
    }

    /// The image of a face of `Δ^d` under the characteristic map of a
    /// `d`-simplex, or `None` if degenerate.
    pub fn push_face(&self, x: SimplexId, f: Face) -> Option<SimplexId> {
        let s = self.restrict(&Simplex::nondegenerate(x), &f.vertices());
        (!s.is_degenerate()).then_some(s.base)
    }

    /// Signed boundary of a chain (one tensor factor).
    pub fn boundary(&self, c: &LinCombo<SimplexId>) -> LinCombo<SimplexId> {
        let mut out = LinCombo::zero(c.ring());
        for (&x, coef) in c.iter() {
            if x.dim == 0 {
                continue;
            }
            for (i, f) in self.faces[x.dim as usize][x.index as usize].iter().enumerate() {
                if !f.is_degenerate() {
                    out.add_term(f.base, coef.signed(parity(i as u32))).expect("same ring");
                }
            }
        }
        out
    }

    pub fn chain_to_json(&self, c: &XChain) -> Value {
        c.to_json_with(|w| json!(w.iter().map(|&id| self.name(id)).collect::<Vec<_>>()))
    }

    /// Reads a simplex reference: a name, or for complexes a vertex list.
    pub fn parse_simplex(&self, v: &Value) -> Result<SimplexId> {
        let name = match v {
            Value::String(s) => s.clone(),
            Value::Array(a) => {
                let parts: Vec<String> = a.iter().map(label).collect();
                format!("[{}]", parts.join(","))
            }
            Value::Number(n) => format!("[{n}]"),
            _ => return Err(Error::parse(format!("bad simplex reference {v}"))),
        };
        self.id(&name)
            .or_else(|| self.id(name.trim_matches(|c| c == '[' || c == ']')))
            .ok_or_else(|| Error::invalid(format!("unknown simplex {name}")))
    }

    /// Parses a chain: a LinCombo object, a single simplex reference, or a
    /// list of simplex references (each with coefficient one).
    pub fn parse_chain(&self, v: &Value, ring: Ring) -> Result<LinCombo<SimplexId>> {
        if v.get("terms").is_some() {
            return LinCombo::from_json_in_ring(ring, v, |b| self.parse_simplex(b));
        }
        if let Value::Array(a) = v {
            if !a.is_empty() && a.iter().all(|x| x.is_array() || x.is_string()) && !a.iter().all(Value::is_string) {
                let mut out = LinCombo::zero(ring);
                for x in a {
                    out.add_int(self.parse_simplex(x)?, 1);
                }
                return Ok(out);
            }
            if a.is_empty() {
                return Ok(LinCombo::zero(ring));
            }
        }
        Ok(LinCombo::single(ring, self.parse_simplex(v)?))
    }
}

fn label(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Chain operations of graph terms on a simplicial set, cached per
/// dimension.
pub struct Coaction<'a> {
    x: &'a SimplicialSet,
    g: PropElement,
    cache: HashMap<usize, Chain>,
}

impl<'a> Coaction<'a> {
    pub fn new(g: &PropElement, x: &'a SimplicialSet) -> Result<Self> {
        if g.biarity().0 != 1 {
            return Err(Error::invalid(format!(
                "coaction needs a term with one input, got biarity {:?}",
                g.biarity()
            )));
        }
        Ok(Coaction { x, g: g.clone(), cache: HashMap::new() })
    }

    fn on_standard(&mut self, d: usize) -> Result<&Chain> {
        if !self.cache.contains_key(&d) {
            let top = Chain::single(self.g.ring(), vec![Face::top(d)]);
            let v = evaluate(&self.g, &top)?;
            self.cache.insert(d, v);
        }
        Ok(&self.cache[&d])
    }

    pub fn apply(&mut self, c: &LinCombo<SimplexId>) -> Result<XChain> {
        if c.ring() != self.g.ring() {
            return Err(Error::RingMismatch(self.g.ring(), c.ring()));
        }
        let mut out = XChain::zero(c.ring());
        for (&x, coef) in c.iter() {
            let x_set = self.x;
            let val = self.on_standard(x.dim as usize)?.clone();
            'terms: for (w, k) in val.iter() {
                let mut word = Vec::with_capacity(w.len());
                for &f in w {
                    match x_set.push_face(x, f) {
                        Some(id) => word.push(id),
                        None => continue 'terms,
                    }
                }
                out.add_term(word, k.mul(coef)?)?;
            }
        }
        Ok(out)
    }
}

/// `coact(g, X, c)`: evaluate on standard simplices, push forward.
pub fn coact(g: &PropElement, x: &SimplicialSet, c: &LinCombo<SimplexId>) -> Result<XChain> {
    Coaction::new(g, x)?.apply(c)
}

/// The surjection coaction pushed forward to a simplicial set, over `F2`.
pub fn sur_coact_on(s: &Surjection, x: &SimplicialSet, c: &LinCombo<SimplexId>) -> XChain {
    let mut out = XChain::zero(Ring::F2);
    for (&id, coef) in c.mod2().iter() {
        let val = sur_coact(s, Face::top(id.dim as usize));
        'terms: for (w, k) in val.iter() {
            let mut word = Vec::new();
            for &f in w {
                match x.push_face(id, f) {
                    Some(y) => word.push(y),
                    None => continue 'terms,
                }
            }
            out.add_term(word, k.mul(coef).expect("F2")).expect("F2");
        }
    }
    out
}

/// A homogeneous cochain: coefficients on simplices of one dimension.
pub type Cochain = LinCombo<SimplexId>;

/// The dual action of `g ∈ S(1, m)` on cochains, with
/// `⟨g*(α), c⟩ = (-1)^{|α||g|} ⟨α_1 ⊗ .. ⊗ α_m, g(c)⟩` and the Koszul sign
/// for pairing tensors.
pub fn cochain_act(g: &PropElement, x: &SimplicialSet, alphas: &[(usize, Cochain)]) -> Result<(usize, Cochain)> {
    let (n, m) = g.biarity();
    if n != 1 || alphas.len() != m {
        return Err(Error::invalid(format!("{} cochains for a term of biarity ({n}, {m})", alphas.len())));
    }
    let deg_g = g.degree().ok_or_else(|| Error::invalid("cochain action needs a homogeneous term"))?;
    let total: usize = alphas.iter().map(|(d, _)| d).sum();
    let ring = g.ring();
    if total < deg_g {
        return Ok((0, Cochain::zero(ring)));
    }
    let target_dim = total - deg_g;
    let mut out = Cochain::zero(ring);
    let mut co = Coaction::new(g, x)?;
    let outer = parity((total * deg_g) as u32);
    for id in x.simplices(target_dim) {
        let image = co.apply(&LinCombo::single(ring, id))?;
        let mut acc = Coefficient::zero(ring);
        'terms: for (w, k) in image.iter() {
            let mut val = k.signed(outer);
            let mut seen_dims = 0usize;
            for (i, &y) in w.iter().enumerate() {
                let (d, a) = &alphas[i];
                if y.dim as usize != *d {
                    continue 'terms;
                }
                let c = a.coefficient(&y);
                if c.is_zero() {
                    continue 'terms;
                }
                val = val.mul(&c)?.signed(parity((d * seen_dims) as u32));
                seen_dims += y.dim as usize;
            }
            acc = acc.add(&val)?;
        }
        out.add_term(id, acc)?;
    }
    Ok((target_dim, out))
}

/// Coboundary over `F2` or `Z`: `(δα)(c) = α(∂c)`.
pub fn coboundary(x: &SimplicialSet, q: usize, alpha: &Cochain) -> Cochain {
    let ring = alpha.ring();
    let mut out = Cochain::zero(ring);
    for id in x.simplices(q + 1) {
        let b = x.boundary(&LinCombo::single(ring, id));
        let mut acc = Coefficient::zero(ring);
        for (y, c) in b.iter() {
            acc = acc.add(&c.mul(&alpha.coefficient(y)).expect("same ring")).expect("same ring");
        }
        out.add_term(id, acc).expect("same ring");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(faces: &[&[u32]]) -> Word {
        faces.iter().map(|f| Face::of(f)).collect()
    }

    fn chain(ring: Ring, terms: &[(&[&[u32]], i64)]) -> Chain {
        let mut c = Chain::zero(ring);
        for (w, k) in terms {
            c.add_int(word(w), *k);
        }
        c
    }

    #[test]
    fn aw_of_an_edge() {
        assert_eq!(aw(Face::of(&[0, 1])), vec![(Face::of(&[0]), Face::of(&[0, 1])), (Face::of(&[0, 1]), Face::of(&[1]))]);
        assert_eq!(aw(Face::of(&[0])), vec![(Face::of(&[0]), Face::of(&[0]))]);
        assert_eq!(aw(Face::of(&[0, 1, 2])).len(), 3);
    }

    #[test]
    fn join_signs() {
        assert_eq!(join(Face::of(&[0]), Face::of(&[1])), Some((Face::of(&[0, 1]), 1)));
        assert_eq!(join(Face::of(&[1]), Face::of(&[0])), Some((Face::of(&[0, 1]), -1)));
        assert_eq!(join(Face::of(&[0]), Face::of(&[0])), None);
        // [0,1] * [2]: p = 1, no crossings
        assert_eq!(join(Face::of(&[0, 1]), Face::of(&[2])), Some((Face::of(&[0, 1, 2]), -1)));
    }

    #[test]
    fn augmentation() {
        assert_eq!(augment(Face::of(&[3])), 1);
        assert_eq!(augment(Face::of(&[0, 1])), 0);
    }

    #[test]
    fn coproduct_evaluates_to_aw() {
        let d = PropElement::generator(Ring::Z, Generator::Coproduct);
        let x = chain(Ring::Z, &[(&[&[0, 1, 2]], 1)]);
        let expected = chain(
            Ring::Z,
            &[(&[&[0], &[0, 1, 2]], 1), (&[&[0, 1], &[1, 2]], 1), (&[&[0, 1, 2], &[2]], 1)],
        );
        assert_eq!(evaluate(&d, &x).unwrap(), expected);
    }

    #[test]
    fn product_boundary_on_two_vertices() {
        let p = PropElement::generator(Ring::Z, Generator::Product);
        let x = chain(Ring::Z, &[(&[&[0], &[1]], 1)]);
        let d = evaluate(&p.differential(), &x).unwrap();
        assert_eq!(d, chain(Ring::Z, &[(&[&[1]], 1), (&[&[0]], -1)]));
    }

    fn all_words(d: usize, n: usize) -> Vec<Word> {
        let faces = Face::all_faces(d);
        let mut out: Vec<Word> = vec![vec![]];
        for _ in 0..n {
            out = out.iter().flat_map(|w| faces.iter().map(move |&f| [w.clone(), vec![f]].concat())).collect();
        }
        out
    }

    #[test]
    fn random_terms_are_chain_maps() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = 1 + (rand::Rng::gen_range(&mut rng, 0..2usize));
            let (g, s) = crate::graph::random_term(&mut rng, n, 5);
            let deg = g.degree();
            let x = PropElement::from_term(Ring::Z, g, s);
            let dx = x.differential();
            for w in all_words(2, n) {
                let c = Chain::single(Ring::Z, w);
                let lhs = boundary(&evaluate(&x, &c).unwrap(), false);
                let mut rhs = evaluate(&dx, &c).unwrap();
                let inner = evaluate(&x, &boundary(&c, false)).unwrap();
                rhs.add_scaled(&inner, &Coefficient::from_i64(Ring::Z, parity(deg as u32))).unwrap();
                assert_eq!(lhs, rhs, "{:?} on {:?}", x.to_json(), c);
            }
        }
    }

    fn random_element(rng: &mut rand_chacha::ChaCha8Rng, n: usize, size: usize) -> PropElement {
        let (g, s) = crate::graph::random_term(rng, n, size);
        PropElement::from_term(Ring::Z, g, s)
    }

    fn tensor_words(a: &Chain, b: &Chain) -> Chain {
        let mut out = Chain::zero(Ring::Z);
        for (u, c) in a.iter() {
            for (v, k) in b.iter() {
                out.add_term([u.clone(), v.clone()].concat(), c.mul(k).unwrap()).unwrap();
            }
        }
        out
    }

    #[test]
    fn evaluation_respects_composition_and_tensor() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let b = random_element(&mut rng, 1, 3);
            let a = random_element(&mut rng, b.biarity().1, 3);
            let ab = a.compose(&b).unwrap();
            let c = random_element(&mut rng, 1, 3);
            for f in Face::all_faces(2) {
                let x = Chain::single(Ring::Z, vec![f]);
                assert_eq!(evaluate(&ab, &x).unwrap(), evaluate(&a, &evaluate(&b, &x).unwrap()).unwrap());
                for f2 in Face::all_faces(1) {
                    let y = Chain::single(Ring::Z, vec![f2]);
                    let xy = Chain::single(Ring::Z, vec![f, f2]);
                    let lhs = evaluate(&b.tensor(&c).unwrap(), &xy).unwrap();
                    let deg_c = c.degree().unwrap();
                    // (b ⊗ c)(x ⊗ y) = (-1)^{|c||x|} b(x) ⊗ c(y)
                    let mut expected = tensor_words(&evaluate(&b, &x).unwrap(), &evaluate(&c, &y).unwrap());
                    expected = expected.scale(&Coefficient::from_i64(Ring::Z, parity(((f.len() - 1) * deg_c) as u32))).unwrap();
                    assert_eq!(lhs, expected);
                }
            }
        }
    }

    #[test]
    fn augmented_evaluation_is_a_contravariant_chain_map() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let aug_faces: Vec<Face> = (0u32..8).map(Face).collect();
        for _ in 0..100 {
            let b = random_element(&mut rng, 1, 3);
            let a = random_element(&mut rng, b.biarity().1, 3);
            let ab = a.compose(&b).unwrap();
            let m = ab.biarity().1;
            let mut words: Vec<Word> = vec![vec![]];
            for _ in 0..m {
                words = words.iter().flat_map(|w| aug_faces.iter().map(move |&f| [w.clone(), vec![f]].concat())).collect();
            }
            if words.len() > 600 {
                continue;
            }
            for w in words {
                let x = Chain::single(Ring::Z, w);
                let lhs = evaluate_augmented(&ab, &x).unwrap();
                let rhs = evaluate_augmented(&b, &evaluate_augmented(&a, &x).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
                let deg = ab.degree().unwrap();
                let d_after = boundary(&lhs, true);
                let mut d_before = evaluate_augmented(&ab.differential(), &x).unwrap();
                let inner = evaluate_augmented(&ab, &boundary(&x, true)).unwrap();
                d_before.add_scaled(&inner, &Coefficient::from_i64(Ring::Z, parity(deg as u32))).unwrap();
                assert_eq!(d_after, d_before);
            }
        }
    }

    #[test]
    fn sur_coact_small_cases() {
        let s = Surjection::new(vec![1, 2]).unwrap();
        let expected = chain(Ring::F2, &[(&[&[0], &[0, 1]], 1), (&[&[0, 1], &[1]], 1)]);
        assert_eq!(sur_coact(&s, Face::of(&[0, 1])), expected);
        let id = Surjection::new(vec![1]).unwrap();
        assert_eq!(sur_coact(&id, Face::of(&[0, 2, 3])), chain(Ring::F2, &[(&[&[0, 2, 3]], 1)]));
    }

    #[test]
    fn standard_simplex_faces() {
        let x = SimplicialSet::standard(2);
        assert_eq!(x.count(0), 3);
        assert_eq!(x.count(1), 3);
        assert_eq!(x.count(2), 1);
        let top = x.simplices(2).next().unwrap();
        assert_eq!(x.push_face(top, Face::of(&[0, 2])).map(|id| x.name(id).to_string()), Some("[0,2]".into()));
        let b = x.boundary(&LinCombo::single(Ring::Z, top));
        assert_eq!(b.len(), 3);
        assert!(x.boundary(&b).is_zero());
    }

    #[test]
    fn degenerate_faces_in_a_sset() {
        // the 2-sphere as one 2-simplex with all faces collapsed to a point
        let v: Value = serde_json::from_str(
            r#"{"sset": {"cells": {"0": ["*"], "2": ["s"]},
                "faces": {"s": [["*", true], ["*", true], ["*", true]]}}}"#,
        )
        .unwrap();
        let x = SimplicialSet::from_json(&v).unwrap();
        let s = x.id("s").unwrap();
        assert!(x.boundary(&LinCombo::single(Ring::Z, s)).is_zero());
        assert_eq!(x.push_face(s, Face::of(&[0, 1])), None);
        assert_eq!(x.push_face(s, Face::of(&[1])), x.id("*"));
    }

    #[test]
    fn inconsistent_faces_are_rejected() {
        let v: Value = serde_json::from_str(
            r#"{"sset": {"cells": {"0": ["a", "b"], "1": ["e", "f", "g"], "2": ["t"]},
                "faces": {"e": [["b"], ["a"]], "f": [["b"], ["a"]], "g": [["a"], ["b"]],
                          "t": [["e"], ["f"], ["g"]]}}}"#,
        )
        .unwrap();
        assert!(SimplicialSet::from_json(&v).is_err());
    }
}

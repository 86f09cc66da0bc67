//! Graph monomials of the free prop on a counit, a coproduct and a product.
//!
//! A [`GraphTerm`] is stored in canonical form: vertices are numbered in the
//! order a breadth-first sweep from the external inputs first reaches them.
//! Since every generator has an input and graphs are acyclic, the sweep
//! reaches every vertex, so equal canonical forms means isomorphic graphs.
//!
//! Products have degree one. An oriented graph is a graph together with an
//! ordering of its product vertices; the basis element is the graph oriented
//! by its canonical order, and any other ordering differs from it by the
//! sign of the permutation between the two. All constructions below build a
//! raw graph with a known vertex order and let [`RawGraph::canonicalize`]
//! report that sign.

use std::collections::VecDeque;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Value};

use crate::coeff::{Coefficient, LinCombo, Ring};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Counit,
    Coproduct,
    Product,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::Counit, Generator::Coproduct, Generator::Product];

    pub fn inputs(self) -> usize {
        match self {
            Generator::Product => 2,
            _ => 1,
        }
    }

    pub fn outputs(self) -> usize {
        match self {
            Generator::Counit => 0,
            Generator::Coproduct => 2,
            Generator::Product => 1,
        }
    }

    pub fn degree(self) -> usize {
        match self {
            Generator::Product => 1,
            _ => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Generator::Counit => "counit",
            Generator::Coproduct => "coproduct",
            Generator::Product => "product",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s {
            "counit" => Ok(Generator::Counit),
            "coproduct" => Ok(Generator::Coproduct),
            "product" => Ok(Generator::Product),
            _ => Err(Error::parse(format!("unknown generator `{s}`"))),
        }
    }
}

/// Where a wire starts: an external input or an output port of a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    Input(u32),
    Port(u32, u8),
}

/// Where a wire ends: an external output or an input port of a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    Output(u32),
    Port(u32, u8),
}

impl Source {
    pub fn vertex(self) -> Option<usize> {
        match self {
            Source::Port(v, _) => Some(v as usize),
            Source::Input(_) => None,
        }
    }
}

impl Target {
    pub fn vertex(self) -> Option<usize> {
        match self {
            Target::Port(v, _) => Some(v as usize),
            Target::Output(_) => None,
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Input(i) => write!(f, "input {}", i + 1),
            Source::Port(v, p) => write!(f, "output port {p} of vertex {v}"),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Output(j) => write!(f, "output {}", j + 1),
            Target::Port(v, p) => write!(f, "input port {p} of vertex {v}"),
        }
    }
}

/// Filler for the unused second input slot of one-input vertices.
const UNUSED: Source = Source::Input(u32::MAX);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub kind: Generator,
    ins: [Source; 2],
}

impl Vertex {
    /// The sources feeding this vertex's input ports, in port order.
    pub fn ins(&self) -> &[Source] {
        &self.ins[..self.kind.inputs()]
    }
}

/// A graph under construction, with vertices in an arbitrary order.
#[derive(Clone, Debug)]
pub struct RawGraph {
    n: usize,
    m: usize,
    kinds: Vec<Generator>,
    ins: Vec<[Option<Source>; 2]>,
    outputs: Vec<Option<Source>>,
}

impl RawGraph {
    pub fn new(n: usize, m: usize) -> Self {
        RawGraph { n, m, kinds: Vec::new(), ins: Vec::new(), outputs: vec![None; m] }
    }

    pub fn add(&mut self, kind: Generator) -> u32 {
        self.kinds.push(kind);
        self.ins.push([None, None]);
        (self.kinds.len() - 1) as u32
    }

    pub fn wire(&mut self, s: Source, t: Target) {
        match t {
            Target::Output(j) => self.outputs[j as usize] = Some(s),
            Target::Port(v, p) => self.ins[v as usize][p as usize] = Some(s),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.kinds.len()
    }

    pub fn set_kind(&mut self, v: u32, kind: Generator) {
        self.kinds[v as usize] = kind;
        if kind.inputs() < 2 {
            self.ins[v as usize][1] = None;
        }
    }

    /// Drops the given vertices, which must no longer feed anything, and
    /// renumbers the rest keeping their relative order.
    pub fn remove_vertices(&self, dead: &[u32]) -> RawGraph {
        let nv = self.kinds.len();
        let mut new_index = vec![u32::MAX; nv];
        let mut next = 0;
        for v in 0..nv {
            if !dead.contains(&(v as u32)) {
                new_index[v] = next;
                next += 1;
            }
        }
        let rename = |s: Option<Source>| {
            s.map(|s| match s {
                Source::Port(v, p) => Source::Port(new_index[v as usize], p),
                s => s,
            })
        };
        let mut out = RawGraph::new(self.n, self.m);
        for v in 0..nv {
            if new_index[v] != u32::MAX {
                out.kinds.push(self.kinds[v]);
                out.ins.push([rename(self.ins[v][0]), rename(self.ins[v][1])]);
            }
        }
        out.outputs = self.outputs.iter().map(|&s| rename(s)).collect();
        out
    }

    /// The source currently wired into `t`.
    pub fn source_of(&self, t: Target) -> Option<Source> {
        match t {
            Target::Output(j) => self.outputs[j as usize],
            Target::Port(v, p) => self.ins[v as usize][p as usize],
        }
    }

    /// Validates the wiring and renumbers vertices canonically. Returns the
    /// canonical graph and the sign relating the raw orientation to it.
    pub fn canonicalize(&self) -> Result<(GraphTerm, i64)> {
        let nv = self.kinds.len();
        let mut input_tgt: Vec<Option<Target>> = vec![None; self.n];
        let mut port_tgt: Vec<[Option<Target>; 2]> = vec![[None, None]; nv];
        let mut claim = |s: Source, t: Target| -> Result<()> {
            let slot = match s {
                Source::Input(i) if (i as usize) < self.n => &mut input_tgt[i as usize],
                Source::Port(v, p)
                    if (v as usize) < nv && (p as usize) < self.kinds[v as usize].outputs() =>
                {
                    &mut port_tgt[v as usize][p as usize]
                }
                _ => return Err(Error::malformed(format!("{t} is fed by nonexistent {s}"))),
            };
            if let Some(prev) = slot {
                return Err(Error::malformed(format!("{s} is wired to both {prev} and {t}")));
            }
            *slot = Some(t);
            Ok(())
        };
        for v in 0..nv {
            for p in 0..self.kinds[v].inputs() {
                let t = Target::Port(v as u32, p as u8);
                let s = self.ins[v][p].ok_or_else(|| Error::malformed(format!("{t} is dangling")))?;
                claim(s, t)?;
            }
        }
        for j in 0..self.m {
            let t = Target::Output(j as u32);
            let s = self.outputs[j].ok_or_else(|| Error::malformed(format!("{t} is dangling")))?;
            claim(s, t)?;
        }
        for (i, t) in input_tgt.iter().enumerate() {
            if t.is_none() {
                return Err(Error::malformed(format!("{} is dangling", Source::Input(i as u32))));
            }
        }
        for v in 0..nv {
            for p in 0..self.kinds[v].outputs() {
                if port_tgt[v][p].is_none() {
                    let s = Source::Port(v as u32, p as u8);
                    return Err(Error::malformed(format!("{s} is dangling")));
                }
            }
        }

        // Acyclicity by repeatedly removing vertices whose inputs are settled.
        let mut pending: Vec<usize> = (0..nv)
            .map(|v| self.ins[v].iter().flatten().filter(|s| s.vertex().is_some()).count())
            .collect();
        let mut ready: Vec<usize> = (0..nv).filter(|&v| pending[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = ready.pop() {
            seen += 1;
            for t in port_tgt[v].iter().flatten() {
                if let Some(w) = t.vertex() {
                    pending[w] -= 1;
                    if pending[w] == 0 {
                        ready.push(w);
                    }
                }
            }
        }
        if seen < nv {
            let v = (0..nv).find(|&v| pending[v] > 0).unwrap();
            return Err(Error::malformed(format!("directed cycle through vertex {v}")));
        }

        let mut new_index: Vec<u32> = vec![u32::MAX; nv];
        let mut order: Vec<usize> = Vec::with_capacity(nv);
        let mut queue: VecDeque<Source> = (0..self.n as u32).map(Source::Input).collect();
        while let Some(s) = queue.pop_front() {
            let t = match s {
                Source::Input(i) => input_tgt[i as usize],
                Source::Port(v, p) => port_tgt[v as usize][p as usize],
            };
            if let Some(Target::Port(v, _)) = t {
                if new_index[v as usize] == u32::MAX {
                    new_index[v as usize] = order.len() as u32;
                    order.push(v as usize);
                    for p in 0..self.kinds[v as usize].outputs() {
                        queue.push_back(Source::Port(v, p as u8));
                    }
                }
            }
        }
        debug_assert_eq!(order.len(), nv, "acyclic graphs are reachable from inputs");

        let rename = |s: Source| match s {
            Source::Input(i) => Source::Input(i),
            Source::Port(v, p) => Source::Port(new_index[v as usize], p),
        };
        let vertices = order
            .iter()
            .map(|&v| {
                let kind = self.kinds[v];
                let mut ins = [UNUSED; 2];
                for p in 0..kind.inputs() {
                    ins[p] = rename(self.ins[v][p].unwrap());
                }
                Vertex { kind, ins }
            })
            .collect();
        let outputs = self.outputs.iter().map(|s| rename(s.unwrap())).collect();
        let products: Vec<u32> = (0..nv)
            .filter(|&v| self.kinds[v] == Generator::Product)
            .map(|v| new_index[v])
            .collect();
        Ok((GraphTerm { n: self.n, m: self.m, vertices, outputs }, permutation_sign(&products)))
    }
}

/// Sign of the permutation that sorts `seq` (distinct entries).
pub fn permutation_sign<T: Ord>(seq: &[T]) -> i64 {
    let mut inversions = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// A canonical graph monomial of biarity `(n, m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphTerm {
    n: usize,
    m: usize,
    vertices: Vec<Vertex>,
    outputs: Vec<Source>,
}

/// Forward wiring of a graph: the target of every source.
#[derive(Clone, Debug)]
pub struct Targets {
    inputs: Vec<Target>,
    ports: Vec<[Target; 2]>,
}

impl Targets {
    pub fn of(&self, s: Source) -> Target {
        match s {
            Source::Input(i) => self.inputs[i as usize],
            Source::Port(v, p) => self.ports[v as usize][p as usize],
        }
    }
}

impl GraphTerm {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn biarity(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn kind(&self, v: usize) -> Generator {
        self.vertices[v].kind
    }

    pub fn outputs(&self) -> &[Source] {
        &self.outputs
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn count(&self, kind: Generator) -> usize {
        self.vertices.iter().filter(|v| v.kind == kind).count()
    }

    /// Homological degree: the number of products.
    pub fn degree(&self) -> usize {
        self.count(Generator::Product)
    }

    pub fn identity(n: usize) -> Self {
        GraphTerm {
            n,
            m: n,
            vertices: Vec::new(),
            outputs: (0..n as u32).map(Source::Input).collect(),
        }
    }

    pub fn generator(kind: Generator) -> Self {
        let mut ins = [UNUSED; 2];
        for (p, slot) in ins.iter_mut().enumerate().take(kind.inputs()) {
            *slot = Source::Input(p as u32);
        }
        GraphTerm {
            n: kind.inputs(),
            m: kind.outputs(),
            vertices: vec![Vertex { kind, ins }],
            outputs: (0..kind.outputs() as u8).map(|p| Source::Port(0, p)).collect(),
        }
    }

    pub fn targets(&self) -> Targets {
        let mut inputs = vec![Target::Output(u32::MAX); self.n];
        let mut ports = vec![[Target::Output(u32::MAX); 2]; self.vertices.len()];
        let mut set = |s: Source, t: Target| match s {
            Source::Input(i) => inputs[i as usize] = t,
            Source::Port(v, p) => ports[v as usize][p as usize] = t,
        };
        for (v, vert) in self.vertices.iter().enumerate() {
            for (p, &s) in vert.ins().iter().enumerate() {
                set(s, Target::Port(v as u32, p as u8));
            }
        }
        for (j, &s) in self.outputs.iter().enumerate() {
            set(s, Target::Output(j as u32));
        }
        Targets { inputs, ports }
    }

    /// Vertices in an order where every vertex follows its predecessors.
    /// Among ready vertices the smallest index goes first.
    pub fn topological_order(&self) -> Vec<usize> {
        let nv = self.vertices.len();
        let mut pending: Vec<usize> =
            self.vertices.iter().map(|v| v.ins().iter().filter(|s| s.vertex().is_some()).count()).collect();
        let targets = self.targets();
        let mut ready: std::collections::BTreeSet<usize> = (0..nv).filter(|&v| pending[v] == 0).collect();
        let mut order = Vec::with_capacity(nv);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for p in 0..self.vertices[v].kind.outputs() {
                if let Some(w) = targets.of(Source::Port(v as u32, p as u8)).vertex() {
                    pending[w] -= 1;
                    if pending[w] == 0 {
                        ready.insert(w);
                    }
                }
            }
        }
        order
    }

    pub fn to_raw(&self) -> RawGraph {
        RawGraph {
            n: self.n,
            m: self.m,
            kinds: self.vertices.iter().map(|v| v.kind).collect(),
            ins: self
                .vertices
                .iter()
                .map(|v| {
                    let mut slots = [None, None];
                    for (p, &s) in v.ins().iter().enumerate() {
                        slots[p] = Some(s);
                    }
                    slots
                })
                .collect(),
            outputs: self.outputs.iter().map(|&s| Some(s)).collect(),
        }
    }

    /// `top ∘ bottom`: outputs of `bottom` are grafted to inputs of `top`.
    /// The raw orientation lists `top`'s vertices first.
    pub fn compose(top: &GraphTerm, bottom: &GraphTerm) -> Result<(GraphTerm, i64)> {
        if top.n != bottom.m {
            return Err(Error::Biarity(bottom.m, top.m, top.n, top.m));
        }
        let shift = top.vertices.len() as u32;
        let from_bottom = |s: Source| match s {
            Source::Input(i) => Source::Input(i),
            Source::Port(v, p) => Source::Port(v + shift, p),
        };
        let from_top = |s: Source| match s {
            Source::Input(j) => from_bottom(bottom.outputs[j as usize]),
            s => s,
        };
        let mut raw = RawGraph::new(bottom.n, top.m);
        for v in top.vertices.iter().chain(&bottom.vertices) {
            raw.add(v.kind);
        }
        for (v, vert) in top.vertices.iter().enumerate() {
            for (p, &s) in vert.ins().iter().enumerate() {
                raw.wire(from_top(s), Target::Port(v as u32, p as u8));
            }
        }
        for (v, vert) in bottom.vertices.iter().enumerate() {
            for (p, &s) in vert.ins().iter().enumerate() {
                raw.wire(from_bottom(s), Target::Port(v as u32 + shift, p as u8));
            }
        }
        for (j, &s) in top.outputs.iter().enumerate() {
            raw.wire(from_top(s), Target::Output(j as u32));
        }
        raw.canonicalize()
    }

    /// `a ⊗ b`, with `b`'s legs shifted past `a`'s and `a`'s vertices first.
    pub fn tensor(a: &GraphTerm, b: &GraphTerm) -> (GraphTerm, i64) {
        let shift = a.vertices.len() as u32;
        let from_b = |s: Source| match s {
            Source::Input(i) => Source::Input(i + a.n as u32),
            Source::Port(v, p) => Source::Port(v + shift, p),
        };
        let mut raw = RawGraph::new(a.n + b.n, a.m + b.m);
        for v in a.vertices.iter().chain(&b.vertices) {
            raw.add(v.kind);
        }
        for (v, vert) in a.vertices.iter().enumerate() {
            for (p, &s) in vert.ins().iter().enumerate() {
                raw.wire(s, Target::Port(v as u32, p as u8));
            }
        }
        for (v, vert) in b.vertices.iter().enumerate() {
            for (p, &s) in vert.ins().iter().enumerate() {
                raw.wire(from_b(s), Target::Port(v as u32 + shift, p as u8));
            }
        }
        for (j, &s) in a.outputs.iter().enumerate() {
            raw.wire(s, Target::Output(j as u32));
        }
        for (j, &s) in b.outputs.iter().enumerate() {
            raw.wire(from_b(s), Target::Output((j + a.m) as u32));
        }
        raw.canonicalize().expect("tensor of valid graphs is valid")
    }

    /// Relabels input `i` as `sigma[i]` and output `j` as `tau[j]` (0-based).
    /// The vertex orientation is carried along unchanged.
    pub fn act(&self, sigma: &[usize], tau: &[usize]) -> Result<(GraphTerm, i64)> {
        check_permutation(sigma, self.n)?;
        check_permutation(tau, self.m)?;
        let relabel = |s: Source| match s {
            Source::Input(i) => Source::Input(sigma[i as usize] as u32),
            s => s,
        };
        let mut raw = self.to_raw();
        for slots in raw.ins.iter_mut() {
            for s in slots.iter_mut().flatten() {
                *s = relabel(*s);
            }
        }
        let mut outputs = vec![None; self.m];
        for (j, &s) in self.outputs.iter().enumerate() {
            outputs[tau[j]] = Some(relabel(s));
        }
        raw.outputs = outputs;
        raw.canonicalize()
    }

    /// The differential of a single oriented graph.
    pub fn differential(&self, ring: Ring) -> LinCombo<GraphTerm> {
        let mut out = LinCombo::zero(ring);
        let targets = self.targets();
        let mut k = 0i64;
        for (v, vert) in self.vertices.iter().enumerate() {
            if vert.kind != Generator::Product {
                continue;
            }
            let after = targets.of(Source::Port(v as u32, 0));
            let outer = if k % 2 == 0 { 1 } else { -1 };
            for (capped, kept, sign) in [(0usize, 1usize, 1i64), (1, 0, -1)] {
                let mut raw = self.to_raw();
                raw.kinds[v] = Generator::Counit;
                raw.ins[v] = [Some(vert.ins[capped]), None];
                raw.wire(vert.ins[kept], after);
                let (g, s) = raw.canonicalize().expect("differential keeps graphs valid");
                out.add_int(g, outer * sign * s);
            }
            k += 1;
        }
        out
    }

    /// Serializes in the wire-list format with sorted wires.
    pub fn to_json(&self) -> Value {
        let mut wires: Vec<(Value, Value)> = Vec::new();
        for (v, vert) in self.vertices.iter().enumerate() {
            for (p, &s) in vert.ins().iter().enumerate() {
                wires.push((source_json(s), json!(["v", v, "in", p])));
            }
        }
        for (j, &s) in self.outputs.iter().enumerate() {
            wires.push((source_json(s), json!(["out", j + 1])));
        }
        wires.sort_by_key(|(a, b)| (a.to_string(), b.to_string()));
        json!({
            "n": self.n,
            "m": self.m,
            "vertices": self.vertices.iter().map(|v| v.kind.name()).collect::<Vec<_>>(),
            "wires": wires.into_iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
        })
    }

    /// Parses the wire-list format. The vertex list order is the orientation,
    /// so the returned sign relates it to the canonical orientation.
    pub fn from_json(v: &Value) -> Result<(GraphTerm, i64)> {
        let field = |name: &str| {
            v.get(name)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| Error::parse(format!("graph needs an integer \"{name}\"")))
        };
        let n = field("n")?;
        let m = field("m")?;
        let mut raw = RawGraph::new(n, m);
        let kinds = v
            .get("vertices")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse("graph needs a \"vertices\" array"))?;
        for k in kinds {
            let name = k.as_str().ok_or_else(|| Error::parse("vertex kinds must be strings"))?;
            raw.add(Generator::from_name(name)?);
        }
        let wires = v
            .get("wires")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse("graph needs a \"wires\" array"))?;
        for w in wires {
            let pair = w
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::parse("each wire is a pair of half-edges"))?;
            let a = parse_half_edge(&pair[0])?;
            let b = parse_half_edge(&pair[1])?;
            let (s, t) = match (a, b) {
                (HalfEdge::Source(s), HalfEdge::Target(t))
                | (HalfEdge::Target(t), HalfEdge::Source(s)) => (s, t),
                _ => return Err(Error::malformed(format!("wire {w} must join a source to a target"))),
            };
            match t {
                Target::Output(j) if j as usize >= m => {
                    return Err(Error::malformed(format!("output label {} out of range", j + 1)))
                }
                Target::Port(k, p)
                    if k as usize >= raw.num_vertices()
                        || p as usize >= raw.kinds[k as usize].inputs() =>
                {
                    return Err(Error::malformed(format!("no {t}")))
                }
                _ => {}
            }
            if raw.source_of(t).is_some() {
                return Err(Error::malformed(format!("{t} is wired twice")));
            }
            raw.wire(s, t);
        }
        raw.canonicalize()
    }
}

fn check_permutation(p: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if p.len() != n {
        return Err(Error::invalid(format!("permutation of size {} acting on {n} legs", p.len())));
    }
    for &x in p {
        if x >= n || seen[x] {
            return Err(Error::invalid(format!("{p:?} is not a permutation")));
        }
        seen[x] = true;
    }
    Ok(())
}

enum HalfEdge {
    Source(Source),
    Target(Target),
}

fn source_json(s: Source) -> Value {
    match s {
        Source::Input(i) => json!(["in", i + 1]),
        Source::Port(v, p) => json!(["v", v, "out", p]),
    }
}

fn parse_half_edge(v: &Value) -> Result<HalfEdge> {
    let bad = || Error::parse(format!("bad half-edge {v}"));
    let a = v.as_array().ok_or_else(bad)?;
    let tag = a.first().and_then(Value::as_str).ok_or_else(bad)?;
    let num = |i: usize| a.get(i).and_then(Value::as_u64).ok_or_else(bad);
    match (tag, a.len()) {
        ("in", 2) => {
            let i = num(1)?;
            if i == 0 {
                return Err(Error::parse("external labels start at 1"));
            }
            Ok(HalfEdge::Source(Source::Input(i as u32 - 1)))
        }
        ("out", 2) => {
            let j = num(1)?;
            if j == 0 {
                return Err(Error::parse("external labels start at 1"));
            }
            Ok(HalfEdge::Target(Target::Output(j as u32 - 1)))
        }
        ("v", 4) => {
            let k = num(1)? as u32;
            let p = num(3)? as u8;
            match a[2].as_str() {
                Some("in") => Ok(HalfEdge::Target(Target::Port(k, p))),
                Some("out") => Ok(HalfEdge::Source(Source::Port(k, p))),
                _ => Err(bad()),
            }
        }
        _ => Err(bad()),
    }
}

/// A homogeneous-biarity linear combination of graph terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PropElement {
    n: usize,
    m: usize,
    combo: LinCombo<GraphTerm>,
}

impl PropElement {
    pub fn zero(ring: Ring, n: usize, m: usize) -> Self {
        PropElement { n, m, combo: LinCombo::zero(ring) }
    }

    pub fn from_term(ring: Ring, g: GraphTerm, sign: i64) -> Self {
        let mut combo = LinCombo::zero(ring);
        let (n, m) = g.biarity();
        combo.add_int(g, sign);
        PropElement { n, m, combo }
    }

    pub fn from_combo(n: usize, m: usize, combo: LinCombo<GraphTerm>) -> Result<Self> {
        for g in combo.basis() {
            if g.biarity() != (n, m) {
                return Err(Error::Biarity(n, m, g.n, g.m));
            }
        }
        Ok(PropElement { n, m, combo })
    }

    pub fn generator(ring: Ring, kind: Generator) -> Self {
        Self::from_term(ring, GraphTerm::generator(kind), 1)
    }

    pub fn identity(ring: Ring, n: usize) -> Self {
        Self::from_term(ring, GraphTerm::identity(n), 1)
    }

    pub fn ring(&self) -> Ring {
        self.combo.ring()
    }

    pub fn biarity(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    pub fn combo(&self) -> &LinCombo<GraphTerm> {
        &self.combo
    }

    pub fn into_combo(self) -> LinCombo<GraphTerm> {
        self.combo
    }

    pub fn is_zero(&self) -> bool {
        self.combo.is_zero()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GraphTerm, &Coefficient)> {
        self.combo.iter()
    }

    /// The common degree of all terms, if there is one.
    pub fn degree(&self) -> Option<usize> {
        let mut degs = self.combo.basis().map(GraphTerm::degree);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// The component of the given degree.
    pub fn homogeneous(&self, d: usize) -> Self {
        let combo = LinCombo::from_terms(
            self.ring(),
            self.combo.iter().filter(|(g, _)| g.degree() == d).map(|(g, c)| (g.clone(), c.clone())),
        )
        .expect("same ring");
        PropElement { n: self.n, m: self.m, combo }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.ring() != other.ring() {
            return Err(Error::RingMismatch(self.ring(), other.ring()));
        }
        if self.biarity() != other.biarity() {
            return Err(Error::Biarity(self.n, self.m, other.n, other.m));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(PropElement { n: self.n, m: self.m, combo: self.combo.add(&other.combo)? })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(PropElement { n: self.n, m: self.m, combo: self.combo.sub(&other.combo)? })
    }

    pub fn scale(&self, c: &Coefficient) -> Result<Self> {
        Ok(PropElement { n: self.n, m: self.m, combo: self.combo.scale(c)? })
    }

    pub fn neg(&self) -> Self {
        PropElement { n: self.n, m: self.m, combo: self.combo.neg() }
    }

    pub fn mod2(&self) -> Self {
        PropElement { n: self.n, m: self.m, combo: self.combo.mod2() }
    }

    fn bilinear<F>(&self, other: &Self, n: usize, m: usize, f: F) -> Result<Self>
    where
        F: Fn(&GraphTerm, &GraphTerm) -> Result<(GraphTerm, i64)>,
    {
        if self.ring() != other.ring() {
            return Err(Error::RingMismatch(self.ring(), other.ring()));
        }
        let mut combo = LinCombo::zero(self.ring());
        for (a, ca) in self.combo.iter() {
            for (b, cb) in other.combo.iter() {
                let (g, s) = f(a, b)?;
                combo.add_term(g, ca.mul(cb)?.signed(s))?;
            }
        }
        Ok(PropElement { n, m, combo })
    }

    /// `self ∘ bottom`, applying `bottom` first.
    pub fn compose(&self, bottom: &Self) -> Result<Self> {
        if self.n != bottom.m {
            return Err(Error::Biarity(bottom.m, self.m, self.n, self.m));
        }
        self.bilinear(bottom, bottom.n, self.m, GraphTerm::compose)
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.bilinear(other, self.n + other.n, self.m + other.m, |a, b| {
            Ok(GraphTerm::tensor(a, b))
        })
    }

    pub fn act(&self, sigma: &[usize], tau: &[usize]) -> Result<Self> {
        let mut combo = LinCombo::zero(self.ring());
        for (g, c) in self.combo.iter() {
            let (h, s) = g.act(sigma, tau)?;
            combo.add_term(h, c.signed(s))?;
        }
        Ok(PropElement { n: self.n, m: self.m, combo })
    }

    pub fn differential(&self) -> Self {
        let ring = self.ring();
        let combo = self.combo.map_linear(|g| Ok(g.differential(ring))).expect("same ring");
        PropElement { n: self.n, m: self.m, combo }
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.combo.to_json_with(GraphTerm::to_json);
        v["n"] = json!(self.n);
        v["m"] = json!(self.m);
        v
    }

    /// Parses either a combination `{"ring", "n", "m", "terms"}` or a single
    /// bare graph, which is read with coefficient one in `ring`.
    pub fn from_json(v: &Value, ring: Ring) -> Result<Self> {
        if v.get("wires").is_some() {
            let (g, s) = GraphTerm::from_json(v)?;
            return Ok(Self::from_term(ring, g, s));
        }
        let ring = match v.get("ring").and_then(Value::as_str) {
            Some(r) => r.parse()?,
            None => ring,
        };
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse("element needs a \"terms\" array or a bare graph"))?;
        let mut combo = LinCombo::zero(ring);
        let mut arity: Option<(usize, usize)> = None;
        for t in terms {
            let pair = t
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::parse("each term is a [graph, coefficient] pair"))?;
            let (g, s) = GraphTerm::from_json(&pair[0])?;
            match arity {
                Some(a) if a != g.biarity() => return Err(Error::Biarity(a.0, a.1, g.n, g.m)),
                _ => arity = Some(g.biarity()),
            }
            combo.add_term(g, Coefficient::from_json(ring, &pair[1])?.signed(s))?;
        }
        let get = |k: &str| v.get(k).and_then(Value::as_u64).map(|x| x as usize);
        let (n, m) = match (get("n"), get("m"), arity) {
            (Some(n), Some(m), Some(a)) if (n, m) != a => return Err(Error::Biarity(n, m, a.0, a.1)),
            (Some(n), Some(m), _) => (n, m),
            (_, _, Some(a)) => a,
            _ => return Err(Error::parse("an empty element needs \"n\" and \"m\"")),
        };
        Ok(PropElement { n, m, combo })
    }
}

/// A random graph built by stacking generators on open wires. Returns the
/// canonical term and the sign of its construction order.
pub fn random_term<R: Rng>(rng: &mut R, n: usize, max_vertices: usize) -> (GraphTerm, i64) {
    let mut raw = RawGraph::new(n, 0);
    let mut open: Vec<Source> = (0..n as u32).map(Source::Input).collect();
    let count = rng.gen_range(0..=max_vertices);
    for _ in 0..count {
        let mut choices = vec![Generator::Coproduct];
        if open.len() >= 2 {
            choices.push(Generator::Product);
            choices.push(Generator::Product);
        }
        if open.len() >= 2 && rng.gen_bool(0.3) {
            choices.push(Generator::Counit);
        }
        if open.is_empty() {
            break;
        }
        let kind = *choices.choose(rng).unwrap();
        let v = raw.add(kind);
        for p in 0..kind.inputs() {
            let idx = rng.gen_range(0..open.len());
            let s = open.swap_remove(idx);
            raw.wire(s, Target::Port(v, p as u8));
        }
        for p in 0..kind.outputs() {
            open.push(Source::Port(v, p as u8));
        }
    }
    open.shuffle(rng);
    raw.m = open.len();
    raw.outputs = open.into_iter().map(Some).collect();
    raw.canonicalize().expect("stacked graphs are valid")
}

/// Constraints for [`enumerate`].
#[derive(Clone, Debug, Default)]
pub struct EnumOptions {
    /// Only allow counits directly on external inputs.
    pub counits_on_inputs: bool,
    /// Assign output labels in order of discovery, giving one representative
    /// per output relabeling.
    pub unlabeled_outputs: bool,
    /// Forbid wires from an external input straight to an external output.
    pub no_strands: bool,
}

/// Enumerates every canonical graph of biarity `(n, m)` with the given
/// vertex counts `[counits, coproducts, products]`, each exactly once.
///
/// The search replays the canonical sweep: each source taken from the queue
/// is sent to an unused output, to a free input port of a vertex already
/// found, or to a fresh vertex, which then receives the next index.
pub fn enumerate(n: usize, m: usize, counts: [usize; 3], opts: &EnumOptions) -> Vec<GraphTerm> {
    let nv: usize = counts.iter().sum();
    let sources = n + counts[1] * 2 + counts[2];
    let targets = m + counts[0] + counts[1] + 2 * counts[2];
    let mut out = Vec::new();
    if sources != targets {
        return out;
    }
    let mut st = EnumState {
        n,
        m,
        remaining: counts,
        kinds: Vec::with_capacity(nv),
        ins: Vec::with_capacity(nv),
        outputs: vec![None; m],
        next_output: 0,
        queue: (0..n as u32).map(Source::Input).collect(),
        head: 0,
        reach: Vec::with_capacity(nv),
    };
    st.search(opts, &mut out);
    out
}

struct EnumState {
    n: usize,
    m: usize,
    remaining: [usize; 3],
    kinds: Vec<Generator>,
    ins: Vec<[Option<Source>; 2]>,
    outputs: Vec<Option<Source>>,
    next_output: usize,
    queue: Vec<Source>,
    head: usize,
    /// `reach[v]` is the set of vertices reachable from `v`, as a bitmask.
    reach: Vec<u128>,
}

impl EnumState {
    fn search(&mut self, opts: &EnumOptions, out: &mut Vec<GraphTerm>) {
        if self.head == self.queue.len() {
            if self.remaining == [0, 0, 0]
                && self.outputs.iter().all(Option::is_some)
                && self.ins.iter().zip(&self.kinds).all(|(s, k)| s[..k.inputs()].iter().all(Option::is_some))
            {
                let raw = RawGraph {
                    n: self.n,
                    m: self.m,
                    kinds: self.kinds.clone(),
                    ins: self.ins.clone(),
                    outputs: self.outputs.clone(),
                };
                let (g, _) = raw.canonicalize().expect("enumerated graphs are valid");
                out.push(g);
            }
            return;
        }
        let s = self.queue[self.head];
        self.head += 1;

        // to an external output
        if !(opts.no_strands && matches!(s, Source::Input(_))) {
            let labels: Vec<usize> = if opts.unlabeled_outputs {
                if self.next_output < self.m {
                    vec![self.next_output]
                } else {
                    vec![]
                }
            } else {
                (0..self.m).filter(|&j| self.outputs[j].is_none()).collect()
            };
            for j in labels {
                self.outputs[j] = Some(s);
                self.next_output += 1;
                self.search(opts, out);
                self.next_output -= 1;
                self.outputs[j] = None;
            }
        }

        // to a free port of a known vertex
        let from = s.vertex();
        for v in 0..self.kinds.len() {
            let kind = self.kinds[v];
            if kind == Generator::Counit {
                continue;
            }
            for p in 0..kind.inputs() {
                if self.ins[v][p].is_some() {
                    continue;
                }
                if let Some(u) = from {
                    if u == v || self.reach[v] >> u & 1 == 1 {
                        continue;
                    }
                }
                self.ins[v][p] = Some(s);
                let saved = self.link(from, v);
                self.search(opts, out);
                self.unlink(saved);
                self.ins[v][p] = None;
            }
        }

        // to a new vertex
        for (ki, kind) in Generator::ALL.iter().copied().enumerate() {
            if self.remaining[ki] == 0 {
                continue;
            }
            if kind == Generator::Counit && opts.counits_on_inputs && from.is_some() {
                continue;
            }
            for p in 0..kind.inputs() {
                let v = self.kinds.len();
                self.remaining[ki] -= 1;
                self.kinds.push(kind);
                let mut slots = [None, None];
                slots[p] = Some(s);
                self.ins.push(slots);
                self.reach.push(1u128 << v);
                let qlen = self.queue.len();
                for q in 0..kind.outputs() {
                    self.queue.push(Source::Port(v as u32, q as u8));
                }
                let saved = self.link(from, v);
                self.search(opts, out);
                self.unlink(saved);
                self.queue.truncate(qlen);
                self.reach.pop();
                self.ins.pop();
                self.kinds.pop();
                self.remaining[ki] += 1;
            }
        }
        self.head -= 1;
    }

    /// Records the edge `from -> v` in the reachability sets.
    fn link(&mut self, from: Option<usize>, v: usize) -> Vec<u128> {
        let saved = self.reach.clone();
        if let Some(u) = from {
            let add = self.reach[v];
            for w in 0..self.reach.len() {
                if self.reach[w] >> u & 1 == 1 {
                    self.reach[w] |= add;
                }
            }
        }
        saved
    }

    fn unlink(&mut self, saved: Vec<u128>) {
        self.reach = saved;
    }
}

//! Oriented relations and normal forms.
//!
//! Scope `S` rewrites with the three defining relations only: a counit after
//! a product vanishes, and a counit on either leg of a coproduct gives back
//! the strand. These rules never overlap in a way that loses information,
//! so normal forms (counits only on external inputs) form a basis.
//!
//! Scope `MS` adds, over `F2`, the relations that identify the quotient with
//! the surjection operad: the involution and crossed involution vanish,
//! products and coproducts are reassociated into left combs, product combs
//! are sorted along the coproduct tree, and a coproduct after a product is
//! expanded by the Leibniz rule. Sorting uses leaf addresses: input `i` has
//! address `(i)`, the output port `q` of a coproduct appends `q` to the
//! address of its input, so the lexicographic order of addresses is the
//! planar left-to-right order of leaves.
//!
//! Sorting by swapping two-leaf products and reassociating is not confluent
//! on its own, so a product comb may also swap its top two leaves. Once combs
//! are sorted two leaves adjacent in the coproduct tree can be hidden one
//! level apart, so the involution rule also matches those configurations.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use crate::coeff::{LinCombo, Ring};
use crate::error::{Error, Result};
use crate::graph::{GraphTerm, Generator, PropElement, RawGraph, Source, Target, Targets};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scope {
    S,
    MS,
}

impl std::str::FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" | "s" => Ok(Scope::S),
            "MS" | "ms" => Ok(Scope::MS),
            _ => Err(Error::parse(format!("unknown scope `{s}` (expected S or MS)"))),
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::S => write!(f, "S"),
            Scope::MS => write!(f, "MS"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    ProductCounit,
    LeftCounit,
    RightCounit,
    Involution,
    Crossing,
    /// Involution between two leaves one level apart in a coproduct comb.
    NestedInvolution,
    /// Involution between the top two leaves of a product comb.
    CombInvolution,
    Associativity,
    Commutativity,
    /// Swap of the top two leaves of a product comb.
    CombCommutativity,
    Coassociativity,
    Leibniz,
}

impl Rule {
    pub const S_RULES: [Rule; 3] = [Rule::ProductCounit, Rule::LeftCounit, Rule::RightCounit];
    pub const ALL: [Rule; 12] = [
        Rule::ProductCounit,
        Rule::LeftCounit,
        Rule::RightCounit,
        Rule::Involution,
        Rule::Crossing,
        Rule::NestedInvolution,
        Rule::CombInvolution,
        Rule::Associativity,
        Rule::Commutativity,
        Rule::CombCommutativity,
        Rule::Coassociativity,
        Rule::Leibniz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::ProductCounit => "product-counit",
            Rule::LeftCounit => "left-counitality",
            Rule::RightCounit => "right-counitality",
            Rule::Involution => "involution",
            Rule::Crossing => "crossed-involution",
            Rule::NestedInvolution => "nested-involution",
            Rule::CombInvolution => "comb-involution",
            Rule::Associativity => "associativity",
            Rule::Commutativity => "commutativity",
            Rule::CombCommutativity => "comb-commutativity",
            Rule::Coassociativity => "coassociativity",
            Rule::Leibniz => "leibniz",
        }
    }

    pub fn in_scope(self, scope: Scope) -> bool {
        scope == Scope::MS || Rule::S_RULES.contains(&self)
    }
}

/// A match of a rule's left-hand side. `vertices` lists the matched
/// vertices, anchor first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub rule: Rule,
    pub vertices: Vec<u32>,
}

/// Per-term data used by the matchers.
struct Context<'a> {
    g: &'a GraphTerm,
    targets: Targets,
    addresses: Option<Vec<Vec<u32>>>,
}

impl<'a> Context<'a> {
    fn new(g: &'a GraphTerm, scope: Scope) -> Self {
        let targets = g.targets();
        let addresses = (scope == Scope::MS).then(|| port_addresses(g));
        Context { g, targets, addresses }
    }

    fn kind_of(&self, s: Source) -> Option<Generator> {
        s.vertex().map(|v| self.g.kind(v))
    }

    fn is_product(&self, s: Source) -> bool {
        self.kind_of(s) == Some(Generator::Product)
    }

    fn ins(&self, v: u32) -> &[Source] {
        self.g.vertices()[v as usize].ins()
    }

    fn address(&self, s: Source) -> &[u32] {
        let addr = self.addresses.as_ref().expect("addresses are computed for MS");
        match s {
            Source::Input(i) => &addr[i as usize],
            Source::Port(v, p) => &addr[self.g.n() + 2 * v as usize + p as usize],
        }
    }

    /// Two leaves adjacent in a coproduct tree, in either order: siblings or
    /// `c'.out2` and `c.out2` with `c'` on `c.out1`.
    fn adjacent_leaves(&self, a: Source, b: Source) -> bool {
        self.sibling_pair(a, b).is_some() || self.sibling_pair(b, a).is_some()
            || self.nested_pair(a, b).is_some()
            || self.nested_pair(b, a).is_some()
    }

    fn sibling_pair(&self, a: Source, b: Source) -> Option<u32> {
        match (a, b) {
            (Source::Port(c, 0), Source::Port(d, 1))
                if c == d && self.g.kind(c as usize) == Generator::Coproduct =>
            {
                Some(c)
            }
            _ => None,
        }
    }

    /// `a = c'.out2`, `b = c.out2` and `c'` hangs off `c.out1`.
    fn nested_pair(&self, a: Source, b: Source) -> Option<(u32, u32)> {
        match (a, b) {
            (Source::Port(inner, 1), Source::Port(outer, 1))
                if self.g.kind(inner as usize) == Generator::Coproduct
                    && self.g.kind(outer as usize) == Generator::Coproduct
                    && self.ins(inner)[0] == Source::Port(outer, 0) =>
            {
                Some((inner, outer))
            }
            _ => None,
        }
    }

    fn find(&self, v: u32, scope: Scope, out: &mut Vec<Site>) {
        let site = |rule: Rule, vs: Vec<u32>| Site { rule, vertices: vs };
        let kind = self.g.kind(v as usize);
        match kind {
            Generator::Counit => match self.ins(v)[0] {
                Source::Port(u, q) => match self.g.kind(u as usize) {
                    Generator::Product => out.push(site(Rule::ProductCounit, vec![v, u])),
                    Generator::Coproduct if q == 0 => out.push(site(Rule::LeftCounit, vec![v, u])),
                    Generator::Coproduct => out.push(site(Rule::RightCounit, vec![v, u])),
                    Generator::Counit => unreachable!(),
                },
                Source::Input(_) => {}
            },
            _ if scope == Scope::S => {}
            Generator::Product => {
                let (x, y) = (self.ins(v)[0], self.ins(v)[1]);
                if let Some(c) = self.sibling_pair(x, y) {
                    out.push(site(Rule::Involution, vec![v, c]));
                }
                if let Some(c) = self.sibling_pair(y, x) {
                    out.push(site(Rule::Crossing, vec![v, c]));
                }
                for (a, b) in [(x, y), (y, x)] {
                    if let Some((inner, outer)) = self.nested_pair(a, b) {
                        out.push(site(Rule::NestedInvolution, vec![v, inner, outer]));
                    }
                }
                if let Source::Port(q, 0) = y {
                    if self.is_product(y) {
                        out.push(site(Rule::Associativity, vec![v, q]));
                    }
                }
                let leaf = |s: Source| !self.is_product(s);
                if leaf(x) && leaf(y) && self.address(x) > self.address(y) {
                    out.push(site(Rule::Commutativity, vec![v]));
                }
                if let Source::Port(q, 0) = x {
                    if self.is_product(x) {
                        let z = self.ins(q)[1];
                        if leaf(z) && leaf(y) {
                            if self.adjacent_leaves(z, y) {
                                out.push(site(Rule::CombInvolution, vec![v, q]));
                            }
                            if self.address(z) > self.address(y) {
                                out.push(site(Rule::CombCommutativity, vec![v, q]));
                            }
                        }
                    }
                }
            }
            Generator::Coproduct => {
                if let Target::Port(w, 0) = self.targets.of(Source::Port(v, 1)) {
                    if self.g.kind(w as usize) == Generator::Coproduct {
                        out.push(site(Rule::Coassociativity, vec![v, w]));
                    }
                }
                if let Source::Port(p, 0) = self.ins(v)[0] {
                    if self.g.kind(p as usize) == Generator::Product {
                        out.push(site(Rule::Leibniz, vec![v, p]));
                    }
                }
            }
        }
    }
}

/// Addresses of all sources: inputs first, then two slots per vertex.
fn port_addresses(g: &GraphTerm) -> Vec<Vec<u32>> {
    let n = g.n();
    let mut addr: Vec<Vec<u32>> = vec![Vec::new(); n + 2 * g.num_vertices()];
    for (i, a) in addr.iter_mut().take(n).enumerate() {
        *a = vec![i as u32];
    }
    let slot = |s: Source| match s {
        Source::Input(i) => i as usize,
        Source::Port(v, p) => n + 2 * v as usize + p as usize,
    };
    for v in g.topological_order() {
        let vert = &g.vertices()[v];
        match vert.kind {
            Generator::Counit => {}
            Generator::Coproduct => {
                let base = addr[slot(vert.ins()[0])].clone();
                for q in 0..2u32 {
                    let mut a = base.clone();
                    a.push(q);
                    addr[n + 2 * v + q as usize] = a;
                }
            }
            Generator::Product => {
                let a = &addr[slot(vert.ins()[0])];
                let b = &addr[slot(vert.ins()[1])];
                addr[n + 2 * v] = a.min(b).clone();
            }
        }
    }
    addr
}

/// All rule matches in `g`, ordered by anchor vertex then rule.
pub fn find_sites(g: &GraphTerm, scope: Scope) -> Vec<Site> {
    let ctx = Context::new(g, scope);
    let mut out = Vec::new();
    for v in 0..g.num_vertices() as u32 {
        ctx.find(v, scope, &mut out);
    }
    out
}

fn first_site(g: &GraphTerm, scope: Scope) -> Option<Site> {
    let ctx = Context::new(g, scope);
    let mut out = Vec::new();
    for v in 0..g.num_vertices() as u32 {
        ctx.find(v, scope, &mut out);
        if !out.is_empty() {
            return out.into_iter().next();
        }
    }
    None
}

/// Rewrites one site. Returns the right-hand side as signed raw terms.
pub fn apply(g: &GraphTerm, site: &Site) -> Vec<(GraphTerm, i64)> {
    let targets = g.targets();
    let ins = |v: u32| g.vertices()[v as usize].ins().to_vec();
    let vs = &site.vertices;
    let finish = |raw: RawGraph| raw.canonicalize().expect("rewrites keep graphs valid");
    match site.rule {
        Rule::ProductCounit
        | Rule::Involution
        | Rule::Crossing
        | Rule::NestedInvolution
        | Rule::CombInvolution => vec![],
        Rule::LeftCounit | Rule::RightCounit => {
            let (e, c) = (vs[0], vs[1]);
            let kept = if site.rule == Rule::LeftCounit { 1 } else { 0 };
            let mut raw = g.to_raw();
            raw.wire(ins(c)[0], targets.of(Source::Port(c, kept)));
            vec![finish(raw.remove_vertices(&[e, c]))]
        }
        Rule::Associativity => {
            // p(x, q(y, z)) -> p(q(x, y), z)
            let (p, q) = (vs[0], vs[1]);
            let x = ins(p)[0];
            let (y, z) = (ins(q)[0], ins(q)[1]);
            let mut raw = g.to_raw();
            raw.wire(x, Target::Port(q, 0));
            raw.wire(y, Target::Port(q, 1));
            raw.wire(Source::Port(q, 0), Target::Port(p, 0));
            raw.wire(z, Target::Port(p, 1));
            vec![finish(raw)]
        }
        Rule::Commutativity => {
            let p = vs[0];
            let mut raw = g.to_raw();
            raw.wire(ins(p)[1], Target::Port(p, 0));
            raw.wire(ins(p)[0], Target::Port(p, 1));
            vec![finish(raw)]
        }
        Rule::CombCommutativity => {
            // p(q(x, y), z) -> p(q(x, z), y)
            let (p, q) = (vs[0], vs[1]);
            let mut raw = g.to_raw();
            raw.wire(ins(p)[1], Target::Port(q, 1));
            raw.wire(ins(q)[1], Target::Port(p, 1));
            vec![finish(raw)]
        }
        Rule::Coassociativity => {
            // (id ⊗ Δ)Δ -> (Δ ⊗ id)Δ, reusing the lower coproduct
            let (c, d) = (vs[0], vs[1]);
            let a = targets.of(Source::Port(c, 0));
            let b = targets.of(Source::Port(d, 0));
            let e = targets.of(Source::Port(d, 1));
            let mut raw = g.to_raw();
            raw.wire(Source::Port(c, 0), Target::Port(d, 0));
            raw.wire(Source::Port(d, 0), a);
            raw.wire(Source::Port(d, 1), b);
            raw.wire(Source::Port(c, 1), e);
            vec![finish(raw)]
        }
        Rule::Leibniz => {
            // Δ(xy) -> x' ⊗ x''y + xy' ⊗ y''
            let (c, p) = (vs[0], vs[1]);
            let (x, y) = (ins(p)[0], ins(p)[1]);
            let a = targets.of(Source::Port(c, 0));
            let b = targets.of(Source::Port(c, 1));
            let mut first = g.to_raw();
            first.wire(x, Target::Port(c, 0));
            first.wire(Source::Port(c, 1), Target::Port(p, 0));
            first.wire(y, Target::Port(p, 1));
            first.wire(Source::Port(c, 0), a);
            first.wire(Source::Port(p, 0), b);
            let mut second = g.to_raw();
            second.wire(y, Target::Port(c, 0));
            second.wire(x, Target::Port(p, 0));
            second.wire(Source::Port(c, 0), Target::Port(p, 1));
            second.wire(Source::Port(p, 0), a);
            second.wire(Source::Port(c, 1), b);
            vec![finish(first), finish(second)]
        }
    }
}

/// The lexicographic termination measure. Each rewrite strictly decreases it
/// for every term of its right-hand side.
pub fn measure(g: &GraphTerm, scope: Scope) -> [usize; 5] {
    let nv = g.num_vertices();
    if scope == Scope::S {
        return [0, nv, 0, 0, 0];
    }
    let targets = g.targets();
    let verts = g.vertices();

    // products upstream of each vertex, as sorted sets
    let mut upstream: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for v in g.topological_order() {
        let mut set: Vec<usize> = Vec::new();
        for s in verts[v].ins() {
            if let Some(u) = s.vertex() {
                set.extend(&upstream[u]);
                if verts[u].kind == Generator::Product {
                    set.push(u);
                }
            }
        }
        set.sort_unstable();
        set.dedup();
        upstream[v] = set;
    }
    let leibniz: usize =
        (0..nv).filter(|&v| verts[v].kind == Generator::Coproduct).map(|v| upstream[v].len()).sum();

    fn coproduct_tree(g: &GraphTerm, t: &Targets, target: Target) -> usize {
        match target {
            Target::Port(w, 0) if g.kind(w as usize) == Generator::Coproduct => {
                1 + coproduct_tree(g, t, t.of(Source::Port(w, 0)))
                    + coproduct_tree(g, t, t.of(Source::Port(w, 1)))
            }
            _ => 0,
        }
    }
    fn product_tree(g: &GraphTerm, s: Source) -> usize {
        match s {
            Source::Port(q, 0) if g.kind(q as usize) == Generator::Product => {
                let ins = g.vertices()[q as usize].ins();
                1 + product_tree(g, ins[0]) + product_tree(g, ins[1])
            }
            _ => 0,
        }
    }
    let coassoc: usize = (0..nv)
        .filter(|&v| verts[v].kind == Generator::Coproduct)
        .map(|v| coproduct_tree(g, &targets, targets.of(Source::Port(v as u32, 1))))
        .sum();
    let assoc: usize = (0..nv)
        .filter(|&v| verts[v].kind == Generator::Product)
        .map(|v| product_tree(g, verts[v].ins()[1]))
        .sum();

    let addr = port_addresses(g);
    let slot = |s: Source| match s {
        Source::Input(i) => i as usize,
        Source::Port(v, p) => g.n() + 2 * v as usize + p as usize,
    };
    fn leaves(g: &GraphTerm, s: Source, out: &mut Vec<Source>) {
        match s {
            Source::Port(q, 0) if g.kind(q as usize) == Generator::Product => {
                let ins = g.vertices()[q as usize].ins();
                leaves(g, ins[0], out);
                leaves(g, ins[1], out);
            }
            s => out.push(s),
        }
    }
    let mut inversions = 0;
    for v in 0..nv {
        if verts[v].kind != Generator::Product {
            continue;
        }
        let root = match targets.of(Source::Port(v as u32, 0)) {
            Target::Port(w, _) => g.kind(w as usize) != Generator::Product,
            Target::Output(_) => true,
        };
        if !root {
            continue;
        }
        let mut ls = Vec::new();
        leaves(g, Source::Port(v as u32, 0), &mut ls);
        for i in 0..ls.len() {
            for j in i + 1..ls.len() {
                if addr[slot(ls[i])] > addr[slot(ls[j])] {
                    inversions += 1;
                }
            }
        }
    }
    [leibniz, nv, coassoc, assoc, inversions]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// The first site by anchor vertex in canonical order.
    Leftmost,
    /// A uniformly random site, seeded.
    Random(u64),
}

/// One rewrite step, for traces.
#[derive(Clone, Debug)]
pub struct TraceStep {
    pub rule: Rule,
    pub site: Vec<u32>,
    pub before: u64,
    pub after: Vec<u64>,
}

impl TraceStep {
    pub fn to_json(&self) -> Value {
        json!({
            "rule": self.rule.name(),
            "site": self.site,
            "before": format!("{:016x}", self.before),
            "after": self.after.iter().map(|h| format!("{h:016x}")).collect::<Vec<_>>(),
        })
    }
}

/// A stable 64-bit fingerprint of a graph term (FNV-1a of its JSON form).
pub fn fingerprint(g: &GraphTerm) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in g.to_json().to_string().bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Rewrites elements to normal form.
pub struct Reducer {
    scope: Scope,
    strategy: Strategy,
    rng: StdRng,
    check_measure: bool,
    trace: Option<Vec<TraceStep>>,
    normal: HashSet<GraphTerm>,
    memo: HashMap<GraphTerm, LinCombo<GraphTerm>>,
    max_steps: usize,
}

impl Reducer {
    pub fn new(scope: Scope) -> Self {
        Reducer {
            scope,
            strategy: Strategy::Leftmost,
            rng: StdRng::seed_from_u64(0),
            check_measure: cfg!(debug_assertions),
            trace: None,
            normal: HashSet::new(),
            memo: HashMap::new(),
            max_steps: 50_000_000,
        }
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        if let Strategy::Random(seed) = strategy {
            self.rng = StdRng::seed_from_u64(seed);
        }
        self.strategy = strategy;
        self
    }

    /// Asserts the termination measure drops at every step.
    pub fn checking_measure(mut self, on: bool) -> Self {
        self.check_measure = on;
        self
    }

    pub fn tracing(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn trace(&self) -> &[TraceStep] {
        self.trace.as_deref().unwrap_or(&[])
    }

    pub fn scope(&self) -> Scope {
        self.scope
    }

    fn pick(&mut self, g: &GraphTerm) -> Option<Site> {
        match self.strategy {
            Strategy::Leftmost => first_site(g, self.scope),
            Strategy::Random(_) => {
                let sites = find_sites(g, self.scope);
                if sites.is_empty() {
                    None
                } else {
                    let i = self.rng.gen_range(0..sites.len());
                    Some(sites[i].clone())
                }
            }
        }
    }

    pub fn reduce(&mut self, x: &PropElement) -> Result<PropElement> {
        if self.scope == Scope::MS && x.ring() != Ring::F2 {
            return Err(Error::invalid("MS relations are only available over F2"));
        }
        let (n, m) = x.biarity();
        let combo = self.reduce_combo(x.combo())?;
        PropElement::from_combo(n, m, combo)
    }

    /// Normal form of a single term.
    pub fn reduce_term(&mut self, g: &GraphTerm, ring: Ring) -> Result<LinCombo<GraphTerm>> {
        if self.scope == Scope::MS && ring != Ring::F2 {
            return Err(Error::invalid("MS relations are only available over F2"));
        }
        if let Some(nf) = self.memo.get(g) {
            if nf.ring() == ring {
                return Ok(nf.clone());
            }
        }
        let nf = self.reduce_combo(&LinCombo::single(ring, g.clone()))?;
        if self.strategy == Strategy::Leftmost {
            self.memo.insert(g.clone(), nf.clone());
        }
        Ok(nf)
    }

    fn reduce_combo(&mut self, x: &LinCombo<GraphTerm>) -> Result<LinCombo<GraphTerm>> {
        let ring = x.ring();
        let mut work: LinCombo<GraphTerm> = x.clone();
        let mut done: LinCombo<GraphTerm> = LinCombo::zero(ring);
        let mut steps = 0usize;
        while let Some((g, c)) = work.pop_first() {
            if self.normal.contains(&g) {
                done.add_term(g, c)?;
                continue;
            }
            if let Some(nf) = self.memo.get(&g) {
                if nf.ring() == ring {
                    done.add_scaled(nf, &c)?;
                    continue;
                }
            }
            let Some(site) = self.pick(&g) else {
                self.normal.insert(g.clone());
                done.add_term(g, c)?;
                continue;
            };
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::invalid("rewriting exceeded the step limit"));
            }
            let rhs = apply(&g, &site);
            if self.check_measure {
                let before = measure(&g, self.scope);
                for (h, _) in &rhs {
                    let after = measure(h, self.scope);
                    assert!(
                        after < before,
                        "{} does not decrease the measure: {before:?} -> {after:?}",
                        site.rule.name()
                    );
                }
            }
            if let Some(trace) = self.trace.as_mut() {
                trace.push(TraceStep {
                    rule: site.rule,
                    site: site.vertices.clone(),
                    before: fingerprint(&g),
                    after: rhs.iter().map(|(h, _)| fingerprint(h)).collect(),
                });
            }
            for (h, s) in rhs {
                work.add_term(h, c.signed(s))?;
            }
        }
        Ok(done)
    }
}

/// Normal form with the default leftmost strategy.
pub fn reduce(x: &PropElement, scope: Scope) -> Result<PropElement> {
    Reducer::new(scope).reduce(x)
}

pub fn equal_mod_relations(x: &PropElement, y: &PropElement, scope: Scope) -> Result<bool> {
    Ok(reduce(&x.sub(y)?, scope)?.is_zero())
}

/// The left comb of `n - 1` coproducts on one input (`n >= 1`).
pub fn coproduct_comb(n: usize) -> GraphTerm {
    assert!(n >= 1);
    let mut raw = RawGraph::new(1, n);
    let leaves = coproduct_comb_into(&mut raw, Source::Input(0), n);
    for (j, s) in leaves.into_iter().enumerate() {
        raw.wire(s, Target::Output(j as u32));
    }
    raw.canonicalize().unwrap().0
}

/// Grafts a left comb with `n` leaves on `root`, returning the leaves in
/// left-to-right order.
pub(crate) fn coproduct_comb_into(raw: &mut RawGraph, root: Source, n: usize) -> Vec<Source> {
    let mut leaves = Vec::with_capacity(n);
    let mut cur = root;
    let mut right = Vec::new();
    for _ in 1..n {
        let c = raw.add(Generator::Coproduct);
        raw.wire(cur, Target::Port(c, 0));
        right.push(Source::Port(c, 1));
        cur = Source::Port(c, 0);
    }
    leaves.push(cur);
    leaves.extend(right.into_iter().rev());
    leaves
}

/// Multiplies `factors` as a left comb, innermost product first.
pub(crate) fn product_comb_into(raw: &mut RawGraph, factors: &[Source]) -> Source {
    let mut acc = factors[0];
    for &f in &factors[1..] {
        let p = raw.add(Generator::Product);
        raw.wire(acc, Target::Port(p, 0));
        raw.wire(f, Target::Port(p, 1));
        acc = Source::Port(p, 0);
    }
    acc
}

/// The left comb of `k - 1` products on `k` inputs (`k >= 1`).
pub fn product_comb(k: usize) -> (GraphTerm, i64) {
    assert!(k >= 1);
    let mut raw = RawGraph::new(k, 1);
    let ins: Vec<Source> = (0..k as u32).map(Source::Input).collect();
    let out = product_comb_into(&mut raw, &ins);
    raw.wire(out, Target::Output(0));
    raw.canonicalize().unwrap()
}

/// The comb element `⟨a⟩` on `k = a.len()` inputs and `1 + Σ a` outputs:
/// input `i` is split into `a_i + 1` strands feeding consecutive outputs,
/// neighbouring inputs share one output, and every output multiplies the
/// strands it receives in input order.
pub fn comb_element(a: &[usize]) -> Result<(GraphTerm, i64)> {
    if a.is_empty() {
        return Err(Error::invalid("a comb element needs at least one input"));
    }
    let k = a.len();
    let n = 1 + a.iter().sum::<usize>();
    let mut raw = RawGraph::new(k, n);
    let mut per_output: Vec<Vec<Source>> = vec![Vec::new(); n];
    let mut first = 0;
    for (i, &ai) in a.iter().enumerate() {
        let strands = coproduct_comb_into(&mut raw, Source::Input(i as u32), ai + 1);
        for (t, s) in strands.into_iter().enumerate() {
            per_output[first + t].push(s);
        }
        first += ai;
    }
    for (j, factors) in per_output.iter().enumerate() {
        let s = product_comb_into(&mut raw, factors);
        raw.wire(s, Target::Output(j as u32));
    }
    raw.canonicalize()
}

/// All sequences of `k` non-negative integers summing to `n - 1`.
pub fn comb_sequences(k: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() + 1 == k {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for x in 0..=left {
            cur.push(x);
            go(k, left - x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k >= 1 && n >= 1 {
        go(k, n - 1, &mut Vec::new(), &mut out);
    }
    out
}

/// The leaf sequence of a surjection-like term: for each leaf of the
/// coproduct comb, in left-to-right order, the output it feeds (1-based).
/// `None` if the term is not surjection-like.
pub fn surjection_like_sequence(g: &GraphTerm) -> Option<Vec<u32>> {
    if g.n() != 1 || g.count(Generator::Counit) > 0 {
        return None;
    }
    let t = g.targets();
    let mut chain = Vec::new();
    let mut cur = Source::Input(0);
    while let Target::Port(c, 0) = t.of(cur) {
        if g.kind(c as usize) != Generator::Coproduct {
            break;
        }
        chain.push(c);
        cur = Source::Port(c, 0);
    }
    if chain.len() != g.count(Generator::Coproduct) {
        return None;
    }
    let mut leaves = vec![cur];
    leaves.extend(chain.iter().rev().map(|&c| Source::Port(c, 1)));
    let index_of = |s: Source| leaves.iter().position(|&l| l == s);
    let mut seq = vec![0u32; leaves.len()];
    let mut products = 0;
    for (j, &out) in g.outputs().iter().enumerate() {
        let mut comb = Vec::new();
        let mut s = out;
        loop {
            match s {
                Source::Port(p, 0) if g.kind(p as usize) == Generator::Product => {
                    products += 1;
                    let ins = g.vertices()[p as usize].ins();
                    comb.push(index_of(ins[1])?);
                    s = ins[0];
                }
                s => {
                    comb.push(index_of(s)?);
                    break;
                }
            }
        }
        comb.reverse();
        if comb.windows(2).any(|w| w[0] >= w[1]) {
            return None;
        }
        for l in comb {
            seq[l] = j as u32 + 1;
        }
    }
    if products != g.count(Generator::Product) || seq.contains(&0) {
        return None;
    }
    Some(seq)
}

pub fn is_surjection_like(g: &GraphTerm) -> bool {
    surjection_like_sequence(g).is_some()
}

/// An overlap of two rule sites in a small graph, with both reductions.
#[derive(Clone, Debug)]
pub struct CriticalPair {
    pub term: GraphTerm,
    pub first: Site,
    pub second: Site,
    pub via_first: LinCombo<GraphTerm>,
    pub via_second: LinCombo<GraphTerm>,
}

impl CriticalPair {
    pub fn joinable(&self) -> bool {
        self.via_first == self.via_second
    }

    pub fn to_json(&self) -> Value {
        json!({
            "term": self.term.to_json(),
            "rules": [self.first.rule.name(), self.second.rule.name()],
            "sites": [self.first.vertices, self.second.vertices],
            "joinable": self.joinable(),
        })
    }
}

/// Reduces `g` after rewriting `site` first.
fn reduce_after(reducer: &mut Reducer, g: &GraphTerm, site: &Site, ring: Ring) -> Result<LinCombo<GraphTerm>> {
    let mut out = LinCombo::zero(ring);
    for (h, s) in apply(g, site) {
        let nf = reducer.reduce_term(&h, ring)?;
        out.add_scaled(&nf, &crate::coeff::Coefficient::from_i64(ring, s))?;
    }
    Ok(out)
}

/// Examines every overlap of two distinct sites in `g` whose union is all
/// of `g`, reducing both ways.
pub fn overlaps_in(
    g: &GraphTerm,
    scope: Scope,
    reducer: &mut Reducer,
    ring: Ring,
) -> Result<Vec<CriticalPair>> {
    let sites = find_sites(g, scope);
    let nv = g.num_vertices();
    let mut out = Vec::new();
    for i in 0..sites.len() {
        for j in i + 1..sites.len() {
            let (a, b) = (&sites[i], &sites[j]);
            if !a.vertices.iter().any(|v| b.vertices.contains(v)) {
                continue;
            }
            let mut all: Vec<u32> = a.vertices.iter().chain(&b.vertices).copied().collect();
            all.sort_unstable();
            all.dedup();
            if all.len() != nv {
                continue;
            }
            out.push(CriticalPair {
                term: g.clone(),
                first: a.clone(),
                second: b.clone(),
                via_first: reduce_after(reducer, g, a, ring)?,
                via_second: reduce_after(reducer, g, b, ring)?,
            });
        }
    }
    Ok(out)
}

/// Enumerates all critical overlaps of the rules in `scope` with at most
/// `max_vertices` vertices. An overlap consists of exactly the vertices of
/// two sites sharing a vertex, and sites have at most three vertices, so any
/// bound of five or more is exhaustive.
pub fn critical_pairs(scope: Scope, max_vertices: usize) -> Result<Vec<CriticalPair>> {
    let ring = if scope == Scope::MS { Ring::F2 } else { Ring::Z };
    let mut reducer = Reducer::new(scope);
    let opts = crate::graph::EnumOptions { unlabeled_outputs: true, no_strands: true, ..Default::default() };
    let mut out = Vec::new();
    let bound = max_vertices.min(5);
    for nv in 2..=bound {
        for counts in vertex_counts(nv) {
            for n in 1..=nv + 1 {
                let balance = n as i64 + counts[1] as i64 - counts[0] as i64 - counts[2] as i64;
                if balance < 0 {
                    continue;
                }
                for g in crate::graph::enumerate(n, balance as usize, counts, &opts) {
                    if scope == Scope::S && g.count(Generator::Counit) == 0 {
                        continue;
                    }
                    out.extend(overlaps_in(&g, scope, &mut reducer, ring)?);
                }
            }
        }
    }
    Ok(out)
}

fn vertex_counts(nv: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for u in 0..=nv {
        for c in 0..=nv - u {
            out.push([u, c, nv - u - c]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2(g: GraphTerm) -> PropElement {
        PropElement::from_term(Ring::F2, g, 1)
    }

    fn involution(crossed: bool) -> GraphTerm {
        let mut raw = RawGraph::new(1, 1);
        let c = raw.add(Generator::Coproduct);
        let p = raw.add(Generator::Product);
        raw.wire(Source::Input(0), Target::Port(c, 0));
        let (a, b) = if crossed { (1, 0) } else { (0, 1) };
        raw.wire(Source::Port(c, a), Target::Port(p, 0));
        raw.wire(Source::Port(c, b), Target::Port(p, 1));
        raw.wire(Source::Port(p, 0), Target::Output(0));
        raw.canonicalize().unwrap().0
    }

    #[test]
    fn involutions_vanish_in_ms_only() {
        for crossed in [false, true] {
            let x = f2(involution(crossed));
            assert!(reduce(&x, Scope::MS).unwrap().is_zero());
            assert_eq!(reduce(&x, Scope::S).unwrap(), x);
        }
    }

    #[test]
    fn counitality_gives_the_strand() {
        let e = PropElement::generator(Ring::Z, Generator::Counit);
        let id = PropElement::identity(Ring::Z, 1);
        let d = PropElement::generator(Ring::Z, Generator::Coproduct);
        let left = e.tensor(&id).unwrap().compose(&d).unwrap();
        let right = id.tensor(&e).unwrap().compose(&d).unwrap();
        assert_eq!(reduce(&left, Scope::S).unwrap(), id);
        assert_eq!(reduce(&right, Scope::S).unwrap(), id);
        assert!(equal_mod_relations(&left, &right, Scope::S).unwrap());
    }

    #[test]
    fn product_counit_vanishes() {
        let e = PropElement::generator(Ring::Z, Generator::Counit);
        let p = PropElement::generator(Ring::Z, Generator::Product);
        assert!(reduce(&e.compose(&p).unwrap(), Scope::S).unwrap().is_zero());
    }

    #[test]
    fn ms_rejects_integers() {
        let d = PropElement::generator(Ring::Z, Generator::Coproduct);
        assert!(reduce(&d, Scope::MS).is_err());
    }

    #[test]
    fn leibniz_expands_to_two_combs() {
        let d = PropElement::generator(Ring::F2, Generator::Coproduct);
        let p = PropElement::generator(Ring::F2, Generator::Product);
        let lhs = d.compose(&p).unwrap();
        let nf = reduce(&lhs, Scope::MS).unwrap();
        let mut expected = PropElement::zero(Ring::F2, 2, 2);
        for a in comb_sequences(2, 2) {
            let (g, _) = comb_element(&a).unwrap();
            expected = expected.add(&f2(g)).unwrap();
        }
        assert_eq!(nf, expected);
        assert!(equal_mod_relations(&lhs, &expected, Scope::MS).unwrap());
    }

    #[test]
    fn comb_sequences_count() {
        // |A(k, n)| = C(n + k - 2, k - 1)
        assert_eq!(comb_sequences(2, 2).len(), 2);
        assert_eq!(comb_sequences(3, 4).len(), 10);
        assert_eq!(comb_sequences(1, 4), vec![vec![3]]);
        assert_eq!(comb_sequences(4, 1), vec![vec![0, 0, 0, 0]]);
    }

    #[test]
    fn combs_are_surjection_like() {
        assert_eq!(surjection_like_sequence(&coproduct_comb(3)), Some(vec![1, 2, 3]));
        assert_eq!(surjection_like_sequence(&GraphTerm::generator(Generator::Coproduct)), Some(vec![1, 2]));
        assert_eq!(surjection_like_sequence(&GraphTerm::identity(1)), Some(vec![1]));
        // the straight involution is a degenerate two-layer comb
        assert_eq!(surjection_like_sequence(&involution(false)), Some(vec![1, 1]));
        assert!(!is_surjection_like(&involution(true)));
    }
}

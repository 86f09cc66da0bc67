//! Executable checks: the contraction maps `i`, `r`, `H` of the homology
//! argument, bounded homology of `S(n, m)`, the fixed-point witness, and
//! the named verification suites.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::coeff::{Coefficient, LinCombo, Ring};
use crate::error::{Error, Result};
use crate::graph::{enumerate, random_term, EnumOptions, GraphTerm, Generator, PropElement, RawGraph, Source, Target};
use crate::linalg::{rank, BitVec};
use crate::normalize::{
    comb_element, comb_sequences, coproduct_comb, critical_pairs, is_surjection_like, overlaps_in, product_comb, Reducer,
    Rule, Scope,
};
use crate::simplicial::{
    boundary, evaluate, evaluate_augmented, evaluate_in_order, evaluate_logged, sur_coact, sur_coact_on, CaseLog, Chain,
    Face, SimplexId, SimplicialSet, Word,
};
use crate::steenrod::{cohomology_f2, cup_i_element, cup_i_surjection, rp2, square_table};
use crate::surjection::Surjection;

/// Graft a coproduct on input 1 and send its first leg to a new first
/// output.
pub fn i_map(x: &PropElement) -> Result<PropElement> {
    let (n, _) = x.biarity();
    if n == 0 {
        return Err(Error::invalid("i needs at least one input"));
    }
    let ring = x.ring();
    let split = PropElement::generator(ring, Generator::Coproduct).tensor(&PropElement::identity(ring, n - 1))?;
    PropElement::identity(ring, 1).tensor(x)?.compose(&split)
}

/// Cap output 1 with a counit and reduce in `S`.
pub fn r_map(x: &PropElement) -> Result<PropElement> {
    let (_, m) = x.biarity();
    if m == 0 {
        return Err(Error::invalid("r needs at least one output"));
    }
    let ring = x.ring();
    let cap = PropElement::generator(ring, Generator::Counit).tensor(&PropElement::identity(ring, m - 1))?;
    Reducer::new(Scope::S).reduce(&cap.compose(x)?)
}

/// Multiply the first leg of `i(x)` into output 1 of `x`.
pub fn h_map(x: &PropElement) -> Result<PropElement> {
    let (n, m) = x.biarity();
    if n == 0 || m == 0 {
        return Err(Error::invalid("H needs at least one input and one output"));
    }
    let ring = x.ring();
    let join = PropElement::generator(ring, Generator::Product).tensor(&PropElement::identity(ring, m - 1))?;
    join.compose(&i_map(x)?)
}

/// Sign `σ` in `∂H(x) + H(∂x) = σ (x - i(r(x)))`, fixed by the product's
/// differential `∂μ = ε ⊗ 1 - 1 ⊗ ε`.
pub const HOMOTOPY_SIGN: i64 = 1;

/// Returns `(r(i(x)) == x, homotopy identity holds)` after reduction in `S`.
pub fn check_homotopy(x: &PropElement) -> Result<(bool, bool)> {
    let mut red = Reducer::new(Scope::S);
    let x = red.reduce(x)?;
    let ri = r_map(&i_map(&x)?)?;
    let lhs = h_map(&x)?.differential().add(&h_map(&x.differential())?)?;
    let rhs = x.sub(&i_map(&r_map(&x)?)?)?.scale(&Coefficient::from_i64(x.ring(), HOMOTOPY_SIGN))?;
    Ok((ri == x, red.reduce(&lhs.sub(&rhs)?)?.is_zero()))
}

/// Outcome of a suite or computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        })
    }
}

/// `F2` Betti numbers of the `S`-normal-form complex of `S(n, m)`.
#[derive(Clone, Debug)]
pub struct HomologyReport {
    pub n: usize,
    pub m: usize,
    pub max_degree: usize,
    /// Basis sizes in degrees `0..=max_degree + 1`.
    pub basis_sizes: Vec<usize>,
    pub betti: Vec<usize>,
    /// Every reduced boundary landed in the enumerated basis.
    pub closed: bool,
    pub status: Status,
    pub note: Option<String>,
}

impl HomologyReport {
    pub fn to_json(&self) -> Value {
        json!({
            "biarity": [self.n, self.m],
            "max_degree": self.max_degree,
            "basis_sizes": self.basis_sizes,
            "betti": self.betti,
            "closure_certificate": self.closed,
            "status": self.status.to_string(),
            "note": self.note,
        })
    }
}

/// `S`-normal forms of biarity `(n, m)` and degree `d`: counits sit on
/// inputs only, and the number of coproducts is then forced.
pub fn normal_forms(n: usize, m: usize, d: usize) -> Vec<GraphTerm> {
    let opts = EnumOptions { counits_on_inputs: true, ..Default::default() };
    let mut out = Vec::new();
    for u in 0..=n {
        let c = (u + d + m) as i64 - n as i64;
        if c >= 0 {
            out.extend(enumerate(n, m, [u, c as usize, d], &opts));
        }
    }
    out
}

/// Betti numbers through degree `max_degree`, or inconclusive if a degree
/// has more than `max_basis` normal forms or the boundary leaves the basis.
pub fn bounded_homology(n: usize, m: usize, max_degree: usize, max_basis: usize) -> Result<HomologyReport> {
    let mut bases: Vec<Vec<GraphTerm>> = Vec::new();
    let mut report = HomologyReport {
        n,
        m,
        max_degree,
        basis_sizes: Vec::new(),
        betti: Vec::new(),
        closed: true,
        status: Status::Pass,
        note: None,
    };
    for d in 0..=max_degree + 1 {
        let b = normal_forms(n, m, d);
        report.basis_sizes.push(b.len());
        if b.len() > max_basis {
            report.status = Status::Inconclusive;
            report.closed = false;
            report.note = Some(format!("degree {d} has {} normal forms, above the bound {max_basis}", b.len()));
            return Ok(report);
        }
        bases.push(b);
    }
    let mut red = Reducer::new(Scope::S).checking_measure(false);
    // ranks[d] = rank of ∂ : C_d -> C_{d-1}
    let mut ranks = vec![0usize; max_degree + 2];
    for d in 1..=max_degree + 1 {
        let index: HashMap<&GraphTerm, usize> = bases[d - 1].iter().enumerate().map(|(i, g)| (g, i)).collect();
        let mut rows = Vec::with_capacity(bases[d].len());
        for g in &bases[d] {
            let dg = PropElement::from_combo(n, m, g.differential(Ring::F2))?;
            let mut row = BitVec::zeros(bases[d - 1].len());
            for (h, c) in red.reduce(&dg)?.terms() {
                match index.get(h) {
                    Some(&i) if !c.is_zero() => row.flip(i),
                    Some(_) => {}
                    None => {
                        report.closed = false;
                        report.status = Status::Inconclusive;
                        report.note = Some(format!("boundary term {} is not an enumerated normal form", h.to_json()));
                        return Ok(report);
                    }
                }
            }
            rows.push(row);
        }
        ranks[d] = rank(&rows);
    }
    report.betti = (0..=max_degree).map(|d| bases[d].len() - ranks[d] - ranks[d + 1]).collect();
    if n == 0 && bases.iter().all(Vec::is_empty) {
        report.note = Some("empty complex".into());
    }
    Ok(report)
}

/// Two counits beside a strand, in `S(3, 1)`: fixed by swapping inputs 1
/// and 2.
pub fn sigma_fixed_element() -> PropElement {
    let counit = PropElement::generator(Ring::Z, Generator::Counit);
    counit.tensor(&counit).and_then(|c| c.tensor(&PropElement::identity(Ring::Z, 1))).expect("tensor")
}

pub fn sigma_fixed_counterexample() -> bool {
    let x = sigma_fixed_element();
    x.act(&[1, 0, 2], &[0]).map(|y| y == x).unwrap_or(false)
}

/// Verification suite names.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    ChainMap,
    Differential,
    Relations,
    Confluence,
    Iso,
    Splitting,
    DiagramA,
    LeibnizWitness,
    Augmented,
    Homology,
    Homotopy,
    SurAxioms,
    CupCoherence,
    Steenrod,
    SigmaFree,
}

impl Suite {
    pub const ALL: [Suite; 15] = [
        Suite::ChainMap,
        Suite::Differential,
        Suite::Relations,
        Suite::Confluence,
        Suite::Iso,
        Suite::Splitting,
        Suite::DiagramA,
        Suite::LeibnizWitness,
        Suite::Augmented,
        Suite::Homology,
        Suite::Homotopy,
        Suite::SurAxioms,
        Suite::CupCoherence,
        Suite::Steenrod,
        Suite::SigmaFree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ChainMap => "chain_map",
            Suite::Differential => "differential",
            Suite::Relations => "relations",
            Suite::Confluence => "confluence",
            Suite::Iso => "iso",
            Suite::Splitting => "splitting",
            Suite::DiagramA => "diagram_A",
            Suite::LeibnizWitness => "leibniz_witness",
            Suite::Augmented => "augmented",
            Suite::Homology => "homology",
            Suite::Homotopy => "homotopy",
            Suite::SurAxioms => "sur_axioms",
            Suite::CupCoherence => "cup_coherence",
            Suite::Steenrod => "steenrod",
            Suite::SigmaFree => "sigma_free",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .copied()
            .find(|x| x.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
                Error::invalid(format!("unknown suite `{s}`; expected one of {}", names.join(", ")))
            })
    }
}

/// Knobs shared by the suites. `None` picks the suite's default.
#[derive(Clone, Debug, Default)]
pub struct SuiteOptions {
    pub seed: u64,
    pub cases: Option<usize>,
    pub bound: Option<Vec<usize>>,
}

impl SuiteOptions {
    fn bound_or(&self, default: &[usize]) -> Vec<usize> {
        let mut b = default.to_vec();
        if let Some(given) = &self.bound {
            for (slot, v) in b.iter_mut().zip(given) {
                *slot = *v;
            }
        }
        b
    }
}

/// Machine-readable outcome of a suite.
#[derive(Clone, Debug)]
pub struct Report {
    pub suite: String,
    pub status: Status,
    pub cases: usize,
    pub counterexamples: Vec<Value>,
    pub details: Value,
}

const MAX_COUNTEREXAMPLES: usize = 20;

impl Report {
    fn new(suite: Suite) -> Self {
        Report { suite: suite.name().into(), status: Status::Pass, cases: 0, counterexamples: Vec::new(), details: json!({}) }
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.cases += 1;
        if !ok {
            self.status = Status::Fail;
            if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
                self.counterexamples.push(witness());
            }
        }
    }

    fn detail(&mut self, key: &str, v: Value) {
        self.details[key] = v;
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "status": self.status.to_string(),
            "cases": self.cases,
            "counterexamples": self.counterexamples,
            "details": self.details,
        })
    }
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<Report> {
    let mut r = Report::new(suite);
    match suite {
        Suite::ChainMap => chain_map_suite(&mut r, opts)?,
        Suite::Differential => differential_suite(&mut r, opts),
        Suite::Relations => relations_suite(&mut r, opts)?,
        Suite::Confluence => confluence_suite(&mut r, opts)?,
        Suite::Iso => iso_suite(&mut r, opts)?,
        Suite::Splitting => splitting_suite(&mut r, opts)?,
        Suite::DiagramA => diagram_suite(&mut r, opts)?,
        Suite::LeibnizWitness => leibniz_suite(&mut r)?,
        Suite::Augmented => augmented_suite(&mut r, opts)?,
        Suite::Homology => homology_suite(&mut r, opts)?,
        Suite::Homotopy => homotopy_suite(&mut r, opts)?,
        Suite::SurAxioms => sur_axioms_suite(&mut r, opts)?,
        Suite::CupCoherence => cup_coherence_suite(&mut r, opts)?,
        Suite::Steenrod => steenrod_suite(&mut r)?,
        Suite::SigmaFree => sigma_suite(&mut r)?,
    }
    Ok(r)
}

fn word_json(w: &Word) -> Value {
    json!(w.iter().map(|f| f.to_string()).collect::<Vec<_>>())
}

fn chain_json(c: &Chain) -> Value {
    c.to_json_with(word_json)
}

/// All words of `arity` faces drawn from `faces`.
pub fn words(faces: &[Face], arity: usize) -> Vec<Word> {
    let mut out: Vec<Word> = vec![Vec::new()];
    for _ in 0..arity {
        out = out.iter().flat_map(|w| faces.iter().map(move |&f| [w.as_slice(), &[f]].concat())).collect();
    }
    out
}

/// `∂(g x) - (∂g) x - (-1)^{|g|} g(∂x)`, which vanishes for chain maps.
pub fn chain_map_defect(g: &PropElement, x: &Chain, augmented: bool) -> Result<Chain> {
    let deg = g.degree().ok_or_else(|| Error::invalid("chain map check needs a homogeneous term"))?;
    let eval = |h: &PropElement, y: &Chain| if augmented { evaluate_augmented(h, y) } else { evaluate(h, y) };
    let mut out = boundary(&eval(g, x)?, augmented);
    out = out.sub(&eval(&g.differential(), x)?)?;
    let sign = Coefficient::from_i64(x.ring(), if deg % 2 == 0 { -1 } else { 1 });
    out.add_scaled(&eval(g, &boundary(x, augmented))?, &sign)?;
    Ok(out)
}

/// A topological order picked uniformly among ready vertices.
pub fn random_topological_order<R: Rng>(g: &GraphTerm, rng: &mut R) -> Vec<usize> {
    let nv = g.num_vertices();
    let mut waiting: Vec<usize> = g
        .vertices()
        .iter()
        .map(|v| v.ins().iter().filter(|s| matches!(s, Source::Port(..))).count())
        .collect();
    let targets = g.targets();
    let mut ready: Vec<usize> = (0..nv).filter(|&v| waiting[v] == 0).collect();
    let mut out = Vec::with_capacity(nv);
    while !ready.is_empty() {
        let k = rng.gen_range(0..ready.len());
        let v = ready.swap_remove(k);
        out.push(v);
        for p in 0..g.kind(v).outputs() as u8 {
            if let Target::Port(w, _) = targets.of(Source::Port(v as u32, p)) {
                waiting[w as usize] -= 1;
                if waiting[w as usize] == 0 {
                    ready.push(w as usize);
                }
            }
        }
    }
    out
}

fn chain_map_suite(r: &mut Report, opts: &SuiteOptions) -> Result<()> {
    let b = opts.bound_or(&[6, 3]);
    let (max_vertices, d) = (b[0], b[1]);
    let count = opts.cases.unwrap_or(500);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut log = CaseLog::default();
    let faces = Face::all_faces(d);
    let mut order_checks = 0;
    for _ in 0..count {
        let n = rng.gen_range(1..=2);
        let (t, s) = random_term(&mut rng, n, max_vertices);
        let g = PropElement::from_term(Ring::Z, t.clone(), s);
        let order = random_topological_order(&t, &mut rng);
        for w in words(&faces, n) {
            let x = Chain::single(Ring::Z, w);
            evaluate_logged(&g, &x, &mut log)?;
            let defect = chain_map_defect(&g, &x, false)?;
            r.check(defect.is_zero(), || json!({"term": g.to_json(), "input": chain_json(&x), "defect": chain_json(&defect)}));
            let by_order = evaluate_in_order(&t, &x, &order).scale(&Coefficient::from_i64(Ring::Z, s))?;
            order_checks += 1;
            r.check(by_order == evaluate(&g, &x)?, || json!({"term": g.to_json(), "order": order, "input": chain_json(&x)}));
        }
    }
    // all six join cases must have occurred
    let covered = log.counts.iter().all(|&c| c > 0);
    r.check(covered, || json!({"uncovered_cases": log.counts}));
    r.detail("product_cases", json!(log.counts));
    r.detail("order_checks", json!(order_checks));
    r.detail("terms", json!(count));
    Ok(())
}

fn differential_suite(r: &mut Report, opts: &SuiteOptions) {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let max_vertices = opts.bound_or(&[8])[0];
    for _ in 0..opts.cases.unwrap_or(1000) {
        let n = rng.gen_range(1..=3);
        let (t, s) = random_term(&mut rng, n, max_vertices);
        let g = PropElement::from_term(Ring::Z, t, s);
        let dd = g.differential().differential();
        r.check(dd.is_zero(), || json!({"term": g.to_json(), "dd": dd.to_json()}));
    }
}

/// The three defining relations of `S`, as elements that must vanish.
pub fn s_relations(ring: Ring) -> Vec<(&'static str, PropElement)> {
    let gen = |k| PropElement::generator(ring, k);
    let id = PropElement::identity(ring, 1);
    let counit_product = gen(Generator::Counit).compose(&gen(Generator::Product)).expect("biarity");
    let left = gen(Generator::Counit).tensor(&id).and_then(|c| c.compose(&gen(Generator::Coproduct))).expect("biarity");
    let right = id.tensor(&gen(Generator::Counit)).and_then(|c| c.compose(&gen(Generator::Coproduct))).expect("biarity");
    vec![
        ("product-counit", counit_product),
        ("left-counit", left.sub(&id).expect("biarity")),
        ("right-counit", right.sub(&id).expect("biarity")),
    ]
}

fn relations_suite(r: &mut Report, opts: &SuiteOptions) -> Result<()> {
    let d = opts.bound_or(&[4])[0];
    for (name, rel) in s_relations(Ring::Z) {
        for w in words(&Face::all_faces(d), rel.biarity().0) {
            let x = Chain::single(Ring::Z, w);
            let y = evaluate(&rel, &x)?;
            r.check(y.is_zero(), || json!({"relation": name, "input": chain_json(&x), "value": chain_json(&y)}));
        }
    }
    Ok(())
}

fn wire_graph(n: usize, m: usize, kinds: &[Generator], wires: &[(Source, Target)]) -> GraphTerm {
    let mut raw = RawGraph::new(n, m);
    for &k in kinds {
        raw.add(k);
    }
    for &(s, t) in wires {
        raw.wire(s, t);
    }
    raw.canonicalize().expect("valid picture").0
}

/// The overlaps drawn in the confluence argument: Leibniz with the
/// involution (both ways round), with counitality, with coassociativity
/// and with associativity.
pub fn pictured_overlaps() -> Vec<(&'static str, GraphTerm, [Rule; 2])> {
    use Generator::*;
    let (i, p, o) = (Source::Input, Source::Port, Target::Output);
    let t = Target::Port;
    vec![
        (
            "involution-then-leibniz",
            wire_graph(
                1,
                2,
                &[Coproduct, Product, Coproduct],
                &[
                    (i(0), t(0, 0)),
                    (p(0, 0), t(1, 0)),
                    (p(0, 1), t(1, 1)),
                    (p(1, 0), t(2, 0)),
                    (p(2, 0), o(0)),
                    (p(2, 1), o(1)),
                ],
            ),
            [Rule::Involution, Rule::Leibniz],
        ),
        (
            "leibniz-then-involution",
            wire_graph(
                2,
                1,
                &[Product, Coproduct, Product],
                &[
                    (i(0), t(0, 0)),
                    (i(1), t(0, 1)),
                    (p(0, 0), t(1, 0)),
                    (p(1, 0), t(2, 0)),
                    (p(1, 1), t(2, 1)),
                    (p(2, 0), o(0)),
                ],
            ),
            [Rule::Involution, Rule::Leibniz],
        ),
        (
            "counit-leibniz",
            wire_graph(
                2,
                1,
                &[Product, Coproduct, Counit],
                &[(i(0), t(0, 0)), (i(1), t(0, 1)), (p(0, 0), t(1, 0)), (p(1, 0), t(2, 0)), (p(1, 1), o(0))],
            ),
            [Rule::LeftCounit, Rule::Leibniz],
        ),
        (
            "coassociativity-leibniz",
            wire_graph(
                2,
                3,
                &[Product, Coproduct, Coproduct],
                &[
                    (i(0), t(0, 0)),
                    (i(1), t(0, 1)),
                    (p(0, 0), t(1, 0)),
                    (p(1, 0), o(0)),
                    (p(1, 1), t(2, 0)),
                    (p(2, 0), o(1)),
                    (p(2, 1), o(2)),
                ],
            ),
            [Rule::Coassociativity, Rule::Leibniz],
        ),
        (
            "associativity-leibniz",
            wire_graph(
                3,
                2,
                &[Product, Product, Coproduct],
                &[
                    (i(1), t(0, 0)),
                    (i(2), t(0, 1)),
                    (i(0), t(1, 0)),
                    (p(0, 0), t(1, 1)),
                    (p(1, 0), t(2, 0)),
                    (p(2, 0), o(0)),
                    (p(2, 1), o(1)),
                ],
            ),
            [Rule::Associativity, Rule::Leibniz],
        ),
    ]
}

fn confluence_suite(r: &mut Report, opts: &SuiteOptions) -> Result<()> {
    let bound = opts.bound_or(&[10])[0];
    let pairs = critical_pairs(Scope::MS, bound)?;
    let mut by_rules: HashMap<String, (usize, usize)> = HashMap::new();
    for cp in &pairs {
        let key = format!("{}/{}", cp.first.rule.name(), cp.second.rule.name());
        let e = by_rules.entry(key).or_default();
        e.0 += 1;
        if !cp.joinable() {
            e.1 += 1;
        }
        r.check(cp.joinable(), || cp.to_json());
    }
    let mut pictured = Vec::new();
    let mut red = Reducer::new(Scope::MS);
    for (name, g, rules) in pictured_overlaps() {
        let found: Vec<_> = overlaps_in(&g, Scope::MS, &mut red, Ring::F2)?
            .into_iter()
            .filter(|cp| rules.contains(&cp.first.rule) && rules.contains(&cp.second.rule) && cp.first.rule != cp.second.rule)
            .collect();
        let ok = !found.is_empty() && found.iter().all(|cp| cp.joinable());
        pictured.push(json!({"overlap": name, "joinable": ok}));
        r.check(ok, || json!({"pictured": name, "term": g.to_json()}));
    }
    let mut table: Vec<_> = by_rules.into_iter().collect();
    table.sort();
    r.detail("critical_pairs", json!(pairs.len()));
    r.detail(
        "by_rules",
        json!(table.iter().map(|(k, (n, bad))| json!({"rules": k, "pairs": n, "non_joinable": bad})).collect::<Vec<_>>()),
    );
    r.detail("pictured", json!(pictured));
    r.detail("effective_bound", json!(bound.min(5)));
    Ok(())
}

fn sur_graph(s: &Surjection) -> PropElement {
    PropElement::from_term(Ring::F2, s.to_graph().0, 1)
}

/// Reads a reduced `MS` element as surjections; `None` if some term is not
/// surjection-like.
fn as_surjections(x: &PropElement) -> Option<LinCombo<Surjection>> {
    let mut out = LinCombo::zero(Ring::F2);
    for (t, c) in x.terms() {
        if !c.is_zero() {
            out.add_int(Surjection::from_graph(t).ok()?, 1);
        }
    }
    Some(out)
}

fn sur_json(c: &LinCombo<Surjection>) -> Value {
    json!(c.basis().map(|s| s.to_string()).collect::<Vec<_>>())
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for k in 0..m {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| (0..=k).map(move |pos| {
                let mut q = p.clone();
                q.insert(pos, k);
                q
            }))
            .collect();
    }
    out
}

/// `outer ∘_r inner` on graphs: `inner` grafted on output `r` (1-based).
fn graft(outer: &PropElement, r: usize, inner: &PropElement) -> Result<PropElement> {
    let ring = outer.ring();
    let m = outer.biarity().1;
    let id = |k| PropElement::identity(ring, k);
    id(r - 1).tensor(inner)?.tensor(&id(m - r))?.compose(outer)
}

fn iso_suite(r: &mut Report, opts: &SuiteOptions) -> Result<()> {
    let b = opts.bound_or(&[6, 4, 7]);
    let (max_len, max_m, max_total) = (b[0], b[1], b[2]);
    let mut red = Reducer::new(Scope::MS);
    let mut basis = Vec::new();
    for n in 1..=max_len {
        for m in 1..=max_m.min(n) {
            basis.extend(Surjection::all(n, m));
        }
    }
    for s in &basis {
        let g = sur_graph(s);
        let (t, _) = s.to_graph();
        let round = Surjection::from_graph(&t).ok();
        r.check(
            round.as_ref() == Some(s) && is_surjection_like(&t) && red.reduce(&g)? == g,
            || json!({"basis": s.to_string(), "kind": "round trip or irreducibility"}),
        );
        let d = as_surjections(&red.reduce(&g.differential())?);
        r.check(d.as_ref() == Some(&s.differential()), || {
            json!({"differential": s.to_string(), "got": d.as_ref().map(sur_json)})
        });
        for tau in permutations(s.arity()) {
            let acted = as_surjections(&red.reduce(&g.act(&[0], &tau)?)?);
            let expected = LinCombo::single(Ring::F2, s.act(&tau)?);
            r.check(acted.as_ref() == Some(&expected), || json!({"action": s.to_string(), "tau": tau}));
        }
    }
    let mut compositions = 0;
    for s in &basis {
        for t in &basis {
            if s.len() + t.len() > max_total {
                continue;
            }
            for k in 1..=s.arity() {
                let got = as_surjections(&red.reduce(&graft(&sur_graph(s), k, &sur_graph(t))?)?);
                let expected = Surjection::compose(s, k, t)?;
                compositions += 1;
                r.check(got.as_ref() == Some(&expected), || {
                    json!({"outer": s.to_string(), "index": k, "inner": t.to_string(), "got": got.as_ref().map(sur_json), "expected": sur_json(&expected)})
                });
            }
        }
    }
    r.detail("basis", json!(basis.len()));
    r.detail("compositions", json!(compositions));
    Ok(())
}

/// The coproduct comb on `n` outputs after the product comb on `k` inputs.
pub fn splitting_lhs(k: usize, n: usize) -> Result<PropElement> {
    let (p, s) = product_comb(k);
    let prod = PropElement::from_term(Ring::F2, p, s);
    PropElement::from_term(Ring::F2, coproduct_comb(n), 1).compose(&prod)
}

pub fn splitting_rhs(k: usize, n: usize) -> Result<PropElement> {
    let mut out = PropElement::zero(Ring::F2, k, n);
    for a in comb_sequences(k, n) {
        let (g, s) = comb_element(&a)?;
        out = out.add(&PropElement::from_term(Ring::F2, g, s))?;
    }
    Ok(out)
}

/// Words `x_1 ⊗ .. ⊗ x_k` with every vertex of `x_i` at most every vertex
/// of `x_{i+1}`.
pub fn ordered_words(d: usize, k: usize) -> Vec<Word> {
    words(&Face::all_faces(d), k)
        .into_iter()
        .filter(|w| w.windows(2).all(|p| p[0].vertices().last() <= p[1].vertices().first()))
        .collect()
}

fn splitting_suite(r: &mut Report, opts: &SuiteOptions) -> Result<()> {
    let b = opts.bound_or(&[4, 3]);
    let (max_k, d) = (b[0], b[1]);
    let mut red = Reducer::new(Scope::MS);
    for k in 1..=max_k {
        for n in 1..=max_k {
            let lhs = splitting_lhs(k, n)?;
            let rhs = splitting_rhs(k, n)?;
            let (a, b) = (red.reduce(&lhs)?, red.reduce(&rhs)?);
            r.check(a == b, || json!({"k": k, "n": n, "lhs": a.to_json(), "rhs": b.to_json()}));
            for w in ordered_words(d, k) {
                let x = Chain::single(Ring::F2, w);
                let (u, v) = (evaluate(&lhs, &x)?, evaluate(&rhs, &x)?);
                r.check(u == v, || json!({"k": k, "n": n, "input": chain_json(&x)}));
            }
        }
    }
    Ok(())
}

fn diagram_suite(r: &mut Report, opts: &SuiteOptions) -> Result<()> {
    let b = opts.bound_or(&[5, 4]);
    let (max_len, d) = (b[0], b[1]);
    for n in 1..=max_len {
        for m in 1..=n {
            for s in Surjection::all(n, m) {
                let g = sur_graph(&s);
                for f in Face::all_faces(d) {
                    let via_graph = evaluate(&g, &Chain::single(Ring::F2, vec![f]))?;
                    let direct = sur_coact(&s, f);
                    r.check(via_graph == direct, || json!({"surjection": s.to_string(), "face": f.to_string()}));
                }
            }
        }
    }
    Ok(())
}

/// `Δ∘μ` minus the two Leibniz terms, in `S(2, 2)` over `F2`.
pub fn leibniz_difference() -> PropElement {
    use Generator::*;
    let (i, p, o, t) = (Source::Input, Source::Port, Target::Output, Target::Port);
    let lhs = wire_graph(
        2,
        2,
        &[Product, Coproduct],
        &[(i(0), t(0, 0)), (i(1), t(0, 1)), (p(0, 0), t(1, 0)), (p(1, 0), o(0)), (p(1, 1), o(1))],
    );
    let left = wire_graph(
        2,
        2,
        &[Coproduct, Product],
        &[(i(0), t(0, 0)), (p(0, 0), o(0)), (p(0, 1), t(1, 0)), (i(1), t(1, 1)), (p(1, 0), o(1))],
    );
    let right = wire_graph(
        2,
        2,
        &[Coproduct, Product],
        &[(i(1), t(0, 0)), (i(0), t(1, 0)), (p(0, 0), t(1, 1)), (p(1, 0), o(0)), (p(0, 1), o(1))],
    );
    let mut combo = LinCombo::zero(Ring::F2);
    for g in [lhs, left, right] {
        combo.add_int(g, 1);
    }
    PropElement::from_combo(2, 2, combo).expect("biarity")
}

fn leibniz_suite(r: &mut Report) -> Result<()> {
    let x = Chain::single(Ring::F2, vec![Face::of(&[0, 2]), Face::of(&[1])]);
    let v = evaluate(&leibniz_difference(), &x)?;
    r.check(!v.is_zero(), || json!({"input": chain_json(&x)}));
    r.detail("value", chain_json(&v));
    // on order-compatible inputs it does vanish
    for w in ordered_words(2, 2) {
        let y = Chain::single(Ring::F2, w);
        let z = evaluate(&leibniz_difference(), &y)?;
        r.check(z.is_zero(), || json!({"ordered_input": chain_json(&y), "value": chain_json(&z)}));
    }
    Ok(())
}

fn augmented_suite(r: &mut Report, opts: &SuiteOptions) -> Result<()> {
    let b = opts.bound_or(&[3, 4]);
    let (d, max_vertices) = (b[0], b[1]);
    let faces: Vec<Face> = (0u32..(1 << (d + 1))).map(Face).collect();
    for (name, rel) in s_relations(Ring::Z) {
        for w in words(&faces, rel.biarity().1) {
            let x = Chain::single(Ring::Z, w);
            let y = evaluate_augmented(&rel, &x)?;
            r.check(y.is_zero(), || json!({"relation": name, "input": chain_json(&x)}));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut terms = 0;
    while terms < opts.cases.unwrap_or(200) {
        let (t, s) = random_term(&mut rng, 1, max_vertices);
        if t.m() > 2 {
            continue;
        }
        terms += 1;
        let g = PropElement::from_term(Ring::Z, t, s);
        for w in words(&faces, g.biarity().1) {
            let x = Chain::single(Ring::Z, w);
            let defect = chain_map_defect(&g, &x, true)?;
            r.check(defect.is_zero(), || json!({"term": g.to_json(), "input": chain_json(&x)}));
        }
    }
    Ok(())
}

fn homology_suite(r: &mut Report, opts: &SuiteOptions) -> Result<()> {
    let targets: Vec<(usize, usize, usize)> = match &opts.bound {
        Some(b) if b.len() >= 3 => vec![(b[0], b[1], b[2])],
        _ => vec![(1, 0, 2), (1, 1, 2), (1, 2, 2)],
    };
    let mut reports = Vec::new();
    for (n, m, d) in targets {
        let h = bounded_homology(n, m, d, 200_000)?;
        let mut expected = vec![0; d + 1];
        if n >= 1 {
            expected[0] = 1;
        }
        r.cases += 1;
        match h.status {
            Status::Inconclusive => {
                if r.status == Status::Pass {
                    r.status = Status::Inconclusive;
                }
                r.counterexamples.push(h.to_json());
            }
            _ if h.betti != expected => {
                r.status = Status::Fail;
                r.counterexamples.push(h.to_json());
            }
            _ => {}
        }
        reports.push(h.to_json());
    }
    r.detail("reports", json!(reports));
    Ok(())
}

fn homotopy_suite(r: &mut Report, opts: &SuiteOptions) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let max_vertices = opts.bound_or(&[6])[0];
    let mut done = 0;
    while done < opts.cases.unwrap_or(200) {
        let n = rng.gen_range(1..=2);
        let (t, s) = random_term(&mut rng, n, max_vertices);
        if t.m() == 0 {
            continue;
        }
        done += 1;
        let x = PropElement::from_term(Ring::Z, t, s);
        let (ri, htpy) = check_homotopy(&x)?;
        r.check(ri, || json!({"r_after_i": x.to_json()}));
        r.check(htpy, || json!({"homotopy": x.to_json()}));
    }
    r.detail("sign", json!(HOMOTOPY_SIGN));
    Ok(())
}

fn compose_combo(a: &LinCombo<Surjection>, k: usize, b: &LinCombo<Surjection>) -> Result<LinCombo<Surjection>> {
    let mut out = LinCombo::zero(Ring::F2);
    for s in a.basis() {
        for t in b.basis() {
            out.add_assign(&Surjection::compose(s, k, t)?)?;
        }
    }
    Ok(out)
}

fn act_combo(a: &LinCombo<Surjection>, tau: &[usize]) -> Result<LinCombo<Surjection>> {
    let mut out = LinCombo::zero(Ring::F2);
    for s in a.basis() {
        out.add_int(s.act(tau)?, 1);
    }
    Ok(out)
}

fn sur_axioms_suite(r: &mut Report, opts: &SuiteOptions) -> Result<()> {
    let b = opts.bound_or(&[6, 7]);
    let (max_len, max_total) = (b[0], b[1]);
    let all = |max: usize| -> Vec<Surjection> {
        (1..=max).flat_map(|n| (1..=n).flat_map(move |m| Surjection::all(n, m))).collect()
    };
    let basis = all(max_len);
    for s in &basis {
        let mut dd = LinCombo::zero(Ring::F2);
        for t in s.differential().basis() {
            dd.add_assign(&t.differential())?;
        }
        r.check(dd.is_zero(), || json!({"dd": s.to_string()}));
        if s.len() <= 5 {
            for tau in permutations(s.arity()) {
                let lhs = act_combo(&s.differential(), &tau)?;
                let rhs = s.act(&tau)?.differential();
                r.check(lhs == rhs, || json!({"action_vs_d": s.to_string(), "tau": tau}));
            }
        }
    }
    let small = all(max_total.saturating_sub(2).max(1));
    let one = |s: &Surjection| LinCombo::single(Ring::F2, s.clone());
    for s in &small {
        for t in &small {
            if s.len() + t.len() + 1 > max_total {
                continue;
            }
            for u in &small {
                if s.len() + t.len() + u.len() > max_total {
                    continue;
                }
                let (ms, mt) = (s.arity(), t.arity());
                for i in 1..=ms {
                    let st = Surjection::compose(s, i, t)?;
                    for j in 1..=mt {
                        let lhs = compose_combo(&st, i + j - 1, &one(u))?;
                        let rhs = compose_combo(&one(s), i, &Surjection::compose(t, j, u)?)?;
                        r.check(lhs == rhs, || json!({"sequential": [s.to_string(), t.to_string(), u.to_string()], "i": i, "j": j}));
                    }
                    for q in i + 1..=ms {
                        let lhs = compose_combo(&st, q + mt - 1, &one(u))?;
                        let rhs = compose_combo(&Surjection::compose(s, q, u)?, i, &one(t))?;
                        r.check(lhs == rhs, || json!({"parallel": [s.to_string(), t.to_string(), u.to_string()], "i": i, "q": q}));
                    }
                }
            }
        }
    }
    for s in &small {
        for t in &small {
            if s.len() + t.len() > max_total {
                continue;
            }
            let (ms, mt) = (s.arity(), t.arity());
            for k in 1..=ms {
                let st = Surjection::compose(s, k, t)?;
                for tau in permutations(ms) {
                    let lhs = Surjection::compose(&s.act(&tau)?, tau[k - 1] + 1, t)?;
                    let rhs = act_combo(&st, &block_permutation(&tau, k, mt))?;
                    r.check(lhs == rhs, || json!({"outer_equivariance": [s.to_string(), t.to_string()], "k": k, "tau": tau}));
                }
                for sigma in permutations(mt) {
                    let lhs = Surjection::compose(s, k, &t.act(&sigma)?)?;
                    let inner: Vec<usize> = (0..ms + mt - 1)
                        .map(|v| if v + 1 >= k && v + 1 < k + mt { k - 1 + sigma[v + 1 - k] } else { v })
                        .collect();
                    let rhs = act_combo(&st, &inner)?;
                    r.check(lhs == rhs, || json!({"inner_equivariance": [s.to_string(), t.to_string()], "k": k, "sigma": sigma}));
                }
            }
        }
    }
    Ok(())
}

/// The permutation of `1..=m+mt-1` induced by `tau` on `m` outer values
/// when value `k` is expanded into a block of `mt` values (0-based).
fn block_permutation(tau: &[usize], k: usize, mt: usize) -> Vec<usize> {
    let m = tau.len();
    let target = tau[k - 1] + 1;
    let place = |o: usize| -> usize {
        // new position of outer value o != k, 1-based
        let o2 = tau[o - 1] + 1;
        if o2 < target {
            o2
        } else {
            o2 + mt - 1
        }
    };
    (1..=m + mt - 1)
        .map(|v| {
            let image = if v < k {
                place(v)
            } else if v < k + mt {
                target + (v - k)
            } else {
                place(v - mt + 1)
            };
            image - 1
        })
        .collect()
}

/// `∂Δ_i` and `Δ_{i-1} + τΔ_{i-1}`, both reduced in `scope` over `F2`.
pub fn cup_coherence(i: usize, scope: Scope) -> Result<(PropElement, PropElement)> {
    let mut red = Reducer::new(scope);
    let di = red.reduce(&cup_i_element(i, Ring::F2)?.differential())?;
    let prev = cup_i_element(i - 1, Ring::F2)?;
    let expected = red.reduce(&prev.add(&prev.act(&[0], &[1, 0])?)?)?;
    Ok((di, expected))
}

fn cup_coherence_suite(r: &mut Report, opts: &SuiteOptions) -> Result<()> {
    let max_i = opts.bound_or(&[4])[0];
    let mut rows = Vec::new();
    for i in 1..=max_i {
        let (lhs, rhs) = cup_coherence(i, Scope::S)?;
        let in_ms = {
            let (a, b) = cup_coherence(i, Scope::MS)?;
            a == b
        };
        rows.push(json!({"i": i, "S": lhs == rhs, "MS": in_ms}));
        r.check(lhs == rhs, || json!({"i": i, "scope": "S", "boundary": lhs.to_json(), "expected": rhs.to_json()}));
        r.check(in_ms, || json!({"i": i, "scope": "MS"}));
        let s = cup_i_surjection(i);
        let mut expected = LinCombo::zero(Ring::F2);
        let prev = cup_i_surjection(i - 1);
        expected.add_int(prev.clone(), 1);
        expected.add_int(prev.act(&[1, 0])?, 1);
        r.check(s.differential() == expected, || json!({"i": i, "scope": "Sur"}));
    }
    r.detail("rows", json!(rows));
    Ok(())
}

/// `α ∪_i α` through the surjection coaction, for comparison with the
/// graph route.
pub fn sur_square(x: &SimplicialSet, q: usize, i: usize, alpha: &LinCombo<SimplexId>) -> LinCombo<SimplexId> {
    let s = cup_i_surjection(i);
    let mut out = LinCombo::zero(Ring::F2);
    if 2 * q < i {
        return out;
    }
    let target = 2 * q - i;
    for y in x.simplices(target) {
        let image = sur_coact_on(&s, x, &LinCombo::single(Ring::F2, y));
        let mut acc = false;
        for (w, c) in image.iter() {
            if !c.is_zero() && w.iter().all(|z| z.dim as usize == q && !alpha.coefficient(z).mod2().is_zero()) {
                acc = !acc;
            }
        }
        if acc {
            out.add_int(y, 1);
        }
    }
    out
}

fn steenrod_suite(r: &mut Report) -> Result<()> {
    let x = rp2();
    let h = cohomology_f2(&x);
    r.check(h.ranks() == vec![1, 1, 1], || json!({"rp2_ranks": h.ranks()}));
    let table = square_table(1, &x, &h, 1)?;
    r.check(table.iter().any(|row| !row.is_zero()), || json!({"rp2_sq1": "zero"}));
    let alpha = &h.representatives(1)[0];
    let oracle = sur_square(&x, 1, 0, alpha);
    let class = h.class_of(&x, 2, &oracle)?;
    r.check(class == table[0], || json!({"rp2_oracle": "mismatch"}));
    for (name, y) in [("simplex2", SimplicialSet::standard(2)), ("simplex3", SimplicialSet::standard(3))] {
        let hy = cohomology_f2(&y);
        for k in 1..=y.dim() {
            for q in 0..=y.dim() {
                let t = square_table(k, &y, &hy, q)?;
                r.check(t.iter().all(BitVec::is_zero), || json!({"contractible": name, "k": k, "q": q}));
            }
        }
    }
    Ok(())
}

fn sigma_suite(r: &mut Report) -> Result<()> {
    r.check(sigma_fixed_counterexample(), || json!({"fixed_element": sigma_fixed_element().to_json()}));
    let generic = PropElement::generator(Ring::Z, Generator::Counit)
        .tensor(&PropElement::identity(Ring::Z, 1))?
        .tensor(&PropElement::identity(Ring::Z, 1))?;
    r.check(generic.act(&[1, 0, 2], &[0, 1])? != generic, || json!({"generic": generic.to_json()}));
    // Σ2 swapping the two outputs of S(1, 2) moves every basis graph
    for d in 0..=3 {
        for g in normal_forms(1, 2, d) {
            if g.num_vertices() > 3 {
                continue;
            }
            let (h, _) = g.act(&[0], &[1, 0])?;
            r.check(h != g, || json!({"fixed_basis_graph": g.to_json()}));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_of_identity_is_the_coproduct() {
        let id = PropElement::identity(Ring::Z, 1);
        assert_eq!(i_map(&id).unwrap(), PropElement::generator(Ring::Z, Generator::Coproduct));
        assert_eq!(r_map(&PropElement::generator(Ring::Z, Generator::Coproduct)).unwrap(), id);
    }

    #[test]
    fn homotopy_identity_on_generators() {
        for k in [Generator::Coproduct, Generator::Product] {
            let x = PropElement::generator(Ring::Z, k);
            assert_eq!(check_homotopy(&x).unwrap(), (true, true), "{}", k.name());
        }
        assert_eq!(check_homotopy(&PropElement::identity(Ring::Z, 2)).unwrap(), (true, true));
    }

    #[test]
    fn h_raises_degree() {
        let x = PropElement::generator(Ring::Z, Generator::Coproduct);
        assert_eq!(h_map(&x).unwrap().degree(), Some(1));
    }

    #[test]
    fn counit_spans_s_1_0() {
        let h = bounded_homology(1, 0, 2, 1000).unwrap();
        assert_eq!(h.basis_sizes, vec![1, 0, 0, 0]);
        assert_eq!(h.betti, vec![1, 0, 0]);
        assert!(h.closed);
    }

    #[test]
    fn small_homology() {
        let h = bounded_homology(1, 1, 1, 1000).unwrap();
        assert_eq!(h.betti, vec![1, 0]);
    }

    #[test]
    fn fixed_point_witness() {
        assert!(sigma_fixed_counterexample());
    }

    #[test]
    fn block_permutation_is_a_permutation() {
        let p = block_permutation(&[2, 0, 1], 2, 3);
        let mut sorted = p.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..5).collect::<Vec<_>>());
        // value 2 goes to 1, so the block [2,3,4] lands on [1,2,3]
        assert_eq!(p, vec![4, 0, 1, 2, 3]);
    }

    #[test]
    fn leibniz_witness_is_nonzero() {
        let r = run_suite(Suite::LeibnizWitness, &SuiteOptions::default()).unwrap();
        assert!(r.passed(), "{}", r.to_json());
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}

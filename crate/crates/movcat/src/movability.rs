//! Movability and uniform movability of objects in a finite category.
//!
//! An object `x` is *movable* when some `m : M → x` factors through
//! every morphism into `x`: for each `p : y → x` there is a
//! `u(p) : M → y` with `p . u(p) = m`. It is *uniformly movable* when
//! the factors can be chosen coherently: whenever `p . r = q`, also
//! `u(p) = r . u(q)`. Uniform movability of every object makes the
//! whole category uniformly movable.
//!
//! Deciders enumerate candidate pairs `(M, m)` in declaration order and
//! return the first witness that works, or a refutation recording why
//! each candidate failed. The uniform decider solves the coherence
//! conditions as a constraint system; its failure certificates name the
//! morphism whose factor set is empty or the triangle `(p, q, r)` whose
//! constraint cannot be met.
//!
//! Everything a decider returns can be re-checked from scratch with
//! [`verify_witness`] and [`verify_uniform_witness`], which share no
//! code with the search.

use crate::construct::{Domination, NullFamily, Pullback};
use crate::csp::{self, CspOutcome, FunctionalConstraint};
use crate::fincat::{
    validate_functor, validate_nat_trans, FinCategory, Functor, MorId, NatTrans, ObjId, Product,
};
use std::collections::BTreeMap;
use std::fmt;

/// A movability witness: the mover `M`, the morphism `m : M → target`,
/// and a factor `u(p)` for every `p` into the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MovabilityWitness {
    pub target: ObjId,
    pub mover: ObjId,
    pub m: MorId,
    pub factors: BTreeMap<MorId, MorId>,
}

/// A movability witness whose factors also satisfy the coherence
/// conditions; produced only by the uniform decider, the transfer
/// constructions, and [`verify_uniform_witness`]-checked inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformMovabilityWitness(pub MovabilityWitness);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessViolation {
    /// `m` does not run from the mover to the target.
    MorphismEndpoints,
    MissingFactor { p: String },
    SpuriousFactor { p: String },
    /// `u(p)` does not run from the mover to `dom p`.
    FactorEndpoints { p: String },
    /// `p . u(p) ≠ m`.
    TriangleBroken { p: String },
    /// `p . r = q` but `u(p) ≠ r . u(q)`.
    UniformityBroken { p: String, q: String, r: String },
}

impl fmt::Display for WitnessViolation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessViolation::MorphismEndpoints => {
                write!(out, "witness morphism does not run mover → target")
            }
            WitnessViolation::MissingFactor { p } => write!(out, "no factor for {p}"),
            WitnessViolation::SpuriousFactor { p } => {
                write!(out, "factor for {p}, which is not a morphism into the target")
            }
            WitnessViolation::FactorEndpoints { p } => {
                write!(out, "factor for {p} has the wrong endpoints")
            }
            WitnessViolation::TriangleBroken { p } => {
                write!(out, "triangle at {p} does not commute")
            }
            WitnessViolation::UniformityBroken { p, q, r } => {
                write!(out, "coherence broken at ({p}, {q}, {r})")
            }
        }
    }
}

/// Why one candidate pair `(M, m)` cannot witness movability.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub enum CandidateFailure {
    /// No `h : M → dom p` at all with `p . h = m`.
    EmptyFiber { p: String },
    /// Coherence at the triangle `(p, q, r)` is unsatisfiable.
    Contradiction { p: String, q: String, r: String },
    /// All coherent assignments were enumerated and none works.
    Exhausted,
}

impl fmt::Display for CandidateFailure {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CandidateFailure::EmptyFiber { p } => {
                write!(out, "no factor exists for {p}")
            }
            CandidateFailure::Contradiction { p, q, r } => {
                write!(out, "coherence at ({p}, {q}, {r}) is unsatisfiable")
            }
            CandidateFailure::Exhausted => write!(out, "no coherent assignment of factors"),
        }
    }
}

/// One rejected candidate pair, by name.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct CandidateRejection {
    pub mover: String,
    pub m: String,
    pub why: CandidateFailure,
}

/// Every candidate pair with the reason it was rejected; together these
/// refute movability of the target.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct MovabilityRefutation {
    pub target: String,
    pub uniform: bool,
    pub candidates: Vec<CandidateRejection>,
}

impl fmt::Display for MovabilityRefutation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let notion = if self.uniform { "uniformly movable" } else { "movable" };
        writeln!(out, "{} is not {notion}:", self.target)?;
        for c in &self.candidates {
            writeln!(out, "  ({}, {}): {}", c.mover, c.m, c.why)?;
        }
        Ok(())
    }
}

/// Re-check a movability witness from its parts.
pub fn verify_witness(cat: &FinCategory, w: &MovabilityWitness) -> Vec<WitnessViolation> {
    let mut out = Vec::new();
    if cat.dom(w.m) != w.mover || cat.cod(w.m) != w.target {
        out.push(WitnessViolation::MorphismEndpoints);
    }
    for &p in cat.morphisms_into(w.target) {
        match w.factors.get(&p) {
            None => out.push(WitnessViolation::MissingFactor {
                p: cat.morphism_name(p).to_string(),
            }),
            Some(&u) => {
                if cat.dom(u) != w.mover || cat.cod(u) != cat.dom(p) {
                    out.push(WitnessViolation::FactorEndpoints {
                        p: cat.morphism_name(p).to_string(),
                    });
                } else if cat.compose_opt(p, u) != Some(w.m) {
                    out.push(WitnessViolation::TriangleBroken {
                        p: cat.morphism_name(p).to_string(),
                    });
                }
            }
        }
    }
    for &p in w.factors.keys() {
        if cat.cod(p) != w.target {
            out.push(WitnessViolation::SpuriousFactor {
                p: cat.morphism_name(p).to_string(),
            });
        }
    }
    out
}

/// Re-check a uniform movability witness: the plain conditions plus
/// coherence over every commuting triangle into the target.
pub fn verify_uniform_witness(
    cat: &FinCategory,
    w: &UniformMovabilityWitness,
) -> Vec<WitnessViolation> {
    let mut out = verify_witness(cat, &w.0);
    if !out.is_empty() {
        return out;
    }
    let w = &w.0;
    for (&p, &up) in &w.factors {
        for (&q, &uq) in &w.factors {
            for &r in cat.hom(cat.dom(q), cat.dom(p)) {
                if cat.compose_opt(p, r) == Some(q) && cat.compose_opt(r, uq) != Some(up) {
                    out.push(WitnessViolation::UniformityBroken {
                        p: cat.morphism_name(p).to_string(),
                        q: cat.morphism_name(q).to_string(),
                        r: cat.morphism_name(r).to_string(),
                    });
                }
            }
        }
    }
    out
}

/// Decide movability of `x`, returning the first witness in candidate
/// order or a refutation covering every candidate.
pub fn decide_movable(
    cat: &FinCategory,
    x: ObjId,
) -> Result<MovabilityWitness, MovabilityRefutation> {
    let mut rejected = Vec::new();
    for mover in cat.objects() {
        'candidate: for &m in cat.hom(mover, x) {
            let mut factors = BTreeMap::new();
            for &p in cat.morphisms_into(x) {
                let hit = cat
                    .hom(mover, cat.dom(p))
                    .iter()
                    .copied()
                    .find(|&h| cat.compose_opt(p, h) == Some(m));
                match hit {
                    Some(h) => {
                        factors.insert(p, h);
                    }
                    None => {
                        rejected.push(CandidateRejection {
                            mover: cat.object_name(mover).to_string(),
                            m: cat.morphism_name(m).to_string(),
                            why: CandidateFailure::EmptyFiber {
                                p: cat.morphism_name(p).to_string(),
                            },
                        });
                        continue 'candidate;
                    }
                }
            }
            return Ok(MovabilityWitness { target: x, mover, m, factors });
        }
    }
    Err(MovabilityRefutation {
        target: cat.object_name(x).to_string(),
        uniform: false,
        candidates: rejected,
    })
}

/// Decide uniform movability of `x` by solving the coherence system for
/// each candidate pair in declaration order.
pub fn decide_uniformly_movable(
    cat: &FinCategory,
    x: ObjId,
) -> Result<UniformMovabilityWitness, MovabilityRefutation> {
    let into: Vec<MorId> = cat.morphisms_into(x).to_vec();
    let index_of: BTreeMap<MorId, usize> =
        into.iter().enumerate().map(|(i, &p)| (p, i)).collect();

    let mut constraints = Vec::new();
    let mut triples = Vec::new();
    for &p in &into {
        for &q in &into {
            for &r in cat.hom(cat.dom(q), cat.dom(p)) {
                if cat.compose_opt(p, r) == Some(q) {
                    constraints.push(FunctionalConstraint {
                        target: index_of[&p],
                        source: index_of[&q],
                        via: r,
                    });
                    triples.push((p, q, r));
                }
            }
        }
    }

    let mut rejected = Vec::new();
    for mover in cat.objects() {
        for &m in cat.hom(mover, x) {
            let domains: Vec<Vec<MorId>> = into
                .iter()
                .map(|&p| {
                    cat.hom(mover, cat.dom(p))
                        .iter()
                        .copied()
                        .filter(|&h| cat.compose_opt(p, h) == Some(m))
                        .collect()
                })
                .collect();
            let why = match csp::solve(cat, &domains, &constraints) {
                CspOutcome::Solution(values) => {
                    let factors = into.iter().copied().zip(values).collect();
                    return Ok(UniformMovabilityWitness(MovabilityWitness {
                        target: x,
                        mover,
                        m,
                        factors,
                    }));
                }
                CspOutcome::EmptyDomain { variable } => CandidateFailure::EmptyFiber {
                    p: cat.morphism_name(into[variable]).to_string(),
                },
                CspOutcome::Contradiction { constraint } => {
                    let (p, q, r) = triples[constraint];
                    CandidateFailure::Contradiction {
                        p: cat.morphism_name(p).to_string(),
                        q: cat.morphism_name(q).to_string(),
                        r: cat.morphism_name(r).to_string(),
                    }
                }
                CspOutcome::Exhausted => CandidateFailure::Exhausted,
            };
            rejected.push(CandidateRejection {
                mover: cat.object_name(mover).to_string(),
                m: cat.morphism_name(m).to_string(),
                why,
            });
        }
    }
    Err(MovabilityRefutation {
        target: cat.object_name(x).to_string(),
        uniform: true,
        candidates: rejected,
    })
}

/// Per-object outcome of deciding a whole category.
#[derive(Debug, Clone)]
pub struct CategoryDecision<W> {
    pub witnesses: BTreeMap<ObjId, W>,
    pub refutations: BTreeMap<ObjId, MovabilityRefutation>,
}

impl<W> CategoryDecision<W> {
    /// True when every object has a witness.
    pub fn holds(&self) -> bool {
        self.refutations.is_empty()
    }
}

pub fn decide_category_movable(cat: &FinCategory) -> CategoryDecision<MovabilityWitness> {
    let mut witnesses = BTreeMap::new();
    let mut refutations = BTreeMap::new();
    for x in cat.objects() {
        match decide_movable(cat, x) {
            Ok(w) => {
                witnesses.insert(x, w);
            }
            Err(r) => {
                refutations.insert(x, r);
            }
        }
    }
    CategoryDecision { witnesses, refutations }
}

pub fn decide_category_uniform(cat: &FinCategory) -> CategoryDecision<UniformMovabilityWitness> {
    let mut witnesses = BTreeMap::new();
    let mut refutations = BTreeMap::new();
    for x in cat.objects() {
        match decide_uniformly_movable(cat, x) {
            Ok(w) => {
                witnesses.insert(x, w);
            }
            Err(r) => {
                refutations.insert(x, r);
            }
        }
    }
    CategoryDecision { witnesses, refutations }
}

/// Decide co-movability of `x`: movability in the opposite category.
/// The returned witness is phrased in the opposite category, whose
/// object and morphism ids coincide with the original's.
pub fn decide_co_movable(
    cat: &FinCategory,
    x: ObjId,
) -> Result<MovabilityWitness, MovabilityRefutation> {
    decide_movable(&cat.dual(), x)
}

/// Decide uniform co-movability of `x`.
pub fn decide_co_uniformly_movable(
    cat: &FinCategory,
    x: ObjId,
) -> Result<UniformMovabilityWitness, MovabilityRefutation> {
    decide_uniformly_movable(&cat.dual(), x)
}

/// Re-check a co-movability witness against the original category.
pub fn verify_co_witness(cat: &FinCategory, w: &MovabilityWitness) -> Vec<WitnessViolation> {
    verify_witness(&cat.dual(), w)
}

// ---------------------------------------------------------------------
// Witness transfers
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransferError {
    #[error("{0}")]
    Precondition(String),
    #[error("`{f}` does not retract `{g}`: their composite is not the identity")]
    NotARetraction { f: String, g: String },
    #[error("no source witness for object `{0}`")]
    MissingSourceWitness(String),
    #[error("invalid functor data: {0}")]
    InvalidFunctorData(String),
    #[error("expected {expected} factor witnesses, got {got}")]
    FactorMismatch { expected: usize, got: usize },
    #[error("transferred witness fails verification:\n{}", render(.0))]
    Verification(Vec<WitnessViolation>),
}

fn render(violations: &[WitnessViolation]) -> String {
    let lines: Vec<String> = violations.iter().map(|v| format!("  - {v}")).collect();
    lines.join("\n")
}

fn checked(
    cat: &FinCategory,
    w: MovabilityWitness,
) -> Result<UniformMovabilityWitness, TransferError> {
    let w = UniformMovabilityWitness(w);
    let violations = verify_uniform_witness(cat, &w);
    if violations.is_empty() {
        Ok(w)
    } else {
        Err(TransferError::Verification(violations))
    }
}

/// Every object of a category with an initial object is uniformly
/// movable: take the initial object as mover, with its unique arrows
/// as morphism and factors.
pub fn witness_from_initial(
    cat: &FinCategory,
    initial: ObjId,
    x: ObjId,
) -> Result<UniformMovabilityWitness, TransferError> {
    for y in cat.objects() {
        if cat.hom(initial, y).len() != 1 {
            return Err(TransferError::Precondition(format!(
                "{} is not initial: hom({}, {}) has {} elements",
                cat.object_name(initial),
                cat.object_name(initial),
                cat.object_name(y),
                cat.hom(initial, y).len()
            )));
        }
    }
    let arrow = |y: ObjId| cat.hom(initial, y)[0];
    let factors = cat
        .morphisms_into(x)
        .iter()
        .map(|&p| (p, arrow(cat.dom(p))))
        .collect();
    checked(
        cat,
        MovabilityWitness { target: x, mover: initial, m: arrow(x), factors },
    )
}

/// A null family makes every object uniformly movable: take the target
/// itself as mover and the null morphisms as morphism and factors.
pub fn witness_from_nulls(
    cat: &FinCategory,
    family: &NullFamily,
    x: ObjId,
) -> Result<UniformMovabilityWitness, TransferError> {
    let get = |a: ObjId, b: ObjId| {
        family.get(&(a, b)).copied().ok_or_else(|| {
            TransferError::Precondition(format!(
                "null family has no member at ({}, {})",
                cat.object_name(a),
                cat.object_name(b)
            ))
        })
    };
    let factors = cat
        .morphisms_into(x)
        .iter()
        .map(|&p| Ok((p, get(x, cat.dom(p))?)))
        .collect::<Result<_, TransferError>>()?;
    checked(
        cat,
        MovabilityWitness { target: x, mover: x, m: get(x, x)?, factors },
    )
}

/// Uniform movability passes down a domination: if the base target is
/// uniformly movable and `retraction . section = id` exhibits `target`
/// as dominated by it, the same mover works for `target`.
pub fn transfer_domination(
    cat: &FinCategory,
    base: &UniformMovabilityWitness,
    target: ObjId,
    dom: &Domination,
) -> Result<UniformMovabilityWitness, TransferError> {
    let b = &base.0;
    let r = dom.retraction;
    let s = dom.section;
    if cat.dom(r) != b.target || cat.cod(r) != target || cat.dom(s) != target || cat.cod(s) != b.target
    {
        return Err(TransferError::Precondition(
            "domination does not run between the base target and the new target".into(),
        ));
    }
    if cat.compose_opt(r, s) != Some(cat.identity(target)) {
        return Err(TransferError::NotARetraction {
            f: cat.morphism_name(r).to_string(),
            g: cat.morphism_name(s).to_string(),
        });
    }
    let m = cat.compose_opt(r, b.m).expect("endpoints checked");
    let factors = cat
        .morphisms_into(target)
        .iter()
        .map(|&p| {
            let sp = cat.compose_opt(s, p).expect("endpoints checked");
            let u = b.factors.get(&sp).copied().ok_or_else(|| {
                TransferError::Precondition(format!(
                    "base witness has no factor for {}",
                    cat.morphism_name(sp)
                ))
            })?;
            Ok((p, u))
        })
        .collect::<Result<_, TransferError>>()?;
    checked(cat, MovabilityWitness { target, mover: b.mover, m, factors })
}

/// Pull uniform movability witnesses back along a functor with a
/// one-sided inverse: given `j : C → C'`, `d : C' → C`, and a natural
/// transformation `psi : d . j ⇒ id`, witnesses for the `j`-images in
/// `C'` yield witnesses for every object of `C`.
pub fn transfer_weak_functorial(
    c: &FinCategory,
    c_prime: &FinCategory,
    j: &Functor,
    d: &Functor,
    psi: &NatTrans,
    base: &BTreeMap<ObjId, UniformMovabilityWitness>,
) -> Result<BTreeMap<ObjId, UniformMovabilityWitness>, TransferError> {
    if !validate_functor(c, c_prime, j).is_empty() {
        return Err(TransferError::InvalidFunctorData("j is not a functor".into()));
    }
    if !validate_functor(c_prime, c, d).is_empty() {
        return Err(TransferError::InvalidFunctorData("d is not a functor".into()));
    }
    let dj = j.then(d);
    if !validate_nat_trans(c, c, &dj, &Functor::identity(c), psi).is_empty() {
        return Err(TransferError::InvalidFunctorData(
            "psi is not natural from d . j to the identity".into(),
        ));
    }
    c.objects()
        .map(|x| Ok((x, transfer_one(c, c_prime, j, d, psi, base, x)?)))
        .collect()
}

fn transfer_one(
    c: &FinCategory,
    c_prime: &FinCategory,
    j: &Functor,
    d: &Functor,
    psi: &NatTrans,
    base: &BTreeMap<ObjId, UniformMovabilityWitness>,
    x: ObjId,
) -> Result<UniformMovabilityWitness, TransferError> {
    let jx = j.apply_obj(x);
    let b = &base
        .get(&jx)
        .ok_or_else(|| TransferError::MissingSourceWitness(c_prime.object_name(jx).to_string()))?
        .0;
    if b.target != jx {
        return Err(TransferError::Precondition(
            "source witness is not for the image object it is keyed by".into(),
        ));
    }
    let m = c
        .compose_opt(psi.components[x.index()], d.apply_mor(b.m))
        .ok_or_else(|| TransferError::Precondition("psi component does not compose".into()))?;
    let factors = c
        .morphisms_into(x)
        .iter()
        .map(|&p| {
            let jp = j.apply_mor(p);
            let u_jp = b.factors.get(&jp).copied().ok_or_else(|| {
                TransferError::Precondition(format!(
                    "source witness has no factor for {}",
                    c_prime.morphism_name(jp)
                ))
            })?;
            let y = c.dom(p);
            let u = c
                .compose_opt(psi.components[y.index()], d.apply_mor(u_jp))
                .ok_or_else(|| {
                    TransferError::Precondition("psi component does not compose".into())
                })?;
            Ok((p, u))
        })
        .collect::<Result<_, TransferError>>()?;
    checked(c, MovabilityWitness { target: x, mover: d.apply_obj(b.mover), m, factors })
}

/// Combine per-factor uniform witnesses into one for the tuple object
/// of a product category.
pub fn product_uniform_witness(
    prod: &Product,
    parts: &[&UniformMovabilityWitness],
) -> Result<UniformMovabilityWitness, TransferError> {
    if parts.len() != prod.factors.len() {
        return Err(TransferError::FactorMismatch {
            expected: prod.factors.len(),
            got: parts.len(),
        });
    }
    let cat = &prod.category;
    let target = prod.object_tuple(&parts.iter().map(|w| w.0.target).collect::<Vec<_>>());
    let mover = prod.object_tuple(&parts.iter().map(|w| w.0.mover).collect::<Vec<_>>());
    let m = prod.morphism_tuple(&parts.iter().map(|w| w.0.m).collect::<Vec<_>>());
    let factors = cat
        .morphisms_into(target)
        .iter()
        .map(|&p| {
            let comps = prod.morphism_parts(p);
            let u_parts = comps
                .iter()
                .zip(parts)
                .map(|(&pi, w)| {
                    w.0.factors.get(&pi).copied().ok_or_else(|| {
                        TransferError::Precondition(format!(
                            "part witness has no factor for {}",
                            prod.factors[0].morphism_name(pi)
                        ))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok((p, prod.morphism_tuple(&u_parts)))
        })
        .collect::<Result<_, TransferError>>()?;
    checked(cat, MovabilityWitness { target, mover, m, factors })
}

/// Project a uniform witness for a tuple object down to one factor,
/// by restricting to the morphisms that are the identity in every
/// other coordinate.
pub fn factor_uniform_witness(
    prod: &Product,
    w: &UniformMovabilityWitness,
    i: usize,
) -> Result<UniformMovabilityWitness, TransferError> {
    if i >= prod.factors.len() {
        return Err(TransferError::Precondition(format!("no factor {i}")));
    }
    let cat = &prod.factors[i];
    let target_parts = prod.object_parts(w.0.target);
    let target = target_parts[i];
    let mover = prod.object_parts(w.0.mover)[i];
    let m = prod.morphism_parts(w.0.m)[i];
    let factors = cat
        .morphisms_into(target)
        .iter()
        .map(|&p| {
            let lifted_parts: Vec<MorId> = (0..prod.factors.len())
                .map(|k| {
                    if k == i {
                        p
                    } else {
                        prod.factors[k].identity(target_parts[k])
                    }
                })
                .collect();
            let lifted = prod.morphism_tuple(&lifted_parts);
            let u = w.0.factors.get(&lifted).copied().ok_or_else(|| {
                TransferError::Precondition(format!(
                    "tuple witness has no factor for {}",
                    prod.category.morphism_name(lifted)
                ))
            })?;
            Ok((p, prod.morphism_parts(u)[i]))
        })
        .collect::<Result<_, TransferError>>()?;
    checked(cat, MovabilityWitness { target, mover, m, factors })
}

// ---------------------------------------------------------------------
// The pullback relation
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PullbackRelationError {
    #[error("cospan does not land on the witness target")]
    WrongCospan,
    #[error("witness lacks a factor for `{0}`")]
    MissingFactor(String),
    #[error("mediator table has no entry for the factor cone")]
    ConeNotInTable,
    #[error("mediator `{mediator}` differs from the diagonal factor `{factor}`")]
    Mismatch { mediator: String, factor: String },
}

/// Check the compatibility of a uniform witness with a pullback square
/// over its target: the mediator of the cone `(u(f), u(g))` must be the
/// factor of the square's diagonal.
pub fn check_pullback_relation(
    cat: &FinCategory,
    w: &UniformMovabilityWitness,
    f: MorId,
    g: MorId,
    pb: &Pullback,
) -> Result<(), PullbackRelationError> {
    let w = &w.0;
    if cat.cod(f) != w.target || cat.cod(g) != w.target {
        return Err(PullbackRelationError::WrongCospan);
    }
    let factor = |p: MorId| {
        w.factors
            .get(&p)
            .copied()
            .ok_or_else(|| PullbackRelationError::MissingFactor(cat.morphism_name(p).to_string()))
    };
    let uf = factor(f)?;
    let ug = factor(g)?;
    let diagonal = cat
        .compose_opt(f, pb.p_x)
        .ok_or(PullbackRelationError::WrongCospan)?;
    let u_diag = factor(diagonal)?;
    let mediator = pb
        .mediators
        .get(&(uf, ug))
        .copied()
        .ok_or(PullbackRelationError::ConeNotInTable)?;
    if mediator != u_diag {
        return Err(PullbackRelationError::Mismatch {
            mediator: cat.morphism_name(mediator).to_string(),
            factor: cat.morphism_name(u_diag).to_string(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{find_domination, find_initial, find_null_family, find_pullback};
    use crate::fincat::product;
    use crate::fixtures;

    #[test]
    fn point_is_movable_with_itself() {
        let cat = fixtures::fix_a();
        let s1 = cat.object("s1").unwrap();
        let w = decide_movable(&cat, s1).unwrap();
        assert_eq!(cat.object_name(w.mover), "s1");
        assert_eq!(cat.morphism_name(w.m), "id_s1");
        assert!(verify_witness(&cat, &w).is_empty());
    }

    #[test]
    fn point_is_not_uniformly_movable() {
        let cat = fixtures::fix_a();
        let s1 = cat.object("s1").unwrap();
        let r = decide_uniformly_movable(&cat, s1).unwrap_err();
        assert!(r.uniform);
        assert_eq!(r.candidates.len(), 2);
        assert_eq!(
            r.candidates[0].why,
            CandidateFailure::Contradiction {
                p: "collapse".into(),
                q: "id_s1".into(),
                r: "pt_b".into(),
            }
        );
        assert_eq!(r.candidates[1].mover, "s2");
        assert_eq!(r.candidates[1].m, "collapse");
    }

    #[test]
    fn two_point_set_is_not_movable() {
        let cat = fixtures::fix_a();
        let s2 = cat.object("s2").unwrap();
        let r = decide_movable(&cat, s2).unwrap_err();
        assert_eq!(r.candidates.len(), 6);
        assert!(r
            .candidates
            .iter()
            .all(|c| matches!(c.why, CandidateFailure::EmptyFiber { .. })));
    }

    #[test]
    fn retract_target_is_uniformly_movable() {
        let cat = fixtures::fix_c();
        let o2 = cat.object("o2").unwrap();
        let w = decide_uniformly_movable(&cat, o2).unwrap();
        assert_eq!(cat.object_name(w.0.mover), "o1");
        assert_eq!(cat.morphism_name(w.0.m), "emb");
        assert!(verify_uniform_witness(&cat, &w).is_empty());
    }

    #[test]
    fn poset_element_with_lower_bound_is_uniformly_movable() {
        let cat = fixtures::fix_b();
        let one = cat.object("1").unwrap();
        let w = decide_uniformly_movable(&cat, one).unwrap();
        assert_eq!(cat.object_name(w.0.mover), "0");
        assert_eq!(cat.morphism_name(w.0.m), "le01");
    }

    #[test]
    fn whole_poset_is_uniformly_movable() {
        let cat = fixtures::fix_b_plus();
        let decision = decide_category_uniform(&cat);
        assert!(decision.holds());
        assert_eq!(decision.witnesses.len(), 4);
    }

    #[test]
    fn category_decision_splits_by_object() {
        let cat = fixtures::fix_a();
        let decision = decide_category_movable(&cat);
        assert!(!decision.holds());
        let s1 = cat.object("s1").unwrap();
        let s2 = cat.object("s2").unwrap();
        assert!(decision.witnesses.contains_key(&s1));
        assert!(decision.refutations.contains_key(&s2));
    }

    #[test]
    fn co_movability_works_in_the_dual() {
        let cat = fixtures::fix_b();
        let one = cat.object("1").unwrap();
        let w = decide_co_uniformly_movable(&cat, one).unwrap();
        assert_eq!(cat.object_name(w.0.mover), "1");
        assert_eq!(cat.morphism_name(w.0.m), "id_1");
        assert!(verify_co_witness(&cat, &w.0).is_empty());
    }

    #[test]
    fn initial_object_witnesses_everything() {
        let cat = fixtures::fix_b_plus();
        let initial = find_initial(&cat).unwrap();
        for x in cat.objects() {
            let w = witness_from_initial(&cat, initial, x).unwrap();
            assert!(verify_uniform_witness(&cat, &w).is_empty());
        }
    }

    #[test]
    fn non_initial_object_is_rejected() {
        let cat = fixtures::fix_b();
        let one = cat.object("1").unwrap();
        let two = cat.object("2").unwrap();
        assert!(matches!(
            witness_from_initial(&cat, one, two),
            Err(TransferError::Precondition(_))
        ));
    }

    #[test]
    fn null_family_witnesses_everything() {
        let cat = fixtures::fix_c();
        let family = find_null_family(&cat).unwrap();
        for x in cat.objects() {
            let w = witness_from_nulls(&cat, &family, x).unwrap();
            assert!(verify_uniform_witness(&cat, &w).is_empty());
        }
    }

    #[test]
    fn domination_transfers_the_witness() {
        let cat = fixtures::fix_c();
        let o1 = cat.object("o1").unwrap();
        let o2 = cat.object("o2").unwrap();
        let base = decide_uniformly_movable(&cat, o2).unwrap();
        let dom = find_domination(&cat, o1, o2).unwrap();
        let w = transfer_domination(&cat, &base, o1, &dom).unwrap();
        assert_eq!(w.0.target, o1);
        assert_eq!(cat.morphism_name(w.0.m), "id_o1");
    }

    #[test]
    fn product_combines_and_projects() {
        let b = fixtures::fix_b();
        let c = fixtures::fix_c();
        let prod = product(&[&b, &c]).unwrap();
        let wb = decide_uniformly_movable(&b, b.object("1").unwrap()).unwrap();
        let wc = decide_uniformly_movable(&c, c.object("o2").unwrap()).unwrap();
        let combined = product_uniform_witness(&prod, &[&wb, &wc]).unwrap();
        assert_eq!(
            prod.category.object_name(combined.0.target),
            "1*o2"
        );
        let back = factor_uniform_witness(&prod, &combined, 1).unwrap();
        assert_eq!(back.0.target, wc.0.target);
        assert_eq!(back.0.m, wc.0.m);
    }

    #[test]
    fn identity_functors_transfer_witnesses_unchanged() {
        let cat = fixtures::fix_b_plus();
        let id = Functor::identity(&cat);
        let psi = NatTrans {
            components: cat.objects().map(|o| cat.identity(o)).collect(),
        };
        let base: BTreeMap<_, _> = cat
            .objects()
            .map(|o| (o, decide_uniformly_movable(&cat, o).unwrap()))
            .collect();
        let out = transfer_weak_functorial(&cat, &cat, &id, &id, &psi, &base).unwrap();
        assert_eq!(out, base);
    }

    #[test]
    fn missing_source_witness_is_reported() {
        let cat = fixtures::fix_b();
        let id = Functor::identity(&cat);
        let psi = NatTrans {
            components: cat.objects().map(|o| cat.identity(o)).collect(),
        };
        let err = transfer_weak_functorial(&cat, &cat, &id, &id, &psi, &BTreeMap::new())
            .unwrap_err();
        assert_eq!(err, TransferError::MissingSourceWitness("0".into()));
    }

    #[test]
    fn pullback_relation_holds_in_the_diamond() {
        let cat = fixtures::fix_b_plus();
        let three = cat.object("3").unwrap();
        let w = decide_uniformly_movable(&cat, three).unwrap();
        let le13 = cat.morphism("le13").unwrap();
        let le23 = cat.morphism("le23").unwrap();
        let pb = find_pullback(&cat, le13, le23).unwrap().unwrap();
        check_pullback_relation(&cat, &w, le13, le23, &pb).unwrap();
    }
}

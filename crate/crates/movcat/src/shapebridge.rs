//! The bridge between an expansion's two movability readings: the
//! comma category of the apex over the subcategory on one side, the
//! inverse system on the other.
//!
//! [`theorem_check`] decides both sides independently and reports
//! whether the verdicts agree — nothing here assumes the equivalence.
//! On top of the verdicts it transports witnesses across the bridge in
//! both directions, so a defect in either decider is caught twice: once
//! by the verdict comparison and once when a transported artifact fails
//! the other side's verifier.
//!
//! Both transports re-derive the approximation data they need. A
//! morphism out of the apex into a subcategory object is written
//! through a leg, and two subcategory morphisms that agree after a leg
//! are equalized by a bond; failures of either step are reported as
//! such, since they refute the expansion axioms rather than the
//! movability claim being transported.

use std::collections::BTreeMap;

use crate::construct::{comma_category, CommaCategory};
use crate::fincat::{FinCategory, MorId, ObjId, SubcategorySpec};
use crate::fincat::restrict;
use crate::movability::{
    decide_category_movable, decide_category_uniform, verify_uniform_witness, CategoryDecision,
    MovabilityWitness, UniformMovabilityWitness, WitnessViolation,
};
use crate::prosys::{
    check_ae1, check_ae2, composite_bond, decide_system_uniform, equalizing_level, verify_thread,
    AE1Report, AE2Report, Expansion, ProThread, System, SystemRefutation, SystemUniformWitness,
    ThreadBody, ThreadViolation,
};

/// The check does not apply: the expansion is malformed, does not match
/// the stated ambient data, or fails an expansion axiom. No equivalence
/// is asserted either way.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("expansion invalid:{}", render(&self.problems))]
pub struct ExpansionInvalid {
    pub problems: Vec<String>,
}

fn render(problems: &[String]) -> String {
    problems.iter().map(|p| format!("\n  {p}")).collect()
}

/// A failure while transporting a witness across the bridge.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BridgeError {
    /// A morphism out of the apex admits no leg factorization.
    #[error("`{0}` does not factor through any level")]
    AE1Failure(String),
    /// Two morphisms agreeing after a leg are never equalized by a bond.
    #[error("`{h}` and `{k}` are not equalized by any bond above level {level}")]
    AE2Failure { h: String, k: String, level: usize },
    /// An input does not fit the expansion it is paired with.
    #[error("{0}")]
    Malformed(String),
    /// The transported thread fails the independent thread verifier;
    /// this certifies a defect in the construction or its input.
    #[error("transported thread fails verification:{}", render_all(.0))]
    ThreadVerificationFailure(Vec<ThreadViolation>),
    /// The transported witness fails the independent witness verifier.
    #[error("transported witness fails verification:{}", render_all(.0))]
    WitnessVerificationFailure(Vec<WitnessViolation>),
}

fn render_all<V: std::fmt::Display>(violations: &[V]) -> String {
    violations.iter().map(|v| format!("\n  {v}")).collect()
}

/// Outcome of comparing the comma-side and system-side verdicts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    /// The verdicts agree; `holds` is the shared verdict.
    Consistent { holds: bool },
    /// The verdicts differ. For an expansion that passed both axiom
    /// checks this certifies a defect in one of the deciders; it is
    /// never silently dropped.
    Disagreement { comma_holds: bool, system_holds: bool },
}

/// The full record of one bridge check: axiom reports, both decisions,
/// the verdict comparison, and every transported witness with its
/// verification outcome.
#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub ae1: AE1Report,
    pub ae2: AE2Report,
    pub comma: CommaCategory,
    pub comma_side: CategoryDecision<UniformMovabilityWitness>,
    pub system_side: Result<SystemUniformWitness, SystemRefutation>,
    pub equivalence: Equivalence,
    /// Threads built from the comma witnesses of the legs, keyed by
    /// level; filled only when the comma side holds.
    pub threads_from_comma: BTreeMap<usize, Result<ProThread, BridgeError>>,
    /// Comma witnesses built from the system threads, keyed by comma
    /// object; filled only when the system side holds.
    pub witnesses_from_system: BTreeMap<ObjId, Result<UniformMovabilityWitness, BridgeError>>,
}

impl TheoremReport {
    /// Every transported artifact verified.
    pub fn transports_verified(&self) -> bool {
        self.threads_from_comma.values().all(Result::is_ok)
            && self.witnesses_from_system.values().all(Result::is_ok)
    }
}

fn validated_comma(
    t: &FinCategory,
    p: &SubcategorySpec,
    x: ObjId,
    exp: &Expansion,
) -> Result<(AE1Report, AE2Report, CommaCategory), ExpansionInvalid> {
    let mut problems = Vec::new();
    if exp.ambient != *t {
        problems.push("the expansion's ambient category is not the stated one".to_string());
    } else {
        if exp.apex != x {
            problems.push(format!(
                "the expansion's apex is `{}`, not `{}`",
                t.object_name(exp.apex),
                t.object_name(x),
            ));
        }
        match restrict(t, p) {
            Ok(fresh)
                if fresh.category == exp.restriction.category
                    && fresh.obj_to_ambient == exp.restriction.obj_to_ambient
                    && fresh.mor_to_ambient == exp.restriction.mor_to_ambient => {}
            Ok(_) => problems.push(
                "the expansion's restricted category does not match the stated subcategory"
                    .to_string(),
            ),
            Err(e) => problems.push(e.to_string()),
        }
    }
    problems.extend(exp.validate().iter().map(ToString::to_string));
    if !problems.is_empty() {
        return Err(ExpansionInvalid { problems });
    }

    let ae1 = check_ae1(exp).map_err(|violations| ExpansionInvalid {
        problems: violations.iter().map(ToString::to_string).collect(),
    })?;
    let ae2 = check_ae2(exp).map_err(|violations| ExpansionInvalid {
        problems: violations.iter().map(ToString::to_string).collect(),
    })?;
    let comma = comma_category(t, p, x)
        .map_err(|e| ExpansionInvalid { problems: vec![e.to_string()] })?;
    Ok((ae1, ae2, comma))
}

/// Decide uniform movability of the comma category and of the inverse
/// system, compare the verdicts, and transport witnesses both ways.
///
/// The expansion must match the stated ambient category, subcategory,
/// and apex, validate, and satisfy both expansion axioms; otherwise the
/// check refuses to run and asserts nothing.
pub fn theorem_check(
    t: &FinCategory,
    p: &SubcategorySpec,
    x: ObjId,
    exp: &Expansion,
) -> Result<TheoremReport, ExpansionInvalid> {
    let (ae1, ae2, comma) = validated_comma(t, p, x, exp)?;
    let comma_side = decide_category_uniform(&comma.category);
    let system_side = decide_system_uniform(&exp.system);

    let comma_holds = comma_side.holds();
    let system_holds = system_side.is_ok();
    let equivalence = if comma_holds == system_holds {
        Equivalence::Consistent { holds: comma_holds }
    } else {
        Equivalence::Disagreement { comma_holds, system_holds }
    };

    let mut threads_from_comma = BTreeMap::new();
    if comma_holds {
        for level in exp.level_domain() {
            let leg_obj = comma
                .object_for(exp.leg(level))
                .expect("legs of a valid expansion are comma objects");
            let witness = &comma_side.witnesses[&leg_obj];
            threads_from_comma
                .insert(level, comma_to_system_witness(exp, &comma, level, witness));
        }
    }
    let mut witnesses_from_system = BTreeMap::new();
    if let Ok(threads) = &system_side {
        for f in comma.category.objects() {
            witnesses_from_system.insert(f, system_to_comma_witness(exp, &comma, threads, f));
        }
    }

    Ok(TheoremReport {
        ae1,
        ae2,
        comma,
        comma_side,
        system_side,
        equivalence,
        threads_from_comma,
        witnesses_from_system,
    })
}

/// First level at which a morphism out of the apex into a subcategory
/// object factors through the leg, with the factoring morphism (first
/// in hom order). `at_least` restricts the scan to levels comparable
/// above a base; if a factorization exists anywhere, one exists above
/// any base, because factorizations push up along bonds.
fn factor_through_level(
    exp: &Expansion,
    f_amb: MorId,
    at_least: Option<usize>,
) -> Option<(usize, MorId)> {
    let t = &exp.ambient;
    let pcat = &exp.restriction.category;
    let q_obj = exp.restriction.from_ambient_obj(t.cod(f_amb))?;
    let factors_at = |nu: usize| {
        pcat.hom(exp.system_object(nu), q_obj)
            .iter()
            .copied()
            .find(|&g| t.compose_opt(exp.restriction.ambient_mor(g), exp.leg(nu)) == Some(f_amb))
            .map(|g| (nu, g))
    };
    match &exp.system {
        System::Finite(s) => match at_least {
            Some(base) => (0..s.index.len())
                .filter(|&nu| s.index.le(base, nu))
                .find_map(factors_at),
            None => (0..s.index.len()).find_map(factors_at),
        },
        System::Periodic(s) => {
            let start = at_least.unwrap_or(1);
            (start..=start.max(s.k()) + s.c()).find_map(factors_at)
        }
        System::Divisibility(_) => None,
    }
}

fn comp(cat: &FinCategory, g: MorId, f: MorId) -> MorId {
    cat.compose_opt(g, f).expect("bridge composites are well-typed")
}

fn bond(exp: &Expansion, from: usize, to: usize) -> MorId {
    composite_bond(&exp.system, from, to)
        .expect("levels are comparable by construction")
        .morphism()
}

/// Transport a uniform movability witness for the leg at `level` into a
/// thread for the system.
///
/// The witness's mover is a morphism out of the apex; it is written
/// through a level at or above `level`, and the first bond equalizing
/// the written form against the bond into `level` fixes the thread's
/// mover index. The component at a level above `level` composes the
/// witness factor of that level's bond arrow with the written mover;
/// components below are bond composites, and components at incomparable
/// positions are pulled back from an upper bound. The result must pass
/// the independent thread verifier.
pub fn comma_to_system_witness(
    exp: &Expansion,
    comma: &CommaCategory,
    level: usize,
    witness: &UniformMovabilityWitness,
) -> Result<ProThread, BridgeError> {
    let pcat = &exp.restriction.category;
    let leg = exp.leg(level);
    let target = comma
        .object_for(leg)
        .ok_or_else(|| BridgeError::Malformed("the leg is not a comma object".to_string()))?;
    let w = &witness.0;
    if w.target != target {
        return Err(BridgeError::Malformed(format!(
            "witness targets `{}`, not the leg at level {level}",
            comma.category.object_name(w.target),
        )));
    }

    let mover_amb = comma.ambient_of_object(w.mover);
    let (tilde, written) = factor_through_level(exp, mover_amb, Some(level))
        .ok_or_else(|| BridgeError::AE1Failure(exp.ambient.morphism_name(mover_amb).to_string()))?;
    let eta = exp
        .restriction
        .from_ambient_mor(comma.ambient_of_morphism(w.m))
        .expect("comma morphisms live in the subcategory");
    let via_mover = comp(pcat, eta, written);
    let via_bond = bond(exp, level, tilde);
    let mover_level = equalizing_level(exp, tilde, via_mover, via_bond).ok_or_else(|| {
        BridgeError::AE2Failure {
            h: pcat.morphism_name(via_mover).to_string(),
            k: pcat.morphism_name(via_bond).to_string(),
            level: tilde,
        }
    })?;
    // The written mover, pushed to the thread's source level.
    let reach = comp(pcat, written, bond(exp, tilde, mover_level));

    let factor_to = |nu: usize, bond_to_level: MorId| -> Result<MorId, BridgeError> {
        let arrow = comma
            .morphism_for(exp.leg(nu), exp.restriction.ambient_mor(bond_to_level))
            .ok_or_else(|| {
                BridgeError::Malformed(format!("the bond into level {nu} is not a comma arrow"))
            })?;
        let u = w.factors.get(&arrow).ok_or_else(|| {
            BridgeError::Malformed(format!(
                "witness has no factor for `{}`",
                comma.category.morphism_name(arrow),
            ))
        })?;
        let u_p = exp
            .restriction
            .from_ambient_mor(comma.ambient_of_morphism(*u))
            .expect("comma morphisms live in the subcategory");
        Ok(comp(pcat, u_p, reach))
    };

    let thread = match &exp.system {
        System::Finite(s) => {
            let n = s.index.len();
            let mut components: Vec<Option<MorId>> = vec![None; n];
            for nu in 0..n {
                if s.index.le(level, nu) {
                    components[nu] = Some(factor_to(nu, s.bonds[&(level, nu)])?);
                } else if s.index.le(nu, level) {
                    components[nu] = Some(bond(exp, nu, mover_level));
                }
            }
            for nu in 0..n {
                if components[nu].is_none() {
                    let above = s
                        .index
                        .upper_bound(nu, level)
                        .expect("a validated index is directed");
                    let pulled = comp(pcat, s.bonds[&(nu, above)], components[above].unwrap());
                    components[nu] = Some(pulled);
                }
            }
            ProThread {
                lambda: level,
                m: mover_level,
                body: ThreadBody::Total(components.into_iter().map(Option::unwrap).collect()),
            }
        }
        System::Periodic(s) => {
            let mut values = Vec::new();
            let mut states: BTreeMap<(usize, MorId), usize> = BTreeMap::new();
            let mut to_level = pcat.identity(s.object(level));
            let mut nu = level;
            let (first, repeat) = loop {
                if nu > s.k() {
                    if let Some(&seen) = states.get(&(s.phase(nu), to_level)) {
                        break (seen, nu);
                    }
                    states.insert((s.phase(nu), to_level), nu);
                }
                values.push(factor_to(nu, to_level)?);
                to_level = pcat
                    .compose_opt(to_level, s.step_bond(nu))
                    .expect("validated sequences chain");
                nu += 1;
            };
            let mut prefix: Vec<MorId> =
                (1..level).map(|below| bond(exp, below, mover_level)).collect();
            prefix.extend_from_slice(&values[..first - level]);
            let cycle = values[first - level..repeat - level].to_vec();
            ProThread { lambda: level, m: mover_level, body: ThreadBody::Periodic { prefix, cycle } }
        }
        System::Divisibility(_) => {
            return Err(BridgeError::Malformed(
                "arithmetic systems have no comma side".to_string(),
            ))
        }
    };

    let violations = verify_thread(&exp.system, &thread);
    if violations.is_empty() {
        Ok(thread)
    } else {
        Err(BridgeError::ThreadVerificationFailure(violations))
    }
}

/// Per-arrow approximation data for one comma morphism into the target:
/// the source object written through a level at or above the target's
/// own, and the first bond equalizing the two routes into the target's
/// codomain.
struct ArrowData {
    eta: MorId,
    written_level: usize,
    written: MorId,
    equalized: usize,
}

enum Components<'a> {
    Thread(&'a ProThread),
    Bonds(usize),
}

impl Components<'_> {
    fn mover_index(&self) -> usize {
        match self {
            Components::Thread(t) => t.m,
            Components::Bonds(star) => *star,
        }
    }

    fn at(&self, exp: &Expansion, nu: usize) -> MorId {
        match self {
            Components::Thread(t) => t.component_mor(nu),
            Components::Bonds(star) => bond(exp, nu, *star),
        }
    }
}

fn collect_arrow_data(
    exp: &Expansion,
    comma: &CommaCategory,
    f: ObjId,
    lambda: usize,
    f_lambda: MorId,
) -> Result<Vec<ArrowData>, BridgeError> {
    let pcat = &exp.restriction.category;
    let mut out = Vec::new();
    for &eta in comma.category.morphisms_into(f) {
        let source = comma.category.dom(eta);
        let source_amb = comma.ambient_of_object(source);
        let eta_p = exp
            .restriction
            .from_ambient_mor(comma.ambient_of_morphism(eta))
            .expect("comma morphisms live in the subcategory");
        let (written_level, written) = factor_through_level(exp, source_amb, Some(lambda))
            .ok_or_else(|| {
                BridgeError::AE1Failure(exp.ambient.morphism_name(source_amb).to_string())
            })?;
        let via_source = comp(pcat, eta_p, written);
        let via_target = comp(pcat, f_lambda, bond(exp, lambda, written_level));
        let equalized =
            equalizing_level(exp, written_level, via_source, via_target).ok_or_else(|| {
                BridgeError::AE2Failure {
                    h: pcat.morphism_name(via_source).to_string(),
                    k: pcat.morphism_name(via_target).to_string(),
                    level: written_level,
                }
            })?;
        out.push(ArrowData { eta, written_level, written, equalized });
    }
    Ok(out)
}

fn assemble_comma_witness(
    exp: &Expansion,
    comma: &CommaCategory,
    f: ObjId,
    lambda: usize,
    f_lambda: MorId,
    arrows: &[ArrowData],
    components: &Components<'_>,
) -> Result<UniformMovabilityWitness, BridgeError> {
    let pcat = &exp.restriction.category;
    let mover_index = components.mover_index();
    let mover_leg = exp.leg(mover_index);
    let mover = comma
        .object_for(mover_leg)
        .ok_or_else(|| BridgeError::Malformed("the mover leg is not a comma object".to_string()))?;
    let m_p = comp(pcat, f_lambda, bond(exp, lambda, mover_index));
    let m = comma
        .morphism_for(mover_leg, exp.restriction.ambient_mor(m_p))
        .ok_or_else(|| {
            BridgeError::Malformed("the movability morphism is not a comma arrow".to_string())
        })?;
    let mut factors = BTreeMap::new();
    for a in arrows {
        let u_p = comp(pcat, 
            a.written,
            comp(pcat, 
                bond(exp, a.written_level, a.equalized),
                components.at(exp, a.equalized),
            ),
        );
        let arrow = comma
            .morphism_for(mover_leg, exp.restriction.ambient_mor(u_p))
            .ok_or_else(|| {
                BridgeError::Malformed(format!(
                    "the transported factor for `{}` is not a comma arrow",
                    comma.category.morphism_name(a.eta),
                ))
            })?;
        factors.insert(a.eta, arrow);
    }
    Ok(UniformMovabilityWitness(MovabilityWitness { target: f, mover, m, factors }))
}

/// A level whose bond components satisfy every equalization the witness
/// for `f` needs: the top position for finite indexes, and for
/// sequences the maximum over the per-arrow equalizing levels and the
/// equalizing levels of every commuting triangle among the arrows.
fn star_level(
    exp: &Expansion,
    comma: &CommaCategory,
    lambda: usize,
    arrows: &[ArrowData],
) -> Result<usize, BridgeError> {
    let pcat = &exp.restriction.category;
    match &exp.system {
        System::Finite(s) => s
            .index
            .top()
            .ok_or_else(|| BridgeError::Malformed("a validated index has a top".to_string())),
        System::Periodic(_) => {
            let mut star = arrows.iter().fold(lambda, |acc, a| acc.max(a.equalized));
            for a in arrows {
                for b in arrows {
                    let dom_a = comma.category.dom(a.eta);
                    let dom_b = comma.category.dom(b.eta);
                    for &r in comma.category.hom(dom_b, dom_a) {
                        if comma.category.compose_opt(a.eta, r) != Some(b.eta) {
                            continue;
                        }
                        let r_p = exp
                            .restriction
                            .from_ambient_mor(comma.ambient_of_morphism(r))
                            .expect("comma morphisms live in the subcategory");
                        let common = a.written_level.max(b.written_level);
                        let h = comp(pcat, a.written, bond(exp, a.written_level, common));
                        let k = comp(
                            pcat,
                            r_p,
                            comp(pcat, b.written, bond(exp, b.written_level, common)),
                        );
                        let equalized =
                            equalizing_level(exp, common, h, k).ok_or_else(|| {
                                BridgeError::AE2Failure {
                                    h: pcat.morphism_name(h).to_string(),
                                    k: pcat.morphism_name(k).to_string(),
                                    level: common,
                                }
                            })?;
                        star = star.max(equalized);
                    }
                }
            }
            Ok(star)
        }
        System::Divisibility(_) => {
            Err(BridgeError::Malformed("arithmetic systems have no comma side".to_string()))
        }
    }
}

/// Transport system threads into a uniform movability witness for the
/// comma object `f`.
///
/// `f` is written through its first level λ; the thread at λ names the
/// mover leg, the movability morphism composes the written form with
/// the bond to the mover, and each arrow into `f` gets the factor
/// composing its own written source, the bond to its equalizing level,
/// and the thread component there. When a factor built this way is not
/// a comma arrow, or the witness fails verification, the construction
/// retries with bond components to a level above every equalization,
/// which commutes with the legs by construction. The result must pass
/// the independent uniform-witness verifier.
pub fn system_to_comma_witness(
    exp: &Expansion,
    comma: &CommaCategory,
    threads: &SystemUniformWitness,
    f: ObjId,
) -> Result<UniformMovabilityWitness, BridgeError> {
    let f_amb = comma.ambient_of_object(f);
    let (lambda, f_lambda) = factor_through_level(exp, f_amb, None)
        .ok_or_else(|| BridgeError::AE1Failure(exp.ambient.morphism_name(f_amb).to_string()))?;
    let arrows = collect_arrow_data(exp, comma, f, lambda, f_lambda)?;

    if let Some(thread) = threads.threads.iter().find(|t| t.lambda == lambda) {
        if let Ok(witness) = assemble_comma_witness(
            exp,
            comma,
            f,
            lambda,
            f_lambda,
            &arrows,
            &Components::Thread(thread),
        ) {
            if verify_uniform_witness(&comma.category, &witness).is_empty() {
                return Ok(witness);
            }
        }
    }

    let star = star_level(exp, comma, lambda, &arrows)?;
    let witness =
        assemble_comma_witness(exp, comma, f, lambda, f_lambda, &arrows, &Components::Bonds(star))?;
    let violations = verify_uniform_witness(&comma.category, &witness);
    if violations.is_empty() {
        Ok(witness)
    } else {
        Err(BridgeError::WitnessVerificationFailure(violations))
    }
}

/// Both notions decided on the comma category of a sequence expansion;
/// for these the verdicts must agree.
#[derive(Debug, Clone)]
pub struct CorollaryReport {
    pub movable: CategoryDecision<MovabilityWitness>,
    pub uniform: CategoryDecision<UniformMovabilityWitness>,
}

impl CorollaryReport {
    /// The two verdicts agree.
    pub fn agrees(&self) -> bool {
        self.movable.holds() == self.uniform.holds()
    }
}

/// For a sequence expansion, decide plain and uniform movability of the
/// whole comma category and return both decisions side by side.
pub fn corollary_sequence_check(
    t: &FinCategory,
    p: &SubcategorySpec,
    x: ObjId,
    exp: &Expansion,
) -> Result<CorollaryReport, ExpansionInvalid> {
    if !matches!(exp.system, System::Periodic(_)) {
        return Err(ExpansionInvalid {
            problems: vec!["the sequence reading applies to sequence expansions only".to_string()],
        });
    }
    let (_, _, comma) = validated_comma(t, p, x, exp)?;
    Ok(CorollaryReport {
        movable: decide_category_movable(&comma.category),
        uniform: decide_category_uniform(&comma.category),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::prosys::{DirectedPreorder, DivisibilitySequence, FiniteIndexSystem, Legs, PeriodicSequence};

    fn full_spec(cat: &FinCategory, name: &str, objects: &[&str]) -> SubcategorySpec {
        SubcategorySpec::full(
            cat,
            name.into(),
            objects.iter().map(|o| cat.object(o).unwrap()).collect(),
        )
    }

    fn singleton() -> (FinCategory, SubcategorySpec, Expansion) {
        let t = fixtures::fix_exp();
        let spec = full_spec(&t, "stage", &["P"]);
        let restriction = restrict(&t, &spec).unwrap();
        let rp = restriction.category.object("P").unwrap();
        let index = DirectedPreorder::new(vec!["0".into()], &[]).unwrap();
        let bonds = [((0, 0), restriction.category.identity(rp))].into_iter().collect();
        let system = System::Finite(FiniteIndexSystem {
            ambient: restriction.category.clone(),
            index,
            objects: vec![rp],
            bonds,
        });
        let legs = Legs::Total(vec![t.morphism("p").unwrap()]);
        let exp = Expansion {
            apex: t.object("X").unwrap(),
            ambient: t.clone(),
            restriction,
            system,
            legs,
        };
        (t, spec, exp)
    }

    fn two_chain() -> (FinCategory, SubcategorySpec, Expansion) {
        let t = fixtures::build(
            "two-chain",
            &["X", "P1", "P2"],
            &[("p1", "X", "P1"), ("p2", "X", "P2"), ("b", "P2", "P1")],
            &[("b", "p2", "p1")],
        );
        let spec = full_spec(&t, "approx", &["P1", "P2"]);
        let restriction = restrict(&t, &spec).unwrap();
        let rcat = &restriction.category;
        let objects = vec![rcat.object("P1").unwrap(), rcat.object("P2").unwrap()];
        let bonds = [
            ((0, 0), rcat.identity(objects[0])),
            ((1, 1), rcat.identity(objects[1])),
            ((0, 1), rcat.morphism("b").unwrap()),
        ]
        .into_iter()
        .collect();
        let index = DirectedPreorder::new(vec!["0".into(), "1".into()], &[(0, 1)]).unwrap();
        let system = System::Finite(FiniteIndexSystem {
            ambient: rcat.clone(),
            index,
            objects,
            bonds,
        });
        let legs = Legs::Total(vec![t.morphism("p1").unwrap(), t.morphism("p2").unwrap()]);
        let exp = Expansion {
            apex: t.object("X").unwrap(),
            ambient: t.clone(),
            restriction,
            system,
            legs,
        };
        (t, spec, exp)
    }

    fn diamond() -> (FinCategory, SubcategorySpec, Expansion) {
        let t = fixtures::build(
            "diamond-stage",
            &["X", "D0", "D1", "D2", "D3"],
            &[
                ("l0", "X", "D0"),
                ("l1", "X", "D1"),
                ("l2", "X", "D2"),
                ("l3", "X", "D3"),
                ("b01", "D1", "D0"),
                ("b02", "D2", "D0"),
                ("b13", "D3", "D1"),
                ("b23", "D3", "D2"),
                ("b03", "D3", "D0"),
            ],
            &[
                ("b01", "l1", "l0"),
                ("b02", "l2", "l0"),
                ("b03", "l3", "l0"),
                ("b13", "l3", "l1"),
                ("b23", "l3", "l2"),
                ("b01", "b13", "b03"),
                ("b02", "b23", "b03"),
            ],
        );
        let spec = full_spec(&t, "stages", &["D0", "D1", "D2", "D3"]);
        let restriction = restrict(&t, &spec).unwrap();
        let rcat = &restriction.category;
        let objects: Vec<ObjId> =
            ["D0", "D1", "D2", "D3"].iter().map(|o| rcat.object(o).unwrap()).collect();
        let mut bonds: BTreeMap<(usize, usize), MorId> =
            (0..4).map(|i| ((i, i), rcat.identity(objects[i]))).collect();
        for (a, b, name) in
            [(0, 1, "b01"), (0, 2, "b02"), (1, 3, "b13"), (2, 3, "b23"), (0, 3, "b03")]
        {
            bonds.insert((a, b), rcat.morphism(name).unwrap());
        }
        let index = DirectedPreorder::new(
            vec!["0".into(), "1".into(), "2".into(), "3".into()],
            &[(0, 1), (0, 2), (1, 3), (2, 3)],
        )
        .unwrap();
        let system = System::Finite(FiniteIndexSystem {
            ambient: rcat.clone(),
            index,
            objects,
            bonds,
        });
        let legs = Legs::Total(
            ["l0", "l1", "l2", "l3"].iter().map(|l| t.morphism(l).unwrap()).collect(),
        );
        let exp = Expansion {
            apex: t.object("X").unwrap(),
            ambient: t.clone(),
            restriction,
            system,
            legs,
        };
        (t, spec, exp)
    }

    fn sequence_over_points(cycle_bonds: &[&str], cycle_legs: &[&str]) -> (FinCategory, SubcategorySpec, Expansion) {
        let t = fixtures::fix_a();
        let spec = full_spec(&t, "codomain", &["s2"]);
        let restriction = restrict(&t, &spec).unwrap();
        let rcat = &restriction.category;
        let rs2 = rcat.object("s2").unwrap();
        let system = System::Periodic(PeriodicSequence {
            ambient: rcat.clone(),
            prefix_objects: vec![],
            prefix_bonds: vec![],
            cycle_objects: vec![rs2; cycle_bonds.len()],
            cycle_bonds: cycle_bonds.iter().map(|b| rcat.morphism(b).unwrap()).collect(),
        });
        let legs = Legs::Periodic {
            prefix: vec![],
            cycle: cycle_legs.iter().map(|l| t.morphism(l).unwrap()).collect(),
        };
        let exp = Expansion {
            apex: t.object("s1").unwrap(),
            ambient: t.clone(),
            restriction,
            system,
            legs,
        };
        (t, spec, exp)
    }

    fn pointed_sequence() -> (FinCategory, SubcategorySpec, Expansion) {
        sequence_over_points(&["const_a"], &["pt_a"])
    }

    #[test]
    fn singleton_expansion_crosses_the_bridge() {
        let (t, spec, exp) = singleton();
        let report = theorem_check(&t, &spec, exp.apex, &exp).unwrap();
        assert_eq!(report.equivalence, Equivalence::Consistent { holds: true });
        assert!(report.transports_verified());
        assert_eq!(report.threads_from_comma.len(), 1);
        assert_eq!(report.witnesses_from_system.len(), 1);
    }

    #[test]
    fn chain_expansion_transports_both_ways() {
        let (t, spec, exp) = two_chain();
        let report = theorem_check(&t, &spec, exp.apex, &exp).unwrap();
        assert_eq!(report.equivalence, Equivalence::Consistent { holds: true });
        assert!(report.transports_verified());
        assert_eq!(report.ae1.factorizations.len(), 2);
        assert_eq!(report.comma.category.object_count(), 2);
        assert_eq!(report.comma.category.morphism_count(), 3);

        let pcat = &exp.restriction.category;
        let thread = report.threads_from_comma[&0].as_ref().unwrap();
        assert_eq!(thread.m, 1);
        assert_eq!(pcat.morphism_name(thread.component_mor(0)), "b");
        assert_eq!(pcat.morphism_name(thread.component_mor(1)), "id_P2");
    }

    #[test]
    fn diamond_thread_pulls_incomparable_components_from_above() {
        let (t, spec, exp) = diamond();
        let report = theorem_check(&t, &spec, exp.apex, &exp).unwrap();
        assert_eq!(report.equivalence, Equivalence::Consistent { holds: true });
        assert!(report.transports_verified());

        let pcat = &exp.restriction.category;
        let thread = report.threads_from_comma[&1].as_ref().unwrap();
        assert_eq!(thread.m, 3);
        let names: Vec<&str> =
            (0..4).map(|nu| pcat.morphism_name(thread.component_mor(nu))).collect();
        assert_eq!(names, ["b03", "b13", "b23", "id_D3"]);
    }

    #[test]
    fn pointed_sequence_agrees_on_both_sides() {
        let (t, spec, exp) = pointed_sequence();
        let report = theorem_check(&t, &spec, exp.apex, &exp).unwrap();
        assert_eq!(report.equivalence, Equivalence::Consistent { holds: true });
        assert!(report.transports_verified());
        assert_eq!(report.comma.category.object_count(), 2);
        assert_eq!(report.comma.category.morphism_count(), 8);
        assert_eq!(report.system_side.as_ref().unwrap().threads.len(), 1);

        let pcat = &exp.restriction.category;
        let thread = report.threads_from_comma[&1].as_ref().unwrap();
        assert_eq!(thread.m, 2);
        for nu in 1..=5 {
            assert_eq!(pcat.morphism_name(thread.component_mor(nu)), "const_a");
        }

        let pt_a = report.comma.object_for(t.morphism("pt_a").unwrap()).unwrap();
        let pt_b = report.comma.object_for(t.morphism("pt_b").unwrap()).unwrap();
        let witness = report.witnesses_from_system[&pt_b].as_ref().unwrap();
        assert_eq!(witness.0.mover, pt_a);
    }

    #[test]
    fn two_phase_sequence_agrees_on_both_sides() {
        let (t, spec, exp) = sequence_over_points(&["const_a", "swap"], &["pt_a", "pt_b"]);
        assert!(exp.validate().is_empty());
        let report = theorem_check(&t, &spec, exp.apex, &exp).unwrap();
        assert_eq!(report.equivalence, Equivalence::Consistent { holds: true });
        assert!(report.transports_verified());
        assert_eq!(report.threads_from_comma.len(), 2);
    }

    #[test]
    fn star_fallback_survives_an_empty_thread_family() {
        let (t, spec, exp) = pointed_sequence();
        let comma = comma_category(&t, &spec, exp.apex).unwrap();
        let empty = SystemUniformWitness { threads: vec![] };
        for f in comma.category.objects() {
            let witness = system_to_comma_witness(&exp, &comma, &empty, f).unwrap();
            assert!(verify_uniform_witness(&comma.category, &witness).is_empty());
        }
    }

    #[test]
    fn threads_round_trip_through_the_comma_side() {
        let (t, spec, exp) = pointed_sequence();
        let report = theorem_check(&t, &spec, exp.apex, &exp).unwrap();
        let threads = SystemUniformWitness {
            threads: report
                .threads_from_comma
                .values()
                .map(|r| r.as_ref().unwrap().clone())
                .collect(),
        };
        for f in report.comma.category.objects() {
            let witness = system_to_comma_witness(&exp, &report.comma, &threads, f).unwrap();
            assert!(verify_uniform_witness(&report.comma.category, &witness).is_empty());
        }
    }

    #[test]
    fn apex_mismatch_is_refused() {
        let (t, spec, exp) = two_chain();
        let err = theorem_check(&t, &spec, t.object("P1").unwrap(), &exp).unwrap_err();
        assert!(err.problems[0].contains("apex"));
    }

    #[test]
    fn foreign_subcategory_is_refused() {
        let (t, _, exp) = two_chain();
        let narrow = full_spec(&t, "narrow", &["P1"]);
        let err = theorem_check(&t, &narrow, exp.apex, &exp).unwrap_err();
        assert!(err.problems[0].contains("subcategory"));
    }

    #[test]
    fn unequalized_pair_is_refused() {
        let (t, spec, exp) = sequence_over_points(&["id_s2"], &["pt_a"]);
        let err = theorem_check(&t, &spec, exp.apex, &exp).unwrap_err();
        assert!(err.problems.iter().any(|p| p.contains("never equalized")));
    }

    #[test]
    fn arithmetic_systems_have_no_bridge() {
        let (t, spec, mut exp) = singleton();
        exp.system = System::Divisibility(DivisibilitySequence { prefix: vec![], cycle: vec![2] });
        let err = theorem_check(&t, &spec, exp.apex, &exp).unwrap_err();
        assert!(err.problems.iter().any(|p| p.contains("categorical")));
    }

    #[test]
    fn corollary_requires_a_sequence() {
        let (t, spec, exp) = two_chain();
        let err = corollary_sequence_check(&t, &spec, exp.apex, &exp).unwrap_err();
        assert!(err.problems[0].contains("sequence"));
    }

    #[test]
    fn corollary_readings_agree_on_the_pointed_sequence() {
        let (t, spec, exp) = pointed_sequence();
        let report = corollary_sequence_check(&t, &spec, exp.apex, &exp).unwrap();
        assert!(report.agrees());
        assert!(report.movable.holds());
        assert!(report.uniform.holds());
        assert_eq!(report.movable.witnesses.len(), 2);
    }

    #[test]
    fn transported_witness_must_target_the_leg() {
        let (t, spec, exp) = pointed_sequence();
        let comma = comma_category(&t, &spec, exp.apex).unwrap();
        let pt_b = comma.object_for(t.morphism("pt_b").unwrap()).unwrap();
        let wrong = decide_category_uniform(&comma.category).witnesses[&pt_b].clone();
        let err = comma_to_system_witness(&exp, &comma, 1, &wrong).unwrap_err();
        assert!(matches!(err, BridgeError::Malformed(m) if m.contains("witness targets")));
    }

    #[test]
    fn witness_missing_a_factor_is_malformed() {
        let (t, spec, exp) = pointed_sequence();
        let comma = comma_category(&t, &spec, exp.apex).unwrap();
        let pt_a = comma.object_for(t.morphism("pt_a").unwrap()).unwrap();
        let mut witness = decide_category_uniform(&comma.category).witnesses[&pt_a].clone();
        witness.0.factors.remove(&comma.category.identity(pt_a));
        let err = comma_to_system_witness(&exp, &comma, 1, &witness).unwrap_err();
        assert!(matches!(err, BridgeError::Malformed(m) if m.contains("no factor")));
    }
}

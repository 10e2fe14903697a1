//! Finite categories presented by explicit composition tables.
//!
//! A [`RawCategory`] is an untrusted description: object names, morphism
//! names with endpoints, an identity designation per object, and a table
//! of composites. [`FinCategory::validate`] checks the category laws and
//! produces the validated form every other module consumes. Composition
//! uses the "after" convention throughout: `compose(g, f)` is `g ∘ f`,
//! defined when `cod(f) = dom(g)`.
//!
//! Identifiers are strings; all enumeration orders are declaration order.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

/// Hard cap on morphisms per category. The dense composition table is
/// quadratic in this, so the cap keeps derived categories (products,
/// comma categories) from exhausting memory on adversarial input.
pub const MAX_MORPHISMS: usize = 2048;

const MISSING: u32 = u32::MAX;

/// Index of an object within its category, in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ObjId(pub(crate) u32);

/// Index of a morphism within its category, in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MorId(pub(crate) u32);

impl ObjId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl MorId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Unvalidated description of a finite category.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawCategory {
    pub name: String,
    pub objects: Vec<String>,
    pub morphisms: Vec<RawMorphism>,
    /// `(object, morphism)` pairs designating each object's identity.
    pub identities: Vec<(String, String)>,
    /// `(g, f, gf)` triples: the composite of `g` after `f` is `gf`.
    pub composites: Vec<(String, String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawMorphism {
    pub name: String,
    pub dom: String,
    pub cod: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    pub name: String,
    pub dom: ObjId,
    pub cod: ObjId,
}

/// A validated finite category.
///
/// Composition is total on composable pairs and the table has been
/// checked against the identity and associativity laws, so the accessors
/// here never re-check them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCategory {
    name: String,
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<MorId>,
    comp: Vec<u32>,
    hom_sets: Vec<Vec<MorId>>,
    into_obj: Vec<Vec<MorId>>,
}

/// A law the composition table failed, with the offending identifiers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LawViolation {
    /// No composite declared for a composable pair.
    MissingComposite { g: String, f: String },
    /// A composite declared for a pair that is not composable.
    SpuriousComposite { g: String, f: String },
    /// The declared composite has the wrong endpoints.
    CompositeEndpoints { g: String, f: String, gf: String },
    /// The designated identity of an object is not an endomorphism of it.
    IdentityEndpoints { object: String, id: String },
    /// `id ∘ f ≠ f` or `g ∘ id ≠ g`.
    IdentityLaw { id: String, other: String, got: String },
    /// `h ∘ (g ∘ f) ≠ (h ∘ g) ∘ f`.
    Associativity { h: String, g: String, f: String },
}

impl fmt::Display for LawViolation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LawViolation::MissingComposite { g, f } => {
                write!(out, "missing composite {g} . {f}")
            }
            LawViolation::SpuriousComposite { g, f } => {
                write!(out, "composite declared for non-composable pair {g} . {f}")
            }
            LawViolation::CompositeEndpoints { g, f, gf } => {
                write!(out, "composite {g} . {f} = {gf} has mismatched endpoints")
            }
            LawViolation::IdentityEndpoints { object, id } => {
                write!(out, "identity {id} of {object} is not an endomorphism of {object}")
            }
            LawViolation::IdentityLaw { id, other, got } => {
                write!(out, "identity law broken: composing {id} with {other} gives {got}")
            }
            LawViolation::Associativity { h, g, f } => {
                write!(out, "associativity broken at {h} . {g} . {f}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CatError {
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("reference to unknown identifier `{0}`")]
    DanglingReference(String),
    #[error("object `{0}` has no identity designated")]
    MissingIdentity(String),
    #[error("category laws violated:\n{}", render_violations(.0))]
    LawViolations(Vec<LawViolation>),
    #[error("morphisms `{g}` and `{f}` are not composable")]
    NotComposable { g: String, f: String },
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),
    #[error("`{name}` is not a subcategory:\n{}", render_subcat_violations(.violations))]
    NotASubcategory { name: String, violations: Vec<SubcatViolation> },
    #[error("composite of `{g}` after `{f}` declared twice with different results")]
    ConflictingComposite { g: String, f: String },
    #[error("a product needs at least one factor")]
    EmptyFactorList,
    #[error("category would have {0} morphisms, over the limit of {MAX_MORPHISMS}")]
    TooLarge(usize),
}

fn render_violations(violations: &[LawViolation]) -> String {
    let lines: Vec<String> = violations.iter().map(|v| format!("  - {v}")).collect();
    lines.join("\n")
}

fn render_subcat_violations(violations: &[SubcatViolation]) -> String {
    let lines: Vec<String> = violations.iter().map(|v| format!("  - {v}")).collect();
    lines.join("\n")
}

impl FinCategory {
    /// Validate a raw description.
    ///
    /// Identifier problems (duplicates, dangling references, missing
    /// identities) abort immediately; law problems are collected so the
    /// diagnostic lists every violated law at once.
    pub fn validate(raw: &RawCategory) -> Result<FinCategory, CatError> {
        if raw.morphisms.len() > MAX_MORPHISMS {
            return Err(CatError::TooLarge(raw.morphisms.len()));
        }

        let mut obj_index: HashMap<&str, ObjId> = HashMap::new();
        for (i, name) in raw.objects.iter().enumerate() {
            if obj_index.insert(name, ObjId(i as u32)).is_some() {
                return Err(CatError::DuplicateId(name.clone()));
            }
        }
        let mut mor_index: HashMap<&str, MorId> = HashMap::new();
        for (i, m) in raw.morphisms.iter().enumerate() {
            if obj_index.contains_key(m.name.as_str()) {
                return Err(CatError::DuplicateId(m.name.clone()));
            }
            if mor_index.insert(&m.name, MorId(i as u32)).is_some() {
                return Err(CatError::DuplicateId(m.name.clone()));
            }
        }

        let look_obj = |name: &str| -> Result<ObjId, CatError> {
            obj_index
                .get(name)
                .copied()
                .ok_or_else(|| CatError::DanglingReference(name.to_string()))
        };
        let look_mor = |name: &str| -> Result<MorId, CatError> {
            mor_index
                .get(name)
                .copied()
                .ok_or_else(|| CatError::DanglingReference(name.to_string()))
        };

        let morphisms: Vec<Morphism> = raw
            .morphisms
            .iter()
            .map(|m| {
                Ok(Morphism {
                    name: m.name.clone(),
                    dom: look_obj(&m.dom)?,
                    cod: look_obj(&m.cod)?,
                })
            })
            .collect::<Result<_, CatError>>()?;

        let mut identities: Vec<Option<MorId>> = vec![None; raw.objects.len()];
        for (obj, id) in &raw.identities {
            let o = look_obj(obj)?;
            let m = look_mor(id)?;
            if identities[o.index()].replace(m).is_some() {
                return Err(CatError::DuplicateId(format!("identity of {obj}")));
            }
        }
        let identities: Vec<MorId> = identities
            .into_iter()
            .enumerate()
            .map(|(i, id)| id.ok_or_else(|| CatError::MissingIdentity(raw.objects[i].clone())))
            .collect::<Result<_, CatError>>()?;

        let n = morphisms.len();
        let mut comp = vec![MISSING; n * n];
        for (g, f, gf) in &raw.composites {
            let gi = look_mor(g)?;
            let fi = look_mor(f)?;
            let gfi = look_mor(gf)?;
            let slot = &mut comp[gi.index() * n + fi.index()];
            if *slot != MISSING && *slot != gfi.0 {
                return Err(CatError::ConflictingComposite { g: g.clone(), f: f.clone() });
            }
            *slot = gfi.0;
        }

        let cat = FinCategory {
            name: raw.name.clone(),
            objects: raw.objects.clone(),
            morphisms,
            identities,
            comp,
            hom_sets: Vec::new(),
            into_obj: Vec::new(),
        };
        let violations = cat.law_violations();
        if !violations.is_empty() {
            return Err(CatError::LawViolations(violations));
        }
        Ok(cat.with_caches())
    }

    /// Every law violation in the composition table, in a deterministic
    /// order: table shape first, then identities, then associativity.
    fn law_violations(&self) -> Vec<LawViolation> {
        let n = self.morphisms.len();
        let mut out = Vec::new();
        let name = |m: MorId| self.morphisms[m.index()].name.clone();

        for g in 0..n {
            for f in 0..n {
                let composable = self.morphisms[f].cod == self.morphisms[g].dom;
                let entry = self.comp[g * n + f];
                match (composable, entry) {
                    (true, MISSING) => out.push(LawViolation::MissingComposite {
                        g: name(MorId(g as u32)),
                        f: name(MorId(f as u32)),
                    }),
                    (false, e) if e != MISSING => out.push(LawViolation::SpuriousComposite {
                        g: name(MorId(g as u32)),
                        f: name(MorId(f as u32)),
                    }),
                    (true, e) => {
                        let gf = &self.morphisms[e as usize];
                        if gf.dom != self.morphisms[f].dom || gf.cod != self.morphisms[g].cod {
                            out.push(LawViolation::CompositeEndpoints {
                                g: name(MorId(g as u32)),
                                f: name(MorId(f as u32)),
                                gf: gf.name.clone(),
                            });
                        }
                    }
                    _ => {}
                }
            }
        }

        for (o, &id) in self.identities.iter().enumerate() {
            let idm = &self.morphisms[id.index()];
            if idm.dom.index() != o || idm.cod.index() != o {
                out.push(LawViolation::IdentityEndpoints {
                    object: self.objects[o].clone(),
                    id: idm.name.clone(),
                });
                continue;
            }
            for f in 0..n {
                if self.morphisms[f].cod.index() == o {
                    if let Some(got) = self.raw_compose(id.index(), f) {
                        if got != f {
                            out.push(LawViolation::IdentityLaw {
                                id: idm.name.clone(),
                                other: name(MorId(f as u32)),
                                got: name(MorId(got as u32)),
                            });
                        }
                    }
                }
                if self.morphisms[f].dom.index() == o {
                    if let Some(got) = self.raw_compose(f, id.index()) {
                        if got != f {
                            out.push(LawViolation::IdentityLaw {
                                id: idm.name.clone(),
                                other: name(MorId(f as u32)),
                                got: name(MorId(got as u32)),
                            });
                        }
                    }
                }
            }
        }

        for h in 0..n {
            for g in 0..n {
                let Some(hg) = self.raw_compose(h, g) else { continue };
                for f in 0..n {
                    let Some(gf) = self.raw_compose(g, f) else { continue };
                    let left = self.raw_compose(h, gf);
                    let right = self.raw_compose(hg, f);
                    if let (Some(l), Some(r)) = (left, right) {
                        if l != r {
                            out.push(LawViolation::Associativity {
                                h: name(MorId(h as u32)),
                                g: name(MorId(g as u32)),
                                f: name(MorId(f as u32)),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    fn raw_compose(&self, g: usize, f: usize) -> Option<usize> {
        let e = self.comp[g * self.morphisms.len() + f];
        (e != MISSING).then_some(e as usize)
    }

    fn with_caches(mut self) -> FinCategory {
        let n_obj = self.objects.len();
        let mut hom_sets = vec![Vec::new(); n_obj * n_obj];
        let mut into_obj = vec![Vec::new(); n_obj];
        for (i, m) in self.morphisms.iter().enumerate() {
            hom_sets[m.dom.index() * n_obj + m.cod.index()].push(MorId(i as u32));
            into_obj[m.cod.index()].push(MorId(i as u32));
        }
        self.hom_sets = hom_sets;
        self.into_obj = into_obj;
        self
    }

    /// Construct directly from validated parts. Used by the derived
    /// constructions (dual, product, restriction, comma category) whose
    /// output is a category by construction; debug builds re-check.
    pub(crate) fn from_parts(
        name: String,
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<MorId>,
        comp: Vec<u32>,
    ) -> FinCategory {
        let cat = FinCategory {
            name,
            objects,
            morphisms,
            identities,
            comp,
            hom_sets: Vec::new(),
            into_obj: Vec::new(),
        };
        debug_assert!(cat.law_violations().is_empty());
        cat.with_caches()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> {
        (0..self.objects.len() as u32).map(ObjId)
    }

    pub fn morphisms(&self) -> impl Iterator<Item = MorId> {
        (0..self.morphisms.len() as u32).map(MorId)
    }

    pub fn object_name(&self, o: ObjId) -> &str {
        &self.objects[o.index()]
    }

    pub fn morphism_name(&self, m: MorId) -> &str {
        &self.morphisms[m.index()].name
    }

    pub fn object(&self, name: &str) -> Result<ObjId, CatError> {
        self.objects
            .iter()
            .position(|o| o == name)
            .map(|i| ObjId(i as u32))
            .ok_or_else(|| CatError::UnknownObject(name.to_string()))
    }

    pub fn morphism(&self, name: &str) -> Result<MorId, CatError> {
        self.morphisms
            .iter()
            .position(|m| m.name == name)
            .map(|i| MorId(i as u32))
            .ok_or_else(|| CatError::UnknownMorphism(name.to_string()))
    }

    pub fn dom(&self, m: MorId) -> ObjId {
        self.morphisms[m.index()].dom
    }

    pub fn cod(&self, m: MorId) -> ObjId {
        self.morphisms[m.index()].cod
    }

    pub fn identity(&self, o: ObjId) -> MorId {
        self.identities[o.index()]
    }

    pub fn is_identity(&self, m: MorId) -> bool {
        self.identities[self.morphisms[m.index()].dom.index()] == m
            && self.morphisms[m.index()].dom == self.morphisms[m.index()].cod
    }

    /// `g ∘ f`, if `cod(f) = dom(g)`.
    pub fn compose_opt(&self, g: MorId, f: MorId) -> Option<MorId> {
        let e = self.comp[g.index() * self.morphisms.len() + f.index()];
        (e != MISSING).then_some(MorId(e))
    }

    /// `g ∘ f`, with a diagnostic error on non-composable pairs.
    pub fn compose(&self, g: MorId, f: MorId) -> Result<MorId, CatError> {
        self.compose_opt(g, f).ok_or_else(|| CatError::NotComposable {
            g: self.morphism_name(g).to_string(),
            f: self.morphism_name(f).to_string(),
        })
    }

    /// All morphisms `a → b`, in declaration order.
    pub fn hom(&self, a: ObjId, b: ObjId) -> &[MorId] {
        &self.hom_sets[a.index() * self.objects.len() + b.index()]
    }

    /// All morphisms with codomain `x`, in declaration order.
    pub fn morphisms_into(&self, x: ObjId) -> &[MorId] {
        &self.into_obj[x.index()]
    }

    /// The opposite category: endpoints swapped, composition reversed,
    /// object and morphism names kept.
    pub fn dual(&self) -> FinCategory {
        let n = self.morphisms.len();
        let morphisms = self
            .morphisms
            .iter()
            .map(|m| Morphism {
                name: m.name.clone(),
                dom: m.cod,
                cod: m.dom,
            })
            .collect();
        let mut comp = vec![MISSING; n * n];
        for g in 0..n {
            for f in 0..n {
                comp[g * n + f] = self.comp[f * n + g];
            }
        }
        FinCategory::from_parts(
            format!("{}_op", self.name),
            self.objects.clone(),
            morphisms,
            self.identities.clone(),
            comp,
        )
    }

    /// The raw description this category validates from again; useful for
    /// printing and for tests that re-run validation on derived tables.
    pub fn to_raw(&self) -> RawCategory {
        let n = self.morphisms.len();
        let mut composites = Vec::new();
        for g in 0..n {
            for f in 0..n {
                if let Some(gf) = self.raw_compose(g, f) {
                    composites.push((
                        self.morphisms[g].name.clone(),
                        self.morphisms[f].name.clone(),
                        self.morphisms[gf].name.clone(),
                    ));
                }
            }
        }
        RawCategory {
            name: self.name.clone(),
            objects: self.objects.clone(),
            morphisms: self
                .morphisms
                .iter()
                .map(|m| RawMorphism {
                    name: m.name.clone(),
                    dom: self.objects[m.dom.index()].clone(),
                    cod: self.objects[m.cod.index()].clone(),
                })
                .collect(),
            identities: self
                .identities
                .iter()
                .enumerate()
                .map(|(o, id)| (self.objects[o].clone(), self.morphisms[id.index()].name.clone()))
                .collect(),
            composites,
        }
    }
}

// ---------------------------------------------------------------------
// Functors and natural transformations
// ---------------------------------------------------------------------

/// A functor given by its object and morphism tables, indexed by the
/// source category's declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Functor {
    pub object_map: Vec<ObjId>,
    pub morphism_map: Vec<MorId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FunctorViolation {
    WrongShape,
    /// The image of a morphism does not run between the images of its
    /// endpoints.
    Endpoints { morphism: String },
    IdentityNotPreserved { object: String },
    CompositionNotPreserved { g: String, f: String },
}

impl fmt::Display for FunctorViolation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctorViolation::WrongShape => write!(out, "map tables have the wrong length"),
            FunctorViolation::Endpoints { morphism } => {
                write!(out, "image of {morphism} has the wrong endpoints")
            }
            FunctorViolation::IdentityNotPreserved { object } => {
                write!(out, "identity of {object} not preserved")
            }
            FunctorViolation::CompositionNotPreserved { g, f } => {
                write!(out, "composition not preserved at {g} . {f}")
            }
        }
    }
}

impl Functor {
    pub fn identity(cat: &FinCategory) -> Functor {
        Functor {
            object_map: cat.objects().collect(),
            morphism_map: cat.morphisms().collect(),
        }
    }

    pub fn apply_obj(&self, o: ObjId) -> ObjId {
        self.object_map[o.index()]
    }

    pub fn apply_mor(&self, m: MorId) -> MorId {
        self.morphism_map[m.index()]
    }

    /// `other ∘ self`: apply `self` first.
    pub fn then(&self, other: &Functor) -> Functor {
        Functor {
            object_map: self.object_map.iter().map(|&o| other.apply_obj(o)).collect(),
            morphism_map: self.morphism_map.iter().map(|&m| other.apply_mor(m)).collect(),
        }
    }
}

/// Check functoriality of `f: src → dst`, collecting every violation.
pub fn validate_functor(src: &FinCategory, dst: &FinCategory, f: &Functor) -> Vec<FunctorViolation> {
    if f.object_map.len() != src.object_count() || f.morphism_map.len() != src.morphism_count() {
        return vec![FunctorViolation::WrongShape];
    }
    if f.object_map.iter().any(|o| o.index() >= dst.object_count())
        || f.morphism_map.iter().any(|m| m.index() >= dst.morphism_count())
    {
        return vec![FunctorViolation::WrongShape];
    }
    let mut out = Vec::new();
    for m in src.morphisms() {
        let fm = f.apply_mor(m);
        if dst.dom(fm) != f.apply_obj(src.dom(m)) || dst.cod(fm) != f.apply_obj(src.cod(m)) {
            out.push(FunctorViolation::Endpoints {
                morphism: src.morphism_name(m).to_string(),
            });
        }
    }
    for o in src.objects() {
        if f.apply_mor(src.identity(o)) != dst.identity(f.apply_obj(o)) {
            out.push(FunctorViolation::IdentityNotPreserved {
                object: src.object_name(o).to_string(),
            });
        }
    }
    for g in src.morphisms() {
        for fm in src.morphisms() {
            if let Some(gf) = src.compose_opt(g, fm) {
                let lhs = dst.compose_opt(f.apply_mor(g), f.apply_mor(fm));
                if lhs != Some(f.apply_mor(gf)) {
                    out.push(FunctorViolation::CompositionNotPreserved {
                        g: src.morphism_name(g).to_string(),
                        f: src.morphism_name(fm).to_string(),
                    });
                }
            }
        }
    }
    out
}

/// A natural transformation given by its component at each source object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NatTrans {
    pub components: Vec<MorId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum NatTransViolation {
    WrongShape,
    /// Component at an object does not run `F(x) → G(x)`.
    ComponentEndpoints { object: String },
    /// The naturality square at a morphism does not commute.
    Naturality { morphism: String },
}

impl fmt::Display for NatTransViolation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NatTransViolation::WrongShape => write!(out, "component table has the wrong length"),
            NatTransViolation::ComponentEndpoints { object } => {
                write!(out, "component at {object} has the wrong endpoints")
            }
            NatTransViolation::Naturality { morphism } => {
                write!(out, "naturality square at {morphism} does not commute")
            }
        }
    }
}

/// Check naturality of `t: f ⇒ g` for functors `f, g: src → dst`.
pub fn validate_nat_trans(
    src: &FinCategory,
    dst: &FinCategory,
    f: &Functor,
    g: &Functor,
    t: &NatTrans,
) -> Vec<NatTransViolation> {
    if t.components.len() != src.object_count()
        || t.components.iter().any(|m| m.index() >= dst.morphism_count())
    {
        return vec![NatTransViolation::WrongShape];
    }
    let mut out = Vec::new();
    for o in src.objects() {
        let c = t.components[o.index()];
        if dst.dom(c) != f.apply_obj(o) || dst.cod(c) != g.apply_obj(o) {
            out.push(NatTransViolation::ComponentEndpoints {
                object: src.object_name(o).to_string(),
            });
        }
    }
    if !out.is_empty() {
        return out;
    }
    for m in src.morphisms() {
        let left = dst.compose_opt(t.components[src.cod(m).index()], f.apply_mor(m));
        let right = dst.compose_opt(g.apply_mor(m), t.components[src.dom(m).index()]);
        if left.is_none() || left != right {
            out.push(NatTransViolation::Naturality {
                morphism: src.morphism_name(m).to_string(),
            });
        }
    }
    out
}

// ---------------------------------------------------------------------
// Subcategories
// ---------------------------------------------------------------------

/// A choice of objects and morphisms inside an ambient category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubcategorySpec {
    pub name: String,
    pub objects: Vec<ObjId>,
    pub morphisms: Vec<MorId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubcatViolation {
    /// A selected morphism has an endpoint outside the selected objects.
    Endpoints { morphism: String },
    /// A selected object's identity is not selected.
    MissingIdentity { object: String },
    /// The composite of two selected morphisms is not selected.
    NotClosed { g: String, f: String, gf: String },
}

impl fmt::Display for SubcatViolation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubcatViolation::Endpoints { morphism } => {
                write!(out, "morphism {morphism} has an endpoint outside the subcategory")
            }
            SubcatViolation::MissingIdentity { object } => {
                write!(out, "identity of {object} missing from the subcategory")
            }
            SubcatViolation::NotClosed { g, f, gf } => {
                write!(out, "not closed under composition: {g} . {f} = {gf} is missing")
            }
        }
    }
}

impl SubcategorySpec {
    /// Deduplicate and sort into declaration order.
    pub fn new(name: String, mut objects: Vec<ObjId>, mut morphisms: Vec<MorId>) -> SubcategorySpec {
        objects.sort();
        objects.dedup();
        morphisms.sort();
        morphisms.dedup();
        SubcategorySpec { name, objects, morphisms }
    }

    /// The full subcategory on a set of objects.
    pub fn full(cat: &FinCategory, name: String, objects: Vec<ObjId>) -> SubcategorySpec {
        let mut objs = objects;
        objs.sort();
        objs.dedup();
        let morphisms = cat
            .morphisms()
            .filter(|&m| objs.contains(&cat.dom(m)) && objs.contains(&cat.cod(m)))
            .collect();
        SubcategorySpec { name, objects: objs, morphisms }
    }

    pub fn contains_obj(&self, o: ObjId) -> bool {
        self.objects.binary_search(&o).is_ok()
    }

    pub fn contains_mor(&self, m: MorId) -> bool {
        self.morphisms.binary_search(&m).is_ok()
    }
}

/// Check that a spec carves out an honest subcategory: endpoints and
/// identities present, composition closed.
pub fn is_subcategory(cat: &FinCategory, spec: &SubcategorySpec) -> Vec<SubcatViolation> {
    let mut out = Vec::new();
    for &m in &spec.morphisms {
        if !spec.contains_obj(cat.dom(m)) || !spec.contains_obj(cat.cod(m)) {
            out.push(SubcatViolation::Endpoints {
                morphism: cat.morphism_name(m).to_string(),
            });
        }
    }
    for &o in &spec.objects {
        if !spec.contains_mor(cat.identity(o)) {
            out.push(SubcatViolation::MissingIdentity {
                object: cat.object_name(o).to_string(),
            });
        }
    }
    for &g in &spec.morphisms {
        for &f in &spec.morphisms {
            if let Some(gf) = cat.compose_opt(g, f) {
                if !spec.contains_mor(gf) {
                    out.push(SubcatViolation::NotClosed {
                        g: cat.morphism_name(g).to_string(),
                        f: cat.morphism_name(f).to_string(),
                        gf: cat.morphism_name(gf).to_string(),
                    });
                }
            }
        }
    }
    out
}

/// A subcategory packaged as a category of its own, with translation
/// tables back into the ambient category. Names are shared with the
/// ambient category, so translation is also possible by name.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub category: FinCategory,
    pub obj_to_ambient: Vec<ObjId>,
    pub mor_to_ambient: Vec<MorId>,
}

impl Restriction {
    pub fn ambient_obj(&self, o: ObjId) -> ObjId {
        self.obj_to_ambient[o.index()]
    }

    pub fn ambient_mor(&self, m: MorId) -> MorId {
        self.mor_to_ambient[m.index()]
    }

    pub fn from_ambient_obj(&self, o: ObjId) -> Option<ObjId> {
        self.obj_to_ambient
            .iter()
            .position(|&a| a == o)
            .map(|i| ObjId(i as u32))
    }

    pub fn from_ambient_mor(&self, m: MorId) -> Option<MorId> {
        self.mor_to_ambient
            .iter()
            .position(|&a| a == m)
            .map(|i| MorId(i as u32))
    }
}

/// Package a valid subcategory spec as a standalone category.
pub fn restrict(cat: &FinCategory, spec: &SubcategorySpec) -> Result<Restriction, CatError> {
    let violations = is_subcategory(cat, spec);
    if !violations.is_empty() {
        return Err(CatError::NotASubcategory {
            name: spec.name.clone(),
            violations,
        });
    }
    let objects: Vec<String> = spec
        .objects
        .iter()
        .map(|&o| cat.object_name(o).to_string())
        .collect();
    let mor_pos = |m: MorId| spec.morphisms.binary_search(&m).expect("closed") as u32;
    let obj_pos = |o: ObjId| spec.objects.binary_search(&o).expect("closed") as u32;
    let morphisms: Vec<Morphism> = spec
        .morphisms
        .iter()
        .map(|&m| Morphism {
            name: cat.morphism_name(m).to_string(),
            dom: ObjId(obj_pos(cat.dom(m))),
            cod: ObjId(obj_pos(cat.cod(m))),
        })
        .collect();
    let identities: Vec<MorId> = spec
        .objects
        .iter()
        .map(|&o| MorId(mor_pos(cat.identity(o))))
        .collect();
    let n = morphisms.len();
    let mut comp = vec![MISSING; n * n];
    for (gi, &g) in spec.morphisms.iter().enumerate() {
        for (fi, &f) in spec.morphisms.iter().enumerate() {
            if let Some(gf) = cat.compose_opt(g, f) {
                comp[gi * n + fi] = mor_pos(gf);
            }
        }
    }
    Ok(Restriction {
        category: FinCategory::from_parts(
            spec.name.clone(),
            objects,
            morphisms,
            identities,
            comp,
        ),
        obj_to_ambient: spec.objects.clone(),
        mor_to_ambient: spec.morphisms.clone(),
    })
}

// ---------------------------------------------------------------------
// Products
// ---------------------------------------------------------------------

/// A finite product of categories with its projection functors and the
/// tuple indexing used to name components.
#[derive(Debug, Clone)]
pub struct Product {
    pub category: FinCategory,
    pub projections: Vec<Functor>,
    pub factors: Vec<FinCategory>,
    obj_strides: Vec<usize>,
    mor_strides: Vec<usize>,
}

impl Product {
    /// The product object with the given component in each factor.
    pub fn object_tuple(&self, parts: &[ObjId]) -> ObjId {
        let mut ix = 0;
        for (i, o) in parts.iter().enumerate() {
            ix += o.index() * self.obj_strides[i];
        }
        ObjId(ix as u32)
    }

    /// The product morphism with the given component in each factor.
    pub fn morphism_tuple(&self, parts: &[MorId]) -> MorId {
        let mut ix = 0;
        for (i, m) in parts.iter().enumerate() {
            ix += m.index() * self.mor_strides[i];
        }
        MorId(ix as u32)
    }

    pub fn object_parts(&self, o: ObjId) -> Vec<ObjId> {
        let mut ix = o.index();
        self.obj_strides
            .iter()
            .map(|&s| {
                let part = ix / s;
                ix %= s;
                ObjId(part as u32)
            })
            .collect()
    }

    pub fn morphism_parts(&self, m: MorId) -> Vec<MorId> {
        let mut ix = m.index();
        self.mor_strides
            .iter()
            .map(|&s| {
                let part = ix / s;
                ix %= s;
                MorId(part as u32)
            })
            .collect()
    }
}

/// Form the product category. Objects and morphisms are tuples ordered
/// lexicographically by factor; composition is componentwise.
pub fn product(factors: &[&FinCategory]) -> Result<Product, CatError> {
    if factors.is_empty() {
        return Err(CatError::EmptyFactorList);
    }
    let mor_total: usize = factors.iter().map(|c| c.morphism_count()).product();
    if mor_total > MAX_MORPHISMS {
        return Err(CatError::TooLarge(mor_total));
    }
    let obj_total: usize = factors.iter().map(|c| c.object_count()).product();

    let k = factors.len();
    let mut obj_strides = vec![1usize; k];
    let mut mor_strides = vec![1usize; k];
    for i in (0..k.saturating_sub(1)).rev() {
        obj_strides[i] = obj_strides[i + 1] * factors[i + 1].object_count();
        mor_strides[i] = mor_strides[i + 1] * factors[i + 1].morphism_count();
    }

    let tuple_name = |parts: &[&str]| -> String {
        if parts.len() == 1 {
            parts[0].to_string()
        } else {
            parts.join("*")
        }
    };

    let mut objects = Vec::with_capacity(obj_total);
    for ix in 0..obj_total {
        let mut rem = ix;
        let parts: Vec<&str> = (0..k)
            .map(|i| {
                let p = rem / obj_strides[i];
                rem %= obj_strides[i];
                factors[i].object_name(ObjId(p as u32))
            })
            .collect();
        objects.push(tuple_name(&parts));
    }

    let mut morphisms = Vec::with_capacity(mor_total);
    for ix in 0..mor_total {
        let mut rem = ix;
        let mut dom = 0usize;
        let mut cod = 0usize;
        let mut parts = Vec::with_capacity(k);
        for i in 0..k {
            let p = MorId((rem / mor_strides[i]) as u32);
            rem %= mor_strides[i];
            dom += factors[i].dom(p).index() * obj_strides[i];
            cod += factors[i].cod(p).index() * obj_strides[i];
            parts.push(factors[i].morphism_name(p));
        }
        morphisms.push(Morphism {
            name: tuple_name(&parts),
            dom: ObjId(dom as u32),
            cod: ObjId(cod as u32),
        });
    }

    let mut identities = Vec::with_capacity(obj_total);
    for ix in 0..obj_total {
        let mut rem = ix;
        let mut id_ix = 0usize;
        for i in 0..k {
            let p = ObjId((rem / obj_strides[i]) as u32);
            rem %= obj_strides[i];
            id_ix += factors[i].identity(p).index() * mor_strides[i];
        }
        identities.push(MorId(id_ix as u32));
    }

    let mut comp = vec![MISSING; mor_total * mor_total];
    for g in 0..mor_total {
        'pair: for f in 0..mor_total {
            let mut out = 0usize;
            let mut rem_g = g;
            let mut rem_f = f;
            for i in 0..k {
                let gp = MorId((rem_g / mor_strides[i]) as u32);
                let fp = MorId((rem_f / mor_strides[i]) as u32);
                rem_g %= mor_strides[i];
                rem_f %= mor_strides[i];
                match factors[i].compose_opt(gp, fp) {
                    Some(c) => out += c.index() * mor_strides[i],
                    None => continue 'pair,
                }
            }
            comp[g * mor_total + f] = out as u32;
        }
    }

    let name = if k == 1 {
        format!("{}_x", factors[0].name())
    } else {
        factors.iter().map(|c| c.name()).collect::<Vec<_>>().join("_x_")
    };
    let category = FinCategory::from_parts(name, objects, morphisms, identities, comp);

    let projections = (0..k)
        .map(|i| {
            let object_map = (0..obj_total)
                .map(|ix| ObjId(((ix / obj_strides[i]) % factors[i].object_count().max(1)) as u32))
                .collect();
            let morphism_map = (0..mor_total)
                .map(|ix| MorId(((ix / mor_strides[i]) % factors[i].morphism_count().max(1)) as u32))
                .collect();
            Functor { object_map, morphism_map }
        })
        .collect();

    Ok(Product {
        category,
        projections,
        factors: factors.iter().map(|&c| c.clone()).collect(),
        obj_strides,
        mor_strides,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn tiny_raw() -> RawCategory {
        RawCategory {
            name: "one".into(),
            objects: vec!["a".into()],
            morphisms: vec![RawMorphism { name: "id_a".into(), dom: "a".into(), cod: "a".into() }],
            identities: vec![("a".into(), "id_a".into())],
            composites: vec![("id_a".into(), "id_a".into(), "id_a".into())],
        }
    }

    #[test]
    fn empty_category_is_valid() {
        let raw = RawCategory { name: "empty".into(), ..Default::default() };
        let cat = FinCategory::validate(&raw).unwrap();
        assert_eq!(cat.object_count(), 0);
        assert_eq!(cat.morphism_count(), 0);
    }

    #[test]
    fn one_object_one_morphism_is_valid() {
        let cat = FinCategory::validate(&tiny_raw()).unwrap();
        assert_eq!(cat.morphism_count(), 1);
        let id = cat.identity(ObjId(0));
        assert_eq!(cat.compose_opt(id, id), Some(id));
    }

    #[test]
    fn duplicate_identifier_rejected() {
        let mut raw = tiny_raw();
        raw.objects.push("a".into());
        assert!(matches!(FinCategory::validate(&raw), Err(CatError::DuplicateId(_))));
    }

    #[test]
    fn shared_object_and_morphism_name_rejected() {
        let mut raw = tiny_raw();
        raw.morphisms[0].name = "a".into();
        raw.identities[0].1 = "a".into();
        raw.composites = vec![("a".into(), "a".into(), "a".into())];
        assert!(matches!(FinCategory::validate(&raw), Err(CatError::DuplicateId(_))));
    }

    #[test]
    fn dangling_reference_rejected() {
        let mut raw = tiny_raw();
        raw.composites.push(("id_a".into(), "ghost".into(), "id_a".into()));
        assert!(matches!(FinCategory::validate(&raw), Err(CatError::DanglingReference(_))));
    }

    #[test]
    fn missing_composite_is_named() {
        let mut raw = tiny_raw();
        raw.composites.clear();
        match FinCategory::validate(&raw) {
            Err(CatError::LawViolations(v)) => {
                assert!(matches!(v[0], LawViolation::MissingComposite { .. }));
            }
            other => panic!("expected law violations, got {other:?}"),
        }
    }

    #[test]
    fn compose_error_names_both_morphisms() {
        let cat = fixtures::fix_b();
        let le01 = cat.morphism("le01").unwrap();
        let le02 = cat.morphism("le02").unwrap();
        let err = cat.compose(le01, le02).unwrap_err();
        assert_eq!(
            err.to_string(),
            "morphisms `le01` and `le02` are not composable"
        );
    }

    #[test]
    fn dual_is_an_involution() {
        let cat = fixtures::fix_a();
        let back = cat.dual().dual();
        assert_eq!(back.to_raw().composites, cat.to_raw().composites);
    }

    #[test]
    fn hom_partitions_morphisms() {
        let cat = fixtures::fix_a();
        let mut total = 0;
        for a in cat.objects() {
            for b in cat.objects() {
                total += cat.hom(a, b).len();
            }
        }
        assert_eq!(total, cat.morphism_count());
    }

    #[test]
    fn unary_product_relabels() {
        let cat = fixtures::fix_b();
        let prod = product(&[&cat]).unwrap();
        assert_eq!(prod.category.object_count(), cat.object_count());
        assert_eq!(prod.category.morphism_count(), cat.morphism_count());
        for g in cat.morphisms() {
            for f in cat.morphisms() {
                assert_eq!(prod.category.compose_opt(g, f), cat.compose_opt(g, f));
            }
        }
    }

    #[test]
    fn product_morphism_count_multiplies() {
        let a = fixtures::fix_a();
        let b = fixtures::fix_b();
        let prod = product(&[&a, &b]).unwrap();
        assert_eq!(prod.category.morphism_count(), 8 * 5);
        assert_eq!(prod.category.object_count(), 2 * 3);
    }

    #[test]
    fn full_subcategory_is_closed() {
        let cat = fixtures::fix_a();
        let s2 = cat.object("s2").unwrap();
        let spec = SubcategorySpec::full(&cat, "P".into(), vec![s2]);
        assert!(is_subcategory(&cat, &spec).is_empty());
        assert_eq!(spec.morphisms.len(), 4);
    }

    #[test]
    fn unclosed_selection_is_rejected() {
        let cat = fixtures::fix_a();
        let s2 = cat.object("s2").unwrap();
        let selection = SubcategorySpec::new(
            "bad".into(),
            vec![s2],
            vec![cat.morphism("id_s2").unwrap(), cat.morphism("swap").unwrap(), cat.morphism("const_a").unwrap()],
        );
        let violations = is_subcategory(&cat, &selection);
        assert!(violations
            .iter()
            .any(|v| matches!(v, SubcatViolation::NotClosed { .. })));
    }
}

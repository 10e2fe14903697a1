//! Seeded random inputs: categories, subcategory closures, systems,
//! and expansions, all drawn from a ChaCha8 stream so the same seed
//! reproduces the same structures byte for byte.
//!
//! Free categories come from freely completing a random acyclic
//! generator graph — every path is a distinct morphism, so the tables
//! satisfy the laws by construction. Dense graphs can blow past the
//! morphism cap; such draws are rejected and retried a bounded number
//! of times before [`GenError::SizeOverflow`]. Random posets serve as
//! the workhorse shape: they always fit and compose.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fincat::{
    restrict, FinCategory, MorId, ObjId, RawCategory, RawMorphism, SubcategorySpec,
};
use crate::prosys::{
    DirectedPreorder, DivisibilitySequence, Expansion, FiniteIndexSystem, Legs, PeriodicSequence,
    System,
};
use crate::workspace::{
    expansion_entry, fill_identity_composites, raw_of, subcategory_entry, system_entry,
    WorkspaceFile,
};

pub const MAX_OBJECTS: usize = 8;
pub const MAX_MORPHISMS: usize = 64;
const ATTEMPTS: usize = 64;

#[derive(Debug, Clone)]
pub struct GenOptions {
    pub objects: usize,
    pub morphisms: usize,
    pub density: f64,
}

impl Default for GenOptions {
    fn default() -> GenOptions {
        GenOptions { objects: 4, morphisms: 24, density: 0.3 }
    }
}

impl GenOptions {
    fn check(&self) -> Result<(), GenError> {
        if self.objects == 0 || self.objects > MAX_OBJECTS {
            return Err(GenError::BadSizes(format!(
                "objects must lie in 1..={MAX_OBJECTS}, got {}",
                self.objects
            )));
        }
        if self.morphisms < self.objects || self.morphisms > MAX_MORPHISMS {
            return Err(GenError::BadSizes(format!(
                "morphisms must lie in objects..={MAX_MORPHISMS}, got {}",
                self.morphisms
            )));
        }
        if !(0.0..=1.0).contains(&self.density) {
            return Err(GenError::BadSizes(format!("density must lie in 0..=1, got {}", self.density)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error("{0}")]
    BadSizes(String),
    #[error("free completion exceeded {limit} morphisms in all {attempts} attempts")]
    SizeOverflow { limit: usize, attempts: usize },
}

pub struct Generator {
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(seed: u64) -> Generator {
        Generator { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.rng.gen_range(0..items.len())]
    }

    /// Freely complete a random acyclic generator graph.
    pub fn category(&mut self, name: &str, opts: &GenOptions) -> Result<FinCategory, GenError> {
        opts.check()?;
        for _ in 0..ATTEMPTS {
            if let Some(raw) = self.free_attempt(name, opts) {
                let filled = fill_identity_composites(&raw);
                return Ok(FinCategory::validate(&filled)
                    .expect("freely completed tables satisfy the laws"));
            }
        }
        Err(GenError::SizeOverflow { limit: opts.morphisms, attempts: ATTEMPTS })
    }

    fn free_attempt(&mut self, name: &str, opts: &GenOptions) -> Option<RawCategory> {
        let n = opts.objects;
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.rng.gen_bool(opts.density) {
                    edges.push((i, j));
                }
                if self.rng.gen_bool(opts.density * opts.density) {
                    edges.push((i, j));
                }
            }
        }

        // Paths through the DAG, shortest first so every proper tail and
        // head of a registered path is registered before it.
        let mut paths: Vec<Vec<usize>> = edges.iter().enumerate().map(|(e, _)| vec![e]).collect();
        let mut frontier = paths.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for path in &frontier {
                let (_, mid) = edges[*path.last().unwrap()];
                for (e, &(from, _)) in edges.iter().enumerate() {
                    if from == mid {
                        let mut longer = path.clone();
                        longer.push(e);
                        next.push(longer);
                    }
                }
            }
            paths.extend(next.iter().cloned());
            if n + paths.len() > opts.morphisms {
                return None;
            }
            frontier = next;
        }

        let object = |i: usize| format!("o{i}");
        let edge_name = |e: usize| format!("a{e}");
        let path_name =
            |p: &[usize]| p.iter().map(|&e| edge_name(e)).collect::<Vec<_>>().join("_");

        let mut morphisms: Vec<RawMorphism> = (0..n)
            .map(|i| RawMorphism { name: format!("id_o{i}"), dom: object(i), cod: object(i) })
            .collect();
        let by_path: BTreeMap<Vec<usize>, String> =
            paths.iter().map(|p| (p.clone(), path_name(p))).collect();
        for path in &paths {
            let (dom, _) = edges[path[0]];
            let (_, cod) = edges[*path.last().unwrap()];
            morphisms.push(RawMorphism {
                name: path_name(path),
                dom: object(dom),
                cod: object(cod),
            });
        }

        let mut composites = Vec::new();
        for g in &paths {
            for f in &paths {
                let (g_dom, _) = edges[g[0]];
                let (_, f_cod) = edges[*f.last().unwrap()];
                if g_dom != f_cod {
                    continue;
                }
                let mut concat = f.clone();
                concat.extend(g);
                composites.push((
                    by_path[g].clone(),
                    by_path[f].clone(),
                    by_path[&concat].clone(),
                ));
            }
        }

        Some(RawCategory {
            name: name.to_string(),
            objects: (0..n).map(object).collect(),
            morphisms,
            identities: (0..n).map(|i| (object(i), format!("id_o{i}"))).collect(),
            composites,
        })
    }

    /// A random poset on `objects` elements, as a category: at most one
    /// morphism per ordered pair, so it always fits the caps.
    pub fn poset_category(&mut self, name: &str, objects: usize) -> Result<FinCategory, GenError> {
        if objects == 0 || objects > MAX_OBJECTS {
            return Err(GenError::BadSizes(format!(
                "objects must lie in 1..={MAX_OBJECTS}, got {objects}"
            )));
        }
        let n = objects;
        let mut le = vec![false; n * n];
        for i in 0..n {
            le[i * n + i] = true;
            for j in (i + 1)..n {
                if self.rng.gen_bool(0.4) {
                    le[i * n + j] = true;
                }
            }
        }
        for mid in 0..n {
            for a in 0..n {
                if le[a * n + mid] {
                    for b in 0..n {
                        if le[mid * n + b] {
                            le[a * n + b] = true;
                        }
                    }
                }
            }
        }

        let object = |i: usize| format!("p{i}");
        let arrow = |i: usize, j: usize| {
            if i == j {
                format!("id_p{i}")
            } else {
                format!("le_{i}_{j}")
            }
        };
        let mut morphisms = Vec::new();
        let mut identities = Vec::new();
        for i in 0..n {
            identities.push((object(i), arrow(i, i)));
        }
        for i in 0..n {
            for j in 0..n {
                if le[i * n + j] {
                    morphisms.push(RawMorphism { name: arrow(i, j), dom: object(i), cod: object(j) });
                }
            }
        }
        let mut composites = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i != j && j != k && le[i * n + j] && le[j * n + k] {
                        composites.push((arrow(j, k), arrow(i, j), arrow(i, k)));
                    }
                }
            }
        }
        let raw = RawCategory {
            name: name.to_string(),
            objects: (0..n).map(object).collect(),
            morphisms,
            identities,
            composites,
        };
        Ok(FinCategory::validate(&fill_identity_composites(&raw))
            .expect("poset tables satisfy the laws"))
    }

    /// The closure of a random morphism subset: composition-closed,
    /// with the identities of every touched object (at least one).
    pub fn subcategory(&mut self, cat: &FinCategory, name: &str) -> SubcategorySpec {
        let mut chosen: Vec<MorId> =
            cat.morphisms().filter(|_| self.rng.gen_bool(0.25)).collect();
        if chosen.is_empty() {
            let objects: Vec<ObjId> = cat.objects().collect();
            chosen.push(cat.identity(*self.pick(&objects)));
        }
        loop {
            let mut grew = false;
            let current = chosen.clone();
            for &g in &current {
                for &f in &current {
                    if let Some(gf) = cat.compose_opt(g, f) {
                        if !chosen.contains(&gf) {
                            chosen.push(gf);
                            grew = true;
                        }
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let mut objects = Vec::new();
        for &m in &chosen {
            objects.push(cat.dom(m));
            objects.push(cat.cod(m));
        }
        for &o in &objects {
            let id = cat.identity(o);
            if !chosen.contains(&id) {
                chosen.push(id);
            }
        }
        SubcategorySpec::new(name.to_string(), objects, chosen)
    }

    /// A random chain- or fan-shaped finite-index system.
    pub fn finite_system(&mut self, cat: &FinCategory) -> FiniteIndexSystem {
        if self.rng.gen_bool(0.5) {
            self.chain_system(cat)
        } else {
            self.fan_system(cat)
        }
    }

    /// Morphisms out of `x`, never empty thanks to the identity.
    fn arrows_from(&mut self, cat: &FinCategory, x: ObjId) -> Vec<MorId> {
        cat.morphisms().filter(|&m| cat.dom(m) == x).collect()
    }

    fn chain_system(&mut self, cat: &FinCategory) -> FiniteIndexSystem {
        let len = self.rng.gen_range(1..=4);
        let objects_all: Vec<ObjId> = cat.objects().collect();
        let mut deep = *self.pick(&objects_all);
        let mut objects = vec![deep];
        let mut steps: Vec<MorId> = Vec::new();
        for _ in 1..len {
            let arrows = self.arrows_from(cat, deep);
            let step = *self.pick(&arrows);
            steps.push(step);
            deep = cat.cod(step);
            objects.push(deep);
        }
        // The walk built X_top → … → X_0; index position i holds the
        // i-th object from the shallow end.
        objects.reverse();
        steps.reverse();
        let names = (0..len).map(|i| i.to_string()).collect();
        let pairs: Vec<(usize, usize)> = (1..len).map(|i| (i - 1, i)).collect();
        let index = DirectedPreorder::new(names, &pairs).expect("chain names are distinct");
        let mut bonds = BTreeMap::new();
        for a in 0..len {
            bonds.insert((a, a), cat.identity(objects[a]));
            let mut composite: Option<MorId> = None;
            for b in (a + 1)..len {
                let step = steps[b - 1];
                composite = Some(match composite {
                    None => step,
                    Some(done) => cat
                        .compose_opt(done, step)
                        .expect("chain steps compose"),
                });
                bonds.insert((a, b), composite.unwrap());
            }
        }
        FiniteIndexSystem { ambient: cat.clone(), index, objects, bonds }
    }

    fn fan_system(&mut self, cat: &FinCategory) -> FiniteIndexSystem {
        let leaves = self.rng.gen_range(1..=3);
        let objects_all: Vec<ObjId> = cat.objects().collect();
        let top = *self.pick(&objects_all);
        let mut names: Vec<String> = (0..leaves).map(|i| format!("l{i}")).collect();
        names.push("top".to_string());
        let pairs: Vec<(usize, usize)> = (0..leaves).map(|i| (i, leaves)).collect();
        let index = DirectedPreorder::new(names, &pairs).expect("fan names are distinct");
        let mut objects = Vec::new();
        let mut bonds = BTreeMap::new();
        for i in 0..leaves {
            let arrows = self.arrows_from(cat, top);
            let down = *self.pick(&arrows);
            objects.push(cat.cod(down));
            bonds.insert((i, leaves), down);
        }
        objects.push(top);
        for (i, &o) in objects.iter().enumerate() {
            bonds.insert((i, i), cat.identity(o));
        }
        FiniteIndexSystem { ambient: cat.clone(), index, objects, bonds }
    }

    /// A random eventually periodic sequence; falls back to a constant
    /// endomorphism cycle when random hom sets come up empty.
    pub fn periodic_sequence(&mut self, cat: &FinCategory) -> PeriodicSequence {
        let objects_all: Vec<ObjId> = cat.objects().collect();
        let c = self.rng.gen_range(1..=3);
        let mut cycle = None;
        for _ in 0..8 {
            let picks: Vec<ObjId> = (0..c).map(|_| *self.pick(&objects_all)).collect();
            let mut bonds = Vec::new();
            for j in 0..c {
                let hom = cat.hom(picks[(j + 1) % c], picks[j]);
                if hom.is_empty() {
                    bonds.clear();
                    break;
                }
                bonds.push(*self.pick(hom));
            }
            if bonds.len() == c {
                cycle = Some((picks, bonds));
                break;
            }
        }
        let (cycle_objects, cycle_bonds) = cycle.unwrap_or_else(|| {
            let x = *self.pick(&objects_all);
            let endos = cat.hom(x, x).to_vec();
            (vec![x], vec![*self.pick(&endos)])
        });

        let k = self.rng.gen_range(0..=2usize);
        let mut prefix_objects = vec![ObjId(0); k];
        let mut prefix_bonds = vec![MorId(0); k];
        let mut above = cycle_objects[0];
        for n in (1..=k).rev() {
            let arrows = self.arrows_from(cat, above);
            let step = *self.pick(&arrows);
            prefix_bonds[n - 1] = step;
            prefix_objects[n - 1] = cat.cod(step);
            above = cat.cod(step);
        }
        PeriodicSequence {
            ambient: cat.clone(),
            prefix_objects,
            prefix_bonds,
            cycle_objects,
            cycle_bonds,
        }
    }

    pub fn divisibility_sequence(&mut self) -> DivisibilitySequence {
        let k = self.rng.gen_range(0..=3);
        let c = self.rng.gen_range(1..=3);
        DivisibilitySequence {
            prefix: (0..k).map(|_| self.rng.gen_range(1..=4)).collect(),
            cycle: (0..c).map(|_| self.rng.gen_range(1..=4)).collect(),
        }
    }

    /// A shaped expansion over a random subcategory: the system lives in
    /// the restriction, legs descend from a top leg by the bonds, so the
    /// result always validates. The axioms are not enforced here — the
    /// checkers may still reject it.
    pub fn expansion(&mut self, cat: &FinCategory, name: &str) -> Option<(SubcategorySpec, Expansion)> {
        for _ in 0..8 {
            let spec = self.subcategory(cat, &format!("{name}-sub"));
            let restriction = restrict(cat, &spec).expect("closures are subcategories");
            let apex_all: Vec<ObjId> = cat.objects().collect();
            let apex = *self.pick(&apex_all);
            let system = self.finite_system(&restriction.category);
            let top = system.index.top().expect("chains and fans have a top");
            let top_ambient = restriction.ambient_obj(system.objects[top]);
            let hom = cat.hom(apex, top_ambient);
            if hom.is_empty() {
                continue;
            }
            let top_leg = *self.pick(hom);
            let mut legs = Vec::new();
            for at in 0..system.index.len() {
                let bond = restriction
                    .ambient_mor(system.bonds[&(at, top)]);
                legs.push(cat.compose_opt(bond, top_leg).expect("legs chain through the top"));
            }
            let exp = Expansion {
                ambient: cat.clone(),
                restriction,
                apex,
                system: System::Finite(system),
                legs: Legs::Total(legs),
            };
            debug_assert!(exp.validate().is_empty());
            return Some((spec, exp));
        }
        None
    }

    /// A periodic expansion when leg assignments exist: cycle legs must
    /// solve the cyclic compatibility equations, searched exhaustively
    /// over the (small) hom sets.
    pub fn periodic_expansion(
        &mut self,
        cat: &FinCategory,
        name: &str,
    ) -> Option<(SubcategorySpec, Expansion)> {
        for _ in 0..8 {
            let spec = self.subcategory(cat, &format!("{name}-sub"));
            let restriction = restrict(cat, &spec).expect("closures are subcategories");
            let seq = self.periodic_sequence(&restriction.category);
            let apex_all: Vec<ObjId> = cat.objects().collect();
            let apex = *self.pick(&apex_all);

            let k = seq.k();
            let c = seq.c();
            let to_ambient = |m: MorId| restriction.ambient_mor(m);
            // Solve the cycle first: legs q_j with step_j ∘ q_{j+1} = q_j
            // cyclically (indices mod c).
            let candidates: Vec<Vec<MorId>> = (0..c)
                .map(|j| cat.hom(apex, restriction.ambient_obj(seq.cycle_objects[j])).to_vec())
                .collect();
            let mut solution: Option<Vec<MorId>> = None;
            let mut assignment = vec![MorId(0); c];
            fn search(
                cat: &FinCategory,
                steps: &[MorId],
                candidates: &[Vec<MorId>],
                assignment: &mut Vec<MorId>,
                j: usize,
                solution: &mut Option<Vec<MorId>>,
            ) {
                if solution.is_some() {
                    return;
                }
                let c = candidates.len();
                if j == c {
                    for i in 0..c {
                        if cat.compose_opt(steps[i], assignment[(i + 1) % c])
                            != Some(assignment[i])
                        {
                            return;
                        }
                    }
                    *solution = Some(assignment.clone());
                    return;
                }
                for &q in &candidates[j] {
                    assignment[j] = q;
                    search(cat, steps, candidates, assignment, j + 1, solution);
                }
            }
            let steps: Vec<MorId> = seq.cycle_bonds.iter().map(|&b| to_ambient(b)).collect();
            search(cat, &steps, &candidates, &mut assignment, 0, &mut solution);
            let Some(cycle_legs) = solution else { continue };

            // Prefix legs ride the steps down from the cycle start.
            let mut prefix_legs = vec![MorId(0); k];
            let mut above = cycle_legs[0];
            for n in (1..=k).rev() {
                let step = to_ambient(seq.step_bond(n));
                above = cat.compose_opt(step, above).expect("prefix steps chain");
                prefix_legs[n - 1] = above;
            }
            let exp = Expansion {
                ambient: cat.clone(),
                restriction,
                apex,
                system: System::Periodic(seq),
                legs: Legs::Periodic { prefix: prefix_legs, cycle: cycle_legs },
            };
            debug_assert!(exp.validate().is_empty());
            return Some((spec, exp));
        }
        None
    }
}

/// The workspace the `gen` command emits: a free category, a poset, a
/// subcategory closure, one system of each kind, and an expansion over
/// the free category when one can be shaped. Same seed, same file.
pub fn gen_workspace(seed: u64, opts: &GenOptions) -> Result<WorkspaceFile, GenError> {
    let mut g = Generator::new(seed);
    let cat = g.category(&format!("G{seed}"), opts)?;
    let poset = g.poset_category(&format!("G{seed}-POSET"), opts.objects.min(5))?;
    let sub = g.subcategory(&cat, &format!("G{seed}-SUB"));
    let finite = g.finite_system(&cat);
    let periodic = g.periodic_sequence(&poset);
    let divisibility = g.divisibility_sequence();

    let mut ws = WorkspaceFile {
        categories: vec![raw_of(&cat), raw_of(&poset)],
        subcategories: vec![subcategory_entry(&cat, &sub)],
        systems: vec![
            system_entry(&format!("G{seed}-SYS"), cat.name(), &System::Finite(finite)),
            system_entry(&format!("G{seed}-SEQ"), poset.name(), &System::Periodic(periodic)),
            system_entry(&format!("G{seed}-DIV"), "", &System::Divisibility(divisibility)),
        ],
        ..Default::default()
    };
    if let Some((spec, exp)) = g.expansion(&cat, &format!("G{seed}-EXP")) {
        let sub_name = spec.name.clone();
        ws.subcategories.push(subcategory_entry(&cat, &spec));
        ws.systems.push(system_entry(&format!("G{seed}-EXP-SYS"), cat.name(), &exp.system));
        ws.expansions.push(expansion_entry(
            &format!("G{seed}-EXP"),
            &sub_name,
            &format!("G{seed}-EXP-SYS"),
            &exp,
        ));
    }
    if let Some((spec, exp)) = g.periodic_expansion(&poset, &format!("G{seed}-PEXP")) {
        let sub_name = spec.name.clone();
        ws.subcategories.push(subcategory_entry(&poset, &spec));
        ws.systems.push(system_entry(&format!("G{seed}-PEXP-SYS"), poset.name(), &exp.system));
        ws.expansions.push(expansion_entry(
            &format!("G{seed}-PEXP"),
            &sub_name,
            &format!("G{seed}-PEXP-SYS"),
            &exp,
        ));
    }
    Ok(ws)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prosys::{validate_system, Legs};
    use crate::workspace::{parse_workspace, print_workspace};

    #[test]
    fn the_same_seed_reproduces_the_same_workspace() {
        let opts = GenOptions::default();
        let a = gen_workspace(1, &opts).unwrap();
        let b = gen_workspace(1, &opts).unwrap();
        assert_eq!(print_workspace(&a), print_workspace(&b));
        let c = gen_workspace(2, &opts).unwrap();
        assert_ne!(print_workspace(&a), print_workspace(&c));
    }

    #[test]
    fn generated_workspaces_parse_and_build() {
        for seed in 0..20 {
            let ws = gen_workspace(seed, &GenOptions::default()).unwrap();
            let text = print_workspace(&ws);
            let reparsed = parse_workspace(&text).unwrap();
            assert_eq!(reparsed, ws, "seed {seed}");
            for raw in &ws.categories {
                reparsed.build_category(&raw.name).unwrap();
            }
            for sys in &ws.systems {
                let built = reparsed.build_system(&sys.name).unwrap();
                assert!(validate_system(&built).is_empty(), "seed {seed}, system {}", sys.name);
            }
            for exp in &ws.expansions {
                let built = reparsed.build_expansion(&exp.name).unwrap();
                assert!(built.validate().is_empty(), "seed {seed}");
            }
        }
    }

    #[test]
    fn free_categories_validate_across_many_seeds() {
        let opts = GenOptions::default();
        for seed in 0..500 {
            let mut g = Generator::new(seed);
            let cat = g.category("c", &opts).unwrap();
            assert!(cat.morphism_count() <= opts.morphisms, "seed {seed}");
        }
    }

    #[test]
    fn tight_caps_overflow_instead_of_spinning() {
        let mut g = Generator::new(7);
        let opts = GenOptions { objects: 8, morphisms: 8, density: 1.0 };
        assert_eq!(
            g.category("c", &opts),
            Err(GenError::SizeOverflow { limit: 8, attempts: ATTEMPTS })
        );
    }

    #[test]
    fn size_bounds_are_enforced() {
        let mut g = Generator::new(0);
        let too_many = GenOptions { objects: 9, ..GenOptions::default() };
        assert!(matches!(g.category("c", &too_many), Err(GenError::BadSizes(_))));
        let too_dense = GenOptions { density: 1.5, ..GenOptions::default() };
        assert!(matches!(g.category("c", &too_dense), Err(GenError::BadSizes(_))));
    }

    #[test]
    fn subcategory_closures_are_subcategories() {
        let opts = GenOptions::default();
        for seed in 0..50 {
            let mut g = Generator::new(seed);
            let cat = g.category("c", &opts).unwrap();
            let spec = g.subcategory(&cat, "s");
            assert!(
                crate::fincat::is_subcategory(&cat, &spec).is_empty(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn generated_systems_validate() {
        let opts = GenOptions::default();
        for seed in 0..50 {
            let mut g = Generator::new(seed);
            let cat = g.category("c", &opts).unwrap();
            let finite = System::Finite(g.finite_system(&cat));
            assert!(validate_system(&finite).is_empty(), "seed {seed}");
            let periodic = System::Periodic(g.periodic_sequence(&cat));
            assert!(validate_system(&periodic).is_empty(), "seed {seed}");
            let divisibility = System::Divisibility(g.divisibility_sequence());
            assert!(validate_system(&divisibility).is_empty(), "seed {seed}");
        }
    }

    #[test]
    fn shaped_expansions_validate_when_produced() {
        let opts = GenOptions::default();
        let mut produced = 0;
        for seed in 0..50 {
            let mut g = Generator::new(seed);
            let cat = g.category("c", &opts).unwrap();
            if let Some((_, exp)) = g.expansion(&cat, "e") {
                assert!(exp.validate().is_empty(), "seed {seed}");
                produced += 1;
            }
            if let Some((_, exp)) = g.periodic_expansion(&cat, "pe") {
                assert!(exp.validate().is_empty(), "seed {seed}");
                assert!(matches!(exp.legs, Legs::Periodic { .. }));
            }
        }
        assert!(produced > 25, "only {produced} of 50 seeds shaped an expansion");
    }
}

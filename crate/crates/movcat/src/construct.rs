//! Constructions on finite categories: comma categories over a
//! subcategory, pullbacks with their mediator tables, initial objects,
//! null families, and dominations.

use crate::fincat::{
    is_subcategory, CatError, FinCategory, Morphism, MorId, ObjId, SubcategorySpec, MAX_MORPHISMS,
};
use std::collections::BTreeMap;

/// The comma category of an object `x` over a subcategory `P`.
///
/// Objects are the ambient morphisms `p : x → Q` with `Q` a `P`-object,
/// named after `p`. A morphism `p → p'` is a `P`-morphism `u` with
/// `u . p = p'`, named `u@p`; distinct comma morphisms can share the
/// same ambient `u`, so only the object table is injective.
#[derive(Debug, Clone)]
pub struct CommaCategory {
    pub category: FinCategory,
    /// The object the comma category is taken over, in the ambient category.
    pub apex: ObjId,
    /// Ambient morphism behind each comma object, indexed by comma object.
    pub objects_ambient: Vec<MorId>,
    /// Ambient morphism behind each comma morphism, indexed by comma morphism.
    pub morphisms_ambient: Vec<MorId>,
    pair_index: BTreeMap<(MorId, MorId), MorId>,
}

impl CommaCategory {
    /// The comma object whose ambient morphism is `p`.
    pub fn object_for(&self, p: MorId) -> Option<ObjId> {
        self.objects_ambient
            .iter()
            .position(|&q| q == p)
            .map(|i| ObjId(i as u32))
    }

    /// The comma morphism out of the object for `p` whose ambient
    /// morphism is `u`.
    pub fn morphism_for(&self, p: MorId, u: MorId) -> Option<MorId> {
        self.pair_index.get(&(p, u)).copied()
    }

    /// The ambient morphism behind a comma object.
    pub fn ambient_of_object(&self, o: ObjId) -> MorId {
        self.objects_ambient[o.index()]
    }

    /// The ambient morphism behind a comma morphism.
    pub fn ambient_of_morphism(&self, m: MorId) -> MorId {
        self.morphisms_ambient[m.index()]
    }
}

/// Build the comma category of `x` over the subcategory selected by `sub`.
pub fn comma_category(
    ambient: &FinCategory,
    sub: &SubcategorySpec,
    x: ObjId,
) -> Result<CommaCategory, CatError> {
    let violations = is_subcategory(ambient, sub);
    if !violations.is_empty() {
        return Err(CatError::NotASubcategory {
            name: sub.name.clone(),
            violations,
        });
    }

    let objects_ambient: Vec<MorId> = ambient
        .morphisms()
        .filter(|&p| ambient.dom(p) == x && sub.contains_obj(ambient.cod(p)))
        .collect();

    let mut pairs: Vec<(MorId, MorId)> = Vec::new();
    for &p in &objects_ambient {
        for &u in &sub.morphisms {
            if ambient.dom(u) == ambient.cod(p) {
                pairs.push((p, u));
            }
        }
    }
    if pairs.len() > MAX_MORPHISMS {
        return Err(CatError::TooLarge(pairs.len()));
    }

    let obj_pos: BTreeMap<MorId, u32> = objects_ambient
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i as u32))
        .collect();

    let objects: Vec<String> = objects_ambient
        .iter()
        .map(|&p| ambient.morphism_name(p).to_string())
        .collect();

    let mut morphisms = Vec::with_capacity(pairs.len());
    let mut morphisms_ambient = Vec::with_capacity(pairs.len());
    let mut pair_index = BTreeMap::new();
    for (i, &(p, u)) in pairs.iter().enumerate() {
        let target = ambient.compose_opt(u, p).expect("endpoints checked");
        morphisms.push(Morphism {
            name: format!("{}@{}", ambient.morphism_name(u), ambient.morphism_name(p)),
            dom: ObjId(obj_pos[&p]),
            cod: ObjId(obj_pos[&target]),
        });
        morphisms_ambient.push(u);
        pair_index.insert((p, u), MorId(i as u32));
    }

    let identities: Vec<MorId> = objects_ambient
        .iter()
        .map(|&p| pair_index[&(p, ambient.identity(ambient.cod(p)))])
        .collect();

    let n = pairs.len();
    let mut comp = vec![u32::MAX; n * n];
    for (gi, &(p_g, v)) in pairs.iter().enumerate() {
        for (fi, &(p_f, u)) in pairs.iter().enumerate() {
            let target_f = ambient.compose_opt(u, p_f).expect("checked");
            if target_f != p_g {
                continue;
            }
            let vu = ambient.compose_opt(v, u).expect("subcategory is closed");
            comp[gi * n + fi] = pair_index[&(p_f, vu)].0;
        }
    }

    let name = format!("comma_{}_{}", ambient.object_name(x), sub.name);
    let category = FinCategory::from_parts(name, objects, morphisms, identities, comp);

    Ok(CommaCategory {
        category,
        apex: x,
        objects_ambient,
        morphisms_ambient,
        pair_index,
    })
}

/// A pullback square with its mediator table.
///
/// For the cospan `f : A → C ← B : g`, the apex `W` carries legs
/// `p_x : W → A`, `p_y : W → B` with `f . p_x = g . p_y`, and
/// `mediators[(q_x, q_y)]` is the unique arrow through which any other
/// commuting cone `(q_x, q_y)` factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pullback {
    pub apex: ObjId,
    pub p_x: MorId,
    pub p_y: MorId,
    pub mediators: BTreeMap<(MorId, MorId), MorId>,
}

/// Find the pullback of the cospan `f : A → C ← B : g`, if one exists.
///
/// Candidates are tried in declaration order and the first universal
/// cone wins, so the result is deterministic.
pub fn find_pullback(
    cat: &FinCategory,
    f: MorId,
    g: MorId,
) -> Result<Option<Pullback>, CatError> {
    if cat.cod(f) != cat.cod(g) {
        return Err(CatError::NotComposable {
            g: cat.morphism_name(f).to_string(),
            f: cat.morphism_name(g).to_string(),
        });
    }
    let a = cat.dom(f);
    let b = cat.dom(g);

    let cones: Vec<(ObjId, MorId, MorId)> = cat
        .objects()
        .flat_map(|w| {
            cat.hom(w, a)
                .iter()
                .flat_map(move |&qx| cat.hom(w, b).iter().map(move |&qy| (w, qx, qy)))
        })
        .filter(|&(_, qx, qy)| cat.compose_opt(f, qx) == cat.compose_opt(g, qy))
        .collect();

    'candidate: for &(w, px, py) in &cones {
        let mut mediators = BTreeMap::new();
        for &(w2, qx, qy) in &cones {
            let mut found = None;
            for &med in cat.hom(w2, w) {
                if cat.compose_opt(px, med) == Some(qx) && cat.compose_opt(py, med) == Some(qy) {
                    if found.is_some() {
                        continue 'candidate;
                    }
                    found = Some(med);
                }
            }
            match found {
                Some(med) => {
                    mediators.insert((qx, qy), med);
                }
                None => continue 'candidate,
            }
        }
        return Ok(Some(Pullback { apex: w, p_x: px, p_y: py, mediators }));
    }
    Ok(None)
}

/// Find the first initial object: one with exactly one morphism to
/// every object.
pub fn find_initial(cat: &FinCategory) -> Option<ObjId> {
    cat.objects()
        .find(|&i| cat.objects().all(|y| cat.hom(i, y).len() == 1))
}

/// A family of null morphisms: one `0_{X,Y} : X → Y` per ordered pair
/// of objects, absorbing under composition on both sides.
pub type NullFamily = BTreeMap<(ObjId, ObjId), MorId>;

/// Find the first null family in declaration order, by backtracking
/// over the object pairs.
pub fn find_null_family(cat: &FinCategory) -> Option<NullFamily> {
    let pairs: Vec<(ObjId, ObjId)> = cat
        .objects()
        .flat_map(|x| cat.objects().map(move |y| (x, y)))
        .collect();
    let mut chosen: Vec<MorId> = Vec::new();

    fn consistent(
        cat: &FinCategory,
        pairs: &[(ObjId, ObjId)],
        chosen: &[MorId],
        z: MorId,
    ) -> bool {
        let (x, y) = pairs[chosen.len()];
        for (i, &prev) in chosen.iter().enumerate() {
            let (px, py) = pairs[i];
            // prev composed after a map into its source must land on the
            // family member at the shifted pair, and dually; check every
            // constraint that couples `z` with an already-chosen member.
            for f in cat.morphisms() {
                if cat.dom(f) == px && cat.cod(f) == x && py == y {
                    if cat.compose_opt(z, f) != Some(prev) {
                        return false;
                    }
                }
                if cat.dom(f) == x && cat.cod(f) == px && y == py {
                    if cat.compose_opt(prev, f) != Some(z) {
                        return false;
                    }
                }
                if cat.dom(f) == y && cat.cod(f) == py && x == px {
                    if cat.compose_opt(f, z) != Some(prev) {
                        return false;
                    }
                }
                if cat.dom(f) == py && cat.cod(f) == y && x == px {
                    if cat.compose_opt(f, prev) != Some(z) {
                        return false;
                    }
                }
            }
        }
        // Self-absorption: endomaps of the pair's own endpoints.
        for f in cat.morphisms() {
            if cat.dom(f) == x && cat.cod(f) == x && cat.compose_opt(z, f) != Some(z) {
                return false;
            }
            if cat.dom(f) == y && cat.cod(f) == y && cat.compose_opt(f, z) != Some(z) {
                return false;
            }
        }
        true
    }

    fn search(
        cat: &FinCategory,
        pairs: &[(ObjId, ObjId)],
        chosen: &mut Vec<MorId>,
    ) -> bool {
        if chosen.len() == pairs.len() {
            return true;
        }
        let (x, y) = pairs[chosen.len()];
        for &z in cat.hom(x, y) {
            if consistent(cat, pairs, chosen, z) {
                chosen.push(z);
                if search(cat, pairs, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }

    if search(cat, &pairs, &mut chosen) {
        Some(pairs.into_iter().zip(chosen).collect())
    } else {
        None
    }
}

/// A domination of `x` by `y`: a retraction `r : y → x` split by a
/// section `s : x → y`, so `r . s = id_x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Domination {
    pub retraction: MorId,
    pub section: MorId,
}

/// Find the first split pair exhibiting `x` as dominated by `y`.
pub fn find_domination(cat: &FinCategory, x: ObjId, y: ObjId) -> Option<Domination> {
    for &r in cat.hom(y, x) {
        for &s in cat.hom(x, y) {
            if cat.compose_opt(r, s) == Some(cat.identity(x)) {
                return Some(Domination { retraction: r, section: s });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::SubcategorySpec;
    use crate::fixtures;

    #[test]
    fn comma_over_endomorphisms_counts() {
        let t = fixtures::fix_a();
        let s2 = t.object("s2").unwrap();
        let sub = SubcategorySpec::full(&t, "P".into(), vec![s2]);
        let comma = comma_category(&t, &sub, s2).unwrap();
        assert_eq!(comma.category.object_count(), 4);
        assert_eq!(comma.category.morphism_count(), 16);
        assert_eq!(comma.category.name(), "comma_s2_P");
    }

    #[test]
    fn comma_objects_are_named_after_their_ambient_morphisms() {
        let t = fixtures::fix_a();
        let s2 = t.object("s2").unwrap();
        let sub = SubcategorySpec::full(&t, "P".into(), vec![s2]);
        let comma = comma_category(&t, &sub, s2).unwrap();
        let id_s2 = t.morphism("id_s2").unwrap();
        let obj = comma.object_for(id_s2).unwrap();
        assert_eq!(comma.category.object_name(obj), "id_s2");
        let swap = t.morphism("swap").unwrap();
        let m = comma.morphism_for(id_s2, swap).unwrap();
        assert_eq!(comma.category.morphism_name(m), "swap@id_s2");
        assert_eq!(comma.category.dom(m), obj);
        assert_eq!(
            comma.ambient_of_object(comma.category.cod(m)),
            swap
        );
    }

    #[test]
    fn comma_respects_non_full_subcategories() {
        let t = fixtures::fix_a();
        let s2 = t.object("s2").unwrap();
        let sub = SubcategorySpec::new(
            "Pid".into(),
            vec![s2],
            vec![t.morphism("id_s2").unwrap()],
        );
        let comma = comma_category(&t, &sub, s2).unwrap();
        assert_eq!(comma.category.object_count(), 4);
        assert_eq!(comma.category.morphism_count(), 4);
    }

    #[test]
    fn pullback_in_the_diamond() {
        let cat = fixtures::fix_b_plus();
        let le13 = cat.morphism("le13").unwrap();
        let le23 = cat.morphism("le23").unwrap();
        let pb = find_pullback(&cat, le13, le23).unwrap().unwrap();
        assert_eq!(cat.object_name(pb.apex), "0");
        assert_eq!(cat.morphism_name(pb.p_x), "le01");
        assert_eq!(cat.morphism_name(pb.p_y), "le02");
        let le01 = cat.morphism("le01").unwrap();
        let le02 = cat.morphism("le02").unwrap();
        let id_0 = cat.morphism("id_0").unwrap();
        assert_eq!(pb.mediators[&(le01, le02)], id_0);
    }

    #[test]
    fn pullback_with_identity_leg() {
        let cat = fixtures::fix_b();
        let le01 = cat.morphism("le01").unwrap();
        let id_1 = cat.morphism("id_1").unwrap();
        let pb = find_pullback(&cat, le01, id_1).unwrap().unwrap();
        assert_eq!(cat.object_name(pb.apex), "0");
        assert_eq!(cat.morphism_name(pb.p_x), "id_0");
        assert_eq!(cat.morphism_name(pb.p_y), "le01");
    }

    #[test]
    fn pullback_requires_a_cospan() {
        let cat = fixtures::fix_b();
        let le01 = cat.morphism("le01").unwrap();
        let le02 = cat.morphism("le02").unwrap();
        assert!(find_pullback(&cat, le01, le02).is_err());
    }

    #[test]
    fn initial_object_of_posets() {
        let b = fixtures::fix_b();
        assert_eq!(
            find_initial(&b).map(|o| b.object_name(o).to_string()),
            Some("0".into())
        );
        let a = fixtures::fix_a();
        assert_eq!(find_initial(&a), None);
    }

    #[test]
    fn null_family_in_the_retract() {
        let cat = fixtures::fix_c();
        let family = find_null_family(&cat).unwrap();
        let o1 = cat.object("o1").unwrap();
        let o2 = cat.object("o2").unwrap();
        assert_eq!(cat.morphism_name(family[&(o1, o1)]), "id_o1");
        assert_eq!(cat.morphism_name(family[&(o1, o2)]), "emb");
        assert_eq!(cat.morphism_name(family[&(o2, o1)]), "ret");
        assert_eq!(cat.morphism_name(family[&(o2, o2)]), "zero");
    }

    #[test]
    fn no_null_family_without_absorption() {
        let cat = fixtures::fix_b();
        assert_eq!(find_null_family(&cat), None);
    }

    #[test]
    fn domination_via_retract() {
        let cat = fixtures::fix_c();
        let o1 = cat.object("o1").unwrap();
        let o2 = cat.object("o2").unwrap();
        let dom = find_domination(&cat, o1, o2).unwrap();
        assert_eq!(cat.morphism_name(dom.retraction), "ret");
        assert_eq!(cat.morphism_name(dom.section), "emb");
        assert_eq!(find_domination(&cat, o2, o1), None);
    }
}

//! Built-in example categories used by tests, docs, and the CLI defaults.
//!
//! Each fixture is small enough to check by hand and exercises a
//! different corner: `fix_a` has non-trivial endomorphisms and a
//! retraction, `fix_b` and `fix_b_plus` are posets, `fix_c` has a null
//! family, and `fix_exp` is the minimal shape for expansion demos.
//!
//! Identities are named `id_<object>`; identity composites are filled in
//! automatically, so the tables below list only the non-identity pairs.

use crate::fincat::{FinCategory, RawCategory, RawMorphism};

pub(crate) fn build(
    name: &str,
    objects: &[&str],
    morphisms: &[(&str, &str, &str)],
    composites: &[(&str, &str, &str)],
) -> FinCategory {
    FinCategory::validate(&raw(name, objects, morphisms, composites)).expect("fixture is valid")
}

fn raw(
    name: &str,
    objects: &[&str],
    morphisms: &[(&str, &str, &str)],
    composites: &[(&str, &str, &str)],
) -> RawCategory {
    let mut all_morphisms: Vec<RawMorphism> = objects
        .iter()
        .map(|o| RawMorphism {
            name: format!("id_{o}"),
            dom: o.to_string(),
            cod: o.to_string(),
        })
        .collect();
    all_morphisms.extend(morphisms.iter().map(|(n, d, c)| RawMorphism {
        name: n.to_string(),
        dom: d.to_string(),
        cod: c.to_string(),
    }));

    let mut all_composites: Vec<(String, String, String)> = Vec::new();
    for m in &all_morphisms {
        let id_dom = format!("id_{}", m.dom);
        let id_cod = format!("id_{}", m.cod);
        all_composites.push((id_cod, m.name.clone(), m.name.clone()));
        if m.name != format!("id_{}", m.dom) || m.dom != m.cod {
            all_composites.push((m.name.clone(), id_dom, m.name.clone()));
        }
    }
    all_composites.extend(
        composites
            .iter()
            .map(|(g, f, gf)| (g.to_string(), f.to_string(), gf.to_string())),
    );

    RawCategory {
        name: name.to_string(),
        objects: objects.iter().map(|o| o.to_string()).collect(),
        morphisms: all_morphisms,
        identities: objects
            .iter()
            .map(|o| (o.to_string(), format!("id_{o}")))
            .collect(),
        composites: all_composites,
    }
}

/// Two sets under all their maps: `s1` a point, `s2` a two-element set.
///
/// `swap` exchanges the two elements, `const_a`/`const_b` are the
/// constant endomaps, `pt_a`/`pt_b` pick the elements, and `collapse`
/// is the unique map down to the point.
pub fn fix_a() -> FinCategory {
    build(
        "FIX-A",
        &["s1", "s2"],
        &[
            ("swap", "s2", "s2"),
            ("const_a", "s2", "s2"),
            ("const_b", "s2", "s2"),
            ("pt_a", "s1", "s2"),
            ("pt_b", "s1", "s2"),
            ("collapse", "s2", "s1"),
        ],
        &[
            ("swap", "swap", "id_s2"),
            ("swap", "const_a", "const_b"),
            ("swap", "const_b", "const_a"),
            ("const_a", "swap", "const_a"),
            ("const_a", "const_a", "const_a"),
            ("const_a", "const_b", "const_a"),
            ("const_b", "swap", "const_b"),
            ("const_b", "const_a", "const_b"),
            ("const_b", "const_b", "const_b"),
            ("swap", "pt_a", "pt_b"),
            ("swap", "pt_b", "pt_a"),
            ("const_a", "pt_a", "pt_a"),
            ("const_a", "pt_b", "pt_a"),
            ("const_b", "pt_a", "pt_b"),
            ("const_b", "pt_b", "pt_b"),
            ("collapse", "swap", "collapse"),
            ("collapse", "const_a", "collapse"),
            ("collapse", "const_b", "collapse"),
            ("collapse", "pt_a", "id_s1"),
            ("collapse", "pt_b", "id_s1"),
            ("pt_a", "collapse", "const_a"),
            ("pt_b", "collapse", "const_b"),
        ],
    )
}

/// The poset `0 ≤ 1`, `0 ≤ 2` with `1` and `2` incomparable.
pub fn fix_b() -> FinCategory {
    build(
        "FIX-B",
        &["0", "1", "2"],
        &[("le01", "0", "1"), ("le02", "0", "2")],
        &[],
    )
}

/// The poset diamond `0 ≤ 1 ≤ 3`, `0 ≤ 2 ≤ 3`.
pub fn fix_b_plus() -> FinCategory {
    build(
        "FIX-B-PLUS",
        &["0", "1", "2", "3"],
        &[
            ("le01", "0", "1"),
            ("le02", "0", "2"),
            ("le13", "1", "3"),
            ("le23", "2", "3"),
            ("le03", "0", "3"),
        ],
        &[
            ("le13", "le01", "le03"),
            ("le23", "le02", "le03"),
        ],
    )
}

/// A retract: `ret . emb = id_o1`, with the idempotent `zero = emb . ret`
/// acting as the null endomorphism of `o2`.
pub fn fix_c() -> FinCategory {
    build(
        "FIX-C",
        &["o1", "o2"],
        &[
            ("emb", "o1", "o2"),
            ("ret", "o2", "o1"),
            ("zero", "o2", "o2"),
        ],
        &[
            ("ret", "emb", "id_o1"),
            ("emb", "ret", "zero"),
            ("zero", "zero", "zero"),
            ("zero", "emb", "emb"),
            ("ret", "zero", "ret"),
        ],
    )
}

/// One arrow `p : X → P`; the minimal stage for expansion examples.
pub fn fix_exp() -> FinCategory {
    build("FIX-EXP", &["X", "P"], &[("p", "X", "P")], &[])
}

/// `FIX-SEQ`: an apex `X` over the isomorphic pair `P ≅ Q`, home of the
/// shipped two-object-cycle sequence expansion.  `a` and `b` are the
/// inverse isomorphisms, `p` and `bp = b ∘ p` the legs.
pub fn fix_seq() -> FinCategory {
    build(
        "FIX-SEQ",
        &["X", "P", "Q"],
        &[("a", "Q", "P"), ("b", "P", "Q"), ("p", "X", "P"), ("bp", "X", "Q")],
        &[("a", "b", "id_P"), ("b", "a", "id_Q"), ("a", "bp", "p"), ("b", "p", "bp")],
    )
}

/// All fixtures by CLI name, in a fixed order.
pub fn all() -> Vec<(&'static str, FinCategory)> {
    vec![
        ("FIX-A", fix_a()),
        ("FIX-B", fix_b()),
        ("FIX-B-PLUS", fix_b_plus()),
        ("FIX-C", fix_c()),
        ("FIX-EXP", fix_exp()),
        ("FIX-SEQ", fix_seq()),
    ]
}

/// Look up a fixture by CLI name.
pub fn by_name(name: &str) -> Option<FinCategory> {
    match name {
        "FIX-A" => Some(fix_a()),
        "FIX-B" => Some(fix_b()),
        "FIX-B-PLUS" => Some(fix_b_plus()),
        "FIX-C" => Some(fix_c()),
        "FIX-EXP" => Some(fix_exp()),
        "FIX-SEQ" => Some(fix_seq()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_validate() {
        for (name, cat) in all() {
            assert_eq!(cat.name(), name);
        }
    }

    #[test]
    fn fix_a_has_expected_size() {
        let cat = fix_a();
        assert_eq!(cat.object_count(), 2);
        assert_eq!(cat.morphism_count(), 8);
    }

    #[test]
    fn fix_a_retraction() {
        let cat = fix_a();
        let collapse = cat.morphism("collapse").unwrap();
        let pt_a = cat.morphism("pt_a").unwrap();
        let s1 = cat.object("s1").unwrap();
        assert_eq!(cat.compose_opt(collapse, pt_a), Some(cat.identity(s1)));
    }

    #[test]
    fn fix_b_plus_diamond_commutes() {
        let cat = fix_b_plus();
        let le13 = cat.morphism("le13").unwrap();
        let le01 = cat.morphism("le01").unwrap();
        let le23 = cat.morphism("le23").unwrap();
        let le02 = cat.morphism("le02").unwrap();
        assert_eq!(cat.compose_opt(le13, le01), cat.compose_opt(le23, le02));
    }

    #[test]
    fn fix_c_idempotent_splits() {
        let cat = fix_c();
        let emb = cat.morphism("emb").unwrap();
        let ret = cat.morphism("ret").unwrap();
        let zero = cat.morphism("zero").unwrap();
        let o1 = cat.object("o1").unwrap();
        assert_eq!(cat.compose_opt(ret, emb), Some(cat.identity(o1)));
        assert_eq!(cat.compose_opt(emb, ret), Some(zero));
        assert_eq!(cat.compose_opt(zero, zero), Some(zero));
    }
}

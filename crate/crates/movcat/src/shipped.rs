//! The workspace files shipped inside the binary: the named fixture
//! categories, the `FIX-EXP` and `FIX-SEQ` expansions, and the all-2
//! `SOLENOID2` sequence. The CLI resolves `--cat`/`--exp`/`--system`
//! names against these unless `$MOVCAT_FIXTURES` points at a directory
//! of `.mcw` files to load instead.
//!
//! Each embedded file is the canonical print of a structure built here
//! from [`crate::fixtures`]; a golden test keeps the two in lockstep
//! (run with `UPDATE_FIXTURES=1` to rewrite the files after changing a
//! fixture).

use crate::fixtures;
use crate::workspace::{
    raw_of, ExpansionEntry, LegsEntry, SubcategoryEntry, SystemBody, SystemEntry, WorkspaceFile,
};

pub const EMBEDDED: &[(&str, &str)] = &[
    ("fix-a.mcw", include_str!("../fixtures/fix-a.mcw")),
    ("fix-b.mcw", include_str!("../fixtures/fix-b.mcw")),
    ("fix-c.mcw", include_str!("../fixtures/fix-c.mcw")),
    ("fix-exp.mcw", include_str!("../fixtures/fix-exp.mcw")),
    ("fix-seq.mcw", include_str!("../fixtures/fix-seq.mcw")),
    ("solenoid2.mcw", include_str!("../fixtures/solenoid2.mcw")),
];

/// The canonical structure behind each embedded file.
pub fn files() -> Vec<(&'static str, WorkspaceFile)> {
    let fix_a = WorkspaceFile { categories: vec![raw_of(&fixtures::fix_a())], ..Default::default() };
    let fix_b = WorkspaceFile {
        categories: vec![raw_of(&fixtures::fix_b()), raw_of(&fixtures::fix_b_plus())],
        ..Default::default()
    };
    let fix_c = WorkspaceFile { categories: vec![raw_of(&fixtures::fix_c())], ..Default::default() };
    let fix_exp = WorkspaceFile {
        categories: vec![raw_of(&fixtures::fix_exp())],
        subcategories: vec![SubcategoryEntry {
            name: "FIX-EXP-SUB".into(),
            category: "FIX-EXP".into(),
            objects: vec!["P".into()],
            morphisms: vec!["id_P".into()],
        }],
        systems: vec![SystemEntry {
            name: "FIX-EXP-SYS".into(),
            category: Some("FIX-EXP".into()),
            body: SystemBody::Finite {
                index: vec!["0".into()],
                le: vec![],
                objects: vec![("0".into(), "P".into())],
                bonds: vec![],
            },
        }],
        expansions: vec![ExpansionEntry {
            name: "FIX-EXP".into(),
            category: "FIX-EXP".into(),
            subcategory: "FIX-EXP-SUB".into(),
            system: "FIX-EXP-SYS".into(),
            apex: "X".into(),
            legs: LegsEntry::Total(vec![("0".into(), "p".into())]),
        }],
        ..Default::default()
    };
    let fix_seq = WorkspaceFile {
        categories: vec![raw_of(&fixtures::fix_seq())],
        subcategories: vec![SubcategoryEntry {
            name: "FIX-SEQ-SUB".into(),
            category: "FIX-SEQ".into(),
            objects: vec!["P".into(), "Q".into()],
            morphisms: vec!["id_P".into(), "id_Q".into(), "a".into(), "b".into()],
        }],
        systems: vec![SystemEntry {
            name: "FIX-SEQ-SYS".into(),
            category: Some("FIX-SEQ".into()),
            body: SystemBody::Periodic {
                prefix_objects: vec![],
                prefix_bonds: vec![],
                cycle_objects: vec!["P".into(), "Q".into()],
                cycle_bonds: vec!["a".into(), "b".into()],
            },
        }],
        expansions: vec![ExpansionEntry {
            name: "FIX-SEQ".into(),
            category: "FIX-SEQ".into(),
            subcategory: "FIX-SEQ-SUB".into(),
            system: "FIX-SEQ-SYS".into(),
            apex: "X".into(),
            legs: LegsEntry::Periodic { prefix: vec![], cycle: vec!["p".into(), "bp".into()] },
        }],
        ..Default::default()
    };
    let solenoid2 = WorkspaceFile {
        systems: vec![SystemEntry {
            name: "SOLENOID2".into(),
            category: None,
            body: SystemBody::Divisibility { prefix: vec![], cycle: vec![2] },
        }],
        ..Default::default()
    };
    vec![
        ("fix-a.mcw", fix_a),
        ("fix-b.mcw", fix_b),
        ("fix-c.mcw", fix_c),
        ("fix-exp.mcw", fix_exp),
        ("fix-seq.mcw", fix_seq),
        ("solenoid2.mcw", solenoid2),
    ]
}

/// Merge parsed workspaces into one namespace; a name declared twice
/// for the same kind of entry is an error.
pub fn merge(parts: Vec<WorkspaceFile>) -> Result<WorkspaceFile, String> {
    let mut out = WorkspaceFile::default();
    for part in parts {
        for raw in part.categories {
            if out.categories.iter().any(|c| c.name == raw.name) {
                return Err(format!("category `{}` declared twice", raw.name));
            }
            out.categories.push(raw);
        }
        for sub in part.subcategories {
            if out.subcategories.iter().any(|s| s.name == sub.name) {
                return Err(format!("subcategory `{}` declared twice", sub.name));
            }
            out.subcategories.push(sub);
        }
        for sys in part.systems {
            if out.systems.iter().any(|s| s.name == sys.name) {
                return Err(format!("system `{}` declared twice", sys.name));
            }
            out.systems.push(sys);
        }
        for exp in part.expansions {
            if out.expansions.iter().any(|e| e.name == exp.name) {
                return Err(format!("expansion `{}` declared twice", exp.name));
            }
            out.expansions.push(exp);
        }
        for w in part.witnesses {
            if out.witnesses.iter().any(|x| x.name == w.name) {
                return Err(format!("witness `{}` declared twice", w.name));
            }
            out.witnesses.push(w);
        }
    }
    Ok(out)
}

/// The merged embedded fixture set.
pub fn embedded_workspace() -> WorkspaceFile {
    let parts = EMBEDDED
        .iter()
        .map(|(name, text)| {
            crate::workspace::parse_workspace(text)
                .unwrap_or_else(|e| panic!("embedded `{name}` does not parse: {e}"))
        })
        .collect();
    merge(parts).expect("embedded fixture names are distinct")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prosys::validate_system;
    use crate::shapebridge::{theorem_check, Equivalence};
    use crate::workspace::{parse_workspace, print_workspace};

    #[test]
    fn shipped_files_are_the_canonical_prints() {
        let update = std::env::var_os("UPDATE_FIXTURES").is_some();
        for (name, ws) in files() {
            let expected = print_workspace(&ws);
            let path = format!("fixtures/{name}");
            if update {
                std::fs::write(&path, &expected).unwrap();
                continue;
            }
            let shipped = EMBEDDED.iter().find(|(n, _)| n == &name).map(|(_, t)| *t);
            assert_eq!(
                shipped,
                Some(expected.as_str()),
                "`{name}` is out of date; rerun with UPDATE_FIXTURES=1"
            );
        }
    }

    #[test]
    fn embedded_files_parse_to_their_structures() {
        for (name, ws) in files() {
            let text = EMBEDDED.iter().find(|(n, _)| n == &name).unwrap().1;
            assert_eq!(parse_workspace(text).unwrap(), ws, "{name}");
        }
    }

    #[test]
    fn embedded_categories_build_back_to_the_fixtures() {
        let ws = embedded_workspace();
        for (name, cat) in fixtures::all() {
            assert_eq!(ws.build_category(name).unwrap(), cat);
        }
    }

    #[test]
    fn the_shipped_expansion_satisfies_the_equivalence() {
        let ws = embedded_workspace();
        let exp = ws.build_expansion("FIX-EXP").unwrap();
        assert!(exp.validate().is_empty());
        let (cat, spec) = ws.build_subcategory("FIX-EXP-SUB").unwrap();
        let report = theorem_check(&cat, &spec, exp.apex, &exp).unwrap();
        assert_eq!(report.equivalence, Equivalence::Consistent { holds: true });
    }

    #[test]
    fn the_shipped_sequence_expansion_satisfies_the_sequence_reading() {
        let ws = embedded_workspace();
        let exp = ws.build_expansion("FIX-SEQ").unwrap();
        assert!(exp.validate().is_empty());
        let (cat, spec) = ws.build_subcategory("FIX-SEQ-SUB").unwrap();
        let report = crate::shapebridge::corollary_sequence_check(&cat, &spec, exp.apex, &exp)
            .unwrap();
        assert!(report.agrees());
        assert!(report.movable.holds() && report.uniform.holds());
    }

    #[test]
    fn the_shipped_solenoid_is_the_all_two_sequence() {
        let ws = embedded_workspace();
        let sys = ws.build_system("SOLENOID2").unwrap();
        assert!(validate_system(&sys).is_empty());
        match sys {
            crate::prosys::System::Divisibility(d) => {
                assert!(d.prefix.is_empty());
                assert_eq!(d.cycle, vec![2]);
            }
            other => panic!("expected the arithmetic model, got {other:?}"),
        }
    }

    #[test]
    fn merging_rejects_a_name_collision() {
        let ws = embedded_workspace();
        let err = merge(vec![ws.clone(), ws]).unwrap_err();
        assert!(err.contains("declared twice"));
    }
}

//! The workspace file format: a line-oriented text document holding
//! named categories, subcategory specs, systems, expansions, and
//! witnesses, designed to be reviewable in diffs.
//!
//! [`parse_workspace`] accepts section fields in any order and reports
//! precise positions; [`print_workspace`] emits the canonical form —
//! fields in grammar order, two-space indent, one blank line between
//! sections — so printing a canonical file reproduces it byte for byte.
//! The grammar ships in `docs/workspace-grammar.ebnf`.
//!
//! Parsing resolves every cross-reference (a compose triple must name
//! declared morphisms, an expansion must name a declared subcategory and
//! system over the same category) but does not check the categorical
//! laws; those belong to the builders, which assemble core types and
//! run the validators. Whatever the laws already determine is implied
//! rather than written: the builders fill in identity composites and
//! the identity bonds of finite-index systems, leaving explicitly
//! declared (possibly broken) entries untouched for the validators.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::fincat::{restrict, CatError, FinCategory, MorId, RawCategory, RawMorphism, SubcategorySpec};
use crate::movability::{MovabilityWitness, UniformMovabilityWitness};
use crate::prosys::{
    DirectedPreorder, DivisibilitySequence, Expansion, FiniteIndexSystem, Legs, PeriodicSequence,
    System, SystemError,
};

pub const HEADER: &str = "movcat-workspace 1";

#[derive(Debug, Clone, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub struct WorkspaceFile {
    pub categories: Vec<RawCategory>,
    pub subcategories: Vec<SubcategoryEntry>,
    pub systems: Vec<SystemEntry>,
    pub expansions: Vec<ExpansionEntry>,
    pub witnesses: Vec<WitnessEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SubcategoryEntry {
    pub name: String,
    pub category: String,
    pub objects: Vec<String>,
    pub morphisms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SystemEntry {
    pub name: String,
    /// Absent exactly for the arithmetic kind.
    pub category: Option<String>,
    pub body: SystemBody,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemBody {
    Finite {
        index: Vec<String>,
        le: Vec<(String, String)>,
        objects: Vec<(String, String)>,
        bonds: Vec<(String, String, String)>,
    },
    Periodic {
        prefix_objects: Vec<String>,
        prefix_bonds: Vec<String>,
        cycle_objects: Vec<String>,
        cycle_bonds: Vec<String>,
    },
    Divisibility { prefix: Vec<u64>, cycle: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ExpansionEntry {
    pub name: String,
    pub category: String,
    pub subcategory: String,
    pub system: String,
    pub apex: String,
    pub legs: LegsEntry,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LegsEntry {
    Total(Vec<(String, String)>),
    Periodic { prefix: Vec<String>, cycle: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct WitnessEntry {
    pub name: String,
    pub category: String,
    pub uniform: bool,
    pub target: String,
    pub mover: String,
    pub m: String,
    pub factors: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    SyntaxError { line: usize, column: usize, message: String },
    #[error("line {line}: reference to unknown name `{name}`")]
    UnresolvedReference { line: usize, name: String },
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::SyntaxError { line, column, message: message.into() }
}

fn unresolved(line: usize, name: &str) -> ParseError {
    ParseError::UnresolvedReference { line, name: name.to_string() }
}

// ---------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct Tok<'a> {
    col: usize,
    text: &'a str,
}

struct Line<'a> {
    no: usize,
    toks: Vec<Tok<'a>>,
}

fn tokenize(text: &str) -> Vec<Line<'_>> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let mut toks = Vec::new();
        let mut start: Option<usize> = None;
        for (pos, ch) in raw.char_indices().chain([(raw.len(), ' ')]) {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    toks.push(Tok { col: s + 1, text: &raw[s..pos] });
                }
            } else if ch == '#' && start.is_none() {
                break;
            } else if start.is_none() {
                start = Some(pos);
            }
        }
        if !toks.is_empty() {
            lines.push(Line { no: i + 1, toks });
        }
    }
    lines
}

/// The argument tokens of a body line whose shape is `kw a b … = z`,
/// with `eq_at` counted among the arguments (`None` for no `=`).
fn args<'a>(line: &Line<'a>, count: usize, eq_at: Option<usize>) -> Result<Vec<Tok<'a>>, ParseError> {
    let kw = line.toks[0];
    let rest = &line.toks[1..];
    if rest.len() != count {
        return Err(syntax(
            line.no,
            kw.col,
            format!("`{}` takes {} arguments, found {}", kw.text, count, rest.len()),
        ));
    }
    if let Some(at) = eq_at {
        if rest[at].text != "=" {
            return Err(syntax(line.no, rest[at].col, "expected `=`"));
        }
    }
    Ok(rest.to_vec())
}

fn names_of(toks: &[Tok<'_>]) -> Vec<String> {
    toks.iter().map(|t| t.text.to_string()).collect()
}

struct SectionBody<'a> {
    header: &'a Line<'a>,
    lines: Vec<&'a Line<'a>>,
}

/// One required single-occurrence field of a section, with its line.
#[derive(Default)]
struct Once {
    value: Option<(usize, Vec<String>)>,
}

impl Once {
    fn set(&mut self, line: &Line<'_>, values: Vec<String>) -> Result<(), ParseError> {
        if self.value.is_some() {
            return Err(syntax(
                line.no,
                line.toks[0].col,
                format!("`{}` given twice", line.toks[0].text),
            ));
        }
        self.value = Some((line.no, values));
        Ok(())
    }

    fn require(&self, body: &SectionBody<'_>, what: &str) -> Result<(usize, &[String]), ParseError> {
        match &self.value {
            Some((line, values)) => Ok((*line, values)),
            None => Err(syntax(
                body.header.no,
                body.header.toks[0].col,
                format!("section is missing its `{what}` line"),
            )),
        }
    }
}

pub fn parse_workspace(text: &str) -> Result<WorkspaceFile, ParseError> {
    let lines = tokenize(text);
    let mut cursor = lines.iter().peekable();

    let header = cursor
        .next()
        .ok_or_else(|| syntax(1, 1, format!("expected `{HEADER}` header")))?;
    let header_text: Vec<&str> = header.toks.iter().map(|t| t.text).collect();
    if header_text != ["movcat-workspace", "1"] {
        return Err(syntax(header.no, header.toks[0].col, format!("expected `{HEADER}` header")));
    }

    let mut ws = WorkspaceFile::default();
    let mut taken: HashMap<(&'static str, String), usize> = HashMap::new();
    let mut shadows = Shadows::default();

    while let Some(head) = cursor.next() {
        let kind_tok = head.toks[0];
        let (kind, connective) = match kind_tok.text {
            "category" => ("category", None),
            "subcategory" => ("subcategory", Some("of")),
            "system" => ("system", None),
            "expansion" => ("expansion", Some("of")),
            "witness" => ("witness", Some("for")),
            other => {
                return Err(syntax(head.no, kind_tok.col, format!("unknown section kind `{other}`")))
            }
        };
        let name_tok = head
            .toks
            .get(1)
            .ok_or_else(|| syntax(head.no, kind_tok.col, "section is missing its name"))?;
        let name = name_tok.text.to_string();
        if let Some(first) = taken.insert((kind, name.clone()), head.no) {
            return Err(syntax(
                head.no,
                name_tok.col,
                format!("{kind} `{name}` already declared on line {first}"),
            ));
        }

        let mut category: Option<String> = None;
        let rest = &head.toks[2..];
        let brace_ok = match (connective, kind) {
            (Some(word), _) => {
                rest.len() == 3 && rest[0].text == word && rest[2].text == "{" && {
                    category = Some(rest[1].text.to_string());
                    true
                }
            }
            (None, "system") => match rest.len() {
                1 => rest[0].text == "{",
                3 => {
                    rest[0].text == "in" && rest[2].text == "{" && {
                        category = Some(rest[1].text.to_string());
                        true
                    }
                }
                _ => false,
            },
            (None, _) => rest.len() == 1 && rest[0].text == "{",
        };
        if !brace_ok {
            let hint = match (connective, kind) {
                (Some(word), _) => format!("expected `{kind} <name> {word} <category> {{`"),
                (None, "system") => "expected `system <name> [in <category>] {`".to_string(),
                (None, _) => format!("expected `{kind} <name> {{`"),
            };
            return Err(syntax(head.no, kind_tok.col, hint));
        }

        let mut body = SectionBody { header: head, lines: Vec::new() };
        loop {
            let line = cursor
                .next()
                .ok_or_else(|| syntax(head.no, kind_tok.col, "section is never closed"))?;
            if line.toks.len() == 1 && line.toks[0].text == "}" {
                break;
            }
            if line.toks.iter().any(|t| t.text == "}" || t.text == "{") {
                return Err(syntax(line.no, line.toks[0].col, "braces must stand alone"));
            }
            body.lines.push(line);
        }

        match kind {
            "category" => parse_category(&mut ws, name, &body)?,
            "subcategory" => parse_subcategory(&mut ws, &mut shadows, name, category.unwrap(), &body)?,
            "system" => parse_system(&mut ws, &mut shadows, name, category, &body)?,
            "expansion" => parse_expansion(&mut ws, &mut shadows, name, category.unwrap(), &body)?,
            _ => parse_witness(&mut ws, &mut shadows, name, category.unwrap(), &body)?,
        }
    }

    resolve(&ws, &shadows)?;
    Ok(ws)
}

fn parse_category(
    ws: &mut WorkspaceFile,
    name: String,
    body: &SectionBody<'_>,
) -> Result<(), ParseError> {
    let mut objects = Once::default();
    let mut morphisms: Vec<(usize, RawMorphism)> = Vec::new();
    let mut identities: Vec<(usize, (String, String))> = Vec::new();
    let mut composites: Vec<(usize, (String, String, String))> = Vec::new();

    for line in &body.lines {
        match line.toks[0].text {
            "objects" => {
                let mut seen = HashSet::new();
                for tok in &line.toks[1..] {
                    if !seen.insert(tok.text) {
                        return Err(syntax(
                            line.no,
                            tok.col,
                            format!("object `{}` listed twice", tok.text),
                        ));
                    }
                }
                objects.set(line, names_of(&line.toks[1..]))?;
            }
            "morphism" => {
                let a = args(line, 5, None)?;
                if a[1].text != ":" || a[3].text != "->" {
                    return Err(syntax(line.no, a[1].col, "expected `morphism <m> : <dom> -> <cod>`"));
                }
                if morphisms.iter().any(|(_, m)| m.name == a[0].text) {
                    return Err(syntax(
                        line.no,
                        a[0].col,
                        format!("morphism `{}` declared twice", a[0].text),
                    ));
                }
                morphisms.push((
                    line.no,
                    RawMorphism {
                        name: a[0].text.to_string(),
                        dom: a[2].text.to_string(),
                        cod: a[4].text.to_string(),
                    },
                ));
            }
            "identity" => {
                let a = args(line, 3, Some(1))?;
                identities.push((line.no, (a[0].text.to_string(), a[2].text.to_string())));
            }
            "compose" => {
                let a = args(line, 4, Some(2))?;
                composites.push((
                    line.no,
                    (a[0].text.to_string(), a[1].text.to_string(), a[3].text.to_string()),
                ));
            }
            other => {
                return Err(syntax(
                    line.no,
                    line.toks[0].col,
                    format!("unexpected `{other}` in a category section"),
                ))
            }
        }
    }

    let (_, object_names) = objects.require(body, "objects")?;
    let object_set: HashSet<&str> = object_names.iter().map(String::as_str).collect();
    let morphism_set: HashSet<&str> = morphisms.iter().map(|(_, m)| m.name.as_str()).collect();
    for (line, m) in &morphisms {
        for end in [&m.dom, &m.cod] {
            if !object_set.contains(end.as_str()) {
                return Err(unresolved(*line, end));
            }
        }
    }
    for (line, (obj, mor)) in &identities {
        if !object_set.contains(obj.as_str()) {
            return Err(unresolved(*line, obj));
        }
        if !morphism_set.contains(mor.as_str()) {
            return Err(unresolved(*line, mor));
        }
    }
    for (line, (g, f, gf)) in &composites {
        for part in [g, f, gf] {
            if !morphism_set.contains(part.as_str()) {
                return Err(unresolved(*line, part));
            }
        }
    }

    ws.categories.push(RawCategory {
        name,
        objects: object_names.to_vec(),
        morphisms: morphisms.into_iter().map(|(_, m)| m).collect(),
        identities: identities.into_iter().map(|(_, i)| i).collect(),
        composites: composites.into_iter().map(|(_, c)| c).collect(),
    });
    Ok(())
}

/// Per-entry line positions recorded for the cross-section resolution
/// pass; parallel to the entry vectors of the workspace being built.
#[derive(Default)]
struct Shadows {
    subcategories: Vec<SubShadow>,
    systems: Vec<SysShadow>,
    expansions: Vec<ExpShadow>,
    witnesses: Vec<WitShadow>,
}

struct SubShadow {
    header: usize,
    objects: usize,
    morphisms: usize,
}

struct SysShadow {
    header: usize,
    objects: Vec<usize>,
    bonds: Vec<usize>,
    prefix_bonds: Vec<usize>,
    cycle_bonds: Vec<usize>,
    prefix_objects: Vec<usize>,
    cycle_objects: Vec<usize>,
}

struct ExpShadow {
    header: usize,
    subcategory: usize,
    system: usize,
    apex: usize,
    legs: Vec<usize>,
}

struct WitShadow {
    header: usize,
    target: usize,
    mover: usize,
    m: usize,
    factors: Vec<usize>,
}

fn parse_subcategory(
    ws: &mut WorkspaceFile,
    shadows: &mut Shadows,
    name: String,
    category: String,
    body: &SectionBody<'_>,
) -> Result<(), ParseError> {
    let mut objects = Once::default();
    let mut morphisms = Once::default();
    for line in &body.lines {
        match line.toks[0].text {
            "objects" => objects.set(line, names_of(&line.toks[1..]))?,
            "morphisms" => morphisms.set(line, names_of(&line.toks[1..]))?,
            other => {
                return Err(syntax(
                    line.no,
                    line.toks[0].col,
                    format!("unexpected `{other}` in a subcategory section"),
                ))
            }
        }
    }
    let (objects_line, objects) = objects.require(body, "objects")?;
    let (morphisms_line, morphisms) = morphisms.require(body, "morphisms")?;
    shadows.subcategories.push(SubShadow {
        header: body.header.no,
        objects: objects_line,
        morphisms: morphisms_line,
    });
    ws.subcategories.push(SubcategoryEntry {
        name,
        category,
        objects: objects.to_vec(),
        morphisms: morphisms.to_vec(),
    });
    Ok(())
}

fn parse_number(tok: Tok<'_>, line: usize) -> Result<u64, ParseError> {
    tok.text
        .parse()
        .map_err(|_| syntax(line, tok.col, format!("expected a number, found `{}`", tok.text)))
}

fn parse_system(
    ws: &mut WorkspaceFile,
    shadows: &mut Shadows,
    name: String,
    category: Option<String>,
    body: &SectionBody<'_>,
) -> Result<(), ParseError> {
    let mut kind = Once::default();
    let mut index = Once::default();
    let mut le: Vec<(usize, (String, String))> = Vec::new();
    let mut objects: Vec<(usize, (String, String))> = Vec::new();
    let mut bonds: Vec<(usize, (String, String, String))> = Vec::new();
    let mut prefix_objects: Vec<(usize, String)> = Vec::new();
    let mut prefix_bonds: Vec<(usize, String)> = Vec::new();
    let mut cycle_objects: Vec<(usize, String)> = Vec::new();
    let mut cycle_bonds: Vec<(usize, String)> = Vec::new();
    let mut div_prefix = Once::default();
    let mut div_cycle = Once::default();

    for line in &body.lines {
        match line.toks[0].text {
            "kind" => kind.set(line, names_of(&args(line, 1, None)?))?,
            "index" => index.set(line, names_of(&line.toks[1..]))?,
            "le" => {
                let a = args(line, 2, None)?;
                le.push((line.no, (a[0].text.to_string(), a[1].text.to_string())));
            }
            "object" => {
                let a = args(line, 3, Some(1))?;
                objects.push((line.no, (a[0].text.to_string(), a[2].text.to_string())));
            }
            "bond" => {
                let a = args(line, 4, Some(2))?;
                bonds.push((
                    line.no,
                    (a[0].text.to_string(), a[1].text.to_string(), a[3].text.to_string()),
                ));
            }
            "prefix-object" => {
                let a = args(line, 1, None)?;
                prefix_objects.push((line.no, a[0].text.to_string()));
            }
            "prefix-bond" => {
                let a = args(line, 1, None)?;
                prefix_bonds.push((line.no, a[0].text.to_string()));
            }
            "cycle-object" => {
                let a = args(line, 1, None)?;
                cycle_objects.push((line.no, a[0].text.to_string()));
            }
            "cycle-bond" => {
                let a = args(line, 1, None)?;
                cycle_bonds.push((line.no, a[0].text.to_string()));
            }
            "prefix" => div_prefix.set(line, names_of(&line.toks[1..]))?,
            "cycle" => div_cycle.set(line, names_of(&line.toks[1..]))?,
            other => {
                return Err(syntax(
                    line.no,
                    line.toks[0].col,
                    format!("unexpected `{other}` in a system section"),
                ))
            }
        }
    }

    let (kind_line, kind) = kind.require(body, "kind")?;
    let head = body.header.no;
    let col = body.header.toks[0].col;
    let body_kind = match kind[0].as_str() {
        "finite" => {
            let (index_line, index_names) = index.require(body, "index")?;
            let mut seen = HashSet::new();
            for element in index_names {
                if !seen.insert(element.as_str()) {
                    return Err(syntax(index_line, 1, format!("index element `{element}` listed twice")));
                }
            }
            for (line, pair) in &le {
                for element in [&pair.0, &pair.1] {
                    if !seen.contains(element.as_str()) {
                        return Err(unresolved(*line, element));
                    }
                }
            }
            for (line, (element, _)) in &objects {
                if !seen.contains(element.as_str()) {
                    return Err(unresolved(*line, element));
                }
            }
            for (line, (a, b, _)) in &bonds {
                for element in [a, b] {
                    if !seen.contains(element.as_str()) {
                        return Err(unresolved(*line, element));
                    }
                }
            }
            shadows.systems.push(SysShadow {
                header: head,
                objects: objects.iter().map(|(l, _)| *l).collect(),
                bonds: bonds.iter().map(|(l, _)| *l).collect(),
                prefix_bonds: vec![],
                cycle_bonds: vec![],
                prefix_objects: vec![],
                cycle_objects: vec![],
            });
            SystemBody::Finite {
                index: index_names.to_vec(),
                le: le.into_iter().map(|(_, p)| p).collect(),
                objects: objects.into_iter().map(|(_, o)| o).collect(),
                bonds: bonds.into_iter().map(|(_, b)| b).collect(),
            }
        }
        "periodic" => {
            shadows.systems.push(SysShadow {
                header: head,
                objects: vec![],
                bonds: vec![],
                prefix_objects: prefix_objects.iter().map(|(l, _)| *l).collect(),
                prefix_bonds: prefix_bonds.iter().map(|(l, _)| *l).collect(),
                cycle_objects: cycle_objects.iter().map(|(l, _)| *l).collect(),
                cycle_bonds: cycle_bonds.iter().map(|(l, _)| *l).collect(),
            });
            SystemBody::Periodic {
                prefix_objects: prefix_objects.into_iter().map(|(_, o)| o).collect(),
                prefix_bonds: prefix_bonds.into_iter().map(|(_, b)| b).collect(),
                cycle_objects: cycle_objects.into_iter().map(|(_, o)| o).collect(),
                cycle_bonds: cycle_bonds.into_iter().map(|(_, b)| b).collect(),
            }
        }
        "divisibility" => {
            if category.is_some() {
                return Err(syntax(head, col, "an arithmetic system does not live in a category"));
            }
            let numbers = |field: &Once| -> Result<Vec<u64>, ParseError> {
                match &field.value {
                    None => Ok(vec![]),
                    Some((line, words)) => words
                        .iter()
                        .map(|w| parse_number(Tok { col: 1, text: w }, *line))
                        .collect(),
                }
            };
            shadows.systems.push(SysShadow {
                header: head,
                objects: vec![],
                bonds: vec![],
                prefix_bonds: vec![],
                cycle_bonds: vec![],
                prefix_objects: vec![],
                cycle_objects: vec![],
            });
            SystemBody::Divisibility { prefix: numbers(&div_prefix)?, cycle: numbers(&div_cycle)? }
        }
        other => {
            return Err(syntax(kind_line, 1, format!("unknown system kind `{other}`")));
        }
    };
    if !matches!(body_kind, SystemBody::Divisibility { .. }) && category.is_none() {
        return Err(syntax(head, col, "a categorical system must name its category with `in`"));
    }

    ws.systems.push(SystemEntry { name, category, body: body_kind });
    Ok(())
}

fn parse_expansion(
    ws: &mut WorkspaceFile,
    shadows: &mut Shadows,
    name: String,
    category: String,
    body: &SectionBody<'_>,
) -> Result<(), ParseError> {
    let mut subcategory = Once::default();
    let mut apex = Once::default();
    let mut system = Once::default();
    let mut total: Vec<(usize, (String, String))> = Vec::new();
    let mut prefix: Vec<(usize, String)> = Vec::new();
    let mut cycle: Vec<(usize, String)> = Vec::new();

    for line in &body.lines {
        match line.toks[0].text {
            "subcategory" => subcategory.set(line, names_of(&args(line, 1, None)?))?,
            "apex" => apex.set(line, names_of(&args(line, 1, None)?))?,
            "system" => system.set(line, names_of(&args(line, 1, None)?))?,
            "leg" => {
                let a = args(line, 3, Some(1))?;
                total.push((line.no, (a[0].text.to_string(), a[2].text.to_string())));
            }
            "leg-prefix" => {
                let a = args(line, 1, None)?;
                prefix.push((line.no, a[0].text.to_string()));
            }
            "leg-cycle" => {
                let a = args(line, 1, None)?;
                cycle.push((line.no, a[0].text.to_string()));
            }
            other => {
                return Err(syntax(
                    line.no,
                    line.toks[0].col,
                    format!("unexpected `{other}` in an expansion section"),
                ))
            }
        }
    }

    if !total.is_empty() && (!prefix.is_empty() || !cycle.is_empty()) {
        return Err(syntax(
            total[0].0,
            1,
            "a section mixes `leg` with `leg-prefix`/`leg-cycle`",
        ));
    }
    let (subcategory_line, subcategory) = subcategory.require(body, "subcategory")?;
    let (apex_line, apex) = apex.require(body, "apex")?;
    let (system_line, system) = system.require(body, "system")?;

    let leg_lines: Vec<usize> = if total.is_empty() {
        prefix.iter().chain(&cycle).map(|(l, _)| *l).collect()
    } else {
        total.iter().map(|(l, _)| *l).collect()
    };
    let legs = if total.is_empty() && !(prefix.is_empty() && cycle.is_empty()) {
        LegsEntry::Periodic {
            prefix: prefix.into_iter().map(|(_, m)| m).collect(),
            cycle: cycle.into_iter().map(|(_, m)| m).collect(),
        }
    } else {
        LegsEntry::Total(total.into_iter().map(|(_, l)| l).collect())
    };

    shadows.expansions.push(ExpShadow {
        header: body.header.no,
        subcategory: subcategory_line,
        system: system_line,
        apex: apex_line,
        legs: leg_lines,
    });
    ws.expansions.push(ExpansionEntry {
        name,
        category,
        subcategory: subcategory[0].clone(),
        system: system[0].clone(),
        apex: apex[0].clone(),
        legs,
    });
    Ok(())
}

fn parse_witness(
    ws: &mut WorkspaceFile,
    shadows: &mut Shadows,
    name: String,
    category: String,
    body: &SectionBody<'_>,
) -> Result<(), ParseError> {
    let mut kind = Once::default();
    let mut target = Once::default();
    let mut mover = Once::default();
    let mut m = Once::default();
    let mut factors: Vec<(usize, (String, String))> = Vec::new();

    for line in &body.lines {
        match line.toks[0].text {
            "kind" => kind.set(line, names_of(&args(line, 1, None)?))?,
            "target" => target.set(line, names_of(&args(line, 1, None)?))?,
            "mover" => mover.set(line, names_of(&args(line, 1, None)?))?,
            "m" => m.set(line, names_of(&args(line, 1, None)?))?,
            "factor" => {
                let a = args(line, 3, Some(1))?;
                factors.push((line.no, (a[0].text.to_string(), a[2].text.to_string())));
            }
            other => {
                return Err(syntax(
                    line.no,
                    line.toks[0].col,
                    format!("unexpected `{other}` in a witness section"),
                ))
            }
        }
    }

    let (kind_line, kind) = kind.require(body, "kind")?;
    let uniform = match kind[0].as_str() {
        "movable" => false,
        "uniform" => true,
        other => return Err(syntax(kind_line, 1, format!("unknown witness kind `{other}`"))),
    };
    let (target_line, target) = target.require(body, "target")?;
    let (mover_line, mover) = mover.require(body, "mover")?;
    let (m_line, m) = m.require(body, "m")?;

    shadows.witnesses.push(WitShadow {
        header: body.header.no,
        target: target_line,
        mover: mover_line,
        m: m_line,
        factors: factors.iter().map(|(l, _)| *l).collect(),
    });
    ws.witnesses.push(WitnessEntry {
        name,
        category,
        uniform,
        target: target[0].clone(),
        mover: mover[0].clone(),
        m: m[0].clone(),
        factors: factors.into_iter().map(|(_, f)| f).collect(),
    });
    Ok(())
}

// ---------------------------------------------------------------------
// Cross-section resolution
// ---------------------------------------------------------------------

fn resolve(ws: &WorkspaceFile, shadows: &Shadows) -> Result<(), ParseError> {
    let category = |line: usize, name: &str| -> Result<&RawCategory, ParseError> {
        ws.categories.iter().find(|c| c.name == name).ok_or_else(|| unresolved(line, name))
    };
    let object_in = |raw: &RawCategory, line: usize, name: &str| -> Result<(), ParseError> {
        if raw.objects.iter().any(|o| o == name) { Ok(()) } else { Err(unresolved(line, name)) }
    };
    let morphism_in = |raw: &RawCategory, line: usize, name: &str| -> Result<(), ParseError> {
        if raw.morphisms.iter().any(|m| m.name == name) {
            Ok(())
        } else {
            Err(unresolved(line, name))
        }
    };

    for (entry, shadow) in ws.subcategories.iter().zip(&shadows.subcategories) {
        let raw = category(shadow.header, &entry.category)?;
        for o in &entry.objects {
            object_in(raw, shadow.objects, o)?;
        }
        for m in &entry.morphisms {
            morphism_in(raw, shadow.morphisms, m)?;
        }
    }

    for (entry, shadow) in ws.systems.iter().zip(&shadows.systems) {
        let Some(cat_name) = &entry.category else { continue };
        let raw = category(shadow.header, cat_name)?;
        match &entry.body {
            SystemBody::Finite { objects, bonds, .. } => {
                for ((_, obj), line) in objects.iter().zip(&shadow.objects) {
                    object_in(raw, *line, obj)?;
                }
                for ((_, _, mor), line) in bonds.iter().zip(&shadow.bonds) {
                    morphism_in(raw, *line, mor)?;
                }
            }
            SystemBody::Periodic { prefix_objects, prefix_bonds, cycle_objects, cycle_bonds } => {
                for (obj, line) in prefix_objects.iter().zip(&shadow.prefix_objects) {
                    object_in(raw, *line, obj)?;
                }
                for (obj, line) in cycle_objects.iter().zip(&shadow.cycle_objects) {
                    object_in(raw, *line, obj)?;
                }
                for (mor, line) in prefix_bonds.iter().zip(&shadow.prefix_bonds) {
                    morphism_in(raw, *line, mor)?;
                }
                for (mor, line) in cycle_bonds.iter().zip(&shadow.cycle_bonds) {
                    morphism_in(raw, *line, mor)?;
                }
            }
            SystemBody::Divisibility { .. } => {}
        }
    }

    for (entry, shadow) in ws.expansions.iter().zip(&shadows.expansions) {
        let raw = category(shadow.header, &entry.category)?;
        let sub = ws
            .subcategories
            .iter()
            .find(|s| s.name == entry.subcategory)
            .ok_or_else(|| unresolved(shadow.subcategory, &entry.subcategory))?;
        if sub.category != entry.category {
            return Err(syntax(
                shadow.subcategory,
                1,
                format!(
                    "subcategory `{}` belongs to `{}`, not `{}`",
                    sub.name, sub.category, entry.category
                ),
            ));
        }
        let system = ws
            .systems
            .iter()
            .find(|s| s.name == entry.system)
            .ok_or_else(|| unresolved(shadow.system, &entry.system))?;
        if let Some(sys_cat) = &system.category {
            if *sys_cat != entry.category {
                return Err(syntax(
                    shadow.system,
                    1,
                    format!(
                        "system `{}` lives in `{}`, not `{}`",
                        system.name, sys_cat, entry.category
                    ),
                ));
            }
        }
        object_in(raw, shadow.apex, &entry.apex)?;
        match &entry.legs {
            LegsEntry::Total(legs) => {
                for ((element, mor), line) in legs.iter().zip(&shadow.legs) {
                    if let SystemBody::Finite { index, .. } = &system.body {
                        if !index.iter().any(|i| i == element) {
                            return Err(unresolved(*line, element));
                        }
                    }
                    morphism_in(raw, *line, mor)?;
                }
            }
            LegsEntry::Periodic { prefix, cycle } => {
                for (mor, line) in prefix.iter().chain(cycle).zip(&shadow.legs) {
                    morphism_in(raw, *line, mor)?;
                }
            }
        }
    }

    for (entry, shadow) in ws.witnesses.iter().zip(&shadows.witnesses) {
        let raw = category(shadow.header, &entry.category)?;
        object_in(raw, shadow.target, &entry.target)?;
        object_in(raw, shadow.mover, &entry.mover)?;
        morphism_in(raw, shadow.m, &entry.m)?;
        for ((p, u), line) in entry.factors.iter().zip(&shadow.factors) {
            morphism_in(raw, *line, p)?;
            morphism_in(raw, *line, u)?;
        }
    }

    Ok(())
}

// ---------------------------------------------------------------------
// Canonical printing
// ---------------------------------------------------------------------

fn push_list(out: &mut String, keyword: &str, items: &[String]) {
    out.push_str("  ");
    out.push_str(keyword);
    for item in items {
        out.push(' ');
        out.push_str(item);
    }
    out.push('\n');
}

pub fn print_workspace(ws: &WorkspaceFile) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');

    for raw in &ws.categories {
        out.push('\n');
        out.push_str(&format!("category {} {{\n", raw.name));
        push_list(&mut out, "objects", &raw.objects);
        for m in &raw.morphisms {
            out.push_str(&format!("  morphism {} : {} -> {}\n", m.name, m.dom, m.cod));
        }
        for (obj, mor) in &raw.identities {
            out.push_str(&format!("  identity {obj} = {mor}\n"));
        }
        for (g, f, gf) in &raw.composites {
            out.push_str(&format!("  compose {g} {f} = {gf}\n"));
        }
        out.push_str("}\n");
    }

    for sub in &ws.subcategories {
        out.push('\n');
        out.push_str(&format!("subcategory {} of {} {{\n", sub.name, sub.category));
        push_list(&mut out, "objects", &sub.objects);
        push_list(&mut out, "morphisms", &sub.morphisms);
        out.push_str("}\n");
    }

    for system in &ws.systems {
        out.push('\n');
        match &system.category {
            Some(cat) => out.push_str(&format!("system {} in {} {{\n", system.name, cat)),
            None => out.push_str(&format!("system {} {{\n", system.name)),
        }
        match &system.body {
            SystemBody::Finite { index, le, objects, bonds } => {
                out.push_str("  kind finite\n");
                push_list(&mut out, "index", index);
                for (a, b) in le {
                    out.push_str(&format!("  le {a} {b}\n"));
                }
                for (element, obj) in objects {
                    out.push_str(&format!("  object {element} = {obj}\n"));
                }
                for (a, b, mor) in bonds {
                    out.push_str(&format!("  bond {a} {b} = {mor}\n"));
                }
            }
            SystemBody::Periodic { prefix_objects, prefix_bonds, cycle_objects, cycle_bonds } => {
                out.push_str("  kind periodic\n");
                for obj in prefix_objects {
                    out.push_str(&format!("  prefix-object {obj}\n"));
                }
                for mor in prefix_bonds {
                    out.push_str(&format!("  prefix-bond {mor}\n"));
                }
                for obj in cycle_objects {
                    out.push_str(&format!("  cycle-object {obj}\n"));
                }
                for mor in cycle_bonds {
                    out.push_str(&format!("  cycle-bond {mor}\n"));
                }
            }
            SystemBody::Divisibility { prefix, cycle } => {
                out.push_str("  kind divisibility\n");
                if !prefix.is_empty() {
                    let words: Vec<String> = prefix.iter().map(u64::to_string).collect();
                    push_list(&mut out, "prefix", &words);
                }
                if !cycle.is_empty() {
                    let words: Vec<String> = cycle.iter().map(u64::to_string).collect();
                    push_list(&mut out, "cycle", &words);
                }
            }
        }
        out.push_str("}\n");
    }

    for exp in &ws.expansions {
        out.push('\n');
        out.push_str(&format!("expansion {} of {} {{\n", exp.name, exp.category));
        out.push_str(&format!("  subcategory {}\n", exp.subcategory));
        out.push_str(&format!("  apex {}\n", exp.apex));
        out.push_str(&format!("  system {}\n", exp.system));
        match &exp.legs {
            LegsEntry::Total(legs) => {
                for (element, mor) in legs {
                    out.push_str(&format!("  leg {element} = {mor}\n"));
                }
            }
            LegsEntry::Periodic { prefix, cycle } => {
                for mor in prefix {
                    out.push_str(&format!("  leg-prefix {mor}\n"));
                }
                for mor in cycle {
                    out.push_str(&format!("  leg-cycle {mor}\n"));
                }
            }
        }
        out.push_str("}\n");
    }

    for w in &ws.witnesses {
        out.push('\n');
        out.push_str(&format!("witness {} for {} {{\n", w.name, w.category));
        out.push_str(&format!("  kind {}\n", if w.uniform { "uniform" } else { "movable" }));
        out.push_str(&format!("  target {}\n", w.target));
        out.push_str(&format!("  mover {}\n", w.mover));
        out.push_str(&format!("  m {}\n", w.m));
        for (p, u) in &w.factors {
            out.push_str(&format!("  factor {p} = {u}\n"));
        }
        out.push_str("}\n");
    }

    out
}

/// The canonical raw form of a validated category: morphisms in id
/// order, identities in object order, and only the composites the laws
/// do not already determine (identity composites are implied).
pub fn raw_of(cat: &FinCategory) -> RawCategory {
    let is_id = |m| cat.identity(cat.dom(m)) == m;
    let mut composites = Vec::new();
    for g in cat.morphisms() {
        for f in cat.morphisms() {
            if is_id(g) || is_id(f) {
                continue;
            }
            if let Some(gf) = cat.compose_opt(g, f) {
                composites.push((
                    cat.morphism_name(g).to_string(),
                    cat.morphism_name(f).to_string(),
                    cat.morphism_name(gf).to_string(),
                ));
            }
        }
    }
    RawCategory {
        name: cat.name().to_string(),
        objects: cat.objects().map(|o| cat.object_name(o).to_string()).collect(),
        morphisms: cat
            .morphisms()
            .map(|m| RawMorphism {
                name: cat.morphism_name(m).to_string(),
                dom: cat.object_name(cat.dom(m)).to_string(),
                cod: cat.object_name(cat.cod(m)).to_string(),
            })
            .collect(),
        identities: cat
            .objects()
            .map(|o| {
                (cat.object_name(o).to_string(), cat.morphism_name(cat.identity(o)).to_string())
            })
            .collect(),
        composites,
    }
}

/// The entry form of a subcategory spec over its validated category.
pub fn subcategory_entry(cat: &FinCategory, spec: &SubcategorySpec) -> SubcategoryEntry {
    SubcategoryEntry {
        name: spec.name.clone(),
        category: cat.name().to_string(),
        objects: spec.objects.iter().map(|&o| cat.object_name(o).to_string()).collect(),
        morphisms: spec.morphisms.iter().map(|&m| cat.morphism_name(m).to_string()).collect(),
    }
}

/// The entry form of a system. `category` names the category the entry
/// declares itself over (ignored for the arithmetic kind); bond names
/// are taken from the system's own ambient, whose names the declared
/// category shares even when the system lives in a restriction.
pub fn system_entry(name: &str, category: &str, sys: &System) -> SystemEntry {
    let body = match sys {
        System::Finite(s) => {
            let cat = &s.ambient;
            SystemBody::Finite {
                index: (0..s.index.len()).map(|i| s.index.name(i).to_string()).collect(),
                le: s
                    .index
                    .comparable_pairs()
                    .into_iter()
                    .filter(|&(a, b)| a != b)
                    .map(|(a, b)| (s.index.name(a).to_string(), s.index.name(b).to_string()))
                    .collect(),
                objects: s
                    .objects
                    .iter()
                    .enumerate()
                    .map(|(i, &o)| (s.index.name(i).to_string(), cat.object_name(o).to_string()))
                    .collect(),
                bonds: s
                    .bonds
                    .iter()
                    .filter(|((a, b), _)| a != b)
                    .map(|(&(a, b), &m)| {
                        (
                            s.index.name(a).to_string(),
                            s.index.name(b).to_string(),
                            cat.morphism_name(m).to_string(),
                        )
                    })
                    .collect(),
            }
        }
        System::Periodic(s) => {
            let cat = &s.ambient;
            let objs = |v: &[crate::fincat::ObjId]| {
                v.iter().map(|&o| cat.object_name(o).to_string()).collect()
            };
            let mors =
                |v: &[MorId]| v.iter().map(|&m| cat.morphism_name(m).to_string()).collect();
            SystemBody::Periodic {
                prefix_objects: objs(&s.prefix_objects),
                prefix_bonds: mors(&s.prefix_bonds),
                cycle_objects: objs(&s.cycle_objects),
                cycle_bonds: mors(&s.cycle_bonds),
            }
        }
        System::Divisibility(s) => {
            SystemBody::Divisibility { prefix: s.prefix.clone(), cycle: s.cycle.clone() }
        }
    };
    let category = match body {
        SystemBody::Divisibility { .. } => None,
        _ => Some(category.to_string()),
    };
    SystemEntry { name: name.to_string(), category, body }
}

/// The entry form of an expansion, referencing its subcategory and
/// system by the given entry names.
pub fn expansion_entry(
    name: &str,
    subcategory: &str,
    system: &str,
    exp: &Expansion,
) -> ExpansionEntry {
    let cat = &exp.ambient;
    let legs = match (&exp.legs, &exp.system) {
        (Legs::Total(legs), System::Finite(s)) => LegsEntry::Total(
            legs.iter()
                .enumerate()
                .map(|(i, &m)| (s.index.name(i).to_string(), cat.morphism_name(m).to_string()))
                .collect(),
        ),
        (Legs::Total(legs), _) => LegsEntry::Total(
            legs.iter()
                .enumerate()
                .map(|(i, &m)| (i.to_string(), cat.morphism_name(m).to_string()))
                .collect(),
        ),
        (Legs::Periodic { prefix, cycle }, _) => {
            let mors =
                |v: &[MorId]| v.iter().map(|&m| cat.morphism_name(m).to_string()).collect();
            LegsEntry::Periodic { prefix: mors(prefix), cycle: mors(cycle) }
        }
    };
    ExpansionEntry {
        name: name.to_string(),
        category: cat.name().to_string(),
        subcategory: subcategory.to_string(),
        system: system.to_string(),
        apex: cat.object_name(exp.apex).to_string(),
        legs,
    }
}

pub fn witness_entry(
    cat: &FinCategory,
    name: &str,
    witness: &MovabilityWitness,
    uniform: bool,
) -> WitnessEntry {
    WitnessEntry {
        name: name.to_string(),
        category: cat.name().to_string(),
        uniform,
        target: cat.object_name(witness.target).to_string(),
        mover: cat.object_name(witness.mover).to_string(),
        m: cat.morphism_name(witness.m).to_string(),
        factors: witness
            .factors
            .iter()
            .map(|(&p, &u)| {
                (cat.morphism_name(p).to_string(), cat.morphism_name(u).to_string())
            })
            .collect(),
    }
}

// ---------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("no {kind} named `{name}` in the workspace")]
    UnknownEntry { kind: &'static str, name: String },
    #[error("`{name}`: {source}")]
    Category { name: String, source: CatError },
    #[error("`{entry}` refers to `{name}`, which `{scope}` does not contain")]
    UnknownMember { entry: String, scope: String, name: String },
    #[error("`{entry}`: {message}")]
    Shape { entry: String, message: String },
    #[error("`{entry}`: {source}")]
    System { entry: String, source: SystemError },
}

/// A witness section resolved against its category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuiltWitness {
    Movable(MovabilityWitness),
    Uniform(UniformMovabilityWitness),
}

impl WitnessEntry {
    /// Resolves the named members against `cat`, which need not be the
    /// workspace's own build of `self.category`.
    pub fn resolve(&self, cat: &FinCategory) -> Result<BuiltWitness, BuildError> {
        let scope = cat.name();
        let target = member(cat.object(&self.target), &self.name, scope, &self.target)?;
        let mover = member(cat.object(&self.mover), &self.name, scope, &self.mover)?;
        let m = member(cat.morphism(&self.m), &self.name, scope, &self.m)?;
        let mut factors = BTreeMap::new();
        for (p, u) in &self.factors {
            let p = member(cat.morphism(p), &self.name, scope, p)?;
            let u = member(cat.morphism(u), &self.name, scope, u)?;
            factors.insert(p, u);
        }
        let witness = MovabilityWitness { target, mover, m, factors };
        Ok(if self.uniform {
            BuiltWitness::Uniform(UniformMovabilityWitness(witness))
        } else {
            BuiltWitness::Movable(witness)
        })
    }
}

/// Identity composites left implicit by the file format, filled in from
/// the identity laws; explicitly declared pairs are left untouched so a
/// deliberately broken declaration still reaches the validator.
pub(crate) fn fill_identity_composites(raw: &RawCategory) -> RawCategory {
    let mut out = raw.clone();
    let declared: HashSet<(&str, &str)> =
        raw.composites.iter().map(|(g, f, _)| (g.as_str(), f.as_str())).collect();
    let id_of: HashMap<&str, &str> =
        raw.identities.iter().map(|(o, m)| (o.as_str(), m.as_str())).collect();
    let is_id: HashSet<&str> = raw.identities.iter().map(|(_, m)| m.as_str()).collect();
    for m in &raw.morphisms {
        if let Some(&id) = id_of.get(m.cod.as_str()) {
            if !declared.contains(&(id, m.name.as_str())) {
                out.composites.push((id.to_string(), m.name.clone(), m.name.clone()));
            }
        }
        if is_id.contains(m.name.as_str()) {
            continue;
        }
        if let Some(&id) = id_of.get(m.dom.as_str()) {
            if !declared.contains(&(m.name.as_str(), id)) {
                out.composites.push((m.name.clone(), id.to_string(), m.name.clone()));
            }
        }
    }
    out
}

impl WorkspaceFile {
    pub fn category_entry(&self, name: &str) -> Option<&RawCategory> {
        self.categories.iter().find(|c| c.name == name)
    }

    pub fn subcategory_entry(&self, name: &str) -> Option<&SubcategoryEntry> {
        self.subcategories.iter().find(|s| s.name == name)
    }

    pub fn system_entry(&self, name: &str) -> Option<&SystemEntry> {
        self.systems.iter().find(|s| s.name == name)
    }

    pub fn expansion_entry(&self, name: &str) -> Option<&ExpansionEntry> {
        self.expansions.iter().find(|e| e.name == name)
    }

    pub fn witness_entry(&self, name: &str) -> Option<&WitnessEntry> {
        self.witnesses.iter().find(|w| w.name == name)
    }

    pub fn build_category(&self, name: &str) -> Result<FinCategory, BuildError> {
        let raw = self
            .category_entry(name)
            .ok_or_else(|| BuildError::UnknownEntry { kind: "category", name: name.to_string() })?;
        FinCategory::validate(&fill_identity_composites(raw))
            .map_err(|source| BuildError::Category { name: name.to_string(), source })
    }

    pub fn build_subcategory(&self, name: &str) -> Result<(FinCategory, SubcategorySpec), BuildError> {
        let entry = self.subcategory_entry(name).ok_or_else(|| BuildError::UnknownEntry {
            kind: "subcategory",
            name: name.to_string(),
        })?;
        let cat = self.build_category(&entry.category)?;
        let objects = entry
            .objects
            .iter()
            .map(|o| member(cat.object(o), name, &entry.category, o))
            .collect::<Result<_, _>>()?;
        let morphisms = entry
            .morphisms
            .iter()
            .map(|m| member(cat.morphism(m), name, &entry.category, m))
            .collect::<Result<_, _>>()?;
        Ok((cat, SubcategorySpec::new(entry.name.clone(), objects, morphisms)))
    }

    /// Assemble the named system over its declared category (the
    /// restricted category is substituted when building an expansion).
    pub fn build_system(&self, name: &str) -> Result<System, BuildError> {
        let entry = self
            .system_entry(name)
            .ok_or_else(|| BuildError::UnknownEntry { kind: "system", name: name.to_string() })?;
        let ambient = match &entry.category {
            Some(cat) => Some(self.build_category(cat)?),
            None => None,
        };
        build_system_in(entry, ambient.as_ref())
    }

    pub fn build_expansion(&self, name: &str) -> Result<Expansion, BuildError> {
        let entry = self.expansion_entry(name).ok_or_else(|| BuildError::UnknownEntry {
            kind: "expansion",
            name: name.to_string(),
        })?;
        let (ambient, spec) = self.build_subcategory(&entry.subcategory)?;
        let restriction = restrict(&ambient, &spec)
            .map_err(|source| BuildError::Category { name: entry.subcategory.clone(), source })?;
        let sys_entry = self.system_entry(&entry.system).ok_or_else(|| {
            BuildError::UnknownEntry { kind: "system", name: entry.system.clone() }
        })?;
        let system = build_system_in(sys_entry, Some(&restriction.category))?;
        let apex = member(ambient.object(&entry.apex), name, &entry.category, &entry.apex)?;
        let legs = match (&entry.legs, &system) {
            (LegsEntry::Total(legs), System::Finite(s)) => {
                let mut by_position: Vec<Option<String>> = vec![None; s.index.len()];
                for (element, mor) in legs {
                    let position = s.index.element(element).map_err(|source| {
                        BuildError::System { entry: name.to_string(), source }
                    })?;
                    if by_position[position].is_some() {
                        return Err(BuildError::Shape {
                            entry: name.to_string(),
                            message: format!("leg at `{element}` given twice"),
                        });
                    }
                    by_position[position] = Some(mor.clone());
                }
                let mut built = Vec::new();
                for (position, slot) in by_position.into_iter().enumerate() {
                    let Some(mor) = slot else {
                        return Err(BuildError::Shape {
                            entry: name.to_string(),
                            message: format!("no leg at `{}`", s.index.name(position)),
                        });
                    };
                    built.push(member(ambient.morphism(&mor), name, &entry.category, &mor)?);
                }
                Legs::Total(built)
            }
            (LegsEntry::Total(legs), _) => {
                let built = legs
                    .iter()
                    .map(|(_, mor)| member(ambient.morphism(mor), name, &entry.category, mor))
                    .collect::<Result<_, _>>()?;
                Legs::Total(built)
            }
            (LegsEntry::Periodic { prefix, cycle }, _) => {
                let build = |mors: &[String]| -> Result<Vec<_>, BuildError> {
                    mors.iter()
                        .map(|mor| member(ambient.morphism(mor), name, &entry.category, mor))
                        .collect()
                };
                Legs::Periodic { prefix: build(prefix)?, cycle: build(cycle)? }
            }
        };
        Ok(Expansion { ambient, restriction, apex, system, legs })
    }

    pub fn build_witness(&self, name: &str) -> Result<(FinCategory, BuiltWitness), BuildError> {
        let entry = self
            .witness_entry(name)
            .ok_or_else(|| BuildError::UnknownEntry { kind: "witness", name: name.to_string() })?;
        let cat = self.build_category(&entry.category)?;
        let built = entry.resolve(&cat)?;
        Ok((cat, built))
    }
}

fn member<T>(found: Result<T, CatError>, entry: &str, scope: &str, name: &str) -> Result<T, BuildError> {
    found.map_err(|_| BuildError::UnknownMember {
        entry: entry.to_string(),
        scope: scope.to_string(),
        name: name.to_string(),
    })
}

fn build_system_in(entry: &SystemEntry, ambient: Option<&FinCategory>) -> Result<System, BuildError> {
    let name = &entry.name;
    let cat = |scope: &str| -> Result<&FinCategory, BuildError> {
        ambient.ok_or_else(|| BuildError::Shape {
            entry: name.clone(),
            message: format!("a {scope} system needs a category"),
        })
    };
    match &entry.body {
        SystemBody::Finite { index, le, objects, bonds } => {
            let cat = cat("finite-index")?;
            let scope = cat.name();
            let pairs: Vec<(usize, usize)> = le
                .iter()
                .map(|(a, b)| {
                    let index_of = |element: &str| {
                        index.iter().position(|i| i == element).ok_or_else(|| {
                            BuildError::UnknownMember {
                                entry: name.clone(),
                                scope: "the index".to_string(),
                                name: element.to_string(),
                            }
                        })
                    };
                    Ok((index_of(a)?, index_of(b)?))
                })
                .collect::<Result<_, BuildError>>()?;
            let order = DirectedPreorder::new(index.clone(), &pairs)
                .map_err(|source| BuildError::System { entry: name.clone(), source })?;
            let mut placed: Vec<Option<crate::fincat::ObjId>> = vec![None; index.len()];
            for (element, obj) in objects {
                let position = order
                    .element(element)
                    .map_err(|source| BuildError::System { entry: name.clone(), source })?;
                if placed[position].is_some() {
                    return Err(BuildError::Shape {
                        entry: name.clone(),
                        message: format!("object at `{element}` given twice"),
                    });
                }
                placed[position] = Some(member(cat.object(obj), name, scope, obj)?);
            }
            let mut built_objects = Vec::new();
            for (position, slot) in placed.into_iter().enumerate() {
                built_objects.push(slot.ok_or_else(|| BuildError::Shape {
                    entry: name.clone(),
                    message: format!("no object at `{}`", order.name(position)),
                })?);
            }
            let mut built_bonds = BTreeMap::new();
            for (a, b, mor) in bonds {
                let a = order
                    .element(a)
                    .map_err(|source| BuildError::System { entry: name.clone(), source })?;
                let b = order
                    .element(b)
                    .map_err(|source| BuildError::System { entry: name.clone(), source })?;
                let mor = member(cat.morphism(mor), name, scope, mor)?;
                if built_bonds.insert((a, b), mor).is_some() {
                    return Err(BuildError::Shape {
                        entry: name.clone(),
                        message: format!(
                            "bond {} {} given twice",
                            order.name(a),
                            order.name(b)
                        ),
                    });
                }
            }
            for (position, &obj) in built_objects.iter().enumerate() {
                built_bonds.entry((position, position)).or_insert_with(|| cat.identity(obj));
            }
            Ok(System::Finite(FiniteIndexSystem {
                ambient: cat.clone(),
                index: order,
                objects: built_objects,
                bonds: built_bonds,
            }))
        }
        SystemBody::Periodic { prefix_objects, prefix_bonds, cycle_objects, cycle_bonds } => {
            let cat = cat("periodic")?;
            let scope = cat.name();
            let objs = |names: &[String]| -> Result<Vec<_>, BuildError> {
                names.iter().map(|o| member(cat.object(o), name, scope, o)).collect()
            };
            let mors = |names: &[String]| -> Result<Vec<_>, BuildError> {
                names.iter().map(|m| member(cat.morphism(m), name, scope, m)).collect()
            };
            Ok(System::Periodic(PeriodicSequence {
                ambient: cat.clone(),
                prefix_objects: objs(prefix_objects)?,
                prefix_bonds: mors(prefix_bonds)?,
                cycle_objects: objs(cycle_objects)?,
                cycle_bonds: mors(cycle_bonds)?,
            }))
        }
        SystemBody::Divisibility { prefix, cycle } => Ok(System::Divisibility(
            DivisibilitySequence { prefix: prefix.clone(), cycle: cycle.clone() },
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::movability::verify_witness;
    use crate::prosys::validate_system;
    use crate::shapebridge::{theorem_check, Equivalence};

    fn pointed_workspace() -> WorkspaceFile {
        WorkspaceFile {
            categories: vec![raw_of(&fixtures::fix_a())],
            subcategories: vec![SubcategoryEntry {
                name: "codomain".into(),
                category: "FIX-A".into(),
                objects: vec!["s2".into()],
                morphisms: vec!["id_s2".into(), "swap".into(), "const_a".into(), "const_b".into()],
            }],
            systems: vec![
                SystemEntry {
                    name: "tail".into(),
                    category: Some("FIX-A".into()),
                    body: SystemBody::Periodic {
                        prefix_objects: vec![],
                        prefix_bonds: vec![],
                        cycle_objects: vec!["s2".into()],
                        cycle_bonds: vec!["const_a".into()],
                    },
                },
                SystemEntry {
                    name: "sol2".into(),
                    category: None,
                    body: SystemBody::Divisibility { prefix: vec![2, 2], cycle: vec![1] },
                },
            ],
            expansions: vec![ExpansionEntry {
                name: "points".into(),
                category: "FIX-A".into(),
                subcategory: "codomain".into(),
                system: "tail".into(),
                apex: "s1".into(),
                legs: LegsEntry::Periodic { prefix: vec![], cycle: vec!["pt_a".into()] },
            }],
            witnesses: vec![WitnessEntry {
                name: "w".into(),
                category: "FIX-A".into(),
                uniform: false,
                target: "s1".into(),
                mover: "s1".into(),
                m: "id_s1".into(),
                factors: vec![
                    ("id_s1".into(), "id_s1".into()),
                    ("collapse".into(), "pt_a".into()),
                ],
            }],
        }
    }

    #[test]
    fn canonical_text_round_trips_byte_for_byte() {
        let ws = pointed_workspace();
        let text = print_workspace(&ws);
        let reparsed = parse_workspace(&text).unwrap();
        assert_eq!(reparsed, ws);
        assert_eq!(print_workspace(&reparsed), text);
    }

    #[test]
    fn scrambled_fields_parse_to_the_same_workspace() {
        let canonical = "\
movcat-workspace 1

category walk {
  objects a b
  morphism id_a : a -> a
  morphism id_b : b -> b
  morphism f : a -> b
  identity a = id_a
  identity b = id_b
}
";
        let scrambled = "\
movcat-workspace 1
category walk {
  identity b = id_b   # declared before its morphism
  morphism id_a : a -> a
  morphism id_b : b -> b
  objects a b
  morphism f : a -> b
  identity a = id_a
}
";
        let from_scrambled = parse_workspace(scrambled).unwrap();
        let from_canonical = parse_workspace(canonical).unwrap();
        assert_eq!(from_scrambled.categories[0].name, "walk");
        assert_eq!(from_scrambled.categories[0].objects, from_canonical.categories[0].objects);
        let cat = from_scrambled.build_category("walk").unwrap();
        assert_eq!(cat, from_canonical.build_category("walk").unwrap());
        assert_eq!(cat.morphism_count(), 3);
    }

    #[test]
    fn missing_header_is_a_syntax_error() {
        let err = parse_workspace("").unwrap_err();
        assert!(matches!(err, ParseError::SyntaxError { line: 1, .. }));
        let err = parse_workspace("movcat-workspace 2\n").unwrap_err();
        assert!(matches!(err, ParseError::SyntaxError { line: 1, .. }));
    }

    #[test]
    fn duplicate_morphism_is_a_syntax_error() {
        let text = "\
movcat-workspace 1
category c {
  objects a
  morphism id_a : a -> a
  morphism id_a : a -> a
  identity a = id_a
}
";
        match parse_workspace(text).unwrap_err() {
            ParseError::SyntaxError { line, message, .. } => {
                assert_eq!(line, 5);
                assert!(message.contains("id_a"), "{message}");
            }
            other => panic!("expected a syntax error, got {other:?}"),
        }
    }

    #[test]
    fn compose_naming_an_unknown_morphism_is_unresolved() {
        let text = "\
movcat-workspace 1
category c {
  objects a
  morphism id_a : a -> a
  identity a = id_a
  compose id_a ghost = id_a
}
";
        assert_eq!(
            parse_workspace(text).unwrap_err(),
            ParseError::UnresolvedReference { line: 6, name: "ghost".into() },
        );
    }

    #[test]
    fn unclosed_sections_and_duplicate_names_are_syntax_errors() {
        let unclosed = "movcat-workspace 1\ncategory c {\n  objects a\n";
        assert!(matches!(parse_workspace(unclosed), Err(ParseError::SyntaxError { line: 2, .. })));

        let duplicated = "\
movcat-workspace 1
category c {
  objects a
  morphism id_a : a -> a
  identity a = id_a
}
category c {
  objects b
  morphism id_b : b -> b
  identity b = id_b
}
";
        match parse_workspace(duplicated).unwrap_err() {
            ParseError::SyntaxError { line, message, .. } => {
                assert_eq!(line, 7);
                assert!(message.contains("already declared on line 2"), "{message}");
            }
            other => panic!("expected a syntax error, got {other:?}"),
        }
    }

    #[test]
    fn references_across_sections_must_resolve() {
        let foreign = "\
movcat-workspace 1
subcategory s of ghost {
  objects a
  morphisms id_a
}
";
        assert_eq!(
            parse_workspace(foreign).unwrap_err(),
            ParseError::UnresolvedReference { line: 2, name: "ghost".into() },
        );

        let ws = pointed_workspace();
        let mut text = print_workspace(&ws);
        text = text.replace("leg-cycle pt_a", "leg-cycle ghost");
        match parse_workspace(&text).unwrap_err() {
            ParseError::UnresolvedReference { name, .. } => assert_eq!(name, "ghost"),
            other => panic!("expected an unresolved reference, got {other:?}"),
        }
    }

    #[test]
    fn expansion_parts_must_share_the_category() {
        let text = "\
movcat-workspace 1
category c {
  objects a
  morphism id_a : a -> a
  identity a = id_a
}
category d {
  objects b
  morphism id_b : b -> b
  identity b = id_b
}
subcategory s of d {
  objects b
  morphisms id_b
}
system sys in c {
  kind periodic
  cycle-object a
  cycle-bond id_a
}
expansion e of c {
  subcategory s
  apex a
  system sys
  leg-cycle id_a
}
";
        match parse_workspace(text).unwrap_err() {
            ParseError::SyntaxError { message, .. } => {
                assert!(message.contains("belongs to `d`"), "{message}");
            }
            other => panic!("expected a syntax error, got {other:?}"),
        }
    }

    #[test]
    fn built_category_recovers_the_fixture() {
        let ws = pointed_workspace();
        assert_eq!(ws.build_category("FIX-A").unwrap(), fixtures::fix_a());
    }

    #[test]
    fn built_expansion_is_valid_and_crosses_the_bridge() {
        let ws = pointed_workspace();
        let exp = ws.build_expansion("points").unwrap();
        assert!(exp.validate().is_empty());
        let (cat, spec) = ws.build_subcategory("codomain").unwrap();
        let report = theorem_check(&cat, &spec, exp.apex, &exp).unwrap();
        assert_eq!(report.equivalence, Equivalence::Consistent { holds: true });
    }

    #[test]
    fn built_systems_validate() {
        let ws = pointed_workspace();
        let tail = ws.build_system("tail").unwrap();
        assert!(validate_system(&tail).is_empty());
        let sol2 = ws.build_system("sol2").unwrap();
        assert_eq!(
            sol2,
            System::Divisibility(DivisibilitySequence { prefix: vec![2, 2], cycle: vec![1] })
        );
    }

    #[test]
    fn built_witness_passes_verification() {
        let ws = pointed_workspace();
        let (cat, built) = ws.build_witness("w").unwrap();
        match built {
            BuiltWitness::Movable(w) => assert!(verify_witness(&cat, &w).is_empty()),
            BuiltWitness::Uniform(_) => panic!("the fixture witness is the movable kind"),
        }
    }

    #[test]
    fn finite_systems_build_with_named_index_elements() {
        let text = "\
movcat-workspace 1
category poset {
  objects x y
  morphism id_x : x -> x
  morphism id_y : y -> y
  morphism step : y -> x
  identity x = id_x
  identity y = id_y
}
system chain in poset {
  kind finite
  index lo hi
  le lo hi
  object lo = x
  object hi = y
  bond lo hi = step
}
";
        let ws = parse_workspace(text).unwrap();
        let sys = ws.build_system("chain").unwrap();
        assert!(validate_system(&sys).is_empty());
        let System::Finite(s) = sys else { panic!("chain is a finite-index system") };
        assert_eq!(s.index.len(), 2);
        assert_eq!(s.index.name(1), "hi");
    }

    #[test]
    fn finite_systems_need_every_object_placed() {
        let text = "\
movcat-workspace 1
category poset {
  objects x
  morphism id_x : x -> x
  identity x = id_x
}
system gap in poset {
  kind finite
  index lo hi
  le lo hi
  object lo = x
}
";
        let ws = parse_workspace(text).unwrap();
        match ws.build_system("gap").unwrap_err() {
            BuildError::Shape { message, .. } => assert!(message.contains("no object at `hi`")),
            other => panic!("expected a shape error, got {other:?}"),
        }
    }

    #[test]
    fn expansion_systems_are_rehomed_into_the_subcategory() {
        let ws = {
            let mut ws = pointed_workspace();
            match &mut ws.systems[0].body {
                SystemBody::Periodic { cycle_bonds, .. } => cycle_bonds[0] = "pt_a".into(),
                _ => unreachable!(),
            }
            ws
        };
        // `pt_a` lives in fix-a but not in the codomain subcategory, so
        // the re-homing step has nothing to attach the bond to.
        match ws.build_expansion("points").unwrap_err() {
            BuildError::UnknownMember { scope, name, .. } => {
                assert_eq!(scope, "codomain");
                assert_eq!(name, "pt_a");
            }
            other => panic!("expected an unknown member, got {other:?}"),
        }
    }

    #[test]
    fn declared_identity_composites_are_not_overwritten() {
        let text = "\
movcat-workspace 1
category broken {
  objects a b
  morphism id_a : a -> a
  morphism id_b : b -> b
  morphism f : a -> b
  morphism g : a -> b
  identity a = id_a
  identity b = id_b
  compose id_b f = g
}
";
        let ws = parse_workspace(text).unwrap();
        match ws.build_category("broken").unwrap_err() {
            BuildError::Category { source: CatError::LawViolations(problems), .. } => {
                assert!(!problems.is_empty());
            }
            other => panic!("expected law violations, got {other:?}"),
        }
    }

    #[test]
    fn numbers_must_parse_in_arithmetic_systems() {
        let text = "\
movcat-workspace 1
system s {
  kind divisibility
  cycle 2 two
}
";
        match parse_workspace(text).unwrap_err() {
            ParseError::SyntaxError { line, message, .. } => {
                assert_eq!(line, 4);
                assert!(message.contains("two"), "{message}");
            }
            other => panic!("expected a syntax error, got {other:?}"),
        }
    }
}

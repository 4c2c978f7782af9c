//! Type augmentation from a class taxonomy.
//!
//! The taxonomy file is an edge list: one `child <whitespace> parent` pair
//! per line, `#` starts a comment. A line holding a single label names the
//! root (default `thing`). Labels are case-normalized to lowercase.

use std::collections::BTreeMap;

use crate::pddl::{DomainModel, TypeHierarchy};

pub const DEFAULT_ROOT: &str = "thing";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaxonomyError {
    #[error("line {line}: expected `child parent`")]
    Syntax { line: usize },
    #[error("line {line}: `{child}` already has parent `{existing}`")]
    ConflictingParent { line: usize, child: String, existing: String },
    #[error("taxonomy contains a cycle through `{0}`")]
    Cycle(String),
    #[error("parent `{0}` is neither a declared class nor the root")]
    UnknownParent(String),
    #[error("line {line}: root declared twice")]
    DuplicateRoot { line: usize },
    #[error("type `{ty}` is already declared under `{existing}`, not `{requested}`")]
    DuplicateType { ty: String, existing: String, requested: String },
    #[error("parent type `{0}` is not declared in the domain")]
    UndeclaredParent(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Taxonomy {
    root: String,
    /// child -> parent, in file order.
    edges: Vec<(String, String)>,
}

impl Default for Taxonomy {
    fn default() -> Self {
        Taxonomy { root: DEFAULT_ROOT.to_string(), edges: Vec::new() }
    }
}

impl Taxonomy {
    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn parent(&self, class: &str) -> Option<&str> {
        self.edges.iter().find(|(c, _)| c == class).map(|(_, p)| p.as_str())
    }

    pub fn contains(&self, class: &str) -> bool {
        class == self.root || self.edges.iter().any(|(c, _)| c == class)
    }

    /// Direct children of `class`, in file order.
    pub fn children<'a>(&'a self, class: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.edges.iter().filter(move |(_, p)| p == class).map(|(c, _)| c.as_str())
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.edges.iter().map(|(c, p)| (c.as_str(), p.as_str()))
    }
}

pub fn load_taxonomy(text: &str) -> Result<Taxonomy, TaxonomyError> {
    let mut root: Option<String> = None;
    let mut edges: Vec<(String, String)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let words: Vec<String> = content.split_whitespace().map(str::to_lowercase).collect();
        match words.as_slice() {
            [r] => {
                if root.replace(r.clone()).is_some() {
                    return Err(TaxonomyError::DuplicateRoot { line });
                }
            }
            [child, parent] => {
                if child == parent {
                    return Err(TaxonomyError::Cycle(child.clone()));
                }
                match edges.iter().find(|(c, _)| c == child) {
                    Some((_, p)) if p == parent => {}
                    Some((_, p)) => {
                        return Err(TaxonomyError::ConflictingParent { line, child: child.clone(), existing: p.clone() })
                    }
                    None => edges.push((child.clone(), parent.clone())),
                }
            }
            _ => return Err(TaxonomyError::Syntax { line }),
        }
    }
    let tax = Taxonomy { root: root.unwrap_or_else(|| DEFAULT_ROOT.to_string()), edges };
    for (_, p) in &tax.edges {
        if !tax.contains(p) {
            return Err(TaxonomyError::UnknownParent(p.clone()));
        }
    }
    for (c, _) in &tax.edges {
        let mut cur = c.as_str();
        for _ in 0..=tax.edges.len() {
            match tax.parent(cur) {
                Some(p) if p == c => return Err(TaxonomyError::Cycle(c.clone())),
                Some(p) => cur = p,
                None => break,
            }
        }
    }
    Ok(tax)
}

/// New `(type, parent)` pairs harvested from the taxonomy.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AugmentedTypeSet {
    pub additions: Vec<(String, String)>,
}

impl AugmentedTypeSet {
    pub fn len(&self) -> usize {
        self.additions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.additions.is_empty()
    }

    pub fn parent_of(&self, ty: &str) -> Option<&str> {
        self.additions.iter().find(|(t, _)| t == ty).map(|(_, p)| p.as_str())
    }

    pub fn contains(&self, ty: &str) -> bool {
        self.parent_of(ty).is_some()
    }

    /// Additions grouped by parent.
    pub fn by_parent(&self) -> BTreeMap<&str, Vec<&str>> {
        let mut m: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (t, p) in &self.additions {
            m.entry(p.as_str()).or_default().push(t.as_str());
        }
        m
    }
}

/// For each predefined type (in declaration order) that names a taxonomy
/// class, emits that class's direct children not already in the hierarchy.
pub fn augment_types(predefined: &TypeHierarchy, tax: &Taxonomy) -> AugmentedTypeSet {
    let mut additions: Vec<(String, String)> = Vec::new();
    for ty in predefined.types() {
        if !tax.contains(ty) {
            continue;
        }
        for child in tax.children(ty) {
            if !predefined.contains(child) && !additions.iter().any(|(c, _)| c == child) {
                additions.push((child.to_string(), ty.to_string()));
            }
        }
    }
    AugmentedTypeSet { additions }
}

/// Adds the augmented types to a domain's hierarchy. Re-adding a type under
/// the same parent is a no-op.
pub fn integrate_types(dom: &DomainModel, aug: &AugmentedTypeSet) -> Result<DomainModel, TaxonomyError> {
    let mut out = dom.clone();
    for (ty, parent) in &aug.additions {
        if let Some(existing) = out.types.parent(ty) {
            if existing == parent {
                continue;
            }
            return Err(TaxonomyError::DuplicateType {
                ty: ty.clone(),
                existing: existing.to_string(),
                requested: parent.clone(),
            });
        }
        if out.types.contains(ty) {
            return Err(TaxonomyError::DuplicateType { ty: ty.clone(), existing: "object".into(), requested: parent.clone() });
        }
        out.types
            .add_type(ty, parent)
            .map_err(|_| TaxonomyError::UndeclaredParent(parent.clone()))?;
    }
    Ok(out)
}

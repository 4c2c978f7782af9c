use std::collections::HashMap;
use std::fmt;

/// Name of the implicit root type.
pub const ROOT_TYPE: &str = "object";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TypeError {
    #[error("undeclared type `{0}`")]
    Undeclared(String),
    #[error("type `{0}` is already declared")]
    Duplicate(String),
    #[error("type `{ty}` already has parent `{existing}`, cannot re-parent under `{requested}`")]
    ConflictingParent { ty: String, existing: String, requested: String },
    #[error("type hierarchy contains a cycle through `{0}`")]
    Cycle(String),
}

/// Single-inheritance type tree rooted at `object`.
///
/// Declaration order is kept so that serialisation and grounding are
/// deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TypeHierarchy {
    order: Vec<String>,
    parent: HashMap<String, String>,
}

impl TypeHierarchy {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a hierarchy from `(type, parent)` pairs. Parents may be declared
    /// after their children; the result is checked for dangling parents and
    /// cycles.
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self, TypeError>
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let mut h = TypeHierarchy::new();
        for (ty, parent) in pairs {
            let (ty, parent) = (ty.into(), parent.into());
            if ty == ROOT_TYPE {
                continue;
            }
            match h.parent.get(&ty) {
                Some(existing) if *existing == parent => continue,
                Some(existing) => {
                    return Err(TypeError::ConflictingParent {
                        ty,
                        existing: existing.clone(),
                        requested: parent,
                    })
                }
                None => {}
            }
            h.order.push(ty.clone());
            h.parent.insert(ty, parent);
        }
        for ty in &h.order {
            let p = &h.parent[ty];
            if !h.contains(p) {
                return Err(TypeError::Undeclared(p.clone()));
            }
        }
        h.check_acyclic()?;
        Ok(h)
    }

    fn check_acyclic(&self) -> Result<(), TypeError> {
        for ty in &self.order {
            let mut cur = ty.as_str();
            for _ in 0..=self.order.len() {
                match self.parent.get(cur) {
                    Some(p) => cur = p,
                    None => break,
                }
            }
            if cur != ROOT_TYPE {
                return Err(TypeError::Cycle(ty.clone()));
            }
        }
        Ok(())
    }

    /// Adds a new leaf type under an existing parent.
    pub fn add_type(&mut self, ty: &str, parent: &str) -> Result<(), TypeError> {
        if self.contains(ty) {
            return Err(TypeError::Duplicate(ty.to_string()));
        }
        if !self.contains(parent) {
            return Err(TypeError::Undeclared(parent.to_string()));
        }
        self.order.push(ty.to_string());
        self.parent.insert(ty.to_string(), parent.to_string());
        Ok(())
    }

    pub fn contains(&self, ty: &str) -> bool {
        ty == ROOT_TYPE || self.parent.contains_key(ty)
    }

    pub fn parent(&self, ty: &str) -> Option<&str> {
        self.parent.get(ty).map(String::as_str)
    }

    /// Declared types in declaration order, excluding the root.
    pub fn types(&self) -> impl Iterator<Item = &str> {
        self.order.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Direct children of `ty` in declaration order.
    pub fn children<'a>(&'a self, ty: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.order
            .iter()
            .filter(move |t| self.parent[*t] == ty)
            .map(String::as_str)
    }

    /// Reflexive subtype test: `sub` reaches `sup` through parent edges.
    pub fn is_subtype(&self, sub: &str, sup: &str) -> Result<bool, TypeError> {
        for t in [sub, sup] {
            if !self.contains(t) {
                return Err(TypeError::Undeclared(t.to_string()));
            }
        }
        let mut cur = sub;
        loop {
            if cur == sup {
                return Ok(true);
            }
            match self.parent.get(cur) {
                Some(p) => cur = p,
                None => return Ok(false),
            }
        }
    }

    /// Subtype test for already-validated names; undeclared names are never subtypes.
    pub fn fits(&self, sub: &str, sup: &str) -> bool {
        self.is_subtype(sub, sup).unwrap_or(false)
    }
}

/// A parameter type: a single named type or an `(either ...)` union.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeRef {
    Named(String),
    Either(Vec<String>),
}

impl TypeRef {
    pub fn object() -> Self {
        TypeRef::Named(ROOT_TYPE.to_string())
    }

    pub fn members(&self) -> &[String] {
        match self {
            TypeRef::Named(t) => std::slice::from_ref(t),
            TypeRef::Either(ts) => ts,
        }
    }

    /// True when every member of `self` is a subtype of some member of `other`.
    pub fn within(&self, other: &TypeRef, h: &TypeHierarchy) -> bool {
        self.members()
            .iter()
            .all(|m| other.members().iter().any(|o| h.fits(m, o)))
    }

    /// True when a value of concrete type `ty` can bind to this parameter type.
    pub fn admits(&self, ty: &str, h: &TypeHierarchy) -> bool {
        self.members().iter().any(|m| h.fits(ty, m))
    }
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeRef::Named(t) => f.write_str(t),
            TypeRef::Either(ts) => write!(f, "(either {})", ts.join(" ")),
        }
    }
}

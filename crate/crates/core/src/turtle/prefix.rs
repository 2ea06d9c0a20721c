use super::TurtleError;

/// Ordered prefix → namespace table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixMap {
    entries: Vec<(String, String)>,
}

fn valid_prefix_name(p: &str) -> bool {
    if p.is_empty() {
        return true;
    }
    let mut chars = p.chars();
    let first_ok = chars.next().is_some_and(char::is_alphabetic);
    first_ok
        && p.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '.')
        && !p.ends_with('.')
}

/// Local parts the serializer writes bare. Anything else falls back to `<...>`.
pub(crate) fn is_safe_local(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        None => return true,
        Some(c) if c.is_ascii_alphanumeric() || c == '_' => {}
        Some(_) => return false,
    }
    local
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
        && !local.ends_with('.')
}

impl PrefixMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a prefix. Duplicates and empty namespaces are rejected.
    pub fn insert(&mut self, prefix: &str, namespace: &str) -> Result<(), TurtleError> {
        if !valid_prefix_name(prefix) {
            return Err(TurtleError::Prefix(format!("invalid prefix name {prefix:?}")));
        }
        if namespace.is_empty() {
            return Err(TurtleError::Prefix(format!("prefix {prefix:?} maps to an empty IRI")));
        }
        if self.get(prefix).is_some() {
            return Err(TurtleError::Prefix(format!("duplicate prefix {prefix:?}")));
        }
        self.entries.push((prefix.to_string(), namespace.to_string()));
        Ok(())
    }

    /// Adds or replaces, keeping the original position on replace.
    pub fn set(&mut self, prefix: &str, namespace: &str) -> Result<(), TurtleError> {
        if let Some(e) = self.entries.iter_mut().find(|(p, _)| p == prefix) {
            if namespace.is_empty() {
                return Err(TurtleError::Prefix(format!("prefix {prefix:?} maps to an empty IRI")));
            }
            e.1 = namespace.to_string();
            return Ok(());
        }
        self.insert(prefix, namespace)
    }

    pub fn get(&self, prefix: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(p, _)| p == prefix)
            .map(|(_, ns)| ns.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(p, ns)| (p.as_str(), ns.as_str()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn expand(&self, prefix: &str, local: &str) -> Option<String> {
        self.get(prefix).map(|ns| format!("{ns}{local}"))
    }

    /// `prefix:local` using the longest matching namespace, when the local part
    /// can be written without escapes.
    pub fn compact(&self, iri: &str) -> Option<String> {
        let (prefix, ns) = self
            .entries
            .iter()
            .filter(|(_, ns)| iri.starts_with(ns.as_str()))
            .max_by_key(|(_, ns)| ns.len())?;
        let local = &iri[ns.len()..];
        is_safe_local(local).then(|| format!("{prefix}:{local}"))
    }
}

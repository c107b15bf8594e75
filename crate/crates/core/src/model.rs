//! Dimensions, tags and contexts.
//!
//! A context is a finite relation between dimensions and tags. Contexts
//! where every dimension appears at most once are *simple*; a simple context
//! with exactly one pair is a *micro* context. Non-simple contexts are
//! ordinary values here, and operators that need simplicity check it when
//! they are applied.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};

/// Name of a dimension. Dimension identity is by name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dim(Arc<str>);

impl Dim {
    pub fn new(name: &str) -> Self {
        Dim(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Dim {
    fn from(name: &str) -> Self {
        Dim::new(name)
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_')
}

/// A named, ordered set of labels. Labels order by declaration.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct EnumDomain {
    name: Arc<str>,
    labels: Vec<Arc<str>>,
}

impl EnumDomain {
    pub fn new<S: AsRef<str>>(name: &str, labels: &[S]) -> Result<Arc<Self>> {
        let ill = |reason: String| Error::IllFormedDomain {
            dim: name.to_string(),
            reason,
        };
        if labels.is_empty() {
            return Err(ill("enumeration has no labels".into()));
        }
        let mut seen = BTreeSet::new();
        for label in labels {
            let label = label.as_ref();
            if !is_identifier(label) {
                return Err(ill(format!("`{label}` is not a valid label")));
            }
            if !seen.insert(label) {
                return Err(ill(format!("label `{label}` is repeated")));
            }
        }
        Ok(Arc::new(EnumDomain {
            name: Arc::from(name),
            labels: labels.iter().map(|l| Arc::from(l.as_ref())).collect(),
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(|l| &**l)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| &**l == label)
    }

    /// The tag for `label`, if the label belongs to this domain.
    pub fn tag(self: &Arc<Self>, label: &str) -> Option<TagValue> {
        self.index_of(label).map(|index| {
            TagValue::Enum(EnumTag {
                domain: Arc::clone(self),
                index,
            })
        })
    }
}

/// An element of an [`EnumDomain`].
#[derive(Debug, Clone)]
pub struct EnumTag {
    domain: Arc<EnumDomain>,
    index: usize,
}

impl EnumTag {
    pub fn domain(&self) -> &Arc<EnumDomain> {
        &self.domain
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn label(&self) -> &str {
        &self.domain.labels[self.index]
    }

    fn same_domain(&self, other: &EnumTag) -> bool {
        Arc::ptr_eq(&self.domain, &other.domain) || self.domain.name == other.domain.name
    }
}

impl PartialEq for EnumTag {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && self.same_domain(other)
    }
}

impl Eq for EnumTag {}

impl std::hash::Hash for EnumTag {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.domain.name.hash(state);
        self.index.hash(state);
    }
}

/// The kind of tags a dimension accepts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TagKind {
    Int,
    Str,
    Bool,
    Enum(Arc<EnumDomain>),
}

impl TagKind {
    /// Whether a range operator can walk this kind one step at a time.
    pub fn is_stepped(&self) -> bool {
        matches!(self, TagKind::Int | TagKind::Enum(_))
    }
}

impl fmt::Display for TagKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TagKind::Int => f.write_str("int"),
            TagKind::Str => f.write_str("str"),
            TagKind::Bool => f.write_str("bool"),
            TagKind::Enum(domain) => {
                f.write_str("enum{")?;
                for (i, label) in domain.labels().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    f.write_str(label)?;
                }
                f.write_str("}")
            }
        }
    }
}

/// A tag value.
///
/// The derived-looking `Ord` impl is a storage order: it ranks kinds first
/// and only agrees with the tag order inside one kind. Use
/// [`TagValue::try_cmp`] for the order the calculus cares about.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TagValue {
    Int(BigInt),
    Str(Arc<str>),
    Bool(bool),
    Enum(EnumTag),
}

impl TagValue {
    pub fn int(value: impl Into<BigInt>) -> Self {
        TagValue::Int(value.into())
    }

    pub fn str(value: &str) -> Self {
        TagValue::Str(Arc::from(value))
    }

    pub fn kind(&self) -> TagKind {
        match self {
            TagValue::Int(_) => TagKind::Int,
            TagValue::Str(_) => TagKind::Str,
            TagValue::Bool(_) => TagKind::Bool,
            TagValue::Enum(tag) => TagKind::Enum(Arc::clone(&tag.domain)),
        }
    }

    pub fn kind_name(&self) -> String {
        match self {
            TagValue::Int(_) => "int".into(),
            TagValue::Str(_) => "str".into(),
            TagValue::Bool(_) => "bool".into(),
            TagValue::Enum(tag) => format!("enum {}", tag.domain.name),
        }
    }

    pub fn has_kind(&self, kind: &TagKind) -> bool {
        match (self, kind) {
            (TagValue::Int(_), TagKind::Int)
            | (TagValue::Str(_), TagKind::Str)
            | (TagValue::Bool(_), TagKind::Bool) => true,
            (TagValue::Enum(tag), TagKind::Enum(domain)) => {
                Arc::ptr_eq(&tag.domain, domain) || tag.domain.name == domain.name
            }
            _ => false,
        }
    }

    /// Order between two tags of the same kind; `None` across kinds.
    pub fn try_cmp(&self, other: &TagValue) -> Option<Ordering> {
        match (self, other) {
            (TagValue::Int(a), TagValue::Int(b)) => Some(a.cmp(b)),
            (TagValue::Str(a), TagValue::Str(b)) => Some(a.cmp(b)),
            (TagValue::Bool(a), TagValue::Bool(b)) => Some(a.cmp(b)),
            (TagValue::Enum(a), TagValue::Enum(b)) if a.same_domain(b) => Some(a.index.cmp(&b.index)),
            _ => None,
        }
    }

    /// The next tag in a stepped order, or `None` at the end of an
    /// enumeration and for unstepped kinds.
    pub fn successor(&self) -> Option<TagValue> {
        match self {
            TagValue::Int(n) => Some(TagValue::Int(n + BigInt::one())),
            TagValue::Enum(tag) if tag.index + 1 < tag.domain.len() => Some(TagValue::Enum(EnumTag {
                domain: Arc::clone(&tag.domain),
                index: tag.index + 1,
            })),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            TagValue::Int(_) => 0,
            TagValue::Str(_) => 1,
            TagValue::Bool(_) => 2,
            TagValue::Enum(_) => 3,
        }
    }
}

impl PartialOrd for TagValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TagValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (TagValue::Enum(a), TagValue::Enum(b)) => a.domain.name.cmp(&b.domain.name).then(a.index.cmp(&b.index)),
            _ => self.try_cmp(other).unwrap_or_else(|| self.rank().cmp(&other.rank())),
        }
    }
}

impl fmt::Display for TagValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TagValue::Int(n) => write!(f, "{n}"),
            TagValue::Str(s) => write!(f, "{:?}", &**s),
            TagValue::Bool(b) => write!(f, "{b}"),
            TagValue::Enum(tag) => f.write_str(tag.label()),
        }
    }
}

impl From<i64> for TagValue {
    fn from(n: i64) -> Self {
        TagValue::Int(BigInt::from(n))
    }
}

impl From<bool> for TagValue {
    fn from(b: bool) -> Self {
        TagValue::Bool(b)
    }
}

/// A registered dimension: its name, the kind of tag it carries and an
/// optional finite domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dimension {
    name: Dim,
    tag_type: TagKind,
    domain: Option<Vec<TagValue>>,
}

impl Dimension {
    pub fn name(&self) -> &Dim {
        &self.name
    }

    pub fn tag_type(&self) -> &TagKind {
        &self.tag_type
    }

    /// The explicitly declared domain, if any.
    pub fn declared_domain(&self) -> Option<&[TagValue]> {
        self.domain.as_deref()
    }

    /// The finite domain used for enumeration. Enumerations and booleans
    /// are finite even without a declaration.
    pub fn finite_domain(&self) -> Option<Vec<TagValue>> {
        if let Some(domain) = &self.domain {
            return Some(domain.clone());
        }
        match &self.tag_type {
            TagKind::Bool => Some(vec![TagValue::Bool(false), TagValue::Bool(true)]),
            TagKind::Enum(domain) => Some(
                (0..domain.len())
                    .map(|index| {
                        TagValue::Enum(EnumTag {
                            domain: Arc::clone(domain),
                            index,
                        })
                    })
                    .collect(),
            ),
            TagKind::Int | TagKind::Str => None,
        }
    }

    /// Checks that `tag` is well kinded for this dimension and inside its
    /// declared domain.
    pub fn check_tag(&self, tag: &TagValue) -> Result<()> {
        if !tag.has_kind(&self.tag_type) {
            return Err(Error::TagTypeMismatch {
                dim: self.name.to_string(),
                tag: tag.to_string(),
                expected: self.tag_type.clone(),
                found: tag.kind_name(),
            });
        }
        if let Some(domain) = &self.domain {
            if !domain.contains(tag) {
                return Err(Error::TagOutsideDomain {
                    dim: self.name.to_string(),
                    tag: tag.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Resolves a bare label against this dimension's enumeration.
    pub fn label(&self, label: &str) -> Option<TagValue> {
        match &self.tag_type {
            TagKind::Enum(domain) => domain.tag(label),
            _ => None,
        }
    }
}

/// The set of known dimensions. Single writer, many readers.
#[derive(Debug, Clone, Default)]
pub struct DimensionRegistry {
    dims: BTreeMap<Dim, Dimension>,
}

impl DimensionRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: &str, tag_type: TagKind, domain: Option<Vec<TagValue>>) -> Result<&Dimension> {
        if !is_identifier(name) {
            return Err(Error::InvalidDimensionName(name.to_string()));
        }
        let dim = Dim::new(name);
        if self.dims.contains_key(&dim) {
            return Err(Error::DuplicateDimension(name.to_string()));
        }
        if let Some(domain) = &domain {
            check_domain(name, &tag_type, domain)?;
        }
        let dimension = Dimension {
            name: dim.clone(),
            tag_type,
            domain,
        };
        Ok(self.dims.entry(dim).or_insert(dimension))
    }

    pub fn get(&self, name: &str) -> Result<&Dimension> {
        self.dims
            .get(name)
            .ok_or_else(|| Error::UnknownDimension(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.dims.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Dimension> {
        self.dims.values()
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Builds a context from `(dimension, tag)` pairs, checking every pair.
    /// Duplicate pairs collapse; the result may be non-simple.
    pub fn make_context<'a, I>(&self, pairs: I) -> Result<Context>
    where
        I: IntoIterator<Item = (&'a str, TagValue)>,
    {
        let mut entries = BTreeSet::new();
        for (name, tag) in pairs {
            let dimension = self.get(name)?;
            dimension.check_tag(&tag)?;
            entries.insert(MicroContext {
                dim: dimension.name.clone(),
                tag,
            });
        }
        Ok(Context { entries })
    }

    pub fn make_dimset<'a, I>(&self, names: I) -> Result<DimSet>
    where
        I: IntoIterator<Item = &'a str>,
    {
        names
            .into_iter()
            .map(|name| self.get(name).map(|d| d.name.clone()))
            .collect()
    }
}

impl std::borrow::Borrow<str> for Dim {
    fn borrow(&self) -> &str {
        &self.0
    }
}

fn check_domain(name: &str, kind: &TagKind, domain: &[TagValue]) -> Result<()> {
    let ill = |reason: String| Error::IllFormedDomain {
        dim: name.to_string(),
        reason,
    };
    for tag in domain {
        if !tag.has_kind(kind) {
            return Err(ill(format!("`{tag}` is not of kind {kind}")));
        }
    }
    for pair in domain.windows(2) {
        if pair[0].try_cmp(&pair[1]) != Some(Ordering::Less) {
            return Err(ill(format!(
                "elements must be strictly increasing, found `{}` before `{}`",
                pair[0], pair[1]
            )));
        }
    }
    Ok(())
}

/// One `(dimension, tag)` pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MicroContext {
    pub dim: Dim,
    pub tag: TagValue,
}

impl MicroContext {
    pub fn new(dim: impl Into<Dim>, tag: impl Into<TagValue>) -> Self {
        MicroContext {
            dim: dim.into(),
            tag: tag.into(),
        }
    }
}

impl fmt::Display for MicroContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.dim, self.tag)
    }
}

/// A finite set of dimensions.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DimSet(BTreeSet<Dim>);

impl DimSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, dim: &Dim) -> bool {
        self.0.contains(dim)
    }

    pub fn insert(&mut self, dim: Dim) -> bool {
        self.0.insert(dim)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Dim> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn union(&self, other: &DimSet) -> DimSet {
        DimSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &DimSet) -> DimSet {
        DimSet(self.0.intersection(&other.0).cloned().collect())
    }
}

impl FromIterator<Dim> for DimSet {
    fn from_iter<T: IntoIterator<Item = Dim>>(iter: T) -> Self {
        DimSet(iter.into_iter().collect())
    }
}

impl<'a> FromIterator<&'a str> for DimSet {
    fn from_iter<T: IntoIterator<Item = &'a str>>(iter: T) -> Self {
        DimSet(iter.into_iter().map(Dim::new).collect())
    }
}

impl fmt::Display for DimSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, dim) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{dim}")?;
        }
        f.write_str("}")
    }
}

/// Verdict of [`Context::compare`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContextOrdering {
    Equal,
    Subset,
    Superset,
    Incomparable,
}

/// A finite relation between dimensions and tags.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Context {
    entries: BTreeSet<MicroContext>,
}

impl Context {
    /// The empty context.
    pub fn null() -> Self {
        Self::default()
    }

    /// Builds a context from micro contexts without consulting a registry.
    pub fn from_entries<I: IntoIterator<Item = MicroContext>>(entries: I) -> Self {
        Context {
            entries: entries.into_iter().collect(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = &MicroContext> + Clone {
        self.entries.iter()
    }

    pub fn into_entries(self) -> BTreeSet<MicroContext> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, micro: &MicroContext) -> bool {
        self.entries.contains(micro)
    }

    /// Number of distinct dimensions.
    pub fn degree(&self) -> usize {
        self.dims().len()
    }

    pub fn dims(&self) -> DimSet {
        self.entries.iter().map(|m| m.dim.clone()).collect()
    }

    /// Tags with multiplicity, in canonical entry order.
    pub fn tags(&self) -> Vec<TagValue> {
        self.entries.iter().map(|m| m.tag.clone()).collect()
    }

    pub fn is_simple(&self) -> bool {
        self.entries
            .iter()
            .zip(self.entries.iter().skip(1))
            .all(|(a, b)| a.dim != b.dim)
    }

    pub fn is_micro(&self) -> bool {
        self.entries.len() == 1
    }

    /// The tag bound to `dim`, taking the first one if the context is not
    /// simple.
    pub fn tag_of(&self, dim: &Dim) -> Option<&TagValue> {
        self.entries.iter().find(|m| &m.dim == dim).map(|m| &m.tag)
    }

    pub fn compare(&self, other: &Context) -> ContextOrdering {
        let sub = self.entries.is_subset(&other.entries);
        let sup = self.entries.is_superset(&other.entries);
        match (sub, sup) {
            (true, true) => ContextOrdering::Equal,
            (true, false) => ContextOrdering::Subset,
            (false, true) => ContextOrdering::Superset,
            (false, false) => ContextOrdering::Incomparable,
        }
    }

    pub(crate) fn insert(&mut self, micro: MicroContext) {
        self.entries.insert(micro);
    }

    pub(crate) fn set(&self) -> &BTreeSet<MicroContext> {
        &self.entries
    }
}

impl FromIterator<MicroContext> for Context {
    fn from_iter<T: IntoIterator<Item = MicroContext>>(iter: T) -> Self {
        Context::from_entries(iter)
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, m) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

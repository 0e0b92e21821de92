//! The UI hierarchy: a forest of systems, applications, UI groups and UI elements.

use std::collections::{HashMap, HashSet};
use std::fmt;

use super::{AttributeSet, AttributeValue, ModelError};

/// Composition level of a hierarchy node, from the root (`System`) down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    System,
    Application,
    Group,
    Element,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::System, Level::Application, Level::Group, Level::Element];

    /// Whether a node of this level may hang below a node of `parent` level.
    pub fn accepts_parent(self, parent: Level) -> bool {
        match self {
            Level::System => false,
            Level::Application => parent == Level::System,
            Level::Group | Level::Element => {
                matches!(parent, Level::Group | Level::Application)
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Level::System => "system",
            Level::Application => "application",
            Level::Group => "ui group",
            Level::Element => "ui element",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Index of a node inside its owning [`UIHierarchy`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }

    pub fn from_index(index: usize) -> Self {
        NodeId(index)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyNode {
    pub level: Level,
    pub id: String,
    pub parent: Option<NodeId>,
    /// Only meaningful for elements.
    pub current_state: Option<AttributeValue>,
    pub attributes: AttributeSet,
}

impl HierarchyNode {
    pub fn new(level: Level, id: impl Into<String>, parent: Option<NodeId>) -> Self {
        HierarchyNode {
            level,
            id: id.into(),
            parent,
            current_state: None,
            attributes: AttributeSet::new(),
        }
    }
}

/// The target object of an action: exactly one node of the hierarchy, typed by level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetRef {
    Element(NodeId),
    Group(NodeId),
    Application(NodeId),
    System(NodeId),
}

impl TargetRef {
    pub fn new(level: Level, node: NodeId) -> Self {
        match level {
            Level::Element => TargetRef::Element(node),
            Level::Group => TargetRef::Group(node),
            Level::Application => TargetRef::Application(node),
            Level::System => TargetRef::System(node),
        }
    }

    pub fn node(self) -> NodeId {
        match self {
            TargetRef::Element(n)
            | TargetRef::Group(n)
            | TargetRef::Application(n)
            | TargetRef::System(n) => n,
        }
    }

    pub fn level(self) -> Level {
        match self {
            TargetRef::Element(_) => Level::Element,
            TargetRef::Group(_) => Level::Group,
            TargetRef::Application(_) => Level::Application,
            TargetRef::System(_) => Level::System,
        }
    }
}

/// Flat, per-event hierarchy context as it appears in interchange formats: one
/// optional id per level plus the chain of UI groups, outermost first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Associations {
    pub system: Option<String>,
    pub application: Option<String>,
    pub groups: Vec<String>,
    pub element: Option<String>,
}

impl Associations {
    pub fn is_empty(&self) -> bool {
        self.system.is_none()
            && self.application.is_none()
            && self.groups.is_empty()
            && self.element.is_none()
    }

    /// A system is recorded but nothing can legally sit between it and the
    /// groups/element below.
    pub fn has_orphaned_system(&self) -> bool {
        self.system.is_some()
            && self.application.is_none()
            && (!self.groups.is_empty() || self.element.is_some())
    }
}

type SiblingKey = (Option<NodeId>, Level, String);

/// Arena of hierarchy nodes. Nodes are addressed by [`NodeId`]; ids only need to be
/// unique among siblings of the same level, so `A1` may exist in several worksheets.
#[derive(Debug, Clone, Default)]
pub struct UIHierarchy {
    nodes: Vec<HierarchyNode>,
    siblings: HashMap<SiblingKey, NodeId>,
}

impl UIHierarchy {
    pub fn new() -> Self {
        Self::default()
    }

    /// Wraps nodes without checking any invariant. Meant for tests and for
    /// feeding the validator deliberately broken structures.
    pub fn from_nodes_unchecked(nodes: Vec<HierarchyNode>) -> Self {
        let mut siblings = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            siblings
                .entry((n.parent, n.level, n.id.clone()))
                .or_insert(NodeId(i));
        }
        UIHierarchy { nodes, siblings }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> Option<&HierarchyNode> {
        self.nodes.get(id.0)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &HierarchyNode)> {
        self.nodes.iter().enumerate().map(|(i, n)| (NodeId(i), n))
    }

    pub fn count(&self, level: Level) -> usize {
        self.nodes.iter().filter(|n| n.level == level).count()
    }

    pub fn find_child(&self, parent: Option<NodeId>, level: Level, id: &str) -> Option<NodeId> {
        self.siblings.get(&(parent, level, id.to_string())).copied()
    }

    /// All nodes of a level carrying `id`, in insertion order.
    pub fn find_all(&self, level: Level, id: &str) -> Vec<NodeId> {
        self.nodes()
            .filter(|(_, n)| n.level == level && n.id == id)
            .map(|(nid, _)| nid)
            .collect()
    }

    /// Adds a node below `parent`; fails on an empty id, a missing parent, a
    /// composition-order breach or a sibling with the same id.
    pub fn add(
        &mut self,
        level: Level,
        id: impl Into<String>,
        parent: Option<NodeId>,
    ) -> Result<NodeId, ModelError> {
        let id = id.into();
        if id.is_empty() {
            return Err(ModelError::EmptyIdentifier("node id"));
        }
        if let Some(p) = parent {
            let parent_node = self
                .node(p)
                .ok_or_else(|| ModelError::DanglingReference(format!("parent node #{}", p.0)))?;
            if !level.accepts_parent(parent_node.level) {
                return Err(ModelError::LevelViolation {
                    node: id,
                    level,
                    parent_level: parent_node.level,
                });
            }
        }
        let key = (parent, level, id.clone());
        if self.siblings.contains_key(&key) {
            return Err(ModelError::DuplicateId {
                what: level.as_str(),
                id,
            });
        }
        let nid = NodeId(self.nodes.len());
        self.nodes.push(HierarchyNode::new(level, id, parent));
        self.siblings.insert(key, nid);
        Ok(nid)
    }

    /// Returns the existing sibling with this id, or creates it.
    pub fn intern(
        &mut self,
        level: Level,
        id: &str,
        parent: Option<NodeId>,
    ) -> Result<NodeId, ModelError> {
        match self.find_child(parent, level, id) {
            Some(n) => Ok(n),
            None => self.add(level, id, parent),
        }
    }

    /// Creates the chain of nodes named by `assoc` on first mention and returns the
    /// lowest-level one. `Ok(None)` when the associations are empty.
    pub fn intern_associations(
        &mut self,
        assoc: &Associations,
    ) -> Result<Option<TargetRef>, ModelError> {
        if assoc.has_orphaned_system() {
            return Err(ModelError::LevelViolation {
                node: assoc
                    .groups
                    .first()
                    .or(assoc.element.as_ref())
                    .cloned()
                    .unwrap_or_default(),
                level: if assoc.groups.is_empty() {
                    Level::Element
                } else {
                    Level::Group
                },
                parent_level: Level::System,
            });
        }
        let mut current: Option<TargetRef> = None;
        let mut parent = None;
        let steps = assoc
            .system
            .iter()
            .map(|s| (Level::System, s))
            .chain(assoc.application.iter().map(|a| (Level::Application, a)))
            .chain(assoc.groups.iter().map(|g| (Level::Group, g)))
            .chain(assoc.element.iter().map(|e| (Level::Element, e)));
        for (level, id) in steps {
            let nid = self.intern(level, id, parent)?;
            parent = Some(nid);
            current = Some(TargetRef::new(level, nid));
        }
        Ok(current)
    }

    /// Looks up the target named by `assoc` without creating anything.
    pub fn resolve(&self, assoc: &Associations) -> Result<TargetRef, ModelError> {
        resolve_target(assoc, self)
    }

    /// Flat associations describing `target` and all of its ancestors.
    pub fn associations(&self, target: TargetRef) -> Result<Associations, ModelError> {
        let mut assoc = Associations::default();
        for nid in self.ancestor_ids(target.node())? {
            let node = &self.nodes[nid.0];
            match node.level {
                Level::System => assoc.system = Some(node.id.clone()),
                Level::Application => assoc.application = Some(node.id.clone()),
                Level::Group => assoc.groups.push(node.id.clone()),
                Level::Element => assoc.element = Some(node.id.clone()),
            }
        }
        assoc.groups.reverse();
        Ok(assoc)
    }

    /// Node ids from `start` up to its root, inclusive. Fails on dangling parents
    /// and on cycles.
    pub fn ancestor_ids(&self, start: NodeId) -> Result<Vec<NodeId>, ModelError> {
        let mut path = Vec::new();
        let mut cursor = Some(start);
        while let Some(nid) = cursor {
            let node = self
                .node(nid)
                .ok_or_else(|| ModelError::DanglingReference(format!("node #{}", nid.0)))?;
            if path.len() > self.nodes.len() {
                return Err(ModelError::CycleDetected(node.id.clone()));
            }
            path.push(nid);
            cursor = node.parent;
        }
        Ok(path)
    }

    /// Ids on the path from `target` up to its root.
    pub fn ancestry(&self, target: TargetRef) -> Result<Vec<&str>, ModelError> {
        self.check_target(target)?;
        Ok(self
            .ancestor_ids(target.node())?
            .into_iter()
            .map(|nid| self.nodes[nid.0].id.as_str())
            .collect())
    }

    /// Whether `node` is `ancestor` or lies below it.
    pub fn is_within(&self, node: NodeId, ancestor: NodeId) -> bool {
        let mut cursor = Some(node);
        let mut steps = 0;
        while let Some(nid) = cursor {
            if nid == ancestor {
                return true;
            }
            steps += 1;
            if steps > self.nodes.len() {
                return false;
            }
            cursor = self.node(nid).and_then(|n| n.parent);
        }
        false
    }

    /// The target's node exists and has the level the reference claims.
    pub fn check_target(&self, target: TargetRef) -> Result<(), ModelError> {
        match self.node(target.node()) {
            Some(n) if n.level == target.level() => Ok(()),
            Some(n) => Err(ModelError::DanglingReference(format!(
                "{} target points at {} `{}`",
                target.level(),
                n.level,
                n.id
            ))),
            None => Err(ModelError::DanglingReference(format!(
                "{} target #{}",
                target.level(),
                target.node().0
            ))),
        }
    }

    pub fn attributes_mut(&mut self, node: NodeId) -> Option<&mut AttributeSet> {
        self.nodes.get_mut(node.0).map(|n| &mut n.attributes)
    }

    /// Records the current state of an element. Returns the previous state.
    pub fn set_current_state(
        &mut self,
        node: NodeId,
        state: AttributeValue,
    ) -> Result<Option<AttributeValue>, ModelError> {
        state.check()?;
        let n = self
            .nodes
            .get_mut(node.0)
            .ok_or_else(|| ModelError::DanglingReference(format!("node #{}", node.0)))?;
        if n.level != Level::Element {
            return Err(ModelError::LevelViolation {
                node: n.id.clone(),
                level: n.level,
                parent_level: n.level,
            });
        }
        Ok(n.current_state.replace(state))
    }
}

/// Resolves flat associations to the most specific hierarchy node present:
/// element, then group, then application, then system. A system recorded without an
/// application cannot sit above the groups or element and is ignored.
pub fn resolve_target(assoc: &Associations, hierarchy: &UIHierarchy) -> Result<TargetRef, ModelError> {
    if assoc.is_empty() {
        return Err(ModelError::NoTarget);
    }
    let mut parent: Option<NodeId> = None;
    let mut found = None;
    let system = assoc.system.iter().filter(|_| !assoc.has_orphaned_system());
    let steps = system
        .map(|s| (Level::System, s))
        .chain(assoc.application.iter().map(|a| (Level::Application, a)))
        .chain(assoc.groups.iter().map(|g| (Level::Group, g)))
        .chain(assoc.element.iter().map(|e| (Level::Element, e)));
    for (level, id) in steps {
        let nid = hierarchy.find_child(parent, level, id).ok_or_else(|| {
            ModelError::DanglingReference(format!("{level} `{id}` not found in hierarchy"))
        })?;
        parent = Some(nid);
        found = Some(TargetRef::new(level, nid));
    }
    found.ok_or(ModelError::NoTarget)
}

/// Declarative node description for [`build_hierarchy`].
///
/// `handle` identifies the declaration within one build call (it defaults to the
/// id) and `parent` names the handle of another declaration. Handles let two
/// siblings-in-different-groups share an id, e.g. two `confirm` buttons.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeDecl {
    pub handle: String,
    pub level: Level,
    pub id: String,
    pub parent: Option<String>,
    pub current_state: Option<AttributeValue>,
    pub attributes: AttributeSet,
}

impl NodeDecl {
    pub fn new(level: Level, id: impl Into<String>) -> Self {
        let id = id.into();
        NodeDecl {
            handle: id.clone(),
            level,
            id,
            parent: None,
            current_state: None,
            attributes: AttributeSet::new(),
        }
    }

    pub fn system(id: impl Into<String>) -> Self {
        Self::new(Level::System, id)
    }

    pub fn application(id: impl Into<String>) -> Self {
        Self::new(Level::Application, id)
    }

    pub fn group(id: impl Into<String>) -> Self {
        Self::new(Level::Group, id)
    }

    pub fn element(id: impl Into<String>) -> Self {
        Self::new(Level::Element, id)
    }

    pub fn handle(mut self, handle: impl Into<String>) -> Self {
        self.handle = handle.into();
        self
    }

    pub fn parent(mut self, parent_handle: impl Into<String>) -> Self {
        self.parent = Some(parent_handle.into());
        self
    }

    pub fn state(mut self, state: impl Into<AttributeValue>) -> Self {
        self.current_state = Some(state.into());
        self
    }

    pub fn attributes(mut self, attributes: AttributeSet) -> Self {
        self.attributes = attributes;
        self
    }
}

/// Builds a hierarchy from declarations, in any order. Returns the hierarchy and
/// the node id assigned to each declaration (same order as the input).
pub fn build_hierarchy(decls: &[NodeDecl]) -> Result<(UIHierarchy, Vec<NodeId>), ModelError> {
    let mut by_handle: HashMap<&str, usize> = HashMap::with_capacity(decls.len());
    for (i, d) in decls.iter().enumerate() {
        if d.id.is_empty() {
            return Err(ModelError::EmptyIdentifier("node id"));
        }
        if by_handle.insert(d.handle.as_str(), i).is_some() {
            return Err(ModelError::DuplicateId {
                what: "declaration handle",
                id: d.handle.clone(),
            });
        }
    }
    let mut parent_of = vec![None; decls.len()];
    for (i, d) in decls.iter().enumerate() {
        if let Some(p) = &d.parent {
            let pi = *by_handle.get(p.as_str()).ok_or_else(|| ModelError::UnknownParent {
                node: d.handle.clone(),
                parent: p.clone(),
            })?;
            parent_of[i] = Some(pi);
        }
    }
    // Cycles before levels: a self-parented group is a cycle, not a level problem.
    for start in 0..decls.len() {
        let mut seen = HashSet::new();
        let mut cursor = Some(start);
        while let Some(i) = cursor {
            if !seen.insert(i) {
                return Err(ModelError::CycleDetected(decls[i].handle.clone()));
            }
            cursor = parent_of[i];
        }
    }
    for (i, d) in decls.iter().enumerate() {
        if let Some(pi) = parent_of[i] {
            let parent_level = decls[pi].level;
            if !d.level.accepts_parent(parent_level) {
                return Err(ModelError::LevelViolation {
                    node: d.id.clone(),
                    level: d.level,
                    parent_level,
                });
            }
        }
        if d.current_state.is_some() && d.level != Level::Element {
            return Err(ModelError::LevelViolation {
                node: d.id.clone(),
                level: d.level,
                parent_level: d.level,
            });
        }
    }

    let mut hierarchy = UIHierarchy::new();
    let mut assigned: Vec<Option<NodeId>> = vec![None; decls.len()];
    for start in 0..decls.len() {
        // Insert the not-yet-placed ancestors of `start`, root first.
        let mut chain = Vec::new();
        let mut cursor = Some(start);
        while let Some(i) = cursor {
            if assigned[i].is_some() {
                break;
            }
            chain.push(i);
            cursor = parent_of[i];
        }
        for &i in chain.iter().rev() {
            let d = &decls[i];
            let parent = parent_of[i].map(|pi| assigned[pi].expect("parent placed first"));
            let nid = hierarchy.add(d.level, d.id.clone(), parent)?;
            d.attributes.check()?;
            hierarchy.nodes[nid.0].attributes = d.attributes.clone();
            if let Some(state) = &d.current_state {
                hierarchy.set_current_state(nid, state.clone())?;
            }
            assigned[i] = Some(nid);
        }
    }
    let ids = assigned.into_iter().map(|a| a.expect("all placed")).collect();
    Ok((hierarchy, ids))
}

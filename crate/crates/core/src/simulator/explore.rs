//! Bounded breadth-first exploration of reachable token configurations.
//!
//! States are stored compactly: one class bitmask per object, objects
//! indexed by seed order and then by mint order. The successor function
//! works on these masks directly and does not go through [`super::fire`],
//! so the two can be checked against each other.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::script::{mint_name, ScriptObject, ScriptStep};
use super::{SimError, Token};
use crate::model::Model;
use crate::names::{ClassName, ObjectId, ProcessName};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    /// Firings along any explored path.
    pub max_steps: usize,
    /// Objects in a state, seeds included. Generators cannot fire past it.
    pub max_objects: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            max_steps: 8,
            max_objects: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Query {
    /// Some object is in both classes at once.
    CoOccurrence([ClassName; 2]),
    /// The second process fires on an object the first already fired on.
    Sequence([ProcessName; 2]),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryResult {
    pub predicate: Query,
    pub reachable: bool,
    pub witness: Option<Vec<ScriptStep>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReachabilitySummary {
    pub state_count: usize,
    pub bound_exceeded: bool,
    pub queries: Vec<QueryResult>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Target {
    Object(usize),
    Mint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Edge {
    process: usize,
    target: Target,
    to: usize,
}

#[derive(Debug, Clone)]
struct CompiledProcess {
    name: ProcessName,
    inputs: u64,
    outputs: u64,
    leaving: u64,
}

impl CompiledProcess {
    fn is_generator(&self) -> bool {
        self.inputs == 0
    }
}

type State = Vec<u64>;

#[derive(Debug, Clone)]
pub struct ReachabilityGraph {
    classes: Vec<ClassName>,
    processes: Vec<CompiledProcess>,
    seed_objects: Vec<ObjectId>,
    bounds: Bounds,
    states: Vec<State>,
    /// BFS parent of each state except the initial one.
    parents: Vec<Option<(usize, Edge)>>,
    /// Outgoing edges; empty for states at the depth limit.
    edges: Vec<Vec<Edge>>,
    bound_exceeded: bool,
}

fn successors(processes: &[CompiledProcess], state: &State, max_objects: usize) -> Vec<(usize, Target, State)> {
    let mut out = Vec::new();
    for (pi, p) in processes.iter().enumerate() {
        if p.is_generator() {
            if p.outputs != 0 && state.len() < max_objects {
                let mut next = state.clone();
                next.push(p.outputs);
                out.push((pi, Target::Mint, next));
            }
            continue;
        }
        for (oi, &mask) in state.iter().enumerate() {
            if mask & p.inputs == p.inputs {
                let mut next = state.clone();
                next[oi] = (mask & !p.leaving) | p.outputs;
                out.push((pi, Target::Object(oi), next));
            }
        }
    }
    out
}

/// Explores every state reachable from `seed` within `bounds`.
pub fn explore(model: &Model, seed: &[Token], bounds: Bounds) -> Result<ReachabilityGraph, SimError> {
    if bounds.max_steps == 0 || bounds.max_objects == 0 {
        return Err(SimError::InvalidBounds("bounds must be positive".to_owned()));
    }
    if bounds.max_objects > 64 {
        return Err(SimError::InvalidBounds("at most 64 objects".to_owned()));
    }
    if model.classes.len() > 64 {
        return Err(SimError::InvalidBounds("at most 64 classes".to_owned()));
    }
    let classes: Vec<ClassName> = model.classes.iter().map(|c| c.name.clone()).collect();
    let index: HashMap<&str, usize> = classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let mask_of = |names: &mut dyn Iterator<Item = &ClassName>| -> Result<u64, SimError> {
        let mut mask = 0u64;
        for c in names {
            let i = index
                .get(c.as_str())
                .ok_or_else(|| SimError::UnknownClass(c.to_string()))?;
            mask |= 1 << i;
        }
        Ok(mask)
    };
    let mut processes = Vec::new();
    for p in &model.processes {
        processes.push(CompiledProcess {
            name: p.name.clone(),
            inputs: mask_of(&mut p.inputs.iter())?,
            outputs: mask_of(&mut p.outputs.iter())?,
            leaving: mask_of(&mut p.inputs.iter().filter(|c| p.consumes(c.as_str())))?,
        });
    }

    let mut seed_objects: Vec<ObjectId> = Vec::new();
    let mut initial: State = Vec::new();
    for token in seed {
        let bit = 1u64
            << index
                .get(token.class.as_str())
                .ok_or_else(|| SimError::UnknownClass(token.class.to_string()))?;
        let oi = match seed_objects.iter().position(|o| *o == token.object) {
            Some(oi) => oi,
            None => {
                seed_objects.push(token.object.clone());
                initial.push(0);
                seed_objects.len() - 1
            }
        };
        if initial[oi] & bit != 0 {
            return Err(SimError::DuplicateToken {
                object: token.object.clone(),
                class: token.class.clone(),
            });
        }
        initial[oi] |= bit;
    }
    if seed_objects.len() > bounds.max_objects {
        return Err(SimError::InvalidBounds(format!(
            "the seed has {} objects, more than max_objects",
            seed_objects.len()
        )));
    }

    let mut graph = ReachabilityGraph {
        classes,
        processes,
        seed_objects,
        bounds,
        states: vec![initial.clone()],
        parents: vec![None],
        edges: vec![Vec::new()],
        bound_exceeded: false,
    };
    let mut ids: HashMap<State, usize> = HashMap::from([(initial, 0)]);
    let mut depth = vec![0usize];
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let succ = successors(&graph.processes, &graph.states[s], bounds.max_objects);
        if depth[s] >= bounds.max_steps {
            if succ.iter().any(|(_, _, next)| !ids.contains_key(next)) {
                graph.bound_exceeded = true;
            }
            continue;
        }
        for (process, target, next) in succ {
            let to = match ids.get(&next) {
                Some(&to) => to,
                None => {
                    let to = graph.states.len();
                    ids.insert(next.clone(), to);
                    graph.states.push(next);
                    graph.edges.push(Vec::new());
                    depth.push(depth[s] + 1);
                    graph.parents.push(Some((s, Edge { process, target, to })));
                    queue.push_back(to);
                    to
                }
            };
            graph.edges[s].push(Edge { process, target, to });
        }
    }
    Ok(graph)
}

impl ReachabilityGraph {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn bound_exceeded(&self) -> bool {
        self.bound_exceeded
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    /// Tokens of every reachable state, named as a script replay would name them.
    pub fn states(&self) -> Vec<Vec<Token>> {
        (0..self.states.len())
            .map(|s| {
                let names = self.object_names(&self.path_to(s));
                self.states[s]
                    .iter()
                    .enumerate()
                    .flat_map(|(oi, &mask)| {
                        let object = names[oi].clone();
                        self.classes
                            .iter()
                            .enumerate()
                            .filter(move |(ci, _)| mask & (1 << ci) != 0)
                            .map(move |(_, c)| Token::new(object.clone(), c.clone()))
                    })
                    .collect()
            })
            .collect()
    }

    fn process_index(&self, name: &str) -> Option<usize> {
        self.processes.iter().position(|p| p.name == name)
    }

    fn class_index(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == name)
    }

    /// Whether `script` follows edges of the graph from the initial state.
    pub fn accepts(&self, script: &[ScriptStep]) -> bool {
        let mut names: HashMap<ObjectId, usize> = self
            .seed_objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.clone(), i))
            .collect();
        let mut next_mint = 1;
        let mut current = 0usize;
        for step in script {
            let Some(pi) = self.process_index(step.process.as_str()) else {
                return false;
            };
            let generator = self.processes[pi].is_generator();
            let (target, bind) = match &step.object {
                ScriptObject::New if generator => {
                    let (name, next) = mint_name(next_mint, |n| names.contains_key(n));
                    next_mint = next;
                    (Target::Mint, Some(name))
                }
                ScriptObject::New => return false,
                ScriptObject::Id(id) => match names.get(id) {
                    Some(&oi) => (Target::Object(oi), None),
                    None if generator => (Target::Mint, Some(id.clone())),
                    None => return false,
                },
            };
            let Some(edge) = self.edges[current]
                .iter()
                .find(|e| e.process == pi && e.target == target)
            else {
                return false;
            };
            if let Some(name) = bind {
                names.insert(name, self.states[current].len());
            }
            current = edge.to;
        }
        true
    }

    fn path_to(&self, mut s: usize) -> Vec<Edge> {
        let mut path = Vec::new();
        while let Some((parent, edge)) = self.parents[s] {
            path.push(edge);
            s = parent;
        }
        path.reverse();
        path
    }

    /// Object names along a path, indexed like the final state's objects.
    fn object_names(&self, path: &[Edge]) -> Vec<ObjectId> {
        let mut names = self.seed_objects.clone();
        let mut next_mint = 1;
        for edge in path {
            if edge.target == Target::Mint {
                let (name, next) = mint_name(next_mint, |n| names.iter().any(|o| o == n));
                next_mint = next;
                names.push(name);
            }
        }
        names
    }

    fn to_script(&self, path: &[Edge]) -> Vec<ScriptStep> {
        let names = self.object_names(path);
        path.iter()
            .map(|e| ScriptStep {
                process: self.processes[e.process].name.clone(),
                object: match e.target {
                    Target::Mint => ScriptObject::New,
                    Target::Object(oi) => ScriptObject::Id(names[oi].clone()),
                },
            })
            .collect()
    }

    fn edge_object(&self, from: usize, edge: &Edge) -> usize {
        match edge.target {
            Target::Object(oi) => oi,
            Target::Mint => self.states[from].len(),
        }
    }

    /// A shortest witness path for `query`, if one exists within bounds.
    pub fn query(&self, query: &Query) -> Result<QueryResult, SimError> {
        let witness = match query {
            Query::CoOccurrence([x, y]) => {
                let xi = self.class_index(x.as_str()).ok_or_else(|| SimError::UnknownClass(x.to_string()))?;
                let yi = self.class_index(y.as_str()).ok_or_else(|| SimError::UnknownClass(y.to_string()))?;
                let both = 1u64 << xi | 1u64 << yi;
                // States are numbered in BFS order, so the first hit is shortest.
                (0..self.states.len())
                    .find(|&s| self.states[s].iter().any(|m| m & both == both))
                    .map(|s| self.path_to(s))
            }
            Query::Sequence([p1, p2]) => {
                let first = self.process_index(p1.as_str()).ok_or_else(|| SimError::UnknownProcess(p1.to_string()))?;
                let second = self.process_index(p2.as_str()).ok_or_else(|| SimError::UnknownProcess(p2.to_string()))?;
                self.sequence_path(first, second)
            }
        };
        Ok(QueryResult {
            predicate: query.clone(),
            reachable: witness.is_some(),
            witness: witness.map(|path| self.to_script(&path)),
        })
    }

    /// BFS over (state, objects `first` has fired on).
    fn sequence_path(&self, first: usize, second: usize) -> Option<Vec<Edge>> {
        type Node = (usize, u64);
        let mut parents: HashMap<Node, Option<(Node, Edge)>> = HashMap::from([((0, 0), None)]);
        let mut queue = VecDeque::from([(0usize, 0u64)]);
        while let Some(node @ (s, fired)) = queue.pop_front() {
            for edge in &self.edges[s] {
                let oi = self.edge_object(s, edge);
                if edge.process == second && fired & (1 << oi) != 0 {
                    let mut path = vec![*edge];
                    let mut at = node;
                    while let Some(Some((prev, e))) = parents.get(&at) {
                        path.push(*e);
                        at = *prev;
                    }
                    path.reverse();
                    return Some(path);
                }
                let next_fired = if edge.process == first { fired | 1 << oi } else { fired };
                let next = (edge.to, next_fired);
                if !parents.contains_key(&next) {
                    parents.insert(next, Some((node, *edge)));
                    queue.push_back(next);
                }
            }
        }
        None
    }

    pub fn summary(&self, queries: &[Query]) -> Result<ReachabilitySummary, SimError> {
        Ok(ReachabilitySummary {
            state_count: self.state_count(),
            bound_exceeded: self.bound_exceeded,
            queries: queries.iter().map(|q| self.query(q)).collect::<Result<_, _>>()?,
        })
    }
}

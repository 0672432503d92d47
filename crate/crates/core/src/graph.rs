//! Graphs of cyclic submodules.
//!
//! Vertices of `Γ_I(M, Σ)` are the distinct cyclic submodules `Ra`, `a ∈ Σ`,
//! keyed by their canonical subspace; `Ra ~ Rb` when `Ia ∩ Ib ≠ 0`. Every
//! vertex carries a loop. Over a commutative local algebra `Ia` depends only
//! on `Ra`, so any generator may stand for its vertex.
//!
//! Adjacency is computed by bucketing the images `Ia`: two vertices are
//! adjacent exactly when their images share a line, so each image contributes
//! its projective points and vertices meeting in a line are joined.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    check_budget, count_vectors, vector_index, FpMatrix, Subspace, VectorIter, DEFAULT_ENUMERATION_BUDGET,
};
use crate::trivext::{AModule, Ideal};

/// Largest vertex count accepted by the brute-force isomorphism test.
pub const MAX_ISO_VERTICES: usize = 8;

/// A finite reflexive graph with a marked set of vertices that is a union of
/// components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    rows: Vec<FixedBitSet>,
    marked: FixedBitSet,
}

impl Graph {
    /// `n` vertices, loops only.
    pub fn discrete(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                let mut r = FixedBitSet::with_capacity(n);
                r.insert(i);
                r
            })
            .collect();
        Graph { rows, marked: FixedBitSet::with_capacity(n) }
    }

    pub fn complete(n: usize) -> Self {
        let rows = (0..n)
            .map(|_| {
                let mut r = FixedBitSet::with_capacity(n);
                r.insert_range(..);
                r
            })
            .collect();
        Graph { rows, marked: FixedBitSet::with_capacity(n) }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::discrete(n);
        for &(i, j) in edges {
            g.add_edge(i, j);
        }
        g
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        self.rows[i].insert(j);
        self.rows[j].insert(i);
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.rows[i].contains(j)
    }

    /// Neighbours of `i`, including `i` itself.
    pub fn row(&self, i: usize) -> &FixedBitSet {
        &self.rows[i]
    }

    /// Edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            out.extend(r.ones().filter(|&j| j > i).map(|j| (i, j)));
        }
        out
    }

    /// Degree without the loop.
    pub fn degree(&self, i: usize) -> usize {
        self.rows[i].count_ones(..) - 1
    }

    pub fn is_complete(&self) -> bool {
        self.rows.iter().all(|r| r.count_ones(..) == self.len())
    }

    pub fn is_discrete(&self) -> bool {
        self.rows.iter().all(|r| r.count_ones(..) == 1)
    }

    /// Component index of every vertex; components are numbered by their
    /// smallest vertex.
    pub fn component_ids(&self) -> Vec<usize> {
        let n = self.len();
        let mut uf = UnionFind::<usize>::new(n);
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.ones().filter(|&j| j > i) {
                uf.union(i, j);
            }
        }
        let mut label: HashMap<usize, usize> = HashMap::new();
        (0..n)
            .map(|v| {
                let root = uf.find(v);
                let next = label.len();
                *label.entry(root).or_insert(next)
            })
            .collect()
    }

    /// Partition of the vertices, each block sorted, blocks ordered by their
    /// smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let ids = self.component_ids();
        let count = ids.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); count];
        for (v, &c) in ids.iter().enumerate() {
            blocks[c].push(v);
        }
        blocks
    }

    pub fn component_count(&self) -> usize {
        self.component_ids().iter().max().map_or(0, |m| m + 1)
    }

    pub fn is_marked(&self, i: usize) -> bool {
        self.marked.contains(i)
    }

    pub fn marked(&self) -> Vec<usize> {
        self.marked.ones().collect()
    }

    /// Replace the marked set by the union of the components of `seeds`.
    pub fn mark_components_of(&mut self, seeds: &[usize]) {
        let ids = self.component_ids();
        let chosen: HashSet<usize> = seeds.iter().map(|&s| ids[s]).collect();
        self.marked.clear();
        for (v, c) in ids.iter().enumerate() {
            if chosen.contains(c) {
                self.marked.insert(v);
            }
        }
    }

    pub fn marked_is_union_of_components(&self) -> bool {
        self.edges().iter().all(|&(i, j)| self.is_marked(i) == self.is_marked(j))
    }

    /// Induced subgraph on `vertices` (in the given order).
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut g = Graph::discrete(vertices.len());
        for (a, &i) in vertices.iter().enumerate() {
            for (b, &j) in vertices.iter().enumerate().skip(a + 1) {
                if self.adjacent(i, j) {
                    g.add_edge(a, b);
                }
            }
            if self.is_marked(i) {
                g.marked.insert(a);
            }
        }
        g
    }

    /// First adjacent pair whose images under `map` are not adjacent in `dst`.
    pub fn morphism_failure(&self, map: &[usize], dst: &Graph) -> Option<(usize, usize)> {
        self.edges().into_iter().find(|&(i, j)| !dst.adjacent(map[i], map[j]))
    }

    fn with_marked(mut self, marked: impl IntoIterator<Item = usize>) -> Self {
        let seeds: Vec<usize> = marked.into_iter().collect();
        self.mark_components_of(&seeds);
        self
    }

    pub fn to_dot(&self, labels: &[String]) -> String {
        let mut out = String::from("graph G {\n");
        for (i, label) in labels.iter().enumerate() {
            if self.is_marked(i) {
                let _ = writeln!(out, "  v{} [label=\"{}\", marked=true, style=filled];", i, label);
            } else {
                let _ = writeln!(out, "  v{} [label=\"{}\"];", i, label);
            }
        }
        for (i, j) in self.edges() {
            let _ = writeln!(out, "  v{} -- v{};", i, j);
        }
        out.push_str("}\n");
        out
    }

    pub fn to_doc(&self, vertices: Vec<VertexDoc>) -> GraphDoc {
        GraphDoc {
            vertices,
            edges: self.edges().into_iter().map(|(i, j)| [i, j]).collect(),
            marked: self.marked(),
        }
    }
}

/// Serialized vertex: canonical basis and representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexDoc {
    pub basis: Vec<Vec<i64>>,
    pub rep: Vec<i64>,
}

/// Serialized graph. Edges are listed once with `i < j`; loops are implicit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<[usize; 2]>,
    pub marked: Vec<usize>,
}

impl GraphDoc {
    pub fn to_graph(&self) -> Result<Graph> {
        let n = self.vertices.len();
        let parse = |path: String, message: &str| Error::Parse { path, message: message.to_string() };
        for (k, v) in self.vertices.iter().enumerate() {
            if v.basis.iter().any(|b| b.len() != v.rep.len()) {
                return Err(parse(format!("vertices[{}].basis", k), "basis vector length differs from rep"));
            }
        }
        let mut g = Graph::discrete(n);
        for (k, &[i, j]) in self.edges.iter().enumerate() {
            if i >= n || j >= n {
                return Err(parse(format!("edges[{}]", k), "vertex index out of range"));
            }
            if i >= j {
                return Err(parse(format!("edges[{}]", k), "edges must satisfy i < j"));
            }
            g.add_edge(i, j);
        }
        for (k, &m) in self.marked.iter().enumerate() {
            if m >= n {
                return Err(parse(format!("marked[{}]", k), "vertex index out of range"));
            }
            g.marked.insert(m);
        }
        if !g.marked_is_union_of_components() {
            return Err(parse("marked".into(), "marked set is not a union of components"));
        }
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            path: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })
    }
}

/// A vertex of a graph of cyclic submodules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub space: Subspace,
    pub rep: Vec<u32>,
}

/// A graph of cyclic submodules with its vertex keys.
#[derive(Clone, Debug)]
pub struct CycGraph {
    vertices: Vec<Vertex>,
    graph: Graph,
    index: HashMap<Subspace, usize>,
}

impl PartialEq for CycGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.graph == other.graph
    }
}

impl Eq for CycGraph {}

impl CycGraph {
    fn from_parts(vertices: Vec<Vertex>, graph: Graph) -> Self {
        let index = vertices.iter().enumerate().map(|(i, v)| (v.space.clone(), i)).collect();
        CycGraph { vertices, graph, index }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn keys(&self) -> Vec<Subspace> {
        self.vertices.iter().map(|v| v.space.clone()).collect()
    }

    pub fn index_of(&self, space: &Subspace) -> Option<usize> {
        self.index.get(space).copied()
    }

    pub fn component_count(&self) -> usize {
        self.graph.component_count()
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        self.graph.components()
    }

    pub fn to_dot(&self) -> String {
        let labels: Vec<String> = self
            .vertices
            .iter()
            .map(|v| format!("({})", v.rep.iter().map(|x| x.to_string()).join(",")))
            .collect();
        self.graph.to_dot(&labels)
    }

    pub fn to_doc(&self) -> GraphDoc {
        let vertices = self
            .vertices
            .iter()
            .map(|v| VertexDoc {
                basis: v.space.basis_vectors().iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect(),
                rep: v.rep.iter().map(|&x| x as i64).collect(),
            })
            .collect();
        self.graph.to_doc(vertices)
    }
}

/// A triple `(M, Σ, Σ')` with `0 ∉ Σ` and `Σ' ⊆ Σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CTriple {
    pub module: AModule,
    pub sigma: Vec<Vec<u32>>,
    pub sigma_prime: Vec<Vec<u32>>,
}

impl CTriple {
    pub fn new(module: AModule, sigma: Vec<Vec<u32>>, sigma_prime: Vec<Vec<u32>>) -> Result<Self> {
        let f = module.field();
        for x in sigma.iter().chain(&sigma_prime) {
            if x.len() != module.dim() {
                return Err(Error::Dimension(format!("vector of length {} in a module of dim {}", x.len(), module.dim())));
            }
            f.check_vector(x)?;
            if x.iter().all(|&c| c == 0) {
                return Err(Error::ZeroVector);
            }
        }
        let set: HashSet<&Vec<u32>> = sigma.iter().collect();
        if sigma_prime.iter().any(|x| !set.contains(x)) {
            return Err(Error::InvalidModule("Σ' is not contained in Σ".into()));
        }
        Ok(CTriple { module, sigma, sigma_prime })
    }

    /// `(M, M ∖ 0, Σ')`.
    pub fn all_nonzero(module: AModule, budget: u128) -> Result<Self> {
        let sigma: Vec<Vec<u32>> = module
            .full()
            .enumerate(budget)?
            .into_iter()
            .filter(|x| x.iter().any(|&c| c != 0))
            .collect();
        CTriple::new(module, sigma, Vec::new())
    }
}

fn sort_vertices(raw: &mut [Vertex]) {
    raw.sort_by(|a, b| a.space.basis().data().cmp(b.space.basis().data()));
}

/// Adjacency from the images `Ia` of each vertex.
pub(crate) fn adjacency_from_images(images: &[Subspace]) -> Result<Graph> {
    let n = images.len();
    let mut class_index: HashMap<&Subspace, usize> = HashMap::new();
    let mut classes: Vec<(&Subspace, Vec<usize>)> = Vec::new();
    for (v, img) in images.iter().enumerate() {
        let c = *class_index.entry(img).or_insert_with(|| {
            classes.push((img, Vec::new()));
            classes.len() - 1
        });
        classes[c].1.push(v);
    }
    let nc = classes.len();
    let lines: Vec<Vec<Vec<u32>>> = classes
        .par_iter()
        .map(|(img, _)| img.projective_points(DEFAULT_ENUMERATION_BUDGET))
        .collect::<Result<_>>()?;
    let mut by_line: HashMap<&[u32], Vec<usize>> = HashMap::new();
    for (c, ls) in lines.iter().enumerate() {
        for l in ls {
            by_line.entry(l.as_slice()).or_default().push(c);
        }
    }
    let mut class_adj: Vec<FixedBitSet> = vec![FixedBitSet::with_capacity(nc); nc];
    for cl in by_line.values() {
        let mut b = FixedBitSet::with_capacity(nc);
        for &c in cl {
            b.insert(c);
        }
        for &c in cl {
            class_adj[c].union_with(&b);
        }
    }
    let mut rows = vec![FixedBitSet::new(); n];
    let expanded: Vec<(usize, FixedBitSet)> = classes
        .par_iter()
        .enumerate()
        .filter(|(_, (img, _))| !img.is_zero())
        .map(|(c, _)| {
            let mut row = FixedBitSet::with_capacity(n);
            for c2 in class_adj[c].ones() {
                for &v in &classes[c2].1 {
                    row.insert(v);
                }
            }
            (c, row)
        })
        .collect();
    for (c, row) in expanded {
        for &v in &classes[c].1 {
            rows[v] = row.clone();
        }
    }
    for (v, r) in rows.iter_mut().enumerate() {
        if r.is_empty() {
            *r = FixedBitSet::with_capacity(n);
        }
        r.insert(v);
    }
    Ok(Graph { rows, marked: FixedBitSet::with_capacity(n) })
}

fn assemble(module: &AModule, ideal: &Ideal, mut raw: Vec<Vertex>, seeds: &[Vec<u32>]) -> Result<CycGraph> {
    sort_vertices(&mut raw);
    let ops = module.ideal_operators(ideal)?;
    let f = module.field();
    let images: Vec<Subspace> = raw
        .par_iter()
        .map(|v| {
            let vecs: Vec<Vec<u32>> = ops.iter().map(|op| op.mul_vec(&v.rep)).collect();
            Subspace::span(f, module.dim(), &vecs).expect("module-length vectors")
        })
        .collect();
    let graph = adjacency_from_images(&images)?;
    let mut g = CycGraph::from_parts(raw, graph);
    let seed_idx: Vec<usize> = seeds
        .iter()
        .filter_map(|x| g.index_of(&module.cyclic_space(x)))
        .collect();
    g.graph.mark_components_of(&seed_idx);
    Ok(g)
}

/// `Γ_I(M, Σ)` with `⋃_{a ∈ Σ'} C_a` marked.
pub fn gamma(t: &CTriple, ideal: &Ideal) -> Result<CycGraph> {
    let mut seen: HashSet<Subspace> = HashSet::new();
    let mut raw = Vec::new();
    for a in &t.sigma {
        let space = t.module.cyclic(a)?.into_space();
        if seen.insert(space.clone()) {
            raw.push(Vertex { space, rep: a.clone() });
        }
    }
    assemble(&t.module, ideal, raw, &t.sigma_prime)
}

/// `Γ_I(M)`, i.e. `Σ = M ∖ IM`.
pub fn gamma_full(module: &AModule, ideal: &Ideal, budget: u128) -> Result<CycGraph> {
    let f = module.field();
    let p = module.p();
    let d = module.dim();
    let total = count_vectors(p, d);
    check_budget(total, budget)?;
    let im = module.ideal_module(ideal)?;
    let mut visited = FixedBitSet::with_capacity(total as usize);
    let mut raw = Vec::new();
    for x in VectorIter::new(f, d) {
        let idx = vector_index(p, &x) as usize;
        if visited.contains(idx) || im.contains(&x) {
            continue;
        }
        let space = module.cyclic_space(&x);
        let jx: Vec<Vec<u32>> = module.actions().iter().map(|t| t.mul_vec(&x)).collect();
        let jrx = Subspace::span(f, d, &jx)?;
        // Generators of Rx are exactly ux + j with u a unit scalar, j ∈ J·Rx.
        for j in jrx.enumerate(u128::MAX)? {
            for a in 1..p {
                let mut y = j.clone();
                f.axpy(&mut y, a, &x);
                visited.insert(vector_index(p, &y) as usize);
            }
        }
        raw.push(Vertex { space, rep: x });
    }
    assemble(module, ideal, raw, &[])
}

/// Number of connected components of `Γ_I(M)`; requires `M ∈ 𝔇(I)`.
pub fn cdim(module: &AModule, ideal: &Ideal, budget: u128) -> Result<usize> {
    if !module.in_decomposition_domain(ideal)? {
        return Err(Error::NotDecompositionIdeal);
    }
    Ok(gamma_full(module, ideal, budget)?.component_count())
}

/// Components of `Γ_I(M)` hit by `Σ`, or `None` if some element of `Σ` lies
/// in `IM` (or is not a vertex).
pub fn sigma_components(full: &CycGraph, module: &AModule, sigma: &[Vec<u32>]) -> Option<Vec<usize>> {
    let ids = full.graph.component_ids();
    sigma
        .iter()
        .map(|x| full.index_of(&module.cyclic_space(x)).map(|v| ids[v]))
        .collect()
}

/// Fundamental test against a precomputed `Γ_I(M)`.
pub fn is_fundamental_in(full: &CycGraph, module: &AModule, ideal: &Ideal, sigma: &[Vec<u32>]) -> Result<bool> {
    let im = module.ideal_module(ideal)?;
    for x in sigma {
        if x.len() != module.dim() {
            return Err(Error::Dimension(format!("vector of length {} in a module of dim {}", x.len(), module.dim())));
        }
        if im.contains(x) {
            return Ok(false);
        }
    }
    if !module.generated(sigma)?.is_full() {
        return Ok(false);
    }
    let Some(comps) = sigma_components(full, module, sigma) else {
        return Ok(false);
    };
    let ids = full.graph.component_ids();
    let f = module.field();
    let mut outside_cache: HashMap<usize, bool> = HashMap::new();
    for c in comps {
        let proper = *outside_cache.entry(c).or_insert_with(|| {
            let mut acc = Subspace::zero(f, module.dim());
            for (v, vert) in full.vertices.iter().enumerate() {
                if ids[v] != c && !vert.space.is_subspace_of(&acc) {
                    acc = acc.sum(&vert.space).expect("same ambient");
                    if acc.is_full() {
                        break;
                    }
                }
            }
            !acc.is_full()
        });
        if !proper {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_fundamental(module: &AModule, ideal: &Ideal, sigma: &[Vec<u32>], budget: u128) -> Result<bool> {
    let full = gamma_full(module, ideal, budget)?;
    is_fundamental_in(&full, module, ideal, sigma)
}

/// Number of components of `Γ_I(M)` met by a fundamental `Σ`.
pub fn fcdim_in(full: &CycGraph, module: &AModule, ideal: &Ideal, sigma: &[Vec<u32>]) -> Result<usize> {
    if !is_fundamental_in(full, module, ideal, sigma)? {
        return Err(Error::NotFundamental);
    }
    let comps = sigma_components(full, module, sigma).expect("fundamental sets are vertices");
    Ok(comps.into_iter().collect::<HashSet<_>>().len())
}

pub fn fcdim(module: &AModule, ideal: &Ideal, sigma: &[Vec<u32>], budget: u128) -> Result<usize> {
    let full = gamma_full(module, ideal, budget)?;
    fcdim_in(&full, module, ideal, sigma)
}

/// `Ra ~ Rb` decided by solving `Σ x_k w_k a - Σ y_k w_k b = 0` and testing
/// whether some solution gives a nonzero common element. Independent of the
/// intersection routine used to build graphs.
pub fn adjacent_by_linear_system(module: &AModule, ideal: &Ideal, a: &[u32], b: &[u32]) -> Result<bool> {
    let ops = module.ideal_operators(ideal)?;
    let f = module.field();
    let k = ops.len();
    let mut cols: Vec<Vec<u32>> = ops.iter().map(|op| op.mul_vec(a)).collect();
    cols.extend(ops.iter().map(|op| op.mul_vec(b).iter().map(|&x| f.neg(x)).collect::<Vec<_>>()));
    let system = FpMatrix::from_columns(f, module.dim(), &cols);
    for sol in system.kernel().basis_vectors() {
        let mut common = vec![0u32; module.dim()];
        for (c, col) in sol[..k].iter().zip(&cols[..k]) {
            f.axpy(&mut common, *c, col);
        }
        if common.iter().any(|&x| x != 0) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `Γ_I(f)` together with the two graphs it connects.
#[derive(Clone, Debug)]
pub struct GammaMap {
    pub src: CycGraph,
    pub dst: CycGraph,
    pub map: Vec<usize>,
}

/// `Γ_I(f)(Ra) = R f(a)`, verified to be a graph morphism.
pub fn gamma_map(f: &FpMatrix, src: &CTriple, dst: &CTriple, ideal: &Ideal) -> Result<GammaMap> {
    if !src.module.is_intertwiner(f, &dst.module) {
        return Err(Error::NotCMorphism("map does not commute with the action".into()));
    }
    let targets: HashSet<&Vec<u32>> = dst.sigma.iter().collect();
    if src.sigma.iter().any(|a| !targets.contains(&f.mul_vec(a))) {
        return Err(Error::NotCMorphism("f(Σ) is not contained in the target Σ".into()));
    }
    let targets: HashSet<&Vec<u32>> = dst.sigma_prime.iter().collect();
    if src.sigma_prime.iter().any(|a| !targets.contains(&f.mul_vec(a))) {
        return Err(Error::NotCMorphism("f(Σ') is not contained in the target Σ'".into()));
    }
    let gs = gamma(src, ideal)?;
    let gd = gamma(dst, ideal)?;
    let map: Vec<usize> = gs
        .vertices
        .iter()
        .map(|v| {
            let image = dst.module.cyclic_space(&f.mul_vec(&v.rep));
            gd.index_of(&image).expect("f(Σ) lies in the target Σ")
        })
        .collect();
    if let Some((i, j)) = gs.graph.morphism_failure(&map, &gd.graph) {
        return Err(Error::AdjacencyNotPreserved(i, j));
    }
    Ok(GammaMap { src: gs, dst: gd, map })
}

/// Disjoint union; vertices of later graphs are shifted.
pub fn graph_coproduct(gs: &[&Graph]) -> Graph {
    let n: usize = gs.iter().map(|g| g.len()).sum();
    let mut out = Graph::discrete(n);
    let mut offset = 0;
    let mut marked = Vec::new();
    for g in gs {
        for (i, j) in g.edges() {
            out.add_edge(offset + i, offset + j);
        }
        marked.extend(g.marked().into_iter().map(|m| m + offset));
        offset += g.len();
    }
    out.with_marked(marked)
}

/// Categorical product: tuples in mixed radix (first factor slowest), adjacent
/// when every coordinate is adjacent. A tuple is marked when all its
/// coordinates are.
pub fn graph_product(gs: &[&Graph]) -> Graph {
    let sizes: Vec<usize> = gs.iter().map(|g| g.len()).collect();
    let n: usize = sizes.iter().product();
    let decode = |mut idx: usize| -> Vec<usize> {
        let mut out = vec![0; sizes.len()];
        for k in (0..sizes.len()).rev() {
            out[k] = idx % sizes[k];
            idx /= sizes[k];
        }
        out
    };
    let tuples: Vec<Vec<usize>> = (0..n).map(decode).collect();
    let mut out = Graph::discrete(n);
    for a in 0..n {
        for b in a + 1..n {
            if gs.iter().enumerate().all(|(k, g)| g.adjacent(tuples[a][k], tuples[b][k])) {
                out.add_edge(a, b);
            }
        }
    }
    let marked: Vec<usize> = (0..n)
        .filter(|&a| gs.iter().enumerate().all(|(k, g)| g.is_marked(tuples[a][k])))
        .collect();
    out.with_marked(marked)
}

/// Equalizer of two vertex maps out of `src`: the induced subgraph on the
/// vertices where they agree, with its inclusion.
pub fn graph_equalizer(src: &Graph, f: &[usize], g: &[usize]) -> (Graph, Vec<usize>) {
    let keep: Vec<usize> = (0..src.len()).filter(|&v| f[v] == g[v]).collect();
    let mut sub = src.induced(&keep);
    let marked = sub.marked();
    sub.mark_components_of(&marked);
    (sub, keep)
}

/// Coequalizer of two vertex maps into `dst`: identify `f(a)` with `g(a)`
/// under the generated equivalence; classes are adjacent when some members
/// are. Returns the quotient and the projection.
pub fn graph_coequalizer(dst: &Graph, f: &[usize], g: &[usize]) -> (Graph, Vec<usize>) {
    let n = dst.len();
    let mut uf = UnionFind::<usize>::new(n);
    for (&a, &b) in f.iter().zip(g) {
        uf.union(a, b);
    }
    let mut label: HashMap<usize, usize> = HashMap::new();
    let proj: Vec<usize> = (0..n)
        .map(|v| {
            let r = uf.find(v);
            let next = label.len();
            *label.entry(r).or_insert(next)
        })
        .collect();
    let mut out = Graph::discrete(label.len());
    for (i, j) in dst.edges() {
        if proj[i] != proj[j] {
            out.add_edge(proj[i], proj[j]);
        }
    }
    let marked: Vec<usize> = dst.marked().into_iter().map(|m| proj[m]).collect();
    (out.with_marked(marked), proj)
}

/// Union of graphs over a shared vertex universe: vertex set is the union of
/// keys, adjacency the union of adjacencies.
pub fn keyed_union<K: Ord + Clone>(parts: &[(&[K], &Graph)]) -> (Vec<K>, Graph) {
    let mut keys: BTreeMap<K, usize> = BTreeMap::new();
    for (ks, _) in parts {
        for k in ks.iter() {
            keys.insert(k.clone(), 0);
        }
    }
    for (i, v) in keys.values_mut().enumerate() {
        *v = i;
    }
    let mut out = Graph::discrete(keys.len());
    let mut marked = Vec::new();
    for (ks, g) in parts {
        let idx: Vec<usize> = ks.iter().map(|k| keys[k]).collect();
        for (i, j) in g.edges() {
            out.add_edge(idx[i], idx[j]);
        }
        marked.extend(g.marked().into_iter().map(|m| idx[m]));
    }
    (keys.into_keys().collect(), out.with_marked(marked))
}

/// Intersection of graphs: common vertices, adjacent when adjacent in all.
pub fn keyed_intersection<K: Ord + Clone>(parts: &[(&[K], &Graph)]) -> (Vec<K>, Graph) {
    if parts.is_empty() {
        return (Vec::new(), Graph::discrete(0));
    }
    let lookups: Vec<BTreeMap<&K, usize>> = parts
        .iter()
        .map(|(ks, _)| ks.iter().enumerate().map(|(i, k)| (k, i)).collect())
        .collect();
    let mut common: Vec<K> = parts[0].0.iter().filter(|k| lookups.iter().all(|l| l.contains_key(k))).cloned().collect();
    common.sort();
    common.dedup();
    let pos: Vec<Vec<usize>> = lookups.iter().map(|l| common.iter().map(|k| l[k]).collect()).collect();
    let mut out = Graph::discrete(common.len());
    for a in 0..common.len() {
        for b in a + 1..common.len() {
            if parts.iter().enumerate().all(|(k, (_, g))| g.adjacent(pos[k][a], pos[k][b])) {
                out.add_edge(a, b);
            }
        }
    }
    let marked: Vec<usize> = (0..common.len())
        .filter(|&a| parts.iter().enumerate().all(|(k, (_, g))| g.is_marked(pos[k][a])))
        .collect();
    (common, out.with_marked(marked))
}

fn check_universe(gs: &[&CycGraph]) -> Result<()> {
    let mut shape = None;
    for g in gs {
        if let Some(v) = g.vertices.first() {
            let s = (v.space.p(), v.space.ambient());
            match shape {
                None => shape = Some(s),
                Some(t) if t != s => return Err(Error::IncompatibleUniverse),
                _ => {}
            }
        }
    }
    Ok(())
}

fn rebuild(keys: Vec<Subspace>, graph: Graph, reps: &HashMap<Subspace, Vec<u32>>) -> CycGraph {
    let vertices = keys
        .into_iter()
        .map(|space| {
            let rep = reps[&space].clone();
            Vertex { space, rep }
        })
        .collect();
    CycGraph::from_parts(vertices, graph)
}

fn rep_table(gs: &[&CycGraph]) -> HashMap<Subspace, Vec<u32>> {
    let mut reps = HashMap::new();
    for g in gs {
        for v in &g.vertices {
            reps.entry(v.space.clone()).or_insert_with(|| v.rep.clone());
        }
    }
    reps
}

/// Union of graphs of cyclic submodules of one module.
pub fn cyc_union(gs: &[&CycGraph]) -> Result<CycGraph> {
    check_universe(gs)?;
    let keys: Vec<Vec<Subspace>> = gs.iter().map(|g| g.keys()).collect();
    let parts: Vec<(&[Subspace], &Graph)> = keys.iter().zip(gs).map(|(k, g)| (k.as_slice(), &g.graph)).collect();
    let (ks, graph) = keyed_union(&parts);
    Ok(rebuild(ks, graph, &rep_table(gs)))
}

pub fn cyc_intersection(gs: &[&CycGraph]) -> Result<CycGraph> {
    check_universe(gs)?;
    let keys: Vec<Vec<Subspace>> = gs.iter().map(|g| g.keys()).collect();
    let parts: Vec<(&[Subspace], &Graph)> = keys.iter().zip(gs).map(|(k, g)| (k.as_slice(), &g.graph)).collect();
    let (ks, graph) = keyed_intersection(&parts);
    Ok(rebuild(ks, graph, &rep_table(gs)))
}

/// Result of identifying vertices with equal ideal images.
#[derive(Clone, Debug)]
pub struct Collapse {
    pub graph: CycGraph,
    pub class_of: Vec<usize>,
}

/// Identify `Ra` and `Rb` when `Ia = Ib`. Each class is represented by its
/// first member; classes are adjacent when some members are.
pub fn socle_collapse(g: &CycGraph, ideal: &Ideal, module: &AModule) -> Result<Collapse> {
    let mut class_index: HashMap<Subspace, usize> = HashMap::new();
    let mut firsts = Vec::new();
    let mut class_of = Vec::with_capacity(g.len());
    for (v, vert) in g.vertices.iter().enumerate() {
        let img = module.ideal_image_vec(ideal, &vert.rep)?;
        let c = *class_index.entry(img).or_insert_with(|| {
            firsts.push(v);
            firsts.len() - 1
        });
        class_of.push(c);
    }
    let mut graph = Graph::discrete(firsts.len());
    for (i, j) in g.graph.edges() {
        if class_of[i] != class_of[j] {
            graph.add_edge(class_of[i], class_of[j]);
        }
    }
    let marked: Vec<usize> = g.graph.marked().into_iter().map(|m| class_of[m]).collect();
    graph.mark_components_of(&marked);
    let vertices = firsts.iter().map(|&v| g.vertices[v].clone()).collect();
    Ok(Collapse { graph: CycGraph::from_parts(vertices, graph), class_of })
}

/// Whether `map` is an isomorphism `g -> h` respecting the marked sets.
pub fn is_isomorphism(g: &Graph, h: &Graph, map: &[usize]) -> bool {
    if g.len() != h.len() || map.len() != g.len() {
        return false;
    }
    let mut hit = vec![false; h.len()];
    for &m in map {
        if m >= h.len() || hit[m] {
            return false;
        }
        hit[m] = true;
    }
    (0..g.len()).all(|i| {
        g.is_marked(i) == h.is_marked(map[i]) && (i + 1..g.len()).all(|j| g.adjacent(i, j) == h.adjacent(map[i], map[j]))
    })
}

/// Brute-force isomorphism search, limited to `MAX_ISO_VERTICES` vertices.
pub fn find_isomorphism(g: &Graph, h: &Graph) -> Result<Option<Vec<usize>>> {
    let n = g.len();
    if n != h.len() {
        return Ok(None);
    }
    if n > MAX_ISO_VERTICES {
        return Err(Error::TooLarge(n));
    }
    let profile = |x: &Graph| -> Vec<(usize, bool)> {
        let mut v: Vec<(usize, bool)> = (0..x.len()).map(|i| (x.degree(i), x.is_marked(i))).collect();
        v.sort();
        v
    };
    if profile(g) != profile(h) {
        return Ok(None);
    }
    Ok((0..n).permutations(n).find(|perm| is_isomorphism(g, h, perm)))
}

pub fn is_isomorphic(g: &Graph, h: &Graph) -> Result<bool> {
    Ok(find_isomorphism(g, h)?.is_some())
}

fn same_algebra(ts: &[CTriple]) -> Result<()> {
    let first = ts.first().ok_or_else(|| Error::Dimension("empty family of triples".into()))?;
    for t in ts {
        if t.module.algebra() != first.module.algebra() {
            return Err(Error::FieldMismatch { left: first.module.p(), right: t.module.p() });
        }
    }
    Ok(())
}

fn embed(x: &[u32], offset: usize, d: usize) -> Vec<u32> {
    let mut v = vec![0; d];
    v[offset..offset + x.len()].copy_from_slice(x);
    v
}

/// `(⊕ M_α, ⋃ ι_α(Σ_α), ⋃ ι_α(Σ'_α))`.
pub fn triple_coproduct(ts: &[CTriple]) -> Result<CTriple> {
    same_algebra(ts)?;
    let mut module = AModule::zero(*ts[0].module.algebra());
    for t in ts {
        module = module.direct_sum(&t.module)?;
    }
    let d = module.dim();
    let mut sigma = Vec::new();
    let mut sigma_prime = Vec::new();
    let mut offset = 0;
    for t in ts {
        sigma.extend(t.sigma.iter().map(|x| embed(x, offset, d)));
        sigma_prime.extend(t.sigma_prime.iter().map(|x| embed(x, offset, d)));
        offset += t.module.dim();
    }
    CTriple::new(module, sigma, sigma_prime)
}

/// `(⊕ M_α, ∏ Σ_α, ∏ Σ'_α)`; tuples are concatenated, first factor slowest.
pub fn triple_product(ts: &[CTriple]) -> Result<CTriple> {
    same_algebra(ts)?;
    let mut module = AModule::zero(*ts[0].module.algebra());
    for t in ts {
        module = module.direct_sum(&t.module)?;
    }
    let cart = |pick: &dyn Fn(&CTriple) -> &Vec<Vec<u32>>| -> Vec<Vec<u32>> {
        ts.iter()
            .map(|t| pick(t).clone())
            .multi_cartesian_product()
            .map(|parts| parts.concat())
            .collect()
    };
    let sigma = cart(&|t| &t.sigma);
    let sigma_prime = cart(&|t| &t.sigma_prime);
    CTriple::new(module, sigma, sigma_prime)
}

/// Coordinates of `x ∈ U` in the canonical basis of `U`.
pub(crate) fn coordinates_in(u: &Subspace, x: &[u32]) -> Vec<u32> {
    u.pivots().iter().map(|&c| x[c]).collect()
}

/// Equalizer of `f, g: src -> dst`: `ker(f - g)` with the elements of `Σ` and
/// `Σ'` that it contains, in the kernel's own basis, and the inclusion.
pub fn triple_equalizer(f: &FpMatrix, g: &FpMatrix, src: &CTriple, dst: &CTriple) -> Result<(CTriple, FpMatrix)> {
    for m in [f, g] {
        if !src.module.is_intertwiner(m, &dst.module) {
            return Err(Error::NotCMorphism("map does not commute with the action".into()));
        }
    }
    let k = f.sub(g).kernel();
    let (module, inclusion) = src.module.restrict(&k)?;
    let pick = |s: &[Vec<u32>]| -> Vec<Vec<u32>> {
        s.iter().filter(|x| k.contains(x)).map(|x| coordinates_in(&k, x)).collect()
    };
    let t = CTriple::new(module, pick(&src.sigma), pick(&src.sigma_prime))?;
    Ok((t, inclusion))
}

/// Colimit of a finite chain of injective intertwiners `maps[k]: chain[k] ->
/// chain[k+1]`: the last module with the accumulated images of every `Σ`.
/// Also returns the maps into the limit.
pub fn triple_chain_limit(chain: &[CTriple], maps: &[FpMatrix]) -> Result<(CTriple, Vec<FpMatrix>)> {
    if chain.is_empty() || maps.len() + 1 != chain.len() {
        return Err(Error::Dimension(format!("{} triples with {} chain maps", chain.len(), maps.len())));
    }
    for (k, m) in maps.iter().enumerate() {
        if !chain[k].module.is_intertwiner(m, &chain[k + 1].module) {
            return Err(Error::NotCMorphism(format!("chain map {} does not commute with the action", k)));
        }
        if m.rank() != m.cols() {
            return Err(Error::NotInjective(k));
        }
    }
    let last = chain.last().expect("nonempty");
    let f = last.module.field();
    let mut to_limit = vec![FpMatrix::identity(f, last.module.dim())];
    for m in maps.iter().rev() {
        let next = to_limit.last().expect("nonempty").mul(m);
        to_limit.push(next);
    }
    to_limit.reverse();
    let mut sigma = Vec::new();
    let mut sigma_prime = Vec::new();
    let mut seen = HashSet::new();
    let mut seen_prime = HashSet::new();
    for (t, phi) in chain.iter().zip(&to_limit) {
        for x in &t.sigma {
            let y = phi.mul_vec(x);
            if seen.insert(y.clone()) {
                sigma.push(y);
            }
        }
        for x in &t.sigma_prime {
            let y = phi.mul_vec(x);
            if seen_prime.insert(y.clone()) {
                sigma_prime.push(y);
            }
        }
    }
    Ok((CTriple::new(last.module.clone(), sigma, sigma_prime)?, to_limit))
}

/// Push a graph of cyclic submodules forward along an injective map, keeping
/// its adjacency.
pub fn push_forward(g: &CycGraph, phi: &FpMatrix) -> CycGraph {
    let vertices = g
        .vertices
        .iter()
        .map(|v| Vertex { space: v.space.image(phi), rep: phi.mul_vec(&v.rep) })
        .collect();
    CycGraph::from_parts(vertices, g.graph.clone())
}

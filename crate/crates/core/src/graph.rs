//! Weighted graphs, their morphisms, quotients and coverings.
//!
//! A [`WeightedGraph`] carries a symmetric nonnegative rational weight and a
//! per-vertex degree. For a closed graph the degree is the weight sum, with
//! loops counted once. Finite windows cut out of an infinite graph (balls in
//! the Cayley graph, intervals of the line) instead keep the degree the
//! vertex has in the ambient graph. Vertices whose weight sum falls short
//! of their degree are *deficient*: they sit on the truncation boundary, and
//! every exact claim is restricted to vertices far enough from them.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::{self, Debug, Write as _};
use std::hash::Hash;

use num_traits::{One, ToPrimitive, Zero};

use crate::error::{arg, Error, Result};
use crate::linalg::DenseMatrix;
use crate::psl::PslElement;
use crate::qsqrt2::QSqrt2;
use crate::word::ReducedWord;
use crate::Rational;

/// Vertex identifiers usable in graphs and in the text edge format.
pub trait VertexId: Clone + Eq + Hash + Debug {
    fn to_token(&self) -> String;
    fn from_token(s: &str) -> Option<Self>;
}

impl VertexId for i64 {
    fn to_token(&self) -> String {
        self.to_string()
    }
    fn from_token(s: &str) -> Option<Self> {
        s.parse().ok()
    }
}

impl VertexId for usize {
    fn to_token(&self) -> String {
        self.to_string()
    }
    fn from_token(s: &str) -> Option<Self> {
        s.parse().ok()
    }
}

/// The identity word is written `e` in edge files since the empty string
/// cannot be a whitespace-separated token.
impl VertexId for ReducedWord {
    fn to_token(&self) -> String {
        if self.is_identity() {
            "e".to_string()
        } else {
            self.to_string()
        }
    }
    fn from_token(s: &str) -> Option<Self> {
        if s == "e" {
            Some(ReducedWord::identity())
        } else {
            s.parse().ok()
        }
    }
}

/// Written as `a,b,c,d@p`.
impl VertexId for PslElement {
    fn to_token(&self) -> String {
        let [a, b, c, d] = self.entries();
        format!("{a},{b},{c},{d}@{}", self.p())
    }
    fn from_token(s: &str) -> Option<Self> {
        let (m, p) = s.split_once('@')?;
        let p: u32 = p.parse().ok()?;
        let e: Vec<i64> = m.split(',').map(|x| x.parse().ok()).collect::<Option<_>>()?;
        PslElement::new(p, e.try_into().ok()?).ok()
    }
}

pub(crate) fn rational_to_f64(q: &Rational) -> f64 {
    q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
}

fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let (n, d): (i128, i128) = (n.parse().ok()?, d.parse().ok()?);
            (d != 0).then(|| Rational::new(n, d))
        }
        None => s.parse().ok().map(Rational::from_integer),
    }
}

/// Accumulates symmetric weights before freezing them into a graph.
#[derive(Clone, Debug)]
pub struct GraphBuilder<V: VertexId> {
    labels: Vec<V>,
    index: HashMap<V, usize>,
    weights: Vec<BTreeMap<usize, Rational>>,
    degrees: HashMap<usize, Rational>,
}

impl<V: VertexId> Default for GraphBuilder<V> {
    fn default() -> Self {
        Self {
            labels: Vec::new(),
            index: HashMap::new(),
            weights: Vec::new(),
            degrees: HashMap::new(),
        }
    }
}

impl<V: VertexId> GraphBuilder<V> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a vertex (idempotent) and returns its index.
    pub fn vertex(&mut self, v: V) -> usize {
        if let Some(&i) = self.index.get(&v) {
            return i;
        }
        let i = self.labels.len();
        self.index.insert(v.clone(), i);
        self.labels.push(v);
        self.weights.push(BTreeMap::new());
        i
    }

    /// Adds `w` to the symmetric weight w(u, v). A loop (u = v) adds `w`
    /// once to w(u, u).
    pub fn add(&mut self, u: V, v: V, w: Rational) -> Result<()> {
        if w < Rational::zero() {
            return Err(arg(format!("negative weight {w} on {u:?}-{v:?}")));
        }
        let (i, j) = (self.vertex(u), self.vertex(v));
        *self.weights[i].entry(j).or_insert_with(Rational::zero) += w;
        if i != j {
            *self.weights[j].entry(i).or_insert_with(Rational::zero) += w;
        }
        Ok(())
    }

    /// Declares the ambient degree of a vertex in a truncated window.
    pub fn ambient_degree(&mut self, v: V, d: Rational) {
        let i = self.vertex(v);
        self.degrees.insert(i, d);
    }

    pub fn build(self) -> Result<WeightedGraph<V>> {
        let adj: Vec<Vec<(usize, Rational)>> = self
            .weights
            .into_iter()
            .map(|row| row.into_iter().filter(|(_, w)| !w.is_zero()).collect())
            .collect();
        let mut degrees = Vec::with_capacity(adj.len());
        for (i, row) in adj.iter().enumerate() {
            let sum: Rational = row.iter().map(|(_, w)| *w).sum();
            let d = match self.degrees.get(&i) {
                Some(&d) if d < sum => {
                    return Err(Error::Invariant(format!(
                        "declared degree {d} of {:?} is below its weight sum {sum}",
                        self.labels[i]
                    )))
                }
                Some(&d) => d,
                None => sum,
            };
            if d <= Rational::zero() {
                return Err(Error::Invariant(format!("vertex {:?} has zero degree", self.labels[i])));
            }
            degrees.push(d);
        }
        let g = WeightedGraph {
            labels: self.labels,
            index: self.index,
            adj,
            degrees,
        };
        if !g.is_connected() {
            return Err(Error::Invariant("graph is not connected".into()));
        }
        Ok(g)
    }
}

/// A connected weighted graph with symmetric nonnegative rational weights.
#[derive(Clone, Debug)]
pub struct WeightedGraph<V: VertexId> {
    labels: Vec<V>,
    index: HashMap<V, usize>,
    adj: Vec<Vec<(usize, Rational)>>,
    degrees: Vec<Rational>,
}

impl<V: VertexId> WeightedGraph<V> {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[V] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &V {
        &self.labels[i]
    }

    pub fn index_of(&self, v: &V) -> Option<usize> {
        self.index.get(v).copied()
    }

    fn require(&self, v: &V) -> Result<usize> {
        self.index_of(v).ok_or_else(|| arg(format!("unknown vertex {v:?}")))
    }

    /// Neighbours of vertex `i` (by index) with their weights, loops included.
    pub fn neighbors(&self, i: usize) -> &[(usize, Rational)] {
        &self.adj[i]
    }

    pub fn weight_at(&self, i: usize, j: usize) -> Rational {
        self.adj[i]
            .binary_search_by_key(&j, |&(k, _)| k)
            .map(|pos| self.adj[i][pos].1)
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn weight(&self, u: &V, v: &V) -> Result<Rational> {
        Ok(self.weight_at(self.require(u)?, self.require(v)?))
    }

    pub fn degree_at(&self, i: usize) -> Rational {
        self.degrees[i]
    }

    /// d_u = Σ_v w(u, v) (or the ambient degree on a truncation boundary).
    pub fn degree(&self, u: &V) -> Result<Rational> {
        Ok(self.degrees[self.require(u)?])
    }

    pub fn weight_sum_at(&self, i: usize) -> Rational {
        self.adj[i].iter().map(|(_, w)| *w).sum()
    }

    pub fn is_deficient(&self, i: usize) -> bool {
        self.weight_sum_at(i) < self.degrees[i]
    }

    pub fn is_truncated(&self) -> bool {
        (0..self.len()).any(|i| self.is_deficient(i))
    }

    fn is_connected(&self) -> bool {
        if self.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for &(j, _) in &self.adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == self.len()
    }

    /// For each vertex, the number of steps needed to leave the window:
    /// one more than the graph distance to the nearest deficient vertex.
    /// `usize::MAX` everywhere for a closed graph.
    pub fn exit_distance(&self) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::new();
        for i in 0..self.len() {
            if self.is_deficient(i) {
                dist[i] = 1;
                queue.push_back(i);
            }
        }
        while let Some(i) = queue.pop_front() {
            for &(j, _) in &self.adj[i] {
                if dist[j] == usize::MAX {
                    dist[j] = dist[i] + 1;
                    queue.push_back(j);
                }
            }
        }
        dist
    }

    /// M(u, v) = w(u, v)/√(d_u d_v) in floating point.
    pub fn m_entry_at(&self, i: usize, j: usize) -> f64 {
        let w = rational_to_f64(&self.weight_at(i, j));
        w / (rational_to_f64(&self.degrees[i]) * rational_to_f64(&self.degrees[j])).sqrt()
    }

    /// M(u, v) exactly in ℚ(√2); fails if √(d_u d_v) leaves the field.
    pub fn m_entry_exact(&self, i: usize, j: usize) -> Result<QSqrt2> {
        let w = self.weight_at(i, j);
        if w.is_zero() {
            return Ok(QSqrt2::zero());
        }
        let root = QSqrt2::sqrt_of(self.degrees[i] * self.degrees[j]).ok_or_else(|| {
            arg(format!(
                "sqrt of degree product {} is not in Q(sqrt 2)",
                self.degrees[i] * self.degrees[j]
            ))
        })?;
        Ok(QSqrt2::from_rational(w) / root)
    }

    /// Sparse rows of M.
    pub fn m_rows(&self) -> Vec<Vec<(usize, f64)>> {
        (0..self.len())
            .map(|i| self.adj[i].iter().map(|&(j, _)| (j, self.m_entry_at(i, j))).collect())
            .collect()
    }

    pub fn m_rows_exact(&self) -> Result<Vec<Vec<(usize, QSqrt2)>>> {
        (0..self.len())
            .map(|i| {
                self.adj[i]
                    .iter()
                    .map(|&(j, _)| Ok((j, self.m_entry_exact(i, j)?)))
                    .collect()
            })
            .collect()
    }

    /// Dense M = I − 𝓛, rows in vertex order.
    pub fn m_matrix(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.len());
        for (i, row) in self.m_rows().into_iter().enumerate() {
            for (j, x) in row {
                m[(i, j)] = x;
            }
        }
        m
    }

    /// Dense 𝓛(u, v) = δ_{u,v} − w(u, v)/√(d_u d_v).
    pub fn normalized_laplacian(&self) -> DenseMatrix {
        let mut l = self.m_matrix();
        for i in 0..self.len() {
            for j in 0..self.len() {
                let delta = if i == j { 1.0 } else { 0.0 };
                l[(i, j)] = delta - l[(i, j)];
            }
        }
        l
    }

    /// 𝓛 entry in ℚ(√2).
    pub fn laplacian_entry_exact(&self, u: &V, v: &V) -> Result<QSqrt2> {
        let (i, j) = (self.require(u)?, self.require(v)?);
        let delta = if i == j { QSqrt2::one() } else { QSqrt2::zero() };
        Ok(delta - self.m_entry_exact(i, j)?)
    }

    /// Line-oriented edge list: `u v num/den`, each unordered pair once,
    /// loops once. Ambient degrees of deficient vertices are recorded as
    /// `# degree v num/den` comment lines.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for i in 0..self.len() {
            for &(j, w) in &self.adj[i] {
                if j >= i {
                    let _ = writeln!(
                        out,
                        "{} {} {}",
                        self.labels[i].to_token(),
                        self.labels[j].to_token(),
                        format_rational(&w)
                    );
                }
            }
        }
        for i in 0..self.len() {
            if self.is_deficient(i) {
                let _ = writeln!(
                    out,
                    "# degree {} {}",
                    self.labels[i].to_token(),
                    format_rational(&self.degrees[i])
                );
            }
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut b = GraphBuilder::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let bad = |msg: &str| Error::Parse {
                line: lineno + 1,
                msg: format!("{msg}: {raw:?}"),
            };
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if let ["degree", v, d] = toks[..] {
                    let v = V::from_token(v).ok_or_else(|| bad("bad vertex"))?;
                    let d = parse_rational(d).ok_or_else(|| bad("bad degree"))?;
                    b.ambient_degree(v, d);
                }
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let [u, v, w] = toks[..] else {
                return Err(bad("expected `u v w`"));
            };
            let u = V::from_token(u).ok_or_else(|| bad("bad vertex"))?;
            let v = V::from_token(v).ok_or_else(|| bad("bad vertex"))?;
            let w = parse_rational(w).ok_or_else(|| bad("bad weight"))?;
            b.add(u, v, w).map_err(|e| bad(&e.to_string()))?;
        }
        b.build()
    }
}

/// A surjective vertex map between graphs, with its (finite) fibers.
#[derive(Clone, Debug)]
pub struct VertexMap {
    assignment: Vec<usize>,
    fibers: Vec<Vec<usize>>,
}

impl VertexMap {
    /// Builds the map `src → dst` from a function on labels.
    pub fn new<V: VertexId, W: VertexId>(
        src: &WeightedGraph<V>,
        dst: &WeightedGraph<W>,
        f: impl Fn(&V) -> W,
    ) -> Result<Self> {
        let assignment = src
            .labels
            .iter()
            .map(|v| {
                let w = f(v);
                dst.index_of(&w)
                    .ok_or_else(|| arg(format!("{v:?} maps to {w:?}, which is not in the target")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_assignment(assignment, dst.len())
    }

    pub fn from_assignment(assignment: Vec<usize>, target_len: usize) -> Result<Self> {
        let mut fibers = vec![Vec::new(); target_len];
        for (i, &u) in assignment.iter().enumerate() {
            if u >= target_len {
                return Err(arg(format!("vertex {i} maps outside the target")));
            }
            fibers[u].push(i);
        }
        if let Some(u) = fibers.iter().position(Vec::is_empty) {
            return Err(Error::Invariant(format!(
                "map is not surjective: target vertex {u} has an empty fiber"
            )));
        }
        Ok(Self { assignment, fibers })
    }

    pub fn image(&self, i: usize) -> usize {
        self.assignment[i]
    }

    pub fn fiber(&self, u: usize) -> &[usize] {
        &self.fibers[u]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }
}

/// Disjoint blocks of source vertex indices covering the vertex set, each
/// with a label that becomes the quotient vertex id.
#[derive(Clone, Debug)]
pub struct Partition<B> {
    labels: Vec<B>,
    blocks: Vec<Vec<usize>>,
}

impl<B: VertexId> Partition<B> {
    /// Groups vertices by the value of `key`; blocks appear in order of first
    /// occurrence.
    pub fn by_key<V: VertexId>(g: &WeightedGraph<V>, key: impl Fn(&V) -> B) -> Self {
        let mut labels = Vec::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut pos: HashMap<B, usize> = HashMap::new();
        for (i, v) in g.labels.iter().enumerate() {
            let k = key(v);
            let b = *pos.entry(k.clone()).or_insert_with(|| {
                labels.push(k);
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(i);
        }
        Self { labels, blocks }
    }

    /// Validates explicit blocks against the graph's vertex set.
    pub fn from_blocks<V: VertexId>(g: &WeightedGraph<V>, blocks: Vec<(B, Vec<V>)>) -> Result<Self> {
        let mut owner = vec![None; g.len()];
        let mut labels = Vec::new();
        let mut idx_blocks = Vec::new();
        for (b, (label, members)) in blocks.into_iter().enumerate() {
            if members.is_empty() {
                return Err(arg(format!("block {label:?} is empty")));
            }
            let mut ids = Vec::with_capacity(members.len());
            for v in members {
                let i = g.require(&v)?;
                if owner[i].replace(b).is_some() {
                    return Err(arg(format!("vertex {v:?} lies in two blocks")));
                }
                ids.push(i);
            }
            labels.push(label);
            idx_blocks.push(ids);
        }
        if let Some(i) = owner.iter().position(Option::is_none) {
            return Err(arg(format!("vertex {:?} is in no block", g.labels[i])));
        }
        Ok(Self {
            labels,
            blocks: idx_blocks,
        })
    }

    pub fn singletons<V: VertexId>(g: &WeightedGraph<V>) -> Partition<V> {
        Partition {
            labels: g.labels.clone(),
            blocks: (0..g.len()).map(|i| vec![i]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Quotient graph: w(U, V) = Σ_{x∈U, y∈V} w̃(x, y), so weights inside a
/// block become a loop. Block degrees are the sums of member degrees.
pub fn quotient<V: VertexId, B: VertexId>(
    g: &WeightedGraph<V>,
    part: &Partition<B>,
) -> Result<(WeightedGraph<B>, VertexMap)> {
    let mut block_of = vec![usize::MAX; g.len()];
    for (b, members) in part.blocks.iter().enumerate() {
        for &i in members {
            if i >= g.len() || block_of[i] != usize::MAX {
                return Err(arg("partition does not match the graph"));
            }
            block_of[i] = b;
        }
    }
    if block_of.contains(&usize::MAX) {
        return Err(arg("partition does not cover the graph"));
    }
    let mut acc: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for i in 0..g.len() {
        for &(j, w) in &g.adj[i] {
            let (bi, bj) = (block_of[i], block_of[j]);
            if bi <= bj {
                *acc.entry((bi, bj)).or_insert_with(Rational::zero) += w;
            }
        }
    }
    let mut builder = GraphBuilder::new();
    for label in &part.labels {
        builder.vertex(label.clone());
    }
    for ((bu, bv), w) in acc {
        builder.add(part.labels[bu].clone(), part.labels[bv].clone(), w)?;
    }
    for (b, members) in part.blocks.iter().enumerate() {
        let d: Rational = members.iter().map(|&i| g.degrees[i]).sum();
        builder.ambient_degree(part.labels[b].clone(), d);
    }
    let q = builder.build()?;
    let map = VertexMap::from_assignment(block_of, q.len())?;
    Ok((q, map))
}

/// A pair where a covering identity fails, rendered with vertex tokens.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub x: String,
    pub u: String,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "x = {}, u = {}: lhs {} != rhs {}",
            self.x, self.u, self.lhs, self.rhs
        )
    }
}

/// Outcome of an exact covering check.
#[derive(Clone, Debug, PartialEq)]
pub struct CoveringReport {
    pub holds: bool,
    pub checked: usize,
    pub witness: Option<Witness>,
}

/// Checks Σ_{z∈f⁻¹(u)} w̃(z, x) = w(u, f(x)) / |f⁻¹(f(x))| exactly.
///
/// Source vertices x are checked when the whole fiber of f(x) is away from
/// the truncation boundary; for closed graphs that is every vertex.
pub fn is_covering<V: VertexId, W: VertexId>(
    src: &WeightedGraph<V>,
    dst: &WeightedGraph<W>,
    f: &VertexMap,
) -> CoveringReport {
    let mut checked = 0;
    for x in 0..src.len() {
        let v = f.image(x);
        if f.fiber(v).iter().any(|&y| src.is_deficient(y)) {
            continue;
        }
        let fiber_len = Rational::from_integer(f.fiber(v).len() as i128);
        let mut lhs: BTreeMap<usize, Rational> = BTreeMap::new();
        for &(z, w) in &src.adj[x] {
            *lhs.entry(f.image(z)).or_insert_with(Rational::zero) += w;
        }
        let mut rhs: BTreeMap<usize, Rational> = BTreeMap::new();
        for &(u, w) in &dst.adj[v] {
            rhs.insert(u, w / fiber_len);
        }
        let keys: std::collections::BTreeSet<usize> = lhs.keys().chain(rhs.keys()).copied().collect();
        for u in keys {
            checked += 1;
            let l = lhs.get(&u).copied().unwrap_or_else(Rational::zero);
            let r = rhs.get(&u).copied().unwrap_or_else(Rational::zero);
            if l != r {
                return CoveringReport {
                    holds: false,
                    checked,
                    witness: Some(Witness {
                        x: src.labels[x].to_token(),
                        u: dst.labels[u].to_token(),
                        lhs: l,
                        rhs: r,
                    }),
                };
            }
        }
    }
    CoveringReport {
        holds: checked > 0,
        checked,
        witness: None,
    }
}

/// Checks d̃_x · |f⁻¹(f(x))| = d_{f(x)} for every source vertex, exactly.
pub fn degree_transfer_check<V: VertexId, W: VertexId>(
    src: &WeightedGraph<V>,
    dst: &WeightedGraph<W>,
    f: &VertexMap,
) -> CoveringReport {
    for x in 0..src.len() {
        let v = f.image(x);
        let lhs = src.degrees[x];
        let rhs = dst.degrees[v] / Rational::from_integer(f.fiber(v).len() as i128);
        if lhs != rhs {
            return CoveringReport {
                holds: false,
                checked: x + 1,
                witness: Some(Witness {
                    x: src.labels[x].to_token(),
                    u: dst.labels[v].to_token(),
                    lhs,
                    rhs,
                }),
            };
        }
    }
    CoveringReport {
        holds: true,
        checked: src.len(),
        witness: None,
    }
}

/// Arithmetic used by [`meq_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeqMode {
    /// f64, compared to an absolute tolerance.
    Float { tol: f64 },
    /// Exact comparison in ℚ(√2).
    Exact,
}

impl MeqMode {
    pub const DEFAULT_FLOAT: MeqMode = MeqMode::Float { tol: 1e-12 };
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeqReport {
    pub holds: bool,
    pub k_max: usize,
    /// Number of (k, u, y) triples compared.
    pub checked: usize,
    /// Source vertices y whose k_max-neighbourhood avoids both boundaries.
    pub safe_sources: usize,
    pub max_abs_error: f64,
    pub witness: Option<String>,
}

/// Checks Σ_{x∈f⁻¹(u)} M̃^k(x, y) = √(|f⁻¹(u)|/|f⁻¹(v)|) M^k(u, v), v = f(y),
/// for all k ≤ k_max and all u, over every y whose k_max-neighbourhood (and
/// that of f(y)) stays off the truncation boundary.
pub fn meq_check<V: VertexId, W: VertexId>(
    src: &WeightedGraph<V>,
    dst: &WeightedGraph<W>,
    f: &VertexMap,
    k_max: usize,
    mode: MeqMode,
) -> Result<MeqReport> {
    let src_exit = src.exit_distance();
    let dst_exit = dst.exit_distance();
    let safe: Vec<usize> = (0..src.len())
        .filter(|&y| src_exit[y] > k_max && dst_exit[f.image(y)] > k_max)
        .collect();
    if safe.is_empty() {
        return Err(Error::Boundary(format!(
            "no source vertex is more than {k_max} steps from the truncation boundary"
        )));
    }
    match mode {
        MeqMode::Float { tol } => meq_float(src, dst, f, k_max, &safe, tol),
        MeqMode::Exact => meq_exact(src, dst, f, k_max, &safe),
    }
}

fn sparse_apply<T: Copy + Zero + std::ops::Mul<Output = T>>(rows: &[Vec<(usize, T)>], v: &[T]) -> Vec<T> {
    rows.iter()
        .map(|row| row.iter().fold(T::zero(), |acc, &(j, m)| acc + m * v[j]))
        .collect()
}

fn meq_float<V: VertexId, W: VertexId>(
    src: &WeightedGraph<V>,
    dst: &WeightedGraph<W>,
    f: &VertexMap,
    k_max: usize,
    safe: &[usize],
    tol: f64,
) -> Result<MeqReport> {
    let (ms, md) = (src.m_rows(), dst.m_rows());
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    let mut witness = None;
    for &y in safe {
        let v = f.image(y);
        let fv = f.fiber(v).len() as f64;
        let mut col_s = vec![0.0; src.len()];
        col_s[y] = 1.0;
        let mut col_d = vec![0.0; dst.len()];
        col_d[v] = 1.0;
        for k in 0..=k_max {
            if k > 0 {
                col_s = sparse_apply(&ms, &col_s);
                col_d = sparse_apply(&md, &col_d);
            }
            for u in 0..dst.len() {
                let lhs: f64 = f.fiber(u).iter().map(|&x| col_s[x]).sum();
                let rhs = (f.fiber(u).len() as f64 / fv).sqrt() * col_d[u];
                let err = (lhs - rhs).abs();
                checked += 1;
                if err > worst {
                    worst = err;
                    if err > tol && witness.is_none() {
                        witness = Some(format!(
                            "k = {k}, u = {}, y = {}: {lhs} vs {rhs}",
                            dst.labels[u].to_token(),
                            src.labels[y].to_token()
                        ));
                    }
                }
            }
        }
    }
    Ok(MeqReport {
        holds: worst <= tol,
        k_max,
        checked,
        safe_sources: safe.len(),
        max_abs_error: worst,
        witness,
    })
}

fn meq_exact<V: VertexId, W: VertexId>(
    src: &WeightedGraph<V>,
    dst: &WeightedGraph<W>,
    f: &VertexMap,
    k_max: usize,
    safe: &[usize],
) -> Result<MeqReport> {
    let (ms, md) = (src.m_rows_exact()?, dst.m_rows_exact()?);
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    let mut witness = None;
    for &y in safe {
        let v = f.image(y);
        let fv = f.fiber(v).len() as i128;
        let mut col_s = vec![QSqrt2::zero(); src.len()];
        col_s[y] = QSqrt2::one();
        let mut col_d = vec![QSqrt2::zero(); dst.len()];
        col_d[v] = QSqrt2::one();
        for k in 0..=k_max {
            if k > 0 {
                col_s = sparse_apply(&ms, &col_s);
                col_d = sparse_apply(&md, &col_d);
            }
            for u in 0..dst.len() {
                let lhs = f.fiber(u).iter().fold(QSqrt2::zero(), |a, &x| a + col_s[x]);
                let ratio = Rational::new(f.fiber(u).len() as i128, fv);
                let scale = QSqrt2::sqrt_of(ratio)
                    .ok_or_else(|| arg(format!("sqrt of fiber ratio {ratio} is not in Q(sqrt 2)")))?;
                let rhs = scale * col_d[u];
                checked += 1;
                if lhs != rhs {
                    worst = worst.max((lhs - rhs).to_f64().abs());
                    if witness.is_none() {
                        witness = Some(format!(
                            "k = {k}, u = {}, y = {}: {lhs} vs {rhs}",
                            dst.labels[u].to_token(),
                            src.labels[y].to_token()
                        ));
                    }
                }
            }
        }
    }
    Ok(MeqReport {
        holds: witness.is_none(),
        k_max,
        checked,
        safe_sources: safe.len(),
        max_abs_error: worst,
        witness,
    })
}

/// e^{−t} Σ_{k>terms} t^k/k!, summed directly so tiny tails keep their
/// relative accuracy.
pub fn poisson_tail(t: f64, terms: usize) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let k0 = terms + 1;
    let log_fact: f64 = (1..=k0).map(|i| (i as f64).ln()).sum();
    let mut term = (-t + k0 as f64 * t.ln() - log_fact).exp();
    let mut sum = 0.0;
    let mut k = k0;
    loop {
        sum += term;
        k += 1;
        let ratio = t / k as f64;
        term *= ratio;
        if ratio < 0.5 && term < sum * 1e-17 {
            // geometric remainder bound
            sum += term / (1.0 - ratio);
            break;
        }
        if term == 0.0 {
            break;
        }
    }
    sum
}

/// Truncated heat series h_t(·, x) = e^{−t} Σ_{k≤terms} t^k/k! M^k(·, x).
#[derive(Clone, Debug)]
pub struct HeatSeries {
    pub t: f64,
    pub terms: usize,
    pub source: usize,
    pub values: Vec<f64>,
    /// e^{−t} Σ_{k>terms} t^k/k!; bounds the neglected series since ‖M‖₂ ≤ 1.
    pub tail_bound: f64,
    exit: Vec<usize>,
}

impl HeatSeries {
    /// Rigorous bound on |values[y] − h_t(y, x)| for the ambient (untruncated)
    /// graph: the series tail plus every term long enough to reach the
    /// truncation boundary from x and come back to y.
    pub fn error_bound(&self, y: usize) -> f64 {
        let reach = self.exit[self.source].saturating_add(self.exit[y]);
        if reach > self.terms {
            self.tail_bound
        } else {
            poisson_tail(self.t, reach.saturating_sub(1))
        }
    }

    /// True when `values[y]` equals the ambient heat series (up to rounding).
    pub fn is_exact_at(&self, y: usize) -> bool {
        self.exit[self.source].saturating_add(self.exit[y]) > self.terms
    }
}

pub fn heat_series<V: VertexId>(g: &WeightedGraph<V>, x: &V, t: f64, terms: usize) -> Result<HeatSeries> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(arg(format!("time must be a nonnegative finite number, got {t}")));
    }
    let source = g.require(x)?;
    let rows = g.m_rows();
    let mut col = vec![0.0; g.len()];
    col[source] = 1.0;
    let mut coeff = (-t).exp();
    let mut values: Vec<f64> = col.iter().map(|c| coeff * c).collect();
    for k in 1..=terms {
        col = sparse_apply(&rows, &col);
        coeff *= t / k as f64;
        for (h, c) in values.iter_mut().zip(&col) {
            *h += coeff * c;
        }
    }
    Ok(HeatSeries {
        t,
        terms,
        source,
        values,
        tail_bound: poisson_tail(t, terms),
        exit: g.exit_distance(),
    })
}

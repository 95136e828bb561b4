use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::{Result, SaqmError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub amplitude: Complex64,
}

/// Directed acyclic graph of transition amplitudes from `source` to `sink`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeNetwork {
    node_count: usize,
    source: usize,
    sink: usize,
    edges: Vec<Edge>,
}

impl AmplitudeNetwork {
    /// Validates that the graph is acyclic and that every node lies on a
    /// path from `source` to `sink`.
    pub fn new(node_count: usize, source: usize, sink: usize, edges: Vec<Edge>) -> Result<Self> {
        let invalid = |m: String| Err(SaqmError::InvalidNetwork(m));
        if source >= node_count || sink >= node_count || source == sink {
            return invalid(format!(
                "bad terminals {source} -> {sink} over {node_count} nodes"
            ));
        }
        if edges.is_empty() {
            return invalid("no edges".into());
        }
        for e in &edges {
            if e.from >= node_count || e.to >= node_count {
                return invalid(format!("edge {} -> {} out of range", e.from, e.to));
            }
            if e.from == e.to {
                return invalid(format!("self-loop at node {}", e.from));
            }
        }
        let net = Self {
            node_count,
            source,
            sink,
            edges,
        };
        if net.topological_order().is_none() {
            return invalid("graph has a cycle".into());
        }
        let forward = net.reachable(source, false);
        let backward = net.reachable(sink, true);
        if let Some(n) = (0..node_count).find(|&n| !(forward[n] && backward[n])) {
            return invalid(format!("node {n} is not on any source-to-sink path"));
        }
        Ok(net)
    }

    pub fn single_edge(amplitude: Complex64) -> Self {
        Self {
            node_count: 2,
            source: 0,
            sink: 1,
            edges: vec![Edge {
                from: 0,
                to: 1,
                amplitude,
            }],
        }
    }

    /// `self` followed by `next`: the sink of `self` becomes the source of `next`.
    pub fn series(&self, next: &AmplitudeNetwork) -> Self {
        let offset = self.node_count;
        let map = |n: usize| {
            if n == next.source {
                self.sink
            } else {
                n + offset
            }
        };
        self.merged(next, map, map(next.sink))
    }

    /// `self` and `other` side by side, sharing source and sink.
    pub fn parallel(&self, other: &AmplitudeNetwork) -> Self {
        let offset = self.node_count;
        let map = |n: usize| {
            if n == other.source {
                self.source
            } else if n == other.sink {
                self.sink
            } else {
                n + offset
            }
        };
        self.merged(other, map, self.sink)
    }

    fn merged(&self, other: &AmplitudeNetwork, map: impl Fn(usize) -> usize, sink: usize) -> Self {
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|e| Edge {
            from: map(e.from),
            to: map(e.to),
            amplitude: e.amplitude,
        }));
        Self {
            node_count: self.node_count + other.node_count,
            source: self.source,
            sink,
            edges,
        }
        .compact()
    }

    /// Drops unused node labels.
    fn compact(mut self) -> Self {
        let mut used = vec![false; self.node_count];
        used[self.source] = true;
        used[self.sink] = true;
        for e in &self.edges {
            used[e.from] = true;
            used[e.to] = true;
        }
        let mut label = vec![usize::MAX; self.node_count];
        let mut next = 0;
        for (n, &u) in used.iter().enumerate() {
            if u {
                label[n] = next;
                next += 1;
            }
        }
        for e in &mut self.edges {
            e.from = label[e.from];
            e.to = label[e.to];
        }
        self.source = label[self.source];
        self.sink = label[self.sink];
        self.node_count = next;
        self
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Number of distinct source-to-sink paths.
    pub fn path_count(&self) -> u128 {
        let order = self.topological_order().expect("validated acyclic");
        let mut count = vec![0u128; self.node_count];
        count[self.source] = 1;
        for n in order {
            for e in self.edges.iter().filter(|e| e.from == n) {
                count[e.to] = count[e.to].saturating_add(count[n]);
            }
        }
        count[self.sink]
    }

    fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indegree = vec![0usize; self.node_count];
        for e in &self.edges {
            indegree[e.to] += 1;
        }
        let mut ready: Vec<usize> = (0..self.node_count).filter(|&n| indegree[n] == 0).collect();
        let mut order = Vec::with_capacity(self.node_count);
        while let Some(n) = ready.pop() {
            order.push(n);
            for e in self.edges.iter().filter(|e| e.from == n) {
                indegree[e.to] -= 1;
                if indegree[e.to] == 0 {
                    ready.push(e.to);
                }
            }
        }
        (order.len() == self.node_count).then_some(order)
    }

    fn reachable(&self, start: usize, reverse: bool) -> Vec<bool> {
        let mut seen = vec![false; self.node_count];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(n) = stack.pop() {
            for e in &self.edges {
                let (a, b) = if reverse {
                    (e.to, e.from)
                } else {
                    (e.from, e.to)
                };
                if a == n && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen
    }
}

/// Which reducible pattern is merged first at each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionOrder {
    FirstFound,
    LastFound,
    /// Uniformly random candidate, reproducible from the seed.
    Shuffled(u64),
}

/// Total amplitude by series (product) and parallel (sum) reduction.
pub fn compose_amplitudes(net: &AmplitudeNetwork) -> Result<Complex64> {
    compose_amplitudes_ordered(net, ReductionOrder::FirstFound)
}

pub fn compose_amplitudes_ordered(
    net: &AmplitudeNetwork,
    order: ReductionOrder,
) -> Result<Complex64> {
    enum Step {
        Parallel(usize, usize),
        Series(usize, usize),
    }
    let mut rng = match order {
        ReductionOrder::Shuffled(seed) => Some(StdRng::seed_from_u64(seed)),
        _ => None,
    };
    let mut edges = net.edges.clone();
    loop {
        if edges.len() == 1 && edges[0].from == net.source && edges[0].to == net.sink {
            return Ok(edges[0].amplitude);
        }
        let mut steps = Vec::new();
        for i in 0..edges.len() {
            for j in (i + 1)..edges.len() {
                if edges[i].from == edges[j].from && edges[i].to == edges[j].to {
                    steps.push(Step::Parallel(i, j));
                }
            }
        }
        for n in 0..net.node_count {
            if n == net.source || n == net.sink {
                continue;
            }
            let incoming: Vec<usize> = (0..edges.len()).filter(|&i| edges[i].to == n).collect();
            let outgoing: Vec<usize> = (0..edges.len()).filter(|&i| edges[i].from == n).collect();
            if incoming.len() == 1 && outgoing.len() == 1 {
                steps.push(Step::Series(incoming[0], outgoing[0]));
            }
        }
        if steps.is_empty() {
            return Err(SaqmError::NotSeriesParallel);
        }
        let pick = match (&mut rng, order) {
            (Some(r), _) => r.random_range(0..steps.len()),
            (None, ReductionOrder::LastFound) => steps.len() - 1,
            _ => 0,
        };
        let (keep, drop) = match steps[pick] {
            Step::Parallel(i, j) => {
                let other = edges[j].amplitude;
                edges[i].amplitude += other;
                (i, j)
            }
            Step::Series(i, j) => {
                let (other, to) = (edges[j].amplitude, edges[j].to);
                edges[i].amplitude *= other;
                edges[i].to = to;
                (i, j)
            }
        };
        debug_assert_ne!(keep, drop);
        edges.swap_remove(drop);
    }
}

/// Sum over every source-to-sink path of the product of its amplitudes.
///
/// Fails with `InvalidArgument` when the network has more than `max_paths`
/// paths.
pub fn path_sum(net: &AmplitudeNetwork, max_paths: u128) -> Result<Complex64> {
    let count = net.path_count();
    if count > max_paths {
        return Err(SaqmError::InvalidArgument(format!(
            "{count} paths exceed the limit {max_paths}"
        )));
    }
    fn walk(net: &AmplitudeNetwork, node: usize, product: Complex64, total: &mut Neumaier) {
        if node == net.sink {
            total.add(product);
            return;
        }
        for e in net.edges.iter().filter(|e| e.from == node) {
            walk(net, e.to, product * e.amplitude, total);
        }
    }
    let mut total = Neumaier::default();
    walk(net, net.source, Complex64::new(1.0, 0.0), &mut total);
    Ok(total.value())
}

/// Compensated complex sum, so the oracle's rounding does not grow with the
/// number of paths.
#[derive(Default)]
struct Neumaier {
    sum: Complex64,
    carry: Complex64,
}

impl Neumaier {
    fn add(&mut self, x: Complex64) {
        fn step(sum: &mut f64, carry: &mut f64, x: f64) {
            let t = *sum + x;
            *carry += if sum.abs() >= x.abs() {
                (*sum - t) + x
            } else {
                (x - t) + *sum
            };
            *sum = t;
        }
        step(&mut self.sum.re, &mut self.carry.re, x.re);
        step(&mut self.sum.im, &mut self.carry.im, x.im);
    }

    fn value(&self) -> Complex64 {
        self.sum + self.carry
    }
}

/// Amplitude of the reversed transition, `a(Y -> X) = conj(a(X -> Y))`.
pub fn reverse_amplitude(a: Complex64) -> Complex64 {
    a.conj()
}

/// Multiplies every path amplitude by `s` (scales the edges leaving the source).
pub fn scaled(net: &AmplitudeNetwork, s: Complex64) -> AmplitudeNetwork {
    let mut out = net.clone();
    for e in out.edges.iter_mut().filter(|e| e.from == net.source) {
        e.amplitude *= s;
    }
    out
}

/// Random series-parallel network with exactly `edges` edges.
///
/// Edge amplitudes are uniform in the unit disk and each branch of a
/// parallel composition is weighted by a random convex weight, so the sum
/// over paths of `|amplitude|` never exceeds 1.
pub fn random_series_parallel<R: Rng + ?Sized>(rng: &mut R, edges: usize) -> AmplitudeNetwork {
    if edges <= 1 {
        let r = rng.random::<f64>().sqrt();
        let phi = rng.random_range(0.0..std::f64::consts::TAU);
        return AmplitudeNetwork::single_edge(Complex64::from_polar(r, phi));
    }
    let left = rng.random_range(1..edges);
    let a = random_series_parallel(rng, left);
    let b = random_series_parallel(rng, edges - left);
    if rng.random::<bool>() {
        a.series(&b)
    } else {
        let w: f64 = rng.random();
        scaled(&a, Complex64::new(w, 0.0)).parallel(&scaled(&b, Complex64::new(1.0 - w, 0.0)))
    }
}

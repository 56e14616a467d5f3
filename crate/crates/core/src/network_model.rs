//! Secure network coding on acyclic digraphs.
//!
//! Edge `e` carries a value in `[2^⌊c_e n⌋]` over `n` channel uses. Each vertex
//! may draw a private key; edge values are computed in topological order from
//! the tail's incoming edge values, the messages originating at the tail and
//! the tail's key. Decoders exist only at destination vertices.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::index_model::{check_unique, normalize_set, FeasibilityReport, SUCCESS_VAR};
use crate::probinfo::{for_each_product_outcome, mutual_information, JointPmf, Pmf, Rational};
use crate::table::{self, Table};

/// Capacity in bits per channel use.
pub type Capacity = Ratio<u64>;

/// Largest supported number of bits on a single edge.
pub const MAX_EDGE_BITS: u32 = 24;

/// Joint variable name of an edge value.
pub fn edge_var(edge_id: &str) -> String {
    format!("$edge:{edge_id}")
}

/// Joint variable name of a vertex key.
pub fn key_var(vertex: &str) -> String {
    format!("$key:{vertex}")
}

/// `⌊c n⌋`.
pub fn floor_bits(capacity: &Capacity, uses: u32) -> u64 {
    (*capacity.numer() as u128 * uses as u128 / *capacity.denom() as u128) as u64
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    /// Distinguishes parallel edges with the same endpoints.
    pub label: u32,
    pub capacity: Capacity,
}

/// A message; `destinations` are ascending vertex indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NetworkMessage {
    pub id: String,
    pub alphabet: usize,
    pub origin: usize,
    pub destinations: Vec<usize>,
}

/// An eavesdropper; `targets` are message indices, `taps` edge indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NetworkEavesdropper {
    pub id: String,
    pub targets: Vec<usize>,
    pub taps: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NetworkInstance {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    messages: Vec<NetworkMessage>,
    eavesdroppers: Vec<NetworkEavesdropper>,
}

fn kahn(n: usize, edges: &[Edge]) -> std::result::Result<Vec<usize>, usize> {
    let mut indeg = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in edges {
        indeg[e.head] += 1;
        out[e.tail].push(e.head);
    }
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&v| indeg[v] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(v)) = ready.pop() {
        order.push(v);
        for &h in &out[v] {
            indeg[h] -= 1;
            if indeg[h] == 0 {
                ready.push(Reverse(h));
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        Err((0..n).find(|&v| indeg[v] > 0).expect("a vertex remains"))
    }
}

impl NetworkInstance {
    /// Validates and builds an instance. Index sets are sorted and deduplicated.
    pub fn new(
        vertices: Vec<String>,
        edges: Vec<Edge>,
        mut messages: Vec<NetworkMessage>,
        mut eavesdroppers: Vec<NetworkEavesdropper>,
    ) -> Result<Self> {
        check_unique("vertex", vertices.iter().map(String::as_str))?;
        check_unique("message", messages.iter().map(|m| m.id.as_str()))?;
        check_unique("eavesdropper", eavesdroppers.iter().map(|r| r.id.as_str()))?;
        let nv = vertices.len();
        for v in &vertices {
            if v.contains("->") || v.contains('#') || v.chars().any(char::is_whitespace) {
                return Err(Error::InvalidInstance(format!(
                    "vertex id `{v}` may not contain `->`, `#` or whitespace"
                )));
            }
        }
        for (i, e) in edges.iter().enumerate() {
            if e.tail >= nv || e.head >= nv {
                return Err(Error::InvalidInstance(format!("edge {i} has an unknown endpoint")));
            }
            if edges[..i]
                .iter()
                .any(|f| (f.tail, f.head, f.label) == (e.tail, e.head, e.label))
            {
                return Err(Error::InvalidInstance(format!(
                    "edge `{}->{}#{}` defined twice",
                    vertices[e.tail], vertices[e.head], e.label
                )));
            }
        }
        if let Err(v) = kahn(nv, &edges) {
            return Err(Error::Cycle(vertices[v].clone()));
        }
        for m in &mut messages {
            if m.id.starts_with('$') {
                return Err(Error::InvalidInstance(format!(
                    "message id `{}` uses the reserved `$` prefix",
                    m.id
                )));
            }
            if m.alphabet == 0 {
                return Err(Error::InvalidInstance(format!(
                    "message `{}` has an empty alphabet",
                    m.id
                )));
            }
            if m.origin >= nv {
                return Err(Error::InvalidInstance(format!(
                    "message `{}` has an unknown origin",
                    m.id
                )));
            }
            normalize_set(&mut m.destinations, nv, &format!("message `{}`", m.id))?;
            if m.destinations.contains(&m.origin) {
                return Err(Error::InvalidInstance(format!(
                    "message `{}` is demanded at its own origin",
                    m.id
                )));
            }
        }
        let (ns, ne) = (messages.len(), edges.len());
        for r in &mut eavesdroppers {
            normalize_set(&mut r.targets, ns, &format!("eavesdropper `{}`", r.id))?;
            normalize_set(&mut r.taps, ne, &format!("eavesdropper `{}` taps", r.id))?;
        }
        Ok(Self {
            vertices,
            edges,
            messages,
            eavesdroppers,
        })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn messages(&self) -> &[NetworkMessage] {
        &self.messages
    }

    pub fn eavesdroppers(&self) -> &[NetworkEavesdropper] {
        &self.eavesdroppers
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    pub fn message_index(&self, id: &str) -> Option<usize> {
        self.messages.iter().position(|m| m.id == id)
    }

    /// The edge id `tail->head#label`.
    pub fn edge_id(&self, e: usize) -> String {
        let e = &self.edges[e];
        format!("{}->{}#{}", self.vertices[e.tail], self.vertices[e.head], e.label)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        (0..self.edges.len()).find(|&e| self.edge_id(e) == id)
    }

    /// Incoming edges of `v` in edge order.
    pub fn in_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].head == v).collect()
    }

    /// Outgoing edges of `v` in edge order.
    pub fn out_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].tail == v).collect()
    }

    /// Messages originating at `v` in message order.
    pub fn origin_messages(&self, v: usize) -> Vec<usize> {
        (0..self.messages.len()).filter(|&s| self.messages[s].origin == v).collect()
    }

    /// Messages demanded at `v` in message order.
    pub fn demanded_at(&self, v: usize) -> Vec<usize> {
        (0..self.messages.len())
            .filter(|&s| self.messages[s].destinations.contains(&v))
            .collect()
    }

    /// Vertices demanding at least one message, in vertex order.
    pub fn destinations(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| !self.demanded_at(v).is_empty()).collect()
    }

    /// `⌊c_e n⌋`.
    pub fn edge_bits(&self, e: usize, uses: u32) -> u64 {
        floor_bits(&self.edges[e].capacity, uses)
    }

    /// Edge alphabet size `2^⌊c_e n⌋`.
    pub fn edge_alphabet(&self, e: usize, uses: u32) -> Result<usize> {
        match self.edge_bits(e, uses) {
            b if b <= MAX_EDGE_BITS as u64 => Ok(1usize << b),
            b => Err(Error::InvalidCode(format!(
                "edge `{}` would carry {b} bits; at most {MAX_EDGE_BITS} are supported",
                self.edge_id(e)
            ))),
        }
    }

    pub fn uniform_pmfs(&self) -> Vec<Pmf> {
        self.messages
            .iter()
            .map(|m| Pmf::uniform(m.alphabet).expect("alphabets are positive"))
            .collect()
    }

    pub(crate) fn check_pmfs(&self, pmfs: &[Pmf]) -> Result<()> {
        if pmfs.len() != self.messages.len() {
            return Err(Error::InvalidPmf(format!(
                "{} message pmfs for {} messages",
                pmfs.len(),
                self.messages.len()
            )));
        }
        for (m, p) in self.messages.iter().zip(pmfs) {
            if p.support_size() != m.alphabet {
                return Err(Error::SupportMismatch {
                    left: m.alphabet,
                    right: p.support_size(),
                });
            }
        }
        Ok(())
    }

    fn msg_sizes(&self, set: &[usize]) -> Vec<usize> {
        set.iter().map(|&s| self.messages[s].alphabet).collect()
    }

    fn edge_sizes(&self, set: &[usize], uses: u32) -> Result<Vec<usize>> {
        set.iter().map(|&e| self.edge_alphabet(e, uses)).collect()
    }

    /// Input alphabet sizes of the encoder of edge `e`, key slot excluded.
    pub fn encoder_inputs(&self, e: usize, uses: u32) -> Result<Vec<usize>> {
        let t = self.edges[e].tail;
        let mut d = self.edge_sizes(&self.in_edges(t), uses)?;
        d.extend(self.msg_sizes(&self.origin_messages(t)));
        Ok(d)
    }

    /// Input alphabet sizes of the decoder at `v`.
    pub fn decoder_inputs(&self, v: usize, uses: u32) -> Result<Vec<usize>> {
        let mut d = self.edge_sizes(&self.in_edges(v), uses)?;
        d.extend(self.msg_sizes(&self.origin_messages(v)));
        Ok(d)
    }

    /// Output alphabet sizes of the decoder at `v`.
    pub fn decoder_outputs(&self, v: usize) -> Vec<usize> {
        self.msg_sizes(&self.demanded_at(v))
    }

    fn without_vertices(&self, drop: &[bool]) -> Result<Self> {
        let mut remap = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        for (v, id) in self.vertices.iter().enumerate() {
            if !drop[v] {
                remap[v] = vertices.len();
                vertices.push(id.clone());
            }
        }
        let mut edge_map = vec![usize::MAX; self.edges.len()];
        let mut edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if !drop[e.tail] && !drop[e.head] {
                edge_map[i] = edges.len();
                edges.push(Edge {
                    tail: remap[e.tail],
                    head: remap[e.head],
                    ..e.clone()
                });
            }
        }
        let messages = self
            .messages
            .iter()
            .map(|m| NetworkMessage {
                origin: remap[m.origin],
                destinations: m
                    .destinations
                    .iter()
                    .filter(|&&d| !drop[d])
                    .map(|&d| remap[d])
                    .collect(),
                ..m.clone()
            })
            .collect();
        let eavesdroppers = self
            .eavesdroppers
            .iter()
            .map(|r| NetworkEavesdropper {
                taps: r
                    .taps
                    .iter()
                    .filter(|&&e| edge_map[e] != usize::MAX)
                    .map(|&e| edge_map[e])
                    .collect(),
                ..r.clone()
            })
            .collect();
        Self::new(vertices, edges, messages, eavesdroppers)
    }
}

/// Vertices in topological order; ties go to the smaller vertex index.
pub fn topological_order(n: &NetworkInstance) -> Result<Vec<usize>> {
    kahn(n.vertices.len(), &n.edges).map_err(|v| Error::Cycle(n.vertices[v].clone()))
}

/// Repeatedly deletes in-degree-0 vertices that originate no message and
/// out-degree-0 vertices that demand no message, with their incident edges.
pub fn normalize_instance(n: &NetworkInstance) -> Result<NetworkInstance> {
    topological_order(n)?;
    let mut cur = n.clone();
    loop {
        let drop: Vec<bool> = (0..cur.vertices.len())
            .map(|v| {
                let source_like = cur.in_edges(v).is_empty() && cur.origin_messages(v).is_empty();
                let sink_like = cur.out_edges(v).is_empty() && cur.demanded_at(v).is_empty();
                source_like || sink_like
            })
            .collect();
        if !drop.contains(&true) {
            return Ok(cur);
        }
        cur = cur.without_vertices(&drop)?;
    }
}

/// A network code over `uses` channel uses. A key pmf of support size 1 makes
/// that vertex deterministic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NetworkCode {
    uses: u32,
    keys: Vec<Pmf>,
    encoders: Vec<Table>,
    decoders: Vec<Option<Table>>,
}

impl NetworkCode {
    /// Encoder `e` reads `(in(tail).., origin(tail).., key(tail))`; the decoder
    /// at destination `v` reads `(in(v).., origin(v)..)` and returns the
    /// messages demanded at `v`. Non-destinations carry `None`.
    pub fn new(
        instance: &NetworkInstance,
        uses: u32,
        keys: Vec<Pmf>,
        encoders: Vec<Table>,
        decoders: Vec<Option<Table>>,
    ) -> Result<Self> {
        let code = Self {
            uses,
            keys,
            encoders,
            decoders,
        };
        code.check(instance)?;
        Ok(code)
    }

    /// Tabulates a code from closures. `encoder(e, in_values, origin_values, key)`
    /// and `decoder(v, in_values, origin_values)`.
    pub fn from_fns(
        instance: &NetworkInstance,
        uses: u32,
        keys: Vec<Pmf>,
        encoder: impl Fn(usize, &[u32], &[u32], u32) -> u32,
        decoder: impl Fn(usize, &[u32], &[u32]) -> Vec<u32>,
    ) -> Result<Self> {
        if keys.len() != instance.vertices.len() {
            return Err(Error::InvalidCode(format!(
                "{} keys for {} vertices",
                keys.len(),
                instance.vertices.len()
            )));
        }
        let encoders = (0..instance.edges.len())
            .map(|e| {
                let t = instance.edges[e].tail;
                let ni = instance.in_edges(t).len();
                let mut domain = instance.encoder_inputs(e, uses)?;
                let split = domain.len();
                domain.push(keys[t].support_size());
                let out = instance.edge_alphabet(e, uses)?;
                Table::from_fn(domain, vec![out], |x| {
                    vec![encoder(e, &x[..ni], &x[ni..split], x[split])]
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let decoders = (0..instance.vertices.len())
            .map(|v| {
                let outputs = instance.decoder_outputs(v);
                if outputs.is_empty() {
                    return Ok(None);
                }
                let ni = instance.in_edges(v).len();
                Table::from_fn(instance.decoder_inputs(v, uses)?, outputs, |x| {
                    decoder(v, &x[..ni], &x[ni..])
                })
                .map(Some)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(instance, uses, keys, encoders, decoders)
    }

    /// Checks that every table has the shape the instance requires.
    pub fn check(&self, instance: &NetworkInstance) -> Result<()> {
        if self.uses == 0 {
            return Err(Error::InvalidCode("zero channel uses".into()));
        }
        if self.keys.len() != instance.vertices.len() {
            return Err(Error::InvalidCode(format!(
                "{} keys for {} vertices",
                self.keys.len(),
                instance.vertices.len()
            )));
        }
        if self.encoders.len() != instance.edges.len() {
            return Err(Error::InvalidCode(format!(
                "{} encoders for {} edges",
                self.encoders.len(),
                instance.edges.len()
            )));
        }
        for (e, enc) in self.encoders.iter().enumerate() {
            let mut domain = instance.encoder_inputs(e, self.uses)?;
            domain.push(self.keys[instance.edges[e].tail].support_size());
            let out = instance.edge_alphabet(e, self.uses)?;
            if enc.domain() != domain.as_slice() || enc.codomain() != [out] {
                return Err(Error::InvalidCode(format!(
                    "encoder of edge `{}` must map {domain:?} to [{out}]",
                    instance.edge_id(e)
                )));
            }
        }
        if self.decoders.len() != instance.vertices.len() {
            return Err(Error::InvalidCode(format!(
                "{} decoder slots for {} vertices",
                self.decoders.len(),
                instance.vertices.len()
            )));
        }
        for (v, dec) in self.decoders.iter().enumerate() {
            let outputs = instance.decoder_outputs(v);
            match dec {
                None if outputs.is_empty() => {}
                Some(d) if !outputs.is_empty() => {
                    let domain = instance.decoder_inputs(v, self.uses)?;
                    if d.domain() != domain.as_slice() || d.codomain() != outputs.as_slice() {
                        return Err(Error::InvalidCode(format!(
                            "decoder at `{}` must map {domain:?} to {outputs:?}",
                            instance.vertices[v]
                        )));
                    }
                }
                Some(_) => {
                    return Err(Error::InvalidCode(format!(
                        "vertex `{}` demands nothing but has a decoder",
                        instance.vertices[v]
                    )))
                }
                None => {
                    return Err(Error::InvalidCode(format!(
                        "destination `{}` has no decoder",
                        instance.vertices[v]
                    )))
                }
            }
        }
        Ok(())
    }

    pub fn uses(&self) -> u32 {
        self.uses
    }

    pub fn keys(&self) -> &[Pmf] {
        &self.keys
    }

    pub fn encoders(&self) -> &[Table] {
        &self.encoders
    }

    pub fn decoders(&self) -> &[Option<Table>] {
        &self.decoders
    }

    pub fn is_deterministic(&self) -> bool {
        self.keys.iter().all(|k| k.support_size() == 1)
    }

    fn edge_value(&self, instance: &NetworkInstance, e: usize, msgs: &[u32], keys: &[u32], vals: &[u32]) -> u32 {
        let t = instance.edges[e].tail;
        let mut input: Vec<u32> = instance.in_edges(t).iter().map(|&d| vals[d]).collect();
        input.extend(instance.origin_messages(t).iter().map(|&s| msgs[s]));
        input.push(keys[t]);
        self.encoders[e].apply1(&input)
    }

    /// All edge values for one realization, computed vertex by vertex in `order`.
    pub fn edge_values_in_order(
        &self,
        instance: &NetworkInstance,
        order: &[usize],
        msgs: &[u32],
        keys: &[u32],
    ) -> Vec<u32> {
        let mut vals = vec![0u32; instance.edges.len()];
        for &v in order {
            for e in instance.out_edges(v) {
                vals[e] = self.edge_value(instance, e, msgs, keys, &vals);
            }
        }
        vals
    }

    /// Decoder output at `v` given all edge values.
    pub fn decode_at(&self, instance: &NetworkInstance, v: usize, msgs: &[u32], vals: &[u32]) -> Option<Vec<u32>> {
        let d = self.decoders[v].as_ref()?;
        let mut input: Vec<u32> = instance.in_edges(v).iter().map(|&e| vals[e]).collect();
        input.extend(instance.origin_messages(v).iter().map(|&s| msgs[s]));
        Some(d.apply(&input))
    }

    /// Whether every destination decodes its demanded messages.
    pub fn all_correct(&self, instance: &NetworkInstance, msgs: &[u32], vals: &[u32]) -> bool {
        (0..instance.vertices.len()).all(|v| match self.decode_at(instance, v, msgs, vals) {
            None => true,
            Some(out) => instance
                .demanded_at(v)
                .iter()
                .zip(out)
                .all(|(&s, g)| msgs[s] == g),
        })
    }
}

/// Edge values for one realization of messages and keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalRow {
    pub messages: Vec<u32>,
    pub keys: Vec<u32>,
    pub edges: Vec<u32>,
}

/// `g_e(x_S, z_V)` for every edge over the full message-and-key domain.
pub fn global_encodings(n: &NetworkInstance, code: &NetworkCode) -> Result<Vec<GlobalRow>> {
    global_encodings_in_order(n, code, &topological_order(n)?)
}

/// As [`global_encodings`], following a caller-supplied topological order.
pub fn global_encodings_in_order(
    n: &NetworkInstance,
    code: &NetworkCode,
    order: &[usize],
) -> Result<Vec<GlobalRow>> {
    code.check(n)?;
    check_order(n, order)?;
    let ns = n.messages.len();
    let mut sizes: Vec<usize> = n.messages.iter().map(|m| m.alphabet).collect();
    sizes.extend(code.keys.iter().map(Pmf::support_size));
    table::product(&sizes)
        .filter(|&c| c <= table::MAX_TABLE_LEN)
        .ok_or_else(|| Error::Overflow(format!("realization space {sizes:?} is too large")))?;
    let mut rows = Vec::new();
    table::for_each_tuple(&sizes, |x| {
        rows.push(GlobalRow {
            messages: x[..ns].to_vec(),
            keys: x[ns..].to_vec(),
            edges: code.edge_values_in_order(n, order, &x[..ns], &x[ns..]),
        });
    });
    Ok(rows)
}

fn check_order(n: &NetworkInstance, order: &[usize]) -> Result<()> {
    let mut pos = vec![usize::MAX; n.vertices.len()];
    for (i, &v) in order.iter().enumerate() {
        if v >= pos.len() || pos[v] != usize::MAX {
            return Err(Error::InvalidInstance("order is not a vertex permutation".into()));
        }
        pos[v] = i;
    }
    if pos.contains(&usize::MAX) {
        return Err(Error::InvalidInstance("order misses a vertex".into()));
    }
    match n.edges.iter().position(|e| pos[e.tail] > pos[e.head]) {
        Some(e) => Err(Error::InvalidInstance(format!(
            "order is not topological at edge `{}`",
            n.edge_id(e)
        ))),
        None => Ok(()),
    }
}

/// The joint of messages, keys, edge values and the decode-success indicator.
pub fn network_joint(n: &NetworkInstance, code: &NetworkCode, pmfs: &[Pmf]) -> Result<JointPmf> {
    code.check(n)?;
    n.check_pmfs(pmfs)?;
    let order = topological_order(n)?;
    let ns = n.messages.len();
    let mut factors: Vec<&Pmf> = pmfs.iter().collect();
    factors.extend(code.keys.iter());
    let mut outcomes = Vec::new();
    for_each_product_outcome(&factors, |x, mass| {
        let vals = code.edge_values_in_order(n, &order, &x[..ns], &x[ns..]);
        let ok = code.all_correct(n, &x[..ns], &vals);
        let mut row = x.to_vec();
        row.extend(&vals);
        row.push(ok as u32);
        outcomes.push((row, mass));
    })?;
    let mut vars: Vec<String> = n.messages.iter().map(|m| m.id.clone()).collect();
    vars.extend(n.vertices.iter().map(|v| key_var(v)));
    vars.extend((0..n.edges.len()).map(|e| edge_var(&n.edge_id(e))));
    vars.push(SUCCESS_VAR.to_string());
    let mut sizes: Vec<usize> = n.messages.iter().map(|m| m.alphabet).collect();
    sizes.extend(code.keys.iter().map(Pmf::support_size));
    for e in 0..n.edges.len() {
        sizes.push(n.edge_alphabet(e, code.uses)?);
    }
    sizes.push(2);
    JointPmf::from_masses(vars, sizes, outcomes)
}

/// `P_e`, the exact probability that some destination decodes incorrectly.
pub fn eval_network_error(n: &NetworkInstance, code: &NetworkCode, pmfs: &[Pmf]) -> Result<Rational> {
    network_joint(n, code, pmfs)?.probability(&[(SUCCESS_VAR, 0)])
}

/// Leakage of a network joint to each eavesdropper, `I(X_A; X_B)`.
pub fn network_leakage_from_joint(n: &NetworkInstance, joint: &JointPmf) -> Result<Vec<f64>> {
    n.eavesdroppers
        .iter()
        .map(|r| {
            let a: Vec<&str> = r.targets.iter().map(|&s| n.messages[s].id.as_str()).collect();
            let b: Vec<String> = r.taps.iter().map(|&e| edge_var(&n.edge_id(e))).collect();
            let b: Vec<&str> = b.iter().map(String::as_str).collect();
            mutual_information(joint, &a, &b)
        })
        .collect()
}

/// Per-eavesdropper leakage `I(X_A; X_B)` over the tapped edge values.
pub fn eval_network_leakage(n: &NetworkInstance, code: &NetworkCode, pmfs: &[Pmf]) -> Result<Vec<f64>> {
    network_leakage_from_joint(n, &network_joint(n, code, pmfs)?)
}

/// Feasibility with error compared exactly and leakage within tolerance.
pub fn check_network_feasible(
    n: &NetworkInstance,
    code: &NetworkCode,
    pmfs: &[Pmf],
    eps: &Rational,
    eta: f64,
) -> Result<FeasibilityReport> {
    let joint = network_joint(n, code, pmfs)?;
    let error = joint.probability(&[(SUCCESS_VAR, 0)])?;
    let leakage = network_leakage_from_joint(n, &joint)?;
    Ok(FeasibilityReport::new(error, leakage, eps, eta))
}

/// A network instance in which every vertex key became a message that
/// originates at its vertex and is demanded nowhere.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AugmentedInstance {
    instance: NetworkInstance,
    key_messages: Vec<usize>,
    key_pmfs: Vec<Pmf>,
}

impl AugmentedInstance {
    /// `key_messages[v]` is the message index of vertex `v`'s key and
    /// `key_pmfs[v]` its distribution.
    pub fn new(instance: NetworkInstance, key_messages: Vec<usize>, key_pmfs: Vec<Pmf>) -> Result<Self> {
        let nv = instance.vertices.len();
        if key_messages.len() != nv || key_pmfs.len() != nv {
            return Err(Error::InvalidInstance("one key message per vertex".into()));
        }
        for (v, (&s, p)) in key_messages.iter().zip(&key_pmfs).enumerate() {
            let vid = &instance.vertices[v];
            let m = instance
                .messages
                .get(s)
                .ok_or_else(|| Error::InvalidInstance(format!("key of `{vid}` is not a message")))?;
            if key_messages[..v].contains(&s) {
                return Err(Error::InvalidInstance(format!("key message `{}` reused", m.id)));
            }
            if m.origin != v || !m.destinations.is_empty() {
                return Err(Error::InvalidInstance(format!(
                    "key message `{}` must originate at `{vid}` and have no destinations",
                    m.id
                )));
            }
            if p.support_size() != m.alphabet {
                return Err(Error::InvalidInstance(format!(
                    "key message `{}` has alphabet {} but pmf support {}",
                    m.id,
                    m.alphabet,
                    p.support_size()
                )));
            }
            if instance.out_edges(v).is_empty() && m.alphabet != 1 {
                return Err(Error::InvalidInstance(format!(
                    "key message `{}` of sink `{vid}` must have alphabet 1",
                    m.id
                )));
            }
        }
        Ok(Self {
            instance,
            key_messages,
            key_pmfs,
        })
    }

    pub fn instance(&self) -> &NetworkInstance {
        &self.instance
    }

    pub fn key_messages(&self) -> &[usize] {
        &self.key_messages
    }

    pub fn key_pmfs(&self) -> &[Pmf] {
        &self.key_pmfs
    }

    pub fn is_key_message(&self, s: usize) -> bool {
        self.key_messages.contains(&s)
    }

    /// Message pmfs of the augmented instance: the given pmfs for original
    /// messages and the stored key pmfs for key messages.
    pub fn pmfs(&self, base: &[Pmf]) -> Result<Vec<Pmf>> {
        let mut base = base.iter();
        let mut out = Vec::with_capacity(self.instance.messages.len());
        for s in 0..self.instance.messages.len() {
            match self.key_messages.iter().position(|&k| k == s) {
                Some(v) => out.push(self.key_pmfs[v].clone()),
                None => out.push(
                    base.next()
                        .ok_or_else(|| Error::InvalidPmf("too few message pmfs".into()))?
                        .clone(),
                ),
            }
        }
        if base.next().is_some() {
            return Err(Error::InvalidPmf("too many message pmfs".into()));
        }
        self.instance.check_pmfs(&out)?;
        Ok(out)
    }
}

fn fresh_key_id(n: &NetworkInstance, vertex: &str, taken: &[String]) -> String {
    let mut id = format!("key:{vertex}");
    while n.message_index(&id).is_some() || taken.contains(&id) {
        id.push('\'');
    }
    id
}

/// Turns every vertex key into a message originating at that vertex. Keys of
/// vertices without outgoing edges become the single-symbol alphabet.
pub fn augment(n: &NetworkInstance, code: &NetworkCode) -> Result<(AugmentedInstance, NetworkCode)> {
    code.check(n)?;
    let nv = n.vertices.len();
    let mut messages = n.messages.clone();
    let mut key_messages = Vec::with_capacity(nv);
    let mut key_pmfs = Vec::with_capacity(nv);
    let mut taken = Vec::new();
    for v in 0..nv {
        let pmf = if n.out_edges(v).is_empty() {
            Pmf::uniform(1)?
        } else {
            code.keys[v].clone()
        };
        let id = fresh_key_id(n, &n.vertices[v], &taken);
        taken.push(id.clone());
        key_messages.push(messages.len());
        messages.push(NetworkMessage {
            id,
            alphabet: pmf.support_size(),
            origin: v,
            destinations: Vec::new(),
        });
        key_pmfs.push(pmf);
    }
    let instance = NetworkInstance::new(
        n.vertices.clone(),
        n.edges.clone(),
        messages,
        n.eavesdroppers.clone(),
    )?;
    // Each encoder's former key slot is now the last origin message, followed
    // by a single-symbol key slot, so the entry list is unchanged.
    let encoders = code
        .encoders
        .iter()
        .map(|t| {
            let mut domain = t.domain().to_vec();
            domain.push(1);
            Table::new(domain, t.codomain().to_vec(), t.entries().to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    let decoders = code
        .decoders
        .iter()
        .enumerate()
        .map(|(v, d)| match d {
            None => Ok(None),
            Some(t) => {
                let mut domain = t.domain().to_vec();
                domain.push(key_pmfs[v].support_size());
                let k = t.domain().len();
                Table::from_fn(domain, t.codomain().to_vec(), |x| t.apply(&x[..k])).map(Some)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let det = NetworkCode::new(&instance, code.uses, vec![Pmf::uniform(1)?; nv], encoders, decoders)?;
    Ok((AugmentedInstance::new(instance, key_messages, key_pmfs)?, det))
}

/// The augmentation of `n` under a deterministic code: every key message has
/// the single-symbol alphabet.
pub fn augment_deterministic(n: &NetworkInstance) -> Result<AugmentedInstance> {
    let code = NetworkCode::from_fns(
        n,
        1,
        vec![Pmf::uniform(1)?; n.vertices.len()],
        |_, _, _, _| 0,
        |v, _, _| vec![0; n.demanded_at(v).len()],
    )?;
    Ok(augment(n, &code)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probinfo::EQ_TOL;
    use proptest::prelude::*;

    fn r(n: u128, d: u128) -> Rational {
        Rational::new(n, d)
    }

    fn edge(tail: usize, head: usize, label: u32) -> Edge {
        Edge {
            tail,
            head,
            label,
            capacity: Capacity::from_integer(1),
        }
    }

    fn names(k: usize) -> Vec<String> {
        (1..=k).map(|i| i.to_string()).collect()
    }

    fn msg(id: &str, origin: usize, dest: &[usize]) -> NetworkMessage {
        NetworkMessage {
            id: id.into(),
            alphabet: 2,
            origin,
            destinations: dest.to_vec(),
        }
    }

    fn tap(id: &str, targets: &[usize], taps: &[usize]) -> NetworkEavesdropper {
        NetworkEavesdropper {
            id: id.into(),
            targets: targets.to_vec(),
            taps: taps.to_vec(),
        }
    }

    /// Two vertices joined by two unit edges; message 1 goes from 1 to 2.
    fn two_edges() -> NetworkInstance {
        NetworkInstance::new(
            names(2),
            vec![edge(0, 1, 0), edge(0, 1, 1)],
            vec![msg("1", 0, &[1])],
            vec![tap("r1", &[0], &[0]), tap("r2", &[0], &[1])],
        )
        .unwrap()
    }

    fn one_time_pad(n: &NetworkInstance) -> NetworkCode {
        NetworkCode::from_fns(
            n,
            1,
            vec![Pmf::uniform(2).unwrap(), Pmf::uniform(1).unwrap()],
            |e, _, x, z| if e == 0 { x[0] ^ z } else { z },
            |_, ins, _| vec![ins[0] ^ ins[1]],
        )
        .unwrap()
    }

    #[test]
    fn rejects_cycles_and_duplicates() {
        let err = NetworkInstance::new(names(2), vec![edge(0, 1, 0), edge(1, 0, 0)], vec![], vec![]);
        assert!(matches!(err, Err(Error::Cycle(_))));
        let err = NetworkInstance::new(names(2), vec![edge(0, 1, 0), edge(0, 1, 0)], vec![], vec![]);
        assert!(err.unwrap_err().to_string().contains("defined twice"));
        let err = NetworkInstance::new(names(1), vec![], vec![msg("1", 0, &[0])], vec![]);
        assert!(err.unwrap_err().to_string().contains("own origin"));
    }

    #[test]
    fn topological_order_examples() {
        let single = NetworkInstance::new(names(1), vec![], vec![], vec![]).unwrap();
        assert_eq!(topological_order(&single).unwrap(), vec![0]);
        assert_eq!(topological_order(&two_edges()).unwrap(), vec![0, 1]);
        let diamond = NetworkInstance::new(
            names(4),
            vec![edge(0, 1, 0), edge(0, 2, 0), edge(1, 3, 0), edge(2, 3, 0)],
            vec![],
            vec![],
        )
        .unwrap();
        assert_eq!(topological_order(&diamond).unwrap(), vec![0, 1, 2, 3]);
        // Tie-break prefers the smaller index even when declared later.
        let rev = NetworkInstance::new(names(3), vec![edge(2, 1, 0)], vec![], vec![]).unwrap();
        assert_eq!(topological_order(&rev).unwrap(), vec![0, 2, 1]);
    }

    #[test]
    fn normalization_examples() {
        let n = two_edges();
        assert_eq!(normalize_instance(&n).unwrap(), n);

        let isolated = NetworkInstance::new(
            names(3),
            vec![edge(0, 1, 0)],
            vec![msg("1", 0, &[1])],
            vec![],
        )
        .unwrap();
        let norm = normalize_instance(&isolated).unwrap();
        assert_eq!(norm.vertices(), &["1".to_string(), "2".to_string()]);

        let chain = NetworkInstance::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![edge(0, 1, 0), edge(1, 2, 0)],
            vec![msg("m", 1, &[2])],
            vec![tap("r", &[0], &[0, 1])],
        )
        .unwrap();
        let norm = normalize_instance(&chain).unwrap();
        assert_eq!(norm.vertices(), &["b".to_string(), "c".to_string()]);
        assert_eq!(norm.edges().len(), 1);
        assert_eq!(norm.edge_id(0), "b->c#0");
        assert_eq!(norm.eavesdroppers()[0].taps, vec![0]);
        assert_eq!(norm.messages()[0].origin, 0);
    }

    #[test]
    fn global_encodings_of_the_pad() {
        let n = two_edges();
        let rows = global_encodings(&n, &one_time_pad(&n)).unwrap();
        assert_eq!(rows.len(), 4);
        for row in rows {
            let (x, z) = (row.messages[0], row.keys[0]);
            assert_eq!(row.edges, vec![x ^ z, z]);
        }
    }

    #[test]
    fn relay_copies_compose() {
        let n = NetworkInstance::new(
            names(3),
            vec![edge(0, 1, 0), edge(1, 2, 0)],
            vec![msg("1", 0, &[2])],
            vec![],
        )
        .unwrap();
        let det = vec![Pmf::uniform(1).unwrap(); 3];
        let code = NetworkCode::from_fns(
            &n,
            1,
            det,
            |e, ins, x, _| if e == 0 { x[0] } else { ins[0] },
            |_, ins, _| vec![ins[0]],
        )
        .unwrap();
        for row in global_encodings(&n, &code).unwrap() {
            assert_eq!(row.edges[0], row.messages[0]);
            assert_eq!(row.edges[1], row.edges[0]);
        }
        assert_eq!(eval_network_error(&n, &code, &n.uniform_pmfs()).unwrap(), r(0, 1));
    }

    #[test]
    fn error_and_leakage_of_the_pad() {
        let n = two_edges();
        let code = one_time_pad(&n);
        let pmfs = n.uniform_pmfs();
        assert_eq!(eval_network_error(&n, &code, &pmfs).unwrap(), r(0, 1));
        let l = eval_network_leakage(&n, &code, &pmfs).unwrap();
        assert!(l.iter().all(|x| x.abs() < EQ_TOL));
        assert!(check_network_feasible(&n, &code, &pmfs, &r(0, 1), 0.0).unwrap().feasible());
    }

    #[test]
    fn plain_code_leaks_one_bit() {
        let n = two_edges();
        let det = vec![Pmf::uniform(1).unwrap(); 2];
        let code = NetworkCode::from_fns(&n, 1, det, |_, _, x, _| x[0], |_, ins, _| vec![ins[0]]).unwrap();
        let pmfs = n.uniform_pmfs();
        let l = eval_network_leakage(&n, &code, &pmfs).unwrap();
        assert!((l[0] - 1.0).abs() < EQ_TOL);
        let rep = check_network_feasible(&n, &code, &pmfs, &r(0, 1), 0.0).unwrap();
        assert!(!rep.feasible());
        let rep = check_network_feasible(&n, &code, &pmfs, &r(0, 1), l[0]).unwrap();
        assert!(rep.feasible());
    }

    #[test]
    fn constant_decoder_errs_half_the_time() {
        let n = two_edges();
        let det = vec![Pmf::uniform(1).unwrap(); 2];
        let code = NetworkCode::from_fns(&n, 1, det, |_, _, x, _| x[0], |_, _, _| vec![0]).unwrap();
        assert_eq!(eval_network_error(&n, &code, &n.uniform_pmfs()).unwrap(), r(1, 2));
    }

    #[test]
    fn blind_eavesdropper_learns_nothing() {
        let n = NetworkInstance::new(
            names(2),
            vec![edge(0, 1, 0)],
            vec![msg("1", 0, &[1])],
            vec![tap("r", &[0], &[])],
        )
        .unwrap();
        let det = vec![Pmf::uniform(1).unwrap(); 2];
        let code = NetworkCode::from_fns(&n, 1, det, |_, _, x, _| x[0], |_, ins, _| vec![ins[0]]).unwrap();
        assert_eq!(eval_network_leakage(&n, &code, &n.uniform_pmfs()).unwrap(), vec![0.0]);
    }

    #[test]
    fn zero_capacity_edge_carries_alpha() {
        let mut n = two_edges();
        n.edges[1].capacity = Capacity::new(1, 2);
        assert_eq!(n.edge_alphabet(1, 1).unwrap(), 1);
        assert_eq!(n.edge_alphabet(1, 2).unwrap(), 2);
        assert_eq!(floor_bits(&Capacity::new(7, 10), 2), 1);
        assert_eq!(floor_bits(&Capacity::new(3, 2), 2), 3);
    }

    #[test]
    fn augmenting_the_pad() {
        let n = two_edges();
        let code = one_time_pad(&n);
        let (aug, det) = augment(&n, &code).unwrap();
        let ids: Vec<&str> = aug.instance().messages().iter().map(|m| m.id.as_str()).collect();
        assert_eq!(ids, ["1", "key:1", "key:2"]);
        assert_eq!(aug.instance().messages()[2].alphabet, 1);
        assert_eq!(aug.key_pmfs()[0], Pmf::uniform(2).unwrap());
        assert!(det.is_deterministic());
        // The first edge now reads (X'_1, X'_2) and a single-symbol key.
        assert_eq!(det.encoders()[0].domain(), &[2, 2, 1]);
        let pmfs = aug.pmfs(&n.uniform_pmfs()).unwrap();
        assert_eq!(eval_network_error(aug.instance(), &det, &pmfs).unwrap(), r(0, 1));
        let l = eval_network_leakage(aug.instance(), &det, &pmfs).unwrap();
        assert!(l.iter().all(|x| x.abs() < EQ_TOL));
    }

    #[test]
    fn augmenting_twice_only_adds_trivial_keys() {
        let n = two_edges();
        let (aug, det) = augment(&n, &one_time_pad(&n)).unwrap();
        let (again, det2) = augment(aug.instance(), &det).unwrap();
        let added = &again.instance().messages()[3..];
        assert!(added.iter().all(|m| m.alphabet == 1 && m.id.ends_with('\'')));
        let p1 = aug.pmfs(&n.uniform_pmfs()).unwrap();
        let p2 = again.pmfs(&p1).unwrap();
        assert_eq!(
            eval_network_error(aug.instance(), &det, &p1).unwrap(),
            eval_network_error(again.instance(), &det2, &p2).unwrap()
        );
    }

    /// Random DAG on up to four vertices with unit edges, binary messages,
    /// and an arbitrary randomized code, described by raw draws.
    #[derive(Debug, Clone)]
    struct Draw {
        nv: usize,
        edges: Vec<(usize, usize)>,
        origin: usize,
        keys: Vec<bool>,
        seed: Vec<u64>,
    }

    fn arb_draw() -> impl Strategy<Value = Draw> {
        (2usize..=4)
            .prop_flat_map(|nv| {
                (
                    Just(nv),
                    prop::collection::vec((0..nv, 0..nv), 1..=4),
                    0..nv,
                    prop::collection::vec(any::<bool>(), nv),
                    prop::collection::vec(any::<u64>(), 64),
                )
            })
            .prop_map(|(nv, edges, origin, keys, seed)| Draw {
                nv,
                edges: edges
                    .into_iter()
                    .filter(|(a, b)| a != b)
                    .map(|(a, b)| (a.min(b), a.max(b)))
                    .collect(),
                origin,
                keys,
                seed,
            })
    }

    fn build(d: &Draw, shared: bool) -> Option<(NetworkInstance, NetworkCode)> {
        let mut edges = Vec::new();
        for &(a, b) in &d.edges {
            let label = edges.iter().filter(|e: &&Edge| (e.tail, e.head) == (a, b)).count() as u32;
            edges.push(edge(a, b, label));
        }
        let dest: Vec<usize> = (0..d.nv).filter(|&v| v != d.origin).collect();
        let n = NetworkInstance::new(
            names(d.nv),
            edges,
            vec![msg("1", d.origin, &dest[..1]), msg("2", d.origin, &dest)],
            vec![tap("r", &[0], &[0]), tap("s", &[1], &(0..d.edges.len()).collect::<Vec<_>>())],
        )
        .ok()?;
        let keys = d
            .keys
            .iter()
            .map(|&k| Pmf::uniform(if k { 2 } else { 1 }).unwrap())
            .collect();
        let s = &d.seed;
        let h = |a: usize, xs: &[u32], z: u32| -> u64 {
            let mut acc = s[a % s.len()];
            for &x in xs {
                acc = acc.rotate_left(7) ^ s[(x as usize + a) % s.len()];
            }
            acc ^ (z as u64).wrapping_mul(0x9e37_79b9)
        };
        let code = NetworkCode::from_fns(
            &n,
            1,
            keys,
            |e, ins, x, z| {
                let mut all = ins.to_vec();
                all.extend(x);
                let slot = if shared {
                    let edge = &n.edges()[e];
                    edge.tail * 8 + edge.head
                } else {
                    e
                };
                (h(slot, &all, z) & 1) as u32
            },
            |v, ins, x| {
                let mut all = ins.to_vec();
                all.extend(x);
                let k = n.demanded_at(v).len();
                (0..k).map(|i| ((h(v + 7 * i, &all, 0) >> 3) & 1) as u32).collect()
            },
        )
        .ok()?;
        Some((n, code))
    }

    proptest! {
        #[test]
        fn global_encodings_ignore_traversal_order(d in arb_draw()) {
            if let Some((n, code)) = build(&d, false) {
                let order = topological_order(&n).unwrap();
                // Kahn's algorithm preferring the largest ready vertex.
                let mut alt = Vec::new();
                let mut indeg: Vec<usize> = (0..n.vertices().len()).map(|v| n.in_edges(v).len()).collect();
                let mut ready: Vec<usize> = (0..indeg.len()).filter(|&v| indeg[v] == 0).collect();
                while let Some(v) = ready.pop() {
                    alt.push(v);
                    for e in n.out_edges(v) {
                        let h = n.edges()[e].head;
                        indeg[h] -= 1;
                        if indeg[h] == 0 {
                            ready.push(h);
                            ready.sort_unstable();
                        }
                    }
                }
                prop_assert_eq!(
                    global_encodings_in_order(&n, &code, &order).unwrap(),
                    global_encodings_in_order(&n, &code, &alt).unwrap()
                );
            }
        }

        #[test]
        fn augmentation_preserves_error_and_leakage(d in arb_draw()) {
            if let Some((n, code)) = build(&d, false) {
                let pmfs = n.uniform_pmfs();
                let (aug, det) = augment(&n, &code).unwrap();
                let apmfs = aug.pmfs(&pmfs).unwrap();
                prop_assert_eq!(
                    eval_network_error(&n, &code, &pmfs).unwrap(),
                    eval_network_error(aug.instance(), &det, &apmfs).unwrap()
                );
                let a = eval_network_leakage(&n, &code, &pmfs).unwrap();
                let b = eval_network_leakage(aug.instance(), &det, &apmfs).unwrap();
                for (x, y) in a.iter().zip(&b) {
                    prop_assert!((x - y).abs() < EQ_TOL);
                }
            }
        }

        #[test]
        fn identical_parallel_encoders_agree(d in arb_draw()) {
            if let Some((n, code)) = build(&d, true) {
                let rows = global_encodings(&n, &code).unwrap();
                for a in 0..n.edges().len() {
                    for b in 0..a {
                        let (ea, eb) = (&n.edges()[a], &n.edges()[b]);
                        if (ea.tail, ea.head) == (eb.tail, eb.head) {
                            prop_assert_eq!(&code.encoders()[a], &code.encoders()[b]);
                            prop_assert!(rows.iter().all(|r| r.edges[a] == r.edges[b]));
                        }
                    }
                }
            }
        }
    }
}

//! The `.sce` text format: TOML documents describing an index or network
//! instance, optional message pmfs, and an optional code.
//!
//! Probabilities and capacities are written as `"p/q"` strings. Edges are
//! named `tail->head#label`. Code tables list output codes (mixed radix, first
//! component most significant) for every input tuple in the same order.

use serde::{Deserialize, Serialize};

use crate::code_translation::{Check, TranslationReport};
use crate::error::{Error, Result};
use crate::index_model::{IndexCode, IndexEavesdropper, IndexInstance, Message, Receiver};
use crate::instance_mapping::IndexImage;
use crate::network_model::{
    AugmentedInstance, Capacity, Edge, NetworkCode, NetworkEavesdropper, NetworkInstance, NetworkMessage,
};
use crate::probinfo::{Pmf, Rational};
use crate::table::Table;

/// Channel-use metadata of an index instance produced from a network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageMeta {
    pub uses: u32,
    pub broadcast_bits: u32,
    /// Network messages occupy the first positions; edge messages follow.
    pub source_messages: usize,
}

impl ImageMeta {
    pub fn of(image: &IndexImage) -> Self {
        Self {
            uses: image.uses(),
            broadcast_bits: image.broadcast_bits(),
            source_messages: image.source_count(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexDocument {
    pub instance: IndexInstance,
    pub pmfs: Vec<Pmf>,
    pub code: Option<IndexCode>,
    pub image: Option<ImageMeta>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetworkDocument {
    pub instance: NetworkInstance,
    /// One pmf per message, key messages included.
    pub pmfs: Vec<Pmf>,
    pub code: Option<NetworkCode>,
    /// Present when some message is marked as a vertex key.
    pub augmented: Option<AugmentedInstance>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Document {
    Index(IndexDocument),
    Network(NetworkDocument),
}

// Serialized forms.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IndexFile {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    image: Option<ImageMeta>,
    messages: Vec<IndexMessageRepr>,
    #[serde(default)]
    receivers: Vec<ReceiverRepr>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    eavesdroppers: Vec<IndexEveRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    code: Option<IndexCodeRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IndexMessageRepr {
    id: String,
    alphabet: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pmf: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReceiverRepr {
    id: String,
    wants: Vec<String>,
    #[serde(default)]
    has: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IndexEveRepr {
    id: String,
    targets: Vec<String>,
    #[serde(default)]
    side_info: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IndexCodeRepr {
    broadcast_bits: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    key: Option<Vec<String>>,
    encoder: Vec<u64>,
    decoders: Vec<IndexDecoderRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IndexDecoderRepr {
    receiver: String,
    entries: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    kind: String,
    vertices: Vec<VertexRepr>,
    #[serde(default)]
    edges: Vec<EdgeRepr>,
    #[serde(default)]
    messages: Vec<NetworkMessageRepr>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    eavesdroppers: Vec<NetworkEveRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    code: Option<NetworkCodeRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexRepr {
    id: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRepr {
    id: String,
    capacity: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkMessageRepr {
    id: String,
    alphabet: usize,
    origin: String,
    #[serde(default)]
    destinations: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pmf: Option<Vec<String>>,
    /// Marks the message as the key of this vertex.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    key_of: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkEveRepr {
    id: String,
    targets: Vec<String>,
    #[serde(default)]
    taps: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkCodeRepr {
    uses: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    keys: Vec<KeyRepr>,
    encoders: Vec<EncoderRepr>,
    #[serde(default)]
    decoders: Vec<NetworkDecoderRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KeyRepr {
    vertex: String,
    pmf: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EncoderRepr {
    edge: String,
    entries: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDecoderRepr {
    vertex: String,
    entries: Vec<u64>,
}

// Helpers.

pub fn parse_rational(s: &str) -> Result<Rational> {
    s.trim()
        .parse::<Rational>()
        .map_err(|_| Error::Parse(format!("`{s}` is not a nonnegative rational p/q")))
}

pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

fn parse_pmf(weights: &[String]) -> Result<Pmf> {
    Pmf::new(weights.iter().map(|w| parse_rational(w)).collect::<Result<_>>()?)
}

fn pmf_repr(p: &Pmf) -> Vec<String> {
    p.weights().iter().map(format_rational).collect()
}

/// `None` for uniform pmfs, which is also the default when reading.
fn optional_pmf(p: &Pmf) -> Option<Vec<String>> {
    (!p.is_uniform()).then(|| pmf_repr(p))
}

fn read_pmf(repr: &Option<Vec<String>>, alphabet: usize, what: &str) -> Result<Pmf> {
    match repr {
        None => Pmf::uniform(alphabet),
        Some(w) if w.len() == alphabet => parse_pmf(w),
        Some(w) => Err(Error::InvalidPmf(format!(
            "pmf of `{what}` has {} weights for alphabet {alphabet}",
            w.len()
        ))),
    }
}

fn lookup(ids: &[&str], id: &str, what: &str) -> Result<usize> {
    ids.iter()
        .position(|x| *x == id)
        .ok_or_else(|| Error::UnknownVariable(format!("{what} `{id}`")))
}

fn lookup_all(ids: &[&str], list: &[String], what: &str) -> Result<Vec<usize>> {
    list.iter().map(|id| lookup(ids, id, what)).collect()
}

/// Splits `tail->head#label`; a missing label means 0.
pub fn parse_edge_id(id: &str) -> Result<(&str, &str, u32)> {
    let bad = || Error::Parse(format!("edge id `{id}` is not of the form tail->head#label"));
    let (tail, rest) = id.split_once("->").ok_or_else(bad)?;
    let (head, label) = match rest.split_once('#') {
        Some((h, l)) => (h, l.parse::<u32>().map_err(|_| bad())?),
        None => (rest, 0),
    };
    if tail.is_empty() || head.is_empty() {
        return Err(bad());
    }
    Ok((tail, head, label))
}

fn entries(t: &Table) -> Vec<u64> {
    t.entries().to_vec()
}

fn toml_error(e: toml::de::Error) -> Error {
    Error::Parse(e.to_string().trim_end().to_string())
}

// Reading.

pub fn parse_document(text: &str) -> Result<Document> {
    let table: toml::Table = text.parse().map_err(toml_error)?;
    let kind = table
        .get("kind")
        .and_then(|k| k.as_str())
        .ok_or_else(|| Error::Parse("missing `kind = \"index\"` or `kind = \"network\"`".into()))?;
    match kind {
        "index" => Ok(Document::Index(read_index(toml::from_str(text).map_err(toml_error)?)?)),
        "network" => Ok(Document::Network(read_network(toml::from_str(text).map_err(toml_error)?)?)),
        other => Err(Error::Parse(format!("unknown kind `{other}`"))),
    }
}

fn read_index(f: IndexFile) -> Result<IndexDocument> {
    let ids: Vec<&str> = f.messages.iter().map(|m| m.id.as_str()).collect();
    let messages = f.messages.iter().map(|m| Message::new(m.id.clone(), m.alphabet)).collect();
    let receivers = f
        .receivers
        .iter()
        .map(|r| {
            Ok(Receiver {
                id: r.id.clone(),
                wants: lookup_all(&ids, &r.wants, "message")?,
                has: lookup_all(&ids, &r.has, "message")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let eavesdroppers = f
        .eavesdroppers
        .iter()
        .map(|r| {
            Ok(IndexEavesdropper {
                id: r.id.clone(),
                targets: lookup_all(&ids, &r.targets, "message")?,
                side_info: lookup_all(&ids, &r.side_info, "message")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let instance = IndexInstance::new(messages, receivers, eavesdroppers)?;
    let pmfs = f
        .messages
        .iter()
        .map(|m| read_pmf(&m.pmf, m.alphabet, &m.id))
        .collect::<Result<Vec<_>>>()?;
    let code = f.code.map(|c| read_index_code(&instance, c)).transpose()?;
    if let Some(meta) = &f.image {
        if meta.source_messages > instance.messages().len() {
            return Err(Error::InvalidInstance("image lists more source messages than messages".into()));
        }
    }
    Ok(IndexDocument {
        instance,
        pmfs,
        code,
        image: f.image,
    })
}

fn read_index_code(instance: &IndexInstance, c: IndexCodeRepr) -> Result<IndexCode> {
    let key = match &c.key {
        None => Pmf::uniform(1)?,
        Some(w) => parse_pmf(w)?,
    };
    let words = 1usize
        .checked_shl(c.broadcast_bits)
        .filter(|_| c.broadcast_bits <= crate::index_model::MAX_BROADCAST_BITS)
        .ok_or_else(|| Error::InvalidCode(format!("codeword length {} is too large", c.broadcast_bits)))?;
    let mut domain = instance.alphabets();
    domain.push(key.support_size());
    let encoder = Table::new(domain, vec![words], c.encoder)?;
    if c.decoders.len() != instance.receivers().len() {
        return Err(Error::InvalidCode(format!(
            "{} decoders for {} receivers",
            c.decoders.len(),
            instance.receivers().len()
        )));
    }
    let decoders = instance
        .receivers()
        .iter()
        .zip(c.decoders)
        .map(|(t, d)| {
            if d.receiver != t.id {
                return Err(Error::InvalidCode(format!(
                    "decoder for `{}` found where `{}` was expected",
                    d.receiver, t.id
                )));
            }
            let mut domain = vec![words];
            domain.extend(instance.sizes_of(&t.has));
            Table::new(domain, instance.sizes_of(&t.wants), d.entries)
        })
        .collect::<Result<Vec<_>>>()?;
    IndexCode::new(instance, c.broadcast_bits, key, encoder, decoders)
}

fn read_network(f: NetworkFile) -> Result<NetworkDocument> {
    let vids: Vec<&str> = f.vertices.iter().map(|v| v.id.as_str()).collect();
    let vertices: Vec<String> = vids.iter().map(|s| s.to_string()).collect();
    let edges = f
        .edges
        .iter()
        .map(|e| {
            let (t, h, label) = parse_edge_id(&e.id)?;
            Ok(Edge {
                tail: lookup(&vids, t, "vertex")?,
                head: lookup(&vids, h, "vertex")?,
                label,
                capacity: parse_capacity(&e.capacity)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let eids: Vec<&str> = f.edges.iter().map(|e| e.id.as_str()).collect();
    let mids: Vec<&str> = f.messages.iter().map(|m| m.id.as_str()).collect();
    let messages = f
        .messages
        .iter()
        .map(|m| {
            Ok(NetworkMessage {
                id: m.id.clone(),
                alphabet: m.alphabet,
                origin: lookup(&vids, &m.origin, "vertex")?,
                destinations: lookup_all(&vids, &m.destinations, "vertex")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let eavesdroppers = f
        .eavesdroppers
        .iter()
        .map(|r| {
            Ok(NetworkEavesdropper {
                id: r.id.clone(),
                targets: lookup_all(&mids, &r.targets, "message")?,
                taps: lookup_all(&eids, &r.taps, "edge")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let instance = NetworkInstance::new(vertices, edges, messages, eavesdroppers)?;
    let pmfs = f
        .messages
        .iter()
        .map(|m| read_pmf(&m.pmf, m.alphabet, &m.id))
        .collect::<Result<Vec<_>>>()?;
    let augmented = if f.messages.iter().any(|m| m.key_of.is_some()) {
        let mut key_messages = vec![usize::MAX; vids.len()];
        for (s, m) in f.messages.iter().enumerate() {
            if let Some(v) = &m.key_of {
                let v = lookup(&vids, v, "vertex")?;
                if key_messages[v] != usize::MAX {
                    return Err(Error::InvalidInstance(format!("vertex `{}` has two keys", vids[v])));
                }
                key_messages[v] = s;
            }
        }
        if let Some(v) = key_messages.iter().position(|&s| s == usize::MAX) {
            return Err(Error::InvalidInstance(format!("vertex `{}` has no key message", vids[v])));
        }
        let key_pmfs = key_messages.iter().map(|&s| pmfs[s].clone()).collect();
        Some(AugmentedInstance::new(instance.clone(), key_messages, key_pmfs)?)
    } else {
        None
    };
    let code = f.code.map(|c| read_network_code(&instance, c)).transpose()?;
    Ok(NetworkDocument {
        instance,
        pmfs,
        code,
        augmented,
    })
}

pub fn parse_capacity(s: &str) -> Result<Capacity> {
    s.trim()
        .parse::<Capacity>()
        .map_err(|_| Error::Parse(format!("`{s}` is not a nonnegative rational capacity p/q")))
}

fn read_network_code(n: &NetworkInstance, c: NetworkCodeRepr) -> Result<NetworkCode> {
    let mut keys = vec![Pmf::uniform(1)?; n.vertices().len()];
    let vids: Vec<&str> = n.vertices().iter().map(String::as_str).collect();
    for k in &c.keys {
        keys[lookup(&vids, &k.vertex, "vertex")?] = parse_pmf(&k.pmf)?;
    }
    if c.encoders.len() != n.edges().len() {
        return Err(Error::InvalidCode(format!(
            "{} encoders for {} edges",
            c.encoders.len(),
            n.edges().len()
        )));
    }
    let encoders = c
        .encoders
        .into_iter()
        .enumerate()
        .map(|(e, r)| {
            let id = n.edge_id(e);
            if r.edge != id {
                return Err(Error::InvalidCode(format!("encoder for `{}` found where `{id}` was expected", r.edge)));
            }
            let mut domain = n.encoder_inputs(e, c.uses)?;
            domain.push(keys[n.edges()[e].tail].support_size());
            Table::new(domain, vec![n.edge_alphabet(e, c.uses)?], r.entries)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut decoders: Vec<Option<Table>> = vec![None; n.vertices().len()];
    for d in c.decoders {
        let v = lookup(&vids, &d.vertex, "vertex")?;
        if decoders[v].is_some() {
            return Err(Error::InvalidCode(format!("vertex `{}` has two decoders", d.vertex)));
        }
        decoders[v] = Some(Table::new(n.decoder_inputs(v, c.uses)?, n.decoder_outputs(v), d.entries)?);
    }
    NetworkCode::new(n, c.uses, keys, encoders, decoders)
}

// Writing.

fn to_toml<T: Serialize>(value: &T) -> Result<String> {
    toml::to_string(value).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_document(doc: &Document) -> Result<String> {
    match doc {
        Document::Index(d) => write_index(d),
        Document::Network(d) => write_network(d),
    }
}

pub fn write_index(d: &IndexDocument) -> Result<String> {
    let inst = &d.instance;
    let names = |set: &[usize]| -> Vec<String> { set.iter().map(|&i| inst.messages()[i].id.clone()).collect() };
    let f = IndexFile {
        kind: "index".into(),
        image: d.image,
        messages: inst
            .messages()
            .iter()
            .zip(&d.pmfs)
            .map(|(m, p)| IndexMessageRepr {
                id: m.id.clone(),
                alphabet: m.alphabet,
                pmf: optional_pmf(p),
            })
            .collect(),
        receivers: inst
            .receivers()
            .iter()
            .map(|r| ReceiverRepr {
                id: r.id.clone(),
                wants: names(&r.wants),
                has: names(&r.has),
            })
            .collect(),
        eavesdroppers: inst
            .eavesdroppers()
            .iter()
            .map(|r| IndexEveRepr {
                id: r.id.clone(),
                targets: names(&r.targets),
                side_info: names(&r.side_info),
            })
            .collect(),
        code: d.code.as_ref().map(|c| IndexCodeRepr {
            broadcast_bits: c.broadcast_bits(),
            key: (!c.is_deterministic()).then(|| pmf_repr(c.key())),
            encoder: entries(c.encoder()),
            decoders: inst
                .receivers()
                .iter()
                .zip(c.decoders())
                .map(|(t, d)| IndexDecoderRepr {
                    receiver: t.id.clone(),
                    entries: entries(d),
                })
                .collect(),
        }),
    };
    to_toml(&f)
}

pub fn write_network(d: &NetworkDocument) -> Result<String> {
    let n = &d.instance;
    let vname = |v: usize| n.vertices()[v].clone();
    let key_of = |s: usize| {
        d.augmented
            .as_ref()
            .and_then(|a| a.key_messages().iter().position(|&k| k == s))
            .map(vname)
    };
    let f = NetworkFile {
        kind: "network".into(),
        vertices: n.vertices().iter().map(|v| VertexRepr { id: v.clone() }).collect(),
        edges: (0..n.edges().len())
            .map(|e| EdgeRepr {
                id: n.edge_id(e),
                capacity: n.edges()[e].capacity.to_string(),
            })
            .collect(),
        messages: n
            .messages()
            .iter()
            .enumerate()
            .map(|(s, m)| NetworkMessageRepr {
                id: m.id.clone(),
                alphabet: m.alphabet,
                origin: vname(m.origin),
                destinations: m.destinations.iter().map(|&v| vname(v)).collect(),
                pmf: optional_pmf(&d.pmfs[s]),
                key_of: key_of(s),
            })
            .collect(),
        eavesdroppers: n
            .eavesdroppers()
            .iter()
            .map(|r| NetworkEveRepr {
                id: r.id.clone(),
                targets: r.targets.iter().map(|&s| n.messages()[s].id.clone()).collect(),
                taps: r.taps.iter().map(|&e| n.edge_id(e)).collect(),
            })
            .collect(),
        code: d.code.as_ref().map(|c| NetworkCodeRepr {
            uses: c.uses(),
            keys: c
                .keys()
                .iter()
                .enumerate()
                .filter(|(_, k)| k.support_size() > 1)
                .map(|(v, k)| KeyRepr {
                    vertex: vname(v),
                    pmf: pmf_repr(k),
                })
                .collect(),
            encoders: c
                .encoders()
                .iter()
                .enumerate()
                .map(|(e, t)| EncoderRepr {
                    edge: n.edge_id(e),
                    entries: entries(t),
                })
                .collect(),
            decoders: c
                .decoders()
                .iter()
                .enumerate()
                .filter_map(|(v, t)| {
                    t.as_ref().map(|t| NetworkDecoderRepr {
                        vertex: vname(v),
                        entries: entries(t),
                    })
                })
                .collect(),
        }),
    };
    to_toml(&f)
}

// Reports.

#[derive(Serialize)]
struct ReportFile {
    clause: String,
    satisfied: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    broadcast_bits: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    chosen_sigma: Option<u32>,
    source_error: String,
    target_error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    total_variation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    zeta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    zeta_branch: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_prime: Option<f64>,
    eavesdroppers: Vec<EveReport>,
    checks: Vec<CheckReport>,
}

#[derive(Serialize)]
struct EveReport {
    id: String,
    source_leakage: f64,
    target_leakage: f64,
}

#[derive(Serialize)]
struct CheckReport {
    name: String,
    lhs: f64,
    rhs: f64,
    holds: bool,
}

impl From<&Check> for CheckReport {
    fn from(c: &Check) -> Self {
        Self {
            name: c.name.clone(),
            lhs: c.lhs,
            rhs: c.rhs,
            holds: c.holds,
        }
    }
}

/// Renders a report with a fixed field order.
pub fn write_report(r: &TranslationReport) -> Result<String> {
    let f = ReportFile {
        clause: r.clause.name().into(),
        satisfied: r.satisfied,
        broadcast_bits: r.broadcast_bits,
        chosen_sigma: r.chosen_sigma,
        source_error: format_rational(&r.source_error),
        target_error: format_rational(&r.target_error),
        total_variation: r.total_variation.as_ref().map(format_rational),
        zeta: r.zeta.map(|z| z.value),
        zeta_branch: r.zeta.map(|z| z.branch.to_string()),
        gamma: r.gamma,
        gamma_prime: r.gamma_prime,
        eavesdroppers: r
            .eavesdroppers
            .iter()
            .enumerate()
            .map(|(k, id)| EveReport {
                id: id.clone(),
                source_leakage: r.source_leakage.get(k).copied().unwrap_or(0.0),
                target_leakage: r.target_leakage.get(k).copied().unwrap_or(0.0),
            })
            .collect(),
        checks: r.checks.iter().map(CheckReport::from).collect(),
    };
    to_toml(&f)
}

#[derive(Serialize)]
struct EvaluationFile {
    kind: String,
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    feasible: Option<bool>,
    eavesdroppers: Vec<LeakReport>,
}

#[derive(Serialize)]
struct LeakReport {
    id: String,
    leakage: f64,
}

/// Renders an evaluation. `feasible` is set when targets were given.
pub fn write_evaluation(kind: &str, error: &Rational, ids: &[String], leakage: &[f64], feasible: Option<bool>) -> Result<String> {
    to_toml(&EvaluationFile {
        kind: kind.into(),
        error: format_rational(error),
        feasible,
        eavesdroppers: ids
            .iter()
            .zip(leakage)
            .map(|(id, &leakage)| LeakReport { id: id.clone(), leakage })
            .collect(),
    })
}

/// Serializes any report-like value with the format's conventions.
pub fn write_toml<T: Serialize>(value: &T) -> Result<String> {
    to_toml(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::network_model::augment;

    fn round_trip(doc: Document) {
        let text = write_document(&doc).unwrap();
        assert_eq!(parse_document(&text).unwrap(), doc, "{text}");
    }

    #[test]
    fn index_documents_round_trip() {
        let instance = fixtures::fig1_index();
        let code = fixtures::fig1_example_code(&instance);
        let mut pmfs = instance.uniform_pmfs();
        pmfs[2] = Pmf::new(vec![Rational::new(1, 3), Rational::new(2, 3)]).unwrap();
        round_trip(Document::Index(IndexDocument {
            instance: instance.clone(),
            pmfs: pmfs.clone(),
            code: Some(code),
            image: None,
        }));
        round_trip(Document::Index(IndexDocument {
            instance,
            pmfs,
            code: None,
            image: Some(ImageMeta {
                uses: 2,
                broadcast_bits: 3,
                source_messages: 1,
            }),
        }));
    }

    #[test]
    fn network_documents_round_trip() {
        let (n, code) = fixtures::fig2a();
        let pmfs = n.uniform_pmfs();
        round_trip(Document::Network(NetworkDocument {
            instance: n.clone(),
            pmfs: pmfs.clone(),
            code: Some(code.clone()),
            augmented: None,
        }));
        let (aug, det) = augment(&n, &code).unwrap();
        round_trip(Document::Network(NetworkDocument {
            instance: aug.instance().clone(),
            pmfs: aug.pmfs(&pmfs).unwrap(),
            code: Some(det),
            augmented: Some(aug),
        }));
    }

    #[test]
    fn parse_errors_are_reported() {
        assert!(matches!(parse_document("kind = 3"), Err(Error::Parse(_))));
        assert!(matches!(parse_document("kind = \"tree\""), Err(Error::Parse(_))));
        let err = parse_document("kind = \"index\"\n[[messages]]\nid = \"1\"\nalphabet = \"two\"\n").unwrap_err();
        assert!(err.to_string().contains("line 4"), "{err}");
        let err = parse_document(
            "kind = \"index\"\n[[messages]]\nid = \"1\"\nalphabet = 2\n[[receivers]]\nid = \"t\"\nwants = [\"9\"]\n",
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnknownVariable(_)), "{err}");
    }

    #[test]
    fn edge_ids() {
        assert_eq!(parse_edge_id("a->b#2").unwrap(), ("a", "b", 2));
        assert_eq!(parse_edge_id("a->b").unwrap(), ("a", "b", 0));
        assert!(parse_edge_id("a-b").is_err());
        assert!(parse_edge_id("->b").is_err());
        assert!(parse_edge_id("a->b#x").is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/6").unwrap(), Rational::new(1, 2));
        assert_eq!(format_rational(&Rational::new(2, 4)), "1/2");
        assert_eq!(format_rational(&Rational::from_integer(1)), "1");
        assert!(parse_rational("-1/2").is_err());
        assert!(parse_rational("1/0").is_err());
    }
}
